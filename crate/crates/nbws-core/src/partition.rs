//! The canonical partition of the tree for a periodic word and a period
//! multiple k: the principal component, its translate fibers, remainder
//! classes, class representatives, and set-translation utilities.
//!
//! Components are defined as translate fibers of the principal component:
//! the component index of u is the unique l such that translating u by
//! -l blocks lands in the principal component.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::tree::{left_annihilate, left_create, right_translate, TreeWord};
use crate::words::{reverse_suffix_match, FiniteWord, InfiniteWord, WordError};

/// A periodic word together with the block data for the k-partition.
#[derive(Clone, PartialEq, Debug)]
pub struct PartitionContext {
    omega: InfiniteWord,
    v0: FiniteWord,
    k: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PartitionError {
    Word(WordError),
    ZeroK,
    NoComponentFound(TreeWord),
    AmbiguousComponent(TreeWord),
    RemainderNotZero(TreeWord),
    ComponentNotDivisible(TreeWord),
}

impl fmt::Display for PartitionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionError::Word(e) => write!(f, "{}", e),
            PartitionError::ZeroK => write!(f, "k must be positive"),
            PartitionError::NoComponentFound(u) => {
                write!(f, "no component index found for {} within scan bound", u)
            }
            PartitionError::AmbiguousComponent(u) => {
                write!(f, "multiple component indices found for {}", u)
            }
            PartitionError::RemainderNotZero(u) => {
                write!(f, "{} does not lie in a remainder-0 class", u)
            }
            PartitionError::ComponentNotDivisible(u) => {
                write!(f, "component index of {} is not divisible by k", u)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PartitionError {}

impl From<WordError> for PartitionError {
    fn from(e: WordError) -> PartitionError {
        PartitionError::Word(e)
    }
}

impl PartitionContext {
    pub fn new(omega: InfiniteWord, k: usize) -> Result<PartitionContext, PartitionError> {
        if k == 0 {
            return Err(PartitionError::ZeroK);
        }
        let v0 = omega.primitive_period()?;
        Ok(PartitionContext { omega, v0, k })
    }

    pub fn omega(&self) -> &InfiniteWord {
        &self.omega
    }

    pub fn v0(&self) -> &FiniteWord {
        &self.v0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_len(&self) -> usize {
        self.k * self.v0.len()
    }

    /// Same word and same period multiple.
    pub fn agrees_with(&self, other: &PartitionContext) -> bool {
        self.omega == other.omega && self.k == other.k
    }
}

/// Class data for one tree word: translate-fiber component, remainder, and
/// the representative inside the principal component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassInfo {
    pub component: i64,
    pub remainder: usize,
    pub representative: TreeWord,
}

/// Signed distance from the principal block: -depth on the main-branch
/// side, suffix-match length on the positive side.
pub fn signed_depth(u: &TreeWord, ctx: &PartitionContext) -> i64 {
    if u.depth() >= 1 {
        -(u.depth() as i64)
    } else {
        reverse_suffix_match(u.positive(), &ctx.omega).expect("periodic by construction") as i64
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    if a.rem_euclid(b) != 0 {
        q + 1
    } else {
        q
    }
}

/// The unique l with `right_translate(u, -l, k)` in the principal component.
pub fn component_index(u: &TreeWord, ctx: &PartitionContext) -> i64 {
    ceil_div(signed_depth(u, ctx), ctx.block_len() as i64)
}

/// Membership in the principal component.
pub fn in_principal_component(u: &TreeWord, ctx: &PartitionContext) -> bool {
    if u.depth() >= ctx.block_len() {
        return false;
    }
    if u.depth() >= 1 {
        return true;
    }
    // depth 0: the word must not end with i_{|v0|} (the i_0 convention)
    u.positive().last() != Some(ctx.omega.letter_at(ctx.v0.len() as u64))
}

/// The representative of u's class inside the principal component.
pub fn class_representative(u: &TreeWord, ctx: &PartitionContext) -> TreeWord {
    let l = component_index(u, ctx);
    right_translate(u, -l, ctx.k, &ctx.omega).expect("periodic by construction")
}

/// Remainder class r in [0, k): the |v0|-slice of the representative.
pub fn remainder_class(u: &TreeWord, ctx: &PartitionContext) -> usize {
    class_representative(u, ctx).depth() / ctx.v0.len()
}

/// Component, remainder, and representative in one pass.
pub fn classify(u: &TreeWord, ctx: &PartitionContext) -> ClassInfo {
    let component = component_index(u, ctx);
    let representative = right_translate(u, -component, ctx.k, &ctx.omega)
        .expect("periodic by construction");
    ClassInfo {
        component,
        remainder: representative.depth() / ctx.v0.len(),
        representative,
    }
}

/// Translates of u's representative for j in -radius..=radius.
pub fn j_class_orbit(u: &TreeWord, ctx: &PartitionContext, radius: usize) -> Vec<TreeWord> {
    let rep = class_representative(u, ctx);
    let mut out = Vec::with_capacity(2 * radius + 1);
    for j in -(radius as i64)..=(radius as i64) {
        out.push(right_translate(&rep, j, ctx.k, &ctx.omega).expect("periodic"));
    }
    out
}

/// Independent oracle: scan j in [-bound, bound] for the unique j with
/// `right_translate(u, -j)` principal; errors signal a partition bug.
pub fn brute_force_classify(
    u: &TreeWord,
    ctx: &PartitionContext,
    bound: usize,
) -> Result<i64, PartitionError> {
    let mut found: Option<i64> = None;
    for j in -(bound as i64)..=(bound as i64) {
        let translated = right_translate(u, -j, ctx.k, &ctx.omega)?;
        if in_principal_component(&translated, ctx) {
            if found.is_some() {
                return Err(PartitionError::AmbiguousComponent(u.clone()));
            }
            found = Some(j);
        }
    }
    found.ok_or_else(|| PartitionError::NoComponentFound(u.clone()))
}

/// Elementwise left creation by the letters of w: `A -> wA`.
pub fn set_left_translate(
    w: &FiniteWord,
    set: &BTreeSet<TreeWord>,
    omega: &InfiniteWord,
) -> BTreeSet<TreeWord> {
    set.iter()
        .map(|u| {
            let mut cur = u.clone();
            for &i in w.letters().iter().rev() {
                cur = left_create(i, &cur, omega);
            }
            cur
        })
        .collect()
}

/// Elementwise iterated annihilation by the letters of w, dropping words
/// that map to zero: `A -> w^{-1}A` intersected with the tree.
pub fn set_left_star(
    w: &FiniteWord,
    set: &BTreeSet<TreeWord>,
    omega: &InfiniteWord,
) -> BTreeSet<TreeWord> {
    set.iter()
        .filter_map(|u| {
            let mut cur = u.clone();
            for &i in w.letters().iter() {
                cur = left_annihilate(i, &cur, omega)?;
            }
            Some(cur)
        })
        .collect()
}

/// The translate realizing the block-collapsing bijection on remainder-0
/// classes: a word with component l divisible by k maps to the word in the
/// same class chain with component l/k.
pub fn u_omega_k_map(u: &TreeWord, ctx: &PartitionContext) -> Result<TreeWord, PartitionError> {
    let info = classify(u, ctx);
    if info.remainder != 0 {
        return Err(PartitionError::RemainderNotZero(u.clone()));
    }
    if info.component.rem_euclid(ctx.k as i64) != 0 {
        return Err(PartitionError::ComponentNotDivisible(u.clone()));
    }
    Ok(right_translate(
        &info.representative,
        info.component / ctx.k as i64,
        ctx.k,
        &ctx.omega,
    )?)
}
