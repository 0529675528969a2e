//! Weight assignments on the tree: evaluation rules, periodicity checks
//! with an explicit honesty level, and the phase normalization that turns
//! an arbitrary nonzero table into a nonnegative one by a diagonal unitary.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::partition::{class_representative, PartitionContext, PartitionError};
use crate::scalar::{ComplexScalar, Scalar, ScalarError};
use crate::tree::{
    enumerate_window, shift_tail_map, shift_tail_unmap, unique_parent, TreeWord, Window,
};
use crate::words::{InfiniteWord, WordError};

#[derive(Clone, PartialEq, Debug)]
pub enum WeightError {
    Word(WordError),
    Partition(PartitionError),
    Scalar(ScalarError),
    NonPositive(TreeWord),
    MissingEntry(TreeWord),
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::Word(e) => write!(f, "{}", e),
            WeightError::Partition(e) => write!(f, "{}", e),
            WeightError::Scalar(e) => write!(f, "{}", e),
            WeightError::NonPositive(u) => write!(f, "weight at {} is not positive", u),
            WeightError::MissingEntry(u) => write!(f, "no weight entry for {}", u),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WeightError {}

impl From<WordError> for WeightError {
    fn from(e: WordError) -> WeightError {
        WeightError::Word(e)
    }
}

impl From<PartitionError> for WeightError {
    fn from(e: PartitionError) -> WeightError {
        WeightError::Partition(e)
    }
}

impl From<ScalarError> for WeightError {
    fn from(e: ScalarError) -> WeightError {
        WeightError::Scalar(e)
    }
}

/// A positive weight for every tree word, indexed by the target of the
/// creation edge. Rules are total functions; windows only bound what gets
/// checked and printed.
#[derive(Clone)]
pub enum WeightRule {
    /// The same weight everywhere.
    Constant(Scalar),
    /// Explicit table with a fallback for words not listed.
    Tabulated {
        entries: BTreeMap<TreeWord, Scalar>,
        default: Scalar,
    },
    /// Constant on each class of the k-partition: the base rule is read at
    /// the class representative. Periodicity with period `ctx.k()` holds by
    /// construction.
    ClassPeriodic {
        ctx: PartitionContext,
        base: Box<WeightRule>,
    },
    /// Arbitrary closure; no structural guarantees.
    Custom {
        name: String,
        f: Arc<dyn Fn(&TreeWord) -> Scalar + Send + Sync>,
    },
    /// A rule over the periodic tail obtained from a rule over the full
    /// eventually periodic word by absorbing a preperiod of length `offset`.
    Transported {
        offset: usize,
        omega: InfiniteWord,
        base: Box<WeightRule>,
    },
    /// The reverse direction: a rule over `omega = preperiod . tail`
    /// defined by reading a tail rule through the relabeling.
    ShiftTailTransport {
        offset: usize,
        tail: InfiniteWord,
        base: Box<WeightRule>,
    },
}

impl fmt::Debug for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Constant(c) => write!(f, "Constant({})", c),
            WeightRule::Tabulated { entries, default } => f
                .debug_struct("Tabulated")
                .field("entries", &entries.len())
                .field("default", default)
                .finish(),
            WeightRule::ClassPeriodic { ctx, base } => f
                .debug_struct("ClassPeriodic")
                .field("k", &ctx.k())
                .field("base", base)
                .finish(),
            WeightRule::Custom { name, .. } => write!(f, "Custom({})", name),
            WeightRule::Transported { offset, base, .. } => f
                .debug_struct("Transported")
                .field("offset", offset)
                .field("base", base)
                .finish(),
            WeightRule::ShiftTailTransport { offset, base, .. } => f
                .debug_struct("ShiftTailTransport")
                .field("offset", offset)
                .field("base", base)
                .finish(),
        }
    }
}

impl WeightRule {
    /// The weight at u over the word `omega` the rule is being used with.
    /// Errors on non-positive values: tables with signs or zeros go through
    /// `phase_normalize` first.
    pub fn evaluate(&self, u: &TreeWord, omega: &InfiniteWord) -> Result<Scalar, WeightError> {
        let value = match self {
            WeightRule::Constant(c) => c.clone(),
            WeightRule::Tabulated { entries, default } => {
                entries.get(u).unwrap_or(default).clone()
            }
            WeightRule::ClassPeriodic { ctx, base } => {
                return base.evaluate(&class_representative(u, ctx), ctx.omega());
            }
            WeightRule::Custom { f, .. } => f(u),
            WeightRule::Transported {
                offset,
                omega: full,
                base,
            } => {
                return base.evaluate(&shift_tail_map(u, *offset, full), full);
            }
            WeightRule::ShiftTailTransport { offset, tail, base } => {
                return base.evaluate(&shift_tail_unmap(u, *offset, omega, tail), tail);
            }
        };
        if value.is_positive() {
            Ok(value)
        } else {
            Err(WeightError::NonPositive(u.clone()))
        }
    }
}

/// How a certificate was obtained: by the shape of the rule, or by
/// checking every word in a finite window.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Honesty {
    Structural,
    WindowCertified,
}

#[derive(Clone, PartialEq, Debug)]
pub enum PeriodicityCheck {
    Periodic(Honesty),
    NotPeriodic { counterexample: TreeWord },
}

/// Does the rule take the same value on every class of the k-partition?
///
/// Structurally certain cases (constants; class-periodic rules whose
/// period divides k over the same word) short-circuit. Everything else is
/// compared entry-by-entry against the class representative over the
/// window, first counterexample wins.
pub fn is_k_periodic(
    rule: &WeightRule,
    k: usize,
    omega: &InfiniteWord,
    window: &Window,
    n: u32,
) -> Result<PeriodicityCheck, WeightError> {
    if structurally_k_periodic(rule, k, omega) {
        return Ok(PeriodicityCheck::Periodic(Honesty::Structural));
    }
    let ctx = PartitionContext::new(omega.clone(), k)?;
    for u in enumerate_window(window, n, omega) {
        let rep = class_representative(&u, &ctx);
        if rule.evaluate(&u, omega)? != rule.evaluate(&rep, omega)? {
            return Ok(PeriodicityCheck::NotPeriodic { counterexample: u });
        }
    }
    Ok(PeriodicityCheck::Periodic(Honesty::WindowCertified))
}

fn structurally_k_periodic(rule: &WeightRule, k: usize, omega: &InfiniteWord) -> bool {
    match rule {
        WeightRule::Constant(_) => true,
        WeightRule::ClassPeriodic { ctx, .. } => {
            ctx.omega() == omega && k % ctx.k() == 0
        }
        _ => false,
    }
}

/// Smallest k in 1..=kmax for which the rule is k-periodic, with the
/// honesty level of that certificate.
pub fn minimal_period(
    rule: &WeightRule,
    omega: &InfiniteWord,
    window: &Window,
    n: u32,
    kmax: usize,
) -> Result<Option<(usize, Honesty)>, WeightError> {
    for k in 1..=kmax {
        if let PeriodicityCheck::Periodic(h) = is_k_periodic(rule, k, omega, window, n)? {
            return Ok(Some((k, h)));
        }
    }
    Ok(None)
}

/// The diagonal unitary and the resulting nonnegative weights.
#[derive(Clone, PartialEq, Debug)]
pub struct PhaseNormalization {
    pub mu: BTreeMap<TreeWord, ComplexScalar>,
    pub magnitudes: BTreeMap<TreeWord, Scalar>,
}

fn lambda_at<'a>(
    table: &'a BTreeMap<TreeWord, ComplexScalar>,
    u: &TreeWord,
) -> Result<&'a ComplexScalar, WeightError> {
    table.get(u).ok_or_else(|| WeightError::MissingEntry(u.clone()))
}

/// Conjugating diagonal unitary mu with mu_unit = 1 making every weight in
/// the window nonnegative: mu is fixed along the main branch first (each
/// step determined by the previous), then outward edge by edge. The table
/// must cover every window word except the deepest main-branch word.
pub fn phase_normalize(
    lambda: &BTreeMap<TreeWord, ComplexScalar>,
    window: &Window,
    n: u32,
    omega: &InfiniteWord,
) -> Result<PhaseNormalization, WeightError> {
    let mut mu: BTreeMap<TreeWord, ComplexScalar> = BTreeMap::new();
    mu.insert(TreeWord::unit(), ComplexScalar::one());
    // main branch: the edge into (phi, m-1) is created from (phi, m)
    for m in 1..=window.max_neg {
        let prev = TreeWord::main_branch(m - 1);
        let lam = lambda_at(lambda, &prev)?;
        let mu_prev = mu.get(&prev).expect("previous branch word set");
        mu.insert(TreeWord::main_branch(m), lam.mul(mu_prev).phase()?);
    }
    // remaining words: parents are shorter at the same depth, so the
    // enumeration order visits them first
    for u in enumerate_window(window, n, omega) {
        if u.positive().len() == 0 {
            continue;
        }
        let (_, parent) = unique_parent(&u, omega);
        let lam = lambda_at(lambda, &u)?;
        let mu_parent = mu.get(&parent).expect("parent precedes child");
        mu.insert(u.clone(), mu_parent.conj().mul(lam).phase()?.conj());
    }
    let mut magnitudes = BTreeMap::new();
    for (u, lam) in lambda {
        magnitudes.insert(u.clone(), lam.modulus()?);
    }
    Ok(PhaseNormalization { mu, magnitudes })
}

/// Checks conj(mu_parent) * lambda_u * mu_u == |lambda_u| on every window
/// edge; returns the first word where it fails.
pub fn verify_normalization(
    lambda: &BTreeMap<TreeWord, ComplexScalar>,
    norm: &PhaseNormalization,
    window: &Window,
    n: u32,
    omega: &InfiniteWord,
) -> Result<Option<TreeWord>, WeightError> {
    let mut edges: Vec<(TreeWord, TreeWord)> = Vec::new();
    for m in 1..=window.max_neg {
        edges.push((TreeWord::main_branch(m), TreeWord::main_branch(m - 1)));
    }
    for u in enumerate_window(window, n, omega) {
        if u.positive().len() == 0 {
            continue;
        }
        let (_, parent) = unique_parent(&u, omega);
        edges.push((parent, u));
    }
    for (parent, target) in edges {
        let lam = lambda_at(lambda, &target)?;
        let mu_p = norm
            .mu
            .get(&parent)
            .ok_or_else(|| WeightError::MissingEntry(parent.clone()))?;
        let mu_t = norm
            .mu
            .get(&target)
            .ok_or_else(|| WeightError::MissingEntry(target.clone()))?;
        let normalized = mu_p.conj().mul(lam).mul(mu_t);
        if normalized != ComplexScalar::from_real(lam.modulus()?) {
            return Ok(Some(target));
        }
    }
    Ok(None)
}

/// A weighted shift system: alphabet size, the defining word, and the
/// weight rule.
#[derive(Clone, Debug)]
pub struct ShiftSpec {
    pub n: u32,
    pub omega: InfiniteWord,
    pub weights: WeightRule,
}
