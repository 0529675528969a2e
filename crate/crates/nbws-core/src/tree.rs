//! Canonical elements of the index tree attached to an infinite word, the
//! left creation/annihilation actions on them, right translation along the
//! periodic main branch, and window enumeration.
//!
//! A `TreeWord` is the canonical pair (positive, depth) denoting the group
//! element `v . omega_m^{-1}`. Canonical means depth = 0 or the last letter
//! of `positive` differs from the depth-th letter of omega, so every group
//! element has exactly one representation.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::words::{
    concat, enumerate_words, FiniteWord, InfiniteWord, Letter, WordError,
};

/// Canonical pair (positive part, main-branch depth).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TreeWord {
    positive: FiniteWord,
    depth: usize,
}

impl TreeWord {
    /// The unit `phi` = (empty, 0).
    pub fn unit() -> TreeWord {
        TreeWord {
            positive: FiniteWord::unit(),
            depth: 0,
        }
    }

    /// Main-branch element `omega_m^{-1}`.
    pub fn main_branch(m: usize) -> TreeWord {
        TreeWord {
            positive: FiniteWord::unit(),
            depth: m,
        }
    }

    pub fn positive(&self) -> &FiniteWord {
        &self.positive
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_main_branch(&self) -> bool {
        self.positive.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.positive.is_empty() && self.depth == 0
    }

    /// Parse the "v|m" serialization, e.g. "12|3" or "|0".
    pub fn parse(s: &str) -> Result<TreeWord, WordError> {
        let (v, m) = s
            .split_once('|')
            .ok_or_else(|| WordError::ParseError(s.to_owned()))?;
        let positive = FiniteWord::parse(v)?;
        let depth: usize = m
            .parse()
            .map_err(|_| WordError::ParseError(s.to_owned()))?;
        Ok(TreeWord { positive, depth })
    }

    /// Human-oriented rendering matching the group-element notation:
    /// "12.w3^-1" style collapses to "phi" for the unit.
    pub fn pretty(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        if self.is_unit() {
            s.push_str("phi");
            return s;
        }
        if !self.positive.is_empty() {
            let _ = write!(s, "{}", self.positive);
        }
        if self.depth > 0 {
            let _ = write!(s, "w{}^-1", self.depth);
        }
        s
    }
}

impl fmt::Display for TreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.positive, self.depth)
    }
}

/// Reduce (v, m) to canonical form over `omega`: while the last letter of v
/// equals the m-th letter of omega, cancel it.
pub fn canonicalize(v: FiniteWord, m: usize, omega: &InfiniteWord) -> TreeWord {
    let mut v = v;
    let mut m = m;
    while m >= 1 && v.last() == Some(omega.letter_at(m as u64)) {
        v.pop();
        m -= 1;
    }
    TreeWord { positive: v, depth: m }
}

/// The carrier action of the i-th isometry: `u -> iu`, canonicalized.
pub fn left_create(i: Letter, u: &TreeWord, omega: &InfiniteWord) -> TreeWord {
    let mut v = FiniteWord::from_letters(alloc::vec![i]);
    v = concat(&v, &u.positive);
    canonicalize(v, u.depth, omega)
}

/// The adjoint carrier action: strip `i` from the front when possible, or
/// descend the main branch; `None` when the basis vector maps to zero.
pub fn left_annihilate(i: Letter, u: &TreeWord, omega: &InfiniteWord) -> Option<TreeWord> {
    if let Some(first) = u.positive.first() {
        if first == i {
            return Some(TreeWord {
                positive: u.positive.tail(),
                depth: u.depth,
            });
        }
        return None;
    }
    if omega.letter_at(u.depth as u64 + 1) == i {
        return Some(TreeWord::main_branch(u.depth + 1));
    }
    None
}

/// The unique (i, parent) with `left_create(i, parent) = u`.
pub fn unique_parent(u: &TreeWord, omega: &InfiniteWord) -> (Letter, TreeWord) {
    if let Some(first) = u.positive.first() {
        (
            first,
            TreeWord {
                positive: u.positive.tail(),
                depth: u.depth,
            },
        )
    } else {
        let i = omega.letter_at(u.depth as u64 + 1);
        (i, TreeWord::main_branch(u.depth + 1))
    }
}

/// Canonical form of `u . (v0^k)^j` over a purely periodic omega.
pub fn right_translate(
    u: &TreeWord,
    j: i64,
    k: usize,
    omega: &InfiniteWord,
) -> Result<TreeWord, WordError> {
    let v0 = omega.primitive_period()?;
    let step = (k * v0.len()) as i64;
    let t = j * step;
    if t == 0 {
        return Ok(u.clone());
    }
    if t < 0 {
        return Ok(canonicalize(
            u.positive.clone(),
            u.depth + (-t) as usize,
            omega,
        ));
    }
    let t = t as usize;
    if t <= u.depth {
        Ok(canonicalize(u.positive.clone(), u.depth - t, omega))
    } else {
        // append the omega letters depth+1 ..= t to the positive part
        let mut v = u.positive.clone();
        for m in (u.depth + 1)..=t {
            v.push(omega.letter_at(m as u64));
        }
        Ok(canonicalize(v, 0, omega))
    }
}

/// `u . v0^j` (single-period steps); same mechanics as `right_translate`.
pub fn translate_by_period(
    u: &TreeWord,
    j: i64,
    omega: &InfiniteWord,
) -> Result<TreeWord, WordError> {
    right_translate(u, j, 1, omega)
}

/// Finite truncation of the tree: canonical words with |positive| <= max_pos
/// and depth <= max_neg.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Window {
    pub max_pos: usize,
    pub max_neg: usize,
}

impl Window {
    pub fn new(max_pos: usize, max_neg: usize) -> Window {
        Window { max_pos, max_neg }
    }

    pub fn contains(&self, u: &TreeWord) -> bool {
        u.positive.len() <= self.max_pos && u.depth <= self.max_neg
    }
}

/// All canonical window words, ordered by (depth, |positive|, lex).
pub fn enumerate_window(w: &Window, n: u32, omega: &InfiniteWord) -> Vec<TreeWord> {
    let positives = enumerate_words(n, w.max_pos);
    let mut out = Vec::new();
    for depth in 0..=w.max_neg {
        let forbidden = if depth >= 1 {
            Some(omega.letter_at(depth as u64))
        } else {
            None
        };
        for v in &positives {
            if let Some(f) = forbidden {
                if v.last() == Some(f) {
                    continue;
                }
            }
            out.push(TreeWord {
                positive: v.clone(),
                depth,
            });
        }
    }
    // enumerate_words is already length-then-lex within each depth
    out
}

/// First m letters of the infinite word `u . omega`.
pub fn head_word(u: &TreeWord, m: usize, omega: &InfiniteWord) -> FiniteWord {
    let mut out = Vec::with_capacity(m);
    for t in 1..=m {
        if t <= u.positive.len() {
            out.push(u.positive.letters()[t - 1]);
        } else {
            out.push(omega.letter_at((u.depth + t - u.positive.len()) as u64));
        }
    }
    FiniteWord::from_letters(out)
}

/// Relabeling that absorbs a preperiod of length `offset`: a canonical word
/// over the periodic tail maps to the same positive part at depth + offset,
/// canonicalized over `omega = preperiod . tail`.
pub fn shift_tail_map(u: &TreeWord, offset: usize, omega: &InfiniteWord) -> TreeWord {
    canonicalize(u.positive.clone(), u.depth + offset, omega)
}

/// Inverse of `shift_tail_map`: rewrite a canonical word over
/// `omega = u . omega'` as a canonical word over the periodic tail.
pub fn shift_tail_unmap(
    u: &TreeWord,
    offset: usize,
    omega: &InfiniteWord,
    tail: &InfiniteWord,
) -> TreeWord {
    if u.depth >= offset {
        canonicalize(u.positive.clone(), u.depth - offset, tail)
    } else {
        // re-present at depth `offset` by appending omega letters, then drop
        let mut v = u.positive.clone();
        for m in (u.depth + 1)..=offset {
            v.push(omega.letter_at(m as u64));
        }
        canonicalize(v, 0, tail)
    }
}
