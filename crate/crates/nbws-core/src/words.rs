//! Finite and infinite words over the n-letter alphabet.
//!
//! Letters are 1-indexed. Finite words form the free semigroup with unit
//! `phi` (the empty word). Infinite words are either eventually periodic,
//! given by a preperiod and a primitive period, or come from a named
//! aperiodic generator.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// A single generator letter, 1-indexed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(pub u32);

impl Letter {
    pub fn new(value: u32) -> Result<Letter, WordError> {
        if value == 0 {
            return Err(WordError::LetterOutOfRange(value));
        }
        Ok(Letter(value))
    }

    pub fn value(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordError {
    LetterOutOfRange(u32),
    EmptyWord,
    EmptyPeriod,
    AperiodicInput,
    ParseError(String),
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::LetterOutOfRange(v) => write!(f, "letter {} out of range", v),
            WordError::EmptyWord => write!(f, "operation requires a nonempty word"),
            WordError::EmptyPeriod => write!(f, "period must be nonempty"),
            WordError::AperiodicInput => write!(f, "operation requires an eventually periodic word"),
            WordError::ParseError(s) => write!(f, "cannot parse word: {}", s),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WordError {}

/// An element of the free semigroup: a finite sequence of letters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FiniteWord(Vec<Letter>);

impl FiniteWord {
    /// The unit `phi`.
    pub fn unit() -> FiniteWord {
        FiniteWord(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> FiniteWord {
        FiniteWord(letters)
    }

    /// Parse from digits "1".."9"; the empty string is `phi`.
    pub fn parse(s: &str) -> Result<FiniteWord, WordError> {
        if s.is_empty() {
            return Ok(FiniteWord::unit());
        }
        if s.contains(',') {
            let mut letters = Vec::new();
            for part in s.split(',') {
                let v: u32 = part
                    .trim()
                    .parse()
                    .map_err(|_| WordError::ParseError(s.to_owned()))?;
                letters.push(Letter::new(v)?);
            }
            return Ok(FiniteWord(letters));
        }
        let mut letters = Vec::new();
        for ch in s.chars() {
            let v = ch
                .to_digit(10)
                .ok_or_else(|| WordError::ParseError(s.to_owned()))?;
            letters.push(Letter::new(v)?);
        }
        Ok(FiniteWord(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Drop the last letter; no-op on `phi`.
    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    /// The word without its first letter.
    pub fn tail(&self) -> FiniteWord {
        FiniteWord(self.0[1.min(self.0.len())..].to_vec())
    }

    pub fn repeat(&self, times: usize) -> FiniteWord {
        let mut out = Vec::with_capacity(self.0.len() * times);
        for _ in 0..times {
            out.extend_from_slice(&self.0);
        }
        FiniteWord(out)
    }

    /// Rotate right by one: the last letter moves to the front.
    pub fn rotate_right(&self) -> FiniteWord {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len());
        out.push(*self.0.last().unwrap());
        out.extend_from_slice(&self.0[..self.0.len() - 1]);
        FiniteWord(out)
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|l| l.0 <= 9) {
            for l in &self.0 {
                write!(f, "{}", l.0)?;
            }
            Ok(())
        } else {
            let mut first = true;
            for l in &self.0 {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{}", l.0)?;
                first = false;
            }
            Ok(())
        }
    }
}

/// Concatenation: letters of `a` followed by letters of `b`.
pub fn concat(a: &FiniteWord, b: &FiniteWord) -> FiniteWord {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a.letters());
    out.extend_from_slice(b.letters());
    FiniteWord(out)
}

/// A primitive root together with the exponent reconstructing the input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrimitiveDecomposition {
    pub root: FiniteWord,
    pub exponent: usize,
}

/// The shortest word whose power equals `w`, found by divisor scan.
pub fn primitive_root(w: &FiniteWord) -> Result<PrimitiveDecomposition, WordError> {
    if w.is_empty() {
        return Err(WordError::EmptyWord);
    }
    let n = w.len();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let root = FiniteWord(w.letters()[..d].to_vec());
        if root.repeat(n / d) == *w {
            return Ok(PrimitiveDecomposition {
                root,
                exponent: n / d,
            });
        }
    }
    unreachable!("d = n always reconstructs w")
}

pub fn is_primitive(w: &FiniteWord) -> bool {
    !w.is_empty() && primitive_root(w).map(|d| d.exponent == 1).unwrap_or(false)
}

/// Named deterministic letter streams with an aperiodicity certificate.
#[derive(Clone)]
pub struct AperiodicGenerator {
    pub name: String,
    pub certified_aperiodic: bool,
    letter_fn: Arc<dyn Fn(u64) -> Letter + Send + Sync>,
}

impl AperiodicGenerator {
    pub fn new(
        name: &str,
        certified_aperiodic: bool,
        letter_fn: Arc<dyn Fn(u64) -> Letter + Send + Sync>,
    ) -> AperiodicGenerator {
        AperiodicGenerator {
            name: name.to_owned(),
            certified_aperiodic,
            letter_fn,
        }
    }

    /// Thue-Morse word mapped onto {1, 2}.
    pub fn thue_morse() -> AperiodicGenerator {
        AperiodicGenerator::new(
            "thue_morse",
            true,
            Arc::new(|m| Letter(1 + ((m - 1).count_ones() & 1))),
        )
    }

    /// Fibonacci (Sturmian) word mapped onto {1, 2}.
    ///
    /// Uses floor(m*phi) computed with exact integer square roots, so the
    /// stream is total and deterministic for every index.
    pub fn fibonacci() -> AperiodicGenerator {
        AperiodicGenerator::new(
            "fibonacci",
            true,
            Arc::new(|m| {
                // letter m is 1 when floor((m+1)phi) - floor(m phi) = 2
                let a = floor_golden(m + 1) - floor_golden(m);
                if a == 2 {
                    Letter(1)
                } else {
                    Letter(2)
                }
            }),
        )
    }

    pub fn builtin(name: &str) -> Option<AperiodicGenerator> {
        match name {
            "thue_morse" => Some(AperiodicGenerator::thue_morse()),
            "fibonacci" => Some(AperiodicGenerator::fibonacci()),
            _ => None,
        }
    }

    pub fn letter_at(&self, m: u64) -> Letter {
        (self.letter_fn)(m)
    }
}

impl fmt::Debug for AperiodicGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AperiodicGenerator")
            .field("name", &self.name)
            .field("certified_aperiodic", &self.certified_aperiodic)
            .finish()
    }
}

impl PartialEq for AperiodicGenerator {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

/// floor(m * (1 + sqrt 5) / 2) = (m + isqrt(5 m^2)) / 2, exact in u128.
fn floor_golden(m: u64) -> u64 {
    let m = m as u128;
    let s = isqrt_u128(5 * m * m);
    ((m + s) / 2) as u64
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = 1u128 << ((128 - n.leading_zeros()).div_ceil(2));
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// An infinite word, finitely presented.
///
/// Eventually periodic words are normalized on construction: the period is
/// reduced to its primitive root and the preperiod is minimized by rotating
/// trailing agreement into the periodic part.
#[derive(Clone, Debug, PartialEq)]
pub enum InfiniteWord {
    EventuallyPeriodic {
        preperiod: FiniteWord,
        period: FiniteWord,
    },
    Aperiodic(AperiodicGenerator),
}

/// Result of classifying an infinite word.
#[derive(Clone, PartialEq, Debug)]
pub enum Classification {
    Periodic { v0: FiniteWord },
    EventuallyPeriodic { preperiod: FiniteWord, v0: FiniteWord },
    Aperiodic { certified: bool },
}

impl InfiniteWord {
    /// A purely periodic word `period^inf` (period normalized to primitive).
    pub fn periodic(period: FiniteWord) -> Result<InfiniteWord, WordError> {
        InfiniteWord::eventually_periodic(FiniteWord::unit(), period)
    }

    /// `preperiod . period^inf`, normalized.
    pub fn eventually_periodic(
        preperiod: FiniteWord,
        period: FiniteWord,
    ) -> Result<InfiniteWord, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        let mut period = primitive_root(&period)?.root;
        let mut preperiod = preperiod;
        while !preperiod.is_empty() && preperiod.last() == period.last() {
            preperiod.pop();
            period = period.rotate_right();
        }
        Ok(InfiniteWord::EventuallyPeriodic { preperiod, period })
    }

    pub fn aperiodic(gen: AperiodicGenerator) -> InfiniteWord {
        InfiniteWord::Aperiodic(gen)
    }

    /// The m-th letter, m >= 1.
    pub fn letter_at(&self, m: u64) -> Letter {
        assert!(m >= 1, "letters are 1-indexed");
        match self {
            InfiniteWord::EventuallyPeriodic { preperiod, period } => {
                let p = preperiod.len() as u64;
                if m <= p {
                    preperiod.letters()[(m - 1) as usize]
                } else {
                    let idx = ((m - p - 1) % period.len() as u64) as usize;
                    period.letters()[idx]
                }
            }
            InfiniteWord::Aperiodic(gen) => gen.letter_at(m),
        }
    }

    /// The prefix `omega_m`; `omega_0 = phi`.
    pub fn prefix(&self, m: u64) -> FiniteWord {
        let mut out = Vec::with_capacity(m as usize);
        for i in 1..=m {
            out.push(self.letter_at(i));
        }
        FiniteWord(out)
    }

    pub fn classify(&self) -> Classification {
        match self {
            InfiniteWord::EventuallyPeriodic { preperiod, period } => {
                if preperiod.is_empty() {
                    Classification::Periodic { v0: period.clone() }
                } else {
                    Classification::EventuallyPeriodic {
                        preperiod: preperiod.clone(),
                        v0: period.clone(),
                    }
                }
            }
            InfiniteWord::Aperiodic(gen) => Classification::Aperiodic {
                certified: gen.certified_aperiodic,
            },
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.classify(), Classification::Periodic { .. })
    }

    /// The primitive period of a purely periodic word.
    pub fn primitive_period(&self) -> Result<FiniteWord, WordError> {
        match self.classify() {
            Classification::Periodic { v0 } => Ok(v0),
            _ => Err(WordError::AperiodicInput),
        }
    }

    /// Split an eventually periodic word into its purely periodic tail and
    /// the preperiod offset k, so that `omega = u . omega'` with `|u| = k`.
    pub fn shift_tail_normalize(&self) -> Result<(InfiniteWord, usize), WordError> {
        match self {
            InfiniteWord::EventuallyPeriodic { preperiod, period } => Ok((
                InfiniteWord::EventuallyPeriodic {
                    preperiod: FiniteWord::unit(),
                    period: period.clone(),
                },
                preperiod.len(),
            )),
            InfiniteWord::Aperiodic(_) => Err(WordError::AperiodicInput),
        }
    }
}

/// Largest s <= |v| such that the final s letters of `v` match the reversed
/// periodic stream `... v0 v0` read from the right.
pub fn reverse_suffix_match(v: &FiniteWord, omega: &InfiniteWord) -> Result<usize, WordError> {
    let v0 = omega.primitive_period()?;
    let p = v0.len();
    let mut s = 0;
    while s < v.len() {
        let from_right = v.letters()[v.len() - 1 - s];
        let stream = v0.letters()[p - 1 - (s % p)];
        if from_right != stream {
            break;
        }
        s += 1;
    }
    Ok(s)
}

/// Outcome of the exhaustive primitive-power sweep.
#[derive(Clone, Debug)]
pub struct PowerLemmaReport {
    pub checked: u64,
    pub violation: Option<PowerLemmaViolation>,
}

#[derive(Clone, Debug)]
pub struct PowerLemmaViolation {
    pub u: FiniteWord,
    pub v: FiniteWord,
    pub l: usize,
    pub m: usize,
}

impl PowerLemmaReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustively checks: whenever u^l = v^m with v primitive, u is a power
/// of v. Enumerates all u, v over the n-letter alphabet within the bounds.
pub fn check_power_lemma(max_u: usize, max_v: usize, max_exp: usize, n: u32) -> PowerLemmaReport {
    let mut checked = 0u64;
    for u in enumerate_words(n, max_u) {
        if u.is_empty() {
            continue;
        }
        for v in enumerate_words(n, max_v) {
            if v.is_empty() || !is_primitive(&v) {
                continue;
            }
            for l in 1..=max_exp {
                for m in 1..=max_exp {
                    if u.len() * l != v.len() * m {
                        continue;
                    }
                    if u.repeat(l) == v.repeat(m) {
                        checked += 1;
                        let is_power = u.len() % v.len() == 0
                            && v.repeat(u.len() / v.len()) == u;
                        if !is_power {
                            return PowerLemmaReport {
                                checked,
                                violation: Some(PowerLemmaViolation { u, v, l, m }),
                            };
                        }
                    }
                }
            }
        }
    }
    PowerLemmaReport {
        checked,
        violation: None,
    }
}

/// All words of length <= max_len over {1..n}, ordered by length then lex.
pub fn enumerate_words(n: u32, max_len: usize) -> Vec<FiniteWord> {
    let mut out = Vec::new();
    let mut current: Vec<FiniteWord> = Vec::new();
    current.push(FiniteWord::unit());
    out.push(FiniteWord::unit());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &current {
            for i in 1..=n {
                let mut w2 = w.clone();
                w2.push(Letter(i));
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    out
}
