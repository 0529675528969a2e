//! The reducibility decision: classify the defining word, absorb any
//! preperiod, search for a certified weight period, and emit either the
//! reducing projection family or explicit irreducibility evidence.
//!
//! For a periodic word the negative answer is never claimed outright: "no
//! period up to Kmax on this window" is all a finite check can establish,
//! and the honesty field says so.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::operators::{
    commutation_defect, make_diagonal_projection, right_translation_operator,
    v_commutes_certificate, CommutationCertificate, OperatorError, SparseOperator, WindowBasis,
};
use crate::partition::{class_representative, classify, PartitionContext, PartitionError};
use crate::scalar::Scalar;
use crate::tree::{left_annihilate, left_create, translate_by_period, TreeWord, Window};
use crate::weights::{is_k_periodic, Honesty, PeriodicityCheck, ShiftSpec, WeightRule};
use crate::words::{Classification, InfiniteWord, Letter};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IrreducibleReason {
    AperiodicWord,
    NoPeriodUpTo { kmax: usize },
}

/// Supporting checks carried by a reducible verdict; all must pass before
/// the verdict is emitted.
#[derive(Clone, PartialEq, Debug)]
pub struct ReducibleEvidence {
    pub commutation: CommutationCertificate,
    pub projections_sum_to_identity: bool,
    pub projections_commute_with_v: bool,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Verdict {
    Reducible {
        k_min: usize,
        honesty: Honesty,
        evidence: ReducibleEvidence,
    },
    Irreducible {
        reason: IrreducibleReason,
        honesty: Honesty,
    },
}

/// Read the weight rule over the periodic tail: a transport wrapper that
/// already absorbs exactly this preperiod is unwrapped (keeping any
/// structural certificate it carries); anything else is composed with the
/// tail relabeling and can only be window-certified afterwards.
fn transport_rule(rule: &WeightRule, offset: usize, omega: &InfiniteWord, tail: &InfiniteWord) -> WeightRule {
    if offset == 0 {
        return rule.clone();
    }
    if let WeightRule::ShiftTailTransport {
        offset: inner_offset,
        tail: inner_tail,
        base,
    } = rule
    {
        if *inner_offset == offset && inner_tail == tail {
            return (**base).clone();
        }
    }
    WeightRule::Transported {
        offset,
        omega: omega.clone(),
        base: Box::new(rule.clone()),
    }
}

/// The decision procedure: certified-aperiodic words are irreducible
/// outright; otherwise the preperiod is absorbed and k = 1..kmax searched
/// for a certified weight period, the first hit carrying the projection
/// family.
pub fn verdict(
    spec: &ShiftSpec,
    kmax: usize,
    window: &Window,
) -> Result<Verdict, OperatorError> {
    match spec.omega.classify() {
        Classification::Aperiodic { certified } => {
            return Ok(Verdict::Irreducible {
                reason: IrreducibleReason::AperiodicWord,
                honesty: if certified {
                    Honesty::Structural
                } else {
                    Honesty::WindowCertified
                },
            });
        }
        Classification::Periodic { .. } | Classification::EventuallyPeriodic { .. } => {}
    }
    let (tail, offset) = spec.omega.shift_tail_normalize()?;
    let rule = transport_rule(&spec.weights, offset, &spec.omega, &tail);
    for k in 1..=kmax {
        if let PeriodicityCheck::Periodic(honesty) =
            is_k_periodic(&rule, k, &tail, window, spec.n)?
        {
            let ctx = PartitionContext::new(tail.clone(), k)?;
            let commutation = v_commutes_certificate(&rule, &ctx, window, spec.n)?;
            assert!(
                matches!(commutation, CommutationCertificate::Certified(_)),
                "periodicity certified but commutation fails: builder bug"
            );
            let basis = WindowBasis::new(window.clone(), spec.n, tail.clone());
            let projections = reducing_projections(&ctx, &basis);
            let mut sum = SparseOperator::zero(basis.clone());
            for p in &projections {
                sum = sum.add(p)?;
            }
            let projections_sum_to_identity = sum == SparseOperator::identity(basis.clone());
            let v = right_translation_operator(&ctx, &basis)?;
            let projections_commute_with_v = {
                let mut ok = true;
                for p in &projections {
                    if commutation_defect(p, &v, Some(&ctx))? != Scalar::zero() {
                        ok = false;
                    }
                }
                ok
            };
            assert!(
                projections_sum_to_identity && projections_commute_with_v,
                "projection family failed its exactness checks: builder bug"
            );
            return Ok(Verdict::Reducible {
                k_min: k,
                honesty,
                evidence: ReducibleEvidence {
                    commutation,
                    projections_sum_to_identity,
                    projections_commute_with_v,
                },
            });
        }
    }
    Ok(Verdict::Irreducible {
        reason: IrreducibleReason::NoPeriodUpTo { kmax },
        honesty: Honesty::WindowCertified,
    })
}

/// P_r = diagonal projection onto the remainder-r basis words, r = 0..k.
/// The family partitions the basis, so it sums to the identity and each
/// member commutes with V away from the window boundary.
pub fn reducing_projections(
    ctx: &PartitionContext,
    basis: &alloc::sync::Arc<WindowBasis>,
) -> Vec<SparseOperator> {
    let mut sets: Vec<BTreeSet<TreeWord>> = (0..ctx.k()).map(|_| BTreeSet::new()).collect();
    for u in basis.words() {
        sets[crate::partition::remainder_class(u, ctx)].insert(u.clone());
    }
    sets.iter()
        .map(|s| make_diagonal_projection(s, basis))
        .collect()
}

/// Where each generator sends each remainder class. The target remainder
/// of a creation edge is constant along each orbit but can differ between
/// orbits sharing a remainder, so each (letter, class) row carries the set
/// of remainders observed on the window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RestrictionReport {
    /// (letter, from class, observed target classes).
    pub transitions: Vec<(Letter, usize, BTreeSet<usize>)>,
    /// Letters whose creation edges fix every class: the generator
    /// restricts to each P_r range.
    pub preserving: Vec<Letter>,
}

pub fn restriction_report(
    ctx: &PartitionContext,
    basis: &WindowBasis,
) -> Result<RestrictionReport, PartitionError> {
    let mut transitions = Vec::new();
    let mut preserving = Vec::new();
    for i in 1..=basis.n {
        let letter = Letter::new(i).expect("valid letter");
        let mut preserves = true;
        for r in 0..ctx.k() {
            let mut targets = BTreeSet::new();
            for u in basis.words() {
                if crate::partition::remainder_class(u, ctx) != r {
                    continue;
                }
                let image = left_create(letter, u, ctx.omega());
                targets.insert(crate::partition::remainder_class(&image, ctx));
            }
            if targets.iter().any(|&t| t != r) {
                preserves = false;
            }
            if !targets.is_empty() {
                transitions.push((letter, r, targets));
            }
        }
        if preserves {
            preserving.push(letter);
        }
    }
    Ok(RestrictionReport {
        transitions,
        preserving,
    })
}

/// Expand a remainder-0, orbit-closed seed to the subspace it generates:
/// each seed class contributes its k remainder translates, restricted to
/// the window.
pub fn transport_unweighted_seed(
    seed: &BTreeSet<TreeWord>,
    ctx: &PartitionContext,
    basis: &WindowBasis,
) -> Result<BTreeSet<TreeWord>, PartitionError> {
    let mut target_reps = BTreeSet::new();
    for s in seed {
        let info = classify(s, ctx);
        if info.remainder != 0 {
            return Err(PartitionError::RemainderNotZero(s.clone()));
        }
        for r in 0..ctx.k() {
            let shifted = translate_by_period(&info.representative, -(r as i64), ctx.omega())?;
            target_reps.insert(class_representative(&shifted, ctx));
        }
    }
    Ok(basis
        .words()
        .iter()
        .filter(|u| target_reps.contains(&class_representative(u, ctx)))
        .cloned()
        .collect())
}

/// Finite shadow of the aperiodic irreducibility argument: the fixed-set
/// chain shrinks to the unit, and every basis vector is reachable from the
/// unit by in-window creation/annihilation steps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IrreducibilityEvidence {
    /// (m, size of the m-th fixed set), up to the first trivial one.
    pub chain: Vec<(usize, usize)>,
    pub collapses_to_unit: bool,
    pub reachable: usize,
    pub total: usize,
}

impl IrreducibilityEvidence {
    pub fn pass(&self) -> bool {
        self.collapses_to_unit && self.reachable == self.total
    }
}

pub fn irreducibility_evidence(
    basis: &WindowBasis,
) -> Result<IrreducibilityEvidence, OperatorError> {
    match basis.omega.classify() {
        Classification::Aperiodic { .. } => {}
        _ => {
            return Err(OperatorError::Word(
                crate::words::WordError::AperiodicInput,
            ))
        }
    }
    let mut chain = Vec::new();
    let mut collapses_to_unit = false;
    let bound = 4 * (basis.window.max_pos + basis.window.max_neg) + 8;
    for m in 1..=bound {
        let fixed = crate::operators::range_fixed_set(m, basis);
        chain.push((m, fixed.len()));
        if fixed.len() == 1 && fixed.contains(&TreeWord::unit()) {
            collapses_to_unit = true;
            break;
        }
    }
    // breadth-first sweep from the unit vector
    let mut seen: BTreeSet<TreeWord> = BTreeSet::new();
    let mut frontier = alloc::vec![TreeWord::unit()];
    seen.insert(TreeWord::unit());
    while let Some(u) = frontier.pop() {
        for i in 1..=basis.n {
            let i = Letter::new(i).expect("valid letter");
            let mut next = alloc::vec![left_create(i, &u, &basis.omega)];
            if let Some(a) = left_annihilate(i, &u, &basis.omega) {
                next.push(a);
            }
            for v in next {
                if basis.window.contains(&v) && seen.insert(v.clone()) {
                    frontier.push(v);
                }
            }
        }
    }
    Ok(IrreducibilityEvidence {
        chain,
        collapses_to_unit,
        reachable: basis.words().iter().filter(|u| seen.contains(u)).count(),
        total: basis.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use alloc::sync::Arc;
    use crate::words::{AperiodicGenerator, FiniteWord};

    fn w(s: &str) -> FiniteWord {
        FiniteWord::parse(s).unwrap()
    }

    fn tw(s: &str) -> TreeWord {
        TreeWord::parse(s).unwrap()
    }

    fn om(s: &str) -> InfiniteWord {
        InfiniteWord::periodic(w(s)).unwrap()
    }

    fn rat(p: i64, q: i64) -> Scalar {
        Scalar::from_ratio(p, q)
    }

    fn remainder_rule(omega: &InfiniteWord, k: usize, values: Vec<Scalar>) -> WeightRule {
        let ctx = PartitionContext::new(omega.clone(), k).unwrap();
        let inner = ctx.clone();
        WeightRule::ClassPeriodic {
            ctx,
            base: Box::new(WeightRule::Custom {
                name: String::from("remainder"),
                f: Arc::new(move |u: &TreeWord| {
                    values[crate::partition::remainder_class(u, &inner)].clone()
                }),
            }),
        }
    }

    fn depth_injective() -> WeightRule {
        // distinct value in every component: defeats every period
        WeightRule::Custom {
            name: String::from("depth-injective"),
            f: Arc::new(|u: &TreeWord| {
                let d = u.depth() as i64;
                let l = u.positive().len() as i64;
                rat(1, 1) + rat(1, 2 + 3 * d + 5 * l)
            }),
        }
    }

    #[test]
    fn aperiodic_word_is_irreducible() {
        let spec = ShiftSpec {
            n: 2,
            omega: InfiniteWord::aperiodic(AperiodicGenerator::thue_morse()),
            weights: WeightRule::Constant(rat(1, 1)),
        };
        assert_eq!(
            verdict(&spec, 8, &Window::new(3, 3)).unwrap(),
            Verdict::Irreducible {
                reason: IrreducibleReason::AperiodicWord,
                honesty: Honesty::Structural
            }
        );
    }

    #[test]
    fn constant_weights_reduce_at_one() {
        let spec = ShiftSpec {
            n: 2,
            omega: om("2"),
            weights: WeightRule::Constant(rat(1, 1)),
        };
        match verdict(&spec, 8, &Window::new(3, 6)).unwrap() {
            Verdict::Reducible {
                k_min,
                honesty,
                evidence,
            } => {
                assert_eq!(k_min, 1);
                assert_eq!(honesty, Honesty::Structural);
                assert!(evidence.projections_sum_to_identity);
                assert!(evidence.projections_commute_with_v);
            }
            other => panic!("expected reducible, got {:?}", other),
        }
    }

    #[test]
    fn two_periodic_rule_reduces_at_two() {
        let spec = ShiftSpec {
            n: 2,
            omega: om("2"),
            weights: remainder_rule(&om("2"), 2, alloc::vec![rat(1, 3), rat(1, 5)]),
        };
        match verdict(&spec, 8, &Window::new(3, 6)).unwrap() {
            Verdict::Reducible { k_min, .. } => assert_eq!(k_min, 2),
            other => panic!("expected reducible, got {:?}", other),
        }
    }

    #[test]
    fn depth_injective_never_reduces() {
        let spec = ShiftSpec {
            n: 2,
            omega: om("2"),
            weights: depth_injective(),
        };
        assert_eq!(
            verdict(&spec, 6, &Window::new(3, 6)).unwrap(),
            Verdict::Irreducible {
                reason: IrreducibleReason::NoPeriodUpTo { kmax: 6 },
                honesty: Honesty::WindowCertified
            }
        );
    }

    #[test]
    fn verdict_equivariant_under_preperiod() {
        // omega = 1 . 2^infty with weights lifted from the tail: the verdict
        // matches the tail system's
        let tail = om("2");
        let tail_rule = remainder_rule(&tail, 2, alloc::vec![rat(1, 3), rat(1, 5)]);
        let lifted_spec = ShiftSpec {
            n: 2,
            omega: InfiniteWord::eventually_periodic(w("1"), w("2")).unwrap(),
            weights: WeightRule::ShiftTailTransport {
                offset: 1,
                tail: tail.clone(),
                base: Box::new(tail_rule.clone()),
            },
        };
        let tail_spec = ShiftSpec {
            n: 2,
            omega: tail,
            weights: tail_rule,
        };
        let window = Window::new(3, 6);
        assert_eq!(
            match verdict(&lifted_spec, 8, &window).unwrap() {
                Verdict::Reducible { k_min, honesty, .. } => (k_min, honesty),
                other => panic!("{:?}", other),
            },
            match verdict(&tail_spec, 8, &window).unwrap() {
                Verdict::Reducible { k_min, honesty, .. } => (k_min, honesty),
                other => panic!("{:?}", other),
            }
        );
    }

    #[test]
    fn projections_split_the_basis() {
        let ctx = PartitionContext::new(om("2"), 2).unwrap();
        let basis = WindowBasis::new(Window::new(3, 6), 2, om("2"));
        let ps = reducing_projections(&ctx, &basis);
        assert_eq!(ps.len(), 2);
        let mut sum = SparseOperator::zero(basis.clone());
        for p in &ps {
            sum = sum.add(p).unwrap();
        }
        assert_eq!(sum, SparseOperator::identity(basis.clone()));
        // P_1 range holds the odd layer: 2^{-1} and 2
        let i = basis.index_of(&tw("|1")).unwrap();
        assert_eq!(ps[1].get(i, i), Scalar::one());
        let i = basis.index_of(&tw("2|0")).unwrap();
        assert_eq!(ps[1].get(i, i), Scalar::one());
        // P_0 holds the unit and the 1-classes
        let i = basis.index_of(&TreeWord::unit()).unwrap();
        assert_eq!(ps[0].get(i, i), Scalar::one());
        let i = basis.index_of(&tw("1|0")).unwrap();
        assert_eq!(ps[0].get(i, i), Scalar::one());
    }

    #[test]
    fn restriction_transitions() {
        let ctx = PartitionContext::new(om("2"), 2).unwrap();
        let basis = WindowBasis::new(Window::new(3, 6), 2, om("2"));
        let report = restriction_report(&ctx, &basis).unwrap();
        // the non-branch letter fixes both classes; the branch letter moves
        // between them orbit by orbit (phi goes up a class while the orbit
        // of 1 stays put, both from class 0)
        assert_eq!(report.preserving, alloc::vec![Letter::new(1).unwrap()]);
        let two = Letter::new(2).unwrap();
        let both: BTreeSet<usize> = [0, 1].into_iter().collect();
        assert!(report.transitions.contains(&(two, 0, both.clone())));
        assert!(report.transitions.contains(&(two, 1, both)));
        // k=1 is preserved by everything
        let ctx1 = PartitionContext::new(om("2"), 1).unwrap();
        let report = restriction_report(&ctx1, &basis).unwrap();
        assert_eq!(report.preserving.len(), 2);
    }

    #[test]
    fn seed_transport() {
        let ctx = PartitionContext::new(om("2"), 2).unwrap();
        let basis = WindowBasis::new(Window::new(3, 6), 2, om("2"));
        // empty in, empty out
        assert!(transport_unweighted_seed(&BTreeSet::new(), &ctx, &basis)
            .unwrap()
            .is_empty());
        // all remainder-0 words expand to the full window
        let zero: BTreeSet<TreeWord> = basis
            .words()
            .iter()
            .filter(|u| crate::partition::remainder_class(u, &ctx) == 0)
            .cloned()
            .collect();
        let full = transport_unweighted_seed(&zero, &ctx, &basis).unwrap();
        assert_eq!(full.len(), basis.len());
        // the unit's orbit expands to exactly the main-branch classes
        let seed: BTreeSet<TreeWord> = [TreeWord::unit()].into_iter().collect();
        let out = transport_unweighted_seed(&seed, &ctx, &basis).unwrap();
        assert!(out.contains(&TreeWord::unit()));
        assert!(out.contains(&tw("|1")));
        assert!(out.contains(&tw("2|0")));
        assert!(out.contains(&tw("22|0")));
        assert!(!out.contains(&tw("1|0")));
        // remainder-1 seeds are rejected
        let bad: BTreeSet<TreeWord> = [tw("|1")].into_iter().collect();
        assert!(transport_unweighted_seed(&bad, &ctx, &basis).is_err());
    }

    #[test]
    fn aperiodic_evidence() {
        let omega = InfiniteWord::aperiodic(AperiodicGenerator::thue_morse());
        let basis = WindowBasis::new(Window::new(8, 8), 2, omega);
        let ev = irreducibility_evidence(&basis).unwrap();
        assert!(ev.pass(), "{:?}", ev);
        assert!(ev.chain.len() >= 2);
        // sizes never increase along the chain
        for pair in ev.chain.windows(2) {
            assert!(pair[1].1 <= pair[0].1);
        }
        // periodic words are rejected
        let basis = WindowBasis::new(Window::new(3, 3), 2, om("2"));
        assert!(irreducibility_evidence(&basis).is_err());
    }

    #[test]
    fn single_letter_alphabet_matches_sequence_period() {
        // over 1^infty the tree is a line; reducibility is periodicity of
        // the bilateral weight sequence
        let omega = om("1");
        let window = Window::new(6, 6);
        // index: positive words count up, branch words count down
        let by_index = |f: Arc<dyn Fn(i64) -> Scalar + Send + Sync>| WeightRule::Custom {
            name: String::from("sequence"),
            f: Arc::new(move |u: &TreeWord| {
                let z = u.positive().len() as i64 - u.depth() as i64;
                f(z)
            }),
        };
        let period3 = by_index(Arc::new(|z| rat(2 + z.rem_euclid(3), 1)));
        let spec = ShiftSpec {
            n: 1,
            omega: omega.clone(),
            weights: period3,
        };
        match verdict(&spec, 8, &window).unwrap() {
            Verdict::Reducible { k_min, .. } => assert_eq!(k_min, 3),
            other => panic!("expected reducible, got {:?}", other),
        }
        let injective = by_index(Arc::new(|z| rat(1, 1) + rat(1, 3 + (2 * z).abs())));
        let spec = ShiftSpec {
            n: 1,
            omega,
            weights: injective,
        };
        assert!(matches!(
            verdict(&spec, 8, &window).unwrap(),
            Verdict::Irreducible {
                reason: IrreducibleReason::NoPeriodUpTo { kmax: 8 },
                ..
            }
        ));
    }

    #[test]
    fn ground_truth_sweep() {
        // constructed class-periodic rules with value-distinct remainders
        // recover their k exactly; injective rules never reduce
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let window = Window::new(3, 8);
        for &(period, n) in &[("2", 2u32), ("12", 2), ("112", 3)] {
            let omega = om(period);
            for k0 in 1..=3usize {
                // distinct positive values per remainder class
                let mut values: Vec<Scalar> = Vec::new();
                for r in 0..k0 {
                    values.push(rat(1 + r as i64, 1 + rng.gen_range(0..3) + k0 as i64));
                }
                let spec = ShiftSpec {
                    n,
                    omega: omega.clone(),
                    weights: remainder_rule(&omega, k0, values),
                };
                match verdict(&spec, 8, &window).unwrap() {
                    Verdict::Reducible { k_min, .. } => assert_eq!(k_min, k0),
                    other => panic!("period {} k0 {}: {:?}", period, k0, other),
                }
            }
            let spec = ShiftSpec {
                n,
                omega,
                weights: depth_injective(),
            };
            assert!(matches!(
                verdict(&spec, 8, &window).unwrap(),
                Verdict::Irreducible { .. }
            ));
        }
    }

    #[test]
    fn trivial_seed_transport_is_trivial() {
        let ctx = PartitionContext::new(om("12"), 2).unwrap();
        let basis = WindowBasis::new(Window::new(3, 7), 2, om("12"));
        let zero: BTreeSet<TreeWord> = basis
            .words()
            .iter()
            .filter(|u| crate::partition::remainder_class(u, &ctx) == 0)
            .cloned()
            .collect();
        let out = transport_unweighted_seed(&zero, &ctx, &basis).unwrap();
        assert_eq!(out.len(), basis.len());
        let out = transport_unweighted_seed(&BTreeSet::new(), &ctx, &basis).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn remainder_values_map() {
        // keep a frozen table of remainder classes over (12)^infty, k=2
        let ctx = PartitionContext::new(om("12"), 2).unwrap();
        let expect: BTreeMap<TreeWord, usize> = [
            (TreeWord::unit(), 0),
            (tw("1|0"), 0),
            (tw("|1"), 0),
            (tw("|2"), 1),
            (tw("|3"), 1),
            (tw("|4"), 0),
            (tw("2|0"), 1),
        ]
        .into_iter()
        .collect();
        for (u, r) in expect {
            assert_eq!(crate::partition::remainder_class(&u, &ctx), r, "at {}", u);
        }
    }
}
