//! Property tests over seeded random distributions and random density
//! matrices.

mod common;

use lopc::info::{conditional_mutual_information, entropy, mutual_information};
use lopc::intrinsic::{
    apply_channel, certify_zero_cmi, cmi_under_channel, intrinsic_information_upper_bound, set_partitions, Channel,
    OptimizerConfig,
};
use lopc::linalg::ComplexMatrix;
use lopc::quantum::{apply_cnot, computational_distribution, measure_computational, partial_transpose, DensityMatrix};
use lopc::{JointDistribution, Party, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::{random_distribution, seeded};

const NONE: &[&str] = &[];

fn dist_strategy() -> impl Strategy<Value = JointDistribution> {
    (any::<u64>(), 1usize..=2, 1usize..=4).prop_map(|(seed, c, e)| random_distribution(&mut seeded(seed), c, e))
}

fn binary_c_strategy() -> impl Strategy<Value = JointDistribution> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, e)| random_distribution(&mut seeded(seed), 2, e))
}

/// `G G^dagger / tr` for a random complex 8x8 `G`.
fn state_strategy() -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64).prop_filter_map("degenerate", |entries| {
        let g = ComplexMatrix::from_fn(8, |i, j| Complex64::new(entries[i * 8 + j].0, entries[i * 8 + j].1));
        let m = &g * &g.adjoint();
        let trace = m.trace().re;
        if trace < 1e-3 {
            return None;
        }
        // symmetrize away rounding so validation sees an exactly Hermitian matrix
        let m = m.scale(1.0 / trace);
        let h = (&m + &m.adjoint()).scale(0.5);
        DensityMatrix::new(&["A", "B", "C"], h).ok()
    })
}

fn sorted_table(d: &JointDistribution) -> Vec<Rational> {
    let mut t = d.table().to_vec();
    t.sort();
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_stay_normalized_and_compose(d in dist_strategy()) {
        prop_assert!(d.total().is_one());
        let abe = d.marginal(&["A", "B", "E"]).unwrap();
        prop_assert!(abe.total().is_one());
        let direct = d.marginal(&["A", "E"]).unwrap();
        let nested = abe.marginal(&["A", "E"]).unwrap();
        prop_assert_eq!(direct, nested);
    }

    #[test]
    fn conditioning_decomposes_the_table(d in dist_strategy()) {
        let c = d.variable("C").unwrap().clone();
        for (outcome, p) in d.support() {
            let s = outcome[2];
            let (cond, event) = d.condition("C", s).unwrap();
            prop_assert!(cond.total().is_one());
            let rest: Vec<&str> = [outcome[0], outcome[1], outcome[3]].to_vec();
            prop_assert_eq!(event * cond.prob(&rest).unwrap(), p);
        }
        let events: Rational = c
            .alphabet
            .iter()
            .filter_map(|s| d.condition("C", s).ok().map(|(_, e)| e))
            .sum();
        prop_assert!(events.is_one());
    }

    #[test]
    fn bijective_processing_preserves_entropy(d in binary_c_strategy()) {
        let h = entropy(&d, &d.names()).unwrap();
        let xor = |s: &[&str]| {
            let c = if s[1] == "c0" { "0" } else { "1" };
            Some(if s[0] == c { "0" } else { "1" }.to_string())
        };
        let out = d.apply_local_function(Party::Alice, "A", &["A", "C"], xor).unwrap();
        prop_assert!(out.total().is_one());
        prop_assert_eq!(sorted_table(&out), sorted_table(&d));
        prop_assert!((entropy(&out, &out.names()).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn transfer_keeps_the_table(d in dist_strategy()) {
        let moved = d.transfer_ownership("C", Party::Alice, Party::Bob).unwrap();
        prop_assert!(moved.same_table(&d));
        prop_assert_eq!(moved.owner("C").unwrap(), Party::Bob);
        prop_assert!(d.transfer_ownership("C", Party::Bob, Party::Alice).is_err());
    }

    #[test]
    fn measures_are_consistent(d in dist_strategy()) {
        let h_a = entropy(&d, &["A"]).unwrap();
        let h_b = entropy(&d, &["B"]).unwrap();
        let h_ab = entropy(&d, &["A", "B"]).unwrap();
        prop_assert!(h_ab <= h_a + h_b + 1e-12);
        prop_assert!(h_ab + 1e-12 >= h_a.max(h_b));
        let i_a_bc = mutual_information(&d, &["A"], &["B", "C"]).unwrap();
        let i_a_c = mutual_information(&d, &["A"], &["C"]).unwrap();
        let i_a_b_c = conditional_mutual_information(&d, &["A"], &["B"], &["C"]).unwrap();
        prop_assert!(i_a_bc >= 0.0 && i_a_c >= 0.0 && i_a_b_c >= 0.0);
        prop_assert!((i_a_bc - i_a_c - i_a_b_c).abs() < 1e-12);
        // grouping order is irrelevant
        let swapped = mutual_information(&d, &["C", "B"], &["A"]).unwrap();
        prop_assert!((swapped - i_a_bc).abs() < 1e-12);
    }

    #[test]
    fn cmi_is_the_average_of_conditioned_mi(d in dist_strategy()) {
        let cmi = conditional_mutual_information(&d, &["A"], &["B", "C"], &["E"]).unwrap();
        let e = d.variable("E").unwrap().clone();
        let mut average = 0.0;
        for s in &e.alphabet {
            if let Ok((cond, p)) = d.condition("E", s) {
                average += common::exact(&p) * mutual_information(&cond, &["A"], &["B", "C"]).unwrap();
            }
        }
        prop_assert!((cmi - average).abs() < 1e-12);
    }

    #[test]
    fn certification_implies_vanishing_cmi(d in dist_strategy(), pick in any::<prop::sample::Index>()) {
        let e = d.variable("E").unwrap().alphabet.clone();
        let partitions = set_partitions(e.len());
        let labels = &partitions[pick.index(partitions.len())];
        let channel = Channel::deterministic(&e, labels);
        let processed = apply_channel(&d, "E", &channel).unwrap();
        prop_assert!(processed.total().is_one());
        let cmi = cmi_under_channel(&d, &["A"], &["B"], "E", &channel).unwrap();
        let certified = certify_zero_cmi(&processed, &["A"], &["B"], &["E"]).unwrap();
        if certified {
            prop_assert!(cmi < 1e-12);
        }
        if cmi > 1e-9 {
            prop_assert!(!certified);
        }
    }

    #[test]
    fn cnot_is_unitary_on_states(state in state_strategy()) {
        let out = apply_cnot(&state, "A", "C").unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-10);
        prop_assert!(out.matrix().hermiticity_error() < 1e-10);
        let before = state.eigenvalues().unwrap();
        let after = out.eigenvalues().unwrap();
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let back = apply_cnot(&out, "A", "C").unwrap();
        prop_assert!(back.matrix().max_abs_diff(state.matrix()) == 0.0);
    }

    #[test]
    fn partial_transposes_are_consistent(state in state_strategy()) {
        let on_a = partial_transpose(&state, &["A"]).unwrap();
        let on_bc = partial_transpose(&state, &["B", "C"]).unwrap();
        let transposed = ComplexMatrix::from_fn(8, |i, j| on_a[(j, i)]);
        prop_assert!(transposed.max_abs_diff(&on_bc) == 0.0);
        prop_assert!((on_a.trace() - Complex64::one()).norm() < 1e-12);
        prop_assert!(on_a.hermiticity_error() < 1e-12);
    }

    #[test]
    fn measurement_reconstructs_the_diagonal(state in state_strategy()) {
        let diagonal: Vec<f64> = state.matrix().diagonal().iter().map(|z| z.re).collect();
        let outcomes = measure_computational(&state, "B").unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        for o in &outcomes {
            let post: Vec<f64> = o.post_state.matrix().diagonal().iter().map(|z| z.re).collect();
            for (k, p) in post.iter().enumerate() {
                // reinsert the measured bit B (middle position) into index k
                let index = ((k >> 1) << 2) | ((o.outcome as usize) << 1) | (k & 1);
                prop_assert!((o.probability * p - diagonal[index]).abs() < 1e-12);
            }
        }
        let stats = computational_distribution(&state);
        prop_assert_eq!(stats.probabilities, diagonal);
    }

    #[test]
    fn purity_is_bounded(state in state_strategy()) {
        let purity = state.purity();
        prop_assert!(purity <= 1.0 + 1e-12);
        prop_assert!(purity >= 1.0 / 8.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn optimizer_respects_bounds_and_is_deterministic(d in dist_strategy(), seed in 0u64..1000) {
        let config = OptimizerConfig::default().with_restarts(8).with_seed(seed);
        let first = intrinsic_information_upper_bound(&d, &["A"], &["B"], "E", &config).unwrap();
        let identity = conditional_mutual_information(&d, &["A"], &["B"], &["E"]).unwrap();
        let plain = conditional_mutual_information(&d, &["A"], &["B"], NONE).unwrap();
        prop_assert!(first.value <= identity + 1e-9);
        prop_assert!(first.value <= plain + 1e-9);
        prop_assert!(first.value >= 0.0);
        let second = intrinsic_information_upper_bound(&d, &["A"], &["B"], "E", &config).unwrap();
        prop_assert_eq!(first.value.to_bits(), second.value.to_bits());
        prop_assert_eq!(first.channel, second.channel);
        if first.certified_zero {
            let witness = first.witness.unwrap();
            let processed = apply_channel(&d, "E", &witness).unwrap();
            prop_assert!(certify_zero_cmi(&processed, &["A"], &["B"], &["E"]).unwrap());
        }
    }
}

#[test]
fn zero_tables_are_rejected() {
    let a = lopc::Variable::binary("A", Party::Alice);
    let zero = Rational::zero();
    assert!(JointDistribution::new(vec![a], [(["0"], zero)]).is_err());
}
