//! Randomized invariants: structural laws that must hold for every valid
//! input, exercised over generated parameters and seeds.

use proptest::prelude::*;

use unruh_core::channel::{
    apply_channel, choi_matrix, kraus_multiparty, kraus_single, r_from_omega, truncation_tail,
    AccelerationParam, ChannelSpec,
};
use unruh_core::counterexample::{ahn_apply, ahn_trace_formula, required_cutoff};
use unruh_core::fock::{hermitian_eigensystem, partial_trace, tensor_states, DimSignature};
use unruh_core::measures::{
    dephased, l1_coherence, negativity, partial_transpose, relative_entropy_of_coherence,
    trace_distance,
};
use unruh_core::sample;

fn pair_channel(r: f64, epsilon: f64) -> ChannelSpec {
    ChannelSpec::certified(
        vec![2, 2],
        vec![1],
        vec![AccelerationParam::from_r(r).unwrap()],
        epsilon,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Higher Rindler frequency means lower acceleration parameter, and the
    /// defining relation tanh^2 r = e^(-2 pi Omega) holds throughout.
    #[test]
    fn acceleration_frequency_map_is_monotone_and_exact(
        w1 in 0.02f64..4.0,
        w2 in 0.02f64..4.0,
    ) {
        let r1 = r_from_omega(w1).unwrap();
        let r2 = r_from_omega(w2).unwrap();
        if w1 < w2 {
            prop_assert!(r1 > r2);
        }
        let x = (-std::f64::consts::TAU * w1).exp();
        prop_assert!((r1.tanh().powi(2) - x).abs() < 1e-12);
    }

    /// The analytic tail is exactly the weight the truncated operator family
    /// fails to complete: diag(sum A^dag A) + tail = 1 levelwise.
    #[test]
    fn truncation_tail_certifies_kraus_completeness(
        r in 0.05f64..1.4,
        d in 2usize..5,
        k in 3usize..30,
    ) {
        let ops = kraus_single(r, d, k);
        let mut gram = nalgebra::DMatrix::zeros(d, d);
        for op in &ops {
            gram += op.adjoint().matrix() * op.matrix();
        }
        for level in 0..d {
            let kept = gram[(level, level)].re;
            let tail = truncation_tail(r, level, k);
            prop_assert!((kept + tail - 1.0).abs() < 1e-12,
                "level {level}: kept {kept} + tail {tail}");
        }
        // deeper truncation never loses less weight
        for level in 0..d {
            prop_assert!(truncation_tail(r, level, k + 1) < truncation_tail(r, level, k));
        }
    }

    /// Channel outputs stay Hermitian, positive, and within the certified
    /// trace budget for arbitrary mixed inputs.
    #[test]
    fn channel_outputs_are_physical(seed in any::<u64>(), r in 0.0f64..1.2) {
        let spec = pair_channel(r, 1e-8);
        let ks = kraus_multiparty(&spec).unwrap();
        let mut rng = sample::rng(seed);
        let rho = sample::wishart_mixed(ks.input_sig(), &mut rng);
        let out = apply_channel(&ks, &rho).unwrap();

        prop_assert!(out.hermiticity_defect() < 1e-12);
        let (eigs, _) = hermitian_eigensystem(out.matrix()).unwrap();
        prop_assert!(eigs[0] > -1e-10);
        prop_assert!(out.trace_deficit() >= -1e-13);
        prop_assert!(out.trace_deficit() <= ks.tail_bound() + 1e-13);
    }

    /// Tracing the Choi state over the output reproduces the completeness
    /// Gram matrix (transposed, normalized): the operational check that the
    /// Choi block structure is wired correctly.
    #[test]
    fn choi_partial_trace_reproduces_the_gram_diagonal(
        r in 0.1f64..1.0,
        k in 2usize..10,
    ) {
        let spec = ChannelSpec::new(
            vec![2],
            vec![0],
            vec![AccelerationParam::from_r(r).unwrap()],
            vec![k],
        ).unwrap();
        let ks = kraus_multiparty(&spec).unwrap();
        let choi = choi_matrix(&ks).unwrap();
        let reduced = partial_trace(&choi, &[0]).unwrap();
        for level in 0..2usize {
            let expect = (1.0 - truncation_tail(r, level, k)) / 2.0;
            prop_assert!((reduced.matrix()[(level, level)].re - expect).abs() < 1e-12);
        }
    }

    /// Coherence quantifiers vanish exactly on their free set and are
    /// nonnegative elsewhere; dephasing is idempotent.
    #[test]
    fn coherence_vanishes_exactly_on_diagonal_states(seed in any::<u64>()) {
        let sig = DimSignature::new(vec![2, 3]).unwrap();
        let mut rng = sample::rng(seed);

        let diag = sample::random_diagonal(&sig, &mut rng);
        prop_assert!(l1_coherence(&diag) == 0.0);
        prop_assert!(relative_entropy_of_coherence(&diag).unwrap() < 1e-10);

        let rho = sample::wishart_mixed(&sig, &mut rng);
        prop_assert!(l1_coherence(&rho) >= 0.0);
        prop_assert!(relative_entropy_of_coherence(&rho).unwrap() >= 0.0);
        let dephased_once = dephased(&rho);
        let dephased_twice = dephased(&dephased_once);
        prop_assert!(trace_distance(&dephased_once, &dephased_twice).unwrap() < 1e-15);
    }

    /// Product states have no entanglement across the product cut;
    /// transposing every party is the plain transpose; transposing
    /// complementary cuts yields the same negativity (the two partial
    /// transposes are transposes of each other, hence isospectral).
    #[test]
    fn negativity_and_partial_transpose_structure(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::wishart_mixed(&DimSignature::single(2).unwrap(), &mut rng);
        let b = sample::wishart_mixed(&DimSignature::single(3).unwrap(), &mut rng);
        let prod = tensor_states(&[&a, &b]).unwrap();
        prop_assert!(negativity(&prod, &[1]).unwrap() < 1e-10);

        let rho = sample::wishart_mixed(prod.sig(), &mut rng);
        let pt = partial_transpose(&rho, &[1]).unwrap();
        let full = partial_transpose(&rho, &[0, 1]).unwrap();
        let diff = (full - rho.matrix().transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(diff == 0.0, "full partial transpose must equal the transpose");
        prop_assert!((pt.trace().re - rho.trace()).abs() < 1e-14);
        prop_assert!(pt.trace().im.abs() < 1e-14);
        let n0 = negativity(&rho, &[0]).unwrap();
        let n1 = negativity(&rho, &[1]).unwrap();
        prop_assert!((n0 - n1).abs() < 1e-10);
    }

    /// Trace distance is a genuine metric on states.
    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>()) {
        let sig = DimSignature::single(4).unwrap();
        let mut rng = sample::rng(seed);
        let a = sample::wishart_mixed(&sig, &mut rng);
        let b = sample::wishart_mixed(&sig, &mut rng);
        let c = sample::wishart_mixed(&sig, &mut rng);

        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-13);
        let ab = trace_distance(&a, &b).unwrap();
        let ba = trace_distance(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-13);
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(ab >= 0.0 && ab <= 1.0 + 1e-12);
    }

    /// Multi-index encoding round-trips for arbitrary signatures.
    #[test]
    fn ravel_unravel_roundtrip(
        dims in prop::collection::vec(1usize..5, 1..4),
        pick in any::<u64>(),
    ) {
        let sig = DimSignature::new(dims).unwrap();
        let flat = (pick % sig.total() as u64) as usize;
        let multi = sig.unravel(flat);
        prop_assert_eq!(sig.ravel(&multi), flat);
        for (i, &m) in multi.iter().enumerate() {
            prop_assert!(m < sig.dims()[i]);
        }
    }

    /// The prior map's numerically summed trace always matches its closed
    /// form at a certified cutoff.
    #[test]
    fn prior_map_series_matches_closed_form(r in 0.0f64..1.8) {
        let cutoff = required_cutoff(r).unwrap();
        let out = ahn_apply(r, cutoff).unwrap();
        prop_assert!((out.trace() - ahn_trace_formula(r)).abs() < 1e-9);
    }
}
