use num_complex::Complex64;
use proptest::prelude::*;

use qwnlab_core::evolution::{
    closed_form_correlator, correlator_factor, multiplier, printed_factor,
    regularization_phase_gap, sigma, Convention, Quadrature, RegularizationScheme,
};
use qwnlab_core::fock_oracle::{
    brute_force_correlator, correlator_oracle, quadratic_generator, spectrum_check, unitary_step,
    FockTruncation, ModeMatrix, NoiseLattice,
};
use qwnlab_core::ito_algebra::{
    annihilator_check, associator, basis_product, product, ItoElement, ItoIndex,
};
use qwnlab_core::quadratic_model::{diagonalize_pair, theta_residual};
use qwnlab_core::stochastic_limit::{rescaled_covariance, FormFactorSpec};
use qwnlab_core::{Execution, TimeGrid};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// (ω, g) with |g/ω| < 1/2, kept a little off the boundary.
fn admissible() -> impl Strategy<Value = (f64, f64)> {
    (
        prop_oneof![-50.0..-0.01f64, 0.01..50.0f64],
        -0.499..0.499f64,
    )
        .prop_map(|(w, r)| (w, r * w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bogoliubov_identities((w, g) in admissible()) {
        let (theta, big, kappa) = diagonalize_pair(w, g).unwrap();
        prop_assert!(theta_residual(w, g, theta) <= 1e-12);
        prop_assert!((big * big + 4.0 * g * g - w * w).abs() <= 1e-12 * w * w);
        prop_assert!((kappa - (big - w) / 2.0).abs() <= 1e-12 * w.abs());
        prop_assert!(big.abs() <= w.abs());
        prop_assert_eq!(big.signum(), w.signum());
        prop_assert!(kappa * w <= 0.0);
        if g != 0.0 {
            prop_assert!(kappa * w < 0.0);
        }
    }

    #[test]
    fn cayley_factor_has_unit_modulus(w in -1e3..1e3f64) {
        prop_assert!((printed_factor(w).norm() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn renormalized_frequency_decreases_with_coupling(w in 0.01..20.0f64, a in 0.0..0.49f64, b in 0.0..0.49f64) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (_, big_lo, _) = diagonalize_pair(w, lo * w).unwrap();
        let (_, big_hi, _) = diagonalize_pair(w, -hi * w).unwrap();
        prop_assert!(big_hi < big_lo);
    }

    #[test]
    fn unitary_scheme_multiplier(w in -10.0..10.0f64, x in -5.0..5.0f64) {
        let s = multiplier(sigma(w, RegularizationScheme::new(c(0.5, x))).unwrap());
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn regularization_gap_bound(w in -1.0..1.0f64) {
        let s = multiplier(sigma(w, RegularizationScheme::symmetric()).unwrap());
        let gap = (c(0.0, -w).exp() - s).norm();
        prop_assert!(gap <= w.abs().powi(3) / 10.0 + 4e-16);
        prop_assert!(regularization_phase_gap(w).abs() <= w.abs().powi(3) / 12.0 + 1e-16);
    }

    #[test]
    fn quadratic_generator_hermitian(w in -5.0..5.0f64, g in -5.0..5.0f64, k in -5.0..5.0f64, d in 2usize..20) {
        let h = quadratic_generator(w, g, k, FockTruncation::new(d).unwrap());
        prop_assert!(h.hermiticity_defect() <= 1e-14);
    }

    #[test]
    fn ito_dt_annihilates(terms in prop::collection::vec((0u32..5, 0u32..5, -3.0..3.0f64, -3.0..3.0f64), 0..6)) {
        let x = ItoElement::from_terms(terms.into_iter().map(|(m, n, re, im)| (ItoIndex::new(m, n), c(re, im))));
        prop_assert!(annihilator_check(&x));
    }

    #[test]
    fn ito_basis_closure(m in 0u32..6, n in 0u32..6, k in 0u32..6, l in 0u32..6) {
        let p = basis_product(ItoIndex::new(m, n), ItoIndex::new(k, l));
        if n * k == 0 {
            prop_assert!(p.is_zero());
        } else {
            prop_assert_eq!(p.len(), 1);
            let (idx, coeff) = p.terms().next().unwrap();
            prop_assert_eq!(idx, ItoIndex::new(m + k - 1, n + l - 1));
            prop_assert_eq!(coeff, c((n * k) as f64, 0.0));
        }
    }

    #[test]
    fn gauge_span_is_associative(a in -3.0..3.0f64, b in -3.0..3.0f64, z in -3.0..3.0f64) {
        let x = ItoElement::dlambda().scale(c(a, 0.5));
        let y = ItoElement::dlambda().scale(c(b, -1.0));
        let w = ItoElement::dlambda().scale(c(z, 0.0));
        prop_assert!(associator(&x, &y, &w).is_zero());
        let xy = product(&x, &y);
        prop_assert!(xy.is_zero() || (xy.len() == 1 && xy.coeff(ItoIndex::DLAMBDA) != c(0.0, 0.0)));
    }

    #[test]
    fn ito_render_round_trip(terms in prop::collection::vec((0u32..9, 0u32..9, -1e3..1e3f64, prop_oneof![Just(0.0), -1e3..1e3f64]), 0..6)) {
        let x = ItoElement::from_terms(terms.into_iter().map(|(m, n, re, im)| (ItoIndex::new(m, n), c(re, im))));
        let parsed: ItoElement = x.to_string().parse().unwrap();
        prop_assert_eq!(parsed, x);
    }

    #[test]
    fn rescaled_covariance_is_hermitian(lambda in 0.3..1.5f64, tau in -0.5..0.5f64, shift in -1.0..1.0f64) {
        let spec = FormFactorSpec::sample(|k| (-(k - shift) * (k - shift)).exp(), -10.0, 10.0, 2001, 1.3).unwrap();
        let plus = rescaled_covariance(&spec, lambda, tau).unwrap();
        let minus = rescaled_covariance(&spec, lambda, -tau).unwrap();
        prop_assert!((minus - plus.conj()).norm() <= 1e-12 * plus.norm().max(1.0));
    }
}

/// Random Hermitian d×d matrix entries from a flat seed vector.
fn hermitian_from(d: usize, vals: &[f64]) -> ModeMatrix {
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(d, d);
    let mut it = vals.iter().cycle();
    for i in 0..d {
        m[(i, i)] = c(*it.next().unwrap(), 0.0);
        for j in i + 1..d {
            let z = c(*it.next().unwrap(), *it.next().unwrap());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    ModeMatrix::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn step_unitaries_are_unitary(vals in prop::collection::vec(-3.0..3.0f64, 144)) {
        let h = hermitian_from(12, &vals);
        let u = unitary_step(&h).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-10);
    }

    #[test]
    fn oracle_matches_brute_force(
        phases in prop::collection::vec(-3.2..3.2f64, 8),
        f1 in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 8),
        f2 in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 8),
    ) {
        let trunc = FockTruncation::new(25).unwrap();
        let lattice = NoiseLattice::over_horizon(0.5, 8, trunc).unwrap();
        let multipliers: Vec<Complex64> = phases.iter().map(|p| Complex64::from_polar(1.0, *p)).collect();
        let steps: Vec<ModeMatrix> = multipliers
            .iter()
            .map(|m| ModeMatrix::from_diagonal(&(0..25).map(|n| m.powi(n)).collect::<Vec<_>>()))
            .collect();
        let f1: Vec<Complex64> = f1.into_iter().map(|(a, b)| c(a, b)).collect();
        let f2: Vec<Complex64> = f2.into_iter().map(|(a, b)| c(a, b)).collect();
        let oracle = correlator_oracle(&lattice, &multipliers, &f1, &f2).unwrap();
        let brute = brute_force_correlator(&lattice, &steps, &f1, &f2, Execution::Parallel).unwrap();
        prop_assert!((oracle - brute).norm() <= 1e-8 * oracle.norm().max(1.0));
    }

    #[test]
    fn closed_form_tends_to_identity_as_omega_vanishes(w in -1e-7..1e-7f64, a in -1.0..1.0f64) {
        let grid = TimeGrid::uniform(1.0, 50).unwrap();
        let n = grid.len();
        let f = vec![c(a, 0.3); n];
        let v = closed_form_correlator(&grid, &vec![w; n], &f, &f, RegularizationScheme::symmetric(),
            Convention::AsPrinted, Quadrature::PiecewiseConstant).unwrap();
        let free = (f[0] * f[0]).exp();
        prop_assert!((v - free).norm() <= 1e-6);
    }
}

#[test]
fn spectrum_matches_renormalized_ladder() {
    for g in [-0.45, -0.3, -0.1, 0.05, 0.2, 0.35, 0.45] {
        let m = 5;
        let trunc = FockTruncation::new(4 * m + 60).unwrap();
        let ev = spectrum_check(1.0, g, trunc, m).unwrap();
        let (_, big, kappa) = diagonalize_pair(1.0, g).unwrap();
        for (k, e) in ev.iter().enumerate() {
            assert!(
                (e - (kappa + big * k as f64)).abs() < 1e-8,
                "g={g} k={k}: {e}"
            );
        }
    }
}

#[test]
fn printed_and_derived_factors_are_conjugate_for_all_unitary_schemes() {
    for x in [-2.0, 0.0, 0.7] {
        let scheme = RegularizationScheme::new(c(0.5, x));
        for w in [-4.0, 0.3, 2.0] {
            let p = correlator_factor(w, scheme, Convention::AsPrinted).unwrap();
            let d = correlator_factor(w, scheme, Convention::Derived).unwrap();
            assert!((p - d.conj()).norm() < 1e-15);
        }
    }
}

#[test]
fn sequential_and_parallel_are_bit_identical() {
    let trunc = FockTruncation::new(20).unwrap();
    let lattice = NoiseLattice::over_horizon(1.0, 300, trunc).unwrap();
    let steps: Vec<ModeMatrix> = (0..300)
        .map(|k| qwnlab_core::fock_oracle::cayley_step(0.01 * k as f64, trunc))
        .collect();
    let f1: Vec<Complex64> = (0..300).map(|k| c((k as f64 * 0.1).sin(), 0.2)).collect();
    let f2: Vec<Complex64> = (0..300).map(|k| c(1.0, (k as f64 * 0.05).cos())).collect();
    let a = brute_force_correlator(&lattice, &steps, &f1, &f2, Execution::Sequential).unwrap();
    let b = brute_force_correlator(&lattice, &steps, &f1, &f2, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
