use proptest::prelude::*;

use udw_channel::channel::theta;
use udw_channel::qubit::{hermitian_eigenvalues2, pauli_x, pauli_y, Operator2};
use udw_channel::{ChannelParams, Complex64, DeltaChannel, FieldStatistics, QubitState};

/// Bob's state by composing operators instead of using the expanded matrix
/// elements.
fn composed(p: &ChannelParams, alice: &QubitState) -> Operator2 {
    let s = p.stats;
    let (sin2, cos2) = (2.0 * s.delta_ab).sin_cos();
    let keep = Complex64::from(0.5 + 0.5 * s.nu_b * cos2);
    let flip = Complex64::from(0.5 - 0.5 * s.nu_b * cos2);
    let comm = Complex64::new(0.0, -0.5 * s.nu_b * sin2);
    let (sb, cb) = p.phase_b.sin_cos();
    let mu = pauli_x() * Complex64::from(cb) - pauli_y() * Complex64::from(sb);
    let rho0 = p.bob_initial.density_matrix();
    let th = Complex64::from(theta(alice, p.phase_a));
    rho0 * keep + mu * rho0 * mu * flip + (mu * rho0 - rho0 * mu) * comm * th
}

fn ball() -> impl Strategy<Value = QubitState> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU, 0.0..=1.0f64).prop_map(|(p, a, r)| {
        let s = QubitState::pure(p, a);
        QubitState {
            bloch: s.bloch.map(|v| v * r),
        }
    })
}

fn stats() -> impl Strategy<Value = FieldStatistics> {
    (0.0..=1.0f64, 0.0..=1.0f64, -1.0..=1.0f64, -5.0..5.0f64).prop_map(|(na, nb, skew, d)| {
        let base = na * nb;
        let (plus, minus) = if base > 0.0 {
            let s = skew * base.ln().abs();
            ((base.ln() + s).exp().min(1.0), (base.ln() - s).exp().min(1.0))
        } else {
            (0.0, 0.0)
        };
        FieldStatistics::new(na, nb, plus, minus, d).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn expanded_elements_match_operator_form(
        s in stats(), pa in -7.0..7.0f64, pb in -7.0..7.0f64, bob in ball(), alice in ball()
    ) {
        let params = ChannelParams::new(s, pa, pb, bob);
        let ch = DeltaChannel::new(params).unwrap();
        let out = ch.apply(&alice).unwrap().rho();
        let oracle = composed(&params, &alice);
        prop_assert!((out - oracle).norm() < 1e-12, "{out} vs {oracle}");
        let linear = ch.apply_linear(&alice.density_matrix());
        prop_assert!((linear - oracle).norm() < 1e-12);
    }

    #[test]
    fn output_is_a_state(s in stats(), pa in -7.0..7.0f64, pb in -7.0..7.0f64, bob in ball(), alice in ball()) {
        let ch = DeltaChannel::new(ChannelParams::new(s, pa, pb, bob)).unwrap();
        let rho = ch.apply(&alice).unwrap().rho();
        let tr = rho[(0, 0)] + rho[(1, 1)];
        prop_assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
        prop_assert!((rho - rho.adjoint()).norm() < 1e-15);
        let ev = hermitian_eigenvalues2(&rho);
        prop_assert!(ev[0] >= -1e-12);
        let (plus, minus) = ch.eigenvalues_analytic(&alice).unwrap();
        prop_assert!((plus - ev[1]).abs() < 1e-12 && (minus - ev[0]).abs() < 1e-12);
        prop_assert!(ch.choi_ppt_min_eigenvalue() >= -1e-10);
    }

    #[test]
    fn input_enters_only_through_theta(s in stats(), pa in -7.0..7.0f64, pb in -7.0..7.0f64, bob in ball(), alice in ball()) {
        let ch = DeltaChannel::new(ChannelParams::new(s, pa, pb, bob)).unwrap();
        let direct = ch.apply(&alice).unwrap();
        let factored = ch.apply_theta(theta(&alice, pa)).unwrap();
        prop_assert_eq!(direct, factored);
    }

    #[test]
    fn combined_coefficients_ignore_companion_factors(a in stats(), b in stats()) {
        let moved = FieldStatistics { nu_b: a.nu_b, delta_ab: a.delta_ab, ..b };
        let ca = *DeltaChannel::new(ChannelParams::new(a, 0.0, 0.0, QubitState::ground())).unwrap().coefficients();
        let cb = *DeltaChannel::new(ChannelParams::new(moved, 0.0, 0.0, QubitState::ground())).unwrap().coefficients();
        prop_assert_eq!(ca, cb);
    }
}

#[test]
fn no_signal_without_commutator() {
    let s = FieldStatistics::new(0.7, 0.8, 0.5, 0.6, 0.0).unwrap();
    let ch = DeltaChannel::new(ChannelParams::new(s, 0.3, 0.9, QubitState::new(0.2, 0.4, 0.5).unwrap())).unwrap();
    let a = ch.apply(&QubitState::pure(1.0, 0.2)).unwrap();
    let b = ch.apply(&QubitState::pure(2.0, -1.4)).unwrap();
    assert_eq!(a.rho(), b.rho());
}

#[test]
fn choi_matrix_is_a_normalised_state() {
    let s = FieldStatistics::new(0.7, 0.9, 0.5, 0.6, 0.4).unwrap();
    let ch = DeltaChannel::new(ChannelParams::new(s, 0.3, 0.9, QubitState::ground())).unwrap();
    let choi = ch.choi_matrix();
    assert!((choi.trace().re - 1.0).abs() < 1e-15);
    assert!((choi - choi.adjoint()).norm() < 1e-15);
}
