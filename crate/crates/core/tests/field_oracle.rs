use std::f64::consts::PI;

use udw_channel::field::{
    commutator_closed, commutator_lightcone_quadrature, norm_sq_closed, norm_sq_quadrature,
    wightman_cross_quadrature, FieldBackend,
};
use udw_channel::quadrature::QuadratureConfig;
use udw_channel::selftest::{ORACLE_COUPLINGS, ORACLE_DELAYS, ORACLE_SEPARATIONS};
use udw_channel::{assemble_statistics, FieldState, MinkowskiBackend, PairGeometry, SmearingSpec};

fn det(c: f64) -> SmearingSpec {
    SmearingSpec::with_coupling(c).unwrap()
}

fn vacuum() -> FieldState {
    FieldState::MinkowskiVacuum
}

#[test]
fn closed_forms_match_quadrature_on_grid() {
    let cfg = QuadratureConfig::default();
    let mut worst_norm = 0.0_f64;
    let mut worst_comm = 0.0_f64;
    let mut worst_ident = 0.0_f64;
    for &la in &ORACLE_COUPLINGS {
        let a = det(la);
        let q = norm_sq_quadrature(&a, &vacuum(), &cfg).unwrap();
        worst_norm = worst_norm.max((norm_sq_closed(&a) - q).abs() / q.max(1e-12));
        for &lb in &ORACLE_COUPLINGS {
            let b = det(lb);
            for &l in &ORACLE_SEPARATIONS {
                for &t in &ORACLE_DELAYS {
                    let g = PairGeometry::new(l, t).unwrap();
                    let closed = commutator_closed(&a, &b, &g);
                    let lc = commutator_lightcone_quadrature(&a, &b, &g).unwrap();
                    worst_comm = worst_comm.max((closed - lc).abs() / lc.abs().max(1e-12));
                    let w = wightman_cross_quadrature(&a, &b, &g, &vacuum(), &cfg).unwrap();
                    worst_ident = worst_ident.max((closed + 2.0 * w.im).abs() / (la * lb));
                }
            }
        }
    }
    assert!(worst_norm < 1e-6, "{worst_norm}");
    assert!(worst_comm < 1e-6, "{worst_comm}");
    assert!(worst_ident < 1e-12, "{worst_ident}");
}

#[test]
fn reference_commutator() {
    let g = PairGeometry::new(6.0, 6.0).unwrap();
    let d = commutator_closed(&det(1.0), &det(1.0), &g);
    assert!((d - 5.2911e-3).abs() < 1e-7, "{d}");
    let w = wightman_cross_quadrature(&det(1.0), &det(1.0), &g, &vacuum(), &QuadratureConfig::default()).unwrap();
    assert!((w.im + 2.6456e-3).abs() < 1e-7, "{}", w.im);
}

#[test]
fn coincident_wightman_is_the_norm() {
    let f = det(1.0);
    let w = wightman_cross_quadrature(&f, &f, &PairGeometry::default(), &vacuum(), &QuadratureConfig::default())
        .unwrap();
    assert_eq!(w.im, 0.0);
    assert!((w.re - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
}

#[test]
fn zero_separation_limit_matches_light_cone() {
    for t in [0.1, 1.0, 2.5, -3.0] {
        let g = PairGeometry::new(0.0, t).unwrap();
        let closed = commutator_closed(&det(2.0), &det(0.5), &g);
        let lc = commutator_lightcone_quadrature(&det(2.0), &det(0.5), &g).unwrap();
        assert!((closed - lc).abs() <= 1e-12 * lc.abs(), "{t}: {closed} vs {lc}");
    }
}

#[test]
fn antisymmetry_is_exact() {
    for l in [0.0, 0.3, 1.0, 6.0] {
        for t in [0.2, 1.0, 6.0, 13.0] {
            let d = |t| commutator_closed(&det(1.3), &det(0.7), &PairGeometry::new(l, t).unwrap());
            assert_eq!(d(t), -d(-t));
        }
        assert_eq!(commutator_closed(&det(1.3), &det(0.7), &PairGeometry::new(l, 0.0).unwrap()), 0.0);
    }
}

#[test]
fn bilinear_in_couplings() {
    let g = PairGeometry::new(3.0, 4.0).unwrap();
    let base = commutator_closed(&det(1.0), &det(1.0), &g);
    let scaled = commutator_closed(&det(3.0), &det(0.5), &g);
    assert!((scaled - 1.5 * base).abs() < 1e-15 * base.abs().max(1.0));
    assert!((norm_sq_closed(&det(3.0)) - 9.0 * norm_sq_closed(&det(1.0))).abs() < 1e-15);
}

#[test]
fn causal_decay_follows_gaussian_tail() {
    // Far outside the light-cone shell, the ratio of successive delays tends to
    // the ratio of the leading exponentials.
    let l = 2.0;
    let d = |t: f64| commutator_closed(&det(1.0), &det(1.0), &PairGeometry::new(l, t).unwrap());
    for t in [12.0, 20.0] {
        let ratio = d(t + 1.0) / d(t);
        let expected = (-0.5 * ((t + 1.0 - l).powi(2) - (t - l).powi(2))).exp();
        assert!((ratio / expected - 1.0).abs() < 1e-6, "{ratio} vs {expected}");
    }
}

#[test]
fn thermal_state() {
    let cfg = QuadratureConfig::default();
    let f = det(1.0);
    let hot = norm_sq_quadrature(&f, &FieldState::MinkowskiThermal { beta: 1.0 }, &cfg).unwrap();
    assert!(hot > norm_sq_closed(&f));
    let cold = norm_sq_quadrature(&f, &FieldState::MinkowskiThermal { beta: 1e4 }, &cfg).unwrap();
    assert!((cold - norm_sq_closed(&f)).abs() < 1e-6 * norm_sq_closed(&f), "{cold}");

    let g = PairGeometry::new(6.0, 6.0).unwrap();
    let vac = assemble_statistics(&det(1.0), &det(1.0), &g, &vacuum()).unwrap();
    let th = assemble_statistics(&det(1.0), &det(1.0), &g, &FieldState::MinkowskiThermal { beta: 1.0 }).unwrap();
    assert!(th.nu_b < vac.nu_b);
    // The commutator does not see the state.
    assert!((th.delta_ab - vac.delta_ab).abs() < 1e-12, "{} vs {}", th.delta_ab, vac.delta_ab);
}

#[test]
fn statistics_structure() {
    let zero = assemble_statistics(&det(0.0), &det(0.0), &PairGeometry::new(6.0, 6.0).unwrap(), &vacuum()).unwrap();
    assert_eq!(
        (zero.nu_a, zero.nu_b, zero.nu_ab_plus, zero.nu_ab_minus, zero.delta_ab),
        (1.0, 1.0, 1.0, 1.0, 0.0)
    );
    let b = MinkowskiBackend::new(vacuum()).unwrap();
    for (la, lb, l, t) in [(1.0, 1.0, 6.0, 6.0), (0.4, 2.0, 1.0, 0.5), (3.0, 0.2, 0.0, 2.0)] {
        let s = b.statistics(&det(la), &det(lb), &PairGeometry::new(l, t).unwrap()).unwrap();
        let lhs = s.nu_ab_plus * s.nu_ab_minus;
        let rhs = (s.nu_a * s.nu_b).powi(2);
        assert!((lhs - rhs).abs() < 1e-14, "{lhs} vs {rhs}");
        assert!((s.nu_b - (-lb * lb / (2.0 * PI * PI)).exp()).abs() < 1e-15);
    }
}
