//! Smeared two-point data of a massless scalar field for two inertial,
//! delta-switched detectors with Gaussian spatial profiles.
//!
//! Units: the profile width `sigma` is 1, so couplings are `lambda_tilde / sigma`
//! and every length or time is measured in `sigma`.
//!
//! In momentum space every smeared correlator collapses to a radial integral,
//!
//! ```text
//! W(f_A, f_B) = lA lB / (4 pi^2) * int_0^inf dk  k exp(-k^2/2) sinc(k L) n(k) e^{-i k dtau}
//! ```
//!
//! with `n(k) = 1` in the vacuum and `n(k) = coth(beta k / 2)` on the real part
//! for a KMS state. The smeared commutator is `Delta = -2 Im W`; it does not
//! depend on the state. The vacuum norm and commutator have closed forms,
//! which are what downstream code consumes; the integrals serve as oracles
//! and as the only route for the thermal state and for `Re W(f_A, f_B)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure_finite, Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::Complex64;

/// Upper cutoff of the radial momentum integrals. The Gaussian factor is
/// below 1e-300 there.
pub const K_MAX: f64 = 40.0;

/// One detector's delta-switched Gaussian smearing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingSpec {
    /// Effective coupling `lambda_tilde / sigma`, where `lambda_tilde = lambda * eta`.
    pub coupling: f64,
    pub position: [f64; 3],
    /// Proper time of the delta switch.
    pub switch_time: f64,
    /// Energy gap `Omega * sigma`.
    pub gap: f64,
}

impl SmearingSpec {
    pub fn new(coupling: f64, position: [f64; 3], switch_time: f64, gap: f64) -> Result<Self> {
        let spec = Self {
            coupling,
            position,
            switch_time,
            gap,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Detector at the origin, switched at time zero, gapless.
    pub fn with_coupling(coupling: f64) -> Result<Self> {
        Self::new(coupling, [0.0; 3], 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("coupling", self.coupling)?;
        if self.coupling < 0.0 {
            return Err(Error::InvalidParameter {
                name: "coupling",
                value: self.coupling,
                reason: "must be non-negative",
            });
        }
        for &x in &self.position {
            ensure_finite("position", x)?;
        }
        ensure_finite("switch_time", self.switch_time)?;
        ensure_finite("gap", self.gap)
    }

    /// `Omega * tau_0`, the phase of the monopole operator at the switch.
    pub fn phase(&self) -> f64 {
        self.gap * self.switch_time
    }
}

/// Relative placement of Alice's and Bob's detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    /// Spatial separation `L`.
    pub separation: f64,
    /// `tau_B0 - tau_A0`.
    pub delay: f64,
}

impl PairGeometry {
    pub fn new(separation: f64, delay: f64) -> Result<Self> {
        ensure_finite("separation", separation)?;
        ensure_finite("delay", delay)?;
        if separation < 0.0 {
            return Err(Error::InvalidParameter {
                name: "separation",
                value: separation,
                reason: "must be non-negative",
            });
        }
        Ok(Self { separation, delay })
    }

    pub fn between(alice: &SmearingSpec, bob: &SmearingSpec) -> Self {
        let d: f64 = alice
            .position
            .iter()
            .zip(&bob.position)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Self {
            separation: d.sqrt(),
            delay: bob.switch_time - alice.switch_time,
        }
    }
}

/// Quasifree field state the detectors interact with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FieldState {
    #[default]
    MinkowskiVacuum,
    /// KMS state at inverse temperature `beta` (units of `sigma`).
    MinkowskiThermal { beta: f64 },
}

impl FieldState {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldState::MinkowskiVacuum => Ok(()),
            FieldState::MinkowskiThermal { beta } => {
                if beta > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "beta",
                        value: beta,
                        reason: "must be positive",
                    })
                }
            }
        }
    }

    /// `k * coth(beta k / 2)` (or `k` in the vacuum), continued to `k = 0`.
    fn mode_weight(&self, k: f64) -> f64 {
        match *self {
            FieldState::MinkowskiVacuum => k,
            FieldState::MinkowskiThermal { beta } => {
                if k == 0.0 {
                    2.0 / beta
                } else {
                    k / (0.5 * beta * k).tanh()
                }
            }
        }
    }
}

/// The five field scalars that fix the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStatistics {
    pub nu_a: f64,
    pub nu_b: f64,
    pub nu_ab_plus: f64,
    pub nu_ab_minus: f64,
    pub delta_ab: f64,
}

impl FieldStatistics {
    pub fn new(nu_a: f64, nu_b: f64, nu_ab_plus: f64, nu_ab_minus: f64, delta_ab: f64) -> Result<Self> {
        let stats = Self {
            nu_a,
            nu_b,
            nu_ab_plus,
            nu_ab_minus,
            delta_ab,
        };
        stats.validate()?;
        Ok(stats)
    }

    /// Builds the damping factors from `||E f_A||^2`, `||E f_B||^2` and `Re W(f_A, f_B)`.
    pub fn from_norms(norm_a: f64, norm_b: f64, re_cross: f64, delta_ab: f64) -> Result<Self> {
        Self::new(
            (-2.0 * norm_a).exp(),
            (-2.0 * norm_b).exp(),
            (-2.0 * (norm_a + norm_b + 2.0 * re_cross)).exp(),
            (-2.0 * (norm_a + norm_b - 2.0 * re_cross)).exp(),
            delta_ab,
        )
    }

    /// Statistics of two detectors that do not couple at all.
    pub fn decoupled() -> Self {
        Self {
            nu_a: 1.0,
            nu_b: 1.0,
            nu_ab_plus: 1.0,
            nu_ab_minus: 1.0,
            delta_ab: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // Zero is admitted: exp(-2 ||Ef||^2) underflows for couplings of a few hundred.
        for (name, nu) in [
            ("nu_a", self.nu_a),
            ("nu_b", self.nu_b),
            ("nu_ab_plus", self.nu_ab_plus),
            ("nu_ab_minus", self.nu_ab_minus),
        ] {
            if !(0.0..=1.0).contains(&nu) {
                return Err(Error::InvalidParameter {
                    name,
                    value: nu,
                    reason: "damping factor must lie in [0, 1]",
                });
            }
        }
        ensure_finite("delta_ab", self.delta_ab)
    }
}

/// `||E f||^2 = W(f, f)` for a Gaussian delta-switched smearing in the vacuum.
pub fn norm_sq_closed(f: &SmearingSpec) -> f64 {
    f.coupling * f.coupling / (4.0 * PI * PI)
}

/// Smeared commutator `Delta(f_A, f_B)` in the vacuum (any quasifree state).
///
/// ```text
/// Delta = lA lB / (4 pi^2 L) sqrt(pi/2) [exp(-(dtau - L)^2 / 2) - exp(-(dtau + L)^2 / 2)]
/// ```
///
/// For `L * |dtau| < 1` the bracket is rewritten as
/// `2 exp(-(dtau^2 + L^2) / 2) sinh(dtau L)` so that `L -> 0` loses no digits;
/// `L = 0` itself uses the limit `2 dtau exp(-dtau^2 / 2)` of bracket / L.
/// Both branches are odd in `dtau` bit for bit.
pub fn commutator_closed(f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> f64 {
    let pref = f_a.coupling * f_b.coupling / (4.0 * PI * PI) * FRAC_PI_2.sqrt();
    let l = geom.separation;
    let t = geom.delay;
    let bracket_over_l = if l == 0.0 {
        2.0 * t * (-0.5 * t * t).exp()
    } else if (l * t).abs() < 1.0 {
        2.0 * (-0.5 * (t * t + l * l)).exp() * (t * l).sinh() / l
    } else {
        let minus = t - l;
        let plus = t + l;
        ((-0.5 * minus * minus).exp() - (-0.5 * plus * plus).exp()) / l
    };
    pref * bracket_over_l
}

/// `Delta(f_A, f_B)` by integrating the retarded minus advanced Green function
/// over the light cone in position space.
///
/// The two Gaussian profiles convolve into a unit-variance Gaussian in the
/// relative coordinate; the Pauli-Jordan distribution restricts it to the
/// sphere of radius `|dtau|`, leaving a polar-angle integral with a positive
/// integrand. That keeps full relative precision even where the commutator is
/// exponentially small and the momentum-space integral cancels to roundoff.
pub fn commutator_lightcone_quadrature(
    f_a: &SmearingSpec,
    f_b: &SmearingSpec,
    geom: &PairGeometry,
) -> Result<f64> {
    let t = geom.delay;
    if t == 0.0 || f_a.coupling == 0.0 || f_b.coupling == 0.0 {
        return Ok(0.0);
    }
    let r = t.abs();
    let l = geom.separation;
    let cfg = QuadratureConfig {
        abs_tol: f64::MIN_POSITIVE,
        rel_tol: 1e-13,
        initial_intervals: 16,
        max_intervals: 4000,
    };
    // |r n - d|^2 with cos(angle) = u.
    let shell = |u: f64| (-0.5 * (r * r + l * l - 2.0 * r * l * u)).exp();
    let polar = integrate(shell, -1.0, 1.0, &cfg)?;
    let gaussian_norm = (2.0 * PI).powf(-1.5);
    // Retarded shell of radius r with measure r^2 dOmega / (4 pi r); azimuth gives 2 pi.
    let value = f_a.coupling * f_b.coupling * r / (4.0 * PI) * 2.0 * PI * gaussian_norm * polar.value;
    Ok(value.copysign(t))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Complex smeared Wightman function `W(f_A, f_B)` by radial quadrature.
pub fn wightman_cross_quadrature(
    f_a: &SmearingSpec,
    f_b: &SmearingSpec,
    geom: &PairGeometry,
    state: &FieldState,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    state.validate()?;
    let pref = f_a.coupling * f_b.coupling / (4.0 * PI * PI);
    if pref == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l = geom.separation;
    let t = geom.delay;
    let radial = |k: f64| (-0.5 * k * k).exp() * sinc(k * l);
    let re = integrate(
        |k| radial(k) * state.mode_weight(k) * (k * t).cos(),
        0.0,
        K_MAX,
        cfg,
    )?;
    let im = if t == 0.0 {
        0.0
    } else {
        -integrate(|k| radial(k) * k * (k * t).sin(), 0.0, K_MAX, cfg)?.value
    };
    Ok(Complex64::new(pref * re.value, pref * im))
}

/// `||E f||^2` by radial quadrature (the coincident limit of the cross integral).
pub fn norm_sq_quadrature(f: &SmearingSpec, state: &FieldState, cfg: &QuadratureConfig) -> Result<f64> {
    let w = wightman_cross_quadrature(f, f, &PairGeometry::default(), state, cfg)?;
    Ok(w.re)
}

impl Default for PairGeometry {
    fn default() -> Self {
        Self {
            separation: 0.0,
            delay: 0.0,
        }
    }
}

/// Source of the field-side scalars. Implementations decide which quantities
/// come from closed forms and which need numerics.
pub trait FieldBackend {
    fn norm_sq(&self, f: &SmearingSpec) -> Result<f64>;

    fn wightman_cross(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<Complex64>;

    fn commutator(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<f64>;

    fn statistics(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<FieldStatistics> {
        let norm_a = self.norm_sq(f_a)?;
        let norm_b = self.norm_sq(f_b)?;
        let cross = self.wightman_cross(f_a, f_b, geom)?;
        let delta = self.commutator(f_a, f_b, geom)?;
        FieldStatistics::from_norms(norm_a, norm_b, cross.re, delta)
    }
}

/// Inertial detectors in Minkowski space, vacuum or thermal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkowskiBackend {
    pub state: FieldState,
    pub quadrature: QuadratureConfig,
}

impl MinkowskiBackend {
    pub fn new(state: FieldState) -> Result<Self> {
        state.validate()?;
        Ok(Self {
            state,
            quadrature: QuadratureConfig::default(),
        })
    }
}

impl FieldBackend for MinkowskiBackend {
    fn norm_sq(&self, f: &SmearingSpec) -> Result<f64> {
        match self.state {
            FieldState::MinkowskiVacuum => Ok(norm_sq_closed(f)),
            FieldState::MinkowskiThermal { .. } => norm_sq_quadrature(f, &self.state, &self.quadrature),
        }
    }

    fn wightman_cross(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<Complex64> {
        wightman_cross_quadrature(f_a, f_b, geom, &self.state, &self.quadrature)
    }

    fn commutator(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<f64> {
        match self.state {
            FieldState::MinkowskiVacuum => Ok(commutator_closed(f_a, f_b, geom)),
            FieldState::MinkowskiThermal { .. } => Ok(-2.0 * self.wightman_cross(f_a, f_b, geom)?.im),
        }
    }

    fn statistics(&self, f_a: &SmearingSpec, f_b: &SmearingSpec, geom: &PairGeometry) -> Result<FieldStatistics> {
        let norm_a = self.norm_sq(f_a)?;
        let norm_b = self.norm_sq(f_b)?;
        let cross = self.wightman_cross(f_a, f_b, geom)?;
        let delta = match self.state {
            FieldState::MinkowskiVacuum => commutator_closed(f_a, f_b, geom),
            // Reuse the imaginary part already integrated above.
            FieldState::MinkowskiThermal { .. } => -2.0 * cross.im,
        };
        FieldStatistics::from_norms(norm_a, norm_b, cross.re, delta)
    }
}

/// Field statistics for two Gaussian detectors in the given Minkowski state.
pub fn assemble_statistics(
    f_a: &SmearingSpec,
    f_b: &SmearingSpec,
    geom: &PairGeometry,
    state: &FieldState,
) -> Result<FieldStatistics> {
    f_a.validate()?;
    f_b.validate()?;
    MinkowskiBackend::new(*state)?.statistics(f_a, f_b, geom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(c: f64) -> SmearingSpec {
        SmearingSpec::with_coupling(c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn norm_values() {
        assert_eq!(norm_sq_closed(&det(0.0)), 0.0);
        assert!((norm_sq_closed(&det(1.0)) - 0.025_330_30).abs() < 1e-8);
        let cfg = QuadratureConfig::default();
        let q = norm_sq_quadrature(&det(1.0), &FieldState::MinkowskiVacuum, &cfg).unwrap();
        assert!(close(q, norm_sq_closed(&det(1.0)), 1e-8));
        assert_eq!(norm_sq_quadrature(&det(0.0), &FieldState::MinkowskiVacuum, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn thermal_norm_exceeds_vacuum() {
        let cfg = QuadratureConfig::default();
        let vac = norm_sq_closed(&det(1.0));
        let hot = norm_sq_quadrature(&det(1.0), &FieldState::MinkowskiThermal { beta: 1.0 }, &cfg).unwrap();
        assert!(hot > vac, "{hot} <= {vac}");
        let cold = norm_sq_quadrature(&det(1.0), &FieldState::MinkowskiThermal { beta: 1e9 }, &cfg).unwrap();
        assert!(close(cold, vac, 1e-6));
    }

    #[test]
    fn commutator_reference_point() {
        let g = PairGeometry::new(6.0, 6.0).unwrap();
        let d = commutator_closed(&det(1.0), &det(1.0), &g);
        assert!((d - 5.2911e-3).abs() < 1e-7, "{d}");
        assert_eq!(commutator_closed(&det(1.0), &det(1.0), &PairGeometry::new(6.0, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn target_phase_coupling() {
        // lambda_A = 494.8 with lambda_B = 0.3 puts 2 Delta near pi / 2.
        let g = PairGeometry::new(6.0, 6.0).unwrap();
        let d = commutator_closed(&det(494.8), &det(0.3), &g);
        assert!((2.0 * d - FRAC_PI_2).abs() < 1e-3, "{}", 2.0 * d);
    }

    #[test]
    fn commutator_branches_agree_near_switch() {
        // l * t straddles the branch switch at 1.
        for (l, t) in [(0.999_999, 1.0), (1.000_001, 1.0), (0.5, 1.999_99), (0.5, 2.000_01)] {
            let g = PairGeometry::new(l, t).unwrap();
            let d = commutator_closed(&det(1.0), &det(1.0), &g);
            let q = commutator_lightcone_quadrature(&det(1.0), &det(1.0), &g).unwrap();
            assert!(close(d, q, 1e-10), "l={l} t={t}: {d} vs {q}");
        }
    }

    #[test]
    fn zero_separation_limit() {
        let cfg = QuadratureConfig::default();
        for t in [-3.0, -0.5, 0.25, 1.0, 4.0] {
            let g = PairGeometry::new(0.0, t).unwrap();
            let d = commutator_closed(&det(1.0), &det(1.0), &g);
            let w = wightman_cross_quadrature(&det(1.0), &det(1.0), &g, &FieldState::MinkowskiVacuum, &cfg).unwrap();
            assert!((d + 2.0 * w.im).abs() < 1e-11, "t={t}: {d} vs {}", -2.0 * w.im);
            let tiny = PairGeometry::new(1e-9, t).unwrap();
            assert!(close(commutator_closed(&det(1.0), &det(1.0), &tiny), d, 1e-9));
        }
    }

    #[test]
    fn wightman_imaginary_part_is_half_commutator() {
        let g = PairGeometry::new(6.0, 6.0).unwrap();
        let w = wightman_cross_quadrature(&det(1.0), &det(1.0), &g, &FieldState::MinkowskiVacuum, &QuadratureConfig::default())
            .unwrap();
        assert!((w.im + 2.6456e-3).abs() < 1e-7, "{}", w.im);
    }

    #[test]
    fn coincident_wightman_is_norm() {
        let w = wightman_cross_quadrature(
            &det(1.0),
            &det(1.0),
            &PairGeometry::default(),
            &FieldState::MinkowskiVacuum,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert_eq!(w.im, 0.0);
        assert!(close(w.re, norm_sq_closed(&det(1.0)), 1e-10));
    }

    #[test]
    fn statistics_edge_cases() {
        let g = PairGeometry::new(6.0, 6.0).unwrap();
        let s = assemble_statistics(&det(0.0), &det(0.0), &g, &FieldState::MinkowskiVacuum).unwrap();
        assert_eq!(s, FieldStatistics::decoupled());

        let s = assemble_statistics(&det(2.0), &det(1.0), &g, &FieldState::MinkowskiVacuum).unwrap();
        assert!((s.nu_b - (-1.0 / (2.0 * PI * PI)).exp()).abs() < 1e-15);
        assert!((s.nu_b - 0.9506).abs() < 1e-4);
        let lhs = s.nu_ab_plus * s.nu_ab_minus;
        let rhs = (s.nu_a * s.nu_b).powi(2);
        assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn thermal_commutator_matches_vacuum() {
        let g = PairGeometry::new(3.0, 4.0).unwrap();
        let hot = assemble_statistics(&det(1.0), &det(1.0), &g, &FieldState::MinkowskiThermal { beta: 1.0 }).unwrap();
        let vac = assemble_statistics(&det(1.0), &det(1.0), &g, &FieldState::MinkowskiVacuum).unwrap();
        assert!((hot.delta_ab - vac.delta_ab).abs() < 1e-11);
        assert!(hot.nu_b < vac.nu_b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SmearingSpec::with_coupling(-1.0).is_err());
        assert!(SmearingSpec::new(1.0, [f64::NAN, 0.0, 0.0], 0.0, 0.0).is_err());
        assert!(PairGeometry::new(-1.0, 0.0).is_err());
        assert!(FieldState::MinkowskiThermal { beta: 0.0 }.validate().is_err());
    }

    #[test]
    fn geometry_from_detectors() {
        let a = SmearingSpec::new(1.0, [0.0, 0.0, 0.0], 1.0, 2.0).unwrap();
        let b = SmearingSpec::new(1.0, [3.0, 4.0, 0.0], 7.0, 0.5).unwrap();
        let g = PairGeometry::between(&a, &b);
        assert_eq!(g.separation, 5.0);
        assert_eq!(g.delay, 6.0);
        assert_eq!(b.phase(), 3.5);
    }
}
