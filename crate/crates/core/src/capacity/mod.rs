//! Classical capacity of the delta-coupled channel.
//!
//! The channel is entanglement breaking, so its Holevo quantity is additive
//! and the single-use maximum of `chi` over input ensembles is the classical
//! capacity. With Bob's fixed component `P` tuned to zero the maximum is
//!
//! ```text
//! C = H(1/2 + (nu_B r_B / 2) |cos 2 Delta|) - H(1/2 + nu_B r_B / 2)
//! ```
//!
//! which [`capacity_bruteforce`] checks against an explicit ensemble search.

mod entropy;
mod search;

use std::f64::consts::PI;

pub use entropy::{binary_entropy, von_neumann_entropy};
pub(crate) use entropy::entropy_from_radius;
pub use search::{capacity_bruteforce, probe_bob_phase, CapacityResult, OptimizerConfig, PhaseProbe, SearchDiagnostics};

use crate::channel::DeltaChannel;
use crate::error::{Error, Result};
use crate::qubit::{QubitState, STATE_TOLERANCE};

/// Upper bound on ensemble size; pure-state ensembles of a qubit never need more.
pub const MAX_MEMBERS: usize = 4;

/// Alice's input ensemble `{p_m, rho_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, QubitState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, QubitState)>) -> Result<Self> {
        if members.is_empty() || members.len() > MAX_MEMBERS {
            return Err(Error::Domain {
                what: "ensemble size",
                value: members.len() as f64,
            });
        }
        let mut total = 0.0;
        for &(p, _) in &members {
            if p.is_nan() || p < 0.0 {
                return Err(Error::Domain {
                    what: "ensemble probability",
                    value: p,
                });
            }
            total += p;
        }
        if (total - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::Domain {
                what: "ensemble total probability",
                value: total,
            });
        }
        Ok(Self { members })
    }

    pub fn single(state: QubitState) -> Self {
        Self {
            members: vec![(1.0, state)],
        }
    }

    /// The two-state ensemble that attains the closed-form capacity:
    /// antipodal equatorial states aligned with Alice's monopole phase.
    pub fn antipodal(phase_a: f64) -> Self {
        let a = QubitState::pure(PI / 2.0, phase_a);
        let b = QubitState::pure(PI / 2.0, phase_a + PI);
        Self {
            members: vec![(0.5, a), (0.5, b)],
        }
    }

    pub fn members(&self) -> &[(f64, QubitState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Bloch vector of the average state.
    pub fn average(&self) -> QubitState {
        let mut v = [0.0; 3];
        for (p, s) in &self.members {
            for (acc, c) in v.iter_mut().zip(&s.bloch) {
                *acc += p * c;
            }
        }
        QubitState { bloch: v }
    }
}

/// Holevo quantity `S(E(avg)) - sum_m p_m S(E(rho_m))` in bits.
pub fn holevo_chi(channel: &DeltaChannel, ensemble: &Ensemble) -> Result<f64> {
    let avg_out = channel.apply(&ensemble.average())?;
    let mut chi = entropy_from_radius(avg_out.radius());
    for (p, s) in ensemble.members() {
        chi -= p * entropy_from_radius(channel.apply(s)?.radius());
    }
    Ok(chi)
}

/// Closed-form capacity with effective damping `nu_b * r_b`, valid when Bob's
/// fixed component `P` vanishes (for instance `r_B` along `z`, or a tuned
/// phase, see [`tune_bob_phase`]).
pub fn capacity_closed_form(nu_b: f64, r_b: f64, delta_ab: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu_b) {
        return Err(Error::Domain { what: "nu_b", value: nu_b });
    }
    if !(0.0..=1.0).contains(&r_b) {
        return Err(Error::Domain { what: "r_b", value: r_b });
    }
    if !delta_ab.is_finite() {
        return Err(Error::Domain {
            what: "delta_ab",
            value: delta_ab,
        });
    }
    let nu_eff = nu_b * r_b;
    let cos = (2.0 * delta_ab).cos().abs();
    let averaged = binary_entropy(0.5 + 0.5 * nu_eff * cos)?;
    let member = binary_entropy(0.5 + 0.5 * nu_eff)?;
    Ok(averaged - member)
}

/// Bob's phase `Omega_B tau_B0` in `[0, pi)` that zeroes the fixed component
/// `P = x_B cos(phi) - y_B sin(phi)`. A Bloch vector along `z` has `P = 0`
/// for every phase; zero is returned then.
pub fn tune_bob_phase(bob: &QubitState) -> f64 {
    let (x, y) = (bob.x(), bob.y());
    if x == 0.0 && y == 0.0 {
        return 0.0;
    }
    let alpha = x.atan2(-y);
    (-alpha).rem_euclid(PI)
}

/// Unassisted quantum capacity. Entanglement-breaking channels cannot carry
/// quantum information on their own, so this is identically zero.
pub fn unassisted_quantum_capacity() -> f64 {
    0.0
}

/// Lower bound on the entanglement-assisted quantum capacity, `C / 2`.
pub fn entanglement_assisted_lower_bound(classical_capacity: f64) -> f64 {
    classical_capacity / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::field::FieldStatistics;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn closed_form_zeros() {
        assert_eq!(capacity_closed_form(0.9, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(capacity_closed_form(0.9, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(capacity_closed_form(0.0, 1.0, 0.7).unwrap(), 0.0);
        assert_eq!(capacity_closed_form(0.9, 1.0, PI / 2.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_high_corner() {
        let c = capacity_closed_form(0.99545, 1.0, FRAC_PI_4).unwrap();
        let expected = 1.0 - binary_entropy(0.5 + 0.5 * 0.99545).unwrap();
        assert!((c - expected).abs() < 1e-15);
        assert!((c - 0.9767).abs() < 1e-4, "{c}");
    }

    #[test]
    fn closed_form_domain() {
        assert!(capacity_closed_form(1.1, 1.0, 0.1).is_err());
        assert!(capacity_closed_form(0.5, -0.1, 0.1).is_err());
        assert!(capacity_closed_form(0.5, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn tuned_phases() {
        let p = |b: &QubitState, phi: f64| b.x() * phi.cos() - b.y() * phi.sin();
        let b = QubitState::new(1.0, 0.0, 0.0).unwrap();
        assert!((tune_bob_phase(&b) - PI / 2.0).abs() < 1e-15);
        assert_eq!(tune_bob_phase(&QubitState::ground()), 0.0);
        assert_eq!(tune_bob_phase(&QubitState::new(0.0, 1.0, 0.0).unwrap()), 0.0);
        for (x, y) in [(0.3, -0.4), (-0.7, 0.1), (0.2, 0.2), (-0.5, -0.5)] {
            let b = QubitState::new(x, y, 0.1).unwrap();
            let phi = tune_bob_phase(&b);
            assert!((0.0..PI).contains(&phi));
            assert!(p(&b, phi).abs() < 1e-12);
        }
    }

    #[test]
    fn ensemble_validation() {
        let s = QubitState::ground();
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.5, s), (0.4, s)]).is_err());
        assert!(Ensemble::new(vec![(1.5, s), (-0.5, s)]).is_err());
        assert!(Ensemble::new(vec![(0.2, s); 5]).is_err());
        assert!(Ensemble::new(vec![(0.25, s); 4]).is_ok());
    }

    #[test]
    fn chi_of_single_state_is_zero() {
        let stats = FieldStatistics::new(0.8, 0.9, 0.7, 0.6, 0.4).unwrap();
        let ch = DeltaChannel::new(ChannelParams::new(stats, 0.3, 0.2, QubitState::ground())).unwrap();
        assert_eq!(holevo_chi(&ch, &Ensemble::single(QubitState::pure(0.3, 0.1))).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_ensemble_attains_closed_form() {
        let stats = FieldStatistics::new(0.8, 0.93, 0.7, 0.6, 0.4).unwrap();
        for (pa, pb) in [(0.0, 0.0), (1.3, -0.4), (2.9, 5.0)] {
            let ch = DeltaChannel::new(ChannelParams::new(stats, pa, pb, QubitState::ground())).unwrap();
            let chi = holevo_chi(&ch, &Ensemble::antipodal(pa)).unwrap();
            let c = capacity_closed_form(0.93, 1.0, 0.4).unwrap();
            assert!((chi - c).abs() < 1e-14, "{chi} vs {c}");
        }
    }
}
