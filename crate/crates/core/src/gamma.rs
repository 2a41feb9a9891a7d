//! Field expectation values `gamma_ijkl` of products of `cos Y` and `sin Y`
//! of the two smeared field operators, derived with the Weyl relations for a
//! quasifree state.
//!
//! The channel only needs three combinations of them. Those are computed
//! twice, once by summing the individual coefficients and once from their
//! reduced closed forms in `(nu_b, delta_ab)`, and the two must agree before a
//! [`GammaSet`] is handed out.

use crate::error::{Error, Result};
use crate::field::FieldStatistics;
use crate::Complex64;

/// Agreement required between the two routes to the combined coefficients.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// The six coefficients as read off the Weyl-relation expansion, before any
/// cross-checking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawGammas {
    pub cccc: f64,
    pub ssss: f64,
    pub cssc: f64,
    pub sccs: f64,
    pub scsc: Complex64,
    pub sscc: Complex64,
}

impl RawGammas {
    pub fn from_statistics(s: &FieldStatistics) -> Self {
        let b = s.nu_b * (2.0 * s.delta_ab).cos();
        let b_sin = s.nu_b * (2.0 * s.delta_ab).sin();
        let sum = (s.nu_ab_plus + s.nu_ab_minus) / 8.0;
        let diff = (s.nu_ab_plus - s.nu_ab_minus) / 8.0;
        Self {
            cccc: (1.0 + s.nu_a + b) / 4.0 + sum,
            ssss: (1.0 - s.nu_a - b) / 4.0 + sum,
            cssc: (1.0 - s.nu_a + b) / 4.0 - sum,
            sccs: (1.0 + s.nu_a - b) / 4.0 - sum,
            scsc: Complex64::new(-diff, -b_sin / 4.0),
            sscc: Complex64::new(-diff, b_sin / 4.0),
        }
    }

    fn combined(&self) -> CombinedCoefficients {
        CombinedCoefficients {
            keep: self.cccc + self.cssc,
            flip: self.sccs + self.ssss,
            comm: self.scsc - self.sscc,
        }
    }
}

/// Weights of the three terms of the channel acting on Bob's initial state:
/// the state itself, its conjugation by the monopole, and the commutator
/// with the monopole (scaled by Alice's `theta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedCoefficients {
    pub keep: f64,
    pub flip: f64,
    pub comm: Complex64,
}

impl CombinedCoefficients {
    /// Reduced closed forms; they depend only on `nu_b` and `delta_ab`.
    pub fn closed_form(nu_b: f64, delta_ab: f64) -> Self {
        let (s, c) = (2.0 * delta_ab).sin_cos();
        Self {
            keep: 0.5 + 0.5 * nu_b * c,
            flip: 0.5 - 0.5 * nu_b * c,
            comm: Complex64::new(0.0, -0.5 * nu_b * s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub g_cccc: f64,
    pub g_ssss: f64,
    pub g_cssc: f64,
    pub g_sccs: f64,
    pub g_scsc: Complex64,
    pub g_sscc: Complex64,
    /// Closed-form values, the ones the channel consumes.
    pub combined: CombinedCoefficients,
}

impl GammaSet {
    /// Cross-checks `raw` against the closed forms for `stats` and packages
    /// it. Any identity off by more than [`IDENTITY_TOLERANCE`] is reported as
    /// [`Error::Inconsistent`].
    pub fn assemble(raw: RawGammas, stats: &FieldStatistics) -> Result<Self> {
        let closed = CombinedCoefficients::closed_form(stats.nu_b, stats.delta_ab);
        let summed = raw.combined();

        check("keep: sum vs closed form", summed.keep - closed.keep)?;
        check("flip: sum vs closed form", summed.flip - closed.flip)?;
        check("comm: sum vs closed form", (summed.comm - closed.comm).norm())?;
        check("trace preservation", summed.keep + summed.flip - 1.0)?;
        check(
            "real gammas sum to one",
            raw.cccc + raw.ssss + raw.cssc + raw.sccs - 1.0,
        )?;
        check("comm is imaginary", summed.comm.re)?;
        let keep_excess = if closed.keep < 0.0 {
            -closed.keep
        } else {
            (closed.keep - 1.0).max(0.0)
        };
        check("keep within [0, 1]", keep_excess)?;

        Ok(Self {
            g_cccc: raw.cccc,
            g_ssss: raw.ssss,
            g_cssc: raw.cssc,
            g_sccs: raw.sccs,
            g_scsc: raw.scsc,
            g_sscc: raw.sscc,
            combined: closed,
        })
    }
}

fn check(what: &'static str, residual: f64) -> Result<()> {
    if residual.abs() <= IDENTITY_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Inconsistent {
            check: what,
            residual,
        })
    }
}

/// All six `gamma_ijkl` and the combined channel coefficients.
pub fn gammas_from_statistics(stats: &FieldStatistics) -> Result<GammaSet> {
    stats.validate()?;
    GammaSet::assemble(RawGammas::from_statistics(stats), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn decoupled_detectors_give_identity() {
        let g = gammas_from_statistics(&FieldStatistics::decoupled()).unwrap();
        assert_eq!(g.g_cccc, 1.0);
        assert_eq!(
            [g.g_ssss, g.g_cssc, g.g_sccs, g.g_scsc.norm(), g.g_sscc.norm()],
            [0.0; 5]
        );
        assert_eq!(g.combined.keep, 1.0);
        assert_eq!(g.combined.flip, 0.0);
    }

    #[test]
    fn commutator_coefficient_at_quarter_turn() {
        let e = (-1.0f64).exp();
        let stats = FieldStatistics::new(e, e, e, e, FRAC_PI_4).unwrap();
        let g = gammas_from_statistics(&stats).unwrap();
        let comm = g.g_scsc - g.g_sscc;
        assert!(comm.re.abs() < 1e-16);
        assert!((comm.im + 0.5 * e).abs() < 1e-15);
        assert!((g.combined.keep + g.combined.flip - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detects_transcription_error() {
        let stats = FieldStatistics::new(0.9, 0.8, 0.7, 0.6, 0.3).unwrap();
        let mut raw = RawGammas::from_statistics(&stats);
        raw.cssc -= stats.nu_b * (2.0 * stats.delta_ab).cos() / 2.0;
        assert!(matches!(
            GammaSet::assemble(raw, &stats),
            Err(Error::Inconsistent { .. })
        ));
    }
}
