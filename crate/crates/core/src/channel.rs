//! The qubit-to-qubit channel from Alice's detector to Bob's.
//!
//! Bob's final state is
//!
//! ```text
//! rho_B = keep * rho_B0 + flip * mu_B rho_B0 mu_B + comm * theta * [mu_B, rho_B0]
//! ```
//!
//! where `theta = tr(rho_A mu_A)` is the only thing the channel reads from
//! Alice's input. The matrix elements are evaluated from their expanded
//! closed forms in terms of Bob's Bloch vector and phase; the operator form
//! above lives in the tests as an oracle.
//!
//! Monopole conventions, with `phi_j = Omega_j tau_j0`:
//! `mu_A = cos(phi_A) X + sin(phi_A) Y` (so `theta = x cos + y sin`) and
//! `mu_B = cos(phi_B) X - sin(phi_B) Y`.

use crate::error::{Error, Result};
use crate::field::FieldStatistics;
use crate::gamma::{gammas_from_statistics, CombinedCoefficients, GammaSet};
use crate::qubit::{
    hermitian_eigenvalues2, hermitian_eigenvalues4, partial_transpose_second, Operator2, Operator4, QubitState,
    STATE_TOLERANCE,
};
use crate::Complex64;

/// Tolerance for analytic vs numerical eigenvalues.
pub const EIGEN_TOLERANCE: f64 = 1e-12;

/// `theta = tr(rho mu_A) = x cos(phase_a) + y sin(phase_a)`.
pub fn theta(state: &QubitState, phase_a: f64) -> f64 {
    let (s, c) = phase_a.sin_cos();
    state.x() * c + state.y() * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub stats: FieldStatistics,
    /// `Omega_A tau_A0`.
    pub phase_a: f64,
    /// `Omega_B tau_B0`.
    pub phase_b: f64,
    pub bob_initial: QubitState,
}

impl ChannelParams {
    pub fn new(stats: FieldStatistics, phase_a: f64, phase_b: f64, bob_initial: QubitState) -> Self {
        Self {
            stats,
            phase_a,
            phase_b,
            bob_initial,
        }
    }

    /// `P = x_B cos(phi_B) - y_B sin(phi_B)`, the part of Bob's Bloch vector the
    /// channel leaves untouched.
    pub fn bob_fixed_component(&self) -> f64 {
        let (s, c) = self.phase_b.sin_cos();
        self.bob_initial.x() * c - self.bob_initial.y() * s
    }
}

/// Bob's output state and its eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOutput {
    pub r11: f64,
    pub r12: Complex64,
    pub r22: f64,
    /// `(p_plus, p_minus)` with `p_plus >= p_minus`.
    pub eigenvalues: (f64, f64),
}

impl ChannelOutput {
    fn from_entries(r11: f64, r12: Complex64, r22: f64) -> Self {
        let radius = bloch_radius(r11, r12, r22);
        let minus = if radius > 0.5 {
            // (1 - r) / 2 without cancellation.
            0.5 * (1.0 - radius * radius) / (1.0 + radius)
        } else {
            0.5 * (1.0 - radius)
        };
        Self {
            r11,
            r12,
            r22,
            eigenvalues: (0.5 * (1.0 + radius), minus),
        }
    }

    pub fn rho(&self) -> Operator2 {
        Operator2::new(
            Complex64::new(self.r11, 0.0),
            self.r12,
            self.r12.conj(),
            Complex64::new(self.r22, 0.0),
        )
    }

    pub fn bloch(&self) -> [f64; 3] {
        [2.0 * self.r12.re, -2.0 * self.r12.im, self.r11 - self.r22]
    }

    /// Length of the output Bloch vector.
    pub fn radius(&self) -> f64 {
        bloch_radius(self.r11, self.r12, self.r22)
    }
}

fn bloch_radius(r11: f64, r12: Complex64, r22: f64) -> f64 {
    let dz = r11 - r22;
    (dz * dz + 4.0 * r12.norm_sqr()).sqrt()
}

/// Matrix elements `(r11, r12, r22)` as a linear function of the input's trace and `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Entries {
    r11: f64,
    r12: Complex64,
    r22: f64,
}

/// The channel for one choice of field statistics, phases and Bob's initial
/// state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaChannel {
    params: ChannelParams,
    gammas: GammaSet,
}

impl DeltaChannel {
    pub fn new(params: ChannelParams) -> Result<Self> {
        let gammas = gammas_from_statistics(&params.stats)?;
        Ok(Self { params, gammas })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn gammas(&self) -> &GammaSet {
        &self.gammas
    }

    pub fn coefficients(&self) -> &CombinedCoefficients {
        &self.gammas.combined
    }

    /// Closed-form matrix elements for an input of trace `trace` and monopole
    /// expectation `theta`.
    fn entries(&self, trace: f64, theta: f64) -> Entries {
        let nu = self.params.stats.nu_b;
        let (s, c) = (2.0 * self.params.stats.delta_ab).sin_cos();
        let [x, y, z] = self.params.bob_initial.bloch;
        let phi = self.params.phase_b;
        let (sp, cp) = phi.sin_cos();
        let rotated = y * cp + x * sp;

        let r11 = 0.5 * (trace * (1.0 + nu * z * c) + nu * theta * s * rotated);
        let r22 = 0.5 * (trace * (1.0 - nu * z * c) - nu * theta * s * rotated);

        let e1 = Complex64::from_polar(1.0, phi);
        let e2 = Complex64::from_polar(1.0, 2.0 * phi);
        let plus = Complex64::new(x, y);
        let minus = Complex64::new(x, -y);
        let i = Complex64::new(0.0, 1.0);
        let r12 = (e2 * plus * (1.0 - nu * c) * trace
            + minus * (1.0 + nu * c) * trace
            + 2.0 * i * e1 * (nu * z * theta * s))
            * 0.25;
        Entries { r11, r12, r22 }
    }

    /// Bob's state after Alice sends `alice_in`.
    pub fn apply(&self, alice_in: &QubitState) -> Result<ChannelOutput> {
        let th = theta(alice_in, self.params.phase_a);
        self.apply_theta(th)
    }

    /// Output for an input with monopole expectation `theta`; the channel
    /// depends on its input through nothing else.
    pub fn apply_theta(&self, theta: f64) -> Result<ChannelOutput> {
        let e = self.entries(1.0, theta);
        let out = ChannelOutput::from_entries(e.r11, e.r12, e.r22);
        let trace_residual = out.r11 + out.r22 - 1.0;
        if trace_residual.abs() > STATE_TOLERANCE {
            return Err(Error::Inconsistent {
                check: "output trace",
                residual: trace_residual,
            });
        }
        if out.eigenvalues.1 < -STATE_TOLERANCE {
            return Err(Error::Inconsistent {
                check: "output positivity",
                residual: out.eigenvalues.1,
            });
        }
        Ok(out)
    }

    /// Action on an arbitrary (not necessarily Hermitian) operator by linear
    /// extension: `E(X) = tr(X) K + theta(X) G`.
    pub fn apply_linear(&self, input: &Operator2) -> Operator2 {
        let (s, c) = self.params.phase_a.sin_cos();
        let mu_phase = Complex64::new(c, s);
        let trace = input[(0, 0)] + input[(1, 1)];
        let th = input[(0, 1)] * mu_phase + input[(1, 0)] * mu_phase.conj();
        let k = to_operator(self.entries(1.0, 0.0));
        let g = to_operator(self.entries(0.0, 1.0));
        k * trace + g * th
    }

    /// Choi matrix `(E (x) id)(|Phi+><Phi+|)`, output factor first.
    pub fn choi_matrix(&self) -> Operator4 {
        let mut choi = Operator4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = Operator2::zeros();
                unit[(i, j)] = Complex64::new(1.0, 0.0);
                let image = self.apply_linear(&unit);
                let mut reference = Operator2::zeros();
                reference[(i, j)] = Complex64::new(0.5, 0.0);
                choi += image.kronecker(&reference);
            }
        }
        choi
    }

    /// Smallest eigenvalue of the partially transposed Choi matrix. It is
    /// non-negative exactly when the channel is entanglement breaking.
    pub fn choi_ppt_min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues4(&partial_transpose_second(&self.choi_matrix()))[0]
    }

    /// Output eigenvalues from the compact formula
    /// `p = 1/2 +- sqrt(P^2 + nu_B^2 R) / 2`,
    /// `R = (theta^2 sin^2 2Delta + cos^2 2Delta)(r_B^2 - P^2)`,
    /// cross-checked against numerical diagonalisation of [`Self::apply`].
    pub fn eigenvalues_analytic(&self, alice_in: &QubitState) -> Result<(f64, f64)> {
        let th = theta(alice_in, self.params.phase_a);
        let p = self.params.bob_fixed_component();
        let nu = self.params.stats.nu_b;
        let (s, c) = (2.0 * self.params.stats.delta_ab).sin_cos();
        let r_sq = self.params.bob_initial.norm_sq();
        let r = (th * th * s * s + c * c) * (r_sq - p * p);
        let root = (p * p + nu * nu * r).max(0.0).sqrt();
        let analytic = (0.5 + 0.5 * root, 0.5 - 0.5 * root);

        let out = self.apply(alice_in)?;
        let numeric = hermitian_eigenvalues2(&out.rho());
        let residual = (analytic.0 - numeric[1]).abs().max((analytic.1 - numeric[0]).abs());
        if residual > EIGEN_TOLERANCE {
            return Err(Error::Inconsistent {
                check: "analytic vs numeric output eigenvalues",
                residual,
            });
        }
        Ok(analytic)
    }
}

fn to_operator(e: Entries) -> Operator2 {
    Operator2::new(Complex64::new(e.r11, 0.0), e.r12, e.r12.conj(), Complex64::new(e.r22, 0.0))
}
