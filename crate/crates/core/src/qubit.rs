//! Single-qubit states in the Bloch representation and small dense-matrix
//! helpers.
//!
//! Basis convention: `|0>` is the `+1` eigenvector of `sigma_z`, so
//! `rho = [[(1 + z)/2, (x - i y)/2], [(x + i y)/2, (1 - z)/2]]`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use crate::error::{ensure_finite, Error, Result};
use crate::Complex64;

pub type Operator2 = Matrix2<Complex64>;
pub type Operator4 = Matrix4<Complex64>;

/// Slack allowed on `|r| <= 1` and on negative eigenvalues.
pub const STATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub bloch: [f64; 3],
}

impl QubitState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        for v in [x, y, z] {
            ensure_finite("bloch component", v)?;
        }
        let state = Self { bloch: [x, y, z] };
        let r2 = state.norm_sq();
        if r2 > 1.0 + STATE_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "bloch vector length squared",
                value: r2,
                reason: "must not exceed 1",
            });
        }
        Ok(state)
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Pure state at polar angle `polar` from `+z` and azimuth `azimuth`.
    pub fn pure(polar: f64, azimuth: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self {
            bloch: [sp * ca, sp * sa, cp],
        }
    }

    pub fn maximally_mixed() -> Self {
        Self { bloch: [0.0; 3] }
    }

    pub fn ground() -> Self {
        Self {
            bloch: [0.0, 0.0, 1.0],
        }
    }

    pub fn x(&self) -> f64 {
        self.bloch[0]
    }

    pub fn y(&self) -> f64 {
        self.bloch[1]
    }

    pub fn z(&self) -> f64 {
        self.bloch[2]
    }

    pub fn norm_sq(&self) -> f64 {
        self.bloch.iter().map(|v| v * v).sum()
    }

    /// Length `r` of the Bloch vector.
    pub fn purity_radius(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn density_matrix(&self) -> Operator2 {
        let [x, y, z] = self.bloch;
        Operator2::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        )
    }

    /// Bloch vector of a Hermitian trace-one 2x2 matrix. Only the upper
    /// triangle and the `(0, 0)` entry are read.
    pub fn from_density_matrix(rho: &Operator2) -> Result<Self> {
        let r01 = rho[(0, 1)];
        Self::new(2.0 * r01.re, -2.0 * r01.im, 2.0 * rho[(0, 0)].re - 1.0)
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order, by a dense
/// numerical eigensolver.
pub fn hermitian_eigenvalues2(m: &Operator2) -> [f64; 2] {
    let mut ev: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1]]
}

pub fn hermitian_eigenvalues4(m: &Operator4) -> [f64; 4] {
    let mut ev: Vec<f64> = SymmetricEigen::new(*m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2], ev[3]]
}

/// Partial transpose over the second tensor factor of a two-qubit operator
/// (index `2 * a + b` for factors `a`, `b`).
pub fn partial_transpose_second(m: &Operator4) -> Operator4 {
    Operator4::from_fn(|row, col| {
        let (a, b) = (row / 2, row % 2);
        let (c, d) = (col / 2, col % 2);
        m[(2 * a + d, 2 * c + b)]
    })
}

pub fn pauli_x() -> Operator2 {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    Operator2::new(o, l, l, o)
}

pub fn pauli_y() -> Operator2 {
    let o = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    Operator2::new(o, -i, i, o)
}

pub fn pauli_z() -> Operator2 {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    Operator2::new(l, o, o, -l)
}
