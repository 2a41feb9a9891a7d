//! Base-2 entropies of qubit states.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::qubit::{Operator2, STATE_TOLERANCE};

/// `-p log2 p - (1 - p) log2 (1 - p)` given both probabilities, `small <= large`.
/// `log2(large)` goes through `ln_1p(-small)` so that nearly pure states keep
/// their relative precision.
fn entropy_of_split(small: f64, large: f64) -> f64 {
    let small_term = if small > 0.0 { -small * small.log2() } else { 0.0 };
    let large_term = -large * (-small).ln_1p() / LN_2;
    small_term + large_term
}

/// Binary (Shannon) entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-STATE_TOLERANCE..=1.0 + STATE_TOLERANCE).contains(&x) {
        return Err(Error::Domain {
            what: "probability",
            value: x,
        });
    }
    let x = x.clamp(0.0, 1.0);
    let small = x.min(1.0 - x);
    Ok(entropy_of_split(small, 1.0 - small))
}

/// Von Neumann entropy of a qubit whose Bloch vector has length `radius`.
pub(crate) fn entropy_from_radius(radius: f64) -> f64 {
    let r = radius.clamp(0.0, 1.0);
    // (1 - r) / 2 written without cancellation near r = 1.
    let small = 0.5 * (1.0 - r * r) / (1.0 + r);
    entropy_of_split(small, 0.5 * (1.0 + r))
}

/// Von Neumann entropy `-tr(rho log2 rho)` of a qubit density matrix.
pub fn von_neumann_entropy(rho: &Operator2) -> Result<f64> {
    let hermiticity = (rho[(0, 1)] - rho[(1, 0)].conj()).norm().max(rho[(0, 0)].im.abs()).max(rho[(1, 1)].im.abs());
    if hermiticity > STATE_TOLERANCE {
        return Err(Error::Domain {
            what: "density matrix hermiticity defect",
            value: hermiticity,
        });
    }
    let trace = rho[(0, 0)].re + rho[(1, 1)].re;
    if (trace - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::Domain {
            what: "density matrix trace",
            value: trace,
        });
    }
    let dz = rho[(0, 0)].re - rho[(1, 1)].re;
    let radius = (dz * dz + 4.0 * rho[(0, 1)].norm_sqr()).sqrt();
    if radius > 1.0 + 2.0 * STATE_TOLERANCE {
        return Err(Error::Domain {
            what: "density matrix minimum eigenvalue",
            value: 0.5 * (1.0 - radius),
        });
    }
    Ok(entropy_from_radius(radius))
}
