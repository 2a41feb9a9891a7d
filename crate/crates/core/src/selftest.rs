//! Invariant suite behind `udw selftest`.
//!
//! Each check reports its worst residual against a tolerance. The report
//! serializes to JSON; the run passes only if every check does.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::capacity::{capacity_bruteforce, capacity_closed_form, OptimizerConfig};
use crate::channel::{ChannelParams, DeltaChannel};
use crate::field::{
    commutator_closed, commutator_lightcone_quadrature, norm_sq_closed, norm_sq_quadrature,
    wightman_cross_quadrature, FieldState, FieldStatistics, PairGeometry, SmearingSpec,
};
use crate::gamma::{CombinedCoefficients, GammaSet, RawGammas};
use crate::qubit::{hermitian_eigenvalues2, QubitState};
use crate::quadrature::QuadratureConfig;

/// Couplings, separations and delays of the field oracle grid.
pub const ORACLE_COUPLINGS: [f64; 3] = [0.1, 1.0, 10.0];
pub const ORACLE_SEPARATIONS: [f64; 4] = [1.0, 3.0, 6.0, 10.0];
pub const ORACLE_DELAYS: [f64; 4] = [0.0, 3.0, 6.0, 12.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub samples: usize,
    pub seed: u64,
    /// Brute-force capacity checks; the slowest part of the suite.
    pub optimizer: bool,
    /// Corrupts one gamma coefficient before the identities are checked.
    /// The suite must then fail.
    pub mutate_gamma: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0x5eed,
            optimizer: true,
            mutate_gamma: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            passed: true,
            samples: 0,
            max_residual: 0.0,
            tolerance,
            detail: None,
        }
    }

    fn record(&mut self, residual: f64) {
        self.samples += 1;
        // NaN fails, and sticks as the reported residual.
        if residual.is_nan() || residual > self.tolerance {
            self.passed = false;
        }
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
    }

    fn fail(&mut self, detail: String) {
        self.samples += 1;
        self.passed = false;
        if self.detail.is_none() {
            self.detail = Some(detail);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn relative(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

fn detector(coupling: f64) -> SmearingSpec {
    SmearingSpec::with_coupling(coupling).expect("grid couplings are valid")
}

/// Closed forms against quadratures over the oracle grid: the norm against
/// the radial integral, the commutator against the light-cone integral, and
/// the commutator against `-2 Im W`.
pub fn field_oracle_checks() -> Vec<Check> {
    let cfg = QuadratureConfig::default();
    let mut norm = Check::new("field: norm closed vs radial quadrature (relative)", 1e-6);
    let mut comm = Check::new("field: commutator closed vs light-cone quadrature (relative)", 1e-6);
    let mut ident = Check::new("field: commutator vs -2 Im W (absolute, per unit coupling^2)", 1e-9);
    for &la in &ORACLE_COUPLINGS {
        let a = detector(la);
        match norm_sq_quadrature(&a, &FieldState::MinkowskiVacuum, &cfg) {
            Ok(q) => norm.record(relative(norm_sq_closed(&a), q, 1e-12)),
            Err(e) => norm.fail(e.to_string()),
        }
        for &lb in &ORACLE_COUPLINGS {
            let b = detector(lb);
            for &l in &ORACLE_SEPARATIONS {
                for &t in &ORACLE_DELAYS {
                    let g = PairGeometry::new(l, t).expect("grid geometry is valid");
                    let closed = commutator_closed(&a, &b, &g);
                    match commutator_lightcone_quadrature(&a, &b, &g) {
                        Ok(q) => comm.record(relative(closed, q, 1e-12)),
                        Err(e) => comm.fail(e.to_string()),
                    }
                    match wightman_cross_quadrature(&a, &b, &g, &FieldState::MinkowskiVacuum, &cfg) {
                        Ok(w) => ident.record((closed + 2.0 * w.im).abs() / (la * lb)),
                        Err(e) => ident.fail(e.to_string()),
                    }
                }
            }
        }
    }
    vec![norm, comm, ident]
}

/// The two Minkowski reference values at unit coupling.
pub fn minkowski_value_checks() -> Vec<Check> {
    let f = detector(1.0);
    let mut norm = Check::new("field: ||Ef||^2 = 1/(4 pi^2) at unit coupling", 1e-10);
    norm.record((norm_sq_closed(&f) - 1.0 / (4.0 * PI * PI)).abs());
    let mut nu = Check::new("field: nu = 0.950601 at unit coupling", 1e-6);
    nu.record(((-2.0 * norm_sq_closed(&f)).exp() - 0.950601).abs());
    vec![norm, nu]
}

/// Random statistics spanning the whole admissible range. `nu_ab_plus` and
/// `nu_ab_minus` are drawn with product `(nu_a nu_b)^2` as for a real field.
pub fn random_statistics(rng: &mut impl Rng) -> FieldStatistics {
    let nu_a: f64 = rng.random_range(0.0..=1.0);
    let nu_b: f64 = rng.random_range(0.0..=1.0);
    let base = nu_a * nu_b;
    let skew: f64 = rng.random_range(-1.0..=1.0);
    // Keep both factors inside [0, 1]: |skew| * ln(base) bounded by -ln(base).
    let (plus, minus) = if base > 0.0 {
        let s = skew * base.ln().abs();
        ((base.ln() + s).exp(), (base.ln() - s).exp())
    } else {
        (0.0, 0.0)
    };
    let delta: f64 = rng.random_range(-4.0..4.0);
    FieldStatistics::new(nu_a, nu_b, plus.min(1.0), minus.min(1.0), delta).expect("sampled statistics are valid")
}

pub fn random_state(rng: &mut impl Rng) -> QubitState {
    let polar = rng.random_range(0.0..PI);
    let azimuth = rng.random_range(0.0..2.0 * PI);
    let r: f64 = rng.random_range(0.0..=1.0);
    let p = QubitState::pure(polar, azimuth);
    QubitState {
        bloch: p.bloch.map(|v| v * r),
    }
}

/// Gamma identities on random statistics, plus independence of the combined
/// coefficients from everything but `nu_b` and `delta_ab`.
pub fn gamma_checks(rng: &mut impl Rng, samples: usize, mutate: bool) -> Vec<Check> {
    let mut ident = Check::new("gamma: sums vs closed forms, trace, normalization", 1e-12);
    let mut indep = Check::new("gamma: combined coefficients independent of nu_a, nu_ab", 1e-12);
    for _ in 0..samples {
        let s = random_statistics(rng);
        let mut raw = RawGammas::from_statistics(&s);
        if mutate {
            raw.cssc -= 0.5 * s.nu_b * (2.0 * s.delta_ab).cos();
        }
        let closed = CombinedCoefficients::closed_form(s.nu_b, s.delta_ab);
        let summed = (raw.cccc + raw.cssc, raw.sccs + raw.ssss, raw.scsc - raw.sscc);
        let residual = [
            summed.0 - closed.keep,
            summed.1 - closed.flip,
            (summed.2 - closed.comm).norm(),
            summed.0 + summed.1 - 1.0,
            raw.cccc + raw.ssss + raw.cssc + raw.sccs - 1.0,
        ]
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.abs()));
        ident.record(residual);
        if GammaSet::assemble(raw, &s).is_err() && residual <= ident.tolerance {
            ident.fail("assembly rejected statistics that pass the identities".into());
        }

        let other = random_statistics(rng);
        let moved = FieldStatistics {
            nu_b: s.nu_b,
            delta_ab: s.delta_ab,
            ..other
        };
        let raw2 = RawGammas::from_statistics(&moved);
        let r = (raw.cccc + raw.cssc - raw2.cccc - raw2.cssc)
            .abs()
            .max((raw.sccs + raw.ssss - raw2.sccs - raw2.ssss).abs())
            .max((raw.scsc - raw.sscc - raw2.scsc + raw2.sscc).norm());
        indep.record(r);
    }
    vec![ident, indep]
}

/// Trace, positivity, eigenvalue and entanglement-breaking checks on random
/// channels and inputs.
pub fn channel_checks(rng: &mut impl Rng, samples: usize) -> Vec<Check> {
    let mut trace = Check::new("channel: output trace", 1e-12);
    let mut psd = Check::new("channel: output positivity (negated min eigenvalue)", 1e-12);
    let mut eig = Check::new("channel: analytic vs numeric eigenvalues", 1e-12);
    let mut ppt = Check::new("channel: Choi partial transpose (negated min eigenvalue)", 1e-10);
    for _ in 0..samples {
        let stats = random_statistics(rng);
        let phase_a = rng.random_range(0.0..2.0 * PI);
        let phase_b = rng.random_range(0.0..2.0 * PI);
        let bob = random_state(rng);
        let alice = random_state(rng);
        let ch = match DeltaChannel::new(ChannelParams::new(stats, phase_a, phase_b, bob)) {
            Ok(c) => c,
            Err(e) => {
                trace.fail(e.to_string());
                continue;
            }
        };
        let rho = ch.apply_linear(&alice.density_matrix());
        let tr = rho[(0, 0)] + rho[(1, 1)];
        trace.record((tr.re - 1.0).abs().max(tr.im.abs()));
        let numeric = hermitian_eigenvalues2(&rho);
        psd.record((-numeric[0]).max(0.0));
        match ch.eigenvalues_analytic(&alice) {
            Ok((plus, minus)) => eig.record((plus - numeric[1]).abs().max((minus - numeric[0]).abs())),
            Err(e) => eig.fail(e.to_string()),
        }
        ppt.record((-ch.choi_ppt_min_eigenvalue()).max(0.0));
    }
    vec![trace, psd, eig, ppt]
}

/// The brute-force search against the closed form at a few points with Bob
/// pure along `z`, on the default optimizer budget.
pub fn optimizer_checks(cfg: &OptimizerConfig) -> Vec<Check> {
    let mut gap = Check::new("capacity: closed form minus brute force", 2e-3);
    let mut bound = Check::new("capacity: brute force above closed form", 1e-9);
    let points = [(0.9, 0.5), (0.995_45, PI / 4.0), (0.6, 0.2)];
    for (nu_b, delta) in points {
        let stats = FieldStatistics::new(0.5, nu_b, 0.3, 0.4, delta).expect("fixed statistics are valid");
        let params = ChannelParams::new(stats, 0.4, 1.1, QubitState::ground());
        match (capacity_bruteforce(&params, cfg), capacity_closed_form(nu_b, 1.0, delta)) {
            (Ok(r), Ok(c)) => {
                gap.record((c - r.c_bruteforce).abs());
                bound.record((r.c_bruteforce - c).max(0.0));
            }
            (Err(e), _) | (_, Err(e)) => gap.fail(e.to_string()),
        }
    }
    vec![gap, bound]
}

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = field_oracle_checks();
    checks.extend(minkowski_value_checks());
    checks.extend(gamma_checks(&mut rng, opts.samples, opts.mutate_gamma));
    checks.extend(channel_checks(&mut rng, opts.samples));
    if opts.optimizer {
        checks.extend(optimizer_checks(&OptimizerConfig::default()));
    }
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
