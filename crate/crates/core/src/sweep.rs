//! Sweep configuration, the single-point evaluator shared by `udw point` and
//! `udw sweep`, and the CSV/JSON writers.
//!
//! A config is a flat TOML file:
//!
//! ```toml
//! schema_version = 1
//! eta_over_sigma = 1.0
//! lambda_a = 1.0
//! lambda_b = 1.0
//! L_over_sigma = 6.0
//! dtau_over_sigma = 6.0
//! # beta_over_sigma = 1.0      # thermal field state; vacuum when absent
//! bob_bloch = [0.0, 0.0, 1.0]
//! gap_a = 0.0
//! gap_b = 0.0
//! tau_a_over_sigma = 0.0
//! tune_bob_phase = false
//! axis1 = { name = "lambda_a", min = 0.1, max = 1000.0, count = 64, scale = "log" }
//! axis2 = { name = "lambda_b", min = 0.1, max = 1000.0, count = 64, scale = "log" }
//! output = "coupling_surface.csv"
//! format = "csv"
//! oracle = false
//! optimize = false
//! ```
//!
//! Couplings are `lambda * eta_over_sigma`. Bob switches at
//! `tau_a_over_sigma + dtau_over_sigma`, so the monopole phases are
//! `gap_a * tau_a` and `gap_b * tau_b` unless `tune_bob_phase` replaces Bob's.
//! An `r_b` axis rescales `bob_bloch` to the given length.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{
    capacity_bruteforce, capacity_closed_form, tune_bob_phase,
    CapacityResult, OptimizerConfig,
};
use crate::channel::ChannelParams;
use crate::error::Error;
use crate::field::{
    assemble_statistics, commutator_lightcone_quadrature, norm_sq_closed, norm_sq_quadrature, FieldState,
    FieldStatistics, PairGeometry, SmearingSpec,
};
use crate::qubit::QubitState;
use crate::quadrature::QuadratureConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Columns present in every CSV row, in order. `c_bruteforce` and `gap`
/// follow when optimizing, `oracle_residual` when the oracle is on, and
/// `status` always comes last.
pub const BASE_COLUMNS: [&str; 11] = [
    "lambda_a",
    "lambda_b",
    "L",
    "dtau",
    "r_b",
    "nu_a",
    "nu_b",
    "nu_ab_plus",
    "nu_ab_minus",
    "delta_ab",
    "c_closed",
];

/// Failures of the command-line layer, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("selftest failed")]
    SelftestFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelftestFailed => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum AxisName {
    #[serde(rename = "lambda_a")]
    LambdaA,
    #[serde(rename = "lambda_b")]
    LambdaB,
    #[serde(rename = "L")]
    Separation,
    #[serde(rename = "dtau")]
    Delay,
    #[serde(rename = "r_b")]
    BobRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub scale: Scale,
}

fn linear() -> Scale {
    Scale::Linear
}

impl Axis {
    /// Grid values; both endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }

    fn validate(&self, key: &str) -> std::result::Result<(), String> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(format!("{key}: min and max must be finite"));
        }
        if self.count < 1 {
            return Err(format!("{key}.count: must be at least 1"));
        }
        if self.min > self.max {
            return Err(format!("{key}: min {} exceeds max {}", self.min, self.max));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(format!("{key}.min: log axis needs min > 0, got {}", self.min));
        }
        let lower = match self.name {
            AxisName::Delay => f64::NEG_INFINITY,
            _ => 0.0,
        };
        if self.min < lower {
            return Err(format!("{key}.min: {:?} cannot be negative", self.name));
        }
        if self.name == AxisName::BobRadius && self.max > 1.0 {
            return Err(format!("{key}.max: r_b cannot exceed 1"));
        }
        Ok(())
    }
}

fn one() -> f64 {
    1.0
}

fn six() -> f64 {
    6.0
}

fn ground() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn csv() -> Format {
    Format::Csv
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default = "one")]
    pub eta_over_sigma: f64,
    #[serde(default = "one")]
    pub lambda_a: f64,
    #[serde(default = "one")]
    pub lambda_b: f64,
    #[serde(rename = "L_over_sigma", default = "six")]
    pub l_over_sigma: f64,
    #[serde(default = "six")]
    pub dtau_over_sigma: f64,
    #[serde(default)]
    pub beta_over_sigma: Option<f64>,
    #[serde(default = "ground")]
    pub bob_bloch: [f64; 3],
    #[serde(default)]
    pub gap_a: f64,
    #[serde(default)]
    pub gap_b: f64,
    #[serde(default)]
    pub tau_a_over_sigma: f64,
    #[serde(default)]
    pub tune_bob_phase: bool,
    #[serde(default)]
    pub axis1: Option<Axis>,
    #[serde(default)]
    pub axis2: Option<Axis>,
    /// Not echoed into JSON output, so the same sweep written to two places
    /// produces identical files.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default = "csv")]
    pub format: Format,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub optimize: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            eta_over_sigma: 1.0,
            lambda_a: 1.0,
            lambda_b: 1.0,
            l_over_sigma: 6.0,
            dtau_over_sigma: 6.0,
            beta_over_sigma: None,
            bob_bloch: ground(),
            gap_a: 0.0,
            gap_b: 0.0,
            tau_a_over_sigma: 0.0,
            tune_bob_phase: false,
            axis1: None,
            axis2: None,
            output: None,
            format: Format::Csv,
            oracle: false,
            optimize: false,
        }
    }
}

/// First line (1-based) that assigns `key`, for error messages.
fn line_of(source: &str, key: &str) -> Option<usize> {
    source.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

impl SweepConfig {
    /// Parses and validates a config. Errors name the offending key and,
    /// where it can be found, its line.
    pub fn from_toml(source: &str) -> Result<Self, CliError> {
        let cfg: SweepConfig = toml::from_str(source).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate().map_err(|(key, msg)| match line_of(source, key) {
            Some(line) => CliError::Config(format!("line {line}: {msg}")),
            None => CliError::Config(msg),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let source = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::Config(format!("{}: no such config file", path.display())),
            _ => CliError::io(path, e),
        })?;
        Self::from_toml(&source)
    }

    /// Checks every invariant; the error carries the top-level key at fault.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err((
                "schema_version",
                format!("schema_version: expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        let non_negative = [
            ("eta_over_sigma", self.eta_over_sigma),
            ("lambda_a", self.lambda_a),
            ("lambda_b", self.lambda_b),
            ("L_over_sigma", self.l_over_sigma),
        ];
        for (key, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err((key, format!("{key}: must be finite and non-negative, got {v}")));
            }
        }
        for (key, v) in [
            ("dtau_over_sigma", self.dtau_over_sigma),
            ("gap_a", self.gap_a),
            ("gap_b", self.gap_b),
            ("tau_a_over_sigma", self.tau_a_over_sigma),
        ] {
            if !v.is_finite() {
                return Err((key, format!("{key}: must be finite, got {v}")));
            }
        }
        if let Some(beta) = self.beta_over_sigma {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(("beta_over_sigma", format!("beta_over_sigma: must be positive, got {beta}")));
            }
        }
        if QubitState::from_array(self.bob_bloch).is_err() {
            return Err((
                "bob_bloch",
                format!("bob_bloch: {:?} is not a Bloch vector of length <= 1", self.bob_bloch),
            ));
        }
        for (key, axis) in [("axis1", &self.axis1), ("axis2", &self.axis2)] {
            if let Some(axis) = axis {
                axis.validate(key).map_err(|m| (key, m))?;
                if axis.name == AxisName::BobRadius && self.bob_bloch.iter().all(|&v| v == 0.0) {
                    return Err((key, format!("{key}: an r_b axis needs a nonzero bob_bloch direction")));
                }
            }
        }
        if let (Some(a), Some(b)) = (&self.axis1, &self.axis2) {
            if a.name == b.name {
                return Err(("axis2", "axis2: repeats the name of axis1".to_string()));
            }
        }
        if self.axis1.is_none() && self.axis2.is_some() {
            return Err(("axis2", "axis2: given without axis1".to_string()));
        }
        if let Some(out) = &self.output {
            check_output_dir(out).map_err(|m| ("output", m))?;
        }
        Ok(())
    }

    fn field_state(&self) -> FieldState {
        match self.beta_over_sigma {
            Some(beta) => FieldState::MinkowskiThermal { beta },
            None => FieldState::MinkowskiVacuum,
        }
    }

    /// The point at the config's fixed values, with no axis applied.
    pub fn base_point(&self) -> PointSpec {
        PointSpec {
            lambda_a: self.lambda_a,
            lambda_b: self.lambda_b,
            eta_over_sigma: self.eta_over_sigma,
            separation: self.l_over_sigma,
            delay: self.dtau_over_sigma,
            state: self.field_state(),
            bob_bloch: self.bob_bloch,
            r_b: None,
            gap_a: self.gap_a,
            gap_b: self.gap_b,
            tau_a: self.tau_a_over_sigma,
            tune_bob_phase: self.tune_bob_phase,
        }
    }

    /// Grid points in row-major order: `axis1` outer, `axis2` inner.
    pub fn grid(&self) -> Vec<PointSpec> {
        let base = self.base_point();
        let outer = self.axis1.map(|a| (a.name, a.values()));
        let inner = self.axis2.map(|a| (a.name, a.values()));
        let mut points = Vec::new();
        match (outer, inner) {
            (None, _) => points.push(base),
            (Some((n1, v1)), None) => {
                for &x in &v1 {
                    points.push(base.with(n1, x));
                }
            }
            (Some((n1, v1)), Some((n2, v2))) => {
                for &x in &v1 {
                    for &y in &v2 {
                        points.push(base.with(n1, x).with(n2, y));
                    }
                }
            }
        }
        points
    }

    pub fn options(&self) -> EvalOptions {
        EvalOptions {
            oracle: self.oracle,
            optimize: self.optimize,
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// A missing output directory is a config error rather than an I/O one.
pub fn check_output_dir(path: &Path) -> std::result::Result<(), String> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(format!("output: directory {} does not exist", dir.display()))
        }
        _ => Ok(()),
    }
}

/// Every input of one channel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub eta_over_sigma: f64,
    pub separation: f64,
    pub delay: f64,
    pub state: FieldState,
    /// Bob's initial Bloch vector, or its direction when `r_b` is set.
    pub bob_bloch: [f64; 3],
    pub r_b: Option<f64>,
    pub gap_a: f64,
    pub gap_b: f64,
    pub tau_a: f64,
    pub tune_bob_phase: bool,
}

impl PointSpec {
    pub fn with(mut self, axis: AxisName, value: f64) -> Self {
        match axis {
            AxisName::LambdaA => self.lambda_a = value,
            AxisName::LambdaB => self.lambda_b = value,
            AxisName::Separation => self.separation = value,
            AxisName::Delay => self.delay = value,
            AxisName::BobRadius => self.r_b = Some(value),
        }
        self
    }

    pub fn bob_state(&self) -> crate::Result<QubitState> {
        let v = self.bob_bloch;
        match self.r_b {
            None => QubitState::from_array(v),
            Some(r) => {
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n == 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "bob_bloch",
                        value: 0.0,
                        reason: "r_b needs a nonzero direction",
                    });
                }
                QubitState::new(r * v[0] / n, r * v[1] / n, r * v[2] / n)
            }
        }
    }

    /// Length of Bob's Bloch vector, as reported in the `r_b` column.
    pub fn bob_radius(&self) -> f64 {
        match self.r_b {
            Some(r) => r,
            None => self.bob_bloch.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    pub fn detectors(&self) -> crate::Result<(SmearingSpec, SmearingSpec, PairGeometry)> {
        let a = SmearingSpec::new(
            self.lambda_a * self.eta_over_sigma,
            [0.0; 3],
            self.tau_a,
            self.gap_a,
        )?;
        let b = SmearingSpec::new(
            self.lambda_b * self.eta_over_sigma,
            [self.separation, 0.0, 0.0],
            self.tau_a + self.delay,
            self.gap_b,
        )?;
        // Built directly so the delay is exactly the input, not a difference of switch times.
        let geom = PairGeometry::new(self.separation, self.delay)?;
        Ok((a, b, geom))
    }

    pub fn channel_params(&self, stats: FieldStatistics) -> crate::Result<ChannelParams> {
        let bob = self.bob_state()?;
        let phase_a = self.gap_a * self.tau_a;
        let phase_b = if self.tune_bob_phase {
            tune_bob_phase(&bob)
        } else {
            self.gap_b * (self.tau_a + self.delay)
        };
        Ok(ChannelParams::new(stats, phase_a, phase_b, bob))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalOptions {
    pub oracle: bool,
    pub optimize: bool,
    pub optimizer: OptimizerConfig,
}

/// Outcome label written to the `status` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Bob's fixed component is nonzero, so `c_closed` (which assumes it
    /// vanishes) is not the capacity of this channel.
    Untuned,
    QuadratureFailed,
    Invalid,
    Inconsistent,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Untuned => "untuned",
            Status::QuadratureFailed => "quadrature_failed",
            Status::Invalid => "invalid",
            Status::Inconsistent => "inconsistent",
        }
    }

    fn of(err: &Error) -> Self {
        match err {
            Error::Quadrature { .. } => Status::QuadratureFailed,
            Error::Inconsistent { .. } => Status::Inconsistent,
            Error::InvalidParameter { .. } | Error::Domain { .. } => Status::Invalid,
        }
    }
}

/// Everything computed at one point. Fields that failed are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub spec: PointSpec,
    pub stats: Option<FieldStatistics>,
    pub params: Option<ChannelParams>,
    pub c_closed: f64,
    pub capacity: Option<CapacityResult>,
    pub oracle_residual: Option<f64>,
    pub status: Status,
    pub error: Option<String>,
}

/// Largest relative disagreement between the closed forms in use and
/// independent quadratures. In a thermal state only the commutator has one.
pub fn oracle_residual(spec: &PointSpec, stats: &FieldStatistics) -> crate::Result<f64> {
    let (a, b, geom) = spec.detectors()?;
    let rel = |used: f64, oracle: f64, floor: f64| (used - oracle).abs() / oracle.abs().max(floor);
    let delta_oracle = commutator_lightcone_quadrature(&a, &b, &geom)?;
    let scale = a.coupling * b.coupling / (4.0 * std::f64::consts::PI.powi(2));
    let mut worst = rel(stats.delta_ab, delta_oracle, 1e-12 * scale.max(f64::MIN_POSITIVE));
    if spec.state == FieldState::MinkowskiVacuum {
        let cfg = QuadratureConfig::default();
        for f in [&a, &b] {
            let q = norm_sq_quadrature(f, &spec.state, &cfg)?;
            worst = worst.max(rel(norm_sq_closed(f), q, 1e-12));
        }
    }
    Ok(worst)
}

/// Evaluates one point. Never fails: errors end up in `status`.
pub fn evaluate_point(spec: &PointSpec, opts: &EvalOptions) -> PointOutcome {
    let mut out = PointOutcome {
        spec: *spec,
        stats: None,
        params: None,
        c_closed: f64::NAN,
        capacity: None,
        oracle_residual: None,
        status: Status::Ok,
        error: None,
    };
    let fail = |mut out: PointOutcome, e: Error| {
        out.status = Status::of(&e);
        out.error = Some(e.to_string());
        out
    };

    let stats = match spec
        .detectors()
        .and_then(|(a, b, geom)| assemble_statistics(&a, &b, &geom, &spec.state))
    {
        Ok(s) => s,
        Err(e) => return fail(out, e),
    };
    out.stats = Some(stats);
    let params = match spec.channel_params(stats) {
        Ok(p) => p,
        Err(e) => return fail(out, e),
    };
    out.params = Some(params);
    let r_b = params.bob_initial.purity_radius().min(1.0);
    match capacity_closed_form(stats.nu_b, r_b, stats.delta_ab) {
        Ok(c) => out.c_closed = c,
        Err(e) => return fail(out, e),
    }
    if params.bob_fixed_component().abs() >= 1e-12 {
        out.status = Status::Untuned;
    }
    if opts.oracle {
        match oracle_residual(spec, &stats) {
            Ok(r) => out.oracle_residual = Some(r),
            Err(e) => return fail(out, e),
        }
    }
    if opts.optimize {
        match capacity_bruteforce(&params, &opts.optimizer) {
            Ok(c) => out.capacity = Some(c),
            Err(e) => return fail(out, e),
        }
    }
    out
}

/// One output row. Optional columns are `Some` (possibly NaN) exactly when
/// the matching option is on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub lambda_a: f64,
    pub lambda_b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub dtau: f64,
    pub r_b: f64,
    pub nu_a: f64,
    pub nu_b: f64,
    pub nu_ab_plus: f64,
    pub nu_ab_minus: f64,
    pub delta_ab: f64,
    pub c_closed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_bruteforce: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_residual: Option<f64>,
    pub status: Status,
}

impl Row {
    pub fn from_outcome(o: &PointOutcome, opts: &EvalOptions) -> Self {
        let nan = f64::NAN;
        let s = o.stats.unwrap_or(FieldStatistics {
            nu_a: nan,
            nu_b: nan,
            nu_ab_plus: nan,
            nu_ab_minus: nan,
            delta_ab: nan,
        });
        let cap = o.capacity.as_ref();
        Row {
            lambda_a: o.spec.lambda_a,
            lambda_b: o.spec.lambda_b,
            l: o.spec.separation,
            dtau: o.spec.delay,
            r_b: o.spec.bob_radius(),
            nu_a: s.nu_a,
            nu_b: s.nu_b,
            nu_ab_plus: s.nu_ab_plus,
            nu_ab_minus: s.nu_ab_minus,
            delta_ab: s.delta_ab,
            c_closed: o.c_closed,
            c_bruteforce: opts.optimize.then(|| cap.map_or(nan, |c| c.c_bruteforce)),
            gap: opts.optimize.then(|| cap.map_or(nan, |c| c.diagnostics.gap)),
            oracle_residual: opts.oracle.then(|| o.oracle_residual.unwrap_or(nan)),
            status: o.status,
        }
    }

    fn numbers(&self) -> Vec<f64> {
        let mut v = vec![
            self.lambda_a,
            self.lambda_b,
            self.l,
            self.dtau,
            self.r_b,
            self.nu_a,
            self.nu_b,
            self.nu_ab_plus,
            self.nu_ab_minus,
            self.delta_ab,
            self.c_closed,
        ];
        v.extend(self.c_bruteforce);
        v.extend(self.gap);
        v.extend(self.oracle_residual);
        v
    }
}

/// Shortest decimal that parses back to the same `f64`. Plain notation in
/// `[1e-5, 1e16)`, scientific outside it, `nan` for NaN.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn csv_header(opts: &EvalOptions) -> String {
    let mut cols: Vec<&str> = BASE_COLUMNS.to_vec();
    if opts.optimize {
        cols.extend(["c_bruteforce", "gap"]);
    }
    if opts.oracle {
        cols.push("oracle_residual");
    }
    cols.push("status");
    cols.join(",")
}

pub fn csv_line(row: &Row) -> String {
    let mut line = String::new();
    for x in row.numbers() {
        let _ = write!(line, "{},", format_float(x));
    }
    line.push_str(row.status.as_str());
    line
}

/// Evaluates every grid point in parallel and returns rows in grid order.
pub fn run_grid(points: &[PointSpec], opts: &EvalOptions) -> Vec<Row> {
    points
        .par_iter()
        .map(|p| Row::from_outcome(&evaluate_point(p, opts), opts))
        .collect()
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    schema_version: u32,
    config: &'a SweepConfig,
    rows: &'a [Row],
}

/// Renders the whole result file.
pub fn render(cfg: &SweepConfig, opts: &EvalOptions, rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = csv_header(opts);
            s.push('\n');
            for r in rows {
                s.push_str(&csv_line(r));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let doc = JsonSweep {
                schema_version: SCHEMA_VERSION,
                config: cfg,
                rows,
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("sweep rows serialize");
            s.push('\n');
            s
        }
    }
}

/// Runs the sweep described by `cfg` and writes it to `cfg.output`, or to
/// stdout when no output is set. Returns the rows.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<Row>, CliError> {
    cfg.validate().map_err(|(_, m)| CliError::Config(m))?;
    let opts = cfg.options();
    let rows = run_grid(&cfg.grid(), &opts);
    let text = render(cfg, &opts, &rows, cfg.format);
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
            w.flush().map_err(|e| CliError::io(path, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints_are_exact() {
        let a = Axis {
            name: AxisName::LambdaA,
            min: 0.1,
            max: 1000.0,
            count: 64,
            scale: Scale::Log,
        };
        let v = a.values();
        assert_eq!(v.len(), 64);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[63], 1000.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let single = Axis { count: 1, ..a };
        assert_eq!(single.values(), vec![0.1]);
        let lin = Axis {
            scale: Scale::Linear,
            min: -1.0,
            max: 1.0,
            count: 5,
            name: AxisName::Delay,
        };
        assert_eq!(lin.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0, -2.5, 5.2911e-3, 1e-30, 123456.789, 1e20, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(1e-30), "1e-30");
        assert_eq!(format_float(0.5), "0.5");
    }

    #[test]
    fn config_defaults_and_rejections() {
        let cfg = SweepConfig::from_toml("schema_version = 1\n").unwrap();
        assert_eq!(cfg, SweepConfig::default());

        let bad = |src: &str| match SweepConfig::from_toml(src) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        };
        assert!(bad("schema_version = 2\n").contains("schema_version"));
        assert!(bad("schema_version = 1\nwidth = 3\n").contains("width"));
        let m = bad("schema_version = 1\nlambda_a = 1\naxis1 = { name = \"lambda_a\", min = 0.0, max = 1.0, count = 4, scale = \"log\" }\n");
        assert!(m.contains("line 3") && m.contains("axis1.min"), "{m}");
        assert!(bad("schema_version = 1\naxis1 = { name = \"L\", min = 2.0, max = 1.0, count = 4 }\n").contains("exceeds"));
        assert!(bad("schema_version = 1\naxis1 = { name = \"L\", min = 1.0, max = 2.0, count = 0 }\n").contains("count"));
        assert!(bad("schema_version = 1\noutput = \"/no/such/dir/out.csv\"\n").contains("does not exist"));
        assert!(bad("schema_version = 1\nbob_bloch = [1.0, 1.0, 0.0]\n").contains("bob_bloch"));
        assert!(bad("schema_version = 1\nbeta_over_sigma = 0.0\n").contains("beta"));
    }

    #[test]
    fn grid_is_row_major() {
        let cfg = SweepConfig {
            axis1: Some(Axis {
                name: AxisName::LambdaA,
                min: 1.0,
                max: 2.0,
                count: 2,
                scale: Scale::Linear,
            }),
            axis2: Some(Axis {
                name: AxisName::Delay,
                min: 0.0,
                max: 6.0,
                count: 3,
                scale: Scale::Linear,
            }),
            ..SweepConfig::default()
        };
        let g = cfg.grid();
        let pairs: Vec<(f64, f64)> = g.iter().map(|p| (p.lambda_a, p.delay)).collect();
        assert_eq!(
            pairs,
            vec![(1.0, 0.0), (1.0, 3.0), (1.0, 6.0), (2.0, 0.0), (2.0, 3.0), (2.0, 6.0)]
        );
    }

    #[test]
    fn failures_stay_in_the_row() {
        let spec = PointSpec {
            lambda_a: f64::NAN,
            ..SweepConfig::default().base_point()
        };
        let opts = EvalOptions {
            oracle: true,
            ..EvalOptions::default()
        };
        let o = evaluate_point(&spec, &opts);
        assert_eq!(o.status, Status::Invalid);
        let row = Row::from_outcome(&o, &opts);
        assert!(row.nu_b.is_nan() && row.c_closed.is_nan());
        assert!(csv_line(&row).ends_with("nan,nan,invalid"));
    }

    #[test]
    fn off_axis_bob_is_flagged_unless_tuned() {
        let base = SweepConfig {
            bob_bloch: [0.6, 0.0, 0.8],
            ..SweepConfig::default()
        }
        .base_point();
        assert_eq!(evaluate_point(&base, &EvalOptions::default()).status, Status::Untuned);
        let tuned = PointSpec {
            tune_bob_phase: true,
            ..base
        };
        assert_eq!(evaluate_point(&tuned, &EvalOptions::default()).status, Status::Ok);
    }
}
