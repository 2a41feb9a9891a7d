use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use udw_channel::capacity::entanglement_assisted_lower_bound;
use udw_channel::field::FieldState;
use udw_channel::selftest::{self, SelftestOptions};
use udw_channel::sweep::{
    check_output_dir, evaluate_point, run_sweep, CliError, EvalOptions, Format, SweepConfig,
};
use udw_channel::{DeltaChannel, QubitState};

#[derive(Parser, Debug)]
#[command(name = "udw", version, about = "Delta-coupled Unruh-DeWitt channel and its classical capacity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML config; flags below override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
    /// Cross-check closed forms against quadrature at every point
    #[arg(long, global = true)]
    oracle: bool,
    /// Run the brute-force ensemble search at every point
    #[arg(long, global = true)]
    optimize: bool,
    /// Worker threads (all cores when absent)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a grid of points and write one row per point
    Sweep,
    /// Evaluate one point and print it as JSON
    Point(Box<PointArgs>),
    /// Run the invariant suite and print a JSON report
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    lambda_a: Option<f64>,
    #[arg(long)]
    lambda_b: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Separation L / sigma
    #[arg(long = "L", alias = "separation")]
    separation: Option<f64>,
    /// Delay (tau_B0 - tau_A0) / sigma
    #[arg(long, allow_hyphen_values = true)]
    dtau: Option<f64>,
    /// Inverse temperature beta / sigma; vacuum when absent
    #[arg(long)]
    beta: Option<f64>,
    /// Bob's initial Bloch vector, "x,y,z"
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    bob: Option<[f64; 3]>,
    /// Rescale Bob's Bloch vector to this length
    #[arg(long)]
    r_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gap_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gap_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau_a: Option<f64>,
    /// Choose Bob's phase so his fixed Bloch component vanishes
    #[arg(long)]
    tune_bob_phase: bool,
    /// Alice's input for the reported eigenvalues, "x,y,z"; defaults to the
    /// equatorial state at her monopole phase
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    alice: Option<[f64; 3]>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Skip the brute-force capacity checks
    #[arg(long)]
    skip_optimizer: bool,
    /// Negative control: corrupt a gamma coefficient, which must fail the run
    #[arg(long, hide = true)]
    mutate_gamma: bool,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("unknown format {s:?}, expected csv or json")),
    }
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(v)
}

fn load_config(common: &Common) -> Result<SweepConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    if let Some(out) = &common.output {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    cfg.oracle |= common.oracle;
    cfg.optimize |= common.optimize;
    Ok(cfg)
}

fn sweep(common: &Common) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let rows = run_sweep(&cfg)?;
    let failed = rows.iter().filter(|r| r.c_closed.is_nan()).count();
    if failed > 0 {
        eprintln!("{failed} of {} points failed; see the status column", rows.len());
    }
    Ok(())
}

fn point(common: &Common, args: &PointArgs) -> Result<(), CliError> {
    let mut cfg = load_config(common)?;
    cfg.axis1 = None;
    cfg.axis2 = None;
    let overrides = [
        (&mut cfg.lambda_a, args.lambda_a),
        (&mut cfg.lambda_b, args.lambda_b),
        (&mut cfg.eta_over_sigma, args.eta),
        (&mut cfg.l_over_sigma, args.separation),
        (&mut cfg.dtau_over_sigma, args.dtau),
        (&mut cfg.gap_a, args.gap_a),
        (&mut cfg.gap_b, args.gap_b),
        (&mut cfg.tau_a_over_sigma, args.tau_a),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if args.beta.is_some() {
        cfg.beta_over_sigma = args.beta;
    }
    if let Some(b) = args.bob {
        cfg.bob_bloch = b;
    }
    cfg.tune_bob_phase |= args.tune_bob_phase;
    cfg.validate().map_err(|(_, m)| CliError::Config(m))?;
    let mut spec = cfg.base_point();
    if let Some(r) = args.r_b {
        if !(0.0..=1.0).contains(&r) {
            return Err(CliError::Config(format!("r_b: must lie in [0, 1], got {r}")));
        }
        spec.r_b = Some(r);
    }
    spec.bob_state().map_err(|e| CliError::Config(e.to_string()))?;
    let opts = EvalOptions {
        oracle: cfg.oracle,
        optimize: cfg.optimize,
        ..cfg.options()
    };
    let outcome = evaluate_point(&spec, &opts);

    let alice = match args.alice {
        Some(v) => QubitState::from_array(v).map_err(|e| CliError::Config(format!("alice: {e}")))?,
        None => QubitState::pure(std::f64::consts::FRAC_PI_2, spec.gap_a * spec.tau_a),
    };

    let mut record = json!({
        "inputs": {
            "lambda_a": spec.lambda_a,
            "lambda_b": spec.lambda_b,
            "eta_over_sigma": spec.eta_over_sigma,
            "L": spec.separation,
            "dtau": spec.delay,
            "beta_over_sigma": match spec.state {
                FieldState::MinkowskiThermal { beta } => Some(beta),
                FieldState::MinkowskiVacuum => None,
            },
            "bob_bloch": outcome.params.map(|p| p.bob_initial.bloch),
            "r_b": spec.bob_radius(),
            "phase_a": outcome.params.map(|p| p.phase_a),
            "phase_b": outcome.params.map(|p| p.phase_b),
            "alice": alice.bloch,
        },
        "status": outcome.status,
    });
    if let Some(e) = &outcome.error {
        record["error"] = json!(e);
    }
    if let Some(s) = outcome.stats {
        record["statistics"] = json!({
            "nu_a": s.nu_a,
            "nu_b": s.nu_b,
            "nu_ab_plus": s.nu_ab_plus,
            "nu_ab_minus": s.nu_ab_minus,
            "delta_ab": s.delta_ab,
        });
    }
    if let Some(params) = outcome.params {
        match DeltaChannel::new(params) {
            Ok(ch) => {
                let c = ch.coefficients();
                record["combined_coefficients"] = json!({
                    "keep": c.keep,
                    "flip": c.flip,
                    "comm_im": c.comm.im,
                });
                record["bob_fixed_component"] = json!(params.bob_fixed_component());
                record["eigenvalues"] = match ch.eigenvalues_analytic(&alice) {
                    Ok((plus, minus)) => json!({ "plus": plus, "minus": minus }),
                    Err(e) => json!({ "error": e.to_string() }),
                };
            }
            Err(e) => record["error"] = json!(e.to_string()),
        }
    }
    let mut capacity = json!({
        "c_closed": outcome.c_closed,
        "q_ea_lower": entanglement_assisted_lower_bound(outcome.c_closed),
        "q_unassisted": udw_channel::capacity::unassisted_quantum_capacity(),
        "nu_eff": outcome.params.map(|p| p.stats.nu_b * p.bob_initial.purity_radius().min(1.0)),
    });
    if cfg.optimize {
        capacity["c_bruteforce"] = Value::Null;
        if let Some(r) = &outcome.capacity {
            capacity["c_bruteforce"] = json!(r.c_bruteforce);
            capacity["gap"] = json!(r.diagnostics.gap);
            capacity["evaluations"] = json!(r.diagnostics.evaluations);
            capacity["refinement_moves"] = json!(r.diagnostics.refinement_moves);
            capacity["best_ensemble"] = Value::Array(
                r.best_ensemble
                    .members()
                    .iter()
                    .map(|(p, s)| json!({ "p": p, "bloch": s.bloch }))
                    .collect(),
            );
        }
    }
    record["capacity"] = capacity;
    if cfg.oracle {
        record["oracle_residual"] = json!(outcome.oracle_residual);
    }

    let text = serde_json::to_string_pretty(&record).expect("record serializes") + "\n";
    write_out(common.output.as_ref(), &text)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            check_output_dir(p).map_err(CliError::Config)?;
            std::fs::write(p, text).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_selftest(common: &Common, args: &SelftestArgs) -> Result<(), CliError> {
    let report = selftest::run(&SelftestOptions {
        samples: args.samples,
        seed: args.seed,
        optimizer: !args.skip_optimizer,
        mutate_gamma: args.mutate_gamma,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_out(common.output.as_ref(), &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::SelftestFailed)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("udw: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("udw: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Sweep => sweep(&cli.common),
        Command::Point(args) => point(&cli.common, args),
        Command::Selftest(args) => run_selftest(&cli.common, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::SelftestFailed) {
                eprintln!("udw: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
