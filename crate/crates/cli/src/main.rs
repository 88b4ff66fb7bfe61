//! Command-line runner for the schur-harmonics toolkit.
//!
//! Every subcommand parses its inputs, calls one library routine and writes
//! JSON (structured results) or CSV (tables). Errors go to stderr as
//! `{"kind": ..., "message": ...}`; exit code 2 means the input was rejected,
//! 3 means a numerical check failed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use schur_harmonics::coset_geometry::{
    fidelity_suite, solve_bg, solve_circle, solve_hyperbola, solve_st,
};
use schur_harmonics::decay_certificate::{
    chain_constants, constants_table, norm_certificate, unit_ball_samples, write_constants_csv,
    DecaySample,
};
use schur_harmonics::gelfand::{
    coefficients_su2, coefficients_u2, kernel_schatten_norm_checked, lp_lower_bound,
    named_function, BiInvariantFunction, DiscQuadrature, PairTag,
};
use schur_harmonics::schatten::{cb_lower_bound, ms_norm_lower, MultiplierSymbol, SchattenExponent, SearchConfig};
use schur_harmonics::special_fn::{default_c_u2, hoelder_bound_check, Family};
use schur_harmonics::symplectic::{kak_decompose, kak_roundtrip_suite, SymplecticElement};
use schur_harmonics::Error;

const THREADS_VAR: &str = "SCHUR_HARMONICS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "schur-harmonics", version, about = "Schur multipliers, spherical functions and Sp(2,R) geometry")]
struct Cli {
    /// Run the experiment described by a JSON config instead of flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bound for the MS^p (or amplified) norm of a symbol.
    Norm(NormArgs),
    /// KAK decomposition of a 4x4 symplectic matrix.
    Kak(KakArgs),
    /// Solve one of the coset sinh systems.
    Solve {
        #[command(subcommand)]
        system: SolveCommand,
    },
    /// Peter-Weyl coefficients of a bi-invariant function and the l^p bound.
    Coeffs(CoeffsArgs),
    /// Hoelder bound scans for spherical functions.
    Holder(HolderArgs),
    /// Decay constant chain over a grid of p.
    Constants(ConstantsArgs),
    /// Norm certificate from chamber samples.
    Certify(CertifyArgs),
    /// Solver-versus-matrix fidelity and KAK roundtrip suite.
    Xcheck(XcheckArgs),
}

#[derive(Args, Debug)]
struct NormArgs {
    /// Symbol JSON ({"n", "re", "im"} or {"values": ...}).
    #[arg(long)]
    symbol: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Amplify by 1..=m and report the last level.
    #[arg(long)]
    cb: Option<usize>,
    #[arg(long, default_value_t = 512)]
    max_dim: usize,
    /// Include the witness matrix in the output.
    #[arg(long)]
    witness: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KakArgs {
    /// Row-major 4x4 JSON array.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SolveCommand {
    Hyperbola {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    Circle {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
    },
    St {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
    },
    Bg {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    U2,
    Su2,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Catalog name, e.g. one, z, abs2, h:2,1, gauss:3 (U2) or r2, legendre:4, exp:2 (SU2).
    #[arg(long)]
    function: String,
    #[arg(long, default_value_t = 24)]
    truncation: u32,
    /// Exponents for the l^p bound (repeatable).
    #[arg(long = "p", default_values_t = vec![2.0, 3.0, 4.0])]
    exponents: Vec<f64>,
    /// Also discretize the kernel operator at this quadrature order.
    #[arg(long)]
    kernel_order: Option<usize>,
    /// Spectrum CSV destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HolderArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 40)]
    max_degree: u32,
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[arg(long)]
    p_min: f64,
    #[arg(long)]
    p_max: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Defaults to 1.5 times the scanned U2 constant.
    #[arg(long)]
    c_u2: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// JSON array of {"weyl": [a1, a2], "value": [re, im], "phi_inf": [re, im]}.
    #[arg(long, conflicts_with = "ball")]
    samples: Option<PathBuf>,
    /// Use phi = 1 on the chamber ball of this radius with phi_inf = 0.
    #[arg(long)]
    ball: Option<f64>,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    c_u2: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct XcheckArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 2.5)]
    alpha_max: f64,
    /// Per-instance CSV destination.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// JSON form of an invocation: the subcommand, its flags under `params`
/// (snake_case or kebab-case keys) and optional seed/output.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    command: String,
    /// For `solve`: hyperbola, circle, st or bg.
    #[serde(default)]
    system: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
}

fn config_argv(path: &Path) -> Result<Vec<String>, Error> {
    let cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
    let mut argv = vec!["schur-harmonics".to_string(), cfg.command];
    argv.extend(cfg.system);
    if let Some(seed) = cfg.seed {
        argv.extend(["--seed".to_string(), seed.to_string()]);
    }
    if let Some(out) = cfg.output {
        argv.extend(["--output".to_string(), out.display().to_string()]);
    }
    for (key, value) in cfg.params {
        let flag = format!("--{}", key.replace('_', "-"));
        let values = match value {
            Value::Array(items) => items,
            other => vec![other],
        };
        for v in values {
            match v {
                Value::Bool(true) => argv.push(flag.clone()),
                Value::Bool(false) => {}
                Value::String(s) => argv.extend([flag.clone(), s]),
                Value::Number(n) => argv.extend([flag.clone(), n.to_string()]),
                _ => return Err(Error::InvalidInput(format!("unsupported value for '{key}'"))),
            }
        }
    }
    Ok(argv)
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CliResult = Result<(), Failure>;

fn write_json(value: &Value, output: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Writes a table to the file, or to stdout when no file is given.
fn write_table(output: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), Error>) -> CliResult {
    match output {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
        }
        None => f(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn numeric_check(ok: bool, what: &str) -> CliResult {
    if ok {
        Ok(())
    } else {
        Err(Error::Numeric(what.to_string()).into())
    }
}

fn run_norm(a: NormArgs) -> CliResult {
    let psi = MultiplierSymbol::from_json(&fs::read_to_string(&a.symbol)?)?;
    let p = SchattenExponent::new(a.p)?;
    let cfg = SearchConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        rel_tol: a.rel_tol,
        max_dim: a.max_dim,
        ..SearchConfig::with_seed(a.seed)
    };
    let est = match a.cb {
        Some(m) => cb_lower_bound(&psi, p, m, &cfg)?,
        None => ms_norm_lower(&psi, p, &cfg)?,
    };
    let mut out = json!({
        "p": a.p,
        "value": est.value,
        "converged": est.converged,
        "iterations": est.iterations,
        "seed": est.seed,
        "n": psi.n(),
        "amplification": a.cb.unwrap_or(1),
    });
    if a.witness {
        out["witness"] = serde_json::to_value(&est.witness)?;
    }
    write_json(&out, a.output.as_deref())
}

fn run_kak(a: KakArgs) -> CliResult {
    let g: SymplecticElement = serde_json::from_str(&fs::read_to_string(&a.input)?)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let r = kak_decompose(&g)?;
    write_json(&serde_json::to_value(r)?, a.output.as_deref())
}

fn run_solve(s: SolveCommand) -> CliResult {
    let out = match s {
        SolveCommand::Hyperbola { alpha, a, b } => {
            let (beta, gamma) = solve_hyperbola(alpha, a, b)?;
            json!({ "beta": beta, "gamma": gamma })
        }
        SolveCommand::Circle { alpha, r } => {
            let (beta, gamma) = solve_circle(alpha, r)?;
            json!({ "beta": beta, "gamma": gamma })
        }
        SolveCommand::St { beta, gamma } => serde_json::to_value(solve_st(beta, gamma)?)?,
        SolveCommand::Bg { s, t } => serde_json::to_value(solve_bg(s, t)?)?,
    };
    write_json(&out, None)
}

fn pair_of(f: FamilyArg) -> PairTag {
    match f {
        FamilyArg::U2 => PairTag::U2,
        FamilyArg::Su2 => PairTag::SU2,
    }
}

fn run_coeffs(a: CoeffsArgs) -> CliResult {
    let phi = named_function(pair_of(a.family), &a.function)?;
    let spec = match &phi {
        BiInvariantFunction::U2(f) => coefficients_u2(f, a.truncation, Some(DiscQuadrature::for_truncation(a.truncation)))?,
        BiInvariantFunction::SU2(f) => coefficients_su2(f, a.truncation, None)?,
    };
    let exponents: Vec<SchattenExponent> = a.exponents.iter().map(|&p| SchattenExponent::new(p)).collect::<Result<_, _>>()?;
    let bounds: Vec<Value> = exponents
        .iter()
        .map(|&p| Ok(json!({ "p": p.value(), "lp_lower_bound": lp_lower_bound(&spec, p)? })))
        .collect::<Result<_, Error>>()?;
    let mut out = json!({
        "family": format!("{:?}", spec.pair()),
        "function": a.function,
        "truncation": spec.truncation(),
        "bounds": bounds,
    });
    if let Some(order) = a.kernel_order {
        out["kernel"] = serde_json::to_value(kernel_schatten_norm_checked(&phi, &exponents, order)?)?;
    }
    if let Some(path) = a.output.as_deref() {
        write_table(Some(path), |w| spec.write_csv(w))?;
    }
    write_json(&out, None)
}

fn run_holder(a: HolderArgs) -> CliResult {
    let family = match a.family {
        FamilyArg::U2 => Family::U2,
        FamilyArg::Su2 => Family::SU2,
    };
    let report = hoelder_bound_check(family, a.max_degree, a.grid)?;
    if let Some(path) = a.output.as_deref() {
        write_table(Some(path), |w| report.write_csv(w))?;
    }
    write_json(
        &json!({
            "family": family.as_str(),
            "max_degree": report.max_degree,
            "grid": report.grid,
            "empirical_c": report.empirical_c,
            "empirical_c_lipschitz": report.empirical_c_lipschitz,
            "empirical_c_oscillation": report.empirical_c_oscillation,
            "total_violations": report.total_violations,
        }),
        None,
    )
}

fn run_constants(a: ConstantsArgs) -> CliResult {
    let c_u2 = a.c_u2.unwrap_or_else(default_c_u2);
    let rows = constants_table(a.p_min, a.p_max, a.steps, c_u2)?;
    write_table(a.output.as_deref(), |w| write_constants_csv(&rows, w))
}

fn run_certify(a: CertifyArgs) -> CliResult {
    let samples: Vec<DecaySample> = match (&a.samples, a.ball) {
        (Some(path), None) => serde_json::from_str(&fs::read_to_string(path)?)?,
        (None, Some(radius)) => unit_ball_samples(radius, 8, 9)?,
        _ => return Err(Failure::Usage("give exactly one of --samples or --ball".into())),
    };
    let consts = chain_constants(a.p, a.c_u2.unwrap_or_else(default_c_u2))?;
    let cert = norm_certificate(&samples, &consts)?;
    write_json(
        &json!({
            "certificate": cert.value,
            "argmax": cert.argmax,
            "samples": samples.len(),
            "provenance": cert.provenance,
            "c1": consts.c1,
            "c2": consts.c2,
        }),
        a.output.as_deref(),
    )
}

fn run_xcheck(a: XcheckArgs) -> CliResult {
    let fidelity = fidelity_suite(a.count, a.alpha_max, a.seed)?;
    let kak = kak_roundtrip_suite(a.count, a.count / 10, a.alpha_max, a.seed)?;
    if let Some(path) = a.output.as_deref() {
        write_table(Some(path), |w| fidelity.write_csv(w))?;
    }
    write_json(&json!({ "fidelity": fidelity, "kak_roundtrip": kak }), None)?;
    numeric_check(
        fidelity.failures == 0 && fidelity.max_hyperbola_gap <= 1e-6 && fidelity.max_circle_gap <= 1e-6,
        "solver and matrix KAK disagree beyond 1e-6",
    )?;
    numeric_check(
        kak.failures == 0 && kak.max_alpha_error <= 1e-8 && kak.max_residual <= 1e-8,
        "KAK roundtrip beyond 1e-8",
    )
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Norm(a) => run_norm(a),
        Command::Kak(a) => run_kak(a),
        Command::Solve { system } => run_solve(system),
        Command::Coeffs(a) => run_coeffs(a),
        Command::Holder(a) => run_holder(a),
        Command::Constants(a) => run_constants(a),
        Command::Certify(a) => run_certify(a),
        Command::Xcheck(a) => run_xcheck(a),
    }
}

fn report(kind: &str, message: &str) {
    let line = json!({ "kind": kind, "message": message });
    eprintln!("{line}");
}

fn parse(argv: Vec<String>) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                ExitCode::SUCCESS
            }
            _ => {
                report("usage", e.render().to_string().trim());
                ExitCode::from(2)
            }
        }
    })
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        report("usage", &msg);
        return ExitCode::from(2);
    }
    let cli = match parse(std::env::args().collect()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let cli = match (cli.config, cli.command) {
        (Some(path), None) => match config_argv(&path) {
            Ok(argv) => match parse(argv) {
                Ok(c) => c,
                Err(code) => return code,
            },
            Err(e) => {
                report(e.kind(), &e.to_string());
                return ExitCode::from(2);
            }
        },
        (None, Some(cmd)) => Cli {
            config: None,
            command: Some(cmd),
        },
        (Some(_), Some(_)) => {
            report("usage", "--config cannot be combined with a subcommand");
            return ExitCode::from(2);
        }
        (None, None) => {
            report("usage", "a subcommand or --config is required");
            return ExitCode::from(2);
        }
    };
    let Some(cmd) = cli.command else {
        report("usage", "config did not name a subcommand");
        return ExitCode::from(2);
    };
    match dispatch(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            report("usage", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            report(e.kind(), &e.to_string());
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
