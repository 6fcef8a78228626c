//! `ptdil` command-line front end.
//!
//! Every subcommand accepts the same option set so a single `key = value`
//! config file can drive any of them. Options given on the command line win
//! over the config file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bell::{
    alpha_grid, alpha_sweep, bell_classical, bell_local_hermitian, bell_simulation,
    bound_classical_local, bound_simulation, chsh_classical_max, chsh_singlet,
    chsh_singlet_correlations, classify_picture, AliceSetting, BellReport, ClassicalSetting,
    LocalHermitianSetting, Picture, PictureVerdict, SweepPolicy,
};
use crate::dilation::{verify_dilation, DilationResult, VerificationReport};
use crate::error::{Error, Result};
use crate::evolution::{evolution_trace, trace_to_csv, Convention, EvolutionComparison};
use crate::numerics::C64;
use crate::pt_model::{build_model, classify, ModelParams, PtPhase};
use crate::report::{encode_report, to_json, CheckFinite, Format};
use crate::sampling::{
    estimate_bell_local_hermitian, estimate_bell_simulation, factorization_defect,
    sample_classical, EstimatorResult, ShotTable,
};

/// Default output directory when `--output` is absent.
pub const OUTPUT_DIR_ENV: &str = "PTDIL_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "ptdil",
    version,
    about = "Hermitian dilations of PT-symmetric qubits and their Bell pictures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build H, T, Λ, Ω and Ĥ
    #[command(args_override_self = true)]
    Dilate(Opts),
    /// Check the dilation identities numerically
    #[command(args_override_self = true)]
    Verify(Opts),
    /// Compare post-selected and direct evolution over time
    #[command(args_override_self = true)]
    Evolve(Opts),
    /// Bell-operator expectations at one α
    #[command(args_override_self = true)]
    Bell(Opts),
    /// Bell expectations over an α grid
    #[command(args_override_self = true)]
    Scan(Opts),
    /// Finite-shot estimate of a picture's Bell value
    #[command(args_override_self = true)]
    Sample(Opts),
    /// Singlet CHSH value and the local maximum
    #[command(args_override_self = true)]
    Chsh(Opts),
    /// PT phase of H and, with --observed, which picture fits a Bell value
    #[command(args_override_self = true)]
    Classify(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Dilate,
    Verify,
    Evolve,
    Bell,
    Scan,
    Sample,
    Chsh,
    Classify,
}

impl SubcommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            SubcommandKind::Dilate => "dilate",
            SubcommandKind::Verify => "verify",
            SubcommandKind::Evolve => "evolve",
            SubcommandKind::Bell => "bell",
            SubcommandKind::Scan => "scan",
            SubcommandKind::Sample => "sample",
            SubcommandKind::Chsh => "chsh",
            SubcommandKind::Classify => "classify",
        }
    }

    fn default_format(&self) -> Format {
        match self {
            SubcommandKind::Scan | SubcommandKind::Bell | SubcommandKind::Evolve => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Opts {
    /// Read `key = value` defaults from a file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    e0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    s: f64,
    /// Non-Hermiticity angle in radians
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Non-Hermiticity angle in degrees
    #[arg(long, allow_hyphen_values = true)]
    alpha_deg: Option<f64>,

    /// Alice's first amplitude, RE[,IM]
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    /// Alice's second amplitude, RE[,IM]
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Classical-picture probability of λ₊
    #[arg(long, default_value_t = 1.0)]
    p_plus: f64,
    /// Observed Bell value to classify
    #[arg(long, allow_hyphen_values = true)]
    observed: Option<f64>,
    #[arg(long, default_value = "simulation")]
    picture: Picture,
    /// Comma-separated pictures for bell/scan
    #[arg(long, value_delimiter = ',', action = clap::ArgAction::Set)]
    pictures: Option<Vec<Picture>>,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    steps: usize,

    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random states per verification
    #[arg(long, default_value_t = 4)]
    trials: usize,

    #[arg(long)]
    format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Residual tolerance for verify/evolve
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, default_value = "minus")]
    convention: Convention,
    /// Initial state amplitudes, RE[,IM]
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    psi0: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    psi1: String,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 21)]
    t_steps: usize,
}

/// Fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: SubcommandKind,
    pub e0: f64,
    pub s: f64,
    pub alpha: Option<f64>,
    pub alice: AliceSetting,
    pub classical: ClassicalSetting,
    pub local: LocalHermitianSetting,
    pub picture: Picture,
    pub pictures: Vec<Picture>,
    pub grid: (f64, f64, usize),
    pub observed: Option<f64>,
    pub shots: u64,
    pub seed: u64,
    pub trials: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub tolerance: f64,
    pub convention: Convention,
    pub psi: [C64; 2],
    pub times: Vec<f64>,
}

impl RunConfig {
    pub fn model(&self) -> Result<ModelParams> {
        let alpha = self.alpha.ok_or_else(|| {
            Error::Contract(format!(
                "{} needs --alpha or --alpha-deg",
                self.subcommand.name()
            ))
        })?;
        ModelParams::new(self.e0, self.s, alpha)
    }
}

fn parse_complex(text: &str) -> Result<C64> {
    let bad = || {
        Error::Contract(format!(
            "cannot parse complex number '{text}', expected RE[,IM]"
        ))
    };
    let mut parts = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()));
    let re = parts.next().ok_or_else(bad)??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Contract("need at least 2 sample points".into()));
    }
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

impl RunConfig {
    fn resolve(kind: SubcommandKind, o: Opts) -> Result<Self> {
        let alpha = match (o.alpha, o.alpha_deg) {
            (Some(_), Some(_)) => {
                return Err(Error::Contract(
                    "give only one of --alpha and --alpha-deg".into(),
                ))
            }
            (Some(a), None) => Some(a),
            (None, Some(d)) => Some(d.to_radians()),
            (None, None) => None,
        };
        let alice = match (&o.u, &o.v) {
            (None, None) => AliceSetting::balanced(),
            (Some(u), Some(v)) => AliceSetting::from_state([parse_complex(u)?, parse_complex(v)?])?,
            _ => return Err(Error::Contract("--u and --v go together".into())),
        };
        if kind == SubcommandKind::Scan && o.steps < 2 {
            return Err(Error::Contract("--steps must be at least 2".into()));
        }
        let pictures = match o.pictures {
            Some(p) if !p.is_empty() => p,
            _ if kind == SubcommandKind::Scan => Picture::ALL.to_vec(),
            _ => vec![o.picture],
        };
        let alpha_max = o.alpha_max.or(alpha).unwrap_or(0.49 * std::f64::consts::PI);
        if !(o.tol > 0.0) {
            return Err(Error::Contract("--tol must be positive".into()));
        }
        let times = if kind == SubcommandKind::Verify || kind == SubcommandKind::Evolve {
            linspace(0.0, o.t_max, o.t_steps)?
        } else {
            Vec::new()
        };
        Ok(Self {
            subcommand: kind,
            e0: o.e0,
            s: o.s,
            alpha,
            alice,
            classical: ClassicalSetting::new(o.p_plus)?,
            local: LocalHermitianSetting::hadamard_basis(),
            picture: o.picture,
            pictures,
            grid: (o.alpha_min, alpha_max, o.steps),
            observed: o.observed,
            shots: o.shots,
            seed: o.seed,
            trials: o.trials,
            format: o.format.unwrap_or_else(|| kind.default_format()),
            output: o.output,
            tolerance: o.tol,
            convention: o.convention,
            psi: [parse_complex(&o.psi0)?, parse_complex(&o.psi1)?],
            times,
        })
    }
}

/// Rendered output plus an optional failure that should set the exit code
/// after the output has been written.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub failure: Option<Error>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            failure: None,
        }
    }
}

fn key_value_csv(rows: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

impl CheckFinite for EvolutionOutput<'_> {
    fn check_finite(&self) -> Result<()> {
        self.rows.check_finite()
    }
}

#[derive(Serialize)]
struct EvolutionOutput<'a> {
    params: ModelParams,
    convention: Convention,
    psi: [C64; 2],
    rows: &'a [EvolutionComparison],
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    params: ModelParams,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

impl CheckFinite for VerifyOutput<'_> {
    fn check_finite(&self) -> Result<()> {
        self.report.check_finite()
    }
}

#[derive(Serialize)]
struct ChshOutput {
    singlet: f64,
    classical_max: f64,
    a0b0: f64,
    a1b0: f64,
    a0b1: f64,
    a1b1: f64,
}

impl CheckFinite for ChshOutput {
    fn check_finite(&self) -> Result<()> {
        [
            self.singlet,
            self.classical_max,
            self.a0b0,
            self.a1b0,
            self.a0b1,
            self.a1b1,
        ]
        .to_vec()
        .check_finite()
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    params: ModelParams,
    pt_phase: PtPhase,
    eigenvalues: Vec<C64>,
    /// Absent when the eigenvector matrix is singular.
    condition: Option<f64>,
    bound_simulation: f64,
    bound_classical_local: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<PictureVerdict>,
}

impl CheckFinite for ClassifyOutput {
    fn check_finite(&self) -> Result<()> {
        let mut xs = vec![self.bound_simulation, self.bound_classical_local];
        xs.extend(self.eigenvalues.iter().flat_map(|z| [z.re, z.im]));
        xs.extend(self.condition);
        xs.extend(self.observed);
        xs.check_finite()
    }
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    params: ModelParams,
    picture: Picture,
    exact: f64,
    estimate: EstimatorResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<[EstimatorResult; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a ShotTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factorization_defect: Option<f64>,
}

impl CheckFinite for SampleOutput<'_> {
    fn check_finite(&self) -> Result<()> {
        self.exact.check_finite()?;
        self.estimate.check_finite()?;
        if let Some(t) = &self.terms {
            t.as_slice().check_finite()?;
        }
        if let Some(t) = self.table {
            t.check_finite()?;
        }
        self.factorization_defect
            .map_or(Ok(()), |d| d.check_finite())
    }
}

const TERM_NAMES: [&str; 4] = ["b0a0", "b1a0", "b0a1", "b1a1"];

fn estimator_rows(terms: &[(&str, EstimatorResult)]) -> String {
    let mut out = String::from("term,mean,stderr,shots,seed,degenerate\n");
    for (name, e) in terms {
        out.push_str(&format!(
            "{name},{},{},{},{},{}\n",
            e.mean, e.stderr, e.shots, e.seed, e.degenerate
        ));
    }
    out
}

fn bell_row(p: &ModelParams, picture: Picture, cfg: &RunConfig) -> Result<BellReport> {
    match picture {
        Picture::Simulation => bell_simulation(&DilationResult::from_model(p)?, &cfg.alice),
        Picture::Classical => bell_classical(p, &cfg.classical),
        Picture::LocalHermitian => bell_local_hermitian(p, &cfg.alice, &cfg.local),
    }
}

/// Execute the subcommand and render its output without touching the
/// filesystem.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let fmt = cfg.format;
    match cfg.subcommand {
        SubcommandKind::Dilate => {
            let d = DilationResult::from_model(&cfg.model()?)?;
            Ok(Outcome::ok(encode_report(&d, fmt)?))
        }
        SubcommandKind::Verify => {
            let params = cfg.model()?;
            let d = DilationResult::from_model(&params)?;
            let residuals = verify_dilation(&d, cfg.trials, &cfg.times, cfg.seed)?;
            let report = VerificationReport::from_residuals(residuals, cfg.tolerance);
            let body = match fmt {
                Format::Json => to_json(&VerifyOutput {
                    params,
                    report: &report,
                })?,
                Format::Csv => {
                    report.check_finite()?;
                    let mut rows: Vec<(&str, String)> = report
                        .residuals
                        .iter()
                        .map(|(k, v)| (k.as_str(), v.to_string()))
                        .collect();
                    rows.push(("tolerance", report.tolerance.to_string()));
                    rows.push(("passed", report.passed.to_string()));
                    key_value_csv(&rows)
                }
            };
            let failure = (!report.passed).then(|| {
                Error::Verification(format!(
                    "residuals above {}: {}",
                    report.tolerance,
                    report.failing().join(", ")
                ))
            });
            Ok(Outcome { body, failure })
        }
        SubcommandKind::Evolve => {
            let params = cfg.model()?;
            let d = DilationResult::from_model(&params)?;
            let rows = evolution_trace(&d, &cfg.psi, &cfg.times, cfg.convention)?;
            let body = match fmt {
                Format::Csv => {
                    rows.check_finite()?;
                    trace_to_csv(&rows)
                }
                Format::Json => to_json(&EvolutionOutput {
                    params,
                    convention: cfg.convention,
                    psi: cfg.psi,
                    rows: &rows,
                })?,
            };
            let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
            let failure = (!(worst < cfg.tolerance)).then(|| {
                Error::Verification(format!(
                    "evolution deviation {worst:e} exceeds {}",
                    cfg.tolerance
                ))
            });
            Ok(Outcome { body, failure })
        }
        SubcommandKind::Bell => {
            let p = cfg.model()?;
            let rows = cfg
                .pictures
                .iter()
                .map(|&pic| bell_row(&p, pic, cfg))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome::ok(encode_report(&rows, fmt)?))
        }
        SubcommandKind::Scan => {
            let (lo, hi, steps) = cfg.grid;
            let grid = alpha_grid(cfg.e0, cfg.s, lo, hi, steps)?;
            let policy = SweepPolicy {
                alice: cfg.alice,
                classical: cfg.classical,
                local: cfg.local,
            };
            let rows = alpha_sweep(&grid, &cfg.pictures, &policy)?;
            Ok(Outcome::ok(encode_report(&rows, fmt)?))
        }
        SubcommandKind::Sample => execute_sample(cfg),
        SubcommandKind::Chsh => {
            let [a0b0, a1b0, a0b1, a1b1] = chsh_singlet_correlations();
            let out = ChshOutput {
                singlet: chsh_singlet(),
                classical_max: chsh_classical_max(),
                a0b0,
                a1b0,
                a0b1,
                a1b1,
            };
            let body = match fmt {
                Format::Json => to_json(&out)?,
                Format::Csv => key_value_csv(&[
                    ("singlet", out.singlet.to_string()),
                    ("classical_max", out.classical_max.to_string()),
                    ("a0b0", a0b0.to_string()),
                    ("a1b0", a1b0.to_string()),
                    ("a0b1", a0b1.to_string()),
                    ("a1b1", a1b1.to_string()),
                ]),
            };
            Ok(Outcome::ok(body))
        }
        SubcommandKind::Classify => {
            let params = cfg.model()?;
            let cls = classify(&build_model(&params))?;
            let out = ClassifyOutput {
                params,
                pt_phase: cls.kind,
                eigenvalues: cls.eigenvalues,
                condition: cls.evidence.is_finite().then_some(cls.evidence),
                bound_simulation: bound_simulation(&params),
                bound_classical_local: bound_classical_local(&params),
                observed: cfg.observed,
                verdict: cfg.observed.map(|x| classify_picture(x, &params)),
            };
            let body = match fmt {
                Format::Json => to_json(&out)?,
                Format::Csv => {
                    out.check_finite()?;
                    let mut rows = vec![
                        (
                            "pt_phase",
                            serde_json::to_value(out.pt_phase)?
                                .as_str()
                                .unwrap_or_default()
                                .to_string(),
                        ),
                        ("bound_simulation", out.bound_simulation.to_string()),
                        (
                            "bound_classical_local",
                            out.bound_classical_local.to_string(),
                        ),
                    ];
                    if let (Some(x), Some(v)) = (out.observed, out.verdict) {
                        rows.push(("observed", x.to_string()));
                        rows.push((
                            "verdict",
                            serde_json::to_value(v)?
                                .as_str()
                                .unwrap_or_default()
                                .to_string(),
                        ));
                    }
                    key_value_csv(&rows)
                }
            };
            Ok(Outcome::ok(body))
        }
    }
}

fn execute_sample(cfg: &RunConfig) -> Result<Outcome> {
    let params = cfg.model()?;
    let fmt = cfg.format;
    let body = match cfg.picture {
        Picture::Classical => {
            let s = sample_classical(&params, &cfg.classical, cfg.shots, cfg.seed)?;
            let defect = factorization_defect(&s.table)?;
            let exact = bell_classical(&params, &cfg.classical)?.bell_value;
            match fmt {
                Format::Csv => {
                    s.table.check_finite()?;
                    s.table.to_csv()
                }
                Format::Json => to_json(&SampleOutput {
                    params,
                    picture: Picture::Classical,
                    exact,
                    estimate: s.bell,
                    terms: None,
                    table: Some(&s.table),
                    factorization_defect: Some(defect),
                })?,
            }
        }
        pic => {
            let (est, exact) = if pic == Picture::Simulation {
                let d = DilationResult::from_model(&params)?;
                (
                    estimate_bell_simulation(&d, &cfg.alice, cfg.shots, cfg.seed)?,
                    bell_simulation(&d, &cfg.alice)?.bell_value,
                )
            } else {
                (
                    estimate_bell_local_hermitian(
                        &params, &cfg.local, &cfg.alice, cfg.shots, cfg.seed,
                    )?,
                    bell_local_hermitian(&params, &cfg.alice, &cfg.local)?.bell_value,
                )
            };
            match fmt {
                Format::Csv => {
                    est.check_finite()?;
                    let mut rows: Vec<(&str, EstimatorResult)> =
                        TERM_NAMES.iter().copied().zip(est.terms).collect();
                    rows.push(("bell", est.bell));
                    estimator_rows(&rows)
                }
                Format::Json => to_json(&SampleOutput {
                    params,
                    picture: pic,
                    exact,
                    estimate: est.bell,
                    terms: Some(est.terms),
                    table: None,
                    factorization_defect: None,
                })?,
            }
        }
    };
    Ok(Outcome::ok(body))
}

/// Where the rendered output goes.
fn destination(cfg: &RunConfig, output_dir: Option<&Path>) -> Option<PathBuf> {
    cfg.output.clone().or_else(|| {
        output_dir.map(|dir| {
            dir.join(format!(
                "{}.{}",
                cfg.subcommand.name(),
                cfg.format.extension()
            ))
        })
    })
}

fn emit(body: &str, dest: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, body)?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Execute, write the output, and map the result to an exit status.
pub fn run(
    cfg: &RunConfig,
    output_dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let result = execute(cfg).and_then(|outcome| {
        emit(
            &outcome.body,
            destination(cfg, output_dir).as_deref(),
            stdout,
        )?;
        outcome.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "ptdil: {e}");
            e.exit_code()
        }
    }
}

/// Turn config-file lines into `--key value` pairs.
fn config_tokens(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Contract(format!("config line {}: expected key = value", n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Contract(format!("config line {}: bad key", n + 1)));
        }
        out.push(format!("--{key}").into());
        out.push(value.trim().into());
    }
    Ok(out)
}

/// Pull `--config FILE` out of argv and splice the file's settings in right
/// after the subcommand, so later command-line flags override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            config =
                Some(PathBuf::from(it.next().ok_or_else(|| {
                    Error::Contract("--config needs a file".into())
                })?));
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let tokens = config_tokens(&fs::read_to_string(&path)?)?;
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|k| k + 2)
        .unwrap_or(rest.len());
    let tail = rest.split_off(sub.min(rest.len()));
    rest.extend(tokens);
    rest.extend(tail);
    Ok(rest)
}

fn parse_config(args: Vec<OsString>) -> std::result::Result<RunConfig, ParseFailure> {
    let args = expand_config(args).map_err(ParseFailure::Run)?;
    let cli = Cli::try_parse_from(args).map_err(ParseFailure::Clap)?;
    let (kind, opts) = match cli.command {
        Command::Dilate(o) => (SubcommandKind::Dilate, o),
        Command::Verify(o) => (SubcommandKind::Verify, o),
        Command::Evolve(o) => (SubcommandKind::Evolve, o),
        Command::Bell(o) => (SubcommandKind::Bell, o),
        Command::Scan(o) => (SubcommandKind::Scan, o),
        Command::Sample(o) => (SubcommandKind::Sample, o),
        Command::Chsh(o) => (SubcommandKind::Chsh, o),
        Command::Classify(o) => (SubcommandKind::Classify, o),
    };
    RunConfig::resolve(kind, opts).map_err(ParseFailure::Run)
}

enum ParseFailure {
    Clap(clap::Error),
    Run(Error),
}

/// Parse argv (including the program name) and run.
pub fn main_with_args<I, T>(
    args: I,
    output_dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match parse_config(args.into_iter().map(Into::into).collect()) {
        Ok(cfg) => run(&cfg, output_dir, stdout, stderr),
        Err(ParseFailure::Clap(e)) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            }
        }
        Err(ParseFailure::Run(e)) => {
            let _ = writeln!(stderr, "ptdil: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ptdil").chain(args.iter().copied());
        let code = main_with_args(argv, None, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1, 2").unwrap(), C64::new(-1.0, 2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn linspace_is_inclusive() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn config_lines() {
        let t = config_tokens("# comment\nalpha = 0.5\n\np_plus=0.3 # trailing\n").unwrap();
        let t: Vec<String> = t.into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(t, ["--alpha", "0.5", "--p-plus", "0.3"]);
        assert!(config_tokens("alpha 0.5").is_err());
    }

    #[test]
    fn dilate_example() {
        let (code, out, _) = run_args(&[
            "dilate",
            "--e0",
            "0",
            "--s",
            "1",
            "--alpha",
            "0.5235988",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0);
        let d: DilationResult = serde_json::from_str(&out).unwrap();
        assert!((d.lambda[(0, 1)].re - 0.75).abs() < 1e-6);
        assert!(d.lambda[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn exceptional_point_exit_code() {
        let (code, _, err) = run_args(&["verify", "--e0", "0", "--s", "1", "--alpha", "1.5707963"]);
        assert_eq!(code, 4, "{err}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["bell", "--alpha", "abc"]).0, 2);
        assert_eq!(run_args(&["bell"]).0, 2);
        assert_eq!(run_args(&["bell", "--alpha", "0.1", "--s", "0"]).0, 2);
        assert_eq!(run_args(&["scan", "--steps", "1"]).0, 2);
        assert_eq!(
            run_args(&["bell", "--alpha", "0.1", "--alpha-deg", "4"]).0,
            2
        );
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn negative_values_parse() {
        let (code, out, err) = run_args(&[
            "bell", "--alpha", "-0.3", "--e0", "-1", "--u", "-1,0.5", "--v", "0.2",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("-0.3,-1,1,simulation,"));
    }

    #[test]
    fn scan_rows_are_alpha_major() {
        let (code, out, _) = run_args(&[
            "scan",
            "--alpha-max",
            "1",
            "--steps",
            "3",
            "--pictures",
            "classical,simulation",
        ]);
        assert_eq!(code, 0);
        let pics: Vec<&str> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(3).unwrap())
            .collect();
        assert_eq!(pics, ["classical", "simulation"].repeat(3));
    }
}
