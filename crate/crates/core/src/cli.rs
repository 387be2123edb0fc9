//! The `qdarwin` command line: reads a TOML scenario, runs one experiment
//! and writes a CSV table with `#` metadata lines.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 a request
//! beyond what the exact methods can handle, 4 numerical failure.

use std::ffi::OsString;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chernoff::{
    bloch_mesh, continuous_fragment_size, decoherence_time, mean_record_deficit, onset_time,
    receptivity, redundancy_corrected, redundancy_discretized, redundancy_gaussian,
    redundancy_qcb, MixednessFactor,
};
use crate::dynamics::{insensitive_axis, log_decoherence_sq};
use crate::ensembles::{band_redundancy, band_redundancy_asymptote, BandSpec};
use crate::error::Error;
use crate::holevo::{redundancy_exact, Averaging, FragmentSearch};
use crate::model::{realize_environment, validate, EnvironmentSpec, Scenario, SpinSpec, SystemSpec, TimeGrid};
use crate::qmath::{pairwise_mean, DenseCap};

#[derive(Debug, Parser)]
#[command(name = "qdarwin", version, about = "Redundancy of records in a central-spin environment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML scenario file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides `environment.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `holevo.samples`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides `delta`.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Overrides `dense_cap`, in qubits.
    #[arg(long = "dense-cap", global = true)]
    pub dense_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the scenario and summarize the realized environment.
    Validate,
    /// Chernoff-based redundancy estimates on the time grid.
    Qcb,
    /// Exact redundancy from fragment-averaged Holevo quantities.
    Holevo,
    /// Quadratic growth for Gaussian-scaled couplings.
    Gaussian,
    /// Coupling-band average and its oscillation.
    Band,
    /// Chernoff information over initial spin directions.
    BlochMesh,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Qcb => "qcb",
            Command::Holevo => "holevo",
            Command::Gaussian => "gaussian",
            Command::Band => "band",
            Command::BlochMesh => "bloch-mesh",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolevoSampling {
    Enumerate,
    #[default]
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolevoConfig {
    #[serde(default)]
    pub mode: HolevoSampling,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Fragment-sampling seed; defaults to the environment seed.
    pub seed: Option<u64>,
}

fn default_samples() -> usize {
    10_000
}

impl Default for HolevoConfig {
    fn default() -> Self {
        HolevoConfig {
            mode: HolevoSampling::default(),
            samples: default_samples(),
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub width: f64,
    /// Mixedness; give this or `a`.
    pub lambda: Option<f64>,
    /// Bloch length, converted to `lambda`.
    pub a: Option<f64>,
    #[serde(default = "half_pi")]
    pub theta: f64,
    /// Number of spins for the analytic columns; defaults to the environment size.
    pub count: Option<usize>,
    /// Also run the exact Holevo search on the realized environment.
    #[serde(default)]
    pub exact: bool,
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub g: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "one")]
    pub a: f64,
    pub t: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
}

fn one() -> f64 {
    1.0
}

fn default_n_theta() -> usize {
    61
}

fn default_n_phi() -> usize {
    121
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    /// Also run the exact Holevo search at every time point.
    #[serde(default)]
    pub exact: bool,
}

/// Everything a config file may contain. Scenario sections are optional at
/// parse time; each command asks for the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub delta: Option<f64>,
    pub times: Option<TimeGrid>,
    pub system: Option<SystemSpec>,
    pub environment: Option<EnvironmentSpec>,
    pub dense_cap: Option<usize>,
    #[serde(default)]
    pub holevo: HolevoConfig,
    pub band: Option<BandConfig>,
    pub mesh: Option<MeshConfig>,
    #[serde(default)]
    pub gaussian: GaussianConfig,
}

/// A failure with the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::TooLarge { .. }
            | Error::TooManySubsets { .. }
            | Error::MixedEnvironment(..)
            | Error::MixedSystem(_) => 3,
            Error::NotHermitian(_)
            | Error::NotPsd(_)
            | Error::BadExponent(_)
            | Error::DimMismatch(..)
            | Error::Numerical(_) => 4,
            _ => 2,
        };
        let mut message = e.to_string();
        if code == 3 {
            message.push_str("; the `qcb` command gives the Chernoff estimate at any size");
        }
        CliError { code, message }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A CSV table with metadata comments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

/// 17 significant digits, so values survive a text round trip.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl OutputTable {
    fn new(header: &[&str]) -> Self {
        OutputTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_float(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// ISO-8601 stamp; honours `SOURCE_DATE_EPOCH` so reruns can be byte-identical.
fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// The parsed config plus command-line overrides.
struct Resolved {
    cfg: RunConfig,
    config_path: PathBuf,
    config_hash: String,
    cap: DenseCap,
    overrides: Vec<String>,
}

impl Resolved {
    fn load(cli: &Cli) -> CliResult<Self> {
        let path = cli
            .config
            .clone()
            .ok_or_else(|| CliError::config("--config PATH is required"))?;
        let bytes = std::fs::read(&path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::config(format!("config {} is not UTF-8", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("cannot parse config {}: {e}", path.display())))?;

        let mut overrides = Vec::new();
        if let Some(seed) = cli.seed {
            if let Some(env) = cfg.environment.as_mut() {
                env.seed = seed;
            }
            overrides.push(format!("--seed {seed}"));
        }
        if let Some(d) = cli.delta {
            cfg.delta = Some(d);
            overrides.push(format!("--delta {d}"));
        }
        if let Some(n) = cli.samples {
            cfg.holevo.samples = n;
            overrides.push(format!("--samples {n}"));
        }
        if let Some(c) = cli.dense_cap {
            cfg.dense_cap = Some(c);
            overrides.push(format!("--dense-cap {c}"));
        }
        let cap = match cfg.dense_cap {
            Some(c) => DenseCap::new(c).map_err(|_| {
                CliError::config(format!(
                    "dense_cap: must lie in [1, {}], got {c}",
                    crate::qmath::DENSE_CAP_MAX
                ))
            })?,
            None => DenseCap::default(),
        };
        Ok(Resolved {
            cfg,
            config_path: path,
            config_hash: hex::encode(Sha256::digest(text.as_bytes())),
            cap,
            overrides,
        })
    }

    /// The full scenario, validated.
    fn scenario(&self) -> CliResult<Scenario> {
        let mut missing = Vec::new();
        if self.cfg.system.is_none() {
            missing.push("system: section is required".to_string());
        }
        if self.cfg.environment.is_none() {
            missing.push("environment: section is required".to_string());
        }
        if self.cfg.times.is_none() {
            missing.push("times: required".to_string());
        }
        if self.cfg.delta.is_none() {
            missing.push("delta: required".to_string());
        }
        if !missing.is_empty() {
            return Err(Error::Validation(missing).into());
        }
        let sc = Scenario {
            system: self.cfg.system.expect("checked"),
            environment: self.cfg.environment.clone().expect("checked"),
            times: self.cfg.times.clone().expect("checked"),
            delta: self.cfg.delta.expect("checked"),
        };
        validate(&sc)?;
        Ok(sc)
    }

    fn averaging(&self, env_seed: u64) -> CliResult<Averaging> {
        let h = &self.cfg.holevo;
        Ok(match h.mode {
            HolevoSampling::Enumerate => Averaging::Enumerate,
            HolevoSampling::MonteCarlo => {
                if h.samples == 0 {
                    return Err(CliError::config("holevo.samples: must be at least 1"));
                }
                Averaging::MonteCarlo {
                    samples: h.samples,
                    seed: h.seed.unwrap_or(env_seed),
                }
            }
        })
    }

    fn table(&self, command: Command, header: &[&str]) -> OutputTable {
        let mut t = OutputTable::new(header);
        t.meta("tool", format!("qdarwin {}", env!("CARGO_PKG_VERSION")));
        t.meta("command", command.name());
        t.meta("config", self.config_path.display());
        t.meta("config_sha256", &self.config_hash);
        if let Some(env) = &self.cfg.environment {
            t.meta("seed", env.seed);
        }
        if !self.overrides.is_empty() {
            t.meta("overrides", self.overrides.join(" "));
        }
        t.meta("timestamp", timestamp());
        t
    }
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn cmd_validate(r: &Resolved) -> CliResult<String> {
    let sc = r.scenario()?;
    let env = realize_environment(&sc.environment)?;
    let n = env.len() as f64;
    let mut out = String::new();
    let _ = writeln!(out, "# qdarwin {} validate", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# config_sha256: {}", r.config_hash);
    out.push_str("# resolved scenario\n");
    let resolved = toml::to_string(&sc).map_err(|e| CliError::config(e.to_string()))?;
    out.push_str(&resolved);
    out.push_str("\n# realized environment\n");
    let g2: Vec<f64> = env.iter().map(|s| s.g * s.g).collect();
    let _ = writeln!(out, "spins = {}", env.len());
    let _ = writeln!(out, "mean_g2 = {}", format_float(pairwise_mean(&g2)));
    let _ = writeln!(out, "mean_G2 = {}", format_float(n * pairwise_mean(&g2)));
    let _ = writeln!(out, "mean_lambda = {}", format_float(receptivity(&env)?));
    match decoherence_time(&env) {
        Ok(tau) => {
            let _ = writeln!(out, "tau_d = {}", format_float(tau));
            if tau.is_finite() {
                let _ = writeln!(out, "onset_time = {}", format_float(onset_time(tau, sc.delta)?));
            }
        }
        Err(Error::FieldPresent(_)) => {
            let _ = writeln!(out, "# tau_d not reported: transverse fields present");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

fn cmd_qcb(r: &Resolved) -> CliResult<String> {
    let sc = r.scenario()?;
    let env = realize_environment(&sc.environment)?;
    let n = env.len();
    let mut table = r.table(
        Command::Qcb,
        &["t", "xi_bar_nats", "r_qcb", "r_corrected", "r_discretized", "f_delta_continuous"],
    );
    for t in sc.times.points() {
        let xi = -(-mean_record_deficit(&env, t)?).ln_1p();
        let qcb = redundancy_qcb(xi, n, sc.delta)?;
        let corrected = redundancy_corrected(xi, n, sc.delta, &sc.system)?;
        let discretized = match redundancy_discretized(&env, t, sc.delta) {
            Ok(d) => d.r_delta,
            Err(Error::ZeroInformation) => 0.0,
            Err(e) => return Err(e.into()),
        };
        let f_c = continuous_fragment_size(&env, t, sc.delta)?;
        table.push(vec![
            num(t),
            num(xi),
            num(qcb.r_delta),
            num(corrected.r_delta),
            num(discretized),
            num(f_c),
        ]);
    }
    Ok(table.to_csv())
}

fn cmd_holevo(r: &Resolved) -> CliResult<String> {
    let sc = r.scenario()?;
    let env = realize_environment(&sc.environment)?;
    let how = r.averaging(sc.environment.seed)?;
    let mut table = r.table(
        Command::Holevo,
        &["t", "f_delta", "r_exact", "chi_at_f", "stderr", "mode"],
    );
    if let Averaging::MonteCarlo { samples, seed } = how {
        table.meta("fragment_sampling", format!("monte_carlo samples={samples} seed={seed}"));
    } else {
        table.meta("fragment_sampling", "enumerate");
    }
    for t in sc.times.points() {
        let (res, search) = redundancy_exact(&sc.system, &env, t, sc.delta, how, r.cap)?;
        let est = search.estimate();
        let f = match search {
            FragmentSearch::Reached { f_delta, .. } => f_delta as f64,
            FragmentSearch::NotReached { .. } => f64::INFINITY,
        };
        table.push(vec![
            num(t),
            num(f),
            num(res.r_delta),
            num(est.mean_chi),
            num(est.stderr),
            Cell::Text(est.mode.as_str().into()),
        ]);
    }
    Ok(table.to_csv())
}

fn cmd_gaussian(r: &Resolved) -> CliResult<String> {
    let sc = r.scenario()?;
    let env = realize_environment(&sc.environment)?;
    let n = env.len();
    let tau = decoherence_time(&env)?;
    let alpha = receptivity(&env)?;
    let how = r.averaging(sc.environment.seed)?;
    let mut table = r.table(
        Command::Gaussian,
        &["t", "r_qcb", "r_quadratic", "r_exact", "decoherence_factor", "onset"],
    );
    table.meta("tau_d", format_float(tau));
    table.meta("alpha", format_float(alpha));
    let mut times: Vec<(f64, bool)> = sc.times.points().into_iter().map(|t| (t, false)).collect();
    if tau.is_finite() {
        let t_star = onset_time(tau, sc.delta)?;
        table.meta("onset_time", format_float(t_star));
        times.push((t_star, true));
        times.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    for (t, onset) in times {
        let xi = -(-mean_record_deficit(&env, t)?).ln_1p();
        let qcb = redundancy_qcb(xi, n, sc.delta)?.r_delta;
        let quad = if tau.is_finite() {
            redundancy_gaussian(alpha, tau, t, sc.delta)?
        } else {
            0.0
        };
        let exact = if r.cfg.gaussian.exact {
            redundancy_exact(&sc.system, &env, t, sc.delta, how, r.cap)?.0.r_delta
        } else {
            f64::NAN
        };
        let gamma_sq = log_decoherence_sq(&env, t).iter().sum::<f64>().exp();
        table.push(vec![
            num(t),
            num(qcb),
            num(quad),
            num(exact),
            num(gamma_sq),
            Cell::Int(onset as u64),
        ]);
    }
    Ok(table.to_csv())
}

fn cmd_band(r: &Resolved) -> CliResult<String> {
    let bc = r
        .cfg
        .band
        .as_ref()
        .ok_or_else(|| CliError::from(Error::Validation(vec!["band: section is required".into()])))?;
    let lambda = match (bc.lambda, bc.a) {
        (Some(l), None) => l,
        (None, Some(a)) if (0.0..=1.0).contains(&a) => MixednessFactor::from_bloch_length(a).value(),
        (None, Some(a)) => {
            return Err(Error::Validation(vec![format!("band.a: must lie in [0, 1], got {a}")]).into())
        }
        _ => {
            return Err(Error::Validation(vec!["band: give exactly one of lambda and a".into()]).into())
        }
    };
    let band = BandSpec::new(bc.width, lambda, bc.theta)?;
    let delta = r
        .cfg
        .delta
        .ok_or_else(|| CliError::from(Error::Validation(vec!["delta: required".into()])))?;
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Validation(vec![format!("delta: must lie in (0, 1/2], got {delta}")]).into());
    }
    let times = r
        .cfg
        .times
        .as_ref()
        .ok_or_else(|| CliError::from(Error::Validation(vec!["times: required".into()])))?
        .points();

    // the realized environment drives the discretized and exact columns
    let realized = match &r.cfg.environment {
        Some(_) => {
            let sc = r.scenario()?;
            Some((realize_environment(&sc.environment)?, sc))
        }
        None => None,
    };
    let n = match (bc.count, &realized) {
        (Some(c), _) => c,
        (None, Some((env, _))) => env.len(),
        (None, None) => {
            return Err(Error::Validation(vec![
                "band.count: required when no environment section is given".into(),
            ])
            .into())
        }
    };
    if n == 0 {
        return Err(Error::Validation(vec!["band.count: must be at least 1".into()]).into());
    }
    if bc.exact && realized.is_none() {
        return Err(Error::Validation(vec!["band.exact: needs an environment section".into()]).into());
    }

    let mut table = r.table(
        Command::Band,
        &["t", "r_band_analytic", "r_gaussian_smalltime", "r_asymptote", "r_discretized", "r_exact"],
    );
    let asymptote = band_redundancy_asymptote(&band, n, delta)?;
    let rate_sq = band.decoherence_rate_sq() * n as f64;
    for t in times {
        let analytic = band_redundancy(&band, n, t, delta)?.r_delta;
        let small = if rate_sq > 0.0 {
            redundancy_gaussian(lambda, 1.0 / rate_sq.sqrt(), t, delta)?
        } else {
            0.0
        };
        let (disc, exact) = match &realized {
            Some((env, sc)) => {
                let disc = match redundancy_discretized(env, t, delta) {
                    Ok(d) => d.r_delta,
                    Err(Error::ZeroInformation) => 0.0,
                    Err(e) => return Err(e.into()),
                };
                let exact = if bc.exact {
                    let how = r.averaging(sc.environment.seed)?;
                    redundancy_exact(&sc.system, env, t, delta, how, r.cap)?.0.r_delta
                } else {
                    f64::NAN
                };
                (disc, exact)
            }
            None => (f64::NAN, f64::NAN),
        };
        table.push(vec![num(t), num(analytic), num(small), num(asymptote), num(disc), num(exact)]);
    }
    Ok(table.to_csv())
}

fn cmd_bloch_mesh(r: &Resolved) -> CliResult<String> {
    let m = r
        .cfg
        .mesh
        .as_ref()
        .ok_or_else(|| CliError::from(Error::Validation(vec!["mesh: section is required".into()])))?;
    let mut errs = Vec::new();
    if !m.g.is_finite() {
        errs.push("mesh.g: not finite".to_string());
    }
    if !m.omega.is_finite() {
        errs.push("mesh.omega: not finite".to_string());
    }
    if !(0.0..=1.0).contains(&m.a) {
        errs.push(format!("mesh.a: must lie in [0, 1], got {}", m.a));
    }
    if !(m.t.is_finite() && m.t >= 0.0) {
        errs.push(format!("mesh.t: must be finite and nonnegative, got {}", m.t));
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs).into());
    }
    let template = SpinSpec::from_bloch(m.g, m.omega, 1.0, 0.0, 0.0)?;
    let axis = insensitive_axis(&template, m.t);
    let mesh = bloch_mesh(&template, m.t, m.a, (m.n_theta, m.n_phi))?;
    let mut table = r.table(Command::BlochMesh, &["theta", "phi", "xi"]);
    table.meta(
        "insensitive_axis",
        format!(
            "theta_star={} phi_star={}",
            format_float(axis.theta_star),
            format_float(axis.phi_star)
        ),
    );
    for p in mesh {
        table.push(vec![num(p.theta), num(p.phi), num(p.xi)]);
    }
    Ok(table.to_csv())
}

/// Runs a parsed command line and returns what it would write.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let r = Resolved::load(cli)?;
    match cli.command {
        Command::Validate => cmd_validate(&r),
        Command::Qcb => cmd_qcb(&r),
        Command::Holevo => cmd_holevo(&r),
        Command::Gaussian => cmd_gaussian(&r),
        Command::Band => cmd_band(&r),
        Command::BlochMesh => cmd_bloch_mesh(&r),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // a second call in the same process keeps the first pool; harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli).and_then(|text| write_output(cli.out.as_deref(), &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
