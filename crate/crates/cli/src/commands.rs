use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use purify_core::analytics::{speedup_bounds, speedup_ratio_qubit, DecaySource, Oracle, QubitInitialState};
use purify_core::ensemble::{run_ensemble, run_ensemble_with_workers, EnsembleSummary};
use purify_core::sme::{uniform_grid, System};
use purify_core::verify::{run_verification, IdentityCheck, VerifyOptions};

use crate::config::{ExperimentConfig, StrengthConvention};
use crate::csv;
use crate::error::{CliError, CliResult};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "PURIFY_WORKERS";

/// Worker count from the flag, else from the environment, else rayon's
/// default.
pub fn resolve_workers(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Some(w) = flag {
        if w == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        return Ok(Some(w));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(Some(w)),
            _ => Err(CliError::usage(format!(
                "{WORKERS_ENV} must be an integer >= 1, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn run_config(config: &ExperimentConfig, workers: Option<usize>) -> CliResult<EnsembleSummary> {
    let sim = config.sim_config()?;
    let strategy = config.strategy()?;
    let summary = match workers {
        Some(w) => run_ensemble_with_workers(&sim, &strategy, w)?,
        None => run_ensemble(&sim, &strategy)?,
    };
    Ok(summary)
}

pub fn simulate(config_path: &Path, output: Option<&Path>, workers: Option<usize>) -> CliResult<()> {
    let config = ExperimentConfig::load(config_path)?;
    let summary = run_config(&config, workers)?;
    let target: Option<PathBuf> = output.map(Path::to_path_buf).or(config.output.path.clone());
    let mut out = open_output(target.as_deref())?;
    csv::write_summary(&mut out, &summary)?;
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleKind {
    BareQubit,
    BareQudit,
    Jk,
    BareRegister,
    QubitAsymptote,
    QuditAsymptote,
    RegisterBareAsymptote,
    FbQubit,
    FbQuditLower,
    FbRegisterLower,
    Bounds,
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as clap::ValueEnum>::from_str(s, false)
    }
}

/// Parameters shared by every oracle kind.
#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct OracleParams {
    /// Qudit dimension D.
    #[arg(long)]
    pub dimension: Option<usize>,
    /// Register size n (D = 2^n).
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Measurement strength, read in the unit chosen by --convention.
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
    /// gamma or kappa (gamma = 4 kappa). Qudit oracles use gamma, register
    /// oracles kappa.
    #[arg(long, default_value = "gamma", value_parser = parse_convention)]
    pub convention: StrengthConvention,
    /// Initial impurity for feedback curves (default: maximally mixed).
    #[arg(long)]
    pub l0: Option<f64>,
    /// Initial Bloch vector for `jk`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub z0: f64,
}

fn parse_convention(s: &str) -> Result<StrengthConvention, String> {
    match s {
        "gamma" => Ok(StrengthConvention::Gamma),
        "kappa" => Ok(StrengthConvention::Kappa),
        other => Err(format!("unknown convention `{other}` (gamma or kappa)")),
    }
}

impl OracleParams {
    fn gamma(&self) -> f64 {
        self.convention.convert(self.strength, StrengthConvention::Gamma)
    }

    fn kappa(&self) -> f64 {
        self.convention.convert(self.strength, StrengthConvention::Kappa)
    }

    fn dim(&self) -> CliResult<usize> {
        self.dimension
            .ok_or_else(|| CliError::usage("this oracle needs --dimension"))
    }

    fn register(&self) -> CliResult<usize> {
        self.qubits
            .ok_or_else(|| CliError::usage("this oracle needs --qubits"))
    }

    pub fn oracle(&self, kind: OracleKind) -> CliResult<Oracle> {
        let mixed = |d: usize| 1.0 - 1.0 / d as f64;
        Ok(match kind {
            OracleKind::BareQubit => Oracle::BareQubit { strength: self.gamma() },
            OracleKind::BareQudit => Oracle::BareQudit {
                dim: self.dim()?,
                strength: self.gamma(),
            },
            OracleKind::Jk => Oracle::JordanKorotkov {
                initial: QubitInitialState::new(self.x0, self.y0, self.z0)?,
                strength: self.gamma(),
            },
            OracleKind::BareRegister => Oracle::BareRegister {
                qubits: self.register()?,
                kappa: self.kappa(),
            },
            OracleKind::QubitAsymptote => Oracle::QubitAsymptote { strength: self.gamma() },
            OracleKind::QuditAsymptote => Oracle::QuditAsymptote {
                dim: self.dim()?,
                strength: self.gamma(),
            },
            OracleKind::RegisterBareAsymptote => Oracle::RegisterAsymptote {
                qubits: self.register()?,
                kappa: self.kappa(),
            },
            OracleKind::FbQubit => Oracle::FeedbackQubit {
                l0: self.l0.unwrap_or(0.5),
                strength: self.gamma(),
            },
            OracleKind::FbQuditLower => {
                let dim = self.dim()?;
                Oracle::FeedbackQuditLower {
                    dim,
                    l0: self.l0.unwrap_or(mixed(dim)),
                    strength: self.gamma(),
                }
            }
            OracleKind::FbRegisterLower => {
                let qubits = self.register()?;
                if qubits == 0 || qubits >= usize::BITS as usize {
                    return Err(CliError::usage(format!("--qubits {qubits} is out of range")));
                }
                Oracle::FeedbackRegisterLower {
                    qubits,
                    l0: self.l0.unwrap_or(mixed(1 << qubits)),
                    kappa: self.kappa(),
                }
            }
            OracleKind::Bounds => {
                return Err(CliError::usage("`bounds` is a table, not a curve"))
            }
        })
    }
}

/// Sample grid: explicit times, else `count` points on `[0, t_final]`.
pub fn time_grid(times: &[f64], t_final: Option<f64>, count: usize) -> CliResult<Vec<f64>> {
    if !times.is_empty() {
        return Ok(times.to_vec());
    }
    match t_final {
        Some(t) if t >= 0.0 && count >= 1 => Ok(uniform_grid(t, count)),
        Some(_) => Err(CliError::usage("--t-final must be >= 0 and --count >= 1")),
        None => Err(CliError::usage("give --times or --t-final")),
    }
}

pub fn oracle(
    kind: OracleKind,
    params: &OracleParams,
    times: &[f64],
    dims: (usize, usize),
    output: Option<&Path>,
) -> CliResult<()> {
    if kind == OracleKind::Bounds {
        let (lo, hi) = dims;
        if lo < 2 || lo > hi {
            return Err(CliError::usage(format!("bad dimension range {lo}..={hi}")));
        }
        let rows = (lo..=hi)
            .map(|d| speedup_bounds(d, None).map(|b| (d, b.qudit_lower, b.qudit_upper)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = open_output(output)?;
        csv::write_bounds(&mut out, &rows)?;
        out.flush()?;
        return Ok(());
    }
    let oracle = params.oracle(kind)?;
    let values = times.iter().map(|&t| oracle.eval(t)).collect::<Result<Vec<_>, _>>()?;
    let mut out = open_output(output)?;
    csv::write_curve(&mut out, times, &values)?;
    out.flush()?;
    Ok(())
}

pub fn verify(opts: &VerifyOptions) -> CliResult<Vec<IdentityCheck>> {
    let report = run_verification(opts)?;
    for line in &report {
        println!("{line}");
    }
    let failed: Vec<String> = report
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} (D={})", c.identity.name(), c.dim))
        .collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Verification(failed))
    }
}

/// A decay curve for `speedup`: an oracle kind name or a config path.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Oracle(OracleKind),
    Config(PathBuf),
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.parse::<OracleKind>() {
            Ok(kind) => Source::Oracle(kind),
            Err(_) => Source::Config(PathBuf::from(s)),
        })
    }
}

/// System of a speed-up comparison, for reporting the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Scope {
    Qudit(usize),
    Register(usize),
    Unknown,
}

struct Resolved {
    source: Box<dyn DecaySource>,
    scope: Scope,
    strength_gamma: Option<f64>,
}

fn resolve(source: &Source, params: &OracleParams, workers: Option<usize>) -> CliResult<Resolved> {
    match source {
        Source::Oracle(kind) => {
            let oracle = params.oracle(*kind)?;
            let scope = match (params.qubits, params.dimension) {
                (Some(n), _) => Scope::Register(n),
                (None, Some(d)) => Scope::Qudit(d),
                (None, None) if matches!(kind, OracleKind::BareQubit | OracleKind::FbQubit | OracleKind::Jk) => {
                    Scope::Qudit(2)
                }
                _ => Scope::Unknown,
            };
            Ok(Resolved {
                source: Box::new(oracle),
                scope,
                strength_gamma: Some(params.gamma()),
            })
        }
        Source::Config(path) => {
            let config = ExperimentConfig::load(path)?;
            let summary = run_config(&config, workers)?;
            let (scope, gamma) = match summary.config.system {
                System::Qudit { dim } => (Scope::Qudit(dim), Some(summary.config.strength)),
                System::Register { qubits } => (Scope::Register(qubits), None),
            };
            Ok(Resolved {
                source: Box::new(summary),
                scope,
                strength_gamma: gamma,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupReport {
    pub t_fb: f64,
    pub t_bare: f64,
    pub speedup: f64,
}

pub fn speedup(
    fb: &Source,
    bare: &Source,
    target: f64,
    params: &OracleParams,
    workers: Option<usize>,
) -> CliResult<SpeedupReport> {
    if target.is_nan() || target <= 0.0 || target >= 1.0 {
        return Err(CliError::usage(format!("--target must lie in (0, 1), got {target}")));
    }
    let fb = resolve(fb, params, workers)?;
    let bare = resolve(bare, params, workers)?;
    let t_fb = fb.source.time_to_impurity(target)?;
    let t_bare = bare.source.time_to_impurity(target)?;
    if !(t_fb > 0.0) {
        return Err(CliError::usage("feedback curve reaches the target at t = 0"));
    }
    let report = SpeedupReport {
        t_fb,
        t_bare,
        speedup: t_bare / t_fb,
    };
    println!("t_fb    {}", csv::format_float(report.t_fb));
    println!("t_bare  {}", csv::format_float(report.t_bare));
    println!("S       {}", csv::format_float(report.speedup));

    let scope = if fb.scope == Scope::Unknown { bare.scope } else { fb.scope };
    match scope {
        Scope::Qudit(d) => {
            let b = speedup_bounds(d, None)?;
            println!(
                "bounds  (2/3)(D+1) = {}  D^2/2 = {}",
                csv::format_float(b.qudit_lower),
                csv::format_float(b.qudit_upper)
            );
            if d == 2 {
                if let Some(gamma) = bare.strength_gamma {
                    if let Ok(s) = speedup_ratio_qubit(t_bare, gamma) {
                        println!("qubit finite-time S = {}", csv::format_float(s));
                    }
                }
            }
        }
        Scope::Register(n) if (1..usize::BITS as usize).contains(&n) => {
            let b = speedup_bounds(1 << n, Some(n))?;
            println!(
                "bounds  2n/(D-1) = {}  2n = {}",
                csv::format_float(b.register_lower.unwrap_or(f64::NAN)),
                csv::format_float(b.register_upper.unwrap_or(f64::NAN))
            );
        }
        _ => {}
    }
    Ok(report)
}
