//! The `mfglab` command line.
//!
//! Every subcommand reads JSON documents and writes CSV/JSON artifacts into
//! `--out` (or prints JSON to standard output when `--out` is absent for the
//! solvers). Exit codes: 0 success, 2 input or validation error, 3
//! non-convergence, 4 failed condition.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::contraction::contraction_report;
use crate::equilibrium::{
    solve_finite_mfe, solve_finite_mfe_q_iteration, solve_stationary_mfe, InitKind, MfeSolution, NormKind,
    SolveOptions,
};
use crate::error::{MfgError, Result};
use crate::lab::{
    default_t_ref, horizon_error_study, perturbation_study, spectrum_sweep, stationary_gap_study,
    HorizonStudyOptions, StudyResult,
};
use crate::model::{compute_lipschitz_profile, make_contractive_instance, LipschitzProfile, MfgInstance, Target};

#[derive(Debug, Parser)]
#[command(name = "mfglab", version, about = "Regularized mean-field game solvers and contraction diagnostics")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contraction report (A_T, B_T radii and bounds) for a profile or instance.
    Analyze(AnalyzeArgs),
    /// Spectral radius of A_T over a range of horizons.
    Spectrum(SpectrumArgs),
    /// Finite-horizon equilibrium.
    SolveFinite(SolveFiniteArgs),
    /// Stationary equilibrium.
    SolveStationary(SolveStationaryArgs),
    /// Gap to a long truncation as a function of the horizon.
    HorizonStudy(HorizonStudyArgs),
    /// Convergence of a long truncation to the stationary equilibrium.
    StationaryStudy(StationaryStudyArgs),
    /// Distance between the equilibria of two games.
    PerturbStudy(PerturbStudyArgs),
    /// Random instance satisfying a contraction condition.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, conflicts_with = "instance", required_unless_present = "instance")]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub tmin: usize,
    #[arg(long, default_value_t = 50)]
    pub tmax: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub tmin: usize,
    #[arg(long, default_value_t = 200)]
    pub tmax: usize,
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    MaxTv,
    PerronWeighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Constant,
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Averaged iteration on measure flows.
    FixedPoint,
    /// Iteration on Q-flows.
    QIteration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    FiniteHorizon,
    InfiniteHorizon,
}

#[derive(Debug, Args)]
pub struct SolveFiniteArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "T")]
    pub horizon: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = NormArg::MaxTv)]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value_t = InitArg::Constant)]
    pub init: InitArg,
    #[arg(long, value_enum, default_value_t = MethodArg::FixedPoint)]
    pub method: MethodArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveStationaryArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HorizonStudyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Probe times; the first one fits the envelope constant.
    #[arg(long = "t-probe", value_delimiter = ',', default_value = "1")]
    pub t_probe: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub tmin: usize,
    #[arg(long, default_value_t = 60)]
    pub tmax: usize,
    #[arg(long, default_value_t = 5)]
    pub step: usize,
    #[arg(long = "T-ref")]
    pub t_ref: Option<usize>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StationaryStudyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "T-ref", default_value_t = 120)]
    pub t_ref: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbStudyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long = "instance-b")]
    pub instance_b: PathBuf,
    #[arg(long = "T", default_value_t = 60)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub states: usize,
    #[arg(long)]
    pub actions: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TargetArg::FiniteHorizon)]
    pub target: TargetArg,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn load_profile(path: &Path) -> Result<LipschitzProfile> {
    LipschitzProfile::load(path).map_err(|e| with_path(e, path))
}

pub fn load_instance(path: &Path) -> Result<MfgInstance> {
    MfgInstance::load(path).map_err(|e| with_path(e, path))
}

fn with_path(e: MfgError, path: &Path) -> MfgError {
    match e {
        MfgError::Input(m) => MfgError::Input(format!("{}: {m}", path.display())),
        MfgError::Dimension(m) => MfgError::Dimension(format!("{}: {m}", path.display())),
        MfgError::Json(j) => MfgError::Input(format!("{}: {j}", path.display())),
        MfgError::Io(io) => MfgError::Input(format!("{}: {io}", path.display())),
        other => other,
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(MfgError::input(format!("--tol must be positive, got {tol}")))
    }
}

fn check_horizon(name: &str, t: usize) -> Result<()> {
    if t >= 1 {
        Ok(())
    } else {
        Err(MfgError::input(format!("{name} must be >= 1")))
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| MfgError::input(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".mfglab-write-check");
    std::fs::write(&probe, b"").map_err(|e| MfgError::input(format!("{} is not writable: {e}", dir.display())))?;
    let _ = std::fs::remove_file(probe);
    Ok(())
}

fn report_flags(study: &StudyResult) {
    for f in &study.flags {
        let slack = f.slack().map(|s| format!("{s:.3e}")).unwrap_or_else(|| "-".into());
        let verdict = if f.pass { "pass" } else { "FAIL" };
        let note = if f.note.is_empty() { String::new() } else { format!(" ({})", f.note) };
        eprintln!("{:<24} {verdict}  checked {:>4}  slack {slack}{note}", f.name, f.checked);
    }
}

fn write_study(study: &StudyResult, dir: &Path, stem: &str) -> Result<()> {
    prepare_out(dir)?;
    study.write(dir, stem)?;
    report_flags(study);
    eprintln!("wrote {}", dir.join(format!("{stem}.csv")).display());
    Ok(())
}

fn emit_solution(sol: &MfeSolution, out: Option<&Path>, stem: &str) -> Result<()> {
    eprintln!("converged after {} iterations, residual {:e}", sol.iterations, sol.residual);
    match out {
        Some(dir) => {
            prepare_out(dir)?;
            let path = dir.join(format!("{stem}.json"));
            sol.save(&path)?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{}", sol.to_json()?),
    }
    Ok(())
}

fn horizons(tmin: usize, tmax: usize, step: usize) -> Result<Vec<usize>> {
    if tmin < 1 || step < 1 || tmax < tmin {
        return Err(MfgError::input(format!(
            "need 1 <= tmin <= tmax and step >= 1, got tmin = {tmin}, tmax = {tmax}, step = {step}"
        )));
    }
    Ok((tmin..=tmax).step_by(step).collect())
}

fn execute(cfg: RunConfig) -> Result<()> {
    match cfg.command {
        Command::Analyze(a) => {
            let profile = match (&a.profile, &a.instance) {
                (Some(p), _) => load_profile(p)?,
                (None, Some(i)) => compute_lipschitz_profile(&load_instance(i)?)?,
                (None, None) => return Err(MfgError::input("analyze needs --profile or --instance")),
            };
            let report = crate::lab::with_pool(|| contraction_report(&profile, &horizons(a.tmin, a.tmax, a.step)?))??;
            prepare_out(&a.out)?;
            std::fs::write(a.out.join("report.csv"), report.to_csv())?;
            let json = serde_json::to_string_pretty(&report.to_json_value())?;
            std::fs::write(a.out.join("report.json"), json + "\n")?;
            eprintln!(
                "infinite radius {:.6}, limit of rho(A_T) {:.6}, decay condition {}",
                report.infinite_radius,
                report.limit_bound_at,
                report.assumption4_epsilon.map_or("fails".to_string(), |e| format!("holds up to eps = {e:.6}"))
            );
            eprintln!("wrote {}", a.out.join("report.csv").display());
        }
        Command::Spectrum(a) => {
            let profile = load_profile(&a.profile)?;
            let study = spectrum_sweep(&profile, a.tmin, a.tmax, a.step)?;
            write_study(&study, &a.out, "spectrum")?;
        }
        Command::SolveFinite(a) => {
            check_tol(a.tol)?;
            check_horizon("--T", a.horizon)?;
            let inst = load_instance(&a.instance)?;
            let sol = match a.method {
                MethodArg::FixedPoint => {
                    let opts = SolveOptions {
                        tol: a.tol,
                        max_iter: a.max_iter,
                        lambda: a.lambda,
                        norm: match a.norm {
                            NormArg::MaxTv => NormKind::MaxTv,
                            NormArg::PerronWeighted => NormKind::PerronWeighted,
                        },
                        init: match a.init {
                            InitArg::Constant => InitKind::Constant,
                            InitArg::Uniform => InitKind::Uniform,
                        },
                        profile: None,
                    };
                    solve_finite_mfe(&inst, a.horizon, &opts)?
                }
                MethodArg::QIteration => solve_finite_mfe_q_iteration(&inst, a.horizon, a.tol, a.max_iter)?,
            };
            emit_solution(&sol, a.out.as_deref(), "solution_finite")?;
        }
        Command::SolveStationary(a) => {
            check_tol(a.tol)?;
            let inst = load_instance(&a.instance)?;
            let sol = solve_stationary_mfe(&inst, a.tol, a.max_iter)?;
            emit_solution(&sol, a.out.as_deref(), "solution_stationary")?;
        }
        Command::HorizonStudy(a) => {
            check_tol(a.tol)?;
            let inst = load_instance(&a.instance)?;
            let t_list = horizons(a.tmin, a.tmax, a.step)?;
            let opts = HorizonStudyOptions {
                t_probes: a.t_probe,
                t_ref: Some(a.t_ref.unwrap_or_else(|| default_t_ref(a.tmax))),
                t_list,
                tol: a.tol,
                solver_tol: 1e-14,
            };
            let study = horizon_error_study(&inst, &opts)?;
            write_study(&study, &a.out, "horizon_study")?;
        }
        Command::StationaryStudy(a) => {
            check_tol(a.tol)?;
            check_horizon("--T-ref", a.t_ref)?;
            let inst = load_instance(&a.instance)?;
            let study = stationary_gap_study(&inst, a.t_ref, a.tol)?;
            write_study(&study, &a.out, "stationary_study")?;
        }
        Command::PerturbStudy(a) => {
            check_tol(a.tol)?;
            check_horizon("--T", a.horizon)?;
            let inst_a = load_instance(&a.instance)?;
            let inst_b = load_instance(&a.instance_b)?;
            let study = perturbation_study(&inst_a, &inst_b, a.horizon, a.tol)?;
            write_study(&study, &a.out, "perturb_study")?;
        }
        Command::Generate(a) => {
            let target = match a.target {
                TargetArg::FiniteHorizon => Target::FiniteHorizon,
                TargetArg::InfiniteHorizon => Target::InfiniteHorizon,
            };
            let inst = make_contractive_instance(a.states, a.actions, a.seed, target)?;
            if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
                prepare_out(dir)?;
            }
            inst.save(&a.out)?;
            eprintln!("wrote {}", a.out.display());
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
