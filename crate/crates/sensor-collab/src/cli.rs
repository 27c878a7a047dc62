//! Experiment harness behind the `collab` binary: scenario generation,
//! single solves, oracle comparisons and parameter sweeps with CSV/SVG
//! output.
//!
//! Exit codes: 0 success/converged; 2 invalid parameters or paths; 3 the
//! solver returned a feasible but non-converged solution; 4 infeasible
//! target; 5 a sweep where more than half the rows failed. Set `COLLAB_LOG`
//! to any non-empty value (other than `0`) for progress traces on stderr.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_forms, dnorm_to_j, QuadForms, Scenario, ScenarioParams};
use crate::oracle::{exhaustive_energy, exhaustive_info, exhaustive_joint, EnumerationBudget};
use crate::spectral::{info_bound_j0, min_distortion_d0};
use crate::strategies::{
    solve_energy_constrained, solve_info_constrained, solve_joint, SolveReport, SolverConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_PARAMS: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_SWEEP_FAILED: i32 = 5;

/// Fixed sweep CSV schema; one header row, one row per grid point.
pub const SWEEP_COLUMNS: &str =
    "axis,status,p,t,q,s,j,d_norm,card,per_w,selected,iterations";

#[derive(Parser, Debug)]
#[command(name = "collab", version, about = "Sparse sensor collaboration and selection solver")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Generate or inspect a scenario.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Solve one problem instance and write a report JSON.
    Solve(SolveArgs),
    /// Sweep a parameter grid and write CSV (+ optional SVG) outputs.
    Sweep(SweepArgs),
    /// Compare the solver against exhaustive search on a tiny network.
    Oracle(OracleArgs),
}

#[derive(Subcommand, Debug)]
pub enum ScenarioAction {
    /// Write a scenario JSON for the given size/seed/parameters.
    Gen(GenArgs),
    /// Print geometry and derived constants (J0, D0, total link cost).
    Show(ScenarioArgs),
}

/// Scenario source: either a saved JSON or size + seed (+ overrides).
#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Path to a scenario JSON produced by `scenario gen`.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Number of sensors (when generating).
    #[arg(long)]
    pub n: Option<usize>,
    /// Deployment seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub alpha_c: Option<f64>,
    #[arg(long)]
    pub alpha_s: Option<f64>,
    #[arg(long)]
    pub zeta2: Option<f64>,
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub rho_corr: Option<f64>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ScenarioArgs {
    pub fn load(&self) -> Result<Scenario> {
        if let Some(path) = &self.scenario {
            return Scenario::from_json(&fs::read_to_string(path)?);
        }
        let n = self.n.ok_or_else(|| {
            Error::InvalidParameter("provide --scenario or --n".into())
        })?;
        let mut params = ScenarioParams {
            n,
            ..Default::default()
        };
        if let Some(v) = self.alpha_c {
            params.alpha_c = v;
        }
        if let Some(v) = self.alpha_s {
            params.alpha_s = v;
        }
        if let Some(v) = self.zeta2 {
            params.zeta2 = v;
        }
        if let Some(v) = self.eta2 {
            params.eta2 = v;
        }
        if let Some(v) = self.rho_corr {
            params.rho_corr = v;
        }
        Scenario::build(params, self.seed)
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// ADMM penalty parameter.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Stopping tolerance applied to every loop.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Relative cardinality threshold.
    #[arg(long)]
    pub zero_tol: Option<f64>,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        if let Some(rho) = self.rho {
            cfg.rho = rho;
        }
        if let Some(eps) = self.eps {
            cfg.eps_rw = eps;
            cfg.eps_bi = eps;
            cfg.eps_ad = eps;
            cfg.eps_li = eps;
        }
        if let Some(z) = self.zero_tol {
            cfg.zero_tol = z;
        }
        cfg
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Info,
    Energy,
    Joint,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Normalized distortion target in (0, 1] (info/joint).
    #[arg(long)]
    pub dnorm: Option<f64>,
    /// Raw information threshold (info/joint, instead of --dnorm).
    #[arg(long)]
    pub raw_j: Option<f64>,
    /// Total energy budget (energy).
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Report JSON path (stdout when omitted).
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Dnorm,
    Budget,
    AlphaC,
    AlphaS,
    /// Measurement-to-channel noise power ratio (sets zeta2 = ratio * xi2).
    NoiseRatio,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated, strictly monotone grid of axis values.
    #[arg(long)]
    pub grid: String,
    /// Fixed distortion target when the axis is not the target itself.
    #[arg(long)]
    pub dnorm: Option<f64>,
    /// Fixed budget when the axis is not the budget.
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output prefix: writes <out>.csv, <out>.config.json, <out>.svg.
    #[arg(long)]
    pub out: PathBuf,
    /// Concurrent rows.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Skip the SVG plot.
    #[arg(long)]
    pub no_svg: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long)]
    pub dnorm: Option<f64>,
    #[arg(long)]
    pub raw_j: Option<f64>,
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

fn vlog(msg: &str) {
    if std::env::var("COLLAB_LOG").map_or(false, |v| !v.is_empty() && v != "0") {
        eprintln!("collab: {msg}");
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::NotPositiveDefinite(_)
        | Error::Domain(_)
        | Error::Io(_)
        | Error::Serialization(_) => EXIT_BAD_PARAMS,
        _ => 1,
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    dispatch(cli)
}

/// Same as [`run`] but from an explicit argument list (for tests).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let _ = e.print();
            EXIT_BAD_PARAMS
        }
    }
}

fn dispatch(cli: Cli) -> i32 {
    let outcome = match cli.cmd {
        Cmd::Scenario { action } => cmd_scenario(action),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_scenario(action: ScenarioAction) -> Result<i32> {
    match action {
        ScenarioAction::Gen(args) => {
            let scenario = args.scenario.load()?;
            let json = scenario.to_json()?;
            match &args.out {
                Some(path) => fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(EXIT_OK)
        }
        ScenarioAction::Show(args) => {
            let scenario = args.load()?;
            let forms = build_forms(&scenario)?;
            let j0 = info_bound_j0(&forms)?;
            let d0 = min_distortion_d0(&forms)?;
            let total_c: f64 = forms.c.iter().sum();
            println!("sensors: {}", scenario.params.n);
            for (i, p) in scenario.sensor_pos.iter().enumerate() {
                println!("  s{} = ({:.4}, {:.4})", i + 1, p[0], p[1]);
            }
            println!("fc    = ({:.4}, {:.4})", scenario.fc_pos[0], scenario.fc_pos[1]);
            println!("J0    = {j0:.6}");
            println!("D0    = {d0:.6}");
            println!("sum_c = {total_c:.6}");
            println!("sum_d = {:.6}", forms.d.iter().sum::<f64>());
            Ok(EXIT_OK)
        }
    }
}

/// Resolves the solve target for a given problem kind and scenario.
fn resolve_target(
    kind: Kind,
    forms: &QuadForms,
    dnorm: Option<f64>,
    raw_j: Option<f64>,
    budget: Option<f64>,
) -> Result<f64> {
    match kind {
        Kind::Info | Kind::Joint => match (raw_j, dnorm) {
            (Some(j), _) => Ok(j),
            (None, Some(dn)) => {
                let d0 = min_distortion_d0(forms)?;
                dnorm_to_j(dn, d0, forms.eta2)
            }
            (None, None) => Err(Error::InvalidParameter(
                "info/joint solves need --dnorm or --raw-j".into(),
            )),
        },
        Kind::Energy => budget.ok_or_else(|| {
            Error::InvalidParameter("energy solves need --budget".into())
        }),
    }
}

fn run_kind(
    kind: Kind,
    forms: &QuadForms,
    target: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    match kind {
        Kind::Info => solve_info_constrained(forms, target, cfg),
        Kind::Energy => solve_energy_constrained(forms, target, cfg),
        Kind::Joint => solve_joint(forms, target, cfg),
    }
}

/// Feasibility of a finished report with respect to its target.
fn report_feasible(kind: Kind, report: &SolveReport) -> bool {
    match kind {
        Kind::Info | Kind::Joint => report.metrics.j >= report.target * (1.0 - 1e-6),
        Kind::Energy => report.metrics.p <= report.target * (1.0 + 1e-6),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let scenario = args.scenario.load()?;
    let forms = build_forms(&scenario)?;
    let cfg = args.solver.config();
    cfg.validate()?;
    let target = resolve_target(args.kind, &forms, args.dnorm, args.raw_j, args.budget)?;
    vlog(&format!("solving {:?} with target {target}", args.kind));

    let report = run_kind(args.kind, &forms, target, &cfg)?;
    let json = report.to_json()?;
    match &args.report_out {
        Some(path) => fs::write(path, json)?,
        None => println!("{json}"),
    }
    if !report_feasible(args.kind, &report) {
        return Ok(EXIT_INFEASIBLE);
    }
    if !report.converged {
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

fn parse_grid(grid: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = grid
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad grid value {s:?}")))
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    let increasing = vals.windows(2).all(|w| w[1] > w[0]);
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    if vals.len() > 1 && !increasing && !decreasing {
        return Err(Error::InvalidParameter(
            "sweep grid must be strictly monotone".into(),
        ));
    }
    Ok(vals)
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    axis: f64,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SolveReport>,
}

impl SweepRow {
    fn csv_line(&self) -> String {
        match &self.report {
            Some(r) => {
                let m = &r.metrics;
                let per_w = m.per_w.map_or(String::new(), |v| format!("{v:.6}"));
                let iters = r.iterations.admm;
                format!(
                    "{:.10},{},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{},{},{},{}",
                    self.axis,
                    self.status,
                    m.p,
                    m.t,
                    m.q,
                    m.s,
                    m.j,
                    m.d_norm,
                    m.card,
                    per_w,
                    m.selected.len(),
                    iters
                )
            }
            None => format!("{:.10},{},,,,,,,,,,", self.axis, self.status),
        }
    }
}

/// Solves one sweep row; scenario-parameter axes rebuild the forms with the
/// geometry held fixed.
fn sweep_row(
    base: &Scenario,
    kind: Kind,
    axis: Axis,
    value: f64,
    dnorm: Option<f64>,
    budget: Option<f64>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let mut scenario = base.clone();
    match axis {
        Axis::AlphaC => scenario.params.alpha_c = value,
        Axis::AlphaS => scenario.params.alpha_s = value,
        Axis::NoiseRatio => scenario.params.zeta2 = value * scenario.params.xi2,
        Axis::Dnorm | Axis::Budget => {}
    }
    scenario.params.validate()?;
    let forms = build_forms(&scenario)?;
    let target = match axis {
        Axis::Dnorm => resolve_target(kind, &forms, Some(value), None, None)?,
        Axis::Budget => resolve_target(kind, &forms, None, None, Some(value))?,
        _ => resolve_target(kind, &forms, dnorm, None, budget)?,
    };
    run_kind(kind, &forms, target, cfg)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let grid = parse_grid(&args.grid)?;
    match (args.axis, args.kind) {
        (Axis::Budget, k) if k != Kind::Energy => {
            return Err(Error::InvalidParameter(
                "a budget axis requires the energy problem".into(),
            ))
        }
        (Axis::Dnorm, Kind::Energy) => {
            return Err(Error::InvalidParameter(
                "a dnorm axis requires the info or joint problem".into(),
            ))
        }
        _ => {}
    }
    let scenario = args.scenario.load()?;
    let cfg = args.solver.config();
    cfg.validate()?;
    if args.jobs == 0 {
        return Err(Error::InvalidParameter("--jobs must be >= 1".into()));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::SolverFailure(format!("thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&v| {
                vlog(&format!("sweep point {v}"));
                match sweep_row(&scenario, args.kind, args.axis, v, args.dnorm, args.budget, &cfg)
                {
                    Ok(report) => SweepRow {
                        axis: v,
                        status: "ok".into(),
                        report: Some(report),
                    },
                    Err(e) => {
                        vlog(&format!("sweep point {v} failed: {e}"));
                        SweepRow {
                            axis: v,
                            status: "failed".into(),
                            report: None,
                        }
                    }
                }
            })
            .collect()
    });

    let csv_path = with_suffix(&args.out, "csv");
    let mut csv = String::from(SWEEP_COLUMNS);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    fs::write(&csv_path, csv)?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        version: &'a str,
        kind: String,
        axis: String,
        grid: &'a [f64],
        dnorm: Option<f64>,
        budget: Option<f64>,
        scenario: &'a Scenario,
        rho: f64,
        eps_rw: f64,
        zero_tol: f64,
        jobs: usize,
    }
    let sidecar = Sidecar {
        version: env!("CARGO_PKG_VERSION"),
        kind: format!("{:?}", args.kind).to_lowercase(),
        axis: format!("{:?}", args.axis).to_lowercase(),
        grid: &grid,
        dnorm: args.dnorm,
        budget: args.budget,
        scenario: &scenario,
        rho: cfg.rho,
        eps_rw: cfg.eps_rw,
        zero_tol: cfg.zero_tol,
        jobs: args.jobs,
    };
    fs::write(
        with_suffix(&args.out, "config.json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;

    if !args.no_svg {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                r.report.as_ref().map(|rep| {
                    let y = match args.kind {
                        Kind::Energy => rep.metrics.j,
                        _ => rep.metrics.total,
                    };
                    (r.axis, y)
                })
            })
            .collect();
        let ylabel = match args.kind {
            Kind::Energy => "J",
            _ => "total energy",
        };
        write_svg(&with_suffix(&args.out, "svg"), &points, "axis", ylabel)?;
    }

    let ok = rows.iter().filter(|r| r.report.is_some()).count();
    if ok * 2 >= rows.len() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_SWEEP_FAILED)
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Minimal line-plot SVG writer; no plotting dependency.
fn write_svg(path: &Path, points: &[(f64, f64)], xlabel: &str, ylabel: &str) -> Result<()> {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 60.0;
    let (xmin, xmax) = bounds(points.iter().map(|p| p.0));
    let (ymin, ymax) = bounds(points.iter().map(|p| p.1));
    let sx = |x: f64| M + (x - xmin) / (xmax - xmin).max(1e-300) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - ymin) / (ymax - ymin).max(1e-300) * (H - 2.0 * M);

    let mut f = fs::File::create(path)?;
    writeln!(
        f,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    )?;
    writeln!(f, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>")?;
    writeln!(
        f,
        "<line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        H - M,
        W - M,
        H - M
    )?;
    writeln!(
        f,
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>",
        H - M
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\">{xlabel}</text>",
        W / 2.0,
        H - M / 3.0
    )?;
    writeln!(
        f,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" transform=\"rotate(-90 15 {})\">{ylabel}</text>",
        15.0,
        H / 2.0,
        H / 2.0
    )?;
    for (label, x, y, anchor) in [
        (format!("{xmin:.3}"), M, H - M + 18.0, "middle"),
        (format!("{xmax:.3}"), W - M, H - M + 18.0, "middle"),
        (format!("{ymin:.3}"), M - 6.0, H - M, "end"),
        (format!("{ymax:.3}"), M - 6.0, M, "end"),
    ] {
        writeln!(
            f,
            "<text x=\"{x}\" y=\"{y}\" font-size=\"12\" text-anchor=\"{anchor}\">{label}</text>"
        )?;
    }
    if points.len() > 1 {
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            f,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>",
            pts.join(" ")
        )?;
    }
    for &(x, y) in points {
        writeln!(
            f,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>",
            sx(x),
            sy(y)
        )?;
    }
    writeln!(f, "</svg>")?;
    Ok(())
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<i32> {
    let scenario = args.scenario.load()?;
    let forms = build_forms(&scenario)?;
    let cfg = args.solver.config();
    cfg.validate()?;
    let target = resolve_target(args.kind, &forms, args.dnorm, args.raw_j, args.budget)?;
    let budget = EnumerationBudget::default();

    let (oracle_value, strategy_value) = match args.kind {
        Kind::Info => {
            let orc = exhaustive_info(&forms, target, &budget)?;
            let rep = solve_info_constrained(&forms, target, &cfg)?;
            (orc.value, rep.metrics.p)
        }
        Kind::Energy => {
            let orc = exhaustive_energy(&forms, target, &budget)?;
            let rep = solve_energy_constrained(&forms, target, &cfg)?;
            (orc.value, rep.metrics.j)
        }
        Kind::Joint => {
            let orc = exhaustive_joint(&forms, target, &budget)?;
            let rep = solve_joint(&forms, target, &cfg)?;
            (orc.value, rep.metrics.total)
        }
    };
    let gap = (strategy_value - oracle_value) / oracle_value.abs().max(1e-12);

    #[derive(Serialize)]
    struct Comparison {
        kind: String,
        target: f64,
        oracle: f64,
        strategy: f64,
        gap: f64,
    }
    let out = serde_json::to_string_pretty(&Comparison {
        kind: format!("{:?}", args.kind).to_lowercase(),
        target,
        oracle: oracle_value,
        strategy: strategy_value,
        gap,
    })?;
    match &args.report_out {
        Some(path) => fs::write(path, out)?,
        None => println!("{out}"),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0.1, 0.2,0.3").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("3,2,1").unwrap(), vec![3.0, 2.0, 1.0]);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1,1").is_err());
        assert!(parse_grid("1,3,2").is_err());
        assert!(parse_grid("1,abc").is_err());
    }

    #[test]
    fn csv_schema_is_fixed() {
        assert_eq!(
            SWEEP_COLUMNS,
            "axis,status,p,t,q,s,j,d_norm,card,per_w,selected,iterations"
        );
        let row = SweepRow {
            axis: 0.5,
            status: "failed".into(),
            report: None,
        };
        let line = row.csv_line();
        assert_eq!(line.matches(',').count(), SWEEP_COLUMNS.matches(',').count());
    }

    #[test]
    fn suffix_paths() {
        let p = with_suffix(Path::new("/tmp/run"), "csv");
        assert_eq!(p, PathBuf::from("/tmp/run.csv"));
        let p = with_suffix(Path::new("out"), "config.json");
        assert_eq!(p, PathBuf::from("out.config.json"));
    }

    #[test]
    fn svg_writer_emits_markup() {
        let dir = std::env::temp_dir().join("collab-svg-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("plot.svg");
        write_svg(&path, &[(0.0, 1.0), (1.0, 2.0), (2.0, 1.5)], "x", "y").unwrap();
        let body = fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("<svg"));
        assert!(body.contains("polyline"));
        assert!(body.contains("</svg>"));
    }

    #[test]
    fn cli_parses_all_subcommands() {
        for argv in [
            vec!["collab", "scenario", "gen", "--n", "3", "--seed", "7"],
            vec!["collab", "scenario", "show", "--n", "2"],
            vec!["collab", "solve", "info", "--n", "2", "--dnorm", "0.3"],
            vec!["collab", "solve", "energy", "--n", "2", "--budget", "1.5"],
            vec![
                "collab", "sweep", "info", "--n", "2", "--axis", "dnorm", "--grid", "0.2,0.4",
                "--out", "/tmp/x", "--jobs", "2",
            ],
            vec!["collab", "oracle", "joint", "--n", "2", "--dnorm", "0.4"],
        ] {
            Cli::try_parse_from(argv).unwrap();
        }
    }
}
