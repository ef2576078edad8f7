//! `qdom` — construct deformed quadrature domains by the balayage fixed
//! point, audit the rigidity identities on them, and cross-check every
//! operator against brute-force comparators.
//!
//! Exit codes: 0 success, 1 check/assertion failure, 2 input or schema error.

use clap::{Args, Parser, Subcommand};
use qdom_core::audit::{run_audit, AuditConfig, AuditReport};
use qdom_core::conformal::{build_map, geometry, moment_curve, ConformalMapRecord};
use qdom_core::grid::PolarGrid;
use qdom_core::measure::{riesz_band, MeasureSpec};
use qdom_core::schema::{
    audit_doc, boundary_csv, branch_doc, branch_geometry_csv, fmt_f64, map_doc, moments_csv,
    parse_mode, to_json, version_string, write_text,
};
use qdom_core::selftest::{run_selftest, Fault};
use qdom_core::solver::{SolveMode, Solver, SolverConfig};
use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qdom", version, about = "quadrature-domain construction and audit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every operator against an independent route; exit 1 on failure.
    Selftest(SelftestArgs),
    /// Continue the fixed-point branch over the parameter grid and write
    /// branch/map/geometry artifacts.
    Solve(SolveArgs),
    /// Run the rigidity audit on a map file (or the built-in disk).
    Audit(AuditArgs),
    /// Tabulate deformation moments M_n(a) with derivative comparators.
    Moments(MomentsArgs),
    /// Sample a map's boundary polyline to x,y CSV.
    ExportBoundary(ExportArgs),
}

/// Flags shared by all subcommands (resolution, tolerances, persistence).
#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fourier cutoff N of the unknown boundary weight.
    #[arg(long)]
    modes: Option<usize>,
    /// Radial Gauss-Legendre nodes.
    #[arg(long)]
    radial_nodes: Option<usize>,
    /// Uniform angular samples M of the disk grid.
    #[arg(long)]
    angles: Option<usize>,
    /// Taylor truncation N_s of the map series.
    #[arg(long)]
    series: Option<usize>,
    /// Main tolerance of the subcommand (solve: fixed-point residual;
    /// audit: Hardy-membership gate).
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized probes.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Depth K of the built-in Riesz-product measure.
    #[arg(long)]
    riesz_depth: Option<u32>,
    /// JSON file with an explicit measure (same shape as the "measure"
    /// block of output documents).
    #[arg(long)]
    measure_file: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fault-injection hook for exercising the failure path.
    #[arg(long, hide = true, value_parser = ["balayage-diagonal"])]
    sabotage: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Boundary-weight convention: singular | consistent.
    #[arg(long)]
    mode: Option<String>,
    /// Largest deformation parameter of the branch.
    #[arg(long)]
    a_max: Option<f64>,
    /// Number of nonzero parameter points.
    #[arg(long)]
    a_points: Option<usize>,
    /// Parameter spacing: geometric | linear.
    #[arg(long, value_parser = ["geometric", "linear"])]
    a_spacing: Option<String>,
}

#[derive(Args)]
struct AuditArgs {
    /// Map JSON produced by `solve`; omitted = built-in unit disk.
    map_file: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
    /// Audit with this quadrature constant instead of the map's own.
    #[arg(long)]
    c_override: Option<f64>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Largest deformation parameter of the tabulated curve
    #[arg(long)]
    a_max: Option<f64>,
    /// Number of nonzero parameter points
    #[arg(long)]
    a_points: Option<usize>,
    /// Parameter spacing: geometric | linear
    #[arg(long, value_parser = ["geometric", "linear"])]
    a_spacing: Option<String>,
}

#[derive(Args)]
struct ExportArgs {
    /// Map JSON produced by `solve`; omitted = built-in unit disk.
    map_file: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Failure that decides the process exit code.
enum CliError {
    /// Bad flags, files, or schemas → exit 2.
    Input(String),
    /// A check or run that produced nothing usable → exit 1.
    Failure(String),
}

type CliResult<T> = Result<T, CliError>;

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Config-file entries; every key mirrors a flag name.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    mode: Option<String>,
    riesz_depth: Option<u32>,
    measure_file: Option<PathBuf>,
    a_max: Option<f64>,
    a_points: Option<usize>,
    a_spacing: Option<String>,
    modes: Option<usize>,
    radial_nodes: Option<usize>,
    angles: Option<usize>,
    series: Option<usize>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    c_override: Option<f64>,
}

fn load_file_config(path: &Option<PathBuf>) -> CliResult<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("config {}: {e}", p.display())))
        }
    }
}

/// The effective settings after merging flags over the config file over
/// defaults.
struct Effective {
    modes: usize,
    radial_nodes: usize,
    angles: usize,
    series: usize,
    tol: f64,
    seed: u64,
    out: Option<PathBuf>,
    mode: SolveMode,
    riesz_depth: u32,
    measure_file: Option<PathBuf>,
    a_max: f64,
    a_points: usize,
    a_spacing: String,
    c_override: Option<f64>,
}

impl Effective {
    fn merge(
        common: &CommonArgs,
        measure: Option<&MeasureArgs>,
        mode: Option<&String>,
        a_max: Option<f64>,
        a_points: Option<usize>,
        a_spacing: Option<&String>,
        c_override: Option<f64>,
        default_tol: f64,
        spectral: bool,
    ) -> CliResult<Self> {
        let file = load_file_config(&common.config)?;
        let mode_str = mode
            .cloned()
            .or(file.mode)
            .unwrap_or_else(|| "singular".to_string());
        let spacing = a_spacing
            .cloned()
            .or(file.a_spacing)
            .unwrap_or_else(|| "geometric".to_string());
        if spacing != "geometric" && spacing != "linear" {
            return Err(CliError::Input(format!("unknown a-spacing {spacing:?}")));
        }
        let eff = Self {
            modes: common.modes.or(file.modes).unwrap_or(255),
            radial_nodes: common.radial_nodes.or(file.radial_nodes).unwrap_or(64),
            angles: common.angles.or(file.angles).unwrap_or(512),
            series: common.series.or(file.series).unwrap_or(1024),
            tol: common.tol.or(file.tol).unwrap_or(default_tol),
            seed: common.seed.or(file.seed).unwrap_or(0),
            out: common.out.clone().or(file.out),
            mode: parse_mode(&mode_str).map_err(input_err)?,
            riesz_depth: measure.and_then(|m| m.riesz_depth).or(file.riesz_depth).unwrap_or(0),
            measure_file: measure.and_then(|m| m.measure_file.clone()).or(file.measure_file),
            a_max: a_max.or(file.a_max).unwrap_or(0.05),
            a_points: a_points.or(file.a_points).unwrap_or(4),
            a_spacing: spacing,
            c_override: c_override.or(file.c_override),
        };
        if spectral {
            if eff.modes > (eff.angles.max(1) - 1) / 2 {
                return Err(CliError::Input(format!(
                    "cutoff {} exceeds what {} angles can hold (need modes <= (angles-1)/2)",
                    eff.modes, eff.angles
                )));
            }
            if eff.series < 2 * eff.modes {
                return Err(CliError::Input(format!(
                    "series order {} too short for cutoff {} (need series >= 2*modes)",
                    eff.series, eff.modes
                )));
            }
        }
        Ok(eff)
    }

    fn measure(&self) -> CliResult<MeasureSpec> {
        match &self.measure_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read measure {}: {e}", path.display()))
                })?;
                let doc: qdom_core::schema::MeasureDoc =
                    serde_json::from_str(&text).map_err(input_err)?;
                qdom_core::schema::doc_to_measure(&doc).map_err(input_err)
            }
            None => {
                let band = riesz_band(self.riesz_depth);
                if band > self.modes {
                    return Err(CliError::Input(format!(
                        "riesz depth {} needs band {band} > cutoff {}",
                        self.riesz_depth, self.modes
                    )));
                }
                MeasureSpec::riesz_product(self.riesz_depth, band).map_err(input_err)
            }
        }
    }

    fn a_grid(&self) -> Vec<f64> {
        if self.a_max <= 0.0 {
            return vec![0.0];
        }
        if self.a_spacing == "linear" {
            SolverConfig::linear_a_grid(self.a_max, self.a_points)
        } else {
            SolverConfig::geometric_a_grid(self.a_max, self.a_points)
        }
    }

    fn echo(&self, command: &str) -> serde_json::Value {
        json!({
            "command": command,
            "mode": self.mode.as_str(),
            "riesz_depth": self.riesz_depth,
            "measure_file": self.measure_file.as_ref().map(|p| p.display().to_string()),
            "a_max": self.a_max,
            "a_points": self.a_points,
            "a_spacing": self.a_spacing,
            "modes": self.modes,
            "radial_nodes": self.radial_nodes,
            "angles": self.angles,
            "series": self.series,
            "tol": self.tol,
            "seed": self.seed,
            "out": self.out.as_ref().map(|p| p.display().to_string()),
            "c_override": self.c_override,
        })
    }
}

fn echo_line(echo: &serde_json::Value) -> String {
    to_json(echo).map(|s| s.trim_end().to_string()).unwrap_or_default()
}

fn out_dir(eff: &Effective) -> CliResult<Option<PathBuf>> {
    match &eff.out {
        None => Ok(None),
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
            Ok(Some(dir.clone()))
        }
    }
}

fn write_artifact(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    write_text(&dir.join(name), text)
        .map_err(|e| CliError::Input(format!("cannot write {name}: {e}")))
}

fn load_map(path: &Option<PathBuf>, series: usize) -> CliResult<ConformalMapRecord> {
    match path {
        None => Ok(ConformalMapRecord::unit_disk(SolveMode::Singular, series)),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read map {}: {e}", p.display())))?;
            let doc: qdom_core::schema::MapDoc = serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("map {}: {e}", p.display())))?;
            qdom_core::schema::doc_to_map(&doc)
                .map_err(|e| CliError::Input(format!("map {}: {e}", p.display())))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Selftest(args) => cmd_selftest(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Moments(args) => cmd_moments(args),
        Command::ExportBoundary(args) => cmd_export(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_selftest(args: SelftestArgs) -> CliResult<()> {
    let eff = Effective::merge(&args.common, None, None, None, None, None, None, 1e-10, true)?;
    let fault = match args.sabotage.as_deref() {
        Some("balayage-diagonal") => Some(Fault::BalayageDiagonal),
        Some(other) => return Err(CliError::Input(format!("unknown sabotage target {other:?}"))),
        None => None,
    };
    println!("{}", version_string());
    println!("config: {}", echo_line(&eff.echo("selftest")));
    let report = run_selftest(eff.modes, eff.radial_nodes, eff.angles, eff.seed, fault);
    println!("{:<28} {:>13} {:>10}  status", "check", "max error", "bound");
    for c in &report.checks {
        println!(
            "{:<28} {:>13.3e} {:>10.1e}  {}",
            c.name,
            c.observed,
            c.bound,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    if report.passed() {
        println!("selftest: all {} checks passed", report.checks.len());
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "selftest failed: {}",
            report.failures().join(", ")
        )))
    }
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let eff = Effective::merge(
        &args.common,
        Some(&args.measure),
        args.mode.as_ref(),
        args.a_max,
        args.a_points,
        args.a_spacing.as_ref(),
        None,
        1e-11,
        true,
    )?;
    let measure = eff.measure()?;
    let mut cfg = SolverConfig::defaults(eff.mode, measure.clone());
    cfg.n_max = eff.modes;
    cfg.nr = eff.radial_nodes;
    cfg.m = eff.angles;
    cfg.a_grid = eff.a_grid();
    cfg.tol_residual = eff.tol;
    cfg.seed = eff.seed;
    cfg.validate().map_err(input_err)?;

    println!("{}", version_string());
    let echo = eff.echo("solve");
    println!("config: {}", echo_line(&echo));

    let solver = Solver::new(cfg).map_err(input_err)?;
    let branch = solver
        .solve_branch()
        .map_err(|e| CliError::Failure(format!("solve failed outright: {e}")))?;

    for p in &branch.points {
        println!(
            "a={} residual={} iterations={} contraction={} c={}",
            fmt_f64(p.a),
            fmt_f64(p.residual),
            p.iterations,
            fmt_f64(p.contraction_est),
            fmt_f64(p.c_small()),
        );
    }
    println!(
        "stop: {}{}",
        branch.stop.as_str(),
        branch
            .stop_detail
            .as_deref()
            .map(|d| format!(" ({d})"))
            .unwrap_or_default()
    );

    // mode-specific first-order summaries
    match eff.mode {
        SolveMode::Consistent => {
            let proj = measure
                .coeffs()
                .project_x4()
                .map_err(|e| CliError::Failure(format!("measure projection: {e}")))?;
            let worst = branch
                .points
                .iter()
                .map(|p| {
                    p.w.add_scaled(&proj, qdom_core::Complex64::new(p.a, 0.0))
                        .sup_norm(4 * eff.angles)
                })
                .fold(0.0, f64::max);
            println!("consistent collapse: max ||W(a) + a*proj(mu)|| = {}", fmt_f64(worst));
        }
        SolveMode::Singular => {
            for p in branch.points.iter().filter(|p| p.a > 0.0) {
                let ratio = p.w.coeff(4).re / p.a;
                println!("W_hat(4)/a at a={}: {}", fmt_f64(p.a), fmt_f64(ratio));
            }
        }
    }

    if let Some(dir) = out_dir(&eff)? {
        let bdoc = branch_doc(&branch, eff.mode, &measure, echo.clone());
        write_artifact(&dir, "branch.json", &to_json(&bdoc).map_err(input_err)?)?;
        let mut geo_rows = Vec::new();
        for (idx, p) in branch.points.iter().enumerate() {
            match build_map(p, eff.mode, &measure, eff.series, 1e-10) {
                Ok(rec) => {
                    let doc = map_doc(&rec);
                    write_artifact(
                        &dir,
                        &format!("map_{idx:03}.json"),
                        &to_json(&doc).map_err(input_err)?,
                    )?;
                    geo_rows.push((p.a, geometry(&rec)));
                }
                Err(e) => println!("map at a={} not exported: {e}", fmt_f64(p.a)),
            }
        }
        write_artifact(&dir, "geometry.csv", &branch_geometry_csv(&geo_rows))?;
        println!("artifacts written to {}", dir.display());
    }

    if branch.points.is_empty() {
        return Err(CliError::Failure(format!(
            "no branch points accepted (stop: {})",
            branch.stop.as_str()
        )));
    }
    Ok(())
}

fn print_audit_table(report: &AuditReport) {
    let row = |k: &str, v: f64| println!("{k:<26} {}", fmt_f64(v));
    println!("verdict: {} (mode {}, a={})", report.verdict.as_str(), report.mode, fmt_f64(report.a));
    row("c", report.c);
    println!("{:<26} {}", "c source", report.c_source);
    row("circularity_deficit", report.circularity_deficit);
    row("quad_residual_max", report.quad_residual_max);
    row("orth_residual_max", report.orth_residual_max);
    row("F_defect", report.f_defect);
    row("u_boundary_sup", report.u_boundary_sup);
    row("grad_bound_excess", report.grad_bound_excess);
    row("normal_deriv_dev", report.normal_deriv_dev);
    row("I", report.weinberger.i);
    row("M", report.weinberger.m);
    row("B", report.weinberger.b);
    row("area", report.weinberger.area);
    row("id1_defect", report.weinberger.id1_defect);
    row("id2_defect", report.weinberger.id2_defect);
    row("volume_defect", report.weinberger.volume_defect);
    row("weak_serrin_max", report.weak_serrin_max);
}

fn cmd_audit(args: AuditArgs) -> CliResult<()> {
    let eff = Effective::merge(
        &args.common,
        None,
        None,
        None,
        None,
        None,
        args.c_override,
        1e-8,
        true,
    )?;
    let rec = load_map(&args.map_file, eff.series)?;
    println!("{}", version_string());
    let echo = eff.echo("audit");
    println!("config: {}", echo_line(&echo));
    let cfg = AuditConfig {
        nr: eff.radial_nodes,
        m: eff.angles,
        tol: eff.tol,
        c_override: eff.c_override,
        ..AuditConfig::default()
    };
    let report = run_audit(&rec, &cfg);
    print_audit_table(&report);
    if let Some(dir) = out_dir(&eff)? {
        let doc = audit_doc(report, echo);
        write_artifact(&dir, "audit.json", &to_json(&doc).map_err(input_err)?)?;
        println!("artifacts written to {}", dir.display());
    }
    Ok(())
}

fn cmd_moments(args: MomentsArgs) -> CliResult<()> {
    let eff = Effective::merge(
        &args.common,
        Some(&args.measure),
        None,
        args.a_max,
        args.a_points,
        args.a_spacing.as_ref(),
        None,
        1e-10,
        true,
    )?;
    let measure = eff.measure()?;
    println!("{}", version_string());
    println!("config: {}", echo_line(&eff.echo("moments")));
    let grid = PolarGrid::new(eff.radial_nodes, eff.angles);
    // keep the tabulated orders well inside what a measure band can reach
    let n_top = if args.common.modes.is_some() { eff.modes.min(64) } else { 8 };
    let a_list = eff.a_grid();
    let mut curves = Vec::new();
    for n in 1..=n_top {
        let curve = moment_curve(&measure, n as u32, &a_list, &grid).map_err(input_err)?;
        println!(
            "n={n}: dM/da(0) = {} (fd, step {}), analytic = {}",
            fmt_c(curve.derivative_fd),
            fmt_f64(curve.fd_step),
            fmt_c(curve.derivative_analytic),
        );
        curves.push(curve);
    }
    let csv = moments_csv(&curves);
    print!("{csv}");
    if let Some(dir) = out_dir(&eff)? {
        write_artifact(&dir, "moments.csv", &csv)?;
        println!("artifacts written to {}", dir.display());
    }
    Ok(())
}

fn fmt_c(v: qdom_core::Complex64) -> String {
    format!("{}{}{}i", fmt_f64(v.re), if v.im < 0.0 { "-" } else { "+" }, fmt_f64(v.im.abs()))
}

fn cmd_export(args: ExportArgs) -> CliResult<()> {
    let eff = Effective::merge(&args.common, None, None, None, None, None, None, 1e-10, false)?;
    let rec = load_map(&args.map_file, eff.series)?;
    let m_b = if args.common.angles.is_some() { eff.angles } else { 4096 };
    let pts = rec.f.eval_circle(1.0, m_b);
    let csv = boundary_csv(&pts);
    match out_dir(&eff)? {
        Some(dir) => {
            write_artifact(&dir, "boundary.csv", &csv)?;
            println!("{}", version_string());
            println!("config: {}", echo_line(&eff.echo("export-boundary")));
            println!("artifacts written to {}", dir.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
