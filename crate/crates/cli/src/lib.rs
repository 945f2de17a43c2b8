//! Command-line front end for `orient`: condition tables, single-field simulations,
//! parameter sweeps and exact-versus-analytic comparisons.

pub mod config;
pub mod svg;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use orient_core::{
    condition_amplitudes, field_time, first_order_wavepacket, magnus_vs_exact_report, max_orientation_over_revival,
    orientation_trace, population_phase_report, propagate_exact, run_sweep, theta_integrals, AxisKind, Branch,
    FieldConfig, PopulationPhaseReport, RecordMode, RotorModel, SweepMode, WavePacket,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use config::RunConfig;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "orient", version, about = "Two-pulse terahertz design for maximal field-free orientation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Analytic,
    Both,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => SweepMode::Exact,
            ModeArg::Analytic => SweepMode::Analytic,
            ModeArg::Both => SweepMode::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Text,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "orient-out")]
    pub out_dir: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the optimal overlap magnitudes for each branch and winding.
    Conditions {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        branch: Option<u8>,
        #[arg(long, default_value_t = 0)]
        max_winding: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Also save `conditions.csv` and a manifest here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Propagate one designed field and report populations, phases and the orientation trace.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Scan the design over one or two axes.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Overrides `[sweep] mode`.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Exact versus first-order populations and phases along one axis.
    Compare {
        #[command(flatten)]
        run: RunArgs,
    },
}

/// A numerical failure that is not a core error, e.g. every sweep point failed.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

/// Exit code for an error: 2 for numerical failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<NumericalFailure>() {
            return EXIT_NUMERICAL;
        }
        if let Some(e) = cause.downcast_ref::<orient_core::Error>() {
            use orient_core::Error::*;
            return match e {
                NormDrift { .. } | QuadratureNotConverged { .. } | NotNormalized { .. } | Consistency(_) => EXIT_NUMERICAL,
                QuantumNumbers { .. } | InvalidParameter { .. } | UndefinedPhase(_) => EXIT_USAGE,
            };
        }
    }
    EXIT_USAGE
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub subcommand: &'a str,
    pub version: &'a str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config: &'a RunConfig,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
    warnings: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), warnings: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    fn finish(mut self, subcommand: &str, config: &RunConfig) -> Result<()> {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".into());
        let manifest = RunManifest {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
            config,
            outputs,
            warnings: std::mem::take(&mut self.warnings),
        };
        let json = serde_json::to_string_pretty(&manifest)?;
        self.write("manifest.json", json + "\n")?;
        println!("wrote {} files to {}", self.written.len(), self.dir.display());
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Conditions { branch, max_winding, format, out_dir } => {
            let table = conditions_table(branch, max_winding, format)?;
            print!("{table}");
            if let Some(dir) = out_dir {
                let csv = conditions_table(branch, max_winding, TableFormat::Csv)?;
                let mut out = Outputs::new(&dir)?;
                out.write("conditions.csv", csv)?;
                out.finish("conditions", &RunConfig::parse("")?)?;
            }
            Ok(())
        }
        Command::Simulate { run, mode } => simulate(&run, mode.into()),
        Command::Sweep { run, mode } => sweep(&run, mode.map(Into::into)),
        Command::Compare { run } => compare(&run),
    }
}

/// Rows of `branch, j, |θ₁|/π, |θ₂|/π, ratio, phase relation`.
pub fn conditions_table(branch: Option<u8>, max_winding: u32, format: TableFormat) -> Result<String> {
    let branches: Vec<Branch> = match branch {
        Some(b) => vec![Branch::try_from(b)?],
        None => vec![Branch::First, Branch::Second],
    };
    let mut rows = Vec::new();
    for b in branches {
        for j in 0..=max_winding {
            let c = condition_amplitudes(b, j)?;
            rows.push([
                c.branch.to_string(),
                j.to_string(),
                format!("{:.6}", c.theta1_mag / std::f64::consts::PI),
                format!("{:.6}", c.theta2_mag / std::f64::consts::PI),
                format!("{:.6}", c.ratio),
                "2arg(theta1)-arg(theta2)=(k+1/2)pi".to_string(),
            ]);
        }
    }
    let header = ["branch", "j", "theta1_over_pi", "theta2_over_pi", "ratio", "phase_relation"];
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for r in &rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        TableFormat::Text => {
            let widths: Vec<usize> = (0..header.len())
                .map(|k| rows.iter().map(|r| r[k].len()).chain([header[k].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<&str>| {
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ") + "\n"
            };
            out.push_str(&line(header.to_vec()));
            for r in &rows {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
            }
        }
    }
    Ok(out)
}

fn load(run: &RunArgs) -> Result<RunConfig> {
    let raw = RunConfig::load(&run.config)?;
    raw.resolve()
}

fn report_csv(r: &PopulationPhaseReport) -> String {
    let mut s = String::from("state,population,phase\n");
    for (j, (p, phi)) in r.populations.iter().zip(&r.phases).enumerate() {
        let _ = writeln!(s, "{j},{p:?},{phi:?}");
    }
    s
}

fn trace_csv(samples: &[(f64, f64)]) -> String {
    let mut s = String::from("t,orientation\n");
    for (t, v) in samples {
        let _ = writeln!(s, "{t:?},{v:?}");
    }
    s
}

fn field_csv(field: &FieldConfig, n: usize) -> String {
    let n = n.max(2);
    let h = (field.t_end - field.t_start) / (n - 1) as f64;
    let mut s = String::from("t,field\n");
    for i in 0..n {
        let t = field.t_start + h * i as f64;
        let _ = writeln!(s, "{t:?},{:?}", field_time(field, t));
    }
    s
}

fn trajectory_csv(trajectory: &[(f64, WavePacket)]) -> String {
    let dim = trajectory.first().map(|(_, p)| p.dim()).unwrap_or(0);
    let mut s = String::from("t");
    for j in 0..dim {
        let _ = write!(s, ",re_c{j},im_c{j}");
    }
    for j in 0..dim {
        let _ = write!(s, ",p{j}");
    }
    s.push('\n');
    for (t, p) in trajectory {
        let _ = write!(s, "{t:?}");
        for c in p.coeffs() {
            let _ = write!(s, ",{:?},{:?}", c.re, c.im);
        }
        for c in p.coeffs() {
            let _ = write!(s, ",{:?}", c.norm_sqr());
        }
        s.push('\n');
    }
    s
}

fn three_state(model: &RotorModel) -> Result<RotorModel> {
    Ok(RotorModel::new(model.b(), model.mu(), 2)?)
}

fn simulate(run: &RunArgs, mode: SweepMode) -> Result<()> {
    let mut cfg = load(run)?;
    let model = cfg.model;
    let targets = cfg.target.resolve()?;
    let field = cfg.design_point()?.field(&targets, &model)?;
    let mut out = Outputs::new(&run.out_dir)?;
    if field.overlap_warning {
        out.warn(format!(
            "pulse spectra overlap the other transition (fraction {:.2e}); achieved overlaps will deviate from the targets",
            field.spectral_overlap(&model)
        ));
    }
    out.write("field.csv", field_csv(&field, cfg.output.field_points))?;

    let span = cfg.output.trace_revivals * model.revival_period();
    let mut series = Vec::new();
    for record in mode.record_modes() {
        let (packet, orient_model) = match record {
            RecordMode::Exact => {
                let mut control = cfg.propagation;
                if cfg.output.trajectory && control.record_every.is_none() {
                    control.record_every = Some(10);
                }
                let result = propagate_exact(&WavePacket::ground(model.dim(), field.t_start), &field, &model, &control)
                    .context("exact propagation failed")?;
                if cfg.output.trajectory {
                    out.write("trajectory.csv", trajectory_csv(&result.trajectory))?;
                }
                println!("exact: norm drift {:.2e} over {} steps of {:.4e}", result.norm_drift, result.steps, result.dt);
                (result.final_state, model)
            }
            RecordMode::Analytic => {
                let th = theta_integrals(&field, &model, field.t_end)?;
                (first_order_wavepacket(&th), three_state(&model)?)
            }
        };
        let report = population_phase_report(&packet);
        let (max, t_max) = max_orientation_over_revival(&packet, &orient_model);
        let trace = orientation_trace(&packet, &orient_model, field.t_end, field.t_end + span, cfg.output.trace_points);
        println!(
            "{record}: |<cos theta>|max = {max:.6} at t = {t_max:.6}; populations {}",
            report.populations.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>().join(" ")
        );
        out.write(&format!("trace_{record}.csv"), trace_csv(&trace.samples))?;
        out.write(&format!("report_{record}.csv"), report_csv(&report))?;
        series.push((record, trace.samples));
    }
    if run.svg || cfg.output.svg {
        let labels: Vec<String> = series.iter().map(|(m, _)| m.to_string()).collect();
        let s: Vec<svg::Series> = series
            .iter()
            .zip(&labels)
            .map(|((_, pts), l)| svg::Series { label: l, points: pts.clone() })
            .collect();
        out.write("trace.svg", svg::line_plot("Orientation after the pulses", "t", "<cos theta>", &s))?;
        cfg.output.svg = true;
    }
    out.finish("simulate", &cfg)
}

fn axis_label(kind: AxisKind) -> &'static str {
    match kind {
        AxisKind::Bandwidth => "bandwidth (1/tau')",
        AxisKind::Detuning => "detuning",
        AxisKind::DetuningRelative => "detuning (omega01)",
        AxisKind::Delay => "delay (tau')",
    }
}

fn sweep(run: &RunArgs, mode: Option<SweepMode>) -> Result<()> {
    let mut cfg = load(run)?;
    let sweep_cfg = cfg.sweep_config(mode)?;
    if let (Some(m), Some(s)) = (mode, cfg.sweep.as_mut()) {
        s.mode = m;
    }
    let result = run_sweep(&sweep_cfg, &cfg.model)?;
    let mut out = Outputs::new(&run.out_dir)?;
    let failures = result.failures();
    if failures == result.records.len() {
        let first = result.records.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        return Err(NumericalFailure(format!("all {failures} sweep points failed; first error: {first}")).into());
    }
    if failures > 0 {
        let first = result.records.iter().find_map(|r| r.error.clone()).unwrap_or_default();
        out.warn(format!("{failures} of {} sweep records failed; first error: {first}", result.records.len()));
    }
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    out.write("sweep.csv", csv)?;

    if run.svg || cfg.output.svg {
        let axes = &sweep_cfg.axes;
        if axes.len() == 1 {
            let xs = axes[0].values();
            let labels: Vec<String> = result.modes.iter().map(|m| m.to_string()).collect();
            let series: Vec<svg::Series> = result
                .modes
                .iter()
                .zip(&labels)
                .map(|(&m, l)| svg::Series { label: l, points: xs.iter().copied().zip(result.orientation(m)).collect() })
                .collect();
            out.write("sweep.svg", svg::line_plot("|<cos theta>|max", axis_label(axes[0].kind), "|<cos theta>|max", &series))?;
        } else {
            for &m in &result.modes {
                let map = svg::heatmap(
                    &format!("|<cos theta>|max ({m})"),
                    axis_label(axes[0].kind),
                    axis_label(axes[1].kind),
                    &axes[0].values(),
                    &axes[1].values(),
                    &result.orientation(m),
                );
                out.write(&format!("sweep_{m}.svg"), map)?;
            }
        }
        cfg.output.svg = true;
    }
    let best = result
        .records
        .iter()
        .filter(|r| r.max_orientation.is_finite())
        .max_by(|a, b| a.max_orientation.total_cmp(&b.max_orientation));
    if let Some(b) = best {
        println!("{} records; best |<cos theta>|max = {:.6} ({}) at {:?}", result.records.len(), b.max_orientation, b.mode, b.axis_values);
    }
    out.finish("sweep", &cfg)
}

fn compare(run: &RunArgs) -> Result<()> {
    let mut cfg = load(run)?;
    let Some(section) = cfg.compare.clone() else {
        bail!("config has no [compare] section");
    };
    if section.values.is_empty() {
        bail!("[compare] values is empty");
    }
    let model = cfg.model;
    let targets = cfg.target.resolve()?;
    let base = cfg.design_point()?;
    let mut out = Outputs::new(&run.out_dir)?;
    let mut csv = section.axis.name().to_string();
    for kind in ["exact", "analytic"] {
        for j in 0..3 {
            let _ = write!(csv, ",p{j}_{kind}");
        }
    }
    for kind in ["exact", "analytic"] {
        for j in 0..3 {
            let _ = write!(csv, ",phase{j}_{kind}");
        }
    }
    csv.push_str(",orientation_exact,orientation_analytic,max_population_diff,norm_drift\n");
    let mut exact_pts = Vec::new();
    let mut analytic_pts = Vec::new();
    for &v in &section.values {
        let field = base.with_axis(section.axis, v, &model).field(&targets, &model)?;
        let rec = magnus_vs_exact_report(&field, &model, &cfg.propagation)
            .with_context(|| format!("{} = {v}", section.axis.name()))?;
        let _ = write!(csv, "{v:?}");
        for r in [&rec.exact, &rec.analytic] {
            for p in &r.populations {
                let _ = write!(csv, ",{p:?}");
            }
        }
        for r in [&rec.exact, &rec.analytic] {
            for p in &r.phases {
                let _ = write!(csv, ",{p:?}");
            }
        }
        let _ = writeln!(
            csv,
            ",{:?},{:?},{:?},{:?}",
            rec.exact_orientation,
            rec.analytic_orientation,
            rec.max_population_diff(),
            rec.norm_drift
        );
        println!(
            "{} = {v}: exact {:.6}, analytic {:.6}, max population diff {:.3e}",
            section.axis.name(),
            rec.exact_orientation,
            rec.analytic_orientation,
            rec.max_population_diff()
        );
        exact_pts.push((v, rec.exact_orientation));
        analytic_pts.push((v, rec.analytic_orientation));
    }
    out.write("comparison.csv", csv)?;
    if run.svg || cfg.output.svg {
        let series = [svg::Series { label: "exact", points: exact_pts }, svg::Series { label: "analytic", points: analytic_pts }];
        out.write("comparison.svg", svg::line_plot("|<cos theta>|max", axis_label(section.axis), "|<cos theta>|max", &series))?;
        cfg.output.svg = true;
    }
    out.finish("compare", &cfg)
}
