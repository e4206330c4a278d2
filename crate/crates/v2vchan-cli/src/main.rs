//! Command-line front end for the v2vchan simulator.
//!
//! Four subcommands: `gen` writes channel impulse-response frames to a file,
//! `tacf` and `sccf` tabulate the temporal and spatial correlation functions
//! (closed form, quadrature, and optionally Monte Carlo) as CSV, and
//! `validate` runs the numerical self-checks and emits a JSON report.
//!
//! Exit codes: 0 on success, 1 on runtime or validation failure, 2 on usage
//! errors (the clap default).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use v2vchan::chanmodel::{generate_cir, SimulationConfig};
use v2vchan::config::{parse_document, resolve, ConfigDocument, LoadedConfig};
use v2vchan::export::{
    export_cir, export_cir_to_path, export_taps_csv_to_path, ExportFormat, ExportSummary,
};
use v2vchan::stats::{
    sccf_closed, sccf_quadrature, stcf_closed, stcf_mc, stcf_quadrature, CorrelationQuery, Side,
    SideGeometry,
};

// ---------------------------------------------------------------------------
// Argument structure
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "v2vchan",
    version,
    about = "Non-stationary vehicle-to-vehicle MIMO channel simulator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate channel impulse-response frames
    Gen(GenArgs),
    /// Tabulate the temporal autocorrelation over a lag grid
    Tacf(TacfArgs),
    /// Tabulate the spatial correlation over an element-spacing grid
    Sccf(SccfArgs),
    /// Run the numerical self-checks and emit a JSON report
    Validate(ValidateArgs),
}

/// Scenario selection shared by all subcommands. A configuration file, a
/// preset name, or both (the file's sections override the preset's); the
/// scalar flags override either.
#[derive(Args)]
struct ScenarioArgs {
    /// TOML configuration file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Built-in scenario: opposite-direction-1, opposite-direction-2, right-turn
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override the random seed
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Override the run duration in seconds
    #[arg(long, value_name = "SECONDS")]
    duration: Option<f64>,
    /// Override the sample rate in Hz (default: derived from peak Doppler)
    #[arg(long, value_name = "HZ")]
    sample_rate: Option<f64>,
}

impl ScenarioArgs {
    /// Loads and resolves the scenario, echoing the provenance of any
    /// preset-supplied values to stderr.
    fn load(&self) -> Result<LoadedConfig> {
        let mut document = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                parse_document(&text).with_context(|| format!("cannot parse {}", path.display()))?
            }
            None => ConfigDocument::default(),
        };
        if let Some(name) = &self.preset {
            document.preset = Some(name.clone());
        }
        if document.preset.is_none() && self.config.is_none() {
            bail!("no scenario given: pass --preset, --config, or both");
        }
        if let Some(seed) = self.seed {
            document.seed = Some(seed);
        }
        if let Some(duration) = self.duration {
            document.duration_s = Some(duration);
        }
        if let Some(rate) = self.sample_rate {
            document.sample_rate_hz = Some(rate);
        }
        let loaded = resolve(&document).context("configuration rejected")?;
        for note in &loaded.provenance {
            eprintln!("note: {note}");
        }
        Ok(loaded)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// One CSV row per path and element pair, delays in seconds
    Csv,
    /// Dense binary records (fixed 52-byte layout, little endian)
    Raw,
    /// CSV with delays quantised to tap indices at the sample rate
    Taps,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output file
    #[arg(long, short, value_name = "PATH")]
    output: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct TacfArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Reference times, comma separated (seconds)
    #[arg(long, value_name = "T0,T1,...", default_value = "0")]
    t: String,
    /// Lag grid start:step:end (seconds)
    #[arg(long, value_name = "START:STEP:END", default_value = "0:0.0005:0.02")]
    lag: String,
    /// Monte Carlo realizations per point (0 disables the estimate)
    #[arg(long, default_value_t = 0)]
    realizations: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SccfArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Reference times, comma separated (seconds)
    #[arg(long, value_name = "T0,T1,...", default_value = "0")]
    t: String,
    /// Spacing grid start:step:end (carrier wavelengths)
    #[arg(long, value_name = "START:STEP:END", default_value = "0:0.05:1.5")]
    spacing: String,
    /// Terminal side whose array is swept
    #[arg(long, value_enum, default_value_t = SideArg::Mt)]
    side: SideArg,
    /// Monte Carlo realizations per point (0 disables the estimate)
    #[arg(long, default_value_t = 0)]
    realizations: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    /// Transmitting terminal
    Mt,
    /// Receiving terminal
    Mr,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output JSON file (stdout when omitted)
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Tacf(args) => run_tacf(args),
        Command::Sccf(args) => run_sccf(args),
        Command::Validate(args) => run_validate(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

fn run_gen(args: GenArgs) -> Result<()> {
    let config = args.scenario.load()?.config;
    let stream = generate_cir(&config).context("cannot start the generator")?;
    let sample_rate_hz = stream.sample_rate_hz();
    let frame_count = stream.frame_count();
    let summary: ExportSummary = match args.format {
        OutputFormat::Csv => export_cir_to_path(stream, ExportFormat::Csv, &args.output),
        OutputFormat::Raw => export_cir_to_path(stream, ExportFormat::Raw, &args.output),
        OutputFormat::Taps => export_taps_csv_to_path(stream, sample_rate_hz, &args.output),
    }
    .with_context(|| format!("export to {} failed", args.output.display()))?;
    debug_assert_eq!(summary.frames, frame_count as u64);
    println!(
        "wrote {} frames ({} records) to {} at {:.3} Hz",
        summary.frames,
        summary.records,
        args.output.display(),
        sample_rate_hz,
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// Correlation tables
// ---------------------------------------------------------------------------

/// Parses a comma-separated list of finite numbers.
fn parse_list(spec: &str) -> Result<Vec<f64>> {
    let values = spec
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("`{spec}` is not a comma-separated number list"))?;
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        bail!("`{spec}` must list at least one finite number");
    }
    Ok(values)
}

/// Parses an inclusive `start:step:end` grid. The end point is included
/// whenever it lands on the grid within rounding slack.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, step, end] = parts.as_slice() else {
        bail!("`{spec}` is not of the form start:step:end");
    };
    let (start, step, end) = (
        start.trim().parse::<f64>(),
        step.trim().parse::<f64>(),
        end.trim().parse::<f64>(),
    );
    let (Ok(start), Ok(step), Ok(end)) = (start, step, end) else {
        bail!("`{spec}` is not of the form start:step:end with numbers");
    };
    if !start.is_finite() || !step.is_finite() || !end.is_finite() || step <= 0.0 || end < start {
        bail!("grid `{spec}` needs finite bounds, step > 0, and end >= start");
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// One output row of a correlation table: the closed form, the quadrature
/// reference, and optionally a Monte Carlo estimate with its standard error.
struct CorrelationRow {
    closed: Complex64,
    quadrature: Complex64,
    mc: Option<(Complex64, f64)>,
}

fn push_row(table: &mut String, leader: &str, row: &CorrelationRow) {
    let _ = write!(
        table,
        "{leader},{:.16e},{:.16e},{:.16e},{:.16e}",
        row.closed.re, row.closed.im, row.quadrature.re, row.quadrature.im
    );
    match row.mc {
        Some((value, std_error)) => {
            let _ = writeln!(
                table,
                ",{:.16e},{:.16e},{:.16e}",
                value.re, value.im, std_error
            );
        }
        None => {
            let _ = writeln!(table, ",,,");
        }
    }
}

fn evaluate_row(
    config: &SimulationConfig,
    query: &CorrelationQuery,
    realizations: usize,
) -> Result<CorrelationRow> {
    let lambda = config.wavelength_m();
    let mt = SideGeometry {
        kappa: config.kappa_mt,
        profile: &config.mt.velocity,
        cluster: &config.clusters[query.path].mt,
    };
    let mr = SideGeometry {
        kappa: config.kappa_mr,
        profile: &config.mr.velocity,
        cluster: &config.clusters[query.path].mr,
    };
    let closed = stcf_closed(&mt, &mr, lambda, query)?;
    let quadrature = stcf_quadrature(&mt, &mr, lambda, query)?;
    let mc = if realizations > 0 {
        let estimate = stcf_mc(config, query, realizations)?;
        Some((estimate.value, estimate.std_error))
    } else {
        None
    };
    Ok(CorrelationRow {
        closed,
        quadrature,
        mc,
    })
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, contents)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_tacf(args: TacfArgs) -> Result<()> {
    let config = args.scenario.load()?.config;
    let times = parse_list(&args.t)?;
    let lags = parse_grid(&args.lag)?;
    let mut table = String::from("t,dt_s,closed_re,closed_im,quad_re,quad_im,mc_re,mc_im,mc_se\n");
    for &t in &times {
        for &dt in &lags {
            let query = CorrelationQuery {
                t,
                dt,
                d_p: 0.0,
                d_q: 0.0,
                side: Side::Both,
                path: 0,
            };
            let row = evaluate_row(&config, &query, args.realizations)
                .with_context(|| format!("autocorrelation at t = {t}, dt = {dt} failed"))?;
            push_row(&mut table, &format!("{t:.16e},{dt:.16e}"), &row);
        }
    }
    write_output(args.output.as_deref(), &table)
}

fn run_sccf(args: SccfArgs) -> Result<()> {
    let config = args.scenario.load()?.config;
    let times = parse_list(&args.t)?;
    let spacings_wl = parse_grid(&args.spacing)?;
    let lambda = config.wavelength_m();
    let mut table =
        String::from("t,spacing_wl,closed_re,closed_im,quad_re,quad_im,mc_re,mc_im,mc_se\n");
    for &t in &times {
        for &spacing_wl in &spacings_wl {
            let spacing_m = spacing_wl * lambda;
            let (d_p, d_q, side) = match args.side {
                SideArg::Mt => (spacing_m, 0.0, Side::Mt),
                SideArg::Mr => (0.0, spacing_m, Side::Mr),
            };
            let query = CorrelationQuery {
                t,
                dt: 0.0,
                d_p,
                d_q,
                side,
                path: 0,
            };
            let row = evaluate_row(&config, &query, args.realizations).with_context(|| {
                format!("spatial correlation at t = {t}, spacing = {spacing_wl} wavelengths failed")
            })?;
            push_row(&mut table, &format!("{t:.16e},{spacing_wl:.16e}"), &row);
        }
    }
    write_output(args.output.as_deref(), &table)
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Report {
    config: ConfigSummary,
    checks: Vec<Check>,
    passed: bool,
}

#[derive(Serialize)]
struct ConfigSummary {
    preset: Option<String>,
    carrier_freq_hz: f64,
    duration_s: f64,
    sample_rate_hz: f64,
    paths: usize,
    rays_per_path: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    residual: f64,
    threshold: f64,
}

impl Check {
    fn new(name: &'static str, residual: f64, threshold: f64) -> Check {
        Check {
            name,
            passed: residual.is_finite() && residual <= threshold,
            residual,
            threshold,
        }
    }
}

/// `J0(x) = (1/π)·∫_0^π cos(x·sin θ) dθ` by composite Simpson, independent
/// of the library's Bessel code.
fn j0_simpson(x: f64) -> f64 {
    let n = 20_000usize;
    let h = std::f64::consts::PI / n as f64;
    let f = |theta: f64| (x * theta.sin()).cos();
    let mut acc = f(0.0) + f(std::f64::consts::PI);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    acc * h / 3.0 / std::f64::consts::PI
}

fn sides(config: &SimulationConfig) -> (SideGeometry<'_>, SideGeometry<'_>) {
    (
        SideGeometry {
            kappa: config.kappa_mt,
            profile: &config.mt.velocity,
            cluster: &config.clusters[0].mt,
        },
        SideGeometry {
            kappa: config.kappa_mr,
            profile: &config.mr.velocity,
            cluster: &config.clusters[0].mr,
        },
    )
}

fn run_validate(args: ValidateArgs) -> Result<()> {
    let loaded = args.scenario.load()?;
    let config = &loaded.config;
    let lambda = config.wavelength_m();
    let (mt, mr) = sides(config);
    let mut checks = Vec::new();

    // closed-form spatial correlation against quadrature
    let mut residual = 0.0f64;
    for kappa in [0.0, 1.0, 3.0, 10.0] {
        for mean in [
            0.0,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_2,
        ] {
            for i in 0..31 {
                let spacing = 3.0 * lambda * i as f64 / 30.0;
                let closed = sccf_closed(kappa, mean, spacing, lambda)?;
                let quad = sccf_quadrature(kappa, mean, spacing, lambda)?;
                residual = residual.max((closed - quad).norm());
            }
        }
    }
    checks.push(Check::new(
        "spatial_closed_matches_quadrature",
        residual,
        1e-8,
    ));

    // closed-form temporal correlation against quadrature, on this scenario
    let mut residual = 0.0f64;
    let t_grid = [0.0, config.duration_s / 2.0, config.duration_s];
    for &t in &t_grid {
        for i in 0..21 {
            let dt = 20e-3 * i as f64 / 20.0;
            let query = CorrelationQuery {
                t,
                dt,
                d_p: 0.0,
                d_q: 0.0,
                side: Side::Both,
                path: 0,
            };
            let closed = stcf_closed(&mt, &mr, lambda, &query)?;
            let quad = stcf_quadrature(&mt, &mr, lambda, &query)?;
            residual = residual.max((closed - quad).norm());
        }
    }
    checks.push(Check::new(
        "temporal_closed_matches_quadrature",
        residual,
        1e-3,
    ));

    // exact unit correlation at zero lag
    let origin = CorrelationQuery {
        t: 0.0,
        dt: 0.0,
        d_p: 0.0,
        d_q: 0.0,
        side: Side::Both,
        path: 0,
    };
    let at_origin = stcf_closed(&mt, &mr, lambda, &origin)?;
    checks.push(Check::new(
        "zero_lag_correlation_is_exactly_one",
        (at_origin - Complex64::new(1.0, 0.0)).norm(),
        0.0,
    ));

    // correlation magnitudes bounded by one
    let mut residual = 0.0f64;
    for &t in &t_grid {
        for i in 0..21 {
            let dt = 20e-3 * i as f64 / 20.0;
            let query = CorrelationQuery {
                t,
                dt,
                d_p: 0.0,
                d_q: 0.0,
                side: Side::Both,
                path: 0,
            };
            residual = residual.max(stcf_closed(&mt, &mr, lambda, &query)?.norm() - 1.0);
        }
    }
    checks.push(Check::new(
        "correlation_magnitude_bounded_by_one",
        residual,
        1e-9,
    ));

    // reflecting the mean angle conjugates the spatial correlation
    let mut residual = 0.0f64;
    for kappa in [config.kappa_mt, config.kappa_mr] {
        for i in 0..=20 {
            let spacing = 1.5 * lambda * i as f64 / 20.0;
            let a = sccf_closed(kappa, 0.6, spacing, lambda)?;
            let b = sccf_closed(kappa, std::f64::consts::PI - 0.6, spacing, lambda)?;
            residual = residual.max((a - b.conj()).norm());
        }
    }
    checks.push(Check::new(
        "mean_reflection_conjugates_sccf",
        residual,
        1e-12,
    ));

    // path powers renormalise to one on every frame of a short run
    let mut short = config.clone();
    short.duration_s = config
        .duration_s
        .min(200.0 / short.effective_sample_rate_hz());
    let mut residual = 0.0f64;
    for frame in generate_cir(&short)? {
        let frame = frame?;
        let total: f64 = frame.paths.iter().map(|p| p.power).sum();
        residual = residual.max((total - 1.0).abs());
    }
    checks.push(Check::new("path_powers_sum_to_one", residual, 1e-12));

    // two short runs serialize identically
    let mut first = Vec::new();
    let mut second = Vec::new();
    export_cir(generate_cir(&short)?, ExportFormat::Raw, &mut first)?;
    export_cir(generate_cir(&short)?, ExportFormat::Raw, &mut second)?;
    checks.push(Check::new(
        "generation_is_deterministic",
        if first == second { 0.0 } else { 1.0 },
        0.0,
    ));

    // the isotropic limit of the spatial correlation is Bessel J0
    let mut residual = 0.0f64;
    for i in 0..31 {
        let spacing = 3.0 * lambda * i as f64 / 30.0;
        let closed = sccf_closed(0.0, 0.9, spacing, lambda)?;
        let reference = j0_simpson(std::f64::consts::TAU * spacing / lambda);
        residual = residual.max((closed - Complex64::new(reference, 0.0)).norm());
    }
    checks.push(Check::new("isotropic_limit_matches_j0", residual, 1e-9));

    let passed = checks.iter().all(|check| check.passed);
    let report = Report {
        config: ConfigSummary {
            preset: args.scenario.preset.clone(),
            carrier_freq_hz: config.carrier_freq_hz,
            duration_s: config.duration_s,
            sample_rate_hz: config.effective_sample_rate_hz(),
            paths: config.clusters.len(),
            rays_per_path: config.rays_per_path,
            seed: config.seed,
        },
        checks,
        passed,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_output(args.output.as_deref(), &json)?;
    if !passed {
        bail!("one or more self-checks failed");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_inclusive_and_validated() {
        assert_eq!(
            parse_grid("0:0.5:2").unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        // 0.05 steps accumulate rounding; the end point must still be included
        assert_eq!(parse_grid("0:0.05:1.5").unwrap().len(), 31);
        assert!(parse_grid("0:0:1").is_err());
        assert!(parse_grid("2:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn lists_reject_empty_and_non_finite_entries() {
        assert_eq!(parse_list("0, 1.5,2").unwrap(), vec![0.0, 1.5, 2.0]);
        assert!(parse_list("").is_err());
        assert!(parse_list("1,inf").is_err());
        assert!(parse_list("1,,2").is_err());
    }

    #[test]
    fn rows_leave_monte_carlo_columns_empty_when_disabled() {
        let mut table = String::new();
        let row = CorrelationRow {
            closed: Complex64::new(1.0, 0.0),
            quadrature: Complex64::new(1.0, -0.5),
            mc: None,
        };
        push_row(&mut table, "0,1", &row);
        assert!(table.ends_with(",,,\n"));
        assert_eq!(table.matches(',').count(), 8, "9 columns, 8 separators");
    }
}
