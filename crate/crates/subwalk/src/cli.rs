//! Command-line dispatch: parsed flags go to module calls, results go to
//! CSV/JSON files, and every output file is recorded in a manifest with its
//! digest.
//!
//! Exit codes: 0 success, 2 usage/validation errors, 3 numeric/capability
//! failures.  `--threads` (or `SUBWALK_THREADS`) sizes the report worker
//! pool; all computations are schedule-independent, so results are
//! byte-identical for every pool size.

use crate::bernstein::PhiSpec;
use crate::error::{Error, Result};
use crate::estimates::EstimateEnvelope;
use crate::io::{
    ctrw_to_csv, envelope_to_csv, kernel_to_csv, parse_phi, path_to_csv, to_json_pretty,
    weights_to_csv, FlatConfig, RunManifest,
};
use crate::lattice::{ctrw_kernel, nstep_kernel_convolve, nstep_kernel_spectral, LatticeKernel};
use crate::montecarlo::{
    estimate_exit_time, estimate_hitting, maximal_inequality_probe, simulate_ctrw, simulate_walk,
    SimulationConfig, DEFAULT_STEP_CAP,
};
use crate::report::{envelope_sweep, run_report, summary_table, ReportConfig};
use crate::subordination::{
    closed_form_weights, weights_exact_terms, weights_quadrature, IncrementSampler,
    SubordinationWeights,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Construct subordinate random walks on the integer lattice, compute their
/// transition kernels, and verify two-sided heat-kernel bounds.
#[derive(Parser, Debug)]
#[command(name = "subwalk", version, about)]
pub struct Cli {
    /// Worker-pool size for the report sweep (default: SUBWALK_THREADS, then 1).
    /// Results are schedule-independent: every pool size produces identical bytes.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum WeightRoute {
    /// Lévy-measure quadrature with a certified truncation tail.
    Quadrature,
    /// Generating-function series folded to the requested length.
    Series,
    /// Closed-form recurrence (power kinds only).
    Closed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum KernelMethod {
    /// Inverse FFT of the subordinate symbol raised to the step count.
    Spectral,
    /// Repeated convolution of the one-step kernel.
    Convolution,
    /// Continuous-time walk kernel at a real time (requires --t).
    Ctrw,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate one-step subordination weights a_m as CSV.
    Weights {
        /// Bernstein function literal, e.g. stable:0.5 or mix:0.3,0.7.
        #[arg(long)]
        phi: String,
        /// Truncation-tail target for the quadrature route.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Which construction to tabulate.
        #[arg(long, value_enum, default_value_t = WeightRoute::Quadrature)]
        route: WeightRoute,
        /// Term count for the series and closed routes.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Output CSV path.
        #[arg(long, default_value = "weights.csv")]
        out: PathBuf,
    },
    /// Compute an n-step (or continuous-time) transition kernel window as CSV.
    Kernel {
        #[arg(long)]
        phi: String,
        /// Lattice dimension.
        #[arg(long)]
        d: usize,
        /// Step count (spectral/convolution methods).
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Continuous time (ctrw method).
        #[arg(long)]
        t: Option<f64>,
        /// Window half-width: the CSV covers [-radius, radius]^d.
        #[arg(long)]
        radius: i64,
        /// Torus side (power of two); default grows with the radius.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = KernelMethod::Spectral)]
        method: KernelMethod,
        /// Truncation-tail target for the convolution method's weights.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value = "kernel.csv")]
        out: PathBuf,
    },
    /// Tabulate the diffusion scale r_n and the on-diagonal envelope as CSV.
    Envelope {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Largest step count tabulated (rows n = 1..=nmax).
        #[arg(long)]
        nmax: u64,
        #[arg(long, default_value = "envelope.csv")]
        out: PathBuf,
    },
    /// Sweep kernels against the two-sided envelope and report the ratio band.
    Verify {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Deepest step count in the sweep.
        #[arg(long)]
        nmax: u64,
        /// Spatial window half-width.
        #[arg(long)]
        xmax: i64,
        /// Torus side override; too small a box fails certification (exit 3).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Sample one subordinate-walk path (or a continuous-time path) as CSV.
    Simulate {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Number of subordinate steps (discrete mode).
        #[arg(long, default_value_t = 100)]
        steps: u64,
        /// Time horizon: if set, simulate the continuous-time walk instead.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        seed: u64,
        /// Which trial of the seed's reproducible stream to emit.
        #[arg(long, default_value_t = 0)]
        trial: u64,
        /// Truncation-tail target for the increment sampler.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: u64,
        #[arg(long, default_value = "path.csv")]
        out: PathBuf,
    },
    /// Estimate the mean exit time from a centered ball by Monte Carlo.
    ExitTime {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Ball radius.
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: u64,
        #[arg(long, default_value = "exit-time.json")]
        out: PathBuf,
    },
    /// Estimate a point-to-ball hitting probability by Monte Carlo.
    Hitting {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Start point, comma-separated integers of length d.
        #[arg(long)]
        x: String,
        /// Target point, comma-separated integers of length d.
        #[arg(long)]
        y: String,
        /// Step horizon.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value = "hitting.json")]
        out: PathBuf,
    },
    /// Probe the running-maximum tail within a shrunken time window.
    ProbeMax {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Ball radius.
        #[arg(long)]
        r: f64,
        /// Window-shrinking level in (0, 1).
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: u64,
        #[arg(long, default_value = "probe-max.json")]
        out: PathBuf,
    },
    /// Compute the parabolic ratio constant over a space-time cylinder pair.
    Harnack {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        d: usize,
        /// Window-shrinking level in (0, 1).
        #[arg(long)]
        gamma: f64,
        /// Outer ball radius R.
        #[arg(long)]
        radius: f64,
        /// Ball center, comma-separated integers of length d.
        #[arg(long, default_value = "0")]
        z: String,
        /// Kernel base point; defaults to the ball center.
        #[arg(long)]
        x0: Option<String>,
        /// Start depth n0; defaults to one past the hypothesis depth.
        #[arg(long)]
        n0: Option<u64>,
        /// Torus side override.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "harnack.json")]
        out: PathBuf,
    },
    /// Run the full acceptance sweep and write the aggregated report.
    Report {
        /// Flat key=value config file; keys mirror the report settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
}

/// Resolve the worker-pool size: flag, then SUBWALK_THREADS, then 1.
fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    let threads = match flag {
        Some(t) => t,
        None => match std::env::var("SUBWALK_THREADS") {
            Ok(s) => s.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!("SUBWALK_THREADS must be a positive integer; got {s:?}"))
            })?,
            Err(_) => 1,
        },
    };
    if threads == 0 {
        return Err(Error::Config("worker pool size must be at least 1".into()));
    }
    Ok(threads)
}

fn parse_point(s: &str, d: usize, what: &str) -> Result<Vec<i64>> {
    let point: Vec<i64> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| Error::Config(format!("{what} must be comma-separated integers; got {s:?}")))
        })
        .collect::<Result<_>>()?;
    if point.len() != d {
        return Err(Error::Config(format!(
            "{what} must have one coordinate per dimension (d = {d}); got {}",
            point.len()
        )));
    }
    Ok(point)
}

fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Write a JSON value and its manifest side by side.
fn emit_json<T: Serialize>(manifest: &mut RunManifest, out: &Path, value: &T) -> Result<()> {
    let json = to_json_pretty(value)?;
    manifest.write_output(out, json.as_bytes())?;
    manifest.write(&manifest_path(out))
}

fn emit_text(manifest: &mut RunManifest, out: &Path, text: &str) -> Result<()> {
    manifest.write_output(out, text.as_bytes())?;
    manifest.write(&manifest_path(out))
}

fn sampler_for(spec: &PhiSpec, tol: f64) -> Result<IncrementSampler> {
    let weights = weights_quadrature(spec, tol)?;
    IncrementSampler::new(&weights)
}

fn kernel_summary(kernel: &LatticeKernel) -> String {
    format!(
        "kernel window [-{r},{r}]^{d} on a torus of side {g} ({m} method), mass defect {e:.3e}",
        r = kernel.radius,
        d = kernel.d,
        g = kernel.grid,
        m = kernel.method.label(),
        e = kernel.mass_defect,
    )
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn cmd_weights(phi: &str, tol: f64, route: WeightRoute, count: usize, out: &Path) -> Result<String> {
    let spec = parse_phi(phi)?;
    let weights: SubordinationWeights = match route {
        WeightRoute::Quadrature => weights_quadrature(&spec, tol)?,
        WeightRoute::Series => weights_exact_terms(&spec, count)?,
        WeightRoute::Closed => {
            let entries = closed_form_weights(&spec, count)?;
            let mut w = weights_exact_terms(&spec, count)?;
            w.weights = entries;
            w
        }
    };
    let mut manifest = RunManifest::new("weights");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("route", format!("{route:?}").to_lowercase());
    manifest.echo("tol", tol);
    manifest.echo("count", weights.weights.len());
    manifest.echo("tail_mass", weights.tail_mass);
    emit_text(&mut manifest, out, &weights_to_csv(&weights))?;
    Ok(format!(
        "wrote {} weights (tail mass {:.3e}) to {}",
        weights.weights.len(),
        weights.tail_mass,
        out.display()
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_kernel(
    phi: &str,
    d: usize,
    n: u64,
    t: Option<f64>,
    radius: i64,
    grid: Option<usize>,
    method: KernelMethod,
    tol: f64,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let kernel = match method {
        KernelMethod::Spectral => nstep_kernel_spectral(&spec, d, n, radius, grid)?,
        KernelMethod::Convolution => nstep_kernel_convolve(&spec, d, n, radius, grid, tol)?,
        KernelMethod::Ctrw => {
            let t = t.ok_or_else(|| {
                Error::Config("the ctrw method needs a time horizon: pass --t".into())
            })?;
            ctrw_kernel(&spec, d, t, radius, grid)?
        }
    };
    let mut manifest = RunManifest::new("kernel");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    match kernel.time {
        crate::lattice::KernelTime::Steps(steps) => manifest.echo("n", steps),
        crate::lattice::KernelTime::Continuous(time) => manifest.echo("t", time),
    }
    manifest.echo("radius", radius);
    manifest.echo("grid", kernel.grid);
    manifest.echo("method", kernel.method.label());
    manifest.echo("mass_defect", kernel.mass_defect);
    emit_text(&mut manifest, out, &kernel_to_csv(&kernel))?;
    Ok(format!("{} -> {}", kernel_summary(&kernel), out.display()))
}

fn cmd_envelope(phi: &str, d: usize, nmax: u64, out: &Path) -> Result<String> {
    let spec = parse_phi(phi)?;
    if nmax == 0 {
        return Err(Error::Domain("nmax must be at least 1".into()));
    }
    let env = EstimateEnvelope::new(spec.clone(), d)?;
    let mut rows = Vec::with_capacity(nmax as usize);
    for n in 1..=nmax {
        rows.push((n, env.r_n(n)?, env.diagonal_scale(n)?));
    }
    let mut manifest = RunManifest::new("envelope");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("nmax", nmax);
    emit_text(&mut manifest, out, &envelope_to_csv(&rows))?;
    Ok(format!("wrote {nmax} envelope rows to {}", out.display()))
}

fn cmd_verify(
    phi: &str,
    d: usize,
    nmax: u64,
    xmax: i64,
    grid: Option<usize>,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let report = envelope_sweep(&spec, d, nmax, xmax, grid)?;
    let mut manifest = RunManifest::new("verify");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("nmax", nmax);
    manifest.echo("xmax", xmax);
    manifest.echo("grid", &report.grid);
    emit_json(&mut manifest, out, &report)?;
    Ok(format!(
        "two-sided band [{:.4}, {:.4}] (ratio {:.3}) over {} points -> {}",
        report.ratio_inf,
        report.ratio_sup,
        report.band(),
        report.points_used,
        out.display()
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    phi: &str,
    d: usize,
    steps: u64,
    horizon: Option<f64>,
    seed: u64,
    trial: u64,
    tol: f64,
    step_cap: u64,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let sampler = sampler_for(&spec, tol)?;
    let mut manifest = RunManifest::new("simulate");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("seed", seed);
    manifest.echo("trial", trial);
    manifest.echo("tol", tol);
    manifest.seed = Some(seed);
    let line = match horizon {
        None => {
            let cfg = SimulationConfig::new(d, trial + 1, seed)?
                .with_steps(steps)
                .with_step_cap(step_cap);
            let path = simulate_walk(&cfg, &sampler, trial)?;
            manifest.echo("steps", steps);
            emit_text(&mut manifest, out, &path_to_csv(&path))?;
            format!("wrote a {steps}-step path to {}", out.display())
        }
        Some(t) => {
            let cfg = SimulationConfig::new(d, trial + 1, seed)?
                .with_horizon(t)
                .with_step_cap(step_cap);
            let path = simulate_ctrw(&cfg, &sampler, trial)?;
            manifest.echo("horizon", t);
            let events = path.times.len().saturating_sub(1);
            emit_text(&mut manifest, out, &ctrw_to_csv(&path.times, &path.positions))?;
            format!(
                "wrote a continuous-time path with {events} jumps up to time {t} to {}",
                out.display()
            )
        }
    };
    Ok(line)
}

#[allow(clippy::too_many_arguments)]
fn cmd_exit_time(
    phi: &str,
    d: usize,
    r: f64,
    trials: u64,
    seed: u64,
    tol: f64,
    step_cap: u64,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let sampler = sampler_for(&spec, tol)?;
    let cfg = SimulationConfig::new(d, trials, seed)?.with_step_cap(step_cap);
    let report = estimate_exit_time(&cfg, &spec, &sampler, r)?;
    let mut manifest = RunManifest::new("exit-time");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("r", r);
    manifest.echo("trials", trials);
    manifest.echo("seed", seed);
    manifest.seed = Some(seed);
    emit_json(&mut manifest, out, &report)?;
    Ok(format!(
        "mean exit steps {:.3} +- {:.3} (x symbol = {:.4}) from radius {r}, {} censored -> {}",
        report.mean_steps,
        report.stderr,
        report.ratio,
        report.censored,
        out.display()
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_hitting(
    phi: &str,
    d: usize,
    x: &str,
    y: &str,
    n: u64,
    trials: u64,
    seed: u64,
    tol: f64,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let sampler = sampler_for(&spec, tol)?;
    let x = parse_point(x, d, "--x")?;
    let y = parse_point(y, d, "--y")?;
    let cfg = SimulationConfig::new(d, trials, seed)?;
    let report = estimate_hitting(&cfg, &spec, &sampler, &x, &y, n)?;
    let mut manifest = RunManifest::new("hitting");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("x", format!("{x:?}"));
    manifest.echo("y", format!("{y:?}"));
    manifest.echo("n", n);
    manifest.echo("trials", trials);
    manifest.echo("seed", seed);
    manifest.seed = Some(seed);
    emit_json(&mut manifest, out, &report)?;
    Ok(format!(
        "hit probability {:.5} in [{:.5}, {:.5}], scaling bound {:.5} -> {}",
        report.prob,
        report.ci_low,
        report.ci_high,
        report.bound,
        out.display()
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_probe_max(
    phi: &str,
    d: usize,
    r: f64,
    gamma: f64,
    trials: u64,
    seed: u64,
    tol: f64,
    step_cap: u64,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let sampler = sampler_for(&spec, tol)?;
    let cfg = SimulationConfig::new(d, trials, seed)?.with_step_cap(step_cap);
    let report = maximal_inequality_probe(&cfg, &spec, &sampler, r, gamma)?;
    let mut manifest = RunManifest::new("probe-max");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("r", r);
    manifest.echo("gamma", gamma);
    manifest.echo("depth", report.depth);
    manifest.echo("trials", trials);
    manifest.echo("seed", seed);
    manifest.seed = Some(seed);
    emit_json(&mut manifest, out, &report)?;
    Ok(format!(
        "running-maximum probability {:.5} +- {:.5} over {} steps at radius {r} -> {}",
        report.prob,
        report.stderr,
        report.depth,
        out.display()
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_harnack(
    phi: &str,
    d: usize,
    gamma: f64,
    radius: f64,
    z: &str,
    x0: Option<&str>,
    n0: Option<u64>,
    grid: Option<usize>,
    out: &Path,
) -> Result<String> {
    let spec = parse_phi(phi)?;
    let z = parse_point(z, d, "--z")?;
    let window = crate::estimates::harnack_window(&spec, gamma, radius, z.clone())?;
    let x0 = match x0 {
        Some(s) => parse_point(s, d, "--x0")?,
        None => z,
    };
    let n0 = match n0 {
        Some(n) => n,
        None => window.hypothesis_depth(&spec)? + 1,
    };
    let report = crate::estimates::harnack_ratio(&spec, d, n0, &x0, &window, grid)?;

    #[derive(Serialize)]
    struct HarnackArtifact<'a> {
        window: &'a crate::estimates::HarnackWindow,
        n0: u64,
        x0: &'a [i64],
        report: &'a crate::estimates::RatioReport,
    }

    let mut manifest = RunManifest::new("harnack");
    manifest.echo("phi", spec.kind().label());
    manifest.echo("d", d);
    manifest.echo("gamma", gamma);
    manifest.echo("radius", radius);
    manifest.echo("n0", n0);
    emit_json(
        &mut manifest,
        out,
        &HarnackArtifact {
            window: &window,
            n0,
            x0: &x0,
            report: &report,
        },
    )?;
    Ok(format!(
        "harnack ratio band [{:.4}, {:.4}] from depth {n0} -> {}",
        report.ratio_inf,
        report.ratio_sup,
        out.display()
    ))
}

fn cmd_report(config: Option<&Path>, threads: usize, out: &Path) -> Result<String> {
    let cfg = match config {
        Some(path) => ReportConfig::from_flat(&FlatConfig::load(path)?)?,
        None => ReportConfig::default(),
    };
    let report = run_report(&cfg, threads)?;
    let mut manifest = RunManifest::new("report");
    for (key, value) in [
        ("seed", cfg.seed.to_string()),
        ("trials_exit", cfg.trials_exit.to_string()),
        ("trials_hit", cfg.trials_hit.to_string()),
        ("trials_probe", cfg.trials_probe.to_string()),
        ("trials_calibration", cfg.trials_calibration.to_string()),
        ("box_radius", cfg.box_radius.to_string()),
        (
            "grid",
            cfg.grid.map_or("auto".into(), |g| g.to_string()),
        ),
        ("gamma_harnack", cfg.gamma_harnack.to_string()),
        ("threads", threads.to_string()),
    ] {
        manifest.echo(key, value);
    }
    manifest.seed = Some(cfg.seed);
    emit_json(&mut manifest, out, &report)?;
    let table = summary_table(&report);
    if report.all_pass {
        Ok(format!("{table}\naggregated report -> {}", out.display()))
    } else {
        let failed: Vec<&str> = report
            .criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        eprintln!("{table}");
        Err(Error::Validation(format!(
            "acceptance criteria failed: {}",
            failed.join(", ")
        )))
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Dispatch a parsed command line.  Returns the success message to print.
pub fn dispatch(cli: Cli) -> Result<String> {
    let threads = resolve_threads(cli.threads)?;
    match &cli.command {
        Command::Weights {
            phi,
            tol,
            route,
            count,
            out,
        } => cmd_weights(phi, *tol, *route, *count, out),
        Command::Kernel {
            phi,
            d,
            n,
            t,
            radius,
            grid,
            method,
            tol,
            out,
        } => cmd_kernel(phi, *d, *n, *t, *radius, *grid, *method, *tol, out),
        Command::Envelope { phi, d, nmax, out } => cmd_envelope(phi, *d, *nmax, out),
        Command::Verify {
            phi,
            d,
            nmax,
            xmax,
            grid,
            out,
        } => cmd_verify(phi, *d, *nmax, *xmax, *grid, out),
        Command::Simulate {
            phi,
            d,
            steps,
            horizon,
            seed,
            trial,
            tol,
            step_cap,
            out,
        } => cmd_simulate(phi, *d, *steps, *horizon, *seed, *trial, *tol, *step_cap, out),
        Command::ExitTime {
            phi,
            d,
            r,
            trials,
            seed,
            tol,
            step_cap,
            out,
        } => cmd_exit_time(phi, *d, *r, *trials, *seed, *tol, *step_cap, out),
        Command::Hitting {
            phi,
            d,
            x,
            y,
            n,
            trials,
            seed,
            tol,
            out,
        } => cmd_hitting(phi, *d, x, y, *n, *trials, *seed, *tol, out),
        Command::ProbeMax {
            phi,
            d,
            r,
            gamma,
            trials,
            seed,
            tol,
            step_cap,
            out,
        } => cmd_probe_max(phi, *d, *r, *gamma, *trials, *seed, *tol, *step_cap, out),
        Command::Harnack {
            phi,
            d,
            gamma,
            radius,
            z,
            x0,
            n0,
            grid,
            out,
        } => cmd_harnack(phi, *d, *gamma, *radius, z, x0.as_deref(), *n0, *grid, out),
        Command::Report { config, out } => cmd_report(config.as_deref(), threads, out),
    }
}

/// Parse argv and run; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(message) => {
            println!("{message}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_resolution_prefers_flag_then_env() {
        assert_eq!(resolve_threads(Some(4)).unwrap(), 4);
        assert_eq!(resolve_threads(Some(0)).unwrap_err().exit_code(), 2);
        // The env fallback is read at call time; without the variable the
        // default is a single worker.
        if std::env::var("SUBWALK_THREADS").is_err() {
            assert_eq!(resolve_threads(None).unwrap(), 1);
        }
    }

    #[test]
    fn points_parse_with_dimension_checks() {
        assert_eq!(parse_point("3,-4", 2, "--x").unwrap(), vec![3, -4]);
        assert_eq!(parse_point("3", 2, "--x").unwrap_err().exit_code(), 2);
        assert_eq!(parse_point("a,b", 2, "--x").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn manifest_paths_sit_next_to_outputs() {
        assert_eq!(
            manifest_path(Path::new("runs/weights.csv")),
            Path::new("runs/weights.manifest.json")
        );
    }

    #[test]
    fn command_line_grammar_parses_the_documented_examples() {
        let cli = Cli::try_parse_from([
            "subwalk", "weights", "--phi", "stable:0.5", "--tol", "1e-10",
        ])
        .unwrap();
        match cli.command {
            Command::Weights { phi, tol, .. } => {
                assert_eq!(phi, "stable:0.5");
                assert_eq!(tol, 1e-10);
            }
            other => panic!("parsed wrong command: {other:?}"),
        }
        let cli = Cli::try_parse_from([
            "subwalk", "verify", "--phi", "stable:0.5", "--d", "1", "--nmax", "64", "--xmax",
            "64",
        ])
        .unwrap();
        match cli.command {
            Command::Verify { nmax, xmax, .. } => {
                assert_eq!((nmax, xmax), (64, 64));
            }
            other => panic!("parsed wrong command: {other:?}"),
        }
        // Unknown flags are usage errors.
        assert!(Cli::try_parse_from(["subwalk", "weights", "--bogus"]).is_err());
    }
}
