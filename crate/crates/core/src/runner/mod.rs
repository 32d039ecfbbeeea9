//! Scenario orchestration: builds initial states, runs trajectories or
//! sweeps, and writes CSV files plus a `manifest.json` describing the run.

pub mod config;
pub mod output;
pub mod signal;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde_json::json;

use crate::analytics::{self, Crossing, EffectiveParams};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::models::{evolve, Model, ObserverSelection, SimParams};
use crate::observables::ObservableSeries;
use crate::state::{
    make_band_projected_spinor, make_gaussian_scalar, make_gaussian_spinor, Band, GaussianSpec,
};

pub use config::{InitMode, Overrides, ScenarioConfig, ScenarioKind, SweepSpec, OUT_DIR_ENV};
use output::{fmt_f64, fmt_opt, CsvWriter};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.json";

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    /// Every file written, manifest last.
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub tainted: bool,
    pub wall_time: Duration,
}

/// Files and diagnostics collected while a scenario runs.
#[derive(Default)]
struct Outputs {
    files: Vec<(String, &'static [&'static str])>,
    warnings: Vec<String>,
    tainted: bool,
    analytics: serde_json::Value,
}

impl Outputs {
    fn absorb(&mut self, label: &str, series: &ObservableSeries) {
        self.tainted |= series.tainted;
        for w in &series.warnings {
            self.warnings.push(if label.is_empty() { w.clone() } else { format!("{label}: {w}") });
        }
    }

    fn csv(&mut self, dir: &Path, name: &str, header: &'static [&'static str]) -> Result<CsvWriter> {
        self.files.push((name.to_string(), header));
        CsvWriter::create(dir.join(name), header)
    }
}

/// Validates `config`, runs it and writes every output into `config.output_dir`.
///
/// Nothing is written when validation fails.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    info!("running {} into {}", config.scenario, dir.display());

    let mut out = Outputs::default();
    match config.scenario {
        ScenarioKind::LzSweep => write_lz_sweep(config, &mut out)?,
        ScenarioKind::SpreadComparison => write_spread_comparison(config, &mut out)?,
        _ => write_trajectory(config, &mut out)?,
    }
    for w in &out.warnings {
        warn!("{w}");
    }

    let wall_time = start.elapsed();
    let manifest = json!({
        "manifest_version": MANIFEST_VERSION,
        "csv_schema_version": output::CSV_SCHEMA_VERSION,
        "code_version": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "scenario": config.scenario.name(),
        "config": config,
        "grid": { "n_modes": config.params.n_modes, "dtheta": 2.0 * PI / config.params.n_modes as f64 },
        "time_unit": "t counts kicks; physical time is t * period",
        "wall_time_s": wall_time.as_secs_f64(),
        "tainted": out.tainted,
        "warnings": out.warnings,
        "analytics": out.analytics,
        "files": out.files.iter().map(|(name, header)| json!({ "name": name, "columns": header })).collect::<Vec<_>>(),
    });
    let manifest_path = dir.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::contract(e.to_string()))?;
    std::fs::write(&manifest_path, text + "\n").map_err(|e| Error::io(&manifest_path, e))?;

    let mut files: Vec<PathBuf> = out.files.iter().map(|(name, _)| dir.join(name)).collect();
    files.push(manifest_path);
    Ok(RunReport {
        output_dir: dir.clone(),
        files,
        warnings: out.warnings,
        tainted: out.tainted,
        wall_time,
    })
}

fn initial_spinor(config: &ScenarioConfig, gaussian: &GaussianSpec, grid: &Grid) -> Result<crate::SpinorState> {
    match config.init_mode {
        InitMode::UniformChi => make_gaussian_spinor(gaussian, grid),
        InitMode::BandProjected => make_band_projected_spinor(gaussian, &config.params, Band::Minus, grid),
    }
}

/// Runs `params.model` from the config's packet, spinor or scalar as the model requires.
fn run_model(config: &ScenarioConfig, params: &SimParams, grid: &Grid, observers: ObserverSelection) -> Result<ObservableSeries> {
    let (n, every) = (config.n_kicks, config.record_every);
    if params.model.is_spinor() {
        let s = initial_spinor(config, &config.gaussian, grid)?;
        Ok(evolve(&s, params, grid, n, every, observers)?.series)
    } else {
        let s = make_gaussian_scalar(&config.gaussian, grid)?;
        Ok(evolve(&s, params, grid, n, every, observers)?.series)
    }
}

fn analytics_summary(params: &SimParams, p0: f64) -> (EffectiveParams, Crossing, serde_json::Value) {
    let ep = analytics::effective_params(params.kick, params.period, params.alpha);
    let crossing = analytics::crossing_time(p0, &ep, params.alpha);
    let p_lz = analytics::lz_probability(params.mass, params.alpha, params.kick, params.period, p0).ok();
    let summary = json!({
        "amplitude": ep.amplitude,
        "phase_shift": ep.phase_shift,
        "bloch_period": ep.bloch_period,
        "osc_amplitude": ep.osc_amplitude,
        "t1": crossing.first(),
        "t2": crossing.second(),
        "p_lz": p_lz,
    });
    (ep, crossing, summary)
}

fn write_moments(out: &mut Outputs, dir: &Path, name: &str, series: &ObservableSeries) -> Result<()> {
    let mut w = out.csv(dir, name, output::MOMENTS_HEADER)?;
    for r in &series.records {
        w.row([r.t.to_string(), fmt_f64(r.p_mean), fmt_f64(r.p_spread), fmt_opt(r.theta_mean)])?;
    }
    w.finish()?;
    Ok(())
}

fn write_trajectory(config: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let dir = &config.output_dir;
    let params = &config.params;
    let grid = Grid::new(params.n_modes)?;
    let observers = ObserverSelection { densities: config.record_density };
    let series = run_model(config, params, &grid, observers)?;
    out.absorb("", &series);

    write_moments(out, dir, "moments.csv", &series)?;

    if params.model.is_spinor() {
        let mut w = out.csv(dir, "bands.csv", output::BANDS_HEADER)?;
        for r in &series.records {
            let (plus, minus) = r.bands.unwrap_or((f64::NAN, f64::NAN));
            w.row([r.t.to_string(), fmt_f64(plus), fmt_f64(minus)])?;
        }
        w.finish()?;
    }

    if config.record_density {
        let mut wp = out.csv(dir, "density_p.csv", output::DENSITY_P_HEADER)?;
        let mut wt = out.csv(dir, "density_theta.csv", output::DENSITY_THETA_HEADER)?;
        let half = (grid.n_modes() / 2) as i64;
        let dtheta = 2.0 * PI / grid.n_modes() as f64;
        for r in &series.records {
            let t = r.t.to_string();
            if let Some(rho) = &r.momentum_density {
                for (i, d) in rho.iter().enumerate() {
                    wp.row([t.clone(), (i as i64 - half).to_string(), fmt_f64(*d)])?;
                }
            }
            if let Some(rho) = &r.coordinate_density {
                for (j, d) in rho.iter().enumerate() {
                    wt.row([t.clone(), j.to_string(), fmt_f64(-PI + dtheta * j as f64), fmt_f64(*d)])?;
                }
            }
        }
        wp.finish()?;
        wt.finish()?;
    }

    let (ep, crossing, summary) = analytics_summary(params, config.gaussian.p0);
    out.analytics = summary;
    let omega = 2.0 * PI * params.alpha;
    let mut w = out.csv(dir, "theory.csv", output::THEORY_HEADER)?;
    for r in &series.records {
        let (theta, p) = analytics::bloch_trajectory(r.t as f64 * params.period, config.gaussian.p0, &ep, params.alpha);
        let e = (omega * p).hypot(params.mass);
        w.row([r.t.to_string(), fmt_f64(theta), fmt_f64(p), fmt_f64(e), fmt_f64(-e)])?;
    }
    w.finish()?;

    if params.model.is_spinor() {
        match (crossing, analytics::lz_probability(params.mass, params.alpha, params.kick, params.period, config.gaussian.p0)) {
            (Crossing::At { first, .. }, Ok(p_lz)) => {
                let branches = analytics::split_branches(first, omega * first, config.gaussian.p0, &ep, params.alpha, p_lz)?;
                let mut w = out.csv(dir, "branches.csv", output::BRANCHES_HEADER)?;
                for r in series.records.iter().filter(|r| r.t as f64 * params.period >= first) {
                    let time = r.t as f64 * params.period;
                    let a = branches.tunneled(time);
                    let b = branches.reflected(time);
                    w.row([r.t.to_string(), "tunneled".into(), fmt_f64(a.theta), fmt_f64(a.p), fmt_f64(p_lz)])?;
                    w.row([r.t.to_string(), "reflected".into(), fmt_f64(b.theta), fmt_f64(b.p), fmt_f64(branches.reflected_weight())])?;
                }
                w.finish()?;
            }
            (_, Err(e)) if config.scenario == ScenarioKind::SplitOverlay => {
                out.warnings.push(format!("no branch prediction: {e}"));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Models compared by the spread scenario, in column order.
pub const SPREAD_MODELS: [Model; 3] = [Model::DiracSpinor, Model::SpinlessRelativistic, Model::Qkr];

fn write_spread_comparison(config: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let dir = &config.output_dir;
    let grid = Grid::new(config.params.n_modes)?;
    let runs: Vec<ObservableSeries> = SPREAD_MODELS
        .par_iter()
        .map(|&model| {
            let params = SimParams { model, ..config.params };
            run_model(config, &params, &grid, ObserverSelection::default())
        })
        .collect::<Result<_>>()?;

    for (model, series) in SPREAD_MODELS.iter().zip(&runs) {
        out.absorb(model.name(), series);
        write_moments(out, dir, &format!("moments_{}.csv", model.name()), series)?;
    }
    let mut w = out.csv(dir, "spread.csv", output::SPREAD_HEADER)?;
    for (i, r) in runs[0].records.iter().enumerate() {
        let mut row = vec![r.t.to_string()];
        row.extend(runs.iter().map(|s| fmt_f64(s.records[i].p_spread)));
        w.row(row)?;
    }
    w.finish()?;
    let (_, _, summary) = analytics_summary(&config.params, config.gaussian.p0);
    out.analytics = summary;
    Ok(())
}

/// Numeric single-passage tunneling measurement.
#[derive(Debug, Clone)]
pub struct LzMeasurement {
    /// `P₊` at the measurement kick.
    pub transfer: f64,
    /// Measurement kick index.
    pub t_meas: usize,
    /// First analytic crossing time.
    pub t1: f64,
    /// `P₊/P₋` history from `t = 0` to `t_meas`, every kick.
    pub series: ObservableSeries,
    /// Probability reached the momentum-grid edges.
    pub tainted: bool,
}

/// Measurement kick: midpoint between the first crossing `t1` and half a
/// Bloch period, rounded to the nearest kick.
pub fn lz_measurement_kick(t1: f64, ep: &EffectiveParams, period: f64) -> usize {
    ((0.5 * (t1 + 0.5 * ep.bloch_period) / period).round() as usize).max(1)
}

/// Starts a packet below the anti-crossing, evolves through one passage and
/// reads the upper-band weight.
///
/// `UniformChi` uses `gaussian.chi` on every mode; `BandProjected` fills
/// every mode with its lower-band eigenvector.
pub fn measure_lz_numeric(params: &SimParams, gaussian: &GaussianSpec, init_mode: InitMode) -> Result<LzMeasurement> {
    if !params.model.is_spinor() {
        return Err(Error::config(format!("tunneling is measured on dirac_spinor, got {}", params.model.name())));
    }
    let ep = analytics::effective_params(params.kick, params.period, params.alpha);
    let t1 = match analytics::crossing_time(gaussian.p0, &ep, params.alpha) {
        Crossing::At { first, .. } => first,
        Crossing::Never { argument } => {
            return Err(Error::config(format!(
                "packet at p0 = {} never reaches the anti-crossing (arccos argument {argument})",
                gaussian.p0
            )))
        }
    };
    let t_meas = lz_measurement_kick(t1, &ep, params.period);
    let grid = Grid::new(params.n_modes)?;
    let initial = match init_mode {
        InitMode::UniformChi => make_gaussian_spinor(gaussian, &grid)?,
        InitMode::BandProjected => make_band_projected_spinor(gaussian, params, Band::Minus, &grid)?,
    };
    let series = evolve(&initial, params, &grid, t_meas, 1, ObserverSelection::default())?.series;
    let transfer = series
        .records
        .last()
        .and_then(|r| r.bands)
        .map(|b| b.0)
        .ok_or_else(|| Error::contract("spinor run recorded no band occupations"))?;
    Ok(LzMeasurement {
        transfer,
        t_meas,
        t1,
        tainted: series.tainted,
        series,
    })
}

/// One row of the tunneling sweep. Missing cells carry their reason in `note`.
#[derive(Debug, Clone, PartialEq)]
pub struct LzSweepRow {
    pub kick: f64,
    pub mass: f64,
    pub theory: Option<f64>,
    pub uniform: Option<f64>,
    pub band: Option<f64>,
    pub note: String,
}

impl LzSweepRow {
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_f64(self.kick),
            fmt_f64(self.mass),
            fmt_opt(self.theory),
            fmt_opt(self.uniform),
            fmt_opt(self.band),
            self.note.replace([',', '\n'], ";"),
        ]
    }
}

/// Starting momentum of a sweep point: `−K/(3πα)` rounded to a grid mode.
pub fn sweep_p0(kick: f64, alpha: f64) -> f64 {
    (-kick / (3.0 * PI * alpha)).round()
}

fn sweep_point(config: &ScenarioConfig, kick: f64, mass: f64) -> LzSweepRow {
    let params = SimParams { kick, mass, model: Model::DiracSpinor, ..config.params };
    let p0 = sweep_p0(kick, params.alpha);
    let gaussian = GaussianSpec { p0, ..config.gaussian };
    let mut notes = Vec::new();
    let theory = analytics::lz_probability(mass, params.alpha, kick, params.period, p0)
        .map_err(|e| notes.push(format!("theory: {e}")))
        .ok();
    let mut measure = |mode: InitMode, label: &str| match measure_lz_numeric(&params, &gaussian, mode) {
        Ok(m) => {
            if m.tainted {
                notes.push(format!("{label}: edge aliasing"));
            }
            Some(m.transfer)
        }
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            None
        }
    };
    let uniform = measure(InitMode::UniformChi, "uniform");
    let band = measure(InitMode::BandProjected, "band");
    LzSweepRow {
        kick,
        mass,
        theory,
        uniform,
        band,
        note: notes.join("; "),
    }
}

/// Evaluates every `(K, M)` point in parallel. Rows come back sorted by `(M, K)`.
///
/// When `partial` is given, each row is appended and flushed there as soon
/// as it completes, so an interrupted sweep keeps its finished points.
pub fn lz_sweep(config: &ScenarioConfig, partial: Option<&Mutex<CsvWriter>>) -> Result<Vec<LzSweepRow>> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("lz_sweep needs a [sweep] table"))?;
    if sweep.k_values.is_empty() || sweep.m_values.is_empty() {
        return Err(Error::config("sweep needs at least one K and one M value"));
    }
    let points: Vec<(f64, f64)> = sweep
        .m_values
        .iter()
        .flat_map(|&m| sweep.k_values.iter().map(move |&k| (k, m)))
        .collect();
    let mut rows: Vec<LzSweepRow> = points
        .par_iter()
        .map(|&(k, m)| {
            let row = sweep_point(config, k, m);
            if let Some(w) = partial {
                let mut w = w.lock().unwrap_or_else(|e| e.into_inner());
                w.row(row.fields())?;
                w.flush()?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.mass.total_cmp(&b.mass).then(a.kick.total_cmp(&b.kick)));
    Ok(rows)
}

const PARTIAL_SWEEP_NAME: &str = "lz_sweep.partial.csv";

fn write_lz_sweep(config: &ScenarioConfig, out: &mut Outputs) -> Result<()> {
    let dir = &config.output_dir;
    let partial_path = dir.join(PARTIAL_SWEEP_NAME);
    let partial = Mutex::new(CsvWriter::create(&partial_path, output::LZ_SWEEP_HEADER)?);
    let rows = lz_sweep(config, Some(&partial))?;
    drop(partial);

    let mut w = out.csv(dir, "lz_sweep.csv", output::LZ_SWEEP_HEADER)?;
    for row in &rows {
        w.row(row.fields())?;
        if !row.note.is_empty() {
            out.warnings.push(format!("K = {}, M = {}: {}", row.kick, row.mass, row.note));
        }
        out.tainted |= row.note.contains("aliasing");
    }
    w.finish()?;
    std::fs::remove_file(&partial_path).map_err(|e| Error::io(&partial_path, e))?;
    out.analytics = json!({
        "p0_rule": "round(-K / (3 pi alpha))",
        "measurement_kick": "round((t1 + T_B/2) / 2 / period)",
    });
    Ok(())
}
