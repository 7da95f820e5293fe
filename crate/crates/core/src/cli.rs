//! Scenario runner behind the `sgc` binary.
//!
//! Every subcommand resolves a [`RunConfig`] from `--preset` and `--config`,
//! writes its tables, and returns the list of files it produced.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::dressed::{evolve_secular_sampled, secular_steady_state, DressedPopulations, SecularModel};
use crate::error::{Error, Result};
use crate::floquet::{
    group_velocity_ratio, interference_sweep, probe_spectrum, pump_coherence_sweep, pump_population_sweep,
    ProbeResponse, DEFAULT_SLOPE_STEP,
};
use crate::linalg::ComplexVector;
use crate::liouvillian::{build_for, el, LiouvillianSet};
use crate::oracle::{
    integrate_full, max_stable_step, probe_response_from, steady_state_by_integration, OracleOptions,
    TrajectoryConfig,
};
use crate::output::{sibling, write_json, Table};
use crate::params::{Grid, ParamsRecord, ProbeGrid, SystemParams};
use crate::presets::preset;
use crate::C64;

#[derive(Debug, Parser)]
#[command(name = "sgc", version, about = "Pump-probe response of a Y-type four-level atom with decay-induced interference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Susceptibility and dispersion slope against probe detuning.
    ProbeSpectrum,
    /// Dispersion slope at line centre against the interference parameter.
    InterferenceSweep,
    /// Pump-only populations and coherences against pump detuning.
    PumpSweeps,
    /// Secular dressed-state dynamics from the upper level.
    DressedEvolve,
    /// Generator matrices as JSON.
    DumpLiouvillian,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ProbeSpectrum => "probe-spectrum",
            Command::InterferenceSweep => "interference-sweep",
            Command::PumpSweeps => "pump-sweeps",
            Command::DressedEvolve => "dressed-evolve",
            Command::DumpLiouvillian => "dump-liouvillian",
        }
    }

    fn default_preset(self) -> &'static str {
        match self {
            Command::ProbeSpectrum => "fig2a",
            Command::InterferenceSweep => "fig4",
            Command::PumpSweeps => "fig6",
            Command::DressedEvolve => "fig7",
            Command::DumpLiouvillian => "fig2b",
        }
    }

    fn default_out(self) -> PathBuf {
        match self {
            Command::DumpLiouvillian => PathBuf::from("liouvillian.json"),
            c => PathBuf::from(format!("{}.csv", c.name())),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Named parameter set.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// JSON file with parameter and grid fields; overrides the preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Number of grid points or time samples.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Adds a c/vg column computed as 1 + K·slope.
    #[arg(long, global = true)]
    pub k_value: Option<f64>,
    /// Cross-check against direct time integration.
    #[arg(long, global = true)]
    pub oracle_check: bool,
    /// Also write each table as a JSON array of row objects.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the generator matrices next to the output.
    #[arg(long, global = true)]
    pub emit_liouvillian: bool,
    /// Write the full master-equation trajectory (dressed-evolve).
    #[arg(long, global = true)]
    pub emit_trajectory: bool,
    /// Write the resolved configuration, reusable with --config.
    #[arg(long, global = true)]
    pub emit_params: bool,
}

/// Grid and integration settings accepted in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

const GRID_KEYS: [&str; 10] =
    ["delta1_min", "delta1_max", "delta2_min", "delta2_max", "p_min", "p_max", "p_values", "n_points", "slope_step", "t_max"];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    pub grid: GridSpec,
    pub out: PathBuf,
    pub args: CommonArgs,
}

impl RunConfig {
    pub fn resolve(command: Command, args: &CommonArgs) -> Result<Self> {
        let config = match &args.config {
            Some(path) => Some(std::fs::read_to_string(path)?),
            None => None,
        };
        Self::from_parts(command, args, config.as_deref())
    }

    /// Preset (explicit or the subcommand default) overlaid with config JSON.
    /// Without `--preset`, a config that names `gamma2` stands on its own.
    pub fn from_parts(command: Command, args: &CommonArgs, config: Option<&str>) -> Result<Self> {
        let overlay = match config {
            Some(text) => match serde_json::from_str::<Value>(text)? {
                Value::Object(m) => m,
                _ => return Err(Error::validation("config", "must be a JSON object")),
            },
            None => Map::new(),
        };
        let (grid_map, param_map): (Map<String, Value>, Map<String, Value>) =
            overlay.into_iter().partition(|(k, _)| GRID_KEYS.contains(&k.as_str()));

        let standalone = args.preset.is_none() && param_map.contains_key("gamma2");
        let mut base = if standalone {
            Map::new()
        } else {
            let name = args.preset.as_deref().unwrap_or(command.default_preset());
            let mut record = preset(name)?.params.to_record();
            // a derived gamma12 would contradict an overridden angle
            record.gamma12 = None;
            match serde_json::to_value(record)? {
                Value::Object(m) => m,
                _ => unreachable!("records serialize to objects"),
            }
        };
        base.extend(param_map);
        let record: ParamsRecord = serde_json::from_value(Value::Object(base))?;
        let params = SystemParams::new(record)?;
        let mut grid: GridSpec = serde_json::from_value(Value::Object(grid_map))?;
        if let Some(n) = args.points {
            grid.n_points = Some(n);
        }
        let out = args.out.clone().unwrap_or_else(|| command.default_out());
        Ok(RunConfig { command, params, grid, out, args: args.clone() })
    }

    fn n_points(&self, default: usize) -> usize {
        self.grid.n_points.unwrap_or(default)
    }

    fn slope_step(&self) -> f64 {
        self.grid.slope_step.unwrap_or(DEFAULT_SLOPE_STEP)
    }

    pub fn probe_grid(&self) -> Result<ProbeGrid> {
        ProbeGrid::new(self.grid.delta1_min.unwrap_or(-10.0), self.grid.delta1_max.unwrap_or(10.0), self.n_points(2001))
    }

    pub fn pump_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.delta2_min.unwrap_or(-10.0), self.grid.delta2_max.unwrap_or(10.0), self.n_points(1001))
    }

    pub fn p_values(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.grid.p_values {
            if v.is_empty() {
                return Err(Error::validation("p_values", "must not be empty"));
            }
            return Ok(v.clone());
        }
        let g = Grid::new(self.grid.p_min.unwrap_or(0.0), self.grid.p_max.unwrap_or(1.0), self.n_points(201))?;
        Ok(g.points().collect())
    }

    /// Fully resolved configuration: running it with `--config` alone
    /// reproduces the same output.
    pub fn resolved_json(&self) -> Result<Value> {
        let mut grid = self.grid.clone();
        match self.command {
            Command::ProbeSpectrum => {
                let g = self.probe_grid()?;
                grid.delta1_min = Some(g.delta1_min());
                grid.delta1_max = Some(g.delta1_max());
                grid.n_points = Some(g.n_points());
                grid.slope_step = Some(self.slope_step());
            }
            Command::InterferenceSweep => {
                grid.p_values = Some(self.p_values()?);
                grid.p_min = None;
                grid.p_max = None;
                grid.n_points = None;
                grid.slope_step = Some(self.slope_step());
            }
            Command::PumpSweeps => {
                let g = self.pump_grid()?;
                grid.delta2_min = Some(g.min);
                grid.delta2_max = Some(g.max);
                grid.n_points = Some(g.n_points);
            }
            Command::DressedEvolve => {
                grid.t_max = Some(self.grid.t_max.unwrap_or(DEFAULT_T_MAX));
                grid.n_points = Some(self.n_points(DEFAULT_SAMPLES));
            }
            Command::DumpLiouvillian => {}
        }
        let mut map = match serde_json::to_value(self.params.to_record())? {
            Value::Object(m) => m,
            _ => unreachable!("records serialize to objects"),
        };
        if let Value::Object(g) = serde_json::to_value(grid)? {
            map.extend(g);
        }
        Ok(Value::Object(map))
    }
}

const DEFAULT_T_MAX: f64 = 1000.0;
const ORACLE_OMEGA1: f64 = 1e-4;
const DEFAULT_SAMPLES: usize = 1001;

/// Outcome of a subcommand.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    /// Summary records printed to stdout, one JSON object per line.
    pub summaries: Vec<Value>,
}

impl RunReport {
    fn table(&mut self, table: &Table, path: &Path, json: bool) -> Result<()> {
        table.save_csv(path)?;
        self.files.push(path.to_path_buf());
        if json {
            let p = sibling(path, "", "json");
            table.save_json(&p)?;
            self.files.push(p);
        }
        Ok(())
    }

    fn json(&mut self, value: &Value, path: PathBuf) -> Result<()> {
        write_json(&path, value)?;
        self.files.push(path);
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    let cfg = RunConfig::resolve(cli.command, &cli.common)?;
    execute(&cfg)
}

pub fn execute(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::default();
    match cfg.command {
        Command::ProbeSpectrum => cmd_probe_spectrum(cfg, &mut report)?,
        Command::InterferenceSweep => cmd_interference_sweep(cfg, &mut report)?,
        Command::PumpSweeps => cmd_pump_sweeps(cfg, &mut report)?,
        Command::DressedEvolve => cmd_dressed_evolve(cfg, &mut report)?,
        Command::DumpLiouvillian => {
            let dump = build_for(&cfg.params).dump();
            report.json(&serde_json::to_value(dump)?, cfg.out.clone())?;
        }
    }
    if cfg.args.emit_liouvillian && cfg.command != Command::DumpLiouvillian {
        let dump = build_for(&cfg.params).dump();
        report.json(&serde_json::to_value(dump)?, sibling(&cfg.out, "_liouvillian", "json"))?;
    }
    if cfg.args.emit_params {
        report.json(&cfg.resolved_json()?, sibling(&cfg.out, "_params", "json"))?;
    }
    Ok(report)
}

pub fn cmd_probe_spectrum(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let grid = cfg.probe_grid()?;
    let h = cfg.slope_step();
    let spectrum = probe_spectrum(&cfg.params, &grid, Some(h))?;
    let mut columns = vec!["delta1", "re_chi", "im_chi", "slope"];
    if cfg.args.k_value.is_some() {
        columns.push("c_over_vg");
    }
    let mut table = Table::new(columns);
    for pt in &spectrum {
        let slope = pt.slope.unwrap_or(f64::NAN);
        let mut row = vec![pt.delta1, pt.chi.re, pt.chi.im, slope];
        if let Some(k) = cfg.args.k_value {
            row.push(group_velocity_ratio(slope, k));
        }
        table.push(row)?;
    }
    report.table(&table, &cfg.out, cfg.args.json)?;

    if cfg.args.oracle_check {
        let response = ProbeResponse::new(&cfg.params)?;
        let relaxed = steady_state_by_integration(&cfg.params, 50.0)?;
        let g = grid.grid();
        let picks: Vec<usize> = (0..5).map(|i| i * (g.n_points - 1) / 4).collect();
        let mut points = Vec::new();
        let mut worst = 0.0f64;
        for i in picks {
            let d1 = g.point(i);
            let expect = response.r_plus(cfg.params.delta_for(d1))?[response.liouvillian().probe_index()];
            let got = probe_response_from(&cfg.params, &relaxed.last, d1, ORACLE_OMEGA1, OracleOptions::default())?;
            let rel = (got.r_plus - expect).norm() / expect.norm().max(1e-300);
            worst = worst.max(rel);
            points.push(json!({"delta1": d1, "floquet": [expect.re, expect.im], "oracle": [got.r_plus.re, got.r_plus.im], "relative_error": rel}));
        }
        report.summaries.push(json!({"oracle_check": points, "max_relative_error": worst}));
    }
    Ok(())
}

pub fn cmd_interference_sweep(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let sweep = interference_sweep(&cfg.params, &cfg.p_values()?, cfg.slope_step())?;
    let mut table = Table::new(["p", "slope_normalized"]);
    for (p, s) in sweep {
        table.push(vec![p, s])?;
    }
    report.table(&table, &cfg.out, cfg.args.json)
}

pub fn cmd_pump_sweeps(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let grid = cfg.pump_grid()?;
    let mut pops = Table::new(["delta2", "rho11", "rho22", "rho33"]);
    for pt in pump_population_sweep(&cfg.params, &grid)? {
        pops.push(vec![pt.delta2, pt.rho11, pt.rho22, pt.rho33])?;
    }
    let mut coh = Table::new(["delta2", "re_rho23", "im_rho23", "re_rho34", "im_rho34"]);
    for pt in pump_coherence_sweep(&cfg.params, &grid)? {
        coh.push(vec![pt.delta2, pt.rho23.re, pt.rho23.im, pt.rho34.re, pt.rho34.im])?;
    }
    report.table(&pops, &cfg.out, cfg.args.json)?;
    report.table(&coh, &sibling(&cfg.out, "_coherences", "csv"), cfg.args.json)
}

/// Step no larger than `max_dt` that divides `interval` exactly.
fn aligned_step(interval: f64, max_dt: f64) -> (f64, usize) {
    let n = (interval / max_dt).ceil().max(1.0) as usize;
    (interval / n as f64, n)
}

fn populations_json(p: &DressedPopulations) -> Value {
    json!({"rho11": p.rho11, "rho_pp": p.rho_pp, "rho_mm": p.rho_mm, "rho_dd": p.rho_dd, "rho_1m": p.rho_1m})
}

fn trajectory_table(liouv: &LiouvillianSet, times: &[f64], states: &[ComplexVector]) -> Result<Table> {
    let mut columns = vec!["t".to_string()];
    for e in liouv.basis {
        columns.push(format!("re_{}", e.name()));
        columns.push(format!("im_{}", e.name()));
    }
    let mut table = Table::new(columns);
    for (t, s) in times.iter().zip(states) {
        let mut row = vec![*t];
        row.extend(s.iter().flat_map(|z| [z.re, z.im]));
        table.push(row)?;
    }
    Ok(table)
}

pub fn cmd_dressed_evolve(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    let model = SecularModel::new(&cfg.params)?;
    let t_max = cfg.grid.t_max.unwrap_or(DEFAULT_T_MAX);
    let samples = cfg.n_points(DEFAULT_SAMPLES);
    if samples < 2 || !(t_max > 0.0) {
        return Err(Error::validation("n_points", format!("need at least 2 samples over t_max > 0, got {samples} over {t_max}")));
    }
    let interval = t_max / (samples - 1) as f64;
    let (dt, every) = aligned_step(interval, 0.01 / model.table.max_abs());
    let initial = DressedPopulations { rho11: 0.0, rho_pp: 0.5, rho_mm: 0.5, rho_dd: 0.0, rho_1m: 0.0 };
    let series = evolve_secular_sampled(&model.table, initial, t_max, dt, every)?;

    let full = if cfg.args.oracle_check || cfg.args.emit_trajectory {
        let q = cfg.params.with(|r| r.omega1 = 0.0)?;
        let l = build_for(&q);
        let (fdt, fevery) = aligned_step(interval, max_stable_step(&l, 0.0));
        let mut init = ComplexVector::zeros(l.dim());
        init[l.index_of(el(3, 3)).expect("upper level is stored")] = C64::new(1.0, 0.0);
        let mut tc = TrajectoryConfig::new(t_max, fdt, init);
        tc.record_every = fevery;
        let traj = integrate_full(&l, &q, &tc)?;
        Some((l, traj))
    } else {
        None
    };

    let mut columns = vec!["t", "rho11", "rho_pp", "rho_mm", "rho_dd", "rho_1m"];
    if cfg.args.oracle_check {
        columns.push("rho11_full");
    }
    let mut table = Table::new(columns);
    for (i, (t, p)) in series.iter().enumerate() {
        let mut row = vec![*t, p.rho11, p.rho_pp, p.rho_mm, p.rho_dd, p.rho_1m];
        if cfg.args.oracle_check {
            let (_, traj) = full.as_ref().expect("full run present with oracle check");
            row.push(traj.states.get(i).map_or(f64::NAN, |s| s[0].re));
        }
        table.push(row)?;
    }
    report.table(&table, &cfg.out, cfg.args.json)?;

    let steady = secular_steady_state(&model.table)?;
    let mut summary = json!({
        "secular_steady_state": populations_json(&steady),
        "final": populations_json(&series.last().expect("series starts with the initial point").1),
    });
    if let Some((l, traj)) = &full {
        if cfg.args.oracle_check {
            let full_rho11 = traj.last[0].re;
            summary["full_rho11_final"] = json!(full_rho11);
            summary["relative_difference"] = json!((steady.rho11 - full_rho11).abs() / full_rho11.abs().max(1e-300));
        }
        if cfg.args.emit_trajectory {
            let t = trajectory_table(l, &traj.times, &traj.states)?;
            report.table(&t, &sibling(&cfg.out, "_trajectory", "csv"), cfg.args.json)?;
        }
    }
    report.summaries.push(summary);
    Ok(())
}

/// Error record printed on failure.
pub fn error_record(err: &Error) -> Value {
    json!({"error": err.kind(), "message": err.to_string()})
}
