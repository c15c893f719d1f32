//! Grid sweeps with a shared ground-state cache and resumable CSV output.
//!
//! Points are processed in windows of roughly one point per worker thread.
//! Every distinct Hamiltonian needed by a window is solved once (in
//! parallel), rows are assembled in grid order, and the output file is
//! rewritten after each window so an interrupted run can pick up where it
//! stopped. Ground states are evicted once no later point needs them, which
//! keeps memory bounded at full scale.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Figure, ModelKind};
use crate::analysis::{self, OverlapResult};
use crate::eigensolve::{find_global_ground_state, GroundState, SolverOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::model::{build_redshift_profile, MassModel, Placement, Preset, SuperpositionConfig};

/// Grid definition for one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub figure: Figure,
    pub models: Vec<ModelKind>,
    pub lengths: Vec<usize>,
    /// Mass grid as `GM = 10^z`.
    pub z_values: Vec<f64>,
    /// Extra explicit `GM` values (custom sweeps only).
    pub gm_values: Vec<f64>,
    /// Distance grid for the distance panels and custom sweeps.
    pub distances: Vec<f64>,
    /// `GM` for datasets at a single mass.
    pub gm: f64,
    /// `d` for datasets at a single distance.
    pub d: f64,
    pub configs: Vec<Preset>,
    /// First placement; empty means every `k1 < L/2`.
    pub k1_values: Vec<usize>,
    /// Second placement paired with `k1_values`; empty means `L - k1`.
    pub k2_values: Vec<usize>,
    pub schwarzschild_radius: f64,
    /// Uniform field replacing the model default.
    pub field: Option<f64>,
    pub solver: SolverOptions,
    pub use_cache: bool,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Default grid for `figure`; `full_scale` switches to the 26-site chain.
    pub fn preset(figure: Figure, full_scale: bool) -> Self {
        let base = SweepSpec {
            figure,
            models: vec![ModelKind::XX, ModelKind::XXZ],
            lengths: vec![if full_scale { 26 } else { 12 }],
            z_values: vec![0.0],
            gm_values: Vec::new(),
            distances: vec![10.0],
            gm: 1.0,
            d: 10.0,
            configs: vec![Preset::Edge, Preset::Middle],
            k1_values: Vec::new(),
            k2_values: Vec::new(),
            schwarzschild_radius: 0.5,
            field: None,
            solver: SolverOptions::default(),
            use_cache: true,
            output: None,
        };
        match figure {
            Figure::Fig3 => SweepSpec {
                lengths: if full_scale { (8..=26).step_by(2).collect() } else { vec![8, 10, 12] },
                ..base
            },
            Figure::Fig4 => SweepSpec {
                z_values: vec![-3.0, -2.0, -1.0, 0.0],
                distances: vec![5.0, 10.0, 15.0, 20.0, 30.0, 50.0],
                configs: vec![Preset::Middle, Preset::Edge],
                ..base
            },
            Figure::Fig5 => base,
            Figure::Fig6 => SweepSpec {
                models: vec![ModelKind::XX, ModelKind::Heisenberg],
                lengths: vec![16],
                field: Some(1.0),
                ..base
            },
            Figure::Custom => SweepSpec { models: vec![ModelKind::XXZ], configs: vec![Preset::Edge], ..base },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        let empty = |what: &str| Error::InvalidArgument(format!("sweep grid `{what}` is empty"));
        if self.models.is_empty() {
            return Err(empty("models"));
        }
        if self.lengths.is_empty() {
            return Err(empty("lengths"));
        }
        match self.figure {
            Figure::Fig3 if self.configs.is_empty() => return Err(empty("configs")),
            Figure::Fig4 if self.configs.is_empty() => return Err(empty("configs")),
            Figure::Fig4 if self.z_values.is_empty() => return Err(empty("z")),
            Figure::Fig4 if self.distances.is_empty() => return Err(empty("distances")),
            Figure::Custom if self.k1_values.is_empty() && self.configs.is_empty() => {
                return Err(empty("k1"))
            }
            Figure::Custom if self.z_values.is_empty() && self.gm_values.is_empty() => {
                return Err(empty("z"))
            }
            Figure::Custom if self.distances.is_empty() => return Err(empty("distances")),
            _ => {}
        }
        if matches!(self.figure, Figure::Fig4 | Figure::Fig5 | Figure::Fig6) && self.lengths.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "{} sweeps take a single chain length, got {:?}",
                self.figure, self.lengths
            )));
        }
        if !self.k2_values.is_empty() && self.k2_values.len() != self.k1_values.len() {
            return Err(Error::InvalidArgument("`k2` must pair one-to-one with `k1`".into()));
        }
        Ok(())
    }
}

/// Inputs that define one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointParams {
    pub model: ModelKind,
    pub panel: Option<char>,
    pub config: Option<Preset>,
    pub sites: usize,
    pub jz: f64,
    pub field: f64,
    pub k1: usize,
    pub k2: usize,
    pub mass: MassModel,
    pub z: Option<f64>,
    pub d: f64,
}

impl PointParams {
    fn gm(&self) -> Option<f64> {
        match self.mass {
            MassModel::Newtonian { gm } => Some(gm),
            MassModel::Schwarzschild { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Degenerate,
    Unconverged,
    Error(String),
}

impl Status {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Status::Ok),
            "degenerate" => Some(Status::Degenerate),
            "unconverged" => Some(Status::Unconverged),
            "error" => Some(Status::Error(String::new())),
            _ => None,
        }
    }

    /// Rows worth keeping when a sweep is resumed.
    fn is_final(&self) -> bool {
        matches!(self, Status::Ok | Status::Degenerate)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Degenerate => "degenerate",
            Status::Unconverged => "unconverged",
            Status::Error(_) => "error",
        })
    }
}

/// Everything computed for one grid point.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub schema: &'static str,
    pub params: PointParams,
    /// Bare-chain ground energy (energy-shift datasets only).
    pub e0: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub overlap: Option<OverlapResult>,
    /// Smallest gap above any of the ground states involved.
    pub gap: Option<f64>,
    /// Largest residual of the ground states involved.
    pub residual: Option<f64>,
    pub degenerate: bool,
    pub status: Status,
    pub wall_time: Duration,
    /// Taken over from an existing output file instead of recomputed.
    pub resumed: bool,
}

impl RunRecord {
    pub fn m(&self) -> Option<f64> {
        self.overlap.map(|o| o.m)
    }

    pub fn one_minus_m(&self) -> Option<f64> {
        self.overlap.map(|o| o.one_minus_m)
    }

    /// CSV cells in the column order of `figure`.
    pub fn cells(&self, figure: Figure) -> Vec<String> {
        let p = &self.params;
        let mut row = key_cells(figure, p);
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        match figure {
            Figure::Fig3 => {
                let shift = self.e0.zip(self.e1).map(|(a, b)| (a - b).abs());
                row.extend([opt(self.e0), opt(self.e1), opt(self.e2), opt(shift)]);
            }
            Figure::Fig4 | Figure::Fig5 => row.extend([opt(self.m()), opt(self.one_minus_m())]),
            Figure::Fig6 => row.push(opt(self.m())),
            Figure::Custom => {
                row.extend([opt(self.e1), opt(self.e2), opt(self.m()), opt(self.one_minus_m())]);
            }
        }
        row.push(self.status.to_string());
        row
    }

    fn from_cells(figure: Figure, params: PointParams, cells: &[String]) -> Option<Self> {
        let get = |name: &str| {
            let i = figure.columns().iter().position(|c| *c == name)?;
            cells.get(i).and_then(|c| c.parse::<f64>().ok())
        };
        let status = Status::parse(cells.last()?)?;
        let overlap = get("M").map(|m| {
            let one_minus_m = get("one_minus_M").unwrap_or(1.0 - m);
            OverlapResult {
                m,
                one_minus_m,
                distinguishability: (one_minus_m * (2.0 - one_minus_m)).sqrt(),
                degenerate: status == Status::Degenerate,
                sectors_match: true,
            }
        });
        Some(RunRecord {
            schema: figure.schema_version(),
            params,
            e0: get("E0"),
            e1: get("E1"),
            e2: get("E2"),
            overlap,
            gap: None,
            residual: None,
            degenerate: status == Status::Degenerate,
            status,
            wall_time: Duration::ZERO,
            resumed: true,
        })
    }
}

/// Result of a sweep: records in grid order plus the rendered files.
#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub figure: Figure,
    pub records: Vec<RunRecord>,
    pub csv: String,
    /// One line per row whose status is not `ok`.
    pub log: String,
    /// Distinct ground-state solves performed.
    pub solves: usize,
}

impl SweepOutput {
    pub fn count(&self, status: &Status) -> usize {
        self.records.iter().filter(|r| &r.status == status).count()
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn key_cells(figure: Figure, p: &PointParams) -> Vec<String> {
    let config = p.config.map(|c| c.as_str().to_string()).unwrap_or_else(|| "custom".into());
    let gm = p.gm().map(fmt_f64).unwrap_or_default();
    match figure {
        Figure::Fig3 => vec![
            p.model.to_string(),
            config,
            p.sites.to_string(),
            p.k1.to_string(),
            p.k2.to_string(),
            fmt_f64(p.d),
            gm,
        ],
        Figure::Fig4 => vec![
            p.panel.map(String::from).unwrap_or_default(),
            p.model.to_string(),
            config,
            p.z.map(fmt_f64).unwrap_or_default(),
            fmt_f64(p.d),
        ],
        Figure::Fig5 => vec![p.model.to_string(), p.k1.to_string(), p.k2.to_string(), gm, fmt_f64(p.d)],
        Figure::Fig6 => vec![p.model.to_string(), fmt_f64(p.jz), p.k1.to_string(), p.k2.to_string()],
        Figure::Custom => vec![
            p.model.to_string(),
            p.sites.to_string(),
            p.k1.to_string(),
            p.k2.to_string(),
            gm,
            fmt_f64(p.d),
        ],
    }
}

#[derive(Clone, Copy, PartialEq)]
enum PointKind {
    /// Bare chain, then the two placements.
    EnergyShift,
    /// The two placements.
    Overlap,
}

struct Point {
    params: PointParams,
    kind: PointKind,
    key: Vec<String>,
    hamiltonians: std::result::Result<Vec<HamiltonianSpec>, String>,
}

fn grid(spec: &SweepSpec) -> Result<Vec<PointParams>> {
    let mut out = Vec::new();
    let field = spec.field;
    let point = |model: ModelKind, sites: usize, k1, k2, mass, z, d, config, panel| PointParams {
        model,
        panel,
        config,
        sites,
        jz: model.jz(),
        field: field.unwrap_or(model.field()),
        k1,
        k2,
        mass,
        z,
        d,
    };
    let preset_pair = |preset: Preset, sites: usize| -> Result<(usize, usize)> {
        let c = SuperpositionConfig::from_preset(preset, sites, 0.0)?;
        Ok((c.left.k, c.right.k))
    };
    let k_pairs = |sites: usize| -> Vec<(usize, usize)> {
        if spec.k1_values.is_empty() {
            (1..sites.div_ceil(2)).map(|k| (k, sites - k)).collect()
        } else if spec.k2_values.is_empty() {
            spec.k1_values.iter().map(|&k| (k, sites.saturating_sub(k))).collect()
        } else {
            spec.k1_values.iter().copied().zip(spec.k2_values.iter().copied()).collect()
        }
    };
    let newton = |gm: f64| MassModel::Newtonian { gm };

    match spec.figure {
        Figure::Fig3 => {
            for &model in &spec.models {
                for &config in &spec.configs {
                    for &sites in &spec.lengths {
                        let (k1, k2) = preset_pair(config, sites)?;
                        out.push(point(model, sites, k1, k2, newton(spec.gm), None, spec.d, Some(config), None));
                    }
                }
            }
        }
        Figure::Fig4 => {
            let sites = spec.lengths[0];
            for &model in &spec.models {
                let panels = if model == ModelKind::XX { ['A', 'B', 'C'] } else { ['D', 'E', 'F'] };
                for &config in &spec.configs {
                    let (k1, k2) = preset_pair(config, sites)?;
                    for &z in &spec.z_values {
                        let m = MassModel::from_z(z);
                        out.push(point(model, sites, k1, k2, m, Some(z), spec.d, Some(config), Some(panels[0])));
                    }
                }
                for (config, panel) in [(Preset::Middle, panels[1]), (Preset::Edge, panels[2])] {
                    if !spec.configs.contains(&config) {
                        continue;
                    }
                    let (k1, k2) = preset_pair(config, sites)?;
                    for &z in &spec.z_values {
                        for &d in &spec.distances {
                            let m = MassModel::from_z(z);
                            out.push(point(model, sites, k1, k2, m, Some(z), d, Some(config), Some(panel)));
                        }
                    }
                }
            }
        }
        Figure::Fig5 => {
            let sites = spec.lengths[0];
            for &model in &spec.models {
                for (k1, k2) in k_pairs(sites) {
                    out.push(point(model, sites, k1, k2, newton(spec.gm), None, spec.d, None, None));
                }
            }
        }
        Figure::Fig6 => {
            let sites = spec.lengths[0];
            let bh = MassModel::Schwarzschild { rs: spec.schwarzschild_radius };
            for &model in &spec.models {
                for (k1, k2) in k_pairs(sites) {
                    out.push(point(model, sites, k1, k2, bh, None, 0.0, None, None));
                }
            }
        }
        Figure::Custom => {
            let masses: Vec<(MassModel, Option<f64>)> = spec
                .gm_values
                .iter()
                .map(|&gm| (newton(gm), None))
                .chain(spec.z_values.iter().map(|&z| (MassModel::from_z(z), Some(z))))
                .collect();
            for &model in &spec.models {
                for &sites in &spec.lengths {
                    let mut pairs: Vec<(usize, usize, Option<Preset>)> = Vec::new();
                    if spec.k1_values.is_empty() {
                        for &c in &spec.configs {
                            let (k1, k2) = preset_pair(c, sites)?;
                            pairs.push((k1, k2, Some(c)));
                        }
                    } else {
                        pairs.extend(k_pairs(sites).into_iter().map(|(a, b)| (a, b, None)));
                    }
                    for &(k1, k2, config) in &pairs {
                        for &(mass, z) in &masses {
                            for &d in &spec.distances {
                                out.push(point(model, sites, k1, k2, mass, z, d, config, None));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn build_point(figure: Figure, params: PointParams) -> Point {
    let kind = if figure == Figure::Fig3 { PointKind::EnergyShift } else { PointKind::Overlap };
    let key = key_cells(figure, &params);
    let hamiltonians = (|| -> Result<Vec<HamiltonianSpec>> {
        let chain = params.model.chain(params.sites, Some(params.field))?;
        let mut hs = Vec::with_capacity(3);
        if kind == PointKind::EnergyShift {
            hs.push(HamiltonianSpec::bare(&chain));
        }
        for k in [params.k1, params.k2] {
            let profile = build_redshift_profile(&chain, &params.mass, &Placement::new(k, params.d))?;
            hs.push(HamiltonianSpec::new(&chain, &profile)?);
        }
        Ok(hs)
    })()
    .map_err(|e| e.to_string());
    Point { params, kind, key, hamiltonians }
}

/// Canonical cache key: couplings and factors rounded at 1e-15.
#[derive(Clone, PartialEq, Eq, Hash)]
struct HamKey(Vec<i64>);

impl HamKey {
    fn of(h: &HamiltonianSpec) -> Self {
        let q = |v: f64| (v * 1e15).round() as i64;
        let mut key = vec![h.sites() as i64];
        key.extend(h.jx_eff().iter().chain(h.jz_eff()).chain(h.b_eff()).map(|&v| q(v)));
        HamKey(key)
    }
}

#[derive(Clone)]
struct SolveError {
    numerical: bool,
    message: String,
}

type Solved = std::result::Result<Arc<GroundState>, SolveError>;

fn load_existing(path: &Path, figure: Figure) -> Result<HashMap<Vec<String>, Vec<String>>> {
    let mut rows = HashMap::new();
    if !path.exists() {
        return Ok(rows);
    }
    let mismatch = |detail: String| Error::SchemaMismatch { path: path.to_path_buf(), detail };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| mismatch(e.to_string()))?;
    let header: Vec<String> = reader.headers().map_err(|e| mismatch(e.to_string()))?.iter().map(String::from).collect();
    if header.is_empty() {
        return Ok(rows);
    }
    if header != figure.columns() {
        return Err(mismatch(format!("header {header:?} does not match {:?}", figure.columns())));
    }
    for rec in reader.records() {
        let cells: Vec<String> = rec.map_err(|e| mismatch(e.to_string()))?.iter().map(String::from).collect();
        let status = cells.last().and_then(|s| Status::parse(s));
        if status.is_some_and(|s| s.is_final()) {
            rows.insert(cells[..figure.key_columns()].to_vec(), cells);
        }
    }
    Ok(rows)
}

fn render_csv(figure: Figure, rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(figure.columns()).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
}

fn log_line(record: &RunRecord, key: &[String], detail: Option<&str>) -> Option<String> {
    if record.status == Status::Ok {
        return None;
    }
    let mut line = format!("{}\t{}", key.join(","), record.status);
    if let Some(g) = record.gap {
        line.push_str(&format!("\tgap={}", fmt_f64(g)));
    }
    if let Some(d) = detail {
        line.push('\t');
        line.push_str(d);
    }
    Some(line)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Sidecar file next to a CSV listing the rows that are not `ok`.
pub fn log_path(output: &Path) -> PathBuf {
    let mut p = output.as_os_str().to_owned();
    p.push(".log");
    PathBuf::from(p)
}

/// Evaluate every grid point of `spec`; writes the CSV (and its log) when an output path is set.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    spec.validate()?;
    let figure = spec.figure;
    let points: Vec<Point> = grid(spec)?.into_iter().map(|p| build_point(figure, p)).collect();
    let existing = match &spec.output {
        Some(path) => load_existing(path, figure)?,
        None => HashMap::new(),
    };

    // Cache slots: one per distinct Hamiltonian, or one per use without the cache.
    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(points.len());
    let mut slot_specs: Vec<HamiltonianSpec> = Vec::new();
    let mut index: HashMap<HamKey, usize> = HashMap::new();
    for p in &points {
        let mut ids = Vec::new();
        if let (Ok(hs), false) = (&p.hamiltonians, existing.contains_key(&p.key)) {
            for h in hs {
                let id = if spec.use_cache {
                    *index.entry(HamKey::of(h)).or_insert_with(|| {
                        slot_specs.push(h.clone());
                        slot_specs.len() - 1
                    })
                } else {
                    slot_specs.push(h.clone());
                    slot_specs.len() - 1
                };
                ids.push(id);
            }
        }
        slots.push(ids);
    }
    let mut last_use = vec![0usize; slot_specs.len()];
    for (i, ids) in slots.iter().enumerate() {
        for &id in ids {
            last_use[id] = i;
        }
    }

    let window = rayon::current_num_threads().max(1);
    let mut solved: HashMap<usize, (Solved, Duration)> = HashMap::new();
    let mut done: HashSet<usize> = HashSet::new();
    let mut records: Vec<Option<RunRecord>> = vec![None; points.len()];
    let mut details: Vec<Option<String>> = vec![None; points.len()];
    let mut solves = 0usize;

    let mut start = 0;
    while start < points.len() {
        let end = (start + window).min(points.len());
        let mut pending: Vec<usize> = Vec::new();
        for ids in &slots[start..end] {
            for &id in ids {
                if !done.contains(&id) && !pending.contains(&id) {
                    pending.push(id);
                }
            }
        }
        let fresh: Vec<(usize, Solved, Duration)> = pending
            .par_iter()
            .map(|&id| {
                let t = Instant::now();
                let r = find_global_ground_state(&slot_specs[id], &spec.solver)
                    .map(Arc::new)
                    .map_err(|e| SolveError { numerical: e.is_numerical(), message: e.to_string() });
                (id, r, t.elapsed())
            })
            .collect();
        solves += fresh.len();
        let mut first_time: HashMap<usize, Duration> = HashMap::new();
        for (id, r, t) in fresh {
            done.insert(id);
            first_time.insert(id, t);
            solved.insert(id, (r, t));
        }

        for i in start..end {
            let p = &points[i];
            let t = Instant::now();
            let (record, detail) = match (existing.get(&p.key), &p.hamiltonians) {
                (Some(cells), _) => match RunRecord::from_cells(figure, p.params.clone(), cells) {
                    Some(r) => (r, None),
                    None => unreachable!("only parseable rows are kept"),
                },
                (None, Err(msg)) => (failed(figure, p, Status::Error(msg.clone())), Some(msg.clone())),
                (None, Ok(_)) => {
                    let states: Vec<&Solved> = slots[i].iter().map(|id| &solved[id].0).collect();
                    let mut spent: Duration = slots[i].iter().filter_map(|id| first_time.remove(id)).sum();
                    let (mut r, d) = assemble(figure, p, &states);
                    spent += t.elapsed();
                    r.wall_time = spent;
                    (r, d)
                }
            };
            records[i] = Some(record);
            details[i] = detail;
        }

        solved.retain(|id, _| last_use[*id] >= end);
        if let Some(path) = &spec.output {
            let rows: Vec<Vec<String>> = records.iter().flatten().map(|r| r.cells(figure)).collect();
            write_atomic(path, &render_csv(figure, &rows))?;
        }
        log::info!("{figure}: {end}/{} points", points.len());
        start = end;
    }

    let records: Vec<RunRecord> = records.into_iter().map(|r| r.expect("every point visited")).collect();
    let rows: Vec<Vec<String>> = records.iter().map(|r| r.cells(figure)).collect();
    let csv = render_csv(figure, &rows);
    let log: String = records
        .iter()
        .zip(&points)
        .zip(&details)
        .filter_map(|((r, p), d)| log_line(r, &p.key, d.as_deref()))
        .map(|l| l + "\n")
        .collect();
    if let Some(path) = &spec.output {
        write_atomic(path, &csv)?;
        write_atomic(&log_path(path), &log)?;
    }
    Ok(SweepOutput { figure, records, csv, log, solves })
}

fn failed(figure: Figure, p: &Point, status: Status) -> RunRecord {
    RunRecord {
        schema: figure.schema_version(),
        params: p.params.clone(),
        e0: None,
        e1: None,
        e2: None,
        overlap: None,
        gap: None,
        residual: None,
        degenerate: false,
        status,
        wall_time: Duration::ZERO,
        resumed: false,
    }
}

fn assemble(figure: Figure, p: &Point, states: &[&Solved]) -> (RunRecord, Option<String>) {
    let mut r = failed(figure, p, Status::Ok);
    let ok: Vec<&Arc<GroundState>> = states.iter().filter_map(|s| s.as_ref().ok()).collect();
    if ok.len() == states.len() {
        r.gap = ok.iter().map(|g| g.gap()).reduce(f64::min).filter(|g| g.is_finite());
        r.residual = ok.iter().map(|g| g.residual).reduce(f64::max);
    }
    let energy = |i: usize| states[i].as_ref().ok().map(|g| g.energy);
    let offset = usize::from(p.kind == PointKind::EnergyShift);
    if p.kind == PointKind::EnergyShift {
        r.e0 = energy(0);
    }
    r.e1 = energy(offset);
    r.e2 = energy(offset + 1);

    if let Some(err) = states.iter().find_map(|s| s.as_ref().err()) {
        r.status = if err.numerical { Status::Unconverged } else { Status::Error(err.message.clone()) };
        return (r, Some(err.message.clone()));
    }
    r.degenerate = ok.iter().any(|g| g.degenerate);
    if p.kind == PointKind::Overlap {
        match analysis::overlap(ok[0], ok[1]) {
            Ok(o) => r.overlap = Some(o),
            Err(e) => {
                r.status = if e.is_numerical() { Status::Unconverged } else { Status::Error(e.to_string()) };
                return (r, Some(e.to_string()));
            }
        }
    }
    if r.degenerate {
        r.status = Status::Degenerate;
        let tied: Vec<String> = ok
            .iter()
            .filter(|g| g.degenerate)
            .map(|g| format!("n_up={} tied={:?}", g.n_up, g.tied_sectors))
            .collect();
        return (r, Some(tied.join("; ")));
    }
    (r, None)
}
