//! Command line front end.
//!
//! Exit codes: 0 on success, 1 for usage or input errors, 2 when the
//! numerics fail to converge.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::config::SweepFile;
use super::oracle;
use super::sweep::{log_path, run_sweep, Status};
use super::{Figure, ModelKind};
use crate::analysis::{self, default_alpha};
use crate::eigensolve::{find_global_ground_state, GroundState, SolverOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::model::{
    bond_distance, build_redshift_profile, site_distance, ChainSpec, MassModel, Placement, Preset, SuperpositionConfig,
};

#[derive(Debug, Parser)]
#[command(name = "redshift-chain", version, about = "Ground-state decoherence of a spin chain near a superposed mass")]
struct Cli {
    /// TOML configuration; command line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the Lanczos start vector.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the redshift factor of every site and bond.
    Profile(ProfileArgs),
    /// Ground state of the chain, optionally with the mass at bond `k`.
    GroundState(GroundStateArgs),
    /// Visibility between the ground states for two mass positions.
    Overlap(OverlapArgs),
    /// Number of independent systems needed to reach a target visibility.
    EstimateN(EstimateArgs),
    /// Run a parameter sweep and write its CSV.
    Sweep(SweepArgs),
    /// Cross-check the solvers against each other.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MassKind {
    Newtonian,
    Schwarzschild,
    None,
}

#[derive(Debug, Args)]
struct MassArgs {
    /// Newtonian parameter GM.
    #[arg(long, conflicts_with = "z")]
    gm: Option<f64>,
    /// Mass exponent: GM = 10^z.
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    /// Schwarzschild radius (default: half the lattice spacing).
    #[arg(long)]
    rs: Option<f64>,
    /// Perpendicular distance of the mass from the chain.
    #[arg(long, default_value_t = 10.0)]
    d: f64,
}

impl MassArgs {
    fn mass(&self, kind: MassKind, spacing: f64) -> MassModel {
        match kind {
            MassKind::Newtonian => match (self.gm, self.z) {
                (Some(gm), _) => MassModel::Newtonian { gm },
                (None, Some(z)) => MassModel::from_z(z),
                (None, None) => MassModel::Newtonian { gm: 1.0 },
            },
            MassKind::Schwarzschild => match self.rs {
                Some(rs) => MassModel::Schwarzschild { rs },
                None => MassModel::half_spacing_black_hole(spacing),
            },
            MassKind::None => MassModel::Newtonian { gm: 0.0 },
        }
    }
}

#[derive(Debug, Args)]
struct ChainArgs {
    /// Coupling set: XX, XXZ or Heisenberg.
    #[arg(long, default_value = "XXZ")]
    model: ModelKind,
    /// Number of sites.
    #[arg(long = "L", visible_alias = "sites", default_value_t = 12)]
    sites: usize,
    #[arg(long)]
    jx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    jz: Option<f64>,
    /// Uniform field.
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Lattice spacing.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Source of the redshift.
    #[arg(long, value_enum, default_value_t = MassKind::Newtonian)]
    mass: MassKind,
}

impl ChainArgs {
    fn chain(&self) -> Result<ChainSpec> {
        let jx = self.jx.unwrap_or(1.0);
        let jz = self.jz.unwrap_or(self.model.jz());
        let b = self.b.unwrap_or(self.model.field());
        ChainSpec::with_fields(self.sites, self.x, jx, jz, vec![b; self.sites])
    }
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Source of the redshift.
    #[arg(long = "model", visible_alias = "mass", value_enum, default_value_t = MassKind::Newtonian)]
    kind: MassKind,
    #[command(flatten)]
    mass: MassArgs,
    /// Bond the mass sits next to.
    #[arg(long)]
    k: usize,
    #[arg(long = "L", visible_alias = "sites")]
    sites: usize,
    #[arg(long, default_value_t = 1.0)]
    x: f64,
}

#[derive(Debug, Args)]
struct GroundStateArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    mass: MassArgs,
    /// Bond next to the mass; without it the bare chain is solved.
    #[arg(long)]
    k: Option<usize>,
    /// Save the ground-state vector in binary form.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OverlapArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(flatten)]
    mass: MassArgs,
    #[arg(long, requires = "k2", conflicts_with = "preset")]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    /// Placement pair: edge or middle.
    #[arg(long = "config-preset", id = "preset", default_value = "edge")]
    preset: Preset,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Visibility of a single system.
    #[arg(long)]
    m: f64,
    /// Target overall visibility (default 1/e).
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// 3, 4, 5, 6 or custom.
    #[arg(long)]
    figure: Option<Figure>,
    /// Production grids on the 26-site chain.
    #[arg(long)]
    full_scale: bool,
    /// Solve every grid point from scratch.
    #[arg(long)]
    no_cache: bool,
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelKind>>,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    z: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Random instances for the eigensolver comparison.
    #[arg(long, default_value_t = 200)]
    instances: usize,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    // unlocked handles: worker threads log to stderr while this runs
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let file = match &cli.config {
        Some(path) => SweepFile::load(path)?,
        None => SweepFile::default(),
    };
    let mut solver = file.solver.clone().unwrap_or_default();
    if let Some(seed) = cli.seed {
        solver.seed = seed;
    }
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        return Err(Error::InvalidArgument("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut text = String::new();
    let code = pool.install(|| -> Result<i32> {
        match &cli.command {
            Command::Profile(a) => profile(a, &mut text).map(|_| 0),
            Command::GroundState(a) => ground_state(a, &solver, &mut text).map(|_| 0),
            Command::Overlap(a) => overlap(a, &solver, &mut text).map(|_| 0),
            Command::EstimateN(a) => estimate_n(a, &mut text).map(|_| 0),
            Command::Sweep(a) => sweep(a, &file, &solver, cli.seed, cli.out.clone(), &mut text),
            Command::OracleCheck(a) => oracle_check(a, solver.seed, &mut text),
        }
    })?;

    match (&cli.command, &cli.out) {
        (Command::Sweep(_), _) | (_, None) => out.write_all(text.as_bytes())?,
        (_, Some(path)) => std::fs::write(path, &text)?,
    }
    Ok(code)
}

fn profile(a: &ProfileArgs, text: &mut String) -> Result<()> {
    if a.kind == MassKind::None {
        return Err(Error::InvalidArgument("profile needs a mass model".into()));
    }
    let chain = ChainSpec::with_fields(a.sites, a.x, 1.0, 0.0, vec![0.0; a.sites])?;
    let placement = Placement::new(a.k, a.mass.d);
    let p = build_redshift_profile(&chain, &a.mass.mass(a.kind, a.x), &placement)?;
    text.push_str("term,index,r,factor\n");
    for (i, f) in p.site_factors().iter().enumerate() {
        let r = site_distance(a.k, i + 1, a.x, a.mass.d);
        text.push_str(&format!("site,{},{r:?},{f:?}\n", i + 1));
    }
    for (i, f) in p.bond_factors().iter().enumerate() {
        let r = bond_distance(a.k, i + 1, a.x, a.mass.d);
        text.push_str(&format!("bond,{},{r:?},{f:?}\n", i + 1));
    }
    Ok(())
}

fn solve_at(chain: &ChainSpec, mass: &MassModel, k: Option<usize>, d: f64, opts: &SolverOptions) -> Result<GroundState> {
    let spec = match k {
        Some(k) => HamiltonianSpec::new(chain, &build_redshift_profile(chain, mass, &Placement::new(k, d))?)?,
        None => HamiltonianSpec::bare(chain),
    };
    find_global_ground_state(&spec, opts)
}

fn describe(gs: &GroundState, prefix: &str, text: &mut String) {
    let opt = |v: Option<f64>| v.map(|g| format!("{g:?}")).unwrap_or_else(|| "none".into());
    text.push_str(&format!("{prefix}energy = {:?}\n", gs.energy));
    text.push_str(&format!("{prefix}n_up = {}\n", gs.n_up));
    text.push_str(&format!("{prefix}gap_within = {}\n", opt(gs.gap_within)));
    text.push_str(&format!("{prefix}gap_cross = {}\n", opt(gs.gap_cross)));
    text.push_str(&format!("{prefix}residual = {:e}\n", gs.residual));
    text.push_str(&format!("{prefix}method = {:?}\n", gs.method).to_lowercase());
    text.push_str(&format!("{prefix}degenerate = {}\n", gs.degenerate));
}

fn ground_state(a: &GroundStateArgs, opts: &SolverOptions, text: &mut String) -> Result<()> {
    let chain = a.chain.chain()?;
    let mass = a.mass.mass(a.chain.mass, chain.spacing());
    let gs = solve_at(&chain, &mass, a.k, a.mass.d, opts)?;
    describe(&gs, "", text);
    text.push_str(&format!("matvecs = {}\n", gs.matvecs));
    if let Some(path) = &a.dump {
        gs.vector.write_dump(std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    Ok(())
}

fn overlap(a: &OverlapArgs, opts: &SolverOptions, text: &mut String) -> Result<()> {
    let chain = a.chain.chain()?;
    let mass = a.mass.mass(a.chain.mass, chain.spacing());
    let (k1, k2) = match (a.k1, a.k2) {
        (Some(k1), Some(k2)) => (k1, k2),
        _ => {
            let c = SuperpositionConfig::from_preset(a.preset, chain.sites(), a.mass.d)?;
            (c.left.k, c.right.k)
        }
    };
    let g1 = solve_at(&chain, &mass, Some(k1), a.mass.d, opts)?;
    let g2 = solve_at(&chain, &mass, Some(k2), a.mass.d, opts)?;
    let r = analysis::overlap(&g1, &g2)?;
    text.push_str(&format!("k1 = {k1}\nk2 = {k2}\n"));
    describe(&g1, "gs1.", text);
    describe(&g2, "gs2.", text);
    text.push_str(&format!("M = {:?}\n", r.m));
    text.push_str(&format!("one_minus_M = {:?}\n", r.one_minus_m));
    text.push_str(&format!("D = {:?}\n", r.distinguishability));
    text.push_str(&format!("degenerate = {}\n", r.degenerate));
    if let Ok(b) = analysis::estimate_dof_bound(r.m, default_alpha()) {
        text.push_str(&format!("N = {:?}\n", b.n));
    }
    Ok(())
}

fn estimate_n(a: &EstimateArgs, text: &mut String) -> Result<()> {
    let alpha = a.alpha.unwrap_or_else(default_alpha);
    let b = analysis::estimate_dof_bound(a.m, alpha)?;
    text.push_str(&format!("N = {:?}\n", b.n));
    text.push_str(&format!("N_small_delta = {:?}\n", b.small_delta));
    text.push_str(&format!("relative_difference = {:?}\n", b.relative_difference));
    if b.approximation_flagged() {
        text.push_str("warning: small-delta approximation is off by more than 1%\n");
    }
    Ok(())
}

fn sweep(
    a: &SweepArgs,
    file: &SweepFile,
    solver: &SolverOptions,
    seed: Option<u64>,
    out_path: Option<PathBuf>,
    text: &mut String,
) -> Result<i32> {
    let fallback = match (a.figure, file.figure()?) {
        (Some(f), _) => f,
        (None, Some(f)) => f,
        (None, None) => return Err(Error::InvalidArgument("sweep needs --figure or a configured figure".into())),
    };
    let full_scale = a.full_scale || file.full_scale.unwrap_or(false);
    let mut spec = super::SweepSpec::preset(fallback, full_scale);
    let file_for_figure = SweepFile { figure: None, ..file.clone() };
    file_for_figure.apply(&mut spec)?;
    spec.solver = solver.clone();
    if let Some(s) = seed {
        spec.solver.seed = s;
    }
    if a.no_cache {
        spec.use_cache = false;
    }
    if let Some(m) = &a.models {
        spec.models = m.clone();
    }
    if let Some(l) = &a.lengths {
        spec.lengths = l.clone();
    }
    if let Some(z) = &a.z {
        spec.z_values = z.clone();
    }
    if let Some(d) = &a.distances {
        spec.distances = d.clone();
    }
    if out_path.is_some() {
        spec.output = out_path;
    }

    let result = run_sweep(&spec)?;
    match &spec.output {
        Some(path) => {
            let flagged = result.records.len() - result.count(&Status::Ok);
            eprintln!(
                "wrote {} rows to {} ({} flagged, see {}; {} ground states solved)",
                result.records.len(),
                path.display(),
                flagged,
                log_path(path).display(),
                result.solves
            );
        }
        None => text.push_str(&result.csv),
    }
    Ok(if result.count(&Status::Unconverged) > 0 { 2 } else { 0 })
}

fn oracle_check(a: &OracleArgs, seed: u64, text: &mut String) -> Result<i32> {
    let checks = oracle::run_all(a.instances, seed)?;
    for c in &checks {
        text.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    Ok(if checks.iter().all(|c| c.passed) { 0 } else { 2 })
}
