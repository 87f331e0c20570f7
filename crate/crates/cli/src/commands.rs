//! Subcommand definitions and handlers. Every handler returns the process
//! exit code; errors propagate to `main`, which exits with 1.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gbbm_core::diagnostics::{duhamel_check, free_decay_series};
use gbbm_core::dispersion::Mutation;
use gbbm_core::resonance::{
    classification_table, classify_pair_with, find_roots_with, predicted_tag, resonance_residuals,
    write_classification_csv, RootSet, ScanOptions,
};
use gbbm_core::snapshot::{encode, read_snapshot};
use gbbm_core::spectral::{decay_regime_report, write_regime_csv, DecayRegime};
use gbbm_core::{
    fit_decay, run, sample_manifold, scatter_cauchy, solve_anomalous, verify_h_shape, CoeffPair,
    ManifoldKind, RunConfig, Snapshot, Trajectory, Verdict,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, RunOverrides};
use crate::rundir::{resolve_out_dir, RunDirectory};
use crate::verify::{self, Mode, Suite, CRITERIA};

#[derive(Debug, Parser)]
#[command(
    name = "gbbm",
    version,
    about = "Resonance analysis and simulation of the quintic gBBM equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify every coefficient pair and write the table as CSV
    ResonanceTable(TableArgs),
    /// Roots of the generalized phase for one coefficient pair
    ResonanceRoots(RootsArgs),
    /// Solve for the isolated anomalous resonance and check the shape of H
    Anomalous(AnomalousArgs),
    /// Sample points of the resonant line or curve
    ManifoldSample(ManifoldArgs),
    /// Check the Littlewood-Paley partition and reconstruction on a grid
    LpCheck(LpArgs),
    /// Linear dispersive decay of a Gaussian and the per-band decay regimes
    Decay(DecayArgs),
    /// Run the solver and persist snapshots, invariants and a manifest
    Simulate(SimulateArgs),
    /// Dyadic Cauchy test of the profile in H1_xi and H^s
    Scatter(ScatterArgs),
    /// Compare the solver against brute-force Duhamel quadrature on a coarse grid
    DuhamelCheck(DuhamelArgs),
    /// Run every acceptance criterion and print one line per criterion
    FullVerify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AssertFlag {
    /// Exit 2 when the check fails and 3 when it is inconclusive
    #[arg(long)]
    pub assert: bool,
}

impl AssertFlag {
    fn code(&self, verdict: Verdict) -> i32 {
        if self.assert {
            verdict.exit_code()
        } else {
            0
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Upper end of the root scan
    #[arg(long, default_value_t = 1e3)]
    pub eta_max: f64,
    /// Bisection tolerance on roots
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Log-spaced scan points
    #[arg(long, default_value_t = 100_000)]
    pub points: usize,
}

impl ScanArgs {
    fn options(&self) -> ScanOptions {
        ScanOptions {
            eta_max: self.eta_max,
            tol: self.tol,
            points: self.points,
            ..ScanOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    /// CSV destination; standard output when absent
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Coefficient A
    #[arg(long, allow_hyphen_values = true)]
    pub a: i32,
    /// Coefficient B
    #[arg(long, allow_hyphen_values = true)]
    pub b: i32,
    #[command(flatten)]
    pub scan: ScanArgs,
}

#[derive(Debug, Args)]
pub struct AnomalousArgs {
    /// Bisection tolerance on eta0
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Points per dense grid in the shape check of H
    #[arg(long, default_value_t = 100_000)]
    pub grid_n: usize,
    #[command(flatten)]
    pub assert: AssertFlag,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Manifold {
    Line,
    Curve,
}

#[derive(Debug, Args)]
pub struct ManifoldArgs {
    /// Which family
    #[arg(long, value_enum, default_value_t = Manifold::Line)]
    pub kind: Manifold,
    /// Lower end of the parameter range
    #[arg(long, default_value_t = 1.001, allow_hyphen_values = true)]
    pub eta_min: f64,
    /// Upper end of the parameter range
    #[arg(long, default_value_t = 1e3, allow_hyphen_values = true)]
    pub eta_max: f64,
    /// Number of evenly spaced points
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// CSV destination; standard output when absent
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// Grid points
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Box length
    #[arg(long, default_value_t = 800.0)]
    pub length: f64,
    /// Number of random fields decomposed
    #[arg(long, default_value_t = 3)]
    pub fields: usize,
    /// Seed of the random fields
    #[arg(long, default_value_t = verify::SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub assert: AssertFlag,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// Grid points
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Box length
    #[arg(long, default_value_t = 800.0)]
    pub length: f64,
    /// Gaussian amplitude epsilon
    #[arg(long, default_value_t = 0.05)]
    pub amplitude: f64,
    /// Gaussian width sigma
    #[arg(long, default_value_t = 4.0)]
    pub width: f64,
    /// Start of the fit window
    #[arg(long, default_value_t = 20.0)]
    pub t_min: f64,
    /// End of the fit window
    #[arg(long, default_value_t = 400.0)]
    pub t_max: f64,
    /// Uniformly spaced sample times in the window
    #[arg(long, default_value_t = 40)]
    pub samples: usize,
    /// Accepted distance of the exponent from -1/3
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    /// Largest accepted measured/bound ratio in the regime table
    #[arg(long, default_value_t = 1.0)]
    pub regime_bound: f64,
    /// Output directory [default: $GBBM_OUT_DIR/decay]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub assert: AssertFlag,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunOverrides,
    /// Snapshot whose profile is used as the datum at t = 1
    #[arg(long, value_name = "FILE")]
    pub initial: Option<PathBuf>,
    /// Output directory [default: $GBBM_OUT_DIR/simulate]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    /// Read snapshots from a simulate run directory instead of running
    #[arg(long, value_name = "DIR")]
    pub from: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunOverrides,
    /// First dyadic time
    #[arg(long, default_value_t = 16.0)]
    pub base_t: f64,
    /// Number of dyadic differences
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Sobolev index of the secondary norm
    #[arg(long, default_value_t = verify::S)]
    pub s: f64,
    /// Required contraction ratio of successive differences
    #[arg(long, default_value_t = verify::tol::SCATTER_RATIO)]
    pub ratio: f64,
    /// Output directory [default: $GBBM_OUT_DIR/scatter]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub assert: AssertFlag,
}

#[derive(Debug, Args)]
pub struct DuhamelArgs {
    /// Coarse grid points (at most 32)
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// Box length
    #[arg(long, default_value_t = 40.0)]
    pub length: f64,
    /// Left edge of the box
    #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
    pub x_min: f64,
    /// Gaussian amplitude epsilon
    #[arg(long, default_value_t = 0.05)]
    pub amplitude: f64,
    /// RK4 time step
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    /// Snapshot stride; quadrature nodes are the snapshots
    #[arg(long, default_value_t = 2)]
    pub snapshot_stride: usize,
    /// Time at which the profile is compared
    #[arg(long, default_value_t = 4.0)]
    pub t_check: f64,
    /// Use every k-th snapshot as a quadrature node
    #[arg(long, default_value_t = 1)]
    pub node_stride: usize,
    /// Accepted relative residual
    #[arg(long, default_value_t = verify::tol::DUHAMEL_RELATIVE)]
    pub tol: f64,
    #[command(flatten)]
    pub assert: AssertFlag,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MutationArg {
    DropBracket,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reduced nonlinear grid (default)
    #[arg(long, conflicts_with = "thorough")]
    pub quick: bool,
    /// Full resolution everywhere
    #[arg(long)]
    pub thorough: bool,
    /// Comma-separated criterion numbers; all when absent
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    /// Also write the outcomes as JSON
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    pub mutate: Option<MutationArg>,
}

pub fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::ResonanceTable(a) => resonance_table(&a),
        Command::ResonanceRoots(a) => resonance_roots(&a),
        Command::Anomalous(a) => anomalous(&a),
        Command::ManifoldSample(a) => manifold_sample(&a),
        Command::LpCheck(a) => lp_check(&a),
        Command::Decay(a) => decay(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Scatter(a) => scatter(&a),
        Command::DuhamelCheck(a) => duhamel(&a),
        Command::FullVerify(a) => full_verify(&a),
    }
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().lock().write_all(bytes)?),
    }
}

fn resonance_table(args: &TableArgs) -> Result<i32> {
    let table = classification_table(&args.scan.options())?;
    let mut buf = Vec::new();
    write_classification_csv(&mut buf, &table)?;
    write_out(args.out.as_deref(), &buf)?;
    let entry = |a: i32, b: i32| {
        table
            .iter()
            .find(|(e, _)| (e.pair.a(), e.pair.b()) == (a, b))
    };
    let mut msg = String::new();
    if let Some((e, c)) = entry(1, 0) {
        writeln!(
            msg,
            "line L:      {} {}, family {}",
            e.pair, c.tag, e.witness
        )?;
    }
    if let Some((e, c)) = entry(0, 1) {
        writeln!(
            msg,
            "curve Gamma: {} {}, family {}",
            e.pair, c.tag, e.witness
        )?;
    }
    if let Some((e, c)) = entry(4, -1) {
        let sol = solve_anomalous(1e-13)?;
        writeln!(
            msg,
            "anomalous:   {} {} at eta0 = {:.10}, xi0 = {:.10}, family {}",
            e.pair, c.tag, sol.eta0, sol.xi0, e.witness
        )?;
    }
    // keep stdout clean when it carries the CSV
    if args.out.is_some() {
        print!("{msg}");
    } else {
        eprint!("{msg}");
    }
    Ok(0)
}

fn resonance_roots(args: &RootsArgs) -> Result<i32> {
    let pair = CoeffPair::new(args.a, args.b)?;
    let opts = args.scan.options();
    let (identically_zero, roots) = match find_roots_with(pair, &opts) {
        RootSet::IdenticallyZero => (true, Vec::new()),
        RootSet::Roots(r) => (false, r),
    };
    let (class, consistent) = match classify_pair_with(pair, &opts) {
        Ok(c) => (Some(c.tag), true),
        Err(_) => (None, false),
    };
    print_json(&json!({
        "a": pair.a(),
        "b": pair.b(),
        "identically_zero": identically_zero,
        "roots": roots,
        "predicted": predicted_tag(pair),
        "class": class,
        "consistent": consistent,
    }))?;
    Ok(if consistent {
        0
    } else {
        Verdict::Fail.exit_code()
    })
}

fn anomalous(args: &AnomalousArgs) -> Result<i32> {
    let sol = solve_anomalous(args.tol)?;
    let h = verify_h_shape(args.grid_n)?;
    let (lo, hi) = verify::tol::ETA0_RANGE;
    let pass = h.pass && (lo..=hi).contains(&sol.eta0);
    print_json(&json!({ "solution": sol, "h_shape": h, "pass": pass }))?;
    Ok(args.assert.code(Verdict::from_pass(pass)))
}

fn manifold_sample(args: &ManifoldArgs) -> Result<i32> {
    let kind = match args.kind {
        Manifold::Line => ManifoldKind::Line,
        Manifold::Curve => ManifoldKind::Curve,
    };
    let pts = sample_manifold(kind, (args.eta_min, args.eta_max), args.n)?;
    let mut csv = String::from("eta1,eta2,eta3,eta4,eta5,xi,phase,grad_max\n");
    for p in &pts {
        let (phi, grad) = resonance_residuals(p);
        let [a, b, c, d, e] = p.slots();
        writeln!(csv, "{a},{b},{c},{d},{e},{},{phi},{grad}", p.xi)?;
    }
    write_out(args.out.as_deref(), csv.as_bytes())?;
    Ok(0)
}

fn lp_check(args: &LpArgs) -> Result<i32> {
    let k0s: Vec<i32> = (0..args.fields).map(|i| -6 + 3 * (i as i32 % 3)).collect();
    let (partition, reconstruction) = verify::lp_defects(args.n, args.length, &k0s, args.seed)?;
    let pass = partition <= verify::tol::PARTITION && reconstruction <= verify::tol::RECONSTRUCTION;
    print_json(&json!({
        "n": args.n,
        "length": args.length,
        "partition_defect": partition,
        "reconstruction_defect": reconstruction,
        "pass": pass,
    }))?;
    Ok(args.assert.code(Verdict::from_pass(pass)))
}

fn decay(args: &DecayArgs) -> Result<i32> {
    if args.samples < 2 || args.t_max.partial_cmp(&args.t_min) != Some(std::cmp::Ordering::Greater)
    {
        bail!("need at least two samples and t_max > t_min");
    }
    let cfg = RunConfig {
        n: args.n,
        length: args.length,
        amplitude: args.amplitude,
        width: args.width,
        nonlinear: false,
        ..RunConfig::default()
    };
    cfg.validate()?;
    let grid = cfg.grid()?;
    let f0 = cfg.initial_profile(&grid);
    let step = (args.t_max - args.t_min) / (args.samples - 1) as f64;
    let times: Vec<f64> = (0..args.samples)
        .map(|i| args.t_min + step * i as f64)
        .collect();
    let sup = free_decay_series(&f0, &times);
    let fit = fit_decay(&times, &sup, (args.t_min, args.t_max))?;
    let regime_times = [1.0, 4.0, 16.0, 64.0, 256.0, 400.0];
    let bands: Vec<i32> = (-6..=4).collect();
    let regime = decay_regime_report(
        &f0,
        &regime_times,
        &bands,
        DecayRegime::default(),
        args.regime_bound,
    )?;

    let dir = resolve_out_dir(args.out_dir.as_deref(), "decay");
    let mut rd = RunDirectory::create(&dir, "decay")?;
    let mut series = String::from("t,sup_norm\n");
    for (t, s) in times.iter().zip(&sup) {
        writeln!(series, "{t},{s}")?;
    }
    rd.write("decay.csv", series.as_bytes())?;
    let mut buf = Vec::new();
    write_regime_csv(&mut buf, &regime)?;
    rd.write("regime.csv", &buf)?;
    let pass = fit.within(verify::tol::DECAY_TARGET, args.tol) && regime.pass;
    let report = json!({ "fit": fit, "regime_max_ratio": regime.max_ratio,
        "regime_spread": regime.spread, "regime_pass": regime.pass, "pass": pass });
    rd.write("report.json", &json_bytes(&report)?)?;
    rd.finish(&cfg)?;
    println!(
        "exponent {:.4} over [{}, {}], regime max ratio {:.3}, {}",
        fit.fitted_exponent,
        args.t_min,
        args.t_max,
        regime.max_ratio,
        if pass { "pass" } else { "fail" }
    );
    println!("wrote {}", dir.display());
    Ok(args.assert.code(Verdict::from_pass(pass)))
}

/// Snapshot file name inside a run directory.
fn snapshot_name(i: usize) -> String {
    format!("snapshots/snap_{i:05}.bin")
}

fn simulate(args: &SimulateArgs) -> Result<i32> {
    let mut cfg = args.run.resolve()?;
    let initial = match &args.initial {
        Some(path) => {
            let snap = read_snapshot(path)?;
            let g = &snap.profile.grid;
            cfg.n = g.n();
            cfg.length = g.length();
            cfg.x_min = Some(g.x_min());
            cfg.validate()?;
            Some(snap)
        }
        None => None,
    };
    let traj = match &initial {
        Some(snap) => gbbm_core::solver::run_with_initial(&cfg, snap.profile.clone())?,
        None => run(&cfg)?,
    };
    let dir = resolve_out_dir(args.out_dir.as_deref(), "simulate");
    let mut rd = RunDirectory::create(&dir, "simulate")?;
    if let Some(snap) = &initial {
        rd.write("initial.bin", &encode(snap))?;
    }
    rd.write("config.toml", config::to_toml(&cfg)?.as_bytes())?;
    let mut buf = Vec::new();
    traj.write_series_csv(&mut buf)?;
    rd.write("invariants.csv", &buf)?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        rd.write(&snapshot_name(i), &encode(snap))?;
    }
    let drift = traj.invariant_drift();
    let summary = json!({
        "steps": cfg.steps(),
        "snapshots": traj.snapshots.len(),
        "invariant_drift": drift,
        "max_imag_ratio": traj.max_imag_ratio,
        "max_boundary_ratio": traj.max_boundary_ratio,
    });
    rd.write("summary.json", &json_bytes(&summary)?)?;
    rd.finish(&cfg)?;
    println!(
        "{} steps, {} snapshots, drift mass {:.1e} h1 {:.1e} hamiltonian {:.1e}",
        cfg.steps(),
        traj.snapshots.len(),
        drift.mass,
        drift.h1_momentum,
        drift.hamiltonian
    );
    println!("wrote {}", dir.display());
    Ok(0)
}

/// Rebuild a trajectory (snapshots only) from a simulate run directory.
pub fn load_run(dir: &Path) -> Result<Trajectory> {
    let cfg = config::load_file(&dir.join("config.toml"))?;
    let snap_dir = dir.join("snapshots");
    let mut names: Vec<PathBuf> = fs::read_dir(&snap_dir)
        .with_context(|| format!("reading {}", snap_dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    names.sort();
    let snapshots = names
        .iter()
        .map(|p| read_snapshot(p))
        .collect::<gbbm_core::Result<Vec<Snapshot>>>()?;
    if snapshots.is_empty() {
        bail!("no snapshots in {}", snap_dir.display());
    }
    Ok(Trajectory {
        config: cfg,
        snapshots,
        series: Vec::new(),
        max_imag_ratio: 0.0,
        max_boundary_ratio: 0.0,
    })
}

fn scatter(args: &ScatterArgs) -> Result<i32> {
    let traj = match &args.from {
        Some(dir) => load_run(dir)?,
        None => run(&args.run.resolve()?)?,
    };
    let rep = scatter_cauchy(&traj, args.base_t, args.levels, args.s, args.ratio)?;
    let dir = resolve_out_dir(args.out_dir.as_deref(), "scatter");
    let mut rd = RunDirectory::create(&dir, "scatter")?;
    rd.write("report.json", &json_bytes(&rep)?)?;
    rd.finish(&traj.config)?;
    print_json(&rep)?;
    Ok(args.assert.code(Verdict::from_pass(rep.pass)))
}

fn duhamel(args: &DuhamelArgs) -> Result<i32> {
    let cfg = RunConfig {
        n: args.n,
        length: args.length,
        x_min: Some(args.x_min),
        dt: args.dt,
        t_end: args.t_check,
        amplitude: args.amplitude,
        snapshot_stride: args.snapshot_stride,
        ..verify::duhamel_config(args.amplitude)
    };
    let traj = run(&cfg)?;
    let rep = duhamel_check(&traj, args.t_check, args.n, args.node_stride)?;
    let pass = rep.max_residual <= args.tol;
    print_json(&json!({ "report": rep, "tol": args.tol, "pass": pass }))?;
    Ok(args.assert.code(Verdict::from_pass(pass)))
}

fn full_verify(args: &VerifyArgs) -> Result<i32> {
    let mode = if args.thorough {
        Mode::Thorough
    } else {
        Mode::Quick
    };
    let mutation = match args.mutate {
        Some(MutationArg::DropBracket) => Mutation::DropBracket,
        None => Mutation::None,
    };
    let suite = Suite::with_mutation(mode, mutation);
    let ids: Vec<u8> = if args.only.is_empty() {
        CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        args.only.clone()
    };
    println!("mode {}", mode.describe());
    if mutation != Mutation::None {
        println!("mutation {mutation:?} active");
    }
    let mut outcomes = Vec::with_capacity(ids.len());
    for id in ids {
        let o = suite.run(id);
        println!("{o}");
        outcomes.push(o);
    }
    let passed = outcomes
        .iter()
        .filter(|o| o.verdict == Verdict::Pass)
        .count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if let Some(path) = &args.json {
        fs::write(
            path,
            json_bytes(&json!({ "mode": mode, "outcomes": outcomes }))?,
        )
        .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(verify::exit_code(&outcomes))
}
