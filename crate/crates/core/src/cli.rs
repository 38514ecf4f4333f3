//! `crsphere` command-line interface.
//!
//! Human-readable summaries go to stdout; machine artifacts (embedding files,
//! reports, histograms) are only written to the paths given on the command
//! line. Each artifact gets a `<path>.manifest.json` sidecar describing the
//! run that produced it.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::catalog::{
    ahern_rudin_embedding, ar_identity_sides, identity_check, make_negative_control, q_block_embedding,
    ControlKind, GraphEmbedding,
};
use crate::certifier::{
    multistart_minimize, profile_ar, sweep_detailed, MinimizeOptions, MultistartOptions, Objective,
    SigmaHistogram, SweepConfig, Verdict, DEFAULT_RESTARTS, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::error::CrError;
use crate::gaussian::GaussianRational;
use crate::linalg::DEFAULT_RANK_TOL;
use crate::poly::{MultiDegree, WPolynomial};
use crate::sampling::SphereSampler;
use crate::verifier::{EquivalenceOutcome, PreparedEmbedding};

/// Worker-count override read when `--workers` is not given.
pub const WORKERS_ENV: &str = "CRSPHERE_WORKERS";

/// Resolution of the 1-D oracle scan used by `minimize` on the Ahern–Rudin embedding.
pub const PROFILE_RESOLUTION: usize = 1_000_000;

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IDENTITY_FAILURE: i32 = 1;
    pub const REGULARITY_FAILURE: i32 = 2;
    pub const CRITERION_DISAGREEMENT: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
}

#[derive(Parser, Debug)]
#[command(name = "crsphere", version, about = "CR regular embeddings of odd spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a catalog embedding to a JSON file.
    Construct(ConstructArgs),
    /// Check the quartic identity behind the totally real embedding of S³ exactly.
    IdentityCheck(IdentityArgs),
    /// Sample the sphere and test the independence criterion at every point.
    Verify(VerifyArgs),
    /// Multistart minimization of the degeneracy measure over the sphere.
    Minimize(MinimizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Ar,
    QBlock,
    Holomorphic,
    Zero,
    Radial,
}

#[derive(clap::Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    /// Block count for `q-block`.
    #[arg(long)]
    n: Option<usize>,
    /// Source dimension for the negative controls.
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct IdentityArgs {
    #[arg(long)]
    report: Option<PathBuf>,
    /// Perturb one right-hand-side coefficient (self-test of the checker).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    embedding: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV of per-sample σ_min counts.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Sigma,
    Det,
}

#[derive(clap::Args, Debug)]
struct MinimizeArgs {
    embedding: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    sweep_samples: u64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Sigma)]
    objective: ObjectiveArg,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn usage(e: CrError) -> Self {
        Self::new(exit::USAGE, e.to_string())
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Runs the CLI on explicit arguments and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Construct(a) => cmd_construct(&a, out, started),
        Command::IdentityCheck(a) => cmd_identity_check(&a, out, started),
        Command::Verify(a) => cmd_verify(&a, out, err, started),
        Command::Minimize(a) => cmd_minimize(&a, out, err, started),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Deterministic part of the run description, embedded in every report.
#[derive(Clone, Debug, Serialize)]
struct Manifest {
    command: String,
    config: Value,
    input_sha256: Option<String>,
    tool_version: String,
}

impl Manifest {
    fn new(command: &str, config: Value, input: Option<&[u8]>) -> Self {
        Self {
            command: command.into(),
            config,
            input_sha256: input.map(sha256_hex),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes `bytes` to `path` and the run manifest (with wall time and output
/// hash) next to it.
fn write_artifact(path: &Path, bytes: &[u8], manifest: &Manifest, started: Instant) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::new(exit::IO, format!("cannot write {}: {e}", path.display()));
    fs::write(path, bytes).map_err(io)?;
    let sidecar = json!({
        "manifest": manifest,
        "output": path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "output_sha256": sha256_hex(bytes),
        "wall_time_ms": started.elapsed().as_secs_f64() * 1e3,
    });
    let text = serde_json::to_string_pretty(&sidecar).expect("manifest serializes") + "\n";
    fs::write(sidecar_path(path), text).map_err(io)
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn read_embedding(path: &Path) -> Result<(GraphEmbedding, Vec<u8>), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::new(exit::NO_INPUT, format!("cannot read {}: {e}", path.display())))?;
    let embedding = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::new(exit::DATA, format!("{} is not a valid embedding file: {e}", path.display())))?;
    Ok((embedding, bytes))
}

fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::new(exit::USAGE, format!("{WORKERS_ENV}={v:?} is not a worker count"))),
        _ => Ok(None),
    }
}

fn build_preset(a: &ConstructArgs) -> Result<GraphEmbedding, Failure> {
    let control = |kind| make_negative_control(kind, a.m).map_err(Failure::usage);
    match a.preset {
        Preset::Ar => Ok(ahern_rudin_embedding()),
        Preset::QBlock => {
            let n = a.n.ok_or_else(|| Failure::new(exit::USAGE, "--preset q-block requires --n"))?;
            q_block_embedding(n).map_err(Failure::usage)
        }
        Preset::Holomorphic => control(ControlKind::Holomorphic),
        Preset::Zero => control(ControlKind::Zero),
        Preset::Radial => control(ControlKind::Radial),
    }
}

fn cmd_construct(a: &ConstructArgs, out: &mut dyn Write, started: Instant) -> CliResult {
    let e = build_preset(a)?;
    let preset = a.preset.to_possible_value().expect("no skipped variants").get_name().to_string();
    let manifest = Manifest::new("construct", json!({ "preset": preset, "n": a.n, "m": a.m }), None);
    write_artifact(&a.out, &to_json_bytes(&e), &manifest, started)?;
    let _ = writeln!(
        out,
        "wrote {} (m = {}, q = {}, label {}) to {}",
        preset,
        e.m(),
        e.q(),
        e.label(),
        a.out.display()
    );
    Ok(exit::SUCCESS)
}

fn cmd_identity_check(a: &IdentityArgs, out: &mut dyn Write, started: Instant) -> CliResult {
    let (lhs, mut rhs) = ar_identity_sides();
    if a.inject_fault {
        let deg = MultiDegree::new(vec![1, 1], vec![1, 1]).expect("valid degree");
        let bump = WPolynomial::from_terms(2, [(deg, GaussianRational::from_integers(1, 0))]).expect("m = 2");
        rhs = &rhs + &bump;
    }
    let check = identity_check(lhs, rhs).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
    let _ = writeln!(out, "LHS  z2*dP/dzb1 - z1*dP/dzb2 ({} terms): {}", check.lhs.term_count(), check.lhs);
    let _ = writeln!(out, "RHS  expanded moduli form ({} terms): {}", check.rhs.term_count(), check.rhs);
    if let Some(path) = &a.report {
        let manifest = Manifest::new("identity-check", json!({ "inject_fault": a.inject_fault }), None);
        let doc = json!({ "manifest": manifest, "check": check });
        write_artifact(path, &to_json_bytes(&doc), &manifest, started)?;
    }
    if check.holds {
        let _ = writeln!(out, "identity holds: residual is the zero polynomial");
        Ok(exit::SUCCESS)
    } else {
        let _ = writeln!(
            out,
            "identity FAILS: residual has {} term(s): {}",
            check.residual.term_count(),
            check.residual
        );
        Ok(exit::IDENTITY_FAILURE)
    }
}

#[derive(Debug, Serialize)]
struct EquivalenceSummary {
    checked: usize,
    agreed: usize,
    disagreements: Vec<Value>,
}

/// Three-way criterion comparison at every 100th sample.
fn equivalence_spot_checks(e: &GraphEmbedding, cfg: &SweepConfig) -> EquivalenceSummary {
    let prepared = PreparedEmbedding::new(e);
    let sampler = SphereSampler::new(e.m(), cfg.seed);
    let indices: Vec<u64> = (0..cfg.samples).step_by(100).collect();
    let job = || {
        indices
            .par_iter()
            .map(|&i| {
                let z = sampler.point(i);
                (i, prepared.equivalence_check(&z, cfg.tol))
            })
            .collect::<Vec<_>>()
    };
    let results = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().map(|p| p.install(job)),
        None => Ok(job()),
    }
    .unwrap_or_else(|_| job());
    let mut summary = EquivalenceSummary { checked: results.len(), agreed: 0, disagreements: Vec::new() };
    for (i, r) in results {
        match r {
            Ok(o) if o.agree() => summary.agreed += 1,
            Ok(o) => summary.disagreements.push(counterexample(i, &o)),
            Err(err) => summary.disagreements.push(json!({ "index": i, "error": err.to_string() })),
        }
    }
    summary
}

fn counterexample(index: u64, o: &EquivalenceOutcome) -> Value {
    json!({ "index": index, "outcome": o })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write, started: Instant) -> CliResult {
    let (e, bytes) = read_embedding(&a.embedding)?;
    let cfg = SweepConfig { samples: a.samples, seed: a.seed, tol: a.tol, workers: resolve_workers(a.workers)? };
    let result = sweep_detailed(&e, &cfg).map_err(Failure::usage)?;
    let equivalence = equivalence_spot_checks(&e, &cfg);
    let report = &result.report;

    let manifest = Manifest::new(
        "verify",
        json!({ "samples": a.samples, "seed": a.seed, "tol": a.tol, "restarts": 0, "equivalence_stride": 100 }),
        Some(&bytes),
    );
    if let Some(path) = &a.report {
        let doc = json!({ "manifest": manifest, "report": report, "equivalence": equivalence });
        write_artifact(path, &to_json_bytes(&doc), &manifest, started)?;
    }
    if let Some(path) = &a.histogram {
        let h = SigmaHistogram::from_samples(&result.sigma_mins, a.bins).map_err(Failure::usage)?;
        write_artifact(path, h.to_csv().as_bytes(), &manifest, started)?;
    }

    let _ = writeln!(
        out,
        "{}: {} samples, min sigma_min = {:e} (sigma_max {:e} there), verdict {}",
        report.label, report.samples, report.min_sigma, report.sigma_max_at_argmin, report.verdict
    );
    let _ = writeln!(
        out,
        "criterion equivalence: {}/{} spot checks agree",
        equivalence.agreed, equivalence.checked
    );
    if !equivalence.disagreements.is_empty() {
        let _ = writeln!(err, "criteria disagree at {} point(s)", equivalence.disagreements.len());
        for d in &equivalence.disagreements {
            let _ = writeln!(err, "  {d}");
        }
        return Ok(exit::CRITERION_DISAGREEMENT);
    }
    match report.verdict {
        Verdict::AllRegular => Ok(exit::SUCCESS),
        Verdict::FailureFound => {
            if let Some(w) = &report.first_failure {
                let z: Vec<[f64; 2]> = w.z.iter().map(|c| [c.re, c.im]).collect();
                let _ = writeln!(
                    out,
                    "witness: sample {} z = {:?} sigma_min = {:e}",
                    w.index, z, w.sigma_min
                );
            }
            Ok(exit::REGULARITY_FAILURE)
        }
        Verdict::Marginal => {
            let _ = writeln!(out, "{} marginal point(s) near the rank threshold", report.marginal_points);
            Ok(exit::REGULARITY_FAILURE)
        }
    }
}

fn cmd_minimize(a: &MinimizeArgs, out: &mut dyn Write, err: &mut dyn Write, started: Instant) -> CliResult {
    if a.restarts == 0 {
        return Err(Failure::new(exit::USAGE, "--restarts must be at least 1"));
    }
    let (e, bytes) = read_embedding(&a.embedding)?;
    let objective = match a.objective {
        ObjectiveArg::Sigma => Objective::SigmaMinSquared,
        ObjectiveArg::Det => Objective::GramDeterminant,
    };
    let base = MultistartOptions {
        local: MinimizeOptions { objective, ..MinimizeOptions::default() },
        sweep_samples: a.sweep_samples,
        tol: a.tol,
        workers: resolve_workers(a.workers)?,
    };
    let report = multistart_minimize(&e, a.restarts, a.seed, &base).map_err(Failure::usage)?;

    // Square-case oracle: |det M|² on S³ depends only on |z₁|².
    let oracle = if e.same_graph(&ahern_rudin_embedding()) {
        let det_opts = MultistartOptions {
            local: MinimizeOptions { objective: Objective::GramDeterminant, ..base.local.clone() },
            ..base.clone()
        };
        let det_report = multistart_minimize(&e, a.restarts, a.seed, &det_opts).map_err(Failure::usage)?;
        let profile = profile_ar(PROFILE_RESOLUTION).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
        let best_det = det_report.best_value.expect("multistart sets best_value");
        Some(json!({
            "profile": profile,
            "best_det_sq": best_det,
            "gap": (best_det - profile.min_value).abs(),
        }))
    } else {
        None
    };

    let manifest = Manifest::new(
        "minimize",
        json!({
            "restarts": a.restarts,
            "seed": a.seed,
            "tol": a.tol,
            "samples": a.sweep_samples,
            "objective": objective,
            "step_tol": base.local.step_tol,
            "max_iter": base.local.max_iter,
        }),
        Some(&bytes),
    );
    if let Some(path) = &a.report {
        let doc = json!({ "manifest": manifest, "report": report, "oracle_check": oracle });
        write_artifact(path, &to_json_bytes(&doc), &manifest, started)?;
    }

    let unconverged = report.converged_minima.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        let _ = writeln!(err, "warning: {unconverged} local search(es) hit the iteration cap");
    }
    let _ = writeln!(
        out,
        "{}: best {:?} = {:e} over {} restarts + sweep argmin; sigma_min there {:e}; verdict {}",
        report.label,
        objective,
        report.best_value.unwrap_or(f64::NAN),
        a.restarts,
        report.min_sigma,
        report.verdict
    );
    if let Some(o) = &oracle {
        let _ = writeln!(
            out,
            "|det M|^2 oracle: scan min {} at t = {}, multistart {}, gap {:e}",
            o["profile"]["min_value"], o["profile"]["t_star"], o["best_det_sq"], o["gap"].as_f64().unwrap_or(f64::NAN)
        );
    }
    Ok(exit::SUCCESS)
}
