//! Global evidence for CR regularity over the whole sphere: seeded sampling
//! sweeps of `σ_min` and multistart derivative-free minimization.
//!
//! Sweeps are evidence, not proof. Every report is a pure function of the
//! embedding and the configuration; the worker count never changes a byte.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{check_on_sphere, GraphEmbedding};
use crate::error::{CrError, Result};
use crate::linalg::{complex_singular_values, gram_determinant, DEFAULT_RANK_TOL};
use crate::sampling::{normalize, SphereSampler};
use crate::verifier::{sphere_tangent_basis, IndependenceReport, PreparedEmbedding};

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_RESTARTS: usize = 64;

/// Restart points are drawn from this seed offset so they never coincide
/// with the sweep samples.
const RESTART_SEED_MIX: u64 = 0x5851_F42D_4C95_7F2D;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    /// Thread count; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, tol: DEFAULT_RANK_TOL, workers: None }
    }
}

impl SweepConfig {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(CrError::InvalidArgument("samples must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CrError::InvalidArgument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.workers == Some(0) {
            return Err(CrError::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AllRegular,
    FailureFound,
    Marginal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AllRegular => "all-regular (sampled)",
            Verdict::FailureFound => "failure-found",
            Verdict::Marginal => "marginal",
        })
    }
}

/// A point where the independence criterion fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: u64,
    #[serde(with = "crate::serde_complex::vec")]
    pub z: Vec<Complex64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimumRecord {
    /// 0 is the sweep argmin; `k ≥ 1` is the `k`-th seeded restart.
    pub start: usize,
    #[serde(with = "crate::serde_complex::vec")]
    pub z: Vec<Complex64>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub label: String,
    pub m: usize,
    pub q: usize,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub restarts: usize,
    pub min_sigma: f64,
    pub sigma_max_at_argmin: f64,
    #[serde(with = "crate::serde_complex::vec")]
    pub argmin_z: Vec<Complex64>,
    pub failures: u64,
    pub marginal_points: u64,
    pub first_failure: Option<Witness>,
    pub objective: Option<Objective>,
    pub best_value: Option<f64>,
    pub converged_minima: Vec<MinimumRecord>,
    pub verdict: Verdict,
    /// Sampling sweeps and local searches are evidence, not proofs.
    pub evidence: String,
}

/// Report plus the per-sample `σ_min` values in sample order.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub report: CertificateReport,
    pub sigma_mins: Vec<f64>,
}

fn run_with_workers<R: Send>(workers: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CrError::InvalidArgument(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn verdict_for(failures: u64, marginal: u64) -> Verdict {
    if failures > 0 {
        Verdict::FailureFound
    } else if marginal > 0 {
        Verdict::Marginal
    } else {
        Verdict::AllRegular
    }
}

pub fn sweep(e: &GraphEmbedding, cfg: &SweepConfig) -> Result<CertificateReport> {
    Ok(sweep_detailed(e, cfg)?.report)
}

pub fn sweep_detailed(e: &GraphEmbedding, cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let prepared = PreparedEmbedding::new(e);
    let sampler = SphereSampler::new(e.m(), cfg.seed);
    let tol = cfg.tol;
    let reports: Vec<IndependenceReport> = run_with_workers(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| prepared.point_report(&sampler.point(i), tol))
            .collect::<Result<Vec<_>>>()
    })??;

    // Index-ordered scan: ties on σ_min resolve to the lowest sample index.
    let mut best = 0usize;
    let mut failures = 0u64;
    let mut marginal = 0u64;
    let mut first_failure = None;
    for (i, r) in reports.iter().enumerate() {
        if r.sigma_min < reports[best].sigma_min {
            best = i;
        }
        if !r.cr_regular {
            failures += 1;
            if first_failure.is_none() {
                first_failure = Some(Witness {
                    index: i as u64,
                    z: r.z.clone(),
                    sigma_min: r.sigma_min,
                    sigma_max: r.sigma_max,
                });
            }
        } else if r.marginal {
            marginal += 1;
        }
    }
    let argmin = &reports[best];
    let report = CertificateReport {
        label: e.label().to_string(),
        m: e.m(),
        q: e.q(),
        samples: cfg.samples,
        seed: cfg.seed,
        tol,
        restarts: 0,
        min_sigma: argmin.sigma_min,
        sigma_max_at_argmin: argmin.sigma_max,
        argmin_z: argmin.z.clone(),
        failures,
        marginal_points: marginal,
        first_failure,
        objective: None,
        best_value: None,
        converged_minima: Vec::new(),
        verdict: verdict_for(failures, marginal),
        evidence: "sampled".into(),
    };
    let sigma_mins = reports.iter().map(|r| r.sigma_min).collect();
    Ok(SweepResult { report, sigma_mins })
}

/// What the local search minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// `σ_min(M(z))²`.
    SigmaMinSquared,
    /// `det(M M*)`, equal to `|det M|²` when `M` is square.
    GramDeterminant,
}

impl Objective {
    pub fn eval(self, prepared: &PreparedEmbedding, z: &[Complex64]) -> f64 {
        let rows = prepared.matrix_at(z);
        match self {
            Objective::SigmaMinSquared => {
                let sv = complex_singular_values(&rows);
                if sv.len() < rows.len() {
                    0.0
                } else {
                    let s = *sv.last().unwrap();
                    s * s
                }
            }
            Objective::GramDeterminant => gram_determinant(&rows).max(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub objective: Objective,
    pub initial_step: f64,
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { objective: Objective::SigmaMinSquared, initial_step: 0.1, step_tol: 1e-10, max_iter: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalMinimum {
    pub z: Vec<Complex64>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Compass search in the tangent space of the sphere: poll `z ± step·b_i`
/// over an orthonormal tangent basis, renormalize, move to the best strict
/// improvement and double the step (capped at the initial step), otherwise
/// halve it.
pub fn local_minimize(e: &GraphEmbedding, z0: &[Complex64], opts: &MinimizeOptions) -> Result<LocalMinimum> {
    local_minimize_prepared(&PreparedEmbedding::new(e), z0, opts)
}

pub fn local_minimize_prepared(
    prepared: &PreparedEmbedding,
    z0: &[Complex64],
    opts: &MinimizeOptions,
) -> Result<LocalMinimum> {
    if z0.len() != prepared.m() {
        return Err(CrError::DimensionMismatch { expected: prepared.m(), found: z0.len() });
    }
    check_on_sphere(z0)?;
    if !(opts.initial_step > 0.0 && opts.step_tol > 0.0) {
        return Err(CrError::InvalidArgument("step sizes must be positive".into()));
    }
    let h = |z: &[Complex64]| opts.objective.eval(prepared, z);
    let mut z = normalize(z0);
    let mut value = h(&z);
    let start_value = value;
    let mut step = opts.initial_step;
    let mut iterations = 0;
    while step >= opts.step_tol && iterations < opts.max_iter && value > 0.0 {
        iterations += 1;
        let mut best: Option<(Vec<Complex64>, f64)> = None;
        for b in sphere_tangent_basis(&z) {
            for sign in [1.0, -1.0] {
                let trial: Vec<Complex64> = z.iter().zip(&b).map(|(zi, bi)| zi + bi * (sign * step)).collect();
                let trial = normalize(&trial);
                let v = h(&trial);
                if v < best.as_ref().map_or(value, |(_, bv)| *bv) {
                    best = Some((trial, v));
                }
            }
        }
        match best {
            Some((nz, nv)) => {
                z = nz;
                value = nv;
                step = (step * 2.0).min(opts.initial_step);
            }
            None => step *= 0.5,
        }
    }
    let converged = step < opts.step_tol || value <= 0.0;
    Ok(LocalMinimum { z, value, start_value, iterations, converged })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultistartOptions {
    pub local: MinimizeOptions,
    /// Size of the seeded sweep whose argmin joins the start set.
    pub sweep_samples: u64,
    pub tol: f64,
    pub workers: Option<usize>,
}

impl Default for MultistartOptions {
    fn default() -> Self {
        Self {
            local: MinimizeOptions::default(),
            sweep_samples: DEFAULT_SAMPLES,
            tol: DEFAULT_RANK_TOL,
            workers: None,
        }
    }
}

/// Local searches from the sweep argmin plus `restarts` seeded sphere points.
pub fn multistart_minimize(
    e: &GraphEmbedding,
    restarts: usize,
    seed: u64,
    opts: &MultistartOptions,
) -> Result<CertificateReport> {
    if restarts == 0 {
        return Err(CrError::InvalidArgument("restarts must be at least 1".into()));
    }
    let cfg = SweepConfig { samples: opts.sweep_samples, seed, tol: opts.tol, workers: opts.workers };
    let sweep_report = sweep(e, &cfg)?;
    let prepared = PreparedEmbedding::new(e);
    let restart_sampler = SphereSampler::new(e.m(), seed ^ RESTART_SEED_MIX);
    let mut starts = vec![sweep_report.argmin_z.clone()];
    starts.extend(restart_sampler.substream(0..restarts as u64));

    let minima: Vec<LocalMinimum> = run_with_workers(opts.workers, || {
        starts
            .par_iter()
            .map(|z0| local_minimize_prepared(&prepared, z0, &opts.local))
            .collect::<Result<Vec<_>>>()
    })??;

    let best = minima
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one start");
    let at_best = prepared.point_report(&minima[best].z, opts.tol)?;
    let mut failures = sweep_report.failures;
    let mut first_failure = sweep_report.first_failure.clone();
    if !at_best.cr_regular {
        failures += 1;
        first_failure.get_or_insert_with(|| Witness {
            index: best as u64,
            z: at_best.z.clone(),
            sigma_min: at_best.sigma_min,
            sigma_max: at_best.sigma_max,
        });
    }
    let marginal = sweep_report.marginal_points + u64::from(at_best.cr_regular && at_best.marginal);
    let records = minima
        .iter()
        .enumerate()
        .map(|(start, lm)| MinimumRecord {
            start,
            z: lm.z.clone(),
            value: lm.value,
            start_value: lm.start_value,
            iterations: lm.iterations,
            converged: lm.converged,
        })
        .collect();
    Ok(CertificateReport {
        restarts,
        min_sigma: at_best.sigma_min,
        sigma_max_at_argmin: at_best.sigma_max,
        argmin_z: at_best.z.clone(),
        failures,
        marginal_points: marginal,
        first_failure,
        objective: Some(opts.local.objective),
        best_value: Some(minima[best].value),
        converged_minima: records,
        verdict: verdict_for(failures, marginal),
        ..sweep_report
    })
}

/// `|g|²(t) = (1−t)²(1−3t)² + t²(3t−2)²`, the squared modulus of
/// `z₂ ∂P/∂z̄₁ − z₁ ∂P/∂z̄₂` on `S³` as a function of `t = |z₁|²`.
pub fn ar_profile_value(t: f64) -> f64 {
    let a = (1.0 - t) * (1.0 - 3.0 * t);
    let b = t * (3.0 * t - 2.0);
    a * a + b * b
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMinimum {
    pub t_star: f64,
    pub min_value: f64,
    pub resolution: usize,
}

/// Dense scan of [`ar_profile_value`] on `t = k / resolution`, `k = 0..=resolution`.
pub fn profile_ar(resolution: usize) -> Result<ProfileMinimum> {
    if resolution < 1000 {
        return Err(CrError::InvalidArgument(format!("resolution must be at least 1000, got {resolution}")));
    }
    let (k, v) = (0..=resolution)
        .map(|k| (k, ar_profile_value(k as f64 / resolution as f64)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(ProfileMinimum { t_star: k as f64 / resolution as f64, min_value: v, resolution })
}

/// Equal-width histogram of `σ_min` values on `[0, max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl SigmaHistogram {
    pub fn from_samples(values: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(CrError::InvalidArgument("histogram needs at least one bin".into()));
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        let hi = if max > 0.0 { max } else { 1.0 };
        let width = hi / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { k as f64 * width }).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let k = ((v / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[k], self.edges[k + 1], c));
        }
        out
    }
}
