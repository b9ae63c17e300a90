//! Experiment runners: pure kernels from the core crate fanned out over
//! sweeps, with deterministic aggregation and machine-readable outputs.
//!
//! Every experiment writes its result files even when individual cells
//! fail; failed cells are flagged in the rows (NaN fields) and listed in
//! the run manifest rather than aborting the sweep.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use nlqubit::discrimination::{
    run_trials, DiscriminationConfig, InputPair, OrthOutcome, ORTH_EPS_DEFAULT,
};
use nlqubit::fock::{self, Mode, Propagator, TwoModeParams};
use nlqubit::meanfield::{flow_field, EffectiveParams};
use nlqubit::qubit::{BlochVector, QubitAmplitudes};
use nlqubit::Complex64;

use crate::config::{
    CorrelatorsConfig, DiscriminateConfig, ExperimentConfig, ExperimentKind, FlowConfig,
    MeanfieldErrorConfig, OrthScalingConfig,
};
use crate::output::{fmt_f64, now_unix, write_csv, FitReport, RunManifest, Timestamp};

/// What a finished run reports back to the caller.
#[derive(Debug)]
pub struct RunOutcome {
    pub outputs: Vec<PathBuf>,
    pub numerical_failures: usize,
    pub inconclusive_dominated: bool,
}

struct KindOutput {
    files: Vec<PathBuf>,
    failed_cells: Vec<String>,
    fit: Option<FitReport>,
    inconclusive_dominated: bool,
}

impl KindOutput {
    fn new(files: Vec<PathBuf>) -> Self {
        Self {
            files,
            failed_cells: Vec::new(),
            fit: None,
            inconclusive_dominated: false,
        }
    }
}

fn effective_threads(config: &ExperimentConfig) -> usize {
    if let Ok(v) = std::env::var("NLQUBIT_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n;
        }
    }
    config.threads.unwrap_or(0)
}

/// Runs the experiment into `out_dir` with the effective `seed`, writing
/// result files plus `run_manifest.json`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    seed: u64,
) -> anyhow::Result<RunOutcome> {
    let started = Instant::now();
    let started_unix = now_unix();
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_threads(config))
        .build()
        .context("cannot build thread pool")?;
    let threads = pool.current_num_threads();

    let kind_out = pool.install(|| -> anyhow::Result<KindOutput> {
        match &config.kind {
            ExperimentKind::Flow(c) => run_flow(c, out_dir),
            ExperimentKind::Discriminate(c) => run_discriminate(c, out_dir, seed),
            ExperimentKind::MeanfieldError(c) => run_meanfield_error(c, out_dir),
            ExperimentKind::Correlators(c) => run_correlators(c, out_dir, seed),
            ExperimentKind::OrthScaling(c) => run_orth_scaling(c, out_dir),
        }
    })?;

    let manifest = RunManifest {
        tool: "nlqubit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: nlqubit::VERSION.into(),
        experiment: config.kind.name().into(),
        seed,
        threads,
        config: serde_json::to_value(config)?,
        outputs: kind_out
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
        failed_cells: kind_out.failed_cells.clone(),
        fit: kind_out.fit.clone(),
        timestamp: Timestamp {
            started_unix,
            wall_seconds: started.elapsed().as_secs_f64(),
        },
    };
    let mut outputs = kind_out.files;
    outputs.push(manifest.write(out_dir)?);

    Ok(RunOutcome {
        outputs,
        numerical_failures: kind_out.failed_cells.len(),
        inconclusive_dominated: kind_out.inconclusive_dominated,
    })
}

fn run_flow(c: &FlowConfig, dir: &Path) -> anyhow::Result<KindOutput> {
    let mut grid = Vec::with_capacity(c.n_polar * c.n_azimuth);
    for j in 0..c.n_polar {
        let theta = PI * (j as f64 + 0.5) / c.n_polar as f64;
        for i in 0..c.n_azimuth {
            let phi = TAU * i as f64 / c.n_azimuth as f64;
            grid.push(BlochVector::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            )?);
        }
    }
    let params = EffectiveParams::new(c.v01, c.bz, c.g)?;
    let samples = flow_field(&grid, &params, c.nonlinear)?;
    let rows: Vec<String> = samples
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{},{}",
                fmt_f64(s.point.x()),
                fmt_f64(s.point.y()),
                fmt_f64(s.point.z()),
                fmt_f64(s.velocity[0]),
                fmt_f64(s.velocity[1]),
                fmt_f64(s.velocity[2]),
            )
        })
        .collect();
    let path = dir.join("flow.csv");
    write_csv(&path, "x,y,z,vx,vy,vz", &rows)?;
    Ok(KindOutput::new(vec![path]))
}

#[derive(Serialize)]
struct ConfusionJson {
    #[serde(rename = "AA")]
    aa: u64,
    #[serde(rename = "AB")]
    ab: u64,
    #[serde(rename = "BA")]
    ba: u64,
    #[serde(rename = "BB")]
    bb: u64,
}

#[derive(Serialize)]
struct TrialsJson {
    scheme: String,
    theta_ab: f64,
    g: f64,
    shots: u64,
    t_orth_mean: Option<f64>,
    success_rate: f64,
    inconclusive_rate: f64,
    confusion: ConfusionJson,
}

fn run_discriminate(c: &DiscriminateConfig, dir: &Path, seed: u64) -> anyhow::Result<KindOutput> {
    let pair = InputPair::new(c.theta_ab, c.scheme.to_scheme())?;
    let cfg = DiscriminationConfig {
        orth_eps: c.orth_eps.unwrap_or(ORTH_EPS_DEFAULT),
        dt: c.dt,
        t_max: c.t_max,
        stride: None,
    };
    let trials = run_trials(&pair, c.g, c.shots, seed, &cfg)?;
    let stats = &trials.stats;
    let json = TrialsJson {
        scheme: c.scheme.label().into(),
        theta_ab: stats.theta_ab,
        g: stats.g,
        shots: stats.shots,
        t_orth_mean: stats.t_orth_mean,
        success_rate: stats.success_rate,
        inconclusive_rate: stats.inconclusive_rate,
        confusion: ConfusionJson {
            aa: stats.confusion.aa,
            ab: stats.confusion.ab,
            ba: stats.confusion.ba,
            bb: stats.confusion.bb,
        },
    };
    let path = dir.join("trials.json");
    let mut text = serde_json::to_string_pretty(&json)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    let mut out = KindOutput::new(vec![path]);
    out.inconclusive_dominated = stats.inconclusive_rate > 0.5;
    Ok(out)
}

fn initial_state(bloch: Option<[f64; 3]>) -> anyhow::Result<QubitAmplitudes> {
    match bloch {
        None => Ok(QubitAmplitudes::new(
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        )?),
        Some([x, y, z]) => {
            let norm = (x * x + y * y + z * z).sqrt();
            let r = BlochVector::new(x / norm, y / norm, z / norm)?;
            Ok(QubitAmplitudes::from_bloch(&r)?)
        }
    }
}

/// Least-squares fit of y = c (e^{t/tau} - 1) over (t, y) points: for each
/// candidate tau the optimal c is linear, so a log-spaced scan over tau
/// with local refinement suffices.
pub fn fit_exponential(points: &[(f64, f64)]) -> Option<FitReport> {
    let t_max = points.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let distinct_t = {
        let mut ts: Vec<f64> = points.iter().map(|p| p.0).filter(|t| *t > 0.0).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts.len()
    };
    if t_max <= 0.0 || distinct_t < 2 {
        return None;
    }
    let eval = |tau: f64| -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for &(t, y) in points {
            let u = (t / tau).exp() - 1.0;
            num += y * u;
            den += u * u;
        }
        if den <= 0.0 || !den.is_finite() {
            return (f64::INFINITY, 0.0);
        }
        let c = num / den;
        let rss: f64 = points
            .iter()
            .map(|&(t, y)| {
                let r = y - c * ((t / tau).exp() - 1.0);
                r * r
            })
            .sum();
        (rss, c)
    };
    let lo = (t_max / 100.0).ln();
    let hi = (t_max * 100.0).ln();
    let coarse = 400usize;
    let mut best = (f64::INFINITY, 0.0, t_max);
    for i in 0..=coarse {
        let tau = (lo + (hi - lo) * i as f64 / coarse as f64).exp();
        let (rss, c) = eval(tau);
        if rss < best.0 {
            best = (rss, c, tau);
        }
    }
    // Golden-section refinement around the best grid point.
    let step = (hi - lo) / coarse as f64;
    let (mut a, mut b) = (best.2.ln() - step, best.2.ln() + step);
    for _ in 0..60 {
        let m1 = a + (b - a) * 0.382;
        let m2 = a + (b - a) * 0.618;
        if eval(m1.exp()).0 < eval(m2.exp()).0 {
            b = m2;
        } else {
            a = m1;
        }
    }
    let tau = (0.5 * (a + b)).exp();
    let (rss, c) = eval(tau);
    let (rss, c, tau) = if rss < best.0 {
        (rss, c, tau)
    } else {
        best
    };
    Some(FitReport {
        c,
        t_ent: tau,
        rss,
        n_points: points.len(),
    })
}

fn run_meanfield_error(c: &MeanfieldErrorConfig, dir: &Path) -> anyhow::Result<KindOutput> {
    let q0 = initial_state(c.q0_bloch)?;
    type CellRow = (usize, f64, Result<f64, String>);
    let cells: Vec<Vec<CellRow>> = c
        .n_list
        .par_iter()
        .map(|&n| {
            let params = TwoModeParams {
                n,
                omega0: c.omega0,
                omega: c.omega,
                k: c.k,
                k_prime: c.k_prime,
                v00: c.v00,
                v11: c.v11,
                v01: c.v01,
            };
            match Propagator::new(&params) {
                Err(e) => c
                    .t_list
                    .iter()
                    .map(|&t| (n, t, Err(e.to_string())))
                    .collect(),
                Ok(prop) => c
                    .t_list
                    .iter()
                    .map(|&t| {
                        let eps = fock::model_error_with(&params, &prop, &q0, t, c.dt)
                            .map(|m| m.epsilon)
                            .map_err(|e| e.to_string());
                        (n, t, eps)
                    })
                    .collect(),
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    let mut fit_points = Vec::new();
    for (n, t, eps) in cells.into_iter().flatten() {
        match eps {
            Ok(eps) => {
                let n_eps = n as f64 * eps;
                rows.push(format!("{n},{},{},{}", fmt_f64(t), fmt_f64(eps), fmt_f64(n_eps)));
                fit_points.push((t, n_eps));
            }
            Err(why) => {
                rows.push(format!(
                    "{n},{},{},{}",
                    fmt_f64(t),
                    fmt_f64(f64::NAN),
                    fmt_f64(f64::NAN)
                ));
                failed.push(format!("n={n}, t={t}: {why}"));
            }
        }
    }
    let path = dir.join("meanfield_error.csv");
    write_csv(&path, "n,t,epsilon,n_times_epsilon", &rows)?;
    let mut out = KindOutput::new(vec![path]);
    out.failed_cells = failed;
    out.fit = fit_exponential(&fit_points);
    Ok(out)
}

fn random_qubit(rng: &mut impl rand::Rng) -> QubitAmplitudes {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let chi: f64 = rng.gen_range(0.0..TAU);
    let half = z.acos() * 0.5;
    let global = Complex64::from_polar(1.0, chi);
    QubitAmplitudes::normalized(
        global * Complex64::new(half.cos(), 0.0),
        global * Complex64::from_polar(half.sin(), phi),
    )
    .expect("sampled state is normalizable")
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}

fn run_correlators(c: &CorrelatorsConfig, dir: &Path, seed: u64) -> anyhow::Result<KindOutput> {
    use rand::SeedableRng;
    let modes = [(Mode::Zero, "0"), (Mode::One, "1")];
    type Row = (String, usize, &'static str, &'static str, &'static str, f64);

    let per_n: Vec<anyhow::Result<Vec<Row>>> = c
        .n_list
        .par_iter()
        .enumerate()
        .map(|(n_idx, &n)| {
            let mut rows: Vec<Row> = Vec::new();
            // max error per (encoding, kind, l, lp) over all samples
            let mut acc = std::collections::BTreeMap::<(usize, usize, usize, usize), f64>::new();
            for s in 0..c.samples {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((n_idx * c.samples + s) as u64);
                let q = random_qubit(&mut rng);
                let psi = [q.psi0(), q.psi1()];
                let nf = n as f64;
                for (enc_idx, vec) in [
                    Some(fock::encode_fn(n, &q)?),
                    (n >= 2).then(|| fock::encode_cat(n, &q)).transpose()?,
                ]
                .into_iter()
                .enumerate()
                {
                    let Some(v) = vec else { continue };
                    for (li, (l, _)) in modes.iter().enumerate() {
                        for (pi, (lp, _)) in modes.iter().enumerate() {
                            let one = fock::correlator_one(&v, *l, *lp);
                            let two = fock::correlator_two(&v, *l, *lp);
                            let (one_want, two_want) = if enc_idx == 0 {
                                (
                                    nf * psi[li].conj() * psi[pi],
                                    Complex64::new(
                                        nf * (nf - 1.0)
                                            * psi[li].norm_sqr()
                                            * psi[pi].norm_sqr(),
                                        0.0,
                                    ),
                                )
                            } else {
                                let delta = if li == pi { 1.0 } else { 0.0 };
                                (
                                    Complex64::new(nf * psi[li].norm_sqr() * delta, 0.0),
                                    Complex64::new(
                                        nf * (nf - 1.0) * psi[li].norm_sqr() * delta,
                                        0.0,
                                    ),
                                )
                            };
                            for (kind_idx, err) in
                                [rel_err(one, one_want), rel_err(two, two_want)]
                                    .into_iter()
                                    .enumerate()
                            {
                                let key = (enc_idx, kind_idx, li, pi);
                                let slot = acc.entry(key).or_insert(0.0);
                                if err > *slot {
                                    *slot = err;
                                }
                            }
                        }
                    }
                }
            }
            for ((enc_idx, kind_idx, li, pi), err) in acc {
                rows.push((
                    if enc_idx == 0 { "fn" } else { "cat" }.to_string(),
                    n,
                    if kind_idx == 0 { "one" } else { "two" },
                    modes[li].1,
                    modes[pi].1,
                    err,
                ));
            }
            Ok(rows)
        })
        .collect();

    let mut rows = Vec::new();
    for r in per_n {
        for (enc, n, kind, l, lp, err) in r? {
            rows.push(format!("{enc},{n},{kind},{l},{lp},{}", fmt_f64(err)));
        }
    }
    let path = dir.join("correlators.csv");
    write_csv(&path, "encoding,n,kind,l,lp,max_rel_err", &rows)?;
    Ok(KindOutput::new(vec![path]))
}

fn run_orth_scaling(c: &OrthScalingConfig, dir: &Path) -> anyhow::Result<KindOutput> {
    struct Row {
        scheme: &'static str,
        theta: f64,
        t_orth: f64,
        residual: f64,
        status: &'static str,
        error: Option<String>,
    }
    let mut specs = Vec::new();
    for scheme in &c.schemes {
        for &theta in &c.theta_list {
            specs.push((*scheme, theta));
        }
    }
    let results: Vec<Row> = specs
        .par_iter()
        .map(|&(scheme, theta)| {
            let cfg = DiscriminationConfig {
                orth_eps: c.orth_eps.unwrap_or(ORTH_EPS_DEFAULT),
                dt: c.dt,
                t_max: c.t_max,
                stride: None,
            };
            let attempt = InputPair::new(theta, scheme.to_scheme())
                .and_then(|pair| nlqubit::discrimination::run_discrimination(&pair, c.g, &cfg));
            match attempt {
                Ok(run) => {
                    let residual = run.outcome.residual_sqr();
                    match run.outcome {
                        OrthOutcome::Reached { t_orth, .. } => Row {
                            scheme: scheme.label(),
                            theta,
                            t_orth,
                            residual,
                            status: "ok",
                            error: None,
                        },
                        OrthOutcome::Saturated { t_best, .. } => Row {
                            scheme: scheme.label(),
                            theta,
                            t_orth: t_best,
                            residual,
                            status: "saturated",
                            error: None,
                        },
                        OrthOutcome::NotReached { .. } => Row {
                            scheme: scheme.label(),
                            theta,
                            t_orth: f64::NAN,
                            residual,
                            status: "timeout",
                            error: None,
                        },
                    }
                }
                Err(e) => Row {
                    scheme: scheme.label(),
                    theta,
                    t_orth: f64::NAN,
                    residual: f64::NAN,
                    status: "error",
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for r in &results {
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            r.scheme,
            fmt_f64(r.theta),
            fmt_f64(c.g),
            fmt_f64(r.t_orth),
            fmt_f64(r.residual),
            r.status,
            fmt_f64(r.t_orth * r.theta),
        ));
        if let Some(e) = &r.error {
            failed.push(format!("scheme={}, theta={}: {e}", r.scheme, r.theta));
        }
    }
    let path = dir.join("orth_scaling.csv");
    write_csv(
        &path,
        "scheme,theta_ab,g,t_orth,residual_overlap_sq,status,t_times_theta",
        &rows,
    )?;
    let mut out = KindOutput::new(vec![path]);
    out.failed_cells = failed;
    Ok(out)
}
