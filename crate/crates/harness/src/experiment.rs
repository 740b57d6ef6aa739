//! Seeded Monte Carlo runs over the recovery pipelines.
//!
//! Trial `i` draws everything from `ChaCha8Rng` seeded with
//! `split_seed(seed, i)`, so trials are independent of each other and of the
//! order in which rayon schedules them.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use subnyq::fri::{fri_recover, fri_sample_grid, IndexRange, SamplingKernel, SosKernel};
use subnyq::sampling::{
    mwc_matrix, mwc_sample, pns_sample, rd_matrix, rd_measure_tones, slice_index, MwcConfig, PnsConfig, RdConfig,
};
use subnyq::scalar::cis;
use subnyq::signal::{gen_fri_periodic, gen_multiband, nmse, nmse_vec, random_fri, random_harmonic, random_multiband};
use subnyq::sparse::omp;
use subnyq::spectral::{ctf, mwc_resynthesize, pns_reconstruct, recover_slices, select_pns_phase, CtfOptions};
use subnyq::{seed, BandContent, CMatrix64, FriSpec64, MultibandSpec, PulseShape, SupportSet, C64};

use crate::config::{
    ExperimentConfig, FriModel, FriRecovery, FriSampler, HarmonicModel, KernelKind, MultibandModel, MwcRecovery,
    MwcSampler, PnsModel, PnsRecovery, PnsSampler, RdRecovery, RdSampler, Scenario,
};
use crate::error::HarnessError;

/// Stage tag and message of a failed trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub support_exact: bool,
    pub support_jaccard: f64,
    pub nmse: f64,
    /// Scenario-specific columns, in a fixed order per scenario.
    pub metrics: Vec<(&'static str, f64)>,
    /// Wall time per stage in seconds; informational only.
    pub timings: Vec<(&'static str, f64)>,
    pub failure: Option<Failure>,
}

impl TrialResult {
    fn new(trial: usize, seed: u64) -> Self {
        Self {
            trial,
            seed,
            success: false,
            support_exact: false,
            support_jaccard: 0.0,
            nmse: f64::NAN,
            metrics: Vec::new(),
            timings: Vec::new(),
            failure: None,
        }
    }

    fn fail(&mut self, stage: &str, message: impl Into<String>) {
        self.success = false;
        if self.failure.is_none() {
            self.failure = Some(Failure {
                stage: stage.to_string(),
                message: message.into(),
            });
        }
    }

    fn set_support(&mut self, truth: &SupportSet, found: &SupportSet) {
        self.support_exact = truth == found;
        self.support_jaccard = truth.jaccard(found);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub seed: u64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_nmse: f64,
    pub max_nmse: f64,
    pub mean_jaccard: f64,
    pub wall_time_s: f64,
    /// Failed trials keyed by stage tag; sums to `trials − successes`.
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Summary,
    pub trials: Vec<TrialResult>,
}

/// Stopwatch collecting per-stage timings.
struct Clock {
    last: Instant,
    laps: Vec<(&'static str, f64)>,
}

impl Clock {
    fn start() -> Self {
        Self {
            last: Instant::now(),
            laps: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.laps.push((stage, (now - self.last).as_secs_f64()));
        self.last = now;
    }
}

/// Per-run state shared by all trials of a scenario.
enum Plan {
    Mwc(MwcPlan),
    Pns(PnsPlan),
    Rd(RdPlan),
    Fri(FriPlan),
}

struct MwcPlan {
    model: MultibandModel,
    cfg: MwcConfig<f64>,
    c: CMatrix64,
    opts: CtfOptions<f64>,
    grid_rate: f64,
    duration: f64,
    samples: usize,
    nmse_tol: f64,
}

struct PnsPlan {
    band: (f64, f64),
    fill: f64,
    phase: f64,
    grid_rate: f64,
    duration: f64,
    nmse_tol: f64,
}

struct RdPlan {
    model: HarmonicModel,
    rate: usize,
    fixed: Option<(RdConfig, CMatrix64)>,
    recovery: RdRecovery,
}

struct FriPlan {
    model: FriModel,
    kernel: SamplingKernel<f64>,
    grid_rate: f64,
    recovery: FriRecovery,
}

fn plan_mwc(
    model: &MultibandModel,
    sampler: &MwcSampler,
    recovery: &MwcRecovery,
    density: usize,
) -> Result<MwcPlan, HarnessError> {
    let f_p = model.f_nyq / sampler.chips as f64;
    let cfg = MwcConfig::random(sampler.channels, sampler.chips, f_p, sampler.pattern_seed)?
        .with_rendering(sampler.rendering);
    let c = mwc_matrix(&cfg)?;
    let opts = CtfOptions {
        sparsity_bound: recovery.sparsity_bound.unwrap_or(2 * model.bands),
        eig_tol: recovery.eig_tol,
        residual_tol: recovery.residual_tol,
        symmetrize: recovery.symmetrize,
        frame: recovery.frame,
    };
    if opts.sparsity_bound > sampler.channels {
        return Err(HarnessError::Config {
            path: "recovery.sparsity_bound".into(),
            message: format!("default 2N = {} exceeds the channel count", opts.sparsity_bound),
        });
    }
    Ok(MwcPlan {
        model: model.clone(),
        cfg,
        c,
        opts,
        grid_rate: density as f64 * model.f_nyq,
        duration: sampler.samples_per_channel as f64 / f_p,
        samples: sampler.samples_per_channel,
        nmse_tol: recovery.nmse_tol,
    })
}

/// Grid holding `density · ceil(2 f_u / B)` points per `T_s = 1/B`, so every
/// candidate phase `j T_s / points` falls on a grid instant.
fn plan_pns(model: &PnsModel, sampler: &PnsSampler, recovery: &PnsRecovery, density: usize) -> Result<PnsPlan, HarnessError> {
    let band = (model.f_lower, model.f_upper);
    let b = model.f_upper - model.f_lower;
    let points = density * (2.0 * model.f_upper / b).ceil() as usize;
    let phase = match sampler.phase {
        Some(p) => p,
        None => select_pns_phase(band, points - 1)?,
    };
    Ok(PnsPlan {
        band,
        fill: model.fill,
        phase,
        grid_rate: points as f64 * b,
        duration: sampler.samples_per_channel as f64 / b,
        nmse_tol: recovery.nmse_tol,
    })
}

fn plan_rd(model: &HarmonicModel, sampler: &RdSampler, recovery: &RdRecovery) -> Result<RdPlan, HarnessError> {
    let fixed = match sampler.chip_seed {
        Some(s) => {
            let cfg = RdConfig::random(model.tone_grid_size, sampler.rate, s)?;
            let a = rd_matrix(&cfg)?;
            Some((cfg, a))
        }
        None => None,
    };
    Ok(RdPlan {
        model: model.clone(),
        rate: sampler.rate,
        fixed,
        recovery: recovery.clone(),
    })
}

fn plan_fri(model: &FriModel, sampler: &FriSampler, recovery: &FriRecovery, density: usize) -> FriPlan {
    let p = model.pulses + sampler.extra_pairs;
    let kernel = match sampler.kernel {
        KernelKind::Lowpass => SamplingKernel::lowpass(IndexRange::symmetric(p)),
        KernelKind::Dirichlet => SamplingKernel::Sos(SosKernel::dirichlet(p, model.period)),
    };
    let count = 2 * p + 1;
    FriPlan {
        model: model.clone(),
        kernel,
        grid_rate: (density * count) as f64 / model.period,
        recovery: recovery.clone(),
    }
}

fn make_plan(cfg: &ExperimentConfig) -> Result<Plan, HarnessError> {
    let density = cfg.grid_density_factor;
    match &cfg.scenario {
        Scenario::Mwc { model, sampler, recovery } => Ok(Plan::Mwc(plan_mwc(model, sampler, recovery, density)?)),
        Scenario::Pns { model, sampler, recovery } => Ok(Plan::Pns(plan_pns(model, sampler, recovery, density)?)),
        Scenario::Rd { model, sampler, recovery } => Ok(Plan::Rd(plan_rd(model, sampler, recovery)?)),
        Scenario::Fri { model, sampler, recovery } => Ok(Plan::Fri(plan_fri(model, sampler, recovery, density))),
        other => Err(HarnessError::Config {
            path: "scenario".into(),
            message: format!("`{}` has no Monte Carlo trials", other.name()),
        }),
    }
}

/// Seed of trial `i`: `split_seed(seed, i)`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed::split_seed(seed, trial as u64)
}

/// Runs every trial (in parallel) and aggregates the summary.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let plan = make_plan(cfg)?;
    let trials: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(&plan, i, trial_seed(cfg.seed, i)))
        .collect();
    let summary = summarize(cfg.scenario.name(), cfg.seed, &trials, start.elapsed().as_secs_f64());
    Ok(Report { summary, trials })
}

fn run_trial(plan: &Plan, trial: usize, s: u64) -> TrialResult {
    let mut out = TrialResult::new(trial, s);
    let mut rng = seed::rng(s);
    let mut clock = Clock::start();
    match plan {
        Plan::Mwc(p) => mwc_trial(p, &mut rng, &mut out, &mut clock),
        Plan::Pns(p) => pns_trial(p, &mut rng, &mut out, &mut clock),
        Plan::Rd(p) => rd_trial(p, &mut rng, &mut out, &mut clock),
        Plan::Fri(p) => fri_trial(p, &mut rng, &mut out, &mut clock),
    }
    out.timings = clock.laps;
    out
}

macro_rules! stage {
    ($out:expr, $tag:literal, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                $out.fail($tag, err.to_string());
                return;
            }
        }
    };
}

/// Column indices (`l + L`) of the slices holding in-band bins.
fn true_slices(spec: &MultibandSpec<f64>, duration: f64, samples: usize, half: usize) -> SupportSet {
    if matches!(spec.content, BandContent::Zero) {
        return SupportSet::empty();
    }
    spec.occupied_bins(duration)
        .into_iter()
        .map(|p| (slice_index(p, samples) + half as i64) as usize)
        .collect()
}

fn mwc_trial(p: &MwcPlan, rng: &mut ChaCha8Rng, out: &mut TrialResult, clock: &mut Clock) {
    let m = &p.model;
    let spec = stage!(
        out,
        "generate",
        random_multiband(m.bands, m.band_width, m.f_nyq / 2.0, p.cfg.covered_band(), m.content, rng)
    );
    let content_seed: u64 = rng.random();
    let x = stage!(out, "generate", gen_multiband(&spec, p.grid_rate, p.duration, content_seed));
    clock.lap("generate");
    let y = stage!(out, "sample", mwc_sample(&x, &p.cfg));
    clock.lap("sample");
    let support = stage!(out, "ctf", ctf(&y, &p.c, &p.opts));
    clock.lap("ctf");
    let truth = true_slices(&spec, p.duration, p.samples, p.cfg.half_width());
    out.set_support(&truth, &support);
    out.metrics = vec![("true_slices", truth.len() as f64), ("detected_slices", support.len() as f64)];
    let rec = stage!(out, "recover_slices", recover_slices(&y, &p.c, &support));
    clock.lap("recover_slices");
    let back = stage!(out, "resynthesize", mwc_resynthesize(&rec, p.cfg.f_p, p.grid_rate, p.duration));
    out.nmse = stage!(out, "resynthesize", nmse(&x, &back));
    clock.lap("resynthesize");
    judge(out, p.nmse_tol);
}

fn pns_trial(p: &PnsPlan, rng: &mut ChaCha8Rng, out: &mut TrialResult, clock: &mut Clock) {
    let (f_l, f_u) = p.band;
    let b = f_u - f_l;
    let width = p.fill * b;
    let carrier = f_l + width / 2.0 + rng.random::<f64>() * (b - width);
    let spec = MultibandSpec {
        band_count: 2,
        band_width: width,
        carriers: vec![carrier],
        f_max: f_u,
        content: BandContent::Gaussian { amplitude: 1.0 },
    };
    let content_seed: u64 = rng.random();
    let x = stage!(out, "generate", gen_multiband(&spec, p.grid_rate, p.duration, content_seed));
    clock.lap("generate");
    let y = stage!(out, "sample", pns_sample(&x, &PnsConfig::second_order(b, p.phase)));
    clock.lap("sample");
    let back = stage!(out, "pns_reconstruct", pns_reconstruct(&y[0], &y[1], p.band, p.phase, p.grid_rate));
    out.nmse = stage!(out, "pns_reconstruct", nmse(&x, &back));
    clock.lap("pns_reconstruct");
    // the spectral support is known to the PNS decoder
    out.support_exact = true;
    out.support_jaccard = 1.0;
    out.metrics = vec![("phase", p.phase)];
    judge(out, p.nmse_tol);
}

fn rd_trial(p: &RdPlan, rng: &mut ChaCha8Rng, out: &mut TrialResult, clock: &mut Clock) {
    let w = p.model.tone_grid_size;
    let drawn;
    let (cfg, a) = match &p.fixed {
        Some((c, a)) => (c, a),
        None => {
            let chip_seed: u64 = rng.random();
            let cfg = stage!(out, "sample", RdConfig::random(w, p.rate, chip_seed));
            let a = stage!(out, "sample", rd_matrix(&cfg));
            drawn = (cfg, a);
            (&drawn.0, &drawn.1)
        }
    };
    let spec = stage!(out, "generate", random_harmonic::<f64, _>(w, p.model.tones, rng));
    clock.lap("generate");
    let freqs: Vec<f64> = spec.indices.iter().map(|&k| k as f64 + p.model.mismatch).collect();
    let y = stage!(out, "sample", rd_measure_tones(&freqs, &spec.coefficients, cfg));
    clock.lap("sample");
    let sol = stage!(out, "omp", omp(&y, a, p.model.tones, p.recovery.residual_tol));
    clock.lap("omp");
    let truth: SupportSet = spec.indices.iter().map(|&k| k.rem_euclid(w as i64) as usize).collect();
    out.set_support(&truth, &sol.support);
    // compare the signals at the W Nyquist instants; equals coefficient NMSE on the grid
    let two_pi = 2.0 * std::f64::consts::PI;
    let eval = |t: f64, nus: &mut dyn Iterator<Item = (f64, C64)>| nus.fold(C64::new(0.0, 0.0), |acc, (nu, a)| acc + a * cis(two_pi * nu * t));
    let est_tones: Vec<(f64, C64)> = sol
        .support
        .indices()
        .iter()
        .zip(&sol.values)
        .map(|(&q, &v)| (subnyq::signal::tone_index(q, w) as f64, v))
        .collect();
    let truth_signal: Vec<C64> = (0..w)
        .map(|n| eval(n as f64 / w as f64, &mut freqs.iter().copied().zip(spec.coefficients.iter().copied())))
        .collect();
    let est_signal: Vec<C64> = (0..w).map(|n| eval(n as f64 / w as f64, &mut est_tones.iter().copied())).collect();
    out.nmse = nmse_vec(&truth_signal, &est_signal);
    out.metrics = vec![("residual_norm", sol.residual_norm)];
    judge(out, p.recovery.nmse_tol);
}

/// Best cyclic alignment of two ascending delay lists on the circle of
/// length `period`: returns (max delay error / τ, max relative amplitude
/// error, pairs within `delay_tol`, amplitude NMSE).
pub fn match_pulses(est: &FriSpec64, truth: &FriSpec64, delay_tol: f64) -> (f64, f64, usize, f64) {
    let tau = truth.period;
    let sorted = |s: &FriSpec64| {
        let mut v: Vec<(f64, C64)> = s.delays.iter().copied().zip(s.amplitudes.iter().copied()).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v
    };
    let (e, t) = (sorted(est), sorted(truth));
    let l = t.len();
    if e.len() != l || l == 0 {
        return (f64::INFINITY, f64::INFINITY, 0, f64::INFINITY);
    }
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(tau);
        d.min(tau - d)
    };
    let best = (0..l)
        .map(|shift| {
            let worst = (0..l).map(|i| circ(e[(i + shift) % l].0, t[i].0)).fold(0.0, f64::max);
            (shift, worst)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |b| b.0);
    let mut delay = 0.0f64;
    let mut amp = 0.0f64;
    let mut matched = 0;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..l {
        let (te, ae) = e[(i + best) % l];
        let (tt, at) = t[i];
        let d = circ(te, tt) / tau;
        delay = delay.max(d);
        amp = amp.max((ae - at).norm() / at.norm());
        if d <= delay_tol {
            matched += 1;
        }
        num += (ae - at).norm_sqr();
        den += at.norm_sqr();
    }
    (delay, amp, matched, num / den)
}

fn fri_trial(p: &FriPlan, rng: &mut ChaCha8Rng, out: &mut TrialResult, clock: &mut Clock) {
    let m = &p.model;
    let gap = m.period * m.min_separation / m.pulses as f64;
    let spec = stage!(out, "generate", random_fri(m.pulses, m.period, gap, m.real, PulseShape::Dirac, rng));
    let x = stage!(out, "generate", gen_fri_periodic(&spec, p.grid_rate, 1));
    clock.lap("generate");
    let c = stage!(out, "sample", fri_sample_grid(&x, &p.kernel, m.period));
    clock.lap("sample");
    let est = match fri_recover(&c, &p.kernel, m.pulses, m.period, &PulseShape::Dirac) {
        Ok(v) => v,
        Err(e) => {
            let tag = e.stage().map_or("fri_recover".to_string(), |s| s.to_string());
            out.fail(&tag, e.to_string());
            return;
        }
    };
    clock.lap("fri_recover");
    let (delay, amp, matched, nmse) = match_pulses(&est, &spec, p.recovery.delay_tol);
    let l = m.pulses;
    out.support_exact = matched == l;
    out.support_jaccard = matched as f64 / (2 * l - matched) as f64;
    out.nmse = nmse;
    out.metrics = vec![("delay_error", delay), ("amplitude_error", amp)];
    out.success = true;
    if delay > p.recovery.delay_tol {
        out.fail("delay_error", format!("max delay error {delay:e} τ"));
    } else if amp > p.recovery.amplitude_tol {
        out.fail("amplitude_error", format!("max amplitude error {amp:e}"));
    }
}

/// Marks the trial successful when the support is exact and the NMSE is
/// within `tol`, tagging the first failed check otherwise.
fn judge(out: &mut TrialResult, tol: f64) {
    out.success = true;
    if !out.support_exact {
        out.fail("support_mismatch", format!("jaccard {}", out.support_jaccard));
    } else if !(out.nmse <= tol) {
        out.fail("nmse_above_tol", format!("nmse {:e} > {tol:e}", out.nmse));
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn summarize(scenario: &str, seed: u64, trials: &[TrialResult], wall_time_s: f64) -> Summary {
    let n = trials.len();
    let successes = trials.iter().filter(|t| t.success).count();
    let finite: Vec<f64> = trials.iter().map(|t| t.nmse).filter(|v| v.is_finite()).collect();
    let mut failures = BTreeMap::new();
    for t in trials.iter().filter(|t| !t.success) {
        let tag = t.failure.as_ref().map_or("unknown", |f| f.stage.as_str());
        *failures.entry(tag.to_string()).or_insert(0) += 1;
    }
    Summary {
        scenario: scenario.to_string(),
        seed,
        trials: n,
        successes,
        success_rate: if n == 0 { 0.0 } else { successes as f64 / n as f64 },
        median_nmse: median(finite.clone()),
        max_nmse: finite.iter().copied().fold(f64::NAN, f64::max),
        mean_jaccard: if n == 0 {
            f64::NAN
        } else {
            trials.iter().map(|t| t.support_jaccard).sum::<f64>() / n as f64
        },
        wall_time_s,
        failures,
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn clean(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// Per-trial CSV. Columns: `trial,seed,success,support_exact,support_jaccard,
/// nmse`, the scenario metrics, then `failure_stage,failure_message`.
/// Reals use 17 significant digits.
pub fn write_trials_csv<W: Write>(trials: &[TrialResult], mut w: W) -> std::io::Result<()> {
    let extra: Vec<&str> = trials
        .iter()
        .find(|t| !t.metrics.is_empty())
        .map(|t| t.metrics.iter().map(|m| m.0).collect())
        .unwrap_or_default();
    write!(w, "trial,seed,success,support_exact,support_jaccard,nmse")?;
    for name in &extra {
        write!(w, ",{name}")?;
    }
    writeln!(w, ",failure_stage,failure_message")?;
    for t in trials {
        write!(
            w,
            "{},{},{},{},{},{}",
            t.trial,
            t.seed,
            t.success,
            t.support_exact,
            num(t.support_jaccard),
            num(t.nmse)
        )?;
        for name in &extra {
            let v = t.metrics.iter().find(|m| m.0 == *name).map_or(f64::NAN, |m| m.1);
            write!(w, ",{}", num(v))?;
        }
        match &t.failure {
            Some(f) => writeln!(w, ",{},{}", clean(&f.stage), clean(&f.message))?,
            None => writeln!(w, ",,")?,
        }
    }
    Ok(())
}

/// Long-format timings: `trial,stage,seconds`.
pub fn write_timings_csv<W: Write>(trials: &[TrialResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "trial,stage,seconds")?;
    for t in trials {
        for (stage, secs) in &t.timings {
            writeln!(w, "{},{},{}", t.trial, stage, num(*secs))?;
        }
    }
    Ok(())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `trials.csv`, `timings.csv` and `summary.json` into `dir`.
pub fn write_report(report: &Report, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let write = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| {
        let path = dir.join(name);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut buf = BufWriter::new(file);
        f(&mut buf).and_then(|_| buf.flush()).map_err(io_err(&path))
    };
    write("trials.csv", &|w| write_trials_csv(&report.trials, w))?;
    write("timings.csv", &|w| write_timings_csv(&report.trials, w))?;
    write("summary.json", &|w| {
        serde_json::to_writer_pretty(&mut *w, &report.summary).map_err(std::io::Error::other)?;
        writeln!(w)
    })?;
    Ok(())
}
