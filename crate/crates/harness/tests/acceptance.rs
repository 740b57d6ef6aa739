//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one `PASS`/`FAIL` line; the process fails if any criterion
//! fails.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use num_rational::Ratio;
use rand::Rng;
use rand_distr::StandardNormal;
use subnyq::bounds::{blind_min_rate, mwc_compute_load, undersample_valid_rates};
use subnyq::fri::{annihilating_filter, fri_recover, fri_sample, fri_sample_grid, FourierCoeffs, IndexRange, SamplingKernel, SosKernel};
use subnyq::sampling::{mwc_matrix, mwc_sample, MwcConfig};
use subnyq::scalar::{cis, Real};
use subnyq::signal::{gen_fri_periodic, gen_multiband, random_fri, random_multiband};
use subnyq::spectral::{ctf, CtfOptions, FrameRoot};
use subnyq::sparse::{mutual_coherence, omp, unique_if};
use subnyq::{seed, BandContent, CMatrix, FriSpec64, PulseShape, SupportSet, C64};
use subnyq_harness::config::{HarmonicModel, QuadratureRule, RdSampler};
use subnyq_harness::experiment::match_pulses;
use subnyq_harness::{bounds_report, density_convergence, mismatch_sweep, run_experiment, ExperimentConfig, Scenario};
use subnyq_oracle as oracle;

type Q = Ratio<i64>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> ExperimentConfig {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", &format!("{name}.json")].iter().collect();
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel_err(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

// 1. Undersampling validity regions.
fn undersampling() -> Outcome {
    let rates = undersample_valid_rates(Q::from_integer(600), Q::from_integer(625)).map_err(|e| e.to_string())?;
    let fifty = Q::from_integer(50);
    let hit = rates.iter().any(|r| r.contains(&fifty));
    let mut probes = 0;
    let mut bad = Vec::new();
    for r in &rates {
        // the unbounded k = 1 range is probed over [lo, 2 lo]
        let hi = r.hi.unwrap_or(r.lo * 2);
        for i in 0..100 {
            let fs = r.lo + (hi - r.lo) * Q::new(i, 99);
            probes += 1;
            if !oracle::alias_free(Q::from_integer(600), Q::from_integer(625), fs) {
                bad.push(fs);
            }
        }
    }
    check(
        hit && bad.is_empty(),
        format!("{} intervals, 50 MHz inside: {hit}; {probes} exact-rational probes, {} aliased", rates.len(), bad.len()),
    )
}

// 2. PNS round trip.
fn pns_round_trip() -> Outcome {
    let report = run_experiment(&config("pns")).map_err(|e| e.to_string())?;
    let s = &report.summary;
    check(
        s.trials == 100 && s.successes == 100 && s.max_nmse <= 1e-6,
        format!("{}/{} trials, max NMSE {:.2e} (tol 1e-6)", s.successes, s.trials, s.max_nmse),
    )
}

// 3. y[n] = C z[n] with brute-force slices at 10x Nyquist.
fn mwc_master_property() -> Outcome {
    let cfg = config("mwc_desk");
    let Scenario::Mwc { model, sampler, .. } = &cfg.scenario else { unreachable!() };
    let f_p = model.f_nyq / sampler.chips as f64;
    let mwc = MwcConfig::random(sampler.channels, sampler.chips, f_p, sampler.pattern_seed).map_err(|e| e.to_string())?;
    let c = mwc_matrix(&mwc).map_err(|e| e.to_string())?;
    let t = sampler.samples_per_channel;
    let grid_rate = 10.0 * model.f_nyq;
    let duration = t as f64 / f_p;
    let half = mwc.half_width() as i64;
    let mut worst = 0.0f64;
    for inst in 0..20u64 {
        let mut rng = seed::rng(0xacce_0003 + inst);
        let spec = random_multiband(
            model.bands,
            model.band_width,
            model.f_nyq / 2.0,
            mwc.covered_band(),
            BandContent::Gaussian { amplitude: 1.0 },
            &mut rng,
        )
        .map_err(|e| e.to_string())?;
        let x = gen_multiband(&spec, grid_rate, duration, inst).map_err(|e| e.to_string())?;
        let y = mwc_sample(&x, &mwc).map_err(|e| e.to_string())?;
        let mut z = CMatrix::zeros(c.ncols(), t);
        for (j, l) in (-half..=half).enumerate() {
            for (n, v) in oracle::mwc_slice(x.samples(), grid_rate, f_p, l, t).into_iter().enumerate() {
                z[(j, n)] = v;
            }
        }
        worst = worst.max(rel_err(&y, &(&c * z)));
    }
    check(
        worst <= 1e-5,
        format!("20 instances, {}x{} system, grid {} pts, worst relative error {worst:.2e} (tol 1e-5)", c.nrows(), c.ncols(), (grid_rate * duration).round()),
    )
}

// 4. Desk-scale MWC with CTF.
fn mwc_end_to_end() -> Outcome {
    let report = run_experiment(&config("mwc_desk")).map_err(|e| e.to_string())?;
    let s = &report.summary;
    let exact = report.trials.iter().filter(|t| t.support_exact).count();
    check(
        s.trials == 100 && exact == 100 && s.successes == 100 && s.max_nmse <= 1e-4,
        format!(
            "support exact {exact}/{}, successes {}, max NMSE {:.2e} (tol 1e-4), {:.1} s",
            s.trials, s.successes, s.max_nmse, s.wall_time_s
        ),
    )
}

// 5. Compute load and rate bounds of the 10 GHz scenario.
fn ten_ghz_numbers() -> Outcome {
    let load = mwc_compute_load(6, 35, Q::from_integer(51_000_000));
    let cfg = config("bounds_10ghz");
    let Scenario::Bounds { model, sampler } = &cfg.scenario else { unreachable!() };
    let r = bounds_report(model, sampler).map_err(|e| e.to_string())?;
    let gap = (r.sampler_rate - 1.8e9).abs() / 1.8e9;
    check(
        load == Q::from_integer(21_420_000_000) && r.landau == 300e6 && (r.sampler_rate - 1.785e9).abs() < 1e-3 && gap <= 0.01,
        format!(
            "load {} M/s, landau {:.0} MHz, MWC total {:.3} GHz ({:.2}% from 1.8 GHz)",
            load / Q::from_integer(1_000_000),
            r.landau / 1e6,
            r.sampler_rate / 1e9,
            100.0 * gap
        ),
    )
}

// 6. Blind bound over a 1000-point occupancy sweep.
fn blind_sweep() -> Outcome {
    let f = Q::from_integer(10_000_000_000);
    let mut wrong = 0;
    for i in 1..=1000 {
        let omega = Q::new(i, 1000);
        let want = if omega >= Q::new(1, 2) { f } else { Q::from_integer(2) * omega * f };
        if blind_min_rate(omega, f).ok() != Some(want) {
            wrong += 1;
        }
        let of = i as f64 / 1000.0;
        let wf = if of >= 0.5 { 1e10 } else { 2.0 * of * 1e10 };
        if blind_min_rate(of, 1e10).ok() != Some(wf) {
            wrong += 1;
        }
    }
    check(wrong == 0, format!("1000 occupancies, rational and f64, {wrong} mismatches"))
}

fn fri_trial(l: usize, s: u64) -> Result<(f64, f64, f64), String> {
    let mut rng = seed::rng(s);
    let spec = random_fri(l, 1.0, 0.25 / l as f64, false, PulseShape::Dirac, &mut rng).map_err(|e| e.to_string())?;
    let x = gen_fri_periodic(&spec, (10 * (2 * l + 1)) as f64, 1).map_err(|e| e.to_string())?;
    let low = SamplingKernel::lowpass(IndexRange::symmetric(l));
    let sos = SamplingKernel::Sos(SosKernel::dirichlet(l, 1.0));
    let run = |k: &SamplingKernel<f64>| -> Result<FriSpec64, String> {
        let c = fri_sample_grid(&x, k, 1.0).map_err(|e| e.to_string())?;
        if c.len() != 2 * l + 1 {
            return Err(format!("{} samples for L = {l}", c.len()));
        }
        fri_recover(&c, k, l, 1.0, &PulseShape::Dirac).map_err(|e| e.to_string())
    };
    let a = run(&low)?;
    let b = run(&sos)?;
    let (delay, amp, ..) = match_pulses(&a, &spec, 1e-6);
    let (agree_d, agree_a, ..) = match_pulses(&b, &a, 1e-8);
    Ok((delay, amp, agree_d.max(agree_a)))
}

// 7. FRI at the critical rate 2L + 1.
fn fri_critical_rate() -> Outcome {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut failed = 0;
    for l in 1..=10 {
        for trial in 0..50 {
            let (d, a, g) = fri_trial(l, 0xacce_0007 ^ ((l as u64) << 32) ^ trial)?;
            if !(d <= 1e-6 && a <= 1e-6 && g <= 1e-8) {
                failed += 1;
            }
            worst = (worst.0.max(d), worst.1.max(a), worst.2.max(g));
        }
    }
    // large-L smoke runs, reported only
    let smoke = |gap: f64| {
        let mut rng = seed::rng(100);
        let k = SamplingKernel::Sos(SosKernel::dirichlet(100, 1.0));
        let mut run = || -> Result<String, subnyq::Error> {
            let spec = random_fri(100, 1.0, gap / 100.0, false, PulseShape::Dirac, &mut rng)?;
            let est = fri_recover(&fri_sample(&spec, &k)?, &k, 100, 1.0, &PulseShape::Dirac)?;
            let (d, a, ..) = match_pulses(&est, &spec, 1e-6);
            Ok(format!("delay {d:.1e} tau, amp {a:.1e}"))
        };
        format!("gap {gap} tau/L: {}", run().unwrap_or_else(|e| e.to_string()))
    };
    let smoke = format!("{}; {}", smoke(0.25), smoke(0.5));
    check(
        failed == 0,
        format!(
            "L=1..10 x 50: {failed} failures, max delay {:.1e} tau, amp {:.1e}, SoS vs lowpass {:.1e}; L=100 smoke: {smoke}",
            worst.0, worst.1, worst.2
        ),
    )
}

// 8. Random demodulator with OMP, plus the grid-mismatch sweep.
fn rd_exact() -> Outcome {
    let cfg = config("rd");
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let s = &report.summary;
    let exact = report.trials.iter().filter(|t| t.support_exact).count();
    let Scenario::Rd { model, sampler, .. } = &cfg.scenario else { unreachable!() };
    let rows = mismatch_sweep(
        &HarmonicModel { mismatch: 0.0, ..model.clone() },
        &RdSampler { chip_seed: None, ..sampler.clone() },
        &[0.0, 0.1, 0.25, 0.5],
        100,
        cfg.seed,
    )
    .map_err(|e| e.to_string())?;
    let zero = &rows[0];
    let rest: Vec<String> = rows[1..]
        .iter()
        .map(|r| format!("d={}: exact {:.0}% NMSE~{:.1e}", r.delta, 100.0 * r.support_exact_rate, r.median_nmse))
        .collect();
    check(
        exact == 100 && s.max_nmse <= 1e-8 && zero.support_exact_rate == 1.0 && zero.max_nmse <= 1e-8,
        format!(
            "exact {exact}/100, max NMSE {:.1e}; sweep d=0 exact {:.0}% max {:.1e}; {}",
            s.max_nmse,
            100.0 * zero.support_exact_rate,
            zero.max_nmse,
            rest.join(", ")
        ),
    )
}

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Orthonormal basis next to its DFT rotation, columns shuffled and phased:
/// coherence `1/√n`.
fn two_ortho<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    let (q, _) = f64::qr(&gaussian_matrix(n, n, rng));
    let f = CMatrix::from_fn(n, n, |r, c| cis(-TAU * (r * c) as f64 / n as f64) / (n as f64).sqrt());
    let qf = &q * f;
    let mut order: Vec<usize> = (0..2 * n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let phases: Vec<C64> = (0..2 * n).map(|_| cis(rng.random::<f64>() * TAU)).collect();
    CMatrix::from_fn(n, 2 * n, |r, c| {
        let src = order[c];
        phases[c] * if src < n { q[(r, src)] } else { qf[(r, src - n)] }
    })
}

fn random_support<R: Rng>(k: usize, n: usize, rng: &mut R) -> Vec<usize> {
    let mut s: Vec<usize> = Vec::new();
    while s.len() < k {
        let j = rng.random_range(0..n);
        if !s.contains(&j) {
            s.push(j);
        }
    }
    s.sort_unstable();
    s
}

fn random_coeffs<R: Rng>(k: usize, rng: &mut R) -> Vec<C64> {
    (0..k).map(|_| cis(rng.random::<f64>() * TAU) * (0.5 + rng.random::<f64>())).collect()
}

// 9. OMP against exhaustive l0 search.
fn omp_vs_l0() -> Outcome {
    let (k, mut agree, mut mu_max) = (2, 0, 0.0f64);
    for inst in 0..200u64 {
        let mut rng = seed::rng(0xacce_0009 + inst);
        let c = two_ortho(12, &mut rng);
        let mu = mutual_coherence(&c).map_err(|e| e.to_string())?;
        mu_max = mu_max.max(mu);
        if !unique_if(k, mu) {
            return Err(format!("instance {inst}: k={k} not unique at coherence {mu}"));
        }
        let support = random_support(k, 24, &mut rng);
        let coeffs = random_coeffs(k, &mut rng);
        let y: Vec<C64> = (0..12).map(|r| support.iter().zip(&coeffs).map(|(&j, a)| c[(r, j)] * a).sum()).collect();
        let columns: Vec<Vec<C64>> = (0..24).map(|j| c.column(j).iter().copied().collect()).collect();
        let l0 = oracle::l0_search(&columns, &y, k, 1e-9);
        let sol = omp(&y, &c, k, 1e-10).map_err(|e| e.to_string())?;
        if l0.as_deref() == Some(sol.support.indices()) {
            agree += 1;
        }
    }
    check(agree == 200, format!("{agree}/200 agree, 12x24, k=2, coherence {mu_max:.4} (uniqueness needs k < {:.2})", 0.5 * (1.0 + 1.0 / mu_max)))
}

// 10. Simulation-density convergence of the sign-waveform coefficients.
fn density() -> Outcome {
    let densities = [1, 2, 5, 10, 50, 100];
    let mut worst_final = 0.0f64;
    let mut monotone = true;
    for p in 0..10u64 {
        let cfg = MwcConfig::<f64>::random(1, 9, 1.0, 0xacce_0010 + p).map_err(|e| e.to_string())?;
        let rows = density_convergence(&cfg.patterns[0], &densities, QuadratureRule::GaussLegendre).map_err(|e| e.to_string())?;
        monotone &= rows.windows(2).all(|w| w[1].max_error <= w[0].max_error + 1e-12);
        worst_final = worst_final.max(rows.last().unwrap().max_error);
    }
    check(
        monotone && worst_final <= 1e-6,
        format!("10 patterns, M=9, Gauss-Legendre per chip: non-increasing {monotone}, worst gap at r=100 {worst_final:.1e}"),
    )
}

/// Delays moved by `delta` mod `τ`, kept ascending with their amplitudes.
fn shift(spec: &FriSpec64, delta: f64) -> FriSpec64 {
    let mut v: Vec<(f64, C64)> = spec
        .delays
        .iter()
        .map(|t| (t + delta).rem_euclid(spec.period))
        .zip(spec.amplitudes.iter().copied())
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    FriSpec64 {
        delays: v.iter().map(|p| p.0).collect(),
        amplitudes: v.iter().map(|p| p.1).collect(),
        ..spec.clone()
    }
}

struct Planted {
    y: CMatrix<f64>,
    c: CMatrix<f64>,
}

fn planted_block(s: u64, k: usize) -> Planted {
    let cfg = MwcConfig::random(12, 21, 1.0, s ^ 0xa5).unwrap();
    let c = mwc_matrix(&cfg).unwrap();
    let mut rng = seed::rng(s);
    let support = random_support(k, c.ncols(), &mut rng);
    let mut z = CMatrix::zeros(c.ncols(), 16);
    for &j in &support {
        for (n, v) in random_coeffs(16, &mut rng).into_iter().enumerate() {
            z[(j, n)] = v;
        }
    }
    Planted { y: &c * z, c }
}

fn small_mwc_input(s: u64, cfg: &MwcConfig<f64>) -> subnyq::DenseSignal<f64> {
    let mut rng = seed::rng(s);
    let limit = cfg.covered_band();
    let spec = random_multiband(2, 0.6, limit, limit, BandContent::Gaussian { amplitude: 1.0 }, &mut rng).unwrap();
    gen_multiband(&spec, 110.0, 13.0, s).unwrap()
}

// 11. Invariants, 100 seeded cases each.
fn invariants() -> Outcome {
    const CASES: u64 = 100;
    let mut failures: Vec<String> = Vec::new();
    let mut run = |name: &str, prop: &dyn Fn(u64) -> bool| {
        let bad = (0..CASES).filter(|&s| !prop(0xacce_0011 ^ (s << 8))).count();
        if bad > 0 {
            failures.push(format!("{name} {bad}/{CASES}"));
        }
    };
    let small = MwcConfig::random(4, 11, 1.0, 5).unwrap();
    run("mwc linearity", &|s| {
        let (a, b) = (small_mwc_input(s, &small), small_mwc_input(s + 1, &small));
        let alpha = cis(s as f64) * 1.7;
        let ya = mwc_sample(&a, &small).unwrap();
        let yb = mwc_sample(&b, &small).unwrap();
        let yab = mwc_sample(&a.scaled(alpha).try_add(&b).unwrap(), &small).unwrap();
        (yab - ya * alpha - &yb).norm() <= 1e-10 * (1.0 + yb.norm())
    });
    run("conjugate symmetry", &|s| small_mwc_input(s, &small).conjugate_symmetry_defect() <= 1e-10);
    run("annihilation", &|s| {
        let mut rng = seed::rng(s);
        let l = 1 + (s as usize >> 8) % 7;
        let spec = random_fri(l, 1.0, 0.25 / l as f64, false, PulseShape::Dirac, &mut rng).unwrap();
        let x = FourierCoeffs::of_spec(&spec, IndexRange::symmetric(l + 2));
        let a = annihilating_filter(&x, l).unwrap();
        let k = x.indices();
        let scale = 1.0 + x.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        (k.first + l as i64..=k.last()).all(|i| {
            let conv: C64 = (0..=l).map(|j| a[j] * x.get(i - j as i64).unwrap()).sum();
            conv.norm() <= 1e-10 * scale
        })
    });
    run("fri shift covariance", &|s| {
        let mut rng = seed::rng(s);
        let l = 1 + (s as usize >> 8) % 6;
        let delta: f64 = rng.random();
        let spec = random_fri(l, 1.0, 0.25 / l as f64, false, PulseShape::Dirac, &mut rng).unwrap();
        let shifted = shift(&spec, delta);
        let k = SamplingKernel::lowpass(IndexRange::symmetric(l));
        let a = fri_recover(&fri_sample(&spec, &k).unwrap(), &k, l, 1.0, &PulseShape::Dirac).unwrap();
        let b = fri_recover(&fri_sample(&shifted, &k).unwrap(), &k, l, 1.0, &PulseShape::Dirac).unwrap();
        let (d, r, ..) = match_pulses(&b, &shift(&a, delta), 1e-8);
        d <= 1e-8 && r <= 1e-8
    });
    run("omp monotone residual", &|s| {
        let mut rng = seed::rng(s);
        let c = gaussian_matrix(10, 25, &mut rng);
        let y: Vec<C64> = gaussian_matrix(10, 1, &mut rng).column(0).iter().copied().collect();
        let sol = omp(&y, &c, 8, 0.0).unwrap();
        sol.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    });
    let plain = |k: usize| CtfOptions { symmetrize: false, ..CtfOptions::new(k) };
    run("ctf scale invariance", &|s| {
        let k = 1 + (s as usize >> 8) % 3;
        let p = planted_block(s, k);
        let alpha = cis(0.37 * s as f64) * (0.1 + (s % 97) as f64 / 10.0);
        ctf(&p.y, &p.c, &plain(k)).unwrap() == ctf(&p.y.map(|v| v * alpha), &p.c, &plain(k)).unwrap()
    });
    run("ctf frame-root invariance", &|s| {
        let k = 1 + (s as usize >> 8) % 3;
        let p = planted_block(s, k);
        let a: SupportSet = ctf(&p.y, &p.c, &plain(k)).unwrap();
        a == ctf(&p.y, &p.c, &CtfOptions { frame: FrameRoot::PivotedCholesky, ..plain(k) }).unwrap()
    });
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("7 invariants x {CASES} seeded cases; the per-crate proptest suites run 128 cases each")
        } else {
            failures.join(", ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("undersampling validity", undersampling),
        ("PNS round trip", pns_round_trip),
        ("MWC master property", mwc_master_property),
        ("MWC end-to-end", mwc_end_to_end),
        ("10 GHz scenario numbers", ten_ghz_numbers),
        ("blind bound", blind_sweep),
        ("FRI critical rate", fri_critical_rate),
        ("RD exact recovery", rd_exact),
        ("OMP vs l0", omp_vs_l0),
        ("density convergence", density),
        ("invariant suites", invariants),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
