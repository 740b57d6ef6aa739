mod common;

use std::f64::consts::PI;

use num_rational::Ratio;
use subnyq::bounds::{blind_min_rate, landau_min_rate, mwc_compute_load, undersample_valid_rates};
use subnyq::sampling::{
    mwc_matrix, mwc_sample, pointwise_sample, rd_matrix, rd_sample, th_sample, MwcConfig, RdConfig, SignRendering,
    ThModel,
};
use subnyq::scalar::cis;
use subnyq::signal::gen_multiband;
use subnyq::{seed, Complex, DenseSignal, HarmonicSpec, C64};
use subnyq_oracle as oracle;

use common::{rel_err, SmallMwc};

type Q = Ratio<i64>;

#[test]
fn undersampling_box_example_is_exact() {
    let rates = undersample_valid_rates(Q::from_integer(600), Q::from_integer(625)).unwrap();
    let k25 = rates.iter().find(|r| r.k == 25).unwrap();
    assert_eq!(k25.lo, Q::from_integer(50));
    assert_eq!(k25.hi, Some(Q::from_integer(50)));
    assert!(rates.iter().any(|r| r.contains(&Q::from_integer(50))));
    // lowest rates first
    assert!(rates.windows(2).all(|w| w[0].k > w[1].k));
}

#[test]
fn undersampling_trivial_cases() {
    let rates = undersample_valid_rates(Q::from_integer(3), Q::from_integer(4)).unwrap();
    assert_eq!(rates[0].k, 4);
    assert_eq!(rates[0].lo, Q::from_integer(2));
    assert_eq!(rates[0].hi, Some(Q::from_integer(2)));
    let only = undersample_valid_rates(10.0, 35.0).unwrap();
    assert_eq!(only.len(), 1);
    assert_eq!(only[0].lo, 70.0);
    assert_eq!(only[0].hi, None);
    assert!(undersample_valid_rates(5.0, 5.0).is_err());
}

#[test]
fn undersampling_rates_are_alias_free() {
    for (fl, fu) in [(600, 625), (37, 50), (90, 100), (13, 29), (1, 7)] {
        let rates = undersample_valid_rates(Q::from_integer(fl), Q::from_integer(fu)).unwrap();
        for r in &rates {
            let hi = r.hi.unwrap_or(r.lo * Q::from_integer(3));
            for i in 0..=20 {
                let fs = r.lo + (hi - r.lo) * Q::new(i, 20);
                assert!(oracle::alias_free(Q::from_integer(fl), Q::from_integer(fu), fs), "{fl}-{fu} at {fs}");
            }
        }
    }
}

#[test]
fn th_bandwidth_kills_the_alias() {
    // band around 43 Hz, sampled at 20 Hz: aliases to baseband unless the T/H cuts it
    let x = DenseSignal::from_fn(400.0, 1.0, |t| Complex::new((2.0 * PI * 43.0 * t).cos(), 0.0)).unwrap();
    let limited = th_sample(&x, 20.0, &ThModel { analog_bandwidth: 30.0 }).unwrap();
    let ideal = pointwise_sample(&x, 20.0).unwrap();
    assert!(limited.iter().all(|z| z.norm() < 1e-12));
    assert!(ideal.iter().map(|z| z.norm()).fold(0.0, f64::max) > 0.5);
}

#[test]
fn mwc_matrix_matches_quadrature() {
    let cfg = MwcConfig::<f64>::random(6, 9, 1.0, 42).unwrap();
    let c = mwc_matrix(&cfg).unwrap();
    for i in 0..6 {
        for j in 0..9 {
            let q = oracle::sign_coefficient_quadrature(&cfg.patterns[i], j as i64 - 4, 101);
            assert!((c[(i, j)] - q).norm() < 1e-8, "({i},{j})");
        }
    }
}

#[test]
fn mwc_tone_lands_on_its_slice() {
    let sys = SmallMwc::new(5, 9, 15, 10, 3);
    let c = mwc_matrix(&sys.cfg).unwrap();
    let (l0, f0) = (3i64, 0.2);
    let f = l0 as f64 + f0;
    let x = DenseSignal::from_fn(sys.grid_rate, sys.duration, |t| cis(2.0 * PI * f * t)).unwrap();
    let y = mwc_sample(&x, &sys.cfg).unwrap();
    let half = sys.half_width() as i64;
    for i in 0..5 {
        // the tone at +l0 f_p sits in slice z_{-l0}
        let col = (-l0 + half) as usize;
        let expect: Vec<C64> = (0..sys.t).map(|n| c[(i, col)] * cis(2.0 * PI * f0 * n as f64)).collect();
        let got: Vec<C64> = y.row(i).iter().copied().collect();
        assert!(rel_err(&got, &expect) < 1e-10);
    }
}

#[test]
fn mwc_equals_matrix_times_oracle_slices() {
    let sys = SmallMwc::new(8, 19, 21, 10, 11);
    let c = mwc_matrix(&sys.cfg).unwrap();
    let half = sys.half_width() as i64;
    for s in 0..3 {
        let spec = sys.input_spec(4, 100 + s);
        let x = gen_multiband(&spec, sys.grid_rate, sys.duration, s).unwrap();
        let y = mwc_sample(&x, &sys.cfg).unwrap();
        let slices: Vec<Vec<C64>> = (-half..=half)
            .map(|l| oracle::mwc_slice(x.samples(), sys.grid_rate, 1.0, l, sys.t))
            .collect();
        for i in 0..8 {
            let predicted: Vec<C64> = (0..sys.t)
                .map(|n| (0..c.ncols()).map(|j| c[(i, j)] * slices[j][n]).sum())
                .collect();
            let got: Vec<C64> = y.row(i).iter().copied().collect();
            assert!(rel_err(&got, &predicted) < 1e-10, "instance {s} channel {i}");
        }
    }
}

#[test]
fn mwc_is_linear() {
    let sys = SmallMwc::new(4, 11, 13, 10, 5);
    let a = gen_multiband(&sys.input_spec(2, 1), sys.grid_rate, sys.duration, 1).unwrap();
    let b = gen_multiband(&sys.input_spec(2, 2), sys.grid_rate, sys.duration, 2).unwrap();
    let ya = mwc_sample(&a, &sys.cfg).unwrap();
    let yb = mwc_sample(&b, &sys.cfg).unwrap();
    let yab = mwc_sample(&a.try_add(&b).unwrap(), &sys.cfg).unwrap();
    assert!((yab - ya - yb).norm() < 1e-12 * (1.0 + x_norm(&a)));
}

fn x_norm(x: &DenseSignal<f64>) -> f64 {
    x.energy().sqrt()
}

#[test]
fn pointwise_rendering_deviates_at_order_one_over_r() {
    let sys = SmallMwc::new(3, 9, 11, 10, 8);
    let pointwise = sys.cfg.clone().with_rendering(SignRendering::Pointwise);
    let x = DenseSignal::from_fn(sys.grid_rate, sys.duration, |t| cis(2.0 * PI * 2.3 * t)).unwrap();
    let exact = mwc_sample(&x, &sys.cfg).unwrap();
    let rough = mwc_sample(&x, &pointwise).unwrap();
    let gap = (&exact - &rough).norm() / exact.norm();
    assert!(gap > 1e-3 && gap < 0.5, "gap {gap}");
}

#[test]
fn rd_matches_dense_quadrature() {
    let cfg = RdConfig::random(64, 16, 9).unwrap();
    let spec = HarmonicSpec {
        tone_grid_size: 64,
        indices: vec![3],
        coefficients: vec![Complex::new(1.0, 0.0)],
    };
    let m = rd_sample(&spec, &cfg).unwrap();
    let q = oracle::rd_quadrature(&[(3.0, Complex::new(1.0, 0.0))], &cfg.chips, 16, 10);
    for (a, b) in m.y.iter().zip(&q) {
        assert!((a - b).norm() < 1e-6);
    }
}

#[test]
fn rd_matrix_path_equals_signal_path() {
    let mut rng = seed::rng(4);
    for s in 0..10 {
        let cfg = RdConfig::random(128, 32, s).unwrap();
        let spec = subnyq::signal::random_harmonic::<f64, _>(128, 6, &mut rng).unwrap();
        let m = rd_sample(&spec, &cfg).unwrap();
        let a = rd_matrix::<f64>(&cfg).unwrap();
        let z = nalgebra::DVector::from_vec(spec.coefficient_vector());
        let y = a * z;
        for (p, q) in y.iter().zip(&m.y) {
            assert!((p - q).norm() < 1e-10);
        }
    }
}

#[test]
fn rate_bounds() {
    assert_eq!(landau_min_rate(6.0 * 50e6).unwrap(), 300e6);
    assert_eq!(landau_min_rate(0.0).unwrap(), 0.0);
    assert!(landau_min_rate(-1.0).is_err());
    assert_eq!(blind_min_rate(0.6, 10e9).unwrap(), 10e9);
    assert_eq!(blind_min_rate(Q::new(3, 100), Q::from_integer(10_000)).unwrap(), Q::from_integer(600));
    assert_eq!(blind_min_rate(0.5, 7.0).unwrap(), 7.0);
    assert!(blind_min_rate(1.2, 7.0).is_err());
    assert_eq!(mwc_compute_load(6, 35, 51i64), 21_420);
    assert_eq!(mwc_compute_load(6, 0, 51i64), 0);
    assert_eq!(mwc_compute_load(6, 35, 102i64), 2 * 21_420);
}
