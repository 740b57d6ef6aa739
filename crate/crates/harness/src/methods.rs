//! Methodology experiments: simulation-density convergence of the MWC sign
//! coefficients, RD grid-mismatch sensitivity, and the rate-bound report.

use std::io::Write;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use subnyq::bounds::{blind_min_rate, landau_min_rate, mwc_compute_load};
use subnyq::sampling::sign_coefficient;
use subnyq::scalar::cis;
use subnyq::{MultibandSpec, C64};

use crate::config::{
    BoundsModel, BoundsSampler, ExperimentConfig, HarmonicModel, OutputConfig, QuadratureRule, RdRecovery, RdSampler,
    Scenario,
};
use crate::error::HarnessError;
use crate::experiment::run_experiment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub density: usize,
    /// `max_l |c_l(quadrature) − c_l(closed form)|` over `l = −L..L`.
    pub max_error: f64,
}

/// Fourier coefficient `c_l` of a unit-period sign waveform by numerical
/// integration with `r` nodes on every chip.
pub fn sign_coefficient_numeric(pattern: &[i8], l: i64, r: usize, rule: QuadratureRule) -> C64 {
    let m = pattern.len() as f64;
    let h = 1.0 / m;
    let omega = -2.0 * std::f64::consts::PI * l as f64;
    // nodes and weights on [0, 1]
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match rule {
        QuadratureRule::Midpoint => ((0..r).map(|i| (i as f64 + 0.5) / r as f64).collect(), vec![1.0 / r as f64; r]),
        QuadratureRule::GaussLegendre => {
            let gl = GaussLegendre::new(NonZeroUsize::new(r).expect("r >= 1"));
            (gl.nodes().map(|x| 0.5 * (x + 1.0)).collect(), gl.weights().map(|w| 0.5 * w).collect())
        }
    };
    let mut acc = C64::new(0.0, 0.0);
    for (k, &s) in pattern.iter().enumerate() {
        let a = k as f64 * h;
        let chip: C64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| cis(omega * (a + x * h)) * w)
            .sum();
        acc += chip * (s as f64 * h);
    }
    acc
}

/// Quadrature error of every `c_l`, `l = −L..L`, per density `r` (nodes per
/// chip). Densities must be positive and strictly increasing.
pub fn density_convergence(pattern: &[i8], densities: &[usize], rule: QuadratureRule) -> Result<Vec<DensityRow>, HarnessError> {
    if pattern.is_empty() || pattern.iter().any(|&s| s != 1 && s != -1) {
        return Err(HarnessError::Config {
            path: "pattern".into(),
            message: "need a nonempty ±1 pattern".into(),
        });
    }
    if densities.contains(&0) {
        return Err(HarnessError::Config {
            path: "densities".into(),
            message: "every density must be at least 1".into(),
        });
    }
    if densities.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config {
            path: "densities".into(),
            message: "must be strictly increasing".into(),
        });
    }
    let half = (pattern.len() / 2) as i64;
    Ok(densities
        .iter()
        .map(|&r| DensityRow {
            density: r,
            max_error: (-half..=half)
                .map(|l| (sign_coefficient_numeric(pattern, l, r, rule) - sign_coefficient::<f64>(pattern, l)).norm())
                .fold(0.0, f64::max),
        })
        .collect())
}

pub fn write_density_csv<W: Write>(rows: &[DensityRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "density,max_error")?;
    for r in rows {
        writeln!(w, "{},{:.16e}", r.density, r.max_error)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchRow {
    pub delta: f64,
    pub trials: usize,
    pub support_exact_rate: f64,
    pub median_nmse: f64,
    pub max_nmse: f64,
}

/// RD reconstruction with tones displaced to `k + δ` while the decoder keeps
/// the integer grid. One row per `δ`, each from `trials` seeded trials.
pub fn mismatch_sweep(
    model: &HarmonicModel,
    sampler: &RdSampler,
    deltas: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<MismatchRow>, HarnessError> {
    deltas
        .iter()
        .map(|&delta| {
            let cfg = ExperimentConfig {
                scenario: Scenario::Rd {
                    model: HarmonicModel {
                        mismatch: delta,
                        ..model.clone()
                    },
                    sampler: sampler.clone(),
                    recovery: RdRecovery::default(),
                },
                trials,
                seed,
                grid_density_factor: 1,
                output: OutputConfig::default(),
            };
            let report = run_experiment(&cfg)?;
            let exact = report.trials.iter().filter(|t| t.support_exact).count();
            Ok(MismatchRow {
                delta,
                trials,
                support_exact_rate: exact as f64 / trials as f64,
                median_nmse: report.summary.median_nmse,
                max_nmse: report.summary.max_nmse,
            })
        })
        .collect()
}

pub fn write_mismatch_csv<W: Write>(rows: &[MismatchRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "delta,trials,support_exact_rate,median_nmse,max_nmse")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{},{:.16e},{:.16e},{:.16e}",
            r.delta, r.trials, r.support_exact_rate, r.median_nmse, r.max_nmse
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub nyquist: f64,
    /// `N·B`.
    pub landau: f64,
    /// `Ω = N·B / f_nyq`.
    pub occupancy: f64,
    /// `min(2Ω f_nyq, f_nyq)`.
    pub blind: f64,
    /// Total sampler rate `m·f_s`.
    pub sampler_rate: f64,
    /// Digital back-end load `2 N m f_s`, multiplications per second.
    pub compute_load: f64,
    pub sampler_meets_blind: bool,
    /// False when `Ω ≥ 1/2`: no blind scheme can undercut Nyquist.
    pub sub_nyquist_possible: bool,
}

pub fn bounds_report(model: &BoundsModel, sampler: &BoundsSampler) -> Result<BoundsReport, HarnessError> {
    let landau = landau_min_rate(model.bands as f64 * model.band_width)?;
    let occupancy = landau / model.f_nyq;
    let blind = blind_min_rate(occupancy, model.f_nyq)?;
    let sampler_rate = sampler.channels as f64 * sampler.f_s;
    Ok(BoundsReport {
        nyquist: model.f_nyq,
        landau,
        occupancy,
        blind,
        sampler_rate,
        compute_load: mwc_compute_load(model.bands, sampler.channels, sampler.f_s),
        sampler_meets_blind: sampler_rate >= blind,
        sub_nyquist_possible: blind < model.f_nyq,
    })
}

/// Report for a concrete multiband spec (`f_nyq = 2 f_max`).
pub fn bounds_report_for_spec(spec: &MultibandSpec<f64>, sampler: &BoundsSampler) -> Result<BoundsReport, HarnessError> {
    spec.validate()?;
    bounds_report(
        &BoundsModel {
            f_nyq: spec.nyquist_rate(),
            bands: spec.band_count,
            band_width: spec.band_width,
        },
        sampler,
    )
}
