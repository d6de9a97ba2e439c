//! Sweep evaluation: one record per (parameter set, reflectivity) pair, all
//! distances computed through the Kraus-loss + Bures pipeline.

use std::io::Write;

use anyhow::{Context, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use mqs_core::fock::{pure_to_density, TruncationConfig};
use mqs_core::loss::{apply_loss_single_mode, apply_loss_two_mode, ChannelParams};
use mqs_core::metrics::{bures_between, bures_distance};
use mqs_core::ofilter::{apply_ofilter, OFilterParams};
use mqs_core::states::{
    coherent_mqs_lossy_density, coherent_mqs_required_n_max, coherent_required_n_max,
    coherent_state_vector, noon_state, qiopa_equatorial_pair_canonical, qiopa_mean_photon_number,
    qiopa_pi_orthogonal_state, qiopa_pi_state, qiopa_required_n_max, CoherentMqsParams, MqsSign,
    NoonParams, QiopaParams,
};

use crate::config::{Family, SweepConfig};

/// One CSV record.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub family: &'static str,
    pub gain: Option<f64>,
    pub alpha: Option<f64>,
    pub phi: Option<f64>,
    pub photons: Option<usize>,
    pub threshold: Option<usize>,
    pub reflectivity: f64,
    /// Mean number of lost photons: R·⟨n⟩, with the branch-separation weight
    /// sin²φ for the coherent superposition family.
    pub x: f64,
    pub fidelity: f64,
    pub bures: f64,
    pub success_probability: f64,
    pub mean_photons_out: f64,
}

/// Fixed CSV column order; downstream plotting relies on it.
pub const CSV_HEADER: &str = "family,g,alpha,phi,n_photons,k_threshold,r,x,fidelity,d_bures,success_probability,mean_photons_out";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

impl SweepResult {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            fmt_opt(self.gain),
            fmt_opt(self.alpha),
            fmt_opt(self.phi),
            fmt_opt_usize(self.photons),
            fmt_opt_usize(self.threshold),
            fmt(self.reflectivity),
            fmt(self.x),
            fmt(self.fidelity),
            fmt(self.bures),
            fmt(self.success_probability),
            fmt(self.mean_photons_out),
        )
    }
}

/// One unit of work: a parameter combination at one grid reflectivity.
#[derive(Debug, Clone, Copy)]
struct Point {
    gain: Option<f64>,
    photons: Option<usize>,
    threshold: Option<usize>,
    reflectivity: f64,
}

fn truncation_for(cfg: &SweepConfig, point: &Point) -> Result<TruncationConfig> {
    let n_max = match cfg.n_max {
        Some(n) => n,
        None => match cfg.family {
            Family::CoherentMqs => {
                let params = CoherentMqsParams::new(
                    Complex64::new(cfg.alpha, 0.0),
                    cfg.phi,
                    MqsSign::Minus,
                )
                .map_err(anyhow::Error::from)?;
                coherent_mqs_required_n_max(&params, cfg.tail_tol)?
            }
            Family::CoherentPointer => {
                coherent_required_n_max(Complex64::new(cfg.alpha, 0.0), cfg.tail_tol)
            }
            Family::Noon => point.photons.unwrap_or(1),
            _ => qiopa_required_n_max(point.gain.expect("qiopa point has gain"), cfg.tail_tol)?,
        },
    };
    Ok(TruncationConfig::new(n_max, cfg.tail_tol)?)
}

fn evaluate_point(cfg: &SweepConfig, point: &Point) -> Result<SweepResult> {
    let trunc = truncation_for(cfg, point)?;
    let channel = ChannelParams::from_reflectivity(point.reflectivity)?;
    let r = point.reflectivity;

    let result = match cfg.family {
        Family::CoherentMqs => {
            let alpha = Complex64::new(cfg.alpha, 0.0);
            let plus = CoherentMqsParams::new(alpha, cfg.phi, MqsSign::Plus)?;
            let minus = CoherentMqsParams::new(alpha, cfg.phi, MqsSign::Minus)?;
            let rho = coherent_mqs_lossy_density(&plus, &channel, &trunc)?;
            let sigma = coherent_mqs_lossy_density(&minus, &channel, &trunc)?;
            let report = bures_between(rho.entries().view(), sigma.entries().view())?;
            SweepResult {
                family: cfg.family.name(),
                gain: None,
                alpha: Some(cfg.alpha),
                phi: Some(cfg.phi),
                photons: None,
                threshold: None,
                reflectivity: r,
                x: r * cfg.alpha * cfg.alpha * cfg.phi.sin().powi(2),
                fidelity: report.fidelity,
                bures: report.bures,
                success_probability: 1.0,
                mean_photons_out: rho.mean_photon_number(),
            }
        }
        Family::CoherentPointer => {
            let alpha = Complex64::new(cfg.alpha, 0.0);
            let rho = apply_loss_single_mode(
                &coherent_state_vector(alpha, &trunc)?.to_density(),
                &channel,
            )?;
            let sigma = apply_loss_single_mode(
                &coherent_state_vector(-alpha, &trunc)?.to_density(),
                &channel,
            )?;
            let report = bures_between(rho.entries().view(), sigma.entries().view())?;
            SweepResult {
                family: cfg.family.name(),
                gain: None,
                alpha: Some(cfg.alpha),
                phi: None,
                photons: None,
                threshold: None,
                reflectivity: r,
                x: r * cfg.alpha * cfg.alpha,
                fidelity: report.fidelity,
                bures: report.bures,
                success_probability: 1.0,
                mean_photons_out: rho.mean_photon_number(),
            }
        }
        Family::Noon => {
            let n = point.photons.expect("noon point has photon number");
            let plus = NoonParams::new(n, MqsSign::Plus)?;
            let minus = NoonParams::new(n, MqsSign::Minus)?;
            let rho = apply_loss_two_mode(&noon_state(&plus, &trunc)?.to_density(), &channel)?;
            let sigma = apply_loss_two_mode(&noon_state(&minus, &trunc)?.to_density(), &channel)?;
            let report = bures_distance(&rho, &sigma)?;
            SweepResult {
                family: cfg.family.name(),
                gain: None,
                alpha: None,
                phi: None,
                photons: Some(n),
                threshold: None,
                reflectivity: r,
                x: r * n as f64,
                fidelity: report.fidelity,
                bures: report.bures,
                success_probability: 1.0,
                mean_photons_out: rho.mean_photon_number(),
            }
        }
        Family::QiopaEquatorial | Family::QiopaHv | Family::QiopaOfiltered => {
            let gain = point.gain.expect("qiopa point has gain");
            let params = QiopaParams::new(gain, cfg.phi)?;
            let (rho, sigma, success) = match cfg.family {
                Family::QiopaHv => {
                    let h = qiopa_pi_state(&params, &trunc)?;
                    let v = qiopa_pi_orthogonal_state(&params, &trunc)?;
                    (
                        apply_loss_two_mode(&pure_to_density(&h), &channel)?,
                        apply_loss_two_mode(&pure_to_density(&v), &channel)?,
                        1.0,
                    )
                }
                _ => {
                    // Phase covariance makes the distance independent of the
                    // equatorial angle, so the (Φ⁺, Φ⁻) pair stands in for
                    // every (Φ^φ, Φ^{φ⊥}) pair; φ is echoed as given.
                    let (a, b) = qiopa_equatorial_pair_canonical(
                        &QiopaParams::new(gain, 0.0)?,
                        &trunc,
                    )?;
                    let lossy_a = apply_loss_two_mode(&pure_to_density(&a), &channel)?;
                    let lossy_b = apply_loss_two_mode(&pure_to_density(&b), &channel)?;
                    if cfg.family == Family::QiopaOfiltered {
                        let k = OFilterParams::new(point.threshold.expect("threshold"));
                        let (fa, pa) = apply_ofilter(&lossy_a, &k)?;
                        let (fb, _) = apply_ofilter(&lossy_b, &k)?;
                        (fa, fb, pa)
                    } else {
                        (lossy_a, lossy_b, 1.0)
                    }
                }
            };
            let report = bures_distance(&rho, &sigma)?;
            SweepResult {
                family: cfg.family.name(),
                gain: Some(gain),
                alpha: None,
                phi: Some(cfg.phi),
                photons: None,
                threshold: point.threshold,
                reflectivity: r,
                x: r * qiopa_mean_photon_number(gain),
                fidelity: report.fidelity,
                bures: report.bures,
                success_probability: success,
                mean_photons_out: rho.mean_photon_number(),
            }
        }
    };
    debug_assert!((result.bures - (1.0 - result.fidelity).sqrt()).abs() < 1e-12);
    Ok(result)
}

fn build_points(cfg: &SweepConfig) -> Vec<Point> {
    let mut points = Vec::new();
    match cfg.family {
        Family::CoherentMqs | Family::CoherentPointer => {
            for &r in &cfg.r_grid {
                points.push(Point {
                    gain: None,
                    photons: None,
                    threshold: None,
                    reflectivity: r,
                });
            }
        }
        Family::Noon => {
            for &n in &cfg.photons {
                for &r in &cfg.r_grid {
                    points.push(Point {
                        gain: None,
                        photons: Some(n),
                        threshold: None,
                        reflectivity: r,
                    });
                }
            }
        }
        Family::QiopaEquatorial | Family::QiopaHv => {
            for &g in &cfg.gains {
                for &r in &cfg.r_grid {
                    points.push(Point {
                        gain: Some(g),
                        photons: None,
                        threshold: None,
                        reflectivity: r,
                    });
                }
            }
        }
        Family::QiopaOfiltered => {
            for &g in &cfg.gains {
                for &k in &cfg.thresholds {
                    for &r in &cfg.r_grid {
                        points.push(Point {
                            gain: Some(g),
                            photons: None,
                            threshold: Some(k),
                            reflectivity: r,
                        });
                    }
                }
            }
        }
    }
    points
}

/// Evaluate the whole grid. Points run in parallel; output order follows the
/// grid order regardless of scheduling. A point that fails (e.g. truncation
/// rejected at some R) is reported on stderr and skipped; the sweep goes on.
pub fn run_sweep(cfg: &SweepConfig) -> Vec<SweepResult> {
    let points = build_points(cfg);
    let outcomes: Vec<(usize, Result<SweepResult>)> = points
        .par_iter()
        .enumerate()
        .map(|(idx, point)| (idx, evaluate_point(cfg, point)))
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut sorted = outcomes;
    sorted.sort_by_key(|(idx, _)| *idx);
    for (idx, outcome) in sorted {
        match outcome {
            Ok(row) => rows.push(row),
            Err(err) => {
                eprintln!(
                    "warning: grid point {idx} (R = {}) failed: {err}",
                    points[idx].reflectivity
                );
            }
        }
    }
    rows
}

/// Write rows as CSV with the frozen header. 17 significant digits per value
/// keep the output byte-reproducible and lossless.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepResult]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}").context("writing CSV header")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line()).context("writing CSV row")?;
    }
    Ok(())
}
