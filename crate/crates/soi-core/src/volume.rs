//! Volumes of purification families: closed forms, tensor-product
//! Gauss–Legendre quadrature, and seeded Monte Carlo over the chart box.

use rayon::prelude::*;

use crate::purification::SqrtDetEvaluator;
use crate::quadrature::{compensated_sum, gauss_legendre_on};
use crate::spectrum::Spectrum;
use crate::stream::item_rng;
use crate::unitary::UnitaryFamily;
use crate::{Error, Result};
use rand::Rng;

/// Groups with a closed-form volume. `SoNProduct` is the pairwise-sum product
/// √∏_{i<j}(λⁱ+λʲ) with no π factors; cross-method comparisons against it use
/// normalized values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeGroup {
    Su2,
    So2,
    So3,
    SoNProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// One volume evaluation, with enough metadata to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeResult {
    pub value: f64,
    pub method: VolumeMethod,
    /// Zero unless `method` is Monte Carlo.
    pub std_error: f64,
    pub samples_or_nodes: u64,
    pub seed: Option<u64>,
}

/// Tensor-grid cost guard for [`quadrature_volume`].
pub const MAX_QUADRATURE_PARAMS: usize = 4;
/// Default Gauss–Legendre nodes per axis.
pub const DEFAULT_NODES_PER_AXIS: usize = 32;
/// Fixed Monte Carlo chunk size; partial sums are merged in chunk order so
/// parallel and serial runs produce identical results.
const MC_CHUNK: u64 = 4096;

fn expect_dim(group: VolumeGroup, s: &Spectrum) -> Result<()> {
    let ok = match group {
        VolumeGroup::Su2 | VolumeGroup::So2 => s.dim() == 2,
        VolumeGroup::So3 => s.dim() == 3,
        VolumeGroup::SoNProduct => s.dim() >= 2,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "{group:?} volume needs a spectrum of dimension {}, got {}",
            match group {
                VolumeGroup::Su2 | VolumeGroup::So2 => "2".to_string(),
                VolumeGroup::So3 => "3".to_string(),
                VolumeGroup::SoNProduct => ">= 2".to_string(),
            },
            s.dim()
        )))
    }
}

/// Σ_{i<j} ln(λⁱ+λʲ); −∞ when some pair sum vanishes.
fn log_pair_product(values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            acc += (values[i] + values[j]).ln();
        }
    }
    acc
}

/// Exact volume formulas per group.
pub fn closed_form_volume(group: VolumeGroup, s: &Spectrum) -> Result<VolumeResult> {
    expect_dim(group, s)?;
    let l = s.values();
    let value = match group {
        VolumeGroup::Su2 => {
            4.0 * std::f64::consts::PI.powi(2) * (l[0] * l[1]).sqrt()
        }
        VolumeGroup::So2 => std::f64::consts::FRAC_PI_2 * (l[0] + l[1]).sqrt(),
        VolumeGroup::So3 => {
            let p = (l[0] + l[1]) * (l[0] + l[2]) * (l[1] + l[2]);
            std::f64::consts::PI.powi(2) / 4.0 * p.sqrt()
        }
        VolumeGroup::SoNProduct => (0.5 * log_pair_product(l)).exp(),
    };
    Ok(VolumeResult {
        value,
        method: VolumeMethod::ClosedForm,
        std_error: 0.0,
        samples_or_nodes: 0,
        seed: None,
    })
}

/// V(s) / V(maximally mixed), computed in log space so large-N products do
/// not underflow. The maximum of every closed form sits at λⁱ = 1/N.
pub fn normalized_volume(group: VolumeGroup, s: &Spectrum) -> Result<f64> {
    expect_dim(group, s)?;
    let l = s.values();
    let n = s.dim() as f64;
    let v = match group {
        VolumeGroup::Su2 => 2.0 * (l[0] * l[1]).sqrt(),
        VolumeGroup::So2 => 1.0,
        VolumeGroup::So3 | VolumeGroup::SoNProduct => {
            let pairs = (s.dim() * (s.dim() - 1) / 2) as f64;
            let log_max = pairs * (2.0 / n).ln();
            (0.5 * (log_pair_product(l) - log_max)).exp()
        }
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Tensor-product Gauss–Legendre integration of √det g over the chart box.
pub fn quadrature_volume(
    s: &Spectrum,
    f: &UnitaryFamily,
    nodes_per_axis: usize,
) -> Result<VolumeResult> {
    let k = f.param_count();
    if k > MAX_QUADRATURE_PARAMS {
        return Err(Error::TooManyParameters {
            max: MAX_QUADRATURE_PARAMS,
            got: k,
        });
    }
    if nodes_per_axis == 0 {
        return Err(Error::EmptyRun);
    }
    // Fail early on mismatched dimensions.
    SqrtDetEvaluator::new(s, f)?;

    let axes: Vec<(Vec<f64>, Vec<f64>)> = f
        .parameter_domain()
        .iter()
        .map(|p| gauss_legendre_on(nodes_per_axis, p.lower, p.upper))
        .collect();
    let inner_total: u64 = (nodes_per_axis as u64).pow(k as u32 - 1);

    let partials: Result<Vec<f64>> = (0..nodes_per_axis)
        .into_par_iter()
        .map(|i0| {
            let mut ev = SqrtDetEvaluator::new(s, f)?;
            let mut xi = vec![0.0; k];
            xi[0] = axes[0].0[i0];
            let w0 = axes[0].1[i0];
            let mut acc = 0.0;
            for flat in 0..inner_total {
                let mut rem = flat;
                let mut weight = w0;
                for axis in 1..k {
                    let idx = (rem % nodes_per_axis as u64) as usize;
                    rem /= nodes_per_axis as u64;
                    xi[axis] = axes[axis].0[idx];
                    weight *= axes[axis].1[idx];
                }
                acc += weight * ev.eval(&xi)?;
            }
            Ok(acc)
        })
        .collect();

    Ok(VolumeResult {
        value: compensated_sum(partials?),
        method: VolumeMethod::Quadrature,
        std_error: 0.0,
        samples_or_nodes: (nodes_per_axis as u64).pow(k as u32),
        seed: None,
    })
}

/// Monte Carlo volume: box volume times the mean of √det g over uniform
/// draws. Deterministic given (seed, samples); the per-sample stream is
/// counter-based, so chunked parallel evaluation matches the serial result
/// bit for bit.
pub fn monte_carlo_volume(
    s: &Spectrum,
    f: &UnitaryFamily,
    samples: u64,
    seed: u64,
) -> Result<VolumeResult> {
    if samples == 0 {
        return Err(Error::EmptyRun);
    }
    SqrtDetEvaluator::new(s, f)?;
    let k = f.param_count();
    let domain: Vec<(f64, f64)> = f
        .parameter_domain()
        .iter()
        .map(|p| (p.lower, p.upper - p.lower))
        .collect();
    let box_volume = f.box_volume();

    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Result<Vec<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut ev = SqrtDetEvaluator::new(s, f)?;
            let mut xi = vec![0.0; k];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let end = ((chunk + 1) * MC_CHUNK).min(samples);
            for index in chunk * MC_CHUNK..end {
                let mut rng = item_rng(seed, index, k);
                for (x, &(lo, width)) in xi.iter_mut().zip(&domain) {
                    *x = lo + width * rng.random::<f64>();
                }
                let v = ev.eval(&xi)?;
                sum += v;
                sum_sq += v * v;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let partials = partials?;

    let sum = compensated_sum(partials.iter().map(|p| p.0));
    let sum_sq = compensated_sum(partials.iter().map(|p| p.1));
    let n = samples as f64;
    let mean = sum / n;
    let std_error = if samples > 1 {
        let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        box_volume * (variance / n).sqrt()
    } else {
        0.0
    };
    Ok(VolumeResult {
        value: box_volume * mean,
        method: VolumeMethod::MonteCarlo,
        std_error,
        samples_or_nodes: samples,
        seed: Some(seed),
    })
}
