//! Discretization of the probability simplex into equal-area cells,
//! macrostate binning of those cells by normalized volume or entropy, and
//! uniform simplex sampling.
//!
//! The 2-simplex is gridded in the η coordinates of the area-preserving map
//! λ = (1−√η¹, √η¹(1−η²), √η¹η²) with η in the unit square: dividing each
//! η axis into ℓ equal segments yields ℓ² cells ρ_l of equal simplex area,
//! with the observable evaluated at each square's center.

use rand::Rng;
use rayon::prelude::*;

use crate::spectrum::{normalized_linear, normalized_von_neumann, Spectrum};
use crate::stream::item_rng;
use crate::volume::{normalized_volume, VolumeGroup};
use crate::{Error, Result};

/// Per-cell observable used to sort cells into macrostate segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Normalized SO(3) purification-family volume.
    Volume,
    /// Normalized von Neumann entropy.
    VonNeumann,
    /// Normalized linear entropy.
    Linear,
}

/// The normalized observable at one spectrum; every value lands in `[0, 1]`.
pub fn observable_value(obs: Observable, s: &Spectrum) -> Result<f64> {
    Ok(match obs {
        Observable::Volume => normalized_volume(VolumeGroup::So3, s)?,
        Observable::VonNeumann => normalized_von_neumann(s),
        Observable::Linear => normalized_linear(s),
    })
}

/// One grid cell: η-center, its λ image, and the 1-based cell id.
#[derive(Debug, Clone)]
pub struct SimplexCell {
    pub id: usize,
    pub eta: [f64; 2],
    pub lambda: Spectrum,
}

/// Equal-area discretization of the 2-simplex.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    pub ell: usize,
    pub weyl_filter: bool,
    pub cells: Vec<SimplexCell>,
}

/// Map one η point to its simplex point.
pub fn eta_to_lambda(eta1: f64, eta2: f64) -> Result<Spectrum> {
    let r = eta1.sqrt();
    Spectrum::new(vec![1.0 - r, r * (1.0 - eta2), r * eta2])
}

/// Build the ℓ×ℓ grid of η-square centers. With the Weyl filter on, only
/// cells with η¹ ∈ (1/4, 1] and η² ∈ (1/2, 1] are retained, selecting a
/// fundamental chamber free of the triangular distortions of the λ map.
pub fn build_grid(ell: usize, weyl_filter: bool) -> Result<SimplexGrid> {
    if ell == 0 {
        return Err(Error::EmptyRun);
    }
    let mut cells = Vec::new();
    for a in 0..ell {
        let eta1 = (2 * a + 1) as f64 / (2 * ell) as f64;
        for b in 0..ell {
            let eta2 = (2 * b + 1) as f64 / (2 * ell) as f64;
            if weyl_filter && !(eta1 > 0.25 && eta2 > 0.5) {
                continue;
            }
            cells.push(SimplexCell {
                id: a * ell + b + 1,
                eta: [eta1, eta2],
                lambda: eta_to_lambda(eta1, eta2)?,
            });
        }
    }
    Ok(SimplexGrid {
        ell,
        weyl_filter,
        cells,
    })
}

/// Macrostate segments: cells binned by observable value into k equal-length
/// intervals of `[0, 1]`, with per-segment occupation fractions and average
/// normalized von Neumann entropy.
#[derive(Debug, Clone)]
pub struct MacrostateBinning {
    pub k: usize,
    pub observable: Observable,
    /// (cell id, 1-based segment index), in grid cell order.
    pub assignments: Vec<(usize, usize)>,
    /// Fraction of retained cells per segment; sums to 1.
    pub fractions: Vec<f64>,
    /// Mean normalized von Neumann entropy per segment; `None` when empty.
    pub avg_svn: Vec<Option<f64>>,
}

/// Segment index for a normalized value: half-open bins ((a−1)/k, a/k] with
/// 0 assigned to the first segment and 1 landing in segment k.
fn segment_of(value: f64, k: usize) -> usize {
    ((value * k as f64).ceil() as usize).clamp(1, k)
}

/// Sort the grid cells into k macrostate segments by the chosen observable.
pub fn bin_cells(grid: &SimplexGrid, observable: Observable, k: usize) -> Result<MacrostateBinning> {
    if k == 0 || grid.cells.is_empty() {
        return Err(Error::EmptyRun);
    }
    let values: Result<Vec<(f64, f64)>> = grid
        .cells
        .par_iter()
        .map(|cell| {
            Ok((
                observable_value(observable, &cell.lambda)?,
                normalized_von_neumann(&cell.lambda),
            ))
        })
        .collect();
    let values = values?;

    let mut assignments = Vec::with_capacity(grid.cells.len());
    let mut counts = vec![0usize; k];
    let mut svn_sums = vec![0.0; k];
    for (cell, &(value, svn)) in grid.cells.iter().zip(&values) {
        let seg = segment_of(value, k);
        assignments.push((cell.id, seg));
        counts[seg - 1] += 1;
        svn_sums[seg - 1] += svn;
    }
    let total = grid.cells.len() as f64;
    let fractions = counts.iter().map(|&c| c as f64 / total).collect();
    let avg_svn = counts
        .iter()
        .zip(&svn_sums)
        .map(|(&c, &sum)| (c > 0).then(|| sum / c as f64))
        .collect();
    Ok(MacrostateBinning {
        k,
        observable,
        assignments,
        fractions,
        avg_svn,
    })
}

/// Uniform samples on the (N−1)-simplex by stick breaking:
/// λ_k = r_{k−1}(1 − u_k^{1/(N−k)}), λ_N = r_{N−1}. At N = 3 this is exactly
/// the η map of [`eta_to_lambda`].
pub fn sample_simplex(dim: usize, count: usize, seed: u64) -> Result<Vec<Spectrum>> {
    if dim < 2 {
        return Err(Error::SpectrumTooShort(dim));
    }
    (0..count as u64)
        .map(|index| {
            let mut rng = item_rng(seed, index, dim - 1);
            let mut values = Vec::with_capacity(dim);
            let mut remaining = 1.0;
            for k in 1..dim {
                let u: f64 = rng.random();
                let part = remaining * (1.0 - u.powf(1.0 / (dim - k) as f64));
                values.push(part);
                remaining -= part;
            }
            values.push(remaining.max(0.0));
            Spectrum::new(values)
        })
        .collect()
}
