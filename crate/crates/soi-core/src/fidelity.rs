//! Purification families over rotated eigenbases and the Uhlmann–Jozsa
//! fidelity, both in closed form and as an optimization over two
//! purification families.
//!
//! A rotated state σ = U_S diag(λ⃗) U_S† is purified through the rotated
//! Bell construction |Γ̄^σ(ξ)⟩ = (U_E(ξ) ⊗ √σ)|Γ^σ⟩ with
//! |Γ^σ⟩ = Σ_i (U_S|i⟩)_E (U_S|i⟩)_S. The overlap of two such purifications
//! is |Tr[M_ρ† M_σ]|² with M = U_E U_S diag(√λ) U_Sᵀ, and its maximum over
//! both charts is the fidelity.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectrum::Spectrum;
use crate::stream::item_rng;
use crate::unitary::UnitaryFamily;
use crate::{CMatrix, CVector, Error, Result};
use rand::Rng;

const UNITARY_TOLERANCE: f64 = 1e-12;

/// A density operator given by its spectrum and the unitary rotating the
/// computational basis into its eigenbasis.
#[derive(Debug, Clone)]
pub struct RotatedState {
    spectrum: Spectrum,
    basis_rotation: CMatrix,
}

impl RotatedState {
    pub fn new(spectrum: Spectrum, basis_rotation: CMatrix) -> Result<Self> {
        let n = spectrum.dim();
        if basis_rotation.nrows() != n || basis_rotation.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis rotation is {}x{}, spectrum dimension is {n}",
                basis_rotation.nrows(),
                basis_rotation.ncols()
            )));
        }
        let gram = basis_rotation.adjoint() * &basis_rotation;
        let dev = (&gram - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(RotatedState {
            spectrum,
            basis_rotation,
        })
    }

    /// A state diagonal in the computational basis.
    pub fn diagonal(spectrum: Spectrum) -> Self {
        let n = spectrum.dim();
        RotatedState {
            spectrum,
            basis_rotation: CMatrix::identity(n, n),
        }
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn basis_rotation(&self) -> &CMatrix {
        &self.basis_rotation
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// σ = U_S diag(λ) U_S†.
    pub fn density(&self) -> CMatrix {
        self.weighted_similarity(|l| l)
    }

    /// √σ = U_S diag(√λ) U_S†.
    pub fn sqrt_density(&self) -> CMatrix {
        self.weighted_similarity(f64::sqrt)
    }

    fn weighted_similarity(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.basis_rotation.clone();
        for (col, &l) in self.spectrum.values().iter().enumerate() {
            let w = Complex64::new(f(l), 0.0);
            for row in 0..n {
                scaled[(row, col)] *= w;
            }
        }
        scaled * self.basis_rotation.adjoint()
    }

    /// The purification matrix M(ξ) = U_E(ξ) U_S diag(√λ) U_Sᵀ whose entries
    /// are the composite components M_{e,s} = Γ̄_(e,s).
    fn bell_factor(&self) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.basis_rotation.clone();
        for (col, &l) in self.spectrum.values().iter().enumerate() {
            let w = Complex64::new(l.sqrt(), 0.0);
            for row in 0..n {
                scaled[(row, col)] *= w;
            }
        }
        scaled * self.basis_rotation.transpose()
    }
}

/// Purification of a rotated state at environment-chart point ξ.
pub fn purify_rotated(r: &RotatedState, f: &UnitaryFamily, xi: &[f64]) -> Result<CVector> {
    if r.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs family dimension {}",
            r.dim(),
            f.dim()
        )));
    }
    let m = f.realize(xi)? * r.bell_factor();
    let n = r.dim();
    let mut state = CVector::zeros(n * n);
    for e in 0..n {
        for s in 0..n {
            state[e * n + s] = m[(e, s)];
        }
    }
    Ok(state)
}

/// Uhlmann–Jozsa fidelity from the analytic optimum: the squared sum of the
/// singular values of √ρ√σ. Symmetric in its arguments.
pub fn fidelity_closed(rho: &RotatedState, sigma: &RotatedState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimensions {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let a = rho.sqrt_density() * sigma.sqrt_density();
    // Singular values via the Hermitian PSD matrix A†A.
    let h = a.adjoint() * &a;
    let eig = h.symmetric_eigen();
    let trace_norm: f64 = eig
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// Best value found over both purification families, with the chart points
/// achieving it.
#[derive(Debug, Clone)]
pub struct SoiMaximizeResult {
    pub value: f64,
    pub xi_rho: Vec<f64>,
    pub xi_sigma: Vec<f64>,
}

/// Knobs of the derivative-free search in [`fidelity_soi_maximize_with`].
#[derive(Debug, Clone)]
pub struct SoiSearchOptions {
    /// Number of random starts.
    pub starts: usize,
    /// Coordinate sweeps per start.
    pub sweeps: usize,
    /// Keep ξ_ρ pinned at 0 and search only the σ chart.
    pub freeze_rho: bool,
}

impl Default for SoiSearchOptions {
    fn default() -> Self {
        SoiSearchOptions {
            starts: 20,
            sweeps: 200,
            freeze_rho: false,
        }
    }
}

/// Maximize |⟨Γ̄^ρ(ξ_ρ)|Γ̄^σ(ξ_σ)⟩|² over the full U(N) environment chart of
/// both families, from `budget` random starts.
pub fn fidelity_soi_maximize(
    rho: &RotatedState,
    sigma: &RotatedState,
    budget: usize,
    seed: u64,
) -> Result<SoiMaximizeResult> {
    let family = UnitaryFamily::u(rho.dim())?;
    let opts = SoiSearchOptions {
        starts: budget,
        ..SoiSearchOptions::default()
    };
    fidelity_soi_maximize_with(rho, sigma, &family, &opts, seed)
}

/// Same search over an arbitrary environment chart. Restricting the chart
/// (SO(N) instead of U(N)) generally undershoots the fidelity.
pub fn fidelity_soi_maximize_with(
    rho: &RotatedState,
    sigma: &RotatedState,
    env_family: &UnitaryFamily,
    opts: &SoiSearchOptions,
    seed: u64,
) -> Result<SoiMaximizeResult> {
    if rho.dim() != sigma.dim() || rho.dim() != env_family.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimensions {} / {} vs family dimension {}",
            rho.dim(),
            sigma.dim(),
            env_family.dim()
        )));
    }
    if opts.starts == 0 {
        return Err(Error::EmptyRun);
    }

    let k = env_family.param_count();
    let rho_params = if opts.freeze_rho { 0 } else { k };
    let dims = rho_params + k;
    let bounds: Vec<(f64, f64)> = env_family
        .parameter_domain()
        .iter()
        .chain(env_family.parameter_domain())
        .skip(if opts.freeze_rho { k } else { 0 })
        .map(|p| (p.lower, p.upper))
        .collect();

    let b_rho = rho.bell_factor();
    let b_sigma = sigma.bell_factor();

    let runs: Result<Vec<(f64, Vec<f64>)>> = (0..opts.starts as u64)
        .into_par_iter()
        .map(|start| {
            let mut objective = Overlap::new(env_family, &b_rho, &b_sigma, opts.freeze_rho);
            let mut rng = item_rng(seed, start, dims);
            let theta: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            pattern_search(&mut objective, &bounds, theta, opts.sweeps)
        })
        .collect();

    // Deterministic reduction: strict improvement keeps the lowest start.
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (value, theta) in runs? {
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, theta));
        }
    }
    let (value, theta) = best.expect("at least one start");
    let (xi_rho, xi_sigma) = if opts.freeze_rho {
        (vec![0.0; k], theta)
    } else {
        let (a, b) = theta.split_at(k);
        (a.to_vec(), b.to_vec())
    };
    Ok(SoiMaximizeResult {
        value,
        xi_rho,
        xi_sigma,
    })
}

/// Squared purification overlap as a function of the concatenated chart
/// parameters, with reusable buffers.
struct Overlap<'a> {
    family: &'a UnitaryFamily,
    b_rho: &'a CMatrix,
    b_sigma: &'a CMatrix,
    freeze_rho: bool,
    u_rho: CMatrix,
    u_sigma: CMatrix,
    m_rho: CMatrix,
    m_sigma: CMatrix,
}

impl<'a> Overlap<'a> {
    fn new(
        family: &'a UnitaryFamily,
        b_rho: &'a CMatrix,
        b_sigma: &'a CMatrix,
        freeze_rho: bool,
    ) -> Self {
        let n = family.dim();
        Overlap {
            family,
            b_rho,
            b_sigma,
            freeze_rho,
            u_rho: CMatrix::identity(n, n),
            u_sigma: CMatrix::identity(n, n),
            m_rho: CMatrix::zeros(n, n),
            m_sigma: CMatrix::zeros(n, n),
        }
    }

    fn eval(&mut self, theta: &[f64]) -> Result<f64> {
        let k = self.family.param_count();
        if self.freeze_rho {
            self.family.validate(theta)?;
            self.u_rho.fill_with_identity();
            self.family.realize_into(theta, &mut self.u_sigma);
        } else {
            let (xi_rho, xi_sigma) = theta.split_at(k);
            self.family.validate(xi_rho)?;
            self.family.validate(xi_sigma)?;
            self.family.realize_into(xi_rho, &mut self.u_rho);
            self.family.realize_into(xi_sigma, &mut self.u_sigma);
        }
        self.u_rho.mul_to(self.b_rho, &mut self.m_rho);
        self.u_sigma.mul_to(self.b_sigma, &mut self.m_sigma);
        // ⟨Γ̄^ρ|Γ̄^σ⟩ = Tr[M_ρ† M_σ] = Σ_{e,s} conj(M_ρ) M_σ.
        let mut overlap = Complex64::ZERO;
        for (a, b) in self.m_rho.iter().zip(self.m_sigma.iter()) {
            overlap += a.conj() * b;
        }
        Ok(overlap.norm_sqr().min(1.0))
    }
}

/// Coordinate descent with shrinking steps, clamped to the box.
fn pattern_search(
    objective: &mut Overlap,
    bounds: &[(f64, f64)],
    mut theta: Vec<f64>,
    sweeps: usize,
) -> Result<(f64, Vec<f64>)> {
    let mut steps: Vec<f64> = bounds.iter().map(|&(lo, hi)| 0.25 * (hi - lo)).collect();
    let mut best = objective.eval(&theta)?;
    for _ in 0..sweeps {
        let mut improved = false;
        for c in 0..theta.len() {
            let original = theta[c];
            for dir in [1.0, -1.0] {
                let candidate = (original + dir * steps[c]).clamp(bounds[c].0, bounds[c].1);
                if candidate == original {
                    continue;
                }
                theta[c] = candidate;
                let value = objective.eval(&theta)?;
                if value > best {
                    best = value;
                    improved = true;
                    break;
                }
                theta[c] = original;
            }
        }
        if !improved {
            steps.iter_mut().for_each(|s| *s *= 0.5);
            if steps.iter().all(|&s| s < 1e-10) {
                break;
            }
        }
    }
    Ok((best, theta))
}
