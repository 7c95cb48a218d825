//! Purification families of a spectrum, their tangent frames, and the
//! Hermitian Gram metric they induce.
//!
//! Composite vectors live in H_E ⊗ H_S with component (e, s) stored at
//! position `e * N + s` (0-based, environment-major). A purification of the
//! diagonal density operator with spectrum λ⃗ is
//!
//! ```text
//! |Γ̄(ξ)⟩ = (U_E(ξ) ⊗ √ρ)|Γ⟩ = Σ_i √λⁱ (U_E(ξ)|i⟩_E) ⊗ |i⟩_S,
//! ```
//!
//! so its components are Γ̄_(e,s) = √λ^s U_{e,s}: the chart matrix with
//! columns scaled by √λ. Tangent vectors replace U by ∂U/∂ξ_k.

use num_complex::Complex64;

use crate::spectrum::Spectrum;
use crate::unitary::UnitaryFamily;
use crate::{CMatrix, CVector, Error, Result};

/// Clamp window for floating-point noise in the Gram determinant.
const DET_NEGATIVE_TOLERANCE: f64 = 1e-12;
const DET_IMAGINARY_TOLERANCE: f64 = 1e-10;

/// The unnormalized maximally entangled state Σ_i |i⟩_E |i⟩_S; norm² = N.
pub fn bell_state(dim: usize) -> Result<CVector> {
    if dim < 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bell state needs dimension >= 2, got {dim}"
        )));
    }
    let mut v = CVector::zeros(dim * dim);
    for i in 0..dim {
        v[i * dim + i] = Complex64::ONE;
    }
    Ok(v)
}

/// A point |Γ̄(ξ)⟩ of the purification family of a spectrum.
#[derive(Debug, Clone)]
pub struct PurificationPoint {
    pub state: CVector,
    pub spectrum: Spectrum,
    pub family: UnitaryFamily,
    pub xi: Vec<f64>,
}

/// Build the purification of `s` at chart point ξ.
pub fn purify(s: &Spectrum, f: &UnitaryFamily, xi: &[f64]) -> Result<PurificationPoint> {
    check_dims(s, f)?;
    let u = f.realize(xi)?;
    Ok(PurificationPoint {
        state: state_from_matrix(&u, s),
        spectrum: s.clone(),
        family: f.clone(),
        xi: xi.to_vec(),
    })
}

fn check_dims(s: &Spectrum, f: &UnitaryFamily) -> Result<()> {
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "spectrum dimension {} vs family dimension {}",
            s.dim(),
            f.dim()
        )));
    }
    Ok(())
}

/// Composite vector whose (e, s) component is √λ^s M_{e,s}.
fn state_from_matrix(m: &CMatrix, s: &Spectrum) -> CVector {
    let n = s.dim();
    let mut v = CVector::zeros(n * n);
    for (col, &l) in s.values().iter().enumerate() {
        let w = l.sqrt();
        for row in 0..n {
            v[row * n + col] = m[(row, col)] * w;
        }
    }
    v
}

/// Trace out the environment: (ρ_S)_{s,s'} = Σ_e p_(e,s) conj(p_(e,s')).
///
/// Accepts any composite vector whose length is a multiple of `dim`, so
/// embedded states with a larger environment work too.
pub fn partial_trace_e(p: &CVector, dim: usize) -> Result<CMatrix> {
    if dim == 0 || !p.len().is_multiple_of(dim) {
        return Err(Error::BadCompositeLength {
            len: p.len(),
            dim,
        });
    }
    let env = p.len() / dim;
    let mut rho = CMatrix::zeros(dim, dim);
    for e in 0..env {
        let base = e * dim;
        for s in 0..dim {
            let ps = p[base + s];
            for sp in 0..dim {
                rho[(s, sp)] += ps * p[base + sp].conj();
            }
        }
    }
    Ok(rho)
}

/// Isometrically embed into a larger environment of dimension `target`:
/// the first N environment basis vectors carry the state, the rest are zero.
pub fn embed_environment(p: &PurificationPoint, target: usize) -> Result<CVector> {
    let n = p.spectrum.dim();
    if target < n {
        return Err(Error::EmbeddingTooSmall { target, dim: n });
    }
    let mut out = CVector::zeros(target * n);
    for e in 0..n {
        for s in 0..n {
            out[e * n + s] = p.state[e * n + s];
        }
    }
    Ok(out)
}

/// The n tangent vectors |Γ̄_,k⟩ = (∂U/∂ξ_k ⊗ √ρ)|Γ⟩, from analytic chart
/// derivatives.
pub fn tangent_frame(s: &Spectrum, f: &UnitaryFamily, xi: &[f64]) -> Result<Vec<CVector>> {
    check_dims(s, f)?;
    f.validate(xi)?;
    let mut frame = Vec::with_capacity(f.param_count());
    let mut d = CMatrix::identity(f.dim(), f.dim());
    for k in 0..f.param_count() {
        f.derivative_into(xi, k, &mut d);
        frame.push(state_from_matrix(&d, s));
    }
    Ok(frame)
}

/// The first fundamental form of the purification family at one point.
#[derive(Debug, Clone)]
pub struct GramMetric {
    /// Hermitian matrix g_ij = ⟨Γ̄_,i|Γ̄_,j⟩, row index on the conjugated side.
    pub g: CMatrix,
    /// Real determinant, clamped to 0 when within −1e-12.
    pub det: f64,
    /// √max(det, 0): the volume element density at this chart point.
    pub sqrt_det: f64,
}

/// Gram metric of the purification family of `s` at ξ.
pub fn gram_metric(s: &Spectrum, f: &UnitaryFamily, xi: &[f64]) -> Result<GramMetric> {
    check_dims(s, f)?;
    f.validate(xi)?;
    let mut ev = SqrtDetEvaluator::new(s, f)?;
    ev.fill_derivatives(xi);
    let g = ev.gram_matrix();
    let det = real_determinant(&g)?;
    Ok(GramMetric {
        g,
        det,
        sqrt_det: det.max(0.0).sqrt(),
    })
}

/// Extract the (real) determinant of a Hermitian Gram matrix, rejecting
/// results whose imaginary part or negativity exceed floating-point noise.
fn real_determinant(g: &CMatrix) -> Result<f64> {
    let mut lu = g.clone();
    let det = det_in_place(&mut lu);
    if det.im.abs() > DET_IMAGINARY_TOLERANCE {
        return Err(Error::ComplexDeterminant(det.im));
    }
    let re = det.re;
    if re < -DET_NEGATIVE_TOLERANCE {
        return Err(Error::NegativeDeterminant(re));
    }
    Ok(re.max(0.0))
}

/// Pivot magnitudes below `scale * RANK_TOLERANCE` are elimination residue of
/// an exactly singular Gram matrix (a rank-deficient tangent frame), not tiny
/// volumes; they force the determinant to exact zero.
const RANK_TOLERANCE: f64 = 1e-13;

/// In-place LU determinant with partial pivoting and rank detection.
fn det_in_place(m: &mut CMatrix) -> Complex64 {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Complex64::ZERO;
    }
    let cutoff = (scale * RANK_TOLERANCE).powi(2);
    let mut det = Complex64::ONE;
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[(col, col)].norm_sqr();
        for row in (col + 1)..n {
            let mag = m[(row, col)].norm_sqr();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best <= cutoff {
            return Complex64::ZERO;
        }
        if pivot != col {
            m.swap_rows(pivot, col);
            det = -det;
        }
        let diag = m[(col, col)];
        det *= diag;
        for row in (col + 1)..n {
            let factor = m[(row, col)] / diag;
            for c in (col + 1)..n {
                let sub = factor * m[(col, c)];
                m[(row, c)] -= sub;
            }
        }
    }
    det
}

/// Allocation-free evaluator of √det g over a fixed (spectrum, family) pair,
/// for integrators that sweep many chart points.
pub struct SqrtDetEvaluator {
    family: UnitaryFamily,
    lambda: Vec<f64>,
    entries: Vec<[Complex64; 4]>,
    derivs: Vec<CMatrix>,
    gram: CMatrix,
    lu: CMatrix,
}

impl SqrtDetEvaluator {
    pub fn new(s: &Spectrum, f: &UnitaryFamily) -> Result<Self> {
        check_dims(s, f)?;
        let n = f.dim();
        let k = f.param_count();
        Ok(SqrtDetEvaluator {
            family: f.clone(),
            lambda: s.values().to_vec(),
            entries: Vec::new(),
            derivs: vec![CMatrix::zeros(n, n); k],
            gram: CMatrix::zeros(k, k),
            lu: CMatrix::zeros(k, k),
        })
    }

    pub fn eval(&mut self, xi: &[f64]) -> Result<f64> {
        self.family.validate(xi)?;
        self.fill_derivatives(xi);
        self.fill_gram();
        self.lu.copy_from(&self.gram);
        let det = det_in_place(&mut self.lu);
        if det.im.abs() > DET_IMAGINARY_TOLERANCE {
            return Err(Error::ComplexDeterminant(det.im));
        }
        if det.re < -DET_NEGATIVE_TOLERANCE {
            return Err(Error::NegativeDeterminant(det.re));
        }
        Ok(det.re.max(0.0).sqrt())
    }

    fn fill_derivatives(&mut self, xi: &[f64]) {
        self.family.cache_factor_entries(xi, &mut self.entries);
        for (k, d) in self.derivs.iter_mut().enumerate() {
            self.family.derivative_into_cached(xi, k, &self.entries, d);
        }
    }

    // g_ab = Σ_s λ_s ⟨∂_a U col s, ∂_b U col s⟩: the λ-weighted column dot,
    // over contiguous column-major storage.
    fn fill_gram(&mut self) {
        let k = self.derivs.len();
        let n = self.lambda.len();
        for a in 0..k {
            for b in a..k {
                let da = self.derivs[a].as_slice();
                let db = self.derivs[b].as_slice();
                let mut acc = Complex64::ZERO;
                for (s, &l) in self.lambda.iter().enumerate() {
                    let mut col = Complex64::ZERO;
                    for r in s * n..(s + 1) * n {
                        col += da[r].conj() * db[r];
                    }
                    acc += col * l;
                }
                self.gram[(a, b)] = acc;
                self.gram[(b, a)] = acc.conj();
            }
        }
    }

    fn gram_matrix(&mut self) -> CMatrix {
        self.fill_gram();
        self.gram.clone()
    }
}
