//! N-dimensional unitaries factored into two-dimensional plane rotations,
//! with analytic derivatives with respect to every chart parameter.
//!
//! A factor E^(i,j)(φ, ψ, χ) acts on the (i, j) coordinate plane:
//!
//! ```text
//! E_ii = e^{iψ} cos φ    E_ij =  e^{iχ} sin φ
//! E_ji = −e^{−iχ} sin φ  E_jj =  e^{−iψ} cos φ
//! ```
//!
//! and is the identity elsewhere. The full chart is the ordered product
//! U = e^{iα} E₁ E₂ … E_{N−1} with E₁ = E^(1,2) and block E_m running
//! E^(m,m+1) E^(m−1,m+1) … E^(1,m+1); only the E^(1,m) factor of each block
//! carries a χ angle. φ ranges over [0, π/2], all phases over [0, 2π].

use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

const PHI_MAX: f64 = std::f64::consts::FRAC_PI_2;
const PHASE_MAX: f64 = std::f64::consts::TAU;

/// Chart tag: which Lie group the factored family realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Full U(N): N² parameters including the global phase α.
    UN,
    /// SU(2): the single (1,2) factor with φ, ψ, χ and no global phase.
    SU2,
    /// SO(N): all phases fixed to zero, N(N−1)/2 plane angles.
    SON,
}

/// One plane rotation with concrete angles. Indices are 1-based, i < j ≤ N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRotation {
    pub i: usize,
    pub j: usize,
    pub phi: f64,
    pub psi: f64,
    pub chi: f64,
}

impl PlaneRotation {
    pub fn new(i: usize, j: usize, dim: usize, phi: f64, psi: f64, chi: f64) -> Result<Self> {
        if i == 0 || i >= j || j > dim {
            return Err(Error::InvalidPlane { i, j, dim });
        }
        Ok(PlaneRotation { i, j, phi, psi, chi })
    }

    /// The four nonzero off-identity entries (E_ii, E_ij, E_ji, E_jj).
    fn entries(&self) -> [Complex64; 4] {
        plane_entries(self.phi, self.psi, self.chi)
    }

    /// Realize the rotation as a dense `dim × dim` matrix.
    pub fn matrix(&self, dim: usize) -> Result<CMatrix> {
        if self.j > dim {
            return Err(Error::InvalidPlane {
                i: self.i,
                j: self.j,
                dim,
            });
        }
        let mut m = CMatrix::identity(dim, dim);
        let [eii, eij, eji, ejj] = self.entries();
        let (i, j) = (self.i - 1, self.j - 1);
        m[(i, i)] = eii;
        m[(i, j)] = eij;
        m[(j, i)] = eji;
        m[(j, j)] = ejj;
        Ok(m)
    }
}

fn plane_entries(phi: f64, psi: f64, chi: f64) -> [Complex64; 4] {
    let (sphi, cphi) = phi.sin_cos();
    let epsi = Complex64::from_polar(1.0, psi);
    let echi = Complex64::from_polar(1.0, chi);
    [
        epsi * cphi,
        echi * sphi,
        -echi.conj() * sphi,
        epsi.conj() * cphi,
    ]
}

/// Entries of ∂E/∂angle for one factor.
fn plane_entries_derivative(phi: f64, psi: f64, chi: f64, angle: Angle) -> [Complex64; 4] {
    let (sphi, cphi) = phi.sin_cos();
    let epsi = Complex64::from_polar(1.0, psi);
    let echi = Complex64::from_polar(1.0, chi);
    let i = Complex64::i();
    match angle {
        Angle::Phi => [
            -epsi * sphi,
            echi * cphi,
            -echi.conj() * cphi,
            -epsi.conj() * sphi,
        ],
        Angle::Psi => [
            i * epsi * cphi,
            Complex64::ZERO,
            Complex64::ZERO,
            -i * epsi.conj() * cphi,
        ],
        Angle::Chi => [
            Complex64::ZERO,
            i * echi * sphi,
            i * echi.conj() * sphi,
            Complex64::ZERO,
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Angle {
    Phi,
    Psi,
    Chi,
}

/// Position of a factor in the product along with the chart-parameter index
/// feeding each of its angles. `None` pins the angle to zero.
#[derive(Debug, Clone, Copy)]
struct FactorSpec {
    /// 0-based plane indices into the matrix.
    i: usize,
    j: usize,
    phi: usize,
    psi: Option<usize>,
    chi: Option<usize>,
}

/// Name and closed interval of one chart parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// A factorized, parameterized unitary family: the chart ξ ↦ U(ξ).
#[derive(Debug, Clone)]
pub struct UnitaryFamily {
    group: Group,
    dim: usize,
    factors: Vec<FactorSpec>,
    alpha: Option<usize>,
    params: Vec<ParamRange>,
}

impl UnitaryFamily {
    /// Full U(N) chart: α plus (φ, ψ) per plane and χ on the (1, m) planes.
    pub fn u(dim: usize) -> Result<Self> {
        Self::build(Group::UN, dim)
    }

    /// The SU(2) chart (φ, ψ, χ).
    pub fn su2() -> Self {
        Self::build(Group::SU2, 2).expect("SU(2) chart is always valid")
    }

    /// The SO(N) chart: plane angles only, everything real.
    pub fn so(dim: usize) -> Result<Self> {
        Self::build(Group::SON, dim)
    }

    fn build(group: Group, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionMismatch(format!(
                "unitary family needs dimension >= 2, got {dim}"
            )));
        }
        if group == Group::SU2 && dim != 2 {
            return Err(Error::DimensionMismatch(format!(
                "SU(2) chart is 2-dimensional, got {dim}"
            )));
        }
        let mut params = Vec::new();
        let alpha = match group {
            Group::UN => {
                params.push(ParamRange {
                    name: "alpha".into(),
                    lower: 0.0,
                    upper: PHASE_MAX,
                });
                Some(0)
            }
            _ => None,
        };

        // Parameter vector ordering: lexicographic in the plane (i, j), angles
        // phi, psi, chi within a plane. Factor ordering (below) differs.
        let mut phi_idx = vec![vec![usize::MAX; dim + 1]; dim + 1];
        let mut psi_idx = vec![vec![None; dim + 1]; dim + 1];
        let mut chi_idx = vec![vec![None; dim + 1]; dim + 1];
        for i in 1..dim {
            for j in (i + 1)..=dim {
                let sub = |angle: &str| {
                    if group == Group::SU2 {
                        angle.to_string()
                    } else {
                        format!("{angle}_{i}_{j}")
                    }
                };
                phi_idx[i][j] = params.len();
                params.push(ParamRange {
                    name: sub("phi"),
                    lower: 0.0,
                    upper: PHI_MAX,
                });
                if group != Group::SON {
                    psi_idx[i][j] = Some(params.len());
                    params.push(ParamRange {
                        name: sub("psi"),
                        lower: 0.0,
                        upper: PHASE_MAX,
                    });
                    if i == 1 {
                        chi_idx[i][j] = Some(params.len());
                        params.push(ParamRange {
                            name: sub("chi"),
                            lower: 0.0,
                            upper: PHASE_MAX,
                        });
                    }
                }
            }
        }

        // Product ordering: block m realizes planes (m, m+1), (m−1, m+1), ...,
        // (1, m+1), blocks multiplied left to right.
        let mut factors = Vec::new();
        for block in 1..dim {
            let j = block + 1;
            for i in (1..=block).rev() {
                factors.push(FactorSpec {
                    i: i - 1,
                    j: j - 1,
                    phi: phi_idx[i][j],
                    psi: psi_idx[i][j],
                    chi: chi_idx[i][j],
                });
            }
        }

        Ok(UnitaryFamily {
            group,
            dim,
            factors,
            alpha,
            params,
        })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Ordered (name, lower, upper) description of the chart box.
    pub fn parameter_domain(&self) -> &[ParamRange] {
        &self.params
    }

    /// Product of the interval lengths: the coordinate-box volume.
    pub fn box_volume(&self) -> f64 {
        self.params.iter().map(|p| p.upper - p.lower).product()
    }

    /// The concrete plane rotations realizing ξ, in product order.
    pub fn factor_layout(&self, xi: &[f64]) -> Result<Vec<PlaneRotation>> {
        self.validate(xi)?;
        Ok(self
            .factors
            .iter()
            .map(|f| PlaneRotation {
                i: f.i + 1,
                j: f.j + 1,
                phi: xi[f.phi],
                psi: f.psi.map_or(0.0, |k| xi[k]),
                chi: f.chi.map_or(0.0, |k| xi[k]),
            })
            .collect())
    }

    pub fn validate(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.params.len() {
            return Err(Error::ParameterCount {
                expected: self.params.len(),
                got: xi.len(),
            });
        }
        for (value, range) in xi.iter().zip(&self.params) {
            if !(range.lower..=range.upper).contains(value) || value.is_nan() {
                return Err(Error::ParameterOutOfRange {
                    name: range.name.clone(),
                    value: *value,
                    lower: range.lower,
                    upper: range.upper,
                });
            }
        }
        Ok(())
    }

    /// U(ξ) = e^{iα} E₁ E₂ … E_{N−1}.
    pub fn realize(&self, xi: &[f64]) -> Result<CMatrix> {
        self.validate(xi)?;
        let mut u = CMatrix::identity(self.dim, self.dim);
        self.realize_into(xi, &mut u);
        Ok(u)
    }

    /// ∂U/∂ξ_k: only the factor carrying ξ_k is differentiated.
    pub fn derivative(&self, xi: &[f64], k: usize) -> Result<CMatrix> {
        self.validate(xi)?;
        if k >= self.params.len() {
            return Err(Error::ParameterIndex {
                index: k,
                count: self.params.len(),
            });
        }
        let mut out = CMatrix::identity(self.dim, self.dim);
        self.derivative_into(xi, k, &mut out);
        Ok(out)
    }

    /// U and all partial derivatives in one pass (validated once).
    pub fn realize_with_derivatives(&self, xi: &[f64]) -> Result<(CMatrix, Vec<CMatrix>)> {
        self.validate(xi)?;
        let mut u = CMatrix::identity(self.dim, self.dim);
        self.realize_into(xi, &mut u);
        let mut derivs = Vec::with_capacity(self.params.len());
        for k in 0..self.params.len() {
            let mut d = CMatrix::identity(self.dim, self.dim);
            self.derivative_into(xi, k, &mut d);
            derivs.push(d);
        }
        Ok((u, derivs))
    }

    /// Fill `out` (any content) with U(ξ). Assumes ξ validated.
    pub(crate) fn realize_into(&self, xi: &[f64], out: &mut CMatrix) {
        out.fill_with_identity();
        for f in &self.factors {
            let e = plane_entries(
                xi[f.phi],
                f.psi.map_or(0.0, |k| xi[k]),
                f.chi.map_or(0.0, |k| xi[k]),
            );
            apply_factor_columns(out, f.i, f.j, e);
        }
        if let Some(a) = self.alpha {
            let phase = Complex64::from_polar(1.0, xi[a]);
            out.iter_mut().for_each(|z| *z *= phase);
        }
    }

    /// Fill `out` with ∂U/∂ξ_k. Assumes ξ validated and k in range.
    pub(crate) fn derivative_into(&self, xi: &[f64], k: usize, out: &mut CMatrix) {
        let mut cache = Vec::with_capacity(self.factors.len());
        self.cache_factor_entries(xi, &mut cache);
        self.derivative_into_cached(xi, k, &cache, out);
    }

    /// Per-factor entry table for one ξ, reused across all derivatives.
    pub(crate) fn cache_factor_entries(&self, xi: &[f64], cache: &mut Vec<[Complex64; 4]>) {
        cache.clear();
        cache.extend(self.factors.iter().map(|f| {
            plane_entries(
                xi[f.phi],
                f.psi.map_or(0.0, |idx| xi[idx]),
                f.chi.map_or(0.0, |idx| xi[idx]),
            )
        }));
    }

    /// As [`Self::derivative_into`], with the factor entries precomputed.
    pub(crate) fn derivative_into_cached(
        &self,
        xi: &[f64],
        k: usize,
        cache: &[[Complex64; 4]],
        out: &mut CMatrix,
    ) {
        if self.alpha == Some(k) {
            // ∂(e^{iα}P)/∂α = i e^{iα} P = i U.
            self.realize_into(xi, out);
            let i = Complex64::i();
            out.iter_mut().for_each(|z| *z *= i);
            return;
        }
        out.fill_with_identity();
        for (f, entries) in self.factors.iter().zip(cache) {
            let owned = if f.phi == k {
                Some(Angle::Phi)
            } else if f.psi == Some(k) {
                Some(Angle::Psi)
            } else if f.chi == Some(k) {
                Some(Angle::Chi)
            } else {
                None
            };
            match owned {
                Some(angle) => {
                    let de = plane_entries_derivative(
                        xi[f.phi],
                        f.psi.map_or(0.0, |idx| xi[idx]),
                        f.chi.map_or(0.0, |idx| xi[idx]),
                        angle,
                    );
                    apply_derivative_factor_columns(out, f.i, f.j, de);
                }
                None => apply_factor_columns(out, f.i, f.j, *entries),
            }
        }
        if let Some(a) = self.alpha {
            let phase = Complex64::from_polar(1.0, xi[a]);
            out.iter_mut().for_each(|z| *z *= phase);
        }
    }
}

// acc ← acc · E touches only columns i and j; the storage is column-major,
// so both columns are contiguous slices.
fn apply_factor_columns(m: &mut CMatrix, i: usize, j: usize, e: [Complex64; 4]) {
    let [eii, eij, eji, ejj] = e;
    let n = m.nrows();
    let s = m.as_mut_slice();
    let (i0, j0) = (i * n, j * n);
    for r in 0..n {
        let ci = s[i0 + r];
        let cj = s[j0 + r];
        s[i0 + r] = ci * eii + cj * eji;
        s[j0 + r] = ci * eij + cj * ejj;
    }
}

// acc ← acc · ∂E: the derivative factor is zero outside the plane, so every
// other column of the product vanishes.
fn apply_derivative_factor_columns(m: &mut CMatrix, i: usize, j: usize, de: [Complex64; 4]) {
    let [dii, dij, dji, djj] = de;
    let n = m.nrows();
    let s = m.as_mut_slice();
    let (i0, j0) = (i * n, j * n);
    for r in 0..n {
        let ci = s[i0 + r];
        let cj = s[j0 + r];
        s[i0 + r] = ci * dii + cj * dji;
        s[j0 + r] = ci * dij + cj * djj;
    }
    for (c, chunk) in s.chunks_exact_mut(n).enumerate() {
        if c != i && c != j {
            chunk.fill(Complex64::ZERO);
        }
    }
}
