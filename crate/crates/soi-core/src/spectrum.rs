//! Eigenvalue spectra on the probability simplex and the scalar entropy and
//! purity functionals evaluated on them.

use crate::{Error, Result};

/// Tolerance on |Σλ − 1| after construction.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Inputs whose sum is within this distance of 1 are renormalized; worse
/// inputs are rejected.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-9;

/// Log base for entropy values. Normalized quantities are base-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    E,
    Two,
}

impl LogBase {
    fn convert_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

/// Entropy family selector for [`normalize_entropy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    VonNeumann,
    Linear,
}

/// An eigenvalue vector λ¹..λᴺ of a density operator: every entry in `[0, 1]`
/// and Σλⁱ = 1 within [`SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Build a spectrum, renormalizing inputs whose sum is within
    /// [`INPUT_SUM_TOLERANCE`] of 1 and rejecting anything worse.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SpectrumTooShort(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !(-SUM_TOLERANCE..=1.0 + SUM_TOLERANCE).contains(&value) || value.is_nan() {
                return Err(Error::SpectrumEntryOutOfRange { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > INPUT_SUM_TOLERANCE {
            return Err(Error::SpectrumSum(sum));
        }
        let values = values
            .into_iter()
            .map(|v| (v / sum).clamp(0.0, 1.0))
            .collect();
        Ok(Spectrum { values })
    }

    /// The maximally mixed spectrum (1/N, ..., 1/N).
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(vec![1.0 / dim as f64; dim])
    }

    /// A pure spectrum (1, 0, ..., 0).
    pub fn pure(dim: usize) -> Result<Self> {
        let mut values = vec![0.0; dim];
        if let Some(first) = values.first_mut() {
            *first = 1.0;
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// S_VN = −Σ λⁱ log λⁱ, with 0·log 0 := 0.
pub fn von_neumann_entropy(s: &Spectrum, base: LogBase) -> f64 {
    let nats: f64 = -s
        .values()
        .iter()
        .map(|&l| if l > 0.0 { l * l.ln() } else { 0.0 })
        .sum::<f64>();
    base.convert_nats(nats.max(0.0))
}

/// Purity `Tr[ρ²]` = Σ (λⁱ)².
pub fn purity(s: &Spectrum) -> f64 {
    s.values().iter().map(|&l| l * l).sum()
}

/// Linear entropy S_L = 1 − `Tr[ρ²]`.
pub fn linear_entropy(s: &Spectrum) -> f64 {
    1.0 - purity(s)
}

/// Negentropy S^max_VN − S_VN, the information retained relative to the
/// maximally mixed state.
pub fn negentropy(s: &Spectrum, base: LogBase) -> f64 {
    let max = base.convert_nats((s.dim() as f64).ln());
    (max - von_neumann_entropy(s, base)).max(0.0)
}

/// Divide a raw entropy by its maximum over the simplex of the given
/// dimension. Errors if `value` exceeds that maximum by more than 1e-9.
pub fn normalize_entropy(value: f64, dim: usize, kind: EntropyKind, base: LogBase) -> Result<f64> {
    let max = match kind {
        EntropyKind::VonNeumann => base.convert_nats((dim as f64).ln()),
        EntropyKind::Linear => 1.0 - 1.0 / dim as f64,
    };
    if value > max + 1e-9 {
        return Err(Error::EntropyAboveMax { value, max });
    }
    Ok((value / max).clamp(0.0, 1.0))
}

/// Normalized von Neumann entropy, directly from a spectrum. Base cancels.
pub fn normalized_von_neumann(s: &Spectrum) -> f64 {
    (von_neumann_entropy(s, LogBase::E) / (s.dim() as f64).ln()).clamp(0.0, 1.0)
}

/// Normalized linear entropy, directly from a spectrum.
pub fn normalized_linear(s: &Spectrum) -> f64 {
    (linear_entropy(s) / (1.0 - 1.0 / s.dim() as f64)).clamp(0.0, 1.0)
}

/// All scalar functionals of one spectrum in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub von_neumann_nats: f64,
    pub von_neumann_bits: f64,
    pub linear: f64,
    pub purity: f64,
    pub normalized_von_neumann: f64,
    pub normalized_linear: f64,
    pub negentropy_nats: f64,
}

pub fn entropy_report(s: &Spectrum) -> EntropyReport {
    let p = purity(s);
    EntropyReport {
        von_neumann_nats: von_neumann_entropy(s, LogBase::E),
        von_neumann_bits: von_neumann_entropy(s, LogBase::Two),
        linear: 1.0 - p,
        purity: p,
        normalized_von_neumann: normalized_von_neumann(s),
        normalized_linear: normalized_linear(s),
        negentropy_nats: negentropy(s, LogBase::E),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual}"
        );
    }

    fn random_spectrum(rng: &mut impl Rng, dim: usize) -> Spectrum {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let sum: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= sum);
        Spectrum::new(v).unwrap()
    }

    #[test]
    fn von_neumann_known_values() {
        let pure = Spectrum::new(vec![1.0, 0.0]).unwrap();
        assert_close(von_neumann_entropy(&pure, LogBase::Two), 0.0, 1e-15);

        let mixed = Spectrum::new(vec![0.5, 0.5]).unwrap();
        assert_close(von_neumann_entropy(&mixed, LogBase::Two), 1.0, 1e-12);

        let s = Spectrum::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_close(von_neumann_entropy(&s, LogBase::Two), 1.5, 1e-12);
    }

    #[test]
    fn linear_entropy_known_values() {
        assert_close(
            linear_entropy(&Spectrum::new(vec![1.0, 0.0]).unwrap()),
            0.0,
            1e-15,
        );
        assert_close(
            linear_entropy(&Spectrum::new(vec![0.5, 0.5]).unwrap()),
            0.5,
            1e-15,
        );
        assert_close(
            linear_entropy(&Spectrum::maximally_mixed(3).unwrap()),
            2.0 / 3.0,
            1e-15,
        );
    }

    #[test]
    fn negentropy_known_values() {
        assert_close(
            negentropy(&Spectrum::new(vec![0.5, 0.5]).unwrap(), LogBase::E),
            0.0,
            1e-12,
        );
        assert_close(
            negentropy(&Spectrum::new(vec![1.0, 0.0]).unwrap(), LogBase::Two),
            1.0,
            1e-12,
        );
        let s = Spectrum::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_close(
            negentropy(&s, LogBase::Two),
            3f64.log2() - 1.5,
            1e-12,
        );
    }

    #[test]
    fn normalization_known_values() {
        let mm3 = Spectrum::maximally_mixed(3).unwrap();
        let svn = von_neumann_entropy(&mm3, LogBase::E);
        assert_close(
            normalize_entropy(svn, 3, EntropyKind::VonNeumann, LogBase::E).unwrap(),
            1.0,
            1e-12,
        );

        let pure3 = Spectrum::pure(3).unwrap();
        assert_close(
            normalize_entropy(linear_entropy(&pure3), 3, EntropyKind::Linear, LogBase::E).unwrap(),
            0.0,
            1e-15,
        );

        let s = Spectrum::new(vec![0.5, 0.25, 0.25]).unwrap();
        let bits = von_neumann_entropy(&s, LogBase::Two);
        assert_close(
            normalize_entropy(bits, 3, EntropyKind::VonNeumann, LogBase::Two).unwrap(),
            1.5 / 3f64.log2(),
            1e-12,
        );
        assert_close(1.5 / 3f64.log2(), 0.946395, 1e-6);
    }

    #[test]
    fn normalize_rejects_values_above_maximum() {
        let err = normalize_entropy(2.0, 2, EntropyKind::VonNeumann, LogBase::E);
        assert!(matches!(err, Err(Error::EntropyAboveMax { .. })));
    }

    #[test]
    fn construction_rules() {
        assert!(matches!(
            Spectrum::new(vec![1.0]),
            Err(Error::SpectrumTooShort(1))
        ));
        assert!(matches!(
            Spectrum::new(vec![0.5, -0.5, 1.0]),
            Err(Error::SpectrumEntryOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            Spectrum::new(vec![0.5, 0.4]),
            Err(Error::SpectrumSum(_))
        ));
        // Within 1e-9 of unit sum: renormalized.
        let s = Spectrum::new(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert_close(s.values().iter().sum::<f64>(), 1.0, SUM_TOLERANCE);
    }

    #[test]
    fn purity_plus_linear_is_one() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_spectrum(&mut rng, 4);
            let r = entropy_report(&s);
            assert_eq!(r.purity + r.linear, 1.0);
            assert!((0.0..=1.0).contains(&r.normalized_von_neumann));
            assert!((0.0..=1.0).contains(&r.normalized_linear));
            assert!(r.negentropy_nats >= 0.0);
        }
    }

    #[test]
    fn normalized_extremes() {
        // 0 iff pure, 1 iff maximally mixed.
        for dim in 2..=5 {
            assert_close(normalized_von_neumann(&Spectrum::pure(dim).unwrap()), 0.0, 1e-15);
            assert_close(
                normalized_von_neumann(&Spectrum::maximally_mixed(dim).unwrap()),
                1.0,
                1e-12,
            );
        }
        let near = Spectrum::new(vec![0.4, 0.3, 0.3]).unwrap();
        assert!(normalized_von_neumann(&near) < 1.0 - 1e-4);
        assert!(normalized_von_neumann(&near) > 0.0);
    }

    #[test]
    fn entropies_are_permutation_invariant() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_spectrum(&mut rng, 5);
            let mut perm = s.values().to_vec();
            perm.reverse();
            perm.swap(0, 2);
            let p = Spectrum::new(perm).unwrap();
            assert_close(
                von_neumann_entropy(&s, LogBase::E),
                von_neumann_entropy(&p, LogBase::E),
                1e-12,
            );
            assert_close(linear_entropy(&s), linear_entropy(&p), 1e-12);
        }
    }

    #[test]
    fn von_neumann_is_concave() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for _ in 0..100 {
            let a = random_spectrum(&mut rng, 4);
            let b = random_spectrum(&mut rng, 4);
            for &t in &[0.25, 0.5, 0.75] {
                let blend: Vec<f64> = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .map(|(&x, &y)| t * x + (1.0 - t) * y)
                    .collect();
                let blend = Spectrum::new(blend).unwrap();
                let lhs = von_neumann_entropy(&blend, LogBase::E);
                let rhs = t * von_neumann_entropy(&a, LogBase::E)
                    + (1.0 - t) * von_neumann_entropy(&b, LogBase::E);
                assert!(lhs >= rhs - 1e-12, "concavity violated: {lhs} < {rhs}");
            }
        }
    }
}
