//! Large-N behavior of SO(N) purification-family volumes along the
//! one-parameter family ρ(λ¹) = λ¹|1⟩⟨1| + (1−λ¹)/(N−1) Σ_{i≥2} |i⟩⟨i|:
//! the normalized volume curve, the λ¹* threshold holding 99.99% of the
//! volume, and average entanglement entropies over that tail.

use crate::quadrature::simpson_doubling;
use crate::spectrum::Spectrum;
use crate::{Error, Result};

/// Mixture of one pure state with the maximally mixed state on the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalFamily {
    pub n: usize,
    pub lambda1: f64,
}

impl MarginalFamily {
    pub fn new(n: usize, lambda1: f64) -> Result<Self> {
        check_domain(n, lambda1)?;
        Ok(MarginalFamily { n, lambda1 })
    }

    /// The realized spectrum (λ¹, μ, ..., μ) with μ = (1−λ¹)/(N−1).
    pub fn spectrum(&self) -> Result<Spectrum> {
        let mut values = vec![(1.0 - self.lambda1) / (self.n - 1) as f64; self.n];
        values[0] = self.lambda1;
        Spectrum::new(values)
    }
}

// Slack for quadrature nodes and scan points that land a rounding error
// outside [1/N, 1].
const DOMAIN_SLACK: f64 = 1e-12;

fn check_domain(n: usize, lambda1: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionMismatch(format!(
            "marginal family needs N >= 3, got {n}"
        )));
    }
    let lo = 1.0 / n as f64;
    if !(lo - DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&lambda1) || lambda1.is_nan() {
        return Err(Error::ParameterOutOfRange {
            name: "lambda1".into(),
            value: lambda1,
            lower: lo,
            upper: 1.0,
        });
    }
    Ok(())
}

/// Normalized SO(N) volume along the marginal family; log-space evaluation
/// keeps the large-N exponents from underflowing:
///
/// (λ¹ + μ)^{(N−1)/2} (2μ)^{(N−1)(N−2)/4} / (2/N)^{N(N−1)/4}, μ = (1−λ¹)/(N−1).
pub fn vnorm_marginal(n: usize, lambda1: f64) -> Result<f64> {
    check_domain(n, lambda1)?;
    let nf = n as f64;
    let lambda1 = lambda1.clamp(1.0 / nf, 1.0);
    let mu = (1.0 - lambda1) / (nf - 1.0);
    if mu == 0.0 {
        return Ok(0.0);
    }
    let e1 = (nf - 1.0) / 2.0;
    let e2 = (nf - 1.0) * (nf - 2.0) / 4.0;
    let emax = nf * (nf - 1.0) / 4.0;
    let log = e1 * (lambda1 + mu).ln() + e2 * (2.0 * mu).ln() - emax * (2.0 / nf).ln();
    Ok(log.exp().clamp(0.0, 1.0))
}

/// Normalized von Neumann entropy of the marginal spectrum, as an explicit
/// function of λ¹.
pub fn svn_norm_marginal(n: usize, lambda1: f64) -> f64 {
    let nf = n as f64;
    let mu = (1.0 - lambda1) / (nf - 1.0);
    let mut nats = 0.0;
    if lambda1 > 0.0 {
        nats -= lambda1 * lambda1.ln();
    }
    if mu > 0.0 {
        nats -= (1.0 - lambda1) * mu.ln();
    }
    (nats / nf.ln()).clamp(0.0, 1.0)
}

const MONOTONE_SCAN_POINTS: usize = 1000;
// Tight enough that the residual |V(λ¹*) − level| stays below 1e-10 even
// where the curve is steepest (N = 3 crosses 1e-4 only at λ¹ ≈ 1 − 3e-9).
const BISECTION_WIDTH: f64 = 1e-15;
const BISECTION_MAX_ITERATIONS: usize = 200;

/// The λ¹* with V^norm(λ¹*) = `level`, found by bisection after verifying the
/// curve is monotone nonincreasing on [1/N, 1].
pub fn find_lambda1_star(n: usize, level: f64) -> Result<f64> {
    let lo = 1.0 / n as f64;
    let mut prev = vnorm_marginal(n, lo)?;
    for i in 1..=MONOTONE_SCAN_POINTS {
        let x = lo + (1.0 - lo) * i as f64 / MONOTONE_SCAN_POINTS as f64;
        let v = vnorm_marginal(n, x)?;
        if v > prev + 1e-12 {
            return Err(Error::NonMonotone(x));
        }
        prev = v;
    }

    let v_lo = vnorm_marginal(n, lo)?;
    let v_hi = vnorm_marginal(n, 1.0)?;
    if !(v_hi < level && level < v_lo) {
        return Err(Error::NotBracketed {
            level,
            lo,
            hi: 1.0,
        });
    }
    let mut a = lo;
    let mut b = 1.0;
    for _ in 0..BISECTION_MAX_ITERATIONS {
        if b - a <= BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (a + b);
        if vnorm_marginal(n, mid)? > level {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

const INTEGRAL_REL_TOL: f64 = 1e-10;

/// Fraction of the total marginal-family volume below λ¹*:
/// ∫_{1/N}^{λ¹*} V^norm dλ / ∫_{1/N}^{1} V^norm dλ.
pub fn mass_ratio(n: usize, lambda1_star: f64) -> Result<f64> {
    let lo = 1.0 / n as f64;
    if !(lo < lambda1_star && lambda1_star <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "lambda1_star".into(),
            value: lambda1_star,
            lower: lo,
            upper: 1.0,
        });
    }
    let v = |x: f64| vnorm_marginal(n, x).unwrap_or(0.0);
    let head = simpson_doubling(v, lo, lambda1_star, INTEGRAL_REL_TOL)?;
    let total = simpson_doubling(v, lo, 1.0, INTEGRAL_REL_TOL)?;
    Ok((head / total).min(1.0))
}

/// Weighting of the tail average in [`avg_svn_tail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailWeighting {
    /// Plain average over λ¹ ∈ [1/N, λ¹*].
    Uniform,
    /// Average weighted by the normalized volume curve.
    Volume,
}

/// Average normalized von Neumann entropy of the marginal family over
/// λ¹ ∈ [1/N, λ¹*], under the chosen weighting.
pub fn avg_svn_tail(n: usize, lambda1_star: f64, weighting: TailWeighting) -> Result<f64> {
    let lo = 1.0 / n as f64;
    if !(lo < lambda1_star && lambda1_star <= 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "lambda1_star".into(),
            value: lambda1_star,
            lower: lo,
            upper: 1.0,
        });
    }
    let value = match weighting {
        TailWeighting::Uniform => {
            let integral = simpson_doubling(
                |x| svn_norm_marginal(n, x),
                lo,
                lambda1_star,
                INTEGRAL_REL_TOL,
            )?;
            integral / (lambda1_star - lo)
        }
        TailWeighting::Volume => {
            let weighted = simpson_doubling(
                |x| svn_norm_marginal(n, x) * vnorm_marginal(n, x).unwrap_or(0.0),
                lo,
                lambda1_star,
                INTEGRAL_REL_TOL,
            )?;
            let weight = simpson_doubling(
                |x| vnorm_marginal(n, x).unwrap_or(0.0),
                lo,
                lambda1_star,
                INTEGRAL_REL_TOL,
            )?;
            weighted / weight
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Everything the large-N analysis reports for one N.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub n: usize,
    pub lambda1_star: f64,
    pub mass_ratio: f64,
    pub avg_svn_uniform: f64,
    pub avg_svn_volume_weighted: f64,
}

/// Run the full threshold-and-average analysis at one dimension.
pub fn asymptotics_report(n: usize, level: f64) -> Result<AsymptoticsReport> {
    let lambda1_star = find_lambda1_star(n, level)?;
    Ok(AsymptoticsReport {
        n,
        lambda1_star,
        mass_ratio: mass_ratio(n, lambda1_star)?,
        avg_svn_uniform: avg_svn_tail(n, lambda1_star, TailWeighting::Uniform)?,
        avg_svn_volume_weighted: avg_svn_tail(n, lambda1_star, TailWeighting::Volume)?,
    })
}
