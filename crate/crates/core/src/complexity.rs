//! Information complexity and minimal errors in the worst and average case
//! settings.
//!
//! The worst-case information complexity is an exact lattice count: the
//! number of frequencies whose exponent lies strictly below the budget
//! L = ln(eps^-2)/ln(omega^-1). Average-case quantities reduce to the trace
//! of the spectrum, computed as a product of one-dimensional series with a
//! rigorous integral tail bound.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use statrs::function::gamma::{gamma, gamma_ur};

use crate::caps::ResourceCaps;
use crate::counting::{count_weighted_lattice, BoundaryRule};
use crate::error::{Error, Result};
use crate::sequences::WeightSpec;
use crate::spectrum::{exponent_at_rank, EigenStream};

/// Absolute vs normalized error criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Abs,
    Nor,
}

/// The exponent budget L = ln(eps^-2)/ln(omega^-1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold(pub f64);

impl Threshold {
    pub fn from_eps(spec: &WeightSpec, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
        }
        Ok(Threshold(2.0 * (1.0 / eps).ln() / spec.log_inv_omega()))
    }
}

fn spec_weights(spec: &WeightSpec, dimension: usize) -> Vec<(f64, f64)> {
    (1..=dimension as u64).map(|k| (spec.eval_a(k), spec.eval_b(k))).collect()
}

/// #{h in Z^d : sum_k a_k |h_k|^{b_k} < L}, strict at the boundary.
pub fn count_lattice(
    spec: &WeightSpec,
    dimension: usize,
    threshold: Threshold,
    caps: ResourceCaps,
) -> Result<BigUint> {
    if threshold.0 < 0.0 {
        return Err(Error::InvalidArgument("threshold must be >= 0".into()));
    }
    count_weighted_lattice(&spec_weights(spec, dimension), threshold.0, BoundaryRule::Strict, caps)
}

/// Worst-case information complexity n(eps, d). ABS and NOR coincide because
/// the worst-case initial error is 1.
pub fn info_complexity_worst(
    spec: &WeightSpec,
    dimension: usize,
    eps: f64,
    caps: ResourceCaps,
) -> Result<BigUint> {
    count_lattice(spec, dimension, Threshold::from_eps(spec, eps)?, caps)
}

/// The nth minimal worst case error: sqrt of the rank-(n+1) eigenvalue.
pub fn worst_error(spec: &WeightSpec, dimension: usize, n: u64, caps: ResourceCaps) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let e = exponent_at_rank(spec, dimension, n + 1, caps)?;
    Ok((-0.5 * e * spec.log_inv_omega()).exp())
}

/// Trace of the tau-th power of the spectrum with bracketing bounds on its
/// logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBound {
    /// Point estimate of sum_j lambda_{d,j}^tau.
    pub trace: f64,
    /// Lower bound on ln(trace): ln2 * sum_k omega^{tau a_k}.
    pub log_lower: f64,
    /// Upper bound on ln(trace): M_{tau/2} * sum_k omega^{tau a_k}.
    pub log_upper: f64,
    pub tau: f64,
    /// Per-dimension factors 1 + 2 sum_j omega^{tau a_k j^{b_k}}.
    pub factors: Vec<f64>,
}

/// Sum_{j>=1} exp(-c j^b), truncated once a rigorous tail bound drops below
/// `tol` relative to the partial sum.
///
/// The tail past J is bounded by the integral int_J^inf exp(-c x^b) dx
/// = Gamma(1/b, c J^b) / (b c^{1/b}). For large b the incomplete-gamma route
/// loses accuracy (1/b underflows the shape parameter), so a convexity bound
/// j^b >= J^b + b J^{b-1}(j - J) gives a geometric tail instead; both are
/// valid upper bounds.
fn series_sum_exp(c: f64, b: f64, tol: f64, term_cap: usize) -> Result<f64> {
    debug_assert!(c > 0.0 && b > 0.0);
    let mut sum = 0.0;
    for j in 1..=term_cap as u64 {
        let x = c * (j as f64).powf(b);
        sum += (-x).exp();
        let tail = if x > 700.0 {
            // e^{-x} underflows; the tail is far below any useful tolerance.
            0.0
        } else if b <= 20.0 {
            gamma_ur(1.0 / b, x) * gamma(1.0 / b) / (b * c.powf(1.0 / b))
        } else {
            let slope = c * b * (j as f64).powf(b - 1.0);
            let q = (-slope).exp();
            (-x).exp() * q / (1.0 - q)
        };
        if tail.is_finite() && tail <= tol * sum.max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!(
        "series tail did not reach relative tolerance {tol} within {term_cap} terms"
    )))
}

/// M_{tau0} = 2 sum_{j>=1} omega^{tau0 a_1 (j^{b_*} - 1)}.
fn m_constant(spec: &WeightSpec, tau0: f64, tol: f64, term_cap: usize) -> Result<f64> {
    let c = tau0 * spec.eval_a(1) * spec.log_inv_omega();
    let s = series_sum_exp(c, spec.b_star(), tol, term_cap)?;
    Ok(2.0 * c.exp() * s)
}

/// Computes sum_j lambda_{d,j}^tau as a product of per-dimension factors.
pub fn trace_tau(
    spec: &WeightSpec,
    dimension: usize,
    tau: f64,
    tol: f64,
    caps: ResourceCaps,
) -> Result<TraceBound> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0,1), got {tol}")));
    }
    let per_factor_tol = tol / (2.0 * dimension as f64);
    let mut factors = Vec::with_capacity(dimension);
    let mut trace = 1.0;
    let mut weight_sum = 0.0; // sum_k omega^{tau a_k}
    for k in 1..=dimension as u64 {
        let c = tau * spec.eval_a(k) * spec.log_inv_omega();
        let s = series_sum_exp(c, spec.eval_b(k), per_factor_tol, caps.series_terms)?;
        let factor = 1.0 + 2.0 * s;
        factors.push(factor);
        trace *= factor;
        weight_sum += (-c).exp();
    }
    let m = m_constant(spec, tau / 2.0, 1e-12, caps.series_terms)?;
    Ok(TraceBound {
        trace,
        log_lower: std::f64::consts::LN_2 * weight_sum,
        log_upper: m * weight_sum,
        tau,
        factors,
    })
}

/// The initial average case error e^avg(0, d) = sqrt(trace).
pub fn initial_avg_error(spec: &WeightSpec, dimension: usize, caps: ResourceCaps) -> Result<f64> {
    Ok(trace_tau(spec, dimension, 1.0, 1e-13, caps)?.trace.sqrt())
}

/// The nth minimal average case error: sqrt of the eigenvalue tail past rank
/// n, computed as trace minus the top-n partial sum.
pub fn avg_error(spec: &WeightSpec, dimension: usize, n: u64, caps: ResourceCaps) -> Result<f64> {
    let trace = trace_tau(spec, dimension, 1.0, 1e-13, caps)?.trace;
    if n == 0 {
        return Ok(trace.sqrt());
    }
    if n > caps.max_ranks {
        return Err(Error::Resource(format!("requested {n} ranks exceeds cap {}", caps.max_ranks)));
    }
    let mut stream = EigenStream::new(spec, dimension, caps)?;
    let mut partial = 0.0;
    let mut remaining = n;
    while remaining > 0 {
        let g = stream.next_group()?;
        let take = remaining.min(g.multiplicity);
        partial += take as f64 * g.eigenvalue(spec);
        remaining -= take;
    }
    let residual = trace - partial;
    if residual < -1e-10 * trace {
        return Err(Error::NonConvergence(format!(
            "partial sum exceeds trace by {:e}; trace tolerance too loose",
            -residual
        )));
    }
    Ok(residual.max(0.0).sqrt())
}

/// Average-case information complexity under the given criterion: the
/// minimal n with e^avg(n,d) <= eps * CRI_d.
pub fn info_complexity_avg(
    spec: &WeightSpec,
    dimension: usize,
    eps: f64,
    criterion: Criterion,
    caps: ResourceCaps,
) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0,1), got {eps}")));
    }
    let trace = trace_tau(spec, dimension, 1.0, 1e-13, caps)?.trace;
    let cri = match criterion {
        Criterion::Abs => 1.0,
        Criterion::Nor => trace.sqrt(),
    };
    let target_sq = (eps * cri) * (eps * cri);
    if trace <= target_sq {
        return Ok(0);
    }
    let mut stream = EigenStream::new(spec, dimension, caps)?;
    let mut residual = trace;
    let mut n: u64 = 0;
    loop {
        let g = stream.next_group()?;
        let lambda = g.eigenvalue(spec);
        for _ in 0..g.multiplicity {
            residual -= lambda;
            n += 1;
            if residual <= target_sq {
                return Ok(n);
            }
            if n >= caps.max_ranks {
                return Err(Error::Resource(format!(
                    "average-case complexity exceeds rank cap {}; n > {n}",
                    caps.max_ranks
                )));
            }
        }
    }
}

/// Convenience: exact worst-case count as u64 (errors if it does not fit).
pub fn info_complexity_worst_u64(
    spec: &WeightSpec,
    dimension: usize,
    eps: f64,
    caps: ResourceCaps,
) -> Result<u64> {
    info_complexity_worst(spec, dimension, eps, caps)?
        .to_u64()
        .ok_or_else(|| Error::Overflow("worst-case complexity exceeds u64".into()))
}
