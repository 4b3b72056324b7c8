//! Optimal algorithms on concrete spectral data, the two norms involved,
//! and Monte-Carlo validation of the average case error.
//!
//! Functions are represented purely spectrally as finitely supported maps
//! frequency -> Fourier coefficient. The optimal algorithm in both settings
//! is coefficient truncation: keep the n frequencies of smallest exponent in
//! stream order.

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::caps::ResourceCaps;
use crate::complexity::trace_tau;
use crate::error::{Error, Result};
use crate::sequences::WeightSpec;
use crate::spectrum::{exponent_of_canonical, EigenStream};

/// A finitely supported frequency -> coefficient map representing
/// f(x) = sum_h fhat_h exp(2 pi i h.x). Absent keys mean coefficient 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    dimension: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl SpectralFunction {
    pub fn new(dimension: usize) -> Self {
        SpectralFunction { dimension, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs<I>(dimension: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut f = SpectralFunction::new(dimension);
        for (h, c) in coeffs {
            f.set(h, c)?;
        }
        Ok(f)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn set(&mut self, h: Vec<i64>, c: Complex64) -> Result<()> {
        if h.len() != self.dimension {
            return Err(Error::InvalidArgument(format!(
                "frequency has length {} in dimension {}",
                h.len(),
                self.dimension
            )));
        }
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&h);
        } else {
            self.coeffs.insert(h, c);
        }
        Ok(())
    }

    pub fn coeff(&self, h: &[i64]) -> Complex64 {
        self.coeffs.get(h).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Pointwise evaluation; convenience for demos, not used by any error
    /// computation.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (h, c) in &self.coeffs {
            let phase: f64 = h.iter().zip(x).map(|(&hk, &xk)| hk as f64 * xk).sum();
            sum += c * Complex64::new(0.0, 2.0 * std::f64::consts::PI * phase).exp();
        }
        sum
    }
}

/// The L2 norm: sqrt(sum |fhat_h|^2).
pub fn l2_norm(f: &SpectralFunction) -> f64 {
    f.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// The reproducing-kernel norm sqrt(sum |fhat_h|^2 omega^{-E(h)}), summed in
/// the log domain so large exponents do not overflow term-by-term.
pub fn h_norm(spec: &WeightSpec, f: &SpectralFunction) -> Result<f64> {
    let log_inv_omega = spec.log_inv_omega();
    let mut log_terms = Vec::with_capacity(f.coeffs.len());
    for (h, c) in &f.coeffs {
        let n2 = c.norm_sqr();
        if n2 == 0.0 {
            continue;
        }
        let index: Vec<u32> = h.iter().map(|&x| x.unsigned_abs() as u32).collect();
        let e = exponent_of_canonical(spec, &index);
        log_terms.push(n2.ln() + e * log_inv_omega);
    }
    if log_terms.is_empty() {
        return Ok(0.0);
    }
    let m = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_terms.iter().map(|&t| (t - m).exp()).sum();
    let log_norm_sq = m + sum.ln();
    if log_norm_sq / 2.0 > 709.0 {
        return Err(Error::Overflow(
            "H-norm exceeds the representable range even in log accumulation".into(),
        ));
    }
    Ok((log_norm_sq / 2.0).exp())
}

/// The first `n` signed frequencies in stream order: canonical groups by
/// non-decreasing exponent (lexicographic ties), each expanded into its sign
/// orbit in a fixed order (all-positive first, then sign masks ascending).
pub fn top_frequencies(
    spec: &WeightSpec,
    dimension: usize,
    n: u64,
    caps: ResourceCaps,
) -> Result<Vec<Vec<i64>>> {
    if n > caps.max_ranks {
        return Err(Error::Resource(format!("requested {n} frequencies exceeds cap {}", caps.max_ranks)));
    }
    let mut stream = EigenStream::new(spec, dimension, caps)?;
    let mut out: Vec<Vec<i64>> = Vec::with_capacity(n as usize);
    while (out.len() as u64) < n {
        let g = stream.next_group()?;
        let positions: Vec<usize> =
            g.index.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i).collect();
        for mask in 0u64..(1u64 << positions.len()) {
            if out.len() as u64 >= n {
                break;
            }
            let mut h: Vec<i64> = g.index.iter().map(|&v| v as i64).collect();
            for (bit, &pos) in positions.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    h[pos] = -h[pos];
                }
            }
            out.push(h);
        }
    }
    Ok(out)
}

/// Orthogonal projection onto the span of the top-n eigenfunctions: keeps
/// the coefficients of the n smallest-exponent frequencies, zeroes the rest.
pub fn truncate(
    spec: &WeightSpec,
    f: &SpectralFunction,
    n: u64,
    caps: ResourceCaps,
) -> Result<SpectralFunction> {
    let mut out = SpectralFunction::new(f.dimension);
    if n == 0 {
        return Ok(out);
    }
    let kept: HashSet<Vec<i64>> =
        top_frequencies(spec, f.dimension, n, caps)?.into_iter().collect();
    for (h, c) in &f.coeffs {
        if kept.contains(h) {
            out.coeffs.insert(h.clone(), *c);
        }
    }
    Ok(out)
}

/// The literal lambda-weighted variant: kept coefficients are additionally
/// scaled by the eigenvalue omega^{E(h)}. Provided for side-by-side error
/// comparison with the plain projection; its error is never smaller.
pub fn truncate_weighted(
    spec: &WeightSpec,
    f: &SpectralFunction,
    n: u64,
    caps: ResourceCaps,
) -> Result<SpectralFunction> {
    let mut out = truncate(spec, f, n, caps)?;
    let log_inv_omega = spec.log_inv_omega();
    for (h, c) in out.coeffs.iter_mut() {
        let index: Vec<u32> = h.iter().map(|&x| x.unsigned_abs() as u32).collect();
        let lambda = (-exponent_of_canonical(spec, &index) * log_inv_omega).exp();
        *c *= lambda;
    }
    out.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    Ok(out)
}

/// L2 distance between two spectral functions.
pub fn l2_distance(f: &SpectralFunction, g: &SpectralFunction) -> f64 {
    let mut sum = 0.0;
    for (h, c) in &f.coeffs {
        sum += (c - g.coeff(h)).norm_sqr();
    }
    for (h, c) in &g.coeffs {
        if !f.coeffs.contains_key(h) {
            sum += c.norm_sqr();
        }
    }
    sum.sqrt()
}

/// ||f - truncate(f, n)||_L2 / ||f||_H; bounded by the nth minimal worst
/// case error.
pub fn worst_case_error_of_truncation(
    spec: &WeightSpec,
    f: &SpectralFunction,
    n: u64,
    caps: ResourceCaps,
) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("f must be nonzero".into()));
    }
    let truncated = truncate(spec, f, n, caps)?;
    Ok(l2_distance(f, &truncated) / h_norm(spec, f)?)
}

/// Configuration for Gaussian draws under the covariance spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDrawConfig {
    /// Eigenvalue tail neglected by a draw, as a fraction of the trace.
    pub threshold: f64,
    pub seed: u64,
    pub samples: usize,
}

impl GaussianDrawConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= 0.01) {
            return Err(Error::InvalidArgument(format!(
                "truncation threshold must lie in (0, 0.01], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// A single draw with the variance its truncation neglected.
#[derive(Debug, Clone)]
pub struct GaussianDraw {
    pub function: SpectralFunction,
    pub neglected_variance: f64,
}

/// The frequency support shared by all draws at a given threshold, with the
/// eigenvalue of each frequency and the neglected variance.
pub struct DrawSupport {
    pub frequencies: Vec<(Vec<i64>, f64)>,
    pub neglected_variance: f64,
    pub trace: f64,
}

pub fn draw_support(
    spec: &WeightSpec,
    dimension: usize,
    threshold: f64,
    caps: ResourceCaps,
) -> Result<DrawSupport> {
    let trace = trace_tau(spec, dimension, 1.0, 1e-13, caps)?.trace;
    let mut stream = EigenStream::new(spec, dimension, caps)?;
    let mut residual = trace;
    let mut frequencies = Vec::new();
    while residual > threshold * trace {
        let g = stream.next_group()?;
        let lambda = g.eigenvalue(spec);
        let positions: Vec<usize> =
            g.index.iter().enumerate().filter(|(_, &v)| v != 0).map(|(i, _)| i).collect();
        for mask in 0u64..(1u64 << positions.len()) {
            let mut h: Vec<i64> = g.index.iter().map(|&v| v as i64).collect();
            for (bit, &pos) in positions.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    h[pos] = -h[pos];
                }
            }
            frequencies.push((h, lambda));
            residual -= lambda;
        }
        if frequencies.len() as u64 > caps.max_ranks {
            return Err(Error::Resource(format!(
                "draw support exceeds rank cap {}",
                caps.max_ranks
            )));
        }
    }
    Ok(DrawSupport { frequencies, neglected_variance: residual.max(0.0), trace })
}

fn draw_rng(seed: u64, draw_index: u64) -> ChaCha12Rng {
    // Counter-based substream: each draw derives its own generator from
    // (seed, index), so results are independent of evaluation schedule.
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&draw_index.to_le_bytes());
    bytes[16..24].copy_from_slice(&0x4b54_4452_4157u64.to_le_bytes());
    ChaCha12Rng::from_seed(bytes)
}

/// One Karhunen-Loeve draw: fhat_h = sqrt(omega_h) g_h with g_h i.i.d.
/// standard normal over the threshold-determined support. Reproducible from
/// (seed, draw_index).
pub fn sample_gaussian(
    spec: &WeightSpec,
    dimension: usize,
    cfg: &GaussianDrawConfig,
    draw_index: u64,
    caps: ResourceCaps,
) -> Result<GaussianDraw> {
    cfg.check()?;
    let support = draw_support(spec, dimension, cfg.threshold, caps)?;
    Ok(sample_on_support(dimension, &support, cfg.seed, draw_index))
}

/// Draws on a precomputed support (avoids re-expanding the spectrum when
/// many draws share a configuration).
pub fn sample_on_support(
    dimension: usize,
    support: &DrawSupport,
    seed: u64,
    draw_index: u64,
) -> GaussianDraw {
    let mut rng = draw_rng(seed, draw_index);
    let mut f = SpectralFunction::new(dimension);
    for (h, lambda) in &support.frequencies {
        let g: f64 = StandardNormal.sample(&mut rng);
        f.coeffs.insert(h.clone(), Complex64::new(lambda.sqrt() * g, 0.0));
    }
    GaussianDraw { function: f, neglected_variance: support.neglected_variance }
}

/// Monte-Carlo estimate of the nth minimal average case error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub neglected_variance: f64,
    pub samples: usize,
}

pub fn mc_avg_error(
    spec: &WeightSpec,
    dimension: usize,
    n: u64,
    cfg: &GaussianDrawConfig,
    caps: ResourceCaps,
) -> Result<McEstimate> {
    cfg.check()?;
    if cfg.samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "sample count must be >= 100, got {}",
            cfg.samples
        )));
    }
    let support = draw_support(spec, dimension, cfg.threshold, caps)?;
    let kept: HashSet<Vec<i64>> = if n == 0 {
        HashSet::new()
    } else {
        top_frequencies(spec, dimension, n, caps)?.into_iter().collect()
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..cfg.samples {
        let draw = sample_on_support(dimension, &support, cfg.seed, i as u64);
        let mut err_sq = 0.0;
        for (h, c) in draw.function.iter() {
            if !kept.contains(h) {
                err_sq += c.norm_sqr();
            }
        }
        sum += err_sq;
        sum_sq += err_sq * err_sq;
    }
    let m = cfg.samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - sum * sum / m) / (m - 1.0)).max(0.0);
    let se_mean = (var / m).sqrt();
    if mean > 0.0 && support.neglected_variance > 0.01 * mean {
        return Err(Error::NonConvergence(format!(
            "neglected variance {:e} exceeds 1% of the estimated squared error {:e}; \
             lower the truncation threshold",
            support.neglected_variance, mean
        )));
    }
    let estimate = mean.sqrt();
    let std_error = if estimate > 0.0 { se_mean / (2.0 * estimate) } else { se_mean.sqrt() };
    Ok(McEstimate { estimate, std_error, neglected_variance: support.neglected_variance, samples: cfg.samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::avg_error;
    use crate::sequences::SequenceFamily;
    use crate::spectrum::exponent;

    fn spec(omega: f64, a: &str, b: &str) -> WeightSpec {
        WeightSpec::new(omega, a.parse::<SequenceFamily>().unwrap(), b.parse().unwrap()).unwrap()
    }

    fn caps() -> ResourceCaps {
        ResourceCaps::default()
    }

    fn one(h: Vec<i64>, d: usize) -> SpectralFunction {
        SpectralFunction::from_coeffs(d, [(h, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn norms_examples() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        // constant function e~_0
        let f = one(vec![0], 1);
        assert_eq!(h_norm(&s, &f).unwrap(), 1.0);
        assert_eq!(l2_norm(&f), 1.0);

        // e~_1 has H-norm sqrt(2) under omega=0.5, E(1)=1
        let f = one(vec![1], 1);
        assert!((h_norm(&s, &f).unwrap() - 2f64.sqrt()).abs() < 1e-14);

        // e_h = omega_h^{1/2} e~_h is H-normalized for any h
        for h in [vec![2], vec![-3], vec![7]] {
            let e = exponent(&s, &h).unwrap();
            let w = (-e.value * s.log_inv_omega()).exp();
            let f = SpectralFunction::from_coeffs(1, [(h, Complex64::new(w.sqrt(), 0.0))]).unwrap();
            assert!((h_norm(&s, &f).unwrap() - 1.0).abs() < 1e-12);
        }

        // Pythagoras in L2
        let f = SpectralFunction::from_coeffs(
            1,
            [(vec![0], Complex64::new(3.0, 0.0)), (vec![1], Complex64::new(4.0, 0.0))],
        )
        .unwrap();
        assert_eq!(l2_norm(&f), 5.0);
        assert_eq!(l2_norm(&SpectralFunction::new(2)), 0.0);
    }

    #[test]
    fn h_norm_overflow_reported() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        let mut f = SpectralFunction::new(1);
        f.set(vec![3000], Complex64::new(1.0, 0.0)).unwrap();
        // E = 3000, the norm would be 2^1500: far out of range
        assert!(matches!(h_norm(&s, &f), Err(Error::Overflow(_))));
    }

    #[test]
    fn truncate_examples() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        let f = SpectralFunction::from_coeffs(
            1,
            [
                (vec![0], Complex64::new(1.0, 0.0)),
                (vec![1], Complex64::new(1.0, 0.0)),
                (vec![2], Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();

        let t0 = truncate(&s, &f, 0, caps()).unwrap();
        assert!(t0.is_zero());

        // n=3 keeps exponents {0, 1, 1} i.e. h in {0, 1, -1}; h=2 is dropped
        let t3 = truncate(&s, &f, 3, caps()).unwrap();
        assert_eq!(t3.coeff(&[0]), Complex64::new(1.0, 0.0));
        assert_eq!(t3.coeff(&[1]), Complex64::new(1.0, 0.0));
        assert_eq!(t3.coeff(&[2]), Complex64::new(0.0, 0.0));

        // idempotent
        let tt = truncate(&s, &t3, 3, caps()).unwrap();
        assert_eq!(tt, t3);

        // fixed on its range
        let inside = one(vec![0], 1);
        assert_eq!(truncate(&s, &inside, 1, caps()).unwrap(), inside);
    }

    #[test]
    fn truncation_error_saturates_on_extremal_eigenfunction() {
        let s = spec(0.5, "power:c=1,p=1", "const:c=1");
        for d in 1..=2usize {
            for n in [1u64, 3, 7] {
                // rank-(n+1) frequency
                let freqs = top_frequencies(&s, d, n + 1, caps()).unwrap();
                let h_star = freqs.last().unwrap().clone();
                let e = exponent(&s, &h_star).unwrap();
                let w = (-e.value * s.log_inv_omega()).exp();
                let f = SpectralFunction::from_coeffs(
                    d,
                    [(h_star, Complex64::new(w.sqrt(), 0.0))],
                )
                .unwrap();
                let err = worst_case_error_of_truncation(&s, &f, n, caps()).unwrap();
                let bound = crate::complexity::worst_error(&s, d, n, caps()).unwrap();
                assert!((err - bound).abs() < 1e-12, "d={d} n={n}: {err} vs {bound}");
            }
        }
    }

    #[test]
    fn weighted_variant_never_beats_projection() {
        let s = spec(0.5, "power:c=1,p=1", "const:c=1");
        let f = SpectralFunction::from_coeffs(
            2,
            [
                (vec![0, 0], Complex64::new(0.3, 0.1)),
                (vec![1, 0], Complex64::new(-0.5, 0.0)),
                (vec![0, 1], Complex64::new(0.2, 0.7)),
                (vec![2, -1], Complex64::new(0.1, 0.0)),
            ],
        )
        .unwrap();
        for n in [0u64, 1, 2, 4, 8] {
            let plain = l2_distance(&f, &truncate(&s, &f, n, caps()).unwrap());
            let weighted = l2_distance(&f, &truncate_weighted(&s, &f, n, caps()).unwrap());
            assert!(weighted >= plain - 1e-15, "n={n}");
        }
        // strictly larger once something is kept
        let plain = l2_distance(&f, &truncate(&s, &f, 2, caps()).unwrap());
        let weighted = l2_distance(&f, &truncate_weighted(&s, &f, 2, caps()).unwrap());
        assert!(weighted > plain);
    }

    #[test]
    fn draws_are_reproducible() {
        let s = spec(0.5, "power:c=1,p=1", "const:c=1");
        let cfg = GaussianDrawConfig { threshold: 1e-3, seed: 42, samples: 100 };
        let a = sample_gaussian(&s, 2, &cfg, 7, caps()).unwrap();
        let b = sample_gaussian(&s, 2, &cfg, 7, caps()).unwrap();
        assert_eq!(a.function, b.function);
        let c = sample_gaussian(&s, 2, &cfg, 8, caps()).unwrap();
        assert_ne!(a.function, c.function);
    }

    #[test]
    fn draw_second_moments_match_eigenvalues() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        let support = draw_support(&s, 1, 1e-3, caps()).unwrap();
        let draws = 20_000u64;
        let mut acc: Vec<f64> = vec![0.0; support.frequencies.len()];
        for i in 0..draws {
            let d = sample_on_support(1, &support, 5, i);
            for (j, (h, _)) in support.frequencies.iter().enumerate() {
                acc[j] += d.function.coeff(h).norm_sqr();
            }
        }
        for (j, (_, lambda)) in support.frequencies.iter().enumerate() {
            let mean = acc[j] / draws as f64;
            // Var(g^2) = 2 for standard normal, so sigma = lambda sqrt(2/N)
            let sigma = lambda * (2.0 / draws as f64).sqrt();
            assert!(
                (mean - lambda).abs() < 4.0 * sigma,
                "freq {j}: mean {mean} vs lambda {lambda}"
            );
        }
    }

    #[test]
    fn mc_matches_oracle() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        let cfg = GaussianDrawConfig { threshold: 1e-5, seed: 11, samples: 2000 };
        let est = mc_avg_error(&s, 1, 0, &cfg, caps()).unwrap();
        let oracle = avg_error(&s, 1, 0, caps()).unwrap();
        let allowance = est.neglected_variance.sqrt();
        assert!(
            (est.estimate - oracle).abs() <= 3.0 * est.std_error + allowance,
            "estimate {} vs oracle {oracle} (se {})",
            est.estimate,
            est.std_error
        );
    }

    #[test]
    fn mc_requires_enough_samples() {
        let s = spec(0.5, "const:c=1", "const:c=1");
        let cfg = GaussianDrawConfig { threshold: 1e-3, seed: 1, samples: 50 };
        assert!(mc_avg_error(&s, 1, 0, &cfg, caps()).is_err());
    }
}
