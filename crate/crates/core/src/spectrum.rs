//! Lazy non-increasing enumeration of the product-spectrum eigenvalues.
//!
//! Everything is kept in the log domain: an eigenvalue is represented by its
//! exponent E = sum_k a_k |h_k|^{b_k}, so the eigenvalue itself is
//! omega^E. Ordering eigenvalues in non-increasing order is ordering
//! exponents in non-decreasing order, which stays exact long after the
//! eigenvalues themselves would underflow.
//!
//! Frequencies are enumerated as canonical indices in N_0^d (componentwise
//! absolute values); each canonical index stands for 2^{#nonzero} signed
//! frequencies.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::caps::ResourceCaps;
use crate::error::{Error, Result};
use crate::sequences::WeightSpec;

/// Relative tolerance for treating two exponents as equal when grouping ties.
pub const EXPONENT_REL_TOL: f64 = 1e-12;

/// Returns true if the two exponent values belong to the same tie group.
pub fn exponents_tie(x: f64, y: f64) -> bool {
    (x - y).abs() <= EXPONENT_REL_TOL * x.abs().max(y.abs()).max(1.0)
}

/// A log-domain eigenvalue: exponent value, canonical index, and the number
/// of signed frequencies it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent {
    pub value: f64,
    pub index: Vec<u32>,
    pub multiplicity: u64,
}

impl Exponent {
    /// The eigenvalue omega^value in (0, 1].
    pub fn eigenvalue(&self, spec: &WeightSpec) -> f64 {
        (-self.value * spec.log_inv_omega()).exp()
    }
}

/// E = sum_k a_k idx_k^{b_k} for a canonical index, summed in coordinate
/// order so identical indices always produce bit-identical values.
pub fn exponent_of_canonical(spec: &WeightSpec, index: &[u32]) -> f64 {
    let mut e = 0.0;
    for (k, &h) in index.iter().enumerate() {
        if h != 0 {
            e += spec.eval_a(k as u64 + 1) * (h as f64).powf(spec.eval_b(k as u64 + 1));
        }
    }
    e
}

/// The exponent of an arbitrary signed frequency.
pub fn exponent(spec: &WeightSpec, h: &[i64]) -> Result<Exponent> {
    let index: Vec<u32> = h
        .iter()
        .map(|&x| {
            u32::try_from(x.unsigned_abs())
                .map_err(|_| Error::InvalidArgument(format!("frequency component {x} out of range")))
        })
        .collect::<Result<_>>()?;
    let nonzero = index.iter().filter(|&&x| x != 0).count();
    if nonzero >= 64 {
        return Err(Error::Overflow("multiplicity 2^{#nonzero} exceeds u64".into()));
    }
    Ok(Exponent {
        value: exponent_of_canonical(spec, &index),
        multiplicity: 1u64 << nonzero,
        index,
    })
}

/// The j-th largest eigenvalue of the univariate factor in coordinate k:
/// 1 for j = 1, then omega^{a_k floor(j/2)^{b_k}} in tied pairs.
pub fn one_dim_eigenvalue(spec: &WeightSpec, k: u64, j: u64) -> f64 {
    debug_assert!(k >= 1 && j >= 1);
    if j == 1 {
        return 1.0;
    }
    let m = (j / 2) as f64;
    (-spec.eval_a(k) * m.powf(spec.eval_b(k)) * spec.log_inv_omega()).exp()
}

#[derive(Debug, Clone)]
struct Node {
    value: f64,
    index: Vec<u32>,
    /// Successors may only increment coordinates >= this one, which makes the
    /// increment path to any canonical index unique.
    min_next: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on "smaller exponent first, then lexicographically
        // smaller canonical index first".
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// A canonical-index group emitted by the stream, with the rank range it
/// occupies after multiplicity expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup {
    pub exponent: f64,
    pub index: Vec<u32>,
    pub multiplicity: u64,
    /// Rank of the first eigenvalue of this group (1-based).
    pub first_rank: u64,
}

impl EigenGroup {
    /// The eigenvalue omega^exponent shared by all ranks of the group.
    pub fn eigenvalue(&self, spec: &WeightSpec) -> f64 {
        (-self.exponent * spec.log_inv_omega()).exp()
    }
}

/// Best-first enumerator of the product spectrum in non-increasing
/// eigenvalue order. Single-owner stateful iterator.
pub struct EigenStream<'a> {
    spec: &'a WeightSpec,
    dimension: usize,
    heap: BinaryHeap<Node>,
    emitted_ranks: u64,
    caps: ResourceCaps,
}

impl<'a> EigenStream<'a> {
    pub fn new(spec: &'a WeightSpec, dimension: usize, caps: ResourceCaps) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        if dimension >= 64 {
            return Err(Error::InvalidArgument(
                "dimension >= 64 overflows multiplicity expansion".into(),
            ));
        }
        let mut heap = BinaryHeap::new();
        heap.push(Node { value: 0.0, index: vec![0; dimension], min_next: 0 });
        Ok(EigenStream { spec, dimension, heap, emitted_ranks: 0, caps })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Total number of ranks emitted so far.
    pub fn emitted_ranks(&self) -> u64 {
        self.emitted_ranks
    }

    /// Pops the next canonical group in non-decreasing exponent order.
    pub fn next_group(&mut self) -> Result<EigenGroup> {
        let node = self
            .heap
            .pop()
            .expect("frontier never empties: every popped node pushes successors");
        // Successors increment one coordinate; recomputing the exponent from
        // scratch keeps tie groups exact regardless of pop order.
        for i in node.min_next..self.dimension {
            let mut index = node.index.clone();
            index[i] += 1;
            let value = exponent_of_canonical(self.spec, &index);
            self.heap.push(Node { value, index, min_next: i });
        }
        if self.heap.len() > self.caps.frontier {
            return Err(Error::Resource(format!(
                "eigenstream frontier exceeded {} nodes",
                self.caps.frontier
            )));
        }
        let nonzero = node.index.iter().filter(|&&x| x != 0).count();
        let multiplicity = 1u64 << nonzero;
        let first_rank = self.emitted_ranks + 1;
        self.emitted_ranks += multiplicity;
        Ok(EigenGroup { exponent: node.value, index: node.index, multiplicity, first_rank })
    }
}

/// Expands the stream until at least `n` ranks are covered; the returned
/// groups cover ranks 1..=n (the last group may extend past n).
pub fn top_eigenvalues(
    spec: &WeightSpec,
    dimension: usize,
    n: u64,
    caps: ResourceCaps,
) -> Result<Vec<EigenGroup>> {
    if n == 0 {
        return Err(Error::InvalidArgument("top_eigenvalues requires n >= 1".into()));
    }
    if n > caps.max_ranks {
        return Err(Error::Resource(format!("requested {n} ranks exceeds cap {}", caps.max_ranks)));
    }
    let mut stream = EigenStream::new(spec, dimension, caps)?;
    let mut groups = Vec::new();
    while stream.emitted_ranks() < n {
        groups.push(stream.next_group()?);
    }
    Ok(groups)
}

/// The rank-j eigenvalue exponent (j >= 1), i.e. the exponent of
/// lambda_{d,j}.
pub fn exponent_at_rank(
    spec: &WeightSpec,
    dimension: usize,
    rank: u64,
    caps: ResourceCaps,
) -> Result<f64> {
    let groups = top_eigenvalues(spec, dimension, rank, caps)?;
    Ok(groups.last().expect("rank >= 1 yields at least one group").exponent)
}

/// Exhaustive oracle: all canonical indices with exponent <= e_max (up to the
/// shared relative tolerance), merged by exponent tie groups and sorted.
/// Independent of the heap logic.
pub fn brute_force_spectrum(
    spec: &WeightSpec,
    dimension: usize,
    e_max: f64,
    caps: ResourceCaps,
) -> Result<Vec<(f64, u64)>> {
    if e_max < 0.0 {
        return Err(Error::InvalidArgument("e_max must be >= 0".into()));
    }
    let tol = EXPONENT_REL_TOL * e_max.max(1.0);
    let mut found: Vec<(f64, u64)> = Vec::new();
    let mut cells: u64 = 0;
    let mut index = vec![0u32; dimension];

    fn recurse(
        spec: &WeightSpec,
        dimension: usize,
        e_max: f64,
        tol: f64,
        k: usize,
        acc: f64,
        index: &mut Vec<u32>,
        found: &mut Vec<(f64, u64)>,
        cells: &mut u64,
        cap: u64,
    ) -> Result<()> {
        if k == dimension {
            let value = exponent_of_canonical(spec, index);
            let nonzero = index.iter().filter(|&&x| x != 0).count();
            found.push((value, 1u64 << nonzero));
            return Ok(());
        }
        let a = spec.eval_a(k as u64 + 1);
        let b = spec.eval_b(k as u64 + 1);
        let mut h = 0u32;
        loop {
            let cost = a * (h as f64).powf(b);
            if acc + cost > e_max + tol {
                break;
            }
            *cells += 1;
            if *cells > cap {
                return Err(Error::Resource(format!("brute-force enumeration exceeded {cap} cells")));
            }
            index[k] = h;
            recurse(spec, dimension, e_max, tol, k + 1, acc + cost, index, found, cells, cap)?;
            index[k] = 0;
            h += 1;
        }
        Ok(())
    }

    recurse(
        spec,
        dimension,
        e_max,
        tol,
        0,
        0.0,
        &mut index,
        &mut found,
        &mut cells,
        caps.brute_force_cells,
    )?;
    found.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Merge tie groups.
    let mut merged: Vec<(f64, u64)> = Vec::new();
    for (value, mult) in found {
        match merged.last_mut() {
            Some((v, m)) if exponents_tie(*v, value) => *m += mult,
            _ => merged.push((value, mult)),
        }
    }
    Ok(merged)
}
