//! Shared lattice-counting kernel.
//!
//! Counts signed integer vectors h with sum_k a_k |h_k|^{b_k} inside a
//! budget, without materializing the sign orbit: each coordinate value t > 0
//! contributes a factor of 2. Coordinates are processed in decreasing a_k
//! order so the most expensive coordinate prunes first (pure performance
//! choice; the count is order-invariant). Partial counts are memoized on the
//! exact remaining budget, which collapses the recursion tree whenever
//! coordinate costs repeat (integer-valued cost structures in particular).
//!
//! Counts are exact big integers; desk-scale queries routinely exceed u128.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::caps::ResourceCaps;
use crate::error::{Error, Result};

/// Whether the budget boundary itself is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Count points with cost strictly below the budget. Costs within the
    /// relative tolerance of the budget are NOT counted.
    Strict,
    /// Count points with cost at most the budget, up to the tolerance.
    Inclusive,
}

/// Relative tolerance applied at the budget boundary.
pub const BOUNDARY_REL_TOL: f64 = 1e-12;

struct Counter<'a> {
    weights: &'a [(f64, f64)],
    rule: BoundaryRule,
    tol: f64,
    memo: Vec<HashMap<u64, BigUint>>,
    nodes: u64,
    node_cap: u64,
}

impl Counter<'_> {
    fn recurse(&mut self, level: usize, remaining: f64) -> Result<BigUint> {
        if level == self.weights.len() {
            let counted = match self.rule {
                BoundaryRule::Strict => remaining > self.tol,
                BoundaryRule::Inclusive => remaining >= -self.tol,
            };
            return Ok(if counted { BigUint::from(1u32) } else { BigUint::zero() });
        }
        let key = remaining.to_bits();
        if let Some(hit) = self.memo[level].get(&key) {
            return Ok(hit.clone());
        }
        let (a, b) = self.weights[level];
        let mut total = BigUint::zero();
        let mut t: u64 = 0;
        loop {
            let cost = a * (t as f64).powf(b);
            let viable = match self.rule {
                BoundaryRule::Strict => remaining - cost > self.tol,
                BoundaryRule::Inclusive => cost <= remaining + self.tol,
            };
            if !viable {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.node_cap {
                return Err(Error::Resource(format!(
                    "lattice counting exceeded {} recursion nodes",
                    self.node_cap
                )));
            }
            let sub = self.recurse(level + 1, remaining - cost)?;
            if t == 0 {
                total += sub;
            } else {
                total += sub * 2u32;
            }
            t += 1;
        }
        self.memo[level].insert(key, total.clone());
        Ok(total)
    }
}

/// Counts h in Z^d with sum_k a_k |h_k|^{b_k} within `budget` under `rule`,
/// where `weights[k] = (a_k, b_k)`.
pub fn count_weighted_lattice(
    weights: &[(f64, f64)],
    budget: f64,
    rule: BoundaryRule,
    caps: ResourceCaps,
) -> Result<BigUint> {
    for &(a, b) in weights {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coordinate weights must be positive finite, got ({a}, {b})"
            )));
        }
    }
    if !budget.is_finite() {
        return Err(Error::InvalidArgument(format!("budget must be finite, got {budget}")));
    }
    let mut sorted: Vec<(f64, f64)> = weights.to_vec();
    sorted.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));
    let mut counter = Counter {
        weights: &sorted,
        rule,
        tol: BOUNDARY_REL_TOL * budget.abs().max(1.0),
        memo: vec![HashMap::new(); sorted.len()],
        nodes: 0,
        node_cap: caps.recursion_nodes,
    };
    counter.recurse(0, budget)
}

/// Natural logarithm of a positive big integer, accurate to f64 precision.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().expect("53-bit mantissa fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
