//! Lattice counts in lp balls, packing and covering numbers of finite point
//! sets under the sup norm, and the logarithmic grid-count bounds.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::caps::ResourceCaps;
use crate::counting::{count_weighted_lattice, ln_biguint, BoundaryRule};
use crate::error::{Error, Result};

/// The integer-point count query #{h in Z^d : sum_k |h_k|^p <= m}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBallQuery {
    pub p: f64,
    pub m: f64,
    pub d: usize,
}

impl LpBallQuery {
    pub fn new(p: f64, m: f64, d: usize) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must be positive finite, got {p}")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("m must be positive finite, got {m}")));
        }
        if d < 1 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        Ok(LpBallQuery { p, m, d })
    }
}

/// Exact count of integer points in the lp ball of p-th-power radius m,
/// boundary included.
pub fn grid_count(q: LpBallQuery, caps: ResourceCaps) -> Result<BigUint> {
    let weights = vec![(1.0, q.p); q.d];
    count_weighted_lattice(&weights, q.m, BoundaryRule::Inclusive, caps)
}

/// The three bound values for ln(grid count), each scaled by the supplied
/// constant: the two regime branches and the regime-free corollary form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBounds {
    /// C * m * ln(2d/m), the branch for d >= m.
    pub branch_d_ge_m: f64,
    /// C * d * ln(2m/d), the branch for m >= d.
    pub branch_m_ge_d: f64,
    /// C * d * (ln 2d + ln 2m), valid in both regimes.
    pub corollary: f64,
}

pub fn grid_count_log_bound(q: LpBallQuery, c_p: f64) -> Result<LogBounds> {
    if !(c_p > 0.0 && c_p.is_finite()) {
        return Err(Error::InvalidArgument(format!("constant must be positive, got {c_p}")));
    }
    let d = q.d as f64;
    Ok(LogBounds {
        branch_d_ge_m: c_p * q.m * (2.0 * d / q.m).ln(),
        branch_m_ge_d: c_p * d * (2.0 * q.m / d).ln(),
        corollary: c_p * d * ((2.0 * d).ln() + (2.0 * q.m).ln()),
    })
}

/// The regime-selected bound expression with unit constant: m ln(2d/m) when
/// d >= m, else d ln(2m/d).
pub fn bound_expression(q: LpBallQuery) -> f64 {
    let d = q.d as f64;
    if d >= q.m {
        q.m * (2.0 * d / q.m).ln()
    } else {
        d * (2.0 * q.m / d).ln()
    }
}

/// The regime-free expression with unit constant: d (ln 2d + ln 2m). Its
/// ratio to ln(grid count) shrinks as the instance grows, so a constant
/// fitted on small instances transfers to larger ones.
pub fn corollary_expression(q: LpBallQuery) -> f64 {
    let d = q.d as f64;
    d * ((2.0 * d).ln() + (2.0 * q.m).ln())
}

/// Empirical constant for a fixed p: the largest ratio of ln(grid count) to
/// the chosen unit-constant expression over a calibration grid.
pub fn fit_constant<I, F>(p: f64, grid: I, expression: F, caps: ResourceCaps) -> Result<f64>
where
    I: IntoIterator<Item = (f64, usize)>,
    F: Fn(LpBallQuery) -> f64,
{
    let mut best = 0.0f64;
    let mut seen = false;
    for (m, d) in grid {
        let q = LpBallQuery::new(p, m, d)?;
        let g = grid_count(q, caps)?;
        let expr = expression(q);
        if expr <= 0.0 {
            continue;
        }
        best = best.max(ln_biguint(&g) / expr);
        seen = true;
    }
    if !seen {
        return Err(Error::InvalidArgument("calibration grid is empty".into()));
    }
    Ok(best)
}

/// A finite list of points in R^d sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet {
    dimension: usize,
    points: Vec<Vec<f64>>,
}

impl FinitePointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidArgument("point set must be nonempty".into()))?;
        let dimension = first.len();
        if dimension == 0 {
            return Err(Error::InvalidArgument("points must have at least one coordinate".into()));
        }
        for (i, pt) in points.iter().enumerate() {
            if pt.len() != dimension {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has {} coordinates, expected {dimension}",
                    pt.len()
                )));
            }
            if pt.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(FinitePointSet { dimension, points })
    }

    /// Parses one point per line, coordinates whitespace-separated. Blank
    /// lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let pt: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::InvalidArgument(format!("cannot parse coordinate {tok:?}"))
                    })
                })
                .collect::<Result<_>>()?;
            points.push(pt);
        }
        FinitePointSet::new(points)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// How a packing number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMode {
    Exact,
    GreedyLowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingResult {
    pub size: usize,
    pub mode: PackingMode,
}

struct CliqueSearch<'a> {
    adj: &'a [Vec<bool>],
    best: usize,
    nodes: u64,
    node_cap: u64,
}

impl CliqueSearch<'_> {
    // Branch and bound with greedy-coloring upper bounds.
    fn expand(&mut self, size: usize, candidates: &[usize]) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::Resource(format!(
                "packing search exceeded {} nodes",
                self.node_cap
            )));
        }
        if candidates.is_empty() {
            self.best = self.best.max(size);
            return Ok(());
        }
        // color classes give an upper bound on the clique in `candidates`
        let mut color_of = vec![0usize; candidates.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (ci, &v) in candidates.iter().enumerate() {
            let mut c = 0;
            'class: loop {
                if c == classes.len() {
                    classes.push(vec![v]);
                    break;
                }
                if classes[c].iter().all(|&u| !self.adj[v][u]) {
                    classes[c].push(v);
                    break 'class;
                }
                c += 1;
            }
            color_of[ci] = c + 1;
        }
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by_key(|&i| color_of[i]);
        for idx in (0..order.len()).rev() {
            let i = order[idx];
            if size + color_of[i] <= self.best {
                return Ok(());
            }
            let v = candidates[i];
            let next: Vec<usize> = order[..idx]
                .iter()
                .map(|&j| candidates[j])
                .filter(|&u| self.adj[v][u])
                .collect();
            self.expand(size + 1, &next)?;
        }
        Ok(())
    }
}

/// Largest subset whose pairwise sup-norm distances all exceed eps. Exact on
/// sets up to `caps.packing_exact_threshold`, greedy lower bound above it.
pub fn packing_max(points: &FinitePointSet, eps: f64, caps: ResourceCaps) -> Result<PackingResult> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let n = points.len();
    if n > caps.point_set {
        return Err(Error::Resource(format!(
            "point set of size {n} exceeds cap {}",
            caps.point_set
        )));
    }
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && linf(&points.points[i], &points.points[j]) > eps)
                .collect()
        })
        .collect();
    if n <= caps.packing_exact_threshold {
        let mut search = CliqueSearch { adj: &adj, best: 1, nodes: 0, node_cap: caps.search_nodes };
        let all: Vec<usize> = (0..n).collect();
        search.expand(0, &all)?;
        Ok(PackingResult { size: search.best, mode: PackingMode::Exact })
    } else {
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..n {
            if kept.iter().all(|&j| adj[i][j]) {
                kept.push(i);
            }
        }
        Ok(PackingResult { size: kept.len(), mode: PackingMode::GreedyLowerBound })
    }
}

struct CoverSearch {
    covers: Vec<Vec<usize>>,     // candidate -> points it covers
    covered_by: Vec<Vec<usize>>, // point -> candidates covering it
    best: usize,
    nodes: u64,
    node_cap: u64,
    max_cover: usize,
}

impl CoverSearch {
    fn solve(&mut self, uncovered: &mut Vec<bool>, remaining: usize, chosen: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::Resource(format!(
                "covering search exceeded {} nodes",
                self.node_cap
            )));
        }
        if remaining == 0 {
            self.best = self.best.min(chosen);
            return Ok(());
        }
        if chosen + remaining.div_ceil(self.max_cover) >= self.best {
            return Ok(());
        }
        // branch on the hardest uncovered point
        let pivot = (0..uncovered.len())
            .filter(|&i| uncovered[i])
            .min_by_key(|&i| self.covered_by[i].len())
            .expect("remaining > 0");
        let mut options = self.covered_by[pivot].clone();
        options.sort_by_key(|&c| std::cmp::Reverse(self.covers[c].len()));
        for c in options {
            let mut flipped = Vec::new();
            for &pt in &self.covers[c] {
                if uncovered[pt] {
                    uncovered[pt] = false;
                    flipped.push(pt);
                }
            }
            self.solve(uncovered, remaining - flipped.len(), chosen + 1)?;
            for pt in flipped {
                uncovered[pt] = true;
            }
        }
        Ok(())
    }
}

/// Minimum number of closed sup-norm eps-balls centered at candidates that
/// cover every point. Exact set cover.
pub fn covering_min(
    points: &FinitePointSet,
    eps: f64,
    candidates: &FinitePointSet,
    caps: ResourceCaps,
) -> Result<usize> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if points.dimension != candidates.dimension {
        return Err(Error::InvalidArgument(format!(
            "points in dimension {} but candidates in dimension {}",
            points.dimension, candidates.dimension
        )));
    }
    if points.len() > caps.point_set || candidates.len() > caps.point_set {
        return Err(Error::Resource(format!("instance exceeds point cap {}", caps.point_set)));
    }
    let tol = 1e-12 * eps;
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); candidates.len()];
    let mut covered_by: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (c, center) in candidates.points.iter().enumerate() {
        for (i, pt) in points.points.iter().enumerate() {
            if linf(center, pt) <= eps + tol {
                covers[c].push(i);
                covered_by[i].push(c);
            }
        }
    }
    if let Some(i) = covered_by.iter().position(|v| v.is_empty()) {
        return Err(Error::Infeasible(format!(
            "point {i} lies in no candidate eps-ball"
        )));
    }
    let max_cover = covers.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let mut search = CoverSearch {
        covers,
        covered_by,
        best: points.len() + 1,
        nodes: 0,
        node_cap: caps.search_nodes,
        max_cover,
    };
    // greedy warm start tightens the initial bound
    {
        let mut uncovered: Vec<bool> = vec![true; points.len()];
        let mut remaining = points.len();
        let mut chosen = 0;
        while remaining > 0 {
            let c = (0..search.covers.len())
                .max_by_key(|&c| search.covers[c].iter().filter(|&&p| uncovered[p]).count())
                .expect("feasible instance has candidates");
            for &p in &search.covers[c] {
                if uncovered[p] {
                    uncovered[p] = false;
                    remaining -= 1;
                }
            }
            chosen += 1;
        }
        search.best = chosen;
    }
    let mut uncovered = vec![true; points.len()];
    let total = points.len();
    search.solve(&mut uncovered, total, 0)?;
    Ok(search.best)
}

/// The packing/covering sandwich around one point set: M_2eps <= N_eps <=
/// M_eps, with the points themselves as covering candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub packing_two_eps: PackingResult,
    pub covering: usize,
    pub packing_eps: PackingResult,
    pub eps: f64,
}

impl ChainReport {
    pub fn chain_holds(&self) -> bool {
        self.packing_two_eps.size <= self.covering && self.covering <= self.packing_eps.size
    }
}

pub fn chain_check(points: &FinitePointSet, eps: f64, caps: ResourceCaps) -> Result<ChainReport> {
    Ok(ChainReport {
        packing_two_eps: packing_max(points, 2.0 * eps, caps)?,
        covering: covering_min(points, eps, points, caps)?,
        packing_eps: packing_max(points, eps, caps)?,
        eps,
    })
}

/// Convenience for tests and the CLI: grid count as u64 when it fits.
pub fn grid_count_u64(q: LpBallQuery, caps: ResourceCaps) -> Result<u64> {
    let g = grid_count(q, caps)?;
    g.to_u64().ok_or_else(|| Error::Overflow("grid count exceeds u64".into()))
}
