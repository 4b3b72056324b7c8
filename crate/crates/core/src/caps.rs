//! Resource caps for the enumeration and counting kernels.
//!
//! Every potentially unbounded loop in the crate is guarded by one of these
//! limits. Exceeding a cap is reported as [`Error::Resource`], never worked
//! around by truncating the result.

use crate::error::{Error, Result};

/// Configurable resource limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceCaps {
    /// Maximum size of the best-first frontier in the eigenvalue stream.
    pub frontier: usize,
    /// Maximum number of eigenvalue ranks a single query may expand.
    pub max_ranks: u64,
    /// Maximum number of recursion nodes in the lattice counting kernel.
    pub recursion_nodes: u64,
    /// Maximum number of terms in a one-dimensional series truncation.
    pub series_terms: usize,
    /// Maximum number of cells visited by brute-force box enumeration.
    pub brute_force_cells: u64,
    /// Maximum size of a finite point set for packing/covering queries.
    pub point_set: usize,
    /// Above this point-set size, packing falls back to a greedy lower bound.
    pub packing_exact_threshold: usize,
    /// Maximum branch-and-bound node expansions for packing/covering.
    pub search_nodes: u64,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps {
            frontier: 10_000_000,
            max_ranks: 10_000_000,
            recursion_nodes: 100_000_000,
            series_terms: 100_000,
            brute_force_cells: 100_000_000,
            point_set: 2000,
            packing_exact_threshold: 256,
            search_nodes: 50_000_000,
        }
    }
}

impl ResourceCaps {
    /// Applies overrides given as a comma-separated `key=value` list, e.g.
    /// `frontier=1000000,series_terms=50000`.
    pub fn apply_overrides(&mut self, text: &str) -> Result<()> {
        for item in text.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("cap override `{item}` is not key=value"))
            })?;
            let parse = |v: &str| -> Result<u64> {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidArgument(format!("cap value `{v}` is not an integer")))
            };
            match key.trim() {
                "frontier" => self.frontier = parse(value)? as usize,
                "max_ranks" => self.max_ranks = parse(value)?,
                "recursion_nodes" => self.recursion_nodes = parse(value)?,
                "series_terms" => self.series_terms = parse(value)? as usize,
                "brute_force_cells" => self.brute_force_cells = parse(value)?,
                "point_set" => self.point_set = parse(value)? as usize,
                "packing_exact_threshold" => self.packing_exact_threshold = parse(value)? as usize,
                "search_nodes" => self.search_nodes = parse(value)?,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown cap `{other}`")));
                }
            }
        }
        Ok(())
    }

    /// Reads overrides from the `KOROBOV_TRACT_CAPS` environment variable.
    pub fn from_env() -> Result<Self> {
        let mut caps = ResourceCaps::default();
        if let Ok(text) = std::env::var("KOROBOV_TRACT_CAPS") {
            caps.apply_overrides(&text)?;
        }
        Ok(caps)
    }
}
