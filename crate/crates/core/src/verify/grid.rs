use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::GridMetadata;
use super::{VerifyError, VerifyResult};
use crate::immersion::export::linspace;

/// Smallest number of points a verification grid may have.
pub const MIN_GRID_POINTS: usize = 9;

/// Tensor-product sample grid with optional seeded jitter.
///
/// Periodic axes sample `[a, b)` with `count` equal steps; other axes include
/// both endpoints. Interior samples of every axis are moved by a uniform
/// offset of at most `jitter` times the spacing, drawn from a ChaCha stream
/// seeded by `seed`, so the grid stays a tensor product and is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub counts: Vec<usize>,
    pub ranges: Vec<(f64, f64)>,
    pub periodic: Vec<bool>,
    pub jitter: f64,
    pub seed: u64,
    pub exclusions: Vec<Vec<f64>>,
}

impl SampleGrid {
    pub fn new(counts: Vec<usize>, ranges: Vec<(f64, f64)>) -> VerifyResult<Self> {
        if counts.len() != ranges.len() || counts.is_empty() {
            return Err(VerifyError::config(
                "grid.counts",
                format!("{} counts for {} ranges", counts.len(), ranges.len()),
            ));
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(VerifyError::config("grid.counts", "counts must be positive"));
        }
        if ranges.iter().any(|&(a, b)| !(a < b)) {
            return Err(VerifyError::config("grid.ranges", "every range needs a < b"));
        }
        let n: usize = counts.iter().product();
        if n < MIN_GRID_POINTS {
            return Err(VerifyError::config(
                "grid.counts",
                format!("{n} points, need at least {MIN_GRID_POINTS}"),
            ));
        }
        let periodic = vec![false; counts.len()];
        Ok(Self {
            counts,
            ranges,
            periodic,
            jitter: 0.0,
            seed: 0,
            exclusions: Vec::new(),
        })
    }

    pub fn with_periodic(mut self, axis: usize) -> Self {
        self.periodic[axis] = true;
        self
    }

    pub fn with_jitter(mut self, jitter: f64, seed: u64) -> VerifyResult<Self> {
        if !(0.0..0.5).contains(&jitter) {
            return Err(VerifyError::config("grid.jitter", "jitter must lie in [0, 0.5)"));
        }
        self.jitter = jitter;
        self.seed = seed;
        Ok(self)
    }

    pub fn with_exclusions(mut self, points: Vec<Vec<f64>>) -> Self {
        self.exclusions = points;
        self
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Sample values of every axis.
    pub fn axes(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.dim())
            .map(|k| {
                let (a, b) = self.ranges[k];
                let c = self.counts[k];
                let mut vals = if self.periodic[k] {
                    (0..c).map(|i| a + (b - a) * i as f64 / c as f64).collect()
                } else {
                    linspace(a, b, c)
                };
                let spacing = if self.periodic[k] { (b - a) / c as f64 } else { (b - a) / (c.max(2) - 1) as f64 };
                let last = vals.len().saturating_sub(1);
                for (i, v) in vals.iter_mut().enumerate() {
                    let interior = if self.periodic[k] { true } else { i > 0 && i < last };
                    // always draw so the stream does not depend on the jitter amount
                    let r: f64 = rng.gen_range(-1.0..1.0);
                    if interior && self.jitter > 0.0 {
                        // periodic samples only move forward so they stay inside [a, b)
                        let r = if self.periodic[k] { r.abs() } else { r };
                        *v += r * self.jitter * spacing;
                    }
                }
                vals
            })
            .collect()
    }

    fn excluded(&self, p: &[f64]) -> bool {
        self.exclusions
            .iter()
            .any(|e| e.len() == p.len() && e.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-12))
    }

    /// Grid points, last axis fastest, exclusions removed.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in self.axes() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out.retain(|p| !self.excluded(p));
        out
    }

    pub fn metadata(&self, evaluated: usize, excluded: usize) -> GridMetadata {
        GridMetadata {
            counts: self.counts.clone(),
            ranges: self.ranges.clone(),
            jitter: self.jitter,
            seed: self.seed,
            evaluated,
            excluded,
        }
    }
}
