//! Radial grids on `[0, 1]` and the induced grid `x = r^N`.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// `r_j = (j/M)^power`, refines towards the centre of the ball for `power > 1`.
    Graded { power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

impl RadialGrid {
    /// `intervals + 1` equispaced nodes, `r_0 = 0` and `r_M = 1` exactly.
    pub fn uniform(intervals: usize) -> Result<Self> {
        Self::with_spacing(intervals, Spacing::Uniform)
    }

    pub fn graded(intervals: usize, power: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidInput(format!("grading power {power} must be > 0")));
        }
        Self::with_spacing(intervals, Spacing::Graded { power })
    }

    pub fn with_spacing(intervals: usize, spacing: Spacing) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 intervals, got {intervals}")));
        }
        let m = intervals as f64;
        let nodes = (0..=intervals)
            .map(|j| {
                let s = j as f64 / m;
                match spacing {
                    Spacing::Uniform => s,
                    Spacing::Graded { power } => libm::pow(s, power),
                }
            })
            .collect();
        Ok(RadialGrid { nodes, spacing })
    }

    /// Arbitrary strictly increasing nodes from 0 to 1; tagged as graded with power 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidInput("need at least 3 nodes".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput("grid must start at 0 and end at 1".into()));
        }
        if let Some(j) = nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(format!("grid not increasing at node {}", j + 1)));
        }
        Ok(RadialGrid { nodes, spacing: Spacing::Graded { power: 1.0 } })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Largest spacing.
    pub fn max_step(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// `x_j = r_j^N`.
    pub fn x_nodes(&self, dim: u32) -> Vec<f64> {
        self.nodes.iter().map(|&r| libm::pow(r, dim as f64)).collect()
    }

    /// Grid with every interval split in two.
    pub fn refined(&self) -> Self {
        if self.is_regular() {
            return Self::with_spacing(2 * self.intervals(), self.spacing).unwrap();
        }
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(1.0);
        RadialGrid { nodes, spacing: self.spacing }
    }

    fn is_regular(&self) -> bool {
        match Self::with_spacing(self.intervals(), self.spacing) {
            Ok(g) => g.nodes == self.nodes,
            Err(_) => false,
        }
    }
}

/// `x^(1/N)` for `x >= 0`, correctly rounded to a few ulps.
pub fn root_n(x: f64, dim: u32) -> f64 {
    match dim {
        1 => x,
        2 => libm::sqrt(x),
        3 => libm::cbrt(x),
        4 => libm::sqrt(libm::sqrt(x)),
        _ => {
            if x == 0.0 {
                return 0.0;
            }
            let n = dim as f64;
            let y = libm::pow(x, 1.0 / n);
            // one Newton step on y^N = x
            let yn1 = libm::pow(y, n - 1.0);
            y - (yn1 * y - x) / (n * yn1)
        }
    }
}
