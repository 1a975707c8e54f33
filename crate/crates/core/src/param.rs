//! Parameter points at which the sufficient conditions are evaluated.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointMode {
    /// `(Δ_A, Δ_B, k_A, k_B)`: maximum degrees of an arbitrary bipartite graph.
    Degree,
    /// `(a, b, k_A, k_B)`: part sizes of `K_{a,b}`.
    Complete,
}

/// A tuple `(x_a, x_b, k_a, k_b)` read as maximum degrees or as part sizes
/// depending on `mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamPoint {
    pub mode: PointMode,
    pub x_a: u64,
    pub x_b: u64,
    pub k_a: u64,
    pub k_b: u64,
}

impl ParamPoint {
    pub fn degree(delta_a: u64, delta_b: u64, k_a: u64, k_b: u64) -> Self {
        Self::build(PointMode::Degree, delta_a, delta_b, k_a, k_b)
    }

    pub fn complete(a: u64, b: u64, k_a: u64, k_b: u64) -> Self {
        Self::build(PointMode::Complete, a, b, k_a, k_b)
    }

    fn build(mode: PointMode, x_a: u64, x_b: u64, k_a: u64, k_b: u64) -> Self {
        assert!(
            x_a > 0 && x_b > 0 && k_a > 0 && k_b > 0,
            "parameter points take positive integers"
        );
        Self { mode, x_a, x_b, k_a, k_b }
    }

    /// Maximum degree of part A. In `K_{a,b}` every A-vertex sees all of `B`.
    pub fn delta_a(&self) -> u64 {
        match self.mode {
            PointMode::Degree => self.x_a,
            PointMode::Complete => self.x_b,
        }
    }

    pub fn delta_b(&self) -> u64 {
        match self.mode {
            PointMode::Degree => self.x_b,
            PointMode::Complete => self.x_a,
        }
    }

    /// Part sizes, only meaningful for complete points.
    pub fn parts(&self) -> Option<(u64, u64)> {
        (self.mode == PointMode::Complete).then_some((self.x_a, self.x_b))
    }

    /// The same point with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            mode: self.mode,
            x_a: self.x_b,
            x_b: self.x_a,
            k_a: self.k_b,
            k_b: self.k_a,
        }
    }

    /// Degree view of a complete point.
    pub fn as_degree(&self) -> Self {
        Self::degree(self.delta_a(), self.delta_b(), self.k_a, self.k_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_points_swap_degrees() {
        let p = ParamPoint::complete(20, 7, 3, 4);
        assert_eq!(p.delta_a(), 7);
        assert_eq!(p.delta_b(), 20);
        assert_eq!(p.as_degree(), ParamPoint::degree(7, 20, 3, 4));
        assert_eq!(p.swapped().swapped(), p);
    }
}
