use crate::corpus::MechanismVector;

use super::MetricsError;

/// Per-feature occurrence counts over a window of records.
///
/// The summed Hamming distance from `g` to all `n` records in the window is
/// `Σ_j [g_j = 1](n - c_j) + [g_j = 0] c_j`, so distinctiveness needs only the
/// counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureProfile {
    pub years: (i32, i32),
    pub n: u64,
    pub counts: Vec<u64>,
}

impl FeatureProfile {
    pub fn empty(dimension: usize, years: (i32, i32)) -> Self {
        Self { years, n: 0, counts: vec![0; dimension] }
    }

    pub fn from_vectors<'a, I>(dimension: usize, years: (i32, i32), vectors: I) -> Self
    where
        I: IntoIterator<Item = &'a MechanismVector>,
    {
        let mut p = Self::empty(dimension, years);
        for v in vectors {
            p.add(v);
        }
        p
    }

    pub fn add(&mut self, v: &MechanismVector) {
        debug_assert_eq!(v.dim(), self.counts.len());
        self.n += 1;
        for j in v.ones() {
            self.counts[j] += 1;
        }
    }

    /// Adds another profile's counts; the year range is left unchanged.
    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }

    pub fn dimension(&self) -> usize {
        self.counts.len()
    }

    /// Exact integer sum of Hamming distances from `g` to the window.
    pub fn distance_sum(&self, g: &MechanismVector) -> u64 {
        // Start from "g is all zeros" (Σ c_j), then correct each set bit.
        let base: u64 = self.counts.iter().sum();
        g.ones().fold(base, |acc, j| acc + self.n - 2 * self.counts[j])
    }
}

/// Distinctiveness from a precomputed profile; equal to the brute-force mean
/// up to the final division.
pub fn distinctiveness_fast(g: &MechanismVector, profile: &FeatureProfile) -> Result<f64, MetricsError> {
    if g.dim() != profile.dimension() {
        return Err(crate::corpus::DimensionError { left: g.dim(), right: profile.dimension() }.into());
    }
    if profile.n == 0 {
        return Err(MetricsError::EmptyWindow { id: String::new(), from: profile.years.0, to: profile.years.1 });
    }
    Ok(profile.distance_sum(g) as f64 / profile.n as f64)
}
