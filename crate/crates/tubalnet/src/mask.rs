//! Observation masks: which entries of a tensor are known.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{dims_str, linear_index};

/// Boolean indicator of the observed entry set, in the shared element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    dims: (usize, usize, usize),
    observed: Vec<bool>,
    count: usize,
}

impl ObservationMask {
    pub fn from_vec(dims: (usize, usize, usize), observed: Vec<bool>) -> Result<Self> {
        let expected = dims.0 * dims.1 * dims.2;
        if observed.len() != expected {
            return Err(Error::shape(
                "mask_from_vec",
                format!("{} ({expected} entries)", dims_str(dims)),
                format!("{} entries", observed.len()),
            ));
        }
        let count = observed.iter().filter(|&&b| b).count();
        Ok(Self { dims, observed, count })
    }

    pub fn from_fn(dims: (usize, usize, usize), mut f: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let (n1, n2, n3) = dims;
        let mut observed = vec![false; n1 * n2 * n3];
        let mut count = 0;
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    let b = f(i, j, k);
                    observed[linear_index(dims, i, j, k)] = b;
                    count += b as usize;
                }
            }
        }
        Self { dims, observed, count }
    }

    pub fn all_observed(dims: (usize, usize, usize)) -> Self {
        let n = dims.0 * dims.1 * dims.2;
        Self {
            dims,
            observed: vec![true; n],
            count: n,
        }
    }

    /// Uniform random mask with exactly `round((1 - missing_rate) * n)`
    /// observed entries, deterministic per seed.
    pub fn random_missing(dims: (usize, usize, usize), missing_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&missing_rate) {
            return Err(Error::Config(format!(
                "missing rate must be in [0, 1), got {missing_rate}"
            )));
        }
        let total = dims.0 * dims.1 * dims.2;
        let n_observed = ((1.0 - missing_rate) * total as f64).round() as usize;
        let mut indices: Vec<u32> = (0..total as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Partial Fisher-Yates: the first n_observed entries form the sample.
        for i in 0..n_observed.min(total.saturating_sub(1)) {
            let j = i + (next_u64(&mut rng) as usize) % (total - i);
            indices.swap(i, j);
        }
        let mut observed = vec![false; total];
        for &idx in &indices[..n_observed] {
            observed[idx as usize] = true;
        }
        Ok(Self {
            dims,
            observed,
            count: n_observed,
        })
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize, k: usize) -> bool {
        self.observed[linear_index(self.dims, i, j, k)]
    }

    #[inline]
    pub fn flags(&self) -> &[bool] {
        &self.observed
    }

    /// Linear indices of the observed entries, ascending.
    pub fn observed_indices(&self) -> Vec<usize> {
        self.observed
            .iter()
            .enumerate()
            .filter_map(|(idx, &b)| b.then_some(idx))
            .collect()
    }

    /// Mask of the entries NOT observed here (the evaluation set).
    pub fn complement(&self) -> Self {
        let observed: Vec<bool> = self.observed.iter().map(|b| !b).collect();
        let count = observed.len() - self.count;
        Self {
            dims: self.dims,
            observed,
            count,
        }
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::shape("mask_intersect", dims_str(self.dims), dims_str(other.dims)));
        }
        let observed: Vec<bool> = self
            .observed
            .iter()
            .zip(&other.observed)
            .map(|(&a, &b)| a && b)
            .collect();
        let count = observed.iter().filter(|&&b| b).count();
        Ok(Self {
            dims: self.dims,
            observed,
            count,
        })
    }

    /// Restricts the mask to the given lateral columns, in order.
    pub fn gather_columns(&self, cols: &[usize]) -> Self {
        let (n1, _, n3) = self.dims;
        Self::from_fn((n1, cols.len(), n3), |i, c, k| self.is_observed(i, cols[c], k))
    }
}

fn next_u64(rng: &mut ChaCha8Rng) -> u64 {
    use rand_chacha::rand_core::RngCore;
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_zero_observes_everything() {
        let m = ObservationMask::random_missing((3, 3, 3), 0.0, 1).unwrap();
        assert_eq!(m.count(), 27);
    }

    #[test]
    fn rate_half_on_4x4x4_observes_exactly_32() {
        let m = ObservationMask::random_missing((4, 4, 4), 0.5, 1).unwrap();
        assert_eq!(m.count(), 32);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = ObservationMask::random_missing((5, 5, 5), 0.4, 7).unwrap();
        let b = ObservationMask::random_missing((5, 5, 5), 0.4, 7).unwrap();
        let c = ObservationMask::random_missing((5, 5, 5), 0.4, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rate_one_rejected() {
        assert!(ObservationMask::random_missing((2, 2, 2), 1.0, 0).is_err());
        assert!(ObservationMask::random_missing((2, 2, 2), -0.1, 0).is_err());
    }

    #[test]
    fn complement_and_intersect() {
        let m = ObservationMask::random_missing((4, 4, 2), 0.25, 3).unwrap();
        let c = m.complement();
        assert_eq!(m.count() + c.count(), 32);
        assert_eq!(m.intersect(&c).unwrap().count(), 0);
        assert_eq!(m.intersect(&m).unwrap(), m);
    }
}
