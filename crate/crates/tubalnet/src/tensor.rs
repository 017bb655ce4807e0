//! Dense third-order tensor with frontal-slice-major storage.
//!
//! A `Tensor3` of dimensions `(n1, n2, n3)` stores its `n3` frontal slices
//! contiguously; each slice is an `n1 x n2` matrix in row-major order. This
//! makes the facewise (slice-wise) matrix products of the tubal algebra
//! contiguous GEMMs, and it is also the element order of the `T3B1`/`T3M1`
//! container formats.
//!
//! Degenerate shapes represent the named cross-sections of the algebra:
//! a lateral slice is `(n, 1, n3)`, a horizontal slice `(1, n, n3)` and a
//! tube `(1, 1, n3)`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Linear index of entry `(i, j, k)` in a tensor of shape `(n1, n2, n3)`.
///
/// Frontal-slice-major, row-major within a slice. All containers and
/// in-memory layouts share this single function.
#[inline]
pub fn linear_index(dims: (usize, usize, usize), i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < dims.0 && j < dims.1 && k < dims.2);
    k * dims.0 * dims.1 + i * dims.1 + j
}

/// Dense real third-order tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: (usize, usize, usize),
    data: Vec<f64>,
}

impl Tensor3 {
    /// Builds a tensor from raw data in frontal-slice-major order.
    ///
    /// Rejects zero dimensions, a length mismatch, and non-finite entries.
    pub fn from_vec(dims: (usize, usize, usize), data: Vec<f64>) -> Result<Self> {
        let (n1, n2, n3) = dims;
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::Config(format!(
                "tensor dimensions must be positive, got {n1}x{n2}x{n3}"
            )));
        }
        let expected = n1
            .checked_mul(n2)
            .and_then(|p| p.checked_mul(n3))
            .ok_or_else(|| Error::Config(format!("tensor size {n1}x{n2}x{n3} overflows")))?;
        if data.len() != expected {
            return Err(Error::shape(
                "from_vec",
                format!("{n1}x{n2}x{n3} ({expected} entries)"),
                format!("{} entries", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite entry {} at linear index {pos}",
                data[pos]
            )));
        }
        Ok(Self { dims, data })
    }

    /// Internal constructor for values produced by finite arithmetic.
    pub(crate) fn new_unchecked(dims: (usize, usize, usize), data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.0 * dims.1 * dims.2);
        Self { dims, data }
    }

    pub fn zeros(dims: (usize, usize, usize)) -> Self {
        Self::new_unchecked(dims, vec![0.0; dims.0 * dims.1 * dims.2])
    }

    pub fn ones(dims: (usize, usize, usize)) -> Self {
        Self::new_unchecked(dims, vec![1.0; dims.0 * dims.1 * dims.2])
    }

    /// Builds a tensor by evaluating `f(i, j, k)` at every index.
    pub fn from_fn(dims: (usize, usize, usize), mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let (n1, n2, n3) = dims;
        let mut data = vec![0.0; n1 * n2 * n3];
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    data[linear_index(dims, i, j, k)] = f(i, j, k);
                }
            }
        }
        Self::new_unchecked(dims, data)
    }

    /// Seeded standard-Gaussian tensor, deterministic per seed.
    pub fn randn(dims: (usize, usize, usize), std_dev: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::randn_with(dims, std_dev, &mut rng)
    }

    /// Gaussian fill drawing from an existing RNG stream.
    pub fn randn_with(dims: (usize, usize, usize), std_dev: f64, rng: &mut ChaCha8Rng) -> Self {
        let n = dims.0 * dims.1 * dims.2;
        let data = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                z * std_dev
            })
            .collect();
        Self::new_unchecked(dims, data)
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[linear_index(self.dims, i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[linear_index(self.dims, i, j, k)] = value;
    }

    /// Frontal slice `k` as a borrowed `n1 x n2` row-major matrix.
    #[inline]
    pub fn frontal_data(&self, k: usize) -> &[f64] {
        let plane = self.dims.0 * self.dims.1;
        &self.data[k * plane..(k + 1) * plane]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new_unchecked(self.dims, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::shape(op, dims_str(self.dims), dims_str(other.dims)));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::new_unchecked(self.dims, data))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, "sub", |a, b| a - b)
    }

    /// Elementwise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        self.map(|v| v + s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Sums along the second dimension: `(n1, n2, n3) -> (n1, 1, n3)`.
    pub fn sum_dim2(&self) -> Self {
        let (n1, n2, n3) = self.dims;
        let mut out = Tensor3::zeros((n1, 1, n3));
        for k in 0..n3 {
            for i in 0..n1 {
                let mut acc = 0.0;
                for j in 0..n2 {
                    acc += self.get(i, j, k);
                }
                out.set(i, 0, k, acc);
            }
        }
        out
    }

    /// Frontal-slice-wise matrix transpose: `(n1, n2, n3) -> (n2, n1, n3)`.
    pub fn slice_transpose(&self) -> Self {
        let (n1, n2, n3) = self.dims;
        let mut out = Tensor3::zeros((n2, n1, n3));
        for k in 0..n3 {
            for i in 0..n1 {
                for j in 0..n2 {
                    out.set(j, i, k, self.get(i, j, k));
                }
            }
        }
        out
    }

    /// Horizontal slice `a(i, :, :)` as a `(1, n2, n3)` tensor.
    pub fn horizontal_slice(&self, i: usize) -> Self {
        let (_, n2, n3) = self.dims;
        Tensor3::from_fn((1, n2, n3), |_, j, k| self.get(i, j, k))
    }

    /// Lateral slice `a(:, j, :)` as an `(n1, 1, n3)` tensor.
    pub fn lateral_slice(&self, j: usize) -> Self {
        let (n1, _, n3) = self.dims;
        Tensor3::from_fn((n1, 1, n3), |i, _, k| self.get(i, j, k))
    }

    /// Frontal slice `a(:, :, k)` as an `(n1, n2, 1)` tensor.
    pub fn frontal_slice(&self, k: usize) -> Self {
        let (n1, n2, _) = self.dims;
        Tensor3::from_fn((n1, n2, 1), |i, j, _| self.get(i, j, k))
    }

    pub fn set_horizontal_slice(&mut self, i: usize, slice: &Tensor3) -> Result<()> {
        let (_, n2, n3) = self.dims;
        if slice.dims != (1, n2, n3) {
            return Err(Error::shape("set_horizontal_slice", dims_str((1, n2, n3)), dims_str(slice.dims)));
        }
        for k in 0..n3 {
            for j in 0..n2 {
                self.set(i, j, k, slice.get(0, j, k));
            }
        }
        Ok(())
    }

    pub fn set_lateral_slice(&mut self, j: usize, slice: &Tensor3) -> Result<()> {
        let (n1, _, n3) = self.dims;
        if slice.dims != (n1, 1, n3) {
            return Err(Error::shape("set_lateral_slice", dims_str((n1, 1, n3)), dims_str(slice.dims)));
        }
        for k in 0..n3 {
            for i in 0..n1 {
                self.set(i, j, k, slice.get(i, 0, k));
            }
        }
        Ok(())
    }

    pub fn set_frontal_slice(&mut self, k: usize, slice: &Tensor3) -> Result<()> {
        let (n1, n2, _) = self.dims;
        if slice.dims != (n1, n2, 1) {
            return Err(Error::shape("set_frontal_slice", dims_str((n1, n2, 1)), dims_str(slice.dims)));
        }
        for i in 0..n1 {
            for j in 0..n2 {
                self.set(i, j, k, slice.get(i, j, 0));
            }
        }
        Ok(())
    }

    /// Gathers lateral columns into an `(n1, cols.len(), n3)` tensor.
    pub fn gather_columns(&self, cols: &[usize]) -> Self {
        let (n1, _, n3) = self.dims;
        Tensor3::from_fn((n1, cols.len(), n3), |i, c, k| self.get(i, cols[c], k))
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

pub(crate) fn dims_str(dims: (usize, usize, usize)) -> String {
    format!("{}x{}x{}", dims.0, dims.1, dims.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_frontal_slice_major_row_major() {
        let t = Tensor3::from_fn((2, 3, 2), |i, j, k| (k * 100 + i * 10 + j) as f64);
        // slice 0 rows, then slice 1 rows
        assert_eq!(
            t.data(),
            &[0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 100.0, 101.0, 102.0, 110.0, 111.0, 112.0]
        );
        assert_eq!(t.get(1, 2, 1), 112.0);
    }

    #[test]
    fn from_vec_validates() {
        assert!(Tensor3::from_vec((2, 2, 1), vec![1.0; 4]).is_ok());
        assert!(matches!(
            Tensor3::from_vec((2, 2, 1), vec![1.0; 5]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(Tensor3::from_vec((0, 2, 1), vec![]).is_err());
        assert!(Tensor3::from_vec((1, 1, 1), vec![f64::NAN]).is_err());
    }

    #[test]
    fn hadamard_matches_definition() {
        let a = Tensor3::from_vec((1, 1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        let b = Tensor3::from_vec((1, 1, 3), vec![4.0, 5.0, 6.0]).unwrap();
        assert_eq!(a.hadamard(&b).unwrap().data(), &[4.0, 10.0, 18.0]);
        assert_eq!(a.hadamard(&Tensor3::ones((1, 1, 3))).unwrap().data(), a.data());
        assert_eq!(
            a.hadamard(&Tensor3::zeros((1, 1, 3))).unwrap().data(),
            &[0.0, 0.0, 0.0]
        );
        assert!(a.hadamard(&Tensor3::ones((1, 2, 3))).is_err());
    }

    #[test]
    fn sum_dim2_matches_loop_oracle() {
        let t = Tensor3::randn((4, 5, 3), 1.0, 11);
        let s = t.sum_dim2();
        assert_eq!(s.dims(), (4, 1, 3));
        for k in 0..3 {
            for i in 0..4 {
                let mut acc = 0.0;
                for j in 0..5 {
                    acc += t.get(i, j, k);
                }
                assert_eq!(s.get(i, 0, k), acc);
            }
        }
        // single lateral slice is returned unchanged
        let l = Tensor3::randn((4, 1, 3), 1.0, 12);
        assert_eq!(l.sum_dim2(), l);
        // all-ones (2,3,2) sums to all-threes
        let ones = Tensor3::ones((2, 3, 2));
        assert!(ones.sum_dim2().data().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn randn_is_deterministic_per_seed() {
        let a = Tensor3::randn((3, 3, 3), 1.0, 7);
        let b = Tensor3::randn((3, 3, 3), 1.0, 7);
        let c = Tensor3::randn((3, 3, 3), 1.0, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn slice_extract_insert_round_trip() {
        let t = Tensor3::randn((3, 4, 2), 1.0, 3);
        let mut u = Tensor3::zeros((3, 4, 2));
        for i in 0..3 {
            u.set_horizontal_slice(i, &t.horizontal_slice(i)).unwrap();
        }
        assert_eq!(u, t);
        let mut v = Tensor3::zeros((3, 4, 2));
        for j in 0..4 {
            v.set_lateral_slice(j, &t.lateral_slice(j)).unwrap();
        }
        assert_eq!(v, t);
        let mut w = Tensor3::zeros((3, 4, 2));
        for k in 0..2 {
            w.set_frontal_slice(k, &t.frontal_slice(k)).unwrap();
        }
        assert_eq!(w, t);
    }

    #[test]
    fn slice_transpose_is_involution() {
        let t = Tensor3::randn((3, 5, 4), 1.0, 9);
        assert_eq!(t.slice_transpose().slice_transpose(), t);
    }
}
