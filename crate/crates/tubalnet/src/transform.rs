//! Transforms along the third dimension.
//!
//! The tubal product is defined relative to an invertible matrix applied to
//! every tube of a tensor. Every constructor shipped here produces a real
//! matrix that is a nonzero multiple of an orthogonal matrix, which is the
//! family for which the simplified product gradient is exact.

use std::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction-time tolerance for the inverse and orthogonality checks.
const CONSTRUCTION_TOL: f64 = 1e-10;

/// Small dense row-major matrix used for transforms and their tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "matrix_from_vec",
                format!("{rows}x{cols}"),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for p in 0..self.cols {
                let a = self.get(i, p);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.set(i, j, out.get(i, j) + a * other.get(p, j));
                }
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for r in col + 1..n {
                if a.get(r, col).abs() > a.get(pivot, col).abs() {
                    pivot = r;
                }
            }
            let p = a.get(pivot, col);
            if p.abs() < 1e-14 {
                return Err(Error::InvalidTransform(format!(
                    "matrix is singular (pivot {p:e} in column {col})"
                )));
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(col, j);
                    a.set(col, j, a.get(pivot, j));
                    a.set(pivot, j, tmp);
                    let tmp = inv.get(col, j);
                    inv.set(col, j, inv.get(pivot, j));
                    inv.set(pivot, j, tmp);
                }
            }
            let scale = 1.0 / a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) * scale);
                inv.set(col, j, inv.get(col, j) * scale);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col);
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - f * a.get(col, j));
                    inv.set(r, j, inv.get(r, j) - f * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    fn is_exact_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { 1.0 } else { 0.0 };
                if self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }
}

/// Invertible transform applied along the third dimension, with its inverse
/// precomputed and an orthogonality certificate.
#[derive(Debug, Clone)]
pub struct TransformMatrix {
    size: usize,
    entries: Matrix,
    inverse: Matrix,
    orthogonal_scaled: bool,
    /// The constant `c` with `M^T M = c I` when `orthogonal_scaled` holds.
    scale: f64,
    is_identity: bool,
}

impl TransformMatrix {
    /// Builds a transform from a square matrix, computing the inverse and
    /// checking `M * M^-1 = I` to 1e-10 elementwise.
    pub fn from_matrix(entries: Matrix) -> Result<Self> {
        if entries.rows() != entries.cols() {
            return Err(Error::InvalidTransform(format!(
                "transform must be square, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let inverse = entries.inverse()?;
        Self::from_parts(entries, inverse)
    }

    /// Builds a transform from a matrix and a known inverse.
    pub fn from_parts(entries: Matrix, inverse: Matrix) -> Result<Self> {
        let n = entries.rows();
        if entries.cols() != n || inverse.rows() != n || inverse.cols() != n {
            return Err(Error::InvalidTransform(
                "transform and inverse must be square and of equal size".into(),
            ));
        }
        let residual = entries.matmul(&inverse).max_abs_diff(&Matrix::identity(n));
        if residual > CONSTRUCTION_TOL {
            return Err(Error::InvalidTransform(format!(
                "entries * inverse deviates from identity by {residual:e} (> {CONSTRUCTION_TOL:e})"
            )));
        }
        // Orthogonality certificate: M^T M = c I for some c > 0.
        let gram = entries.transpose().matmul(&entries);
        let mut scale = 0.0;
        for i in 0..n {
            scale += gram.get(i, i);
        }
        scale /= n as f64;
        let mut ortho_residual = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { scale } else { 0.0 };
                ortho_residual = ortho_residual.max((gram.get(i, j) - want).abs());
            }
        }
        let orthogonal_scaled = scale > 0.0 && ortho_residual <= CONSTRUCTION_TOL;
        let is_identity = entries.is_exact_identity();
        Ok(Self {
            size: n,
            entries,
            inverse,
            orthogonal_scaled,
            scale: if orthogonal_scaled { scale } else { f64::NAN },
            is_identity,
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    #[inline]
    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    #[inline]
    pub fn orthogonal_scaled(&self) -> bool {
        self.orthogonal_scaled
    }

    /// `c` with `M^T M = c I`; meaningful only when `orthogonal_scaled`.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.is_identity
    }
}

/// Exact identity transform. Tubal products under it reduce to facewise
/// products; useful as an oracle in tests.
pub fn identity_transform(n3: usize) -> TransformMatrix {
    TransformMatrix::from_parts(Matrix::identity(n3), Matrix::identity(n3))
        .expect("identity transform is always valid")
}

/// Orthonormal DCT-II matrix. The default transform for training runs.
pub fn dct_transform(n3: usize) -> TransformMatrix {
    let n = n3 as f64;
    let mut m = Matrix::zeros(n3, n3);
    for i in 0..n3 {
        let c = if i == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        for j in 0..n3 {
            let angle = std::f64::consts::PI * (2 * j + 1) as f64 * i as f64 / (2.0 * n);
            m.set(i, j, c * angle.cos());
        }
    }
    let inv = m.transpose();
    TransformMatrix::from_parts(m, inv).expect("orthonormal DCT passes the inverse check")
}

/// Random orthogonal matrix from the QR factorization of a seeded Gaussian
/// matrix, deterministic per seed.
pub fn random_orthogonal_transform(n3: usize, seed: u64) -> TransformMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Matrix::zeros(n3, n3);
    for i in 0..n3 {
        for j in 0..n3 {
            let z: f64 = StandardNormal.sample(&mut rng);
            a.set(i, j, z);
        }
    }
    let q = householder_q(&a);
    let inv = q.transpose();
    TransformMatrix::from_parts(q, inv).expect("QR factor passes the inverse check")
}

/// Orthogonal factor of a Householder QR, with columns sign-fixed so the
/// diagonal of R is nonnegative (makes the factorization unique).
fn householder_q(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut r = a.clone();
    let mut q = Matrix::identity(n);
    for col in 0..n {
        // Householder vector for column `col` below the diagonal.
        let mut norm = 0.0;
        for i in col..n {
            norm += r.get(i, col) * r.get(i, col);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r.get(col, col) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n];
        v[col] = r.get(col, col) - alpha;
        for i in col + 1..n {
            v[i] = r.get(i, col);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // r <- (I - 2 v v^T / v^T v) r, accumulate the same reflection in q.
        for j in 0..n {
            let mut dot = 0.0;
            for i in col..n {
                dot += v[i] * r.get(i, j);
            }
            let f = 2.0 * dot / vtv;
            for i in col..n {
                r.set(i, j, r.get(i, j) - f * v[i]);
            }
        }
        for j in 0..n {
            let mut dot = 0.0;
            for i in col..n {
                dot += v[i] * q.get(j, i);
            }
            let f = 2.0 * dot / vtv;
            for i in col..n {
                q.set(j, i, q.get(j, i) - f * v[i]);
            }
        }
    }
    // Sign fix: make diag(R) nonnegative.
    for col in 0..n {
        if r.get(col, col) < 0.0 {
            for i in 0..n {
                q.set(i, col, -q.get(i, col));
            }
        }
    }
    q
}

/// Transform selection as it appears in configuration and on the CLI:
/// `dct`, `identity`, or `rand-orth:<seed>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformSpec {
    Identity,
    Dct,
    RandOrth { seed: u64 },
}

impl TransformSpec {
    pub fn build(self, n3: usize) -> TransformMatrix {
        match self {
            TransformSpec::Identity => identity_transform(n3),
            TransformSpec::Dct => dct_transform(n3),
            TransformSpec::RandOrth { seed } => random_orthogonal_transform(n3, seed),
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Identity => write!(f, "identity"),
            TransformSpec::Dct => write!(f, "dct"),
            TransformSpec::RandOrth { seed } => write!(f, "rand-orth:{seed}"),
        }
    }
}

impl std::str::FromStr for TransformSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(TransformSpec::Identity),
            "dct" => Ok(TransformSpec::Dct),
            other => {
                if let Some(seed) = other.strip_prefix("rand-orth:") {
                    let seed = seed.parse::<u64>().map_err(|_| {
                        Error::Config(format!("invalid rand-orth seed '{seed}'"))
                    })?;
                    Ok(TransformSpec::RandOrth { seed })
                } else {
                    Err(Error::Config(format!(
                        "unknown transform '{other}' (expected dct, identity, or rand-orth:<seed>)"
                    )))
                }
            }
        }
    }
}
