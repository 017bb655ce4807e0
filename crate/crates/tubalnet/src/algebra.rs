//! The tubal tensor algebra: mode-3, facewise and transform-domain products.
//!
//! All operations are pure functions of immutable tensors. The facewise
//! product may execute slice-parallel; every slice of the output is written
//! by exactly one task with a fixed per-slice reduction order, so results are
//! identical regardless of thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{dims_str, Tensor3};
use crate::transform::{Matrix, TransformMatrix};

/// Tolerance below which a transform-domain tube entry is treated as zero
/// and inversion refused.
pub const TUBE_SINGULARITY_TOL: f64 = 1e-12;

/// Minimum slice workload before the facewise product goes parallel.
const PAR_FACEWISE_MIN_FLOPS: usize = 1 << 16;

/// Applies a `p x n3` matrix to every tube: `result(i, j, :) = m * a(i, j, :)`.
///
/// Equivalently, output slice `q` is the linear combination of input slices
/// with weights from row `q` of the matrix.
pub fn mode3_product(a: &Tensor3, m: &Matrix) -> Result<Tensor3> {
    let (n1, n2, n3) = a.dims();
    if m.cols() != n3 {
        return Err(Error::shape(
            "mode3_product",
            dims_str(a.dims()),
            format!("{}x{} matrix", m.rows(), m.cols()),
        ));
    }
    let plane = n1 * n2;
    let p = m.rows();
    let mut out = Tensor3::zeros((n1, n2, p));
    for q in 0..p {
        let row = m.row(q);
        let dst_range = q * plane..(q + 1) * plane;
        let (head, tail) = out.data_mut().split_at_mut(dst_range.start);
        let _ = head;
        let dst = &mut tail[..plane];
        for (k, &w) in row.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let src = a.frontal_data(k);
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    Ok(out)
}

/// Mode-3 product by the transform's forward matrix.
pub fn to_transform_domain(a: &Tensor3, tm: &TransformMatrix) -> Result<Tensor3> {
    if tm.is_identity() {
        return Ok(a.clone());
    }
    mode3_product(a, tm.entries())
}

/// Mode-3 product by the transform's inverse matrix.
pub fn from_transform_domain(a: &Tensor3, tm: &TransformMatrix) -> Result<Tensor3> {
    if tm.is_identity() {
        return Ok(a.clone());
    }
    mode3_product(a, tm.inverse())
}

/// Facewise product: independent matrix products of corresponding frontal
/// slices. `(l, p, n) x (p, m, n) -> (l, m, n)`.
pub fn facewise_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (l, p, n) = a.dims();
    let (p2, m, n2) = b.dims();
    if p != p2 || n != n2 {
        return Err(Error::shape("facewise_product", dims_str(a.dims()), dims_str(b.dims())));
    }
    let mut out = Tensor3::zeros((l, m, n));
    let flops = l * p * m;
    let slice_job = |k: usize, dst: &mut [f64]| {
        let sa = a.frontal_data(k);
        let sb = b.frontal_data(k);
        for i in 0..l {
            for q in 0..p {
                let av = sa[i * p + q];
                if av == 0.0 {
                    continue;
                }
                let brow = &sb[q * m..(q + 1) * m];
                let drow = &mut dst[i * m..(i + 1) * m];
                for (d, &bv) in drow.iter_mut().zip(brow) {
                    *d += av * bv;
                }
            }
        }
    };
    if n > 1 && flops >= PAR_FACEWISE_MIN_FLOPS {
        out.data_mut()
            .par_chunks_mut(l * m)
            .enumerate()
            .for_each(|(k, dst)| slice_job(k, dst));
    } else {
        for (k, dst) in out.data_mut().chunks_mut(l * m).enumerate() {
            slice_job(k, dst);
        }
    }
    Ok(out)
}

/// The tubal product: transform both operands along mode 3, multiply
/// facewise, transform back.
pub fn m_product(a: &Tensor3, b: &Tensor3, tm: &TransformMatrix) -> Result<Tensor3> {
    let n3 = a.dims().2;
    if tm.size() != n3 || b.dims().2 != n3 {
        return Err(Error::shape(
            "m_product",
            format!("{} / {}", dims_str(a.dims()), dims_str(b.dims())),
            format!("transform size {}", tm.size()),
        ));
    }
    if tm.is_identity() {
        // Transforms are skipped entirely, so this is bitwise the facewise product.
        return facewise_product(a, b);
    }
    let a_hat = to_transform_domain(a, tm)?;
    let b_hat = to_transform_domain(b, tm)?;
    let c_hat = facewise_product(&a_hat, &b_hat)?;
    from_transform_domain(&c_hat, tm)
}

/// Tubal transpose: the tensor whose transform-domain frontal slices are the
/// matrix transposes of the operand's.
///
/// For a real transform the mode-3 product acts on tubes and the transpose
/// permutes within slices, so the two commute and this is the plain
/// frontal-slice-wise transpose regardless of the transform.
pub fn t_transpose(a: &Tensor3, tm: &TransformMatrix) -> Result<Tensor3> {
    if tm.size() != a.dims().2 {
        return Err(Error::shape(
            "t_transpose",
            dims_str(a.dims()),
            format!("transform size {}", tm.size()),
        ));
    }
    Ok(a.slice_transpose())
}

/// The multiplicative identity tube: all transform-domain entries equal one.
pub fn identity_tube(tm: &TransformMatrix) -> Tensor3 {
    let n3 = tm.size();
    let ones = Tensor3::ones((1, 1, n3));
    from_transform_domain(&ones, tm).expect("shapes are consistent by construction")
}

/// Multiplicative inverse of a tube under the tubal product.
///
/// Defined through the transform domain: the entrywise reciprocal of the
/// transform-domain entries. Fails if any entry is within
/// [`TUBE_SINGULARITY_TOL`] of zero.
pub fn tubal_inverse(x: &Tensor3, tm: &TransformMatrix) -> Result<Tensor3> {
    let dims = x.dims();
    if dims.0 != 1 || dims.1 != 1 {
        return Err(Error::shape("tubal_inverse", "1x1xn tube".to_string(), dims_str(dims)));
    }
    if tm.size() != dims.2 {
        return Err(Error::shape(
            "tubal_inverse",
            dims_str(dims),
            format!("transform size {}", tm.size()),
        ));
    }
    let x_hat = to_transform_domain(x, tm)?;
    let mut recip = Vec::with_capacity(dims.2);
    for (k, &v) in x_hat.data().iter().enumerate() {
        if v.abs() <= TUBE_SINGULARITY_TOL {
            return Err(Error::SingularTube { index: k, value: v });
        }
        recip.push(1.0 / v);
    }
    from_transform_domain(&Tensor3::new_unchecked(dims, recip), tm)
}

pub(crate) fn max_abs_diff(a: &Tensor3, b: &Tensor3) -> f64 {
    debug_assert_eq!(a.dims(), b.dims());
    a.data()
        .iter()
        .zip(b.data())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{dct_transform, identity_transform, random_orthogonal_transform};

    fn tube(vals: &[f64]) -> Tensor3 {
        Tensor3::from_vec((1, 1, vals.len()), vals.to_vec()).unwrap()
    }

    /// Independent per-tube matrix-vector oracle for, the mode-3 product.
    fn mode3_oracle(a: &Tensor3, m: &Matrix) -> Tensor3 {
        let (n1, n2, n3) = a.dims();
        Tensor3::from_fn((n1, n2, m.rows()), |i, j, q| {
            (0..n3).map(|k| m.get(q, k) * a.get(i, j, k)).sum()
        })
    }

    /// Independent triple-loop matrix-multiply oracle for the facewise product.
    fn facewise_oracle(a: &Tensor3, b: &Tensor3) -> Tensor3 {
        let (l, p, n) = a.dims();
        let (_, m, _) = b.dims();
        Tensor3::from_fn((l, m, n), |i, j, k| {
            (0..p).map(|q| a.get(i, q, k) * b.get(q, j, k)).sum()
        })
    }

    #[test]
    fn mode3_permutation_and_identity() {
        let t = tube(&[1.0, 2.0]);
        let swap = Matrix::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(mode3_product(&t, &swap).unwrap().data(), &[2.0, 1.0]);

        let a = Tensor3::randn((3, 4, 5), 1.0, 1);
        let id = Matrix::identity(5);
        assert_eq!(mode3_product(&a, &id).unwrap(), a);
    }

    #[test]
    fn mode3_hadamard_matrix_case() {
        let a = Tensor3::ones((2, 2, 2));
        let m = Matrix::from_vec(2, 2, vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        let out = mode3_product(&a, &m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(out.get(i, j, 0), 2.0);
                assert_eq!(out.get(i, j, 1), 0.0);
            }
        }
        // cross-check against the per-tube oracle on random data
        let r = Tensor3::randn((2, 3, 2), 1.0, 5);
        let got = mode3_product(&r, &m).unwrap();
        let want = mode3_oracle(&r, &m);
        assert!(max_abs_diff(&got, &want) <= 1e-12);
    }

    #[test]
    fn mode3_rectangular_and_mismatch() {
        let a = Tensor3::randn((2, 2, 3), 1.0, 7);
        let m = Matrix::from_vec(2, 3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let out = mode3_product(&a, &m).unwrap();
        assert_eq!(out.dims(), (2, 2, 2));
        let bad = Matrix::identity(4);
        assert!(mode3_product(&a, &bad).is_err());
    }

    #[test]
    fn facewise_tube_and_identity_cases() {
        let a = tube(&[1.0, 2.0]);
        let b = tube(&[3.0, 4.0]);
        assert_eq!(facewise_product(&a, &b).unwrap().data(), &[3.0, 8.0]);

        let ident = Tensor3::from_fn((3, 3, 4), |i, j, _| if i == j { 1.0 } else { 0.0 });
        let x = Tensor3::randn((3, 5, 4), 1.0, 2);
        assert_eq!(facewise_product(&ident, &x).unwrap(), x);
    }

    #[test]
    fn facewise_matches_triple_loop_oracle() {
        let a = Tensor3::from_vec((2, 3, 2), (1..=12).map(f64::from).collect()).unwrap();
        let b = Tensor3::from_vec((3, 2, 2), (1..=12).map(f64::from).collect()).unwrap();
        let got = facewise_product(&a, &b).unwrap();
        let want = facewise_oracle(&a, &b);
        assert!(max_abs_diff(&got, &want) <= 1e-12);

        let r1 = Tensor3::randn((4, 6, 3), 1.0, 3);
        let r2 = Tensor3::randn((6, 5, 3), 1.0, 4);
        let got = facewise_product(&r1, &r2).unwrap();
        let want = facewise_oracle(&r1, &r2);
        assert!(max_abs_diff(&got, &want) <= 1e-12);

        assert!(facewise_product(&r1, &r1).is_err());
    }

    #[test]
    fn m_product_identity_equals_facewise_bitwise() {
        let tm = identity_transform(3);
        let a = Tensor3::randn((3, 4, 3), 1.0, 10);
        let b = Tensor3::randn((4, 2, 3), 1.0, 11);
        let via_m = m_product(&a, &b, &tm).unwrap();
        let face = facewise_product(&a, &b).unwrap();
        assert_eq!(via_m.data(), face.data());
    }

    #[test]
    fn m_product_hand_evaluated_case() {
        // M = [[1,1],[1,-1]]: a_hat = (3,-1), b_hat = (7,-1), facewise (21,1),
        // M^{-1} = M/2 gives (11,10).
        let m = Matrix::from_vec(2, 2, vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        let tm = TransformMatrix::from_matrix(m).unwrap();
        let a = tube(&[1.0, 2.0]);
        let b = tube(&[3.0, 4.0]);
        let c = m_product(&a, &b, &tm).unwrap();
        assert!((c.get(0, 0, 0) - 11.0).abs() < 1e-12);
        assert!((c.get(0, 0, 1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn m_product_associativity_random() {
        let tm = dct_transform(3);
        for seed in 0..20 {
            let a = Tensor3::randn((2, 2, 3), 1.0, 100 + seed);
            let b = Tensor3::randn((2, 2, 3), 1.0, 200 + seed);
            let c = Tensor3::randn((2, 2, 3), 1.0, 300 + seed);
            let left = m_product(&m_product(&a, &b, &tm).unwrap(), &c, &tm).unwrap();
            let right = m_product(&a, &m_product(&b, &c, &tm).unwrap(), &tm).unwrap();
            assert!(max_abs_diff(&left, &right) <= 1e-10);
        }
    }

    #[test]
    fn m_product_bilinearity() {
        let tm = random_orthogonal_transform(4, 17);
        let a = Tensor3::randn((3, 2, 4), 1.0, 21);
        let b = Tensor3::randn((2, 3, 4), 1.0, 22);
        let c = Tensor3::randn((2, 3, 4), 1.0, 23);
        let lhs = m_product(&a, &b.add(&c).unwrap(), &tm).unwrap();
        let rhs = m_product(&a, &b, &tm)
            .unwrap()
            .add(&m_product(&a, &c, &tm).unwrap())
            .unwrap();
        assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn t_transpose_properties() {
        let tm_id = identity_transform(4);
        let a = Tensor3::randn((2, 3, 4), 1.0, 31);
        let t = t_transpose(&a, &tm_id).unwrap();
        assert_eq!(t, a.slice_transpose());

        // involution
        let tm = dct_transform(4);
        let back = t_transpose(&t_transpose(&a, &tm).unwrap(), &tm).unwrap();
        assert!(max_abs_diff(&back, &a) <= 1e-12);

        // transform-domain slices really are transposed
        let a_hat = to_transform_domain(&a, &tm).unwrap();
        let t_hat = to_transform_domain(&t_transpose(&a, &tm).unwrap(), &tm).unwrap();
        assert!(max_abs_diff(&t_hat, &a_hat.slice_transpose()) <= 1e-12);

        // reversal: (a *_M b)^T = b^T *_M a^T
        let b = Tensor3::randn((3, 2, 4), 1.0, 32);
        let lhs = t_transpose(&m_product(&a, &b, &tm).unwrap(), &tm).unwrap();
        let rhs = m_product(
            &t_transpose(&b, &tm).unwrap(),
            &t_transpose(&a, &tm).unwrap(),
            &tm,
        )
        .unwrap();
        assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);

        assert!(t_transpose(&a, &identity_transform(3)).is_err());
    }

    #[test]
    fn mode3_round_trip() {
        for tm in [dct_transform(5), random_orthogonal_transform(5, 3)] {
            let a = Tensor3::randn((3, 2, 5), 1.0, 40);
            let fwd = to_transform_domain(&a, &tm).unwrap();
            let back = from_transform_domain(&fwd, &tm).unwrap();
            assert!(max_abs_diff(&back, &a) <= 1e-10);
        }
    }

    #[test]
    fn tubal_inverse_properties() {
        let tm = identity_transform(2);
        let e = identity_tube(&tm);
        assert_eq!(tubal_inverse(&e, &tm).unwrap(), e);
        let x = tube(&[2.0, 4.0]);
        assert_eq!(tubal_inverse(&x, &tm).unwrap().data(), &[0.5, 0.25]);

        let tm = dct_transform(4);
        let e = identity_tube(&tm);
        for seed in 0..10 {
            let x = tube(&[0.0; 4]).add(&Tensor3::randn((1, 1, 4), 1.0, 50 + seed)).unwrap();
            let inv = match tubal_inverse(&x, &tm) {
                Ok(inv) => inv,
                Err(Error::SingularTube { .. }) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            let prod = m_product(&inv, &x, &tm).unwrap();
            assert!(max_abs_diff(&prod, &e) <= 1e-10);
        }
    }

    #[test]
    fn tubal_inverse_rejects_singular() {
        let tm = identity_transform(2);
        let x = tube(&[1.0, 0.0]);
        assert!(matches!(
            tubal_inverse(&x, &tm),
            Err(Error::SingularTube { index: 1, .. })
        ));
        // non-tube shape rejected
        let not_tube = Tensor3::ones((2, 1, 2));
        assert!(tubal_inverse(&not_tube, &tm).is_err());
    }

    #[test]
    fn identity_tube_sums_to_one_in_transform_domain() {
        for tm in [identity_transform(3), dct_transform(3), random_orthogonal_transform(3, 8)] {
            let e = identity_tube(&tm);
            let e_hat = to_transform_domain(&e, &tm).unwrap();
            for k in 0..3 {
                assert!((e_hat.get(0, 0, k) - 1.0).abs() <= 1e-12);
            }
        }
    }
}
