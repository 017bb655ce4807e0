//! Tensor completion with a biased deep tensor factorization network.
//!
//! The crate provides, bottom up:
//!
//! - [`tensor`]: a dense third-order tensor type in frontal-slice-major
//!   layout, plus elementwise plumbing.
//! - [`transform`]: invertible transforms along the third dimension
//!   (identity, orthonormal DCT-II, seeded random orthogonal).
//! - [`algebra`]: the tubal algebra built on those transforms — mode-3,
//!   facewise and `*_M` products, tubal transpose and tubal inverse.
//! - [`net`]: the factorization network itself — latent slice extraction,
//!   a biased multi-layer perceptron over the tubal algebra, bilinear
//!   pooling, the tubal softmax head, and the masked completion loss.
//! - [`backprop`]: hand-derived exact gradients for everything in `net`,
//!   plus an independent finite-difference checker.
//! - [`train`]: masking, gradient descent with early stopping, RMSE, and
//!   synthetic data generators.
//! - [`io`]: the bit-exact `T3B1`/`T3M1` container formats and ingestion of
//!   raw images, frame stacks and traffic CSV matrices.

pub mod algebra;
pub mod backprop;
pub mod error;
pub mod io;
pub mod mask;
pub mod net;
pub mod tensor;
pub mod train;
pub mod transform;

pub use algebra::{
    facewise_product, identity_tube, m_product, mode3_product, t_transpose, tubal_inverse,
};
pub use error::{Error, Result};
pub use mask::ObservationMask;
pub use tensor::Tensor3;
pub use transform::{
    dct_transform, identity_transform, random_orthogonal_transform, Matrix, TransformMatrix,
    TransformSpec,
};
