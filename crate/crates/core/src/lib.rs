//! Discrete Tchebichef transforms and their multiplierless approximations.
//!
//! * [`transform`]: Tchebichef polynomials, exact DTT/DCT matrices, separable
//!   2-D block transforms.
//! * [`approx`]: the rounding family `round(alpha · D_N · T_N)`, scaled
//!   approximations and orthogonality checks.
//! * [`fast`]: the 24-addition, 6-shift flow graph for `T₈*` and structural
//!   operation counts.
//! * [`metrics`]: coding gain, transform efficiency, proximity measures.
//! * [`ssim`]: structural similarity for image evaluation.
//! * [`optimizer`]: grid search and Pareto selection over `alpha`.
//! * [`codec`]: JPEG-style compression harness and quality sweeps.
//!
//! Loops over grid points, blocks and images run on rayon when the
//! `parallel` feature is enabled (the default); see [`exec::Execution`].

pub mod approx;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod fast;
pub mod image;
pub mod matrix;
pub mod metrics;
pub mod optimizer;
pub mod ssim;
pub mod transform;

pub use approx::{
    orthogonality_check, parametric_matrix, rounding, row_normalizer, scaling_diagonal,
    InversePolicy, LowComplexityMatrix, ParametricFamily, ScaledApproximation,
};
pub use codec::{
    compress_image, decode_block, encode_block, quality_curve, quant_table, CodecTransform,
    QuantTable, TransformId,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fast::{
    count_operations, fast_forward_8, near_inverse_8, Algorithm, FastAlgorithm8, OpCount,
};
pub use image::GrayImage;
pub use matrix::{IntMatrix, SquareMatrix};
pub use metrics::{MarkovModel, MetricsReport};
pub use optimizer::{enumerate_candidates, pareto_select, Candidate, SearchGrid};
pub use ssim::ssim;
pub use transform::{
    apply_2d, dct_matrix, dtt_matrix, inverse_2d, rho, tcheb_poly, BlockTransform, CoeffBlock,
    TchebichefBasis, TransformKind, TransformMatrix,
};
