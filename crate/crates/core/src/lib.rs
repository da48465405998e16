//! Numerical evaluation of the free Gamma law: the free-probability
//! analogue of the Gamma distribution with shape `alpha`, obtained as the
//! free additive power of the exponential law.
//!
//! The density is computed through the subordination function
//! `H(z) = z + α + α∫ t e^{-t}/(z − t) dt`: on the curve where `H` is real,
//! its real trace parametrises the support and the curve height gives the
//! density. See [`AlphaContext`] for the curve and [`density`] for the law.

// `!(a > b)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quad;
mod roots;
pub mod landscape;
pub mod density;
pub mod moments;
pub mod transforms;

pub use error::{Error, Result};
pub use density::{density, density_table, edge_coefficient, find_mode, invert_boundary_image, small_alpha_profile, DensityTable, GridKind, ModeReport};
pub use landscape::{AlphaContext, CurvePoint};
pub use moments::{free_cumulants, moments_from_cumulants, moments_from_density, small_alpha_moment_limit, DensityMoments};
pub use transforms::{cauchy_transform_exp, cauchy_transform_from_density, subordinator, subordinator_derivative, verify_subordination, voiculescu_transform};
pub use quad::{poisson_integral, poisson_integral_negative_axis, IntegralResult, QuadratureSettings};

/// Complex values returned by the transform layer.
pub type ComplexValue = num_complex::Complex64;
