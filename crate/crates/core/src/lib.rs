//! Slice regular quaternionic functions on the unit ball: C-property
//! decompositions in the complex plane, slice extension and restriction,
//! intrinsic splittings, and the Bergman kernels of the disk and the ball.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod cbergman;
pub mod error;
pub mod holo;
pub mod linalg;
pub mod qalg;
pub mod quad;
pub mod sample;
pub mod sbergman;
pub mod scalar;
pub mod slicefn;
pub mod verify;

pub use cbergman::{
    bergman_project, disk_kernel_eval, kernel_ri_split, numeric_kernel_build, re_im_apply,
    re_im_apply_with, BergmanProjection, ComplexKernel,
};
pub use error::{Error, Result};
pub use holo::{
    c_anti_decompose, c_pair_decompose, classify, conj_reflect, holo_eval, Classification,
};
pub use qalg::{complete_frame, imaginary_unit_of, quat_conj, quat_mul, slice_coords};
pub use quad::{
    build_ball_rule, build_disk_rule, build_rectangle_rule, integrate_ball, integrate_slice,
    PlanarDomain,
};
pub use sbergman::{
    component_reproduce, first_kind_eval, gram_build, kernel_consistency, m_i_apply, m_i_exact,
    second_kind_eval, slice_reproduce, two_stage_reproduce,
};
pub use scalar::Scalar;
pub use slicefn::{
    alpha_beta_of, extend_p, extend_series, fourfold_assemble, fourfold_decompose, is_intrinsic,
    refined_split, restrict_q, split_basis, Intrinsic,
};
pub use verify::{Suite, Tolerances, VerifyOptions, VerifyReport};

pub type Quat = qalg::Quaternion<f64>;
pub type Unit = qalg::ImaginaryUnit<f64>;
pub type Frame64 = qalg::Frame<f64>;
pub type HoloSeries64 = holo::HoloSeries<f64>;
pub type SliceSeries64 = slicefn::SliceSeries<f64>;
pub type PlanarRule64 = quad::PlanarRule<f64>;
pub type BallRule64 = quad::BallRule<f64>;
pub type FirstKindKernel64 = sbergman::FirstKindKernel<f64>;
pub type ComplexKernel64 = cbergman::ComplexKernel<f64>;
