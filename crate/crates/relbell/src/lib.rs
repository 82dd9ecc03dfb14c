//! Bell-test statistics for relativistic spin-1/2 singlet pairs.
//!
//! In a Stern-Gerlach measurement the quantization axis is set by the
//! apparatus magnetic field as seen in the measured particle's rest frame.
//! For a fast particle the Lorentz transformation tilts and stretches that
//! field, so the effective measurement axes — and with them the CHSH
//! quantity S and its Tsirelson-bound violation — depend on the particle
//! momentum and on the motion of the observer.
//!
//! The crate is organized bottom-up:
//!
//! * [`vec3`] — minimal 3-vector arithmetic.
//! * [`kinematics`] — Lorentz transformation of electromagnetic fields and
//!   the rest-frame field maps (single boost and boost-composition forms).
//! * [`correlations`] — quantization axes, the singlet expectation
//!   -(a . b), and the pointwise CHSH quantity S(v, theta, phi).
//! * [`averaging`] — Gauss-Legendre / midpoint quadrature of S over an
//!   acceptance cone of particle momenta, in both the literal-mean and
//!   averaged-correlator forms.
//! * [`solvers`] — maximization of S over the particle-b field directions
//!   and the exact inverse problem of compensating lab fields.
//!
//! All computations are deterministic: fixed quadrature orderings, seeded
//! optimizer restarts, and no time- or thread-dependent state.

// Validation throughout uses negated comparisons (`!(x < limit)`) on
// purpose: they reject NaN inputs along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod correlations;
pub mod error;
pub mod kinematics;
pub mod solvers;
pub mod vec3;

pub use averaging::{
    averaged_correlators_s, averaged_s, cone_averages, gauss_legendre, AcceptanceCone,
    AveragingMode, ConeAverages, QuadratureSpec,
};
pub use correlations::{
    chsh_s, particle_a_axis, quantization_axis, singlet_expectation, ChshSettings, FrameConfig,
    MomentumShell,
};
pub use error::{Error, Result};
pub use kinematics::{
    boost_field, gamma, rest_frame_field, rest_frame_field_boosted, EmField, ORTHOGONALITY_TOL,
};
pub use solvers::{
    compensation_matrix, compensation_residual, optimize_directions, optimize_directions_with,
    solve_compensating_field, Mat3, OptimizationResult,
};
pub use vec3::Vec3;
