//! Special-relativistic primitives: Lorentz factors and the transformation of
//! electromagnetic fields into moving frames, with c = 1 throughout.

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Relative tolerance for the field-orthogonality precondition of
/// [`rest_frame_field_boosted`].
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// An electromagnetic field pair (E, B) in one frame, same unit system, c = 1.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmField {
    pub e: Vec3,
    pub b: Vec3,
}

impl EmField {
    pub const fn new(e: Vec3, b: Vec3) -> Self {
        EmField { e, b }
    }

    /// Pure magnetic field, E = 0.
    pub const fn magnetic(b: Vec3) -> Self {
        EmField { e: Vec3::ZERO, b }
    }

    /// The Lorentz invariant B^2 - E^2.
    pub fn invariant(self) -> f64 {
        self.b.norm_sqr() - self.e.norm_sqr()
    }
}

fn check_velocity(v: Vec3) -> Result<()> {
    let n2 = v.norm_sqr();
    if !(n2 < 1.0) {
        // NaN also lands here.
        return Err(Error::SuperluminalVelocity { speed: n2.sqrt() });
    }
    Ok(())
}

/// Lorentz factor 1/sqrt(1 - |v|^2) for a subluminal velocity (units of c).
pub fn gamma(v: Vec3) -> Result<f64> {
    check_velocity(v)?;
    Ok(1.0 / (1.0 - v.norm_sqr()).sqrt())
}

/// Transforms an electromagnetic field into the frame co-moving at velocity `v`.
///
/// With c = 1 and g = gamma(v):
///
/// ```text
/// E' = g (E + v x B) - g^2/(g+1) v (v.E)
/// B' = g (B - v x E) - g^2/(g+1) v (v.B)
/// ```
pub fn boost_field(f: EmField, v: Vec3) -> Result<EmField> {
    check_velocity(v)?;
    let g = 1.0 / (1.0 - v.norm_sqr()).sqrt();
    let coef = g * g / (g + 1.0);
    let e = g * (f.e + v.cross(f.b)) - coef * v.dot(f.e) * v;
    let b = g * (f.b - v.cross(f.e)) - coef * v.dot(f.b) * v;
    Ok(EmField { e, b })
}

/// Magnetic field seen in the rest frame of a particle moving at `v` through
/// a lab-frame magnetic field `b_lab` (no lab electric field):
///
/// ```text
/// B_rest = g B - g^2 (v.B)/(g+1) v
/// ```
///
/// Equals the magnetic part of [`boost_field`] applied to (E = 0, B = b_lab).
pub fn rest_frame_field(b_lab: Vec3, v: Vec3) -> Result<Vec3> {
    check_velocity(v)?;
    let g = 1.0 / (1.0 - v.norm_sqr()).sqrt();
    // Same evaluation order as the boosted form so the beta = 0 reduction is
    // exact, not merely close.
    let coef = g * g / (g + 1.0);
    Ok(g * b_lab - coef * v.dot(b_lab) * v)
}

/// Magnetic field in the rest frame of a particle that moves at `v_com` in a
/// center-of-mass frame which itself moves at `beta` relative to the frame
/// where `b_lab` is static:
///
/// ```text
/// B_rest = g_v g_b [B - v x (beta x B)] - g_b g_v^2/(g_v+1) v (v.B)
/// ```
///
/// This single formula is valid only for `b_lab` orthogonal to `beta` (so that
/// the intermediate frame sees E' = g_b beta x B and B' = g_b B); that is
/// enforced as a precondition. For general fields compose [`boost_field`]
/// twice instead.
pub fn rest_frame_field_boosted(b_lab: Vec3, v_com: Vec3, beta: Vec3) -> Result<Vec3> {
    check_velocity(v_com)?;
    check_velocity(beta)?;
    let bn = b_lab.norm();
    let betan = beta.norm();
    if bn > 0.0 && betan > 0.0 {
        let misalignment = b_lab.dot(beta).abs() / (bn * betan);
        if misalignment > ORTHOGONALITY_TOL {
            return Err(Error::FieldNotOrthogonalToBoost { misalignment });
        }
    }
    Ok(rest_frame_field_boosted_unchecked(b_lab, v_com, beta))
}

/// Same formula as [`rest_frame_field_boosted`] without the orthogonality
/// precondition; used where the formula itself is the prescription (inverse
/// compensation solving) rather than a derived physical identity.
pub(crate) fn rest_frame_field_boosted_unchecked(b_lab: Vec3, v_com: Vec3, beta: Vec3) -> Vec3 {
    let gv = 1.0 / (1.0 - v_com.norm_sqr()).sqrt();
    let gb = 1.0 / (1.0 - beta.norm_sqr()).sqrt();
    let bracket = b_lab - v_com.cross(beta.cross(b_lab));
    gv * gb * bracket - (gb * gv * gv / (gv + 1.0)) * v_com.dot(b_lab) * v_com
}
