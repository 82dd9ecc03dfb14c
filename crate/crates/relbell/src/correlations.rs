//! Measurement quantization axes, the singlet joint expectation, and the
//! pointwise CHSH quantity S(v_b, theta, phi).
//!
//! In a Stern-Gerlach measurement the quantization axis is the direction of
//! the apparatus magnetic field in the measured particle's rest frame, so the
//! axis depends on the particle velocity through the field transformations in
//! [`crate::kinematics`].

use crate::error::{Error, Result};
use crate::kinematics::{self, ORTHOGONALITY_TOL};
use crate::vec3::Vec3;

/// Unit-norm tolerance for axis arguments of [`singlet_expectation`].
pub const UNIT_AXIS_TOL: f64 = 1e-9;

/// Isotropic momentum distribution on the shell |p| = m gamma v.
///
/// Only `speed_b` influences correlations; `mass_b` fixes the shell momentum
/// scale and is carried for completeness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumShell {
    speed_b: f64,
    mass_b: f64,
}

impl MomentumShell {
    pub fn new(speed_b: f64, mass_b: f64) -> Result<Self> {
        if !(speed_b > 0.0 && speed_b < 1.0) {
            return Err(Error::InvalidShellSpeed { speed: speed_b });
        }
        if !(mass_b > 0.0 && mass_b.is_finite()) {
            return Err(Error::InvalidShellMass { mass: mass_b });
        }
        Ok(MomentumShell { speed_b, mass_b })
    }

    pub fn speed_b(&self) -> f64 {
        self.speed_b
    }

    pub fn mass_b(&self) -> f64 {
        self.mass_b
    }

    /// Shell momentum modulus m gamma v.
    pub fn momentum(&self) -> f64 {
        let g = 1.0 / (1.0 - self.speed_b * self.speed_b).sqrt();
        self.mass_b * g * self.speed_b
    }
}

/// The four lab-frame apparatus field directions of a CHSH measurement,
/// stored unit-normalized: a1, a2 for particle a and b1, b2 for particle b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    a1: Vec3,
    a2: Vec3,
    b1: Vec3,
    b2: Vec3,
}

impl ChshSettings {
    /// Builds settings from (possibly unnormalized) nonzero field directions.
    pub fn new(a1: Vec3, a2: Vec3, b1: Vec3, b2: Vec3) -> Result<Self> {
        Ok(ChshSettings {
            a1: a1.normalized()?,
            a2: a2.normalized()?,
            b1: b1.normalized()?,
            b2: b2.normalized()?,
        })
    }

    /// The canonical maximally violating settings:
    /// a1 = x, a2 = y, b1 = (x+y)/sqrt(2), b2 = (x-y)/sqrt(2).
    pub fn standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a1: Vec3::X,
            a2: Vec3::Y,
            b1: Vec3::new(s, s, 0.0),
            b2: Vec3::new(s, -s, 0.0),
        }
    }

    pub fn a1(&self) -> Vec3 {
        self.a1
    }

    pub fn a2(&self) -> Vec3 {
        self.a2
    }

    pub fn b1(&self) -> Vec3 {
        self.b1
    }

    pub fn b2(&self) -> Vec3 {
        self.b2
    }
}

/// Velocity of the particles' center-of-mass frame relative to the observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    beta: Vec3,
}

impl FrameConfig {
    pub fn new(beta: Vec3) -> Result<Self> {
        if !(beta.norm_sqr() < 1.0) {
            return Err(Error::SuperluminalVelocity { speed: beta.norm() });
        }
        Ok(FrameConfig { beta })
    }

    /// Observer at rest in the center-of-mass frame (beta = 0).
    pub fn rest() -> Self {
        FrameConfig { beta: Vec3::ZERO }
    }

    /// Center-of-mass frame moving along +z at speed `beta`.
    pub fn along_z(beta: f64) -> Result<Self> {
        FrameConfig::new(Vec3::new(0.0, 0.0, beta))
    }

    pub fn beta(&self) -> Vec3 {
        self.beta
    }

    pub fn is_rest(&self) -> bool {
        self.beta == Vec3::ZERO
    }
}

/// Quantization axis for a spin measurement on particle b: the direction of
/// the apparatus field `b_lab` transformed into the rest frame of a particle
/// moving at `v_com` in a center-of-mass frame that itself moves at
/// `frame.beta` relative to the lab.
pub fn quantization_axis(b_lab: Vec3, v_com: Vec3, frame: &FrameConfig) -> Result<Vec3> {
    kinematics::rest_frame_field_boosted(b_lab, v_com, frame.beta())?.normalized()
}

/// Quantization axis for particle a, which is non-relativistic in the
/// center-of-mass frame: the lab-frame field direction itself. Fields
/// orthogonal to the observer boost keep their direction, so the boost does
/// not tilt this axis; orthogonality is still required for validity.
pub fn particle_a_axis(b_lab: Vec3, frame: &FrameConfig) -> Result<Vec3> {
    let beta = frame.beta();
    let bn = b_lab.norm();
    let betan = beta.norm();
    if bn > 0.0 && betan > 0.0 {
        let misalignment = b_lab.dot(beta).abs() / (bn * betan);
        if misalignment > ORTHOGONALITY_TOL {
            return Err(Error::FieldNotOrthogonalToBoost { misalignment });
        }
    }
    b_lab.normalized()
}

/// Joint spin expectation for the singlet state measured along unit axes
/// `n_a` and `n_b`: exactly -(n_a . n_b).
pub fn singlet_expectation(n_a: Vec3, n_b: Vec3) -> Result<f64> {
    n_a.check_unit(UNIT_AXIS_TOL)?;
    n_b.check_unit(UNIT_AXIS_TOL)?;
    Ok(-n_a.dot(n_b))
}

/// The CHSH quantity S for a particle-b momentum direction given in physics
/// spherical coordinates (polar `theta` from +z, azimuth `phi` from +x).
///
/// Particle-a axes follow the lab fields; particle-b axes are the rest-frame
/// images of the b fields at velocity `shell.speed_b` in direction
/// (theta, phi). Returns |E11 + E12 + E21 - E22|, which lies in [0, 2 sqrt 2].
pub fn chsh_s(
    settings: &ChshSettings,
    theta: f64,
    phi: f64,
    shell: &MomentumShell,
    frame: &FrameConfig,
) -> Result<f64> {
    check_angles(theta, phi)?;
    let eval = ChshEvaluator::new(settings, shell.speed_b(), frame)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(eval.signed_sum(st, ct, sp, cp).abs())
}

pub(crate) fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidAngle { value: theta });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidAngle { value: phi });
    }
    Ok(())
}

/// Prevalidated evaluator for the signed CHSH sum E11 + E12 + E21 - E22 as a
/// function of the particle-b direction; used by the pointwise S and by the
/// acceptance-cone quadrature, which calls it per node.
pub(crate) struct ChshEvaluator {
    a1: Vec3,
    a2: Vec3,
    // (unit field, beta x field) per particle-b setting
    b_fields: [(Vec3, Vec3); 2],
    speed: f64,
    gvgb: f64,
    coef2: f64,
}

impl ChshEvaluator {
    /// `speed` in [0, 1); speed 0 reproduces the non-relativistic axes.
    pub(crate) fn new(settings: &ChshSettings, speed: f64, frame: &FrameConfig) -> Result<Self> {
        if !(0.0..1.0).contains(&speed) {
            return Err(Error::SuperluminalVelocity { speed });
        }
        let beta = frame.beta();
        let a1 = particle_a_axis(settings.a1(), frame)?;
        let a2 = particle_a_axis(settings.a2(), frame)?;
        // b-field orthogonality to beta, same precondition as the kinematics.
        for b in [settings.b1(), settings.b2()] {
            let betan = beta.norm();
            if betan > 0.0 {
                let misalignment = b.dot(beta).abs() / (b.norm() * betan);
                if misalignment > ORTHOGONALITY_TOL {
                    return Err(Error::FieldNotOrthogonalToBoost { misalignment });
                }
            }
        }
        let gv = 1.0 / (1.0 - speed * speed).sqrt();
        let gb = 1.0 / (1.0 - beta.norm_sqr()).sqrt();
        Ok(ChshEvaluator {
            a1,
            a2,
            b_fields: [
                (settings.b1(), beta.cross(settings.b1())),
                (settings.b2(), beta.cross(settings.b2())),
            ],
            speed,
            gvgb: gv * gb,
            coef2: gb * gv * gv / (gv + 1.0),
        })
    }

    /// Builds the evaluator without the b-field orthogonality checks. The
    /// direction optimizer moves the b fields over the whole sphere, so the
    /// two-boost field map is evaluated as the literal linear formula there;
    /// at beta = 0 the relaxation changes nothing. The caller is responsible
    /// for speed range and a-axis validity.
    pub(crate) fn new_relaxed(settings: &ChshSettings, speed: f64, frame: &FrameConfig) -> Self {
        debug_assert!((0.0..1.0).contains(&speed));
        let beta = frame.beta();
        let gv = 1.0 / (1.0 - speed * speed).sqrt();
        let gb = 1.0 / (1.0 - beta.norm_sqr()).sqrt();
        ChshEvaluator {
            a1: settings.a1(),
            a2: settings.a2(),
            b_fields: [
                (settings.b1(), beta.cross(settings.b1())),
                (settings.b2(), beta.cross(settings.b2())),
            ],
            speed,
            gvgb: gv * gb,
            coef2: gb * gv * gv / (gv + 1.0),
        }
    }

    /// Signed sum for the particle-b direction with the given polar/azimuthal
    /// sines and cosines. The caller guarantees st >= 0 and unit (st, ct),
    /// (sp, cp) pairs.
    pub(crate) fn signed_sum(&self, st: f64, ct: f64, sp: f64, cp: f64) -> f64 {
        let v = Vec3::new(self.speed * st * cp, self.speed * st * sp, self.speed * ct);
        let mut axes = [Vec3::ZERO; 2];
        for (axis, (b, beta_cross_b)) in axes.iter_mut().zip(self.b_fields.iter()) {
            let bracket = *b - v.cross(*beta_cross_b);
            let b0 = self.gvgb * bracket - self.coef2 * v.dot(*b) * v;
            // The rest-frame map is invertible for subluminal speeds, so b0
            // cannot vanish for a unit field.
            *axis = b0 / b0.norm();
        }
        let [n1, n2] = axes;
        -self.a1.dot(n1 + n2) - self.a2.dot(n1 - n2)
    }
}
