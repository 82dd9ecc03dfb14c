//! Error type shared across the crate.

/// Errors produced by validation and numerical operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A vector used as a velocity has Euclidean norm >= 1 (in units of c).
    #[error("superluminal velocity: |v| = {speed}")]
    SuperluminalVelocity { speed: f64 },

    /// A field or axis that must be nonzero was zero (or not finite).
    #[error("undefined axis: zero or non-finite field vector")]
    UndefinedAxis,

    /// A lab-frame field is not orthogonal to the observer boost, outside the
    /// regime where the single-formula boosted rest-frame field is valid.
    #[error("field not orthogonal to boost: |b.beta| / (|b||beta|) = {misalignment:.3e}")]
    FieldNotOrthogonalToBoost { misalignment: f64 },

    /// An input that must be a unit vector was not, beyond tolerance.
    #[error("non-unit axis: |n| = {norm}")]
    NonUnitAxis { norm: f64 },

    /// Momentum-shell speed outside the open interval (0, 1).
    #[error("shell speed {speed} outside (0, 1)")]
    InvalidShellSpeed { speed: f64 },

    /// Momentum-shell mass not positive and finite.
    #[error("shell mass {mass} must be positive and finite")]
    InvalidShellMass { mass: f64 },

    /// Acceptance-cone half angle outside (0, pi].
    #[error("acceptance angle {theta_prime} outside (0, pi]")]
    InvalidAcceptanceAngle { theta_prime: f64 },

    /// Quadrature node counts violate the rule requirements.
    #[error("invalid quadrature: n_theta = {n_theta}, n_phi = {n_phi} (need n_theta >= 2, n_phi >= 4 and even)")]
    InvalidQuadrature { n_theta: usize, n_phi: usize },

    /// Momentum direction angle out of range: polar angles must lie in
    /// [0, pi] and all angles must be finite.
    #[error("invalid angle {value}: polar angle must lie in [0, pi] and be finite")]
    InvalidAngle { value: f64 },

    /// The linear system tying lab fields to rest-frame axes is numerically singular.
    #[error("degenerate configuration: condition number {condition:.3e}")]
    DegenerateConfiguration { condition: f64 },

    /// Optimizer tolerance must be positive and finite.
    #[error("invalid tolerance {tol}: must be positive and finite")]
    InvalidTolerance { tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
