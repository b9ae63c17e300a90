use core::fmt;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors signalled by state constructors, integrators, and protocol steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// State norm deviates from 1 beyond the allowed tolerance.
    NotNormalized { norm_sqr: f64, tol: f64 },
    /// Bloch vector is not on the unit sphere (|r| differs from 1).
    NotOnSphere { norm: f64 },
    /// Bloch vector lies strictly inside the unit ball where a pure state
    /// was required.
    InteriorPoint { norm: f64 },
    /// Bloch vector lies outside the closed unit ball.
    OutsideBall { norm: f64 },
    /// Matrix is not Hermitian within tolerance.
    NonHermitian { deviation: f64 },
    /// Matrix fails a density-matrix requirement (unit trace, positivity).
    NotDensityMatrix { reason: &'static str },
    /// A parameter that must be finite is NaN or infinite.
    NonFinite { name: &'static str },
    /// Requested integrator step exceeds the configured maximum.
    StepTooLarge { dt: f64, dt_max: f64 },
    /// Step size is zero, negative, or non-finite.
    InvalidStep { dt: f64 },
    /// Segment duration is not (close to) an integer number of steps.
    DurationNotDivisible { duration: f64, dt: f64 },
    /// Segment duration must be strictly positive and finite.
    InvalidDuration { duration: f64 },
    /// State norm blew up during integration; step size is too large for
    /// the requested dynamics.
    NormBlowup { norm_sqr: f64, t: f64 },
    /// Particle number must be at least 1.
    NoParticles,
    /// Coefficient vector length does not match the particle number.
    LengthMismatch { expected: usize, got: usize },
    /// The two Fock states carry different particle numbers.
    ParticleMismatch { left: usize, right: usize },
    /// Eigensolver failed to converge for the given eigenvalue index.
    EigensolveFailed { index: usize },
    /// Readout construction requires (near-)orthogonal inputs.
    NotOrthogonal { overlap_sqr: f64, tol: f64 },
    /// Bloch angle outside [0, pi].
    ThetaOutOfRange { theta: f64 },
    /// Parameter violates a documented domain constraint.
    InvalidParameter { name: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormalized { norm_sqr, tol } => write!(
                f,
                "state not normalized: |psi|^2 = {norm_sqr} (tolerance {tol})"
            ),
            Error::NotOnSphere { norm } => {
                write!(f, "Bloch vector not on the unit sphere: |r| = {norm}")
            }
            Error::InteriorPoint { norm } => write!(
                f,
                "Bloch vector inside the unit ball (|r| = {norm}); pure state required"
            ),
            Error::OutsideBall { norm } => {
                write!(f, "Bloch vector outside the unit ball: |r| = {norm}")
            }
            Error::NonHermitian { deviation } => {
                write!(f, "matrix not Hermitian (deviation {deviation})")
            }
            Error::NotDensityMatrix { reason } => write!(f, "not a density matrix: {reason}"),
            Error::NonFinite { name } => write!(f, "parameter `{name}` must be finite"),
            Error::StepTooLarge { dt, dt_max } => {
                write!(f, "step dt = {dt} exceeds dt_max = {dt_max}")
            }
            Error::InvalidStep { dt } => write!(f, "invalid step size dt = {dt}"),
            Error::DurationNotDivisible { duration, dt } => write!(
                f,
                "segment duration {duration} is not an integer multiple of dt = {dt}"
            ),
            Error::InvalidDuration { duration } => {
                write!(f, "segment duration must be positive and finite, got {duration}")
            }
            Error::NormBlowup { norm_sqr, t } => write!(
                f,
                "norm drift |psi|^2 = {norm_sqr} at t = {t}; reduce the step size"
            ),
            Error::NoParticles => write!(f, "particle number must be at least 1"),
            Error::LengthMismatch { expected, got } => {
                write!(f, "coefficient length mismatch: expected {expected}, got {got}")
            }
            Error::ParticleMismatch { left, right } => {
                write!(f, "particle numbers differ: {left} vs {right}")
            }
            Error::EigensolveFailed { index } => {
                write!(f, "eigensolver failed to converge at index {index}")
            }
            Error::NotOrthogonal { overlap_sqr, tol } => write!(
                f,
                "inputs not orthogonal: |<a|b>|^2 = {overlap_sqr} exceeds tolerance {tol}"
            ),
            Error::ThetaOutOfRange { theta } => {
                write!(f, "Bloch angle {theta} outside [0, pi]")
            }
            Error::InvalidParameter { name } => write!(f, "invalid parameter `{name}`"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
