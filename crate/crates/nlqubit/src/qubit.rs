//! State representations and Bloch-sphere geometry.
//!
//! A [`QubitAmplitudes`] is a normalized pair of complex amplitudes — the
//! mean-field state of the condensate qubit. A [`BlochVector`] is its
//! geometric view; interior points of the Bloch ball are *not*
//! representable as amplitudes and appear only as 2x2 density matrices
//! ([`Mat2`]), so purity is a type-level invariant.
//!
//! All values are immutable after construction and freely shareable
//! across threads.

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::{Error, Result};

/// Normalization tolerance enforced at construction.
pub const NORM_TOL_CONSTRUCT: f64 = 1e-12;
/// Normalization tolerance accepted after propagation (integrator drift).
pub const NORM_TOL_EVOLVED: f64 = 1e-9;
/// Tolerance for membership on the unit sphere / ball.
pub const SPHERE_TOL: f64 = 1e-9;

/// Pure qubit state (psi0, psi1) with |psi0|^2 + |psi1|^2 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAmplitudes {
    psi0: Complex64,
    psi1: Complex64,
}

impl QubitAmplitudes {
    /// Builds a state, enforcing normalization within `1e-12`.
    pub fn new(psi0: Complex64, psi1: Complex64) -> Result<Self> {
        let norm_sqr = psi0.norm_sqr() + psi1.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL_CONSTRUCT {
            return Err(Error::NotNormalized {
                norm_sqr,
                tol: NORM_TOL_CONSTRUCT,
            });
        }
        Ok(Self { psi0, psi1 })
    }

    /// Rescales the pair to unit norm and builds the state.
    pub fn normalized(psi0: Complex64, psi1: Complex64) -> Result<Self> {
        let norm_sqr = psi0.norm_sqr() + psi1.norm_sqr();
        if !norm_sqr.is_finite() || norm_sqr <= 0.0 {
            return Err(Error::NotNormalized {
                norm_sqr,
                tol: NORM_TOL_CONSTRUCT,
            });
        }
        let inv = 1.0 / norm_sqr.sqrt();
        Ok(Self {
            psi0: psi0 * inv,
            psi1: psi1 * inv,
        })
    }

    /// Integrator-internal constructor; skips the normalization check.
    /// Norm drift is monitored separately and surfaces as
    /// [`Error::NormBlowup`], never hidden by renormalization.
    pub(crate) fn new_unchecked(psi0: Complex64, psi1: Complex64) -> Self {
        Self { psi0, psi1 }
    }

    /// Logical |0>: all atoms without circulation.
    pub fn ket0() -> Self {
        Self {
            psi0: Complex64::new(1.0, 0.0),
            psi1: Complex64::new(0.0, 0.0),
        }
    }

    /// Logical |1>: all atoms carrying one quantum of circulation.
    pub fn ket1() -> Self {
        Self {
            psi0: Complex64::new(0.0, 0.0),
            psi1: Complex64::new(1.0, 0.0),
        }
    }

    pub fn psi0(&self) -> Complex64 {
        self.psi0
    }

    pub fn psi1(&self) -> Complex64 {
        self.psi1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi0.norm_sqr() + self.psi1.norm_sqr()
    }

    /// z Bloch coordinate |psi0|^2 - |psi1|^2, computed from the raw
    /// amplitudes (no normalization check). This is the quantity entering
    /// the nonlinear term of the equation of motion.
    pub fn bloch_z(&self) -> f64 {
        self.psi0.norm_sqr() - self.psi1.norm_sqr()
    }

    /// Raw Bloch coordinates without the normalization gate.
    pub(crate) fn bloch_xyz(&self) -> (f64, f64, f64) {
        let w = self.psi0.conj() * self.psi1;
        (2.0 * w.re, 2.0 * w.im, self.bloch_z())
    }

    /// Maps the state to its Bloch vector:
    /// x = 2 Re(conj(psi0) psi1), y = 2 Im(conj(psi0) psi1),
    /// z = |psi0|^2 - |psi1|^2.
    ///
    /// Rejects states whose norm has drifted beyond `1e-9`.
    pub fn to_bloch(&self) -> Result<BlochVector> {
        let norm_sqr = self.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL_EVOLVED {
            return Err(Error::NotNormalized {
                norm_sqr,
                tol: NORM_TOL_EVOLVED,
            });
        }
        let (x, y, z) = self.bloch_xyz();
        BlochVector::new(x, y, z)
    }

    /// Inverse of [`Self::to_bloch`] up to global phase. Requires |r| = 1
    /// within `1e-9`; interior points have no amplitude representation.
    ///
    /// Phase convention: psi0 is real and non-negative; at the south pole
    /// (psi0 = 0) psi1 is real and non-negative instead.
    pub fn from_bloch(r: &BlochVector) -> Result<Self> {
        let norm = r.norm();
        if (norm - 1.0).abs() > SPHERE_TOL {
            if norm < 1.0 {
                return Err(Error::InteriorPoint { norm });
            }
            return Err(Error::NotOnSphere { norm });
        }
        let z = (r.z / norm).clamp(-1.0, 1.0);
        let half_polar = (z.acos()) * 0.5;
        let (s, c) = (half_polar.sin(), half_polar.cos());
        let phi = if s.abs() < 1e-300 || c.abs() < 1e-300 {
            // At a pole the azimuth is undefined; pick 0 so the south pole
            // maps to (0, 1) exactly.
            0.0
        } else {
            r.y.atan2(r.x)
        };
        Self::normalized(
            Complex64::new(c, 0.0),
            Complex64::from_polar(s, phi),
        )
    }

    /// Inner product <self|other>.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.psi0.conj() * other.psi0 + self.psi1.conj() * other.psi1
    }

    /// Trace distance ||rho_a - rho_b||_1 between the two pure states,
    /// computed from their density matrices. Equals 2|sin(theta/2)| where
    /// theta is the Bloch angle between the states.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = self.density_matrix().sub(&other.density_matrix());
        let (lo, hi) = diff.hermitian_eigenvalues();
        lo.abs() + hi.abs()
    }

    /// Projector |psi><psi| as a 2x2 matrix.
    pub fn density_matrix(&self) -> Mat2 {
        let p0 = self.psi0;
        let p1 = self.psi1;
        Mat2::new([
            [p0 * p0.conj(), p0 * p1.conj()],
            [p1 * p0.conj(), p1 * p1.conj()],
        ])
    }

    /// Global-phase-free componentwise comparison: distance up to a phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let ov = self.overlap(other);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let d0 = (other.psi0 - self.psi0 * phase).norm();
        let d1 = (other.psi1 - self.psi1 * phase).norm();
        d0.max(d1)
    }
}

/// Real 3-vector on or inside the unit Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    /// Builds a Bloch vector, rejecting points outside the closed unit
    /// ball (beyond `1e-9`). Interior points are valid: they describe
    /// mixed states, representable only as density matrices.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sqr = x * x + y * y + z * z;
        if !norm_sqr.is_finite() {
            return Err(Error::NonFinite { name: "bloch" });
        }
        if norm_sqr > 1.0 + SPHERE_TOL {
            return Err(Error::OutsideBall {
                norm: norm_sqr.sqrt(),
            });
        }
        Ok(Self { x, y, z })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Pure-state amplitudes for this point; errors on interior points.
    pub fn to_amplitudes(&self) -> Result<QubitAmplitudes> {
        QubitAmplitudes::from_bloch(self)
    }

    /// Density matrix (1 + r.sigma)/2; valid anywhere in the ball.
    pub fn density_matrix(&self) -> Mat2 {
        let half = 0.5;
        Mat2::new([
            [
                Complex64::new(half * (1.0 + self.z), 0.0),
                Complex64::new(half * self.x, -half * self.y),
            ],
            [
                Complex64::new(half * self.x, half * self.y),
                Complex64::new(half * (1.0 - self.z), 0.0),
            ],
        ])
    }
}

/// Dense complex 2x2 matrix. Used for Hamiltonians, density matrices, and
/// readout unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self {
            m: [[Complex64::new(0.0, 0.0); 2]; 2],
        }
    }

    pub fn identity() -> Self {
        let mut out = Self::zero();
        out.m[0][0] = Complex64::new(1.0, 0.0);
        out.m[1][1] = Complex64::new(1.0, 0.0);
        out
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] - other.m[r][c];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
        (
            self.m[0][0] * v.0 + self.m[0][1] * v.1,
            self.m[1][0] * v.0 + self.m[1][1] * v.1,
        )
    }

    /// Applies the matrix to a pure state, renormalizing rounding residue.
    pub fn apply(&self, q: &QubitAmplitudes) -> Result<QubitAmplitudes> {
        let (a, b) = self.mul_vec((q.psi0(), q.psi1()));
        QubitAmplitudes::normalized(a, b)
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d01 = (self.m[0][1] - self.m[1][0].conj()).norm();
        d01.max(self.m[0][0].im.abs()).max(self.m[1][1].im.abs())
    }

    /// Eigenvalues of a Hermitian 2x2 matrix, ascending. The imaginary
    /// parts of the diagonal are ignored; callers validate Hermiticity.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + self.m[0][1].norm_sqr()).sqrt();
        (mean - disc, mean + disc)
    }
}

/// Trace distance tr sqrt((rho1-rho2)^dag (rho1-rho2)) between two 2x2
/// density matrices; supports mixed states.
///
/// Both inputs must be Hermitian, unit-trace, and positive semidefinite
/// within `1e-9`.
pub fn trace_distance_matrices(rho1: &Mat2, rho2: &Mat2) -> Result<f64> {
    for rho in [rho1, rho2] {
        let herm = rho.hermiticity_deviation();
        if herm > SPHERE_TOL {
            return Err(Error::NonHermitian { deviation: herm });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotDensityMatrix {
                reason: "trace differs from 1",
            });
        }
        let (lo, _) = rho.hermitian_eigenvalues();
        if lo < -SPHERE_TOL {
            return Err(Error::NotDensityMatrix {
                reason: "negative eigenvalue",
            });
        }
    }
    let diff = rho1.sub(rho2);
    let (lo, hi) = diff.hermitian_eigenvalues();
    Ok(lo.abs() + hi.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn basis_state_is_north_pole() {
        let r = QubitAmplitudes::ket0().to_bloch().unwrap();
        assert_eq!((r.x(), r.y(), r.z()), (0.0, 0.0, 1.0));
    }

    #[test]
    fn equal_superposition_points_along_x() {
        let q = QubitAmplitudes::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).unwrap();
        let r = q.to_bloch().unwrap();
        assert_abs_diff_eq!(r.x(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.y(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.z(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tilted_input_state_coordinates() {
        // State cos((pi-theta)/4)|0> + sin((pi-theta)/4)|1> at theta = 0.2
        // sits at (cos 0.1, 0, sin 0.1).
        let theta = 0.2f64;
        let half = (PI - theta) / 4.0;
        let q = QubitAmplitudes::new(re(half.cos()), re(half.sin())).unwrap();
        let r = q.to_bloch().unwrap();
        assert_abs_diff_eq!(r.x(), 0.1f64.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(r.y(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.z(), 0.1f64.sin(), epsilon = 1e-14);
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let err = QubitAmplitudes::new(re(1.0), re(1e-5)).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn from_bloch_south_pole() {
        let r = BlochVector::new(0.0, 0.0, -1.0).unwrap();
        let q = QubitAmplitudes::from_bloch(&r).unwrap();
        assert!(q.distance_up_to_phase(&QubitAmplitudes::ket1()) < 1e-14);
        assert!(q.psi1().im.abs() < 1e-15 && q.psi1().re > 0.0);
    }

    #[test]
    fn from_bloch_plus_x_and_plus_y() {
        let rx = BlochVector::new(1.0, 0.0, 0.0).unwrap();
        let q = QubitAmplitudes::from_bloch(&rx).unwrap();
        assert_abs_diff_eq!(q.psi0().re, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(q.psi1().re, FRAC_1_SQRT_2, epsilon = 1e-14);

        let ry = BlochVector::new(0.0, 1.0, 0.0).unwrap();
        let q = QubitAmplitudes::from_bloch(&ry).unwrap();
        assert_abs_diff_eq!(q.psi0().re, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(q.psi1().im, FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(q.psi1().re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn from_bloch_rejects_interior_points() {
        let r = BlochVector::new(0.1, 0.0, 0.0).unwrap();
        let err = QubitAmplitudes::from_bloch(&r).unwrap_err();
        assert!(matches!(err, Error::InteriorPoint { .. }));
    }

    #[test]
    fn bloch_vector_rejects_points_outside_ball() {
        assert!(matches!(
            BlochVector::new(1.0, 1.0, 0.0),
            Err(Error::OutsideBall { .. })
        ));
    }

    #[test]
    fn overlap_examples() {
        let a = QubitAmplitudes::ket0();
        let b = QubitAmplitudes::ket1();
        assert_eq!(a.overlap(&a), re(1.0));
        assert_eq!(a.overlap(&b), re(0.0));

        // Input pair with Bloch angle theta: |<a|b>|^2 = cos^2(theta/2).
        let theta = 0.37f64;
        let ha = (PI - theta) / 4.0;
        let hb = (PI + theta) / 4.0;
        let qa = QubitAmplitudes::new(re(ha.cos()), re(ha.sin())).unwrap();
        let qb = QubitAmplitudes::new(re(hb.cos()), re(hb.sin())).unwrap();
        assert_abs_diff_eq!(
            qa.overlap(&qb).norm_sqr(),
            (theta / 2.0).cos().powi(2),
            epsilon = 1e-14
        );
    }

    #[test]
    fn trace_distance_examples() {
        let a = QubitAmplitudes::ket0();
        assert_abs_diff_eq!(a.trace_distance(&a), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            a.trace_distance(&QubitAmplitudes::ket1()),
            2.0,
            epsilon = 1e-14
        );
        // theta = pi/2 pair: distance 2 sin(pi/4) = sqrt(2).
        let b = BlochVector::new(1.0, 0.0, 0.0)
            .unwrap()
            .to_amplitudes()
            .unwrap();
        assert_abs_diff_eq!(a.trace_distance(&b), 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn trace_distance_matrices_examples() {
        let pure0 = QubitAmplitudes::ket0().density_matrix();
        let pure1 = QubitAmplitudes::ket1().density_matrix();
        let mixed = BlochVector::new(0.0, 0.0, 0.0).unwrap().density_matrix();
        assert_abs_diff_eq!(
            trace_distance_matrices(&pure0, &pure0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            trace_distance_matrices(&pure0, &pure1).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        // diag(1,0) vs I/2: the difference has eigenvalues +-1/2.
        assert_abs_diff_eq!(
            trace_distance_matrices(&pure0, &mixed).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn trace_distance_matrices_rejects_non_hermitian() {
        let mut bad = QubitAmplitudes::ket0().density_matrix();
        bad = Mat2::new([
            [bad.get(0, 0), Complex64::new(0.3, 0.0)],
            [Complex64::new(0.0, 0.0), bad.get(1, 1)],
        ]);
        let rho = QubitAmplitudes::ket1().density_matrix();
        assert!(matches!(
            trace_distance_matrices(&bad, &rho),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn trace_distance_matrices_rejects_non_unit_trace() {
        let half = BlochVector::new(0.0, 0.0, 0.0).unwrap().density_matrix();
        let bad = Mat2::new([
            [re(0.9), re(0.0)],
            [re(0.0), re(0.0)],
        ]);
        assert!(matches!(
            trace_distance_matrices(&bad, &half),
            Err(Error::NotDensityMatrix { .. })
        ));
    }

    #[test]
    fn types_are_send_and_sync() {
        fn check<T: Send + Sync>() {}
        check::<QubitAmplitudes>();
        check::<BlochVector>();
        check::<Mat2>();
    }
}
