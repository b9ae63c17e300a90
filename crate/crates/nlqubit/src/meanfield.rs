//! Nonlinear mean-field equation of motion and Bloch-sphere flows.
//!
//! The condensate qubit obeys
//!
//! ```text
//! d/dt (psi0, psi1) = -i H_eff (psi0, psi1),
//! H_eff = V01 sigma_x + B_z sigma_z + g (|psi0|^2 - |psi1|^2) sigma_z,
//! ```
//!
//! with hbar = 1 throughout; time is measured in the user's inverse energy
//! units. The first two terms generate rigid x and z rotations of the
//! Bloch sphere. The g term is a z-axis torsion: a z rotation whose rate
//! grows with the state's own z coordinate, vanishes on the equator, and
//! reverses sense in the southern hemisphere.
//!
//! Integration is classical fixed-step RK4. The integrator never
//! renormalizes: norm drift is an error signal for step-size selection,
//! monitored against a hard blow-up bound.
//!
//! Rotation convention: `rotate_x`/`rotate_z` apply exp(-i angle sigma/2),
//! a right-handed Bloch rotation by `angle` about the axis. Under
//! `H = h . sigma` the Bloch vector precesses as `dr/dt = 2 h x r`; every
//! sign in this crate follows from that convention.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::qubit::{BlochVector, Mat2, QubitAmplitudes, SPHERE_TOL};
use crate::{Error, Result};

/// Default step size is `DT_SCALE / max(|V01|, |Bz|, |g|)`.
pub const DT_SCALE: f64 = 1e-3;
/// Hard cap: steps larger than `DT_MAX_SCALE / scale` are rejected.
pub const DT_MAX_SCALE: f64 = 0.1;
/// Norm-squared drift beyond this aborts integration as a blow-up.
pub const NORM_BLOWUP_TOL: f64 = 1e-6;

/// Couplings (V01, Bz, g) driving the effective Hamiltonian.
/// g may take either sign: it derives from interaction constants as
/// (2K - K')/2, which can be negative even for repulsive interactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    v01: f64,
    bz: f64,
    g: f64,
}

impl EffectiveParams {
    pub fn new(v01: f64, bz: f64, g: f64) -> Result<Self> {
        if !v01.is_finite() {
            return Err(Error::NonFinite { name: "v01" });
        }
        if !bz.is_finite() {
            return Err(Error::NonFinite { name: "bz" });
        }
        if !g.is_finite() {
            return Err(Error::NonFinite { name: "g" });
        }
        Ok(Self { v01, bz, g })
    }

    /// Free evolution: all couplings zero.
    pub fn free() -> Self {
        Self {
            v01: 0.0,
            bz: 0.0,
            g: 0.0,
        }
    }

    /// Pure torsion of strength g.
    pub fn torsion(g: f64) -> Result<Self> {
        Self::new(0.0, 0.0, g)
    }

    pub fn v01(&self) -> f64 {
        self.v01
    }

    pub fn bz(&self) -> f64 {
        self.bz
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Dominant energy scale, used for step-size selection.
    pub fn scale(&self) -> f64 {
        self.v01.abs().max(self.bz.abs()).max(self.g.abs())
    }

    /// Suggested RK4 step, `1e-3 / scale`; `None` for free evolution.
    pub fn suggested_dt(&self) -> Option<f64> {
        let s = self.scale();
        (s > 0.0).then(|| DT_SCALE / s)
    }
}

/// Effective Hamiltonian V01 sigma_x + (Bz + g z(q)) sigma_z evaluated at
/// the state `q`; Hermitian by construction.
pub fn h_eff(q: &QubitAmplitudes, p: &EffectiveParams) -> Mat2 {
    let diag = p.bz + p.g * q.bloch_z();
    Mat2::new([
        [Complex64::new(diag, 0.0), Complex64::new(p.v01, 0.0)],
        [Complex64::new(p.v01, 0.0), Complex64::new(-diag, 0.0)],
    ])
}

/// State-feedback control laws usable inside a schedule segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeedbackRule {
    /// x-rotation feedback V01 = g x / 2 (Bz = 0): holds y = z along the
    /// torsion flow, the control used by the logarithmic-time
    /// discrimination protocol.
    HoldYZ { g: f64 },
}

impl FeedbackRule {
    /// Evaluates the control law at the given state. The law is queried at
    /// every integrator stage, so the feedback enters the vector field
    /// itself rather than being held across a step.
    pub fn params_for(&self, q: &QubitAmplitudes) -> EffectiveParams {
        match *self {
            FeedbackRule::HoldYZ { g } => {
                let (x, _, _) = q.bloch_xyz();
                EffectiveParams {
                    v01: 0.5 * g * x,
                    bz: 0.0,
                    g,
                }
            }
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            // |V01| <= |g|/2 under the hold rule.
            FeedbackRule::HoldYZ { g } => g.abs(),
        }
    }
}

/// Drive for one schedule segment: fixed couplings or a feedback rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Const(EffectiveParams),
    Feedback(FeedbackRule),
}

impl Drive {
    pub fn params_for(&self, q: &QubitAmplitudes) -> EffectiveParams {
        match self {
            Drive::Const(p) => *p,
            Drive::Feedback(rule) => rule.params_for(q),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Drive::Const(p) => p.scale(),
            Drive::Feedback(rule) => rule.scale(),
        }
    }
}

/// One pulse-sequence segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    duration: f64,
    drive: Drive,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn drive(&self) -> Drive {
        self.drive
    }
}

/// Ordered pulse sequence: each segment holds constant couplings or a
/// feedback rule for a strictly positive duration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ControlSchedule {
    segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a constant-coupling segment.
    pub fn then_const(mut self, duration: f64, params: EffectiveParams) -> Result<Self> {
        self.push(duration, Drive::Const(params))?;
        Ok(self)
    }

    /// Appends a feedback-controlled segment.
    pub fn then_feedback(mut self, duration: f64, rule: FeedbackRule) -> Result<Self> {
        self.push(duration, Drive::Feedback(rule))?;
        Ok(self)
    }

    fn push(&mut self, duration: f64, drive: Drive) -> Result<()> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidDuration { duration });
        }
        self.segments.push(Segment { duration, drive });
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Suggested step over the whole schedule; `None` if every segment is
    /// free evolution.
    pub fn suggested_dt(&self) -> Option<f64> {
        let scale = self
            .segments
            .iter()
            .map(|s| s.drive.scale())
            .fold(0.0f64, f64::max);
        (scale > 0.0).then(|| DT_SCALE / scale)
    }
}

fn deriv(psi0: Complex64, psi1: Complex64, p: &EffectiveParams) -> (Complex64, Complex64) {
    let diag = p.bz + p.g * (psi0.norm_sqr() - psi1.norm_sqr());
    let i = Complex64::i();
    (
        -i * (diag * psi0 + p.v01 * psi1),
        -i * (p.v01 * psi0 - diag * psi1),
    )
}

/// One RK4 step of the nonlinear equation of motion under `drive`.
/// Feedback drives are re-evaluated at every stage state.
pub(crate) fn rk4_step(q: &QubitAmplitudes, drive: &Drive, dt: f64) -> QubitAmplitudes {
    let (a0, b0) = (q.psi0(), q.psi1());

    let p1 = drive.params_for(q);
    let (k1a, k1b) = deriv(a0, b0, &p1);

    let half = 0.5 * dt;
    let s2 = QubitAmplitudes::new_unchecked(a0 + half * k1a, b0 + half * k1b);
    let p2 = drive.params_for(&s2);
    let (k2a, k2b) = deriv(s2.psi0(), s2.psi1(), &p2);

    let s3 = QubitAmplitudes::new_unchecked(a0 + half * k2a, b0 + half * k2b);
    let p3 = drive.params_for(&s3);
    let (k3a, k3b) = deriv(s3.psi0(), s3.psi1(), &p3);

    let s4 = QubitAmplitudes::new_unchecked(a0 + dt * k3a, b0 + dt * k3b);
    let p4 = drive.params_for(&s4);
    let (k4a, k4b) = deriv(s4.psi0(), s4.psi1(), &p4);

    let sixth = dt / 6.0;
    QubitAmplitudes::new_unchecked(
        a0 + sixth * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        b0 + sixth * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
    )
}

fn check_dt(dt: f64, scale: f64) -> Result<()> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStep { dt });
    }
    if scale > 0.0 {
        let dt_max = DT_MAX_SCALE / scale;
        if dt > dt_max {
            return Err(Error::StepTooLarge { dt, dt_max });
        }
    }
    Ok(())
}

/// Single fourth-order Runge-Kutta step under constant couplings.
///
/// `dt` must be positive and at most `0.1 / scale(p)`; norm drift per step
/// is below 1e-12 at the suggested step size.
pub fn step(q: &QubitAmplitudes, p: &EffectiveParams, dt: f64) -> Result<QubitAmplitudes> {
    check_dt(dt, p.scale())?;
    Ok(rk4_step(q, &Drive::Const(*p), dt))
}

/// Integrates `q0` across the schedule, invoking `observer(t, state)` at
/// t = 0 and after every step. Returns the final state.
///
/// `dt` must divide every segment duration up to rounding. States are not
/// renormalized; drift beyond [`NORM_BLOWUP_TOL`] aborts with
/// [`Error::NormBlowup`].
pub fn propagate<F>(
    q0: &QubitAmplitudes,
    schedule: &ControlSchedule,
    dt: f64,
    mut observer: F,
) -> Result<QubitAmplitudes>
where
    F: FnMut(f64, &QubitAmplitudes),
{
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStep { dt });
    }
    let mut t = 0.0f64;
    let mut state = *q0;
    observer(t, &state);
    for seg in schedule.segments() {
        check_dt(dt, seg.drive.scale())?;
        let steps_f = seg.duration / dt;
        let steps = steps_f.round();
        if steps < 1.0 || (steps_f - steps).abs() > 1e-9 * steps_f.max(1.0) {
            return Err(Error::DurationNotDivisible {
                duration: seg.duration,
                dt,
            });
        }
        let t_seg_start = t;
        for k in 0..steps as u64 {
            state = rk4_step(&state, &seg.drive, dt);
            t = t_seg_start + (k + 1) as f64 * dt;
            let norm_sqr = state.norm_sqr();
            if (norm_sqr - 1.0).abs() > NORM_BLOWUP_TOL {
                return Err(Error::NormBlowup { norm_sqr, t });
            }
            observer(t, &state);
        }
    }
    Ok(state)
}

/// Dense trajectory of `(t, state)` samples. For long runs prefer
/// [`propagate`] with an observer to avoid storing every step.
pub fn trajectory(
    q0: &QubitAmplitudes,
    schedule: &ControlSchedule,
    dt: f64,
) -> Result<Vec<(f64, QubitAmplitudes)>> {
    let mut out = Vec::new();
    propagate(q0, schedule, dt, |t, q| out.push((t, *q)))?;
    Ok(out)
}

/// Rigid rotation exp(-i angle sigma_x / 2), applied in closed form.
pub fn rotate_x(q: &QubitAmplitudes, angle: f64) -> QubitAmplitudes {
    let c = Complex64::new((0.5 * angle).cos(), 0.0);
    let ms = Complex64::new(0.0, -(0.5 * angle).sin());
    QubitAmplitudes::new_unchecked(c * q.psi0() + ms * q.psi1(), ms * q.psi0() + c * q.psi1())
}

/// Rigid rotation exp(-i angle sigma_z / 2), applied in closed form.
pub fn rotate_z(q: &QubitAmplitudes, angle: f64) -> QubitAmplitudes {
    let half = 0.5 * angle;
    let ph0 = Complex64::from_polar(1.0, -half);
    let ph1 = Complex64::from_polar(1.0, half);
    QubitAmplitudes::new_unchecked(ph0 * q.psi0(), ph1 * q.psi1())
}

/// Velocity sample of the Bloch-sphere flow at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub point: BlochVector,
    pub velocity: [f64; 3],
}

/// Bloch-sphere velocity field dr/dt = 2 h(r) x r with
/// h = (V01, 0, Bz + g z) when `nonlinear` is set (torsion), or
/// h = (V01, 0, Bz + g) with g acting as a fixed sigma_z coefficient
/// otherwise (isometric rotation).
///
/// Grid points must lie on the unit sphere. The returned velocity is
/// orthogonal to the point: the flow preserves the sphere.
pub fn flow_field(
    grid: &[BlochVector],
    p: &EffectiveParams,
    nonlinear: bool,
) -> Result<Vec<FlowSample>> {
    let mut out = Vec::with_capacity(grid.len());
    for r in grid {
        if (r.norm() - 1.0).abs() > SPHERE_TOL {
            return Err(Error::NotOnSphere { norm: r.norm() });
        }
        let hz = if nonlinear {
            p.bz + p.g * r.z()
        } else {
            p.bz + p.g
        };
        let hx = p.v01;
        // 2 (hx, 0, hz) x (x, y, z)
        let v = [
            2.0 * (-hz * r.y()),
            2.0 * (hz * r.x() - hx * r.z()),
            2.0 * (hx * r.y()),
        ];
        out.push(FlowSample {
            point: *r,
            velocity: v,
        });
    }
    Ok(out)
}
