//! Exact two-mode many-body model in the Fock basis.
//!
//! The n-atom Hilbert space is spanned by |k, n-k> with k atoms in mode 0
//! (no circulation) and n-k in mode 1 (one quantum of circulation);
//! coefficient index k runs from 0 to n. The rotating-frame Hamiltonian
//! restricted to these two modes is real symmetric tridiagonal, so exact
//! propagation reduces to a tridiagonal eigendecomposition, reusable
//! across any number of evolution times. For particle numbers beyond a
//! few thousand the O(m^3) eigenvector accumulation dominates; a Chebyshev
//! expansion of exp(-iHt) driven by repeated tridiagonal
//! matrix-vector products would be the path there. The scales exercised
//! by this crate stay well below that.
//!
//! Interactions enter as fixed couplings K, K' with per-collision
//! strengths gamma = K/n, gamma' = K'/n, so sweeping n at fixed K keeps
//! the physics comparable — the regime in which the mean-field
//! description becomes exact at rate 1/n.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::{vec, vec::Vec};

use num_complex::Complex64;

use crate::meanfield::{self, ControlSchedule, EffectiveParams};
use crate::qubit::{trace_distance_matrices, Mat2, QubitAmplitudes};
use crate::tridiag::eigh_tridiagonal;
use crate::{Error, Result};

/// Normalization tolerance for validated Fock states.
pub const FOCK_NORM_TOL: f64 = 1e-12;
/// Particle number above which encode_fn switches to log-domain
/// binomials; C(n, n/2) overflows f64 near n = 1030.
const LOG_DOMAIN_THRESHOLD: usize = 300;

/// One of the two circulation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Angular momentum 0.
    Zero,
    /// Angular momentum hbar.
    One,
}

/// Many-body state: complex coefficients over |k, n-k>, k = 0..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Builds a normalized n-atom state (n = len - 1 >= 1); the squared
    /// coefficient sum must be 1 within `1e-12`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::NoParticles);
        }
        let v = Self { coeffs };
        let norm_sqr = v.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > FOCK_NORM_TOL {
            return Err(Error::NotNormalized {
                norm_sqr,
                tol: FOCK_NORM_TOL,
            });
        }
        Ok(v)
    }

    /// Builds a state without the norm check. Operator applications
    /// (annihilation) return unnormalized vectors; n = 0 (a single vacuum
    /// amplitude) is allowed here.
    pub fn unnormalized(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        Ok(Self { coeffs })
    }

    /// Particle number.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Amplitude of |k, n-k>.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Inner product <self|other>; both states must carry the same n.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.n() != other.n() {
            return Err(Error::ParticleMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Scales every coefficient.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Condensate encoding: n bosons each in the superposition
/// psi0 |0> + psi1 |1>, i.e. coefficients sqrt(C(n,k)) psi0^k psi1^(n-k).
/// Atoms are unentangled; the one-atom reduced state is exactly |psi><psi|.
pub fn encode_fn(n: usize, q: &QubitAmplitudes) -> Result<FockVector> {
    encode_fn_impl(n, q, n > LOG_DOMAIN_THRESHOLD)
}

pub(crate) fn encode_fn_impl(n: usize, q: &QubitAmplitudes, log_domain: bool) -> Result<FockVector> {
    if n == 0 {
        return Err(Error::NoParticles);
    }
    let (p0, p1) = (q.psi0(), q.psi1());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    if log_domain {
        // ln k! prefix sums; C(n, n/2) overflows f64 near n = 1030.
        let mut lnfact = vec![0.0f64; n + 1];
        for i in 1..=n {
            lnfact[i] = lnfact[i - 1] + (i as f64).ln();
        }
        let (m0, a0) = (p0.norm(), p0.arg());
        let (m1, a1) = (p1.norm(), p1.arg());
        for (k, c) in coeffs.iter_mut().enumerate() {
            let j = n - k;
            if (m0 == 0.0 && k > 0) || (m1 == 0.0 && j > 0) {
                continue;
            }
            let mut ln_mag = 0.5 * (lnfact[n] - lnfact[k] - lnfact[j]);
            if k > 0 {
                ln_mag += k as f64 * m0.ln();
            }
            if j > 0 {
                ln_mag += j as f64 * m1.ln();
            }
            let phase = k as f64 * a0 + j as f64 * a1;
            *c = Complex64::from_polar(ln_mag.exp(), phase);
        }
        // The log-exp round trip loses a few digits; restore the norm.
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let inv = 1.0 / norm_sqr.sqrt();
        for c in coeffs.iter_mut() {
            *c *= inv;
        }
    } else {
        let mut pow1 = vec![Complex64::new(1.0, 0.0); n + 1];
        for j in 1..=n {
            pow1[j] = pow1[j - 1] * p1;
        }
        let mut binom = 1.0f64;
        let mut pow0 = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            coeffs[k] = binom.sqrt() * pow0 * pow1[n - k];
            if k < n {
                binom *= (n - k) as f64 / (k + 1) as f64;
                pow0 *= p0;
            }
        }
    }
    FockVector::new(coeffs)
}

/// Cat encoding: amplitude psi0 on |n, 0> and psi1 on |0, n> — a
/// superposition of two macroscopically distinct condensates. The cross
/// terms vanish for n >= 1, so the state is normalized whenever q is.
/// Implemented for contrast with [`encode_fn`]; the protocols do not use it.
pub fn encode_cat(n: usize, q: &QubitAmplitudes) -> Result<FockVector> {
    if n == 0 {
        return Err(Error::NoParticles);
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = q.psi0();
    coeffs[0] += q.psi1();
    FockVector::new(coeffs)
}

/// Bosonic annihilation of one atom from the given mode. Returns the
/// unnormalized (n-1)-atom vector with the standard sqrt(k) factors.
pub fn annihilate(v: &FockVector, mode: Mode) -> Result<FockVector> {
    let n = v.n();
    if n == 0 {
        return Err(Error::NoParticles);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    match mode {
        Mode::Zero => {
            // a_0 |k, n-k> = sqrt(k) |k-1, n-k>
            for k in 1..=n {
                out[k - 1] = (k as f64).sqrt() * v.coeff(k);
            }
        }
        Mode::One => {
            // a_1 |k, n-k> = sqrt(n-k) |k, n-k-1>
            for (k, o) in out.iter_mut().enumerate() {
                *o = ((n - k) as f64).sqrt() * v.coeff(k);
            }
        }
    }
    FockVector::unnormalized(out)
}

/// Parameters of the rotating-frame two-mode Hamiltonian: n atoms on a
/// ring with bare frequency `omega0`, rotated at `omega`, fixed
/// interaction couplings `k`/`k_prime` (per-collision strengths K/n and
/// K'/n), and real barrier matrix elements `v00`, `v11`, `v01`.
///
/// `v01` is real by construction of the type; complex barrier elements
/// are outside this model's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeParams {
    pub n: usize,
    pub omega0: f64,
    pub omega: f64,
    pub k: f64,
    pub k_prime: f64,
    pub v00: f64,
    pub v11: f64,
    pub v01: f64,
}

impl TwoModeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::NoParticles);
        }
        if !self.omega0.is_finite() || self.omega0 <= 0.0 {
            return Err(Error::InvalidParameter { name: "omega0" });
        }
        for (name, value) in [
            ("omega", self.omega),
            ("k", self.k),
            ("k_prime", self.k_prime),
            ("v00", self.v00),
            ("v11", self.v11),
            ("v01", self.v01),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name });
            }
        }
        Ok(())
    }

    /// Single-particle mode frequency omega_l = (Omega - l Omega0)^2 / (2 Omega0).
    /// Rotation at Omega = Omega0/2 brings l = 0 and l = 1 into degeneracy.
    pub fn mode_frequency(&self, l: i64) -> f64 {
        let d = self.omega - l as f64 * self.omega0;
        d * d / (2.0 * self.omega0)
    }

    /// Per-collision interaction strength gamma = K/n.
    pub fn gamma(&self) -> f64 {
        self.k / self.n as f64
    }

    /// Cross-mode interaction strength gamma' = K'/n.
    pub fn gamma_prime(&self) -> f64 {
        self.k_prime / self.n as f64
    }

    /// Classical kinetic energy of the spinning ring, -n Omega^2 / (2 Omega0).
    /// A constant: dropped from [`Self::hamiltonian`], recorded here.
    pub fn dropped_kinetic_energy(&self) -> f64 {
        -(self.n as f64) * self.omega * self.omega / (2.0 * self.omega0)
    }

    /// Mean-field couplings matching this Hamiltonian:
    /// Bz = (omega_0 - omega_1 + V00 - V11)/2 and g = (2K - K')/2, with
    /// V01 passed through. These follow from the large-n saddle point of
    /// the two-mode action with gamma = K/n, gamma' = K'/n.
    pub fn effective_params(&self) -> Result<EffectiveParams> {
        let bz = 0.5 * (self.mode_frequency(0) - self.mode_frequency(1) + self.v00 - self.v11);
        let g = 0.5 * (2.0 * self.k - self.k_prime);
        EffectiveParams::new(self.v01, bz, g)
    }

    /// Assembles the (n+1)x(n+1) Hamiltonian over |k, n-k>:
    ///
    /// diag[k] = (omega_0 + V00) k + (omega_1 + V11)(n-k)
    ///           + gamma [k(k-1) + (n-k)(n-k-1)] + gamma' k(n-k)
    /// off[k]  = V01 sqrt((k+1)(n-k))
    ///
    /// The constant -n Omega^2/(2 Omega0) is excluded; see
    /// [`Self::dropped_kinetic_energy`].
    pub fn hamiltonian(&self) -> Result<TridiagonalHamiltonian> {
        self.validate()?;
        let n = self.n;
        let nf = n as f64;
        let w0 = self.mode_frequency(0) + self.v00;
        let w1 = self.mode_frequency(1) + self.v11;
        let gamma = self.gamma();
        let gamma_prime = self.gamma_prime();
        let mut diag = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let kf = k as f64;
            let jf = nf - kf;
            diag.push(
                w0 * kf
                    + w1 * jf
                    + gamma * (kf * (kf - 1.0) + jf * (jf - 1.0))
                    + gamma_prime * kf * jf,
            );
        }
        let mut off = Vec::with_capacity(n);
        for k in 0..n {
            off.push(self.v01 * (((k + 1) * (n - k)) as f64).sqrt());
        }
        Ok(TridiagonalHamiltonian { diag, off })
    }
}

/// Real symmetric tridiagonal Hamiltonian: main diagonal plus the
/// V01-induced coupling between |k+1, n-k-1> and |k, n-k>.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    /// Matrix-vector product H psi.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let m = self.diag.len();
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            out[i] = self.diag[i] * psi[i];
            if i > 0 {
                out[i] += self.off[i - 1] * psi[i - 1];
            }
            if i + 1 < m {
                out[i] += self.off[i] * psi[i + 1];
            }
        }
        out
    }
}

/// Cached eigendecomposition of a two-mode Hamiltonian. Building it costs
/// one eigensolve; each [`Self::evolve`] call is then two dense
/// matrix-vector products, so time sweeps amortize the decomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    vals: Vec<f64>,
    vecs: Vec<f64>,
}

impl Propagator {
    pub fn new(params: &TwoModeParams) -> Result<Self> {
        let h = params.hamiltonian()?;
        Self::from_hamiltonian(&h)
    }

    pub fn from_hamiltonian(h: &TridiagonalHamiltonian) -> Result<Self> {
        let (vals, vecs) = eigh_tridiagonal(h.diagonal(), h.off_diagonal())?;
        Ok(Self {
            dim: h.dim(),
            vals,
            vecs,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.vals
    }

    /// Applies exp(-iHt): transform to the eigenbasis, attach phases,
    /// transform back. Norm is preserved to rounding.
    pub fn evolve(&self, v: &FockVector, t: f64) -> Result<FockVector> {
        let m = self.dim;
        if v.coeffs().len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: v.coeffs().len(),
            });
        }
        if !t.is_finite() {
            return Err(Error::NonFinite { name: "t" });
        }
        let psi = v.coeffs();
        let mut modal = vec![Complex64::new(0.0, 0.0); m];
        for (j, mj) in modal.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, p) in psi.iter().enumerate() {
                acc += self.vecs[i * m + j] * p;
            }
            *mj = acc * Complex64::from_polar(1.0, -self.vals[j] * t);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, mj) in modal.iter().enumerate() {
                acc += self.vecs[i * m + j] * mj;
            }
            *o = acc;
        }
        FockVector::unnormalized(out)
    }
}

/// Exact evolution exp(-iHt) of a Fock state under the two-mode
/// Hamiltonian. For repeated times build a [`Propagator`] once instead.
pub fn evolve_exact(v: &FockVector, params: &TwoModeParams, t: f64) -> Result<FockVector> {
    Propagator::new(params)?.evolve(v, t)
}

fn mode_index(m: Mode) -> usize {
    match m {
        Mode::Zero => 0,
        Mode::One => 1,
    }
}

/// One-particle correlator <a_l^dag a_l'> in the Fock basis.
pub fn correlator_one(v: &FockVector, l: Mode, lp: Mode) -> Complex64 {
    let n = v.n();
    match (mode_index(l), mode_index(lp)) {
        (0, 0) => Complex64::new(
            v.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| k as f64 * c.norm_sqr())
                .sum(),
            0.0,
        ),
        (1, 1) => Complex64::new(
            v.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (n - k) as f64 * c.norm_sqr())
                .sum(),
            0.0,
        ),
        (0, 1) => {
            // a_0^dag a_1 |k, n-k> = sqrt((k+1)(n-k)) |k+1, n-k-1>
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += (((k + 1) * (n - k)) as f64).sqrt() * v.coeff(k + 1).conj() * v.coeff(k);
            }
            acc
        }
        _ => correlator_one(v, Mode::Zero, Mode::One).conj(),
    }
}

/// Normal-ordered two-particle correlator <a_l^dag a_l'^dag a_l' a_l>.
/// For l = l' this is <n_l (n_l - 1)>; for distinct modes it equals the
/// density-density correlator <n_l n_l'>.
pub fn correlator_two(v: &FockVector, l: Mode, lp: Mode) -> Complex64 {
    let n = v.n();
    let value: f64 = v
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let n0 = k as f64;
            let n1 = (n - k) as f64;
            let w = match (mode_index(l), mode_index(lp)) {
                (0, 0) => n0 * (n0 - 1.0),
                (1, 1) => n1 * (n1 - 1.0),
                _ => n0 * n1,
            };
            w * c.norm_sqr()
        })
        .sum();
    Complex64::new(value, 0.0)
}

/// Unordered product <a_l^dag a_l a_l'^dag a_l'>; differs from
/// [`correlator_two`] by the number operator when l = l'.
pub fn correlator_two_unordered(v: &FockVector, l: Mode, lp: Mode) -> Complex64 {
    let mut out = correlator_two(v, l, lp);
    if l == lp {
        out += correlator_one(v, l, l);
    }
    out
}

/// One-atom reduced density matrix (rho_1)_{l l'} = <a_l'^dag a_l> / n.
/// Hermitian with unit trace; pure exactly when the state is a
/// condensate encoding.
pub fn reduced_density(v: &FockVector) -> Mat2 {
    let n = v.n() as f64;
    let n00 = correlator_one(v, Mode::Zero, Mode::Zero);
    let n11 = correlator_one(v, Mode::One, Mode::One);
    let c01 = correlator_one(v, Mode::Zero, Mode::One); // <a_0^dag a_1>
    Mat2::new([
        [n00 / n, c01.conj() / n],
        [c01 / n, n11 / n],
    ])
}

/// Mean-field model error at time t, plus the states behind it.
#[derive(Debug, Clone)]
pub struct ModelError {
    /// Trace-norm distance between the mean-field state and the exact
    /// one-atom reduced density matrix.
    pub epsilon: f64,
    /// Mean-field trajectory endpoint.
    pub meanfield_final: QubitAmplitudes,
    /// Projector onto the mean-field endpoint.
    pub rho_meanfield: Mat2,
    /// Exact one-atom reduced density matrix.
    pub rho_reduced: Mat2,
}

/// Evolves the condensate encoding of `q0` exactly and `q0` itself under
/// the matching mean-field couplings, and returns
/// epsilon = || rho_eff(t) - rho_1(t) ||_1.
///
/// `dt` overrides the mean-field step size (default `1e-3 / scale`).
pub fn model_error(
    params: &TwoModeParams,
    q0: &QubitAmplitudes,
    t: f64,
    dt: Option<f64>,
) -> Result<ModelError> {
    let propagator = Propagator::new(params)?;
    model_error_with(params, &propagator, q0, t, dt)
}

/// [`model_error`] with a prebuilt propagator, for sweeps over t.
pub fn model_error_with(
    params: &TwoModeParams,
    propagator: &Propagator,
    q0: &QubitAmplitudes,
    t: f64,
    dt: Option<f64>,
) -> Result<ModelError> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NonFinite { name: "t" });
    }
    let fock_t = propagator.evolve(&encode_fn(params.n, q0)?, t)?;
    let rho_reduced = reduced_density(&fock_t);

    let eff = params.effective_params()?;
    let meanfield_final = if t == 0.0 {
        *q0
    } else {
        // Choose a step that divides t exactly, at or below the target.
        let target = match dt {
            Some(dt) => {
                if !dt.is_finite() || dt <= 0.0 {
                    return Err(Error::InvalidStep { dt });
                }
                dt
            }
            None => eff.suggested_dt().unwrap_or(t / 100.0),
        };
        let steps = (t / target).ceil().max(1.0);
        let dt_exact = t / steps;
        let schedule = ControlSchedule::new().then_const(t, eff)?;
        meanfield::propagate(q0, &schedule, dt_exact, |_, _| {})?
    };
    let rho_meanfield = meanfield_final.density_matrix();
    let epsilon = trace_distance_matrices(&rho_meanfield, &rho_reduced)?;
    Ok(ModelError {
        epsilon,
        meanfield_final,
        rho_meanfield,
        rho_reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_1_SQRT_2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_qubit(rng: &mut ChaCha8Rng) -> QubitAmplitudes {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
        let chi: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
        let half = (z.acos()) * 0.5;
        let global = Complex64::from_polar(1.0, chi);
        QubitAmplitudes::normalized(
            global * re(half.cos()),
            global * Complex64::from_polar(half.sin(), phi),
        )
        .unwrap()
    }

    fn base_params(n: usize) -> TwoModeParams {
        TwoModeParams {
            n,
            omega0: 1.0,
            omega: 0.5,
            k: 1.0,
            k_prime: 0.0,
            v00: 0.0,
            v11: 0.0,
            v01: 0.5,
        }
    }

    #[test]
    fn mode_frequency_examples() {
        let p = base_params(4);
        assert_abs_diff_eq!(p.mode_frequency(0), 1.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.mode_frequency(1), 1.0 / 8.0, epsilon = 1e-15);
        let p0 = TwoModeParams { omega: 0.0, ..p };
        assert_abs_diff_eq!(p0.mode_frequency(1), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn encode_fn_examples() {
        // All atoms in mode 0: a single amplitude at k = n.
        let v = encode_fn(5, &QubitAmplitudes::ket0()).unwrap();
        assert_eq!(v.coeff(5), re(1.0));
        assert_eq!(v.coeffs()[..5].iter().map(|c| c.norm()).sum::<f64>(), 0.0);

        // n = 2, equal superposition: (1/2, 1/sqrt2, 1/2).
        let q = QubitAmplitudes::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).unwrap();
        let v = encode_fn(2, &q).unwrap();
        assert_abs_diff_eq!(v.coeff(0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(1).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(2).re, 0.5, epsilon = 1e-15);

        // One atom is the qubit itself, with coefficient order (psi1, psi0).
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_qubit(&mut rng);
        let v = encode_fn(1, &q).unwrap();
        assert!((v.coeff(0) - q.psi1()).norm() < 1e-15);
        assert!((v.coeff(1) - q.psi0()).norm() < 1e-15);

        assert!(matches!(encode_fn(0, &q), Err(Error::NoParticles)));
    }

    #[test]
    fn encode_fn_log_domain_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let q = random_qubit(&mut rng);
            let direct = encode_fn_impl(250, &q, false).unwrap();
            let logged = encode_fn_impl(250, &q, true).unwrap();
            for k in 0..=250 {
                assert!(
                    (direct.coeff(k) - logged.coeff(k)).norm() < 1e-12,
                    "k = {k}"
                );
            }
        }
        // Large-n path stays normalized (would overflow without logs).
        let q = random_qubit(&mut rng);
        let big = encode_fn(1500, &q).unwrap();
        assert_abs_diff_eq!(big.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn encode_cat_examples() {
        let q = QubitAmplitudes::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).unwrap();
        let v = encode_cat(3, &q).unwrap();
        assert_abs_diff_eq!(v.coeff(3).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v.coeff(0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(v.coeff(1), re(0.0));
        assert_eq!(v.coeff(2), re(0.0));

        // Single-branch cat equals the condensate encoding.
        let v = encode_cat(4, &QubitAmplitudes::ket0()).unwrap();
        assert_eq!(v, encode_fn(4, &QubitAmplitudes::ket0()).unwrap());

        // n = 1: both encodings coincide for every q.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let q = random_qubit(&mut rng);
            let cat = encode_cat(1, &q).unwrap();
            let fnv = encode_fn(1, &q).unwrap();
            assert!((cat.coeff(0) - fnv.coeff(0)).norm() < 1e-15);
            assert!((cat.coeff(1) - fnv.coeff(1)).norm() < 1e-15);
        }
    }

    #[test]
    fn annihilation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &n in &[2usize, 5, 17] {
            let q = random_qubit(&mut rng);
            let vn = encode_fn(n, &q).unwrap();
            let smaller = encode_fn(n - 1, &q).unwrap();
            for (mode, psi) in [(Mode::Zero, q.psi0()), (Mode::One, q.psi1())] {
                let lhs = annihilate(&vn, mode).unwrap();
                let rhs = smaller.scaled(psi * (n as f64).sqrt());
                for k in 0..n {
                    assert!((lhs.coeff(k) - rhs.coeff(k)).norm() < 1e-13);
                }
            }
            // Double application: psi_l psi_l' sqrt(n(n-1)) |F_{n-2}>.
            if n >= 3 {
                let tiny = encode_fn(n - 2, &q).unwrap();
                let lhs = annihilate(&annihilate(&vn, Mode::Zero).unwrap(), Mode::One).unwrap();
                let rhs = tiny.scaled(q.psi0() * q.psi1() * ((n * (n - 1)) as f64).sqrt());
                for k in 0..n - 1 {
                    assert!((lhs.coeff(k) - rhs.coeff(k)).norm() < 1e-12);
                }
            }
        }

        // No atoms in mode 1 of |Phi_0^n>: annihilation gives zero.
        let v = encode_fn(4, &QubitAmplitudes::ket0()).unwrap();
        let out = annihilate(&v, Mode::One).unwrap();
        assert_eq!(out.norm_sqr(), 0.0);

        let vacuum = FockVector::unnormalized(vec![re(1.0)]).unwrap();
        assert!(matches!(
            annihilate(&vacuum, Mode::Zero),
            Err(Error::NoParticles)
        ));
    }

    #[test]
    fn hamiltonian_examples() {
        // One atom, no interactions: [[omega1 + V11, V01], [V01, omega0 + V00]].
        let p = TwoModeParams {
            n: 1,
            omega0: 1.0,
            omega: 0.3,
            k: 0.0,
            k_prime: 0.0,
            v00: 0.2,
            v11: 0.1,
            v01: 0.7,
        };
        let h = p.hamiltonian().unwrap();
        assert_abs_diff_eq!(h.diagonal()[0], p.mode_frequency(1) + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(h.diagonal()[1], p.mode_frequency(0) + 0.2, epsilon = 1e-15);
        assert_eq!(h.off_diagonal(), &[0.7]);

        // n = 2, K = 1, all else zero: diagonal (1, 0, 1) from
        // gamma [k(k-1) + (n-k)(n-k-1)] with gamma = 1/2.
        let p = TwoModeParams {
            n: 2,
            omega0: 1.0,
            omega: 0.0,
            k: 1.0,
            k_prime: 0.0,
            v00: 0.0,
            v11: 0.0,
            v01: 0.0,
        };
        // Zero out the kinetic part by subtracting mode frequencies.
        let h = p.hamiltonian().unwrap();
        let w0 = p.mode_frequency(0);
        let w1 = p.mode_frequency(1);
        let interaction: Vec<f64> = h
            .diagonal()
            .iter()
            .enumerate()
            .map(|(k, d)| d - w0 * k as f64 - w1 * (2 - k) as f64)
            .collect();
        assert_abs_diff_eq!(interaction[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(interaction[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(interaction[2], 1.0, epsilon = 1e-15);
        assert_eq!(h.off_diagonal(), &[0.0, 0.0]);

        assert_abs_diff_eq!(p.gamma(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            TwoModeParams { n: 4, ..p }.gamma_prime(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn evolve_identity_and_eigenstate() {
        let p = base_params(6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = encode_fn(6, &random_qubit(&mut rng)).unwrap();
        let out = evolve_exact(&v, &p, 0.0).unwrap();
        for k in 0..=6 {
            assert!((out.coeff(k) - v.coeff(k)).norm() < 1e-12);
        }

        // V01 = 0: circulation states are exact eigenstates.
        let p = TwoModeParams { v01: 0.0, ..p };
        let phi0 = encode_fn(6, &QubitAmplitudes::ket0()).unwrap();
        let out = evolve_exact(&phi0, &p, 2.7).unwrap();
        for k in 0..6 {
            assert!(out.coeff(k).norm() < 1e-13);
        }
        assert_abs_diff_eq!(out.coeff(6).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_preserves_norm_over_long_times() {
        let p = base_params(40);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let v = encode_fn(40, &random_qubit(&mut rng)).unwrap();
        let prop = Propagator::new(&p).unwrap();
        for &t in &[1.0, 10.0, 100.0] {
            let out = prop.evolve(&v, t).unwrap();
            assert!((out.norm_sqr() - 1.0).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn reduced_density_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_qubit(&mut rng);

        // Condensate encoding: exactly the projector onto q, purity 1.
        let rho = reduced_density(&encode_fn(12, &q).unwrap());
        let proj = q.density_matrix();
        for r in 0..2 {
            for c in 0..2 {
                assert!((rho.get(r, c) - proj.get(r, c)).norm() < 1e-12);
            }
        }
        let (lo, hi) = rho.hermitian_eigenvalues();
        assert_abs_diff_eq!(lo * lo + hi * hi, 1.0, epsilon = 1e-12);

        // Cat encoding, n >= 2: off-diagonals vanish.
        let rho = reduced_density(&encode_cat(5, &q).unwrap());
        assert!(rho.get(0, 1).norm() < 1e-15);
        assert_abs_diff_eq!(rho.get(0, 0).re, q.psi0().norm_sqr(), epsilon = 1e-14);
        assert_abs_diff_eq!(rho.get(1, 1).re, q.psi1().norm_sqr(), epsilon = 1e-14);

        // |Phi_1^n>: everything in mode 1.
        let rho = reduced_density(&encode_fn(7, &QubitAmplitudes::ket1()).unwrap());
        assert_eq!(rho.get(0, 0).re, 0.0);
        assert_eq!(rho.get(1, 1).re, 1.0);
    }

    #[test]
    fn entangling_evolution_reduces_purity_but_keeps_positivity() {
        let p = base_params(10);
        let q = QubitAmplitudes::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).unwrap();
        let v = evolve_exact(&encode_fn(10, &q).unwrap(), &p, 1.5).unwrap();
        let rho = reduced_density(&v);
        assert!(rho.hermiticity_deviation() < 1e-10);
        let (lo, hi) = rho.hermitian_eigenvalues();
        assert!(lo > -1e-10);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        let purity = lo * lo + hi * hi;
        assert!(purity < 1.0 - 1e-6, "purity {purity}");
    }

    #[test]
    fn table_correlators_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 9usize;
        let q = random_qubit(&mut rng);
        let nf = n as f64;

        let v = encode_fn(n, &q).unwrap();
        let want = nf * q.psi0().conj() * q.psi1();
        assert!((correlator_one(&v, Mode::Zero, Mode::One) - want).norm() < 1e-12 * nf);
        let want = nf * (nf - 1.0) * q.psi0().norm_sqr() * q.psi1().norm_sqr();
        assert!((correlator_two(&v, Mode::Zero, Mode::One).re - want).abs() < 1e-11 * nf * nf);
        let want = nf * (nf - 1.0) * q.psi0().norm_sqr().powi(2);
        assert!((correlator_two(&v, Mode::Zero, Mode::Zero).re - want).abs() < 1e-11 * nf * nf);
        // Unordered form picks up the number operator.
        let unordered = correlator_two_unordered(&v, Mode::Zero, Mode::Zero);
        let want = want + nf * q.psi0().norm_sqr();
        assert!((unordered.re - want).abs() < 1e-11 * nf * nf);

        let v = encode_cat(n, &q).unwrap();
        assert_eq!(correlator_one(&v, Mode::Zero, Mode::One), re(0.0));
        let want = nf * q.psi0().norm_sqr();
        assert!((correlator_one(&v, Mode::Zero, Mode::Zero).re - want).abs() < 1e-12 * nf);
        let want = nf * (nf - 1.0) * q.psi1().norm_sqr();
        assert!((correlator_two(&v, Mode::One, Mode::One).re - want).abs() < 1e-11 * nf * nf);
        assert_eq!(correlator_two(&v, Mode::Zero, Mode::One), re(0.0));
    }

    #[test]
    fn fock_overlap_is_qubit_overlap_to_the_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_qubit(&mut rng);
        let b = random_qubit(&mut rng);
        for &n in &[1usize, 3, 20] {
            let ov = encode_fn(n, &a)
                .unwrap()
                .overlap(&encode_fn(n, &b).unwrap())
                .unwrap();
            let want = a.overlap(&b).powu(n as u32);
            assert!((ov - want).norm() < 1e-12, "n = {n}");
        }

        // Orthogonal qubits encode to orthogonal condensates.
        let v0 = encode_fn(6, &QubitAmplitudes::ket0()).unwrap();
        let v1 = encode_fn(6, &QubitAmplitudes::ket1()).unwrap();
        assert_eq!(v0.overlap(&v1).unwrap(), re(0.0));
        assert_abs_diff_eq!(v0.overlap(&v0).unwrap().re, 1.0, epsilon = 1e-13);

        // Orthogonality catastrophe: |<psi|psi'>| = 0.99 at n = 500.
        let a = QubitAmplitudes::ket0();
        let b = QubitAmplitudes::new(re(0.99), re((1.0f64 - 0.99 * 0.99).sqrt())).unwrap();
        let ov = encode_fn(500, &a)
            .unwrap()
            .overlap(&encode_fn(500, &b).unwrap())
            .unwrap();
        let want = (500.0 * 0.99f64.ln()).exp();
        assert_abs_diff_eq!(ov.norm(), want, epsilon = 1e-10);
        assert_abs_diff_eq!(ov.norm(), 6.57e-3, epsilon = 1e-4);

        let err = v0.overlap(&encode_fn(5, &a).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ParticleMismatch { .. }));
    }

    #[test]
    fn model_error_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let q = random_qubit(&mut rng);

        let p = base_params(8);
        let out = model_error(&p, &q, 0.0, None).unwrap();
        assert!(out.epsilon < 1e-10);

        // No interactions: the model is exactly linear at every n.
        let p = TwoModeParams {
            k: 0.0,
            k_prime: 0.0,
            ..base_params(8)
        };
        let out = model_error(&p, &q, 1.0, None).unwrap();
        assert!(out.epsilon < 1e-9, "epsilon {}", out.epsilon);
    }

    #[test]
    fn model_error_shrinks_with_n() {
        let q = QubitAmplitudes::new(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).unwrap();
        let eps: Vec<f64> = [4usize, 8, 16]
            .iter()
            .map(|&n| {
                model_error(&base_params(n), &q, 0.3, None)
                    .unwrap()
                    .epsilon
            })
            .collect();
        assert!(eps[0] > eps[1] && eps[1] > eps[2], "{eps:?}");
        let ratio = (4.0 * eps[0]) / (16.0 * eps[2]);
        assert!((0.5..2.0).contains(&ratio), "n*eps ratio {ratio}");
    }

    #[test]
    fn effective_params_mapping() {
        let p = TwoModeParams {
            n: 5,
            omega0: 2.0,
            omega: 0.6,
            k: 1.2,
            k_prime: 0.4,
            v00: 0.3,
            v11: 0.1,
            v01: 0.25,
        };
        let eff = p.effective_params().unwrap();
        assert_abs_diff_eq!(eff.v01(), 0.25, epsilon = 1e-15);
        let want_bz = 0.5 * (p.mode_frequency(0) - p.mode_frequency(1) + 0.3 - 0.1);
        assert_abs_diff_eq!(eff.bz(), want_bz, epsilon = 1e-15);
        assert_abs_diff_eq!(eff.g(), 0.5 * (2.0 * 1.2 - 0.4), epsilon = 1e-15);
        // At the degeneracy point Omega = Omega0/2 with equal barriers,
        // Bz vanishes.
        let eff = base_params(5).effective_params().unwrap();
        assert_abs_diff_eq!(eff.bz(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            TwoModeParams { n: 0, ..base_params(1) }.validate(),
            Err(Error::NoParticles)
        ));
        assert!(TwoModeParams {
            omega0: 0.0,
            ..base_params(2)
        }
        .validate()
        .is_err());
        assert!(TwoModeParams {
            v01: f64::NAN,
            ..base_params(2)
        }
        .validate()
        .is_err());
    }
}
