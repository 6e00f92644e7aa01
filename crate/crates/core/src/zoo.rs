//! Constructors for the standard state families: thermal products,
//! displaced squeezed states and two-mode covariance matrices in standard
//! form, plus samples from the incoherent equivalence class of a two-mode
//! state.

use nalgebra::{DMatrix, DVector, Vector2};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::equivalence::{apply_incoherent_unitary, check_hypothesis, IncoherentUnitary};
use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};
use crate::state::GaussianState;

/// `⊗ ρ_th(n̄_i)`: `V = ⊕ (2n̄_i + 1) I₂`, `d = 0`.
pub fn thermal<T: Float>(n_bars: &[T]) -> Result<GaussianState<T>> {
    if n_bars.is_empty() {
        return Err(Error::InvalidArgument("at least one mode required".into()));
    }
    if let Some(bad) = n_bars.iter().find(|&&n| !(n >= T::zero()) || !n.is_finite()) {
        return Err(Error::InvalidArgument(format!("thermal occupation {bad} must be finite and non-negative")));
    }
    let diag = DVector::from_iterator(
        2 * n_bars.len(),
        n_bars.iter().flat_map(|&n| {
            let lambda = T::lit(2.0) * n + T::one();
            [lambda, lambda]
        }),
    );
    GaussianState::validate(DMatrix::from_diagonal(&diag), DVector::zeros(diag.len()), T::DEFAULT_TOL)
}

/// Parameters of `D̂(α) Ŝ(β) |0⟩` with `α = |α| e^{iγ}` and `β = |β| e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedSqueezedParams<T: Float> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Float> DisplacedSqueezedParams<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Self {
        Self { alpha, beta }
    }
}

/// Mean `2(Re α, Im α)` and covariance
/// `ch(2|β|) I + sh(2|β|) [[cos θ, sin θ], [sin θ, −cos θ]]`.
pub fn displaced_squeezed<T: Float>(params: &DisplacedSqueezedParams<T>) -> Result<GaussianState<T>> {
    let two = T::lit(2.0);
    let r = modulus(params.beta);
    let theta = params.beta.im.atan2(params.beta.re);
    let (ch, sh) = ((two * r).cosh(), (two * r).sinh());
    let (s, c) = theta.sin_cos();
    let cov = DMatrix::from_row_slice(2, 2, &[ch + c * sh, s * sh, s * sh, ch - c * sh]);
    let mean = DVector::from_row_slice(&[two * params.alpha.re, two * params.alpha.im]);
    GaussianState::validate(cov, mean, T::DEFAULT_TOL)
}

fn modulus<T: Float>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Wraps an angle into `(−π, π]`.
fn wrap_angle<T: Float>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut y = x % two_pi;
    if y > T::pi() {
        y -= two_pi;
    } else if y <= -T::pi() {
        y += two_pi;
    }
    y
}

/// Closed-form incoherent equivalence of two displaced squeezed states:
/// `|α| = |α'|`, `|β| = |β'|` and `θ' − θ ≡ 2(γ' − γ) (mod 2π)`.
///
/// The phase condition is vacuous when the squeezing vanishes, and the
/// displacement phase drops out when the displacement vanishes.
pub fn displaced_squeezed_equivalent<T: Float>(
    p: &DisplacedSqueezedParams<T>,
    q: &DisplacedSqueezedParams<T>,
    tol: T,
) -> bool {
    let (a, a2) = (modulus(p.alpha), modulus(q.alpha));
    let (b, b2) = (modulus(p.beta), modulus(q.beta));
    if (a - a2).magnitude() > tol || (b - b2).magnitude() > tol {
        return false;
    }
    if b <= tol || a <= tol {
        return true;
    }
    let gamma = p.alpha.im.atan2(p.alpha.re);
    let gamma2 = q.alpha.im.atan2(q.alpha.re);
    let theta = p.beta.im.atan2(p.beta.re);
    let theta2 = q.beta.im.atan2(q.beta.re);
    wrap_angle((theta2 - theta) - T::lit(2.0) * (gamma2 - gamma)).magnitude() <= tol
}

/// Two-mode standard form `V = [[a I, C], [C, b I]]`, `C = diag(c, d_corr)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardFormParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d_corr: T,
}

impl<T: Float> StandardFormParams<T> {
    pub fn new(a: T, b: T, c: T, d_corr: T) -> Self {
        Self { a, b, c, d_corr }
    }

    /// `Δ = a² + b² + 2 det C`.
    pub fn delta(&self) -> T {
        self.a * self.a + self.b * self.b + T::lit(2.0) * self.c * self.d_corr
    }

    /// `det V = (ab − c²)(ab − d²)`.
    pub fn det(&self) -> T {
        let ab = self.a * self.b;
        (ab - self.c * self.c) * (ab - self.d_corr * self.d_corr)
    }

    /// `Δ² − 4 det V`, expanded as `(a² − b²)² + 4(ac + bd)(ad + bc)` so that
    /// the degenerate case `v+ = v−` does not suffer cancellation.
    pub fn discriminant(&self) -> T {
        let Self { a, b, c, d_corr: d } = *self;
        let diff = a * a - b * b;
        diff * diff + T::lit(4.0) * (a * c + b * d) * (a * d + b * c)
    }

    pub fn covariance(&self) -> DMatrix<T> {
        let z = T::zero();
        let Self { a, b, c, d_corr: d } = *self;
        DMatrix::from_row_slice(4, 4, &[a, z, c, z, z, a, z, d, c, z, b, z, z, d, z, b])
    }

    /// Parameters of the partial transpose, which flips the sign of the
    /// momentum correlation.
    pub fn partial_transpose(&self) -> Self {
        Self { d_corr: -self.d_corr, ..*self }
    }
}

pub fn two_mode_standard_form<T: Float>(params: &StandardFormParams<T>) -> Result<GaussianState<T>> {
    if !(params.a >= T::one()) || !(params.b >= T::one()) {
        return Err(Error::InvalidArgument("standard form requires a >= 1 and b >= 1".into()));
    }
    GaussianState::validate(params.covariance(), DVector::zeros(4), T::DEFAULT_TOL)
}

/// Closed-form symplectic spectra of a standard-form matrix and of its
/// partial transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardFormSpectra<T> {
    pub v_plus: T,
    pub v_minus: T,
    pub pt_v_plus: T,
    pub pt_v_minus: T,
}

/// `v±² = (Δ ± √(Δ² − 4 det V)) / 2`; `v−` is taken as `√(det V) / v+` to
/// avoid cancellation.
fn closed_form_pair<T: Float>(params: &StandardFormParams<T>, tol: T) -> Result<(T, T)> {
    let (delta, det, disc) = (params.delta(), params.det(), params.discriminant());
    if disc < -tol * unit_floor(delta * delta) {
        return Err(Error::Numeric(format!("negative discriminant {disc} in symplectic spectrum")));
    }
    let plus_sq = (delta + disc.max(T::zero()).sqrt()) / T::lit(2.0);
    if !(plus_sq > T::zero()) || det < T::zero() {
        return Err(Error::Numeric("standard-form parameters give no real spectrum".into()));
    }
    let v_plus = plus_sq.sqrt();
    Ok((v_plus, det.sqrt() / v_plus))
}

pub fn standard_form_spectra<T: Float>(params: &StandardFormParams<T>, tol: T) -> Result<StandardFormSpectra<T>> {
    let (v_plus, v_minus) = closed_form_pair(params, tol)?;
    let (pt_v_plus, pt_v_minus) = closed_form_pair(&params.partial_transpose(), tol)?;
    Ok(StandardFormSpectra { v_plus, v_minus, pt_v_plus, pt_v_minus })
}

/// Covariance of the partial transpose with respect to `mode`
/// (`p_mode ↦ −p_mode`).
pub fn partial_transpose_cov<T: Float>(cov: &DMatrix<T>, mode: usize) -> Result<DMatrix<T>> {
    if 2 * mode + 1 >= cov.nrows() {
        return Err(Error::Shape(format!("mode {mode} out of range")));
    }
    let mut flipped = cov.clone();
    let k = 2 * mode + 1;
    for j in 0..cov.ncols() {
        flipped[(k, j)] = -flipped[(k, j)];
    }
    for i in 0..cov.nrows() {
        flipped[(i, k)] = -flipped[(i, k)];
    }
    Ok(flipped)
}

/// The two members of the incoherent equivalence class of a two-mode state
/// reached with local rotations `O_i = R(θ_i)`: the unswapped state
/// `(O₁⊕O₂) V (O₁⊕O₂)ᵗ` with means `(O₁d₁, O₂d₂)`, and the mode-swapped
/// state with means `(O₁d₂, O₂d₁)`.
pub fn equivalence_class_samples<T: Float>(
    state: &GaussianState<T>,
    theta1: T,
    theta2: T,
    tol: T,
) -> Result<(GaussianState<T>, GaussianState<T>)> {
    if state.modes() != 2 {
        return Err(Error::Shape(format!("expected a two-mode state, got {} modes", state.modes())));
    }
    if let Some(v) = check_hypothesis(state, tol) {
        return Err(Error::HypothesisViolated { mode: v.mode, reason: v.reason });
    }
    let unswapped = IncoherentUnitary::new(vec![0, 1], vec![theta1, theta2])?;
    // Rotating after the swap equals swapping after rotating with exchanged angles.
    let swapped = IncoherentUnitary::new(vec![1, 0], vec![theta2, theta1])?;
    Ok((apply_incoherent_unitary(&unswapped, state)?, apply_incoherent_unitary(&swapped, state)?))
}

/// Mean and covariance of a one-mode coherent state `|α⟩`.
pub fn coherent<T: Float>(alpha: Complex<T>) -> Result<GaussianState<T>> {
    displaced_squeezed(&DisplacedSqueezedParams::new(alpha, Complex::new(T::zero(), T::zero())))
}

/// Attaches a mean vector to an existing state, re-validating the result.
pub fn with_mean<T: Float>(state: &GaussianState<T>, mean: &[Vector2<T>]) -> Result<GaussianState<T>> {
    if mean.len() != state.modes() {
        return Err(Error::Shape(format!("{} mode means for {} modes", mean.len(), state.modes())));
    }
    let d = DVector::from_iterator(2 * mean.len(), mean.iter().flat_map(|v| [v[0], v[1]]));
    GaussianState::validate(state.cov().clone(), d, T::DEFAULT_TOL)
}
