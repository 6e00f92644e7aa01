//! Relative entropy of coherence and the quantities it is built from.
//!
//! All entropies are in bits.

use crate::error::{Error, Result};
use crate::scalar::Float;
use crate::state::GaussianState;
use crate::zoo::thermal;

/// Coherence summary of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport<T: Float> {
    pub n_bar: Vec<T>,
    pub entropy: T,
    pub c_rel_ent: T,
    /// The thermal product `⊗ ρ_th(n̄_i)` closest in relative entropy.
    pub reference: GaussianState<T>,
}

/// `x log₂ x` with `0 log₂ 0 = 0`.
fn xlog2x<T: Float>(x: T) -> T {
    if x < T::LOG_FLOOR {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// `g(x) = (x+1) log₂(x+1) − x log₂ x`, the entropy of a thermal state with
/// occupation `x`.
pub fn thermal_entropy<T: Float>(x: T) -> T {
    let x = x.max(T::zero());
    xlog2x(x + T::one()) - xlog2x(x)
}

/// `n̄_i = ¼ [tr V^{(i)} + ‖d^{(i)}‖² − 2]` for each mode.
///
/// Values in `[-tol, 0)` are clamped to zero; anything lower means the state
/// is corrupted.
pub fn mean_photon_numbers<T: Float>(state: &GaussianState<T>, tol: T) -> Result<Vec<T>> {
    let thr = tol * state.scale();
    let quarter = T::lit(0.25);
    (0..state.modes())
        .map(|i| {
            let n = quarter * (state.block(i, i).trace() + state.mode_mean(i).norm_squared() - T::lit(2.0));
            if n < -thr {
                Err(Error::InvariantViolation(format!("mode {i} has negative mean photon number {n}")))
            } else {
                Ok(n.max(T::zero()))
            }
        })
        .collect()
}

/// `S(ρ) = Σ g((v_i − 1)/2)`.
pub fn von_neumann_entropy<T: Float>(state: &GaussianState<T>) -> T {
    let half = T::lit(0.5);
    state.williamson_spectrum().values().iter().fold(T::zero(), |acc, &v| acc + thermal_entropy((v - T::one()) * half))
}

/// Closed-form `C_R(ρ) = −S(ρ) + Σ_i g(n̄_i)`.
pub fn relative_entropy_coherence<T: Float>(state: &GaussianState<T>, tol: T) -> Result<CoherenceReport<T>> {
    let n_bar = mean_photon_numbers(state, tol)?;
    let entropy = von_neumann_entropy(state);
    let dephased: T = n_bar.iter().fold(T::zero(), |acc, &n| acc + thermal_entropy(n));
    let c_rel_ent = (dephased - entropy).max(T::zero());
    let reference = thermal(&n_bar)?;
    Ok(CoherenceReport { n_bar, entropy, c_rel_ent, reference })
}

/// `S(ρ ‖ ⊗ρ_th(n'_i)) = −S(ρ) + Σ_i [(n̄_i+1) log₂(n'_i+1) − n̄_i log₂ n'_i]`.
///
/// Minimizing over `n_ref` recovers [`relative_entropy_coherence`].
pub fn relative_entropy_to_thermal<T: Float>(state: &GaussianState<T>, n_ref: &[T], tol: T) -> Result<T> {
    if n_ref.len() != state.modes() {
        return Err(Error::Shape(format!("reference has {} occupations for {} modes", n_ref.len(), state.modes())));
    }
    if let Some(bad) = n_ref.iter().find(|&&n| !(n > T::zero())) {
        return Err(Error::InvalidArgument(format!("thermal reference occupation {bad} is not positive")));
    }
    let n_bar = mean_photon_numbers(state, tol)?;
    let cross = n_bar.iter().zip(n_ref).fold(T::zero(), |acc, (&n, &r)| {
        let log_term = if n < T::LOG_FLOOR { T::zero() } else { n * r.log2() };
        acc + (n + T::one()) * (r + T::one()).log2() - log_term
    });
    Ok(cross - von_neumann_entropy(state))
}
