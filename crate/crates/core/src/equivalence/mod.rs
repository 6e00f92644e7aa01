//! Incoherent Gaussian equivalence.
//!
//! Two coherent states are interconvertible by incoherent Gaussian
//! operations exactly when an incoherent unitary (a mode permutation
//! composed with per-mode rotations) maps one onto the other. The decider
//! searches for such a unitary and returns it as a certificate; the
//! brute-force grid search in [`brute_force`] is an independent check.

mod brute_force;
mod search;

pub use brute_force::brute_force_equivalence;

use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::channel::{apply_channel, classify_incoherent, GaussianChannel};
use crate::coherence::relative_entropy_coherence;
use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};
use crate::state::GaussianState;
use crate::symplectic::rotation;

/// `U = (P_π ⊗ I₂) · ⊕ R(θ_i)`: mode `i` is rotated by `R(θ_i)` and moved to
/// position `perm[i]`. Every block has determinant `+1` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentUnitary<T: Float> {
    perm: Vec<usize>,
    angles: Vec<T>,
}

impl<T: Float> IncoherentUnitary<T> {
    pub fn new(perm: Vec<usize>, angles: Vec<T>) -> Result<Self> {
        let m = perm.len();
        if m == 0 || angles.len() != m {
            return Err(Error::Shape(format!("{} angles for a permutation of {m}", angles.len())));
        }
        let mut seen = vec![false; m];
        for &p in &perm {
            if p >= m || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("non-finite rotation angle".into()));
        }
        Ok(Self { perm, angles })
    }

    pub fn identity(modes: usize) -> Self {
        Self { perm: (0..modes).collect(), angles: vec![T::zero(); modes] }
    }

    pub fn modes(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    /// `U⁻¹ = ⊕ R(−θ_i) · (P_π ⊗ I₂)ᵗ`, again of the same form.
    pub fn inverse(&self) -> Self {
        let m = self.modes();
        let mut perm = vec![0; m];
        let mut angles = vec![T::zero(); m];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
            angles[p] = -self.angles[i];
        }
        Self { perm, angles }
    }

    /// The `2m × 2m` orthogonal symplectic matrix.
    pub fn matrix(&self) -> DMatrix<T> {
        let m = self.modes();
        let mut u = DMatrix::zeros(2 * m, 2 * m);
        for (i, (&p, &theta)) in self.perm.iter().zip(&self.angles).enumerate() {
            u.fixed_view_mut::<2, 2>(2 * p, 2 * i).copy_from(&rotation(theta));
        }
        u
    }

    /// The same map as a channel `(U, 0, 0)`.
    pub fn to_channel(&self) -> Result<GaussianChannel<T>> {
        let n = 2 * self.modes();
        GaussianChannel::validate(self.matrix(), DMatrix::zeros(n, n), DVector::zeros(n), T::DEFAULT_TOL)
    }
}

/// `(V, d) ↦ (UVUᵗ, Ud)`.
pub fn apply_incoherent_unitary<T: Float>(
    u: &IncoherentUnitary<T>,
    state: &GaussianState<T>,
) -> Result<GaussianState<T>> {
    let (cov, mean) = transform(u, state)?;
    GaussianState::validate(cov, mean, T::DEFAULT_TOL)
}

fn transform<T: Float>(u: &IncoherentUnitary<T>, state: &GaussianState<T>) -> Result<(DMatrix<T>, DVector<T>)> {
    let m = state.modes();
    if u.modes() != m {
        return Err(Error::Shape(format!("unitary acts on {} modes, state has {m}", u.modes())));
    }
    let rot: Vec<Matrix2<T>> = u.angles.iter().map(|&a| rotation(a)).collect();
    let mut cov = DMatrix::zeros(2 * m, 2 * m);
    let mut mean = DVector::zeros(2 * m);
    for i in 0..m {
        let pi = u.perm[i];
        mean.fixed_rows_mut::<2>(2 * pi).copy_from(&(rot[i] * state.mode_mean(i)));
        for j in 0..m {
            let pj = u.perm[j];
            let b = rot[i] * state.block(i, j) * rot[j].transpose();
            cov.fixed_view_mut::<2, 2>(2 * pi, 2 * pj).copy_from(&b);
        }
    }
    Ok((cov, mean))
}

/// `max(‖UVUᵗ − V'‖_F, ‖Ud − d'‖₂)`.
pub fn certificate_residual<T: Float>(
    u: &IncoherentUnitary<T>,
    rho: &GaussianState<T>,
    sigma: &GaussianState<T>,
) -> Result<T> {
    if sigma.modes() != rho.modes() {
        return Err(Error::Shape("states have different mode counts".into()));
    }
    let (cov, mean) = transform(u, rho)?;
    Ok((cov - sigma.cov()).norm().max((mean - sigma.mean()).norm()))
}

/// A state outside the hypothesis under which the equivalence criterion holds.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisViolation {
    pub mode: usize,
    pub reason: String,
}

/// For `m ≥ 2`, the first mode whose off-diagonal blocks `V_{ij}` all vanish
/// (within `tol · max(1, ‖V‖_F)`). For `m = 1`, a violation iff the state is
/// incoherent (`d = 0` and `V = λI`).
pub fn check_hypothesis<T: Float>(state: &GaussianState<T>, tol: T) -> Option<HypothesisViolation> {
    let thr = tol * state.scale();
    let m = state.modes();
    if m == 1 {
        let b = state.block(0, 0);
        let isotropic = (b[(0, 0)] - b[(1, 1)]).magnitude() <= thr && b[(0, 1)].magnitude() <= thr;
        return (state.mean().norm() <= thr && isotropic).then(|| HypothesisViolation {
            mode: 0,
            reason: "one-mode state is incoherent (d = 0 and V = λI)".into(),
        });
    }
    (0..m)
        .find(|&i| (0..m).all(|j| j == i || state.block(i, j).norm() <= thr))
        .map(|mode| HypothesisViolation { mode, reason: "row has no nonzero off-diagonal block".into() })
}

/// Invariant that separates two inequivalent states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Exactly one of the two states is incoherent, or their coherence differs.
    CoherenceMismatch,
    SymplecticSpectrum,
    /// No mode of one state matches the local invariants of a mode of the other.
    ModeFingerprints,
    /// Every candidate permutation and angle assignment was tried.
    SearchExhausted,
}

impl Witness {
    pub fn name(&self) -> &'static str {
        match self {
            Witness::CoherenceMismatch => "coherence mismatch",
            Witness::SymplecticSpectrum => "symplectic spectrum",
            Witness::ModeFingerprints => "mode fingerprints",
            Witness::SearchExhausted => "search exhausted",
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which of the two compared states a hypothesis violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquivalenceVerdict<T: Float> {
    Equivalent {
        certificate: IncoherentUnitary<T>,
        residual: T,
    },
    NotEquivalent {
        witness: Witness,
        best_residual: Option<T>,
    },
    /// Both states are incoherent and hence interconvertible; no unitary
    /// certificate is implied.
    AllIncoherent,
    HypothesisViolated {
        side: Side,
        mode: usize,
        reason: String,
    },
}

impl<T: Float> EquivalenceVerdict<T> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent { .. })
    }

    pub fn certificate(&self) -> Option<&IncoherentUnitary<T>> {
        match self {
            EquivalenceVerdict::Equivalent { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EquivalenceVerdict::Equivalent { .. } => "Equivalent",
            EquivalenceVerdict::NotEquivalent { .. } => "NotEquivalent",
            EquivalenceVerdict::AllIncoherent => "AllIncoherent",
            EquivalenceVerdict::HypothesisViolated { .. } => "HypothesisViolated",
        }
    }
}

/// Residual threshold `tol · max(1, ‖V‖_F, ‖V'‖_F)`, symmetric in the pair.
pub(crate) fn residual_threshold<T: Float>(rho: &GaussianState<T>, sigma: &GaussianState<T>, tol: T) -> T {
    tol * unit_floor(rho.cov().norm().max(sigma.cov().norm()))
}

/// Decides whether `rho` and `sigma` are related by an incoherent unitary.
///
/// Incoherent pairs and states outside the coupling hypothesis are reported
/// as such. Otherwise cheap invariants (symplectic spectrum, relative entropy
/// of coherence) are compared first, then permutations consistent with
/// per-mode and per-pair invariants are searched in lexicographic order and
/// the per-mode angles solved; the first candidate with residual at most
/// `tol · max(1, ‖V‖_F)` is returned.
pub fn decide_equivalence<T: Float>(
    rho: &GaussianState<T>,
    sigma: &GaussianState<T>,
    tol: T,
) -> Result<EquivalenceVerdict<T>> {
    let m = rho.modes();
    if sigma.modes() != m {
        return Err(Error::Shape(format!("states have {m} and {} modes", sigma.modes())));
    }
    match (rho.is_incoherent_state(tol).is_some(), sigma.is_incoherent_state(tol).is_some()) {
        (true, true) => return Ok(EquivalenceVerdict::AllIncoherent),
        (true, false) | (false, true) => {
            return Ok(EquivalenceVerdict::NotEquivalent { witness: Witness::CoherenceMismatch, best_residual: None })
        }
        (false, false) => {}
    }
    for (side, state) in [(Side::First, rho), (Side::Second, sigma)] {
        if let Some(v) = check_hypothesis(state, tol) {
            return Ok(EquivalenceVerdict::HypothesisViolated { side, mode: v.mode, reason: v.reason });
        }
    }

    let scale = unit_floor(rho.cov().norm().max(sigma.cov().norm()));
    let witness_tol = T::lit(1e-6).max(T::lit(100.0) * tol) * scale * scale;
    let spectrum_gap = rho
        .williamson_spectrum()
        .values()
        .iter()
        .zip(sigma.williamson_spectrum().values())
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).magnitude()));
    if spectrum_gap > witness_tol {
        return Ok(EquivalenceVerdict::NotEquivalent { witness: Witness::SymplecticSpectrum, best_residual: None });
    }
    let c_rho = relative_entropy_coherence(rho, tol)?.c_rel_ent;
    let c_sigma = relative_entropy_coherence(sigma, tol)?.c_rel_ent;
    if (c_rho - c_sigma).magnitude() > witness_tol {
        return Ok(EquivalenceVerdict::NotEquivalent { witness: Witness::CoherenceMismatch, best_residual: None });
    }

    let threshold = residual_threshold(rho, sigma, tol);
    Ok(search::Search::new(rho, sigma, threshold, tol).run())
}

/// Result of [`is_frozen`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenReport<T: Float> {
    pub frozen: bool,
    pub c_before: T,
    pub c_after: T,
    pub output: GaussianState<T>,
    /// `decide_equivalence(ρ, Φ(ρ))`, computed when the coherence is frozen.
    pub verdict: Option<EquivalenceVerdict<T>>,
}

/// Whether a strictly incoherent channel leaves the relative entropy of
/// coherence of `rho` unchanged, `|C_R(Φ(ρ)) − C_R(ρ)| ≤ tol`.
pub fn is_frozen<T: Float>(rho: &GaussianState<T>, channel: &GaussianChannel<T>, tol: T) -> Result<FrozenReport<T>> {
    let classification = classify_incoherent(channel, T::DEFAULT_TOL);
    if !classification.is_strict() {
        return Err(Error::InvalidArgument(format!("channel is {}, not strictly incoherent", classification.label())));
    }
    let output = apply_channel(channel, rho, T::DEFAULT_TOL)?;
    let c_before = relative_entropy_coherence(rho, T::DEFAULT_TOL)?.c_rel_ent;
    let c_after = relative_entropy_coherence(&output, T::DEFAULT_TOL)?.c_rel_ent;
    let frozen = (c_after - c_before).magnitude() <= tol;
    let verdict = if frozen { Some(decide_equivalence(rho, &output, T::RESIDUAL_TOL)?) } else { None };
    Ok(FrozenReport { frozen, c_before, c_after, output, verdict })
}

/// `Vector2` angle `atan2(y, x)`.
pub(crate) fn polar_angle<T: Float>(v: &Vector2<T>) -> T {
    v[1].atan2(v[0])
}
