//! Gaussian channels `(T, N, d̄)` acting as `d ↦ Td + d̄`, `V ↦ TVTᵗ + N`.
//!
//! Besides validation and application this module recognizes the
//! incoherent class (one scaled orthogonal 2×2 block per column pair of `T`,
//! isotropic block-diagonal noise above the incoherence bound, no shift) and
//! builds Petz recovery maps against thermal references.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};
use crate::state::GaussianState;
use crate::symplectic::{rotation, SymplecticForm};
use crate::zoo::thermal;

/// Occupations at or below this make a thermal reference non-faithful.
pub const FAITHFUL_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel<T: Float> {
    t: DMatrix<T>,
    n: DMatrix<T>,
    shift: DVector<T>,
}

/// Minimum eigenvalue of the Hermitian matrix `N + i(Ω − TΩTᵗ)`.
fn cp_min_eigenvalue<T: Float>(t: &DMatrix<T>, n: &DMatrix<T>) -> Result<T> {
    let omega = SymplecticForm::<T>::new(t.nrows() / 2)?.into_matrix();
    let skew = &omega - t * &omega * t.transpose();
    let h = DMatrix::from_fn(n.nrows(), n.ncols(), |r, c| Complex::new(n[(r, c)], skew[(r, c)]));
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.min(x))))
        .ok_or_else(|| Error::Numeric("empty channel".into()))
}

impl<T: Float> GaussianChannel<T> {
    /// Validates shapes, symmetrizes `N` and checks complete positivity
    /// `N + iΩ − iTΩTᵗ ⪰ 0` within `tol · max(1, ‖N‖_F, ‖T‖_F²)`.
    pub fn validate(t: DMatrix<T>, n: DMatrix<T>, shift: DVector<T>, tol: T) -> Result<Self> {
        let dim = t.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || t.ncols() != dim {
            return Err(Error::Shape(format!("T must be 2m x 2m, got {}x{}", t.nrows(), t.ncols())));
        }
        if n.shape() != (dim, dim) || shift.len() != dim {
            return Err(Error::Shape(format!(
                "N is {}x{} and shift has length {}, expected {dim}",
                n.nrows(),
                n.ncols(),
                shift.len()
            )));
        }
        if t.iter().chain(n.iter()).chain(shift.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entry".into()));
        }
        let scale = unit_floor(n.norm()).max(t.norm_squared());
        let asymmetry = (&n - n.transpose()).amax();
        if asymmetry > tol * scale {
            return Err(Error::NotSymmetric { asymmetry: asymmetry.as_f64() });
        }
        let n = (&n + n.transpose()) / T::lit(2.0);
        let min_eig = cp_min_eigenvalue(&t, &n)?;
        if min_eig < -tol * scale {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min_eig.as_f64() });
        }
        Ok(Self { t, n, shift })
    }

    pub fn identity(modes: usize) -> Result<Self> {
        let dim = 2 * modes;
        Self::validate(DMatrix::identity(dim, dim), DMatrix::zeros(dim, dim), DVector::zeros(dim), T::DEFAULT_TOL)
    }

    pub fn modes(&self) -> usize {
        self.t.nrows() / 2
    }

    pub fn t(&self) -> &DMatrix<T> {
        &self.t
    }

    pub fn n(&self) -> &DMatrix<T> {
        &self.n
    }

    pub fn shift(&self) -> &DVector<T> {
        &self.shift
    }

    /// The 2×2 block of `T` at row pair `i`, column pair `j`.
    pub fn t_block(&self, i: usize, j: usize) -> Matrix2<T> {
        self.t.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    pub fn n_block(&self, i: usize, j: usize) -> Matrix2<T> {
        self.n.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    pub fn apply(&self, state: &GaussianState<T>, tol: T) -> Result<GaussianState<T>> {
        apply_channel(self, state, tol)
    }

    /// The channel `next ∘ self`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if next.modes() != self.modes() {
            return Err(Error::Shape("channels act on different mode counts".into()));
        }
        let t = &next.t * &self.t;
        let n = &next.t * &self.n * next.t.transpose() + &next.n;
        let shift = &next.t * &self.shift + &next.shift;
        Self::validate(t, n, shift, T::DEFAULT_TOL)
    }
}

/// `(V, d) ↦ (TVTᵗ + N, Td + d̄)`; the output is re-validated.
pub fn apply_channel<T: Float>(
    channel: &GaussianChannel<T>,
    state: &GaussianState<T>,
    tol: T,
) -> Result<GaussianState<T>> {
    if channel.modes() != state.modes() {
        return Err(Error::Shape(format!("channel acts on {} modes, state has {}", channel.modes(), state.modes())));
    }
    let cov = &channel.t * state.cov() * channel.t.transpose() + &channel.n;
    let mean = &channel.t * state.mean() + &channel.shift;
    GaussianState::validate(cov, mean, tol).map_err(|e| match e {
        Error::UncertaintyViolation { value } => {
            Error::Numeric(format!("completely positive channel produced an unphysical state (v = {value})"))
        }
        other => other,
    })
}

/// One scaled orthogonal block `t_j O_j` of an incoherent channel, sending
/// mode `source` to mode `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct IgoBlock<T: Float> {
    pub source: usize,
    pub target: usize,
    pub scale: T,
    pub orth: Matrix2<T>,
}

impl<T: Float> IgoBlock<T> {
    pub fn det_sign(&self) -> T {
        self.orth.determinant().signum()
    }
}

/// Structure of an incoherent Gaussian operation.
#[derive(Debug, Clone, PartialEq)]
pub struct IgoSpec<T: Float> {
    /// One entry per source mode, in source order.
    pub blocks: Vec<IgoBlock<T>>,
    /// Isotropic noise `ω_j` per target mode.
    pub noise: Vec<T>,
    pub strict: bool,
}

impl<T: Float> IgoSpec<T> {
    pub fn modes(&self) -> usize {
        self.noise.len()
    }

    /// `|1 − Σ_{k: r(k)=j} t_k² det O_k|`, the least noise target `j` needs.
    pub fn noise_bound(&self, target: usize) -> T {
        let s = self
            .blocks
            .iter()
            .filter(|b| b.target == target)
            .fold(T::zero(), |acc, b| acc + b.scale * b.scale * b.det_sign());
        (T::one() - s).magnitude()
    }

    /// Assembles `(T, ⊕ω_j I₂, 0)` and validates it.
    pub fn reconstruct(&self, tol: T) -> Result<GaussianChannel<T>> {
        let m = self.modes();
        if self.blocks.len() != m {
            return Err(Error::Shape(format!("{} blocks for {m} modes", self.blocks.len())));
        }
        let mut t = DMatrix::zeros(2 * m, 2 * m);
        for b in &self.blocks {
            if b.source >= m || b.target >= m {
                return Err(Error::InvalidArgument(format!("block {} -> {} out of range", b.source, b.target)));
            }
            t.fixed_view_mut::<2, 2>(2 * b.target, 2 * b.source).copy_from(&(b.orth * b.scale));
        }
        let diag = DVector::from_iterator(2 * m, self.noise.iter().flat_map(|&w| [w, w]));
        GaussianChannel::validate(t, DMatrix::from_diagonal(&diag), DVector::zeros(2 * m), tol)
    }
}

/// Outcome of [`classify_incoherent`].
#[derive(Debug, Clone, PartialEq)]
pub enum Classification<T: Float> {
    NotIncoherent { reason: String },
    Incoherent(IgoSpec<T>),
    StrictlyIncoherent(IgoSpec<T>),
}

impl<T: Float> Classification<T> {
    pub fn spec(&self) -> Option<&IgoSpec<T>> {
        match self {
            Classification::NotIncoherent { .. } => None,
            Classification::Incoherent(s) | Classification::StrictlyIncoherent(s) => Some(s),
        }
    }

    pub fn is_incoherent(&self) -> bool {
        self.spec().is_some()
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Classification::StrictlyIncoherent(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::NotIncoherent { .. } => "NotIncoherent",
            Classification::Incoherent(_) => "Incoherent",
            Classification::StrictlyIncoherent(_) => "StrictlyIncoherent",
        }
    }
}

fn not_incoherent<T: Float>(reason: &str) -> Classification<T> {
    Classification::NotIncoherent { reason: reason.to_string() }
}

/// Decides whether a channel is an incoherent Gaussian operation and, if so,
/// whether it is strictly incoherent (every row pair of `T` also carries a
/// single block).
///
/// A column pair whose block is below `tol · max(1, ‖T‖_F)` carries `t = 0`;
/// such sources are assigned to the target modes left unused by the nonzero
/// blocks, so they never spoil strictness.
pub fn classify_incoherent<T: Float>(channel: &GaussianChannel<T>, tol: T) -> Classification<T> {
    let m = channel.modes();
    if channel.shift.norm() > tol * unit_floor(channel.t.norm()) {
        return not_incoherent("nonzero displacement");
    }

    let zero_thr = tol * unit_floor(channel.t.norm());
    let mut blocks: Vec<Option<IgoBlock<T>>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut found: Option<(usize, Matrix2<T>)> = None;
        for i in 0..m {
            let b = channel.t_block(i, j);
            if b.norm() > zero_thr {
                if found.is_some() {
                    return not_incoherent("column-pair structure");
                }
                found = Some((i, b));
            }
        }
        match found {
            None => blocks.push(None),
            Some((i, b)) => {
                let t2 = b.norm_squared() / T::lit(2.0);
                let gram = b.transpose() * b - Matrix2::identity() * t2;
                if gram.norm() > tol * unit_floor(b.norm_squared()) {
                    return not_incoherent("block is not a scaled orthogonal matrix");
                }
                let scale = t2.sqrt();
                blocks.push(Some(IgoBlock { source: j, target: i, scale, orth: b / scale }));
            }
        }
    }

    let noise_thr = tol * unit_floor(channel.n.norm());
    let mut noise = Vec::with_capacity(m);
    for i in 0..m {
        for j in 0..m {
            if i != j && channel.n_block(i, j).norm() > noise_thr {
                return not_incoherent("noise is not block diagonal");
            }
        }
        let b = channel.n_block(i, i);
        if (b[(0, 0)] - b[(1, 1)]).magnitude() > noise_thr || b[(0, 1)].magnitude() > noise_thr {
            return not_incoherent("noise block is not isotropic");
        }
        noise.push((b[(0, 0)] + b[(1, 1)]) / T::lit(2.0));
    }

    let mut hit = vec![false; m];
    let mut injective = true;
    for b in blocks.iter().flatten() {
        if hit[b.target] {
            injective = false;
        }
        hit[b.target] = true;
    }
    let mut free_targets = (0..m).filter(|&i| !hit[i]);
    let blocks: Vec<IgoBlock<T>> = blocks
        .into_iter()
        .enumerate()
        .map(|(j, b)| {
            b.unwrap_or_else(|| IgoBlock {
                source: j,
                target: if injective { free_targets.next().unwrap_or(j) } else { j },
                scale: T::zero(),
                orth: Matrix2::identity(),
            })
        })
        .collect();

    let spec = IgoSpec { blocks, noise, strict: injective };
    let bound_thr = tol * unit_floor(channel.n.norm()).max(channel.t.norm_squared());
    for j in 0..m {
        if spec.noise[j] < spec.noise_bound(j) - bound_thr {
            return not_incoherent("noise below incoherence bound");
        }
    }
    if injective {
        Classification::StrictlyIncoherent(spec)
    } else {
        Classification::Incoherent(spec)
    }
}

fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<f64> {
    let r = rotation(rng.gen_range(0.0..std::f64::consts::TAU));
    if rng.gen_bool(0.5) {
        r
    } else {
        r * Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }
}

/// Samples an incoherent channel (strictly incoherent when `strict`):
/// `t_j ~ U[0, 1.2]`, `O_j` uniform over both components of `O(2)`, and
/// `ω_j` equal to the incoherence bound plus `U[0, 0.5)` jitter.
pub fn random_igo<T: Float, R: Rng + ?Sized>(modes: usize, strict: bool, rng: &mut R) -> Result<GaussianChannel<T>> {
    if modes == 0 {
        return Err(Error::InvalidArgument("mode count must be positive".into()));
    }
    let targets: Vec<usize> = if strict {
        let mut p: Vec<usize> = (0..modes).collect();
        p.shuffle(rng);
        p
    } else {
        (0..modes).map(|_| rng.gen_range(0..modes)).collect()
    };
    let blocks: Vec<IgoBlock<f64>> = targets
        .iter()
        .enumerate()
        .map(|(source, &target)| IgoBlock {
            source,
            target,
            scale: rng.gen_range(0.0..=1.2),
            orth: random_orthogonal(rng),
        })
        .collect();
    let mut spec = IgoSpec { blocks, noise: vec![0.0; modes], strict };
    for j in 0..modes {
        spec.noise[j] = spec.noise_bound(j) + rng.gen_range(0.0..0.5);
    }
    let cast = IgoSpec {
        blocks: spec
            .blocks
            .iter()
            .map(|b| IgoBlock { source: b.source, target: b.target, scale: T::lit(b.scale), orth: b.orth.map(T::lit) })
            .collect(),
        noise: spec.noise.iter().map(|&w| T::lit(w)).collect(),
        strict,
    };
    cast.reconstruct(T::DEFAULT_TOL)
}

/// Petz recovery map of an incoherent channel `Φ` with respect to the
/// thermal reference `⊗ρ_th(n̄_i)`, `n̄_i > 0`:
///
/// `T_Ψ = (⊕ √((2n̄_i+1)² − 1) I₂) Tᵗ (⊕ I₂ / √((2k̄_i+1)² − 1))`,
/// `N_Ψ = V_δ − T_Ψ V_{Φ(δ)} T_Ψᵗ`, zero shift, where `k̄` are the
/// occupations of `Φ(δ)`.
///
/// When `Φ` is strictly incoherent the recovery map is checked to be
/// incoherent as well.
pub fn petz_recovery<T: Float>(channel: &GaussianChannel<T>, n_ref: &[T], tol: T) -> Result<GaussianChannel<T>> {
    let classification = classify_incoherent(channel, tol);
    if let Classification::NotIncoherent { reason } = &classification {
        return Err(Error::InvalidArgument(format!("channel is not incoherent: {reason}")));
    }
    let m = channel.modes();
    if n_ref.len() != m {
        return Err(Error::Shape(format!("{} reference occupations for {m} modes", n_ref.len())));
    }
    let cutoff = T::lit(FAITHFUL_CUTOFF);
    if let Some(i) = n_ref.iter().position(|&n| !(n > cutoff)) {
        return Err(Error::InvalidArgument(format!("thermal reference mode {i} is not faithful")));
    }
    let reference = thermal(n_ref)?;
    let image = apply_channel(channel, &reference, tol)?;
    let k_bar = image
        .is_incoherent_state(tol)
        .ok_or_else(|| Error::Numeric("incoherent channel mapped a thermal state to a coherent one".into()))?;
    if let Some(mode) = k_bar.iter().position(|&k| !(k > cutoff)) {
        return Err(Error::NotFaithful { mode, occupation: k_bar[mode].as_f64() });
    }

    // (2n+1)² − 1 = 4n(n+1)
    let root = |n: T| T::lit(2.0) * (n * (n + T::one())).sqrt();
    let left = DVector::from_iterator(2 * m, n_ref.iter().flat_map(|&n| [root(n), root(n)]));
    let right = DVector::from_iterator(2 * m, k_bar.iter().flat_map(|&k| [root(k), root(k)]).map(|x| x.recip()));
    let t_psi = DMatrix::from_diagonal(&left) * channel.t.transpose() * DMatrix::from_diagonal(&right);
    let n_psi = reference.cov() - &t_psi * image.cov() * t_psi.transpose();
    let n_psi = (&n_psi + n_psi.transpose()) / T::lit(2.0);

    let psi = GaussianChannel::validate(t_psi, n_psi, DVector::zeros(2 * m), tol).map_err(|e| match e {
        Error::NotCompletelyPositive { min_eigenvalue } => {
            Error::Numeric(format!("Petz recovery is not completely positive (min eigenvalue {min_eigenvalue:e})"))
        }
        other => other,
    })?;
    if classification.is_strict() {
        if let Classification::NotIncoherent { reason } = classify_incoherent(&psi, tol) {
            return Err(Error::Numeric(format!(
                "Petz recovery of a strictly incoherent channel is not incoherent: {reason}"
            )));
        }
    }
    Ok(psi)
}
