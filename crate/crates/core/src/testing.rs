//! Seeded generators for randomized testing: physical states with a chosen
//! coupling structure, planted equivalent pairs and perturbations of them.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equivalence::{apply_incoherent_unitary, check_hypothesis, IncoherentUnitary};
use crate::error::{Error, Result};
use crate::scalar::Float;
use crate::state::GaussianState;

/// Attempts before a generator gives up on a rejection-sampling loop.
const MAX_ATTEMPTS: usize = 64;

/// Parameters of [`random_state`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomStateRecipe {
    pub modes: usize,
    pub seed: u64,
    /// Probability that a mode pair off the spanning path gets a coupler.
    pub coupling: f64,
    /// Mean entries are uniform in `[−mean_scale, mean_scale]`.
    pub mean_scale: f64,
    /// Squeezing parameters are uniform in `[0, squeeze_max]`.
    pub squeeze_max: f64,
    /// Symplectic eigenvalues are uniform in `[thermal_min, thermal_max]`.
    pub thermal_min: f64,
    pub thermal_max: f64,
    /// Couple the modes along a random spanning path so that every row of
    /// `V` has a nonzero off-diagonal block.
    pub hypothesis: bool,
}

impl RandomStateRecipe {
    pub fn new(modes: usize, seed: u64) -> Self {
        Self {
            modes,
            seed,
            coupling: 0.3,
            mean_scale: 1.0,
            squeeze_max: 0.5,
            thermal_min: 1.0,
            thermal_max: 2.0,
            hypothesis: true,
        }
    }

    fn check(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::InvalidArgument("recipe needs at least one mode".into()));
        }
        let ok = (0.0..=1.0).contains(&self.coupling)
            && self.mean_scale >= 0.0
            && self.squeeze_max >= 0.0
            && self.thermal_min >= 1.0
            && self.thermal_max >= self.thermal_min;
        if !ok {
            return Err(Error::InvalidArgument(format!("inconsistent recipe {self:?}")));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn embed_local(s: &mut DMatrix<f64>, i: usize, local: &Matrix2<f64>) {
    let mut g = DMatrix::identity(s.nrows(), s.nrows());
    g.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(local);
    *s = g * &*s;
}

/// Applies a two-mode symplectic with the given 2×2 blocks on modes `i`, `j`.
fn embed_pair(s: &mut DMatrix<f64>, i: usize, j: usize, blocks: [Matrix2<f64>; 4]) {
    let mut g = DMatrix::identity(s.nrows(), s.nrows());
    g.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&blocks[0]);
    g.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&blocks[1]);
    g.fixed_view_mut::<2, 2>(2 * j, 2 * i).copy_from(&blocks[2]);
    g.fixed_view_mut::<2, 2>(2 * j, 2 * j).copy_from(&blocks[3]);
    *s = g * &*s;
}

fn rot(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

fn local_symplectic<R: Rng + ?Sized>(rng: &mut R, squeeze_max: f64) -> Matrix2<f64> {
    let r = rng.gen_range(0.0..=squeeze_max);
    let sq = Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp());
    rot(rng.gen_range(0.0..std::f64::consts::TAU)) * sq * rot(rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Beam splitter followed by a two-mode squeezer, both with random strength.
fn mix_pair<R: Rng + ?Sized>(s: &mut DMatrix<f64>, i: usize, j: usize, rng: &mut R, squeeze_max: f64) {
    let phi: f64 = rng.gen_range(0.2..1.3);
    let (sn, cs) = phi.sin_cos();
    let id = Matrix2::identity();
    embed_pair(s, i, j, [id * cs, id * sn, -id * sn, id * cs]);
    let r = rng.gen_range(0.1..=squeeze_max.max(0.1));
    let z = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    embed_pair(s, i, j, [id * r.cosh(), z * r.sinh(), z * r.sinh(), id * r.cosh()]);
}

fn sample_state<R: Rng + ?Sized>(recipe: &RandomStateRecipe, rng: &mut R) -> (DMatrix<f64>, DVector<f64>) {
    let m = recipe.modes;
    let mut s = DMatrix::identity(2 * m, 2 * m);
    for i in 0..m {
        embed_local(&mut s, i, &local_symplectic(rng, recipe.squeeze_max));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut path = vec![false; m * m];
    if recipe.hypothesis {
        for w in order.windows(2) {
            mix_pair(&mut s, w[0], w[1], rng, recipe.squeeze_max);
            path[w[0] * m + w[1]] = true;
            path[w[1] * m + w[0]] = true;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            if !path[i * m + j] && rng.gen_bool(recipe.coupling) {
                mix_pair(&mut s, i, j, rng, recipe.squeeze_max);
            }
        }
    }
    for i in 0..m {
        embed_local(&mut s, i, &local_symplectic(rng, recipe.squeeze_max));
    }
    let v = DVector::from_iterator(
        2 * m,
        (0..m).flat_map(|_| {
            let x = rng.gen_range(recipe.thermal_min..=recipe.thermal_max);
            [x, x]
        }),
    );
    let cov = &s * DMatrix::from_diagonal(&v) * s.transpose();
    let mean = DVector::from_iterator(2 * m, (0..2 * m).map(|_| recipe.mean_scale * rng.gen_range(-1.0..=1.0)));
    (cov, mean)
}

fn convert<T: Float>(cov: &DMatrix<f64>, mean: &DVector<f64>) -> Result<GaussianState<T>> {
    GaussianState::validate(cov.map(T::lit), mean.map(T::lit), T::DEFAULT_TOL)
}

/// Draws a state from the recipe's own seeded stream.
pub fn random_state<T: Float>(recipe: &RandomStateRecipe) -> Result<GaussianState<T>> {
    random_state_with(recipe, &mut recipe.rng())
}

/// `V = S (⊕ v_i I₂) Sᵗ` with `S` a product of local rotations and
/// squeezers, beam splitters and two-mode squeezers; `v_i ≥ 1`, so the
/// state is physical by construction.
pub fn random_state_with<T: Float, R: Rng + ?Sized>(
    recipe: &RandomStateRecipe,
    rng: &mut R,
) -> Result<GaussianState<T>> {
    recipe.check()?;
    for _ in 0..MAX_ATTEMPTS {
        let (cov, mean) = sample_state(recipe, rng);
        let state = convert::<T>(&cov, &mean)?;
        if !recipe.hypothesis || check_hypothesis(&state, T::lit(1e-6)).is_none() {
            return Ok(state);
        }
    }
    Err(Error::Numeric("could not sample a state satisfying the hypothesis".into()))
}

/// Uniform permutation and angles in `[0, 2π)`.
pub fn random_incoherent_unitary<T: Float, R: Rng + ?Sized>(modes: usize, rng: &mut R) -> Result<IncoherentUnitary<T>> {
    let mut perm: Vec<usize> = (0..modes).collect();
    perm.shuffle(rng);
    let angles = (0..modes).map(|_| T::lit(rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    IncoherentUnitary::new(perm, angles)
}

/// `(ρ, σ = UρUᵗ, U)` with `ρ` from the recipe and a random planted `U`.
pub fn equivalent_pair<T: Float>(
    recipe: &RandomStateRecipe,
) -> Result<(GaussianState<T>, GaussianState<T>, IncoherentUnitary<T>)> {
    let mut rng = recipe.rng();
    let rho = random_state_with(recipe, &mut rng)?;
    let u = random_incoherent_unitary(recipe.modes, &mut rng)?;
    let sigma = apply_incoherent_unitary(&u, &rho)?;
    Ok((rho, sigma, u))
}

/// Adds `amount` to the symmetric pair of entries `(i, j)`, `(j, i)` of `V`
/// and revalidates.
pub fn perturb<T: Float>(state: &GaussianState<T>, i: usize, j: usize, amount: T) -> Result<GaussianState<T>> {
    let n = state.cov().nrows();
    if i >= n || j >= n {
        return Err(Error::Shape(format!("entry ({i}, {j}) outside a {n}x{n} covariance")));
    }
    let mut cov = state.cov().clone();
    cov[(i, j)] += amount;
    if i != j {
        cov[(j, i)] += amount;
    }
    GaussianState::validate(cov, state.mean().clone(), T::DEFAULT_TOL)
}

/// A planted pair whose second state then has one random off-diagonal entry
/// of `V` shifted by `amount`. Entries whose shift would leave the state
/// unphysical are redrawn.
pub fn perturbed_pair<T: Float>(recipe: &RandomStateRecipe, amount: T) -> Result<(GaussianState<T>, GaussianState<T>)> {
    let (rho, sigma, _) = equivalent_pair::<T>(recipe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = 2 * recipe.modes;
    for _ in 0..MAX_ATTEMPTS {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        if let Ok(shifted) = perturb(&sigma, i, j, amount) {
            return Ok((rho, shifted));
        }
    }
    Err(Error::Numeric("no off-diagonal perturbation keeps the state physical".into()))
}
