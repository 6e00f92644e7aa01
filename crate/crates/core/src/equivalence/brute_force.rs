//! Exhaustive grid search over permutations and rotation angles, kept
//! independent of the decider so the two can be cross-checked.

use nalgebra::{Matrix2, Vector2};

use super::{EquivalenceVerdict, IncoherentUnitary, Witness};
use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};
use crate::state::GaussianState;

const GOLDEN_ITERS: usize = 80;

/// Rotation by `θ`, repeated here so the oracle shares no code with the
/// decider beyond the state accessors.
fn rot<T: Float>(theta: T) -> Matrix2<T> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for k in 0..m {
            if !prefix.contains(&k) {
                prefix.push(k);
                go(prefix, m, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(m), m, &mut out);
    out
}

struct Problem<T: Float> {
    m: usize,
    /// Source blocks `V_ij` and means `d_i`.
    v: Vec<Matrix2<T>>,
    d: Vec<Vector2<T>>,
    /// Target blocks and means, already pulled back through the permutation.
    w: Vec<Matrix2<T>>,
    e: Vec<Vector2<T>>,
}

impl<T: Float> Problem<T> {
    fn new(rho: &GaussianState<T>, sigma: &GaussianState<T>, perm: &[usize]) -> Self {
        let m = rho.modes();
        let idx = |i: usize, j: usize| (i, j);
        let pairs: Vec<(usize, usize)> = (0..m * m).map(|k| idx(k / m, k % m)).collect();
        Self {
            m,
            v: pairs.iter().map(|&(i, j)| rho.block(i, j)).collect(),
            d: (0..m).map(|i| rho.mode_mean(i)).collect(),
            w: pairs.iter().map(|&(i, j)| sigma.block(perm[i], perm[j])).collect(),
            e: (0..m).map(|i| sigma.mode_mean(perm[i])).collect(),
        }
    }

    fn unary(&self, i: usize, r: &Matrix2<T>) -> T {
        let k = i * self.m + i;
        (r * self.v[k] * r.transpose() - self.w[k]).norm_squared() + (r * self.d[i] - self.e[i]).norm_squared()
    }

    /// Both off-diagonal blocks `(i, j)` and `(j, i)` together.
    fn pair(&self, i: usize, j: usize, ri: &Matrix2<T>, rj: &Matrix2<T>) -> T {
        let k = i * self.m + j;
        T::lit(2.0) * (ri * self.v[k] * rj.transpose() - self.w[k]).norm_squared()
    }

    /// `(‖UVUᵗ − V'‖_F, ‖Ud − d'‖)`.
    fn parts(&self, angles: &[T]) -> (T, T) {
        let r: Vec<_> = angles.iter().map(|&a| rot(a)).collect();
        let (mut cov, mut mean) = (T::zero(), T::zero());
        for i in 0..self.m {
            mean += (r[i] * self.d[i] - self.e[i]).norm_squared();
            for j in 0..self.m {
                let k = i * self.m + j;
                cov += (r[i] * self.v[k] * r[j].transpose() - self.w[k]).norm_squared();
            }
        }
        (cov.sqrt(), mean.sqrt())
    }

    fn residual(&self, angles: &[T]) -> T {
        let (c, d) = self.parts(angles);
        c.max(d)
    }

    fn objective(&self, angles: &[T]) -> T {
        let (c, d) = self.parts(angles);
        (c * c + d * d).sqrt()
    }
}

/// Grid indices minimizing the squared objective on a `grid^m` lattice.
fn grid_minimum<T: Float>(p: &Problem<T>, grid: &[T]) -> Vec<usize> {
    let g = grid.len();
    let rots: Vec<_> = grid.iter().map(|&a| rot(a)).collect();
    let unary: Vec<Vec<T>> = (0..p.m).map(|i| rots.iter().map(|r| p.unary(i, r)).collect()).collect();
    let pair_table = |i: usize, j: usize| -> Vec<T> {
        let mut t = Vec::with_capacity(g * g);
        for ri in &rots {
            for rj in &rots {
                t.push(p.pair(i, j, ri, rj));
            }
        }
        t
    };
    let argmin = |xs: &[T]| (0..xs.len()).fold(0, |b, k| if xs[k] < xs[b] { k } else { b });
    match p.m {
        1 => vec![argmin(&unary[0])],
        2 => {
            let p01 = pair_table(0, 1);
            let total: Vec<T> = (0..g * g).map(|k| unary[0][k / g] + unary[1][k % g] + p01[k]).collect();
            let k = argmin(&total);
            vec![k / g, k % g]
        }
        _ => {
            let (p01, p02, p12) = (pair_table(0, 1), pair_table(0, 2), pair_table(1, 2));
            let min_u2 = unary[2][argmin(&unary[2])];
            let row_min = |t: &[T], a: usize| t[a * g..(a + 1) * g].iter().fold(t[a * g], |x, &y| x.min(y));
            let min02: Vec<T> = (0..g).map(|a| row_min(&p02, a)).collect();
            let min12: Vec<T> = (0..g).map(|b| row_min(&p12, b)).collect();
            let mut best = (T::max_value().expect("bounded float"), vec![0, 0, 0]);
            for a in 0..g {
                for b in 0..g {
                    let partial = unary[0][a] + unary[1][b] + p01[a * g + b];
                    if partial + min_u2 + min02[a] + min12[b] >= best.0 {
                        continue;
                    }
                    let (ra, rb) = (&p02[a * g..(a + 1) * g], &p12[b * g..(b + 1) * g]);
                    for c in 0..g {
                        let total = partial + unary[2][c] + ra[c] + rb[c];
                        if total < best.0 {
                            best = (total, vec![a, b, c]);
                        }
                    }
                }
            }
            best.1
        }
    }
}

/// Minimizer of `f` on `[lo, hi]` by golden-section search.
fn golden<T: Float>(mut f: impl FnMut(T) -> T, lo: T, hi: T) -> T {
    let k = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let (mut c, mut d) = (b - k * (b - a), a + k * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            (b, d, fd) = (d, c, fc);
            c = b - k * (b - a);
            fc = f(c);
        } else {
            (a, c, fc) = (c, d, fd);
            d = a + k * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

/// Coordinate descent: one golden-section line search per angle per round
/// within one grid step of the current value.
fn refine<T: Float>(p: &Problem<T>, angles: &mut [T], step: T, rounds: usize, threshold: T) {
    for _ in 0..rounds {
        if p.residual(angles) <= threshold {
            return;
        }
        for i in 0..p.m {
            let center = angles[i];
            let mut trial = angles.to_vec();
            let best = golden(
                |x| {
                    trial[i] = x;
                    p.objective(&trial)
                },
                center - step,
                center + step,
            );
            if {
                trial[i] = best;
                p.objective(&trial)
            } <= p.objective(angles)
            {
                angles[i] = best;
            }
        }
    }
}

/// Ground-truth equivalence check for at most three modes: every
/// permutation, an angle grid of `grid_size` points per mode, then
/// `refine_iters` rounds of coordinate descent from the best grid point of
/// each permutation. Equivalent iff the refined residual is at most
/// `tol · max(1, ‖V‖_F, ‖V'‖_F)`.
pub fn brute_force_equivalence<T: Float>(
    rho: &GaussianState<T>,
    sigma: &GaussianState<T>,
    grid_size: usize,
    refine_iters: usize,
    tol: T,
) -> Result<EquivalenceVerdict<T>> {
    let m = rho.modes();
    if sigma.modes() != m {
        return Err(Error::Shape(format!("states have {m} and {} modes", sigma.modes())));
    }
    if m > 3 {
        return Err(Error::Unsupported(format!("brute-force search covers at most 3 modes, got {m}")));
    }
    if grid_size == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let threshold = tol * unit_floor(rho.cov().norm().max(sigma.cov().norm()));
    let step = T::two_pi() / T::lit(grid_size as f64);
    let grid: Vec<T> = (0..grid_size).map(|k| step * T::lit(k as f64)).collect();

    let mut best: Option<(T, Vec<usize>, Vec<T>)> = None;
    for perm in permutations(m) {
        let problem = Problem::new(rho, sigma, &perm);
        let mut angles: Vec<T> = grid_minimum(&problem, &grid).into_iter().map(|k| grid[k]).collect();
        refine(&problem, &mut angles, step, refine_iters, threshold);
        let r = problem.residual(&angles);
        if best.as_ref().is_none_or(|(b, _, _)| r < *b) {
            best = Some((r, perm, angles));
        }
    }
    let (residual, perm, angles) = best.expect("at least one permutation");
    if residual <= threshold {
        let two_pi = T::two_pi();
        let angles = angles.into_iter().map(|a| a - (a / two_pi).floor() * two_pi).collect();
        Ok(EquivalenceVerdict::Equivalent { certificate: IncoherentUnitary::new(perm, angles)?, residual })
    } else {
        Ok(EquivalenceVerdict::NotEquivalent { witness: Witness::SearchExhausted, best_residual: Some(residual) })
    }
}
