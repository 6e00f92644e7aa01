//! Certificate search behind `decide_equivalence`.

use std::collections::VecDeque;

use nalgebra::{Matrix2, Vector2};

use super::{polar_angle, EquivalenceVerdict, IncoherentUnitary, Witness};
use crate::scalar::{unit_floor, Float};
use crate::state::GaussianState;
use crate::symplectic::rotation;

/// Points of the fallback scan over a free root angle.
const SCAN_POINTS: usize = 360;
const GOLDEN_ITERS: usize = 100;

/// Covariance blocks and mode means of one state.
pub(super) struct Blocks<T: Float> {
    pub m: usize,
    v: Vec<Matrix2<T>>,
    d: Vec<Vector2<T>>,
}

impl<T: Float> Blocks<T> {
    pub fn new(state: &GaussianState<T>) -> Self {
        let m = state.modes();
        let v = (0..m * m).map(|k| state.block(k / m, k % m)).collect();
        let d = (0..m).map(|i| state.mode_mean(i)).collect();
        Self { m, v, d }
    }

    pub fn v(&self, i: usize, j: usize) -> &Matrix2<T> {
        &self.v[i * self.m + j]
    }

    pub fn d(&self, i: usize) -> &Vector2<T> {
        &self.d[i]
    }
}

/// Anisotropy `(r, 2φ)` of a symmetric 2×2 matrix: its traceless part is
/// `r [[cos 2φ, sin 2φ], [sin 2φ, −cos 2φ]]`.
fn anisotropy<T: Float>(a: &Matrix2<T>) -> (T, T) {
    let half = (a[(0, 0)] - a[(1, 1)]) / T::lit(2.0);
    let off = (a[(0, 1)] + a[(1, 0)]) / T::lit(2.0);
    (half.hypot(off), off.atan2(half))
}

/// Singular values (descending) and determinant of a 2×2 block, all
/// invariant under `B ↦ R B R'ᵗ` with rotations `R`, `R'`.
fn block_invariants<T: Float>(b: &Matrix2<T>) -> [T; 3] {
    let det = b.determinant();
    let fro2 = b.norm_squared();
    let gap = (fro2 * fro2 - T::lit(4.0) * det * det).max(T::zero()).sqrt();
    let s1 = ((fro2 + gap) / T::lit(2.0)).max(T::zero()).sqrt();
    let s2 = if s1 > T::zero() { det.magnitude() / s1 } else { T::zero() };
    [s1, s2, det]
}

/// Eigenvalues (descending) of a symmetric 2×2 block.
fn sym_eigenvalues<T: Float>(b: &Matrix2<T>) -> [T; 2] {
    let mean = b.trace() / T::lit(2.0);
    let (r, _) = anisotropy(b);
    [mean + r, mean - r]
}

/// Whether two invariant triples can come from blocks `A`, `B` with
/// `‖A − B‖_F ≤ tol`. Singular values and eigenvalues move by at most the
/// Frobenius distance; the determinant by at most `tol (‖A‖_F + ‖B‖_F + tol)`.
fn invariants_close<T: Float>(a: &[T; 3], b: &[T; 3], tol: T) -> bool {
    let norm_a = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let norm_b = (b[0] * b[0] + b[1] * b[1]).sqrt();
    (a[0] - b[0]).magnitude() <= tol
        && (a[1] - b[1]).magnitude() <= tol
        && (a[2] - b[2]).magnitude() <= tol * (norm_a + norm_b + tol)
}

/// Perfect matching between two multisets of invariant triples.
fn multiset_match<T: Float>(a: &[[T; 3]], b: &[[T; 3]], tol: T) -> bool {
    fn go<T: Float>(a: &[[T; 3]], b: &[[T; 3]], used: &mut [bool], tol: T) -> bool {
        let Some((first, rest)) = a.split_first() else { return true };
        for k in 0..b.len() {
            if !used[k] && invariants_close(first, &b[k], tol) {
                used[k] = true;
                if go(rest, b, used, tol) {
                    return true;
                }
                used[k] = false;
            }
        }
        false
    }
    a.len() == b.len() && go(a, b, &mut vec![false; b.len()], tol)
}

/// Rotation-invariant description of one mode.
struct Fingerprint<T: Float> {
    eig: [T; 2],
    mean_norm: T,
    incident: Vec<[T; 3]>,
}

impl<T: Float> Fingerprint<T> {
    fn new(blocks: &Blocks<T>, i: usize) -> Self {
        let incident = (0..blocks.m).filter(|&j| j != i).map(|j| block_invariants(blocks.v(i, j))).collect();
        Self { eig: sym_eigenvalues(blocks.v(i, i)), mean_norm: blocks.d(i).norm(), incident }
    }

    fn matches(&self, other: &Self, tol: T) -> bool {
        (self.eig[0] - other.eig[0]).magnitude() <= tol
            && (self.eig[1] - other.eig[1]).magnitude() <= tol
            && (self.mean_norm - other.mean_norm).magnitude() <= tol
            && multiset_match(&self.incident, &other.incident, tol)
    }
}

/// Candidate angles for one mode obtained from data local to that mode.
struct Anchor<T: Float> {
    strength: T,
    angles: Vec<T>,
}

pub(super) struct Search<'a, T: Float> {
    a: Blocks<T>,
    b: Blocks<T>,
    threshold: T,
    /// Edges of the coupling graph: `‖V_ij‖_F` above this.
    edge_thr: T,
    /// Anchors weaker than this are ignored.
    anchor_thr: T,
    _states: std::marker::PhantomData<&'a GaussianState<T>>,
}

impl<'a, T: Float> Search<'a, T> {
    pub fn new(rho: &'a GaussianState<T>, sigma: &'a GaussianState<T>, threshold: T, tol: T) -> Self {
        let scale = unit_floor(rho.cov().norm().max(sigma.cov().norm()));
        Self {
            a: Blocks::new(rho),
            b: Blocks::new(sigma),
            threshold,
            edge_thr: tol * scale,
            anchor_thr: tol.sqrt() * scale,
            _states: std::marker::PhantomData,
        }
    }

    pub fn run(&self) -> EquivalenceVerdict<T> {
        let m = self.a.m;
        // Any accepted certificate moves each block by at most the residual,
        // so fingerprints must agree to that accuracy.
        let fp_tol = self.threshold * T::lit(2.0);
        let fa: Vec<_> = (0..m).map(|i| Fingerprint::new(&self.a, i)).collect();
        let fb: Vec<_> = (0..m).map(|k| Fingerprint::new(&self.b, k)).collect();
        let candidates: Vec<Vec<usize>> =
            (0..m).map(|i| (0..m).filter(|&k| fa[i].matches(&fb[k], fp_tol)).collect()).collect();
        if candidates.iter().any(Vec::is_empty) {
            return EquivalenceVerdict::NotEquivalent { witness: Witness::ModeFingerprints, best_residual: None };
        }

        let mut best: Option<T> = None;
        let mut found = None;
        let mut perm = Vec::with_capacity(m);
        let mut used = vec![false; m];
        self.enumerate(&candidates, fp_tol, &mut perm, &mut used, &mut |perm| {
            let (angles, residual) = self.solve_angles(perm);
            best = Some(best.map_or(residual, |b: T| b.min(residual)));
            if residual <= self.threshold {
                found = Some((perm.to_vec(), angles, residual));
                true
            } else {
                false
            }
        });
        match found {
            Some((perm, angles, residual)) => EquivalenceVerdict::Equivalent {
                certificate: IncoherentUnitary::new(perm, angles).expect("search yields a permutation"),
                residual,
            },
            None => match best {
                None => EquivalenceVerdict::NotEquivalent { witness: Witness::ModeFingerprints, best_residual: None },
                Some(r) => {
                    EquivalenceVerdict::NotEquivalent { witness: Witness::SearchExhausted, best_residual: Some(r) }
                }
            },
        }
    }

    /// Depth-first enumeration of permutations in lexicographic order,
    /// pruned by pairwise block invariants. Stops when `visit` returns true.
    fn enumerate(
        &self,
        candidates: &[Vec<usize>],
        tol: T,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let i = perm.len();
        if i == self.a.m {
            return visit(perm);
        }
        for &k in &candidates[i] {
            if used[k] {
                continue;
            }
            let consistent = perm.iter().enumerate().all(|(j, &pj)| {
                invariants_close(&block_invariants(self.a.v(i, j)), &block_invariants(self.b.v(k, pj)), tol)
            });
            if !consistent {
                continue;
            }
            used[k] = true;
            perm.push(k);
            if self.enumerate(candidates, tol, perm, used, visit) {
                return true;
            }
            perm.pop();
            used[k] = false;
        }
        false
    }

    fn target_v(&self, perm: &[usize], i: usize, j: usize) -> &Matrix2<T> {
        self.b.v(perm[i], perm[j])
    }

    fn anchor(&self, perm: &[usize], i: usize) -> Option<Anchor<T>> {
        let d = self.a.d(i);
        if d.norm() > self.anchor_thr {
            let e = self.b.d(perm[i]);
            return Some(Anchor { strength: d.norm(), angles: vec![polar_angle(d) - polar_angle(e)] });
        }
        let two = T::lit(2.0);
        let from_sym = |src: Matrix2<T>, dst: Matrix2<T>, weight: T| {
            let (r, phi2) = anisotropy(&src);
            let (_, psi2) = anisotropy(&dst);
            let theta = (phi2 - psi2) / two;
            (r / weight, vec![theta, theta + T::pi()])
        };
        let mut best: Option<Anchor<T>> = None;
        let mut offer = |(strength, angles): (T, Vec<T>)| {
            if strength > self.anchor_thr && best.as_ref().is_none_or(|b| strength > b.strength) {
                best = Some(Anchor { strength, angles });
            }
        };
        offer(from_sym(*self.a.v(i, i), *self.target_v(perm, i, i), T::one()));
        for j in (0..self.a.m).filter(|&j| j != i) {
            let src = self.a.v(i, j);
            let dst = self.target_v(perm, i, j);
            let weight = unit_floor(src.norm());
            offer(from_sym(src * src.transpose(), dst * dst.transpose(), weight));
        }
        best
    }

    /// Angle of mode `j` forced by the block `V_ij` once `θ_i` is known:
    /// least squares for `V_ij R(θ_j)ᵗ = R(θ_i)ᵗ W_ij` in `(cos θ_j, sin θ_j)`.
    fn propagate_angle(&self, perm: &[usize], i: usize, j: usize, theta_i: T) -> T {
        let a = self.a.v(i, j);
        let x = rotation(theta_i).transpose() * self.target_v(perm, i, j);
        let aj = a * Matrix2::new(T::zero(), -T::one(), T::one(), T::zero());
        let c = x.dot(a);
        let s = x.dot(&aj);
        s.atan2(c)
    }

    /// Fills the angles of a connected component from its root, always
    /// expanding along the strongest available edge.
    fn propagate(&self, perm: &[usize], component: &[usize], root: usize, theta: T, angles: &mut [T]) {
        let m = self.a.m;
        let mut solved = vec![false; m];
        angles[root] = theta;
        solved[root] = true;
        for _ in 1..component.len() {
            let mut pick: Option<(T, usize, usize)> = None;
            for &i in component.iter().filter(|&&i| solved[i]) {
                for &j in component.iter().filter(|&&j| !solved[j]) {
                    let w = self.a.v(i, j).norm();
                    if w > self.edge_thr && pick.is_none_or(|(bw, _, _)| w > bw) {
                        pick = Some((w, i, j));
                    }
                }
            }
            let Some((_, i, j)) = pick else { break };
            angles[j] = self.propagate_angle(perm, i, j, angles[i]);
            solved[j] = true;
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let m = self.a.m;
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for (j, seen_j) in seen.iter_mut().enumerate() {
                    if !*seen_j && self.a.v(i, j).norm() > self.edge_thr {
                        *seen_j = true;
                        comp.push(j);
                        queue.push_back(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Squared residual restricted to the blocks and means of `nodes`.
    fn partial_residual2(&self, perm: &[usize], nodes: &[usize], angles: &[T]) -> T {
        let rot: Vec<Matrix2<T>> = nodes.iter().map(|&i| rotation(angles[i])).collect();
        let mut acc = T::zero();
        for (p, &i) in nodes.iter().enumerate() {
            acc += (rot[p] * self.a.d(i) - self.b.d(perm[i])).norm_squared();
            for (q, &j) in nodes.iter().enumerate() {
                acc += (rot[p] * self.a.v(i, j) * rot[q].transpose() - self.target_v(perm, i, j)).norm_squared();
            }
        }
        acc
    }

    /// `max(‖UVUᵗ − V'‖_F, ‖Ud − d'‖)` for a full assignment.
    fn residual(&self, perm: &[usize], angles: &[T]) -> T {
        let rot: Vec<Matrix2<T>> = angles.iter().map(|&a| rotation(a)).collect();
        let (mut cov, mut mean) = (T::zero(), T::zero());
        for i in 0..self.a.m {
            mean += (rot[i] * self.a.d(i) - self.b.d(perm[i])).norm_squared();
            for j in 0..self.a.m {
                cov += (rot[i] * self.a.v(i, j) * rot[j].transpose() - self.target_v(perm, i, j)).norm_squared();
            }
        }
        cov.sqrt().max(mean.sqrt())
    }

    fn solve_component(&self, perm: &[usize], comp: &[usize], angles: &mut [T]) {
        let anchored = comp.iter().filter_map(|&i| self.anchor(perm, i).map(|a| (i, a))).max_by(|(_, x), (_, y)| {
            // Unique angles first, then the strongest anchor.
            (y.angles.len().cmp(&x.angles.len())).then(x.strength.partial_cmp(&y.strength).expect("finite"))
        });
        let mut trial = angles.to_vec();
        let eval = |root: usize, theta: T, trial: &mut Vec<T>| {
            self.propagate(perm, comp, root, theta, trial);
            self.partial_residual2(perm, comp, trial)
        };
        let (root, thetas) = match anchored {
            Some((root, anchor)) => (root, anchor.angles),
            None => {
                let root = comp[0];
                if eval(root, T::zero(), &mut trial) <= self.threshold * self.threshold / T::lit(4.0) {
                    (root, vec![T::zero()])
                } else {
                    (root, vec![self.scan_root(perm, comp, root)])
                }
            }
        };
        let mut best: Option<(T, Vec<T>)> = None;
        for theta in thetas {
            let r = eval(root, theta, &mut trial);
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, trial.clone()));
            }
        }
        let (_, solved) = best.expect("at least one root angle");
        for &i in comp {
            angles[i] = solved[i];
        }
    }

    /// Grid scan over the root angle of an anchorless component followed by
    /// golden-section refinement around the best grid point.
    fn scan_root(&self, perm: &[usize], comp: &[usize], root: usize) -> T {
        let mut trial = vec![T::zero(); self.a.m];
        let mut f = |theta: T| {
            self.propagate(perm, comp, root, theta, &mut trial);
            self.partial_residual2(perm, comp, &trial).sqrt()
        };
        let step = T::two_pi() / T::lit(SCAN_POINTS as f64);
        let (mut best_theta, mut best_val) = (T::zero(), f(T::zero()));
        for k in 1..SCAN_POINTS {
            let theta = step * T::lit(k as f64);
            let val = f(theta);
            if val < best_val {
                best_theta = theta;
                best_val = val;
            }
        }
        golden_section(&mut f, best_theta - step, best_theta + step, GOLDEN_ITERS)
    }

    /// Per-mode golden-section polishing of the full residual; only used when
    /// the propagated solution narrowly misses the threshold.
    fn polish(&self, perm: &[usize], angles: &mut [T]) {
        let mut width = T::lit(1e-3);
        for _ in 0..12 {
            for i in 0..self.a.m {
                let center = angles[i];
                let mut work = angles.to_vec();
                let mut f = |theta: T| {
                    work[i] = theta;
                    self.partial_residual2(perm, &(0..self.a.m).collect::<Vec<_>>(), &work)
                };
                angles[i] = golden_section(&mut f, center - width, center + width, 60);
            }
            if self.residual(perm, angles) <= self.threshold {
                return;
            }
            width *= T::lit(0.3);
        }
    }

    /// Best angles for a fixed permutation and their residual.
    fn solve_angles(&self, perm: &[usize]) -> (Vec<T>, T) {
        let mut angles = vec![T::zero(); self.a.m];
        for comp in self.components() {
            self.solve_component(perm, &comp, &mut angles);
        }
        let mut residual = self.residual(perm, &angles);
        if residual > self.threshold && residual <= self.threshold * T::lit(1e4) {
            self.polish(perm, &mut angles);
            residual = self.residual(perm, &angles);
        }
        for a in angles.iter_mut() {
            *a = normalize_angle(*a);
        }
        (angles, residual)
    }
}

/// Maps an angle into `[0, 2π)`.
pub(super) fn normalize_angle<T: Float>(x: T) -> T {
    let two_pi = T::two_pi();
    let y = x % two_pi;
    if y < T::zero() {
        y + two_pi
    } else {
        y
    }
}

/// Minimizer of a unimodal function on `[lo, hi]`.
pub(super) fn golden_section<T: Float>(f: &mut dyn FnMut(T) -> T, lo: T, hi: T, iters: usize) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anisotropy_of_rotated_diagonal() {
        let a = Matrix2::new(3.0f64, 0.0, 0.0, 1.0);
        let r = rotation(0.4f64);
        let b = r * a * r.transpose();
        let (ra, pa) = anisotropy(&a);
        let (rb, pb) = anisotropy(&b);
        assert!((ra - 1.0).abs() < 1e-15 && (rb - 1.0).abs() < 1e-14);
        // R(θ) turns the principal axis by −θ.
        assert!(((pa - pb) / 2.0 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn block_invariants_are_rotation_invariant() {
        let b = Matrix2::new(1.0f64, -0.3, 0.7, 0.2);
        let moved = rotation(1.3) * b * rotation(-0.4).transpose();
        let (x, y) = (block_invariants(&b), block_invariants(&moved));
        for k in 0..3 {
            assert!((x[k] - y[k]).abs() < 1e-14);
        }
        let svd = b.svd(false, false).singular_values;
        assert!((x[0] - svd[0]).abs() < 1e-14 && (x[1] - svd[1]).abs() < 1e-14);
    }

    #[test]
    fn multiset_matching_ignores_order() {
        let a = [[1.0f64, 0.5, 0.5], [2.0, 1.0, -2.0]];
        let b = [[2.0, 1.0, -2.0], [1.0, 0.5, 0.5]];
        assert!(multiset_match(&a, &b, 1e-12));
        let c = [[2.0, 1.0, 2.0], [1.0, 0.5, 0.5]];
        assert!(!multiset_match(&a, &c, 1e-12));
    }

    #[test]
    fn golden_section_finds_minimum() {
        let x = golden_section(&mut |t: f64| (t - 0.3).abs(), 0.0, 1.0, 100);
        assert!((x - 0.3).abs() < 1e-14);
    }
}
