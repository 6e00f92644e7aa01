//! Gaussian states in the `(V, d)` phase-space representation.
//!
//! Quadratures are ordered `(x_1, p_1, …, x_m, p_m)`; the vacuum has `V = I`.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};
use crate::symplectic::{williamson_spectrum, SymplecticSpectrum};

/// A validated Gaussian state. Construction always goes through
/// [`GaussianState::validate`], so every value satisfies `V = Vᵗ` and
/// `V + iΩ ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Float> {
    mean: DVector<T>,
    cov: DMatrix<T>,
    spectrum: SymplecticSpectrum<T>,
}

impl<T: Float> GaussianState<T> {
    /// Validates a raw covariance matrix and mean vector.
    ///
    /// `tol` is relative: comparisons use `tol · max(1, ‖V‖_F)`. The matrix is
    /// symmetrized as `(V + Vᵗ)/2` when its asymmetry is within tolerance.
    pub fn validate(cov: DMatrix<T>, mean: DVector<T>, tol: T) -> Result<Self> {
        let n = cov.nrows();
        if n == 0 || !n.is_multiple_of(2) || cov.ncols() != n {
            return Err(Error::Shape(format!(
                "covariance must be 2m x 2m with m >= 1, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != n {
            return Err(Error::Shape(format!("mean has length {}, expected {n}", mean.len())));
        }
        if cov.iter().chain(mean.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entry".into()));
        }
        let scale = unit_floor(cov.norm());
        let asymmetry = (&cov - cov.transpose()).amax();
        if asymmetry > tol * scale {
            return Err(Error::NotSymmetric { asymmetry: asymmetry.as_f64() });
        }
        let cov = (&cov + cov.transpose()) / T::lit(2.0);
        let spectrum = williamson_spectrum(&cov, T::PAIRING_TOL)?;
        if spectrum.min() < T::one() - tol * scale {
            return Err(Error::UncertaintyViolation { value: spectrum.min().as_f64() });
        }
        Ok(Self { mean, cov, spectrum })
    }

    /// The `m`-mode vacuum.
    pub fn vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        Self::validate(DMatrix::identity(2 * modes, 2 * modes), DVector::zeros(2 * modes), T::DEFAULT_TOL)
    }

    pub fn modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<T> {
        &self.cov
    }

    /// `max(1, ‖V‖_F)`, the scale of relative tolerances for this state.
    pub fn scale(&self) -> T {
        unit_floor(self.cov.norm())
    }

    /// The 2×2 block `V_{ij}`; `block(i, i)` is the single-mode matrix `V^{(i)}`.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<T> {
        self.cov.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// The quadrature means `d^{(i)}` of mode `i`.
    pub fn mode_mean(&self, i: usize) -> Vector2<T> {
        self.mean.fixed_rows::<2>(2 * i).into_owned()
    }

    pub fn williamson_spectrum(&self) -> &SymplecticSpectrum<T> {
        &self.spectrum
    }

    /// `|det V − 1| ≤ tol · max(1, ‖V‖_F)`.
    pub fn is_pure(&self, tol: T) -> bool {
        (self.cov.determinant() - T::one()).magnitude() <= tol * self.scale()
    }

    /// Returns the thermal occupations `n̄_i` when the state is a product of
    /// thermal states (zero mean, vanishing off-diagonal blocks, isotropic
    /// diagonal blocks), and `None` otherwise.
    pub fn is_incoherent_state(&self, tol: T) -> Option<Vec<T>> {
        let thr = tol * self.scale();
        if self.mean.norm() > thr {
            return None;
        }
        let m = self.modes();
        let two = T::lit(2.0);
        let mut occupations = Vec::with_capacity(m);
        for i in 0..m {
            for j in 0..m {
                if i != j && self.block(i, j).norm() > thr {
                    return None;
                }
            }
            let b = self.block(i, i);
            if (b[(0, 0)] - b[(1, 1)]).magnitude() > thr || b[(0, 1)].magnitude() > thr {
                return None;
            }
            let lambda = (b[(0, 0)] + b[(1, 1)]) / two;
            if lambda < T::one() - thr {
                return None;
            }
            occupations.push(((lambda - T::one()) / two).max(T::zero()));
        }
        Some(occupations)
    }

    /// `ρ ⊗ σ`: block-diagonal covariance and concatenated means.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n1, n2) = (self.cov.nrows(), other.cov.nrows());
        let mut cov = DMatrix::zeros(n1 + n2, n1 + n2);
        cov.view_mut((0, 0), (n1, n1)).copy_from(&self.cov);
        cov.view_mut((n1, n1), (n2, n2)).copy_from(&other.cov);
        let mean = DVector::from_iterator(n1 + n2, self.mean.iter().chain(other.mean.iter()).copied());
        let mut values = self.spectrum.values().to_vec();
        values.extend_from_slice(other.spectrum.values());
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Self { mean, cov, spectrum: SymplecticSpectrum::from_vec_unchecked(values) }
    }

    pub fn into_parts(self) -> (DMatrix<T>, DVector<T>) {
        (self.cov, self.mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_mode(v: [f64; 4], d: [f64; 2]) -> Result<GaussianState<f64>> {
        GaussianState::validate(DMatrix::from_row_slice(2, 2, &v), DVector::from_row_slice(&d), 1e-9)
    }

    #[test]
    fn vacuum_is_valid_and_pure() {
        let s = one_mode([1.0, 0.0, 0.0, 1.0], [0.0, 0.0]).unwrap();
        assert!(s.is_pure(1e-9));
        assert_eq!(s.is_incoherent_state(1e-9), Some(vec![0.0]));
    }

    #[test]
    fn sub_vacuum_variance_is_rejected() {
        match one_mode([0.5, 0.0, 0.0, 0.5], [0.0, 0.0]) {
            Err(Error::UncertaintyViolation { value }) => assert!((value - 0.5).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn squeezed_vacuum_is_pure() {
        let r = 0.6f64;
        let s = one_mode([(2.0 * r).exp(), 0.0, 0.0, (-2.0 * r).exp()], [0.0, 0.0]).unwrap();
        assert!((s.williamson_spectrum().min() - 1.0).abs() < 1e-12);
        assert!(s.is_pure(1e-9));
        assert!(s.is_incoherent_state(1e-9).is_none());
    }

    #[test]
    fn shape_and_symmetry_errors() {
        let bad = GaussianState::<f64>::validate(DMatrix::identity(3, 3), DVector::zeros(3), 1e-9);
        assert!(matches!(bad, Err(Error::Shape(_))));
        let bad = GaussianState::<f64>::validate(DMatrix::identity(2, 2), DVector::zeros(4), 1e-9);
        assert!(matches!(bad, Err(Error::Shape(_))));
        let bad = one_mode([2.0, 0.1, 0.0, 2.0], [0.0, 0.0]);
        assert!(matches!(bad, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let s = one_mode([2.0, 1e-12, 0.0, 2.0], [0.0, 0.0]).unwrap();
        assert_eq!(s.cov()[(0, 1)], s.cov()[(1, 0)]);
    }

    #[test]
    fn incoherence_detection() {
        let s = GaussianState::<f64>::validate(
            DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, 5.0, 5.0])),
            DVector::zeros(4),
            1e-9,
        )
        .unwrap();
        assert_eq!(s.is_incoherent_state(1e-9), Some(vec![0.5, 2.0]));
        assert!(!s.is_pure(1e-9));

        let coherent = one_mode([1.0, 0.0, 0.0, 1.0], [2.0, 0.0]).unwrap();
        assert!(coherent.is_incoherent_state(1e-9).is_none());
        let anisotropic = one_mode([2.0, 0.0, 0.0, 3.0], [0.0, 0.0]).unwrap();
        assert!(anisotropic.is_incoherent_state(1e-9).is_none());
    }

    #[test]
    fn thermal_determinant() {
        let s = one_mode([3.0, 0.0, 0.0, 3.0], [0.0, 0.0]).unwrap();
        assert!((s.cov().determinant() - 9.0).abs() < 1e-12);
        assert!(!s.is_pure(1e-9));
    }

    #[test]
    fn tensor_product_blocks() {
        let a = one_mode([3.0, 0.0, 0.0, 3.0], [1.0, 0.0]).unwrap();
        let b = one_mode([2.0, 0.5, 0.5, 2.0], [0.0, -1.0]).unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.modes(), 2);
        assert_eq!(ab.block(1, 1), b.block(0, 0));
        assert_eq!(ab.block(0, 1), Matrix2::zeros());
        assert_eq!(ab.mode_mean(1), b.mode_mean(0));
        let direct = GaussianState::validate(ab.cov().clone(), ab.mean().clone(), 1e-9).unwrap();
        for (x, y) in direct.williamson_spectrum().values().iter().zip(ab.williamson_spectrum().values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
