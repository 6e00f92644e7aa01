//! Symplectic structure: the form `Ω`, plane rotations and the Williamson
//! (symplectic) spectrum of a covariance matrix.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{unit_floor, Float};

/// The block-diagonal form `Ω = ⊕ [[0, 1], [-1, 0]]` on `m` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm<T: Float>(DMatrix<T>);

impl<T: Float> SymplecticForm<T> {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        let n = 2 * modes;
        let mut omega = DMatrix::zeros(n, n);
        for k in 0..modes {
            omega[(2 * k, 2 * k + 1)] = T::one();
            omega[(2 * k + 1, 2 * k)] = -T::one();
        }
        Ok(Self(omega))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }
}

/// Shorthand for `SymplecticForm::new(modes)`.
pub fn symplectic_form<T: Float>(modes: usize) -> Result<SymplecticForm<T>> {
    SymplecticForm::new(modes)
}

/// `R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn rotation<T: Float>(theta: T) -> Matrix2<T> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Symplectic eigenvalues `v_1 ≤ … ≤ v_m` of a covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum<T: Float>(Vec<T>);

impl<T: Float> SymplecticSpectrum<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn min(&self) -> T {
        self.0[0]
    }

    pub fn max(&self) -> T {
        self.0[self.0.len() - 1]
    }

    /// `∏ v_i²`, which equals `det V`.
    pub fn product_squared(&self) -> T {
        self.0.iter().fold(T::one(), |acc, &v| acc * v * v)
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(values: Vec<T>) -> Self {
        Self(values)
    }
}

/// Computes the symplectic eigenvalues of a symmetric matrix `V ≻ 0`.
///
/// The spectrum of `ΩV` is `{±i v_k}`. It is obtained from the similar real
/// antisymmetric matrix `K = V^{1/2} Ω V^{1/2}` through the Hermitian matrix
/// `iK`, whose real eigenvalues must pair up as `±v_k`. A pairing mismatch
/// larger than `pairing_tol · max(1, v_max)` is reported as a numeric error.
///
/// A matrix that is not positive definite yields `UncertaintyViolation`
/// with value `0`.
pub fn williamson_spectrum<T: Float>(v: &DMatrix<T>, pairing_tol: T) -> Result<SymplecticSpectrum<T>> {
    let n = v.nrows();
    if n == 0 || !n.is_multiple_of(2) || v.ncols() != n {
        return Err(Error::Shape(format!("expected a 2m x 2m matrix, got {}x{}", n, v.ncols())));
    }
    let m = n / 2;
    let eig = v.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= T::zero()) {
        return Err(Error::UncertaintyViolation { value: 0.0 });
    }
    let root_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt()));
    let root = &eig.eigenvectors * root_diag * eig.eigenvectors.transpose();
    let omega = SymplecticForm::<T>::new(m)?.into_matrix();
    let k = &root * omega * &root;
    let h = DMatrix::from_fn(n, n, |r, c| Complex::new(T::zero(), k[(r, c)]));
    let mut evals: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
    if evals.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite eigenvalue in Williamson spectrum".into()));
    }
    evals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let top = evals[n - 1].magnitude().max(evals[0].magnitude());
    let limit = pairing_tol * unit_floor(top);
    for k in 0..m {
        let mismatch = (evals[k] + evals[n - 1 - k]).magnitude();
        if mismatch > limit {
            return Err(Error::Numeric(format!(
                "symplectic eigenvalues failed to pair: {} vs {}",
                evals[k],
                evals[n - 1 - k]
            )));
        }
    }
    // Average each ±v pair to cancel the antisymmetric rounding.
    let mut values: Vec<T> = (0..m).map(|k| (evals[n - 1 - k] - evals[k]) / T::lit(2.0)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(SymplecticSpectrum(values))
}
