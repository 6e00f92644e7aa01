//! Coherence of multimode Gaussian states.
//!
//! States are stored as `(V, d)`: a `2m × 2m` covariance matrix with the
//! vacuum at `V = I` and a mean vector, quadratures ordered
//! `(x_1, p_1, …, x_m, p_m)`. The crate computes the relative entropy of
//! coherence in closed form, recognizes (strictly) incoherent Gaussian
//! channels and builds their Petz recovery maps, and decides whether two
//! states are interconvertible by incoherent operations, returning an
//! incoherent unitary as a checkable certificate.
//!
//! Everything is generic over [`Float`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.
//!
//! ```
//! use gaussian_coherence::{relative_entropy_coherence, zoo, Complex};
//!
//! let coherent = zoo::coherent(Complex::new(1.0f64, 0.0)).unwrap();
//! let report = relative_entropy_coherence(&coherent, 1e-9).unwrap();
//! assert!((report.c_rel_ent - 2.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod coherence;
pub mod equivalence;
pub mod error;
pub mod json;
pub mod scalar;
pub mod state;
pub mod symplectic;
pub mod testing;
pub mod zoo;

pub use channel::{
    apply_channel, classify_incoherent, petz_recovery, random_igo, Classification, GaussianChannel, IgoBlock, IgoSpec,
};
pub use coherence::{
    mean_photon_numbers, relative_entropy_coherence, relative_entropy_to_thermal, von_neumann_entropy, CoherenceReport,
};
pub use equivalence::{
    apply_incoherent_unitary, brute_force_equivalence, certificate_residual, check_hypothesis, decide_equivalence,
    is_frozen, EquivalenceVerdict, FrozenReport, HypothesisViolation, IncoherentUnitary, Side, Witness,
};
pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Float;
pub use state::GaussianState;
pub use symplectic::{symplectic_form, williamson_spectrum, SymplecticForm, SymplecticSpectrum};

pub type State = GaussianState<f64>;
pub type Channel = GaussianChannel<f64>;
pub type Unitary = IncoherentUnitary<f64>;
pub type Verdict = EquivalenceVerdict<f64>;
pub type Report = CoherenceReport<f64>;
pub type Spectrum = SymplecticSpectrum<f64>;

pub type StateF32 = GaussianState<f32>;
pub type ChannelF32 = GaussianChannel<f32>;
