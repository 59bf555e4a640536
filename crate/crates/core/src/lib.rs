//! # qig
//!
//! Numerical information geometry on the manifold of invertible density
//! matrices.
//!
//! The crate builds the two flat connections of quantum information geometry,
//! the exponential (`+1`) connection whose affine coordinates are the
//! exponents `θ` of `ρ = exp(Σ θ^i X_i − Ψ̃(θ))`, and the mixture (`−1`)
//! connection whose affine coordinates are the expectations `η_i = Tr(ρ X_i)`.
//! It pairs them with the family of monotone metrics generated by symmetric
//! operator monotone functions and measures, point by point, whether the two
//! connections are dual for a given metric.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`manifold`] | density matrices, tangent representations, charts |
//! | [`metrics`] | operator monotone functions, kernels, BKM in three forms |
//! | [`connections`] | covariant derivatives, transports, Christoffels, curvature |
//! | [`duality`] | duality residuals, Legendre potentials, uniqueness scan |
//! | [`channels`] | CPTP maps and the monotonicity sweep |
//!
//! ## Quick start
//!
//! ```
//! use qig::manifold::{DensityMatrix, TangentVector};
//! use qig::metrics::{monotone_metric, OperatorMonotoneFunction};
//! use qig::HermitianMatrix;
//!
//! let rho = DensityMatrix::from_diagonal(&[0.75, 0.25])?;
//! let sx = HermitianMatrix::from_parts(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2], vec![0.0; 2]])?;
//! let a = TangentVector::minus(rho, sx)?;
//!
//! let bkm = monotone_metric(&OperatorMonotoneFunction::bkm(), &a, &a)?;
//! assert!((bkm - 4.0 * 3f64.ln()).abs() < 1e-12);
//! # Ok::<(), qig::Error>(())
//! ```
//!
//! The guide under `book/` walks through each module; its code listings are
//! compiled and run as doctests of this crate.

#![forbid(unsafe_code)]

pub mod channels;
pub mod connections;
pub mod duality;
mod error;
pub mod fd;
mod hermitian;
pub mod manifold;
pub mod metrics;
pub mod quadrature;
pub mod sample;
pub mod spectral;

pub use error::{Error, Result};
pub use hermitian::{HermitianMatrix, Spectrum, C64};

// Book chapters are compiled as doctests so their listings stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/manifold.md")]
    mod manifold {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/connections.md")]
    mod connections {}
    #[doc = include_str!("../../../book/src/duality.md")]
    mod duality {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
