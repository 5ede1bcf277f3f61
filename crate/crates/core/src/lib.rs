//! Numerical machinery for elliptic beta integrals with a `W(F4)` parameter
//! symmetry and their basic hypergeometric degenerations.
//!
//! The crate is layered bottom-up:
//!
//! - [`special`]: q-shifted factorials, `(x;p,q)`, theta and elliptic gamma functions.
//! - [`series`]: basic hypergeometric `r+1 phi r` and very-well-poised `W` series.
//! - [`quadrature`]: trapezoid quadrature on origin-centred circles, pole
//!   catalogues, contour radius selection and numeric residues.
//! - [`beta`]: the elliptic beta integrals `E^m`, the `F4`-symmetric integral
//!   `E(b;t;p,q)` and all of its `p -> 0` limit objects.
//! - [`weyl`]: the `F4` root system, its Weyl group in exact rational
//!   arithmetic, and the multiplicative/additive actions on parameters.
//! - [`verify`]: seeded identity suites and machine-readable reports.

pub mod beta;
pub mod compensated;
pub mod error;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use special::{EllipticBase, TruncationPolicy, C64};
