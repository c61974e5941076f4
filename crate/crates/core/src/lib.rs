//! Numerical toolkit for rotationally symmetric, asymptotically flat static
//! systems `(g, V)`.
//!
//! * [`metric`]: warped static metrics, the Schwarzschild catalog, static
//!   residuals and the flux form of the ADM mass.
//! * [`quantities`]: coordinate-sphere functionals and Minkowski-type
//!   inequalities.
//! * [`flow`]: umbilic inverse mean curvature flow (ODE and axisymmetric PDE).
//! * [`conformal`]: the flip `g₋ = V^{4/(n−2)} g`, `V₋ = 1/V`.
//! * [`stability`]: stability spectra of round CMC spheres.
//! * [`surfaces`]: axisymmetric surfaces in three dimensions and the
//!   Hawking-mass comparison.
//! * [`suite`]: parameter sweeps over named checks, as used by the CLI.
//!
//! ```
//! use staticgeo::metric::{schwarzschild, SchwarzschildParams};
//! use staticgeo::quantities::minkowski_check;
//!
//! let g = schwarzschild(SchwarzschildParams::new(3, 1.0)?);
//! let m = g.adm_mass(4.0)?;
//! let report = minkowski_check(&g, 4.0, m)?;
//! assert!(report.slack.abs() < 1e-12);
//! # Ok::<(), staticgeo::GeoError>(())
//! ```

// `!(x > 0.0)` rejects NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod flow;
pub mod grid;
pub mod jet;
pub mod metric;
pub mod ode;
pub mod quadrature;
pub mod quantities;
pub mod radial;
pub mod report;
pub mod stability;
pub mod suite;
pub mod surfaces;

pub use error::{GeoError, Result};
pub use jet::Jet;
pub use metric::{Dim, SchwarzschildParams, WarpedStaticMetric};
pub use report::InequalityReport;

// Book chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/conformal.md")]
    mod conformal {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/surfaces.md")]
    mod surfaces {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
