//! Pascal distribution series and coefficient criteria for the spirallike
//! classes S(ξ,γ,ρ) and K(ξ,γ,ρ).
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: Pascal probabilities, the series Θ_q^m, Hadamard products,
//!   the integral transform and the R^τ coefficient bound.
//! - [`summation`]: closed forms of the coefficient sums and the adaptive
//!   brute-force oracle behind them.
//! - [`criteria`]: every membership criterion in three variants (printed,
//!   re-derived, direct oracle sum).
//! - [`disk`]: grid evaluation of the defining functionals on the unit disk.
//! - [`scan`]: critical `q` by bisection and parameter sweeps.
//! - [`soundness`] and [`discrepancy`]: the two cross-checks run by the CLI
//!   and the acceptance suite.
//!
//! ```
//! use spiral_core::criteria::{criterion, CriterionId, SpiralClassParams, Variant};
//! use spiral_core::series::PascalParams;
//!
//! let p = PascalParams::new(1.0, 0.2).unwrap();
//! let c = SpiralClassParams::new(0.0, 0.0, 0.0).unwrap();
//! let v = criterion(CriterionId::ThetaInS, &p, &c, None, Variant::Direct).unwrap();
//! assert!(v.satisfied);
//! assert!((v.lhs - 0.3125).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod discrepancy;
pub mod disk;
pub mod error;
pub mod scan;
pub mod series;
pub mod soundness;
pub mod summation;

pub use error::{Error, Result};
