//! Schwarz symmetrization of simple functions, Hardy–Littlewood and Riesz
//! rearrangement functionals, supermodularity checks, and explicit
//! counterexamples to the rearrangement inequalities when an integrand is
//! not supermodular or a kernel is not radially nonincreasing.
//!
//! The admissible function class is [`SimpleFunction`]: finitely many
//! positive values on disjoint [`Region`]s of R^n (n <= 3). On this class
//! the Hardy–Littlewood functional is computed exactly, and the Riesz
//! functional exactly (indicator kernel) or by adaptive quadrature in 1D and
//! by seeded Monte Carlo in higher dimensions.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod functionals;
pub mod integrand;
pub mod necessity;
pub mod regions;
pub mod simplefn;
pub mod supermod;

pub use error::{Error, Result};
pub use functionals::{IntegralEstimate, Method, RieszOptions};
pub use integrand::{Integrand, Kernel, KernelSpec};
pub use necessity::CounterexampleReport;
pub use regions::{Region, RegionKind};
pub use simplefn::{Piece, SimpleFunction};
pub use supermod::{LatticeSpec, SupermodularityWitness};
