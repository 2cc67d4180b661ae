//! Numerical laboratory for Fermat functional equations `f₁^{n₁}+⋯+f_k^{n_k}=1`.
//!
//! * [`expr`]: expression DAG, evaluation and Taylor jets.
//! * [`elliptic`]: equianharmonic ℘ and the Baker pair.
//! * [`solutions`]: explicit solution families and residual verification.
//! * [`jets`]: Laurent/Puiseux series, chart expansions and jet-differential order tables.
//! * [`nevanlinna`]: characteristic, counting and proximity functions, defects.

pub mod elliptic;
pub mod expr;
pub mod jets;
pub mod nevanlinna;
pub mod quadrature;
pub mod series_ops;
pub mod solutions;

pub use num_complex::Complex64;
