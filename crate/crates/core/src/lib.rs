//! Exact-arithmetic computational algebra for quivers: root systems, counts
//! of absolutely indecomposable representations over finite fields, symbolic
//! shuffle-algebra operations with localized coproducts, and graded dimension
//! counts for the associated Lie algebras.

pub mod dimvec;
pub mod error;
pub mod expr;
pub mod ff;
pub mod gkm;
pub mod laurent;
pub mod pool;
pub mod poly;
pub mod quiver;
pub mod repcount;
pub mod roots;
pub mod shuffle;

pub use dimvec::DimVector;
pub use error::{Error, Result};
pub use expr::parse_poly;
pub use ff::FiniteField;
pub use gkm::{
    associative_dims, bps_character, km_root_mult, lie_dims, pbw_character, serre_exponent,
    GkmConfig, GkmDatum, GkmGenerator, GradedDims, QHalfPolynomial,
};
pub use laurent::LaurentSeries;
pub use poly::{Coeff, Monomial, MultiPoly, Var};
pub use quiver::{Quiver, QuiverDocument, StabilityCondition, Weighting};
pub use repcount::{
    kac_polynomial_cached,
    count_abs_indec, count_mu_fiber, kac_polynomial, CountCache, CountConfig, KacPolynomial,
    RepPoint,
};
pub use roots::{positive_roots, primitive_roots, RootClass, RootSet};
pub use shuffle::{
    check_bialgebra, euler_class, euler_factors, expand, shuffle_comul, shuffle_mul,
    shuffle_mul_allowing_asymmetric, swap_tau, BialgebraCheck, EulerKind, LocalizedElement,
    ShuffleElement,
};
