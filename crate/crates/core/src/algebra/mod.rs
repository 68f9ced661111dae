//! Exact arithmetic: GF(p), dense matrices and subspaces, Laurent
//! polynomials and symbol matrices, finite endomorphisms.

pub mod bitmat;
pub mod endo;
pub mod field;
pub mod laurent;
pub mod mat;

pub use bitmat::BitMatrix;
pub use endo::{EndoClass, FiniteEndo};
pub use field::{Fp, Scalar};
pub use laurent::{CharPoly, Exponent, LaurentPoly, SymbolMatrix};
pub use mat::{Mat, Subspace};
