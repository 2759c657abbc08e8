//! Exact polynomial and linear algebra over the rationals.

pub mod matrix;
pub mod poly;

pub use matrix::{kernel_basis, subspace_intersect, AlgebraError, QMatrix, SparseVec, SubspaceBasis};
pub use poly::{binomial, monomials_of_degree, poly_mul, Monomial4, MonomialBasis, SparsePoly};
