//! Numerical and exact verification tools for vector-valued Siegel modular
//! forms of degree two built from theta constants.

pub mod bracket;
pub mod covering;
pub mod exact;
pub mod grid;
pub mod module_lab;
pub mod real;
pub mod theta;
