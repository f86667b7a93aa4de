//! Milnor maps of bivariate complex rational functions, and symbolic Morse
//! map constructions that bound the Morse-Novikov number of braid closures.

pub mod bounds;
pub mod braid;
pub mod calculus;
mod linalg;
pub mod milnor;
pub mod poly;
