//! Exact computations with multivariate rational functions and the
//! saturation of invariant rings and fields of finite groups.

pub mod cli;
pub mod closure;
pub mod factor;
pub mod field;
pub mod group;
pub mod linalg;
pub mod poly;
pub mod saturation;
