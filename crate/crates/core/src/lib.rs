//! Exact arithmetic and measure computations for Diophantine approximation in
//! the field of formal Laurent series `F_q((X^{-1}))`.

pub mod contfrac;
pub mod error;
pub mod field;
pub mod lab;
pub mod laurent;
pub mod measure;
pub mod orbit;
pub mod poly;
pub mod testfn;
pub mod tree;

pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use laurent::{LaurentSeries, SeriesSource, Valuation};
pub use poly::{Degree, Poly};
