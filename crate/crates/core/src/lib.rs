//! Exact expansions of formal group laws of Buchstaber and Tate type, their
//! level-N elliptic specializations, and integer linear algebra on the
//! graded coefficient rings they generate.
//!
//! Layers, bottom up:
//! - [`algebra`]: big integers, rationals, Bezout vectors, Smith normal form.
//! - [`polyring`]: weighted sparse polynomials over `Z` or `Q`.
//! - [`series`]: truncated power series in a few formal variables.
//! - [`fgl`]: formal group laws, logarithms, exponentials, the Weierstrass `p`.
//! - [`levels`]: level-N relations and the order-by-order universal solver.
//! - [`gradedring`]: presentations, indecomposables, `rho(n)`, torsion.
//! - [`genus`]: Krichever equation, Hirzebruch functional equation, `CP^n` values.
//! - [`cli`]: the report-producing command front end.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod fgl;
pub mod genus;
pub mod gradedring;
pub mod levels;
pub mod polyring;
pub mod series;

pub use algebra::{Coeff, ElementOrder, Int, Rat};
pub use error::{Error, Result};
pub use fgl::FormalGroupLaw;
pub use polyring::{Monomial, Polynomial, VarRegistry};
pub use series::Series;
