//! Frobenius-root computations over `F_{p^k}[x_1..x_m]` and over families
//! on the base line `F_{p^k}[t^{1/p^∞}]`.

pub mod absolute;
pub mod error;
pub mod field;
pub mod frobenius;
pub(crate) mod groebner;
pub mod ideal;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod relative;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use ideal::Ideal;
pub use monomial::{Monomial, MonomialOrder};
pub use poly::{PolyRing, Polynomial};
pub use frobenius::{bracket_power, canonical_multiplier, fedder_ideal, frobenius_root, partial_root, CartierMap, RootMode};
