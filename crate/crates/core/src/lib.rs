//! Formal group laws of elliptic curves over small finite fields.
//!
//! The crate builds the formal group law of a Weierstrass curve as a
//! truncated power series, reads off heights, classification and the trace
//! of Frobenius mod p, and solves Couveignes' coefficient relations for
//! homomorphisms between formal group laws.

pub mod couveignes;
pub mod curve;
pub mod error;
pub mod field;
pub mod formal_group;
pub mod hom;
pub mod json;
pub mod series;

pub use error::{Error, Result};
pub use field::{enumerate_field, find_extension, Elem, Embedding, Field, FieldCtx, FieldElement};
pub use formal_group::{FormalGroupLaw, WeierstrassCurve};
pub use hom::{FglHom, Height};
pub use series::{Order, TruncSeries};
