//! Orthonormal bases of continuous functions on the integer rings of local
//! fields, built from seed functions by base-`q` digit expansion.

pub mod binom;
pub mod carlitz;
pub mod charzero;
pub mod digit;
pub mod error;
pub mod families;
pub mod field;
pub mod hyperdiff;
pub mod local;
pub mod lubin_tate;
pub mod measure;
pub mod par;
pub mod poly;
pub mod quotient;
pub mod schema;
pub mod tate;

pub use digit::{certify, BasisFamily, Certificate, Expander, Mode, SeedFunctions};
pub use error::{Error, Result};
pub use families::{build_family, FamilyKind};
pub use field::{Fe, FieldSpec, Gf};
pub use local::{LocalElem, LocalField, LocalFieldSpec, Repr};
pub use par::Exec;
pub use poly::{Poly, PolyRing};
pub use quotient::FunctionTable;
