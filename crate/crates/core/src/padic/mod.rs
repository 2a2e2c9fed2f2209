//! Capped-precision arithmetic in `Q_p` and its finite extensions.

pub mod element;
pub mod extension;
pub mod field;
pub mod fq;
pub mod linalg;
pub mod poly;
pub mod roots;
pub mod serial;
pub mod token;
pub mod tower;

pub use element::{assert_equal, LogBranch, PadicElement};
pub use field::{LocalField, PrimeConfig};
pub use fq::{Fq, FqElem, FqPoly};
pub use poly::Poly;
pub use token::parse_scalar;
pub use extension::{make_extension, make_extension_int, splitting_field, SplittingField};
pub use tower::{descend, embeddings, norm, trace, FieldMap};
