//! Finite edge-colored linear orders without monochromatic triangles, the
//! extension functor `K` that realizes every one-point type over a structure
//! at the next color level, a generic-limit engine for the class, and a
//! refuter that produces checkable certificates against candidate
//! homogeneous one-point extensions of the limit.

pub mod amalgam;
pub mod canon;
pub mod color;
pub mod embedding;
pub mod error;
pub mod format;
pub mod katetov;
pub mod limit;
pub mod refuter;
pub mod structure;
pub mod types;

pub use amalgam::{amalgamate, Amalgam};
pub use canon::{canonical_code, CanonicalCode};
pub use color::{color_less, ColorTerm};
pub use embedding::{check_embedding, is_embedding, Embedding};
pub use katetov::{apply_k, apply_k_morphism, compare_types, iterate_k, ExtendedStructure};
pub use structure::{validate, FinStruct, Validity};
pub use types::{enumerate_types, realize_type, type_of_point, OnePointType};
