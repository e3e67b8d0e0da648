//! Exact integer computations with stacky fans.
//!
//! The pipeline runs from integer matrices ([`exactla`]) through finitely
//! generated abelian groups ([`abgroup`]) to Gale duals ([`galedual`]),
//! stacky fans and their quotient presentations ([`stackyfan`]), gerbes from
//! abelian central extensions ([`gerbe`]) and a cohomology check on the
//! arrangement complement ([`momentangle`]).

pub mod abgroup;
pub mod error;
pub mod exactla;
pub mod galedual;
pub mod gerbe;
pub mod json;
pub mod momentangle;
pub mod stackyfan;

pub use abgroup::{DiagGroup, FgAbGroup, GroupHom};
pub use error::{Error, Result};
pub use exactla::IntMatrix;
pub use galedual::{gale_dual, verify_gale_sequences, GaleDualResult};
pub use gerbe::{gerbe_stacky_fan, rigidification_extension, rigidify, ExtensionSpec, GerbeResult};
pub use momentangle::{complement_cohomology, verify_lemma, SimplicialComplex};
pub use stackyfan::{quotient_presentation, validate_stacky_fan, Fan, StackyFan};
