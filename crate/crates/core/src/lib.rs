//! Construction, transformation and exact auditing of perfect and non-perfect
//! secret-sharing schemes represented as finite joint distributions.

pub mod access;
pub mod audit;
pub mod construct;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod field;
pub mod json;
pub mod scheme;
pub mod transform;

pub use access::{AccessStructure, Subset};
pub use audit::{audit, AuditReport};
pub use dist::{DistBuilder, JointDistribution, VarSet};
pub use error::{Error, Result};
pub use field::FieldSpec;
pub use scheme::Scheme;
