//! Exact computations in spaces of Jacobi diagrams.

pub mod cache;
pub mod diagram;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod maps;
pub mod quotient;
pub mod relations;
pub mod run;
pub mod vector;

pub use diagram::{canonicalize, Canonical, CanonicalDiagram, Diagram, Leg, Skeleton};
pub use error::{Error, Result};
pub use quotient::{ContextSpec, Mode, QuotientContext, Status};
pub use relations::{RelationKind, RelationSet};
pub use vector::{Coeff, DiagramVector};
