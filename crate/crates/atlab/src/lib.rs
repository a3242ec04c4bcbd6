//! Ashkin-Teller model on finite boxes of Z^d.
//!
//! The crate covers the spin model, its graphical representation (GAT),
//! the coupling of the two representations (ATRC), the eight- and six-vertex
//! spin models in the plane and the six-vertex height function. Small regions
//! are handled by exhaustive enumeration in [`oracle`]; larger ones by the
//! heat-bath chains in [`sampler`].

pub mod contour;
pub mod curve;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod sampler;
pub mod spin;
pub mod stats;
pub mod unionfind;
pub mod vertex;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{DualGeometry, EdgeConfig, Region};
pub use spin::{BoundaryCondition, Sign, SpinPair, VariableChange};
pub use weights::{CouplingConstants, WeightSet};
