//! Constant-factor approximation of generalized and fractional hypertree
//! width for hypergraphs of bounded rank, together with the exact
//! desk-scale oracles used to check every guarantee.

pub mod approx;
pub mod cover;
pub mod decomposition;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod oracle;
pub mod ratlp;
pub mod separators;
pub mod vertex_set;

pub use approx::{ApproxOutcome, Mode, RunStats};
pub use cover::{Certificate, CoverCertificate, CoverMeasure, FractionalWeights};
pub use decomposition::{TreeDecomposition, ValidationReport, Violation};
pub use error::{Error, Result};
pub use oracle::OracleBudget;
pub use hypergraph::{ContractionSpec, Contracted, Edge, Hypergraph, Preimage};
pub use ratlp::Rational;
pub use separators::SeparatorResult;
pub use vertex_set::VertexSet;
