//! α-belief propagation on discrete pairwise factor graphs.
//!
//! The crate is organized around one inference engine and the tooling needed
//! to check and benchmark it:
//!
//! * [`graph`]: immutable pairwise MRFs over a shared finite alphabet.
//! * [`engine`]: α-BP message passing; α = 1 is standard sum-product BP.
//! * [`oracle`]: exact MAP and marginals by enumeration, plus α- and KL
//!   divergences on flat tables.
//! * [`models`]: seeded Ising and MIMO generators and their factor graphs.
//! * [`mmse`]: the linear MMSE detector and the prior tables it supplies.
//! * [`experiment`]: Monte-Carlo sweeps that emit CSV result tables.
//! * [`format`]: the JSON graph file format.
//!
//! ```
//! use alphabp::engine::{self, EngineConfig};
//! use alphabp::graph::{Alphabet, FactorGraph, PairwiseSpec};
//!
//! let graph = FactorGraph::new(
//!     Alphabet::binary(),
//!     vec![vec![1.0, 3.0], vec![1.0, 1.0]],
//!     vec![PairwiseSpec::new(0, 1, vec![vec![2.0, 1.0], vec![1.0, 2.0]])],
//! )?;
//! let (state, report) = engine::run(&graph, &EngineConfig::with_alpha(0.5), None)?;
//! assert!(report.converged);
//! assert_eq!(engine::map_decision(&state, &graph), vec![1, 1]);
//! # Ok::<(), alphabp::Error>(())
//! ```

pub mod engine;
pub mod error;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod mmse;
pub mod models;
pub mod numeric;
pub mod oracle;

pub use engine::{BeliefState, ConvergenceReport, EngineConfig, Schedule};
pub use error::{Error, Result};
pub use graph::{Alphabet, FactorGraph, PairwiseSpec};
