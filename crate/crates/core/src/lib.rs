//! Steady-state flux on networks with mixed boundary conditions.
//!
//! A network carries a potential `u` on nodes and a flux `q_e = −c_e (u_head − u_tail)`
//! on edges. Given inflow, outflow and fixed-potential nodes, the free boundary
//! potentials `g` are chosen to maximize the net outward flux subject to
//! per-edge capacity caps and no-backflow rules at the boundary. The crate
//! provides the operators, the interior elimination into affine maps of `g`,
//! the LP assembly, a simplex solver with a vertex-enumeration oracle, and
//! validation diagnostics.
// NaN must fail positivity checks, so `!(x > 0.0)` is deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cholesky;
pub mod error;
pub mod io;
pub mod lp;
pub mod network;
pub mod pipeline;
pub mod reduction;
pub mod sparse;
pub mod verify;

pub use assembly::{Bounds, LpProblem};
pub use error::{AssemblyError, LpBuildError, LpError, NetworkError, ReductionError};
pub use lp::{solve_lp, LpSolution, LpStatus};
pub use network::{Edge, Network, Node};
pub use pipeline::{run_pipeline, GaugePolicy, PipelineError, PipelineRun, RunConfig};
pub use reduction::BoundarySpec;
