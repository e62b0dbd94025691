use thiserror::Error;

use crate::assembly::RowTag;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssemblyError {
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("conductance matrix must be square diagonal")]
    NotDiagonal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("edge {edge} references node {node}, but the network has {n_nodes} nodes")]
    DanglingNode { edge: usize, node: usize, n_nodes: usize },
    #[error("edge {edge} is a self-loop at node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("edge {edge} has non-positive length {value}")]
    NonPositiveLength { edge: usize, value: f64 },
    #[error("edge {edge} has non-positive conductivity {value}")]
    NonPositiveConductivity { edge: usize, value: f64 },
    #[error("edge {edge} has non-positive area {value}")]
    NonPositiveArea { edge: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("boundary node {node} does not exist (network has {n_nodes} nodes)")]
    UnknownNode { node: usize, n_nodes: usize },
    #[error("node {node} is listed as both inflow and outflow")]
    InflowOutflowOverlap { node: usize },
    #[error("fixed potential at node {node} is not finite")]
    NonFiniteFixedValue { node: usize },
    #[error("connected component {component} has no Dirichlet node; its potential is undetermined")]
    UnanchoredComponent { component: usize },
    #[error("interior block is not positive definite (pivot {pivot:e} at node {node})")]
    NotSpd { node: usize, pivot: f64 },
    #[error("interior solve residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },
    #[error("control vector has length {found}, expected {expected}")]
    ControlLength { expected: usize, found: usize },
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpBuildError {
    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("slack eps must be finite and >= 0, got {0}")]
    InvalidSlack(f64),
    #[error("phi_max must be > 0, got {0}")]
    InvalidPhiMax(f64),
    #[error("edge {edge} has non-positive conductivity {value}")]
    InvalidConductivity { edge: usize, value: f64 },
    #[error("bounds of variable {var} are inconsistent: [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("row {row} ({tag}) has no control dependence and right-hand side {rhs:e} < 0")]
    StructurallyInfeasible { row: usize, tag: RowTag, rhs: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex did not terminate within {iterations} pivots")]
    IterationLimit { iterations: usize },
    #[error("vertex enumeration guard exceeded: {variables} variables, {constraints} constraints")]
    EnumerationGuard { variables: usize, constraints: usize },
    #[error("point has length {found}, expected {expected}")]
    PointLength { expected: usize, found: usize },
}
