//! End-to-end driver: operators → partition → affine maps → LP → solve →
//! recover → verify.

use std::collections::BTreeMap;

use nalgebra::DVector;
use thiserror::Error;

use crate::assembly::{
    assemble, build_objective, edge_sign_rows, flux_caps, Bounds, EdgeSignRows, FluxCaps, LpProblem,
};
use crate::error::{LpBuildError, LpError, ReductionError};
use crate::lp::{boundedness_report, solve_lp_with, BoundednessDiagnosis, LpSolution, LpStatus, SolverOptions};
use crate::network::{
    build_conductance, build_incidence, build_laplacian, connected_components, ComponentLabeling, Network,
};
use crate::reduction::{build_affine_maps, partition_nodes, AffineMaps, BoundarySpec, Partition};
use crate::sparse::SparseMatrix;
use crate::verify::{diagnostics, recover_state, DiagnosticsReport, StateSolution};

pub const DEFAULT_GAUGE_VALUE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugePolicy {
    /// Components without a Dirichlet node are an error.
    Error,
    /// Components without a fixed node get their lowest-id boundary node (or
    /// lowest-id node, if none is on the boundary) fixed at `value`.
    AutoFix { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum BoxBounds {
    #[default]
    None,
    Global { lower: f64, upper: f64 },
    /// Bounds keyed by node index; controls not listed are free.
    PerNode(BTreeMap<usize, (f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub phi_max: f64,
    pub eps: f64,
    /// Fixed potentials by node index; override values from the network file.
    pub fixes: BTreeMap<usize, f64>,
    pub bounds: BoxBounds,
    pub gauge: GaugePolicy,
    pub solver: SolverOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            phi_max: 1.0,
            eps: 0.0,
            fixes: BTreeMap::new(),
            bounds: BoxBounds::None,
            gauge: GaugePolicy::AutoFix { value: DEFAULT_GAUGE_VALUE },
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("connected component {component} has no Dirichlet node; fix a node or use the auto gauge")]
    Unanchored { component: usize },
    #[error("the control problem is infeasible")]
    Infeasible,
    #[error("the control problem is unbounded along ray {ray:?}")]
    Unbounded { ray: Vec<f64> },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Reduction(ReductionError),
    #[error(transparent)]
    Build(#[from] LpBuildError),
    #[error(transparent)]
    Solver(#[from] LpError),
}

impl From<ReductionError> for PipelineError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::UnanchoredComponent { component } => PipelineError::Unanchored { component },
            other => PipelineError::Reduction(other),
        }
    }
}

impl PipelineError {
    /// Process exit code: 2 infeasible, 3 unbounded, 4 input/config, 5
    /// unanchored, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Infeasible | PipelineError::Build(LpBuildError::StructurallyInfeasible { .. }) => 2,
            PipelineError::Unbounded { .. } => 3,
            PipelineError::Unanchored { .. } => 5,
            PipelineError::Config(_) | PipelineError::Build(_) => 4,
            PipelineError::Reduction(ReductionError::UnknownNode { .. })
            | PipelineError::Reduction(ReductionError::InflowOutflowOverlap { .. })
            | PipelineError::Reduction(ReductionError::NonFiniteFixedValue { .. }) => 4,
            PipelineError::Reduction(_) | PipelineError::Solver(_) => 1,
        }
    }
}

/// Everything built before the solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    /// Boundary after config fixes and gauge fixing.
    pub boundary: BoundarySpec,
    /// Nodes fixed by the gauge policy, one per affected component.
    pub gauge_fixed: Vec<usize>,
    pub components: ComponentLabeling,
    pub incidence: SparseMatrix,
    pub conductance: SparseMatrix,
    pub laplacian: SparseMatrix,
    pub partition: Partition,
    pub maps: AffineMaps,
    pub c_star: DVector<f64>,
    pub caps: FluxCaps,
    pub edge_rows: EdgeSignRows,
    pub lp: LpProblem,
}

/// Outputs of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub prepared: Prepared,
    pub boundedness: BoundednessDiagnosis,
    pub solution: LpSolution,
    pub state: StateSolution,
    pub report: DiagnosticsReport,
}

fn apply_gauge(
    net: &Network,
    bspec: &mut BoundarySpec,
    comps: &ComponentLabeling,
    gauge: GaugePolicy,
) -> Vec<usize> {
    let GaugePolicy::AutoFix { value } = gauge else {
        return Vec::new();
    };
    let mut fixed = Vec::new();
    for members in comps.members() {
        if members.iter().any(|v| bspec.fixed.contains_key(v)) {
            continue;
        }
        let pick = members.iter().copied().find(|&v| bspec.is_boundary(v)).unwrap_or(members[0]);
        bspec.fixed.insert(pick, value);
        fixed.push(pick);
    }
    debug_assert!(fixed.iter().all(|&v| v < net.n_nodes()));
    fixed
}

fn control_bounds(bounds: &BoxBounds, ctrl: &[usize]) -> Result<Option<Bounds>, PipelineError> {
    let n = ctrl.len();
    match bounds {
        BoxBounds::None => Ok(None),
        BoxBounds::Global { lower, upper } => Ok(Some(Bounds::uniform(n, *lower, *upper))),
        BoxBounds::PerNode(map) => {
            let mut b = Bounds::free(n);
            for (&node, &(lo, hi)) in map {
                let j = ctrl
                    .iter()
                    .position(|&v| v == node)
                    .ok_or_else(|| PipelineError::Config(format!("bounds given for node {node}, which is not a control")))?;
                b.lower[j] = lo;
                b.upper[j] = hi;
            }
            Ok(Some(b))
        }
    }
}

/// Builds operators, applies the gauge policy, eliminates the interior and
/// assembles the control LP.
pub fn prepare(config: &RunConfig, net: &Network, bspec: &BoundarySpec) -> Result<Prepared, PipelineError> {
    let mut boundary = bspec.clone();
    boundary.fixed.extend(config.fixes.iter().map(|(&v, &x)| (v, x)));
    boundary.validate(net)?;

    let incidence = build_incidence(net);
    let conductance = build_conductance(net);
    let laplacian = build_laplacian(&incidence, &conductance).map_err(ReductionError::from)?;
    let components = connected_components(net);
    let gauge_fixed = apply_gauge(net, &mut boundary, &components, config.gauge);

    let partition = partition_nodes(net, &boundary, &components)?;
    let maps = build_affine_maps(&laplacian, &incidence, &conductance, &partition, &boundary, &boundary.fixed_values())?;

    let c_star = build_objective(&maps.k_in, &maps.k_out)?;
    let caps = flux_caps(&maps.qg, &maps.q0, config.phi_max, &net.conductivities())?;
    let edge_rows = edge_sign_rows(net, &boundary, &maps.q0, &maps.qg, config.eps)?;
    let bounds = control_bounds(&config.bounds, &partition.ctrl)?;
    let lp = assemble(&c_star, &caps, &edge_rows, bounds)?;
    Ok(Prepared {
        boundary,
        gauge_fixed,
        components,
        incidence,
        conductance,
        laplacian,
        partition,
        maps,
        c_star,
        caps,
        edge_rows,
        lp,
    })
}

/// Runs the full pipeline. Infeasible and unbounded problems are errors; the
/// unbounded error carries the descent ray.
pub fn run_pipeline(config: &RunConfig, net: &Network, bspec: &BoundarySpec) -> Result<PipelineRun, PipelineError> {
    let prepared = prepare(config, net, bspec)?;
    let boundedness = boundedness_report(&prepared.lp, &prepared.maps.qg, &prepared.maps.q0, &prepared.caps.q_max);
    let solution = solve_lp_with(&prepared.lp, &config.solver)?;
    let g = match solution.status {
        LpStatus::Optimal => solution.g_opt.clone().expect("optimal solutions carry a point"),
        LpStatus::Infeasible => return Err(PipelineError::Infeasible),
        LpStatus::Unbounded => {
            let ray = solution.ray.as_ref().map(|r| r.iter().copied().collect()).unwrap_or_default();
            return Err(PipelineError::Unbounded { ray });
        }
    };
    let state = recover_state(&prepared.maps, &g)?;
    let report = diagnostics(
        net,
        &prepared.boundary,
        &prepared.components,
        &state,
        &prepared.edge_rows.selector,
        config.eps,
    );
    Ok(PipelineRun { prepared, boundedness, solution, state, report })
}
