//! Interior elimination: from boundary controls to the full steady state.
//!
//! Nodes split into fixed (prescribed potential), controlled (free boundary
//! potentials, the decision vector `g`) and interior. Solving the interior
//! block `L_ii u_i = −L_{i,fix} u_fix − L_{i,ctrl} g` gives affine maps
//!
//! ```text
//! u(g) = u0 + Ug g,   q(g) = q0 + Qg g,   Φ(g) = Φ0 + Pg g
//! ```
//!
//! with `q = −C B u` and `Φ = Bᵀ q`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::cholesky::SkylineCholesky;
use crate::error::ReductionError;
use crate::network::{ComponentLabeling, Network};
use crate::sparse::SparseMatrix;

/// Inflow, outflow and fixed-potential node sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundarySpec {
    pub inflow: BTreeSet<usize>,
    pub outflow: BTreeSet<usize>,
    pub fixed: BTreeMap<usize, f64>,
}

impl BoundarySpec {
    pub fn new(
        inflow: impl IntoIterator<Item = usize>,
        outflow: impl IntoIterator<Item = usize>,
        fixed: impl IntoIterator<Item = (usize, f64)>,
    ) -> Self {
        Self {
            inflow: inflow.into_iter().collect(),
            outflow: outflow.into_iter().collect(),
            fixed: fixed.into_iter().collect(),
        }
    }

    pub fn validate(&self, net: &Network) -> Result<(), ReductionError> {
        let n = net.n_nodes();
        let all = self.inflow.iter().chain(&self.outflow).chain(self.fixed.keys());
        if let Some(&node) = all.clone().find(|&&v| v >= n) {
            return Err(ReductionError::UnknownNode { node, n_nodes: n });
        }
        if let Some(&node) = self.inflow.intersection(&self.outflow).next() {
            return Err(ReductionError::InflowOutflowOverlap { node });
        }
        if let Some((&node, _)) = self.fixed.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ReductionError::NonFiniteFixedValue { node });
        }
        Ok(())
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.inflow.contains(&v) || self.outflow.contains(&v)
    }

    /// Fixed values in ascending node order, matching [`Partition::fix`].
    pub fn fixed_values(&self) -> DVector<f64> {
        DVector::from_iterator(self.fixed.len(), self.fixed.values().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Fixed,
    Control,
    Interior,
}

/// Disjoint fixed / control / interior node lists with their embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub fix: Vec<usize>,
    pub ctrl: Vec<usize>,
    pub interior: Vec<usize>,
    pub e_fix: SparseMatrix,
    pub e_ctrl: SparseMatrix,
    pub e_int: SparseMatrix,
    roles: Vec<NodeRole>,
}

impl Partition {
    pub fn role(&self, v: usize) -> NodeRole {
        self.roles[v]
    }

    pub fn n_ctrl(&self) -> usize {
        self.ctrl.len()
    }
}

/// Splits nodes into fixed, control and interior sets.
///
/// Controls are `(inflow ∪ outflow) \ fixed`, ascending. Fixed nodes may be
/// any node, including ones that would otherwise be interior. Every connected
/// component must contain at least one fixed or control node.
pub fn partition_nodes(
    net: &Network,
    bspec: &BoundarySpec,
    comps: &ComponentLabeling,
) -> Result<Partition, ReductionError> {
    bspec.validate(net)?;
    let n = net.n_nodes();
    let mut roles = vec![NodeRole::Interior; n];
    for &v in bspec.inflow.iter().chain(&bspec.outflow) {
        roles[v] = NodeRole::Control;
    }
    for &v in bspec.fixed.keys() {
        roles[v] = NodeRole::Fixed;
    }

    let mut anchored = vec![false; comps.count()];
    for (v, role) in roles.iter().enumerate() {
        if *role != NodeRole::Interior {
            anchored[comps.label(v)] = true;
        }
    }
    if let Some(component) = anchored.iter().position(|a| !a) {
        return Err(ReductionError::UnanchoredComponent { component });
    }

    let pick = |want: NodeRole| -> Vec<usize> { (0..n).filter(|&v| roles[v] == want).collect() };
    let fix = pick(NodeRole::Fixed);
    let ctrl = pick(NodeRole::Control);
    let interior = pick(NodeRole::Interior);
    Ok(Partition {
        e_fix: SparseMatrix::embedding(n, &fix)?,
        e_ctrl: SparseMatrix::embedding(n, &ctrl)?,
        e_int: SparseMatrix::embedding(n, &interior)?,
        fix,
        ctrl,
        interior,
        roles,
    })
}

/// Solves `L_ii X = RHS` column by column with a sparse Cholesky factor.
///
/// Fails with [`ReductionError::NotSpd`] when factorization meets a
/// non-positive pivot, and with [`ReductionError::Residual`] when the
/// max-norm residual exceeds `1e-10 · (1 + ‖RHS‖_max)`.
pub fn spd_solve(l_ii: &SparseMatrix, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>, ReductionError> {
    assert_eq!(l_ii.rows(), rhs.nrows(), "right-hand side height must match the block");
    let factor = SkylineCholesky::factor(l_ii)
        .map_err(|e| ReductionError::NotSpd { node: e.row, pivot: e.pivot })?;
    let mut x = DMatrix::zeros(rhs.nrows(), rhs.ncols());
    for j in 0..rhs.ncols() {
        let col = factor.solve(&rhs.column(j).clone_owned());
        x.set_column(j, &col);
    }
    let residual = (l_ii.mul_dense(&x)? - rhs).amax();
    let limit = 1e-10 * (1.0 + rhs.amax());
    if !(residual <= limit) {
        return Err(ReductionError::Residual { residual, limit });
    }
    Ok(x)
}

/// Offset/matrix pairs mapping the control vector to potentials, fluxes and
/// nodal balances, plus their inflow/outflow row restrictions.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMaps {
    pub u0: DVector<f64>,
    pub ug: DMatrix<f64>,
    pub q0: DVector<f64>,
    pub qg: DMatrix<f64>,
    pub phi0: DVector<f64>,
    pub pg: DMatrix<f64>,
    pub inflow: Vec<usize>,
    pub outflow: Vec<usize>,
    pub k_in: DMatrix<f64>,
    pub k_out: DMatrix<f64>,
    pub phi0_in: DVector<f64>,
    pub phi0_out: DVector<f64>,
}

/// Potentials, fluxes and balances for one control vector.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: DVector<f64>,
    pub q: DVector<f64>,
    pub phi: DVector<f64>,
}

impl AffineMaps {
    pub fn n_ctrl(&self) -> usize {
        self.ug.ncols()
    }

    /// Constant part of the net outward flux `−ΣΦ_in + ΣΦ_out` at `g = 0`.
    pub fn outward_flux_offset(&self) -> f64 {
        self.phi0_out.sum() - self.phi0_in.sum()
    }
}

fn rows_of(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Eliminates interior unknowns and returns the affine control-to-state maps.
///
/// `bspec` supplies the inflow/outflow row sets for `K_in`/`K_out`; `u_fix`
/// lists fixed potentials in `part.fix` order.
pub fn build_affine_maps(
    laplacian: &SparseMatrix,
    incidence: &SparseMatrix,
    conductance: &SparseMatrix,
    part: &Partition,
    bspec: &BoundarySpec,
    u_fix: &DVector<f64>,
) -> Result<AffineMaps, ReductionError> {
    if u_fix.len() != part.fix.len() {
        return Err(crate::error::AssemblyError::DimensionMismatch {
            context: "fixed potentials",
            expected: part.fix.len(),
            found: u_fix.len(),
        }
        .into());
    }
    let l_ii = laplacian.submatrix(&part.interior, &part.interior);
    let l_ifix = laplacian.submatrix(&part.interior, &part.fix);
    let l_ictrl = laplacian.submatrix(&part.interior, &part.ctrl);

    let n_int = part.interior.len();
    let n_ctrl = part.ctrl.len();
    // one multi-RHS solve: column 0 is the fixed-data part, the rest are controls
    let mut rhs = DMatrix::zeros(n_int, 1 + n_ctrl);
    rhs.set_column(0, &(-l_ifix.mul_vec(u_fix)?));
    rhs.view_mut((0, 1), (n_int, n_ctrl)).copy_from(&(-l_ictrl.to_dense()));
    let sol = spd_solve(&l_ii, &rhs)?;
    let a0 = sol.column(0).clone_owned();
    let a1 = sol.columns(1, n_ctrl).clone_owned();

    let u0 = part.e_int.mul_vec(&a0)? + part.e_fix.mul_vec(u_fix)?;
    let ug = part.e_int.mul_dense(&a1)? + part.e_ctrl.to_dense();

    let cb = conductance.mul(incidence)?;
    let q0 = -cb.mul_vec(&u0)?;
    let qg = -cb.mul_dense(&ug)?;
    let bt = incidence.transpose();
    let phi0 = bt.mul_vec(&q0)?;
    let pg = bt.mul_dense(&qg)?;

    let inflow: Vec<usize> = bspec.inflow.iter().copied().collect();
    let outflow: Vec<usize> = bspec.outflow.iter().copied().collect();
    let k_in = rows_of(&pg, &inflow);
    let k_out = rows_of(&pg, &outflow);
    let phi0_in = DVector::from_iterator(inflow.len(), inflow.iter().map(|&v| phi0[v]));
    let phi0_out = DVector::from_iterator(outflow.len(), outflow.iter().map(|&v| phi0[v]));
    Ok(AffineMaps { u0, ug, q0, qg, phi0, pg, inflow, outflow, k_in, k_out, phi0_in, phi0_out })
}

/// Evaluates `(u, q, Φ)` at a control vector.
pub fn evaluate_state(maps: &AffineMaps, g: &DVector<f64>) -> Result<State, ReductionError> {
    if g.len() != maps.n_ctrl() {
        return Err(ReductionError::ControlLength { expected: maps.n_ctrl(), found: g.len() });
    }
    Ok(State {
        u: &maps.u0 + &maps.ug * g,
        q: &maps.q0 + &maps.qg * g,
        phi: &maps.phi0 + &maps.pg * g,
    })
}
