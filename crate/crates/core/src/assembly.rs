//! Objective, no-backflow rows, flux caps and box bounds stacked into one LP
//!
//! ```text
//! min  costᵀ g   s.t.  A g ≤ b,  lower ≤ g ≤ upper
//! ```
//!
//! where `cost = −c★` and `c★ = K_inᵀ(−1) + K_outᵀ(1)` is the gradient of the
//! net outward boundary flux.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::LpBuildError;
use crate::network::Network;
use crate::reduction::BoundarySpec;

/// Gradient `c★` of the net outward flux `J(g) = −ΣΦ_in(g) + ΣΦ_out(g)`.
pub fn build_objective(k_in: &DMatrix<f64>, k_out: &DMatrix<f64>) -> Result<DVector<f64>, LpBuildError> {
    if k_in.ncols() != k_out.ncols() {
        return Err(LpBuildError::DimensionMismatch {
            context: "objective blocks",
            expected: k_in.ncols(),
            found: k_out.ncols(),
        });
    }
    let n = k_in.ncols();
    Ok(DVector::from_fn(n, |j, _| k_out.column(j).sum() - k_in.column(j).sum()))
}

/// Which boundary rule produced a selector row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleOrigin {
    /// tail is an inflow node: q_e ≥ −ε
    InTail,
    /// head is an inflow node: q_e ≤ ε
    InHead,
    /// head is an outflow node: q_e ≥ −ε
    OutHead,
    /// tail is an outflow node: q_e ≤ ε
    OutTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignRow {
    pub edge: usize,
    pub sign: f64,
    pub origin: RuleOrigin,
}

/// Selector `S` with one ±1 entry per row; feasibility means `S q ≥ −ε`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignSelector {
    pub rows: Vec<SignRow>,
    pub n_edges: usize,
}

impl SignSelector {
    /// Rows in edge-id order; for each edge the tail rule precedes the head rule.
    pub fn build(net: &Network, bspec: &BoundarySpec) -> Self {
        let mut rows = Vec::new();
        for (edge, e) in net.edges().iter().enumerate() {
            if bspec.inflow.contains(&e.tail) {
                rows.push(SignRow { edge, sign: 1.0, origin: RuleOrigin::InTail });
            }
            if bspec.outflow.contains(&e.tail) {
                rows.push(SignRow { edge, sign: -1.0, origin: RuleOrigin::OutTail });
            }
            if bspec.inflow.contains(&e.head) {
                rows.push(SignRow { edge, sign: -1.0, origin: RuleOrigin::InHead });
            }
            if bspec.outflow.contains(&e.head) {
                rows.push(SignRow { edge, sign: 1.0, origin: RuleOrigin::OutHead });
            }
        }
        Self { rows, n_edges: net.n_edges() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.rows.len(), self.n_edges);
        for (i, r) in self.rows.iter().enumerate() {
            s[(i, r.edge)] = r.sign;
        }
        s
    }

    /// `S q`.
    pub fn apply(&self, q: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.rows.len(), self.rows.iter().map(|r| r.sign * q[r.edge]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSignRows {
    pub selector: SignSelector,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// No-backflow rows `A_edge g ≤ b_edge` with `A_edge = −S Qg`, `b_edge = S q0 + ε`.
pub fn edge_sign_rows(
    net: &Network,
    bspec: &BoundarySpec,
    q0: &DVector<f64>,
    qg: &DMatrix<f64>,
    eps: f64,
) -> Result<EdgeSignRows, LpBuildError> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(LpBuildError::InvalidSlack(eps));
    }
    check_len("flux offset", net.n_edges(), q0.len())?;
    check_len("flux map rows", net.n_edges(), qg.nrows())?;
    let selector = SignSelector::build(net, bspec);
    let n = qg.ncols();
    let mut a = DMatrix::zeros(selector.len(), n);
    let mut b = DVector::zeros(selector.len());
    for (i, r) in selector.rows.iter().enumerate() {
        for j in 0..n {
            a[(i, j)] = -r.sign * qg[(r.edge, j)];
        }
        b[i] = r.sign * q0[r.edge] + eps;
    }
    Ok(EdgeSignRows { selector, a, b })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxCaps {
    pub q_max: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// Two-sided caps `|q_e(g)| ≤ φ_max k_e` as `[Qg; −Qg] g ≤ [q_max − q0; q_max + q0]`.
pub fn flux_caps(
    qg: &DMatrix<f64>,
    q0: &DVector<f64>,
    phi_max: f64,
    k: &[f64],
) -> Result<FluxCaps, LpBuildError> {
    if !(phi_max > 0.0) {
        return Err(LpBuildError::InvalidPhiMax(phi_max));
    }
    check_len("flux offset", qg.nrows(), q0.len())?;
    check_len("conductivities", qg.nrows(), k.len())?;
    if let Some((edge, &value)) = k.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(LpBuildError::InvalidConductivity { edge, value });
    }
    let m = qg.nrows();
    let q_max = DVector::from_iterator(m, k.iter().map(|&ke| phi_max * ke));
    let mut a = DMatrix::zeros(2 * m, qg.ncols());
    a.rows_mut(0, m).copy_from(qg);
    a.rows_mut(m, m).copy_from(&(-qg));
    let mut b = DVector::zeros(2 * m);
    b.rows_mut(0, m).copy_from(&(&q_max - q0));
    b.rows_mut(m, m).copy_from(&(&q_max + q0));
    let caps = FluxCaps { q_max, a, b };
    check_structural(&caps.a, &caps.b, |i| if i < m { RowTag::CapUpper } else { RowTag::CapLower })?;
    Ok(caps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowTag {
    #[serde(rename = "cap+")]
    CapUpper,
    #[serde(rename = "cap-")]
    CapLower,
    #[serde(rename = "edge-sign")]
    EdgeSign,
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowTag::CapUpper => "cap+",
            RowTag::CapLower => "cap-",
            RowTag::EdgeSign => "edge-sign",
        })
    }
}

/// Per-variable box bounds; infinite entries mean "no bound".
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl Bounds {
    pub fn free(n: usize) -> Self {
        Self {
            lower: DVector::from_element(n, f64::NEG_INFINITY),
            upper: DVector::from_element(n, f64::INFINITY),
        }
    }

    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Self { lower: DVector::from_element(n, lower), upper: DVector::from_element(n, upper) }
    }

    pub fn all_finite(&self) -> bool {
        self.lower.iter().chain(self.upper.iter()).all(|v| v.is_finite())
    }
}

/// `min costᵀg  s.t.  A g ≤ b,  lower ≤ g ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub cost: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
    pub row_tags: Vec<RowTag>,
}

impl LpProblem {
    /// Checks shapes and bound consistency. Without explicit tags every row
    /// is tagged `EdgeSign`.
    pub fn new(
        cost: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        bounds: Option<Bounds>,
        row_tags: Option<Vec<RowTag>>,
    ) -> Result<Self, LpBuildError> {
        let n = cost.len();
        check_len("constraint columns", n, a.ncols())?;
        check_len("right-hand side", a.nrows(), b.len())?;
        let bounds = bounds.unwrap_or_else(|| Bounds::free(n));
        check_len("lower bounds", n, bounds.lower.len())?;
        check_len("upper bounds", n, bounds.upper.len())?;
        for var in 0..n {
            let (lower, upper) = (bounds.lower[var], bounds.upper[var]);
            if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
                return Err(LpBuildError::InvalidBounds { var, lower, upper });
            }
        }
        let row_tags = row_tags.unwrap_or_else(|| vec![RowTag::EdgeSign; a.nrows()]);
        check_len("row tags", a.nrows(), row_tags.len())?;
        Ok(Self { cost, a, b, lower: bounds.lower, upper: bounds.upper, row_tags })
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn n_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn objective(&self, g: &DVector<f64>) -> f64 {
        self.cost.dot(g)
    }

    pub fn count_tag(&self, tag: RowTag) -> usize {
        self.row_tags.iter().filter(|&&t| t == tag).count()
    }
}

/// Stacks `[A_cap; A_edge]` under the cost `−c★`.
pub fn assemble(
    c_star: &DVector<f64>,
    caps: &FluxCaps,
    edge: &EdgeSignRows,
    bounds: Option<Bounds>,
) -> Result<LpProblem, LpBuildError> {
    let n = c_star.len();
    check_len("cap columns", n, caps.a.ncols())?;
    check_len("edge-sign columns", n, edge.a.ncols())?;
    let m_cap = caps.a.nrows();
    let m_edge = edge.a.nrows();
    let mut a = DMatrix::zeros(m_cap + m_edge, n);
    a.rows_mut(0, m_cap).copy_from(&caps.a);
    a.rows_mut(m_cap, m_edge).copy_from(&edge.a);
    let mut b = DVector::zeros(m_cap + m_edge);
    b.rows_mut(0, m_cap).copy_from(&caps.b);
    b.rows_mut(m_cap, m_edge).copy_from(&edge.b);
    let half = m_cap / 2;
    let tags = (0..m_cap)
        .map(|i| if i < half { RowTag::CapUpper } else { RowTag::CapLower })
        .chain(std::iter::repeat_n(RowTag::EdgeSign, m_edge))
        .collect::<Vec<_>>();
    check_structural(&a, &b, |i| tags[i])?;
    LpProblem::new(-c_star, a, b, bounds, Some(tags))
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<(), LpBuildError> {
    if expected != found {
        return Err(LpBuildError::DimensionMismatch { context, expected, found });
    }
    Ok(())
}

/// Rejects rows with (numerically) no control dependence and negative rhs.
fn check_structural(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tag: impl Fn(usize) -> RowTag,
) -> Result<(), LpBuildError> {
    let scale = 1.0 + a.amax();
    for i in 0..a.nrows() {
        let row_max = a.row(i).amax();
        let rhs_tol = 1e-9 * (1.0 + b[i].abs());
        if row_max <= 1e-12 * scale && b[i] < -rhs_tol {
            return Err(LpBuildError::StructurallyInfeasible { row: i, tag: tag(i), rhs: b[i] });
        }
    }
    Ok(())
}
