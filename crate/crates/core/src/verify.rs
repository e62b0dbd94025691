//! State recovery and the validation metrics for a solved control.

use std::fmt;

use nalgebra::DVector;
use serde::Serialize;

use crate::assembly::SignSelector;
use crate::error::ReductionError;
use crate::network::{ComponentLabeling, Network};
use crate::reduction::{evaluate_state, AffineMaps, BoundarySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct StateSolution {
    pub g_opt: DVector<f64>,
    pub u: DVector<f64>,
    pub q: DVector<f64>,
    pub phi: DVector<f64>,
}

pub fn recover_state(maps: &AffineMaps, g: &DVector<f64>) -> Result<StateSolution, ReductionError> {
    let s = evaluate_state(maps, g)?;
    Ok(StateSolution { g_opt: g.clone(), u: s.u, q: s.q, phi: s.phi })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeMetrics {
    pub edge: usize,
    pub flux: f64,
    /// `|q_e|`
    pub intensity: f64,
    /// `|q_e| · A_e`
    pub throughput: f64,
}

/// Sign and conservation checks for a recovered state.
///
/// Maxima and minima over empty node sets are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub max_phi_in: Option<f64>,
    pub min_phi_out: Option<f64>,
    /// `max(−(S q) − ε)`, signed; negative means every rule holds with margin.
    pub max_edge_sign_violation_raw: Option<f64>,
    /// Positive part of the raw value.
    pub max_edge_sign_violation: f64,
    /// Selector rows whose violation exceeds zero.
    pub edge_sign_violators: Vec<usize>,
    pub global_conservation: f64,
    pub max_interior_abs_phi: f64,
    pub amount_in: f64,
    pub amount_out: f64,
    pub in_out_mismatch: f64,
    pub max_component_balance: f64,
    pub component_balances: Vec<f64>,
    pub per_edge: Vec<EdgeMetrics>,
}

/// Computes the nine table metrics plus per-component and per-edge data.
pub fn diagnostics(
    net: &Network,
    bspec: &BoundarySpec,
    comps: &ComponentLabeling,
    sol: &StateSolution,
    selector: &SignSelector,
    eps: f64,
) -> DiagnosticsReport {
    let phi = &sol.phi;
    let max_phi_in = bspec.inflow.iter().map(|&v| phi[v]).reduce(f64::max);
    let min_phi_out = bspec.outflow.iter().map(|&v| phi[v]).reduce(f64::min);

    let sq = selector.apply(&sol.q);
    let raw: Vec<f64> = sq.iter().map(|&s| -s - eps).collect();
    let max_edge_sign_violation_raw = raw.iter().copied().reduce(f64::max);
    let edge_sign_violators = raw.iter().enumerate().filter(|(_, &r)| r > 0.0).map(|(i, _)| i).collect();

    let interior = (0..net.n_nodes()).filter(|&v| !bspec.is_boundary(v) && !bspec.fixed.contains_key(&v));
    let max_interior_abs_phi = interior.map(|v| phi[v].abs()).fold(0.0, f64::max);

    let amount_in = -bspec.inflow.iter().map(|&v| phi[v]).sum::<f64>();
    let amount_out = bspec.outflow.iter().map(|&v| phi[v]).sum::<f64>();

    let mut component_balances = vec![0.0; comps.count()];
    for (v, &p) in phi.iter().enumerate() {
        component_balances[comps.label(v)] += p;
    }
    let max_component_balance = component_balances.iter().fold(0.0, |m: f64, b| m.max(b.abs()));

    let per_edge = net
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| EdgeMetrics {
            edge: i,
            flux: sol.q[i],
            intensity: sol.q[i].abs(),
            throughput: sol.q[i].abs() * e.area(),
        })
        .collect();

    DiagnosticsReport {
        max_phi_in,
        min_phi_out,
        max_edge_sign_violation: max_edge_sign_violation_raw.unwrap_or(0.0).max(0.0),
        max_edge_sign_violation_raw,
        edge_sign_violators,
        global_conservation: phi.sum(),
        max_interior_abs_phi,
        amount_in,
        amount_out,
        in_out_mismatch: amount_in - amount_out,
        max_component_balance,
        component_balances,
        per_edge,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"))
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("max(Φ_in) (should ≤ 0)", opt(self.max_phi_in)),
            ("min(Φ_out) (should ≥ 0)", opt(self.min_phi_out)),
            ("Max boundary–edge sign violation (should ≤ 0)", opt(self.max_edge_sign_violation_raw)),
            ("Global conservation Σ_v Φ_v (should ≈ 0)", format!("{:.6e}", self.global_conservation)),
            ("max_{v∈V_int} |Φ_v|", format!("{:.6e}", self.max_interior_abs_phi)),
            ("Amount entering at V_in", format!("{:.6e}", self.amount_in)),
            ("Amount leaving at V_out", format!("{:.6e}", self.amount_out)),
            ("In–out mismatch (should ≈ 0)", format!("{:.6e}", self.in_out_mismatch)),
            ("max_component |Σ_{v∈comp} Φ_v|", format!("{:.6e}", self.max_component_balance)),
        ];
        writeln!(f, "{:<48} {:>16}", "Quantity", "Value")?;
        for (label, value) in rows {
            writeln!(f, "{label:<48} {value:>16}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{connected_components, Edge};
    use nalgebra::DMatrix;

    #[test]
    fn null_flow_has_zero_metrics() {
        let net = Network::unplaced(3, vec![Edge::new(0, 1, 1.0, 1.0), Edge::new(1, 2, 1.0, 1.0)]).unwrap();
        let bspec = BoundarySpec::new([0], [2], []);
        let sol = StateSolution {
            g_opt: DVector::zeros(0),
            u: DVector::from_element(3, 4.0),
            q: DVector::zeros(2),
            phi: DVector::zeros(3),
        };
        let sel = SignSelector::build(&net, &bspec);
        let r = diagnostics(&net, &bspec, &connected_components(&net), &sol, &sel, 0.0);
        assert_eq!(r.max_phi_in, Some(0.0));
        assert_eq!(r.min_phi_out, Some(0.0));
        assert_eq!(r.max_edge_sign_violation, 0.0);
        assert_eq!((r.amount_in, r.amount_out, r.in_out_mismatch), (0.0, 0.0, 0.0));
        assert!(r.edge_sign_violators.is_empty());
    }

    #[test]
    fn violators_are_listed() {
        let net = Network::unplaced(2, vec![Edge::new(0, 1, 1.0, 1.0)]).unwrap();
        let bspec = BoundarySpec::new([0], [1], []);
        let sol = StateSolution {
            g_opt: DVector::zeros(0),
            u: DVector::zeros(2),
            q: DVector::from_element(1, -0.25),
            phi: DVector::from_vec(vec![0.25, -0.25]),
        };
        let sel = SignSelector::build(&net, &bspec);
        let r = diagnostics(&net, &bspec, &connected_components(&net), &sol, &sel, 0.0);
        assert_eq!(r.edge_sign_violators, vec![0, 1]);
        assert_eq!(r.max_edge_sign_violation, 0.25);
        assert_eq!(r.max_phi_in, Some(0.25));
    }

    #[test]
    fn recover_checks_length() {
        let maps = AffineMaps {
            u0: DVector::zeros(1),
            ug: DMatrix::zeros(1, 0),
            q0: DVector::zeros(0),
            qg: DMatrix::zeros(0, 0),
            phi0: DVector::zeros(1),
            pg: DMatrix::zeros(1, 0),
            inflow: vec![],
            outflow: vec![],
            k_in: DMatrix::zeros(0, 0),
            k_out: DMatrix::zeros(0, 0),
            phi0_in: DVector::zeros(0),
            phi0_out: DVector::zeros(0),
        };
        assert!(recover_state(&maps, &DVector::zeros(1)).is_err());
    }
}
