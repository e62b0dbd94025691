//! CSV, GeoJSON and report exports for a solved run.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::lp::{BoundednessDiagnosis, LpStatus};
use crate::network::Network;
use crate::pipeline::{GaugePolicy, PipelineRun, RunConfig};
use crate::reduction::BoundarySpec;
use crate::verify::{DiagnosticsReport, StateSolution};

pub const UNITS_NOTE: &str = "Potentials, fluxes and balances are unit-free reals in the units of the input data; \
phi_max is a flux-per-width cap (e.g. persons per metre per second).";

/// Names the files written by [`export_results`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExportPaths {
    pub edges_csv: PathBuf,
    pub nodes_csv: PathBuf,
    pub geojson: PathBuf,
    pub report_json: PathBuf,
    pub report_txt: PathBuf,
}

impl ExportPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let d = dir.as_ref();
        Self {
            edges_csv: d.join("edges.csv"),
            nodes_csv: d.join("nodes.csv"),
            geojson: d.join("network.geojson"),
            report_json: d.join("report.json"),
            report_txt: d.join("report.txt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportSummary {
    pub written: Vec<PathBuf>,
    /// Set when GeoJSON was skipped because nodes lack positions.
    pub notice: Option<String>,
}

/// Reals are written with 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn node_id(ids: Option<&[String]>, v: usize) -> String {
    ids.map_or_else(|| v.to_string(), |ids| ids[v].clone())
}

pub fn node_role(bspec: &BoundarySpec, v: usize) -> &'static str {
    if bspec.inflow.contains(&v) {
        "in"
    } else if bspec.outflow.contains(&v) {
        "out"
    } else if bspec.fixed.contains_key(&v) {
        "fixed"
    } else {
        "interior"
    }
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// `edge_id, tail, head, q_signed, flux_intensity, throughput, cap_utilization`
pub fn write_edges_csv<W: Write>(
    out: W,
    net: &Network,
    ids: Option<&[String]>,
    q: &[f64],
    phi_max: f64,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "tail", "head", "q_signed", "flux_intensity", "throughput", "cap_utilization"])
        .map_err(csv_error)?;
    for (i, e) in net.edges().iter().enumerate() {
        let mag = q[i].abs();
        w.write_record([
            i.to_string(),
            node_id(ids, e.tail),
            node_id(ids, e.head),
            real(q[i]),
            real(mag),
            real(mag * e.area()),
            real(mag / (phi_max * e.conductivity)),
        ])
        .map_err(csv_error)?;
    }
    w.flush()
}

/// `node_id, u, Phi, role`
pub fn write_nodes_csv<W: Write>(
    out: W,
    bspec: &BoundarySpec,
    ids: Option<&[String]>,
    state: &StateSolution,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "u", "Phi", "role"]).map_err(csv_error)?;
    for v in 0..state.u.len() {
        w.write_record([node_id(ids, v), real(state.u[v]), real(state.phi[v]), node_role(bspec, v).to_string()])
            .map_err(csv_error)?;
    }
    w.flush()
}

/// LineString feature collection, or `None` when any node lacks a position.
pub fn geojson(net: &Network, ids: Option<&[String]>, q: &[f64], phi_max: f64) -> Option<serde_json::Value> {
    if !net.has_positions() {
        return None;
    }
    let features: Vec<_> = net
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let a = net.nodes()[e.tail].position.expect("checked above");
            let b = net.nodes()[e.head].position.expect("checked above");
            let mag = q[i].abs();
            json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [a, b]},
                "properties": {
                    "edge_id": i,
                    "tail": node_id(ids, e.tail),
                    "head": node_id(ids, e.head),
                    "q_signed": q[i],
                    "flux_intensity": mag,
                    "throughput": mag * e.area(),
                    "cap_utilization": mag / (phi_max * e.conductivity),
                }
            })
        })
        .collect();
    Some(json!({"type": "FeatureCollection", "features": features}))
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlValue {
    pub node: String,
    pub g: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub units: &'static str,
    pub phi_max: f64,
    pub eps: f64,
    pub gauge: &'static str,
    pub gauge_fixed: Vec<String>,
    pub nodes: usize,
    pub edges: usize,
    pub components: usize,
    pub status: LpStatus,
    /// LP objective `−c★ᵀ g`.
    pub objective: f64,
    /// `ΣΦ_out − ΣΦ_in` at the returned controls; unlike `objective` it
    /// does not depend on the gauge value.
    pub net_outward_flux: f64,
    pub iterations: usize,
    pub controls: Vec<ControlValue>,
    pub boundedness: BoundednessDiagnosis,
    pub diagnostics: DiagnosticsReport,
}

impl RunReport {
    pub fn new(run: &PipelineRun, config: &RunConfig, net: &Network, ids: Option<&[String]>) -> Self {
        let p = &run.prepared;
        Self {
            units: UNITS_NOTE,
            phi_max: config.phi_max,
            eps: config.eps,
            gauge: match config.gauge {
                GaugePolicy::Error => "error",
                GaugePolicy::AutoFix { .. } => "auto",
            },
            gauge_fixed: p.gauge_fixed.iter().map(|&v| node_id(ids, v)).collect(),
            nodes: net.n_nodes(),
            edges: net.n_edges(),
            components: p.components.count(),
            status: run.solution.status,
            objective: run.solution.objective,
            net_outward_flux: p.maps.outward_flux_offset() - run.solution.objective,
            iterations: run.solution.iterations,
            controls: p
                .partition
                .ctrl
                .iter()
                .zip(run.state.g_opt.iter())
                .map(|(&v, &g)| ControlValue { node: node_id(ids, v), g })
                .collect(),
            boundedness: run.boundedness.clone(),
            diagnostics: run.report.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# {}\n", self.units));
        s.push_str(&format!(
            "network: {} nodes, {} edges, {} components\n",
            self.nodes, self.edges, self.components
        ));
        s.push_str(&format!("phi_max = {}, eps = {}, gauge = {}", self.phi_max, self.eps, self.gauge));
        if !self.gauge_fixed.is_empty() {
            s.push_str(&format!(" (fixed: {})", self.gauge_fixed.join(", ")));
        }
        s.push('\n');
        s.push_str(&format!(
            "status: {:?}, objective {:.12e}, net outward flux {:.12e}, {} pivots\n",
            self.status, self.objective, self.net_outward_flux, self.iterations
        ));
        s.push_str(&format!("boundedness: {:?}\n\n", self.boundedness.verdict));
        s.push_str(&self.diagnostics.to_string());
        s
    }
}

/// Writes edge and node CSVs, GeoJSON when positions exist, and the reports.
pub fn export_results(
    run: &PipelineRun,
    config: &RunConfig,
    net: &Network,
    ids: Option<&[String]>,
    paths: &ExportPaths,
) -> io::Result<ExportSummary> {
    for p in [&paths.edges_csv, &paths.nodes_csv, &paths.geojson, &paths.report_json, &paths.report_txt] {
        if let Some(parent) = p.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
    }
    let q: Vec<f64> = run.state.q.iter().copied().collect();
    let mut written = Vec::new();

    write_edges_csv(fs::File::create(&paths.edges_csv)?, net, ids, &q, config.phi_max)?;
    written.push(paths.edges_csv.clone());
    write_nodes_csv(fs::File::create(&paths.nodes_csv)?, &run.prepared.boundary, ids, &run.state)?;
    written.push(paths.nodes_csv.clone());

    let notice = match geojson(net, ids, &q, config.phi_max) {
        Some(doc) => {
            fs::write(&paths.geojson, serde_json::to_string_pretty(&doc).map_err(io::Error::other)? + "\n")?;
            written.push(paths.geojson.clone());
            None
        }
        None => Some("GeoJSON skipped: some nodes have no position".to_string()),
    };

    let report = RunReport::new(run, config, net, ids);
    fs::write(&paths.report_json, serde_json::to_string_pretty(&report).map_err(io::Error::other)? + "\n")?;
    written.push(paths.report_json.clone());
    fs::write(&paths.report_txt, report.to_text())?;
    written.push(paths.report_txt.clone());
    Ok(ExportSummary { written, notice })
}
