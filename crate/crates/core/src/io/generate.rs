//! Seeded synthetic networks: grids, ring-and-spoke layouts and collections
//! of disconnected random planar-ish components.
//!
//! These are emulations for testing at realistic sizes, not reconstructions
//! of any surveyed geometry.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{Edge, Network, Node};
use crate::reduction::BoundarySpec;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid generator parameters: {0}")]
pub struct GenerateError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// `rows × cols` lattice, inflow on the left column, outflow on the right.
    Grid { rows: usize, cols: usize },
    /// Concentric rings joined by spokes; inflow on the inner ring, outflow on
    /// the outer ring.
    Radial { rings: usize, spokes: usize },
    /// `count` disconnected components sharing roughly `total_nodes` nodes,
    /// with sizes in a 1 : 2 : … : count ratio.
    MultiComponent { count: usize, total_nodes: usize },
}

/// Edge widths `k` are drawn uniformly from `[width_min, width_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub width_min: f64,
    pub width_max: f64,
    /// Typical node spacing in length units.
    pub spacing: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self { width_min: 1.0, width_max: 5.0, spacing: 10.0 }
    }
}

struct Builder {
    rng: ChaCha8Rng,
    params: SyntheticParams,
    positions: Vec<[f64; 2]>,
    edges: Vec<Edge>,
}

impl Builder {
    fn node(&mut self, x: f64, y: f64) -> usize {
        self.positions.push([x, y]);
        self.positions.len() - 1
    }

    fn edge(&mut self, tail: usize, head: usize) {
        let [x0, y0] = self.positions[tail];
        let [x1, y1] = self.positions[head];
        let length = (x1 - x0).hypot(y1 - y0).max(1e-6 * self.params.spacing);
        let k = if self.params.width_max > self.params.width_min {
            self.rng.gen_range(self.params.width_min..=self.params.width_max)
        } else {
            self.params.width_min
        };
        self.edges.push(Edge::new(tail, head, length, k));
    }

    fn finish(self) -> Network {
        let nodes = self.positions.into_iter().map(|p| Node { position: Some(p) }).collect();
        Network::new(nodes, self.edges).expect("generated networks are well formed")
    }
}

pub fn generate_synthetic(
    kind: SyntheticKind,
    params: &SyntheticParams,
    seed: u64,
) -> Result<(Network, BoundarySpec), GenerateError> {
    let p = *params;
    if !(p.width_min > 0.0 && p.width_max >= p.width_min && p.width_max.is_finite()) {
        return Err(GenerateError(format!("width range [{}, {}] must be positive", p.width_min, p.width_max)));
    }
    if !(p.spacing > 0.0 && p.spacing.is_finite()) {
        return Err(GenerateError(format!("spacing {} must be positive", p.spacing)));
    }
    let mut b = Builder { rng: ChaCha8Rng::seed_from_u64(seed), params: p, positions: Vec::new(), edges: Vec::new() };
    let bspec = match kind {
        SyntheticKind::Grid { rows, cols } => grid(&mut b, rows, cols)?,
        SyntheticKind::Radial { rings, spokes } => radial(&mut b, rings, spokes)?,
        SyntheticKind::MultiComponent { count, total_nodes } => multi(&mut b, count, total_nodes)?,
    };
    Ok((b.finish(), bspec))
}

fn grid(b: &mut Builder, rows: usize, cols: usize) -> Result<BoundarySpec, GenerateError> {
    if rows < 2 || cols < 2 {
        return Err(GenerateError(format!("grid needs rows, cols >= 2, got {rows}x{cols}")));
    }
    let s = b.params.spacing;
    for r in 0..rows {
        for c in 0..cols {
            b.node(c as f64 * s, r as f64 * s);
        }
    }
    let id = |r: usize, c: usize| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                b.edge(id(r, c), id(r, c + 1));
            }
            if r + 1 < rows {
                b.edge(id(r, c), id(r + 1, c));
            }
        }
    }
    Ok(BoundarySpec::new((0..rows).map(|r| id(r, 0)), (0..rows).map(|r| id(r, cols - 1)), []))
}

fn radial(b: &mut Builder, rings: usize, spokes: usize) -> Result<BoundarySpec, GenerateError> {
    if rings < 2 || spokes < 2 {
        return Err(GenerateError(format!("radial needs rings, spokes >= 2, got {rings}x{spokes}")));
    }
    let s = b.params.spacing;
    let step = TAU / spokes as f64;
    for ring in 0..rings {
        for k in 0..spokes {
            let radius = s * (1.0 + ring as f64) + b.rng.gen_range(-0.1..0.1) * s;
            let angle = k as f64 * step + b.rng.gen_range(-0.15..0.15) * step;
            b.node(radius * angle.cos(), radius * angle.sin());
        }
    }
    let id = |ring: usize, k: usize| ring * spokes + k;
    for ring in 0..rings {
        // two spokes give one ring edge, not a doubled pair
        let ring_edges = if spokes == 2 { 1 } else { spokes };
        for k in 0..ring_edges {
            b.edge(id(ring, k), id(ring, (k + 1) % spokes));
        }
        if ring + 1 < rings {
            for k in 0..spokes {
                b.edge(id(ring, k), id(ring + 1, k));
            }
        }
    }
    Ok(BoundarySpec::new((0..spokes).map(|k| id(0, k)), (0..spokes).map(|k| id(rings - 1, k)), []))
}

fn multi(b: &mut Builder, count: usize, total_nodes: usize) -> Result<BoundarySpec, GenerateError> {
    if count < 1 {
        return Err(GenerateError("component count must be >= 1".into()));
    }
    let weight_sum = count * (count + 1) / 2;
    let sizes: Vec<usize> = (1..=count).map(|w| (total_nodes * w / weight_sum).max(4)).collect();
    let s = b.params.spacing;
    let mut inflow = BTreeSet::new();
    let mut outflow = BTreeSet::new();
    let mut x_offset = 0.0;
    for &size in &sizes {
        let side = s * (size as f64).sqrt();
        let first = b.positions.len();
        for _ in 0..size {
            let x = x_offset + b.rng.gen_range(0.0..side);
            let y = b.rng.gen_range(0.0..side);
            b.node(x, y);
        }
        x_offset += side + 3.0 * s;
        let ids: Vec<usize> = (first..first + size).collect();

        let dist = |pos: &[[f64; 2]], a: usize, c: usize| {
            let (p, q) = (pos[a], pos[c]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        };
        let mut pairs = BTreeSet::new();
        // spanning tree: each node joins its nearest predecessor
        for (i, &v) in ids.iter().enumerate().skip(1) {
            let nearest = ids[..i]
                .iter()
                .copied()
                .min_by(|&a, &c| dist(&b.positions, v, a).total_cmp(&dist(&b.positions, v, c)).then(a.cmp(&c)))
                .expect("non-empty prefix");
            pairs.insert((nearest.min(v), nearest.max(v)));
        }
        // extra local links to two nearest neighbours
        for &v in &ids {
            let mut others: Vec<usize> = ids.iter().copied().filter(|&w| w != v).collect();
            others.sort_by(|&a, &c| dist(&b.positions, v, a).total_cmp(&dist(&b.positions, v, c)).then(a.cmp(&c)));
            for &w in others.iter().take(2) {
                pairs.insert((v.min(w), v.max(w)));
            }
        }
        for (t, h) in pairs {
            b.edge(t, h);
        }

        let mut by_x = ids.clone();
        by_x.sort_by(|&a, &c| b.positions[a][0].total_cmp(&b.positions[c][0]).then(a.cmp(&c)));
        let n_boundary = size.div_ceil(10);
        inflow.extend(by_x[..n_boundary].iter().copied());
        outflow.extend(by_x[size - n_boundary..].iter().copied());
    }
    Ok(BoundarySpec { inflow, outflow, fixed: Default::default() })
}
