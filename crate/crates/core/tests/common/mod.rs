//! Random instances and independent dense oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use graphflux::network::{Edge, Network};
use graphflux::reduction::BoundarySpec;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_edge(rng: &mut ChaCha8Rng, tail: usize, head: usize) -> Edge {
    Edge::new(tail, head, rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
}

/// `n` nodes and `m` uniformly random non-loop edges; may be disconnected.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Network {
    let edges = (0..m)
        .map(|_| {
            let t = rng.gen_range(0..n);
            let mut h = rng.gen_range(0..n - 1);
            if h >= t {
                h += 1;
            }
            random_edge(rng, t, h)
        })
        .collect();
    Network::unplaced(n, edges).unwrap()
}

/// Random spanning tree plus `extra` chords, with random orientations.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Network {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(if rng.gen_bool(0.5) { random_edge(rng, u, v) } else { random_edge(rng, v, u) });
    }
    for _ in 0..extra {
        let t = rng.gen_range(0..n);
        let mut h = rng.gen_range(0..n - 1);
        if h >= t {
            h += 1;
        }
        edges.push(random_edge(rng, t, h));
    }
    Network::unplaced(n, edges).unwrap()
}

/// Disjoint random inflow / outflow / fixed sets of the requested sizes.
pub fn random_bspec(rng: &mut ChaCha8Rng, n: usize, n_in: usize, n_out: usize, n_fixed: usize) -> BoundarySpec {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let inflow = nodes[..n_in].to_vec();
    let outflow = nodes[n_in..n_in + n_out].to_vec();
    // fixed nodes may coincide with boundary nodes
    let mut fixed_pool: Vec<usize> = (0..n).filter(|v| !outflow.contains(v)).collect();
    fixed_pool.shuffle(rng);
    let fixed: Vec<(usize, f64)> = fixed_pool[..n_fixed].iter().map(|&v| (v, rng.gen_range(0.0..2.0))).collect();
    BoundarySpec::new(inflow, outflow, fixed)
}

pub fn path3() -> (Network, BoundarySpec) {
    let net = Network::unplaced(3, vec![Edge::new(0, 1, 1.0, 1.0), Edge::new(1, 2, 1.0, 1.0)]).unwrap();
    (net, BoundarySpec::new([0], [2], [(0, 1.0)]))
}

/// Weighted Laplacian assembled edge by edge.
pub fn dense_laplacian(net: &Network) -> DMatrix<f64> {
    let n = net.n_nodes();
    let mut l = DMatrix::zeros(n, n);
    for e in net.edges() {
        let c = e.conductivity / e.length;
        l[(e.tail, e.tail)] += c;
        l[(e.head, e.head)] += c;
        l[(e.tail, e.head)] -= c;
        l[(e.head, e.tail)] -= c;
    }
    l
}

pub fn union_find_count(net: &Network) -> usize {
    let mut parent: Vec<usize> = (0..net.n_nodes()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in net.edges() {
        let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        parent[a] = b;
    }
    (0..net.n_nodes()).filter(|&v| find(&mut parent, v) == v).count()
}

/// Solves `L u = 0` on unknown nodes given `known` potentials with a dense
/// LU, then `q_e = c_e (u_tail − u_head)` and `Φ_v = Σ_in q − Σ_out q`.
pub fn dirichlet_solve(net: &Network, known: &BTreeMap<usize, f64>) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
    let n = net.n_nodes();
    let l = dense_laplacian(net);
    let free: Vec<usize> = (0..n).filter(|v| !known.contains_key(v)).collect();
    let mut a = DMatrix::zeros(free.len(), free.len());
    let mut rhs = DVector::zeros(free.len());
    for (i, &v) in free.iter().enumerate() {
        for (j, &w) in free.iter().enumerate() {
            a[(i, j)] = l[(v, w)];
        }
        for (&w, &x) in known {
            rhs[i] -= l[(v, w)] * x;
        }
    }
    let sol = if free.is_empty() { rhs } else { a.lu().solve(&rhs).expect("anchored system is nonsingular") };
    let mut u = DVector::zeros(n);
    for (&v, &x) in known {
        u[v] = x;
    }
    for (i, &v) in free.iter().enumerate() {
        u[v] = sol[i];
    }
    let q = DVector::from_iterator(
        net.n_edges(),
        net.edges().iter().map(|e| e.conductivity / e.length * (u[e.tail] - u[e.head])),
    );
    let mut phi = DVector::zeros(n);
    for (i, e) in net.edges().iter().enumerate() {
        phi[e.head] += q[i];
        phi[e.tail] -= q[i];
    }
    (u, q, phi)
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / (1.0 + b.amax())
}

pub fn maps_for(
    net: &Network,
    bspec: &BoundarySpec,
) -> Result<(graphflux::reduction::Partition, graphflux::reduction::AffineMaps), graphflux::ReductionError> {
    use graphflux::network::{build_conductance, build_incidence, build_laplacian, connected_components};
    use graphflux::reduction::{build_affine_maps, partition_nodes};
    let b = build_incidence(net);
    let c = build_conductance(net);
    let l = build_laplacian(&b, &c)?;
    let part = partition_nodes(net, bspec, &connected_components(net))?;
    let maps = build_affine_maps(&l, &b, &c, &part, bspec, &bspec.fixed_values())?;
    Ok((part, maps))
}

/// Known potentials for a dense solve: fixed data plus control values.
pub fn known_values(
    bspec: &BoundarySpec,
    part: &graphflux::reduction::Partition,
    g: &DVector<f64>,
) -> BTreeMap<usize, f64> {
    let mut known: BTreeMap<usize, f64> = bspec.fixed.clone();
    for (j, &v) in part.ctrl.iter().enumerate() {
        known.insert(v, g[j]);
    }
    known
}
