//! Rooted, degree-bounded graph truncations and their metric structure.
//!
//! A [`RootedGraph`] is a finite piece of an infinite graph. Vertices whose
//! neighbourhood may continue beyond the generated region carry a boundary
//! flag; metric operations refuse to look through them instead of silently
//! treating the truncation as the whole graph.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = usize;

/// On-disk layout of a graph file. Validation happens on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    degree_bound: usize,
    root: usize,
    potential: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    #[serde(default)]
    meta: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct RootedGraph {
    degree_bound: usize,
    root: Vertex,
    potential: Vec<f64>,
    adjacency: Vec<Vec<Vertex>>,
    boundary: Vec<bool>,
    meta: serde_json::Value,
}

impl TryFrom<GraphFile> for RootedGraph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Self> {
        RootedGraph::new(f.adjacency, f.root, f.potential, f.degree_bound, f.boundary, f.meta)
    }
}

impl From<RootedGraph> for GraphFile {
    fn from(g: RootedGraph) -> Self {
        GraphFile {
            degree_bound: g.degree_bound,
            root: g.root,
            potential: g.potential,
            adjacency: g.adjacency,
            boundary: g.boundary,
            meta: g.meta,
        }
    }
}

impl RootedGraph {
    /// Builds a graph and checks every structural invariant: sorted and
    /// duplicate-free neighbour lists, no loops, symmetry, connectivity from
    /// the root and the degree bound.
    pub fn new(
        mut adjacency: Vec<Vec<Vertex>>,
        root: Vertex,
        potential: Vec<f64>,
        degree_bound: usize,
        boundary: Vec<bool>,
        meta: serde_json::Value,
    ) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("empty graph".into()));
        }
        if root >= n {
            return Err(Error::InvalidVertex { vertex: root, count: n });
        }
        if potential.len() != n {
            return Err(Error::InvalidGraph(format!(
                "potential has {} entries for {n} vertices",
                potential.len()
            )));
        }
        if boundary.len() != n {
            return Err(Error::InvalidGraph(format!(
                "boundary has {} entries for {n} vertices",
                boundary.len()
            )));
        }
        if degree_bound == 0 {
            return Err(Error::InvalidGraph("degree bound must be positive".into()));
        }
        if let Some(v) = potential.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidGraph(format!("potential at {v} is not finite")));
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            if !nbrs.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "neighbour list of {v} is not strictly ascending"
                )));
            }
            if nbrs.len() > degree_bound {
                return Err(Error::InvalidGraph(format!(
                    "degree of {v} is {} > bound {degree_bound}",
                    nbrs.len()
                )));
            }
            for &u in nbrs.iter() {
                if u >= n {
                    return Err(Error::InvalidVertex { vertex: u, count: n });
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("loop at vertex {v}")));
                }
            }
        }
        for (v, nbrs) in adjacency.iter().enumerate() {
            for &u in nbrs {
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {v}-{u} is not symmetric"
                    )));
                }
            }
        }
        let g = RootedGraph {
            degree_bound,
            root,
            potential,
            adjacency,
            boundary,
            meta,
        };
        let reached = g.bfs_unchecked(root, usize::MAX).order.len();
        if reached != n {
            return Err(Error::InvalidGraph(format!(
                "disconnected: root reaches {reached} of {n} vertices"
            )));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.boundary[v]
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn adjacency(&self) -> &[Vec<Vertex>] {
        &self.adjacency
    }

    pub fn meta(&self) -> &serde_json::Value {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut serde_json::Value {
        &mut self.meta
    }

    /// Vertex carrying the generator label `label` (see `meta.labels`).
    pub fn find_label(&self, label: &str) -> Option<Vertex> {
        match self.meta.get("labels")? {
            serde_json::Value::Array(per_vertex) => {
                per_vertex.iter().position(|l| l.as_str() == Some(label))
            }
            serde_json::Value::Object(named) => {
                named.get(label)?.as_u64().map(|v| v as Vertex)
            }
            _ => None,
        }
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    /// Full breadth-first layering from `center`.
    pub fn bfs_layers(&self, center: Vertex) -> Result<Layers> {
        self.check_vertex(center)?;
        Ok(self.bfs_unchecked(center, usize::MAX))
    }

    /// Breadth-first layering truncated at `max_radius`.
    pub fn bfs_layers_within(&self, center: Vertex, max_radius: usize) -> Result<Layers> {
        self.check_vertex(center)?;
        Ok(self.bfs_unchecked(center, max_radius))
    }

    fn bfs_unchecked(&self, center: Vertex, max_radius: usize) -> Layers {
        let mut dist = HashMap::new();
        let mut order = vec![center];
        let mut layers = vec![vec![center]];
        dist.insert(center, 0usize);
        let mut queue = VecDeque::from([center]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[&v];
            if dv >= max_radius {
                continue;
            }
            for &u in &self.adjacency[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(u) {
                    e.insert(dv + 1);
                    if layers.len() <= dv + 1 {
                        layers.push(Vec::new());
                    }
                    layers[dv + 1].push(u);
                    order.push(u);
                    queue.push_back(u);
                }
            }
        }
        for layer in &mut layers {
            layer.sort_unstable();
        }
        Layers {
            center,
            dist,
            layers,
            order,
        }
    }

    /// Distance of every vertex from the root (the graph is connected).
    pub fn root_distances(&self) -> Vec<usize> {
        let layers = self.bfs_unchecked(self.root, usize::MAX);
        let mut out = vec![0; self.vertex_count()];
        for (r, layer) in layers.layers.iter().enumerate() {
            for &v in layer {
                out[v] = r;
            }
        }
        out
    }

    /// The radius-`r` ball around `center` as an induced subgraph.
    ///
    /// Every vertex at distance `< r` must be complete (non-boundary), so that
    /// the ball is exactly the ball of the underlying infinite graph.
    pub fn ball(&self, center: Vertex, r: usize) -> Result<BallView> {
        self.check_vertex(center)?;
        let layers = self.bfs_unchecked(center, r);
        for (d, layer) in layers.layers.iter().enumerate().take(r) {
            if let Some(&v) = layer.iter().find(|&&v| self.boundary[v]) {
                return Err(Error::UnreliableBall {
                    center,
                    radius: r,
                    vertex: v,
                    distance: d,
                });
            }
        }
        Ok(BallView::from_layers(self, &layers, r))
    }

    /// The radius-`r` ball without the reliability check.
    pub fn ball_unchecked(&self, center: Vertex, r: usize) -> BallView {
        let layers = self.bfs_unchecked(center, r);
        BallView::from_layers(self, &layers, r)
    }

    /// Whether `ball(center, r)` would succeed.
    pub fn ball_is_reliable(&self, center: Vertex, r: usize) -> bool {
        if r == 0 {
            return true;
        }
        let layers = self.bfs_unchecked(center, r - 1);
        layers
            .layers
            .iter()
            .flatten()
            .all(|&v| !self.boundary[v])
    }

    /// Ball sizes `#B_r(root)` for `r = 0..=max_radius`.
    pub fn growth_profile(&self, max_radius: usize) -> Result<GrowthProfile> {
        let layers = self.bfs_unchecked(self.root, max_radius);
        for (d, layer) in layers.layers.iter().enumerate().take(max_radius) {
            if let Some(&v) = layer.iter().find(|&&v| self.boundary[v]) {
                return Err(Error::UnreliableBall {
                    center: self.root,
                    radius: max_radius,
                    vertex: v,
                    distance: d,
                });
            }
        }
        let mut ball_sizes = Vec::with_capacity(max_radius + 1);
        let mut acc = 0;
        for r in 0..=max_radius {
            acc += layers.layers.get(r).map_or(0, Vec::len);
            ball_sizes.push(acc);
        }
        Ok(GrowthProfile::from_sizes(ball_sizes))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Breadth-first layers around a center.
#[derive(Debug, Clone)]
pub struct Layers {
    pub center: Vertex,
    dist: HashMap<Vertex, usize>,
    /// `layers[l]` is the sphere of radius `l`, sorted ascending.
    pub layers: Vec<Vec<Vertex>>,
    /// Discovery order.
    pub order: Vec<Vertex>,
}

impl Layers {
    pub fn distance(&self, v: Vertex) -> Option<usize> {
        self.dist.get(&v).copied()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Dense distance map, `None` for unreached vertices.
    pub fn distance_map(&self, vertex_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; vertex_count];
        for (&v, &d) in &self.dist {
            out[v] = Some(d);
        }
        out
    }
}

/// Radius-`r` ball as an induced subgraph, vertices ordered by
/// (distance, original index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallView {
    pub center: Vertex,
    pub radius: usize,
    /// Original vertex indices; position 0 is the center.
    pub vertices: Vec<Vertex>,
    /// Distance from the center, aligned with `vertices`.
    pub distances: Vec<usize>,
    /// Induced edges as pairs of local positions `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl BallView {
    fn from_layers(g: &RootedGraph, layers: &Layers, r: usize) -> Self {
        let mut vertices = Vec::new();
        let mut distances = Vec::new();
        for (d, layer) in layers.layers.iter().enumerate().take(r + 1) {
            vertices.extend_from_slice(layer);
            distances.extend(std::iter::repeat(d).take(layer.len()));
        }
        let local: HashMap<Vertex, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &u in g.neighbors(v) {
                if let Some(&j) = local.get(&u) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.sort_unstable();
        BallView {
            center: layers.center,
            radius: r,
            vertices,
            distances,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Local adjacency lists (positions into `vertices`), sorted.
    pub fn local_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }

    /// Number of vertices on the outermost layer.
    pub fn outer_layer_len(&self) -> usize {
        self.distances.iter().filter(|&&d| d == self.radius).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    /// `ball_sizes[r] = #B_r(root)`.
    pub ball_sizes: Vec<usize>,
    /// `max_{r >= 1} (#B_r)^(1/r)`.
    pub rate: f64,
    /// `(#B_R)^(1/R)` at the largest radius, the quantity that tends to 1 for
    /// sub-exponential growth.
    pub final_rate: f64,
}

impl GrowthProfile {
    pub fn from_sizes(ball_sizes: Vec<usize>) -> Self {
        let rates = ball_sizes
            .iter()
            .enumerate()
            .skip(1)
            .map(|(r, &b)| (b as f64).powf(1.0 / r as f64));
        let rate = rates.clone().fold(1.0, f64::max);
        let final_rate = rates.last().unwrap_or(1.0);
        GrowthProfile {
            ball_sizes,
            rate,
            final_rate,
        }
    }

    /// Radii `k >= 1` at which `#B_k >= 2k`.
    pub fn violations_of_linear_bound(&self) -> Vec<usize> {
        self.ball_sizes
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(k, &b)| b >= 2 * k)
            .map(|(k, _)| k)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> RootedGraph {
        let adjacency = (0..n)
            .map(|i| {
                let mut v = Vec::new();
                if i > 0 {
                    v.push(i - 1);
                }
                if i + 1 < n {
                    v.push(i + 1);
                }
                v
            })
            .collect();
        let mut boundary = vec![false; n];
        boundary[0] = true;
        boundary[n - 1] = true;
        RootedGraph::new(adjacency, n / 2, vec![0.0; n], 2, boundary, serde_json::Value::Null)
            .unwrap()
    }

    #[test]
    fn path_distances() {
        let g = RootedGraph::new(
            vec![vec![1], vec![0, 2], vec![1]],
            0,
            vec![0.0; 3],
            2,
            vec![false; 3],
            serde_json::Value::Null,
        )
        .unwrap();
        let l = g.bfs_layers(0).unwrap();
        assert_eq!(l.distance_map(3), vec![Some(0), Some(1), Some(2)]);
        assert_eq!(l.layers[0], vec![0]);
    }

    #[test]
    fn rejects_broken_graphs() {
        let meta = serde_json::Value::Null;
        // asymmetric
        assert!(RootedGraph::new(vec![vec![1], vec![]], 0, vec![0.0; 2], 2, vec![false; 2], meta.clone()).is_err());
        // loop
        assert!(RootedGraph::new(vec![vec![0]], 0, vec![0.0], 2, vec![false], meta.clone()).is_err());
        // disconnected
        assert!(RootedGraph::new(vec![vec![], vec![]], 0, vec![0.0; 2], 2, vec![false; 2], meta.clone()).is_err());
        // degree bound
        assert!(RootedGraph::new(
            vec![vec![1, 2], vec![0], vec![0]],
            0,
            vec![0.0; 3],
            1,
            vec![false; 3],
            meta.clone()
        )
        .is_err());
        // unsorted
        assert!(RootedGraph::new(
            vec![vec![2, 1], vec![0], vec![0]],
            0,
            vec![0.0; 3],
            2,
            vec![false; 3],
            meta
        )
        .is_err());
    }

    #[test]
    fn invalid_center() {
        let g = path(5);
        assert!(matches!(g.bfs_layers(9), Err(Error::InvalidVertex { .. })));
    }

    #[test]
    fn ball_radius_zero_and_interior() {
        let g = path(9);
        let b = g.ball(4, 0).unwrap();
        assert_eq!(b.vertices, vec![4]);
        assert!(b.edges.is_empty());
        let b = g.ball(4, 2).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.edges.len(), 4);
        assert_eq!(b.distances, vec![0, 1, 1, 2, 2]);
    }

    #[test]
    fn ball_refuses_boundary() {
        let g = path(5);
        // vertex 0 is boundary at distance 2 from 2: radius 2 fine, 3 not
        assert!(g.ball(2, 2).is_ok());
        assert!(matches!(g.ball(2, 3), Err(Error::UnreliableBall { .. })));
        assert!(!g.ball_is_reliable(2, 3));
    }

    #[test]
    fn line_growth() {
        let g = path(21);
        let p = g.growth_profile(10).unwrap();
        for (r, &b) in p.ball_sizes.iter().enumerate() {
            assert_eq!(b, 2 * r + 1);
        }
        assert!((p.rate - 3.0).abs() < 1e-12);
        assert!(g.growth_profile(11).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = path(7);
        let s = g.to_json().unwrap();
        assert_eq!(RootedGraph::from_json(&s).unwrap(), g);
        let bad = r#"{"degree_bound":2,"root":0,"potential":[0,0],"adjacency":[[1],[]],"boundary":[false,false],"meta":{}}"#;
        assert!(RootedGraph::from_json(bad).is_err());
    }
}
