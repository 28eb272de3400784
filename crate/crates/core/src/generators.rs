//! Finite truncations of the graph families.
//!
//! Every family is described as an infinite graph through [`InfiniteGraph`]
//! and cut to the ball of radius `R` around its root by breadth-first search.
//! Vertices are numbered in discovery order, the distance-`R` layer is marked
//! as boundary and all edges between discovered vertices are kept. The comb
//! and the ℤⁿ box are cut to coordinate boxes instead and mark the vertices
//! with missing neighbours.
//!
//! Generated potentials are identically zero; the operator mode decides
//! whether the graph is read as a Laplacian, an adjacency operator or a
//! Schrödinger operator with the stored potential.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::RootedGraph;

pub const DEFAULT_VERTEX_BUDGET: usize = 2_000_000;

/// Recipe for one generated graph; serialized into the output's `meta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum GeneratorSpec {
    #[serde(rename = "line_Z")]
    Line { radius: usize },
    #[serde(rename = "half_line_N")]
    HalfLine { radius: usize },
    #[serde(rename = "zn_box")]
    ZnBox { n: usize, half_side: usize },
    #[serde(rename = "z_nxn")]
    ZNxN { n: usize, radius: usize },
    #[serde(rename = "regular_tree")]
    RegularTree { d: usize, radius: usize },
    #[serde(rename = "star")]
    Star { k: usize, radius: usize },
    #[serde(rename = "comb")]
    Comb { radius: usize },
    #[serde(rename = "sparse_tree_cycles")]
    SparseTreeCycles {
        #[serde(default)]
        rule: SparseRule,
        radius: usize,
    },
    #[serde(rename = "chain_graph")]
    ChainGraph {
        blocks: Vec<ChainBlock>,
        positions: Vec<usize>,
        radius: usize,
    },
    #[serde(rename = "g_d_example")]
    GD { d: usize, radius: usize },
}

impl GeneratorSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Line { .. } => "line_Z",
            GeneratorSpec::HalfLine { .. } => "half_line_N",
            GeneratorSpec::ZnBox { .. } => "zn_box",
            GeneratorSpec::ZNxN { .. } => "z_nxn",
            GeneratorSpec::RegularTree { .. } => "regular_tree",
            GeneratorSpec::Star { .. } => "star",
            GeneratorSpec::Comb { .. } => "comb",
            GeneratorSpec::SparseTreeCycles { .. } => "sparse_tree_cycles",
            GeneratorSpec::ChainGraph { .. } => "chain_graph",
            GeneratorSpec::GD { .. } => "g_d_example",
        }
    }

    pub fn generate(&self) -> Result<RootedGraph> {
        self.generate_with_budget(DEFAULT_VERTEX_BUDGET)
    }

    pub fn generate_with_budget(&self, budget: usize) -> Result<RootedGraph> {
        let (mut g, extra) = match self {
            GeneratorSpec::Line { radius } => {
                let r = require_radius(*radius)?;
                (truncate_ball(&LineZ, r, budget)?.graph, json!({}))
            }
            GeneratorSpec::HalfLine { radius } => {
                let r = require_radius(*radius)?;
                (truncate_ball(&HalfLineN, r, budget)?.graph, json!({}))
            }
            GeneratorSpec::ZnBox { n, half_side } => (zn_box(*n, *half_side, budget)?, json!({})),
            GeneratorSpec::ZNxN { n, radius } => {
                let r = require_radius(*radius)?;
                if *n == 0 {
                    return Err(Error::InvalidParameters("z_nxn needs n >= 1".into()));
                }
                (truncate_ball(&ZNxN { n: *n }, r, budget)?.graph, json!({}))
            }
            GeneratorSpec::RegularTree { d, radius } => {
                let r = require_radius(*radius)?;
                if *d < 3 {
                    return Err(Error::InvalidParameters("regular tree needs d >= 3".into()));
                }
                (truncate_ball(&RegularTree { d: *d }, r, budget)?.graph, json!({}))
            }
            GeneratorSpec::Star { k, radius } => {
                let r = require_radius(*radius)?;
                if *k < 2 {
                    return Err(Error::InvalidParameters("star needs k >= 2".into()));
                }
                (truncate_ball(&Star { k: *k }, r, budget)?.graph, json!({}))
            }
            GeneratorSpec::Comb { radius } => (comb(require_radius(*radius)?, budget)?, json!({})),
            GeneratorSpec::SparseTreeCycles { rule, radius } => {
                sparse_tree_cycles(rule, require_radius(*radius)?, budget)?
            }
            GeneratorSpec::ChainGraph {
                blocks,
                positions,
                radius,
            } => chain_graph(blocks.clone(), positions.clone(), require_radius(*radius)?, budget)?,
            GeneratorSpec::GD { d, radius } => g_d(*d, require_radius(*radius)?, budget)?,
        };
        let mut meta = json!({ "generator": self, "family": self.family() });
        if let (Some(m), serde_json::Value::Object(e)) = (meta.as_object_mut(), extra) {
            m.extend(e);
        }
        *g.meta_mut() = meta;
        Ok(g)
    }
}

fn require_radius(r: usize) -> Result<usize> {
    if r == 0 {
        Err(Error::InvalidParameters("truncation radius must be >= 1".into()))
    } else {
        Ok(r)
    }
}

pub fn make_line(radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::Line { radius }.generate()
}

pub fn make_half_line(radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::HalfLine { radius }.generate()
}

pub fn make_zn_box(n: usize, half_side: usize) -> Result<RootedGraph> {
    GeneratorSpec::ZnBox { n, half_side }.generate()
}

pub fn make_z_nxn(n: usize, radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::ZNxN { n, radius }.generate()
}

pub fn make_regular_tree(d: usize, radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::RegularTree { d, radius }.generate()
}

pub fn make_star(k: usize, radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::Star { k, radius }.generate()
}

pub fn make_comb(radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::Comb { radius }.generate()
}

pub fn make_sparse_tree_cycles(rule: SparseRule, radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::SparseTreeCycles { rule, radius }.generate()
}

pub fn make_chain_graph(
    blocks: Vec<ChainBlock>,
    positions: Vec<usize>,
    radius: usize,
) -> Result<RootedGraph> {
    GeneratorSpec::ChainGraph {
        blocks,
        positions,
        radius,
    }
    .generate()
}

pub fn make_g_d(d: usize, radius: usize) -> Result<RootedGraph> {
    GeneratorSpec::GD { d, radius }.generate()
}

/// A locally finite infinite graph given by its neighbour function.
pub trait InfiniteGraph {
    type Key: Clone + Eq + Hash + Debug;

    fn root(&self) -> Self::Key;
    fn neighbors(&self, key: &Self::Key) -> Vec<Self::Key>;
    fn degree_bound(&self) -> usize;
}

/// A generated ball together with the family key of every vertex.
#[derive(Debug, Clone)]
pub struct Truncation<K> {
    pub graph: RootedGraph,
    pub keys: Vec<K>,
    pub index: HashMap<K, usize>,
}

pub fn truncate_ball<G: InfiniteGraph>(
    g: &G,
    radius: usize,
    budget: usize,
) -> Result<Truncation<G::Key>> {
    let root = g.root();
    let mut index: HashMap<G::Key, usize> = HashMap::new();
    let mut keys = vec![root.clone()];
    let mut dist = vec![0usize];
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == radius {
            continue;
        }
        for u in g.neighbors(&keys[v]) {
            if index.contains_key(&u) {
                continue;
            }
            if keys.len() >= budget {
                return Err(Error::VertexBudget {
                    requested: keys.len() + 1,
                    budget,
                });
            }
            index.insert(u.clone(), keys.len());
            keys.push(u);
            dist.push(dist[v] + 1);
            queue.push_back(keys.len() - 1);
        }
    }
    let adjacency: Vec<Vec<usize>> = keys
        .iter()
        .map(|k| {
            let mut nb: Vec<usize> = g
                .neighbors(k)
                .iter()
                .filter_map(|u| index.get(u).copied())
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();
    let n = keys.len();
    let boundary = dist.iter().map(|&d| d == radius).collect();
    let graph = RootedGraph::new(
        adjacency,
        0,
        vec![0.0; n],
        g.degree_bound(),
        boundary,
        serde_json::Value::Null,
    )?;
    Ok(Truncation { graph, keys, index })
}

/// The two-sided line ℤ rooted at 0.
#[derive(Debug, Clone, Copy)]
pub struct LineZ;

impl InfiniteGraph for LineZ {
    type Key = i64;

    fn root(&self) -> i64 {
        0
    }

    fn neighbors(&self, k: &i64) -> Vec<i64> {
        vec![k - 1, k + 1]
    }

    fn degree_bound(&self) -> usize {
        2
    }
}

/// The half-line ℕ = {1, 2, ...} rooted at 1.
#[derive(Debug, Clone, Copy)]
pub struct HalfLineN;

impl InfiniteGraph for HalfLineN {
    type Key = u64;

    fn root(&self) -> u64 {
        1
    }

    fn neighbors(&self, k: &u64) -> Vec<u64> {
        if *k == 1 {
            vec![2]
        } else {
            vec![k - 1, k + 1]
        }
    }

    fn degree_bound(&self) -> usize {
        2
    }
}

/// The d-regular tree; a vertex is the word of child choices from the root.
#[derive(Debug, Clone, Copy)]
pub struct RegularTree {
    pub d: usize,
}

impl InfiniteGraph for RegularTree {
    type Key = Vec<u16>;

    fn root(&self) -> Vec<u16> {
        Vec::new()
    }

    fn neighbors(&self, k: &Vec<u16>) -> Vec<Vec<u16>> {
        let children = if k.is_empty() { self.d } else { self.d - 1 };
        let mut out = Vec::with_capacity(self.d);
        if !k.is_empty() {
            out.push(k[..k.len() - 1].to_vec());
        }
        for c in 0..children {
            let mut w = k.clone();
            w.push(c as u16);
            out.push(w);
        }
        out
    }

    fn degree_bound(&self) -> usize {
        self.d
    }
}

/// k half-lines glued at a common centre.
#[derive(Debug, Clone, Copy)]
pub struct Star {
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarKey {
    Center,
    /// Ray index and distance from the centre (at least 1).
    Ray(usize, usize),
}

impl InfiniteGraph for Star {
    type Key = StarKey;

    fn root(&self) -> StarKey {
        StarKey::Center
    }

    fn neighbors(&self, key: &StarKey) -> Vec<StarKey> {
        match *key {
            StarKey::Center => (0..self.k).map(|r| StarKey::Ray(r, 1)).collect(),
            StarKey::Ray(r, 1) => vec![StarKey::Center, StarKey::Ray(r, 2)],
            StarKey::Ray(r, t) => vec![StarKey::Ray(r, t - 1), StarKey::Ray(r, t + 1)],
        }
    }

    fn degree_bound(&self) -> usize {
        self.k.max(2)
    }
}

/// The chain-of-boxes graph: a copy of the box of half-side ‖x‖∞ at every
/// x ∈ ℤⁿ, neighbouring boxes joined by a path between facing face centres.
#[derive(Debug, Clone, Copy)]
pub struct ZNxN {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZNxNKey {
    /// Box site `x` and position `y` inside its box.
    Box { x: Vec<i64>, y: Vec<i64> },
    /// Interior vertex `t` of the path from box `x` to box `x + e_j`.
    Path { x: Vec<i64>, j: usize, t: usize },
}

fn sup_norm(x: &[i64]) -> i64 {
    x.iter().map(|c| c.abs()).max().unwrap_or(0)
}

impl ZNxN {
    fn path_length(&self, x: &[i64], j: usize) -> usize {
        let mut y = x.to_vec();
        y[j] += 1;
        sup_norm(x).max(sup_norm(&y)) as usize
    }

    /// Face centre of box `x` facing direction `sign · e_j`.
    fn face_center(&self, x: &[i64], j: usize, sign: i64) -> ZNxNKey {
        let mut y = vec![0; self.n];
        y[j] = sign * sup_norm(x);
        ZNxNKey::Box { x: x.to_vec(), y }
    }

    /// Vertex `t` on the path from box `x` to box `x + e_j`, where `t = 0`
    /// and `t = len` are the two face centres.
    fn path_vertex(&self, x: &[i64], j: usize, t: usize) -> ZNxNKey {
        let len = self.path_length(x, j);
        if t == 0 {
            self.face_center(x, j, 1)
        } else if t == len {
            let mut y = x.to_vec();
            y[j] += 1;
            self.face_center(&y, j, -1)
        } else {
            ZNxNKey::Path { x: x.to_vec(), j, t }
        }
    }
}

impl InfiniteGraph for ZNxN {
    type Key = ZNxNKey;

    fn root(&self) -> ZNxNKey {
        ZNxNKey::Box {
            x: vec![0; self.n],
            y: vec![0; self.n],
        }
    }

    fn neighbors(&self, key: &ZNxNKey) -> Vec<ZNxNKey> {
        match key {
            ZNxNKey::Box { x, y } => {
                let l = sup_norm(x);
                let mut out = Vec::with_capacity(2 * self.n);
                for i in 0..self.n {
                    for s in [-1, 1] {
                        let mut z = y.clone();
                        z[i] += s;
                        if z[i].abs() <= l {
                            out.push(ZNxNKey::Box { x: x.clone(), y: z });
                        }
                    }
                }
                for j in 0..self.n {
                    let on_axis = y.iter().enumerate().all(|(i, &c)| i == j || c == 0);
                    if on_axis && y[j] == l {
                        out.push(self.path_vertex(x, j, 1));
                    }
                    if on_axis && y[j] == -l {
                        let mut w = x.clone();
                        w[j] -= 1;
                        let len = self.path_length(&w, j);
                        out.push(self.path_vertex(&w, j, len - 1));
                    }
                }
                out
            }
            ZNxNKey::Path { x, j, t } => {
                vec![self.path_vertex(x, *j, t - 1), self.path_vertex(x, *j, t + 1)]
            }
        }
    }

    fn degree_bound(&self) -> usize {
        2 * self.n
    }
}

/// Vertex index of lattice point `coords` in [`make_zn_box`] output.
pub fn zn_box_vertex(half_side: usize, coords: &[i64]) -> usize {
    let side = 2 * half_side + 1;
    coords
        .iter()
        .fold(0, |acc, &c| acc * side + (c + half_side as i64) as usize)
}

fn zn_box(n: usize, half_side: usize, budget: usize) -> Result<RootedGraph> {
    if n == 0 {
        return Err(Error::InvalidParameters("zn_box needs n >= 1".into()));
    }
    let side = 2 * half_side + 1;
    let count = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(side));
    let count = match count {
        Some(c) if c <= budget => c,
        _ => {
            return Err(Error::VertexBudget {
                requested: count.unwrap_or(usize::MAX),
                budget,
            })
        }
    };
    let mut adjacency = vec![Vec::with_capacity(2 * n); count];
    let mut boundary = vec![false; count];
    let mut coords = vec![0usize; n];
    for v in 0..count {
        let mut rem = v;
        for i in (0..n).rev() {
            coords[i] = rem % side;
            rem /= side;
        }
        boundary[v] = coords.iter().any(|&c| c == 0 || c == side - 1);
        let mut stride = 1;
        for i in (0..n).rev() {
            if coords[i] > 0 {
                adjacency[v].push(v - stride);
            }
            if coords[i] + 1 < side {
                adjacency[v].push(v + stride);
            }
            stride *= side;
        }
        adjacency[v].sort_unstable();
    }
    let root = zn_box_vertex(half_side, &vec![0; n]);
    RootedGraph::new(
        adjacency,
        root,
        vec![0.0; count],
        2 * n,
        boundary,
        serde_json::Value::Null,
    )
}

/// Vertex index of (k, l) in [`make_comb`] output.
pub fn comb_vertex(radius: usize, k: i64, l: i64) -> usize {
    let side = 2 * radius + 1;
    (k + radius as i64) as usize * side + (l + radius as i64) as usize
}

fn comb(radius: usize, budget: usize) -> Result<RootedGraph> {
    let side = 2 * radius + 1;
    let count = side * side;
    if count > budget {
        return Err(Error::VertexBudget {
            requested: count,
            budget,
        });
    }
    let r = radius as i64;
    let mut adjacency = vec![Vec::with_capacity(4); count];
    let mut boundary = vec![false; count];
    for k in -r..=r {
        for l in -r..=r {
            let v = comb_vertex(radius, k, l);
            let nb = &mut adjacency[v];
            if l == 0 && k > -r {
                nb.push(comb_vertex(radius, k - 1, 0));
            }
            if l > -r {
                nb.push(comb_vertex(radius, k, l - 1));
            }
            if l < r {
                nb.push(comb_vertex(radius, k, l + 1));
            }
            if l == 0 && k < r {
                nb.push(comb_vertex(radius, k + 1, 0));
            }
            nb.sort_unstable();
            boundary[v] = l.abs() == r || (l == 0 && k.abs() == r);
        }
    }
    RootedGraph::new(
        adjacency,
        comb_vertex(radius, 0, 0),
        vec![0.0; count],
        4,
        boundary,
        serde_json::Value::Null,
    )
}

/// Parameters of a sparse tree with sparse cycles.
///
/// A vertex at depth `j - 1` has `κ(j)` children, where `κ(L_n) = k_n` and
/// `κ(j) = 1` otherwise. The sphere at depth `C_n` (for `n >= 1`) is closed
/// into a cycle in breadth-first order. `k` may be shorter than `l`; its last
/// entry then repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRule {
    pub l: Vec<usize>,
    pub k: Vec<usize>,
    pub c: Vec<usize>,
}

impl Default for SparseRule {
    fn default() -> Self {
        SparseRule::powers_of_ten(4, 2)
    }
}

impl SparseRule {
    /// `L_n = 10ⁿ` for `n = 0..count`, constant `k` and midpoint cycles.
    pub fn powers_of_ten(count: usize, k: usize) -> Self {
        let l: Vec<usize> = (0..count as u32).map(|n| 10usize.pow(n)).collect();
        let c = midpoints(&l);
        SparseRule { l, k: vec![k], c }
    }

    /// Powers of ten covering every depth up to `radius`.
    pub fn default_for_radius(radius: usize, k: usize) -> Self {
        let mut count = 1;
        while 10usize.pow(count as u32 - 1) <= radius {
            count += 1;
        }
        SparseRule::powers_of_ten(count, k)
    }

    pub fn k_at(&self, n: usize) -> usize {
        self.k[n.min(self.k.len() - 1)]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        if self.l.is_empty() || self.k.is_empty() {
            return bad("sparse rule needs at least one L and one k".into());
        }
        if self.l[0] == 0 || !self.l.windows(2).all(|w| w[0] < w[1]) {
            return bad("L must be positive and strictly increasing".into());
        }
        if self.k.iter().any(|&k| k < 2) {
            return bad("every k_n must exceed 1".into());
        }
        if self.c.len() + 1 != self.l.len() {
            return bad(format!(
                "expected {} cycle depths for {} branch depths",
                self.l.len() - 1,
                self.l.len()
            ));
        }
        let mut prev = (0usize, 0usize);
        for (n, &c) in self.c.iter().enumerate() {
            let (lo, hi) = (self.l[n], self.l[n + 1]);
            if c < lo || c > hi {
                return bad(format!("C_{} = {c} outside [{lo}, {hi}]", n + 1));
            }
            let gaps = (hi - c, c - lo);
            if gaps.0 < prev.0 || gaps.1 < prev.1 {
                return bad(format!("gaps around C_{} shrink", n + 1));
            }
            prev = gaps;
        }
        Ok(())
    }

    /// κ(j) for j >= 1.
    pub fn kappa(&self, j: usize) -> usize {
        match self.l.binary_search(&j) {
            Ok(n) => self.k_at(n),
            Err(_) => 1,
        }
    }

    /// #S_r for r = 0..=radius.
    pub fn sphere_sizes(&self, radius: usize) -> Vec<usize> {
        let mut s = Vec::with_capacity(radius + 1);
        s.push(1usize);
        for j in 1..=radius {
            let prev = s[j - 1];
            s.push(prev.saturating_mul(self.kappa(j)));
        }
        s
    }
}

/// `round((L_n + L_{n-1}) / 2)` with halves rounded up.
fn midpoints(l: &[usize]) -> Vec<usize> {
    l.windows(2).map(|w| (w[0] + w[1]).div_ceil(2)).collect()
}

struct SparseTree {
    rule: SparseRule,
    sizes: Vec<usize>,
    cycles: Vec<usize>,
}

impl InfiniteGraph for SparseTree {
    type Key = (usize, usize);

    fn root(&self) -> (usize, usize) {
        (0, 0)
    }

    fn neighbors(&self, &(r, i): &(usize, usize)) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if r > 0 {
            out.push((r - 1, i / self.rule.kappa(r)));
        }
        let kids = self.rule.kappa(r + 1);
        out.extend((0..kids).map(|j| (r + 1, i * kids + j)));
        if self.cycles.binary_search(&r).is_ok() {
            let m = self.sizes[r];
            out.push((r, (i + m - 1) % m));
            out.push((r, (i + 1) % m));
        }
        out
    }

    fn degree_bound(&self) -> usize {
        let kmax = self.rule.k.iter().copied().max().unwrap_or(1);
        kmax + 3
    }
}

fn sparse_tree_cycles(
    rule: &SparseRule,
    radius: usize,
    budget: usize,
) -> Result<(RootedGraph, serde_json::Value)> {
    rule.validate()?;
    let sizes = rule.sphere_sizes(radius + 1);
    let total: usize = sizes[..=radius].iter().fold(0usize, |a, &s| a.saturating_add(s));
    if total > budget {
        return Err(Error::VertexBudget {
            requested: total,
            budget,
        });
    }
    let mut cycles = Vec::new();
    let mut skipped = Vec::new();
    for &c in rule.c.iter().filter(|&&c| c <= radius) {
        if sizes[c] >= 3 {
            cycles.push(c);
        } else {
            skipped.push(c);
        }
    }
    let tree = SparseTree {
        rule: rule.clone(),
        sizes: sizes.clone(),
        cycles: cycles.clone(),
    };
    let t = truncate_ball(&tree, radius, budget)?;
    let extra = json!({
        "cycle_depths": cycles,
        "skipped_cycle_depths": skipped,
        "cycle_order": "breadth-first discovery order",
        "sphere_sizes": &sizes[..=radius],
    });
    Ok((t.graph, extra))
}

/// A finite block spliced into the half-line through two attach vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainBlock {
    pub adjacency: Vec<Vec<usize>>,
    pub attach: [usize; 2],
}

impl ChainBlock {
    pub fn validate(&self) -> Result<()> {
        let n = self.adjacency.len();
        if n == 0 {
            return Err(Error::MalformedBlock("empty block".into()));
        }
        if self.attach.iter().any(|&a| a >= n) {
            return Err(Error::MalformedBlock(format!(
                "attach vertices {:?} outside block of {n} vertices",
                self.attach
            )));
        }
        RootedGraph::new(
            self.adjacency.clone(),
            0,
            vec![0.0; n],
            usize::MAX,
            vec![false; n],
            serde_json::Value::Null,
        )
        .map(|_| ())
        .map_err(|e| Error::MalformedBlock(e.to_string()))
    }

    fn max_degree(&self) -> usize {
        self.adjacency
            .iter()
            .enumerate()
            .map(|(v, nb)| nb.len() + self.attach.iter().filter(|&&a| a == v).count())
            .max()
            .unwrap_or(0)
    }

    /// The ball of radius `radius` in the d-regular tree, attached at the
    /// lexicographically first pair of vertices at maximal distance.
    pub fn tree_ball(d: usize, radius: usize) -> Result<ChainBlock> {
        let t = if radius == 0 {
            return Ok(ChainBlock {
                adjacency: vec![Vec::new()],
                attach: [0, 0],
            });
        } else {
            truncate_ball(&RegularTree { d }, radius, DEFAULT_VERTEX_BUDGET)?
        };
        let g = t.graph;
        let n = g.vertex_count();
        let mut best: Option<(usize, [usize; 2])> = None;
        for a in 0..n {
            let dist = g.bfs_layers(a)?;
            for b in a + 1..n {
                let dab = dist.distance(b).expect("connected");
                if best.is_none_or(|(d0, _)| dab > d0) {
                    best = Some((dab, [a, b]));
                }
            }
        }
        let (_, attach) = best.unwrap_or((0, [0, 0]));
        Ok(ChainBlock {
            adjacency: g.adjacency().to_vec(),
            attach,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainKey {
    Backbone(usize),
    /// Block number (0-based into the position list) and vertex within it.
    Block(usize, usize),
}

struct Chain {
    blocks: Vec<ChainBlock>,
    positions: Vec<usize>,
}

impl Chain {
    fn block_at(&self, k: usize) -> Option<usize> {
        self.positions.binary_search(&k).ok()
    }

    /// The vertex that takes the place of backbone vertex `k` on the side
    /// facing `k + 1` (`towards_next`) or `k - 1`.
    fn backbone_end(&self, k: usize, towards_next: bool) -> ChainKey {
        match self.block_at(k) {
            Some(b) => ChainKey::Block(b, self.blocks[b].attach[usize::from(towards_next)]),
            None => ChainKey::Backbone(k),
        }
    }
}

impl InfiniteGraph for Chain {
    type Key = ChainKey;

    fn root(&self) -> ChainKey {
        ChainKey::Backbone(1)
    }

    fn neighbors(&self, key: &ChainKey) -> Vec<ChainKey> {
        match *key {
            ChainKey::Backbone(k) => {
                let mut out = Vec::with_capacity(2);
                if k > 1 {
                    out.push(self.backbone_end(k - 1, true));
                }
                out.push(self.backbone_end(k + 1, false));
                out
            }
            ChainKey::Block(b, u) => {
                let block = &self.blocks[b];
                let k = self.positions[b];
                let mut out: Vec<ChainKey> =
                    block.adjacency[u].iter().map(|&w| ChainKey::Block(b, w)).collect();
                if u == block.attach[0] {
                    out.push(self.backbone_end(k - 1, true));
                }
                if u == block.attach[1] {
                    out.push(self.backbone_end(k + 1, false));
                }
                out
            }
        }
    }

    fn degree_bound(&self) -> usize {
        self.blocks
            .iter()
            .map(ChainBlock::max_degree)
            .max()
            .unwrap_or(0)
            .max(2)
    }
}

fn chain_graph(
    blocks: Vec<ChainBlock>,
    positions: Vec<usize>,
    radius: usize,
    budget: usize,
) -> Result<(RootedGraph, serde_json::Value)> {
    if blocks.len() != positions.len() {
        return Err(Error::InvalidParameters(format!(
            "{} blocks for {} positions",
            blocks.len(),
            positions.len()
        )));
    }
    if !positions.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameters("positions must be strictly increasing".into()));
    }
    if positions.first().is_some_and(|&p| p < 2) {
        return Err(Error::InvalidParameters(
            "positions must be >= 2 so the root stays on the backbone".into(),
        ));
    }
    for b in &blocks {
        b.validate()?;
    }
    let chain = Chain { blocks, positions };
    let t = truncate_ball(&chain, radius, budget)?;
    let mut labels = serde_json::Map::new();
    labels.insert("root".into(), json!(0));
    for (b, block) in chain.blocks.iter().enumerate() {
        for (side, &a) in block.attach.iter().enumerate() {
            if let Some(&v) = t.index.get(&ChainKey::Block(b, a)) {
                labels.insert(format!("v{}_{}", side + 1, b + 1), json!(v));
            }
        }
        if let Some(&v) = t.index.get(&ChainKey::Block(b, 0)) {
            labels.insert(format!("block_{}", b + 1), json!(v));
        }
    }
    Ok((t.graph, json!({ "labels": labels, "positions": chain.positions })))
}

fn g_d(d: usize, radius: usize, budget: usize) -> Result<(RootedGraph, serde_json::Value)> {
    if d < 3 {
        return Err(Error::InvalidParameters("G^d needs d >= 3".into()));
    }
    let mut blocks = Vec::new();
    let mut positions = Vec::new();
    for l in 1usize.. {
        let Some(p) = d.checked_pow(l as u32 + 1) else { break };
        if p > radius + 1 {
            break;
        }
        blocks.push(ChainBlock::tree_ball(d, l)?);
        positions.push(p);
    }
    let (g, mut extra) = chain_graph(blocks, positions, radius, budget)?;
    extra["block_radii"] = json!((1..=extra["positions"].as_array().map_or(0, Vec::len)).collect::<Vec<_>>());
    Ok((g, extra))
}
