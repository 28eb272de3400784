//! Canonical encodings of rooted balls.
//!
//! Two balls receive the same [`BallSignature`] iff a root-preserving graph
//! isomorphism maps one onto the other and matches the per-vertex values
//! after rounding to the quantization step.
//!
//! Trees are encoded with the classical bottom-up sorted-children encoding.
//! Everything else goes through colour refinement followed by an
//! individualization/refinement search that returns the lexicographically
//! smallest adjacency code; automorphisms detected at the leaves cut the
//! search back to the branching node they prove redundant.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::BallView;

pub const DEFAULT_QUANTIZATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BallSignature {
    pub radius: usize,
    #[serde(with = "hex_bytes")]
    pub bytes: Vec<u8>,
}

impl BallSignature {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.radius as u64).to_le_bytes());
        h.update(&self.bytes);
        to_hex(&h.finalize())
    }
}

pub(crate) fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_hex(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() % 2 != 0 {
            return Err(serde::de::Error::custom("odd hex length"));
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Rounds `x` to the nearest multiple of `q` and returns the multiple's index.
pub fn quantize(x: f64, q: f64) -> i64 {
    (x / q).round() as i64
}

/// Canonical signature of `ball` with per-vertex `values` (aligned with
/// `ball.vertices`) compared after quantization to step `q`.
pub fn canonical_signature(ball: &BallView, values: &[f64], q: f64) -> BallSignature {
    assert!(q > 0.0, "quantization step must be positive");
    assert_eq!(values.len(), ball.len(), "one value per ball vertex");
    let labels: Vec<i64> = values.iter().map(|&x| quantize(x, q)).collect();
    let adj = ball.local_adjacency();
    let bytes = canonical_code(&adj, 0, &labels);
    BallSignature {
        radius: ball.radius,
        bytes,
    }
}

/// Canonical byte code of the connected rooted labelled graph `(adj, root, labels)`.
pub fn canonical_code(adj: &[Vec<usize>], root: usize, labels: &[i64]) -> Vec<u8> {
    let n = adj.len();
    let m: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
    let mut out = Vec::with_capacity(16 + 9 * n);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    if n > 0 && m + 1 == n {
        out.push(b'T');
        out.extend(tree_code(adj, root, labels));
    } else {
        out.push(b'G');
        out.extend(search_code(adj, root, labels));
    }
    out
}

fn tree_code(adj: &[Vec<usize>], root: usize, labels: &[i64]) -> Vec<u8> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    parent[root] = root;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &u in &adj[v] {
            if parent[u] == usize::MAX {
                parent[u] = v;
                stack.push(u);
            }
        }
    }
    let mut codes: Vec<Option<Vec<u8>>> = vec![None; n];
    for &v in order.iter().rev() {
        let mut children: Vec<Vec<u8>> = adj[v]
            .iter()
            .filter(|&&u| parent[u] == v && u != root)
            .map(|&u| codes[u].take().expect("child encoded before parent"))
            .collect();
        children.sort_unstable();
        let mut c = Vec::with_capacity(10 + children.iter().map(Vec::len).sum::<usize>());
        c.push(b'(');
        c.extend_from_slice(&labels[v].to_le_bytes());
        for ch in children {
            c.extend(ch);
        }
        c.push(b')');
        codes[v] = Some(c);
    }
    codes[root].take().unwrap_or_default()
}

/// Ordered partition encoded as a colour per vertex; colours are
/// `0..k` and their order is part of the canonical structure.
type Colouring = Vec<u32>;

fn rank_keys<K: Ord + Clone>(keys: &[K]) -> (Colouring, usize) {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let colours = keys
        .iter()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect();
    (colours, sorted.len())
}

fn refine(adj: &[Vec<usize>], mut colours: Colouring) -> Colouring {
    let mut count = count_colours(&colours);
    loop {
        let keys: Vec<(u32, Vec<u32>)> = (0..adj.len())
            .map(|v| {
                let mut nb: Vec<u32> = adj[v].iter().map(|&u| colours[u]).collect();
                nb.sort_unstable();
                (colours[v], nb)
            })
            .collect();
        let (next, k) = rank_keys(&keys);
        colours = next;
        if k == count {
            return colours;
        }
        count = k;
    }
}

fn count_colours(c: &Colouring) -> usize {
    let mut s = c.clone();
    s.sort_unstable();
    s.dedup();
    s.len()
}

fn individualize(colours: &Colouring, v: usize) -> Colouring {
    let keys: Vec<(u32, bool)> = colours
        .iter()
        .enumerate()
        .map(|(u, &c)| (c, u != v))
        .collect();
    rank_keys(&keys).0
}

/// First (lowest-colour) cell with more than one vertex.
fn target_cell(colours: &Colouring) -> Option<Vec<usize>> {
    let n = colours.len();
    let mut sizes = vec![0usize; n];
    for &c in colours {
        sizes[c as usize] += 1;
    }
    let c = sizes.iter().position(|&s| s > 1)? as u32;
    Some((0..n).filter(|&v| colours[v] == c).collect())
}

fn leaf_code(adj: &[Vec<usize>], labels: &[i64], colours: &Colouring) -> Vec<u8> {
    let n = adj.len();
    let mut inv = vec![0usize; n];
    for (v, &c) in colours.iter().enumerate() {
        inv[c as usize] = v;
    }
    let mut out = Vec::with_capacity(n * 16);
    for &v in &inv {
        out.extend_from_slice(&labels[v].to_le_bytes());
        let mut nb: Vec<u32> = adj[v].iter().map(|&u| colours[u]).collect();
        nb.sort_unstable();
        out.extend_from_slice(&(nb.len() as u32).to_le_bytes());
        for c in nb {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    labels: &'a [i64],
    /// First leaf reached and the individualization path that produced it.
    first: Option<(Vec<u8>, Vec<usize>)>,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl<'a> Search<'a> {
    /// Explores the subtree below `colours` reached via `path`. Returns
    /// `Some(depth)` when an automorphism proves every remaining leaf below
    /// the node at `depth` equivalent to leaves already seen.
    fn explore(&mut self, colours: Colouring, path: &mut Vec<usize>) -> Option<usize> {
        let Some(cell) = target_cell(&colours) else {
            let code = leaf_code(self.adj, self.labels, &colours);
            return self.visit_leaf(code, path);
        };
        for &v in &cell {
            path.push(v);
            let child = refine(self.adj, individualize(&colours, v));
            let jump = self.explore(child, path);
            path.pop();
            if let Some(depth) = jump {
                if depth < path.len() {
                    return Some(depth);
                }
            }
        }
        None
    }

    fn visit_leaf(&mut self, code: Vec<u8>, path: &[usize]) -> Option<usize> {
        let common = |other: &[usize]| {
            other
                .iter()
                .zip(path)
                .take_while(|(a, b)| a == b)
                .count()
        };
        let Some((first_code, first_path)) = &self.first else {
            self.first = Some((code.clone(), path.to_vec()));
            self.best = Some((code, path.to_vec()));
            return None;
        };
        if *first_code == code {
            return Some(common(first_path));
        }
        let (best_code, best_path) = self.best.as_ref().expect("best set with first");
        match code.cmp(best_code) {
            Ordering::Less => {
                self.best = Some((code, path.to_vec()));
                None
            }
            Ordering::Equal => Some(common(best_path)),
            Ordering::Greater => None,
        }
    }
}

fn search_code(adj: &[Vec<usize>], root: usize, labels: &[i64]) -> Vec<u8> {
    let n = adj.len();
    let initial: Vec<(bool, i64)> = (0..n).map(|v| (v != root, labels[v])).collect();
    let colours = refine(adj, rank_keys(&initial).0);
    let mut search = Search {
        adj,
        labels,
        first: None,
        best: None,
    };
    search.explore(colours, &mut Vec::new());
    search.best.expect("at least one leaf").0
}
