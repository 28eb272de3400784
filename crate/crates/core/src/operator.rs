//! Schrödinger operators `(Hψ)(v) = Σ_{u∼v} (ψ(u) − ψ(v)) + W(v) ψ(v)` on
//! rooted graphs and their compressions to balls.

use std::io::Write;
use std::ops::{Add, Mul};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BallView, RootedGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMode {
    /// The potential stored in the graph.
    Explicit,
    /// `W ≡ 0`.
    Laplacian,
    /// `W = deg`, giving the adjacency operator.
    #[default]
    Adjacency,
}

impl std::str::FromStr for PotentialMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(PotentialMode::Explicit),
            "laplacian" => Ok(PotentialMode::Laplacian),
            "adjacency" => Ok(PotentialMode::Adjacency),
            other => Err(Error::InvalidParameters(format!("unknown operator mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PotentialMode::Explicit => "explicit",
            PotentialMode::Laplacian => "laplacian",
            PotentialMode::Adjacency => "adjacency",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SchrodingerOp<'g> {
    graph: &'g RootedGraph,
    mode: PotentialMode,
    potential: Vec<f64>,
}

impl<'g> SchrodingerOp<'g> {
    pub fn assemble(graph: &'g RootedGraph, mode: PotentialMode) -> Self {
        let potential = match mode {
            PotentialMode::Explicit => graph.potential().to_vec(),
            PotentialMode::Laplacian => vec![0.0; graph.vertex_count()],
            PotentialMode::Adjacency => (0..graph.vertex_count())
                .map(|v| graph.degree(v) as f64)
                .collect(),
        };
        SchrodingerOp {
            graph,
            mode,
            potential,
        }
    }

    pub fn graph(&self) -> &'g RootedGraph {
        self.graph
    }

    pub fn mode(&self) -> PotentialMode {
        self.mode
    }

    /// Effective potential `W`.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `W(v) − deg(v)`. Only defined where the full degree is known, except
    /// in adjacency mode where it vanishes identically.
    pub fn diagonal(&self, v: Vertex) -> Result<f64> {
        self.graph.check_vertex(v)?;
        match self.mode {
            PotentialMode::Adjacency => Ok(0.0),
            _ if self.graph.is_boundary(v) => Err(Error::UnknownDegree(v)),
            _ => Ok(self.potential[v] - self.graph.degree(v) as f64),
        }
    }

    pub fn sup_potential(&self) -> f64 {
        self.potential.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// `(Hψ)(v)`; refused at boundary vertices.
    pub fn apply_at<T>(&self, psi: &[T], v: Vertex) -> Result<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        self.graph.check_vertex(v)?;
        if psi.len() != self.graph.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: self.graph.vertex_count(),
                got: psi.len(),
            });
        }
        if self.graph.is_boundary(v) {
            return Err(Error::BoundaryEvaluation(v));
        }
        let d = self.potential[v] - self.graph.degree(v) as f64;
        Ok(self
            .graph
            .neighbors(v)
            .iter()
            .fold(psi[v] * d, |acc, &u| acc + psi[u]))
    }

    /// `Hψ` at every vertex, `None` where the vertex is boundary.
    pub fn apply<T>(&self, psi: &[T]) -> Result<Vec<Option<T>>>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        (0..self.graph.vertex_count())
            .map(|v| match self.apply_at(psi, v) {
                Ok(x) => Ok(Some(x)),
                Err(Error::BoundaryEvaluation(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect()
    }

    /// `P H P` for the ball of radius `r` around `center`.
    pub fn truncate(&self, center: Vertex, r: usize) -> Result<TruncatedMatrix> {
        let ball = self.graph.ball(center, r)?;
        self.compress(&ball)
    }

    /// `P H P` for an already extracted ball.
    pub fn compress(&self, ball: &BallView) -> Result<TruncatedMatrix> {
        let diagonal = ball
            .vertices
            .iter()
            .map(|&v| self.diagonal(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedMatrix {
            center: ball.center,
            radius: ball.radius,
            vertices: ball.vertices.clone(),
            distances: ball.distances.clone(),
            diagonal,
            neighbors: ball.local_adjacency(),
            outer: (0..ball.len())
                .filter(|&i| ball.distances[i] == ball.radius)
                .collect(),
            whole_graph: false,
        })
    }

    /// Compression onto every generated vertex, ordered by distance from the
    /// root. Boundary vertices are included, so outside adjacency mode this
    /// fails whenever the graph has a boundary.
    pub fn truncate_all(&self) -> Result<TruncatedMatrix> {
        let layers = self.graph.bfs_layers(self.graph.root())?;
        let radius = layers.layers.len() - 1;
        let ball = self.graph.ball_unchecked(self.graph.root(), radius);
        let mut m = self.compress(&ball)?;
        m.outer = (0..m.dim())
            .filter(|&i| self.graph.is_boundary(m.vertices[i]))
            .collect();
        m.whole_graph = true;
        Ok(m)
    }

    /// `‖P_{center,r}(Hψ − λψ)‖₂` for `ψ` given on the whole graph.
    pub fn residual(&self, psi: &[f64], lambda: f64, center: Vertex, r: usize) -> Result<f64> {
        let ball = self.graph.ball(center, r + 1)?;
        let mut sum = 0.0;
        for (&v, &dv) in ball.vertices.iter().zip(&ball.distances) {
            if dv > r {
                break;
            }
            let e = self.apply_at(psi, v)? - lambda * psi[v];
            sum += e * e;
        }
        Ok(sum.sqrt())
    }
}

/// Compression of `H` to a finite vertex set, stored sparsely. Row `i`
/// corresponds to graph vertex `vertices[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    pub center: Vertex,
    pub radius: usize,
    pub vertices: Vec<Vertex>,
    pub distances: Vec<usize>,
    pub diagonal: Vec<f64>,
    pub neighbors: Vec<Vec<usize>>,
    /// Local indices of the outermost layer of a ball, or of the boundary
    /// vertices for a whole-graph compression.
    pub outer: Vec<usize>,
    /// Covers every generated vertex rather than a reliable ball.
    pub whole_graph: bool,
}

impl TruncatedMatrix {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diagonal[i]
        } else if self.neighbors[i].binary_search(&j).is_ok() {
            1.0
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.neighbors[i]
                .iter()
                .fold(self.diagonal[i] * x[i], |acc, &j| acc + x[j]);
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diagonal[i];
            for &j in &self.neighbors[i] {
                a[i * n + j] = 1.0;
            }
        }
        a
    }

    pub fn outer_layer(&self) -> &[usize] {
        &self.outer
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = self.neighbors[i].len() as f64;
            (lo.min(self.diagonal[i] - r), hi.max(self.diagonal[i] + r))
        })
    }

    /// Binary layout: magic `ESTM0001`, then little-endian `u64` dimension,
    /// centre and radius, the `u64` index map and the row-major `f64` matrix.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"ESTM0001")?;
        for x in [self.dim(), self.center, self.radius] {
            w.write_all(&(x as u64).to_le_bytes())?;
        }
        for &v in &self.vertices {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        let n = self.dim();
        let mut row = vec![0u8; 8 * n];
        for i in 0..n {
            for j in 0..n {
                row[8 * j..8 * j + 8].copy_from_slice(&self.entry(i, j).to_le_bytes());
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    pub fn read_binary(bytes: &[u8]) -> Result<(Vec<Vertex>, usize, usize, Vec<f64>)> {
        let bad = || Error::InvalidParameters("malformed truncated-matrix file".into());
        if bytes.len() < 32 || &bytes[..8] != b"ESTM0001" {
            return Err(bad());
        }
        let word = |k: usize| -> usize {
            u64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes")) as usize
        };
        let (n, center, radius) = (word(0), word(1), word(2));
        if bytes.len() != 32 + 8 * n + 8 * n * n {
            return Err(bad());
        }
        let vertices = (0..n).map(|k| word(3 + k)).collect();
        let base = 32 + 8 * n;
        let a = bytes[base..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok((vertices, center, radius, a))
    }

    /// Header row `vertex,<vertices...>`, then one row per vertex.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        writeln!(w, "vertex,{}", header.join(","))?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(w, "{},{}", self.vertices[i], row.join(","))?;
        }
        Ok(())
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_binary(std::io::BufWriter::new(f))
    }
}
