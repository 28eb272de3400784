//! Bounded generalized eigenfunctions on a finite ball, found by least
//! squares on the interior equations with the root value pinned to 1.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::operator::SchrodingerOp;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// Residual threshold per unknown: PASS needs `residual <= factor · dim`.
    pub residual_factor: f64,
    pub sup_cap: f64,
    /// Ridge parameters tried when the minimum-norm solution fails.
    pub ridge_sweep: Vec<f64>,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            residual_factor: 1e-6,
            sup_cap: 1e3,
            ridge_sweep: (-8..=2).map(|e| 10f64.powi(e)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVerdict {
    Pass,
    FailUnbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub lambda: f64,
    pub radius: usize,
    pub root: Vertex,
    /// Vertices of `B_R(root)` in ball order; `psi[i]` lives on `vertices[i]`.
    pub vertices: Vec<Vertex>,
    pub distances: Vec<usize>,
    pub psi: Vec<f64>,
    /// `‖P_{root,R−1}(Hψ − λψ)‖₂`.
    pub residual: f64,
    pub sup_norm: f64,
    pub residual_threshold: f64,
    pub sup_cap: f64,
    /// Ridge parameter of the reported solution; 0 for minimum norm.
    pub ridge: f64,
    pub verdict: WitnessVerdict,
}

impl WitnessResult {
    /// `ψ` extended by zero to the whole graph.
    pub fn extended(&self, vertex_count: usize) -> Vec<f64> {
        let mut full = vec![0.0; vertex_count];
        for (&v, &x) in self.vertices.iter().zip(&self.psi) {
            full[v] = x;
        }
        full
    }

    /// `(|v|, |ψ(v)|)` pairs for plotting.
    pub fn profile(&self) -> Vec<(usize, f64)> {
        self.distances
            .iter()
            .zip(&self.psi)
            .map(|(&d, &x)| (d, x.abs()))
            .collect()
    }
}

struct Candidate {
    psi: Vec<f64>,
    residual: f64,
    sup: f64,
    ridge: f64,
}

/// Searches for `ψ` on `B_R(root)` with `ψ(root) = 1` and `Hψ = λψ` on
/// `B_{R−1}(root)`, where `root` is the root of `h`'s graph.
pub fn sigma_infty_witness(
    h: &SchrodingerOp,
    lambda: f64,
    radius: usize,
    cfg: &WitnessConfig,
) -> Result<WitnessResult> {
    if radius == 0 {
        return Err(Error::InvalidParameters("witness radius must be positive".into()));
    }
    let g = h.graph();
    let root = g.root();
    let ball = g.ball(root, radius)?;
    let n = ball.len();
    if n < 2 {
        return Err(Error::Degenerate("ball has a single vertex".into()));
    }
    let local = ball.local_adjacency();
    let interior: Vec<usize> = (0..n).filter(|&i| ball.distances[i] < radius).collect();
    // Unknowns are ψ at positions 1..n; position 0 is the root.
    let rows = interior.len();
    let cols = n - 1;
    let mut a = Mat::<f64>::zeros(rows, cols);
    let mut b = vec![0.0; rows];
    for (row, &i) in interior.iter().enumerate() {
        let d = h.diagonal(ball.vertices[i])? - lambda;
        let mut put = |j: usize, c: f64| {
            if j == 0 {
                b[row] -= c;
            } else {
                a[(row, j - 1)] += c;
            }
        };
        put(i, d);
        for &j in &local[i] {
            put(j, 1.0);
        }
    }
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Degenerate(format!("SVD failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = s.nrows();
    let smax = (0..k).map(|i| s[i]).fold(0.0, f64::max);
    let cutoff = smax * (rows.max(cols) as f64) * f64::EPSILON;
    let utb: Vec<f64> = (0..k)
        .map(|i| (0..rows).map(|r| u[(r, i)] * b[r]).sum())
        .collect();
    let solve = |filter: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let mut psi = vec![0.0; n];
        psi[0] = 1.0;
        for i in 0..k {
            let w = filter(s[i]) * utb[i];
            if w != 0.0 {
                for c in 0..cols {
                    psi[c + 1] += v[(c, i)] * w;
                }
            }
        }
        psi
    };
    let evaluate = |psi: Vec<f64>, ridge: f64| -> Result<Candidate> {
        let full = {
            let mut f = vec![0.0; g.vertex_count()];
            for (&vx, &x) in ball.vertices.iter().zip(&psi) {
                f[vx] = x;
            }
            f
        };
        let residual = h.residual(&full, lambda, root, radius - 1)?;
        let sup = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Candidate {
            psi,
            residual,
            sup,
            ridge,
        })
    };
    let threshold = cfg.residual_factor * n as f64;
    let finish = |c: Candidate, verdict: WitnessVerdict| WitnessResult {
        lambda,
        radius,
        root,
        vertices: ball.vertices.clone(),
        distances: ball.distances.clone(),
        psi: c.psi,
        residual: c.residual,
        sup_norm: c.sup,
        residual_threshold: threshold,
        sup_cap: cfg.sup_cap,
        ridge: c.ridge,
        verdict,
    };
    let passes = |c: &Candidate| c.residual <= threshold && c.sup <= cfg.sup_cap;

    let min_norm = evaluate(
        solve(&|sv| if sv > cutoff { 1.0 / sv } else { 0.0 }),
        0.0,
    )?;
    if passes(&min_norm) {
        return Ok(finish(min_norm, WitnessVerdict::Pass));
    }
    let mut near = Vec::new();
    if min_norm.residual <= threshold {
        near.push(min_norm);
    }
    let mut fallback: Option<Candidate> = None;
    for &mu in &cfg.ridge_sweep {
        let c = evaluate(solve(&|sv| sv / (sv * sv + mu)), mu)?;
        if passes(&c) {
            return Ok(finish(c, WitnessVerdict::Pass));
        }
        if c.residual <= threshold {
            near.push(c);
        } else if fallback.as_ref().is_none_or(|f| c.residual < f.residual) {
            fallback = Some(c);
        }
    }
    if !near.is_empty() {
        let best = near
            .into_iter()
            .min_by(|x, y| x.sup.total_cmp(&y.sup))
            .expect("non-empty");
        return Ok(finish(best, WitnessVerdict::FailUnbounded));
    }
    Ok(finish(fallback.expect("sweep is non-empty"), WitnessVerdict::Inconclusive))
}
