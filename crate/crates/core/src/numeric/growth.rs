//! Growth diagnostics for generalized eigenfunctions.

use serde::{Deserialize, Serialize};

use super::eigen::{eig_matrix, EigenConfig};
use crate::error::{Error, Result};
use crate::graph::{GrowthProfile, RootedGraph};
use crate::operator::SchrodingerOp;

/// `ω(v) = 1 / ((|v| + 1) · √#S_{|v|})`; its squared ℓ²-norm over the
/// spheres up to `K` is `Σ_{k<=K} 1/(k+1)²`.
pub fn omega_weight(g: &RootedGraph) -> Vec<f64> {
    let dist = g.root_distances();
    let mut sphere = vec![0usize; dist.iter().copied().max().unwrap_or(0) + 1];
    for &d in &dist {
        sphere[d] += 1;
    }
    dist.iter()
        .map(|&d| 1.0 / ((d as f64 + 1.0) * (sphere[d] as f64).sqrt()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub k: usize,
    /// `q[ℓ − 1] = max |ψ(u)|` over `ℓ(k−1) <= |u| < ℓk`.
    pub q: Vec<f64>,
    /// `max_ℓ q_ℓ^{1/ℓ}`.
    pub max_root: f64,
    /// `exp` of the least-squares slope of `ln q_ℓ` against `ℓ` over the
    /// upper half of the annuli, floored at 1.
    pub rate: f64,
    pub tolerance: f64,
    pub sub_exponential: bool,
}

pub const DEFAULT_RATE_TOL: f64 = 0.05;

pub fn growth_envelope(psi: &[f64], g: &RootedGraph, k: usize, tol: f64) -> Result<GrowthEnvelope> {
    if k < 2 {
        return Err(Error::InvalidParameters("annulus parameter k must be >= 2".into()));
    }
    if psi.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: psi.len(),
        });
    }
    let dist = g.root_distances();
    let depth = dist.iter().copied().max().unwrap_or(0);
    let mut layer_max = vec![0.0f64; depth + 1];
    for (v, &d) in dist.iter().enumerate() {
        layer_max[d] = layer_max[d].max(psi[v].abs());
    }
    let mut q = Vec::new();
    let mut l = 1;
    while l * k - 1 <= depth {
        let lo = l * (k - 1);
        let hi = l * k;
        q.push(layer_max[lo..hi].iter().copied().fold(0.0, f64::max));
        l += 1;
    }
    let max_root = q
        .iter()
        .enumerate()
        .map(|(i, &x)| x.powf(1.0 / (i + 1) as f64))
        .fold(0.0, f64::max);
    let tail = q.len() / 2;
    let pts: Vec<(f64, f64)> = q
        .iter()
        .enumerate()
        .skip(tail)
        .map(|(i, &x)| ((i + 1) as f64, x.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let rate = slope.max(0.0).exp();
    Ok(GrowthEnvelope {
        k,
        q,
        max_root,
        rate,
        tolerance: tol,
        sub_exponential: rate <= 1.0 + tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShnolConfig {
    pub k: usize,
    pub rate_tol: f64,
    /// Relative residual `‖(H − λ)ψ‖ / ‖ψ‖` over non-boundary vertices.
    pub residual_tol: f64,
    pub distance_tol: f64,
    pub eigen: EigenConfig,
}

impl Default for ShnolConfig {
    fn default() -> Self {
        ShnolConfig {
            k: 2,
            rate_tol: DEFAULT_RATE_TOL,
            residual_tol: 1e-8,
            distance_tol: 0.1,
            eigen: EigenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShnolReport {
    pub lambda: f64,
    pub envelope: GrowthEnvelope,
    pub relative_residual: f64,
    /// Distance from `λ` to the spectrum of the whole-graph truncation.
    pub distance_to_truncated_spectrum: f64,
    pub graph_growth: GrowthProfile,
    pub consistent: bool,
    pub notes: Vec<String>,
}

/// Advisory check of the Shnol direction: a sub-exponentially bounded
/// solution of `Hψ = λψ` should have `λ` near the truncated spectrum.
pub fn shnol_check(h: &SchrodingerOp, psi: &[f64], lambda: f64, cfg: &ShnolConfig) -> Result<ShnolReport> {
    let g = h.graph();
    let envelope = growth_envelope(psi, g, cfg.k, cfg.rate_tol)?;
    let applied = h.apply(psi)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (v, hv) in applied.iter().enumerate() {
        if let Some(x) = hv {
            num += (x - lambda * psi[v]).powi(2);
            den += psi[v] * psi[v];
        }
    }
    let relative_residual = if den > 0.0 { (num / den).sqrt() } else { f64::INFINITY };
    let m = h.truncate_all()?;
    if m.dim() > cfg.eigen.dense_cap {
        return Err(Error::InvalidParameters(format!(
            "whole-graph truncation of dimension {} exceeds the dense cap",
            m.dim()
        )));
    }
    let eig = eig_matrix(&m, &cfg.eigen, false)?;
    let distance = eig
        .values
        .iter()
        .map(|&e| (e - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    let depth = g.root_distances().into_iter().max().unwrap_or(0);
    let reliable = (0..=depth)
        .take_while(|&r| g.ball_is_reliable(g.root(), r))
        .last()
        .unwrap_or(0);
    let graph_growth = g.growth_profile(reliable)?;
    let mut notes = Vec::new();
    if !envelope.sub_exponential {
        notes.push(format!("ψ grows exponentially (rate {:.4})", envelope.rate));
    }
    if relative_residual > cfg.residual_tol {
        notes.push(format!("ψ is not a solution (relative residual {relative_residual:.3e})"));
    }
    if distance > cfg.distance_tol {
        notes.push(format!(
            "λ is {distance:.4} away from the truncated spectrum; graph ball growth rate {:.4}",
            graph_growth.final_rate
        ));
    }
    Ok(ShnolReport {
        lambda,
        consistent: notes.is_empty(),
        envelope,
        relative_residual,
        distance_to_truncated_spectrum: distance,
        graph_growth,
        notes,
    })
}
