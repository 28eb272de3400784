use serde::{Deserialize, Serialize};

use super::eigen::{EigenMode, Eigenpairs};
use crate::analytic::SpectralSet;
use crate::operator::TruncatedMatrix;

pub const DEFAULT_BOUNDARY_TAU: f64 = 0.05;

/// Keeps eigenpairs whose squared mass on the outermost layer is at most
/// `tau`. Without eigenvectors every pair is kept.
pub fn boundary_filter(pairs: &Eigenpairs, m: &TruncatedMatrix, tau: f64) -> Vec<bool> {
    let Some(vectors) = &pairs.vectors else {
        return vec![true; pairs.values.len()];
    };
    let outer = m.outer_layer();
    vectors
        .iter()
        .map(|x| {
            let total: f64 = x.iter().map(|v| v * v).sum();
            let edge: f64 = outer.iter().map(|&i| x[i] * x[i]).sum();
            edge <= tau * total
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub kept: Vec<bool>,
    pub predicted: SpectralSet,
    /// `max` over kept eigenvalues of the distance to `predicted`.
    pub directed_hausdorff: f64,
    /// Longest stretch of an interval of `predicted` without kept
    /// eigenvalues; `None` when only extremal eigenvalues are known.
    pub coverage_gap: Option<f64>,
    /// Isolated points of `predicted` with no kept eigenvalue within `delta`.
    pub uncovered_points: Vec<f64>,
    pub delta: f64,
    pub mode: EigenMode,
}

impl SpectralReport {
    pub fn kept_values(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.kept)
            .filter(|(_, &k)| k)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn kept_count(&self) -> usize {
        self.kept.iter().filter(|&&k| k).count()
    }
}

pub fn hausdorff_report(
    eigenvalues: &[f64],
    kept: &[bool],
    predicted: &SpectralSet,
    delta: f64,
    mode: EigenMode,
) -> SpectralReport {
    assert!(delta > 0.0, "resolution must be positive");
    assert_eq!(eigenvalues.len(), kept.len());
    let mut values: Vec<f64> = eigenvalues
        .iter()
        .zip(kept)
        .filter(|(_, &k)| k)
        .map(|(&v, _)| v)
        .collect();
    values.sort_by(f64::total_cmp);
    let directed = values
        .iter()
        .map(|&v| predicted.distance(v))
        .fold(0.0, f64::max);
    let coverage_gap = (mode == EigenMode::Dense).then(|| {
        predicted
            .intervals()
            .iter()
            .map(|&[a, b]| {
                let mut marks = vec![a];
                marks.extend(values.iter().copied().filter(|&v| v > a && v < b));
                marks.push(b);
                marks.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    });
    let uncovered_points = predicted
        .points()
        .iter()
        .copied()
        .filter(|&p| !values.iter().any(|&v| (v - p).abs() <= delta))
        .collect();
    SpectralReport {
        eigenvalues: eigenvalues.to_vec(),
        kept: kept.to_vec(),
        predicted: predicted.clone(),
        directed_hausdorff: directed,
        coverage_gap,
        uncovered_points,
        delta,
        mode,
    }
}
