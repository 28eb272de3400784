//! The chain graph `G^d`: its spectrum stays inside `[−2√(d−1), 2√(d−1)]`
//! while its `T_d` limit carries bounded eigenfunctions at `λ = ±d`.

use serde::{Deserialize, Serialize};

use super::eigen::{eig_matrix, EigenConfig};
use super::witness::{sigma_infty_witness, WitnessConfig, WitnessResult, WitnessVerdict};
use crate::analytic::{FamilyTag, SpectralSet};
use crate::error::{Error, Result};
use crate::generators::make_g_d;
use crate::graph::GrowthProfile;
use crate::operator::{PotentialMode, SchrodingerOp};
use crate::rlimit::{enumerate_classes, RLimitConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub d: usize,
    /// Generation radius of `G^d`.
    pub radius: usize,
    pub rlimit: RLimitConfig,
    /// Slack allowed above `2√(d−1)` for the truncated spectral radius.
    pub epsilon: f64,
    pub eigen: EigenConfig,
    pub witness: WitnessConfig,
}

impl DemoConfig {
    pub fn new(d: usize, radius: usize) -> Self {
        DemoConfig {
            d,
            radius,
            rlimit: RLimitConfig::new(2).with_d_min(12),
            epsilon: 0.05,
            eigen: EigenConfig::default(),
            witness: WitnessConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictInclusionReport {
    pub d: usize,
    pub radius: usize,
    pub vertex_count: usize,
    pub growth: GrowthProfile,
    /// `k >= 2` with `#B_k >= 2k`; `k = 1` is exempt since `#B_1 = 2`.
    pub growth_violations: Vec<usize>,
    pub spectral_radius: f64,
    pub tree_bound: f64,
    pub within_tree_bound: bool,
    pub class_tags: Vec<FamilyTag>,
    pub tree_class_witnesses: usize,
    pub witnesses: Vec<WitnessResult>,
    /// `[−d, d] \ [−2√(d−1), 2√(d−1)]`, realised as the two closed side intervals.
    pub gap: SpectralSet,
    pub passed: bool,
}

pub fn strict_inclusion_demo(cfg: &DemoConfig) -> Result<StrictInclusionReport> {
    let d = cfg.d;
    if d < 3 {
        return Err(Error::InvalidParameters("the demo needs d >= 3".into()));
    }
    let g = make_g_d(d, cfg.radius)?;
    let growth = g.growth_profile(cfg.radius)?;
    let growth_violations: Vec<usize> = growth
        .violations_of_linear_bound()
        .into_iter()
        .filter(|&k| k >= 2)
        .collect();

    let h = SchrodingerOp::assemble(&g, PotentialMode::Adjacency);
    let eig = eig_matrix(&h.truncate_all()?, &cfg.eigen, false)?;
    let spectral_radius = eig.spectral_radius();
    let tree_bound = 2.0 * ((d - 1) as f64).sqrt();

    let classes = enumerate_classes(&h, &cfg.rlimit)?;
    let class_tags = classes.tags();
    let tree = classes
        .classes
        .iter()
        .find(|c| c.family == FamilyTag::Tree(d))
        .ok_or_else(|| Error::Degenerate(format!("no tree({d}) class among {class_tags:?}")))?;
    let rep = SchrodingerOp::assemble(&tree.representative, tree.representative_mode);
    let dd = d as f64;
    let witnesses = [dd, -dd]
        .iter()
        .map(|&l| sigma_infty_witness(&rep, l, cfg.rlimit.radius, &cfg.witness))
        .collect::<Result<Vec<_>>>()?;

    let gap = SpectralSet::new(vec![[-dd, -tree_bound], [tree_bound, dd]], vec![]);
    let within_tree_bound = spectral_radius <= tree_bound + cfg.epsilon;
    let passed = growth_violations.is_empty()
        && within_tree_bound
        && witnesses.iter().all(|w| w.verdict == WitnessVerdict::Pass)
        && !gap.is_empty();
    Ok(StrictInclusionReport {
        d,
        radius: cfg.radius,
        vertex_count: g.vertex_count(),
        growth,
        growth_violations,
        spectral_radius,
        tree_bound,
        within_tree_bound,
        class_tags,
        tree_class_witnesses: tree.witnesses.len(),
        witnesses,
        gap,
        passed,
    })
}
