use std::path::{Path, PathBuf};

use esspec::generators::GeneratorSpec;
use esspec::numeric::{EigenConfig, WitnessConfig, DEFAULT_BOUNDARY_TAU};
use esspec::operator::PotentialMode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Generate,
    Spectrum,
    Rlimits,
    Predict,
    Verify,
    Plotdata,
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Spectrum => "spectrum",
            Command::Rlimits => "rlimits",
            Command::Predict => "predict",
            Command::Verify => "verify",
            Command::Plotdata => "plotdata",
            Command::Demo => "demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    /// `k, #B_k` for the graph root.
    Growth,
    /// Eigenvalue counts per bin from a spectrum or verify report.
    Histogram,
    /// `|v|, |ψ(v)|` for every witness in a verify or demo report.
    Witness,
    /// Sampled indicator of a predicted set.
    Indicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Boundary filter: largest admissible squared mass on the outer layer.
    pub tau: f64,
    /// Resolution for coverage and isolated points.
    pub delta: f64,
    /// Witness residual per unknown.
    pub eps_res: f64,
    pub sup_cap: f64,
    /// Signature quantization step.
    pub quantization: f64,
    /// Largest directed Hausdorff distance accepted by `verify`.
    pub hausdorff: f64,
    /// Largest coverage gap accepted by `verify`; unchecked when absent or
    /// when only extremal eigenvalues are known.
    pub coverage: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        let w = WitnessConfig::default();
        Tolerances {
            tau: DEFAULT_BOUNDARY_TAU,
            delta: 0.05,
            eps_res: w.residual_factor,
            sup_cap: w.sup_cap,
            quantization: esspec::canon::DEFAULT_QUANTIZATION,
            hausdorff: 0.15,
            coverage: None,
        }
    }
}

impl Tolerances {
    pub fn witness(&self) -> WitnessConfig {
        WitnessConfig {
            residual_factor: self.eps_res,
            sup_cap: self.sup_cap,
            ..WitnessConfig::default()
        }
    }
}

/// Everything a pipeline stage depends on. Two runs of the same job write
/// byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    /// Input graph file.
    #[serde(default)]
    pub graph: Option<PathBuf>,
    /// Class report (`predict`, witness source for `verify`).
    #[serde(default)]
    pub classes: Option<PathBuf>,
    /// Prediction file for `spectrum` and `verify`.
    #[serde(default)]
    pub prediction: Option<PathBuf>,
    /// Report read by `plotdata`.
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub mode: PotentialMode,
    /// Vertex index or generator label; the graph root when absent.
    #[serde(default)]
    pub center: Option<String>,
    /// Truncation radius; the whole generated graph when absent.
    #[serde(default)]
    pub radius: Option<usize>,
    /// `R` for limit classes and for the demo's tree witnesses.
    #[serde(default)]
    pub rlimit_radius: Option<usize>,
    #[serde(default)]
    pub d_min: Option<usize>,
    #[serde(default)]
    pub min_witnesses: Option<usize>,
    #[serde(default)]
    pub witness_lambdas: Vec<f64>,
    /// Family whose class representative carries the witnesses.
    #[serde(default)]
    pub witness_family: Option<String>,
    #[serde(default)]
    pub witness_radius: Option<usize>,
    #[serde(default)]
    pub plot: Option<PlotKind>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub eigen: EigenConfig,
    pub output: PathBuf,
}

fn default_bins() -> usize {
    64
}

impl JobConfig {
    pub fn new(command: Command, output: impl Into<PathBuf>) -> Self {
        JobConfig {
            command,
            generator: None,
            graph: None,
            classes: None,
            prediction: None,
            report: None,
            mode: PotentialMode::default(),
            center: None,
            radius: None,
            rlimit_radius: None,
            d_min: None,
            min_witnesses: None,
            witness_lambdas: Vec::new(),
            witness_family: None,
            witness_radius: None,
            plot: None,
            bins: default_bins(),
            tolerances: Tolerances::default(),
            eigen: EigenConfig::default(),
            output: output.into(),
        }
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
