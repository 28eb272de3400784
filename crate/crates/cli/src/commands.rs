use std::path::Path;

use anyhow::{anyhow, bail, Context};
use esspec::analytic::{FamilyTag, Prediction, SpectralSet};
use esspec::generators::GeneratorSpec;
use esspec::numeric::{
    boundary_filter, dense_eigen, hausdorff_report, lanczos_extremal, sigma_infty_witness,
    strict_inclusion_demo, DemoConfig, EigenMode, StrictInclusionReport, WitnessResult,
    WitnessVerdict,
};
use esspec::operator::{PotentialMode, SchrodingerOp};
use esspec::rlimit::{
    contraction_check, enumerate_classes, predict_from_classes, representative_graph, ClassReport,
    ContractionReport, RLimitConfig,
};
use esspec::{RootedGraph, Vertex};
use serde::{Deserialize, Serialize};

use crate::config::{Command, JobConfig, PlotKind};
use crate::output::{fmt_f64, read_result, sibling, write_json, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub family: String,
    pub vertices: usize,
    pub edges: usize,
    pub degree_bound: usize,
    /// Radii `k >= 1` with `#B_k >= 2k` up to the reliable radius.
    pub linear_growth_violations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub predicted: SpectralSet,
    pub source: String,
    pub directed_hausdorff: f64,
    pub coverage_gap: Option<f64>,
    pub uncovered_points: Vec<f64>,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub center: Vertex,
    pub radius: Option<usize>,
    pub mode: PotentialMode,
    pub dim: usize,
    pub eigen_mode: EigenMode,
    pub eigenvalues: Vec<f64>,
    pub kept: Vec<bool>,
    pub residuals: Vec<f64>,
    pub tau: f64,
    pub comparison: Option<Comparison>,
}

impl SpectrumResult {
    pub fn kept_values(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.kept)
            .filter(|(_, &k)| k)
            .map(|(&v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RlimitsResult {
    pub report: ClassReport,
    pub contraction: ContractionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResult {
    pub spectrum: SpectrumResult,
    pub hausdorff_tolerance: f64,
    pub coverage_tolerance: Option<f64>,
    /// Where the witnesses were searched: `graph` or a class family tag.
    pub witness_source: Option<String>,
    pub witnesses: Vec<WitnessResult>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Outcome of a job: the exit status and a one-line summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub summary: String,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Outcome {
            code: EXIT_OK,
            summary,
        }
    }
}

pub fn execute(job: &JobConfig) -> anyhow::Result<Outcome> {
    match job.command {
        Command::Generate => generate(job),
        Command::Spectrum => spectrum(job),
        Command::Rlimits => rlimits(job),
        Command::Predict => predict(job),
        Command::Verify => verify(job),
        Command::Plotdata => plotdata(job),
        Command::Demo => demo(job),
    }
}

fn load_graph(job: &JobConfig) -> anyhow::Result<RootedGraph> {
    if let Some(path) = &job.graph {
        return RootedGraph::read_json(path).with_context(|| format!("loading {}", path.display()));
    }
    if let Some(spec) = &job.generator {
        return Ok(spec.generate()?);
    }
    bail!("{} needs a graph or a generator", job.command.name())
}

fn resolve_center(g: &RootedGraph, center: Option<&str>) -> anyhow::Result<Vertex> {
    let Some(c) = center else {
        return Ok(g.root());
    };
    let v = match c.parse::<Vertex>() {
        Ok(v) => v,
        Err(_) => g
            .find_label(c)
            .ok_or_else(|| anyhow!("no vertex labelled {c:?}"))?,
    };
    g.check_vertex(v)?;
    Ok(v)
}

/// Largest `r` for which the root ball of radius `r` is reliable.
fn reliable_radius(g: &RootedGraph) -> usize {
    let dist = g.root_distances();
    let boundary = (0..g.vertex_count())
        .filter(|&v| g.is_boundary(v))
        .map(|v| dist[v])
        .min();
    boundary.unwrap_or_else(|| dist.iter().copied().max().unwrap_or(0))
}

fn generate(job: &JobConfig) -> anyhow::Result<Outcome> {
    let spec = job
        .generator
        .as_ref()
        .ok_or_else(|| anyhow!("generate needs a generator spec"))?;
    let mut g = spec.generate()?;
    let growth = g.growth_profile(reliable_radius(&g))?;
    let summary = GenerateSummary {
        family: spec.family().to_string(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        degree_bound: g.degree_bound(),
        linear_growth_violations: growth.violations_of_linear_bound(),
    };
    if let Some(meta) = g.meta_mut().as_object_mut() {
        meta.insert("version".into(), crate::output::version_string().into());
        meta.insert("job".into(), serde_json::to_value(job)?);
        meta.insert("summary".into(), serde_json::to_value(&summary)?);
    }
    crate::output::write_file(&job.output, &(g.to_json()? + "\n"))?;
    let v = &summary.linear_growth_violations;
    let growth_note = match v.len() {
        0 => "#B_k < 2k for every k".to_string(),
        n if n <= 5 => format!("#B_k >= 2k at k in {v:?}"),
        n => format!("#B_k >= 2k at {n} radii"),
    };
    Ok(Outcome::ok(format!(
        "{}: {} vertices, {} edges, {growth_note}",
        summary.family, summary.vertices, summary.edges
    )))
}

/// Closed-form spectrum of a generated family read as an adjacency operator.
pub fn known_spectrum(g: &RootedGraph) -> Option<(SpectralSet, String)> {
    let spec: GeneratorSpec = serde_json::from_value(g.meta().get("generator")?.clone()).ok()?;
    let tag = match spec {
        GeneratorSpec::Line { .. } | GeneratorSpec::HalfLine { .. } => FamilyTag::Line,
        GeneratorSpec::ZnBox { n, .. } => FamilyTag::Zn(n),
        GeneratorSpec::RegularTree { d, .. } => FamilyTag::Tree(d),
        GeneratorSpec::Star { k, .. } => FamilyTag::Star(k),
        GeneratorSpec::Comb { .. } => FamilyTag::Comb,
        _ => return None,
    };
    Some((tag.spectrum()?, tag.to_string()))
}

fn load_prediction(path: &Path) -> anyhow::Result<SpectralSet> {
    let text = std::fs::read_to_string(path)?;
    let mut v: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = v.get_mut("result") {
        v = inner.take();
    }
    if let Some(set) = v.get_mut("set") {
        v = set.take();
    }
    serde_json::from_value(v).with_context(|| format!("decoding prediction {}", path.display()))
}

fn compute_spectrum(
    job: &JobConfig,
    g: &RootedGraph,
    prediction: Option<(SpectralSet, String)>,
) -> anyhow::Result<SpectrumResult> {
    let h = SchrodingerOp::assemble(g, job.mode);
    let center = resolve_center(g, job.center.as_deref())?;
    let m = match job.radius {
        Some(r) => h.truncate(center, r)?,
        None => h.truncate_all()?,
    };
    let pairs = if m.dim() <= job.eigen.dense_cap {
        dense_eigen(&m, true)?
    } else {
        lanczos_extremal(&m, &job.eigen)?
    };
    let kept = boundary_filter(&pairs, &m, job.tolerances.tau);
    let comparison = prediction.filter(|(s, _)| !s.is_empty()).map(|(set, source)| {
        let r = hausdorff_report(&pairs.values, &kept, &set, job.tolerances.delta, pairs.mode);
        Comparison {
            predicted: set,
            source,
            directed_hausdorff: r.directed_hausdorff,
            coverage_gap: r.coverage_gap,
            uncovered_points: r.uncovered_points,
            delta: r.delta,
        }
    });
    Ok(SpectrumResult {
        center,
        radius: job.radius,
        mode: job.mode,
        dim: pairs.dim,
        eigen_mode: pairs.mode,
        eigenvalues: pairs.values,
        kept,
        residuals: pairs.residuals,
        tau: job.tolerances.tau,
        comparison,
    })
}

fn write_eigenvalues(job: &JobConfig, s: &SpectrumResult) -> anyhow::Result<()> {
    let mut csv = Csv::new(job, &["eigenvalue"])?;
    for v in s.kept_values() {
        csv.row(&[fmt_f64(v)]);
    }
    csv.write(&sibling(&job.output, "eigenvalues.csv"))
}

fn spectrum(job: &JobConfig) -> anyhow::Result<Outcome> {
    let g = load_graph(job)?;
    let prediction = match &job.prediction {
        Some(p) => Some((load_prediction(p)?, p.display().to_string())),
        None if job.mode == PotentialMode::Adjacency => known_spectrum(&g),
        None => None,
    };
    let s = compute_spectrum(job, &g, prediction)?;
    write_json(&job.output, job, &s)?;
    write_eigenvalues(job, &s)?;
    let mut line = format!(
        "dim {} ({:?}), eigenvalues in [{}, {}], {} kept",
        s.dim,
        s.eigen_mode,
        s.eigenvalues[0],
        s.eigenvalues[s.eigenvalues.len() - 1],
        s.kept.iter().filter(|&&k| k).count()
    );
    if let Some(c) = &s.comparison {
        line.push_str(&format!(", directed Hausdorff to {} = {:.3e}", c.source, c.directed_hausdorff));
    }
    Ok(Outcome::ok(line))
}

fn rlimit_config(job: &JobConfig) -> anyhow::Result<RLimitConfig> {
    let r = job
        .rlimit_radius
        .ok_or_else(|| anyhow!("limit classes need a radius R"))?;
    let mut cfg = RLimitConfig::new(r);
    if let Some(d) = job.d_min {
        cfg.d_min = d;
    }
    if let Some(m) = job.min_witnesses {
        cfg.min_witnesses = m;
    }
    cfg.quantization = job.tolerances.quantization;
    Ok(cfg)
}

fn rlimits(job: &JobConfig) -> anyhow::Result<Outcome> {
    let g = load_graph(job)?;
    let h = SchrodingerOp::assemble(&g, job.mode);
    let report = enumerate_classes(&h, &rlimit_config(job)?)?;
    let contraction = contraction_check(&report)?;
    let tags: Vec<String> = report.classes.iter().map(|c| c.family.to_string()).collect();
    let line = format!(
        "{} classes [{}] from {} candidates, contraction {}",
        report.classes.len(),
        tags.join(", "),
        report.candidates,
        if contraction.passed() { "ok" } else { "violated" }
    );
    write_json(&job.output, job, &RlimitsResult { report, contraction })?;
    Ok(Outcome::ok(line))
}

fn load_classes(path: &Path) -> anyhow::Result<ClassReport> {
    let text = std::fs::read_to_string(path)?;
    let mut v: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(inner) = v.get_mut("result") {
        v = inner.take();
    }
    if let Some(r) = v.get_mut("report") {
        v = r.take();
    }
    serde_json::from_value(v).with_context(|| format!("decoding class report {}", path.display()))
}

fn predict(job: &JobConfig) -> anyhow::Result<Outcome> {
    let path = job
        .classes
        .as_ref()
        .ok_or_else(|| anyhow!("predict needs a class report"))?;
    let report = load_classes(path)?;
    let p: Prediction = predict_from_classes(&report);
    write_json(&job.output, job, &p)?;
    if p.complete {
        Ok(Outcome::ok(format!("predicted {}", p.set)))
    } else {
        Ok(Outcome {
            code: EXIT_INCOMPLETE,
            summary: format!(
                "incomplete: {} unmatched classes, partial set {}",
                p.unmatched.len(),
                p.set
            ),
        })
    }
}

fn verify(job: &JobConfig) -> anyhow::Result<Outcome> {
    let g = load_graph(job)?;
    let path = job
        .prediction
        .as_ref()
        .ok_or_else(|| anyhow!("verify needs a prediction"))?;
    let set = load_prediction(path)?;
    if set.is_empty() {
        bail!("prediction {} is empty", path.display());
    }
    let spectrum = compute_spectrum(job, &g, Some((set, path.display().to_string())))?;
    let tol = &job.tolerances;
    let c = spectrum.comparison.as_ref().expect("non-empty prediction");
    let mut failures = Vec::new();
    if !(c.directed_hausdorff <= tol.hausdorff) {
        failures.push(format!(
            "directed Hausdorff distance {:.6} exceeds {}",
            c.directed_hausdorff, tol.hausdorff
        ));
    }
    if let (Some(limit), Some(gap)) = (tol.coverage, c.coverage_gap) {
        if gap > limit {
            failures.push(format!("coverage gap {gap:.6} exceeds {limit}"));
        }
        if !c.uncovered_points.is_empty() {
            failures.push(format!("no eigenvalue near {:?}", c.uncovered_points));
        }
    }

    let mut witnesses = Vec::new();
    let mut witness_source = None;
    if !job.witness_lambdas.is_empty() {
        let wcfg = tol.witness();
        let (rep, mode, default_radius, source) = match (&job.classes, &job.witness_family) {
            (Some(classes), Some(family)) => {
                let tag: FamilyTag = family.parse()?;
                let report = load_classes(classes)?;
                let class = report
                    .classes
                    .into_iter()
                    .find(|c| c.family == tag)
                    .ok_or_else(|| anyhow!("no {tag} class in {}", classes.display()))?;
                (
                    class.representative,
                    class.representative_mode,
                    report.config.radius,
                    tag.to_string(),
                )
            }
            (None, None) => {
                let center = resolve_center(&g, job.center.as_deref())?;
                let r = job.witness_radius.unwrap_or(10).min(reliable_radius(&g));
                let h = SchrodingerOp::assemble(&g, job.mode);
                let (rep, mode) = representative_graph(&h, center, r)?;
                (rep, mode, r, "graph".to_string())
            }
            _ => bail!("witnesses from a class need both a class report and a family"),
        };
        let h = SchrodingerOp::assemble(&rep, mode);
        let radius = job.witness_radius.unwrap_or(default_radius);
        for &lambda in &job.witness_lambdas {
            let w = sigma_infty_witness(&h, lambda, radius, &wcfg)?;
            if w.verdict != WitnessVerdict::Pass {
                failures.push(format!("witness at {lambda}: {:?}", w.verdict));
            }
            witnesses.push(w);
        }
        witness_source = Some(source);
    }

    let passed = failures.is_empty();
    let line = format!(
        "{}: directed Hausdorff {:.6}{}",
        if passed { "PASS" } else { "FAIL" },
        c.directed_hausdorff,
        if failures.is_empty() {
            String::new()
        } else {
            format!("; {}", failures.join("; "))
        }
    );
    let result = VerifyResult {
        hausdorff_tolerance: tol.hausdorff,
        coverage_tolerance: tol.coverage,
        spectrum,
        witness_source,
        witnesses,
        failures,
        passed,
    };
    write_json(&job.output, job, &result)?;
    Ok(Outcome {
        code: if passed { EXIT_OK } else { EXIT_FAIL },
        summary: line,
    })
}

fn plotdata(job: &JobConfig) -> anyhow::Result<Outcome> {
    let kind = job.plot.ok_or_else(|| anyhow!("plotdata needs a plot kind"))?;
    let report = || {
        job.report
            .as_ref()
            .ok_or_else(|| anyhow!("{kind:?} plots need a report"))
    };
    let csv = match kind {
        PlotKind::Growth => {
            let g = load_graph(job)?;
            let p = g.growth_profile(reliable_radius(&g))?;
            let mut csv = Csv::new(job, &["k", "ball_size"])?;
            for (k, b) in p.ball_sizes.iter().enumerate() {
                csv.row(&[k.to_string(), b.to_string()]);
            }
            csv
        }
        PlotKind::Histogram => {
            let path = report()?;
            let values = read_spectrum(path)?.kept_values();
            histogram(job, &values)?
        }
        PlotKind::Witness => {
            let path = report()?;
            let witnesses = read_witnesses(path)?;
            let mut csv = Csv::new(job, &["lambda", "distance", "abs_psi"])?;
            for w in &witnesses {
                for (d, x) in w.profile() {
                    csv.row(&[fmt_f64(w.lambda), d.to_string(), fmt_f64(x)]);
                }
            }
            csv
        }
        PlotKind::Indicator => {
            let path = report()?;
            let set = load_prediction(path)?;
            let [a, b] = set.hull().ok_or_else(|| anyhow!("empty predicted set"))?;
            let pad = 0.25 * (b - a).max(1.0);
            let mut csv = Csv::new(job, &["x", "indicator"])?;
            csv.extend_body(&set.indicator_csv(a - pad, b + pad, job.bins.max(2), 0.0));
            csv
        }
    };
    csv.write(&job.output)?;
    let rows = csv.as_str().lines().count() - 3;
    Ok(Outcome::ok(format!("{kind:?}: {rows} rows")))
}

fn read_spectrum(path: &Path) -> anyhow::Result<SpectrumResult> {
    let v: serde_json::Value = read_result(path)?;
    let v = v.get("spectrum").cloned().unwrap_or(v);
    Ok(serde_json::from_value(v)?)
}

fn read_witnesses(path: &Path) -> anyhow::Result<Vec<WitnessResult>> {
    let v: serde_json::Value = read_result(path)?;
    let w = v
        .get("witnesses")
        .cloned()
        .ok_or_else(|| anyhow!("{} has no witnesses", path.display()))?;
    Ok(serde_json::from_value(w)?)
}

fn histogram(job: &JobConfig, values: &[f64]) -> anyhow::Result<Csv> {
    let mut csv = Csv::new(job, &["bin_lo", "bin_hi", "count"])?;
    if values.is_empty() {
        return Ok(csv);
    }
    let bins = job.bins.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let a = lo + i as f64 * width;
        csv.row(&[fmt_f64(a), fmt_f64(a + width), c.to_string()]);
    }
    Ok(csv)
}

fn demo(job: &JobConfig) -> anyhow::Result<Outcome> {
    let Some(GeneratorSpec::GD { d, radius }) = job.generator else {
        bail!("the demo needs a g_d_example generator");
    };
    let mut cfg = DemoConfig::new(d, radius);
    if let Some(r) = job.rlimit_radius {
        cfg.rlimit.radius = r;
    }
    if let Some(m) = job.d_min {
        cfg.rlimit.d_min = m;
    }
    if let Some(m) = job.min_witnesses {
        cfg.rlimit.min_witnesses = m;
    }
    cfg.rlimit.quantization = job.tolerances.quantization;
    cfg.eigen = job.eigen.clone();
    cfg.witness = job.tolerances.witness();
    let r: StrictInclusionReport = strict_inclusion_demo(&cfg)?;
    write_json(&job.output, job, &r)?;
    let line = format!(
        "{}: spectral radius {:.6} <= {:.6}, tree({d}) witnesses at ±{d}: {:?}, gap {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.spectral_radius,
        r.tree_bound,
        r.witnesses.iter().map(|w| w.verdict).collect::<Vec<_>>(),
        r.gap
    );
    Ok(Outcome {
        code: if r.passed { EXIT_OK } else { EXIT_FAIL },
        summary: line,
    })
}
