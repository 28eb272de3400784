use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use esspec::generators::{GeneratorSpec, SparseRule};
use esspec::operator::PotentialMode;

use crate::config::{Command, JobConfig, PlotKind, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "esspec", version, about = "Essential spectra of graph operators via R-limits")]
pub struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print the job configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Generate a graph truncation.
    Generate(GenerateArgs),
    /// Eigenvalues of a truncated operator, compared with a prediction.
    Spectrum(SpectrumArgs),
    /// Enumerate limit classes.
    Rlimits(RlimitsArgs),
    /// Union of the known spectra of the classes in a class report.
    Predict(PredictArgs),
    /// Check a prediction against the truncated spectrum and witnesses.
    Verify(VerifyArgs),
    /// CSV tables for plotting.
    Plotdata(PlotArgs),
    /// Strict inclusion on the chain graph G^d.
    Demo(DemoArgs),
    /// Run a job described by a JSON file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// line, half_line, zn_box, z_nxn, tree, star, comb, sparse_tree, g_d
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub half_side: Option<usize>,
    /// Branching depths L_n of the sparse tree.
    #[arg(long, value_delimiter = ',')]
    pub rule_l: Vec<usize>,
    /// Branching numbers k_n; the last one repeats.
    #[arg(long, value_delimiter = ',')]
    pub rule_k: Vec<usize>,
    /// Cycle depths C_n.
    #[arg(long, value_delimiter = ',')]
    pub rule_c: Vec<usize>,
}

fn need(v: Option<usize>, name: &str, family: &str) -> anyhow::Result<usize> {
    v.ok_or_else(|| anyhow::anyhow!("family {family} needs --{name}"))
}

impl GeneratorArgs {
    pub fn spec(&self) -> anyhow::Result<GeneratorSpec> {
        let f = self.family.as_str();
        let radius = || need(self.radius, "radius", f);
        Ok(match f {
            "line" | "line_Z" => GeneratorSpec::Line { radius: radius()? },
            "half_line" | "half_line_N" => GeneratorSpec::HalfLine { radius: radius()? },
            "zn_box" => GeneratorSpec::ZnBox {
                n: need(self.n, "n", f)?,
                half_side: need(self.half_side.or(self.radius), "half-side", f)?,
            },
            "z_nxn" => GeneratorSpec::ZNxN {
                n: need(self.n, "n", f)?,
                radius: radius()?,
            },
            "tree" | "regular_tree" => GeneratorSpec::RegularTree {
                d: need(self.d, "d", f)?,
                radius: radius()?,
            },
            "star" => GeneratorSpec::Star {
                k: need(self.k, "k", f)?,
                radius: radius()?,
            },
            "comb" => GeneratorSpec::Comb { radius: radius()? },
            "sparse_tree" | "sparse_tree_cycles" => {
                let radius = radius()?;
                let k = if self.rule_k.is_empty() {
                    vec![self.k.unwrap_or(2)]
                } else {
                    self.rule_k.clone()
                };
                let rule = if self.rule_l.is_empty() {
                    let mut r = SparseRule::default_for_radius(radius, k[0]);
                    r.k = k;
                    if !self.rule_c.is_empty() {
                        r.c = self.rule_c.clone();
                    }
                    r
                } else {
                    let c = if self.rule_c.is_empty() {
                        self.rule_l.windows(2).map(|w| (w[0] + w[1]).div_ceil(2)).collect()
                    } else {
                        self.rule_c.clone()
                    };
                    SparseRule {
                        l: self.rule_l.clone(),
                        k,
                        c,
                    }
                };
                GeneratorSpec::SparseTreeCycles { rule, radius }
            }
            "g_d" | "g_d_example" => GeneratorSpec::GD {
                d: need(self.d, "d", f)?,
                radius: radius()?,
            },
            other => anyhow::bail!("unknown family {other:?}"),
        })
    }
}

#[derive(Debug, Args)]
pub struct OutputArg {
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// explicit, laplacian or adjacency
    #[arg(long, default_value = "adjacency")]
    pub mode: PotentialMode,
}

#[derive(Debug, Args)]
pub struct SpectrumFilters {
    /// Vertex index or generator label; the root when absent.
    #[arg(long)]
    pub center: Option<String>,
    /// Truncation radius; the whole graph when absent.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Largest dimension solved densely.
    #[arg(long)]
    pub dense_cap: Option<usize>,
    /// Eigenvalues kept at each end in iterative mode.
    #[arg(long)]
    pub extremal_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub filters: SpectrumFilters,
    /// Prediction to compare with; inferred from the generator when absent.
    #[arg(long)]
    pub prediction: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct RlimitsArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long = "R", alias = "r-limit")]
    pub r: usize,
    #[arg(long)]
    pub d_min: Option<usize>,
    #[arg(long)]
    pub min_witnesses: Option<usize>,
    #[arg(long)]
    pub quantization: Option<f64>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub classes: PathBuf,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long)]
    pub prediction: PathBuf,
    #[command(flatten)]
    pub filters: SpectrumFilters,
    /// Energies at which bounded witnesses are searched.
    #[arg(long = "lambda", value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Vec<f64>,
    /// Class report supplying the witness graph.
    #[arg(long)]
    pub classes: Option<PathBuf>,
    /// Family tag of the class carrying the witnesses, e.g. `tree(3)`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub witness_radius: Option<usize>,
    #[arg(long)]
    pub hausdorff: Option<f64>,
    #[arg(long)]
    pub coverage: Option<f64>,
    #[arg(long)]
    pub eps_res: Option<f64>,
    #[arg(long)]
    pub sup_cap: Option<f64>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    /// Graph for growth curves.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Report for histograms, witness profiles and indicators.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub out: OutputArg,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub radius: usize,
    #[arg(long = "R")]
    pub r: Option<usize>,
    #[arg(long)]
    pub d_min: Option<usize>,
    #[command(flatten)]
    pub out: OutputArg,
}

fn apply_filters(job: &mut JobConfig, f: &SpectrumFilters) {
    job.center = f.center.clone();
    job.radius = f.radius;
    if let Some(t) = f.tau {
        job.tolerances.tau = t;
    }
    if let Some(d) = f.delta {
        job.tolerances.delta = d;
    }
    if let Some(c) = f.dense_cap {
        job.eigen.dense_cap = c;
    }
    if let Some(c) = f.extremal_count {
        job.eigen.extremal_count = c;
    }
}

impl Sub {
    /// The job a subcommand stands for; `None` for `run`.
    pub fn job(&self) -> anyhow::Result<Option<JobConfig>> {
        let job = match self {
            Sub::Generate(a) => {
                let mut job = JobConfig::new(Command::Generate, &a.out.output);
                job.generator = Some(a.generator.spec()?);
                job
            }
            Sub::Spectrum(a) => {
                let mut job = JobConfig::new(Command::Spectrum, &a.out.output);
                job.graph = Some(a.op.graph.clone());
                job.mode = a.op.mode;
                job.prediction = a.prediction.clone();
                apply_filters(&mut job, &a.filters);
                job
            }
            Sub::Rlimits(a) => {
                let mut job = JobConfig::new(Command::Rlimits, &a.out.output);
                job.graph = Some(a.op.graph.clone());
                job.mode = a.op.mode;
                job.rlimit_radius = Some(a.r);
                job.d_min = a.d_min;
                job.min_witnesses = a.min_witnesses;
                if let Some(q) = a.quantization {
                    job.tolerances.quantization = q;
                }
                job
            }
            Sub::Predict(a) => {
                let mut job = JobConfig::new(Command::Predict, &a.out.output);
                job.classes = Some(a.classes.clone());
                job
            }
            Sub::Verify(a) => {
                let mut job = JobConfig::new(Command::Verify, &a.out.output);
                job.graph = Some(a.op.graph.clone());
                job.mode = a.op.mode;
                job.prediction = Some(a.prediction.clone());
                apply_filters(&mut job, &a.filters);
                job.witness_lambdas = a.lambdas.clone();
                job.classes = a.classes.clone();
                job.witness_family = a.family.clone();
                job.witness_radius = a.witness_radius;
                let t: &mut Tolerances = &mut job.tolerances;
                if let Some(h) = a.hausdorff {
                    t.hausdorff = h;
                }
                t.coverage = a.coverage;
                if let Some(e) = a.eps_res {
                    t.eps_res = e;
                }
                if let Some(s) = a.sup_cap {
                    t.sup_cap = s;
                }
                job
            }
            Sub::Plotdata(a) => {
                let mut job = JobConfig::new(Command::Plotdata, &a.out.output);
                job.plot = Some(a.kind);
                job.graph = a.graph.clone();
                job.report = a.report.clone();
                if let Some(b) = a.bins {
                    job.bins = b;
                }
                job
            }
            Sub::Demo(a) => {
                let mut job = JobConfig::new(Command::Demo, &a.out.output);
                job.generator = Some(GeneratorSpec::GD {
                    d: a.d,
                    radius: a.radius,
                });
                job.rlimit_radius = a.r;
                job.d_min = a.d_min;
                job
            }
            Sub::Run { .. } => return Ok(None),
        };
        Ok(Some(job))
    }
}
