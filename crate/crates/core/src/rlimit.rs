//! Approximate R-limits: classes of vertices far from the root whose balls
//! agree up to radius `R` as compressed operators.
//!
//! Each vertex gets a tower of canonical ball signatures for radii `1..=R`.
//! The signature values are the diagonal entries `W − deg` of the compressed
//! operator, so equal towers mean equal compressions `P H P` on every ball up
//! to isomorphism. A tower that recurs at enough vertices beyond distance
//! `d_min` stands in for an R-limit.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::{predict_essential_spectrum, FamilyTag, Prediction};
use crate::canon::{canonical_signature, to_hex, BallSignature, DEFAULT_QUANTIZATION};
use crate::error::{Error, Result};
use crate::generators::{make_comb, make_line, make_regular_tree, make_star, make_zn_box};
use crate::graph::{BallView, RootedGraph, Vertex};
use crate::operator::{PotentialMode, SchrodingerOp};

/// Signatures of the balls of radius `1..=R` around one centre.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignatureTower {
    pub signatures: Vec<BallSignature>,
}

impl SignatureTower {
    pub fn radius(&self) -> usize {
        self.signatures.len()
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.signatures {
            h.update(s.digest().as_bytes());
        }
        to_hex(&h.finalize())
    }

    /// The tower cut to radius `r`.
    pub fn prefix(&self, r: usize) -> SignatureTower {
        SignatureTower {
            signatures: self.signatures[..r.min(self.signatures.len())].to_vec(),
        }
    }
}

/// The sub-ball of radius `r` of a ball with radius at least `r`.
fn sub_ball(ball: &BallView, r: usize) -> BallView {
    let n = ball.distances.partition_point(|&d| d <= r);
    BallView {
        center: ball.center,
        radius: r,
        vertices: ball.vertices[..n].to_vec(),
        distances: ball.distances[..n].to_vec(),
        edges: ball
            .edges
            .iter()
            .copied()
            .filter(|&(_, j)| j < n)
            .collect(),
    }
}

/// Compressed-operator diagonal on the ball.
pub fn signature_values(h: &SchrodingerOp, ball: &BallView) -> Result<Vec<f64>> {
    ball.vertices.iter().map(|&v| h.diagonal(v)).collect()
}

pub fn tower_at(h: &SchrodingerOp, center: Vertex, radius: usize, q: f64) -> Result<SignatureTower> {
    let ball = h.graph().ball(center, radius)?;
    tower_of_ball(h, &ball, q)
}

fn tower_of_ball(h: &SchrodingerOp, ball: &BallView, q: f64) -> Result<SignatureTower> {
    let values = signature_values(h, ball)?;
    let signatures = (1..=ball.radius)
        .map(|r| {
            let b = sub_ball(ball, r);
            canonical_signature(&b, &values[..b.len()], q)
        })
        .collect();
    Ok(SignatureTower { signatures })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RLimitConfig {
    pub radius: usize,
    pub d_min: usize,
    pub min_witnesses: usize,
    pub quantization: f64,
}

impl RLimitConfig {
    pub fn new(radius: usize) -> Self {
        RLimitConfig {
            radius,
            d_min: radius + 10,
            min_witnesses: 3,
            quantization: DEFAULT_QUANTIZATION,
        }
    }

    pub fn with_d_min(mut self, d_min: usize) -> Self {
        self.d_min = d_min;
        self
    }

    pub fn with_min_witnesses(mut self, m: usize) -> Self {
        self.min_witnesses = m;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub distance: usize,
    pub vertex: Vertex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RLimitClass {
    pub tower_hash: String,
    pub tower: SignatureTower,
    /// Distinct vertices sharing the tower, sorted by (distance, vertex).
    pub witnesses: Vec<Witness>,
    /// Number of distinct root distances among the witnesses.
    pub distinct_distances: usize,
    pub family: FamilyTag,
    /// The radius-`R` ball around the first witness as a standalone graph.
    pub representative: RootedGraph,
    /// Mode in which `representative` reproduces the class's compressions.
    pub representative_mode: PotentialMode,
}

impl RLimitClass {
    pub fn first_witness(&self) -> Witness {
        self.witnesses[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub config: RLimitConfig,
    pub mode: PotentialMode,
    pub classes: Vec<RLimitClass>,
    /// Vertices at distance `>= d_min` with a reliable `R`-ball.
    pub candidates: usize,
    /// Candidates skipped because the ball holds a boundary vertex whose
    /// degree, and therefore compressed diagonal, is unknown.
    pub skipped_unknown_degree: usize,
    /// Towers seen at fewer than `min_witnesses` vertices: (hash, count, nearest distance).
    pub sparse_towers: Vec<(String, usize, usize)>,
}

impl ClassReport {
    pub fn tags(&self) -> Vec<FamilyTag> {
        self.classes.iter().map(|c| c.family).collect()
    }

    pub fn distinct_tags(&self) -> BTreeSet<FamilyTag> {
        self.classes.iter().map(|c| c.family).collect()
    }

    pub fn has_unknown(&self) -> bool {
        self.classes.iter().any(|c| c.family == FamilyTag::Unknown)
    }
}

/// Towers of the families with a known spectrum, read as adjacency operators.
#[derive(Debug, Clone, Default)]
pub struct Catalogue {
    pub radius: usize,
    pub quantization: f64,
    /// Every family realising a tower, in catalogue order.
    entries: HashMap<SignatureTower, Vec<FamilyTag>>,
    /// Tower at the root of each family's generated graph.
    roots: Vec<(FamilyTag, SignatureTower)>,
}

impl Catalogue {
    /// Line, stars with `3..=max_degree` rays, the comb, regular trees of
    /// degree `3..=max_degree` and ℤⁿ for `2 <= 2n <= max_degree`.
    pub fn standard(radius: usize, q: f64, max_degree: usize) -> Result<Catalogue> {
        let mut cat = Catalogue {
            radius,
            quantization: q,
            ..Catalogue::default()
        };
        let near = 2 * radius + 2;
        cat.add_near_root(&make_line(near)?, FamilyTag::Line)?;
        for k in 3..=max_degree {
            cat.add_near_root(&make_star(k, near)?, FamilyTag::Star(k))?;
        }
        if max_degree >= 4 {
            cat.add_near_root(&make_comb(near)?, FamilyTag::Comb)?;
        }
        for d in 3..=max_degree {
            let t = make_regular_tree(d, radius)?;
            cat.add_root(&t, FamilyTag::Tree(d))?;
        }
        for n in 2..=max_degree / 2 {
            let b = make_zn_box(n, radius)?;
            cat.add_root(&b, FamilyTag::Zn(n))?;
        }
        Ok(cat)
    }

    fn insert(&mut self, tower: SignatureTower, tag: FamilyTag) {
        let tags = self.entries.entry(tower).or_default();
        if !tags.contains(&tag) {
            tags.push(tag);
        }
    }

    /// Tower at the root of a vertex-transitive family.
    fn add_root(&mut self, g: &RootedGraph, tag: FamilyTag) -> Result<()> {
        let h = SchrodingerOp::assemble(g, PotentialMode::Adjacency);
        let t = tower_at(&h, g.root(), self.radius, self.quantization)?;
        self.roots.push((tag, t.clone()));
        self.insert(t, tag);
        Ok(())
    }

    /// Towers at every vertex within `R + 1` of the root; farther vertices
    /// repeat towers already seen.
    fn add_near_root(&mut self, g: &RootedGraph, tag: FamilyTag) -> Result<()> {
        let h = SchrodingerOp::assemble(g, PotentialMode::Adjacency);
        let layers = g.bfs_layers_within(g.root(), self.radius + 1)?;
        for &v in &layers.order {
            if g.ball_is_reliable(v, self.radius) {
                let t = tower_at(&h, v, self.radius, self.quantization)?;
                if v == g.root() {
                    self.roots.push((tag, t.clone()));
                }
                self.insert(t, tag);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All families realising `tower`, in catalogue order.
    pub fn candidates(&self, tower: &SignatureTower) -> &[FamilyTag] {
        if tower.radius() != self.radius {
            return &[];
        }
        self.entries.get(tower).map_or(&[], Vec::as_slice)
    }

    /// First family realising `tower`, ignoring context.
    pub fn match_family(&self, tower: &SignatureTower) -> FamilyTag {
        self.candidates(tower).first().copied().unwrap_or(FamilyTag::Unknown)
    }

    /// Tags for a set of towers seen together. A tower realised by several
    /// families goes to the first one whose root tower is also in the set,
    /// falling back to the first candidate. A ray vertex next to the centre
    /// of a 4-star and a tooth vertex next to the spine of a comb agree at
    /// small radii; the centre or spine tower tells them apart.
    pub fn resolve(&self, towers: &[SignatureTower]) -> Vec<FamilyTag> {
        let present: BTreeSet<&SignatureTower> = towers.iter().collect();
        let seen = |tag: FamilyTag| {
            self.roots
                .iter()
                .any(|(t, root)| *t == tag && present.contains(root))
        };
        towers
            .iter()
            .map(|tower| {
                let c = self.candidates(tower);
                c.iter()
                    .copied()
                    .find(|&tag| seen(tag))
                    .or_else(|| c.first().copied())
                    .unwrap_or(FamilyTag::Unknown)
            })
            .collect()
    }
}

pub fn match_family(tower: &SignatureTower, catalogue: &Catalogue) -> FamilyTag {
    catalogue.match_family(tower)
}

/// Largest graph degree, used to size the catalogue.
pub fn max_degree(g: &RootedGraph) -> usize {
    (0..g.vertex_count()).map(|v| g.degree(v)).max().unwrap_or(0)
}

pub fn enumerate_classes(h: &SchrodingerOp, cfg: &RLimitConfig) -> Result<ClassReport> {
    let g = h.graph();
    let catalogue = Catalogue::standard(cfg.radius, cfg.quantization, max_degree(g).max(2))?;
    enumerate_classes_with(h, cfg, &catalogue)
}

pub fn enumerate_classes_with(
    h: &SchrodingerOp,
    cfg: &RLimitConfig,
    catalogue: &Catalogue,
) -> Result<ClassReport> {
    if cfg.radius == 0 || cfg.min_witnesses == 0 || !(cfg.quantization > 0.0) {
        return Err(Error::InvalidParameters(
            "need radius >= 1, min_witnesses >= 1 and a positive quantization".into(),
        ));
    }
    let g = h.graph();
    let dist = g.root_distances();
    let ecc = dist.iter().copied().max().unwrap_or(0);
    if ecc < cfg.d_min + cfg.radius {
        return Err(Error::GraphTooSmall(format!(
            "root eccentricity {ecc} < d_min + R = {}",
            cfg.d_min + cfg.radius
        )));
    }
    let candidates: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| dist[v] >= cfg.d_min)
        .collect();
    let towers: Vec<Option<Result<SignatureTower>>> = candidates
        .par_iter()
        .map(|&v| {
            let ball = match g.ball(v, cfg.radius) {
                Ok(b) => b,
                Err(Error::UnreliableBall { .. }) => return None,
                Err(e) => return Some(Err(e)),
            };
            Some(tower_of_ball(h, &ball, cfg.quantization))
        })
        .collect();
    let mut groups: BTreeMap<SignatureTower, Vec<Witness>> = BTreeMap::new();
    let mut reliable = 0;
    let mut skipped = 0;
    for (&v, t) in candidates.iter().zip(towers) {
        match t {
            None => {}
            Some(Ok(t)) => {
                reliable += 1;
                groups.entry(t).or_default().push(Witness {
                    distance: dist[v],
                    vertex: v,
                });
            }
            Some(Err(Error::UnknownDegree(_))) => {
                reliable += 1;
                skipped += 1;
            }
            Some(Err(e)) => return Err(e),
        }
    }
    let mut classes = Vec::new();
    let mut sparse = Vec::new();
    for (tower, mut witnesses) in groups {
        witnesses.sort_unstable();
        if witnesses.len() < cfg.min_witnesses {
            sparse.push((tower.digest(), witnesses.len(), witnesses[0].distance));
            continue;
        }
        let distinct_distances = {
            let mut d: Vec<usize> = witnesses.iter().map(|w| w.distance).collect();
            d.dedup();
            d.len()
        };
        let (representative, representative_mode) =
            representative_graph(h, witnesses[0].vertex, cfg.radius)?;
        classes.push(RLimitClass {
            tower_hash: tower.digest(),
            family: catalogue.match_family(&tower),
            tower,
            witnesses,
            distinct_distances,
            representative,
            representative_mode,
        });
    }
    classes.sort_by_key(|c| c.first_witness());
    let towers: Vec<SignatureTower> = classes.iter().map(|c| c.tower.clone()).collect();
    for (c, tag) in classes.iter_mut().zip(catalogue.resolve(&towers)) {
        c.family = tag;
    }
    sparse.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
    Ok(ClassReport {
        config: cfg.clone(),
        mode: h.mode(),
        classes,
        candidates: reliable,
        skipped_unknown_degree: skipped,
        sparse_towers: sparse,
    })
}

/// The radius-`R` ball around `center` as a rooted graph whose outer layer is
/// boundary. Its potential is chosen so that, read in the returned mode, the
/// compressions of balls inside it equal those of `h`.
pub fn representative_graph(
    h: &SchrodingerOp,
    center: Vertex,
    radius: usize,
) -> Result<(RootedGraph, PotentialMode)> {
    let ball = h.graph().ball(center, radius)?;
    let adjacency = ball.local_adjacency();
    let values = signature_values(h, &ball)?;
    let potential: Vec<f64> = values
        .iter()
        .zip(&adjacency)
        .map(|(d, nb)| d + nb.len() as f64)
        .collect();
    let boundary = ball.distances.iter().map(|&d| d == radius).collect();
    let degree_bound = h.graph().degree_bound();
    let mode = match h.mode() {
        PotentialMode::Adjacency => PotentialMode::Adjacency,
        _ => PotentialMode::Explicit,
    };
    let meta = serde_json::json!({
        "representative_of": center,
        "radius": radius,
        "source_vertices": ball.vertices,
    });
    let g = RootedGraph::new(adjacency, 0, potential, degree_bound, boundary, meta)?;
    Ok((g, mode))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionViolation {
    pub class: usize,
    pub sub_radius: usize,
    /// Vertex of the representative graph.
    pub center: Vertex,
    pub tower_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub checked: usize,
    pub violations: Vec<ContractionViolation>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every tower of radius `R' < R` met inside a representative
/// graph is the radius-`R'` prefix of some enumerated class.
pub fn contraction_check(report: &ClassReport) -> Result<ContractionReport> {
    let r = report.config.radius;
    let q = report.config.quantization;
    let known: BTreeSet<SignatureTower> = (1..r)
        .flat_map(|rp| report.classes.iter().map(move |c| c.tower.prefix(rp)))
        .collect();
    let mut checked = 0;
    let mut violations = Vec::new();
    for (ci, class) in report.classes.iter().enumerate() {
        let rep = &class.representative;
        let h = SchrodingerOp::assemble(rep, class.representative_mode);
        let dist = rep.root_distances();
        for rp in 1..r {
            for c in 0..rep.vertex_count() {
                if dist[c] + rp > r {
                    continue;
                }
                let t = match tower_at(&h, c, rp, q) {
                    Ok(t) => t,
                    Err(Error::UnreliableBall { .. } | Error::UnknownDegree(_)) => continue,
                    Err(e) => return Err(e),
                };
                checked += 1;
                if !known.contains(&t) {
                    violations.push(ContractionViolation {
                        class: ci,
                        sub_radius: rp,
                        center: c,
                        tower_hash: t.digest(),
                    });
                }
            }
        }
    }
    Ok(ContractionReport {
        checked,
        violations,
    })
}

/// Union of the known spectra of all classes in the report.
pub fn predict_from_classes(report: &ClassReport) -> Prediction {
    predict_essential_spectrum(&report.tags())
}
