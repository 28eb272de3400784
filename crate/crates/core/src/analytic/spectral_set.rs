use serde::{Deserialize, Serialize};

/// Points closer than this to an interval are absorbed by it, and intervals
/// closer than this to each other are merged.
const MERGE_TOL: f64 = 1e-12;

/// A finite union of closed intervals and isolated points in normal form:
/// intervals sorted and pairwise disjoint, points sorted and outside every
/// interval.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct SpectralSet {
    intervals: Vec<[f64; 2]>,
    points: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    intervals: Vec<[f64; 2]>,
    #[serde(default)]
    points: Vec<f64>,
}

impl TryFrom<RawSet> for SpectralSet {
    type Error = String;

    fn try_from(r: RawSet) -> Result<Self, String> {
        if r.intervals.iter().any(|[a, b]| !(a <= b)) {
            return Err("interval with a > b or NaN endpoint".into());
        }
        if r.points.iter().any(|p| !p.is_finite()) {
            return Err("non-finite point".into());
        }
        Ok(SpectralSet::new(r.intervals, r.points))
    }
}

impl From<SpectralSet> for RawSet {
    fn from(s: SpectralSet) -> Self {
        RawSet {
            intervals: s.intervals,
            points: s.points,
        }
    }
}

impl SpectralSet {
    pub fn new(mut intervals: Vec<[f64; 2]>, mut points: Vec<f64>) -> Self {
        for iv in &mut intervals {
            assert!(iv[0] <= iv[1], "interval [{}, {}] is reversed", iv[0], iv[1]);
        }
        intervals.sort_by(|x, y| x[0].total_cmp(&y[0]));
        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv[0] <= last[1] + MERGE_TOL => last[1] = last[1].max(iv[1]),
                _ => merged.push(iv),
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= MERGE_TOL);
        points.retain(|&p| {
            !merged
                .iter()
                .any(|[a, b]| p >= a - MERGE_TOL && p <= b + MERGE_TOL)
        });
        SpectralSet {
            intervals: merged,
            points,
        }
    }

    pub fn empty() -> Self {
        SpectralSet::default()
    }

    pub fn interval(a: f64, b: f64) -> Self {
        SpectralSet::new(vec![[a, b]], Vec::new())
    }

    pub fn symmetric_interval(r: f64) -> Self {
        SpectralSet::interval(-r, r)
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn union(&self, other: &SpectralSet) -> SpectralSet {
        let mut iv = self.intervals.clone();
        iv.extend_from_slice(&other.intervals);
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        SpectralSet::new(iv, pts)
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a SpectralSet>>(sets: I) -> SpectralSet {
        sets.into_iter()
            .fold(SpectralSet::empty(), |acc, s| acc.union(s))
    }

    /// Euclidean distance from `x` to the set; infinite for the empty set.
    pub fn distance(&self, x: f64) -> f64 {
        let di = self.intervals.iter().map(|&[a, b]| {
            if x < a {
                a - x
            } else if x > b {
                x - b
            } else {
                0.0
            }
        });
        let dp = self.points.iter().map(|&p| (p - x).abs());
        di.chain(dp).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Smallest closed interval containing the set.
    pub fn hull(&self) -> Option<[f64; 2]> {
        let lo = self
            .intervals
            .iter()
            .map(|iv| iv[0])
            .chain(self.points.iter().copied())
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .intervals
            .iter()
            .map(|iv| iv[1])
            .chain(self.points.iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some([lo, hi])
    }

    /// Reflection `x ↦ −x`.
    pub fn negated(&self) -> SpectralSet {
        SpectralSet::new(
            self.intervals.iter().map(|&[a, b]| [-b, -a]).collect(),
            self.points.iter().map(|p| -p).collect(),
        )
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.negated();
        n.intervals.len() == self.intervals.len()
            && n.points.len() == self.points.len()
            && n.intervals
                .iter()
                .zip(&self.intervals)
                .all(|(x, y)| (x[0] - y[0]).abs() <= tol && (x[1] - y[1]).abs() <= tol)
            && n.points
                .iter()
                .zip(&self.points)
                .all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Hausdorff distance between two sets, both treated as compact subsets
    /// of the line.
    pub fn hausdorff(&self, other: &SpectralSet) -> f64 {
        self.directed_hausdorff(other).max(other.directed_hausdorff(self))
    }

    /// `sup_{x ∈ self} dist(x, other)`.
    pub fn directed_hausdorff(&self, other: &SpectralSet) -> f64 {
        // The supremum over an interval of the distance to a closed set is
        // attained at an endpoint or at a midpoint between two consecutive
        // pieces of `other` lying inside it.
        let mut probes: Vec<f64> = self.points.clone();
        let mut marks: Vec<f64> = other.intervals.iter().flat_map(|iv| [iv[0], iv[1]]).collect();
        marks.extend_from_slice(&other.points);
        marks.sort_by(f64::total_cmp);
        for &[a, b] in &self.intervals {
            probes.push(a);
            probes.push(b);
            for w in marks.windows(2) {
                let m = 0.5 * (w[0] + w[1]);
                if m > a && m < b {
                    probes.push(m);
                }
            }
        }
        probes
            .into_iter()
            .map(|x| other.distance(x))
            .fold(0.0, f64::max)
    }

    /// `x,indicator` rows on a uniform grid of `samples` points over `[lo, hi]`.
    pub fn indicator_csv(&self, lo: f64, hi: f64, samples: usize, tol: f64) -> String {
        let mut out = String::from("x,indicator\n");
        let n = samples.max(2);
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let inside = u8::from(self.contains(x, tol));
            out.push_str(&format!("{x:.17e},{inside}\n"));
        }
        out
    }
}

impl std::fmt::Display for SpectralSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|[a, b]| format!("[{a:.7}, {b:.7}]"))
            .chain(self.points.iter().map(|p| format!("{{{p:.7}}}")))
            .collect();
        if parts.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&parts.join(" ∪ "))
        }
    }
}
