use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::spectral_set::SpectralSet;
use crate::error::{Error, Result};

/// Families with a known spectrum, as matched to limit classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FamilyTag {
    Line,
    Star(usize),
    Comb,
    Tree(usize),
    Zn(usize),
    Unknown,
}

impl FamilyTag {
    /// The spectrum of the adjacency operator of the family; `None` for
    /// unknown classes.
    pub fn spectrum(&self) -> Option<SpectralSet> {
        match *self {
            FamilyTag::Line => Some(zn_spectrum(1)),
            FamilyTag::Star(k) => Some(star_spectrum(k)),
            FamilyTag::Comb => Some(comb_spectrum()),
            FamilyTag::Tree(d) => Some(tree_spectrum(d)),
            FamilyTag::Zn(n) => Some(zn_spectrum(n)),
            FamilyTag::Unknown => None,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::Line => write!(f, "line"),
            FamilyTag::Star(k) => write!(f, "star({k})"),
            FamilyTag::Comb => write!(f, "comb"),
            FamilyTag::Tree(d) => write!(f, "tree({d})"),
            FamilyTag::Zn(n) => write!(f, "zn({n})"),
            FamilyTag::Unknown => write!(f, "unknown"),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameters(format!("unknown family tag {s:?}"));
        let arg = |name: &str| -> Option<usize> {
            s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?.parse().ok()
        };
        match s {
            "line" => Ok(FamilyTag::Line),
            "comb" => Ok(FamilyTag::Comb),
            "unknown" => Ok(FamilyTag::Unknown),
            _ => arg("star")
                .map(FamilyTag::Star)
                .or_else(|| arg("tree").map(FamilyTag::Tree))
                .or_else(|| arg("zn").map(FamilyTag::Zn))
                .ok_or_else(bad),
        }
    }
}

impl TryFrom<String> for FamilyTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FamilyTag> for String {
    fn from(t: FamilyTag) -> String {
        t.to_string()
    }
}

/// `z_± = ±2√(1 + cos²θ)`.
pub fn comb_fiber_extra_eigenvalues(theta: f64) -> (f64, f64) {
    let z = 2.0 * (1.0 + theta.cos().powi(2)).sqrt();
    (-z, z)
}

/// The eigenvalue of the fibre `A_ℤ + 2cosθ·δ₀` outside `[−2, 2]`: `z₊` when
/// `cos θ > 0`, `z₋` when `cos θ < 0` and none at `cos θ = 0`.
pub fn comb_fiber_eigenvalue(theta: f64) -> Option<f64> {
    let c = 2.0 * theta.cos();
    if c == 0.0 {
        None
    } else {
        Some(c.signum() * (4.0 + c * c).sqrt())
    }
}

/// `[−2√2, 2√2]`.
pub fn comb_spectrum() -> SpectralSet {
    SpectralSet::symmetric_interval(2.0 * 2f64.sqrt())
}

/// `[−2, 2] ∪ {±k/√(k−1)}`; the points merge into the band at `k = 2`.
pub fn star_spectrum(k: usize) -> SpectralSet {
    assert!(k >= 2, "star needs at least two rays");
    let p = k as f64 / ((k - 1) as f64).sqrt();
    SpectralSet::new(vec![[-2.0, 2.0]], vec![-p, p])
}

/// `[−2√(d−1), 2√(d−1)]`.
pub fn tree_spectrum(d: usize) -> SpectralSet {
    assert!(d >= 2, "regular tree needs d >= 2");
    SpectralSet::symmetric_interval(2.0 * ((d - 1) as f64).sqrt())
}

/// `[−2n, 2n]`.
pub fn zn_spectrum(n: usize) -> SpectralSet {
    SpectralSet::symmetric_interval(2.0 * n as f64)
}

/// Union of the spectra of matched limit classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub set: SpectralSet,
    /// False when some class had no known spectrum; `set` is then only the
    /// part contributed by the matched classes.
    pub complete: bool,
    /// Positions (into the input) of classes without a known spectrum.
    pub unmatched: Vec<usize>,
    pub contributions: Vec<(FamilyTag, SpectralSet)>,
}

pub fn predict_essential_spectrum(tags: &[FamilyTag]) -> Prediction {
    let mut distinct: Vec<FamilyTag> = tags.to_vec();
    distinct.sort();
    distinct.dedup();
    let contributions: Vec<(FamilyTag, SpectralSet)> = distinct
        .iter()
        .filter_map(|t| t.spectrum().map(|s| (*t, s)))
        .collect();
    let unmatched: Vec<usize> = tags
        .iter()
        .enumerate()
        .filter(|(_, t)| t.spectrum().is_none())
        .map(|(i, _)| i)
        .collect();
    Prediction {
        set: SpectralSet::union_all(contributions.iter().map(|(_, s)| s)),
        complete: unmatched.is_empty(),
        unmatched,
        contributions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for t in [
            FamilyTag::Line,
            FamilyTag::Star(3),
            FamilyTag::Comb,
            FamilyTag::Tree(4),
            FamilyTag::Zn(2),
            FamilyTag::Unknown,
        ] {
            assert_eq!(t.to_string().parse::<FamilyTag>().unwrap(), t);
        }
        assert!("star(x)".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn closed_forms() {
        let s3 = star_spectrum(3);
        assert_eq!(s3.points().len(), 2);
        assert!((s3.points()[1] - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(star_spectrum(2), SpectralSet::interval(-2.0, 2.0));
        assert_eq!(tree_spectrum(2), SpectralSet::interval(-2.0, 2.0));
        assert_eq!(zn_spectrum(2), SpectralSet::interval(-4.0, 4.0));
        let (lo, hi) = comb_fiber_extra_eigenvalues(0.0);
        assert!((hi - 2.0 * 2f64.sqrt()).abs() < 1e-15 && lo == -hi);
        assert_eq!(comb_fiber_extra_eigenvalues(std::f64::consts::FRAC_PI_2).1, 2.0);
        assert!(comb_fiber_eigenvalue(std::f64::consts::PI).unwrap() < -2.0);
    }

    #[test]
    fn prediction_flags_unknown_classes() {
        let p = predict_essential_spectrum(&[FamilyTag::Line]);
        assert!(p.complete);
        assert_eq!(p.set, SpectralSet::interval(-2.0, 2.0));
        let p = predict_essential_spectrum(&[FamilyTag::Line, FamilyTag::Unknown]);
        assert!(!p.complete);
        assert_eq!(p.unmatched, vec![1]);
        assert_eq!(p.set, SpectralSet::interval(-2.0, 2.0));
    }
}
