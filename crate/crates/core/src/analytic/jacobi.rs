//! Finite Jacobi (symmetric tridiagonal) matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Diagonal `b` (length n) and off-diagonal `a` (length n − 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiMatrix {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if b.is_empty() || a.len() + 1 != b.len() {
            return Err(Error::DimensionMismatch {
                expected: b.len().saturating_sub(1),
                got: a.len(),
            });
        }
        Ok(JacobiMatrix { a, b })
    }

    /// The adjacency operator of ℕ cut to `n` sites.
    pub fn half_line(n: usize) -> Self {
        JacobiMatrix {
            a: vec![1.0; n.saturating_sub(1)],
            b: vec![0.0; n],
        }
    }

    /// The adjacency operator of ℤ cut to `2·half + 1` sites, plus `c` at the
    /// middle site.
    pub fn line_with_defect(half: usize, c: f64) -> Self {
        let n = 2 * half + 1;
        let mut b = vec![0.0; n];
        b[half] = c;
        JacobiMatrix {
            a: vec![1.0; n - 1],
            b,
        }
    }

    /// `a₁ = √k`, `a_n = 1` afterwards, `b ≡ 0`, cut to `n` sites.
    pub fn star_j0(k: usize, n: usize) -> Self {
        let mut j = JacobiMatrix::half_line(n);
        if let Some(a1) = j.a.first_mut() {
            *a1 = (k as f64).sqrt();
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.b[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
                q = self.b[i] - x - self.a[i - 1] * self.a[i - 1] / prev;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = if i > 0 { self.a[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.a[i].abs() } else { 0.0 };
            (lo.min(self.b[i] - r), hi.max(self.b[i] + r))
        })
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        assert!(k < self.dim(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        lo -= 1.0;
        hi += 1.0;
        while hi - lo > tol.max(f64::EPSILON * hi.abs().max(lo.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn largest_eigenvalue(&self, tol: f64) -> f64 {
        self.eigenvalue(self.dim() - 1, tol)
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self, tol: f64) -> Vec<f64> {
        (0..self.dim()).map(|k| self.eigenvalue(k, tol)).collect()
    }

    /// `⟨δ₁, (J − z)⁻¹ δ₁⟩` by the finite continued fraction.
    pub fn m_function(&self, z: Complex64) -> Result<Complex64> {
        let n = self.dim();
        let mut m = Complex64::new(0.0, 0.0);
        for i in (0..n).rev() {
            let tail = if i + 1 < n { self.a[i] * self.a[i] * m } else { Complex64::new(0.0, 0.0) };
            let den = z - self.b[i] + tail;
            if den.norm() == 0.0 {
                return Err(Error::Pole { re: z.re, im: z.im });
            }
            m = -1.0 / den;
        }
        Ok(m)
    }
}

/// Reduction of the star adjacency operator to Jacobi matrices: the
/// radially symmetric part `J₀` and `k − 1` copies of the half-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarDecomposition {
    pub k: usize,
    /// First off-diagonal entry of `J₀`; later entries are 1 and `b ≡ 0`.
    pub a1: f64,
    pub halfline_copies: usize,
}

impl StarDecomposition {
    /// `J₀` and the half-line cut so that together they have the dimension of
    /// the star with rays of length `ray`.
    pub fn truncated(&self, ray: usize) -> (JacobiMatrix, JacobiMatrix) {
        (JacobiMatrix::star_j0(self.k, ray + 1), JacobiMatrix::half_line(ray))
    }

    /// Eigenvalues of the star with rays of length `ray`, assembled from the
    /// Jacobi pieces.
    pub fn eigenvalues(&self, ray: usize, tol: f64) -> Vec<f64> {
        let (j0, half) = self.truncated(ray);
        let mut all = j0.eigenvalues(tol);
        if ray > 0 {
            let h = half.eigenvalues(tol);
            for _ in 0..self.halfline_copies {
                all.extend_from_slice(&h);
            }
        }
        all.sort_by(f64::total_cmp);
        all
    }
}

pub fn jacobi_star_decomposition(k: usize) -> Result<StarDecomposition> {
    if k < 2 {
        return Err(Error::InvalidParameters("star needs k >= 2".into()));
    }
    Ok(StarDecomposition {
        k,
        a1: (k as f64).sqrt(),
        halfline_copies: k - 1,
    })
}
