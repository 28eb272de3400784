//! Borel transforms `m(z) = ⟨δ, (H − z)⁻¹ δ⟩` of the half-line, the line and
//! operators built from them by rank-one perturbation and coefficient
//! stripping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominators smaller than this are reported as poles.
const POLE_TOL: f64 = 1e-14;

/// `√(z² − 4)` on the branch that behaves like `z` at infinity: the product
/// of the principal roots of `z − 2` and `z + 2`. It maps the upper half-plane
/// into itself and is negative on `(−∞, −2)`.
pub fn sqrt_z2_minus_4(z: Complex64) -> Complex64 {
    let z = Complex64::new(z.re, z.im + 0.0);
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

fn off_spectrum(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re.abs() <= 2.0 || !z.is_finite() {
        Err(Error::OnSpectrum { re: z.re, im: z.im })
    } else {
        Ok(())
    }
}

/// `m_ℕ(z) = (−z + √(z² − 4)) / 2` for the adjacency operator on ℕ at its
/// end vertex, evaluated as `−2 / (z + √(z² − 4))` to avoid cancellation.
pub fn m_halfline(z: Complex64) -> Result<Complex64> {
    off_spectrum(z)?;
    Ok(-2.0 / (z + sqrt_z2_minus_4(z)))
}

/// `m₀(z) = −1 / √(z² − 4)` for the adjacency operator on ℤ at 0.
pub fn m_line(z: Complex64) -> Result<Complex64> {
    off_spectrum(z)?;
    Ok(-1.0 / sqrt_z2_minus_4(z))
}

/// A composable m-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MHandle {
    HalfLine,
    Line,
    /// `m = m_base / (1 + c · m_base)`: the base operator plus `c·⟨δ, ·⟩δ`.
    RankOne { base: Box<MHandle>, coupling: f64 },
    /// `m = −1 / (z − b₁ + a₁² · m_tail)`: the Jacobi operator whose first
    /// row is `(b₁, a₁)` followed by the operator of `m_tail`.
    Stripped { tail: Box<MHandle>, a1: f64, b1: f64 },
}

impl MHandle {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            MHandle::HalfLine => m_halfline(z),
            MHandle::Line => m_line(z),
            MHandle::RankOne { base, coupling } => {
                let m0 = base.eval(z)?;
                let den = 1.0 + *coupling * m0;
                if den.norm() < POLE_TOL {
                    return Err(Error::Pole { re: z.re, im: z.im });
                }
                Ok(m0 / den)
            }
            MHandle::Stripped { tail, a1, b1 } => {
                let mt = tail.eval(z)?;
                let den = z - *b1 + *a1 * *a1 * mt;
                if den.norm() < POLE_TOL {
                    return Err(Error::Pole { re: z.re, im: z.im });
                }
                Ok(-1.0 / den)
            }
        }
    }

    /// Aronszajn–Krein formula for the rank-one perturbation with coupling `c`.
    pub fn aronszajn_krein(self, coupling: f64) -> MHandle {
        MHandle::RankOne {
            base: Box::new(self),
            coupling,
        }
    }

    pub fn coefficient_stripping(self, a1: f64, b1: f64) -> Result<MHandle> {
        if !(a1 > 0.0) || !b1.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "stripping needs a1 > 0 and finite b1, got a1 = {a1}, b1 = {b1}"
            )));
        }
        Ok(MHandle::Stripped {
            tail: Box::new(self),
            a1,
            b1,
        })
    }

    /// Fibre of the comb at quasi-momentum `θ`: the line with `2 cos θ` added
    /// at the origin.
    pub fn comb_fiber(theta: f64) -> MHandle {
        MHandle::Line.aronszajn_krein(2.0 * theta.cos())
    }

    /// The star `S_k` seen from its centre: `−1 / (z + k·m_ℕ(z))`.
    pub fn star_center(k: usize) -> MHandle {
        MHandle::Stripped {
            tail: Box::new(MHandle::HalfLine),
            a1: (k as f64).sqrt(),
            b1: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_values() {
        let m = m_halfline(c(3.0, 0.0)).unwrap();
        assert!((m.re - (-3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15 && m.im == 0.0);
        let m = m_line(c(3.0, 0.0)).unwrap();
        assert!((m.re + 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!(m_halfline(c(-3.0, 0.0)).unwrap().re > 0.0);
        assert!(m_line(c(-3.0, 0.0)).unwrap().re > 0.0);
    }

    #[test]
    fn real_spectrum_is_refused() {
        assert!(matches!(m_halfline(c(1.0, 0.0)), Err(Error::OnSpectrum { .. })));
        assert!(matches!(m_line(c(-2.0, 0.0)), Err(Error::OnSpectrum { .. })));
    }

    #[test]
    fn herglotz_and_asymptotics() {
        for h in [MHandle::HalfLine, MHandle::Line, MHandle::comb_fiber(0.3), MHandle::star_center(4)] {
            assert!(h.eval(c(0.0, 2.0)).unwrap().im > 0.0);
            let z = c(0.0, 1e6);
            assert!((h.eval(z).unwrap() + 1.0 / z).norm() < 1e-10);
        }
    }

    #[test]
    fn stripping_fixed_point_and_poles() {
        let z = c(0.7, 0.4);
        let m = MHandle::HalfLine.coefficient_stripping(1.0, 0.0).unwrap();
        assert!((m.eval(z).unwrap() - m_halfline(z).unwrap()).norm() < 1e-14);
        assert_eq!(MHandle::Line.aronszajn_krein(0.0).eval(z).unwrap(), m_line(z).unwrap());
        let pole = 3.0 / 2f64.sqrt();
        assert!(matches!(MHandle::star_center(3).eval(c(pole, 0.0)), Err(Error::Pole { .. })));
        assert!(MHandle::HalfLine.coefficient_stripping(0.0, 0.0).is_err());
    }
}
