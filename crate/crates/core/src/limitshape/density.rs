//! Local density of the limit measure at (χ, κ).
//!
//! Solve t − κJ(t) = X + iε for t (ε → 0⁺) and take the root that
//! continues the Stieltjes transform: z = Φ(t) then has Im z ≤ 0 and the
//! density is −arg(z)/π. In the liquid region that root is one of a
//! conjugate pair; in frozen regions every root is real and the branch is
//! fixed by the sign the small imaginary shift picks up.

use num::complex::Complex64;
use rayon::prelude::*;

use super::system::{cplx, CurveSystem};
use super::{staircase_system, BoundaryProfile, WeightProfile};
use crate::error::LimitError;

const EPS: f64 = 1e-10;
const COMPLEX_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityCell {
    pub chi: f64,
    pub kappa: f64,
    pub density: f64,
}

fn scale_of(sys: &CurveSystem, x: f64) -> f64 {
    let (c, s) = sys.center_scale();
    1f64.max(x.abs()).max(c.abs() + s)
}

/// Density in the chart coordinate X (reduced measure, values in [0, 1]).
pub fn reduced_density_x(sys: &CurveSystem, x: f64, kappa: f64) -> Result<f64, LimitError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(LimitError::KappaRange(kappa));
    }
    let scale = scale_of(sys, x);
    let roots = sys.roots(Complex64::new(x, EPS * scale), kappa)?;
    let pick = |ts: &mut dyn Iterator<Item = &Complex64>| -> Option<Complex64> {
        ts.map(|&t| (t, sys.phi(t)))
            .filter(|(_, z)| z.im < 0.0 && z.is_finite())
            .max_by(|a, b| a.0.im.abs().total_cmp(&b.0.im.abs()))
            .map(|(_, z)| z)
    };
    let mut complex = roots.iter().filter(|t| t.im.abs() > COMPLEX_TOL * scale);
    if let Some(z) = pick(&mut complex) {
        return Ok((-z.arg() / std::f64::consts::PI).clamp(0.0, 1.0));
    }
    // frozen: exactly one real root is pushed below the axis
    let below: Vec<Complex64> = roots
        .iter()
        .map(|&t| sys.phi(t))
        .filter(|z| z.im < 0.0 && z.is_finite())
        .collect();
    match below.as_slice() {
        [z] => Ok(if z.re < 0.0 { 1.0 } else { 0.0 }),
        [] => Ok(0.0),
        many => {
            // ambiguous ties: fall back to the most clearly shifted one
            let z = many.iter().max_by(|a, b| (a.im / a.norm()).abs().total_cmp(&(b.im / b.norm()).abs())).unwrap();
            Ok(if z.re < 0.0 { 1.0 } else { 0.0 })
        }
    }
}

/// Whether the system has a non-real pair of roots at (X, κ).
pub fn is_liquid(sys: &CurveSystem, x: f64, kappa: f64) -> Result<bool, LimitError> {
    let scale = scale_of(sys, x);
    Ok(sys.roots(cplx(x), kappa)?.iter().any(|t| t.im.abs() > COMPLEX_TOL * scale))
}

/// Density of the reduced limit measure at (χ, κ), with
/// ∫ density dχ = (1 − γ)(1 − κ). The packed zero block (χ < γ(1 − κ))
/// carries no reduced mass and reads 0 here.
pub fn density(chi: f64, kappa: f64, profile: &BoundaryProfile, weights: &WeightProfile) -> Result<f64, LimitError> {
    let sys = staircase_system(profile, weights);
    reduced_density_x(&sys, sys.chart().x_of(chi, kappa), kappa)
}

/// Density of all particles: the zero block reads 1.
pub fn physical_density(
    chi: f64,
    kappa: f64,
    profile: &BoundaryProfile,
    weights: &WeightProfile,
) -> Result<f64, LimitError> {
    let gamma = profile.gamma_f64();
    if chi < gamma * (1.0 - kappa) {
        return Ok(1.0);
    }
    density(chi, kappa, profile, weights)
}

/// Physical density on a w × h grid of cell centres over
/// [χ_lo, χ_hi] × (0, 1), evaluated in parallel. Rows run over κ.
pub fn density_map(
    profile: &BoundaryProfile,
    weights: &WeightProfile,
    (w, h): (usize, usize),
    (chi_lo, chi_hi): (f64, f64),
) -> Result<Vec<DensityCell>, LimitError> {
    let sys = staircase_system(profile, weights);
    let gamma = profile.gamma_f64();
    (0..w * h)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % w, k / w);
            let chi = chi_lo + (chi_hi - chi_lo) * (i as f64 + 0.5) / w as f64;
            let kappa = (j as f64 + 0.5) / h as f64;
            let density = if chi < gamma * (1.0 - kappa) {
                1.0
            } else {
                reduced_density_x(&sys, sys.chart().x_of(chi, kappa), kappa)?
            };
            Ok(DensityCell { chi, kappa, density })
        })
        .collect()
}
