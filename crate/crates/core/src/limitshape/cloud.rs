//! The dual (cloud) curve and its line-intersection counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::cplx;
use super::{staircase_system, BoundaryProfile, WeightProfile};
use crate::error::LimitError;
use crate::poly::Poly;

/// (x∨, y∨) = (−1/t̃, −J̃/t̃) with t̃ = (1 − γ)t + γ and J̃ = (1 − γ)J + γ.
pub fn dual_curve(profile: &BoundaryProfile, weights: &WeightProfile, t: f64) -> Result<(f64, f64), LimitError> {
    let g = profile.gamma_f64();
    let tt = (1.0 - g) * t + g;
    if tt == 0.0 {
        return Err(LimitError::Singular("(1 - gamma)t + gamma = 0".into()));
    }
    let j = staircase_system(profile, weights).j(cplx(t));
    if !j.is_finite() {
        return Err(LimitError::Singular(format!("J has a pole at t = {t}")));
    }
    let jt = (1.0 - g) * j.re + g;
    Ok((-1.0 / tt, -jt / tt))
}

/// (m + 1)s, or (m + 1)(s − 1) when γ = b_1.
pub fn cloud_class(profile: &BoundaryProfile, weights: &WeightProfile) -> usize {
    let s = if profile.gamma() == &profile.b()[0] { profile.s() - 1 } else { profile.s() };
    (weights.m() + 1) * s
}

/// The line y∨ = c·x∨ + d meets the dual curve where
/// (1 − γ)Â(t) + (γ − c + d·t̃)B̂(t) = 0.
pub fn intersection_poly(profile: &BoundaryProfile, weights: &WeightProfile, c: f64, d: f64) -> Poly<f64> {
    let sys = staircase_system(profile, weights);
    let (a, b) = sys.j_polys();
    let g = profile.gamma_f64();
    let lin = Poly::new(vec![g - c + d * g, d * (1.0 - g)]);
    &a.scale(&(1.0 - g)) + &(&lin * b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingReport {
    pub class: usize,
    /// Real intersection counts, one per random line.
    pub counts: Vec<usize>,
    pub min_count: usize,
    /// Counts for lines through the origin of the dual plane.
    pub center_counts: Vec<usize>,
    pub passed: bool,
}

fn real_roots(p: &Poly<f64>) -> Result<usize, LimitError> {
    let roots = p.to_complex().roots()?;
    Ok(roots.iter().filter(|z| z.im.abs() <= 1e-7 * z.norm().max(1.0)).count())
}

/// Count real intersections of `lines` random lines with the dual curve
/// and compare the minimum with class − 2.
pub fn winding_check(
    profile: &BoundaryProfile,
    weights: &WeightProfile,
    lines: usize,
    seed: u64,
) -> Result<WindingReport, LimitError> {
    let class = cloud_class(profile, weights);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = Vec::with_capacity(lines);
    let mut center_counts = Vec::new();
    for _ in 0..lines {
        let angle = rng.random_range(-1.5..1.5f64);
        let c = angle.tan();
        let d = rng.random_range(-3.0..3.0);
        counts.push(real_roots(&intersection_poly(profile, weights, c, d))?);
        center_counts.push(real_roots(&intersection_poly(profile, weights, c, 0.0))?);
    }
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let passed = min_count + 2 >= class;
    Ok(WindingReport { class, counts, min_count, center_counts, passed })
}
