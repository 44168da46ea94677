//! Scaling limits: limit measures of the boundary rows, the liquid-region
//! density, frozen boundaries, their dual cloud curves, and the
//! disconnected components that appear for exponentially separated
//! weights.
//!
//! Coordinates: the reduced position x̃ of a row at height κ maps to the
//! chart coordinate X = (1 − κ)x̃, and the plotted coordinate is
//! χ = (1 − γ)X + γ(1 − κ), where γ is the fraction of vanishing
//! x-weights. The packed block of zero parts occupies χ < γ(1 − κ).

mod cloud;
mod components;
mod density;
mod moments;
mod system;

pub use cloud::{cloud_class, dual_curve, intersection_poly, winding_check, WindingReport};
pub use components::{
    component_curves, component_params, component_systems, homogenize_exact, BoundingRegion, ComponentCurveFamily, ComponentParams,
};
pub use density::{density, density_map, is_liquid, physical_density, reduced_density_x, DensityCell};
pub use moments::{density_cdf, density_moments, moments_contour, moments_contour_with, safe_radius, staircase_moment};
pub use system::{Chart, CurveSample, CurveSystem, FrozenBoundaryCurve, TGrid};

use num::complex::Complex64;
use num::{One, Zero};

use crate::error::LimitError;
use crate::lattice::LatticeSpec;
use crate::partitions::{to_f64, CountingMeasure};
use crate::Rational;

/// Limit of the boundary row: unit density on ∪[α_i, b_i], plus the share γ
/// of vanishing x-weights.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryProfile {
    alpha: Vec<Rational>,
    b: Vec<Rational>,
    gamma: Rational,
}

impl BoundaryProfile {
    pub fn new(alpha: Vec<Rational>, b: Vec<Rational>, gamma: Rational) -> Result<Self, LimitError> {
        let bad = |m: &str| Err(LimitError::Profile(m.to_string()));
        if alpha.is_empty() || alpha.len() != b.len() {
            return bad("alpha and b must be nonempty and of equal length");
        }
        if !alpha[0].is_zero() {
            return bad("alpha_1 must be 0");
        }
        for i in 0..alpha.len() {
            if alpha[i] >= b[i] || (i > 0 && b[i - 1] >= alpha[i]) {
                return bad("need 0 = alpha_1 < b_1 < alpha_2 < ... < b_s");
            }
        }
        let total: Rational = alpha.iter().zip(&b).map(|(a, bb)| bb - a).sum();
        if !total.is_one() {
            return bad("segment lengths must sum to 1");
        }
        if gamma < Rational::zero() || gamma >= Rational::one() {
            return bad("gamma must lie in [0, 1)");
        }
        if gamma > b[0] {
            return bad("gamma must not exceed b_1");
        }
        Ok(BoundaryProfile { alpha, b, gamma })
    }

    pub fn s(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn gamma_f64(&self) -> f64 {
        to_f64(&self.gamma)
    }

    fn tilde(&self, v: &Rational) -> Rational {
        (v - &self.gamma) / (Rational::one() - &self.gamma)
    }

    /// α̃ with α̃_1 = 0.
    pub fn alpha_tilde(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.alpha.iter().map(|a| self.tilde(a)).collect();
        out[0] = Rational::zero();
        out
    }

    pub fn b_tilde(&self) -> Vec<Rational> {
        self.b.iter().map(|b| self.tilde(b)).collect()
    }

    /// Nondegenerate tilded segments; the first one vanishes when γ = b_1.
    pub fn segments_tilde(&self) -> Vec<(f64, f64)> {
        self.alpha_tilde()
            .iter()
            .zip(self.b_tilde())
            .filter(|(a, b)| *a < b)
            .map(|(a, b)| (to_f64(a), to_f64(&b)))
            .collect()
    }

    /// The reduced measure m̃ of the boundary row.
    pub fn limit_measure(&self) -> LimitMeasure {
        LimitMeasure::Staircase(self.segments_tilde())
    }
}

/// Row types and weights of one period, in the regime where every nonzero
/// x equals a common value.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightProfile {
    n: usize,
    i2: Vec<bool>,
    y: Vec<Rational>,
    x: Rational,
}

impl WeightProfile {
    /// `i2[i]` marks a square row; `y` is read only there.
    pub fn new(i2: Vec<bool>, y: Vec<Rational>, x: Rational) -> Result<Self, LimitError> {
        let n = i2.len();
        if n == 0 || y.len() != n {
            return Err(LimitError::Weights("i2 and y must be nonempty and of equal length".into()));
        }
        if x <= Rational::zero() {
            return Err(LimitError::Weights("x must be positive".into()));
        }
        if i2.iter().zip(&y).any(|(&sq, y)| sq && *y <= Rational::zero()) {
            return Err(LimitError::Weights("square-row y must be positive".into()));
        }
        Ok(WeightProfile { n, i2, y, x })
    }

    /// From lattice period data; the nonzero x must agree. Also returns γ.
    pub fn from_period(a: &[bool], x: &[Rational], y: &[Rational]) -> Result<(Self, Rational), LimitError> {
        let nz: Vec<&Rational> = x.iter().filter(|v| !v.is_zero()).collect();
        let Some(&first) = nz.first() else {
            return Err(LimitError::Weights("all x vanish".into()));
        };
        if nz.iter().any(|v| *v != first) {
            return Err(LimitError::Weights("nonzero x-weights must be equal".into()));
        }
        let gamma = Rational::new((x.len() - nz.len()).into(), x.len().into());
        Ok((Self::new(a.iter().map(|b| !b).collect(), y.to_vec(), first.clone())?, gamma))
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<(Self, Rational), LimitError> {
        Self::from_period(&spec.a, &spec.x, &spec.y)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn is_square(&self, i: usize) -> bool {
        self.i2[i - 1]
    }

    /// l = |I₂ ∩ [n]|.
    pub fn l(&self) -> usize {
        self.i2.iter().filter(|b| **b).count()
    }

    /// c_i = 1/(y_i x) over I₂ ∩ [n], in index order.
    pub fn cs(&self) -> Vec<Rational> {
        self.i2
            .iter()
            .zip(&self.y)
            .filter(|(sq, _)| **sq)
            .map(|(_, y)| Rational::one() / (y * &self.x))
            .collect()
    }

    /// Distinct c values with multiplicities, decreasing.
    pub fn distinct_cs(&self) -> Vec<(Rational, usize)> {
        let mut cs = self.cs();
        cs.sort_by(|a, b| b.cmp(a));
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for c in cs {
            match out.last_mut() {
                Some((v, m)) if *v == c => *m += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// m, the number of distinct c values.
    pub fn m(&self) -> usize {
        self.distinct_cs().len()
    }
}

/// A limit measure: atoms, or unit density on a union of intervals.
#[derive(Clone, Debug, PartialEq)]
pub enum LimitMeasure {
    Atoms(CountingMeasure),
    Staircase(Vec<(f64, f64)>),
}

impl LimitMeasure {
    pub fn moment(&self, j: u32) -> f64 {
        match self {
            LimitMeasure::Atoms(m) => to_f64(&m.moment(j)),
            LimitMeasure::Staircase(seg) => seg
                .iter()
                .map(|(a, b)| (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / (j + 1) as f64)
                .sum(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.moment(0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LimitMeasure::Atoms(m) => m.cdf(x),
            LimitMeasure::Staircase(seg) => seg.iter().map(|(a, b)| (x.min(*b) - a).max(0.0)).sum(),
        }
    }
}

/// log Π (t − α̃_i)/(t − b̃_i), each factor on the principal branch, which
/// is analytic off the support.
pub fn stieltjes_staircase(profile: &BoundaryProfile, t: Complex64) -> Result<Complex64, LimitError> {
    let mut acc = Complex64::zero();
    for (a, b) in profile.segments_tilde() {
        if t == Complex64::new(a, 0.0) || t == Complex64::new(b, 0.0) {
            return Err(LimitError::Singular(format!("t = {t} is a branch point")));
        }
        acc += ((t - a) / (t - b)).ln();
    }
    Ok(acc)
}

/// Φ_s(t) = Π (t − α̃_i)/(t − b̃_i).
pub fn phi_s(profile: &BoundaryProfile, t: Complex64) -> Result<Complex64, LimitError> {
    let mut acc = Complex64::one();
    for (a, b) in profile.segments_tilde() {
        if t == Complex64::new(b, 0.0) {
            return Err(LimitError::Singular(format!("t = {t} is a pole of Phi")));
        }
        acc *= (t - a) / (t - b);
    }
    Ok(acc)
}

/// The rational system behind the single frozen boundary:
/// J = 1 − kl + 1/(Φ − 1) + Σ_j k n_j γ_j/(Φ + γ_j), k = 1/(n(1 − γ)).
pub fn staircase_system(profile: &BoundaryProfile, weights: &WeightProfile) -> CurveSystem {
    let seg = profile.segments_tilde();
    let zeros: Vec<f64> = seg.iter().map(|s| s.0).collect();
    let poles: Vec<f64> = seg.iter().map(|s| s.1).collect();
    let gamma = profile.gamma_f64();
    let k = 1.0 / (weights.n() as f64 * (1.0 - gamma));
    let mut jp = vec![(1.0, 1.0)];
    for (c, m) in weights.distinct_cs() {
        let c = to_f64(&c);
        jp.push((-c, k * m as f64 * c));
    }
    CurveSystem::new(&zeros, &poles, 1.0 - k * weights.l() as f64, jp, Chart::Staircase { gamma })
}

/// J(t) = Φ[1/(Φ − 1) − (1/(n(1 − γ))) Σ_i 1/(Φ + c_i)].
pub fn j_function(profile: &BoundaryProfile, weights: &WeightProfile, t: Complex64) -> Result<Complex64, LimitError> {
    let phi = phi_s(profile, t)?;
    let k = 1.0 / (weights.n() as f64 * (1.0 - profile.gamma_f64()));
    if phi == Complex64::one() {
        return Err(LimitError::Singular("Phi = 1".into()));
    }
    let mut sum = Complex64::zero();
    for c in weights.cs() {
        let d = phi + to_f64(&c);
        if d == Complex64::zero() {
            return Err(LimitError::Singular("Phi = -c".into()));
        }
        sum += 1.0 / d;
    }
    Ok(phi * (1.0 / (phi - 1.0) - k * sum))
}

/// χ(t) = (t − J/J′)(1 − γ) + γ(1 − 1/J′), κ(t) = 1/J′, on κ ∈ [0, 1].
pub fn frozen_boundary(
    profile: &BoundaryProfile,
    weights: &WeightProfile,
    grid: &TGrid,
) -> Result<FrozenBoundaryCurve, LimitError> {
    let mut curve = staircase_system(profile, weights).trace(grid)?;
    curve.class = Some(cloud_class(profile, weights));
    Ok(curve)
}

/// Double-root residual of the defining system at (χ, κ).
pub fn double_root_residual(chi: f64, kappa: f64, system: &CurveSystem) -> Result<f64, LimitError> {
    system.residual(chi, kappa)
}
