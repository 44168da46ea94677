//! The algebraic engine shared by the single-curve and component cases.
//!
//! Both have the shape Φ = P/Q (a ratio of monic products) and
//! J(t) = R(Φ(t)) with R(w) = c₀ + Σ r_k/(w − p_k). Writing
//! B̂ = Π_k (P − p_k Q) and Â = c₀B̂ + Σ_k r_k Q Π_{l≠k}(P − p_l Q) gives
//! J = Â/B̂, and the frozen boundary is the locus where
//! (t − X)B̂(t) − κÂ(t) has a double root. X is the chart coordinate,
//! affinely related to χ.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use num::complex::Complex64;

use crate::error::LimitError;
use crate::poly::{relative_residual, Poly};

/// How the chart coordinate X = t − κJ(t) maps to the plotted χ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    /// χ = (1 − γ)X + γ(1 − κ).
    Staircase { gamma: f64 },
    /// χ = X / n.
    Component { n: usize },
}

impl Chart {
    pub fn chi(&self, x: f64, kappa: f64) -> f64 {
        match *self {
            Chart::Staircase { gamma } => (1.0 - gamma) * x + gamma * (1.0 - kappa),
            Chart::Component { n } => x / n as f64,
        }
    }

    pub fn x_of(&self, chi: f64, kappa: f64) -> f64 {
        match *self {
            Chart::Staircase { gamma } => (chi - gamma * (1.0 - kappa)) / (1.0 - gamma),
            Chart::Component { n } => chi * n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub chi: f64,
    pub kappa: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrozenBoundaryCurve {
    pub samples: Vec<CurveSample>,
    /// Index ranges of samples forming connected arcs.
    pub segments: Vec<Range<usize>>,
    /// Degree of the dual curve, when known.
    pub class: Option<usize>,
}

impl FrozenBoundaryCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|s| (s.chi, s.kappa))
    }

    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    /// (χ_min, χ_max, κ_min, κ_max).
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        let first = self.samples.first()?;
        Some(self.samples.iter().fold(
            (first.chi, first.chi, first.kappa, first.kappa),
            |(a, b, c, d), s| (a.min(s.chi), b.max(s.chi), c.min(s.kappa), d.max(s.kappa)),
        ))
    }
}

/// Parameter grid for curve tracing.
#[derive(Clone, Debug, PartialEq)]
pub enum TGrid {
    /// `initial` uniform angles θ with t = c + h·tan θ, then chord
    /// subdivision up to `depth` levels.
    Adaptive { initial: usize, depth: u32 },
    Explicit(Vec<f64>),
}

impl Default for TGrid {
    fn default() -> Self {
        TGrid::Adaptive { initial: 1500, depth: 10 }
    }
}

#[derive(Clone, Debug)]
pub struct CurveSystem {
    p: Poly<f64>,
    q: Poly<f64>,
    constant: f64,
    poles: Vec<(f64, f64)>,
    a_hat: Poly<f64>,
    b_hat: Poly<f64>,
    // P − p_k Q, kept apart so that Φ − p_k never suffers cancellation
    factors: Vec<Poly<f64>>,
    chart: Chart,
    center: f64,
    scale: f64,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl CurveSystem {
    /// Φ = ∏(t − zeros)/∏(t − poles), R(w) = constant + Σ r/(w − p).
    pub fn new(phi_zeros: &[f64], phi_poles: &[f64], constant: f64, j_poles: Vec<(f64, f64)>, chart: Chart) -> Self {
        let p = Poly::from_roots(phi_zeros);
        let q = Poly::from_roots(phi_poles);
        let factors: Vec<Poly<f64>> = j_poles.iter().map(|(pk, _)| &p - &q.scale(pk)).collect();
        let b_hat = factors.iter().fold(Poly::constant(1.0), |acc, f| &acc * f);
        let mut a_hat = b_hat.scale(&constant);
        for (k, (_, rk)) in j_poles.iter().enumerate() {
            let mut term = q.scale(rk);
            for (l, f) in factors.iter().enumerate() {
                if l != k {
                    term = &term * f;
                }
            }
            a_hat = &a_hat + &term;
        }
        let special: Vec<f64> = phi_zeros.iter().chain(phi_poles).copied().collect();
        let (lo, hi) = special
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let (center, scale) = if special.is_empty() { (0.0, 1.0) } else { ((lo + hi) / 2.0, ((hi - lo) / 2.0).max(0.5)) };
        CurveSystem { p, q, constant, poles: j_poles, a_hat, b_hat, factors, chart, center, scale }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// Numerator and denominator of Φ.
    pub fn phi_polys(&self) -> (&Poly<f64>, &Poly<f64>) {
        (&self.p, &self.q)
    }

    /// J = Â/B̂.
    pub fn j_polys(&self) -> (&Poly<f64>, &Poly<f64>) {
        (&self.a_hat, &self.b_hat)
    }

    pub fn j_poles(&self) -> &[(f64, f64)] {
        &self.poles
    }

    pub fn j_constant(&self) -> f64 {
        self.constant
    }

    /// Characteristic location and width of the special points of Φ.
    pub fn center_scale(&self) -> (f64, f64) {
        (self.center, self.scale)
    }

    pub fn phi(&self, t: Complex64) -> Complex64 {
        self.p.to_complex().eval(&t) / self.q.to_complex().eval(&t)
    }

    pub fn phi_prime(&self, t: Complex64) -> Complex64 {
        let (p, q) = (self.p.to_complex(), self.q.to_complex());
        let qv = q.eval(&t);
        (p.derivative().eval(&t) * qv - p.eval(&t) * q.derivative().eval(&t)) / (qv * qv)
    }

    /// J = c₀ + Σ r_k Q/(P − p_k Q).
    pub fn j(&self, t: Complex64) -> Complex64 {
        let qv = self.q.to_complex().eval(&t);
        self.poles
            .iter()
            .zip(&self.factors)
            .fold(c(self.constant), |acc, ((_, rk), f)| acc + rk * qv / f.to_complex().eval(&t))
    }

    pub fn j_prime(&self, t: Complex64) -> Complex64 {
        let q = self.q.to_complex();
        let (qv, dq) = (q.eval(&t), q.derivative().eval(&t));
        self.poles
            .iter()
            .zip(&self.factors)
            .map(|((_, rk), f)| {
                let f = f.to_complex();
                let fv = f.eval(&t);
                rk * (dq * fv - qv * f.derivative().eval(&t)) / (fv * fv)
            })
            .sum()
    }

    /// (X, κ) at real t, with κ = 1/J′ and X = t − κJ.
    pub fn chart_point(&self, t: f64) -> Option<(f64, f64)> {
        let jp = self.j_prime(c(t)).re;
        let j = self.j(c(t)).re;
        if !jp.is_finite() || !j.is_finite() || jp == 0.0 {
            return None;
        }
        let kappa = 1.0 / jp;
        Some((t - kappa * j, kappa))
    }

    /// (χ, κ) at real t.
    pub fn point(&self, t: f64) -> Option<(f64, f64)> {
        self.chart_point(t).map(|(x, k)| (self.chart.chi(x, k), k))
    }

    /// (t − X)B̂ − κÂ, complex X allowed.
    pub fn system_poly(&self, x: Complex64, kappa: f64) -> Poly<Complex64> {
        let b = self.b_hat.to_complex();
        let lin = Poly::new(vec![-x, c(1.0)]);
        &(&lin * &b) - &self.a_hat.to_complex().scale(&c(kappa))
    }

    /// Smallest value of the system polynomial at its own critical points,
    /// relative to the size of the terms tB̂, XB̂ and κÂ it is built from
    /// (a componentwise backward error): zero exactly on the curve.
    pub fn residual_chart(&self, x: f64, kappa: f64) -> Result<f64, LimitError> {
        let p = self.system_poly(c(x), kappa);
        let dp = p.derivative();
        if dp.is_zero() {
            return Err(LimitError::Singular("system polynomial is constant in t".into()));
        }
        let abs_sum = |q: &Poly<f64>, r: f64| q.coeffs().iter().rev().fold(0.0, |acc, a| acc * r + a.abs());
        dp.roots()?
            .iter()
            .map(|&z| {
                let r = z.norm();
                let scale = (r + x.abs()) * abs_sum(&self.b_hat, r) + kappa * abs_sum(&self.a_hat, r);
                if scale == 0.0 {
                    relative_residual(&p, z)
                } else {
                    p.eval(&z).norm() / scale
                }
            })
            .min_by(f64::total_cmp)
            .ok_or_else(|| LimitError::Singular("system polynomial is linear".into()))
    }

    pub fn residual(&self, chi: f64, kappa: f64) -> Result<f64, LimitError> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(LimitError::KappaRange(kappa));
        }
        self.residual_chart(self.chart.x_of(chi, kappa), kappa)
    }

    /// Roots in t of the system at chart coordinate X (possibly complex).
    pub fn roots(&self, x: Complex64, kappa: f64) -> Result<Vec<Complex64>, LimitError> {
        Ok(self.system_poly(x, kappa).roots()?)
    }

    fn t_of(&self, theta: f64) -> f64 {
        self.center + self.scale * theta.tan()
    }

    /// Trace the curve κ = 1/J′, keeping 0 < κ < 1. A system with κ ≡ 1
    /// (J′ ≡ 1) has no curve and reports every point singular.
    pub fn trace(&self, grid: &TGrid) -> Result<FrozenBoundaryCurve, LimitError> {
        let ts: Vec<f64> = match grid {
            TGrid::Explicit(ts) => ts.clone(),
            TGrid::Adaptive { initial, depth } => self.adaptive_ts(*initial, *depth),
        };
        let pts: Vec<Option<(f64, f64)>> = ts
            .iter()
            .map(|&t| self.point(t).filter(|&(_, k)| k > 0.0 && k < 1.0))
            .collect();
        if pts.iter().all(|p| p.is_none()) {
            return Err(LimitError::AllSingular);
        }
        let diam = {
            let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(x, _) in pts.iter().flatten() {
                a = a.min(x);
                b = b.max(x);
            }
            (b - a).max(1.0)
        };
        let mut samples = Vec::new();
        let mut segments = Vec::new();
        let mut start = 0;
        let mut last: Option<(f64, f64)> = None;
        for (&t, p) in ts.iter().zip(&pts) {
            match p {
                Some((chi, kappa)) => {
                    let jump = last.is_some_and(|(a, b)| (a - chi).hypot(b - kappa) > 0.1 * diam);
                    if last.is_none() || jump {
                        if samples.len() > start {
                            segments.push(start..samples.len());
                        }
                        start = samples.len();
                    }
                    let residual = self.residual_chart(self.chart.x_of(*chi, *kappa), *kappa)?;
                    samples.push(CurveSample { t, chi: *chi, kappa: *kappa, residual });
                    last = Some((*chi, *kappa));
                }
                None => last = None,
            }
        }
        if samples.len() > start {
            segments.push(start..samples.len());
        }
        Ok(FrozenBoundaryCurve { samples, segments, class: None })
    }

    fn adaptive_ts(&self, initial: usize, depth: u32) -> Vec<f64> {
        let lim = FRAC_PI_2 * (1.0 - 1e-4);
        let thetas: Vec<f64> = (0..initial)
            .map(|k| -lim + 2.0 * lim * k as f64 / (initial - 1).max(1) as f64)
            .collect();
        let eval = |th: f64| self.point(self.t_of(th)).filter(|&(_, k)| (-0.5..=1.5).contains(&k));
        let h = 2e-3;
        let mut out = Vec::with_capacity(initial * 2);
        for w in thetas.windows(2) {
            out.push(w[0]);
            self.refine(w[0], w[1], eval(w[0]), eval(w[1]), depth, h, &eval, &mut out);
        }
        out.push(*thetas.last().unwrap());
        out.into_iter().map(|th| self.t_of(th)).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        pa: Option<(f64, f64)>,
        pb: Option<(f64, f64)>,
        depth: u32,
        h: f64,
        eval: &dyn Fn(f64) -> Option<(f64, f64)>,
        out: &mut Vec<f64>,
    ) {
        if depth == 0 {
            return;
        }
        let split = match (pa, pb) {
            (Some(x), Some(y)) => (x.0 - y.0).hypot(x.1 - y.1) > h,
            (None, None) => false,
            _ => true,
        };
        if !split {
            return;
        }
        let m = 0.5 * (a + b);
        let pm = eval(m);
        self.refine(a, m, pa, pm, depth - 1, h, eval, out);
        out.push(m);
        self.refine(m, b, pm, pb, depth - 1, h, eval, out);
    }
}

pub(crate) fn cplx(x: f64) -> Complex64 {
    c(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CurveSystem {
        // Φ = t(t−1)/((t−½)(t−3/2)), n = 3, γ = 1/3, c = {1, ½}
        let k = 1.0 / (3.0 * (2.0 / 3.0));
        CurveSystem::new(
            &[0.0, 1.0],
            &[0.5, 1.5],
            1.0 - 2.0 * k,
            vec![(1.0, 1.0), (-1.0, k), (-0.5, 0.5 * k)],
            Chart::Staircase { gamma: 1.0 / 3.0 },
        )
    }

    #[test]
    fn homogenized_j_matches_direct() {
        let s = example();
        let (a, b) = s.j_polys();
        for t in [-2.3, 0.2, 0.77, 1.2, 4.0] {
            let direct = s.j(cplx(t)).re;
            assert!((a.eval(&t) / b.eval(&t) - direct).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = example();
        for t in [-1.7, 0.31, 0.9, 2.6] {
            let h = 1e-6;
            let fd = (s.j(cplx(t + h)) - s.j(cplx(t - h))).re / (2.0 * h);
            let an = s.j_prime(cplx(t)).re;
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
        }
    }

    #[test]
    fn curve_points_are_double_roots() {
        let s = example();
        for t in [-0.8, 0.25, 0.7, 2.2, 5.0] {
            if let Some((x, k)) = s.chart_point(t) {
                if k > 0.0 && k < 1.0 {
                    assert!(s.residual_chart(x, k).unwrap() < 1e-10);
                }
            }
        }
    }
}
