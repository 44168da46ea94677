//! Moments of the reduced limit measure m̃^κ from a contour integral
//! around z = 1.
//!
//! The generating function needs zH′(z) for the boundary measure. Since
//! exp St(t) = Φ(t), the inverse of the moment generating function is the
//! root t(z) of Φ(t) = z that escapes to infinity as z → 1, and
//! zH′(z) = t(z) − z/(z − 1). Substituting into F_κ gives
//! F_κ(z) = t(z)/(1 − κ) − κz/((1 − κ)(z − 1)) + κz/(n(1 − κ)(1 − γ)) Σ_i 1/(z + c_i).

use num::complex::Complex64;

use super::system::CurveSystem;
use super::{reduced_density_x, staircase_system, BoundaryProfile, WeightProfile};
use crate::error::LimitError;
use crate::partitions::to_f64;
use crate::poly::Poly;
use crate::quad::tanh_sinh;

const POINTS: usize = 512;
const MAX_SHRINKS: usize = 10;

/// j-th moment of the boundary measure m̃ by direct integration.
pub fn staircase_moment(profile: &BoundaryProfile, j: u32) -> f64 {
    profile.limit_measure().moment(j)
}

/// ∫ x^j dm̃^κ.
pub fn moments_contour(
    kappa: f64,
    j: u32,
    profile: &BoundaryProfile,
    weights: &WeightProfile,
) -> Result<f64, LimitError> {
    moments_contour_with(kappa, j, profile, weights, safe_radius(profile, weights)?)
}

/// Half the distance from z = 1 to the nearest other singularity of the
/// integrand: z = 0, the poles −c_i and the critical values of Φ. Small
/// circles lose digits to cancellation, so this is as large as is safe.
pub fn safe_radius(profile: &BoundaryProfile, weights: &WeightProfile) -> Result<f64, LimitError> {
    let seg = profile.segments_tilde();
    let p = Poly::from_roots(&seg.iter().map(|s| s.0).collect::<Vec<_>>());
    let q = Poly::from_roots(&seg.iter().map(|s| s.1).collect::<Vec<_>>());
    let crit = &(&p.derivative() * &q) - &(&p * &q.derivative());
    let mut dist: f64 = 1.0;
    for w in crit.to_complex().roots()? {
        let v = p.to_complex().eval(&w) / q.to_complex().eval(&w);
        if v.is_finite() {
            dist = dist.min((v - 1.0).norm());
        }
    }
    for c in weights.cs() {
        dist = dist.min(1.0 + to_f64(&c));
    }
    Ok((0.5 * dist).clamp(1e-3, 0.5))
}

pub fn moments_contour_with(
    kappa: f64,
    j: u32,
    profile: &BoundaryProfile,
    weights: &WeightProfile,
    radius: f64,
) -> Result<f64, LimitError> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(LimitError::KappaRange(kappa));
    }
    let seg = profile.segments_tilde();
    let p = Poly::from_roots(&seg.iter().map(|s| Complex64::new(s.0, 0.0)).collect::<Vec<_>>());
    let q = Poly::from_roots(&seg.iter().map(|s| Complex64::new(s.1, 0.0)).collect::<Vec<_>>());
    let gamma = profile.gamma_f64();
    let n = weights.n() as f64;
    let cs: Vec<f64> = weights.cs().iter().map(to_f64).collect();

    let f = |z: Complex64| -> Result<Complex64, LimitError> {
        let roots = (&p - &q.scale(&z)).roots()?;
        let t = roots
            .into_iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .ok_or(LimitError::Contour)?;
        let sum: Complex64 = cs.iter().map(|c| 1.0 / (z + c)).sum();
        Ok(t / (1.0 - kappa) - kappa * z / ((1.0 - kappa) * (z - 1.0))
            + kappa * z / (n * (1.0 - kappa) * (1.0 - gamma)) * sum)
    };
    // value and the largest term magnitude, which bounds the roundoff
    let integral = |r: f64| -> Result<(f64, f64), LimitError> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut big: f64 = 0.0;
        for k in 0..POINTS {
            let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / POINTS as f64);
            let z = 1.0 + r * e;
            let dz = Complex64::new(0.0, r) * e;
            let v = f(z)?.powu(j + 1) / z * dz;
            if !v.is_finite() {
                return Err(LimitError::Contour);
            }
            big = big.max(v.norm());
            acc += v;
        }
        // (1/(2πi(j+1))) ∮, trapezoid weight 2π/POINTS
        let val = acc / POINTS as f64 / Complex64::new(0.0, (j + 1) as f64);
        Ok((val.re, big / (j + 1) as f64))
    };
    let mut r = radius;
    let (mut prev, _) = integral(r)?;
    for _ in 0..MAX_SHRINKS {
        let (next, big) = integral(0.75 * r)?;
        let tol = (1e-10 * next.abs().max(1.0)).max(1e-13 * big);
        if (next - prev).abs() <= tol {
            return Ok(prev);
        }
        r *= 0.75;
        prev = next;
    }
    Err(LimitError::Contour)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Phase {
    Empty,
    Packed,
    Liquid,
}

const SCAN: usize = 4000;

type Piece = (f64, f64, Phase);

/// Split the x̃ axis into empty, packed and liquid stretches of m̃^κ.
fn phase_pieces(sys: &CurveSystem, kappa: f64, profile: &BoundaryProfile) -> Result<Vec<Piece>, LimitError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(LimitError::KappaRange(kappa));
    }
    let phase = |xt: f64| -> Result<Phase, LimitError> {
        let d = reduced_density_x(sys, (1.0 - kappa) * xt, kappa)?;
        Ok(if d <= 1e-12 {
            Phase::Empty
        } else if d >= 1.0 - 1e-12 {
            Phase::Packed
        } else {
            Phase::Liquid
        })
    };
    let seg = profile.segments_tilde();
    let lo = seg.first().map_or(0.0, |s| s.0) - 1.0;
    let hi = (seg.last().map_or(1.0, |s| s.1) + 2.0) / (1.0 - kappa);
    let step = (hi - lo) / SCAN as f64;

    let mut pieces = Vec::new();
    let mut a = lo;
    let mut cur = phase(lo)?;
    for k in 1..=SCAN {
        let x = lo + step * k as f64;
        let ph = phase(x)?;
        if ph != cur {
            let (mut l, mut r) = (x - step, x);
            for _ in 0..60 {
                let m = 0.5 * (l + r);
                if phase(m)? == cur {
                    l = m;
                } else {
                    r = m;
                }
            }
            let edge = 0.5 * (l + r);
            pieces.push((a, edge, cur));
            a = edge;
            cur = ph;
        }
    }
    pieces.push((a, hi, cur));
    Ok(pieces)
}

/// ∫_a^b x^j dm̃^κ over the pieces, clipped to [a, b].
fn integrate(
    sys: &CurveSystem,
    kappa: f64,
    pieces: &[Piece],
    (a, b): (f64, f64),
    j: u32,
    level: u32,
) -> Result<f64, LimitError> {
    let mut acc = 0.0;
    for &(pa, pb, ph) in pieces {
        let (lo, hi) = (pa.max(a), pb.min(b));
        if hi <= lo {
            continue;
        }
        match ph {
            Phase::Empty => {}
            Phase::Packed => {
                let e = j as i32 + 1;
                acc += (hi.powi(e) - lo.powi(e)) / e as f64;
            }
            Phase::Liquid => {
                let mut err = None;
                acc += tanh_sinh(
                    |x| match reduced_density_x(sys, (1.0 - kappa) * x, kappa) {
                        Ok(d) => d * x.powi(j as i32),
                        Err(e) => {
                            err = Some(e);
                            0.0
                        }
                    },
                    lo,
                    hi,
                    level,
                );
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
    }
    Ok(acc)
}

/// Moments 0..=jmax of m̃^κ by integrating the density profile in x̃.
/// Frozen stretches are integrated exactly; liquid stretches, whose edges
/// are located by bisection, use tanh-sinh to absorb the square-root
/// behaviour at the edges.
pub fn density_moments(
    kappa: f64,
    jmax: u32,
    profile: &BoundaryProfile,
    weights: &WeightProfile,
) -> Result<Vec<f64>, LimitError> {
    let sys = staircase_system(profile, weights);
    let pieces = phase_pieces(&sys, kappa, profile)?;
    (0..=jmax)
        .map(|j| integrate(&sys, kappa, &pieces, (f64::NEG_INFINITY, f64::INFINITY), j, 7))
        .collect()
}

/// Distribution function of m̃^κ at ascending points `xs`.
pub fn density_cdf(
    kappa: f64,
    profile: &BoundaryProfile,
    weights: &WeightProfile,
    xs: &[f64],
) -> Result<Vec<f64>, LimitError> {
    let sys = staircase_system(profile, weights);
    let pieces = phase_pieces(&sys, kappa, profile)?;
    let mut prev = f64::NEG_INFINITY;
    let mut acc = 0.0;
    xs.iter()
        .map(|&x| {
            acc += integrate(&sys, kappa, &pieces, (prev, x), 0, 4)?;
            prev = prev.max(x);
            Ok(acc)
        })
        .collect()
}
