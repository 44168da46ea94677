//! Disconnected liquid regions for exponentially separated weights: one
//! cloud curve per weight class.
//!
//! The boundary row is given block by block from the largest part down:
//! block t holds a fraction K_t of the rows, all with part ≈ r_t·N. Its
//! limit measure is the ascending staircase with, for l = s + 1 − t,
//! α_l = r_t + 1 − Σ_{u≤t} K_u and b_l = r_t + 1 − Σ_{u<t} K_u.

use num::{One, Signed, Zero};

use super::system::{Chart, CurveSystem, FrozenBoundaryCurve, TGrid};
use super::WeightProfile;
use crate::error::LimitError;
use crate::partitions::to_f64;
use crate::poly::Poly;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentParams {
    pub n: usize,
    /// (K_t, r_t) from the largest part down.
    pub blocks: Vec<(Rational, Rational)>,
}

/// Ψ_i = Π_k (t − β_{i,k}) / Π_k (t − γ_{i,k}) for each class i.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCurveFamily {
    pub n: usize,
    pub s: usize,
    /// Ascending staircase (α_l, b_l), l = 1..=s.
    pub alpha: Vec<Rational>,
    pub b: Vec<Rational>,
    /// d_1 < … < d_n, 1-based block indices (largest part first).
    pub d: Vec<usize>,
    /// D_i = d_{i+1} − d_i − 1.
    pub big_d: Vec<usize>,
    pub beta: Vec<Vec<Rational>>,
    pub gamma: Vec<Vec<Rational>>,
}

/// χ-interval of component i, affine in κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingRegion {
    pub lo: (f64, f64),
    pub hi: (f64, f64),
}

impl BoundingRegion {
    /// (lo, hi) at height κ.
    pub fn at(&self, kappa: f64) -> (f64, f64) {
        (self.lo.0 + self.lo.1 * kappa, self.hi.0 + self.hi.1 * kappa)
    }

    pub fn contains(&self, chi: f64, kappa: f64, tol: f64) -> bool {
        let (lo, hi) = self.at(kappa);
        chi >= lo - tol && chi <= hi + tol && (-tol..=1.0 + tol).contains(&kappa)
    }

    pub fn overlaps(&self, other: &BoundingRegion) -> bool {
        (0..=1000).any(|k| {
            let kappa = k as f64 / 1000.0;
            let (a, b) = self.at(kappa);
            let (c, d) = other.at(kappa);
            a <= d && c <= b
        })
    }
}

fn sum_range(from: usize, to: usize, f: impl Fn(usize) -> Rational) -> Rational {
    if from > to {
        return Rational::zero();
    }
    (from..=to).map(f).sum()
}

/// d_i, D_i, β_{i,k}, γ_{i,k} from the block data.
pub fn component_params(params: &ComponentParams) -> Result<ComponentCurveFamily, LimitError> {
    let n = params.n;
    let blocks = &params.blocks;
    let s = blocks.len();
    let bad = |m: String| Err(LimitError::Profile(m));
    if n == 0 || s == 0 {
        return bad("need n >= 1 and at least one block".into());
    }
    if blocks.iter().any(|(k, r)| !k.is_positive() || r.is_negative()) {
        return bad("block sizes must be positive and parts nonnegative".into());
    }
    if blocks.windows(2).any(|w| w[0].1 <= w[1].1) {
        return bad("block parts must be strictly decreasing".into());
    }
    let total: Rational = blocks.iter().map(|b| b.0.clone()).sum();
    if !total.is_one() {
        return bad("block sizes must sum to 1".into());
    }
    // cumulative[t] = Σ_{u≤t} K_u (t 1-based, cumulative[0] = 0)
    let mut cumulative = vec![Rational::zero()];
    for (k, _) in blocks {
        let last = cumulative.last().unwrap().clone();
        cumulative.push(last + k);
    }
    let mut d = Vec::with_capacity(n);
    for i in 1..=n {
        let cut = Rational::new(i.into(), n.into());
        if !cumulative.contains(&cut) {
            return Err(LimitError::CutCondition(format!("{i}/{n} is not a block boundary")));
        }
        let start = Rational::new((i - 1).into(), n.into());
        // first block starting at (i−1)/n
        let t = cumulative.iter().position(|c| *c == start).unwrap() + 1;
        d.push(t);
    }
    let mut alpha = vec![Rational::zero(); s];
    let mut b = vec![Rational::zero(); s];
    for t in 1..=s {
        let l = s + 1 - t;
        let r = &blocks[t - 1].1;
        alpha[l - 1] = r + Rational::one() - &cumulative[t];
        b[l - 1] = r + Rational::one() - &cumulative[t - 1];
    }
    let nn = Rational::from_integer(n.into());
    let mut big_d = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for i in 1..=n {
        let di = d[i - 1];
        let next = if i < n { d[i] } else { s + 1 };
        let dd = next - di - 1;
        big_d.push(dd);
        let (mut bi, mut gi) = (Vec::new(), Vec::new());
        let a = |l: usize| alpha[l - 1].clone();
        let bb = |l: usize| b[l - 1].clone();
        for k in 0..=dd {
            // upper = s − d_i − k + 1, always ≥ 1 here
            let upper = s + 1 - di - k;
            let gaps = a(1) + sum_range(2, upper, |l| a(l) - bb(l - 1));
            let base = &nn * gaps + Rational::from_integer((n + 1 - i).into());
            let top = s + 1 - di;
            let lens = |from: usize| sum_range(from, top, |l| bb(l) - a(l));
            bi.push(&base - &nn * lens(upper));
            gi.push(&base - &nn * lens(upper + 1));
        }
        beta.push(bi);
        gamma.push(gi);
    }
    let fam = ComponentCurveFamily { n, s, alpha, b, d, big_d, beta, gamma };
    fam.check_disjoint_supports()?;
    Ok(fam)
}

/// Exact J = Â/B̂ for Φ = num/den and R(w) = constant + Σ r/(w − p).
pub fn homogenize_exact(
    num: &Poly<Rational>,
    den: &Poly<Rational>,
    constant: &Rational,
    poles: &[(Rational, Rational)],
) -> (Poly<Rational>, Poly<Rational>) {
    let factors: Vec<Poly<Rational>> = poles.iter().map(|(p, _)| num - &den.scale(p)).collect();
    let b_hat = factors.iter().fold(Poly::constant(Rational::one()), |acc, f| &acc * f);
    let mut a_hat = b_hat.scale(constant);
    for (k, (_, r)) in poles.iter().enumerate() {
        let mut term = den.scale(r);
        for (l, f) in factors.iter().enumerate() {
            if l != k {
                term = &term * f;
            }
        }
        a_hat = &a_hat + &term;
    }
    (a_hat, b_hat)
}

impl ComponentCurveFamily {
    fn check_disjoint_supports(&self) -> Result<(), LimitError> {
        let mut iv: Vec<(Rational, Rational)> = Vec::new();
        for (bs, gs) in self.beta.iter().zip(&self.gamma) {
            for (b, g) in bs.iter().zip(gs) {
                if b >= g {
                    return Err(LimitError::Profile("empty support interval".into()));
                }
                iv.push((b.clone(), g.clone()));
            }
        }
        iv.sort();
        if iv.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(LimitError::Profile("support intervals overlap".into()));
        }
        Ok(())
    }

    /// Numerator and denominator of Ψ_i (i 1-based).
    pub fn psi_exact(&self, i: usize) -> (Poly<Rational>, Poly<Rational>) {
        (Poly::from_roots(&self.beta[i - 1]), Poly::from_roots(&self.gamma[i - 1]))
    }

    /// Constant and poles of R_i with J_i = R_i(Ψ_i):
    /// class 1 has (n − l) + 1/(w − 1) + Σ_j n_j γ_j/(w + γ_j) over the
    /// distinct c-values γ_j, later classes (n − i + 1) + 1/(w − 1).
    pub fn j_terms(&self, i: usize, weights: &WeightProfile) -> (Rational, Vec<(Rational, Rational)>) {
        let mut poles = vec![(Rational::one(), Rational::one())];
        if i == 1 {
            for (c, m) in weights.distinct_cs() {
                let w = Rational::from_integer(m.into()) * &c;
                poles.push((-c, w));
            }
            (Rational::from_integer((self.n as i64 - weights.l() as i64).into()), poles)
        } else {
            (Rational::from_integer((self.n + 1 - i).into()), poles)
        }
    }

    /// Exact (Â_i, B̂_i) with J_i = Â_i/B̂_i as rational functions of t.
    pub fn j_exact(&self, i: usize, weights: &WeightProfile) -> (Poly<Rational>, Poly<Rational>) {
        let (num, den) = self.psi_exact(i);
        let (c0, poles) = self.j_terms(i, weights);
        homogenize_exact(&num, &den, &c0, &poles)
    }

    pub fn system(&self, i: usize, weights: &WeightProfile) -> CurveSystem {
        let f = |v: &[Rational]| v.iter().map(to_f64).collect::<Vec<f64>>();
        let (c0, poles) = self.j_terms(i, weights);
        CurveSystem::new(
            &f(&self.beta[i - 1]),
            &f(&self.gamma[i - 1]),
            to_f64(&c0),
            poles.iter().map(|(p, r)| (to_f64(p), to_f64(r))).collect(),
            Chart::Component { n: self.n },
        )
    }

    /// Region containing C_i: C_1 in [β_{1,D_1}/n − (n − 1)/n, γ_{1,0}/n],
    /// C_i in [(β_{i,D_i} − κ(n − i))/n, (γ_{i,0} − κ(n − i))/n].
    pub fn bounding_region(&self, i: usize) -> BoundingRegion {
        let n = self.n as f64;
        let b = to_f64(self.beta[i - 1].last().unwrap()) / n;
        let g = to_f64(&self.gamma[i - 1][0]) / n;
        if i == 1 {
            BoundingRegion { lo: (b - (n - 1.0) / n, 0.0), hi: (g, 0.0) }
        } else {
            let slope = -((self.n - i) as f64) / n;
            BoundingRegion { lo: (b, slope), hi: (g, slope) }
        }
    }

    pub fn check_regions(&self) -> Result<(), LimitError> {
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if self.bounding_region(i).overlaps(&self.bounding_region(j)) {
                    return Err(LimitError::Overlap(i, j));
                }
            }
        }
        Ok(())
    }
}

pub fn component_systems(family: &ComponentCurveFamily, weights: &WeightProfile) -> Vec<CurveSystem> {
    (1..=family.n).map(|i| family.system(i, weights)).collect()
}

/// One traced curve per class, after checking that the bounding regions
/// are disjoint.
pub fn component_curves(
    family: &ComponentCurveFamily,
    weights: &WeightProfile,
    grid: &TGrid,
) -> Result<Vec<FrozenBoundaryCurve>, LimitError> {
    if weights.n() != family.n {
        return Err(LimitError::Weights(format!("expected period {}, got {}", family.n, weights.n())));
    }
    family.check_regions()?;
    component_systems(family, weights).iter().map(|s| s.trace(grid)).collect()
}
