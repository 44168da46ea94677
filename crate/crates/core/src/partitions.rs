//! Young diagrams, interlacing and Schur polynomial evaluation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::PartitionError;
use crate::Rational;

/// Weakly decreasing sequence of nonnegative integers. Zero parts count
/// towards the length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self, PartitionError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::NotDecreasing(parts));
        }
        Ok(Partition(parts))
    }

    pub fn zeros(len: usize) -> Self {
        Partition(vec![0; len])
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Part `i` (0-based), zero past the end.
    pub fn part(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn zero_parts(&self) -> usize {
        self.0.iter().rev().take_while(|&&p| p == 0).count()
    }

    /// Column lengths of the diagram; trailing zeros carry no information
    /// and are not produced.
    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        Partition(
            (1..=first)
                .map(|c| self.0.iter().take_while(|&&p| p >= c).count() as u64)
                .collect(),
        )
    }

    /// Keep the first `len` parts.
    pub fn truncated(&self, len: usize) -> Partition {
        Partition(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn padded(&self, len: usize) -> Partition {
        let mut v = self.0.clone();
        v.resize(len.max(v.len()), 0);
        Partition(v)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Partition {
    type Err = PartitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        Partition::new(parts)
    }
}

/// `lower ≺ upper`: upper_i ≥ lower_i ≥ upper_{i+1}, missing parts zero.
pub fn interlaces(lower: &Partition, upper: &Partition) -> bool {
    let n = lower.len().max(upper.len());
    (0..n).all(|i| upper.part(i) >= lower.part(i) && lower.part(i) >= upper.part(i + 1))
}

/// `lower ≺′ upper`: the conjugates interlace, i.e. upper/lower is a vertical strip.
pub fn co_interlaces(lower: &Partition, upper: &Partition) -> bool {
    interlaces(&lower.conjugate(), &upper.conjugate())
}

/// Finite measure with rational atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingMeasure {
    atoms: Vec<(Rational, Rational)>,
}

impl CountingMeasure {
    /// Atoms are merged by position and sorted increasingly.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (x, m) in atoms {
            *merged.entry(x).or_insert_with(Rational::zero) += m;
        }
        CountingMeasure {
            atoms: merged.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().map(|(_, m)| m.clone()).sum()
    }

    pub fn moment(&self, j: u32) -> Rational {
        self.atoms
            .iter()
            .map(|(x, m)| num::pow(x.clone(), j as usize) * m)
            .sum()
    }

    /// Mass of (-inf, x].
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|(p, _)| p.to_f64().unwrap_or(f64::INFINITY) <= x)
            .map(|(_, m)| m.to_f64().unwrap_or(0.0))
            .sum()
    }
}

/// Atoms of mass 1/N at (λ_i + N − i)/N.
pub fn counting_measure(p: &Partition) -> Result<CountingMeasure, PartitionError> {
    let n = p.len();
    if n == 0 {
        return Err(PartitionError::Empty);
    }
    let nn = BigInt::from(n);
    let mass = BigRational::new(BigInt::one(), nn.clone());
    Ok(CountingMeasure::from_atoms(p.parts().iter().enumerate().map(|(i, &l)| {
        let pos = BigInt::from(l) + BigInt::from(n - 1 - i);
        (BigRational::new(pos, nn.clone()), mass.clone())
    })))
}

pub const SSYT_BOUND: u64 = 1_000_000;

/// Schur polynomial as a sum over semistandard tableaux with entries in 1..=N.
pub fn schur_ssyt(p: &Partition, u: &[Rational]) -> Result<Rational, PartitionError> {
    check_len(p, u)?;
    let n = u.len();
    let shape: Vec<usize> = p.parts().iter().filter(|&&r| r > 0).map(|&r| r as usize).collect();
    if shape.len() > n {
        return Ok(Rational::zero());
    }
    // Monomials are collected as exponent vectors, then evaluated once.
    let mut monomials: HashMap<Vec<u32>, u64> = HashMap::new();
    let mut rows: Vec<Vec<usize>> = shape.iter().map(|&r| vec![0; r]).collect();
    let mut exps = vec![0u32; n];
    let mut count = 0u64;
    fill_ssyt(&shape, n, 0, 0, &mut rows, &mut exps, &mut monomials, &mut count)?;
    Ok(monomials
        .into_iter()
        .map(|(e, c)| {
            let mono: Rational = e
                .iter()
                .zip(u)
                .map(|(&k, x)| num::pow(x.clone(), k as usize))
                .product();
            mono * BigRational::from_integer(c.into())
        })
        .sum())
}

#[allow(clippy::too_many_arguments)]
fn fill_ssyt(
    shape: &[usize],
    n: usize,
    r: usize,
    c: usize,
    rows: &mut Vec<Vec<usize>>,
    exps: &mut Vec<u32>,
    out: &mut HashMap<Vec<u32>, u64>,
    count: &mut u64,
) -> Result<(), PartitionError> {
    if r == shape.len() {
        *count += 1;
        if *count > SSYT_BOUND {
            return Err(PartitionError::EnumerationBound(SSYT_BOUND));
        }
        *out.entry(exps.clone()).or_insert(0) += 1;
        return Ok(());
    }
    let (nr, nc) = if c + 1 == shape[r] { (r + 1, 0) } else { (r, c + 1) };
    let lo_left = if c > 0 { rows[r][c - 1] } else { 1 };
    let lo_up = if r > 0 { rows[r - 1][c] + 1 } else { 1 };
    // Entry in row r is at least r+1; leave room below for strictly
    // increasing columns.
    let below = shape[r + 1..].iter().take_while(|&&w| w > c).count();
    let hi = n - below;
    for v in lo_left.max(lo_up)..=hi {
        rows[r][c] = v;
        exps[v - 1] += 1;
        fill_ssyt(shape, n, nr, nc, rows, exps, out, count)?;
        exps[v - 1] -= 1;
    }
    Ok(())
}

fn check_len<T>(p: &Partition, u: &[T]) -> Result<(), PartitionError> {
    if p.len() != u.len() {
        return Err(PartitionError::LengthMismatch { expected: p.len(), got: u.len() });
    }
    Ok(())
}

/// Determinant over the rationals by Gaussian elimination.
pub fn det_rational(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    det
}

/// Ratio of the alternant det(u_i^{λ_j+N−j}) to the Vandermonde. Exact;
/// the variables must be pairwise distinct.
pub fn schur_bialternant(p: &Partition, u: &[Rational]) -> Result<Rational, PartitionError> {
    check_len(p, u)?;
    let n = u.len();
    for i in 0..n {
        for j in i + 1..n {
            if u[i] == u[j] {
                return Err(PartitionError::RepeatedVariables);
            }
        }
    }
    let alt = |exps: &dyn Fn(usize) -> u64| {
        let m = (0..n)
            .map(|i| (0..n).map(|j| num::pow(u[i].clone(), exps(j) as usize)).collect())
            .collect();
        det_rational(m)
    };
    let num = alt(&|j| p.part(j) + (n - 1 - j) as u64);
    let den = alt(&|j| (n - 1 - j) as u64);
    Ok(num / den)
}

/// Float bialternant. Refuses inputs whose Vandermonde is badly conditioned.
pub fn schur_bialternant_f64(p: &Partition, u: &[f64]) -> Result<f64, PartitionError> {
    check_len(p, u)?;
    let n = u.len();
    if n <= 1 {
        return Ok(u.first().map_or(1.0, |x| x.powi(p.part(0) as i32)));
    }
    let scale = u.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            gap = gap.min((u[i] - u[j]).abs());
        }
    }
    if gap == 0.0 {
        return Err(PartitionError::RepeatedVariables);
    }
    let ratio = (scale / gap).powi(n as i32 - 1);
    if !(ratio < 1e10) {
        return Err(PartitionError::IllConditioned(ratio));
    }
    let (s, l) = log_schur_bialternant(p, u)?;
    Ok(s * l.exp())
}

/// Log-domain bialternant: returns (sign, log|s_λ(u)|). Rows and columns of
/// the alternant are rescaled by their largest entries before elimination.
pub fn log_schur_bialternant(p: &Partition, u: &[f64]) -> Result<(f64, f64), PartitionError> {
    check_len(p, u)?;
    let n = u.len();
    let exps: Vec<f64> = (0..n).map(|j| (p.part(j) + (n - 1 - j) as u64) as f64).collect();
    let mut sign = 1.0;
    let mut logv = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = u[i] - u[j];
            if d == 0.0 {
                return Err(PartitionError::RepeatedVariables);
            }
            sign *= d.signum();
            logv += d.abs().ln();
        }
    }
    let (s, l) = log_det_alternant(u, &exps);
    if s == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    Ok((s * sign, l - logv))
}

fn log_det_alternant(u: &[f64], exps: &[f64]) -> (f64, f64) {
    let n = u.len();
    let mut logm = vec![vec![0.0f64; n]; n];
    let mut sgn = vec![vec![1.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if exps[j] == 0.0 {
                logm[i][j] = 0.0;
            } else if u[i] == 0.0 {
                logm[i][j] = f64::NEG_INFINITY;
            } else {
                logm[i][j] = exps[j] * u[i].abs().ln();
                if u[i] < 0.0 && exps[j] % 2.0 == 1.0 {
                    sgn[i][j] = -1.0;
                }
            }
        }
    }
    let mut shift = 0.0;
    for row in logm.iter_mut() {
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            row.iter_mut().for_each(|x| *x -= m);
            shift += m;
        }
    }
    for j in 0..n {
        let m = (0..n).map(|i| logm[i][j]).fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            (0..n).for_each(|i| logm[i][j] -= m);
            shift += m;
        }
    }
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| sgn[i][j] * logm[i][j].exp()).collect())
        .collect();
    let (s, l) = log_det_f64(a);
    (s, l + shift)
}

/// LU with partial pivoting; (sign, log|det|).
pub fn log_det_f64(mut a: Vec<Vec<f64>>) -> (f64, f64) {
    let n = a.len();
    let mut sign = 1.0;
    let mut logd = 0.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        if a[piv][col] == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if piv != col {
            a.swap(piv, col);
            sign = -sign;
        }
        let p = a[col][col];
        sign *= p.signum();
        logd += p.abs().ln();
        for r in col + 1..n {
            let f = a[r][col] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    (sign, logd)
}

/// s_ψ(1,…,1) with m ones by the Weyl dimension formula.
pub fn schur_weyl_ones(p: &Partition, m: usize) -> Result<Rational, PartitionError> {
    if p.len() != m {
        return Err(PartitionError::LengthMismatch { expected: m, got: p.len() });
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..m {
        for j in i + 1..m {
            let d = p.part(i) as i128 - p.part(j) as i128 + (j - i) as i128;
            num *= BigInt::from(d);
            den *= BigInt::from(j - i);
        }
    }
    Ok(BigRational::new(num, den))
}

/// Complete homogeneous symmetric polynomials h_0..=h_k.
fn complete_homogeneous(u: &[Rational], k: usize) -> Vec<Rational> {
    let mut h = vec![Rational::zero(); k + 1];
    h[0] = Rational::one();
    for x in u {
        for d in 1..=k {
            let add = x * &h[d - 1];
            h[d] += add;
        }
    }
    h
}

/// General exact evaluation (any values, repeats and zeros allowed) by the
/// Jacobi–Trudi determinant.
pub fn schur(p: &Partition, u: &[Rational]) -> Rational {
    let l = p.len() - p.zero_parts();
    if l == 0 {
        return Rational::one();
    }
    if l > u.len() {
        return Rational::zero();
    }
    let h = complete_homogeneous(u, (p.part(0) as usize) + l);
    let m = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let k = p.part(i) as i64 - i as i64 + j as i64;
                    if k < 0 {
                        Rational::zero()
                    } else {
                        h[k as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    det_rational(m)
}

/// Schur polynomial when exactly `b` of the variables vanish. Fewer zero
/// parts than zero variables gives 0; otherwise the zero slots and the
/// trailing zero parts are dropped together, and an all-equal remainder
/// is evaluated by the Weyl formula.
pub fn schur_with_zeros(p: &Partition, u: &[Rational], b: usize) -> Result<Rational, PartitionError> {
    check_len(p, u)?;
    let n = u.len();
    if b > n {
        return Err(PartitionError::TooManyZeros { zeros: b, len: n });
    }
    let found = u.iter().filter(|x| x.is_zero()).count();
    if found != b {
        return Err(PartitionError::ZeroCountMismatch { declared: b, found });
    }
    if p.zero_parts() < b {
        return Ok(Rational::zero());
    }
    let reduced = p.truncated(n - b);
    let rest: Vec<Rational> = u.iter().filter(|x| !x.is_zero()).cloned().collect();
    if rest.is_empty() {
        return Ok(Rational::one());
    }
    if rest.iter().all(|x| *x == rest[0]) {
        let w = schur_weyl_ones(&reduced, rest.len())?;
        return Ok(num::pow(rest[0].clone(), p.size() as usize) * w);
    }
    let distinct = (0..rest.len()).all(|i| (i + 1..rest.len()).all(|j| rest[i] != rest[j]));
    if distinct {
        schur_bialternant(&reduced, &rest)
    } else {
        Ok(schur(&reduced, &rest))
    }
}

/// Exact Schur value routed through the closed forms whenever they apply.
pub fn schur_reduced(p: &Partition, u: &[Rational]) -> Result<Rational, PartitionError> {
    let b = u.iter().filter(|x| x.is_zero()).count();
    schur_with_zeros(p, u, b)
}

/// Components φ^{(i,σ)} of a partition split by weight class.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPartitionFamily {
    /// Keyed by class index i in 1..=n.
    pub components: BTreeMap<usize, Partition>,
    pub permutation: Vec<usize>,
    pub eta: Vec<u64>,
}

/// Permutation (1-based) sorting the weights decreasingly, ties by index.
pub fn sigma_zero(weights: &[Rational]) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b - 1].cmp(&weights[a - 1]).then(a.cmp(&b)));
    idx
}

/// Split λ by weight class along the ordering σ (1-based). The weight
/// classes are x_1..x_n, which must be pairwise distinct and exhaust the
/// values present.
pub fn split_partition(
    p: &Partition,
    weights: &[Rational],
    sigma: &[usize],
) -> Result<SplitPartitionFamily, PartitionError> {
    let n_all = p.len();
    check_len(p, weights)?;
    let mut seen = vec![false; n_all];
    if sigma.len() != n_all
        || sigma.iter().any(|&s| s == 0 || s > n_all || std::mem::replace(&mut seen[s - 1], true))
    {
        return Err(PartitionError::NotPermutation(n_all));
    }
    let mut classes: Vec<&Rational> = Vec::new();
    for w in weights {
        if !classes.contains(&w) {
            classes.push(w);
        }
    }
    let n = classes.len();
    if weights[..n].iter().zip(&classes).any(|(a, b)| a != *b) {
        return Err(PartitionError::WeightClasses(n));
    }
    let class_of = |w: &Rational| classes.iter().position(|c| *c == w).unwrap() + 1;
    let sw: Vec<&Rational> = sigma.iter().map(|&s| &weights[s - 1]).collect();
    let eta: Vec<u64> = (0..n_all)
        .map(|j| (j + 1..n_all).filter(|&k| sw[k] != sw[j]).count() as u64)
        .collect();
    let mut comps: BTreeMap<usize, Vec<u64>> = (1..=n).map(|i| (i, Vec::new())).collect();
    for j in 0..n_all {
        comps.get_mut(&class_of(sw[j])).unwrap().push(p.part(j) + eta[j]);
    }
    let components = comps
        .into_iter()
        .map(|(i, mut v)| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            (i, Partition(v))
        })
        .collect();
    Ok(SplitPartitionFamily { components, permutation: sigma.to_vec(), eta })
}

/// Exact rational from a small integer pair; used widely in tests and configs.
pub fn ratio(a: i64, b: i64) -> Rational {
    BigRational::new(a.into(), b.into())
}

/// Parse "p/q", an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(BigRational::new(a, b));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.')?;
    if !fp.chars().all(|c| c.is_ascii_digit()) || !ip.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp).parse().ok()?;
    let v = BigRational::new(digits, num::pow(BigInt::from(10), fp.len()));
    Some(if neg { -v } else { v })
}

/// "p/q", or "p" for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}
