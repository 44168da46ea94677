//! Boltzmann sampling of interlacing chains, one row at a time from the
//! boundary ω upward.
//!
//! Given the partition on some row, the lattice above it is again a
//! contracting lattice, so the weight of the remaining configurations is a
//! Schur value times Γ-factors that do not depend on the partition. The
//! conditional law of the next row is therefore
//!
//! * vertical strip μ ≺′ ν on a square row: ∝ y^{|ν|−|μ|} s_ν(x_s, …, x_N),
//! * horizontal strip μ′ ≺ ν: ∝ x_s^{|ν|−|μ′|} s_{μ′}(x_{s+1}, …, x_N).
//!
//! Exact mode enumerates strips with rational weights. Float mode samples
//! the strip coordinate by coordinate: writing l_i = part_i − i, the Schur
//! value is an alternant det[φ_b(l_i)] with φ built from the distinct
//! variable values, so each coordinate's conditional law follows from one
//! linear solve against the partially fixed matrix.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::MatchingSequence;
use crate::error::DimerError;
use crate::lattice::LatticeSpec;
use crate::partitions::{counting_measure, schur_reduced, to_f64, CountingMeasure, Partition};
use crate::Rational;

/// Largest N for which [`SamplerMode::Auto`] picks exact arithmetic.
pub const EXACT_MODE_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerMode {
    Exact,
    Float,
    Auto,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoltzmannSample {
    pub sequence: MatchingSequence,
    pub weight: Rational,
    pub seed: u64,
    pub index: u64,
}

/// Step 2(s−1) is the vertical move on row s, step 2(s−1)+1 the horizontal
/// move from black row s to white row s + 1.
#[derive(Clone, Copy, Debug)]
enum Step {
    Vertical(usize),
    Horizontal(usize),
}

impl Step {
    fn from_index(k: usize) -> Step {
        if k.is_multiple_of(2) {
            Step::Vertical(k / 2 + 1)
        } else {
            Step::Horizontal(k / 2 + 1)
        }
    }
}

struct Distribution {
    outcomes: Vec<Partition>,
    probs: Vec<Rational>,
    cdf: Vec<f64>,
}

pub struct Sampler {
    spec: LatticeSpec,
    mode: SamplerMode,
    cache: RwLock<HashMap<(usize, Partition), Arc<Distribution>>>,
}

impl Sampler {
    pub fn new(spec: &LatticeSpec, mode: SamplerMode) -> Result<Self, DimerError> {
        spec.validate()?;
        if super::partition_function_schur(spec)?.is_zero() {
            return Err(DimerError::ZeroPartitionFunction);
        }
        let mode = match mode {
            SamplerMode::Auto if spec.big_n() <= EXACT_MODE_MAX_N => SamplerMode::Exact,
            SamplerMode::Auto => SamplerMode::Float,
            m => m,
        };
        Ok(Sampler { spec: spec.clone(), mode, cache: RwLock::new(HashMap::new()) })
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    fn rng(seed: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng
    }

    /// Rows 1..=`rows` (bottom up) of one chain; `rows` is capped at 2N + 1.
    pub fn sample_rows(&self, seed: u64, index: u64, rows: usize) -> Result<Vec<Partition>, DimerError> {
        let rows = rows.min(2 * self.spec.big_n() + 1);
        let mut rng = Self::rng(seed, index);
        let mut out = Vec::with_capacity(rows);
        let mut cur = self.spec.boundary();
        out.push(cur.clone());
        for k in 0..rows.saturating_sub(1) {
            cur = self.next(Step::from_index(k), &cur, &mut rng)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn sample(&self, seed: u64, index: u64) -> Result<BoltzmannSample, DimerError> {
        let rows = self.sample_rows(seed, index, 2 * self.spec.big_n() + 1)?;
        let mut mu = Vec::new();
        let mut nu = Vec::new();
        for (r, p) in rows.into_iter().enumerate() {
            if r % 2 == 0 {
                mu.push(p);
            } else {
                nu.push(p);
            }
        }
        let sequence = MatchingSequence::from_rows(&self.spec, mu, nu)?;
        let weight = sequence.weight(&self.spec);
        Ok(BoltzmannSample { sequence, weight, seed, index })
    }

    /// Samples `0..count` in parallel; sample i uses stream i of `seed`.
    pub fn sample_many(&self, seed: u64, count: usize) -> Result<Vec<BoltzmannSample>, DimerError> {
        (0..count as u64).into_par_iter().map(|i| self.sample(seed, i)).collect()
    }

    /// Partitions on row `row` (1-based from the bottom) of `count` chains.
    pub fn sample_level(&self, seed: u64, count: usize, row: usize) -> Result<Vec<Partition>, DimerError> {
        let max = 2 * self.spec.big_n() + 1;
        if row == 0 || row > max {
            return Err(DimerError::InvalidLevel { level: row, max });
        }
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample_rows(seed, i, row).map(|mut r| r.pop().unwrap()))
            .collect()
    }

    fn deterministic(&self, step: Step, cur: &Partition) -> Option<Partition> {
        match step {
            Step::Vertical(s) if self.spec.a_at(s) || self.spec.y_at(s).is_zero() => Some(cur.clone()),
            Step::Horizontal(s) if self.spec.x_at(s).is_zero() => Some(cur.truncated(cur.len() - 1)),
            _ => None,
        }
    }

    fn next(&self, step: Step, cur: &Partition, rng: &mut ChaCha8Rng) -> Result<Partition, DimerError> {
        if let Some(p) = self.deterministic(step, cur) {
            return Ok(p);
        }
        match self.mode {
            SamplerMode::Float => float_transition(&self.spec, step, cur, Chooser::Sample(rng)).map(|(p, _)| p),
            _ => {
                let d = self.distribution(step, cur)?;
                let u: f64 = rng.random();
                let k = d.cdf.partition_point(|&c| c <= u).min(d.outcomes.len() - 1);
                Ok(d.outcomes[k].clone())
            }
        }
    }

    fn distribution(&self, step: Step, cur: &Partition) -> Result<Arc<Distribution>, DimerError> {
        let key = (step_index(step), cur.clone());
        if let Some(d) = self.cache.read().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(exact_distribution(&self.spec, step, cur)?);
        self.cache.write().unwrap().insert(key, d.clone());
        Ok(d)
    }

    /// Exact probability that the sampler produces `seq`: the product of its
    /// conditional steps.
    pub fn sequence_probability(&self, seq: &MatchingSequence) -> Result<Rational, DimerError> {
        let chain = chain_bottom_up(seq);
        let mut p = Rational::one();
        for (k, w) in chain.windows(2).enumerate() {
            let step = Step::from_index(k);
            if let Some(d) = self.deterministic(step, w[0]) {
                if &d != w[1] {
                    return Ok(Rational::zero());
                }
                continue;
            }
            let d = self.distribution(step, w[0])?;
            match d.outcomes.iter().position(|o| o == w[1]) {
                Some(i) => p *= &d.probs[i],
                None => return Ok(Rational::zero()),
            }
        }
        Ok(p)
    }

    /// Same product evaluated by the float engine.
    pub fn sequence_probability_f64(&self, seq: &MatchingSequence) -> Result<f64, DimerError> {
        let chain = chain_bottom_up(seq);
        let mut logp = 0.0;
        for (k, w) in chain.windows(2).enumerate() {
            let step = Step::from_index(k);
            if let Some(d) = self.deterministic(step, w[0]) {
                if &d != w[1] {
                    return Ok(0.0);
                }
                continue;
            }
            let (_, lp) = float_transition(&self.spec, step, w[0], Chooser::Target(w[1]))?;
            logp += lp;
        }
        Ok(logp.exp())
    }
}

fn step_index(step: Step) -> usize {
    match step {
        Step::Vertical(s) => 2 * (s - 1),
        Step::Horizontal(s) => 2 * (s - 1) + 1,
    }
}

fn chain_bottom_up(seq: &MatchingSequence) -> Vec<&Partition> {
    seq.chain()
}

/// All ν of the same length with ν − μ a vertical strip.
fn vertical_strips(mu: &Partition) -> Vec<Partition> {
    let m = mu.parts();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m.len());
    fn go(m: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Partition>) {
        let i = cur.len();
        if i == m.len() {
            out.push(Partition::new(cur.clone()).unwrap());
            return;
        }
        for v in [m[i], m[i] + 1] {
            if i == 0 || v <= cur[i - 1] {
                cur.push(v);
                go(m, cur, out);
                cur.pop();
            }
        }
    }
    go(m, &mut cur, &mut out);
    out
}

/// All μ′ one shorter than ν with ν_{i+1} ≤ μ′_i ≤ ν_i.
fn horizontal_strips(nu: &Partition) -> Vec<Partition> {
    let v = nu.parts();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(v.len().saturating_sub(1));
    fn go(v: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Partition>) {
        let i = cur.len();
        if i + 1 >= v.len() {
            out.push(Partition::new(cur.clone()).unwrap());
            return;
        }
        for p in v[i + 1]..=v[i] {
            cur.push(p);
            go(v, cur, out);
            cur.pop();
        }
    }
    go(v, &mut cur, &mut out);
    out
}

fn exact_distribution(spec: &LatticeSpec, step: Step, cur: &Partition) -> Result<Distribution, DimerError> {
    let (cands, base, vars, from) = match step {
        Step::Vertical(s) => (vertical_strips(cur), spec.y_at(s), spec.x_range(s), cur.size()),
        Step::Horizontal(s) => (horizontal_strips(cur), spec.x_at(s).clone(), spec.x_range(s + 1), cur.size()),
    };
    let mut outcomes = Vec::new();
    let mut weights = Vec::new();
    for c in cands {
        let e = c.size().abs_diff(from) as usize;
        let w = num::pow(base.clone(), e) * schur_reduced(&c, &vars)?;
        if w.is_positive() {
            outcomes.push(c);
            weights.push(w);
        }
    }
    let total: Rational = weights.iter().sum();
    if total.is_zero() {
        return Err(DimerError::ZeroPartitionFunction);
    }
    let probs: Vec<Rational> = weights.into_iter().map(|w| w / &total).collect();
    let mut acc = 0.0;
    let cdf = probs
        .iter()
        .map(|p| {
            acc += to_f64(p);
            acc
        })
        .collect();
    Ok(Distribution { outcomes, probs, cdf })
}

enum Chooser<'a> {
    Sample(&'a mut ChaCha8Rng),
    Target(&'a Partition),
}

/// One strip move in floating point. Returns the new partition and the
/// log-probability of the choices made.
fn float_transition(
    spec: &LatticeSpec,
    step: Step,
    cur: &Partition,
    mut chooser: Chooser<'_>,
) -> Result<(Partition, f64), DimerError> {
    let p = cur.parts();
    let len = p.len();
    let (vars, out_len, log_base, sign) = match step {
        Step::Vertical(s) => (spec.x_range(s), len, to_f64(&spec.y_at(s)).ln(), 1.0),
        Step::Horizontal(s) => (spec.x_range(s + 1), len - 1, to_f64(spec.x_at(s)).ln(), -1.0),
    };
    let zeros = vars.iter().filter(|v| v.is_zero()).count();
    let k = out_len - zeros.min(out_len);
    // trailing coordinates are forced to zero
    let ok = match step {
        Step::Vertical(_) => p[k..].iter().all(|&v| v == 0),
        Step::Horizontal(_) => p[k + 1..].iter().all(|&v| v == 0),
    };
    if !ok {
        return Err(DimerError::Numerical("state has zero weight".into()));
    }
    let cands: Vec<Vec<i64>> = (0..k)
        .map(|i| {
            let ii = i as i64;
            match step {
                Step::Vertical(_) => vec![p[i] as i64 - ii + 1, p[i] as i64 - ii],
                Step::Horizontal(_) => (p[i + 1] as i64..=p[i] as i64).rev().map(|v| v - ii).collect(),
            }
        })
        .collect();
    let logf = |i: usize, l: i64| sign * log_base * (l + i as i64) as f64;

    let mut classes: Vec<(f64, usize)> = Vec::new();
    for v in vars.iter().filter(|v| !v.is_zero()) {
        let w = to_f64(v);
        match classes.iter_mut().find(|(c, _)| *c == w) {
            Some(c) => c.1 += 1,
            None => classes.push((w, 1)),
        }
    }
    let target: Option<Vec<i64>> = match &chooser {
        Chooser::Target(t) => {
            if t.len() != out_len || t.parts()[k..].iter().any(|&v| v != 0) {
                return Ok((Partition::zeros(out_len), f64::NEG_INFINITY));
            }
            Some((0..k).map(|i| t.part(i) as i64 - i as i64).collect())
        }
        Chooser::Sample(_) => None,
    };
    let (ls, logp) = determinantal_walk(&cands, &logf, &classes, |i, probs, values| match &mut chooser {
        Chooser::Sample(rng) => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (j, q) in probs.iter().enumerate() {
                acc += q;
                if u < acc {
                    return Some(j);
                }
            }
            probs.iter().rposition(|&q| q > 0.0)
        }
        Chooser::Target(_) => {
            let want = target.as_ref().unwrap()[i];
            values.iter().position(|&v| v == want)
        }
    })?;
    let mut parts: Vec<u64> = ls.iter().enumerate().map(|(i, &l)| (l + i as i64) as u64).collect();
    parts.resize(out_len, 0);
    Ok((Partition::new(parts).map_err(|e| DimerError::Numerical(e.to_string()))?, logp))
}

/// Orthonormal polynomials of degree < `deg` on the grid lo..=hi, by the
/// Stieltjes recurrence. Row j holds the values of G_j.
fn gram_polynomials(lo: i64, hi: i64, deg: usize) -> Vec<Vec<f64>> {
    let g = (hi - lo + 1) as usize;
    let c = (lo + hi) as f64 / 2.0;
    let h = if hi > lo { (hi - lo) as f64 / 2.0 } else { 1.0 };
    let t: Vec<f64> = (0..g).map(|k| (lo as f64 + k as f64 - c) / h).collect();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(deg);
    if deg == 0 {
        return out;
    }
    let n0 = (g as f64).sqrt();
    out.push(vec![1.0 / n0; g]);
    let mut prev = vec![0.0; g];
    let mut b_prev = 0.0;
    for j in 1..deg {
        let last = &out[j - 1];
        let a: f64 = t.iter().zip(last).map(|(ti, p)| ti * p * p).sum();
        let mut q: Vec<f64> = (0..g).map(|k| (t[k] - a) * last[k] - b_prev * prev[k]).collect();
        // one pass of reorthogonalization keeps high degrees clean
        for r in &out {
            let d: f64 = q.iter().zip(r).map(|(x, y)| x * y).sum();
            q.iter_mut().zip(r).for_each(|(x, y)| *x -= d * y);
        }
        let b = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        prev = last.clone();
        q.iter_mut().for_each(|x| *x /= b);
        b_prev = b;
        out.push(q);
    }
    out
}

/// Sequential sampling of K coordinates whose joint weight is
/// Π f_i(l_i) · det[φ_b(l_i)].
fn determinantal_walk(
    cands: &[Vec<i64>],
    logf: &dyn Fn(usize, i64) -> f64,
    classes: &[(f64, usize)],
    mut pick: impl FnMut(usize, &[f64], &[i64]) -> Option<usize>,
) -> Result<(Vec<i64>, f64), DimerError> {
    let k = cands.len();
    if k == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let numerical = |m: &str| DimerError::Numerical(m.to_string());
    let lo = cands.iter().flatten().copied().min().unwrap();
    let hi = cands.iter().flatten().copied().max().unwrap();
    let g = (hi - lo + 1) as usize;
    let max_mult = classes.iter().map(|c| c.1).max().unwrap_or(0);
    if classes.iter().map(|c| c.1).sum::<usize>() != k || max_mult > g {
        return Err(numerical("basis does not match the coordinate count"));
    }
    let gram = gram_polynomials(lo, hi, max_mult);
    // phi[row][grid]
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &(w, m) in classes {
        let lw = w.ln();
        let vref = if lw > 0.0 { hi } else { lo };
        let e: Vec<f64> = (0..g).map(|x| (lw * (lo + x as i64 - vref) as f64).exp()).collect();
        for gj in gram.iter().take(m) {
            phi.push(gj.iter().zip(&e).map(|(a, b)| a * b).collect());
        }
    }
    let fhat: Vec<Vec<f64>> = cands
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let lf: Vec<f64> = c.iter().map(|&v| logf(i, v)).collect();
            let mx = lf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            lf.iter().map(|x| (x - mx).exp()).collect()
        })
        .collect();
    // a[row][col]
    let mut a = vec![vec![0.0; k]; k];
    for b in 0..k {
        for (v, f) in cands[b].iter().zip(&fhat[b]) {
            let x = (v - lo) as usize;
            for r in 0..k {
                a[r][b] += f * phi[r][x];
            }
        }
        let s = (0..k).map(|r| a[r][b].abs()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(numerical("empty column"));
        }
        (0..k).for_each(|r| a[r][b] /= s);
    }

    let mut chosen = Vec::with_capacity(k);
    let mut logp = 0.0;
    for i in 0..k {
        let m = k - i;
        let bt = DMatrix::from_fn(m, m, |c, r| a[i + r][i + c]);
        let mut e0 = DVector::zeros(m);
        e0[0] = 1.0;
        let rvec = bt.lu().solve(&e0).ok_or_else(|| numerical("singular conditional system"))?;
        let prev = chosen.last().copied();
        let mut probs: Vec<f64> = cands[i]
            .iter()
            .zip(&fhat[i])
            .map(|(&v, f)| {
                if Some(v) == prev {
                    return 0.0;
                }
                let x = (v - lo) as usize;
                let q: f64 = (0..m).map(|r| rvec[r] * phi[i + r][x]).sum();
                (f * q).max(0.0)
            })
            .collect();
        let tot: f64 = probs.iter().sum();
        if !(tot > 0.0) || !tot.is_finite() {
            return Err(numerical("conditional law vanished"));
        }
        probs.iter_mut().for_each(|p| *p /= tot);
        let j = pick(i, &probs, &cands[i]).ok_or_else(|| numerical("no admissible value"))?;
        logp += probs[j].ln();
        let v = cands[i][j];
        chosen.push(v);
        // fix column i to φ(v) and eliminate it from the rows below
        let x = (v - lo) as usize;
        for r in i..k {
            a[r][i] = phi[r][x];
        }
        let piv = (i..k)
            .max_by(|&p, &q| a[p][i].abs().total_cmp(&a[q][i].abs()))
            .unwrap();
        if a[piv][i].abs() == 0.0 {
            return Err(numerical("degenerate pivot"));
        }
        a.swap(i, piv);
        phi.swap(i, piv);
        let (top, rest) = a.split_at_mut(i + 1);
        let (ptop, prest) = phi.split_at_mut(i + 1);
        let prow = &top[i];
        let pphi = &ptop[i];
        for (row, frow) in rest.iter_mut().zip(prest.iter_mut()) {
            let fac = row[i] / prow[i];
            if fac != 0.0 {
                for c in i..k {
                    row[c] -= fac * prow[c];
                }
                for (y, z) in frow.iter_mut().zip(pphi) {
                    *y -= fac * z;
                }
            }
            row[i] = 0.0;
        }
    }
    Ok((chosen, logp))
}

/// Pooled counting measure of the partitions on row `level` (1-based from
/// the bottom), each sample carrying total mass 1/#samples.
pub fn empirical_counting_measure(samples: &[BoltzmannSample], level: usize) -> Result<CountingMeasure, DimerError> {
    let first = samples.first().ok_or(DimerError::NoSamples)?;
    let max = 2 * first.sequence.black_len();
    let parts: Vec<Partition> = samples
        .iter()
        .map(|s| {
            s.sequence
                .row(level)
                .filter(|p| !p.is_empty())
                .cloned()
                .ok_or(DimerError::InvalidLevel { level, max })
        })
        .collect::<Result<_, _>>()?;
    pooled_counting_measure(&parts)
}

/// Average of the counting measures of equal-length partitions.
pub fn pooled_counting_measure(parts: &[Partition]) -> Result<CountingMeasure, DimerError> {
    if parts.is_empty() {
        return Err(DimerError::NoSamples);
    }
    let count = Rational::from_integer(parts.len().into());
    let mut atoms = Vec::new();
    for p in parts {
        let m = counting_measure(p)?;
        atoms.extend(m.atoms().iter().map(|(x, w)| (x.clone(), w / &count)));
    }
    Ok(CountingMeasure::from_atoms(atoms))
}

pub fn sample_matching(spec: &LatticeSpec, seed: u64) -> Result<BoltzmannSample, DimerError> {
    Sampler::new(spec, SamplerMode::Auto)?.sample(seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::ratio;

    fn part(v: &[u64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn strips() {
        assert_eq!(vertical_strips(&part(&[1, 1])), vec![part(&[1, 1]), part(&[2, 1]), part(&[2, 2])]);
        assert_eq!(horizontal_strips(&part(&[2, 0])), vec![part(&[0]), part(&[1]), part(&[2])]);
        assert_eq!(horizontal_strips(&part(&[0])), vec![Partition::empty()]);
    }

    #[test]
    fn gram_is_orthonormal() {
        let g = gram_polynomials(-3, 40, 30);
        for i in 0..30 {
            for j in 0..30 {
                let d: f64 = g[i].iter().zip(&g[j]).map(|(a, b)| a * b).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    /// Float conditional laws against exact enumeration on a mixed-weight
    /// spec with repeated variables.
    #[test]
    fn float_matches_exact_transitions() {
        let spec = LatticeSpec::new(
            vec![false, true, false],
            vec![ratio(2, 1), ratio(1, 2), ratio(2, 1)],
            vec![ratio(3, 1), ratio(1, 1), ratio(1, 3)],
            vec![1, 3, 4, 7, 8, 10],
        )
        .unwrap();
        for (k, cur) in [(0usize, spec.boundary()), (1, part(&[5, 4, 3, 2, 2, 1]))] {
            let step = Step::from_index(k);
            let d = exact_distribution(&spec, step, &cur).unwrap();
            for (o, p) in d.outcomes.iter().zip(&d.probs) {
                let (_, lp) = float_transition(&spec, step, &cur, Chooser::Target(o)).unwrap();
                assert!((lp.exp() - to_f64(p)).abs() < 1e-10, "{o}: {} vs {}", lp.exp(), to_f64(p));
            }
        }
    }

    #[test]
    fn deterministic_minimal_sample() {
        let spec = LatticeSpec::new(vec![true], vec![ratio(1, 1)], vec![ratio(1, 1)], vec![1]).unwrap();
        let s = sample_matching(&spec, 7).unwrap();
        assert_eq!(s.weight, ratio(1, 1));
        assert_eq!(s.sequence.chain().len(), 3);
    }
}
