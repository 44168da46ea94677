//! End-to-end acceptance suite: one line per criterion, PASS or FAIL.
//!
//! Criteria whose published claim cannot be reproduced by a faithful
//! implementation are listed in `KNOWN_RED`; they still run and still
//! print FAIL, but do not fail the process. A known-red check that starts
//! passing is reported as unexpected, which does.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqhex_core::dimer::*;
use sqhex_core::lattice::{build_lattice, LatticeSpec};
use sqhex_core::limitshape::*;
use sqhex_core::partitions::{ratio, schur_reduced, to_f64, Partition};
use sqhex_core::poly::Poly;
use sqhex_core::Rational;

const KNOWN_RED: &[&str] = &["2a"];

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let t0 = Instant::now();
    let res = f();
    let elapsed = t0.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit.filter(|l| elapsed > *l) {
        pass = false;
        detail = format!("{detail}; over the {limit:?} budget");
    }
    Outcome { id, pass, detail, elapsed }
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn two_segments() -> (BoundaryProfile, WeightProfile) {
    let p = BoundaryProfile::new(vec![ratio(0, 1), ratio(1, 1)], vec![ratio(2, 3), ratio(4, 3)], ratio(1, 3)).unwrap();
    let w = WeightProfile::new(vec![false, true, true], vec![ratio(0, 1), ratio(1, 1), ratio(2, 1)], ratio(1, 1)).unwrap();
    (p, w)
}

// ---------------------------------------------------------------- 1

fn schur_equals_enumeration() -> Result<String, String> {
    let specs = common::random_specs(0x5eed_0001, 60, ENUMERATION_GUARD);
    let mut zero = 0;
    let mut with_zero_x = 0;
    for (k, spec) in specs.iter().enumerate() {
        let lat = build_lattice(spec).map_err(|e| e.to_string())?;
        let a = partition_function_schur(spec).map_err(|e| e.to_string())?;
        let b = partition_function_enum(&lat).map_err(|e| e.to_string())?;
        check(a == b, format!("spec {k}: schur {a} vs enumeration {b}"))?;
        zero += usize::from(a.is_zero());
        with_zero_x += usize::from(spec.x_range(1).iter().any(Zero::is_zero));
    }
    Ok(format!("{} specs bit-exact ({with_zero_x} with a zero x, {zero} with Z = 0)", specs.len()))
}

// ---------------------------------------------------------------- 2

/// The twelve-term expansion of s_{3,1,0}(x₁, x₂, x₃) as printed.
fn s310_printed(x: &[Rational; 3]) -> Rational {
    let [a, b, c] = x;
    let m = |e: [u32; 3], k: i64| ratio(k, 1) * num::pow(a.clone(), e[0] as usize) * num::pow(b.clone(), e[1] as usize) * num::pow(c.clone(), e[2] as usize);
    [
        ([3, 1, 0], 1),
        ([3, 0, 1], 1),
        ([2, 2, 0], 1),
        ([2, 1, 1], 2),
        ([2, 0, 2], 1),
        ([1, 3, 0], 1),
        ([1, 2, 1], 2),
        ([1, 1, 2], 2),
        ([1, 0, 3], 1),
        ([0, 3, 1], 1),
        ([0, 2, 2], 1),
        ([0, 1, 3], 1),
    ]
    .into_iter()
    .map(|(e, k)| m(e, k))
    .sum()
}

fn grid_values() -> Vec<Rational> {
    vec![ratio(0, 1), ratio(1, 2), ratio(1, 1), ratio(2, 1), ratio(3, 1), ratio(5, 2)]
}

fn z_enum(x: [Rational; 3], y2: Rational) -> Result<(Rational, usize), String> {
    let spec = common::three_row(x, y2);
    let lat = build_lattice(&spec).map_err(|e| e.to_string())?;
    let ms = enumerate_matchings(&lat).map_err(|e| e.to_string())?;
    let z = ms.iter().map(|m| matching_weight(m, &lat)).sum();
    Ok((z, ms.len()))
}

/// The printed generic identity Z = (1 + y₂x₃)·s_{3,1,0}, checked on a
/// grid fine enough to decide polynomial identity (degree ≤ 5 per variable).
fn example_generic_identity() -> Result<String, String> {
    let vals = grid_values();
    let ys = [ratio(1, 1), ratio(2, 1), ratio(1, 3)];
    let (mut tried, mut bad, mut both_gammas) = (0, 0, 0);
    let mut first = None;
    for a in &vals {
        for b in &vals {
            for c in &vals {
                for y in &ys {
                    let x = [a.clone(), b.clone(), c.clone()];
                    let (z, _) = z_enum(x.clone(), y.clone())?;
                    let s = s310_printed(&x);
                    let claim = (Rational::one() + y * c) * &s;
                    tried += 1;
                    if z != claim {
                        bad += 1;
                        first.get_or_insert_with(|| format!("x = ({a}, {b}, {c}), y₂ = {y}: Z = {z}, claim {claim}"));
                    }
                    if z == (Rational::one() + y * b) * (Rational::one() + y * c) * &s {
                        both_gammas += 1;
                    }
                }
            }
        }
    }
    let note = format!("{both_gammas}/{tried} points fit (1+y₂x₂)(1+y₂x₃)·s_310");
    match first {
        None => Ok(format!("{tried} grid points agree")),
        Some(f) => Err(format!("{bad}/{tried} grid points differ, e.g. {f}; {note}")),
    }
}

fn example_expansion_and_specialisations() -> Result<String, String> {
    let vals = grid_values();
    let shape: Partition = "3,1,0".parse().unwrap();
    for a in &vals {
        for b in &vals {
            for c in &vals {
                let x = [a.clone(), b.clone(), c.clone()];
                let lib = schur_reduced(&shape, &x).map_err(|e| e.to_string())?;
                check(lib == s310_printed(&x), format!("s_310 expansion differs at ({a}, {b}, {c})"))?;
            }
        }
    }
    let mut n = 0;
    for x in [ratio(1, 1), ratio(2, 1), ratio(1, 2), ratio(3, 1)] {
        for y in [ratio(1, 1), ratio(2, 1), ratio(1, 3)] {
            let want = ratio(3, 1) * (Rational::one() + &y * &x) * num::pow(x.clone(), 4);
            let pt = [x.clone(), Rational::zero(), x.clone()];
            let (z, _) = z_enum(pt.clone(), y.clone())?;
            let zs = partition_function_schur(&common::three_row(pt, y.clone())).map_err(|e| e.to_string())?;
            check(z == want && zs == want, format!("x₂ = 0, x = {x}, y₂ = {y}: Z = {z} (schur {zs}), want {want}"))?;
            let (z0, count) = z_enum([x.clone(), Rational::zero(), Rational::zero()], y.clone())?;
            check(z0.is_zero() && count == 0, format!("x₂ = x₃ = 0: Z = {z0} with {count} matchings"))?;
            n += 1;
        }
    }
    Ok(format!("12-term expansion = s_310 on 216 points; x₂ = 0 and x₂ = x₃ = 0 exact at {n} points each"))
}

// ---------------------------------------------------------------- 3

fn sampler_frequencies() -> Result<String, String> {
    let spec = common::three_row([ratio(1, 1), ratio(2, 1), ratio(1, 2)], ratio(3, 2));
    let lat = build_lattice(&spec).map_err(|e| e.to_string())?;
    let ms = enumerate_matchings(&lat).map_err(|e| e.to_string())?;
    let z: Rational = ms.iter().map(|m| matching_weight(m, &lat)).sum();
    let mut prob: HashMap<MatchingSequence, f64> = HashMap::new();
    for m in &ms {
        let seq = matching_to_sequence(m, &lat).map_err(|e| e.to_string())?;
        prob.insert(seq, to_f64(&(matching_weight(m, &lat) / &z)));
    }
    let draws = 100_000usize;
    let sampler = Sampler::new(&spec, SamplerMode::Auto).map_err(|e| e.to_string())?;
    let samples = sampler.sample_many(2024, draws).map_err(|e| e.to_string())?;
    let mut freq: HashMap<MatchingSequence, usize> = HashMap::new();
    for s in samples {
        check(prob.contains_key(&s.sequence), "sample outside the enumerated matchings")?;
        *freq.entry(s.sequence).or_default() += 1;
    }
    let nf = draws as f64;
    let mut worst: f64 = 0.0;
    for (seq, p) in &prob {
        let f = freq.get(seq).copied().unwrap_or(0) as f64 / nf;
        let sigma = (p * (1.0 - p) / nf).sqrt();
        worst = worst.max((f - p).abs() / sigma);
    }
    check(worst <= 4.0, format!("worst deviation {worst:.2}σ"))?;
    Ok(format!("{} matchings, {draws} draws, worst deviation {worst:.2}σ", ms.len()))
}

// ---------------------------------------------------------------- 4

fn frozen_boundary_geometry() -> Result<String, String> {
    let (p, w) = two_segments();
    let curve = frozen_boundary(&p, &w, &TGrid::default()).map_err(|e| e.to_string())?;
    let worst = curve.max_residual();
    check(worst < 1e-8, format!("max residual {worst:.2e}"))?;
    let tol = 1e-9;
    for (chi, kappa) in curve.points() {
        let inside = (-tol..=1.0 + tol).contains(&kappa) && chi >= -tol && kappa <= -3.0 * chi + 4.0 + tol;
        check(inside, format!("({chi}, {kappa}) leaves the trapezoid"))?;
        check(kappa >= -3.0 * chi + 1.0 - tol, format!("({chi}, {kappa}) enters the frozen triangle"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(312);
    let mut tested = 0;
    while tested < 100 {
        let chi = rng.random_range(0.0..1.0 / 3.0);
        let kappa = rng.random_range(0.0..1.0);
        if kappa <= 0.0 || kappa >= 1.0 - 3.0 * chi {
            continue;
        }
        let d = physical_density(chi, kappa, &p, &w).map_err(|e| e.to_string())?;
        check(d == 0.0 || d == 1.0, format!("density {d} at ({chi}, {kappa}) in the triangle"))?;
        tested += 1;
    }
    Ok(format!("{} points, max residual {worst:.1e}; triangle frozen at {tested} points", curve.samples.len()))
}

// ---------------------------------------------------------------- 5

fn cloud_curve_class() -> Result<String, String> {
    let (p, w) = two_segments();
    let class = cloud_class(&p, &w);
    let want = (w.m() + 1) * p.s();
    check(class == 6 && class == want, format!("class {class}, (m+1)s = {want}"))?;
    let report = winding_check(&p, &w, 100, 5).map_err(|e| e.to_string())?;
    check(report.counts.len() == 100, "wrong number of lines")?;
    check(report.min_count >= class - 2, format!("min real intersections {}", report.min_count))?;
    Ok(format!("class {class} = (m+1)s; min real intersections over 100 lines {}", report.min_count))
}

// ---------------------------------------------------------------- 6

fn moment_cross_validation() -> Result<String, String> {
    let (p, w) = two_segments();
    let mut worst_q: f64 = 0.0;
    for kappa in [0.3, 0.6] {
        let quad = density_moments(kappa, 4, &p, &w).map_err(|e| e.to_string())?;
        for (j, q) in quad.iter().enumerate() {
            let c = moments_contour(kappa, j as u32, &p, &w).map_err(|e| e.to_string())?;
            worst_q = worst_q.max((c - q).abs());
            check((c - q).abs() <= 1e-3, format!("κ = {kappa}, j = {j}: contour {c} vs quadrature {q}"))?;
        }
    }
    // κ = 0: the density is the boundary staircase itself
    let mut worst_s: f64 = 0.0;
    let tiny = density_moments(1e-9, 4, &p, &w).map_err(|e| e.to_string())?;
    for (j, q) in tiny.iter().enumerate() {
        let c = moments_contour(0.0, j as u32, &p, &w).map_err(|e| e.to_string())?;
        let s = staircase_moment(&p, j as u32);
        worst_s = worst_s.max((c - s).abs());
        worst_q = worst_q.max((c - q).abs());
        check((c - s).abs() <= 1e-6, format!("κ = 0, j = {j}: contour {c} vs staircase {s}"))?;
        check((c - q).abs() <= 1e-3, format!("κ → 0, j = {j}: contour {c} vs quadrature {q}"))?;
    }
    Ok(format!("contour vs quadrature ≤ {worst_q:.1e}; κ = 0 vs staircase ≤ {worst_s:.1e}"))
}

// ---------------------------------------------------------------- 7

type RatFn = (Poly<Rational>, Poly<Rational>);

fn rf_add(a: &RatFn, b: &RatFn) -> RatFn {
    (&(&a.0 * &b.1) + &(&b.0 * &a.1), &a.1 * &b.1)
}

/// 1/(u·Ψ + v) for Ψ = P/Q.
fn rf_recip_affine(psi: &RatFn, u: i64, v: i64) -> RatFn {
    let (p, q) = psi;
    let den = &p.scale(&ratio(u, 1)) + &q.scale(&ratio(v, 1));
    (q.clone(), den)
}

fn same(a: &RatFn, b: &RatFn) -> bool {
    &a.0 * &b.1 == &b.0 * &a.1
}

fn roots(v: &[(i64, i64)]) -> Poly<Rational> {
    Poly::from_roots(&v.iter().map(|&(a, b)| ratio(a, b)).collect::<Vec<_>>())
}

fn min_distance(a: &FrozenBoundaryCurve, b: &FrozenBoundaryCurve) -> f64 {
    let pb: Vec<(f64, f64)> = b.points().collect();
    a.points()
        .flat_map(|(x, k)| pb.iter().map(move |(y, l)| ((x - y).powi(2) + (k - l).powi(2)).sqrt()))
        .fold(f64::INFINITY, f64::min)
}

fn disconnected_components() -> Result<String, String> {
    let k = ratio;
    let params = ComponentParams {
        n: 2,
        blocks: vec![(k(1, 4), k(6, 1)), (k(1, 4), k(5, 1)), (k(1, 6), k(2, 1)), (k(1, 6), k(1, 1)), (k(1, 6), k(0, 1))],
    };
    let fam = component_params(&params).map_err(|e| e.to_string())?;
    // r = (6, 5, 2, 1) substituted into the printed Ψ₁, Ψ₂
    let psi1 = (roots(&[(27, 2), (11, 1)]), roots(&[(14, 1), (23, 2)]));
    let psi2 = (roots(&[(0, 1), (7, 3), (14, 3)]), roots(&[(1, 3), (8, 3), (5, 1)]));
    check(same(&fam.psi_exact(1), &psi1), "Ψ₁ differs")?;
    check(same(&fam.psi_exact(2), &psi2), "Ψ₂ differs")?;
    check(fam.psi_exact(1) == psi1 && fam.psi_exact(2) == psi2, "Ψ factors differ")?;
    // printed J₁ has poles at Ψ = 1, −1, −½: c-values 1 and ½
    let w = WeightProfile::new(vec![true, true], vec![k(1, 1), k(2, 1)], k(1, 1)).unwrap();
    let j1 = [rf_recip_affine(&psi1, 1, -1), rf_recip_affine(&psi1, 1, 1), rf_recip_affine(&psi1, 2, 1)]
        .iter()
        .fold((Poly::zero(), Poly::constant(Rational::one())), |acc, t| rf_add(&acc, t));
    let j2 = rf_add(&rf_recip_affine(&psi2, 1, -1), &(Poly::constant(Rational::one()), Poly::constant(Rational::one())));
    check(same(&fam.j_exact(1, &w), &j1), "J₁ differs")?;
    check(same(&fam.j_exact(2, &w), &j2), "J₂ differs")?;
    let mut notes = Vec::new();
    let stated = WeightProfile::new(vec![true, true], vec![k(4, 1), k(1, 4)], k(1, 1)).unwrap();
    for (label, weights) in [("y = (1, 2)", &w), ("y = (4, ¼)", &stated)] {
        let curves = component_curves(&fam, weights, &TGrid::Adaptive { initial: 600, depth: 8 }).map_err(|e| e.to_string())?;
        check(curves.len() == 2, "expected two curves")?;
        for (i, c) in curves.iter().enumerate() {
            check(c.max_residual() < 1e-8, format!("{label}: C{} residual {:.1e}", i + 1, c.max_residual()))?;
            let region = fam.bounding_region(i + 1);
            check(c.points().all(|(x, kk)| region.contains(x, kk, 1e-9)), format!("{label}: C{} leaves its region", i + 1))?;
        }
        check(!fam.bounding_region(1).overlaps(&fam.bounding_region(2)), "bounding regions overlap")?;
        let d = min_distance(&curves[0], &curves[1]);
        check(d > 0.0, format!("{label}: curves touch"))?;
        notes.push(format!("{label}: min distance {d:.2}"));
    }
    Ok(format!("Ψ₁, Ψ₂, J₁, J₂ coefficient-exact; regions disjoint; {}", notes.join(", ")))
}

// ---------------------------------------------------------------- 8

fn monte_carlo_limit_shape() -> Result<String, String> {
    let k = ratio;
    let omega: Vec<u64> = (1..=40).chain(61..=80).collect();
    let spec = LatticeSpec::new(vec![true, false, false], vec![k(1, 1), k(1, 1), k(0, 1)], vec![k(0, 1), k(1, 1), k(2, 1)], omega)
        .map_err(|e| e.to_string())?;
    let n = spec.big_n();
    let sampler = Sampler::new(&spec, SamplerMode::Auto).map_err(|e| e.to_string())?;
    let count = 2000;
    // row N + 1 from the bottom sits at height κ = ½
    let parts = sampler.sample_level(2024, count, n + 1).map_err(|e| e.to_string())?;
    let (p, w) = two_segments();
    // parts forced to zero by vanishing x-weights above the level carry no mass
    let forced = spec.x_range(n / 2 + 1).iter().filter(|x| x.is_zero()).count();
    let l = parts[0].len() - forced;
    let cells = 20 * l;
    let mut hist = vec![0f64; cells];
    for q in &parts {
        for i in 0..l {
            let pos = q.part(i) as usize + l - 1 - i;
            check(pos < cells, "position beyond the histogram")?;
            hist[pos] += 1.0;
        }
    }
    let total: f64 = hist.iter().sum();
    let per = 20;
    let xs: Vec<f64> = (0..=cells * per).map(|i| i as f64 / (per * l) as f64).collect();
    let cdf = density_cdf(0.5, &p, &w, &xs).map_err(|e| e.to_string())?;
    let mut below = vec![0f64; cells + 1];
    for c in 0..cells {
        below[c + 1] = below[c] + hist[c];
    }
    let (mut smooth, mut raw): (f64, f64) = (0.0, 0.0);
    for (x, f) in xs.iter().zip(&cdf) {
        let u = x * l as f64;
        let cell = (u.floor() as usize).min(cells - 1);
        let frac = (u - cell as f64).min(1.0);
        smooth = smooth.max(((below[cell] + frac * hist[cell]) / total - f).abs());
        raw = raw.max((below[cell + 1] / total - f).abs());
    }
    check(smooth <= 0.05, format!("Kolmogorov distance {smooth:.4} (raw {raw:.4})"))?;
    Ok(format!("N = {n}, {count} samples, {l} parts: Kolmogorov distance {smooth:.4} (raw step CDF {raw:.4})"))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let outcomes = vec![
        run("1", Some(secs(60)), schur_equals_enumeration),
        run("2a", None, example_generic_identity),
        run("2b", None, example_expansion_and_specialisations),
        run("3", Some(secs(120)), sampler_frequencies),
        run("4", Some(secs(30)), frozen_boundary_geometry),
        run("5", Some(secs(60)), cloud_curve_class),
        run("6", None, moment_cross_validation),
        run("7", None, disconnected_components),
        run("8", Some(secs(600)), monte_carlo_limit_shape),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_RED.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!("criterion {:<3} {:<18} [{:>7.2}s] {}", o.id, tag, o.elapsed.as_secs_f64(), o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} passed, {unexpected} unexpected", outcomes.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
