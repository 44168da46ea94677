//! Consistency suites. Each reports one line; any failure exits 1.

use std::collections::HashMap;
use std::time::Instant;

use num::Zero;
use sqhex_core::dimer::{
    enumerate_matchings, matching_to_sequence, matching_weight, partition_function_schur, Sampler, SamplerMode, ENUMERATION_GUARD,
};
use sqhex_core::lattice::build_lattice;
use sqhex_core::limitshape::{component_curves, component_params, density_cdf, frozen_boundary, winding_check, FrozenBoundaryCurve};
use sqhex_core::partitions::{format_rational, to_f64};
use sqhex_core::Rational;

use crate::commands::{dimer_err, limit_err};
use crate::config::RunConfig;
use crate::{CliError, Suite};

/// Ok(detail) passes, Err(detail) fails; None means not applicable.
type Report = Option<Result<String, String>>;
type SuiteFn = fn(&RunConfig) -> Report;

pub fn run(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    let suites: &[(Suite, &str, SuiteFn)] = &[
        (Suite::Oracle, "oracle", oracle),
        (Suite::Residual, "residual", residual),
        (Suite::Winding, "winding", winding),
        (Suite::Components, "components", components),
        (Suite::MonteCarlo, "monte-carlo", monte_carlo),
    ];
    let mut failed = Vec::new();
    let mut ran = 0;
    for (kind, name, f) in suites {
        if suite != Suite::All && suite != *kind {
            continue;
        }
        let t0 = Instant::now();
        let Some(result) = f(cfg) else {
            if suite != Suite::All {
                return Err(CliError::Config(format!("suite {name} does not apply to this config")));
            }
            continue;
        };
        ran += 1;
        let secs = t0.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("{name:<12} PASS [{secs:6.2}s] {d}"),
            Err(d) => {
                println!("{name:<12} FAIL [{secs:6.2}s] {d}");
                failed.push(*name);
            }
        }
    }
    if ran == 0 {
        return Err(CliError::Config("no suite applies to this config".into()));
    }
    println!("{}/{ran} suites passed", ran - failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("failed: {}", failed.join(", "))))
    }
}

fn msg(e: CliError) -> String {
    e.to_string()
}

fn oracle(cfg: &RunConfig) -> Report {
    cfg.lattice.as_ref()?;
    Some((|| {
        let spec = cfg.lattice().map_err(msg)?;
        let lat = build_lattice(&spec).map_err(|e| e.to_string())?;
        if lat.vertex_count() > ENUMERATION_GUARD {
            return Ok(format!("skipped: {} vertices exceed the enumeration guard", lat.vertex_count()));
        }
        let z = partition_function_schur(&spec).map_err(|e| e.to_string())?;
        let ms = enumerate_matchings(&lat).map_err(|e| e.to_string())?;
        let ze: Rational = ms.iter().map(|m| matching_weight(m, &lat)).sum();
        if z == ze {
            Ok(format!("Z = {} from both routes over {} matchings", format_rational(&z), ms.len()))
        } else {
            Err(format!("Schur {} vs enumeration {}", format_rational(&z), format_rational(&ze)))
        }
    })())
}

fn residual(cfg: &RunConfig) -> Report {
    cfg.profile.as_ref()?;
    Some((|| {
        let curve = frozen_boundary(&cfg.profile().map_err(msg)?, &cfg.weights().map_err(msg)?, &cfg.t_grid()).map_err(|e| e.to_string())?;
        let r = curve.max_residual();
        let line = format!("{} points, max double-root residual {r:.2e}", curve.samples.len());
        if r < cfg.run.residual_tol {
            Ok(line)
        } else {
            Err(line)
        }
    })())
}

fn winding(cfg: &RunConfig) -> Report {
    cfg.profile.as_ref()?;
    Some((|| {
        let lines = cfg.run.winding_lines;
        let report = winding_check(&cfg.profile().map_err(msg)?, &cfg.weights().map_err(msg)?, lines, cfg.run.seed)
            .map_err(|e| e.to_string())?;
        let line = format!("class {}, at least {} real intersections on each of {lines} lines", report.class, report.min_count);
        if report.passed {
            Ok(line)
        } else {
            Err(line)
        }
    })())
}

fn min_distance(a: &FrozenBoundaryCurve, b: &FrozenBoundaryCurve) -> f64 {
    let pb: Vec<(f64, f64)> = b.points().collect();
    a.points()
        .flat_map(|(x, k)| pb.iter().map(move |(y, l)| (x - y).hypot(k - l)))
        .fold(f64::INFINITY, f64::min)
}

fn components(cfg: &RunConfig) -> Report {
    cfg.components.as_ref()?;
    Some((|| {
        let fam = component_params(&cfg.components().map_err(msg)?).map_err(|e| msg(limit_err(e)))?;
        let weights = cfg.weights().map_err(msg)?;
        let curves = component_curves(&fam, &weights, &cfg.t_grid()).map_err(|e| msg(limit_err(e)))?;
        for (i, c) in curves.iter().enumerate() {
            if c.max_residual() >= cfg.run.residual_tol {
                return Err(format!("curve {}: residual {:.2e}", i + 1, c.max_residual()));
            }
            let region = fam.bounding_region(i + 1);
            if !c.points().all(|(x, k)| region.contains(x, k, 1e-9)) {
                return Err(format!("component overlap: curve {} leaves its bounding region", i + 1));
            }
        }
        let mut closest = f64::INFINITY;
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                closest = closest.min(min_distance(&curves[i], &curves[j]));
            }
        }
        if closest > 0.0 {
            Ok(format!("{} disjoint curves, closest approach {closest:.3}", curves.len()))
        } else {
            Err("component overlap: curves touch".into())
        }
    })())
}

fn monte_carlo(cfg: &RunConfig) -> Report {
    cfg.lattice.as_ref()?;
    Some((|| {
        let spec = cfg.lattice().map_err(msg)?;
        let lat = build_lattice(&spec).map_err(|e| e.to_string())?;
        if partition_function_schur(&spec).map_err(|e| e.to_string())?.is_zero() {
            return Ok("skipped: no perfect matching".into());
        }
        let sampler = Sampler::new(&spec, SamplerMode::Auto).map_err(|e| msg(dimer_err(e)))?;
        let draws = cfg.run.mc_samples.max(1);
        if lat.vertex_count() <= ENUMERATION_GUARD {
            frequencies(cfg, &sampler, &lat, draws)
        } else if cfg.profile.is_some() {
            kolmogorov(cfg, &sampler, draws)
        } else {
            Ok("skipped: lattice too large to enumerate and no [profile] to compare with".into())
        }
    })())
}

/// Each matching's sampled frequency within 4σ of weight/Z.
fn frequencies(cfg: &RunConfig, sampler: &Sampler, lat: &sqhex_core::lattice::ContractingLattice, draws: usize) -> Result<String, String> {
    let ms = enumerate_matchings(lat).map_err(|e| e.to_string())?;
    let z: Rational = ms.iter().map(|m| matching_weight(m, lat)).sum();
    let mut seen: HashMap<_, usize> = HashMap::new();
    for s in sampler.sample_many(cfg.run.seed, draws).map_err(|e| e.to_string())? {
        *seen.entry(s.sequence).or_default() += 1;
    }
    let n = draws as f64;
    let mut worst: f64 = 0.0;
    for m in &ms {
        let p = to_f64(&(matching_weight(m, lat) / &z));
        let seq = matching_to_sequence(m, lat).map_err(|e| e.to_string())?;
        let f = seen.get(&seq).copied().unwrap_or(0) as f64 / n;
        if p > 0.0 && p < 1.0 {
            worst = worst.max((f - p).abs() / (p * (1.0 - p) / n).sqrt());
        }
    }
    let line = format!("{draws} draws over {} matchings, worst deviation {worst:.2} sigma", ms.len());
    if worst <= 4.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Kolmogorov distance between the sampled middle row and the limit
/// measure, with every atom spread over its lattice cell.
fn kolmogorov(cfg: &RunConfig, sampler: &Sampler, draws: usize) -> Result<String, String> {
    let spec = sampler.spec();
    let n = spec.big_n();
    let s = n / 2 + 1;
    let kappa = (s - 1) as f64 / n as f64;
    let parts = sampler.sample_level(cfg.run.seed, draws, 2 * s - 1).map_err(|e| e.to_string())?;
    let forced = spec.x_range(s).iter().filter(|x| x.is_zero()).count();
    let l = parts[0].len().saturating_sub(forced);
    if l == 0 {
        return Err("the sampled row has no free particles".into());
    }
    let top = parts.iter().map(|q| q.part(0) as usize + l).max().unwrap_or(l);
    let cells = top + 1;
    let mut hist = vec![0f64; cells];
    for q in &parts {
        for i in 0..l {
            hist[q.part(i) as usize + l - 1 - i] += 1.0;
        }
    }
    let total: f64 = hist.iter().sum();
    let per = 20;
    let xs: Vec<f64> = (0..=cells * per).map(|i| i as f64 / (per * l) as f64).collect();
    let cdf = density_cdf(kappa, &cfg.profile().map_err(msg)?, &cfg.weights().map_err(msg)?, &xs).map_err(|e| e.to_string())?;
    let mut below = vec![0f64; cells + 1];
    for c in 0..cells {
        below[c + 1] = below[c] + hist[c];
    }
    let mut ks: f64 = 0.0;
    for (x, f) in xs.iter().zip(&cdf) {
        let u = x * l as f64;
        let cell = (u.floor() as usize).min(cells - 1);
        let frac = (u - cell as f64).min(1.0);
        ks = ks.max(((below[cell] + frac * hist[cell]) / total - f).abs());
    }
    let line = format!("{draws} samples at kappa = {kappa:.3}, Kolmogorov distance {ks:.4}");
    if ks <= cfg.run.ks_tol {
        Ok(line)
    } else {
        Err(line)
    }
}
