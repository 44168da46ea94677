use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num::Zero;
use sqhex_core::dimer::{
    empirical_counting_measure, enumerate_matchings, matching_to_sequence, matching_weight, partition_function_schur, Sampler,
    SamplerMode, ENUMERATION_GUARD,
};
use sqhex_core::io::{curve_csv, curves_svg, density_csv, density_svg};
use sqhex_core::lattice::{build_lattice, LatticeSpec};
use sqhex_core::limitshape::{component_curves, component_params, density_map as grid_density, frozen_boundary};
use sqhex_core::partitions::{format_rational, to_f64};
use sqhex_core::{DimerError, LimitError, Rational};

use crate::config::RunConfig;
use crate::{CliError, Format};

pub fn dimer_err(e: DimerError) -> CliError {
    match e {
        DimerError::Numerical(_) | DimerError::NotPerfect(_) | DimerError::BadSequence(_) => CliError::Failure(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

pub fn limit_err(e: LimitError) -> CliError {
    match e {
        LimitError::Profile(_) | LimitError::Weights(_) | LimitError::KappaRange(_) => CliError::Config(e.to_string()),
        LimitError::Overlap(..) => CliError::Failure(format!("component overlap: {e}")),
        _ => CliError::Failure(e.to_string()),
    }
}

fn write(out: &Path, name: &str, body: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Config(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn partition_function(cfg: &RunConfig, oracle: bool) -> Result<(), CliError> {
    let spec = cfg.lattice()?;
    let z = partition_function_schur(&spec).map_err(dimer_err)?;
    let mut line = if z.is_zero() { "Z = 0, no matchings".to_string() } else { format!("Z = {}", format_rational(&z)) };
    if oracle {
        let (count, ze) = enumerated(&spec)?;
        if ze != z {
            println!("{line}");
            return Err(CliError::Failure(format!(
                "oracle disagrees: {count} matchings with total weight {}",
                format_rational(&ze)
            )));
        }
        let s = if count == 1 { "" } else { "s" };
        let _ = write!(line, ", oracle agrees ({count} matching{s})");
    }
    println!("{line}");
    Ok(())
}

fn enumerated(spec: &LatticeSpec) -> Result<(usize, Rational), CliError> {
    let lat = build_lattice(spec).map_err(|e| CliError::Config(e.to_string()))?;
    let ms = enumerate_matchings(&lat).map_err(dimer_err)?;
    let z = ms.iter().map(|m| matching_weight(m, &lat)).sum();
    Ok((ms.len(), z))
}

pub fn sample(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let spec = cfg.lattice()?;
    let (seed, count) = (cfg.run.seed, cfg.run.samples);
    if count == 0 {
        return Err(CliError::Config("sample count must be positive".into()));
    }
    let sampler = Sampler::new(&spec, SamplerMode::Auto).map_err(dimer_err)?;
    let samples = sampler.sample_many(seed, count).map_err(dimer_err)?;

    let mut text = String::new();
    for s in &samples {
        let _ = writeln!(text, "# sample {} seed {} weight {}", s.index, s.seed, format_rational(&s.weight));
        text.push_str(&s.sequence.to_text());
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    write(out, "samples.txt", &text)?;

    let mut csv = String::from("row,position,mass\n");
    for row in 1..=2 * spec.big_n() + 1 {
        // the top rows may be empty
        let Ok(m) = empirical_counting_measure(&samples, row) else { continue };
        for (x, w) in m.atoms() {
            let _ = writeln!(csv, "{row},{},{}", format_rational(x), format_rational(w));
        }
    }
    write(out, "measures.csv", &csv)?;

    let lat = build_lattice(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    if lat.vertex_count() <= ENUMERATION_GUARD {
        let ms = enumerate_matchings(&lat).map_err(dimer_err)?;
        let z: Rational = ms.iter().map(|m| matching_weight(m, &lat)).sum();
        let mut seen: HashMap<_, usize> = HashMap::new();
        for s in &samples {
            *seen.entry(&s.sequence).or_default() += 1;
        }
        let n = count as f64;
        let mut worst: f64 = 0.0;
        let mut csv = String::from("matching,probability,count,frequency,z\n");
        for (k, m) in ms.iter().enumerate() {
            let seq = matching_to_sequence(m, &lat).map_err(dimer_err)?;
            let p = to_f64(&(matching_weight(m, &lat) / &z));
            let c = seen.get(&seq).copied().unwrap_or(0);
            let f = c as f64 / n;
            let score = if p > 0.0 && p < 1.0 { (f - p) / (p * (1.0 - p) / n).sqrt() } else { 0.0 };
            worst = worst.max(score.abs());
            let _ = writeln!(csv, "{k},{p:.12e},{c},{f:.12e},{score:.4}");
        }
        write(out, "frequencies.csv", &csv)?;
        println!("{count} samples over {} matchings, worst deviation {worst:.2} sigma", ms.len());
    } else {
        println!("{count} samples");
    }
    Ok(())
}

pub fn boundary(cfg: &RunConfig, out: &Path, format: Format, components: bool) -> Result<(), CliError> {
    let weights = cfg.weights()?;
    let curves = if components {
        let fam = component_params(&cfg.components()?).map_err(limit_err)?;
        component_curves(&fam, &weights, &cfg.t_grid()).map_err(limit_err)?
    } else {
        vec![frozen_boundary(&cfg.profile()?, &weights, &cfg.t_grid()).map_err(limit_err)?]
    };
    for (i, c) in curves.iter().enumerate() {
        if format.csv() {
            let name = if components { format!("component_{}.csv", i + 1) } else { "boundary.csv".into() };
            write(out, &name, &curve_csv(c))?;
        }
        println!("curve {}: {} points, max residual {:.2e}", i + 1, c.samples.len(), c.max_residual());
    }
    if format.svg() {
        write(out, "boundary.svg", &curves_svg(&curves, 640, 480))?;
    }
    Ok(())
}

pub fn density_map(cfg: &RunConfig, out: &Path, format: Format, (w, h): (usize, usize)) -> Result<(), CliError> {
    let profile = cfg.profile()?;
    let weights = cfg.weights()?;
    let window = match cfg.run.chi {
        Some([lo, hi]) if lo < hi => (lo, hi),
        Some(_) => return Err(CliError::Config("run.chi must be increasing".into())),
        None => (0.0, to_f64(profile.b().last().expect("profile has a segment"))),
    };
    let cells = grid_density(&profile, &weights, (w, h), window).map_err(limit_err)?;
    if format.csv() {
        write(out, "density.csv", &density_csv(&cells))?;
    }
    if format.svg() {
        write(out, "density.svg", &density_svg(&cells, w, h, 8))?;
    }
    let liquid = cells.iter().filter(|c| c.density > 0.0 && c.density < 1.0).count();
    println!("{w}x{h} cells, {liquid} liquid");
    Ok(())
}
