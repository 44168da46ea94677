//! Run configuration: one TOML file per run.
//!
//! ```toml
//! [lattice]            # one period of the lattice and the boundary row
//! a = [1, 0, 1]
//! x = [1, 1, 1]        # integers or "p/q" strings
//! y = [1, 1, 1]
//! omega = [1, 3, 6]    # or omega_ranges = [[1, 40], [61, 80]]
//!
//! [profile]            # limiting boundary: segments [alpha_i, b_i]
//! alpha = [0, 1]
//! b = ["2/3", "4/3"]
//! gamma = "1/3"
//!
//! [weights]            # limiting weights; defaults to those of [lattice]
//! i2 = [0, 1, 1]
//! y = [0, 1, 2]
//! x = 1
//!
//! [components]         # exponentially separated weight classes
//! n = 2
//! blocks = [["1/4", 6], ["1/4", 5]]   # (row fraction, part / N)
//!
//! [run]                # seed, counts, grids, tolerances
//! seed = 7
//! ```

use std::path::Path;

use serde::Deserialize;
use sqhex_core::lattice::LatticeSpec;
use sqhex_core::limitshape::{BoundaryProfile, ComponentParams, TGrid, WeightProfile};
use sqhex_core::partitions::parse_rational;
use sqhex_core::Rational;

use crate::CliError;

/// An exact number written either as an integer or as a string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn exact(&self, field: &str) -> Result<Rational, CliError> {
        match self {
            Num::Int(i) => Ok(Rational::from_integer((*i).into())),
            Num::Text(s) => parse_rational(s).ok_or_else(|| CliError::Config(format!("{field}: cannot read {s:?} as a rational"))),
        }
    }
}

fn exact_all(v: &[Num], field: &str) -> Result<Vec<Rational>, CliError> {
    v.iter().map(|n| n.exact(field)).collect()
}

fn bits(v: &[u8], field: &str) -> Result<Vec<bool>, CliError> {
    v.iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(CliError::Config(format!("{field}: entries must be 0 or 1"))),
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub a: Vec<u8>,
    pub x: Vec<Num>,
    pub y: Vec<Num>,
    pub omega: Option<Vec<u64>>,
    pub omega_ranges: Option<Vec<[u64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub alpha: Vec<Num>,
    pub b: Vec<Num>,
    #[serde(default = "zero")]
    pub gamma: Num,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub i2: Vec<u8>,
    pub y: Vec<Num>,
    #[serde(default = "one")]
    pub x: Num,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsSection {
    pub n: usize,
    pub blocks: Vec<[Num; 2]>,
}

fn zero() -> Num {
    Num::Int(0)
}

fn one() -> Num {
    Num::Int(1)
}

/// Seeds, counts, grids and tolerances. Every field has a default.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub samples: usize,
    /// Density grid as "WxH".
    pub grid: String,
    /// χ-window of the density map; defaults to [0, b_s].
    pub chi: Option<[f64; 2]>,
    pub t_initial: usize,
    pub t_depth: u32,
    pub residual_tol: f64,
    pub winding_lines: usize,
    /// Draws for the Monte Carlo suite.
    pub mc_samples: usize,
    pub ks_tol: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 0,
            samples: 1000,
            grid: "60x40".into(),
            chi: None,
            t_initial: 1500,
            t_depth: 10,
            residual_tol: 1e-8,
            winding_lines: 100,
            mc_samples: 20_000,
            ks_tol: 0.05,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: Option<LatticeSection>,
    pub profile: Option<ProfileSection>,
    pub weights: Option<WeightsSection>,
    pub components: Option<ComponentsSection>,
    #[serde(default)]
    pub run: RunSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn lattice(&self) -> Result<LatticeSpec, CliError> {
        let l = self.lattice.as_ref().ok_or_else(|| missing("lattice"))?;
        let omega = match (&l.omega, &l.omega_ranges) {
            (Some(o), None) => o.clone(),
            (None, Some(r)) => r.iter().flat_map(|[a, b]| *a..=*b).collect(),
            _ => return Err(CliError::Config("[lattice] needs exactly one of omega, omega_ranges".into())),
        };
        LatticeSpec::new(bits(&l.a, "lattice.a")?, exact_all(&l.x, "lattice.x")?, exact_all(&l.y, "lattice.y")?, omega)
            .map_err(|e| CliError::Config(format!("[lattice]: {e}")))
    }

    pub fn profile(&self) -> Result<BoundaryProfile, CliError> {
        let p = self.profile.as_ref().ok_or_else(|| missing("profile"))?;
        BoundaryProfile::new(exact_all(&p.alpha, "profile.alpha")?, exact_all(&p.b, "profile.b")?, p.gamma.exact("profile.gamma")?)
            .map_err(|e| CliError::Config(format!("[profile]: {e}")))
    }

    /// [weights], or the limiting weights of [lattice] when absent.
    pub fn weights(&self) -> Result<WeightProfile, CliError> {
        match &self.weights {
            Some(w) => WeightProfile::new(bits(&w.i2, "weights.i2")?, exact_all(&w.y, "weights.y")?, w.x.exact("weights.x")?)
                .map_err(|e| CliError::Config(format!("[weights]: {e}"))),
            None if self.lattice.is_some() => WeightProfile::from_spec(&self.lattice()?)
                .map(|(w, _)| w)
                .map_err(|e| CliError::Config(format!("weights from [lattice]: {e}"))),
            None => Err(missing("weights")),
        }
    }

    pub fn components(&self) -> Result<ComponentParams, CliError> {
        let c = self.components.as_ref().ok_or_else(|| missing("components"))?;
        let blocks = c
            .blocks
            .iter()
            .map(|[k, r]| Ok((k.exact("components.blocks")?, r.exact("components.blocks")?)))
            .collect::<Result<_, CliError>>()?;
        Ok(ComponentParams { n: c.n, blocks })
    }

    pub fn t_grid(&self) -> TGrid {
        TGrid::Adaptive { initial: self.run.t_initial, depth: self.run.t_depth }
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("this command needs a [{section}] section"))
}

/// "WxH" with both sides positive.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("grid {s:?} is empty"));
    }
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_expand() {
        let c = RunConfig::parse("[lattice]\na = [1, 0]\nx = [1, \"1/2\"]\ny = [0, 1]\nomega_ranges = [[1, 3], [6, 6]]\n").unwrap();
        assert_eq!(c.lattice().unwrap().omega, vec![1, 2, 3, 6]);
        assert_eq!(c.run.seed, 0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        assert!(matches!(RunConfig::parse("[run]\nsede = 1\n"), Err(CliError::Config(_))));
        let c = RunConfig::parse("[profile]\nalpha = [\"x\"]\nb = [1]\n").unwrap();
        assert!(matches!(c.profile(), Err(CliError::Config(_))));
        assert!(matches!(c.lattice(), Err(CliError::Config(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("80x40"), Ok((80, 40)));
        assert!(parse_grid("0x4").is_err());
        assert!(parse_grid("80").is_err());
    }
}
