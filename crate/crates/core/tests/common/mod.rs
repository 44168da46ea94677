#![allow(dead_code)]

use std::collections::HashMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqhex_core::lattice::{build_lattice, Color, ContractingLattice, LatticeSpec};
use sqhex_core::partitions::ratio;
use sqhex_core::Rational;

/// Weighted permanent of the white × black adjacency matrix, by dynamic
/// programming over the set of used black vertices. Shares nothing with
/// the backtracking enumerator.
pub fn permanent(lat: &ContractingLattice) -> Rational {
    let vs = lat.vertices();
    let whites: Vec<usize> = (0..vs.len()).filter(|&i| vs[i].color == Color::White).collect();
    let blacks: Vec<usize> = (0..vs.len()).filter(|&i| vs[i].color == Color::Black).collect();
    if whites.len() != blacks.len() {
        return Rational::zero();
    }
    let slot: HashMap<usize, usize> = blacks.iter().enumerate().map(|(k, &b)| (b, k)).collect();
    let mut adj: HashMap<usize, Vec<(usize, Rational)>> = HashMap::new();
    for e in lat.all_edges() {
        if !e.weight.is_zero() {
            adj.entry(e.white).or_default().push((slot[&e.black], e.weight.clone()));
        }
    }
    let mut states: HashMap<u128, Rational> = HashMap::from([(0, Rational::one())]);
    for w in &whites {
        let mut next: HashMap<u128, Rational> = HashMap::new();
        for (mask, val) in &states {
            for (b, wt) in adj.get(w).map(Vec::as_slice).unwrap_or(&[]) {
                if mask & (1 << b) == 0 {
                    *next.entry(mask | (1 << b)).or_insert_with(Rational::zero) += val * wt;
                }
            }
        }
        states = next;
    }
    states.into_values().sum()
}

/// Small random lattice: N ≤ 4, n ≤ 3, x-weights with zeros allowed.
pub fn random_spec(rng: &mut impl Rng, guard: usize) -> LatticeSpec {
    let xs = [ratio(0, 1), ratio(1, 2), ratio(1, 1), ratio(2, 1), ratio(3, 1)];
    let ys = [ratio(1, 3), ratio(1, 1), ratio(2, 1), ratio(5, 2)];
    loop {
        let n = rng.random_range(1..=3);
        let big_n = rng.random_range(1..=4);
        let a: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let x = (0..n)
            .map(|_| if rng.random_bool(0.25) { xs[0].clone() } else { xs[rng.random_range(1..xs.len())].clone() })
            .collect();
        let y = (0..n).map(|_| ys[rng.random_range(0..ys.len())].clone()).collect();
        let mut omega = vec![1u64];
        for _ in 1..big_n {
            let last = *omega.last().unwrap();
            omega.push(last + rng.random_range(1..=3));
        }
        let spec = LatticeSpec::new(a, x, y, omega).expect("generated spec is valid");
        if build_lattice(&spec).map(|l| l.vertex_count() <= guard).unwrap_or(false) {
            return spec;
        }
    }
}

pub fn random_specs(seed: u64, count: usize, guard: usize) -> Vec<LatticeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spec(&mut rng, guard)).collect()
}

/// The three-row lattice Ω = (1, 3, 6) with a = (1, 0, 1).
pub fn three_row(x: [Rational; 3], y2: Rational) -> LatticeSpec {
    LatticeSpec::new(vec![true, false, true], x.to_vec(), vec![ratio(1, 1), y2, ratio(1, 1)], vec![1, 3, 6]).unwrap()
}
