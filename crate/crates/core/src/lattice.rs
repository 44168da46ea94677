//! Contracting square-hexagon lattices R(Ω, ǎ, X, Y, n).
//!
//! White row s sits at height s − ½ and black row s at height s. Row 1
//! holds one white vertex per boundary column Ω_i; for s ≥ 2 white row s is
//! the column interval [L_s, R_s]. Black row s spans [L_s, R_s + 1 − a_s].
//! Each white(s, j) meets black(s, j) with weight 1 and, on square rows
//! (a_s = 0), black(s, j + 1) with weight y_s. Each black(s, b) meets
//! white(s + 1, b) with weight 1 and white(s + 1, b + 1) with weight x_s.

use std::collections::HashMap;
use std::fmt::Write as _;

use num::{One, Zero};

use crate::error::LatticeError;
use crate::partitions::{format_rational, Partition};
use crate::Rational;

/// Period data plus boundary. Row bits: `true` is a_m = 1 (hexagon row,
/// one black neighbour per white), `false` is a_m = 0 (square row).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub a: Vec<bool>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub omega: Vec<u64>,
}

/// Which closed form the weights admit.
#[derive(Clone, Debug, PartialEq)]
pub enum Regime {
    /// Every x is zero or one common positive value.
    ContractingBipartite { x: Rational },
    /// x_1..x_n pairwise distinct and positive.
    DistinctPositive,
    General,
}

impl LatticeSpec {
    pub fn new(
        a: Vec<bool>,
        x: Vec<Rational>,
        y: Vec<Rational>,
        omega: Vec<u64>,
    ) -> Result<Self, LatticeError> {
        let spec = LatticeSpec { a, x, y, omega };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let n = self.a.len();
        if n == 0 {
            return Err(LatticeError::EmptyPeriod);
        }
        for (field, len) in [("x", self.x.len()), ("y", self.y.len())] {
            if len != n {
                return Err(LatticeError::LengthMismatch { field, expected: n, got: len });
            }
        }
        if self.x.iter().any(|v| *v < Rational::zero()) {
            return Err(LatticeError::NegativeWeight("x"));
        }
        if self.y.iter().any(|v| *v < Rational::zero()) {
            return Err(LatticeError::NegativeWeight("y"));
        }
        check_omega(&self.omega)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn big_n(&self) -> usize {
        self.omega.len()
    }

    /// Period index m̄ (0-based) for row m (1-based).
    fn bar(&self, m: usize) -> usize {
        (m - 1) % self.n()
    }

    pub fn a_at(&self, m: usize) -> bool {
        self.a[self.bar(m)]
    }

    pub fn x_at(&self, m: usize) -> &Rational {
        &self.x[self.bar(m)]
    }

    /// y on a hexagon row is irrelevant (the edge is absent) and reads 0.
    pub fn y_at(&self, m: usize) -> Rational {
        if self.a_at(m) {
            Rational::zero()
        } else {
            self.y[self.bar(m)].clone()
        }
    }

    /// x_from..=x_N, periodically extended.
    pub fn x_range(&self, from: usize) -> Vec<Rational> {
        (from..=self.big_n()).map(|m| self.x_at(m).clone()).collect()
    }

    pub fn boundary(&self) -> Partition {
        boundary_partition(&self.omega).expect("validated boundary")
    }

    /// Fraction of zero x-weights in one period.
    pub fn gamma(&self) -> Rational {
        let z = self.x.iter().filter(|v| v.is_zero()).count();
        Rational::new(z.into(), self.n().into())
    }

    pub fn regime(&self) -> Regime {
        let nz: Vec<&Rational> = self.x.iter().filter(|v| !v.is_zero()).collect();
        if let Some(first) = nz.first() {
            if nz.iter().all(|v| v == first) {
                return Regime::ContractingBipartite { x: (*first).clone() };
            }
        }
        let distinct = (0..self.x.len()).all(|i| (i + 1..self.x.len()).all(|j| self.x[i] != self.x[j]));
        if nz.len() == self.x.len() && distinct {
            Regime::DistinctPositive
        } else {
            Regime::General
        }
    }
}

fn check_omega(omega: &[u64]) -> Result<(), LatticeError> {
    if omega.is_empty() {
        return Err(LatticeError::InvalidOmega("empty".into()));
    }
    if omega[0] != 1 {
        return Err(LatticeError::InvalidOmega(format!("first entry is {}, expected 1", omega[0])));
    }
    if omega.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LatticeError::InvalidOmega("not strictly increasing".into()));
    }
    Ok(())
}

/// ω = (Ω_N − N, Ω_{N−1} − N + 1, …, Ω_1 − 1).
pub fn boundary_partition(omega: &[u64]) -> Result<Partition, LatticeError> {
    check_omega(omega)?;
    let n = omega.len();
    let parts = (0..n).map(|i| omega[n - 1 - i] - (n - i) as u64).collect();
    Ok(Partition::new(parts).expect("strictly increasing boundary gives a partition"))
}

/// Inverse of [`boundary_partition`].
pub fn omega_from_partition(p: &Partition) -> Vec<u64> {
    let n = p.len();
    (0..n).map(|k| p.part(n - 1 - k) + (k + 1) as u64).collect()
}

/// (I_1, I_2) restricted to 1..=N.
pub fn i1_i2(spec: &LatticeSpec) -> (Vec<usize>, Vec<usize>) {
    (1..=spec.big_n()).partition(|&m| spec.a_at(m))
}

/// Γ_i = Π_{t=i}^{N} (1 + y_i x_t) for i ∈ I_2.
///
/// The product starts at t = i: the square row i is followed by the x-row
/// with the same index, and that pair contributes as well. Starting at
/// t = i + 1 undercounts (the lattice Ω = (1,3,6) has 60 unit-weight
/// matchings, not 30).
pub fn gamma_factor(spec: &LatticeSpec, i: usize) -> Result<Rational, LatticeError> {
    if i == 0 || i > spec.big_n() || spec.a_at(i) {
        return Err(LatticeError::NotInI2(i));
    }
    let y = spec.y_at(i);
    Ok((i..=spec.big_n())
        .map(|t| Rational::one() + &y * spec.x_at(t))
        .product())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub color: Color,
    /// s: white row s or black row s.
    pub level: usize,
    pub col: i64,
}

impl Vertex {
    /// Row index counted from the bottom: white s → 2s − 1, black s → 2s.
    pub fn row(&self) -> usize {
        match self.color {
            Color::White => 2 * self.level - 1,
            Color::Black => 2 * self.level,
        }
    }

    /// Drawing position in half units (2x, 2y).
    pub fn position2(&self) -> (i64, i64) {
        let s = self.level as i64;
        match self.color {
            Color::White => (2 * self.col - s + 1, 2 * s - 1),
            Color::Black => (2 * self.col - s + 1, 2 * s),
        }
    }
}

/// V edges join white row s to black row s; Λ edges join black row s to
/// white row s + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    V,
    Lambda,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub white: VertexId,
    pub black: VertexId,
    pub weight: Rational,
    pub kind: EdgeKind,
    /// Whether the edge runs NE-SW (carries a y or x weight).
    pub diagonal: bool,
}

#[derive(Clone, Debug)]
pub struct ContractingLattice {
    spec: LatticeSpec,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    removed: Vec<EdgeId>,
    index: HashMap<(Color, usize, i64), VertexId>,
    /// (L_s, R_s) for white rows 1..=N+1; row 1 is sparse.
    white_span: Vec<(i64, i64)>,
    black_span: Vec<(i64, i64)>,
}

/// Build the lattice; weight-0 edges are kept but listed as removed.
pub fn build_lattice(spec: &LatticeSpec) -> Result<ContractingLattice, LatticeError> {
    spec.validate()?;
    let big_n = spec.big_n();
    let mut vertices = Vec::new();
    let mut index = HashMap::new();
    let mut white_span = Vec::with_capacity(big_n + 1);
    let mut black_span = Vec::with_capacity(big_n);
    let mut push = |v: Vertex, vs: &mut Vec<Vertex>| {
        index.insert((v.color, v.level, v.col), vs.len());
        vs.push(v);
    };
    let (mut l, mut r) = (1i64, *spec.omega.last().unwrap() as i64);
    for s in 1..=big_n + 1 {
        white_span.push((l, r));
        if s == 1 {
            for &c in &spec.omega {
                push(Vertex { color: Color::White, level: 1, col: c as i64 }, &mut vertices);
            }
        } else {
            for c in l..=r {
                push(Vertex { color: Color::White, level: s, col: c }, &mut vertices);
            }
        }
        if s == big_n + 1 {
            break;
        }
        let a = spec.a_at(s) as i64;
        let br = r + 1 - a;
        black_span.push((l, br));
        for c in l..=br {
            push(Vertex { color: Color::Black, level: s, col: c }, &mut vertices);
        }
        l += 1;
        r = br;
    }

    let mut edges = Vec::new();
    for (w, v) in vertices.iter().enumerate() {
        if v.color != Color::White {
            continue;
        }
        let s = v.level;
        if s <= big_n {
            if let Some(&b) = index.get(&(Color::Black, s, v.col)) {
                edges.push(Edge { white: w, black: b, weight: Rational::one(), kind: EdgeKind::V, diagonal: false });
            }
            if !spec.a_at(s) {
                if let Some(&b) = index.get(&(Color::Black, s, v.col + 1)) {
                    edges.push(Edge { white: w, black: b, weight: spec.y_at(s), kind: EdgeKind::V, diagonal: true });
                }
            }
        }
        if s >= 2 {
            let t = s - 1;
            if let Some(&b) = index.get(&(Color::Black, t, v.col)) {
                edges.push(Edge { white: w, black: b, weight: Rational::one(), kind: EdgeKind::Lambda, diagonal: false });
            }
            if let Some(&b) = index.get(&(Color::Black, t, v.col - 1)) {
                edges.push(Edge { white: w, black: b, weight: spec.x_at(t).clone(), kind: EdgeKind::Lambda, diagonal: true });
            }
        }
    }
    let removed = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.weight.is_zero())
        .map(|(i, _)| i)
        .collect();
    Ok(ContractingLattice { spec: spec.clone(), vertices, edges, removed, index, white_span, black_span })
}

impl ContractingLattice {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Every edge ever built, including removed ones; `EdgeId` indexes this.
    pub fn all_edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn is_removed(&self, id: EdgeId) -> bool {
        self.edges[id].weight.is_zero()
    }

    /// Edges of positive weight.
    pub fn active_edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| !e.weight.is_zero())
    }

    pub fn removed_edges(&self) -> &[EdgeId] {
        &self.removed
    }

    pub fn find(&self, color: Color, level: usize, col: i64) -> Option<VertexId> {
        self.index.get(&(color, level, col)).copied()
    }

    pub fn find_edge(&self, white: VertexId, black: VertexId) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.white == white && e.black == black)
    }

    /// (L_s, R_s) of white row s (1-based, up to N + 1).
    pub fn white_span(&self, s: usize) -> (i64, i64) {
        self.white_span[s - 1]
    }

    pub fn black_span(&self, s: usize) -> (i64, i64) {
        self.black_span[s - 1]
    }

    /// Columns present in white row s.
    pub fn white_columns(&self, s: usize) -> Vec<i64> {
        if s == 1 {
            self.spec.omega.iter().map(|&c| c as i64).collect()
        } else {
            let (l, r) = self.white_span(s);
            (l..=r).collect()
        }
    }

    pub fn black_columns(&self, s: usize) -> Vec<i64> {
        let (l, r) = self.black_span(s);
        (l..=r).collect()
    }

    /// Number of nonempty rows: 2N + 1, or 2N when the top white row is empty.
    pub fn row_count(&self) -> usize {
        let n = self.spec.big_n();
        let (l, r) = self.white_span(n + 1);
        if r < l {
            2 * n
        } else {
            2 * n + 1
        }
    }

    /// Vertex count per row index 1..=row_count().
    pub fn row_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; 2 * self.spec.big_n() + 1];
        for v in &self.vertices {
            sizes[v.row() - 1] += 1;
        }
        sizes.truncate(self.row_count());
        sizes
    }

    /// Active edges as "(x1,y1) (x2,y2) weight" lines, white endpoint first.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (_, e) in self.active_edges() {
            let _ = writeln!(out, "{}", self.edge_line(e));
        }
        out
    }

    pub fn edge_line(&self, e: &Edge) -> String {
        let (wx, wy) = self.vertices[e.white].position2();
        let (bx, by) = self.vertices[e.black].position2();
        format!(
            "({},{}) ({},{}) {}",
            half(wx),
            half(wy),
            half(bx),
            half(by),
            format_rational(&e.weight)
        )
    }
}

fn half(v: i64) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{:.1}", v as f64 / 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::ratio;

    fn ones(n: usize) -> Vec<Rational> {
        vec![ratio(1, 1); n]
    }

    fn example_spec(x2: i64) -> LatticeSpec {
        LatticeSpec::new(
            vec![true, false, true],
            vec![ratio(1, 1), ratio(x2, 1), ratio(1, 1)],
            ones(3),
            vec![1, 3, 6],
        )
        .unwrap()
    }

    #[test]
    fn example_lattice_shape() {
        let lat = build_lattice(&example_spec(1)).unwrap();
        assert_eq!(lat.vertex_count(), 34);
        assert_eq!(lat.row_sizes(), vec![3, 6, 5, 6, 5, 5, 4]);
        assert_eq!(lat.row_count(), 7);
        assert!(lat.removed_edges().is_empty());
    }

    #[test]
    fn zero_weight_edges_are_removed_not_vertices() {
        let full = build_lattice(&example_spec(1)).unwrap();
        let cut = build_lattice(&example_spec(0)).unwrap();
        assert_eq!(full.vertices(), cut.vertices());
        assert!(!cut.removed_edges().is_empty());
        for &e in cut.removed_edges() {
            let edge = cut.edge(e);
            assert!(edge.diagonal && edge.kind == EdgeKind::Lambda);
            assert_eq!(cut.vertices()[edge.black].level, 2);
        }
    }

    #[test]
    fn minimal_lattice() {
        let spec = LatticeSpec::new(vec![true], ones(1), ones(1), vec![1]).unwrap();
        let lat = build_lattice(&spec).unwrap();
        assert_eq!(lat.row_sizes(), vec![1, 1]);
        assert_eq!(lat.row_count(), 2);
        assert_eq!(lat.active_edges().count(), 1);
    }

    #[test]
    fn boundary_examples() {
        let p = |v: &[u64]| Partition::new(v.to_vec()).unwrap();
        assert_eq!(boundary_partition(&[1, 3, 6]).unwrap(), p(&[3, 1, 0]));
        assert_eq!(boundary_partition(&[1, 2, 3, 4]).unwrap(), p(&[0, 0, 0, 0]));
        assert_eq!(boundary_partition(&[1, 3]).unwrap(), p(&[1, 0]));
        assert!(boundary_partition(&[1, 3, 3]).is_err());
        assert!(boundary_partition(&[2, 3]).is_err());
        assert_eq!(omega_from_partition(&p(&[3, 1, 0])), vec![1, 3, 6]);
    }

    #[test]
    fn index_sets() {
        let spec = example_spec(1);
        assert_eq!(i1_i2(&spec), (vec![1, 3], vec![2]));
        let spec = LatticeSpec::new(vec![true, false, false], ones(3), ones(3), (1..=6).collect()).unwrap();
        assert_eq!(i1_i2(&spec).1, vec![2, 3, 5, 6]);
        let spec = LatticeSpec::new(vec![true; 2], ones(2), ones(2), vec![1, 2, 3]).unwrap();
        assert!(i1_i2(&spec).1.is_empty());
    }

    #[test]
    fn gamma_factor_values() {
        let spec = LatticeSpec::new(
            vec![true, false, true],
            vec![ratio(2, 1), ratio(3, 1), ratio(5, 1)],
            vec![ratio(0, 1), ratio(7, 1), ratio(0, 1)],
            vec![1, 3, 6],
        )
        .unwrap();
        assert_eq!(gamma_factor(&spec, 2).unwrap(), ratio(22, 1) * ratio(36, 1));
        assert_eq!(gamma_factor(&spec, 1), Err(LatticeError::NotInI2(1)));
        let last = LatticeSpec::new(vec![false], vec![ratio(0, 1)], ones(1), vec![1, 2]).unwrap();
        assert_eq!(gamma_factor(&last, 2).unwrap(), ratio(1, 1));
    }

    #[test]
    fn interior_black_degrees() {
        let spec = LatticeSpec::new(vec![false, true], ones(2), ones(2), vec![1, 2, 4, 7]).unwrap();
        let lat = build_lattice(&spec).unwrap();
        for (id, v) in lat.vertices().iter().enumerate() {
            if v.color != Color::Black {
                continue;
            }
            let (l, r) = lat.black_span(v.level);
            if v.col <= l || v.col >= r || v.level == 1 {
                continue;
            }
            let up = lat.all_edges().iter().filter(|e| e.black == id && e.kind == EdgeKind::Lambda).count();
            let down = lat.all_edges().iter().filter(|e| e.black == id && e.kind == EdgeKind::V).count();
            assert_eq!(up, 2);
            assert_eq!(down, if spec.a_at(v.level) { 1 } else { 2 });
        }
    }

    #[test]
    fn edge_list_format() {
        let spec = LatticeSpec::new(vec![true], ones(1), ones(1), vec![1]).unwrap();
        let lat = build_lattice(&spec).unwrap();
        assert_eq!(lat.edge_list().trim(), "(1,0.5) (1,1) 1");
    }
}
