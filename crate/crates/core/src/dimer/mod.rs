//! Perfect matchings on contracting lattices and their interlacing chains.
//!
//! Chain convention: white row s carries μ^(N+1−s) and black row s carries
//! ν^(N+1−s). A row's partition is read off the columns of its V-vertices
//! (whites matched upward, blacks matched downward): with positions p_k
//! measured from the row's left end L_s and sorted decreasingly,
//! λ_k = p_k − (ℓ − k). Boundary row 1 keeps its absolute columns, so
//! μ^(N) = ω.

mod sampler;

pub use sampler::{
    empirical_counting_measure, pooled_counting_measure, sample_matching, BoltzmannSample, Sampler, SamplerMode, EXACT_MODE_MAX_N,
};

use num::{One, Zero};

use crate::error::DimerError;
use crate::lattice::{build_lattice, gamma_factor, i1_i2, Color, ContractingLattice, EdgeId, EdgeKind, LatticeSpec};
use crate::partitions::{co_interlaces, interlaces, schur_reduced, Partition};
use crate::Rational;

/// Vertex budget of the brute-force enumerator.
pub const ENUMERATION_GUARD: usize = 60;

/// Sorted edge ids into [`ContractingLattice::all_edges`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerfectMatching {
    edges: Vec<EdgeId>,
}

impl PerfectMatching {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        PerfectMatching { edges }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// Edge list lines in the lattice export format.
    pub fn edge_list(&self, lat: &ContractingLattice) -> String {
        self.edges
            .iter()
            .map(|&e| lat.edge_line(lat.edge(e)) + "\n")
            .collect()
    }
}

/// The chain μ^(N), ν^(N), μ^(N−1), …, ν^(1), μ^(0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchingSequence {
    /// `mu[s-1]` is white row s (s = 1..=N+1).
    mu: Vec<Partition>,
    /// `nu[s-1]` is black row s (s = 1..=N).
    nu: Vec<Partition>,
}

impl MatchingSequence {
    /// Rows bottom to top. Checks lengths, the boundary, both interlacing
    /// relations and equality on hexagon rows.
    pub fn from_rows(spec: &LatticeSpec, mu: Vec<Partition>, nu: Vec<Partition>) -> Result<Self, DimerError> {
        let seq = MatchingSequence { mu, nu };
        seq.validate(spec)?;
        Ok(seq)
    }

    fn validate(&self, spec: &LatticeSpec) -> Result<(), DimerError> {
        let n = spec.big_n();
        let bad = |m: String| Err(DimerError::BadSequence(m));
        if self.mu.len() != n + 1 || self.nu.len() != n {
            return bad(format!("expected {} white and {} black rows", n + 1, n));
        }
        if self.mu[0] != spec.boundary() {
            return bad(format!("bottom row {} differs from the boundary {}", self.mu[0], spec.boundary()));
        }
        for s in 1..=n + 1 {
            if self.mu[s - 1].len() != n + 1 - s {
                return bad(format!("white row {s} has length {}", self.mu[s - 1].len()));
            }
        }
        for s in 1..=n {
            let (m, v, up) = (&self.mu[s - 1], &self.nu[s - 1], &self.mu[s]);
            if v.len() != n + 1 - s {
                return bad(format!("black row {s} has length {}", v.len()));
            }
            if !co_interlaces(m, v) {
                return bad(format!("row {s}: {m} does not co-interlace {v}"));
            }
            if spec.a_at(s) && m != v {
                return bad(format!("row {s} is a hexagon row but {m} != {v}"));
            }
            if !interlaces(up, v) {
                return bad(format!("row {s}: {up} does not interlace {v}"));
            }
        }
        Ok(())
    }

    /// μ^(i).
    pub fn mu(&self, i: usize) -> &Partition {
        &self.mu[self.nu.len() - i]
    }

    /// ν^(j), 1 ≤ j ≤ N.
    pub fn nu(&self, j: usize) -> &Partition {
        &self.nu[self.nu.len() - j]
    }

    /// N.
    pub fn black_len(&self) -> usize {
        self.nu.len()
    }

    pub fn white_row(&self, s: usize) -> &Partition {
        &self.mu[s - 1]
    }

    pub fn black_row(&self, s: usize) -> &Partition {
        &self.nu[s - 1]
    }

    /// Partition on row index r (1-based from the bottom, up to 2N + 1).
    pub fn row(&self, r: usize) -> Option<&Partition> {
        if r == 0 {
            None
        } else if r % 2 == 1 {
            self.mu.get(r / 2)
        } else {
            self.nu.get(r / 2 - 1)
        }
    }

    /// μ^(N), ν^(N), …, μ^(0).
    pub fn chain(&self) -> Vec<&Partition> {
        let mut out = Vec::with_capacity(self.mu.len() + self.nu.len());
        for (m, v) in self.mu.iter().zip(&self.nu) {
            out.push(m);
            out.push(v);
        }
        out.push(self.mu.last().unwrap());
        out
    }

    /// Π_s y_s^{|ν_s|−|μ_s|} x_s^{|ν_s|−|μ_{s+1}|}, rows s bottom to top.
    pub fn weight(&self, spec: &LatticeSpec) -> Rational {
        let mut w = Rational::one();
        for s in 1..=self.nu.len() {
            let v = self.nu[s - 1].size();
            let dy = v - self.mu[s - 1].size();
            let dx = v - self.mu[s].size();
            if dy > 0 {
                w *= num::pow(spec.y_at(s), dy as usize);
            }
            if dx > 0 {
                w *= num::pow(spec.x_at(s).clone(), dx as usize);
            }
        }
        w
    }

    /// One partition per line, bottom row first.
    pub fn to_text(&self) -> String {
        self.chain().iter().map(|p| format!("{p}\n")).collect()
    }
}

pub fn matching_weight(m: &PerfectMatching, lat: &ContractingLattice) -> Rational {
    m.edges.iter().map(|&e| lat.edge(e).weight.clone()).product()
}

fn partition_from_positions(mut pos: Vec<i64>) -> Partition {
    pos.sort_unstable_by(|a, b| b.cmp(a));
    let l = pos.len() as i64;
    let parts = pos
        .iter()
        .enumerate()
        .map(|(k, p)| (p - (l - 1 - k as i64)) as u64)
        .collect();
    Partition::new(parts).expect("distinct positions give a partition")
}

fn positions_from_partition(p: &Partition, offset: i64) -> Vec<i64> {
    let l = p.len() as i64;
    p.parts()
        .iter()
        .enumerate()
        .map(|(k, &v)| v as i64 + (l - 1 - k as i64) + offset)
        .collect()
}

/// Row offset used for positions: absolute columns minus one on the
/// boundary row, the left end L_s elsewhere.
fn row_offset(lat: &ContractingLattice, s: usize) -> i64 {
    if s == 1 {
        1
    } else {
        lat.white_span(s).0
    }
}

pub fn matching_to_sequence(m: &PerfectMatching, lat: &ContractingLattice) -> Result<MatchingSequence, DimerError> {
    let nv = lat.vertex_count();
    let mut partner = vec![None; nv];
    for &e in m.edges() {
        let edge = lat.all_edges().get(e).ok_or_else(|| DimerError::NotPerfect(format!("unknown edge {e}")))?;
        for v in [edge.white, edge.black] {
            if partner[v].replace(e).is_some() {
                return Err(DimerError::NotPerfect(format!("vertex {v} covered twice")));
            }
        }
    }
    if let Some(v) = partner.iter().position(|p| p.is_none()) {
        return Err(DimerError::NotPerfect(format!("vertex {v} uncovered")));
    }
    let spec = lat.spec();
    let n = spec.big_n();
    let mut mu = Vec::with_capacity(n + 1);
    let mut nu = Vec::with_capacity(n);
    for s in 1..=n + 1 {
        let off = row_offset(lat, s);
        let whites: Vec<i64> = lat
            .white_columns(s)
            .into_iter()
            .filter(|&c| {
                let v = lat.find(Color::White, s, c).unwrap();
                lat.edge(partner[v].unwrap()).kind == EdgeKind::V
            })
            .map(|c| c - off)
            .collect();
        if whites.len() != n + 1 - s {
            return Err(DimerError::NotPerfect(format!("white row {s} has {} V-vertices", whites.len())));
        }
        mu.push(partition_from_positions(whites));
        if s == n + 1 {
            break;
        }
        let blacks: Vec<i64> = lat
            .black_columns(s)
            .into_iter()
            .filter(|&c| {
                let v = lat.find(Color::Black, s, c).unwrap();
                lat.edge(partner[v].unwrap()).kind == EdgeKind::V
            })
            .map(|c| c - off)
            .collect();
        nu.push(partition_from_positions(blacks));
    }
    MatchingSequence::from_rows(spec, mu, nu)
}

pub fn sequence_to_matching(seq: &MatchingSequence, lat: &ContractingLattice) -> Result<PerfectMatching, DimerError> {
    let spec = lat.spec();
    seq.validate(spec)?;
    let n = spec.big_n();
    let mut edges = Vec::new();
    let mut link = |w: (usize, i64), b: (usize, i64)| -> Result<(), DimerError> {
        let wv = lat.find(Color::White, w.0, w.1);
        let bv = lat.find(Color::Black, b.0, b.1);
        let e = match (wv, bv) {
            (Some(wv), Some(bv)) => lat.find_edge(wv, bv),
            _ => None,
        };
        match e {
            Some(e) if !lat.is_removed(e) => {
                edges.push(e);
                Ok(())
            }
            _ => Err(DimerError::BadSequence(format!(
                "no edge between white({},{}) and black({},{})",
                w.0, w.1, b.0, b.1
            ))),
        }
    };
    let mut v_whites: Vec<Vec<i64>> = Vec::with_capacity(n + 1);
    for s in 1..=n + 1 {
        v_whites.push(positions_from_partition(seq.white_row(s), row_offset(lat, s)));
    }
    for s in 1..=n {
        let off = row_offset(lat, s);
        let vb = positions_from_partition(seq.black_row(s), off);
        for (&w, &b) in v_whites[s - 1].iter().zip(&vb) {
            link((s, w), (s, b))?;
        }
        let mut lb: Vec<i64> = lat.black_columns(s).into_iter().filter(|c| !vb.contains(c)).collect();
        let mut lw: Vec<i64> = lat.white_columns(s + 1).into_iter().filter(|c| !v_whites[s].contains(c)).collect();
        if lb.len() != lw.len() {
            return Err(DimerError::BadSequence(format!("row {s}: Λ counts differ")));
        }
        lb.sort_unstable();
        lw.sort_unstable();
        for (&b, &w) in lb.iter().zip(&lw) {
            link((s + 1, w), (s, b))?;
        }
    }
    Ok(PerfectMatching::new(edges))
}

/// Every perfect matching using active edges, by backtracking on the
/// lowest uncovered vertex.
pub fn enumerate_matchings(lat: &ContractingLattice) -> Result<Vec<PerfectMatching>, DimerError> {
    enumerate_matchings_with_guard(lat, ENUMERATION_GUARD)
}

pub fn enumerate_matchings_with_guard(lat: &ContractingLattice, guard: usize) -> Result<Vec<PerfectMatching>, DimerError> {
    let nv = lat.vertex_count();
    if nv > guard {
        return Err(DimerError::GuardExceeded { vertices: nv, guard });
    }
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); nv];
    for (id, e) in lat.active_edges() {
        adj[e.white].push((e.black, id));
        adj[e.black].push((e.white, id));
    }
    let mut covered = vec![false; nv];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    backtrack(&adj, &mut covered, &mut stack, &mut out);
    Ok(out)
}

fn backtrack(
    adj: &[Vec<(usize, EdgeId)>],
    covered: &mut Vec<bool>,
    stack: &mut Vec<EdgeId>,
    out: &mut Vec<PerfectMatching>,
) {
    let Some(v) = covered.iter().position(|c| !c) else {
        out.push(PerfectMatching::new(stack.clone()));
        return;
    };
    covered[v] = true;
    for &(u, e) in &adj[v] {
        if !covered[u] {
            covered[u] = true;
            stack.push(e);
            backtrack(adj, covered, stack, out);
            stack.pop();
            covered[u] = false;
        }
    }
    covered[v] = false;
}

/// Σ over matchings of the product of edge weights.
pub fn partition_function_enum(lat: &ContractingLattice) -> Result<Rational, DimerError> {
    Ok(enumerate_matchings(lat)?
        .iter()
        .map(|m| matching_weight(m, lat))
        .sum())
}

/// [Π_{i∈I_2} Γ_i] · s_ω(x_1, …, x_N).
pub fn partition_function_schur(spec: &LatticeSpec) -> Result<Rational, DimerError> {
    spec.validate()?;
    let (_, i2) = i1_i2(spec);
    let mut z = schur_reduced(&spec.boundary(), &spec.x_range(1))?;
    if z.is_zero() {
        return Ok(z);
    }
    for i in i2 {
        z *= gamma_factor(spec, i)?;
    }
    Ok(z)
}

/// Convenience: build and enumerate.
pub fn partition_function_enum_spec(spec: &LatticeSpec) -> Result<Rational, DimerError> {
    partition_function_enum(&build_lattice(spec)?)
}
