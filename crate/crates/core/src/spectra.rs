//! Graphs, diagonal observables and outcome distributions.
//!
//! Conventions shared by the whole crate:
//! * bit `j` of an integer basis index encodes qubit/node `j` (qubit 0 is the
//!   least significant bit);
//! * character `i` of a bitstring is the bit of qubit/node `i`, so `"011"`
//!   assigns 0 to node 0 and 1 to nodes 1 and 2;
//! * MaxCut energies follow `E(z) = −Cut(z)`, so the ground state of the cost
//!   observable is the maximum cut.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

/// Largest qubit count for which energies are stored as an explicit table.
pub const TABLE_LIMIT: usize = 20;

/// Exhaustive-search budget for brute-force MaxCut.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Parse a bitstring (`'0'`/`'1'`, character `i` = bit of node `i`) into an
/// integer assignment.
pub fn parse_assignment(s: &str, n: usize) -> Result<u64> {
    if s.len() != n {
        return Err(Error::InvalidInput(format!(
            "assignment has length {}, expected {n}",
            s.len()
        )));
    }
    let mut z = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => z |= 1 << i,
            other => {
                return Err(Error::InvalidInput(format!("invalid bit character {other:?}")));
            }
        }
    }
    Ok(z)
}

/// Render an integer assignment as a bitstring (character `i` = bit of node `i`).
pub fn format_assignment(z: u64, n: usize) -> String {
    (0..n).map(|i| if z >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Reverse the low `n` bits; bitstring lexicographic order equals numeric
/// order of this key.
fn lex_key(z: u64, n: usize) -> u64 {
    z.reverse_bits() >> (64 - n)
}

/// Simple undirected graph on `0..node_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Build a graph, canonicalizing edges to `(min, max)` sorted order.
    /// Self-loops, duplicate edges and out-of-range indices are rejected.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInput("graph needs at least one node".into()));
        }
        let mut canon: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop at node {a}")));
            }
            if a as usize >= node_count || b as usize >= node_count {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) out of range for {node_count} nodes"
                )));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate edge".into()));
        }
        Ok(Graph { node_count, edges: canon })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge-list text form: header `n <node_count>`, then one `i j` per line.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = format!("n {}\n", self.node_count);
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty graph file".into()))?;
        let mut parts = header.split_whitespace();
        let n = match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(count), None) => count
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad node count in header {header:?}")))?,
            _ => return Err(Error::InvalidInput(format!("bad header line {header:?}"))),
        };
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => {
                    let a = a
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad edge line {line:?}")))?;
                    let b = b
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad edge line {line:?}")))?;
                    edges.push((a, b));
                }
                _ => return Err(Error::InvalidInput(format!("bad edge line {line:?}"))),
            }
        }
        Graph::new(n, edges)
    }
}

/// Number of edges cut by an integer assignment.
pub fn cut_value_bits(graph: &Graph, assignment: u64) -> u32 {
    graph
        .edges
        .iter()
        .map(|&(a, b)| ((assignment >> a) ^ (assignment >> b)) as u32 & 1)
        .sum()
}

/// Number of edges cut by a bitstring assignment.
pub fn cut_value(graph: &Graph, assignment: &str) -> Result<u32> {
    let z = parse_assignment(assignment, graph.node_count)?;
    Ok(cut_value_bits(graph, z))
}

/// Exhaustive MaxCut with deterministic tie-breaking.
///
/// Returns the maximum cut and the lexicographically smallest witness
/// bitstring attaining it.
pub fn brute_force_maxcut(graph: &Graph) -> Result<(u32, String)> {
    let n = graph.node_count;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit(format!(
            "brute-force MaxCut capped at {BRUTE_FORCE_LIMIT} nodes, got {n}"
        )));
    }
    let total = 1u64 << n;
    let best = (0..total)
        .into_par_iter()
        .fold(
            || (0u32, 0u64),
            |best, z| {
                let c = cut_value_bits(graph, z);
                better_witness(best, (c, z), n)
            },
        )
        .reduce(|| (0, 0), |a, b| better_witness(a, b, n));
    Ok((best.0, format_assignment(best.1, n)))
}

fn better_witness(a: (u32, u64), b: (u32, u64), n: usize) -> (u32, u64) {
    if b.0 > a.0 || (b.0 == a.0 && lex_key(b.1, n) < lex_key(a.1, n)) {
        b
    } else {
        a
    }
}

/// Erdős–Rényi graph `G(n, p_edge)`: every unordered pair is an edge
/// independently with probability `p_edge`. Deterministic for a fixed seed.
pub fn erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidInput("graph needs at least one node".into()));
    }
    if !(0.0..=1.0).contains(&p_edge) {
        return Err(Error::InvalidInput(format!("edge probability {p_edge} outside [0, 1]")));
    }
    let mut rng = rng::stream(seed, &[]);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.random::<f64>() < p_edge {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

enum EnergyRepr {
    Table(Vec<f64>),
    Lazy(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for EnergyRepr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnergyRepr::Table(t) => write!(f, "Table(len={})", t.len()),
            EnergyRepr::Lazy(_) => write!(f, "Lazy"),
        }
    }
}

/// Energy function over n-bit strings with cached spectral bounds.
#[derive(Debug, Clone)]
pub struct DiagonalObservable {
    qubit_count: usize,
    repr: Arc<EnergyRepr>,
    min_energy: f64,
    max_energy: f64,
}

impl DiagonalObservable {
    /// Build from an explicit energy table of length `2^n`.
    pub fn from_table(energies: Vec<f64>) -> Result<Self> {
        let len = energies.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!("table length {len} is not a power of two")));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidInput("non-finite energy in table".into()));
        }
        let n = len.trailing_zeros() as usize;
        let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(DiagonalObservable {
            qubit_count: n,
            repr: Arc::new(EnergyRepr::Table(energies)),
            min_energy: min,
            max_energy: max,
        })
    }

    /// Build from an energy function and caller-supplied exact bounds.
    /// Used above [`TABLE_LIMIT`] qubits where a table would not fit.
    pub fn from_fn(
        qubit_count: usize,
        energy: impl Fn(u64) -> f64 + Send + Sync + 'static,
        min_energy: f64,
        max_energy: f64,
    ) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::InvalidInput("observable needs at least one qubit".into()));
        }
        if min_energy > max_energy {
            return Err(Error::InvalidInput("min_energy exceeds max_energy".into()));
        }
        Ok(DiagonalObservable {
            qubit_count,
            repr: Arc::new(EnergyRepr::Lazy(Arc::new(energy))),
            min_energy,
            max_energy,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn energy(&self, z: u64) -> f64 {
        match &*self.repr {
            EnergyRepr::Table(t) => t[z as usize],
            EnergyRepr::Lazy(f) => f(z),
        }
    }

    pub fn min_energy(&self) -> f64 {
        self.min_energy
    }

    pub fn max_energy(&self) -> f64 {
        self.max_energy
    }

    /// Spectral width `Δ = max − min`.
    pub fn spectral_width(&self) -> f64 {
        self.max_energy - self.min_energy
    }

    /// All `2^n` energies in index order (only below [`TABLE_LIMIT`]).
    pub fn energy_table(&self) -> Result<Vec<f64>> {
        if self.qubit_count > TABLE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "energy table for {} qubits exceeds the {TABLE_LIMIT}-qubit cap",
                self.qubit_count
            )));
        }
        Ok(match &*self.repr {
            EnergyRepr::Table(t) => t.clone(),
            EnergyRepr::Lazy(f) => (0..1u64 << self.qubit_count).map(|z| f(z)).collect(),
        })
    }
}

/// MaxCut cost observable: `E(z) = −Cut(z)`.
pub fn maxcut_hamiltonian(graph: &Graph) -> Result<DiagonalObservable> {
    let n = graph.node_count;
    if n <= TABLE_LIMIT {
        let table: Vec<f64> =
            (0..1u64 << n).map(|z| -(cut_value_bits(graph, z) as f64)).collect();
        DiagonalObservable::from_table(table)
    } else {
        let (max_cut, _) = brute_force_maxcut(graph)?;
        let g = graph.clone();
        DiagonalObservable::from_fn(
            n,
            move |z| -(cut_value_bits(&g, z) as f64),
            -(max_cut as f64),
            0.0,
        )
    }
}

/// Global projector complement `I − |0…0⟩⟨0…0|`: energy 0 on the all-zeros
/// string, 1 elsewhere.
pub fn global_projector_observable(n: usize) -> Result<DiagonalObservable> {
    if n == 0 {
        return Err(Error::InvalidInput("observable needs at least one qubit".into()));
    }
    if n <= TABLE_LIMIT {
        let mut table = vec![1.0; 1 << n];
        table[0] = 0.0;
        DiagonalObservable::from_table(table)
    } else {
        DiagonalObservable::from_fn(n, |z| if z == 0 { 0.0 } else { 1.0 }, 0.0, 1.0)
    }
}

/// Finite outcome distribution in canonical form: values sorted ascending,
/// exactly-equal values merged, probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    outcomes: Vec<(f64, f64)>,
}

impl OutcomeDistribution {
    /// Validate and canonicalize `(value, probability)` pairs.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64)> = pairs.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::InvalidInput("distribution needs at least one outcome".into()));
        }
        let mut total = 0.0;
        for &(v, p) in &raw {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite outcome value {v}")));
            }
            if !(p >= 0.0) {
                return Err(Error::InvalidInput(format!("negative probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self::canonicalize(raw))
    }

    /// Normalize non-negative weights into a distribution.
    pub fn from_weights(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let raw: Vec<(f64, f64)> = pairs.into_iter().collect();
        let total: f64 = raw.iter().map(|&(_, w)| w).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidInput(format!("weights sum to {total}")));
        }
        OutcomeDistribution::new(raw.into_iter().map(|(v, w)| (v, w / total)))
    }

    fn canonicalize(mut raw: Vec<(f64, f64)>) -> Self {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut outcomes: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (v, p) in raw {
            match outcomes.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => outcomes.push((v, p)),
            }
        }
        OutcomeDistribution { outcomes }
    }

    /// `(value, probability)` pairs, sorted ascending by value.
    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn min_value(&self) -> f64 {
        self.outcomes[0].0
    }

    pub fn max_value(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1].0
    }

    /// Smallest value carrying nonzero probability.
    pub fn min_supported(&self) -> f64 {
        self.outcomes.iter().find(|&&(_, p)| p > 0.0).map(|&(v, _)| v).unwrap_or(self.min_value())
    }

    /// Largest value carrying nonzero probability.
    pub fn max_supported(&self) -> f64 {
        self.outcomes
            .iter()
            .rev()
            .find(|&&(_, p)| p > 0.0)
            .map(|&(v, _)| v)
            .unwrap_or(self.max_value())
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|&(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.outcomes.iter().map(|&(v, p)| p * (v - m) * (v - m)).sum()
    }

    pub fn third_central_moment(&self) -> f64 {
        let m = self.mean();
        self.outcomes.iter().map(|&(v, p)| p * (v - m).powi(3)).sum()
    }

    /// Canonical text form used by golden tests: one `value probability`
    /// pair per line, in canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for &(v, p) in &self.outcomes {
            s.push_str(&format!("{v} {p}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(v), Some(p), None) => {
                    let v = v
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad value in {line:?}")))?;
                    let p = p
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad probability in {line:?}")))?;
                    pairs.push((v, p));
                }
                _ => return Err(Error::InvalidInput(format!("bad outcome line {line:?}"))),
            }
        }
        OutcomeDistribution::new(pairs)
    }
}

/// Gibbs distribution `p_i ∝ e^{−β E_i}` over an explicit spectrum.
///
/// Weights are computed relative to the β-favored extreme energy, so the
/// normalization stays finite for `|β·Δ|` up to 700.
pub fn gibbs_distribution(spectrum: &[f64], beta: f64) -> Result<OutcomeDistribution> {
    if spectrum.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite beta {beta}")));
    }
    let anchor = if beta >= 0.0 {
        spectrum.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    OutcomeDistribution::from_weights(spectrum.iter().map(|&e| (e, (-beta * (e - anchor)).exp())))
}

/// Gibbs distribution over the spectrum of a diagonal observable.
pub fn gibbs_from_observable(obs: &DiagonalObservable, beta: f64) -> Result<OutcomeDistribution> {
    gibbs_distribution(&obs.energy_table()?, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn cut_value_examples() {
        // enumerate K3 by hand: "010" separates node 1, cutting (0,1) and (1,2)
        assert_eq!(cut_value(&triangle(), "010").unwrap(), 2);
        assert_eq!(cut_value(&triangle(), "000").unwrap(), 0);
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        // edge (0,1) cut, (1,2) not
        assert_eq!(cut_value(&path, "011").unwrap(), 1);
    }

    #[test]
    fn cut_value_length_mismatch() {
        assert!(matches!(cut_value(&triangle(), "0101"), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn graph_invariants_enforced() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn maxcut_energy_is_negated_cut() {
        let g = triangle();
        let obs = maxcut_hamiltonian(&g).unwrap();
        assert_abs_diff_eq!(obs.energy(parse_assignment("010", 3).unwrap()), -2.0);
        assert_abs_diff_eq!(obs.energy(0), 0.0);
        for z in 0..8u64 {
            assert_abs_diff_eq!(obs.energy(z), -(cut_value_bits(&g, z) as f64));
        }
        // brute force over 2^3 strings
        let min = (0..8u64).map(|z| obs.energy(z)).fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min, -2.0);
        assert_abs_diff_eq!(obs.min_energy(), -2.0);
        assert_abs_diff_eq!(obs.max_energy(), 0.0);
    }

    #[test]
    fn brute_force_examples() {
        // enumerate 8 strings; lexicographically smallest witness
        assert_eq!(brute_force_maxcut(&triangle()).unwrap(), (2, "001".to_string()));
        let single = Graph::new(2, [(0, 1)]).unwrap();
        assert_eq!(brute_force_maxcut(&single).unwrap(), (1, "01".to_string()));
        let edgeless = Graph::new(3, []).unwrap();
        assert_eq!(brute_force_maxcut(&edgeless).unwrap(), (0, "000".to_string()));
    }

    #[test]
    fn brute_force_rejects_oversized() {
        let g = Graph::new(25, [(0, 1)]).unwrap();
        assert!(matches!(brute_force_maxcut(&g), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn brute_force_dominates_random_sampling() {
        let g = erdos_renyi(10, 0.4, 99).unwrap();
        let (best, _) = brute_force_maxcut(&g).unwrap();
        let mut rng = rng::stream(5, &[]);
        for _ in 0..1000 {
            let z = rng.random::<u64>() & ((1 << 10) - 1);
            assert!(cut_value_bits(&g, z) <= best);
        }
    }

    #[test]
    fn global_projector_values() {
        let o1 = global_projector_observable(1).unwrap();
        assert_abs_diff_eq!(o1.energy(0b0), 0.0);
        assert_abs_diff_eq!(o1.energy(0b1), 1.0);
        let o3 = global_projector_observable(3).unwrap();
        assert_abs_diff_eq!(o3.energy(parse_assignment("010", 3).unwrap()), 1.0);
    }

    #[test]
    fn gibbs_examples() {
        let uniform = gibbs_distribution(&[0.0, 1.0], 0.0).unwrap();
        assert_abs_diff_eq!(uniform.outcomes()[0].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(uniform.outcomes()[1].1, 0.5, epsilon = 1e-15);

        let cold = gibbs_distribution(&[0.0, 1.0], 50.0).unwrap();
        assert_abs_diff_eq!(cold.outcomes()[0].1, 1.0, epsilon = 1e-12);

        // direct normalization e^0/(e^0 + e^{-ln 2}) = 2/3
        let d = gibbs_distribution(&[0.0, 1.0], std::f64::consts::LN_2).unwrap();
        assert_abs_diff_eq!(d.outcomes()[0].1, 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.outcomes()[1].1, 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn gibbs_survives_extreme_beta() {
        let spectrum: Vec<f64> = (0..32).map(|i| i as f64 / 31.0).collect();
        let d = gibbs_distribution(&spectrum, 700.0).unwrap();
        let total: f64 = d.outcomes().iter().map(|&(_, p)| p).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        let empty = erdos_renyi(6, 0.0, 3).unwrap();
        assert_eq!(empty.edge_count(), 0);
        let full = erdos_renyi(6, 1.0, 3).unwrap();
        assert_eq!(full.edge_count(), 15);
        let a = erdos_renyi(8, 0.43, 12345).unwrap();
        let b = erdos_renyi(8, 0.43, 12345).unwrap();
        assert_eq!(a, b);
        let c = erdos_renyi(8, 0.43, 12346).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn graph_text_round_trip() {
        let g = erdos_renyi(7, 0.5, 4).unwrap();
        let text = g.to_edge_list_text();
        assert!(text.starts_with("n 7\n"));
        assert_eq!(Graph::from_edge_list_text(&text).unwrap(), g);
    }

    #[test]
    fn distribution_canonical_form() {
        let d = OutcomeDistribution::new([(1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(d.outcomes(), &[(0.0, 0.5), (1.0, 0.5)]);
        assert!(OutcomeDistribution::new([(0.0, 0.6), (1.0, 0.6)]).is_err());
        assert!(OutcomeDistribution::new([(0.0, -0.1), (1.0, 1.1)]).is_err());
    }

    #[test]
    fn distribution_text_round_trip() {
        let d = OutcomeDistribution::new([(-2.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(OutcomeDistribution::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn assignment_formatting_round_trip() {
        for z in 0..16u64 {
            let s = format_assignment(z, 4);
            assert_eq!(parse_assignment(&s, 4).unwrap(), z);
        }
    }
}
