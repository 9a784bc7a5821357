//! Labeled simple graphs and node permutations.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on `n` labeled nodes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![false; n * n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Config(format!("invalid edge ({a}, {b}) for {n} nodes")));
            }
            g.set_edge(a, b, true);
        }
        Ok(g)
    }

    /// Erdős–Rényi sample: each of the `n(n-1)/2` pairs present with
    /// probability `density`.
    pub fn random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<Self> {
        if !(density > 0.0 && density < 1.0) {
            return Err(Error::InvalidDensity(density));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    g.set_edge(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.n + b]
    }

    pub fn set_edge(&mut self, a: usize, b: usize, present: bool) {
        self.adj[a * self.n + b] = present;
        self.adj[b * self.n + a] = present;
    }

    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        let present = self.has_edge(a, b);
        self.set_edge(a, b, !present);
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j))).filter(|&(i, j)| self.has_edge(i, j))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Sorted degree sequence.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|i| (0..self.n).filter(|&j| self.has_edge(i, j)).count()).collect();
        d.sort_unstable();
        d
    }

    /// Packed upper triangle, row-major, most significant bit first,
    /// zero-padded to a byte boundary.
    pub fn upper_triangle_bytes(&self) -> Vec<u8> {
        let bits = self.n * self.n.saturating_sub(1) / 2;
        let mut out = vec![0u8; bits.div_ceil(8)];
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        out
    }

    pub fn from_upper_triangle_bytes(n: usize, bytes: &[u8]) -> Result<Self> {
        let bits = n * n.saturating_sub(1) / 2;
        if bytes.len() != bits.div_ceil(8) {
            return Err(Error::SizeMismatch { expected: bits.div_ceil(8), actual: bytes.len() });
        }
        let mut g = Self::empty(n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if bytes[k / 8] & (0x80 >> (k % 8)) != 0 {
                    g.set_edge(i, j, true);
                }
                k += 1;
            }
        }
        Ok(g)
    }

    /// Every labeled graph on `n` nodes. Only sensible for tiny `n`.
    pub fn enumerate_all(n: usize) -> Vec<Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        assert!(pairs.len() < 24, "too many graphs to enumerate");
        (0u32..1 << pairs.len())
            .map(|mask| {
                let mut g = Graph::empty(n);
                for (bit, &(i, j)) in pairs.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        g.set_edge(i, j, true);
                    }
                }
                g
            })
            .collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, {})", self.n, hex::encode(self.upper_triangle_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    upper: String,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { n: self.n, upper: hex::encode(self.upper_triangle_bytes()) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        let bytes = hex::decode(&repr.upper).map_err(serde::de::Error::custom)?;
        Graph::from_upper_triangle_bytes(repr.n, &bytes).map_err(serde::de::Error::custom)
    }
}

/// Deterministic labeled encoding: `n` as a big-endian u32, then the packed
/// upper triangle. Not isomorphism-invariant.
pub fn canonical_bytes(g: &Graph) -> Vec<u8> {
    let mut out = (g.n as u32).to_be_bytes().to_vec();
    out.extend(g.upper_triangle_bytes());
    out
}

/// Bit length of [`canonical_bytes`] for an `n`-node graph.
pub fn canonical_bit_len(n: usize) -> usize {
    8 * (4 + (n * n.saturating_sub(1) / 2).div_ceil(8))
}

/// A bijection on `0..n`; `map[i]` is the image of node `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::NotPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Uniform over all `n!` permutations (Fisher–Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewNodes { n, min: 1 });
        }
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.map
    }
}

/// Relabels `g`: edge `(i, j)` in `g` becomes edge `(p(i), p(j))`.
pub fn apply_perm(p: &Permutation, g: &Graph) -> Result<Graph> {
    if p.len() != g.n {
        return Err(Error::SizeMismatch { expected: g.n, actual: p.len() });
    }
    let n = g.n;
    let mut out = Graph::empty(n);
    for i in 0..n {
        let pi = p.map[i];
        for j in 0..n {
            if g.adj[i * n + j] {
                out.adj[pi * n + p.map[j]] = true;
            }
        }
    }
    Ok(out)
}

/// `outer ∘ inner`: `result(i) = outer(inner(i))`.
pub fn compose(outer: &Permutation, inner: &Permutation) -> Result<Permutation> {
    if outer.len() != inner.len() {
        return Err(Error::SizeMismatch { expected: outer.len(), actual: inner.len() });
    }
    Ok(Permutation { map: inner.map.iter().map(|&i| outer.map[i]).collect() })
}

pub fn invert(p: &Permutation) -> Permutation {
    let mut map = vec![0; p.len()];
    for (i, &v) in p.map.iter().enumerate() {
        map[v] = i;
    }
    Permutation { map }
}

/// A graph-isomorphism instance: `sigma` maps `g1` onto `g0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub g0: Graph,
    pub g1: Graph,
    pub sigma: Permutation,
}

/// Samples `G0` at the given density and a uniform `σ`, then sets
/// `G1 = σ⁻¹(G0)` so that `σ(G1) = G0`.
pub fn gen_instance<R: Rng + ?Sized>(n: usize, edge_density: f64, rng: &mut R) -> Result<Instance> {
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let g0 = Graph::random(n, edge_density, rng)?;
    let sigma = Permutation::random(n, rng)?;
    instance_from_secret(g0, sigma)
}

/// Builds the instance for a chosen `G0` and secret `σ`.
pub fn instance_from_secret(g0: Graph, sigma: Permutation) -> Result<Instance> {
    let g1 = apply_perm(&invert(&sigma), &g0)?;
    Ok(Instance { g0, g1, sigma })
}

/// [`gen_instance`] resampled until `G1 ≠ G0` as labeled graphs, so that
/// `ξ(G0) = H` and `ξ(G1) = H` can never both hold.
pub fn gen_distinct_instance<R: Rng + ?Sized>(n: usize, edge_density: f64, rng: &mut R) -> Result<Instance> {
    for _ in 0..10_000 {
        let inst = gen_instance(n, edge_density, rng)?;
        if inst.g0 != inst.g1 {
            return Ok(inst);
        }
    }
    Err(Error::Config(format!("no instance with G0 != G1 found for n = {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, HashSet};

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn edge_set(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().collect()
    }

    #[test]
    fn apply_perm_examples() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(apply_perm(&Permutation::identity(3), &path).unwrap(), path);
        assert_eq!(apply_perm(&perm(&[2, 1, 0]), &path).unwrap(), path);

        let single = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let moved = apply_perm(&perm(&[1, 2, 0]), &single).unwrap();
        assert_eq!(edge_set(&moved), vec![(1, 2)]);
    }

    #[test]
    fn apply_perm_size_mismatch() {
        let err = apply_perm(&Permutation::identity(4), &Graph::empty(3)).unwrap_err();
        assert_eq!(err, Error::SizeMismatch { expected: 3, actual: 4 });
    }

    #[test]
    fn compose_and_invert_examples() {
        let p = perm(&[1, 2, 0]);
        assert_eq!(compose(&p, &Permutation::identity(3)).unwrap(), p);
        assert!(compose(&p, &invert(&p)).unwrap().is_identity());
        assert_eq!(compose(&p, &perm(&[2, 1, 0])).unwrap(), perm(&[0, 2, 1]));
        assert_eq!(invert(&p), perm(&[2, 0, 1]));
        assert_eq!(invert(&invert(&p)), p);
        assert!(invert(&Permutation::identity(5)).is_identity());
        assert!(compose(&p, &Permutation::identity(2)).is_err());
    }

    #[test]
    fn permutation_rejects_non_bijection() {
        assert_eq!(Permutation::new(vec![0, 0, 1]).unwrap_err(), Error::NotPermutation(3));
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }

    #[test]
    fn random_perm_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(Permutation::random(1, &mut rng).unwrap(), perm(&[0]));
        assert!(Permutation::random(0, &mut rng).is_err());
    }

    #[test]
    fn random_perm_is_uniform_on_s3() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 60_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..draws {
            let p = Permutation::random(3, &mut rng).unwrap();
            *counts.entry(p.as_slice().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let sd = (p * (1.0 - p) / draws as f64).sqrt();
        for (k, c) in counts {
            let f = c as f64 / draws as f64;
            assert!((f - p).abs() <= 4.0 * sd, "{k:?}: {f}");
        }
    }

    #[test]
    fn gen_instance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let inst = gen_instance(4, 0.5, &mut rng).unwrap();
            assert_eq!(apply_perm(&inst.sigma, &inst.g1).unwrap(), inst.g0);
            assert_eq!(inst.g0.edge_count(), inst.g1.edge_count());
        }
        let g0 = Graph::random(5, 0.5, &mut rng).unwrap();
        let inst = instance_from_secret(g0.clone(), Permutation::identity(5)).unwrap();
        assert_eq!(inst.g1, g0);
    }

    #[test]
    fn gen_instance_rejects_bad_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(gen_instance(4, 0.0, &mut rng), Err(Error::InvalidDensity(_))));
        assert!(matches!(gen_instance(4, 1.0, &mut rng), Err(Error::InvalidDensity(_))));
        assert!(matches!(gen_instance(1, 0.5, &mut rng), Err(Error::TooFewNodes { .. })));
    }

    #[test]
    fn canonical_bytes_examples() {
        assert_eq!(canonical_bytes(&Graph::empty(3)), vec![0, 0, 0, 3, 0]);
        let tri = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        // pairs in order (0,1), (0,2), (1,2)
        assert_eq!(canonical_bytes(&tri), vec![0, 0, 0, 3, 0b1110_0000]);
        assert_eq!(canonical_bytes(&path), vec![0, 0, 0, 3, 0b1010_0000]);
        assert_eq!(canonical_bytes(&tri), canonical_bytes(&tri.clone()));
        assert_eq!(canonical_bit_len(3), 40);
        assert_eq!(canonical_bit_len(8), 64);
    }

    #[test]
    fn canonical_bytes_injective_small_n() {
        for n in 1..=4 {
            let all = Graph::enumerate_all(n);
            let encodings: HashSet<Vec<u8>> = all.iter().map(canonical_bytes).collect();
            assert_eq!(encodings.len(), all.len());
            assert!(encodings.iter().all(|e| e.len() * 8 == canonical_bit_len(n)));
        }
    }

    #[test]
    fn graph_serde_round_trip() {
        let g = Graph::from_edges(5, &[(0, 4), (1, 3), (2, 3)]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":5,"upper":"1500"}"#);
        assert_eq!(serde_json::from_str::<Graph>(&json).unwrap(), g);
    }

    fn arb_case() -> impl Strategy<Value = (Graph, Permutation, Permutation)> {
        (2usize..9, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = Graph::random(n, 0.5, &mut rng).unwrap();
            let a = Permutation::random(n, &mut rng).unwrap();
            let b = Permutation::random(n, &mut rng).unwrap();
            (g, a, b)
        })
    }

    proptest! {
        #[test]
        fn functoriality((g, a, b) in arb_case()) {
            let lhs = apply_perm(&compose(&a, &b).unwrap(), &g).unwrap();
            let rhs = apply_perm(&a, &apply_perm(&b, &g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn relabeling_preserves_degrees((g, a, _b) in arb_case()) {
            let h = apply_perm(&a, &g).unwrap();
            prop_assert_eq!(h.edge_count(), g.edge_count());
            prop_assert_eq!(h.degree_multiset(), g.degree_multiset());
        }
    }
}
