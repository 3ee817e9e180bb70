//! Graph families, BFS metrics and Cayley graphs of SL_k(F_q).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{pow_nonneg, weighted_pair_sum, FiniteMetricSpace, ProbabilityWeights};

/// Largest vertex count any generator produces.
pub const MAX_VERTICES: usize = 4096;
/// Connectivity retries for random regular graphs.
pub const RANDOM_REGULAR_ATTEMPTS: usize = 100;
/// Pairings tried per attempt before a simple graph is found.
pub const PAIRINGS_PER_ATTEMPT: usize = 1000;

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regularity: Option<usize>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges)
    }
}

impl Graph {
    /// Validates the edge list and computes the regularity if any.
    pub fn new(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::SizeCap {
                what: "graph",
                size: n,
                cap: MAX_VERTICES,
            });
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; n];
        for &[a, b] in &edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) leaves 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        let regularity = degree.iter().all(|&d| d == degree[0]).then_some(degree[0]);
        Ok(Graph { n, edges, regularity })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn regularity(&self) -> Option<usize> {
        self.regularity
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &[a, b] in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        bfs_from(&self.adjacency(), 0).iter().all(|d| d.is_some())
    }
}

/// Named graph families, as read from builder specs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamily {
    Hypercube { k: u32 },
    Cycle { n: usize },
    Complete { n: usize },
    RandomRegular { n: usize, degree: usize, seed: u64 },
    CayleySl { k: usize, q: u32 },
}

impl GraphFamily {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            GraphFamily::Hypercube { k } => hypercube(k),
            GraphFamily::Cycle { n } => cycle(n),
            GraphFamily::Complete { n } => complete(n),
            GraphFamily::RandomRegular { n, degree, seed } => random_regular(n, degree, seed),
            GraphFamily::CayleySl { k, q } => cayley_sl(k, q).map(|c| c.graph),
        }
    }
}

/// Vertex `x` is adjacent to `x ^ (1 << i)`; graph distance is Hamming distance.
pub fn hypercube(k: u32) -> Result<Graph> {
    if k == 0 {
        return Err(Error::param("k", k, "hypercube dimension must be at least 1"));
    }
    if k > 12 {
        return Err(Error::SizeCap {
            what: "hypercube",
            size: 1usize.checked_shl(k).unwrap_or(usize::MAX),
            cap: MAX_VERTICES,
        });
    }
    let n = 1usize << k;
    let mut edges = Vec::with_capacity(n * k as usize / 2);
    for x in 0..n {
        for i in 0..k {
            let y = x ^ (1 << i);
            if x < y {
                edges.push([x, y]);
            }
        }
    }
    Graph::new(n, edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param("n", n, "cycle needs at least 3 vertices"));
    }
    Graph::new(n, (0..n).map(|i| [i, (i + 1) % n]).collect())
}

/// Complete graph; `n = 2` is allowed since K_2 is the basic period-2 walk.
pub fn complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("n", n, "complete graph needs at least 2 vertices"));
    }
    if n > MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "complete graph",
            size: n,
            cap: MAX_VERTICES,
        });
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push([i, j]);
        }
    }
    Graph::new(n, edges)
}

/// Random `Δ`-regular graph from the pairing model: stubs are paired one at
/// a time, pairs that would create a loop or a multi-edge are rejected and
/// redrawn, and a dead end restarts the pairing. Disconnected outcomes are
/// regenerated.
pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    if degree == 0 || degree >= n {
        return Err(Error::param("degree", degree, "need 0 < degree < n"));
    }
    if n * degree % 2 != 0 {
        return Err(Error::param("degree", degree, "n * degree must be even"));
    }
    if n > MAX_VERTICES {
        return Err(Error::SizeCap {
            what: "random regular graph",
            size: n,
            cap: MAX_VERTICES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_REGULAR_ATTEMPTS {
        for _ in 0..PAIRINGS_PER_ATTEMPT {
            if let Some(edges) = sequential_pairing(n, degree, &mut rng) {
                let g = Graph::new(n, edges)?;
                if g.is_connected() {
                    return Ok(g);
                }
                break;
            }
        }
    }
    Err(Error::GenerationFailed {
        attempts: RANDOM_REGULAR_ATTEMPTS,
    })
}

fn sequential_pairing(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<Vec<[usize; 2]>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    let mut seen = HashSet::with_capacity(n * degree / 2);
    let mut edges = Vec::with_capacity(n * degree / 2);
    let suitable = |a: usize, b: usize, seen: &HashSet<(usize, usize)>| a != b && !seen.contains(&(a.min(b), a.max(b)));
    while !stubs.is_empty() {
        let len = stubs.len();
        let mut chosen = None;
        for _ in 0..(16 * len) {
            let (i, j) = (rng.random_range(0..len), rng.random_range(0..len));
            if i != j && suitable(stubs[i], stubs[j], &seen) {
                chosen = Some((i, j));
                break;
            }
        }
        if chosen.is_none() {
            // Dead end unless some pair is still admissible.
            chosen = (0..len)
                .flat_map(|i| ((i + 1)..len).map(move |j| (i, j)))
                .find(|&(i, j)| suitable(stubs[i], stubs[j], &seen));
        }
        let (i, j) = chosen?;
        let (a, b) = (stubs[i].min(stubs[j]), stubs[i].max(stubs[j]));
        seen.insert((a, b));
        edges.push([a, b]);
        let (hi, lo) = (i.max(j), i.min(j));
        stubs.swap_remove(hi);
        stubs.swap_remove(lo);
    }
    edges.sort_unstable();
    Some(edges)
}

fn bfs_from(adj: &[Vec<usize>], source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued vertices are labelled");
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// All-pairs shortest-path metric and diameter.
pub fn bfs_metric(g: &Graph) -> Result<(FiniteMetricSpace, u32)> {
    let adj = g.adjacency();
    let rows: Vec<Vec<Option<u32>>> = (0..g.n()).into_par_iter().map(|s| bfs_from(&adj, s)).collect();
    let mut d = Matrix::zeros(g.n(), g.n());
    let mut diameter = 0;
    for (i, row) in rows.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let v = entry.ok_or_else(|| Error::InvalidGraph(format!("graph is disconnected: no path {i} -> {j}")))?;
            diameter = diameter.max(v);
            d[(i, j)] = f64::from(v);
        }
    }
    Ok((FiniteMetricSpace::from_trusted(d)?, diameter))
}

/// `(Σ w_i w_j d_ij^s)^{1/s}`.
pub fn distance_moment(m: &FiniteMetricSpace, s: f64, weights: &ProbabilityWeights) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::param("s", s, "moment exponent must be positive"));
    }
    if weights.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: weights.len(),
        });
    }
    Ok(pow_nonneg(weighted_pair_sum(weights.as_slice(), s, |i, j| m.d(i, j)), 1.0 / s))
}

/// A `k × k` matrix over F_q, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    k: usize,
    q: u32,
    entries: Vec<u32>,
}

impl GroupElement {
    pub fn identity(k: usize, q: u32) -> Self {
        let mut entries = vec![0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1 % q;
        }
        GroupElement { k, q, entries }
    }

    /// Validates entries in `[0, q)` and determinant 1.
    pub fn new(k: usize, q: u32, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: entries.len(),
            });
        }
        if entries.iter().any(|&x| x >= q) {
            return Err(Error::param("entries", q, "entries must lie in [0, q)"));
        }
        let g = GroupElement { k, q, entries };
        if g.determinant() != 1 % q {
            return Err(Error::param("entries", g.determinant(), "determinant must be 1"));
        }
        Ok(g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.k + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let (k, q) = (self.k, u64::from(self.q));
        let mut entries = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0u64;
                for l in 0..k {
                    acc += u64::from(self.entry(i, l)) * u64::from(other.entry(l, j));
                }
                entries[i * k + j] = (acc % q) as u32;
            }
        }
        GroupElement { k, q: self.q, entries }
    }

    /// Gauss–Jordan inverse over F_q.
    pub fn inverse(&self) -> GroupElement {
        let (k, q) = (self.k, i64::from(self.q));
        let mut a: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(self.entry(i, j))).collect()).collect();
        let mut inv: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        for col in 0..k {
            let pivot = (col..k).find(|&r| a[r][col] != 0).expect("SL_k elements are invertible");
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let scale = mod_inverse(a[col][col], q);
            for j in 0..k {
                a[col][j] = a[col][j] * scale % q;
                inv[col][j] = inv[col][j] * scale % q;
            }
            for r in 0..k {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..k {
                        a[r][j] = (a[r][j] - f * a[col][j]).rem_euclid(q);
                        inv[r][j] = (inv[r][j] - f * inv[col][j]).rem_euclid(q);
                    }
                }
            }
        }
        GroupElement {
            k,
            q: self.q,
            entries: inv.into_iter().flatten().map(|x| x as u32).collect(),
        }
    }

    pub fn determinant(&self) -> u32 {
        let (k, q) = (self.k, i64::from(self.q));
        let mut a: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(self.entry(i, j))).collect()).collect();
        let mut det = 1i64;
        for col in 0..k {
            let Some(pivot) = (col..k).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            if pivot != col {
                a.swap(col, pivot);
                det = (q - det) % q;
            }
            det = det * a[col][col] % q;
            let inv = mod_inverse(a[col][col], q);
            for r in (col + 1)..k {
                let f = a[r][col] * inv % q;
                for j in col..k {
                    a[r][j] = (a[r][j] - f * a[col][j]).rem_euclid(q);
                }
            }
        }
        det.rem_euclid(q) as u32
    }

    /// Matrix rows as text, e.g. `[[1,0],[0,1]]`.
    pub fn label(&self) -> String {
        let rows: Vec<String> = (0..self.k)
            .map(|i| {
                let row: Vec<String> = (0..self.k).map(|j| self.entry(i, j).to_string()).collect();
                format!("[{}]", row.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

fn mod_inverse(a: i64, q: i64) -> i64 {
    let mut result = 1i64;
    let mut base = a.rem_euclid(q);
    let mut exp = q - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    result
}

fn is_prime(q: u32) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// `|SL_k(F_q)| = q^{k(k-1)/2} ∏_{i=2}^{k} (q^i - 1)`, saturating.
pub fn sl_order(k: usize, q: u32) -> u128 {
    let q = u128::from(q);
    let mut order = q.saturating_pow((k * (k - 1) / 2) as u32);
    for i in 2..=k {
        order = order.saturating_mul(q.saturating_pow(i as u32).saturating_sub(1));
    }
    order
}

/// Elementary generators `I ± E(i,j)`, deduplicated (they coincide for q = 2).
pub fn sl_generators(k: usize, q: u32) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for sign in [1, q - 1] {
                let mut g = GroupElement::identity(k, q);
                g.entries[i * k + j] = sign % q;
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
    }
    gens
}

/// Cayley graph of SL_k(F_q) with its word metric.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub graph: Graph,
    pub elements: Vec<GroupElement>,
    pub generators: Vec<GroupElement>,
    pub metric: FiniteMetricSpace,
    pub diameter: u32,
}

impl CayleyGraph {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.elements.iter().position(|e| e == g)
    }
}

/// Enumerates SL_k(F_q) by BFS from the identity, with edges `x -- x·s`.
pub fn cayley_sl(k: usize, q: u32) -> Result<CayleyGraph> {
    if k < 2 {
        return Err(Error::param("k", k, "matrix size must be at least 2"));
    }
    if !is_prime(q) {
        return Err(Error::param("q", q, "field size must be prime"));
    }
    let order = sl_order(k, q);
    if order > MAX_VERTICES as u128 {
        return Err(Error::SizeCap {
            what: "SL_k(F_q)",
            size: usize::try_from(order).unwrap_or(usize::MAX),
            cap: MAX_VERTICES,
        });
    }
    let generators = sl_generators(k, q);
    let mut index: HashMap<GroupElement, usize> = HashMap::new();
    let mut elements = vec![GroupElement::identity(k, q)];
    index.insert(elements[0].clone(), 0);
    let mut edges = HashSet::new();
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        for s in &generators {
            let y = x.mul(s);
            let j = match index.get(&y) {
                Some(&j) => j,
                None => {
                    elements.push(y.clone());
                    index.insert(y, elements.len() - 1);
                    elements.len() - 1
                }
            };
            edges.insert((head.min(j), head.max(j)));
        }
        head += 1;
    }
    let mut edges: Vec<[usize; 2]> = edges.into_iter().map(|(a, b)| [a, b]).collect();
    edges.sort_unstable();
    let graph = Graph::new(elements.len(), edges)?;
    let (metric, diameter) = bfs_metric(&graph)?;
    let metric = metric.with_labels(elements.iter().map(GroupElement::label).collect())?;
    Ok(CayleyGraph {
        graph,
        elements,
        generators,
        metric,
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let q3 = hypercube(3).unwrap();
        assert_eq!((q3.n(), q3.edges().len(), q3.regularity()), (8, 12, Some(3)));
        assert_eq!(bfs_metric(&q3).unwrap().1, 3);
        assert_eq!(bfs_metric(&cycle(5).unwrap()).unwrap().1, 2);
        assert_eq!(bfs_metric(&cycle(6).unwrap()).unwrap().1, 3);
        assert_eq!(complete(4).unwrap().edges().len(), 6);
        assert!(hypercube(13).is_err());
        assert!(cycle(2).is_err());
    }

    #[test]
    fn hypercube_metric_is_hamming() {
        let (m, diam) = bfs_metric(&hypercube(5).unwrap()).unwrap();
        assert_eq!(diam, 5);
        for x in 0..32usize {
            for y in 0..32usize {
                assert_eq!(m.d(x, y), f64::from((x ^ y).count_ones()));
            }
        }
    }

    #[test]
    fn random_regular_is_reproducible_and_regular() {
        let a = random_regular(16, 3, 7).unwrap();
        let b = random_regular(16, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regularity(), Some(3));
        assert!(a.degrees().iter().all(|&d| d == 3));
        assert!(random_regular(5, 3, 0).is_err());
        assert!(random_regular(4, 4, 0).is_err());
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = Graph::new(4, vec![[0, 1], [2, 3]]).unwrap();
        assert!(bfs_metric(&g).is_err());
        assert!(Graph::new(3, vec![[0, 0]]).is_err());
        assert!(Graph::new(3, vec![[0, 1], [1, 0]]).is_err());
    }

    #[test]
    fn moments() {
        let (m, _) = bfs_metric(&hypercube(4).unwrap()).unwrap();
        let w = ProbabilityWeights::uniform(16).unwrap();
        assert!((distance_moment(&m, 1.0, &w).unwrap() - 2.0).abs() < 1e-15);
        let two = FiniteMetricSpace::new(Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let w2 = ProbabilityWeights::uniform(2).unwrap();
        assert!((distance_moment(&two, 2.0, &w2).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sl_orders_and_regularity() {
        for (k, q, order, degree) in [(2, 3, 24, 4), (2, 5, 120, 4), (3, 2, 168, 6), (2, 2, 6, 2)] {
            let c = cayley_sl(k, q).unwrap();
            assert_eq!(c.order(), order, "SL_{k}(F_{q})");
            assert_eq!(c.graph.regularity(), Some(degree));
            assert!(c.elements.iter().all(|g| g.determinant() == 1));
        }
        assert!(cayley_sl(2, 4).is_err());
        assert!(cayley_sl(3, 3).is_err());
    }

    #[test]
    fn inverse_and_determinant() {
        let c = cayley_sl(2, 5).unwrap();
        let id = GroupElement::identity(2, 5);
        for g in &c.elements {
            assert_eq!(g.mul(&g.inverse()), id);
        }
        assert!(GroupElement::new(2, 3, vec![1, 1, 1, 1]).is_err());
    }
}
