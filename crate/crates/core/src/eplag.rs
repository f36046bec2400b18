//! Torsion-free groups generated inside `Q^V` by vertices and edges of a
//! prime-labelled graph, divided by powers of their labels and of a finite
//! set of primes `P`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{smith_normal_form, solve_with, IntMatrix, SmithForm};
use crate::primes::{is_prime, primes_avoiding};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeLabeledGraph {
    pub vertices: Vec<String>,
    pub vertex_labels: Vec<u64>,
    pub edges: Vec<(usize, usize)>,
    pub edge_labels: Vec<u64>,
    pub primes: BTreeSet<u64>,
}

impl PrimeLabeledGraph {
    pub fn new(
        vertices: Vec<String>,
        vertex_labels: Vec<u64>,
        edges: Vec<(usize, usize)>,
        edge_labels: Vec<u64>,
        primes: BTreeSet<u64>,
    ) -> Result<Self> {
        if vertex_labels.len() != vertices.len() || edge_labels.len() != edges.len() {
            return Err(Error::DimensionMismatch("one label per vertex and per edge is required".into()));
        }
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
        }
        for &f in vertex_labels.iter().chain(&edge_labels) {
            if !is_prime(f) {
                return Err(Error::NotPrime(f));
            }
            if primes.contains(&f) {
                return Err(Error::InvalidInput(format!("label {f} lies in the divisibility set")));
            }
        }
        let mut seen = BTreeSet::new();
        for &(v, w) in &edges {
            if v >= vertices.len() || w >= vertices.len() || v == w {
                return Err(Error::InvalidInput(format!("bad edge ({v}, {w})")));
            }
            if !seen.insert((v.min(w), v.max(w))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({v}, {w})")));
            }
        }
        Ok(PrimeLabeledGraph { vertices, vertex_labels, edges, edge_labels, primes })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// The same graph with vertex `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_vertices();
        let mut check: Vec<usize> = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let mut vertices = vec![String::new(); n];
        let mut labels = vec![0; n];
        for i in 0..n {
            vertices[perm[i]] = self.vertices[i].clone();
            labels[perm[i]] = self.vertex_labels[i];
        }
        let edges = self.edges.iter().map(|&(v, w)| (perm[v], perm[w])).collect();
        Self::new(vertices, labels, edges, self.edge_labels.clone(), self.primes.clone())
    }
}

/// A rooted tree given by its children.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    #[serde(default)]
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf() -> Self {
        Tree::default()
    }

    /// A path with `depth` edges.
    pub fn chain(depth: usize) -> Self {
        let mut t = Tree::leaf();
        for _ in 0..depth {
            t = Tree { children: vec![t] };
        }
        t
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

/// A generator `vector / denominator` of the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub support: Vec<usize>,
    pub denominator: BigInt,
}

impl Generator {
    pub fn to_qvector(&self, n: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); n];
        for &i in &self.support {
            v[i] = BigRational::new(BigInt::one(), self.denominator.clone());
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EplagGroup {
    pub graph: PrimeLabeledGraph,
    /// Vertices whose generators (and incident edge generators) do not get
    /// divided by powers of `P`. Empty for groups built from the schema.
    omitted: BTreeSet<usize>,
}

impl EplagGroup {
    pub fn new(graph: PrimeLabeledGraph) -> Self {
        EplagGroup { graph, omitted: BTreeSet::new() }
    }

    /// Drops the `P`-power denominators around vertex `v`, breaking the
    /// generator schema on purpose.
    pub fn omit_p_powers(mut self, v: usize) -> Self {
        self.omitted.insert(v);
        self
    }

    fn p_denominators(&self, bound: u32, allowed: bool) -> Vec<BigInt> {
        let mut out = vec![BigInt::one()];
        if allowed {
            for &p in &self.graph.primes {
                for n in 1..=bound {
                    out.push(BigInt::from(p).pow(n));
                }
            }
        }
        out
    }

    /// Every generator with exponents at most `bound`: `v / (d f(v)^m)` and
    /// `(v + w) / (d f({v,w}))` with `d` a power `p^n` of a prime in `P`
    /// (`n <= bound`) or 1, and `m <= bound`.
    pub fn generators(&self, bound: u32) -> Vec<Generator> {
        let g = &self.graph;
        let mut out = Vec::new();
        for v in 0..g.num_vertices() {
            let f = BigInt::from(g.vertex_labels[v]);
            for d in self.p_denominators(bound, !self.omitted.contains(&v)) {
                for m in 0..=bound {
                    out.push(Generator { support: vec![v], denominator: &d * f.pow(m) });
                }
            }
        }
        for (e, &(v, w)) in g.edges.iter().enumerate() {
            let f = BigInt::from(g.edge_labels[e]);
            let allowed = !self.omitted.contains(&v) && !self.omitted.contains(&w);
            for d in self.p_denominators(bound, allowed) {
                out.push(Generator { support: vec![v, w], denominator: &d * &f });
            }
        }
        out
    }

    pub fn lattice(&self, bound: u32) -> GeneratorLattice {
        GeneratorLattice::new(self, bound)
    }

    pub fn membership(&self, x: &[BigRational], bound: u32) -> Result<Membership> {
        self.lattice(bound).membership(x)
    }

    pub fn vertex(&self, v: usize, denominator: u64) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.graph.num_vertices()];
        x[v] = BigRational::new(BigInt::one(), BigInt::from(denominator));
        x
    }
}

/// The generators at one bound, scaled by a common denominator into an
/// integer lattice with a cached Smith form.
#[derive(Clone, Debug)]
pub struct GeneratorLattice {
    bound: u32,
    n: usize,
    generators: Vec<Generator>,
    common: BigInt,
    snf: SmithForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `x = sum_j c_j generator_j` for the listed `(generator, c_j)`.
    Member { certificate: Vec<(Generator, BigInt)> },
    /// Not generated by the generators up to this bound.
    NonmemberAtBound(u32),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

impl GeneratorLattice {
    pub fn new(group: &EplagGroup, bound: u32) -> Self {
        let n = group.graph.num_vertices();
        let generators = group.generators(bound);
        let common = generators.iter().fold(BigInt::one(), |acc, g| acc.lcm(&g.denominator));
        let cols: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| {
                let mut v = vec![BigInt::zero(); n];
                let scaled = &common / &g.denominator;
                for &i in &g.support {
                    v[i] = scaled.clone();
                }
                v
            })
            .collect();
        let m = IntMatrix::from_columns(&cols, n).expect("columns have length n");
        let snf = smith_normal_form(&m);
        GeneratorLattice { bound, n, generators, common, snf }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn membership(&self, x: &[BigRational]) -> Result<Membership> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!("vector of length {} over {} vertices", x.len(), self.n)));
        }
        let mut y = Vec::with_capacity(self.n);
        for xi in x {
            let scaled = xi * BigRational::from_integer(self.common.clone());
            if !scaled.is_integer() {
                return Ok(Membership::NonmemberAtBound(self.bound));
            }
            y.push(scaled.to_integer());
        }
        if let Some(single) = self.single_generator(&y) {
            return Ok(Membership::Member { certificate: vec![single] });
        }
        match solve_with(&self.snf, &y) {
            None => Ok(Membership::NonmemberAtBound(self.bound)),
            Some(c) => {
                let certificate: Vec<(Generator, BigInt)> = self
                    .generators
                    .iter()
                    .cloned()
                    .zip(c)
                    .filter(|(_, k)| !k.is_zero())
                    .collect();
                Ok(Membership::Member { certificate })
            }
        }
    }
}

impl GeneratorLattice {
    /// A multiple of one generator, preferring the smallest denominator.
    fn single_generator(&self, y: &[BigInt]) -> Option<(Generator, BigInt)> {
        let support: Vec<usize> = (0..self.n).filter(|&i| !y[i].is_zero()).collect();
        let value = &y[*support.first()?];
        if support.iter().any(|&i| &y[i] != value) {
            return None;
        }
        self.generators
            .iter()
            .filter(|g| g.support == support)
            .filter_map(|g| {
                let step = &self.common / &g.denominator;
                value.is_multiple_of(&step).then(|| (g.clone(), value / step))
            })
            .min_by(|a, b| a.0.denominator.cmp(&b.0.denominator))
    }
}

/// Checks a membership certificate with exact rational arithmetic.
pub fn verify_certificate(x: &[BigRational], certificate: &[(Generator, BigInt)]) -> bool {
    let mut sum = vec![BigRational::zero(); x.len()];
    for (g, k) in certificate {
        for &i in &g.support {
            if i >= x.len() {
                return false;
            }
            sum[i] += BigRational::new(k.clone(), g.denominator.clone());
        }
    }
    sum == x
}

/// Labels a tree: level-`n` vertices get `q_n`, edges from level `n` to
/// `n + 1` get `p_n`. The primes outside `P` in increasing order alternate
/// between the `p` stream (even positions) and the `q` stream (odd).
pub fn tree_to_eplag(tree: &Tree, primes: &BTreeSet<u64>) -> Result<EplagGroup> {
    let mut vertices = Vec::new();
    let mut levels = Vec::new();
    let mut edges = Vec::new();
    let mut queue = std::collections::VecDeque::from([(tree, 0usize, None::<usize>)]);
    while let Some((node, level, parent)) = queue.pop_front() {
        let id = vertices.len();
        vertices.push(format!("v{id}"));
        levels.push(level);
        if let Some(p) = parent {
            edges.push((p, id, level - 1));
        }
        for c in &node.children {
            queue.push_back((c, level + 1, Some(id)));
        }
    }
    let depth = levels.iter().copied().max().unwrap_or(0);
    let stream: Vec<u64> = primes_avoiding(primes).take(2 * (depth + 1)).collect();
    let p_stream: Vec<u64> = stream.iter().step_by(2).copied().collect();
    let q_stream: Vec<u64> = stream.iter().skip(1).step_by(2).copied().collect();
    let vertex_labels = levels.iter().map(|&l| q_stream[l]).collect();
    let edge_labels = edges.iter().map(|&(_, _, l)| p_stream[l]).collect();
    let edges = edges.into_iter().map(|(a, b, _)| (a, b)).collect();
    Ok(EplagGroup::new(PrimeLabeledGraph::new(vertices, vertex_labels, edges, edge_labels, primes.clone())?))
}

/// For each vertex, the primes `r <= prime_bound` such that `v / r^k` lies
/// in the group for all `k <= exp_bound`. Sorted, so vertex names are
/// forgotten.
pub fn divisibility_fingerprint(g: &EplagGroup, prime_bound: u64, exp_bound: u32) -> Result<Vec<BTreeSet<u64>>> {
    let lattice = g.lattice(exp_bound);
    let candidates = crate::primes::primes_up_to(prime_bound);
    let mut out = Vec::with_capacity(g.graph.num_vertices());
    for v in 0..g.graph.num_vertices() {
        let mut set = BTreeSet::new();
        for &r in &candidates {
            let mut all = true;
            for k in 1..=exp_bound {
                let x = g.vertex(v, r.pow(k));
                if !lattice.membership(&x)?.is_member() {
                    all = false;
                    break;
                }
            }
            if all {
                set.insert(r);
            }
        }
        out.push(set);
    }
    out.sort();
    Ok(out)
}

/// Fingerprint as a multiplicity map, for display.
pub fn fingerprint_counts(fp: &[BTreeSet<u64>]) -> BTreeMap<Vec<u64>, usize> {
    let mut m = BTreeMap::new();
    for s in fp {
        *m.entry(s.iter().copied().collect()).or_insert(0) += 1;
    }
    m
}

/// Every vertex and every edge sum divided by its label is still divisible
/// by `p^k` for each `p` in `P` and `k <= exp_bound`.
pub fn is_p_divisible_sample(g: &EplagGroup, exp_bound: u32) -> Result<bool> {
    let lattice = g.lattice(exp_bound);
    let n = g.graph.num_vertices();
    for &p in &g.graph.primes {
        for k in 1..=exp_bound {
            let pk = BigInt::from(p).pow(k);
            for v in 0..n {
                if !lattice.membership(&g.vertex(v, p.pow(k)))?.is_member() {
                    return Ok(false);
                }
            }
            for (e, &(v, w)) in g.graph.edges.iter().enumerate() {
                let d = &pk * BigInt::from(g.graph.edge_labels[e]);
                let mut x = vec![BigRational::zero(); n];
                x[v] = BigRational::new(BigInt::one(), d.clone());
                x[w] = BigRational::new(BigInt::one(), d);
                if !lattice.membership(&x)?.is_member() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
