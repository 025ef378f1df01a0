//! Abstract simplicial complexes stored by their maximal simplices.
//!
//! Closure is computed on demand; joins of circles are dense in low
//! dimensions, so materializing every simplex eagerly would be wasteful.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::polygonal::ComplexError;

/// Three-valued answer for questions that are only sometimes decidable
/// (simple connectivity, chiefly).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trilean {
    Yes,
    No,
    Unknown,
}

/// A finite abstract simplicial complex with labeled vertices.
///
/// Invariants: simplices are stored as sorted duplicate-free index vectors;
/// only maximal simplices are kept; every vertex occurs in some maximal
/// simplex (isolated vertices are singleton maximal simplices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    maximal: BTreeSet<Vec<usize>>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex {
            labels: Vec::new(),
            maximal: BTreeSet::new(),
        }
    }

    /// Builds a complex from labels and a family of simplices (any order,
    /// duplicates allowed). Non-maximal entries are pruned; uncovered
    /// vertices become isolated points.
    pub fn new(labels: Vec<String>, simplices: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        let n = labels.len();
        let mut cleaned: Vec<Vec<usize>> = Vec::new();
        for s in simplices {
            let mut s: Vec<usize> = s;
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&v| v >= n) {
                return Err(ComplexError::BadSimplex(format!(
                    "vertex index {bad} out of range (have {n} vertices)"
                )));
            }
            if !s.is_empty() {
                cleaned.push(s);
            }
        }
        let mut covered = vec![false; n];
        for s in &cleaned {
            for &v in s {
                covered[v] = true;
            }
        }
        for (v, c) in covered.iter().enumerate() {
            if !c {
                cleaned.push(vec![v]);
            }
        }
        // prune simplices contained in another
        let mut maximal = BTreeSet::new();
        for (i, s) in cleaned.iter().enumerate() {
            let subsumed = cleaned.iter().enumerate().any(|(j, t)| {
                j != i && t.len() >= s.len() && is_subset(s, t) && !(t.len() == s.len() && j > i)
            });
            if !subsumed {
                maximal.insert(s.clone());
            }
        }
        Ok(SimplicialComplex { labels, maximal })
    }

    /// A discrete set of labeled points.
    pub fn discrete(labels: Vec<String>) -> Self {
        let n = labels.len();
        SimplicialComplex::new(labels, (0..n).map(|v| vec![v]).collect()).unwrap()
    }

    /// Cycle graph on the given labels, in order.
    pub fn cycle(labels: Vec<String>) -> Self {
        let n = labels.len();
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::new(labels, edges).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn maximal_simplices(&self) -> &BTreeSet<Vec<usize>> {
        &self.maximal
    }

    /// Dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.maximal.iter().map(|s| s.len() - 1).max()
    }

    /// All nonempty simplices (the downward closure of the maximal family).
    pub fn closure(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for m in &self.maximal {
            assert!(m.len() <= 24, "simplex too large to enumerate subsets");
            for mask in 1u32..(1u32 << m.len()) {
                let s: Vec<usize> = (0..m.len())
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| m[i])
                    .collect();
                out.insert(s);
            }
        }
        out
    }

    pub fn simplices_of_dim(&self, d: usize) -> Vec<Vec<usize>> {
        self.closure()
            .into_iter()
            .filter(|s| s.len() == d + 1)
            .collect()
    }

    pub fn simplex_count(&self) -> usize {
        self.closure().len()
    }

    pub fn has_simplex(&self, s: &[usize]) -> bool {
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        self.maximal.iter().any(|m| is_subset(&s, m))
    }

    /// Edges of the 1-skeleton as ordered pairs `(u, v)` with `u < v`.
    pub fn skeleton_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for m in &self.maximal {
            for i in 0..m.len() {
                for j in i + 1..m.len() {
                    out.insert((m[i], m[j]));
                }
            }
        }
        out
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v
            && self
                .maximal
                .iter()
                .any(|m| m.binary_search(&u).is_ok() && m.binary_search(&v).is_ok())
    }

    pub fn is_connected(&self) -> bool {
        let n = self.labels.len();
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (u, v) in self.skeleton_edges() {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Relabels vertices (same order, new names).
    pub fn with_labels(&self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.labels.len());
        SimplicialComplex {
            labels,
            maximal: self.maximal.clone(),
        }
    }

    /// Applies a permutation to vertex indices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.labels.len());
        let mut labels = vec![String::new(); self.labels.len()];
        for (v, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[v].clone();
        }
        let maximal = self
            .maximal
            .iter()
            .map(|m| {
                let mut s: Vec<usize> = m.iter().map(|&v| perm[v]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        SimplicialComplex { labels, maximal }
    }

    /// Induced subcomplex on a vertex subset, reindexed densely.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> Self {
        let old_to_new: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labels: Vec<String> = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let simplices: Vec<Vec<usize>> = self
            .maximal
            .iter()
            .map(|m| {
                m.iter()
                    .filter_map(|v| old_to_new.get(v).copied())
                    .collect::<Vec<usize>>()
            })
            .filter(|s| !s.is_empty())
            .collect();
        SimplicialComplex::new(labels, simplices).unwrap()
    }

    /// Join of two complexes: simplices are unions `s ∪ t`. Labels are kept
    /// when already disjoint, otherwise prefixed `L:`/`R:`.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        if self.labels.is_empty() {
            return other.clone();
        }
        if other.labels.is_empty() {
            return self.clone();
        }
        let collide = other.labels.iter().any(|l| self.labels.contains(l));
        let mut labels: Vec<String> = Vec::with_capacity(self.labels.len() + other.labels.len());
        if collide {
            labels.extend(self.labels.iter().map(|l| format!("L:{l}")));
            labels.extend(other.labels.iter().map(|l| format!("R:{l}")));
        } else {
            labels.extend(self.labels.iter().cloned());
            labels.extend(other.labels.iter().cloned());
        }
        let offset = self.labels.len();
        let mut maximal = BTreeSet::new();
        for s in &self.maximal {
            for t in &other.maximal {
                let mut m = s.clone();
                m.extend(t.iter().map(|&v| v + offset));
                maximal.insert(m);
            }
        }
        SimplicialComplex { labels, maximal }
    }

    /// Tries to split the complex as a join `A ∗ B` on a bipartition of the
    /// non-adjacency components. Returns `None` when no such split exists
    /// (or the component count makes the search unreasonable).
    pub fn join_split(&self) -> Option<(SimplicialComplex, SimplicialComplex)> {
        let n = self.labels.len();
        if n < 2 {
            return None;
        }
        // components of the non-adjacency graph
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for u in 0..n {
            for v in u + 1..n {
                if !self.adjacent(u, v) {
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    parent[ru] = rv;
                }
            }
        }
        let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            comps.entry(r).or_default().insert(v);
        }
        let comps: Vec<BTreeSet<usize>> = comps.into_values().collect();
        let r = comps.len();
        if !(2..=14).contains(&r) {
            return None;
        }
        // try every bipartition of components (component 0 stays on the left)
        for mask in 0u32..(1u32 << (r - 1)) {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            left.extend(&comps[0]);
            for (i, comp) in comps.iter().enumerate().skip(1) {
                if mask & (1 << (i - 1)) != 0 {
                    left.extend(comp);
                } else {
                    right.extend(comp);
                }
            }
            if right.is_empty() {
                continue;
            }
            if self.factors_over(&left, &right) {
                return Some((self.induced(&left), self.induced(&right)));
            }
        }
        None
    }

    /// Checks that the maximal simplices are exactly the products of the
    /// maximal simplices of the two induced parts.
    fn factors_over(&self, left: &BTreeSet<usize>, right: &BTreeSet<usize>) -> bool {
        let restrict = |part: &BTreeSet<usize>| -> BTreeSet<Vec<usize>> {
            let pieces: Vec<Vec<usize>> = self
                .maximal
                .iter()
                .map(|m| m.iter().copied().filter(|v| part.contains(v)).collect())
                .collect();
            let mut maxes = BTreeSet::new();
            for (i, s) in pieces.iter().enumerate() {
                if s.is_empty() {
                    continue;
                }
                let subsumed = pieces
                    .iter()
                    .enumerate()
                    .any(|(j, t)| j != i && t.len() > s.len() && is_subset(s, t));
                if !subsumed {
                    maxes.insert(s.clone());
                }
            }
            maxes
        };
        let lmax = restrict(left);
        let rmax = restrict(right);
        if lmax.is_empty() || rmax.is_empty() {
            return false;
        }
        let mut products = BTreeSet::new();
        for a in &lmax {
            for b in &rmax {
                let mut m: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                m.sort_unstable();
                products.insert(m);
            }
        }
        products == self.maximal
    }

    /// Decides simple connectivity where it is decidable:
    /// graphs (tree test), and complexes recognized as joins, where
    /// `A ∗ B` is simply connected iff at least one factor is connected.
    pub fn simply_connected(&self) -> Trilean {
        if !self.is_connected() {
            return Trilean::No;
        }
        if self.dim().is_none_or(|d| d <= 1) {
            let e = self.skeleton_edges().len();
            return if e + 1 == self.vertex_count() {
                Trilean::Yes
            } else {
                Trilean::No
            };
        }
        if let Some((a, b)) = self.join_split() {
            return if a.is_connected() || b.is_connected() {
                Trilean::Yes
            } else {
                Trilean::No
            };
        }
        Trilean::Unknown
    }
}

fn is_subset(s: &[usize], t: &[usize]) -> bool {
    s.iter().all(|v| t.binary_search(v).is_ok())
}
