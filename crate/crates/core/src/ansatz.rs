//! Micro-graph ansätze for trivializing multivector fields.
//!
//! Generation runs in two stages. First the unlabeled digraphs: `n` vertices
//! of out-degree `d` and `m + t` leaves of out-degree zero, with no repeated
//! arcs and at most the allowed number of loops. Leaves are interchangeable
//! at this stage, so such a digraph is the adjacency among the `n` aerial
//! vertices together with the multiset of source sets of its leaves, taken
//! up to relabeling the aerial vertices. Second, every class is decorated:
//! leaves of the right in-degree become sinks, the remaining ones receive
//! every distinct arrangement of the Casimir label multiset, and the results
//! are deduplicated by canonical form. Graphs equal to minus themselves are
//! kept as markers; [`vanish_filter`] removes everything that evaluates to
//! zero.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::evaluate_micro;
use crate::graph::{Graph, GraphKind, Targets};
use crate::multivector::permutations;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnsatzSpec {
    pub dim: usize,
    pub aerial: usize,
    /// Casimir labels (1-based) of the terminal vertices, as a multiset.
    pub labels: Vec<u8>,
    pub sinks: usize,
    pub sink_in_degree: usize,
    pub min_terminal_in_degree: usize,
    pub max_tadpoles: usize,
}

impl AnsatzSpec {
    /// One-vector ansatz on `n` aerial vertices: one sink hit once, each
    /// Casimir `a_1 … a_{d−2}` on `n` terminals.
    pub fn vector_field(dim: usize, n: usize, max_tadpoles: usize) -> AnsatzSpec {
        let labels = (1..=dim.saturating_sub(2) as u8)
            .flat_map(|l| std::iter::repeat_n(l, n))
            .collect();
        AnsatzSpec {
            dim,
            aerial: n,
            labels,
            sinks: 1,
            sink_in_degree: 1,
            min_terminal_in_degree: 0,
            max_tadpoles,
        }
    }

    pub fn num_terminals(&self) -> usize {
        self.labels.len()
    }

    fn num_leaves(&self) -> usize {
        self.sinks + self.labels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::jet::MAX_DIM).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.labels.len() != self.aerial * (self.dim - 2) {
            return Err(Error::CasimirCount {
                dim: self.dim,
                expected: self.aerial * (self.dim - 2),
                found: self.labels.len(),
            });
        }
        if self
            .labels
            .iter()
            .any(|&l| l == 0 || l as usize > self.dim - 2)
        {
            return Err(Error::Infeasible("Casimir label out of range".into()));
        }
        if self.max_tadpoles > 1 {
            return Err(Error::Infeasible("at most one tadpole is supported".into()));
        }
        if self.aerial > 6 {
            return Err(Error::Infeasible("too many aerial vertices".into()));
        }
        // every out-edge needs a distinct target
        if self.aerial > 0 && self.dim > self.aerial + self.num_leaves() {
            return Err(Error::Infeasible(format!(
                "out-degree {} exceeds the {} available targets",
                self.dim,
                self.aerial + self.num_leaves()
            )));
        }
        Ok(())
    }
}

/// An unlabeled digraph: `adj[i]` is the bit set of aerial targets of `i`
/// (bit `i` itself is a tadpole), `leaves` the sorted source sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnlabeledClass {
    pub adj: Vec<u8>,
    pub leaves: Vec<u8>,
}

impl UnlabeledClass {
    pub fn tadpoles(&self) -> usize {
        (0..self.adj.len())
            .filter(|&i| self.adj[i] >> i & 1 == 1)
            .count()
    }

    fn permuted(&self, perm: &[usize]) -> UnlabeledClass {
        let map = |mask: u8| permute_mask(mask, perm);
        let mut adj = vec![0u8; self.adj.len()];
        for (i, &m) in self.adj.iter().enumerate() {
            adj[perm[i]] = map(m);
        }
        let mut leaves: Vec<u8> = self.leaves.iter().map(|&m| map(m)).collect();
        leaves.sort_unstable();
        UnlabeledClass { adj, leaves }
    }

    fn canonical(&self, perms: &[Vec<usize>]) -> UnlabeledClass {
        perms
            .iter()
            .map(|p| self.permuted(p))
            .min()
            .expect("identity permutation")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenerationStats {
    /// Unlabeled classes, total and by tadpole count.
    pub classes: usize,
    pub classes_by_tadpoles: Vec<usize>,
    /// Decorated graphs before isomorphism rejection: per class, sink
    /// choices up to automorphism times label arrangements.
    pub labeled: usize,
    /// After isomorphism rejection, total and by tadpole count.
    pub deduplicated: usize,
    pub by_tadpoles: Vec<usize>,
    /// How many of the deduplicated graphs equal minus themselves.
    pub zero_by_symmetry: usize,
}

#[derive(Clone, Debug)]
pub struct Ansatz {
    pub spec: AnsatzSpec,
    /// Canonical, sorted, unique.
    pub graphs: Vec<Graph>,
    pub stats: GenerationStats,
}

/// Enumerates the unlabeled classes of `spec`, sorted.
pub fn unlabeled_classes(spec: &AnsatzSpec) -> Result<Vec<UnlabeledClass>> {
    spec.validate()?;
    let n = spec.aerial;
    let d = spec.dim;
    let leaves = spec.num_leaves();
    let perms = aerial_permutations(n);
    let mut found = BTreeSet::new();
    let mut adj = vec![0u8; n];
    // aerial adjacency first, then leaves filling the remaining out-degree
    fn each_adjacency(
        i: usize,
        n: usize,
        d: usize,
        loops_left: usize,
        adj: &mut Vec<u8>,
        f: &mut dyn FnMut(&[u8]),
    ) {
        if i == n {
            f(adj);
            return;
        }
        for mask in 0u8..(1 << n) {
            let tadpole = mask >> i & 1 == 1;
            if (tadpole && loops_left == 0) || mask.count_ones() as usize > d {
                continue;
            }
            adj[i] = mask;
            each_adjacency(i + 1, n, d, loops_left - tadpole as usize, adj, f);
        }
    }
    each_adjacency(0, n, d, spec.max_tadpoles, &mut adj, &mut |adj| {
        let need: Vec<usize> = adj.iter().map(|m| d - m.count_ones() as usize).collect();
        if need.iter().any(|&r| r > leaves) {
            return;
        }
        let mut chosen = Vec::with_capacity(leaves);
        each_leaf_multiset(n, leaves, 0, &mut need.clone(), &mut chosen, &mut |ls| {
            let c = UnlabeledClass {
                adj: adj.to_vec(),
                leaves: ls.to_vec(),
            };
            found.insert(c.canonical(&perms));
        });
    });
    Ok(found.into_iter().collect())
}

/// Multisets of `count` source masks (nondecreasing from `start`) whose
/// column sums equal `need`.
fn each_leaf_multiset(
    n: usize,
    count: usize,
    start: u8,
    need: &mut Vec<usize>,
    chosen: &mut Vec<u8>,
    f: &mut dyn FnMut(&[u8]),
) {
    if count == 0 {
        if need.iter().all(|&r| r == 0) {
            f(chosen);
        }
        return;
    }
    // remaining leaves can absorb at most `count` edges per aerial vertex
    if need.iter().any(|&r| r > count) {
        return;
    }
    for mask in start..(1u8 << n) {
        if (0..n).any(|i| mask >> i & 1 == 1 && need[i] == 0) {
            continue;
        }
        for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
            need[i] -= 1;
        }
        chosen.push(mask);
        each_leaf_multiset(n, count - 1, mask, need, chosen, f);
        chosen.pop();
        for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
            need[i] += 1;
        }
    }
}

/// Distinct arrangements of a multiset, in lexicographic order.
pub fn multiset_permutations(items: &[u8]) -> Vec<Vec<u8>> {
    let mut v = items.to_vec();
    v.sort_unstable();
    let mut out = vec![v.clone()];
    // next lexicographic permutation
    loop {
        let Some(i) = (0..v.len().saturating_sub(1))
            .rev()
            .find(|&i| v[i] < v[i + 1])
        else {
            return out;
        };
        let j = (i + 1..v.len())
            .rev()
            .find(|&j| v[j] > v[i])
            .expect("successor");
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(v.clone());
    }
}

/// Builds the micro-graph of a class with the chosen sinks (leaf positions,
/// in order) and labels for the other leaves. Targets are listed in
/// increasing vertex order.
fn decorate(spec: &AnsatzSpec, class: &UnlabeledClass, sinks: &[usize], labels: &[u8]) -> Graph {
    let n = spec.aerial;
    let m = spec.sinks;
    let mut vertex_of_leaf = vec![0usize; class.leaves.len()];
    let mut next_terminal = 0;
    for leaf in 0..class.leaves.len() {
        vertex_of_leaf[leaf] = match sinks.iter().position(|&s| s == leaf) {
            Some(k) => k,
            None => {
                next_terminal += 1;
                m + n + next_terminal - 1
            }
        };
    }
    let aerial: Vec<Targets> = (0..n)
        .map(|i| {
            let mut t: Vec<usize> = (0..n)
                .filter(|&j| class.adj[i] >> j & 1 == 1)
                .map(|j| m + j)
                .collect();
            t.extend(
                (0..class.leaves.len())
                    .filter(|&l| class.leaves[l] >> i & 1 == 1)
                    .map(|l| vertex_of_leaf[l]),
            );
            t.sort_unstable();
            Targets::from_vec(t)
        })
        .collect();
    Graph::from_parts_unchecked(
        GraphKind::Micro {
            dim: spec.dim as u8,
        },
        m,
        aerial,
        labels.to_vec(),
    )
}

/// Ordered choices of `k` distinct leaves satisfying `ok`.
fn sink_choices(leaves: usize, k: usize, ok: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    fn rec(
        leaves: usize,
        k: usize,
        ok: &dyn Fn(usize) -> bool,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for l in 0..leaves {
            if ok(l) && !cur.contains(&l) {
                cur.push(l);
                rec(leaves, k, ok, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(leaves, k, ok, &mut Vec::new(), &mut out);
    out
}

/// Labeled decorations of one class, before isomorphism rejection. Sink
/// choices related by an automorphism of the class are taken once, since
/// they describe the same decorated digraph.
fn decorations(
    spec: &AnsatzSpec,
    class: &UnlabeledClass,
    perms: &[Vec<usize>],
    arrangements: &[Vec<u8>],
) -> Vec<Graph> {
    let indeg = |l: usize| class.leaves[l].count_ones() as usize;
    let automorphisms: Vec<&Vec<usize>> = perms
        .iter()
        .filter(|p| &class.permuted(p) == class)
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for sinks in sink_choices(class.leaves.len(), spec.sinks, &|l| {
        indeg(l) == spec.sink_in_degree
    }) {
        let rest_ok = (0..class.leaves.len())
            .filter(|l| !sinks.contains(l))
            .all(|l| indeg(l) >= spec.min_terminal_in_degree);
        if !rest_ok {
            continue;
        }
        let orbit_key = automorphisms
            .iter()
            .map(|p| {
                sinks
                    .iter()
                    .map(|&l| permute_mask(class.leaves[l], p))
                    .collect::<Vec<u8>>()
            })
            .min()
            .expect("identity automorphism");
        if !seen.insert(orbit_key) {
            continue;
        }
        for labels in arrangements {
            out.push(decorate(spec, class, &sinks, labels));
        }
    }
    out
}

fn permute_mask(mask: u8, perm: &[usize]) -> u8 {
    (0..perm.len())
        .filter(|&i| mask >> i & 1 == 1)
        .fold(0u8, |acc, i| acc | 1 << perm[i])
}

fn aerial_permutations(n: usize) -> Vec<Vec<usize>> {
    permutations(&(0..n).collect::<Vec<_>>())
}

pub fn generate(spec: &AnsatzSpec) -> Result<Ansatz> {
    let classes = unlabeled_classes(spec)?;
    let arrangements = multiset_permutations(&spec.labels);
    let perms = aerial_permutations(spec.aerial);
    let per_class: Vec<(usize, Vec<(Graph, bool)>)> = classes
        .par_iter()
        .map(|c| {
            let gs = decorations(spec, c, &perms, &arrangements);
            let count = gs.len();
            let canon = gs
                .into_iter()
                .map(|g| {
                    let c = g.canonical_form();
                    (c.graph, c.zero)
                })
                .collect();
            (count, canon)
        })
        .collect();
    let mut stats = GenerationStats {
        classes: classes.len(),
        classes_by_tadpoles: vec![0; spec.max_tadpoles + 1],
        by_tadpoles: vec![0; spec.max_tadpoles + 1],
        ..Default::default()
    };
    for c in &classes {
        stats.classes_by_tadpoles[c.tadpoles()] += 1;
    }
    let mut unique: BTreeMap<Graph, bool> = BTreeMap::new();
    for (count, gs) in per_class {
        stats.labeled += count;
        for (g, zero) in gs {
            unique.insert(g, zero);
        }
    }
    stats.deduplicated = unique.len();
    for (g, zero) in &unique {
        stats.by_tadpoles[g.tadpole_count()] += 1;
        stats.zero_by_symmetry += *zero as usize;
    }
    Ok(Ansatz {
        spec: spec.clone(),
        graphs: unique.into_keys().collect(),
        stats,
    })
}

/// Exhaustive reference generator: every assignment of distinct targets to
/// the aerial vertices with sinks first and terminals labeled in sorted
/// order, then canonical deduplication. Exponential; meant for tiny specs.
pub fn generate_brute_force(spec: &AnsatzSpec) -> Result<Vec<Graph>> {
    spec.validate()?;
    let n = spec.aerial;
    let m = spec.sinks;
    let mut labels = spec.labels.clone();
    labels.sort_unstable();
    let nv = m + n + labels.len();
    let d = spec.dim;
    let mut out = BTreeSet::new();
    let mut aerial: Vec<Targets> = vec![Targets::new(); n];
    fn rec(
        a: usize,
        nv: usize,
        d: usize,
        aerial: &mut Vec<Targets>,
        f: &mut dyn FnMut(&[Targets]),
    ) {
        if a == aerial.len() {
            f(aerial);
            return;
        }
        // increasing target sets suffice: reordering only changes the sign
        let mut cur = Vec::with_capacity(d);
        fn sets(
            start: usize,
            nv: usize,
            d: usize,
            cur: &mut Vec<usize>,
            g: &mut dyn FnMut(&[usize]),
        ) {
            if cur.len() == d {
                g(cur);
                return;
            }
            for v in start..nv {
                cur.push(v);
                sets(v + 1, nv, d, cur, g);
                cur.pop();
            }
        }
        sets(0, nv, d, &mut cur, &mut |s| {
            aerial[a] = Targets::from_slice(s);
            rec(a + 1, nv, d, aerial, f);
        });
    }
    rec(0, nv, d, &mut aerial, &mut |a| {
        let g = Graph::from_parts_unchecked(
            GraphKind::Micro { dim: d as u8 },
            m,
            a.to_vec(),
            labels.clone(),
        );
        if g.tadpole_count() > spec.max_tadpoles {
            return;
        }
        let indeg = g.in_degrees();
        if (0..m).any(|s| indeg[s] != spec.sink_in_degree) {
            return;
        }
        if (m + n..nv).any(|t| indeg[t] < spec.min_terminal_in_degree) {
            return;
        }
        out.insert(g.canonical_form().graph);
    });
    Ok(out.into_iter().collect())
}

/// Drops graphs whose evaluation vanishes identically in dimension `dim`.
pub fn vanish_filter(graphs: &[Graph], dim: usize) -> Result<Vec<Graph>> {
    let keep: Vec<bool> = graphs
        .par_iter()
        .map(|g| {
            if g.dim() != Some(dim) {
                return Err(Error::DimensionMismatch(dim, g.dim().unwrap_or(0)));
            }
            if g.is_zero() {
                return Ok(false);
            }
            Ok(!evaluate_micro(g)?.is_zero())
        })
        .collect::<Result<_>>()?;
    Ok(graphs
        .iter()
        .zip(keep)
        .filter(|&(_g, k)| k)
        .map(|(g, _k)| g.clone())
        .collect())
}
