//! Kontsevich graphs, Leibniz graphs and micro-graphs.
//!
//! All three share one layout: sinks occupy vertices `0..m`, aerial vertices
//! (each with an ordered tuple of out-going edge targets) follow at
//! `m..m+n`, and terminal Casimir vertices (micro-graphs only) come last.
//! A self-target in an aerial tuple is a tadpole.

mod canonical;
mod expand;
mod parse;
mod sum;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use canonical::Canonical;
pub use expand::{
    expand_to_micrographs, expansion_census, leibniz_expand, leibniz_terms, micrograph_terms,
    schouten_wedge_vector, swap_sinks, ExpansionCensus,
};
pub use sum::GraphSum;

pub type Targets = SmallVec<[usize; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GraphKind {
    Kontsevich,
    Leibniz,
    Micro { dim: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Graph {
    kind: GraphKind,
    num_sinks: usize,
    aerial: Vec<Targets>,
    /// Casimir label (1-based) per terminal vertex.
    terminals: Vec<u8>,
}

/// Role of a vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Sink(usize),
    Aerial(usize),
    Terminal(usize),
}

impl Graph {
    pub fn kontsevich(num_sinks: usize, aerial: Vec<[usize; 2]>) -> Result<Graph> {
        let g = Graph {
            kind: GraphKind::Kontsevich,
            num_sinks,
            aerial: aerial
                .into_iter()
                .map(|t| t.into_iter().collect())
                .collect(),
            terminals: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn leibniz(num_sinks: usize, aerial: Vec<Vec<usize>>) -> Result<Graph> {
        let g = Graph {
            kind: GraphKind::Leibniz,
            num_sinks,
            aerial: aerial.into_iter().map(Targets::from_vec).collect(),
            terminals: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn micro(
        dim: usize,
        num_sinks: usize,
        aerial: Vec<Vec<usize>>,
        terminals: Vec<u8>,
    ) -> Result<Graph> {
        if !(2..=crate::jet::MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let g = Graph {
            kind: GraphKind::Micro { dim: dim as u8 },
            num_sinks,
            aerial: aerial.into_iter().map(Targets::from_vec).collect(),
            terminals,
        };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_parts_unchecked(
        kind: GraphKind,
        num_sinks: usize,
        aerial: Vec<Targets>,
        terminals: Vec<u8>,
    ) -> Graph {
        Graph {
            kind,
            num_sinks,
            aerial,
            terminals,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn num_sinks(&self) -> usize {
        self.num_sinks
    }

    pub fn num_aerial(&self) -> usize {
        self.aerial.len()
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_sinks + self.aerial.len() + self.terminals.len()
    }

    pub fn aerial(&self) -> &[Targets] {
        &self.aerial
    }

    pub fn terminal_labels(&self) -> &[u8] {
        &self.terminals
    }

    /// Dimension of a micro-graph.
    pub fn dim(&self) -> Option<usize> {
        match self.kind {
            GraphKind::Micro { dim } => Some(dim as usize),
            _ => None,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.aerial.iter().map(|t| t.len()).sum()
    }

    pub fn role(&self, v: usize) -> Role {
        let m = self.num_sinks;
        let n = self.aerial.len();
        if v < m {
            Role::Sink(v)
        } else if v < m + n {
            Role::Aerial(v - m)
        } else {
            Role::Terminal(v - m - n)
        }
    }

    pub fn aerial_vertex(&self, a: usize) -> usize {
        self.num_sinks + a
    }

    pub fn terminal_vertex(&self, t: usize) -> usize {
        self.num_sinks + self.aerial.len() + t
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices()];
        for t in &self.aerial {
            for &v in t {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Number of aerial vertices carrying a self-loop.
    pub fn tadpole_count(&self) -> usize {
        self.aerial
            .iter()
            .enumerate()
            .filter(|(a, t)| t.contains(&(self.num_sinks + a)))
            .count()
    }

    /// Index of the out-degree-3 vertex of a Leibniz graph.
    pub fn trident(&self) -> Option<usize> {
        if self.kind != GraphKind::Leibniz {
            return None;
        }
        self.aerial.iter().position(|t| t.len() == 3)
    }

    pub fn validate(&self) -> Result<()> {
        let nv = self.num_vertices();
        for (a, t) in self.aerial.iter().enumerate() {
            for &v in t {
                if v >= nv {
                    return Err(Error::TargetOutOfRange {
                        target: v,
                        vertices: nv,
                    });
                }
            }
            let expected = match self.kind {
                GraphKind::Kontsevich => 2,
                GraphKind::Leibniz => {
                    if t.len() == 3 {
                        3
                    } else {
                        2
                    }
                }
                GraphKind::Micro { dim } => dim as usize,
            };
            if t.len() != expected {
                return Err(Error::OutDegree {
                    vertex: self.aerial_vertex(a),
                    found: t.len(),
                    expected,
                });
            }
        }
        match self.kind {
            GraphKind::Kontsevich => {
                if !self.terminals.is_empty() {
                    return Err(Error::InvalidGraph(
                        "Kontsevich graphs have no terminal vertices".into(),
                    ));
                }
            }
            GraphKind::Leibniz => {
                if !self.terminals.is_empty() {
                    return Err(Error::InvalidGraph(
                        "Leibniz graphs have no terminal vertices".into(),
                    ));
                }
                let tridents = self.aerial.iter().filter(|t| t.len() == 3).count();
                if tridents != 1 {
                    return Err(Error::InvalidGraph(format!(
                        "a Leibniz graph needs exactly one trident, found {tridents}"
                    )));
                }
            }
            GraphKind::Micro { dim } => {
                let d = dim as usize;
                let n = self.aerial.len();
                if self.terminals.len() != n * (d - 2) {
                    return Err(Error::InvalidGraph(format!(
                        "{n} aerial vertices in dimension {d} need {} terminals, found {}",
                        n * (d - 2),
                        self.terminals.len()
                    )));
                }
                if let Some(&l) = self
                    .terminals
                    .iter()
                    .find(|&&l| l == 0 || l as usize > d - 2)
                {
                    return Err(Error::InvalidGraph(format!(
                        "Casimir label a{l} out of range in dimension {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that every terminal vertex is hit by at least one edge.
    pub fn terminals_reached(&self) -> bool {
        let deg = self.in_degrees();
        (0..self.terminals.len()).all(|t| deg[self.terminal_vertex(t)] > 0)
    }

    /// Canonical key and the sign relating `self` to it.
    pub fn canonical_form(&self) -> Canonical {
        canonical::canonicalize(self)
    }

    /// True iff some automorphism acts by an odd permutation on the edges.
    pub fn is_zero(&self) -> bool {
        self.canonical_form().zero
    }

    /// Parses the textual encodings; see the module docs of the parser.
    pub fn parse(text: &str, kind: GraphKind, num_sinks: usize) -> Result<Graph> {
        parse::parse_graph(text, kind, num_sinks).map(|(_, g)| g)
    }

    /// Parses a term with an optional leading `coefficient *`.
    pub fn parse_term(
        text: &str,
        kind: GraphKind,
        num_sinks: usize,
    ) -> Result<(crate::jet::Coeff, Graph)> {
        parse::parse_graph(text, kind, num_sinks)
    }

    /// Kontsevich/Leibniz encoding `(t1,t2;t3,t4;…)` or micro-graph listing.
    pub fn to_text(&self) -> String {
        parse::emit(self)
    }

    /// Same graph with the ordered out-edges of aerial vertex `a` permuted.
    pub fn permute_edges(&self, a: usize, perm: &[usize]) -> Graph {
        let mut g = self.clone();
        let old = &self.aerial[a];
        g.aerial[a] = perm.iter().map(|&p| old[p]).collect();
        g
    }

    /// Same graph under a role-preserving vertex relabeling `new = map[old]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Graph> {
        let nv = self.num_vertices();
        if map.len() != nv {
            return Err(Error::InvalidGraph("relabeling has wrong length".into()));
        }
        let mut seen = vec![false; nv];
        for (v, &w) in map.iter().enumerate() {
            if w >= nv || seen[w] {
                return Err(Error::InvalidGraph("relabeling is not a bijection".into()));
            }
            seen[w] = true;
            let ok = match (self.role(v), self.role(w)) {
                (Role::Sink(a), Role::Sink(b)) => a == b,
                (Role::Aerial(a), Role::Aerial(b)) => self.aerial[a].len() == self.aerial[b].len(),
                (Role::Terminal(a), Role::Terminal(b)) => self.terminals[a] == self.terminals[b],
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidGraph(format!(
                    "relabeling {v} -> {w} does not preserve roles"
                )));
            }
        }
        let m = self.num_sinks;
        let n = self.aerial.len();
        let mut aerial = vec![Targets::new(); n];
        for (a, t) in self.aerial.iter().enumerate() {
            aerial[map[m + a] - m] = t.iter().map(|&v| map[v]).collect();
        }
        let mut terminals = vec![0; self.terminals.len()];
        for (t, &l) in self.terminals.iter().enumerate() {
            terminals[map[m + n + t] - m - n] = l;
        }
        Ok(Graph {
            kind: self.kind,
            num_sinks: m,
            aerial,
            terminals,
        })
    }
}

impl std::fmt::Display for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}
