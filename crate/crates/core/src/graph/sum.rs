use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{parse, Graph, GraphKind};
use crate::error::{Error, Result};
use crate::jet::Coeff;

/// Formal linear combination of graphs, stored on canonical keys.
///
/// Every inserted graph is replaced by `sign · canonical`, and graphs with a
/// sign-reversing automorphism are dropped, so two sums are equal as
/// elements of the graph space iff their term maps are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphSum {
    terms: BTreeMap<Graph, Coeff>,
}

impl GraphSum {
    pub fn new() -> Self {
        GraphSum::default()
    }

    pub fn single(g: Graph) -> Self {
        let mut s = GraphSum::new();
        s.insert(g, Coeff::one());
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Coeff, Graph)>) -> Self {
        let mut s = GraphSum::new();
        for (c, g) in terms {
            s.insert(g, c);
        }
        s
    }

    pub fn insert(&mut self, g: Graph, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let canon = g.canonical_form();
        if canon.zero {
            return;
        }
        let c = if canon.sign < 0 { -c } else { c };
        self.insert_canonical(canon.graph, c);
    }

    pub fn add(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &GraphSum) {
        for (g, c) in &other.terms {
            self.insert_canonical(g.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &GraphSum) -> GraphSum {
        self.add(&other.scale(&-Coeff::one()))
    }

    /// Adds a term whose graph is already a canonical key.
    fn insert_canonical(&mut self, g: Graph, c: Coeff) {
        let entry = self.terms.entry(g.clone()).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn scale(&self, c: &Coeff) -> GraphSum {
        if c.is_zero() {
            return GraphSum::new();
        }
        GraphSum {
            terms: self.terms.iter().map(|(g, v)| (g.clone(), v * c)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Graph, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &Graph) -> Coeff {
        let canon = g.canonical_form();
        if canon.zero {
            return Coeff::zero();
        }
        let c = self
            .terms
            .get(&canon.graph)
            .cloned()
            .unwrap_or_else(Coeff::zero);
        if canon.sign < 0 {
            -c
        } else {
            c
        }
    }

    /// Parses terms separated by newlines or by top-level `+`/`-` signs.
    pub fn parse(text: &str, kind: GraphKind, num_sinks: usize) -> Result<GraphSum> {
        let mut sum = GraphSum::new();
        for piece in split_terms(text) {
            let (c, g) = parse::parse_graph(&piece, kind, num_sinks)?;
            sum.insert(g, c);
        }
        Ok(sum)
    }

    /// One `coef * encoding` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (g, c) in &self.terms {
            out.push_str(&format!("{c} * {}\n", g.to_text()));
        }
        out
    }

    /// Checks that all terms share `kind` and sink count.
    pub fn check_uniform(&self) -> Result<Option<(GraphKind, usize)>> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        for g in it {
            if g.kind() != first.kind() || g.num_sinks() != first.num_sinks() {
                return Err(Error::InvalidGraph(
                    "graph sum mixes kinds or sink counts".into(),
                ));
            }
        }
        Ok(Some((first.kind(), first.num_sinks())))
    }
}

fn split_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut last_closed = false;
    for ch in text.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        let is_sign = ch == '+' || ch == '-' || ch == '\u{2212}';
        if depth == 0 && (ch == '\n' || (is_sign && last_closed)) {
            if !cur.trim().is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            cur.clear();
            if ch != '\n' && ch != '+' {
                cur.push('-');
            }
            last_closed = false;
            continue;
        }
        cur.push(ch);
        if !ch.is_whitespace() {
            last_closed = depth == 0 && (ch == ')' || ch == ']' || ch == '.');
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}
