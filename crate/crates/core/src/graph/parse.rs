//! Text encodings.
//!
//! Kontsevich and Leibniz graphs: `[coef *] (t1,t2;t3,t4;…)` where the k-th
//! group lists the ordered targets of aerial vertex `m + k`. A trailing `;`
//! is tolerated.
//!
//! Micro-graphs: `[coef *] [(s,t), …] (sink k)`. Vertex labels are
//! arbitrary; a vertex with out-going edges is aerial, its edges are taken in
//! listed order, and every other non-sink vertex is a terminal carrying `a1`
//! unless a clause `(a2 i,j)` says otherwise. Several sinks are written
//! `(sinks k1,k2)` and are numbered in the listed order.

use std::collections::BTreeMap;

use num_traits::One;

use super::{Graph, GraphKind, Targets};
use crate::error::{Error, Result};
use crate::jet::Coeff;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| perr(format!("expected a vertex index, found '{}'", s.trim())))
}

fn parse_coeff(s: &str) -> Result<Coeff> {
    let s: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(&s)),
    };
    let c = match body.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n
                .parse()
                .map_err(|_| perr(format!("bad coefficient '{s}'")))?;
            let d: i64 = d
                .parse()
                .map_err(|_| perr(format!("bad coefficient '{s}'")))?;
            if d == 0 {
                return Err(perr("zero denominator"));
            }
            Coeff::new(n.into(), d.into())
        }
        None => {
            let n: i64 = body
                .parse()
                .map_err(|_| perr(format!("bad coefficient '{s}'")))?;
            Coeff::from_integer(n.into())
        }
    };
    Ok(if neg { -c } else { c })
}

/// Splits off an optional `coef *` prefix.
fn split_coeff(text: &str) -> Result<(Coeff, &str)> {
    let text = text.trim();
    match text.split_once('*') {
        Some((c, rest)) => Ok((parse_coeff(c)?, rest.trim())),
        None => Ok((Coeff::one(), text)),
    }
}

pub(super) fn parse_graph(text: &str, kind: GraphKind, num_sinks: usize) -> Result<(Coeff, Graph)> {
    let (coeff, body) = split_coeff(text)?;
    let g = match kind {
        GraphKind::Kontsevich | GraphKind::Leibniz => parse_tuples(body, kind, num_sinks)?,
        GraphKind::Micro { dim } => parse_listing(body, dim as usize)?,
    };
    Ok((coeff, g))
}

fn parse_tuples(body: &str, kind: GraphKind, m: usize) -> Result<Graph> {
    let inner = body
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| perr(format!("expected '(…)', found '{body}'")))?;
    let mut groups: Vec<&str> = inner.split(';').map(str::trim).collect();
    if groups.last() == Some(&"") {
        groups.pop();
    }
    let mut aerial = Vec::with_capacity(groups.len());
    for g in groups {
        if g.is_empty() {
            return Err(perr("empty target group"));
        }
        let t: Targets = g.split(',').map(parse_usize).collect::<Result<_>>()?;
        aerial.push(t);
    }
    let g = Graph::from_parts_unchecked(kind, m, aerial, Vec::new());
    g.validate()?;
    Ok(g)
}

fn parse_listing(body: &str, dim: usize) -> Result<Graph> {
    let body = body.trim().trim_end_matches('.').trim_end();
    let open = body
        .find('[')
        .ok_or_else(|| perr("micro-graph listing must start with '['"))?;
    let close = body
        .find(']')
        .ok_or_else(|| perr("unterminated edge list"))?;
    if open != 0 || close < open {
        return Err(perr("malformed edge list"));
    }
    let edges_text = &body[1..close];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut rest = edges_text.trim();
    while !rest.is_empty() {
        let r = rest
            .strip_prefix('(')
            .ok_or_else(|| perr(format!("expected '(' in edge list near '{rest}'")))?;
        let end = r.find(')').ok_or_else(|| perr("unterminated edge"))?;
        let (s, t) = r[..end]
            .split_once(',')
            .ok_or_else(|| perr("edge needs two endpoints"))?;
        edges.push((parse_usize(s)?, parse_usize(t)?));
        rest = r[end + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }

    let mut sinks: Vec<usize> = Vec::new();
    let mut labels: BTreeMap<usize, u8> = BTreeMap::new();
    let mut tail = body[close + 1..].trim();
    while !tail.is_empty() {
        let r = tail
            .strip_prefix('(')
            .ok_or_else(|| perr(format!("unexpected text '{tail}'")))?;
        let end = r.find(')').ok_or_else(|| perr("unterminated clause"))?;
        let clause = r[..end].trim();
        let (head, args) = clause
            .split_once(char::is_whitespace)
            .ok_or_else(|| perr(format!("bad clause '({clause})'")))?;
        let list: Vec<usize> = args.split(',').map(parse_usize).collect::<Result<_>>()?;
        match head {
            "sink" | "sinks" => sinks.extend(list),
            h if h.starts_with('a') => {
                let l: u8 = h[1..]
                    .parse()
                    .map_err(|_| perr(format!("bad Casimir label '{h}'")))?;
                for v in list {
                    labels.insert(v, l);
                }
            }
            _ => return Err(perr(format!("unknown clause '({clause})'"))),
        }
        tail = r[end + 1..].trim_start();
    }
    if sinks.is_empty() {
        return Err(perr("missing '(sink k)' clause"));
    }

    let mut sources: Vec<usize> = edges.iter().map(|e| e.0).collect();
    sources.sort_unstable();
    sources.dedup();
    let mut vertices: Vec<usize> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
    vertices.extend(&sinks);
    vertices.extend(labels.keys());
    vertices.sort_unstable();
    vertices.dedup();
    if let Some(s) = sinks.iter().find(|s| sources.contains(s)) {
        return Err(perr(format!("sink {s} has out-going edges")));
    }
    let terminals: Vec<usize> = vertices
        .iter()
        .copied()
        .filter(|v| !sinks.contains(v) && !sources.contains(v))
        .collect();

    let mut index = BTreeMap::new();
    for (k, &s) in sinks.iter().enumerate() {
        if index.insert(s, k).is_some() {
            return Err(perr(format!("sink {s} listed twice")));
        }
    }
    let m = sinks.len();
    for (k, &a) in sources.iter().enumerate() {
        index.insert(a, m + k);
    }
    for (k, &t) in terminals.iter().enumerate() {
        index.insert(t, m + sources.len() + k);
    }
    let mut aerial = vec![Targets::new(); sources.len()];
    for &(s, t) in &edges {
        aerial[index[&s] - m].push(index[&t]);
    }
    let term_labels: Vec<u8> = terminals
        .iter()
        .map(|t| labels.get(t).copied().unwrap_or(1))
        .collect();
    let g =
        Graph::from_parts_unchecked(GraphKind::Micro { dim: dim as u8 }, m, aerial, term_labels);
    g.validate()?;
    Ok(g)
}

pub(super) fn emit(g: &Graph) -> String {
    match g.kind {
        GraphKind::Kontsevich | GraphKind::Leibniz => {
            let groups: Vec<String> = g
                .aerial
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            format!("({})", groups.join(";"))
        }
        GraphKind::Micro { .. } => {
            let m = g.num_sinks;
            let edges: Vec<String> = g
                .aerial
                .iter()
                .enumerate()
                .flat_map(|(a, t)| t.iter().map(move |v| format!("({},{})", m + a, v)))
                .collect();
            let mut out = format!("[{}]", edges.join(", "));
            if m == 1 {
                out.push_str(" (sink 0)");
            } else {
                let s: Vec<String> = (0..m).map(|s| s.to_string()).collect();
                out.push_str(&format!(" (sinks {})", s.join(",")));
            }
            // label 1 is the default, but a Casimir nobody points at has to
            // be named or it would disappear from the edge list
            let indeg = g.in_degrees();
            let mut by_label: BTreeMap<u8, Vec<String>> = BTreeMap::new();
            for (t, &l) in g.terminals.iter().enumerate() {
                if l != 1 || indeg[g.terminal_vertex(t)] == 0 {
                    by_label
                        .entry(l)
                        .or_default()
                        .push(g.terminal_vertex(t).to_string());
                }
            }
            for (l, vs) in by_label {
                out.push_str(&format!(" (a{l} {})", vs.join(",")));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kontsevich_tetrahedron() {
        let g = Graph::parse("(0,1;2,4;2,5;2,3)", GraphKind::Kontsevich, 2).unwrap();
        assert_eq!(g.num_aerial(), 4);
        assert_eq!(g.to_text(), "(0,1;2,4;2,5;2,3)");
    }

    #[test]
    fn coefficient_prefix() {
        let (c, g) = Graph::parse_term("-3 * (0,3;1,4;2,5;2,3)", GraphKind::Kontsevich, 2).unwrap();
        assert_eq!(c, Coeff::from_integer((-3).into()));
        assert_eq!(g.num_aerial(), 4);
        let (c, _) = Graph::parse_term("3/2*(0,1)", GraphKind::Kontsevich, 2).unwrap();
        assert_eq!(c, Coeff::new(3.into(), 2.into()));
    }

    #[test]
    fn trailing_semicolon_is_tolerated() {
        let g = Graph::parse("(0,1;)", GraphKind::Kontsevich, 2).unwrap();
        assert_eq!(g.num_aerial(), 1);
        let e = Graph::parse("()", GraphKind::Kontsevich, 2).unwrap();
        assert_eq!(e.num_aerial(), 0);
    }

    #[test]
    fn malformed_input_is_rejected() {
        for bad in ["(0,1", "(0;1)", "(0,9)", "(a,b)", "x * (0,1)"] {
            assert!(
                Graph::parse(bad, GraphKind::Kontsevich, 2).is_err(),
                "{bad} should not parse"
            );
        }
    }

    #[test]
    fn leibniz_graph() {
        let g = Graph::parse("(3,4;2,4;0,1,2)", GraphKind::Leibniz, 2).unwrap();
        assert_eq!(g.trident(), Some(2));
        assert!(Graph::parse("(3,4;2,4;0,1)", GraphKind::Leibniz, 2).is_err());
    }

    #[test]
    fn micro_listing_with_tadpole() {
        let text = "[(0,4),(0,5),(0,6),(5,0),(5,1),(5,6),(6,2),(6,3),(6,6)] (sink 2)";
        let g = Graph::parse(text, GraphKind::Micro { dim: 3 }, 1).unwrap();
        assert_eq!(g.num_sinks(), 1);
        assert_eq!(g.num_aerial(), 3);
        assert_eq!(g.num_terminals(), 3);
        assert_eq!(g.tadpole_count(), 1);
        let again = Graph::parse(&g.to_text(), GraphKind::Micro { dim: 3 }, 1).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn micro_listing_trailing_period_and_coefficient() {
        let text =
            " -8 * [(4,0), (4,1), (4,5), (5,2), (5,3), (5,6), (6,0), (6,1), (6,4)]      (sink 2).";
        let (c, g) = Graph::parse_term(text, GraphKind::Micro { dim: 3 }, 1).unwrap();
        assert_eq!(c, Coeff::from_integer((-8).into()));
        assert_eq!(g.num_aerial(), 3);
    }

    #[test]
    fn micro_listing_with_labels_round_trips() {
        let g = Graph::micro(4, 1, vec![vec![2, 3, 0, 1]], vec![2, 1]).unwrap();
        let text = g.to_text();
        assert!(text.contains("(a2 2)"));
        let back = Graph::parse(&text, GraphKind::Micro { dim: 4 }, 1).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn undifferentiated_casimir_round_trips() {
        let g = Graph::micro(3, 1, vec![vec![0, 0, 0]], vec![1]).unwrap();
        let text = g.to_text();
        assert!(text.ends_with("(a1 2)"), "{text}");
        assert_eq!(
            Graph::parse(&text, GraphKind::Micro { dim: 3 }, 1).unwrap(),
            g
        );
    }

    #[test]
    fn micro_listing_errors() {
        let k = GraphKind::Micro { dim: 3 };
        assert!(Graph::parse("[(0,1),(0,2),(0,3)]", k, 1).is_err());
        assert!(Graph::parse("[(0,1),(0,2)] (sink 1)", k, 1).is_err());
        assert!(Graph::parse("[(0,1),(0,2),(0,3)] (sink 0)", k, 1).is_err());
    }
}
