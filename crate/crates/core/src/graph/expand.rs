//! Graph-level rewriting: Leibniz graphs into Kontsevich graphs, Kontsevich
//! graphs into micro-graphs, and the bracket `[[P, X]]` of a vector-field
//! graph sum with one wedge.

use super::{Graph, GraphKind, GraphSum, Targets};
use crate::error::{Error, Result};
use crate::jet::Coeff;

/// Visits every way of redirecting the listed edge slots to one of `choices`.
fn for_each_redirect(
    aerial: &mut [Targets],
    slots: &[(usize, usize)],
    choices: &[usize],
    f: &mut impl FnMut(&[Targets]),
) {
    match slots.split_first() {
        None => f(aerial),
        Some((&(a, k), rest)) => {
            for &c in choices {
                aerial[a][k] = c;
                for_each_redirect(aerial, rest, choices, f);
            }
        }
    }
}

/// Replaces the trident of each Leibniz graph by the Jacobiator of two
/// wedges.
///
/// The trident `T → (x, y, z)` becomes an outer wedge `O` in place of `T`
/// and an inner wedge `I` appended last. For each cyclic rotation `(p, q, r)`
/// of the targets, `I → (p, q)` and `O → (r, I)`; every edge that hit `T`
/// now lands on `O` or on `I` (Leibniz rule). Each term has coefficient 1,
/// and the three of them evaluate to the trident holding `Jac(P) = ½[[P, P]]`.
pub fn leibniz_expand(sum: &GraphSum) -> Result<GraphSum> {
    Ok(GraphSum::from_terms(leibniz_terms(sum)?))
}

/// The terms of [`leibniz_expand`] one by one, before like terms are
/// collected and zero graphs dropped.
pub fn leibniz_terms(sum: &GraphSum) -> Result<Vec<(Coeff, Graph)>> {
    let mut out = Vec::new();
    for (g, c) in sum.iter() {
        let t = g.trident().ok_or_else(|| {
            Error::InvalidGraph(format!("{} is not a Leibniz graph", g.to_text()))
        })?;
        let m = g.num_sinks();
        let n = g.num_aerial();
        let tv = m + t;
        let iv = m + n;
        let xyz = g.aerial()[t].clone();
        for rot in 0..3 {
            let (p, q, r) = (xyz[rot], xyz[(rot + 1) % 3], xyz[(rot + 2) % 3]);
            let mut aerial: Vec<Targets> = g.aerial().to_vec();
            aerial[t] = Targets::from_slice(&[r, iv]);
            aerial.push(Targets::from_slice(&[p, q]));
            let mut slots = Vec::new();
            for (a, tg) in aerial.iter().enumerate() {
                for (k, &v) in tg.iter().enumerate() {
                    // the O → I edge is structural, not an edge into T
                    if v == tv && !(a == t && k == 1) {
                        slots.push((a, k));
                    }
                }
            }
            for_each_redirect(&mut aerial, &slots, &[tv, iv], &mut |a| {
                let h =
                    Graph::from_parts_unchecked(GraphKind::Kontsevich, m, a.to_vec(), Vec::new());
                out.push((c.clone(), h));
            });
        }
    }
    Ok(out)
}

/// Realizes each Kontsevich graph with Nambu content as micro-graphs.
///
/// A wedge `a → (L, R)` becomes a density vertex with ordered targets
/// `(t_{a,1}, …, t_{a,d−2}, L', R')` where `t_{a,ℓ}` is a fresh terminal
/// holding `a_ℓ`. An edge that hit wedge `b` now hits either `b`'s density
/// vertex or one of `b`'s terminals (Leibniz rule over the factors of
/// `P^{ij}`).
pub fn expand_to_micrographs(sum: &GraphSum, dim: usize) -> Result<GraphSum> {
    Ok(GraphSum::from_terms(micrograph_terms(sum, dim)?))
}

/// The terms of [`expand_to_micrographs`] one by one, before like terms are
/// collected.
pub fn micrograph_terms(sum: &GraphSum, dim: usize) -> Result<Vec<(Coeff, Graph)>> {
    if !(2..=crate::jet::MAX_DIM).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut out = Vec::new();
    for (g, c) in sum.iter() {
        if g.kind() != GraphKind::Kontsevich {
            return Err(Error::InvalidGraph(format!(
                "{} is not a Kontsevich graph",
                g.to_text()
            )));
        }
        let m = g.num_sinks();
        let n = g.num_aerial();
        let k = dim - 2;
        let term = |a: usize, l: usize| m + n + a * k + l;
        let mut terminals = Vec::with_capacity(n * k);
        for _ in 0..n {
            terminals.extend((1..=k).map(|l| l as u8));
        }
        let mut aerial: Vec<Targets> = Vec::with_capacity(n);
        for a in 0..n {
            let mut tg: Targets = (0..k).map(|l| term(a, l)).collect();
            tg.extend(g.aerial()[a].iter().copied());
            aerial.push(tg);
        }
        // slots hitting an aerial vertex, grouped per target
        let slots: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|a| (0..2).map(move |j| (a, k + j)))
            .filter_map(|(a, s)| {
                let v = aerial[a][s];
                (v >= m && v < m + n).then(|| (a, s, v - m))
            })
            .collect();
        let kind = GraphKind::Micro { dim: dim as u8 };
        fn rec(
            aerial: &mut [Targets],
            slots: &[(usize, usize, usize)],
            choices: &dyn Fn(usize) -> Vec<usize>,
            f: &mut dyn FnMut(&[Targets]),
        ) {
            match slots.split_first() {
                None => f(aerial),
                Some((&(a, s, b), rest)) => {
                    for c in choices(b) {
                        aerial[a][s] = c;
                        rec(aerial, rest, choices, f);
                    }
                }
            }
        }
        let choices = |b: usize| {
            let mut v = vec![m + b];
            v.extend((0..k).map(|l| term(b, l)));
            v
        };
        rec(&mut aerial, &slots, &choices, &mut |a| {
            let h = Graph::from_parts_unchecked(kind, m, a.to_vec(), terminals.clone());
            out.push((c.clone(), h));
        });
    }
    Ok(out)
}

/// Counts describing the micro-graph expansion of a Kontsevich graph sum.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ExpansionCensus {
    /// Every Leibniz-rule term.
    pub raw: usize,
    /// Terms without a repeated target.
    pub simple: usize,
    /// Simple terms up to automorphisms of their parent Kontsevich graph.
    pub orbits: usize,
    pub orbits_with_tadpole: usize,
    pub orbits_without_tadpole: usize,
    /// Simple terms up to isomorphism of micro-graphs, across all parents.
    pub distinct: usize,
}

fn has_repeated_target(g: &Graph) -> bool {
    g.aerial().iter().any(|t| {
        let mut v = t.to_vec();
        v.sort_unstable();
        v.windows(2).any(|w| w[0] == w[1])
    })
}

/// Aerial permutations of a Kontsevich graph that preserve every target
/// set (sinks fixed).
fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let m = g.num_sinks();
    let n = g.num_aerial();
    let all: Vec<usize> = (0..n).collect();
    let sets: Vec<Vec<usize>> = g
        .aerial()
        .iter()
        .map(|t| {
            let mut v = t.to_vec();
            v.sort_unstable();
            v
        })
        .collect();
    crate::multivector::permutations(&all)
        .into_iter()
        .filter(|pi| {
            let map = |v: usize| if v < m { v } else { m + pi[v - m] };
            (0..n).all(|a| {
                let mut img: Vec<usize> = sets[a].iter().map(|&v| map(v)).collect();
                img.sort_unstable();
                img == sets[pi[a]]
            })
        })
        .collect()
}

pub fn expansion_census(sum: &GraphSum, dim: usize) -> Result<ExpansionCensus> {
    let mut census = ExpansionCensus::default();
    let mut distinct = std::collections::BTreeSet::new();
    for (g, c) in sum.iter() {
        let terms = micrograph_terms(&GraphSum::from_terms([(c.clone(), g.clone())]), dim)?;
        census.raw += terms.len();
        let m = g.num_sinks();
        let n = g.num_aerial();
        let k = dim - 2;
        let auts = automorphisms(g);
        let mut orbits = std::collections::BTreeSet::new();
        for (_, h) in terms.iter().filter(|(_, h)| !has_repeated_target(h)) {
            census.simple += 1;
            distinct.insert(h.canonical_form().graph);
            // the parent automorphism moves each density vertex together
            // with its own terminals
            let key = auts
                .iter()
                .map(|pi| {
                    let map = |v: usize| {
                        if v < m {
                            v
                        } else if v < m + n {
                            m + pi[v - m]
                        } else {
                            let (a, l) = ((v - m - n) / k, (v - m - n) % k);
                            m + n + pi[a] * k + l
                        }
                    };
                    let mut img = vec![Vec::new(); n];
                    for (a, t) in h.aerial().iter().enumerate() {
                        let mut s: Vec<usize> = t.iter().map(|&v| map(v)).collect();
                        s.sort_unstable();
                        img[pi[a]] = s;
                    }
                    img
                })
                .min()
                .expect("identity automorphism");
            if orbits.insert(key) {
                if h.tadpole_count() > 0 {
                    census.orbits_with_tadpole += 1;
                } else {
                    census.orbits_without_tadpole += 1;
                }
            }
        }
        census.orbits += orbits.len();
    }
    census.distinct = distinct.len();
    Ok(census)
}

/// Graph-level `[[P, X]]` for a Kontsevich vector field `X` (one sink of
/// in-degree one), using `[[P, X]](f, g) = P(Xf, g) + P(f, Xg) − X(P(f, g))`.
///
/// The result has sinks `f = 0`, `g = 1`; `X`'s aerial vertices move up by
/// one and the new wedge `w` comes last. Its terms are `w → (v, g)` with
/// `X`'s sink edge on `f`, `w → (f, v)` with that edge on `g`, for every
/// aerial `v` of `X`, and `−(X`'s sink edge on `w`, `w → (f, g))`.
pub fn schouten_wedge_vector(x: &GraphSum) -> Result<GraphSum> {
    let mut out = GraphSum::new();
    for (g, c) in x.iter() {
        if g.kind() != GraphKind::Kontsevich || g.num_sinks() != 1 {
            return Err(Error::InvalidGraph(format!(
                "{} is not a one-sink Kontsevich graph",
                g.to_text()
            )));
        }
        let sink_slots: Vec<(usize, usize)> = g
            .aerial()
            .iter()
            .enumerate()
            .flat_map(|(a, t)| {
                t.iter()
                    .enumerate()
                    .filter(|(_, &v)| v == 0)
                    .map(move |(k, _)| (a, k))
            })
            .collect();
        if sink_slots.len() != 1 {
            return Err(Error::InvalidGraph(format!(
                "sink of {} must have in-degree 1, found {}",
                g.to_text(),
                sink_slots.len()
            )));
        }
        let (sa, sk) = sink_slots[0];
        let n = g.num_aerial();
        let w = 2 + n;
        let shifted: Vec<Targets> = g
            .aerial()
            .iter()
            .map(|t| t.iter().map(|&v| if v == 0 { 0 } else { v + 1 }).collect())
            .collect();
        let build = |sink_target: usize, wt: [usize; 2]| {
            let mut a = shifted.clone();
            a[sa][sk] = sink_target;
            a.push(Targets::from_slice(&wt));
            Graph::from_parts_unchecked(GraphKind::Kontsevich, 2, a, Vec::new())
        };
        // second derivatives of f and g cancel between the three terms, so
        // only edges of w into X and the edge of X into w survive
        for v in 2..2 + n {
            out.insert(build(0, [v, 1]), c.clone());
            out.insert(build(1, [0, v]), c.clone());
        }
        out.insert(build(w, [0, 1]), -c.clone());
    }
    Ok(out)
}

/// The sink-swapped copy of a two-sink graph sum: `G(f, g) ↦ G(g, f)`.
pub fn swap_sinks(sum: &GraphSum) -> Result<GraphSum> {
    let mut out = GraphSum::new();
    for (g, c) in sum.iter() {
        if g.num_sinks() != 2 {
            return Err(Error::InvalidGraph("sink swap needs two sinks".into()));
        }
        let mut map: Vec<usize> = (0..g.num_vertices()).collect();
        map.swap(0, 1);
        let aerial = g
            .aerial()
            .iter()
            .map(|t| t.iter().map(|&v| map[v]).collect())
            .collect();
        out.insert(
            Graph::from_parts_unchecked(g.kind(), 2, aerial, g.terminal_labels().to_vec()),
            c.clone(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed};

    #[test]
    fn bare_tripod_expands_to_three_terms() {
        let tripod = Graph::parse("(0,1,2)", GraphKind::Leibniz, 3).unwrap();
        let k = leibniz_expand(&GraphSum::single(tripod)).unwrap();
        assert_eq!(k.len(), 3);
        for (g, c) in k.iter() {
            assert_eq!(g.num_aerial(), 2);
            assert_eq!(c.abs(), Coeff::one());
        }
    }

    #[test]
    fn single_wedge_in_3d_has_no_aerial_edges_to_redirect() {
        let w = Graph::parse("(0,1)", GraphKind::Kontsevich, 2).unwrap();
        let micro = expand_to_micrographs(&GraphSum::single(w), 3).unwrap();
        assert_eq!(micro.len(), 1);
        let (g, _) = micro.iter().next().unwrap();
        assert_eq!(g.num_terminals(), 1);
    }

    #[test]
    fn wedge_edges_branch_over_casimirs() {
        // 2 -> (0,3), 3 -> (1,2): two aerial edges, each with d-1 = 2 choices
        let g = Graph::parse("(0,3;1,2)", GraphKind::Kontsevich, 2).unwrap();
        let micro = expand_to_micrographs(&GraphSum::single(g), 3).unwrap();
        assert!(micro.len() <= 4 && !micro.is_empty());
    }

    #[test]
    fn bracket_with_vector_rejects_multiple_sink_edges() {
        let g = Graph::parse("(0,0)", GraphKind::Kontsevich, 1).unwrap();
        let s = GraphSum::from_terms([(Coeff::one(), g.clone())]);
        // (0,0) is zero, so the sum is empty and the bracket too
        assert!(schouten_wedge_vector(&s).unwrap().is_empty());
        let h = Graph::parse("(0,2;0,1)", GraphKind::Kontsevich, 1).unwrap();
        assert!(schouten_wedge_vector(&GraphSum::single(h)).is_err());
    }
}
