//! Canonical labeling by exhaustive search over aerial orderings.
//!
//! Sinks stay fixed. For every ordering of the aerial vertices (within blocks
//! of equal out-degree, blocks sorted by out-degree) terminal vertices are
//! ranked by (label, sorted list of their new source vertices); since a
//! terminal has no out-going edges this ranking is forced up to swapping
//! interchangeable terminals. Each aerial tuple is then sorted, and the
//! lexicographically smallest relabeled graph is the key. The sign is the
//! product of the parities of those per-vertex sorts.

use smallvec::SmallVec;

use super::{Graph, Targets};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub graph: Graph,
    /// `self = sign · graph`.
    pub sign: i32,
    /// The graph admits a sign-reversing automorphism.
    pub zero: bool,
}

/// Sorts in place, returning the parity of the sorting permutation.
fn sort_with_parity(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

fn has_repeated_target(t: &Targets) -> bool {
    (0..t.len()).any(|i| (i + 1..t.len()).any(|j| t[i] == t[j]))
}

/// Visits all block-respecting bijections `old aerial -> new position`.
fn for_each_ordering(blocks: &[Vec<usize>], n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        blocks: &[Vec<usize>],
        b: usize,
        offset: usize,
        pos: &mut Vec<usize>,
        used: &mut Vec<bool>,
        k: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if b == blocks.len() {
            f(pos);
            return;
        }
        let block = &blocks[b];
        if k == block.len() {
            rec(blocks, b + 1, offset + block.len(), pos, used, 0, f);
            return;
        }
        // place block[k] at any free slot of this block
        for slot in 0..block.len() {
            if !used[offset + slot] {
                used[offset + slot] = true;
                pos[block[k]] = offset + slot;
                rec(blocks, b, offset, pos, used, k + 1, f);
                used[offset + slot] = false;
            }
        }
    }
    let mut pos = vec![0; n];
    let mut used = vec![false; n];
    rec(blocks, 0, 0, &mut pos, &mut used, 0, f);
}

pub(super) fn canonicalize(g: &Graph) -> Canonical {
    let m = g.num_sinks;
    let n = g.aerial.len();
    let t = g.terminals.len();

    let mut zero = g.aerial.iter().any(has_repeated_target);

    // interchangeable terminals: same label and same sources; swapping them
    // transposes one edge per source
    let mut sources: Vec<SmallVec<[usize; 4]>> = vec![SmallVec::new(); t];
    for (a, tg) in g.aerial.iter().enumerate() {
        for &v in tg {
            if v >= m + n {
                sources[v - m - n].push(a);
            }
        }
    }
    for s in sources.iter_mut() {
        s.sort_unstable();
    }
    for x in 0..t {
        for y in x + 1..t {
            if g.terminals[x] == g.terminals[y]
                && sources[x] == sources[y]
                && sources[x].len() % 2 == 1
            {
                zero = true;
            }
        }
    }

    let mut degrees: Vec<usize> = g.aerial.iter().map(|tg| tg.len()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let blocks: Vec<Vec<usize>> = degrees
        .iter()
        .map(|&d| (0..n).filter(|&a| g.aerial[a].len() == d).collect())
        .collect();

    let mut best: Option<(Graph, i32)> = None;
    let mut new_of = vec![0usize; m + n + t];
    let mut codes: Vec<(u8, SmallVec<[usize; 4]>)> = vec![(0, SmallVec::new()); t];
    let mut order: Vec<usize> = (0..t).collect();

    for_each_ordering(&blocks, n, &mut |pos: &[usize]| {
        for v in 0..m {
            new_of[v] = v;
        }
        for a in 0..n {
            new_of[m + a] = m + pos[a];
        }
        for (x, code) in codes.iter_mut().enumerate() {
            code.0 = g.terminals[x];
            code.1.clear();
        }
        for (a, tg) in g.aerial.iter().enumerate() {
            for &v in tg {
                if v >= m + n {
                    codes[v - m - n].1.push(pos[a]);
                }
            }
        }
        for code in codes.iter_mut() {
            code.1.sort_unstable();
        }
        order.sort_by(|&x, &y| codes[x].cmp(&codes[y]).then(x.cmp(&y)));
        for (rank, &x) in order.iter().enumerate() {
            new_of[m + n + x] = m + n + rank;
        }

        let mut sign = 1;
        let mut aerial = vec![Targets::new(); n];
        for (a, tg) in g.aerial.iter().enumerate() {
            let mut mapped: Targets = tg.iter().map(|&v| new_of[v]).collect();
            sign *= sort_with_parity(&mut mapped);
            aerial[pos[a]] = mapped;
        }
        let terminals: Vec<u8> = order.iter().map(|&x| g.terminals[x]).collect();
        let cand = Graph::from_parts_unchecked(g.kind, m, aerial, terminals);
        match &best {
            None => best = Some((cand, sign)),
            Some((b, s)) => match cand.cmp(b) {
                std::cmp::Ordering::Less => best = Some((cand, sign)),
                std::cmp::Ordering::Equal => {
                    if sign != *s {
                        zero = true;
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    });

    let (graph, sign) = best.expect("at least one ordering");
    Canonical { graph, sign, zero }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;

    fn k(text: &str, sinks: usize) -> Graph {
        Graph::parse(text, GraphKind::Kontsevich, sinks).unwrap()
    }

    #[test]
    fn swapping_wedge_legs_flips_sign() {
        let g = k("(0,1)", 2);
        let h = k("(1,0)", 2);
        let (cg, ch) = (g.canonical_form(), h.canonical_form());
        assert_eq!(cg.graph, ch.graph);
        assert_eq!(cg.sign, -ch.sign);
        assert!(!cg.zero);
    }

    #[test]
    fn relabeling_aerial_vertices_keeps_key() {
        let g = k("(0,1;1,3;1,2)", 1);
        // swap aerial vertices 2 and 3
        let h = g.relabel(&[0, 1, 3, 2]).unwrap();
        let (cg, ch) = (g.canonical_form(), h.canonical_form());
        assert_eq!(cg.graph, ch.graph);
        assert_eq!(cg.sign, ch.sign);
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let g = k("(0,3;4,5;1,2;2,4)", 2);
        let c = g.canonical_form();
        let again = c.graph.canonical_form();
        assert_eq!(again.graph, c.graph);
        assert_eq!(again.sign, 1);
    }

    #[test]
    fn double_edge_is_zero() {
        assert!(k("(0,0)", 1).is_zero());
    }

    #[test]
    fn even_automorphism_keeps_graph() {
        // 1 -> (0,2), 2 -> (0,1): swapping the aerial vertices fixes every tuple
        assert!(!k("(0,2;0,1)", 1).is_zero());
        // 1 -> (0,2), 2 -> (1,0): the swap reverses both tuples, still even
        assert!(!k("(0,2;1,0)", 1).is_zero());
    }

    #[test]
    fn sorting_parity() {
        let mut v = [3, 1, 2];
        assert_eq!(sort_with_parity(&mut v), 1);
        let mut w = [2, 1];
        assert_eq!(sort_with_parity(&mut w), -1);
    }
}
