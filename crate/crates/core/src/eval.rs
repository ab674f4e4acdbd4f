//! Evaluation of graphs into differential polynomials.
//!
//! Every edge carries a summation index. An aerial vertex contributes a
//! component of its multivector content, indexed by its ordered out-edges and
//! differentiated along the indices of its in-coming edges. Sinks hold the
//! symbolic arguments `f, g, h, …` and terminals hold Casimirs, both
//! differentiated the same way. A tadpole differentiates its own vertex.

use std::collections::HashMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, GraphSum};
use crate::jet::{Coeff, DiffPoly, IntAccumulator, JetVar, Monomial, Symbol, MAX_DIM};
use crate::multivector::{levi_civita, permutations, MultiVector};

type Orders = [u8; MAX_DIM];

/// One admissible index tuple for an aerial vertex.
struct Choice {
    indices: SmallVec<[usize; 4]>,
    sign: i32,
    comp: usize,
}

fn choices_for(content: &MultiVector) -> (Vec<Choice>, Vec<DiffPoly>) {
    let mut out = Vec::new();
    let mut comps = Vec::new();
    for (idx, poly) in content.components() {
        let comp = comps.len();
        comps.push(poly.clone());
        for perm in permutations(&idx) {
            let sign = levi_civita(&perm, content.dim()).expect("distinct indices");
            out.push(Choice {
                indices: perm.into_iter().collect(),
                sign,
                comp,
            });
        }
    }
    (out, comps)
}

fn jet_monomial(symbol: Symbol, orders: Orders) -> JetVar {
    JetVar::from_orders(symbol, orders)
}

/// Evaluates a graph whose aerial vertex `a` carries `contents[a]`.
///
/// The degree of each content must equal the out-degree of its vertex.
pub fn evaluate_with(g: &Graph, contents: &[&MultiVector]) -> Result<DiffPoly> {
    let n = g.num_aerial();
    if contents.len() != n {
        return Err(Error::Content(format!(
            "{} contents for {} aerial vertices",
            contents.len(),
            n
        )));
    }
    let dim = contents
        .first()
        .map(|c| c.dim())
        .or(g.dim())
        .ok_or_else(|| Error::Content("cannot infer the dimension".into()))?;
    for (a, c) in contents.iter().enumerate() {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch(dim, c.dim()));
        }
        if c.degree() != g.aerial()[a].len() {
            return Err(Error::Content(format!(
                "aerial vertex {} has out-degree {} but content of degree {}",
                g.aerial_vertex(a),
                g.aerial()[a].len(),
                c.degree()
            )));
        }
    }
    // distinct contents share choice lists and derivative caches
    let mut ids: Vec<usize> = Vec::with_capacity(n);
    let mut distinct: Vec<&MultiVector> = Vec::new();
    for c in contents {
        let id = match distinct
            .iter()
            .position(|d| std::ptr::eq(*d, *c) || *d == *c)
        {
            Some(id) => id,
            None => {
                distinct.push(c);
                distinct.len() - 1
            }
        };
        ids.push(id);
    }
    let tables: Vec<(Vec<Choice>, Vec<DiffPoly>)> =
        distinct.iter().map(|c| choices_for(c)).collect();

    let m = g.num_sinks();
    let nv = g.num_vertices();
    let mut cache: HashMap<(usize, usize, Orders), DiffPoly> = HashMap::new();
    let mut result = DiffPoly::zero(dim);
    let mut picked: Vec<usize> = vec![0; n];

    fn rec(a: usize, picked: &mut Vec<usize>, ctx: &mut dyn FnMut(&[usize]), sizes: &[usize]) {
        if a == sizes.len() {
            ctx(picked);
            return;
        }
        for k in 0..sizes[a] {
            picked[a] = k;
            rec(a + 1, picked, ctx, sizes);
        }
    }
    let sizes: Vec<usize> = ids.iter().map(|&id| tables[id].0.len()).collect();
    let mut leaf = |picked: &[usize]| {
        let mut orders = vec![[0u8; MAX_DIM]; nv];
        let mut sign = 1i32;
        for a in 0..n {
            let ch = &tables[ids[a]].0[picked[a]];
            sign *= ch.sign;
            for (k, &v) in g.aerial()[a].iter().enumerate() {
                orders[v][ch.indices[k] - 1] += 1;
            }
        }
        let mut mono = Monomial::one();
        for (s, o) in orders.iter().enumerate().take(m) {
            mono.push(jet_monomial(Symbol::Sink(s as u8), *o));
        }
        for (t, &l) in g.terminal_labels().iter().enumerate() {
            mono.push(jet_monomial(Symbol::Casimir(l), orders[m + n + t]));
        }
        let mut prod = DiffPoly::monomial(dim, mono, Coeff::from_integer(sign.into()));
        for a in 0..n {
            let ch = &tables[ids[a]].0[picked[a]];
            let o = orders[m + a];
            let key = (ids[a], ch.comp, o);
            let d = cache.entry(key).or_insert_with(|| {
                let base = &tables[ids[a]].1[ch.comp];
                let idx: Vec<usize> = (1..=dim)
                    .flat_map(|i| std::iter::repeat_n(i, o[i - 1] as usize))
                    .collect();
                base.partial_multi(&idx).expect("index within dimension")
            });
            if d.is_zero() {
                return;
            }
            prod = prod.mul(d).expect("same dimension");
        }
        result.add_assign_poly(&prod);
    };
    rec(0, &mut picked, &mut leaf, &sizes);
    Ok(result)
}

/// Kontsevich graph with every wedge holding `p`.
pub fn evaluate_kontsevich(g: &Graph, p: &MultiVector) -> Result<DiffPoly> {
    if g.kind() != GraphKind::Kontsevich {
        return Err(Error::InvalidGraph(format!(
            "{} is not a Kontsevich graph",
            g
        )));
    }
    if p.degree() != 2 {
        return Err(Error::Content("wedge content must be a bi-vector".into()));
    }
    let contents = vec![p; g.num_aerial()];
    evaluate_with(g, &contents)
}

/// Leibniz graph: wedges hold `p`, the trident holds `tri`.
pub fn evaluate_leibniz(g: &Graph, p: &MultiVector, tri: &MultiVector) -> Result<DiffPoly> {
    let t = g
        .trident()
        .ok_or_else(|| Error::InvalidGraph(format!("{} is not a Leibniz graph", g)))?;
    let mut contents = vec![p; g.num_aerial()];
    contents[t] = tri;
    evaluate_with(g, &contents)
}

/// Micro-graph: aerial vertices hold `ρ·ε`, terminals hold Casimirs.
pub fn evaluate_micro(g: &Graph) -> Result<DiffPoly> {
    let d = g
        .dim()
        .ok_or_else(|| Error::InvalidGraph(format!("{} is not a micro-graph", g)))?;
    let m = g.num_sinks();
    let n = g.num_aerial();
    let nv = g.num_vertices();
    let all: Vec<usize> = (1..=d).collect();
    let perms: Vec<(Vec<usize>, i64)> = permutations(&all)
        .into_iter()
        .map(|p| {
            let s = levi_civita(&p, d).expect("permutation") as i64;
            (p, s)
        })
        .collect();
    let mut acc = IntAccumulator::new();
    let mut picked = vec![0usize; n];
    let total = perms.len().pow(n as u32);
    for _ in 0..total {
        let mut orders = vec![[0u8; MAX_DIM]; nv];
        let mut sign = 1i64;
        for a in 0..n {
            let (p, s) = &perms[picked[a]];
            sign *= s;
            for (k, &v) in g.aerial()[a].iter().enumerate() {
                orders[v][p[k] - 1] += 1;
            }
        }
        let mut vars: SmallVec<[JetVar; 8]> = SmallVec::new();
        for (s, o) in orders.iter().enumerate().take(m) {
            vars.push(jet_monomial(Symbol::Sink(s as u8), *o));
        }
        for a in 0..n {
            vars.push(jet_monomial(Symbol::Rho, orders[m + a]));
        }
        for (t, &l) in g.terminal_labels().iter().enumerate() {
            vars.push(jet_monomial(Symbol::Casimir(l), orders[m + n + t]));
        }
        acc.add(Monomial::from_vars(vars), sign);
        // odometer over the per-vertex permutations
        for slot in picked.iter_mut() {
            *slot += 1;
            if *slot < perms.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(acc.into_poly(d))
}

/// Reads the multivector `Σ c·∂_{i_1}∧…∧∂_{i_m}` off a polynomial that is
/// linear in first derivatives of each of the `m` sink arguments. The
/// component at `i_1 < … < i_m` is the coefficient of `f_{i_1} g_{i_2} ⋯`.
pub fn read_multivector(poly: &DiffPoly, num_sinks: usize) -> Result<MultiVector> {
    let dim = poly.dim();
    let mut buckets: HashMap<Vec<usize>, DiffPoly> = HashMap::new();
    for (mono, c) in poly.terms() {
        let mut idx = vec![0usize; num_sinks];
        let mut rest = Monomial::one();
        let mut seen = vec![false; num_sinks];
        for v in mono.vars() {
            match v.symbol() {
                Symbol::Sink(s) if (s as usize) < num_sinks => {
                    let mi = v.multi_index();
                    if mi.len() != 1 || seen[s as usize] {
                        return Err(Error::Content(format!(
                            "sink {s} is not acted on by a single derivative"
                        )));
                    }
                    seen[s as usize] = true;
                    idx[s as usize] = mi[0];
                }
                _ => rest.push(*v),
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Content(
                "a sink argument is missing from a term".into(),
            ));
        }
        if idx.windows(2).all(|w| w[0] < w[1]) {
            buckets
                .entry(idx)
                .or_insert_with(|| DiffPoly::zero(dim))
                .add_term(rest, c.clone());
        }
    }
    let mut out = MultiVector::zero(dim, num_sinks);
    let mut keys: Vec<_> = buckets.keys().cloned().collect();
    keys.sort();
    for k in keys {
        let p = buckets.remove(&k).expect("present");
        if !p.is_zero() {
            out.set(&k, p)?;
        }
    }
    Ok(out)
}

/// Sum of coefficient-weighted graph values, evaluated in parallel.
pub fn evaluate_sum(
    sum: &GraphSum,
    dim: usize,
    eval: impl Fn(&Graph) -> Result<DiffPoly> + Sync,
) -> Result<DiffPoly> {
    let terms: Vec<(&Graph, &Coeff)> = sum.iter().collect();
    let parts: Vec<DiffPoly> = terms
        .par_iter()
        .map(|(g, c)| eval(g).map(|p| p.scale(c)))
        .collect::<Result<_>>()?;
    let mut out = DiffPoly::zero(dim);
    for p in parts {
        out.add_assign_poly(&p);
    }
    Ok(out)
}

/// Multivector value of a Kontsevich graph sum with content `p`.
pub fn kontsevich_multivector(sum: &GraphSum, p: &MultiVector) -> Result<MultiVector> {
    let m = sink_count(sum)?;
    let poly = evaluate_sum(sum, p.dim(), |g| evaluate_kontsevich(g, p))?;
    read_multivector(&poly, m)
}

/// Multivector value of a micro-graph sum.
pub fn micro_multivector(sum: &GraphSum, dim: usize) -> Result<MultiVector> {
    let m = sink_count(sum)?;
    let poly = evaluate_sum(sum, dim, evaluate_micro)?;
    read_multivector(&poly, m)
}

fn sink_count(sum: &GraphSum) -> Result<usize> {
    Ok(sum.check_uniform()?.map_or(0, |(_, m)| m))
}
