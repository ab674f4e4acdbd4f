//! Exact sparse linear systems over the rationals.
//!
//! Rows are scaled to primitive integer vectors and reduced by fraction-free
//! row operations `r ← p·r − c·s` followed by division by the row content,
//! so no rational arithmetic happens inside the elimination loop.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::jet::Coeff;

/// `A·x = b` with named rows and columns.
#[derive(Clone, Debug)]
pub struct LinearSystem<R, C> {
    pub rows: Vec<R>,
    pub columns: Vec<C>,
    /// Sparse rows, sorted by column.
    pub entries: Vec<Vec<(usize, Coeff)>>,
    pub rhs: Vec<Coeff>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    UniqueModKernel,
    Infeasible,
    Underdetermined,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    /// Empty when infeasible.
    pub particular: Vec<Coeff>,
    pub kernel_rank: usize,
    pub kernel: Vec<Vec<Coeff>>,
    pub rank: usize,
    /// Reduced pivot rows `(entries, rhs)`, an equivalent system of `rank`
    /// equations.
    pub echelon: Vec<(Vec<(usize, Coeff)>, Coeff)>,
}

impl Solution {
    pub fn is_feasible(&self) -> bool {
        self.status != Status::Infeasible
    }

    pub fn support(&self) -> Vec<usize> {
        support(&self.particular)
    }
}

fn support(v: &[Coeff]) -> Vec<usize> {
    (0..v.len()).filter(|&i| !v[i].is_zero()).collect()
}

impl<R: Ord + Clone, C: Clone> LinearSystem<R, C> {
    /// Builds the system from column vectors keyed by row and a keyed rhs.
    /// Row keys come out sorted; rows that are identically `0 = 0` are dropped.
    pub fn from_columns(columns: Vec<(C, BTreeMap<R, Coeff>)>, rhs: &BTreeMap<R, Coeff>) -> Self {
        let mut by_row: BTreeMap<R, (Vec<(usize, Coeff)>, Coeff)> = BTreeMap::new();
        let mut keys = Vec::with_capacity(columns.len());
        for (j, (key, col)) in columns.into_iter().enumerate() {
            keys.push(key);
            for (r, c) in col {
                if !c.is_zero() {
                    by_row
                        .entry(r)
                        .or_insert_with(|| (Vec::new(), Coeff::zero()))
                        .0
                        .push((j, c));
                }
            }
        }
        for (r, c) in rhs {
            if !c.is_zero() {
                by_row
                    .entry(r.clone())
                    .or_insert_with(|| (Vec::new(), Coeff::zero()))
                    .1 = c.clone();
            }
        }
        let mut rows = Vec::with_capacity(by_row.len());
        let mut entries = Vec::with_capacity(by_row.len());
        let mut b = Vec::with_capacity(by_row.len());
        for (r, (e, c)) in by_row {
            rows.push(r);
            entries.push(e);
            b.push(c);
        }
        LinearSystem {
            rows,
            columns: keys,
            entries,
            rhs: b,
        }
    }
}

impl<R, C> LinearSystem<R, C> {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Row-by-row check of `A·x = b` in exact arithmetic.
    pub fn is_solution(&self, x: &[Coeff]) -> bool {
        x.len() == self.columns.len()
            && self.entries.iter().zip(&self.rhs).all(|(row, b)| {
                let s: Coeff = row.iter().map(|(j, c)| c * &x[*j]).sum();
                &s == b
            })
    }

    /// Vertically stacks two systems over the same columns.
    pub fn merged(self, other: LinearSystem<R, C>) -> LinearSystem<R, C> {
        let mut out = self;
        out.rows.extend(other.rows);
        out.entries.extend(other.entries);
        out.rhs.extend(other.rhs);
        out
    }

    pub fn solve(&self) -> Solution {
        solve_rows(self.columns.len(), &self.entries, &self.rhs)
    }
}

type IntRow = Vec<(usize, BigInt)>;

/// Scales a rational row (with the rhs at column `ncols`) to a primitive
/// integer row.
fn integer_row(row: &[(usize, Coeff)], rhs: &Coeff, ncols: usize) -> IntRow {
    let mut denom = BigInt::one();
    for (_, c) in row.iter().chain(std::iter::once(&(ncols, rhs.clone()))) {
        denom = denom.lcm(c.denom());
    }
    let mut out: IntRow = row
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (*j, c.numer() * (&denom / c.denom())))
        .collect();
    if !rhs.is_zero() {
        out.push((ncols, rhs.numer() * (&denom / rhs.denom())));
    }
    out.sort_by_key(|(j, _)| *j);
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if g > BigInt::one() {
        for (_, c) in row.iter_mut() {
            *c /= &g;
        }
    }
}

fn entry(row: &IntRow, j: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&j, |(k, _)| *k)
        .ok()
        .map(|i| &row[i].1)
}

/// `p·r − c·s`, made primitive.
fn combine(r: &IntRow, p: &BigInt, s: &IntRow, c: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(r.len() + s.len());
    let (mut i, mut k) = (0, 0);
    while i < r.len() || k < s.len() {
        let take_r = k == s.len() || (i < r.len() && r[i].0 < s[k].0);
        let take_s = i == r.len() || (k < s.len() && s[k].0 < r[i].0);
        if take_r {
            out.push((r[i].0, p * &r[i].1));
            i += 1;
        } else if take_s {
            out.push((s[k].0, -(c * &s[k].1)));
            k += 1;
        } else {
            let v = p * &r[i].1 - c * &s[k].1;
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    make_primitive(&mut out);
    out
}

fn solve_rows(ncols: usize, entries: &[Vec<(usize, Coeff)>], rhs: &[Coeff]) -> Solution {
    let mut rows: Vec<IntRow> = entries
        .iter()
        .zip(rhs)
        .map(|(r, b)| integer_row(r, b, ncols))
        .filter(|r| !r.is_empty())
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut is_pivot_row = vec![false; rows.len()];
    for col in 0..ncols {
        // sparsest remaining row with an entry in this column
        let choice = (0..rows.len())
            .filter(|&i| !is_pivot_row[i] && entry(&rows[i], col).is_some())
            .min_by_key(|&i| rows[i].len());
        let Some(pr) = choice else { continue };
        is_pivot_row[pr] = true;
        pivot_of_col[col] = Some(pr);
        let prow = std::mem::take(&mut rows[pr]);
        let p = entry(&prow, col).expect("pivot").clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pr {
                continue;
            }
            if let Some(c) = entry(row, col) {
                let c = c.clone();
                let g = p.gcd(&c);
                *row = combine(row, &(&p / &g), &prow, &(&c / &g));
            }
        }
        rows[pr] = prow;
    }
    let infeasible = rows.iter().any(|r| r.len() == 1 && r[0].0 == ncols);
    let rank = pivot_of_col.iter().filter(|p| p.is_some()).count();
    let kernel_rank = ncols - rank;
    if infeasible {
        return Solution {
            status: Status::Infeasible,
            particular: Vec::new(),
            kernel_rank,
            kernel: Vec::new(),
            rank,
            echelon: Vec::new(),
        };
    }
    let mut particular = vec![Coeff::zero(); ncols];
    for (col, p) in pivot_of_col.iter().enumerate() {
        if let Some(r) = p {
            let row = &rows[*r];
            let piv = entry(row, col).expect("pivot");
            if let Some(b) = entry(row, ncols) {
                particular[col] = Coeff::new(b.clone(), piv.clone());
            }
        }
    }
    let mut kernel = Vec::with_capacity(kernel_rank);
    for free in (0..ncols).filter(|&c| pivot_of_col[c].is_none()) {
        let mut v = vec![Coeff::zero(); ncols];
        v[free] = Coeff::one();
        for (col, p) in pivot_of_col.iter().enumerate() {
            if let Some(r) = p {
                let row = &rows[*r];
                if let Some(a) = entry(row, free) {
                    let piv = entry(row, col).expect("pivot");
                    v[col] = -Coeff::new(a.clone(), piv.clone());
                }
            }
        }
        kernel.push(v);
    }
    let echelon = pivot_of_col
        .iter()
        .flatten()
        .map(|&r| {
            let row = &rows[r];
            let entries = row
                .iter()
                .filter(|(j, _)| *j < ncols)
                .map(|(j, c)| (*j, Coeff::from_integer(c.clone())))
                .collect();
            let b = entry(row, ncols).map_or_else(Coeff::zero, |b| Coeff::from_integer(b.clone()));
            (entries, b)
        })
        .collect();
    Solution {
        status: if kernel_rank == 0 {
            Status::UniqueModKernel
        } else {
            Status::Underdetermined
        },
        particular,
        kernel_rank,
        kernel,
        rank,
        echelon,
    }
}

/// Greedy support reduction: repeatedly subtracts the multiple of a kernel
/// vector that cancels one nonzero entry of `x`, accepting the move only if
/// the support strictly shrinks. Kernel vectors and positions are scanned in
/// index order, so the result is deterministic.
pub fn sparsify(x: &[Coeff], kernel: &[Vec<Coeff>]) -> Vec<Coeff> {
    let mut best = x.to_vec();
    let mut size = support(&best).len();
    loop {
        let mut improved = false;
        for k in kernel {
            for j in support(&best) {
                if k[j].is_zero() {
                    continue;
                }
                let t = &best[j] / &k[j];
                let cand: Vec<Coeff> = best.iter().zip(k).map(|(a, b)| a - &t * b).collect();
                let s = support(&cand).len();
                if s < size {
                    best = cand;
                    size = s;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Backward elimination on the reduced system: columns are visited in
/// `order` and dropped whenever the remaining ones still admit a solution.
/// Feasibility only gets harder as columns go, so every surviving column is
/// necessary and the returned solution has exactly the surviving support.
pub fn min_support(sol: &Solution, ncols: usize, order: &[usize]) -> Option<Vec<Coeff>> {
    if !sol.is_feasible() {
        return None;
    }
    let mut active = vec![true; ncols];
    let restricted = |active: &[bool]| {
        let entries: Vec<Vec<(usize, Coeff)>> = sol
            .echelon
            .iter()
            .map(|(r, _)| r.iter().filter(|(j, _)| active[*j]).cloned().collect())
            .collect();
        let rhs: Vec<Coeff> = sol.echelon.iter().map(|(_, b)| b.clone()).collect();
        solve_rows(ncols, &entries, &rhs)
    };
    for &c in order {
        active[c] = false;
        if !restricted(&active).is_feasible() {
            active[c] = true;
        }
    }
    Some(restricted(&active).particular)
}

/// Coefficients as a text vector, for reports.
pub fn format_vector(x: &[Coeff]) -> String {
    let parts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}
