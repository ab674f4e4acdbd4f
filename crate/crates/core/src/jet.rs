//! Differential polynomials in jet variables.
//!
//! A jet variable is a function symbol (the density `rho`, a Casimir `a_l`,
//! the planar symbol `u`, a sink argument, or a bare coordinate) together with
//! a multi-index of partial derivatives. Monomials are sorted products of jet
//! variables and [`DiffPoly`] maps monomials to exact rational coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Coeff = BigRational;

/// Largest ambient dimension supported by the packed multi-index.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Rho,
    /// Casimir `a_l`, `l >= 1`.
    Casimir(u8),
    U,
    /// Argument placed in sink `s` (`f`, `g`, `h`, then `s3`, `s4`, ...).
    Sink(u8),
    /// The coordinate function `x^i`, `i >= 1`.
    Coord(u8),
}

impl Symbol {
    fn name(self) -> String {
        match self {
            Symbol::Rho => "rho".into(),
            Symbol::Casimir(l) => format!("a{l}"),
            Symbol::U => "u".into(),
            Symbol::Sink(0) => "f".into(),
            Symbol::Sink(1) => "g".into(),
            Symbol::Sink(2) => "h".into(),
            Symbol::Sink(s) => format!("s{s}"),
            Symbol::Coord(_) => unreachable!("coordinates are printed by JetVar"),
        }
    }
}

/// Outcome of differentiating a single jet variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivative {
    Var(JetVar),
    One,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    symbol: Symbol,
    /// `orders[i - 1]` counts the derivatives along `x^i`.
    orders: [u8; MAX_DIM],
}

impl JetVar {
    pub fn new(symbol: Symbol, multi_index: &[usize]) -> Self {
        let mut orders = [0u8; MAX_DIM];
        for &i in multi_index {
            assert!(
                (1..=MAX_DIM).contains(&i),
                "coordinate index {i} out of range"
            );
            orders[i - 1] += 1;
        }
        if let Symbol::Coord(i) = symbol {
            assert!(multi_index.is_empty(), "coordinates carry no multi-index");
            assert!((1..=MAX_DIM).contains(&(i as usize)));
        }
        JetVar { symbol, orders }
    }

    /// Builds a variable from per-coordinate derivative counts.
    pub fn from_orders(symbol: Symbol, orders: [u8; MAX_DIM]) -> Self {
        debug_assert!(!matches!(symbol, Symbol::Coord(_)) || orders == [0; MAX_DIM]);
        JetVar { symbol, orders }
    }

    pub fn orders(&self) -> [u8; MAX_DIM] {
        self.orders
    }

    pub fn plain(symbol: Symbol) -> Self {
        JetVar::new(symbol, &[])
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    /// Sorted multiset of coordinate indices (1-based).
    pub fn multi_index(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &k) in self.orders.iter().enumerate() {
            out.extend(std::iter::repeat_n(i + 1, k as usize));
        }
        out
    }

    pub fn order(&self) -> usize {
        self.orders.iter().map(|&k| k as usize).sum()
    }

    pub fn order_along(&self, i: usize) -> usize {
        self.orders[i - 1] as usize
    }

    pub fn max_coordinate(&self) -> usize {
        match self.symbol {
            Symbol::Coord(i) => i as usize,
            _ => self
                .orders
                .iter()
                .rposition(|&k| k > 0)
                .map_or(0, |p| p + 1),
        }
    }

    pub fn derive(&self, i: usize) -> Derivative {
        match self.symbol {
            Symbol::Coord(j) if j as usize == i => Derivative::One,
            Symbol::Coord(_) => Derivative::Zero,
            _ => {
                let mut v = *self;
                v.orders[i - 1] += 1;
                Derivative::Var(v)
            }
        }
    }

    /// Undo one derivative along `x^i`, if present.
    pub fn integrate(&self, i: usize) -> Option<JetVar> {
        if matches!(self.symbol, Symbol::Coord(_)) || self.orders[i - 1] == 0 {
            return None;
        }
        let mut v = *self;
        v.orders[i - 1] -= 1;
        Some(v)
    }

    pub fn to_text(&self, dim: usize) -> String {
        if let Symbol::Coord(i) = self.symbol {
            return coord_name(i as usize, dim);
        }
        let mut s = self.symbol.name();
        let idx = self.multi_index();
        if !idx.is_empty() {
            s.push('_');
            for i in idx {
                s.push_str(&coord_name(i, dim));
            }
        }
        s
    }
}

fn coord_name(i: usize, dim: usize) -> String {
    if dim <= 3 {
        ["x", "y", "z"][i - 1].to_string()
    } else {
        format!("x{i}")
    }
}

/// Sorted product of jet variables (repetition encodes powers).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[JetVar; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = JetVar>) -> Self {
        let mut v: SmallVec<[JetVar; 8]> = vars.into_iter().collect();
        v.sort_unstable();
        Monomial(v)
    }

    pub fn vars(&self) -> &[JetVar] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn push(&mut self, var: JetVar) {
        let pos = self.0.partition_point(|v| *v <= var);
        self.0.insert(pos, var);
    }

    /// Terms of `∂_i` applied to this monomial, one per factor position.
    pub fn partial_terms(&self, i: usize) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.0.len()).filter_map(move |k| match self.0[k].derive(i) {
            Derivative::Zero => None,
            Derivative::One => {
                let mut v = self.0.clone();
                v.remove(k);
                Some(Monomial(v))
            }
            Derivative::Var(d) => {
                let mut v = self.0.clone();
                v.remove(k);
                let mut m = Monomial(v);
                m.push(d);
                Some(m)
            }
        })
    }

    /// Number of factors carrying `symbol` (any multi-index).
    pub fn count_symbol(&self, pred: impl Fn(Symbol) -> bool) -> usize {
        self.0.iter().filter(|v| pred(v.symbol)).count()
    }

    pub fn total_order(&self) -> usize {
        self.0.iter().map(JetVar::order).sum()
    }

    pub fn to_text(&self, dim: usize) -> String {
        let mut parts = Vec::new();
        let mut k = 0;
        while k < self.0.len() {
            let mut e = 1;
            while k + e < self.0.len() && self.0[k + e] == self.0[k] {
                e += 1;
            }
            let t = self.0[k].to_text(dim);
            parts.push(if e == 1 { t } else { format!("{t}^{e}") });
            k += e;
        }
        parts.join("*")
    }
}

/// Exact-rational polynomial in jet variables over `R^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl DiffPoly {
    pub fn zero(dim: usize) -> Self {
        DiffPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Coeff) -> Self {
        Self::monomial(dim, Monomial::one(), c)
    }

    pub fn integer(dim: usize, c: i64) -> Self {
        Self::constant(dim, Coeff::from_integer(c.into()))
    }

    pub fn monomial(dim: usize, m: Monomial, c: Coeff) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(dim: usize, v: JetVar) -> Self {
        Self::monomial(dim, Monomial::from_vars([v]), Coeff::one())
    }

    /// The jet variable `symbol_{multi_index}` as a polynomial.
    pub fn jet(dim: usize, symbol: Symbol, multi_index: &[usize]) -> Self {
        Self::var(dim, JetVar::new(symbol, multi_index))
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Coeff> {
        self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &DiffPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.add_assign_poly(other);
        Ok(out)
    }

    pub fn sub(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// In-place sum; panics on dimension mismatch.
    pub fn add_assign_poly(&mut self, other: &DiffPoly) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &DiffPoly, c: &Coeff) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero(self.dim);
        }
        DiffPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, d)| (m.clone(), -d)).collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> Result<DiffPoly> {
        self.check_dim(other)?;
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Coeff::zero) += c1 * c2;
            }
        }
        Ok(DiffPoly::from_terms(self.dim, acc))
    }

    /// `∂/∂x^i`, Leibniz rule over each monomial.
    pub fn partial(&self, i: usize) -> Result<DiffPoly> {
        if i == 0 || i > self.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        for (m, c) in &self.terms {
            for t in m.partial_terms(i) {
                *acc.entry(t).or_insert_with(Coeff::zero) += c;
            }
        }
        Ok(DiffPoly::from_terms(self.dim, acc))
    }

    /// Applies `∂_{i_1} ... ∂_{i_k}` for a multi-index.
    pub fn partial_multi(&self, multi_index: &[usize]) -> Result<DiffPoly> {
        let mut p = self.clone();
        for &i in multi_index {
            p = p.partial(i)?;
        }
        Ok(p)
    }

    /// Same polynomial viewed in another ambient dimension.
    pub fn with_dim(&self, dim: usize) -> Result<DiffPoly> {
        if dim < self.max_coordinate() || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(DiffPoly {
            dim,
            terms: self.terms.clone(),
        })
    }

    fn max_coordinate(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.vars().iter().map(JetVar::max_coordinate))
            .max()
            .unwrap_or(0)
    }

    /// Replaces every factor via `f`; `None` kills the monomial.
    pub fn map_vars(
        &self,
        dim: usize,
        mut f: impl FnMut(JetVar) -> Result<Option<Monomial>>,
    ) -> Result<DiffPoly> {
        let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
        'terms: for (m, c) in &self.terms {
            let mut out = Monomial::one();
            for &v in m.vars() {
                match f(v)? {
                    None => continue 'terms,
                    Some(r) => out = out.mul(&r),
                }
            }
            *acc.entry(out).or_insert_with(Coeff::zero) += c;
        }
        Ok(DiffPoly::from_terms(dim, acc))
    }

    /// Dimensional reduction `R^d -> R^{d-1}`: the last Casimir becomes the
    /// dropped coordinate `x^d`, everything else loses its `x^d`-dependence.
    pub fn substitute_reduction(&self) -> Result<DiffPoly> {
        let d = self.dim;
        if d < 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        let last = (d - 2) as u8;
        self.map_vars(d - 1, |v| match v.symbol {
            Symbol::Casimir(l) if l == last => {
                if v.order() == 0 {
                    Err(Error::UnderivedCasimir(l as usize))
                } else if v.order() == 1 && v.order_along(d) == 1 {
                    Ok(Some(Monomial::one()))
                } else {
                    Ok(None)
                }
            }
            Symbol::Coord(i) if i as usize == d => Err(Error::UnsupportedDimension(d)),
            Symbol::Coord(_) => Ok(Some(Monomial::from_vars([v]))),
            _ if v.order_along(d) > 0 => Ok(None),
            _ => Ok(Some(Monomial::from_vars([v]))),
        })
    }

    /// All coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let body = if m.is_one() {
                a.to_string()
            } else if a.is_one() {
                m.to_text(self.dim)
            } else {
                format!("{}*{}", a, m.to_text(self.dim))
            };
            match (k, neg) {
                (0, false) => s.push_str(&body),
                (0, true) => {
                    s.push('-');
                    s.push_str(&body)
                }
                (_, false) => {
                    s.push_str(" + ");
                    s.push_str(&body)
                }
                (_, true) => {
                    s.push_str(" - ");
                    s.push_str(&body)
                }
            }
        }
        s
    }

    /// Parses the textual form, e.g. `8*u_y^2*u_xx - 16*u_x*u_y*u_xy`.
    pub fn parse(text: &str, dim: usize) -> Result<DiffPoly> {
        parse::parse_poly(text, dim)
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Hot-path accumulator for integer coefficients.
#[derive(Debug, Default, Clone)]
pub struct IntAccumulator {
    terms: HashMap<Monomial, i64>,
}

impl IntAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, m: Monomial, c: i64) {
        let e = self.terms.entry(m).or_insert(0);
        *e = e.checked_add(c).expect("integer coefficient overflow");
    }

    pub fn merge(&mut self, other: IntAccumulator) {
        for (m, c) in other.terms {
            self.add(m, c);
        }
    }

    pub fn into_poly(self, dim: usize) -> DiffPoly {
        DiffPoly::from_terms(
            dim,
            self.terms
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(m, c)| (m, Coeff::from_integer(BigInt::from(c)))),
        )
    }
}

mod parse {
    use super::*;

    struct Lexer<'a> {
        s: &'a [u8],
        pos: usize,
    }

    impl<'a> Lexer<'a> {
        fn peek(&self) -> Option<u8> {
            self.s.get(self.pos).copied()
        }
        fn bump(&mut self) -> Option<u8> {
            let c = self.peek();
            self.pos += 1;
            c
        }
        fn err(&self, msg: &str) -> Error {
            Error::Parse(format!("{msg} at byte {}", self.pos))
        }
        fn number(&mut self) -> BigInt {
            let start = self.pos;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .unwrap()
        }
        fn digit(&mut self) -> Option<usize> {
            match self.peek() {
                Some(c @ b'0'..=b'9') => {
                    self.pos += 1;
                    Some((c - b'0') as usize)
                }
                _ => None,
            }
        }
    }

    pub(super) fn parse_poly(text: &str, dim: usize) -> Result<DiffPoly> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let cleaned: String = text
            .replace('\u{2212}', "-")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let mut lx = Lexer {
            s: cleaned.as_bytes(),
            pos: 0,
        };
        let mut poly = DiffPoly::zero(dim);
        if lx.peek().is_none() {
            return Err(lx.err("empty polynomial"));
        }
        let mut first = true;
        while lx.peek().is_some() {
            let mut sign = 1;
            match lx.peek() {
                Some(b'+') => {
                    lx.bump();
                }
                Some(b'-') => {
                    lx.bump();
                    sign = -1;
                }
                _ if first => {}
                _ => return Err(lx.err("expected '+' or '-'")),
            }
            first = false;
            let (m, c) = term(&mut lx, dim)?;
            poly.add_term(m, c * Coeff::from_integer(sign.into()));
        }
        Ok(poly)
    }

    fn term(lx: &mut Lexer, dim: usize) -> Result<(Monomial, Coeff)> {
        let mut coeff = Coeff::one();
        let mut mono = Monomial::one();
        loop {
            match lx.peek() {
                Some(b'0'..=b'9') => {
                    let num = lx.number();
                    let mut c = Coeff::from_integer(num);
                    if lx.peek() == Some(b'/') {
                        lx.bump();
                        if !matches!(lx.peek(), Some(b'0'..=b'9')) {
                            return Err(lx.err("expected denominator"));
                        }
                        let den = lx.number();
                        if den.is_zero() {
                            return Err(lx.err("zero denominator"));
                        }
                        c = Coeff::new(c.to_integer(), den);
                    }
                    coeff *= c;
                }
                Some(_) => {
                    let v = variable(lx, dim)?;
                    let mut e = 1;
                    if lx.peek() == Some(b'^') {
                        lx.bump();
                        if !matches!(lx.peek(), Some(b'0'..=b'9')) {
                            return Err(lx.err("expected exponent"));
                        }
                        e = lx
                            .number()
                            .try_into()
                            .map_err(|_| lx.err("exponent too large"))?;
                    }
                    for _ in 0..e {
                        mono.push(v);
                    }
                }
                None => return Err(lx.err("unexpected end of input")),
            }
            if lx.peek() == Some(b'*') {
                lx.bump();
            } else {
                break;
            }
        }
        Ok((mono, coeff))
    }

    fn coordinate(lx: &mut Lexer, dim: usize) -> Result<usize> {
        let i = if dim <= 3 {
            match lx.bump() {
                Some(b'x') => 1,
                Some(b'y') => 2,
                Some(b'z') => 3,
                _ => return Err(lx.err("expected coordinate letter")),
            }
        } else {
            if lx.bump() != Some(b'x') {
                return Err(lx.err("expected coordinate 'x<i>'"));
            }
            lx.digit()
                .ok_or_else(|| lx.err("expected coordinate digit"))?
        };
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        Ok(i)
    }

    fn variable(lx: &mut Lexer, dim: usize) -> Result<JetVar> {
        let rest = &lx.s[lx.pos..];
        let symbol = if rest.starts_with(b"rho") {
            lx.pos += 3;
            Symbol::Rho
        } else {
            match lx.peek() {
                Some(b'a') => {
                    lx.bump();
                    let l = lx.digit().unwrap_or(1);
                    if l == 0 {
                        return Err(lx.err("Casimir index starts at 1"));
                    }
                    Symbol::Casimir(l as u8)
                }
                Some(b'u') => {
                    lx.bump();
                    Symbol::U
                }
                Some(b'f') => {
                    lx.bump();
                    Symbol::Sink(0)
                }
                Some(b'g') => {
                    lx.bump();
                    Symbol::Sink(1)
                }
                Some(b'h') => {
                    lx.bump();
                    Symbol::Sink(2)
                }
                Some(b's') => {
                    lx.bump();
                    let s = lx.digit().ok_or_else(|| lx.err("expected sink number"))?;
                    Symbol::Sink(s as u8)
                }
                Some(b'x' | b'y' | b'z') => {
                    let i = coordinate(lx, dim)?;
                    return Ok(JetVar::plain(Symbol::Coord(i as u8)));
                }
                _ => return Err(lx.err("unknown symbol")),
            }
        };
        let mut idx = Vec::new();
        if lx.peek() == Some(b'_') {
            lx.bump();
            loop {
                idx.push(coordinate(lx, dim)?);
                match lx.peek() {
                    Some(b'x' | b'y' | b'z') => continue,
                    _ => break,
                }
            }
        }
        Ok(JetVar::new(symbol, &idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> DiffPoly {
        DiffPoly::parse(s, d).unwrap()
    }

    #[test]
    fn add_negation_is_zero() {
        let a = p("rho_x*a1_y - 3/2*rho^2 + 7", 3);
        let z = a.add(&a.scale(&Coeff::from_integer((-1).into()))).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn product_commutes() {
        let x = p("rho_x", 3);
        let y = p("rho_y", 3);
        assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }

    #[test]
    fn difference_of_squares() {
        let a = p("rho + a1_z", 3);
        let b = p("rho - a1_z", 3);
        assert_eq!(a.mul(&b).unwrap(), p("rho^2 - a1_z^2", 3));
    }

    #[test]
    fn partial_rules() {
        assert_eq!(p("rho", 3).partial(1).unwrap(), p("rho_x", 3));
        assert_eq!(
            p("rho*a1_z", 3).partial(3).unwrap(),
            p("rho_z*a1_z + rho*a1_zz", 3)
        );
        assert!(p("5", 3).partial(2).unwrap().is_zero());
        assert!(matches!(
            p("rho", 3).partial(4),
            Err(Error::IndexOutOfRange { index: 4, dim: 3 })
        ));
    }

    #[test]
    fn coordinates_differentiate_to_delta() {
        assert_eq!(p("x*y", 2).partial(1).unwrap(), p("y", 2));
        assert_eq!(p("x^2", 2).partial(1).unwrap(), p("2*x", 2));
    }

    #[test]
    fn text_round_trip() {
        for (s, d) in [
            ("8*u_y^2*u_xx - 16*u_x*u_y*u_xy + 8*u_x^2*u_yy", 2),
            ("a1_x3x3*rho_x1 - 1/3*a2_x4", 4),
            ("-rho*f_x*g_y", 3),
        ] {
            let q = p(s, d);
            assert_eq!(DiffPoly::parse(&q.to_text(), d).unwrap(), q);
        }
        assert_eq!(p("a_x", 3), p("a1_x", 3));
    }

    #[test]
    fn parse_errors() {
        assert!(DiffPoly::parse("rho_w", 3).is_err());
        assert!(DiffPoly::parse("rho_x4", 3).is_err());
        assert!(DiffPoly::parse("rho +", 3).is_err());
        assert!(DiffPoly::parse("q", 3).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(
            p("rho", 2).add(&p("rho", 3)),
            Err(Error::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn reduction_rules() {
        assert_eq!(
            p("rho*a1_z", 3).substitute_reduction().unwrap(),
            p("rho", 2)
        );
        assert!(p("rho_z*a1_x", 3).substitute_reduction().unwrap().is_zero());
        assert!(p("rho*a1_zz", 3).substitute_reduction().unwrap().is_zero());
        assert_eq!(
            p("rho*a1", 3).substitute_reduction(),
            Err(Error::UnderivedCasimir(1))
        );
        assert_eq!(
            p("rho_x1*a1_x2*a2_x4", 4).substitute_reduction().unwrap(),
            p("rho_x*a1_y", 3)
        );
    }
}
