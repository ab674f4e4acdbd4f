//! Multivector fields with differential-polynomial coefficients and the
//! Schouten bracket.
//!
//! A degree-`k` multivector is stored as `Σ_{i_1<…<i_k} A^{i_1…i_k} ξ_{i_1}…ξ_{i_k}`
//! with odd generators `ξ_i = ∂_{x^i}`. The bracket is
//!
//! ```text
//! [[A, B]] = Σ_i (A ←∂/∂ξ_i)(∂_i B) − (∂_i A)(→∂/∂ξ_i B)
//! ```
//!
//! so that `[[P, f]]^i = Σ_j P^{ij} ∂_j f` for a bi-vector `P`, and
//! `[[P, X]] = −L_X P` for a vector field `X`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::jet::{Coeff, DiffPoly, Symbol, MAX_DIM};

type Mask = u16;

fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << (i - 1)))
}

fn indices_of(mask: Mask) -> Vec<usize> {
    (1..=MAX_DIM)
        .filter(|&i| mask & (1 << (i - 1)) != 0)
        .collect()
}

/// Sign of `ξ_I ξ_J` brought to increasing order, or `None` if `I ∩ J ≠ ∅`.
fn wedge_sign(a: Mask, b: Mask) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    for j in indices_of(b) {
        swaps += (a >> j).count_ones();
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

/// Right derivative `ξ_I ←∂/∂ξ_i`.
fn right_derivative(mask: Mask, i: usize) -> Option<(Mask, i32)> {
    let bit = 1 << (i - 1);
    if mask & bit == 0 {
        return None;
    }
    let after = (mask >> i).count_ones();
    Some((mask & !bit, if after.is_multiple_of(2) { 1 } else { -1 }))
}

/// Left derivative `→∂/∂ξ_i ξ_I`.
fn left_derivative(mask: Mask, i: usize) -> Option<(Mask, i32)> {
    let bit: Mask = 1 << (i - 1);
    if mask & bit == 0 {
        return None;
    }
    let before = (mask & (bit - 1)).count_ones();
    Some((mask & !bit, if before.is_multiple_of(2) { 1 } else { -1 }))
}

/// Sign of the permutation sorting `indices` (1..=d each), `0` on repeats.
pub fn levi_civita(indices: &[usize], dim: usize) -> Result<i32> {
    for &i in indices {
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
    }
    Ok(permutation_sign(indices))
}

pub(crate) fn permutation_sign<T: Ord>(items: &[T]) -> i32 {
    let mut sign = 1;
    for a in 0..items.len() {
        for b in a + 1..items.len() {
            match items[a].cmp(&items[b]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Mask, DiffPoly>,
}

impl MultiVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        MultiVector {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn function(p: DiffPoly) -> Self {
        let mut v = MultiVector::zero(p.dim(), 0);
        v.add_at_mask(0, &p, 1);
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at an arbitrary index tuple, signed by its sorting permutation.
    pub fn get(&self, indices: &[usize]) -> Result<DiffPoly> {
        if indices.len() != self.degree {
            return Err(Error::Content(format!(
                "expected {} indices, got {}",
                self.degree,
                indices.len()
            )));
        }
        let sign = levi_civita(indices, self.dim)?;
        if sign == 0 {
            return Ok(DiffPoly::zero(self.dim));
        }
        let p = self
            .coeffs
            .get(&mask_of(indices))
            .cloned()
            .unwrap_or_else(|| DiffPoly::zero(self.dim));
        Ok(if sign > 0 { p } else { p.neg() })
    }

    /// Sets the coefficient at `indices` (any order; antisymmetry applied).
    pub fn set(&mut self, indices: &[usize], p: DiffPoly) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, p.dim()));
        }
        if indices.len() != self.degree {
            return Err(Error::Content("wrong number of indices".into()));
        }
        let sign = levi_civita(indices, self.dim)?;
        if sign == 0 {
            return if p.is_zero() {
                Ok(())
            } else {
                Err(Error::Content(
                    "repeated index with nonzero coefficient".into(),
                ))
            };
        }
        let mask = mask_of(indices);
        self.coeffs.remove(&mask);
        self.add_at_mask(mask, &p, sign);
        Ok(())
    }

    fn add_at_mask(&mut self, mask: Mask, p: &DiffPoly, sign: i32) {
        if p.is_zero() {
            return;
        }
        let entry = self
            .coeffs
            .entry(mask)
            .or_insert_with(|| DiffPoly::zero(self.dim));
        if sign > 0 {
            entry.add_assign_poly(p);
        } else {
            entry.add_assign_poly(&p.neg());
        }
        if entry.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    /// Nonzero components as (increasing index tuple, coefficient).
    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &DiffPoly)> {
        self.coeffs.iter().map(|(m, p)| (indices_of(*m), p))
    }

    pub fn add(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, p) in &other.coeffs {
            out.add_at_mask(*m, p, 1);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiVector) -> Result<MultiVector> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, p) in &other.coeffs {
            out.add_at_mask(*m, p, -1);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> MultiVector {
        let mut out = MultiVector::zero(self.dim, self.degree);
        for (m, p) in &self.coeffs {
            out.add_at_mask(*m, &p.scale(c), 1);
        }
        out
    }

    pub fn neg(&self) -> MultiVector {
        self.scale(&-Coeff::one())
    }

    fn check(&self, other: &MultiVector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.degree != other.degree {
            return Err(Error::Content(format!(
                "degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// Applies `f` to every coefficient, landing in dimension `dim`.
    pub fn map_coeffs(
        &self,
        dim: usize,
        mut f: impl FnMut(&DiffPoly) -> Result<DiffPoly>,
    ) -> Result<MultiVector> {
        let mut out = MultiVector::zero(dim, self.degree);
        for (m, p) in &self.coeffs {
            let q = f(p)?;
            if q.dim() != dim {
                return Err(Error::DimensionMismatch(dim, q.dim()));
            }
            out.add_at_mask(*m, &q, 1);
        }
        Ok(out)
    }

    fn partial(&self, i: usize) -> Result<MultiVector> {
        self.map_coeffs(self.dim, |p| p.partial(i))
    }

    fn right_deriv(&self, i: usize) -> MultiVector {
        let mut out = MultiVector::zero(self.dim, self.degree.saturating_sub(1));
        for (m, p) in &self.coeffs {
            if let Some((r, s)) = right_derivative(*m, i) {
                out.add_at_mask(r, p, s);
            }
        }
        out
    }

    fn left_deriv(&self, i: usize) -> MultiVector {
        let mut out = MultiVector::zero(self.dim, self.degree.saturating_sub(1));
        for (m, p) in &self.coeffs {
            if let Some((r, s)) = left_derivative(*m, i) {
                out.add_at_mask(r, p, s);
            }
        }
        out
    }

    /// Exterior product `A ∧ B`.
    pub fn wedge(&self, other: &MultiVector) -> Result<MultiVector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = MultiVector::zero(self.dim, self.degree + other.degree);
        for (ma, pa) in &self.coeffs {
            for (mb, pb) in &other.coeffs {
                if let Some(s) = wedge_sign(*ma, *mb) {
                    out.add_at_mask(ma | mb, &pa.mul(pb)?, s);
                }
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (idx, p) in self.components() {
            let key: String = idx.iter().map(|i| i.to_string()).collect();
            s.push_str(&format!("{key}: {}\n", p.to_text()));
        }
        s
    }
}

impl fmt::Display for MultiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        f.write_str(&self.to_text())
    }
}

/// Schouten bracket of a degree-`p` and a degree-`q` multivector.
///
/// Returns the zero multivector of degree `p + q − 1` when that exceeds the
/// dimension (and degree 0 when `p = q = 0`, where the bracket vanishes).
pub fn schouten(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let degree = (a.degree + b.degree).saturating_sub(1);
    let mut out = MultiVector::zero(d, degree);
    if a.degree + b.degree == 0 || degree > d {
        return Ok(out);
    }
    for i in 1..=d {
        if a.degree > 0 {
            let t = a.right_deriv(i).wedge(&b.partial(i)?)?;
            out = out.add(&t)?;
        }
        if b.degree > 0 {
            let t = a.partial(i)?.wedge(&b.left_deriv(i))?;
            out = out.sub(&t)?;
        }
    }
    Ok(out)
}

/// `½[[P, P]]` for a bi-vector `P`.
pub fn jacobiator(p: &MultiVector) -> Result<MultiVector> {
    if p.degree != 2 {
        return Err(Error::Content(format!(
            "jacobiator expects a bi-vector, got degree {}",
            p.degree
        )));
    }
    let half = Coeff::new(1.into(), 2.into());
    Ok(schouten(p, p)?.scale(&half))
}

/// Nambu-determinant bi-vector `P^{ij} = ρ·ε^{k_1…k_{d−2} i j} ∂_{k_1}a_1 ⋯ ∂_{k_{d−2}}a_{d−2}`
/// for arbitrary density and Casimir polynomials.
pub fn nambu_bivector_with(density: &DiffPoly, casimirs: &[DiffPoly]) -> Result<MultiVector> {
    let d = density.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if casimirs.len() != d - 2 {
        return Err(Error::CasimirCount {
            dim: d,
            expected: d - 2,
            found: casimirs.len(),
        });
    }
    let mut grads = Vec::with_capacity(casimirs.len());
    for a in casimirs {
        if a.dim() != d {
            return Err(Error::DimensionMismatch(d, a.dim()));
        }
        grads.push((1..=d).map(|k| a.partial(k)).collect::<Result<Vec<_>>>()?);
    }
    let mut p = MultiVector::zero(d, 2);
    for i in 1..=d {
        for j in i + 1..=d {
            let rest: Vec<usize> = (1..=d).filter(|&k| k != i && k != j).collect();
            let mut sum = DiffPoly::zero(d);
            for perm in permutations(&rest) {
                let mut full = perm.clone();
                full.push(i);
                full.push(j);
                let sign = permutation_sign(&full);
                let mut term = DiffPoly::integer(d, sign as i64);
                for (l, &k) in perm.iter().enumerate() {
                    term = term.mul(&grads[l][k - 1])?;
                }
                sum.add_assign_poly(&term);
            }
            p.set(&[i, j], density.mul(&sum)?)?;
        }
    }
    Ok(p)
}

/// Nambu bi-vector with symbolic density `rho` and Casimirs `a1 … a_{d−2}`.
pub fn nambu_bivector(dim: usize) -> Result<MultiVector> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let casimirs: Vec<DiffPoly> = (1..=dim - 2)
        .map(|l| DiffPoly::jet(dim, Symbol::Casimir(l as u8), &[]))
        .collect();
    nambu_bivector_with(&DiffPoly::jet(dim, Symbol::Rho, &[]), &casimirs)
}

/// The generic planar bi-vector `s·∂_x∧∂_y` for a symbol `s`.
pub fn planar_bivector(symbol: Symbol) -> MultiVector {
    let mut p = MultiVector::zero(2, 2);
    p.set(&[1, 2], DiffPoly::jet(2, symbol, &[])).unwrap();
    p
}

pub(crate) fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Top-degree multivector `ρ·∂_1∧…∧∂_d`.
pub fn top_density(density: &DiffPoly) -> MultiVector {
    let d = density.dim();
    let mut v = MultiVector::zero(d, d);
    let all: Vec<usize> = (1..=d).collect();
    v.set(&all, density.clone()).unwrap();
    v
}

impl MultiVector {
    /// True when every coefficient is identically zero.
    pub fn vanishes(&self) -> bool {
        self.coeffs.values().all(DiffPoly::is_zero)
    }

    /// Total number of monomials across components.
    pub fn term_count(&self) -> usize {
        self.coeffs.values().map(DiffPoly::len).sum()
    }
}

impl MultiVector {
    /// The coefficient of a degree-0 multivector.
    pub fn as_function(&self) -> Option<DiffPoly> {
        if self.degree != 0 {
            return None;
        }
        Some(
            self.coeffs
                .get(&0)
                .cloned()
                .unwrap_or_else(|| DiffPoly::zero(self.dim)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> DiffPoly {
        DiffPoly::parse(s, d).unwrap()
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(&[1, 2, 3], 3).unwrap(), 1);
        assert_eq!(levi_civita(&[2, 1, 3], 3).unwrap(), -1);
        assert_eq!(levi_civita(&[1, 1, 3], 3).unwrap(), 0);
        assert_eq!(levi_civita(&[3, 1, 2], 3).unwrap(), 1);
        assert!(levi_civita(&[1, 4, 2], 3).is_err());
    }

    #[test]
    fn nambu_3d_components() {
        let pv = nambu_bivector(3).unwrap();
        assert_eq!(pv.get(&[1, 2]).unwrap(), p("rho*a1_z", 3));
        assert_eq!(pv.get(&[1, 3]).unwrap(), p("-rho*a1_y", 3));
        assert_eq!(pv.get(&[2, 3]).unwrap(), p("rho*a1_x", 3));
        assert_eq!(pv.get(&[2, 1]).unwrap(), p("-rho*a1_z", 3));
    }

    #[test]
    fn nambu_2d_is_density() {
        let pv = nambu_bivector(2).unwrap();
        assert_eq!(pv.get(&[1, 2]).unwrap(), p("rho", 2));
    }

    #[test]
    fn casimir_count_checked() {
        let rho = p("rho", 3);
        assert!(matches!(
            nambu_bivector_with(&rho, &[]),
            Err(Error::CasimirCount { .. })
        ));
    }

    #[test]
    fn bracket_with_function_is_hamiltonian_field() {
        let pv = nambu_bivector(3).unwrap();
        let f = MultiVector::function(p("f", 3));
        let x = schouten(&pv, &f).unwrap();
        assert_eq!(x.degree(), 1);
        // [[P, f]]^1 = P^{12} f_y + P^{13} f_z
        assert_eq!(x.get(&[1]).unwrap(), p("rho*a1_z*f_y - rho*a1_y*f_z", 3));
    }

    #[test]
    fn bracket_with_constant_vanishes() {
        let pv = nambu_bivector(3).unwrap();
        let c = MultiVector::function(p("7", 3));
        assert!(schouten(&pv, &c).unwrap().is_zero());
    }

    #[test]
    fn bracket_with_vector_field_is_minus_lie_derivative() {
        // X = x ∂_x, P = u ∂_x∧∂_y: L_X P = -u∂x∧∂y + x u_x ∂x∧∂y
        let pv = planar_bivector(Symbol::U);
        let mut x = MultiVector::zero(2, 1);
        x.set(&[1], p("x", 2)).unwrap();
        let b = schouten(&pv, &x).unwrap();
        assert_eq!(b.get(&[1, 2]).unwrap(), p("u - x*u_x", 2));
    }

    #[test]
    fn degree_overflow_is_zero() {
        let pv = planar_bivector(Symbol::U);
        let j = jacobiator(&pv).unwrap();
        assert_eq!(j.degree(), 3);
        assert!(j.is_zero());
    }

    #[test]
    fn nambu_jacobiator_vanishes_3d() {
        assert!(jacobiator(&nambu_bivector(3).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn generic_bivector_in_3d_is_not_poisson() {
        let mut pv = MultiVector::zero(3, 2);
        pv.set(&[1, 2], p("x*y", 3)).unwrap();
        pv.set(&[2, 3], p("z", 3)).unwrap();
        pv.set(&[1, 3], p("y", 3)).unwrap();
        assert!(!jacobiator(&pv).unwrap().is_zero());
    }

    #[test]
    fn text_dump() {
        let pv = nambu_bivector(3).unwrap();
        assert_eq!(pv.to_text(), "12: rho*a1_z\n13: -rho*a1_y\n23: rho*a1_x\n");
    }
}
