//! Published graph data for the tetrahedral flow and its trivializations.

use crate::error::Result;
use crate::graph::{Graph, GraphKind, GraphSum};
use crate::jet::{Coeff, DiffPoly, JetVar, Monomial, Symbol};
use crate::multivector::{levi_civita, permutations, MultiVector};

/// The tetrahedral flow `Q_γ3` on two sinks.
pub const TETRAHEDRAL_FLOW: &str =
    "1*(0,1;2,4;2,5;2,3) - 3*(0,3;1,4;2,5;2,3) - 3*(0,3;4,5;1,2;2,4)";

/// The sunflower vector field trivializing `Q_γ3` in two dimensions.
pub const SUNFLOWER: &str = "1*(0,1;1,3;1,2) + 2*(0,2;1,3;1,2)";

/// One-tadpole topologies produced by `[[P, sunflower]]`.
pub const TADPOLE_A: &str = "(0,4;1,3;3,5;3,4)";
pub const TADPOLE_B: &str = "(0,3;1,3;3,5;3,4)";
pub const TADPOLE_C: &str = "(2,5;2,4;2,3;0,1)";

/// Leibniz graphs over two sinks with wedges 2, 3 and trident 4. The first
/// three are tadpole-free, the other nine carry one tadpole.
pub const LEIBNIZ_GRAPHS: [&str; 12] = [
    "(3,4;2,4;0,1,2)",
    "(1,3;2,4;0,2,3)",
    "(1,4;2,4;0,2,3)",
    "(2,4;2,4;0,1,2)",
    "(2,4;2,4;0,1,3)",
    "(2,3;2,4;0,1,2)",
    "(2,3;2,4;0,1,3)",
    "(1,2;2,4;0,2,3)",
    "(1,3;2,3;0,2,3)",
    "(1,4;2,3;0,2,3)",
    "(1,3;3,4;0,2,3)",
    "(1,4;3,4;0,2,3)",
];

/// The eleven micro-graphs of the trivializing vector field over `R^3`.
pub const ELEVEN_MICROGRAPHS: &str = "\
 16 * [(0,4), (0,5), (0,6), (5,0), (5,1), (5,6), (6,0), (6,2), (6,3)]      (sink 2)
 24 * [(0,4), (0,5), (0,6), (5,0), (5,1), (5,6), (6,1), (6,2), (6,3)]      (sink 2)
 16 * [(0,4), (0,5), (0,6), (5,0), (5,1), (5,2), (6,1), (6,3), (6,5)]      (sink 2)
-16 * [(0,4), (0,5), (0,6), (5,0), (5,1), (5,2), (6,1), (6,3), (6,5)]      (sink 4)
 12 * [(0,4), (0,5), (0,6), (5,1), (5,2), (5,6), (6,1), (6,2), (6,3)]      (sink 3)
-12 * [(0,4), (0,5), (0,6), (5,1), (5,2), (5,6), (6,1), (6,2), (6,3)]      (sink 4)
 24 * [(4,0), (4,1), (4,6), (5,0), (5,1), (5,2), (6,0), (6,2), (6,3)]      (sink 3)
-24 * [(4,0), (4,1), (4,6), (5,0), (5,2), (5,4), (6,0), (6,1), (6,3)]      (sink 2)
  8 * [(4,0), (4,1), (4,5), (5,0), (5,2), (5,6), (6,0), (6,3), (6,4)]      (sink 1)
 -8 * [(4,0), (4,1), (4,5), (5,2), (5,3), (5,6), (6,0), (6,1), (6,4)]      (sink 2)
  8 * [(0,4), (0,5), (0,6), (5,0), (5,1), (5,6), (6,2), (6,3), (6,6)]      (sink 2).
";

/// The evaluated listing minus the explicit formula is `[[P, H]]` for this
/// `H = −12 Σ ρ_i ρ_j cof(Hess a)_{ij}`.
pub const LISTING_GAUGE: &str = "-12*rho_x^2*a1_yy*a1_zz + 12*rho_x^2*a1_yz^2 \
    + 24*rho_x*rho_y*a1_xy*a1_zz - 24*rho_x*rho_y*a1_xz*a1_yz \
    - 24*rho_x*rho_z*a1_xy*a1_yz + 24*rho_x*rho_z*a1_xz*a1_yy \
    - 12*rho_y^2*a1_xx*a1_zz + 12*rho_y^2*a1_xz^2 \
    + 24*rho_y*rho_z*a1_xx*a1_yz - 24*rho_y*rho_z*a1_xy*a1_xz \
    - 12*rho_z^2*a1_xx*a1_yy + 12*rho_z^2*a1_xy^2";

/// Coefficients of the eleven listed micro-graphs, in order.
pub const ELEVEN_COEFFICIENTS: [i64; 11] = [16, 24, 16, -16, 12, -12, 24, -24, 8, -8, 8];

/// The explicit vector field over `R^3` as
/// `X = Σ ε^{i1 i2 i3} ε^{j1 j2 j3} ε^{k1 k2 k3} X_{ijk}`.
///
/// Each term is (coefficient, factors, direction). A factor is `r` (the
/// density) or `a` (the Casimir) followed by the slot labels of its
/// derivatives; the direction is the slot of the `∂/∂x` it multiplies.
pub const THEOREM_TERMS: [(i64, &str, &str); 11] = [
    (12, "r r.k2 r.i1j1 a.k3 a.i2j2 a.i3j3", "k1"),
    (48, "r r.j3 r.i1j1 a.k3 a.i2j2 a.i3k1", "k2"),
    (8, "r.j2 r.i1k1 r.i2k2 a.i3 a.j3 a.k3", "j1"),
    (-40, "r.i3 r.j2 r.i1k1 a.j3 a.k3 a.i2k2", "j1"),
    (8, "r.i3 r.j2 r.k3 a.j3 a.i1k1 a.i2k2", "j1"),
    (24, "r.j2 r.k3 r.i1k1 a.i3 a.j3 a.j1k2", "i2"),
    (-12, "r r r.k2 a.i1j1 a.i2j2 a.i3j3k3", "k1"),
    (24, "r r.j2 r.k1 a.k2 a.i1j1 a.i3j3k3", "i2"),
    (-36, "r r.i2 r.j2 a.k2 a.i1j1 a.i3j3k3", "k1"),
    (8, "r.i2 r.j1 r.k1 a.j2 a.k2 a.i3j3k3", "i1"),
    (-8, "r.j1 r.k1 r.i3j3k3 a.i2 a.j2 a.k2", "i1"),
];

/// Hamiltonian of the sunflower field for `P = u ∂x∧∂y`.
pub const HAMILTONIAN_GAMMA3: &str = "8*u_y^2*u_xx - 16*u_x*u_y*u_xy + 8*u_x^2*u_yy";

/// Hamiltonian attached to the pentagon-wheel flow for `P = u ∂x∧∂y`, kept
/// for reference only.
pub const HAMILTONIAN_GAMMA5: &str = "6*u_y^2*u_xx*u_xy^2 - 12*u_x*u_y*u_xy^3 \
- 6*u_y^2*u_xx^2*u_yy + 12*u_x*u_y*u_xx*u_xy*u_yy + 6*u_x^2*u_xy^2*u_yy \
- 6*u_x^2*u_xx*u_yy^2 - 2*u_y^3*u_xy*u_xxx + 2*u_x*u_y^2*u_yy*u_xxx \
+ 2*u_y^3*u_xx*u_xxy + 2*u_x*u_y^2*u_xy*u_xxy - 4*u_x^2*u_y*u_yy*u_xxy \
- 4*u_x*u_y^2*u_xx*u_xyy + 2*u_x^2*u_y*u_xy*u_xyy + 2*u_x^3*u_yy*u_xyy \
+ 2*u_x^2*u_y*u_xx*u_yyy - 2*u_x^3*u_xy*u_yyy - 2*u_y^4*u_xxxx \
+ 8*u_x*u_y^3*u_xxxy - 12*u_x^2*u_y^2*u_xxyy + 8*u_x^3*u_y*u_xyyy \
- 2*u_x^4*u_yyyy";

/// Micro-graph counts in the expansion of the sunflower over `R^3`:
/// total, with one tadpole, without.
pub const SUNFLOWER_MICRO_COUNTS: (usize, usize, usize) = (42, 10, 32);

/// Ansatz sizes over `R^3`: labeled markers and survivors of the vanish
/// filter.
pub const ANSATZ_3D: (usize, usize) = (366, 244);

/// Over `R^4`: unlabeled classes (total, tadpole-free, one tadpole),
/// labeled before dedup, after dedup (total, with tadpole, without).
pub const ANSATZ_4D: [usize; 7] = [1079, 352, 727, 38120, 19957, 13653, 6304];

/// Equation counts of the shortcut systems for `ȧ` and `ρ̇`.
pub const SHORTCUT_ROWS: (usize, usize) = (2961, 6679);

pub fn tetrahedral_flow() -> GraphSum {
    GraphSum::parse(TETRAHEDRAL_FLOW, GraphKind::Kontsevich, 2).expect("valid encoding")
}

pub fn sunflower() -> GraphSum {
    GraphSum::parse(SUNFLOWER, GraphKind::Kontsevich, 1).expect("valid encoding")
}

pub fn tadpole_graphs() -> [Graph; 3] {
    [TADPOLE_A, TADPOLE_B, TADPOLE_C]
        .map(|t| Graph::parse(t, GraphKind::Kontsevich, 2).expect("valid encoding"))
}

pub fn leibniz_graphs() -> Vec<Graph> {
    LEIBNIZ_GRAPHS
        .iter()
        .map(|t| Graph::parse(t, GraphKind::Leibniz, 2).expect("valid encoding"))
        .collect()
}

/// The listed micro-graphs with their coefficients, in listing order.
pub fn eleven_terms() -> Vec<(Coeff, Graph)> {
    ELEVEN_MICROGRAPHS
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Graph::parse_term(l, GraphKind::Micro { dim: 3 }, 1).expect("valid listing"))
        .collect()
}

pub fn eleven_micrographs() -> GraphSum {
    GraphSum::from_terms(eleven_terms())
}

/// Slot label such as `k2` to (triple, position): i = 0, j = 1, k = 2.
fn slot(label: &str) -> (usize, usize) {
    let b = label.as_bytes();
    let triple = match b[0] {
        b'i' => 0,
        b'j' => 1,
        b'k' => 2,
        _ => panic!("bad slot label {label}"),
    };
    (triple, (b[1] - b'1') as usize)
}

fn factor_slots(spec: &str) -> Vec<(usize, usize)> {
    spec.as_bytes()
        .chunks(2)
        .map(|c| slot(std::str::from_utf8(c).expect("ascii")))
        .collect()
}

/// Expands the explicit formula into a vector field over `R^3`.
pub fn theorem_vector_field() -> Result<MultiVector> {
    let mut x = MultiVector::zero(3, 1);
    for k in 0..THEOREM_TERMS.len() {
        x = x.add(&theorem_term_field(k)?)?;
    }
    Ok(x)
}

/// The contribution of the `k`-th term of the explicit formula.
pub fn theorem_term_field(k: usize) -> Result<MultiVector> {
    let perms: Vec<(Vec<usize>, i32)> = permutations(&[1, 2, 3])
        .into_iter()
        .map(|p| {
            let s = levi_civita(&p, 3).expect("permutation");
            (p, s)
        })
        .collect();
    let (coef, factors, dir) = THEOREM_TERMS[k];
    let parsed: Vec<(Symbol, Vec<(usize, usize)>)> = factors
        .split_whitespace()
        .map(|f| {
            let (sym, rest) = f.split_at(1);
            let symbol = if sym == "r" {
                Symbol::Rho
            } else {
                Symbol::Casimir(1)
            };
            (symbol, factor_slots(rest.trim_start_matches('.')))
        })
        .collect();
    let d = slot(dir);
    let mut comps = vec![DiffPoly::zero(3); 3];
    for (pi, si) in &perms {
        for (pj, sj) in &perms {
            for (pk, sk) in &perms {
                let triples = [pi, pj, pk];
                let value = |(t, p): (usize, usize)| triples[t][p];
                let vars = parsed.iter().map(|(sym, slots)| {
                    let idx: Vec<usize> = slots.iter().map(|&s| value(s)).collect();
                    JetVar::new(*sym, &idx)
                });
                let c = Coeff::from_integer((coef * (si * sj * sk) as i64).into());
                comps[value(d) - 1].add_term(Monomial::from_vars(vars), c);
            }
        }
    }
    let mut x = MultiVector::zero(3, 1);
    for (i, c) in comps.into_iter().enumerate() {
        if !c.is_zero() {
            x.set(&[i + 1], c)?;
        }
    }
    Ok(x)
}
