use std::collections::BTreeMap;

use nambu_graphs::ansatz::{generate, vanish_filter, AnsatzSpec};
use nambu_graphs::cohomology::{
    assemble_coboundary, assemble_coboundary_signed, coboundary_residual, format_velocities,
    gamma3_flow, leibniz_impossibility_2d, micro_vector, parse_velocities, reduce_solution,
    shortcut_systems, solution_sum, solve_sparse, sunflower_field, velocities_of,
};
use nambu_graphs::eval::micro_multivector;
use nambu_graphs::graph::Graph;
use nambu_graphs::jet::{Coeff, DiffPoly, Symbol};
use nambu_graphs::linsys::{min_support, LinearSystem, Status};
use nambu_graphs::multivector::{nambu_bivector, planar_bivector, schouten, MultiVector};
use nambu_graphs::{reference, Error};

fn int(k: i64) -> Coeff {
    Coeff::from_integer(k.into())
}

fn column(entries: &[(&'static str, i64)]) -> BTreeMap<&'static str, Coeff> {
    entries.iter().map(|&(r, c)| (r, int(c))).collect()
}

fn small_ansatz() -> Vec<Graph> {
    let a = generate(&AnsatzSpec::vector_field(3, 3, 1)).unwrap();
    let kept = vanish_filter(&a.graphs, 3).unwrap();
    kept.into_iter().step_by(12).collect()
}

#[test]
fn toy_systems() {
    // x = 1 and x = 2
    let sys = LinearSystem::from_columns(
        vec![("x", column(&[("r1", 1), ("r2", 1)]))],
        &column(&[("r1", 1), ("r2", 2)]),
    );
    assert_eq!(sys.solve().status, Status::Infeasible);
    // a row 0 = 1
    let sys = LinearSystem::from_columns(
        vec![("x", column(&[("r1", 1)]))],
        &column(&[("r1", 1), ("r2", 1)]),
    );
    assert_eq!(sys.solve().status, Status::Infeasible);
    // x + y = 2: one free column
    let sys = LinearSystem::from_columns(
        vec![("x", column(&[("r", 1)])), ("y", column(&[("r", 1)]))],
        &column(&[("r", 2)]),
    );
    let sol = sys.solve();
    assert_eq!(sol.status, Status::Underdetermined);
    assert_eq!(sol.kernel_rank, 1);
    assert!(sys.is_solution(&sol.particular));
    // 0 = 0 rows are dropped
    let sys = LinearSystem::from_columns(
        vec![("x", column(&[("r", 2)])), ("y", column(&[]))],
        &column(&[("r", 4)]),
    );
    assert_eq!(sys.num_rows(), 1);
    let sol = sys.solve();
    assert_eq!(sol.particular[0], int(2));
}

#[test]
fn a_single_graph_trivializes_its_own_bracket() {
    let p = nambu_bivector(3).unwrap();
    let cols = small_ansatz();
    for k in [0, 7, cols.len() - 1] {
        let q = schouten(&p, &micro_vector(&cols[k]).unwrap()).unwrap();
        let sys = assemble_coboundary(&q, &p, &cols, 3).unwrap();
        let sol = solve_sparse(&sys);
        assert!(sol.is_feasible());
        let mut unit = vec![int(0); cols.len()];
        unit[k] = int(1);
        assert!(sys.is_solution(&unit));
        assert!(sys.is_solution(&sol.particular));
        let x = solution_sum(&cols, &sol.particular);
        assert!(coboundary_residual(&q, &p, &x, 1).unwrap().vanishes());
    }
}

#[test]
fn flipping_the_bracket_sign_flips_the_solution() {
    let p = nambu_bivector(3).unwrap();
    let cols = small_ansatz();
    let q = schouten(&p, &micro_vector(&cols[3]).unwrap()).unwrap();
    let plus = assemble_coboundary_signed(&q, &p, &cols, 3, 1).unwrap();
    let minus = assemble_coboundary_signed(&q, &p, &cols, 3, -1).unwrap();
    let (sp, sm) = (plus.solve(), minus.solve());
    assert_eq!(sp.status, sm.status);
    assert_eq!(sp.kernel_rank, sm.kernel_rank);
    let neg: Vec<Coeff> = sp.particular.iter().map(|c| -c).collect();
    assert_eq!(sm.particular, neg);
    assert!(minus.is_solution(&neg));
}

#[test]
fn dimensions_are_checked() {
    let p = nambu_bivector(3).unwrap();
    let q2 = gamma3_flow(&planar_bivector(Symbol::Rho)).unwrap();
    assert!(matches!(
        assemble_coboundary(&q2, &p, &[], 3),
        Err(Error::DimensionMismatch(..))
    ));
}

#[test]
fn zero_velocities_are_solved_by_zero() {
    let cols = small_ansatz();
    let z = DiffPoly::zero(3);
    let (a, r) = shortcut_systems(&z, &z, &cols, 3).unwrap();
    let sol = a.merged(r).solve();
    assert!(sol.is_feasible());
    assert!(sol.particular.iter().all(|c| *c == int(0)));
}

#[test]
fn velocities_round_trip_through_text() {
    let x = micro_multivector(&reference::eleven_micrographs(), 3).unwrap();
    let (adot, rhodot) = velocities_of(&x).unwrap();
    assert!(!adot.is_zero() && !rhodot.is_zero());
    let text = format!(
        "# induced by the listing\n\n{}",
        format_velocities(&adot, &rhodot)
    );
    assert_eq!(parse_velocities(&text, 3).unwrap(), (adot, rhodot));
}

#[test]
fn velocity_file_errors() {
    assert!(matches!(
        parse_velocities("adot = rho", 3),
        Err(Error::MissingData(_))
    ));
    assert!(matches!(
        parse_velocities("rhodot = rho", 3),
        Err(Error::MissingData(_))
    ));
    assert!(matches!(
        parse_velocities("adot = 1\nrhodot = 1\nbdot = 1", 3),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        parse_velocities("adot = 1\nadot = 2\nrhodot = 1", 3),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        parse_velocities("adot 1\nrhodot = 1", 3),
        Err(Error::Parse(_))
    ));
    assert!(parse_velocities("adot = rho_q\nrhodot = 1", 3).is_err());
}

#[test]
fn reduction() {
    assert!(reduce_solution(&MultiVector::zero(3, 1))
        .unwrap()
        .vanishes());
    assert_eq!(reduce_solution(&MultiVector::zero(3, 1)).unwrap().dim(), 2);
    // ∂_z survives the reduction
    let mut x = MultiVector::zero(3, 1);
    x.set(&[3], DiffPoly::parse("rho*a1_z", 3).unwrap())
        .unwrap();
    assert_eq!(
        reduce_solution(&x),
        Err(Error::NonvanishingReducedComponent)
    );
    // z-derivatives of rho drop out, a_z becomes 1
    let mut x = MultiVector::zero(3, 1);
    x.set(&[1], DiffPoly::parse("rho_y*a1_z + rho_z*a1_x", 3).unwrap())
        .unwrap();
    x.set(&[3], DiffPoly::parse("rho_z", 3).unwrap()).unwrap();
    let r = reduce_solution(&x).unwrap();
    assert_eq!(r.get(&[1]).unwrap(), DiffPoly::parse("rho_y", 2).unwrap());
    assert!(reduce_solution(&MultiVector::zero(2, 1)).is_err());
    assert!(reduce_solution(&MultiVector::zero(3, 2)).is_err());
}

#[test]
fn listing_and_formula_reduce_to_the_sunflower() {
    let sun = sunflower_field(&planar_bivector(Symbol::Rho)).unwrap();
    let listing = micro_multivector(&reference::eleven_micrographs(), 3).unwrap();
    assert!(reduce_solution(&listing)
        .unwrap()
        .sub(&sun)
        .unwrap()
        .vanishes());
    let formula = reference::theorem_vector_field().unwrap();
    assert!(reduce_solution(&formula)
        .unwrap()
        .sub(&sun)
        .unwrap()
        .vanishes());
}

#[test]
fn listing_and_formula_differ_by_a_hamiltonian_field() {
    let p = nambu_bivector(3).unwrap();
    let listing = micro_multivector(&reference::eleven_micrographs(), 3).unwrap();
    let formula = reference::theorem_vector_field().unwrap();
    let gap = listing.sub(&formula).unwrap();
    assert_eq!(gap.term_count(), 234);
    let h = MultiVector::function(DiffPoly::parse(reference::LISTING_GAUGE, 3).unwrap());
    assert!(gap.sub(&schouten(&p, &h).unwrap()).unwrap().vanishes());
    // the gap preserves the Casimir
    let a = MultiVector::function(DiffPoly::jet(3, Symbol::Casimir(1), &[]));
    assert!(schouten(&a, &gap).unwrap().vanishes());
}

#[test]
fn leibniz_matching_is_impossible() {
    let r = leibniz_impossibility_2d().unwrap();
    assert!(r.passes());
    assert_eq!(r.columns, 24);
    let [a, b, c] = [&r.obstructions[0], &r.obstructions[1], &r.obstructions[2]];
    assert_eq!(a.found_in, vec!["L8".to_string()]);
    assert_eq!(a.siblings_raw, 5);
    assert_eq!(a.siblings_in_lhs, 0);
    assert_eq!(b.max_in_degree, 4);
    assert!(r.max_column_in_degree < 4);
    assert!(b.found_in.is_empty());
    assert!(c.found_in.is_empty());
}

#[test]
fn min_support_keeps_only_needed_columns() {
    // columns e1, e2, e1+e2 against rhs e1+e2
    let sys = LinearSystem::from_columns(
        vec![
            ("a", column(&[("r1", 1)])),
            ("b", column(&[("r2", 1)])),
            ("c", column(&[("r1", 1), ("r2", 1)])),
        ],
        &column(&[("r1", 1), ("r2", 1)]),
    );
    let sol = sys.solve();
    let x = min_support(&sol, 3, &[0, 1, 2]).unwrap();
    assert_eq!(x, vec![int(0), int(0), int(1)]);
    assert!(sys.is_solution(&x));
}
