//! One PASS/FAIL line per acceptance criterion. Arithmetic is exact, so
//! every comparison is literal equality.
//!
//! Criterion 3 is a known failure: the listed micro-graphs and the explicit
//! formula trivialize the same flow but differ by a Hamiltonian field, not
//! by a sign. The line says so and the run still succeeds; any other failure
//! makes the process exit nonzero.
//!
//! Set `NAMBU_VELOCITIES=<path>` to feed external velocities to criterion 12;
//! without it the velocities induced by the listing are used.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use nambu_graphs::ansatz::{generate, generate_brute_force, vanish_filter, AnsatzSpec};
use nambu_graphs::cohomology::{
    assemble_coboundary, coboundary_residual, gamma3_flow, hamiltonian_of,
    leibniz_impossibility_2d, parse_velocities, reduce_solution, shortcut_systems, solution_sum,
    solve_sparse, sunflower_field, velocities_of,
};
use nambu_graphs::eval::micro_multivector;
use nambu_graphs::graph::{expansion_census, Graph};
use nambu_graphs::jet::{Coeff, DiffPoly, JetVar, Monomial, Symbol};
use nambu_graphs::linsys::{min_support, Status};
use nambu_graphs::multivector::{
    jacobiator, nambu_bivector, planar_bivector, schouten, MultiVector,
};
use nambu_graphs::reference;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [u32; 1] = [3];
const SEED: u64 = 0x6163_6365;

type Outcome = (bool, String);
type Criterion = (u32, &'static str, fn() -> Outcome);

fn int(k: i64) -> Coeff {
    Coeff::from_integer(k.into())
}

fn listing() -> MultiVector {
    micro_multivector(&reference::eleven_micrographs(), 3).unwrap()
}

fn survivors() -> Vec<Graph> {
    let a = generate(&AnsatzSpec::vector_field(3, 3, 1)).unwrap();
    vanish_filter(&a.graphs, 3).unwrap()
}

fn listing_vector(cols: &[Graph]) -> Option<Vec<Coeff>> {
    let mut x = vec![int(0); cols.len()];
    for (g, c) in reference::eleven_micrographs().iter() {
        x[cols.iter().position(|h| h == g)?] = c.clone();
    }
    Some(x)
}

fn c1_planar() -> Outcome {
    let p = planar_bivector(Symbol::Rho);
    let r = gamma3_flow(&p)
        .unwrap()
        .sub(&schouten(&p, &sunflower_field(&p).unwrap()).unwrap())
        .unwrap();
    (
        r.vanishes(),
        format!("Q - [[P, X_sunflower]] has {} terms", r.term_count()),
    )
}

fn c2_spatial() -> Outcome {
    let p = nambu_bivector(3).unwrap();
    let r = gamma3_flow(&p)
        .unwrap()
        .sub(&schouten(&p, &listing()).unwrap())
        .unwrap();
    (
        r.vanishes(),
        format!("Q - [[P, X_listing]] has {} terms", r.term_count()),
    )
}

fn c3_listing_vs_formula() -> Outcome {
    let p = nambu_bivector(3).unwrap();
    let (x, f) = (listing(), reference::theorem_vector_field().unwrap());
    let minus = x.sub(&f).unwrap();
    let plus = x.add(&f).unwrap();
    let h = MultiVector::function(DiffPoly::parse(reference::LISTING_GAUGE, 3).unwrap());
    let gauge = minus.sub(&schouten(&p, &h).unwrap()).unwrap().vanishes();
    (
        minus.vanishes() || plus.vanishes(),
        format!(
            "listing - formula: {} terms, listing + formula: {} terms; difference is [[P, H]] for the 12-term H: {gauge}",
            minus.term_count(),
            plus.term_count()
        ),
    )
}

fn c4_counts_3d() -> Outcome {
    let a = generate(&AnsatzSpec::vector_field(3, 3, 1)).unwrap();
    let kept = vanish_filter(&a.graphs, 3).unwrap();
    let contains = listing_vector(&kept).is_some();
    let (l, n) = reference::ANSATZ_3D;
    (
        a.stats.deduplicated == l && kept.len() == n && contains,
        format!(
            "{} markers, {} nonvanishing, listing contained: {contains}",
            a.stats.deduplicated,
            kept.len()
        ),
    )
}

fn c5_tadpoles_needed() -> Outcome {
    let p = nambu_bivector(3).unwrap();
    let q = gamma3_flow(&p).unwrap();
    let cols: Vec<Graph> = survivors()
        .into_iter()
        .filter(|g| g.tadpole_count() == 0)
        .collect();
    let st = assemble_coboundary(&q, &p, &cols, 3)
        .unwrap()
        .solve()
        .status;
    (
        st == Status::Infeasible,
        format!("{} tadpole-free columns: {st:?}", cols.len()),
    )
}

fn c6_counts_4d() -> Outcome {
    let s = generate(&AnsatzSpec::vector_field(4, 3, 1)).unwrap().stats;
    let got = [
        s.classes,
        s.classes_by_tadpoles[0],
        s.classes_by_tadpoles[1],
        s.labeled,
        s.deduplicated,
        s.by_tadpoles[1],
        s.by_tadpoles[0],
    ];
    (got == reference::ANSATZ_4D, format!("{got:?}"))
}

fn c7_sunflower_census() -> Outcome {
    let c = expansion_census(&reference::sunflower(), 3).unwrap();
    let got = (c.orbits, c.orbits_with_tadpole, c.orbits_without_tadpole);
    (
        got == reference::SUNFLOWER_MICRO_COUNTS,
        format!(
            "{} = {} + {} up to parent symmetry ({} pairwise non-isomorphic)",
            got.0, got.1, got.2, c.distinct
        ),
    )
}

fn c8_reduction() -> Outcome {
    let sun = sunflower_field(&planar_bivector(Symbol::Rho)).unwrap();
    match reduce_solution(&listing()) {
        Ok(r) => {
            let d = r.sub(&sun).unwrap();
            (
                d.vanishes(),
                format!(
                    "z-component vanishes; reduced - sunflower has {} terms",
                    d.term_count()
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn c9_hamiltonian() -> Outcome {
    let x = sunflower_field(&planar_bivector(Symbol::U)).unwrap();
    let expected = DiffPoly::parse(reference::HAMILTONIAN_GAMMA3, 2).unwrap();
    match hamiltonian_of(&x).unwrap() {
        Some(h) => (h == expected, format!("H = {h}")),
        None => (false, "not Hamiltonian".into()),
    }
}

fn c10_leibniz() -> Outcome {
    let r = leibniz_impossibility_2d().unwrap();
    let present: Vec<String> = r
        .obstructions
        .iter()
        .map(|o| format!("{}:{}", o.name, o.coeff_in_bracket))
        .collect();
    (
        r.passes(),
        format!(
            "{:?} over {} columns, {:?} over graphs 1-3; coefficients in [[P, sunflower]] {}",
            r.status,
            r.columns,
            r.restricted_status,
            present.join(" ")
        ),
    )
}

fn c11_jacobiators() -> Outcome {
    let bad: Vec<usize> = (2..=4)
        .filter(|&d| !jacobiator(&nambu_bivector(d).unwrap()).unwrap().vanishes())
        .collect();
    (
        bad.is_empty(),
        format!("d = 2, 3, 4; nonvanishing in {bad:?}"),
    )
}

fn c12_shortcut() -> Outcome {
    let (source, (adot, rhodot)) = match std::env::var("NAMBU_VELOCITIES") {
        Ok(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return (false, format!("{path}: {e}")),
            };
            match parse_velocities(&text, 3) {
                Ok(v) => (path, v),
                Err(e) => return (false, e.to_string()),
            }
        }
        Err(_) => (
            "velocities induced by the listing".to_string(),
            velocities_of(&listing()).unwrap(),
        ),
    };
    let cols = survivors();
    let (sa, sr) = shortcut_systems(&adot, &rhodot, &cols, 3).unwrap();
    let rows = (sa.num_rows(), sr.num_rows());
    let merged = sa.merged(sr);
    let sol = solve_sparse(&merged);
    if !sol.is_feasible() {
        return (false, format!("{source}: merged system infeasible"));
    }
    let order: Vec<usize> = (0..cols.len()).collect();
    let best = min_support(&sol, cols.len(), &order).unwrap();
    let x = solution_sum(&cols, &best);
    let p = nambu_bivector(3).unwrap();
    let res = coboundary_residual(&gamma3_flow(&p).unwrap(), &p, &x, 1).unwrap();
    let eleven = listing_vector(&cols)
        .map(|v| merged.is_solution(&v))
        .unwrap_or(false);
    (
        res.vanishes(),
        format!(
            "{source}; equations {} / {} (published {} / {}, informational); support {} found, 11-graph listing solves it: {eleven}; residual {} terms",
            rows.0,
            rows.1,
            reference::SHORTCUT_ROWS.0,
            reference::SHORTCUT_ROWS.1,
            x.len(),
            res.term_count()
        ),
    )
}

fn random_multivector(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> MultiVector {
    let mut v = MultiVector::zero(dim, degree);
    let all: Vec<usize> = (1..=dim).collect();
    for _ in 0..rng.gen_range(1..=3) {
        let mut idx: Vec<usize> = all.choose_multiple(rng, degree).copied().collect();
        idx.sort_unstable();
        let mut p = v.get(&idx).unwrap();
        for _ in 0..rng.gen_range(1..=3) {
            let vars: Vec<JetVar> = (0..rng.gen_range(0..=2))
                .map(|_| {
                    if rng.gen_bool(0.75) {
                        JetVar::plain(Symbol::Coord(rng.gen_range(1..=dim as u8)))
                    } else {
                        JetVar::new(Symbol::Rho, &[rng.gen_range(1..=dim)])
                    }
                })
                .collect();
            p.add_term(Monomial::from_vars(vars), int(rng.gen_range(-3..=3)));
        }
        v.set(&idx, p).unwrap();
    }
    v
}

fn sign(k: usize) -> Coeff {
    int(if k.is_multiple_of(2) { 1 } else { -1 })
}

fn c13_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    // Schouten: graded antisymmetry and Jacobi
    let mut schouten_ok = 0;
    for _ in 0..200 {
        let (a, b, c) = (
            rng.gen_range(1..=2),
            rng.gen_range(1..=2),
            rng.gen_range(1..=2),
        );
        let (x, y, z) = (
            random_multivector(&mut rng, 3, a),
            random_multivector(&mut rng, 3, b),
            random_multivector(&mut rng, 3, c),
        );
        let anti = schouten(&x, &y)
            .unwrap()
            .add(&schouten(&y, &x).unwrap().scale(&sign((a - 1) * (b - 1))))
            .unwrap();
        let jac = schouten(&x, &schouten(&y, &z).unwrap())
            .unwrap()
            .scale(&sign((a - 1) * (c - 1)))
            .add(
                &schouten(&y, &schouten(&z, &x).unwrap())
                    .unwrap()
                    .scale(&sign((b - 1) * (a - 1))),
            )
            .unwrap()
            .add(
                &schouten(&z, &schouten(&x, &y).unwrap())
                    .unwrap()
                    .scale(&sign((c - 1) * (b - 1))),
            )
            .unwrap();
        if anti.vanishes() && jac.vanishes() {
            schouten_ok += 1;
        }
    }
    // canonical forms: idempotent, invariant under relabeling, sign-coherent
    let mut canon_ok = 0;
    for _ in 0..1000 {
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(1..=4));
        let nv = m + n;
        let aerial: Vec<[usize; 2]> = (0..n)
            .map(|_| [rng.gen_range(0..nv), rng.gen_range(0..nv)])
            .collect();
        let g = Graph::kontsevich(m, aerial).unwrap();
        let c = g.canonical_form();
        let mut map: Vec<usize> = (0..nv).collect();
        map[m..].shuffle(&mut rng);
        let mut h = g.relabel(&map).unwrap();
        let mut s = 1;
        for a in 0..n {
            if rng.gen_bool(0.5) {
                h = h.permute_edges(a, &[1, 0]);
                s = -s;
            }
        }
        let ch = h.canonical_form();
        let again = c.graph.canonical_form();
        let ok = again.graph == c.graph
            && ch.graph == c.graph
            && ch.zero == c.zero
            && (c.zero || (again.sign == 1 && ch.sign == c.sign * s));
        if ok {
            canon_ok += 1;
        }
    }
    // orderly vs brute-force generation
    let mut gen_ok = 0;
    let mut gen_total = 0;
    for d in 2..=4 {
        for n in 1..=2 {
            for t in 0..=1 {
                let spec = AnsatzSpec::vector_field(d, n, t);
                let fast: BTreeSet<Graph> = generate(&spec).unwrap().graphs.into_iter().collect();
                let slow: BTreeSet<Graph> =
                    generate_brute_force(&spec).unwrap().into_iter().collect();
                gen_total += 1;
                if fast == slow {
                    gen_ok += 1;
                }
            }
        }
    }
    (
        schouten_ok == 200 && canon_ok == 1000 && gen_ok == gen_total,
        format!("Schouten {schouten_ok}/200, canonical forms {canon_ok}/1000, generation {gen_ok}/{gen_total} (seed {SEED:#x})"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        (1, "2D trivialization by the sunflower", c1_planar),
        (
            2,
            "3D trivialization by the listed micro-graphs",
            c2_spatial,
        ),
        (
            3,
            "listing equals the explicit formula up to sign",
            c3_listing_vs_formula,
        ),
        (4, "3D ansatz counts 366 / 244", c4_counts_3d),
        (5, "no tadpole-free solution", c5_tadpoles_needed),
        (6, "4D enumeration counts", c6_counts_4d),
        (
            7,
            "sunflower micro-expansion 42 = 10 + 32",
            c7_sunflower_census,
        ),
        (8, "dimensional reduction to the sunflower", c8_reduction),
        (9, "planar Hamiltonian of the sunflower", c9_hamiltonian),
        (10, "no Leibniz-graph matching", c10_leibniz),
        (11, "Nambu jacobiators vanish", c11_jacobiators),
        (12, "shortcut systems", c12_shortcut),
        (13, "property suites", c13_properties),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let t = Instant::now();
        let (pass, detail) = f();
        let known = KNOWN_FAILURES.contains(&n);
        println!(
            "{} criterion {n:>2}: {name}: {detail} [{:.2} s]{}",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            if !pass && known {
                " (known, documented)"
            } else {
                ""
            }
        );
        if !pass && !known {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
