//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Heavy targets (GL_4(F_3), Sp_6(F_3) deep ratios, extended graded scans)
//! are #[ignore]d; run them with `cargo test --test acceptance -- --include-ignored`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num::{BigInt, BigRational, One, Signed};
use stable_centres::bounding::{
    self, BoundingPair, BoundingTriple,
};
use stable_centres::centrformulas::{
    admissible_eps1, gl_centralizer_size, gl_order, o_order, orth_ratio, sp_order, u_order,
    unitary_centralizer_size,
};
use stable_centres::classalg;
use stable_centres::cli;
use stable_centres::gf::field_make;
use stable_centres::groups::GroupCtx;
use stable_centres::interp;
use stable_centres::matfq::{MatFq, Subspace};
use stable_centres::qcombinat::{q_binomial, q_int_z, rq_basis_eval, shifted_qbinom_check, QValue};
use stable_centres::types::{Family, Multipartition, PolyKey, StableLabel, WittClass};

fn ctx() -> &'static GroupCtx {
    static CTX: OnceLock<GroupCtx> = OnceLock::new();
    CTX.get_or_init(GroupCtx::in_memory)
}

fn order_formula(family: Family, q: u64, level: usize) -> BigInt {
    match family {
        Family::Gl => gl_order(level as u64, q),
        Family::U => u_order(level as u64, q),
        Family::Sp => sp_order(2 * level as u64, q).unwrap(),
        Family::OPlus => o_order(2 * level as u64, WittClass::Zero, q).unwrap(),
        Family::OMinus => o_order(2 * level as u64, WittClass::Omega, q).unwrap(),
        Family::OOdd => o_order(2 * level as u64 + 1, WittClass::One, q).unwrap(),
    }
}

// -------------------------------------------------------------------------
// criterion 1: group orders
// -------------------------------------------------------------------------

#[test]
fn criterion_01_group_orders() {
    let c = ctx();
    for (family, q, level) in cli::order_targets(false) {
        let got = c.group(family, q, level).unwrap().order();
        let want = order_formula(family, q, level);
        assert_eq!(BigInt::from(got as u64), want, "{family:?} q={q} level={level}");
    }
    println!("criterion 1 (group orders, desk set): PASS");
}

#[test]
#[ignore = "heavy targets; run with --include-ignored"]
fn criterion_01_group_orders_big() {
    let c = ctx();
    for (family, q, level) in [
        (Family::Gl, 3, 4),
        (Family::Sp, 2, 3),
        (Family::U, 2, 4),
        (Family::OOdd, 3, 2),
    ] {
        let got = c.group(family, q, level).unwrap().order();
        let want = order_formula(family, q, level);
        assert_eq!(BigInt::from(got as u64), want, "{family:?} q={q} level={level}");
    }
    println!("criterion 1 (group orders, heavy set): PASS");
}

// -------------------------------------------------------------------------
// criterion 2: centralizer formulas vs brute force
// -------------------------------------------------------------------------

#[test]
fn criterion_02_centralizer_formulas() {
    let c = ctx();
    for (q, n) in [(2u64, 2usize), (3, 2), (2, 3), (4, 2)] {
        let group = c.group(Family::Gl, q, n).unwrap();
        let ct = c.classes(Family::Gl, q, n).unwrap();
        for info in &ct.classes {
            let rep = MatFq::unpack_u64(group.field.clone(), n, n, info.min_rep);
            let brute = group.centralizer_size_scan(&rep).unwrap();
            let formula = gl_centralizer_size(&info.gl_type, q).unwrap();
            assert_eq!(BigInt::from(brute), formula, "GL_{n}(F_{q}) class {}", info.label);
        }
    }
    for (q, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let group = c.group(Family::U, q, n).unwrap();
        let ct = c.classes(Family::U, q, n).unwrap();
        for info in &ct.classes {
            let rep = MatFq::unpack_u64(group.field.clone(), n, n, info.min_rep);
            let brute = group.centralizer_size_scan(&rep).unwrap();
            let formula = unitary_centralizer_size(&info.gl_type, &group.field, q).unwrap();
            assert_eq!(BigInt::from(brute), formula, "U_{n}(F_{q}) class {}", info.label);
        }
    }
    println!("criterion 2 (centralizer formulas): PASS");
}

// -------------------------------------------------------------------------
// criterion 3: centralizer ratio corollaries
// -------------------------------------------------------------------------

#[test]
fn criterion_03_ratio_corollaries() {
    let c = ctx();
    for q in [2u64, 3] {
        for n in [1usize, 2] {
            let check = cli::ratio_check_gl(c, q, n).unwrap();
            assert!(check.passed, "{}", check.name);
            let check = cli::ratio_check_unitary(c, q, n).unwrap();
            assert!(check.passed, "{}", check.name);
        }
        // symplectic, including q = 2 (the characteristic-2 claim)
        let check = cli::ratio_check_sp(c, q, 1).unwrap();
        assert!(check.passed, "{}", check.name);
    }
    let check = cli::ratio_check_sp(c, 2, 2).unwrap();
    assert!(check.passed, "{}", check.name);
    // orthogonal: the matching Wall sign must be unique when decidable and
    // consistent across d in {2, 4}
    orth_ratio_consistency();
    for (family, level) in [(Family::OPlus, 1), (Family::OMinus, 1), (Family::OOdd, 1)] {
        let check = cli::ratio_check_orth(c, family, 3, level).unwrap();
        assert!(check.passed, "{}", check.name);
    }
    println!("criterion 3 (ratio corollaries): PASS");
}

/// For every class of O_1(F_3) and O_3(F_3), the admissible eps1 signs that
/// match the d=2 and d=4 ratios agree (and are unique when the two
/// predictions differ).
fn orth_ratio_consistency() {
    let c = ctx();
    let q = 3u64;
    for source in [0usize, 1] {
        let group = c.group(Family::OOdd, q, source).unwrap();
        let ct = c.classes(Family::OOdd, q, source).unwrap();
        let tm1 = group.tm1();
        for info in &ct.classes {
            let rep =
                MatFq::unpack_u64(group.field.clone(), group.dim, group.dim, info.min_rep);
            let small = group.centralizer_size_scan(&rep).unwrap();
            let mut surviving: Option<BTreeSet<String>> = None;
            for d in [2usize, 4] {
                if source + d / 2 > 2 {
                    continue; // beyond O_5
                }
                let big_group = c.group(Family::OOdd, q, source + d / 2).unwrap();
                let emb = rep.block_embed(d);
                let large = big_group.centralizer_size_scan(&emb).unwrap();
                let got = BigRational::new(BigInt::from(large), BigInt::from(small));
                let (_, h) = stable_centres::centrformulas::kh_of(&info.gl_type, &tm1);
                let matches: BTreeSet<String> = admissible_eps1(h)
                    .into_iter()
                    .filter(|&e| {
                        orth_ratio(&info.gl_type, &tm1, d as u64, q, WittClass::Zero, e)
                            .unwrap()
                            == got
                    })
                    .map(|e| e.name().to_string())
                    .collect();
                assert!(!matches.is_empty(), "no eps1 matches for {} d={d}", info.label);
                let distinct: BTreeSet<String> = admissible_eps1(h)
                    .into_iter()
                    .map(|e| {
                        orth_ratio(&info.gl_type, &tm1, d as u64, q, WittClass::Zero, e)
                            .unwrap()
                            .to_string()
                    })
                    .collect();
                if distinct.len() > 1 {
                    assert_eq!(matches.len(), 1, "ambiguous eps1 for {} d={d}", info.label);
                }
                surviving = Some(match surviving {
                    None => matches,
                    Some(prev) => {
                        let inter: BTreeSet<String> =
                            prev.intersection(&matches).cloned().collect();
                        assert!(
                            !inter.is_empty(),
                            "eps1 inconsistent across d for {}",
                            info.label
                        );
                        inter
                    }
                });
            }
        }
    }
}

#[test]
#[ignore = "Sp_6(F_3) centralizers via constrained DFS; run with --include-ignored"]
fn criterion_03_ratio_sp_q3_deep() {
    let c = ctx();
    let check = cli::ratio_check_sp_deep(c, 3, 2, 50_000_000).unwrap();
    assert!(check.passed, "{}: {}", check.name, check.detail);
    println!("criterion 3 (symplectic deep ratio at q=3): PASS");
}

// -------------------------------------------------------------------------
// criterion 4: GL polynomiality (Theorem-6.3 shape)
// -------------------------------------------------------------------------

fn check_poly_family(
    family: Family,
    q: u64,
    size_cap: u64,
    fit_ranks: &[usize],
    holdout: &[usize],
) -> usize {
    let c = ctx();
    let &top = fit_ranks.iter().chain(holdout).max().unwrap();
    let labels = interp::labels_up_to(c, family, q, size_cap, top).unwrap();
    let mut fits_done = 0;
    for mu in &labels {
        for nu in &labels {
            if mu.modified.size() + nu.modified.size() > size_cap {
                continue;
            }
            let fits = interp::interpolate_pair(c, mu, nu, fit_ranks, holdout).unwrap();
            for f in &fits {
                if f.fit.insufficient_points {
                    // a target realized only at the holdout carries no data;
                    // the downgrade must be reported, never silently passed
                    assert!(f.fit.consistency_only && !f.fit.verified);
                    continue;
                }
                assert!(
                    f.fit.degree_ok,
                    "degree {} over bound {} at {} * {} -> {}",
                    f.fit.degree, f.fit.degree_bound, f.mu, f.nu, f.lambda
                );
                for h in &f.fit.holdout {
                    assert!(h.matched, "holdout failed at {} * {} -> {}", f.mu, f.nu, f.lambda);
                }
                // consistency-only must be reported exactly per the
                // point-count rule, never silently passed
                assert_eq!(
                    f.fit.consistency_only,
                    f.fit.points.len() <= f.fit.degree_bound + 1
                        || f.fit.holdout.iter().all(|h| h.actual == "absent"),
                    "verdict policy at {} * {} -> {}",
                    f.mu,
                    f.nu,
                    f.lambda
                );
                fits_done += 1;
            }
        }
    }
    fits_done
}

#[test]
fn criterion_04_gl_polynomiality() {
    let n2 = check_poly_family(Family::Gl, 2, 2, &[1, 2, 3, 4], &[5]);
    let n3 = check_poly_family(Family::Gl, 3, 2, &[1, 2, 3], &[4]);
    assert!(n2 > 10 && n3 > 10);
    println!("criterion 4 (GL polynomiality, {} fits at q=2, {} at q=3): PASS", n2, n3);
}

// -------------------------------------------------------------------------
// criterion 5: graded stability across every computed family
// -------------------------------------------------------------------------

#[test]
fn criterion_05_graded_stability() {
    let c = ctx();
    let scopes: Vec<(Family, u64, Vec<usize>, u64)> = vec![
        (Family::Gl, 2, vec![1, 2, 3, 4], 4),
        (Family::Gl, 2, vec![4, 5], 2),
        (Family::Gl, 3, vec![1, 2, 3], 3),
        (Family::Gl, 3, vec![3, 4], 2),
        (Family::Gl, 4, vec![1, 2], 2),
        (Family::U, 2, vec![1, 2, 3], 3),
        (Family::U, 3, vec![1, 2], 2),
        (Family::Sp, 2, vec![1, 2], 4),
        (Family::Sp, 3, vec![1, 2], 4),
        (Family::OOdd, 3, vec![0, 1], 3),
        (Family::OPlus, 3, vec![1, 2], 4),
        (Family::OMinus, 3, vec![1, 2], 4),
    ];
    let mut total = 0;
    for (family, q, ranks, cap) in scopes {
        let rep = interp::graded_stability(c, family, q, &ranks, cap).unwrap();
        assert!(
            rep.ok,
            "graded violation in {} q={q}: {:?}",
            family.tag(),
            rep.violations
        );
        total += rep.entries_checked;
    }
    assert!(total > 100);
    println!("criterion 5 (graded stability, {} constants): PASS", total);
}

#[test]
#[ignore = "exhaustive graded scans over the largest ranks; run with --include-ignored"]
fn criterion_05_graded_stability_big() {
    let c = ctx();
    let mut total = 0;
    for (family, q, ranks, cap) in [
        (Family::U, 2, vec![1, 2, 3, 4], 4),
        (Family::Sp, 2, vec![1, 2, 3], 6),
        (Family::OOdd, 3, vec![0, 1, 2], 5),
    ] {
        let rep = interp::graded_stability(c, family, q, &ranks, cap).unwrap();
        assert!(rep.ok, "graded violation in {} q={q}", family.tag());
        total += rep.entries_checked;
    }
    println!("criterion 5 (graded stability, heavy, {} constants): PASS", total);
}

// -------------------------------------------------------------------------
// criterion 6: unitary polynomiality in s = (-q)^n
// -------------------------------------------------------------------------

#[test]
fn criterion_06_unitary_polynomiality() {
    let fits = check_poly_family(Family::U, 2, 2, &[1, 2, 3], &[4]);
    // top-degree independence over the same ranks
    let rep = interp::graded_stability(ctx(), Family::U, 2, &[1, 2, 3, 4], 2).unwrap();
    assert!(rep.ok);
    assert!(fits > 10);
    println!("criterion 6 (unitary polynomiality, {} fits): PASS", fits);
}

// -------------------------------------------------------------------------
// criterion 7: symplectic polynomiality in u = q^2n
// -------------------------------------------------------------------------

#[test]
fn criterion_07_symplectic_polynomiality() {
    let c = ctx();
    let fits = check_poly_family(Family::Sp, 2, 2, &[1, 2], &[3]);
    // the bound-0 fits are fully verified; bound-1 fits are exact on the
    // holdout (two points pin an affine polynomial)
    let labels = interp::labels_up_to(c, Family::Sp, 2, 2, 3).unwrap();
    let mut verified0 = 0;
    for mu in &labels {
        for nu in &labels {
            if mu.modified.size() + nu.modified.size() > 2 {
                continue;
            }
            for f in interp::interpolate_pair(c, mu, nu, &[1, 2], &[3]).unwrap() {
                if f.fit.degree_bound == 0 && f.fit.points.len() >= 2 {
                    assert!(f.fit.verified, "{} * {} -> {}", f.mu, f.nu, f.lambda);
                    verified0 += 1;
                }
            }
        }
    }
    assert!(verified0 > 0);
    // q = 3 consistency at the two computable ranks
    let fits3 = check_poly_family(Family::Sp, 3, 2, &[1, 2], &[]);
    let rep = interp::graded_stability(c, Family::Sp, 3, &[1, 2], 4).unwrap();
    assert!(rep.ok);
    assert!(fits > 5 && fits3 > 5);
    println!(
        "criterion 7 (symplectic polynomiality, {} fits q=2 / {} q=3, {} degree-0 verified): PASS",
        fits, fits3, verified0
    );
}

// -------------------------------------------------------------------------
// criterion 8: orthogonal consistency in t = q^n with denominator 2
// -------------------------------------------------------------------------

#[test]
fn criterion_08_orthogonal_consistency() {
    let c = ctx();
    let labels = interp::labels_up_to(c, Family::OOdd, 3, 2, 2).unwrap();
    let mut fits = 0;
    let mut consistency_only = 0;
    for mu in &labels {
        for nu in &labels {
            if mu.modified.size() + nu.modified.size() > 2 {
                continue;
            }
            for f in interp::interpolate_pair(c, mu, nu, &[0, 1], &[2]).unwrap() {
                if f.fit.insufficient_points {
                    assert!(f.fit.consistency_only && !f.fit.verified);
                    consistency_only += 1;
                    continue;
                }
                assert!(f.fit.degree_ok, "{} * {} -> {}", f.mu, f.nu, f.lambda);
                for h in &f.fit.holdout {
                    assert!(h.matched, "holdout at {} * {} -> {}", f.mu, f.nu, f.lambda);
                }
                // orthogonal coefficients live in R_q[1/2]: denominators
                // beyond 2 are forbidden
                let poly = f.fit.poly.as_ref().unwrap();
                assert!(
                    poly.denominators_divide(2),
                    "denominator beyond 2 at {} * {} -> {}: {:?}",
                    f.mu,
                    f.nu,
                    f.lambda,
                    f.fit.coefficients
                );
                fits += 1;
                if f.fit.consistency_only {
                    consistency_only += 1;
                }
            }
        }
    }
    // the rank ceiling keeps most runs consistency-only, and that must be
    // reported rather than silently passed
    assert!(consistency_only > 0, "expected explicit consistency-only verdicts");
    let rep = interp::graded_stability(c, Family::OOdd, 3, &[0, 1, 2], 3).unwrap();
    assert!(rep.ok);
    assert!(fits > 5);
    println!(
        "criterion 8 (orthogonal consistency, {} fits, {} consistency-only): PASS",
        fits, consistency_only
    );
}

// -------------------------------------------------------------------------
// criterion 9: triple orbit counts against the closed form
// -------------------------------------------------------------------------

#[test]
fn criterion_09_triple_orbit_counts() {
    let c = ctx();
    let mut orbits = 0;
    // tight orbits of every class of GL_2(F_2) and GL_2(F_3)
    for (q, levels) in [(2u64, vec![0, 1, 2, 3, 4]), (3, vec![0, 1, 2, 3])] {
        let ct = c.classes(Family::Gl, q, 2).unwrap();
        let group = c.group(Family::Gl, q, 2).unwrap();
        for info in &ct.classes {
            let rep = MatFq::unpack_u64(group.field.clone(), 2, 2, info.min_rep);
            let t = BoundingTriple::tight(&rep).unwrap();
            let (kcal, _) = bounding::calibrate_k_triple(c, &t).unwrap();
            assert!(kcal.is_positive());
            let report = bounding::verify_triple_orbit(c, &t, &levels).unwrap();
            assert!(report.all_matched, "tight orbit {} q={q}: {report:?}", info.label);
            orbits += 1;
        }
    }
    // five non-tight orbits at q = 2, including the hyperplane example with
    // P = [m]_q = 1, 3, 7, 15
    let f2 = field_make(2, 1).unwrap();
    let full = Subspace::full(f2.clone(), 2);
    let hyper = Subspace::from_rows(f2.clone(), 2, vec![vec![0, 1]]);
    let zero = Subspace::zero_space(f2.clone(), 2);
    let id = MatFq::identity(f2.clone(), 2);
    let tv = MatFq::from_rows(f2.clone(), &[vec![1, 1], vec![0, 1]]);
    let wtv = Subspace::from_rows(f2.clone(), 2, vec![vec![0, 1]]);
    let non_tight = vec![
        BoundingTriple::new(full.clone(), id.clone(), hyper.clone()).unwrap(),
        BoundingTriple::new(hyper.clone(), id.clone(), full.clone()).unwrap(),
        BoundingTriple::new(hyper.clone(), id.clone(), hyper.clone()).unwrap(),
        BoundingTriple::new(wtv, tv, zero.clone()).unwrap(),
        BoundingTriple::new(zero.clone(), id.clone(), zero).unwrap(),
    ];
    for (i, t) in non_tight.iter().enumerate() {
        let report = bounding::verify_triple_orbit(c, t, &[0, 1, 2, 3, 4]).unwrap();
        assert!(report.all_matched, "non-tight orbit {i}: {report:?}");
        orbits += 1;
    }
    // the hyperplane orbit realizes the Grassmannian counts
    let t = &non_tight[0];
    for (m, want) in [(1usize, 1u64), (2, 3), (3, 7), (4, 15)] {
        assert_eq!(bounding::orbit_count_triple(c, t, m).unwrap(), want);
    }
    println!("criterion 9 (triple orbit counts, {} orbits incl. zero cases): PASS", orbits);
}

// -------------------------------------------------------------------------
// criterion 10: pair orbit counts for the classical families
// -------------------------------------------------------------------------

#[test]
fn criterion_10_pair_orbit_counts() {
    let c = ctx();
    let mut orbits = 0;
    let mut ambiguous = 0;
    // all orbits of small bounding-pair sets, verified at every additional
    // computable rank
    let scopes: Vec<(Family, u64, usize, Vec<usize>)> = vec![
        (Family::U, 2, 2, vec![2, 3, 4]),
        (Family::Sp, 2, 1, vec![1, 2, 3]),
        (Family::Sp, 3, 1, vec![1, 2]),
        (Family::OOdd, 3, 1, vec![1, 2]),
    ];
    for (family, q, level, check_levels) in scopes {
        let pairs = bounding::enumerate_bp(c, family, q, level).unwrap();
        let (orbit, reps) = bounding::bp_orbits(c, family, q, level, &pairs).unwrap();
        let _ = orbit;
        for &ri in &reps {
            let p = &pairs[ri];
            let inv = p.invariants().unwrap();
            assert!(inv.exponent2() >= 0, "k - h/2 - a < 0 at {family:?} orbit");
            let report = bounding::verify_pair_orbit(c, p, &check_levels).unwrap();
            assert!(
                report.all_matched,
                "{family:?} q={q} orbit rep {ri}: {report:?}"
            );
            if report.ambiguous {
                ambiguous += 1;
            }
            orbits += 1;
        }
    }
    // tight pairs of every class of the next rank up
    let tight_scopes: Vec<(Family, u64, usize, Vec<usize>)> = vec![
        (Family::U, 2, 3, vec![3, 4]),
        (Family::Sp, 2, 2, vec![2, 3]),
        (Family::Sp, 3, 2, vec![2]),
        (Family::OOdd, 3, 2, vec![2]),
    ];
    for (family, q, level, check_levels) in tight_scopes {
        let group = c.group(family, q, level).unwrap();
        let ct = c.classes(family, q, level).unwrap();
        let form = c.form(family, q, level).unwrap();
        for info in &ct.classes {
            let rep =
                MatFq::unpack_u64(group.field.clone(), group.dim, group.dim, info.min_rep);
            let p = BoundingPair::tight(form.clone(), &rep).unwrap();
            let inv = p.invariants().unwrap();
            assert!(inv.exponent2() >= 0);
            let report = bounding::verify_pair_orbit(c, &p, &check_levels).unwrap();
            assert!(
                report.all_matched,
                "tight pair {} {family:?}: {report:?}",
                info.label
            );
            orbits += 1;
        }
    }
    println!(
        "criterion 10 (pair orbit counts, {} orbits, {} with ambiguous signs): PASS",
        orbits, ambiguous
    );
}

// -------------------------------------------------------------------------
// criterion 11: specialization maps and conjugacy reduction
// -------------------------------------------------------------------------

#[test]
fn criterion_11_psi_structure() {
    let c = ctx();
    // homomorphism property and centrality on random orbit pairs
    let cfg = cli::RunConfig::default();
    let report = cli::cmd_verify(&cfg, "psi").unwrap();
    assert!(report.passed, "{:?}", report.checks);
    // conjugacy reduction, exhaustive at the smallest ranks:
    // triples of BT_2(F_2) under GL_2 vs GL_3
    let q = 2u64;
    let triples = bounding::enumerate_bt(c, q, 2).unwrap();
    let (orbit2, _) = bounding::bt_orbits(c, q, 2, &triples).unwrap();
    let gl3 = c.group(Family::Gl, q, 3).unwrap();
    for i in 0..triples.len() {
        for j in i + 1..triples.len() {
            let a3 = triples[i].express_at(3);
            let b3 = triples[j].express_at(3);
            let conj3 = bounding::triples_conjugate(&a3, &b3, &gl3);
            assert_eq!(
                conj3,
                orbit2[i] == orbit2[j],
                "GL_3 vs GL_2 conjugacy disagrees at triples {i},{j}"
            );
        }
    }
    // pairs: BP_1 of Sp_2(F_2) under Sp_2 vs Sp_4, and BP_2 of U_2(F_2)
    // under U_2 vs U_3
    for (family, q, level) in [(Family::Sp, 2u64, 1usize), (Family::U, 2, 2)] {
        let pairs = bounding::enumerate_bp(c, family, q, level).unwrap();
        let (orbit, _) = bounding::bp_orbits(c, family, q, level, &pairs).unwrap();
        let big = c.group(family, q, level + 1).unwrap();
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let a = pairs[i].express_at(level + 1).unwrap();
                let b = pairs[j].express_at(level + 1).unwrap();
                let conj_big = bounding::pairs_conjugate(&a, &b, &big);
                assert_eq!(
                    conj_big,
                    orbit[i] == orbit[j],
                    "{family:?} conjugacy reduction at pairs {i},{j}"
                );
            }
        }
    }
    println!("criterion 11 (psi homomorphism, centrality, conjugacy reduction): PASS");
}

// -------------------------------------------------------------------------
// criterion 12: q-combinatorics identities over the stated ranges
// -------------------------------------------------------------------------

#[test]
fn criterion_12_q_combinatorics() {
    let bases: Vec<i64> = vec![2, 3, 4, 5, -2, -3, 9];
    for &b in &bases {
        let qv = QValue::new(b).unwrap();
        for n in 0..=12u64 {
            for k in 0..=n {
                let v = q_binomial(n, k, qv).unwrap();
                assert_eq!(v, q_binomial(n, n - k, qv).unwrap());
                if n > 0 && k > 0 {
                    let rhs = q_binomial(n - 1, k - 1, qv).unwrap()
                        + qv.pow(k) * q_binomial(n - 1, k, qv).unwrap();
                    assert_eq!(v, rhs, "q-Pascal at ({n},{k},{b})");
                }
            }
        }
    }
    for &b in &[2i64, 3, 4] {
        let qv = QValue::new(b).unwrap();
        for n in 0..=10u64 {
            let x = BigRational::from_integer(q_int_z(n, qv));
            for k in 0..=n {
                assert_eq!(
                    rq_basis_eval(k, &x, qv),
                    BigRational::from_integer(q_binomial(n, k, qv).unwrap())
                );
            }
        }
        for d in -4i64..=4 {
            for h in 0..=4u64 {
                for m in 0..=8u64 {
                    if m as i64 + d >= 0 {
                        assert!(shifted_qbinom_check(d, h, m, qv).unwrap());
                    }
                }
            }
        }
    }
    // Gaussian polynomials specialize to binomial coefficients at q = 1
    for n in 0..=8u64 {
        for k in 0..=n {
            let g = stable_centres::qcombinat::gauss_poly(n, k).unwrap();
            let binom: BigInt = (1..=k).fold(BigInt::one(), |acc, i| {
                acc * BigInt::from(n - k + i) / BigInt::from(i)
            });
            assert_eq!(g.eval(&BigRational::one()), BigRational::from_integer(binom));
        }
    }
    println!("criterion 12 (q-combinatorics suite): PASS");
}

// -------------------------------------------------------------------------
// cross-cutting: unitary classes are GL-type fibers with star symmetry,
// class labels round-trip, and the spec's worked product example
// -------------------------------------------------------------------------

#[test]
fn supporting_unitary_class_structure() {
    let c = ctx();
    for n in 1..=3usize {
        let ct = c.classes(Family::U, 2, n).unwrap();
        let f = c.matrix_field(Family::U, 2).unwrap();
        let mut types: Vec<Multipartition> =
            ct.classes.iter().map(|i| i.gl_type.clone()).collect();
        types.sort();
        types.dedup();
        assert_eq!(types.len(), ct.classes.len());
        for i in &ct.classes {
            assert!(i.gl_type.star_symmetric(&f, true));
            assert_eq!(i.label.index, 0);
        }
    }
    println!("supporting check (unitary classes = star-symmetric type fibers): PASS");
}

#[test]
fn supporting_labels_roundtrip_everywhere() {
    let c = ctx();
    for (family, q, level) in [
        (Family::Gl, 2u64, 3usize),
        (Family::U, 2, 2),
        (Family::Sp, 3, 2),
        (Family::OOdd, 3, 1),
        (Family::OPlus, 3, 2),
        (Family::OMinus, 3, 2),
    ] {
        let ct = c.classes(family, q, level).unwrap();
        for info in &ct.classes {
            let s = info.label.to_string();
            let back = stable_centres::types::label_parse(&s).unwrap();
            assert_eq!(back, info.label, "label roundtrip {s}");
        }
    }
    println!("supporting check (label grammar roundtrip on all class tables): PASS");
}

#[test]
fn supporting_structure_constant_spot_values() {
    let c = ctx();
    // the S_3-isomorphic product in GL_2(F_2) and its growth at n = 3
    let tv = stable_centres::types::label_parse("gl,q=2;t+1:(1)").unwrap();
    let id = stable_centres::types::label_parse("gl,q=2;").unwrap();
    assert_eq!(
        classalg::structure_constant(c, &tv, &tv, &id, 2).unwrap(),
        BigInt::from(3)
    );
    assert_eq!(
        classalg::structure_constant(c, &tv, &tv, &id, 3).unwrap(),
        BigInt::from(21)
    );
    assert_eq!(
        classalg::structure_constant(c, &id, &tv, &tv, 5).unwrap(),
        BigInt::one()
    );
    // unit coefficient is 1 at every family
    for (family, q, level) in [(Family::Sp, 2u64, 2usize), (Family::U, 2, 2), (Family::OOdd, 3, 1)] {
        let ct = c.classes(family, q, level).unwrap();
        let idl = ct.classes
            .iter()
            .find(|i| i.size == 1 && i.modified.is_empty())
            .unwrap()
            .label
            .clone();
        for info in ct.classes.iter().take(4) {
            assert_eq!(
                classalg::structure_constant(c, &idl, &info.label, &info.label, level)
                    .unwrap(),
                BigInt::one()
            );
        }
    }
    println!("supporting check (structure constant spot values): PASS");
}

#[test]
fn supporting_zero_class_conventions() {
    let c = ctx();
    // empty factor kills the product; absent modified types resolve to zero
    let tv = stable_centres::types::label_parse("gl,q=2;t+1:(1)").unwrap();
    let v = classalg::class_sum(c, &tv, 1).unwrap();
    assert!(v.is_zero());
    let exp = classalg::expansion(c, Family::Gl, 2, 1, &tv, &tv).unwrap();
    assert!(exp.is_empty());
    assert!(!classalg::label_realized(c, &tv, 1).unwrap());
    // a modified type whose part count exceeds n - |nu| is absent
    let f2 = field_make(2, 1).unwrap();
    let tm1 = PolyKey::t_minus_one(&f2);
    let mut mp = Multipartition::new();
    mp.insert(tm1.clone(), stable_centres::types::Partition::new(vec![1, 1]));
    let l = StableLabel::new(Family::Gl, 2, mp, 0);
    assert!(!classalg::label_realized(c, &l, 3).unwrap());
    assert!(classalg::label_realized(c, &l, 4).unwrap());
    println!("supporting check (zero conventions): PASS");
}
