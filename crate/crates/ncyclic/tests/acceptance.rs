//! The twelve acceptance criteria, each reported on one line. Every check is
//! an exact equality.

use ncyclic::algebra::{
    dual_numbers, field, laurent_window, matrix_algebra, null_algebra, product_extension, t2_extension, truncated_poly,
    upper_triangular, BasedAlgebra, LinearMapT,
};
use ncyclic::chern::{
    ch_even, ch_odd, closedness_check, cycle_defect, cyclic_shift_model, pairing_levels, point_model, tau,
    transgression_check, FredholmData,
};
use ncyclic::homology::excision::{connecting_map, six_term_check};
use ncyclic::homology::hodge::{cyclic_homology, hochschild_homology, sbi_check};
use ncyclic::homology::homotopy::{homotopy_check, PolynomialHomotopy};
use ncyclic::homology::quasifree::{connection_projector, quasi_free_check, sigma_phi_section, Connection};
use ncyclic::homology::DEFAULT_SIZE_CAP;
use ncyclic::identities::{run_identity_suite, SuiteConfig, SuiteReport};
use ncyclic::scalar::Scalar;
use ncyclic::tensor::{
    idempotent_residual, idempotent_series_coefficient, invertible_residuals, lift_idempotent, lift_invertible,
};
use ncyclic::xcomplex::unitization_split_check;
use ncyclic::SparseVec;

type Outcome = Result<(), String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn lib<T>(r: ncyclic::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const X_COMPLEX: [&str; 5] =
    ["partial_squared", "delta_squared", "delta_homotopy", "partial_odd_squared", "partial_equals_delta_on_P"];
const SPECTRAL: [&str; 5] = ["P_idempotent", "PH_zero", "HP_zero", "H_inverts_one_minus_kappa_sq", "f1_coefficients"];

fn corpus() -> Vec<(&'static str, BasedAlgebra)> {
    vec![
        ("Q", field()),
        ("dual", dual_numbers()),
        ("M2", matrix_algebra(2)),
        ("upper2", upper_triangular(2)),
        ("laurent6", laurent_window(6)),
    ]
}

fn suite_reports() -> Result<Vec<(&'static str, SuiteReport)>, String> {
    let cfg = SuiteConfig { max_degree: 6, exhaustive_degree: 4, random_count: 100, seed: 2024 };
    corpus().into_iter().map(|(name, a)| Ok((name, lib(run_identity_suite(&a, &cfg))?))).collect()
}

fn suite_part(reports: &[(&str, SuiteReport)], keep: impl Fn(&str) -> bool) -> Outcome {
    for (name, r) in reports {
        for res in r.results.iter().filter(|x| keep(&x.label)) {
            ensure(res.checks > 0, || format!("{name}: {} ran no checks", res.label))?;
            ensure(res.failures == 0, || format!("{name}: {}", res.first_failure.clone().unwrap_or_default()))?;
        }
    }
    Ok(())
}

fn criterion_1(reports: &[(&str, SuiteReport)]) -> Outcome {
    suite_part(reports, |l| !X_COMPLEX.contains(&l) && !SPECTRAL.contains(&l))
}

fn criterion_2(reports: &[(&str, SuiteReport)]) -> Outcome {
    suite_part(reports, |l| X_COMPLEX.contains(&l))
}

fn criterion_3(reports: &[(&str, SuiteReport)]) -> Outcome {
    suite_part(reports, |l| SPECTRAL.contains(&l))
}

fn criterion_4() -> Outcome {
    let coeffs: Vec<i64> = (1..=3).map(idempotent_series_coefficient).collect();
    ensure(coeffs == [2, 6, 20], || format!("series coefficients {coeffs:?}"))?;
    for (name, a) in [("Q", field()), ("M2", matrix_algebra(2)), ("upper2", upper_triangular(2))] {
        let e = SparseVec::unit(0);
        for k in 2..=4 {
            let lift = lib(lift_idempotent(&a, &e, k))?;
            let r = lib(idempotent_residual(&a, &lift, k))?;
            ensure(r.is_zero(), || format!("{name} k={k}: idempotent residual {}", r.display(&a)))?;
        }
    }
    let l = laurent_window(6);
    let idx = |s: &str| l.index_of(s).unwrap();
    let a = SparseVec::from_entries([(idx("u"), Scalar::ONE), (idx("1"), -Scalar::ONE)]);
    let b = SparseVec::from_entries([(idx("u^-1"), Scalar::ONE), (idx("1"), -Scalar::ONE)]);
    for k in 2..=3 {
        let (ha, hb) = lib(lift_invertible(&l, &a, &b, k))?;
        let (r1, r2) = lib(invertible_residuals(&l, &ha, &hb, k))?;
        ensure(r1.is_zero() && r2.is_zero(), || format!("laurent k={k}: invertible residual nonzero"))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let q = field();
    let hc: Vec<usize> = lib(cyclic_homology(&q, 4, DEFAULT_SIZE_CAP))?.degrees.iter().map(|d| d.homology).collect();
    let hh: Vec<usize> =
        lib(hochschild_homology(&q, 4, DEFAULT_SIZE_CAP))?.degrees.iter().map(|d| d.homology).collect();
    ensure(hc == [1, 0, 1, 0, 1], || format!("HC(Q) = {hc:?}"))?;
    ensure(hh == [1, 0, 0, 0, 0], || format!("HH(Q) = {hh:?}"))
}

fn criterion_6() -> Outcome {
    for (name, a) in [("Q", field()), ("dual", dual_numbers()), ("M2", matrix_algebra(2))] {
        for n in 1..=3 {
            let r = lib(sbi_check(&a, n, DEFAULT_SIZE_CAP))?;
            ensure(r.exact(), || format!("{name} n={n}: {r:?}"))?;
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let exts = [
        ("T2", t2_extension(false)),
        ("T2 perturbed", t2_extension(true)),
        ("null(1) x Q", product_extension(&null_algebra(1), &field())),
    ];
    for (name, ext) in &exts {
        let r = lib(six_term_check(ext, 3, DEFAULT_SIZE_CAP))?;
        ensure(r.exact(), || format!("{name}: sequence not exact {r:?}"))?;
    }
    let alt = t2_extension(true).s;
    let c = lib(connecting_map(&t2_extension(false), 4, Some(&alt), DEFAULT_SIZE_CAP))?;
    ensure(
        c.lands_in_kernel && c.double_commutator_vanishes && c.ranks_match_pair && c.section_independent == Some(true),
        || format!("T2 connecting map: {c:?}"),
    )
}

fn criterion_8() -> Outcome {
    for (name, a) in [("Q", field()), ("M2", matrix_algebra(2))] {
        let r = lib(quasi_free_check(&a))?;
        ensure(r.feasible && r.verified, || format!("{name}: expected a verified witness"))?;
        let (t, s) = lib(sigma_phi_section(&a, r.phi.as_ref().unwrap(), DEFAULT_SIZE_CAP))?;
        ensure(lib(s.multiplicativity_defect(&a, &t))?.is_none(), || format!("{name}: section not multiplicative"))?;
    }
    for (name, a) in [("dual", dual_numbers()), ("Q[t]/t^3", truncated_poly(3))] {
        let r = lib(quasi_free_check(&a))?;
        ensure(!r.feasible && r.verified && r.certificate.is_some(), || format!("{name}: expected a certificate"))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let a = matrix_algebra(2);
    let nabla = lib(Connection::from_decision(&a, &lib(quasi_free_check(&a))?))?;
    let r = lib(connection_projector(&nabla, 5))?;
    ensure(r.passed(), || format!("{r:?}"))
}

fn criterion_10() -> Outcome {
    let (q, m2) = (field(), matrix_algebra(2));
    let e11 = SparseVec::unit(m2.index_of("E11").unwrap());
    let e12 = SparseVec::unit(m2.index_of("E12").unwrap());
    let maps = vec![lib(LinearMapT::new(1, 4, vec![e11]))?, lib(LinearMapT::new(1, 4, vec![e12]))?];
    let h = lib(PolynomialHomotopy::new(&q, &m2, maps))?;
    let nabla = lib(Connection::from_decision(&q, &lib(quasi_free_check(&q))?))?;
    let r = lib(homotopy_check(&h, &nabla, DEFAULT_SIZE_CAP))?;
    ensure(r.on_generators && r.homotopy_formula && r.passed(), || format!("{r:?}"))
}

fn cocycle_checks(fd: &FredholmData, name: &str, levels: &[usize], transgressions: &[usize]) -> Outcome {
    for &level in levels {
        let r = lib(closedness_check(&lib(tau(fd, level))?))?;
        ensure(r.passed(), || format!("{name}: tau_{level} not closed {r:?}"))?;
    }
    for &n in transgressions {
        let r = lib(transgression_check(fd, n))?;
        ensure(r.passed(), || format!("{name}: transgression at {n} {r:?}"))?;
    }
    Ok(())
}

fn criterion_11() -> Outcome {
    let p = point_model();
    cocycle_checks(&p, "point", &[0, 2, 4], &[0, 1])?;
    let z = lib(ch_even(p.algebra(), &SparseVec::unit(0), 3))?;
    let values = lib(pairing_levels(&p, &z, 3, 4))?;
    ensure(values.iter().all(|(_, v)| v.is_one()) && values.len() == 3, || format!("even pairing {values:?}"))?;
    for n in [3, 4] {
        let fd = cyclic_shift_model(n);
        cocycle_checks(&fd, &format!("cyclic({n})"), &[1, 3], &[1])?;
        let a = fd.algebra();
        let u_minus_1 = SparseVec::from_entries([(1, Scalar::ONE), (0, -Scalar::ONE)]);
        let z = lib(ch_odd(a, &u_minus_1, 2))?;
        ensure(lib(cycle_defect(a, &z, 2))?.is_zero(), || format!("cyclic({n}): ch_odd not a cycle"))?;
        let values = lib(pairing_levels(&fd, &z, 2, 1))?;
        ensure(values.iter().all(|(_, v)| v.is_zero()), || format!("cyclic({n}) pairing {values:?}"))?;
    }
    Ok(())
}

fn criterion_12() -> Outcome {
    for (name, a) in [("null(1)", null_algebra(1)), ("dual", dual_numbers()), ("M2", matrix_algebra(2))] {
        let r = lib(unitization_split_check(&a))?;
        ensure(r.passed(), || format!("{name}: {r:?}"))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let reports = suite_reports();
    let suite = |f: fn(&[(&str, SuiteReport)]) -> Outcome| -> Outcome {
        match &reports {
            Ok(r) => f(r),
            Err(e) => Err(e.clone()),
        }
    };
    let outcomes: Vec<(&str, Outcome)> = vec![
        ("operator identities", suite(criterion_1)),
        ("X-complex boundaries", suite(criterion_2)),
        ("spectral operators", suite(criterion_3)),
        ("idempotent and invertible lifts", criterion_4()),
        ("homology of Q", criterion_5()),
        ("SBI exactness", criterion_6()),
        ("excision sequence", criterion_7()),
        ("quasi-freeness", criterion_8()),
        ("connection projector", criterion_9()),
        ("homotopy invariance", criterion_10()),
        ("Chern cocycles", criterion_11()),
        ("unitization splitting", criterion_12()),
    ];
    let mut failed = 0;
    for (k, (name, outcome)) in outcomes.iter().enumerate() {
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name}", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", k + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
