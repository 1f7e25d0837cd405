use std::path::Path;

use ncyclic::algebra::{validate_algebra, BasedAlgebra};
use ncyclic::chern::{
    ch_even, ch_odd, closedness_check, cycle_defect, inverse_minus_one, pairing_levels, tau, transgression_check,
    Parity,
};
use ncyclic::homology::excision::{connecting_map, six_term_check};
use ncyclic::homology::hodge::{cyclic_homology, hochschild_homology, hodge_tower, hp_estimate, sbi_check};
use ncyclic::homology::homotopy::homotopy_check;
use ncyclic::homology::quasifree::{connection_projector, quasi_free_check, sigma_phi_section, Connection};
use ncyclic::homology::HomologyReport;
use ncyclic::identities::{run_identity_suite, SuiteConfig};
use ncyclic::io::{builtin_algebra, parse_algebra, parse_element, parse_extension, parse_fredholm, parse_homotopy};
use ncyclic::tensor::{idempotent_residual, invertible_residuals, lift_idempotent, lift_invertible};
use ncyclic::Error;

use crate::table::{verdict, Table};
use crate::{Cli, Command, Mode, ParityArg};

pub type Outcome = Result<Table, String>;

fn read(path: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn lib<T>(path: &str, r: ncyclic::Result<T>) -> Result<T, String> {
    r.map_err(|e| if path.is_empty() { e.to_string() } else { format!("{path}: {e}") })
}

/// Reads an algebra file, falling back to a builtin name.
fn load_algebra(spec: &str) -> Result<BasedAlgebra, String> {
    if Path::new(spec).exists() {
        lib(spec, parse_algebra(&read(spec)?))
    } else {
        builtin_algebra(spec).map_err(|e| format!("{spec}: no such file, and {e}"))
    }
}

/// Loads an algebra for a computation and refuses tables that fail validation.
fn checked_algebra(spec: &str) -> Result<BasedAlgebra, String> {
    let a = load_algebra(spec)?;
    let diag = validate_algebra(&a);
    if !diag.passed() {
        return Err(format!("{spec}: {diag}"));
    }
    Ok(a)
}

fn ok<T>(r: ncyclic::Result<T>) -> Result<T, String> {
    lib("", r)
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::Validate { algebra, extension, fredholm, homotopy } => {
            validate(algebra.as_deref(), extension.as_deref(), fredholm.as_deref(), homotopy.as_deref())
        }
        Command::Identities { algebra, random_count, exhaustive_degree } => {
            let a = checked_algebra(&algebra.algebra)?;
            let cfg = SuiteConfig {
                max_degree: g.max_degree,
                exhaustive_degree: (*exhaustive_degree).min(g.max_degree),
                random_count: *random_count,
                seed: g.seed,
            };
            let report = ok(run_identity_suite(&a, &cfg))?;
            let mut t = Table::new("identities", &["label", "checks", "failures", "first_failure"]);
            for r in &report.results {
                let first = r.first_failure.clone().unwrap_or_else(|| "-".to_string());
                t.row(vec![r.label.clone(), r.checks.to_string(), r.failures.to_string(), first]);
            }
            t.passed = report.passed();
            let failed = report.failed_labels();
            t.summary = Some(if failed.is_empty() {
                report.summary()
            } else {
                format!("{}: {}", report.summary(), failed.join(", "))
            });
            Ok(t)
        }
        Command::Hh { algebra } => {
            let a = checked_algebra(&algebra.algebra)?;
            Ok(homology_table("hh", &ok(hochschild_homology(&a, g.max_degree, g.size_cap))?))
        }
        Command::Hc { algebra } => {
            let a = checked_algebra(&algebra.algebra)?;
            Ok(homology_table("hc", &ok(cyclic_homology(&a, g.max_degree, g.size_cap))?))
        }
        Command::Tower { algebra } => {
            let a = checked_algebra(&algebra.algebra)?;
            let mut t = Table::new("tower", &["level", "even", "odd"]);
            for n in 0..=g.max_degree {
                let (even, odd) = ok(hodge_tower(&a, n, g.size_cap))?.homology();
                t.row(vec![n.to_string(), even.to_string(), odd.to_string()]);
            }
            if g.max_degree >= 2 {
                let hp = ok(hp_estimate(&a, g.max_degree, g.size_cap))?;
                t.summary = Some(match hp.values() {
                    Some((e, o)) => format!("periodic estimate: even {e}, odd {o}"),
                    None => "periodic estimate: not stabilized".to_string(),
                });
            }
            Ok(t)
        }
        Command::Sbi { algebra } => {
            let a = checked_algebra(&algebra.algebra)?;
            let mut t = Table::new("sbi", &["level", "hd_prev", "hc_prev", "hh", "hc", "hd_prev2", "exact"]);
            for n in 1..=g.max_degree.max(1) {
                let r = ok(sbi_check(&a, n, g.size_cap))?;
                let exact = r.exact();
                t.passed &= exact;
                t.row(vec![
                    n.to_string(),
                    r.hd_prev.to_string(),
                    r.hc_prev.to_string(),
                    r.hh.to_string(),
                    r.hc.to_string(),
                    r.hd_prev2.to_string(),
                    verdict(exact),
                ]);
            }
            Ok(t)
        }
        Command::Quasifree { algebra } => {
            let a = checked_algebra(&algebra.algebra)?;
            let r = ok(quasi_free_check(&a))?;
            let mut t = Table::new("quasifree", &["check", "result"]);
            t.row(vec!["quasi_free".to_string(), if r.feasible { "yes" } else { "no" }.to_string()]);
            t.check(if r.feasible { "witness_verified" } else { "certificate_verified" }, r.verified);
            if let Some(phi) = &r.phi {
                let (tt, s) = ok(sigma_phi_section(&a, phi, g.size_cap))?;
                t.check("section_multiplicative", ok(s.multiplicativity_defect(&a, &tt))?.is_none());
                let nabla = ok(Connection::from_decision(&a, &r))?;
                let p = ok(connection_projector(&nabla, g.max_degree))?;
                t.check(&format!("projector_to_degree_{}", g.max_degree), p.passed());
            }
            Ok(t)
        }
        Command::Lift { algebra, mode, element } => {
            let a = checked_algebra(&algebra.algebra)?;
            let x = lib("--element", parse_element(&a, element))?;
            let mut t = Table::new("lift", &["quantity", "value"]);
            match mode {
                Mode::Idempotent => {
                    let lift = ok(lift_idempotent(&a, &x, g.k))?;
                    let r = ok(idempotent_residual(&a, &lift, g.k))?;
                    t.row(vec!["lift".to_string(), lift.display(&a)]);
                    t.row(vec!["residual".to_string(), r.display(&a)]);
                    t.passed = r.is_zero();
                }
                Mode::Invertible => {
                    let y = ok(inverse_minus_one(&a, &x))?;
                    let (ha, hb) = ok(lift_invertible(&a, &x, &y, g.k))?;
                    let (r1, r2) = ok(invertible_residuals(&a, &ha, &hb, g.k))?;
                    t.row(vec!["lift".to_string(), ha.display(&a)]);
                    t.row(vec!["inverse_lift".to_string(), hb.display(&a)]);
                    t.row(vec!["residual".to_string(), r1.display(&a)]);
                    t.row(vec!["residual_reversed".to_string(), r2.display(&a)]);
                    t.passed = r1.is_zero() && r2.is_zero();
                }
            }
            Ok(t)
        }
        Command::Chern { fredholm, element, parity } => chern(cli, fredholm, element, *parity),
        Command::Excision { extension } => {
            let ext = lib(extension, parse_extension(&read(extension)?))?;
            let n = g.max_degree;
            let r = ok(six_term_check(&ext, n, g.size_cap))?;
            let mut t = Table::new("excision", &["degree", "relative", "absolute", "quotient", "connecting_rank_into"]);
            for k in 0..=n {
                t.row(vec![
                    k.to_string(),
                    r.relative[k].to_string(),
                    r.absolute[k].to_string(),
                    r.quotient[k].to_string(),
                    r.connecting_ranks[k].to_string(),
                ]);
            }
            let c = ok(connecting_map(&ext, n + 1, None, g.size_cap))?;
            let checks = [
                ("consistent", r.consistent),
                ("exact", r.sequence.exact()),
                ("lands_in_kernel", c.lands_in_kernel),
                ("double_commutator_vanishes", c.double_commutator_vanishes),
                ("ranks_match_pair", c.ranks_match_pair),
            ];
            t.passed = checks.iter().all(|(_, v)| *v);
            let parts: Vec<String> = checks.iter().map(|(k, v)| format!("{k} {}", verdict(*v))).collect();
            t.summary = Some(parts.join(", "));
            Ok(t)
        }
        Command::Homotopy { homotopy } => {
            let h = lib(homotopy, parse_homotopy(&read(homotopy)?))?;
            let decision = ok(quasi_free_check(&h.source))?;
            if !decision.feasible {
                return Err(format!("{homotopy}: the source algebra is not quasi-free, so no connection exists"));
            }
            let nabla = ok(Connection::from_decision(&h.source, &decision))?;
            let r = ok(homotopy_check(&h, &nabla, g.size_cap))?;
            let mut t = Table::new("homotopy", &["check", "result"]);
            t.check("degree_zero", r.degree_zero);
            t.check("on_generators", r.on_generators);
            t.check("eta_well_defined", r.eta_well_defined);
            t.check("homotopy_formula", r.homotopy_formula);
            Ok(t)
        }
    }
}

fn homology_table(name: &str, r: &HomologyReport) -> Table {
    let mut t = Table::new(name, &["degree", "dim"]);
    for d in &r.degrees {
        t.row(vec![d.degree.to_string(), d.homology.to_string()]);
    }
    t
}

fn validate(algebra: Option<&str>, extension: Option<&str>, fredholm: Option<&str>, homotopy: Option<&str>) -> Outcome {
    if algebra.is_none() && extension.is_none() && fredholm.is_none() && homotopy.is_none() {
        return Err("validate needs at least one of --algebra, --extension, --fredholm, --homotopy".to_string());
    }
    let mut t = Table::new("validate", &["input", "result"]);
    if let Some(spec) = algebra {
        let a = load_algebra(spec)?;
        let diag = validate_algebra(&a);
        t.passed &= diag.passed();
        t.row(vec![spec.to_string(), if diag.passed() { verdict(true) } else { diag.to_string() }]);
    }
    if let Some(path) = extension {
        lib(path, parse_extension(&read(path)?))?;
        t.check(path, true);
    }
    if let Some(path) = fredholm {
        lib(path, parse_fredholm(&read(path)?))?;
        t.check(path, true);
    }
    if let Some(path) = homotopy {
        lib(path, parse_homotopy(&read(path)?))?;
        t.check(path, true);
    }
    Ok(t)
}

fn chern(cli: &Cli, path: &str, element: &str, parity: ParityArg) -> Outcome {
    let g = &cli.global;
    let fd = lib(path, parse_fredholm(&read(path)?))?;
    let wanted = match parity {
        ParityArg::Even => Parity::Even,
        ParityArg::Odd => Parity::Odd,
    };
    if fd.parity() != wanted {
        return Err(
            Error::Parity(format!("--parity {wanted} but {path} holds {} Fredholm data", fd.parity())).to_string()
        );
    }
    let a = fd.algebra();
    let x = lib("--element", parse_element(a, element))?;
    let (z, max_level) = match wanted {
        Parity::Even => (ok(ch_even(a, &x, g.k))?, 2 * g.k - 2),
        Parity::Odd => (ok(ch_odd(a, &x, g.k))?, 2 * g.k - 1),
    };
    let mut t = Table::new("chern", &["quantity", "value"]);
    t.check("ch_is_cycle", ok(cycle_defect(a, &z, g.k))?.is_zero());
    let values = ok(pairing_levels(&fd, &z, g.k, max_level))?;
    for (level, v) in &values {
        t.row(vec![format!("pairing_tau_{level}"), v.to_string()]);
    }
    t.check("pairing_level_independent", values.windows(2).all(|w| w[0].1 == w[1].1));
    for (level, _) in &values {
        if *level <= g.max_degree {
            let r = ok(closedness_check(&ok(tau(&fd, *level))?))?;
            t.check(&format!("tau_{level}_closed"), r.passed());
        }
    }
    let transgressions: Vec<usize> = match wanted {
        Parity::Even => (0..).take_while(|n| 2 * n + 2 <= g.max_degree).collect(),
        Parity::Odd => (1..).take_while(|n| 2 * n < g.max_degree).collect(),
    };
    for n in transgressions {
        let r = ok(transgression_check(&fd, n))?;
        t.check(&format!("transgression_h_{}", r.h_level), r.passed());
    }
    Ok(t)
}
