//! The operator-identity suite: every algebraic identity between `d, b, b',
//! κ, B`, the form and Fedosov products, the X-complex boundaries and the
//! spectral operators, checked as exact equalities on basis monomials and on
//! seeded random forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::BasedAlgebra;
use crate::error::Result;
use crate::forms::{
    b, bprime, connes_b, d, fedosov, form_mul, kappa, kappa_pow, random_form_within, window_safe_monomials, FormVector,
};
use crate::scalar::Scalar;
use crate::xcomplex::{
    delta_boundary, partial_boundary, rescale_cn, rescale_cn_inv, spectral_f, spectral_h, spectral_p, Poly,
};

type Defect = fn(&BasedAlgebra, &FormVector, usize) -> Result<FormVector>;
type Op<'a> = &'a dyn Fn(&FormVector) -> Result<FormVector>;

/// An identity `defect(ω) = 0` for homogeneous `ω` of degree at least
/// `min_degree`.
struct Unary {
    label: &'static str,
    min_degree: usize,
    defect: Defect,
}

fn kp(a: &BasedAlgebra, w: &FormVector, k: usize) -> Result<FormVector> {
    kappa_pow(a, w, k)
}

fn big_b_plus_b(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    Ok(connes_b(w).plus(&b(a, w)?))
}

fn kappa_ii(a: &BasedAlgebra, w: &FormVector, n: usize) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        for j in 0..=n {
            let lhs = kp(a, &FormVector::monomial(m.clone()), j)?;
            let moved: Vec<usize> = m.tail[n - j..].to_vec();
            let mut front = FormVector::unit();
            for &t in &moved {
                front = form_mul(a, &front, &d(&FormVector::from_element(&a.basis_element(t))))?;
            }
            let rest = FormVector::monomial(crate::forms::Monomial::new(m.lead, m.tail[..n - j].to_vec()));
            let rhs = form_mul(a, &front, &rest)?.scale(&Scalar::sign(j * (n + 1)));
            out.add_scaled(&lhs.minus(&rhs), c);
        }
    }
    Ok(out)
}

fn unary_identities() -> Vec<Unary> {
    vec![
        Unary { label: "d_squared", min_degree: 0, defect: |_, w, _| Ok(d(&d(w))) },
        Unary { label: "b_squared", min_degree: 0, defect: |a, w, _| b(a, &b(a, w)?) },
        Unary { label: "bprime_squared", min_degree: 2, defect: |a, w, _| bprime(a, &bprime(a, w)?) },
        Unary { label: "B_squared", min_degree: 0, defect: |_, w, _| Ok(connes_b(&connes_b(w))) },
        Unary { label: "Bd_zero", min_degree: 0, defect: |_, w, _| Ok(connes_b(&d(w))) },
        Unary { label: "dB_zero", min_degree: 0, defect: |_, w, _| Ok(d(&connes_b(w))) },
        Unary {
            label: "kappa_i",
            min_degree: 0,
            defect: |a, w, _| Ok(b(a, &d(w))?.plus(&d(&b(a, w)?)).minus(w).plus(&kappa(a, w)?)),
        },
        Unary { label: "kappa_ii", min_degree: 0, defect: kappa_ii },
        Unary {
            label: "kappa_b_commute",
            min_degree: 0,
            defect: |a, w, _| Ok(kappa(a, &b(a, w)?)?.minus(&b(a, &kappa(a, w)?)?)),
        },
        Unary {
            label: "kappa_d_commute",
            min_degree: 0,
            defect: |a, w, _| Ok(kappa(a, &d(w))?.minus(&d(&kappa(a, w)?))),
        },
        Unary {
            label: "kappa_iii",
            min_degree: 0,
            defect: |a, w, n| Ok(kp(a, w, n)?.minus(w).minus(&b(a, &kp(a, &d(w), n)?)?)),
        },
        Unary { label: "kappa_iv", min_degree: 0, defect: |a, w, n| Ok(kp(a, &d(w), n + 1)?.minus(&d(w))) },
        Unary { label: "kappa_v", min_degree: 0, defect: |a, w, n| Ok(kp(a, w, n + 1)?.minus(w).plus(&d(&b(a, w)?))) },
        Unary { label: "kappa_vi", min_degree: 0, defect: |a, w, n| Ok(kp(a, &b(a, w)?, n)?.minus(&b(a, w)?)) },
        Unary {
            label: "kappa_vii",
            min_degree: 0,
            defect: |a, w, n| {
                let x = kp(a, w, n + 1)?.minus(w);
                Ok(kp(a, &x, n)?.minus(&x))
            },
        },
        Unary {
            label: "kappa_viii",
            min_degree: 0,
            defect: |a, w, n| {
                let lhs = kp(a, w, n * (n + 1))?.minus(w);
                let bb = b(a, &connes_b(w))?;
                let bb2 = connes_b(&b(a, w)?);
                Ok(lhs.minus(&bb).plus(&lhs.plus(&bb2)))
            },
        },
        Unary {
            label: "kappa_ix",
            min_degree: 0,
            defect: |a, w, n| {
                let dw = d(w);
                let mut sum = FormVector::zero();
                let mut t = dw;
                for _ in 0..=n {
                    sum.add_assign(&t);
                    t = kappa(a, &t)?;
                }
                Ok(connes_b(w).minus(&sum))
            },
        },
        Unary { label: "Bb_bicomplex", min_degree: 0, defect: |a, w, _| big_b_plus_b(a, &big_b_plus_b(a, w)?) },
        Unary {
            label: "partial_squared",
            min_degree: 0,
            defect: |a, w, _| partial_boundary(a, &partial_boundary(a, w)?),
        },
        Unary { label: "delta_squared", min_degree: 0, defect: |a, w, _| delta_boundary(a, &delta_boundary(a, w)?) },
        Unary {
            label: "delta_rescaled",
            min_degree: 0,
            defect: |a, w, _| Ok(rescale_cn_inv(&big_b_plus_b(a, &rescale_cn(w))?).minus(&delta_boundary(a, w)?)),
        },
        Unary {
            label: "delta_homotopy",
            min_degree: 0,
            defect: |a, w, _| {
                let h = |x: &FormVector| rescale_cn_inv(&d(&rescale_cn(x)));
                let lhs = delta_boundary(a, &h(w))?.plus(&h(&delta_boundary(a, w)?));
                Ok(lhs.minus(w).plus(&kappa(a, w)?))
            },
        },
        Unary {
            label: "partial_odd_squared",
            min_degree: 0,
            defect: |a, w, _| {
                let op = |x: &FormVector| -> Result<FormVector> {
                    let dx = d(x);
                    Ok(b(a, x)?.minus(&dx).minus(&kappa(a, &dx)?))
                };
                Ok(op(&op(w)?)?.minus(&kp(a, w, 2)?).plus(w))
            },
        },
        Unary {
            label: "partial_equals_delta_on_P",
            min_degree: 0,
            defect: |a, w, _| {
                let p = spectral_p(a, w)?;
                Ok(partial_boundary(a, &p)?.minus(&delta_boundary(a, &p)?))
            },
        },
        Unary {
            label: "P_idempotent",
            min_degree: 0,
            defect: |a, w, _| {
                let p = spectral_p(a, w)?;
                Ok(spectral_p(a, &p)?.minus(&p))
            },
        },
        Unary { label: "PH_zero", min_degree: 0, defect: |a, w, _| spectral_p(a, &spectral_h(a, w)?) },
        Unary { label: "HP_zero", min_degree: 0, defect: |a, w, _| spectral_h(a, &spectral_p(a, w)?) },
        Unary {
            label: "H_inverts_one_minus_kappa_sq",
            min_degree: 0,
            defect: |a, w, _| {
                let one_minus = |x: &FormVector| -> Result<FormVector> { Ok(x.minus(&kp(a, x, 2)?)) };
                let target = w.minus(&spectral_p(a, w)?);
                let left = spectral_h(a, &one_minus(w)?)?.minus(&target);
                let right = one_minus(&spectral_h(a, w)?)?.minus(&target);
                Ok(left.plus(&right.scale(&Scalar::i())))
            },
        },
        Unary {
            label: "P_commutes",
            min_degree: 0,
            defect: |a, w, _| {
                let p = |x: &FormVector| spectral_p(a, x);
                let mut out = FormVector::zero();
                let ops: [Op; 4] = [&|x| b(a, x), &|x| Ok(d(x)), &|x| Ok(connes_b(x)), &|x| partial_boundary(a, x)];
                for (k, op) in ops.iter().enumerate() {
                    let c = op(&p(w)?)?.minus(&p(&op(w)?)?);
                    out.add_scaled(&c, &Scalar::int(k as i64 + 1));
                }
                Ok(out)
            },
        },
    ]
}

type Product = fn(&BasedAlgebra, &[FormVector]) -> Result<FormVector>;

struct ProductIdentity {
    label: &'static str,
    arity: usize,
    defect: Product,
}

fn product_identities() -> Vec<ProductIdentity> {
    vec![
        ProductIdentity {
            label: "form_mul_assoc",
            arity: 3,
            defect: |a, v| {
                let l = form_mul(a, &form_mul(a, &v[0], &v[1])?, &v[2])?;
                Ok(l.minus(&form_mul(a, &v[0], &form_mul(a, &v[1], &v[2])?)?))
            },
        },
        ProductIdentity {
            label: "d_graded_derivation",
            arity: 2,
            defect: |a, v| {
                let n = v[0].max_degree().unwrap_or(0);
                let lhs = d(&form_mul(a, &v[0], &v[1])?);
                let rhs = form_mul(a, &d(&v[0]), &v[1])?.plus(&form_mul(a, &v[0], &d(&v[1]))?.scale(&Scalar::sign(n)));
                Ok(lhs.minus(&rhs))
            },
        },
        ProductIdentity {
            label: "fedosov_assoc",
            arity: 3,
            defect: |a, v| {
                let l = fedosov(a, &fedosov(a, &v[0], &v[1])?, &v[2])?;
                Ok(l.minus(&fedosov(a, &v[0], &fedosov(a, &v[1], &v[2])?)?))
            },
        },
        ProductIdentity {
            label: "fedosov_raises_degree",
            arity: 2,
            defect: |a, v| {
                let diff = fedosov(a, &v[0], &v[1])?.minus(&form_mul(a, &v[0], &v[1])?);
                let floor = v[0].max_degree().unwrap_or(0) + v[1].max_degree().unwrap_or(0);
                Ok(diff.filter(|m| m.degree() <= floor))
            },
        },
    ]
}

/// Scale of the suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    /// Largest degree of random inputs.
    pub max_degree: usize,
    /// Largest degree of exhaustive basis-monomial inputs.
    pub exhaustive_degree: usize,
    /// Random inputs per identity.
    pub random_count: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig { max_degree: 6, exhaustive_degree: 4, random_count: 100, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub label: String,
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub results: Vec<IdentityResult>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.failures > 0).count()
    }

    pub fn checks(&self) -> usize {
        self.results.iter().map(|r| r.checks).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn failed_labels(&self) -> Vec<&str> {
        self.results.iter().filter(|r| r.failures > 0).map(|r| r.label.as_str()).collect()
    }

    pub fn summary(&self) -> String {
        format!("{} identities, {} failures", self.results.len(), self.failures())
    }
}

/// Labels in suite order.
pub fn identity_labels() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = unary_identities().iter().map(|u| u.label).collect();
    v.extend(product_identities().iter().map(|p| p.label));
    v.push("f1_coefficients");
    v
}

struct Tally {
    checks: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally { checks: 0, failures: 0, first: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self, label: &str) -> IdentityResult {
        IdentityResult {
            label: label.to_string(),
            checks: self.checks,
            failures: self.failures,
            first_failure: self.first,
        }
    }
}

fn random_degree(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.gen_range(0..=max)
}

/// Runs every identity on `a`. Windowed algebras draw only inputs whose
/// products stay inside the window.
pub fn run_identity_suite(a: &BasedAlgebra, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let bound = a.window_bound().unwrap_or(i64::MAX);
    let mut exhaustive: Vec<(usize, Vec<FormVector>)> = Vec::new();
    if a.dim() > 0 {
        for n in 0..=cfg.exhaustive_degree.min(cfg.max_degree) {
            exhaustive.push((n, window_safe_monomials(a, n).into_iter().map(FormVector::monomial).collect()));
        }
    }
    for (k, id) in unary_identities().into_iter().enumerate() {
        let mut tally = Tally::new();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
        let run = |w: &FormVector, n: usize, tally: &mut Tally| -> Result<()> {
            let r = (id.defect)(a, w, n)?;
            tally.record(r.is_zero(), || format!("{}: nonzero defect on {}", id.label, w.display(a)));
            Ok(())
        };
        for (n, inputs) in &exhaustive {
            if *n >= id.min_degree {
                for w in inputs {
                    run(w, *n, &mut tally)?;
                }
            }
        }
        if a.dim() > 0 && cfg.max_degree >= id.min_degree {
            for _ in 0..cfg.random_count {
                let n = id.min_degree + random_degree(&mut rng, cfg.max_degree - id.min_degree);
                let w = random_form_within(a, n, 3, bound, &mut rng);
                run(&w, n, &mut tally)?;
            }
        }
        results.push(tally.finish(id.label));
    }
    for (k, id) in product_identities().into_iter().enumerate() {
        let mut tally = Tally::new();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + k as u64));
        if a.dim() > 0 {
            let share = if bound == i64::MAX { bound } else { bound / id.arity as i64 };
            let low: Vec<FormVector> = (0..=1usize.min(cfg.max_degree))
                .flat_map(|n| window_safe_monomials(a, n))
                .filter(|m| {
                    a.window().is_none_or(|w| {
                        m.lead.map_or(0, |l| w[l].abs()) + m.tail.iter().map(|&t| w[t].abs()).sum::<i64>() <= share
                    })
                })
                .map(FormVector::monomial)
                .collect();
            let mut tuples: Vec<Vec<FormVector>> = vec![Vec::new()];
            for _ in 0..id.arity {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        low.iter().map(move |x| {
                            let mut t = t.clone();
                            t.push(x.clone());
                            t
                        })
                    })
                    .filter(|t| t.iter().map(|x| x.max_degree().unwrap_or(0)).sum::<usize>() <= 2)
                    .collect();
            }
            let per = (cfg.max_degree / id.arity).max(1);
            for _ in 0..cfg.random_count {
                tuples.push(
                    (0..id.arity)
                        .map(|_| {
                            let n = random_degree(&mut rng, per);
                            random_form_within(a, n, 2, share, &mut rng)
                        })
                        .collect(),
                );
            }
            for t in &tuples {
                let r = (id.defect)(a, t)?;
                tally.record(r.is_zero(), || {
                    let args: Vec<String> = t.iter().map(|x| x.display(a)).collect();
                    format!("{}: nonzero defect on ({})", id.label, args.join(", "))
                });
            }
        }
        results.push(tally.finish(id.label));
    }
    let mut tally = Tally::new();
    let quarter = |k: i64| Scalar::ratio(k, 4);
    let f1 = spectral_f(1);
    tally.record(f1 == Poly(vec![quarter(3), quarter(2), quarter(-1)]), || format!("f1_coefficients: {f1:?}"));
    results.push(tally.finish("f1_coefficients"));
    Ok(SuiteReport { results })
}
