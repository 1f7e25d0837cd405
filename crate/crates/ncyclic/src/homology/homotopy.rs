//! Polynomial homotopies `Φ_t = Σ tᵏ Mₖ: A → B`, the operator
//! `η(ã₀da₁…daⱼ) = ∫₀¹ Φ_t(ã₀) Φ'_t(a₁) dΦ_t(a₂)…dΦ_t(aⱼ) dt` and the
//! homotopy formula `X(Φ₀) − X(Φ₁) = −[∂, η∘∇*]` on `X(A)`.

use serde::Serialize;

use super::hodge::{hodge_tower, HodgeTower};
use super::quasifree::{nabla_star, Connection};
use crate::algebra::{BasedAlgebra, LinearMapT};
use crate::error::{Error, Result};
use crate::forms::{b, connes_b, d, form_mul, pushforward, DegreeBasis, FormVector};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PolynomialHomotopy {
    pub source: BasedAlgebra,
    pub target: BasedAlgebra,
    /// `coeffs[k]` is the coefficient of `tᵏ`.
    pub coeffs: Vec<LinearMapT>,
}

impl PolynomialHomotopy {
    /// Validates that `Φ` is multiplicative over `B[t]`.
    pub fn new(source: &BasedAlgebra, target: &BasedAlgebra, coeffs: Vec<LinearMapT>) -> Result<PolynomialHomotopy> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a homotopy needs at least one coefficient"));
        }
        for m in &coeffs {
            if m.domain() != source.dim() || m.codomain() != target.dim() {
                return Err(Error::invalid("homotopy coefficient has the wrong shape"));
            }
        }
        let h = PolynomialHomotopy { source: source.clone(), target: target.clone(), coeffs };
        let deg = h.coeffs.len() - 1;
        for i in 0..source.dim() {
            for j in 0..source.dim() {
                let prod = source.basis_product(i, j)?;
                let lhs: Vec<SparseVec> = h.coeffs.iter().map(|m| m.apply(prod)).collect();
                for k in 0..=2 * deg {
                    let mut rhs = SparseVec::new();
                    for k1 in k.saturating_sub(deg)..=k.min(deg) {
                        rhs = rhs.add(&target.multiply(h.coeffs[k1].image(i), h.coeffs[k - k1].image(j))?);
                    }
                    let l = lhs.get(k).cloned().unwrap_or_default();
                    if l != rhs {
                        return Err(Error::invalid(format!(
                            "homotopy is not multiplicative at ({}, {}) in the coefficient of t^{k}",
                            source.label(i),
                            source.label(j)
                        )));
                    }
                }
            }
        }
        Ok(h)
    }

    /// The constant homotopy at a homomorphism.
    pub fn constant(source: &BasedAlgebra, target: &BasedAlgebra, f: LinearMapT) -> Result<PolynomialHomotopy> {
        PolynomialHomotopy::new(source, target, vec![f])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: &Scalar) -> LinearMapT {
        let mut acc = self.coeffs[self.degree()].matrix.clone();
        for m in self.coeffs.iter().rev().skip(1) {
            acc = acc.scale(t).add(&m.matrix);
        }
        LinearMapT::from_matrix(acc)
    }

    /// Coefficients of `Φ'_t`.
    pub fn derivative(&self) -> Vec<LinearMapT> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, m)| LinearMapT::from_matrix(m.matrix.scale(&Scalar::int(k as i64))))
            .collect()
    }

    fn element_poly(maps: &[LinearMapT], x: usize) -> Vec<FormVector> {
        maps.iter().map(|m| FormVector::from_element(m.image(x))).collect()
    }

    /// `η` on a form; zero on `Ω⁰`, lowers degree by one.
    pub fn eta(&self, w: &FormVector) -> Result<FormVector> {
        let bt = &self.target;
        let deriv = self.derivative();
        let mut out = FormVector::zero();
        for (m, c) in w.iter() {
            let Some(&first) = m.tail.first() else { continue };
            let mut poly: Vec<FormVector> = match m.lead {
                None => vec![FormVector::unit()],
                Some(l) => Self::element_poly(&self.coeffs, l),
            };
            poly = poly_mul(bt, &poly, &Self::element_poly(&deriv, first))?;
            for &a in &m.tail[1..] {
                let dpoly: Vec<FormVector> = Self::element_poly(&self.coeffs, a).iter().map(d).collect();
                poly = poly_mul(bt, &poly, &dpoly)?;
            }
            for (k, f) in poly.iter().enumerate() {
                out.add_scaled(f, &(c * &Scalar::ratio(1, k as i64 + 1)));
            }
        }
        Ok(out)
    }
}

fn poly_mul(a: &BasedAlgebra, x: &[FormVector], y: &[FormVector]) -> Result<Vec<FormVector>> {
    if x.is_empty() || y.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![FormVector::zero(); x.len() + y.len() - 1];
    for (i, u) in x.iter().enumerate() {
        for (j, v) in y.iter().enumerate() {
            out[i + j].add_assign(&form_mul(a, u, v)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomotopyReport {
    /// `[∂, η](a) = Φ₁(a) − Φ₀(a)` on `Ω⁰`.
    pub degree_zero: bool,
    /// `[∂, η] = X(Φ₁)∘ξ₂ − X(Φ₀)∘ξ₂` on every monomial of `Ω⁰, Ω¹, Ω²`.
    pub on_generators: bool,
    /// `η` maps `b(Ω³A)` into `b(Ω²B)`, so it is defined on `𝒳₂(A)`.
    pub eta_well_defined: bool,
    /// `X(Φ₀) − X(Φ₁) = −[∂, η∘∇*]` on `X(A)`.
    pub homotopy_formula: bool,
}

impl HomotopyReport {
    pub fn passed(&self) -> bool {
        self.degree_zero && self.on_generators && self.eta_well_defined && self.homotopy_formula
    }
}

/// `X(f)` as parity-indexed matrices `X(A) → X(B)`.
fn x_map(f: &LinearMapT, xa: &HodgeTower, xb: &HodgeTower) -> Result<[SparseMatrix; 2]> {
    let m = |p: usize| -> Result<SparseMatrix> {
        let cols = (0..xa.complex.dims[p])
            .map(|i| xb.project(&pushforward(f, &xa.lift(p, &SparseVec::unit(i))), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(xb.complex.dims[p], cols))
    };
    Ok([m(0)?, m(1)?])
}

/// Verifies the homotopy identities for `Φ`, using the connection `∇` on the
/// (quasi-free) source.
pub fn homotopy_check(h: &PolynomialHomotopy, nabla: &Connection, size_cap: usize) -> Result<HomotopyReport> {
    let (a, bt) = (&h.source, &h.target);
    if nabla.algebra.dim() != a.dim() {
        return Err(Error::invalid("connection lives on a different algebra"));
    }
    let (phi0, phi1) = (h.eval(&Scalar::ZERO), h.eval(&Scalar::ONE));
    let xb = hodge_tower(bt, 1, size_cap)?;
    let xa = hodge_tower(a, 1, size_cap)?;

    let mut degree_zero = true;
    for x in 0..a.dim() {
        let lhs = h.eta(&d(&FormVector::from_element(&a.basis_element(x))))?;
        let rhs = FormVector::from_element(&phi1.apply(&a.basis_element(x)).sub(&phi0.apply(&a.basis_element(x))));
        degree_zero &= lhs == rhs;
    }

    // ∂ on 𝒳₂(A): b + B with B into Ω³ dropped; on X(B): d and b
    let partial2 = |w: &FormVector| -> Result<FormVector> { Ok(b(a, w)?.plus(&connes_b(w)).truncate(2)) };
    let partial_x = |w: &FormVector| -> Result<FormVector> { Ok(b(bt, &w.component(1))?.plus(&d(&w.component(0)))) };
    let mut on_generators = true;
    for j in 0..=2 {
        for m in DegreeBasis::new(a.dim(), j).monomials() {
            let w = FormVector::monomial(m);
            let lhs = partial_x(&h.eta(&w)?)?.plus(&h.eta(&partial2(&w)?)?);
            let xi = w.truncate(1);
            let rhs = pushforward(&phi1, &xi).minus(&pushforward(&phi0, &xi));
            let diff = lhs.minus(&rhs);
            on_generators &= xb.project(&diff, 0)?.is_zero() && xb.project(&diff, 1)?.is_zero();
        }
    }

    let mut eta_well_defined = true;
    for m in DegreeBasis::new(a.dim(), 3).monomials() {
        let w = b(a, &FormVector::monomial(m))?;
        eta_well_defined &= xb.project(&h.eta(&w)?, 1)?.is_zero();
    }

    let ns = nabla_star(nabla, size_cap)?;
    let t2 = &ns.target;
    // h = η∘∇*: X(A)_p → X(B)_{1−p}
    let hmat = |p: usize| -> Result<SparseMatrix> {
        let cols = (0..xa.complex.dims[p])
            .map(|i| {
                let w = t2.lift(p, &ns.maps[p].apply(&SparseVec::unit(i)));
                xb.project(&h.eta(&w)?, 1 - p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(xb.complex.dims[1 - p], cols))
    };
    let hm = [hmat(0)?, hmat(1)?];
    let x0 = x_map(&phi0, &xa, &xb)?;
    let x1 = x_map(&phi1, &xa, &xb)?;
    let homotopy_formula = (0..2).all(|p| {
        let comm = xb.complex.boundary[1 - p].compose(&hm[p]).add(&hm[1 - p].compose(&xa.complex.boundary[p]));
        x0[p].sub(&x1[p]) == comm.scale(&-Scalar::ONE)
    });
    Ok(HomotopyReport { degree_zero, on_generators, eta_well_defined, homotopy_formula })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{field, matrix_algebra, upper_triangular};
    use crate::homology::quasifree::quasi_free_check;
    use crate::homology::DEFAULT_SIZE_CAP;

    fn idempotent_path() -> PolynomialHomotopy {
        // Φ_t(e) = E11 + t E12 in M₂
        let (q, m2) = (field(), matrix_algebra(2));
        let m0 = LinearMapT::new(1, 4, vec![SparseVec::unit(0)]).unwrap();
        let m1 = LinearMapT::new(1, 4, vec![SparseVec::unit(1)]).unwrap();
        PolynomialHomotopy::new(&q, &m2, vec![m0, m1]).unwrap()
    }

    fn field_connection() -> Connection {
        let q = field();
        Connection::from_decision(&q, &quasi_free_check(&q).unwrap()).unwrap()
    }

    #[test]
    fn idempotent_path_satisfies_homotopy_formula() {
        let r = homotopy_check(&idempotent_path(), &field_connection(), DEFAULT_SIZE_CAP).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn eta_on_exact_degree_one() {
        let h = idempotent_path();
        let q = field();
        let w = d(&FormVector::from_element(&q.basis_element(0)));
        assert_eq!(h.eta(&w).unwrap(), FormVector::from_element(&SparseVec::unit(1)));
    }

    #[test]
    fn constant_homotopy_has_zero_eta() {
        let (q, m2) = (field(), matrix_algebra(2));
        let f = LinearMapT::new(1, 4, vec![SparseVec::unit(0)]).unwrap();
        let h = PolynomialHomotopy::constant(&q, &m2, f).unwrap();
        for j in 0..=3 {
            for m in DegreeBasis::new(1, j).monomials() {
                assert!(h.eta(&FormVector::monomial(m)).unwrap().is_zero());
            }
        }
        assert!(homotopy_check(&h, &field_connection(), DEFAULT_SIZE_CAP).unwrap().passed());
    }

    #[test]
    fn rejects_non_multiplicative_path() {
        // Φ_t(e) = E11 + t E21 + t E12 is not idempotent
        let (q, m2) = (field(), matrix_algebra(2));
        let m0 = LinearMapT::new(1, 4, vec![SparseVec::unit(0)]).unwrap();
        let m1 = LinearMapT::new(1, 4, vec![SparseVec::from_entries([(1, Scalar::ONE), (2, Scalar::ONE)])]).unwrap();
        let err = PolynomialHomotopy::new(&q, &m2, vec![m0, m1]).unwrap_err().to_string();
        assert!(err.contains("not multiplicative"), "{err}");
    }

    #[test]
    fn conjugation_path_on_upper_triangular() {
        // Φ_t = Ad(1 + tE12) on upper triangular 2×2 matrices, degree 2 in t
        let a = upper_triangular(2); // E11, E12, E22
        let i = LinearMapT::identity(3);
        // (1+tE12) x (1−tE12): E11 ↦ E11 − tE12, E12 ↦ E12, E22 ↦ E22 + tE12
        let m1 = LinearMapT::new(
            3,
            3,
            vec![SparseVec::from_entries([(1, -Scalar::ONE)]), SparseVec::new(), SparseVec::unit(1)],
        )
        .unwrap();
        let h = PolynomialHomotopy::new(&a, &a, vec![i, m1]).unwrap();
        let nabla = Connection::from_decision(&a, &quasi_free_check(&a).unwrap()).unwrap();
        assert!(homotopy_check(&h, &nabla, DEFAULT_SIZE_CAP).unwrap().passed());
    }
}
