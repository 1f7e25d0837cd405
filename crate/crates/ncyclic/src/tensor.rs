//! Truncated tensor algebras `T A/(J A)ᵏ`, realized as even forms of degree
//! `< 2k` under the cut-off Fedosov product.

use crate::algebra::{AlgebraElement, BasedAlgebra, LinearMapT};
use crate::error::{Error, Result};
use crate::forms::{d_elem, fedosov_truncated, form_mul, DegreeBasis, FormVector, Monomial};
use crate::linalg::SparseVec;
use crate::scalar::Scalar;

/// Default refusal bound for the dimension of a tabulated truncation.
pub const DEFAULT_SIZE_CAP: usize = 512;

/// `T A/(J A)ᵏ` with its multiplication table.
#[derive(Clone, Debug)]
pub struct TruncatedTensorAlgebra {
    base: BasedAlgebra,
    order: usize,
    algebra: BasedAlgebra,
    offsets: Vec<usize>,
}

/// Dimension of `T A/(J A)ᵏ` for `dim A = n`.
pub fn truncated_dim(n: usize, k: usize) -> usize {
    (0..k).map(|j| DegreeBasis::new(n, 2 * j).len()).sum()
}

/// Tabulates `T A/(J A)ᵏ`, refusing dimensions above `cap`.
pub fn truncated_tensor_algebra(a: &BasedAlgebra, k: usize, cap: usize) -> Result<TruncatedTensorAlgebra> {
    if k == 0 {
        return Err(Error::invalid("truncation order must be at least 1"));
    }
    let dim = truncated_dim(a.dim(), k);
    if dim > cap {
        return Err(Error::SizeCap { what: format!("T A/(J A)^{k}"), dim, cap });
    }
    let mut offsets = Vec::with_capacity(k);
    let mut acc = 0;
    for j in 0..k {
        offsets.push(acc);
        acc += DegreeBasis::new(a.dim(), 2 * j).len();
    }
    let mut shell = TruncatedTensorAlgebra { base: a.clone(), order: k, algebra: a.clone(), offsets };
    let monos: Vec<Monomial> = (0..dim).map(|i| shell.monomial(i)).collect();
    let labels = monos.iter().map(|m| FormVector::monomial(m.clone()).display(a)).collect();
    let mut entries = Vec::new();
    for (i, x) in monos.iter().enumerate() {
        let fx = FormVector::monomial(x.clone());
        for (j, y) in monos.iter().enumerate() {
            let p = fedosov_truncated(a, &fx, &FormVector::monomial(y.clone()), 2 * k)?;
            if !p.is_zero() {
                entries.push((i, j, shell.coords(&p)?));
            }
        }
    }
    shell.algebra = BasedAlgebra::new(labels, entries, None, None)?;
    Ok(shell)
}

impl TruncatedTensorAlgebra {
    pub fn base(&self) -> &BasedAlgebra {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The truncation as a based algebra.
    pub fn algebra(&self) -> &BasedAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        truncated_dim(self.base.dim(), self.order)
    }

    /// The basis monomial with index `i`.
    pub fn monomial(&self, i: usize) -> Monomial {
        let j = self.offsets.iter().rposition(|&o| o <= i).expect("offsets start at 0");
        DegreeBasis::new(self.base.dim(), 2 * j).monomial(i - self.offsets[j])
    }

    /// Coordinates of an even form; components of degree `≥ 2k` are dropped.
    pub fn coords(&self, w: &FormVector) -> Result<SparseVec> {
        let mut out = Vec::new();
        for (m, c) in w.iter() {
            let n = m.degree();
            if n >= 2 * self.order {
                continue;
            }
            if n % 2 == 1 {
                return Err(Error::invalid("odd form is not in the tensor algebra"));
            }
            if n == 0 && m.lead.is_none() {
                return Err(Error::invalid("the formal unit is not in the tensor algebra"));
            }
            let idx = self.offsets[n / 2] + DegreeBasis::new(self.base.dim(), n).index(m);
            out.push((idx, c.clone()));
        }
        Ok(SparseVec::from_entries(out))
    }

    pub fn form(&self, v: &SparseVec) -> FormVector {
        let mut out = FormVector::zero();
        for (i, c) in v.iter() {
            out.add_term(self.monomial(*i), c);
        }
        out
    }

    /// `σ`: the degree-zero inclusion.
    pub fn sigma(&self, x: &AlgebraElement) -> SparseVec {
        x.clone()
    }

    /// `τ`: the degree-zero component.
    pub fn tau(&self, v: &SparseVec) -> AlgebraElement {
        SparseVec::from_entries(v.iter().filter(|(i, _)| *i < self.base.dim()).cloned())
    }

    /// `τ` as a linear map.
    pub fn tau_map(&self) -> LinearMapT {
        let n = self.base.dim();
        let images = (0..self.dim()).map(|i| if i < n { SparseVec::unit(i) } else { SparseVec::new() }).collect();
        LinearMapT::new(self.dim(), n, images).expect("shape")
    }
}

/// A linear map with its tabulated curvature `ω(a₁,a₂) = l(a₁a₂) − l(a₁)l(a₂)`.
#[derive(Clone, Debug)]
pub struct LinearMapWithCurvature {
    pub l: LinearMapT,
    curvature: Vec<AlgebraElement>,
    dim: usize,
}

impl LinearMapWithCurvature {
    pub fn new(l: LinearMapT, src: &BasedAlgebra, dst: &BasedAlgebra) -> Result<LinearMapWithCurvature> {
        if l.domain() != src.dim() || l.codomain() != dst.dim() {
            return Err(Error::invalid("linear map shape does not match the algebras"));
        }
        let n = src.dim();
        let mut curvature = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let lhs = l.apply(src.basis_product(i, j)?);
                curvature.push(lhs.sub(&dst.multiply(l.image(i), l.image(j))?));
            }
        }
        Ok(LinearMapWithCurvature { l, curvature, dim: n })
    }

    pub fn curvature(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.curvature[i * self.dim + j]
    }

    pub fn is_multiplicative(&self) -> bool {
        self.curvature.iter().all(|v| v.is_zero())
    }
}

/// `l(ã₀) ω(a₁,a₂) ⋯ ω(a₂ₙ₋₁,a₂ₙ)` for an even monomial; the formal unit
/// contributes nothing, so a unit-led monomial of degree zero has no value.
fn llh_monomial(lc: &LinearMapWithCurvature, dst: &BasedAlgebra, m: &Monomial) -> Result<Option<AlgebraElement>> {
    let mut acc: Option<AlgebraElement> = m.lead.map(|l| lc.l.image(l).clone());
    for pair in m.tail.chunks(2) {
        let w = lc.curvature(pair[0], pair[1]);
        acc = Some(match acc {
            None => w.clone(),
            Some(x) => dst.multiply(&x, w)?,
        });
    }
    Ok(acc)
}

/// The homomorphism `T A/(J A)ᵏ → B` extending `l`.
///
/// Fails with a witness when some product `l(ã₀) ω ⋯ ω` of `k` curvature
/// factors is nonzero, since the map would not vanish on `(J A)ᵏ`.
pub fn extend_homomorphism(
    lc: &LinearMapWithCurvature,
    t: &TruncatedTensorAlgebra,
    dst: &BasedAlgebra,
) -> Result<LinearMapT> {
    let n = t.base().dim();
    let top = DegreeBasis::new(n, 2 * t.order());
    for idx in 0..top.len() {
        let m = top.monomial(idx);
        if let Some(v) = llh_monomial(lc, dst, &m)? {
            if !v.is_zero() {
                return Err(Error::invalid(format!(
                    "curvature product does not vanish at lead {:?}, slots {:?}",
                    m.lead.map(|l| t.base().label(l).to_string()),
                    m.tail.iter().map(|&s| t.base().label(s)).collect::<Vec<_>>()
                )));
            }
        }
    }
    let mut images = Vec::with_capacity(t.dim());
    for i in 0..t.dim() {
        images.push(llh_monomial(lc, dst, &t.monomial(i))?.unwrap_or_default());
    }
    LinearMapT::new(t.dim(), dst.dim(), images)
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1)) as i64
}

/// Coefficient `C(2j, j)` of the idempotent lifting series.
pub fn idempotent_series_coefficient(j: usize) -> i64 {
    binomial(2 * j as u64, j as u64)
}

fn power(a: &BasedAlgebra, x: &FormVector, j: usize) -> Result<FormVector> {
    let mut acc = FormVector::unit();
    for _ in 0..j {
        acc = form_mul(a, &acc, x)?;
    }
    Ok(acc)
}

/// `ê = e + Σ_{j<k} C(2j,j) (e − ½)(de)^{2j}`, an idempotent of `T A/(J A)ᵏ`
/// lifting the idempotent `e`.
pub fn lift_idempotent(a: &BasedAlgebra, e: &AlgebraElement, k: usize) -> Result<FormVector> {
    let sq = a.multiply(e, e)?;
    if sq != *e {
        return Err(Error::invalid(format!("not an idempotent: e·e − e = {}", a.format_element(&sq.sub(e)))));
    }
    let fe = FormVector::from_element(e);
    let half = FormVector::unit().scale(&Scalar::ratio(-1, 2));
    let shifted = fe.plus(&half);
    let de = d_elem(e);
    let dede = form_mul(a, &de, &de)?;
    let mut out = fe;
    for j in 1..k {
        let term = form_mul(a, &shifted, &power(a, &dede, j)?)?;
        out.add_scaled(&term, &Scalar::int(idempotent_series_coefficient(j)));
    }
    Ok(out)
}

/// `ê ⊙ ê − ê` in `T A/(J A)ᵏ`.
pub fn idempotent_residual(a: &BasedAlgebra, lift: &FormVector, k: usize) -> Result<FormVector> {
    Ok(fedosov_truncated(a, lift, lift, 2 * k)?.minus(&lift.truncate(2 * k - 1)))
}

/// Lifts `(a, b)` with `(1+a)(1+b) = (1+b)(1+a) = 1` to `(â, b̂)` where
/// `â = a` and `b̂ = b + Σ_{j<k} (da db)^j + b (da db)^j`.
pub fn lift_invertible(
    alg: &BasedAlgebra,
    a: &AlgebraElement,
    b: &AlgebraElement,
    k: usize,
) -> Result<(FormVector, FormVector)> {
    let sum = a.add(b);
    for (name, prod) in [("ab", alg.multiply(a, b)?), ("ba", alg.multiply(b, a)?)] {
        let r = sum.add(&prod);
        if !r.is_zero() {
            return Err(Error::invalid(format!("a + b + {name} = {} is not zero", alg.format_element(&r))));
        }
    }
    let fb = FormVector::from_element(b);
    let dadb = form_mul(alg, &d_elem(a), &d_elem(b))?;
    let mut hat_b = fb.clone();
    for j in 1..k {
        let pj = power(alg, &dadb, j)?;
        hat_b.add_assign(&pj);
        hat_b.add_assign(&form_mul(alg, &fb, &pj)?);
    }
    Ok((FormVector::from_element(a), hat_b))
}

/// `(1+â)⊙(1+b̂) − 1` and `(1+b̂)⊙(1+â) − 1` in the unitized truncation.
pub fn invertible_residuals(
    alg: &BasedAlgebra,
    hat_a: &FormVector,
    hat_b: &FormVector,
    k: usize,
) -> Result<(FormVector, FormVector)> {
    let one = FormVector::unit();
    let x = one.plus(hat_a);
    let y = one.plus(hat_b);
    let xy = fedosov_truncated(alg, &x, &y, 2 * k)?.minus(&one);
    let yx = fedosov_truncated(alg, &y, &x, 2 * k)?.minus(&one);
    Ok((xy, yx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        dual_numbers, field, laurent_window, matrix_algebra, t2_extension, truncated_poly, upper_triangular,
        validate_algebra, Diagnostics,
    };

    #[test]
    fn dimensions_and_labels() {
        let t = truncated_tensor_algebra(&field(), 2, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.algebra().labels(), &["e", "d(e).d(e)", "e.d(e).d(e)"]);
        assert_eq!(truncated_dim(2, 3), 2 + 3 * 4 + 3 * 16);
        assert!(matches!(truncated_tensor_algebra(&matrix_algebra(2), 3, 100), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn order_one_is_the_base() {
        for a in [field(), dual_numbers(), matrix_algebra(2)] {
            let t = truncated_tensor_algebra(&a, 1, DEFAULT_SIZE_CAP).unwrap();
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    assert_eq!(t.algebra().basis_product(i, j).unwrap(), a.basis_product(i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn truncations_are_associative() {
        for (a, k) in [(field(), 2), (field(), 3), (field(), 4), (dual_numbers(), 2), (truncated_poly(2), 2)] {
            let t = truncated_tensor_algebra(&a, k, DEFAULT_SIZE_CAP).unwrap();
            assert_eq!(validate_algebra(t.algebra()), Diagnostics::Pass, "{:?} k={k}", a.labels());
        }
    }

    #[test]
    fn cut_off_product_in_order_two() {
        let a = field();
        let t = truncated_tensor_algebra(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        let (e, dede, edede) = (0, 1, 2);
        // e ⊙ de de = e de de: the degree-4 correction is cut off.
        assert_eq!(t.algebra().basis_product(e, dede).unwrap(), &SparseVec::unit(edede));
        // e ⊙ e = e − de de.
        assert_eq!(
            t.algebra().basis_product(e, e).unwrap(),
            &SparseVec::from_entries([(e, Scalar::ONE), (dede, -Scalar::ONE)])
        );
    }

    #[test]
    fn sigma_tau_and_curvature() {
        let a = dual_numbers();
        let t = truncated_tensor_algebra(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        let x = SparseVec::from_entries([(0, Scalar::int(2)), (1, Scalar::ratio(1, 3))]);
        assert_eq!(t.tau(&t.sigma(&x)), x);
        let sigma = LinearMapT::new(2, t.dim(), (0..2).map(SparseVec::unit).collect()).unwrap();
        let lc = LinearMapWithCurvature::new(sigma, &a, t.algebra()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dd = form_mul(&a, &d_elem(&SparseVec::unit(i)), &d_elem(&SparseVec::unit(j))).unwrap();
                assert_eq!(lc.curvature(i, j), &t.coords(&dd).unwrap());
            }
        }
        assert!(t.tau_map().multiplicativity_defect(t.algebra(), &a).unwrap().is_none());
        let edede = t
            .coords(
                &form_mul(&a, &FormVector::from_element(&SparseVec::unit(0)), &{
                    let de = d_elem(&SparseVec::unit(0));
                    form_mul(&a, &de, &de).unwrap()
                })
                .unwrap(),
            )
            .unwrap();
        assert!(t.tau(&edede).is_zero());
    }

    #[test]
    fn extension_of_homomorphisms_is_composition_with_tau() {
        let a = matrix_algebra(2);
        let t = truncated_tensor_algebra(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        let lc = LinearMapWithCurvature::new(LinearMapT::identity(4), &a, &a).unwrap();
        let f = extend_homomorphism(&lc, &t, &a).unwrap();
        assert_eq!(f, t.tau_map());
    }

    #[test]
    fn extension_of_sections() {
        for perturb in [false, true] {
            let ext = t2_extension(perturb);
            let t = truncated_tensor_algebra(&ext.q, 2, DEFAULT_SIZE_CAP).unwrap();
            let lc = LinearMapWithCurvature::new(ext.s.clone(), &ext.q, &ext.e).unwrap();
            assert_eq!(lc.is_multiplicative(), !perturb);
            let f = extend_homomorphism(&lc, &t, &ext.e).unwrap();
            assert!(f.multiplicativity_defect(t.algebra(), &ext.e).unwrap().is_none());
            for i in 0..ext.q.dim() {
                assert_eq!(f.apply(&t.sigma(&SparseVec::unit(i))), *ext.s.image(i));
            }
            if !perturb {
                assert_eq!(f, ext.s.compose(&t.tau_map()));
            } else {
                // s(e₁) = E11 + E12, s(e₂) = E22: ω_s(e₁, e₂) = −E12,
                // s(e₁)·ω_s(e₁, e₂) = −E12 and s(e₂)·ω_s(e₁, e₂) = 0.
                assert!(lc.curvature(0, 0).is_zero());
                assert_eq!(lc.curvature(0, 1), &SparseVec::from_entries([(1, -Scalar::ONE)]));
                let m = t.coords(&FormVector::monomial(Monomial::new(Some(0), vec![0, 1]))).unwrap();
                assert_eq!(f.apply(&m), SparseVec::from_entries([(1, -Scalar::ONE)]));
                let m = t.coords(&FormVector::monomial(Monomial::new(Some(1), vec![0, 1]))).unwrap();
                assert!(f.apply(&m).is_zero());
            }
        }
    }

    #[test]
    fn extension_refuses_surviving_curvature() {
        // σ into the order-2 truncation has curvature de de whose square survives
        // in order 3, so it cannot descend from order 2.
        let a = field();
        let t2 = truncated_tensor_algebra(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        let t3 = truncated_tensor_algebra(&a, 3, DEFAULT_SIZE_CAP).unwrap();
        let sigma = LinearMapT::new(1, t3.dim(), vec![SparseVec::unit(0)]).unwrap();
        let lc = LinearMapWithCurvature::new(sigma, &a, t3.algebra()).unwrap();
        let err = extend_homomorphism(&lc, &t2, t3.algebra()).unwrap_err();
        assert!(err.to_string().contains("curvature product"), "{err}");
        let f = extend_homomorphism(&lc, &t3, t3.algebra()).unwrap();
        assert_eq!(f.matrix, crate::linalg::SparseMatrix::identity(t3.dim()));
    }

    #[test]
    fn idempotent_lifts() {
        assert_eq!((1..=3).map(idempotent_series_coefficient).collect::<Vec<_>>(), vec![2, 6, 20]);
        let a = field();
        let e = SparseVec::unit(0);
        let lift = lift_idempotent(&a, &e, 2).unwrap();
        let de = d_elem(&e);
        let dede = form_mul(&a, &de, &de).unwrap();
        let expected = FormVector::from_element(&e)
            .plus(&form_mul(&a, &FormVector::from_element(&e), &dede).unwrap().scale(&Scalar::int(2)))
            .minus(&dede);
        assert_eq!(lift, expected);
        for (alg, e) in [
            (field(), SparseVec::unit(0)),
            (matrix_algebra(2), SparseVec::unit(0)),
            (upper_triangular(2), SparseVec::from_entries([(0, Scalar::ONE), (1, Scalar::int(5))])),
        ] {
            for k in 2..=4 {
                let lift = lift_idempotent(&alg, &e, k).unwrap();
                assert!(idempotent_residual(&alg, &lift, k).unwrap().is_zero(), "k = {k}");
                assert_eq!(lift.component(0), FormVector::from_element(&e));
            }
        }
        assert!(lift_idempotent(&field(), &SparseVec::new(), 3).unwrap().is_zero());
        assert!(lift_idempotent(&field(), &SparseVec::from_entries([(0, Scalar::int(2))]), 2).is_err());
    }

    #[test]
    fn invertible_lifts() {
        let l = laurent_window(6);
        let one = l.index_of("1").unwrap();
        let u = l.index_of("u").unwrap();
        let ui = l.index_of("u^-1").unwrap();
        let a = SparseVec::from_entries([(u, Scalar::ONE), (one, -Scalar::ONE)]);
        let b = SparseVec::from_entries([(ui, Scalar::ONE), (one, -Scalar::ONE)]);
        for k in 2..=3 {
            let (ha, hb) = lift_invertible(&l, &a, &b, k).unwrap();
            let (r1, r2) = invertible_residuals(&l, &ha, &hb, k).unwrap();
            assert!(r1.is_zero() && r2.is_zero(), "k = {k}: {r1:?} {r2:?}");
        }
        let (_, hb) = lift_invertible(&l, &a, &b, 2).unwrap();
        let dadb = form_mul(&l, &d_elem(&a), &d_elem(&b)).unwrap();
        let fb = FormVector::from_element(&b);
        assert_eq!(hb, fb.plus(&dadb).plus(&form_mul(&l, &fb, &dadb).unwrap()));
        let (ha, hb) = lift_invertible(&l, &SparseVec::new(), &SparseVec::new(), 3).unwrap();
        assert!(ha.is_zero() && hb.is_zero());
        assert!(lift_invertible(&l, &a, &a, 2).is_err());
    }
}
