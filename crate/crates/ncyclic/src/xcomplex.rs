//! The X-complex `A ⇄ Ω¹A/b(Ω²A)`, the boundary `∂` transported to `Ω(A)`,
//! its rescaled form `δ`, and the spectral operators `P`, `H` of `κ²`.

use crate::algebra::{unitize, AlgebraElement, BasedAlgebra};
use crate::error::{Error, Result};
use crate::forms::{b, connes_b, d, fedosov, form_mul, kappa, operator_matrix, DegreeBasis, FormVector, Monomial};
use crate::linalg::{span_rank, Echelon, QuotientSpace, SparseMatrix, SparseVec};
use crate::scalar::{Rat, Scalar};

/// A ℤ/2-graded complex `even ⇄ odd`.
#[derive(Clone, Debug)]
pub struct ZTwoComplex {
    /// `∂₀: even → odd`.
    pub d0: SparseMatrix,
    /// `∂₁: odd → even`.
    pub d1: SparseMatrix,
}

impl ZTwoComplex {
    pub fn new(d0: SparseMatrix, d1: SparseMatrix) -> Result<ZTwoComplex> {
        if d0.rows != d1.cols || d1.rows != d0.cols {
            return Err(Error::invalid("boundary shapes do not match"));
        }
        if !d1.compose(&d0).is_zero() || !d0.compose(&d1).is_zero() {
            return Err(Error::invalid("boundary does not square to zero"));
        }
        Ok(ZTwoComplex { d0, d1 })
    }

    pub fn even_dim(&self) -> usize {
        self.d0.cols
    }

    pub fn odd_dim(&self) -> usize {
        self.d1.cols
    }

    /// `(dim H_even, dim H_odd)`.
    pub fn homology(&self) -> (usize, usize) {
        let (r0, r1) = (self.d0.rank(), self.d1.rank());
        (self.even_dim() - r0 - r1, self.odd_dim() - r1 - r0)
    }
}

/// `X(A)` together with its description of `Ω¹A/b(Ω²A)`.
#[derive(Clone, Debug)]
pub struct XComplex {
    pub quotient: QuotientSpace,
    pub complex: ZTwoComplex,
}

impl XComplex {
    /// Class of a one-form in complement coordinates.
    pub fn class_of(&self, dim_a: usize, w: &FormVector) -> SparseVec {
        self.quotient.project(&DegreeBasis::new(dim_a, 1).coords(w))
    }
}

pub fn x_complex(a: &BasedAlgebra) -> Result<XComplex> {
    let n = a.dim();
    let b2 = operator_matrix(n, 2, 1, |w| b(a, w))?;
    let quotient = QuotientSpace::new(DegreeBasis::new(n, 1).len(), &b2.columns);
    let b1 = operator_matrix(n, 1, 0, |w| b(a, w))?;
    let d1 = b1.compose(&quotient.inclusion_matrix());
    let d0 = quotient.projection_matrix().compose(&operator_matrix(n, 0, 1, |w| Ok(d(w)))?);
    Ok(XComplex { quotient, complex: ZTwoComplex::new(d0, d1)? })
}

fn apply_degreewise(w: &FormVector, mut f: impl FnMut(usize, &FormVector) -> Result<FormVector>) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for n in w.degrees() {
        out.add_assign(&f(n, &w.component(n))?);
    }
    Ok(out)
}

/// The X-complex boundary on forms: `b − (1+κ)d` on odd degrees and
/// `Σ_{j≤2n} κʲd − Σ_{j<n} κ^{2j} b` on `Ω^{2n}`.
pub fn partial_boundary(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    apply_degreewise(w, |deg, x| {
        if deg % 2 == 1 {
            let dx = d(x);
            Ok(b(a, x)?.minus(&dx).minus(&kappa(a, &dx)?))
        } else {
            let mut out = connes_b(x);
            let mut t = b(a, x)?;
            for _ in 0..deg / 2 {
                out = out.minus(&t);
                t = kappa(a, &kappa(a, &t)?)?;
            }
            Ok(out)
        }
    })
}

/// `δ = B − n b` on `Ω^{2n}` and `δ = −B/(n+1) + b` on `Ω^{2n+1}`.
pub fn delta_boundary(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    apply_degreewise(w, |deg, x| {
        let n = (deg / 2) as i64;
        if deg % 2 == 0 {
            Ok(connes_b(x).minus(&b(a, x)?.scale(&Scalar::int(n))))
        } else {
            Ok(b(a, x)?.minus(&connes_b(x).scale(&Scalar::ratio(1, n + 1))))
        }
    })
}

/// `c_{2n} = c_{2n+1} = (-1)ⁿ n!`.
pub fn c_n(deg: usize) -> Scalar {
    let n = deg / 2;
    let fact = (1..=n as i64).fold(Scalar::ONE, |acc, k| acc * Scalar::int(k));
    Scalar::sign(n) * fact
}

/// Multiplies each `Ωᵐ` component by `c_m`.
pub fn rescale_cn(w: &FormVector) -> FormVector {
    let mut out = FormVector::zero();
    for n in w.degrees() {
        out.add_assign(&w.component(n).scale(&c_n(n)));
    }
    out
}

/// Multiplies each `Ωᵐ` component by `1/c_m`.
pub fn rescale_cn_inv(w: &FormVector) -> FormVector {
    let mut out = FormVector::zero();
    for n in w.degrees() {
        out.add_assign(&w.component(n).scale(&c_n(n).inv()));
    }
    out
}

/// Polynomial with coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Scalar>);

impl Poly {
    fn trim(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn constant(c: Scalar) -> Poly {
        Poly(vec![c]).trim()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![Scalar::ZERO; self.0.len() + other.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in other.0.iter().enumerate() {
                out[i + j] += &(x * y);
            }
        }
        Poly(out).trim()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).cloned().unwrap_or(Scalar::ZERO);
        Poly((0..n).map(|i| get(self, i) + get(other, i)).collect()).trim()
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly(self.0.iter().map(|x| x * c).collect()).trim()
    }

    pub fn eval(&self, z: &Scalar) -> Scalar {
        self.0.iter().rev().fold(Scalar::ZERO, |acc, c| acc * z + c)
    }

    /// Quotient by `z − 1`; errors unless the division is exact.
    pub fn div_z_minus_one(&self) -> Result<Poly> {
        if self.0.is_empty() {
            return Ok(Poly(Vec::new()));
        }
        let n = self.0.len();
        let mut q = vec![Scalar::ZERO; n - 1];
        let mut carry = Scalar::ZERO;
        for i in (1..n).rev() {
            carry = &carry + &self.0[i];
            q[i - 1] = carry.clone();
        }
        if !(carry + &self.0[0]).is_zero() {
            return Err(Error::invalid("polynomial does not vanish at 1"));
        }
        Ok(Poly(q).trim())
    }
}

/// `Nₙ(z) = (1 + z + … + z^{n−1})/n`.
fn n_poly(n: usize) -> Poly {
    Poly(vec![Scalar::ratio(1, n as i64); n])
}

/// `fₙ = Nₙ N_{n+1} (1 − (n − ½)(z − 1))` for `n ≥ 1`.
pub fn spectral_f(n: usize) -> Poly {
    assert!(n >= 1, "fₙ is defined for n ≥ 1");
    let c = Scalar::new(Rat::new(2 * n as i64 - 1, 2), Rat::ZERO);
    let lin = Poly(vec![Scalar::ONE + &c, -c]);
    n_poly(n).mul(&n_poly(n + 1)).mul(&lin)
}

/// `gₙ = (1 − fₙ)(fₙ − 1)/(z − 1)`.
pub fn spectral_g(n: usize) -> Poly {
    let f = spectral_f(n);
    let f_minus_one = f.add(&Poly::constant(-Scalar::ONE));
    let tilde = f_minus_one.div_z_minus_one().expect("fₙ(1) = 1");
    f_minus_one.scale(&-Scalar::ONE).mul(&tilde)
}

/// `p(κ²)` applied to a homogeneous form.
fn poly_in_kappa_sq(a: &BasedAlgebra, p: &Poly, x: &FormVector) -> Result<FormVector> {
    let mut acc = FormVector::zero();
    for c in p.0.iter().rev() {
        acc = kappa(a, &kappa(a, &acc)?)?;
        acc.add_scaled(x, c);
    }
    Ok(acc)
}

/// Projection onto the generalized 1-eigenspace of `κ²`, degreewise.
pub fn spectral_p(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    apply_degreewise(w, |n, x| if n == 0 { Ok(x.clone()) } else { poly_in_kappa_sq(a, &spectral_f(n), x) })
}

/// Inverse of `1 − κ²` on the range of `1 − P`, zero on the range of `P`.
pub fn spectral_h(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    apply_degreewise(w, |n, x| if n == 0 { Ok(FormVector::zero()) } else { poly_in_kappa_sq(a, &spectral_g(n), x) })
}

/// One summand `left · D(middle) · right` of `Dx` in `Ω¹(TA)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTriple {
    pub left: FormVector,
    pub middle: AlgebraElement,
    pub right: FormVector,
}

/// Writes `Dx` for an even monomial form `x` as a sum of triples.
pub fn split_d(a: &BasedAlgebra, x: &FormVector) -> Result<Vec<DTriple>> {
    let mut out = Vec::new();
    for (m, c) in x.iter() {
        let deg = m.degree();
        if deg % 2 == 1 {
            return Err(Error::invalid("split_d expects an even form"));
        }
        let exact = |tail: &[usize]| FormVector::monomial(Monomial::new(None, tail.to_vec()));
        if let Some(l) = m.lead {
            out.push(DTriple { left: FormVector::unit().scale(c), middle: SparseVec::unit(l), right: exact(&m.tail) });
        }
        for j in 1..=deg / 2 {
            let (p, q) = (m.tail[2 * j - 2], m.tail[2 * j - 1]);
            let head = FormVector::term(Monomial::new(m.lead, m.tail[..2 * j - 2].to_vec()), c.clone());
            let rest = exact(&m.tail[2 * j..]);
            out.push(DTriple { left: head.clone(), middle: a.basis_product(p, q)?.clone(), right: rest.clone() });
            let head_p = fedosov(a, &head, &FormVector::monomial(Monomial::elem(p)))?;
            out.push(DTriple { left: head_p.neg(), middle: SparseVec::unit(q), right: rest.clone() });
            let q_rest = form_mul(a, &FormVector::monomial(Monomial::elem(q)), &rest)?;
            out.push(DTriple { left: head.neg(), middle: SparseVec::unit(p), right: q_rest });
        }
    }
    Ok(out)
}

/// `Σ (right ⊙ left) · d(middle)`, the odd form represented by the triples.
pub fn reassemble_d(a: &BasedAlgebra, triples: &[DTriple]) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for t in triples {
        let rl = fedosov(a, &t.right, &t.left)?;
        let dm = d(&FormVector::from_element(&t.middle));
        out.add_assign(&form_mul(a, &rl, &dm)?);
    }
    Ok(out)
}

/// The odd form representing `x · D(y)` modulo commutators: each triple
/// `l D(m) r` of `Dy` contributes `(r ⊙ x ⊙ l) · dm`.
pub fn odd_class(a: &BasedAlgebra, x: &FormVector, y: &FormVector) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for t in split_d(a, y)? {
        let rxl = fedosov(a, &fedosov(a, &t.right, x)?, &t.left)?;
        out.add_assign(&form_mul(a, &rxl, &d(&FormVector::from_element(&t.middle)))?);
    }
    Ok(out)
}

/// Outcome of comparing `X(Ã)` with `X(A) ⊕ ℂ[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitizationReport {
    pub homology: (usize, usize),
    pub unitized_homology: (usize, usize),
    /// `b(Ω²Ã) = b(Ω²A) + V` as subspaces of `Ω¹Ã`.
    pub commutators_split: bool,
    /// The four commutator families land in `V + b(Ω²A)`.
    pub commutator_identities: bool,
}

impl UnitizationReport {
    pub fn passed(&self) -> bool {
        self.commutators_split
            && self.commutator_identities
            && self.unitized_homology == (self.homology.0 + 1, self.homology.1)
    }
}

/// Checks the splitting `X(Ã) ≅ X(A) ⊕ ℂ[0]` where `Ã` adjoins a unit at
/// index 0 and shifts the basis of `A` by one. `V` is spanned by `x d1` and
/// `dx − 1 dx` for `x ∈ Ã`.
pub fn unitization_split_check(a: &BasedAlgebra) -> Result<UnitizationReport> {
    let u = unitize(a);
    let n = a.dim();
    let one = 0;
    let shift = |w: &FormVector| {
        let mut out = FormVector::zero();
        for (m, c) in w.iter() {
            out.add_term(Monomial::new(m.lead.map(|l| l + 1), m.tail.iter().map(|t| t + 1).collect()), c);
        }
        out
    };
    let omega1 = DegreeBasis::new(n + 1, 1);
    let mut base = Echelon::new(omega1.len());
    for m in DegreeBasis::new(n, 2).monomials() {
        base.insert(&omega1.coords(&shift(&b(a, &FormVector::monomial(m))?)));
    }
    let mut v_plus = base.clone();
    for x in 0..=n {
        // x d1 and dx − 1 dx
        v_plus.insert(&omega1.coords(&FormVector::monomial(Monomial::new(Some(x), vec![one]))));
        let diff = FormVector::monomial(Monomial::new(None, vec![x]))
            .minus(&FormVector::monomial(Monomial::new(Some(one), vec![x])));
        v_plus.insert(&omega1.coords(&diff));
    }
    let full: Vec<SparseVec> = DegreeBasis::new(n + 1, 2)
        .monomials()
        .map(|m| Ok(omega1.coords(&b(&u, &FormVector::monomial(m))?)))
        .collect::<Result<_>>()?;
    let commutators_split = full.iter().all(|v| v_plus.contains(v)) && span_rank(omega1.len(), &full) == v_plus.rank();
    let mono = |lead: Option<usize>, tail: Vec<usize>| FormVector::monomial(Monomial::new(lead, tail));
    let mut commutator_identities = true;
    for x in 0..=n {
        let mut family = vec![mono(None, vec![x, one])];
        for y in 0..=n {
            family.push(mono(Some(one), vec![x, y]).minus(&mono(None, vec![x, y])));
            family.push(mono(Some(x), vec![one, y]));
            family.push(mono(Some(x), vec![y, one]));
        }
        for w in family {
            commutator_identities &= v_plus.contains(&omega1.coords(&b(&u, &w)?));
        }
    }
    Ok(UnitizationReport {
        homology: x_complex(a)?.complex.homology(),
        unitized_homology: x_complex(&u)?.complex.homology(),
        commutators_split,
        commutator_identities,
    })
}

fn laurent_degrees(a: &BasedAlgebra) -> Result<(&[i64], usize)> {
    let w = a.window().ok_or_else(|| Error::invalid("not a Laurent window algebra"))?;
    let unit = w.iter().position(|&k| k == 0).ok_or_else(|| Error::invalid("window has no degree-0 element"))?;
    Ok((w, unit))
}

fn laurent_monomial(a: &BasedAlgebra, w: &[i64], k: i64, c: Scalar) -> Result<AlgebraElement> {
    match w.iter().position(|&x| x == k) {
        Some(i) => Ok(SparseVec::from_entries([(i, c)])),
        None if c.is_zero() => Ok(SparseVec::new()),
        None => Err(Error::WindowOverflow { left: format!("u^{k}"), right: format!("window of {}", a.dim()) }),
    }
}

/// `f ↦ f′` on a Laurent window.
pub fn laurent_derivative(a: &BasedAlgebra, f: &AlgebraElement) -> Result<AlgebraElement> {
    let (w, _) = laurent_degrees(a)?;
    let mut out = SparseVec::new();
    for (i, c) in f.iter() {
        let k = w[*i];
        out = out.add(&laurent_monomial(a, w, k - 1, c * Scalar::int(k))?);
    }
    Ok(out)
}

/// `♮(f dg) = f·g′` on one-forms over a Laurent window.
pub fn laurent_natural(a: &BasedAlgebra, omega: &FormVector) -> Result<AlgebraElement> {
    let (w, unit) = laurent_degrees(a)?;
    let mut out = SparseVec::new();
    for (m, c) in omega.iter() {
        if m.degree() != 1 {
            return Err(Error::invalid("♮ is defined on one-forms"));
        }
        let g = m.tail[0];
        let k = w[m.lead.unwrap_or(unit)] + w[g] - 1;
        out = out.add(&laurent_monomial(a, w, k, c * Scalar::int(w[g]))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, field, laurent_window, matrix_algebra, null_algebra, upper_triangular};
    use crate::forms::{kappa_pow, random_form, random_monomial_within, window_safe_monomials};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(lead: Option<usize>, tail: &[usize]) -> FormVector {
        FormVector::monomial(Monomial::new(lead, tail.to_vec()))
    }

    #[test]
    fn x_complex_of_the_field() {
        let x = x_complex(&field()).unwrap();
        assert_eq!(x.quotient.dim(), 0);
        assert_eq!(x.complex.homology(), (1, 0));
    }

    #[test]
    fn x_complex_boundaries_square_to_zero() {
        for a in [dual_numbers(), matrix_algebra(2), upper_triangular(2), null_algebra(2)] {
            let x = x_complex(&a).unwrap();
            assert!(x.complex.d1.compose(&x.complex.d0).is_zero());
        }
    }

    #[test]
    fn boundary_examples() {
        let a = matrix_algebra(2);
        let x = FormVector::from_element(&SparseVec::unit(1));
        assert_eq!(partial_boundary(&a, &x).unwrap(), d(&x));
        let w = mono(Some(0), &[1]);
        let dw = d(&w);
        let expected = b(&a, &w).unwrap().minus(&dw).minus(&kappa(&a, &dw).unwrap());
        assert_eq!(partial_boundary(&a, &w).unwrap(), expected);
        for i in 0..4 {
            let x = FormVector::from_element(&SparseVec::unit(i));
            assert!(partial_boundary(&a, &partial_boundary(&a, &x).unwrap()).unwrap().is_zero());
        }
        assert_eq!(delta_boundary(&a, &x).unwrap(), d(&x));
    }

    #[test]
    fn rescaling_constants() {
        let v: Vec<Scalar> = (0..6).map(c_n).collect();
        let ints: Vec<Scalar> = [1, 1, -1, -1, 2, 2].into_iter().map(Scalar::int).collect();
        assert_eq!(v, ints);
    }

    #[test]
    fn boundaries_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for a in [field(), dual_numbers(), matrix_algebra(2)] {
            for deg in 0..=4 {
                let w = random_form(&a, deg, 4, &mut rng);
                let pw = partial_boundary(&a, &w).unwrap();
                assert!(partial_boundary(&a, &pw).unwrap().is_zero(), "∂² at degree {deg}");
                let dw = delta_boundary(&a, &w).unwrap();
                assert!(delta_boundary(&a, &dw).unwrap().is_zero(), "δ² at degree {deg}");
                let conj = rescale_cn_inv(&{
                    let cw = rescale_cn(&w);
                    connes_b(&cw).plus(&b(&a, &cw).unwrap())
                });
                assert_eq!(conj, dw);
            }
        }
    }

    #[test]
    fn spectral_polynomials() {
        let f1 = spectral_f(1);
        let quarter = |k: i64| Scalar::ratio(k, 4);
        assert_eq!(f1, Poly(vec![quarter(3), quarter(2), quarter(-1)]));
        assert_eq!(f1.eval(&Scalar::ONE), Scalar::ONE);
        assert!(f1.eval(&-Scalar::ONE).is_zero());
        for n in 1..6 {
            let f = spectral_f(n);
            assert_eq!(f.eval(&Scalar::ONE), Scalar::ONE);
            let g = spectral_g(n);
            // g(z)(1 − z) = 1 − f(z) modulo fₙ(1−fₙ), checked at z = 1.
            assert!(g.eval(&Scalar::ONE).is_zero());
        }
    }

    #[test]
    fn spectral_operators() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for a in [field(), dual_numbers(), matrix_algebra(2)] {
            for deg in 0..=3 {
                let w = random_form(&a, deg, 4, &mut rng);
                let p = spectral_p(&a, &w).unwrap();
                assert_eq!(spectral_p(&a, &p).unwrap(), p);
                assert!(spectral_h(&a, &p).unwrap().is_zero());
                let h = spectral_h(&a, &w).unwrap();
                assert!(spectral_p(&a, &h).unwrap().is_zero());
                let k2 = |x: &FormVector| kappa_pow(&a, x, 2).unwrap();
                let one_minus = |x: &FormVector| x.minus(&k2(x));
                assert_eq!(spectral_h(&a, &one_minus(&w)).unwrap(), w.minus(&p));
                assert_eq!(one_minus(&h), w.minus(&p));
            }
        }
    }

    #[test]
    fn split_d_reassembles_the_boundary() {
        let a = matrix_algebra(2);
        let x = FormVector::from_element(&SparseVec::unit(2));
        let t = split_d(&a, &x).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].left, FormVector::unit());
        assert_eq!(t[0].right, mono(None, &[]));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in [field(), dual_numbers(), matrix_algebra(2), upper_triangular(2)] {
            for deg in [0, 2, 4] {
                let x = random_form(&a, deg, 3, &mut rng);
                let t = split_d(&a, &x).unwrap();
                assert_eq!(reassemble_d(&a, &t).unwrap(), partial_boundary(&a, &x).unwrap(), "degree {deg}");
            }
        }
        let t = split_d(&a, &mono(Some(0), &[1, 2])).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t[1].middle, a.basis_product(1, 2).unwrap().clone());
    }

    #[test]
    fn unitization_splits_off_a_point() {
        for a in [null_algebra(1), dual_numbers(), matrix_algebra(2)] {
            let r = unitization_split_check(&a).unwrap();
            assert!(r.passed(), "{:?}: {r:?}", a.labels());
        }
    }

    #[test]
    fn laurent_normal_form() {
        let a = laurent_window(6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = random_monomial_within(&a, 2, 5, &mut rng);
            let bw = b(&a, &FormVector::monomial(m)).unwrap();
            assert!(laurent_natural(&a, &bw).unwrap().is_zero());
        }
        for m in window_safe_monomials(&a, 0) {
            let f = FormVector::monomial(m.clone());
            if a.window().unwrap()[m.lead.unwrap()].abs() < 6 {
                let lhs = laurent_natural(&a, &partial_boundary(&a, &f).unwrap()).unwrap();
                assert_eq!(lhs, laurent_derivative(&a, &SparseVec::unit(m.lead.unwrap())).unwrap());
            }
        }
    }
}
