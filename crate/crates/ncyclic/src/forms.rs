//! Noncommutative differential forms `Ω(A)` and their operators.
//!
//! A monomial `⟨a₀|a₁…aₙ⟩` stands for `a₀ da₁ … daₙ`; the leading slot may be
//! the formal unit, which is never identified with a unit of `A`. Every
//! operator returns forms in this standard monomial shape.

use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use rand::Rng;

use crate::algebra::{format_terms, AlgebraElement, BasedAlgebra, LinearMapT};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;

/// `a₀ da₁ … daₙ`; `lead == None` is the formal unit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub lead: Option<usize>,
    pub tail: Vec<usize>,
}

impl Monomial {
    pub fn new(lead: Option<usize>, tail: Vec<usize>) -> Monomial {
        Monomial { lead, tail }
    }

    /// The degree-zero monomial `a`.
    pub fn elem(a: usize) -> Monomial {
        Monomial { lead: Some(a), tail: Vec::new() }
    }

    /// The formal unit as a degree-zero monomial of the unitized forms.
    pub fn unit() -> Monomial {
        Monomial { lead: None, tail: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.tail.len()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lead.cmp(&other.lead))
            .then_with(|| self.tail.cmp(&other.tail))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse linear combination of monomials, possibly of mixed degree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FormVector {
    terms: BTreeMap<Monomial, Scalar>,
}

impl fmt::Debug for FormVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}·{:?}|{:?}", m.lead, m.tail)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl FormVector {
    pub fn zero() -> FormVector {
        FormVector::default()
    }

    pub fn monomial(m: Monomial) -> FormVector {
        FormVector::term(m, Scalar::ONE)
    }

    pub fn term(m: Monomial, c: Scalar) -> FormVector {
        let mut v = FormVector::zero();
        v.add_term(m, &c);
        v
    }

    /// The formal unit `1` of the unitized forms.
    pub fn unit() -> FormVector {
        FormVector::monomial(Monomial::unit())
    }

    /// A degree-zero form from an algebra element.
    pub fn from_element(x: &AlgebraElement) -> FormVector {
        let mut v = FormVector::zero();
        for (i, c) in x.iter() {
            v.add_term(Monomial::elem(*i), c);
        }
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FormVector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), &(x * c));
        }
    }

    pub fn add_assign(&mut self, other: &FormVector) {
        self.add_scaled(other, &Scalar::ONE);
    }

    pub fn plus(&self, other: &FormVector) -> FormVector {
        let mut v = self.clone();
        v.add_assign(other);
        v
    }

    pub fn minus(&self, other: &FormVector) -> FormVector {
        let mut v = self.clone();
        v.add_scaled(other, &Scalar::int(-1));
        v
    }

    pub fn scale(&self, c: &Scalar) -> FormVector {
        let mut v = FormVector::zero();
        v.add_scaled(self, c);
        v
    }

    pub fn neg(&self) -> FormVector {
        self.scale(&Scalar::int(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or(Scalar::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(Monomial::degree).collect();
        d.dedup();
        d
    }

    /// The homogeneous component of degree `n`.
    pub fn component(&self, n: usize) -> FormVector {
        self.filter(|m| m.degree() == n)
    }

    /// Drops every component of degree above `max`.
    pub fn truncate(&self, max: usize) -> FormVector {
        self.filter(|m| m.degree() <= max)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> FormVector {
        FormVector { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Applies a per-monomial linear map.
    pub fn map_linear(&self, mut f: impl FnMut(&Monomial) -> Result<FormVector>) -> Result<FormVector> {
        let mut out = FormVector::zero();
        for (m, c) in &self.terms {
            out.add_scaled(&f(m)?, c);
        }
        Ok(out)
    }

    /// Applies a per-monomial scalar functional.
    pub fn evaluate(&self, mut f: impl FnMut(&Monomial) -> Result<Scalar>) -> Result<Scalar> {
        let mut acc = Scalar::ZERO;
        for (m, c) in &self.terms {
            acc += &(c * &f(m)?);
        }
        Ok(acc)
    }

    /// Renders with basis labels in the literal syntax `c*a0.d(a1).d(a2)`.
    pub fn display(&self, a: &BasedAlgebra) -> String {
        format_terms(self.terms.iter().map(|(m, c)| (monomial_label(a, m), c.clone())))
    }
}

fn monomial_label(a: &BasedAlgebra, m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    if let Some(l) = m.lead {
        parts.push(a.label(l).to_string());
    } else if m.tail.is_empty() {
        parts.push("1".to_string());
    }
    parts.extend(m.tail.iter().map(|&t| format!("d({})", a.label(t))));
    parts.join(".")
}

/// Adds `c·⟨lead|tail⟩` with the slot `hole` replaced by each term of `x`.
fn add_with_hole(
    out: &mut FormVector,
    c: &Scalar,
    lead: Option<usize>,
    tail: &[usize],
    hole: Hole,
    x: &AlgebraElement,
) {
    for (k, xc) in x.iter() {
        let coeff = c * xc;
        let mut m = Monomial { lead, tail: tail.to_vec() };
        match hole {
            Hole::Lead => m.lead = Some(*k),
            Hole::Tail(p) => m.tail[p] = *k,
        }
        out.add_term(m, &coeff);
    }
}

#[derive(Clone, Copy)]
enum Hole {
    Lead,
    Tail(usize),
}

/// `ã · e_x` in the unitization.
fn lead_times(a: &BasedAlgebra, lead: Option<usize>, x: usize) -> Result<AlgebraElement> {
    match lead {
        None => Ok(SparseVec::unit(x)),
        Some(l) => Ok(a.basis_product(l, x)?.clone()),
    }
}

/// `Σ_{j<m} (-1)^j ⟨… a_j a_{j+1} …⟩` on a monomial with `m = degree ≥ 1`.
fn bprime_mono(a: &BasedAlgebra, m: &Monomial, c: &Scalar, out: &mut FormVector) -> Result<()> {
    let n = m.degree();
    if n == 0 {
        return Ok(());
    }
    // j = 0 merges the leading slot with a₁.
    let p = lead_times(a, m.lead, m.tail[0])?;
    add_with_hole(out, c, None, &m.tail[1..], Hole::Lead, &p);
    for j in 1..n {
        let p = a.basis_product(m.tail[j - 1], m.tail[j])?;
        let mut tail = m.tail.clone();
        tail.remove(j);
        add_with_hole(out, &(c * &Scalar::sign(j)), m.lead, &tail, Hole::Tail(j - 1), p);
    }
    Ok(())
}

/// Universal differential: `d(a₀ da₁…) = da₀ da₁…`, zero on unit-led monomials.
pub fn d(w: &FormVector) -> FormVector {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        if let Some(l) = m.lead {
            let mut tail = Vec::with_capacity(m.tail.len() + 1);
            tail.push(l);
            tail.extend(&m.tail);
            out.add_term(Monomial { lead: None, tail }, c);
        }
    }
    out
}

/// Hochschild boundary.
pub fn b(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        let n = m.degree();
        if n == 0 {
            continue;
        }
        bprime_mono(a, m, c, &mut out)?;
        let last = m.tail[n - 1];
        let p = match m.lead {
            None => SparseVec::unit(last),
            Some(l) => a.basis_product(last, l)?.clone(),
        };
        add_with_hole(&mut out, &(c * &Scalar::sign(n)), None, &m.tail[..n - 1], Hole::Lead, &p);
    }
    Ok(out)
}

/// Bar boundary `b'`, i.e. `b` without its cyclic term.
pub fn bprime(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        bprime_mono(a, m, c, &mut out)?;
    }
    Ok(out)
}

/// `⟨lead|tail⟩ · e_x`, normalized by the Leibniz rule.
fn mono_times_elem(a: &BasedAlgebra, m: &Monomial, x: usize, c: &Scalar, out: &mut FormVector) -> Result<()> {
    let mut ext = m.clone();
    ext.tail.push(x);
    bprime_mono(a, &ext, &(c * &Scalar::sign(m.degree())), out)
}

/// Product of two monomials.
fn mono_mul(a: &BasedAlgebra, x: &Monomial, y: &Monomial, c: &Scalar, out: &mut FormVector) -> Result<()> {
    match y.lead {
        None => {
            let mut tail = x.tail.clone();
            tail.extend(&y.tail);
            out.add_term(Monomial { lead: x.lead, tail }, c);
        }
        Some(l) => {
            let mut tmp = FormVector::zero();
            mono_times_elem(a, x, l, c, &mut tmp)?;
            for (m, k) in tmp.terms {
                let mut tail = m.tail;
                tail.extend(&y.tail);
                out.add_term(Monomial { lead: m.lead, tail }, &k);
            }
        }
    }
    Ok(())
}

/// The ordinary product of forms.
pub fn form_mul(a: &BasedAlgebra, x: &FormVector, y: &FormVector) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (mx, cx) in x.iter() {
        for (my, cy) in y.iter() {
            mono_mul(a, mx, my, &(cx * cy), &mut out)?;
        }
    }
    Ok(out)
}

/// Karoubi operator `κ(ω da) = (-1)^{deg ω} da·ω`, identity in degree 0.
pub fn kappa(a: &BasedAlgebra, w: &FormVector) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        kappa_mono(a, m, c, &mut out)?;
    }
    Ok(out)
}

fn kappa_mono(a: &BasedAlgebra, m: &Monomial, c: &Scalar, out: &mut FormVector) -> Result<()> {
    let n = m.degree();
    if n == 0 {
        out.add_term(m.clone(), c);
        return Ok(());
    }
    let last = m.tail[n - 1];
    let c = c * &Scalar::sign(n - 1);
    match m.lead {
        None => {
            let mut tail = Vec::with_capacity(n);
            tail.push(last);
            tail.extend(&m.tail[..n - 1]);
            out.add_term(Monomial { lead: None, tail }, &c);
        }
        Some(l) => {
            // da·a₀ = d(a a₀) − a da₀
            let mut tail = Vec::with_capacity(n);
            tail.push(0);
            tail.extend(&m.tail[..n - 1]);
            add_with_hole(out, &c, None, &tail, Hole::Tail(0), a.basis_product(last, l)?);
            tail[0] = l;
            out.add_term(Monomial { lead: Some(last), tail }, &(-&c));
        }
    }
    Ok(())
}

pub fn kappa_pow(a: &BasedAlgebra, w: &FormVector, k: usize) -> Result<FormVector> {
    let mut v = w.clone();
    for _ in 0..k {
        v = kappa(a, &v)?;
    }
    Ok(v)
}

/// Connes' operator `B = Σ_{j=0}^{n} κ^j d` on `Ωⁿ`.
///
/// On exact forms κ acts as a signed cyclic rotation, so no products occur.
pub fn connes_b(w: &FormVector) -> FormVector {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        let Some(l) = m.lead else { continue };
        let n = m.degree();
        let mut slots = Vec::with_capacity(n + 1);
        slots.push(l);
        slots.extend(&m.tail);
        let step = Scalar::sign(n);
        let mut coef = c.clone();
        for _ in 0..=n {
            out.add_term(Monomial { lead: None, tail: slots.clone() }, &coef);
            slots.rotate_right(1);
            coef = &coef * &step;
        }
    }
    out
}

/// Fedosov product `x ⊙ y = xy − (-1)^{deg x} dx dy`, degreewise in `x`.
pub fn fedosov(a: &BasedAlgebra, x: &FormVector, y: &FormVector) -> Result<FormVector> {
    let mut out = form_mul(a, x, y)?;
    let dy = d(y);
    for n in x.degrees() {
        let dx = d(&x.component(n));
        out.add_scaled(&form_mul(a, &dx, &dy)?, &(-Scalar::sign(n)));
    }
    Ok(out)
}

/// Fedosov product with all components of degree `≥ cutoff` discarded.
pub fn fedosov_truncated(a: &BasedAlgebra, x: &FormVector, y: &FormVector, cutoff: usize) -> Result<FormVector> {
    let mut out = FormVector::zero();
    for (mx, cx) in x.iter() {
        for (my, cy) in y.iter() {
            let dx = mx.degree();
            if dx + my.degree() >= cutoff {
                continue;
            }
            let c = cx * cy;
            mono_mul(a, mx, my, &c, &mut out)?;
            if dx + my.degree() + 2 < cutoff && mx.lead.is_some() && my.lead.is_some() {
                let ddx = d(&FormVector::monomial(mx.clone()));
                let ddy = d(&FormVector::monomial(my.clone()));
                let (mdx, _) = ddx.iter().next().expect("nonzero differential");
                let (mdy, _) = ddy.iter().next().expect("nonzero differential");
                mono_mul(a, mdx, mdy, &(-&c * &Scalar::sign(dx)), &mut out)?;
            }
        }
    }
    Ok(out)
}

/// Left multiplication by an algebra element.
pub fn left_mul(a: &BasedAlgebra, x: &AlgebraElement, w: &FormVector) -> Result<FormVector> {
    form_mul(a, &FormVector::from_element(x), w)
}

/// Right multiplication by an algebra element.
pub fn right_mul(a: &BasedAlgebra, w: &FormVector, x: &AlgebraElement) -> Result<FormVector> {
    form_mul(a, w, &FormVector::from_element(x))
}

/// `dx` for an algebra element `x`.
pub fn d_elem(x: &AlgebraElement) -> FormVector {
    d(&FormVector::from_element(x))
}

/// Number of monomials spanning `Ωⁿ(A)` (degree zero excludes the formal unit).
pub fn omega_dim(dim_a: usize, n: usize) -> usize {
    if n == 0 {
        dim_a
    } else {
        (dim_a + 1) * dim_a.pow(n as u32)
    }
}

/// Mixed-radix indexing of the monomial basis of `Ωⁿ(A)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBasis {
    pub dim_a: usize,
    pub degree: usize,
}

impl DegreeBasis {
    pub fn new(dim_a: usize, degree: usize) -> DegreeBasis {
        DegreeBasis { dim_a, degree }
    }

    pub fn len(&self) -> usize {
        omega_dim(self.dim_a, self.degree)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, m: &Monomial) -> usize {
        debug_assert_eq!(m.degree(), self.degree);
        let mut idx = 0;
        for &t in &m.tail {
            idx = idx * self.dim_a + t;
        }
        if self.degree == 0 {
            m.lead.expect("degree-zero forms have no formal unit")
        } else {
            let lead = m.lead.map_or(0, |l| l + 1);
            lead * self.dim_a.pow(self.degree as u32) + idx
        }
    }

    pub fn monomial(&self, idx: usize) -> Monomial {
        if self.degree == 0 {
            return Monomial::elem(idx);
        }
        let block = self.dim_a.pow(self.degree as u32);
        let (lead, mut rest) = (idx / block, idx % block);
        let mut tail = vec![0; self.degree];
        for slot in tail.iter_mut().rev() {
            *slot = rest % self.dim_a;
            rest /= self.dim_a;
        }
        Monomial { lead: lead.checked_sub(1), tail }
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        (0..self.len()).map(|i| self.monomial(i))
    }

    /// Coordinates of the degree-`n` part of `w`.
    pub fn coords(&self, w: &FormVector) -> SparseVec {
        SparseVec::from_entries(
            w.iter().filter(|(m, _)| m.degree() == self.degree).map(|(m, c)| (self.index(m), c.clone())),
        )
    }

    pub fn form(&self, v: &SparseVec) -> FormVector {
        let mut out = FormVector::zero();
        for (i, c) in v.iter() {
            out.add_term(self.monomial(*i), c);
        }
        out
    }
}

/// Matrix of a linear operator `Ω^from → Ω^to` in monomial coordinates.
pub fn operator_matrix(
    dim_a: usize,
    from: usize,
    to: usize,
    mut f: impl FnMut(&FormVector) -> Result<FormVector>,
) -> Result<SparseMatrix> {
    let src = DegreeBasis::new(dim_a, from);
    let dst = DegreeBasis::new(dim_a, to);
    let mut cols = Vec::with_capacity(src.len());
    for m in src.monomials() {
        let image = f(&FormVector::monomial(m))?;
        if image.iter().any(|(m, _)| m.degree() != to) {
            return Err(Error::invalid(format!("operator does not map degree {from} into degree {to}")));
        }
        cols.push(dst.coords(&image));
    }
    Ok(SparseMatrix::from_columns(dst.len(), cols))
}

/// Random monomial of degree `n` in `Ωⁿ(A)`. For windowed algebras the
/// absolute window degrees of all slots sum to at most the window bound, so
/// no operator in this crate can overflow on it.
pub fn random_monomial<R: Rng>(a: &BasedAlgebra, n: usize, rng: &mut R) -> Monomial {
    random_monomial_within(a, n, a.window_bound().unwrap_or(i64::MAX), rng)
}

/// Like [`random_monomial`] with an explicit window budget.
pub fn random_monomial_within<R: Rng>(a: &BasedAlgebra, n: usize, budget: i64, rng: &mut R) -> Monomial {
    let dim = a.dim();
    let mut budget = budget;
    let mut pick = |rng: &mut R| -> usize {
        match a.window() {
            None => rng.gen_range(0..dim),
            Some(w) => {
                let allowed: Vec<usize> = (0..dim).filter(|&i| w[i].abs() <= budget).collect();
                let i = allowed[rng.gen_range(0..allowed.len())];
                budget -= w[i].abs();
                i
            }
        }
    };
    let lead = if n > 0 && rng.gen_range(0..=dim) == 0 { None } else { Some(pick(rng)) };
    let tail = (0..n).map(|_| pick(rng)).collect();
    Monomial { lead, tail }
}

/// Random homogeneous form with up to `terms` monomials and small integer
/// coefficients.
pub fn random_form<R: Rng>(a: &BasedAlgebra, n: usize, terms: usize, rng: &mut R) -> FormVector {
    random_form_within(a, n, terms, a.window_bound().unwrap_or(i64::MAX), rng)
}

/// Like [`random_form`] with an explicit window budget, for forms that will
/// be multiplied together.
pub fn random_form_within<R: Rng>(a: &BasedAlgebra, n: usize, terms: usize, budget: i64, rng: &mut R) -> FormVector {
    let mut w = FormVector::zero();
    for _ in 0..terms.max(1) {
        let m = random_monomial_within(a, n, budget, rng);
        let c = Scalar::int(rng.gen_range(-3..=3));
        w.add_term(m, &c);
    }
    w
}

/// All monomials of `Ωⁿ(A)` that are safe inside a window (see
/// [`random_monomial`]); every monomial when unwindowed.
pub fn window_safe_monomials(a: &BasedAlgebra, n: usize) -> Vec<Monomial> {
    let basis = DegreeBasis::new(a.dim(), n);
    match (a.window(), a.window_bound()) {
        (Some(w), Some(bound)) => basis
            .monomials()
            .filter(|m| m.lead.map_or(0, |l| w[l].abs()) + m.tail.iter().map(|&t| w[t].abs()).sum::<i64>() <= bound)
            .collect(),
        _ => basis.monomials().collect(),
    }
}

/// Errors if `w` is not homogeneous of the given degree.
pub fn expect_degree(w: &FormVector, n: usize) -> Result<()> {
    if w.iter().all(|(m, _)| m.degree() == n) {
        Ok(())
    } else {
        Err(Error::invalid(format!("expected a homogeneous form of degree {n}")))
    }
}

/// `Ω(f)(ã₀ da₁ … daₙ) = f̃(ã₀) df(a₁) … df(aₙ)` for a linear map `f`,
/// with the formal unit sent to the formal unit.
pub fn pushforward(f: &LinearMapT, w: &FormVector) -> FormVector {
    let mut out = FormVector::zero();
    for (m, c) in w.iter() {
        let mut partial: Vec<(Monomial, Scalar)> = match m.lead {
            None => vec![(Monomial::new(None, Vec::new()), c.clone())],
            Some(l) => f.image(l).iter().map(|(i, x)| (Monomial::elem(*i), c * x)).collect(),
        };
        for &t in &m.tail {
            let mut next = Vec::with_capacity(partial.len() * f.image(t).nnz());
            for (pm, pc) in &partial {
                for (i, x) in f.image(t).iter() {
                    let mut tail = pm.tail.clone();
                    tail.push(*i);
                    next.push((Monomial { lead: pm.lead, tail }, pc * x));
                }
            }
            partial = next;
        }
        for (pm, pc) in partial {
            out.add_term(pm, &pc);
        }
    }
    out
}
