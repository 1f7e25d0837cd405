//! Chern character cocycles of finite-dimensional Fredholm modules.
//!
//! A Fredholm module is an involution `F` on `V = ℚ(i)^N`, a grading `γ` in
//! the even case, and a homomorphism `φ: A → End(V)`. With
//! `δ(T) = (i/2)[F, T]` the map `ψ(ã₀ da₁ … daₙ) = φ(ã₀) δφ(a₁) … δφ(aₙ)`
//! turns traces into cochains on `Ω(A)`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraElement, BasedAlgebra, LinearMapT};
use crate::error::{Error, Result};
use crate::forms::{b, d, d_elem, form_mul, kappa, DegreeBasis, FormVector, Monomial};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;
use crate::tensor::lift_idempotent;
use crate::xcomplex::partial_boundary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The constant `c₁` of the odd character.
pub fn c1() -> Scalar {
    Scalar::ONE
}

/// `c̃₁ = c₁⁻¹`.
pub fn c1_tilde() -> Scalar {
    c1().inv()
}

/// `c_{2n} = 2n(2n−2)⋯2 / ((2n−1)(2n−3)⋯1)`.
pub fn c_even(n: usize) -> Scalar {
    (1..=n).fold(Scalar::ONE, |acc, j| acc * Scalar::ratio(2 * j as i64, 2 * j as i64 - 1))
}

fn trace(m: &SparseMatrix) -> Scalar {
    (0..m.rows.min(m.cols)).map(|i| m.get(i, i)).sum()
}

fn commutator(x: &SparseMatrix, y: &SparseMatrix) -> SparseMatrix {
    x.compose(y).sub(&y.compose(x))
}

fn anticommutator(x: &SparseMatrix, y: &SparseMatrix) -> SparseMatrix {
    x.compose(y).add(&y.compose(x))
}

/// Row-major vectorization `(r, c) ↦ r·N + c`.
pub fn matrix_to_vec(m: &SparseMatrix) -> SparseVec {
    let n = m.cols;
    SparseVec::from_entries(
        m.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, x)| (r * n + c, x.clone()))),
    )
}

pub fn vec_to_matrix(v: &SparseVec, n: usize) -> SparseMatrix {
    let mut cols = vec![Vec::new(); n];
    for (k, x) in v.iter() {
        cols[k % n].push((k / n, x.clone()));
    }
    SparseMatrix::from_columns(n, cols.into_iter().map(SparseVec::from_entries).collect())
}

/// Matrix Fredholm data `(V, F, γ, φ)` over a based algebra.
#[derive(Clone, Debug)]
pub struct FredholmData {
    algebra: BasedAlgebra,
    n: usize,
    f: SparseMatrix,
    gamma: Option<SparseMatrix>,
    phi: Vec<SparseMatrix>,
    delta: Vec<SparseMatrix>,
}

impl FredholmData {
    /// Validates `F² = 1`, the grading axioms when `γ` is given, and
    /// multiplicativity of `φ`, given as a map `A → ℚ(i)^{N²}`.
    pub fn new(
        algebra: &BasedAlgebra,
        f: SparseMatrix,
        gamma: Option<SparseMatrix>,
        phi: &LinearMapT,
    ) -> Result<FredholmData> {
        let n = f.rows;
        if f.cols != n {
            return Err(Error::invalid(format!("F is {}×{}, not square", f.rows, f.cols)));
        }
        if phi.domain() != algebra.dim() || phi.codomain() != n * n {
            return Err(Error::invalid(format!(
                "φ must map a {}-dimensional algebra into {}×{} matrices",
                algebra.dim(),
                n,
                n
            )));
        }
        let id = SparseMatrix::identity(n);
        if f.compose(&f) != id {
            return Err(Error::invalid("F² ≠ 1"));
        }
        let images: Vec<SparseMatrix> = (0..algebra.dim()).map(|i| vec_to_matrix(phi.image(i), n)).collect();
        if let Some(g) = &gamma {
            if g.rows != n || g.cols != n {
                return Err(Error::invalid("γ has the wrong size"));
            }
            if g.compose(g) != id {
                return Err(Error::invalid("γ² ≠ 1"));
            }
            if !anticommutator(&f, g).is_zero() {
                return Err(Error::invalid("Fγ + γF ≠ 0"));
            }
            if let Some(i) = images.iter().position(|x| !commutator(g, x).is_zero()) {
                return Err(Error::invalid(format!("[γ, φ({})] ≠ 0", algebra.label(i))));
            }
        }
        for i in 0..algebra.dim() {
            for j in 0..algebra.dim() {
                let lhs = vec_to_matrix(&phi.apply(algebra.basis_product(i, j)?), n);
                if lhs != images[i].compose(&images[j]) {
                    return Err(Error::invalid(format!(
                        "φ is not multiplicative at ({}, {})",
                        algebra.label(i),
                        algebra.label(j)
                    )));
                }
            }
        }
        let half_i = Scalar::i() * Scalar::ratio(1, 2);
        let delta = images.iter().map(|x| commutator(&f, x).scale(&half_i)).collect();
        Ok(FredholmData { algebra: algebra.clone(), n, f, gamma, phi: images, delta })
    }

    pub fn algebra(&self) -> &BasedAlgebra {
        &self.algebra
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        if self.gamma.is_some() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn f(&self) -> &SparseMatrix {
        &self.f
    }

    pub fn gamma(&self) -> Option<&SparseMatrix> {
        self.gamma.as_ref()
    }

    pub fn phi(&self, x: &AlgebraElement) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.n, self.n);
        for (i, c) in x.iter() {
            out = out.add(&self.phi[*i].scale(c));
        }
        out
    }

    /// `δ(φ(x)) = (i/2)[F, φ(x)]`.
    pub fn delta(&self, x: &AlgebraElement) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.n, self.n);
        for (i, c) in x.iter() {
            out = out.add(&self.delta[*i].scale(c));
        }
        out
    }

    fn psi_monomial(&self, m: &Monomial) -> SparseMatrix {
        let mut out = match m.lead {
            None => SparseMatrix::identity(self.n),
            Some(l) => self.phi[l].clone(),
        };
        for &t in &m.tail {
            out = out.compose(&self.delta[t]);
        }
        out
    }

    /// `ψ(ω)` for a form of any degrees.
    pub fn psi(&self, w: &FormVector) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.n, self.n);
        for (m, c) in w.iter() {
            out = out.add(&self.psi_monomial(m).scale(c));
        }
        out
    }

    fn expect(&self, parity: Parity) -> Result<()> {
        if self.parity() == parity {
            Ok(())
        } else {
            Err(Error::Parity(format!("{} cochain requested from {} Fredholm data", parity, self.parity())))
        }
    }
}

/// `Fψ(ω) − (−1)ⁿψ(ω)F − (2/i)ψ(dω)` for `ω ∈ Ωⁿ`; zero for every `ω`.
pub fn psi_commutator_defect(fd: &FredholmData, w: &FormVector) -> SparseMatrix {
    let mut out = SparseMatrix::zeros(fd.n, fd.n);
    for deg in w.degrees() {
        let part = w.component(deg);
        let p = fd.psi(&part);
        let sign = Scalar::sign(deg);
        let lhs = fd.f.compose(&p).sub(&p.compose(&fd.f).scale(&sign));
        let rhs = fd.psi(&d(&part)).scale(&(Scalar::int(2) * Scalar::i().inv()));
        out = out.add(&lhs.sub(&rhs));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CochainKind {
    Tau,
    Transgression,
}

/// A level-homogeneous cochain `ω ↦ coeff · tr(W ψ(ω))` on `Ω^level`.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub kind: CochainKind,
    pub level: usize,
    pub coeff: Scalar,
    weight: SparseMatrix,
    fd: FredholmData,
}

impl Cochain {
    pub fn parity(&self) -> Parity {
        Parity::of(self.level)
    }

    pub fn name(&self) -> String {
        match self.kind {
            CochainKind::Tau => format!("tau_{}", self.level),
            CochainKind::Transgression => format!("h_{}", self.level),
        }
    }

    /// Evaluates on the degree-`level` part of `w`.
    pub fn evaluate(&self, w: &FormVector) -> Scalar {
        let part = w.component(self.level);
        if part.is_zero() {
            return Scalar::zero();
        }
        &self.coeff * trace(&self.weight.compose(&self.fd.psi(&part)))
    }

    fn on_monomial(&self, m: &Monomial) -> Scalar {
        self.evaluate(&FormVector::monomial(m.clone()))
    }
}

/// `τ_{2n}(ω) = c_{2n} tr(γ ψ(ω))`.
pub fn tau_even(fd: &FredholmData, n: usize) -> Result<Cochain> {
    fd.expect(Parity::Even)?;
    let weight = fd.gamma.clone().expect("even data has a grading");
    Ok(Cochain { kind: CochainKind::Tau, level: 2 * n, coeff: c_even(n), weight, fd: fd.clone() })
}

/// `τ_{2n+1}(ω) = i c̃₁ tr(ψ(ω))`.
pub fn tau_odd(fd: &FredholmData, n: usize) -> Result<Cochain> {
    fd.expect(Parity::Odd)?;
    Ok(Cochain {
        kind: CochainKind::Tau,
        level: 2 * n + 1,
        coeff: Scalar::i() * c1_tilde(),
        weight: SparseMatrix::identity(fd.n),
        fd: fd.clone(),
    })
}

/// `τ_level` for the parity of `level`.
pub fn tau(fd: &FredholmData, level: usize) -> Result<Cochain> {
    match Parity::of(level) {
        Parity::Even => tau_even(fd, level / 2),
        Parity::Odd => tau_odd(fd, level / 2),
    }
}

/// `h_{2n+1}(ω) = c_{2n}/(2n+1) tr(iFγψ(ω))` for even data and
/// `h_{2n}(ω) = −½ c̃₁ tr(Fψ(ω))`, `n ≥ 1`, for odd data.
pub fn h_cochain(fd: &FredholmData, level: usize) -> Result<Cochain> {
    match Parity::of(level) {
        Parity::Odd => {
            fd.expect(Parity::Even)?;
            let n = level / 2;
            let weight = fd.f.compose(fd.gamma.as_ref().expect("even data has a grading"));
            let coeff = Scalar::i() * c_even(n) * Scalar::ratio(1, level as i64);
            Ok(Cochain { kind: CochainKind::Transgression, level, coeff, weight, fd: fd.clone() })
        }
        Parity::Even => {
            fd.expect(Parity::Odd)?;
            if level == 0 {
                return Err(Error::invalid("h_0 is undefined"));
            }
            let coeff = Scalar::ratio(-1, 2) * c1_tilde();
            Ok(Cochain { kind: CochainKind::Transgression, level, coeff, weight: fd.f.clone(), fd: fd.clone() })
        }
    }
}

fn first_failure<'a>(
    monomials: impl Iterator<Item = Monomial> + 'a,
    mut check: impl FnMut(&Monomial) -> Result<bool>,
) -> Result<Option<Monomial>> {
    for m in monomials {
        if !check(&m)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn generators(dim_a: usize, degree: usize) -> impl Iterator<Item = Monomial> {
    let basis = DegreeBasis::new(dim_a, degree);
    let unit = (degree == 0).then(Monomial::unit);
    unit.into_iter().chain((0..basis.len()).map(move |i| basis.monomial(i)))
}

fn describe(a: &BasedAlgebra, m: &Option<Monomial>) -> Option<String> {
    m.as_ref().map(|m| FormVector::monomial(m.clone()).display(a))
}

/// Closed graded trace property of a `τ` cochain, checked on every monomial.
#[derive(Clone, Debug, Serialize)]
pub struct ClosednessReport {
    pub level: usize,
    /// `τ∘d = 0` on `Ω^{level−1}`.
    pub d_closed: bool,
    /// `τ∘b = 0` on `Ω^{level+1}`.
    pub b_closed: bool,
    /// `τ∘κ = τ` on `Ω^level`.
    pub kappa_invariant: bool,
    pub failure: Option<String>,
}

impl ClosednessReport {
    pub fn passed(&self) -> bool {
        self.d_closed && self.b_closed && self.kappa_invariant
    }
}

pub fn closedness_check(tau: &Cochain) -> Result<ClosednessReport> {
    let a = &tau.fd.algebra;
    let dim = a.dim();
    let level = tau.level;
    let d_fail = match level.checked_sub(1) {
        None => None,
        Some(lower) => {
            first_failure(generators(dim, lower), |m| Ok(tau.evaluate(&d(&FormVector::monomial(m.clone()))).is_zero()))?
        }
    };
    let b_fail = first_failure(generators(dim, level + 1), |m| {
        Ok(tau.evaluate(&b(a, &FormVector::monomial(m.clone()))?).is_zero())
    })?;
    let k_fail = first_failure(generators(dim, level), |m| {
        Ok(tau.evaluate(&kappa(a, &FormVector::monomial(m.clone()))?) == tau.on_monomial(m))
    })?;
    let failure = [("τ∘d", &d_fail), ("τ∘b", &b_fail), ("τ∘κ − τ", &k_fail)]
        .into_iter()
        .find_map(|(name, m)| describe(a, m).map(|s| format!("{name} ≠ 0 at {s}")));
    Ok(ClosednessReport {
        level,
        d_closed: d_fail.is_none(),
        b_closed: b_fail.is_none(),
        kappa_invariant: k_fail.is_none(),
        failure,
    })
}

/// `h∘∂ = τ_{lower} − τ_{lower+2}` and `h∘κ = h` on all monomials of the
/// relevant degrees.
#[derive(Clone, Debug, Serialize)]
pub struct TransgressionReport {
    pub parity: Parity,
    pub h_level: usize,
    pub lower: usize,
    pub kappa_invariant: bool,
    pub identity_holds: bool,
    pub checked: usize,
    /// Generators on which `h∘∂` is nonzero.
    pub nonzero: usize,
    pub failure: Option<String>,
}

impl TransgressionReport {
    pub fn passed(&self) -> bool {
        self.kappa_invariant && self.identity_holds
    }
}

/// For even data checks `h_{2n+1}`; for odd data `h_{2n}`, `n ≥ 1`.
pub fn transgression_check(fd: &FredholmData, n: usize) -> Result<TransgressionReport> {
    let a = &fd.algebra;
    let (h_level, lower) = match fd.parity() {
        Parity::Even => (2 * n + 1, 2 * n),
        Parity::Odd => {
            if n == 0 {
                return Err(Error::invalid("odd transgressions start at h_2"));
            }
            (2 * n, 2 * n - 1)
        }
    };
    let h = h_cochain(fd, h_level)?;
    let lo = tau(fd, lower)?;
    let hi = tau(fd, lower + 2)?;
    let k_fail = first_failure(generators(a.dim(), h_level), |m| {
        Ok(h.evaluate(&kappa(a, &FormVector::monomial(m.clone()))?) == h.on_monomial(m))
    })?;
    let mut checked = 0;
    let mut nonzero = 0;
    let mut id_fail = None;
    for deg in [lower, lower + 2] {
        id_fail = first_failure(generators(a.dim(), deg), |m| {
            checked += 1;
            let w = FormVector::monomial(m.clone());
            let lhs = h.evaluate(&partial_boundary(a, &w)?);
            nonzero += usize::from(!lhs.is_zero());
            Ok(lhs == lo.evaluate(&w) - hi.evaluate(&w))
        })?;
        if id_fail.is_some() {
            break;
        }
    }
    let failure = describe(a, &k_fail)
        .map(|s| format!("{}∘κ ≠ {} at {s}", h.name(), h.name()))
        .or_else(|| describe(a, &id_fail).map(|s| format!("{}∘∂ ≠ {} − {} at {s}", h.name(), lo.name(), hi.name())));
    Ok(TransgressionReport {
        parity: fd.parity(),
        h_level,
        lower,
        kappa_invariant: k_fail.is_none(),
        identity_holds: id_fail.is_none(),
        checked,
        nonzero,
        failure,
    })
}

/// The even character `ĉh(e) = ê` in `T A/(J A)ᵏ`, forms of degree `< 2k`.
pub fn ch_even(a: &BasedAlgebra, e: &AlgebraElement, k: usize) -> Result<FormVector> {
    if e.is_zero() {
        return Ok(FormVector::zero());
    }
    lift_idempotent(a, e, k)
}

/// `y` with `(1+x)(1+y) = (1+y)(1+x) = 1`.
pub fn inverse_minus_one(a: &BasedAlgebra, x: &AlgebraElement) -> Result<AlgebraElement> {
    // windowed algebras: only basis elements whose product with x stays inside
    let mut support = Vec::new();
    let mut columns = Vec::new();
    for j in 0..a.dim() {
        match a.multiply(x, &SparseVec::unit(j)) {
            Ok(p) => {
                support.push(j);
                columns.push(p.add(&SparseVec::unit(j)));
            }
            Err(Error::WindowOverflow { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let left = SparseMatrix::from_columns(a.dim(), columns);
    let not_inv = || Error::invalid(format!("1 + {} is not invertible", a.format_element(x)));
    let c = left.solve(&x.scale(&-Scalar::ONE)).ok_or_else(not_inv)?;
    let y = c.remap(|i| Some(support[i]));
    let r = x.add(&y).add(&a.multiply(&y, x)?);
    if !r.is_zero() {
        return Err(not_inv());
    }
    Ok(y)
}

/// The odd character `c₁ Σ_{j<k} (dx + y dx)(dy dx)^j` with `1+y = (1+x)⁻¹`.
pub fn ch_odd(a: &BasedAlgebra, x: &AlgebraElement, k: usize) -> Result<FormVector> {
    let y = inverse_minus_one(a, x)?;
    let dx = d_elem(x);
    let head = dx.plus(&form_mul(a, &FormVector::from_element(&y), &dx)?);
    let dydx = form_mul(a, &d_elem(&y), &dx)?;
    let mut term = head;
    let mut out = FormVector::zero();
    for _ in 0..k {
        out.add_assign(&term);
        term = form_mul(a, &term, &dydx)?;
    }
    Ok(out.scale(&c1()))
}

/// `∂z` in degrees below the truncation guard `2k − 2`.
pub fn cycle_defect(a: &BasedAlgebra, z: &FormVector, k: usize) -> Result<FormVector> {
    Ok(partial_boundary(a, z)?.truncate((2 * k).saturating_sub(2)))
}

/// `Σ_c c(z)`.
pub fn pair(cochains: &[Cochain], z: &FormVector) -> Scalar {
    cochains.iter().map(|c| c.evaluate(z)).sum()
}

/// `⟨τ_level, z⟩` for every level of the data's parity up to `max_level`,
/// refusing levels at or beyond the truncation of `z`.
pub fn pairing_levels(fd: &FredholmData, z: &FormVector, k: usize, max_level: usize) -> Result<Vec<(usize, Scalar)>> {
    let start = match fd.parity() {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    if max_level + 1 >= 2 * k + start {
        return Err(Error::invalid(format!("truncation k = {k} is too small for level {max_level}")));
    }
    (start..=max_level).step_by(2).map(|l| Ok((l, tau(fd, l)?.evaluate(z)))).collect()
}

fn diag(entries: &[i64]) -> SparseMatrix {
    let n = entries.len();
    SparseMatrix::from_columns(n, (0..n).map(|i| SparseVec::unit(i).scale(&Scalar::int(entries[i]))).collect())
}

fn images_map(mats: &[SparseMatrix]) -> Result<LinearMapT> {
    let n = mats.first().map_or(0, |m| m.rows);
    LinearMapT::new(mats.len(), n * n, mats.iter().map(matrix_to_vec).collect())
}

/// `V = ℚ(i)²`, `γ = diag(1,−1)`, `F` the swap, `φ(e) = diag(1,0)` on the
/// ground field.
pub fn point_model() -> FredholmData {
    let a = crate::algebra::field();
    let f = SparseMatrix::from_columns(2, vec![SparseVec::unit(1), SparseVec::unit(0)]);
    let phi = images_map(&[diag(&[1, 0])]).expect("2×2 image");
    FredholmData::new(&a, f, Some(diag(&[1, -1])), &phi).expect("valid point model")
}

/// `V = ℚ(i)^{2N}` with `F = diag(1,…,1,−1,…,−1)` and the group algebra of
/// `ℤ/2N` acting through the cyclic shift `u eⱼ = e_{j+1}`.
pub fn cyclic_shift_model(n: usize) -> FredholmData {
    assert!(n >= 1);
    let m = 2 * n;
    let a = crate::algebra::cyclic_group_algebra(m);
    let signs: Vec<i64> = (0..m).map(|j| if j < n { 1 } else { -1 }).collect();
    let shift_pow = |k: usize| SparseMatrix::from_columns(m, (0..m).map(|j| SparseVec::unit((j + k) % m)).collect());
    let phi = images_map(&(0..m).map(shift_pow).collect::<Vec<_>>()).expect("shift images");
    FredholmData::new(&a, diag(&signs), None, &phi).expect("valid shift model")
}

/// Two representations `ρ₊, ρ₋` of `A` on `ℚ(i)^m` combined on
/// `V = ℚ(i)^{2m}` as `φ = ρ₊ ⊕ ρ₋`, with `F` swapping the summands and, for
/// even parity, `γ = 1 ⊕ −1`.
pub fn doubled_model(
    a: &BasedAlgebra,
    plus: &[SparseMatrix],
    minus: &[SparseMatrix],
    parity: Parity,
) -> Result<FredholmData> {
    let m = plus.first().map_or(0, |x| x.rows);
    if plus.len() != a.dim() || minus.len() != a.dim() {
        return Err(Error::invalid("one matrix per basis element is required on each side"));
    }
    let block = |x: &SparseMatrix, y: &SparseMatrix| {
        let mut cols: Vec<SparseVec> = x.columns.clone();
        cols.extend(y.columns.iter().map(|c| c.remap(|i| Some(i + m))));
        SparseMatrix::from_columns(2 * m, cols)
    };
    let images: Vec<SparseMatrix> = plus.iter().zip(minus).map(|(x, y)| block(x, y)).collect();
    let f = SparseMatrix::from_columns(2 * m, (0..2 * m).map(|j| SparseVec::unit((j + m) % (2 * m))).collect());
    let gamma =
        (parity == Parity::Even).then(|| diag(&(0..2 * m).map(|j| if j < m { 1 } else { -1 }).collect::<Vec<_>>()));
    FredholmData::new(a, f, gamma, &images_map(&images)?)
}

/// Matrix units of `M_n` as `n×n` matrices, in the basis order of
/// `matrix_algebra(n)`.
pub fn matrix_units(n: usize) -> Vec<SparseMatrix> {
    (0..n * n)
        .map(|k| {
            let mut cols = vec![SparseVec::new(); n];
            cols[k % n] = SparseVec::unit(k / n);
            SparseMatrix::from_columns(n, cols)
        })
        .collect()
}

/// `T x T⁻¹` applied to each matrix.
pub fn conjugate_all(mats: &[SparseMatrix], t: &SparseMatrix, t_inv: &SparseMatrix) -> Vec<SparseMatrix> {
    mats.iter().map(|x| t.compose(x).compose(t_inv)).collect()
}
