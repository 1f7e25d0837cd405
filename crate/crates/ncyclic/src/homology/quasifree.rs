//! Quasi-freeness and `n`-dimensionality as linear systems for the
//! splitting map `φ: A^{⊗n} → Ω^{n+1}A`, connections built from `φ`, the
//! projector `[b, ∇]`, and the chain map `∇*: X(A) → 𝒳₂(A)`.

use serde::Serialize;

use super::hodge::{form_span_rank, hodge_tower, HodgeTower};
use crate::algebra::{BasedAlgebra, LinearMapT};
use crate::error::{Error, Result};
use crate::forms::{b, d, form_mul, operator_matrix, DegreeBasis, FormVector, Monomial};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;
use crate::tensor::truncated_tensor_algebra;

fn tuple_index(dim: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| acc * dim + x)
}

fn tuple_at(dim: usize, len: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = idx % dim;
        idx /= dim;
    }
    t
}

fn tuple_count(dim: usize, len: usize) -> usize {
    dim.pow(len as u32)
}

fn exact_monomial(t: &[usize]) -> FormVector {
    FormVector::monomial(Monomial::new(None, t.to_vec()))
}

/// Outcome of solving for `φ` at dimension `n`.
#[derive(Clone, Debug)]
pub struct DimensionDecision {
    pub level: usize,
    pub feasible: bool,
    /// `φ(a₁, …, aₙ)` indexed by the tuple in mixed radix.
    pub phi: Option<Vec<FormVector>>,
    /// A functional `y` with `yᵀM = 0` and `yᵀ(rhs) = 1`.
    pub certificate: Option<SparseVec>,
    /// The witness or certificate was re-checked independently of the solver.
    pub verified: bool,
}

/// The system `M·φ = rhs` encoding
/// `a₀φ(a₁…aₙ) − Σ_{j<n} (−1)ʲ φ(…a_j a_{j+1}…) + (−1)^{n+1} φ(a₀…a_{n−1})aₙ = da₀…daₙ`.
fn dimension_system(a: &BasedAlgebra, n: usize) -> Result<(SparseMatrix, SparseVec)> {
    let dim = a.dim();
    let target = DegreeBasis::new(dim, n + 1);
    let dd = target.len();
    let left = (0..dim)
        .map(|x| operator_matrix(dim, n + 1, n + 1, |w| form_mul(a, &FormVector::from_element(&a.basis_element(x)), w)))
        .collect::<Result<Vec<_>>>()?;
    let right = (0..dim)
        .map(|x| operator_matrix(dim, n + 1, n + 1, |w| form_mul(a, w, &FormVector::from_element(&a.basis_element(x)))))
        .collect::<Result<Vec<_>>>()?;
    let unknowns = tuple_count(dim, n) * dd;
    let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); unknowns];
    let mut rhs = Vec::new();
    for si in 0..tuple_count(dim, n + 1) {
        let s = tuple_at(dim, n + 1, si);
        let r0 = si * dd;
        let mut place = |t: &[usize], m: &SparseMatrix, c: &Scalar| {
            let t0 = tuple_index(dim, t) * dd;
            for (mu, col) in m.columns.iter().enumerate() {
                for (row, x) in col.iter() {
                    cols[t0 + mu].push((r0 + row, x * c));
                }
            }
        };
        place(&s[1..], &left[s[0]], &Scalar::ONE);
        place(&s[..n], &right[s[n]], &Scalar::sign(n + 1));
        for j in 0..n {
            for (k, c) in a.basis_product(s[j], s[j + 1])?.iter() {
                let mut t = s[..j].to_vec();
                t.push(*k);
                t.extend(&s[j + 2..]);
                let t0 = tuple_index(dim, &t) * dd;
                let coef = -(c * &Scalar::sign(j));
                for mu in 0..dd {
                    cols[t0 + mu].push((r0 + mu, coef.clone()));
                }
            }
        }
        rhs.extend(target.coords(&exact_monomial(&s)).0.into_iter().map(|(i, x)| (r0 + i, x)));
    }
    let rows = tuple_count(dim, n + 1) * dd;
    let m = SparseMatrix::from_columns(rows, cols.into_iter().map(SparseVec::from_entries).collect());
    Ok((m, SparseVec::from_entries(rhs)))
}

/// Checks the defining identity of an `n`-dimensional splitting map `φ`;
/// returns the first failing tuple.
pub fn phi_defect(a: &BasedAlgebra, n: usize, phi: &[FormVector]) -> Result<Option<Vec<usize>>> {
    let dim = a.dim();
    let at = |t: &[usize]| &phi[tuple_index(dim, t)];
    for si in 0..tuple_count(dim, n + 1) {
        let s = tuple_at(dim, n + 1, si);
        let mut lhs = form_mul(a, &FormVector::from_element(&a.basis_element(s[0])), at(&s[1..]))?;
        lhs.add_scaled(
            &form_mul(a, at(&s[..n]), &FormVector::from_element(&a.basis_element(s[n])))?,
            &Scalar::sign(n + 1),
        );
        for j in 0..n {
            for (k, c) in a.basis_product(s[j], s[j + 1])?.iter() {
                let mut t = s[..j].to_vec();
                t.push(*k);
                t.extend(&s[j + 2..]);
                lhs.add_scaled(at(&t), &-(c * &Scalar::sign(j)));
            }
        }
        if lhs != exact_monomial(&s) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Decides whether `A` has a splitting map `φ: A^{⊗n} → Ω^{n+1}A`, i.e.
/// whether `A` has dimension at most `n` in the sense of bimodule
/// resolutions. Returns `φ` or an infeasibility certificate.
pub fn dimension_check(a: &BasedAlgebra, n: usize) -> Result<DimensionDecision> {
    if n == 0 {
        return Err(Error::invalid("dimension check starts at n = 1"));
    }
    let dim = a.dim();
    let dd = DegreeBasis::new(dim, n + 1).len();
    let (m, rhs) = dimension_system(a, n)?;
    if let Some(x) = m.solve(&rhs) {
        let target = DegreeBasis::new(dim, n + 1);
        let phi: Vec<FormVector> = (0..tuple_count(dim, n))
            .map(|t| {
                target.form(&SparseVec::from_entries(
                    x.iter().filter(|(i, _)| i / dd == t).map(|(i, c)| (i % dd, c.clone())),
                ))
            })
            .collect();
        let verified = phi_defect(a, n, &phi)?.is_none();
        return Ok(DimensionDecision { level: n, feasible: true, phi: Some(phi), certificate: None, verified });
    }
    let mt = m.transpose();
    let row = SparseMatrix::from_columns(1, (0..m.rows).map(|j| SparseVec::from_entries([(0, rhs.get(j))])).collect());
    let system = mt.vstack(&row);
    let y = system
        .solve(&SparseVec::unit(m.cols))
        .ok_or_else(|| Error::invalid("solver found neither a solution nor a certificate"))?;
    let pairing = y.iter().fold(Scalar::ZERO, |acc, (i, c)| &acc + &(c * &rhs.get(*i)));
    let verified = mt.apply(&y).is_zero() && pairing.is_one();
    Ok(DimensionDecision { level: n, feasible: false, phi: None, certificate: Some(y), verified })
}

/// `A` is quasi-free iff `φ(xy) = xφ(y) + φ(x)y − dx dy` has a solution.
pub fn quasi_free_check(a: &BasedAlgebra) -> Result<DimensionDecision> {
    dimension_check(a, 1)
}

/// The section `x ↦ x + φ(x)` into `TA/(JA)²`, as a linear map into the
/// truncated tensor algebra of order 2.
pub fn sigma_phi_section(a: &BasedAlgebra, phi: &[FormVector], size_cap: usize) -> Result<(BasedAlgebra, LinearMapT)> {
    let t = truncated_tensor_algebra(a, 2, size_cap)?;
    let images = (0..a.dim())
        .map(|x| t.coords(&FormVector::from_element(&a.basis_element(x)).plus(&phi[x])))
        .collect::<Result<Vec<_>>>()?;
    let map = LinearMapT::new(a.dim(), t.dim(), images)?;
    Ok((t.algebra().clone(), map))
}

/// A right connection `∇: Ωⁿ → Ω^{n+1}`, `∇(ã₀da₁…daₙ) = ã₀φ(a₁…aₙ)`,
/// extended by `∇(ω da) = ∇(ω) da` above degree `n` and zero below.
#[derive(Clone, Debug)]
pub struct Connection {
    pub algebra: BasedAlgebra,
    pub level: usize,
    pub phi: Vec<FormVector>,
}

impl Connection {
    /// Validates `∇(aω) = a∇ω` and `∇(ωa) = ∇(ω)a + (−1)ⁿ ω da` on all
    /// basis pairs.
    pub fn new(a: &BasedAlgebra, level: usize, phi: Vec<FormVector>) -> Result<Connection> {
        if level == 0 || phi.len() != tuple_count(a.dim(), level) {
            return Err(Error::invalid("a connection needs one value of φ per basis tuple"));
        }
        let c = Connection { algebra: a.clone(), level, phi };
        for x in 0..a.dim() {
            let xe = FormVector::from_element(&a.basis_element(x));
            for m in DegreeBasis::new(a.dim(), level).monomials() {
                let w = FormVector::monomial(m.clone());
                let left_ok = c.apply(&form_mul(a, &xe, &w)?)? == form_mul(a, &xe, &c.apply(&w)?)?;
                let mut rhs = form_mul(a, &c.apply(&w)?, &xe)?;
                rhs.add_scaled(&form_mul(a, &w, &d(&xe))?, &Scalar::sign(level));
                let right_ok = c.apply(&form_mul(a, &w, &xe)?)? == rhs;
                if !left_ok || !right_ok {
                    let side = if left_ok { "right" } else { "left" };
                    return Err(Error::invalid(format!(
                        "connection fails the {side} rule at a = {}, ω = {}",
                        a.label(x),
                        w.display(a)
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn from_decision(a: &BasedAlgebra, decision: &DimensionDecision) -> Result<Connection> {
        let phi = decision
            .phi
            .clone()
            .ok_or_else(|| Error::invalid("no splitting map: the algebra is not of this dimension"))?;
        Connection::new(a, decision.level, phi)
    }

    pub fn apply(&self, w: &FormVector) -> Result<FormVector> {
        let n = self.level;
        let a = &self.algebra;
        let mut out = FormVector::zero();
        for (m, c) in w.iter() {
            if m.degree() < n {
                continue;
            }
            let phi = &self.phi[tuple_index(a.dim(), &m.tail[..n])];
            let head = match m.lead {
                None => phi.clone(),
                Some(l) => form_mul(a, &FormVector::monomial(Monomial::elem(l)), phi)?,
            };
            let tail = exact_monomial(&m.tail[n..]);
            out.add_scaled(&form_mul(a, &head, &tail)?, c);
        }
        Ok(out)
    }

    /// Matrix of `∇: Ωⁿ → Ω^{n+1}`.
    pub fn matrix(&self) -> Result<SparseMatrix> {
        operator_matrix(self.algebra.dim(), self.level, self.level + 1, |w| self.apply(w))
    }

    /// `φ + [·, ω₂]`, the connection shifted by an inner derivation into `Ω²`.
    pub fn shifted(&self, omega: &FormVector) -> Result<Connection> {
        if self.level != 1 {
            return Err(Error::invalid("shifting by an inner derivation needs level 1"));
        }
        let a = &self.algebra;
        let phi = (0..a.dim())
            .map(|x| {
                let xe = FormVector::from_element(&a.basis_element(x));
                Ok(self.phi[x].plus(&form_mul(a, &xe, omega)?).minus(&form_mul(a, omega, &xe)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Connection::new(a, 1, phi)
    }

    /// `[b, ∇] = b∇ + ∇b`.
    pub fn projector(&self, w: &FormVector) -> Result<FormVector> {
        let a = &self.algebra;
        Ok(b(a, &self.apply(w)?)?.plus(&self.apply(&b(a, w)?)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectorReport {
    pub level: usize,
    pub top: usize,
    pub idempotent: bool,
    /// `[b, ∇] = id` on `Ωʲ` for `n < j ≤ top`.
    pub identity_above: bool,
    pub identity_on_b_image: bool,
    /// The range in degrees `≤ top` is `Fₙ`.
    pub range_is_filtration: bool,
    pub kernel_b_stable: bool,
}

impl ProjectorReport {
    pub fn passed(&self) -> bool {
        self.idempotent
            && self.identity_above
            && self.identity_on_b_image
            && self.range_is_filtration
            && self.kernel_b_stable
    }
}

/// Checks `[b, ∇]` on all monomials of degree `≤ top`.
pub fn connection_projector(nabla: &Connection, top: usize) -> Result<ProjectorReport> {
    let a = &nabla.algebra;
    let (dim, n) = (a.dim(), nabla.level);
    let mut idempotent = true;
    let mut identity_above = true;
    let mut kernel_b_stable = true;
    let mut range = Vec::new();
    for j in 0..=top {
        let p = operator_matrix(dim, j, j, |w| nabla.projector(w))?;
        idempotent &= p.compose(&p) == p;
        if j > n {
            identity_above &= p == SparseMatrix::identity(p.cols);
        }
        if j > 0 {
            let bj = operator_matrix(dim, j, j - 1, |w| b(a, w))?;
            let below = operator_matrix(dim, j - 1, j - 1, |w| nabla.projector(w))?;
            kernel_b_stable &= p.kernel().iter().all(|v| below.apply(&bj.apply(v)).is_zero());
        }
        let basis = DegreeBasis::new(dim, j);
        range.extend(p.columns.iter().map(|c| basis.form(c)));
    }
    let b_image = operator_matrix(dim, n + 1, n, |w| b(a, w))?;
    let pn = operator_matrix(dim, n, n, |w| nabla.projector(w))?;
    let identity_on_b_image = b_image.columns.iter().all(|v| pn.apply(v) == *v);
    let f = super::hodge::hodge_filtration_basis(a, n, top)?;
    let (rf, rr) = (form_span_rank(dim, &f, top), form_span_rank(dim, &range, top));
    let mut both = f.clone();
    both.extend(range.iter().cloned());
    let range_is_filtration = rf == rr && form_span_rank(dim, &both, top) == rf;
    Ok(ProjectorReport {
        level: n,
        top,
        idempotent,
        identity_above,
        identity_on_b_image,
        range_is_filtration,
        kernel_b_stable,
    })
}

/// `∇*: X(A) → 𝒳₂(A)`, `a ↦ a − ∇(da)` and `ω ↦ ω − b∇ω`, for a level-1
/// connection.
#[derive(Clone, Debug)]
pub struct NablaStar {
    pub source: HodgeTower,
    pub target: HodgeTower,
    /// Parity-indexed matrices.
    pub maps: [SparseMatrix; 2],
}

impl NablaStar {
    pub fn is_chain_map(&self) -> bool {
        (0..2).all(|p| {
            self.target.complex.boundary[p].compose(&self.maps[p])
                == self.maps[1 - p].compose(&self.source.complex.boundary[p])
        })
    }

    /// `ξ₂ ∘ ∇* = id` on `X(A)`.
    pub fn is_section_of_xi(&self) -> Result<bool> {
        for p in 0..2 {
            let xi = self.target.xi(&self.source, p)?;
            if xi.compose(&self.maps[p]) != SparseMatrix::identity(self.source.complex.dims[p]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `∇*` on forms of degree `≤ 1`.
pub fn nabla_star_form(nabla: &Connection, w: &FormVector) -> Result<FormVector> {
    let a = &nabla.algebra;
    let w0 = w.component(0);
    let w1 = w.component(1);
    let even = w0.minus(&nabla.apply(&d(&w0))?);
    let odd = w1.minus(&b(a, &nabla.apply(&w1)?)?);
    Ok(even.plus(&odd))
}

pub fn nabla_star(nabla: &Connection, size_cap: usize) -> Result<NablaStar> {
    if nabla.level != 1 {
        return Err(Error::invalid("∇* needs a connection of level 1"));
    }
    let a = &nabla.algebra;
    let source = hodge_tower(a, 1, size_cap)?;
    let target = hodge_tower(a, 2, size_cap)?;
    let mut maps = Vec::new();
    for p in 0..2 {
        let cols = (0..source.complex.dims[p])
            .map(|i| target.project(&nabla_star_form(nabla, &source.lift(p, &SparseVec::unit(i)))?, p))
            .collect::<Result<Vec<_>>>()?;
        maps.push(SparseMatrix::from_columns(target.complex.dims[p], cols));
    }
    let odd = maps.pop().expect("two parities");
    let even = maps.pop().expect("two parities");
    Ok(NablaStar { source, target, maps: [even, odd] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, field, matrix_algebra, upper_triangular, zero_algebra};
    use crate::homology::DEFAULT_SIZE_CAP;

    #[test]
    fn field_is_quasi_free_with_known_phi() {
        let q = field();
        let r = quasi_free_check(&q).unwrap();
        assert!(r.feasible && r.verified);
        // φ(e) = −de de + 2 e de de
        let mut expected = FormVector::zero();
        expected.add_term(Monomial::new(None, vec![0, 0]), &Scalar::int(-1));
        expected.add_term(Monomial::new(Some(0), vec![0, 0]), &Scalar::int(2));
        assert_eq!(r.phi.unwrap()[0], expected);
    }

    #[test]
    fn matrices_are_quasi_free() {
        let r = quasi_free_check(&matrix_algebra(2)).unwrap();
        assert!(r.feasible && r.verified);
    }

    #[test]
    fn dual_numbers_are_not_quasi_free() {
        let r = quasi_free_check(&dual_numbers()).unwrap();
        assert!(!r.feasible && r.verified);
        assert!(r.certificate.is_some());
        // but dual numbers are not 2-dimensional either
        assert!(!dimension_check(&dual_numbers(), 2).unwrap().feasible);
    }

    #[test]
    fn field_is_two_dimensional_too() {
        let r = dimension_check(&field(), 2).unwrap();
        assert!(r.feasible && r.verified);
    }

    #[test]
    fn section_into_square_zero_quotient_is_multiplicative() {
        for a in [field(), matrix_algebra(2), upper_triangular(2)] {
            let r = quasi_free_check(&a).unwrap();
            assert!(r.feasible);
            let (t, s) = sigma_phi_section(&a, r.phi.as_ref().unwrap(), DEFAULT_SIZE_CAP).unwrap();
            assert_eq!(s.multiplicativity_defect(&a, &t).unwrap(), None);
        }
    }

    #[test]
    fn connection_rules_and_rejection() {
        let a = matrix_algebra(2);
        let r = quasi_free_check(&a).unwrap();
        let nabla = Connection::from_decision(&a, &r).unwrap();
        assert_eq!(nabla.matrix().unwrap().cols, DegreeBasis::new(4, 1).len());
        let mut bad = r.phi.clone().unwrap();
        bad[0] = FormVector::zero();
        let err = Connection::new(&a, 1, bad).unwrap_err().to_string();
        assert!(err.contains("connection fails"), "{err}");
    }

    #[test]
    fn projector_on_matrices() {
        let a = matrix_algebra(2);
        let nabla = Connection::from_decision(&a, &quasi_free_check(&a).unwrap()).unwrap();
        let r = connection_projector(&nabla, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn projector_on_field_to_degree_five() {
        let q = field();
        let nabla = Connection::from_decision(&q, &quasi_free_check(&q).unwrap()).unwrap();
        assert!(connection_projector(&nabla, 5).unwrap().passed());
    }

    #[test]
    fn shifted_connection_keeps_range() {
        let a = upper_triangular(2);
        let nabla = Connection::from_decision(&a, &quasi_free_check(&a).unwrap()).unwrap();
        let omega = FormVector::monomial(Monomial::new(Some(1), vec![0, 2]));
        let shifted = nabla.shifted(&omega).unwrap();
        assert_ne!(shifted.matrix().unwrap(), nabla.matrix().unwrap());
        assert!(connection_projector(&shifted, 3).unwrap().passed());
    }

    #[test]
    fn zero_algebra_projector() {
        let z = zero_algebra();
        let nabla = Connection::new(&z, 1, Vec::new()).unwrap();
        assert!(connection_projector(&nabla, 3).unwrap().passed());
    }

    #[test]
    fn nabla_star_is_a_section_chain_map() {
        for a in [field(), matrix_algebra(2), upper_triangular(2)] {
            let nabla = Connection::from_decision(&a, &quasi_free_check(&a).unwrap()).unwrap();
            let ns = nabla_star(&nabla, DEFAULT_SIZE_CAP).unwrap();
            assert!(ns.is_chain_map());
            assert!(ns.is_section_of_xi().unwrap());
        }
    }
}
