//! Finite-dimensional associative algebras given by structure constants.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;

/// An element of a based algebra: sparse coefficients over basis indices.
pub type AlgebraElement = SparseVec;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Product {
    Value(AlgebraElement),
    Overflow,
}

/// Finite basis, structure table, optional unit and optional degree window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedAlgebra {
    labels: Vec<String>,
    table: Vec<Product>,
    unit: Option<usize>,
    window: Option<Vec<i64>>,
    index: HashMap<String, usize>,
}

/// Result of [`validate_algebra`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostics {
    Pass,
    /// `(e_i e_j) e_k != e_i (e_j e_k)`.
    Associativity(usize, usize, usize),
    /// The declared unit fails `1·x = x` or `x·1 = x` for basis `x`.
    Unit(usize),
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        matches!(self, Diagnostics::Pass)
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostics::Pass => write!(f, "pass"),
            Diagnostics::Associativity(i, j, k) => {
                write!(f, "associativity fails at basis triple ({i}, {j}, {k})")
            }
            Diagnostics::Unit(x) => write!(f, "unit axiom fails at basis element {x}"),
        }
    }
}

impl BasedAlgebra {
    /// Builds an algebra from `(left, right, product)` entries; missing entries
    /// are zero. With a window, products of basis elements whose degrees sum
    /// outside `[-N, N]` (N = largest absolute degree) are overflow.
    pub fn new(
        labels: Vec<String>,
        entries: Vec<(usize, usize, AlgebraElement)>,
        unit: Option<usize>,
        window: Option<Vec<i64>>,
    ) -> Result<BasedAlgebra> {
        let n = labels.len();
        let mut index = HashMap::new();
        for (k, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), k).is_some() {
                return Err(Error::Malformed(format!("duplicate basis label `{l}`")));
            }
        }
        if let Some(u) = unit {
            if u >= n {
                return Err(Error::Malformed(format!("unit index {u} out of range 0..{n}")));
            }
        }
        let bound = match &window {
            Some(w) if w.len() != n => {
                return Err(Error::Malformed(format!("window has {} entries, basis has {n}", w.len())))
            }
            Some(w) => Some(w.iter().map(|x| x.abs()).max().unwrap_or(0)),
            None => None,
        };
        let mut table = vec![Product::Value(SparseVec::new()); n * n];
        if let (Some(w), Some(b)) = (&window, bound) {
            for i in 0..n {
                for j in 0..n {
                    if (w[i] + w[j]).abs() > b {
                        table[i * n + j] = Product::Overflow;
                    }
                }
            }
        }
        for (i, j, v) in entries {
            if i >= n || j >= n || v.0.last().is_some_and(|(k, _)| *k >= n) {
                return Err(Error::Malformed(format!("table entry ({i}, {j}) indexes outside 0..{n}")));
            }
            if table[i * n + j] == Product::Overflow {
                if v.is_zero() {
                    continue;
                }
                return Err(Error::Malformed(format!(
                    "table entry ({}, {}) lies outside the degree window",
                    labels[i], labels[j]
                )));
            }
            table[i * n + j] = Product::Value(v);
        }
        Ok(BasedAlgebra { labels, table, unit, window, index })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    pub fn window(&self) -> Option<&[i64]> {
        self.window.as_deref()
    }

    /// Largest absolute window degree, if the algebra is windowed.
    pub fn window_bound(&self) -> Option<i64> {
        self.window.as_ref().map(|w| w.iter().map(|x| x.abs()).max().unwrap_or(0))
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        SparseVec::unit(i)
    }

    /// `e_i · e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> Result<&AlgebraElement> {
        match &self.table[i * self.dim() + j] {
            Product::Value(v) => Ok(v),
            Product::Overflow => {
                Err(Error::WindowOverflow { left: self.labels[i].clone(), right: self.labels[j].clone() })
            }
        }
    }

    /// Exact bilinear product.
    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        let mut terms = Vec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                for (k, c) in self.basis_product(*i, *j)?.iter() {
                    terms.push((*k, c * &ab));
                }
            }
        }
        Ok(SparseVec::from_entries(terms))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.table[i * n + j] == self.table[j * n + i]))
    }

    /// Renders an element as `c*label + ...`.
    pub fn format_element(&self, x: &AlgebraElement) -> String {
        format_terms(x.iter().map(|(i, c)| (self.labels[*i].clone(), c.clone())))
    }
}

/// Formats `c*label` terms joined by ` + ` / ` - `; zero prints as `0`.
pub(crate) fn format_terms(terms: impl Iterator<Item = (String, Scalar)>) -> String {
    let mut out = String::new();
    for (l, c) in terms {
        let (neg, c) = if c.is_real() && c.re.is_negative() { (true, -c) } else { (false, c) };
        let body = if c.is_one() {
            l
        } else if c.is_real() {
            format!("{c}*{l}")
        } else {
            format!("({c})*{l}")
        };
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

/// Checks associativity on all basis triples (skipping window overflow) and
/// the unit axioms.
pub fn validate_algebra(a: &BasedAlgebra) -> Diagnostics {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let Ok(ij) = a.basis_product(i, j) else { continue };
            for k in 0..n {
                let Ok(jk) = a.basis_product(j, k) else { continue };
                let left = a.multiply(ij, &SparseVec::unit(k));
                let right = a.multiply(&SparseVec::unit(i), jk);
                if let (Ok(l), Ok(r)) = (left, right) {
                    if l != r {
                        return Diagnostics::Associativity(i, j, k);
                    }
                }
            }
        }
    }
    if let Some(u) = a.unit {
        for x in 0..n {
            let ex = SparseVec::unit(x);
            let ok = |p: Result<&AlgebraElement>| p.map(|v| *v == ex).unwrap_or(false);
            if !ok(a.basis_product(u, x)) || !ok(a.basis_product(x, u)) {
                return Diagnostics::Unit(x);
            }
        }
    }
    Diagnostics::Pass
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn matrix_label(i: usize, j: usize, n: usize) -> String {
    if n < 10 {
        format!("E{}{}", i + 1, j + 1)
    } else {
        format!("E{}_{}", i + 1, j + 1)
    }
}

fn build(labels: Vec<String>, entries: Vec<(usize, usize, AlgebraElement)>, unit: Option<usize>) -> BasedAlgebra {
    BasedAlgebra::new(labels, entries, unit, None).expect("builder tables are well formed")
}

/// The ground field ℚ(i) as a one-dimensional algebra spanned by the idempotent `e`.
pub fn field() -> BasedAlgebra {
    build(vec!["e".into()], vec![(0, 0, SparseVec::unit(0))], Some(0))
}

/// Full matrix algebra `M_n` on matrix units `Eij`.
pub fn matrix_algebra(n: usize) -> BasedAlgebra {
    assert!(n >= 1);
    let idx = |i: usize, j: usize| i * n + j;
    let labels = (0..n * n).map(|k| matrix_label(k / n, k % n, n)).collect();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                entries.push((idx(i, j), idx(j, l), SparseVec::unit(idx(i, l))));
            }
        }
    }
    build(labels, entries, (n == 1).then_some(0))
}

/// `ℚ[t]/t^m` with basis `1, t, ..., t^(m-1)`.
pub fn truncated_poly(m: usize) -> BasedAlgebra {
    assert!(m >= 1);
    let labels = (0..m)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => "t".to_string(),
            _ => format!("t^{k}"),
        })
        .collect();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i + j < m {
                entries.push((i, j, SparseVec::unit(i + j)));
            }
        }
    }
    build(labels, entries, Some(0))
}

/// `ℚ[ε]/ε²` with basis `1, eps`.
pub fn dual_numbers() -> BasedAlgebra {
    let t = truncated_poly(2);
    let entries = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, t.basis_product(i, j).unwrap().clone()))
        .collect();
    build(vec!["1".into(), "eps".into()], entries, Some(0))
}

/// The degree window `u^-N, ..., u^N` of the Laurent polynomials.
pub fn laurent_window(n: usize) -> BasedAlgebra {
    assert!(n >= 1);
    let n = n as i64;
    let degs: Vec<i64> = (-n..=n).collect();
    let labels = degs
        .iter()
        .map(|&k| match k {
            0 => "1".to_string(),
            1 => "u".to_string(),
            _ => format!("u^{k}"),
        })
        .collect();
    let mut entries = Vec::new();
    for (i, a) in degs.iter().enumerate() {
        for (j, b) in degs.iter().enumerate() {
            if (a + b).abs() <= n {
                entries.push((i, j, SparseVec::unit((a + b + n) as usize)));
            }
        }
    }
    BasedAlgebra::new(labels, entries, Some(n as usize), Some(degs)).expect("window table")
}

/// Group algebra of the cyclic group of order `m`, basis `g^0, ..., g^(m-1)`.
pub fn cyclic_group_algebra(m: usize) -> BasedAlgebra {
    assert!(m >= 1);
    let labels = (0..m).map(|k| if k == 0 { "1".to_string() } else { format!("g^{k}") }).collect();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in 0..m {
            entries.push((i, j, SparseVec::unit((i + j) % m)));
        }
    }
    build(labels, entries, Some(0))
}

/// Upper-triangular `n×n` matrices on the units `Eij`, `i ≤ j`.
pub fn upper_triangular(n: usize) -> BasedAlgebra {
    assert!(n >= 1);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let pos: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let labels = pairs.iter().map(|&(i, j)| matrix_label(i, j, n)).collect();
    let mut entries = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate() {
            if j == k {
                entries.push((a, b, SparseVec::unit(pos[&(i, l)])));
            }
        }
    }
    build(labels, entries, (n == 1).then_some(0))
}

/// `d`-dimensional algebra with zero multiplication.
/// The zero algebra, with empty basis.
pub fn zero_algebra() -> BasedAlgebra {
    build(Vec::new(), Vec::new(), None)
}

pub fn null_algebra(d: usize) -> BasedAlgebra {
    assert!(d >= 1);
    build(labels("n", d), Vec::new(), None)
}

/// `A ⊕ B` with componentwise product; labels get suffixes `_1` and `_2`.
pub fn direct_sum(a: &BasedAlgebra, b: &BasedAlgebra) -> BasedAlgebra {
    let (na, nb) = (a.dim(), b.dim());
    let mut labels: Vec<String> = a.labels.iter().map(|l| format!("{l}_1")).collect();
    labels.extend(b.labels.iter().map(|l| format!("{l}_2")));
    let mut entries = Vec::new();
    for i in 0..na {
        for j in 0..na {
            if let Ok(v) = a.basis_product(i, j) {
                entries.push((i, j, v.clone()));
            }
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            if let Ok(v) = b.basis_product(i, j) {
                entries.push((na + i, na + j, v.remap(|k| Some(k + na))));
            }
        }
    }
    build(labels, entries, None)
}

/// Adjoins a new unit as basis index 0; the original basis shifts by one.
pub fn unitize(a: &BasedAlgebra) -> BasedAlgebra {
    let n = a.dim();
    let mut unit_label = "1".to_string();
    while a.index_of(&unit_label).is_some() {
        unit_label.push('~');
    }
    let mut labels = vec![unit_label];
    labels.extend(a.labels.iter().cloned());
    let mut entries = Vec::new();
    for x in 0..=n {
        entries.push((0, x, SparseVec::unit(x)));
        entries.push((x, 0, SparseVec::unit(x)));
    }
    for i in 0..n {
        for j in 0..n {
            if let Ok(v) = a.basis_product(i, j) {
                entries.push((i + 1, j + 1, v.remap(|k| Some(k + 1))));
            }
        }
    }
    let window = a.window.as_ref().map(|w| {
        let mut v = vec![0];
        v.extend(w);
        v
    });
    BasedAlgebra::new(labels, entries, Some(0), window).expect("unitized table")
}

/// A linear map between based algebras, as a sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMapT {
    pub matrix: SparseMatrix,
}

impl LinearMapT {
    pub fn new(domain: usize, codomain: usize, images: Vec<AlgebraElement>) -> Result<LinearMapT> {
        if images.len() != domain {
            return Err(Error::invalid(format!("map has {} columns, domain has dimension {domain}", images.len())));
        }
        if images.iter().any(|v| v.0.last().is_some_and(|(k, _)| *k >= codomain)) {
            return Err(Error::invalid(format!("map image indexes outside codomain of dimension {codomain}")));
        }
        Ok(LinearMapT { matrix: SparseMatrix::from_columns(codomain, images) })
    }

    pub fn from_matrix(matrix: SparseMatrix) -> LinearMapT {
        LinearMapT { matrix }
    }

    pub fn identity(n: usize) -> LinearMapT {
        LinearMapT { matrix: SparseMatrix::identity(n) }
    }

    pub fn domain(&self) -> usize {
        self.matrix.cols
    }

    pub fn codomain(&self) -> usize {
        self.matrix.rows
    }

    pub fn apply(&self, x: &AlgebraElement) -> AlgebraElement {
        self.matrix.apply(x)
    }

    pub fn image(&self, i: usize) -> &AlgebraElement {
        &self.matrix.columns[i]
    }

    pub fn compose(&self, inner: &LinearMapT) -> LinearMapT {
        LinearMapT { matrix: self.matrix.compose(&inner.matrix) }
    }

    /// The first basis pair `(i, j)` with `f(e_i e_j) != f(e_i) f(e_j)`.
    pub fn multiplicativity_defect(&self, src: &BasedAlgebra, dst: &BasedAlgebra) -> Result<Option<(usize, usize)>> {
        for i in 0..src.dim() {
            for j in 0..src.dim() {
                let lhs = self.apply(src.basis_product(i, j)?);
                let rhs = dst.multiply(self.image(i), self.image(j))?;
                if lhs != rhs {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

/// `K ↣ E ↠ Q` with multiplicative `i`, `p` and a linear section `s`.
#[derive(Clone, Debug)]
pub struct SplitExtension {
    pub k: BasedAlgebra,
    pub e: BasedAlgebra,
    pub q: BasedAlgebra,
    pub i: LinearMapT,
    pub p: LinearMapT,
    pub s: LinearMapT,
}

/// Validates every extension axiom, naming the first one that fails.
pub fn make_split_extension(
    k: BasedAlgebra,
    e: BasedAlgebra,
    q: BasedAlgebra,
    i: LinearMapT,
    p: LinearMapT,
    s: LinearMapT,
) -> Result<SplitExtension> {
    let fail = |what: String| Err(Error::Invalid(what));
    for (name, alg) in [("K", &k), ("E", &e), ("Q", &q)] {
        let d = validate_algebra(alg);
        if !d.passed() {
            return fail(format!("{name} is not a valid algebra: {d}"));
        }
    }
    for (name, m, dom, cod) in [("i", &i, &k, &e), ("p", &p, &e, &q), ("s", &s, &q, &e)] {
        if m.domain() != dom.dim() || m.codomain() != cod.dim() {
            return fail(format!(
                "{name} has shape {}x{}, expected {}x{}",
                m.codomain(),
                m.domain(),
                cod.dim(),
                dom.dim()
            ));
        }
    }
    if let Some((a, b)) = i.multiplicativity_defect(&k, &e)? {
        return fail(format!("i is not multiplicative at ({}, {})", k.label(a), k.label(b)));
    }
    if let Some((a, b)) = p.multiplicativity_defect(&e, &q)? {
        return fail(format!("p is not multiplicative at ({}, {})", e.label(a), e.label(b)));
    }
    if !p.compose(&i).matrix.is_zero() {
        return fail("p∘i is not zero".into());
    }
    if i.matrix.rank() != k.dim() {
        return fail("i is not injective".into());
    }
    if i.matrix.rank() + p.matrix.rank() != e.dim() {
        return fail("image(i) differs from kernel(p)".into());
    }
    if p.compose(&s).matrix != SparseMatrix::identity(q.dim()) {
        return fail("p∘s is not the identity".into());
    }
    Ok(SplitExtension { k, e, q, i, p, s })
}

/// The extension of diagonal by strictly upper-triangular 2×2 matrices.
/// `perturb` adds `E12` to the section on the first idempotent, making it
/// non-multiplicative.
pub fn t2_extension(perturb: bool) -> SplitExtension {
    let k = null_algebra(1);
    let e = upper_triangular(2); // E11, E12, E22
    let q = direct_sum(&field(), &field()); // e_1, e_2
    let i = LinearMapT::new(1, 3, vec![SparseVec::unit(1)]).unwrap();
    let p = LinearMapT::new(3, 2, vec![SparseVec::unit(0), SparseVec::new(), SparseVec::unit(1)]).unwrap();
    let s0 = if perturb { SparseVec::from_entries([(0, Scalar::ONE), (1, Scalar::ONE)]) } else { SparseVec::unit(0) };
    let s = LinearMapT::new(2, 3, vec![s0, SparseVec::unit(2)]).unwrap();
    make_split_extension(k, e, q, i, p, s).expect("T2 extension is valid")
}

/// The product extension `K ↣ K ⊕ Q ↠ Q` with the inclusion as section.
pub fn product_extension(k: &BasedAlgebra, q: &BasedAlgebra) -> SplitExtension {
    let e = direct_sum(k, q);
    let (nk, nq) = (k.dim(), q.dim());
    let i = LinearMapT::new(nk, nk + nq, (0..nk).map(SparseVec::unit).collect()).unwrap();
    let p =
        LinearMapT::new(nk + nq, nq, (0..nk).map(|_| SparseVec::new()).chain((0..nq).map(SparseVec::unit)).collect())
            .unwrap();
    let s = LinearMapT::new(nq, nk + nq, (0..nq).map(|j| SparseVec::unit(nk + j)).collect()).unwrap();
    make_split_extension(k.clone(), e, q.clone(), i, p, s).expect("product extension is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_validate() {
        for a in [
            field(),
            matrix_algebra(2),
            matrix_algebra(3),
            dual_numbers(),
            truncated_poly(3),
            laurent_window(3),
            upper_triangular(2),
            upper_triangular(3),
            null_algebra(2),
            direct_sum(&field(), &field()),
            cyclic_group_algebra(4),
            unitize(&matrix_algebra(2)),
        ] {
            assert_eq!(validate_algebra(&a), Diagnostics::Pass, "{:?}", a.labels());
        }
        assert_eq!(matrix_algebra(3).dim(), 9);
    }

    #[test]
    fn bad_table_fails_at_first_triple() {
        // e1 e1 = e2, e2 e1 = e1, others zero.
        let a = BasedAlgebra::new(
            vec!["e1".into(), "e2".into()],
            vec![(0, 0, SparseVec::unit(1)), (1, 0, SparseVec::unit(0))],
            None,
            None,
        )
        .unwrap();
        assert_eq!(validate_algebra(&a), Diagnostics::Associativity(0, 0, 0));
    }

    #[test]
    fn malformed_table_is_an_error() {
        let r = BasedAlgebra::new(vec!["x".into()], vec![(0, 3, SparseVec::unit(0))], None, None);
        assert!(matches!(r, Err(Error::Malformed(_))));
    }

    #[test]
    fn defining_relations() {
        let d = dual_numbers();
        assert!(d.multiply(&SparseVec::unit(1), &SparseVec::unit(1)).unwrap().is_zero());
        let m = matrix_algebra(2);
        assert_eq!(m.multiply(&SparseVec::unit(0), &SparseVec::unit(1)).unwrap(), SparseVec::unit(1));
        let l = laurent_window(3);
        let (u, ui) = (l.index_of("u").unwrap(), l.index_of("u^-1").unwrap());
        let one = l.index_of("1").unwrap();
        assert_eq!(l.multiply(&SparseVec::unit(u), &SparseVec::unit(ui)).unwrap(), SparseVec::unit(one));
        let u3 = l.index_of("u^3").unwrap();
        assert!(matches!(l.multiply(&SparseVec::unit(u3), &SparseVec::unit(u)), Err(Error::WindowOverflow { .. })));
        assert_eq!(truncated_poly(2).basis_product(1, 1).unwrap(), &SparseVec::new());
    }

    #[test]
    fn unitize_null_is_dual_numbers() {
        let u = unitize(&null_algebra(1));
        let d = dual_numbers();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(u.basis_product(i, j).unwrap(), d.basis_product(i, j).unwrap());
            }
        }
        let ud = unitize(&dual_numbers());
        assert_eq!(ud.dim(), 3);
        assert_ne!(ud.unit(), Some(1));
        assert_eq!(ud.multiply(&SparseVec::unit(0), &SparseVec::unit(2)).unwrap(), SparseVec::unit(2));
    }

    #[test]
    fn direct_sum_cross_terms_vanish() {
        let s = direct_sum(&matrix_algebra(2), &dual_numbers());
        for i in 0..4 {
            for j in 4..6 {
                assert!(s.basis_product(i, j).unwrap().is_zero());
                assert!(s.basis_product(j, i).unwrap().is_zero());
            }
        }
        let q = direct_sum(&field(), &field());
        assert!(q.is_commutative());
        assert_eq!(q.basis_product(0, 0).unwrap(), &SparseVec::unit(0));
        assert!(q.basis_product(0, 1).unwrap().is_zero());
    }

    #[test]
    fn split_extensions() {
        let t = t2_extension(false);
        assert!(t.s.multiplicativity_defect(&t.q, &t.e).unwrap().is_none());
        let t = t2_extension(true);
        assert!(t.s.multiplicativity_defect(&t.q, &t.e).unwrap().is_some());
        product_extension(&null_algebra(1), &field());

        // p that is not multiplicative is rejected by name.
        let bad_p = LinearMapT::new(3, 2, vec![SparseVec::unit(0), SparseVec::new(), SparseVec::unit(0)]).unwrap();
        let err =
            make_split_extension(t.k.clone(), t.e.clone(), t.q.clone(), t.i.clone(), bad_p, t.s.clone()).unwrap_err();
        assert!(err.to_string().contains("p is not multiplicative"), "{err}");
    }
}
