//! Alternative descriptions of the Hodge filtration through powers of the
//! ideal `JA` and `D(TA)`, compared as subspaces of `Ω^{≤M}`.

use ncyclic::algebra::{dual_numbers, field, BasedAlgebra};
use ncyclic::forms::{b, DegreeBasis, FormVector};
use ncyclic::homology::hodge::form_span_rank;
use ncyclic::xcomplex::{odd_class, partial_boundary};

fn monomials(a: &BasedAlgebra, degrees: impl Iterator<Item = usize>) -> Vec<FormVector> {
    degrees
        .flat_map(|j| DegreeBasis::new(a.dim(), j).monomials().map(FormVector::monomial).collect::<Vec<_>>())
        .collect()
}

fn even_from(a: &BasedAlgebra, lo: usize, top: usize) -> Vec<FormVector> {
    monomials(a, (lo..=top).filter(|j| j % 2 == 0))
}

fn same_span(dim: usize, x: &[FormVector], y: &[FormVector], top: usize) -> bool {
    let truncate = |v: &[FormVector]| v.iter().map(|f| f.truncate(top)).collect::<Vec<_>>();
    let (x, y) = (truncate(x), truncate(y));
    let mut both = x.clone();
    both.extend(y.iter().cloned());
    let r = form_span_rank(dim, &x, top);
    r == form_span_rank(dim, &y, top) && r == form_span_rank(dim, &both, top)
}

fn images(a: &BasedAlgebra, xs: &[FormVector], ys: &[FormVector], top: usize) -> Vec<FormVector> {
    let mut out = Vec::new();
    for x in xs {
        for y in ys {
            let xd = x.max_degree().unwrap_or(0);
            let yd = y.max_degree().unwrap_or(0);
            if xd + yd < top {
                out.push(odd_class(a, x, y).unwrap());
            }
        }
    }
    out
}

/// The odd part of `F_{2n}` is the image of `(JA)ⁿ D(TA)`.
fn check_odd_part_of_even_level(a: &BasedAlgebra, n: usize, top: usize) {
    let xs = even_from(a, 2 * n, top);
    let ys = even_from(a, 0, top);
    let lhs = images(a, &xs, &ys, top);
    let rhs = monomials(a, (2 * n + 1..=top).filter(|j| j % 2 == 1));
    assert!(same_span(a.dim(), &lhs, &rhs, top), "n = {n}");
}

/// The even part of `F_{2n}` is `(JA)^{n+1} + ∂₁(F^odd_{2n})`.
fn check_even_part_of_even_level(a: &BasedAlgebra, n: usize, top: usize) {
    let mut lhs = even_from(a, 2 * n + 2, top);
    for w in monomials(a, (2 * n + 1..=top).filter(|j| j % 2 == 1)) {
        lhs.push(partial_boundary(a, &w).unwrap());
    }
    let mut rhs: Vec<FormVector> = monomials(a, std::iter::once(2 * n + 1)).iter().map(|w| b(a, w).unwrap()).collect();
    rhs.extend(even_from(a, 2 * n + 2, top));
    assert!(same_span(a.dim(), &lhs, &rhs, top), "n = {n}");
}

/// The odd part of `F_{2n−1}` is the image of `Σ_{k+l=n} (JA)ᵏ D((JA)ˡ)`.
fn check_odd_part_of_odd_level(a: &BasedAlgebra, n: usize, top: usize) {
    let mut lhs = Vec::new();
    for k in 0..=n {
        let mut xs = even_from(a, 2 * k, top);
        if k == 0 {
            xs.push(FormVector::unit());
        }
        let ys = even_from(a, 2 * (n - k), top);
        lhs.extend(images(a, &xs, &ys, top));
    }
    let mut rhs: Vec<FormVector> = monomials(a, std::iter::once(2 * n)).iter().map(|w| b(a, w).unwrap()).collect();
    rhs.extend(monomials(a, (2 * n + 1..=top).filter(|j| j % 2 == 1)));
    assert!(same_span(a.dim(), &lhs, &rhs, top), "n = {n}");
}

#[test]
fn odd_part_of_even_levels() {
    check_odd_part_of_even_level(&field(), 1, 7);
    check_odd_part_of_even_level(&field(), 2, 7);
    check_odd_part_of_even_level(&dual_numbers(), 1, 5);
}

#[test]
fn even_part_of_even_levels() {
    check_even_part_of_even_level(&field(), 1, 6);
    check_even_part_of_even_level(&dual_numbers(), 1, 6);
}

#[test]
fn odd_part_of_odd_levels() {
    check_odd_part_of_odd_level(&field(), 1, 7);
    check_odd_part_of_odd_level(&field(), 2, 7);
    check_odd_part_of_odd_level(&dual_numbers(), 1, 5);
}

#[test]
fn d_of_exact_two_form() {
    use ncyclic::forms::{d, form_mul, Monomial};
    for a in [field(), dual_numbers(), ncyclic::algebra::matrix_algebra(2)] {
        let n = a.dim();
        let mut xs = vec![FormVector::unit()];
        xs.extend((0..n).map(|i| FormVector::monomial(Monomial::elem(i))));
        for x in &xs {
            for p in 0..n {
                for q in 0..n {
                    let y = FormVector::monomial(Monomial::new(None, vec![p, q]));
                    let (dp, dq) =
                        (d(&FormVector::monomial(Monomial::elem(p))), d(&FormVector::monomial(Monomial::elem(q))));
                    let x_dp_dq = form_mul(&a, &form_mul(&a, x, &dp).unwrap(), &dq).unwrap();
                    let expected = form_mul(&a, &d(x), &y)
                        .unwrap()
                        .plus(&form_mul(&a, &form_mul(&a, &dq, &d(x)).unwrap(), &dp).unwrap())
                        .minus(&b(&a, &x_dp_dq).unwrap());
                    assert_eq!(odd_class(&a, x, &y).unwrap(), expected);
                }
            }
        }
    }
}
