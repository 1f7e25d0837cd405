//! Brute-force oracle: Hochschild and Connes cyclic homology of a unital
//! algebra from the unnormalized complex `A^{⊗(n+1)}`, with dense rational
//! matrices and plain Gaussian elimination.

use ncyclic::algebra::{dual_numbers, field, matrix_algebra, BasedAlgebra};
use ncyclic::homology::hodge::{cyclic_homology, hochschild_homology};
use ncyclic::homology::DEFAULT_SIZE_CAP;
use num_rational::BigRational;
use num_traits::{One, Zero};

type Dense = Vec<Vec<BigRational>>;

fn constants(a: &BasedAlgebra) -> Vec<Vec<Vec<BigRational>>> {
    let n = a.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut row = vec![BigRational::zero(); n];
                    for (k, c) in a.basis_product(i, j).unwrap().iter() {
                        assert!(c.im.is_zero());
                        row[*k] = c.re.to_string().parse().unwrap();
                    }
                    row
                })
                .collect()
        })
        .collect()
}

fn rank(mut m: Dense) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

fn digits(mut idx: usize, d: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for k in (0..len).rev() {
        out[k] = idx % d;
        idx /= d;
    }
    out
}

fn index(t: &[usize], d: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * d + x)
}

/// `b: A^{⊗(n+1)} → A^{⊗n}` as a dense `dⁿ × d^{n+1}` matrix.
fn b_matrix(sc: &[Vec<Vec<BigRational>>], n: usize) -> Dense {
    let d = sc.len();
    let mut m = vec![vec![BigRational::zero(); d.pow(n as u32 + 1)]; d.pow(n as u32)];
    for col in 0..d.pow(n as u32 + 1) {
        let t = digits(col, d, n + 1);
        for i in 0..=n {
            let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            let (x, y) = if i < n { (t[i], t[i + 1]) } else { (t[n], t[0]) };
            for (k, c) in sc[x][y].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut s: Vec<usize> = Vec::with_capacity(n);
                if i < n {
                    s.extend_from_slice(&t[..i]);
                    s.push(k);
                    s.extend_from_slice(&t[i + 2..]);
                } else {
                    s.push(k);
                    s.extend_from_slice(&t[1..n]);
                }
                m[index(&s, d)][col] += &sign * c;
            }
        }
    }
    m
}

/// `1 − t` on `A^{⊗(n+1)}` with `t(a₀,…,aₙ) = (−1)ⁿ(aₙ,a₀,…,a_{n−1})`.
fn one_minus_t(d: usize, n: usize) -> Dense {
    let size = d.pow(n as u32 + 1);
    let mut m = vec![vec![BigRational::zero(); size]; size];
    for col in 0..size {
        let t = digits(col, d, n + 1);
        let mut s = vec![t[n]];
        s.extend_from_slice(&t[..n]);
        m[col][col] += BigRational::one();
        let sign = if n % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        m[index(&s, d)][col] -= sign;
    }
    m
}

fn hstack(x: &Dense, y: &Dense) -> Dense {
    x.iter().zip(y).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect()
}

fn hh(a: &BasedAlgebra, top: usize) -> Vec<usize> {
    let sc = constants(a);
    let d = sc.len();
    let ranks: Vec<usize> = (0..=top + 1).map(|n| if n == 0 { 0 } else { rank(b_matrix(&sc, n)) }).collect();
    (0..=top).map(|n| d.pow(n as u32 + 1) - ranks[n] - ranks[n + 1]).collect()
}

fn hc(a: &BasedAlgebra, top: usize) -> Vec<usize> {
    let sc = constants(a);
    let d = sc.len();
    let t: Vec<Dense> = (0..=top + 1).map(|n| one_minus_t(d, n)).collect();
    let t_rank: Vec<usize> = t.iter().map(|m| rank(m.clone())).collect();
    // rank of b̄ₙ: C^λₙ → C^λ_{n−1}
    let bar: Vec<usize> = (0..=top + 1)
        .map(|n| if n == 0 { 0 } else { rank(hstack(&b_matrix(&sc, n), &t[n - 1])) - t_rank[n - 1] })
        .collect();
    (0..=top).map(|n| d.pow(n as u32 + 1) - t_rank[n] - bar[n] - bar[n + 1]).collect()
}

fn library(r: &ncyclic::homology::HomologyReport) -> Vec<usize> {
    r.degrees.iter().map(|x| x.homology).collect()
}

#[test]
fn field_golden_values() {
    let q = field();
    assert_eq!(hc(&q, 4), vec![1, 0, 1, 0, 1]);
    assert_eq!(hh(&q, 4), vec![1, 0, 0, 0, 0]);
    assert_eq!(library(&cyclic_homology(&q, 4, DEFAULT_SIZE_CAP).unwrap()), vec![1, 0, 1, 0, 1]);
    assert_eq!(library(&hochschild_homology(&q, 4, DEFAULT_SIZE_CAP).unwrap()), vec![1, 0, 0, 0, 0]);
}

#[test]
fn dual_numbers_agree_with_library() {
    let a = dual_numbers();
    let (h, c) = (hh(&a, 3), hc(&a, 3));
    assert_eq!(library(&hochschild_homology(&a, 3, DEFAULT_SIZE_CAP).unwrap()), h);
    assert_eq!(library(&cyclic_homology(&a, 3, DEFAULT_SIZE_CAP).unwrap()), c);
}

#[test]
fn matrices_agree_with_library() {
    let a = matrix_algebra(2);
    let (h, c) = (hh(&a, 2), hc(&a, 2));
    assert_eq!(h, vec![1, 0, 0]);
    assert_eq!(c, vec![1, 0, 1]);
    assert_eq!(library(&hochschild_homology(&a, 2, DEFAULT_SIZE_CAP).unwrap()), h);
    assert_eq!(library(&cyclic_homology(&a, 2, DEFAULT_SIZE_CAP).unwrap()), c);
}
