//! The bar resolution `Barₙ = Ã ⊗ A^{⊗n} ⊗ Ã` (with `Bar₋₁ = Ã`), its
//! boundary `b'`, the contracting homotopies `h^L`, `h^R` and the splitting
//! `0 → Ω^{n+1} → Barₙ → Ω̃ⁿ → 0` by `ιₙ(ω) = b'(ω ⊗ 1)`, `πₙ(ω ⊗ ã) = ωã`.
//!
//! Slots in `Ã` use index 0 for the unit and `i + 1` for `aᵢ`.

use serde::Serialize;

use crate::algebra::BasedAlgebra;
use crate::error::Result;
use crate::forms::{form_mul, DegreeBasis, FormVector, Monomial};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::scalar::Scalar;

/// `dim Barₙ` for `n ≥ −1`, with `level = n + 1`.
fn bar_dim(d: usize, level: usize) -> usize {
    if level == 0 {
        d + 1
    } else {
        (d + 1) * (d + 1) * d.pow(level as u32 - 1)
    }
}

fn key_of(d: usize, level: usize, mut idx: usize) -> Vec<usize> {
    if level == 0 {
        return vec![idx];
    }
    let mut key = vec![0; level + 1];
    key[level] = idx % (d + 1);
    idx /= d + 1;
    for slot in key[1..level].iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
    key[0] = idx;
    key
}

fn index_of(d: usize, key: &[usize]) -> usize {
    if key.len() == 1 {
        return key[0];
    }
    let n = key.len() - 1;
    let mut idx = key[0];
    for &s in &key[1..n] {
        idx = idx * d + s;
    }
    idx * (d + 1) + key[n]
}

/// Product in `Ã` of slot indices.
fn tilde_product(a: &BasedAlgebra, x: usize, y: usize) -> Result<Vec<(usize, Scalar)>> {
    Ok(match (x, y) {
        (0, y) => vec![(y, Scalar::ONE)],
        (x, 0) => vec![(x, Scalar::ONE)],
        (x, y) => a.basis_product(x - 1, y - 1)?.iter().map(|(k, c)| (k + 1, c.clone())).collect(),
    })
}

/// Converts a key to all-`Ã` slot indices and back.
fn to_tilde(key: &[usize]) -> Vec<usize> {
    let n = key.len() - 1;
    key.iter().enumerate().map(|(i, &s)| if i == 0 || i == n { s } else { s + 1 }).collect()
}

fn from_tilde(slots: &[usize]) -> Option<Vec<usize>> {
    let n = slots.len() - 1;
    slots.iter().enumerate().map(|(i, &s)| if i == 0 || i == n { Some(s) } else { s.checked_sub(1) }).collect()
}

fn matrix(
    d: usize,
    from: usize,
    to: usize,
    mut f: impl FnMut(&[usize]) -> Result<Vec<(Vec<usize>, Scalar)>>,
) -> Result<SparseMatrix> {
    let cols = (0..bar_dim(d, from))
        .map(|i| Ok(SparseVec::from_entries(f(&key_of(d, from, i))?.into_iter().map(|(k, c)| (index_of(d, &k), c)))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(bar_dim(d, to), cols))
}

/// `b': Bar_{level−1} → Bar_{level−2}` in level indexing (`level ≥ 1`).
pub fn bprime_matrix(a: &BasedAlgebra, level: usize) -> Result<SparseMatrix> {
    let d = a.dim();
    matrix(d, level, level - 1, |key| {
        let slots = to_tilde(key);
        let mut out = Vec::new();
        for j in 0..slots.len() - 1 {
            for (p, c) in tilde_product(a, slots[j], slots[j + 1])? {
                let mut merged = slots[..j].to_vec();
                merged.push(p);
                merged.extend(&slots[j + 2..]);
                // a unit can only land in an end slot
                if let Some(k) = from_tilde(&merged) {
                    out.push((k, &c * &Scalar::sign(j)));
                }
            }
        }
        Ok(out)
    })
}

/// `h^L(x₀ ⊗ … ) = 1 ⊗ [x₀] ⊗ …`, raising the level by one.
pub fn left_homotopy(a: &BasedAlgebra, level: usize) -> Result<SparseMatrix> {
    matrix(a.dim(), level, level + 1, |key| {
        if level == 0 {
            return Ok(vec![(vec![0, key[0]], Scalar::ONE)]);
        }
        let Some(x0) = key[0].checked_sub(1) else { return Ok(Vec::new()) };
        let mut k = vec![0, x0];
        k.extend(&key[1..]);
        Ok(vec![(k, Scalar::ONE)])
    })
}

/// `h^R(… ⊗ x_{n+1}) = (−1)^{n+1} … ⊗ [x_{n+1}] ⊗ 1`.
pub fn right_homotopy(a: &BasedAlgebra, level: usize) -> Result<SparseMatrix> {
    matrix(a.dim(), level, level + 1, |key| {
        if level == 0 {
            return Ok(vec![(vec![key[0], 0], Scalar::ONE)]);
        }
        let last = key.len() - 1;
        let Some(x) = key[last].checked_sub(1) else { return Ok(Vec::new()) };
        let mut k = key[..last].to_vec();
        k.push(x);
        k.push(0);
        Ok(vec![(k, Scalar::sign(level))])
    })
}

/// `ιₙ: Ω^{n+1} → Barₙ`, `ω ↦ b'(ω ⊗ 1)`, for `n ≥ 0` (`level = n + 1`).
pub fn iota_matrix(a: &BasedAlgebra, level: usize) -> Result<SparseMatrix> {
    let d = a.dim();
    let src = DegreeBasis::new(d, level);
    let embed = SparseMatrix::from_columns(
        bar_dim(d, level + 1),
        src.monomials()
            .map(|m| {
                let mut k = vec![m.lead.map_or(0, |l| l + 1)];
                k.extend(&m.tail);
                k.push(0);
                SparseVec::unit(index_of(d, &k))
            })
            .collect(),
    );
    Ok(bprime_matrix(a, level + 1)?.compose(&embed))
}

/// Coordinates in `Ω̃ⁿ`: `Ã` for `n = 0`, `Ωⁿ` above.
fn tilde_omega_coords(d: usize, n: usize, w: &FormVector) -> SparseVec {
    if n == 0 {
        SparseVec::from_entries(w.iter().map(|(m, c)| (m.lead.map_or(0, |l| l + 1), c.clone())))
    } else {
        DegreeBasis::new(d, n).coords(w)
    }
}

fn tilde_omega_dim(d: usize, n: usize) -> usize {
    if n == 0 {
        d + 1
    } else {
        DegreeBasis::new(d, n).len()
    }
}

/// `πₙ: Barₙ → Ω̃ⁿ`, `ω ⊗ ã ↦ ωã`, for `n ≥ 0` (`level = n + 1`).
pub fn pi_matrix(a: &BasedAlgebra, level: usize) -> Result<SparseMatrix> {
    let d = a.dim();
    let n = level - 1;
    let cols = (0..bar_dim(d, level))
        .map(|i| {
            let key = key_of(d, level, i);
            let last = key.len() - 1;
            let omega = FormVector::monomial(Monomial::new(key[0].checked_sub(1), key[1..last].to_vec()));
            let w = match key[last] {
                0 => omega,
                x => form_mul(a, &omega, &FormVector::monomial(Monomial::elem(x - 1)))?,
            };
            Ok(tilde_omega_coords(d, n, &w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(tilde_omega_dim(d, n), cols))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarReport {
    pub top: usize,
    pub bprime_squared_zero: bool,
    /// `b'h^L + h^L b' = id` on `Barₙ`, `−1 ≤ n ≤ top`.
    pub left_contraction: bool,
    pub right_contraction: bool,
    pub left_nilpotent: bool,
    pub right_nilpotent: bool,
    /// `π∘ι = 0`, `rank ι = dim Ω^{n+1}`, `rank π = dim Ω̃ⁿ` for `0 ≤ n ≤ top`.
    pub split_exact: bool,
}

impl BarReport {
    pub fn passed(&self) -> bool {
        self.bprime_squared_zero
            && self.left_contraction
            && self.right_contraction
            && self.left_nilpotent
            && self.right_nilpotent
            && self.split_exact
    }
}

pub fn bar_resolution_check(a: &BasedAlgebra, top: usize) -> Result<BarReport> {
    let d = a.dim();
    // bp[l]: Bar at level l → level l−1, for l = 1 … top+2
    let bp: Vec<SparseMatrix> = (0..=top + 2)
        .map(|l| if l == 0 { Ok(SparseMatrix::zeros(0, 0)) } else { bprime_matrix(a, l) })
        .collect::<Result<_>>()?;
    let hl: Vec<SparseMatrix> = (0..=top + 1).map(|l| left_homotopy(a, l)).collect::<Result<_>>()?;
    let hr: Vec<SparseMatrix> = (0..=top + 1).map(|l| right_homotopy(a, l)).collect::<Result<_>>()?;
    let mut r = BarReport {
        top,
        bprime_squared_zero: true,
        left_contraction: true,
        right_contraction: true,
        left_nilpotent: true,
        right_nilpotent: true,
        split_exact: true,
    };
    for l in 0..=top + 1 {
        let id = SparseMatrix::identity(bar_dim(d, l));
        if l >= 2 {
            r.bprime_squared_zero &= bp[l - 1].compose(&bp[l]).is_zero();
        }
        let contract = |h: &[SparseMatrix]| {
            let mut s = bp[l + 1].compose(&h[l]);
            if l >= 1 {
                s = s.add(&h[l - 1].compose(&bp[l]));
            }
            s == id
        };
        r.left_contraction &= contract(&hl);
        r.right_contraction &= contract(&hr);
        if l < top + 1 {
            r.left_nilpotent &= hl[l + 1].compose(&hl[l]).is_zero();
            r.right_nilpotent &= hr[l + 1].compose(&hr[l]).is_zero();
        }
        if l >= 1 {
            let n = l - 1;
            let iota = iota_matrix(a, l)?;
            let pi = pi_matrix(a, l)?;
            r.split_exact &= pi.compose(&iota).is_zero()
                && iota.rank() == DegreeBasis::new(d, n + 1).len()
                && pi.rank() == tilde_omega_dim(d, n)
                && iota.rank() + pi.rank() == bar_dim(d, l);
        }
    }
    Ok(r)
}
