//! Relative cyclic homology of a split extension `K ↣ E ↠ Q` and the long
//! exact sequence `HC_n(E:Q) → HC_n(E) → HC_n(Q) → HC_{n−1}(E:Q)`.
//!
//! The sequence is checked on the total complex of the `(b, B)` bicomplex,
//! `Tot_k = ⊕_j Ω^{k−2j}`, where the kernel forms `ker p_*` form a
//! subcomplex with quotient `Tot(ΩQ)`.

use serde::Serialize;

use super::hodge::{cyclic_homology, subspace_tower, Frame, HodgeTower};
use super::{check_cap, ChainComplex, ExactSequenceReport, PairData};
use crate::algebra::{LinearMapT, SplitExtension};
use crate::error::Result;
use crate::forms::{b, connes_b, pushforward, DegreeBasis, FormVector};
use crate::linalg::{Echelon, SparseMatrix, SparseVec};
use crate::xcomplex::partial_boundary;

/// Basis of `Ωʲ(E:Q) = ker p_*` for `j ≤ top`.
pub fn kernel_frames(ext: &SplitExtension, top: usize) -> Result<Vec<Frame>> {
    let (de, dq) = (ext.e.dim(), ext.q.dim());
    (0..=top)
        .map(|j| {
            let pj = push_matrix(&ext.p, de, dq, j)?;
            Ok(Frame::new(DegreeBasis::new(de, j).len(), pj.kernel()))
        })
        .collect()
}

/// Matrix of `Ω(f)` on `Ωʲ` between algebras of different dimensions.
pub fn push_matrix(f: &LinearMapT, src: usize, dst: usize, j: usize) -> Result<SparseMatrix> {
    let (from, to) = (DegreeBasis::new(src, j), DegreeBasis::new(dst, j));
    let cols = from.monomials().map(|m| to.coords(&pushforward(f, &FormVector::monomial(m)))).collect();
    Ok(SparseMatrix::from_columns(to.len(), cols))
}

/// The relative tower `Ω(E:Q)/Fₙ(E:Q)`.
pub fn relative_tower(ext: &SplitExtension, n: usize, size_cap: usize) -> Result<HodgeTower> {
    subspace_tower(&ext.e, n, kernel_frames(ext, n + 1)?, size_cap)
}

/// Components `(degree, offset)` of `Tot_k`.
fn tot_layout(dim_a: usize, k: usize) -> Vec<(usize, usize)> {
    let mut off = 0;
    (0..=k / 2)
        .map(|j| {
            let deg = k - 2 * j;
            let o = off;
            off += DegreeBasis::new(dim_a, deg).len();
            (deg, o)
        })
        .collect()
}

fn tot_dim(dim_a: usize, k: usize) -> usize {
    (0..=k / 2).map(|j| DegreeBasis::new(dim_a, k - 2 * j).len()).sum()
}

/// Coordinates in `Tot_k` of a form supported in degrees `≡ k mod 2`, `≤ k`.
pub fn tot_coords(dim_a: usize, k: usize, w: &FormVector) -> SparseVec {
    SparseVec::from_entries(
        tot_layout(dim_a, k).into_iter().flat_map(|(deg, off)| {
            DegreeBasis::new(dim_a, deg).coords(w).0.into_iter().map(move |(i, x)| (i + off, x))
        }),
    )
}

pub fn tot_form(dim_a: usize, k: usize, v: &SparseVec) -> FormVector {
    let mut out = FormVector::zero();
    for (deg, off) in tot_layout(dim_a, k) {
        let len = DegreeBasis::new(dim_a, deg).len();
        let part = SparseVec::from_entries(
            v.iter().filter(|(i, _)| *i >= off && *i < off + len).map(|(i, x)| (i - off, x.clone())),
        );
        out.add_assign(&DegreeBasis::new(dim_a, deg).form(&part));
    }
    out
}

/// `D = b + B` on `Tot_k → Tot_{k−1}`, with `B` dropped on the `Ω^k` component.
fn tot_apply(a: &crate::algebra::BasedAlgebra, k: usize, w: &FormVector) -> Result<FormVector> {
    let db = connes_b(&w.filter(|m| m.degree() < k));
    Ok(b(a, w)?.plus(&db))
}

/// `Tot_0 … Tot_top` of `(Ω(A), b, B)`; computes cyclic homology below `top`.
pub fn tot_complex(a: &crate::algebra::BasedAlgebra, top: usize, size_cap: usize) -> Result<ChainComplex> {
    let dim_a = a.dim();
    check_cap("Tot_top", tot_dim(dim_a, top), size_cap)?;
    let dims: Vec<usize> = (0..=top).map(|k| tot_dim(dim_a, k)).collect();
    let mut boundary = vec![SparseMatrix::zeros(0, dims[0])];
    for k in 1..=top {
        let cols = (0..dims[k])
            .map(|i| Ok(tot_coords(dim_a, k - 1, &tot_apply(a, k, &tot_form(dim_a, k, &SparseVec::unit(i)))?)))
            .collect::<Result<Vec<_>>>()?;
        boundary.push(SparseMatrix::from_columns(dims[k - 1], cols));
    }
    ChainComplex::new(dims, boundary, false)
}

/// Kernel forms embedded in `Tot_k`.
fn tot_kernel_basis(dim_a: usize, k: usize, frames: &[Frame]) -> Vec<SparseVec> {
    tot_layout(dim_a, k)
        .into_iter()
        .flat_map(|(deg, off)| frames[deg].basis.iter().map(move |v| v.remap(|i| Some(i + off))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcisionReport {
    pub level: usize,
    pub relative: Vec<usize>,
    pub absolute: Vec<usize>,
    pub quotient: Vec<usize>,
    /// The pair's groups agree with the relative tower and with `HC(E)`, `HC(Q)`.
    pub consistent: bool,
    pub connecting_ranks: Vec<usize>,
    pub sequence: ExactSequenceReport,
}

impl ExcisionReport {
    pub fn exact(&self) -> bool {
        self.consistent && self.sequence.exact()
    }
}

/// Exactness of the relative/absolute/quotient sequence in degrees `≤ n`.
pub fn six_term_check(ext: &SplitExtension, n: usize, size_cap: usize) -> Result<ExcisionReport> {
    let de = ext.e.dim();
    let top = n + 2;
    let c = tot_complex(&ext.e, top, size_cap)?;
    let frames = kernel_frames(ext, top)?;
    let w: Vec<Vec<SparseVec>> = (0..=top).map(|k| tot_kernel_basis(de, k, &frames)).collect();
    let pair = PairData::new(&c, &w)?;
    let sequence = pair.long_exact_sequence(&c, n, ["HC(E:Q)", "HC(E)", "HC(Q)"])?;
    let relative: Vec<usize> = (0..=n).map(|k| pair.homology_w(&c, k)).collect();
    let absolute: Vec<usize> = (0..=n).map(|k| pair.homology_c(&c, k)).collect();
    let quotient: Vec<usize> = (0..=n).map(|k| pair.homology_q(&c, k)).collect();
    let hc_e: Vec<usize> = cyclic_homology(&ext.e, n, size_cap)?.degrees.iter().map(|d| d.homology).collect();
    let hc_q: Vec<usize> = cyclic_homology(&ext.q, n, size_cap)?.degrees.iter().map(|d| d.homology).collect();
    let mut tower_rel = Vec::new();
    for k in 0..=n {
        tower_rel.push(relative_tower(ext, k, size_cap)?.complex.homology_dims()[k % 2]);
    }
    let consistent = relative == tower_rel && absolute == hc_e && quotient == hc_q;
    let connecting_ranks = (1..=n + 1).map(|k| pair.rank_connecting(&c, k)).collect();
    Ok(ExcisionReport { level: n, relative, absolute, quotient, consistent, connecting_ranks, sequence })
}

/// Checks on the commutator `[∂, s_L] = ∂_E ∘ s_L − s_L ∘ ∂_Q` of the
/// X-complex boundary with the degreewise extension of the section.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectingReport {
    pub top: usize,
    /// `p_* [∂, s_L] = 0` on every monomial of degree `≤ top`.
    pub lands_in_kernel: bool,
    /// `[∂, [∂, s_L]] = 0` on every monomial of degree `≤ top`.
    pub double_commutator_vanishes: bool,
    /// Every term of `[∂, s_L]` has a slot in `i(K)`; only decided when the
    /// basis of `E` is the union of the images of the bases of `K` and `Q`.
    pub every_term_meets_k: Option<bool>,
    /// Ranks of `HC_k(Q) → HC_{k−1}(E:Q)` for `k = 1 … top−1`, computed from lifts by `s_L`.
    pub ranks: Vec<usize>,
    /// The ranks agree with those of the pair `ker p_* ⊂ Tot(ΩE)`.
    pub ranks_match_pair: bool,
    /// Connecting images for the alternative section differ by boundaries.
    pub section_independent: Option<bool>,
}

fn adapted_k_indices(ext: &SplitExtension) -> Option<Vec<usize>> {
    let unit_index = |v: &SparseVec| match v.0.as_slice() {
        [(i, c)] if c.is_one() => Some(*i),
        _ => None,
    };
    let k: Vec<usize> = (0..ext.k.dim()).map(|j| unit_index(ext.i.image(j))).collect::<Option<_>>()?;
    let q: Vec<usize> = (0..ext.q.dim()).map(|j| unit_index(ext.s.image(j))).collect::<Option<_>>()?;
    let mut all: Vec<usize> = k.iter().chain(&q).copied().collect();
    all.sort_unstable();
    all.dedup();
    (all.len() == ext.e.dim()).then_some(k)
}

/// Verifies the connecting map built from `s_L` up to degree `top`, and
/// compares it with `alt` (another section) when given.
pub fn connecting_map(
    ext: &SplitExtension,
    top: usize,
    alt: Option<&LinearMapT>,
    size_cap: usize,
) -> Result<ConnectingReport> {
    let (de, dq) = (ext.e.dim(), ext.q.dim());
    let comm = |s: &LinearMapT, x: &FormVector| -> Result<FormVector> {
        Ok(partial_boundary(&ext.e, &pushforward(s, x))?.minus(&pushforward(s, &partial_boundary(&ext.q, x)?)))
    };
    let k_idx = adapted_k_indices(ext);
    let mut lands_in_kernel = true;
    let mut double_commutator_vanishes = true;
    let mut meets = k_idx.as_ref().map(|_| true);
    for j in 0..=top {
        for m in DegreeBasis::new(dq, j).monomials() {
            let x = FormVector::monomial(m);
            let c = comm(&ext.s, &x)?;
            lands_in_kernel &= pushforward(&ext.p, &c).is_zero();
            let dc = partial_boundary(&ext.e, &c)?.plus(&comm(&ext.s, &partial_boundary(&ext.q, &x)?)?);
            double_commutator_vanishes &= dc.is_zero();
            if let (Some(ks), Some(flag)) = (&k_idx, meets.as_mut()) {
                *flag &= c.iter().all(|(mm, _)| mm.lead.iter().chain(&mm.tail).any(|i| ks.contains(i)));
            }
        }
    }

    // homology level, on Tot
    let ce = tot_complex(&ext.e, top, size_cap)?;
    let cq = tot_complex(&ext.q, top, size_cap)?;
    let frames = kernel_frames(ext, top)?;
    let w: Vec<Vec<SparseVec>> = (0..=top).map(|k| tot_kernel_basis(de, k, &frames)).collect();
    let pair = PairData::new(&ce, &w)?;
    let mut ranks = Vec::new();
    let mut ranks_match_pair = true;
    let mut section_independent = alt.map(|_| true);
    for k in 1..top {
        let cycles = cq.boundary[k].kernel();
        let delta = |s: &LinearMapT, z: &SparseVec| -> Result<SparseVec> {
            let lifted = pushforward(s, &tot_form(dq, k, z));
            Ok(ce.boundary[k].apply(&tot_coords(de, k, &lifted)))
        };
        let images = cycles.iter().map(|z| delta(&ext.s, z)).collect::<Result<Vec<_>>>()?;
        let wech = Echelon::from_columns(ce.dims[k - 1], &w[k - 1]);
        lands_in_kernel &= images.iter().all(|v| wech.contains(v));
        let mut bw = Echelon::from_columns(ce.dims[k - 1], &pair.b_w[k - 1]);
        let base = bw.rank();
        for v in &images {
            bw.insert(v);
        }
        let r = bw.rank() - base;
        ranks_match_pair &= r == pair.rank_connecting(&ce, k);
        ranks.push(r);
        if let (Some(s2), Some(flag)) = (alt, section_independent.as_mut()) {
            let bw = Echelon::from_columns(ce.dims[k - 1], &pair.b_w[k - 1]);
            for (z, v) in cycles.iter().zip(&images) {
                *flag &= bw.contains(&delta(s2, z)?.sub(v));
            }
        }
    }
    Ok(ConnectingReport {
        top,
        lands_in_kernel,
        double_commutator_vanishes,
        every_term_meets_k: meets,
        ranks,
        ranks_match_pair,
        section_independent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        dual_numbers, field, make_split_extension, matrix_algebra, null_algebra, product_extension, t2_extension,
        zero_algebra,
    };
    use crate::homology::hodge::cyclic_homology;
    use crate::homology::DEFAULT_SIZE_CAP;

    fn dims(r: &crate::homology::HomologyReport) -> Vec<usize> {
        r.degrees.iter().map(|d| d.homology).collect()
    }

    #[test]
    fn tot_computes_cyclic_homology() {
        for a in [field(), dual_numbers(), matrix_algebra(2)] {
            let c = tot_complex(&a, 4, DEFAULT_SIZE_CAP).unwrap();
            let h = c.homology_dims();
            assert_eq!(h[..3].to_vec(), dims(&cyclic_homology(&a, 2, DEFAULT_SIZE_CAP).unwrap()));
        }
    }

    #[test]
    fn t2_sequence_exact() {
        for perturb in [false, true] {
            let r = six_term_check(&t2_extension(perturb), 3, DEFAULT_SIZE_CAP).unwrap();
            assert!(r.exact(), "{r:?}");
        }
    }

    #[test]
    fn trivial_extension_has_no_relative_homology() {
        let q = dual_numbers();
        let zero = zero_algebra();
        let id = LinearMapT::identity(2);
        let ext = make_split_extension(zero, q.clone(), q, LinearMapT::new(0, 2, Vec::new()).unwrap(), id.clone(), id)
            .unwrap();
        let r = six_term_check(&ext, 2, DEFAULT_SIZE_CAP).unwrap();
        assert!(r.exact());
        assert_eq!(r.relative, vec![0, 0, 0]);
        let c = connecting_map(&ext, 3, None, DEFAULT_SIZE_CAP).unwrap();
        assert!(c.ranks.iter().all(|&r| r == 0));
    }

    #[test]
    fn product_extension_splits() {
        let ext = product_extension(&null_algebra(1), &field());
        let r = six_term_check(&ext, 3, DEFAULT_SIZE_CAP).unwrap();
        assert!(r.exact(), "{r:?}");
        assert!(r.connecting_ranks.iter().all(|&k| k == 0));
        let c = connecting_map(&ext, 4, None, DEFAULT_SIZE_CAP).unwrap();
        assert!(c.ranks.iter().all(|&k| k == 0));
        assert!(c.lands_in_kernel && c.ranks_match_pair);
    }

    #[test]
    fn t2_connecting_map() {
        let ext = t2_extension(false);
        let alt = t2_extension(true).s;
        let c = connecting_map(&ext, 4, Some(&alt), DEFAULT_SIZE_CAP).unwrap();
        assert!(c.lands_in_kernel);
        assert!(c.double_commutator_vanishes);
        assert_eq!(c.every_term_meets_k, Some(true));
        assert!(c.ranks_match_pair);
        assert_eq!(c.section_independent, Some(true));
    }
}
