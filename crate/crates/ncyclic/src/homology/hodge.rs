//! The Hodge tower `𝒳ₙ(A) = Ω(A)/Fₙ(A)` with boundary `B + b`, and the
//! Hochschild, cyclic and de Rham homology computed from it.

use serde::Serialize;

use super::{check_cap, ChainComplex, DegreeHomology, ExactSequenceReport, HomologyReport, HomologySpace, PairData};
use crate::algebra::BasedAlgebra;
use crate::error::{Error, Result};
use crate::forms::{b, connes_b, operator_matrix, DegreeBasis, FormVector};
use crate::linalg::{span_rank, Echelon, QuotientSpace, SparseMatrix, SparseVec};

/// A subspace of `Ωʲ` given by basis columns, with coordinates.
#[derive(Clone, Debug)]
pub struct Frame {
    pub basis: Vec<SparseVec>,
    ech: Echelon,
}

impl Frame {
    pub fn new(ambient: usize, basis: Vec<SparseVec>) -> Frame {
        let mut ech = Echelon::tracking(ambient);
        for (i, v) in basis.iter().enumerate() {
            ech.insert_tracked(v, i);
        }
        Frame { basis, ech }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn coords(&self, v: &SparseVec) -> Option<SparseVec> {
        self.ech.express(v)
    }

    pub fn combine(&self, c: &SparseVec) -> SparseVec {
        c.iter().fold(SparseVec::new(), |acc, (i, x)| acc.axpy(x, &self.basis[*i]))
    }
}

/// `𝒳ₙ = Σ_{j<n} Ωʲ ⊕ Ωⁿ/b(Ω^{n+1})`, split by parity. A relative tower
/// replaces each `Ωʲ` by a `b`- and `B`-stable subspace given by frames.
#[derive(Clone, Debug)]
pub struct HodgeTower {
    pub algebra: BasedAlgebra,
    pub level: usize,
    /// Subspaces of `Ω⁰ … Ωⁿ`; `None` for the whole of `Ω`.
    pub frames: Option<Vec<Frame>>,
    /// The top block modulo `b` of the next degree, in frame coordinates.
    pub top: QuotientSpace,
    /// Periodic complex: space 0 is even, space 1 is odd.
    pub complex: ChainComplex,
}

impl HodgeTower {
    pub fn dim_a(&self) -> usize {
        self.algebra.dim()
    }

    fn block(&self, j: usize) -> usize {
        if j == self.level {
            self.top.dim()
        } else {
            match &self.frames {
                Some(f) => f[j].len(),
                None => DegreeBasis::new(self.dim_a(), j).len(),
            }
        }
    }

    /// Offset of degree `j`'s block inside its parity space.
    fn offset(&self, j: usize) -> usize {
        (j % 2..j).step_by(2).map(|i| self.block(i)).sum()
    }

    /// The projection `ξₙ` on the parity-`p` part of `w`. Fails if `w` leaves
    /// the frames of a relative tower.
    pub fn project(&self, w: &FormVector, p: usize) -> Result<SparseVec> {
        let mut entries = Vec::new();
        for j in (p..=self.level).step_by(2) {
            let mut c = DegreeBasis::new(self.dim_a(), j).coords(w);
            if let Some(f) = &self.frames {
                c = f[j].coords(&c).ok_or_else(|| Error::invalid(format!("form leaves the subspace in degree {j}")))?;
            }
            if j == self.level {
                c = self.top.project(&c);
            }
            let off = self.offset(j);
            entries.extend(c.iter().map(|(i, x)| (i + off, x.clone())));
        }
        Ok(SparseVec::from_entries(entries))
    }

    /// A form representing a parity-`p` vector of the tower.
    pub fn lift(&self, p: usize, v: &SparseVec) -> FormVector {
        let mut out = FormVector::zero();
        for j in (p..=self.level).step_by(2) {
            let (off, len) = (self.offset(j), self.block(j));
            let mut part = SparseVec::from_entries(
                v.iter().filter(|(i, _)| *i >= off && *i < off + len).map(|(i, x)| (i - off, x.clone())),
            );
            if j == self.level {
                part = self.top.lift(&part);
            }
            if let Some(f) = &self.frames {
                part = f[j].combine(&part);
            }
            out.add_assign(&DegreeBasis::new(self.dim_a(), j).form(&part));
        }
        out
    }

    /// Matrix of `ξ_{n,m}: 𝒳ₙ → 𝒳ₘ` on parity `p`.
    pub fn xi(&self, target: &HodgeTower, p: usize) -> Result<SparseMatrix> {
        if target.level > self.level {
            return Err(Error::invalid("ξ only maps down the tower"));
        }
        let cols = (0..self.complex.dims[p])
            .map(|i| target.project(&self.lift(p, &SparseVec::unit(i)), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix::from_columns(target.complex.dims[p], cols))
    }

    /// `(H_even, H_odd)`.
    pub fn homology(&self) -> (usize, usize) {
        let h = self.complex.homology_dims();
        (h[0], h[1])
    }

    pub fn homology_space(&self, p: usize) -> HomologySpace {
        HomologySpace::new(
            self.complex.dims[p],
            &self.complex.boundary[p].kernel(),
            &self.complex.boundary[1 - p].columns,
        )
    }
}

/// Assembles `𝒳ₙ(A)`; refuses when `Ω^{n+1}` exceeds `size_cap`.
pub fn hodge_tower(a: &BasedAlgebra, n: usize, size_cap: usize) -> Result<HodgeTower> {
    build_tower(a, n, None, size_cap)
}

/// Assembles the tower of a subcomplex of `Ω(A)` given by frames in degrees
/// `0 … n+1`, each stable under `b` and `B`.
pub fn subspace_tower(a: &BasedAlgebra, n: usize, frames: Vec<Frame>, size_cap: usize) -> Result<HodgeTower> {
    if frames.len() != n + 2 {
        return Err(Error::invalid("a frame is needed in every degree up to n+1"));
    }
    build_tower(a, n, Some(frames), size_cap)
}

fn build_tower(a: &BasedAlgebra, n: usize, frames: Option<Vec<Frame>>, size_cap: usize) -> Result<HodgeTower> {
    let dim_a = a.dim();
    check_cap("Ω^(n+1)", DegreeBasis::new(dim_a, n + 1).len(), size_cap)?;
    let bn = operator_matrix(dim_a, n + 1, n, |w| b(a, w))?;
    let (top, frames) = match frames {
        None => (QuotientSpace::new(DegreeBasis::new(dim_a, n).len(), &bn.columns), None),
        Some(mut f) => {
            let next = f.pop().expect("frame list checked");
            let images = next
                .basis
                .iter()
                .map(|v| f[n].coords(&bn.apply(v)).ok_or_else(|| Error::invalid("b leaves the subspace")))
                .collect::<Result<Vec<_>>>()?;
            (QuotientSpace::new(f[n].len(), &images), Some(f))
        }
    };
    let mut tower = HodgeTower {
        algebra: a.clone(),
        level: n,
        frames,
        top,
        complex: ChainComplex { dims: vec![0, 0], boundary: Vec::new(), periodic: true },
    };
    let mut dims = vec![0usize; 2];
    for j in 0..=n {
        dims[j % 2] += tower.block(j);
    }
    let mut boundary = Vec::new();
    for p in 0..2 {
        let cols = (0..dims[p])
            .map(|i| {
                let w = tower.lift(p, &SparseVec::unit(i));
                let dw = b(a, &w)?.plus(&connes_b(&w));
                tower.project(&dw.truncate(n), 1 - p)
            })
            .collect::<Result<Vec<_>>>()?;
        boundary.push(SparseMatrix::from_columns(dims[1 - p], cols));
    }
    tower.complex = ChainComplex::new(dims, boundary, true)?;
    Ok(tower)
}

/// The Hochschild complex `(Ω⁰ … Ω^{top}, b)`.
pub fn hochschild_complex(a: &BasedAlgebra, top: usize, size_cap: usize) -> Result<ChainComplex> {
    let dim_a = a.dim();
    check_cap("Ω^top", DegreeBasis::new(dim_a, top).len(), size_cap)?;
    let dims: Vec<usize> = (0..=top).map(|j| DegreeBasis::new(dim_a, j).len()).collect();
    let mut boundary = vec![SparseMatrix::zeros(0, dims[0])];
    for j in 1..=top {
        boundary.push(operator_matrix(dim_a, j, j - 1, |w| b(a, w))?);
    }
    ChainComplex::new(dims, boundary, false)
}

/// `HHₙ` for `n ≤ max_degree`.
pub fn hochschild_homology(a: &BasedAlgebra, max_degree: usize, size_cap: usize) -> Result<HomologyReport> {
    let c = hochschild_complex(a, max_degree + 1, size_cap)?;
    let mut r = c.report();
    r.degrees.truncate(max_degree + 1);
    Ok(r)
}

/// `HCₙ = H_n(𝒳ₙ)` for `n ≤ max_degree`.
pub fn cyclic_homology(a: &BasedAlgebra, max_degree: usize, size_cap: usize) -> Result<HomologyReport> {
    tower_degrees(a, max_degree, 0, size_cap)
}

/// `HDₙ = H_n(𝒳_{n+1})` for `n ≤ max_degree`.
pub fn de_rham_homology(a: &BasedAlgebra, max_degree: usize, size_cap: usize) -> Result<HomologyReport> {
    tower_degrees(a, max_degree, 1, size_cap)
}

fn tower_degrees(a: &BasedAlgebra, max_degree: usize, shift: usize, size_cap: usize) -> Result<HomologyReport> {
    let mut degrees = Vec::new();
    for n in 0..=max_degree {
        let t = hodge_tower(a, n + shift, size_cap)?;
        let r = t.complex.report();
        let mut d = r.degrees[n % 2].clone();
        d.degree = n;
        degrees.push(d);
    }
    Ok(HomologyReport { degrees })
}

/// Whether `ξ_{n,m}` is a chain map, for both parities.
pub fn xi_commutes(from: &HodgeTower, to: &HodgeTower) -> Result<bool> {
    for p in 0..2 {
        let lhs = to.complex.boundary[p].compose(&from.xi(to, p)?);
        let rhs = from.xi(to, 1 - p)?.compose(&from.complex.boundary[p]);
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The map `S: HCₙ → HC_{n−2}` induced by `ξ_{n,n−2}`, in the bases of
/// homology representatives chosen by [`HodgeTower::homology_space`].
#[derive(Clone, Debug)]
pub struct SOperator {
    pub level: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub matrix: SparseMatrix,
}

impl SOperator {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

pub fn s_operator(a: &BasedAlgebra, n: usize, size_cap: usize) -> Result<SOperator> {
    if n < 2 {
        return Err(Error::invalid("S needs level at least 2"));
    }
    let hi = hodge_tower(a, n, size_cap)?;
    let lo = hodge_tower(a, n - 2, size_cap)?;
    let p = n % 2;
    let (hs, ls) = (hi.homology_space(p), lo.homology_space(p));
    let xi = hi.xi(&lo, p)?;
    let cols = hs
        .representatives
        .iter()
        .map(|z| ls.coords(&xi.apply(z)).ok_or_else(|| Error::invalid("ξ does not map cycles to cycles")))
        .collect::<Result<Vec<_>>>()?;
    Ok(SOperator {
        level: n,
        source_dim: hs.dim(),
        target_dim: ls.dim(),
        matrix: SparseMatrix::from_columns(ls.dim(), cols),
    })
}

/// Stabilization data for one parity: `HC_m`, `HC_{m−2}` and `rank S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityEstimate {
    pub parity: usize,
    pub level: usize,
    pub hc_level: usize,
    pub hc_below: usize,
    pub s_rank: usize,
}

impl ParityEstimate {
    pub fn stabilized(&self) -> bool {
        self.hc_level == self.hc_below && self.s_rank == self.hc_level
    }
}

/// Heuristic periodic-homology estimate at level `n ≥ 2`: the parity of `n`
/// is read off levels `n, n−2`, the other parity off `n+1, n−1`. A parity is
/// reported stable when both dimensions agree and `S` is bijective between
/// them; this is not a proof of stabilization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HpEstimate {
    pub even: ParityEstimate,
    pub odd: ParityEstimate,
}

impl HpEstimate {
    pub fn stabilized(&self) -> bool {
        self.even.stabilized() && self.odd.stabilized()
    }

    /// `(HP⁰, HP¹)` when stable.
    pub fn values(&self) -> Option<(usize, usize)> {
        self.stabilized().then_some((self.even.hc_level, self.odd.hc_level))
    }
}

pub fn hp_estimate(a: &BasedAlgebra, n: usize, size_cap: usize) -> Result<HpEstimate> {
    if n < 2 {
        return Err(Error::invalid("periodic estimate needs level at least 2"));
    }
    let estimate = |m: usize| -> Result<ParityEstimate> {
        let s = s_operator(a, m, size_cap)?;
        Ok(ParityEstimate { parity: m % 2, level: m, hc_level: s.source_dim, hc_below: s.target_dim, s_rank: s.rank() })
    };
    let (here, next) = (estimate(n)?, estimate(n + 1)?);
    Ok(if n % 2 == 0 { HpEstimate { even: here, odd: next } } else { HpEstimate { even: next, odd: here } })
}

/// Dimensions along `HD_{n−1} → HC_{n−1} → HHₙ → HCₙ → HD_{n−2}` and the
/// exactness report of the underlying six-term sequence.
#[derive(Clone, Debug, Serialize)]
pub struct SbiReport {
    pub level: usize,
    pub hd_prev: usize,
    pub hc_prev: usize,
    pub hh: usize,
    pub hc: usize,
    pub hd_prev2: usize,
    /// Dimensions from the pair agree with the tower computed directly.
    pub consistent: bool,
    pub sequence: ExactSequenceReport,
}

impl SbiReport {
    pub fn exact(&self) -> bool {
        self.consistent && self.sequence.exact()
    }
}

/// Checks exactness of the SBI sequence at level `n ≥ 1` through the pair
/// `W ⊂ 𝒳ₙ` with `W = b(Ωⁿ) ⊕ Ωⁿ/b(Ω^{n+1})` and `𝒳ₙ/W = 𝒳_{n−1}`.
pub fn sbi_check(a: &BasedAlgebra, n: usize, size_cap: usize) -> Result<SbiReport> {
    if n == 0 {
        return Err(Error::invalid("SBI needs level at least 1"));
    }
    let t = hodge_tower(a, n, size_cap)?;
    let dim_a = a.dim();
    let p = n % 2;
    let mut w: Vec<Vec<SparseVec>> = vec![Vec::new(), Vec::new()];
    w[p] = (0..t.top.dim()).map(|i| SparseVec::unit(t.offset(n) + i)).collect();
    let bn = operator_matrix(dim_a, n, n - 1, |x| b(a, x))?;
    let below = DegreeBasis::new(dim_a, n - 1);
    w[1 - p] = bn.columns.iter().map(|c| t.project(&below.form(c), 1 - p)).collect::<Result<_>>()?;
    let pair = PairData::new(&t.complex, &w)?;
    let sequence = pair.long_exact_sequence(&t.complex, 1, ["W", "X", "X/W"])?;

    let hh = hochschild_homology(a, n, size_cap)?.degrees[n].homology;
    let hc = t.complex.report().degrees[p].homology;
    let prev = hodge_tower(a, n - 1, size_cap)?.complex.homology_dims();
    let hc_prev = prev[1 - p];
    let hd_prev2 = prev[p];
    let hd_prev = t.complex.report().degrees[1 - p].homology;
    let consistent = pair.homology_w(&t.complex, p) == hh
        && pair.homology_w(&t.complex, 1 - p) == 0
        && pair.homology_q(&t.complex, p) == hd_prev2
        && pair.homology_q(&t.complex, 1 - p) == hc_prev;
    Ok(SbiReport { level: n, hd_prev, hc_prev, hh, hc, hd_prev2, consistent, sequence })
}

/// `dim Fₙ ∩ Ω^{≤top}` computed from the definition, for cross-checks of the
/// alternative descriptions of the Hodge filtration.
pub fn hodge_filtration_basis(a: &BasedAlgebra, n: usize, top: usize) -> Result<Vec<FormVector>> {
    let dim_a = a.dim();
    let mut out: Vec<FormVector> = operator_matrix(dim_a, n + 1, n, |x| b(a, x))?
        .columns
        .iter()
        .map(|c| DegreeBasis::new(dim_a, n).form(c))
        .collect();
    for j in n + 1..=top {
        let basis = DegreeBasis::new(dim_a, j);
        out.extend(basis.monomials().map(FormVector::monomial));
    }
    Ok(out)
}

/// Rank of a family of forms supported in degrees `≤ top`.
pub fn form_span_rank(dim_a: usize, forms: &[FormVector], top: usize) -> usize {
    let offsets: Vec<usize> = (0..=top)
        .scan(0, |acc, j| {
            let o = *acc;
            *acc += DegreeBasis::new(dim_a, j).len();
            Some(o)
        })
        .collect();
    let total = offsets.last().copied().unwrap_or(0) + DegreeBasis::new(dim_a, top).len();
    let vecs: Vec<SparseVec> = forms
        .iter()
        .map(|f| {
            SparseVec::from_entries(
                f.iter()
                    .filter(|(m, _)| m.degree() <= top && !(m.degree() == 0 && m.lead.is_none()))
                    .map(|(m, c)| (offsets[m.degree()] + DegreeBasis::new(dim_a, m.degree()).index(m), c.clone())),
            )
        })
        .collect();
    span_rank(total, &vecs)
}

/// Per-degree Hochschild dimensions from ranks of `b` alone.
pub fn hh_from_ranks(a: &BasedAlgebra, n: usize) -> Result<DegreeHomology> {
    let dim_a = a.dim();
    let dim = DegreeBasis::new(dim_a, n).len();
    let out_rank = if n == 0 { 0 } else { operator_matrix(dim_a, n, n - 1, |x| b(a, x))?.rank() };
    let in_rank = operator_matrix(dim_a, n + 1, n, |x| b(a, x))?.rank();
    Ok(DegreeHomology { degree: n, kernel: dim - out_rank, image: in_rank, homology: dim - out_rank - in_rank })
}
