//! Chain complexes, homology ranks and exact-sequence verification, plus
//! the Hodge tower, excision, quasi-freeness, homotopy and bar-resolution
//! checks built on them.

pub mod bar;
pub mod excision;
pub mod hodge;
pub mod homotopy;
pub mod quasifree;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, QuotientSpace, SparseMatrix, SparseVec};

/// Default refusal bound on the dimension of any assembled chain space.
pub const DEFAULT_SIZE_CAP: usize = 20_000;

pub(crate) fn check_cap(what: &str, dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::SizeCap { what: what.to_string(), dim, cap })
    } else {
        Ok(())
    }
}

/// A finite chain complex. In the ℤ-graded case `boundary[k]: C_k → C_{k−1}`
/// (and `boundary[0]` has no rows); in the ℤ/2-graded case there are two
/// spaces and `boundary[k]: C_k → C_{1−k}`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub boundary: Vec<SparseMatrix>,
    pub periodic: bool,
}

impl ChainComplex {
    /// Assembles a complex, asserting `∂∘∂ = 0`.
    pub fn new(dims: Vec<usize>, boundary: Vec<SparseMatrix>, periodic: bool) -> Result<ChainComplex> {
        if periodic && dims.len() != 2 {
            return Err(Error::invalid("a ℤ/2-graded complex has exactly two spaces"));
        }
        if boundary.len() != dims.len() {
            return Err(Error::invalid("one boundary per degree is required"));
        }
        let c = ChainComplex { dims, boundary, periodic };
        for k in 0..c.len() {
            let m = &c.boundary[k];
            let rows = c.target(k).map_or(0, |t| c.dims[t]);
            if m.cols != c.dims[k] || m.rows != rows {
                return Err(Error::invalid(format!("boundary in degree {k} has the wrong shape")));
            }
            if let Some(t) = c.target(k) {
                if !c.boundary[t].compose(m).is_zero() {
                    return Err(Error::invalid(format!("∂∘∂ ≠ 0 starting in degree {k}")));
                }
            }
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Degree receiving the boundary of degree `k`.
    pub fn target(&self, k: usize) -> Option<usize> {
        if self.periodic {
            Some(1 - k)
        } else {
            k.checked_sub(1)
        }
    }

    /// Degree whose boundary lands in degree `k`.
    pub fn source(&self, k: usize) -> Option<usize> {
        if self.periodic {
            Some(1 - k)
        } else if k + 1 < self.len() {
            Some(k + 1)
        } else {
            None
        }
    }

    /// Kernel, image and homology ranks in every degree. In the ℤ-graded
    /// case the top degree has no incoming boundary.
    pub fn report(&self) -> HomologyReport {
        let ranks: Vec<usize> = self.boundary.iter().map(|m| m.rank()).collect();
        let degrees = (0..self.len())
            .map(|k| {
                let kernel = self.dims[k] - ranks[k];
                let image = self.source(k).map_or(0, |s| ranks[s]);
                DegreeHomology { degree: k, kernel, image, homology: kernel - image }
            })
            .collect();
        HomologyReport { degrees }
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        self.report().degrees.iter().map(|d| d.homology).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub degree: usize,
    pub kernel: usize,
    pub image: usize,
    pub homology: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub degrees: Vec<DegreeHomology>,
}

/// Cycles modulo boundaries inside an ambient space, with chosen
/// representatives and coordinates.
#[derive(Clone, Debug)]
pub struct HomologySpace {
    ech: Echelon,
    boundary_count: usize,
    pub representatives: Vec<SparseVec>,
}

impl HomologySpace {
    pub fn new(ambient: usize, cycles: &[SparseVec], boundaries: &[SparseVec]) -> HomologySpace {
        let mut ech = Echelon::tracking(ambient);
        for (i, v) in boundaries.iter().enumerate() {
            ech.insert_tracked(v, i);
        }
        let boundary_count = boundaries.len();
        let mut representatives = Vec::new();
        for z in cycles {
            if ech.insert_tracked(z, boundary_count + representatives.len()).is_none() {
                representatives.push(z.clone());
            }
        }
        HomologySpace { ech, boundary_count, representatives }
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of a cycle; `None` if `z` is not in the
    /// span of cycles.
    pub fn coords(&self, z: &SparseVec) -> Option<SparseVec> {
        let c = self.ech.express(z)?;
        Some(SparseVec::from_entries(
            c.iter().filter(|(i, _)| *i >= self.boundary_count).map(|(i, x)| (i - self.boundary_count, x.clone())),
        ))
    }

    /// Whether `z` is a boundary.
    pub fn is_boundary(&self, z: &SparseVec) -> bool {
        self.coords(z).is_some_and(|c| c.is_zero())
    }
}

/// Cycles of `∂` restricted to the span of `basis` (columns in ambient
/// coordinates), returned in ambient coordinates.
pub fn restricted_cycles(d: &SparseMatrix, basis: &[SparseVec]) -> Vec<SparseVec> {
    let images: Vec<SparseVec> = basis.iter().map(|v| d.apply(v)).collect();
    let m = SparseMatrix::from_columns(d.rows, images);
    let inc = SparseMatrix::from_columns(d.cols, basis.to_vec());
    m.kernel().iter().map(|k| inc.apply(k)).filter(|v| !v.is_zero()).collect()
}

fn rank_of(dim: usize, vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new(dim);
    for v in vectors {
        e.insert(&v);
    }
    e.rank()
}

/// Rank of the map on homology induced by inclusion of a cycle space into
/// homology modulo `boundaries`.
fn induced_rank(dim: usize, images: &[SparseVec], boundaries: &[SparseVec]) -> usize {
    let base = rank_of(dim, boundaries.iter().cloned());
    rank_of(dim, boundaries.iter().chain(images).cloned()) - base
}

/// One node of a long exact sequence: `in → H → out`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactNode {
    pub label: String,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub compositions_vanish: bool,
}

impl ExactNode {
    pub fn exact(&self) -> bool {
        self.compositions_vanish && self.rank_in + self.rank_out == self.dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactSequenceReport {
    pub nodes: Vec<ExactNode>,
}

impl ExactSequenceReport {
    pub fn exact(&self) -> bool {
        self.nodes.iter().all(|n| n.exact())
    }
}

/// Homology data of a subcomplex `W ⊂ C` and the quotient `C/W`, all in
/// `C`'s coordinates, per degree.
#[derive(Clone, Debug)]
pub struct PairData {
    pub z_w: Vec<Vec<SparseVec>>,
    pub b_w: Vec<Vec<SparseVec>>,
    pub z_c: Vec<Vec<SparseVec>>,
    pub b_c: Vec<Vec<SparseVec>>,
    pub z_q: Vec<Vec<SparseVec>>,
    pub b_q: Vec<Vec<SparseVec>>,
}

impl PairData {
    /// `w[k]` spans the subcomplex in degree `k`; it must be `∂`-stable.
    pub fn new(c: &ChainComplex, w: &[Vec<SparseVec>]) -> Result<PairData> {
        let n = c.len();
        if w.len() != n {
            return Err(Error::invalid("subcomplex needs a basis in every degree"));
        }
        let wech: Vec<Echelon> = (0..n).map(|k| Echelon::from_columns(c.dims[k], &w[k])).collect();
        for k in 0..n {
            if let Some(t) = c.target(k) {
                if w[k].iter().any(|v| !wech[t].contains(&c.boundary[k].apply(v))) {
                    return Err(Error::invalid(format!("subcomplex is not ∂-stable in degree {k}")));
                }
            }
        }
        let mut data = PairData {
            z_w: Vec::new(),
            b_w: Vec::new(),
            z_c: Vec::new(),
            b_c: Vec::new(),
            z_q: Vec::new(),
            b_q: Vec::new(),
        };
        for k in 0..n {
            let d = &c.boundary[k];
            data.z_w.push(restricted_cycles(d, &w[k]));
            data.z_c.push(d.kernel());
            // cycles of C/W: ∂c ∈ W
            let zq = match c.target(k) {
                None => (0..c.dims[k]).map(SparseVec::unit).collect(),
                Some(t) => {
                    let q = QuotientSpace::new(c.dims[t], &w[t]);
                    q.projection_matrix().compose(d).kernel()
                }
            };
            data.z_q.push(zq);
            let (bw, bc) = match c.source(k) {
                None => (Vec::new(), Vec::new()),
                Some(s) => {
                    let ds = &c.boundary[s];
                    (w[s].iter().map(|v| ds.apply(v)).collect(), ds.columns.clone())
                }
            };
            let mut bq = bc.clone();
            bq.extend(w[k].iter().cloned());
            data.b_w.push(bw);
            data.b_c.push(bc);
            data.b_q.push(bq);
        }
        Ok(data)
    }

    pub fn homology_w(&self, c: &ChainComplex, k: usize) -> usize {
        rank_of(c.dims[k], self.z_w[k].iter().cloned()) - rank_of(c.dims[k], self.b_w[k].iter().cloned())
    }

    pub fn homology_c(&self, c: &ChainComplex, k: usize) -> usize {
        rank_of(c.dims[k], self.z_c[k].iter().cloned()) - rank_of(c.dims[k], self.b_c[k].iter().cloned())
    }

    pub fn homology_q(&self, c: &ChainComplex, k: usize) -> usize {
        rank_of(c.dims[k], self.z_q[k].iter().cloned()) - rank_of(c.dims[k], self.b_q[k].iter().cloned())
    }

    /// Rank of `H_k(W) → H_k(C)`.
    pub fn rank_i(&self, c: &ChainComplex, k: usize) -> usize {
        induced_rank(c.dims[k], &self.z_w[k], &self.b_c[k])
    }

    /// Rank of `H_k(C) → H_k(C/W)`.
    pub fn rank_j(&self, c: &ChainComplex, k: usize) -> usize {
        induced_rank(c.dims[k], &self.z_c[k], &self.b_q[k])
    }

    /// Rank of the connecting map `H_k(C/W) → H_{target}(W)`.
    pub fn rank_connecting(&self, c: &ChainComplex, k: usize) -> usize {
        match c.target(k) {
            None => 0,
            Some(t) => {
                let images: Vec<SparseVec> = self.z_q[k].iter().map(|z| c.boundary[k].apply(z)).collect();
                induced_rank(c.dims[t], &images, &self.b_w[t])
            }
        }
    }

    fn contained(dim: usize, vs: &[SparseVec], span: &[SparseVec]) -> bool {
        let e = Echelon::from_columns(dim, span);
        vs.iter().all(|v| e.contains(v))
    }

    /// Exactness of `… → H(W) → H(C) → H(C/W) → H(W) → …` at every node
    /// in degrees `≤ top`. For ℤ-graded complexes `top + 2` must be present,
    /// so that the homology and connecting maps involved are not truncated.
    pub fn long_exact_sequence(&self, c: &ChainComplex, top: usize, names: [&str; 3]) -> Result<ExactSequenceReport> {
        let limit = if c.periodic { 1 } else { top };
        if !c.periodic && top + 2 >= c.len() {
            return Err(Error::invalid("complex is too short for the requested degrees"));
        }
        let mut nodes = Vec::new();
        for k in 0..=limit {
            let up = c.source(k).expect("degree below the top");
            // node H_k(W): in from H_up(C/W), out to H_k(C)
            let images: Vec<SparseVec> = self.z_q[up].iter().map(|z| c.boundary[up].apply(z)).collect();
            nodes.push(ExactNode {
                label: format!("{}_{k}", names[0]),
                dim: self.homology_w(c, k),
                rank_in: self.rank_connecting(c, up),
                rank_out: self.rank_i(c, k),
                compositions_vanish: Self::contained(c.dims[k], &images, &self.b_c[k]),
            });
            nodes.push(ExactNode {
                label: format!("{}_{k}", names[1]),
                dim: self.homology_c(c, k),
                rank_in: self.rank_i(c, k),
                rank_out: self.rank_j(c, k),
                compositions_vanish: Self::contained(c.dims[k], &self.z_w[k], &self.b_q[k]),
            });
            let into_w: Vec<SparseVec> = match c.target(k) {
                Some(_) => self.z_c[k].iter().map(|z| c.boundary[k].apply(z)).collect(),
                None => Vec::new(),
            };
            let tdim = c.target(k).map_or(0, |t| c.dims[t]);
            let tb = c.target(k).map_or(Vec::new(), |t| self.b_w[t].clone());
            nodes.push(ExactNode {
                label: format!("{}_{k}", names[2]),
                dim: self.homology_q(c, k),
                rank_in: self.rank_j(c, k),
                rank_out: self.rank_connecting(c, k),
                compositions_vanish: Self::contained(tdim, &into_w, &tb),
            });
        }
        Ok(ExactSequenceReport { nodes })
    }
}
