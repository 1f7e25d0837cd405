//! Exact sparse linear algebra over ℚ(i).
//!
//! Matrices are stored by columns. Elimination processes columns in order and
//! pivots on the first nonzero row of each reduced column, so every echelon
//! form, complement basis and kernel basis is deterministic.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(pub Vec<(usize, Scalar)>);

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> SparseVec {
        SparseVec(vec![(i, Scalar::ONE)])
    }

    /// Builds from unordered entries, summing duplicates and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
        let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, c) in entries {
            add_into(&mut map, i, &c);
        }
        SparseVec(map.into_iter().collect())
    }

    pub fn from_dense(v: &[Scalar]) -> SparseVec {
        SparseVec(v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect())
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::ZERO; dim];
        for (i, c) in &self.0 {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.0.binary_search_by_key(&i, |(k, _)| *k) {
            Ok(pos) => self.0[pos].1.clone(),
            Err(_) => Scalar::ZERO,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.0.iter()
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(i, x)| (*i, x * c)).collect())
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + &(y * c);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|(_, x)| !x.is_zero());
        SparseVec(out)
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Scalar::ONE, other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Scalar::int(-1), other)
    }

    /// Re-indexes entries through `f`, dropping those mapped to `None`.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_entries(self.0.iter().filter_map(|(i, c)| f(*i).map(|j| (j, c.clone()))))
    }
}

fn add_into(map: &mut BTreeMap<usize, Scalar>, i: usize, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(i) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c.clone());
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix { rows: n, cols: n, columns: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> SparseMatrix {
        debug_assert!(columns.iter().all(|c| c.0.last().is_none_or(|(i, _)| *i < rows)));
        SparseMatrix { rows, cols: columns.len(), columns }
    }

    /// Builds from dense rows.
    pub fn from_dense_rows(rows: &[Vec<Scalar>]) -> SparseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let columns =
            (0..c).map(|j| SparseVec::from_dense(&rows.iter().map(|row| row[j].clone()).collect::<Vec<_>>())).collect();
        SparseMatrix { rows: r, cols: c, columns }
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::ZERO; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.iter() {
                out[*i][j] = c.clone();
            }
        }
        out
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.columns[j].get(i)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut map = BTreeMap::new();
        for (j, c) in v.iter() {
            for (i, x) in self.columns[*j].iter() {
                add_into(&mut map, *i, &(x * c));
            }
        }
        SparseVec(map.into_iter().collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in compose");
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        SparseMatrix { rows: self.rows, cols: self.cols, columns: self.columns.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.iter() {
                cols[*i].push((j, c.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, columns: cols.into_iter().map(SparseVec).collect() }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        SparseMatrix { rows: self.rows, cols: columns.len(), columns }
    }

    /// Rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.cols);
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut v = a.0.clone();
                v.extend(b.0.iter().map(|(i, c)| (i + self.rows, c.clone())));
                SparseVec(v)
            })
            .collect();
        SparseMatrix { rows: self.rows + other.rows, cols: self.cols, columns }
    }

    pub fn select_columns(&self, idx: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: idx.len(),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.rows);
        for c in &self.columns {
            e.insert(c);
        }
        e.rank()
    }

    /// Basis of the null space, one vector per non-pivot column.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut e = Echelon::tracking(self.rows);
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            if let Some(k) = e.insert_tracked(c, j) {
                out.push(k);
            }
        }
        out
    }

    /// Some `x` with `self·x = y`, if one exists.
    pub fn solve(&self, y: &SparseVec) -> Option<SparseVec> {
        let mut e = Echelon::tracking(self.rows);
        for (j, c) in self.columns.iter().enumerate() {
            e.insert_tracked(c, j);
        }
        e.express(y)
    }
}

/// Incrementally built echelon basis of a column space.
///
/// Incoming vectors are fully reduced against existing pivots, so the
/// remainder of a vector is a canonical representative modulo the span.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    pivot_of_row: BTreeMap<usize, usize>,
    vectors: Vec<SparseVec>,
    combos: Option<Vec<SparseVec>>,
}

impl Echelon {
    pub fn new(dim: usize) -> Echelon {
        Echelon { dim, pivot_of_row: BTreeMap::new(), vectors: Vec::new(), combos: None }
    }

    /// Also records each pivot vector as a combination of inserted vectors.
    pub fn tracking(dim: usize) -> Echelon {
        Echelon { combos: Some(Vec::new()), ..Echelon::new(dim) }
    }

    pub fn from_columns(dim: usize, cols: &[SparseVec]) -> Echelon {
        let mut e = Echelon::new(dim);
        for c in cols {
            e.insert(c);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_of_row.keys().copied()
    }

    pub fn is_pivot(&self, row: usize) -> bool {
        self.pivot_of_row.contains_key(&row)
    }

    /// The echelon basis vectors (leading coefficient 1).
    pub fn basis(&self) -> &[SparseVec] {
        &self.vectors
    }

    fn reduce_work(&self, work: &mut BTreeMap<usize, Scalar>, mut track: Option<&mut BTreeMap<usize, Scalar>>) {
        let mut cursor = 0;
        loop {
            let hit =
                work.range(cursor..).find(|(r, _)| self.pivot_of_row.contains_key(r)).map(|(r, c)| (*r, c.clone()));
            let Some((row, coef)) = hit else { break };
            let slot = self.pivot_of_row[&row];
            let neg = -&coef;
            for (i, x) in self.vectors[slot].iter() {
                add_into(work, *i, &(x * &neg));
            }
            if let (Some(t), Some(combos)) = (track.as_deref_mut(), &self.combos) {
                for (i, x) in combos[slot].iter() {
                    add_into(t, *i, &(x * &neg));
                }
            }
            cursor = row + 1;
        }
    }

    /// Canonical remainder of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut work: BTreeMap<usize, Scalar> = v.0.iter().cloned().collect();
        self.reduce_work(&mut work, None);
        SparseVec(work.into_iter().collect())
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        self.push_remainder(r, None)
    }

    fn push_remainder(&mut self, r: SparseVec, combo: Option<SparseVec>) -> bool {
        let Some((lead, c)) = r.0.first().cloned() else { return false };
        let inv = c.inv();
        self.pivot_of_row.insert(lead, self.vectors.len());
        self.vectors.push(r.scale(&inv));
        if let (Some(combos), Some(combo)) = (self.combos.as_mut(), combo) {
            combos.push(combo.scale(&inv));
        }
        true
    }

    /// Inserts `v` labelled `label`; if `v` is dependent, returns the
    /// relation (a kernel vector over labels).
    pub fn insert_tracked(&mut self, v: &SparseVec, label: usize) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "insert_tracked on a non-tracking echelon");
        let mut work: BTreeMap<usize, Scalar> = v.0.iter().cloned().collect();
        let mut track: BTreeMap<usize, Scalar> = BTreeMap::new();
        track.insert(label, Scalar::ONE);
        self.reduce_work(&mut work, Some(&mut track));
        let r = SparseVec(work.into_iter().collect());
        let t = SparseVec(track.into_iter().collect());
        if r.is_zero() {
            Some(t)
        } else {
            self.push_remainder(r, Some(t));
            None
        }
    }

    /// Coefficients over labels expressing `y`, if `y` lies in the span.
    pub fn express(&self, y: &SparseVec) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "express on a non-tracking echelon");
        let mut work: BTreeMap<usize, Scalar> = y.0.iter().cloned().collect();
        let mut track: BTreeMap<usize, Scalar> = BTreeMap::new();
        self.reduce_work(&mut work, Some(&mut track));
        if work.is_empty() {
            Some(SparseVec(track.into_iter().map(|(i, c)| (i, -c)).collect()))
        } else {
            None
        }
    }
}

/// A quotient `ambient / subspace` with complement chosen on the non-pivot
/// rows of the subspace echelon form.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    pub ambient: usize,
    pub sub: Echelon,
    /// Ambient indices spanning the complement, in increasing order.
    pub complement: Vec<usize>,
    position: BTreeMap<usize, usize>,
}

impl QuotientSpace {
    pub fn new(ambient: usize, subspace: &[SparseVec]) -> QuotientSpace {
        let sub = Echelon::from_columns(ambient, subspace);
        let complement: Vec<usize> = (0..ambient).filter(|r| !sub.is_pivot(*r)).collect();
        let position = complement.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        QuotientSpace { ambient, sub, complement, position }
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Complement coordinates of the class of `v`.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let r = self.sub.reduce(v);
        SparseVec(r.0.into_iter().map(|(i, c)| (self.position[&i], c)).collect())
    }

    /// The ambient representative of complement coordinates.
    pub fn lift(&self, v: &SparseVec) -> SparseVec {
        SparseVec(v.0.iter().map(|(k, c)| (self.complement[*k], c.clone())).collect())
    }

    pub fn projection_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.dim(), (0..self.ambient).map(|i| self.project(&SparseVec::unit(i))).collect())
    }

    pub fn inclusion_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.ambient, (0..self.dim()).map(|k| SparseVec::unit(self.complement[k])).collect())
    }
}

/// Rank of the span of a list of vectors.
pub fn span_rank(dim: usize, vectors: &[SparseVec]) -> usize {
    Echelon::from_columns(dim, vectors).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense_rows(
            &rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_kernel_solve_small() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).is_zero());
        let y = SparseVec::from_dense(&[Scalar::int(3), Scalar::int(6), Scalar::int(1)]);
        let x = a.solve(&y).unwrap();
        assert_eq!(a.apply(&x), y);
        let bad = SparseVec::from_dense(&[Scalar::int(1), Scalar::int(0), Scalar::int(0)]);
        assert!(a.solve(&bad).is_none());
    }

    #[test]
    fn quotient_projection() {
        let sub = vec![SparseVec::from_dense(&[Scalar::int(1), Scalar::int(1), Scalar::ZERO])];
        let q = QuotientSpace::new(3, &sub);
        assert_eq!(q.dim(), 2);
        assert_eq!(q.complement, vec![1, 2]);
        assert!(q.project(&sub[0]).is_zero());
        let p = q.projection_matrix();
        assert_eq!(p.compose(&q.inclusion_matrix()), SparseMatrix::identity(2));
    }

    fn dense_rank(mut rows: Vec<Vec<Scalar>>) -> usize {
        let (n, mcols) = (rows.len(), rows.first().map_or(0, |r| r.len()));
        let mut rank = 0;
        for col in 0..mcols {
            let Some(p) = (rank..n).find(|&r| !rows[r][col].is_zero()) else { continue };
            rows.swap(rank, p);
            for r in 0..n {
                if r != rank && !rows[r][col].is_zero() {
                    let f = &rows[r][col] / &rows[rank][col];
                    let pr = rows[rank].clone();
                    for (x, y) in rows[r].iter_mut().zip(pr) {
                        *x -= &(&f * &y);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense(entries in proptest::collection::vec(-2i64..3, 1..64), cols in 1usize..8) {
            let rows = entries.len() / cols;
            prop_assume!(rows > 0);
            let dense: Vec<Vec<Scalar>> = (0..rows)
                .map(|r| (0..cols).map(|c| Scalar::int(entries[r * cols + c])).collect())
                .collect();
            let a = SparseMatrix::from_dense_rows(&dense);
            let r = a.rank();
            prop_assert_eq!(r, dense_rank(dense));
            let k = a.kernel();
            prop_assert_eq!(k.len() + r, cols);
            for v in &k {
                prop_assert!(a.apply(v).is_zero());
            }
            prop_assert_eq!(a.transpose().rank(), r);
        }
    }
}
