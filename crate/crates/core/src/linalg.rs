//! Exact rational linear algebra: sparse row reduction for span-membership
//! decisions (with combination certificates) and small dense kernels for the
//! harmonic projection.

use crate::Rat;
use num::{One, Zero};
use std::collections::BTreeMap;

/// A sparse vector over an abstract column index.
pub type SparseVec = BTreeMap<usize, Rat>;

/// Incremental row-echelon basis over the rationals.
///
/// Rows are reduced against the current basis on insertion; each stored row
/// remembers how it was formed from the inserted generators, so membership
/// queries can return an explicit linear combination.
#[derive(Default)]
pub struct RowSpan {
    /// pivot column -> index into `rows`
    pivots: BTreeMap<usize, usize>,
    rows: Vec<(SparseVec, BTreeMap<usize, Rat>)>,
    n_inserted: usize,
}

fn axpy(dst: &mut SparseVec, c: &Rat, src: &SparseVec) {
    for (k, v) in src {
        let entry = dst.entry(*k).or_insert_with(Rat::zero);
        *entry += c * v;
        if entry.is_zero() {
            dst.remove(k);
        }
    }
}

fn axpy_cert(dst: &mut BTreeMap<usize, Rat>, c: &Rat, src: &BTreeMap<usize, Rat>) {
    for (k, v) in src {
        let entry = dst.entry(*k).or_insert_with(Rat::zero);
        *entry += c * v;
        if entry.is_zero() {
            dst.remove(k);
        }
    }
}

impl RowSpan {
    pub fn new() -> RowSpan {
        RowSpan::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the basis. The basis is kept fully reduced (each
    /// stored row is zero at every other pivot column), so a single sweep
    /// suffices. Returns the residual and the generator combination with
    /// `v = residual + combination`.
    fn reduce(&self, mut v: SparseVec) -> (SparseVec, BTreeMap<usize, Rat>) {
        let mut used: BTreeMap<usize, Rat> = BTreeMap::new();
        loop {
            let hit = v
                .iter()
                .find_map(|(col, _)| self.pivots.get(col).map(|&r| (*col, r)));
            let Some((col, row_idx)) = hit else { break };
            let coeff = v.get(&col).unwrap().clone();
            let (row, cert) = &self.rows[row_idx];
            let pivot_val = row.get(&col).unwrap();
            let c = -(coeff / pivot_val);
            axpy(&mut v, &c, row);
            axpy_cert(&mut used, &c, cert);
        }
        let combination = used.into_iter().map(|(k, c)| (k, -c)).collect();
        (v, combination)
    }

    /// Insert a generator; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let tag = self.n_inserted;
        self.n_inserted += 1;
        let (res, comb) = self.reduce(v);
        if res.is_empty() {
            return false;
        }
        // res = g_tag - comb
        let mut cert: BTreeMap<usize, Rat> =
            comb.into_iter().map(|(k, c)| (k, -c)).collect();
        cert.insert(tag, Rat::one());
        let pivot = *res.keys().next().unwrap();
        // Keep the basis fully reduced: clear the new pivot column everywhere.
        let new_idx = self.rows.len();
        for (row, rc) in self.rows.iter_mut() {
            if let Some(entry) = row.get(&pivot) {
                let c = -(entry / res.get(&pivot).unwrap());
                axpy(row, &c, &res);
                axpy_cert(rc, &c, &cert);
            }
        }
        self.rows.push((res, cert));
        self.pivots.insert(pivot, new_idx);
        true
    }

    /// Is `v` in the span? On success, returns coefficients `c_i` over the
    /// inserted generators with `v = sum c_i g_i`.
    pub fn membership(&self, v: SparseVec) -> Option<BTreeMap<usize, Rat>> {
        let (res, comb) = self.reduce(v);
        if res.is_empty() {
            Some(comb)
        } else {
            None
        }
    }
}

/// Dense matrix over the rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rat>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> QMat {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d += s;
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d -= s;
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        let mut out = self.clone();
        for d in out.data.iter_mut() {
            *d *= c;
        }
        out
    }

    pub fn transpose(&self) -> QMat {
        let mut out = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Rank by Gaussian elimination (destructive on a copy).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else { continue };
            m.swap_rows(row, p);
            for r in 0..m.rows {
                if r != row && !m[(r, col)].is_zero() {
                    let f = &m[(r, col)] / &m[(row, col)];
                    for c in col..m.cols {
                        let sub = &f * &m[(row, c)];
                        m[(r, c)] -= sub;
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !m[(r, col)].is_zero())?;
            m.swap_rows(col, p);
            inv.swap_rows(col, p);
            let pivot = m[(col, col)].clone();
            for c in 0..n {
                m[(col, c)] /= &pivot;
                inv[(col, c)] /= &pivot;
            }
            for r in 0..n {
                if r != col && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for c in 0..n {
                        let a = &f * &m[(col, c)];
                        m[(r, c)] -= a;
                        let b = &f * &inv[(col, c)];
                        inv[(r, c)] -= b;
                    }
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut t = Rat::zero();
        for i in 0..self.rows {
            t += &self[(i, i)];
        }
        t
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rint;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, v)| (k, rint(v))).collect()
    }

    #[test]
    fn membership_with_certificate() {
        let mut span = RowSpan::new();
        assert!(span.insert(sv(&[(0, 1), (1, 1)])));
        assert!(span.insert(sv(&[(1, 1), (2, 1)])));
        let cert = span.membership(sv(&[(0, 2), (1, 1), (2, -1)])).unwrap();
        // v = 2*g0 - g1
        assert_eq!(cert.get(&0), Some(&rint(2)));
        assert_eq!(cert.get(&1), Some(&rint(-1)));
        assert!(span.membership(sv(&[(3, 1)])).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let mut m = QMat::zeros(2, 2);
        m[(0, 0)] = rint(2);
        m[(0, 1)] = rint(1);
        m[(1, 0)] = rint(5);
        m[(1, 1)] = rint(3);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
    }

    #[test]
    fn rank_of_singular() {
        let mut m = QMat::zeros(2, 2);
        m[(0, 0)] = rint(1);
        m[(0, 1)] = rint(2);
        m[(1, 0)] = rint(2);
        m[(1, 1)] = rint(4);
        assert_eq!(m.rank(), 1);
    }
}
