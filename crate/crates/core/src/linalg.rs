//! Exact sparse linear algebra over the rationals.
//!
//! Matrices are addressed by labels rather than positions: rows are created
//! on first use, so a caller can expand bracket images column by column and
//! let the row set follow the data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational scalar. Always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("duplicate column label at position {0}")]
    DuplicateColumn(usize),
    #[error("column {col} out of range for {ncols} columns")]
    ColumnOutOfRange { col: usize, ncols: usize },
}

type SparseRow = BTreeMap<usize, Rational>;

/// A sparse matrix whose rows are keyed by `R` and whose columns carry
/// opaque tags `C`.
///
/// Every stored entry is nonzero and the label lists are duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMatrix<R, C> {
    row_labels: Vec<R>,
    row_index: BTreeMap<R, usize>,
    col_labels: Vec<C>,
    rows: Vec<SparseRow>,
}

impl<R: Ord + Clone, C: PartialEq + Clone> LabeledMatrix<R, C> {
    pub fn new(col_labels: Vec<C>) -> Result<Self, LinalgError> {
        for (i, c) in col_labels.iter().enumerate() {
            if col_labels[..i].contains(c) {
                return Err(LinalgError::DuplicateColumn(i));
            }
        }
        Ok(Self {
            row_labels: Vec::new(),
            row_index: BTreeMap::new(),
            col_labels,
            rows: Vec::new(),
        })
    }

    pub fn row_labels(&self) -> &[R] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[C] {
        &self.col_labels
    }

    pub fn ncols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn nrows(&self) -> usize {
        self.row_labels.len()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    /// Adds `value` to the entry at (`row`, `col`), creating the row if needed.
    pub fn add_entry(&mut self, row: R, col: usize, value: &Rational) -> Result<(), LinalgError> {
        if col >= self.ncols() {
            return Err(LinalgError::ColumnOutOfRange {
                col,
                ncols: self.ncols(),
            });
        }
        if value.is_zero() {
            return Ok(());
        }
        let r = match self.row_index.get(&row) {
            Some(&r) => r,
            None => {
                let r = self.row_labels.len();
                self.row_index.insert(row.clone(), r);
                self.row_labels.push(row);
                self.rows.push(SparseRow::new());
                r
            }
        };
        let slot = self.rows[r].entry(col).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.rows[r].remove(&col);
        }
        Ok(())
    }

    pub fn get(&self, row: &R, col: usize) -> Rational {
        self.row_index
            .get(row)
            .and_then(|&r| self.rows[r].get(&col).cloned())
            .unwrap_or_else(Rational::zero)
    }

    /// Entries of one column as (row label, value) pairs in row order.
    pub fn column(&self, col: usize) -> Vec<(R, Rational)> {
        self.row_labels
            .iter()
            .zip(&self.rows)
            .filter_map(|(label, row)| row.get(&col).map(|v| (label.clone(), v.clone())))
            .collect()
    }

    /// Computes `m · v`, keyed by row label. Zero rows are omitted.
    pub fn mul_vec(&self, v: &[Rational]) -> BTreeMap<R, Rational> {
        assert_eq!(
            v.len(),
            self.ncols(),
            "vector length must match column count"
        );
        let mut out = BTreeMap::new();
        for (label, row) in self.row_labels.iter().zip(&self.rows) {
            let mut acc = Rational::zero();
            for (&c, x) in row {
                if !v[c].is_zero() {
                    acc += x * &v[c];
                }
            }
            if !acc.is_zero() {
                out.insert(label.clone(), acc);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self.rows.clone(), self.ncols()).len()
    }

    /// Canonical basis of the right kernel `{v : m·v = 0}`.
    ///
    /// The returned vectors, stacked as rows, are in reduced row echelon
    /// form over the column order: each has a leading 1 and every other
    /// vector is zero in that position. The basis is therefore unique for
    /// a given kernel, so two systems with the same solution space produce
    /// identical output.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let ncols = self.ncols();
        let reduced = rref(self.rows.clone(), ncols);
        let mut pivot_of = vec![None; ncols];
        for (r, (pivot, _)) in reduced.iter().enumerate() {
            pivot_of[*pivot] = Some(r);
        }
        let free: Vec<SparseRow> = (0..ncols)
            .filter(|&c| pivot_of[c].is_none())
            .map(|f| {
                let mut v = SparseRow::new();
                v.insert(f, Rational::one());
                for (pivot, row) in &reduced {
                    if let Some(x) = row.get(&f) {
                        v.insert(*pivot, -x);
                    }
                }
                v
            })
            .collect();
        rref(free, ncols)
            .into_iter()
            .map(|(_, row)| {
                let mut dense = vec![Rational::zero(); ncols];
                for (c, x) in row {
                    dense[c] = x;
                }
                dense
            })
            .collect()
    }

    /// A solution of `m·x = rhs` with every free coordinate zero, or `None`
    /// when the system is inconsistent. Right-hand side entries on labels
    /// that are not rows of `m` make the system inconsistent.
    pub fn solve(&self, rhs: &BTreeMap<R, Rational>) -> Option<Vec<Rational>> {
        let ncols = self.ncols();
        let mut rows = self.rows.clone();
        for (label, value) in rhs {
            if value.is_zero() {
                continue;
            }
            match self.row_index.get(label) {
                Some(&r) => {
                    rows[r].insert(ncols, value.clone());
                }
                None => return None,
            }
        }
        let mut x = vec![Rational::zero(); ncols];
        for (pivot, row) in rref(rows, ncols + 1) {
            if pivot == ncols {
                return None;
            }
            if let Some(v) = row.get(&ncols) {
                x[pivot] = v.clone();
            }
        }
        Some(x)
    }
}

impl LabeledMatrix<usize, usize> {
    /// Builds a position-labelled matrix from dense rows.
    pub fn from_dense(rows: &[Vec<Rational>], ncols: usize) -> Self {
        let mut m = Self::new((0..ncols).collect()).expect("positional labels are distinct");
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (c, x) in row.iter().enumerate() {
                m.add_entry(r, c, x).expect("column in range");
            }
        }
        m
    }
}

/// Gauss-Jordan elimination. Returns the nonzero rows of the reduced row
/// echelon form as (pivot column, row) pairs sorted by pivot column.
fn rref(mut rows: Vec<SparseRow>, ncols: usize) -> Vec<(usize, SparseRow)> {
    rows.retain(|r| !r.is_empty());
    let mut done: Vec<(usize, SparseRow)> = Vec::new();
    for col in 0..ncols {
        // Sparsest candidate keeps fill-in down; ties go to the earliest row.
        let Some(pick) = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains_key(&col))
            .min_by_key(|(i, r)| (r.len(), *i))
            .map(|(i, _)| i)
        else {
            continue;
        };
        let mut pivot_row = rows.swap_remove(pick);
        let inv = pivot_row[&col].recip();
        for x in pivot_row.values_mut() {
            *x *= &inv;
        }
        for row in rows.iter_mut().chain(done.iter_mut().map(|(_, r)| r)) {
            if let Some(factor) = row.get(&col).cloned() {
                axpy(row, &-factor, &pivot_row);
            }
        }
        rows.retain(|r| !r.is_empty());
        done.push((col, pivot_row));
    }
    done
}

/// `row += k * other`, dropping entries that cancel.
fn axpy(row: &mut SparseRow, k: &Rational, other: &SparseRow) {
    for (c, x) in other {
        let slot = row.entry(*c).or_insert_with(Rational::zero);
        *slot += k * x;
        if slot.is_zero() {
            row.remove(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> LabeledMatrix<usize, usize> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        LabeledMatrix::from_dense(&rows, ncols)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = dense(&[&[1, 0], &[0, 1]]);
        assert!(m.kernel_basis().is_empty());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_one_two_by_two() {
        let m = dense(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        // (-2, 1) normalised to a leading 1.
        assert_eq!(k, vec![vec![rat(1), ratio(-1, 2)]]);
        assert!(m.mul_vec(&k[0]).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let m = LabeledMatrix::<usize, usize>::from_dense(&[vec![rat(0); 3], vec![rat(0); 3]], 3);
        assert_eq!(m.rank(), 0);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, rat(i64::from(i == j)));
            }
        }
    }

    #[test]
    fn empty_matrix() {
        let m = LabeledMatrix::<usize, usize>::new(vec![]).unwrap();
        assert_eq!(m.rank(), 0);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn duplicate_columns_rejected() {
        let err = LabeledMatrix::<usize, &str>::new(vec!["a", "b", "a"]).unwrap_err();
        assert_eq!(err, LinalgError::DuplicateColumn(2));
    }

    #[test]
    fn entries_cancel_to_nothing() {
        let mut m = LabeledMatrix::<&str, usize>::new(vec![0, 1]).unwrap();
        m.add_entry("r", 0, &rat(3)).unwrap();
        m.add_entry("r", 0, &rat(-3)).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.nrows(), 1);
        assert!(m.add_entry("r", 2, &rat(1)).is_err());
    }

    #[test]
    fn kernel_is_reduced_echelon() {
        // x0 + x1 + x2 + x3 = 0, x1 - x3 = 0
        let m = dense(&[&[1, 1, 1, 1], &[0, 1, 0, -1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        let leads: Vec<usize> = k
            .iter()
            .map(|v| v.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        assert!(leads.windows(2).all(|w| w[0] < w[1]));
        for (i, v) in k.iter().enumerate() {
            assert!(v[leads[i]].is_one());
            for (j, w) in k.iter().enumerate() {
                if i != j {
                    assert!(w[leads[i]].is_zero());
                }
            }
            assert!(m.mul_vec(v).is_empty());
        }
    }
}
