//! Small dense linear algebra over GF(3).
//!
//! Everything here operates on digit vectors (`Vec<u8>` with entries in
//! {0,1,2}). Dimensions never exceed a few dozen, so plain row reduction is
//! the right tool. Pivots are always chosen scanning columns left to right,
//! which pins down a canonical reduced form; solvers set free variables to
//! zero, which pins down a canonical solution.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mat3 {
    pub rows: usize,
    pub cols: usize,
    a: Vec<u8>,
}

#[inline]
fn add3(a: u8, b: u8) -> u8 {
    (a + b) % 3
}

#[inline]
fn mul3(a: u8, b: u8) -> u8 {
    (a * b) % 3
}

#[inline]
fn neg3(a: u8) -> u8 {
    (3 - a) % 3
}

// In GF(3) every nonzero element is its own inverse.
#[inline]
fn inv3(a: u8) -> u8 {
    debug_assert!(a == 1 || a == 2);
    a
}

impl Mat3 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat3 {
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Mat3::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<u8>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Mat3::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u8 {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.a[i * self.cols + j] = v % 3;
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.a.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: u8) {
        for j in 0..self.cols {
            let v = mul3(self.at(i, j), c);
            self.set(i, j, v);
        }
    }

    /// row_k += c * row_i
    fn add_multiple(&mut self, k: usize, i: usize, c: u8) {
        for j in 0..self.cols {
            let v = add3(self.at(k, j), mul3(c, self.at(i, j)));
            self.set(k, j, v);
        }
    }

    /// In-place reduced row echelon form. Returns the pivot columns in
    /// increasing order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| self.at(i, col) != 0) else {
                continue;
            };
            self.swap_rows(row, p);
            let piv = self.at(row, col);
            self.scale_row(row, inv3(piv));
            for i in 0..self.rows {
                if i != row && self.at(i, col) != 0 {
                    let c = neg3(self.at(i, col));
                    self.add_multiple(i, row, c);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Solves `self * x = b`; returns the canonical solution with all free
    /// variables zero, or `None` when inconsistent.
    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat3::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let pivots = aug.rref();
        // Inconsistent iff a pivot lands in the augmented column.
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u8; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols);
        }
        Some(x)
    }

    /// A basis for the null space, one vector per free column, in increasing
    /// free-column order.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let mut red = self.clone();
        let pivots = red.rref();
        let piv_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if piv_set[free] {
                continue;
            }
            let mut v = vec![0u8; self.cols];
            v[free] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = neg3(red.at(r, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}
