//! Real sparse matrix in triplet form with a direct LU solve.

use nalgebra::{DMatrix, DVector};
use rsparse::data::Sprs;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("matrix is {rows}×{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("no usable pivot in column {0}")]
    NoPivot(usize),
    #[error("pivot ratio {ratio:e} below 1e-12")]
    NumericallySingular { ratio: f64 },
}

#[derive(Clone, Debug, Default)]
pub struct TripletMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(rows: usize, cols: usize) -> TripletMatrix {
        TripletMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] += v;
        }
        m
    }

    /// Rows and columns with no stored entry.
    pub fn empty_lines(&self) -> (Vec<usize>, Vec<usize>) {
        let mut row_hit = vec![false; self.rows];
        let mut col_hit = vec![false; self.cols];
        for &(r, c, _) in &self.entries {
            row_hit[r] = true;
            col_hit[c] = true;
        }
        let pick = |hits: Vec<bool>| {
            hits.iter()
                .enumerate()
                .filter(|(_, h)| !**h)
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        (pick(row_hit), pick(col_hit))
    }

    fn to_csc(&self) -> Sprs<f64> {
        let mut sorted: Vec<(usize, usize, f64)> =
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        sorted.sort_by_key(|&(c, r, _)| (c, r));
        let mut p = vec![0isize; self.cols + 1];
        let mut i = Vec::with_capacity(sorted.len());
        let mut x: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (c, r, v) in sorted {
            if last == Some((c, r)) {
                *x.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((c, r));
            i.push(r);
            x.push(v);
            p[c + 1] += 1;
        }
        for c in 0..self.cols {
            p[c + 1] += p[c];
        }
        Sprs {
            nzmax: x.len(),
            m: self.rows,
            n: self.cols,
            p,
            i,
            x,
        }
    }

    fn solve_dense(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        let n = self.rows;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        let lu = m.lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|k| u[(k, k)].abs()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let ratio = diag.iter().cloned().fold(f64::INFINITY, f64::min) / max;
        if !(ratio >= 1e-12) {
            return Err(SolveError::NumericallySingular { ratio });
        }
        let x = lu
            .solve(&DVector::from_column_slice(b))
            .ok_or(SolveError::NoPivot(0))?;
        Ok(x.iter().copied().collect())
    }

    /// Solve `A x = b` by sparse LU with a fill-reducing column order and
    /// partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        if self.rows != self.cols {
            return Err(SolveError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        if n < 4 {
            return self.solve_dense(b);
        }
        let a = self.to_csc();
        let mut symbolic = rsparse::sqr(&a, 1, false);
        let lu = rsparse::lu(&a, &mut symbolic, 1.0).map_err(|_| SolveError::NoPivot(0))?;

        // The diagonal of U is the last stored entry of each column.
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let end = lu.u.p[k + 1] as usize;
            let pivot = lu.u.x[end - 1].abs();
            max_pivot = max_pivot.max(pivot);
            min_pivot = min_pivot.min(pivot);
        }
        let ratio = min_pivot / max_pivot;
        if !(ratio >= 1e-12) {
            return Err(SolveError::NumericallySingular { ratio });
        }

        let pinv = lu.pinv.as_ref().expect("LU records its row permutation");
        let mut x = vec![0.0; n];
        for k in 0..n {
            x[pinv[k] as usize] = b[k];
        }
        rsparse::lsolve(&lu.l, &mut x);
        rsparse::usolve(&lu.u, &mut x);
        let mut out = vec![0.0; n];
        match &symbolic.q {
            Some(q) => {
                for k in 0..n {
                    out[q[k] as usize] = x[k];
                }
            }
            None => out.copy_from_slice(&x),
        }
        Ok(out)
    }
}
