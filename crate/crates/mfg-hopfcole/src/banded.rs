//! Banded LU with partial pivoting and a bordered-system solver.
//!
//! The coupled Newton system is banded except for one dense column (the
//! ergodic constant) and two dense rows (mass normalization and gauge).
//! Those are handled by block elimination on the Schur complement of the
//! banded core, so each Newton step costs a banded factorization plus a
//! handful of banded triangular solves.

use crate::error::{Error, Result};

/// General banded matrix with `kl` subdiagonals and `ku` superdiagonals,
/// stored band-style with `kl` extra superdiagonals of fill for pivoting.
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    /// Upper bandwidth including pivoting fill (`kl + ku`).
    ku_store: usize,
    /// Column-major band storage: entry `(i, j)` lives at
    /// `data[j * width + (i - j + ku_store)]`.
    data: Vec<f64>,
    width: usize,
}

impl BandedMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ku_store = kl + ku;
        let width = kl + ku_store + 1;
        Self {
            n,
            kl,
            ku_store,
            data: vec![0.0; width * n],
            width,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku_store >= j && j + self.kl >= i, "({i},{j}) outside band");
        j * self.width + (i + self.ku_store - j)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// In-place LU factorization with partial pivoting. Returns the
    /// factorization handle or a singularity report.
    pub fn factorize(mut self) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let kus = self.ku_store;
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            // Pivot search restricted to the kl rows below the diagonal.
            let imax = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=imax {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::JacobianSingular(format!(
                    "zero pivot in banded LU at column {k}"
                )));
            }
            pivots[k] = p;
            if p != k {
                let jmax = (k + kus).min(n - 1);
                for j in k..=jmax {
                    let a = self.get(k, j);
                    let b = self.get(p, j);
                    self.set(k, j, b);
                    self.set(p, j, a);
                }
            }
            let pivot = self.get(k, k);
            for i in k + 1..=imax {
                let l = self.get(i, k) / pivot;
                self.set(i, k, l);
                if l != 0.0 {
                    let jmax = (k + kus).min(n - 1);
                    for j in k + 1..=jmax {
                        let v = self.get(i, j) - l * self.get(k, j);
                        self.set(i, j, v);
                    }
                }
            }
        }
        Ok(BandedLu {
            mat: self,
            pivots,
        })
    }
}

/// Factorized banded matrix.
pub struct BandedLu {
    mat: BandedMatrix,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.mat.n;
        let kl = self.mat.kl;
        let kus = self.mat.ku_store;
        assert_eq!(b.len(), n);
        // Forward: apply P and L.
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let imax = (k + kl).min(n - 1);
            for i in k + 1..=imax {
                b[i] -= self.mat.get(i, k) * b[k];
            }
        }
        // Backward: U x = y.
        for k in (0..n).rev() {
            let jmax = (k + kus).min(n - 1);
            let mut s = b[k];
            for j in k + 1..=jmax {
                s -= self.mat.get(k, j) * b[j];
            }
            b[k] = s / self.mat.get(k, k);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solve the bordered system
///
/// ```text
/// [ B  C ] [x]   [b1]
/// [ D  E ] [z] = [b2]
/// ```
///
/// with `B` banded `(N x N)`, `C` dense `N x k`, `D` dense `k x N`, `E`
/// `k x k`, via block elimination on the Schur complement `S = E - D B^-1 C`.
pub fn solve_bordered(
    core: BandedMatrix,
    c_cols: &[Vec<f64>],
    d_rows: &[Vec<f64>],
    e: &[Vec<f64>],
    b1: &[f64],
    b2: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = core.n();
    let k = c_cols.len();
    assert_eq!(d_rows.len(), k);
    assert_eq!(b2.len(), k);
    let lu = core.factorize()?;

    let y = lu.solve(b1);
    let x_cols: Vec<Vec<f64>> = c_cols.iter().map(|c| lu.solve(c)).collect();

    // S = E - D * X, rhs = b2 - D * y.
    let mut s = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            let dx: f64 = (0..n).map(|t| d_rows[i][t] * x_cols[j][t]).sum();
            s[i][j] = e[i][j] - dx;
        }
        let dy: f64 = (0..n).map(|t| d_rows[i][t] * y[t]).sum();
        rhs[i] = b2[i] - dy;
    }
    let z = solve_dense_small(&mut s, &mut rhs)?;

    let mut x = y;
    for j in 0..k {
        for t in 0..n {
            x[t] -= x_cols[j][t] * z[j];
        }
    }
    Ok((x, z))
}

/// Gaussian elimination with partial pivoting for the small Schur block.
fn solve_dense_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let mut p = col;
        let mut best = a[col][col].abs();
        for i in col + 1..k {
            if a[i][col].abs() > best {
                best = a[i][col].abs();
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::JacobianSingular(
                "Schur complement singular in bordered solve".into(),
            ));
        }
        a.swap(col, p);
        b.swap(col, p);
        for i in col + 1..k {
            let l = a[i][col] / a[col][col];
            a[i][col] = 0.0;
            for j in col + 1..k {
                a[i][j] -= l * a[col][j];
            }
            b[i] -= l * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}
