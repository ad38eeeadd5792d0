//! Banded LU solver for the Picard linear systems.
//!
//! The discretized operator is an M-matrix (positive diagonal, nonpositive
//! off-diagonals, weakly diagonally dominant with strict dominance next to
//! Dirichlet rows), so LU without pivoting is stable and fill stays inside
//! the band.

use crate::real::Real;

/// Square banded matrix with equal lower/upper bandwidth.
pub struct Banded<T> {
    n: usize,
    bw: usize,
    /// Row-major band storage: entry `(i, j)` at `data[i*(2bw+1) + j - i + bw]`.
    data: Vec<T>,
}

impl<T: Real> Banded<T> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Banded {
            n,
            bw,
            data: vec![T::zero(); n * (2 * bw + 1)],
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j + self.bw >= i && j <= i + self.bw);
        let k = i * (2 * self.bw + 1) + (j + self.bw - i);
        self.data[k] = self.data[k] + v;
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[i * (2 * self.bw + 1) + (j + self.bw - i)]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * (2 * self.bw + 1) + (j + self.bw - i)] = v;
    }

    /// In-place LU factorization without pivoting.
    ///
    /// Returns `false` when a pivot degenerates (matrix not an M-matrix).
    pub fn factor(&mut self) -> bool {
        let n = self.n;
        let bw = self.bw;
        for k in 0..n {
            let piv = self.at(k, k);
            if piv == T::zero() || !piv.is_finite() {
                return false;
            }
            let imax = (k + bw).min(n - 1);
            for i in (k + 1)..=imax {
                let l = self.at(i, k) / piv;
                self.set(i, k, l);
                if l != T::zero() {
                    let jmax = (k + bw).min(n - 1);
                    for j in (k + 1)..=jmax {
                        let v = self.at(i, j) - l * self.at(k, j);
                        self.set(i, j, v);
                    }
                }
            }
        }
        true
    }

    /// Solves `L U x = b` after [`factor`](Self::factor); overwrites `b`.
    pub fn solve(&self, b: &mut [T]) {
        let n = self.n;
        let bw = self.bw;
        for i in 1..n {
            let jmin = i.saturating_sub(bw);
            let mut acc = b[i];
            for j in jmin..i {
                acc = acc - self.at(i, j) * b[j];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let jmax = (i + bw).min(n - 1);
            let mut acc = b[i];
            for j in (i + 1)..=jmax {
                acc = acc - self.at(i, j) * b[j];
            }
            b[i] = acc / self.at(i, i);
        }
    }
}
