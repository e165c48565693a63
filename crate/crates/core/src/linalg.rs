//! Small dense linear-algebra kernels: cyclic Jacobi eigenvalues for real
//! symmetric matrices and complex LU with partial pivoting.

use num_complex::Complex64;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, in ascending order.
///
/// Sweeps visit the strict upper triangle row by row, so the result is
/// bit-reproducible for a given input. Only the upper triangle is read.
pub fn symmetric_eigenvalues(m: &SquareMatrix<f64>) -> Vec<f64> {
    let n = m.dim();
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..i {
            a.set(i, j, a.get(j, i));
        }
    }
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a.get(i, i) * a.get(i, i);
            for j in (i + 1)..n {
                off += a.get(i, j) * a.get(i, j);
            }
        }
        if off <= (f64::EPSILON * f64::EPSILON) * 1e-4 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Skip rotations that would not change the diagonal in floating point.
                let g = 100.0 * apq.abs();
                if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a.set(p, q, 0.0);
                    a.set(q, p, 0.0);
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    a.set(r, p, new_rp);
                    a.set(p, r, new_rp);
                    a.set(r, q, new_rq);
                    a.set(q, r, new_rq);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Outcome of a complex LU factorisation used only for its determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuLogDet {
    /// `log |det|`
    pub log_abs: f64,
    /// Phase of the determinant, `det / |det|`.
    pub phase: Complex64,
    /// Smallest pivot modulus met during elimination.
    pub min_pivot: f64,
}

/// `log det` of a complex matrix by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot is exactly zero.
pub fn complex_lu_logdet(m: &SquareMatrix<Complex64>) -> Option<LuLogDet> {
    let n = m.dim();
    let mut a = m.clone();
    let mut log_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let mut piv = k;
        let mut best = a.get(k, k).norm();
        for r in (k + 1)..n {
            let v = a.get(r, k).norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return None;
        }
        if piv != k {
            for c in 0..n {
                let tmp = a.get(k, c);
                a.set(k, c, a.get(piv, c));
                a.set(piv, c, tmp);
            }
            phase = -phase;
        }
        let pivot = a.get(k, k);
        min_pivot = min_pivot.min(best);
        log_abs += best.ln();
        phase *= pivot / best;
        let inv = 1.0 / pivot;
        for r in (k + 1)..n {
            let factor = a.get(r, k) * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (head, tail) = a.data.split_at_mut(r * n);
            let row_k = &head[k * n..k * n + n];
            let row_r = &mut tail[..n];
            for c in (k + 1)..n {
                row_r[c] -= factor * row_k[c];
            }
            row_r[k] = Complex64::new(0.0, 0.0);
        }
    }
    Some(LuLogDet {
        log_abs,
        phase,
        min_pivot,
    })
}
