//! Quaternionic dense kernels: Jacobi eigensolver for Hermitian matrices,
//! Gauss-Jordan inversion with partial pivoting, and singular-value helpers.
//!
//! A quaternionic Hermitian matrix (`H* = H`, real diagonal) is diagonalized
//! by a unitary with quaternion entries and has real eigenvalues; the Jacobi
//! sweep below reduces each off-diagonal pivot to the real 2×2 case by a
//! diagonal phase similarity.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat;

/// Eigendecomposition `H = V diag(λ) V*` of a Hermitian quaternionic matrix.
/// Eigenvalues are returned in ascending order.
pub(crate) fn eigh(h: &QMatrix) -> Result<(Vec<f64>, QMatrix)> {
    let n = h.n();
    let mut m = h.clone();
    let mut v = QMatrix::identity(n);
    if n <= 1 {
        let eigs = (0..n).map(|i| m[(i, i)].re()).collect();
        return Ok((eigs, v));
    }

    let full_norm = m.frobenius_norm();
    let stop = 1e-15 * full_norm + 1e-300;
    let max_sweeps = 120;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let hpq = m[(p, q)];
                let mag = hpq.norm();
                if mag <= stop / (n as f64) {
                    continue;
                }
                let u = hpq / mag;
                let ubar = u.conj();

                // Phase similarity: column q ← column q · ū, row q ← u · row q.
                for i in 0..n {
                    m[(i, q)] = m[(i, q)] * ubar;
                    v[(i, q)] = v[(i, q)] * ubar;
                }
                for j in 0..n {
                    m[(q, j)] = u * m[(q, j)];
                }

                // Real Jacobi rotation zeroing the (now real) pivot.
                let app = m[(p, p)].re();
                let aqq = m[(q, q)].re();
                let apq = m[(p, q)].re();
                if apq == 0.0 {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip.scale(c) - miq.scale(s);
                    m[(i, q)] = mip.scale(s) + miq.scale(c);
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip.scale(c) - viq.scale(s);
                    v[(i, q)] = vip.scale(s) + viq.scale(c);
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = mpj.scale(c) - mqj.scale(s);
                    m[(q, j)] = mpj.scale(s) + mqj.scale(c);
                }
                m[(p, q)] = quat::ZERO;
                m[(q, p)] = quat::ZERO;
            }
        }
    }
    if !converged {
        // One final check; cyclic Jacobi converges in practice long before.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() > 1e-10 * full_norm.max(1.0) {
            return Err(Error::NumericalFailure("Jacobi sweep did not converge"));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re()).collect();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).unwrap());
    let eigs: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vs = QMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vs[(r, new)] = v[(r, old)];
        }
    }
    Ok((eigs, vs))
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting on the
/// entry modulus. Row operations act by left multiplication, which preserves
/// solutions of the right-linear system `A x = b`.
pub(crate) fn inverse(a: &QMatrix) -> Result<QMatrix> {
    let n = a.n();
    let mut w = a.clone();
    let mut inv = QMatrix::identity(n);
    let scale = a.max_abs();
    let pivot_tol = 1e-14 * scale.max(1e-300) / (n as f64);

    for k in 0..n {
        let (mut best, mut best_mag) = (k, w[(k, k)].norm());
        for i in k + 1..n {
            let mag = w[(i, k)].norm();
            if mag > best_mag {
                best = i;
                best_mag = mag;
            }
        }
        if best_mag <= pivot_tol {
            return Err(Error::Singular);
        }
        if best != k {
            for j in 0..n {
                let (x, y) = (w[(k, j)], w[(best, j)]);
                w[(k, j)] = y;
                w[(best, j)] = x;
                let (x, y) = (inv[(k, j)], inv[(best, j)]);
                inv[(k, j)] = y;
                inv[(best, j)] = x;
            }
        }
        let pinv = w[(k, k)].inverse().ok_or(Error::Singular)?;
        for j in 0..n {
            w[(k, j)] = pinv * w[(k, j)];
            inv[(k, j)] = pinv * inv[(k, j)];
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = w[(i, k)];
            if f == quat::ZERO {
                continue;
            }
            for j in 0..n {
                let wk = w[(k, j)];
                let ik = inv[(k, j)];
                w[(i, j)] -= f * wk;
                inv[(i, j)] -= f * ik;
            }
        }
    }
    Ok(inv)
}

/// Singular values of `a` in ascending order (square roots of the spectrum
/// of `A*A`).
pub(crate) fn singular_values_ascending(a: &QMatrix) -> Result<Vec<f64>> {
    let gram = a.adjoint().mul(a);
    let (eigs, _) = eigh(&gram)?;
    Ok(eigs.into_iter().map(|x| x.max(0.0).sqrt()).collect())
}

pub(crate) fn smallest_singular_value(a: &QMatrix) -> Result<f64> {
    Ok(singular_values_ascending(a)?
        .first()
        .copied()
        .unwrap_or(0.0))
}
