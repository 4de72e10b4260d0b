//! Dense complex matrices and the eigenvalue kernel used for the complex
//! adjoint representation of quaternionic matrices.
//!
//! The sizes in play are tiny (`2n × 2n` with `n ≤ 16` or so), so the
//! decompositions are written directly: Householder reduction to Hessenberg
//! form followed by an explicitly shifted QR iteration with Wilkinson shifts.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    /// Conjugate transpose.
    pub fn hermitian_transpose(&self) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Reduces `h` to upper Hessenberg form by unitary similarity (in place).
fn hessenberg(h: &mut CMatrix) {
    let n = h.n;
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Householder vector for column k below the subdiagonal.
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += h[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0 == Complex64::ZERO {
            Complex64::ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2vv^H) H
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in k + 1..n {
                dot += v[i - k - 1].conj() * h[(i, j)];
            }
            let dot = dot * 2.0;
            for i in k + 1..n {
                let vi = v[i - k - 1];
                h[(i, j)] -= vi * dot;
            }
        }
        // H <- H (I - 2vv^H)
        for i in 0..n {
            let mut dot = Complex64::ZERO;
            for j in k + 1..n {
                dot += h[(i, j)] * v[j - k - 1];
            }
            let dot = dot * 2.0;
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j - k - 1].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::ZERO;
        }
        h[(k + 1, k)] = alpha;
    }
}

/// Eigenvalues of the trailing 2×2 block `[[a, b], [c, d]]`; returns the one
/// closer to `d` (the Wilkinson shift).
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens rotation `G = [[c, s], [-s̄, c]]` (real `c ≥ 0`) with
/// `G [f; g] = [r; 0]`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let t = (fa * fa + ga * ga).sqrt();
    let c = fa / t;
    let s = (f / fa) * g.conj() / t;
    (c, s)
}

/// All eigenvalues of a general complex matrix via shifted QR on the
/// Hessenberg form. Eigenvalues only; no Schur vectors are accumulated.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.n;
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let mut h = a.clone();
    hessenberg(&mut h);

    let scale = h.frobenius_norm().max(1e-300);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iters = 0usize;
    let max_total = 80 * n + 200;

    loop {
        // Zero out negligible subdiagonals.
        for k in 1..=hi {
            let small = eps * (h[(k - 1, k - 1)].norm() + h[(k, k)].norm()) + 1e-300 * scale;
            if h[(k, k - 1)].norm() <= small {
                h[(k, k - 1)] = Complex64::ZERO;
            }
        }
        // Deflate converged 1×1 blocks at the bottom.
        while hi > 0 && h[(hi, hi - 1)] == Complex64::ZERO {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iter_since_deflation = 0;
        }
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Active block [lo..=hi].
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != Complex64::ZERO {
            lo -= 1;
        }

        // 2×2 blocks are solved in closed form; this also breaks the shift
        // stall on blocks with equal diagonal entries, which the doubled
        // eigenvalues of complex-adjoint matrices produce routinely.
        if hi - lo == 1 {
            let (a, b) = (h[(lo, lo)], h[(lo, hi)]);
            let (c, d) = (h[(hi, lo)], h[(hi, hi)]);
            let tr = a + d;
            let disc = (tr * tr - (a * d - b * c) * 4.0).sqrt();
            h[(lo, lo)] = (tr + disc) * 0.5;
            h[(hi, hi)] = (tr - disc) * 0.5;
            h[(hi, lo)] = Complex64::ZERO;
            iter_since_deflation = 0;
            continue;
        }

        total_iters += 1;
        iter_since_deflation += 1;
        if total_iters > max_total {
            return Err(Error::NumericalFailure(
                "QR eigenvalue iteration did not converge",
            ));
        }
        let sigma = if iter_since_deflation.is_multiple_of(12) {
            // Exceptional shift to break symmetric stalls.
            Complex64::new(
                h[(hi, hi - 1)].norm() + h[(hi, hi)].norm(),
                0.27 * scale / n as f64,
            )
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // Explicit shifted QR sweep on the active block.
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..=hi {
            h[(k, k)] -= sigma;
        }
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rots.push((c, s));
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + y * s;
                h[(k + 1, j)] = -x * s.conj() + y * c;
            }
        }
        for (k, (c, s)) in rots.iter().enumerate() {
            let k = lo + k;
            let top = hi.min(k + 1);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * *c + y * s.conj();
                h[(i, k + 1)] = -x * *s + y * *c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += sigma;
        }
    }
    Ok(eigs)
}
