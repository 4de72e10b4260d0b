//! Seeded random generators for quaternions, matrices and structured
//! ensembles. Everything is deterministic given the caller's RNG state.

use rand::Rng;

use crate::qmat::{QMatrix, QVector};
use crate::quat::{Quaternion, SpherePoint, E1};

/// Standard normal via Box-Muller; no external distribution dependency so the
/// stream stays stable against library version bumps.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Quaternion with four independent standard Gaussian components.
pub fn gaussian_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        standard_normal(rng),
        standard_normal(rng),
        standard_normal(rng),
        standard_normal(rng),
    )
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QVector {
    QVector::from_vec((0..n).map(|_| gaussian_quaternion(rng)).collect())
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    QMatrix::from_fn(n, |_, _| gaussian_quaternion(rng))
}

/// Random quaternionic unitary: modified Gram-Schmidt applied to the columns
/// of a Gaussian matrix (re-orthogonalized once for safety).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMatrix {
    let g = gaussian_matrix(rng, n);
    let mut cols: Vec<QVector> = (0..n).map(|j| g.column(j)).collect();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let c = cols[i].inner(&cols[j]);
                let proj = cols[i].scaled(c);
                cols[j] = cols[j].sub(&proj);
            }
        }
        let norm = cols[j].norm();
        cols[j] = cols[j].scaled(Quaternion::from_real(1.0 / norm));
    }
    let mut u = QMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}

/// Normal matrix `U diag(u_i + e1 v_i) U*` with the prescribed spectral
/// spheres and a Haar-ish random unitary.
pub fn random_normal_from_spheres<R: Rng + ?Sized>(
    rng: &mut R,
    spheres: &[SpherePoint],
) -> QMatrix {
    let n = spheres.len();
    let d: Vec<Quaternion> = spheres
        .iter()
        .map(|s| Quaternion::from_real(s.u) + E1 * s.v)
        .collect();
    let u = random_unitary(rng, n);
    u.mul(&QMatrix::diagonal(&d)).mul(&u.adjoint())
}

/// Gaussian matrix rescaled so that its Schatten `p`-norm equals `target`.
pub fn gaussian_with_schatten_norm<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: f64,
    target: f64,
) -> QMatrix {
    let g = gaussian_matrix(rng, n);
    let current = crate::schatten::schatten_norm(&g, p).expect("p >= 1");
    if current == 0.0 {
        return g;
    }
    g.scale(target / current)
}

/// Block upper-triangular matrix with an invariant leading `m`-dimensional
/// subspace: Gaussian entries with the lower-left block zeroed.
pub fn gaussian_block_triangular<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> QMatrix {
    let mut t = gaussian_matrix(rng, n);
    for i in m..n {
        for j in 0..m {
            t[(i, j)] = crate::quat::ZERO;
        }
    }
    t
}
