//! Quaternionic matrices acting as bounded right-linear operators on `ℍⁿ`:
//! inner product, adjoint, complex adjoint embedding, norms and the
//! structural decompositions (normal and polar).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calg::CMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quat::{self, ImaginaryUnit, Quaternion};

/// Relative tolerance for the operator classification predicates.
pub const CLASSIFY_TOL: f64 = 1e-10;

/// A column vector in `ℍⁿ` with right scalar action `(xs)_i = x_i s`.
#[derive(Clone, Debug, PartialEq)]
pub struct QVector {
    data: Vec<Quaternion>,
}

impl QVector {
    pub fn zeros(n: usize) -> Self {
        QVector {
            data: vec![quat::ZERO; n],
        }
    }

    pub fn from_vec(data: Vec<Quaternion>) -> Self {
        QVector { data }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = QVector::zeros(n);
        v.data[i] = quat::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> Quaternion {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, q: Quaternion) {
        self.data[i] = q;
    }

    /// Right scalar action `x ↦ x s`.
    pub fn scaled(&self, s: Quaternion) -> QVector {
        QVector {
            data: self.data.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn add(&self, r: &QVector) -> QVector {
        QVector {
            data: self
                .data
                .iter()
                .zip(&r.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, r: &QVector) -> QVector {
        QVector {
            data: self
                .data
                .iter()
                .zip(&r.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    /// Quaternion-valued inner product `⟨x, y⟩ = Σ conj(x_i) y_i`.
    pub fn inner(&self, r: &QVector) -> Quaternion {
        self.data
            .iter()
            .zip(&r.data)
            .fold(quat::ZERO, |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// JSON shape `{"n": .., "entries": [[[x0,x1,x2,x3], ..], ..]}` (row-major).
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl TryFrom<MatrixRepr> for QMatrix {
    type Error = String;

    fn try_from(r: MatrixRepr) -> std::result::Result<Self, String> {
        if r.entries.len() != r.n {
            return Err(format!("expected {} rows, found {}", r.n, r.entries.len()));
        }
        let mut data = Vec::with_capacity(r.n * r.n);
        for row in &r.entries {
            if row.len() != r.n {
                return Err(format!("expected {} columns, found {}", r.n, row.len()));
            }
            data.extend_from_slice(row);
        }
        Ok(QMatrix { n: r.n, data })
    }
}

impl From<QMatrix> for MatrixRepr {
    fn from(m: QMatrix) -> MatrixRepr {
        let entries = (0..m.n)
            .map(|i| m.data[i * m.n..(i + 1) * m.n].to_vec())
            .collect();
        MatrixRepr { n: m.n, entries }
    }
}

/// An `n × n` quaternionic matrix acting on column vectors by
/// `(Tx)_i = Σ_j T_ij x_j`, which is right-linear: `T(xs) = (Tx)s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct QMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        QMatrix {
            n,
            data: vec![quat::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = quat::ONE;
        }
        m
    }

    pub fn diagonal(entries: &[Quaternion]) -> Self {
        let mut m = QMatrix::zeros(entries.len());
        for (i, q) in entries.iter().enumerate() {
            m[(i, i)] = *q;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::NumericalFailure("ragged matrix rows"));
            }
            data.extend_from_slice(row);
        }
        Ok(QMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut m = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&self, r: &QMatrix) -> QMatrix {
        assert_eq!(self.n, r.n);
        QMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&r.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, r: &QMatrix) -> QMatrix {
        assert_eq!(self.n, r.n);
        QMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&r.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn neg(&self) -> QMatrix {
        QMatrix {
            n: self.n,
            data: self.data.iter().map(|a| -*a).collect(),
        }
    }

    pub fn mul(&self, r: &QMatrix) -> QMatrix {
        assert_eq!(self.n, r.n);
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == quat::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * r[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &QVector) -> QVector {
        assert_eq!(self.n, x.len());
        let mut out = QVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = quat::ZERO;
            for j in 0..self.n {
                acc += self[(i, j)] * x.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    /// Composition with the scalar operator `q𝓘` on the left:
    /// `(q𝓘)·T`, i.e. every entry is multiplied by `q` from the left.
    pub fn left_scaled(&self, q: Quaternion) -> QMatrix {
        QMatrix {
            n: self.n,
            data: self.data.iter().map(|a| q * *a).collect(),
        }
    }

    /// Composition with the scalar operator `q𝓘` on the right: `T·(q𝓘)`.
    pub fn right_scaled(&self, q: Quaternion) -> QMatrix {
        QMatrix {
            n: self.n,
            data: self.data.iter().map(|a| *a * q).collect(),
        }
    }

    pub fn scale(&self, t: f64) -> QMatrix {
        QMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a.scale(t)).collect(),
        }
    }

    /// Adjoint `(T*)_ij = conj(T_ji)`, the unique operator with
    /// `⟨T*x, y⟩ = ⟨x, Ty⟩`.
    pub fn adjoint(&self) -> QMatrix {
        let n = self.n;
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// `Σ_i Re(T_ii)`; for a projector this is its rank.
    pub fn real_trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)].re()).sum()
    }

    /// Leading `m × m` block.
    pub fn leading_block(&self, m: usize) -> QMatrix {
        assert!(m <= self.n);
        QMatrix::from_fn(m, |i, j| self[(i, j)])
    }

    pub fn column(&self, j: usize) -> QVector {
        QVector::from_vec((0..self.n).map(|i| self[(i, j)]).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &QVector) {
        for i in 0..self.n {
            self[(i, j)] = v.get(i);
        }
    }

    /// Operator norm `sup ‖Tx‖/‖x‖`, the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let gram = self.adjoint().mul(self);
        let (eigs, _) = linalg::eigh(&gram).expect("Jacobi on a Gram matrix");
        eigs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// Complex adjoint `χ(T) = [[T₁, T₂], [-conj(T₂), conj(T₁)]]` where
    /// `T = T₁ + T₂ e2` splits entries over the slice `ℂ_{e1}`.
    ///
    /// `χ` is multiplicative, maps `T*` to the conjugate transpose, and its
    /// eigenvalue set is closed under complex conjugation; the eigenvalues
    /// enumerate the right-eigenvalue spheres of `T`.
    pub fn complex_adjoint(&self) -> ComplexAdjoint {
        let n = self.n;
        let mut m = CMatrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let q = self[(i, j)];
                let a = Complex64::new(q.x0, q.x1);
                let b = Complex64::new(q.x2, q.x3);
                m[(i, j)] = a;
                m[(i, j + n)] = b;
                m[(i + n, j)] = -b.conj();
                m[(i + n, j + n)] = a.conj();
            }
        }
        ComplexAdjoint { mat: m }
    }

    /// Normality defect `‖TT* − T*T‖` measured in the operator norm.
    pub fn normality_defect(&self) -> f64 {
        let tt = self.mul(&self.adjoint());
        let t_t = self.adjoint().mul(self);
        tt.sub(&t_t).operator_norm()
    }

    pub fn is_normal(&self) -> bool {
        let norm = self.operator_norm();
        self.normality_defect() < CLASSIFY_TOL * (norm * norm).max(1.0)
    }

    /// Classification predicates of the basic operator classes.
    pub fn classify(&self) -> OperatorClass {
        let norm = self.operator_norm();
        let scale = norm.max(1.0);
        let adj = self.adjoint();
        let selfadjoint = self.sub(&adj).operator_norm() <= CLASSIFY_TOL * scale;
        let anti_selfadjoint = self.add(&adj).operator_norm() <= CLASSIFY_TOL * scale;
        let normal = self.normality_defect() <= CLASSIFY_TOL * (norm * norm).max(1.0);
        let unitary = adj
            .mul(self)
            .sub(&QMatrix::identity(self.n))
            .operator_norm()
            <= CLASSIFY_TOL;
        let positive = selfadjoint && {
            match linalg::eigh(self) {
                Ok((eigs, _)) => eigs.first().copied().unwrap_or(0.0) >= -CLASSIFY_TOL * scale,
                Err(_) => false,
            }
        };
        OperatorClass {
            selfadjoint,
            anti_selfadjoint,
            normal,
            unitary,
            positive,
        }
    }

    /// Splits a normal operator as `T = A + J·B` with `A = (T+T*)/2`
    /// selfadjoint, `B = |(T−T*)/2|` positive and `J` anti-selfadjoint
    /// unitary; the three commute.
    ///
    /// `J` is canonical on the orthogonal complement of `ker(T−T*)`. On the
    /// kernel it acts as left multiplication by `j_choice` taken in an
    /// orthonormal eigenbasis of `A` restricted to the kernel; the eigenbasis
    /// (rather than the standard basis) keeps `[A, J] = 0` there.
    pub fn normal_decompose(&self, j_choice: &ImaginaryUnit) -> Result<NormalDecomposition> {
        let norm = self.operator_norm();
        if self.normality_defect() >= 1e-10 * (norm * norm).max(1.0) {
            return Err(Error::NotNormal);
        }
        let n = self.n;
        let adj = self.adjoint();
        let a = self.add(&adj).scale(0.5);
        let c = self.sub(&adj).scale(0.5);

        // B = |C| and the range part of J from the eigensystem of C*C.
        let gram = c.adjoint().mul(&c);
        let (mu, v) = linalg::eigh(&gram)?;
        let kernel_tol = 1e-12 * norm.max(1.0);
        let mut b = QMatrix::zeros(n);
        let mut j = QMatrix::zeros(n);
        let mut kernel_cols: Vec<QVector> = Vec::new();
        for (idx, &m2) in mu.iter().enumerate() {
            let sigma = m2.max(0.0).sqrt();
            let col = v.column(idx);
            if sigma <= kernel_tol {
                kernel_cols.push(col);
                continue;
            }
            // B += v σ v*,  J += (C v / σ) v*
            let jcol = c.mul_vec(&col).scaled(Quaternion::from_real(1.0 / sigma));
            for r in 0..n {
                for s in 0..n {
                    let vs = col.get(s).conj();
                    b[(r, s)] += col.get(r) * vs.scale(sigma);
                    j[(r, s)] += jcol.get(r) * vs;
                }
            }
        }

        // Kernel part: diagonalize A restricted to ker(C) and left-multiply
        // by j_choice in that eigenbasis.
        if !kernel_cols.is_empty() {
            let k = kernel_cols.len();
            let a_cols: Vec<QVector> = kernel_cols.iter().map(|w| a.mul_vec(w)).collect();
            let ak = QMatrix::from_fn(k, |i, jj| kernel_cols[i].inner(&a_cols[jj]));
            let (_, z) = linalg::eigh(&ak)?;
            let jq = j_choice.quaternion();
            for col in 0..k {
                // m = Σ_r kernel_cols[r] · z[(r, col)]
                let mut m = QVector::zeros(n);
                for r in 0..k {
                    m = m.add(&kernel_cols[r].scaled(z[(r, col)]));
                }
                for r in 0..n {
                    for s in 0..n {
                        j[(r, s)] += m.get(r) * jq * m.get(s).conj();
                    }
                }
            }
        }

        Ok(NormalDecomposition { a, j, b })
    }

    /// Polar decomposition `T = U P` with `P = sqrt(T*T)` positive and `U`
    /// unitary. Fails with [`Error::Singular`] when the smallest singular
    /// value is below `1e-10` (the partial-isometry extension is not
    /// provided).
    pub fn polar_decompose(&self) -> Result<(QMatrix, QMatrix)> {
        let n = self.n;
        let gram = self.adjoint().mul(self);
        let (mu, v) = linalg::eigh(&gram)?;
        let smin = mu.first().copied().unwrap_or(0.0).max(0.0).sqrt();
        if smin <= 1e-10 {
            return Err(Error::Singular);
        }
        let mut p = QMatrix::zeros(n);
        let mut p_inv = QMatrix::zeros(n);
        for (idx, &m2) in mu.iter().enumerate() {
            let sigma = m2.max(0.0).sqrt();
            let col = v.column(idx);
            for r in 0..n {
                for s in 0..n {
                    let vs = col.get(s).conj();
                    p[(r, s)] += col.get(r) * vs.scale(sigma);
                    p_inv[(r, s)] += col.get(r) * vs.scale(1.0 / sigma);
                }
            }
        }
        let u = self.mul(&p_inv);
        Ok((u, p))
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}

/// Result of [`QMatrix::classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorClass {
    pub selfadjoint: bool,
    pub anti_selfadjoint: bool,
    pub normal: bool,
    pub unitary: bool,
    pub positive: bool,
}

/// The decomposition `T = A + J B` of a normal operator.
#[derive(Clone, Debug)]
pub struct NormalDecomposition {
    pub a: QMatrix,
    pub j: QMatrix,
    pub b: QMatrix,
}

impl NormalDecomposition {
    /// `A + J B`, for reconstruction checks.
    pub fn reconstruct(&self) -> QMatrix {
        self.a.add(&self.j.mul(&self.b))
    }
}

/// The `2n × 2n` complex matrix `χ(T)`.
#[derive(Clone, Debug)]
pub struct ComplexAdjoint {
    mat: CMatrix,
}

impl ComplexAdjoint {
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn n(&self) -> usize {
        self.mat.n()
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        crate::calg::eigenvalues(&self.mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{E1, E2, E3, ONE};
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat_close(a: &QMatrix, b: &QMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn adjoint_examples() {
        let t = QMatrix::diagonal(&[E1]);
        assert_eq!(t.adjoint(), QMatrix::diagonal(&[-E1]));

        let h = QMatrix::from_rows(vec![
            vec![Quaternion::from_real(2.0), Quaternion::from_real(1.0)],
            vec![Quaternion::from_real(1.0), Quaternion::from_real(-3.0)],
        ])
        .unwrap();
        assert_eq!(h.adjoint(), h);
        assert!(h.classify().selfadjoint);

        let mut t = QMatrix::zeros(2);
        t[(0, 1)] = E2;
        assert_eq!(t.adjoint()[(1, 0)], -E2);
    }

    #[test]
    fn complex_adjoint_examples() {
        let id = QMatrix::identity(2);
        let chi = id.complex_adjoint();
        assert!(chi.matrix().sub(&CMatrix::identity(4)).max_abs() < 1e-15);

        let chi = QMatrix::diagonal(&[E1]).complex_adjoint();
        assert_eq!(chi.matrix()[(0, 0)], Complex64::I);
        assert_eq!(chi.matrix()[(1, 1)], -Complex64::I);

        let chi = QMatrix::diagonal(&[E2]).complex_adjoint();
        assert_eq!(chi.matrix()[(0, 0)], Complex64::ZERO);
        assert_eq!(chi.matrix()[(0, 1)], Complex64::ONE);
        assert_eq!(chi.matrix()[(1, 0)], -Complex64::ONE);
        assert_eq!(chi.matrix()[(1, 1)], Complex64::ZERO);
    }

    #[test]
    fn complex_adjoint_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let t = sampling::gaussian_matrix(&mut rng, 4);
            let s = sampling::gaussian_matrix(&mut rng, 4);
            let lhs = t.mul(&s).complex_adjoint();
            let rhs = t
                .complex_adjoint()
                .matrix()
                .mul(s.complex_adjoint().matrix());
            let scale = t.operator_norm() * s.operator_norm();
            assert!(lhs.matrix().sub(&rhs).max_abs() < 1e-12 * scale.max(1.0));

            let adj = t.adjoint().complex_adjoint();
            let herm = t.complex_adjoint().matrix().hermitian_transpose();
            assert!(adj.matrix().sub(&herm).max_abs() < 1e-15);
        }
    }

    #[test]
    fn complex_adjoint_eigenvalues_conjugate_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let t = sampling::gaussian_matrix(&mut rng, 5);
        let mut eigs = t.complex_adjoint().eigenvalues().unwrap();
        let tol = 1e-8 * (1.0 + t.operator_norm());
        // Greedily pair each eigenvalue with a conjugate partner.
        while let Some(z) = eigs.pop() {
            let (idx, best) = eigs
                .iter()
                .enumerate()
                .map(|(i, w)| (i, (w.conj() - z).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .expect("odd eigenvalue count");
            assert!(best < tol, "unpaired eigenvalue {z}");
            eigs.swap_remove(idx);
        }
    }

    #[test]
    fn adjoint_inner_product_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let t = sampling::gaussian_matrix(&mut rng, 5);
            let x = sampling::gaussian_vector(&mut rng, 5);
            let y = sampling::gaussian_vector(&mut rng, 5);
            let lhs = t.adjoint().mul_vec(&x).inner(&y);
            let rhs = x.inner(&t.mul_vec(&y));
            let scale = t.operator_norm() * x.norm() * y.norm();
            assert!((lhs - rhs).norm() <= 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn right_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = sampling::gaussian_matrix(&mut rng, 4);
        let x = sampling::gaussian_vector(&mut rng, 4);
        let s = sampling::gaussian_quaternion(&mut rng);
        let lhs = t.mul_vec(&x.scaled(s));
        let rhs = t.mul_vec(&x).scaled(s);
        assert!(lhs.sub(&rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((QMatrix::identity(3).operator_norm() - 1.0).abs() < 1e-12);
        assert!(QMatrix::zeros(3).operator_norm() < 1e-12);
        let t = QMatrix::diagonal(&[Quaternion::from_real(3.0), E1]);
        assert!((t.operator_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_matches_sup_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let t = sampling::gaussian_matrix(&mut rng, 5);
        let norm = t.operator_norm();
        let mut best: f64 = 0.0;
        for _ in 0..300 {
            let x = sampling::gaussian_vector(&mut rng, 5);
            best = best.max(t.mul_vec(&x).norm() / x.norm());
        }
        assert!(best <= norm * (1.0 + 1e-10));
        assert!(best >= 0.5 * norm);
    }

    #[test]
    fn classify_unitary_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = sampling::random_unitary(&mut rng, 4);
        let cls = u.classify();
        assert!(cls.unitary && cls.normal);

        let g = sampling::gaussian_matrix(&mut rng, 4);
        let p = g.adjoint().mul(&g);
        let cls = p.classify();
        assert!(cls.selfadjoint && cls.positive && cls.normal);

        let c = g.sub(&g.adjoint()).scale(0.5);
        let cls = c.classify();
        assert!(cls.anti_selfadjoint && cls.normal && !cls.selfadjoint);
    }

    #[test]
    fn normal_decompose_diagonal_cases() {
        let j1 = ImaginaryUnit::e1();

        // T = diag(e1): A = 0, B = I, J = diag(e1).
        let t = QMatrix::diagonal(&[E1]);
        let d = t.normal_decompose(&j1).unwrap();
        assert!(mat_close(&d.a, &QMatrix::zeros(1), 1e-12));
        assert!(mat_close(&d.b, &QMatrix::identity(1), 1e-12));
        assert!(mat_close(&d.j, &QMatrix::diagonal(&[E1]), 1e-12));

        // T = diag(1 + 2 e1): A = 1, B = 2, J = e1.
        let t = QMatrix::diagonal(&[ONE + E1 * 2.0]);
        let d = t.normal_decompose(&j1).unwrap();
        assert!(mat_close(&d.a, &QMatrix::identity(1), 1e-12));
        assert!(mat_close(&d.b, &QMatrix::identity(1).scale(2.0), 1e-12));
        assert!(mat_close(&d.j, &QMatrix::diagonal(&[E1]), 1e-12));

        // Selfadjoint real diagonal: J falls back to left multiplication.
        let t = QMatrix::diagonal(&[Quaternion::from_real(1.0), Quaternion::from_real(4.0)]);
        let d = t.normal_decompose(&j1).unwrap();
        assert!(mat_close(&d.a, &t, 1e-12));
        assert!(mat_close(&d.b, &QMatrix::zeros(2), 1e-12));
        assert!(mat_close(&d.j, &QMatrix::diagonal(&[E1, E1]), 1e-12));
    }

    #[test]
    fn normal_decompose_random_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..8 {
            let n = 3 + trial % 3;
            let spheres: Vec<_> = (0..n)
                .map(|_| {
                    let q = sampling::gaussian_quaternion(&mut rng);
                    crate::quat::SpherePoint::new(q.x0, q.x1)
                })
                .collect();
            let t = sampling::random_normal_from_spheres(&mut rng, &spheres);
            let norm = t.operator_norm().max(1.0);
            let choices = [
                ImaginaryUnit::e1(),
                ImaginaryUnit::e2(),
                ImaginaryUnit::e3(),
            ];
            let d = t.normal_decompose(&choices[trial % 3]).unwrap();

            assert!(
                mat_close(&d.reconstruct(), &t, 1e-9 * norm),
                "reconstruction"
            );
            let comm = |x: &QMatrix, y: &QMatrix| x.mul(y).sub(&y.mul(x)).operator_norm();
            assert!(comm(&d.a, &d.b) < 1e-9 * norm, "[A,B]");
            assert!(comm(&d.a, &d.j) < 1e-9 * norm, "[A,J]");
            assert!(comm(&d.b, &d.j) < 1e-9 * norm, "[B,J]");
            // J is anti-selfadjoint and unitary, with J² = −I.
            assert!(d.j.add(&d.j.adjoint()).operator_norm() < 1e-9);
            assert!(
                d.j.adjoint()
                    .mul(&d.j)
                    .sub(&QMatrix::identity(t.n()))
                    .operator_norm()
                    < 1e-9
            );
            assert!(d.j.mul(&d.j).add(&QMatrix::identity(t.n())).operator_norm() < 1e-9);
            // A selfadjoint, B positive.
            assert!(d.a.sub(&d.a.adjoint()).operator_norm() < 1e-9 * norm);
            let cls = d.b.classify();
            assert!(cls.positive);
        }
    }

    #[test]
    fn normal_decompose_mixed_kernel_and_range() {
        // Spectrum with both real spheres (kernel of T−T*) and a non-real
        // one (range), conjugated by a random unitary so the two J branches
        // must cooperate.
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let spheres = [
            crate::quat::SpherePoint::new(2.0, 0.0),
            crate::quat::SpherePoint::new(1.0, 0.5),
            crate::quat::SpherePoint::new(-1.0, 0.0),
        ];
        let t = sampling::random_normal_from_spheres(&mut rng, &spheres);
        let norm = t.operator_norm();
        let d = t.normal_decompose(&ImaginaryUnit::e2()).unwrap();
        assert!(mat_close(&d.reconstruct(), &t, 1e-9 * norm));
        let comm = |x: &QMatrix, y: &QMatrix| x.mul(y).sub(&y.mul(x)).operator_norm();
        assert!(comm(&d.a, &d.j) < 1e-9 * norm, "[A,J] across branches");
        assert!(comm(&d.b, &d.j) < 1e-9 * norm);
        assert!(d.j.mul(&d.j).add(&QMatrix::identity(3)).operator_norm() < 1e-9);
        // B vanishes exactly on the kernel directions: its rank is 1, so the
        // two smallest eigenvalues of B are zero.
        let (b_eigs, _) = crate::linalg::eigh(&d.b).unwrap();
        assert!(b_eigs[0].abs() < 1e-9 && b_eigs[1].abs() < 1e-9);
        assert!((b_eigs[2] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn normal_decompose_rejects_non_normal() {
        let mut t = QMatrix::zeros(2);
        t[(0, 1)] = ONE;
        assert!(matches!(
            t.normal_decompose(&ImaginaryUnit::e1()),
            Err(Error::NotNormal)
        ));
    }

    #[test]
    fn selfadjoint_kernel_keeps_commutation() {
        // A selfadjoint matrix with entries outside ℂ_{e1}: the kernel branch
        // must still commute with J.
        let mut t = QMatrix::zeros(2);
        t[(0, 1)] = E2;
        t[(1, 0)] = -E2;
        t[(0, 0)] = Quaternion::from_real(1.0);
        t[(1, 1)] = Quaternion::from_real(1.0);
        assert!(t.classify().selfadjoint);
        let d = t.normal_decompose(&ImaginaryUnit::e1()).unwrap();
        let comm = d.a.mul(&d.j).sub(&d.j.mul(&d.a)).operator_norm();
        assert!(comm < 1e-9 * t.operator_norm(), "commutator {comm}");
        assert!(mat_close(&d.reconstruct(), &t, 1e-9));
    }

    #[test]
    fn polar_decompose_cases() {
        let t = QMatrix::diagonal(&[Quaternion::from_real(2.0), Quaternion::from_real(0.5)]);
        let (u, p) = t.polar_decompose().unwrap();
        assert!(mat_close(&u, &QMatrix::identity(2), 1e-12));
        assert!(mat_close(&p, &t, 1e-12));

        let t = QMatrix::diagonal(&[E1 * 2.0]);
        let (u, p) = t.polar_decompose().unwrap();
        assert!(mat_close(&u, &QMatrix::diagonal(&[E1]), 1e-12));
        assert!(mat_close(&p, &QMatrix::identity(1).scale(2.0), 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = sampling::random_unitary(&mut rng, 3);
        let (u, p) = q.polar_decompose().unwrap();
        assert!(mat_close(&u, &q, 1e-9));
        assert!(mat_close(&p, &QMatrix::identity(3), 1e-9));

        let singular = QMatrix::diagonal(&[ONE, quat::ZERO]);
        assert!(matches!(singular.polar_decompose(), Err(Error::Singular)));
    }

    #[test]
    fn polar_reconstructs_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..6 {
            let t = sampling::gaussian_matrix(&mut rng, 4);
            if let Ok((u, p)) = t.polar_decompose() {
                let norm = t.operator_norm();
                assert!(u.mul(&p).sub(&t).operator_norm() < 1e-9 * norm);
                assert!(
                    u.adjoint()
                        .mul(&u)
                        .sub(&QMatrix::identity(4))
                        .operator_norm()
                        < 1e-9,
                    "U unitary"
                );
                assert!(p.classify().positive);
            }
        }
    }

    #[test]
    fn matrix_json_shape() {
        let t = QMatrix::from_rows(vec![
            vec![ONE, E3],
            vec![quat::ZERO, Quaternion::new(0.5, 0.0, -1.0, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with("{\"n\":2,\"entries\":[[[1.0,0.0,0.0,0.0],"));
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        // Shape violations are rejected.
        assert!(serde_json::from_str::<QMatrix>("{\"n\":2,\"entries\":[[[1,0,0,0]]]}").is_err());
    }

    #[test]
    fn e3_is_e1_e2() {
        assert_eq!(E1 * E2, E3);
    }
}
