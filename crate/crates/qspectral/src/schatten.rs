//! Singular values, Schatten p-norms, singular-value perturbation
//! inequalities, and the regularized determinant `δ_{k,J}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::qmat::{QMatrix, QVector};
use crate::quat::{ImaginaryUnit, Quaternion};
use crate::spectrum;

/// Singular value decomposition `T x = Σ σ_n λ_n ⟨e_n, x⟩` with `λ` the
/// non-increasing eigenvalues of `|T| = sqrt(T*T)`, `e_n` an eigenbasis of
/// `|T|` (columns of `right`) and `σ_n = W e_n` (columns of `left`).
#[derive(Clone, Debug)]
pub struct Svd {
    values: Vec<f64>,
    left: QMatrix,
    right: QMatrix,
}

impl Svd {
    /// Singular values in non-increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left(&self) -> &QMatrix {
        &self.left
    }

    pub fn right(&self) -> &QMatrix {
        &self.right
    }

    /// `Σ σ_n λ_n ⟨e_n, x⟩` as a matrix, for reconstruction checks.
    pub fn reconstruct(&self) -> QMatrix {
        let n = self.values.len();
        QMatrix::from_fn(n, |r, s| {
            let mut acc = crate::quat::ZERO;
            for (k, lam) in self.values.iter().enumerate() {
                acc += self.left[(r, k)].scale(*lam) * self.right[(s, k)].conj();
            }
            acc
        })
    }
}

/// Singular values and the factors realizing them. Zero singular directions
/// get their left vectors from an orthonormal completion, so `left` is
/// always unitary.
pub fn singular_values(t: &QMatrix) -> Result<Svd> {
    let n = t.n();
    let gram = t.adjoint().mul(t);
    let (mu, v) = linalg::eigh(&gram)?;
    // eigh sorts ascending; flip to non-increasing.
    let mut values = Vec::with_capacity(n);
    let mut right = QMatrix::zeros(n);
    for k in 0..n {
        let src = n - 1 - k;
        values.push(mu[src].max(0.0).sqrt());
        let col = v.column(src);
        right.set_column(k, &col);
    }
    let rank_tol = values.first().copied().unwrap_or(0.0) * 1e-13;
    let mut left = QMatrix::zeros(n);
    let mut filled: Vec<QVector> = Vec::new();
    for (k, lam) in values.iter().enumerate() {
        if *lam > rank_tol {
            let col = t
                .mul_vec(&right.column(k))
                .scaled(Quaternion::from_real(1.0 / lam));
            left.set_column(k, &col);
            filled.push(col);
        }
    }
    // Complete the kernel directions against the standard basis.
    let rank = filled.len();
    if rank < n {
        let mut have = rank;
        for i in 0..n {
            if have == n {
                break;
            }
            let mut cand = QVector::basis(n, i);
            for _ in 0..2 {
                for f in &filled {
                    let c = f.inner(&cand);
                    cand = cand.sub(&f.scaled(c));
                }
            }
            let norm = cand.norm();
            if norm > 0.5 {
                let cand = cand.scaled(Quaternion::from_real(1.0 / norm));
                left.set_column(have, &cand);
                filled.push(cand);
                have += 1;
            }
        }
        if have < n {
            return Err(Error::NumericalFailure("orthonormal completion failed"));
        }
    }
    Ok(Svd {
        values,
        left,
        right,
    })
}

/// Schatten norm `(Σ λ_nᵖ)^{1/p}`; `p = ∞` gives the operator norm `λ₁`.
pub fn schatten_norm(t: &QMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent);
    }
    let lambdas = linalg::singular_values_ascending(t)?;
    if p.is_infinite() {
        return Ok(lambdas.last().copied().unwrap_or(0.0));
    }
    Ok(lambdas.iter().map(|l| l.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Membership predicate for the class `S_p(J)`: `T` commutes with the
/// anti-selfadjoint unitary `J` within `tol · max(1, ‖T‖‖J‖)`. The norms
/// themselves are defined without this constraint.
pub fn commutes_with(t: &QMatrix, j: &QMatrix, tol: f64) -> bool {
    let scale = (t.operator_norm() * j.operator_norm()).max(1.0);
    t.mul(j).sub(&j.mul(t)).operator_norm() <= tol * scale
}

/// Report of the ideal-norm inequalities `‖AT‖_p ≤ ‖A‖‖T‖_p`,
/// `‖TA‖_p ≤ ‖A‖‖T‖_p` and the index-shifted singular value inequalities
/// `λ_{n+m+1}(T+A) ≤ λ_{n+1}(T) + λ_{m+1}(A)`,
/// `λ_{n+m+1}(TA) ≤ λ_{n+1}(T) λ_{m+1}(A)`.
#[derive(Clone, Debug, Serialize)]
pub struct IdealInequalityReport {
    pub p: f64,
    pub norm_a_op: f64,
    pub norm_t_p: f64,
    pub norm_at_p: f64,
    pub norm_ta_p: f64,
    /// max(‖AT‖_p, ‖TA‖_p) − ‖A‖‖T‖_p (negative when the bound holds).
    pub ideal_slack: f64,
    /// Largest violation of the additive λ-inequality over valid (n, m).
    pub lambda_sum_violation: f64,
    /// Largest violation of the multiplicative λ-inequality.
    pub lambda_product_violation: f64,
}

impl IdealInequalityReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.ideal_slack <= slack
            && self.lambda_sum_violation <= slack
            && self.lambda_product_violation <= slack
    }
}

pub fn check_ideal_inequalities(t: &QMatrix, a: &QMatrix, p: f64) -> Result<IdealInequalityReport> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent);
    }
    let n = t.n();
    let desc = |m: &QMatrix| -> Result<Vec<f64>> {
        let mut v = linalg::singular_values_ascending(m)?;
        v.reverse();
        Ok(v)
    };
    let lam_t = desc(t)?;
    let lam_a = desc(a)?;
    let lam_sum = desc(&t.add(a))?;
    let lam_prod = desc(&t.mul(a))?;
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);

    let mut sum_violation = f64::NEG_INFINITY;
    let mut prod_violation = f64::NEG_INFINITY;
    for (i, lt) in lam_t.iter().enumerate() {
        for (m, la) in lam_a.iter().enumerate() {
            if i + m >= n {
                continue;
            }
            sum_violation = sum_violation.max(get(&lam_sum, i + m) - (lt + la));
            prod_violation = prod_violation.max(get(&lam_prod, i + m) - lt * la);
        }
    }

    let norm_a_op = a.operator_norm();
    let norm_t_p = schatten_norm(t, p)?;
    let norm_at_p = schatten_norm(&a.mul(t), p)?;
    let norm_ta_p = schatten_norm(&t.mul(a), p)?;
    let bound = norm_a_op * norm_t_p;
    Ok(IdealInequalityReport {
        p,
        norm_a_op,
        norm_t_p,
        norm_at_p,
        norm_ta_p,
        ideal_slack: norm_at_p.max(norm_ta_p) - bound,
        lambda_sum_violation: sum_violation,
        lambda_product_violation: prod_violation,
    })
}

/// A value in the slice plane `ℂ_J`, reported as its real and imaginary
/// coordinates; the imaginary coordinate sits along the chosen unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceComplex {
    pub re: f64,
    pub im: f64,
}

impl SliceComplex {
    pub fn to_quaternion(&self, unit: &ImaginaryUnit) -> Quaternion {
        Quaternion::from_real(self.re) + unit.quaternion() * self.im
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// The regularized determinant
///
/// ```text
/// δ_{k,J}(T) = Π_l (1 + s_l) exp(−s_l + s_l²/2 + … + (−1)^{k−1} s_l^{k−1}/(k−1))
/// ```
///
/// over the non-zero spheres of the point S-spectrum, with representatives
/// `s_l = u + Jv`, `v ≥ 0`, in `ℂ_J`, each repeated by its multiplicity. The
/// exponent is the truncated series of `−log(1 + s)`; for `k = 1` the sum is
/// empty. When no non-zero spectrum meets the slice the value is `1`.
///
/// The computation factors through the canonical `(u, v)` data, so the value
/// is independent of the chosen slice unit.
pub fn delta_k(t: &QMatrix, k: usize, _unit: &ImaginaryUnit) -> Result<SliceComplex> {
    if k < 1 {
        return Err(Error::BadExponent);
    }
    let spec = spectrum::s_spectrum(t)?;
    let zero_tol = 1e-12 * (1.0 + t.operator_norm());
    let mut value = Complex64::ONE;
    for sphere in spec.spheres() {
        let z = Complex64::new(sphere.point.u, sphere.point.v);
        if z.norm() <= zero_tol {
            continue;
        }
        let mut exponent = Complex64::ZERO;
        let mut pow = Complex64::ONE;
        let mut sign = -1.0;
        for j in 1..k {
            pow *= z;
            exponent += pow * (sign / j as f64);
            sign = -sign;
        }
        let factor = (Complex64::ONE + z) * exponent.exp();
        for _ in 0..sphere.multiplicity {
            value *= factor;
        }
    }
    Ok(SliceComplex {
        re: value.re,
        im: value.im,
    })
}

/// Reported (never asserted) growth data for `δ_k`: the fitted constants of
/// `|δ_k(T)| ≤ exp(Γ_k ‖T‖_k^k)` and
/// `‖δ_k(T)(𝓘+T)⁻¹‖ ≤ exp(M_k ‖T‖_k^k)`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaBoundReport {
    pub k: usize,
    pub delta: SliceComplex,
    pub delta_abs: f64,
    pub schatten_k_pow_k: f64,
    /// `ln|δ| / ‖T‖_k^k`.
    pub fitted_gamma: Option<f64>,
    /// `ln(|δ| ‖(𝓘+T)⁻¹‖) / ‖T‖_k^k`; `None` when `−1 ∈ σ_S(T)`.
    pub fitted_m: Option<f64>,
}

pub fn delta_bound_report(t: &QMatrix, k: usize, unit: &ImaginaryUnit) -> Result<DeltaBoundReport> {
    let delta = delta_k(t, k, unit)?;
    let norm_k = schatten_norm(t, k as f64)?;
    let pow = norm_k.powi(k as i32);
    let fitted_gamma = if pow > 0.0 {
        Some(delta.abs().ln() / pow)
    } else {
        None
    };
    let minus_one = Quaternion::from_real(-1.0);
    let fitted_m = match spectrum::pseudo_resolvent(t, &minus_one) {
        Ok(q) => {
            // (𝓘 + T)⁻¹ = Q_{−1}(T)(T + 𝓘)* …: at s = −1 the pencil is (T + 𝓘)²,
            // so ‖(𝓘+T)⁻¹‖ = ‖Q(T+𝓘)‖.
            let inv_norm = q
                .value
                .mul(&t.add(&QMatrix::identity(t.n())))
                .operator_norm();
            if pow > 0.0 {
                Some((delta.abs() * inv_norm).ln() / pow)
            } else {
                None
            }
        }
        Err(_) => None,
    };
    Ok(DeltaBoundReport {
        k,
        delta,
        delta_abs: delta.abs(),
        schatten_k_pow_k: pow,
        fitted_gamma,
        fitted_m,
    })
}
