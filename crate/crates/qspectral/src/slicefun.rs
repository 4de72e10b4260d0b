//! Slice hyperholomorphic functions on balls centered at the origin,
//! represented as truncated power series: left series `Σ qⁿ aₙ`, right
//! series `Σ aₙ qⁿ`, the ⋆-products as coefficient convolutions, the
//! ⋆-inverse of a linear factor in closed form, and pointwise evaluation.
//!
//! A slice function takes the form `f(u + Jv) = α(u,v) + Jβ(u,v)` (left) or
//! `α + βJ` (right) with `α` even and `β` odd in `v`; when the coefficients
//! are all real the function is intrinsic and maps every slice into itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{sphere_distance, ImaginaryUnit, Quaternion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Truncated power series with quaternion coefficients and an explicit
/// convergence-ball radius supplied by the caller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSeries {
    side: Side,
    radius: f64,
    coefficients: Vec<Quaternion>,
}

impl SliceSeries {
    pub fn left(coefficients: Vec<Quaternion>, radius: f64) -> Self {
        SliceSeries {
            side: Side::Left,
            radius,
            coefficients,
        }
    }

    pub fn right(coefficients: Vec<Quaternion>, radius: f64) -> Self {
        SliceSeries {
            side: Side::Right,
            radius,
            coefficients,
        }
    }

    /// Real-coefficient (intrinsic) series; stored as a left series, and
    /// evaluation agrees with the right reading at every point.
    pub fn intrinsic(coefficients: &[f64], radius: f64) -> Self {
        SliceSeries {
            side: Side::Left,
            radius,
            coefficients: coefficients
                .iter()
                .map(|&c| Quaternion::from_real(c))
                .collect(),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coefficients(&self) -> &[Quaternion] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// True when every coefficient is exactly real.
    pub fn is_intrinsic(&self) -> bool {
        self.coefficients
            .iter()
            .all(|c| c.x1 == 0.0 && c.x2 == 0.0 && c.x3 == 0.0)
    }

    /// ⋆-product by coefficient convolution. Left series convolve in the
    /// order `a_r b_{n−r}`; right series in the mirrored order `b_r a_{n−r}`.
    /// The truncation degree is `deg f + deg g`.
    pub fn star_multiply(&self, g: &SliceSeries) -> Result<SliceSeries> {
        if self.side != g.side {
            return Err(Error::SideMismatch);
        }
        let (a, b) = (&self.coefficients, &g.coefficients);
        let mut c = vec![crate::quat::ZERO; a.len() + b.len() - 1];
        for (r, ar) in a.iter().enumerate() {
            for (s, bs) in b.iter().enumerate() {
                c[r + s] += match self.side {
                    Side::Left => *ar * *bs,
                    Side::Right => *bs * *ar,
                };
            }
        }
        Ok(SliceSeries {
            side: self.side,
            radius: self.radius.min(g.radius),
            coefficients: c,
        })
    }

    /// Horner evaluation respecting the side; `|q|` must lie strictly inside
    /// the convergence ball.
    pub fn evaluate(&self, q: &Quaternion) -> Result<Quaternion> {
        if q.norm() >= self.radius {
            return Err(Error::OutOfBall);
        }
        let mut acc = crate::quat::ZERO;
        for a in self.coefficients.iter().rev() {
            acc = match self.side {
                Side::Left => *q * acc + *a,
                Side::Right => acc * *q + *a,
            };
        }
        Ok(acc)
    }

    /// The even/odd split `f(u + Jv) = α + Jβ` (left) or `α + βJ` (right),
    /// computed from two evaluations.
    pub fn alpha_beta(
        &self,
        u: f64,
        v: f64,
        unit: &ImaginaryUnit,
    ) -> Result<(Quaternion, Quaternion)> {
        let j = unit.quaternion();
        let plus = self.evaluate(&(Quaternion::from_real(u) + j * v))?;
        let minus = self.evaluate(&(Quaternion::from_real(u) - j * v))?;
        let alpha = (plus + minus).scale(0.5);
        let beta = match self.side {
            Side::Left => (-j * (plus - minus)).scale(0.5),
            Side::Right => ((plus - minus) * -j).scale(0.5),
        };
        Ok((alpha, beta))
    }

    /// Direct operator polynomial `Σ Tⁿ aₙ` (left) or `Σ aₙ Tⁿ` (right),
    /// the comparison target for the contour-integral calculus.
    pub fn direct_polynomial(&self, t: &QMatrix) -> QMatrix {
        let n = t.n();
        let mut acc = QMatrix::zeros(n);
        let mut power = QMatrix::identity(n);
        for (i, a) in self.coefficients.iter().enumerate() {
            if i > 0 {
                power = power.mul(t);
            }
            acc = match self.side {
                Side::Left => acc.add(&power.right_scaled(*a)),
                Side::Right => acc.add(&power.left_scaled(*a)),
            };
        }
        acc
    }
}

/// The ⋆-inverse `(q − s)^{−⋆}` of the linear factor `q − s`, in closed form:
///
/// ```text
/// (q − s)^{−⋆_l} = (q² − 2 Re(s) q + |s|²)⁻¹ (q − s̄)
/// (q − s)^{−⋆_r} = (q − s̄) (q² − 2 Re(s) q + |s|²)⁻¹
/// ```
///
/// Both reduce to `(q − s)⁻¹` when `q` and `s` share a slice.
#[derive(Clone, Copy, Debug)]
pub struct LinearFactorInverse {
    pub s: Quaternion,
    pub side: Side,
}

pub fn linear_factor_inverse(s: Quaternion, side: Side) -> LinearFactorInverse {
    LinearFactorInverse { s, side }
}

impl LinearFactorInverse {
    pub fn evaluate(&self, q: &Quaternion) -> Result<Quaternion> {
        let denom = *q * *q - q.scale(2.0 * self.s.re()) + Quaternion::from_real(self.s.norm_sqr());
        let tol = 1e-12 * (1.0 + q.norm() + self.s.norm());
        if sphere_distance(q.class(), self.s.class()) <= tol {
            return Err(Error::OnSphere);
        }
        let inv = denom.inverse().ok_or(Error::OnSphere)?;
        let lin = *q - self.s.conj();
        Ok(match self.side {
            Side::Left => inv * lin,
            Side::Right => lin * inv,
        })
    }
}

/// Residual of the exchange identities relating the ⋆-inverses of `q − s`
/// computed in the variable `q` with those computed in the variable `s`:
///
/// ```text
/// (q² − 2Re(s)q + |s|²)⁻¹(q − s̄) = −(s − q̄)(s² − 2Re(q)s + |q|²)⁻¹
/// (q − s̄)(q² − 2Re(s)q + |s|²)⁻¹ = −(s² − 2Re(q)s + |q|²)⁻¹(s − q̄)
/// ```
pub fn verify_variable_exchange(q: &Quaternion, s: &Quaternion) -> Result<f64> {
    let tol = 1e-12 * (1.0 + q.norm() + s.norm());
    if sphere_distance(q.class(), s.class()) <= tol {
        return Err(Error::OnSphere);
    }
    let dq = (*q * *q - q.scale(2.0 * s.re()) + Quaternion::from_real(s.norm_sqr()))
        .inverse()
        .ok_or(Error::OnSphere)?;
    let ds = (*s * *s - s.scale(2.0 * q.re()) + Quaternion::from_real(q.norm_sqr()))
        .inverse()
        .ok_or(Error::OnSphere)?;
    let left_q = dq * (*q - s.conj());
    let right_q = (*q - s.conj()) * dq;
    let left_s = -((*s - q.conj()) * ds);
    let right_s = -(ds * (*s - q.conj()));
    let r1 = (left_q - left_s).norm();
    let r2 = (right_q - right_s).norm();
    Ok(r1.max(r2))
}

/// Pointwise ⋆-product through the α/β formula, for slice functions known
/// only by their values: `(f ⋆_l g)(u+Jv) = (αγ − βδ) + J(αδ + βγ)` built
/// from evaluations at `u ± Jv`.
pub fn pointwise_star_left(
    f_plus: Quaternion,
    f_minus: Quaternion,
    g_plus: Quaternion,
    g_minus: Quaternion,
    unit: &ImaginaryUnit,
) -> Quaternion {
    let j = unit.quaternion();
    let alpha_f = (f_plus + f_minus).scale(0.5);
    let beta_f = (-j * (f_plus - f_minus)).scale(0.5);
    let alpha_g = (g_plus + g_minus).scale(0.5);
    let beta_g = (-j * (g_plus - g_minus)).scale(0.5);
    alpha_f * alpha_g - beta_f * beta_g + j * (alpha_f * beta_g + beta_f * alpha_g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{E1, E2, E3, ONE, ZERO};
    use crate::sampling;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(x: f64) -> Quaternion {
        Quaternion::from_real(x)
    }

    #[test]
    fn star_product_example() {
        // (1 + q e1) ⋆_l (1 + q e2) = 1 + q(e1+e2) + q² e3
        let f = SliceSeries::left(vec![ONE, E1], f64::INFINITY);
        let g = SliceSeries::left(vec![ONE, E2], f64::INFINITY);
        let fg = f.star_multiply(&g).unwrap();
        assert_eq!(fg.coefficients(), &[ONE, E1 + E2, E3]);
    }

    #[test]
    fn star_identity_and_side_mismatch() {
        let f = SliceSeries::left(vec![E2, real(2.0), E3], 10.0);
        let one = SliceSeries::left(vec![ONE], f64::INFINITY);
        let fid = f.star_multiply(&one).unwrap();
        assert_eq!(fid.coefficients(), f.coefficients());
        assert_eq!(fid.radius(), 10.0);

        let g = SliceSeries::right(vec![ONE], 10.0);
        assert!(matches!(f.star_multiply(&g), Err(Error::SideMismatch)));
    }

    #[test]
    fn right_star_mirrors_order() {
        let f = SliceSeries::right(vec![E1], 10.0);
        let g = SliceSeries::right(vec![E2], 10.0);
        let fg = f.star_multiply(&g).unwrap();
        assert_eq!(fg.coefficients(), &[E2 * E1]);
    }

    #[test]
    fn intrinsic_star_is_pointwise_product() {
        let f = SliceSeries::intrinsic(&[1.0, -0.5, 2.0], f64::INFINITY);
        let g = SliceSeries::intrinsic(&[0.0, 3.0, 0.25], f64::INFINITY);
        let fg = f.star_multiply(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let q = sampling::gaussian_quaternion(&mut rng);
            let lhs = fg.evaluate(&q).unwrap();
            let rhs = f.evaluate(&q).unwrap() * g.evaluate(&q).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn evaluate_examples() {
        let f = SliceSeries::left(vec![ONE, ZERO, ONE], 10.0); // 1 + q²
        assert_eq!(f.evaluate(&E1).unwrap(), ZERO);

        let ident = SliceSeries::left(vec![ZERO, ONE], 10.0);
        let q = Quaternion::new(0.3, 1.0, -2.0, 0.5);
        assert_eq!(ident.evaluate(&q).unwrap(), q);

        assert!(matches!(
            SliceSeries::left(vec![ONE], 1.0).evaluate(&real(2.0)),
            Err(Error::OutOfBall)
        ));
    }

    #[test]
    fn intrinsic_evaluates_in_slice() {
        let f = SliceSeries::intrinsic(&[0.5, 1.0, -2.0, 0.125], 100.0);
        let unit = ImaginaryUnit::from_vector(1.0, -1.0, 0.5).unwrap();
        let (u, v) = (1.2, 0.7);
        let val = f.evaluate(&(real(u) + unit.quaternion() * v)).unwrap();
        // Complex Horner in the slice plane.
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for c in f.coefficients().iter().rev() {
            let (nre, nim) = (u * re - v * im + c.x0, u * im + v * re);
            re = nre;
            im = nim;
        }
        let expect = real(re) + unit.quaternion() * im;
        assert!((val - expect).norm() < 1e-13);
    }

    #[test]
    fn alpha_beta_symmetry() {
        let f = SliceSeries::left(vec![E2, ONE, E1 + E3], 100.0);
        let unit = ImaginaryUnit::e3();
        let (a1, b1) = f.alpha_beta(0.8, 1.1, &unit).unwrap();
        let (a2, b2) = f.alpha_beta(0.8, -1.1, &unit).unwrap();
        assert!((a1 - a2).norm() < 1e-13, "alpha even");
        assert!((b1 + b2).norm() < 1e-13, "beta odd");
    }

    #[test]
    fn linear_factor_inverse_cases() {
        let inv = linear_factor_inverse(ZERO, Side::Left);
        let q = Quaternion::new(1.0, 2.0, 0.0, -1.0);
        assert!((inv.evaluate(&q).unwrap() - q.inverse().unwrap()).norm() < 1e-15);

        let inv = linear_factor_inverse(real(1.0), Side::Left);
        assert_eq!(inv.evaluate(&real(2.0)).unwrap(), ONE);

        let inv = linear_factor_inverse(E1, Side::Left);
        assert!(matches!(inv.evaluate(&E2), Err(Error::OnSphere)));
    }

    #[test]
    fn linear_factor_inverse_reduces_in_slice() {
        let unit = ImaginaryUnit::e2();
        let j = unit.quaternion();
        let s = real(0.5) + j * 1.5;
        let q = real(-1.0) + j * 0.25;
        for side in [Side::Left, Side::Right] {
            let inv = linear_factor_inverse(s, side).evaluate(&q).unwrap();
            let classical = (q - s).inverse().unwrap();
            assert!((inv - classical).norm() < 1e-14);
        }
    }

    #[test]
    fn star_inverse_of_linear_factor_is_one() {
        // (q−s) ⋆ (q−s)^{−⋆} = 1, with the product formed pointwise from the
        // α/β representation in the slice of q.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let s = sampling::gaussian_quaternion(&mut rng);
            let q = sampling::gaussian_quaternion(&mut rng);
            if sphere_distance(q.class(), s.class()) < 1e-2 {
                continue;
            }
            let (u, v, unit) = crate::quat::slice_decompose(&q);
            let unit = unit.unwrap_or_else(ImaginaryUnit::e1);
            let j = unit.quaternion();
            let plus = real(u) + j * v;
            let minus = real(u) - j * v;
            let inv = linear_factor_inverse(s, Side::Left);
            let prod = pointwise_star_left(
                plus - s,
                minus - s,
                inv.evaluate(&plus).unwrap(),
                inv.evaluate(&minus).unwrap(),
                &unit,
            );
            assert!(
                (prod - ONE).norm() < 1e-12,
                "residual {}",
                (prod - ONE).norm()
            );
        }
    }

    #[test]
    fn variable_exchange_examples() {
        assert_eq!(
            verify_variable_exchange(&real(2.0), &real(3.0)).unwrap(),
            0.0
        );
        let r = verify_variable_exchange(&(ONE + E1), &(E2 * 2.0)).unwrap();
        assert!(r < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let q = sampling::gaussian_quaternion(&mut rng);
            let s = sampling::gaussian_quaternion(&mut rng);
            if sphere_distance(q.class(), s.class()) < 1e-3 {
                continue;
            }
            assert!(verify_variable_exchange(&q, &s).unwrap() < 1e-12);
        }
        assert!(matches!(
            verify_variable_exchange(&E2, &E1),
            Err(Error::OnSphere)
        ));
    }

    #[test]
    fn serde_shape() {
        let f = SliceSeries::left(vec![ONE, E1], 2.5);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"side":"left","radius":2.5,"coefficients":[[1.0,0.0,0.0,0.0],[0.0,1.0,0.0,0.0]]}"#
        );
        let back: SliceSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    fn small_int_quat() -> impl Strategy<Value = Quaternion> {
        let c = -3i32..=3;
        (c.clone(), c.clone(), c.clone(), c)
            .prop_map(|(a, b, c, d)| Quaternion::new(a as f64, b as f64, c as f64, d as f64))
    }

    fn small_series(side: Side) -> impl Strategy<Value = SliceSeries> {
        proptest::collection::vec(small_int_quat(), 1..5).prop_map(move |c| SliceSeries {
            side,
            radius: f64::INFINITY,
            coefficients: c,
        })
    }

    proptest! {
        // Integer coefficients keep the f64 convolution arithmetic exact, so
        // associativity can be asserted coefficientwise.
        #[test]
        fn star_associativity_left(
            f in small_series(Side::Left),
            g in small_series(Side::Left),
            h in small_series(Side::Left),
        ) {
            let a = f.star_multiply(&g).unwrap().star_multiply(&h).unwrap();
            let b = f.star_multiply(&g.star_multiply(&h).unwrap()).unwrap();
            prop_assert_eq!(a.coefficients(), b.coefficients());
        }

        #[test]
        fn star_associativity_right(
            f in small_series(Side::Right),
            g in small_series(Side::Right),
            h in small_series(Side::Right),
        ) {
            let a = f.star_multiply(&g).unwrap().star_multiply(&h).unwrap();
            let b = f.star_multiply(&g.star_multiply(&h).unwrap()).unwrap();
            prop_assert_eq!(a.coefficients(), b.coefficients());
        }

        // A real-coefficient series read as a left and as a right series
        // agrees at every quaternion.
        #[test]
        fn intrinsic_in_left_and_right(
            coeffs in proptest::collection::vec(-3.0..3.0f64, 1..6),
            comps in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        ) {
            let left = SliceSeries::intrinsic(&coeffs, f64::INFINITY);
            let right = SliceSeries {
                side: Side::Right,
                radius: f64::INFINITY,
                coefficients: left.coefficients().to_vec(),
            };
            let q = Quaternion::new(comps.0, comps.1, comps.2, comps.3);
            let l = left.evaluate(&q).unwrap();
            let r = right.evaluate(&q).unwrap();
            prop_assert!((l - r).norm() <= 1e-14 * (1.0 + l.norm()));
        }
    }
}
