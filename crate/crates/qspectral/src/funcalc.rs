//! S-functional calculus by quadrature of the slice contour integral
//!
//! ```text
//! f(T) = (1/2π) ∫_{∂(U ∩ ℂ_J)} S_L⁻¹(s, T) ds_J f(s)        (left series)
//! f(T) = (1/2π) ∫_{∂(U ∩ ℂ_J)} f(s) ds_J S_R⁻¹(s, T)        (right series)
//! ```
//!
//! together with Riesz-type projectors and the spectral mapping check for
//! intrinsic functions of normal operators.
//!
//! Contours are unions of circles in one slice plane `ℂ_J`. A circle around
//! a non-real center automatically carries its mirror image below the real
//! axis, since the boundary of an axially symmetric domain intersected with
//! `ℂ_J` is symmetric; circles centered on the real axis are their own
//! mirror. Any circle of radius larger than `‖T‖` is admissible, so polygon
//! boundaries are never needed for matrices, and the trapezoid rule on
//! circles converges spectrally fast.

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{sphere_distance, ImaginaryUnit, Quaternion, SpherePoint};
use crate::slicefun::{Side, SliceSeries};
use crate::spectrum::{self, SpectrumResult};

/// Default number of quadrature nodes per circle.
pub const DEFAULT_NODES: usize = 512;

/// Margin factor: contours must keep every spectral sphere at distance
/// `0.1 (1 + ‖T‖)` from the curve.
pub fn contour_margin(t_norm: f64) -> f64 {
    0.1 * (1.0 + t_norm)
}

/// One circle of the contour, described in canonical `(u, v)` coordinates of
/// the slice half-plane (`v ≥ 0`).
#[derive(Clone, Copy, Debug)]
pub struct ContourCircle {
    pub center: SpherePoint,
    pub radius: f64,
}

impl ContourCircle {
    pub fn new(center_u: f64, center_v: f64, radius: f64) -> Self {
        ContourCircle {
            center: SpherePoint::new(center_u, center_v),
            radius,
        }
    }

    fn contains(&self, p: SpherePoint) -> bool {
        sphere_distance(self.center, p) < self.radius
    }
}

/// A quadrature-discretized closed contour in one slice plane.
#[derive(Clone, Debug)]
pub struct SliceContour {
    unit: ImaginaryUnit,
    circles: Vec<ContourCircle>,
    nodes_per_circle: usize,
    /// `(point, weight)` pairs; the weight is `γ'(t)(−J)Δt` so that the
    /// quadrature sum realizes `∫ … ds_J …`.
    nodes: Vec<(Quaternion, Quaternion)>,
}

impl SliceContour {
    /// Builds the contour from circles. A circle with a non-real center must
    /// stay strictly inside the open upper half-plane (`radius < v`); its
    /// mirror circle is generated automatically.
    pub fn from_circles(
        unit: ImaginaryUnit,
        circles: &[ContourCircle],
        nodes_per_circle: usize,
    ) -> Result<Self> {
        if circles.is_empty() || nodes_per_circle < 8 {
            return Err(Error::ContourNotAdmissible);
        }
        for c in circles {
            if !(c.radius > 0.0) || (c.center.v > 0.0 && c.radius >= c.center.v) {
                return Err(Error::ContourNotAdmissible);
            }
        }
        let j = unit.quaternion();
        let mut nodes = Vec::new();
        for c in circles {
            let mut centers = vec![(c.center.u, c.center.v)];
            if c.center.v > 0.0 {
                centers.push((c.center.u, -c.center.v));
            }
            let dt = std::f64::consts::TAU / nodes_per_circle as f64;
            for (cu, cv) in centers {
                for k in 0..nodes_per_circle {
                    let theta = dt * k as f64;
                    let (sin, cos) = theta.sin_cos();
                    let point =
                        Quaternion::from_real(cu + c.radius * cos) + j * (cv + c.radius * sin);
                    // γ'(θ)(−J)Δθ = r e^{Jθ} Δθ
                    let weight = (Quaternion::from_real(cos) + j * sin).scale(c.radius * dt);
                    nodes.push((point, weight));
                }
            }
        }
        Ok(SliceContour {
            unit,
            circles: circles.to_vec(),
            nodes_per_circle,
            nodes,
        })
    }

    /// A single origin-centered circle of radius `2‖T‖ + 1`, which encloses
    /// the whole S-spectrum of `T` with a comfortable margin.
    pub fn enclosing(t: &QMatrix, unit: ImaginaryUnit, nodes_per_circle: usize) -> Result<Self> {
        let r = 2.0 * t.operator_norm() + 1.0;
        SliceContour::from_circles(unit, &[ContourCircle::new(0.0, 0.0, r)], nodes_per_circle)
    }

    pub fn unit(&self) -> &ImaginaryUnit {
        &self.unit
    }

    pub fn circles(&self) -> &[ContourCircle] {
        &self.circles
    }

    pub fn nodes(&self) -> &[(Quaternion, Quaternion)] {
        &self.nodes
    }

    pub fn nodes_per_circle(&self) -> usize {
        self.nodes_per_circle
    }

    /// Largest `|s|` over the quadrature nodes.
    pub fn max_modulus(&self) -> f64 {
        self.nodes.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max)
    }

    /// True when the canonical point of `[p]` lies inside some circle.
    pub fn encloses(&self, p: SpherePoint) -> bool {
        self.circles.iter().any(|c| c.contains(p))
    }

    /// Total multiplicity of the spectral spheres enclosed by the contour.
    pub fn enclosed_multiplicity(&self, spec: &SpectrumResult) -> usize {
        spec.spheres()
            .iter()
            .filter(|s| self.encloses(s.point))
            .map(|s| s.multiplicity)
            .sum()
    }

    /// Every spectral sphere must keep its distance from the curve: on the
    /// curve is `OnSpectrum`, inside the margin is `ContourNotAdmissible`.
    fn check_margin(&self, spec: &SpectrumResult, t_norm: f64) -> Result<()> {
        let margin = contour_margin(t_norm);
        for sphere in spec.spheres() {
            let mut min = f64::INFINITY;
            for (p, _) in &self.nodes {
                min = min.min(sphere_distance(p.class(), sphere.point));
            }
            if min <= 1e-12 * (1.0 + t_norm) {
                return Err(Error::OnSpectrum);
            }
            if min < margin {
                return Err(Error::ContourNotAdmissible);
            }
        }
        Ok(())
    }

    /// T-admissibility for the full calculus: margin plus total enclosure.
    fn check_admissible(&self, spec: &SpectrumResult, t_norm: f64) -> Result<()> {
        self.check_margin(spec, t_norm)?;
        if spec.spheres().iter().all(|s| self.encloses(s.point)) {
            Ok(())
        } else {
            Err(Error::ContourNotAdmissible)
        }
    }
}

/// Quadrature sum of `(1/2π) Σ S_L⁻¹(s_k) w_k f(s_k)` or its right-sided
/// mirror, in deterministic node order.
fn quadrature(
    t: &QMatrix,
    contour: &SliceContour,
    f: impl Fn(&Quaternion) -> Result<Quaternion>,
    side: Side,
) -> Result<QMatrix> {
    let n = t.n();
    let mut acc = QMatrix::zeros(n);
    for (point, weight) in contour.nodes() {
        let fval = f(point)?;
        match side {
            Side::Left => {
                let res = spectrum::s_resolvent_left(t, point)?;
                acc = acc.add(&res.right_scaled(*weight * fval));
            }
            Side::Right => {
                let res = spectrum::s_resolvent_right(t, point)?;
                acc = acc.add(&res.left_scaled(fval * *weight));
            }
        }
    }
    Ok(acc.scale(1.0 / std::f64::consts::TAU))
}

/// `f(T)` for a series `f` whose ball contains the contour, which in turn
/// must be admissible for `T`. For polynomials the result matches the direct
/// operator polynomial up to quadrature accuracy.
pub fn functional_calculus(
    t: &QMatrix,
    f: &SliceSeries,
    contour: &SliceContour,
) -> Result<QMatrix> {
    let t_norm = t.operator_norm();
    let spec = spectrum::s_spectrum(t)?;
    contour.check_admissible(&spec, t_norm)?;
    if contour.max_modulus() >= f.radius() {
        return Err(Error::OutOfBall);
    }
    quadrature(t, contour, |s| f.evaluate(s), f.side())
}

/// Riesz-type projector: the calculus applied to `f ≡ 1` on a contour that
/// may enclose only part of the spectrum (the rest must stay outside with
/// the same margin).
pub fn riesz_projector(t: &QMatrix, contour: &SliceContour) -> Result<QMatrix> {
    let t_norm = t.operator_norm();
    let spec = spectrum::s_spectrum(t)?;
    contour.check_margin(&spec, t_norm)?;
    quadrature(t, contour, |_| Ok(crate::quat::ONE), Side::Left)
}

/// Hausdorff distance between `σ_S(f(T))` and `f(σ_S(T))` for an intrinsic
/// series `f` and a normal operator `T`; the spectral mapping theorem makes
/// it vanish. `f(T)` is evaluated as the direct operator polynomial and
/// `f([s])` by complex arithmetic in a slice.
pub fn spectral_mapping_check(t: &QMatrix, f: &SliceSeries) -> Result<f64> {
    if !t.is_normal() {
        return Err(Error::NotNormal);
    }
    if !f.is_intrinsic() {
        return Err(Error::NotIntrinsic);
    }
    let ft = f.direct_polynomial(t);
    let sigma_ft = spectrum::s_spectrum(&ft)?;
    let sigma_t = spectrum::s_spectrum(t)?;
    let mapped: Vec<crate::spectrum::SpectralSphere> = sigma_t
        .spheres()
        .iter()
        .map(|s| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for c in f.coefficients().iter().rev() {
                let nre = s.point.u * re - s.point.v * im + c.x0;
                let nim = s.point.u * im + s.point.v * re;
                re = nre;
                im = nim;
            }
            crate::spectrum::SpectralSphere {
                point: SpherePoint::new(re, im),
                multiplicity: s.multiplicity,
            }
        })
        .collect();
    let mapped = SpectrumResult::from_spheres(mapped);
    Ok(sigma_ft.hausdorff(&mapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{E1, ONE, ZERO};
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(x: f64) -> Quaternion {
        Quaternion::from_real(x)
    }

    #[test]
    fn constant_function_gives_identity() {
        let t = QMatrix::diagonal(&[real(1.0), real(2.0)]);
        let contour = SliceContour::enclosing(&t, ImaginaryUnit::e1(), 256).unwrap();
        let f = SliceSeries::intrinsic(&[1.0], f64::INFINITY);
        let ft = functional_calculus(&t, &f, &contour).unwrap();
        assert!(ft.sub(&QMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn identity_function_reproduces_t() {
        let t = QMatrix::diagonal(&[real(1.0), real(2.0)]);
        let contour = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(0.0, 0.0, 5.0)],
            256,
        )
        .unwrap();
        let f = SliceSeries::intrinsic(&[0.0, 1.0], f64::INFINITY);
        let ft = functional_calculus(&t, &f, &contour).unwrap();
        assert!(ft.sub(&t).max_abs() < 1e-12);
    }

    #[test]
    fn square_on_imaginary_diagonal() {
        // f(q) = q², T = diag(e1): f(T) = T² = −I.
        let t = QMatrix::diagonal(&[E1]);
        let contour = SliceContour::enclosing(&t, ImaginaryUnit::e2(), 512).unwrap();
        let f = SliceSeries::intrinsic(&[0.0, 0.0, 1.0], f64::INFINITY);
        let ft = functional_calculus(&t, &f, &contour).unwrap();
        assert!(ft.add(&QMatrix::identity(1)).max_abs() < 1e-11);
        assert!(ft.sub(&t.mul(&t)).max_abs() < 1e-11);
    }

    #[test]
    fn polynomial_compatibility_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let t = sampling::gaussian_matrix(&mut rng, 4);
            let coeffs: Vec<Quaternion> = (0..5)
                .map(|_| sampling::gaussian_quaternion(&mut rng))
                .collect();
            for side in [Side::Left, Side::Right] {
                let f = match side {
                    Side::Left => SliceSeries::left(coeffs.clone(), f64::INFINITY),
                    Side::Right => SliceSeries::right(coeffs.clone(), f64::INFINITY),
                };
                let contour =
                    SliceContour::enclosing(&t, ImaginaryUnit::e1(), DEFAULT_NODES).unwrap();
                let via_contour = functional_calculus(&t, &f, &contour).unwrap();
                let direct = f.direct_polynomial(&t);
                let scale = direct.operator_norm().max(1.0);
                let err = via_contour.sub(&direct).operator_norm();
                assert!(err < 1e-8 * scale, "side {side:?}: {err} vs scale {scale}");
            }
        }
    }

    #[test]
    fn quadrature_converges_in_node_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let t = sampling::gaussian_matrix(&mut rng, 3);
        let f = SliceSeries::intrinsic(&[0.5, -1.0, 0.0, 2.0], f64::INFINITY);
        let c256 = SliceContour::enclosing(&t, ImaginaryUnit::e1(), 256).unwrap();
        let c512 = SliceContour::enclosing(&t, ImaginaryUnit::e1(), 512).unwrap();
        let a = functional_calculus(&t, &f, &c256).unwrap();
        let b = functional_calculus(&t, &f, &c512).unwrap();
        let drift = a.sub(&b).operator_norm();
        assert!(drift < 1e-9 * b.operator_norm().max(1.0), "drift {drift}");
    }

    #[test]
    fn slice_independence_for_intrinsic() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let t = sampling::gaussian_matrix(&mut rng, 3);
        let f = SliceSeries::intrinsic(&[1.0, 0.5, -0.25, 0.0, 1.0], f64::INFINITY);
        let units = [
            ImaginaryUnit::e1(),
            ImaginaryUnit::e2(),
            ImaginaryUnit::from_vector(1.0, 1.0, 1.0).unwrap(),
        ];
        let results: Vec<QMatrix> = units
            .iter()
            .map(|u| {
                let c = SliceContour::enclosing(&t, *u, DEFAULT_NODES).unwrap();
                functional_calculus(&t, &f, &c).unwrap()
            })
            .collect();
        let scale = results[0].operator_norm().max(1.0);
        for r in &results[1..] {
            assert!(results[0].sub(r).operator_norm() < 1e-8 * scale);
        }
    }

    #[test]
    fn homomorphism_on_intrinsic() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let t = sampling::gaussian_matrix(&mut rng, 3);
        let f = SliceSeries::intrinsic(&[0.0, 1.0, 0.5], f64::INFINITY);
        let g = SliceSeries::intrinsic(&[2.0, -1.0], f64::INFINITY);
        let fg = f.star_multiply(&g).unwrap();
        let contour = SliceContour::enclosing(&t, ImaginaryUnit::e1(), DEFAULT_NODES).unwrap();
        let lhs = functional_calculus(&t, &fg, &contour).unwrap();
        let rhs = functional_calculus(&t, &f, &contour)
            .unwrap()
            .mul(&functional_calculus(&t, &g, &contour).unwrap());
        let scale = rhs.operator_norm().max(1.0);
        assert!(lhs.sub(&rhs).operator_norm() < 1e-8 * scale);
    }

    #[test]
    fn riesz_projector_cases() {
        // Full contour → identity; empty contour region → 0.
        let t = QMatrix::diagonal(&[real(1.0), real(5.0)]);
        let full = SliceContour::enclosing(&t, ImaginaryUnit::e1(), 256).unwrap();
        let p = riesz_projector(&t, &full).unwrap();
        assert!(p.sub(&QMatrix::identity(2)).max_abs() < 1e-12);

        let nothing = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(-10.0, 0.0, 1.0)],
            256,
        )
        .unwrap();
        let p = riesz_projector(&t, &nothing).unwrap();
        assert!(p.max_abs() < 1e-12);

        // Circle around the eigenvalue 1 only → diag(1, 0).
        let around_one = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(1.0, 0.0, 1.0)],
            256,
        )
        .unwrap();
        let p = riesz_projector(&t, &around_one).unwrap();
        assert!(p.sub(&QMatrix::diagonal(&[ONE, ZERO])).max_abs() < 1e-10);
        assert_eq!(
            around_one.enclosed_multiplicity(&spectrum::s_spectrum(&t).unwrap()),
            1
        );
    }

    #[test]
    fn riesz_projector_mirrored_pair() {
        // Non-real sphere: the contour is a mirrored pair of circles, and
        // integrating f = 1 around the whole spectrum still gives I.
        let t = QMatrix::diagonal(&[E1 * 2.0, real(5.0)]);
        let both = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[
                ContourCircle::new(0.0, 2.0, 1.0),
                ContourCircle::new(5.0, 0.0, 1.0),
            ],
            512,
        )
        .unwrap();
        let p = riesz_projector(&t, &both).unwrap();
        assert!(
            p.sub(&QMatrix::identity(2)).max_abs() < 1e-10,
            "{}",
            p.sub(&QMatrix::identity(2)).max_abs()
        );

        // Around the sphere [2 e1] only.
        let sphere_only = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(0.0, 2.0, 1.0)],
            512,
        )
        .unwrap();
        let p = riesz_projector(&t, &sphere_only).unwrap();
        assert!(p.sub(&QMatrix::diagonal(&[ONE, ZERO])).max_abs() < 1e-10);
        let q = p.mul(&p).sub(&p).operator_norm();
        assert!(q < 1e-8, "P² − P = {q}");
        let c = p.mul(&t).sub(&t.mul(&p)).operator_norm();
        assert!(c < 1e-8 * t.operator_norm(), "[P,T] = {c}");
    }

    #[test]
    fn projector_commutes_and_is_idempotent_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let spheres = [
            SpherePoint::new(-2.0, 0.5),
            SpherePoint::new(-2.0, 0.5),
            SpherePoint::new(3.0, 1.0),
        ];
        let t = sampling::random_normal_from_spheres(&mut rng, &spheres);
        let contour = SliceContour::from_circles(
            ImaginaryUnit::e3(),
            &[ContourCircle::new(-2.0, 0.5, 0.45)],
            512,
        )
        .unwrap();
        let p = riesz_projector(&t, &contour).unwrap();
        let scale = t.operator_norm();
        assert!(p.mul(&p).sub(&p).operator_norm() < 1e-8);
        assert!(p.mul(&t).sub(&t.mul(&p)).operator_norm() < 1e-8 * scale);
        // Rank equals the enclosed multiplicity (2 here).
        assert!((p.real_trace() - 2.0).abs() < 1e-8);
        // Range of P is T-invariant: (I−P) T P = 0.
        let complement = QMatrix::identity(3).sub(&p);
        assert!(complement.mul(&t).mul(&p).operator_norm() < 1e-7 * scale);
    }

    #[test]
    fn inadmissible_contours_are_rejected() {
        let t = QMatrix::diagonal(&[real(1.0), real(2.0)]);
        // Curve passes through the spectrum region margin.
        let tight = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(1.0, 0.0, 1.0)],
            64,
        )
        .unwrap();
        assert!(matches!(
            riesz_projector(&t, &tight),
            Err(Error::ContourNotAdmissible) | Err(Error::OnSpectrum)
        ));

        // Functional calculus additionally demands enclosure of everything.
        let partial = SliceContour::from_circles(
            ImaginaryUnit::e1(),
            &[ContourCircle::new(1.0, 0.0, 0.5)],
            64,
        )
        .unwrap();
        let f = SliceSeries::intrinsic(&[1.0], f64::INFINITY);
        assert!(matches!(
            functional_calculus(&t, &f, &partial),
            Err(Error::ContourNotAdmissible)
        ));

        // Series ball too small for the contour.
        let contour = SliceContour::enclosing(&t, ImaginaryUnit::e1(), 64).unwrap();
        let tiny = SliceSeries::intrinsic(&[1.0], 1.0);
        assert!(matches!(
            functional_calculus(&t, &tiny, &contour),
            Err(Error::OutOfBall)
        ));

        // Mirrored circle touching the real axis is rejected outright.
        assert!(matches!(
            SliceContour::from_circles(
                ImaginaryUnit::e1(),
                &[ContourCircle::new(0.0, 1.0, 1.0)],
                64
            ),
            Err(Error::ContourNotAdmissible)
        ));
    }

    #[test]
    fn spectral_mapping_examples() {
        let t = QMatrix::diagonal(&[real(1.0), real(2.0)]);
        let ident = SliceSeries::intrinsic(&[0.0, 1.0], f64::INFINITY);
        assert!(spectral_mapping_check(&t, &ident).unwrap() < 1e-10);

        let square = SliceSeries::intrinsic(&[0.0, 0.0, 1.0], f64::INFINITY);
        assert!(spectral_mapping_check(&t, &square).unwrap() < 1e-10);

        // f(q) = q² on diag(e1): σ_S(f(T)) = {[−1]} = f([e1]).
        let t = QMatrix::diagonal(&[E1]);
        assert!(spectral_mapping_check(&t, &square).unwrap() < 1e-10);

        // Guards.
        let mut nn = QMatrix::zeros(2);
        nn[(0, 1)] = ONE;
        assert!(matches!(
            spectral_mapping_check(&nn, &square),
            Err(Error::NotNormal)
        ));
        let not_intrinsic = SliceSeries::left(vec![E1], f64::INFINITY);
        assert!(matches!(
            spectral_mapping_check(&QMatrix::identity(2), &not_intrinsic),
            Err(Error::NotIntrinsic)
        ));
    }
}
