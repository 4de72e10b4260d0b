//! The S-spectrum and its companions: pseudo-resolvent, left and right
//! S-resolvent operators, the S-resolvent equation, spectral radius and the
//! resolvent bound for normal operators.
//!
//! A quaternion `s` belongs to the S-spectrum of `T` when the second-order
//! pencil `T² − 2 Re(s) T + |s|² 𝓘` is not invertible; the set is axially
//! symmetric, so it is reported as canonical spheres `(u, v)` with
//! multiplicities. At finite dimension the S-spectrum, its approximate-point
//! part and the point part all coincide, and the full S-spectrum (spectrum
//! plus holes) is the spectrum itself: finite point sets bound no holes.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qmat::QMatrix;
use crate::quat::{sphere_distance, Quaternion, SpherePoint};

/// One eigen-sphere `[u + Jv]` with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralSphere {
    pub point: SpherePoint,
    pub multiplicity: usize,
}

impl Serialize for SpectralSphere {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SpectralSphere", 3)?;
        st.serialize_field("u", &self.point.u)?;
        st.serialize_field("v", &self.point.v)?;
        st.serialize_field("mult", &self.multiplicity)?;
        st.end()
    }
}

/// The S-spectrum as a sorted list of spheres; multiplicities sum to `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    spheres: Vec<SpectralSphere>,
}

impl Serialize for SpectrumResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry("spheres", &self.spheres)?;
        map.end()
    }
}

impl SpectrumResult {
    pub fn spheres(&self) -> &[SpectralSphere] {
        &self.spheres
    }

    pub fn points(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        self.spheres.iter().map(|s| s.point)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.spheres.iter().map(|s| s.multiplicity).sum()
    }

    /// Distance from the class `[p]` to the spectrum.
    pub fn min_distance(&self, p: SpherePoint) -> f64 {
        self.spheres
            .iter()
            .map(|s| sphere_distance(s.point, p))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |s|` over the spectrum.
    pub fn max_modulus(&self) -> f64 {
        self.spheres
            .iter()
            .map(|s| s.point.modulus())
            .fold(0.0, f64::max)
    }

    /// `max_{a ∈ self} min_{b ∈ other} |a − b|`; zero when `self` is empty.
    pub fn directed_hausdorff(&self, other: &SpectrumResult) -> f64 {
        self.spheres
            .iter()
            .map(|s| other.min_distance(s.point))
            .fold(0.0, f64::max)
    }

    pub fn hausdorff(&self, other: &SpectrumResult) -> f64 {
        self.directed_hausdorff(other)
            .max(other.directed_hausdorff(self))
    }

    /// Builds a result from explicit spheres (used by mapped spectra).
    pub fn from_spheres(mut spheres: Vec<SpectralSphere>) -> Self {
        spheres.sort_by(|a, b| {
            (a.point.u, a.point.v)
                .partial_cmp(&(b.point.u, b.point.v))
                .unwrap()
        });
        SpectrumResult { spheres }
    }

    /// The full S-spectrum `η(σ_S(T))`: for finite point sets this is the
    /// identity map, since they have no bounded complement components.
    pub fn full_s_spectrum(&self) -> &SpectrumResult {
        self
    }
}

/// `T² − 2 Re(s) T + |s|² 𝓘`.
pub fn pencil(t: &QMatrix, s: &Quaternion) -> QMatrix {
    let n = t.n();
    t.mul(t)
        .sub(&t.scale(2.0 * s.re()))
        .add(&QMatrix::identity(n).scale(s.norm_sqr()))
}

/// Invertibility threshold for the pencil: membership in the S-resolvent set
/// requires the smallest singular value to exceed `1e-10 (1 + ‖T‖)²`.
pub fn resolvent_threshold(t_norm: f64) -> f64 {
    1e-10 * (1.0 + t_norm) * (1.0 + t_norm)
}

/// Smallest singular value of the pencil at `s`.
pub fn pencil_smallest_singular_value(t: &QMatrix, s: &Quaternion) -> Result<f64> {
    linalg::smallest_singular_value(&pencil(t, s))
}

/// Pencil-based membership test for `s ∈ ρ_S(T)`; robust to how nearby
/// eigenvalues were clustered.
pub fn in_s_resolvent_set(t: &QMatrix, s: &Quaternion) -> Result<bool> {
    match pseudo_resolvent(t, s) {
        Ok(_) => Ok(true),
        Err(Error::OnSpectrum) => Ok(false),
        Err(e) => Err(e),
    }
}

/// The S-spectrum of `T`, computed from the eigenvalues of the complex
/// adjoint `χ(T)`, which enumerate the right-eigenvalue spheres.
///
/// Eigenvalues within `1e-8 (1 + ‖T‖)` of each other in `(u, v)` coordinates
/// merge into one sphere; each sphere receives half the count of its cluster
/// (eigenvalues come in conjugate pairs). Multiplicities sum to `n`.
pub fn s_spectrum(t: &QMatrix) -> Result<SpectrumResult> {
    let n = t.n();
    if n == 0 {
        return Ok(SpectrumResult {
            spheres: Vec::new(),
        });
    }
    let eigs = t.complex_adjoint().eigenvalues()?;
    let scale = 1.0 + t.operator_norm();
    let tol = 1e-8 * scale;

    let pts: Vec<(f64, f64)> = eigs.iter().map(|z| (z.re, z.im.abs())).collect();
    // Single-linkage clustering via union-find; 2n points at most.
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate().skip(i + 1) {
            if (a.0 - b.0).hypot(a.1 - b.1) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: std::collections::BTreeMap<usize, (f64, f64, usize)> = Default::default();
    for (i, pt) in pts.iter().enumerate() {
        let r = find(&mut parent, i);
        let e = clusters.entry(r).or_insert((0.0, 0.0, 0));
        e.0 += pt.0;
        e.1 += pt.1;
        e.2 += 1;
    }

    let mut raw: Vec<(SpherePoint, usize)> = clusters
        .values()
        .map(|&(su, sv, c)| {
            let u = su / c as f64;
            let mut v = sv / c as f64;
            if v < 1e-12 * scale {
                v = 0.0;
            }
            (SpherePoint::new(u, v), c)
        })
        .collect();
    raw.sort_by(|a, b| (a.0.u, a.0.v).partial_cmp(&(b.0.u, b.0.v)).unwrap());

    // Conjugate pairing: each sphere owns half its cluster. Odd clusters can
    // only appear when the clustering split a pair; repair to keep Σ mult = n.
    let mut spheres: Vec<SpectralSphere> = raw
        .iter()
        .map(|&(point, c)| SpectralSphere {
            point,
            multiplicity: c / 2,
        })
        .collect();
    let mut deficit = n as i64 - spheres.iter().map(|s| s.multiplicity as i64).sum::<i64>();
    if deficit != 0 {
        for (i, &(_, c)) in raw.iter().enumerate() {
            if deficit == 0 {
                break;
            }
            if c % 2 == 1 {
                spheres[i].multiplicity += 1;
                deficit -= 1;
            }
        }
        // Any remaining mismatch is absorbed by the largest cluster.
        if deficit != 0 {
            if let Some(biggest) = spheres.iter_mut().max_by_key(|s| s.multiplicity) {
                biggest.multiplicity = (biggest.multiplicity as i64 + deficit).max(0) as usize;
            }
        }
    }
    spheres.retain(|s| s.multiplicity > 0);
    Ok(SpectrumResult { spheres })
}

/// The pseudo-resolvent `Q_s(T) = (T² − 2 Re(s) T + |s|² 𝓘)⁻¹`.
#[derive(Clone, Debug)]
pub struct PseudoResolvent {
    pub s: Quaternion,
    pub value: QMatrix,
}

pub fn pseudo_resolvent(t: &QMatrix, s: &Quaternion) -> Result<PseudoResolvent> {
    let p = pencil(t, s);
    let floor = resolvent_threshold(t.operator_norm());
    if linalg::smallest_singular_value(&p)? <= floor {
        return Err(Error::OnSpectrum);
    }
    // The Gram route above cannot resolve singular values below roughly
    // sqrt(eps)·‖P‖; re-test through the inverse, whose largest singular
    // value is computed accurately.
    let value = linalg::inverse(&p).map_err(|_| Error::OnSpectrum)?;
    if 1.0 / value.operator_norm() <= floor {
        return Err(Error::OnSpectrum);
    }
    Ok(PseudoResolvent { s: *s, value })
}

/// Left S-resolvent `S_L⁻¹(s, T) = −Q_s(T)(T − s̄ 𝓘)`.
pub fn s_resolvent_left(t: &QMatrix, s: &Quaternion) -> Result<QMatrix> {
    let q = pseudo_resolvent(t, s)?;
    let shifted = t.sub(&QMatrix::identity(t.n()).left_scaled(s.conj()));
    Ok(q.value.mul(&shifted).neg())
}

/// Right S-resolvent `S_R⁻¹(s, T) = −(T − s̄ 𝓘) Q_s(T)`.
pub fn s_resolvent_right(t: &QMatrix, s: &Quaternion) -> Result<QMatrix> {
    let q = pseudo_resolvent(t, s)?;
    let shifted = t.sub(&QMatrix::identity(t.n()).left_scaled(s.conj()));
    Ok(shifted.mul(&q.value).neg())
}

/// Residuals of the two forms of the S-resolvent equation
///
/// ```text
/// S_R⁻¹(s)S_L⁻¹(p) = [(S_R⁻¹(s) − S_L⁻¹(p))p − s̄(S_R⁻¹(s) − S_L⁻¹(p))] (p² − 2Re(s)p + |s|²)⁻¹
///                  = (s² − 2Re(p)s + |p|²)⁻¹ [(S_R⁻¹(s) − S_L⁻¹(p))p̄ − s(S_R⁻¹(s) − S_L⁻¹(p))]
/// ```
///
/// measured in the operator norm. Both brackets carry the same difference
/// `S_R⁻¹(s) − S_L⁻¹(p)`; the mirrored form swaps `p ↔ p̄`, `s̄ ↔ s` and
/// moves the scalar factor to the left.
pub fn verify_s_resolvent_equation(
    t: &QMatrix,
    s: &Quaternion,
    p: &Quaternion,
) -> Result<(f64, f64)> {
    if sphere_distance(s.class(), p.class()) <= 1e-12 * (1.0 + s.norm() + p.norm()) {
        return Err(Error::SameSphere);
    }
    let x = s_resolvent_right(t, s)?;
    let y = s_resolvent_left(t, p)?;
    let lhs = x.mul(&y);

    let c1 = *p * *p - p.scale(2.0 * s.re()) + Quaternion::from_real(s.norm_sqr());
    let c1_inv = c1.inverse().ok_or(Error::SameSphere)?;
    let d = x.sub(&y);
    let rhs1 = d
        .right_scaled(*p)
        .sub(&d.left_scaled(s.conj()))
        .right_scaled(c1_inv);

    let c2 = *s * *s - s.scale(2.0 * p.re()) + Quaternion::from_real(p.norm_sqr());
    let c2_inv = c2.inverse().ok_or(Error::SameSphere)?;
    let rhs2 = d
        .right_scaled(p.conj())
        .sub(&d.left_scaled(*s))
        .left_scaled(c2_inv);

    Ok((
        lhs.sub(&rhs1).operator_norm(),
        lhs.sub(&rhs2).operator_norm(),
    ))
}

/// Spectral radius data: the exact value `max |σ_S(T)|` and the Gelfand
/// sequence `‖T^{2^k}‖^{1/2^k}` computed by repeated squaring with
/// renormalization (powers up to `max_power`).
#[derive(Clone, Debug)]
pub struct SpectralRadius {
    pub exact: f64,
    pub sequence: Vec<f64>,
}

pub fn spectral_radius(t: &QMatrix, max_power: u32) -> Result<SpectralRadius> {
    let max_power = max_power.max(1);
    let spec = s_spectrum(t)?;
    let exact = spec.max_modulus();
    let norm = t.operator_norm();
    let mut sequence = vec![norm];
    if norm > 0.0 {
        let mut p = t.scale(1.0 / norm);
        let mut r = norm;
        let mut power: u64 = 1;
        while power * 2 <= max_power as u64 {
            p = p.mul(&p);
            power *= 2;
            let a = p.operator_norm();
            if a == 0.0 {
                r = 0.0;
                sequence.push(0.0);
                continue;
            }
            r *= a.powf(1.0 / power as f64);
            sequence.push(r);
            p = p.scale(1.0 / a);
        }
    } else {
        let mut power: u64 = 1;
        while power * 2 <= max_power as u64 {
            power *= 2;
            sequence.push(0.0);
        }
    }
    Ok(SpectralRadius { exact, sequence })
}

/// For normal `T`, `‖Q_s(T)‖ ≤ 1 / dist(σ_S(T), [s])²`. Returns
/// `(‖Q_s(T)‖, 1/dist²)`.
pub fn normal_resolvent_bound(t: &QMatrix, s: &Quaternion) -> Result<(f64, f64)> {
    if !t.is_normal() {
        return Err(Error::NotNormal);
    }
    let q = pseudo_resolvent(t, s)?;
    let lhs = q.value.operator_norm();
    let dist = s_spectrum(t)?.min_distance(s.class());
    Ok((lhs, 1.0 / (dist * dist)))
}

/// Splits a right slice hyperholomorphic operator function `F(u + Jv)` into
/// its even/odd parts `F = α + βJ`; used by the regularity checks.
pub fn resolvent_alpha_beta(
    t: &QMatrix,
    u: f64,
    v: f64,
    unit: &crate::quat::ImaginaryUnit,
) -> Result<(QMatrix, QMatrix)> {
    let j = unit.quaternion();
    let plus = s_resolvent_left(t, &(Quaternion::from_real(u) + j * v))?;
    let minus = s_resolvent_left(t, &(Quaternion::from_real(u) - j * v))?;
    let alpha = plus.add(&minus).scale(0.5);
    let beta = plus.sub(&minus).right_scaled(j).scale(-0.5);
    Ok((alpha, beta))
}
