//! Quaternion scalars, the sphere of imaginary units, slice decomposition and
//! distances between axially symmetric equivalence classes.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for "purely imaginary" and "unit modulus" checks.
pub const UNIT_TOL: f64 = 1e-12;

/// A quaternion `x0 + e1 x1 + e2 x2 + e3 x3` over `f64`.
///
/// Multiplication follows the Hamilton table `e1 e2 = -e2 e1 = e3` (and
/// cyclic), so `|pq| = |p||q|` and conjugation reverses products.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
pub const E1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
pub const E2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
pub const E3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

impl Quaternion {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion { x0, x1, x2, x3 }
    }

    pub const fn from_real(x0: f64) -> Self {
        Quaternion::new(x0, 0.0, 0.0, 0.0)
    }

    /// Real part `Re(q) = x0`.
    pub fn re(&self) -> f64 {
        self.x0
    }

    /// Imaginary part `e1 x1 + e2 x2 + e3 x3` as a quaternion.
    pub fn im(&self) -> Quaternion {
        Quaternion::new(0.0, self.x1, self.x2, self.x3)
    }

    /// `|Im(q)|`.
    pub fn im_norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    /// Multiplicative inverse `q̄ / |q|²`; `None` for the zero quaternion.
    pub fn inverse(&self) -> Option<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            None
        } else {
            Some(self.conj() / n2)
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.im_norm() <= tol
    }

    /// The equivalence class `[q]` as a canonical point `(Re q, |Im q|)`.
    pub fn class(&self) -> SpherePoint {
        SpherePoint::new(self.re(), self.im_norm())
    }

    pub fn scale(&self, t: f64) -> Quaternion {
        Quaternion::new(self.x0 * t, self.x1 * t, self.x2 * t, self.x3 * t)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.x0 + r.x0,
            self.x1 + r.x1,
            self.x2 + r.x2,
            self.x3 + r.x3,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, r: Quaternion) {
        *self = *self + r;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.x0 - r.x0,
            self.x1 - r.x1,
            self.x2 - r.x2,
            self.x3 - r.x3,
        )
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, r: Quaternion) {
        *self = *self - r;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        let (p0, p1, p2, p3) = (self.x0, self.x1, self.x2, self.x3);
        let (q0, q1, q2, q3) = (r.x0, r.x1, r.x2, r.x3);
        Quaternion::new(
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, t: f64) -> Quaternion {
        self.scale(t)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, t: f64) -> Quaternion {
        self.scale(1.0 / t)
    }
}

impl From<f64> for Quaternion {
    fn from(x: f64) -> Quaternion {
        Quaternion::from_real(x)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:+}e1{:+}e2{:+}e3",
            self.x0, self.x1, self.x2, self.x3
        )
    }
}

// Quaternions serialize as the 4-array [x0, x1, x2, x3].
impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x0, self.x1, self.x2, self.x3].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [x0, x1, x2, x3] = <[f64; 4]>::deserialize(deserializer)?;
        Ok(Quaternion::new(x0, x1, x2, x3))
    }
}

/// A unit purely imaginary quaternion, i.e. a point of the sphere `𝕊`.
///
/// Every `J` of this type satisfies `J² = -1` up to [`UNIT_TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImaginaryUnit(Quaternion);

impl ImaginaryUnit {
    pub fn e1() -> Self {
        ImaginaryUnit(E1)
    }

    pub fn e2() -> Self {
        ImaginaryUnit(E2)
    }

    pub fn e3() -> Self {
        ImaginaryUnit(E3)
    }

    /// Validates `|Re q| ≤ tol` and `||q| − 1| ≤ tol` with `tol = `[`UNIT_TOL`].
    pub fn try_new(q: Quaternion) -> Result<Self> {
        if q.x0.abs() <= UNIT_TOL && (q.norm() - 1.0).abs() <= UNIT_TOL {
            Ok(ImaginaryUnit(q))
        } else {
            Err(Error::NotImaginaryUnit)
        }
    }

    /// Builds the unit along the imaginary direction `(x1, x2, x3)`,
    /// normalizing its length.
    pub fn from_vector(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let n = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotImaginaryUnit);
        }
        Ok(ImaginaryUnit(Quaternion::new(0.0, x1 / n, x2 / n, x3 / n)))
    }

    pub fn quaternion(&self) -> Quaternion {
        self.0
    }
}

impl From<ImaginaryUnit> for Quaternion {
    fn from(j: ImaginaryUnit) -> Quaternion {
        j.0
    }
}

/// Canonical representative `(u, v)`, `v ≥ 0`, of the 2-sphere
/// `[u + Jv] = {u + Jv : J ∈ 𝕊}`.
///
/// Real quaternions give `v = 0`; the conjugate representative `u - Jv` maps
/// to the same point, matching the even/odd symmetry of slice functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub u: f64,
    pub v: f64,
}

impl SpherePoint {
    /// Canonicalizes to `v ≥ 0`.
    pub fn new(u: f64, v: f64) -> Self {
        SpherePoint { u, v: v.abs() }
    }

    pub fn from_quaternion(q: &Quaternion) -> Self {
        q.class()
    }

    /// The representative `u + Jv` in the slice plane of `J`.
    pub fn representative(&self, unit: &ImaginaryUnit) -> Quaternion {
        Quaternion::from_real(self.u) + unit.quaternion() * self.v
    }

    /// `|s|` for any (hence every) representative `s` of the class.
    pub fn modulus(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// Distance `inf {|s - t| : s ∈ [a], t ∈ [b]}` between equivalence classes.
///
/// For canonical representatives the infimum is attained at a common slice
/// unit, giving `sqrt((u_a - u_b)² + (v_a - v_b)²)`.
pub fn sphere_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    (a.u - b.u).hypot(a.v - b.v)
}

/// Splits `q = u + Jv` with `v = |Im q| ≥ 0`.
///
/// Real quaternions carry no preferred unit, so `J` is `None` for them and
/// callers must handle that branch explicitly.
pub fn slice_decompose(q: &Quaternion) -> (f64, f64, Option<ImaginaryUnit>) {
    let v = q.im_norm();
    if v == 0.0 {
        return (q.re(), 0.0, None);
    }
    let im = q.im();
    let unit = ImaginaryUnit(im / v);
    (q.re(), v, Some(unit))
}
