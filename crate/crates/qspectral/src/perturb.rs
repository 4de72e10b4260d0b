//! Experiment harness for normal-plus-Schatten perturbations: pseudo-
//! resolvent growth along non-tangent segments approaching the spectrum,
//! resolvent growth-hypothesis fitting, restriction-to-invariant-subspace
//! spectral inclusion, and Weyl-style perturbation reports.
//!
//! Fitted constants are experiment outputs, never asserted as ground truth;
//! the only assertions are shape constraints (slopes, inclusions) that hold
//! with generous slack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::qmat::QMatrix;
use crate::quat::{Quaternion, SpherePoint, E1};
use crate::sampling;
use crate::spectrum::{self, SpectrumResult};

/// Minimum angle (radians) between a probe segment and the arc tangent.
pub const MIN_PROBE_ANGLE: f64 = 10.0 * std::f64::consts::PI / 180.0;

/// A smooth parametrized curve `t ↦ (u(t), v(t))`, `t ∈ [0, 1]`, in the
/// closed upper half-plane of sphere representatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arc {
    /// `(r cos πt, r sin πt)`: the upper half-circle of radius `r`.
    HalfCircle { radius: f64 },
    /// The real segment from `a` to `b`.
    Segment { a: f64, b: f64 },
}

impl Arc {
    pub fn point(&self, t: f64) -> SpherePoint {
        match *self {
            Arc::HalfCircle { radius } => {
                let th = std::f64::consts::PI * t;
                SpherePoint::new(radius * th.cos(), radius * th.sin())
            }
            Arc::Segment { a, b } => SpherePoint::new(a + (b - a) * t, 0.0),
        }
    }

    /// Unnormalized tangent vector at `t`.
    pub fn tangent(&self, t: f64) -> (f64, f64) {
        match *self {
            Arc::HalfCircle { radius } => {
                let th = std::f64::consts::PI * t;
                (-radius * th.sin(), radius * th.cos())
            }
            Arc::Segment { a, b } => (b - a, 0.0),
        }
    }

    /// `n` spheres at midpoint parameters `(i + 1/2)/n`, staying clear of
    /// the arc endpoints.
    pub fn sample(&self, n: usize) -> Vec<SpherePoint> {
        (0..n)
            .map(|i| self.point((i as f64 + 0.5) / n as f64))
            .collect()
    }
}

impl std::str::FromStr for Arc {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "halfcircle" => Ok(Arc::HalfCircle { radius: 1.0 }),
            "segment" => Ok(Arc::Segment { a: -1.0, b: 1.0 }),
            other => Err(format!(
                "unknown arc `{other}` (expected halfcircle|segment)"
            )),
        }
    }
}

/// Generator of normal matrices whose spectral spheres sample an arc.
#[derive(Clone, Copy, Debug)]
pub struct ArcSpectrumEnsemble {
    pub arc: Arc,
    pub n: usize,
    pub seed: u64,
}

impl ArcSpectrumEnsemble {
    pub fn new(arc: Arc, n: usize, seed: u64) -> Self {
        ArcSpectrumEnsemble { arc, n, seed }
    }

    /// Draws `T = U diag(u_i + e1 v_i) U*` with a seeded random unitary.
    pub fn generate(&self) -> (QMatrix, Vec<SpherePoint>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let spheres = self.arc.sample(self.n);
        let t = sampling::random_normal_from_spheres(&mut rng, &spheres);
        (t, spheres)
    }
}

/// A segment probe `s(d) = s₀ + d·direction` with a geometric ladder of
/// distances, used to approach a spectral sphere transversally.
#[derive(Clone, Debug)]
pub struct SegmentProbe {
    s0: SpherePoint,
    direction: (f64, f64),
    distances: Vec<f64>,
}

impl SegmentProbe {
    /// `d_i = d₀ 2^{−i}`, `d₀ = 0.5`, `i = 0..=12`.
    pub fn default_distances() -> Vec<f64> {
        (0..=12).map(|i| 0.5 * 0.5f64.powi(i)).collect()
    }

    pub fn new(s0: SpherePoint, direction: (f64, f64), distances: Vec<f64>) -> Result<Self> {
        let norm = direction.0.hypot(direction.1);
        if norm == 0.0 || !norm.is_finite() || distances.is_empty() {
            return Err(Error::ProbeTangent);
        }
        Ok(SegmentProbe {
            s0,
            direction: (direction.0 / norm, direction.1 / norm),
            distances,
        })
    }

    /// Builds a probe anchored at `arc.point(t0)`, enforcing the quantitative
    /// non-tangency margin of 10°.
    pub fn from_arc(
        arc: &Arc,
        t0: f64,
        direction: (f64, f64),
        distances: Vec<f64>,
    ) -> Result<Self> {
        let probe = SegmentProbe::new(arc.point(t0), direction, distances)?;
        let (tu, tv) = arc.tangent(t0);
        let tnorm = tu.hypot(tv);
        if tnorm > 0.0 {
            let cross = (probe.direction.0 * tv - probe.direction.1 * tu).abs() / tnorm;
            if cross < MIN_PROBE_ANGLE.sin() {
                return Err(Error::ProbeTangent);
            }
        }
        Ok(probe)
    }

    pub fn anchor(&self) -> SpherePoint {
        self.s0
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Representative of `[s(d)]` in the slice `ℂ_{e1}`.
    pub fn point_at(&self, d: f64) -> Quaternion {
        let u = self.s0.u + d * self.direction.0;
        let v = self.s0.v + d * self.direction.1;
        Quaternion::from_real(u) + E1 * v
    }
}

/// One measurement row of a growth experiment. `fitted_k` is the running
/// constant `max ln‖Q‖ · d^{2k+2}` over the rows seen so far.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthRow {
    pub d: f64,
    pub norm_q: f64,
    pub norm_sl: f64,
    pub fitted_k: f64,
}

/// Report of [`growth_experiment`].
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    /// Schatten order of the perturbation.
    pub k: usize,
    pub rows: Vec<GrowthRow>,
    /// Final fitted constant `max ln‖Q‖ · d^{2k+2}`.
    pub fitted_k: f64,
    /// Least-squares slope of `ln‖Q‖` against `ln d`.
    pub slope_log_q: f64,
    /// Least-squares slope of `ln ln‖Q‖` against `ln d` (rows with
    /// `‖Q‖ > 1` only; `0` when fewer than two such rows exist).
    pub slope_loglog_q: f64,
    /// `−(2k + 2)`.
    pub bound_exponent: f64,
    /// `slope_loglog_q ≥ bound_exponent − 0.5`.
    pub slope_ok: bool,
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Measurement of one probe point: `None` when the point fails the
/// resolvent-membership threshold or the pencil condition exceeds `1e14`.
fn measure_point(t: &QMatrix, s: &Quaternion, threshold: f64) -> Option<(f64, f64)> {
    let pencil = spectrum::pencil(t, s);
    let q = linalg::inverse(&pencil).ok()?;
    // ‖Q‖ as the largest singular value of the inverse: no squared-Gram
    // accuracy floor on the small pencil values.
    let norm_q = q.operator_norm();
    if 1.0 / norm_q <= threshold || pencil.operator_norm() * norm_q > 1e14 {
        return None;
    }
    let shifted = t.sub(&QMatrix::identity(t.n()).left_scaled(s.conj()));
    Some((norm_q, q.mul(&shifted).operator_norm()))
}

/// Walks the probe from the largest distance inward, measuring `‖Q_s(T)‖`
/// and `‖S_L⁻¹(s, T)‖`. Points are independent, so with `threads > 1` they
/// are evaluated on scoped worker threads; the stop-scan and report assembly
/// stay sequential, so results are identical for any thread count. The walk
/// truncates at the first invalid point; an invalid first point is an error.
fn probe_norms(t: &QMatrix, probe: &SegmentProbe, threads: usize) -> Result<Vec<(f64, f64, f64)>> {
    let t_norm = t.operator_norm();
    let threshold = spectrum::resolvent_threshold(t_norm);
    let mut ds: Vec<f64> = probe
        .distances()
        .iter()
        .copied()
        .filter(|d| *d > 0.0)
        .collect();
    ds.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let measurements: Vec<Option<(f64, f64)>> = if threads <= 1 || ds.len() <= 1 {
        ds.iter()
            .map(|&d| measure_point(t, &probe.point_at(d), threshold))
            .collect()
    } else {
        let workers = threads.min(ds.len());
        let mut out: Vec<Option<(f64, f64)>> = vec![None; ds.len()];
        let chunk = ds.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = ds
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|&d| measure_point(t, &probe.point_at(d), threshold))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut offset = 0;
            for h in handles {
                let part = h.join().expect("probe worker");
                out[offset..offset + part.len()].clone_from_slice(&part);
                offset += part.len();
            }
        });
        out
    };

    let mut rows = Vec::new();
    for (d, m) in ds.iter().zip(measurements) {
        match m {
            Some((norm_q, norm_sl)) => rows.push((*d, norm_q, norm_sl)),
            None => {
                if rows.is_empty() {
                    return Err(Error::ProbeHitsSpectrum);
                }
                break;
            }
        }
    }
    Ok(rows)
}

/// Growth experiment for `T = A + B` along a probe: measures `‖Q_{s(d)}(T)‖`,
/// fits `K` in `ln‖Q‖ ≤ K d^{−2k−2}`, and checks that the log-log slope of
/// `ln‖Q‖` stays above `−(2k+2) − 0.5`.
pub fn growth_experiment(
    a: &QMatrix,
    b: &QMatrix,
    k: usize,
    probe: &SegmentProbe,
) -> Result<GrowthReport> {
    growth_experiment_threaded(a, b, k, probe, 1)
}

/// [`growth_experiment`] with probe points spread over `threads` workers;
/// the report is byte-identical for every thread count.
pub fn growth_experiment_threaded(
    a: &QMatrix,
    b: &QMatrix,
    k: usize,
    probe: &SegmentProbe,
    threads: usize,
) -> Result<GrowthReport> {
    if k < 1 {
        return Err(Error::BadExponent);
    }
    let t = a.add(b);
    let measured = probe_norms(&t, probe, threads)?;
    let exponent = (2 * k + 2) as f64;
    let mut rows = Vec::with_capacity(measured.len());
    let mut fitted = f64::NEG_INFINITY;
    for &(d, norm_q, norm_sl) in &measured {
        fitted = fitted.max(norm_q.ln() * d.powf(exponent));
        rows.push(GrowthRow {
            d,
            norm_q,
            norm_sl,
            fitted_k: fitted,
        });
    }
    let slope_log_q = least_squares_slope(
        &measured
            .iter()
            .map(|r| (r.0.ln(), r.1.ln()))
            .collect::<Vec<_>>(),
    );
    let loglog: Vec<(f64, f64)> = measured
        .iter()
        .filter(|r| r.1 > 1.0)
        .map(|r| (r.0.ln(), r.1.ln().ln()))
        .collect();
    let slope_loglog_q = least_squares_slope(&loglog);
    let bound_exponent = -exponent;
    Ok(GrowthReport {
        k,
        rows,
        fitted_k: fitted,
        slope_log_q,
        slope_loglog_q,
        bound_exponent,
        slope_ok: slope_loglog_q >= bound_exponent - 0.5,
    })
}

/// Report of [`growth_hypothesis_check`].
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub tested_k: usize,
    /// `(d, ‖S_L⁻¹(s(d), T)‖)` rows, largest distance first.
    pub rows: Vec<(f64, f64)>,
    /// `max ln‖S_L⁻¹‖ · d^{tested_k}` over the rows.
    pub fitted_k: f64,
    /// Smallest `k ≤ 8` whose bound constant shows no growth toward small
    /// distances; `None` if none qualifies.
    pub smallest_k: Option<usize>,
}

/// Same mechanics as the growth experiment but for `‖S_L⁻¹(s, T)‖` against
/// the exponent `−k`. A candidate `k` qualifies when
/// `max ln⁺‖S_L⁻¹‖ d^k` over the small-distance half of the ladder does not
/// exceed the large-distance half by more than 10%: bounded constants mean
/// the family `exp(K d^{−k})` captures the growth over the sampled range.
pub fn growth_hypothesis_check(
    t: &QMatrix,
    k: usize,
    probe: &SegmentProbe,
) -> Result<HypothesisReport> {
    if k < 1 {
        return Err(Error::BadExponent);
    }
    let measured = probe_norms(t, probe, 1)?;
    let rows: Vec<(f64, f64)> = measured.iter().map(|r| (r.0, r.2)).collect();
    let fitted = rows
        .iter()
        .map(|&(d, nsl)| nsl.ln() * d.powi(k as i32))
        .fold(f64::NEG_INFINITY, f64::max);
    let half = (rows.len() / 2).max(1);
    let mut smallest = None;
    for kk in 1..=8usize {
        let coeff = |&(d, nsl): &(f64, f64)| nsl.ln().max(0.0) * d.powi(kk as i32);
        let coarse = rows[..half].iter().map(coeff).fold(0.0f64, f64::max);
        let fine = rows[half..].iter().map(coeff).fold(0.0f64, f64::max);
        if fine <= 1.1 * coarse + 1e-9 {
            smallest = Some(kk);
            break;
        }
    }
    Ok(HypothesisReport {
        tested_k: k,
        rows,
        fitted_k: fitted,
        smallest_k: smallest,
    })
}

/// Report of [`restriction_spectrum_check`].
#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub subspace_spectrum: SpectrumResult,
    pub full_spectrum: SpectrumResult,
    /// `max_{sub} min_{full}` sphere distance.
    pub directed_hausdorff: f64,
    /// `directed_hausdorff ≤ 1e-7`.
    pub included: bool,
}

/// For a block upper-triangular `T` (zero block below the leading `m × m`
/// block), the span `M` of the first `m` basis vectors is invariant and
/// `σ_S(T|_M) ⊆ η(σ_S(T)) = σ_S(T)` — the full S-spectrum is the spectrum
/// itself for finite point sets.
pub fn restriction_spectrum_check(t: &QMatrix, m: usize) -> Result<RestrictionReport> {
    let n = t.n();
    if m == 0 || m > n {
        return Err(Error::NotBlockTriangular);
    }
    let tol = 1e-12 * (1.0 + t.max_abs());
    for i in m..n {
        for j in 0..m {
            if t[(i, j)].norm() > tol {
                return Err(Error::NotBlockTriangular);
            }
        }
    }
    let sub = spectrum::s_spectrum(&t.leading_block(m))?;
    let full = spectrum::s_spectrum(t)?;
    let directed = sub.directed_hausdorff(&full);
    Ok(RestrictionReport {
        subspace_spectrum: sub,
        full_spectrum: full,
        directed_hausdorff: directed,
        included: directed <= 1e-7,
    })
}

/// Report of [`weyl_report`].
#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub spectrum_a: SpectrumResult,
    pub spectrum_sum: SpectrumResult,
    /// For each sphere of `σ_S(A+K)`, its distance to `σ_S(A)`.
    pub displacements: Vec<f64>,
    pub max_displacement: f64,
    /// Relative residuals of the factorization identity
    /// `Q_s(A+K)⁻¹ = Q_s(A)⁻¹ (𝓘 + Q_s(A)(K² + AK + KA − 2 s₀ K))`
    /// at the sampled points.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Spectral displacement report for `A ↦ A + K`, plus a numerical check of
/// the perturbation factorization identity at `samples` random points of
/// `ρ_S(A)` (rejection-sampled to stay well-conditioned).
pub fn weyl_report(a: &QMatrix, k: &QMatrix, seed: u64, samples: usize) -> Result<WeylReport> {
    let spectrum_a = spectrum::s_spectrum(a)?;
    let sum = a.add(k);
    let spectrum_sum = spectrum::s_spectrum(&sum)?;
    let displacements: Vec<f64> = spectrum_sum
        .spheres()
        .iter()
        .map(|s| spectrum_a.min_distance(s.point))
        .collect();
    let max_displacement = displacements.iter().copied().fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a_norm = a.operator_norm();
    let accept = 1e-6 * (1.0 + a_norm) * (1.0 + a_norm);
    let spread = 1.0 + a_norm + k.operator_norm();
    let mut residuals = Vec::with_capacity(samples);
    let mut attempts = 0;
    while residuals.len() < samples {
        attempts += 1;
        if attempts > 200 * samples {
            return Err(Error::NumericalFailure("could not sample resolvent points"));
        }
        let s = sampling::gaussian_quaternion(&mut rng).scale(spread * 0.75);
        if spectrum::pencil_smallest_singular_value(a, &s)? <= accept {
            continue;
        }
        let q = match spectrum::pseudo_resolvent(a, &s) {
            Ok(q) => q,
            Err(_) => continue,
        };
        let lhs = spectrum::pencil(&sum, &s);
        let kk = k
            .mul(k)
            .add(&a.mul(k))
            .add(&k.mul(a))
            .sub(&k.scale(2.0 * s.re()));
        let rhs = spectrum::pencil(a, &s).mul(&QMatrix::identity(a.n()).add(&q.value.mul(&kk)));
        let res = lhs.sub(&rhs).operator_norm() / lhs.operator_norm().max(1.0);
        residuals.push(res);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(WeylReport {
        spectrum_a,
        spectrum_sum,
        displacements,
        max_displacement,
        residuals,
        max_residual,
    })
}

/// Convenience wrapper drawing a Schatten-`k`-normalized Gaussian
/// perturbation `B` with `‖B‖_k = bnorm` from a seeded stream.
pub fn schatten_perturbation<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    bnorm: f64,
) -> QMatrix {
    if bnorm == 0.0 {
        return QMatrix::zeros(n);
    }
    sampling::gaussian_with_schatten_norm(rng, n, k as f64, bnorm)
}
