use std::fmt;

/// Errors reported by the numerical operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The operator fails the normality test `‖TT* − T*T‖ < tol·‖T‖²`.
    NotNormal,
    /// The matrix is not invertible (smallest singular value below threshold).
    Singular,
    /// The quaternion `s` (i.e. its whole sphere `[s]`) meets the S-spectrum.
    OnSpectrum,
    /// Two quaternions lie on the same eigen-sphere, so the scalar pencil
    /// relating them is not invertible.
    SameSphere,
    /// The evaluation point lies on the sphere `[s]` of a linear factor.
    OnSphere,
    /// The evaluation point lies outside the convergence ball of a series.
    OutOfBall,
    /// Star product of a left series with a right series (or vice versa).
    SideMismatch,
    /// A series with non-real coefficients was passed where an intrinsic
    /// (real-coefficient) function is required.
    NotIntrinsic,
    /// The contour violates an admissibility condition (margin to the
    /// spectrum, enclosure, or circle geometry).
    ContourNotAdmissible,
    /// The matrix has nonzero entries below the leading invariant block.
    NotBlockTriangular,
    /// A probe point of a segment experiment lies on (or numerically too
    /// close to) the S-spectrum.
    ProbeHitsSpectrum,
    /// The probe direction is tangent (within the 10° margin) to the arc.
    ProbeTangent,
    /// Schatten exponent `p < 1`, or a regularization order `k < 1`.
    BadExponent,
    /// A quaternion that is not a unit purely imaginary quaternion was used
    /// as a slice unit.
    NotImaginaryUnit,
    /// An iterative eigenvalue or inversion kernel failed to converge.
    NumericalFailure(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormal => write!(f, "operator is not normal"),
            Error::Singular => write!(f, "matrix is singular or nearly singular"),
            Error::OnSpectrum => write!(f, "point lies on the S-spectrum"),
            Error::SameSphere => write!(f, "the two points lie on the same sphere"),
            Error::OnSphere => write!(f, "evaluation point lies on the factor sphere"),
            Error::OutOfBall => write!(f, "point outside the series convergence ball"),
            Error::SideMismatch => write!(f, "left/right series side mismatch"),
            Error::NotIntrinsic => write!(f, "series coefficients are not all real"),
            Error::ContourNotAdmissible => write!(f, "contour is not admissible"),
            Error::NotBlockTriangular => {
                write!(
                    f,
                    "matrix is not block upper-triangular at the requested size"
                )
            }
            Error::ProbeHitsSpectrum => write!(f, "probe point lies on the S-spectrum"),
            Error::ProbeTangent => write!(f, "probe direction is tangent to the arc"),
            Error::BadExponent => write!(f, "exponent outside the admissible range"),
            Error::NotImaginaryUnit => write!(f, "quaternion is not a unit imaginary"),
            Error::NumericalFailure(what) => write!(f, "numerical failure: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
