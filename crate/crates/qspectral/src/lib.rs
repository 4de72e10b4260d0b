//! Numerical spectral theory on finite-dimensional right quaternionic
//! Hilbert spaces: the S-spectrum and S-resolvents of quaternionic matrices,
//! slice hyperholomorphic power series with their ⋆-algebra, the
//! S-functional calculus by contour quadrature, Schatten-class quantities
//! including the regularized determinant `δ_k`, and an experiment harness
//! for normal-plus-Schatten perturbations.
//!
//! All operators are dense `n × n` quaternionic matrices acting right-
//! linearly on column vectors; values are immutable after construction and
//! every operation is a pure function, so everything here is `Send + Sync`.

pub mod calg;
pub mod error;
pub mod funcalc;
pub mod perturb;
pub mod qmat;
pub mod quat;
pub mod sampling;
pub mod schatten;
pub mod slicefun;
pub mod spectrum;

mod linalg;

pub use error::{Error, Result};
pub use qmat::{ComplexAdjoint, NormalDecomposition, OperatorClass, QMatrix, QVector};
pub use quat::{slice_decompose, sphere_distance, ImaginaryUnit, Quaternion, SpherePoint};
pub use spectrum::{s_spectrum, PseudoResolvent, SpectralSphere, SpectrumResult};
