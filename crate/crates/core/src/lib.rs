//! Photon polarization algebra in momentum-space local frames.
//!
//! A constant Stratton vector fixes a right-handed triad `(u, v, w = k̂)` at
//! every momentum. Relative to that triad a transverse vector wavefunction
//! has a two-component Jones form, and Stokes parameters, spin, optical
//! rotation and geometric phases follow from it.
//!
//! Per-node work runs on rayon when the default `parallel` feature is on
//! and sequentially otherwise; reductions are bit-identical either way.

// Validation is written as `!(x <= tol)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod checks;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod frames;
pub mod par;
pub mod sampling;
pub mod spin;
pub mod stokes;
pub mod synthesis;
pub mod wavefield;

pub use error::{Error, Result};
pub use frames::{
    build_frame, frame_angle, quasi_unitary, LocalFrame, QuasiUnitary, StrattonVector, WaveVector,
};
pub use wavefield::{
    change_sv, norm_squared, to_jones, to_vector, JonesWavefunction, MomentumGrid,
    VectorWavefunction,
};
