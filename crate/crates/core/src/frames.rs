//! Stratton-vector local reference frames.
//!
//! A constant unit vector `I` fixes, at every momentum `k`, the transverse
//! axes `v = I×k / |I×k|` and `u = v × k̂`. Together with `w = k̂` they form
//! a right-handed triad. The quasi-unitary matrix `ϖ = (c₊ c₋)` with
//! `c± = (u ± iv)/√2` maps Jones amplitudes to transverse 3-vectors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Matrix3x2;
use serde::{Deserialize, Serialize};

use crate::algebra::{Complex2Vector, Complex3Vector, Matrix2C, Matrix3C, Real3, C64, I};
use crate::error::{Error, Result};

/// Accepted `|‖I‖ - 1|` for a Stratton vector.
pub const SV_NORM_TOL: f64 = 1e-12;

/// Relative threshold on `|I×k| / |k|` below which a frame is degenerate.
pub const PARALLEL_EPS: f64 = 1e-9;

/// Constant real unit vector that fixes the transverse axes of every local
/// frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct StrattonVector(Real3);

impl StrattonVector {
    /// Accepts a vector already of unit length.
    pub fn new(v: Real3) -> Result<Self> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidStrattonVector {
                reason: "non-finite component".into(),
            });
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > SV_NORM_TOL {
            return Err(Error::InvalidStrattonVector {
                reason: format!("norm {norm} is not 1"),
            });
        }
        Ok(Self(v))
    }

    /// Rescales any nonzero finite vector to unit length.
    pub fn normalized(v: Real3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidStrattonVector {
                reason: format!("cannot normalize vector of norm {norm}"),
            });
        }
        Ok(Self(v / norm))
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        Self::new(Real3::from(a))
    }

    pub fn x() -> Self {
        Self(Real3::x())
    }

    pub fn y() -> Self {
        Self(Real3::y())
    }

    pub fn z() -> Self {
        Self(Real3::z())
    }

    pub fn as_vector(&self) -> &Real3 {
        &self.0
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0.into()
    }
}

impl std::ops::Neg for StrattonVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl TryFrom<[f64; 3]> for StrattonVector {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::new(Real3::from(a))
    }
}

impl From<StrattonVector> for [f64; 3] {
    fn from(s: StrattonVector) -> Self {
        s.to_array()
    }
}

/// Nonzero wave vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct WaveVector(Real3);

impl WaveVector {
    pub fn new(k: Real3) -> Result<Self> {
        if !k.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidWaveVector {
                reason: "non-finite component".into(),
            });
        }
        if k.norm() == 0.0 {
            return Err(Error::InvalidWaveVector {
                reason: "zero wave vector".into(),
            });
        }
        Ok(Self(k))
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        Self::new(Real3::from(a))
    }

    pub fn as_vector(&self) -> &Real3 {
        &self.0
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    /// Propagation direction `k / |k|`.
    pub fn direction(&self) -> Real3 {
        self.0 / self.0.norm()
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0.into()
    }
}

impl TryFrom<[f64; 3]> for WaveVector {
    type Error = Error;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::new(Real3::from(a))
    }
}

impl From<WaveVector> for [f64; 3] {
    fn from(k: WaveVector) -> Self {
        k.to_array()
    }
}

/// Right-handed triad `(u, v, w)` at one momentum, together with the
/// `(I, k)` pair that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub u: Real3,
    pub v: Real3,
    pub w: Real3,
    sv: StrattonVector,
    k: WaveVector,
}

impl LocalFrame {
    pub fn stratton_vector(&self) -> StrattonVector {
        self.sv
    }

    pub fn wave_vector(&self) -> WaveVector {
        self.k
    }

    /// Residuals of `u×v = w`, `v×w = u`, `w×u = v` (max-norm each).
    pub fn triad_residuals(&self) -> [f64; 3] {
        [
            (self.u.cross(&self.v) - self.w).amax(),
            (self.v.cross(&self.w) - self.u).amax(),
            (self.w.cross(&self.u) - self.v).amax(),
        ]
    }

    /// Embeds local components `(a, b, c)` as `a u + b v + c w`.
    pub fn to_lab(&self, local: &Real3) -> Real3 {
        self.u * local[0] + self.v * local[1] + self.w * local[2]
    }
}

/// Builds the local frame fixed by `sv` at momentum `k`.
pub fn build_frame(sv: StrattonVector, k: WaveVector) -> Result<LocalFrame> {
    let kv = k.as_vector();
    let cross = sv.as_vector().cross(kv);
    let cross_norm = cross.norm();
    if !(cross_norm >= PARALLEL_EPS * k.magnitude()) {
        return Err(Error::DegenerateFrame { node: None });
    }
    let w = k.direction();
    let v = cross / cross_norm;
    let u = v.cross(&w);
    Ok(LocalFrame { u, v, w, sv, k })
}

/// The 3×2 matrix `ϖ = (c₊ c₋)` of a local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiUnitary {
    matrix: Matrix3x2<C64>,
    w: Real3,
}

impl QuasiUnitary {
    pub fn matrix(&self) -> &Matrix3x2<C64> {
        &self.matrix
    }

    pub fn c_plus(&self) -> Complex3Vector {
        self.matrix.column(0).into_owned()
    }

    pub fn c_minus(&self) -> Complex3Vector {
        self.matrix.column(1).into_owned()
    }

    /// `ϖ f̃`.
    pub fn apply(&self, jones: &Complex2Vector) -> Complex3Vector {
        self.matrix * jones
    }

    /// `ϖ† f`.
    pub fn project(&self, f: &Complex3Vector) -> Complex2Vector {
        self.matrix.ad_mul(f)
    }

    /// `ϖ†ϖ`, which is `I₂` for a valid frame.
    pub fn gram(&self) -> Matrix2C {
        self.matrix.ad_mul(&self.matrix)
    }

    /// `ϖϖ†`, the projector `I₃ - wwᵀ` onto the transverse plane.
    pub fn projector(&self) -> Matrix3C {
        self.matrix * self.matrix.adjoint()
    }

    /// The transverse projector computed directly from `w`.
    pub fn transverse_projector(&self) -> Matrix3C {
        (nalgebra::Matrix3::<f64>::identity() - self.w * self.w.transpose()).map(C64::from)
    }
}

/// `ϖ` with columns `c₊ = (u + iv)/√2`, `c₋ = (u - iv)/√2`.
pub fn quasi_unitary(frame: &LocalFrame) -> QuasiUnitary {
    let u = frame.u.map(C64::from);
    let v = frame.v.map(C64::from);
    let c_plus = (u + v * I) * C64::from(FRAC_1_SQRT_2);
    let c_minus = (u - v * I) * C64::from(FRAC_1_SQRT_2);
    QuasiUnitary {
        matrix: Matrix3x2::from_columns(&[c_plus, c_minus]),
        w: frame.w,
    }
}

/// Rotation angle `Φ ∈ (-π, π]` about `k̂` carrying the frame of `sv` into
/// the frame of `sv_prime`: `u' = u cosΦ + v sinΦ`.
pub fn frame_angle(sv: StrattonVector, sv_prime: StrattonVector, k: WaveVector) -> Result<f64> {
    let f = build_frame(sv, k)?;
    let fp = build_frame(sv_prime, k)?;
    Ok(angle_between(&f, &fp))
}

/// Same as [`frame_angle`] for frames already built at the same momentum.
pub fn angle_between(frame: &LocalFrame, frame_prime: &LocalFrame) -> f64 {
    if frame.u == frame_prime.u && frame.v == frame_prime.v {
        return 0.0;
    }
    let phi = frame_prime
        .u
        .dot(&frame.v)
        .atan2(frame_prime.u.dot(&frame.u));
    if phi <= -PI {
        PI
    } else {
        phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{helicity_phase_matrix, max_abs, rotation_about};
    use std::f64::consts::FRAC_PI_2;

    fn k(x: f64, y: f64, z: f64) -> WaveVector {
        WaveVector::new(Real3::new(x, y, z)).unwrap()
    }

    #[test]
    fn frame_along_x_with_z_sv() {
        // v = z × x = y; u = y × x = -z.
        let f = build_frame(StrattonVector::z(), k(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(f.u, Real3::new(0.0, 0.0, -1.0));
        assert_eq!(f.v, Real3::new(0.0, 1.0, 0.0));
        assert_eq!(f.w, Real3::new(1.0, 0.0, 0.0));
        assert_eq!(f.u.cross(&f.v), f.w);
    }

    #[test]
    fn frame_along_y_with_z_sv() {
        // v = z × y = -x; u = -x × y = -z.
        let f = build_frame(StrattonVector::z(), k(0.0, 5.0, 0.0)).unwrap();
        assert_eq!(f.u, Real3::new(0.0, 0.0, -1.0));
        assert_eq!(f.v, Real3::new(-1.0, 0.0, 0.0));
        assert_eq!(f.w, Real3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn degenerate_when_parallel_or_antiparallel() {
        assert_eq!(
            build_frame(StrattonVector::z(), k(0.0, 0.0, 3.0)),
            Err(Error::DegenerateFrame { node: None })
        );
        assert!(build_frame(StrattonVector::z(), k(0.0, 0.0, -0.2)).is_err());
        assert!(build_frame(StrattonVector::z(), k(1e-11, 0.0, 1.0)).is_err());
        assert!(build_frame(StrattonVector::z(), k(1e-8, 0.0, 1.0)).is_ok());
    }

    #[test]
    fn stratton_vector_validation() {
        assert!(StrattonVector::new(Real3::new(1.0, 1.0, 0.0)).is_err());
        assert!(StrattonVector::new(Real3::new(f64::NAN, 0.0, 0.0)).is_err());
        assert!(StrattonVector::normalized(Real3::zeros()).is_err());
        let s = StrattonVector::normalized(Real3::new(0.0, 3.0, 4.0)).unwrap();
        assert!((s.as_vector().norm() - 1.0).abs() < 1e-15);
        assert!(WaveVector::new(Real3::zeros()).is_err());
    }

    #[test]
    fn c_plus_of_x_frame() {
        let f = build_frame(StrattonVector::z(), k(1.0, 0.0, 0.0)).unwrap();
        let q = quasi_unitary(&f);
        let s = FRAC_1_SQRT_2;
        let expected = Complex3Vector::new(C64::new(0.0, 0.0), C64::new(0.0, s), C64::new(-s, 0.0));
        assert!(max_abs(&(q.c_plus() - expected)) <= 1e-15);
    }

    #[test]
    fn quasi_unitarity_and_projector() {
        let f = build_frame(
            StrattonVector::normalized(Real3::new(0.2, -0.7, 0.4)).unwrap(),
            k(-1.3, 0.5, 2.2),
        )
        .unwrap();
        let q = quasi_unitary(&f);
        assert!(max_abs(&(q.gram() - Matrix2C::identity())) <= 1e-15);
        // c₊c₊† + c₋c₋† = uuᵀ + vvᵀ computed entry by entry.
        let uv = f.u * f.u.transpose() + f.v * f.v.transpose();
        assert!(max_abs(&(q.projector() - uv.map(C64::from))) <= 1e-15);
        assert!(max_abs(&(q.projector() - q.transverse_projector())) <= 1e-15);
    }

    #[test]
    fn frame_angle_examples() {
        let sv = StrattonVector::normalized(Real3::new(0.3, 0.1, 0.9)).unwrap();
        let kk = k(0.4, -1.0, 0.2);
        assert_eq!(frame_angle(sv, sv, kk).unwrap(), 0.0);
        assert!((frame_angle(sv, -sv, kk).unwrap() - PI).abs() <= 1e-12);
        let phi = frame_angle(StrattonVector::z(), StrattonVector::y(), k(1.0, 0.0, 0.0)).unwrap();
        assert!((phi + FRAC_PI_2).abs() <= 1e-15);
    }

    #[test]
    fn frame_angle_propagates_degeneracy() {
        assert!(frame_angle(StrattonVector::z(), StrattonVector::x(), k(1.0, 0.0, 0.0)).is_err());
        assert!(frame_angle(StrattonVector::x(), StrattonVector::z(), k(0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn primed_frame_two_routes_agree() {
        let sv = StrattonVector::normalized(Real3::new(0.3, 0.1, 0.9)).unwrap();
        let svp = StrattonVector::normalized(Real3::new(-0.5, 0.8, 0.2)).unwrap();
        let kk = k(0.4, -1.0, 0.2);
        let f = build_frame(sv, kk).unwrap();
        let fp = build_frame(svp, kk).unwrap();
        let phi = angle_between(&f, &fp);
        let q = quasi_unitary(&f);
        let qp = quasi_unitary(&fp);
        let via_rotation = rotation_about(&f.w, phi).unwrap() * q.matrix();
        let via_phase = q.matrix() * helicity_phase_matrix(phi);
        assert!(max_abs(&(via_rotation - qp.matrix())) <= 1e-14);
        assert!(max_abs(&(via_phase - qp.matrix())) <= 1e-14);
    }

    #[test]
    fn frame_depends_only_on_direction() {
        let sv = StrattonVector::normalized(Real3::new(1.0, 2.0, 3.0)).unwrap();
        let a = build_frame(sv, k(0.3, -0.2, 0.1)).unwrap();
        let b = build_frame(sv, k(3.0, -2.0, 1.0)).unwrap();
        assert!((a.u - b.u).amax() <= 1e-15);
        assert!((a.v - b.v).amax() <= 1e-15);
        assert!((a.w - b.w).amax() <= 1e-15);
    }

    #[test]
    fn serde_round_trip_rejects_non_unit() {
        let s: StrattonVector = serde_json::from_str("[0.0, 0.0, 1.0]").unwrap();
        assert_eq!(s, StrattonVector::z());
        assert!(serde_json::from_str::<StrattonVector>("[0.0, 0.0, 2.0]").is_err());
        assert!(serde_json::from_str::<WaveVector>("[0.0, 0.0, 0.0]").is_err());
    }
}
