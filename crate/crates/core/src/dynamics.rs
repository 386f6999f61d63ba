//! Plane-wave states with a constant Jones vector, the optical-rotation
//! operator `exp[-i(Σ·w₀)φ]`, and geometric phases accumulated either by
//! turning the Stratton vector or by moving the momentum around a loop.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::Serialize;

use crate::algebra::{pauli, rotation_about, Complex2Vector, Real3, C64};
use crate::error::{Error, Result};
use crate::frames::{angle_between, build_frame, quasi_unitary, StrattonVector, WaveVector};
use crate::par;
use crate::stokes::UNIT_NORM_TOL;
use crate::wavefield::PolarizationVector;

/// Smallest `|aⱼ†aⱼ₊₁|` for which a step phase is considered defined.
pub const MIN_OVERLAP: f64 = 1e-6;

fn check_sign(value: i32) -> Result<()> {
    if value == 1 || value == -1 {
        Ok(())
    } else {
        Err(Error::InvalidEigenvalue { value })
    }
}

/// Unit eigenvector of `σ̂_axis` with eigenvalue `sign = ±1`:
/// axis 1 gives `(1, σ)/√2`, axis 2 gives `(1, iσ)/√2`, axis 3 gives
/// `((1+σ)/2, (1-σ)/2)`.
pub fn eigenstate(axis: usize, sign: i32) -> Result<Complex2Vector> {
    pauli(axis)?;
    check_sign(sign)?;
    let s = sign as f64;
    Ok(match axis {
        1 => Complex2Vector::new(C64::from(FRAC_1_SQRT_2), C64::from(s * FRAC_1_SQRT_2)),
        2 => Complex2Vector::new(C64::from(FRAC_1_SQRT_2), C64::new(0.0, s * FRAC_1_SQRT_2)),
        _ => Complex2Vector::new(C64::from((1.0 + s) / 2.0), C64::from((1.0 - s) / 2.0)),
    })
}

/// Plane wave along `k0` whose Jones vector in the representation of `sv`
/// is the constant `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveState {
    k0: WaveVector,
    sv: StrattonVector,
    alpha: Complex2Vector,
}

impl PlaneWaveState {
    pub fn new(k0: WaveVector, sv: StrattonVector, alpha: Complex2Vector) -> Result<Self> {
        build_frame(sv, k0)?;
        let norm_sq = alpha.norm_squared();
        if !((norm_sq - 1.0).abs() <= UNIT_NORM_TOL) {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { k0, sv, alpha })
    }

    pub fn wave_vector(&self) -> WaveVector {
        self.k0
    }

    pub fn stratton_vector(&self) -> StrattonVector {
        self.sv
    }

    pub fn jones(&self) -> Complex2Vector {
        self.alpha
    }
}

/// `a = ϖ(I, k₀) α̃`.
pub fn polarization_vector(state: &PlaneWaveState) -> Result<PolarizationVector> {
    let q = quasi_unitary(&build_frame(state.sv, state.k0)?);
    Ok(PolarizationVector::new_unchecked(
        q.apply(&state.alpha),
        state.k0,
    ))
}

/// Rotates `a` about its own propagation direction by `phi`.
pub fn optical_rotation(a: &PolarizationVector, phi: f64) -> PolarizationVector {
    let k = a.wave_vector();
    let r = rotation_about(&k.direction(), phi).expect("direction is a unit vector");
    PolarizationVector::new_unchecked(r * a.vector(), k)
}

/// Same Jones vector, Stratton vector replaced by `sv_prime`.
pub fn rotate_sv(state: &PlaneWaveState, sv_prime: StrattonVector) -> Result<PlaneWaveState> {
    build_frame(sv_prime, state.k0)?;
    Ok(PlaneWaveState {
        sv: sv_prime,
        ..*state
    })
}

/// Per-step angles, their unwrapped sum, and the accumulated unit phase
/// factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseLog {
    pub steps: Vec<f64>,
    pub total: f64,
    #[serde(rename = "phase", serialize_with = "ser_complex")]
    pub factor: C64,
}

fn ser_complex<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn step_pairs(n: usize, closed: bool) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|j| (j, j + 1)).collect();
    if closed {
        pairs.push((n - 1, 0));
    }
    pairs
}

/// Discrete Pancharatnam phase: step angles `arg(aⱼ†aⱼ₊₁)`, their sum, and
/// the product of the normalized overlaps. With `closed` the last state
/// connects back to the first.
pub fn pancharatnam_phase(states: &[PolarizationVector], closed: bool) -> Result<PhaseLog> {
    if states.len() < 2 {
        return Err(Error::PathTooShort {
            required: 2,
            actual: states.len(),
        });
    }
    let pairs = step_pairs(states.len(), closed);
    let overlaps = par::map_indexed(&pairs, |_, &(a, b)| {
        states[a].vector().dotc(states[b].vector())
    });
    let mut factor = C64::new(1.0, 0.0);
    for (j, z) in overlaps.iter().enumerate() {
        let m = z.norm();
        if !(m >= MIN_OVERLAP) {
            return Err(Error::OrthogonalStep {
                step: j,
                overlap: m,
            });
        }
        factor *= z / m;
    }
    let steps: Vec<f64> = overlaps.iter().map(|z| z.arg()).collect();
    let total = steps.iter().sum();
    // Renormalize once to keep |factor| = 1 over long products.
    factor /= factor.norm();
    Ok(PhaseLog {
        steps,
        total,
        factor,
    })
}

/// Result of turning the Stratton vector of a helicity eigenstate through a
/// sequence of values.
#[derive(Debug, Clone, PartialEq)]
pub struct SvLoopPhase {
    /// Frame angles `Φⱼ`, their sum, and `e^{-iσ₃ΣΦⱼ}`.
    pub log: PhaseLog,
    /// Overlap-based phase of the same sequence of polarization vectors.
    pub pancharatnam: PhaseLog,
}

impl SvLoopPhase {
    /// Largest disagreement between the two routes: phase factors directly,
    /// step phases `-σ₃Φⱼ` against overlap arguments modulo 2π.
    pub fn agreement(&self, sigma3: i32) -> f64 {
        let factor = (self.log.factor - self.pancharatnam.factor).norm();
        let steps = self
            .log
            .steps
            .iter()
            .zip(&self.pancharatnam.steps)
            .map(|(phi, arg)| {
                (C64::from_polar(1.0, -(sigma3 as f64) * phi) - C64::from_polar(1.0, *arg)).norm()
            })
            .fold(0.0_f64, f64::max);
        factor.max(steps)
    }
}

/// Geometric phase from stepping the Stratton vector of `state` through
/// `path` (which may close on itself or not) at fixed momentum.
pub fn sv_loop_phase(
    state: &PlaneWaveState,
    path: &[StrattonVector],
    sigma3: i32,
) -> Result<SvLoopPhase> {
    check_sign(sigma3)?;
    let expected = eigenstate(3, sigma3)?;
    if (expected.dotc(&state.alpha).norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotHelicityEigenstate { sigma3 });
    }
    if path.len() < 2 {
        return Err(Error::PathTooShort {
            required: 2,
            actual: path.len(),
        });
    }
    let frames = path
        .iter()
        .map(|&sv| build_frame(sv, state.k0))
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<f64> = frames
        .windows(2)
        .map(|w| angle_between(&w[0], &w[1]))
        .collect();
    let total: f64 = steps.iter().sum();
    let factor = C64::from_polar(1.0, -(sigma3 as f64) * total);

    let vectors: Vec<PolarizationVector> = frames
        .iter()
        .map(|f| PolarizationVector::new_unchecked(quasi_unitary(f).apply(&state.alpha), state.k0))
        .collect();
    let pancharatnam = pancharatnam_phase(&vectors, false)?;
    Ok(SvLoopPhase {
        log: PhaseLog {
            steps,
            total,
            factor,
        },
        pancharatnam,
    })
}

/// Closed geodesic triangle `x̂ → ŷ → ẑ → x̂` sampled with `n` directions in
/// total (the start is not repeated).
pub fn geodesic_octant_loop(n: usize) -> Vec<WaveVector> {
    let corners = [Real3::x(), Real3::y(), Real3::z()];
    let n = n.max(3);
    let mut out = Vec::with_capacity(n);
    for arc in 0..3 {
        let count = n / 3 + usize::from(arc < n % 3);
        let (a, b) = (corners[arc], corners[(arc + 1) % 3]);
        for s in 0..count {
            let t = FRAC_PI_2 * s as f64 / count as f64;
            let k = a * t.cos() + b * t.sin();
            out.push(WaveVector::new(k).expect("unit direction"));
        }
    }
    out
}

/// Pancharatnam phase of the helicity-`sigma3` states `ϖ(I, k) e₃(σ₃)`
/// carried around the closed momentum loop `path`.
pub fn momentum_loop_phase(
    path: &[WaveVector],
    sv: StrattonVector,
    sigma3: i32,
) -> Result<PhaseLog> {
    let alpha = eigenstate(3, sigma3)?;
    let states = par::try_map_indexed(path, |i, &k| {
        let frame = build_frame(sv, k).map_err(|_| Error::DegenerateFrame { node: Some(i) })?;
        Ok(PolarizationVector::new_unchecked(
            quasi_unitary(&frame).apply(&alpha),
            k,
        ))
    })?;
    pancharatnam_phase(&states, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::max_abs;
    use std::f64::consts::PI;

    fn kx() -> WaveVector {
        WaveVector::new(Real3::x()).unwrap()
    }

    #[test]
    fn printed_eigenstates() {
        let s = FRAC_1_SQRT_2;
        assert_eq!(
            eigenstate(3, 1).unwrap(),
            Complex2Vector::new(C64::from(1.0), C64::from(0.0))
        );
        assert_eq!(
            eigenstate(3, -1).unwrap(),
            Complex2Vector::new(C64::from(0.0), C64::from(1.0))
        );
        assert_eq!(
            eigenstate(1, -1).unwrap(),
            Complex2Vector::new(C64::from(s), C64::from(-s))
        );
        assert_eq!(
            eigenstate(2, 1).unwrap(),
            Complex2Vector::new(C64::from(s), C64::new(0.0, s))
        );
    }

    #[test]
    fn eigenvalue_equations() {
        for axis in 1..=3 {
            for sign in [1, -1] {
                let e = eigenstate(axis, sign).unwrap();
                let lhs = pauli(axis).unwrap() * e;
                assert!(max_abs(&(lhs - e * C64::from(sign as f64))) <= 1e-15);
            }
        }
        assert_eq!(eigenstate(1, 0), Err(Error::InvalidEigenvalue { value: 0 }));
        assert_eq!(eigenstate(4, 1), Err(Error::IndexOutOfRange { index: 4 }));
    }

    #[test]
    fn polarization_vectors_of_eigenstates() {
        let f = build_frame(StrattonVector::z(), kx()).unwrap();
        let (u, v) = (f.u.map(C64::from), f.v.map(C64::from));
        let pv = |axis, sign| {
            let st =
                PlaneWaveState::new(kx(), StrattonVector::z(), eigenstate(axis, sign).unwrap())
                    .unwrap();
            *polarization_vector(&st).unwrap().vector()
        };
        assert!(max_abs(&(pv(1, 1) - u)) <= 1e-15);
        assert!(max_abs(&(pv(1, -1) - v * C64::new(0.0, 1.0))) <= 1e-15);
        let e = C64::from_polar(1.0, PI / 4.0) * C64::from(FRAC_1_SQRT_2);
        assert!(max_abs(&(pv(2, 1) - (u + v) * e)) <= 1e-15);
        let c_plus = (u + v * C64::new(0.0, 1.0)) * C64::from(FRAC_1_SQRT_2);
        assert!(max_abs(&(pv(3, 1) - c_plus)) <= 1e-15);
    }

    #[test]
    fn optical_rotation_examples() {
        let f = build_frame(StrattonVector::z(), kx()).unwrap();
        let a = PolarizationVector::new(f.u.map(C64::from), kx()).unwrap();
        let r = optical_rotation(&a, FRAC_PI_2);
        assert!(max_abs(&(r.vector() - Real3::y().map(C64::from))) <= 1e-15);
        assert_eq!(optical_rotation(&a, 0.0).vector(), a.vector());

        let c = PolarizationVector::new(quasi_unitary(&f).c_plus(), kx()).unwrap();
        let phi = 0.9;
        let r = optical_rotation(&c, phi);
        assert!(max_abs(&(r.vector() - c.vector() * C64::from_polar(1.0, -phi))) <= 1e-15);
    }

    #[test]
    fn rotate_sv_matches_optical_rotation() {
        let st = PlaneWaveState::new(kx(), StrattonVector::z(), eigenstate(1, 1).unwrap()).unwrap();
        let rotated = rotate_sv(&st, StrattonVector::y()).unwrap();
        assert_eq!(rotated.jones(), st.jones());
        let phi =
            crate::frames::frame_angle(StrattonVector::z(), StrattonVector::y(), kx()).unwrap();
        assert!((phi + FRAC_PI_2).abs() <= 1e-15);
        let a = polarization_vector(&st).unwrap();
        let a2 = polarization_vector(&rotated).unwrap();
        assert!(max_abs(&(a2.vector() - optical_rotation(&a, phi).vector())) <= 1e-15);
        assert!(rotate_sv(&st, StrattonVector::x()).is_err());
    }

    #[test]
    fn pancharatnam_simple_cases() {
        let f = build_frame(StrattonVector::z(), kx()).unwrap();
        let c = PolarizationVector::new(quasi_unitary(&f).c_plus(), kx()).unwrap();
        let log = pancharatnam_phase(&[c, c], false).unwrap();
        assert_eq!(log.total, 0.0);
        let phi = 0.4;
        let shifted =
            PolarizationVector::new(c.vector() * C64::from_polar(1.0, -phi), kx()).unwrap();
        let log = pancharatnam_phase(&[c, shifted], false).unwrap();
        assert!((log.steps[0] + phi).abs() <= 1e-15);
        assert!((log.factor - C64::from_polar(1.0, -phi)).norm() <= 1e-15);
    }

    #[test]
    fn pancharatnam_errors() {
        let f = build_frame(StrattonVector::z(), kx()).unwrap();
        let q = quasi_unitary(&f);
        let a = PolarizationVector::new(q.c_plus(), kx()).unwrap();
        let b = PolarizationVector::new(q.c_minus(), kx()).unwrap();
        assert!(matches!(
            pancharatnam_phase(&[a, b], false),
            Err(Error::OrthogonalStep { step: 0, .. })
        ));
        assert!(matches!(
            pancharatnam_phase(&[a], false),
            Err(Error::PathTooShort { .. })
        ));
    }

    #[test]
    fn quarter_turn_sv_loop() {
        let path = [
            StrattonVector::z(),
            StrattonVector::y(),
            -StrattonVector::z(),
            -StrattonVector::y(),
            StrattonVector::z(),
        ];
        for sigma3 in [1, -1] {
            let st = PlaneWaveState::new(kx(), StrattonVector::z(), eigenstate(3, sigma3).unwrap())
                .unwrap();
            let out = sv_loop_phase(&st, &path, sigma3).unwrap();
            for s in &out.log.steps {
                assert!((s + FRAC_PI_2).abs() <= 1e-12);
            }
            assert!((out.log.total + 2.0 * PI).abs() <= 1e-9);
            assert!((out.log.factor - C64::from(1.0)).norm() <= 1e-12);
            assert!(out.agreement(sigma3) <= 1e-10);
        }
    }

    #[test]
    fn half_loop_gives_minus_one() {
        let sv = StrattonVector::normalized(Real3::new(0.2, 0.3, 0.9)).unwrap();
        for sigma3 in [1, -1] {
            let st = PlaneWaveState::new(kx(), sv, eigenstate(3, sigma3).unwrap()).unwrap();
            let out = sv_loop_phase(&st, &[sv, -sv], sigma3).unwrap();
            assert!((out.log.steps[0] - PI).abs() <= 1e-12);
            assert!((out.log.factor + C64::from(1.0)).norm() <= 1e-12);
            assert!(out.agreement(sigma3) <= 1e-10);
        }
    }

    #[test]
    fn sv_loop_requires_helicity_state() {
        let st = PlaneWaveState::new(kx(), StrattonVector::z(), eigenstate(1, 1).unwrap()).unwrap();
        assert!(matches!(
            sv_loop_phase(&st, &[StrattonVector::z(), StrattonVector::y()], 1),
            Err(Error::NotHelicityEigenstate { .. })
        ));
        let st =
            PlaneWaveState::new(kx(), StrattonVector::z(), eigenstate(3, -1).unwrap()).unwrap();
        assert!(sv_loop_phase(&st, &[StrattonVector::z(), StrattonVector::x()], -1).is_err());
    }

    #[test]
    fn octant_loop_shape() {
        let path = geodesic_octant_loop(2000);
        assert_eq!(path.len(), 2000);
        assert_eq!(path[0].to_array(), [1.0, 0.0, 0.0]);
        for k in &path {
            assert!((k.magnitude() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn momentum_loop_sign_flips() {
        let sv = StrattonVector::normalized(Real3::new(1.0, -2.0, 0.5)).unwrap();
        let path = geodesic_octant_loop(600);
        let plus = momentum_loop_phase(&path, sv, 1).unwrap();
        let minus = momentum_loop_phase(&path, sv, -1).unwrap();
        assert!((plus.total.abs() - FRAC_PI_2).abs() < 5e-3);
        assert!((plus.total + minus.total).abs() < 1e-9);
    }
}
