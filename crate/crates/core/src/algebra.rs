//! Fixed-size complex linear algebra: the Pauli matrices, the spin-1
//! generators `Σ_k` with `(Σ_k)_ij = -i ε_ijk`, and the two closed-form
//! rotation exponentials `exp[-i(Σ·w)φ]` and `exp(-iσ₃φ)`.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Complex2Vector = Vector2<C64>;
pub type Complex3Vector = Vector3<C64>;
pub type Matrix2C = Matrix2<C64>;
pub type Matrix3C = Matrix3<C64>;
pub type Real3 = Vector3<f64>;

/// Tolerance on `|‖w‖ - 1|` accepted for rotation axes.
pub const AXIS_NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Levi-Civita symbol over 1-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i })
    }
}

/// Pauli matrix `σ̂ᵢ` for `i ∈ {1, 2, 3}`.
pub fn pauli(i: usize) -> Result<Matrix2C> {
    check_index(i)?;
    Ok(match i {
        1 => Matrix2C::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2C::new(ZERO, -I, I, ZERO),
        _ => Matrix2C::new(ONE, ZERO, ZERO, -ONE),
    })
}

/// Spin-1 generator `Σ_k` with entries `(Σ_k)_ij = -i ε_ijk`.
pub fn sigma(k: usize) -> Result<Matrix3C> {
    check_index(k)?;
    Ok(Matrix3C::from_fn(|r, c| -I * levi_civita(r + 1, c + 1, k)))
}

/// `Σ·w` for a real 3-vector `w`.
pub fn sigma_dot(w: &Real3) -> Matrix3C {
    let mut m = Matrix3C::zeros();
    for k in 1..=3 {
        m += sigma(k).expect("index in range") * C64::from(w[k - 1]);
    }
    m
}

/// `[a, b] = ab - ba`.
pub fn commutator<M>(a: &M, b: &M) -> M
where
    for<'x> &'x M: std::ops::Mul<&'x M, Output = M>,
    M: std::ops::Sub<Output = M>,
{
    a * b - b * a
}

/// Real orthogonal matrix of the right-handed rotation by `phi` about the
/// unit axis `w`, in Rodrigues form `cosφ I + sinφ [w]ₓ + (1 - cosφ) wwᵀ`.
pub fn rotation_about_real(w: &Real3, phi: f64) -> Result<Matrix3<f64>> {
    let norm = w.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > AXIS_NORM_TOL {
        return Err(Error::NonUnitAxis { norm });
    }
    let (s, c) = phi.sin_cos();
    let cross = w.cross_matrix();
    Ok(Matrix3::identity() * c + cross * s + (w * w.transpose()) * (1.0 - c))
}

/// The operator `exp[-i(Σ·w)φ]`. Under the generator convention
/// `(Σ_k)_ij = -i ε_ijk` this is the rotation by `+φ` about `w`, so the
/// result is real and orthogonal with unit determinant.
pub fn rotation_about(w: &Real3, phi: f64) -> Result<Matrix3C> {
    Ok(rotation_about_real(w, phi)?.map(C64::from))
}

/// `exp(-iσ̂₃φ) = diag(e^{-iφ}, e^{iφ})`.
pub fn helicity_phase_matrix(phi: f64) -> Matrix2C {
    let (s, c) = phi.sin_cos();
    Matrix2C::new(C64::new(c, -s), ZERO, ZERO, C64::new(c, s))
}

/// Largest entrywise modulus of a complex matrix or vector.
pub fn max_abs<R, Cc, S>(m: &nalgebra::Matrix<C64, R, Cc, S>) -> f64
where
    R: nalgebra::Dim,
    Cc: nalgebra::Dim,
    S: nalgebra::RawStorage<C64, R, Cc>,
{
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Complex dot product of a real 3-vector with a complex one, `r·z`.
pub fn real_dot(r: &Real3, z: &Complex3Vector) -> C64 {
    z[0] * r[0] + z[1] * r[1] + z[2] * r[2]
}

/// Promote a real 3-vector to complex entries.
pub fn complexify(r: &Real3) -> Complex3Vector {
    r.map(C64::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_entries_match_printed_form() {
        let s1 = pauli(1).unwrap();
        assert_eq!(
            s1,
            Matrix2C::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
        );
        let s2 = pauli(2).unwrap();
        assert_eq!(
            s2,
            Matrix2C::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
        );
        let s3 = pauli(3).unwrap();
        assert_eq!(
            s3,
            Matrix2C::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
        );
    }

    #[test]
    fn pauli_involution_hermitian_traceless() {
        for i in 1..=3 {
            let s = pauli(i).unwrap();
            assert_eq!(s * s, Matrix2C::identity());
            assert_eq!(s.adjoint(), s);
            assert_eq!(s.trace(), ZERO);
        }
    }

    #[test]
    fn out_of_range_indices() {
        assert_eq!(pauli(0), Err(Error::IndexOutOfRange { index: 0 }));
        assert_eq!(pauli(4), Err(Error::IndexOutOfRange { index: 4 }));
        assert!(sigma(0).is_err());
        assert!(sigma(7).is_err());
    }

    #[test]
    fn su2_commutators() {
        for i in 1..=3 {
            for j in 1..=3 {
                let lhs = commutator(&pauli(i).unwrap(), &pauli(j).unwrap());
                let mut rhs = Matrix2C::zeros();
                for k in 1..=3 {
                    rhs += pauli(k).unwrap() * (I * 2.0 * levi_civita(i, j, k));
                }
                assert!(max_abs(&(lhs - rhs)) <= 1e-15);
            }
        }
    }

    #[test]
    fn sigma_entries() {
        assert_eq!(sigma(3).unwrap()[(0, 1)], -I);
        assert_eq!(sigma(1).unwrap()[(1, 2)], -I);
        for k in 1..=3 {
            let s = sigma(k).unwrap();
            assert_eq!(s.adjoint(), s);
            for d in 0..3 {
                assert_eq!(s[(d, d)], ZERO);
            }
            assert!(s.iter().all(|z| z.re == 0.0));
        }
    }

    #[test]
    fn so3_commutators() {
        let comm = commutator(&sigma(1).unwrap(), &sigma(2).unwrap());
        assert!(max_abs(&(comm - sigma(3).unwrap() * I)) <= 1e-15);
        let comm = commutator(&sigma(2).unwrap(), &sigma(3).unwrap());
        assert!(max_abs(&(comm - sigma(1).unwrap() * I)) <= 1e-15);
    }

    #[test]
    fn rotation_identity_and_quarter_turn() {
        let w = Real3::new(0.3, -0.4, 0.5).normalize();
        let r = rotation_about_real(&w, 0.0).unwrap();
        assert_eq!(r, Matrix3::identity());

        let r = rotation_about_real(&Real3::z(), FRAC_PI_2).unwrap();
        assert!((r * Real3::x() - Real3::y()).norm() <= 1e-15);
        assert!((r * w.cross(&Real3::x())).norm() > 0.0);
    }

    #[test]
    fn rotation_fixes_axis_and_is_proper() {
        let w = Real3::new(1.0, 2.0, -2.0) / 3.0;
        let r = rotation_about_real(&w, 1.234).unwrap();
        assert!((r * w - w).norm() <= 1e-15);
        assert!((r.determinant() - 1.0).abs() <= 1e-14);
        assert!((r.transpose() * r - Matrix3::identity()).abs().max() <= 1e-15);
    }

    #[test]
    fn rotation_rejects_non_unit_axis() {
        let err = rotation_about(&Real3::new(1.0, 1.0, 0.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::NonUnitAxis { .. }));
    }

    #[test]
    fn helicity_phase_special_values() {
        assert_eq!(helicity_phase_matrix(0.0), Matrix2C::identity());
        let m = helicity_phase_matrix(PI);
        assert!(max_abs(&(m + Matrix2C::identity())) <= 1e-15);
        let m = helicity_phase_matrix(FRAC_PI_2);
        let expected = Matrix2C::new(-I, ZERO, ZERO, I);
        assert!(max_abs(&(m - expected)) <= 1e-15);
    }

    #[test]
    fn helicity_phase_is_exponential_of_sigma3() {
        // Taylor series of exp(-iσ₃φ) as an independent route.
        let phi = 0.77;
        let a = pauli(3).unwrap() * (-I * phi);
        let mut term = Matrix2C::identity();
        let mut sum = Matrix2C::identity();
        for n in 1..40 {
            term = term * a / C64::from(n as f64);
            sum += term;
        }
        assert!(max_abs(&(sum - helicity_phase_matrix(phi))) <= 1e-14);
    }
}
