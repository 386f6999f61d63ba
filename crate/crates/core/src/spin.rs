//! Spin angular momentum of a state, evaluated either in the laboratory
//! form `ħ(-i f*×f)` or in the local form `f̃†(ħσ̂₃)f̃ w`.

use serde::Serialize;

use crate::algebra::{max_abs, pauli, sigma_dot, Matrix3C, Real3, C64};
use crate::error::{Error, Result};
use crate::par;
use crate::wavefield::{
    require_transverse, JonesWavefunction, MomentumGrid, VectorWavefunction, TRANSVERSE_TOL,
};

/// Spin expectation in laboratory coordinates, in units where `ħ` is the
/// caller-supplied value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinVector(pub Real3);

/// JSON payload `{"S":[Sx,Sy,Sz],"norm":n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinReport {
    #[serde(rename = "S")]
    pub s: [f64; 3],
    pub norm: f64,
}

/// Numerator and denominator of the spin ratio from one pass over the
/// nodes.
fn ratio<F>(grid: &MomentumGrid, per_node: F) -> Result<(SpinVector, f64)>
where
    F: Fn(usize) -> (Real3, f64) + Sync + Send,
{
    let terms = par::map_indexed(grid.nodes(), |i, n| {
        let (num, den) = per_node(i);
        (num * n.weight, den * n.weight)
    });
    let nums: Vec<Real3> = terms.iter().map(|t| t.0).collect();
    let dens: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let norm = par::pairwise_sum(&dens, 0.0);
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((
        SpinVector(par::pairwise_sum(&nums, Real3::zeros()) / norm),
        norm,
    ))
}

fn check_len(grid: &MomentumGrid, n: usize) -> Result<()> {
    if grid.len() != n {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: n,
        });
    }
    Ok(())
}

/// `S = ∫ f̃†(ħσ̂₃)f̃ w / ∫ f̃†f̃`, also returning the denominator.
pub fn spin_total_local_with_norm(
    ft: &JonesWavefunction,
    grid: &MomentumGrid,
    hbar: f64,
) -> Result<(SpinVector, f64)> {
    check_len(grid, ft.len())?;
    let dens = helicity_density(ft);
    ratio(grid, |i| {
        let w = grid.nodes()[i].k.direction();
        (w * (hbar * dens[i]), ft.samples()[i].norm_squared())
    })
}

pub fn spin_total_local(
    ft: &JonesWavefunction,
    grid: &MomentumGrid,
    hbar: f64,
) -> Result<SpinVector> {
    Ok(spin_total_local_with_norm(ft, grid, hbar)?.0)
}

/// `-i f* × f`, the per-node value of `f†Σf`.
pub fn spin_density_lab(f: &nalgebra::Vector3<C64>) -> Real3 {
    let fc = f.map(|z| z.conj());
    let cross = fc.cross(f);
    (cross * C64::new(0.0, -1.0)).map(|z| z.re)
}

/// `S = ∫ ħ(-i f*×f) / ∫ f†f` on a transverse vector wavefunction, also
/// returning the denominator.
pub fn spin_total_lab_with_norm(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    hbar: f64,
) -> Result<(SpinVector, f64)> {
    check_len(grid, f.len())?;
    require_transverse(f, grid, TRANSVERSE_TOL)?;
    ratio(grid, |i| {
        let s = &f.samples()[i];
        (spin_density_lab(s) * hbar, s.norm_squared())
    })
}

pub fn spin_total_lab(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    hbar: f64,
) -> Result<SpinVector> {
    Ok(spin_total_lab_with_norm(f, grid, hbar)?.0)
}

/// Unnormalized `f̃†σ̂₃f̃` at every node.
pub fn helicity_density(ft: &JonesWavefunction) -> Vec<f64> {
    let s3 = pauli(3).expect("index in range");
    par::map_indexed(ft.samples(), |_, a| a.dotc(&(s3 * a)).re)
}

/// Components of the reduced spin operator `Ŝ = ħ(Σ·w)w` at one direction.
pub fn reduced_spin_operators(w: &Real3, hbar: f64) -> [Matrix3C; 3] {
    let base = sigma_dot(w) * C64::from(hbar);
    [
        base * C64::from(w[0]),
        base * C64::from(w[1]),
        base * C64::from(w[2]),
    ]
}

/// Largest entry of `[Ŝ_x,Ŝ_y]`, `[Ŝ_y,Ŝ_z]`, `[Ŝ_z,Ŝ_x]`.
pub fn reduced_spin_commutator_residual(w: &Real3, hbar: f64) -> f64 {
    let [sx, sy, sz] = reduced_spin_operators(w, hbar);
    let c = |a: &Matrix3C, b: &Matrix3C| max_abs(&(a * b - b * a));
    c(&sx, &sy).max(c(&sy, &sz)).max(c(&sz, &sx))
}
