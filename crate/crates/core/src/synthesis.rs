//! Position-space electric field synthesized from a momentum-grid vector
//! wavefunction, and its analytic divergence.
//!
//! The field is the quadrature of
//! `(2π)^{-3/2} ∫ (ħω/2ε₀)^{1/2} f(k) e^{i(k·x - ωt)} d³k + c.c.` with
//! `ω = c|k|`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::algebra::{real_dot, Complex3Vector, Real3, C64};
use crate::error::{Error, Result};
use crate::par;
use crate::wavefield::{require_transverse, MomentumGrid, VectorWavefunction, TRANSVERSE_TOL};

/// Physical constants; all default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub epsilon0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            epsilon0: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: Real3,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: Real3, t: f64) -> Self {
        Self { x, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: Real3,
    pub t: f64,
    pub e: Real3,
    /// `max |Im E| / max(|E|, tiny)` of the folded sum.
    pub imag_residual: f64,
}

fn prefactor() -> f64 {
    (2.0 * PI).powf(-1.5)
}

/// Per-node `weight · (ħω/2ε₀)^{1/2}`.
fn amplitudes(grid: &MomentumGrid, consts: &PhysicalConstants) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|n| {
            n.weight * (consts.hbar * consts.c * n.k.magnitude() / (2.0 * consts.epsilon0)).sqrt()
        })
        .collect()
}

fn phase(k: &Real3, omega: f64, p: &SpaceTimePoint) -> C64 {
    C64::from_polar(1.0, k.dot(&p.x) - omega * p.t)
}

/// `Σᵢ aᵢ f(kᵢ) e^{i(kᵢ·x - ωᵢt)}` at one point, with cascade summation.
fn half_sum(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    amps: &[f64],
    consts: &PhysicalConstants,
    p: &SpaceTimePoint,
) -> Complex3Vector {
    let terms: Vec<Complex3Vector> = grid
        .nodes()
        .iter()
        .zip(f.samples())
        .zip(amps)
        .map(|((n, s), a)| s * (phase(n.k.as_vector(), consts.c * n.k.magnitude(), p) * *a))
        .collect();
    par::pairwise_sum(&terms, Complex3Vector::zeros()) * C64::from(prefactor())
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

/// Real field `E(x, t)` at each point.
pub fn synthesize_field(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    points: &[SpaceTimePoint],
    consts: &PhysicalConstants,
) -> Result<Vec<FieldSample>> {
    check_len(grid, f.len())?;
    require_transverse(f, grid, TRANSVERSE_TOL)?;
    let amps = amplitudes(grid, consts);
    Ok(par::map_indexed(points, |_, p| {
        let z = half_sum(f, grid, &amps, consts, p);
        let folded = z + z.map(|c| c.conj());
        let re = folded.map(|c| c.re);
        let im = folded.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
        FieldSample {
            x: p.x,
            t: p.t,
            e: re,
            imag_residual: im / re.amax().max(f64::MIN_POSITIVE),
        }
    }))
}

/// Largest `|∇·E|` over the points, evaluated term by term as
/// `2(2π)^{-3/2} Σᵢ aᵢ Re[i(kᵢ·f(kᵢ)) e^{i(kᵢ·x - ωᵢt)}]` and divided by
/// `max|k| · B`, where `B = 2(2π)^{-3/2} Σᵢ aᵢ ‖f(kᵢ)‖` bounds `|E|`
/// everywhere. Returns 0 for a zero field.
pub fn divergence_residual(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    points: &[SpaceTimePoint],
    consts: &PhysicalConstants,
) -> Result<f64> {
    check_len(grid, f.len())?;
    let amps = amplitudes(grid, consts);
    let longitudinal: Vec<C64> = grid
        .nodes()
        .iter()
        .zip(f.samples())
        .map(|(n, s)| real_dot(n.k.as_vector(), s) * C64::new(0.0, 1.0))
        .collect();
    let bound_terms: Vec<f64> = f
        .samples()
        .iter()
        .zip(&amps)
        .map(|(s, a)| a * s.norm())
        .collect();
    let bound = 2.0 * prefactor() * par::pairwise_sum(&bound_terms, 0.0);
    let kmax = grid
        .nodes()
        .iter()
        .fold(0.0_f64, |m, n| m.max(n.k.magnitude()));
    let scale = kmax * bound;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let divs = par::map_indexed(points, |_, p| {
        let terms: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&longitudinal)
            .zip(&amps)
            .map(|((n, l), a)| a * (l * phase(n.k.as_vector(), consts.c * n.k.magnitude(), p)).re)
            .collect();
        (2.0 * prefactor() * par::pairwise_sum(&terms, 0.0)).abs()
    });
    Ok(par::max_of(&divs) / scale)
}

/// Reads `x,y,z,t` rows (header required).
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<SpaceTimePoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<(f64, f64, f64, f64)>().enumerate() {
        let (x, y, z, t) = rec.map_err(|e| Error::Parse(format!("points row {}: {e}", i + 1)))?;
        out.push(SpaceTimePoint::new(Real3::new(x, y, z), t));
    }
    Ok(out)
}

/// Writes `x,y,z,t,Ex,Ey,Ez` rows.
pub fn write_field_csv<W: Write>(samples: &[FieldSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "z", "t", "Ex", "Ey", "Ez"])?;
    for s in samples {
        let row = [s.x[0], s.x[1], s.x[2], s.t, s.e[0], s.e[1], s.e[2]].map(|v| v.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
