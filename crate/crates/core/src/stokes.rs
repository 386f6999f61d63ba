//! Generalized Stokes parameters `ςᵢ = ã†σ̂ᵢã` in a local representation,
//! their transformation under a change of Stratton vector, and the
//! laboratory embedding `ς₁u + ς₂v + ς₃w`.

use std::io::Write;

use nalgebra::Vector3;

use crate::algebra::{pauli, Complex2Vector, Real3, C64};
use crate::error::{Error, Result};
use crate::frames::{LocalFrame, WaveVector};
use crate::par;
use crate::wavefield::{JonesWavefunction, MomentumGrid};

/// Accepted `|ã†ã - 1|` for a unit Jones vector.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// Default tolerance of [`intrinsic_check`].
pub const DEFAULT_INTRINSIC_TOL: f64 = 1e-9;

/// Relative factor for the default null threshold.
pub const NULL_THRESHOLD_FACTOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesParams {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesParams {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s1, s2, s3 }
    }

    pub fn as_vector(&self) -> Real3 {
        Vector3::new(self.s1, self.s2, self.s3)
    }

    pub fn from_vector(v: &Real3) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }
}

/// `ςᵢ = ã†σ̂ᵢã` for a unit Jones vector.
pub fn stokes_params(a: &Complex2Vector) -> Result<StokesParams> {
    let norm_sq = a.norm_squared();
    if !((norm_sq - 1.0).abs() <= UNIT_NORM_TOL) {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(expectations(a))
}

fn expectations(a: &Complex2Vector) -> StokesParams {
    let e = |i| a.dotc(&(pauli(i).expect("index in range") * a)).re;
    StokesParams::new(e(1), e(2), e(3))
}

/// Stokes parameters in the representation rotated by `Φ`: the transverse
/// pair turns by `-2Φ`, the longitudinal one is untouched.
pub fn transform_stokes(sp: &StokesParams, phi: f64) -> StokesParams {
    let (s, c) = (2.0 * phi).sin_cos();
    StokesParams {
        s1: sp.s1 * c + sp.s2 * s,
        s2: -sp.s1 * s + sp.s2 * c,
        s3: sp.s3,
    }
}

/// `ς = ς₁u + ς₂v + ς₃w` in laboratory coordinates.
pub fn lab_stokes(sp: &StokesParams, frame: &LocalFrame) -> Real3 {
    frame.to_lab(&sp.as_vector())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesNode {
    pub k: WaveVector,
    pub weight: f64,
    /// `None` where the sample norm fell below the null threshold.
    pub params: Option<StokesParams>,
}

/// Per-node Stokes parameters of a Jones wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesField {
    nodes: Vec<StokesNode>,
}

impl StokesField {
    pub fn nodes(&self) -> &[StokesNode] {
        &self.nodes
    }

    pub fn defined_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.params.is_some()).count()
    }

    /// Rows `kx,ky,kz,s1,s2,s3,defined`; undefined rows carry `NaN`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kx", "ky", "kz", "s1", "s2", "s3", "defined"])?;
        for n in &self.nodes {
            let k = n.k.to_array();
            let (s, flag) = match n.params {
                Some(p) => ([p.s1, p.s2, p.s3], "1"),
                None => ([f64::NAN; 3], "0"),
            };
            let mut row: Vec<String> = k.iter().chain(s.iter()).map(|v| v.to_string()).collect();
            row.push(flag.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `1e-12 · max node norm`.
pub fn default_null_threshold(ft: &JonesWavefunction) -> f64 {
    let norms: Vec<f64> = ft.samples().iter().map(|s| s.norm()).collect();
    NULL_THRESHOLD_FACTOR * par::max_of(&norms)
}

/// Normalizes each node and evaluates its Stokes parameters. Nodes whose
/// norm is below `null_threshold` (or exactly zero) are left undefined.
pub fn stokes_field(
    ft: &JonesWavefunction,
    grid: &MomentumGrid,
    null_threshold: f64,
) -> Result<StokesField> {
    if ft.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: ft.len(),
        });
    }
    let nodes = par::map_indexed(grid.nodes(), |i, n| {
        let sample = ft.samples()[i];
        let norm = sample.norm();
        let params = if norm < null_threshold || norm == 0.0 {
            None
        } else {
            Some(expectations(&(sample / C64::from(norm))))
        };
        StokesNode {
            k: n.k,
            weight: n.weight,
            params,
        }
    });
    Ok(StokesField { nodes })
}

/// Constant Stokes triple certified over a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicUnitVector {
    pub n: StokesParams,
    /// Largest max-norm deviation of a defined node from the weighted mean.
    pub max_deviation: f64,
}

impl IntrinsicUnitVector {
    /// The local-frame field `n₁u + n₂v + n₃w` at one frame.
    pub fn in_frame(&self, frame: &LocalFrame) -> Real3 {
        lab_stokes(&self.n, frame)
    }
}

/// Returns the renormalized weighted-mean Stokes triple when every defined
/// node lies within `tol` (max-norm) of it, `None` otherwise.
pub fn intrinsic_check(sf: &StokesField, tol: f64) -> Result<Option<IntrinsicUnitVector>> {
    let defined: Vec<(f64, Real3)> = sf
        .nodes
        .iter()
        .filter_map(|n| n.params.map(|p| (n.weight, p.as_vector())))
        .collect();
    if defined.is_empty() {
        return Err(Error::AllNodesUndefined);
    }
    let weighted: Vec<Real3> = defined.iter().map(|(w, s)| s * *w).collect();
    let weights: Vec<f64> = defined.iter().map(|(w, _)| *w).collect();
    let mean = par::pairwise_sum(&weighted, Real3::zeros()) / par::pairwise_sum(&weights, 0.0);
    let deviations: Vec<f64> = defined.iter().map(|(_, s)| (s - mean).amax()).collect();
    let max_deviation = par::max_of(&deviations);
    if !(max_deviation <= tol) {
        return Ok(None);
    }
    let norm = mean.norm();
    if norm == 0.0 {
        return Ok(None);
    }
    Ok(Some(IntrinsicUnitVector {
        n: StokesParams::from_vector(&(mean / norm)),
        max_deviation,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{build_frame, StrattonVector};
    use crate::wavefield::GridNode;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn jv(a: (f64, f64), b: (f64, f64)) -> Complex2Vector {
        Complex2Vector::new(C64::new(a.0, a.1), C64::new(b.0, b.1))
    }

    fn close(a: &StokesParams, b: &StokesParams, tol: f64) -> bool {
        (a.as_vector() - b.as_vector()).amax() <= tol
    }

    #[test]
    fn eigenvector_stokes() {
        let s = FRAC_1_SQRT_2;
        let p = stokes_params(&jv((1.0, 0.0), (0.0, 0.0))).unwrap();
        assert!(close(&p, &StokesParams::new(0.0, 0.0, 1.0), 1e-15));
        let p = stokes_params(&jv((s, 0.0), (s, 0.0))).unwrap();
        assert!(close(&p, &StokesParams::new(1.0, 0.0, 0.0), 1e-15));
        let p = stokes_params(&jv((s, 0.0), (0.0, s))).unwrap();
        assert!(close(&p, &StokesParams::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            stokes_params(&jv((1.0, 0.0), (1.0, 0.0))),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn transform_examples() {
        let z = StokesParams::new(0.0, 0.0, 1.0);
        assert_eq!(transform_stokes(&z, 0.731), z);
        let x = StokesParams::new(1.0, 0.0, 0.0);
        assert!(close(
            &transform_stokes(&x, -FRAC_PI_2),
            &StokesParams::new(-1.0, 0.0, 0.0),
            1e-15
        ));
        assert_eq!(transform_stokes(&x, 0.0), x);
    }

    #[test]
    fn lab_embedding_examples() {
        let k = WaveVector::new(Real3::x()).unwrap();
        let f = build_frame(StrattonVector::z(), k).unwrap();
        assert_eq!(lab_stokes(&StokesParams::new(0.0, 0.0, 1.0), &f), f.w);
        assert_eq!(
            lab_stokes(&StokesParams::new(1.0, 0.0, 0.0), &f),
            Real3::new(0.0, 0.0, -1.0)
        );
        let p = StokesParams::new(0.48, -0.6, 0.64);
        assert!((lab_stokes(&p, &f).norm() - 1.0).abs() <= 1e-15);
    }

    fn ring_grid(n: usize) -> MomentumGrid {
        let nodes = (0..n)
            .map(|i| {
                let t = 0.3 + i as f64 * 0.05;
                GridNode {
                    k: WaveVector::new(Real3::new(t.cos(), t.sin(), 0.2)).unwrap(),
                    weight: 1.0,
                }
            })
            .collect();
        MomentumGrid::new(nodes).unwrap()
    }

    #[test]
    fn constant_field_is_intrinsic() {
        let grid = ring_grid(100);
        let ft = JonesWavefunction::constant(jv((3.0, 0.0), (0.0, 0.0)), 100, StrattonVector::z())
            .unwrap();
        let sf = stokes_field(&ft, &grid, default_null_threshold(&ft)).unwrap();
        assert_eq!(sf.defined_count(), 100);
        for n in sf.nodes() {
            assert_eq!(n.params, Some(StokesParams::new(0.0, 0.0, 1.0)));
        }
        let n = intrinsic_check(&sf, DEFAULT_INTRINSIC_TOL)
            .unwrap()
            .unwrap();
        assert_eq!(n.n, StokesParams::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn null_and_alternating_nodes() {
        let grid = ring_grid(4);
        let samples = vec![
            jv((1.0, 0.0), (0.0, 0.0)),
            jv((0.0, 0.0), (0.0, 0.0)),
            jv((0.0, 0.0), (0.0, 2.0)),
            jv((1.0, 0.0), (0.0, 0.0)),
        ];
        let ft = JonesWavefunction::new(samples, StrattonVector::z()).unwrap();
        let sf = stokes_field(&ft, &grid, default_null_threshold(&ft)).unwrap();
        let p: Vec<_> = sf.nodes().iter().map(|n| n.params).collect();
        assert_eq!(p[0], Some(StokesParams::new(0.0, 0.0, 1.0)));
        assert_eq!(p[1], None);
        assert_eq!(p[2], Some(StokesParams::new(0.0, 0.0, -1.0)));
        assert_eq!(intrinsic_check(&sf, 1e-9).unwrap(), None);
    }

    #[test]
    fn one_odd_node_breaks_constancy() {
        let grid = ring_grid(5);
        let s = FRAC_1_SQRT_2;
        let mut samples = vec![jv((1.0, 0.0), (0.0, 0.0)); 5];
        samples[2] = jv((s, 0.0), (s, 0.0));
        let ft = JonesWavefunction::new(samples, StrattonVector::z()).unwrap();
        let sf = stokes_field(&ft, &grid, 0.0).unwrap();
        assert_eq!(intrinsic_check(&sf, 1e-9).unwrap(), None);
    }

    #[test]
    fn all_null_is_an_error() {
        let grid = ring_grid(3);
        let ft =
            JonesWavefunction::constant(Complex2Vector::zeros(), 3, StrattonVector::z()).unwrap();
        let sf = stokes_field(&ft, &grid, default_null_threshold(&ft)).unwrap();
        assert_eq!(intrinsic_check(&sf, 1e-9), Err(Error::AllNodesUndefined));
    }

    #[test]
    fn csv_has_header_and_flags() {
        let grid = ring_grid(2);
        let ft = JonesWavefunction::new(
            vec![jv((1.0, 0.0), (0.0, 0.0)), Complex2Vector::zeros()],
            StrattonVector::z(),
        )
        .unwrap();
        let sf = stokes_field(&ft, &grid, default_null_threshold(&ft)).unwrap();
        let mut buf = Vec::new();
        sf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kx,ky,kz,s1,s2,s3,defined");
        assert!(lines[1].ends_with(",0,0,1,1"));
        assert!(lines[2].ends_with(",NaN,NaN,NaN,0"));
    }
}
