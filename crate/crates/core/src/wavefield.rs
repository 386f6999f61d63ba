//! Momentum grids, vector and Jones wavefunctions, and the quasi-unitary
//! conversion between them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{helicity_phase_matrix, real_dot, Complex2Vector, Complex3Vector, C64};
use crate::error::{Error, Result};
use crate::frames::{
    angle_between, build_frame, quasi_unitary, LocalFrame, QuasiUnitary, StrattonVector, WaveVector,
};
use crate::par;

/// Largest transversality residual accepted by the conversions.
pub const TRANSVERSE_TOL: f64 = 1e-9;

/// Amplitude floor used when normalizing the transversality residual.
pub const AMPLITUDE_FLOOR: f64 = 1e-300;

/// Tolerances for a [`PolarizationVector`].
pub const POLARIZATION_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub k: WaveVector,
    pub weight: f64,
}

/// Quadrature nodes `(kᵢ, weightᵢ)` in momentum space.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    nodes: Vec<GridNode>,
}

impl MomentumGrid {
    pub fn new(nodes: Vec<GridNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGrid {
                reason: "grid has no nodes".into(),
            });
        }
        if let Some(i) = nodes
            .iter()
            .position(|n| !(n.weight > 0.0 && n.weight.is_finite()))
        {
            return Err(Error::InvalidGrid {
                reason: format!("node {i} has non-positive weight {}", nodes[i].weight),
            });
        }
        Ok(Self { nodes })
    }

    /// Single node of unit weight.
    pub fn single(k: WaveVector) -> Self {
        Self {
            nodes: vec![GridNode { k, weight: 1.0 }],
        }
    }

    /// Shell of radius `radius`: Gauss-Legendre in `cos θ` times a uniform
    /// longitude rule. Weights are surface elements and sum to `4π r²`.
    pub fn sphere_shell(n_lon: usize, n_lat: usize, radius: f64) -> Result<Self> {
        if n_lon == 0 || n_lat == 0 || !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGrid {
                reason: format!("bad shell parameters n_lon={n_lon} n_lat={n_lat} radius={radius}"),
            });
        }
        let (mu, wmu) = gauss_legendre(n_lat);
        let dphi = 2.0 * PI / n_lon as f64;
        let mut nodes = Vec::with_capacity(n_lon * n_lat);
        for (&ct, &wt) in mu.iter().zip(&wmu) {
            let st = (1.0 - ct * ct).sqrt();
            for j in 0..n_lon {
                // Half-step longitude offset keeps nodes off the x-z plane.
                let phi = (j as f64 + 0.5) * dphi;
                let k = WaveVector::new(nalgebra::Vector3::new(
                    radius * st * phi.cos(),
                    radius * st * phi.sin(),
                    radius * ct,
                ))?;
                nodes.push(GridNode {
                    k,
                    weight: radius * radius * wt * dphi,
                });
            }
        }
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let w: Vec<f64> = self.nodes.iter().map(|n| n.weight).collect();
        par::pairwise_sum(&w, 0.0)
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                actual,
            });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 1..=n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p2) / j as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Three-component samples `f(kᵢ)` in laboratory coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorWavefunction {
    samples: Vec<Complex3Vector>,
}

impl VectorWavefunction {
    pub fn new(samples: Vec<Complex3Vector>) -> Result<Self> {
        if let Some(i) = samples
            .iter()
            .position(|s| !s.iter().all(|z| z.is_finite()))
        {
            return Err(Error::Parse(format!(
                "non-finite vector sample at node {i}"
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Complex3Vector] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Two-component samples `f̃(kᵢ)` in the local representation of `sv`.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesWavefunction {
    samples: Vec<Complex2Vector>,
    sv: StrattonVector,
}

impl JonesWavefunction {
    pub fn new(samples: Vec<Complex2Vector>, sv: StrattonVector) -> Result<Self> {
        if let Some(i) = samples
            .iter()
            .position(|s| !s.iter().all(|z| z.is_finite()))
        {
            return Err(Error::Parse(format!("non-finite Jones sample at node {i}")));
        }
        Ok(Self { samples, sv })
    }

    /// The same Jones vector at every node.
    pub fn constant(value: Complex2Vector, n: usize, sv: StrattonVector) -> Result<Self> {
        Self::new(vec![value; n], sv)
    }

    pub fn samples(&self) -> &[Complex2Vector] {
        &self.samples
    }

    pub fn stratton_vector(&self) -> StrattonVector {
        self.sv
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Unit transverse polarization vector `a` at momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    a: Complex3Vector,
    k: WaveVector,
}

impl PolarizationVector {
    pub fn new(a: Complex3Vector, k: WaveVector) -> Result<Self> {
        let norm_sq = a.norm_squared();
        if (norm_sq - 1.0).abs() > POLARIZATION_NORM_TOL {
            return Err(Error::InvalidPolarization {
                reason: format!("a†a = {norm_sq}"),
            });
        }
        let long = real_dot(&k.direction(), &a).norm();
        if long > TRANSVERSE_TOL {
            return Err(Error::InvalidPolarization {
                reason: format!("|k̂·a| = {long:e}"),
            });
        }
        Ok(Self { a, k })
    }

    pub(crate) fn new_unchecked(a: Complex3Vector, k: WaveVector) -> Self {
        Self { a, k }
    }

    pub fn vector(&self) -> &Complex3Vector {
        &self.a
    }

    pub fn wave_vector(&self) -> WaveVector {
        self.k
    }
}

/// Anything with one amplitude per grid node.
pub trait NodeSamples {
    fn node_count(&self) -> usize;
    fn density(&self, i: usize) -> f64;
}

impl NodeSamples for VectorWavefunction {
    fn node_count(&self) -> usize {
        self.samples.len()
    }
    fn density(&self, i: usize) -> f64 {
        self.samples[i].norm_squared()
    }
}

impl NodeSamples for JonesWavefunction {
    fn node_count(&self) -> usize {
        self.samples.len()
    }
    fn density(&self, i: usize) -> f64 {
        self.samples[i].norm_squared()
    }
}

fn node_residual(k: &WaveVector, f: &Complex3Vector) -> f64 {
    let amp = f.norm();
    if amp == 0.0 {
        return 0.0;
    }
    real_dot(&k.direction(), f).norm() / amp.max(AMPLITUDE_FLOOR)
}

/// Per-node `|k̂·f| / ‖f‖`.
pub fn transversality_residuals(f: &VectorWavefunction, grid: &MomentumGrid) -> Result<Vec<f64>> {
    grid.check_len(f.len())?;
    Ok(par::map_indexed(grid.nodes(), |i, n| {
        node_residual(&n.k, &f.samples[i])
    }))
}

/// Largest per-node `|k̂·f| / ‖f‖`; zero-amplitude nodes contribute 0.
pub fn transversality_residual(f: &VectorWavefunction, grid: &MomentumGrid) -> Result<f64> {
    Ok(par::max_of(&transversality_residuals(f, grid)?))
}

pub(crate) fn require_transverse(
    f: &VectorWavefunction,
    grid: &MomentumGrid,
    tol: f64,
) -> Result<()> {
    let residuals = transversality_residuals(f, grid)?;
    let (node, residual) =
        residuals
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, v)| {
                if v > bv || v.is_nan() && !bv.is_nan() {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    if residual > tol || residual.is_nan() {
        return Err(Error::NotTransverse {
            node: Some(node),
            residual,
        });
    }
    Ok(())
}

fn frame_at(sv: StrattonVector, node: &GridNode, i: usize) -> Result<LocalFrame> {
    build_frame(sv, node.k).map_err(|e| match e {
        Error::DegenerateFrame { .. } => Error::DegenerateFrame { node: Some(i) },
        other => other,
    })
}

/// `ϖ(I, kᵢ)` at every node.
pub fn quasi_unitaries(sv: StrattonVector, grid: &MomentumGrid) -> Result<Vec<QuasiUnitary>> {
    par::try_map_indexed(grid.nodes(), |i, n| Ok(quasi_unitary(&frame_at(sv, n, i)?)))
}

/// `f̃(kᵢ) = ϖ†(I, kᵢ) f(kᵢ)`.
pub fn to_jones(
    f: &VectorWavefunction,
    sv: StrattonVector,
    grid: &MomentumGrid,
) -> Result<JonesWavefunction> {
    grid.check_len(f.len())?;
    require_transverse(f, grid, TRANSVERSE_TOL)?;
    let samples = par::try_map_indexed(grid.nodes(), |i, n| {
        let q = quasi_unitary(&frame_at(sv, n, i)?);
        Ok(q.project(&f.samples[i]))
    })?;
    Ok(JonesWavefunction { samples, sv })
}

/// `f(kᵢ) = ϖ(I, kᵢ) f̃(kᵢ)` with `I` taken from the Jones wavefunction.
pub fn to_vector(ft: &JonesWavefunction, grid: &MomentumGrid) -> Result<VectorWavefunction> {
    grid.check_len(ft.len())?;
    let samples = par::try_map_indexed(grid.nodes(), |i, n| {
        let q = quasi_unitary(&frame_at(ft.sv, n, i)?);
        Ok(q.apply(&ft.samples[i]))
    })?;
    Ok(VectorWavefunction { samples })
}

/// Per-node `Φᵢ` from the representation of `sv` to that of `sv_prime`.
pub fn frame_angles(
    sv: StrattonVector,
    sv_prime: StrattonVector,
    grid: &MomentumGrid,
) -> Result<Vec<f64>> {
    par::try_map_indexed(grid.nodes(), |i, n| {
        let f = frame_at(sv, n, i)?;
        let fp = frame_at(sv_prime, n, i)?;
        Ok(angle_between(&f, &fp))
    })
}

/// Re-expresses a Jones wavefunction in the representation of `sv_prime`:
/// `f̃'(kᵢ) = exp(iσ̂₃Φᵢ) f̃(kᵢ)`.
pub fn change_sv(
    ft: &JonesWavefunction,
    sv_prime: StrattonVector,
    grid: &MomentumGrid,
) -> Result<JonesWavefunction> {
    grid.check_len(ft.len())?;
    let angles = frame_angles(ft.sv, sv_prime, grid)?;
    let samples = par::map_indexed(&angles, |i, &phi| {
        helicity_phase_matrix(-phi) * ft.samples[i]
    });
    Ok(JonesWavefunction {
        samples,
        sv: sv_prime,
    })
}

/// `Σᵢ weightᵢ · sampleᵢ† sampleᵢ` with cascade summation.
pub fn norm_squared<S: NodeSamples + Sync>(samples: &S, grid: &MomentumGrid) -> Result<f64> {
    grid.check_len(samples.node_count())?;
    let terms = par::map_indexed(grid.nodes(), |i, n| n.weight * samples.density(i));
    Ok(par::pairwise_sum(&terms, 0.0))
}

/// Which wavefunction a document carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Vector,
    Jones,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub k: [f64; 3],
    pub weight: f64,
    pub f: Vec<[f64; 2]>,
}

/// Grid + wavefunction interchange document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefieldDocument {
    pub nodes: Vec<NodeRecord>,
    pub representation: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sv: Option<[f64; 3]>,
}

/// Parsed form of a [`WavefieldDocument`].
#[derive(Debug, Clone, PartialEq)]
pub enum Wavefield {
    Vector {
        grid: MomentumGrid,
        f: VectorWavefunction,
        sv: Option<StrattonVector>,
    },
    Jones {
        grid: MomentumGrid,
        ft: JonesWavefunction,
    },
}

fn c(pair: [f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl Wavefield {
    pub fn grid(&self) -> &MomentumGrid {
        match self {
            Wavefield::Vector { grid, .. } | Wavefield::Jones { grid, .. } => grid,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WavefieldDocument = serde_json::from_str(text)?;
        Self::from_document(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_document(doc: WavefieldDocument) -> Result<Self> {
        let width = match doc.representation {
            Representation::Vector => 3,
            Representation::Jones => 2,
        };
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, rec) in doc.nodes.iter().enumerate() {
            if rec.f.len() != width {
                return Err(Error::Parse(format!(
                    "node {i}: expected {width} complex components, got {}",
                    rec.f.len()
                )));
            }
            let k = WaveVector::from_array(rec.k)
                .map_err(|e| Error::Parse(format!("node {i}: {e}")))?;
            nodes.push(GridNode {
                k,
                weight: rec.weight,
            });
        }
        let grid = MomentumGrid::new(nodes).map_err(|e| Error::Parse(e.to_string()))?;
        let sv = doc
            .sv
            .map(|s| StrattonVector::normalized(s.into()))
            .transpose()
            .map_err(|e| Error::Parse(e.to_string()))?;
        match doc.representation {
            Representation::Vector => {
                let samples = doc
                    .nodes
                    .iter()
                    .map(|r| Complex3Vector::new(c(r.f[0]), c(r.f[1]), c(r.f[2])))
                    .collect();
                Ok(Wavefield::Vector {
                    grid,
                    f: VectorWavefunction::new(samples)?,
                    sv,
                })
            }
            Representation::Jones => {
                let sv =
                    sv.ok_or_else(|| Error::Parse("jones representation requires \"sv\"".into()))?;
                let samples = doc
                    .nodes
                    .iter()
                    .map(|r| Complex2Vector::new(c(r.f[0]), c(r.f[1])))
                    .collect();
                Ok(Wavefield::Jones {
                    grid,
                    ft: JonesWavefunction::new(samples, sv)?,
                })
            }
        }
    }

    pub fn to_document(&self) -> WavefieldDocument {
        let grid = self.grid();
        let (representation, sv, fs): (_, _, Vec<Vec<[f64; 2]>>) = match self {
            Wavefield::Vector { f, sv, .. } => (
                Representation::Vector,
                sv.map(|s| s.to_array()),
                f.samples
                    .iter()
                    .map(|s| s.iter().map(|&z| pair(z)).collect())
                    .collect(),
            ),
            Wavefield::Jones { ft, .. } => (
                Representation::Jones,
                Some(ft.sv.to_array()),
                ft.samples
                    .iter()
                    .map(|s| s.iter().map(|&z| pair(z)).collect())
                    .collect(),
            ),
        };
        WavefieldDocument {
            nodes: grid
                .nodes()
                .iter()
                .zip(fs)
                .map(|(n, f)| NodeRecord {
                    k: n.k.to_array(),
                    weight: n.weight,
                    f,
                })
                .collect(),
            representation,
            sv,
        }
    }
}
