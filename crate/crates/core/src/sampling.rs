//! Seeded random generators for frames, Jones vectors and transverse
//! wavefunctions. Everything draws from a caller-owned [`ChaCha8Rng`] so a
//! seed fixes the whole stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Complex2Vector, Complex3Vector, Real3, C64};
use crate::frames::{build_frame, quasi_unitary, StrattonVector, WaveVector, PARALLEL_EPS};
use crate::wavefield::{GridNode, MomentumGrid, VectorWavefunction};

pub use rand::SeedableRng;
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for case `case` of battery `battery`; lets parallel
/// workers draw without sharing state.
pub fn case_rng(seed: u64, battery: u32, case: u32) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((battery as u64) << 32) | case as u64);
    r
}

/// Isotropic unit vector.
pub fn unit_vector(rng: &mut SeededRng) -> Real3 {
    loop {
        let v = Real3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

pub fn stratton_vector(rng: &mut SeededRng) -> StrattonVector {
    StrattonVector::normalized(unit_vector(rng)).expect("nonzero")
}

/// Random direction with magnitude in `[0.1, 10)`.
pub fn wave_vector(rng: &mut SeededRng) -> WaveVector {
    let mag = 0.1 + 9.9 * rng.gen::<f64>();
    WaveVector::new(unit_vector(rng) * mag).expect("nonzero")
}

/// A wave vector that makes a usable frame with `sv` (rejects the rare
/// draws within 1e-3 rad of the singular axis).
pub fn wave_vector_for(rng: &mut SeededRng, sv: StrattonVector) -> WaveVector {
    loop {
        let k = wave_vector(rng);
        if sv.as_vector().cross(&k.direction()).norm() > 1e3 * PARALLEL_EPS.max(1e-6) {
            return k;
        }
    }
}

pub fn complex(rng: &mut SeededRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed unit Jones vector.
pub fn unit_jones(rng: &mut SeededRng) -> Complex2Vector {
    loop {
        let v = Complex2Vector::new(complex(rng), complex(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / C64::from(n);
        }
    }
}

/// Random angle in `(-π, π)`.
pub fn angle(rng: &mut SeededRng) -> f64 {
    std::f64::consts::PI * (2.0 * rng.gen::<f64>() - 1.0)
}

/// `n` random momenta with positive weights, all admissible for each SV
/// listed in `avoid`.
pub fn grid(rng: &mut SeededRng, n: usize, avoid: &[StrattonVector]) -> MomentumGrid {
    let nodes = (0..n)
        .map(|_| loop {
            let k = wave_vector(rng);
            if avoid.iter().all(|sv| {
                build_frame(*sv, k).is_ok() && sv.as_vector().cross(&k.direction()).norm() > 1e-3
            }) {
                break GridNode {
                    k,
                    weight: 0.1 + rng.gen::<f64>(),
                };
            }
        })
        .collect();
    MomentumGrid::new(nodes).expect("positive weights")
}

/// Random complex 3-vector projected onto the plane transverse to `k`.
pub fn transverse_sample(rng: &mut SeededRng, k: &WaveVector) -> Complex3Vector {
    let w = k.direction();
    let raw = Complex3Vector::new(complex(rng), complex(rng), complex(rng));
    let along = raw[0] * w[0] + raw[1] * w[1] + raw[2] * w[2];
    raw - w.map(C64::from) * along
}

/// Random transverse vector wavefunction on `grid`.
pub fn transverse_wavefunction(rng: &mut SeededRng, grid: &MomentumGrid) -> VectorWavefunction {
    let samples = grid
        .nodes()
        .iter()
        .map(|n| transverse_sample(rng, &n.k))
        .collect();
    VectorWavefunction::new(samples).expect("finite")
}

/// Transverse wavefunction built exactly as `ϖ f̃` in the frame of `sv`,
/// so its transversality residual sits at the rounding floor.
pub fn frame_built_wavefunction(
    rng: &mut SeededRng,
    grid: &MomentumGrid,
    sv: StrattonVector,
) -> VectorWavefunction {
    let samples = grid
        .nodes()
        .iter()
        .map(|n| {
            let q = quasi_unitary(&build_frame(sv, n.k).expect("admissible grid"));
            q.apply(&Complex2Vector::new(complex(rng), complex(rng)))
        })
        .collect();
    VectorWavefunction::new(samples).expect("finite")
}
