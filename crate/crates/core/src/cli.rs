//! Command-line front end. [`run`] does all the work so tests can drive it
//! without spawning a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::algebra::{Complex3Vector, Real3, C64};
use crate::checks::{self, CheckConfig};
use crate::dynamics::{
    eigenstate, optical_rotation, polarization_vector, rotate_sv, sv_loop_phase, PlaneWaveState,
};
use crate::error::{Error, Result};
use crate::frames::{angle_between, build_frame, quasi_unitary, StrattonVector, WaveVector};
use crate::spin::{spin_total_lab_with_norm, spin_total_local_with_norm, SpinReport};
use crate::stokes::{default_null_threshold, stokes_field};
use crate::synthesis::{read_points_csv, synthesize_field, write_field_csv, PhysicalConstants};
use crate::wavefield::{
    change_sv, to_jones, to_vector, JonesWavefunction, MomentumGrid, Wavefield,
};

/// Relative deviation of `|sv|` from 1 above which loading warns.
pub const SV_WARN_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "photon-frames",
    version,
    about = "Photon polarization algebra in Stratton-vector local frames"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Stratton vector, `x,y,z`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sv: Option<String>,
    /// Target Stratton vector, `x,y,z`
    #[arg(long = "sv-prime", global = true, allow_hyphen_values = true)]
    pub sv_prime: Option<String>,
    /// Wave vector, `x,y,z`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, global = true, default_value_t = checks::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub epsilon0: f64,
    #[arg(long, global = true, default_value_t = checks::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Local triad, quasi-unitary matrix and triad residuals at one k
    Frame,
    /// Convert a wavefield between vector and Jones representations
    Jones,
    /// Per-node Stokes parameters as CSV
    Stokes,
    /// Re-express a wavefield in the representation of --sv-prime
    Transform {
        /// Apply the inverse change and report the largest residual
        #[arg(long)]
        round_trip: bool,
    },
    /// Normalized total spin as JSON
    Spin,
    /// Turn the Stratton vector of a plane-wave eigenstate from --sv to --sv-prime
    Rotate {
        /// Pauli axis of the eigenstate (1, 2 or 3)
        #[arg(long, default_value_t = 3)]
        axis: usize,
        /// Eigenvalue (+1 or -1)
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
    },
    /// Geometric phase of a Stratton-vector loop
    Berry,
    /// Electric field at space-time points
    Synth {
        /// CSV of x,y,z,t rows
        #[arg(long)]
        points: PathBuf,
    },
    /// Seeded invariant battery
    Check {
        /// Add a fixture with a longitudinal component
        #[arg(long)]
        inject_longitudinal: bool,
    },
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sv: Option<StrattonVector>,
    pub sv_prime: Option<StrattonVector>,
    pub k: Option<WaveVector>,
    pub tol: f64,
    pub consts: PhysicalConstants,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub warnings: Vec<String>,
}

/// Parses `x,y,z`.
pub fn parse_triple(flag: &str, s: &str) -> Result<Real3> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("--{flag}: expected x,y,z, got {s:?}")));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| Error::Parse(format!("--{flag}: not a number: {p:?}")))?;
    }
    Ok(Real3::from(v))
}

fn load_sv(flag: &str, s: &str, warnings: &mut Vec<String>) -> Result<StrattonVector> {
    let v = parse_triple(flag, s)?;
    let norm = v.norm();
    let sv = StrattonVector::normalized(v).map_err(|e| Error::Parse(format!("--{flag}: {e}")))?;
    if (norm - 1.0).abs() > SV_WARN_TOL {
        warnings.push(format!("--{flag} has norm {norm}; renormalized"));
    }
    Ok(sv)
}

impl RunConfig {
    pub fn from_args(a: &CommonArgs) -> Result<Self> {
        let mut warnings = Vec::new();
        let sv =
            a.sv.as_deref()
                .map(|s| load_sv("sv", s, &mut warnings))
                .transpose()?;
        let sv_prime = a
            .sv_prime
            .as_deref()
            .map(|s| load_sv("sv-prime", s, &mut warnings))
            .transpose()?;
        let k =
            a.k.as_deref()
                .map(|s| {
                    WaveVector::new(parse_triple("k", s)?)
                        .map_err(|e| Error::Parse(format!("--k: {e}")))
                })
                .transpose()?;
        if !(a.tol > 0.0) {
            return Err(Error::Parse(format!(
                "--tol must be positive, got {}",
                a.tol
            )));
        }
        Ok(Self {
            sv,
            sv_prime,
            k,
            tol: a.tol,
            consts: PhysicalConstants {
                hbar: a.hbar,
                c: a.c,
                epsilon0: a.epsilon0,
            },
            seed: a.seed,
            input: a.input.clone(),
            output: a.out.clone(),
            warnings,
        })
    }

    fn need_sv(&self) -> Result<StrattonVector> {
        self.sv
            .ok_or_else(|| Error::Parse("--sv is required".into()))
    }

    fn need_sv_prime(&self) -> Result<StrattonVector> {
        self.sv_prime
            .ok_or_else(|| Error::Parse("--sv-prime is required".into()))
    }

    fn need_k(&self) -> Result<WaveVector> {
        self.k.ok_or_else(|| Error::Parse("--k is required".into()))
    }

    fn read_input(&self) -> Result<String> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| Error::Parse("--in is required".into()))?;
        read_file(path)
    }

    fn read_wavefield(&self) -> Result<Wavefield> {
        Wavefield::from_json(&self.read_input()?)
    }

    /// Jones form of the input, in the representation of `--sv` when given.
    fn jones_input(&self) -> Result<(MomentumGrid, JonesWavefunction)> {
        match self.read_wavefield()? {
            Wavefield::Vector { grid, f, sv } => {
                let sv = self.sv.or(sv).ok_or_else(|| {
                    Error::Parse("vector input needs --sv or an \"sv\" field".into())
                })?;
                let ft = to_jones(&f, sv, &grid)?;
                Ok((grid, ft))
            }
            Wavefield::Jones { grid, ft } => match self.sv {
                Some(sv) if sv != ft.stratton_vector() => {
                    let moved = change_sv(&ft, sv, &grid)?;
                    Ok((grid, moved))
                }
                _ => Ok((grid, ft)),
            },
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Formats a float with `-0` folded into `0`.
fn num(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn vec3(v: &Real3) -> String {
    format!("({}, {}, {})", num(v[0]), num(v[1]), num(v[2]))
}

fn complex(z: C64) -> String {
    let im = z.im + 0.0;
    if im.is_sign_negative() {
        format!("{}-{}i", num(z.re), num(-im))
    } else {
        format!("{}+{}i", num(z.re), num(im))
    }
}

fn cvec3(v: &Complex3Vector) -> String {
    format!("({}, {}, {})", complex(v[0]), complex(v[1]), complex(v[2]))
}

fn pairs(v: &Complex3Vector) -> [[f64; 2]; 3] {
    [0, 1, 2].map(|i| [v[i].re + 0.0, v[i].im + 0.0])
}

fn cmd_frame(cfg: &RunConfig) -> Result<String> {
    let frame = build_frame(cfg.need_sv()?, cfg.need_k()?)?;
    let q = quasi_unitary(&frame);
    let r = frame.triad_residuals();
    let mut s = String::new();
    s.push_str(&format!("u = {}\n", vec3(&frame.u)));
    s.push_str(&format!("v = {}\n", vec3(&frame.v)));
    s.push_str(&format!("w = {}\n", vec3(&frame.w)));
    s.push_str(&format!("c+ = {}\n", cvec3(&q.c_plus())));
    s.push_str(&format!("c- = {}\n", cvec3(&q.c_minus())));
    s.push_str(&format!("residual v x w - u = {:e}\n", r[0]));
    s.push_str(&format!("residual w x u - v = {:e}\n", r[1]));
    s.push_str(&format!("residual u x v - w = {:e}\n", r[2]));
    Ok(s)
}

fn cmd_jones(cfg: &RunConfig) -> Result<String> {
    let out = match cfg.read_wavefield()? {
        Wavefield::Vector { .. } => {
            let (grid, ft) = cfg.jones_input()?;
            Wavefield::Jones { grid, ft }
        }
        Wavefield::Jones { grid, ft } => {
            let f = to_vector(&ft, &grid)?;
            Wavefield::Vector {
                grid,
                f,
                sv: Some(ft.stratton_vector()),
            }
        }
    };
    Ok(out.to_json()? + "\n")
}

fn cmd_stokes(cfg: &RunConfig) -> Result<String> {
    let (grid, ft) = cfg.jones_input()?;
    let sf = stokes_field(&ft, &grid, default_null_threshold(&ft))?;
    let mut buf = Vec::new();
    sf.write_csv(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

fn cmd_transform(cfg: &RunConfig, round_trip: bool, diag: &mut Vec<String>) -> Result<String> {
    let target = cfg.need_sv_prime()?;
    let (grid, ft) = cfg.jones_input()?;
    let moved = change_sv(&ft, target, &grid)?;
    if round_trip {
        let back = change_sv(&moved, ft.stratton_vector(), &grid)?;
        let residual = ft
            .samples()
            .iter()
            .zip(back.samples())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).camax()));
        diag.push(format!("round-trip residual: {residual:e}"));
    }
    Ok(Wavefield::Jones { grid, ft: moved }.to_json()? + "\n")
}

fn cmd_spin(cfg: &RunConfig) -> Result<String> {
    let hbar = cfg.consts.hbar;
    let (s, norm) = match cfg.read_wavefield()? {
        Wavefield::Vector { grid, f, .. } if cfg.sv.is_none() => {
            spin_total_lab_with_norm(&f, &grid, hbar)?
        }
        _ => {
            let (grid, ft) = cfg.jones_input()?;
            spin_total_local_with_norm(&ft, &grid, hbar)?
        }
    };
    let report = SpinReport {
        s: [s.0[0] + 0.0, s.0[1] + 0.0, s.0[2] + 0.0],
        norm,
    };
    Ok(serde_json::to_string(&report)? + "\n")
}

#[derive(Debug, Serialize)]
struct RotateReport {
    phi: f64,
    a: [[f64; 2]; 3],
    a_prime: [[f64; 2]; 3],
    optical_rotation_residual: f64,
}

fn cmd_rotate(cfg: &RunConfig, axis: usize, sign: i32) -> Result<String> {
    let (sv, svp, k) = (cfg.need_sv()?, cfg.need_sv_prime()?, cfg.need_k()?);
    let state = PlaneWaveState::new(k, sv, eigenstate(axis, sign)?)?;
    let phi = angle_between(&build_frame(sv, k)?, &build_frame(svp, k)?);
    let a = polarization_vector(&state)?;
    let ap = polarization_vector(&rotate_sv(&state, svp)?)?;
    let residual = (ap.vector() - optical_rotation(&a, phi).vector()).norm();
    let report = RotateReport {
        phi,
        a: pairs(a.vector()),
        a_prime: pairs(ap.vector()),
        optical_rotation_residual: residual,
    };
    Ok(serde_json::to_string(&report)? + "\n")
}

#[derive(Debug, Deserialize)]
struct BerryInput {
    k0: [f64; 3],
    sigma3: i32,
    #[serde(rename = "loop")]
    path: Vec<[f64; 3]>,
}

fn cmd_berry(cfg: &RunConfig) -> Result<String> {
    let input: BerryInput = serde_json::from_str(&cfg.read_input()?)?;
    let k0 = WaveVector::from_array(input.k0).map_err(|e| Error::Parse(format!("k0: {e}")))?;
    let path = input
        .path
        .iter()
        .map(|&p| {
            StrattonVector::normalized(p.into()).map_err(|e| Error::Parse(format!("loop: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let first = *path.first().ok_or(Error::PathTooShort {
        required: 2,
        actual: 0,
    })?;
    let state = PlaneWaveState::new(k0, first, eigenstate(3, input.sigma3)?)?;
    let out = sv_loop_phase(&state, &path, input.sigma3)?;
    Ok(serde_json::to_string(&out.log)? + "\n")
}

fn cmd_synth(cfg: &RunConfig, points: &Path) -> Result<String> {
    let (grid, f) = match cfg.read_wavefield()? {
        Wavefield::Vector { grid, f, .. } => (grid, f),
        Wavefield::Jones { grid, ft } => {
            let f = to_vector(&ft, &grid)?;
            (grid, f)
        }
    };
    let pts = read_points_csv(read_file(points)?.as_bytes())?;
    let samples = synthesize_field(&f, &grid, &pts, &cfg.consts)?;
    let mut buf = Vec::new();
    write_field_csv(&samples, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn dispatch(
    cli: &Cli,
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    diag: &mut Vec<String>,
) -> Result<i32> {
    let text = match &cli.command {
        Command::Frame => cmd_frame(cfg)?,
        Command::Jones => cmd_jones(cfg)?,
        Command::Stokes => cmd_stokes(cfg)?,
        Command::Transform { round_trip } => cmd_transform(cfg, *round_trip, diag)?,
        Command::Spin => cmd_spin(cfg)?,
        Command::Rotate { axis, sign } => cmd_rotate(cfg, *axis, *sign)?,
        Command::Berry => cmd_berry(cfg)?,
        Command::Synth { points } => cmd_synth(cfg, points)?,
        Command::Check {
            inject_longitudinal,
        } => {
            let battery = checks::run_all(CheckConfig {
                seed: cfg.seed,
                tol: cfg.tol,
                inject_longitudinal: *inject_longitudinal,
            });
            emit(cfg, &battery.render(), stdout)?;
            return Ok(battery.verdict().exit_code());
        }
    };
    emit(cfg, &text, stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let cfg = match RunConfig::from_args(&cli.common) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    for w in &cfg.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let mut diag = Vec::new();
    let code = match dispatch(&cli, &cfg, stdout, &mut diag) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    };
    for d in &diag {
        let _ = writeln!(stderr, "{d}");
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["photon-frames"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn frame_example() {
        let (code, out, _) = run_str(&["frame", "--sv", "0,0,1", "--k", "1,0,0"]);
        assert_eq!(code, 0);
        assert!(out.contains("u = (0, 0, -1)"), "{out}");
        assert!(out.contains("v = (0, 1, 0)"));
        assert!(out.contains("w = (1, 0, 0)"));
    }

    #[test]
    fn degenerate_frame_exit_code() {
        let (code, _, err) = run_str(&["frame", "--sv", "0,0,1", "--k", "0,0,1"]);
        assert_eq!(code, 2);
        assert!(err.contains("degenerate frame"));
    }

    #[test]
    fn parse_errors_exit_one() {
        assert_eq!(run_str(&["frame", "--sv", "0,0", "--k", "1,0,0"]).0, 1);
        assert_eq!(run_str(&["nonsense"]).0, 1);
        assert_eq!(run_str(&["frame", "--k", "1,0,0"]).0, 1);
    }

    #[test]
    fn sv_renormalized_with_warning() {
        let (code, out, err) = run_str(&["frame", "--sv", "0,0,2", "--k", "1,0,0"]);
        assert_eq!(code, 0);
        assert!(err.contains("warning"));
        assert!(out.contains("u = (0, 0, -1)"));
        let (_, _, err) = run_str(&["frame", "--sv", "0,0,1.0000000001", "--k", "1,0,0"]);
        assert!(err.is_empty());
    }

    #[test]
    fn negative_components_parse() {
        let (code, out, _) = run_str(&["frame", "--sv", "0,0,-1", "--k", "-1,0,0"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(complex(C64::new(1.0, -0.5)), "1-0.5i");
        assert_eq!(complex(C64::new(0.0, -0.0)), "0+0i");
    }
}
