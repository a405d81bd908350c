//! Poincaré section on a meridian of the director sphere, the return map it
//! induces, periodic points by Newton iteration, Floquet multipliers and orbit
//! classification.
//!
//! The director is followed continuously along a trajectory: its sign is chosen
//! to agree with the previous sample, and its azimuth is unwrapped. That azimuth
//! advances by `2π` per revolution of an off-equator orbit and by `π` per tumble
//! of an in-plane orbit; a return is the first time it has advanced by the
//! section's turn angle.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4, Vector5};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bifurcation::Stability;
use crate::dynamics::{
    integrate, integrate_variational, qtensor_from_slice, rhs_jacobian, rhs_lab, DynamicsError,
    FrameKind, IntegratorConfig, QSystem, Trajectory,
};
use crate::models::{ldg_equilibrium, ModelError, ModelSpec};
use crate::ode::{self, Control, DenseStep, Tolerances};
use crate::tensor::{
    distance_to_orbit, frame_basis, normalize_director, principal_axis, QTensor, SphericalPoint,
    TensorError, I0, I11, I21, I22, SQRT6,
};

/// Horizontal director component below which a state counts as being in the pole slice.
pub const POLE_SLICE: f64 = 1e-3;

/// Eigenvalue gap below which the director is undefined.
const MIN_GAP: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoincareError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("state lies in the pole slice (horizontal director component {0:e})")]
    PoleSlice(f64),
    #[error("lost orbit: no section crossing before t = {0}")]
    LostOrbit(f64),
    #[error("trajectory left the tube at t = {t} (distance {distance:e})")]
    ExitedTube { t: f64, distance: f64 },
    #[error("Newton iteration did not converge; residual history {residuals:?}")]
    NoConvergence { residuals: Vec<f64> },
    #[error("trajectory has no dense output")]
    NoDenseOutput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingSense {
    Increasing,
    Decreasing,
}

impl CrossingSense {
    fn sign(self) -> f64 {
        match self {
            CrossingSense::Increasing => 1.0,
            CrossingSense::Decreasing => -1.0,
        }
    }
}

/// Azimuth advance that counts as one return.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    /// `2π`: one revolution, the return of an off-equator orbit.
    Full,
    /// `π`: one tumble, the least return of an in-plane orbit.
    Half,
}

impl Turn {
    pub fn angle(self) -> f64 {
        match self {
            Turn::Full => TAU,
            Turn::Half => PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    /// Director azimuth of the meridian.
    pub phi0: f64,
    /// Tube radius around the orbit of equilibria.
    pub epsilon: f64,
    pub direction: CrossingSense,
    pub turn: Turn,
}

impl Default for SectionSpec {
    fn default() -> Self {
        Self {
            phi0: 0.0,
            epsilon: 0.1,
            direction: CrossingSense::Increasing,
            turn: Turn::Full,
        }
    }
}

impl SectionSpec {
    pub fn at(phi0: f64) -> Self {
        Self {
            phi0,
            ..Self::default()
        }
    }

    pub fn with_turn(self, turn: Turn) -> Self {
        Self { turn, ..self }
    }

    pub fn validate(&self) -> Result<(), PoincareError> {
        if !(self.epsilon > 0.0) {
            return Err(PoincareError::InvalidSection(format!(
                "need ε > 0, got {}",
                self.epsilon
            )));
        }
        if !self.phi0.is_finite() {
            return Err(PoincareError::InvalidSection("non-finite φ0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareConfig {
    pub integrator: IntegratorConfig,
    /// Target norm of `P(x) − x` in section coordinates.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Forward-difference step for Newton Jacobians.
    pub fd_step: f64,
    /// Search horizon for a crossing, in units of `2π/ω`.
    pub max_periods: f64,
}

impl Default for PoincareConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                ..IntegratorConfig::default()
            },
            newton_tol: 1e-11,
            max_newton: 50,
            fd_step: 1e-6,
            max_periods: 3.0,
        }
    }
}

impl PoincareConfig {
    /// Integrator settings with the step capped so the azimuth moves at most half a radian per step.
    pub fn integrator_for(&self, omega: f64) -> IntegratorConfig {
        IntegratorConfig {
            max_step: self.integrator.max_step.min(0.5 / omega),
            ..self.integrator
        }
    }

    fn tolerances(&self, omega: f64) -> Tolerances {
        self.integrator_for(omega).tolerances()
    }
}

/// Reduces an angle to `[−π, π)`.
fn wrap_pm_pi(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn horizontal(n: &Vector3<f64>) -> f64 {
    n.x.hypot(n.y)
}

fn meridian_direction(phi0: f64) -> Vector3<f64> {
    Vector3::new(phi0.cos(), phi0.sin(), 0.0)
}

/// Director with its sign fixed by continuity and its unwrapped azimuth.
#[derive(Clone, Copy, Debug)]
struct DirectorTrack {
    n: Vector3<f64>,
    psi: f64,
}

impl DirectorTrack {
    fn follow(&self, q: &QTensor) -> Self {
        let (mut m, _) = principal_axis(q);
        if m.dot(&self.n) < 0.0 {
            m = -m;
        }
        let dpsi = wrap_pm_pi(m.y.atan2(m.x) - self.n.y.atan2(self.n.x));
        Self {
            n: m,
            psi: self.psi + dpsi,
        }
    }
}

fn director_of(q: &QTensor) -> Result<Vector3<f64>, PoincareError> {
    let (n, gap) = principal_axis(q);
    if !(gap >= MIN_GAP) {
        return Err(TensorError::DegenerateDirector(gap).into());
    }
    Ok(n)
}

/// Track starting on the meridian side of `φ0`, with azimuth within `π/2` of `φ0`.
fn section_start(q: &QTensor, phi0: f64) -> Result<DirectorTrack, PoincareError> {
    let mut n = director_of(q)?;
    let h = horizontal(&n);
    if h < POLE_SLICE {
        return Err(PoincareError::PoleSlice(h));
    }
    if n.dot(&meridian_direction(phi0)) < 0.0 {
        n = -n;
    }
    Ok(DirectorTrack {
        n,
        psi: phi0 + wrap_pm_pi(n.y.atan2(n.x) - phi0),
    })
}

/// Time in `step` where the tracked azimuth reaches `target`; `from` is the track at `step.t0`.
fn refine_crossing(step: &DenseStep, from: &DirectorTrack, target: f64, s: f64) -> f64 {
    let g = |t: f64| s * (from.follow(&qtensor_from_slice(&step.eval_vec(t))).psi - target);
    let (mut lo, mut hi) = (step.t0, step.t1);
    let (mut glo, mut ghi) = (s * (from.psi - target), g(hi));
    for _ in 0..40 {
        if ghi.abs() < 1e-14 {
            return hi;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm >= 0.0 {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    if ghi != glo {
        let t = hi - ghi * (hi - lo) / (ghi - glo);
        if (t - lo) * (t - hi) <= 0.0 && g(t).abs() < ghi.abs() {
            return t;
        }
    }
    hi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Return {
    pub q: QTensor,
    pub time: f64,
}

/// First return of `q` to the section after the director azimuth has advanced by the section's turn.
pub fn return_map(
    q: &QTensor,
    spec: &ModelSpec,
    section: &SectionSpec,
    cfg: &PoincareConfig,
) -> Result<Return, PoincareError> {
    section.validate()?;
    let a = ldg_equilibrium(&spec.ldg)?.a;
    let mut track = section_start(q, section.phi0)?;
    let s = section.direction.sign();
    let target = section.phi0 + s * section.turn.angle();
    let t_max = cfg.max_periods * TAU / spec.omega;
    let sys = QSystem {
        spec,
        frame: FrameKind::Lab,
    };
    let mut hit = None;
    let mut exit = None;
    let out = ode::integrate(
        &sys,
        0.0,
        &q.coords(),
        t_max,
        &cfg.tolerances(spec.omega),
        |step| {
            let q1 = qtensor_from_slice(step.y1());
            let next = track.follow(&q1);
            if s * (next.psi - target) >= 0.0 {
                let t = refine_crossing(step, &track, target, s);
                hit = Some(t);
                return Control::StopAt(t);
            }
            let d = distance_to_orbit(&q1, a).unwrap_or(f64::INFINITY);
            if d > section.epsilon {
                exit = Some((step.t1, d));
                return Control::StopAt(step.t1);
            }
            track = next;
            Control::Continue
        },
    )
    .map_err(DynamicsError::from)?;
    if let Some((t, distance)) = exit {
        return Err(PoincareError::ExitedTube { t, distance });
    }
    match hit {
        Some(time) => Ok(Return {
            q: qtensor_from_slice(&out.y),
            time,
        }),
        None => Err(PoincareError::LostOrbit(t_max)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub q: QTensor,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CrossingReport {
    pub crossings: Vec<Crossing>,
    /// Time at which the trajectory left the tube, if it did.
    pub exited: Option<f64>,
    /// Set when the start lies in the pole slice, where the azimuth is undefined.
    pub degenerate: bool,
}

/// Times at which the normalized director azimuth passes through `φ0` in the section's sense.
pub fn detect_crossings(
    traj: &Trajectory,
    section: &SectionSpec,
    a: f64,
) -> Result<CrossingReport, PoincareError> {
    section.validate()?;
    let mut report = CrossingReport::default();
    let Some(first) = traj.steps.first() else {
        return if traj.samples.len() <= 1 {
            Ok(report)
        } else {
            Err(PoincareError::NoDenseOutput)
        };
    };
    let (n, gap) = principal_axis(&qtensor_from_slice(first.y0()));
    if !(gap >= MIN_GAP) || horizontal(&n) < POLE_SLICE {
        report.degenerate = true;
        return Ok(report);
    }
    let n = normalize_director(n);
    let mut track = DirectorTrack {
        n,
        psi: n.y.atan2(n.x),
    };
    let s = section.direction.sign();
    let phi0 = section.phi0;
    let e_par = meridian_direction(phi0);
    for step in &traj.steps {
        let q1 = qtensor_from_slice(step.y1());
        let next = track.follow(&q1);
        let (lo, hi) = ((track.psi - phi0) / PI, (next.psi - phi0) / PI);
        let ks: Vec<f64> = if s > 0.0 {
            let (k0, k1) = (lo.floor() as i64 + 1, hi.floor() as i64);
            (k0..=k1).map(|k| k as f64).collect()
        } else {
            let (k0, k1) = (hi.ceil() as i64, lo.ceil() as i64 - 1);
            (k0..=k1).rev().map(|k| k as f64).collect()
        };
        for k in ks {
            let t = refine_crossing(step, &track, phi0 + k * PI, s);
            let q = qtensor_from_slice(&step.eval_vec(t));
            let m = normalize_director(principal_axis(&q).0);
            if m.z.abs() < 1e-9 || m.dot(&e_par) > 0.0 {
                report.crossings.push(Crossing { t, q });
            }
        }
        if distance_to_orbit(&q1, a).unwrap_or(f64::INFINITY) > section.epsilon {
            report.exited = Some(step.t1);
            break;
        }
        track = next;
    }
    Ok(report)
}

/// Tensor with section coordinates `x = (θ, n0, n21, n22)`: the orbit point `Z(θ, φ0)`
/// displaced along the normal frame directions `E0, E21, E22` there.
pub fn chart_to_tensor(x: &[f64; 4], phi0: f64, a: f64) -> QTensor {
    let f = frame_basis(
        &SphericalPoint {
            theta: x[0],
            phi: phi0,
        },
        a,
    );
    f.z + f.e[I0] * x[1] + f.e[I21] * x[2] + f.e[I22] * x[3]
}

/// Section coordinates of `q`; `θ ∈ [0, π]` is read off the director oriented towards azimuth `φ0`.
pub fn tensor_to_chart(q: &QTensor, phi0: f64, a: f64) -> Result<[f64; 4], PoincareError> {
    let mut n = director_of(q)?;
    let e_par = meridian_direction(phi0);
    let p = n.dot(&e_par);
    if p < 0.0 || (p == 0.0 && n.z < 0.0) {
        n = -n;
    }
    let theta = n.dot(&e_par).atan2(n.z);
    let c = frame_basis(&SphericalPoint { theta, phi: phi0 }, a).coords_of(q);
    Ok([theta, c[I0] - a * SQRT6, c[I21], c[I22]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedKind {
    Equilibrium,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    pub q: QTensor,
    pub kind: FixedKind,
    /// Return time of the section map, for periodic points.
    pub period: Option<f64>,
    pub chart: Option<[f64; 4]>,
    pub residuals: Vec<f64>,
}

fn equilibrium_newton(
    guess: &QTensor,
    spec: &ModelSpec,
    cfg: &PoincareConfig,
) -> Result<FixedPoint, PoincareError> {
    let mut q = *guess;
    let mut residuals = Vec::new();
    for _ in 0..cfg.max_newton {
        let f = rhs_lab(0.0, &q, spec);
        let r = f.norm();
        residuals.push(r);
        if r < cfg.newton_tol {
            return Ok(FixedPoint {
                q,
                kind: FixedKind::Equilibrium,
                period: None,
                chart: None,
                residuals,
            });
        }
        let j = rhs_jacobian(FrameKind::Lab, 0.0, &q, spec, 1e-7);
        let Some(dx) = j.lu().solve(&-Vector5::from(f.coords())) else {
            break;
        };
        q += QTensor::from_coords(dx.into());
    }
    Err(PoincareError::NoConvergence { residuals })
}

fn chart_residual(
    x: &[f64; 4],
    spec: &ModelSpec,
    section: &SectionSpec,
    cfg: &PoincareConfig,
    a: f64,
) -> Result<(Vector4<f64>, f64), PoincareError> {
    let q = chart_to_tensor(x, section.phi0, a);
    let r = return_map(&q, spec, section, cfg)?;
    let y = tensor_to_chart(&r.q, section.phi0, a)?;
    Ok((Vector4::from(y) - Vector4::from(*x), r.time))
}

/// Periodic point of the return map near `guess`, or the equilibrium when `guess` lies in the pole slice.
///
/// Newton iteration runs on the section coordinates `(θ, n0, n21, n22)` with a
/// forward-difference Jacobian, a pseudo-inverse for the nearly neutral latitude
/// direction, and step halving when the residual grows.
pub fn fixed_point(
    guess: &QTensor,
    spec: &ModelSpec,
    section: &SectionSpec,
    cfg: &PoincareConfig,
) -> Result<FixedPoint, PoincareError> {
    let (n, gap) = principal_axis(guess);
    if !(gap >= MIN_GAP) || horizontal(&n) < POLE_SLICE {
        return equilibrium_newton(guess, spec, cfg);
    }
    let a = ldg_equilibrium(&spec.ldg)?.a;
    let mut x = Vector4::from(tensor_to_chart(guess, section.phi0, a)?);
    let (mut f, mut time) = chart_residual(&x.into(), spec, section, cfg, a)?;
    let mut residuals = Vec::new();
    for _ in 0..cfg.max_newton {
        let r = f.norm();
        residuals.push(r);
        if r < cfg.newton_tol {
            let chart: [f64; 4] = x.into();
            return Ok(FixedPoint {
                q: chart_to_tensor(&chart, section.phi0, a),
                kind: FixedKind::Periodic,
                period: Some(time),
                chart: Some(chart),
                residuals,
            });
        }
        let mut j = Matrix4::zeros();
        for k in 0..4 {
            let mut xp = x;
            xp[k] += cfg.fd_step;
            let (fp, _) = chart_residual(&xp.into(), spec, section, cfg, a)?;
            j.set_column(k, &((fp - f) / cfg.fd_step));
        }
        let dx = j
            .svd(true, true)
            .solve(&-f, 1e-12)
            .map_err(|_| PoincareError::NoConvergence {
                residuals: residuals.clone(),
            })?;
        let mut scale = 1.0;
        loop {
            let xn = x + dx * scale;
            match chart_residual(&xn.into(), spec, section, cfg, a) {
                Ok((fnew, tnew)) if fnew.norm() < r || scale < 1.0 / 64.0 => {
                    x = xn;
                    f = fnew;
                    time = tnew;
                    break;
                }
                Err(e) if scale < 1.0 / 64.0 => return Err(e),
                _ => scale *= 0.5,
            }
        }
    }
    residuals.push(f.norm());
    Err(PoincareError::NoConvergence { residuals })
}

/// Outcome of solving the normal part of the fixed-point problem at fixed latitude.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalFixedPoint {
    pub theta: f64,
    /// Offsets along `E0, E21, E22` at `Z(θ, φ0)`.
    pub sigma: [f64; 3],
    /// Frame coordinates at `Z` of `P(Z + σ) − (Z + σ)`.
    pub displacement: [f64; 5],
    /// Latitude component of the displacement: the numerical bifurcation value.
    pub tangential: f64,
    pub residuals: Vec<f64>,
}

/// Frame coordinates at `Z(θ, φ0)` of one return displacement `P(Z + σ) − (Z + σ)` with `σ` normal.
pub fn return_displacement(
    theta: f64,
    sigma: &[f64; 3],
    spec: &ModelSpec,
    section: &SectionSpec,
    cfg: &PoincareConfig,
) -> Result<[f64; 5], PoincareError> {
    let a = ldg_equilibrium(&spec.ldg)?.a;
    let f = frame_basis(
        &SphericalPoint {
            theta,
            phi: section.phi0,
        },
        a,
    );
    let q = f.z + f.e[I0] * sigma[0] + f.e[I21] * sigma[1] + f.e[I22] * sigma[2];
    let r = return_map(&q, spec, section, cfg)?;
    Ok(f.coords_of(&(r.q - q)))
}

/// Solves `p_N(P(Z + σ)) = Z + σ` for the normal offset `σ` at `Z(θ, φ0)` and reports the
/// remaining latitude displacement.
pub fn normal_fixed_point(
    theta: f64,
    spec: &ModelSpec,
    section: &SectionSpec,
    cfg: &PoincareConfig,
) -> Result<NormalFixedPoint, PoincareError> {
    let normal = |d: &[f64; 5]| nalgebra::Vector3::new(d[I0], d[I21], d[I22]);
    let mut sigma = nalgebra::Vector3::zeros();
    let mut d = return_displacement(theta, &sigma.into(), spec, section, cfg)?;
    let mut residuals = Vec::new();
    for _ in 0..cfg.max_newton {
        let g = normal(&d);
        residuals.push(g.norm());
        if g.norm() < 0.1 * cfg.newton_tol {
            return Ok(NormalFixedPoint {
                theta,
                sigma: sigma.into(),
                displacement: d,
                tangential: d[I11],
                residuals,
            });
        }
        let mut j = Matrix3::zeros();
        for k in 0..3 {
            let mut sp = sigma;
            sp[k] += cfg.fd_step;
            let dp = return_displacement(theta, &sp.into(), spec, section, cfg)?;
            j.set_column(k, &((normal(&dp) - g) / cfg.fd_step));
        }
        let Some(ds) = j.lu().solve(&-g) else {
            break;
        };
        sigma += ds;
        d = return_displacement(theta, &sigma.into(), spec, section, cfg)?;
    }
    residuals.push(normal(&d).norm());
    Err(PoincareError::NoConvergence { residuals })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloquetReport {
    /// Least period of the orbit.
    pub period: f64,
    pub turn: Turn,
    pub multipliers: Vec<Complex64>,
    /// Index of the multiplier closest to `1`, attributed to the flow direction.
    pub trivial_index: usize,
    pub max_nontrivial: f64,
    pub stability: Stability,
}

/// Margin around the unit circle inside which a multiplier counts as marginal.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// Least period of the orbit through `q` and the turn it spans.
pub fn least_period(
    q: &QTensor,
    spec: &ModelSpec,
    cfg: &PoincareConfig,
) -> Result<(f64, Turn), PoincareError> {
    let n = normalize_director(director_of(q)?);
    let section = SectionSpec {
        phi0: n.y.atan2(n.x),
        epsilon: f64::INFINITY,
        ..SectionSpec::default()
    };
    let half = return_map(q, spec, &section.with_turn(Turn::Half), cfg)?;
    if (half.q - *q).norm() < 1e-6 * q.norm() {
        return Ok((half.time, Turn::Half));
    }
    let full = return_map(q, spec, &section, cfg)?;
    Ok((full.time, Turn::Full))
}

/// Multipliers of the least-period monodromy matrix along the orbit through `q`.
pub fn floquet(
    q: &QTensor,
    spec: &ModelSpec,
    cfg: &PoincareConfig,
) -> Result<FloquetReport, PoincareError> {
    let (period, turn) = least_period(q, spec, cfg)?;
    let (_, m) = integrate_variational(
        FrameKind::Lab,
        spec,
        q,
        (0.0, period),
        &cfg.integrator_for(spec.omega),
    )?;
    let multipliers: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let trivial_index = multipliers
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - 1.0).norm().total_cmp(&(y.1 - 1.0).norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let max_nontrivial = multipliers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != trivial_index)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    Ok(FloquetReport {
        period,
        turn,
        multipliers,
        trivial_index,
        max_nontrivial,
        stability: stability_from_modulus(max_nontrivial),
    })
}

pub fn stability_from_modulus(m: f64) -> Stability {
    if m < 1.0 - STABILITY_MARGIN {
        Stability::Stable
    } else if m > 1.0 + STABILITY_MARGIN {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    Logrolling,
    Tumbling,
    Kayaking,
    /// Non-winding or otherwise unrecognised motion, including wagging.
    Other,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub kind: OrbitKind,
    pub period: Option<f64>,
    /// Time average of the director's angle to the vorticity axis, in `[0, π/2]`.
    pub mean_polar_angle: f64,
    pub floquet: Vec<Complex64>,
    pub stability: Option<Stability>,
    /// Largest `max(|q13|, |q23|) / |Q|` over one period.
    pub out_of_plane_max: f64,
    /// Returns of the director line to its initial azimuth per period.
    pub winding: i64,
    pub notes: Vec<String>,
}

impl OrbitReport {
    fn indeterminate(note: String) -> Self {
        Self {
            kind: OrbitKind::Indeterminate,
            period: None,
            mean_polar_angle: f64::NAN,
            floquet: Vec::new(),
            stability: None,
            out_of_plane_max: f64::NAN,
            winding: 0,
            notes: vec![note],
        }
    }
}

/// Averages and extrema of the director motion over one period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitStatistics {
    pub mean_polar_angle: f64,
    pub out_of_plane_max: f64,
    pub max_abs_nz: f64,
    /// Unwrapped azimuth advance of the continuously oriented director.
    pub azimuth_advance: f64,
    /// `|Q(T) − Q(0)| / |Q(0)|`.
    pub closure: f64,
}

const STAT_SAMPLES: usize = 2048;

pub fn orbit_statistics(
    q: &QTensor,
    spec: &ModelSpec,
    period: f64,
    cfg: &PoincareConfig,
) -> Result<OrbitStatistics, PoincareError> {
    let icfg = IntegratorConfig {
        dense_output: true,
        ..cfg.integrator_for(spec.omega)
    };
    let traj = integrate(FrameKind::Lab, spec, q, (0.0, period), &icfg)?;
    let n0 = normalize_director(director_of(q)?);
    let mut track = DirectorTrack {
        n: n0,
        psi: n0.y.atan2(n0.x),
    };
    let psi0 = track.psi;
    let (mut polar_sum, mut oop, mut nz) = (0.0, 0.0_f64, 0.0_f64);
    for i in 0..=STAT_SAMPLES {
        let t = period * i as f64 / STAT_SAMPLES as f64;
        let qt = if i == 0 {
            *q
        } else {
            traj.eval(t)
                .unwrap_or_else(|| traj.last().map_or(*q, |s| s.q))
        };
        track = track.follow(&qt);
        let m = qt.matrix();
        oop = oop.max(m[(0, 2)].abs().max(m[(1, 2)].abs()) / qt.norm());
        nz = nz.max(track.n.z.abs());
        if i < STAT_SAMPLES {
            polar_sum += track.n.z.abs().min(1.0).acos();
        }
    }
    let end = traj.last().map_or(*q, |s| s.q);
    Ok(OrbitStatistics {
        mean_polar_angle: polar_sum / STAT_SAMPLES as f64,
        out_of_plane_max: oop,
        max_abs_nz: nz,
        azimuth_advance: track.psi - psi0,
        closure: (end - *q).norm() / q.norm(),
    })
}

/// Classifies the invariant set through a converged point: an equilibrium or a periodic point.
pub fn classify_point(
    q: &QTensor,
    spec: &ModelSpec,
    cfg: &PoincareConfig,
) -> Result<OrbitReport, PoincareError> {
    let mut notes = Vec::new();
    if rhs_lab(0.0, q, spec).norm() < 1e-9 {
        let n = director_of(q)?;
        let polar = n.z.abs().min(1.0).acos();
        let j = rhs_jacobian(FrameKind::Lab, 0.0, q, spec, 1e-7);
        let growth = j
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let m = q.matrix();
        return Ok(OrbitReport {
            kind: if polar < 0.1 {
                OrbitKind::Logrolling
            } else {
                OrbitKind::Other
            },
            period: None,
            mean_polar_angle: polar,
            floquet: Vec::new(),
            stability: Some(if growth < 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            }),
            out_of_plane_max: m[(0, 2)].abs().max(m[(1, 2)].abs()) / q.norm(),
            winding: 0,
            notes,
        });
    }
    let fl = floquet(q, spec, cfg)?;
    let st = orbit_statistics(q, spec, fl.period, cfg)?;
    if st.closure > 1e-6 {
        let mut r = OrbitReport::indeterminate(format!(
            "orbit does not close: relative gap {:e}",
            st.closure
        ));
        r.period = Some(fl.period);
        return Ok(r);
    }
    let in_plane = st.out_of_plane_max < 1e-6;
    let per_return = if in_plane { PI } else { TAU };
    let winding = (st.azimuth_advance / per_return).round() as i64;
    let kind = if winding == 0 {
        notes.push(
            "director azimuth does not wind; wagging-type motion is reported as other".to_string(),
        );
        OrbitKind::Other
    } else if in_plane {
        OrbitKind::Tumbling
    } else if st.max_abs_nz < 1.0 - 1e-6 {
        OrbitKind::Kayaking
    } else {
        OrbitKind::Other
    };
    Ok(OrbitReport {
        kind,
        period: Some(fl.period),
        mean_polar_angle: st.mean_polar_angle,
        floquet: fl.multipliers,
        stability: Some(fl.stability),
        out_of_plane_max: st.out_of_plane_max,
        winding,
        notes,
    })
}

/// Classifies the attractor a simulated trajectory has settled on, starting Newton from its last state.
pub fn classify_trajectory(
    traj: &Trajectory,
    spec: &ModelSpec,
    cfg: &PoincareConfig,
) -> Result<OrbitReport, PoincareError> {
    let Some(last) = traj.last() else {
        return Ok(OrbitReport::indeterminate("empty trajectory".into()));
    };
    let q = last.q;
    let (n, gap) = principal_axis(&q);
    let fp =
        if !(gap >= MIN_GAP) || horizontal(&n) < POLE_SLICE || rhs_lab(0.0, &q, spec).norm() < 1e-6
        {
            equilibrium_newton(&q, spec, cfg)
        } else {
            let n = normalize_director(n);
            let section = SectionSpec {
                phi0: n.y.atan2(n.x),
                epsilon: f64::INFINITY,
                ..SectionSpec::default()
            };
            fixed_point(&q, spec, &section, cfg)
        };
    match fp {
        Ok(fp) => {
            let mut report = classify_point(&fp.q, spec, cfg)?;
            if fp.kind == FixedKind::Periodic {
                if let (Some(x), Ok(y)) = (
                    fp.chart,
                    tensor_to_chart(&q, n.y.atan2(n.x), ldg_equilibrium(&spec.ldg)?.a),
                ) {
                    report.notes.push(format!(
                        "final latitude offset from the periodic point: {:e}",
                        (y[0] - x[0]).abs()
                    ));
                }
            } else {
                report.notes.push(format!(
                    "final distance to the equilibrium: {:e}",
                    (q - fp.q).norm()
                ));
            }
            Ok(report)
        }
        Err(e) => Ok(OrbitReport::indeterminate(format!(
            "no invariant set found near the final state: {e}"
        ))),
    }
}
