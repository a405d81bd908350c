//! Right-hand side of the shear-flow evolution `Q' = G(Q) + ω[W3,Q] + β L(Q)D`
//! in the laboratory and co-rotating frames, and its integration.
//!
//! States are integrated in fixed-basis coordinates, so every sample is exactly
//! symmetric and traceless; no re-projection step is needed.

use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{eval_g, eval_l, fd_jacobian, ModelSpec};
use crate::ode::{self, Control, DenseStep, OdeError, OdeSystem, Tolerances};
use crate::tensor::{commutator_w3, QTensor, SQRT2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Which form of the equation is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Autonomous laboratory-frame equation.
    Lab,
    /// Frame rotating with the vorticity; non-autonomous with period `π/ω`.
    Corotating,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub dense_output: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            dense_output: false,
        }
    }
}

impl IntegratorConfig {
    pub(crate) fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..Tolerances::default()
        }
    }
}

/// `G(Q) + ω[W3,Q] + β L(Q)D`.
pub fn rhs_lab(_t: f64, q: &QTensor, spec: &ModelSpec) -> QTensor {
    let mut f = eval_g(q, &spec.ldg) + commutator_w3(q) * spec.omega;
    if spec.beta != 0.0 {
        f += eval_l(q, &spec.align, &QTensor::shear_strain()) * spec.beta;
    }
    f
}

/// Strain matrix seen from the frame rotated by `ωt`: `R̃3(−ωt)D`.
pub fn rotated_strain(t: f64, omega: f64) -> QTensor {
    let (s, c) = (2.0 * omega * t).sin_cos();
    QTensor::from_coords([0.0, 0.0, 0.0, SQRT2 * s, SQRT2 * c])
}

/// `G(Q) + β L(Q) R̃3(−ωt)D`.
pub fn rhs_corotating(t: f64, q: &QTensor, spec: &ModelSpec) -> QTensor {
    let mut f = eval_g(q, &spec.ldg);
    if spec.beta != 0.0 {
        f += eval_l(q, &spec.align, &rotated_strain(t, spec.omega)) * spec.beta;
    }
    f
}

pub fn rhs(frame: FrameKind, t: f64, q: &QTensor, spec: &ModelSpec) -> QTensor {
    match frame {
        FrameKind::Lab => rhs_lab(t, q, spec),
        FrameKind::Corotating => rhs_corotating(t, q, spec),
    }
}

/// Central-difference Jacobian of the right-hand side in fixed-basis coordinates.
pub fn rhs_jacobian(
    frame: FrameKind,
    t: f64,
    q: &QTensor,
    spec: &ModelSpec,
    h: f64,
) -> Matrix5<f64> {
    fd_jacobian(|x| rhs(frame, t, x, spec), q, h)
}

/// Step used for the finite-difference Jacobians of the variational flow.
pub const VARIATIONAL_FD_STEP: f64 = 1e-7;

pub(crate) struct QSystem<'a> {
    pub spec: &'a ModelSpec,
    pub frame: FrameKind,
}

impl OdeSystem for QSystem<'_> {
    fn dim(&self) -> usize {
        5
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let q = qtensor_from_slice(y);
        dy.copy_from_slice(&rhs(self.frame, t, &q, self.spec).coords());
    }
}

/// State plus the column-major 5×5 derivative of the flow map.
pub(crate) struct VariationalSystem<'a> {
    pub spec: &'a ModelSpec,
    pub frame: FrameKind,
}

impl OdeSystem for VariationalSystem<'_> {
    fn dim(&self) -> usize {
        30
    }
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let q = qtensor_from_slice(y);
        dy[..5].copy_from_slice(&rhs(self.frame, t, &q, self.spec).coords());
        let j = rhs_jacobian(self.frame, t, &q, self.spec, VARIATIONAL_FD_STEP);
        let m = Matrix5::from_column_slice(&y[5..30]);
        dy[5..30].copy_from_slice((j * m).as_slice());
    }
}

pub(crate) fn qtensor_from_slice(y: &[f64]) -> QTensor {
    QTensor::from_coords([y[0], y[1], y[2], y[3], y[4]])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: QTensor,
    pub m: Option<Matrix5<f64>>,
}

/// Samples at every accepted step, with the continuous extension of each step when requested.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub steps: Vec<DenseStep>,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.samples.first().map_or(0.0, |s| s.t)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    /// State at time `t` from the continuous extension, if stored and in range.
    pub fn eval(&self, t: f64) -> Option<QTensor> {
        let idx = self.steps.partition_point(|s| s.t1 < t);
        let s = self.steps.get(idx)?;
        if t < s.t0.min(s.t1) - 1e-12 * s.t1.abs().max(1.0) {
            return None;
        }
        Some(qtensor_from_slice(&s.eval_vec(t)))
    }
}

/// Integrates the state equation over `t_span`.
pub fn integrate(
    frame: FrameKind,
    spec: &ModelSpec,
    q0: &QTensor,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    let sys = QSystem { spec, frame };
    let mut traj = Trajectory {
        samples: vec![TrajectorySample {
            t: t_span.0,
            q: *q0,
            m: None,
        }],
        steps: Vec::new(),
    };
    ode::integrate(
        &sys,
        t_span.0,
        &q0.coords(),
        t_span.1,
        &cfg.tolerances(),
        |step| {
            traj.samples.push(TrajectorySample {
                t: step.t1,
                q: qtensor_from_slice(step.y1()),
                m: None,
            });
            if cfg.dense_output {
                traj.steps.push(step.clone());
            }
            Control::Continue
        },
    )?;
    Ok(traj)
}

/// Final state and flow-map derivative `M(t)` with `M(t_span.0) = I`.
pub fn integrate_variational(
    frame: FrameKind,
    spec: &ModelSpec,
    q0: &QTensor,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<(QTensor, Matrix5<f64>), DynamicsError> {
    let sys = VariationalSystem { spec, frame };
    let y0 = variational_initial(q0);
    let out = ode::integrate(&sys, t_span.0, &y0, t_span.1, &cfg.tolerances(), |_| {
        Control::Continue
    })?;
    Ok((
        qtensor_from_slice(&out.y),
        Matrix5::from_column_slice(&out.y[5..30]),
    ))
}

pub(crate) fn variational_initial(q0: &QTensor) -> Vec<f64> {
    let mut y0 = vec![0.0; 30];
    y0[..5].copy_from_slice(&q0.coords());
    y0[5..30].copy_from_slice(Matrix5::<f64>::identity().as_slice());
    y0
}
