//! Dormand–Prince 5(4) integrator with PI step-size control and the
//! standard fourth-order continuous extension.

use thiserror::Error;

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("stiffness failure at t = {t}: step {h:e} fell below 1e-14 of the span")]
    StepUnderflow { t: f64, h: f64, y: Vec<f64> },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, y: Vec<f64> },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps {
        t: f64,
        max_steps: usize,
        y: Vec<f64>,
    },
    #[error("invalid tolerances (rel {rel:e}, abs {abs:e})")]
    BadTolerances { rel: f64, abs: f64 },
}

/// Observer verdict after each accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Control {
    Continue,
    /// Stop and report the state at the given time inside the last step.
    StopAt(f64),
}

/// One accepted step with its continuous extension.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    /// `y0, y1 − y0, h k1 − (y1 − y0), (y1 − y0) − h k7 − (h k1 − (y1 − y0)), h Σ d_i k_i`.
    rcont: [Vec<f64>; 5],
    y1: Vec<f64>,
}

impl DenseStep {
    pub fn y0(&self) -> &[f64] {
        &self.rcont[0]
    }

    pub fn y1(&self) -> &[f64] {
        &self.y1
    }

    /// Interpolated state at `t ∈ [t0, t1]`.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let s = if h == 0.0 { 1.0 } else { (t - self.t0) / h };
        if s == 1.0 {
            out.copy_from_slice(&self.y1);
            return;
        }
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        }
    }

    pub fn eval_vec(&self, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.y1.len()];
        self.eval(t, &mut v);
        v
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub stopped_early: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA_PI: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA_PI * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn err_norm(e: &[f64], y0: &[f64], y1: &[f64], tol: &Tolerances) -> f64 {
    let n = e.len() as f64;
    let s: f64 = e
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(ei, (a, b))| {
            let sk = tol.abs_tol + tol.rel_tol * a.abs().max(b.abs());
            (ei / sk).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<S: OdeSystem>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    dir: f64,
    tol: &Tolerances,
    span: f64,
) -> f64 {
    let n = y0.len();
    let sk: Vec<f64> = y0
        .iter()
        .map(|y| tol.abs_tol + tol.rel_tol * y.abs())
        .collect();
    let rms = |v: &[f64]| {
        (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let dnf = rms(f0);
    let dny = rms(y0);
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * dny / dnf
    };
    h = h.min(tol.max_step).min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + dir * h * f).collect();
    let mut f1 = vec![0.0; n];
    sys.eval(t0 + dir * h, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let der2 = rms(&diff) / h;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(tol.max_step).min(span)
}

/// Integrates from `t0` to `t_end`, calling `observe` after every accepted step.
pub fn integrate<S, F>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: &Tolerances,
    mut observe: F,
) -> Result<Outcome, OdeError>
where
    S: OdeSystem,
    F: FnMut(&DenseStep) -> Control,
{
    if !(tol.rel_tol > 0.0) || !(tol.abs_tol > 0.0) {
        return Err(OdeError::BadTolerances {
            rel: tol.rel_tol,
            abs: tol.abs_tol,
        });
    }
    let n = sys.dim();
    assert_eq!(y0.len(), n, "state length does not match system dimension");
    let span = (t_end - t0).abs();
    let mut y = y0.to_vec();
    let mut t = t0;
    if span == 0.0 {
        return Ok(Outcome {
            t,
            y,
            accepted: 0,
            rejected: 0,
            stopped_early: false,
        });
    }
    let dir = (t_end - t0).signum();
    let mut k1 = vec![0.0; n];
    sys.eval(t, &y, &mut k1);
    let mut h = initial_step(sys, t, &y, &k1, dir, tol, span);
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    );
    let mut ys = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut facold = 1e-4_f64;
    let mut last_rejected = false;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let h_min = 1e-14 * span;

    loop {
        let remaining = (t_end - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        if accepted + rejected >= tol.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                max_steps: tol.max_steps,
                y,
            });
        }
        h = h.min(tol.max_step);
        let last = h >= remaining * (1.0 - 1e-12);
        if last {
            h = remaining;
        }
        if h < h_min && !last {
            return Err(OdeError::StepUnderflow { t, h, y });
        }
        let hd = h * dir;
        for i in 0..n {
            ys[i] = y[i] + hd * A21 * k1[i];
        }
        sys.eval(t + C2 * hd, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + hd * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.eval(t + C3 * hd, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + hd * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.eval(t + C4 * hd, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + hd * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.eval(t + C5 * hd, &ys, &mut k5);
        for i in 0..n {
            ys[i] =
                y[i] + hd * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + hd };
        sys.eval(t_new, &ys, &mut k6);
        for i in 0..n {
            y1[i] =
                y[i] + hd * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.eval(t_new, &y1, &mut k7);
        for i in 0..n {
            err[i] =
                hd * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let e = err_norm(&err, &y, &y1, tol);
        if !e.is_finite() {
            if h <= h_min {
                return Err(OdeError::NonFinite { t, y });
            }
            h *= 0.25;
            rejected += 1;
            last_rejected = true;
            continue;
        }
        let fac11 = e.powf(EXPO1);
        if e <= 1.0 {
            let mut fac = fac11 / facold.powf(BETA_PI);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            facold = e.max(1e-4);
            accepted += 1;

            let mut r2 = vec![0.0; n];
            let mut r3 = vec![0.0; n];
            let mut r4 = vec![0.0; n];
            let mut r5 = vec![0.0; n];
            for i in 0..n {
                let ydiff = y1[i] - y[i];
                let bspl = hd * k1[i] - ydiff;
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - hd * k7[i] - bspl;
                r5[i] = hd
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep {
                t0: t,
                t1: t_new,
                rcont: [y.clone(), r2, r3, r4, r5],
                y1: y1.clone(),
            };
            if y1.iter().any(|v| !v.is_finite()) {
                return Err(OdeError::NonFinite { t: t_new, y: y1 });
            }
            match observe(&step) {
                Control::Continue => {}
                Control::StopAt(ts) => {
                    let ts = if dir > 0.0 {
                        ts.clamp(t, t_new)
                    } else {
                        ts.clamp(t_new, t)
                    };
                    let mut ye = vec![0.0; n];
                    step.eval(ts, &mut ye);
                    return Ok(Outcome {
                        t: ts,
                        y: ye,
                        accepted,
                        rejected,
                        stopped_early: true,
                    });
                }
            }
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            h = h_new;
            last_rejected = false;
        } else {
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            rejected += 1;
            last_rejected = true;
        }
    }
    Ok(Outcome {
        t,
        y,
        accepted,
        rejected,
        stopped_early: false,
    })
}
