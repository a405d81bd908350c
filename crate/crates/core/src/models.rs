//! Model fields: the Landau–de Gennes interaction field, the alignment field of
//! the imposed shear, and the equilibrium spectrum they induce.

use nalgebra::Matrix5;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{bracket_plus, inner, QTensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("no isotropic-nematic equilibrium: b² − 24cτ = {0} ≤ 0")]
    NoEquilibrium(f64),
    #[error("degenerate spectrum: λμ = 0 (λ = {lambda}, μ = {mu})")]
    DegenerateSpectrum { lambda: f64, mu: f64 },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Coefficients of the Landau–de Gennes potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdgCoefficients {
    pub b: f64,
    pub c: f64,
    pub tau_ldg: f64,
}

/// Alignment field `L(Q)D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Alignment {
    /// `m_c D + m_l [D,Q]⁺ + m_q tr(DQ) Q`.
    ThreeTerm { m_c: f64, m_l: f64, m_q: f64 },
    /// `v1 D + v2 [Q,D]⁺ + v3 [Q²,D]⁺ + v4 tr(QD) Q + v5 tr(Q²D) Q
    ///  + v6 tr(QD) [Q,Q]⁺ + v7 tr(Q²D) [Q,Q]⁺` with constant coefficients.
    SevenTerm { v: [f64; 7] },
}

impl Alignment {
    pub fn beris_edwards() -> Self {
        Alignment::ThreeTerm {
            m_c: 2.0 / 3.0,
            m_l: 1.0,
            m_q: -2.0,
        }
    }

    pub fn olmsted_goldbart() -> Self {
        Alignment::ThreeTerm {
            m_c: 1.0,
            m_l: 0.0,
            m_q: 0.0,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        match *self {
            Alignment::ThreeTerm { m_c, m_l, m_q } => Alignment::ThreeTerm {
                m_c: s * m_c,
                m_l: s * m_l,
                m_q: s * m_q,
            },
            Alignment::SevenTerm { v } => Alignment::SevenTerm {
                v: v.map(|x| s * x),
            },
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Alignment::ThreeTerm { m_c, m_l, m_q } => {
                m_c.is_finite() && m_l.is_finite() && m_q.is_finite()
            }
            Alignment::SevenTerm { v } => v.iter().all(|x| x.is_finite()),
        }
    }
}

/// Physical coefficients of the shear-flow problem. The shear rate is normalised to 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub omega: f64,
    pub beta: f64,
    pub ldg: LdgCoefficients,
    pub align: Alignment,
}

impl ModelSpec {
    /// Reference configuration: `(b, c, τ, ω, β) = (1, 1, 1/30, 0.05, 5e-3)` with Beris–Edwards alignment.
    pub fn reference() -> Self {
        Self {
            omega: 0.05,
            beta: 5e-3,
            ldg: LdgCoefficients {
                b: 1.0,
                c: 1.0,
                tau_ldg: 1.0 / 30.0,
            },
            align: Alignment::beris_edwards(),
        }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }

    pub fn with_omega(&self, omega: f64) -> Self {
        Self { omega, ..*self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let LdgCoefficients { b, c, tau_ldg } = self.ldg;
        if !(b > 0.0) || !(c > 0.0) {
            return Err(ModelError::Invalid(format!(
                "need b > 0 and c > 0, got b = {b}, c = {c}"
            )));
        }
        if !(self.omega > 0.0) {
            return Err(ModelError::Invalid(format!(
                "need ω > 0, got {}",
                self.omega
            )));
        }
        if !self.beta.is_finite() || !tau_ldg.is_finite() || !self.align.is_finite() {
            return Err(ModelError::Invalid("non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// Uniaxial equilibrium scale and the nonzero eigenvalues of the linearised field there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub a: f64,
    pub lambda: f64,
    pub mu: f64,
    pub warnings: Vec<String>,
}

/// Larger root of `τ + 6a²c − ab = 0`, with `λ = ab − 12a²c` and `μ = −3ab`.
pub fn ldg_equilibrium(ldg: &LdgCoefficients) -> Result<Equilibrium, ModelError> {
    let LdgCoefficients { b, c, tau_ldg } = *ldg;
    let disc = b * b - 24.0 * c * tau_ldg;
    if !(disc > 0.0) {
        if disc == 0.0 {
            let a = b / (12.0 * c);
            return Err(ModelError::DegenerateSpectrum {
                lambda: a * b - 12.0 * a * a * c,
                mu: -3.0 * a * b,
            });
        }
        return Err(ModelError::NoEquilibrium(disc));
    }
    let a = (b + disc.sqrt()) / (12.0 * c);
    let lambda = a * b - 12.0 * a * a * c;
    let mu = -3.0 * a * b;
    if lambda * mu == 0.0 {
        return Err(ModelError::DegenerateSpectrum { lambda, mu });
    }
    let mut warnings = Vec::new();
    if a >= 1.0 / 3.0 {
        warnings.push(format!("unphysical equilibrium: a = {a} ≥ 1/3"));
    }
    if tau_ldg <= 0.0 {
        warnings.push(format!(
            "τ = {tau_ldg} ≤ 0: the isotropic state is unstable"
        ));
    }
    if !(lambda < 0.0 && mu < 0.0) {
        warnings.push(format!(
            "equilibrium not attracting: λ = {lambda}, μ = {mu}"
        ));
    }
    Ok(Equilibrium {
        a,
        lambda,
        mu,
        warnings,
    })
}

/// Polar data `r_ν, γ_ν, τ_ν` of one eigenvalue `ν` at rotation rate `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarRate {
    pub nu: f64,
    /// `r = √(ν² + 4ω²)`.
    pub r: f64,
    /// `r cos 2γ = ν`, `r sin 2γ = 2ω`.
    pub gamma: f64,
    /// `ν / r²`.
    pub tau: f64,
}

impl PolarRate {
    pub fn new(nu: f64, omega: f64) -> Self {
        let r2 = nu * nu + 4.0 * omega * omega;
        Self {
            nu,
            r: r2.sqrt(),
            gamma: 0.5 * (2.0 * omega).atan2(nu),
            tau: nu / r2,
        }
    }
}

/// Equilibrium spectrum together with its polar data at rotation rate `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub a: f64,
    pub omega: f64,
    pub lambda: PolarRate,
    pub mu: PolarRate,
}

impl SpectralData {
    pub fn new(a: f64, lambda: f64, mu: f64, omega: f64) -> Result<Self, ModelError> {
        if lambda * mu == 0.0 || !(lambda * mu).is_finite() {
            return Err(ModelError::DegenerateSpectrum { lambda, mu });
        }
        if !(omega > 0.0) {
            return Err(ModelError::Invalid(format!("need ω > 0, got {omega}")));
        }
        Ok(Self {
            a,
            omega,
            lambda: PolarRate::new(lambda, omega),
            mu: PolarRate::new(mu, omega),
        })
    }

    /// `τ_λ / τ_μ`.
    pub fn rho(&self) -> f64 {
        self.lambda.tau / self.mu.tau
    }

    /// Unperturbed period `2π/ω` of orbits off the equator.
    pub fn t0(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// Equilibrium and spectral data for a model.
pub fn spectral_data(spec: &ModelSpec) -> Result<(Equilibrium, SpectralData), ModelError> {
    spec.validate()?;
    let eq = ldg_equilibrium(&spec.ldg)?;
    let sd = SpectralData::new(eq.a, eq.lambda, eq.mu, spec.omega)?;
    Ok((eq, sd))
}

/// `G(Q) = −(τ + c|Q|²)Q + (b/2)[Q,Q]⁺`.
pub fn eval_g(q: &QTensor, ldg: &LdgCoefficients) -> QTensor {
    let m = q.matrix();
    let sq = QTensor::from_matrix(&(m * m));
    *q * (-(ldg.tau_ldg + ldg.c * q.norm_sq())) + sq * ldg.b
}

/// `L(Q)D` for the chosen alignment family.
pub fn eval_l(q: &QTensor, align: &Alignment, d: &QTensor) -> QTensor {
    match *align {
        Alignment::ThreeTerm { m_c, m_l, m_q } => {
            *d * m_c + bracket_plus(d, q) * m_l + *q * (m_q * inner(d, q))
        }
        Alignment::SevenTerm { v } => {
            let qm = q.matrix();
            let dm = d.matrix();
            let q2 = qm * qm;
            let tr_qd = inner(q, d);
            let tr_q2d = (q2 * dm).trace();
            let qq = QTensor::from_matrix(&(q2 * 2.0));
            *d * v[0]
                + bracket_plus(q, d) * v[1]
                + QTensor::from_matrix(&((q2 * dm + dm * q2) * v[2]))
                + *q * (v[3] * tr_qd + v[4] * tr_q2d)
                + qq * (v[5] * tr_qd + v[6] * tr_q2d)
        }
    }
}

/// Central-difference Jacobian of `f` at `q` in fixed-basis coordinates.
pub fn fd_jacobian<F: Fn(&QTensor) -> QTensor>(f: F, q: &QTensor, h: f64) -> Matrix5<f64> {
    let mut jac = Matrix5::zeros();
    for j in 0..5 {
        let e = QTensor::basis(j) * h;
        let df = (f(&(*q + e)) - f(&(*q - e))) * (0.5 / h);
        for i in 0..5 {
            jac[(i, j)] = df.coord(i);
        }
    }
    jac
}

/// Jacobian of `G` at `q` by central differences with step `1e-6·max(1, |Q|)`.
pub fn jacobian_g(q: &QTensor, ldg: &LdgCoefficients) -> Matrix5<f64> {
    let h = 1e-6 * q.norm().max(1.0);
    fd_jacobian(|x| eval_g(x, ldg), q, h)
}

/// Coefficients of the seven-term field restricted to the orbit, where it
/// collapses to `v1* D + v2* [Z,D]⁺ + v4* tr(ZD) Z`; `w3` is the `[Q²,D]⁺` weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedCoefficients {
    pub v1s: f64,
    pub v2s: f64,
    pub v4s: f64,
    pub w3: f64,
}

pub fn general_coeff_reduction(v: &[f64; 7], a: f64) -> ReducedCoefficients {
    ReducedCoefficients {
        v1s: v[0] + 4.0 * a * a * v[2],
        v2s: v[1] + a * v[2],
        v4s: (v[3] + a * v[4]) + 2.0 * a * (v[5] + a * v[6]),
        w3: v[2],
    }
}
