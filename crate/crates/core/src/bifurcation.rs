//! Closed-form second-order bifurcation function on the orbit of uniaxial
//! equilibria and the existence and stability predicates derived from it.
//!
//! Under weak shear `β`, the return map displaces an orbit point `Z(θ, φ0)`
//! along the latitude direction by `β² f2(θ) + O(β³)`, with
//! `f2(θ) = T0/(12√2 a) · sin 2θ · f̂2(θ)` and
//! `f̂2(θ) = 3 Λ0 τ_λ sin²θ − Λ2 τ_μ (3 + cos²θ)`.
//! Simple zeros of `f2` are the periodic orbits that persist; the sign of
//! `df2/dθ` decides their stability.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{
    general_coeff_reduction, ldg_equilibrium, spectral_data, Alignment, Equilibrium, ModelError,
    ModelSpec, PolarRate, SpectralData,
};
use crate::tensor::{I0, I11, I12, I21, I22, SQRT2, SQRT3, SQRT6};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcationError {
    #[error(
        "degenerate alignment family: Λ0 = Λ2 = 0; excluded ratios (m_c:m_l:m_q) are \
         (0:0:1), (−12a²:3a:1) and (6a²:3a:−2)"
    )]
    DegenerateFamily,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffSource {
    ThreeTerm,
    SevenTerm,
}

/// Weights of the radial and biaxial contributions to the bifurcation function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifCoefficients {
    pub lambda0: f64,
    pub lambda2: f64,
    pub source: CoeffSource,
}

fn three_term_lambdas(m_c: f64, m_l: f64, m_q: f64, a: f64) -> (f64, f64) {
    let l0 = m_c * m_c + 2.0 * a * m_c * m_l + 6.0 * a * a * m_c * m_q;
    let l2 = m_c * m_c + 2.0 * a * m_c * m_l - 8.0 * a * a * m_l * m_l;
    (l0, l2)
}

/// `Λ0, Λ2` for the alignment family at equilibrium scale `a`.
pub fn lambda_coeffs(align: &Alignment, a: f64) -> Result<BifCoefficients, BifurcationError> {
    let (l0, l2, scale, source) = match *align {
        Alignment::ThreeTerm { m_c, m_l, m_q } => {
            let (l0, l2) = three_term_lambdas(m_c, m_l, m_q, a);
            let s = m_c.abs().max(a * m_l.abs()).max(a * a * m_q.abs());
            (l0, l2, s * s, CoeffSource::ThreeTerm)
        }
        Alignment::SevenTerm { v } => {
            let r = general_coeff_reduction(&v, a);
            let (b0, b2) = three_term_lambdas(r.v1s, r.v2s, r.v4s, a);
            let a2 = a * a;
            let l0 = b0 - r.w3 * (2.0 * a2 * r.v1s + 4.0 * a2 * a * r.v2s + 12.0 * a2 * a2 * r.v4s);
            let l2 = b2 - r.w3 * (6.0 * a2 * r.v1s - 12.0 * a2 * a * r.v2s);
            let s = r
                .v1s
                .abs()
                .max(a * r.v2s.abs())
                .max(a2 * r.v4s.abs())
                .max(a2 * r.w3.abs());
            (l0, l2, s * s, CoeffSource::SevenTerm)
        }
    };
    if l0.abs() <= 1e-12 * scale && l2.abs() <= 1e-12 * scale {
        return Err(BifurcationError::DegenerateFamily);
    }
    Ok(BifCoefficients {
        lambda0: l0,
        lambda2: l2,
        source,
    })
}

/// Polar data of `λ` and `μ` at rotation rate `ω`.
pub fn spectral_quantities(
    lambda: f64,
    mu: f64,
    omega: f64,
) -> Result<(PolarRate, PolarRate), BifurcationError> {
    let sd = SpectralData::new(f64::NAN, lambda, mu, omega)?;
    Ok((sd.lambda, sd.mu))
}

/// `f̂2(θ) = 3Λ0 τ_λ sin²θ − Λ2 τ_μ (3 + cos²θ)`.
pub fn fhat2(theta: f64, coeffs: &BifCoefficients, sd: &SpectralData) -> f64 {
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    3.0 * coeffs.lambda0 * sd.lambda.tau * s2 - coeffs.lambda2 * sd.mu.tau * (3.0 + c2)
}

/// Prefactor `T0 / (12√2 a)` of the full bifurcation function.
pub fn f2_prefactor(sd: &SpectralData) -> f64 {
    sd.t0() / (12.0 * SQRT2 * sd.a)
}

/// `f2(θ) = T0/(12√2 a) · sin 2θ · f̂2(θ)`.
pub fn f2(theta: f64, coeffs: &BifCoefficients, sd: &SpectralData) -> f64 {
    f2_prefactor(sd) * (2.0 * theta).sin() * fhat2(theta, coeffs, sd)
}

/// `df2/dθ`.
pub fn f2_slope(theta: f64, coeffs: &BifCoefficients, sd: &SpectralData) -> f64 {
    let s2t = (2.0 * theta).sin();
    let dfhat = s2t * (3.0 * coeffs.lambda0 * sd.lambda.tau + coeffs.lambda2 * sd.mu.tau);
    f2_prefactor(sd) * (2.0 * (2.0 * theta).cos() * fhat2(theta, coeffs, sd) + s2t * dfhat)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Logrolling,
    Tumbling,
    Kayaking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    /// Negative slope attracts.
    pub fn from_slope(slope: f64) -> Self {
        if slope < 0.0 {
            Stability::Stable
        } else if slope > 0.0 {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifZero {
    pub theta: f64,
    pub kind: ZeroKind,
    pub slope: f64,
    pub stability: Stability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub zeros: Vec<BifZero>,
    pub notes: Vec<String>,
}

impl ZeroSet {
    /// Off-equator zero in `(0, π/2)`, if any.
    pub fn kayak_angle(&self) -> Option<f64> {
        self.zeros
            .iter()
            .find(|z| z.kind == ZeroKind::Kayaking && z.theta < FRAC_PI_2)
            .map(|z| z.theta)
    }
}

/// `(Λ0/Λ2)(τ_λ/τ_μ)`; off-equator zeros exist when this exceeds 1.
pub fn kayak_ratio(coeffs: &BifCoefficients, sd: &SpectralData) -> f64 {
    coeffs.lambda0 / coeffs.lambda2 * sd.rho()
}

/// Zeros of `f2` on `[0, π)` with their slopes.
///
/// `θ = 0` and `θ = π/2` are always zeros. When `R = (Λ0/Λ2)(τ_λ/τ_μ) > 1`
/// the pair `θ = π/2 ± Θ` with `sin²θ = 4/(3R + 1)` is added; both label the
/// same kayaking orbit.
pub fn find_zeros(coeffs: &BifCoefficients, sd: &SpectralData) -> ZeroSet {
    let mut zeros = Vec::with_capacity(4);
    let mut notes = Vec::new();
    let mk = |theta: f64, kind| {
        let slope = f2_slope(theta, coeffs, sd);
        BifZero {
            theta,
            kind,
            slope,
            stability: Stability::from_slope(slope),
        }
    };
    zeros.push(mk(0.0, ZeroKind::Logrolling));
    zeros.push(mk(FRAC_PI_2, ZeroKind::Tumbling));
    if coeffs.lambda2 == 0.0 {
        notes.push("Λ2 = 0: no off-equator zeros".to_string());
    } else {
        let r = kayak_ratio(coeffs, sd);
        if r > 1.0 {
            let theta = (4.0 / (3.0 * r + 1.0)).sqrt().asin();
            zeros.insert(1, mk(theta, ZeroKind::Kayaking));
            zeros.push(mk(PI - theta, ZeroKind::Kayaking));
            notes.push(format!(
                "θ = {theta} and π − θ label the same kayaking orbit (Θ = {})",
                FRAC_PI_2 - theta
            ));
        } else if r == 1.0 {
            notes.push("R = 1: off-equator zeros merge with the equator".to_string());
        }
    }
    ZeroSet { zeros, notes }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KayakVerdict {
    pub exists: bool,
    pub stable: Option<bool>,
    /// `(Λ0/Λ2)(τ_λ/τ_μ)`.
    pub ratio: f64,
    /// `(λ − μ)(4ω² − λμ)`; its sign is that of `τ_λ − τ_μ`.
    pub k_value: f64,
    pub notes: Vec<String>,
}

/// Existence and stability of kayaking orbits near the orbit of equilibria.
pub fn kayak_exists(sd: &SpectralData, coeffs: &BifCoefficients) -> KayakVerdict {
    let (l, m, w) = (sd.lambda.nu, sd.mu.nu, sd.omega);
    let k_value = (l - m) * (4.0 * w * w - l * m);
    let mut notes = Vec::new();
    if !(l < 0.0 && m < 0.0) {
        notes.push(format!(
            "equilibrium eigenvalues not both negative (λ = {l}, μ = {m})"
        ));
    }
    let ratio = if coeffs.lambda2 == 0.0 {
        f64::NAN
    } else {
        kayak_ratio(coeffs, sd)
    };
    let exists = if coeffs.lambda0 == coeffs.lambda2 {
        if k_value == 0.0 {
            notes.push("marginal: (λ − μ)(4ω² − λμ) = 0".to_string());
        }
        k_value < 0.0
    } else {
        ratio > 1.0
    };
    let stable = if exists {
        let zs = find_zeros(coeffs, sd);
        zs.zeros
            .iter()
            .find(|z| z.kind == ZeroKind::Kayaking)
            .map(|z| z.stability == Stability::Stable)
    } else {
        None
    };
    KayakVerdict {
        exists,
        stable,
        ratio,
        k_value,
        notes,
    }
}

/// Landau–de Gennes kayaking condition as printed in closed form:
/// `((a+3)b − 12a²c)(4ω² + 3b(ab − 12a²c)) < 0`.
pub fn ldg_condition_verbatim(a: f64, b: f64, c: f64, omega: f64) -> bool {
    ((a + 3.0) * b - 12.0 * a * a * c)
        * (4.0 * omega * omega + 3.0 * b * (a * b - 12.0 * a * a * c))
        < 0.0
}

/// Landau–de Gennes kayaking condition `(λ − μ)(4ω² − λμ) < 0` with `λ = ab − 12a²c`, `μ = −3ab`.
pub fn ldg_condition_direct(a: f64, b: f64, c: f64, omega: f64) -> bool {
    let lambda = a * b - 12.0 * a * a * c;
    let mu = -3.0 * a * b;
    (lambda - mu) * (4.0 * omega * omega - lambda * mu) < 0.0
}

/// Open interval of `τ` on which the larger equilibrium root lies in `(b/(12c), 1/3)`.
pub fn ldg_tau_range(b: f64, c: f64) -> (f64, f64) {
    ((b - 2.0 * c) / 3.0, b * b / (24.0 * c))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub omega: f64,
    pub tau_ldg: f64,
    pub a: f64,
    pub direct: bool,
    pub verbatim: bool,
}

impl RegionPoint {
    pub fn disagree(&self) -> bool {
        self.direct != self.verbatim
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub b: f64,
    pub c: f64,
    pub omega: f64,
    pub b_below_4c: bool,
    pub five_b_below_2c: bool,
    /// Upper bound on `ω` from `4ω² < b(4c − b)`, when it applies.
    pub omega_bound: Option<f64>,
    /// Existence for some `τ` according to the printed inequalities.
    pub verbatim_exists: bool,
    /// Existence for some `τ` on the grid according to the direct criterion.
    pub direct_exists: bool,
    pub tau_range: (f64, f64),
    pub grid: Vec<RegionPoint>,
    pub disagreements: usize,
    pub notes: Vec<String>,
}

fn region_point(b: f64, c: f64, omega: f64, tau_ldg: f64) -> Option<RegionPoint> {
    let eq = ldg_equilibrium(&crate::models::LdgCoefficients { b, c, tau_ldg }).ok()?;
    Some(RegionPoint {
        omega,
        tau_ldg,
        a: eq.a,
        direct: ldg_condition_direct(eq.a, b, c, omega),
        verbatim: ldg_condition_verbatim(eq.a, b, c, omega),
    })
}

/// `n` interior points of the open interval `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
        .collect()
}

/// Region inequalities for `(b, c, ω)` next to the direct criterion on an interior `τ` grid.
pub fn ldg_region_check(b: f64, c: f64, omega: f64, n_tau: usize) -> RegionReport {
    let b_below_4c = b < 4.0 * c;
    let five_b_below_2c = 5.0 * b < 2.0 * c;
    let omega_bound = if b_below_4c && !five_b_below_2c {
        Some((b * (4.0 * c - b)).sqrt() / 2.0)
    } else {
        None
    };
    let verbatim_exists =
        b_below_4c && (five_b_below_2c || 4.0 * omega * omega < b * (4.0 * c - b));
    let tau_range = ldg_tau_range(b, c);
    let mut notes = Vec::new();
    if !b_below_4c {
        notes.push("b<4c violated: no stable kayaking for any τ".to_string());
    }
    let grid: Vec<RegionPoint> = if b_below_4c {
        interior_grid(tau_range.0, tau_range.1, n_tau)
            .into_iter()
            .filter_map(|t| region_point(b, c, omega, t))
            .collect()
    } else {
        Vec::new()
    };
    let direct_exists = grid.iter().any(|p| p.direct);
    let disagreements = grid.iter().filter(|p| p.disagree()).count();
    if disagreements > 0 || direct_exists != verbatim_exists {
        notes.push(format!(
            "printed inequalities and the direct (λ, μ) criterion disagree at {disagreements} of {} τ values",
            grid.len()
        ));
    }
    RegionReport {
        b,
        c,
        omega,
        b_below_4c,
        five_b_below_2c,
        omega_bound,
        verbatim_exists,
        direct_exists,
        tau_range,
        grid,
        disagreements,
        notes,
    }
}

/// Both verdict layers on an `(ω, τ)` grid, row-major in `ω`.
pub fn region_grid(b: f64, c: f64, omegas: &[f64], taus: &[f64]) -> Vec<Option<RegionPoint>> {
    omegas
        .iter()
        .flat_map(|&w| taus.iter().map(move |&t| region_point(b, c, w, t)))
        .collect()
}

/// `S = ∫₀ᵗ e^{ν(t−s)} sin(2ωs + 2φ) ds` and `C`, the same with cosine.
pub fn sc_integrals(t: f64, phi: f64, nu: f64, omega: f64) -> (f64, f64) {
    let x = 2.0 * omega * t + 2.0 * phi;
    if nu == 0.0 {
        let w2 = 2.0 * omega;
        return (
            ((2.0 * phi).cos() - x.cos()) / w2,
            (x.sin() - (2.0 * phi).sin()) / w2,
        );
    }
    let p = PolarRate::new(nu, omega);
    let g2 = 2.0 * p.gamma;
    let e = (nu * t).exp();
    (
        (e * (2.0 * phi + g2).sin() - (x + g2).sin()) / p.r,
        (e * (2.0 * phi + g2).cos() - (x + g2).cos()) / p.r,
    )
}

/// Coefficients of `E2(π/4 − ωt)` in the frame at `Z(θ, φ)`, ordered like the frame slots.
///
/// Slots `E0, E11, E21` multiply `sin(2ωt + 2φ)`; slots `E12, E22` multiply `cos(2ωt + 2φ)`.
pub fn c_coeffs(theta: f64) -> [f64; 5] {
    let (s, c) = theta.sin_cos();
    let mut out = [0.0; 5];
    out[I0] = 0.5 * SQRT3 * s * s;
    out[I11] = 0.5 * (2.0 * theta).sin();
    out[I12] = s;
    out[I21] = 0.5 * (1.0 + c * c);
    out[I22] = c;
    out
}

/// `E11` component of the second derivative of `G` at the equilibrium applied to a normal `h` and tangent `k`.
pub fn kappa1(h: &[f64; 5], k: &[f64; 5], lambda: f64, mu: f64, a: f64) -> f64 {
    lambda / (SQRT6 * a) * h[I0] * k[I11]
        - mu / (3.0 * SQRT2 * a) * (h[I21] * k[I11] + h[I22] * k[I12])
}

/// `E12` companion of [`kappa1`].
pub fn kappa2(h: &[f64; 5], k: &[f64; 5], lambda: f64, mu: f64, a: f64) -> f64 {
    lambda / (SQRT6 * a) * h[I0] * k[I12]
        - mu / (3.0 * SQRT2 * a) * (h[I22] * k[I11] - h[I21] * k[I12])
}

/// Analytic prediction for a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationReport {
    pub equilibrium: Equilibrium,
    pub spectral: SpectralData,
    pub coeffs: BifCoefficients,
    pub rho: f64,
    pub k_sign: i8,
    pub zeros: ZeroSet,
    pub kayak: KayakVerdict,
    pub theta_kayak: Option<f64>,
    pub region: RegionReport,
}

impl BifurcationReport {
    pub fn kayak_exists(&self) -> bool {
        self.kayak.exists
    }
}

/// Runs the analytic chain: equilibrium, spectrum, coefficients, zeros, verdicts, region cross-check.
pub fn predict(spec: &ModelSpec) -> Result<BifurcationReport, BifurcationError> {
    let (equilibrium, sd) = spectral_data(spec)?;
    let coeffs = lambda_coeffs(&spec.align, sd.a)?;
    let zeros = find_zeros(&coeffs, &sd);
    let kayak = kayak_exists(&sd, &coeffs);
    let theta_kayak = if kayak.exists {
        zeros.kayak_angle()
    } else {
        None
    };
    let region = ldg_region_check(spec.ldg.b, spec.ldg.c, spec.omega, 50);
    Ok(BifurcationReport {
        equilibrium,
        rho: sd.rho(),
        k_sign: if kayak.k_value > 0.0 {
            1
        } else if kayak.k_value < 0.0 {
            -1
        } else {
            0
        },
        spectral: sd,
        coeffs,
        zeros,
        kayak,
        theta_kayak,
        region,
    })
}
