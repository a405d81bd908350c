//! Run configuration: a TOML file with `[model]`, `[alignment]`, `[integrator]`
//! and `[section]` tables, every field optional, plus command-line overrides.

use std::path::Path;

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::dynamics::IntegratorConfig;
use crate::models::{Alignment, LdgCoefficients, ModelSpec};
use crate::poincare::{PoincareConfig, SectionSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub b: f64,
    pub c: f64,
    pub tau_ldg: f64,
    pub omega: f64,
    pub beta: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let r = ModelSpec::reference();
        Self {
            b: r.ldg.b,
            c: r.ldg.c,
            tau_ldg: r.ldg.tau_ldg,
            omega: r.omega,
            beta: r.beta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Unbounded when absent; return-map integrations cap it at `0.5/ω` regardless.
    pub max_step: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = PoincareConfig::default().integrator;
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_step: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectionTable {
    pub phi0: f64,
    pub epsilon: f64,
}

impl Default for SectionTable {
    fn default() -> Self {
        let d = SectionSpec::default();
        Self {
            phi0: d.phi0,
            epsilon: d.epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub alignment: Alignment,
    pub integrator: IntegratorSection,
    pub section: SectionTable,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSection::default(),
            alignment: Alignment::beris_edwards(),
            integrator: IntegratorSection::default(),
            section: SectionTable::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads `path`, or returns the reference configuration when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec {
            omega: self.model.omega,
            beta: self.model.beta,
            ldg: LdgCoefficients {
                b: self.model.b,
                c: self.model.c,
                tau_ldg: self.model.tau_ldg,
            },
            align: self.alignment,
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.integrator.rel_tol,
            abs_tol: self.integrator.abs_tol,
            max_step: self.integrator.max_step.unwrap_or(f64::INFINITY),
            dense_output: false,
        }
    }

    pub fn poincare(&self) -> PoincareConfig {
        PoincareConfig {
            integrator: self.integrator(),
            ..PoincareConfig::default()
        }
    }

    pub fn section(&self) -> SectionSpec {
        SectionSpec {
            phi0: self.section.phi0,
            epsilon: self.section.epsilon,
            ..SectionSpec::default()
        }
    }

    /// Checks everything that can be checked without running the model.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model_spec()
            .validate()
            .map_err(|e| CliError::Config(format!("[model]/[alignment]: {e}")))?;
        let i = &self.integrator;
        if !(i.rel_tol > 0.0) || !(i.abs_tol > 0.0) || i.max_step.is_some_and(|h| !(h > 0.0)) {
            return Err(CliError::Config(
                "[integrator]: tolerances and max_step must be positive".into(),
            ));
        }
        self.section()
            .validate()
            .map_err(|e| CliError::Config(format!("[section]: {e}")))
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configuration serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Command-line overrides of configuration values.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long = "tau-ldg", allow_negative_numbers = true)]
    pub tau_ldg: Option<f64>,
    #[arg(long = "m-c", allow_negative_numbers = true)]
    pub m_c: Option<f64>,
    #[arg(long = "m-l", allow_negative_numbers = true)]
    pub m_l: Option<f64>,
    #[arg(long = "m-q", allow_negative_numbers = true)]
    pub m_q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v5: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v6: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v7: Option<f64>,
}

impl Overrides {
    /// Applies the overrides. Any `--vN` switches a three-term alignment to the seven-term
    /// family with the unspecified coefficients zero.
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        let m = &mut cfg.model;
        for (slot, value) in [
            (&mut m.omega, self.omega),
            (&mut m.beta, self.beta),
            (&mut m.b, self.b),
            (&mut m.c, self.c),
            (&mut m.tau_ldg, self.tau_ldg),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        let three = [self.m_c, self.m_l, self.m_q];
        let seven = [
            self.v1, self.v2, self.v3, self.v4, self.v5, self.v6, self.v7,
        ];
        let any_three = three.iter().any(Option::is_some);
        let any_seven = seven.iter().any(Option::is_some);
        if any_three && any_seven {
            return Err(CliError::Config(
                "--m-* and --v* overrides select different alignment families".into(),
            ));
        }
        match &mut cfg.alignment {
            Alignment::ThreeTerm { m_c, m_l, m_q } if any_three => {
                for (slot, value) in [(m_c, three[0]), (m_l, three[1]), (m_q, three[2])] {
                    if let Some(v) = value {
                        *slot = v;
                    }
                }
            }
            Alignment::SevenTerm { .. } if any_three => {
                return Err(CliError::Config(
                    "--m-* overrides need a three_term [alignment]".into(),
                ));
            }
            _ => {}
        }
        if any_seven {
            let mut v = match cfg.alignment {
                Alignment::SevenTerm { v } => v,
                Alignment::ThreeTerm { .. } => [0.0; 7],
            };
            for (slot, value) in v.iter_mut().zip(seven) {
                if let Some(x) = value {
                    *slot = x;
                }
            }
            cfg.alignment = Alignment::SevenTerm { v };
        }
        Ok(())
    }
}
