//! Run configuration for the command-line driver.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Deserialize;

use crate::anglesolve::SignAssignment;
use crate::bsnet::{AngleVector, SPLITTER_COUNT};
use crate::error::{Error, Result};
use crate::focksim::TwoPhotonInput;
use crate::occsim::{GateKind, GateTarget, LogicalState};
use crate::postselect::{PostselectionRule, Semantics};

/// Gate selection: a named target or a custom 4×4 matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateSpec {
    Cnot,
    Swap,
    Custom { matrix: [[f64; 4]; 4] },
}

impl GateSpec {
    pub fn target(&self) -> Result<GateTarget> {
        match self {
            GateSpec::Cnot => Ok(GateTarget::cnot()),
            GateSpec::Swap => Ok(GateTarget::swap()),
            GateSpec::Custom { matrix } => {
                GateTarget::custom(nalgebra::Matrix4::from_fn(|i, j| matrix[i][j]))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateSpec::Cnot => GateKind::Cnot.name(),
            GateSpec::Swap => GateKind::Swap.name(),
            GateSpec::Custom { .. } => GateKind::Custom.name(),
        }
    }
}

/// One configured input: a basis label or a normalized superposition over
/// the four dual-rail injections.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InputSpec {
    Basis(String),
    Superposition {
        /// Four complex amplitudes as [re, im] pairs, in basis order
        /// 00, 01, 10, 11.
        superposition: [[f64; 2]; 4],
    },
}

impl InputSpec {
    /// The logical basis state, when this input is one.
    pub fn basis(&self) -> Result<Option<LogicalState>> {
        match self {
            InputSpec::Basis(label) => LogicalState::from_label(label).map(Some),
            InputSpec::Superposition { .. } => Ok(None),
        }
    }

    pub fn two_photon_input(&self) -> Result<TwoPhotonInput> {
        match self {
            InputSpec::Basis(label) => {
                Ok(TwoPhotonInput::logical(LogicalState::from_label(label)?))
            }
            InputSpec::Superposition { superposition } => {
                let amps: [Complex64; 4] =
                    std::array::from_fn(|i| Complex64::new(superposition[i][0], superposition[i][1]));
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "superposition norm² = {norm}, expected 1 within 1e-9"
                    )));
                }
                // Renormalize the residual so downstream checks at 1e-12 hold.
                let scale = norm.sqrt();
                TwoPhotonInput::superposition(std::array::from_fn(|i| amps[i] / scale))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            InputSpec::Basis(label) => label.clone(),
            InputSpec::Superposition { .. } => "superposition".to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct PostselectionConfig {
    #[serde(default = "default_forbidden_modes")]
    pub forbidden_modes: Vec<usize>,
    #[serde(default)]
    pub require_one_per_pair: bool,
}

fn default_forbidden_modes() -> Vec<usize> {
    vec![4, 5, 6, 7]
}

impl Default for PostselectionConfig {
    fn default() -> Self {
        Self {
            forbidden_modes: default_forbidden_modes(),
            require_one_per_pair: false,
        }
    }
}

impl PostselectionConfig {
    pub fn rule(&self) -> Result<PostselectionRule> {
        let modes: BTreeSet<usize> = self.forbidden_modes.iter().copied().collect();
        PostselectionRule::new(modes, self.require_one_per_pair)
    }
}

fn deserialize_semantics<'de, D>(deserializer: D) -> std::result::Result<Semantics, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let raw = String::deserialize(deserializer)?;
    match raw.as_str() {
        "occupation" => Ok(Semantics::Occupation),
        "bosonic" => Ok(Semantics::Bosonic),
        "both" => Ok(Semantics::Both),
        other => Err(serde::de::Error::custom(format!(
            "semantics must be occupation, bosonic or both, got {other:?}"
        ))),
    }
}

/// A full run configuration as read from a JSON file.
#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    pub gate: GateSpec,
    /// Twelve angles in radians; mutually exclusive with `signs`.
    #[serde(default)]
    pub angles: Option<Vec<f64>>,
    /// Twelve 50:50 signs (±1), shorthand for θi = signᵢ·π/4.
    #[serde(default)]
    pub signs: Option<Vec<i8>>,
    #[serde(default = "default_inputs")]
    pub inputs: Vec<InputSpec>,
    #[serde(default)]
    pub postselection: PostselectionConfig,
    #[serde(default = "default_semantics", deserialize_with = "deserialize_semantics")]
    pub semantics: Semantics,
}

fn default_inputs() -> Vec<InputSpec> {
    ["00", "01", "10", "11"]
        .iter()
        .map(|s| InputSpec::Basis((*s).to_string()))
        .collect()
}

fn default_semantics() -> Semantics {
    Semantics::Both
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        match (&self.angles, &self.signs) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "config must set exactly one of `angles` and `signs`, got both".into(),
            )),
            (None, None) => Err(Error::InvalidArgument(
                "config must set exactly one of `angles` and `signs`".into(),
            )),
            _ => Ok(()),
        }
    }

    /// The configured angles, resolving the signs shorthand.
    pub fn angle_vector(&self) -> Result<AngleVector> {
        if let Some(angles) = &self.angles {
            let arr: [f64; SPLITTER_COUNT] = angles.clone().try_into().map_err(|_| {
                Error::InvalidArgument(format!("expected 12 angles, got {}", angles.len()))
            })?;
            return AngleVector::new(arr);
        }
        let signs = self.signs.as_ref().expect("validated");
        let arr: [i8; SPLITTER_COUNT] = signs.clone().try_into().map_err(|_| {
            Error::InvalidArgument(format!("expected 12 signs, got {}", signs.len()))
        })?;
        Ok(SignAssignment::new(arr)?.angles())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_signs_config() {
        let text = r#"{
            "gate": "cnot",
            "signs": [1, 1, 1, 1, 1, -1, 1, 1, -1, 1, -1, -1],
            "inputs": ["00", "10"],
            "semantics": "occupation"
        }"#;
        let config = RunConfig::from_json(text).unwrap();
        assert_eq!(config.gate.name(), "cnot");
        assert_eq!(config.inputs.len(), 2);
        let angles = config.angle_vector().unwrap();
        assert_eq!(angles.theta(6), -std::f64::consts::FRAC_PI_4);
        assert!(config.semantics.wants_occupation());
        assert!(!config.semantics.wants_bosonic());
    }

    #[test]
    fn parses_angles_custom_gate_and_superposition() {
        let text = r#"{
            "gate": {"custom": {"matrix": [[0.5,-0.5,0.5,0.5],[-0.5,0.5,0.5,0.5],[-0.5,0.5,-0.5,0.5],[0.5,-0.5,-0.5,0.5]]}},
            "angles": [0,0,0,0,0,0,0,0,0,0,0,0],
            "inputs": [{"superposition": [[0.7071067811865476,0],[0,0.7071067811865476],[0,0],[0,0]]}],
            "postselection": {"forbidden_modes": [4,5,6,7], "require_one_per_pair": true}
        }"#;
        let config = RunConfig::from_json(text).unwrap();
        assert_eq!(config.gate.name(), "custom");
        assert!(config.postselection.require_one_per_pair);
        assert!(matches!(
            config.inputs[0].two_photon_input().unwrap(),
            TwoPhotonInput::Superposition(_)
        ));
        assert_eq!(config.inputs[0].basis().unwrap(), None);
    }

    #[test]
    fn rejects_both_angles_and_signs() {
        let text = r#"{
            "gate": "swap",
            "angles": [0,0,0,0,0,0,0,0,0,0,0,0],
            "signs": [1,1,1,1,1,1,1,1,1,1,1,1]
        }"#;
        assert!(RunConfig::from_json(text).is_err());
    }

    #[test]
    fn rejects_missing_angle_source_and_bad_lengths() {
        assert!(RunConfig::from_json(r#"{"gate": "cnot"}"#).is_err());
        let short = r#"{"gate": "cnot", "angles": [0, 1]}"#;
        let config = RunConfig::from_json(short).unwrap();
        assert!(config.angle_vector().is_err());
    }

    #[test]
    fn rejects_denormalized_superposition() {
        let text = r#"{
            "gate": "cnot",
            "signs": [1,1,1,1,1,1,1,1,1,1,1,1],
            "inputs": [{"superposition": [[1,0],[1,0],[0,0],[0,0]]}]
        }"#;
        let config = RunConfig::from_json(text).unwrap();
        assert!(config.inputs[0].two_photon_input().is_err());
    }

    #[test]
    fn defaults_cover_inputs_postselection_and_semantics() {
        let text = r#"{"gate": "swap", "signs": [-1,1,-1,-1,1,-1,1,1,-1,1,1,1]}"#;
        let config = RunConfig::from_json(text).unwrap();
        assert_eq!(config.inputs.len(), 4);
        let rule = config.postselection.rule().unwrap();
        assert_eq!(rule.forbidden_modes, (4..8).collect());
        assert!(!rule.require_one_per_pair);
        assert!(matches!(config.semantics, Semantics::Both));
    }
}
