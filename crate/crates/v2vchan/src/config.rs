//! TOML configuration documents and scenario presets.
//!
//! A document can name a preset, spell out every parameter, or do both — any
//! section it provides replaces the preset's section wholesale, so a partial
//! `[mt]` table is rejected rather than silently half-merged. Unknown keys
//! anywhere are errors, and the `los` key is rejected explicitly: no
//! line-of-sight component is modeled, and ignoring the flag silently would
//! misrepresent the output.
//!
//! Loading returns the resolved [`SimulationConfig`] together with a
//! provenance list naming every value that came from a preset rather than
//! from the document, so runs can log exactly which numbers were stand-in
//! defaults.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chanmodel::{ConfigError, PathGeometry, SimulationConfig, Terminal};
use crate::geometry::{AntennaArray, Axis, ClusterGeometry, GeometryError, VelocityProfile};
use crate::params::{ParamsError, PowerDelayParams, SPEED_OF_LIGHT};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Failure modes of configuration loading.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read configuration: {0}")]
    Io(#[from] std::io::Error),
    #[error("configuration does not parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("configuration does not serialize: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error(
        "the `los` key is rejected: no line-of-sight component is modeled, \
         so the flag would be misleading — remove it"
    )]
    LosRejected,
    #[error(
        "unknown preset `{name}`; expected one of opposite-direction-1, \
         opposite-direction-2, right-turn"
    )]
    UnknownPreset { name: String },
    #[error("missing `{key}`: the document names no preset that would supply it")]
    MissingKey { key: &'static str },
    #[error("the document cannot represent {what}")]
    Unrepresentable { what: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

// ---------------------------------------------------------------------------
// Document structure
// ---------------------------------------------------------------------------

/// Array axis in a document (`"x"` or `"y"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisDoc {
    X,
    Y,
}

impl From<AxisDoc> for Axis {
    fn from(axis: AxisDoc) -> Axis {
        match axis {
            AxisDoc::X => Axis::X,
            AxisDoc::Y => Axis::Y,
        }
    }
}

/// Uniform linear array description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayDoc {
    pub count: u32,
    pub spacing_wavelengths: f64,
    pub axis: AxisDoc,
}

/// One terminal's motion and array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalDoc {
    pub v0_mps: f64,
    pub a0_mps2: f64,
    pub heading_rad: f64,
    pub heading_rate_rad_s: f64,
    pub array: ArrayDoc,
}

/// Angular concentrations of the two sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesDoc {
    pub kappa_mt: f64,
    pub kappa_mr: f64,
}

/// Delay-profile, shadowing, and virtual-delay parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDelayDoc {
    pub r_tau: f64,
    pub sigma_tau_s: f64,
    pub shadow_sigma_db: f64,
    pub tau_virtual0_s: f64,
    pub coherence_time_s: f64,
    pub sigma_innov_s: f64,
}

/// One side of a path's cluster geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterDoc {
    pub distance_m: f64,
    pub mean_angle_rad: f64,
}

/// One path's cluster pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterPairDoc {
    pub mt: ClusterDoc,
    pub mr: ClusterDoc,
}

/// A configuration document as written: everything optional, resolved
/// against an optional preset. Unknown keys are rejected at parse time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_freq_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rays_per_path: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_as_amplitude: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mt: Option<TerminalDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mr: Option<TerminalDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<AnglesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_delay: Option<PowerDelayDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<ClusterPairDoc>>,
    /// Accepted by the parser only so it can be rejected with a pointed
    /// message instead of a generic unknown-key error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub los: Option<toml::Value>,
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Built-in scenarios. All three share the 2.48 GHz carrier, unit angular
/// concentration on both sides, and the documented stand-in motion values;
/// they differ in the receiving terminal's speed and heading ramps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioPreset {
    /// Both terminals at constant speed on opposite headings.
    OppositeDirection1,
    /// As above, with the receiving terminal accelerating at 2 m/s².
    OppositeDirection2,
    /// As the first, with the receiving terminal turning at 0.2 rad/s.
    RightTurn,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 3] = [
        ScenarioPreset::OppositeDirection1,
        ScenarioPreset::OppositeDirection2,
        ScenarioPreset::RightTurn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioPreset::OppositeDirection1 => "opposite-direction-1",
            ScenarioPreset::OppositeDirection2 => "opposite-direction-2",
            ScenarioPreset::RightTurn => "right-turn",
        }
    }

    /// The preset as a full document (no `preset` reference, every section
    /// present except the derived sample rate).
    pub fn document(self) -> ConfigDocument {
        let terminal = |a0: f64, heading: f64, b0: f64| TerminalDoc {
            v0_mps: 10.0,
            a0_mps2: a0,
            heading_rad: heading,
            heading_rate_rad_s: b0,
            array: ArrayDoc {
                count: 2,
                spacing_wavelengths: 0.5,
                axis: AxisDoc::X,
            },
        };
        let (mr_a0, mr_b0) = match self {
            ScenarioPreset::OppositeDirection1 => (0.0, 0.0),
            ScenarioPreset::OppositeDirection2 => (2.0, 0.0),
            ScenarioPreset::RightTurn => (0.0, 0.2),
        };
        let cluster_pair = ClusterPairDoc {
            mt: ClusterDoc {
                distance_m: 50.0,
                mean_angle_rad: std::f64::consts::FRAC_PI_4,
            },
            mr: ClusterDoc {
                distance_m: 50.0,
                mean_angle_rad: 3.0 * std::f64::consts::FRAC_PI_4,
            },
        };
        ConfigDocument {
            preset: None,
            carrier_freq_hz: Some(2.48e9),
            sample_rate_hz: None,
            duration_s: Some(2.0),
            rays_per_path: Some(50),
            seed: Some(1),
            power_as_amplitude: Some(true),
            mt: Some(terminal(0.0, 0.0, 0.0)),
            mr: Some(terminal(mr_a0, std::f64::consts::PI, mr_b0)),
            angles: Some(AnglesDoc {
                kappa_mt: 1.0,
                kappa_mr: 1.0,
            }),
            power_delay: Some(PowerDelayDoc {
                r_tau: 2.0,
                sigma_tau_s: 0.3e-6,
                shadow_sigma_db: 3.0,
                tau_virtual0_s: 100e-9,
                coherence_time_s: 5.0,
                sigma_innov_s: 5e-9,
            }),
            clusters: Some(vec![cluster_pair; 5]),
            los: None,
        }
    }
}

impl FromStr for ScenarioPreset {
    type Err = LoadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| LoadError::UnknownPreset { name: s.to_owned() })
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

/// A resolved configuration plus the provenance of every preset-supplied
/// value.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: SimulationConfig,
    /// One line per value group that came from the preset instead of the
    /// document, in document order. Empty when the document is
    /// self-contained.
    pub provenance: Vec<String>,
}

/// Parses a TOML document without resolving it.
pub fn parse_document(text: &str) -> Result<ConfigDocument, LoadError> {
    Ok(toml::from_str(text)?)
}

/// Resolves a document against its preset (if any) into a validated
/// configuration. Sections present in the document replace the preset's
/// wholesale; a section absent from both is a [`LoadError::MissingKey`].
pub fn resolve(document: &ConfigDocument) -> Result<LoadedConfig, LoadError> {
    if document.los.is_some() {
        return Err(LoadError::LosRejected);
    }
    let (base, preset_name) = match &document.preset {
        Some(name) => {
            let preset: ScenarioPreset = name.parse()?;
            (preset.document(), preset.name())
        }
        None => (ConfigDocument::default(), "none"),
    };

    let mut provenance = Vec::new();
    // carrier and concentrations are scenario-given values; everything else
    // a preset supplies is a documented stand-in
    let mut pick =
        |ours: bool, theirs: bool, key: &'static str, note: &str| -> Result<bool, LoadError> {
            if ours {
                Ok(true)
            } else if theirs {
                provenance.push(format!("{key}: {note} from preset {preset_name}"));
                Ok(false)
            } else {
                Err(LoadError::MissingKey { key })
            }
        };

    let carrier_freq_hz = if pick(
        document.carrier_freq_hz.is_some(),
        base.carrier_freq_hz.is_some(),
        "carrier_freq_hz",
        "scenario value",
    )? {
        document.carrier_freq_hz.unwrap()
    } else {
        base.carrier_freq_hz.unwrap()
    };
    let duration_s = if pick(
        document.duration_s.is_some(),
        base.duration_s.is_some(),
        "duration_s",
        "stand-in value",
    )? {
        document.duration_s.unwrap()
    } else {
        base.duration_s.unwrap()
    };
    let rays_per_path = if pick(
        document.rays_per_path.is_some(),
        base.rays_per_path.is_some(),
        "rays_per_path",
        "stand-in value",
    )? {
        document.rays_per_path.unwrap()
    } else {
        base.rays_per_path.unwrap()
    };
    let seed = if pick(
        document.seed.is_some(),
        base.seed.is_some(),
        "seed",
        "stand-in value",
    )? {
        document.seed.unwrap()
    } else {
        base.seed.unwrap()
    };
    let power_as_amplitude = if pick(
        document.power_as_amplitude.is_some(),
        base.power_as_amplitude.is_some(),
        "power_as_amplitude",
        "default composition",
    )? {
        document.power_as_amplitude.unwrap()
    } else {
        base.power_as_amplitude.unwrap()
    };
    let mt = if pick(
        document.mt.is_some(),
        base.mt.is_some(),
        "mt",
        "stand-in motion",
    )? {
        document.mt.clone().unwrap()
    } else {
        base.mt.clone().unwrap()
    };
    let mr = if pick(
        document.mr.is_some(),
        base.mr.is_some(),
        "mr",
        "stand-in motion",
    )? {
        document.mr.clone().unwrap()
    } else {
        base.mr.clone().unwrap()
    };
    let angles = if pick(
        document.angles.is_some(),
        base.angles.is_some(),
        "angles",
        "scenario concentrations",
    )? {
        document.angles.clone().unwrap()
    } else {
        base.angles.clone().unwrap()
    };
    let power_delay = if pick(
        document.power_delay.is_some(),
        base.power_delay.is_some(),
        "power_delay",
        "stand-in parameters",
    )? {
        document.power_delay.clone().unwrap()
    } else {
        base.power_delay.clone().unwrap()
    };
    let clusters = if pick(
        document.clusters.is_some(),
        base.clusters.is_some(),
        "clusters",
        "stand-in geometry",
    )? {
        document.clusters.clone().unwrap()
    } else {
        base.clusters.clone().unwrap()
    };
    // the sample rate has a motion-derived default, so absence is not an error
    let sample_rate_hz = document.sample_rate_hz.or(base.sample_rate_hz);

    let lambda_m = SPEED_OF_LIGHT / carrier_freq_hz;
    let build_terminal = |doc: &TerminalDoc| -> Result<Terminal, LoadError> {
        Ok(Terminal {
            velocity: VelocityProfile::new(
                doc.v0_mps,
                doc.a0_mps2,
                doc.heading_rad,
                doc.heading_rate_rad_s,
            )?,
            array: AntennaArray::ula(
                doc.array.count as usize,
                doc.array.spacing_wavelengths * lambda_m,
                doc.array.axis.into(),
            )?,
        })
    };
    let mut cluster_pairs = Vec::with_capacity(clusters.len());
    for pair in &clusters {
        cluster_pairs.push(PathGeometry {
            mt: ClusterGeometry::new(pair.mt.distance_m, pair.mt.mean_angle_rad)?,
            mr: ClusterGeometry::new(pair.mr.distance_m, pair.mr.mean_angle_rad)?,
        });
    }

    let config = SimulationConfig {
        carrier_freq_hz,
        sample_rate_hz,
        duration_s,
        rays_per_path: rays_per_path as usize,
        seed,
        power_as_amplitude,
        kappa_mt: angles.kappa_mt,
        kappa_mr: angles.kappa_mr,
        mt: build_terminal(&mt)?,
        mr: build_terminal(&mr)?,
        clusters: cluster_pairs,
        power_delay: PowerDelayParams::new(
            power_delay.r_tau,
            power_delay.sigma_tau_s,
            power_delay.shadow_sigma_db,
            power_delay.tau_virtual0_s,
            power_delay.coherence_time_s,
            power_delay.sigma_innov_s,
        )?,
    };
    config.validate()?;
    Ok(LoadedConfig { config, provenance })
}

/// Parses and resolves a document in one step.
pub fn load_config_str(text: &str) -> Result<LoadedConfig, LoadError> {
    resolve(&parse_document(text)?)
}

/// Loads a configuration file.
pub fn load_config_path<P: AsRef<Path>>(path: P) -> Result<LoadedConfig, LoadError> {
    load_config_str(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Serialization back to a document
// ---------------------------------------------------------------------------

/// Re-expresses a configuration as a self-contained document (no preset
/// reference). Only uniform linear arrays along an axis can be represented.
pub fn document_from(config: &SimulationConfig) -> Result<ConfigDocument, LoadError> {
    let lambda_m = config.wavelength_m();
    let array_doc = |array: &AntennaArray| -> Result<ArrayDoc, LoadError> {
        let elements = array.elements();
        let (spacing_m, axis) = match elements.len() {
            1 => (0.0, AxisDoc::X),
            _ => {
                let step = elements[1] - elements[0];
                let axis = if step.y == 0.0 {
                    AxisDoc::X
                } else if step.x == 0.0 {
                    AxisDoc::Y
                } else {
                    return Err(LoadError::Unrepresentable {
                        what: "an antenna array that is not axis-aligned",
                    });
                };
                for pair in elements.windows(2) {
                    if pair[1] - pair[0] != step {
                        return Err(LoadError::Unrepresentable {
                            what: "an antenna array with non-uniform element spacing",
                        });
                    }
                }
                (step.norm(), axis)
            }
        };
        Ok(ArrayDoc {
            count: array.count() as u32,
            spacing_wavelengths: spacing_m / lambda_m,
            axis,
        })
    };
    let terminal_doc = |terminal: &Terminal| -> Result<TerminalDoc, LoadError> {
        Ok(TerminalDoc {
            v0_mps: terminal.velocity.v0,
            a0_mps2: terminal.velocity.a0,
            heading_rad: terminal.velocity.alpha_v,
            heading_rate_rad_s: terminal.velocity.b0,
            array: array_doc(&terminal.array)?,
        })
    };
    Ok(ConfigDocument {
        preset: None,
        carrier_freq_hz: Some(config.carrier_freq_hz),
        sample_rate_hz: config.sample_rate_hz,
        duration_s: Some(config.duration_s),
        rays_per_path: Some(config.rays_per_path as u32),
        seed: Some(config.seed),
        power_as_amplitude: Some(config.power_as_amplitude),
        mt: Some(terminal_doc(&config.mt)?),
        mr: Some(terminal_doc(&config.mr)?),
        angles: Some(AnglesDoc {
            kappa_mt: config.kappa_mt,
            kappa_mr: config.kappa_mr,
        }),
        power_delay: Some(PowerDelayDoc {
            r_tau: config.power_delay.r_tau,
            sigma_tau_s: config.power_delay.sigma_tau_s,
            shadow_sigma_db: config.power_delay.shadow_sigma_db,
            tau_virtual0_s: config.power_delay.tau_virtual0_s,
            coherence_time_s: config.power_delay.coherence_time_s,
            sigma_innov_s: config.power_delay.sigma_innov_s,
        }),
        clusters: Some(
            config
                .clusters
                .iter()
                .map(|pair| ClusterPairDoc {
                    mt: ClusterDoc {
                        distance_m: pair.mt.distance_m(),
                        mean_angle_rad: pair.mt.mean_angle(),
                    },
                    mr: ClusterDoc {
                        distance_m: pair.mr.distance_m(),
                        mean_angle_rad: pair.mr.mean_angle(),
                    },
                })
                .collect(),
        ),
        los: None,
    })
}

/// Serializes a document as TOML text.
pub fn to_toml_string(document: &ConfigDocument) -> Result<String, LoadError> {
    Ok(toml::to_string_pretty(document)?)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_bare_preset_reference_resolves_to_the_full_config() {
        let loaded = load_config_str("preset = \"opposite-direction-1\"").unwrap();
        let config = &loaded.config;
        assert_eq!(config.carrier_freq_hz, 2.48e9);
        assert_eq!(config.rays_per_path, 50);
        assert_eq!(config.clusters.len(), 5);
        assert_eq!(config.mt.velocity.v0, 10.0);
        assert_eq!(config.mr.velocity.alpha_v, std::f64::consts::PI);
        assert_eq!(config.mr.velocity.a0, 0.0);
        assert!(config.power_as_amplitude);
        assert_eq!(config.mt.array.count(), 2);
        // every section came from the preset, so provenance covers them all
        assert_eq!(loaded.provenance.len(), 10);
        assert!(loaded
            .provenance
            .iter()
            .any(|p| p.contains("mt: stand-in motion from preset opposite-direction-1")));
    }

    #[test]
    fn presets_differ_in_the_configured_ramps() {
        let one = load_config_str("preset = \"opposite-direction-1\"")
            .unwrap()
            .config;
        let two = load_config_str("preset = \"opposite-direction-2\"")
            .unwrap()
            .config;
        let turn = load_config_str("preset = \"right-turn\"").unwrap().config;
        assert_eq!(one.mr.velocity.a0, 0.0);
        assert_eq!(two.mr.velocity.a0, 2.0);
        assert_eq!(turn.mr.velocity.a0, 0.0);
        assert_eq!(one.mr.velocity.b0, 0.0);
        assert_eq!(turn.mr.velocity.b0, 0.2);
        for config in [&one, &two, &turn] {
            assert_eq!(config.kappa_mt, 1.0);
            assert_eq!(config.kappa_mr, 1.0);
            assert_eq!(config.carrier_freq_hz, 2.48e9);
        }
    }

    #[test]
    fn document_sections_replace_preset_sections_wholesale() {
        let text = r#"
            preset = "opposite-direction-1"
            seed = 99
            duration_s = 0.5

            [mr]
            v0_mps = 5.0
            a0_mps2 = 0.0
            heading_rad = 1.0
            heading_rate_rad_s = 0.0
            [mr.array]
            count = 4
            spacing_wavelengths = 0.25
            axis = "y"
        "#;
        let loaded = load_config_str(text).unwrap();
        let config = &loaded.config;
        assert_eq!(config.seed, 99);
        assert_eq!(config.duration_s, 0.5);
        assert_eq!(config.mr.velocity.v0, 5.0);
        assert_eq!(config.mr.array.count(), 4);
        // overridden sections leave no provenance entries
        assert!(!loaded.provenance.iter().any(|p| p.starts_with("mr:")));
        assert!(!loaded.provenance.iter().any(|p| p.starts_with("seed:")));
        assert!(loaded.provenance.iter().any(|p| p.starts_with("mt:")));
    }

    #[test]
    fn incomplete_documents_name_the_missing_key() {
        let err = load_config_str("carrier_freq_hz = 2.48e9").unwrap_err();
        assert!(matches!(err, LoadError::MissingKey { key: "duration_s" }));
    }

    #[test]
    fn unknown_keys_and_unknown_presets_are_rejected() {
        let err = load_config_str("preset = \"opposite-direction-1\"\ntypo_key = 1").unwrap_err();
        assert!(matches!(err, LoadError::Parse(_)), "{err}");

        let err = load_config_str("preset = \"head-on\"").unwrap_err();
        assert!(matches!(err, LoadError::UnknownPreset { name } if name == "head-on"));
    }

    #[test]
    fn the_los_flag_is_rejected_with_a_pointed_message() {
        let err = load_config_str("preset = \"right-turn\"\nlos = true").unwrap_err();
        assert!(matches!(err, LoadError::LosRejected));
        assert!(err.to_string().contains("line-of-sight"));
    }

    #[test]
    fn invalid_values_surface_the_violated_invariant() {
        let text = r#"
            preset = "opposite-direction-1"
            [mt]
            v0_mps = -3.0
            a0_mps2 = 0.0
            heading_rad = 0.0
            heading_rate_rad_s = 0.0
            [mt.array]
            count = 2
            spacing_wavelengths = 0.5
            axis = "x"
        "#;
        let err = load_config_str(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("v0") && msg.contains(">= 0"), "{msg}");
    }

    #[test]
    fn resolved_configs_round_trip_through_serialization() {
        for preset in ScenarioPreset::ALL {
            let doc = ConfigDocument {
                preset: Some(preset.name().to_owned()),
                ..ConfigDocument::default()
            };
            let loaded = resolve(&doc).unwrap();
            let text = to_toml_string(&document_from(&loaded.config).unwrap()).unwrap();
            let reloaded = load_config_str(&text).unwrap();
            assert_eq!(reloaded.config, loaded.config, "{preset} round trip");
            // a self-contained document carries no preset provenance
            assert!(reloaded.provenance.is_empty());
        }
    }

    #[test]
    fn preset_names_parse_and_display_consistently() {
        for preset in ScenarioPreset::ALL {
            assert_eq!(preset.name().parse::<ScenarioPreset>().unwrap(), preset);
            assert_eq!(preset.to_string(), preset.name());
        }
        assert!("LEFT-turn".parse::<ScenarioPreset>().is_err());
    }
}
