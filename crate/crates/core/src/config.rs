//! Scenario configuration: the TOML file format, named weather presets,
//! `key=value` overrides, validation, and the normalized echo used by run
//! manifests.
//!
//! Every field has a default, so an empty file is a complete scenario (the
//! published simulation parameters: 1000 trials, 10 W, 2 GHz bandwidth,
//! shell 0..1 km with a 30 degree half-angle, the 60 GHz clear-weather
//! preset, a 2x2 UE array and 4x4 AP subarrays of patch radiators).
//! Unknown keys are rejected. Interfaces use km and degrees; everything
//! internal is meters and radians.

use serde::{Deserialize, Serialize};

use crate::antenna::{PatternKind, PlanarArrayGeometry};
use crate::error::{Error, Result};
use crate::geometry::{ShellGeometry, YawMode};
use crate::propagation::{
    weather_preset, AtmosphereConfig, ReceiverNoiseConfig, SPEED_OF_LIGHT_M_PER_S,
};
use crate::receiver::CombinerKind;

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub p_tx_watts: f64,
    pub n_trials: usize,
    pub n_ue_sweep: Vec<usize>,
    pub master_seed: u64,
    pub combiners: Vec<CombinerKind>,
    pub element_pattern: PatternKind,
    pub yaw: YawMode,
    pub shell: ShellGeometry,
    pub atmosphere: AtmosphereConfig,
    pub rx_noise: ReceiverNoiseConfig,
    pub ue_array: PlanarArrayGeometry,
    pub ap_subarray: PlanarArrayGeometry,
    pub quadrature: (usize, usize),
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        RawConfig::default()
            .validate()
            .expect("built-in defaults are valid")
    }
}

impl ScenarioConfig {
    pub fn carrier_wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_PER_S / self.carrier_hz
    }

    /// Parses a scenario from TOML text. A run manifest (a document with
    /// `[run]` and `[config]` tables) is accepted too: its embedded config
    /// is extracted, which is what makes a manifest re-runnable as-is.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_str_with_overrides(text, &[])
    }

    /// Parses a scenario, then applies dotted-path `key=value` overrides
    /// (e.g. `shell.r_max_km=2.5`, `n_trials=10`) before validation.
    pub fn from_toml_str_with_overrides(
        text: &str,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("TOML syntax: {e}")))?;
        if let (Some(toml::Value::Table(cfg)), true) =
            (table.get("config").cloned(), table.contains_key("run"))
        {
            table = cfg;
        }
        for (key, value) in overrides {
            set_dotted(&mut table, key, value)?;
        }
        let raw: RawConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Config(format!("{e}")))?;
        raw.validate()
    }

    /// Canonical TOML echo: presets expanded, every field explicit, fixed
    /// key order. `parse(serialize(cfg))` reproduces `cfg` exactly.
    pub fn to_normalized_toml(&self) -> String {
        let raw = RawConfig::from_validated(self);
        toml::to_string(&raw).expect("config serialization cannot fail")
    }

    /// FNV-1a hash of the normalized echo; identifies the scenario in error
    /// contexts and the run manifest.
    pub fn digest(&self) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in self.to_normalized_toml().bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        hash
    }
}

/// Inserts `value` (parsed as a TOML literal, falling back to a bare
/// string) at a dotted path, creating intermediate tables as needed.
fn set_dotted(table: &mut toml::Table, path: &str, value: &str) -> Result<()> {
    if path.is_empty() {
        return Err(Error::Config("override key must not be empty".into()));
    }
    let parsed: toml::Value = match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed override has key v"),
        Err(_) => toml::Value::String(value.to_string()),
    };
    let mut parts = path.split('.').peekable();
    let mut current = table;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            current.insert(part.to_string(), parsed);
            return Ok(());
        }
        let entry = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        current = entry.as_table_mut().ok_or_else(|| {
            Error::Config(format!(
                "override {path}: component '{part}' is not a table"
            ))
        })?;
    }
    unreachable!("split yields at least one part")
}

// Raw serde-facing layer. Scalar fields come before the table-valued ones
// so the TOML serializer never emits a value after a table.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    carrier_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_tx_watts: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_ue_sweep: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combiners: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    element_pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    yaw: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shell: Option<RawShell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weather: Option<RawWeather>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rx_noise: Option<RawRxNoise>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ue_array: Option<RawArray>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ap_subarray: Option<RawArray>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature: Option<RawQuadrature>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShell {
    #[serde(skip_serializing_if = "Option::is_none")]
    r_min_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_max_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_max_deg: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeather {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_gases_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_fog_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_precipitation_db_per_km: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_mr_k: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRxNoise {
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_figure_db: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArray {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_x: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_y: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_theta: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_phi: Option<u64>,
}

const DEFAULT_SWEEP: [usize; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

impl RawConfig {
    fn validate(self) -> Result<ScenarioConfig> {
        let carrier_hz = self.carrier_hz.unwrap_or(60e9);
        if !carrier_hz.is_finite() || carrier_hz <= 0.0 {
            return Err(Error::Config(format!(
                "carrier_hz ({carrier_hz}) must be positive and finite"
            )));
        }
        let bandwidth_hz = self.bandwidth_hz.unwrap_or(2e9);
        if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
            return Err(Error::Config(format!(
                "bandwidth_hz ({bandwidth_hz}) must be positive and finite"
            )));
        }
        let p_tx_watts = self.p_tx_watts.unwrap_or(10.0);
        if !p_tx_watts.is_finite() || p_tx_watts <= 0.0 {
            return Err(Error::Config(format!(
                "p_tx_watts ({p_tx_watts}) must be positive and finite"
            )));
        }
        let n_trials = self.n_trials.unwrap_or(1000);
        if n_trials < 1 {
            return Err(Error::Config("n_trials must be >= 1".into()));
        }
        let sweep_raw = self
            .n_ue_sweep
            .unwrap_or_else(|| DEFAULT_SWEEP.iter().map(|&n| n as i64).collect());
        if sweep_raw.is_empty() {
            return Err(Error::Config("n_ue_sweep must not be empty".into()));
        }
        let mut n_ue_sweep = Vec::with_capacity(sweep_raw.len());
        for v in &sweep_raw {
            if *v < 1 {
                return Err(Error::Config(format!(
                    "n_ue_sweep entries must be >= 1 (got {v})"
                )));
            }
            let v = *v as usize;
            if n_ue_sweep.contains(&v) {
                return Err(Error::Config(format!(
                    "n_ue_sweep must not repeat a user count ({v} appears twice)"
                )));
            }
            n_ue_sweep.push(v);
        }
        let master_seed = self.master_seed.unwrap_or(0);
        let combiner_names = self
            .combiners
            .unwrap_or_else(|| vec!["mmse".into(), "identity".into()]);
        if combiner_names.is_empty() {
            return Err(Error::Config("combiners must not be empty".into()));
        }
        let mut combiners = Vec::with_capacity(combiner_names.len());
        for name in &combiner_names {
            let kind = match name.as_str() {
                "mmse" => CombinerKind::Mmse,
                "identity" => CombinerKind::Identity,
                other => {
                    return Err(Error::Config(format!(
                        "combiners entry '{other}' must be 'mmse' or 'identity'"
                    )))
                }
            };
            if combiners.contains(&kind) {
                return Err(Error::Config(format!(
                    "combiners lists '{name}' more than once"
                )));
            }
            combiners.push(kind);
        }
        let element_pattern = match self
            .element_pattern
            .as_deref()
            .unwrap_or("patch-two-slot")
        {
            "isotropic" => PatternKind::Isotropic,
            "hemispheric-cosine" => PatternKind::HemisphericCosine,
            "patch-two-slot" => PatternKind::PatchTwoSlot,
            other => {
                return Err(Error::Config(format!(
                    "element_pattern '{other}' must be one of isotropic, \
                     hemispheric-cosine, patch-two-slot"
                )))
            }
        };
        let yaw = match self.yaw.as_deref().unwrap_or("zero") {
            "zero" => YawMode::Zero,
            "random" => YawMode::Random,
            other => {
                return Err(Error::Config(format!(
                    "yaw '{other}' must be 'zero' or 'random'"
                )))
            }
        };
        let shell_raw = self.shell.unwrap_or_default();
        let shell = ShellGeometry::new(
            shell_raw.r_min_km.unwrap_or(0.0) * 1000.0,
            shell_raw.r_max_km.unwrap_or(1.0) * 1000.0,
            shell_raw.theta_max_deg.unwrap_or(30.0).to_radians(),
        )?;
        let atmosphere = validate_weather(self.weather.unwrap_or_default())?;
        let rx_noise =
            ReceiverNoiseConfig::new(self.rx_noise.unwrap_or_default().noise_figure_db.unwrap_or(7.1))?;
        let ue_raw = self.ue_array.unwrap_or_default();
        let ue_array = PlanarArrayGeometry::new(
            ue_raw.n_x.unwrap_or(2) as usize,
            ue_raw.n_y.unwrap_or(2) as usize,
        )?;
        let ap_raw = self.ap_subarray.unwrap_or_default();
        let ap_subarray = PlanarArrayGeometry::new(
            ap_raw.n_x.unwrap_or(4) as usize,
            ap_raw.n_y.unwrap_or(4) as usize,
        )?;
        let quad_raw = self.quadrature.unwrap_or_default();
        let quadrature = (
            quad_raw.n_theta.unwrap_or(180) as usize,
            quad_raw.n_phi.unwrap_or(360) as usize,
        );
        crate::antenna::SphereQuadrature::new(quadrature.0, quadrature.1)?;
        Ok(ScenarioConfig {
            carrier_hz,
            bandwidth_hz,
            p_tx_watts,
            n_trials: n_trials as usize,
            n_ue_sweep,
            master_seed,
            combiners,
            element_pattern,
            yaw,
            shell,
            atmosphere,
            rx_noise,
            ue_array,
            ap_subarray,
            quadrature,
        })
    }

    fn from_validated(cfg: &ScenarioConfig) -> Self {
        RawConfig {
            carrier_hz: Some(cfg.carrier_hz),
            bandwidth_hz: Some(cfg.bandwidth_hz),
            p_tx_watts: Some(cfg.p_tx_watts),
            n_trials: Some(cfg.n_trials as u64),
            n_ue_sweep: Some(cfg.n_ue_sweep.iter().map(|&n| n as i64).collect()),
            master_seed: Some(cfg.master_seed),
            combiners: Some(
                cfg.combiners
                    .iter()
                    .map(|c| c.as_str().to_string())
                    .collect(),
            ),
            element_pattern: Some(cfg.element_pattern.as_str().to_string()),
            yaw: Some(cfg.yaw.as_str().to_string()),
            shell: Some(RawShell {
                r_min_km: Some(cfg.shell.r_min_m() / 1000.0),
                r_max_km: Some(cfg.shell.r_max_m() / 1000.0),
                theta_max_deg: Some(cfg.shell.theta_max_rad().to_degrees()),
            }),
            weather: Some(RawWeather {
                preset: None,
                gamma_gases_db_per_km: Some(cfg.atmosphere.gamma_gases_db_per_km),
                gamma_fog_db_per_km: Some(cfg.atmosphere.gamma_fog_db_per_km),
                gamma_precipitation_db_per_km: Some(
                    cfg.atmosphere.gamma_precipitation_db_per_km,
                ),
                t_mr_k: Some(cfg.atmosphere.mean_radiating_temp_k),
            }),
            rx_noise: Some(RawRxNoise {
                noise_figure_db: Some(cfg.rx_noise.noise_figure_db),
            }),
            ue_array: Some(RawArray {
                n_x: Some(cfg.ue_array.n_x() as u64),
                n_y: Some(cfg.ue_array.n_y() as u64),
            }),
            ap_subarray: Some(RawArray {
                n_x: Some(cfg.ap_subarray.n_x() as u64),
                n_y: Some(cfg.ap_subarray.n_y() as u64),
            }),
            quadrature: Some(RawQuadrature {
                n_theta: Some(cfg.quadrature.0 as u64),
                n_phi: Some(cfg.quadrature.1 as u64),
            }),
        }
    }
}

fn validate_weather(raw: RawWeather) -> Result<AtmosphereConfig> {
    if let Some(name) = &raw.preset {
        let explicit: [(&str, bool); 4] = [
            ("gamma_gases_db_per_km", raw.gamma_gases_db_per_km.is_some()),
            ("gamma_fog_db_per_km", raw.gamma_fog_db_per_km.is_some()),
            (
                "gamma_precipitation_db_per_km",
                raw.gamma_precipitation_db_per_km.is_some(),
            ),
            ("t_mr_k", raw.t_mr_k.is_some()),
        ];
        if let Some((key, _)) = explicit.iter().find(|(_, set)| *set) {
            return Err(Error::Config(format!(
                "weather.preset and weather.{key} are mutually exclusive"
            )));
        }
        return weather_preset(name).ok_or_else(|| {
            Error::Config(format!(
                "weather.preset '{name}' is unknown; available: {}",
                crate::propagation::WEATHER_PRESETS
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        });
    }
    AtmosphereConfig::new(
        raw.gamma_gases_db_per_km.unwrap_or(14.0),
        raw.gamma_fog_db_per_km.unwrap_or(0.0),
        raw.gamma_precipitation_db_per_km.unwrap_or(0.0),
        raw.t_mr_k.unwrap_or(276.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_config_is_the_published_table() {
        let cfg = ScenarioConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.n_trials, 1000);
        assert_relative_eq!(cfg.p_tx_watts, 10.0);
        assert_relative_eq!(cfg.bandwidth_hz, 2e9);
        assert_relative_eq!(cfg.carrier_hz, 60e9);
        assert_relative_eq!(cfg.shell.r_min_m(), 0.0);
        assert_relative_eq!(cfg.shell.r_max_m(), 1000.0);
        assert_relative_eq!(cfg.shell.theta_max_rad(), 30f64.to_radians());
        assert_relative_eq!(cfg.atmosphere.total_gamma_db_per_km(), 14.0);
        assert_relative_eq!(cfg.atmosphere.mean_radiating_temp_k, 276.0);
        assert_eq!((cfg.ue_array.n_x(), cfg.ue_array.n_y()), (2, 2));
        assert_eq!((cfg.ap_subarray.n_x(), cfg.ap_subarray.n_y()), (4, 4));
        assert_eq!(cfg.n_ue_sweep, vec![1, 2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(cfg.element_pattern, PatternKind::PatchTwoSlot);
        assert_eq!(cfg.yaw, YawMode::Zero);
        assert_eq!(
            cfg.combiners,
            vec![CombinerKind::Mmse, CombinerKind::Identity]
        );
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn inverted_shell_names_the_bound() {
        let err = ScenarioConfig::from_toml_str(
            "[shell]\nr_min_km = 2.0\nr_max_km = 1.0\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("r_min_km"), "{msg}");
        assert!(msg.contains("r_max_km"), "{msg}");
    }

    #[test]
    fn presets_resolve() {
        let cfg =
            ScenarioConfig::from_toml_str("[weather]\npreset = \"60ghz_clear\"\n").unwrap();
        assert_relative_eq!(cfg.atmosphere.total_gamma_db_per_km(), 14.0);
        assert_relative_eq!(cfg.atmosphere.mean_radiating_temp_k, 276.0);
        assert!(ScenarioConfig::from_toml_str("[weather]\npreset = \"nope\"\n").is_err());
        let err = ScenarioConfig::from_toml_str(
            "[weather]\npreset = \"60ghz_clear\"\nt_mr_k = 280.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml_str("frobnicate = 3\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[shell]\nradius = 3\n").is_err());
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let overrides = vec![
            ("n_trials".to_string(), "10".to_string()),
            ("shell.r_max_km".to_string(), "2.5".to_string()),
            ("weather.preset".to_string(), "68ghz_clear".to_string()),
            ("combiners".to_string(), "[\"mmse\"]".to_string()),
        ];
        let cfg = ScenarioConfig::from_toml_str_with_overrides("", &overrides).unwrap();
        assert_eq!(cfg.n_trials, 10);
        assert_relative_eq!(cfg.shell.r_max_m(), 2500.0);
        assert_relative_eq!(cfg.atmosphere.total_gamma_db_per_km(), 0.87);
        assert_eq!(cfg.combiners, vec![CombinerKind::Mmse]);
    }

    #[test]
    fn override_beats_file_value() {
        let cfg = ScenarioConfig::from_toml_str_with_overrides(
            "n_trials = 50\n",
            &[("n_trials".to_string(), "7".to_string())],
        )
        .unwrap();
        assert_eq!(cfg.n_trials, 7);
    }

    #[test]
    fn duplicate_sweep_entries_are_rejected() {
        assert!(ScenarioConfig::from_toml_str("n_ue_sweep = [1, 2, 2]\n").is_err());
        assert!(ScenarioConfig::from_toml_str("n_ue_sweep = [0]\n").is_err());
        assert!(ScenarioConfig::from_toml_str("n_ue_sweep = []\n").is_err());
    }

    #[test]
    fn normalized_form_is_idempotent() {
        let cfg = ScenarioConfig::from_toml_str(
            "[weather]\npreset = \"38.5ghz_clear\"\n[shell]\ntheta_max_deg = 20.0\n",
        )
        .unwrap();
        let once = cfg.to_normalized_toml();
        let reparsed = ScenarioConfig::from_toml_str(&once).unwrap();
        assert_eq!(reparsed, cfg);
        assert_eq!(reparsed.to_normalized_toml(), once);
    }

    #[test]
    fn manifest_documents_round_trip() {
        let cfg = ScenarioConfig::from_toml_str("master_seed = 42\n").unwrap();
        let manifest = crate::report::render_manifest(&cfg, "0.0.0-test", Some(4), 1.5);
        let back = ScenarioConfig::from_toml_str(&manifest).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn digest_tracks_content() {
        let a = ScenarioConfig::from_toml_str("").unwrap();
        let b = ScenarioConfig::from_toml_str("master_seed = 1\n").unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), ScenarioConfig::from_toml_str("").unwrap().digest());
    }
}
