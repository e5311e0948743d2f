//! Large-scale link physics: range/attenuation path loss, Friis received
//! power, and receiver noise power spectral density.
//!
//! Everything here is a pure function over immutable configs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant, W/(K*Hz).
pub const BOLTZMANN_W_PER_K_HZ: f64 = 1.380649e-23;

/// Reference temperature for the noise-figure definition, K.
pub const REFERENCE_NOISE_TEMP_K: f64 = 290.0;

pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Atmospheric state along the links: the three specific-attenuation
/// components (dB/km each) and the mean radiating temperature used as the
/// antenna noise temperature. Conditions are homogeneous across the shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereConfig {
    pub gamma_gases_db_per_km: f64,
    pub gamma_fog_db_per_km: f64,
    pub gamma_precipitation_db_per_km: f64,
    pub mean_radiating_temp_k: f64,
}

impl AtmosphereConfig {
    pub fn new(
        gamma_gases_db_per_km: f64,
        gamma_fog_db_per_km: f64,
        gamma_precipitation_db_per_km: f64,
        mean_radiating_temp_k: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("gamma_gases_db_per_km", gamma_gases_db_per_km),
            ("gamma_fog_db_per_km", gamma_fog_db_per_km),
            ("gamma_precipitation_db_per_km", gamma_precipitation_db_per_km),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "weather.{name} ({v}) must be finite and >= 0"
                )));
            }
        }
        if !(150.0..=400.0).contains(&mean_radiating_temp_k) {
            return Err(Error::Config(format!(
                "weather.t_mr_k ({mean_radiating_temp_k}) must lie in [150, 400] K"
            )));
        }
        Ok(Self {
            gamma_gases_db_per_km,
            gamma_fog_db_per_km,
            gamma_precipitation_db_per_km,
            mean_radiating_temp_k,
        })
    }

    /// Total specific attenuation: gases + fog + precipitation.
    pub fn total_gamma_db_per_km(&self) -> f64 {
        self.gamma_gases_db_per_km + self.gamma_fog_db_per_km + self.gamma_precipitation_db_per_km
    }
}

/// Receiver noise figure relative to the 290 K reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverNoiseConfig {
    pub noise_figure_db: f64,
}

impl ReceiverNoiseConfig {
    pub fn new(noise_figure_db: f64) -> Result<Self> {
        if !noise_figure_db.is_finite() || noise_figure_db < 0.0 {
            return Err(Error::Config(format!(
                "rx_noise.noise_figure_db ({noise_figure_db}) must be finite and >= 0"
            )));
        }
        Ok(Self { noise_figure_db })
    }
}

/// Named clear-weather profiles: total specific attenuation folded into the
/// gases component, fog/precipitation zero, mean radiating temperature
/// 276 K.
pub const WEATHER_PRESETS: &[(&str, f64)] = &[
    ("38.5ghz_clear", 0.15),
    ("60ghz_clear", 14.0),
    ("68ghz_clear", 0.87),
];

pub fn weather_preset(name: &str) -> Option<AtmosphereConfig> {
    WEATHER_PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|&(_, gamma)| AtmosphereConfig {
            gamma_gases_db_per_km: gamma,
            gamma_fog_db_per_km: 0.0,
            gamma_precipitation_db_per_km: 0.0,
            mean_radiating_temp_k: 276.0,
        })
}

/// Linear path loss at range `range_m`: inverse-square spreading times the
/// exponential atmospheric factor `10^(-r*gamma/10)` with `gamma` converted
/// from dB/km to dB/m here, so every interface stays in dB/km.
pub fn path_loss(range_m: f64, gamma_db_per_km: f64) -> Result<f64> {
    if range_m.is_nan() || range_m <= 0.0 {
        return Err(Error::Domain(format!(
            "path_loss: range_m ({range_m}) must be > 0"
        )));
    }
    if gamma_db_per_km.is_nan() || gamma_db_per_km < 0.0 {
        return Err(Error::Domain(format!(
            "path_loss: gamma_db_per_km ({gamma_db_per_km}) must be >= 0"
        )));
    }
    let gamma_db_per_m = gamma_db_per_km / 1000.0;
    Ok(10f64.powf(-range_m * gamma_db_per_m / 10.0) / (range_m * range_m))
}

/// Friis received power `P_tx * G_tx * G_rx * (lambda/4pi)^2 * L`.
pub fn friis_received_power(
    p_tx_w: f64,
    g_tx: f64,
    g_rx: f64,
    wavelength_m: f64,
    loss: f64,
) -> Result<f64> {
    for (name, v) in [
        ("p_tx_w", p_tx_w),
        ("g_tx", g_tx),
        ("g_rx", g_rx),
        ("wavelength_m", wavelength_m),
        ("loss", loss),
    ] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain(format!(
                "friis_received_power: {name} ({v}) must be positive and finite"
            )));
        }
    }
    let aperture = wavelength_m / (4.0 * std::f64::consts::PI);
    Ok(p_tx_w * g_tx * g_rx * aperture * aperture * loss)
}

/// Noise power spectral density `k*(T_mr + 290*(10^(eta/10) - 1))` in W/Hz.
/// The antenna temperature is the atmospheric mean radiating temperature
/// (isotropic sky-noise assumption).
pub fn noise_psd(atmosphere: &AtmosphereConfig, rx: &ReceiverNoiseConfig) -> f64 {
    let receiver_temp_k =
        REFERENCE_NOISE_TEMP_K * (10f64.powf(rx.noise_figure_db / 10.0) - 1.0);
    BOLTZMANN_W_PER_K_HZ * (atmosphere.mean_radiating_temp_k + receiver_temp_k)
}
