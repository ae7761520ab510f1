//! Scenario configuration: a flat `key = value` text format with `#`
//! comments. Unspecified keys take the default two-tier deployment
//! (one 1.5 kW macro station, one 15 mW femto station at the center of a
//! 25 m room 500 m away, 5 indoor subscribers, 8 indoor and 10 outdoor
//! nonsubscribers).

use crate::propagation::Position;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key '{key}': cannot parse '{value}' as a number")]
    BadNumber { line: usize, key: String, value: String },
    #[error("key '{key}': {reason}")]
    Invalid { key: &'static str, reason: String },
}

/// Full parameterization of one deployment scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Carrier frequency in MHz, shared by both tiers.
    pub carrier_mhz: f64,
    /// Macro transmit power in watts.
    pub tp_mbs_w: f64,
    /// Femto transmit power in milliwatts.
    pub tp_fbs_mw: f64,
    pub h_mbs_m: f64,
    pub h_fbs_m: f64,
    pub h_ue_m: f64,
    pub subchannels: u32,
    pub bandwidth_mhz: f64,
    pub n_sub_indoor: usize,
    pub n_non_indoor: usize,
    pub n_non_outdoor: usize,
    pub noise_figure_db: f64,
    pub noise_density_dbm_hz: f64,
    pub shadow_mbs_outdoor_db: f64,
    pub shadow_mbs_indoor_db: f64,
    pub shadow_fbs_outdoor_db: f64,
    pub shadow_fbs_indoor_db: f64,
    /// Fixed free-space margin added to every macro link, in dB.
    pub fspl_margin_mbs_db: f64,
    pub pen_mbs_db: f64,
    pub pen_fbs_db: f64,
    pub distance_mbs_fbs_m: f64,
    /// Linear-domain outage threshold for macro-served UEs, in dB.
    pub sinr_thresh_mbs_db: f64,
    /// Outage threshold for femto/optical-served UEs, in dB.
    pub sinr_thresh_out_db: f64,
    /// Macro transmission range radius in meters.
    pub mbs_range_m: f64,
    /// Side of the square room hosting the femto tier, in meters.
    pub room_size_m: f64,
    /// Closed rate: femto bandwidth fraction reserved for subscribers.
    pub beta: f64,
    /// Data speed limit in bit/s (tariff term).
    pub chi: f64,
    /// Unit price (tariff term).
    pub phi: f64,
    /// Periodic tariff adjustor.
    pub delta_adjustor: f64,
    pub delta_thresh_db: f64,
    pub omega_thresh_db: f64,
    /// Femto path-loss slope in dB per decade.
    pub femto_slope_m: f64,
    /// Voice channels on the femto station.
    pub voice_channels: u32,
    /// Data channels on the optical access point.
    pub data_channels: u32,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            carrier_mhz: 1800.0,
            tp_mbs_w: 1500.0,
            tp_fbs_mw: 15.0,
            h_mbs_m: 75.0,
            h_fbs_m: 3.0,
            h_ue_m: 1.5,
            subchannels: 30,
            bandwidth_mhz: 5.5,
            n_sub_indoor: 5,
            n_non_indoor: 8,
            n_non_outdoor: 10,
            noise_figure_db: 9.0,
            noise_density_dbm_hz: -175.0,
            shadow_mbs_outdoor_db: 6.0,
            shadow_mbs_indoor_db: 8.0,
            shadow_fbs_outdoor_db: 8.0,
            shadow_fbs_indoor_db: 3.0,
            fspl_margin_mbs_db: 10.0,
            pen_mbs_db: 20.0,
            pen_fbs_db: 20.0,
            distance_mbs_fbs_m: 500.0,
            sinr_thresh_mbs_db: 10.0,
            sinr_thresh_out_db: 7.0,
            mbs_range_m: 1500.0,
            room_size_m: 25.0,
            beta: 0.75,
            chi: 1e6,
            phi: 0.1,
            delta_adjustor: 1.0,
            delta_thresh_db: 5.0,
            omega_thresh_db: 5.0,
            femto_slope_m: 30.0,
            voice_channels: 15,
            data_channels: 15,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Parses a flat `key = value` text; unspecified keys keep defaults.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| ConfigError::Malformed { line, text: text.to_string() })?;
            cfg.set(key.trim(), value.trim(), line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn f64_of(key: &str, value: &str, line: usize) -> Result<f64, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadNumber {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        fn int_of<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadNumber {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "carrier_mhz" => self.carrier_mhz = f64_of(key, value, line)?,
            "tp_mbs_w" => self.tp_mbs_w = f64_of(key, value, line)?,
            "tp_fbs_mw" => self.tp_fbs_mw = f64_of(key, value, line)?,
            "h_mbs_m" => self.h_mbs_m = f64_of(key, value, line)?,
            "h_fbs_m" => self.h_fbs_m = f64_of(key, value, line)?,
            "h_ue_m" => self.h_ue_m = f64_of(key, value, line)?,
            "subchannels" => self.subchannels = int_of(key, value, line)?,
            "bandwidth_mhz" => self.bandwidth_mhz = f64_of(key, value, line)?,
            "n_sub_indoor" => self.n_sub_indoor = int_of(key, value, line)?,
            "n_non_indoor" => self.n_non_indoor = int_of(key, value, line)?,
            "n_non_outdoor" => self.n_non_outdoor = int_of(key, value, line)?,
            "noise_figure_db" => self.noise_figure_db = f64_of(key, value, line)?,
            "noise_density_dbm_hz" => self.noise_density_dbm_hz = f64_of(key, value, line)?,
            "shadow_mbs_outdoor_db" => self.shadow_mbs_outdoor_db = f64_of(key, value, line)?,
            "shadow_mbs_indoor_db" => self.shadow_mbs_indoor_db = f64_of(key, value, line)?,
            "shadow_fbs_outdoor_db" => self.shadow_fbs_outdoor_db = f64_of(key, value, line)?,
            "shadow_fbs_indoor_db" => self.shadow_fbs_indoor_db = f64_of(key, value, line)?,
            "fspl_margin_mbs_db" => self.fspl_margin_mbs_db = f64_of(key, value, line)?,
            "pen_mbs_db" => self.pen_mbs_db = f64_of(key, value, line)?,
            "pen_fbs_db" => self.pen_fbs_db = f64_of(key, value, line)?,
            "distance_mbs_fbs_m" => self.distance_mbs_fbs_m = f64_of(key, value, line)?,
            "sinr_thresh_mbs_db" => self.sinr_thresh_mbs_db = f64_of(key, value, line)?,
            "sinr_thresh_out_db" => self.sinr_thresh_out_db = f64_of(key, value, line)?,
            "mbs_range_m" => self.mbs_range_m = f64_of(key, value, line)?,
            "room_size_m" => self.room_size_m = f64_of(key, value, line)?,
            "beta" => self.beta = f64_of(key, value, line)?,
            "chi" => self.chi = f64_of(key, value, line)?,
            "phi" => self.phi = f64_of(key, value, line)?,
            "delta_adjustor" => self.delta_adjustor = f64_of(key, value, line)?,
            "delta_thresh_db" => self.delta_thresh_db = f64_of(key, value, line)?,
            "omega_thresh_db" => self.omega_thresh_db = f64_of(key, value, line)?,
            "femto_slope_m" => self.femto_slope_m = f64_of(key, value, line)?,
            "voice_channels" => self.voice_channels = int_of(key, value, line)?,
            "data_channels" => self.data_channels = int_of(key, value, line)?,
            "seed" => self.seed = int_of(key, value, line)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
        }
        Ok(())
    }

    /// Checks every physical invariant; called by [`Self::parse`] and
    /// available to callers that mutate a config programmatically.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid { key, reason: format!("must be > 0, got {v}") })
            }
        }
        fn non_negative(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::Invalid { key, reason: format!("must be >= 0, got {v}") })
            }
        }
        positive("carrier_mhz", self.carrier_mhz)?;
        positive("tp_mbs_w", self.tp_mbs_w)?;
        positive("tp_fbs_mw", self.tp_fbs_mw)?;
        positive("h_mbs_m", self.h_mbs_m)?;
        positive("h_fbs_m", self.h_fbs_m)?;
        positive("h_ue_m", self.h_ue_m)?;
        positive("bandwidth_mhz", self.bandwidth_mhz)?;
        positive("distance_mbs_fbs_m", self.distance_mbs_fbs_m)?;
        positive("mbs_range_m", self.mbs_range_m)?;
        positive("room_size_m", self.room_size_m)?;
        positive("femto_slope_m", self.femto_slope_m)?;
        positive("delta_adjustor", self.delta_adjustor)?;
        positive("sinr_thresh_mbs_db", self.sinr_thresh_mbs_db)?;
        positive("sinr_thresh_out_db", self.sinr_thresh_out_db)?;
        non_negative("noise_figure_db", self.noise_figure_db)?;
        non_negative("shadow_mbs_outdoor_db", self.shadow_mbs_outdoor_db)?;
        non_negative("shadow_mbs_indoor_db", self.shadow_mbs_indoor_db)?;
        non_negative("shadow_fbs_outdoor_db", self.shadow_fbs_outdoor_db)?;
        non_negative("shadow_fbs_indoor_db", self.shadow_fbs_indoor_db)?;
        non_negative("fspl_margin_mbs_db", self.fspl_margin_mbs_db)?;
        non_negative("pen_mbs_db", self.pen_mbs_db)?;
        non_negative("pen_fbs_db", self.pen_fbs_db)?;
        non_negative("chi", self.chi)?;
        non_negative("phi", self.phi)?;
        non_negative("delta_thresh_db", self.delta_thresh_db)?;
        non_negative("omega_thresh_db", self.omega_thresh_db)?;
        if !self.noise_density_dbm_hz.is_finite() {
            return Err(ConfigError::Invalid {
                key: "noise_density_dbm_hz",
                reason: format!("must be finite, got {}", self.noise_density_dbm_hz),
            });
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(ConfigError::Invalid {
                key: "beta",
                reason: format!("must be in [0, 1], got {}", self.beta),
            });
        }
        if self.subchannels == 0 {
            return Err(ConfigError::Invalid { key: "subchannels", reason: "must be >= 1".into() });
        }
        if self.voice_channels + self.data_channels == 0 {
            return Err(ConfigError::Invalid {
                key: "voice_channels",
                reason: "voice_channels + data_channels must be >= 1".into(),
            });
        }
        if self.room_size_m >= self.mbs_range_m {
            return Err(ConfigError::Invalid {
                key: "room_size_m",
                reason: "room must be smaller than the macro range".into(),
            });
        }
        Ok(())
    }

    /// Macro station position (the coordinate origin).
    pub fn mbs_position(&self) -> Position {
        Position { x_m: 0.0, y_m: 0.0 }
    }

    /// Femto station position: the center of the room.
    pub fn fbs_position(&self) -> Position {
        Position { x_m: self.distance_mbs_fbs_m, y_m: 0.0 }
    }

    /// Room rectangle as (min_x, min_y, max_x, max_y).
    pub fn room_bounds(&self) -> (f64, f64, f64, f64) {
        let half = self.room_size_m / 2.0;
        let c = self.fbs_position();
        (c.x_m - half, c.y_m - half, c.x_m + half, c.y_m + half)
    }

    pub fn in_room(&self, pos: &Position) -> bool {
        let (x0, y0, x1, y1) = self.room_bounds();
        pos.x_m >= x0 && pos.x_m <= x1 && pos.y_m >= y0 && pos.y_m <= y1
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_mhz * 1e6
    }

    pub fn tp_fbs_w(&self) -> f64 {
        self.tp_fbs_mw * 1e-3
    }

    pub fn tp_mbs_dbm(&self) -> f64 {
        10.0 * (self.tp_mbs_w * 1e3).log10()
    }

    pub fn tp_fbs_dbm(&self) -> f64 {
        10.0 * self.tp_fbs_mw.log10()
    }

    /// Thermal noise power over the system bandwidth, noise figure
    /// included, in watts.
    pub fn noise_power_w(&self) -> f64 {
        let dbm = self.noise_density_dbm_hz + 10.0 * self.bandwidth_hz().log10() + self.noise_figure_db;
        10f64.powf((dbm - 30.0) / 10.0)
    }

    /// Linear outage threshold for macro-served UEs.
    pub fn varpi_mbs(&self) -> f64 {
        10f64.powf(self.sinr_thresh_mbs_db / 10.0)
    }

    /// Linear outage threshold for femto/optical-served UEs.
    pub fn varpi_out(&self) -> f64 {
        10f64.powf(self.sinr_thresh_out_db / 10.0)
    }

    pub fn total_nonsubscribers(&self) -> usize {
        self.n_non_indoor + self.n_non_outdoor
    }
}
