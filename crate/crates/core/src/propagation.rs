//! Deterministic path-loss and received-power computations.
//!
//! The macrocell follows the empirical Hata-family model used for urban
//! macro links, extended with a mobile-antenna correction, log-normal
//! shadowing and wall penetration. The femtocell follows an indoor
//! slope/wall model. All losses are in dB, powers in dBm, distances in the
//! units noted on each function.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Default quadratic wall coefficient of the indoor model, in dB.
pub const DEFAULT_WALL_COEFF_DB: f64 = 4.4;

/// Default distance slope of the indoor model, in dB per decade.
pub const DEFAULT_FEMTO_SLOPE_DB: f64 = 30.0;

/// Validity range (MHz) of the mobile-antenna correction term.
pub const ANTENNA_CORRECTION_F_MHZ: (f64, f64) = (200.0, 1500.0);

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

fn require_positive(name: &'static str, value: f64) -> Result<f64, PropagationError> {
    if !value.is_finite() {
        return Err(PropagationError::NonFinite { name, value });
    }
    if value <= 0.0 {
        return Err(PropagationError::NonPositive { name, value });
    }
    Ok(value)
}

fn require_non_negative(name: &'static str, value: f64) -> Result<f64, PropagationError> {
    if !value.is_finite() {
        return Err(PropagationError::NonFinite { name, value });
    }
    if value < 0.0 {
        return Err(PropagationError::Negative { name, value });
    }
    Ok(value)
}

fn require_finite(name: &'static str, value: f64) -> Result<f64, PropagationError> {
    if !value.is_finite() {
        return Err(PropagationError::NonFinite { name, value });
    }
    Ok(value)
}

/// Parameters of the macrocell path-loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroPathLossParams {
    /// Carrier frequency in MHz.
    pub f_mhz: f64,
    /// Base-station height in meters.
    pub h_base_m: f64,
    /// Mobile-station height in meters.
    pub h_ms_m: f64,
    /// Shadowing margin or standard deviation in dB (applied additively).
    pub shadow_db: f64,
    /// Wall penetration loss in dB, applied to indoor receivers only.
    pub pen_db: f64,
}

impl MacroPathLossParams {
    pub fn new(
        f_mhz: f64,
        h_base_m: f64,
        h_ms_m: f64,
        shadow_db: f64,
        pen_db: f64,
    ) -> Result<Self, PropagationError> {
        require_positive("f_mhz", f_mhz)?;
        require_positive("h_base_m", h_base_m)?;
        require_positive("h_ms_m", h_ms_m)?;
        require_non_negative("shadow_db", shadow_db)?;
        require_non_negative("pen_db", pen_db)?;
        Ok(Self { f_mhz, h_base_m, h_ms_m, shadow_db, pen_db })
    }
}

/// Parameters of the femtocell (indoor slope/wall) path-loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemtoPathLossParams {
    /// Carrier frequency in MHz.
    pub f_mhz: f64,
    /// Distance slope in dB per decade.
    pub slope_db_per_decade: f64,
    /// Quadratic wall coefficient in dB (4.4 by default).
    pub wall_coeff_db: f64,
}

impl FemtoPathLossParams {
    pub fn new(
        f_mhz: f64,
        slope_db_per_decade: f64,
        wall_coeff_db: f64,
    ) -> Result<Self, PropagationError> {
        require_positive("f_mhz", f_mhz)?;
        require_positive("slope_db_per_decade", slope_db_per_decade)?;
        require_non_negative("wall_coeff_db", wall_coeff_db)?;
        Ok(Self { f_mhz, slope_db_per_decade, wall_coeff_db })
    }
}

/// Planar position in meters. Antenna heights are carried by the model
/// parameters, not the position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x_m: f64,
    pub y_m: f64,
}

impl Position {
    pub fn new(x_m: f64, y_m: f64) -> Result<Self, PropagationError> {
        require_finite("x_m", x_m)?;
        require_finite("y_m", y_m)?;
        Ok(Self { x_m, y_m })
    }

    /// Euclidean distance to `other` in meters.
    pub fn distance_m(&self, other: &Position) -> f64 {
        (self.x_m - other.x_m).hypot(self.y_m - other.y_m)
    }
}

/// A transmit or receive power level, stored in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerLevel {
    dbm: f64,
}

impl PowerLevel {
    pub fn from_dbm(dbm: f64) -> Result<Self, PropagationError> {
        require_finite("dbm", dbm)?;
        Ok(Self { dbm })
    }

    pub fn from_watts(watts: f64) -> Result<Self, PropagationError> {
        require_positive("watts", watts)?;
        Ok(Self { dbm: 10.0 * (watts * 1e3).log10() })
    }

    pub fn from_milliwatts(mw: f64) -> Result<Self, PropagationError> {
        require_positive("milliwatts", mw)?;
        Ok(Self { dbm: 10.0 * mw.log10() })
    }

    pub fn dbm(&self) -> f64 {
        self.dbm
    }

    pub fn watts(&self) -> f64 {
        10f64.powf((self.dbm - 30.0) / 10.0)
    }
}

/// Mobile-antenna correction term in dB.
///
/// Valid for carriers in [`ANTENNA_CORRECTION_F_MHZ`]; outside that range a
/// non-fatal notice is logged (once per process) and the formula is
/// applied anyway.
pub fn antenna_correction(h_ms_m: f64, f_mhz: f64) -> Result<f64, PropagationError> {
    require_positive("h_ms_m", h_ms_m)?;
    require_positive("f_mhz", f_mhz)?;
    let (lo, hi) = ANTENNA_CORRECTION_F_MHZ;
    if f_mhz < lo || f_mhz > hi {
        static NOTICE: std::sync::Once = std::sync::Once::new();
        NOTICE.call_once(|| {
            log::warn!(
                "antenna correction evaluated at {f_mhz} MHz, outside its {lo}-{hi} MHz validity range"
            );
        });
    }
    let t = (11.75 * h_ms_m).log10();
    Ok(10.24 * t * t - 4.97)
}

/// Macrocell path loss in dB at distance `d_km` (kilometers).
///
/// `indoor` adds the wall penetration loss; outdoor receivers see none.
/// The shadowing field of `params` is applied as a fixed additive margin;
/// random shadowing is drawn separately via [`sample_shadowing`].
pub fn macro_path_loss(
    params: &MacroPathLossParams,
    d_km: f64,
    indoor: bool,
) -> Result<f64, PropagationError> {
    require_positive("d_km", d_km)?;
    let a_m = antenna_correction(params.h_ms_m, params.f_mhz)?;
    let log_hb = params.h_base_m.log10();
    let loss = 36.55 + 26.16 * params.f_mhz.log10() - 13.82 * log_hb - a_m
        + (44.9 - 6.55 * log_hb) * d_km.log10()
        + params.shadow_db
        + if indoor { params.pen_db } else { 0.0 };
    Ok(loss)
}

/// Femtocell path loss in dB at distance `d_f_m` (meters) through
/// `n_walls` interior walls.
pub fn femto_path_loss(
    params: &FemtoPathLossParams,
    d_f_m: f64,
    n_walls: u32,
) -> Result<f64, PropagationError> {
    require_positive("d_f_m", d_f_m)?;
    let walls = n_walls as f64;
    Ok(20.0 * params.f_mhz.log10() + params.slope_db_per_decade * d_f_m.log10()
        + params.wall_coeff_db * walls * walls
        - 28.0)
}

/// Received power after `loss_db` of attenuation (dB-domain subtraction).
pub fn received_power(tp: PowerLevel, loss_db: f64) -> Result<PowerLevel, PropagationError> {
    require_finite("loss_db", loss_db)?;
    PowerLevel::from_dbm(tp.dbm() - loss_db)
}

/// Zero-mean normal shadowing draw in dB with standard deviation
/// `shadow_db` (log-normal in the linear domain).
pub fn sample_shadowing<R: Rng + ?Sized>(
    shadow_db: f64,
    rng: &mut R,
) -> Result<f64, PropagationError> {
    require_non_negative("shadow_db", shadow_db)?;
    if shadow_db == 0.0 {
        return Ok(0.0);
    }
    let normal = Normal::new(0.0, shadow_db).expect("validated deviation");
    Ok(normal.sample(rng))
}
