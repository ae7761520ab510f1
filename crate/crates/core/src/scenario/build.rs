//! Per-trial link budgets and assembly of the cell-selection game.
//!
//! One trial places the UEs, draws shadowing per link, classifies
//! nonsubscribers into players (femto signal dominant) and macro-served
//! users, derives the worst-case gain pair and the gated slot count, and
//! returns a fully populated game spec next to the per-UE link data.

use super::config::ScenarioConfig;
use super::placement::{place_ues, UePlacement};
use super::ScenarioError;
use crate::game::{classify_ue, AccessGameSpec, PlayerPopulation, PricingSpec, UeClass};
use crate::propagation::{
    femto_path_loss, macro_path_loss, received_power, sample_shadowing, FemtoPathLossParams,
    MacroPathLossParams, Position, PowerLevel,
};
use rand::Rng;

/// Shortest link distance used in loss evaluations, in meters. Grid cells
/// or UEs landing exactly on a transmitter would otherwise push the
/// log-distance models out of their domain.
pub const MIN_LINK_DISTANCE_M: f64 = 0.1;

/// Role of a UE in the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeKind {
    Subscriber,
    IndoorNonsub,
    OutdoorNonsub,
}

/// One UE's position and link budget for a single trial.
#[derive(Debug, Clone)]
pub struct UeLink {
    pub kind: UeKind,
    pub pos: Position,
    pub indoor: bool,
    /// Macro link loss in dB, shadowing, penetration and margin included.
    pub macro_loss_db: f64,
    /// Femto link loss in dB, shadowing and wall penetration included.
    pub femto_loss_db: f64,
    pub rp_mbs_dbm: f64,
    pub rp_fbs_dbm: f64,
    /// Linear macro channel gain.
    pub gain_mbs: f64,
    /// Linear femto channel gain.
    pub gain_fbs: f64,
    /// Reference-power class; subscribers are femto-served regardless.
    pub class: UeClass,
}

/// A fully assembled trial: the game plus everything needed to score it.
#[derive(Debug, Clone)]
pub struct TrialScenario {
    pub links: Vec<UeLink>,
    pub game: AccessGameSpec,
    /// Indices into `links` of the game players, in link order.
    pub players: Vec<usize>,
    /// True when no nonsubscriber qualifies as a player.
    pub degenerate: bool,
}

impl TrialScenario {
    /// Femto transmit power during its usable slots, in watts: zero only
    /// when every macro-served user gates the femtocell.
    pub fn fbs_transmit_power_w(&self) -> f64 {
        let max_served = self.game.population.p_non + self.game.population.p_players;
        if max_served > 0 && self.game.gated_slots >= max_served {
            0.0
        } else {
            self.game.tp_max_fbs_w
        }
    }
}

fn macro_params(cfg: &ScenarioConfig, fixed_shadow_db: f64) -> MacroPathLossParams {
    MacroPathLossParams {
        f_mhz: cfg.carrier_mhz,
        h_base_m: cfg.h_mbs_m,
        h_ms_m: cfg.h_ue_m,
        shadow_db: fixed_shadow_db,
        pen_db: cfg.pen_mbs_db,
    }
}

fn femto_params(cfg: &ScenarioConfig) -> FemtoPathLossParams {
    FemtoPathLossParams {
        f_mhz: cfg.carrier_mhz,
        slope_db_per_decade: cfg.femto_slope_m,
        wall_coeff_db: crate::propagation::DEFAULT_WALL_COEFF_DB,
    }
}

/// Macro link loss for a receiver at `pos`: distance term, antenna
/// correction, the fixed free-space margin, penetration when indoor, and
/// `shadow_db` as an additive term (margin or draw).
pub fn macro_link_loss_db(
    cfg: &ScenarioConfig,
    pos: &Position,
    indoor: bool,
    shadow_db: f64,
) -> Result<f64, ScenarioError> {
    let d_km = (cfg.mbs_position().distance_m(pos).max(MIN_LINK_DISTANCE_M)) / 1e3;
    let params = macro_params(cfg, 0.0);
    let base = macro_path_loss(&params, d_km, indoor)?;
    Ok(base + shadow_db + cfg.fspl_margin_mbs_db)
}

/// Femto link loss for a receiver at `pos`. Inside the room the link is
/// wall-free; a receiver outside it pays the configured femto wall
/// penetration once for the room boundary. `shadow_db` is additive.
pub fn femto_link_loss_db(
    cfg: &ScenarioConfig,
    pos: &Position,
    indoor: bool,
    shadow_db: f64,
) -> Result<f64, ScenarioError> {
    let d_f = cfg.fbs_position().distance_m(pos).max(MIN_LINK_DISTANCE_M);
    let base = femto_path_loss(&femto_params(cfg), d_f, 0)?;
    let pen = if indoor { 0.0 } else { cfg.pen_fbs_db };
    Ok(base + shadow_db + pen)
}

fn build_link<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    kind: UeKind,
    pos: Position,
    rng: &mut R,
) -> Result<UeLink, ScenarioError> {
    let indoor = cfg.in_room(&pos);
    let (shadow_m, shadow_f) = if indoor {
        (cfg.shadow_mbs_indoor_db, cfg.shadow_fbs_indoor_db)
    } else {
        (cfg.shadow_mbs_outdoor_db, cfg.shadow_fbs_outdoor_db)
    };
    let macro_shadow = sample_shadowing(shadow_m, rng)?;
    let femto_shadow = sample_shadowing(shadow_f, rng)?;
    let macro_loss_db = macro_link_loss_db(cfg, &pos, indoor, macro_shadow)?;
    let femto_loss_db = femto_link_loss_db(cfg, &pos, indoor, femto_shadow)?;

    let tp_mbs = PowerLevel::from_watts(cfg.tp_mbs_w)?;
    let tp_fbs = PowerLevel::from_milliwatts(cfg.tp_fbs_mw)?;
    let rp_mbs = received_power(tp_mbs, macro_loss_db)?;
    let rp_fbs = received_power(tp_fbs, femto_loss_db)?;
    Ok(UeLink {
        kind,
        pos,
        indoor,
        macro_loss_db,
        femto_loss_db,
        rp_mbs_dbm: rp_mbs.dbm(),
        rp_fbs_dbm: rp_fbs.dbm(),
        gain_mbs: 10f64.powf(-macro_loss_db / 10.0),
        gain_fbs: 10f64.powf(-femto_loss_db / 10.0),
        class: classify_ue(rp_fbs, rp_mbs),
    })
}

fn interference_gate_passes(cfg: &ScenarioConfig, link: &UeLink) -> bool {
    link.rp_mbs_dbm >= link.rp_fbs_dbm + cfg.delta_thresh_db + cfg.omega_thresh_db
}

/// Places UEs, computes link budgets with fresh shadowing draws, and
/// assembles the game spec for one trial.
///
/// The worst-case gain pair comes from the femto-served candidate set
/// (subscribers plus players) member with the lowest macro SINR; gated
/// slots count every macro-servable user at which the interference gate
/// forbids femto transmission.
pub fn build_game<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<TrialScenario, ScenarioError> {
    let placement: UePlacement = place_ues(cfg, rng);
    let mut links = Vec::with_capacity(
        cfg.n_sub_indoor + cfg.n_non_indoor + cfg.n_non_outdoor,
    );
    for pos in placement.subscribers {
        links.push(build_link(cfg, UeKind::Subscriber, pos, rng)?);
    }
    for pos in placement.indoor_non {
        links.push(build_link(cfg, UeKind::IndoorNonsub, pos, rng)?);
    }
    for pos in placement.outdoor_non {
        links.push(build_link(cfg, UeKind::OutdoorNonsub, pos, rng)?);
    }

    let players: Vec<usize> = links
        .iter()
        .enumerate()
        .filter(|(_, l)| l.kind != UeKind::Subscriber && l.class == UeClass::D)
        .map(|(i, _)| i)
        .collect();
    let p_players = players.len();
    let p_non = links
        .iter()
        .filter(|l| l.kind != UeKind::Subscriber && l.class == UeClass::DStar)
        .count();

    let noise_w = cfg.noise_power_w();
    let tp_fbs_w = cfg.tp_fbs_w();

    // Worst femto-served candidate: subscribers and players, falling back
    // to all indoor UEs, then all UEs, for pathological populations.
    let macro_sinr_of = |l: &UeLink| {
        cfg.tp_mbs_w * l.gain_mbs / (noise_w + tp_fbs_w * l.gain_fbs)
    };
    let candidates: Vec<&UeLink> = {
        let femto_served: Vec<&UeLink> = links
            .iter()
            .enumerate()
            .filter(|(i, l)| l.kind == UeKind::Subscriber || players.contains(i))
            .map(|(_, l)| l)
            .collect();
        if !femto_served.is_empty() {
            femto_served
        } else {
            let indoor: Vec<&UeLink> = links.iter().filter(|l| l.indoor).collect();
            if !indoor.is_empty() { indoor } else { links.iter().collect() }
        }
    };
    let (gain_fbs_link, gain_mbs_link) = match candidates
        .iter()
        .min_by(|a, b| macro_sinr_of(a).total_cmp(&macro_sinr_of(b)))
    {
        Some(worst) => (worst.gain_fbs, worst.gain_mbs),
        // No UEs at all: a nominal in-room link keeps the spec valid.
        None => {
            let loss = femto_link_loss_db(cfg, &cfg.fbs_position(), true, 0.0)?;
            (10f64.powf(-loss / 10.0), 10f64.powf(-macro_link_loss_db(cfg, &cfg.fbs_position(), true, 0.0)? / 10.0))
        }
    };

    // Gated slots: macro-served nonsubscribers whose slots the femtocell
    // must sit out because the interference gate fails at them. Players
    // that stay on the macrocell self-gate through the slot fraction, so
    // only the always-macro-served users enter the fixed count.
    let gated_slots = links
        .iter()
        .filter(|l| l.kind != UeKind::Subscriber && l.class == UeClass::DStar)
        .filter(|l| !interference_gate_passes(cfg, l))
        .count();

    let game = AccessGameSpec::new(
        cfg.bandwidth_hz(),
        cfg.beta,
        PlayerPopulation { p_sub: cfg.n_sub_indoor, p_non, p_players },
        PricingSpec::new(cfg.chi, cfg.phi, cfg.delta_adjustor)?,
        noise_w,
        cfg.tp_mbs_w,
        tp_fbs_w,
        gain_fbs_link,
        gain_mbs_link,
        cfg.delta_thresh_db,
        cfg.omega_thresh_db,
        gated_slots,
    )?;

    Ok(TrialScenario { links, game, players, degenerate: p_players == 0 })
}
