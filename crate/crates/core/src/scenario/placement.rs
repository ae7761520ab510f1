//! UE placement: indoor UEs uniform over the room, outdoor UEs uniform
//! over the macro disc excluding the room footprint.

use super::config::ScenarioConfig;
use crate::propagation::Position;
use rand::Rng;

/// Positions of all UEs of one trial, in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct UePlacement {
    pub subscribers: Vec<Position>,
    pub indoor_non: Vec<Position>,
    pub outdoor_non: Vec<Position>,
}

fn uniform_in_room<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Position {
    let (x0, y0, x1, y1) = cfg.room_bounds();
    Position { x_m: rng.random_range(x0..x1), y_m: rng.random_range(y0..y1) }
}

fn uniform_in_disc_outside_room<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Position {
    // Area-uniform draw over the disc, rejecting in-room points. The room
    // covers a vanishing fraction of the disc, so rejection is cheap.
    loop {
        let r = cfg.mbs_range_m * rng.random::<f64>().sqrt();
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let pos = Position { x_m: r * theta.cos(), y_m: r * theta.sin() };
        if !cfg.in_room(&pos) {
            return pos;
        }
    }
}

/// Draws every UE position for one trial. Subscribers first, then indoor
/// nonsubscribers, then outdoor nonsubscribers, so a fixed RNG state fixes
/// the whole placement.
pub fn place_ues<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> UePlacement {
    let subscribers = (0..cfg.n_sub_indoor).map(|_| uniform_in_room(cfg, rng)).collect();
    let indoor_non = (0..cfg.n_non_indoor).map(|_| uniform_in_room(cfg, rng)).collect();
    let outdoor_non = (0..cfg.n_non_outdoor)
        .map(|_| uniform_in_disc_outside_room(cfg, rng))
        .collect();
    UePlacement { subscribers, indoor_non, outdoor_non }
}
