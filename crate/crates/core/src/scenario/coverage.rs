//! Deterministic coverage grids around the femto room.
//!
//! Map mode applies the configured shadowing deviations as fixed margins
//! instead of random draws, so a grid is a pure function of the
//! configuration. The mapped region is a square centered on the room with
//! a side of four room lengths, which keeps both the indoor cells and
//! their outdoor surroundings in frame.

use super::build::{femto_link_loss_db, macro_link_loss_db};
use super::config::ScenarioConfig;
use super::ScenarioError;

/// Serving cell of a grid point, chosen by minimum loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Server {
    Mbs,
    Fbs,
}

impl Server {
    pub fn label(self) -> &'static str {
        match self {
            Server::Mbs => "MBS",
            Server::Fbs => "FBS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    /// Cell-center coordinates in meters.
    pub x_m: f64,
    pub y_m: f64,
    /// Best-server loss in dB.
    pub loss_db: f64,
    /// Received power from the best server in dBm.
    pub rp_dbm: f64,
    pub server: Server,
    pub indoor: bool,
}

/// Rectangular field of best-server losses and received powers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGrid {
    /// Lower-left corner of the mapped region, in meters.
    pub origin_x_m: f64,
    pub origin_y_m: f64,
    /// Square cell edge in meters.
    pub cell_m: f64,
    pub nx: usize,
    pub ny: usize,
    /// Cells in row-major order (`iy * nx + ix`).
    pub cells: Vec<GridCell>,
}

impl CoverageGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &GridCell {
        &self.cells[iy * self.nx + ix]
    }
}

/// Computes the loss / received-power field over an `nx` by `ny` grid.
/// With `with_femtocell` the best server per cell is the lower-loss of the
/// two transmitters, otherwise the macro station alone.
pub fn coverage_map(
    cfg: &ScenarioConfig,
    nx: usize,
    ny: usize,
    with_femtocell: bool,
) -> Result<CoverageGrid, ScenarioError> {
    if nx == 0 || ny == 0 {
        return Err(ScenarioError::InvalidArgument(format!(
            "grid must have at least one cell per axis, got {nx}x{ny}"
        )));
    }
    let center = cfg.fbs_position();
    let side = 4.0 * cfg.room_size_m;
    let cell_m = side / nx as f64;
    let origin_x_m = center.x_m - side / 2.0;
    let origin_y_m = center.y_m - cell_m * ny as f64 / 2.0;

    let tp_mbs_dbm = cfg.tp_mbs_dbm();
    let tp_fbs_dbm = cfg.tp_fbs_dbm();
    let mut cells = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let pos = crate::propagation::Position {
                x_m: origin_x_m + (ix as f64 + 0.5) * cell_m,
                y_m: origin_y_m + (iy as f64 + 0.5) * cell_m,
            };
            let indoor = cfg.in_room(&pos);
            let shadow_m = if indoor { cfg.shadow_mbs_indoor_db } else { cfg.shadow_mbs_outdoor_db };
            let macro_loss = macro_link_loss_db(cfg, &pos, indoor, shadow_m)?;
            let (loss_db, server) = if with_femtocell {
                let shadow_f = if indoor { cfg.shadow_fbs_indoor_db } else { cfg.shadow_fbs_outdoor_db };
                let femto_loss = femto_link_loss_db(cfg, &pos, indoor, shadow_f)?;
                if femto_loss < macro_loss {
                    (femto_loss, Server::Fbs)
                } else {
                    (macro_loss, Server::Mbs)
                }
            } else {
                (macro_loss, Server::Mbs)
            };
            let rp_dbm = match server {
                Server::Mbs => tp_mbs_dbm - loss_db,
                Server::Fbs => tp_fbs_dbm - loss_db,
            };
            cells.push(GridCell { x_m: pos.x_m, y_m: pos.y_m, loss_db, rp_dbm, server, indoor });
        }
    }
    Ok(CoverageGrid { origin_x_m, origin_y_m, cell_m, nx, ny, cells })
}
