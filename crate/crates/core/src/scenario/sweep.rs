//! Monte Carlo sweeps: per-trial scoring at the Nash equilibrium and
//! aggregation over configurable parameter grids.

use super::build::{build_game, TrialScenario};
use super::config::ScenarioConfig;
use super::replay::demand_utilization;
use super::ScenarioError;
use crate::game::{find_ne, subscriber_share, Choice, StrategyProfile};
use crate::rng::{derive_rng, stream};
use crate::sinr::{
    outage_probability, sinr, ChannelRealizations, LinkCategory, NoiseAndThreshold,
    PowerAllocation, Tier, Topology,
};
use num_complex::Complex64;

/// Quantity varied across a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Macro-to-femto distance in meters.
    Distance,
    /// Unit price `phi`.
    Price,
    /// Total nonsubscriber count, split indoor/outdoor in the configured
    /// proportion.
    Users,
    /// Closed rate `beta`.
    Beta,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::Price => "price",
            SweepVariable::Users => "users",
            SweepVariable::Beta => "beta",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "distance" => Some(SweepVariable::Distance),
            "price" => Some(SweepVariable::Price),
            "users" => Some(SweepVariable::Users),
            "beta" => Some(SweepVariable::Beta),
            _ => None,
        }
    }

    /// Returns a validated copy of `cfg` with this variable set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig, ScenarioError> {
        let mut out = cfg.clone();
        match self {
            SweepVariable::Distance => out.distance_mbs_fbs_m = value,
            SweepVariable::Price => out.phi = value,
            SweepVariable::Beta => out.beta = value,
            SweepVariable::Users => {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(ScenarioError::InvalidArgument(format!(
                        "user count must be >= 0, got {value}"
                    )));
                }
                let total = value.round() as usize;
                let current = cfg.total_nonsubscribers();
                let indoor = if current == 0 {
                    0
                } else {
                    ((total as f64) * (cfg.n_non_indoor as f64) / (current as f64)).round() as usize
                };
                out.n_non_indoor = indoor.min(total);
                out.n_non_outdoor = total - out.n_non_indoor;
            }
        }
        out.validate()?;
        Ok(out)
    }
}

/// Grid and trial counts of one sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub trials: usize,
}

/// Aggregated output of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub variable: &'static str,
    pub value: f64,
    pub trials: usize,
    pub mean_sub_capacity_bps: f64,
    pub mean_sys_capacity_bps: f64,
    pub ne_femto_count_mean: f64,
    pub revenue_mean: f64,
    pub outage_mean: f64,
    pub utilization_mean: f64,
    /// 95% confidence half-width of the subscriber-capacity mean.
    pub ci_halfwidth: f64,
}

/// Raw metrics of a single Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    pub sub_capacity_bps: f64,
    pub sys_capacity_bps: f64,
    pub ne_femto_count: usize,
    pub revenue: f64,
    pub outage: f64,
    pub utilization: f64,
    pub degenerate: bool,
}

fn outage_of(sinr_linear: f64, varpi: f64) -> Result<f64, ScenarioError> {
    if sinr_linear <= 0.0 {
        return Ok(1.0);
    }
    Ok(outage_probability(sinr_linear, varpi)?)
}

// Mean outage over every UE at the equilibrium power allocation, routed
// through the per-band SINR machinery with deterministic unit-band gains.
fn equilibrium_outage(
    cfg: &ScenarioConfig,
    trial: &TrialScenario,
    ne_profile: &StrategyProfile,
) -> Result<f64, ScenarioError> {
    let links = &trial.links;
    if links.is_empty() {
        return Ok(0.0);
    }
    // Femto-served: subscribers plus the players that chose the FBS.
    let mut femto_served = vec![false; links.len()];
    for (slot, &link_idx) in trial.players.iter().enumerate() {
        femto_served[link_idx] = ne_profile.choices()[slot] == Choice::Fbs;
    }
    for (i, link) in links.iter().enumerate() {
        if link.kind == super::build::UeKind::Subscriber {
            femto_served[i] = true;
        }
    }
    let n_fue = femto_served.iter().filter(|&&f| f).count();
    let n_mue = links.len() - n_fue;
    let topology = Topology {
        n_mbs: 1,
        n_fap: 1,
        n_ofap: 1,
        n_mue,
        n_fue,
        n_ofue: 0,
        n_bands: 1,
    };
    let mut realizations = ChannelRealizations::empty(topology);
    let mut mue_of_link = vec![usize::MAX; links.len()];
    let mut fue_of_link = vec![usize::MAX; links.len()];
    let (mut next_mue, mut next_fue) = (0usize, 0usize);
    for (i, link) in links.iter().enumerate() {
        let g_m = Complex64::new(link.gain_mbs.sqrt(), 0.0);
        let g_f = Complex64::new(link.gain_fbs.sqrt(), 0.0);
        if femto_served[i] {
            realizations.set(LinkCategory::FapToFue, 0, next_fue, 0, g_f);
            realizations.set(LinkCategory::MbsToFue, 0, next_fue, 0, g_m);
            realizations.set(LinkCategory::OfapToFue, 0, next_fue, 0, Complex64::new(0.0, 0.0));
            fue_of_link[i] = next_fue;
            next_fue += 1;
        } else {
            realizations.set(LinkCategory::MbsToMue, 0, next_mue, 0, g_m);
            realizations.set(LinkCategory::FapToMue, 0, next_mue, 0, g_f);
            realizations.set(LinkCategory::OfapToMue, 0, next_mue, 0, Complex64::new(0.0, 0.0));
            mue_of_link[i] = next_mue;
            next_mue += 1;
        }
    }
    let fbs_tx_w = trial.fbs_transmit_power_w();
    let allocation = PowerAllocation::new(
        vec![vec![cfg.tp_mbs_w]],
        vec![vec![fbs_tx_w]],
        vec![vec![0.0]],
        cfg.tp_mbs_w,
        cfg.tp_fbs_w(),
        1.0,
    )?;
    let noise_w = cfg.noise_power_w();
    let noise = NoiseAndThreshold::new(noise_w, noise_w, noise_w, cfg.varpi_mbs())?;

    let mut total = 0.0;
    for (i, _) in links.iter().enumerate() {
        let (tier, rx, varpi) = if femto_served[i] {
            (Tier::Fue, fue_of_link[i], cfg.varpi_out())
        } else {
            (Tier::Mue, mue_of_link[i], cfg.varpi_mbs())
        };
        let s = sinr(tier, rx, 0, &realizations, &allocation, &noise)?;
        total += outage_of(s, varpi)?;
    }
    Ok(total / links.len() as f64)
}

/// Builds, solves and scores one trial. `index` selects the trial's
/// random streams under `master_seed`; equal `(config, master_seed,
/// index)` triples give identical metrics regardless of evaluation order.
pub fn evaluate_trial(
    cfg: &ScenarioConfig,
    master_seed: u64,
    index: u64,
) -> Result<TrialMetrics, ScenarioError> {
    let mut rng = derive_rng(master_seed, stream::SHADOWING, index);
    let trial = build_game(cfg, &mut rng)?;
    let game = &trial.game;
    let p_players = game.population.p_players;
    let p_sub = game.population.p_sub;

    let ne = find_ne(game, &StrategyProfile::all_mbs(p_players), 2 * p_players + 16)?;
    let k = ne.profile.femto_count();

    let capacity = game.fbs_capacity(k)?;
    let sub_capacity_bps = if p_sub >= 1 {
        subscriber_share(cfg.beta, p_players, p_sub)? * capacity
    } else {
        0.0
    };

    // System capacity: aggregate rate delivered to the femto-eligible UEs
    // (subscribers and players) at the equilibrium, price excluded.
    let femto_rate = if k > 0 {
        (1.0 - cfg.beta) / (p_sub + k) as f64 * capacity
    } else {
        0.0
    };
    let macro_rate = if k < p_players {
        game.bandwidth_hz / game.mbs_served(k) as f64 * (1.0 + game.macro_sinr()).log2()
    } else {
        0.0
    };
    let sys_capacity_bps = p_sub as f64 * sub_capacity_bps
        + k as f64 * femto_rate
        + (p_players - k) as f64 * macro_rate;

    let revenue = game.pricing.operator_revenue(k);
    let outage = equilibrium_outage(cfg, &trial, &ne.profile)?;
    let utilization = demand_utilization(
        cfg,
        trial.links.len(),
        &mut derive_rng(master_seed, stream::ALLOC_EVENTS, index),
    )?;

    Ok(TrialMetrics {
        sub_capacity_bps,
        sys_capacity_bps,
        ne_femto_count: k,
        revenue,
        outage,
        utilization,
        degenerate: trial.degenerate,
    })
}

/// Evenly spaced grid; a single step collapses to `from`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Runs `spec.trials` trials at each grid point and aggregates means and
/// the subscriber-capacity confidence half-width. Trial `t` reuses stream
/// index `t` at every grid point, so grid points see common random
/// numbers and differ only through the swept variable.
pub fn run_sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRecord>, ScenarioError> {
    if spec.steps == 0 {
        return Err(ScenarioError::InvalidArgument("sweep needs at least one step".into()));
    }
    if spec.trials == 0 {
        return Err(ScenarioError::InvalidArgument("sweep needs at least one trial".into()));
    }
    if !spec.from.is_finite() || !spec.to.is_finite() {
        return Err(ScenarioError::InvalidArgument("sweep bounds must be finite".into()));
    }
    let mut records = Vec::with_capacity(spec.steps);
    for value in linspace(spec.from, spec.to, spec.steps) {
        let point_cfg = spec.variable.apply(cfg, value)?;
        let metrics: Vec<TrialMetrics> = (0..spec.trials)
            .map(|t| evaluate_trial(&point_cfg, cfg.seed, t as u64))
            .collect::<Result<_, _>>()?;
        records.push(aggregate(spec.variable.label(), value, &metrics));
    }
    Ok(records)
}

fn aggregate(variable: &'static str, value: f64, metrics: &[TrialMetrics]) -> SweepRecord {
    let n = metrics.len() as f64;
    let mean = |f: &dyn Fn(&TrialMetrics) -> f64| metrics.iter().map(|m| f(m)).sum::<f64>() / n;
    let mean_sub = mean(&|m| m.sub_capacity_bps);
    let ci_halfwidth = if metrics.len() > 1 {
        let var = metrics
            .iter()
            .map(|m| (m.sub_capacity_bps - mean_sub).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        1.96 * (var / n).sqrt()
    } else {
        0.0
    };
    SweepRecord {
        variable,
        value,
        trials: metrics.len(),
        mean_sub_capacity_bps: mean_sub,
        mean_sys_capacity_bps: mean(&|m| m.sys_capacity_bps),
        ne_femto_count_mean: mean(&|m| m.ne_femto_count as f64),
        revenue_mean: mean(&|m| m.revenue),
        outage_mean: mean(&|m| m.outage),
        utilization_mean: mean(&|m| m.utilization),
        ci_halfwidth,
    }
}

/// One point of an empirical CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub value_bps: f64,
    pub cum_prob: f64,
}

/// Empirical capacity CDFs at the equilibrium, one sample per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCdf {
    pub subscriber: Vec<CdfPoint>,
    pub system: Vec<CdfPoint>,
}

fn empirical_cdf(mut values: Vec<f64>) -> Vec<CdfPoint> {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .into_iter()
        .enumerate()
        .map(|(i, value_bps)| CdfPoint { value_bps, cum_prob: (i + 1) as f64 / n })
        .collect()
}

/// Runs `trials` trials and returns the subscriber and system capacity
/// CDFs. Trial `t` always uses stream index `t`, so extending the trial
/// count preserves the existing sample prefix.
pub fn capacity_cdf(cfg: &ScenarioConfig, trials: usize) -> Result<CapacityCdf, ScenarioError> {
    if trials == 0 {
        return Err(ScenarioError::InvalidArgument("cdf needs at least one trial".into()));
    }
    let mut sub = Vec::with_capacity(trials);
    let mut sys = Vec::with_capacity(trials);
    for t in 0..trials {
        let m = evaluate_trial(cfg, cfg.seed, t as u64)?;
        sub.push(m.sub_capacity_bps);
        sys.push(m.sys_capacity_bps);
    }
    Ok(CapacityCdf { subscriber: empirical_cdf(sub), system: empirical_cdf(sys) })
}
