//! Count-based cell-selection game between a femto base station and the
//! macro base station.
//!
//! Nonsubscribers whose femto reference power beats the macro's are the
//! players; each picks one of two pure strategies (connect to the FBS or to
//! the MBS). Utilities depend on the strategy profile only through the
//! number of players on the femtocell, which makes the game an exact
//! potential game: best-response dynamics reach a pure-strategy Nash
//! equilibrium, and a brute-force enumerator serves as an independent
//! oracle for the solver.

use crate::propagation::PowerLevel;
use thiserror::Error;

/// Relative tolerance below which a utility difference counts as a tie.
pub const NE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("{name} = {value} out of range (max {max})")]
    CountOutOfRange { name: &'static str, value: usize, max: usize },
    #[error("profile length {got} does not match player count {expected}")]
    ProfileLength { expected: usize, got: usize },
    #[error("{players} players exceed the brute-force limit of {max} (2^P profiles)")]
    TooManyPlayers { players: usize, max: usize },
    #[error("best response did not converge within {steps} steps")]
    NoConvergence { steps: usize, last: StrategyProfile },
    #[error("invalid game parameter {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

/// Pure strategy of a single player: femto or macro cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    /// Connect to the FBS (encoded as 0).
    Fbs,
    /// Connect to the MBS (encoded as 1).
    Mbs,
}

impl Choice {
    pub fn from_bit(bit: u8) -> Choice {
        if bit == 0 { Choice::Fbs } else { Choice::Mbs }
    }
}

/// One pure-strategy profile; entry `i` is player `i`'s choice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile(Vec<Choice>);

impl StrategyProfile {
    pub fn new(choices: Vec<Choice>) -> Self {
        Self(choices)
    }

    /// Builds a profile from 0/1 bits (0 = FBS, 1 = MBS).
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| Choice::from_bit(b)).collect())
    }

    pub fn all_mbs(players: usize) -> Self {
        Self(vec![Choice::Mbs; players])
    }

    pub fn all_fbs(players: usize) -> Self {
        Self(vec![Choice::Fbs; players])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn choices(&self) -> &[Choice] {
        &self.0
    }

    /// Number of players currently on the femtocell.
    pub fn femto_count(&self) -> usize {
        self.0.iter().filter(|c| **c == Choice::Fbs).count()
    }

    fn set(&mut self, player: usize, choice: Choice) {
        self.0[player] = choice;
    }
}

/// Player head-counts of one game instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayerPopulation {
    /// Subscribers, always served by the FBS.
    pub p_sub: usize,
    /// Nonsubscribers with a dominant macro signal; always served by the MBS.
    pub p_non: usize,
    /// Nonsubscribers with a dominant femto signal; the game players.
    pub p_players: usize,
}

/// Data speed limit, unit price and periodic adjustor of the femto tariff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricingSpec {
    /// Data speed limit in bit/s.
    pub chi: f64,
    /// Unit price.
    pub phi: f64,
    /// Periodic adjustor (dimensionless).
    pub delta: f64,
}

impl PricingSpec {
    pub fn new(chi: f64, phi: f64, delta: f64) -> Result<Self, GameError> {
        if !(chi.is_finite() && chi >= 0.0) {
            return Err(GameError::Invalid { field: "chi", reason: format!("must be >= 0, got {chi}") });
        }
        if !(phi.is_finite() && phi >= 0.0) {
            return Err(GameError::Invalid { field: "phi", reason: format!("must be >= 0, got {phi}") });
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(GameError::Invalid { field: "delta", reason: format!("must be > 0, got {delta}") });
        }
        Ok(Self { chi, phi, delta })
    }

    /// Price term subtracted from each femto player's utility, in bit/s.
    pub fn price_term(&self) -> f64 {
        self.chi * self.phi * self.delta
    }

    /// Aggregate operator revenue with `p_femto` paying femto players.
    pub fn operator_revenue(&self, p_femto: usize) -> f64 {
        p_femto as f64 * self.price_term()
    }
}

/// Receiver class from the femto/macro reference-power comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeClass {
    /// Femto reference power strictly dominates: eligible game player.
    D,
    /// Macro reference power dominates (ties included): macro-served.
    DStar,
}

/// Classifies a UE by comparing its received reference powers.
/// Exact ties resolve to the macro cell.
pub fn classify_ue(rp_fbs: PowerLevel, rp_mbs: PowerLevel) -> UeClass {
    if rp_fbs.dbm() > rp_mbs.dbm() { UeClass::D } else { UeClass::DStar }
}

/// Per-subscriber fraction of the femtocell resource under closed rate
/// `beta` with `p_players` players and `p_sub` subscribers.
pub fn subscriber_share(beta: f64, p_players: usize, p_sub: usize) -> Result<f64, GameError> {
    if p_sub == 0 {
        return Err(GameError::CountOutOfRange { name: "p_sub", value: 0, max: usize::MAX });
    }
    let p = p_players as f64;
    let s = p_sub as f64;
    let share = (beta * p + s) / (s * s + s * p);
    Ok(share.min(1.0))
}

/// A fully parameterized cell-selection game.
///
/// Channel gains are a single worst-case pair so that utilities depend on
/// the profile only through player counts (anonymity); per-player
/// heterogeneity enters one level up, when a scenario trial derives this
/// spec from its own worst-case links.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessGameSpec {
    /// Usable system bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Closed rate: fraction of femto bandwidth reserved for subscribers.
    pub beta: f64,
    pub population: PlayerPopulation,
    pub pricing: PricingSpec,
    /// Additive white Gaussian noise power in watts.
    pub noise_w: f64,
    /// Maximum macro transmit power in watts.
    pub tp_max_mbs_w: f64,
    /// Maximum femto transmit power in watts.
    pub tp_max_fbs_w: f64,
    /// Worst-case linear gain of the femto link.
    pub gain_fbs_link: f64,
    /// Worst-case linear gain of the macro link.
    pub gain_mbs_link: f64,
    /// Co-channel / adjacent-channel margin in dB.
    pub delta_thresh_db: f64,
    /// Co-tier / cross-tier margin in dB.
    pub omega_thresh_db: f64,
    /// Macro TDMA slots during which the FBS must stay silent.
    pub gated_slots: usize,
}

impl AccessGameSpec {
    /// Validates all invariants and returns the spec.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        bandwidth_hz: f64,
        beta: f64,
        population: PlayerPopulation,
        pricing: PricingSpec,
        noise_w: f64,
        tp_max_mbs_w: f64,
        tp_max_fbs_w: f64,
        gain_fbs_link: f64,
        gain_mbs_link: f64,
        delta_thresh_db: f64,
        omega_thresh_db: f64,
        gated_slots: usize,
    ) -> Result<Self, GameError> {
        fn positive(field: &'static str, v: f64) -> Result<(), GameError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(GameError::Invalid { field, reason: format!("must be > 0, got {v}") })
            }
        }
        positive("bandwidth_hz", bandwidth_hz)?;
        if !(0.0..=1.0).contains(&beta) {
            return Err(GameError::Invalid { field: "beta", reason: format!("must be in [0,1], got {beta}") });
        }
        positive("noise_w", noise_w)?;
        positive("tp_max_mbs_w", tp_max_mbs_w)?;
        positive("tp_max_fbs_w", tp_max_fbs_w)?;
        positive("gain_fbs_link", gain_fbs_link)?;
        positive("gain_mbs_link", gain_mbs_link)?;
        if !delta_thresh_db.is_finite() || !omega_thresh_db.is_finite() {
            return Err(GameError::Invalid { field: "thresholds", reason: "must be finite".into() });
        }
        let max_served = population.p_non + population.p_players;
        if gated_slots > max_served {
            return Err(GameError::CountOutOfRange { name: "gated_slots", value: gated_slots, max: max_served });
        }
        Ok(Self {
            bandwidth_hz,
            beta,
            population,
            pricing,
            noise_w,
            tp_max_mbs_w,
            tp_max_fbs_w,
            gain_fbs_link,
            gain_mbs_link,
            delta_thresh_db,
            omega_thresh_db,
            gated_slots,
        })
    }

    /// Femto transmit power permitted by the interference gate at one MUE,
    /// in watts: full power when the macro reference power clears the femto
    /// reference power by `delta + omega` dB, zero otherwise.
    pub fn allowed_fbs_power_w(&self, rp_mbs_at_mue_dbm: f64, rp_fbs_at_mue_dbm: f64) -> f64 {
        if rp_mbs_at_mue_dbm >= rp_fbs_at_mue_dbm + self.delta_thresh_db + self.omega_thresh_db {
            self.tp_max_fbs_w
        } else {
            0.0
        }
    }

    /// Macro TDMA slots scheduled when `p_femto` players sit on the FBS.
    pub fn mbs_served(&self, p_femto: usize) -> usize {
        self.population.p_non + self.population.p_players - p_femto
    }

    /// Downlink SINR of the worst-case femto link (linear).
    pub fn femto_sinr(&self) -> f64 {
        self.tp_max_fbs_w * self.gain_fbs_link
            / (self.noise_w + self.tp_max_mbs_w * self.gain_mbs_link)
    }

    /// Downlink SINR of the worst-case macro link (linear), with the femto
    /// transmitter as the cross-tier interferer.
    pub fn macro_sinr(&self) -> f64 {
        self.tp_max_mbs_w * self.gain_mbs_link
            / (self.noise_w + self.tp_max_fbs_w * self.gain_fbs_link)
    }

    fn fbs_capacity_at(&self, p_femto: usize) -> f64 {
        let served = self.mbs_served(p_femto);
        if served == 0 {
            return 0.0;
        }
        let usable = served.saturating_sub(self.gated_slots);
        if usable == 0 {
            return 0.0;
        }
        let spectral = (1.0 + self.femto_sinr()).log2();
        usable as f64 / served as f64 * self.bandwidth_hz * spectral
    }

    /// Femtocell capacity in bit/s with `p_femto` players on the FBS: the
    /// FBS reuses the non-gated fraction of the macro TDMA frame.
    pub fn fbs_capacity(&self, p_femto: usize) -> Result<f64, GameError> {
        if p_femto > self.population.p_players {
            return Err(GameError::CountOutOfRange {
                name: "p_femto",
                value: p_femto,
                max: self.population.p_players,
            });
        }
        Ok(self.fbs_capacity_at(p_femto))
    }

    fn femto_utility_at(&self, p_femto_total: usize) -> f64 {
        debug_assert!(p_femto_total >= 1 && p_femto_total <= self.population.p_players);
        (1.0 - self.beta) / (self.population.p_sub + p_femto_total) as f64
            * self.fbs_capacity_at(p_femto_total)
            - self.pricing.price_term()
    }

    fn macro_utility_at(&self, p_femto_total: usize) -> f64 {
        debug_assert!(p_femto_total < self.population.p_players);
        let served = self.mbs_served(p_femto_total);
        debug_assert!(served > 0);
        self.bandwidth_hz / served as f64 * (1.0 + self.macro_sinr()).log2()
    }

    /// Utility of one player in bit/s given its own choice and the total
    /// femto player count (which includes the player itself when it picks
    /// the FBS).
    pub fn utility(&self, choice: Choice, p_femto_total: usize) -> Result<f64, GameError> {
        let p = self.population.p_players;
        match choice {
            Choice::Fbs => {
                if p_femto_total == 0 || p_femto_total > p {
                    return Err(GameError::CountOutOfRange { name: "p_femto_total", value: p_femto_total, max: p });
                }
                Ok(self.femto_utility_at(p_femto_total))
            }
            Choice::Mbs => {
                if p == 0 || p_femto_total > p - 1 {
                    return Err(GameError::CountOutOfRange {
                        name: "p_femto_total",
                        value: p_femto_total,
                        max: p.saturating_sub(1),
                    });
                }
                Ok(self.macro_utility_at(p_femto_total))
            }
        }
    }
}

/// Any anonymous binary-choice game whose utilities depend only on the
/// femto player count. The solver, potential and brute-force oracle work
/// against this trait.
pub trait CountGame {
    fn players(&self) -> usize;

    /// Utility of a femto-connected player when `p_femto` players in total
    /// (including this one) sit on the FBS. Requires `1 <= p_femto <= P`.
    fn femto_utility(&self, p_femto: usize) -> f64;

    /// Utility of a macro-connected player when `p_femto` players sit on
    /// the FBS. Requires `p_femto <= P - 1`.
    fn macro_utility(&self, p_femto: usize) -> f64;
}

impl CountGame for AccessGameSpec {
    fn players(&self) -> usize {
        self.population.p_players
    }

    fn femto_utility(&self, p_femto: usize) -> f64 {
        self.femto_utility_at(p_femto)
    }

    fn macro_utility(&self, p_femto: usize) -> f64 {
        self.macro_utility_at(p_femto)
    }
}

/// Result of the best-response solver.
#[derive(Debug, Clone, PartialEq)]
pub struct NeResult {
    pub profile: StrategyProfile,
    /// Strategy switches performed before convergence.
    pub iterations: usize,
    pub potential_value: f64,
}

// Utilities memoized per femto count; u0[k] valid for 1..=P, u1[k] for 0..P.
struct UtilityTable {
    u0: Vec<f64>,
    u1: Vec<f64>,
}

impl UtilityTable {
    fn build<G: CountGame>(game: &G) -> Self {
        let p = game.players();
        let u0 = (0..=p).map(|k| if k == 0 { 0.0 } else { game.femto_utility(k) }).collect();
        let u1 = (0..p).map(|k| game.macro_utility(k)).collect();
        Self { u0, u1 }
    }
}

fn improves(candidate: f64, current: f64) -> bool {
    candidate - current > NE_TOLERANCE * candidate.abs().max(current.abs()).max(1.0)
}

fn check_profile<G: CountGame>(game: &G, profile: &StrategyProfile) -> Result<(), GameError> {
    if profile.len() != game.players() {
        return Err(GameError::ProfileLength { expected: game.players(), got: profile.len() });
    }
    Ok(())
}

/// Potential function of the game at `profile`.
///
/// With `k` femto players, the value is `sum_{n=1..=k} u0(n) +
/// sum_{n=k..P-1} u1(n)`, both sums indexed by the femto count. Under this
/// convention a unilateral deviation changes the potential by exactly the
/// deviator's utility change.
pub fn potential<G: CountGame>(game: &G, profile: &StrategyProfile) -> Result<f64, GameError> {
    check_profile(game, profile)?;
    let table = UtilityTable::build(game);
    Ok(potential_from_table(&table, game.players(), profile.femto_count()))
}

fn potential_from_table(table: &UtilityTable, players: usize, k: usize) -> f64 {
    let femto: f64 = (1..=k).map(|n| table.u0[n]).sum();
    let macro_: f64 = (k..players).map(|n| table.u1[n]).sum();
    femto + macro_
}

/// True iff no player can strictly improve by a unilateral deviation
/// (utility comparisons use [`NE_TOLERANCE`] relative tolerance).
pub fn is_ne<G: CountGame>(game: &G, profile: &StrategyProfile) -> Result<bool, GameError> {
    check_profile(game, profile)?;
    let table = UtilityTable::build(game);
    Ok(is_ne_from_table(&table, profile))
}

fn is_ne_from_table(table: &UtilityTable, profile: &StrategyProfile) -> bool {
    let k = profile.femto_count();
    for choice in profile.choices() {
        let (current, deviation) = match choice {
            Choice::Fbs => (table.u0[k], table.u1[k - 1]),
            Choice::Mbs => (table.u1[k], table.u0[k + 1]),
        };
        if improves(deviation, current) {
            return false;
        }
    }
    true
}

/// Runs single-player best responses in fixed player order until no player
/// deviates. Converges because every strict switch strictly increases the
/// potential over a finite profile space; `max_steps` bounds the number of
/// switches in case a caller supplies an inconsistent game.
pub fn find_ne<G: CountGame>(
    game: &G,
    initial: &StrategyProfile,
    max_steps: usize,
) -> Result<NeResult, GameError> {
    check_profile(game, initial)?;
    let players = game.players();
    let table = UtilityTable::build(game);
    let mut profile = initial.clone();
    let mut k = profile.femto_count();
    let mut switches = 0usize;
    loop {
        let mut changed = false;
        for i in 0..players {
            let (current, deviation, alt) = match profile.choices()[i] {
                Choice::Fbs => (table.u0[k], table.u1[k - 1], Choice::Mbs),
                Choice::Mbs => (table.u1[k], table.u0[k + 1], Choice::Fbs),
            };
            if improves(deviation, current) {
                if switches >= max_steps {
                    return Err(GameError::NoConvergence { steps: max_steps, last: profile });
                }
                k = match alt {
                    Choice::Fbs => k + 1,
                    Choice::Mbs => k - 1,
                };
                profile.set(i, alt);
                switches += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let potential_value = potential_from_table(&table, players, k);
    Ok(NeResult { profile, iterations: switches, potential_value })
}

/// Maximum player count accepted by [`enumerate_ne_bruteforce`].
pub const BRUTE_FORCE_MAX_PLAYERS: usize = 20;

/// Exact set of Nash equilibria by enumerating all `2^P` profiles.
/// Profiles are returned in ascending bit-mask order (bit i set = player i
/// on the MBS).
pub fn enumerate_ne_bruteforce<G: CountGame>(game: &G) -> Result<Vec<StrategyProfile>, GameError> {
    let players = game.players();
    if players > BRUTE_FORCE_MAX_PLAYERS {
        return Err(GameError::TooManyPlayers { players, max: BRUTE_FORCE_MAX_PLAYERS });
    }
    let table = UtilityTable::build(game);
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << players) {
        let profile = StrategyProfile::new(
            (0..players).map(|i| Choice::from_bit(((mask >> i) & 1) as u8)).collect(),
        );
        if is_ne_from_table(&table, &profile) {
            out.push(profile);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use rand::Rng;

    /// Congestion toy game: femto utility 6/k, macro utility 4/m with
    /// m macro players.
    struct ToyGame {
        players: usize,
    }

    impl CountGame for ToyGame {
        fn players(&self) -> usize {
            self.players
        }
        fn femto_utility(&self, p_femto: usize) -> f64 {
            6.0 / p_femto as f64
        }
        fn macro_utility(&self, p_femto: usize) -> f64 {
            4.0 / (self.players - p_femto) as f64
        }
    }

    fn sample_spec() -> AccessGameSpec {
        AccessGameSpec::new(
            5.5e6,
            0.75,
            PlayerPopulation { p_sub: 5, p_non: 10, p_players: 8 },
            PricingSpec::new(1e6, 0.05, 1.0).unwrap(),
            1.38e-13,
            1500.0,
            0.015,
            3.6e-6,
            4.96e-12,
            5.0,
            5.0,
            8,
        )
        .unwrap()
    }

    #[test]
    fn classify_by_reference_power() {
        let f = PowerLevel::from_dbm(-60.0).unwrap();
        let m = PowerLevel::from_dbm(-80.0).unwrap();
        assert_eq!(classify_ue(f, m), UeClass::D);
        assert_eq!(classify_ue(m, f), UeClass::DStar);
        assert_eq!(classify_ue(f, f), UeClass::DStar);
    }

    #[test]
    fn power_gate_branches() {
        let spec = sample_spec();
        assert_eq!(spec.allowed_fbs_power_w(-60.0, -90.0), 0.015);
        assert_eq!(spec.allowed_fbs_power_w(-90.0, -60.0), 0.0);
        // Boundary is included.
        assert_eq!(spec.allowed_fbs_power_w(-80.0, -90.0), 0.015);
    }

    #[test]
    fn fbs_capacity_reference_point() {
        // mbs_served = 4, gated = 2, B = 20 MHz; signal 30, noise 1,
        // interference 1 -> SINR = 15 and log2(1 + 15) = 4.
        let spec = AccessGameSpec::new(
            20e6,
            0.5,
            PlayerPopulation { p_sub: 1, p_non: 2, p_players: 2 },
            PricingSpec::new(0.0, 0.0, 1.0).unwrap(),
            1.0,
            1.0,
            30.0,
            1.0,
            1.0,
            5.0,
            5.0,
            2,
        )
        .unwrap();
        assert!((spec.femto_sinr() - 15.0).abs() < 1e-12);
        let cap = spec.fbs_capacity(0).unwrap();
        assert!((cap - 40e6).abs() < 1e-3, "capacity {cap}");
    }

    #[test]
    fn fbs_capacity_edge_cases() {
        let mut spec = sample_spec();
        spec.gated_slots = spec.mbs_served(0);
        assert_eq!(spec.fbs_capacity(0).unwrap(), 0.0);
        // Out of range count is rejected.
        assert!(sample_spec().fbs_capacity(9).is_err());
        // Gated power means zero capacity regardless of count.
        let silent = AccessGameSpec { gated_slots: 18, ..sample_spec() };
        for k in 0..=8 {
            assert_eq!(silent.fbs_capacity(k).unwrap(), 0.0);
        }
    }

    #[test]
    fn fbs_capacity_monotone_in_gated_slots() {
        let base = sample_spec();
        let mut prev = f64::INFINITY;
        for gated in 0..=base.mbs_served(0) {
            let spec = AccessGameSpec { gated_slots: gated, ..base.clone() };
            let cap = spec.fbs_capacity(3).unwrap();
            assert!(cap <= prev);
            prev = cap;
        }
    }

    #[test]
    fn macro_utility_reference_point() {
        // B = 10 MHz, 5 macro slots; macro signal 15, noise 0.5,
        // femto interference 0.5 -> SINR = 15 and log2(16) = 4.
        let spec = AccessGameSpec::new(
            10e6,
            0.5,
            PlayerPopulation { p_sub: 0, p_non: 3, p_players: 3 },
            PricingSpec::new(0.0, 0.0, 1.0).unwrap(),
            0.5,
            15.0,
            1.0,
            0.5,
            1.0,
            5.0,
            5.0,
            0,
        )
        .unwrap();
        assert!((spec.macro_sinr() - 15.0).abs() < 1e-12);
        let u = spec.utility(Choice::Mbs, 1).unwrap();
        assert!((u - 8e6).abs() < 1e-3, "macro utility {u}");
    }

    #[test]
    fn femto_utility_degenerate_cases() {
        let closed = AccessGameSpec { beta: 1.0, ..sample_spec() };
        let u = closed.utility(Choice::Fbs, 3).unwrap();
        assert!((u + closed.pricing.price_term()).abs() < 1e-9);

        let open = AccessGameSpec {
            beta: 0.0,
            pricing: PricingSpec::new(1e6, 0.0, 1.0).unwrap(),
            population: PlayerPopulation { p_sub: 0, p_non: 10, p_players: 8 },
            ..sample_spec()
        };
        let u = open.utility(Choice::Fbs, 1).unwrap();
        assert!((u - open.fbs_capacity(1).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn utility_rejects_out_of_range_counts() {
        let spec = sample_spec();
        assert!(spec.utility(Choice::Fbs, 0).is_err());
        assert!(spec.utility(Choice::Fbs, 9).is_err());
        assert!(spec.utility(Choice::Mbs, 8).is_err());
        assert!(spec.utility(Choice::Mbs, 7).is_ok());
    }

    #[test]
    fn utility_monotone_in_beta_and_price() {
        let base = sample_spec();
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let spec = AccessGameSpec { beta: i as f64 / 10.0, ..base.clone() };
            let u = spec.utility(Choice::Fbs, 2).unwrap();
            assert!(u <= prev + 1e-12);
            prev = u;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let spec = AccessGameSpec {
                pricing: PricingSpec::new(1e6, i as f64 * 0.1, 1.0).unwrap(),
                ..base.clone()
            };
            let u = spec.utility(Choice::Fbs, 2).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn subscriber_share_reference_points() {
        assert!((subscriber_share(1.0, 7, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((subscriber_share(0.0, 4, 3).unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert!((subscriber_share(0.5, 4, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(subscriber_share(0.5, 4, 0).is_err());
    }

    #[test]
    fn revenue_reference_points() {
        let pricing = PricingSpec::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(pricing.operator_revenue(3), 6.0);
        let free = PricingSpec::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(free.operator_revenue(10), 0.0);
    }

    #[test]
    fn revenue_linear_in_each_factor() {
        let base = PricingSpec::new(2.0, 3.0, 1.5).unwrap();
        let r = base.operator_revenue(4);
        for scale in [2.0, 5.0] {
            let chi = PricingSpec::new(base.chi * scale, base.phi, base.delta).unwrap();
            assert!((chi.operator_revenue(4) - scale * r).abs() < 1e-12);
            let phi = PricingSpec::new(base.chi, base.phi * scale, base.delta).unwrap();
            assert!((phi.operator_revenue(4) - scale * r).abs() < 1e-12);
            let delta = PricingSpec::new(base.chi, base.phi, base.delta * scale).unwrap();
            assert!((delta.operator_revenue(4) - scale * r).abs() < 1e-12);
        }
    }

    #[test]
    fn toy_game_equilibria() {
        let game = ToyGame { players: 2 };
        let split_a = StrategyProfile::from_bits(&[0, 1]);
        let split_b = StrategyProfile::from_bits(&[1, 0]);
        let both_fbs = StrategyProfile::from_bits(&[0, 0]);
        let both_mbs = StrategyProfile::from_bits(&[1, 1]);

        assert!(is_ne(&game, &split_a).unwrap());
        assert!(is_ne(&game, &split_b).unwrap());
        assert!(!is_ne(&game, &both_fbs).unwrap());
        assert!(!is_ne(&game, &both_mbs).unwrap());

        // The oracle returns profiles in ascending mask order (bit = MBS).
        let set = enumerate_ne_bruteforce(&game).unwrap();
        assert_eq!(set, vec![split_b.clone(), split_a.clone()]);

        // Potential difference tracks the deviator's utility change:
        // the macro player of a split profile moving to the FBS.
        let phi_both = potential(&game, &both_fbs).unwrap();
        let phi_split = potential(&game, &split_a).unwrap();
        let delta_u = game.femto_utility(2) - game.macro_utility(1);
        assert!(((phi_both - phi_split) - delta_u).abs() < 1e-12);

        let ne = find_ne(&game, &both_mbs, 100).unwrap();
        assert_eq!(ne.profile.femto_count(), 1);
        assert!(is_ne(&game, &ne.profile).unwrap());
    }

    #[test]
    fn single_player_game() {
        struct OneShot;
        impl CountGame for OneShot {
            fn players(&self) -> usize {
                1
            }
            fn femto_utility(&self, _: usize) -> f64 {
                3.0
            }
            fn macro_utility(&self, _: usize) -> f64 {
                1.0
            }
        }
        let game = OneShot;
        let fbs = StrategyProfile::from_bits(&[0]);
        let mbs = StrategyProfile::from_bits(&[1]);
        assert!(is_ne(&game, &fbs).unwrap());
        assert!(!is_ne(&game, &mbs).unwrap());
        let diff = potential(&game, &fbs).unwrap() - potential(&game, &mbs).unwrap();
        assert!((diff - (game.femto_utility(1) - game.macro_utility(0))).abs() < 1e-12);
        let ne = find_ne(&game, &mbs, 10).unwrap();
        assert_eq!(ne.profile, fbs);
        assert_eq!(ne.iterations, 1);
    }

    #[test]
    fn dominant_strategy_game() {
        struct FbsDominant {
            players: usize,
        }
        impl CountGame for FbsDominant {
            fn players(&self) -> usize {
                self.players
            }
            fn femto_utility(&self, _: usize) -> f64 {
                10.0
            }
            fn macro_utility(&self, _: usize) -> f64 {
                1.0
            }
        }
        let game = FbsDominant { players: 4 };
        let set = enumerate_ne_bruteforce(&game).unwrap();
        assert_eq!(set, vec![StrategyProfile::all_fbs(4)]);
        let ne = find_ne(&game, &StrategyProfile::all_mbs(4), 64).unwrap();
        assert_eq!(ne.profile, StrategyProfile::all_fbs(4));
    }

    #[test]
    fn empty_game_is_trivially_at_equilibrium() {
        let game = ToyGame { players: 0 };
        let empty = StrategyProfile::new(vec![]);
        assert_eq!(potential(&game, &empty).unwrap(), 0.0);
        assert!(is_ne(&game, &empty).unwrap());
        assert_eq!(enumerate_ne_bruteforce(&game).unwrap(), vec![empty.clone()]);
        let ne = find_ne(&game, &empty, 1).unwrap();
        assert_eq!(ne.iterations, 0);
    }

    #[test]
    fn brute_force_guard() {
        let game = ToyGame { players: 21 };
        assert!(matches!(
            enumerate_ne_bruteforce(&game),
            Err(GameError::TooManyPlayers { players: 21, .. })
        ));
    }

    #[test]
    fn profile_length_mismatch_is_rejected() {
        let game = ToyGame { players: 3 };
        let short = StrategyProfile::from_bits(&[0, 1]);
        assert!(matches!(is_ne(&game, &short), Err(GameError::ProfileLength { .. })));
    }

    #[test]
    fn anonymity_under_permutation() {
        let spec = sample_spec();
        let mut rng = derive_rng(3, 0, 0);
        for _ in 0..50 {
            let bits: Vec<u8> = (0..8).map(|_| rng.random_range(0..=1) as u8).collect();
            let profile = StrategyProfile::from_bits(&bits);
            let mut reversed = bits.clone();
            reversed.reverse();
            let permuted = StrategyProfile::from_bits(&reversed);
            assert_eq!(is_ne(&spec, &profile).unwrap(), is_ne(&spec, &permuted).unwrap());
            let a = potential(&spec, &profile).unwrap();
            let b = potential(&spec, &permuted).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn solver_output_is_equilibrium_for_table_scale_games() {
        let mut rng = derive_rng(17, 0, 0);
        for trial in 0..200 {
            let players = rng.random_range(1..=10);
            let p_non = rng.random_range(0..12);
            let spec = AccessGameSpec::new(
                10f64.powf(rng.random_range(5.0..7.0)),
                rng.random_range(0.0..1.0),
                PlayerPopulation { p_sub: rng.random_range(0..6), p_non, p_players: players },
                PricingSpec::new(10f64.powf(rng.random_range(3.0..6.0)), rng.random_range(0.0..1.0), 1.0).unwrap(),
                10f64.powf(rng.random_range(-14.0..-11.0)),
                10f64.powf(rng.random_range(0.0..3.5)),
                10f64.powf(rng.random_range(-3.0..-1.0)),
                10f64.powf(rng.random_range(-9.0..-5.0)),
                10f64.powf(rng.random_range(-13.0..-10.0)),
                5.0,
                5.0,
                rng.random_range(0..=(p_non + players).min(4)),
            )
            .unwrap();
            let start = if trial % 2 == 0 {
                StrategyProfile::all_mbs(players)
            } else {
                StrategyProfile::all_fbs(players)
            };
            let ne = find_ne(&spec, &start, 1 << players).unwrap();
            assert!(is_ne(&spec, &ne.profile).unwrap(), "trial {trial}");
            let set = enumerate_ne_bruteforce(&spec).unwrap();
            assert!(set.contains(&ne.profile), "trial {trial}: solver result not in oracle set");
        }
    }
}
