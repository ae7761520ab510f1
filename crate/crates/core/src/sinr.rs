//! Per-band SINR across the three receiver tiers and Rayleigh outage
//! probability.
//!
//! Transmitters come in three classes (macro base stations, femto access
//! points, optical femto access points) and receivers in three matching
//! tiers (MUE, FUE, OFUE). The nine transmitter/receiver link categories
//! each carry complex channel realizations per frequency band; a
//! receiver's SINR is its serving power times the squared serving gain
//! over tier noise plus the sum of all interfering received powers.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SinrError {
    #[error("missing channel realization for {category:?} tx {tx} rx {rx} band {band}")]
    MissingRealization { category: LinkCategory, tx: usize, rx: usize, band: usize },
    #[error("{name} out of range: {value} (limit {limit})")]
    IndexOutOfRange { name: &'static str, value: usize, limit: usize },
    #[error("power allocation entry {value} for {name} is invalid (max {max})")]
    BadPower { name: &'static str, value: f64, max: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// The nine transmitter/receiver link categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkCategory {
    MbsToMue,
    FapToMue,
    OfapToMue,
    FapToFue,
    MbsToFue,
    OfapToFue,
    OfapToOfue,
    MbsToOfue,
    FapToOfue,
}

impl LinkCategory {
    pub const ALL: [LinkCategory; 9] = [
        LinkCategory::MbsToMue,
        LinkCategory::FapToMue,
        LinkCategory::OfapToMue,
        LinkCategory::FapToFue,
        LinkCategory::MbsToFue,
        LinkCategory::OfapToFue,
        LinkCategory::OfapToOfue,
        LinkCategory::MbsToOfue,
        LinkCategory::FapToOfue,
    ];
}

/// Receiver tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Fue,
    Mue,
    Ofue,
}

/// Transmitter and receiver counts plus the number of frequency bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub n_mbs: usize,
    pub n_fap: usize,
    pub n_ofap: usize,
    pub n_mue: usize,
    pub n_fue: usize,
    pub n_ofue: usize,
    pub n_bands: usize,
}

impl Topology {
    fn tx_rx_counts(&self, category: LinkCategory) -> (usize, usize) {
        use LinkCategory::*;
        match category {
            MbsToMue => (self.n_mbs, self.n_mue),
            FapToMue => (self.n_fap, self.n_mue),
            OfapToMue => (self.n_ofap, self.n_mue),
            FapToFue => (self.n_fap, self.n_fue),
            MbsToFue => (self.n_mbs, self.n_fue),
            OfapToFue => (self.n_ofap, self.n_fue),
            OfapToOfue => (self.n_ofap, self.n_ofue),
            MbsToOfue => (self.n_mbs, self.n_ofue),
            FapToOfue => (self.n_fap, self.n_ofue),
        }
    }

    fn receivers(&self, tier: Tier) -> usize {
        match tier {
            Tier::Fue => self.n_fue,
            Tier::Mue => self.n_mue,
            Tier::Ofue => self.n_ofue,
        }
    }

    fn serving_aps(&self, tier: Tier) -> usize {
        match tier {
            Tier::Fue => self.n_fap,
            Tier::Mue => self.n_mbs,
            Tier::Ofue => self.n_ofap,
        }
    }
}

/// Complex channel gains keyed by (link category, transmitter, receiver,
/// band). Receivers associate with the access points of their own tier
/// round-robin: receiver `r` is served by AP `r % n_ap`.
#[derive(Debug, Clone)]
pub struct ChannelRealizations {
    topology: Topology,
    gains: HashMap<(LinkCategory, usize, usize, usize), Complex64>,
}

impl ChannelRealizations {
    pub fn empty(topology: Topology) -> Self {
        Self { topology, gains: HashMap::new() }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn set(&mut self, category: LinkCategory, tx: usize, rx: usize, band: usize, gain: Complex64) {
        self.gains.insert((category, tx, rx, band), gain);
    }

    pub fn get(
        &self,
        category: LinkCategory,
        tx: usize,
        rx: usize,
        band: usize,
    ) -> Result<Complex64, SinrError> {
        self.gains
            .get(&(category, tx, rx, band))
            .copied()
            .ok_or(SinrError::MissingRealization { category, tx, rx, band })
    }

    /// Squared magnitude of a stored gain.
    pub fn power_gain(
        &self,
        category: LinkCategory,
        tx: usize,
        rx: usize,
        band: usize,
    ) -> Result<f64, SinrError> {
        Ok(self.get(category, tx, rx, band)?.norm_sqr())
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// Draws i.i.d. circularly-symmetric complex normal gains for every link
/// and band so that `|gain|^2` is exponential with mean `fading_scale`.
pub fn draw_realizations<R: Rng + ?Sized>(
    topology: Topology,
    fading_scale: f64,
    rng: &mut R,
) -> Result<ChannelRealizations, SinrError> {
    if !(fading_scale.is_finite() && fading_scale > 0.0) {
        return Err(SinrError::NonPositive { name: "fading_scale", value: fading_scale });
    }
    let component = Normal::new(0.0, (fading_scale / 2.0).sqrt()).expect("validated scale");
    let mut out = ChannelRealizations::empty(topology);
    for category in LinkCategory::ALL {
        let (n_tx, n_rx) = topology.tx_rx_counts(category);
        for tx in 0..n_tx {
            for rx in 0..n_rx {
                for band in 0..topology.n_bands {
                    let gain = Complex64::new(component.sample(rng), component.sample(rng));
                    out.set(category, tx, rx, band, gain);
                }
            }
        }
    }
    Ok(out)
}

/// Non-negative per-band transmit powers for every transmitter, in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    mbs: Vec<Vec<f64>>,
    fap: Vec<Vec<f64>>,
    ofap: Vec<Vec<f64>>,
}

impl PowerAllocation {
    /// Validates entries against per-class maximum powers.
    pub fn new(
        mbs: Vec<Vec<f64>>,
        fap: Vec<Vec<f64>>,
        ofap: Vec<Vec<f64>>,
        max_mbs_w: f64,
        max_fap_w: f64,
        max_ofap_w: f64,
    ) -> Result<Self, SinrError> {
        fn check(name: &'static str, vectors: &[Vec<f64>], max: f64) -> Result<(), SinrError> {
            for v in vectors {
                for &p in v {
                    if !p.is_finite() || p < 0.0 || p > max {
                        return Err(SinrError::BadPower { name, value: p, max });
                    }
                }
            }
            Ok(())
        }
        check("mbs", &mbs, max_mbs_w)?;
        check("fap", &fap, max_fap_w)?;
        check("ofap", &ofap, max_ofap_w)?;
        Ok(Self { mbs, fap, ofap })
    }

    fn power(&self, class: TxClass, tx: usize, band: usize) -> f64 {
        let table = match class {
            TxClass::Mbs => &self.mbs,
            TxClass::Fap => &self.fap,
            TxClass::Ofap => &self.ofap,
        };
        table.get(tx).and_then(|v| v.get(band)).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
enum TxClass {
    Mbs,
    Fap,
    Ofap,
}

/// Per-tier noise powers (watts) and the linear SINR outage threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseAndThreshold {
    pub sigma2_fue: f64,
    pub sigma2_mue: f64,
    pub sigma2_ofue: f64,
    /// Outage threshold, linear.
    pub varpi: f64,
}

impl NoiseAndThreshold {
    pub fn new(sigma2_fue: f64, sigma2_mue: f64, sigma2_ofue: f64, varpi: f64) -> Result<Self, SinrError> {
        for (name, v) in [
            ("sigma2_fue", sigma2_fue),
            ("sigma2_mue", sigma2_mue),
            ("sigma2_ofue", sigma2_ofue),
            ("varpi", varpi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SinrError::NonPositive { name, value: v });
            }
        }
        Ok(Self { sigma2_fue, sigma2_mue, sigma2_ofue, varpi })
    }
}

// (serving category, interferer class + category) per receiver tier.
fn tier_links(tier: Tier) -> (LinkCategory, [(TxClass, LinkCategory); 3]) {
    use LinkCategory::*;
    match tier {
        Tier::Fue => (FapToFue, [(TxClass::Ofap, OfapToFue), (TxClass::Mbs, MbsToFue), (TxClass::Fap, FapToFue)]),
        Tier::Mue => (MbsToMue, [(TxClass::Fap, FapToMue), (TxClass::Ofap, OfapToMue), (TxClass::Mbs, MbsToMue)]),
        Tier::Ofue => (OfapToOfue, [(TxClass::Mbs, MbsToOfue), (TxClass::Fap, FapToOfue), (TxClass::Ofap, OfapToOfue)]),
    }
}

fn same_class(tier: Tier, class: TxClass) -> bool {
    matches!(
        (tier, class),
        (Tier::Fue, TxClass::Fap) | (Tier::Mue, TxClass::Mbs) | (Tier::Ofue, TxClass::Ofap)
    )
}

/// Linear SINR of `receiver` in `tier` on frequency band `band`.
///
/// The numerator is the serving transmitter's power times its squared
/// gain; the denominator is the tier noise plus the summed received powers
/// of all other transmitters (cross-tier classes in full, the serving
/// class excluding the server). Returns 0 when the serving power is 0.
pub fn sinr(
    tier: Tier,
    receiver: usize,
    band: usize,
    realizations: &ChannelRealizations,
    allocation: &PowerAllocation,
    noise: &NoiseAndThreshold,
) -> Result<f64, SinrError> {
    let topo = realizations.topology();
    let n_rx = topo.receivers(tier);
    if receiver >= n_rx {
        return Err(SinrError::IndexOutOfRange { name: "receiver", value: receiver, limit: n_rx });
    }
    if band >= topo.n_bands {
        return Err(SinrError::IndexOutOfRange { name: "band", value: band, limit: topo.n_bands });
    }
    let n_serving = topo.serving_aps(tier);
    if n_serving == 0 {
        return Err(SinrError::IndexOutOfRange { name: "serving APs", value: 0, limit: 1 });
    }
    let server = receiver % n_serving;

    let (serving_category, interferers) = tier_links(tier);
    let serving_class = match tier {
        Tier::Fue => TxClass::Fap,
        Tier::Mue => TxClass::Mbs,
        Tier::Ofue => TxClass::Ofap,
    };
    let serving_power = allocation.power(serving_class, server, band);
    if serving_power == 0.0 {
        return Ok(0.0);
    }
    let signal = serving_power * realizations.power_gain(serving_category, server, receiver, band)?;

    let sigma2 = match tier {
        Tier::Fue => noise.sigma2_fue,
        Tier::Mue => noise.sigma2_mue,
        Tier::Ofue => noise.sigma2_ofue,
    };
    let mut denominator = sigma2;
    for (class, category) in interferers {
        let (n_tx, _) = topo.tx_rx_counts(category);
        for tx in 0..n_tx {
            if same_class(tier, class) && tx == server {
                continue;
            }
            let p = allocation.power(class, tx, band);
            if p > 0.0 {
                denominator += p * realizations.power_gain(category, tx, receiver, band)?;
            }
        }
    }
    Ok(signal / denominator)
}

/// Closed-form outage probability `1 - exp(-varpi / sinr)` under
/// unit-mean exponential (Rayleigh) fading around the mean SINR.
pub fn outage_probability(sinr_linear: f64, varpi: f64) -> Result<f64, SinrError> {
    if !(sinr_linear.is_finite() && sinr_linear > 0.0) {
        return Err(SinrError::NonPositive { name: "sinr_linear", value: sinr_linear });
    }
    if !(varpi.is_finite() && varpi > 0.0) {
        return Err(SinrError::NonPositive { name: "varpi", value: varpi });
    }
    Ok(1.0 - (-varpi / sinr_linear).exp())
}

/// Monte Carlo outage estimate: the fraction of unit-mean exponential
/// fading draws for which `mean_sinr * draw < varpi`.
pub fn empirical_outage<R: Rng + ?Sized>(
    mean_sinr: f64,
    varpi: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64, SinrError> {
    if trials == 0 {
        return Err(SinrError::IndexOutOfRange { name: "trials", value: 0, limit: 1 });
    }
    if !(mean_sinr.is_finite() && mean_sinr > 0.0) {
        return Err(SinrError::NonPositive { name: "mean_sinr", value: mean_sinr });
    }
    let mut outages = 0usize;
    for _ in 0..trials {
        let fade: f64 = Exp1.sample(rng);
        if mean_sinr * fade < varpi {
            outages += 1;
        }
    }
    Ok(outages as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    fn small_topology() -> Topology {
        Topology { n_mbs: 1, n_fap: 1, n_ofap: 1, n_mue: 2, n_fue: 2, n_ofue: 1, n_bands: 2 }
    }

    fn unit_gain_realizations(topology: Topology) -> ChannelRealizations {
        let mut r = ChannelRealizations::empty(topology);
        for category in LinkCategory::ALL {
            let (n_tx, n_rx) = topology.tx_rx_counts(category);
            for tx in 0..n_tx {
                for rx in 0..n_rx {
                    for band in 0..topology.n_bands {
                        r.set(category, tx, rx, band, Complex64::new(1.0, 0.0));
                    }
                }
            }
        }
        r
    }

    fn noise_all(v: f64) -> NoiseAndThreshold {
        NoiseAndThreshold::new(v, v, v, 1.0).unwrap()
    }

    #[test]
    fn nine_link_categories() {
        assert_eq!(LinkCategory::ALL.len(), 9);
    }

    #[test]
    fn noise_only_sinr() {
        let topo = small_topology();
        let real = unit_gain_realizations(topo);
        let alloc = PowerAllocation::new(
            vec![vec![0.0, 0.0]],
            vec![vec![1.0, 1.0]],
            vec![vec![0.0, 0.0]],
            10.0,
            10.0,
            10.0,
        )
        .unwrap();
        let s = sinr(Tier::Fue, 0, 0, &real, &alloc, &noise_all(1.0)).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_interferer_halves_sinr() {
        let topo = small_topology();
        let real = unit_gain_realizations(topo);
        let alloc = PowerAllocation::new(
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 1.0]],
            vec![vec![0.0, 0.0]],
            10.0,
            10.0,
            10.0,
        )
        .unwrap();
        let s = sinr(Tier::Fue, 0, 0, &real, &alloc, &noise_all(1.0)).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn summed_interference_terms() {
        // Server power 4, noise 1, interferers contributing 1 and 2.
        let topo = small_topology();
        let mut real = unit_gain_realizations(topo);
        real.set(LinkCategory::OfapToFue, 0, 0, 0, Complex64::new(2f64.sqrt(), 0.0));
        let alloc = PowerAllocation::new(
            vec![vec![1.0, 0.0]],
            vec![vec![4.0, 0.0]],
            vec![vec![1.0, 0.0]],
            10.0,
            10.0,
            10.0,
        )
        .unwrap();
        let s = sinr(Tier::Fue, 0, 0, &real, &alloc, &noise_all(1.0)).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "sinr {s}");
    }

    #[test]
    fn zero_serving_power_yields_zero() {
        let topo = small_topology();
        let real = unit_gain_realizations(topo);
        let alloc = PowerAllocation::new(
            vec![vec![1.0, 1.0]],
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0]],
            10.0,
            10.0,
            10.0,
        )
        .unwrap();
        assert_eq!(sinr(Tier::Fue, 0, 0, &real, &alloc, &noise_all(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn missing_realization_is_structural_error() {
        let topo = small_topology();
        let real = ChannelRealizations::empty(topo);
        let alloc = PowerAllocation::new(
            vec![vec![1.0, 1.0]],
            vec![vec![1.0, 1.0]],
            vec![vec![1.0, 1.0]],
            10.0,
            10.0,
            10.0,
        )
        .unwrap();
        assert!(matches!(
            sinr(Tier::Mue, 0, 0, &real, &alloc, &noise_all(1.0)),
            Err(SinrError::MissingRealization { .. })
        ));
    }

    #[test]
    fn interference_power_strictly_decreases_sinr() {
        let topo = small_topology();
        let real = unit_gain_realizations(topo);
        let noise = noise_all(0.1);
        let mut prev = f64::INFINITY;
        for p_interferer in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let alloc = PowerAllocation::new(
                vec![vec![p_interferer, 0.0]],
                vec![vec![1.0, 0.0]],
                vec![vec![0.0, 0.0]],
                10.0,
                10.0,
                10.0,
            )
            .unwrap();
            let s = sinr(Tier::Fue, 0, 0, &real, &alloc, &noise).unwrap();
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn all_tiers_reduce_to_snr_without_interferers() {
        let topo = small_topology();
        let real = unit_gain_realizations(topo);
        let noise = noise_all(0.25);
        for (tier, alloc) in [
            (
                Tier::Fue,
                PowerAllocation::new(vec![vec![0.0; 2]], vec![vec![2.0; 2]], vec![vec![0.0; 2]], 10.0, 10.0, 10.0).unwrap(),
            ),
            (
                Tier::Mue,
                PowerAllocation::new(vec![vec![2.0; 2]], vec![vec![0.0; 2]], vec![vec![0.0; 2]], 10.0, 10.0, 10.0).unwrap(),
            ),
            (
                Tier::Ofue,
                PowerAllocation::new(vec![vec![0.0; 2]], vec![vec![0.0; 2]], vec![vec![2.0; 2]], 10.0, 10.0, 10.0).unwrap(),
            ),
        ] {
            let s = sinr(tier, 0, 1, &real, &alloc, &noise).unwrap();
            assert!((s - 8.0).abs() < 1e-12, "{tier:?} sinr {s}");
        }
    }

    #[test]
    fn power_allocation_validation() {
        assert!(matches!(
            PowerAllocation::new(vec![vec![-1.0]], vec![], vec![], 10.0, 1.0, 1.0),
            Err(SinrError::BadPower { .. })
        ));
        assert!(matches!(
            PowerAllocation::new(vec![], vec![vec![2.0]], vec![], 10.0, 1.0, 1.0),
            Err(SinrError::BadPower { .. })
        ));
    }

    #[test]
    fn draws_are_deterministic_and_complete() {
        let topo = small_topology();
        let a = draw_realizations(topo, 1.0, &mut derive_rng(9, 0, 0)).unwrap();
        let b = draw_realizations(topo, 1.0, &mut derive_rng(9, 0, 0)).unwrap();
        for category in LinkCategory::ALL {
            let (n_tx, n_rx) = topo.tx_rx_counts(category);
            for tx in 0..n_tx {
                for rx in 0..n_rx {
                    for band in 0..topo.n_bands {
                        assert_eq!(
                            a.get(category, tx, rx, band).unwrap(),
                            b.get(category, tx, rx, band).unwrap()
                        );
                    }
                }
            }
        }
        // Empty classes produce empty associations.
        let empty = Topology { n_fap: 0, n_fue: 0, ..topo };
        let r = draw_realizations(empty, 1.0, &mut derive_rng(9, 0, 1)).unwrap();
        assert!(r.get(LinkCategory::FapToFue, 0, 0, 0).is_err());
    }

    #[test]
    fn squared_gain_mean_matches_fading_scale() {
        let topo = Topology { n_mbs: 1, n_fap: 0, n_ofap: 0, n_mue: 1, n_fue: 0, n_ofue: 0, n_bands: 1 };
        let mut rng = derive_rng(21, 0, 0);
        let n = 1_000_000usize;
        let mut sum = 0.0;
        for _ in 0..n {
            let r = draw_realizations(topo, 1.0, &mut rng).unwrap();
            sum += r.power_gain(LinkCategory::MbsToMue, 0, 0, 0).unwrap();
        }
        let mean = sum / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean squared gain {mean}");
    }

    #[test]
    fn outage_closed_form_reference_points() {
        let p = outage_probability(2.0, 2.0).unwrap();
        assert!((p - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let p = outage_probability(4.0, 2.0).unwrap();
        assert!((p - (1.0 - (-0.5f64).exp())).abs() < 1e-12);
        assert!(outage_probability(1e12, 1.0).unwrap() < 1e-11);
        assert!(outage_probability(0.0, 1.0).is_err());
        assert!(outage_probability(1.0, 0.0).is_err());
    }

    #[test]
    fn outage_monotone_and_bounded() {
        let mut prev = 1.0;
        for s in [0.1, 0.5, 1.0, 5.0, 25.0] {
            let p = outage_probability(s, 2.0).unwrap();
            assert!(p > 0.0 && p < 1.0);
            assert!(p < prev);
            prev = p;
        }
        let mut prev = 0.0;
        for varpi in [0.1, 0.5, 1.0, 5.0, 25.0] {
            let p = outage_probability(2.0, varpi).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn empirical_outage_matches_closed_form() {
        let mut rng = derive_rng(33, 0, 0);
        let trials = 200_000usize;
        for ratio in [0.5, 1.0, 2.0] {
            let mean_sinr = 2.0;
            let varpi = ratio * mean_sinr;
            let closed = outage_probability(mean_sinr, varpi).unwrap();
            let emp = empirical_outage(mean_sinr, varpi, trials, &mut rng).unwrap();
            let bound = 3.0 * (closed * (1.0 - closed) / trials as f64).sqrt();
            assert!((emp - closed).abs() < bound.max(1e-3), "ratio {ratio}: {emp} vs {closed}");
        }
    }

    #[test]
    fn empirical_outage_limits() {
        let mut rng = derive_rng(34, 0, 0);
        // Tiny threshold: outage never binds.
        let p = empirical_outage(1.0, 1e-12, 10_000, &mut rng).unwrap();
        assert!(p < 1e-3);
        // Vanishing mean SINR: certain outage.
        let p = empirical_outage(1e-12, 1.0, 10_000, &mut rng).unwrap();
        assert!(p > 0.999);
        assert!(empirical_outage(1.0, 1.0, 0, &mut rng).is_err());
    }
}
