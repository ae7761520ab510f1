//! Dynamic voice/data channel allocation with cross-borrowing.
//!
//! Voice channels live on the femto base station and data channels on the
//! optical access point. When one pool is full, a request may borrow an
//! unused channel from the other pool ("channel tunability"); borrowed
//! users migrate home on [`ChannelPool::rebalance`]. Lighting is active
//! exactly while at least one data user is served, so pure voice traffic
//! never pays for the optical front end.

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AllocError {
    #[error("user {0} is already served")]
    DuplicateUser(u64),
    #[error("user {0} is not served")]
    UnknownUser(u64),
    #[error("pool has no channels")]
    EmptyPool,
}

/// Traffic kind of a request: voice (femto pool) or data (optical pool).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficKind {
    Voice,
    Data,
}

impl TrafficKind {
    fn other(self) -> TrafficKind {
        match self {
            TrafficKind::Voice => TrafficKind::Data,
            TrafficKind::Data => TrafficKind::Voice,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TrafficKind::Voice => "voice",
            TrafficKind::Data => "data",
        }
    }
}

/// One allocation request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocationRequest {
    pub kind: TrafficKind,
    pub user: u64,
}

/// How a request was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    ServedNative,
    ServedBorrowed,
    Rejected,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::ServedNative => "served_native",
            Outcome::ServedBorrowed => "served_borrowed",
            Outcome::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Assignment {
    kind: TrafficKind,
    borrowed: bool,
}

/// Voice/data channel inventory with cross-borrowing state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPool {
    voice_total: u32,
    data_total: u32,
    borrowing_enabled: bool,
    voice_used: u32,
    data_used: u32,
    voice_borrowed_by_data: u32,
    data_borrowed_by_voice: u32,
    lighting_on: bool,
    rejected: u64,
    users: BTreeMap<u64, Assignment>,
}

impl ChannelPool {
    /// Pool with cross-borrowing enabled (the tunable scheme).
    pub fn new(voice_total: u32, data_total: u32) -> Self {
        Self::with_borrowing(voice_total, data_total, true)
    }

    /// Static partition baseline: requests never borrow.
    pub fn new_static(voice_total: u32, data_total: u32) -> Self {
        Self::with_borrowing(voice_total, data_total, false)
    }

    fn with_borrowing(voice_total: u32, data_total: u32, borrowing_enabled: bool) -> Self {
        Self {
            voice_total,
            data_total,
            borrowing_enabled,
            voice_used: 0,
            data_used: 0,
            voice_borrowed_by_data: 0,
            data_borrowed_by_voice: 0,
            lighting_on: false,
            rejected: 0,
            users: BTreeMap::new(),
        }
    }

    pub fn voice_used(&self) -> u32 {
        self.voice_used
    }

    pub fn data_used(&self) -> u32 {
        self.data_used
    }

    pub fn voice_borrowed_by_data(&self) -> u32 {
        self.voice_borrowed_by_data
    }

    pub fn data_borrowed_by_voice(&self) -> u32 {
        self.data_borrowed_by_voice
    }

    pub fn lighting_on(&self) -> bool {
        self.lighting_on
    }

    /// Requests rejected so far.
    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    /// Users currently served, native or borrowed, both kinds.
    pub fn served(&self) -> u32 {
        self.voice_used + self.data_borrowed_by_voice + self.data_used + self.voice_borrowed_by_data
    }

    fn occupancy(&self, kind: TrafficKind) -> (u32, u32) {
        match kind {
            TrafficKind::Voice => (self.voice_used + self.voice_borrowed_by_data, self.voice_total),
            TrafficKind::Data => (self.data_used + self.data_borrowed_by_voice, self.data_total),
        }
    }

    fn data_users_served(&self) -> u32 {
        self.data_used + self.voice_borrowed_by_data
    }

    fn refresh_lighting(&mut self) {
        self.lighting_on = self.data_users_served() > 0;
    }

    /// Serves a request from the native pool first, borrowing one unused
    /// channel from the other pool if the native one is full; rejects when
    /// neither pool has a free channel.
    pub fn request(&mut self, req: AllocationRequest) -> Result<Outcome, AllocError> {
        if self.users.contains_key(&req.user) {
            return Err(AllocError::DuplicateUser(req.user));
        }
        let (native_busy, native_total) = self.occupancy(req.kind);
        let outcome = if native_busy < native_total {
            match req.kind {
                TrafficKind::Voice => self.voice_used += 1,
                TrafficKind::Data => self.data_used += 1,
            }
            self.users.insert(req.user, Assignment { kind: req.kind, borrowed: false });
            Outcome::ServedNative
        } else {
            let (other_busy, other_total) = self.occupancy(req.kind.other());
            if self.borrowing_enabled && other_busy < other_total {
                match req.kind {
                    TrafficKind::Voice => self.data_borrowed_by_voice += 1,
                    TrafficKind::Data => self.voice_borrowed_by_data += 1,
                }
                self.users.insert(req.user, Assignment { kind: req.kind, borrowed: true });
                Outcome::ServedBorrowed
            } else {
                self.rejected += 1;
                Outcome::Rejected
            }
        };
        self.refresh_lighting();
        Ok(outcome)
    }

    /// Frees the exact channel the user holds; borrowed channels return to
    /// their home pool.
    pub fn release(&mut self, user: u64) -> Result<(), AllocError> {
        let assignment = self.users.remove(&user).ok_or(AllocError::UnknownUser(user))?;
        match (assignment.kind, assignment.borrowed) {
            (TrafficKind::Voice, false) => self.voice_used -= 1,
            (TrafficKind::Voice, true) => self.data_borrowed_by_voice -= 1,
            (TrafficKind::Data, false) => self.data_used -= 1,
            (TrafficKind::Data, true) => self.voice_borrowed_by_data -= 1,
        }
        self.refresh_lighting();
        Ok(())
    }

    /// Migrates borrowed users back to their native pool while native
    /// capacity is free. Idempotent; never displaces anyone.
    pub fn rebalance(&mut self) {
        let user_ids: Vec<u64> = self
            .users
            .iter()
            .filter(|(_, a)| a.borrowed)
            .map(|(id, _)| *id)
            .collect();
        for id in user_ids {
            let kind = self.users[&id].kind;
            let (native_busy, native_total) = self.occupancy(kind);
            if native_busy >= native_total {
                continue;
            }
            match kind {
                TrafficKind::Voice => {
                    self.data_borrowed_by_voice -= 1;
                    self.voice_used += 1;
                }
                TrafficKind::Data => {
                    self.voice_borrowed_by_data -= 1;
                    self.data_used += 1;
                }
            }
            self.users.insert(id, Assignment { kind, borrowed: false });
        }
        self.refresh_lighting();
    }

    /// Served users over total channels, in `[0, 1]`.
    pub fn utilization(&self) -> Result<f64, AllocError> {
        let total = self.voice_total + self.data_total;
        if total == 0 {
            return Err(AllocError::EmptyPool);
        }
        Ok(self.served() as f64 / total as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use rand::Rng;

    fn voice(user: u64) -> AllocationRequest {
        AllocationRequest { kind: TrafficKind::Voice, user }
    }

    fn data(user: u64) -> AllocationRequest {
        AllocationRequest { kind: TrafficKind::Data, user }
    }

    #[test]
    fn native_service_first() {
        let mut pool = ChannelPool::new(10, 10);
        for u in 0..4 {
            pool.request(voice(u)).unwrap();
        }
        assert_eq!(pool.request(voice(4)).unwrap(), Outcome::ServedNative);
        assert_eq!(pool.voice_used(), 5);
        assert_eq!(pool.data_borrowed_by_voice(), 0);
    }

    #[test]
    fn borrow_when_native_full() {
        let mut pool = ChannelPool::new(10, 10);
        for u in 0..10 {
            pool.request(voice(u)).unwrap();
        }
        for u in 10..17 {
            pool.request(data(u)).unwrap();
        }
        assert_eq!(pool.request(voice(100)).unwrap(), Outcome::ServedBorrowed);
        assert_eq!(pool.data_borrowed_by_voice(), 1);
        assert_eq!(pool.served(), 18);
    }

    #[test]
    fn reject_when_both_pools_full() {
        let mut pool = ChannelPool::new(2, 2);
        for u in 0..4 {
            pool.request(voice(u)).unwrap();
        }
        let before = pool.clone();
        assert_eq!(pool.request(voice(9)).unwrap(), Outcome::Rejected);
        assert_eq!(pool.served(), before.served());
        assert_eq!(pool.rejected(), 1);
    }

    #[test]
    fn static_partition_never_borrows() {
        let mut pool = ChannelPool::new_static(1, 1);
        pool.request(voice(0)).unwrap();
        assert_eq!(pool.request(voice(1)).unwrap(), Outcome::Rejected);
        assert_eq!(pool.data_borrowed_by_voice(), 0);
    }

    #[test]
    fn lighting_follows_data_users() {
        let mut pool = ChannelPool::new(2, 2);
        pool.request(voice(0)).unwrap();
        assert!(!pool.lighting_on());
        pool.request(data(1)).unwrap();
        assert!(pool.lighting_on());
        pool.release(1).unwrap();
        assert!(!pool.lighting_on());
        // A data user on a borrowed voice channel still needs lighting.
        let mut pool = ChannelPool::new(2, 1);
        pool.request(data(0)).unwrap();
        pool.request(data(1)).unwrap();
        assert_eq!(pool.voice_borrowed_by_data(), 1);
        pool.release(0).unwrap();
        assert!(pool.lighting_on());
    }

    #[test]
    fn release_restores_initial_state() {
        let pool0 = ChannelPool::new(3, 3);
        let mut pool = pool0.clone();
        pool.request(data(7)).unwrap();
        pool.release(7).unwrap();
        assert_eq!(pool, pool0);
        assert!(pool.release(7).is_err());
    }

    #[test]
    fn release_returns_borrowed_channel_home() {
        let mut pool = ChannelPool::new(1, 1);
        pool.request(voice(0)).unwrap();
        assert_eq!(pool.request(voice(1)).unwrap(), Outcome::ServedBorrowed);
        pool.release(1).unwrap();
        assert_eq!(pool.data_borrowed_by_voice(), 0);
        assert_eq!(pool.request(data(2)).unwrap(), Outcome::ServedNative);
    }

    #[test]
    fn duplicate_user_is_rejected_as_error() {
        let mut pool = ChannelPool::new(2, 2);
        pool.request(voice(0)).unwrap();
        assert_eq!(pool.request(voice(0)), Err(AllocError::DuplicateUser(0)));
    }

    #[test]
    fn rebalance_migrates_and_is_idempotent() {
        let mut pool = ChannelPool::new(2, 2);
        pool.request(voice(0)).unwrap();
        pool.request(voice(1)).unwrap();
        pool.request(voice(2)).unwrap();
        assert_eq!(pool.data_borrowed_by_voice(), 1);
        pool.release(0).unwrap();
        pool.rebalance();
        assert_eq!(pool.data_borrowed_by_voice(), 0);
        assert_eq!(pool.voice_used(), 2);
        let snapshot = pool.clone();
        pool.rebalance();
        assert_eq!(pool, snapshot);
    }

    #[test]
    fn utilization_reference_points() {
        // 12 voice users (2 on borrowed data channels) + 5 data users
        // over 10 + 10 channels.
        let mut pool = ChannelPool::new(10, 10);
        for u in 0..10 {
            pool.request(voice(u)).unwrap();
        }
        for u in 20..25 {
            pool.request(data(u)).unwrap();
        }
        pool.request(voice(30)).unwrap();
        pool.request(voice(31)).unwrap();
        assert_eq!(pool.data_borrowed_by_voice(), 2);
        assert!((pool.utilization().unwrap() - 0.85).abs() < 1e-12);

        assert_eq!(ChannelPool::new(4, 4).utilization().unwrap(), 0.0);
        let mut full = ChannelPool::new(1, 1);
        full.request(voice(0)).unwrap();
        full.request(data(1)).unwrap();
        assert_eq!(full.utilization().unwrap(), 1.0);
        assert!(ChannelPool::new(0, 0).utilization().is_err());
    }

    #[test]
    fn conservation_and_borrow_bounds_under_random_traffic() {
        let mut rng = derive_rng(55, 0, 0);
        for trial in 0..200 {
            let mut pool = ChannelPool::new(rng.random_range(1..8), rng.random_range(1..8));
            let mut next_user = 0u64;
            let mut active: Vec<u64> = Vec::new();
            for _ in 0..120 {
                if !active.is_empty() && rng.random_bool(0.4) {
                    let idx = rng.random_range(0..active.len());
                    let user = active.swap_remove(idx);
                    pool.release(user).unwrap();
                } else {
                    let kind = if rng.random_bool(0.5) { TrafficKind::Voice } else { TrafficKind::Data };
                    let user = next_user;
                    next_user += 1;
                    if pool.request(AllocationRequest { kind, user }).unwrap() != Outcome::Rejected {
                        active.push(user);
                    }
                }
                if rng.random_bool(0.3) {
                    pool.rebalance();
                }
                // Per-pool conservation.
                assert!(pool.voice_used() + pool.voice_borrowed_by_data() <= pool.voice_total);
                assert!(pool.data_used() + pool.data_borrowed_by_voice() <= pool.data_total);
                assert_eq!(pool.served() as usize, active.len(), "trial {trial}");
                assert_eq!(pool.lighting_on(), pool.data_used() + pool.voice_borrowed_by_data() > 0);
            }
        }
    }

    #[test]
    fn final_counts_insensitive_to_request_order_without_rejections() {
        let mut rng = derive_rng(56, 0, 0);
        for _ in 0..50 {
            let voice_n = rng.random_range(0..5u64);
            let data_n = rng.random_range(0..5u64);
            let mut requests: Vec<AllocationRequest> = (0..voice_n)
                .map(voice)
                .chain((100..100 + data_n).map(data))
                .collect();
            let serve = |reqs: &[AllocationRequest]| {
                let mut pool = ChannelPool::new(8, 8);
                for r in reqs {
                    assert_ne!(pool.request(*r).unwrap(), Outcome::Rejected);
                }
                (
                    pool.voice_used(),
                    pool.data_used(),
                    pool.voice_borrowed_by_data(),
                    pool.data_borrowed_by_voice(),
                )
            };
            let forward = serve(&requests);
            requests.reverse();
            let backward = serve(&requests);
            assert_eq!(forward, backward);
        }
    }
}
