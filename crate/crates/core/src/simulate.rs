//! Event-driven simulation through the graphical construction.
//!
//! Every site owns a rate-one Poisson clock and a sequence of Bernoulli(p)
//! coins, both drawn from the site's own stream. A ring is legal when the
//! right neighbour is empty (or the site is the last one, next to the frozen
//! zero) and a legal ring sets the site to its coin.
//!
//! [`Mode::Faithful`] processes every ring. [`Mode::RejectionFree`] drops the
//! rings that change nothing: an unconstrained occupied site empties at rate
//! `q`, an unconstrained empty site fills at rate `p`, and the pending flip of
//! a site whose right neighbour gets filled is discarded. The two modes have
//! the same law; only Faithful keeps the ring-by-ring coupling between runs
//! that share a seed.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sample_equilibrium, Boundary, Configuration, Interval, ModelParams};
use crate::rng::{Purpose, StreamSeed};
use crate::runner::ReplicaRunner;
use crate::stats::EstimateCI;

/// Largest horizon accepted by the scheduler.
pub const MAX_HORIZON: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Mode {
    Faithful,
    #[default]
    RejectionFree,
}

/// One processed clock ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingEvent {
    pub time: f64,
    pub site: i64,
    /// Coin value, `true` meaning occupied.
    pub coin: bool,
    pub legal: bool,
    /// Whether the ring changed the occupancy.
    pub changed: bool,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    site: u32,
    generation: u32,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // reversed so that the max-heap pops the earliest ring, ties by lower site
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.site.cmp(&self.site))
    }
}

/// Mutable simulation state for one replica.
pub struct Engine {
    window: Interval,
    boundary: Boundary,
    occ: Vec<bool>,
    p: f64,
    q: f64,
    mode: Mode,
    time: f64,
    heap: BinaryHeap<Pending>,
    generation: Vec<u32>,
    live: Vec<bool>,
    clocks: Vec<ChaCha8Rng>,
}

impl Engine {
    pub fn new(initial: &Configuration, params: &ModelParams, seed: StreamSeed, mode: Mode) -> Self {
        let window = initial.window();
        let len = window.len();
        let occ: Vec<bool> = initial.occupancy().into_iter().map(|v| v == 1).collect();
        let clocks: Vec<ChaCha8Rng> = window
            .sites()
            .map(|x| seed.site_rng(Purpose::Dynamics, x))
            .collect();
        let mut engine = Self {
            window,
            boundary: initial.boundary(),
            occ,
            p: params.p(),
            q: params.q(),
            mode,
            time: 0.0,
            heap: BinaryHeap::with_capacity(len + 1),
            generation: vec![0; len],
            live: vec![false; len],
            clocks,
        };
        for i in 0..len {
            if mode == Mode::Faithful || engine.legal(i) {
                engine.schedule(i);
            }
        }
        engine
    }

    fn legal(&self, i: usize) -> bool {
        i + 1 == self.occ.len() || !self.occ[i + 1]
    }

    fn schedule(&mut self, i: usize) {
        let mut dt: f64 = Exp1.sample(&mut self.clocks[i]);
        if self.mode == Mode::RejectionFree {
            dt /= if self.occ[i] { self.q } else { self.p };
        }
        self.live[i] = true;
        self.heap.push(Pending {
            time: self.time + dt,
            site: i as u32,
            generation: self.generation[i],
        });
    }

    fn cancel(&mut self, i: usize) {
        if self.live[i] {
            self.live[i] = false;
            self.generation[i] = self.generation[i].wrapping_add(1);
        }
    }

    fn discard_stale(&mut self) {
        while let Some(top) = self.heap.peek() {
            let i = top.site as usize;
            if top.generation == self.generation[i] && self.live[i] {
                break;
            }
            self.heap.pop();
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    /// Occupancy indexed by `x - a`.
    pub fn state(&self) -> &[bool] {
        &self.occ
    }

    pub fn occupied(&self, x: i64) -> bool {
        self.occ[(x - self.window.a()) as usize]
    }

    pub fn configuration(&self) -> Configuration {
        let a = self.window.a();
        Configuration::from_fn(self.window, self.boundary, |x| self.occ[(x - a) as usize])
    }

    /// Time of the next ring that [`Engine::step`] would process.
    pub fn next_time(&mut self) -> Option<f64> {
        self.discard_stale();
        self.heap.peek().map(|e| e.time)
    }

    /// Process the next ring and advance the clock to its time.
    pub fn step(&mut self) -> Option<RingEvent> {
        self.discard_stale();
        let ev = self.heap.pop()?;
        let i = ev.site as usize;
        self.time = ev.time;
        self.live[i] = false;
        let legal = self.legal(i);
        let coin = match self.mode {
            Mode::Faithful => self.clocks[i].random_bool(self.p),
            Mode::RejectionFree => !self.occ[i],
        };
        let changed = legal && self.occ[i] != coin;
        if legal {
            self.occ[i] = coin;
        }
        // the site's own flip never changes its own constraint
        if self.mode == Mode::Faithful || legal {
            self.schedule(i);
        }
        if changed && self.mode == Mode::RejectionFree && i > 0 {
            if coin {
                self.cancel(i - 1);
            } else {
                self.schedule(i - 1);
            }
        }
        Some(RingEvent {
            time: ev.time,
            site: self.window.a() + i as i64,
            coin,
            legal,
            changed,
        })
    }

    /// Process every ring up to `t` inclusive, then set the clock to `t`.
    pub fn advance_to(&mut self, t: f64, mut on_event: impl FnMut(&RingEvent, &[bool])) {
        while let Some(next) = self.next_time() {
            if next > t {
                break;
            }
            let ev = self.step().unwrap();
            on_event(&ev, &self.occ);
        }
        if t > self.time {
            self.time = t;
        }
    }
}

/// What to record along a trajectory.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Probes {
    /// Nondecreasing times in `[0, horizon]`.
    pub sample_times: Vec<f64>,
    /// Sites whose occupancy, flip count and persistence are recorded.
    pub sites: Vec<i64>,
    /// Store the whole configuration at every sample time.
    pub snapshots: bool,
    /// Record the first and second zero at or right of the window start.
    pub zeros: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub sample_times: Vec<f64>,
    pub sites: Vec<i64>,
    /// `occupation[k][j]`: occupancy of `sites[j]` at `sample_times[k]`.
    pub occupation: Vec<Vec<bool>>,
    /// Number of changes at `sites[j]` up to `sample_times[k]`.
    pub flips: Vec<Vec<u64>>,
    /// Whether `sites[j]` kept its initial value on `[0, sample_times[k]]`.
    pub persistent: Vec<Vec<bool>>,
    /// Number of changes in the whole window up to each sample time.
    pub total_flips: Vec<u64>,
    #[serde(skip)]
    pub snapshots: Vec<Configuration>,
    pub first_zero: Vec<Option<i64>>,
    pub second_zero: Vec<Option<i64>>,
    pub hitting_time: Option<f64>,
    #[serde(skip)]
    pub final_state: Option<Configuration>,
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon <= MAX_HORIZON) {
        return Err(Error::OutOfRange {
            name: "horizon",
            value: horizon,
            expected: "(0, 2^53]",
        });
    }
    Ok(())
}

fn check_probes(window: Interval, horizon: f64, probes: &Probes) -> Result<()> {
    for &x in &probes.sites {
        window.check(x)?;
    }
    let mut last = 0.0;
    for &t in &probes.sample_times {
        if !(t >= last && t <= horizon) {
            return Err(Error::Precondition(format!(
                "sample times must be nondecreasing in [0, {horizon}], got {t}"
            )));
        }
        last = t;
    }
    Ok(())
}

fn two_zeros(occ: &[bool], a: i64) -> (Option<i64>, Option<i64>) {
    let mut it = occ.iter().enumerate().filter(|(_, &o)| !o).map(|(i, _)| a + i as i64);
    (it.next(), it.next())
}

/// Run one trajectory to `horizon`, recording `probes`.
pub fn run_graphical(
    initial: &Configuration,
    params: &ModelParams,
    horizon: f64,
    probes: &Probes,
    seed: StreamSeed,
    mode: Mode,
) -> Result<TrajectoryStats> {
    run_with_target(initial, params, horizon, probes, seed, mode, |_: &[bool]| false)
}

/// Like [`run_graphical`], also recording the first time the state satisfies `target`.
pub fn run_with_target(
    initial: &Configuration,
    params: &ModelParams,
    horizon: f64,
    probes: &Probes,
    seed: StreamSeed,
    mode: Mode,
    target: impl Fn(&[bool]) -> bool,
) -> Result<TrajectoryStats> {
    check_horizon(horizon)?;
    let window = initial.window();
    check_probes(window, horizon, probes)?;
    let a = window.a();
    let mut engine = Engine::new(initial, params, seed, mode);
    let idx: Vec<usize> = probes.sites.iter().map(|&x| (x - a) as usize).collect();
    let mut site_flips = vec![0u64; window.len()];
    let mut total = 0u64;
    let mut hit = target(engine.state()).then_some(0.0);

    let n = probes.sample_times.len();
    let mut stats = TrajectoryStats {
        sample_times: probes.sample_times.clone(),
        sites: probes.sites.clone(),
        occupation: Vec::with_capacity(n),
        flips: Vec::with_capacity(n),
        persistent: Vec::with_capacity(n),
        total_flips: Vec::with_capacity(n),
        snapshots: Vec::new(),
        first_zero: Vec::new(),
        second_zero: Vec::new(),
        hitting_time: None,
        final_state: None,
    };

    let record = |engine: &Engine, flips: &[u64], total: u64, stats: &mut TrajectoryStats| {
        let occ = engine.state();
        stats.occupation.push(idx.iter().map(|&i| occ[i]).collect());
        stats.flips.push(idx.iter().map(|&i| flips[i]).collect());
        stats.persistent.push(idx.iter().map(|&i| flips[i] == 0).collect());
        stats.total_flips.push(total);
        if probes.snapshots {
            stats.snapshots.push(engine.configuration());
        }
        if probes.zeros {
            let (z0, z1) = two_zeros(occ, a);
            stats.first_zero.push(z0);
            stats.second_zero.push(z1);
        }
    };

    for &t in probes.sample_times.iter().chain(core::iter::once(&horizon)) {
        engine.advance_to(t, |ev, occ| {
            if ev.changed {
                site_flips[(ev.site - a) as usize] += 1;
                total += 1;
                if hit.is_none() && target(occ) {
                    hit = Some(ev.time);
                }
            }
        });
        if stats.occupation.len() < n {
            record(&engine, &site_flips, total, &mut stats);
        }
    }
    stats.hitting_time = hit;
    stats.final_state = Some(engine.configuration());
    Ok(stats)
}

/// Positions of a tagged zero that moves one step right at every legal ring at its site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedZeroPath {
    pub start_site: i64,
    /// `(time, new position)`, positions increasing by one.
    pub jumps: Vec<(f64, i64)>,
}

impl DistinguishedZeroPath {
    /// Right-continuous position at time `t`.
    pub fn position_at(&self, t: f64) -> i64 {
        let k = self.jumps.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.start_site
        } else {
            self.jumps[k - 1].1
        }
    }
}

/// Run a trajectory while tracking the distinguished zero started at `start_site`.
///
/// Once the zero reaches `b + 1` it sits on the frozen boundary for good.
pub fn track_distinguished(
    initial: &Configuration,
    start_site: i64,
    params: &ModelParams,
    horizon: f64,
    probes: &Probes,
    seed: StreamSeed,
    mode: Mode,
) -> Result<(TrajectoryStats, DistinguishedZeroPath)> {
    check_horizon(horizon)?;
    let window = initial.window();
    check_probes(window, horizon, probes)?;
    if initial.get(start_site)? {
        return Err(Error::Precondition(format!(
            "distinguished site {start_site} is occupied"
        )));
    }
    let a = window.a();
    let b = window.b();
    let mut engine = Engine::new(initial, params, seed, mode);
    let mut path = DistinguishedZeroPath {
        start_site,
        jumps: Vec::new(),
    };
    let mut xi = start_site;
    let mut broken: Option<f64> = None;
    let idx: Vec<usize> = probes.sites.iter().map(|&x| (x - a) as usize).collect();
    let mut site_flips = vec![0u64; window.len()];
    let mut total = 0u64;
    let mut stats = TrajectoryStats {
        sample_times: probes.sample_times.clone(),
        sites: probes.sites.clone(),
        occupation: Vec::new(),
        flips: Vec::new(),
        persistent: Vec::new(),
        total_flips: Vec::new(),
        snapshots: Vec::new(),
        first_zero: Vec::new(),
        second_zero: Vec::new(),
        hitting_time: None,
        final_state: None,
    };
    let n = probes.sample_times.len();
    // RejectionFree hides the legal rings that leave ξ empty; they come at rate q
    let mut silent = seed.rng(Purpose::Auxiliary);
    let q = params.q();
    let mut now = 0.0;
    for &t in probes.sample_times.iter().chain(core::iter::once(&horizon)) {
        loop {
            let next = engine.next_time().unwrap_or(f64::INFINITY);
            if mode == Mode::RejectionFree && xi <= b && (xi == b || !engine.occupied(xi + 1)) {
                let e: f64 = Exp1.sample(&mut silent);
                let tau = now + e / q;
                if tau < next && tau <= t {
                    now = tau;
                    xi += 1;
                    path.jumps.push((tau, xi));
                    continue;
                }
            }
            if next > t {
                break;
            }
            let ev = engine.step().unwrap();
            now = ev.time;
            if ev.changed {
                site_flips[(ev.site - a) as usize] += 1;
                total += 1;
            }
            if ev.legal && ev.site == xi {
                xi += 1;
                path.jumps.push((ev.time, xi));
            }
            if xi <= b && engine.occupied(xi) && broken.is_none() {
                broken = Some(ev.time);
            }
        }
        engine.advance_to(t, |_, _| {});
        now = t;
        if stats.occupation.len() < n {
            let occ = engine.state();
            stats.occupation.push(idx.iter().map(|&i| occ[i]).collect());
            stats.flips.push(idx.iter().map(|&i| site_flips[i]).collect());
            stats.persistent.push(idx.iter().map(|&i| site_flips[i] == 0).collect());
            stats.total_flips.push(total);
            if probes.snapshots {
                stats.snapshots.push(engine.configuration());
            }
            if probes.zeros {
                let (z0, z1) = two_zeros(occ, a);
                stats.first_zero.push(z0);
                stats.second_zero.push(z1);
            }
        }
    }
    if let Some(t) = broken {
        return Err(Error::Inconsistent(format!(
            "distinguished zero found occupied at time {t}"
        )));
    }
    stats.final_state = Some(engine.configuration());
    Ok((stats, path))
}

/// Persistence of the leftmost site from equilibrium.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceCurve {
    pub times: Vec<f64>,
    pub f: Vec<EstimateCI>,
    /// Contribution of trajectories starting occupied.
    pub f1: Vec<EstimateCI>,
    /// Contribution of trajectories starting empty.
    pub f0: Vec<EstimateCI>,
}

/// `F̂(t)`: fraction of equilibrium trajectories on `[0, len - 1]` whose site 0 never changed.
#[allow(clippy::too_many_arguments)]
pub fn measure_persistence<R: ReplicaRunner>(
    params: &ModelParams,
    len: usize,
    horizon: f64,
    grid: &[f64],
    replicas: u64,
    seed: u64,
    mode: Mode,
    runner: &R,
) -> Result<PersistenceCurve> {
    check_horizon(horizon)?;
    let window = Interval::from_len(len)?;
    check_probes(window, horizon, &Probes {
        sample_times: grid.to_vec(),
        ..Probes::default()
    })?;
    // per replica: (initial value, first change time)
    let runs: Vec<(bool, f64)> = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = sample_equilibrium(params, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial));
        let start = init.get(0).unwrap();
        let mut engine = Engine::new(&init, params, s, mode);
        let mut first = f64::INFINITY;
        while let Some(ev) = engine.step() {
            if ev.time > horizon {
                break;
            }
            if ev.changed && ev.site == 0 {
                first = ev.time;
                break;
            }
        }
        (start, first)
    });
    let curve = |pick: &dyn Fn(bool) -> bool, t: f64| {
        let xs: Vec<f64> = runs
            .iter()
            .map(|&(s, first)| (pick(s) && first > t) as u8 as f64)
            .collect();
        EstimateCI::from_samples(&xs)
    };
    Ok(PersistenceCurve {
        times: grid.to_vec(),
        f: grid.iter().map(|&t| curve(&|_| true, t)).collect(),
        f1: grid.iter().map(|&t| curve(&|s| s, t)).collect(),
        f0: grid.iter().map(|&t| curve(&|s| !s, t)).collect(),
    })
}

/// Activity of an equilibrium window of `n` sites with a frozen zero on the right.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActivityEstimate {
    /// `𝒜(t) / (N t)` over the whole window.
    pub total_rate: EstimateCI,
    /// Changes per site per time over the `N - 1` constrained sites.
    pub bulk_rate: EstimateCI,
    /// Stationary value of `total_rate`: `((N - 1) 2pq² + 2pq) / N`.
    pub exact_total_rate: f64,
    /// `2pq²`.
    pub bulk_expected: f64,
}

pub fn stationary_activity(params: &ModelParams, n: usize) -> (f64, f64) {
    let (p, q) = (params.p(), params.q());
    let bulk = 2.0 * p * q * q;
    (((n - 1) as f64 * bulk + 2.0 * p * q) / n as f64, bulk)
}

pub fn measure_activity<R: ReplicaRunner>(
    params: &ModelParams,
    n: usize,
    horizon: f64,
    replicas: u64,
    seed: u64,
    runner: &R,
) -> Result<ActivityEstimate> {
    check_horizon(horizon)?;
    if n < 2 {
        return Err(Error::UnsupportedSize {
            got: n,
            min: 2,
            max: usize::MAX,
        });
    }
    let window = Interval::from_len(n)?;
    let last = window.b();
    let counts: Vec<(u64, u64)> = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = sample_equilibrium(params, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial));
        let mut engine = Engine::new(&init, params, s, Mode::RejectionFree);
        let (mut all, mut edge) = (0u64, 0u64);
        engine.advance_to(horizon, |ev, _| {
            if ev.changed {
                all += 1;
                edge += (ev.site == last) as u64;
            }
        });
        (all, all - edge)
    });
    let total: Vec<f64> = counts.iter().map(|&(a, _)| a as f64 / (n as f64 * horizon)).collect();
    let bulk: Vec<f64> = counts
        .iter()
        .map(|&(_, b)| b as f64 / ((n - 1) as f64 * horizon))
        .collect();
    let (exact_total_rate, bulk_expected) = stationary_activity(params, n);
    Ok(ActivityEstimate {
        total_rate: EstimateCI::from_samples(&total),
        bulk_rate: EstimateCI::from_samples(&bulk),
        exact_total_rate,
        bulk_expected,
    })
}

/// Hitting times of a target set, `None` when censored at the horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HittingSample {
    pub horizon: f64,
    pub times: Vec<Option<f64>>,
}

impl HittingSample {
    pub fn censored(&self) -> usize {
        self.times.iter().filter(|t| t.is_none()).count()
    }

    /// Empirical `P(τ > t)` for `t` up to the horizon.
    pub fn survival(&self, t: f64) -> EstimateCI {
        let xs: Vec<f64> = self
            .times
            .iter()
            .map(|h| h.is_none_or(|h| h > t) as u8 as f64)
            .collect();
        EstimateCI::from_samples(&xs)
    }
}

/// First entrance into `target` for replicas started from `initial(replica rng)`.
#[allow(clippy::too_many_arguments)]
pub fn hitting_time<R, I, A>(
    initial: I,
    params: &ModelParams,
    target: A,
    horizon: f64,
    replicas: u64,
    seed: u64,
    mode: Mode,
    runner: &R,
) -> Result<HittingSample>
where
    R: ReplicaRunner,
    I: Fn(&mut ChaCha8Rng) -> Configuration + Sync + Send,
    A: Fn(&[bool]) -> bool + Sync + Send,
{
    check_horizon(horizon)?;
    let times = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = initial(&mut s.rng(Purpose::Initial));
        let mut engine = Engine::new(&init, params, s, mode);
        if target(engine.state()) {
            return Some(0.0);
        }
        while let Some(ev) = engine.step() {
            if ev.time > horizon {
                return None;
            }
            if ev.changed && target(engine.state()) {
                return Some(ev.time);
            }
        }
        None
    });
    Ok(HittingSample { horizon, times })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::Sequential;
    use proptest::prelude::*;

    fn params(q: f64) -> ModelParams {
        ModelParams::new(q).unwrap()
    }

    #[test]
    fn first_flip_from_full_is_last_site() {
        let w = Interval::from_len(8).unwrap();
        let init = Configuration::filled(w, Boundary::FrozenZeroRight);
        for mode in [Mode::Faithful, Mode::RejectionFree] {
            for r in 0..50 {
                let mut e = Engine::new(&init, &params(0.4), StreamSeed::new(1, r), mode);
                let first = core::iter::from_fn(|| e.step()).find(|ev| ev.changed).unwrap();
                assert_eq!(first.site, 7);
            }
        }
    }

    #[test]
    fn rejects_bad_horizon_and_probes() {
        let w = Interval::from_len(4).unwrap();
        let init = Configuration::filled(w, Boundary::FrozenZeroRight);
        let pr = Probes::default();
        assert!(run_graphical(&init, &params(0.5), 0.0, &pr, StreamSeed::new(0, 0), Mode::Faithful).is_err());
        assert!(run_graphical(&init, &params(0.5), f64::NAN, &pr, StreamSeed::new(0, 0), Mode::Faithful).is_err());
        let bad = Probes {
            sites: vec![4],
            ..Probes::default()
        };
        assert!(run_graphical(&init, &params(0.5), 1.0, &bad, StreamSeed::new(0, 0), Mode::Faithful).is_err());
    }

    #[test]
    fn single_site_relaxation() {
        // two-state chain: P(empty at t | occupied at 0) = q (1 - e^{-t})
        let w = Interval::from_len(1).unwrap();
        let init = Configuration::filled(w, Boundary::FrozenZeroRight);
        let pr = Probes {
            sample_times: vec![1.0],
            sites: vec![0],
            ..Probes::default()
        };
        let n = 40_000;
        let xs: Vec<f64> = (0..n)
            .map(|r| {
                let s = run_graphical(&init, &params(0.5), 1.0, &pr, StreamSeed::new(3, r), Mode::Faithful).unwrap();
                (!s.occupation[0][0]) as u8 as f64
            })
            .collect();
        let e = EstimateCI::from_samples(&xs);
        let expected = 0.5 * (1.0 - (-1.0f64).exp());
        assert!((expected - 0.31606).abs() < 1e-4);
        assert!(e.agrees_with(expected, 3.0, 0.0), "{e:?}");
    }

    #[test]
    fn distinguished_zero_waits_for_first_legal_ring() {
        let w = Interval::from_len(6).unwrap();
        let init = Configuration::from_zeros(w, Boundary::EmbeddedInZ, &[2]).unwrap();
        let (_, path) = track_distinguished(&init, 2, &params(0.3), 1e-9, &Probes::default(), StreamSeed::new(0, 0), Mode::Faithful).unwrap();
        assert!(path.jumps.is_empty());
        assert_eq!(path.position_at(1e-9), 2);
        let occupied = Configuration::filled(w, Boundary::EmbeddedInZ);
        assert!(track_distinguished(&occupied, 2, &params(0.3), 1.0, &Probes::default(), StreamSeed::new(0, 0), Mode::Faithful).is_err());
    }

    #[test]
    fn hitting_whole_space_is_immediate() {
        let w = Interval::from_len(5).unwrap();
        let p = params(0.5);
        let h = hitting_time(
            |rng| sample_equilibrium(&p, w, Boundary::FrozenZeroRight, rng),
            &p,
            |_| true,
            10.0,
            20,
            0,
            Mode::RejectionFree,
            &Sequential,
        )
        .unwrap();
        assert!(h.times.iter().all(|t| *t == Some(0.0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn trajectory_monotone_invariants(
            len in 1usize..24,
            q in 0.05f64..0.95,
            seed in any::<u64>(),
            faithful in any::<bool>(),
        ) {
            let w = Interval::from_len(len).unwrap();
            let p = params(q);
            let init = sample_equilibrium(&p, w, Boundary::FrozenZeroRight, &mut StreamSeed::new(seed, 0).rng(Purpose::Initial));
            let mode = if faithful { Mode::Faithful } else { Mode::RejectionFree };
            let probes = Probes {
                sample_times: (0..20).map(|k| k as f64 * 0.5).collect(),
                sites: (0..len as i64).collect(),
                snapshots: false,
                zeros: true,
            };
            let s = run_graphical(&init, &p, 10.0, &probes, StreamSeed::new(seed, 1), mode).unwrap();
            for k in 1..s.sample_times.len() {
                prop_assert!(s.total_flips[k] >= s.total_flips[k - 1]);
                for j in 0..len {
                    prop_assert!(s.flips[k][j] >= s.flips[k - 1][j]);
                    prop_assert!(!(s.persistent[k][j] && !s.persistent[k - 1][j]));
                }
            }
            for k in 0..s.sample_times.len() {
                if let (Some(a), Some(b)) = (s.first_zero[k], s.second_zero[k]) {
                    prop_assert!(a < b);
                }
            }
        }

        #[test]
        fn ring_times_increase_per_site(len in 1usize..12, seed in any::<u64>(), faithful in any::<bool>()) {
            let w = Interval::from_len(len).unwrap();
            let p = params(0.3);
            let init = Configuration::filled(w, Boundary::FrozenZeroRight);
            let mode = if faithful { Mode::Faithful } else { Mode::RejectionFree };
            let mut e = Engine::new(&init, &p, StreamSeed::new(seed, 0), mode);
            let mut last = vec![-1.0f64; len];
            let mut prev = 0.0;
            for _ in 0..500 {
                let ev = e.step().unwrap();
                prop_assert!(ev.time >= prev);
                prop_assert!(ev.time > last[ev.site as usize]);
                if mode == Mode::RejectionFree {
                    prop_assert!(ev.legal);
                }
                last[ev.site as usize] = ev.time;
                prev = ev.time;
            }
        }
    }
}
