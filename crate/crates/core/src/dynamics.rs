//! Decentralized evolution of a configuration through peer initiatives,
//! with optional peer removal and continuous churn.

use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::Seed;
use crate::model::{Configuration, Instance};
use crate::solver::{stable_configuration, Initiative};
use crate::stability::{acceptance_threshold, distance_among, wants};

/// How a peer scans its acceptance list when taking an initiative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Pick the best blocking mate, using full knowledge of the system.
    BestMate,
    /// Scan the list circularly from the last asked peer, stopping at the
    /// first blocking mate.
    Decremental,
    /// Ask a single acceptable peer chosen uniformly.
    Random,
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best_mate" | "best-mate" | "best" => Ok(StrategyKind::BestMate),
            "decremental" => Ok(StrategyKind::Decremental),
            "random" => Ok(StrategyKind::Random),
            other => Err(Error::param(
                "strategy",
                format!("unknown strategy `{other}`"),
            )),
        }
    }
}

/// Strategy plus the per-peer state it needs. The decremental cursor is a
/// position in the peer's acceptance list and persists across initiatives.
#[derive(Clone, Debug)]
pub struct InitiativeStrategy {
    kind: StrategyKind,
    cursors: Vec<usize>,
}

impl InitiativeStrategy {
    pub fn new(kind: StrategyKind, n: usize) -> Self {
        InitiativeStrategy {
            kind,
            cursors: vec![0; n],
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn cursor(&self, p: usize) -> usize {
        self.cursors[p]
    }

    fn insert_peer(&mut self, at: usize) {
        self.cursors.insert(at, 0);
    }
}

#[inline]
fn is_blocking_mate(config: &Configuration, instance: &Instance, p: usize, q: usize) -> bool {
    !config.are_mates(p, q) && wants(config, instance, p, q) && wants(config, instance, q, p)
}

/// Forms the pair `(p, q)`; each side at capacity first drops its worst mate.
fn form_pair(config: &mut Configuration, instance: &Instance, p: usize, q: usize) {
    for x in [p, q] {
        if config.degree(x) >= instance.caps().get(x) {
            let worst = config.worst_mate(x).expect("full peer has a mate");
            config.disconnect(x, worst);
        }
    }
    config.connect(p, q);
}

/// Peer `p` proposes according to `strategy`. Returns the new mate when the
/// initiative is active; otherwise `config` is left untouched.
pub fn take_initiative<R: Rng + ?Sized>(
    config: &mut Configuration,
    instance: &Instance,
    p: usize,
    strategy: &mut InitiativeStrategy,
    rng: &mut R,
) -> Result<Option<usize>> {
    instance.check_peer(p)?;
    let graph = instance.graph();
    let mate = match strategy.kind {
        StrategyKind::BestMate => {
            let thr = acceptance_threshold(config, instance, p);
            graph
                .neighbors(p)
                .take_while(|&q| q < thr)
                .find(|&q| is_blocking_mate(config, instance, p, q))
        }
        StrategyKind::Random => {
            let deg = graph.degree(p);
            if deg == 0 {
                None
            } else {
                let q = graph.neighbor_at(p, rng.random_range(0..deg));
                is_blocking_mate(config, instance, p, q).then_some(q)
            }
        }
        StrategyKind::Decremental => {
            let deg = graph.degree(p);
            if deg == 0 {
                None
            } else {
                let start = strategy.cursors[p] % deg;
                strategy.cursors[p] = start;
                (0..deg).map(|t| (start + t) % deg).find_map(|k| {
                    let q = graph.neighbor_at(p, k);
                    is_blocking_mate(config, instance, p, q).then(|| {
                        strategy.cursors[p] = k;
                        q
                    })
                })
            }
        }
    };
    if let Some(q) = mate {
        form_pair(config, instance, p, q);
    }
    Ok(mate)
}

/// Applies the schedule as best-mate initiatives of each proposer, starting
/// from the empty configuration. Returns the final configuration and the
/// number of active initiatives.
pub fn replay_schedule(
    instance: &Instance,
    schedule: &[Initiative],
) -> Result<(Configuration, usize)> {
    let mut config = Configuration::empty(instance.n());
    let mut strategy = InitiativeStrategy::new(StrategyKind::BestMate, instance.n());
    // best-mate initiatives draw no randomness
    let mut rng = Seed(0).rng();
    let mut active = 0;
    for init in schedule {
        let got = take_initiative(
            &mut config,
            instance,
            init.proposer,
            &mut strategy,
            &mut rng,
        )?;
        match got {
            Some(q) if q == init.target => active += 1,
            other => {
                return Err(Error::Inconsistent(format!(
                    "initiative of {} reached {:?}, scheduled {}",
                    init.proposer, other, init.target
                )))
            }
        }
    }
    Ok((config, active))
}

/// Arrival/departure process. `rate` is the expected number of events per
/// base unit; each event is an arrival or a departure with equal odds.
/// Arrivals take a uniform random rank position and connect to each present
/// peer with probability `expected_degree / population`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChurnSpec {
    pub rate: f64,
    pub expected_degree: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub strategy: StrategyKind,
    pub max_units: usize,
    pub seed: Seed,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strategy: StrategyKind::BestMate,
            max_units: 100,
            seed: Seed(0),
        }
    }
}

/// State after each base unit (`unit` 0 is the starting state).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub unit: usize,
    pub disorder: f64,
    pub active: usize,
    pub population: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_config: Configuration,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First unit at which the configuration was stable.
    pub fn converged_at(&self) -> Option<usize> {
        self.points
            .iter()
            .find(|pt| pt.disorder == 0.0)
            .map(|pt| pt.unit)
    }

    pub fn peak_disorder(&self) -> f64 {
        self.points.iter().map(|pt| pt.disorder).fold(0.0, f64::max)
    }

    pub fn total_active(&self) -> usize {
        self.points.iter().map(|pt| pt.active).sum()
    }

    /// Mean disorder over points with `unit >= from`.
    pub fn mean_disorder_from(&self, from: usize) -> f64 {
        let tail: Vec<f64> = self
            .points
            .iter()
            .filter(|pt| pt.unit >= from)
            .map(|pt| pt.disorder)
            .collect();
        if tail.is_empty() {
            0.0
        } else {
            tail.iter().sum::<f64>() / tail.len() as f64
        }
    }
}

fn require_one_matching(instance: &Instance) -> Result<()> {
    if instance
        .present_peers()
        .any(|p| instance.caps().get(p) != 1)
    {
        return Err(Error::param(
            "b",
            "disorder is only defined for 1-matchings; use b = 1",
        ));
    }
    Ok(())
}

/// Uniformly random initiatives from `initial`; disorder is recorded every
/// base unit and the run stops as soon as the stable configuration is hit.
pub fn run_convergence(
    instance: &Instance,
    initial: Configuration,
    opts: &RunOptions,
) -> Result<Trajectory> {
    require_one_matching(instance)?;
    initial.validate(instance)?;
    Engine::new(instance.clone(), initial, opts, None).run(true)
}

/// Starts at the stable configuration, removes `victim`, and follows the
/// healing towards the stable configuration of the reduced instance.
pub fn run_removal(instance: &Instance, victim: usize, opts: &RunOptions) -> Result<Trajectory> {
    require_one_matching(instance)?;
    let mut config = stable_configuration(instance);
    let mut reduced = instance.clone();
    reduced.remove_peer(victim)?;
    config.detach(victim);
    Engine::new(reduced, config, opts, None).run(true)
}

/// Initiatives interleaved with arrivals and departures. Disorder is measured
/// against the stable configuration of the instance at measurement time.
/// With a zero rate this is exactly [`run_convergence`].
pub fn run_churn(
    instance: &Instance,
    initial: Configuration,
    churn: &ChurnSpec,
    opts: &RunOptions,
) -> Result<Trajectory> {
    require_one_matching(instance)?;
    initial.validate(instance)?;
    if !(churn.rate >= 0.0 && churn.rate.is_finite()) {
        return Err(Error::param(
            "rate",
            format!("{} must be non-negative", churn.rate),
        ));
    }
    if !(churn.expected_degree >= 0.0) {
        return Err(Error::param("d", "expected degree must be non-negative"));
    }
    let churn = (churn.rate > 0.0).then_some(*churn);
    let stop = churn.is_none();
    Engine::new(instance.clone(), initial, opts, churn).run(stop)
}

struct Engine {
    instance: Instance,
    config: Configuration,
    strategy: InitiativeStrategy,
    churn: Option<ChurnSpec>,
    max_units: usize,
    rng: ChaCha8Rng,
    present: Vec<usize>,
    stable: Option<Configuration>,
}

impl Engine {
    fn new(
        instance: Instance,
        config: Configuration,
        opts: &RunOptions,
        churn: Option<ChurnSpec>,
    ) -> Self {
        let n = instance.n();
        let present = instance.present_peers().collect();
        Engine {
            instance,
            config,
            strategy: InitiativeStrategy::new(opts.strategy, n),
            churn,
            max_units: opts.max_units,
            rng: opts.seed.rng(),
            present,
            stable: None,
        }
    }

    fn disorder(&mut self) -> Result<f64> {
        let stable = self
            .stable
            .get_or_insert_with(|| stable_configuration(&self.instance));
        distance_among(&self.config, stable, self.instance.present_mask())
    }

    fn point(&mut self, unit: usize, active: usize) -> Result<TrajectoryPoint> {
        Ok(TrajectoryPoint {
            unit,
            disorder: self.disorder()?,
            active,
            population: self.instance.present_count(),
        })
    }

    fn run(mut self, stop_when_stable: bool) -> Result<Trajectory> {
        let mut points = vec![self.point(0, 0)?];
        let done = |pt: &TrajectoryPoint| stop_when_stable && pt.disorder == 0.0;
        if !done(&points[0]) {
            for unit in 1..=self.max_units {
                let steps = self.present.len();
                let event_prob = self.churn.map(|c| c.rate / steps.max(1) as f64);
                let mut active = 0;
                for _ in 0..steps {
                    if let Some(prob) = event_prob {
                        self.churn_step(prob);
                    }
                    if self.present.is_empty() {
                        continue;
                    }
                    let p = self.present[self.rng.random_range(0..self.present.len())];
                    if take_initiative(
                        &mut self.config,
                        &self.instance,
                        p,
                        &mut self.strategy,
                        &mut self.rng,
                    )?
                    .is_some()
                    {
                        active += 1;
                    }
                }
                let pt = self.point(unit, active)?;
                points.push(pt);
                if done(&pt) {
                    break;
                }
            }
        }
        Ok(Trajectory {
            points,
            final_config: self.config,
        })
    }

    /// Draws the churn events of one elementary step: `floor(prob)` certain
    /// events plus one more with probability `frac(prob)`.
    fn churn_step(&mut self, prob: f64) {
        let mut events = prob.floor() as usize;
        if self.rng.random::<f64>() < prob.fract() {
            events += 1;
        }
        for _ in 0..events {
            if self.rng.random_bool(0.5) {
                self.arrive();
            } else {
                self.depart();
            }
        }
    }

    fn depart(&mut self) {
        // keep at least a pair of peers around
        if self.present.len() <= 2 {
            return;
        }
        let v = self
            .present
            .swap_remove(self.rng.random_range(0..self.present.len()));
        self.config.detach(v);
        self.instance
            .remove_peer(v)
            .expect("departing peer is present");
        self.present.sort_unstable();
        self.stable = None;
    }

    fn arrive(&mut self) {
        let d = self.churn.map_or(0.0, |c| c.expected_degree);
        let pop = self.present.len();
        // uniform slot among the pop + 1 gaps between present peers
        let slot = self.rng.random_range(0..=pop);
        let at = if slot == pop {
            self.instance.n()
        } else {
            self.present[slot]
        };
        let p = if pop == 0 {
            0.0
        } else {
            (d / pop as f64).min(1.0)
        };
        let mut neighbors = Vec::new();
        for &q in &self.present {
            if self.rng.random_bool(p) {
                neighbors.push(if q >= at { q + 1 } else { q });
            }
        }
        self.instance.insert_peer(at, &neighbors, 1);
        self.config.insert_peer(at);
        self.strategy.insert_peer(at);
        for q in self.present.iter_mut() {
            if *q >= at {
                *q += 1;
            }
        }
        self.present.insert(slot, at);
        self.stable = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AcceptanceGraph;
    use crate::model::SlotCapacities;
    use crate::solver::replay_optimal_schedule;

    fn complete(n: usize, b: usize) -> Instance {
        Instance::new(AcceptanceGraph::complete(n), SlotCapacities::constant(n, b)).unwrap()
    }

    #[test]
    fn best_mate_picks_best_available() {
        let inst = complete(5, 1);
        let mut c = Configuration::empty(5);
        let mut s = InitiativeStrategy::new(StrategyKind::BestMate, 5);
        let got = take_initiative(&mut c, &inst, 2, &mut s, &mut Seed(0).rng()).unwrap();
        assert_eq!(got, Some(0));
        assert!(c.are_mates(0, 2));
    }

    #[test]
    fn better_pair_displaces_worse_mate() {
        let inst = complete(3, 1);
        let mut c = Configuration::from_edges(3, [(1, 2)]).unwrap();
        let mut s = InitiativeStrategy::new(StrategyKind::BestMate, 3);
        let got = take_initiative(&mut c, &inst, 0, &mut s, &mut Seed(0).rng()).unwrap();
        assert_eq!(got, Some(1));
        assert_eq!(c.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(c, stable_configuration(&inst));
    }

    #[test]
    fn no_initiative_is_active_at_the_stable_configuration() {
        let inst = complete(7, 2);
        let stable = stable_configuration(&inst);
        let mut rng = Seed(5).rng();
        for kind in [
            StrategyKind::BestMate,
            StrategyKind::Decremental,
            StrategyKind::Random,
        ] {
            let mut s = InitiativeStrategy::new(kind, 7);
            for p in 0..7 {
                for _ in 0..5 {
                    let mut c = stable.clone();
                    assert_eq!(
                        take_initiative(&mut c, &inst, p, &mut s, &mut rng).unwrap(),
                        None
                    );
                    assert_eq!(c, stable);
                }
            }
        }
    }

    #[test]
    fn decremental_cursor_stays_in_list() {
        let inst = complete(6, 1);
        let mut c = Configuration::empty(6);
        let mut s = InitiativeStrategy::new(StrategyKind::Decremental, 6);
        let mut rng = Seed(1).rng();
        for step in 0..60 {
            let p = step % 6;
            take_initiative(&mut c, &inst, p, &mut s, &mut rng).unwrap();
            assert!(s.cursor(p) < inst.graph().degree(p));
        }
        assert_eq!(c, stable_configuration(&inst));
    }

    #[test]
    fn initiative_by_absent_peer_fails() {
        let mut inst = complete(4, 1);
        inst.remove_peer(2).unwrap();
        let mut c = Configuration::empty(4);
        let mut s = InitiativeStrategy::new(StrategyKind::BestMate, 4);
        assert!(matches!(
            take_initiative(&mut c, &inst, 2, &mut s, &mut Seed(0).rng()),
            Err(Error::AbsentPeer(2))
        ));
    }

    #[test]
    fn replaying_the_schedule_rebuilds_the_stable_configuration() {
        let inst = complete(9, 2);
        let schedule = replay_optimal_schedule(&inst);
        let (c, active) = replay_schedule(&inst, &schedule).unwrap();
        assert_eq!(c, stable_configuration(&inst));
        assert!(active <= inst.caps().total() / 2);
    }

    #[test]
    fn convergence_from_stable_is_immediate() {
        let inst = complete(10, 1);
        let t =
            run_convergence(&inst, stable_configuration(&inst), &RunOptions::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.points[0].disorder, 0.0);
    }

    #[test]
    fn runs_require_one_matching() {
        let inst = complete(6, 2);
        assert!(run_convergence(&inst, Configuration::empty(6), &RunOptions::default()).is_err());
    }

    #[test]
    fn removing_an_unmated_peer_leaves_no_disorder() {
        // 5 peers, b = 1: peer 4 is left alone
        let inst = complete(5, 1);
        let t = run_removal(&inst, 4, &RunOptions::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.peak_disorder(), 0.0);
        assert!(run_removal(&inst, 9, &RunOptions::default()).is_err());
    }

    #[test]
    fn zero_churn_matches_convergence() {
        let g = crate::generators::gen_erdos_renyi(200, 8.0, Seed(3)).unwrap();
        let inst = Instance::new(g, SlotCapacities::constant(200, 1)).unwrap();
        let opts = RunOptions {
            seed: Seed(11),
            ..RunOptions::default()
        };
        let a = run_convergence(&inst, Configuration::empty(200), &opts).unwrap();
        let churn = ChurnSpec {
            rate: 0.0,
            expected_degree: 8.0,
        };
        let b = run_churn(&inst, Configuration::empty(200), &churn, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn churn_keeps_configuration_consistent() {
        let g = crate::generators::gen_erdos_renyi(150, 6.0, Seed(8)).unwrap();
        let inst = Instance::new(g, SlotCapacities::constant(150, 1)).unwrap();
        let churn = ChurnSpec {
            rate: 10.0,
            expected_degree: 6.0,
        };
        let opts = RunOptions {
            max_units: 20,
            seed: Seed(2),
            ..RunOptions::default()
        };
        let mut engine = Engine::new(inst, Configuration::empty(150), &opts, Some(churn));
        for _ in 0..2000 {
            engine.churn_step(0.5);
            let p = engine.present[engine.rng.random_range(0..engine.present.len())];
            take_initiative(
                &mut engine.config,
                &engine.instance,
                p,
                &mut engine.strategy,
                &mut engine.rng,
            )
            .unwrap();
        }
        engine.config.validate(&engine.instance).unwrap();
        assert_eq!(engine.present.len(), engine.instance.present_count());
        assert!(engine.present.windows(2).all(|w| w[0] < w[1]));
        assert!(engine
            .present
            .iter()
            .all(|&p| engine.instance.is_present(p)));
        let t = engine.run(false).unwrap();
        assert_eq!(t.len(), 21);
        assert!(t.points.windows(2).all(|w| w[0].unit < w[1].unit));
    }
}
