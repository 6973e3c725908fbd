use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::Serialize;

use super::{DelaySpec, MuxError};

/// Integer event time. One slot (the spacing of successive clusters) is
/// [`TimeBase::ticks_per_slot`] ticks.
pub type Tick = i64;

pub const DEFAULT_TICKS_PER_SLOT: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeBase {
    /// Physical duration of one slot.
    pub slot: f64,
    pub ticks_per_slot: u32,
}

impl TimeBase {
    pub fn new(slot: f64, ticks_per_slot: u32) -> Result<Self, MuxError> {
        if !(slot > 0.0 && slot.is_finite()) {
            return Err(MuxError::InvalidPeriod(slot));
        }
        if ticks_per_slot < 4 || ticks_per_slot % 4 != 0 {
            return Err(MuxError::InvalidTimeBase(format!(
                "ticks per slot must be a positive multiple of 4, got {ticks_per_slot}"
            )));
        }
        Ok(Self { slot, ticks_per_slot })
    }

    pub fn k(&self) -> Tick {
        self.ticks_per_slot as Tick
    }

    pub fn seconds(&self, t: Tick) -> f64 {
        t as f64 * self.slot / self.ticks_per_slot as f64
    }

    /// Beam-splitter event of slot `s`.
    pub fn slot_tick(&self, s: usize) -> Tick {
        (s as Tick + 1) * self.k()
    }

    /// Switch event just before slot `s`.
    pub fn switch_tick(&self, s: usize) -> Tick {
        self.slot_tick(s) - self.k() / 2
    }
}

impl Default for TimeBase {
    fn default() -> Self {
        Self { slot: 1.0, ticks_per_slot: DEFAULT_TICKS_PER_SLOT }
    }
}

/// Ideal Mach–Zehnder switch setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SwitchPhase {
    /// φ = 0: the loop pulse stays in the loop.
    Bar,
    /// φ = π: the loop pulse leaves and the outside pulse enters.
    Cross,
}

impl SwitchPhase {
    pub fn from_radians(phi: f64) -> Result<Self, MuxError> {
        if phi.abs() < 1e-12 {
            Ok(Self::Bar)
        } else if (phi - PI).abs() < 1e-12 {
            Ok(Self::Cross)
        } else {
            Err(MuxError::InvalidPhase(phi))
        }
    }

    pub fn radians(&self) -> f64 {
        match self {
            Self::Bar => 0.0,
            Self::Cross => PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchAction {
    Inject,
    Circulate,
    Eject,
}

impl SwitchAction {
    pub fn phase(&self) -> SwitchPhase {
        match self {
            Self::Circulate => SwitchPhase::Bar,
            Self::Inject | Self::Eject => SwitchPhase::Cross,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwitchInterval {
    pub start: Tick,
    pub end: Tick,
    pub phase: SwitchPhase,
    pub lane: usize,
    pub action: SwitchAction,
}

/// Time-ordered, non-overlapping switch settings.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SwitchSchedule {
    intervals: Vec<SwitchInterval>,
}

impl SwitchSchedule {
    pub fn new(intervals: Vec<SwitchInterval>) -> Result<Self, MuxError> {
        for (i, iv) in intervals.iter().enumerate() {
            if iv.end <= iv.start || (i > 0 && iv.start < intervals[i - 1].end) {
                return Err(MuxError::OverlappingIntervals { index: i });
            }
            if iv.phase != iv.action.phase() {
                return Err(MuxError::InvalidPhase(iv.phase.radians()));
            }
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[SwitchInterval] {
        &self.intervals
    }

    pub fn at(&self, t: Tick) -> Option<&SwitchInterval> {
        let i = self.intervals.partition_point(|iv| iv.end <= t);
        self.intervals.get(i).filter(|iv| iv.start <= t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LaneAssignment {
    pub lane_of_input: Vec<usize>,
    lane_of_cluster: Vec<usize>,
}

impl LaneAssignment {
    /// Both nodes of a cluster belong to the same lane.
    pub fn lane_of_cluster_pulse(&self, cluster: usize, node: usize) -> Option<usize> {
        (node < 2).then(|| self.lane_of_cluster.get(cluster).copied()).flatten()
    }

    pub fn clusters_of_lane(&self, lane: usize) -> Vec<usize> {
        (0..self.lane_of_cluster.len()).filter(|&m| self.lane_of_cluster[m] == lane).collect()
    }

    pub fn n_clusters(&self) -> usize {
        self.lane_of_cluster.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaneSchedule {
    pub n_lanes: usize,
    pub time_base: TimeBase,
    /// Extra delay of the lower interferometer arm.
    pub delay: DelaySpec,
    pub switch: SwitchSchedule,
    pub lanes: LaneAssignment,
}

impl LaneSchedule {
    pub fn delay_ticks(&self) -> Tick {
        self.delay.multiple.map_or(0, |n| n as Tick) * self.time_base.k()
    }
}

/// Interleaves `n_lanes` inputs over `n_clusters` successive clusters:
/// cluster `m` serves lane `m mod n_lanes`, and the lower arm is
/// `n_lanes` slots long so each lane meets only its own clusters.
pub fn schedule_lanes(n_lanes: usize, n_clusters: usize, time_base: TimeBase) -> Result<LaneSchedule, MuxError> {
    if n_lanes == 0 || n_clusters < n_lanes {
        return Err(MuxError::InfeasibleCounts { n_lanes, n_clusters });
    }
    let lane_of_cluster: Vec<usize> = (0..n_clusters).map(|m| m % n_lanes).collect();
    let quarter = time_base.k() / 4;
    let mut actions: Vec<(usize, usize, SwitchAction)> = (0..n_lanes).map(|l| (l, l, SwitchAction::Inject)).collect();
    for m in 0..n_clusters {
        let next = m + n_lanes;
        let action = if next < n_clusters { SwitchAction::Circulate } else { SwitchAction::Eject };
        actions.push((next, m % n_lanes, action));
    }
    actions.sort_by_key(|a| a.0);
    let intervals = actions
        .into_iter()
        .map(|(slot, lane, action)| {
            let t = time_base.switch_tick(slot);
            SwitchInterval { start: t - quarter, end: t + quarter, phase: action.phase(), lane, action }
        })
        .collect();
    Ok(LaneSchedule {
        n_lanes,
        time_base,
        delay: DelaySpec::on_grid(n_lanes as u64, time_base.slot)?,
        switch: SwitchSchedule::new(intervals)?,
        lanes: LaneAssignment { lane_of_input: (0..n_lanes).collect(), lane_of_cluster },
    })
}

/// One line of the event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub t: Tick,
    pub element: &'static str,
    pub lane: usize,
    pub action: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    // at equal ticks, arrivals are handled before the mixing they feed
    Carrier { lane: usize, at_switch: bool },
    Mix { cluster: usize },
}

/// Runs the carrier pulses of every lane through the loop. `mix` is called
/// once per beam-splitter event with the lane, the cluster index and the
/// carrier, and returns the new carrier (node 2 of that cluster).
pub(crate) fn run_events<C, F>(
    schedule: &LaneSchedule,
    mut carriers: Vec<Option<C>>,
    mut mix: F,
) -> Result<(Vec<C>, Vec<Event>), MuxError>
where
    F: FnMut(usize, usize, &C) -> Result<C, MuxError>,
{
    let tb = schedule.time_base;
    let n_lanes = schedule.n_lanes;
    if carriers.len() != n_lanes {
        return Err(MuxError::CountMismatch { what: "lane inputs", expected: n_lanes, found: carriers.len() });
    }
    let half = tb.k() / 2;
    let mut queue = BinaryHeap::new();
    let mut seq = 0usize;
    let mut push = |q: &mut BinaryHeap<_>, t: Tick, kind: Kind| {
        q.push(Reverse((t, kind, seq)));
        seq += 1;
    };
    for iv in schedule.switch.intervals().iter().filter(|iv| iv.action == SwitchAction::Inject) {
        push(&mut queue, (iv.start + iv.end) / 2, Kind::Carrier { lane: iv.lane, at_switch: true });
    }
    for m in 0..schedule.lanes.n_clusters() {
        push(&mut queue, tb.slot_tick(m), Kind::Mix { cluster: m });
    }

    let mut at_bs: Vec<(usize, Tick)> = Vec::new();
    let mut in_loop = vec![false; n_lanes];
    let mut outputs: Vec<Option<C>> = (0..n_lanes).map(|_| None).collect();
    let mut ejections = vec![0usize; n_lanes];
    let mut events = Vec::new();

    while let Some(Reverse((t, kind, _))) = queue.pop() {
        match kind {
            Kind::Carrier { lane, at_switch: true } => {
                let iv = schedule.switch.at(t).ok_or(MuxError::UnhandledPulse { t, lane })?;
                if iv.lane != lane {
                    return Err(MuxError::LaneCollision { t, first: iv.lane, second: lane });
                }
                events.push(Event { t, element: "MZI", lane, action: format!("{:?}", iv.action).to_lowercase() });
                match iv.action {
                    SwitchAction::Inject => {
                        if in_loop[lane] {
                            return Err(MuxError::LaneCollision { t, first: lane, second: lane });
                        }
                        in_loop[lane] = true;
                        push(&mut queue, t + half, Kind::Carrier { lane, at_switch: false });
                    }
                    SwitchAction::Circulate => push(&mut queue, t + half, Kind::Carrier { lane, at_switch: false }),
                    SwitchAction::Eject => {
                        in_loop[lane] = false;
                        ejections[lane] += 1;
                        outputs[lane] = carriers[lane].take();
                    }
                }
            }
            Kind::Carrier { lane, at_switch: false } => at_bs.push((lane, t)),
            Kind::Mix { cluster } => {
                let lane = schedule.lanes.lane_of_cluster_pulse(cluster, 0).expect("cluster index in range");
                let here: Vec<usize> = at_bs.iter().filter(|(_, ta)| *ta == t).map(|(l, _)| *l).collect();
                at_bs.retain(|(_, ta)| *ta != t);
                if let Some(&other) = here.iter().find(|&&l| l != lane) {
                    return Err(MuxError::LaneCollision { t, first: lane, second: other });
                }
                if here.len() != 1 {
                    return Err(MuxError::MissingCarrier { t, lane });
                }
                let carrier = carriers[lane].as_ref().ok_or(MuxError::MissingCarrier { t, lane })?;
                events.push(Event { t, element: "BS2", lane, action: format!("mix cluster {cluster}") });
                events.push(Event { t, element: "HD_in", lane, action: format!("measure step {cluster}") });
                events.push(Event { t, element: "HD_1", lane, action: format!("measure step {cluster}") });
                carriers[lane] = Some(mix(lane, cluster, carrier)?);
                // node 2 of this cluster travels the lower arm to the switch
                push(&mut queue, t + schedule.delay_ticks() - half, Kind::Carrier { lane, at_switch: true });
            }
        }
    }
    if let Some(&(lane, t)) = at_bs.first() {
        return Err(MuxError::MissingCarrier { t, lane });
    }
    for (lane, &count) in ejections.iter().enumerate() {
        if count != 1 {
            return Err(MuxError::EjectionCount { lane, count });
        }
    }
    let outputs = outputs.into_iter().map(|o| o.expect("ejected lanes hold a carrier")).collect();
    Ok((outputs, events))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub collisions: usize,
    pub beam_splitter_events: usize,
    pub ejections: usize,
}

/// Dry run with placeholder carriers. Any collision or lost pulse is an error.
pub fn validate_schedule(schedule: &LaneSchedule) -> Result<ScheduleReport, MuxError> {
    let mut mixes = 0;
    let (out, _) = run_events(schedule, vec![Some(()); schedule.n_lanes], |_, _, _| {
        mixes += 1;
        Ok(())
    })?;
    Ok(ScheduleReport { collisions: 0, beam_splitter_events: mixes, ejections: out.len() })
}
