//! Temporal multiplexing: delayed-pulse criterion, switch schedules and
//! parallel lanes through one measurement loop.

mod delay;
mod pipeline;
mod schedule;

use thiserror::Error;

use crate::gate::GateError;

pub use delay::{admissible_frequencies, delayed_vlf, delayed_vlf_on_grid, DelaySpec, DelayedVerdict};
pub use pipeline::{simulate_pipeline, PipelineOptions, PipelineRun};
pub use schedule::{
    schedule_lanes, validate_schedule, Event, LaneAssignment, LaneSchedule, ScheduleReport, SwitchAction,
    SwitchInterval, SwitchPhase, SwitchSchedule, Tick, TimeBase, DEFAULT_TICKS_PER_SLOT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MuxError {
    #[error("delay must be finite and non-negative (positive where frequencies are derived), got {0}")]
    InvalidDelay(f64),
    #[error("period must be positive, got {0}")]
    InvalidPeriod(f64),
    #[error("variance must be finite and non-negative, got {0}")]
    InvalidVariance(f64),
    #[error("delay {0} is not a whole number of periods")]
    OffGrid(f64),
    #[error("cannot schedule {n_clusters} clusters on {n_lanes} lanes")]
    InfeasibleCounts { n_lanes: usize, n_clusters: usize },
    #[error("invalid time base: {0}")]
    InvalidTimeBase(String),
    #[error("switch phase must be 0 or pi, got {0}")]
    InvalidPhase(f64),
    #[error("switch interval {index} overlaps or precedes its predecessor")]
    OverlappingIntervals { index: usize },
    #[error("lanes {first} and {second} meet at the beam splitter at tick {t}")]
    LaneCollision { t: Tick, first: usize, second: usize },
    #[error("no carrier of lane {lane} at the beam splitter at tick {t}")]
    MissingCarrier { t: Tick, lane: usize },
    #[error("pulse of lane {lane} reaches the switch at tick {t} with no switch action")]
    UnhandledPulse { t: Tick, lane: usize },
    #[error("lane {lane} was ejected {count} times, expected once")]
    EjectionCount { lane: usize, count: usize },
    #[error("{what}: expected {expected}, found {found}")]
    CountMismatch { what: &'static str, expected: usize, found: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Gate(#[from] GateError),
}
