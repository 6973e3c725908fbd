use crate::gate::{ClusterResource, GateOutput, HomodyneSetting, ModePair, StepOptions};

use super::schedule::run_events;
use super::{Event, LaneSchedule, MuxError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Power transmissivity of the delay line. Only lossless operation is modelled.
    pub transmissivity: f64,
    pub step: StepOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { transmissivity: 1.0, step: StepOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    /// Ejected output of each lane.
    pub outputs: Vec<GateOutput>,
    pub events: Vec<Event>,
}

impl PipelineRun {
    /// The event log, one JSON object per line.
    pub fn events_jsonl(&self) -> String {
        self.events.iter().map(|e| serde_json::to_string(e).expect("events serialize") + "\n").collect()
    }
}

/// Runs every lane's input through its clusters in schedule order.
/// `settings[lane]` lists one homodyne setting per cluster of that lane.
pub fn simulate_pipeline(
    schedule: &LaneSchedule,
    inputs: &[ModePair],
    clusters: &[ClusterResource],
    settings: &[Vec<HomodyneSetting>],
    options: PipelineOptions,
) -> Result<PipelineRun, MuxError> {
    if options.transmissivity != 1.0 {
        return Err(MuxError::Unsupported(format!("delay-line transmissivity {}", options.transmissivity)));
    }
    let n_lanes = schedule.n_lanes;
    let check = |what, expected, found| {
        if expected == found {
            Ok(())
        } else {
            Err(MuxError::CountMismatch { what, expected, found })
        }
    };
    check("inputs", n_lanes, inputs.len())?;
    check("clusters", schedule.lanes.n_clusters(), clusters.len())?;
    check("lane settings", n_lanes, settings.len())?;
    for (lane, s) in settings.iter().enumerate() {
        check("settings per lane", schedule.lanes.clusters_of_lane(lane).len(), s.len())?;
    }

    let start = schedule
        .lanes
        .lane_of_input
        .iter()
        .map(|&lane| Some(GateOutput::identity(&inputs[lane])))
        .collect();
    let (outputs, events) = run_events(schedule, start, |lane, cluster, carrier: &GateOutput| {
        let setting = &settings[lane][carrier.n_steps()];
        Ok(carrier.then_step(&clusters[cluster], setting, options.step)?)
    })?;
    Ok(PipelineRun { outputs, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{OrthogonalFreedom, SourceVariances};
    use crate::gate::{compose_two_steps, SourceRegister};
    use crate::mux::{schedule_lanes, TimeBase};
    use crate::quad::GaussianState;

    fn build(n_lanes: usize, n_clusters: usize) -> (SourceRegister, Vec<ModePair>, Vec<ClusterResource>) {
        let mut reg = SourceRegister::new();
        let inputs = (0..n_lanes)
            .map(|l| reg.add_input(&GaussianState::squeezed(0.1 + 0.05 * l as f64, 0.7).unwrap()).unwrap())
            .collect();
        let src = [SourceVariances::minimum_uncertainty(0.04).unwrap(); 2];
        let q = OrthogonalFreedom::two_node_default();
        let clusters = (0..n_clusters).map(|_| reg.add_two_node_cluster(src, &q).unwrap()).collect();
        (reg, inputs, clusters)
    }

    #[test]
    fn two_lanes_match_independent_runs() {
        let (_, inputs, clusters) = build(2, 4);
        let s = schedule_lanes(2, 4, TimeBase::default()).unwrap();
        let settings = vec![
            vec![HomodyneSetting::new(0.7, -0.4), HomodyneSetting::new(1.2, 0.1)],
            vec![HomodyneSetting::new(-0.3, 0.9), HomodyneSetting::new(2.0, 0.5)],
        ];
        let run = simulate_pipeline(&s, &inputs, &clusters, &settings, PipelineOptions::default()).unwrap();
        for lane in 0..2 {
            let [c1, c2] = [&clusters[lane], &clusters[lane + 2]];
            let direct =
                compose_two_steps(&inputs[lane], [c1, c2], [&settings[lane][0], &settings[lane][1]], StepOptions::default())
                    .unwrap();
            for k in 0..2 {
                assert!(run.outputs[lane].exprs[k].max_abs_diff(&direct.exprs[k]) < 1e-12);
            }
        }
        assert_eq!(run.events.iter().filter(|e| e.element == "BS2").count(), 4);
        assert_eq!(run.events_jsonl().lines().count(), run.events.len());
    }

    #[test]
    fn lossy_delay_is_unsupported() {
        let (_, inputs, clusters) = build(1, 2);
        let s = schedule_lanes(1, 2, TimeBase::default()).unwrap();
        let settings = vec![vec![HomodyneSetting::new(0.7, -0.4); 2]];
        let opts = PipelineOptions { transmissivity: 0.9, ..Default::default() };
        assert!(matches!(simulate_pipeline(&s, &inputs, &clusters, &settings, opts), Err(MuxError::Unsupported(_))));
    }

    #[test]
    fn count_mismatch_is_reported() {
        let (_, inputs, clusters) = build(1, 2);
        let s = schedule_lanes(1, 2, TimeBase::default()).unwrap();
        let settings = vec![vec![HomodyneSetting::new(0.7, -0.4)]];
        assert!(matches!(
            simulate_pipeline(&s, &inputs, &clusters, &settings, PipelineOptions::default()),
            Err(MuxError::CountMismatch { .. })
        ));
    }
}
