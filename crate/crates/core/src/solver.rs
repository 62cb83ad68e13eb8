//! One seeded end-to-end solve.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::{build_tree, preprocess, MergeEvent};
use crate::construction::{BuildStats, TourBuilder, TourEvent, TourParams};
use crate::geometry::Circle;
use crate::io::{geometric_epsilon, Instance, Solution};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveParams {
    pub seed: u64,
    /// Nearest boxes examined per candidate refresh during clustering.
    pub k_cluster: usize,
    /// Tour edges examined per non-free insertion.
    pub k_segments: usize,
    pub newton: bool,
    /// Reinserted circles are capped at this multiple of the number of
    /// circles; `None` removes the cap.
    pub reinsertion_budget_factor: Option<f64>,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            seed: 0,
            k_cluster: 8,
            k_segments: 6,
            newton: false,
            reinsertion_budget_factor: Some(2.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Preprocess,
    Cluster,
    Construct,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Preprocess => "preprocess",
            Phase::Cluster => "cluster",
            Phase::Construct => "construct",
        }
    }
}

/// Intermediate steps of a solve, in input coordinates.
///
/// Cluster node `j < leaf_input.len()` is the input circle `leaf_input[j]`;
/// larger ids are proxies created by `merges`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveTrace {
    pub leaf_input: Vec<usize>,
    pub merges: Vec<MergeEvent>,
    pub events: Vec<TourEvent>,
}

#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub solution: Solution,
    pub stats: BuildStats,
    /// Circles left after redundancy removal.
    pub kept: usize,
    pub trace: Option<SolveTrace>,
}

pub fn solve(instance: &Instance, params: &SolveParams) -> Result<SolveOutput, Error> {
    solve_with(instance, params, false, |_| {})
}

/// Runs a solve, calling `on_phase` as each phase completes. With `trace`
/// set, every merge and tour event is recorded.
pub fn solve_with(
    instance: &Instance,
    params: &SolveParams,
    trace: bool,
    mut on_phase: impl FnMut(Phase),
) -> Result<SolveOutput, Error> {
    if instance.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let eps = geometric_epsilon(&instance.circles);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let pre = preprocess(&instance.circles, &mut rng, eps)?;
    on_phase(Phase::Preprocess);

    let mut merges = Vec::new();
    let tree = build_tree(&pre.kept, &mut rng, params.k_cluster.max(1), trace.then_some(&mut merges))?;
    on_phase(Phase::Cluster);

    let tour_params = TourParams {
        k_segments: params.k_segments.max(1),
        newton: params.newton,
        reinsertion_budget: params
            .reinsertion_budget_factor
            .map(|f| (f.max(0.0) * pre.kept.len() as f64).ceil() as usize),
        eps,
        ..TourParams::default()
    };
    let mut events = Vec::new();
    let mut builder = TourBuilder::new(&tree, tour_params);
    if trace {
        builder = builder.with_trace(&mut events);
    }
    builder.run()?;
    let (tour, stats) = builder.finish();
    on_phase(Phase::Construct);

    let order = tour.order();
    let mut slot = vec![usize::MAX; order.iter().max().map_or(0, |&m| m + 1)];
    for (i, &id) in order.iter().enumerate() {
        slot[id] = i;
    }
    let positions: Vec<_> = order.iter().map(|&id| pre.unrotate(tour.point(id).position)).collect();

    let mut assignment = vec![usize::MAX; instance.len()];
    for (leaf, &input) in pre.kept_index.iter().enumerate() {
        let point = tour.assignment(leaf).ok_or_else(|| {
            Error::Solution(format!("circle {input} was left unassigned"))
        })?;
        assignment[input] = slot[point];
    }
    for &(removed, kept) in &pre.removed_map {
        assignment[removed] = assignment[kept];
    }

    let trace = trace.then(|| SolveTrace {
        leaf_input: pre.kept_index.clone(),
        merges: merges
            .into_iter()
            .map(|m| MergeEvent {
                proxy: Circle::new(pre.unrotate(m.proxy.center), m.proxy.radius),
                ..m
            })
            .collect(),
        events: events
            .into_iter()
            .map(|e| match e {
                TourEvent::Insert { circle, point, zero_cost, delta, position } => {
                    TourEvent::Insert {
                        circle,
                        point,
                        zero_cost,
                        delta,
                        position: pre.unrotate(position),
                    }
                }
                TourEvent::Reoptimize { point, from, to } => TourEvent::Reoptimize {
                    point,
                    from: pre.unrotate(from),
                    to: pre.unrotate(to),
                },
                other => other,
            })
            .collect(),
    });

    let length = crate::construction::tour_length(&positions);
    Ok(SolveOutput {
        solution: Solution {
            instance: instance.name.clone(),
            seed: params.seed,
            params: params.clone(),
            length,
            tour: positions,
            assignment,
        },
        stats,
        kept: pre.kept.len(),
        trace,
    })
}
