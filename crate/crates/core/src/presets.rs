//! Preset pipelines for optimization levels 0 through 3.
//!
//! Every level shares the same backbone (layout, routing, translation,
//! scheduling). Levels differ in whether boxes are expanded up front, how
//! much search the layout pass may spend, and how aggressively the
//! optimization stage loops.

use thiserror::Error;

use crate::framework::{
    FixedPointLoop, MinimumPointLoop, PassManager, PipelineEntry, Stage, WatchedMetric,
    MINIMUM_POINT_MAX_ITERATIONS,
};
use crate::passes::{
    ASAPSchedule, BasisTranslate, HighLevelSynthesis, InverseCancellation, Optimize1QGates,
    PreExpandBoxes, SwapRoute, TrivialLayout, Vf2Budget, Vf2Scoring, VF2Layout,
};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown optimization level {0}; valid levels are 0 through 3")]
pub struct UnknownLevel(pub u8);

/// Search budget the layout pass gets at each level. Level 1 settles for
/// the first embedding; higher levels enumerate within a growing state
/// budget and keep the lowest-error one.
pub fn vf2_budget(level: u8) -> Option<Vf2Budget> {
    match level {
        0 => None,
        1 => Some(Vf2Budget {
            max_states: 10_000,
            scoring: Vf2Scoring::First,
        }),
        2 => Some(Vf2Budget {
            max_states: 500_000,
            scoring: Vf2Scoring::ExhaustiveWithinBudget,
        }),
        _ => Some(Vf2Budget {
            max_states: 2_000_000,
            scoring: Vf2Scoring::ExhaustiveWithinBudget,
        }),
    }
}

/// Number of optimization-loop iterations level 2 will run at most.
pub const FIXED_POINT_MAX_ITERATIONS: usize = 100;

/// Backtrack window of the level 3 optimization loop.
pub const MINIMUM_POINT_WINDOW: usize = 5;

fn optimization_children() -> Vec<Box<dyn crate::framework::Pass>> {
    vec![Box::new(InverseCancellation), Box::new(Optimize1QGates)]
}

/// Builds the preset pipeline for an optimization level.
pub fn build_preset(level: u8) -> Result<PassManager, UnknownLevel> {
    if level > 3 {
        return Err(UnknownLevel(level));
    }
    let mut pm = PassManager::new();
    pm.set_optimization_level(level);

    if level >= 1 {
        pm.add_pass(Stage::Initialization, PreExpandBoxes);
    }
    if let Some(budget) = vf2_budget(level) {
        pm.add_pass(Stage::Layout, VF2Layout { budget });
    }
    pm.add_pass(Stage::Layout, TrivialLayout);
    pm.add_pass(Stage::Routing, SwapRoute);
    pm.add_pass(Stage::Translation, HighLevelSynthesis);
    pm.add_pass(Stage::Translation, BasisTranslate);
    match level {
        0 => {}
        1 => pm.add_pass(Stage::Optimization, InverseCancellation),
        2 => pm.add_entry(
            Stage::Optimization,
            PipelineEntry::FixedPoint(FixedPointLoop {
                children: optimization_children(),
                watched: vec![WatchedMetric::Size, WatchedMetric::Depth],
                max_iterations: FIXED_POINT_MAX_ITERATIONS,
            }),
        ),
        _ => pm.add_entry(
            Stage::Optimization,
            PipelineEntry::MinimumPoint(MinimumPointLoop {
                children: optimization_children(),
                backtrack_window: MINIMUM_POINT_WINDOW,
                max_iterations: MINIMUM_POINT_MAX_ITERATIONS,
            }),
        ),
    }
    pm.add_pass(Stage::Scheduling, ASAPSchedule);
    Ok(pm)
}
