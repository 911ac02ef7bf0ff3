//! A chain of support planes bent along a schedule of leaf approximations,
//! with a certified lower bound on the sphere radii.

mod run;
mod schedule;

pub use run::{
    roof_step, run_roof, RecursionTrace, RoofState, RoofVerdict, Selector, StepInput, StepRecord, TraceStep,
};
pub use schedule::{beta_from_alpha, BendingSchedule, BetaMode, ScheduleEntry};
