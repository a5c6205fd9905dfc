//! The built-in transpilation passes, grouped by what they do.

pub mod basis;
pub mod layout;
pub mod optimization;
pub mod routing;
pub mod scheduling;
pub mod synthesis;

pub use basis::{translate_circuit, BasisTranslate};
pub use layout::{
    is_monomorphism, mapping_error, trivial_assignment, vf2_layout, InteractionGraph,
    TrivialLayout, Vf2Budget, Vf2Outcome, Vf2Scoring, VF2Layout,
};
pub use optimization::{
    euler_zxzxz, optimize_1q_runs, InverseCancellation, Optimize1QGates,
    RESYNTHESIS_TOLERANCE, RZ_CANCELLATION_TOLERANCE,
};
pub use routing::{extend_layout, SwapRoute};
pub use scheduling::ASAPSchedule;
pub use synthesis::{expand_boxes, HighLevelSynthesis, PreExpandBoxes};
