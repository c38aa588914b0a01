//! Translation of a fragment of LTL into semantically labelled parity games.

mod build;
mod fragment;
mod label;

pub use build::{
    build_game, complement_formula, complement_game, LabeledGame, TranslateError, TranslateOptions,
    VertexKind, FF_SINK, TT_SINK,
};
pub use fragment::{classify_fragment, Fragment};
pub use label::{
    priority_bound, step, step_priority, Monitor, MonitorKind, SemanticLabel, StepInfo, Successor,
};
