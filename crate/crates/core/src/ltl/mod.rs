//! Linear temporal logic: syntax, normal forms, the after-function and the
//! formula measures used as features.

mod after;
mod formula;
mod measures;
mod parse;

pub use after::after;
pub use formula::{simplify, Formula, Partition, PartitionError, Valuation};
pub use measures::{
    count_models, obligation_formula, syntactic_metrics, system_atoms, system_control,
    system_control_prop, trueness, trueness_or_estimate, trueness_with_cap, MeasureError, Prop,
    Propositional, SyntacticMetrics, DEFAULT_VARIABLE_CAP,
};
pub use parse::{parse, parse_expr, to_expr, to_nnf, Expr, ParseError};
