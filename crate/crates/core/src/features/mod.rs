//! Edge features for ranking: measures of the successor label and their
//! change, edge-level signals, statewise normalization.

mod extract;
mod schema;

use std::io::Write;

pub use extract::{
    classify_state, monitor_weights, one_step_agreement, priority_feature, recommendation,
    statewise_normalize, Extractor, FeatureVector,
};
pub use schema::{
    FeatureDescriptor, FeatureSchema, Scope, StateClass, BASE_FEATURES, EDGE_FEATURES,
    SCHEMA_VERSION,
};

use crate::game::EdgeId;
use crate::translate::LabeledGame;

/// Normalized features of every edge leaving a system choice, by state.
pub fn game_features(lg: &LabeledGame, schema: &FeatureSchema) -> Vec<(EdgeId, FeatureVector)> {
    let mut x = Extractor::new(lg, schema.clone());
    lg.sys_choices().flat_map(|v| x.state_features(v)).collect()
}

/// One row per edge: game, state, edge, target, letter, class, complement
/// flag, then the schema's features.
pub fn write_features_csv<W: Write>(
    w: W,
    schema: &FeatureSchema,
    rows: &[(String, &LabeledGame, Vec<(EdgeId, FeatureVector)>)],
) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = [
        "game",
        "state",
        "edge",
        "target",
        "valuation",
        "class",
        "complement",
    ]
    .map(String::from)
    .to_vec();
    header.extend(schema.names().map(String::from));
    out.write_record(&header)?;
    for (id, lg, fs) in rows {
        for (e, v) in fs {
            let edge = lg.game.edge(*e);
            let mut rec = vec![
                id.clone(),
                edge.source.to_string(),
                e.to_string(),
                edge.target.to_string(),
                lg.valuations[*e]
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(" "),
                v.class.to_string(),
                v.complement.to_string(),
            ];
            rec.extend(v.values.iter().map(|x| format!("{x:.12}")));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Trueness of the master formula an edge leads to.
pub fn successor_trueness(lg: &LabeledGame, e: EdgeId) -> f64 {
    crate::ltl::trueness_or_estimate(&lg.labels[lg.game.edge(e).target].master).0
}
