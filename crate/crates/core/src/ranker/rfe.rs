use super::svm::{train, LinearModel};
use super::{ModelKey, PairSample, RankerError, TrainConfig};
use crate::features::FeatureSchema;

fn drop_weakest(model: &LinearModel) -> Vec<usize> {
    let w = model.feature_weights();
    // lowest combined weight, earliest schema position on ties
    let weakest = (0..w.len()).min_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b))).unwrap();
    model.mask.iter().enumerate().filter(|&(i, _)| i != weakest).map(|(_, &f)| f).collect()
}

/// Recursive feature elimination for one model. A feature is removed with
/// both of its pair copies. Elimination first runs down to
/// `cfg.max_features`, then continues towards `cfg.min_features` while the
/// validation accuracy (training accuracy without validation data) stays
/// within `cfg.max_accuracy_drop` of the model at `max_features`.
pub fn feature_elimination(
    key: ModelKey,
    samples: &[PairSample],
    validation: Option<&[PairSample]>,
    schema: &FeatureSchema,
    cfg: &TrainConfig,
) -> Result<LinearModel, RankerError> {
    let names: Vec<String> = schema.names().map(String::from).collect();
    let fit = |features: &[usize]| train(key, samples, features, &names, cfg, validation);
    let mut model = fit(&schema.class_indices(key.class))?;
    while model.mask.len() > cfg.max_features {
        model = fit(&drop_weakest(&model))?;
    }
    let score = |m: &LinearModel| m.stats.validation_accuracy.unwrap_or(m.stats.train_accuracy);
    let reference = score(&model);
    while model.mask.len() > cfg.min_features {
        let next = fit(&drop_weakest(&model))?;
        if score(&next) < reference - cfg.max_accuracy_drop || next.mask.is_empty() {
            break;
        }
        model = next;
    }
    Ok(model)
}
