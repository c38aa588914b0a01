use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::seq::SliceRandom;

use super::{ModelKey, PairSample, RankerError, TrainConfig};
use crate::features::{Extractor, FeatureSchema, StateClass};
use crate::rng;
use crate::translate::LabeledGame;
use crate::truth::GroundTruthTable;

pub struct GameData<'a> {
    pub id: String,
    pub lg: &'a LabeledGame,
    pub gt: &'a GroundTruthTable,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PairDataset {
    pub by_key: BTreeMap<ModelKey, Vec<PairSample>>,
}

impl PairDataset {
    pub fn samples(&self, key: ModelKey) -> &[PairSample] {
        self.by_key.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_key.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extend(&mut self, other: PairDataset) {
        for (k, v) in other.by_key {
            self.by_key.entry(k).or_default().extend(v);
        }
    }
}

/// Ordered training pairs of one game: non-trivial edges of System states
/// with ground truth, unequal values only, at most `pair_cap` unordered
/// pairs, each emitted in both orders.
fn game_pairs(d: &GameData, schema: &FeatureSchema, cfg: &TrainConfig) -> Vec<PairSample> {
    let lg = d.lg;
    let mut x = Extractor::new(lg, schema.clone());
    let mut candidates = Vec::new();
    for v in lg.sys_choices() {
        let edges: Vec<_> = lg
            .game
            .out_edges(v)
            .iter()
            .copied()
            .filter(|&e| !lg.is_trivial_edge(e) && d.gt.entry(e).is_some_and(|t| !t.trivial))
            .collect();
        if edges.len() < 2 {
            continue;
        }
        let feats = x.state_features(v);
        let of = |e| &feats.iter().find(|(f, _)| *f == e).unwrap().1;
        for (i, &a) in edges.iter().enumerate() {
            for &b in &edges[i + 1..] {
                let (ga, gb) = (d.gt.get(a).unwrap(), d.gt.get(b).unwrap());
                if (ga - gb).abs() <= 1e-12 {
                    continue;
                }
                let (fa, fb) = (of(a), of(b));
                let key = ModelKey { class: fa.class, complement: fa.complement };
                candidates.push((key, fa.values.clone(), fb.values.clone(), if ga > gb { 1 } else { -1 }));
            }
        }
    }
    if candidates.len() > cfg.pair_cap {
        candidates.shuffle(&mut rng::stream(cfg.seed, &[rng::hash_str(&d.id)]));
        candidates.truncate(cfg.pair_cap);
    }
    candidates
        .into_iter()
        .flat_map(|(key, a, b, y)| {
            [
                PairSample { game: d.id.clone(), key, x1: a.clone(), x2: b.clone(), y },
                PairSample { game: d.id.clone(), key, x1: b, x2: a, y: -y },
            ]
        })
        .collect()
}

pub fn build_pair_dataset(games: &[GameData], schema: &FeatureSchema, cfg: &TrainConfig) -> PairDataset {
    use rayon::prelude::*;
    let per_game: Vec<Vec<PairSample>> = games.par_iter().map(|d| game_pairs(d, schema, cfg)).collect();
    let mut out = PairDataset::default();
    for s in per_game.into_iter().flatten() {
        out.by_key.entry(s.key).or_default().push(s);
    }
    for key in ModelKey::all() {
        if out.samples(key).is_empty() {
            log::info!("no training pairs for {key}");
        }
    }
    out
}

/// CSV: game, class, complement, label, then both edges' features.
pub fn write_pairs_csv<W: Write>(w: W, schema: &FeatureSchema, data: &PairDataset) -> Result<(), RankerError> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["game", "class", "complement", "label"].map(String::from).to_vec();
    header.extend(schema.names().map(|n| format!("e1.{n}")));
    header.extend(schema.names().map(|n| format!("e2.{n}")));
    out.write_record(&header)?;
    for s in data.by_key.values().flatten() {
        let mut rec = vec![s.game.clone(), s.key.class.to_string(), s.key.complement.to_string(), s.y.to_string()];
        rec.extend(s.x1.iter().chain(&s.x2).map(|x| format!("{x:e}")));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_pairs_csv<R: Read>(r: R, schema: &FeatureSchema) -> Result<PairDataset, RankerError> {
    let mut input = csv::Reader::from_reader(r);
    let n = schema.len();
    if input.headers()?.len() != 4 + 2 * n {
        return Err(RankerError::Dataset(format!("expected {} columns", 4 + 2 * n)));
    }
    let mut out = PairDataset::default();
    for rec in input.records() {
        let rec = rec?;
        let class = StateClass::ALL
            .into_iter()
            .find(|c| c.name() == &rec[1])
            .ok_or_else(|| RankerError::Dataset(format!("unknown class {}", &rec[1])))?;
        let bad = |what: &str| RankerError::Dataset(format!("bad {what} in row for game {}", &rec[0]));
        let complement: bool = rec[2].parse().map_err(|_| bad("complement flag"))?;
        let y: i8 = rec[3].parse().map_err(|_| bad("label"))?;
        let xs: Vec<f64> = (4..4 + 2 * n).map(|i| rec[i].parse().map_err(|_| bad("feature"))).collect::<Result<_, _>>()?;
        let key = ModelKey { class, complement };
        out.by_key.entry(key).or_default().push(PairSample {
            game: rec[0].to_string(),
            key,
            x1: xs[..n].to_vec(),
            x2: xs[n..].to_vec(),
            y,
        });
    }
    Ok(out)
}
