use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::features::{FeatureSchema, StateClass};
use crate::game::one_player_check;
use crate::ltl::{parse, Partition};
use crate::translate::{build_game, LabeledGame, TranslateOptions, TT_SINK};
use crate::truth::{compute_labeled, GtParams};

const KEY: ModelKey = ModelKey { class: StateClass::Other, complement: false };

/// Pairs labelled by a fixed linear rule on `dim` random features, in both
/// orders. Features listed in `constant` are fixed to 0.3.
fn synthetic(n: usize, dim: usize, w: &[f64], constant: &[usize], seed: u64) -> Vec<PairSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < 2 * n {
        let mut draw = || -> Vec<f64> {
            (0..dim).map(|i| if constant.contains(&i) { 0.3 } else { rng.random::<f64>() }).collect()
        };
        let (a, b) = (draw(), draw());
        let d: f64 = w.iter().zip(a.iter().zip(&b)).map(|(w, (x, y))| w * (x - y)).sum();
        if d.abs() < 0.05 {
            continue;
        }
        let y = if d > 0.0 { 1 } else { -1 };
        out.push(PairSample { game: "g".into(), key: KEY, x1: a.clone(), x2: b.clone(), y });
        out.push(PairSample { game: "g".into(), key: KEY, x1: b, x2: a, y: -y });
    }
    out
}

fn names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("f{i}")).collect()
}

#[test]
fn separable_toy_set() {
    let data = synthetic(200, 2, &[1.0, -2.0], &[], 1);
    let m = train(KEY, &data, &[0, 1], &names(2), &TrainConfig::default(), None).unwrap();
    assert_eq!(m.stats.train_accuracy, 1.0);
    let again = train(KEY, &data, &[0, 1], &names(2), &TrainConfig::default(), None).unwrap();
    assert_eq!(m, again);
}

#[test]
fn held_out_accuracy_on_linear_rule() {
    let w: Vec<f64> = (0..10).map(|i| (i as f64 - 4.5) / 3.0).collect();
    let tr = synthetic(1500, 10, &w, &[], 2);
    let te = synthetic(500, 10, &w, &[], 3);
    let idx: Vec<usize> = (0..10).collect();
    let m = train(KEY, &tr, &idx, &names(10), &TrainConfig::default(), Some(&te)).unwrap();
    assert!(m.stats.validation_accuracy.unwrap() >= 0.95, "{:?}", m.stats);
    // confidence sign follows the rule on held-out pairs
    let agree = te.iter().filter(|s| (m.confidence(&s.x1, &s.x2) > 0.0) == (s.y > 0)).count();
    assert!(agree as f64 / te.len() as f64 >= 0.95);
}

#[test]
fn single_class_is_rejected() {
    let mut data = synthetic(10, 2, &[1.0, 0.0], &[], 4);
    data.retain(|s| s.y > 0);
    assert!(matches!(
        train(KEY, &data, &[0, 1], &names(2), &TrainConfig::default(), None),
        Err(RankerError::SingleClass(_))
    ));
}

#[test]
fn standardization_statistics() {
    let data = synthetic(300, 5, &[1.0, 1.0, 0.0, -1.0, 2.0], &[2], 5);
    let m = train(KEY, &data, &[0, 1, 2, 3, 4], &names(5), &TrainConfig::default(), None).unwrap();
    assert_eq!(m.mask, vec![0, 1, 3, 4]);
    assert_eq!(m.weights.len(), 2 * m.mask.len());
    let zs: Vec<Vec<f64>> = data.iter().flat_map(|s| [m.standardize(&s.x1), m.standardize(&s.x2)]).collect();
    let n = zs.len() as f64;
    for i in 0..m.mask.len() {
        let mean = zs.iter().map(|z| z[i]).sum::<f64>() / n;
        let var = zs.iter().map(|z| (z[i] - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn score_sum_examples() {
    assert_eq!(score_sum(2, |_, _| 0.4), vec![0.4, -0.4]);
    assert_eq!(score_sum(1, |_, _| unreachable!()), vec![0.0]);
}

fn inversions(order: &[usize], truth: &[f64]) -> usize {
    let mut n = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            n += (truth[order[i]] < truth[order[j]]) as usize;
        }
    }
    n
}

fn permutations(items: Vec<usize>) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.clone();
        let x = rest.remove(i);
        for mut p in permutations(rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[test]
fn consistent_classifier_gives_zero_inversions() {
    let truth: [f64; 5] = [0.3, 0.9, 0.1, 0.5, 0.7];
    let s = score_sum(5, |i, j| (truth[i] - truth[j]).signum() * 0.7);
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let best = permutations((0..5).collect()).iter().map(|p| inversions(p, &truth)).min().unwrap();
    assert_eq!(best, 0);
    assert_eq!(inversions(&order, &truth), best);
}

fn game(f: &str, sys: &[&str]) -> LabeledGame {
    let f = parse(f).unwrap();
    let p = Partition::from_system(&f, sys.iter().copied());
    build_game(&f, &p, &TranslateOptions::default()).unwrap()
}

#[test]
fn fallback_ranking_on_safety_game() {
    let lg = game("G a", &["a"]);
    let bank = RankerBank::empty(FeatureSchema::standard(), TrainConfig::default());
    let s = recommend_strategy(&lg, &bank);
    let reach = lg.game.reachable();
    let sys: Vec<usize> =
        lg.game.vertices().filter(|&v| reach[v] && lg.game.owner(v) == crate::game::Player::System).collect();
    assert_eq!(s.iter().map(|(v, _)| v).collect::<Vec<_>>(), sys);
    for (_, e) in s.iter() {
        assert!(lg.valuations[e].contains("a"));
    }
    assert!(one_player_check(&lg.game, &s).unwrap());
}

#[test]
fn tt_edge_ranks_first() {
    let lg = game("F a", &["a"]);
    let bank = RankerBank::empty(FeatureSchema::standard(), TrainConfig::default());
    for v in lg.sys_choices() {
        let r = rank_edges(&lg, v, &bank);
        if lg.game.successors(v).any(|w| w == TT_SINK) {
            assert_eq!(r[0].target, TT_SINK);
        }
        assert!(r.iter().map(|x| x.score).sum::<f64>().abs() < 1e-9);
    }
}

fn liveness_data(pair_cap: usize) -> (Vec<LabeledGame>, Vec<crate::truth::GroundTruthTable>, TrainConfig) {
    let games = vec![
        game("G (r -> F g) & G F c", &["g", "c"]),
        game("G F (a & X b) & G (e -> X !a)", &["a", "b"]),
    ];
    let p = GtParams { samples: 30, depth: Some(4), ..GtParams::default() };
    let tables = games.iter().map(|lg| compute_labeled(lg, &p).unwrap()).collect();
    (games, tables, TrainConfig { pair_cap, ..TrainConfig::default() })
}

#[test]
fn dataset_rules() {
    let (games, tables, cfg) = liveness_data(1_000_000);
    let schema = FeatureSchema::standard();
    let data: Vec<GameData> =
        games.iter().zip(&tables).enumerate().map(|(i, (lg, gt))| GameData { id: format!("g{i}"), lg, gt }).collect();
    let full = build_pair_dataset(&data, &schema, &cfg);
    // independent count of unordered candidate pairs
    let mut expected = 0;
    let mut per_game_expected = Vec::new();
    for d in &data {
        let before = expected;
        for v in d.lg.sys_choices() {
            let vals: Vec<f64> = d
                .lg
                .game
                .out_edges(v)
                .iter()
                .filter(|&&e| !d.lg.is_trivial_edge(e))
                .filter_map(|&e| d.gt.get(e))
                .collect();
            for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    expected += (vals[i] != vals[j]) as usize;
                }
            }
        }
        per_game_expected.push(expected - before);
    }
    assert!(expected > 6);
    assert_eq!(full.len(), 2 * expected);
    for s in full.by_key.values().flatten() {
        let twins = full.by_key[&s.key].iter().filter(|t| t.x1 == s.x2 && t.x2 == s.x1 && t.y == -s.y).count();
        assert!(twins >= 1);
    }
    let capped = build_pair_dataset(&data, &schema, &TrainConfig { pair_cap: 3, ..cfg.clone() });
    let per_game = |g: &str| capped.by_key.values().flatten().filter(|s| s.game == g).count();
    for (i, n) in per_game_expected.iter().enumerate() {
        assert_eq!(per_game(&format!("g{i}")), 2 * n.min(&3));
    }
    assert_eq!(capped, build_pair_dataset(&data, &schema, &TrainConfig { pair_cap: 3, ..cfg }));

    let mut buf = Vec::new();
    write_pairs_csv(&mut buf, &schema, &full).unwrap();
    assert_eq!(read_pairs_csv(buf.as_slice(), &schema).unwrap(), full);
}

#[test]
fn bank_round_trip_and_antisymmetry() {
    let (games, tables, cfg) = liveness_data(200);
    let schema = FeatureSchema::standard();
    let data: Vec<GameData> =
        games.iter().zip(&tables).enumerate().map(|(i, (lg, gt))| GameData { id: format!("g{i}"), lg, gt }).collect();
    let ds = build_pair_dataset(&data, &schema, &cfg);
    let bank = RankerBank::train(&schema, &ds, None, &cfg).unwrap();
    assert!(!bank.models.is_empty());
    assert_eq!(RankerBank::from_json(&bank.to_json().unwrap()).unwrap(), bank);
    for lg in &games {
        let mut r = Ranker::new(lg, &bank);
        for v in lg.sys_choices() {
            let s = r.scores(v);
            assert!(s.iter().map(|x| x.1).sum::<f64>().abs() < 1e-9);
        }
        let st = r.strategy();
        assert_eq!(st, recommend_strategy(lg, &bank));
    }
    for m in &bank.models {
        for s in ds.samples(m.key) {
            assert_eq!(m.confidence(&s.x1, &s.x1), 0.0);
            assert!((m.confidence(&s.x1, &s.x2) + m.confidence(&s.x2, &s.x1)).abs() < 1e-12);
        }
    }
}

#[test]
fn elimination_lands_in_range() {
    let schema = FeatureSchema::standard();
    let dim = schema.len();
    let w: Vec<f64> = (0..dim).map(|i| ((i * 7) % 11) as f64 / 5.0 - 1.0).collect();
    let tr = synthetic(600, dim, &w, &[3], 6);
    let va = synthetic(200, dim, &w, &[3], 7);
    let m = feature_elimination(KEY, &tr, Some(&va), &schema, &TrainConfig::default()).unwrap();
    assert!((30..=40).contains(&m.mask.len()), "{}", m.mask.len());
    assert!(!m.mask.contains(&3));
    assert_eq!(m.weights.len(), 2 * m.mask.len());
    // smaller classes stay untouched
    let key = ModelKey { class: StateClass::NoMonitors, complement: false };
    let small = feature_elimination(key, &tr, Some(&va), &schema, &TrainConfig::default()).unwrap();
    let mut expected = schema.class_indices(StateClass::NoMonitors);
    expected.retain(|&i| i != 3);
    assert_eq!(small.mask, expected);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn confidence_is_antisymmetric(seed in any::<u64>(), n in 2usize..7) {
        let w: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let data = synthetic(40, 6, &w, &[], seed);
        let m = train(KEY, &data, &(0..6).collect::<Vec<_>>(), &names(6), &TrainConfig::default(), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..6).map(|_| rng.random()).collect()).collect();
        for a in &xs {
            for b in &xs {
                prop_assert!((m.confidence(a, b) + m.confidence(b, a)).abs() < 1e-12);
            }
        }
        let s = score_sum(n, |i, j| m.confidence(&xs[i], &xs[j]));
        prop_assert!(s.iter().sum::<f64>().abs() < 1e-9);
    }
}
