use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::schema::{FeatureSchema, StateClass, BASE_FEATURES};
use crate::game::{EdgeId, VertexId};
use crate::ltl::{
    obligation_formula, syntactic_metrics, system_control, system_control_prop,
    trueness_or_estimate, Formula, Partition, Valuation,
};
use crate::translate::{LabeledGame, MonitorKind, SemanticLabel, FF_SINK};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub schema_version: u32,
    pub values: Vec<f64>,
    pub class: StateClass,
    pub complement: bool,
}

type Base = [f64; BASE_FEATURES.len()];

/// Position weights `(m - p) / (1 + ... + m)` for `m` monitors.
pub fn monitor_weights(m: usize) -> Vec<f64> {
    let total = (m * (m + 1) / 2) as f64;
    (0..m).map(|p| (m - p) as f64 / total).collect()
}

/// Maps priority `p <= bound` into [-1,1]: 1 odd ↦ 1, 0 ↦ -1, larger
/// priorities move towards 0.
pub fn priority_feature(p: u32, bound: u32) -> Result<f64, String> {
    if p > bound {
        return Err(format!("priority {p} exceeds bound {bound}"));
    }
    let d = bound as f64 + 1.0;
    Ok(if p % 2 == 1 {
        1.0 - (p - 1) as f64 / d
    } else {
        -1.0 + p as f64 / d
    })
}

/// Which system literals the formula asks for right now.
fn recommend(f: &Formula, p: &Partition, out: &mut BTreeMap<String, f64>, scale: f64) {
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(a) | Formula::NegAtom(a) => {
            if p.is_system(a) {
                let sign = if matches!(f, Formula::Atom(_)) {
                    1.0
                } else {
                    -1.0
                };
                let e = out.entry(a.to_string()).or_insert(0.0);
                *e = clamp(*e + sign * scale);
            }
        }
        Formula::And(cs) => cs.iter().for_each(|c| recommend(c, p, out, scale)),
        Formula::Or(cs) => cs.iter().for_each(|c| recommend(c, p, out, scale / 2.0)),
        Formula::Next(x) | Formula::Globally(x) => recommend(x, p, out, scale),
        Formula::Finally(x) => recommend(x, p, out, scale / 2.0),
        Formula::Until(a, b) | Formula::WeakUntil(a, b) => {
            recommend(a, p, out, scale / 2.0);
            recommend(b, p, out, scale / 2.0);
        }
        Formula::Release(a, b) | Formula::StrongRelease(a, b) => {
            recommend(a, p, out, scale / 2.0);
            recommend(b, p, out, scale);
        }
    }
}

/// Recommendation per system atom in [-1,1].
pub fn recommendation(f: &Formula, p: &Partition) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    recommend(f, p, &mut out, 1.0);
    out
}

/// Agreement in [0,1] between the master's recommendation and a system
/// letter; 0.5 when nothing is recommended.
pub fn one_step_agreement(master: &Formula, p: &Partition, letter: &Valuation) -> f64 {
    let r = recommendation(master, p);
    let support: Vec<(&String, f64)> = r
        .iter()
        .filter(|(_, &x)| x != 0.0)
        .map(|(a, &x)| (a, x))
        .collect();
    if support.is_empty() {
        return 0.5;
    }
    let dot: f64 = support
        .iter()
        .map(|(a, x)| if letter.contains(a) { *x } else { -*x })
        .sum();
    let norm =
        support.iter().map(|(_, x)| x * x).sum::<f64>().sqrt() * (support.len() as f64).sqrt();
    ((1.0 + dot / norm) / 2.0).clamp(0.0, 1.0)
}

/// Class of a system-choice vertex.
pub fn classify_state(lg: &LabeledGame, v: VertexId) -> StateClass {
    let label = &lg.labels[v];
    if label.monitors.is_empty() {
        return StateClass::NoMonitors;
    }
    if lg
        .game
        .successors(v)
        .all(|w| lg.labels[w].master == label.master)
    {
        StateClass::MasterStable
    } else {
        StateClass::Other
    }
}

/// Feature extraction with a per-formula cache.
pub struct Extractor<'a> {
    lg: &'a LabeledGame,
    partition: Partition,
    schema: FeatureSchema,
    cache: HashMap<Formula, Base>,
}

impl<'a> Extractor<'a> {
    pub fn new(lg: &'a LabeledGame, schema: FeatureSchema) -> Self {
        Extractor {
            lg,
            partition: lg.system_partition(),
            schema,
            cache: HashMap::new(),
        }
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    fn base(&mut self, f: &Formula) -> Base {
        if let Some(b) = self.cache.get(f) {
            return *b;
        }
        let p = &self.partition;
        let m = syntactic_metrics(f);
        let ob = obligation_formula(f);
        let b = [
            m.conjuncts as f64,
            m.disjuncts as f64,
            m.height as f64,
            m.temporal_ops as f64,
            trueness_or_estimate(f).0,
            system_control(f, p),
            system_control_prop(f, p),
            trueness_or_estimate(&ob).0,
            system_control(&ob, p),
            system_control_prop(&ob, p),
        ];
        self.cache.insert(f.clone(), b);
        b
    }

    /// Weighted average over monitors of the per-monitor minimum over tokens.
    fn monitor_base(&mut self, label: &SemanticLabel) -> Base {
        let m = label.monitors.len();
        if m == 0 {
            return self.base(&Formula::True);
        }
        let mut acc = [0.0; BASE_FEATURES.len()];
        for (mon, w) in label.monitors.iter().zip(monitor_weights(m)) {
            let mut low = [f64::INFINITY; BASE_FEATURES.len()];
            if mon.tokens.is_empty() {
                low = self.base(&Formula::True);
            }
            for t in &mon.tokens {
                let b = self.base(t);
                for (l, x) in low.iter_mut().zip(b) {
                    *l = l.min(x);
                }
            }
            for (a, l) in acc.iter_mut().zip(low) {
                *a += w * l;
            }
        }
        acc
    }

    pub fn progress(&self, e: EdgeId) -> f64 {
        let lg = self.lg;
        if lg.game.edge(e).target == FF_SINK {
            return -1.0;
        }
        let src = &lg.labels[lg.game.edge(e).source];
        let Some(info) = &lg.steps[e] else { return 0.0 };
        let m = src.monitors.len();
        if m == 0 {
            return 0.0;
        }
        monitor_weights(m)
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let failed = info.failed.get(i).copied().unwrap_or(false);
                let x = if failed && src.monitors[i].kind == MonitorKind::FiniteObligation {
                    -0.5
                } else {
                    info.token_progress.get(i).copied().unwrap_or(0.0)
                };
                w * x
            })
            .sum()
    }

    /// Raw (not normalized) features of a system-choice edge.
    pub fn edge_features(&mut self, e: EdgeId) -> FeatureVector {
        let lg = self.lg;
        let edge = lg.game.edge(e);
        let src = &lg.labels[edge.source];
        let dst = &lg.labels[edge.target];
        let mut values = Vec::with_capacity(self.schema.len());
        let pairs = [
            (self.base(&dst.master), self.base(&src.master)),
            (self.monitor_base(dst), self.monitor_base(src)),
        ];
        for (succ, pred) in pairs {
            for (s, p) in succ.iter().zip(pred) {
                values.push(*s);
                values.push(s - p);
            }
        }
        let info = lg.steps[e].clone().unwrap_or_default();
        values.push(
            priority_feature(edge.priority, lg.max_priority())
                .expect("priority within the game bound"),
        );
        values.push(self.progress(e));
        values.push(one_step_agreement(
            &src.master,
            &self.partition,
            &lg.valuations[e],
        ));
        values.push(info.front_discharged() as u8 as f64);
        values.push(!info.discharged.is_empty() as u8 as f64);
        values.push(dst.monitors.len() as f64 - src.monitors.len() as f64);
        debug_assert_eq!(values.len(), self.schema.len());
        FeatureVector {
            schema_version: self.schema.version,
            values,
            class: classify_state(lg, edge.source),
            complement: lg.complement_mode,
        }
    }

    /// Normalized features of every edge leaving system choice `v`, in
    /// out-edge order.
    pub fn state_features(&mut self, v: VertexId) -> Vec<(EdgeId, FeatureVector)> {
        let edges = self.lg.game.out_edges(v).to_vec();
        let mut vs: Vec<FeatureVector> = edges.iter().map(|&e| self.edge_features(e)).collect();
        statewise_normalize(&self.schema, &mut vs);
        edges.into_iter().zip(vs).collect()
    }
}

/// Per-state min-max rescaling of the normalized features; constant
/// features become 0.5.
pub fn statewise_normalize(schema: &FeatureSchema, vs: &mut [FeatureVector]) {
    for (i, d) in schema.features.iter().enumerate() {
        if !d.normalized {
            continue;
        }
        let lo = vs.iter().map(|v| v.values[i]).fold(f64::INFINITY, f64::min);
        let hi = vs
            .iter()
            .map(|v| v.values[i])
            .fold(f64::NEG_INFINITY, f64::max);
        for v in vs.iter_mut() {
            v.values[i] = if hi - lo > 1e-12 {
                (v.values[i] - lo) / (hi - lo)
            } else {
                0.5
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;
    use crate::translate::{build_game, Monitor, TranslateOptions, TT_SINK};
    use proptest::prelude::*;

    fn game(f: &str, sys: &[&str]) -> LabeledGame {
        let f = parse(f).unwrap();
        let p = Partition::from_system(&f, sys.iter().copied());
        build_game(&f, &p, &TranslateOptions::default()).unwrap()
    }

    fn at(schema: &FeatureSchema, v: &FeatureVector, name: &str) -> f64 {
        v.values[schema.index_of(name).unwrap()]
    }

    #[test]
    fn priority_examples() {
        assert_eq!(priority_feature(1, 4).unwrap(), 1.0);
        assert_eq!(priority_feature(0, 4).unwrap(), -1.0);
        assert!((priority_feature(3, 4).unwrap() - 0.6).abs() < 1e-12);
        assert!(priority_feature(5, 4).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(monitor_weights(1), vec![1.0]);
        let w = monitor_weights(2);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-12 && (w[1] - 1.0 / 3.0).abs() < 1e-12);
        let w = monitor_weights(4);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn edge_into_ff_sink() {
        let lg = game("G a", &["a"]);
        let mut x = Extractor::new(&lg, FeatureSchema::standard());
        let e = (0..lg.game.edge_count())
            .find(|&e| {
                lg.game.edge(e).target == FF_SINK && lg.is_sys_choice(lg.game.edge(e).source)
            })
            .unwrap();
        let v = x.edge_features(e);
        let s = FeatureSchema::standard();
        assert_eq!(at(&s, &v, "master.trueness.succ"), 0.0);
        assert!((at(&s, &v, "master.trueness.delta") + 0.5).abs() < 1e-12);
        assert_eq!(at(&s, &v, "edge.progress"), -1.0);
        assert_eq!(at(&s, &v, "edge.priority"), -1.0);
        assert_eq!(v.class, StateClass::NoMonitors);
    }

    #[test]
    fn unchanged_label_has_zero_deltas() {
        let lg = game("G a", &["a"]);
        let mut x = Extractor::new(&lg, FeatureSchema::standard());
        let s = FeatureSchema::standard();
        let e = (0..lg.game.edge_count())
            .find(|&e| {
                let ed = lg.game.edge(e);
                lg.is_sys_choice(ed.source) && !lg.is_sink(ed.target)
            })
            .unwrap();
        let v = x.edge_features(e);
        for (i, name) in s.names().enumerate() {
            if name.ends_with(".delta") {
                assert_eq!(v.values[i], 0.0, "{name}");
            }
        }
    }

    #[test]
    fn single_monitor_aggregate() {
        let lg = game("G F c", &["c"]);
        let mut x = Extractor::new(&lg, FeatureSchema::standard());
        let label = SemanticLabel {
            master: Formula::True,
            monitors: vec![Monitor::new(MonitorKind::Recurring, parse("F c").unwrap())],
        };
        assert!((x.monitor_base(&label)[4] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sink_labels() {
        let lg = game("G a", &["a"]);
        let mut x = Extractor::new(&lg, FeatureSchema::standard());
        let tt = x.base(&lg.labels[TT_SINK].master);
        assert_eq!((tt[0], tt[4]), (1.0, 1.0));
        assert_eq!(x.base(&lg.labels[FF_SINK].master)[4], 0.0);
    }

    #[test]
    fn progress_with_two_monitors() {
        let lg = game("G F c & G F d", &["c", "d"]);
        let x = Extractor::new(&lg, FeatureSchema::standard());
        let init = lg.game.initial();
        let state = lg.game.successors(init).next().unwrap();
        let front = lg.labels[state].monitors[0].goal.clone();
        let front_atom = front.atoms().into_iter().next().unwrap();
        let e = lg
            .game
            .out_edges(state)
            .iter()
            .copied()
            .find(|&e| lg.valuations[e].len() == 1 && lg.valuations[e].contains(&front_atom))
            .unwrap();
        assert!((x.progress(e) - 2.0 / 3.0).abs() < 1e-12);
        let both = lg
            .game
            .out_edges(state)
            .iter()
            .copied()
            .find(|&e| lg.valuations[e].len() == 2)
            .unwrap();
        assert!((x.progress(both) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_step_examples() {
        let f = parse("a & b").unwrap();
        let p = Partition::from_system(&f, ["a", "b"]);
        let ab = Valuation::from_atoms(["a", "b"]);
        let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
        assert!(close(one_step_agreement(&f, &p, &ab), 1.0));
        assert!(close(
            one_step_agreement(&f, &p, &Valuation::default()),
            0.0
        ));
        assert!(close(
            one_step_agreement(&parse("F (a & b)").unwrap(), &p, &ab),
            1.0
        ));
        let env_only = parse("G e").unwrap();
        assert_eq!(
            one_step_agreement(
                &env_only,
                &Partition::from_system(&env_only, Vec::<&str>::new()),
                &ab
            ),
            0.5
        );
        let r = recommendation(&parse("a | !b").unwrap(), &p);
        assert_eq!(r["a"], 0.5);
        assert_eq!(r["b"], -0.5);
    }

    #[test]
    fn classes() {
        let lg = game("G a", &["a"]);
        assert!(lg
            .sys_choices()
            .all(|v| classify_state(&lg, v) == StateClass::NoMonitors));
        let lg = game("G F c", &["c"]);
        assert!(lg
            .sys_choices()
            .all(|v| classify_state(&lg, v) == StateClass::MasterStable));
        let lg = game("F c & G F d", &["c", "d"]);
        let init_state = lg.game.successors(lg.game.initial()).next().unwrap();
        assert_eq!(classify_state(&lg, init_state), StateClass::Other);
    }

    #[test]
    fn normalization_examples() {
        let s = FeatureSchema::standard();
        let i = s.index_of("master.trueness.succ").unwrap();
        let mk = |x: f64| {
            let mut values = vec![0.3; s.len()];
            values[i] = x;
            FeatureVector {
                schema_version: 1,
                values,
                class: StateClass::Other,
                complement: false,
            }
        };
        let mut vs = vec![mk(0.2), mk(0.7)];
        statewise_normalize(&s, &mut vs);
        assert_eq!((vs[0].values[i], vs[1].values[i]), (0.0, 1.0));
        let mut one = vec![mk(0.9)];
        statewise_normalize(&s, &mut one);
        assert!(s
            .features
            .iter()
            .zip(&one[0].values)
            .all(|(d, &x)| !d.normalized || x == 0.5));
        let mut same = vec![mk(0.3), mk(0.3), mk(0.3)];
        statewise_normalize(&s, &mut same);
        assert!(same.iter().all(|v| v.values[i] == 0.5));
    }

    #[test]
    fn extraction_is_deterministic() {
        let lg = game("G (r -> F g) & G F c", &["g", "c"]);
        let s = FeatureSchema::standard();
        let a = crate::features::game_features(&lg, &s);
        let b = crate::features::game_features(&lg, &s);
        assert_eq!(a, b);
        for (_, v) in &a {
            assert!(v.values.iter().all(|x| x.is_finite()));
            for (d, &x) in s.features.iter().zip(&v.values) {
                if d.normalized {
                    assert!((0.0..=1.0).contains(&x));
                } else {
                    assert!((-1.0..=1.0).contains(&x));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn priority_monotone(bound in 1u32..40) {
            prop_assert_eq!(priority_feature(1, bound).unwrap(), 1.0);
            prop_assert_eq!(priority_feature(0, bound).unwrap(), -1.0);
            for p in 2..=bound {
                let (a, b) = (priority_feature(p - 2, bound).unwrap(), priority_feature(p, bound).unwrap());
                if p % 2 == 1 { prop_assert!(b < a) } else { prop_assert!(b > a) }
                prop_assert!((-1.0..=1.0).contains(&b));
            }
        }

        #[test]
        fn normalization_idempotent_and_order_preserving(rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 46), 1..6)) {
            let s = FeatureSchema::standard();
            let mut vs: Vec<FeatureVector> = rows.iter().map(|r| FeatureVector { schema_version: 1, values: r.clone(), class: StateClass::Other, complement: false }).collect();
            let raw = vs.clone();
            statewise_normalize(&s, &mut vs);
            let once = vs.clone();
            statewise_normalize(&s, &mut vs);
            prop_assert_eq!(&once, &vs);
            for (i, d) in s.features.iter().enumerate() {
                if !d.normalized { continue; }
                for a in 0..raw.len() {
                    prop_assert!((0.0..=1.0).contains(&once[a].values[i]));
                    for b in 0..raw.len() {
                        if raw[a].values[i] < raw[b].values[i] {
                            prop_assert!(once[a].values[i] <= once[b].values[i]);
                        }
                    }
                }
            }
        }
    }
}
