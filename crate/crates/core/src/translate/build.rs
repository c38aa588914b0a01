use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::fragment::{classify_fragment, Fragment};
use super::label::{priority_bound, step, step_priority, SemanticLabel, StepInfo, Successor};
use crate::game::json::{EdgeDoc, GameDocument, VertexDoc};
use crate::game::{Edge, EdgeId, ParityGame, Player, VertexId};
use crate::ltl::{Formula, Partition, PartitionError, Valuation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TranslateError {
    #[error("formula '{0}' is outside the supported fragment")]
    Unsupported(String),
    #[error("negation of '{0}' is outside the supported fragment")]
    ComplementUnsupported(String),
    #[error("{0}")]
    Partition(#[from] PartitionError),
    #[error("translation of '{formula}' exceeded {what}")]
    Budget { formula: String, what: String },
    #[error("game document has no semantic metadata")]
    MissingSemantics,
    #[error("malformed semantic metadata: {0}")]
    BadSemantics(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum VertexKind {
    EnvChoice,
    SysChoice { env: Valuation },
    TtSink,
    FfSink,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslateOptions {
    pub max_vertices: usize,
    #[serde(with = "secs")]
    pub time_limit: Option<Duration>,
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match d {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map(Duration::from_secs_f64))
    }
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            max_vertices: 20_000,
            time_limit: Some(Duration::from_secs(10)),
        }
    }
}

/// Parity game whose vertices carry semantic labels.
///
/// Vertex 0 is the tt sink, vertex 1 the ff sink and vertex 2 the initial
/// environment choice. Both sinks belong to the environment and carry a
/// single self-loop (priority 1 for tt, 0 for ff), so every System vertex
/// is a system choice.
#[derive(Clone, Debug)]
pub struct LabeledGame {
    pub game: ParityGame,
    pub kinds: Vec<VertexKind>,
    /// Label per vertex; a system choice shares the label of its state.
    pub labels: Vec<SemanticLabel>,
    /// Letter read on each edge: environment part on environment edges,
    /// system part on system edges, empty on sink loops.
    pub valuations: Vec<Valuation>,
    /// Monitor bookkeeping for edges leaving system choices.
    pub steps: Vec<Option<StepInfo>>,
    /// Formula the game was requested for (before negation in complement mode).
    pub formula: Formula,
    /// Partition of the requested formula (not swapped).
    pub partition: Partition,
    pub complement_mode: bool,
    pub fragment: Fragment,
}

pub const TT_SINK: VertexId = 0;
pub const FF_SINK: VertexId = 1;

impl LabeledGame {
    pub fn is_sys_choice(&self, v: VertexId) -> bool {
        matches!(self.kinds[v], VertexKind::SysChoice { .. })
    }

    pub fn sys_choices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.game.vertices().filter(|&v| self.is_sys_choice(v))
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        v == TT_SINK || v == FF_SINK
    }

    /// Edges into either sink; ranking and training handle them by rule.
    pub fn is_trivial_edge(&self, e: EdgeId) -> bool {
        self.is_sink(self.game.edge(e).target)
    }

    /// Atoms controlled by the player owning system choices in this game.
    pub fn system_partition(&self) -> Partition {
        if self.complement_mode {
            self.partition.swapped()
        } else {
            self.partition.clone()
        }
    }

    /// Formula actually translated.
    pub fn translated_formula(&self) -> Formula {
        if self.complement_mode {
            complement_formula(&self.formula, &self.partition)
        } else {
            self.formula.clone()
        }
    }

    /// A priority bound, the largest priority in use for non-environment
    /// edges plus the neutral environment priority.
    pub fn max_priority(&self) -> u32 {
        self.game.max_priority()
    }

    pub fn to_document(&self) -> GameDocument {
        let g = &self.game;
        GameDocument {
            vertices: g
                .vertices()
                .map(|v| VertexDoc {
                    owner: g.owner(v),
                    kind: Some(serde_json::to_value(&self.kinds[v]).unwrap()),
                    label: Some(serde_json::to_value(&self.labels[v]).unwrap()),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .zip(&self.valuations)
                .map(|(e, val)| EdgeDoc {
                    source: e.source,
                    target: e.target,
                    priority: e.priority,
                    valuation: Some(val.iter().cloned().collect()),
                })
                .collect(),
            initial: g.initial(),
            max_priority: g.max_priority(),
            semantics: Some(
                serde_json::to_value(Semantics {
                    formula: self.formula.clone(),
                    partition: self.partition.clone(),
                    complement_mode: self.complement_mode,
                    fragment: self.fragment,
                })
                .unwrap(),
            ),
        }
    }

    /// Rebuilds the labelled game from the metadata stored in a document
    /// and checks that the graph matches.
    pub fn from_document(
        doc: &GameDocument,
        opts: &TranslateOptions,
    ) -> Result<Self, TranslateError> {
        let sem: Semantics = serde_json::from_value(
            doc.semantics
                .clone()
                .ok_or(TranslateError::MissingSemantics)?,
        )
        .map_err(|e| TranslateError::BadSemantics(e.to_string()))?;
        let lg = if sem.complement_mode {
            complement_game(&sem.formula, &sem.partition, opts)?
        } else {
            build_game(&sem.formula, &sem.partition, opts)?
        };
        let same = lg.game.vertex_count() == doc.vertices.len()
            && lg.game.edges().iter().zip(&doc.edges).all(|(a, b)| {
                a.source == b.source && a.target == b.target && a.priority == b.priority
            })
            && lg.game.edge_count() == doc.edges.len();
        if !same {
            return Err(TranslateError::BadSemantics(
                "graph does not match its formula".into(),
            ));
        }
        Ok(lg)
    }
}

#[derive(Serialize, Deserialize)]
struct Semantics {
    formula: Formula,
    partition: Partition,
    complement_mode: bool,
    fragment: Fragment,
}

fn all_valuations(props: &[String]) -> Vec<Valuation> {
    (0..1u64 << props.len())
        .map(|m| Valuation::from_mask(props, m))
        .collect()
}

/// Builds the game for `f`: the environment picks its letter first, then
/// the system answers with its own.
pub fn build_game(
    f: &Formula,
    p: &Partition,
    opts: &TranslateOptions,
) -> Result<LabeledGame, TranslateError> {
    p.covers(f)?;
    let fragment = classify_fragment(f);
    let init =
        SemanticLabel::initial(f).ok_or_else(|| TranslateError::Unsupported(f.to_string()))?;
    let mut lg = explore(f, init, p, opts)?;
    lg.fragment = fragment;
    Ok(lg)
}

/// NNF of the negation with the original system atoms delayed by one step,
/// so that the original system still reacts to the environment's letter
/// once the roles are swapped.
pub fn complement_formula(f: &Formula, p: &Partition) -> Formula {
    let sys: BTreeSet<String> = p.system_props().into_iter().collect();
    f.negated().delay_atoms(&sys)
}

/// Game for the negated formula with the players' roles swapped.
pub fn complement_game(
    f: &Formula,
    p: &Partition,
    opts: &TranslateOptions,
) -> Result<LabeledGame, TranslateError> {
    p.covers(f)?;
    let neg = complement_formula(f, p);
    let fragment = classify_fragment(&neg);
    let init = SemanticLabel::initial(&neg)
        .ok_or_else(|| TranslateError::ComplementUnsupported(f.to_string()))?;
    let mut lg = explore(&neg, init, &p.swapped(), opts)?;
    lg.formula = f.clone();
    lg.partition = p.clone();
    lg.complement_mode = true;
    lg.fragment = fragment;
    Ok(lg)
}

fn explore(
    f: &Formula,
    init: SemanticLabel,
    p: &Partition,
    opts: &TranslateOptions,
) -> Result<LabeledGame, TranslateError> {
    // Instant is unavailable on some targets, so only read the clock when limited.
    let started = opts.time_limit.map(|_| Instant::now());
    let env_letters = all_valuations(&p.environment_props());
    let sys_letters = all_valuations(&p.system_props());
    let m0 = init.monitors.len();
    let bound = priority_bound(m0);

    let mut owners = vec![Player::Environment, Player::Environment];
    let mut kinds = vec![VertexKind::TtSink, VertexKind::FfSink];
    let mut labels = vec![SemanticLabel::sink(true), SemanticLabel::sink(false)];
    let mut edges = vec![
        Edge {
            source: TT_SINK,
            target: TT_SINK,
            priority: 1,
        },
        Edge {
            source: FF_SINK,
            target: FF_SINK,
            priority: 0,
        },
    ];
    let mut valuations = vec![Valuation::new(), Valuation::new()];
    let mut steps = vec![None, None];

    let mut index: HashMap<SemanticLabel, VertexId> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    index.insert(init.clone(), 2);
    owners.push(Player::Environment);
    kinds.push(VertexKind::EnvChoice);
    labels.push(init);
    queue.push_back(2);

    let budget = |n: usize| -> Result<(), TranslateError> {
        if n > opts.max_vertices {
            return Err(TranslateError::Budget {
                formula: f.to_string(),
                what: format!("{} vertices", opts.max_vertices),
            });
        }
        if let (Some(limit), Some(t0)) = (opts.time_limit, started) {
            if t0.elapsed() > limit {
                return Err(TranslateError::Budget {
                    formula: f.to_string(),
                    what: format!("{:?}", limit),
                });
            }
        }
        Ok(())
    };

    while let Some(state) = queue.pop_front() {
        let label = labels[state].clone();
        for nu_e in &env_letters {
            let sys_v = owners.len();
            owners.push(Player::System);
            kinds.push(VertexKind::SysChoice { env: nu_e.clone() });
            labels.push(label.clone());
            edges.push(Edge {
                source: state,
                target: sys_v,
                priority: bound,
            });
            valuations.push(nu_e.clone());
            steps.push(None);
            for nu_s in &sys_letters {
                let (succ, info) = step(&label, &nu_e.union(nu_s));
                let priority = step_priority(label.monitors.len(), &succ, &info);
                let target = match succ {
                    Successor::Tt => TT_SINK,
                    Successor::Ff => FF_SINK,
                    Successor::State(next) => match index.get(&next) {
                        Some(&v) => v,
                        None => {
                            let v = owners.len();
                            index.insert(next.clone(), v);
                            owners.push(Player::Environment);
                            kinds.push(VertexKind::EnvChoice);
                            labels.push(next);
                            queue.push_back(v);
                            v
                        }
                    },
                };
                edges.push(Edge {
                    source: sys_v,
                    target,
                    priority,
                });
                valuations.push(nu_s.clone());
                steps.push(Some(info));
            }
            budget(owners.len())?;
        }
    }

    let game = ParityGame::new(owners, edges, 2, bound).expect("translation yields a total game");
    Ok(LabeledGame {
        game,
        kinds,
        labels,
        valuations,
        steps,
        formula: f.clone(),
        partition: p.clone(),
        complement_mode: false,
        fragment: Fragment::Unsupported,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{zielonka_solve, Player};
    use crate::ltl::parse;

    fn build(f: &str, sys: &[&str]) -> LabeledGame {
        let f = parse(f).unwrap();
        let p = Partition::from_system(&f, sys.iter().copied());
        build_game(&f, &p, &TranslateOptions::default()).unwrap()
    }

    fn winner(lg: &LabeledGame) -> Player {
        zielonka_solve(&lg.game).winner[lg.game.initial()]
    }

    #[test]
    fn globally_a() {
        let lg = build("G a", &["a"]);
        assert_eq!(lg.game.vertex_count(), 4);
        assert_eq!(winner(&lg), Player::System);
        let sys = lg.sys_choices().next().unwrap();
        let targets: Vec<VertexId> = lg.game.successors(sys).collect();
        assert!(targets.contains(&FF_SINK) && targets.contains(&2));
        let loop_edge = lg.game.find_edge(sys, 2).unwrap();
        assert_eq!(lg.game.edge(loop_edge).priority, 1);
    }

    #[test]
    fn recurrence_winner_depends_on_control() {
        assert_eq!(winner(&build("G F c", &["c"])), Player::System);
        assert_eq!(winner(&build("G F c", &[])), Player::Environment);
        assert_eq!(winner(&build("F c", &[])), Player::Environment);
        assert_eq!(winner(&build("G (r -> F g)", &["g"])), Player::System);
    }

    #[test]
    fn alternation_holds() {
        let lg = build("F c & G F c & G (r -> F g)", &["c", "g"]);
        for e in lg.game.edges() {
            match (&lg.kinds[e.source], &lg.kinds[e.target]) {
                (VertexKind::EnvChoice, VertexKind::SysChoice { .. }) => {}
                (
                    VertexKind::SysChoice { .. },
                    VertexKind::EnvChoice | VertexKind::TtSink | VertexKind::FfSink,
                ) => {}
                (VertexKind::TtSink, VertexKind::TtSink)
                | (VertexKind::FfSink, VertexKind::FfSink) => {}
                other => panic!("bad edge {other:?}"),
            }
        }
    }

    #[test]
    fn complement_is_dual_for_mixed_control() {
        // the system copies the environment's current letter
        let f = parse("G (a <-> e)").unwrap();
        let p = Partition::from_system(&f, ["a"]);
        let g = build_game(&f, &p, &TranslateOptions::default()).unwrap();
        let c = complement_game(&f, &p, &TranslateOptions::default()).unwrap();
        assert_eq!(winner(&g), Player::System);
        assert_eq!(winner(&c), Player::Environment);
        assert!(c.complement_mode);
    }

    #[test]
    fn unsupported_and_budget() {
        let f = parse("F G a").unwrap();
        let p = Partition::from_system(&f, ["a"]);
        assert!(matches!(
            build_game(&f, &p, &TranslateOptions::default()),
            Err(TranslateError::Unsupported(_))
        ));
        let f = parse("G F a & G F b & G F c").unwrap();
        let p = Partition::from_system(&f, ["a"]);
        let tiny = TranslateOptions {
            max_vertices: 3,
            time_limit: None,
        };
        assert!(matches!(
            build_game(&f, &p, &tiny),
            Err(TranslateError::Budget { .. })
        ));
    }

    #[test]
    fn document_round_trip() {
        let lg = build("G F c & G a", &["c", "a"]);
        let doc = lg.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back = LabeledGame::from_document(
            &serde_json::from_str(&text).unwrap(),
            &TranslateOptions::default(),
        )
        .unwrap();
        assert_eq!(back.game, lg.game);
        assert_eq!(back.labels, lg.labels);
    }
}
