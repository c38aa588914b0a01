use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{mutate_formula, EvalError};
use crate::game::{zielonka_solve, Player};
use crate::ltl::{parse, Formula, Partition};
use crate::rng;
use crate::translate::{build_game, classify_fragment, complement_game, Fragment, LabeledGame, TranslateError, TranslateOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(rename = "cosafety")]
    CoSafety,
    Safety,
    #[serde(rename = "near_cosafety")]
    NearCoSafety,
    Parity,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::CoSafety, Family::Safety, Family::NearCoSafety, Family::Parity];

    pub fn name(self) -> &'static str {
        match self {
            Family::CoSafety => "cosafety",
            Family::Safety => "safety",
            Family::NearCoSafety => "near_cosafety",
            Family::Parity => "parity",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Whether `f` belongs to the family by its fragment and monitors.
    pub fn admits(self, f: &Formula) -> bool {
        let recurring = crate::translate::SemanticLabel::initial(f).is_some_and(|l| l.has_recurring());
        match (self, classify_fragment(f)) {
            (Family::CoSafety, Fragment::CoSafety) => true,
            (Family::Safety, Fragment::Safety) => true,
            (Family::NearCoSafety, Fragment::GConjunction) => !recurring,
            (Family::Parity, Fragment::GConjunction) => recurring,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    Mutated,
    Generated,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Mutated => "mutated",
            Provenance::Generated => "generated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub formula: Formula,
    pub system: Vec<String>,
    pub seed: u64,
    pub provenance: Provenance,
    pub split: Split,
    pub family: Option<Family>,
}

impl CorpusItem {
    pub fn partition(&self) -> Partition {
        Partition::from_system(&self.formula, self.system.iter().map(String::as_str))
    }

    /// Stable identifier derived from formula and partition.
    pub fn id(&self) -> String {
        let h = rng::hash_str(&format!("{}\t{}", self.formula, self.system.join(",")));
        format!("{h:016x}")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub items: Vec<CorpusItem>,
}

impl Corpus {
    pub fn split(&self, s: Split) -> impl Iterator<Item = &CorpusItem> {
        self.items.iter().filter(move |i| i.split == s)
    }

    /// Assigns 60/20/20 splits by the order of a seeded hash of each item.
    pub fn assign_splits(&mut self, seed: u64) {
        let mut order: Vec<(u64, usize)> = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| (rng::derive(seed, &[rng::hash_str(&it.formula.to_string()), i as u64]), i))
            .collect();
        order.sort_unstable();
        let n = order.len();
        let train = (n as f64 * 0.6).round() as usize;
        let val = (n as f64 * 0.2).round() as usize;
        for (rank, (_, i)) in order.into_iter().enumerate() {
            self.items[i].split = if rank < train {
                Split::Train
            } else if rank < train + val {
                Split::Validation
            } else {
                Split::Test
            };
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusParams {
    pub families: Vec<Family>,
    /// Accepted formulae per family.
    pub per_family: usize,
    pub env_atoms: usize,
    pub sys_atoms: usize,
    /// Share of accepted items derived by mutating earlier ones.
    pub mutation_rate: f64,
    /// Keep formulae whose complement game System wins.
    pub allow_complement: bool,
    pub translate: TranslateOptions,
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            families: Family::ALL.to_vec(),
            per_family: 50,
            env_atoms: 2,
            sys_atoms: 3,
            mutation_rate: 0.2,
            allow_complement: false,
            translate: TranslateOptions { max_vertices: 3000, time_limit: Some(std::time::Duration::from_secs(10)) },
            max_attempts: 5000,
            seed: 0,
        }
    }
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    env: Vec<String>,
    sys: Vec<String>,
}

impl Gen<'_> {
    fn pick(&mut self, pool: &[String]) -> Formula {
        let a = &pool[self.rng.random_range(0..pool.len())];
        Formula::literal(a, self.rng.random_bool(0.7))
    }

    fn sys_lit(&mut self) -> Formula {
        let s = self.sys.clone();
        self.pick(&s)
    }

    fn env_lit(&mut self) -> Formula {
        let e = self.env.clone();
        self.pick(&e)
    }

    /// One or two system literals joined by a random connective.
    fn sys_prop(&mut self) -> Formula {
        let a = self.sys_lit();
        if self.rng.random_bool(0.5) {
            return a;
        }
        let b = self.sys_lit();
        if self.rng.random_bool(0.6) {
            Formula::and2(a, b)
        } else {
            Formula::or2(a, b)
        }
    }

    fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or2(a.negated(), b)
    }

    fn cosafety(&mut self) -> Formula {
        match self.rng.random_range(0..6) {
            0 => Formula::finally(self.sys_prop()),
            1 => {
                let (a, b) = (self.sys_lit(), self.sys_lit());
                Formula::finally(Formula::and2(a, Formula::next(b)))
            }
            2 => {
                let (a, b) = (self.env_lit(), self.sys_prop());
                Formula::until(Formula::or2(a, self.sys_lit()), b)
            }
            3 => Formula::next(Formula::next(self.sys_prop())),
            4 => {
                let (a, b) = (self.sys_lit(), self.sys_lit());
                Formula::strong_release(a, b)
            }
            _ => {
                let (e, s) = (self.env_lit(), self.sys_prop());
                Formula::finally(Formula::and2(Self::implies(e, s.clone()), Formula::next(s)))
            }
        }
    }

    fn safety(&mut self) -> Formula {
        match self.rng.random_range(0..6) {
            0 => {
                let (e, s) = (self.env_lit(), self.sys_prop());
                Formula::globally(Self::implies(e, s))
            }
            1 => {
                let (e, s) = (self.env_lit(), self.sys_lit());
                Formula::globally(Self::implies(e, Formula::next(s)))
            }
            2 => {
                let (a, b) = (self.sys_lit(), self.sys_lit());
                Formula::globally(Formula::or2(a.negated(), b.negated()))
            }
            3 => {
                let (s, e) = (self.sys_prop(), self.env_lit());
                Formula::weak_until(s, e)
            }
            4 => {
                let a = self.sys_lit();
                Formula::globally(Self::implies(a.clone(), Formula::next(a.negated())))
            }
            _ => {
                let (e, s) = (self.env_lit(), self.sys_prop());
                Formula::release(e, s)
            }
        }
    }

    fn recurring(&mut self) -> Formula {
        match self.rng.random_range(0..4) {
            0 => Formula::globally(Formula::finally(self.sys_prop())),
            1 => {
                let (e, s) = (self.env_lit(), self.sys_prop());
                Formula::globally(Self::implies(e, Formula::finally(s)))
            }
            2 => {
                let (a, b) = (self.sys_lit(), self.sys_lit());
                Formula::globally(Formula::finally(Formula::and2(a, Formula::next(b))))
            }
            _ => {
                let (e, s) = (self.env_lit(), self.sys_lit());
                Formula::globally(Self::implies(e, Formula::next(Formula::finally(s))))
            }
        }
    }

    fn formula(&mut self, family: Family) -> Formula {
        let mut cs = Vec::new();
        match family {
            Family::CoSafety => (0..self.rng.random_range(2..=3)).for_each(|_| cs.push(self.cosafety())),
            Family::Safety => (0..self.rng.random_range(2..=3)).for_each(|_| cs.push(self.safety())),
            Family::NearCoSafety => {
                (0..self.rng.random_range(1..=2)).for_each(|_| cs.push(self.cosafety()));
                cs.push(self.safety());
            }
            Family::Parity => {
                (0..self.rng.random_range(1..=2)).for_each(|_| cs.push(self.recurring()));
                (0..self.rng.random_range(1..=2)).for_each(|_| cs.push(self.safety()));
                if self.rng.random_bool(0.3) {
                    cs.push(self.cosafety());
                }
            }
        }
        Formula::and(cs)
    }
}

/// Game for a corpus item: the formula's own game, or the complement game
/// when System loses the former and wins the latter.
pub fn prepare_game(item: &CorpusItem, opts: &TranslateOptions) -> Result<LabeledGame, TranslateError> {
    let p = item.partition();
    let lg = build_game(&item.formula, &p, opts)?;
    if zielonka_solve(&lg.game).winner[lg.game.initial()] == Player::System {
        return Ok(lg);
    }
    match complement_game(&item.formula, &p, opts) {
        Ok(c) if zielonka_solve(&c.game).winner[c.game.initial()] == Player::System => Ok(c),
        _ => Ok(lg),
    }
}

fn accept(f: &Formula, sys: &[String], params: &CorpusParams) -> bool {
    let p = Partition::from_system(f, sys.iter().map(String::as_str));
    let Ok(lg) = build_game(f, &p, &params.translate) else { return false };
    if zielonka_solve(&lg.game).winner[lg.game.initial()] == Player::System {
        return true;
    }
    params.allow_complement
        && complement_game(f, &p, &params.translate)
            .is_ok_and(|c| zielonka_solve(&c.game).winner[c.game.initial()] == Player::System)
}

/// Seeded generator of realizable in-fragment specifications.
pub fn generate_corpus(params: &CorpusParams) -> Corpus {
    let env: Vec<String> = (0..params.env_atoms.max(1)).map(|i| format!("e{i}")).collect();
    let sys: Vec<String> = (0..params.sys_atoms.max(1)).map(|i| format!("s{i}")).collect();
    let mut seen = BTreeSet::new();
    let mut corpus = Corpus::default();
    for (fi, &family) in params.families.iter().enumerate() {
        let mut accepted: Vec<Formula> = Vec::new();
        for attempt in 0..params.max_attempts {
            if accepted.len() >= params.per_family {
                break;
            }
            let item_seed = rng::derive(params.seed, &[fi as u64, attempt as u64]);
            let mut r = rng::stream(item_seed, &[]);
            let mutate = !accepted.is_empty() && r.random_bool(params.mutation_rate.clamp(0.0, 1.0));
            let (f, provenance) = if mutate {
                let base = &accepted[r.random_range(0..accepted.len())];
                match mutate_formula(base, item_seed) {
                    Ok(m) => (m, Provenance::Mutated),
                    Err(_) => continue,
                }
            } else {
                let mut g = Gen { rng: &mut r, env: env.clone(), sys: sys.clone() };
                (g.formula(family), Provenance::Generated)
            };
            if !family.admits(&f) || !seen.insert(f.to_string()) {
                continue;
            }
            if !accept(&f, &sys, params) {
                continue;
            }
            accepted.push(f.clone());
            corpus.items.push(CorpusItem {
                system: sys.iter().filter(|s| f.atoms().contains(*s)).cloned().collect(),
                formula: f,
                seed: item_seed,
                provenance,
                split: Split::Train,
                family: Some(family),
            });
        }
        if accepted.len() < params.per_family {
            log::warn!("family {} produced {} of {} formulae", family.name(), accepted.len(), params.per_family);
        }
    }
    corpus.assign_splits(params.seed);
    corpus
}

/// Tab-separated lines: formula, comma-separated system atoms, provenance,
/// split, family, seed. Only the first two columns are required on input.
pub fn write_corpus<W: Write>(mut w: W, items: &[&CorpusItem]) -> Result<(), EvalError> {
    for it in items {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            it.formula,
            it.system.join(","),
            it.provenance.name(),
            it.split.name(),
            it.family.map(Family::name).unwrap_or("-"),
            it.seed
        )?;
    }
    Ok(())
}

pub fn read_corpus<R: BufRead>(r: R, default_split: Split) -> Result<Corpus, EvalError> {
    let mut items = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let bad = |message: String| EvalError::Corpus { line: n + 1, message };
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let formula = parse(cols[0]).map_err(|e| bad(format!("{}: {e}", cols[0])))?;
        let system = cols
            .get(1)
            .map(|s| s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
            .unwrap_or_default();
        let provenance = match cols.get(2).copied() {
            None | Some("original") => Provenance::Original,
            Some("mutated") => Provenance::Mutated,
            Some("generated") => Provenance::Generated,
            Some(other) => return Err(bad(format!("unknown provenance {other}"))),
        };
        let split = match cols.get(3).copied() {
            None => default_split,
            Some("train") => Split::Train,
            Some("validation") => Split::Validation,
            Some("test") => Split::Test,
            Some(other) => return Err(bad(format!("unknown split {other}"))),
        };
        let family = cols.get(4).and_then(|s| Family::from_name(s));
        let seed = match cols.get(5) {
            Some(s) => s.parse().map_err(|_| bad(format!("bad seed {s}")))?,
            None => 0,
        };
        items.push(CorpusItem { formula, system, seed, provenance, split, family });
    }
    Ok(Corpus { items })
}
