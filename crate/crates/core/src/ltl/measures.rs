//! Numeric measures of formulae used as base features.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::formula::{Formula, Partition};

/// Largest number of propositional variables counted exactly.
pub const DEFAULT_VARIABLE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("too many propositional variables ({count} > {cap})")]
    TooManyVariables { count: usize, cap: usize },
}

/// Boolean skeleton of a formula: atoms and maximal temporal subformulae are
/// variables.
#[derive(Clone, Debug)]
pub enum Prop {
    Const(bool),
    Var(usize, bool),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

/// Propositional abstraction of an LTL formula.
#[derive(Clone, Debug)]
pub struct Propositional {
    pub skeleton: Prop,
    /// Variable index to the atom or temporal subformula it stands for.
    pub variables: Vec<Formula>,
}

impl Propositional {
    pub fn of(f: &Formula) -> Self {
        let mut index = BTreeMap::new();
        let mut variables = Vec::new();
        let skeleton = abstract_prop(f, &mut index, &mut variables);
        Propositional {
            skeleton,
            variables,
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        eval(&self.skeleton, assignment)
    }
}

fn abstract_prop(
    f: &Formula,
    index: &mut BTreeMap<Formula, usize>,
    vars: &mut Vec<Formula>,
) -> Prop {
    let mut var = |key: Formula| {
        *index.entry(key.clone()).or_insert_with(|| {
            vars.push(key);
            vars.len() - 1
        })
    };
    match f {
        Formula::True => Prop::Const(true),
        Formula::False => Prop::Const(false),
        Formula::Atom(_) => Prop::Var(var(f.clone()), true),
        Formula::NegAtom(a) => Prop::Var(var(Formula::Atom(a.clone())), false),
        Formula::And(cs) => Prop::And(cs.iter().map(|c| abstract_prop(c, index, vars)).collect()),
        Formula::Or(cs) => Prop::Or(cs.iter().map(|c| abstract_prop(c, index, vars)).collect()),
        _ => Prop::Var(var(f.clone()), true),
    }
}

fn eval(p: &Prop, assignment: &[bool]) -> bool {
    match p {
        Prop::Const(b) => *b,
        Prop::Var(i, pos) => assignment[*i] == *pos,
        Prop::And(cs) => cs.iter().all(|c| eval(c, assignment)),
        Prop::Or(cs) => cs.iter().any(|c| eval(c, assignment)),
    }
}

// Truth tables of the six low variables inside one 64-bit block.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn eval_block(p: &Prop, block: u64) -> u64 {
    match p {
        Prop::Const(true) => u64::MAX,
        Prop::Const(false) => 0,
        Prop::Var(i, pos) => {
            let bits = if *i < 6 {
                LOW_PATTERNS[*i]
            } else if block >> (*i - 6) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
            if *pos {
                bits
            } else {
                !bits
            }
        }
        Prop::And(cs) => cs
            .iter()
            .fold(u64::MAX, |acc, c| acc & eval_block(c, block)),
        Prop::Or(cs) => cs.iter().fold(0, |acc, c| acc | eval_block(c, block)),
    }
}

/// Number of satisfying assignments of the propositional abstraction.
pub fn count_models(prop: &Propositional) -> u64 {
    let n = prop.variables.len();
    if n <= 6 {
        let valid = if n == 6 {
            u64::MAX
        } else {
            (1u64 << (1u64 << n)) - 1
        };
        return (eval_block(&prop.skeleton, 0) & valid).count_ones() as u64;
    }
    (0..1u64 << (n - 6))
        .map(|block| eval_block(&prop.skeleton, block).count_ones() as u64)
        .sum()
}

/// Fraction of assignments to the propositional abstraction that satisfy `f`.
pub fn trueness(f: &Formula) -> Result<f64, MeasureError> {
    trueness_with_cap(f, DEFAULT_VARIABLE_CAP)
}

pub fn trueness_with_cap(f: &Formula, cap: usize) -> Result<f64, MeasureError> {
    match f {
        Formula::True => return Ok(1.0),
        Formula::False => return Ok(0.0),
        _ => {}
    }
    let prop = Propositional::of(f);
    let n = prop.variables.len();
    if n > cap {
        return Err(MeasureError::TooManyVariables { count: n, cap });
    }
    Ok(count_models(&prop) as f64 / (1u64 << n) as f64)
}

/// Trueness that falls back to a seeded sampling estimate above the cap.
/// The flag is `true` when the value is exact.
pub fn trueness_or_estimate(f: &Formula) -> (f64, bool) {
    match trueness(f) {
        Ok(t) => (t, true),
        Err(_) => {
            let prop = Propositional::of(f);
            let mut rng = ChaCha8Rng::seed_from_u64(0x7275_6e65);
            let samples = 1 << 16;
            let mut assignment = vec![false; prop.variables.len()];
            let mut hits = 0u32;
            for _ in 0..samples {
                for a in assignment.iter_mut() {
                    *a = rng.random();
                }
                hits += prop.eval(&assignment) as u32;
            }
            (hits as f64 / samples as f64, false)
        }
    }
}

/// How much of the formula's structure is decided by system literals.
///
/// System literals score 1, environment literals 0, constants 0.5; unary
/// temporal operators pass their child's score through and every other node
/// averages its children.
pub fn system_control(f: &Formula, p: &Partition) -> f64 {
    match f {
        Formula::True | Formula::False => 0.5,
        Formula::Atom(a) | Formula::NegAtom(a) => {
            if p.is_system(a) {
                1.0
            } else {
                0.0
            }
        }
        Formula::Next(x) | Formula::Finally(x) | Formula::Globally(x) => system_control(x, p),
        _ => {
            let cs = f.children();
            cs.iter().map(|c| system_control(c, p)).sum::<f64>() / cs.len() as f64
        }
    }
}

/// Share of distinct atoms that are system propositions (0.5 without atoms).
pub fn system_control_prop(f: &Formula, p: &Partition) -> f64 {
    let atoms = f.atoms();
    if atoms.is_empty() {
        return 0.5;
    }
    atoms.iter().filter(|a| p.is_system(a)).count() as f64 / atoms.len() as f64
}

/// Formula whose models are the obligation sets of `f`.
pub fn obligation_formula(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => f.clone(),
        Formula::And(cs) => Formula::and(cs.iter().map(obligation_formula)),
        Formula::Or(cs) => Formula::or(cs.iter().map(obligation_formula)),
        Formula::Next(x) | Formula::Finally(x) | Formula::Globally(x) => obligation_formula(x),
        Formula::Until(_, b) | Formula::Release(_, b) => obligation_formula(b),
        Formula::WeakUntil(a, b) => Formula::or2(obligation_formula(a), obligation_formula(b)),
        Formula::StrongRelease(a, b) => Formula::and2(obligation_formula(a), obligation_formula(b)),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntacticMetrics {
    pub conjuncts: usize,
    pub disjuncts: usize,
    pub height: usize,
    pub temporal_ops: usize,
}

pub fn syntactic_metrics(f: &Formula) -> SyntacticMetrics {
    SyntacticMetrics {
        conjuncts: match f {
            Formula::And(cs) => cs.len(),
            _ => 1,
        },
        disjuncts: match f {
            Formula::Or(cs) => cs.len(),
            _ => 1,
        },
        height: height(f),
        temporal_ops: temporal_ops(f),
    }
}

fn height(f: &Formula) -> usize {
    1 + f.children().iter().map(|c| height(c)).max().unwrap_or(0)
}

fn temporal_ops(f: &Formula) -> usize {
    f.is_temporal() as usize + f.children().iter().map(|c| temporal_ops(c)).sum::<usize>()
}

/// System atoms mentioned in `f`.
pub fn system_atoms(f: &Formula, p: &Partition) -> BTreeSet<String> {
    f.atoms().into_iter().filter(|a| p.is_system(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    /// Independent enumeration over the abstraction's variables.
    fn brute_trueness(g: &Formula) -> f64 {
        let prop = Propositional::of(g);
        let n = prop.variables.len();
        let sat = (0..1u64 << n)
            .filter(|m| {
                let a: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
                prop.eval(&a)
            })
            .count();
        sat as f64 / (1u64 << n) as f64
    }

    #[test]
    fn trueness_examples() {
        assert_eq!(trueness(&f("G a")).unwrap(), 0.5);
        assert_eq!(trueness(&Formula::False).unwrap(), 0.0);
        assert_eq!(trueness(&Formula::True).unwrap(), 1.0);
        // enumerated over {a, <G b>}: only a=1, Gb=1 satisfies
        assert_eq!(trueness(&f("a & G b")).unwrap(), 0.25);
        assert_eq!(trueness(&f("a | !a")).unwrap(), 1.0);
        assert_eq!(trueness(&f("a & !a")).unwrap(), 0.0);
    }

    #[test]
    fn shared_temporal_subformula_is_one_variable() {
        let g = f("(G b & a) | (G b & c)");
        assert_eq!(Propositional::of(&g).variables.len(), 3);
        assert_eq!(trueness(&g).unwrap(), brute_trueness(&g));
    }

    #[test]
    fn trueness_matches_enumeration_on_wide_formula() {
        let g = f("(a & b) | (c & !d) | (e & X f & G g) | (h U i) | (j & k & l) | F m");
        assert!(Propositional::of(&g).variables.len() > 6);
        assert_eq!(trueness(&g).unwrap(), brute_trueness(&g));
    }

    #[test]
    fn cap_is_enforced() {
        let wide = Formula::and((0..30).map(|i| Formula::atom(&format!("p{i}"))));
        assert!(matches!(
            trueness(&wide),
            Err(MeasureError::TooManyVariables { count: 30, cap: 24 })
        ));
        let (est, exact) = trueness_or_estimate(&Formula::or(
            (0..30).map(|i| Formula::atom(&format!("p{i}"))),
        ));
        assert!(!exact && est > 0.99);
    }

    #[test]
    fn system_control_examples() {
        let p = Partition::new(["a"], ["e"]).unwrap();
        assert_eq!(system_control(&f("a"), &p), 1.0);
        assert_eq!(system_control(&f("e"), &p), 0.0);
        assert_eq!(system_control(&f("a & e"), &p), 0.5);
        assert_eq!(system_control(&f("G (a & e)"), &p), 0.5);
        assert_eq!(system_control(&Formula::True, &p), 0.5);
        assert_eq!(system_control(&f("a U (a & e)"), &p), 0.75);
    }

    #[test]
    fn system_control_prop_examples() {
        let p = Partition::new(["a"], ["e"]).unwrap();
        assert_eq!(system_control_prop(&f("a & e"), &p), 0.5);
        assert_eq!(system_control_prop(&f("G a"), &p), 1.0);
        assert_eq!(system_control_prop(&Formula::True, &p), 0.5);
    }

    #[test]
    fn obligation_examples() {
        assert_eq!(obligation_formula(&f("a U b")), f("b"));
        assert_eq!(obligation_formula(&f("G F c")), f("c"));
        assert_eq!(obligation_formula(&f("a W b")), f("a | b"));
    }

    #[test]
    fn metrics_examples() {
        let m = syntactic_metrics(&f("a & b & G c"));
        assert_eq!(m.conjuncts, 3);
        let m = syntactic_metrics(&f("G a"));
        assert_eq!((m.conjuncts, m.temporal_ops, m.height), (1, 1, 2));
        let m = syntactic_metrics(&f("(a U b) | F c"));
        assert_eq!((m.disjuncts, m.temporal_ops), (2, 2));
    }
}
