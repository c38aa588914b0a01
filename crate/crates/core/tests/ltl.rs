mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::Lasso;
use synthrank::ltl::{after, parse, simplify, to_expr, to_nnf, trueness, Expr, Formula, Valuation};

const ATOMS: [&str; 4] = ["a", "b", "c", "d"];

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        1 => any::<bool>().prop_map(Expr::Const),
        6 => prop::sample::select(&ATOMS[..]).prop_map(|a| Expr::Atom(a.to_string())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |x: Expr| Box::new(x);
        prop_oneof![
            inner.clone().prop_map(move |x| Expr::Not(b(x))),
            inner.clone().prop_map(move |x| Expr::Next(b(x))),
            inner.clone().prop_map(move |x| Expr::Finally(b(x))),
            inner.clone().prop_map(move |x| Expr::Globally(b(x))),
            (inner.clone(), inner.clone(), 0..8u8).prop_map(move |(x, y, k)| match k {
                0 => Expr::And(b(x), b(y)),
                1 => Expr::Or(b(x), b(y)),
                2 => Expr::Implies(b(x), b(y)),
                3 => Expr::Iff(b(x), b(y)),
                4 => Expr::Until(b(x), b(y)),
                5 => Expr::WeakUntil(b(x), b(y)),
                6 => Expr::Release(b(x), b(y)),
                _ => Expr::StrongRelease(b(x), b(y)),
            }),
        ]
    })
}

fn letter() -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::btree_set(prop::sample::select(&ATOMS[..]).prop_map(String::from), 0..=4)
}

fn lasso() -> impl Strategy<Value = Lasso> {
    (prop::collection::vec(letter(), 0..4), prop::collection::vec(letter(), 1..4))
        .prop_map(|(stem, cycle)| Lasso { stem, cycle })
}

/// Atoms and maximal temporal subformulae, the variables of trueness.
fn variables(f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(a) | Formula::NegAtom(a) => {
            out.insert(Formula::atom(a));
        }
        Formula::And(_) | Formula::Or(_) => f.children().into_iter().for_each(|c| variables(c, out)),
        _ => {
            out.insert(f.clone());
        }
    }
}

fn prop_eval(f: &Formula, val: &BTreeMap<Formula, bool>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => val[&Formula::atom(a)],
        Formula::NegAtom(a) => !val[&Formula::atom(a)],
        Formula::And(_) => f.children().into_iter().all(|c| prop_eval(c, val)),
        Formula::Or(_) => f.children().into_iter().any(|c| prop_eval(c, val)),
        _ => val[f],
    }
}

fn truth_table(f: &Formula, vars: &[Formula]) -> Vec<bool> {
    (0..1u32 << vars.len())
        .map(|m| {
            let val = vars.iter().enumerate().map(|(i, v)| (v.clone(), m >> i & 1 == 1)).collect();
            prop_eval(f, &val)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nnf_preserves_semantics(e in expr(), w in lasso()) {
        prop_assert_eq!(w.expr(&e), w.formula(&to_nnf(&e)));
    }

    #[test]
    fn nnf_is_idempotent(e in expr()) {
        let f = to_nnf(&e);
        prop_assert_eq!(to_nnf(&to_expr(&f)), f.clone());
        prop_assert_eq!(simplify(&f), f);
    }

    #[test]
    fn printing_round_trips(e in expr()) {
        let f = to_nnf(&e);
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn negation_is_complement(e in expr(), w in lasso()) {
        let f = to_nnf(&e);
        prop_assert_eq!(w.holds(&f.negated()), !w.holds(&f));
    }

    #[test]
    fn after_consumes_one_letter(e in expr(), w in lasso()) {
        let f = to_nnf(&e);
        let v = Valuation::from_atoms(w.first().iter().cloned());
        let g = after(&f, &v);
        prop_assert_eq!(w.tail().holds(&g), w.holds(&f), "{} after {:?} = {}", f, v, g);
        let t = trueness(&g).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
        prop_assert!(after(&Formula::tt(), &v).is_true());
        prop_assert!(after(&Formula::ff(), &v).is_false());
    }

    #[test]
    fn trueness_matches_enumeration(e in expr()) {
        let f = to_nnf(&e);
        let mut vars = BTreeSet::new();
        variables(&f, &mut vars);
        let vars: Vec<Formula> = vars.into_iter().collect();
        let table = truth_table(&f, &vars);
        let expect = table.iter().filter(|&&b| b).count() as f64 / table.len() as f64;
        prop_assert_eq!(trueness(&f).unwrap(), expect);
        prop_assert_eq!(truth_table(&simplify(&f), &vars), table);
    }
}
