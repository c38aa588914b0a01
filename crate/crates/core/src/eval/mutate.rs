use rand::Rng;

use super::EvalError;
use crate::ltl::Formula;
use crate::rng;
use crate::translate::{classify_fragment, Fragment};

const UNARY: [&str; 3] = ["X", "F", "G"];
const BINARY: [&str; 4] = ["U", "W", "R", "M"];

fn op(f: &Formula) -> Option<&'static str> {
    Some(match f {
        Formula::Next(_) => "X",
        Formula::Finally(_) => "F",
        Formula::Globally(_) => "G",
        Formula::Until(..) => "U",
        Formula::WeakUntil(..) => "W",
        Formula::Release(..) => "R",
        Formula::StrongRelease(..) => "M",
        _ => return None,
    })
}

fn temporal_count(f: &Formula) -> usize {
    op(f).is_some() as usize + f.children().into_iter().map(temporal_count).sum::<usize>()
}

fn rebuild(name: &str, cs: &[Formula]) -> Formula {
    match (name, cs) {
        ("X", [x]) => Formula::next(x.clone()),
        ("F", [x]) => Formula::finally(x.clone()),
        ("G", [x]) => Formula::globally(x.clone()),
        ("U", [a, b]) => Formula::until(a.clone(), b.clone()),
        ("W", [a, b]) => Formula::weak_until(a.clone(), b.clone()),
        ("R", [a, b]) => Formula::release(a.clone(), b.clone()),
        ("M", [a, b]) => Formula::strong_release(a.clone(), b.clone()),
        _ => unreachable!("operator {name} with {} operands", cs.len()),
    }
}

/// Replaces the operator of the `n`-th temporal node (pre-order) by `new`.
fn replace(f: &Formula, n: &mut usize, new: &str) -> Formula {
    if op(f).is_some() {
        if *n == 0 {
            *n = usize::MAX;
            let cs: Vec<Formula> = f.children().into_iter().cloned().collect();
            return rebuild(new, &cs);
        }
        *n -= 1;
    }
    if *n == usize::MAX {
        return f.clone();
    }
    f.map_children(|c| replace(c, n, new))
}

/// Replaces one uniformly chosen temporal operator by a different operator
/// of the same arity, retrying up to 20 times until the result lies in the
/// supported fragment.
pub fn mutate_formula(f: &Formula, seed: u64) -> Result<Formula, EvalError> {
    let count = temporal_count(f);
    if count == 0 {
        return Err(EvalError::NoTemporal(f.to_string()));
    }
    let mut rng = rng::stream(seed, &[rng::hash_str(&f.to_string())]);
    for _ in 0..20 {
        let k = rng.random_range(0..count);
        let mut probe = k;
        let node = nth(f, &mut probe).expect("temporal node exists");
        let old = op(node).unwrap();
        let pool: Vec<&str> = if UNARY.contains(&old) { UNARY.to_vec() } else { BINARY.to_vec() };
        let choices: Vec<&str> = pool.into_iter().filter(|&o| o != old).collect();
        let new = choices[rng.random_range(0..choices.len())];
        let mut n = k;
        let g = replace(f, &mut n, new);
        if classify_fragment(&g) != Fragment::Unsupported && !g.is_constant() {
            return Ok(g);
        }
    }
    Err(EvalError::MutationFailed(f.to_string()))
}

fn nth<'a>(f: &'a Formula, n: &mut usize) -> Option<&'a Formula> {
    if op(f).is_some() {
        if *n == 0 {
            return Some(f);
        }
        *n -= 1;
    }
    f.children().into_iter().find_map(|c| nth(c, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    #[test]
    fn unary_mutation() {
        let g = parse("G a").unwrap();
        for seed in 0..20 {
            let m = mutate_formula(&g, seed).unwrap();
            assert!(m == parse("F a").unwrap() || m == parse("X a").unwrap(), "{m}");
            assert_eq!(m, mutate_formula(&g, seed).unwrap());
        }
    }

    #[test]
    fn no_temporal_operator() {
        assert!(matches!(mutate_formula(&parse("a & b").unwrap(), 0), Err(EvalError::NoTemporal(_))));
    }

    #[test]
    fn replaces_exactly_one_node() {
        let f = parse("G (r -> F g) & (a U b)").unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..60 {
            let m = mutate_formula(&f, seed).unwrap();
            assert_ne!(m, f);
            assert_eq!(temporal_count(&m), temporal_count(&f));
            seen.insert(m.to_string());
        }
        assert!(seen.len() > 3);
    }
}
