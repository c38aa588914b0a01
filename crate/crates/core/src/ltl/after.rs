use super::formula::{Formula, Valuation};

/// One-step residual of `f` after reading the letter `v`.
///
/// | formula   | after(·, v)                                   |
/// |-----------|-----------------------------------------------|
/// | tt, ff    | unchanged                                     |
/// | a, ¬a     | tt/ff depending on `a ∈ v`                     |
/// | φ ∧ ψ, φ ∨ ψ | applied to each child                      |
/// | X φ       | φ                                             |
/// | F φ       | after(φ) ∨ F φ                                 |
/// | G φ       | after(φ) ∧ G φ                                 |
/// | φ U ψ     | after(ψ) ∨ (after(φ) ∧ φ U ψ)                  |
/// | φ W ψ     | after(ψ) ∨ (after(φ) ∧ φ W ψ)                  |
/// | φ R ψ     | after(ψ) ∧ (after(φ) ∨ φ R ψ)                  |
/// | φ M ψ     | after(ψ) ∧ (after(φ) ∨ φ M ψ)                  |
///
/// The result goes through the smart constructors and is therefore simplified.
pub fn after(f: &Formula, v: &Valuation) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(a) => Formula::constant(v.contains(a)),
        Formula::NegAtom(a) => Formula::constant(!v.contains(a)),
        Formula::And(cs) => Formula::and(cs.iter().map(|c| after(c, v))),
        Formula::Or(cs) => Formula::or(cs.iter().map(|c| after(c, v))),
        Formula::Next(x) => x.as_ref().clone(),
        Formula::Finally(x) => Formula::or2(after(x, v), f.clone()),
        Formula::Globally(x) => Formula::and2(after(x, v), f.clone()),
        Formula::Until(a, b) | Formula::WeakUntil(a, b) => {
            Formula::or2(after(b, v), Formula::and2(after(a, v), f.clone()))
        }
        Formula::Release(a, b) | Formula::StrongRelease(a, b) => {
            Formula::and2(after(b, v), Formula::or2(after(a, v), f.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn v(atoms: &[&str]) -> Valuation {
        Valuation::from_atoms(atoms.iter().copied())
    }

    #[test]
    fn globally_keeps_or_fails() {
        let g = parse("G a").unwrap();
        assert_eq!(after(&g, &v(&["a"])), g);
        assert_eq!(after(&g, &v(&[])), Formula::False);
    }

    #[test]
    fn next_strips_one_step() {
        assert_eq!(
            after(&parse("X b").unwrap(), &v(&["a"])),
            Formula::atom("b")
        );
    }

    #[test]
    fn until_and_releases() {
        let u = parse("a U b").unwrap();
        assert_eq!(after(&u, &v(&["b"])), Formula::True);
        assert_eq!(after(&u, &v(&["a"])), u);
        assert_eq!(after(&u, &v(&[])), Formula::False);

        let r = parse("a R b").unwrap();
        assert_eq!(after(&r, &v(&["a", "b"])), Formula::True);
        assert_eq!(after(&r, &v(&["b"])), r);
        assert_eq!(after(&r, &v(&["a"])), Formula::False);

        let m = parse("a M b").unwrap();
        assert_eq!(after(&m, &v(&["a", "b"])), Formula::True);
        assert_eq!(after(&m, &v(&["b"])), m);

        let w = parse("a W b").unwrap();
        assert_eq!(after(&w, &v(&["a"])), w);
        assert_eq!(after(&w, &v(&[])), Formula::False);
    }

    #[test]
    fn recurrence_is_stable() {
        let f = parse("G F c").unwrap();
        assert_eq!(after(&f, &v(&["c"])), f);
        let pending = after(&f, &v(&[]));
        assert_eq!(pending, parse("F c & G F c").unwrap());
        assert_eq!(after(&pending, &v(&[])), pending);
        assert_eq!(after(&pending, &v(&["c"])), f);
    }

    #[test]
    fn constants_are_fixed_points() {
        assert_eq!(after(&Formula::True, &v(&["a"])), Formula::True);
        assert_eq!(after(&Formula::False, &v(&["a"])), Formula::False);
    }
}
