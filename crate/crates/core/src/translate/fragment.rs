use serde::{Deserialize, Serialize};

use crate::ltl::Formula;

/// Syntactic class deciding how a formula is turned into a game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fragment {
    Safety,
    CoSafety,
    GConjunction,
    Unsupported,
}

impl std::fmt::Display for Fragment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Fragment::Safety => "safety",
            Fragment::CoSafety => "co-safety",
            Fragment::GConjunction => "G-conjunction",
            Fragment::Unsupported => "unsupported",
        })
    }
}

/// `G ψ` with a co-safety body that needs liveness tracking.
pub(crate) fn recurring_body(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Globally(body) if body.is_syntactic_cosafety() && !body.is_syntactic_safety() => {
            Some(body)
        }
        _ => None,
    }
}

pub fn classify_fragment(f: &Formula) -> Fragment {
    if f.is_syntactic_safety() {
        return Fragment::Safety;
    }
    if f.is_syntactic_cosafety() {
        return Fragment::CoSafety;
    }
    let fits = f.conjuncts().iter().all(|c| {
        c.is_syntactic_safety() || c.is_syntactic_cosafety() || recurring_body(c).is_some()
    });
    if fits {
        Fragment::GConjunction
    } else {
        Fragment::Unsupported
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn class(s: &str) -> Fragment {
        classify_fragment(&parse(s).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(class("G a"), Fragment::Safety);
        assert_eq!(class("a U b"), Fragment::CoSafety);
        assert_eq!(class("F c & G F c & G (r -> F g)"), Fragment::GConjunction);
        assert_eq!(class("a & b"), Fragment::Safety);
    }

    #[test]
    fn mixed_conjuncts() {
        assert_eq!(class("G a & F b"), Fragment::GConjunction);
        assert_eq!(class("G a & G F b & (c W d)"), Fragment::GConjunction);
        assert_eq!(class("F G a"), Fragment::Unsupported);
        assert_eq!(class("G F a | G F b"), Fragment::Unsupported);
        assert_eq!(class("G (a U (G b))"), Fragment::Unsupported);
    }
}
