use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An LTL formula in negation normal form.
///
/// Values are only built through the smart constructors below, which keep
/// conjunctions and disjunctions flat, sorted and free of duplicates, and fold
/// the constants away. Two formulae that differ only in the order of
/// conjuncts are therefore structurally equal, and the derived `Ord` doubles
/// as the canonical ordering of children.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    NegAtom(Arc<str>),
    And(Arc<[Formula]>),
    Or(Arc<[Formula]>),
    Next(Arc<Formula>),
    Finally(Arc<Formula>),
    Globally(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    WeakUntil(Arc<Formula>, Arc<Formula>),
    Release(Arc<Formula>, Arc<Formula>),
    StrongRelease(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn tt() -> Self {
        Formula::True
    }

    pub fn ff() -> Self {
        Formula::False
    }

    pub fn constant(value: bool) -> Self {
        if value {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn atom(name: &str) -> Self {
        Formula::Atom(Arc::from(name))
    }

    pub fn neg_atom(name: &str) -> Self {
        Formula::NegAtom(Arc::from(name))
    }

    pub fn literal(name: &str, positive: bool) -> Self {
        if positive {
            Self::atom(name)
        } else {
            Self::neg_atom(name)
        }
    }

    pub fn and<I: IntoIterator<Item = Formula>>(children: I) -> Self {
        Self::junction(children, true)
    }

    pub fn or<I: IntoIterator<Item = Formula>>(children: I) -> Self {
        Self::junction(children, false)
    }

    pub fn and2(a: Formula, b: Formula) -> Self {
        Self::and([a, b])
    }

    pub fn or2(a: Formula, b: Formula) -> Self {
        Self::or([a, b])
    }

    fn junction<I: IntoIterator<Item = Formula>>(children: I, conjunction: bool) -> Self {
        let mut flat = Vec::new();
        for child in children {
            match child {
                Formula::True if conjunction => {}
                Formula::False if !conjunction => {}
                Formula::False if conjunction => return Formula::False,
                Formula::True if !conjunction => return Formula::True,
                Formula::And(cs) if conjunction => flat.extend(cs.iter().cloned()),
                Formula::Or(cs) if !conjunction => flat.extend(cs.iter().cloned()),
                other => flat.push(other),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => Formula::constant(conjunction),
            1 => flat.pop().unwrap(),
            _ if conjunction => Formula::And(flat.into()),
            _ => Formula::Or(flat.into()),
        }
    }

    pub fn next(f: Formula) -> Self {
        match f {
            Formula::True | Formula::False => f,
            _ => Formula::Next(Arc::new(f)),
        }
    }

    pub fn finally(f: Formula) -> Self {
        match f {
            Formula::True | Formula::False => f,
            _ => Formula::Finally(Arc::new(f)),
        }
    }

    pub fn globally(f: Formula) -> Self {
        match f {
            Formula::True | Formula::False => f,
            _ => Formula::Globally(Arc::new(f)),
        }
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Self {
        match (&lhs, &rhs) {
            (_, Formula::True) => Formula::True,
            (_, Formula::False) => Formula::False,
            (Formula::True, _) => Self::finally(rhs),
            (Formula::False, _) => rhs,
            _ => Formula::Until(Arc::new(lhs), Arc::new(rhs)),
        }
    }

    pub fn weak_until(lhs: Formula, rhs: Formula) -> Self {
        match (&lhs, &rhs) {
            (_, Formula::True) | (Formula::True, _) => Formula::True,
            (Formula::False, _) => rhs,
            (_, Formula::False) => Self::globally(lhs),
            _ => Formula::WeakUntil(Arc::new(lhs), Arc::new(rhs)),
        }
    }

    pub fn release(lhs: Formula, rhs: Formula) -> Self {
        match (&lhs, &rhs) {
            (_, Formula::True) => Formula::True,
            (_, Formula::False) => Formula::False,
            (Formula::True, _) => rhs,
            (Formula::False, _) => Self::globally(rhs),
            _ => Formula::Release(Arc::new(lhs), Arc::new(rhs)),
        }
    }

    pub fn strong_release(lhs: Formula, rhs: Formula) -> Self {
        match (&lhs, &rhs) {
            (_, Formula::False) | (Formula::False, _) => Formula::False,
            (Formula::True, _) => rhs,
            (_, Formula::True) => Self::finally(lhs),
            _ => Formula::StrongRelease(Arc::new(lhs), Arc::new(rhs)),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    pub fn is_constant(&self) -> bool {
        self.is_true() || self.is_false()
    }

    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            Formula::Next(_)
                | Formula::Finally(_)
                | Formula::Globally(_)
                | Formula::Until(..)
                | Formula::WeakUntil(..)
                | Formula::Release(..)
                | Formula::StrongRelease(..)
        )
    }

    /// Direct subformulae, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => Vec::new(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().collect(),
            Formula::Next(f) | Formula::Finally(f) | Formula::Globally(f) => vec![f.as_ref()],
            Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::Release(a, b)
            | Formula::StrongRelease(a, b) => vec![a.as_ref(), b.as_ref()],
        }
    }

    /// Negation, pushed down to the atoms.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::And(cs) => Formula::or(cs.iter().map(Formula::negated)),
            Formula::Or(cs) => Formula::and(cs.iter().map(Formula::negated)),
            Formula::Next(f) => Formula::next(f.negated()),
            Formula::Finally(f) => Formula::globally(f.negated()),
            Formula::Globally(f) => Formula::finally(f.negated()),
            Formula::Until(a, b) => Formula::release(a.negated(), b.negated()),
            Formula::Release(a, b) => Formula::until(a.negated(), b.negated()),
            Formula::WeakUntil(a, b) => Formula::strong_release(a.negated(), b.negated()),
            Formula::StrongRelease(a, b) => Formula::weak_until(a.negated(), b.negated()),
        }
    }

    /// Rebuilds the formula bottom-up through the smart constructors.
    pub fn map_children<F: FnMut(&Formula) -> Formula>(&self, mut f: F) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => self.clone(),
            Formula::And(cs) => Formula::and(cs.iter().map(&mut f)),
            Formula::Or(cs) => Formula::or(cs.iter().map(&mut f)),
            Formula::Next(x) => Formula::next(f(x)),
            Formula::Finally(x) => Formula::finally(f(x)),
            Formula::Globally(x) => Formula::globally(f(x)),
            Formula::Until(a, b) => {
                let a = f(a);
                Formula::until(a, f(b))
            }
            Formula::WeakUntil(a, b) => {
                let a = f(a);
                Formula::weak_until(a, f(b))
            }
            Formula::Release(a, b) => {
                let a = f(a);
                Formula::release(a, f(b))
            }
            Formula::StrongRelease(a, b) => {
                let a = f(a);
                Formula::strong_release(a, f(b))
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) => {
                out.insert(a.to_string());
            }
            _ => {
                for c in self.children() {
                    c.collect_atoms(out);
                }
            }
        }
    }

    /// Number of syntax-tree nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn any_node<P: Fn(&Formula) -> bool + Copy>(&self, pred: P) -> bool {
        pred(self) || self.children().iter().any(|c| c.any_node(pred))
    }

    /// True if no F, U or M occurs (the formula is a safety formula).
    pub fn is_syntactic_safety(&self) -> bool {
        !self.any_node(|f| {
            matches!(
                f,
                Formula::Finally(_) | Formula::Until(..) | Formula::StrongRelease(..)
            )
        })
    }

    /// True if no G, W or R occurs (the formula is a co-safety formula).
    pub fn is_syntactic_cosafety(&self) -> bool {
        !self.any_node(|f| {
            matches!(
                f,
                Formula::Globally(_) | Formula::WeakUntil(..) | Formula::Release(..)
            )
        })
    }

    /// Top-level conjuncts; a non-conjunction is its own single conjunct.
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::And(cs) => cs.to_vec(),
            other => vec![other.clone()],
        }
    }

    /// Replaces every literal over an atom in `atoms` by `X` of that literal.
    pub fn delay_atoms(&self, atoms: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Atom(a) | Formula::NegAtom(a) if atoms.contains(a.as_ref()) => {
                Formula::next(self.clone())
            }
            _ => self.map_children(|c| c.delay_atoms(atoms)),
        }
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
        let open = |f: &mut fmt::Formatter<'_>| if top { Ok(()) } else { f.write_str("(") };
        let close = |f: &mut fmt::Formatter<'_>| if top { Ok(()) } else { f.write_str(")") };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => f.write_str(a),
            Formula::NegAtom(a) => write!(f, "!{a}"),
            Formula::And(cs) | Formula::Or(cs) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                open(f)?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    c.fmt_inner(f, false)?;
                }
                close(f)
            }
            Formula::Next(x) => {
                f.write_str("X ")?;
                x.fmt_inner(f, false)
            }
            Formula::Finally(x) => {
                f.write_str("F ")?;
                x.fmt_inner(f, false)
            }
            Formula::Globally(x) => {
                f.write_str("G ")?;
                x.fmt_inner(f, false)
            }
            Formula::Until(a, b)
            | Formula::WeakUntil(a, b)
            | Formula::Release(a, b)
            | Formula::StrongRelease(a, b) => {
                let op = match self {
                    Formula::Until(..) => "U",
                    Formula::WeakUntil(..) => "W",
                    Formula::Release(..) => "R",
                    _ => "M",
                };
                open(f)?;
                a.fmt_inner(f, false)?;
                write!(f, " {op} ")?;
                b.fmt_inner(f, false)?;
                close(f)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Recomputes the canonical form of a formula.
///
/// The smart constructors already keep every value canonical, so this is the
/// identity on values built through them; it exists for values assembled by
/// hand and to state the contract in tests.
pub fn simplify(f: &Formula) -> Formula {
    f.map_children(simplify)
}

/// A set of atomic propositions assigned true; all other atoms are false.
#[derive(
    Clone,
    Debug,
    Default,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    serde::Serialize,
    serde::Deserialize,
)]
#[serde(transparent)]
pub struct Valuation(BTreeSet<String>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_atoms<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Valuation(atoms.into_iter().map(Into::into).collect())
    }

    /// The valuation over `props` encoded by the low bits of `mask`.
    pub fn from_mask(props: &[String], mask: u64) -> Self {
        Valuation(
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect(),
        )
    }

    pub fn contains(&self, atom: &str) -> bool {
        self.0.contains(atom)
    }

    pub fn union(&self, other: &Valuation) -> Valuation {
        Valuation(self.0.union(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a)?;
        }
        f.write_str("}")
    }
}

/// Split of the atomic propositions between the two players.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Partition {
    pub system: BTreeSet<String>,
    pub environment: BTreeSet<String>,
}

impl Partition {
    pub fn new<I, J, S, T>(system: I, environment: J) -> Result<Self, PartitionError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let system: BTreeSet<String> = system.into_iter().map(Into::into).collect();
        let environment: BTreeSet<String> = environment.into_iter().map(Into::into).collect();
        if let Some(shared) = system.intersection(&environment).next() {
            return Err(PartitionError::Overlap(shared.clone()));
        }
        Ok(Partition {
            system,
            environment,
        })
    }

    /// The listed atoms are system-controlled, every other atom of `f` belongs
    /// to the environment.
    pub fn from_system<I, S>(f: &Formula, system: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let system: BTreeSet<String> = system.into_iter().map(Into::into).collect();
        let environment = f.atoms().difference(&system).cloned().collect();
        Partition {
            system,
            environment,
        }
    }

    pub fn swapped(&self) -> Self {
        Partition {
            system: self.environment.clone(),
            environment: self.system.clone(),
        }
    }

    pub fn is_system(&self, atom: &str) -> bool {
        self.system.contains(atom)
    }

    pub fn covers(&self, f: &Formula) -> Result<(), PartitionError> {
        match f
            .atoms()
            .into_iter()
            .find(|a| !self.system.contains(a) && !self.environment.contains(a))
        {
            Some(a) => Err(PartitionError::Uncovered(a)),
            None => Ok(()),
        }
    }

    pub fn system_props(&self) -> Vec<String> {
        self.system.iter().cloned().collect()
    }

    pub fn environment_props(&self) -> Vec<String> {
        self.environment.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("proposition `{0}` is assigned to both players")]
    Overlap(String),
    #[error("proposition `{0}` is assigned to neither player")]
    Uncovered(String),
}
