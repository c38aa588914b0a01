//! Reference semantics on ultimately periodic words.

#![allow(dead_code)]

use std::collections::BTreeSet;

use synthrank::ltl::{Expr, Formula};

/// `stem` followed by `cycle` repeated forever; `cycle` is non-empty.
#[derive(Clone, Debug)]
pub struct Lasso {
    pub stem: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl Lasso {
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[i - self.stem.len()]
        }
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 == self.len() {
            self.stem.len()
        } else {
            i + 1
        }
    }

    /// The word without its first letter.
    pub fn tail(&self) -> Lasso {
        if self.stem.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            Lasso { stem: Vec::new(), cycle }
        } else {
            Lasso { stem: self.stem[1..].to_vec(), cycle: self.cycle.clone() }
        }
    }

    pub fn first(&self) -> &BTreeSet<String> {
        self.letter(0)
    }

    /// Fixpoint of `step` from `init`, where `step(i, sat)` reads the current
    /// approximation at the successor position.
    fn fix(&self, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
        let n = self.len();
        let mut sat = vec![init; n];
        loop {
            let new: Vec<bool> = (0..n).map(|i| step(i, sat[self.next(i)])).collect();
            if new == sat {
                return sat;
            }
            sat = new;
        }
    }

    fn until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fix(false, |i, x| b[i] || (a[i] && x))
    }

    fn weak_until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fix(true, |i, x| b[i] || (a[i] && x))
    }

    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fix(true, |i, x| b[i] && (a[i] || x))
    }

    fn strong_release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fix(false, |i, x| b[i] && (a[i] || x))
    }

    fn shift(&self, a: &[bool]) -> Vec<bool> {
        (0..self.len()).map(|i| a[self.next(i)]).collect()
    }

    /// Satisfaction of `f` at every position.
    pub fn formula(&self, f: &Formula) -> Vec<bool> {
        let n = self.len();
        let c = f.children();
        let sub = |k: usize| self.formula(c[k]);
        match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(a) => (0..n).map(|i| self.letter(i).contains(&**a)).collect(),
            Formula::NegAtom(a) => (0..n).map(|i| !self.letter(i).contains(&**a)).collect(),
            Formula::And(_) => {
                let parts: Vec<Vec<bool>> = c.iter().map(|x| self.formula(x)).collect();
                (0..n).map(|i| parts.iter().all(|p| p[i])).collect()
            }
            Formula::Or(_) => {
                let parts: Vec<Vec<bool>> = c.iter().map(|x| self.formula(x)).collect();
                (0..n).map(|i| parts.iter().any(|p| p[i])).collect()
            }
            Formula::Next(_) => self.shift(&sub(0)),
            Formula::Finally(_) => self.until(&vec![true; n], &sub(0)),
            Formula::Globally(_) => self.release(&vec![false; n], &sub(0)),
            Formula::Until(..) => self.until(&sub(0), &sub(1)),
            Formula::WeakUntil(..) => self.weak_until(&sub(0), &sub(1)),
            Formula::Release(..) => self.release(&sub(0), &sub(1)),
            Formula::StrongRelease(..) => self.strong_release(&sub(0), &sub(1)),
        }
    }

    pub fn expr(&self, e: &Expr) -> Vec<bool> {
        let n = self.len();
        let map2 = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
            a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
        };
        match e {
            Expr::Const(b) => vec![*b; n],
            Expr::Atom(a) => (0..n).map(|i| self.letter(i).contains(a)).collect(),
            Expr::Not(x) => self.expr(x).into_iter().map(|b| !b).collect(),
            Expr::And(a, b) => map2(self.expr(a), self.expr(b), |x, y| x && y),
            Expr::Or(a, b) => map2(self.expr(a), self.expr(b), |x, y| x || y),
            Expr::Implies(a, b) => map2(self.expr(a), self.expr(b), |x, y| !x || y),
            Expr::Iff(a, b) => map2(self.expr(a), self.expr(b), |x, y| x == y),
            Expr::Next(x) => self.shift(&self.expr(x)),
            Expr::Finally(x) => self.until(&vec![true; n], &self.expr(x)),
            Expr::Globally(x) => self.release(&vec![false; n], &self.expr(x)),
            Expr::Until(a, b) => self.until(&self.expr(a), &self.expr(b)),
            Expr::WeakUntil(a, b) => self.weak_until(&self.expr(a), &self.expr(b)),
            Expr::Release(a, b) => self.release(&self.expr(a), &self.expr(b)),
            Expr::StrongRelease(a, b) => self.strong_release(&self.expr(a), &self.expr(b)),
        }
    }

    pub fn holds(&self, f: &Formula) -> bool {
        self.formula(f)[0]
    }
}
