//! Imposing equations of motion as rewrite rules on t-jets.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::diffpoly::{DiffPoly, Field, JetVar};

/// Evolution equations `q_t = q_t_rhs`, `r_t = r_t_rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EomPair {
    pub label: String,
    pub q: Field,
    pub r: Field,
    pub q_t: DiffPoly,
    pub r_t: DiffPoly,
}

impl EomPair {
    pub fn new(label: impl Into<String>, q_t: DiffPoly, r_t: DiffPoly) -> EomPair {
        EomPair { label: label.into(), q: Field::even("q"), r: Field::even("r"), q_t, r_t }
    }

    pub fn rewriter(&self) -> Rewriter {
        Rewriter::new([(self.q.clone(), self.q_t.clone()), (self.r.clone(), self.r_t.clone())])
    }

    /// Residual forms `q_t - rhs` and `r_t - rhs`.
    pub fn residuals(&self) -> (DiffPoly, DiffPoly) {
        (
            &DiffPoly::jet(self.q.jet(0, 1)) - &self.q_t,
            &DiffPoly::jet(self.r.jet(0, 1)) - &self.r_t,
        )
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> EomPair {
        EomPair { label: self.label.clone(), q: self.q.clone(), r: self.r.clone(), q_t: f(&self.q_t), r_t: f(&self.r_t) }
    }

    pub fn to_json(&self) -> EomJson {
        EomJson { label: self.label.clone(), q_t: self.q_t.to_string(), r_t: self.r_t.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EomJson {
    pub label: String,
    pub q_t: String,
    pub r_t: String,
}

impl fmt::Display for EomPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}_t = {}", self.q.name, self.q_t)?;
        write!(f, "{}_t = {}", self.r.name, self.r_t)
    }
}

/// Replaces every jet `f_{x^a t^b}` with `b >= 1` of a ruled field by
/// `d_x^a` of the rule iterated through `d_t`, until no ruled t-jets remain.
#[derive(Debug)]
pub struct Rewriter {
    rules: BTreeMap<String, DiffPoly>,
    cache: RefCell<HashMap<JetVar, DiffPoly>>,
}

impl Rewriter {
    pub fn new(rules: impl IntoIterator<Item = (Field, DiffPoly)>) -> Rewriter {
        Rewriter {
            rules: rules.into_iter().map(|(f, p)| (f.name.to_string(), p)).collect(),
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// Add or replace a rule for a field.
    pub fn insert(&mut self, f: &Field, rhs: DiffPoly) {
        self.rules.insert(f.name.to_string(), rhs);
        self.cache.borrow_mut().clear();
    }

    pub fn apply(&self, p: &DiffPoly) -> DiffPoly {
        p.substitute_jets(|v| self.jet(v))
    }

    fn jet(&self, v: &JetVar) -> Option<DiffPoly> {
        if v.dt == 0 {
            return None;
        }
        let rule = self.rules.get(&*v.field.name)?;
        if let Some(p) = self.cache.borrow().get(v) {
            return Some(p.clone());
        }
        let out = if v.dt == 1 {
            self.apply(&rule.dx_n(v.dx))
        } else {
            let lower = JetVar { field: v.field.clone(), dx: v.dx, dt: v.dt - 1 };
            let p = self.jet(&lower).unwrap();
            self.apply(&p.dt())
        };
        self.cache.borrow_mut().insert(v.clone(), out.clone());
        Some(out)
    }
}
