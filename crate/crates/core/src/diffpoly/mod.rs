//! Differential polynomials over the Gaussian rationals.
//!
//! A [`DiffPoly`] is a finite sum of terms `c * params * jets`, where `c` is an exact
//! [`Coeff`], `params` is a monomial in named constants (exponents in half-units so
//! that `kappa^(1/2)` is representable) and `jets` is a monomial in jet variables
//! `f_{x^a t^b}`.

mod eval;
mod integrate;
mod json;
mod latex;
mod text;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};

pub use eval::Sample;
pub use json::PolyJson;
pub use text::{parse_poly, Context};

/// Parity under `x -> -x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    fn xor(self, odd: bool) -> Parity {
        if odd {
            self.flip()
        } else {
            self
        }
    }
}

/// Parity of a whole polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyParity {
    /// The zero polynomial (both even and odd).
    Zero,
    Even,
    Odd,
    Mixed,
}

/// A dependent variable. Time-only fields (integration functions such as `b(t)`)
/// have vanishing x-derivatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    pub name: Arc<str>,
    pub parity: Parity,
    pub time_only: bool,
}

impl Field {
    pub fn new(name: &str, parity: Parity) -> Field {
        Field { name: Arc::from(name), parity, time_only: false }
    }

    pub fn even(name: &str) -> Field {
        Field::new(name, Parity::Even)
    }

    pub fn odd(name: &str) -> Field {
        Field::new(name, Parity::Odd)
    }

    pub fn time_only(name: &str) -> Field {
        Field { name: Arc::from(name), parity: Parity::Even, time_only: true }
    }

    pub fn jet(&self, dx: u32, dt: u32) -> JetVar {
        JetVar { field: self.clone(), dx, dt }
    }

    /// The field itself as a polynomial.
    pub fn poly(&self) -> DiffPoly {
        DiffPoly::jet(self.jet(0, 0))
    }

    /// `d_x^k f` as a polynomial.
    pub fn dx(&self, k: u32) -> DiffPoly {
        DiffPoly::jet(self.jet(k, 0))
    }
}

/// The jet variable `field_{x^dx t^dt}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetVar {
    pub field: Field,
    pub dx: u32,
    pub dt: u32,
}

impl Ord for JetVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .name
            .cmp(&other.field.name)
            .then(self.dt.cmp(&other.dt))
            .then(self.dx.cmp(&other.dx))
            .then(self.field.cmp(&other.field))
    }
}

impl PartialOrd for JetVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl JetVar {
    pub fn parity(&self) -> Parity {
        self.field.parity.xor((self.dx + self.dt) % 2 == 1)
    }

    /// `d_x` of this jet, or `None` when it vanishes.
    pub fn dx_jet(&self) -> Option<JetVar> {
        if self.field.time_only {
            None
        } else {
            Some(JetVar { field: self.field.clone(), dx: self.dx + 1, dt: self.dt })
        }
    }

    pub fn dt_jet(&self) -> JetVar {
        JetVar { field: self.field.clone(), dx: self.dx, dt: self.dt + 1 }
    }
}

/// Monomial in parameters (half-integer exponents) and jet variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    deg: u32,
    jets: Vec<(JetVar, u32)>,
    params: Vec<(Arc<str>, i32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn from_parts(mut jets: Vec<(JetVar, u32)>, mut params: Vec<(Arc<str>, i32)>) -> Monomial {
        jets.sort();
        params.sort();
        let mut m = Monomial { deg: 0, jets: Vec::new(), params: Vec::new() };
        for (j, e) in jets {
            m.push_jet(j, e);
        }
        for (p, e) in params {
            match m.params.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => m.params.push((p, e)),
            }
        }
        m.params.retain(|(_, e)| *e != 0);
        m
    }

    fn push_jet(&mut self, j: JetVar, e: u32) {
        if e == 0 {
            return;
        }
        self.deg += e;
        match self.jets.last_mut() {
            Some((k, f)) if *k == j => *f += e,
            _ => self.jets.push((j, e)),
        }
    }

    /// Jet factors with exponents, sorted.
    pub fn jets(&self) -> &[(JetVar, u32)] {
        &self.jets
    }

    /// Parameter factors with exponents in half-units, sorted.
    pub fn params(&self) -> &[(Arc<str>, i32)] {
        &self.params
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut jets = Vec::with_capacity(self.jets.len() + o.jets.len());
        let (mut i, mut k) = (0, 0);
        while i < self.jets.len() || k < o.jets.len() {
            let take_left = if i == self.jets.len() {
                false
            } else if k == o.jets.len() {
                true
            } else {
                match self.jets[i].0.cmp(&o.jets[k].0) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        jets.push((self.jets[i].0.clone(), self.jets[i].1 + o.jets[k].1));
                        i += 1;
                        k += 1;
                        continue;
                    }
                }
            };
            if take_left {
                jets.push(self.jets[i].clone());
                i += 1;
            } else {
                jets.push(o.jets[k].clone());
                k += 1;
            }
        }
        let mut params: BTreeMap<Arc<str>, i32> = BTreeMap::new();
        for (p, e) in self.params.iter().chain(o.params.iter()) {
            *params.entry(p.clone()).or_insert(0) += e;
        }
        Monomial {
            deg: self.deg + o.deg,
            jets,
            params: params.into_iter().filter(|(_, e)| *e != 0).collect(),
        }
    }

    /// The monomial with the given jet removed entirely, and its exponent.
    fn remove_jet(&self, v: &JetVar) -> (Monomial, u32) {
        let mut out = self.clone();
        if let Some(pos) = out.jets.iter().position(|(j, _)| j == v) {
            let (_, e) = out.jets.remove(pos);
            out.deg -= e;
            (out, e)
        } else {
            (out, 0)
        }
    }

    /// The parameter part only.
    pub fn param_part(&self) -> Monomial {
        Monomial { deg: 0, jets: Vec::new(), params: self.params.clone() }
    }

    pub fn jet_part(&self) -> Monomial {
        Monomial { deg: self.deg, jets: self.jets.clone(), params: Vec::new() }
    }

    pub fn parity(&self) -> Parity {
        let odd = self
            .jets
            .iter()
            .filter(|(j, e)| j.parity() == Parity::Odd && e % 2 == 1)
            .count();
        Parity::Even.xor(odd % 2 == 1)
    }
}

/// A differential polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl DiffPoly {
    pub fn zero() -> DiffPoly {
        DiffPoly::default()
    }

    pub fn one() -> DiffPoly {
        DiffPoly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> DiffPoly {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> DiffPoly {
        DiffPoly::constant(Coeff::int(n))
    }

    pub fn term(c: Coeff, m: Monomial) -> DiffPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn jet(v: JetVar) -> DiffPoly {
        DiffPoly::term(Coeff::one(), Monomial::from_parts(vec![(v, 1)], vec![]))
    }

    /// A parameter raised to an integer power.
    pub fn param(name: &str) -> DiffPoly {
        DiffPoly::param_pow(name, 2)
    }

    /// A parameter raised to `half_exp / 2`.
    pub fn param_pow(name: &str, half_exp: i32) -> DiffPoly {
        DiffPoly::term(Coeff::one(), Monomial::from_parts(vec![], vec![(Arc::from(name), half_exp)]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Coeff)>>(it: I) -> DiffPoly {
        let mut p = DiffPoly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &DiffPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, o: &DiffPoly) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, c: &Coeff, mono: &Monomial) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, k) in &self.terms {
            out.add_term(m.mul(mono), &(k * c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Constant coefficient if this polynomial is a bare number.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.jets.is_empty() && m.params.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// True if the polynomial contains no jet variables.
    pub fn is_jet_free(&self) -> bool {
        self.terms.keys().all(|m| m.jets.is_empty())
    }

    /// Total x-derivative.
    pub fn dx(&self) -> DiffPoly {
        self.derive(|j| j.dx_jet())
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.dx();
        }
        p
    }

    /// Total t-derivative (no equations of motion imposed).
    pub fn dt(&self) -> DiffPoly {
        self.derive(|j| Some(j.dt_jet()))
    }

    fn derive(&self, d: impl Fn(&JetVar) -> Option<JetVar>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, (v, e)) in m.jets.iter().enumerate() {
                let Some(dv) = d(v) else { continue };
                let mut rest = m.clone();
                if *e == 1 {
                    rest.jets.remove(idx);
                } else {
                    rest.jets[idx].1 -= 1;
                }
                rest.deg -= 1;
                let nm = rest.mul(&Monomial::from_parts(vec![(dv, 1)], vec![]));
                out.add_term(nm, &(c * &Coeff::int(*e as i64)));
            }
        }
        out
    }

    /// Partial derivative with respect to one jet variable.
    pub fn partial(&self, v: &JetVar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.remove_jet(v);
            if e == 0 {
                continue;
            }
            let nm = if e > 1 { rest.mul(&Monomial::from_parts(vec![(v.clone(), e - 1)], vec![])) } else { rest };
            out.add_term(nm, &(c * &Coeff::int(e as i64)));
        }
        out
    }

    /// All jet variables occurring.
    pub fn jets(&self) -> BTreeSet<JetVar> {
        self.terms.keys().flat_map(|m| m.jets.iter().map(|(j, _)| j.clone())).collect()
    }

    /// All fields occurring (by name).
    pub fn fields(&self) -> BTreeMap<Arc<str>, Field> {
        self.jets().into_iter().map(|j| (j.field.name.clone(), j.field)).collect()
    }

    /// All parameter names occurring.
    pub fn params(&self) -> BTreeSet<Arc<str>> {
        self.terms.keys().flat_map(|m| m.params.iter().map(|(p, _)| p.clone())).collect()
    }

    pub fn contains_field(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.jets.iter().any(|(j, _)| &*j.field.name == name))
    }

    pub fn contains_param(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.params.iter().any(|(p, _)| &**p == name))
    }

    /// True if any jet carries a t-derivative.
    pub fn has_t_jets(&self) -> bool {
        self.jets().iter().any(|j| j.dt > 0)
    }

    /// Highest x-derivative order of the named field, if present.
    pub fn max_dx(&self, name: &str) -> Option<u32> {
        self.jets().iter().filter(|j| &*j.field.name == name).map(|j| j.dx).max()
    }

    /// Parity classification.
    pub fn parity(&self) -> PolyParity {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            match m.parity() {
                Parity::Even => even = true,
                Parity::Odd => odd = true,
            }
        }
        match (even, odd) {
            (false, false) => PolyParity::Zero,
            (true, false) => PolyParity::Even,
            (false, true) => PolyParity::Odd,
            (true, true) => PolyParity::Mixed,
        }
    }

    /// Replace jet variables: `f(v)` returns the replacement or `None` to keep `v`.
    pub fn substitute_jets(&self, mut f: impl FnMut(&JetVar) -> Option<DiffPoly>) -> DiffPoly {
        let mut cache: HashMap<JetVar, Option<DiffPoly>> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial { deg: 0, jets: Vec::new(), params: m.params.clone() };
            let mut factor = DiffPoly::one();
            for (v, e) in &m.jets {
                let rep = cache.entry(v.clone()).or_insert_with(|| f(v)).clone();
                match rep {
                    Some(p) => {
                        for _ in 0..*e {
                            factor = &factor * &p;
                        }
                    }
                    None => kept.push_jet(v.clone(), *e),
                }
            }
            out.add_assign(&factor.mul_monomial(c, &kept));
        }
        out
    }

    /// Replace a field and all its derivatives: `f_{x^a t^b} -> d_x^a d_t^b p`.
    pub fn substitute_field(&self, name: &str, p: &DiffPoly) -> DiffPoly {
        let mut cache: HashMap<(u32, u32), DiffPoly> = HashMap::new();
        self.substitute_jets(|v| {
            if &*v.field.name != name {
                return None;
            }
            Some(
                cache
                    .entry((v.dx, v.dt))
                    .or_insert_with(|| {
                        let mut r = p.dx_n(v.dx);
                        for _ in 0..v.dt {
                            r = r.dt();
                        }
                        r
                    })
                    .clone(),
            )
        })
    }

    /// Rename or re-type a field (e.g. mark it time-only); x-derivatives of a
    /// time-only replacement vanish.
    pub fn replace_field(&self, name: &str, new: &Field) -> DiffPoly {
        self.substitute_jets(|v| {
            if &*v.field.name != name {
                return None;
            }
            if new.time_only && v.dx > 0 {
                Some(DiffPoly::zero())
            } else {
                Some(DiffPoly::jet(new.jet(v.dx, v.dt)))
            }
        })
    }

    /// Substitute a parameter by a polynomial. Negative powers require the
    /// replacement to be a single jet-free term; half-integer powers are rejected.
    pub fn substitute_param(&self, name: &str, p: &DiffPoly) -> Result<DiffPoly> {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let Some(pos) = m.params.iter().position(|(q, _)| &**q == name) else {
                out.add_term(m.clone(), c);
                continue;
            };
            let e = m.params[pos].1;
            if e % 2 != 0 {
                return Err(Error::InvalidArgument(format!("cannot substitute half power of {name}")));
            }
            let mut rest = m.clone();
            rest.params.remove(pos);
            let n = e / 2;
            let factor = if n >= 0 {
                p.pow(n as u32)
            } else {
                p.single_term_inverse()
                    .ok_or_else(|| Error::InvalidArgument(format!("cannot invert replacement for {name}")))?
                    .pow((-n) as u32)
            };
            out.add_assign(&factor.mul_monomial(c, &rest));
        }
        Ok(out)
    }

    fn single_term_inverse(&self) -> Option<DiffPoly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if !m.jets.is_empty() {
            return None;
        }
        let params = m.params.iter().map(|(p, e)| (p.clone(), -e)).collect();
        Some(DiffPoly::term(c.inv()?, Monomial::from_parts(vec![], params)))
    }

    /// Write `self = c * v + rest` with `c`, `rest` free of `v`; `None` if `v`
    /// appears non-linearly.
    pub fn split_linear(&self, v: &JetVar) -> Option<(DiffPoly, DiffPoly)> {
        let mut c = DiffPoly::zero();
        let mut rest = DiffPoly::zero();
        for (m, k) in &self.terms {
            let (r, e) = m.remove_jet(v);
            match e {
                0 => rest.add_term(m.clone(), k),
                1 => c.add_term(r, k),
                _ => return None,
            }
        }
        Some((c, rest))
    }

    /// Keep only terms satisfying a predicate.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Divide every coefficient by `c`.
    pub fn div_coeff(&self, c: &Coeff) -> DiffPoly {
        self.scale(&c.inv().expect("division by zero"))
    }

    /// Variational derivative `sum_k (-d_x)^k dP/df_(k)` with respect to a field.
    pub fn variational(&self, field: &str) -> Result<DiffPoly> {
        if self.has_t_jets() {
            return Err(Error::TJetInDensity(self.to_string()));
        }
        let mut out = DiffPoly::zero();
        for v in self.jets().into_iter().filter(|v| &*v.field.name == field) {
            let mut part = self.partial(&v);
            for _ in 0..v.dx {
                part = -part.dx();
            }
            out.add_assign(&part);
        }
        Ok(out)
    }

    /// Normalize so that the coefficient of the given monomial becomes 1.
    pub fn normalized_by(&self, m: &Monomial) -> Option<DiffPoly> {
        let c = self.terms.get(m)?;
        Some(self.div_coeff(c))
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Exact x-antiderivative; see the `integrate` module.
    pub fn integrate_x(&self) -> Result<DiffPoly> {
        integrate::integrate_x(self)
    }

    /// Map every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> DiffPoly {
        DiffPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Collect by parameter monomial: `{param monomial -> jet polynomial}`.
    pub fn collect_params(&self) -> BTreeMap<Monomial, DiffPoly> {
        let mut out: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.param_part()).or_default().add_term(m.jet_part(), c);
        }
        out
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_poly(self))
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, o: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, o: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out.sub_assign(o);
        out
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, o: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -self.clone()
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, o: DiffPoly) -> DiffPoly {
        self.add_assign(&o);
        self
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, o: DiffPoly) -> DiffPoly {
        self.sub_assign(&o);
        self
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, o: DiffPoly) -> DiffPoly {
        &self * &o
    }
}

impl From<Coeff> for DiffPoly {
    fn from(c: Coeff) -> Self {
        DiffPoly::constant(c)
    }
}
