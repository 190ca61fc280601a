//! Loop-algebra elements with polynomial coefficients.
//!
//! Two representations are used:
//!
//! * [`LaxMatrix`]: graded `gl(2)` elements in the basis `I, σ3, σ+, σ-` with
//!   `[σ3, σ±] = ±2σ±`, `[σ+, σ-] = σ3`. Lax pairs and curvatures live here.
//! * [`LoopElement`]: graded elements in the abstract basis `b^j, F1^j, F2^j` with
//!   `[b^j, F1^k] = F2^(j+k)`, `[b^j, F2^k] = F1^(j+k)`, `[F1^j, F2^k] = (κ/2) b^(j+k)`.
//!   Abelianization and charge densities live here.
//!
//! The linear identification `b^j = λ^j σ3`, `F1^j = λ^j (κσ+ - σ-)/2`,
//! `F2^j = λ^j (κσ+ + σ-)/2` is provided for converting potentials between the two.
//! It is not a Lie-algebra homomorphism (under it `[b, F1] = 2 F2`), so brackets must
//! be taken in the representation an element belongs to.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::Coeff;
use crate::diffpoly::{DiffPoly, Field};
use crate::error::{Error, Result};

/// Component selector for [`Sigma`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Comp {
    Id,
    S3,
    Plus,
    Minus,
}

impl Comp {
    pub const ALL: [Comp; 4] = [Comp::Id, Comp::S3, Comp::Plus, Comp::Minus];

    pub fn name(self) -> &'static str {
        match self {
            Comp::Id => "I",
            Comp::S3 => "sigma3",
            Comp::Plus => "sigma+",
            Comp::Minus => "sigma-",
        }
    }
}

/// `id*I + s3*σ3 + plus*σ+ + minus*σ-`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sigma {
    pub id: DiffPoly,
    pub s3: DiffPoly,
    pub plus: DiffPoly,
    pub minus: DiffPoly,
}

impl Sigma {
    pub fn new(s3: DiffPoly, plus: DiffPoly, minus: DiffPoly) -> Sigma {
        Sigma { id: DiffPoly::zero(), s3, plus, minus }
    }

    pub fn get(&self, c: Comp) -> &DiffPoly {
        match c {
            Comp::Id => &self.id,
            Comp::S3 => &self.s3,
            Comp::Plus => &self.plus,
            Comp::Minus => &self.minus,
        }
    }

    pub fn get_mut(&mut self, c: Comp) -> &mut DiffPoly {
        match c {
            Comp::Id => &mut self.id,
            Comp::S3 => &mut self.s3,
            Comp::Plus => &mut self.plus,
            Comp::Minus => &mut self.minus,
        }
    }

    pub fn is_zero(&self) -> bool {
        Comp::ALL.iter().all(|&c| self.get(c).is_zero())
    }

    pub fn map(&self, f: &impl Fn(&DiffPoly) -> DiffPoly) -> Sigma {
        Sigma { id: f(&self.id), s3: f(&self.s3), plus: f(&self.plus), minus: f(&self.minus) }
    }

    fn add_assign(&mut self, o: &Sigma) {
        for c in Comp::ALL {
            self.get_mut(c).add_assign(o.get(c));
        }
    }

    fn commutator(&self, o: &Sigma) -> Sigma {
        let two = Coeff::int(2);
        Sigma {
            id: DiffPoly::zero(),
            s3: &(&self.plus * &o.minus) - &(&self.minus * &o.plus),
            plus: (&(&self.s3 * &o.plus) - &(&self.plus * &o.s3)).scale(&two),
            minus: (&(&self.minus * &o.s3) - &(&self.s3 * &o.minus)).scale(&two),
        }
    }
}

/// A graded `gl(2)` element `sum_j λ^j Sigma_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaxMatrix {
    grades: BTreeMap<i32, Sigma>,
}

impl LaxMatrix {
    pub fn zero() -> LaxMatrix {
        LaxMatrix::default()
    }

    /// Add `p * λ^grade * comp`.
    pub fn add(&mut self, grade: i32, comp: Comp, p: &DiffPoly) {
        if p.is_zero() {
            return;
        }
        let s = self.grades.entry(grade).or_default();
        s.get_mut(comp).add_assign(p);
        if s.is_zero() {
            self.grades.remove(&grade);
        }
    }

    pub fn with(mut self, grade: i32, comp: Comp, p: &DiffPoly) -> LaxMatrix {
        self.add(grade, comp, p);
        self
    }

    pub fn get(&self, grade: i32, comp: Comp) -> DiffPoly {
        self.grades.get(&grade).map(|s| s.get(comp).clone()).unwrap_or_default()
    }

    pub fn grade(&self, grade: i32) -> Sigma {
        self.grades.get(&grade).cloned().unwrap_or_default()
    }

    pub fn grades(&self) -> impl Iterator<Item = (i32, &Sigma)> {
        self.grades.iter().map(|(g, s)| (*g, s))
    }

    pub fn is_zero(&self) -> bool {
        self.grades.values().all(Sigma::is_zero)
    }

    pub fn top_grade(&self) -> Option<i32> {
        self.grades.keys().next_back().copied()
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> LaxMatrix {
        let mut out = LaxMatrix::zero();
        for (g, s) in &self.grades {
            let m = s.map(&f);
            if !m.is_zero() {
                out.grades.insert(*g, m);
            }
        }
        out
    }

    pub fn plus(&self, o: &LaxMatrix) -> LaxMatrix {
        let mut out = self.clone();
        for (g, s) in &o.grades {
            out.grades.entry(*g).or_default().add_assign(s);
        }
        out.grades.retain(|_, s| !s.is_zero());
        out
    }

    pub fn minus(&self, o: &LaxMatrix) -> LaxMatrix {
        self.plus(&o.scale(&Coeff::int(-1)))
    }

    pub fn scale(&self, c: &Coeff) -> LaxMatrix {
        self.map(|p| p.scale(c))
    }

    /// Multiply by `λ^k`.
    pub fn shift(&self, k: i32) -> LaxMatrix {
        LaxMatrix { grades: self.grades.iter().map(|(g, s)| (g + k, s.clone())).collect() }
    }

    pub fn dx(&self) -> LaxMatrix {
        self.map(DiffPoly::dx)
    }

    pub fn dt(&self) -> LaxMatrix {
        self.map(DiffPoly::dt)
    }

    pub fn commutator(&self, o: &LaxMatrix) -> LaxMatrix {
        let mut out = LaxMatrix::zero();
        for (g1, a) in &self.grades {
            for (g2, b) in &o.grades {
                out.grades.entry(g1 + g2).or_default().add_assign(&a.commutator(b));
            }
        }
        out.grades.retain(|_, s| !s.is_zero());
        out
    }

    /// Remove the identity component.
    pub fn traceless(&self) -> LaxMatrix {
        let mut out = self.clone();
        for s in out.grades.values_mut() {
            s.id = DiffPoly::zero();
        }
        out.grades.retain(|_, s| !s.is_zero());
        out
    }

    /// Keep grades `>= min`.
    pub fn truncate_below(&self, min: i32) -> LaxMatrix {
        LaxMatrix { grades: self.grades.range(min..).map(|(g, s)| (*g, s.clone())).collect() }
    }

    /// Convert to the abstract basis via the linear identification; fails on identity parts.
    pub fn to_loop(&self, kappa: &DiffPoly) -> Result<LoopElement> {
        let inv_kappa = kappa_inverse(kappa)?;
        let mut out = LoopElement::zero();
        for (g, s) in &self.grades {
            if !s.id.is_zero() {
                return Err(Error::NotTraceless);
            }
            let c = &s.plus * &inv_kappa;
            out.add(*g, Gen::B, &s.s3);
            out.add(*g, Gen::F1, &(&c - &s.minus));
            out.add(*g, Gen::F2, &(&c + &s.minus));
        }
        Ok(out)
    }
}

fn kappa_inverse(kappa: &DiffPoly) -> Result<DiffPoly> {
    if let Some(c) = kappa.as_constant() {
        return c.inv().map(DiffPoly::constant).ok_or_else(|| Error::InvalidArgument("kappa = 0".into()));
    }
    let mut terms = kappa.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if m.jets().is_empty() => {
            let params = m.params().iter().map(|(p, e)| (p.clone(), -e)).collect();
            Ok(DiffPoly::term(c.inv().unwrap(), crate::diffpoly::Monomial::from_parts(vec![], params)))
        }
        _ => Err(Error::InvalidArgument("kappa must be a single constant term".into())),
    }
}

/// Zero-curvature expression `L_t - M_x + [L, M]`.
pub fn curvature(l: &LaxMatrix, m: &LaxMatrix) -> LaxMatrix {
    l.dt().minus(&m.dx()).plus(&l.commutator(m))
}

impl fmt::Display for LaxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (g, s) in self.grades.iter().rev() {
            for c in Comp::ALL {
                let p = s.get(c);
                if !p.is_zero() {
                    writeln!(f, "lambda^{g} {}: {p}", c.name())?;
                }
            }
        }
        Ok(())
    }
}

/// Generator selector for [`LoopTriple`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    B,
    F1,
    F2,
}

impl Gen {
    pub const ALL: [Gen; 3] = [Gen::B, Gen::F1, Gen::F2];

    pub fn name(self) -> &'static str {
        match self {
            Gen::B => "b",
            Gen::F1 => "F1",
            Gen::F2 => "F2",
        }
    }
}

/// `b*b^j + f1*F1^j + f2*F2^j` at one grade.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopTriple {
    pub b: DiffPoly,
    pub f1: DiffPoly,
    pub f2: DiffPoly,
}

impl LoopTriple {
    pub fn get(&self, g: Gen) -> &DiffPoly {
        match g {
            Gen::B => &self.b,
            Gen::F1 => &self.f1,
            Gen::F2 => &self.f2,
        }
    }

    fn get_mut(&mut self, g: Gen) -> &mut DiffPoly {
        match g {
            Gen::B => &mut self.b,
            Gen::F1 => &mut self.f1,
            Gen::F2 => &mut self.f2,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.b.is_zero() && self.f1.is_zero() && self.f2.is_zero()
    }

    fn add_assign(&mut self, o: &LoopTriple) {
        self.b.add_assign(&o.b);
        self.f1.add_assign(&o.f1);
        self.f2.add_assign(&o.f2);
    }

    fn bracket(&self, o: &LoopTriple, half_kappa: &DiffPoly) -> LoopTriple {
        LoopTriple {
            b: &(&(&self.f1 * &o.f2) - &(&self.f2 * &o.f1)) * half_kappa,
            f1: &(&self.b * &o.f2) - &(&self.f2 * &o.b),
            f2: &(&self.b * &o.f1) - &(&self.f1 * &o.b),
        }
    }
}

/// A graded element of the abstract loop algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopElement {
    grades: BTreeMap<i32, LoopTriple>,
}

impl LoopElement {
    pub fn zero() -> LoopElement {
        LoopElement::default()
    }

    pub fn add(&mut self, grade: i32, gen: Gen, p: &DiffPoly) {
        if p.is_zero() {
            return;
        }
        let t = self.grades.entry(grade).or_default();
        t.get_mut(gen).add_assign(p);
        if t.is_zero() {
            self.grades.remove(&grade);
        }
    }

    pub fn with(mut self, grade: i32, gen: Gen, p: &DiffPoly) -> LoopElement {
        self.add(grade, gen, p);
        self
    }

    pub fn get(&self, grade: i32, gen: Gen) -> DiffPoly {
        self.grades.get(&grade).map(|t| t.get(gen).clone()).unwrap_or_default()
    }

    pub fn grades(&self) -> impl Iterator<Item = (i32, &LoopTriple)> {
        self.grades.iter().map(|(g, t)| (*g, t))
    }

    pub fn top_grade(&self) -> Option<i32> {
        self.grades.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.grades.values().all(LoopTriple::is_zero)
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> LoopElement {
        let mut out = LoopElement::zero();
        for (g, t) in &self.grades {
            for gen in Gen::ALL {
                out.add(*g, gen, &f(t.get(gen)));
            }
        }
        out
    }

    pub fn plus(&self, o: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for (g, t) in &o.grades {
            out.grades.entry(*g).or_default().add_assign(t);
        }
        out.grades.retain(|_, t| !t.is_zero());
        out
    }

    pub fn scale(&self, c: &Coeff) -> LoopElement {
        self.map(|p| p.scale(c))
    }

    pub fn dx(&self) -> LoopElement {
        self.map(DiffPoly::dx)
    }

    pub fn truncate_below(&self, min: i32) -> LoopElement {
        LoopElement { grades: self.grades.range(min..).map(|(g, t)| (*g, t.clone())).collect() }
    }

    /// Bracket, keeping only grades `>= min` when given.
    pub fn commutator(&self, o: &LoopElement, kappa: &DiffPoly, min: Option<i32>) -> LoopElement {
        let half_kappa = kappa.scale(&Coeff::frac(1, 2));
        let mut out = LoopElement::zero();
        for (g1, a) in &self.grades {
            for (g2, b) in &o.grades {
                let g = g1 + g2;
                if min.is_some_and(|m| g < m) {
                    continue;
                }
                out.grades.entry(g).or_default().add_assign(&a.bracket(b, &half_kappa));
            }
        }
        out.grades.retain(|_, t| !t.is_zero());
        out
    }

    /// Convert to the σ basis via the linear identification.
    pub fn to_sigma(&self, kappa: &DiffPoly) -> LaxMatrix {
        let half = Coeff::frac(1, 2);
        let mut out = LaxMatrix::zero();
        for (g, t) in &self.grades {
            out.add(*g, Comp::S3, &t.b);
            out.add(*g, Comp::Plus, &(&(&t.f1 + &t.f2) * kappa).scale(&half));
            out.add(*g, Comp::Minus, &(&t.f2 - &t.f1).scale(&half));
        }
        out
    }
}

impl fmt::Display for LoopElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (g, t) in self.grades.iter().rev() {
            for gen in Gen::ALL {
                let p = t.get(gen);
                if !p.is_zero() {
                    writeln!(f, "{}^{g}: {p}", gen.name())?;
                }
            }
        }
        Ok(())
    }
}

/// Generator `G = sum_{j>=1} (xi1^(-j) F1^(-j) + xi2^(-j) F2^(-j))`; `components[j-1]`
/// holds `(xi1, xi2)` at grade `-j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaugeGenerator {
    pub components: Vec<(DiffPoly, DiffPoly)>,
}

impl GaugeGenerator {
    /// The zero generator known to the given depth.
    pub fn zero(depth: usize) -> GaugeGenerator {
        GaugeGenerator { components: vec![(DiffPoly::zero(), DiffPoly::zero()); depth] }
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn element(&self) -> LoopElement {
        let mut g = LoopElement::zero();
        for (j, (x1, x2)) in self.components.iter().enumerate() {
            let grade = -(j as i32 + 1);
            g.add(grade, Gen::F1, x1);
            g.add(grade, Gen::F2, x2);
        }
        g
    }
}

/// `e^G X e^-G + (d_x e^G) e^-G`, exact at grades `>= min_grade`.
///
/// The generator must be known down to grade `min_grade - top(X)`, otherwise the
/// result would silently depend on unknown components.
pub fn gauge_conjugate(x: &LoopElement, g: &GaugeGenerator, kappa: &DiffPoly, min_grade: i32) -> Result<LoopElement> {
    let top = x.top_grade().unwrap_or(0).max(0);
    let needed = (top - min_grade).max(0) as usize;
    if g.depth() < needed {
        return Err(Error::WindowTooNarrow { needed, have: g.depth() });
    }
    let ge = g.element();
    let mut out = exp_ad(&ge, x, kappa, min_grade);
    // sum_k ad_G^k(G_x) / (k+1)!
    let mut term = ge.dx().truncate_below(min_grade);
    let mut k = 1i64;
    while !term.is_zero() {
        out = out.plus(&term);
        k += 1;
        term = ge.commutator(&term, kappa, Some(min_grade)).scale(&Coeff::frac(1, k));
    }
    Ok(out)
}

/// `e^G X e^-G = sum_k ad_G^k X / k!`, exact at grades `>= min_grade`.
pub fn adjoint(x: &LoopElement, g: &GaugeGenerator, kappa: &DiffPoly, min_grade: i32) -> Result<LoopElement> {
    let top = x.top_grade().unwrap_or(0).max(0);
    let needed = (top - min_grade).max(0) as usize;
    if g.depth() < needed {
        return Err(Error::WindowTooNarrow { needed, have: g.depth() });
    }
    Ok(exp_ad(&g.element(), x, kappa, min_grade))
}

fn exp_ad(ge: &LoopElement, x: &LoopElement, kappa: &DiffPoly, min_grade: i32) -> LoopElement {
    let mut out = x.truncate_below(min_grade);
    let mut term = out.clone();
    let mut k = 1i64;
    loop {
        term = ge.commutator(&term, kappa, Some(min_grade)).scale(&Coeff::frac(1, k));
        if term.is_zero() {
            return out;
        }
        out = out.plus(&term);
        k += 1;
    }
}

/// The `b`-coefficient of `X` at grade `-n` (the Killing pairing with `b^n`).
pub fn killing_project(x: &LoopElement, n: i32) -> DiffPoly {
    x.get(-n, Gen::B)
}

/// Rotate `L` (with `σ+` part `∝ q` and `σ-` part `∝ r`) by
/// `exp((i/2) φ σ3)` and write the result in the abstract basis using
/// `q e^(iφ) = iκR`, `r e^(-iφ) = -iR`. The pure-gauge term contributes `(i/2) φ_x b^0`.
pub fn diagonal_rotation(l: &LaxMatrix, q: &Field, r: &Field, phi: &Field, big_r: &Field, kappa: &DiffPoly) -> Result<LoopElement> {
    let i = Coeff::i();
    let rep_plus = &big_r.poly() * kappa;
    let rep_plus = rep_plus.scale(&i);
    let rep_minus = big_r.poly().scale(&-&i);
    let mut rotated = LaxMatrix::zero();
    for (g, s) in l.grades() {
        if !s.id.is_zero() {
            return Err(Error::NotTraceless);
        }
        let (cp, rest_p) = s.plus.split_linear(&q.jet(0, 0)).ok_or_else(|| Error::NotRotatable("σ+".into()))?;
        let (cm, rest_m) = s.minus.split_linear(&r.jet(0, 0)).ok_or_else(|| Error::NotRotatable("σ-".into()))?;
        if !rest_p.is_zero() || !rest_m.is_zero() || !cp.is_jet_free() || !cm.is_jet_free() {
            return Err(Error::NotRotatable(format!("grade {g}: off-diagonal entries must be constant multiples of q and r")));
        }
        rotated.add(g, Comp::S3, &s.s3);
        rotated.add(g, Comp::Plus, &(&cp * &rep_plus));
        rotated.add(g, Comp::Minus, &(&cm * &rep_minus));
    }
    let mut out = rotated.to_loop(kappa)?;
    out.add(0, Gen::B, &phi.dx(1).scale(&Coeff::imag(1, 2)));
    Ok(out)
}
