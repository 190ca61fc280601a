//! Non-holonomic deformations: the temporal Lax component is extended by
//! negative-grade generators and the curvature splits into deformed equations
//! of motion plus differential constraints on the deforming functions.

use std::collections::{BTreeMap, BTreeSet};

use crate::coeff::Coeff;
use crate::diffpoly::{DiffPoly, Field, JetVar, Monomial};
use crate::error::{Error, Result};
use crate::hierarchy::{self, build_lax, dnls_coeffs_with, nls_coeffs, Family};
use crate::loopalg::{curvature, Comp, LaxMatrix};
use crate::rewrite::EomPair;

/// `diag σ3 + upper σ+ + lower σ-` at one power of `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradeGenerator {
    pub grade: i32,
    pub diag: Option<Field>,
    pub upper: Option<Field>,
    pub lower: Option<Field>,
}

impl GradeGenerator {
    pub fn new(grade: i32, diag: &str, upper: &str, lower: &str) -> GradeGenerator {
        GradeGenerator {
            grade,
            diag: Some(Field::even(diag)),
            upper: Some(Field::even(upper)),
            lower: Some(Field::even(lower)),
        }
    }
}

/// `δM = prefactor * sum_k λ^k G_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSpec {
    pub prefactor: Coeff,
    pub generators: Vec<GradeGenerator>,
}

impl DeformationSpec {
    /// `(i/2) sum_{k=1..depth} λ^-k G^(k)` with `G^(1) = (a, g1, g2)`, `G^(2) = (b, f1, f2)`.
    pub fn nls(depth: usize) -> DeformationSpec {
        let generators = (1..=depth)
            .map(|k| match k {
                1 => GradeGenerator::new(-1, "a", "g1", "g2"),
                2 => GradeGenerator::new(-2, "b", "f1", "f2"),
                _ => GradeGenerator::new(-(k as i32), &format!("a_{k}"), &format!("g1_{k}"), &format!("g2_{k}")),
            })
            .collect();
        DeformationSpec { prefactor: Coeff::imag(1, 2), generators }
    }

    /// `i (G_0 + λ^-1 G_1 + λ^-2 G_2)` with `(w, m1, m2)`, `(a, g1, g2)`, `(b, f1, f2)`.
    pub fn derivative_nls() -> DeformationSpec {
        DeformationSpec {
            prefactor: Coeff::i(),
            generators: vec![
                GradeGenerator::new(0, "w", "m1", "m2"),
                GradeGenerator::new(-1, "a", "g1", "g2"),
                GradeGenerator::new(-2, "b", "f1", "f2"),
            ],
        }
    }

    pub fn delta_m(&self) -> LaxMatrix {
        let mut m = LaxMatrix::zero();
        for g in &self.generators {
            for (f, c) in [(&g.diag, Comp::S3), (&g.upper, Comp::Plus), (&g.lower, Comp::Minus)] {
                if let Some(f) = f {
                    m.add(g.grade, c, &f.poly().scale(&self.prefactor));
                }
            }
        }
        m
    }

    pub fn diagonal(&self) -> BTreeSet<String> {
        self.generators.iter().filter_map(|g| g.diag.as_ref()).map(|f| f.name.to_string()).collect()
    }

    pub fn deformers(&self) -> BTreeSet<String> {
        self.generators
            .iter()
            .flat_map(|g| [&g.diag, &g.upper, &g.lower])
            .flatten()
            .map(|f| f.name.to_string())
            .collect()
    }
}

/// `relation = 0`, coming from component `comp` at `λ^grade`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub grade: i32,
    pub comp: Comp,
    pub relation: DiffPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NhdResult {
    pub label: String,
    pub spec: DeformationSpec,
    pub l: LaxMatrix,
    /// Deformed temporal component, with forced vanishing applied.
    pub m: LaxMatrix,
    pub dynamical_grade: i32,
    pub deformed_eom: EomPair,
    pub constraints: Vec<Constraint>,
    /// Deformers forced to zero.
    pub vanishing: Vec<String>,
    /// Deformers forced to depend on `t` only.
    pub time_only: Vec<String>,
    pub notes: Vec<String>,
}

impl NhdResult {
    pub fn constraint(&self, grade: i32, comp: Comp) -> Option<&DiffPoly> {
        self.constraints.iter().find(|c| c.grade == grade && c.comp == comp).map(|c| &c.relation)
    }

    fn live_deformers(&self) -> BTreeSet<String> {
        let mut d = self.spec.deformers();
        for v in &self.vanishing {
            d.remove(v);
        }
        for v in &self.time_only {
            d.remove(v);
        }
        d
    }

    /// Curvature with the deformed EOM and every constraint imposed as a rewrite rule.
    pub fn residual_curvature(&self) -> Result<LaxMatrix> {
        let rw = self.deformed_eom.rewriter();
        let rules = self.constraint_rules()?;
        let f = curvature(&self.l, &self.m);
        Ok(f.map(|p| apply_rules(&rw.apply(p), &rules)))
    }

    /// `d_x = P` for the leading derivative of each constraint.
    fn constraint_rules(&self) -> Result<BTreeMap<String, DiffPoly>> {
        let live = self.live_deformers();
        let mut rules = BTreeMap::new();
        for c in &self.constraints {
            let Some(v) = leading_deformer_jet(&c.relation, &live) else { continue };
            if v.dx != 1 || rules.contains_key(&*v.field.name) {
                continue;
            }
            let (k, rest) = c.relation.split_linear(&v).ok_or_else(|| Error::NotReducible(c.relation.to_string()))?;
            let k = k.as_constant().ok_or_else(|| Error::NotReducible(c.relation.to_string()))?;
            rules.insert(v.field.name.to_string(), rest.scale(&-k.inv().expect("nonzero")));
        }
        Ok(rules)
    }
}

/// Replace `d_{x^k}`, `k >= 1`, by `D_x^{k-1} P` until nothing changes.
fn apply_rules(p: &DiffPoly, rules: &BTreeMap<String, DiffPoly>) -> DiffPoly {
    let mut cur = p.clone();
    for _ in 0..32 {
        let next = cur.substitute_jets(|v| {
            if v.dx == 0 || v.dt != 0 {
                return None;
            }
            rules.get(&*v.field.name).map(|rhs| rhs.dx_n(v.dx - 1))
        });
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn deformer_jets(p: &DiffPoly, deformers: &BTreeSet<String>) -> Vec<JetVar> {
    p.jets().into_iter().filter(|v| deformers.contains(&*v.field.name)).collect()
}

/// The deformer jet with the most x-derivatives (ties: the largest jet).
fn leading_deformer_jet(p: &DiffPoly, deformers: &BTreeSet<String>) -> Option<JetVar> {
    deformer_jets(p, deformers).into_iter().max_by(|a, b| a.dx.cmp(&b.dx).then(a.cmp(b)))
}

/// Scale so the first term carrying the leading deformer jet has coefficient 1.
pub fn normalize_relation(p: &DiffPoly, deformers: &BTreeSet<String>) -> DiffPoly {
    let lead = leading_deformer_jet(p, deformers);
    let term = p.terms().find(|(m, _)| lead.as_ref().is_none_or(|v| m.jets().iter().any(|(j, _)| j == v)));
    match term {
        Some((_, c)) => p.div_coeff(c),
        None => p.clone(),
    }
}

/// Split `curvature(L, M_orig + δM)` into the deformed EOM (the `σ±` parts at
/// `dynamical_grade`) and constraints (everything else), then apply forced vanishing.
pub fn split_orders(
    label: &str,
    l: &LaxMatrix,
    m_orig: &LaxMatrix,
    spec: &DeformationSpec,
    dynamical_grade: i32,
) -> Result<NhdResult> {
    let m = m_orig.plus(&spec.delta_m());
    let f = curvature(l, &m);
    let deformers = spec.deformers();
    let (q, r) = (hierarchy::q(), hierarchy::r());
    let solve_t = |p: &DiffPoly, fld: &Field, comp: Comp| -> Result<DiffPoly> {
        let (k, rest) = p
            .split_linear(&fld.jet(0, 1))
            .filter(|(k, _)| k.as_constant().is_some_and(|c| !c.is_zero()))
            .ok_or(Error::PositiveGradeResidual { grade: dynamical_grade, component: comp.name().into() })?;
        Ok(rest.scale(&-k.as_constant().unwrap().inv().unwrap()))
    };
    let q_t = solve_t(&f.get(dynamical_grade, Comp::Plus), &q, Comp::Plus)?;
    let r_t = solve_t(&f.get(dynamical_grade, Comp::Minus), &r, Comp::Minus)?;
    let eom = EomPair::new(format!("deformed {label}"), q_t, r_t);
    let rw = eom.rewriter();
    let mut constraints = Vec::new();
    for (g, s) in f.grades() {
        for comp in [Comp::S3, Comp::Plus, Comp::Minus] {
            if g == dynamical_grade && comp != Comp::S3 {
                continue;
            }
            let p = rw.apply(s.get(comp));
            if p.is_zero() {
                continue;
            }
            if deformer_jets(&p, &deformers).is_empty() {
                return Err(Error::PositiveGradeResidual { grade: g, component: comp.name().into() });
            }
            constraints.push(Constraint { grade: g, comp, relation: p });
        }
    }
    let mut out = NhdResult {
        label: label.to_string(),
        spec: spec.clone(),
        l: l.clone(),
        m,
        dynamical_grade,
        deformed_eom: eom,
        constraints,
        vanishing: Vec::new(),
        time_only: Vec::new(),
        notes: Vec::new(),
    };
    force_vanishing(&mut out);
    let live = out.live_deformers();
    for c in &mut out.constraints {
        c.relation = normalize_relation(&c.relation, &live);
    }
    Ok(out)
}

/// Constraints involving a single deformer pin it down. If the deformer enters
/// undifferentiated only, it is zero. A pure derivative of a diagonal deformer makes
/// it time-only. A homogeneous linear relation for an off-diagonal deformer leaves
/// no decaying solution but zero.
fn force_vanishing(res: &mut NhdResult) {
    let diagonal = res.spec.diagonal();
    loop {
        let mut candidates = res.live_deformers();
        candidates.extend(res.time_only.iter().cloned());
        let mut action = None;
        for c in &res.constraints {
            let jets = deformer_jets(&c.relation, &candidates);
            let Some(first) = jets.first() else { continue };
            let name = first.field.name.to_string();
            if jets.iter().any(|v| *v.field.name != *name) {
                continue;
            }
            let homogeneous_linear = c.relation.terms().all(|(m, _)| {
                m.jets().iter().filter(|(j, _)| *j.field.name == *name).map(|(_, e)| *e).sum::<u32>() == 1
            });
            if !homogeneous_linear {
                continue;
            }
            let bare = jets.iter().all(|v| v.dx == 0);
            let time_only = res.time_only.contains(&name);
            if bare {
                action = Some((name, true));
            } else if time_only {
                continue;
            } else if diagonal.contains(&name) {
                if c.relation.len() == 1 {
                    action = Some((name, false));
                }
            } else {
                action = Some((name, true));
            }
            if action.is_some() {
                break;
            }
        }
        let Some((name, to_zero)) = action else { break };
        let sub = |p: &DiffPoly| {
            if to_zero {
                p.substitute_field(&name, &DiffPoly::zero())
            } else {
                p.replace_field(&name, &Field::time_only(&name))
            }
        };
        res.m = res.m.map(sub);
        res.deformed_eom = res.deformed_eom.map(sub);
        for c in &mut res.constraints {
            c.relation = sub(&c.relation);
        }
        res.constraints.retain(|c| !c.relation.is_zero());
        if to_zero {
            res.time_only.retain(|n| n != &name);
            res.vanishing.push(name);
        } else {
            res.time_only.push(name);
        }
    }
}

/// A constraint `k d_x + P = 0` solved as `d_x = -P/k`, requiring constant `k`.
fn solve_derivative(c: &DiffPoly, v: &JetVar) -> Result<DiffPoly> {
    let (k, rest) = c.split_linear(v).ok_or_else(|| Error::NotReducible(format!("{v:?} enters non-linearly")))?;
    let k = k
        .as_constant()
        .filter(|k| !k.is_zero())
        .ok_or_else(|| Error::NotReducible(format!("eliminating {} needs division by {k}", DiffPoly::jet(v.clone()))))?;
    Ok(rest.scale(&-k.inv().unwrap()))
}

/// Eliminate each live diagonal deformer between the `σ±` constraints of its
/// grade: `c_-·D_x(C_+) - (c_+)_x·C_-` with `d_x` replaced from the `σ3` constraint.
pub fn reduce_constraints(res: &NhdResult) -> Result<Vec<(i32, DiffPoly)>> {
    let live = res.live_deformers();
    let diagonal: Vec<String> = res.spec.diagonal().into_iter().filter(|d| live.contains(d)).collect();
    let mut grades: Vec<i32> = res.constraints.iter().map(|c| c.grade).collect();
    grades.dedup();
    let mut out = Vec::new();
    for g in grades.into_iter().rev() {
        let (Some(cp), Some(cm)) = (res.constraint(g, Comp::Plus), res.constraint(g, Comp::Minus)) else { continue };
        for d in &diagonal {
            let field = Field::even(d);
            let v = field.jet(0, 0);
            let (Some((kp, _)), Some((km, _))) = (cp.split_linear(&v), cm.split_linear(&v)) else {
                return Err(Error::NotReducible(format!("{d} enters non-linearly at grade {g}")));
            };
            if kp.is_zero() || km.is_zero() {
                continue;
            }
            let dx = field.jet(1, 0);
            let s3 = res
                .constraints
                .iter()
                .find(|c| c.comp == Comp::S3 && c.relation.jets().contains(&dx))
                .ok_or_else(|| Error::NotReducible(format!("no σ3 relation for {d}_x")))?;
            let p = solve_derivative(&s3.relation, &dx)?;
            if p.contains_field(d) {
                return Err(Error::NotReducible(format!("the relation for {d}_x involves {d}")));
            }
            let raw = &(&km * &cp.dx()) - &(&kp.dx() * cm);
            let mut rules = BTreeMap::new();
            rules.insert(d.clone(), p);
            let reduced = apply_rules(&raw, &rules);
            if reduced.contains_field(d) {
                return Err(Error::NotReducible(format!("{d} survives the elimination at grade {g}")));
            }
            out.push((g, normalize_relation(&reduced, &live)));
        }
    }
    Ok(out)
}

/// The closed equation obtained from the deepest reduced relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eliminated {
    pub equation: DiffPoly,
    /// Highest x-derivative order of `q`, `r`.
    pub order: u32,
    /// Deformers that could not be removed polynomially.
    pub residual_deformers: Vec<String>,
}

/// Start from the deepest reduced relation, express deeper off-diagonal deformers
/// through shallower constraints, derivatives of diagonal ones through their `σ3`
/// relations, and finally the dynamical deformers through the deformed EOM.
pub fn eliminate_deformers(res: &NhdResult) -> Result<Eliminated> {
    let reduced = reduce_constraints(res)?;
    let (_, mut eq) = reduced.into_iter().min_by_key(|(g, _)| *g).ok_or_else(|| Error::NotReducible("no reduced relation".into()))?;
    let live = res.live_deformers();
    let diagonal = res.spec.diagonal();
    let (res_q, res_r) = res.deformed_eom.residuals();
    let dynamical: BTreeSet<String> = deformer_jets(&(&res_q + &res_r), &live).into_iter().map(|v| v.field.name.to_string()).collect();

    // off-diagonal, non-dynamical deformers from constraints where they enter bare
    let mut off_rules: BTreeMap<String, DiffPoly> = BTreeMap::new();
    for name in live.iter().filter(|n| !diagonal.contains(*n) && !dynamical.contains(*n)) {
        let v = Field::even(name).jet(0, 0);
        for c in &res.constraints {
            if c.comp == Comp::S3 || c.relation.jets().iter().any(|j| &*j.field.name == name && j.dx > 0) {
                continue;
            }
            if let Ok(p) = solve_derivative(&c.relation, &v) {
                if !p.contains_field(name) {
                    off_rules.insert(name.clone(), p);
                    break;
                }
            }
        }
    }
    let mut diag_rules = BTreeMap::new();
    for d in diagonal.iter().filter(|d| live.contains(*d)) {
        let dx = Field::even(d).jet(1, 0);
        if let Some(c) = res.constraints.iter().find(|c| c.comp == Comp::S3 && c.relation.jets().contains(&dx)) {
            diag_rules.insert(d.clone(), solve_derivative(&c.relation, &dx)?);
        }
    }
    for _ in 0..16 {
        let mut next = eq.clone();
        for (name, p) in &off_rules {
            next = next.substitute_field(name, p);
        }
        next = apply_rules(&next, &diag_rules);
        if next == eq {
            break;
        }
        eq = next;
    }
    for name in &dynamical {
        let v = Field::even(name).jet(0, 0);
        let from = if res_q.contains_field(name) { &res_q } else { &res_r };
        eq = eq.substitute_field(name, &solve_derivative(from, &v)?);
    }
    let order = ["q", "r"].iter().filter_map(|f| eq.max_dx(f)).max().unwrap_or(0);
    let residual_deformers = deformer_jets(&eq, &live).into_iter().map(|v| v.field.name.to_string()).collect::<BTreeSet<_>>();
    Ok(Eliminated { equation: eq, order, residual_deformers: residual_deformers.into_iter().collect() })
}

/// NLS hierarchy member `n_hier` at `α = -i`, deformed by `depth` negative grades.
pub fn nls_nhd(n_hier: usize, depth: usize) -> Result<NhdResult> {
    let t = nls_coeffs(n_hier)?.map(|p| p.substitute_param("alpha", &DiffPoly::constant(Coeff::imag(-1, 1))).expect("polynomial in alpha"));
    let (l, m) = build_lax(&t);
    split_orders(&format!("NLS n={n_hier}"), &l, &m, &DeformationSpec::nls(depth), 0)
}

/// Kaup-Newell with `δM` at grades `0, -1, -2`; the temporal component is halved
/// so the deformed equation reads `q_t = (i/2) q_xx + ½(q²r)_x + ...`.
pub fn kn_nhd() -> Result<NhdResult> {
    let t = dnls_coeffs_with(1, &DiffPoly::constant(Coeff::frac(-1, 2)))?;
    let (l, m) = build_lax(&t);
    let mut res = split_orders("KN", &l, &m.scale(&Coeff::frac(1, 2)), &DeformationSpec::derivative_nls(), 1)?;
    res.notes.push("temporal component scaled by 1/2 relative to the hierarchy".into());
    Ok(res)
}

/// Chen-Lee-Liu in its traceless form; the constraints keep `qr·g` terms.
pub fn cll_nhd() -> Result<NhdResult> {
    let t = dnls_coeffs_with(1, &DiffPoly::constant(Coeff::frac(-1, 4)))?;
    debug_assert_eq!(t.family, Family::Dnls);
    let (l, m) = build_lax(&t);
    let mut res = split_orders("CLL", &l, &m, &DeformationSpec::derivative_nls(), 1)?;
    res.notes.push("traceless pair; the gl(2) identity parts are not compatible with the deformation".into());
    Ok(res)
}

/// The deformed system rewritten in potentials `q = u_x`, `r = v_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSystem {
    pub u: Field,
    pub v: Field,
    /// `u_eq = 0`, `v_eq = 0`, normalized so `u_xt` and `v_xt` have coefficient 1.
    pub u_eq: DiffPoly,
    pub v_eq: DiffPoly,
    /// Resolved deformers in terms of the potentials.
    pub resolved: Vec<(String, DiffPoly)>,
}

/// Integrate the constraints in potentials: off-diagonal deformers first (their
/// constants absorbed into the potentials), then diagonal ones with a time-only
/// integration function `K`.
pub fn resolve_potentials(res: &NhdResult) -> Result<PotentialSystem> {
    let (u, v) = (Field::even("u"), Field::even("v"));
    let to_pot = |p: &DiffPoly| p.substitute_field("q", &u.dx(1)).substitute_field("r", &v.dx(1));
    let live = res.live_deformers();
    let diagonal = res.spec.diagonal();
    let mut pending: Vec<String> = live.iter().cloned().collect();
    pending.sort_by_key(|n| diagonal.contains(n));
    let mut resolved: Vec<(String, DiffPoly)> = Vec::new();
    let mut k_count = 0;
    while !pending.is_empty() {
        let mut progress = false;
        for name in pending.clone() {
            let dx = Field::even(&name).jet(1, 0);
            let Some(c) = res.constraints.iter().find(|c| c.relation.jets().contains(&dx)) else { continue };
            let (k, rest) = c.relation.split_linear(&dx).ok_or_else(|| Error::NotResolvable(format!("{name}_x enters non-linearly")))?;
            if k.as_constant().is_none() {
                return Err(Error::NotResolvable(format!("{name}_x has the non-constant coefficient {k}")));
            }
            if rest.contains_field(&name) {
                let bad = rest.filter_terms(|m| m.jets().iter().any(|(j, _)| *j.field.name == *name));
                return Err(Error::NotResolvable(format!(
                    "the constraint for {name} contains the nonlinear term {bad}, so it cannot be integrated in potentials"
                )));
            }
            let mut p = rest.scale(&-k.as_constant().unwrap().inv().unwrap());
            for (n, val) in &resolved {
                p = p.substitute_field(n, val);
            }
            if pending.iter().any(|n| n != &name && p.contains_field(n)) {
                continue;
            }
            let mut value = to_pot(&p).integrate_x().map_err(|_| Error::NotResolvable(format!("{name}_x = {p} is not exact in potentials")))?;
            if diagonal.contains(&name) {
                k_count += 1;
                let kname = if k_count == 1 { "K".to_string() } else { format!("K{k_count}") };
                value = &value + &Field::time_only(&kname).poly();
            }
            resolved.push((name.clone(), value));
            pending.retain(|n| n != &name);
            progress = true;
        }
        if !progress {
            return Err(Error::NotResolvable(format!("constraints for {pending:?} are coupled")));
        }
    }
    let (rq, rr) = res.deformed_eom.residuals();
    let mut eqs = [to_pot(&rq), to_pot(&rr)];
    for e in &mut eqs {
        for (n, val) in &resolved {
            *e = e.substitute_field(n, val);
        }
    }
    let norm = |p: &DiffPoly, f: &Field| {
        let c = p.coeff_of(&Monomial::from_parts(vec![(f.jet(1, 1), 1)], vec![]));
        if c.is_zero() {
            p.clone()
        } else {
            p.div_coeff(&c)
        }
    };
    let [eu, ev] = eqs;
    Ok(PotentialSystem { u_eq: norm(&eu, &u), v_eq: norm(&ev, &v), u, v, resolved })
}

pub fn kn_resolve(res: &NhdResult) -> Result<PotentialSystem> {
    resolve_potentials(res)
}

/// Whether a relation is a constant multiple of another.
pub fn same_relation(a: &DiffPoly, b: &DiffPoly) -> bool {
    match (a.terms().next(), b.terms().next()) {
        (None, None) => true,
        (Some((m, ca)), Some(_)) => {
            let cb = b.coeff_of(m);
            !cb.is_zero() && (&a.scale(&cb) - &b.scale(ca)).is_zero()
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::Context;

    fn ctx() -> Context {
        Context::qr().with(&["a", "g1", "g2", "b", "f1", "f2", "w", "m1", "m2"], crate::Parity::Even)
    }

    #[test]
    fn nls_first_order() {
        let res = nls_nhd(2, 1).unwrap();
        let c = ctx();
        assert_eq!(res.deformed_eom.q_t, c.parse("(1/2)*I*q[xx] - I*q^2*r - g1").unwrap());
        assert!(same_relation(res.constraint(-1, Comp::S3).unwrap(), &c.parse("a[x] - q*g2 + r*g1").unwrap()));
        let red = reduce_constraints(&res).unwrap();
        let want = c.parse("r*g1[xx] + q[x]*g2[x] + 2*q^2*r*g2 - 2*q*r^2*g1").unwrap();
        assert_eq!(red[0].1, want);
        assert!(res.residual_curvature().unwrap().is_zero());
    }

    #[test]
    fn elimination_orders() {
        assert_eq!(eliminate_deformers(&nls_nhd(2, 1).unwrap()).unwrap().order, 4);
        assert_eq!(eliminate_deformers(&nls_nhd(2, 2).unwrap()).unwrap().order, 5);
    }

    #[test]
    fn kn_vanishing_set() {
        let res = kn_nhd().unwrap();
        let mut v = res.vanishing.clone();
        v.sort();
        assert_eq!(v, ["a", "f1", "f2", "m1", "m2"]);
        assert_eq!(res.time_only, ["b"]);
        assert!(res.residual_curvature().unwrap().is_zero());
    }

    #[test]
    fn cll_is_not_resolvable() {
        let res = cll_nhd().unwrap();
        assert!(matches!(resolve_potentials(&res), Err(Error::NotResolvable(_))));
        assert!(res.residual_curvature().unwrap().is_zero());
    }
}
