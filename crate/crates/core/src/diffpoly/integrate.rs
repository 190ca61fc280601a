//! Exact inversion of `d_x`.
//!
//! `d_x` preserves the multiset of base fields `(field, t-order)`, the parameter
//! monomial and any time-only factors, and raises the total x-derivative count
//! by one. Terms are grouped into blocks by those invariants and each block is
//! solved as a finite linear system over all monomials with one fewer derivative.

use std::collections::BTreeMap;

use super::{DiffPoly, Field, JetVar, Monomial};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::linsolve;

type Bases = Vec<((Field, u32), u32)>;

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct BlockKey {
    constant: Monomial,
    bases: Bases,
    order: u32,
}

pub(super) fn integrate_x(p: &DiffPoly) -> Result<DiffPoly> {
    let mut blocks: BTreeMap<BlockKey, BTreeMap<Monomial, Coeff>> = BTreeMap::new();
    for (m, c) in &p.terms {
        let mut constant = Monomial { deg: 0, jets: Vec::new(), params: m.params.clone() };
        let mut active = Monomial::one();
        let mut bases: BTreeMap<(Field, u32), u32> = BTreeMap::new();
        let mut order = 0;
        for (v, e) in &m.jets {
            if v.field.time_only {
                constant.push_jet(v.clone(), *e);
            } else {
                active.push_jet(v.clone(), *e);
                *bases.entry((v.field.clone(), v.dt)).or_insert(0) += e;
                order += v.dx * e;
            }
        }
        if order == 0 {
            return Err(Error::NotExact(format!("term without x-derivatives in {p}")));
        }
        let key = BlockKey { constant, bases: bases.into_iter().collect(), order };
        blocks.entry(key).or_default().insert(active, c.clone());
    }

    let mut out = DiffPoly::zero();
    for (key, target) in blocks {
        let candidates = candidates(&key.bases, key.order - 1);
        let images: Vec<DiffPoly> =
            candidates.iter().map(|m| DiffPoly::term(Coeff::one(), m.clone()).dx()).collect();
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for m in target.keys().chain(images.iter().flat_map(|i| i.terms.keys())) {
            let n = rows.len();
            rows.entry(m.clone()).or_insert(n);
        }
        let mut a = vec![vec![Coeff::zero(); candidates.len()]; rows.len()];
        for (j, img) in images.iter().enumerate() {
            for (m, c) in &img.terms {
                a[rows[m]][j] = c.clone();
            }
        }
        let mut b = vec![Coeff::zero(); rows.len()];
        for (m, c) in &target {
            b[rows[m]] = c.clone();
        }
        let x = linsolve::solve(a, b).ok_or_else(|| Error::NotExact(p.to_string()))?;
        for (m, c) in candidates.into_iter().zip(x) {
            out.add_term(m.mul(&key.constant), &c);
        }
    }
    Ok(out)
}

/// All monomials with the given base multiset and total x-derivative count.
fn candidates(bases: &Bases, total: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut chosen: Vec<JetVar> = Vec::new();
    rec(bases, 0, total, &mut chosen, &mut out);
    out
}

fn rec(bases: &Bases, idx: usize, left: u32, chosen: &mut Vec<JetVar>, out: &mut Vec<Monomial>) {
    if idx == bases.len() {
        if left == 0 {
            out.push(Monomial::from_parts(chosen.iter().map(|j| (j.clone(), 1)).collect(), vec![]));
        }
        return;
    }
    let ((field, dt), mult) = &bases[idx];
    // non-increasing sequences of `mult` derivative orders summing to `s <= left`
    let mut seq = Vec::new();
    parts(*mult, left, left, &mut seq, &mut |seq: &[u32]| {
        let used: u32 = seq.iter().sum();
        let n = chosen.len();
        chosen.extend(seq.iter().map(|&d| field.jet(d, *dt)));
        rec(bases, idx + 1, left - used, chosen, out);
        chosen.truncate(n);
    });
}

fn parts(k: u32, max_part: u32, left: u32, seq: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if k == 0 {
        f(seq);
        return;
    }
    for d in (0..=max_part.min(left)).rev() {
        seq.push(d);
        parts(k - 1, d, left - d, seq, f);
        seq.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_simple_exact_forms() {
        let q = Field::even("q");
        let r = Field::even("r");
        let f = &(&q.poly() * &r.dx(2)) - &(&r.poly() * &q.dx(2));
        let p = f.dx();
        assert_eq!(p.integrate_x().unwrap(), f);
    }

    #[test]
    fn rejects_non_exact() {
        let q = Field::even("q");
        let p = &q.poly() * &q.dx(2);
        assert!(matches!(p.integrate_x(), Err(Error::NotExact(_))));
        assert!(q.poly().integrate_x().is_err());
    }

    #[test]
    fn time_only_factors_are_constants() {
        let q = Field::even("q");
        let b = Field::time_only("b");
        let p = &b.poly() * &q.dx(1);
        assert_eq!(p.integrate_x().unwrap(), &b.poly() * &q.poly());
    }
}
