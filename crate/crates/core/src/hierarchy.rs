//! NLS and derivative-NLS hierarchies generated from their recurrences.
//!
//! NLS: `L = -iλσ3 + qσ+ + rσ-`, `M = sum_{m=0}^{n} λ^{n-m} (a_m σ3 + b_m σ+ + c_m σ-)`,
//! seeded by `a_0 = α`.
//!
//! DNLS: `L = (-iλ² - is)σ3 + λqσ+ + λrσ-` with `s = (1+2β)qr/2`,
//! `M = (λ^{2n+2} V)_+ + 2β a_{2n+2} σ3`, seeded by `a_0 = -2i`.

use std::fmt;

use crate::coeff::Coeff;
use crate::diffpoly::{DiffPoly, Field};
use crate::error::Result;
use crate::loopalg::{Comp, LaxMatrix};
use crate::rewrite::EomPair;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Nls,
    Dnls,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Nls => "nls",
            Family::Dnls => "dnls",
        })
    }
}

/// Recurrence coefficients `a_m, b_m, c_m` for `m = 0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub family: Family,
    pub n: usize,
    pub a: Vec<DiffPoly>,
    pub b: Vec<DiffPoly>,
    pub c: Vec<DiffPoly>,
    /// The DNLS parameter (symbolic `beta` unless substituted).
    pub beta: Option<DiffPoly>,
}

impl CoeffTable {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn map(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> CoeffTable {
        CoeffTable {
            family: self.family.clone(),
            n: self.n,
            a: self.a.iter().map(&f).collect(),
            b: self.b.iter().map(&f).collect(),
            c: self.c.iter().map(&f).collect(),
            beta: self.beta.as_ref().map(&f),
        }
    }
}

pub fn q() -> Field {
    Field::even("q")
}

pub fn r() -> Field {
    Field::even("r")
}

fn half_i() -> Coeff {
    Coeff::imag(1, 2)
}

/// NLS coefficients through `m = n + 1`.
pub fn nls_coeffs(n: usize) -> Result<CoeffTable> {
    let (q, r) = (q().poly(), r().poly());
    let two = Coeff::int(2);
    let mut a = vec![DiffPoly::param("alpha")];
    let mut b = vec![DiffPoly::zero()];
    let mut c = vec![DiffPoly::zero()];
    for m in 0..=n {
        let bn = (&b[m].dx() + &(&q * &a[m]).scale(&two)).scale(&half_i());
        let cn = (&c[m].dx() - &(&r * &a[m]).scale(&two)).scale(&-half_i());
        let an = (&(&q * &cn) - &(&r * &bn)).integrate_x()?;
        a.push(an);
        b.push(bn);
        c.push(cn);
    }
    Ok(CoeffTable { family: Family::Nls, n, a, b, c, beta: None })
}

/// `q_t = -2i b_{n+1}`, `r_t = 2i c_{n+1}`.
pub fn nls_eom(n: usize) -> Result<EomPair> {
    let t = nls_coeffs(n)?;
    Ok(nls_eom_from(&t))
}

pub fn nls_eom_from(t: &CoeffTable) -> EomPair {
    let n = t.n;
    EomPair::new(format!("NLS n={n}"), t.b[n + 1].scale(&Coeff::imag(-2, 1)), t.c[n + 1].scale(&Coeff::imag(2, 1)))
}

/// `s = (1+2β) qr / 2`.
pub fn dnls_s(beta: &DiffPoly) -> DiffPoly {
    let one_2b = &DiffPoly::one() + &beta.scale(&Coeff::int(2));
    (&one_2b * &(&q().poly() * &r().poly())).scale(&Coeff::frac(1, 2))
}

/// DNLS coefficients through `m = 2n + 2`, for symbolic or numeric `β`.
pub fn dnls_coeffs_with(n: usize, beta: &DiffPoly) -> Result<CoeffTable> {
    let (q, r) = (q().poly(), r().poly());
    let s = dnls_s(beta);
    let i = Coeff::i();
    let two = Coeff::int(2);
    let top = 2 * n + 2;
    let a0 = DiffPoly::constant(Coeff::imag(-2, 1));
    let mut a = vec![a0.clone(), DiffPoly::zero()];
    let mut b = vec![DiffPoly::zero(), (&q * &a0).scale(&i)];
    let mut c = vec![DiffPoly::zero(), (&r * &a0).scale(&i)];
    // b_2 = c_2 = 0; fill a_{m+1}, b_{m+2}, c_{m+2} for m >= 1
    b.push(DiffPoly::zero());
    c.push(DiffPoly::zero());
    let mut m = 1;
    while a.len() <= top {
        let integrand = &(&s * &(&(&r * &b[m]) - &(&q * &c[m])))
            - &(&(&q * &c[m].dx()) + &(&r * &b[m].dx())).scale(&half_i());
        let an = integrand.integrate_x()?;
        if b.len() <= top {
            let bn = (&(&b[m].dx() + &(&s * &b[m]).scale(&Coeff::imag(2, 1))) + &(&q * &an).scale(&two)).scale(&half_i());
            let cn = (&(&c[m].dx() - &(&s * &c[m]).scale(&Coeff::imag(2, 1))) - &(&r * &an).scale(&two)).scale(&-half_i());
            b.push(bn);
            c.push(cn);
        }
        a.push(an);
        m += 1;
    }
    b.truncate(top + 1);
    c.truncate(top + 1);
    Ok(CoeffTable { family: Family::Dnls, n, a, b, c, beta: Some(beta.clone()) })
}

/// DNLS coefficients with symbolic `beta`.
pub fn dnls_coeffs(n: usize) -> Result<CoeffTable> {
    dnls_coeffs_with(n, &DiffPoly::param("beta"))
}

pub fn dnls_eom(n: usize) -> Result<EomPair> {
    Ok(dnls_eom_from(&dnls_coeffs(n)?))
}

/// `q_t = b_{2n+1,x} + i(1+2β)qr b_{2n+1} + 2(1+2β) q a_{2n+2}` and the mirrored `r_t`.
///
/// The factor 2 in the `r a_{2n+2}` term of `r_t` is required by zero curvature
/// (the flat pair forces the symmetric form).
pub fn dnls_eom_from(t: &CoeffTable) -> EomPair {
    let n = t.n;
    let beta = t.beta.clone().unwrap_or_else(|| DiffPoly::param("beta"));
    let one_2b = &DiffPoly::one() + &beta.scale(&Coeff::int(2));
    let (q, r) = (q().poly(), r().poly());
    let qr = &q * &r;
    let b = &t.b[2 * n + 1];
    let c = &t.c[2 * n + 1];
    let a = &t.a[2 * n + 2];
    let two = Coeff::int(2);
    let q_t = &(&b.dx() + &(&(&one_2b * &qr) * b).scale(&Coeff::i())) + &(&(&one_2b * &q) * a).scale(&two);
    let r_t = &(&c.dx() - &(&(&one_2b * &qr) * c).scale(&Coeff::i())) - &(&(&one_2b * &r) * a).scale(&two);
    EomPair::new(format!("DNLS n={n}"), q_t, r_t)
}

/// Substitute a numeric `β` into a DNLS system.
pub fn dnls_reduce(eom: &EomPair, beta: Coeff) -> Result<EomPair> {
    let b = DiffPoly::constant(beta.clone());
    let label = match (beta.re.to_string().as_str(), beta.is_real()) {
        ("-1/2", true) => "KN".to_string(),
        ("-1/4", true) => "CLL".to_string(),
        ("0", true) => "GI".to_string(),
        _ => format!("{} (beta={beta})", eom.label),
    };
    Ok(EomPair {
        label,
        q: eom.q.clone(),
        r: eom.r.clone(),
        q_t: eom.q_t.substitute_param("beta", &b)?,
        r_t: eom.r_t.substitute_param("beta", &b)?,
    })
}

/// The Lax pair of a coefficient table.
pub fn build_lax(t: &CoeffTable) -> (LaxMatrix, LaxMatrix) {
    let (q, r) = (q().poly(), r().poly());
    let mi = DiffPoly::constant(Coeff::imag(-1, 1));
    match t.family {
        Family::Nls => {
            let l = LaxMatrix::zero().with(1, Comp::S3, &mi).with(0, Comp::Plus, &q).with(0, Comp::Minus, &r);
            let mut m = LaxMatrix::zero();
            for k in 0..=t.n {
                let g = (t.n - k) as i32;
                m.add(g, Comp::S3, &t.a[k]);
                m.add(g, Comp::Plus, &t.b[k]);
                m.add(g, Comp::Minus, &t.c[k]);
            }
            (l, m)
        }
        Family::Dnls => {
            let beta = t.beta.clone().unwrap_or_else(|| DiffPoly::param("beta"));
            let s = dnls_s(&beta);
            let l = LaxMatrix::zero()
                .with(2, Comp::S3, &mi)
                .with(0, Comp::S3, &s.scale(&Coeff::imag(-1, 1)))
                .with(1, Comp::Plus, &q)
                .with(1, Comp::Minus, &r);
            let top = 2 * t.n + 2;
            let mut m = LaxMatrix::zero();
            for k in 0..=top {
                let g = (top - k) as i32;
                m.add(g, Comp::S3, &t.a[k]);
                m.add(g, Comp::Plus, &t.b[k]);
                m.add(g, Comp::Minus, &t.c[k]);
            }
            m.add(0, Comp::S3, &(&beta * &t.a[top]).scale(&Coeff::int(2)));
            (l, m)
        }
    }
}

/// The `gl(2)` form of the first CLL pair: the traceless DNLS pair at `β = -1/4`
/// plus the identity parts `(i/4) qr I` in `L` and `-(1/2) a_4 I` in `M`.
pub fn cll_lax_gl2() -> Result<(LaxMatrix, LaxMatrix)> {
    let t = dnls_coeffs_with(1, &DiffPoly::constant(Coeff::frac(-1, 4)))?;
    let (mut l, mut m) = build_lax(&t);
    l.add(0, Comp::Id, &(&q().poly() * &r().poly()).scale(&Coeff::imag(1, 4)));
    m.add(0, Comp::Id, &t.a[4].scale(&Coeff::frac(-1, 2)));
    Ok((l, m))
}
