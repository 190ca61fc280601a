//! LaTeX form, e.g. `\frac{1}{2}\alpha q_{x} - i q^{2} r`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{DiffPoly, Monomial};
use crate::coeff::Coeff;

fn rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// `(sign, magnitude)` where the magnitude is printed in front of the monomial.
fn coeff_parts(c: &Coeff) -> (bool, String) {
    match (c.re.is_zero(), c.im.is_zero()) {
        (false, true) => (c.re.is_negative(), if c.re.abs().is_one() { String::new() } else { rat(&c.re.abs()) }),
        (true, false) => (c.im.is_negative(), if c.im.abs().is_one() { "i".into() } else { format!("{}i", rat(&c.im.abs())) }),
        _ => {
            let s = if c.im.is_negative() { "-" } else { "+" };
            (false, format!("\\left({}{}{}i\\right)", rat(&c.re), s, rat(&c.im.abs())))
        }
    }
}

fn symbol(name: &str) -> String {
    match name {
        "alpha" | "beta" | "gamma" | "kappa" | "lambda" | "epsilon" => format!("\\{name}"),
        "phi" => "\\varphi".into(),
        "sqrt(qr)" => "\\sqrt{qr}".into(),
        _ => match name.split_once('_') {
            Some((head, tail)) => format!("{}_{{{tail}}}", symbol(head)),
            None => name.into(),
        },
    }
}

fn power(base: String, e: String, one: bool) -> String {
    if one {
        base
    } else if base.contains('_') || base.starts_with("\\sqrt") {
        format!("\\left({base}\\right)^{{{e}}}")
    } else {
        format!("{base}^{{{e}}}")
    }
}

fn monomial(m: &Monomial) -> String {
    let mut f = Vec::new();
    for (p, half) in m.params() {
        let e = if half % 2 == 0 { (half / 2).to_string() } else { format!("{half}/2") };
        f.push(power(symbol(p), e, *half == 2));
    }
    for (v, e) in m.jets() {
        let mut s = symbol(&v.field.name);
        if v.dx + v.dt > 0 {
            let sub = format!("{}{}", "x".repeat(v.dx as usize), "t".repeat(v.dt as usize));
            s = if s.contains('_') { format!("\\left({s}\\right)_{{{sub}}}") } else { format!("{s}_{{{sub}}}") };
        }
        f.push(power(s, e.to_string(), *e == 1));
    }
    f.join(" ")
}

impl DiffPoly {
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms().enumerate() {
            let (neg, mag) = coeff_parts(c);
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let body = monomial(m);
            match (mag.is_empty(), body.is_empty()) {
                (true, true) => out.push('1'),
                (false, true) => out.push_str(&mag),
                (true, false) => out.push_str(&body),
                (false, false) => {
                    out.push_str(&mag);
                    out.push(' ');
                    out.push_str(&body);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::diffpoly::Context;

    #[test]
    fn nls_rhs() {
        let p = Context::qr().parse("(1/2)*I*q[xx] - I*q^2*r").unwrap();
        assert_eq!(p.to_latex(), "\\frac{1}{2}i q_{xx} - i q^{2} r");
    }

    #[test]
    fn params_and_constants() {
        let p = Context::qr().parse("-1 + (3/2)*beta_1*q*r").unwrap();
        let s = p.to_latex();
        assert!(s.contains("\\beta_{1}"), "{s}");
        assert!(s.contains("\\frac{3}{2}"), "{s}");
    }
}
