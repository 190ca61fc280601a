//! Canonical text form, e.g. `(1/2)*alpha*q[x] - I*q^2*r`, and its parser.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{DiffPoly, Field, Monomial, Parity};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

pub(super) fn format_poly(p: &DiffPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms.iter().enumerate() {
        let (neg, mag) = if c.is_real() || c.re.is_zero() {
            if c.is_negative_lead() {
                (true, -c)
            } else {
                (false, c.clone())
            }
        } else {
            (false, c.clone())
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let factors = monomial_factors(m);
        if factors.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

pub(crate) fn format_param(name: &str, half: i32) -> String {
    if half % 2 == 0 {
        match half / 2 {
            1 => name.to_string(),
            n if n > 0 => format!("{name}^{n}"),
            n => format!("{name}^({n})"),
        }
    } else {
        format!("{name}^({half}/2)")
    }
}

fn monomial_factors(m: &Monomial) -> Vec<String> {
    let mut f: Vec<String> = m.params.iter().map(|(p, e)| format_param(p, *e)).collect();
    for (v, e) in &m.jets {
        let mut s = v.field.name.to_string();
        if v.dx + v.dt > 0 {
            s.push('[');
            s.push_str(&"x".repeat(v.dx as usize));
            s.push_str(&"t".repeat(v.dt as usize));
            s.push(']');
        }
        if *e > 1 {
            s.push_str(&format!("^{e}"));
        }
        f.push(s);
    }
    f
}

/// Field declarations used when parsing; identifiers that are not fields are parameters.
#[derive(Clone, Debug, Default)]
pub struct Context {
    fields: HashMap<String, Field>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    /// Declare fields by name with the given parity.
    pub fn with(mut self, names: &[&str], parity: Parity) -> Context {
        for n in names {
            self.fields.insert((*n).to_string(), Field::new(n, parity));
        }
        self
    }

    pub fn with_time_only(mut self, names: &[&str]) -> Context {
        for n in names {
            self.fields.insert((*n).to_string(), Field::time_only(n));
        }
        self
    }

    pub fn add(&mut self, f: Field) {
        self.fields.insert(f.name.to_string(), f);
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.get(name)
    }

    /// `q, r` (even).
    pub fn qr() -> Context {
        Context::new().with(&["q", "r"], Parity::Even)
    }

    pub fn parse(&self, s: &str) -> Result<DiffPoly> {
        parse_poly(s, self)
    }
}

/// Parse the canonical text form (and a slightly larger grammar with
/// parentheses, powers and division by constants).
pub fn parse_poly(s: &str, ctx: &Context) -> Result<DiffPoly> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, ctx };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Num(s[st..i].parse().unwrap())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()[]".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

enum Atom {
    Param(String),
    Poly(DiffPoly),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ctx: &'a Context,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        let pos = self.toks.get(self.pos).map_or(usize::MAX, |t| t.0);
        Error::Parse { pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<DiffPoly> {
        let mut neg = false;
        if self.eat('-') {
            neg = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?;
        if neg {
            acc = -acc;
        }
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc.add_assign(&t);
            } else if self.eat('-') {
                let t = self.term()?;
                acc.sub_assign(&t);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.eat('/') {
                let f = self.factor()?;
                let c = f.as_constant().filter(|c| !c.is_zero()).ok_or_else(|| self.err("division by non-constant"))?;
                acc = acc.div_coeff(&c);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<DiffPoly> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let atom = self.atom()?;
        if !self.eat('^') {
            return Ok(match atom {
                Atom::Param(p) => DiffPoly::param(&p),
                Atom::Poly(p) => p,
            });
        }
        let (num, den) = self.exponent()?;
        match atom {
            Atom::Param(p) => {
                let half = match den {
                    1 => 2 * num,
                    2 => num,
                    _ => return Err(self.err("parameter exponents must be multiples of 1/2")),
                };
                Ok(DiffPoly::param_pow(&p, half as i32))
            }
            Atom::Poly(p) => {
                if den != 1 || num < 0 {
                    return Err(self.err("only non-negative integer powers of expressions"));
                }
                Ok(p.pow(num as u32))
            }
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let v: i64 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected integer")),
        }
    }

    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat('(') {
            let n = self.int()?;
            let d = if self.eat('/') { self.int()? } else { 1 };
            self.expect(')')?;
            if d <= 0 {
                return Err(self.err("bad exponent denominator"));
            }
            Ok((n, d))
        } else {
            Ok((self.int()?, 1))
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Atom::Poly(DiffPoly::constant(Coeff::from_real(BigRational::from_integer(n)))))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Atom::Poly(e))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if id == "I" {
                    return Ok(Atom::Poly(DiffPoly::constant(Coeff::i())));
                }
                let Some(field) = self.ctx.fields.get(&id).cloned() else {
                    if self.peek() == Some(&Tok::Sym('[')) {
                        return Err(self.err(&format!("`{id}` is not a declared field")));
                    }
                    return Ok(Atom::Param(id));
                };
                let (mut dx, mut dt) = (0, 0);
                if self.eat('[') {
                    match self.peek().cloned() {
                        Some(Tok::Ident(d)) if d.chars().all(|c| c == 'x' || c == 't') => {
                            self.pos += 1;
                            dx = d.chars().filter(|&c| c == 'x').count() as u32;
                            dt = d.chars().filter(|&c| c == 't').count() as u32;
                        }
                        _ => return Err(self.err("expected derivative string of x and t")),
                    }
                    self.expect(']')?;
                }
                if field.time_only && dx > 0 {
                    return Ok(Atom::Poly(DiffPoly::zero()));
                }
                Ok(Atom::Poly(DiffPoly::jet(field.jet(dx, dt))))
            }
            _ => Err(self.err("expected atom")),
        }
    }
}
