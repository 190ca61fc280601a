//! Structured JSON form: `{fields, terms: [{coeff, params, jets}]}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{DiffPoly, Field, Monomial, Parity};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub name: String,
    pub parity: Parity,
    #[serde(default)]
    pub time_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetJson {
    pub field: String,
    pub dx: u32,
    pub dt: u32,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    /// `[re, im]` as exact rationals, e.g. `["1/2", "0"]`.
    pub coeff: [String; 2],
    /// Parameter exponents as rationals, e.g. `{"kappa": "1/2"}`.
    pub params: BTreeMap<String, String>,
    pub jets: Vec<JetJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub fields: Vec<FieldJson>,
    pub terms: Vec<TermJson>,
}

impl DiffPoly {
    pub fn to_json(&self) -> PolyJson {
        let fields = self
            .fields()
            .into_values()
            .map(|f| FieldJson { name: f.name.to_string(), parity: f.parity, time_only: f.time_only })
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: [c.re.to_string(), c.im.to_string()],
                params: m
                    .params
                    .iter()
                    .map(|(p, e)| {
                        let v = if e % 2 == 0 { (e / 2).to_string() } else { format!("{e}/2") };
                        (p.to_string(), v)
                    })
                    .collect(),
                jets: m
                    .jets
                    .iter()
                    .map(|(v, e)| JetJson { field: v.field.name.to_string(), dx: v.dx, dt: v.dt, power: *e })
                    .collect(),
            })
            .collect();
        PolyJson { fields, terms }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json(j: &PolyJson) -> Result<DiffPoly> {
        let fields: BTreeMap<&str, Field> = j
            .fields
            .iter()
            .map(|f| {
                (f.name.as_str(), Field { name: Arc::from(f.name.as_str()), parity: f.parity, time_only: f.time_only })
            })
            .collect();
        let mut out = DiffPoly::zero();
        for t in &j.terms {
            let re: BigRational = t.coeff[0].parse().map_err(|_| bad(&t.coeff[0]))?;
            let im: BigRational = t.coeff[1].parse().map_err(|_| bad(&t.coeff[1]))?;
            let mut params = Vec::new();
            for (p, e) in &t.params {
                let r: BigRational = e.parse().map_err(|_| bad(e))?;
                let h = r * BigRational::from_integer(2.into());
                if !h.is_integer() {
                    return Err(bad(e));
                }
                let h: i32 = h.to_integer().try_into().map_err(|_| bad(e))?;
                params.push((Arc::from(p.as_str()), h));
            }
            let mut jets = Vec::new();
            for v in &t.jets {
                let f = fields.get(v.field.as_str()).ok_or_else(|| bad(&v.field))?;
                jets.push((f.jet(v.dx, v.dt), v.power));
            }
            out.add_term(Monomial::from_parts(jets, params), &Coeff::new(re, im));
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<DiffPoly> {
        DiffPoly::from_json(&serde_json::from_str(s)?)
    }
}

fn bad(s: &str) -> Error {
    Error::InvalidArgument(format!("bad JSON polynomial entry `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::super::Context;
    use super::*;

    #[test]
    fn round_trip() {
        let ctx = Context::qr().with_time_only(&["b"]);
        let p = ctx.parse("(1/2-I)*kappa^(1/2)*q[xt]^2*r - 3*b*alpha^(-1)").unwrap();
        assert_eq!(DiffPoly::from_json_str(&p.to_json_string()).unwrap(), p);
    }
}
