//! Numerical evaluation at a point of jet space.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;

use super::{DiffPoly, JetVar};
use crate::error::{Error, Result};

/// Values for jet variables and parameters.
#[derive(Clone, Debug, Default)]
pub struct Sample {
    pub jets: HashMap<JetVar, Complex64>,
    pub params: HashMap<String, Complex64>,
}

impl Sample {
    /// Random values in the unit box for every jet and parameter occurring in `polys`.
    /// Parameters already set in `fixed` are kept.
    pub fn random<R: Rng>(polys: &[&DiffPoly], fixed: &HashMap<String, Complex64>, rng: &mut R) -> Sample {
        let mut s = Sample { jets: HashMap::new(), params: fixed.clone() };
        let draw = |rng: &mut R| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for p in polys {
            let mut jets: Vec<_> = p.jets().into_iter().collect();
            jets.sort();
            for j in jets {
                if !s.jets.contains_key(&j) {
                    let v = draw(rng);
                    s.jets.insert(j, v);
                }
            }
            for name in p.params() {
                if !s.params.contains_key(&*name) {
                    let v = draw(rng);
                    s.params.insert(name.to_string(), v);
                }
            }
        }
        s
    }
}

impl DiffPoly {
    pub fn eval(&self, s: &Sample) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in self.terms() {
            let mut v = c.to_complex();
            for (p, e) in m.params() {
                let x = *s.params.get(&**p).ok_or_else(|| Error::MissingAssignment(p.to_string()))?;
                v *= if e % 2 == 0 { x.powi(e / 2) } else { x.sqrt().powi(*e) };
            }
            for (j, e) in m.jets() {
                let x = *s.jets.get(j).ok_or_else(|| Error::MissingAssignment(format!("{}", DiffPoly::jet(j.clone()))))?;
                v *= x.powi(*e as i32);
            }
            total += v;
        }
        Ok(total)
    }
}
