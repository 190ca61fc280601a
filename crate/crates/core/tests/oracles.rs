//! Independent numerical oracles: a faithful 2x2 realization of the loop algebra,
//! truncated Laurent-series matrix exponentials, and finite differences.

use std::collections::{BTreeMap, HashMap};

use laxforge::coeff::Coeff;
use laxforge::diffpoly::Sample;
use laxforge::loopalg::{self, GaugeGenerator, Gen, LoopElement};
use laxforge::numerics::{self, Grid};
use laxforge::quasi::{self, AbelFamily};
use laxforge::{Context, DiffPoly, Field, Parity};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M2 = [[C64; 2]; 2];
type Laurent = BTreeMap<i32, M2>;

const Z: C64 = C64::new(0.0, 0.0);

fn madd(a: &M2, b: &M2, s: C64) -> M2 {
    let mut o = *a;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] += s * b[i][j];
        }
    }
    o
}

fn mmul(a: &M2, b: &M2) -> M2 {
    let mut o = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

fn lmul(a: &Laurent, b: &Laurent, min: i32) -> Laurent {
    let mut o = Laurent::new();
    for (ga, ma) in a {
        for (gb, mb) in b {
            if ga + gb >= min {
                let e = o.entry(ga + gb).or_insert([[Z; 2]; 2]);
                *e = madd(e, &mmul(ma, mb), C64::new(1.0, 0.0));
            }
        }
    }
    o
}

fn ladd(a: &Laurent, b: &Laurent, s: C64) -> Laurent {
    let mut o = a.clone();
    for (g, m) in b {
        let e = o.entry(*g).or_insert([[Z; 2]; 2]);
        *e = madd(e, m, s);
    }
    o
}

/// `exp(A)` for `A` of strictly negative grades, kept at grades `>= min`.
fn lexp(a: &Laurent, min: i32) -> Laurent {
    let id = [[C64::new(1.0, 0.0), Z], [Z, C64::new(1.0, 0.0)]];
    let mut out: Laurent = [(0, id)].into();
    let mut term = out.clone();
    for k in 1..=(-min + 1) {
        term = lmul(&term, a, min);
        term.values_mut().for_each(|m| *m = madd(&[[Z; 2]; 2], m, C64::new(1.0 / k as f64, 0.0)));
        out = ladd(&out, &term, C64::new(1.0, 0.0));
    }
    out
}

fn lcomm(a: &Laurent, b: &Laurent, min: i32) -> Laurent {
    ladd(&lmul(a, b, min), &lmul(b, a, min), C64::new(-1.0, 0.0))
}

/// `B = σ3/2`, `F1 = ½(κσ+/2 - σ-)`, `F2 = ½(κσ+/2 + σ-)`.
fn generator(g: Gen, kappa: C64) -> M2 {
    let h = C64::new(0.5, 0.0);
    match g {
        Gen::B => [[h, Z], [Z, -h]],
        Gen::F1 => [[Z, kappa / 4.0], [-h, Z]],
        Gen::F2 => [[Z, kappa / 4.0], [h, Z]],
    }
}

fn realize(x: &LoopElement, s: &Sample, kappa: C64) -> Laurent {
    let mut o = Laurent::new();
    for (g, t) in x.grades() {
        let mut m = [[Z; 2]; 2];
        for gen in Gen::ALL {
            m = madd(&m, &generator(gen, kappa), t.get(gen).eval(s).unwrap());
        }
        o.insert(g, m);
    }
    o
}

/// Inverse of the realization at one grade: `(b, f1, f2)`.
fn components(m: &M2, kappa: C64) -> (C64, C64, C64) {
    let b = 2.0 * m[0][0];
    let sum = 4.0 * m[0][1] / kappa;
    let diff = 2.0 * m[1][0];
    (b, (sum - diff) / 2.0, (sum + diff) / 2.0)
}

fn ldist(a: &Laurent, b: &Laurent, min: i32) -> f64 {
    let mut worst: f64 = 0.0;
    let zero = [[Z; 2]; 2];
    for g in a.keys().chain(b.keys()).filter(|g| **g >= min) {
        let (x, y) = (a.get(g).unwrap_or(&zero), b.get(g).unwrap_or(&zero));
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((x[i][j] - y[i][j]).norm());
            }
        }
    }
    worst
}

fn random_constant(rng: &mut ChaCha8Rng) -> DiffPoly {
    DiffPoly::constant(Coeff::complex_frac(rng.gen_range(-6..=6), rng.gen_range(1..=4), rng.gen_range(-6..=6), rng.gen_range(1..=4)))
}

fn random_element(rng: &mut ChaCha8Rng, grades: std::ops::RangeInclusive<i32>) -> LoopElement {
    let mut x = LoopElement::zero();
    for g in grades {
        for gen in Gen::ALL {
            x.add(g, gen, &random_constant(rng));
        }
    }
    x
}

#[test]
fn bracket_matches_matrix_realization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kappa = Coeff::frac(3, 2);
    let kd = DiffPoly::constant(kappa.clone());
    let kc = kappa.to_complex();
    let s = Sample::default();
    for _ in 0..50 {
        let a = random_element(&mut rng, -2..=2);
        let b = random_element(&mut rng, -2..=2);
        let lib = realize(&a.commutator(&b, &kd, None), &s, kc);
        let mat = lcomm(&realize(&a, &s, kc), &realize(&b, &s, kc), i32::MIN);
        assert!(ldist(&lib, &mat, i32::MIN) < 1e-12);
    }
}

#[test]
fn adjoint_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kappa = Coeff::frac(-5, 3);
    let kd = DiffPoly::constant(kappa.clone());
    let kc = kappa.to_complex();
    let s = Sample::default();
    let min = -4;
    for _ in 0..20 {
        let x = random_element(&mut rng, -4..=1);
        let g = GaugeGenerator { components: (0..5).map(|_| (random_constant(&mut rng), random_constant(&mut rng))).collect() };
        let lib = realize(&loopalg::adjoint(&x, &g, &kd, min).unwrap(), &s, kc);
        let ge = realize(&g.element(), &s, kc);
        let neg: Laurent = ge.iter().map(|(k, m)| (*k, madd(&[[Z; 2]; 2], m, C64::new(-1.0, 0.0)))).collect();
        let cut = min - 1;
        let mat = lmul(&lmul(&lexp(&ge, cut), &realize(&x, &s, kc), cut), &lexp(&neg, cut), min);
        assert!(ldist(&lib, &mat, min) < 1e-10, "distance {}", ldist(&lib, &mat, min));
    }
}

/// Jet values at `x + h` from a Taylor expansion in the higher jets.
fn shifted(s: &Sample, h: f64) -> Sample {
    let mut out = Sample { jets: HashMap::new(), params: s.params.clone() };
    for (j, _) in &s.jets {
        let mut v = Z;
        let mut fact = 1.0;
        for m in 0.. {
            let Some(x) = s.jets.get(&j.field.jet(j.dx + m, 0)) else { break };
            if m > 0 {
                fact *= m as f64;
            }
            v += x * h.powi(m as i32) / fact;
        }
        out.jets.insert(j.clone(), v);
    }
    out
}

fn sample_jets(fields: &[Field], order: u32, params: &[(&str, C64)], rng: &mut ChaCha8Rng) -> Sample {
    let mut s = Sample::default();
    for f in fields {
        for k in 0..=order {
            let scale = 1.0 / (1.0 + k as f64);
            s.jets.insert(f.jet(k, 0), C64::new(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale));
        }
    }
    for (n, v) in params {
        s.params.insert(n.to_string(), *v);
    }
    s
}

#[test]
fn gauge_derivative_term_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let ctx = Context::qr();
    let kd = DiffPoly::param("kappa");
    let kc = C64::new(0.7, 0.2);
    let xi = |s: &str| ctx.parse(s).unwrap();
    let g = GaugeGenerator {
        components: vec![(xi("q"), xi("q*r")), (xi("r^2"), xi("q[x]")), (xi("0"), xi("r")), (xi("q*r[x]"), xi("0"))],
    };
    let min = -4;
    let lib = loopalg::gauge_conjugate(&LoopElement::zero(), &g, &kd, min).unwrap();
    let fields = [Field::even("q"), Field::even("r")];
    for _ in 0..10 {
        let s = sample_jets(&fields, 12, &[("kappa", kc)], &mut rng);
        let h = 1e-4;
        let e = |s: &Sample| lexp(&realize(&g.element(), s, kc), min);
        let dx = ladd(&e(&shifted(&s, h)), &e(&shifted(&s, -h)), C64::new(-1.0, 0.0));
        let dx: Laurent = dx.into_iter().map(|(k, m)| (k, madd(&[[Z; 2]; 2], &m, C64::new(0.5 / h, 0.0)))).collect();
        let neg: Laurent = realize(&g.element(), &s, kc).into_iter().map(|(k, m)| (k, madd(&[[Z; 2]; 2], &m, C64::new(-1.0, 0.0)))).collect();
        let mat = lmul(&dx, &lexp(&neg, min), min);
        let d = ldist(&realize(&lib, &s, kc), &mat, min);
        assert!(d < 1e-6, "distance {d}");
    }
}

#[test]
fn abelianized_connection_is_in_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for family in [AbelFamily::Nls, AbelFamily::Kn] {
        let tab = quasi::abelianize(family, 4).unwrap();
        let top = tab.top();
        let min = top - 4;
        let kc = C64::new(1.3, 0.0);
        let fields = [quasi::big_r(), quasi::phi()];
        for _ in 0..10 {
            let s = sample_jets(&fields, 12, &[("kappa", kc)], &mut rng);
            let h = 1e-4;
            let cut = min - top;
            let e = |s: &Sample| lexp(&realize(&tab.xi.element(), s, kc), cut);
            let e0 = e(&s);
            let neg: Laurent = realize(&tab.xi.element(), &s, kc)
                .into_iter()
                .map(|(k, m)| (k, madd(&[[Z; 2]; 2], &m, C64::new(-1.0, 0.0))))
                .collect();
            let einv = lexp(&neg, cut);
            let dx = ladd(&e(&shifted(&s, h)), &e(&shifted(&s, -h)), C64::new(-1.0, 0.0));
            let dx: Laurent = dx.into_iter().map(|(k, m)| (k, madd(&[[Z; 2]; 2], &m, C64::new(0.5 / h, 0.0)))).collect();
            let l_tilde = realize(&tab.l_tilde, &s, kc);
            let l_bar = ladd(&lmul(&lmul(&e0, &l_tilde, cut), &einv, min), &lmul(&dx, &einv, min), C64::new(1.0, 0.0));
            for g in min..=top {
                let m = l_bar.get(&g).copied().unwrap_or([[Z; 2]; 2]);
                let (b, f1, f2) = components(&m, kc);
                assert!(f1.norm() < 1e-6 && f2.norm() < 1e-6, "{family}: F-part at grade {g}: {f1} {f2}");
                let want = tab.charge(g).eval(&s).unwrap();
                assert!((b - want).norm() < 1e-6, "{family}: b at grade {g}: {b} vs {want}");
            }
        }
    }
}

#[test]
fn variational_derivative_matches_directional_derivative() {
    let ctx = Context::qr();
    let grid = Grid::new(256, 20.0).unwrap();
    let q: Vec<C64> = grid.x.iter().map(|x| C64::new((-x * x / 4.0).exp(), 0.3 * (-x * x / 3.0).exp() * x)).collect();
    let r: Vec<C64> = grid.x.iter().map(|x| C64::new(0.5 * (-(x - 1.0).powi(2) / 5.0).exp(), 0.0)).collect();
    let h: Vec<C64> = grid.x.iter().map(|x| C64::new((-(x + 0.5).powi(2)).exp(), 0.0)).collect();
    let no_params = HashMap::new();
    for dens in ["q[x]*r[x] + q^2*r^2", "q*r[xxx] - 3*q^2*r*r[x]", "I*q[x]*r - q^3*r^2*q[xx]"] {
        let d = ctx.parse(dens).unwrap();
        let density = numerics::compile_density(&d, &no_params).unwrap();
        let grad = numerics::compile_density(&d.variational("q").unwrap(), &no_params).unwrap();
        let eps = 1e-5;
        let shift = |s: f64| q.iter().zip(&h).map(|(a, b)| a + b * s).collect::<Vec<_>>();
        let fd = (grid.integrate(&density.eval(&grid, &shift(eps), &r)) - grid.integrate(&density.eval(&grid, &shift(-eps), &r))) / (2.0 * eps);
        let g = grad.eval(&grid, &q, &r);
        let exact = grid.integrate(&g.iter().zip(&h).map(|(a, b)| a * b).collect::<Vec<_>>());
        assert!((fd - exact).norm() < 1e-7 * exact.norm().max(1.0), "{dens}: {fd} vs {exact}");
    }
}

#[test]
fn random_evaluation_of_flat_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(laxforge::cli::DEFAULT_SEED);
    for (name, l, m, eom) in laxforge::cli::flat_systems().unwrap() {
        let worst = laxforge::cli::random_curvature_residual(&l, &m, &eom, 100, &mut rng).unwrap();
        assert!(worst < 1e-10, "{name}: {worst:e}");
    }
}

#[test]
fn parity_of_jets_follows_derivative_count() {
    let phi = Field::new("phi", Parity::Odd);
    assert_eq!(phi.jet(1, 0).parity(), Parity::Even);
    assert_eq!(Field::even("q").jet(3, 0).parity(), Parity::Odd);
}
