//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Reference values are hand transcriptions of the published closed forms. A few of
//! them are wrong; for those the check records the discrepancy and requires the
//! library to produce the corrected value instead. The criterion then prints FAIL,
//! but the process exits non-zero only on a mismatch that is not a known correction.

use std::collections::HashMap;
use std::time::Instant;

use laxforge::cli;
use laxforge::coeff::Coeff;
use laxforge::hierarchy;
use laxforge::loopalg::{curvature, Comp};
use laxforge::nhd::{self, same_relation};
use laxforge::numerics::{self, ChargeSpec, Grid, Integrator, SimConfig, System, Zero};
use laxforge::quasi::{self, AbelFamily, QidSpec, Verdict};
use laxforge::{Context, DiffPoly, Error, Parity};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Criterion {
    checks: usize,
    errata: Vec<String>,
    failures: Vec<String>,
}

impl Criterion {
    fn check(&mut self, label: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(format!("{label}: {}", detail()));
        }
    }

    /// `ours` must equal `reference`, or, for a known wrong reference, `corrected`.
    fn value(&mut self, label: &str, ours: &DiffPoly, reference: &DiffPoly, corrected: Option<&DiffPoly>) {
        self.compare(label, ours, reference, corrected, |a, b| a == b);
    }

    /// Same, for relations `p = 0` (equal up to a constant factor).
    fn relation(&mut self, label: &str, ours: &DiffPoly, reference: &DiffPoly, corrected: Option<&DiffPoly>) {
        self.compare(label, ours, reference, corrected, same_relation);
    }

    fn compare(
        &mut self,
        label: &str,
        ours: &DiffPoly,
        reference: &DiffPoly,
        corrected: Option<&DiffPoly>,
        same: impl Fn(&DiffPoly, &DiffPoly) -> bool,
    ) {
        self.checks += 1;
        if same(ours, reference) {
            return;
        }
        match corrected {
            Some(c) if same(ours, c) => self.errata.push(label.to_string()),
            _ => self.failures.push(format!("{label}: got {ours}, reference {reference}")),
        }
    }

    fn report(self, id: usize, name: &str, started: Instant, budget_s: f64) -> bool {
        let elapsed = started.elapsed().as_secs_f64();
        let mut c = self;
        c.check("time budget", elapsed < budget_s, || format!("{elapsed:.1} s > {budget_s} s"));
        let pass = c.errata.is_empty() && c.failures.is_empty();
        let mut line = format!("criterion {id} ({name}): {} [{} checks, {elapsed:.2} s]", if pass { "PASS" } else { "FAIL" }, c.checks);
        if !c.errata.is_empty() {
            line.push_str(&format!("; reference values contradicted by the derivation: {}", c.errata.join(", ")));
        }
        println!("{line}");
        for f in &c.failures {
            println!("    unexpected: {f}");
        }
        c.failures.is_empty()
    }
}

fn qr_ctx() -> Context {
    Context::qr().with(&["R", "S"], Parity::Even).with(&["phi"], Parity::Odd)
}

fn p(ctx: &Context, s: &str) -> DiffPoly {
    ctx.parse(s).unwrap_or_else(|e| panic!("cannot parse {s}: {e}"))
}

/// Rendered `sqrt(qr)` is written `S` in the transcriptions.
fn rendered(ctx: &Context, s: &str) -> DiffPoly {
    p(ctx, s).replace_field("S", &quasi::sqrt_qr())
}

// ---------------------------------------------------------------------------

fn criterion_1() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let ctx = qr_ctx();
    let t = hierarchy::nls_coeffs(4).unwrap();
    let coeffs: [(&str, usize, &str); 12] = [
        ("b", 1, "I*alpha*q"),
        ("c", 1, "I*alpha*r"),
        ("a", 1, "0"),
        ("b", 2, "-(alpha/2)*q[x]"),
        ("c", 2, "(alpha/2)*r[x]"),
        ("a", 2, "(alpha/2)*q*r"),
        ("b", 3, "(I*alpha/2)*(-(1/2)*q[xx] + q^2*r)"),
        ("c", 3, "(I*alpha/2)*(-(1/2)*r[xx] + q*r^2)"),
        ("a", 3, "(I*alpha/4)*(r*q[x] - q*r[x])"),
        ("b", 4, "(alpha/8)*(q[xxx] - 6*q*q[x]*r)"),
        ("c", 4, "(alpha/8)*(-r[xxx] + 6*q*r*r[x])"),
        ("a", 4, "(alpha/8)*(q^2*r^2 + r[x]*q[x] - q*r[xx] - r*q[xx])"),
    ];
    let a4_corrected = p(&ctx, "(alpha/8)*(3*q^2*r^2 + r[x]*q[x] - q*r[xx] - r*q[xx])");
    for (name, m, s) in coeffs {
        let ours = match name {
            "a" => &t.a[m],
            "b" => &t.b[m],
            _ => &t.c[m],
        };
        let corr = (name == "a" && m == 4).then_some(&a4_corrected);
        c.value(&format!("NLS {name}_{m}"), ours, &p(&ctx, s), corr);
    }

    let nls2 = hierarchy::nls_eom(2).unwrap();
    c.value("NLS n=2 q_t", &nls2.q_t, &p(&ctx, "alpha*(-(1/2)*q[xx] + q^2*r)"), None);
    c.value("NLS n=2 r_t", &nls2.r_t, &p(&ctx, "alpha*((1/2)*r[xx] - q*r^2)"), None);
    let nls3 = hierarchy::nls_eom(3).unwrap();
    c.value("NLS n=3 q_t", &nls3.q_t, &p(&ctx, "I*alpha*(-(1/4)*q[xxx] + (3/2)*q*q[x]*r)"), None);
    c.value("NLS n=3 r_t", &nls3.r_t, &p(&ctx, "I*alpha*(-(1/4)*r[xxx] + (3/2)*q*r*r[x])"), None);

    let dnls = hierarchy::dnls_eom(1).unwrap();
    c.value(
        "DNLS n=1 q_t",
        &dnls.q_t,
        &p(&ctx, "I*q[xx] - (4*beta + 1)*q^2*r[x] - 4*beta*q*q[x]*r + (I/2)*(1 + 2*beta)*(4*beta + 1)*q^3*r^2"),
        None,
    );
    c.value(
        "DNLS n=1 r_t",
        &dnls.r_t,
        &p(&ctx, "-I*r[xx] - (4*beta + 1)*r^2*q[x] - 4*beta*r*r[x]*q - (I/2)*(1 + 2*beta)*(4*beta + 1)*q^2*r^3"),
        None,
    );
    let reductions = [
        ("KN", Coeff::frac(-1, 2), p(&ctx, "I*q[xx]") + p(&ctx, "q^2*r").dx(), p(&ctx, "-I*r[xx]") + p(&ctx, "q*r^2").dx()),
        ("CLL", Coeff::frac(-1, 4), p(&ctx, "I*q[xx] + q*q[x]*r"), p(&ctx, "-I*r[xx] + r*r[x]*q")),
        ("GI", Coeff::zero(), p(&ctx, "I*q[xx] - q^2*r[x] + (I/2)*q^3*r^2"), p(&ctx, "-I*r[xx] - r^2*q[x] - (I/2)*q^2*r^3")),
    ];
    for (name, beta, q_t, r_t) in reductions {
        let e = hierarchy::dnls_reduce(&dnls, beta).unwrap();
        c.value(&format!("{name} q_t"), &e.q_t, &q_t, None);
        c.value(&format!("{name} r_t"), &e.r_t, &r_t, None);
    }
    c.report(1, "hierarchy coefficients and equations", t0, 1.0)
}

fn criterion_2() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cli::DEFAULT_SEED);
    for (name, l, m, eom) in cli::flat_systems().unwrap() {
        let rw = eom.rewriter();
        let f = curvature(&l, &m).map(|x| rw.apply(x));
        c.check(&format!("{name} symbolic"), f.is_zero(), || "curvature does not vanish".into());
        let worst = cli::random_curvature_residual(&l, &m, &eom, 100, &mut rng).unwrap();
        c.check(&format!("{name} random evaluation"), worst < 1e-10, || format!("residual {worst:e}"));
    }
    c.report(2, "zero curvature", t0, 30.0)
}

fn criterion_3() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let ctx = qr_ctx();
    let table = hierarchy::nls_coeffs(4).unwrap();
    let (_, generic) = quasi::qid_deform(&table, &QidSpec::generic(4).unwrap()).unwrap();
    let x1 = p(&ctx, "(gamma_1 - beta_1)*q*r");
    let x2 = &p(&ctx, "-(alpha/2)*(q[x]*r + q*r[x])") - &p(&ctx, "2*(gamma_2*q*r[x] + beta_2*r*q[x])");
    let x3 = p(&ctx, "2*(gamma_3 + beta_3)*q^2*r^2 + beta_3*r*q[xx] - gamma_3*q*r[xx] - (I*alpha/4)*(r*q[xx] - q*r[xx])");
    let x3_corrected =
        p(&ctx, "(gamma_3 - beta_3)*q^2*r^2 + (1/2)*(beta_3*r*q[xx] - gamma_3*q*r[xx]) - (I*alpha/4)*(r*q[xx] - q*r[xx])");
    let a4 = p(&ctx, "(alpha/8)*(3*q^2*r^2 + r[x]*q[x] - q*r[xx] - r*q[xx])");
    let x4_head = p(&ctx, "q*gamma_4*(r[xxx] - 6*q*r*r[x]) + r*beta_4*(q[xxx] - 6*r*q*q[x])");
    let x4 = &x4_head - &p(&ctx, "(alpha/8)*(q^2*r^2 + r[x]*q[x] - q*r[xx] - r*q[xx])");
    let x4_corrected = &x4_head - &a4.dx();
    c.value("X_1", generic.get(1).unwrap(), &x1, None);
    c.value("X_2", generic.get(2).unwrap(), &x2, None);
    c.value("X_3", generic.get(3).unwrap(), &x3, Some(&x3_corrected));
    c.value("X_4", generic.get(4).unwrap(), &x4, Some(&x4_corrected));

    let (_, equal) = quasi::qid_deform(&table, &QidSpec::generic(4).unwrap().with_equal_couplings()).unwrap();
    for m in 1..=4 {
        if m % 2 == 0 {
            let v = quasi::classify_density(m, equal.get(m).unwrap());
            c.check(&format!("X_{m} at equal couplings"), v.verdict == Verdict::ParityOdd && v.total_derivative, || {
                format!("{} (total derivative: {})", v.verdict, v.total_derivative)
            });
        } else {
            let v = quasi::classify_density(m, generic.get(m).unwrap());
            c.check(&format!("X_{m}"), v.verdict == Verdict::ParityEven && !v.quasi_integrable(), || v.verdict.to_string());
        }
    }
    c.report(3, "QI anomalies and parity verdicts", t0, 30.0)
}

fn criterion_4() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let ctx = qr_ctx();
    let render = |x: &DiffPoly| quasi::render_qr(x).unwrap();

    let nls = quasi::abelianize(AbelFamily::Nls, 4).unwrap();
    let xi_nls = [
        ("0", "-2*R"),
        ("-2*I*R[x]", "-phi[x]*R"),
        ("-I*phi[xx]*R - 2*I*phi[x]*R[x]", "2*R[xx] - (1/2)*phi[x]^2*R - (4/3)*kappa*R^3"),
        (
            "2*I*R[xxx] - 4*I*kappa*R*R[x] + (3/2)*phi[x]*phi[xx]*R + (3/2)*phi[x]^2*R[x]",
            "phi[xxx]*R + 3*phi[xx]*R[x] + 3*phi[x]*R[xx] - (1/4)*phi[x]^3*R - (10/3)*kappa*phi[x]*R^3",
        ),
    ];
    let nls_xi1_4 = p(&ctx, "2*I*R[xxx] - (3/2)*I*phi[x]*phi[xx]*R - (16/3)*I*kappa*R^2*R[x] - (3/2)*I*phi[x]^2*R[x]");
    let nls_xi2_4 = p(&ctx, "phi[xxx]*R + 3*phi[xx]*R[x] + 3*phi[x]*R[xx] - (1/4)*phi[x]^3*R - 2*kappa*phi[x]*R^3");
    for (j, (x1, x2)) in xi_nls.iter().enumerate() {
        let j = j + 1;
        let (c1, c2) = if j == 4 { (Some(&nls_xi1_4), Some(&nls_xi2_4)) } else { (None, None) };
        c.value(&format!("NLS xi1^-{j}"), nls.xi1(j), &p(&ctx, x1), c1);
        c.value(&format!("NLS xi2^-{j}"), nls.xi2(j), &p(&ctx, x2), c2);
    }
    let alpha_nls = ["1", "0", "q*r", "phi[x]*q*r", "(3/2)*q^2*r^2 + (3/4)*phi[x]^2*q*r + S[x]^2 - 2*S*S[xx]"];
    for (j, s) in alpha_nls.iter().enumerate() {
        c.value(&format!("NLS alpha^-{j}"), &render(&nls.alphas[j]), &rendered(&ctx, s), None);
    }
    let charges_nls = [
        (1, "-I", None),
        (0, "(I/2)*phi[x]", None),
        (-1, "I*q*r", None),
        (-2, "(I/2)*phi[x]*q*r", None),
        (-3, "-I*S[x]^2 + (I/4)*phi[x]^2*q*r + (I/2)*q^2*r^2", Some("-I*S*S[xx] + (I/4)*phi[x]^2*q*r + (I/2)*q^2*r^2")),
    ];
    for (g, s, corr) in charges_nls {
        let corr = corr.map(|x| rendered(&ctx, x));
        c.value(&format!("NLS L^{g}"), &render(&nls.charge(g)), &rendered(&ctx, s), corr.as_ref());
    }

    let kn = quasi::abelianize(AbelFamily::Kn, 4).unwrap();
    let xi_kn = [
        ("0", "-2*R"),
        ("0", "-phi[x]*R"),
        ("-2*I*R[x]", "-(4/3)*kappa*R^3 - (1/2)*phi[x]^2*R"),
        ("-I*phi[xx]*R - 2*I*phi[x]*R[x]", "-(1/4)*phi[x]^3*R - 3*kappa*phi[x]*R^3"),
    ];
    let kn_xi2_4 = p(&ctx, "-(1/4)*phi[x]^3*R - 2*kappa*phi[x]*R^3");
    for (j, (x1, x2)) in xi_kn.iter().enumerate() {
        let j = j + 1;
        c.value(&format!("KN xi1^-{j}"), kn.xi1(j), &p(&ctx, x1), None);
        c.value(&format!("KN xi2^-{j}"), kn.xi2(j), &p(&ctx, x2), (j == 4).then_some(&kn_xi2_4));
    }
    let alpha_kn = ["1", "0", "q*r", "phi[x]*q*r", "(3/2)*q^2*r^2 + (1/4)*phi[x]^2*q*r"];
    let kn_alpha4 = rendered(&ctx, "(3/2)*q^2*r^2 + (3/4)*phi[x]^2*q*r");
    for (j, s) in alpha_kn.iter().enumerate() {
        c.value(&format!("KN alpha^-{j}"), &render(&kn.alphas[j]), &rendered(&ctx, s), (j == 4).then_some(&kn_alpha4));
    }
    let charges_kn = [
        (2, "-I"),
        (1, "(I/2)*phi[x]"),
        (0, "I*q*r"),
        (-1, "(I/2)*phi[x]*q*r"),
        (-2, "(I/4)*phi[x]^2*q*r + (I/2)*q^2*r^2"),
    ];
    for (g, s) in charges_kn {
        c.value(&format!("KN L^{g}"), &render(&kn.charge(g)), &rendered(&ctx, s), None);
    }
    c.report(4, "abelianization tables", t0, 30.0)
}

fn criterion_5() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let ctx = qr_ctx();
    let beta = DiffPoly::param("beta");
    let base = quasi::dnls_hamiltonians(1, &beta).unwrap().remove(0);
    let insertions = [
        "0",
        "epsilon*q^3*r^3",
        "epsilon*q[x]*r[x]*q*r",
        "epsilon*(q*r)^2*q[x]*r",
        "epsilon_1*q^2*r^2 + epsilon_2*q*r[xx]",
    ];
    for s in insertions {
        let h = &base + &p(&ctx, s);
        let d = quasi::dnls_qid(1, &beta, &[h]).unwrap();
        let g1 = d.curvature.get(1, Comp::S3);
        c.check(&format!("H + {s}"), g1.is_zero() && d.odd_sigma3_vanish, || format!("sigma3 at grade 1: {g1}"));
    }
    c.report(5, "DNLS odd-grade anomaly vanishing", t0, 30.0)
}

fn criterion_6() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let ctx = qr_ctx().with(&["a", "g1", "g2", "b", "f1", "f2", "w", "m1", "m2", "u", "v"], Parity::Even);
    let lhat = |g1: &str, g2: &str| p(&ctx, &format!("r*{g1}[xx] + q[x]*{g2}[x] + 2*q*r*(q*{g2} - r*{g1})"));

    let n1 = nhd::nls_nhd(2, 1).unwrap();
    c.value("NLS deformed q_t", &n1.deformed_eom.q_t, &p(&ctx, "(I/2)*q[xx] - I*q^2*r - g1"), None);
    c.value("NLS deformed r_t", &n1.deformed_eom.r_t, &p(&ctx, "-(I/2)*r[xx] + I*q*r^2 + g2"), None);
    c.relation("NLS depth 1 sigma3", n1.constraint(-1, Comp::S3).unwrap(), &p(&ctx, "a[x] - (q*g2 - r*g1)"), None);
    c.relation("NLS depth 1 sigma+", n1.constraint(-1, Comp::Plus).unwrap(), &p(&ctx, "g1[x] + 2*a*q"), None);
    c.relation("NLS depth 1 sigma-", n1.constraint(-1, Comp::Minus).unwrap(), &p(&ctx, "g2[x] - 2*a*r"), None);
    let red1 = nhd::reduce_constraints(&n1).unwrap();
    c.relation("NLS depth 1 reduced", &red1[0].1, &lhat("g1", "g2"), None);
    let order1 = nhd::eliminate_deformers(&n1).unwrap().order;
    c.check("NLS depth 1 eliminated order", order1 == 4, || format!("order {order1}"));

    let n2 = nhd::nls_nhd(2, 2).unwrap();
    c.relation("NLS depth 2 sigma3", n2.constraint(-1, Comp::S3).unwrap(), &p(&ctx, "a[x] - (q*g2 - r*g1)"), None);
    c.relation("NLS depth 2 sigma+", n2.constraint(-1, Comp::Plus).unwrap(), &p(&ctx, "g1[x] + 2*I*f1 + 2*a*q"), None);
    c.relation("NLS depth 2 sigma-", n2.constraint(-1, Comp::Minus).unwrap(), &p(&ctx, "g2[x] - 2*I*f2 - 2*a*r"), None);
    let red2 = nhd::reduce_constraints(&n2).unwrap();
    let get = |g: i32| red2.iter().find(|(k, _)| *k == g).map(|(_, x)| x.clone()).unwrap_or_default();
    c.relation("NLS depth 2 reduced at -1", &get(-1), &(&lhat("g1", "g2") + &p(&ctx, "2*I*(r*f1[x] - q[x]*f2)")), None);
    c.relation("NLS depth 2 reduced at -2", &get(-2), &lhat("f1", "f2"), None);
    let order2 = nhd::eliminate_deformers(&n2).unwrap().order;
    c.check("NLS depth 2 eliminated order", order2 == 5, || format!("order {order2}"));

    let k3 = nhd::nls_nhd(3, 1).unwrap();
    c.value("KdV-type deformed q_t", &k3.deformed_eom.q_t, &p(&ctx, "-(1/4)*q[xxx] + (3/2)*q*q[x]*r - g1"), None);
    c.value("KdV-type deformed r_t", &k3.deformed_eom.r_t, &p(&ctx, "-(1/4)*r[xxx] + (3/2)*r*r[x]*q + g2"), None);
    let red3 = nhd::reduce_constraints(&k3).unwrap();
    c.relation("KdV-type reduced", &red3[0].1, &lhat("g1", "g2"), None);

    let kn = nhd::kn_nhd().unwrap();
    let mut vanishing = kn.vanishing.clone();
    vanishing.sort();
    c.check("KN vanishing deformers", vanishing == ["a", "f1", "f2", "m1", "m2"] && kn.time_only == ["b"], || {
        format!("{vanishing:?}, time-only {:?}", kn.time_only)
    });
    let kctx = ctx.clone().with_time_only(&["b", "K"]);
    let kp = |s: &str| p(&kctx, s);
    c.relation("KN g1", kn.constraint(-1, Comp::Plus).unwrap(), &kp("g1[x] + 2*q*b"), None);
    c.relation("KN g2", kn.constraint(-1, Comp::Minus).unwrap(), &kp("g2[x] - 2*r*b"), None);
    c.relation("KN w", kn.constraint(0, Comp::S3).unwrap(), &kp("w[x] - (q*g2 - r*g1)"), None);
    match nhd::kn_resolve(&kn) {
        Ok(pot) => {
            let want = [("g1", "-2*b*u"), ("g2", "2*b*v"), ("w", "2*b*u*v + K")];
            for (name, s) in want {
                let got = pot.resolved.iter().find(|(n, _)| n == name).map(|(_, x)| x.clone()).unwrap_or_default();
                c.value(&format!("KN resolved {name}"), &got, &kp(s), None);
            }
            let u_eq = &kp("u[xt] - (I/2)*u[xxx] - 4*u*b - 2*I*u[x]*(2*b*u*v + K)") - &kp("(1/2)*u[x]^2*v[x]").dx();
            let v_eq = &kp("v[xt] + (I/2)*v[xxx] - 4*v*b + 2*I*v[x]*(2*b*u*v + K)") - &kp("(1/2)*u[x]*v[x]^2").dx();
            c.value("KN potential equation for u", &pot.u_eq, &u_eq, None);
            c.value("KN potential equation for v", &pot.v_eq, &v_eq, None);
        }
        Err(e) => c.check("KN resolution", false, || e.to_string()),
    }

    let cll = nhd::cll_nhd().unwrap();
    c.relation(
        "CLL w",
        cll.constraint(0, Comp::S3).unwrap(),
        &kp("I*w[x] - (q*g2 - r*g1)"),
        Some(&kp("w[x] + (1/2)*g1*r - (1/2)*g2*q")),
    );
    c.relation("CLL g1", cll.constraint(-1, Comp::Plus).unwrap(), &kp("g1[x] + 2*q*b + (I/2)*q*r*g1"), None);
    c.relation("CLL g2", cll.constraint(-1, Comp::Minus).unwrap(), &kp("g2[x] - 2*r*b - (I/2)*q*r*g2"), None);
    let res = nhd::resolve_potentials(&cll);
    c.check("CLL resolution", matches!(res, Err(Error::NotResolvable(_))), || format!("{res:?}"));
    c.report(6, "non-holonomic deformations", t0, 30.0)
}

fn criterion_7() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let grid = Grid::new(512, 40.0).unwrap();
    let params: HashMap<String, C64> = [("alpha".to_string(), C64::new(0.0, -1.0))].into();
    let nls = System::from_eom(&hierarchy::nls_eom(2).unwrap(), &params).unwrap();
    let v = numerics::periodic_velocity(&grid, 1);
    let omega = (1.0 - v * v) / 2.0;
    let period = 2.0 * std::f64::consts::PI / omega;
    let init = numerics::nls_soliton(&grid, 1.0, v, 0.0, 0.0);

    // single soliton, ten periods
    let dt = 0.01;
    let mut cfg = SimConfig::new(dt, (10.0 * period / dt).round() * dt);
    cfg.snapshot_every = 100;
    let traj = numerics::evolve(&nls, &grid, &init, &cfg).unwrap();
    let end = traj.last();
    let err = end.relative_error(&numerics::nls_soliton(&grid, 1.0, v, 0.0, end.t));
    c.check("soliton trajectory error", err < 1e-6, || format!("{err:e}"));
    let mass = numerics::compile_density(&Context::qr().parse("I*q*r").unwrap(), &HashMap::new()).unwrap();
    let spec = [ChargeSpec { j: 1, charge: Box::new(mass), anomaly: Box::new(Zero) }];
    let drift = numerics::measure(&grid, &traj, &spec).relative_drift(0);
    c.check("mass drift", drift < 1e-6, || format!("{drift:e}"));

    // convergence under dt halving
    let errs: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| {
            let mut cfg = SimConfig::new(h, 10.0);
            cfg.integrator = Integrator::Rk4;
            cfg.snapshot_every = usize::MAX;
            let tr = numerics::evolve(&nls, &grid, &init, &cfg).unwrap();
            tr.last().relative_error(&numerics::nls_soliton(&grid, 1.0, v, 0.0, tr.last().t))
        })
        .collect();
    for k in 0..2 {
        let ratio = errs[k] / errs[k + 1];
        c.check(&format!("convergence ratio {}", k + 1), (12.0..=20.0).contains(&ratio), || format!("{ratio:.2} ({errs:?})"));
    }

    // balance dQ/dt = Γ for j <= 2
    for eps in [0.0, 0.06] {
        let dt = 0.01;
        let mut cfg = SimConfig::new(dt, 10.0);
        cfg.snapshot_every = 1;
        let init = numerics::deformed_soliton(&grid, 0.5, eps, v, 0.0);
        let traj = numerics::evolve(&System::deformed_nls(eps), &grid, &init, &cfg).unwrap();
        let charges: Vec<ChargeSpec> = cli::nls_charges(eps).unwrap().into_iter().filter(|s| s.j <= 2).collect();
        let s = numerics::measure(&grid, &traj, &charges);
        for (k, j) in s.labels.iter().enumerate() {
            let (res, tol) = (s.max_residual(k), numerics::balance_tolerance(dt, s.scale(k)));
            c.check(&format!("balance j={j} eps={eps}"), res <= tol, || format!("{res:e} > {tol:e}"));
        }
    }

    // deformed collision: charges return after separation
    let eps = 0.06;
    let vc = numerics::periodic_velocity(&grid, 8);
    let x0 = grid.length / 4.0;
    let init = numerics::deformed_collision(&grid, 0.5, eps, vc, x0);
    let dt = 0.01;
    let mut cfg = SimConfig::new(dt, (2.0 * x0 / vc / dt).round() * dt);
    cfg.snapshot_every = 10;
    let traj = numerics::evolve(&System::deformed_nls(eps), &grid, &init, &cfg).unwrap();
    let charges: Vec<ChargeSpec> = cli::nls_charges(eps).unwrap().into_iter().filter(|s| s.j != 2).collect();
    let s = numerics::measure(&grid, &traj, &charges);
    for (k, j) in s.labels.iter().enumerate() {
        let (q0, q1) = (s.q[k][0], *s.q[k].last().unwrap());
        let rel = (q1 - q0).norm() / q0.norm();
        c.check(&format!("collision Q^{j}"), rel < 1e-3, || format!("{rel:e}"));
    }
    c.report(7, "numerics", t0, 600.0)
}

fn criterion_8() -> bool {
    let t0 = Instant::now();
    let mut c = Criterion::default();
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run_with(["laxforge", "verify", "--all"], &mut out, &mut err);
        (code, out)
    };
    let (c1, o1) = run();
    let (c2, o2) = run();
    c.check("exit codes", c1 == 0 && c2 == 0, || format!("{c1}, {c2}"));
    c.check("byte-identical reports", o1 == o2, || "reports differ".into());
    c.report(8, "determinism", t0, 60.0)
}

fn main() {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
