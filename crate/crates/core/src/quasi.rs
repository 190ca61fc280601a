//! Quasi-integrable deformations: Hamiltonian-driven coefficients, anomaly
//! densities, parity classification and the Abelianization tables.

use serde::Serialize;

use crate::coeff::Coeff;
use crate::diffpoly::{DiffPoly, Field, Monomial, PolyParity};
use crate::error::{Error, Result};
use crate::hierarchy::{self, build_lax, CoeffTable, Family};
use crate::loopalg::{self, curvature, Comp, GaugeGenerator, Gen, LaxMatrix, LoopElement};
use crate::rewrite::EomPair;

fn q() -> DiffPoly {
    hierarchy::q().poly()
}

fn r() -> DiffPoly {
    hierarchy::r().poly()
}

/// Built-in NLS Hamiltonian densities `H_1..H_count` (at most four).
pub fn nls_hamiltonians(count: usize) -> Result<Vec<DiffPoly>> {
    if count > 4 {
        return Err(Error::InvalidArgument(format!("only 4 built-in Hamiltonians, {count} requested")));
    }
    let (q, r) = (hierarchy::q(), hierarchy::r());
    let qr = &q.poly() * &r.poly();
    let all = vec![
        qr.clone(),
        &(&r.poly() * &q.dx(1)) - &(&q.poly() * &r.dx(1)),
        (&(&q.dx(1) * &r.dx(1)) + &qr.pow(2)).scale(&Coeff::frac(1, 2)),
        &(&q.poly() * &r.dx(3)) - &(&(&qr * &q.poly()) * &r.dx(1)).scale(&Coeff::int(3)),
    ];
    Ok(all.into_iter().take(count).collect())
}

/// `num / den` when it is a jet-free multiple.
pub fn constant_ratio(num: &DiffPoly, den: &DiffPoly) -> Option<DiffPoly> {
    let (lead, c) = den.terms().next()?;
    if !lead.params().is_empty() {
        return None;
    }
    let lead_jets = lead.jet_part();
    let mut k = DiffPoly::zero();
    for (m, cn) in num.terms() {
        if m.jet_part() == lead_jets {
            k.add_term(m.param_part(), &(cn * &c.inv()?));
        }
    }
    (&(den * &k) == num).then_some(k)
}

/// Hamiltonians and couplings `b_m = β_m δH_m/δr`, `c_m = γ_m δH_m/δq` for `m = 1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QidSpec {
    pub n: usize,
    pub hamiltonians: Vec<DiffPoly>,
    pub beta: Vec<DiffPoly>,
    pub gamma: Vec<DiffPoly>,
}

impl QidSpec {
    /// Built-in Hamiltonians with symbolic couplings `beta_m`, `gamma_m`.
    pub fn generic(n: usize) -> Result<QidSpec> {
        Ok(QidSpec {
            n,
            hamiltonians: nls_hamiltonians(n)?,
            beta: (1..=n).map(|m| DiffPoly::param(&format!("beta_{m}"))).collect(),
            gamma: (1..=n).map(|m| DiffPoly::param(&format!("gamma_{m}"))).collect(),
        })
    }

    /// Set `γ_m = β_m` for every order.
    pub fn with_equal_couplings(mut self) -> QidSpec {
        self.gamma = self.beta.clone();
        self
    }

    /// The couplings for which the deformation is trivial, found by matching
    /// against the hierarchy coefficients.
    pub fn undeformed(table: &CoeffTable, n: usize) -> Result<QidSpec> {
        let hamiltonians = nls_hamiltonians(n)?;
        let (mut beta, mut gamma) = (Vec::new(), Vec::new());
        for (k, h) in hamiltonians.iter().enumerate() {
            let m = k + 1;
            if m >= table.len() {
                return Err(Error::InvalidArgument(format!("table too short for order {m}")));
            }
            let no_match = || Error::InvalidArgument(format!("H_{m} is not proportional to the hierarchy at order {m}"));
            beta.push(constant_ratio(&table.b[m], &h.variational("r")?).ok_or_else(no_match)?);
            gamma.push(constant_ratio(&table.c[m], &h.variational("q")?).ok_or_else(no_match)?);
        }
        Ok(QidSpec { n, hamiltonians, beta, gamma })
    }

    pub fn substitute_param(&self, name: &str, value: &DiffPoly) -> Result<QidSpec> {
        let sub = |v: &[DiffPoly]| v.iter().map(|p| p.substitute_param(name, value)).collect::<Result<Vec<_>>>();
        Ok(QidSpec { n: self.n, hamiltonians: sub(&self.hamiltonians)?, beta: sub(&self.beta)?, gamma: sub(&self.gamma)? })
    }
}

/// Anomaly density of one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnomalyEntry {
    pub order: usize,
    /// Spectral power `λ^(n-m)` at which the density enters the curvature.
    pub grade: i32,
    pub density: DiffPoly,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnomalyReport {
    pub entries: Vec<AnomalyEntry>,
}

impl AnomalyReport {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.density.is_zero())
    }

    pub fn get(&self, order: usize) -> Option<&DiffPoly> {
        self.entries.iter().find(|e| e.order == order).map(|e| &e.density)
    }
}

/// Deformed EOMs `q_t = (β_m δH_m/δr)_x + 2 a_m q`, `r_t = (γ_m δH_m/δq)_x - 2 a_m r`
/// for every order, and `X_m = q γ_m δH_m/δq - a_{m,x} - r β_m δH_m/δr`.
pub fn qid_deform(table: &CoeffTable, spec: &QidSpec) -> Result<(Vec<EomPair>, AnomalyReport)> {
    if table.family != Family::Nls || spec.n >= table.len() {
        return Err(Error::InvalidArgument(format!("QID of order {} needs an NLS table with at least {} entries", spec.n, spec.n + 1)));
    }
    let (q, r) = (q(), r());
    let mut eoms = Vec::new();
    let mut report = AnomalyReport::default();
    for m in 1..=spec.n {
        let h = &spec.hamiltonians[m - 1];
        let b = &spec.beta[m - 1] * &h.variational("r")?;
        let c = &spec.gamma[m - 1] * &h.variational("q")?;
        let a = &table.a[m];
        let two = Coeff::int(2);
        eoms.push(EomPair::new(
            format!("QID NLS m={m}"),
            &b.dx() + &(a * &q).scale(&two),
            &c.dx() - &(a * &r).scale(&two),
        ));
        let x = &(&(&q * &c) - &a.dx()) - &(&r * &b);
        report.entries.push(AnomalyEntry { order: m, grade: (spec.n - m) as i32, density: x });
    }
    Ok((eoms, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Zero,
    ParityOdd,
    ParityEven,
    Mixed,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Zero => "zero",
            Verdict::ParityOdd => "parity-odd",
            Verdict::ParityEven => "parity-even",
            Verdict::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub order: usize,
    pub verdict: Verdict,
    pub total_derivative: bool,
}

impl Classification {
    /// Parity-odd anomalies are the quasi-integrable ones.
    pub fn quasi_integrable(&self) -> bool {
        matches!(self.verdict, Verdict::ParityOdd | Verdict::Zero)
    }
}

pub fn classify_density(order: usize, x: &DiffPoly) -> Classification {
    let verdict = match x.parity() {
        PolyParity::Zero => Verdict::Zero,
        PolyParity::Odd => Verdict::ParityOdd,
        PolyParity::Even => Verdict::ParityEven,
        PolyParity::Mixed => Verdict::Mixed,
    };
    Classification { order, verdict, total_derivative: x.integrate_x().is_ok() }
}

pub fn classify(report: &AnomalyReport) -> Vec<Classification> {
    report.entries.iter().map(|e| classify_density(e.order, &e.density)).collect()
}

// ---------------------------------------------------------------------------
// Abelianization

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AbelFamily {
    Nls,
    Kn,
}

impl std::fmt::Display for AbelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AbelFamily::Nls => "nls",
            AbelFamily::Kn => "kn",
        })
    }
}

/// The rotation angle, odd under parity.
pub fn phi() -> Field {
    Field::odd("phi")
}

/// `R = sqrt(qr/κ)`, even.
pub fn big_r() -> Field {
    Field::even("R")
}

pub fn kappa() -> DiffPoly {
    DiffPoly::param("kappa")
}

/// Rendering-only field standing for `sqrt(qr)`.
pub fn sqrt_qr() -> Field {
    Field::even("sqrt(qr)")
}

/// The spatial Lax component of the family before rotation.
pub fn spatial_lax(family: AbelFamily) -> LaxMatrix {
    let mi = DiffPoly::constant(Coeff::imag(-1, 1));
    let g = match family {
        AbelFamily::Nls => 0,
        AbelFamily::Kn => 1,
    };
    LaxMatrix::zero().with(g + 1, Comp::S3, &mi).with(g, Comp::Plus, &q()).with(g, Comp::Minus, &r())
}

/// The connection in the `(φ, R)` basis.
///
/// NLS: `L` rotated by `exp((i/2) φ σ3)`, i.e. `-i b^1 + (i/2) φ_x b^0 + 2i R F1^0`.
/// KN: `-i b^2 + (i/2) φ_x b^1 + 2i R F1^1`, with the angle term one grade up.
pub fn rotated_lax(family: AbelFamily) -> Result<LoopElement> {
    match family {
        AbelFamily::Nls => {
            loopalg::diagonal_rotation(&spatial_lax(family), &hierarchy::q(), &hierarchy::r(), &phi(), &big_r(), &kappa())
        }
        AbelFamily::Kn => Ok(LoopElement::zero()
            .with(2, Gen::B, &DiffPoly::constant(Coeff::imag(-1, 1)))
            .with(1, Gen::B, &phi().dx(1).scale(&Coeff::imag(1, 2)))
            .with(1, Gen::F1, &big_r().poly().scale(&Coeff::imag(2, 1)))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianizationTable {
    pub family: AbelFamily,
    pub depth: usize,
    pub l_tilde: LoopElement,
    /// `ξ^{-j}` for `j = 1..=depth`.
    pub xi: GaugeGenerator,
    /// The rotated connection, exact at grades `top..=top-depth`.
    pub l_bar: LoopElement,
    /// `(grade, 𝓛^grade)` from the top grade down.
    pub charges: Vec<(i32, DiffPoly)>,
    /// `α^{-j}` for `j = 0..=depth`.
    pub alphas: Vec<DiffPoly>,
}

impl AbelianizationTable {
    pub fn top(&self) -> i32 {
        self.l_tilde.top_grade().unwrap_or(0)
    }

    pub fn xi1(&self, j: usize) -> &DiffPoly {
        &self.xi.components[j - 1].0
    }

    pub fn xi2(&self, j: usize) -> &DiffPoly {
        &self.xi.components[j - 1].1
    }

    /// `𝓛` at a grade.
    pub fn charge(&self, grade: i32) -> DiffPoly {
        self.charges.iter().find(|(g, _)| *g == grade).map(|(_, p)| p.clone()).unwrap_or_default()
    }
}

/// Solve grade by grade for the generator that removes every `F1`/`F2` part of
/// the rotated connection down to `depth` grades below the top.
pub fn abelianize(family: AbelFamily, depth: usize) -> Result<AbelianizationTable> {
    let k = kappa();
    let l_tilde = rotated_lax(family)?;
    let top = l_tilde.top_grade().unwrap_or(0);
    let lead = l_tilde.get(top, Gen::B).as_constant().filter(|c| !c.is_zero()).ok_or(Error::UnderdeterminedSystem {
        grade: top,
        msg: "leading b-coefficient is not an invertible constant".into(),
    })?;
    let inv = lead.inv().expect("nonzero");
    let mut xi = GaugeGenerator::zero(0);
    for j in 1..=depth {
        xi.components.push((DiffPoly::zero(), DiffPoly::zero()));
        let grade = top - j as i32;
        let partial = loopalg::gauge_conjugate(&l_tilde, &xi, &k, grade)?;
        // [ξ1 F1 + ξ2 F2, c b^top] = -c ξ1 F2 - c ξ2 F1 must cancel the residue.
        let r1 = partial.get(grade, Gen::F1);
        let r2 = partial.get(grade, Gen::F2);
        xi.components[j - 1] = (r2.scale(&inv), r1.scale(&inv));
    }
    let min = top - depth as i32;
    let l_bar = loopalg::gauge_conjugate(&l_tilde, &xi, &k, min)?;
    for g in min..=top {
        if !l_bar.get(g, Gen::F1).is_zero() || !l_bar.get(g, Gen::F2).is_zero() {
            return Err(Error::UnderdeterminedSystem { grade: g, msg: "F-components survive the rotation".into() });
        }
    }
    let charges = (min..=top).rev().map(|g| (g, l_bar.get(g, Gen::B))).collect();
    let b0 = LoopElement::zero().with(0, Gen::B, &DiffPoly::one());
    let rotated_b0 = loopalg::adjoint(&b0, &xi, &k, -(depth as i32))?;
    let alphas = (0..=depth as i32).map(|j| loopalg::killing_project(&rotated_b0, j)).collect();
    Ok(AbelianizationTable { family, depth, l_tilde, xi, l_bar, charges, alphas })
}

/// Charge densities `𝓛` from the top grade down, rendered in `q, r`.
pub fn charges(family: AbelFamily, depth: usize) -> Result<Vec<(i32, DiffPoly)>> {
    let t = abelianize(family, depth)?;
    t.charges.iter().map(|(g, p)| Ok((*g, render_qr(p)?))).collect()
}

/// Rewrite `R = κ^(-1/2) sqrt(qr)` and collapse even powers of the undifferentiated
/// `sqrt(qr)` into powers of `qr`.
pub fn render_qr(p: &DiffPoly) -> Result<DiffPoly> {
    let s = sqrt_qr();
    let inv_sqrt_k = DiffPoly::param_pow("kappa", -1);
    let with_s = p.substitute_jets(|v| {
        (v.field.name.as_ref() == "R").then(|| &inv_sqrt_k * &DiffPoly::jet(s.jet(v.dx, v.dt)))
    });
    let base = s.jet(0, 0);
    let qr = &q() * &r();
    let mut out = DiffPoly::zero();
    for (m, c) in with_s.terms() {
        let e = m.jets().iter().find(|(j, _)| *j == base).map_or(0, |(_, k)| *k);
        let jets = m.jets().iter().filter(|(j, _)| *j != base).cloned().collect();
        let mut term = DiffPoly::term(c.clone(), Monomial::from_parts(jets, m.params().to_vec()));
        term = &term * &qr.pow(e / 2);
        if e % 2 == 1 {
            term = &term * &DiffPoly::jet(base.clone());
        }
        out.add_assign(&term);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kaup-Newell with a Hamiltonian insertion

/// The density consistent with the KN coefficient identities: `½q²r² + i q_x r_x`.
pub fn kn_hamiltonian() -> DiffPoly {
    let (qf, rf) = (hierarchy::q(), hierarchy::r());
    let qr = &q() * &r();
    &qr.pow(2).scale(&Coeff::frac(1, 2)) + &(&qf.dx(1) * &rf.dx(1)).scale(&Coeff::i())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnQid {
    pub hamiltonian: DiffPoly,
    pub a2: DiffPoly,
    pub b3: DiffPoly,
    pub c3: DiffPoly,
    /// `E_q`, `E_r`: the `σ±` components at `λ¹`.
    pub e_q: DiffPoly,
    pub e_r: DiffPoly,
    /// The `σ3` component at `λ²`.
    pub anomaly: DiffPoly,
    pub anomaly_grade: i32,
    /// Off-shell curvature.
    pub curvature: LaxMatrix,
    pub eom: EomPair,
}

/// KN pair with `a_2 = -(i/2) δ/δq(δH/δr)`, `b_3 = i q_x + δH/δr + i q_xx`,
/// `c_3 = -i r_x + δH/δq + i r_xx`.
pub fn kn_qid(h: &DiffPoly) -> Result<KnQid> {
    let (qf, rf) = (hierarchy::q(), hierarchy::r());
    let i = Coeff::i();
    let h_r = h.variational("r")?;
    let h_q = h.variational("q")?;
    let a2 = h_r.variational("q")?.scale(&Coeff::imag(-1, 2));
    let b3 = &(&qf.dx(1).scale(&i) + &h_r) + &qf.dx(2).scale(&i);
    let c3 = &(&rf.dx(1).scale(&-&i) + &h_q) + &rf.dx(2).scale(&i);
    let l = spatial_lax(AbelFamily::Kn);
    let m = LaxMatrix::zero()
        .with(4, Comp::S3, &DiffPoly::constant(Coeff::imag(-2, 1)))
        .with(3, Comp::Plus, &q().scale(&Coeff::int(2)))
        .with(3, Comp::Minus, &r().scale(&Coeff::int(2)))
        .with(2, Comp::S3, &a2)
        .with(1, Comp::Plus, &b3)
        .with(1, Comp::Minus, &c3);
    let f = curvature(&l, &m);
    let eom = EomPair::new("KN QID", b3.dx(), c3.dx());
    Ok(KnQid {
        hamiltonian: h.clone(),
        e_q: f.get(1, Comp::Plus),
        e_r: f.get(1, Comp::Minus),
        anomaly: f.get(2, Comp::S3),
        anomaly_grade: 2,
        a2,
        b3,
        c3,
        curvature: f,
        eom,
    })
}

// ---------------------------------------------------------------------------
// DNLS with Hamiltonian insertions

/// Split by total degree in the jets.
fn homogeneous_parts(p: &DiffPoly) -> std::collections::BTreeMap<u32, DiffPoly> {
    let mut out: std::collections::BTreeMap<u32, DiffPoly> = Default::default();
    for (m, c) in p.terms() {
        out.entry(m.degree()).or_default().add_term(m.clone(), c);
    }
    out
}

/// A density `H` with `δH/δq = e_q`, `δH/δr = e_r`, found by the homotopy formula
/// on homogeneous components and checked afterwards.
pub fn variational_potential(e_q: &DiffPoly, e_r: &DiffPoly) -> Result<DiffPoly> {
    let pairing = &(&q() * e_q) + &(&r() * e_r);
    let mut h = DiffPoly::zero();
    for (deg, part) in homogeneous_parts(&pairing) {
        h.add_assign(&part.scale(&Coeff::frac(1, deg as i64)));
    }
    let ok = |a: &DiffPoly, b: &DiffPoly| (a - b).is_zero();
    if !ok(&h.variational("q")?, e_q) || !ok(&h.variational("r")?, e_r) {
        return Err(Error::InvalidArgument("the pair is not a variational derivative".into()));
    }
    Ok(h)
}

/// `H_j` whose variational derivatives reproduce `b_{2j+1} = -2j δH_j/δr`,
/// `c_{2j+1} = -2j δH_j/δq` in the undeformed hierarchy.
pub fn dnls_hamiltonians(n: usize, beta: &DiffPoly) -> Result<Vec<DiffPoly>> {
    let t = hierarchy::dnls_coeffs_with(n, beta)?;
    (1..=n)
        .map(|j| {
            let s = Coeff::frac(-1, 2 * j as i64);
            variational_potential(&t.c[2 * j + 1].scale(&s), &t.b[2 * j + 1].scale(&s))
        })
        .collect()
}

/// `H - r δH/δr - q δH/δq`.
fn legendre_like(h: &DiffPoly) -> Result<DiffPoly> {
    Ok(&(h - &(&r() * &h.variational("r")?)) - &(&q() * &h.variational("q")?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnlsQid {
    pub n: usize,
    pub hamiltonians: Vec<DiffPoly>,
    pub table: CoeffTable,
    pub eom: EomPair,
    /// Curvature with the deformed EOM imposed.
    pub curvature: LaxMatrix,
    /// Whether every odd-grade `σ3` component vanishes.
    pub odd_sigma3_vanish: bool,
    /// Nonzero even-grade `σ3` components.
    pub anomalies: Vec<(i32, DiffPoly)>,
}

/// Deform the DNLS pair by Hamiltonians `H_j` (`j = 1..=n`): `b_{2j+1}`, `c_{2j+1}`
/// follow the variational rule and `a_{2j+2}` moves by `-(ij/2)` times the change of
/// `H - rH_r - qH_q`.
pub fn dnls_qid(n: usize, beta: &DiffPoly, hamiltonians: &[DiffPoly]) -> Result<DnlsQid> {
    if n == 0 || hamiltonians.len() != n {
        return Err(Error::InvalidArgument(format!("need n >= 1 and {n} Hamiltonians")));
    }
    let base = hierarchy::dnls_coeffs_with(n, beta)?;
    let undeformed = dnls_hamiltonians(n, beta)?;
    let mut t = base.clone();
    for j in 1..=n {
        let h = &hamiltonians[j - 1];
        let s = Coeff::int(-2 * j as i64);
        t.b[2 * j + 1] = h.variational("r")?.scale(&s);
        t.c[2 * j + 1] = h.variational("q")?.scale(&s);
        let shift = &legendre_like(h)? - &legendre_like(&undeformed[j - 1])?;
        t.a[2 * j + 2] = &base.a[2 * j + 2] + &shift.scale(&Coeff::imag(-(j as i64), 2));
    }
    let eom = hierarchy::dnls_eom_from(&t);
    let (l, m) = build_lax(&t);
    let rw = eom.rewriter();
    let f = curvature(&l, &m).map(|p| rw.apply(p));
    let mut odd = true;
    let mut anomalies = Vec::new();
    for (g, s) in f.grades() {
        if s.s3.is_zero() {
            continue;
        }
        if g.rem_euclid(2) == 1 {
            odd = false;
        } else {
            anomalies.push((g, s.s3.clone()));
        }
    }
    Ok(DnlsQid { n, hamiltonians: hamiltonians.to_vec(), table: t, eom, curvature: f, odd_sigma3_vanish: odd, anomalies })
}
