//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 verification or runtime failure, 2 usage error.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::Coeff;
use crate::diffpoly::{Context, DiffPoly, Sample};
use crate::error::{Error, Result};
use crate::hierarchy::{self, Family};
use crate::loopalg::{curvature, Comp, LaxMatrix};
use crate::numerics::{self, AnomalyIntegral, AnomalySource, ChargeSpec, FieldState, Grid, Integrator, PowerDeformation, SimConfig, System};
use crate::quasi::{self, AbelFamily};
use crate::report::{self, Format, Report};
use crate::rewrite::EomPair;

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const GOLDEN_ENV: &str = "LAXFORGE_GOLDEN_DIR";

#[derive(Parser, Debug)]
#[command(name = "laxforge", version, about = "NLS/DNLS hierarchies, quasi-integrable and non-holonomic deformations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print a hierarchy member and its recurrence coefficients.
    Hierarchy(HierarchyArgs),
    /// Anomalies, parity verdicts and abelianization tables of a QI deformation.
    Qid(QidArgs),
    /// Non-holonomic deformation: constraints, eliminated equation, potentials.
    Nhd(NhdArgs),
    /// Evolve a system and write the charge/anomaly series as CSV.
    Simulate(SimArgs),
    /// Golden-file and random-evaluation checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Nls,
    Dnls,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QidFamily {
    Nls,
    Kn,
    Dnls,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NhdSystem {
    Nls,
    Kn,
    Cll,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Latex => Format::Latex,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug)]
struct HierarchyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    /// DNLS parameter as a rational, e.g. -1/2.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct QidArgs {
    #[arg(long, value_enum)]
    family: QidFamily,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct NhdArgs {
    #[arg(long, value_enum)]
    system: NhdSystem,
    /// Deepest grade of the NLS deformation (-1 or -2).
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    grades: i32,
    /// Integrate the constraints in potentials `q = u_x`, `r = v_x`.
    #[arg(long)]
    resolve: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntegratorArg {
    Rk4,
    Split,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, value_enum)]
    system: NhdSystem,
    /// Single solitary wave (default).
    #[arg(long, conflicts_with = "collision")]
    soliton: bool,
    /// Two solitary waves colliding head-on.
    #[arg(long)]
    collision: bool,
    /// Exponent offset of the deformed potential `|q|^(4+2ε)`.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long = "N", default_value_t = 512)]
    n: usize,
    #[arg(long = "L", default_value_t = 40.0)]
    length: f64,
    #[arg(long, default_value_t = 20.0)]
    tend: f64,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Store every k-th step.
    #[arg(long, default_value_t = 10)]
    every: usize,
    #[arg(long, value_enum, default_value = "rk4")]
    integrator: IntegratorArg,
    #[arg(long)]
    no_dealias: bool,
    /// CSV output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Binary snapshot of the final state.
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Also run the flatness, random-evaluation and abelianization checks (golden files only otherwise).
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Rewrite golden files from the current output.
    #[arg(long)]
    bless: bool,
    /// Random samples per system.
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

/// Parse `args` (including the program name) and execute, printing to stdout/stderr.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.cmd {
        Cmd::Hierarchy(a) => cmd_hierarchy(a, out),
        Cmd::Qid(a) => cmd_qid(a, out),
        Cmd::Nhd(a) => cmd_nhd(a, out),
        Cmd::Simulate(a) => cmd_simulate(a, out),
        Cmd::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Parse { .. } => 2,
                _ => 1,
            }
        }
    }
}

/// Parse `-1/2`, `3`, `1/4` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Coeff> {
    let bad = || Error::InvalidArgument(format!("`{s}` is not a rational number"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Coeff::frac(n, d))
}

fn emit(r: &Report, f: Format, out: &mut dyn Write) -> Result<i32> {
    out.write_all(r.render(f).as_bytes())?;
    Ok(0)
}

fn cmd_hierarchy(a: HierarchyArgs, out: &mut dyn Write) -> Result<i32> {
    let family = match a.family {
        FamilyArg::Nls => Family::Nls,
        FamilyArg::Dnls => Family::Dnls,
    };
    if a.beta.is_some() && family == Family::Nls {
        return Err(Error::InvalidArgument("--beta applies to the dnls family only".into()));
    }
    let beta = a.beta.as_deref().map(parse_rational).transpose()?;
    emit(&report::hierarchy_report(family, a.n, beta)?, a.format.into(), out)
}

fn cmd_qid(a: QidArgs, out: &mut dyn Write) -> Result<i32> {
    let fam = match a.family {
        QidFamily::Nls => "nls",
        QidFamily::Kn => "kn",
        QidFamily::Dnls => "dnls",
    };
    emit(&report::qid_report(fam, a.order)?, a.format.into(), out)
}

fn nhd_name(s: NhdSystem) -> &'static str {
    match s {
        NhdSystem::Nls => "nls",
        NhdSystem::Kn => "kn",
        NhdSystem::Cll => "cll",
    }
}

fn cmd_nhd(a: NhdArgs, out: &mut dyn Write) -> Result<i32> {
    let res = report::nhd_system(nhd_name(a.system), a.grades)?;
    emit(&report::nhd_report(&res, a.resolve), a.format.into(), out)
}

fn cmd_simulate(a: SimArgs, out: &mut dyn Write) -> Result<i32> {
    let grid = Grid::new(a.n, a.length)?;
    let mut cfg = SimConfig::new(a.dt, a.tend);
    cfg.integrator = match a.integrator {
        IntegratorArg::Rk4 => Integrator::Rk4,
        IntegratorArg::Split => Integrator::SplitStep,
    };
    cfg.dealias = !a.no_dealias;
    cfg.snapshot_every = a.every;
    let (system, init, charges) = match a.system {
        NhdSystem::Nls => {
            let v = numerics::periodic_velocity(&grid, if a.collision { 8 } else { 1 });
            let init = if a.collision {
                numerics::deformed_collision(&grid, 0.5, a.eps, v, grid.length / 4.0)
            } else {
                numerics::deformed_soliton(&grid, 0.5, a.eps, v, 0.0)
            };
            (System::deformed_nls(a.eps), init, nls_charges(a.eps)?)
        }
        other => {
            if a.eps != 0.0 || a.collision {
                return Err(Error::InvalidArgument("--eps and --collision apply to the nls system only".into()));
            }
            let beta = if matches!(other, NhdSystem::Kn) { Coeff::frac(-1, 2) } else { Coeff::frac(-1, 4) };
            let eom = hierarchy::dnls_reduce(&hierarchy::dnls_eom(1)?, beta)?;
            let system = System::from_eom(&eom, &HashMap::new())?;
            let q = grid.x.iter().map(|x| C64::new(0.8 * (-x * x / 4.0).exp(), 0.0)).collect();
            let mass = numerics::compile_density(&Context::qr().parse("q*r")?, &HashMap::new())?;
            let spec = ChargeSpec { j: 1, charge: Box::new(mass), anomaly: Box::new(numerics::Zero) };
            (system, FieldState::focusing(q, 0.0), vec![spec])
        }
    };
    let traj = numerics::evolve(&system, &grid, &init, &cfg)?;
    let series = numerics::measure(&grid, &traj, &charges);
    match &a.out {
        Some(p) => series.write_csv(&mut std::fs::File::create(p)?)?,
        None => series.write_csv(out)?,
    }
    if let Some(p) = &a.snapshot {
        traj.last().write_snapshot(&grid, &mut std::fs::File::create(p)?)?;
    }
    if a.out.is_some() {
        writeln!(out, "system: {}", system.label)?;
        writeln!(out, "snapshots: {}", series.times.len())?;
        for (c, j) in series.labels.iter().enumerate() {
            writeln!(
                out,
                "Q^{j}: start {:.10e} end {:.10e}; max |dQ/dt - Gamma| = {:.3e} (tolerance {:.3e})",
                series.q[c][0],
                series.q[c].last().unwrap(),
                series.max_residual(c),
                numerics::balance_tolerance(a.dt, series.scale(c))
            )?;
        }
    }
    Ok(0)
}

/// `(Q^j, Γ^j)` for `j = 1..=3` of the deformed NLS flow.
pub fn nls_charges(eps: f64) -> Result<Vec<ChargeSpec>> {
    let table = quasi::abelianize(AbelFamily::Nls, 4)?;
    let params: HashMap<String, C64> = [("kappa".to_string(), C64::new(1.0, 0.0))].into();
    (1..=3)
        .map(|j| {
            Ok(ChargeSpec {
                j,
                charge: Box::new(numerics::compile_density(&table.charge(-j), &params)?),
                anomaly: Box::new(AnomalyIntegral {
                    source: AnomalySource::Power(PowerDeformation { eps }),
                    alpha: numerics::compile_density(&table.alphas[j as usize], &params)?,
                }),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// verify

pub fn golden_dir() -> PathBuf {
    std::env::var_os(GOLDEN_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden"))
}

/// Every report covered by golden files, by file stem.
pub fn golden_reports() -> Result<Vec<(String, Report)>> {
    let mut v = Vec::new();
    for n in 1..=3 {
        v.push((format!("hierarchy_nls_{n}"), report::hierarchy_report(Family::Nls, n, None)?));
    }
    v.push(("hierarchy_dnls_1".into(), report::hierarchy_report(Family::Dnls, 1, None)?));
    for (name, b) in [("kn", Coeff::frac(-1, 2)), ("cll", Coeff::frac(-1, 4)), ("gi", Coeff::zero())] {
        v.push((format!("hierarchy_{name}"), report::hierarchy_report(Family::Dnls, 1, Some(b))?));
    }
    v.push(("qid_nls_4".into(), report::qid_report("nls", 4)?));
    v.push(("qid_kn".into(), report::qid_report("kn", 1)?));
    v.push(("qid_dnls_1".into(), report::qid_report("dnls", 1)?));
    v.push(("nhd_nls_1".into(), report::nhd_report(&report::nhd_system("nls", -1)?, false)));
    v.push(("nhd_nls_2".into(), report::nhd_report(&report::nhd_system("nls", -2)?, false)));
    v.push(("nhd_kn".into(), report::nhd_report(&report::nhd_system("kn", 0)?, true)));
    v.push(("nhd_cll".into(), report::nhd_report(&report::nhd_system("cll", 0)?, true)));
    Ok(v)
}

/// Max over grades and components of `|L_t - M_x + [L,M]| / max(|L_t|, |M_x|, |[L,M]|)`,
/// each piece evaluated separately after imposing the EOM.
pub fn random_curvature_residual(l: &LaxMatrix, m: &LaxMatrix, eom: &EomPair, samples: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let rw = eom.rewriter();
    let lt = l.dt().map(|p| rw.apply(p));
    let mx = m.dx().map(|p| rw.apply(p));
    let br = l.commutator(m).map(|p| rw.apply(p));
    let mut polys: Vec<DiffPoly> = Vec::new();
    let mut grades: Vec<i32> = lt.grades().chain(mx.grades()).chain(br.grades()).map(|(g, _)| g).collect();
    grades.sort_unstable();
    grades.dedup();
    for &g in &grades {
        for c in Comp::ALL {
            polys.extend([lt.get(g, c), mx.get(g, c), br.get(g, c)]);
        }
    }
    let refs: Vec<&DiffPoly> = polys.iter().collect();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let s = Sample::random(&refs, &HashMap::new(), rng);
        for chunk in polys.chunks(3) {
            let vals = [chunk[0].eval(&s)?, chunk[1].eval(&s)?, chunk[2].eval(&s)?];
            let scale = vals.iter().map(|z| z.norm()).fold(1e-300, f64::max);
            worst = worst.max((vals[0] - vals[1] + vals[2]).norm() / scale);
        }
    }
    Ok(worst)
}

/// Systems whose flatness is checked, with their Lax pairs and EOMs.
pub fn flat_systems() -> Result<Vec<(String, LaxMatrix, LaxMatrix, EomPair)>> {
    let mut v = Vec::new();
    for n in 1..=6 {
        let t = hierarchy::nls_coeffs(n)?;
        let (l, m) = hierarchy::build_lax(&t);
        v.push((format!("NLS n={n}"), l, m, hierarchy::nls_eom_from(&t)));
    }
    for n in 1..=2 {
        let t = hierarchy::dnls_coeffs(n)?;
        let (l, m) = hierarchy::build_lax(&t);
        v.push((format!("DNLS n={n}"), l, m, hierarchy::dnls_eom_from(&t)));
    }
    Ok(v)
}

struct Checks<'a> {
    out: &'a mut dyn Write,
    failed: usize,
}

impl Checks<'_> {
    fn record(&mut self, name: &str, ok: bool, detail: &str) -> Result<()> {
        if !ok {
            self.failed += 1;
        }
        writeln!(self.out, "[{}] {name}{}{detail}", if ok { "ok" } else { "FAIL" }, if detail.is_empty() { "" } else { ": " })?;
        Ok(())
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    writeln!(out, "laxforge verify, seed {}", a.seed)?;
    let mut ck = Checks { out, failed: 0 };
    let dir = golden_dir();
    if a.bless {
        std::fs::create_dir_all(&dir)?;
    }
    for (stem, rep) in golden_reports()? {
        let text = rep.render(Format::Text);
        let path = dir.join(format!("{stem}.txt"));
        if a.bless {
            std::fs::write(&path, &text)?;
            ck.record(&format!("golden {stem}"), true, "blessed")?;
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(g) if g == text => ck.record(&format!("golden {stem}"), true, "")?,
            Ok(_) => ck.record(&format!("golden {stem}"), false, "output differs from golden file")?,
            Err(_) => ck.record(&format!("golden {stem}"), false, "golden file missing (run with --bless)")?,
        }
    }
    if a.all && !a.bless {
        structural_checks(&mut ck, a.seed, a.samples)?;
    }
    let failed = ck.failed;
    writeln!(out, "{}", if failed == 0 { "all checks passed".to_string() } else { format!("{failed} check(s) failed") })?;
    Ok(if failed == 0 { 0 } else { 1 })
}

/// Flatness, DNLS anomaly vanishing and abelianization checks.
fn structural_checks(ck: &mut Checks<'_>, seed: u64, samples: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, l, m, eom) in flat_systems()? {
        let rw = eom.rewriter();
        let symbolic = curvature(&l, &m).map(|p| rw.apply(p)).is_zero();
        ck.record(&format!("zero curvature {name}"), symbolic, "")?;
        let r = random_curvature_residual(&l, &m, &eom, samples, &mut rng)?;
        ck.record(&format!("random-eval curvature {name}"), r < 1e-10, &format!("max relative residual {r:.1e} over {samples} samples"))?;
    }
    let beta = DiffPoly::param("beta");
    let d = quasi::dnls_qid(1, &beta, &quasi::dnls_hamiltonians(1, &beta)?)?;
    ck.record("DNLS odd sigma3 grades vanish", d.odd_sigma3_vanish, "")?;
    for fam in [AbelFamily::Nls, AbelFamily::Kn] {
        let t = quasi::abelianize(fam, report::TABLE_DEPTH)?;
        let min = t.top() - report::TABLE_DEPTH as i32;
        let in_kernel = t.l_bar.grades().filter(|(g, _)| *g >= min).all(|(_, tr)| tr.f1.is_zero() && tr.f2.is_zero());
        ck.record(&format!("abelianization {fam} lies in the kernel"), in_kernel, "")?;
    }
    Ok(())
}
