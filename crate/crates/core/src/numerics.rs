//! Pseudospectral evolution of NLS-type systems on a periodic grid, and the
//! charge/anomaly balance `dQ^j/dt = Γ^j` measured along trajectories.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::rewrite::EomPair;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Below this modulus `φ_x` is masked to zero.
pub const PHASE_GUARD: f64 = 1e-12;

/// Periodic grid `x_k = -L/2 + k L/N`.
#[derive(Clone)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
    pub x: Vec<f64>,
    pub k: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Grid {{ n: {}, length: {} }}", self.n, self.length)
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Grid> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("grid size {n} must be a power of two >= 64")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("domain length {length} must be positive")));
        }
        let h = length / n as f64;
        let x = (0..n).map(|j| -length / 2.0 + j as f64 * h).collect();
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Grid { n, length, x, k, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn fft(&self, u: &[C64]) -> Vec<C64> {
        let mut v = u.to_vec();
        self.fwd.process(&mut v);
        v
    }

    pub fn ifft(&self, u: &[C64]) -> Vec<C64> {
        let mut v = u.to_vec();
        self.inv.process(&mut v);
        let s = 1.0 / self.n as f64;
        v.iter_mut().for_each(|z| *z *= s);
        v
    }

    /// `(ik)^m` with the Nyquist mode dropped for odd `m`.
    fn symbol(&self, j: usize, m: u32) -> C64 {
        if m % 2 == 1 && j == self.n / 2 {
            return ZERO;
        }
        C64::new(0.0, self.k[j]).powu(m)
    }

    /// Spectral `d^m/dx^m`.
    pub fn deriv(&self, u: &[C64], m: u32) -> Vec<C64> {
        if m == 0 {
            return u.to_vec();
        }
        let mut h = self.fft(u);
        for (j, z) in h.iter_mut().enumerate() {
            *z *= self.symbol(j, m);
        }
        self.ifft(&h)
    }

    /// Rectangle rule, spectrally accurate for periodic data.
    pub fn integrate(&self, u: &[C64]) -> C64 {
        u.iter().sum::<C64>() * self.spacing()
    }

    /// 2/3-rule mask.
    fn dealias_mask(&self) -> Vec<f64> {
        let cut = self.n / 3;
        (0..self.n)
            .map(|j| {
                let m = if j < self.n / 2 { j } else { self.n - j };
                if m <= cut {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub q: Vec<C64>,
    pub r: Vec<C64>,
    pub t: f64,
}

impl FieldState {
    pub fn zeros(grid: &Grid) -> FieldState {
        FieldState { q: vec![ZERO; grid.n], r: vec![ZERO; grid.n], t: 0.0 }
    }

    /// Focusing reduction `r = -q*`.
    pub fn focusing(q: Vec<C64>, t: f64) -> FieldState {
        let r = q.iter().map(|z| -z.conj()).collect();
        FieldState { q, r, t }
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.r).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn sum(&self, o: &FieldState) -> FieldState {
        FieldState {
            q: self.q.iter().zip(&o.q).map(|(a, b)| a + b).collect(),
            r: self.r.iter().zip(&o.r).map(|(a, b)| a + b).collect(),
            t: self.t,
        }
    }

    /// `max |q - q'| / max |q'|`.
    pub fn relative_error(&self, exact: &FieldState) -> f64 {
        let num = self.q.iter().zip(&exact.q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let den = exact.q.iter().map(|z| z.norm()).fold(0.0, f64::max);
        num / den.max(f64::MIN_POSITIVE)
    }

    /// Header `N: u64, L: f64, t: f64` then `q` and `r` as interleaved `re, im` f64, little-endian.
    pub fn write_snapshot(&self, grid: &Grid, w: &mut (impl Write + ?Sized)) -> Result<()> {
        w.write_all(&(grid.n as u64).to_le_bytes())?;
        w.write_all(&grid.length.to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        for z in self.q.iter().chain(&self.r) {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_snapshot(bytes: &[u8]) -> Result<(usize, f64, FieldState)> {
        let bad = || Error::InvalidArgument("truncated snapshot".into());
        let f = |i: usize| -> Result<f64> { Ok(f64::from_le_bytes(bytes.get(i..i + 8).ok_or_else(bad)?.try_into().unwrap())) };
        let n = u64::from_le_bytes(bytes.get(0..8).ok_or_else(bad)?.try_into().unwrap()) as usize;
        let (length, t) = (f(8)?, f(16)?);
        let mut vals = Vec::with_capacity(2 * n);
        for j in 0..2 * n {
            vals.push(C64::new(f(24 + 16 * j)?, f(32 + 16 * j)?));
        }
        let r = vals.split_off(n);
        Ok((n, length, FieldState { q: vals, r, t }))
    }
}

/// Focusing NLS bright soliton `η sech(η(x - x0 - vt)) exp(i(vx + (η² - v²)t/2))`
/// for `q_t = (i/2) q_xx + i|q|²q`.
pub fn nls_soliton(grid: &Grid, eta: f64, v: f64, x0: f64, t: f64) -> FieldState {
    let q = grid
        .x
        .iter()
        .map(|&x| {
            let s = (x - x0 - v * t + grid.length / 2.0).rem_euclid(grid.length) - grid.length / 2.0;
            let amp = eta / (eta * s).cosh();
            C64::from_polar(amp, v * x + (eta * eta - v * v) * t / 2.0)
        })
        .collect();
    FieldState::focusing(q, t)
}

/// Solitary wave of `q_t = (i/2) q_xx + i|q|^(2+2ε) q`, boosted to speed `v`:
/// `u(x) = (c sech²(k x))^(1/(p-1))` with `p = 3 + 2ε`, `c = (p+1)ω/2`, `k = (p-1)sqrt(2ω)/2`.
/// At `ε = 0` this is the NLS soliton with `η = sqrt(2ω)`.
pub fn deformed_soliton(grid: &Grid, omega: f64, eps: f64, v: f64, x0: f64) -> FieldState {
    let p = 3.0 + 2.0 * eps;
    let c = (p + 1.0) * omega / 2.0;
    let k = (p - 1.0) * (2.0 * omega).sqrt() / 2.0;
    let q = grid
        .x
        .iter()
        .map(|&x| {
            let s = (x - x0 + grid.length / 2.0).rem_euclid(grid.length) - grid.length / 2.0;
            let sech2 = 1.0 / (k * s).cosh().powi(2);
            C64::from_polar((c * sech2).powf(1.0 / (p - 1.0)), v * x)
        })
        .collect();
    FieldState::focusing(q, 0.0)
}

/// Two deformed solitary waves at `±x0` moving towards each other with speed `v`, even in `x`.
pub fn deformed_collision(grid: &Grid, omega: f64, eps: f64, v: f64, x0: f64) -> FieldState {
    let a = deformed_soliton(grid, omega, eps, -v, x0);
    let b = deformed_soliton(grid, omega, eps, v, -x0);
    FieldState::focusing(a.sum(&b).q, 0.0)
}

/// Two counter-propagating solitons at `±x0` with speeds `∓v`, even in `x`.
pub fn nls_two_soliton(grid: &Grid, eta: f64, v: f64, x0: f64) -> FieldState {
    let a = nls_soliton(grid, eta, -v, x0, 0.0);
    let b = nls_soliton(grid, eta, v, -x0, 0.0);
    FieldState::focusing(a.sum(&b).q, 0.0)
}

/// Smallest velocity `2πm/L` (`m >= 1`) keeping the soliton phase periodic.
pub fn periodic_velocity(grid: &Grid, m: i32) -> f64 {
    2.0 * PI * m as f64 / grid.length
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Source {
    Q,
    R,
    /// `φ_x` from `exp(iφ) = -(κ/2) r/q`.
    PhiX,
    /// `sqrt(2qr/κ)`.
    BigR,
    /// `sqrt(qr)`.
    SqrtQr,
}

/// A differential polynomial evaluated pointwise on a grid.
#[derive(Clone, Debug)]
pub struct CompiledDensity {
    pub source: DiffPoly,
    terms: Vec<(C64, Vec<((Source, u32), u32)>)>,
    kappa: f64,
}

/// Compile a density in `q`, `r` (and optionally `φ`, `R`, `sqrt(qr)`) with numeric parameters.
///
/// `φ` and `R` are read through the dictionary of the faithful realization
/// `b = σ3/2`, `F1 = (κσ+/2 - σ-)/2`, `F2 = (κσ+/2 + σ-)/2` of the loop brackets:
/// the rotated connection `-ib^1 + (i/2)φ_x b^0 + 2iR F1^0` is then the NLS connection
/// in `μ = λ/2` with `κR² = 2qr` and `exp(iφ) = -(κ/2) r/q`. Under this reading the
/// abelianized densities balance exactly against the anomaly `2X`, `X` the `σ3` part of the curvature.
pub fn compile_density(p: &DiffPoly, params: &HashMap<String, C64>) -> Result<CompiledDensity> {
    if p.has_t_jets() {
        return Err(Error::UnsupportedDensity(format!("{p} has time derivatives")));
    }
    let kappa = params.get("kappa").map(|z| z.re).unwrap_or(1.0);
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let mut coeff = c.to_complex();
        for (name, e) in m.params() {
            let v = *params.get(&**name).ok_or_else(|| Error::MissingAssignment(name.to_string()))?;
            coeff *= if e % 2 == 0 { v.powi(e / 2) } else { v.sqrt().powi(*e) };
        }
        let mut factors = Vec::new();
        for (v, e) in m.jets() {
            let slot = match &*v.field.name {
                "q" => (Source::Q, v.dx),
                "r" => (Source::R, v.dx),
                "phi" if v.dx >= 1 => (Source::PhiX, v.dx - 1),
                "R" => (Source::BigR, v.dx),
                "sqrt(qr)" => (Source::SqrtQr, v.dx),
                other => return Err(Error::UnsupportedDensity(format!("field `{other}` cannot be evaluated on the grid"))),
            };
            factors.push((slot, *e));
        }
        terms.push((coeff, factors));
    }
    Ok(CompiledDensity { source: p.clone(), terms, kappa })
}

/// Jets `S, S_x, .., S^(k)` of `S = sqrt(P)` from `2 S S^(k) = P^(k) - sum C(k,i) S^(i) S^(k-i)`.
/// Pointwise, so zeros of `P` do not pollute the spectrum; masked where `|S|` is tiny.
fn sqrt_jets(grid: &Grid, p: &[C64], k: u32) -> Vec<Vec<C64>> {
    let pj: Vec<Vec<C64>> = (0..=k).map(|m| grid.deriv(p, m)).collect();
    let mut s = vec![continuous_sqrt(p)];
    for m in 1..=k as usize {
        let col = (0..grid.n)
            .map(|j| {
                let s0 = s[0][j];
                if s0.norm() < PHASE_GUARD {
                    return ZERO;
                }
                let mut acc = pj[m][j];
                let mut binom = 1.0;
                for i in 1..m {
                    binom = binom * (m - i + 1) as f64 / i as f64;
                    acc -= s[i][j] * s[m - i][j] * binom;
                }
                acc / (2.0 * s0)
            })
            .collect();
        s.push(col);
    }
    s
}

/// Square root continued along the grid so the branch does not flip.
fn continuous_sqrt(u: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(u.len());
    for z in u {
        let s = z.sqrt();
        let s = match out.last() {
            Some(prev) if (s - prev).norm() > (s + prev).norm() => -s,
            _ => s,
        };
        out.push(s);
    }
    out
}

fn phase_derivative(grid: &Grid, q: &[C64], r: &[C64]) -> Vec<C64> {
    let qx = grid.deriv(q, 1);
    let rx = grid.deriv(r, 1);
    let i = C64::new(0.0, 1.0);
    (0..grid.n)
        .map(|j| {
            if q[j].norm() < PHASE_GUARD || r[j].norm() < PHASE_GUARD {
                ZERO
            } else {
                (rx[j] / r[j] - qx[j] / q[j]) / i
            }
        })
        .collect()
}

impl CompiledDensity {
    pub fn eval(&self, grid: &Grid, q: &[C64], r: &[C64]) -> Vec<C64> {
        let mut cache: HashMap<(Source, u32), Vec<C64>> = HashMap::new();
        for (_, factors) in &self.terms {
            for (slot, _) in factors {
                if cache.contains_key(slot) {
                    continue;
                }
                match slot.0 {
                    Source::Q => drop(cache.insert(*slot, grid.deriv(q, slot.1))),
                    Source::R => drop(cache.insert(*slot, grid.deriv(r, slot.1))),
                    Source::PhiX => drop(cache.insert(*slot, grid.deriv(&phase_derivative(grid, q, r), slot.1))),
                    Source::BigR | Source::SqrtQr => {
                        let scale = if slot.0 == Source::BigR { 2.0 / self.kappa } else { 1.0 };
                        let p: Vec<C64> = q.iter().zip(r).map(|(a, b)| a * b * scale).collect();
                        for (m, col) in sqrt_jets(grid, &p, slot.1).into_iter().enumerate() {
                            cache.insert((slot.0, m as u32), col);
                        }
                    }
                }
            }
        }
        let mut out = vec![ZERO; grid.n];
        for (c, factors) in &self.terms {
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = *c;
                for (slot, e) in factors {
                    v *= cache[slot][j].powu(*e);
                }
                *o += v;
            }
        }
        out
    }

    pub fn integral(&self, grid: &Grid, s: &FieldState) -> C64 {
        grid.integrate(&self.eval(grid, &s.q, &s.r))
    }
}

/// The non-stiff part of a right-hand side, evaluated in physical space.
pub trait Nonlinearity: Send + Sync {
    fn eval(&self, grid: &Grid, q: &[C64], r: &[C64]) -> (Vec<C64>, Vec<C64>);
}

struct PolyNonlinearity {
    q: CompiledDensity,
    r: CompiledDensity,
}

impl Nonlinearity for PolyNonlinearity {
    fn eval(&self, grid: &Grid, q: &[C64], r: &[C64]) -> (Vec<C64>, Vec<C64>) {
        (self.q.eval(grid, q, r), self.r.eval(grid, q, r))
    }
}

/// Focusing-type QI deformation `A = -(i/2) qr |qr|^ε`,
/// `q_t = (i/2) q_xx + 2qA`, `r_t = -(i/2) r_xx - 2rA`.
pub struct PowerDeformation {
    pub eps: f64,
}

impl PowerDeformation {
    pub fn potential(&self, q: &[C64], r: &[C64]) -> Vec<C64> {
        let h = C64::new(0.0, -0.5);
        q.iter()
            .zip(r)
            .map(|(a, b)| {
                let qr = a * b;
                h * qr * qr.norm().powf(self.eps)
            })
            .collect()
    }

    /// `X = -(A + (i/2) qr)_x`, the `σ3` part of the curvature.
    ///
    /// In the loop basis (`b^0 = σ3/2`) the anomaly is `2X`.
    pub fn anomaly(&self, grid: &Grid, q: &[C64], r: &[C64]) -> Vec<C64> {
        let a = self.potential(q, r);
        let h = C64::new(0.0, 0.5);
        let s: Vec<C64> = a.iter().zip(q.iter().zip(r)).map(|(a, (x, y))| a + h * x * y).collect();
        grid.deriv(&s, 1).into_iter().map(|z| -z).collect()
    }
}

impl Nonlinearity for PowerDeformation {
    fn eval(&self, _grid: &Grid, q: &[C64], r: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let a = self.potential(q, r);
        let nq = q.iter().zip(&a).map(|(x, a)| 2.0 * x * a).collect();
        let nr = r.iter().zip(&a).map(|(x, a)| -2.0 * x * a).collect();
        (nq, nr)
    }
}

/// `q_t = L_q(∂) q + N_q`, `r_t = L_r(∂) r + N_r` with constant-coefficient `L`.
pub struct System {
    pub label: String,
    /// `(order, coefficient)` pairs of the linear part.
    pub lin_q: Vec<(u32, C64)>,
    pub lin_r: Vec<(u32, C64)>,
    pub nonlinear: Box<dyn Nonlinearity>,
}

impl System {
    /// Split an EOM pair into its linear self-coupling and the remainder.
    pub fn from_eom(eom: &EomPair, params: &HashMap<String, C64>) -> Result<System> {
        let split = |rhs: &DiffPoly, field: &str| -> Result<(Vec<(u32, C64)>, CompiledDensity)> {
            let mut lin = Vec::new();
            let mut rest = DiffPoly::zero();
            for (m, c) in rhs.terms() {
                match m.jets() {
                    [(v, 1)] if &*v.field.name == field && v.dt == 0 => {
                        let coeff = compile_density(&DiffPoly::term(c.clone(), m.param_part()), params)?;
                        lin.push((v.dx, coeff.terms[0].0));
                    }
                    _ => rest.add_term(m.clone(), c),
                }
            }
            Ok((lin, compile_density(&rest, params)?))
        };
        let (lin_q, nq) = split(&eom.q_t, &eom.q.name)?;
        let (lin_r, nr) = split(&eom.r_t, &eom.r.name)?;
        Ok(System { label: eom.label.clone(), lin_q, lin_r, nonlinear: Box::new(PolyNonlinearity { q: nq, r: nr }) })
    }

    /// Focusing NLS with the power-law deformation; `eps = 0` is the integrable case.
    pub fn deformed_nls(eps: f64) -> System {
        System {
            label: format!("deformed NLS eps={eps}"),
            lin_q: vec![(2, C64::new(0.0, 0.5))],
            lin_r: vec![(2, C64::new(0.0, -0.5))],
            nonlinear: Box::new(PowerDeformation { eps }),
        }
    }

    fn symbols(&self, grid: &Grid) -> (Vec<C64>, Vec<C64>) {
        let sym = |lin: &[(u32, C64)]| (0..grid.n).map(|j| lin.iter().map(|(m, c)| c * grid.symbol(j, *m)).sum()).collect();
        (sym(&self.lin_q), sym(&self.lin_r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    /// Integrating-factor (Lawson) RK4: fourth order, linear part exact.
    Rk4,
    /// Strang splitting with an RK4 nonlinear substep: second order.
    SplitStep,
}

/// The linear part is integrated exactly, so no dispersive CFL bound applies to
/// either integrator; accuracy is controlled by `dt` against the nonlinear time scale.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub dealias: bool,
    /// Store every `snapshot_every`-th step.
    pub snapshot_every: usize,
}

impl SimConfig {
    pub fn new(dt: f64, t_end: f64) -> SimConfig {
        SimConfig { dt, t_end, integrator: Integrator::Rk4, dealias: true, snapshot_every: 1 }
    }

    /// `dt / dx²`, reported for reference only.
    pub fn cfl_number(&self, grid: &Grid) -> f64 {
        self.dt / grid.spacing().powi(2)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<FieldState>,
}

impl Trajectory {
    pub fn last(&self) -> &FieldState {
        self.states.last().expect("trajectory has the initial state")
    }
}

struct Stepper<'a> {
    grid: &'a Grid,
    sys: &'a System,
    lq: Vec<C64>,
    lr: Vec<C64>,
    mask: Option<Vec<f64>>,
}

type Spec = (Vec<C64>, Vec<C64>);

impl Stepper<'_> {
    fn n_hat(&self, u: &Spec) -> Spec {
        let q = self.grid.ifft(&u.0);
        let r = self.grid.ifft(&u.1);
        let (nq, nr) = self.sys.nonlinear.eval(self.grid, &q, &r);
        let (mut a, mut b) = (self.grid.fft(&nq), self.grid.fft(&nr));
        if let Some(m) = &self.mask {
            for j in 0..self.grid.n {
                a[j] *= m[j];
                b[j] *= m[j];
            }
        }
        (a, b)
    }

    fn expo(&self, u: &Spec, h: f64) -> Spec {
        let e = |v: &[C64], l: &[C64]| v.iter().zip(l).map(|(z, s)| z * (s * h).exp()).collect();
        (e(&u.0, &self.lq), e(&u.1, &self.lr))
    }

    fn axpy(u: &Spec, h: f64, k: &Spec) -> Spec {
        let f = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x + y * h).collect();
        (f(&u.0, &k.0), f(&u.1, &k.1))
    }

    fn lawson(&self, u: &Spec, h: f64) -> Spec {
        let k1 = self.n_hat(u);
        let k2 = self.n_hat(&self.expo(&Self::axpy(u, h / 2.0, &k1), h / 2.0));
        let eu_half = self.expo(u, h / 2.0);
        let k3 = self.n_hat(&Self::axpy(&eu_half, h / 2.0, &k2));
        let k4 = self.n_hat(&Self::axpy(&self.expo(u, h), h, &self.expo(&k3, h / 2.0)));
        let mid = Self::axpy(&k2, 1.0, &k3);
        let mut out = self.expo(u, h);
        out = Self::axpy(&out, h / 6.0, &self.expo(&k1, h));
        out = Self::axpy(&out, h / 3.0, &self.expo(&mid, h / 2.0));
        Self::axpy(&out, h / 6.0, &k4)
    }

    fn rk4_nonlinear(&self, u: &Spec, h: f64) -> Spec {
        let k1 = self.n_hat(u);
        let k2 = self.n_hat(&Self::axpy(u, h / 2.0, &k1));
        let k3 = self.n_hat(&Self::axpy(u, h / 2.0, &k2));
        let k4 = self.n_hat(&Self::axpy(u, h, &k3));
        let mut out = Self::axpy(u, h / 6.0, &k1);
        out = Self::axpy(&out, h / 3.0, &k2);
        out = Self::axpy(&out, h / 3.0, &k3);
        Self::axpy(&out, h / 6.0, &k4)
    }

    fn step(&self, u: &Spec, h: f64, integrator: Integrator) -> Spec {
        match integrator {
            Integrator::Rk4 => self.lawson(u, h),
            Integrator::SplitStep => self.expo(&self.rk4_nonlinear(&self.expo(u, h / 2.0), h), h / 2.0),
        }
    }
}

/// Evolve from `init` to `cfg.t_end`; the final time is always stored.
pub fn evolve(sys: &System, grid: &Grid, init: &FieldState, cfg: &SimConfig) -> Result<Trajectory> {
    if !(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) || cfg.snapshot_every == 0 {
        return Err(Error::InvalidArgument(format!("bad time stepping: dt={}, t_end={}", cfg.dt, cfg.t_end)));
    }
    if init.q.len() != grid.n || init.r.len() != grid.n {
        return Err(Error::InvalidArgument("initial state does not match the grid".into()));
    }
    let (lq, lr) = sys.symbols(grid);
    let stepper = Stepper { grid, sys, lq, lr, mask: cfg.dealias.then(|| grid.dealias_mask()) };
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let mut u = (grid.fft(&init.q), grid.fft(&init.r));
    let mut states = vec![init.clone()];
    let mut last_good = init.t;
    for s in 1..=steps {
        u = stepper.step(&u, cfg.dt, cfg.integrator);
        let t = init.t + s as f64 * cfg.dt;
        if !u.0.iter().chain(&u.1).all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::BlowUp { t: last_good });
        }
        last_good = t;
        if s % cfg.snapshot_every == 0 || s == steps {
            states.push(FieldState { q: grid.ifft(&u.0), r: grid.ifft(&u.1), t });
        }
    }
    Ok(Trajectory { states })
}

/// Something integrated over the grid at each snapshot.
pub trait Observable {
    fn integral(&self, grid: &Grid, s: &FieldState) -> C64;
}

impl Observable for CompiledDensity {
    fn integral(&self, grid: &Grid, s: &FieldState) -> C64 {
        CompiledDensity::integral(self, grid, s)
    }
}

/// Where the anomaly `X` (the `σ3` part of the deformed curvature) comes from.
pub enum AnomalySource {
    Power(PowerDeformation),
    /// A closed-form `X` in `q`, `r`.
    Density(CompiledDensity),
}

/// `Γ = ∫ 2X α`; the factor 2 converts `σ3` to `b^0`.
pub struct AnomalyIntegral {
    pub source: AnomalySource,
    pub alpha: CompiledDensity,
}

impl Observable for AnomalyIntegral {
    fn integral(&self, grid: &Grid, s: &FieldState) -> C64 {
        let x = match &self.source {
            AnomalySource::Power(d) => d.anomaly(grid, &s.q, &s.r),
            AnomalySource::Density(d) => d.eval(grid, &s.q, &s.r),
        };
        let a = self.alpha.eval(grid, &s.q, &s.r);
        grid.integrate(&x.iter().zip(&a).map(|(x, a)| 2.0 * x * a).collect::<Vec<_>>())
    }
}

/// Identically zero, for the anomaly of an integrable flow.
pub struct Zero;

impl Observable for Zero {
    fn integral(&self, _: &Grid, _: &FieldState) -> C64 {
        ZERO
    }
}

/// One `(Q^j, Γ^j)` pair to track.
pub struct ChargeSpec {
    pub j: i32,
    pub charge: Box<dyn Observable>,
    pub anomaly: Box<dyn Observable>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChargeSeries {
    pub times: Vec<f64>,
    pub labels: Vec<i32>,
    /// `q[c][k]`: charge `c` at snapshot `k`.
    pub q: Vec<Vec<C64>>,
    pub gamma: Vec<Vec<C64>>,
    /// `|dQ/dt - Γ|` from 5-point centered differences (`NaN` within 2 of the ends).
    pub residual: Vec<Vec<f64>>,
}

impl ChargeSeries {
    pub fn max_residual(&self, c: usize) -> f64 {
        self.residual[c].iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max)
    }

    /// `max_t |Q(t)|`, the scale for relative tolerances.
    pub fn scale(&self, c: usize) -> f64 {
        self.q[c].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_t |Q(t) - Q(0)| / |Q(0)|`.
    pub fn relative_drift(&self, c: usize) -> f64 {
        let q0 = self.q[c][0];
        self.q[c].iter().map(|z| (z - q0).norm()).fold(0.0, f64::max) / q0.norm().max(f64::MIN_POSITIVE)
    }

    pub fn write_csv(&self, w: &mut (impl Write + ?Sized)) -> Result<()> {
        write!(w, "t")?;
        for j in &self.labels {
            write!(w, ",re_Q{j},im_Q{j},re_Gamma{j},im_Gamma{j},residual{j}")?;
        }
        writeln!(w)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{t:.6}")?;
            for c in 0..self.labels.len() {
                let (q, g) = (self.q[c][k], self.gamma[c][k]);
                write!(w, ",{:.12e},{:.12e},{:.12e},{:.12e},{:.6e}", q.re, q.im, g.re, g.im, self.residual[c][k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Balance tolerance `max(1e-6, 50 dt⁴) · scale`.
pub fn balance_tolerance(dt: f64, scale: f64) -> f64 {
    1e-6_f64.max(50.0 * dt.powi(4)) * scale
}

/// `Q^j(t)`, `Γ^j(t)` and the balance residual on a uniformly spaced trajectory.
pub fn measure(grid: &Grid, traj: &Trajectory, charges: &[ChargeSpec]) -> ChargeSeries {
    let times: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    let mut out = ChargeSeries {
        times: times.clone(),
        labels: charges.iter().map(|c| c.j).collect(),
        q: Vec::new(),
        gamma: Vec::new(),
        residual: Vec::new(),
    };
    for c in charges {
        let q: Vec<C64> = traj.states.iter().map(|s| c.charge.integral(grid, s)).collect();
        let g: Vec<C64> = traj.states.iter().map(|s| c.anomaly.integral(grid, s)).collect();
        let n = q.len();
        let mut res = vec![f64::NAN; n];
        if n >= 5 {
            let h = times[1] - times[0];
            for k in 2..n - 2 {
                let d = (q[k - 2] - q[k - 1] * 8.0 + q[k + 1] * 8.0 - q[k + 2]) / (12.0 * h);
                res[k] = (d - g[k]).norm();
            }
        }
        out.q.push(q);
        out.gamma.push(g);
        out.residual.push(res);
    }
    out
}
