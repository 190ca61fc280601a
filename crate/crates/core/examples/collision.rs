//! Head-on collision of two solitary waves of the deformed NLS. The charges
//! change during the collision and return to their initial values afterwards.
use laxforge::cli::nls_charges;
use laxforge::numerics::{deformed_collision, evolve, measure, periodic_velocity, Grid, SimConfig, System};

fn main() -> laxforge::Result<()> {
    let eps = 0.06;
    let g = Grid::new(512, 40.0)?;
    let v = periodic_velocity(&g, 8);
    let x0 = g.length / 4.0;
    let dt = 0.01;
    let mut cfg = SimConfig::new(dt, (2.0 * x0 / v / dt).round() * dt);
    cfg.snapshot_every = 10;
    let tr = evolve(&System::deformed_nls(eps), &g, &deformed_collision(&g, 0.5, eps, v, x0), &cfg)?;
    let s = measure(&g, &tr, &nls_charges(eps)?);
    for c in 0..s.labels.len() {
        let (q0, q1) = (s.q[c][0], *s.q[c].last().unwrap());
        let excursion = s.q[c].iter().map(|z| (z - q0).norm()).fold(0.0, f64::max);
        println!("Q^{}: start {q0:.6}, end {q1:.6}, largest excursion {excursion:.3e}", s.labels[c]);
    }
    Ok(())
}
