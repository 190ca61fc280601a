//! Evolve an NLS soliton around the periodic box once and compare with the
//! exact solution.
use laxforge::numerics::{evolve, nls_soliton, periodic_velocity, Grid, SimConfig, System};

fn main() -> laxforge::Result<()> {
    let g = Grid::new(512, 40.0)?;
    let v = periodic_velocity(&g, 1);
    let init = nls_soliton(&g, 1.0, v, 0.0, 0.0);
    let mut cfg = SimConfig::new(0.01, g.length / v);
    cfg.snapshot_every = usize::MAX;
    let tr = evolve(&System::deformed_nls(0.0), &g, &init, &cfg)?;
    let t = tr.last().t;
    println!("v = {v:.6}, t = {t:.4}");
    println!("relative error vs exact: {:.3e}", tr.last().relative_error(&nls_soliton(&g, 1.0, v, 0.0, t)));
    Ok(())
}
