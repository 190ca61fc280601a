//! Check dQ/dt = Gamma along a moving deformed solitary wave and write the
//! charge series as CSV.
use laxforge::cli::nls_charges;
use laxforge::numerics::{balance_tolerance, deformed_soliton, evolve, measure, periodic_velocity, Grid, SimConfig, System};

fn main() -> laxforge::Result<()> {
    let eps = 0.06;
    let g = Grid::new(512, 40.0)?;
    let dt = 0.01;
    let mut cfg = SimConfig::new(dt, 5.0);
    cfg.snapshot_every = 1;
    let init = deformed_soliton(&g, 0.5, eps, periodic_velocity(&g, 1), 0.0);
    let tr = evolve(&System::deformed_nls(eps), &g, &init, &cfg)?;
    let charges: Vec<_> = nls_charges(eps)?.into_iter().filter(|c| c.j <= 2).collect();
    let s = measure(&g, &tr, &charges);
    for c in 0..s.labels.len() {
        println!("Q^{}: max |dQ/dt - Gamma| = {:.3e} (tolerance {:.3e})", s.labels[c], s.max_residual(c), balance_tolerance(dt, s.scale(c)));
    }
    let path = std::env::temp_dir().join("laxforge_balance.csv");
    s.write_csv(&mut std::fs::File::create(&path)?)?;
    println!("series written to {}", path.display());
    Ok(())
}
