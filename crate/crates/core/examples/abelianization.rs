//! Gauge the spatial connection into the abelian direction and read off the
//! charge densities, rendered back in terms of q and r.
use laxforge::quasi::{abelianize, render_qr, AbelFamily};

fn main() -> laxforge::Result<()> {
    for family in [AbelFamily::Nls, AbelFamily::Kn] {
        let table = abelianize(family, 4)?;
        println!("{family}");
        for (j, a) in table.alphas.iter().enumerate() {
            println!("  alpha^-{j} = {}", render_qr(a)?);
        }
        for (g, c) in &table.charges {
            println!("  L^{g} = {}", render_qr(c)?);
        }
    }
    Ok(())
}
