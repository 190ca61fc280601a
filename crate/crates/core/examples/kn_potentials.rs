//! Deformed Kaup-Newell system written in potentials q = u_x, r = v_x.
use laxforge::nhd::{kn_nhd, kn_resolve};

fn main() -> laxforge::Result<()> {
    let res = kn_nhd()?;
    println!("vanishing deformers: {:?}", res.vanishing);
    let p = kn_resolve(&res)?;
    for (name, value) in &p.resolved {
        println!("{name} = {value}");
    }
    println!("{} = 0\n{} = 0", p.u_eq, p.v_eq);
    Ok(())
}
