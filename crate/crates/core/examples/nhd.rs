//! Non-holonomic deformation of NLS: constraints, their reduction and the
//! closed higher-order equation left after eliminating the deformers.
use laxforge::nhd::{eliminate_deformers, nls_nhd, reduce_constraints};

fn main() -> laxforge::Result<()> {
    for depth in 1..=2 {
        let res = nls_nhd(2, depth)?;
        println!("{} (depth {depth})\n{}", res.label, res.deformed_eom);
        for c in &res.constraints {
            println!("  grade {} {:?}: {} = 0", c.grade, c.comp, c.relation);
        }
        for (g, rel) in reduce_constraints(&res)? {
            println!("  reduced at grade {g}: {rel} = 0");
        }
        let e = eliminate_deformers(&res)?;
        println!("  closed equation of order {}: {} = 0\n", e.order, e.equation);
    }
    Ok(())
}
