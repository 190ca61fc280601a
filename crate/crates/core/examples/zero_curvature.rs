//! Build the Lax pair for each NLS flow and check that the curvature vanishes
//! once the equations of motion are imposed.
use laxforge::hierarchy::{build_lax, nls_coeffs, nls_eom_from};
use laxforge::loopalg::curvature;

fn main() -> laxforge::Result<()> {
    for n in 1..=5 {
        let t = nls_coeffs(n)?;
        let (l, m) = build_lax(&t);
        let rw = nls_eom_from(&t).rewriter();
        let f = curvature(&l, &m).map(|p| rw.apply(p));
        println!("n = {n}: flat = {}", f.is_zero());
    }
    Ok(())
}
