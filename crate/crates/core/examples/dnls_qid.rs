//! Quasi-integrable deformation of the DNLS flow with a free parameter beta:
//! odd-grade sigma3 parts of the curvature vanish for any deformation.
use laxforge::quasi::{dnls_hamiltonians, dnls_qid};
use laxforge::{Context, DiffPoly};

fn main() -> laxforge::Result<()> {
    let beta = DiffPoly::param("beta");
    let h = dnls_hamiltonians(1, &beta)?;
    let insertion = Context::qr().parse("q^3*r^3")?;
    let deformed = vec![&h[0] + &insertion];
    let d = dnls_qid(1, &beta, &deformed)?;
    println!("{}", d.eom);
    println!("odd-grade sigma3 curvature vanishes: {}", d.odd_sigma3_vanish);
    Ok(())
}
