//! Print the first NLS flows and the DNLS reductions (KN, CLL, GI).
use laxforge::hierarchy::{dnls_eom, dnls_reduce, nls_eom};
use laxforge::Coeff;

fn main() -> laxforge::Result<()> {
    for n in 1..=3 {
        println!("{}\n", nls_eom(n)?);
    }
    let dnls = dnls_eom(1)?;
    for (name, beta) in [("KN", Coeff::frac(-1, 2)), ("CLL", Coeff::frac(-1, 4)), ("GI", Coeff::zero())] {
        println!("{name}:\n{}\n", dnls_reduce(&dnls, beta)?);
    }
    Ok(())
}
