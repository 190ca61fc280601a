//! Deform the NLS Hamiltonian, compute the anomalies X_m and classify them.
use laxforge::hierarchy::nls_coeffs;
use laxforge::quasi::{classify, qid_deform, QidSpec};

fn main() -> laxforge::Result<()> {
    let table = nls_coeffs(4)?;
    for (title, spec) in [("generic couplings", QidSpec::generic(4)?), ("equal couplings", QidSpec::generic(4)?.with_equal_couplings())] {
        println!("{title}");
        let (_, report) = qid_deform(&table, &spec)?;
        for (e, c) in report.entries.iter().zip(classify(&report)) {
            let qi = if c.quasi_integrable() { "quasi-integrable" } else { "anomalous" };
            println!("  X_{} = {}\n    {}, {qi}", e.order, e.density, c.verdict);
        }
    }
    Ok(())
}
