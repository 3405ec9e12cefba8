//! Negativity, logarithmic negativity and mutual information of nearest neighbours,
//! each computed in closed form and checked against a dense 4x4 evaluation.

use xy_qcr::observables::{mutual_information_closed_form, negativity_numeric};
use xy_qcr::{
    assemble_rho, log_negativity, make_grid, mutual_information, negativity, SuddenQuench,
    Temperature,
};

fn main() -> xy_qcr::Result<()> {
    let grid = make_grid(1024)?;
    for (h0, h1) in [(0.2, 1.0), (0.9, 1.1), (1.5, 0.5)] {
        let s = SuddenQuench::new(h0, h1, 0.6, Temperature::Finite(0.02), &grid)?.state_at(3.0)?;
        let rho = assemble_rho(&s)?;
        println!("quench {h0} -> {h1}, t = 3");
        println!(
            "  trace {:.15}, min eigenvalue {:.3e}",
            rho.trace(),
            rho.min_eigenvalue()
        );
        println!(
            "  N = {:.10} (dense {:.10})",
            negativity(&s),
            negativity_numeric(&s)
        );
        println!("  L = {:.10}", log_negativity(&s));
        println!(
            "  I = {:.10} (closed form {:.10})",
            mutual_information(&s)?,
            mutual_information_closed_form(&s)?
        );
    }
    Ok(())
}
