//! Two-site reduced state after a sudden field quench of a thermal XY chain.
//!
//! ```text
//! cargo run --release --example quench_dynamics
//! ```

use xy_qcr::{make_grid, SuddenQuench, Temperature};

fn main() -> xy_qcr::Result<()> {
    let grid = make_grid(2048)?;
    let quench = SuddenQuench::new(0.5, 1.5, 0.8, Temperature::Finite(0.05), &grid)?;
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "t", "mz", "cxx", "cyy", "czz", "cxy"
    );
    for (k, s) in quench.scan(0.5, 10)?.iter().enumerate() {
        println!(
            "{:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            0.5 * k as f64,
            s.mz,
            s.cxx,
            s.cyy,
            s.czz,
            s.cxy
        );
    }
    Ok(())
}
