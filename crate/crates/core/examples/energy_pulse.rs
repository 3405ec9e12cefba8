//! Energy absorbed per site by a rectangular field pulse `h0 -> h1 -> h0` of length tau.

use xy_qcr::{make_grid, PulseAbsorption, Temperature};

fn main() -> xy_qcr::Result<()> {
    let grid = make_grid(2048)?;
    let (h0, h1, gamma) = (0.5, 1.0, 0.8);
    for t in [0.0, 0.05, 0.2] {
        let pulse = PulseAbsorption::new(h0, h1, gamma, Temperature::new(t)?, &grid)?;
        let series = pulse.scan(0.25, 20);
        let (k, best) = series
            .iter()
            .enumerate()
            .fold((0, 0.0), |a, (i, &e)| if e > a.1 { (i, e) } else { a });
        println!(
            "T = {t:<5} max dE = {best:.6e} at tau = {:.2}",
            0.25 * k as f64
        );
    }
    println!(
        "upper bound for any pulse: {:.6}",
        PulseAbsorption::bound(h0, gamma, &grid)
    );
    Ok(())
}
