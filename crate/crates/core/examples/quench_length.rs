//! The scaled energy response barely depends on where the quench ends.

use xy_qcr::make_grid;
use xy_qcr::qcr::{response_curve, QuantityKind, TimeSearchConfig};

fn main() -> xy_qcr::Result<()> {
    let grid = make_grid(2048)?;
    let cfg = TimeSearchConfig::default();
    let temps = [0.0, 0.05, 0.1];
    for h0 in [0.2, 0.95] {
        for h1 in [0.3, 1.0, 2.0] {
            let c = response_curve(
                QuantityKind::AbsorbedEnergy,
                h0,
                h1,
                0.8,
                &temps,
                &cfg,
                &grid,
            )?;
            let s = &c.samples;
            println!(
                "h0 = {h0:<4} h1 = {h1:<3}  dE_max(0) = {:.4e}  scaled at T = 0.05, 0.1: {:.5} {:.5}",
                s[0].delta_max, s[1].scaled, s[2].scaled
            );
        }
    }
    Ok(())
}
