//! How thermal fluctuations wash out the maximal response of each quantity.

use xy_qcr::make_grid;
use xy_qcr::qcr::{response_curve, QuantityKind, TimeSearchConfig};

fn main() -> xy_qcr::Result<()> {
    let grid = make_grid(2048)?;
    let cfg = TimeSearchConfig::default();
    let temps = [0.0, 0.025, 0.05, 0.075, 0.1];
    for q in QuantityKind::ALL {
        println!("{q}");
        for h0 in [0.2, 0.5, 0.8, 0.95] {
            let curve = response_curve(q, h0, 1.0, 0.8, &temps, &cfg, &grid)?;
            let scaled: Vec<String> = curve
                .samples
                .iter()
                .map(|s| format!("{:.4}", s.scaled))
                .collect();
            println!("  h0 = {h0:<4} scaled: {}", scaled.join("  "));
        }
    }
    Ok(())
}
