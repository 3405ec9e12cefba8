//! Boundary temperature of the quantum critical region around h = 1 and the
//! slope of the cone `T* ~ C |h0 - 1|`.
//!
//! Pass `multicritical` as the first argument to scan along gamma = |1 - |h0||.

use xy_qcr::make_grid;
use xy_qcr::qcr::{map_qcr, DetectionConfig, GammaMode, QuantityKind, TimeSearchConfig};

fn main() -> xy_qcr::Result<()> {
    let multicritical = std::env::args().nth(1).as_deref() == Some("multicritical");
    let (mode, t_hi) = if multicritical {
        (GammaMode::Multicritical, 0.01)
    } else {
        (GammaMode::Fixed(0.8), 0.1)
    };
    let grid = make_grid(2048)?;
    let det = DetectionConfig {
        t_hi,
        ..Default::default()
    };
    let h0s: Vec<f64> = (0..=10).map(|i| 0.75 + 0.05 * i as f64).collect();
    let map = map_qcr(
        QuantityKind::AbsorbedEnergy,
        &h0s,
        mode,
        1.0,
        &det,
        &TimeSearchConfig::default(),
        &grid,
    )?;
    for p in &map.points {
        let t = p.t_star.map_or("-".to_string(), |t| format!("{t:.5}"));
        println!(
            "h0 = {:.2}  gamma = {:.2}  T* = {t:>8}  {}",
            p.h0,
            p.gamma,
            p.flag.as_str()
        );
    }
    if let Some(fit) = map.slope_fit {
        println!(
            "T* = {:.4} |h0 - 1| + {:.4}, R^2 = {:.4}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(())
}
