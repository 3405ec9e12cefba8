//! Compares the free-fermion solution with exact diagonalisation of a 12-site ring.

use xy_qcr::ed::DenseSpinSystem;
use xy_qcr::{
    energy_absorbed, two_site_state, ModelParams, MomentumGrid, QuenchProtocol, Temperature,
};

fn main() -> xy_qcr::Result<()> {
    let (n, gamma, h0, h1) = (12, 0.8, 0.2, 1.0);
    let before = DenseSpinSystem::build(n, ModelParams::unit(gamma, h0)?)?;
    let after = DenseSpinSystem::build(n, ModelParams::unit(gamma, h1)?)?;
    // Antiperiodic momenta reproduce the even-parity sector of the ring exactly.
    let grid = MomentumGrid::antiperiodic(n)?;
    println!("hermiticity residual {:.1e}", before.hermiticity_residual());
    for t in [0.5, 1.0, 2.0] {
        let ed = before.evolve_observables(&after, Temperature::Zero, t)?;
        let ff = two_site_state(
            &QuenchProtocol::sudden(h0, h1)?,
            gamma,
            Temperature::Zero,
            t,
            &grid,
        )?;
        let de_ed = before.pulse_energy(&after, Temperature::Zero, t)?;
        let de_ff = energy_absorbed(
            &QuenchProtocol::pulse(h0, h1, t)?,
            gamma,
            Temperature::Zero,
            &grid,
        )?
        .delta_e;
        println!(
            "t = {t}: state diff {:.2e}, pulse energy {de_ed:.12} vs {de_ff:.12}",
            ff.max_abs_diff(&ed.state)
        );
    }
    Ok(())
}
