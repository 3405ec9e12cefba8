//! Physical quantities of the quenched chain: the two-site density matrix,
//! its entanglement and mutual information, and the energy absorbed during a
//! square field pulse.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};

use crate::dynamics::TwoSiteState;
use crate::error::{Error, Result};
use crate::lattice::{
    bloch_field, bogoliubov_unitary, dispersion, ModelParams, QuenchProtocol, Temperature, C64,
};
use crate::quadrature::MomentumGrid;

/// Tolerated negative eigenvalue of an assembled density matrix.
pub const PSD_TOL: f64 = 1e-8;
/// Eigenvalues in `[-CLIP_TOL, 0)` are set to zero before taking logarithms.
pub const CLIP_TOL: f64 = 1e-10;

fn c(re: f64) -> C64 {
    C64::from(re)
}

fn pauli() -> [Matrix2<C64>; 4] {
    let o = c(0.0);
    let l = c(1.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Two-qubit density matrix in the basis `|up up>, |up down>, |down up>, |down down>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensityMatrix(pub Matrix4<C64>);

impl TwoQubitDensityMatrix {
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        sorted_eigenvalues(self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn partial_transpose_b(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|r, col| {
            let (a, b) = (r / 2, r % 2);
            let (a2, b2) = (col / 2, col % 2);
            self.0[(2 * a + b2, 2 * a2 + b)]
        })
    }

    pub fn reduced_a(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|a, a2| self.0[(2 * a, 2 * a2)] + self.0[(2 * a + 1, 2 * a2 + 1)])
    }

    pub fn reduced_b(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|b, b2| self.0[(b, b2)] + self.0[(2 + b, 2 + b2)])
    }
}

pub(crate) fn sorted_eigenvalues(m: Matrix4<C64>) -> [f64; 4] {
    let ev = SymmetricEigen::new(m).eigenvalues;
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

pub(crate) fn assemble_rho_unchecked(s: &TwoSiteState) -> TwoQubitDensityMatrix {
    let [id, x, y, z] = pauli();
    let m = kron(&id, &id)
        + (kron(&z, &id) + kron(&id, &z)) * c(s.mz)
        + kron(&x, &x) * c(s.cxx)
        + kron(&y, &y) * c(s.cyy)
        + kron(&z, &z) * c(s.czz)
        + (kron(&x, &y) + kron(&y, &x)) * c(s.cxy);
    TwoQubitDensityMatrix(m * c(0.25))
}

/// Pauli expansion of the two-site state; rejects matrices with an eigenvalue below `-1e-8`.
pub fn assemble_rho(s: &TwoSiteState) -> Result<TwoQubitDensityMatrix> {
    let rho = assemble_rho_unchecked(s);
    let min = rho.min_eigenvalue();
    if !(min >= -PSD_TOL) {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(rho)
}

/// Applies the same rotation about `z` to both sites so that the in-plane
/// correlation block becomes diagonal (`cxy = 0`). `mz` and `czz` are unchanged.
pub fn rotate_to_x_form(s: &TwoSiteState) -> TwoSiteState {
    let mean = 0.5 * (s.cxx + s.cyy);
    let half = 0.5 * (s.cxx - s.cyy);
    let radius = half.hypot(s.cxy);
    TwoSiteState {
        mz: s.mz,
        cxx: mean + radius,
        cyy: mean - radius,
        czz: s.czz,
        cxy: 0.0,
    }
}

/// Rotation angle used by [`rotate_to_x_form`]; exposed for frame-invariance checks.
pub fn x_form_angle(s: &TwoSiteState) -> f64 {
    0.5 * (2.0 * s.cxy).atan2(s.cxx - s.cyy)
}

/// The two candidate negative eigenvalues (times 4) of the partial transpose.
pub fn negativity_terms(s: &TwoSiteState) -> (f64, f64) {
    let r = rotate_to_x_form(s);
    let n1 = 1.0 + r.czz - ((r.cxx + r.cyy).powi(2) + 4.0 * r.mz * r.mz).sqrt();
    let n2 = 1.0 - r.czz - (r.cxx - r.cyy).abs();
    (n1, n2)
}

/// `-(1/4) min(0, N1, N2)`.
pub fn negativity(s: &TwoSiteState) -> f64 {
    let (n1, n2) = negativity_terms(s);
    0.25 * (-n1.min(n2)).max(0.0)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose, from a direct eigensolve.
pub fn negativity_numeric(s: &TwoSiteState) -> f64 {
    let pt = assemble_rho_unchecked(s).partial_transpose_b();
    -sorted_eigenvalues(pt)
        .iter()
        .filter(|&&e| e < 0.0)
        .sum::<f64>()
}

pub fn log_negativity(s: &TwoSiteState) -> f64 {
    (2.0 * negativity(s) + 1.0).log2()
}

fn clip(ev: f64) -> Result<f64> {
    if ev >= 0.0 {
        Ok(ev)
    } else if ev >= -CLIP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NotPositive { min_eigenvalue: ev })
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// `S(A) + S(B) - S(AB)` in bits, from a numerical eigendecomposition.
pub fn mutual_information(s: &TwoSiteState) -> Result<f64> {
    let rho = assemble_rho_unchecked(s);
    let ab = rho.eigenvalues().map(clip);
    let ab: Vec<f64> = ab.into_iter().collect::<Result<_>>()?;
    let reduced = |m: Matrix2<C64>| -> Result<Vec<f64>> {
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .map(|&e| clip(e))
            .collect()
    };
    let a = reduced(rho.reduced_a())?;
    let b = reduced(rho.reduced_b())?;
    Ok((shannon_bits(&a) + shannon_bits(&b) - shannon_bits(&ab)).max(0.0))
}

/// Closed-form mutual information, evaluated in the frame where `cxy = 0`.
pub fn mutual_information_closed_form(s: &TwoSiteState) -> Result<f64> {
    let r = rotate_to_x_form(s);
    let root = ((r.cxx - r.cyy).powi(2) + 4.0 * r.mz * r.mz).sqrt();
    let inner = (r.cxx + r.cyy).abs();
    let ab = [
        0.25 * (1.0 - r.czz + inner),
        0.25 * (1.0 - r.czz - inner),
        0.25 * (1.0 + r.czz + root),
        0.25 * (1.0 + r.czz - root),
    ];
    let ab: Vec<f64> = ab.into_iter().map(clip).collect::<Result<_>>()?;
    let a = [0.5 * (1.0 + r.mz), 0.5 * (1.0 - r.mz)];
    Ok((2.0 * shannon_bits(&a) - shannon_bits(&ab)).max(0.0))
}

/// Energy absorbed per site during a square pulse of length `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResponse {
    pub temperature: Temperature,
    pub tau: f64,
    pub delta_e: f64,
}

/// Thermal weights of the four block levels, ordered as `diag(cos - L, cos + L, cos, cos)`.
fn block_weights(lambda: f64, t: Temperature) -> Result<[f64; 4]> {
    match t {
        Temperature::Zero => Ok([1.0, 0.0, 0.0, 0.0]),
        Temperature::Finite(t) => {
            if !(t > 0.0) {
                return Err(Error::NegativeTemperature(t));
            }
            let o = (-lambda / t).exp();
            let z = 1.0 + 2.0 * o + o * o;
            Ok([1.0 / z, o * o / z, o / z, o / z])
        }
    }
}

/// Pulse energy through the Bogoliubov frames of both fields: per block,
/// `Tr(U H0~ U^† e^{-i H1~ tau} U rho0~ U^† e^{i H1~ tau}) - Tr(H0~ rho0~)`
/// with `U = U1^† U0 (+) 1`, integrated with weight `1/(2 pi)` over `(0, pi)`.
pub fn energy_absorbed(
    protocol: &QuenchProtocol,
    gamma: f64,
    temperature: Temperature,
    grid: &MomentumGrid,
) -> Result<EnergyResponse> {
    let tau = protocol
        .pulse_duration
        .ok_or_else(|| Error::param("pulse_duration", "energy absorption needs a pulse"))?;
    let p0 = protocol.initial(gamma)?;
    ModelParams::unit(gamma, protocol.h1)?;
    let j = p0.j();
    let mut total = 0.0;
    for (phi, w) in grid.iter() {
        let cphi = phi.cos();
        let l0 = dispersion(phi, protocol.h0, gamma);
        let l1 = dispersion(phi, protocol.h1, gamma);
        let u0 = bogoliubov_unitary(phi, protocol.h0, gamma)?;
        let u1 = bogoliubov_unitary(phi, protocol.h1, gamma)?;
        let mut frame = Matrix4::<C64>::identity();
        frame
            .fixed_view_mut::<2, 2>(0, 0)
            .copy_from(&(u1.adjoint() * u0));
        let levels = [cphi - l0, cphi + l0, cphi, cphi].map(|e| c(e * j));
        let h0 = Matrix4::from_diagonal(&levels.into());
        let weights = block_weights(l0, temperature)?;
        let rho0 = Matrix4::from_diagonal(&weights.map(c).into());
        let phase = C64::from_polar(1.0, -tau * cphi * j);
        let fwd = Matrix4::from_diagonal(
            &[
                C64::from_polar(1.0, tau * l1 * j) * phase,
                C64::from_polar(1.0, -tau * l1 * j) * phase,
                phase,
                phase,
            ]
            .into(),
        );
        let evolved = fwd * frame * rho0 * frame.adjoint() * fwd.adjoint();
        let after = (frame * h0 * frame.adjoint() * evolved).trace().re;
        let before = (h0 * rho0).trace().re;
        total += w * (after - before);
    }
    let delta_e = total / (2.0 * PI);
    if !delta_e.is_finite() {
        return Err(Error::NonFinite("energy_absorbed"));
    }
    Ok(EnergyResponse {
        temperature,
        tau,
        delta_e,
    })
}

/// Pulse energy precomputed on a grid for fast evaluation at many durations.
///
/// In the Bloch picture the block energy after the pulse is
/// `J b0 . r(tau)` with `r` precessing about `b1` at frequency `2 J Lambda_1`.
#[derive(Debug, Clone)]
pub struct PulseAbsorption {
    omega: Vec<f64>,
    cos_coef: Vec<f64>,
    sin_coef: Vec<f64>,
    offset: f64,
}

impl PulseAbsorption {
    pub fn new(
        h0: f64,
        h1: f64,
        gamma: f64,
        temperature: Temperature,
        grid: &MomentumGrid,
    ) -> Result<Self> {
        let p0 = ModelParams::unit(gamma, h0)?;
        ModelParams::unit(gamma, h1)?;
        let j = p0.j();
        let n = grid.len();
        let mut omega = Vec::with_capacity(n);
        let mut cos_coef = Vec::with_capacity(n);
        let mut sin_coef = Vec::with_capacity(n);
        let mut offset = 0.0;
        for (phi, w) in grid.iter() {
            let state = crate::dynamics::thermal_block_state(phi, &p0, temperature)?;
            let (_, r) = state.bloch();
            let b0 = bloch_field(phi, h0, gamma);
            let b1 = bloch_field(phi, h1, gamma);
            let l1 = dispersion(phi, h1, gamma);
            let k = w * j / (2.0 * PI);
            let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let (perp, cross) = if l1 > 0.0 {
                let nh = b1.map(|x| x / l1);
                let along = dot(nh, r);
                let perp = [
                    r[0] - nh[0] * along,
                    r[1] - nh[1] * along,
                    r[2] - nh[2] * along,
                ];
                let cross = [
                    nh[1] * r[2] - nh[2] * r[1],
                    nh[2] * r[0] - nh[0] * r[2],
                    nh[0] * r[1] - nh[1] * r[0],
                ];
                (perp, cross)
            } else {
                ([0.0; 3], [0.0; 3])
            };
            let a = k * dot(b0, perp);
            omega.push(2.0 * j * l1);
            cos_coef.push(a);
            sin_coef.push(k * dot(b0, cross));
            offset -= a;
        }
        Ok(Self {
            omega,
            cos_coef,
            sin_coef,
            offset,
        })
    }

    pub fn at(&self, tau: f64) -> f64 {
        let mut e = self.offset;
        for ((&w, &a), &b) in self.omega.iter().zip(&self.cos_coef).zip(&self.sin_coef) {
            let (s, c) = (w * tau).sin_cos();
            e += a * c + b * s;
        }
        e
    }

    /// `Delta E(k dt)` for `k = 0..=steps`.
    pub fn scan(&self, dt: f64, steps: usize) -> Vec<f64> {
        let step: Vec<C64> = self
            .omega
            .iter()
            .map(|&w| C64::from_polar(1.0, w * dt))
            .collect();
        let mut phase = vec![C64::from(1.0); self.omega.len()];
        let mut out = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            if k % 256 == 0 {
                let t = k as f64 * dt;
                for (p, &w) in phase.iter_mut().zip(&self.omega) {
                    *p = C64::from_polar(1.0, w * t);
                }
            }
            let mut e = self.offset;
            for i in 0..phase.len() {
                e += self.cos_coef[i] * phase[i].re + self.sin_coef[i] * phase[i].im;
                phase[i] *= step[i];
            }
            out.push(e);
        }
        out
    }

    /// Largest energy any pulse can deposit, `max_phi 2 Lambda_0` per site.
    pub fn bound(h0: f64, gamma: f64, grid: &MomentumGrid) -> f64 {
        grid.nodes()
            .iter()
            .map(|&phi| 2.0 * dispersion(phi, h0, gamma))
            .fold(0.0, f64::max)
    }
}
