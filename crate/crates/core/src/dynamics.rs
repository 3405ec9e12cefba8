//! Finite-temperature quench dynamics of the momentum blocks and the
//! nearest-neighbour two-site state built from them.
//!
//! Each pair `(p, -p)` carries a 4-level density matrix: a 2x2 block on
//! `{|0>, c_p^† c_{-p}^† |0>}` plus the populations of the two singly
//! occupied states. The post-quench Hamiltonian acts on the singly occupied
//! states as a multiple of the identity, so only the 2x2 block evolves.
//!
//! Real-space contractions follow from `c_j = N^{-1/2} sum_p e^{-i p j} c_p`:
//!
//! ```text
//! n0 = <c_j^† c_j>     = 1/pi      int_0^pi n_p
//! g1 = <c_j^† c_{j+1}> = 1/pi      int_0^pi cos(phi) n_p
//! k1 = <c_j c_{j+1}>   = -i/pi     int_0^pi sin(phi) kappa_p,   kappa_p = <c_{-p} c_p>
//! ```
//!
//! and Wick's theorem on the Majorana pairs `A = c^† + c`, `B = c^† - c` gives
//! the spin correlators (see [`TwoSiteState::from_contractions`]).

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::lattice::{
    bloch_field, dispersion, ModelParams, QuenchProtocol, Temperature, C64, DEGENERACY_TOL,
};
use crate::quadrature::MomentumGrid;

/// Density matrix of one momentum pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub phi: f64,
    pub even_block: Matrix2<C64>,
    pub odd_pops: [f64; 2],
}

impl ModeState {
    /// `(trace, r)` with `even_block = (trace 1 + r . sigma) / 2`.
    pub fn bloch(&self) -> (f64, [f64; 3]) {
        let m = &self.even_block;
        let tr = m[(0, 0)].re + m[(1, 1)].re;
        let off = m[(1, 0)];
        (
            tr,
            [2.0 * off.re, 2.0 * off.im, m[(0, 0)].re - m[(1, 1)].re],
        )
    }

    fn from_bloch(phi: f64, tr: f64, r: [f64; 3], odd: f64) -> Self {
        let off = C64::new(r[0], r[1]) * 0.5;
        let even_block = Matrix2::new(
            C64::from(0.5 * (tr + r[2])),
            off.conj(),
            off,
            C64::from(0.5 * (tr - r[2])),
        );
        Self {
            phi,
            even_block,
            odd_pops: [odd, odd],
        }
    }

    pub fn trace(&self) -> f64 {
        self.even_block.trace().re + self.odd_pops[0] + self.odd_pops[1]
    }

    pub fn purity_even(&self) -> f64 {
        (self.even_block * self.even_block).trace().re
    }
}

/// Gibbs state of one momentum block at field `params.h`.
///
/// The partition function includes the two singly occupied levels at
/// `J cos(phi)`. At [`Temperature::Zero`] the result is the projector on the
/// lower even-block eigenstate (or the uniform mixture if the block is degenerate).
pub fn thermal_block_state(phi: f64, params: &ModelParams, t: Temperature) -> Result<ModeState> {
    let (tr, r, odd) = thermal_bloch(phi, params.h(), params.gamma(), t)?;
    Ok(ModeState::from_bloch(phi, tr, r, odd))
}

/// Bloch data `(trace, r, odd population)` of the thermal block state.
fn thermal_bloch(phi: f64, h: f64, gamma: f64, t: Temperature) -> Result<(f64, [f64; 3], f64)> {
    let lambda = dispersion(phi, h, gamma);
    let b = bloch_field(phi, h, gamma);
    match t {
        Temperature::Zero => {
            if lambda < DEGENERACY_TOL {
                return Ok((0.5, [0.0; 3], 0.25));
            }
            Ok((1.0, b.map(|x| -x / lambda), 0.0))
        }
        Temperature::Finite(t) => {
            if !(t > 0.0) {
                return Err(Error::NegativeTemperature(t));
            }
            // Levels relative to the block minimum: 0, Lambda, Lambda, 2 Lambda.
            let x = lambda / t;
            let odd_w = (-x).exp();
            let top_w = odd_w * odd_w;
            let z = 1.0 + 2.0 * odd_w + top_w;
            let pol = -(-2.0 * x).exp_m1() / z;
            let r = if lambda > 0.0 {
                b.map(|v| -pol * v / lambda)
            } else {
                [0.0; 3]
            };
            Ok(((1.0 + top_w) / z, r, odd_w / z))
        }
    }
}

/// Conjugates the even block by `exp(-i H_even t)` at the post-quench field.
pub fn evolve_block(state: &ModeState, params_h1: &ModelParams, t: f64) -> ModeState {
    let b = bloch_field(state.phi, params_h1.h(), params_h1.gamma());
    let lambda = dispersion(state.phi, params_h1.h(), params_h1.gamma());
    let theta = params_h1.j() * lambda * t;
    // exp(-i b.sigma t) = cos(theta) 1 - i sin(theta) (b / Lambda).sigma
    let (sn, cs) = theta.sin_cos();
    let i = C64::new(0.0, 1.0);
    let u = if lambda > 0.0 {
        let n = b.map(|x| x / lambda);
        let sigma_n = Matrix2::new(
            C64::from(n[2]),
            C64::new(n[0], -n[1]),
            C64::new(n[0], n[1]),
            C64::from(-n[2]),
        );
        Matrix2::identity() * C64::from(cs) - sigma_n * (i * sn)
    } else {
        Matrix2::identity()
    };
    ModeState {
        phi: state.phi,
        even_block: u * state.even_block * u.adjoint(),
        odd_pops: state.odd_pops,
    }
}

/// `(n_p, kappa_p) = (<c_p^† c_p>, <c_{-p} c_p>)` of a block state.
pub fn mode_expectations(state: &ModeState) -> (f64, C64) {
    let n = state.even_block[(1, 1)].re + state.odd_pops[0];
    (n, state.even_block[(1, 0)])
}

/// Nearest-neighbour fermion contractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contractions {
    /// `<c_j^† c_j>`
    pub n0: f64,
    /// `<c_j^† c_{j+1}>`
    pub g1: C64,
    /// `<c_j c_{j+1}>`
    pub k1: C64,
}

impl Contractions {
    fn check(self) -> Result<Self> {
        if self.n0.is_finite() && self.g1.is_finite() && self.k1.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite("contractions"))
        }
    }
}

/// Contractions of the sudden-quench state at time `t` (the pulse duration, if any, is ignored).
pub fn contractions(
    protocol: &QuenchProtocol,
    gamma: f64,
    temperature: Temperature,
    t: f64,
    grid: &MomentumGrid,
) -> Result<Contractions> {
    let p0 = protocol.initial(gamma)?;
    let p1 = protocol.final_(gamma)?;
    let mut n0 = 0.0;
    let mut g1 = 0.0;
    let mut k1 = C64::from(0.0);
    for (phi, w) in grid.iter() {
        let state = evolve_block(&thermal_block_state(phi, &p0, temperature)?, &p1, t);
        let (n, kappa) = mode_expectations(&state);
        let (s, c) = phi.sin_cos();
        n0 += w * n;
        g1 += w * c * n;
        k1 += kappa * (w * s);
    }
    Contractions {
        n0: n0 / PI,
        g1: C64::from(g1 / PI),
        k1: k1 * C64::new(0.0, -1.0 / PI),
    }
    .check()
}

/// The five nonzero Pauli moments of the nearest-neighbour reduced density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoSiteState {
    pub mz: f64,
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
    /// Equal to `C^{yx}`; stored once.
    pub cxy: f64,
}

impl TwoSiteState {
    /// Wick reduction with `sigma^z = -A B`, `sigma^x sigma^x = B_j A_{j+1}`,
    /// `sigma^y sigma^y = -A_j B_{j+1}`, `sigma^x sigma^y = -i B_j B_{j+1}`,
    /// `sigma^y sigma^x = -i A_j A_{j+1}`.
    pub fn from_contractions(c: &Contractions) -> Self {
        let mz = 2.0 * c.n0 - 1.0;
        let cxx = 2.0 * (c.g1.re - c.k1.re);
        let cyy = 2.0 * (c.g1.re + c.k1.re);
        let cxy = 2.0 * c.k1.im;
        let czz = mz * mz + cxy * cxy - cxx * cyy;
        Self {
            mz,
            cxx,
            cyy,
            czz,
            cxy,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.mz, self.cxx, self.cyy, self.czz, self.cxy]
            .iter()
            .all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.mz - other.mz,
            self.cxx - other.cxx,
            self.cyy - other.cyy,
            self.czz - other.czz,
            self.cxy - other.cxy,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Exact spectrum of the assembled density matrix. The state only couples
    /// `|00>` with `|11>` and `|01>` with `|10>`, so it splits into two 2x2 blocks.
    pub fn x_spectrum(&self) -> [f64; 4] {
        let outer =
            (4.0 * self.mz * self.mz + (self.cxx - self.cyy).powi(2) + 4.0 * self.cxy * self.cxy)
                .sqrt();
        let inner = (self.cxx + self.cyy).abs();
        [
            0.25 * (1.0 + self.czz + outer),
            0.25 * (1.0 + self.czz - outer),
            0.25 * (1.0 - self.czz + inner),
            0.25 * (1.0 - self.czz - inner),
        ]
    }
}

/// Two-site state of the sudden quench at time `t`.
pub fn two_site_state(
    protocol: &QuenchProtocol,
    gamma: f64,
    temperature: Temperature,
    t: f64,
    grid: &MomentumGrid,
) -> Result<TwoSiteState> {
    let s = TwoSiteState::from_contractions(&contractions(protocol, gamma, temperature, t, grid)?);
    let min = crate::observables::assemble_rho_unchecked(&s).min_eigenvalue();
    if !(min >= -1e-8) {
        return Err(Error::InvalidState {
            min_eigenvalue: min,
        });
    }
    Ok(s)
}

/// Number of recurrence steps between exact resynchronisations in [`SuddenQuench::scan`].
const RESYNC: usize = 256;

/// A sudden quench precomputed on a grid, for fast evaluation at many times.
///
/// Each block's Bloch vector precesses about the post-quench field axis at
/// angular frequency `2 J Lambda_1`; the contractions are therefore a constant
/// plus a sum of `cos`/`sin` terms, one pair per node.
#[derive(Debug, Clone)]
pub struct SuddenQuench {
    omega: Vec<f64>,
    /// Coefficients of `cos(omega t)` for `[n0, g1, Re k1, Im k1]`.
    cos_coef: Vec<[f64; 4]>,
    sin_coef: Vec<[f64; 4]>,
    constant: [f64; 4],
}

impl SuddenQuench {
    pub fn new(
        h0: f64,
        h1: f64,
        gamma: f64,
        temperature: Temperature,
        grid: &MomentumGrid,
    ) -> Result<Self> {
        let p1 = ModelParams::unit(gamma, h1)?;
        ModelParams::unit(gamma, h0)?;
        let n = grid.len();
        let mut omega = Vec::with_capacity(n);
        let mut cos_coef = Vec::with_capacity(n);
        let mut sin_coef = Vec::with_capacity(n);
        let mut constant = [0.0; 4];
        for (phi, w) in grid.iter() {
            let (tr, r, odd) = thermal_bloch(phi, h0, gamma, temperature)?;
            let lambda1 = dispersion(phi, h1, gamma);
            let b1 = bloch_field(phi, h1, gamma);
            let (par, perp, cross) = if lambda1 > 0.0 {
                let nh = b1.map(|x| x / lambda1);
                let dot = nh[0] * r[0] + nh[1] * r[1] + nh[2] * r[2];
                let par = nh.map(|x| x * dot);
                let perp = [r[0] - par[0], r[1] - par[1], r[2] - par[2]];
                let cross = [
                    nh[1] * r[2] - nh[2] * r[1],
                    nh[2] * r[0] - nh[0] * r[2],
                    nh[0] * r[1] - nh[1] * r[0],
                ];
                (par, perp, cross)
            } else {
                (r, [0.0; 3], [0.0; 3])
            };
            let (s, c) = phi.sin_cos();
            // Linear maps from (tr, r) to the four outputs, scaled by w / pi.
            let k = w / PI;
            let out = |v: [f64; 3]| {
                [
                    -0.5 * k * v[2],
                    -0.5 * k * c * v[2],
                    0.5 * k * s * v[1],
                    -0.5 * k * s * v[0],
                ]
            };
            let base = out(par);
            let n_const = k * (0.5 * tr + odd);
            constant[0] += n_const + base[0];
            constant[1] += c * n_const + base[1];
            constant[2] += base[2];
            constant[3] += base[3];
            omega.push(2.0 * p1.j() * lambda1);
            cos_coef.push(out(perp));
            sin_coef.push(out(cross));
        }
        Ok(Self {
            omega,
            cos_coef,
            sin_coef,
            constant,
        })
    }

    fn assemble(acc: [f64; 4]) -> Result<Contractions> {
        Contractions {
            n0: acc[0],
            g1: C64::from(acc[1]),
            k1: C64::new(acc[2], acc[3]),
        }
        .check()
    }

    pub fn contractions_at(&self, t: f64) -> Result<Contractions> {
        let mut acc = self.constant;
        for ((&w, a), b) in self.omega.iter().zip(&self.cos_coef).zip(&self.sin_coef) {
            let (s, c) = (w * t).sin_cos();
            for o in 0..4 {
                acc[o] += a[o] * c + b[o] * s;
            }
        }
        Self::assemble(acc)
    }

    pub fn state_at(&self, t: f64) -> Result<TwoSiteState> {
        Ok(TwoSiteState::from_contractions(&self.contractions_at(t)?))
    }

    /// States at `t = k dt` for `k = 0..=steps`, via a rotation recurrence
    /// resynchronised every few hundred steps.
    pub fn scan(&self, dt: f64, steps: usize) -> Result<Vec<TwoSiteState>> {
        let n = self.omega.len();
        let step: Vec<C64> = self
            .omega
            .iter()
            .map(|&w| C64::from_polar(1.0, w * dt))
            .collect();
        let mut phase = vec![C64::from(1.0); n];
        let mut out = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            if k % RESYNC == 0 {
                let t = k as f64 * dt;
                for (p, &w) in phase.iter_mut().zip(&self.omega) {
                    *p = C64::from_polar(1.0, w * t);
                }
            }
            let mut acc = self.constant;
            for i in 0..n {
                let (c, s) = (phase[i].re, phase[i].im);
                let a = &self.cos_coef[i];
                let b = &self.sin_coef[i];
                for o in 0..4 {
                    acc[o] += a[o] * c + b[o] * s;
                }
                phase[i] *= step[i];
            }
            out.push(TwoSiteState::from_contractions(&Self::assemble(acc)?));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::make_grid;
    use approx::assert_abs_diff_eq;

    fn params(gamma: f64, h: f64) -> ModelParams {
        ModelParams::unit(gamma, h).unwrap()
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let s = thermal_block_state(1.1, &params(0.8, 0.5), Temperature::Finite(1e6)).unwrap();
        for p in [
            s.even_block[(0, 0)].re,
            s.even_block[(1, 1)].re,
            s.odd_pops[0],
            s.odd_pops[1],
        ] {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-5);
        }
        let (n, kappa) = mode_expectations(&s);
        assert_abs_diff_eq!(n, 0.5, epsilon = 1e-5);
        assert!(kappa.norm() < 1e-5);
    }

    #[test]
    fn zero_temperature_is_pure() {
        let s = thermal_block_state(2.0, &params(0.8, 0.5), Temperature::Zero).unwrap();
        assert_abs_diff_eq!(s.purity_even(), 1.0, epsilon = 1e-14);
        assert_eq!(s.odd_pops, [0.0, 0.0]);
    }

    #[test]
    fn vacuum_expectations() {
        let s = ModeState {
            phi: 0.3,
            even_block: Matrix2::new(
                C64::from(1.0),
                C64::from(0.0),
                C64::from(0.0),
                C64::from(0.0),
            ),
            odd_pops: [0.0; 2],
        };
        let (n, kappa) = mode_expectations(&s);
        assert_eq!(n, 0.0);
        assert_eq!(kappa, C64::from(0.0));
    }

    #[test]
    fn negative_temperature_rejected() {
        let r = thermal_block_state(1.0, &params(0.8, 0.5), Temperature::Finite(-1.0));
        assert!(matches!(r, Err(Error::NegativeTemperature(_))));
    }

    #[test]
    fn gibbs_weights_at_quarter_turn() {
        // phi = pi/2, h = 1: even energies cos(phi) -/+ Lambda = -/+ Lambda, odd at 0.
        let phi = std::f64::consts::FRAC_PI_2;
        let lambda = dispersion(phi, 1.0, 0.8);
        let t = 1.0;
        let w = [(lambda / t).exp(), (-lambda / t).exp(), 1.0, 1.0];
        let z: f64 = w.iter().sum();
        let s = thermal_block_state(phi, &params(0.8, 1.0), Temperature::Finite(t)).unwrap();
        let eig = nalgebra::SymmetricEigen::new(s.even_block).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        assert_abs_diff_eq!(hi, w[0] / z, epsilon = 1e-14);
        assert_abs_diff_eq!(lo, w[1] / z, epsilon = 1e-14);
        assert_abs_diff_eq!(s.odd_pops[0], w[2] / z, epsilon = 1e-14);
        assert_abs_diff_eq!(s.trace(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn evolution_preserves_spectrum() {
        let p0 = params(0.8, 0.3);
        let p1 = params(0.8, 1.0);
        let s0 = thermal_block_state(0.9, &p0, Temperature::Finite(0.4)).unwrap();
        assert_eq!(evolve_block(&s0, &p1, 0.0), s0);
        for t in [0.1, 1.0, 10.0] {
            let s = evolve_block(&s0, &p1, t);
            assert_abs_diff_eq!(s.purity_even(), s0.purity_even(), epsilon = 1e-12);
            assert_abs_diff_eq!(s.trace(), 1.0, epsilon = 1e-12);
            assert_eq!(s.odd_pops, s0.odd_pops);
            // h1 = h0 leaves the thermal state invariant
            let same = evolve_block(&s0, &p0, t);
            assert!((same.even_block - s0.even_block).norm() < 1e-12);
        }
    }

    #[test]
    fn infinite_temperature_contractions_vanish() {
        let g = make_grid(128).unwrap();
        let q = QuenchProtocol::sudden(0.5, 1.0).unwrap();
        let c = contractions(&q, 0.8, Temperature::Finite(1e7), 1.3, &g).unwrap();
        assert_abs_diff_eq!(c.n0, 0.5, epsilon = 1e-6);
        assert!(c.g1.norm() < 1e-6 && c.k1.norm() < 1e-6);
        let s = two_site_state(&q, 0.8, Temperature::Finite(1e7), 1.3, &g).unwrap();
        assert!(s.max_abs_diff(&TwoSiteState::default()) < 1e-6);
    }

    #[test]
    fn equilibrium_has_no_off_diagonal_correlator() {
        let g = make_grid(256).unwrap();
        for (h0, t) in [(0.5, Temperature::Finite(0.2)), (1.4, Temperature::Zero)] {
            let q = QuenchProtocol::sudden(h0, 1.0).unwrap();
            let s = two_site_state(&q, 0.8, t, 0.0, &g).unwrap();
            assert!(s.cxy.abs() < 1e-12);
        }
    }

    #[test]
    fn no_quench_is_stationary() {
        let g = make_grid(256).unwrap();
        let q = QuenchProtocol::sudden(0.6, 0.6).unwrap();
        let s0 = two_site_state(&q, 0.8, Temperature::Finite(0.3), 0.0, &g).unwrap();
        for t in [0.5, 3.0, 17.0] {
            let s = two_site_state(&q, 0.8, Temperature::Finite(0.3), t, &g).unwrap();
            assert!(s.max_abs_diff(&s0) < 1e-10);
        }
    }

    #[test]
    fn fast_path_matches_block_evolution() {
        let g = make_grid(512).unwrap();
        let q = QuenchProtocol::sudden(0.2, 1.0).unwrap();
        for temp in [Temperature::Zero, Temperature::Finite(0.3)] {
            let fast = SuddenQuench::new(0.2, 1.0, 0.8, temp, &g).unwrap();
            let scan = fast.scan(0.25, 80).unwrap();
            for (k, s) in scan.iter().enumerate().step_by(7) {
                let t = k as f64 * 0.25;
                let slow = two_site_state(&q, 0.8, temp, t, &g).unwrap();
                assert!(slow.max_abs_diff(s) < 1e-12, "t={t}: {slow:?} vs {s:?}");
                assert!(slow.max_abs_diff(&fast.state_at(t).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_doubling_is_converged() {
        let q = QuenchProtocol::sudden(0.5, 1.0).unwrap();
        for t in [0.0, 1.0, 5.0] {
            let a = two_site_state(
                &q,
                0.8,
                Temperature::Finite(0.05),
                t,
                &make_grid(2048).unwrap(),
            )
            .unwrap();
            let b = two_site_state(
                &q,
                0.8,
                Temperature::Finite(0.05),
                t,
                &make_grid(4096).unwrap(),
            )
            .unwrap();
            assert!(a.max_abs_diff(&b) < 1e-8);
        }
    }
}
