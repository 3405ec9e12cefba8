//! The transverse-field XY chain and its momentum-block decomposition.
//!
//! After a Jordan-Wigner transformation the Hamiltonian splits into
//! independent 4x4 blocks, one for every pair of momenta (p, -p), in the
//! basis `{|0>, c_p^† c_{-p}^† |0>, c_p^† |0>, c_{-p}^† |0>}`. The upper-left
//! 2x2 block mixes the vacuum with the doubly occupied pair; the two singly
//! occupied states are inert with energy `J cos(phi)`.
//!
//! Units: fields and temperatures are stored as ratios to `J`, times in `1/J`
//! (with hbar = k_B = 1).

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Gap below which an even block is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Couplings `(J, gamma, h)` of one XY Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    j: f64,
    gamma: f64,
    h: f64,
}

impl ModelParams {
    /// `h` is the field in units of `J`.
    pub fn new(j: f64, gamma: f64, h: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::param(
                "J",
                format!("must be finite and > 0, got {j}"),
            ));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::param(
                "gamma",
                format!("must lie in [0, 1], got {gamma}"),
            ));
        }
        if !h.is_finite() {
            return Err(Error::param("h", "must be finite"));
        }
        Ok(Self { j, gamma, h })
    }

    /// `J = 1`.
    pub fn unit(gamma: f64, h: f64) -> Result<Self> {
        Self::new(1.0, gamma, h)
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_field(&self, h: f64) -> Result<Self> {
        Self::new(self.j, self.gamma, h)
    }
}

/// Field protocol: a square pulse `h0 -> h1 -> h0` of length `pulse_duration`,
/// or a sudden quench `h0 -> h1` when no duration is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchProtocol {
    pub h0: f64,
    pub h1: f64,
    pub pulse_duration: Option<f64>,
}

impl QuenchProtocol {
    pub fn sudden(h0: f64, h1: f64) -> Result<Self> {
        Self::validate(h0, h1, None)
    }

    pub fn pulse(h0: f64, h1: f64, tau: f64) -> Result<Self> {
        Self::validate(h0, h1, Some(tau))
    }

    fn validate(h0: f64, h1: f64, pulse_duration: Option<f64>) -> Result<Self> {
        if !h0.is_finite() {
            return Err(Error::param("h0", "must be finite"));
        }
        if !h1.is_finite() {
            return Err(Error::param("h1", "must be finite"));
        }
        if let Some(tau) = pulse_duration {
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(Error::param(
                    "pulse_duration",
                    format!("must be >= 0, got {tau}"),
                ));
            }
        }
        Ok(Self {
            h0,
            h1,
            pulse_duration,
        })
    }

    pub fn initial(&self, gamma: f64) -> Result<ModelParams> {
        ModelParams::unit(gamma, self.h0)
    }

    pub fn final_(&self, gamma: f64) -> Result<ModelParams> {
        ModelParams::unit(gamma, self.h1)
    }
}

/// Temperature `k_B T / J`, with zero kept as an explicit limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Zero,
    Finite(f64),
}

impl Temperature {
    /// `0.0` maps to [`Temperature::Zero`].
    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTemperature(t));
        }
        if t == 0.0 {
            Ok(Temperature::Zero)
        } else {
            Ok(Temperature::Finite(t))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Temperature::Zero => 0.0,
            Temperature::Finite(t) => t,
        }
    }
}

/// Quasiparticle energy `Lambda = sqrt((cos phi + h)^2 + gamma^2 sin^2 phi)` in units of `J`.
pub fn dispersion(phi: f64, h: f64, gamma: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (c + h).hypot(gamma * s)
}

/// One momentum block of the fermionised Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub phi: f64,
    pub matrix: Matrix4<C64>,
    pub even_block: Matrix2<C64>,
}

/// Even-parity 2x2 block `J [[-h, i g sin], [-i g sin, h + 2 cos]]`.
pub fn even_block(phi: f64, params: &ModelParams) -> Matrix2<C64> {
    let (s, c) = phi.sin_cos();
    let j = params.j;
    let off = I * (params.gamma * s * j);
    Matrix2::new(
        C64::from(-params.h * j),
        off,
        -off,
        C64::from((params.h + 2.0 * c) * j),
    )
}

pub fn block_hamiltonian(phi: f64, params: &ModelParams) -> BlockHamiltonian {
    let even = even_block(phi, params);
    let odd = C64::from(phi.cos() * params.j);
    let mut matrix = Matrix4::zeros();
    matrix.fixed_view_mut::<2, 2>(0, 0).copy_from(&even);
    matrix[(2, 2)] = odd;
    matrix[(3, 3)] = odd;
    BlockHamiltonian {
        phi,
        matrix,
        even_block: even,
    }
}

/// Pauli-vector form of the traceless part of the even block (in units of `J`):
/// `H_even = J (cos(phi) 1 + b . sigma)` with `b = (0, -gamma sin phi, -(h + cos phi))`.
pub fn bloch_field(phi: f64, h: f64, gamma: f64) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    [0.0, -gamma * s, -(h + c)]
}

/// The 2x2 Bogoliubov unitary `U` with `U^† H_even U = J diag(cos phi - Lambda, cos phi + Lambda)`.
///
/// Requires `gamma sin(phi) >= 0`, which holds for `phi` in `[0, pi]` and `gamma >= 0`.
pub fn bogoliubov_unitary(phi: f64, h: f64, gamma: f64) -> Result<Matrix2<C64>> {
    let lambda = dispersion(phi, h, gamma);
    if lambda < DEGENERACY_TOL {
        return Err(Error::DegenerateBlock { phi, lambda });
    }
    let alpha = h + phi.cos();
    let mix = (gamma * phi.sin()).powi(2);
    // Lambda^2 - alpha^2 = mix; take the well-conditioned sum and derive the difference.
    let (plus, minus) = if alpha >= 0.0 {
        let p = lambda + alpha;
        (p, mix / p)
    } else {
        let m = lambda - alpha;
        (mix / m, m)
    };
    let norm = 1.0 / (2.0 * lambda).sqrt();
    let a = plus.sqrt() * norm;
    let b = minus.sqrt() * norm;
    Ok(Matrix2::new(I * a, I * b, C64::from(-b), C64::from(a)))
}
