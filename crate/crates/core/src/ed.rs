//! Dense exact diagonalisation of short periodic chains (N <= 12).
//!
//! Basis states are bit strings with bit `j` set when spin `j` points up
//! (`sigma^z = +1`). The Hamiltonian is real and conserves the parity of the
//! number of up spins, so it is stored and diagonalised in the two parity
//! sectors separately. For even N the even sector is the even-fermion-parity
//! sector, where the Jordan-Wigner fermions obey antiperiodic boundary
//! conditions. [`Temperature::Zero`] selects the ground state of that sector.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::dynamics::TwoSiteState;
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, Temperature, C64};

pub const MAX_SITES: usize = 12;

/// Gibbs weights below this fraction of the largest one are dropped.
const WEIGHT_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// `P |bit> = phase |bit'>` for one site, `up = true` meaning `sigma^z = +1`.
fn pauli_action(p: Pauli, up: bool) -> (bool, C64) {
    match (p, up) {
        (Pauli::X, _) => (true, C64::from(1.0)),
        (Pauli::Y, true) => (true, C64::new(0.0, 1.0)),
        (Pauli::Y, false) => (true, C64::new(0.0, -1.0)),
        (Pauli::Z, true) => (false, C64::from(1.0)),
        (Pauli::Z, false) => (false, C64::from(-1.0)),
    }
}

/// Applies a product of single-site Paulis to a basis state.
fn apply_pauli_string(ops: &[(usize, Pauli)], b: usize) -> (usize, C64) {
    let mut state = b;
    let mut amp = C64::from(1.0);
    for &(site, p) in ops.iter().rev() {
        let up = state >> site & 1 == 1;
        let (flip, phase) = pauli_action(p, up);
        if flip {
            state ^= 1 << site;
        }
        amp *= phase;
    }
    (state, amp)
}

#[derive(Debug)]
struct Sector {
    basis: Vec<usize>,
    block: DMatrix<f64>,
    eigen: OnceLock<(Vec<f64>, DMatrix<f64>)>,
}

impl Sector {
    /// Ascending eigenvalues and matching eigenvector columns.
    fn eigen(&self) -> &(Vec<f64>, DMatrix<f64>) {
        self.eigen.get_or_init(|| {
            let e = SymmetricEigen::new(self.block.clone());
            let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
            let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
            let vectors = DMatrix::from_fn(self.block.nrows(), order.len(), |r, c| {
                e.eigenvectors[(r, order[c])]
            });
            (values, vectors)
        })
    }
}

/// A periodic XY chain held as dense parity blocks.
#[derive(Debug)]
pub struct DenseSpinSystem {
    n: usize,
    params: ModelParams,
    /// Position of each basis state inside its sector.
    local: Vec<usize>,
    sectors: [Sector; 2],
}

/// Observables read off an exact state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdObservables {
    /// Moments on the bond between sites 0 and 1.
    pub state: TwoSiteState,
    /// `<H> / N` of the system the state was prepared with.
    pub energy_per_site: f64,
    /// Largest deviation of any bond's moments from bond (0, 1).
    pub translation_residual: f64,
    /// `|C^{xy} - C^{yx}|` on bond (0, 1).
    pub xy_asymmetry: f64,
}

impl DenseSpinSystem {
    pub fn build(n: usize, params: ModelParams) -> Result<Self> {
        if !(2..=MAX_SITES).contains(&n) {
            return Err(Error::TooLarge(n));
        }
        let dim = 1usize << n;
        let mut local = vec![0; dim];
        let mut bases = [Vec::new(), Vec::new()];
        for (b, slot) in local.iter_mut().enumerate() {
            let s = (b.count_ones() % 2) as usize;
            *slot = bases[s].len();
            bases[s].push(b);
        }
        let sectors = bases.map(|basis| {
            let mut block = DMatrix::zeros(basis.len(), basis.len());
            for (col, &b) in basis.iter().enumerate() {
                for (row_state, amp) in hamiltonian_action(n, &params, b) {
                    block[(local[row_state], col)] += amp;
                }
            }
            Sector {
                basis,
                block,
                eigen: OnceLock::new(),
            }
        });
        Ok(Self {
            n,
            params,
            local,
            sectors,
        })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// The full `2^N x 2^N` matrix.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n;
        let mut h = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            for (r, amp) in hamiltonian_action(self.n, &self.params, b) {
                h[(r, b)] += amp;
            }
        }
        h
    }

    /// `max |H - H^T|` over both sectors.
    pub fn hermiticity_residual(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| (&s.block - s.block.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// `max |<T b'|H|T b> - <b'|H|b>|` for the one-site translation `T`.
    pub fn translation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in &self.sectors {
            for (c, &b) in s.basis.iter().enumerate() {
                let tb = self.local[self.translate(b)];
                for (r, &b2) in s.basis.iter().enumerate() {
                    let tb2 = self.local[self.translate(b2)];
                    worst = worst.max((s.block[(tb2, tb)] - s.block[(r, c)]).abs());
                }
            }
        }
        worst
    }

    fn translate(&self, b: usize) -> usize {
        let mask = (1usize << self.n) - 1;
        ((b << 1) | (b >> (self.n - 1))) & mask
    }

    /// Sorted spectrum of one parity sector (0 = even number of up spins).
    pub fn sector_spectrum(&self, sector: usize) -> &[f64] {
        &self.sectors[sector].eigen().0
    }

    /// Full sorted spectrum.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| s.eigen().0.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    fn embed(&self, sector: usize, v: impl Iterator<Item = C64>) -> Vec<C64> {
        let mut psi = vec![C64::from(0.0); 1 << self.n];
        for (&b, a) in self.sectors[sector].basis.iter().zip(v) {
            psi[b] = a;
        }
        psi
    }

    /// Ground state of the even sector: `(E0, |psi>)` in the full space.
    pub fn ground_state(&self) -> (f64, Vec<C64>) {
        let (values, vectors) = self.sectors[0].eigen();
        let psi = self.embed(0, vectors.column(0).iter().map(|&x| C64::from(x)));
        (values[0], psi)
    }

    /// `<psi| H |psi>` for a full-space state.
    pub fn energy(&self, psi: &[C64]) -> f64 {
        self.sectors
            .iter()
            .map(|s| {
                let part = DVector::from_iterator(s.basis.len(), s.basis.iter().map(|&b| psi[b]));
                let re = DVector::from_iterator(part.len(), part.iter().map(|a| a.re));
                let im = DVector::from_iterator(part.len(), part.iter().map(|a| a.im));
                re.dot(&(&s.block * &re)) + im.dot(&(&s.block * &im))
            })
            .sum()
    }

    /// Normalised Gibbs weights as `(weight, sector, level)`; at zero
    /// temperature only the even-sector ground state.
    fn ensemble(&self, t: Temperature) -> Result<Vec<(f64, usize, usize)>> {
        match t {
            Temperature::Zero => Ok(vec![(1.0, 0, 0)]),
            Temperature::Finite(t) => {
                if !(t > 0.0) {
                    return Err(Error::NegativeTemperature(t));
                }
                let e_min = self.spectrum()[0];
                let mut out = Vec::new();
                let mut z = 0.0;
                for (si, s) in self.sectors.iter().enumerate() {
                    for (k, &e) in s.eigen().0.iter().enumerate() {
                        let w = (-(e - e_min) / t).exp();
                        z += w;
                        if w >= WEIGHT_CUTOFF {
                            out.push((w, si, k));
                        }
                    }
                }
                for (w, _, _) in &mut out {
                    *w /= z;
                }
                Ok(out)
            }
        }
    }

    fn eigenstate(&self, sector: usize, level: usize) -> Vec<C64> {
        let vectors = &self.sectors[sector].eigen().1;
        self.embed(sector, vectors.column(level).iter().map(|&x| C64::from(x)))
    }

    /// Ensemble average of the bond moments of every bond after mapping each
    /// eigenstate through `map`; `energy(sector, level, psi)` gives the energy
    /// to average.
    fn observe(
        &self,
        t: Temperature,
        map: impl Fn(Vec<C64>) -> Vec<C64>,
        energy: impl Fn(usize, usize, &[C64]) -> f64,
    ) -> Result<EdObservables> {
        let mut bonds = vec![(TwoSiteState::default(), 0.0); self.n];
        let mut e_sum = 0.0;
        for (w, sector, level) in self.ensemble(t)? {
            let psi = map(self.eigenstate(sector, level));
            for (a, (acc, yx)) in bonds.iter_mut().enumerate() {
                let (s, cyx) = bond_moments(&psi, a, (a + 1) % self.n);
                acc.mz += w * s.mz;
                acc.cxx += w * s.cxx;
                acc.cyy += w * s.cyy;
                acc.czz += w * s.czz;
                acc.cxy += w * s.cxy;
                *yx += w * cyx;
            }
            e_sum += w * energy(sector, level, &psi);
        }
        let (state, cyx) = bonds[0];
        let translation_residual = bonds
            .iter()
            .map(|(b, _)| b.max_abs_diff(&state))
            .fold(0.0, f64::max);
        Ok(EdObservables {
            state,
            energy_per_site: e_sum / self.n as f64,
            translation_residual,
            xy_asymmetry: (state.cxy - cyx).abs(),
        })
    }

    /// Equilibrium moments and energy per site.
    pub fn thermal_observables(&self, t: Temperature) -> Result<EdObservables> {
        self.observe(
            t,
            |psi| psi,
            |sector, level, _| self.sectors[sector].eigen().0[level],
        )
    }

    /// `exp(-i H t) |psi>` through the cached eigenbasis.
    pub fn propagate(&self, psi: &[C64], time: f64) -> Vec<C64> {
        let mut out = vec![C64::from(0.0); psi.len()];
        for s in &self.sectors {
            let part: DVector<C64> =
                DVector::from_iterator(s.basis.len(), s.basis.iter().map(|&b| psi[b]));
            if part.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            let (values, vectors) = s.eigen();
            let v = vectors.map(C64::from);
            let mut coef = v.transpose() * part;
            for (c, &e) in coef.iter_mut().zip(values) {
                *c *= C64::from_polar(1.0, -e * time);
            }
            let back = v * coef;
            for (&b, a) in s.basis.iter().zip(back.iter()) {
                out[b] = *a;
            }
        }
        out
    }

    fn check_partner(&self, post: &DenseSpinSystem) -> Result<()> {
        if post.n == self.n {
            Ok(())
        } else {
            Err(Error::param("sys1", "systems must have the same size"))
        }
    }

    /// Moments after evolving the state of `self` under `post` for `time`.
    /// The reported energy is that of `post`, which must be conserved.
    pub fn evolve_observables(
        &self,
        post: &DenseSpinSystem,
        t: Temperature,
        time: f64,
    ) -> Result<EdObservables> {
        self.check_partner(post)?;
        self.observe(
            t,
            |psi| post.propagate(&psi, time),
            |_, _, psi| post.energy(psi),
        )
    }

    /// Energy per site absorbed during a square pulse `self -> post -> self` of length `tau`.
    pub fn pulse_energy(&self, post: &DenseSpinSystem, t: Temperature, tau: f64) -> Result<f64> {
        self.check_partner(post)?;
        let mut delta = 0.0;
        for (w, sector, level) in self.ensemble(t)? {
            let psi = post.propagate(&self.eigenstate(sector, level), tau);
            delta += w * (self.energy(&psi) - self.sectors[sector].eigen().0[level]);
        }
        Ok(delta / self.n as f64)
    }

    /// Fermion contractions `(<c_0^† c_0>, <c_0^† c_1>, <c_0 c_1>)` of a pure state.
    pub fn contractions(&self, psi: &[C64]) -> (f64, C64, C64) {
        let c0 = annihilate(psi, 0);
        let c1 = annihilate(psi, 1);
        let n0 = inner(&c0, &c0).re;
        let g1 = inner(&c0, &c1);
        let cc = annihilate(&c1, 0);
        (n0, g1, inner(psi, &cc))
    }

    /// `(<c_p^† c_p>, <c_{-p} c_p>)` of a pure state, with `c_p = N^{-1/2} sum_j e^{i p j} c_j`.
    pub fn momentum_expectations(&self, psi: &[C64], phi: f64) -> (f64, C64) {
        let ann: Vec<Vec<C64>> = (0..self.n).map(|j| annihilate(psi, j)).collect();
        let nf = self.n as f64;
        let mut n_p = C64::from(0.0);
        let mut kappa = C64::from(0.0);
        for i in 0..self.n {
            for j in 0..self.n {
                let phase = C64::from_polar(1.0, phi * (j as f64 - i as f64));
                n_p += phase * inner(&ann[i], &ann[j]);
                let cicj = annihilate(&ann[j], i);
                kappa += phase * inner(psi, &cicj);
            }
        }
        (n_p.re / nf, kappa / nf)
    }
}

/// Nonzero matrix elements `<r|H|b>` of the Hamiltonian applied to basis state `b`.
fn hamiltonian_action(n: usize, p: &ModelParams, b: usize) -> Vec<(usize, f64)> {
    let j = p.j();
    let g = p.gamma();
    let mut out = Vec::with_capacity(n + 1);
    let mut diag = 0.0;
    for site in 0..n {
        let next = (site + 1) % n;
        diag += 0.5 * j * p.h() * if b >> site & 1 == 1 { 1.0 } else { -1.0 };
        let xx = 0.5 * j * 0.5 * (1.0 + g);
        let yy = 0.5 * j * 0.5 * (1.0 - g);
        let (r, ax) = apply_pauli_string(&[(site, Pauli::X), (next, Pauli::X)], b);
        let (_, ay) = apply_pauli_string(&[(site, Pauli::Y), (next, Pauli::Y)], b);
        out.push((r, xx * ax.re + yy * ay.re));
    }
    out.push((b, diag));
    out
}

/// `<psi| P |psi>` for a Pauli product.
pub fn pauli_expectation(psi: &[C64], ops: &[(usize, Pauli)]) -> C64 {
    let mut acc = C64::from(0.0);
    for (b, &a) in psi.iter().enumerate() {
        if a == C64::from(0.0) {
            continue;
        }
        let (r, phase) = apply_pauli_string(ops, b);
        acc += psi[r].conj() * phase * a;
    }
    acc
}

/// Bond moments and `C^{yx}` of a pure state.
fn bond_moments(psi: &[C64], a: usize, b: usize) -> (TwoSiteState, f64) {
    use Pauli::*;
    let e = |ops: &[(usize, Pauli)]| pauli_expectation(psi, ops).re;
    let s = TwoSiteState {
        mz: e(&[(a, Z)]),
        cxx: e(&[(a, X), (b, X)]),
        cyy: e(&[(a, Y), (b, Y)]),
        czz: e(&[(a, Z), (b, Z)]),
        cxy: e(&[(a, X), (b, Y)]),
    };
    (s, e(&[(a, Y), (b, X)]))
}

/// `c_j |psi>` with `c_j = prod_{l<j} (-sigma^z_l) sigma^-_j`.
fn annihilate(psi: &[C64], j: usize) -> Vec<C64> {
    let mut out = vec![C64::from(0.0); psi.len()];
    for (b, &a) in psi.iter().enumerate() {
        if b >> j & 1 == 0 || a == C64::from(0.0) {
            continue;
        }
        let below = (b & ((1 << j) - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
        out[b ^ (1 << j)] += a * sign;
    }
    out
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sys(n: usize, gamma: f64, h: f64) -> DenseSpinSystem {
        DenseSpinSystem::build(n, ModelParams::unit(gamma, h).unwrap()).unwrap()
    }

    fn kron_chain(ops: &[DMatrix<C64>]) -> DMatrix<C64> {
        ops.iter()
            .skip(1)
            .fold(ops[0].clone(), |acc, m| acc.kronecker(m))
    }

    #[test]
    fn size_limits() {
        let p = ModelParams::unit(0.8, 0.5).unwrap();
        assert!(matches!(
            DenseSpinSystem::build(13, p),
            Err(Error::TooLarge(13))
        ));
        assert!(matches!(
            DenseSpinSystem::build(1, p),
            Err(Error::TooLarge(1))
        ));
    }

    #[test]
    fn matches_explicit_tensor_products() {
        // Pauli matrices in the bit basis: index 1 = up. Site j is bit j, so
        // the leftmost factor of the Kronecker product is the highest site.
        let c = |x: f64, y: f64| C64::new(x, y);
        let id = DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        let x = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        // rows/cols ordered (down, up): sigma_y |up> = i |down>
        let y = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)]);
        let z = DMatrix::from_row_slice(2, 2, &[c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        for n in [2usize, 3, 4] {
            let (gamma, h) = (0.7, 0.35);
            let s = sys(n, gamma, h);
            let site_op = |op: &DMatrix<C64>, j: usize| {
                let ops: Vec<DMatrix<C64>> = (0..n)
                    .rev()
                    .map(|k| if k == j { op.clone() } else { id.clone() })
                    .collect();
                kron_chain(&ops)
            };
            let dim = 1 << n;
            let mut expect = DMatrix::<C64>::zeros(dim, dim);
            for j in 0..n {
                let k = (j + 1) % n;
                expect += (site_op(&x, j) * site_op(&x, k)) * c(0.25 * (1.0 + gamma), 0.0);
                expect += (site_op(&y, j) * site_op(&y, k)) * c(0.25 * (1.0 - gamma), 0.0);
                expect += site_op(&z, j) * c(0.5 * h, 0.0);
            }
            let got = s.hamiltonian().map(C64::from);
            assert!((got - expect).norm() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn two_site_exchange_spectrum_is_symmetric() {
        let s = sys(2, 1.0, 0.0);
        let ev = s.spectrum();
        for (a, b) in ev.iter().zip(ev.iter().rev()) {
            assert_abs_diff_eq!(*a, -*b, epsilon = 1e-12);
        }
    }

    #[test]
    fn symmetries() {
        let s = sys(6, 0.8, 0.4);
        let h = s.hamiltonian();
        assert!(s.hermiticity_residual() < 1e-12);
        assert!(s.translation_residual() < 1e-12);
        let dim = h.nrows();
        let parity = DMatrix::from_diagonal(&DVector::from_fn(dim, |b, _| {
            if b.count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        }));
        let sz = DMatrix::from_diagonal(&DVector::from_fn(dim, |b, _| {
            2.0 * b.count_ones() as f64 - 6.0
        }));
        assert!((&h * &parity - &parity * &h).amax() < 1e-12);
        assert!((&h * &sz - &sz * &h).amax() > 1e-3);
    }

    #[test]
    fn hot_state_is_uncorrelated() {
        let s = sys(6, 0.8, 0.5);
        let o = s.thermal_observables(Temperature::Finite(1e6)).unwrap();
        assert!(o.state.max_abs_diff(&TwoSiteState::default()) < 1e-5);
    }

    #[test]
    fn equilibrium_properties() {
        let s = sys(8, 0.8, 0.5);
        for t in [Temperature::Zero, Temperature::Finite(0.3)] {
            let o = s.thermal_observables(t).unwrap();
            assert!(o.state.cxy.abs() < 1e-12);
            assert!(o.translation_residual < 1e-10, "{t:?} {o:?}");
        }
    }

    #[test]
    fn evolution_identities() {
        let s0 = sys(6, 0.8, 0.2);
        let s1 = sys(6, 0.8, 1.0);
        for t in [Temperature::Zero, Temperature::Finite(0.4)] {
            let eq = s0.thermal_observables(t).unwrap();
            let start = s0.evolve_observables(&s1, t, 0.0).unwrap();
            assert!(start.state.max_abs_diff(&eq.state) < 1e-12);
            let same = s0.evolve_observables(&s0, t, 2.3).unwrap();
            assert!(same.state.max_abs_diff(&eq.state) < 1e-10);
            let e_start = start.energy_per_site;
            for time in [0.5, 1.7] {
                let o = s0.evolve_observables(&s1, t, time).unwrap();
                assert_abs_diff_eq!(o.energy_per_site, e_start, epsilon = 1e-10);
                assert!(o.translation_residual < 1e-10);
                assert!(o.xy_asymmetry < 1e-10);
            }
            assert!(s0.pulse_energy(&s1, t, 0.0).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn sector_eigendecompositions_are_accurate() {
        let s = sys(8, 0.8, 0.5);
        for sec in &s.sectors {
            let (v, u) = sec.eigen();
            let dim = u.nrows();
            assert!((u.transpose() * u - DMatrix::<f64>::identity(dim, dim)).amax() < 1e-12);
            let lam = DMatrix::from_diagonal(&DVector::from_vec(v.clone()));
            assert!((&sec.block * u - u * lam).amax() < 1e-11);
        }
    }
}
