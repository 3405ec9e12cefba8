//! Maximal dynamical responses, their temperature scaling, and detection of
//! the quantum critical region from where the scaled response leaves its
//! zero-temperature value.
//!
//! For a quantity `Q` the maximal response `dQ_max(T)` is the largest
//! `|Q(t) - Q(0)|` over the time window: the pulse length for the absorbed
//! energy, the time after a sudden quench for the logarithmic negativity and
//! the mutual information. `T*` is the lowest temperature at which
//! `|dQ_max(T) - dQ_max(0)| / dQ_max(0)` reaches the tolerance `eta`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{SuddenQuench, TwoSiteState};
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, Temperature};
use crate::observables::{log_negativity, mutual_information_closed_form, PulseAbsorption};
use crate::quadrature::MomentumGrid;

/// Coarse-scan maxima below this are treated as "no dynamics".
pub const FLAT_THRESHOLD: f64 = 1e-14;
/// Most negative eigenvalue tolerated in any state visited by a scan.
pub const SCAN_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "&'static str")]
pub enum QuantityKind {
    AbsorbedEnergy,
    LogNegativity,
    MutualInformation,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 3] = [
        Self::AbsorbedEnergy,
        Self::LogNegativity,
        Self::MutualInformation,
    ];

    /// Short name used in file names and CSV columns.
    pub fn short(self) -> &'static str {
        match self {
            Self::AbsorbedEnergy => "energy",
            Self::LogNegativity => "log_negativity",
            Self::MutualInformation => "mutual_information",
        }
    }
}

impl From<QuantityKind> for &'static str {
    fn from(q: QuantityKind) -> Self {
        q.short()
    }
}

impl TryFrom<String> for QuantityKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "energy" | "e" | "absorbed_energy" => Ok(Self::AbsorbedEnergy),
            "log_negativity" | "l" | "negativity" => Ok(Self::LogNegativity),
            "mutual_information" | "i" | "mi" => Ok(Self::MutualInformation),
            _ => Err(Error::Config {
                field: "quantity".into(),
                reason: format!("unknown quantity `{s}` (expected energy, log-negativity or mutual-information)"),
            }),
        }
    }
}

/// Time window and resolution of the maximisation over `t` or `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSearchConfig {
    pub t_max: f64,
    pub dt: f64,
    pub refine_tol: f64,
}

impl Default for TimeSearchConfig {
    fn default() -> Self {
        Self {
            t_max: 20.0,
            dt: 0.005,
            refine_tol: 1e-8,
        }
    }
}

impl TimeSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt < self.t_max && self.t_max.is_finite()) {
            return Err(Error::param(
                "time_search",
                format!(
                    "need 0 < dt < t_max, got dt={} t_max={}",
                    self.dt, self.t_max
                ),
            ));
        }
        if !(self.refine_tol > 0.0) {
            return Err(Error::param("refine_tol", "must be positive"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// Pre-computed evaluator of `Q(t) - Q(0)` for one parameter set.
enum Series {
    Energy(PulseAbsorption),
    Sudden {
        quench: SuddenQuench,
        q: QuantityKind,
        base: f64,
    },
}

/// Extremes of the density-matrix checks over every state the scans visit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hygiene {
    pub states: u64,
    pub min_eigenvalue: f64,
    pub max_trace_error: f64,
}

impl Default for Hygiene {
    fn default() -> Self {
        Self {
            states: 0,
            min_eigenvalue: f64::INFINITY,
            max_trace_error: 0.0,
        }
    }
}

impl Hygiene {
    fn absorb(&mut self, other: &Hygiene) {
        self.states += other.states;
        self.min_eigenvalue = self.min_eigenvalue.min(other.min_eigenvalue);
        self.max_trace_error = self.max_trace_error.max(other.max_trace_error);
    }
}

fn hygiene_store() -> &'static Mutex<Hygiene> {
    static STORE: OnceLock<Mutex<Hygiene>> = OnceLock::new();
    STORE.get_or_init(Default::default)
}

/// Hygiene accumulated by this process so far.
pub fn hygiene() -> Hygiene {
    *hygiene_store().lock().unwrap()
}

fn state_quantity(q: QuantityKind, s: &TwoSiteState, seen: &mut Hygiene) -> Result<f64> {
    let spectrum = s.x_spectrum();
    let min = spectrum.into_iter().fold(f64::INFINITY, f64::min);
    seen.states += 1;
    seen.min_eigenvalue = seen.min_eigenvalue.min(min);
    seen.max_trace_error = seen
        .max_trace_error
        .max((spectrum.iter().sum::<f64>() - 1.0).abs());
    if !(min >= -SCAN_PSD_TOL) {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    match q {
        QuantityKind::LogNegativity => Ok(log_negativity(s)),
        QuantityKind::MutualInformation => mutual_information_closed_form(s),
        QuantityKind::AbsorbedEnergy => {
            unreachable!("energy is not a function of the two-site state")
        }
    }
}

/// Runs `f` with a local tally that is merged into the global one afterwards.
fn tallied<T>(f: impl FnOnce(&mut Hygiene) -> Result<T>) -> Result<T> {
    let mut seen = Hygiene::default();
    let out = f(&mut seen);
    hygiene_store().lock().unwrap().absorb(&seen);
    out
}

impl Series {
    fn new(
        q: QuantityKind,
        h0: f64,
        h1: f64,
        gamma: f64,
        t: Temperature,
        grid: &MomentumGrid,
    ) -> Result<Self> {
        match q {
            QuantityKind::AbsorbedEnergy => {
                Ok(Self::Energy(PulseAbsorption::new(h0, h1, gamma, t, grid)?))
            }
            _ => {
                let quench = SuddenQuench::new(h0, h1, gamma, t, grid)?;
                let base = tallied(|seen| state_quantity(q, &quench.state_at(0.0)?, seen))?;
                Ok(Self::Sudden { quench, q, base })
            }
        }
    }

    fn at(&self, t: f64) -> Result<f64> {
        match self {
            Self::Energy(p) => Ok(p.at(t)),
            Self::Sudden { quench, q, base } => {
                tallied(|seen| Ok(state_quantity(*q, &quench.state_at(t)?, seen)? - base))
            }
        }
    }

    fn scan(&self, dt: f64, steps: usize) -> Result<Vec<f64>> {
        match self {
            Self::Energy(p) => Ok(p.scan(dt, steps)),
            Self::Sudden { quench, q, base } => tallied(|seen| {
                quench
                    .scan(dt, steps)?
                    .iter()
                    .map(|s| Ok(state_quantity(*q, s, seen)? - base))
                    .collect()
            }),
        }
    }
}

/// `Q(t) - Q(0)` on the coarse time grid `t = k dt`, `k = 0..=t_max/dt`.
pub fn response_series(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    t: Temperature,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    Series::new(q, h0, h1, gamma, t, grid)?.scan(cfg.dt, cfg.steps())
}

/// Maximises `f` on `[a, b]` by golden-section search.
fn golden_max(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `max_t |Q(t) - Q(0)|` with its maximiser.
pub fn max_response_at(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    t: Temperature,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    ModelParams::unit(gamma, h0)?;
    ModelParams::unit(gamma, h1)?;
    let series = Series::new(q, h0, h1, gamma, t, grid)?;
    let coarse = series.scan(cfg.dt, cfg.steps())?;
    let (k, best) =
        coarse
            .iter()
            .map(|x| x.abs())
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, x)| if x > acc.1 { (i, x) } else { acc },
            );
    if !best.is_finite() {
        return Err(Error::NonFinite("response scan"));
    }
    if best < FLAT_THRESHOLD {
        return Err(Error::FlatResponse { max: best });
    }
    let lo = k.saturating_sub(1) as f64 * cfg.dt;
    let hi = ((k + 1) as f64 * cfg.dt).min(cfg.t_max);
    let (arg, refined) = golden_max(|x| series.at(x).map(f64::abs), lo, hi, cfg.refine_tol)?;
    Ok(if refined >= best {
        (refined, arg)
    } else {
        (best, k as f64 * cfg.dt)
    })
}

/// `dQ_max(T) = max_t |Q(T, t) - Q(T, 0)|`.
pub fn max_response(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    t: Temperature,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<f64> {
    max_response_at(q, h0, h1, gamma, t, cfg, grid).map(|(v, _)| v)
}

/// Like [`max_response`] at `T > 0`, where a vanished response is a value rather than an error.
fn thermal_response(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    t: Temperature,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<f64> {
    match max_response(q, h0, h1, gamma, t, cfg, grid) {
        Err(Error::FlatResponse { max }) => Ok(max),
        other => other,
    }
}

type CacheKey = (QuantityKind, [u64; 6], usize, u64);

fn cache_key(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> CacheKey {
    let first = grid.nodes().first().copied().unwrap_or(0.0);
    (
        q,
        [h0, h1, gamma, cfg.t_max, cfg.dt, cfg.refine_tol].map(f64::to_bits),
        grid.len(),
        first.to_bits(),
    )
}

/// `dQ_max(T = 0)`, computed once per parameter set and grid.
pub fn zero_temperature_response(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = cache_key(q, h0, h1, gamma, cfg, grid);
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let v = max_response(q, h0, h1, gamma, Temperature::Zero, cfg, grid)?;
    cache.lock().unwrap().insert(key, v);
    Ok(v)
}

/// `dQ_max(T) / dQ_max(0)`.
pub fn scaled_response(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    t: Temperature,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<f64> {
    let denom = zero_temperature_response(q, h0, h1, gamma, cfg, grid)?;
    if !(denom > FLAT_THRESHOLD) {
        return Err(Error::ZeroDenominator(denom));
    }
    match t {
        Temperature::Zero => Ok(1.0),
        Temperature::Finite(_) => Ok(thermal_response(q, h0, h1, gamma, t, cfg, grid)? / denom),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseSample {
    pub temperature: f64,
    pub delta_max: f64,
    pub scaled: f64,
}

/// Scaled response over a temperature grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseCurve {
    pub quantity: QuantityKind,
    pub h0: f64,
    pub h1: f64,
    pub gamma: f64,
    pub samples: Vec<ResponseSample>,
}

/// Evaluates the curve at each temperature (0 means the ground state), in parallel, keeping input order.
pub fn response_curve(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    temperatures: &[f64],
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<ResponseCurve> {
    let denom = zero_temperature_response(q, h0, h1, gamma, cfg, grid)?;
    if !(denom > FLAT_THRESHOLD) {
        return Err(Error::ZeroDenominator(denom));
    }
    let samples = temperatures
        .par_iter()
        .map(|&temp| {
            let t = Temperature::new(temp)?;
            let delta_max = match t {
                Temperature::Zero => denom,
                Temperature::Finite(_) => thermal_response(q, h0, h1, gamma, t, cfg, grid)?,
            };
            let scaled = if t == Temperature::Zero {
                1.0
            } else {
                delta_max / denom
            };
            Ok(ResponseSample {
                temperature: temp,
                delta_max,
                scaled,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseCurve {
        quantity: q,
        h0,
        h1,
        gamma,
        samples,
    })
}

/// Settings of the `T*` search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionConfig {
    pub eta: f64,
    pub t_hi: f64,
    /// Points of the bracketing scan on `(0, t_hi]`.
    pub scan_points: usize,
    /// Bisection stops when the bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            eta: 1e-6,
            t_hi: 0.1,
            scan_points: 32,
            tolerance: 1e-7,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::param(
                "eta",
                format!("must be positive, got {}", self.eta),
            ));
        }
        if !(self.t_hi > 0.0 && self.t_hi.is_finite()) {
            return Err(Error::param(
                "t_hi",
                format!("must be positive, got {}", self.t_hi),
            ));
        }
        if self.scan_points < 2 {
            return Err(Error::param("scan_points", "need at least 2"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be positive"));
        }
        Ok(())
    }
}

/// Outcome of [`detect_tstar`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TStar {
    /// First crossing of `eta`, refined by bisection.
    Crossing { t_star: f64 },
    /// No crossing up to `t_hi`.
    Saturated { t_star: f64 },
    /// The deviation falls back below `eta` inside the scan window after the
    /// first crossing. `t_star` is still the refined first crossing; `recross`
    /// is the scan interval where it drops back.
    NonMonotone { t_star: f64, recross: (f64, f64) },
}

impl TStar {
    pub fn value(&self) -> f64 {
        match *self {
            TStar::Crossing { t_star }
            | TStar::Saturated { t_star }
            | TStar::NonMonotone { t_star, .. } => t_star,
        }
    }
}

/// `|dQ_max(T) - dQ_max(0)| / dQ_max(0)`.
pub fn deviation(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    temperature: f64,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<f64> {
    let denom = zero_temperature_response(q, h0, h1, gamma, cfg, grid)?;
    if !(denom > FLAT_THRESHOLD) {
        return Err(Error::ZeroDenominator(denom));
    }
    let t = Temperature::new(temperature)?;
    if t == Temperature::Zero {
        return Ok(0.0);
    }
    Ok((thermal_response(q, h0, h1, gamma, t, cfg, grid)? - denom).abs() / denom)
}

/// Lowest temperature in `(0, t_hi]` where the deviation reaches `eta`.
pub fn detect_tstar(
    q: QuantityKind,
    h0: f64,
    h1: f64,
    gamma: f64,
    det: &DetectionConfig,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<TStar> {
    det.validate()?;
    let n = det.scan_points;
    let temps: Vec<f64> = (1..=n).map(|i| det.t_hi * i as f64 / n as f64).collect();
    let dev = |t: f64| deviation(q, h0, h1, gamma, t, cfg, grid);
    let scan = temps.iter().map(|&t| dev(t)).collect::<Result<Vec<_>>>()?;
    let Some(first) = scan.iter().position(|&d| d >= det.eta) else {
        return Ok(TStar::Saturated { t_star: det.t_hi });
    };
    let recross = (first + 1..n)
        .find(|&i| scan[i] < det.eta)
        .map(|i| (temps[i - 1], temps[i]));
    let (mut lo, mut hi) = (
        if first == 0 { 0.0 } else { temps[first - 1] },
        temps[first],
    );
    while hi - lo > det.tolerance {
        let mid = 0.5 * (lo + hi);
        if dev(mid)? >= det.eta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    Ok(match recross {
        Some(recross) => TStar::NonMonotone { t_star, recross },
        None => TStar::Crossing { t_star },
    })
}

/// How `gamma` is chosen for each `h0` of a map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    Fixed(f64),
    /// `gamma = |1 - |h0||`, approaching the multicritical point at `h0 = 1`.
    Multicritical,
}

impl GammaMode {
    pub fn gamma(&self, h0: f64) -> f64 {
        match *self {
            GammaMode::Fixed(g) => g,
            GammaMode::Multicritical => (1.0 - h0.abs()).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Crossing,
    Saturated,
    NonMonotone,
    /// Crossing found, but `dQ_max(0)` is below [`SMALL_DENOMINATOR`].
    SmallDenominator,
    FlatResponse,
    Failed,
}

impl PointFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            PointFlag::Crossing => "crossing",
            PointFlag::Saturated => "saturated",
            PointFlag::NonMonotone => "non_monotone",
            PointFlag::SmallDenominator => "small_denominator",
            PointFlag::FlatResponse => "flat_response",
            PointFlag::Failed => "failed",
        }
    }
}

/// Zero-temperature responses below this are flagged.
pub const SMALL_DENOMINATOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub h0: f64,
    pub gamma: f64,
    pub t_star: Option<f64>,
    pub flag: PointFlag,
    pub recross: Option<(f64, f64)>,
    pub message: Option<String>,
}

impl BoundaryPoint {
    /// Whether the point has a genuine crossing inside the window.
    pub fn is_unsaturated(&self) -> bool {
        matches!(self.flag, PointFlag::Crossing | PointFlag::NonMonotone)
    }
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Range of `h0` covered by the fitted points.
    pub window: (f64, f64),
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((slope, my - slope * mx, r2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcrBoundary {
    pub quantity: QuantityKind,
    pub h1: f64,
    pub eta: f64,
    pub t_hi: f64,
    pub points: Vec<BoundaryPoint>,
    /// Fit of `T*` against `|h0 - 1|` over the unsaturated points.
    pub slope_fit: Option<LinearFit>,
    /// The same fit restricted to `h0 < 1` and to `h0 > 1`.
    pub left_fit: Option<LinearFit>,
    pub right_fit: Option<LinearFit>,
}

impl QcrBoundary {
    /// The unsaturated point with the smallest `T*`.
    pub fn minimum(&self) -> Option<&BoundaryPoint> {
        self.points
            .iter()
            .filter(|p| p.is_unsaturated())
            .min_by(|a, b| a.t_star.unwrap().total_cmp(&b.t_star.unwrap()))
    }
}

/// Least squares of `T*` against `|h0 - 1|`.
fn fit_points<'a>(points: impl Iterator<Item = &'a BoundaryPoint>) -> Option<LinearFit> {
    let fitted: Vec<&BoundaryPoint> = points.collect();
    let x: Vec<f64> = fitted.iter().map(|p| (p.h0 - 1.0).abs()).collect();
    let y: Vec<f64> = fitted.iter().map(|p| p.t_star.unwrap()).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y)?;
    let h0s = fitted.iter().map(|p| p.h0);
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
        n_points: x.len(),
        window: (
            h0s.clone().fold(f64::INFINITY, f64::min),
            h0s.fold(f64::NEG_INFINITY, f64::max),
        ),
    })
}

fn boundary_point(
    q: QuantityKind,
    h0: f64,
    mode: GammaMode,
    h1: f64,
    det: &DetectionConfig,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> BoundaryPoint {
    let gamma = mode.gamma(h0);
    let mut point = BoundaryPoint {
        h0,
        gamma,
        t_star: None,
        flag: PointFlag::Failed,
        recross: None,
        message: None,
    };
    let denom = match zero_temperature_response(q, h0, h1, gamma, cfg, grid) {
        Ok(d) => d,
        Err(e) => {
            point.flag = if matches!(e, Error::FlatResponse { .. }) {
                PointFlag::FlatResponse
            } else {
                PointFlag::Failed
            };
            point.message = Some(e.to_string());
            return point;
        }
    };
    match detect_tstar(q, h0, h1, gamma, det, cfg, grid) {
        Ok(TStar::Crossing { t_star }) => {
            point.t_star = Some(t_star);
            point.flag = if denom < SMALL_DENOMINATOR {
                PointFlag::SmallDenominator
            } else {
                PointFlag::Crossing
            };
        }
        Ok(TStar::Saturated { t_star }) => {
            point.t_star = Some(t_star);
            point.flag = PointFlag::Saturated;
        }
        Ok(TStar::NonMonotone { t_star, recross }) => {
            point.t_star = Some(t_star);
            point.flag = PointFlag::NonMonotone;
            point.recross = Some(recross);
        }
        Err(e) => {
            log::warn!("T* search failed for {q} at h0={h0}: {e}");
            point.flag = if matches!(e, Error::FlatResponse { .. }) {
                PointFlag::FlatResponse
            } else {
                PointFlag::Failed
            };
            point.message = Some(e.to_string());
        }
    }
    point
}

/// `T*` over a grid of initial fields. Per-point failures become flags.
pub fn map_qcr(
    q: QuantityKind,
    h0_grid: &[f64],
    mode: GammaMode,
    h1: f64,
    det: &DetectionConfig,
    cfg: &TimeSearchConfig,
    grid: &MomentumGrid,
) -> Result<QcrBoundary> {
    det.validate()?;
    cfg.validate()?;
    if let Some(bad) = h0_grid.iter().find(|h| !(**h > 0.0 && **h < 2.0)) {
        return Err(Error::param(
            "h0_grid",
            format!("values must lie in (0, 2), got {bad}"),
        ));
    }
    let points: Vec<BoundaryPoint> = h0_grid
        .par_iter()
        .map(|&h0| boundary_point(q, h0, mode, h1, det, cfg, grid))
        .collect();
    let slope_fit = fit_points(points.iter().filter(|p| p.is_unsaturated()));
    let left_fit = fit_points(points.iter().filter(|p| p.is_unsaturated() && p.h0 < 1.0));
    let right_fit = fit_points(points.iter().filter(|p| p.is_unsaturated() && p.h0 > 1.0));
    Ok(QcrBoundary {
        quantity: q,
        h1,
        eta: det.eta,
        t_hi: det.t_hi,
        points,
        slope_fit,
        left_fit,
        right_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::make_grid;

    fn fast() -> TimeSearchConfig {
        TimeSearchConfig {
            t_max: 6.0,
            dt: 0.01,
            refine_tol: 1e-9,
        }
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in QuantityKind::ALL {
            assert_eq!(q.short().parse::<QuantityKind>().unwrap(), q);
        }
        assert!("entropy".parse::<QuantityKind>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TimeSearchConfig {
            t_max: 1.0,
            dt: 2.0,
            refine_tol: 1e-8
        }
        .validate()
        .is_err());
        assert!(TimeSearchConfig::default().validate().is_ok());
        assert!(DetectionConfig {
            eta: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, f) = golden_max(|x| Ok(1.0 - (x - 0.3f64).powi(2)), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entanglement_melted_by_heat_scales_to_zero() {
        let g = make_grid(128).unwrap();
        let q = QuantityKind::LogNegativity;
        let hot = Temperature::Finite(1e3);
        assert!(matches!(
            max_response(q, 0.5, 1.0, 0.8, hot, &fast(), &g),
            Err(Error::FlatResponse { .. })
        ));
        assert_eq!(
            scaled_response(q, 0.5, 1.0, 0.8, hot, &fast(), &g).unwrap(),
            0.0
        );
        assert_eq!(deviation(q, 0.5, 1.0, 0.8, 1e3, &fast(), &g).unwrap(), 1.0);
    }

    #[test]
    fn no_quench_is_flat() {
        let g = make_grid(128).unwrap();
        for q in QuantityKind::ALL {
            let r = max_response(q, 0.6, 0.6, 0.8, Temperature::Zero, &fast(), &g);
            assert!(matches!(r, Err(Error::FlatResponse { .. })), "{q}: {r:?}");
        }
    }

    #[test]
    fn ground_state_response_is_positive_and_scaled_to_one() {
        let g = make_grid(256).unwrap();
        for q in QuantityKind::ALL {
            assert!(max_response(q, 0.2, 1.0, 0.8, Temperature::Zero, &fast(), &g).unwrap() > 0.0);
            assert_eq!(
                scaled_response(q, 0.2, 1.0, 0.8, Temperature::Zero, &fast(), &g).unwrap(),
                1.0
            );
        }
    }

    #[test]
    fn refinement_never_below_coarse_max() {
        let g = make_grid(256).unwrap();
        let cfg = fast();
        for q in QuantityKind::ALL {
            let series =
                response_series(q, 0.4, 1.0, 0.8, Temperature::Finite(0.05), &cfg, &g).unwrap();
            let coarse = series.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let fine = max_response(q, 0.4, 1.0, 0.8, Temperature::Finite(0.05), &cfg, &g).unwrap();
            assert!(
                fine >= coarse && fine - coarse < 1e-3 * coarse,
                "{q}: {fine} {coarse}"
            );
            assert!(series[0].abs() < 1e-14);
        }
    }

    #[test]
    fn linear_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = x.map(|v| 2.0 * v - 1.0);
        let (s, i, r2) = linear_fit(&x, &y).unwrap();
        assert!((s - 2.0).abs() < 1e-14 && (i + 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_none());
    }

    #[test]
    fn multicritical_gamma() {
        assert_eq!(GammaMode::Multicritical.gamma(0.5), 0.5);
        assert!((GammaMode::Multicritical.gamma(1.25) - 0.25).abs() < 1e-15);
        assert_eq!(GammaMode::Fixed(0.8).gamma(1.3), 0.8);
    }

    #[test]
    fn deep_ordered_point_saturates() {
        let g = make_grid(256).unwrap();
        let det = DetectionConfig {
            scan_points: 4,
            t_hi: 0.02,
            ..Default::default()
        };
        let t = detect_tstar(
            QuantityKind::AbsorbedEnergy,
            0.2,
            1.0,
            0.8,
            &det,
            &fast(),
            &g,
        )
        .unwrap();
        assert_eq!(t, TStar::Saturated { t_star: 0.02 });
    }
}
