//! Periodic Fourier grids, Littlewood–Paley multipliers and the free flow.
//!
//! Coefficients are normalized Fourier-series coefficients,
//! `u(x_j) = Σ_m c_m e^{iξ_m (x_j − x_min)}`, so `c = DFT(u)/n`. Continuum
//! quantities on `ℝ` are approximated by
//!
//! ```text
//! f̂(ξ_m) ≈ L·c_m,   ‖f‖²_{H^s} = L Σ ⟨ξ_m⟩^{2s} |c_m|²,   ‖∂_ξ f̂‖_{L²} = √(2π) ‖x f‖_{L²}.
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dispersion::omega;
use crate::error::{Error, Result};

/// Uniform periodic grid on `[x_min, x_min + length)`.
pub struct Grid {
    n: usize,
    length: f64,
    x_min: f64,
    dx: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("x_min", &self.x_min)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length && self.x_min == other.x_min
    }
}

/// Grid on `[−L/4, 3L/4)`.
pub fn make_grid(n: usize, length: f64) -> Result<Arc<Grid>> {
    make_grid_at(n, length, -length / 4.0)
}

pub fn make_grid_at(n: usize, length: f64, x_min: f64) -> Result<Arc<Grid>> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "n = {n} must be a power of two >= 16"
        )));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "length = {length} must be positive"
        )));
    }
    if !x_min.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "x_min = {x_min} must be finite"
        )));
    }
    let mut planner = FftPlanner::new();
    let base = 2.0 * PI / length;
    let wavenumbers = (0..n).map(|j| base * signed_index(j, n) as f64).collect();
    Ok(Arc::new(Grid {
        n,
        length,
        x_min,
        dx: length / n as f64,
        wavenumbers,
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    }))
}

/// Index `j` in standard FFT order mapped to its signed mode number.
pub fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + self.dx * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Normalized forward transform, `c = DFT(u)/n`.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Synthesis `u_j = Σ_m c_m e^{2πi mj/n}`.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Fourier coefficients of a real field on a shared grid.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub coeffs: Vec<Complex64>,
    pub grid: Arc<Grid>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n],
            grid: Arc::clone(grid),
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.n
            )));
        }
        Ok(Self {
            coeffs,
            grid: Arc::clone(grid),
        })
    }

    pub fn from_real(grid: &Arc<Grid>, values: &[f64]) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n
            )));
        }
        let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Ok(Self {
            coeffs: grid.forward(&buf),
            grid: Arc::clone(grid),
        })
    }

    /// Sample `f` at the grid points.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.n).map(|j| f(grid.x(j))).collect();
        Self::from_real(grid, &values).expect("length matches by construction")
    }

    /// Physical values including the (round-off) imaginary parts.
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.grid.inverse(&self.coeffs)
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.to_complex().iter().map(|z| z.re).collect()
    }

    /// Largest violation of `c_{−m} = conj(c_m)`, relative to `max |c|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for m in 1..n / 2 {
            worst = worst.max((self.coeffs[n - m] - self.coeffs[m].conj()).norm());
        }
        worst / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn norm_sqr_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖f‖_{L²}`.
    pub fn l2(&self) -> f64 {
        (self.grid.length * self.norm_sqr_sum()).sqrt()
    }

    /// `‖f‖_{H^s}` with weight `⟨ξ⟩^{2s}`.
    pub fn hs(&self, s: f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(&self.grid.wavenumbers)
            .map(|(c, &k)| (1.0 + k * k).powf(s) * c.norm_sqr())
            .sum();
        (self.grid.length * sum).sqrt()
    }

    /// `‖f̂‖_{L^∞_ξ}`.
    pub fn fourier_sup(&self) -> f64 {
        self.grid.length * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `‖x f‖_{L²_x}`, with `x` the physical coordinate.
    pub fn weighted_l2(&self) -> f64 {
        let g = &self.grid;
        let sum: f64 = self
            .to_complex()
            .iter()
            .enumerate()
            .map(|(j, z)| {
                let x = g.x(j);
                x * x * z.norm_sqr()
            })
            .sum();
        (g.dx * sum).sqrt()
    }

    /// `‖∂_ξ f̂‖_{L²_ξ}`.
    pub fn xi_derivative_l2(&self) -> f64 {
        (2.0 * PI).sqrt() * self.weighted_l2()
    }

    /// `‖f̂‖_{H¹_ξ} = (‖f̂‖² + ‖∂_ξ f̂‖²)^{1/2}`.
    pub fn h1_xi(&self) -> f64 {
        let l2 = self.l2();
        let w = self.weighted_l2();
        (2.0 * PI * (l2 * l2 + w * w)).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.to_complex()
            .iter()
            .map(|z| z.re.abs())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            grid: Arc::clone(&self.grid),
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.grid.check_same(&other.grid)?;
        Ok(SpectralField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            grid: Arc::clone(&self.grid),
        })
    }

    /// Multiply every coefficient by `m(ξ)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> SpectralField {
        SpectralField {
            coeffs: self
                .coeffs
                .iter()
                .zip(&self.grid.wavenumbers)
                .map(|(c, &k)| c * m(k))
                .collect(),
            grid: Arc::clone(&self.grid),
        }
    }

    /// Largest coefficient difference relative to `max |c|` of `self`.
    pub fn max_rel_diff(&self, other: &SpectralField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let diff = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(if scale == 0.0 { diff } else { diff / scale })
    }
}

/// `e^{−1/s}` for `s > 0`.
fn bump_edge(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Smooth even bump: 1 on `[−1, 1]`, 0 outside `(−2, 2)`.
pub fn lp_bump(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let up = bump_edge(2.0 - a);
    up / (up + bump_edge(a - 1.0))
}

/// `φ_{≤k}(ξ) = φ(ξ/2^k)`.
pub fn low_pass_multiplier(k: i32, xi: f64) -> f64 {
    lp_bump(xi / 2f64.powi(k))
}

/// `ψ_k(ξ) = φ(ξ/2^k) − φ(ξ/2^{k−1})`, supported in `2^{k−1} ≤ |ξ| ≤ 2^{k+1}`.
pub fn band_multiplier(k: i32, xi: f64) -> f64 {
    low_pass_multiplier(k, xi) - low_pass_multiplier(k - 1, xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandKind {
    Band,
    LowPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpBand {
    pub k: i32,
    pub kind: BandKind,
}

impl LpBand {
    pub fn band(k: i32) -> Self {
        Self {
            k,
            kind: BandKind::Band,
        }
    }

    pub fn low_pass(k: i32) -> Self {
        Self {
            k,
            kind: BandKind::LowPass,
        }
    }

    pub fn multiplier(&self, xi: f64) -> f64 {
        match self.kind {
            BandKind::Band => band_multiplier(self.k, xi),
            BandKind::LowPass => low_pass_multiplier(self.k, xi),
        }
    }

    /// Rejects bands lying entirely above the Nyquist wavenumber.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        let nyquist = grid.nyquist();
        if 2f64.powi(self.k - 1) >= nyquist {
            return Err(Error::BandOutOfRange { k: self.k, nyquist });
        }
        Ok(())
    }
}

/// Smallest `k` with `φ_{≤k} ≡ 1` on every grid wavenumber.
pub fn top_band(grid: &Grid) -> i32 {
    grid.nyquist().log2().ceil() as i32
}

pub fn lp_project(f: &SpectralField, band: LpBand) -> Result<SpectralField> {
    band.check(&f.grid)?;
    Ok(f.apply_multiplier(|xi| Complex64::new(band.multiplier(xi), 0.0)))
}

/// `f_{≤k0}` followed by the bands `k0 < k ≤ top_band`.
pub fn lp_decompose(f: &SpectralField, k0: i32) -> Result<Vec<(LpBand, SpectralField)>> {
    let top = top_band(&f.grid);
    let mut out = vec![(LpBand::low_pass(k0), lp_project(f, LpBand::low_pass(k0))?)];
    for k in k0 + 1..=top {
        out.push((LpBand::band(k), lp_project(f, LpBand::band(k))?));
    }
    Ok(out)
}

/// The free flow `e^{−itω(D)}` on coefficients.
pub fn free_evolve(f: &SpectralField, t: f64) -> SpectralField {
    f.apply_multiplier(|xi| Complex64::from_polar(1.0, -t * omega(xi)))
}

/// Rows of the frequency-localized decay table, from high to low frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// `2^k ≥ C_hi t^{1/9}`
    High,
    /// `8 ≤ 2^k < C_hi t^{1/9}`
    UpperMiddle,
    /// `1/2 ≤ 2^k < 8`
    Middle,
    /// `C_lo t^{−1/3} ≤ 2^k < 1/2`
    LowerMiddle,
    /// `2^k < C_lo t^{−1/3}`
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRegime {
    pub c_hi: f64,
    pub c_lo: f64,
    pub s: f64,
}

impl Default for DecayRegime {
    fn default() -> Self {
        Self {
            c_hi: 16.0,
            c_lo: 0.25,
            s: 8.0,
        }
    }
}

impl DecayRegime {
    pub fn classify(&self, k: i32, t: f64) -> Regime {
        let f = 2f64.powi(k);
        if f >= self.c_hi * t.powf(1.0 / 9.0) {
            Regime::High
        } else if f >= 8.0 {
            Regime::UpperMiddle
        } else if f >= 0.5 {
            Regime::Middle
        } else if f >= self.c_lo * t.powf(-1.0 / 3.0) {
            Regime::LowerMiddle
        } else {
            Regime::Low
        }
    }

    /// Right-hand side of the table with unit constant.
    pub fn bound(&self, k: i32, t: f64, hs: f64, fourier_sup: f64, dxi_k: f64) -> (Regime, f64) {
        let f = 2f64.powi(k);
        let regime = self.classify(k, t);
        let rhs = match regime {
            Regime::High => f.powf(-(self.s - 1.0)) * hs,
            Regime::UpperMiddle => {
                t.powf(-0.5) * f.powf(1.5) * fourier_sup + t.powf(-0.75) * f.powf(2.25) * dxi_k
            }
            Regime::Middle => t.powf(-1.0 / 3.0) * fourier_sup + t.powf(-0.5) * dxi_k,
            Regime::LowerMiddle => {
                t.powf(-0.5) * f.powf(-0.5) * fourier_sup + t.powf(-0.75) * f.powf(-0.75) * dxi_k
            }
            Regime::Low => f * fourier_sup,
        };
        (regime, rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub k: i32,
    pub t: f64,
    pub regime: Regime,
    pub measured: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRegimeReport {
    pub params: DecayRegime,
    pub rows: Vec<RegimeRow>,
    pub max_ratio: f64,
    /// Largest `max_t ratio / min_t ratio` within one band, over bands whose
    /// measured norm stays above `1e−6` of the overall peak.
    pub spread: f64,
    pub ratio_bound: f64,
    pub pass: bool,
}

/// Measured `‖u_k(t)‖_{L^∞}` of the free flow against the table's
/// right-hand side for every `(band, t)`; passes when all ratios stay below
/// `ratio_bound`.
pub fn decay_regime_report(
    f0: &SpectralField,
    times: &[f64],
    bands: &[i32],
    params: DecayRegime,
    ratio_bound: f64,
) -> Result<DecayRegimeReport> {
    if let Some(t) = times.iter().find(|&&t| !(t >= 1.0)) {
        return Err(Error::Domain(format!("times must be >= 1, got {t}")));
    }
    let hs = f0.hs(params.s);
    let fourier_sup = f0.fourier_sup();
    let mut rows = Vec::with_capacity(times.len() * bands.len());
    for &k in bands {
        let fk = lp_project(f0, LpBand::band(k))?;
        let dxi_k = fk.xi_derivative_l2();
        for &t in times {
            let measured = free_evolve(&fk, t).sup_norm();
            let (regime, rhs) = params.bound(k, t, hs, fourier_sup, dxi_k);
            rows.push(RegimeRow {
                k,
                t,
                regime,
                measured,
                rhs,
                ratio: if rhs > 0.0 { measured / rhs } else { 0.0 },
            });
        }
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let peak = rows.iter().map(|r| r.measured).fold(0.0, f64::max);
    let mut spread: f64 = 0.0;
    for &k in bands {
        let band: Vec<&RegimeRow> = rows.iter().filter(|r| r.k == k).collect();
        if band
            .iter()
            .all(|r| r.measured > 1e-6 * peak && r.ratio > 0.0)
        {
            let hi = band.iter().map(|r| r.ratio).fold(0.0, f64::max);
            let lo = band.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
            spread = spread.max(hi / lo);
        }
    }
    Ok(DecayRegimeReport {
        params,
        rows,
        max_ratio,
        spread,
        ratio_bound,
        pass: max_ratio.is_finite() && max_ratio <= ratio_bound,
    })
}

pub fn write_regime_csv<W: Write>(out: W, report: &DecayRegimeReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Peak of `|u|` in the two edge layers (each 1/32 of the box) relative to
/// the interior peak.
pub fn boundary_ratio(values: &[f64]) -> f64 {
    let n = values.len();
    let layer = (n / 32).max(1);
    let peak = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = values[..layer]
        .iter()
        .chain(&values[n - layer..])
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    edge / peak
}
