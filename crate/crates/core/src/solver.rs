//! Pseudospectral integration of the profile equation
//!
//! ```text
//! ∂_t f̂(t, ξ) = −i ω(ξ) e^{itω(ξ)} (u⁵)^(t, ξ),    û = e^{−itω} f̂,
//! ```
//!
//! with classical RK4 in time and the quintic product evaluated on a
//! zero-padded grid. The linear flow is factored out exactly, so a free
//! solution has a constant profile.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::dispersion::omega;
use crate::error::{Error, Result};
use crate::snapshot::Snapshot;
use crate::spectral::{boundary_ratio, free_evolve, make_grid_at, Grid, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub length: f64,
    /// Left end of the periodic box; `−length/4` when absent.
    pub x_min: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub amplitude: f64,
    pub width: f64,
    pub snapshot_stride: usize,
    pub dealias_factor: usize,
    pub nonlinear: bool,
    /// Abort when the edge layers exceed this fraction of the peak.
    pub boundary_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            length: 800.0,
            x_min: None,
            dt: 0.1,
            t_end: 200.0,
            amplitude: 0.05,
            width: 4.0,
            snapshot_stride: 10,
            dealias_factor: 3,
            nonlinear: true,
            boundary_tol: 1e-8,
        }
    }
}

impl RunConfig {
    pub fn x_min(&self) -> f64 {
        self.x_min.unwrap_or(-self.length / 4.0)
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - 1.0) / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.dt <= 1.0) {
            return bad(format!("dt = {} exceeds the stability limit 1", self.dt));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return bad(format!(
                "amplitude = {} must be nonnegative",
                self.amplitude
            ));
        }
        if !(self.width > 0.0) {
            return bad(format!("width = {} must be positive", self.width));
        }
        if self.dealias_factor < 3 {
            return bad(format!(
                "dealias_factor = {} must be at least 3",
                self.dealias_factor
            ));
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be at least 1".into());
        }
        if !(self.t_end >= 1.0) {
            return bad(format!("t_end = {} must be at least 1", self.t_end));
        }
        let span = self.t_end - 1.0;
        if (self.steps() as f64 * self.dt - span).abs() > 1e-9 * self.t_end {
            return bad(format!(
                "t_end - 1 = {span} is not a multiple of dt = {}",
                self.dt
            ));
        }
        if !(self.boundary_tol > 0.0) {
            return bad(format!(
                "boundary_tol = {} must be positive",
                self.boundary_tol
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid_at(self.n, self.length, self.x_min())
    }

    /// Profile at `t = 1` of the datum `u(1) = ε e^{−x²/σ²}`, Nyquist mode
    /// removed.
    pub fn initial_profile(&self, grid: &Arc<Grid>) -> SpectralField {
        let (eps, w) = (self.amplitude, self.width);
        let mut u0 = SpectralField::from_fn(grid, |x| eps * (-(x * x) / (w * w)).exp());
        u0.coeffs[grid.n() / 2] = Complex64::new(0.0, 0.0);
        free_evolve(&u0, -1.0)
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub profile: SpectralField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriple {
    pub mass: f64,
    pub h1_momentum: f64,
    pub hamiltonian: f64,
}

impl InvariantTriple {
    /// Largest relative change of the three functionals.
    pub fn max_rel_drift(&self, reference: &InvariantTriple) -> f64 {
        let rel = |a: f64, b: f64| {
            if b == 0.0 {
                a.abs()
            } else {
                ((a - b) / b).abs()
            }
        };
        rel(self.mass, reference.mass)
            .max(rel(self.h1_momentum, reference.h1_momentum))
            .max(rel(self.hamiltonian, reference.hamiltonian))
    }
}

/// Time stepper with precomputed symbols and padded transforms.
pub struct Solver {
    grid: Arc<Grid>,
    padded: usize,
    pad_forward: Arc<dyn Fft<f64>>,
    pad_inverse: Arc<dyn Fft<f64>>,
    omega: Vec<f64>,
    nonlinear: bool,
}

impl Solver {
    pub fn new(grid: &Arc<Grid>, dealias_factor: usize, nonlinear: bool) -> Result<Self> {
        if dealias_factor < 3 {
            return Err(Error::InvalidConfig(format!(
                "dealias_factor = {dealias_factor} must be at least 3"
            )));
        }
        let padded = dealias_factor * grid.n();
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid: Arc::clone(grid),
            padded,
            pad_forward: planner.plan_fft_forward(padded),
            pad_inverse: planner.plan_fft_inverse(padded),
            omega: grid.wavenumbers().iter().map(|&k| omega(k)).collect(),
            nonlinear,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Embed the retained modes `|m| < n/2` in the padded spectrum and
    /// synthesize the real field on the fine grid.
    fn padded_field(&self, c: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n();
        let h = n / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded];
        buf[..h].copy_from_slice(&c[..h]);
        buf[self.padded - h + 1..].copy_from_slice(&c[h + 1..]);
        self.pad_inverse.process(&mut buf);
        buf.iter().map(|z| z.re).collect()
    }

    /// Coefficients of `u⁵` on the retained modes, Nyquist zeroed.
    pub fn dealiased_quintic(&self, c: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let h = n / 2;
        let u = self.padded_field(c);
        let mut buf: Vec<Complex64> = u
            .iter()
            .map(|&v| {
                let v2 = v * v;
                Complex64::new(v2 * v2 * v, 0.0)
            })
            .collect();
        self.pad_forward.process(&mut buf);
        let scale = 1.0 / self.padded as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..h {
            out[m] = buf[m] * scale;
        }
        for m in h + 1..n {
            out[m] = buf[self.padded - n + m] * scale;
        }
        out
    }

    /// `û = e^{−itω} f̂`.
    pub fn physical_coeffs(&self, t: f64, f: &[Complex64]) -> Vec<Complex64> {
        f.iter()
            .zip(&self.omega)
            .map(|(c, &w)| c * Complex64::from_polar(1.0, -t * w))
            .collect()
    }

    /// `∂_t f̂` at time `t`.
    pub fn rhs(&self, t: f64, f: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); f.len()];
        }
        let q = self.dealiased_quintic(&self.physical_coeffs(t, f));
        q.iter()
            .zip(&self.omega)
            .map(|(q, &w)| Complex64::new(0.0, -w) * Complex64::from_polar(1.0, t * w) * q)
            .collect()
    }

    /// One RK4 step.
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        let f = &state.profile.coeffs;
        let t = state.t;
        let axpy = |a: &[Complex64], s: f64, b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + y * s).collect()
        };
        let k1 = self.rhs(t, f);
        let k2 = self.rhs(t + 0.5 * dt, &axpy(f, 0.5 * dt, &k1));
        let k3 = self.rhs(t + 0.5 * dt, &axpy(f, 0.5 * dt, &k2));
        let k4 = self.rhs(t + dt, &axpy(f, dt, &k3));
        let next: Vec<Complex64> = (0..f.len())
            .map(|j| f[j] + (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0))
            .collect();
        let before: f64 = f.iter().map(|c| c.norm_sqr()).sum();
        let after: f64 = next.iter().map(|c| c.norm_sqr()).sum();
        if before > 0.0 {
            let growth = (after / before).sqrt();
            if !(growth <= 1.1) {
                return Err(Error::StabilityViolation { t: t + dt, growth });
            }
        }
        Ok(SolverState {
            t: t + dt,
            profile: SpectralField::from_coeffs(&self.grid, next)?,
        })
    }

    pub fn invariants(&self, state: &SolverState) -> InvariantTriple {
        let l = self.grid.length();
        let c = self.physical_coeffs(state.t, &state.profile.coeffs);
        let mut quad = 0.0;
        let mut h1 = 0.0;
        for (z, &k) in c.iter().zip(self.grid.wavenumbers()) {
            let a = z.norm_sqr();
            quad += a;
            h1 += (1.0 + k * k) * a;
        }
        // u⁶ has modes below 3n, so the padded-grid mean is exact
        let u = self.padded_field(&c);
        let sextic = u.iter().map(|v| v.powi(6)).sum::<f64>() / self.padded as f64;
        InvariantTriple {
            mass: l * c[0].re,
            h1_momentum: l * h1,
            hamiltonian: l * (0.5 * quad + sextic / 6.0),
        }
    }
}

/// One row of the invariant series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub mass: f64,
    pub h1_momentum: f64,
    pub hamiltonian: f64,
    pub sup_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: RunConfig,
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<SeriesRow>,
    /// Largest `max|Im u| / max|u|` seen at snapshot times.
    pub max_imag_ratio: f64,
    /// Largest edge-to-peak ratio seen at snapshot times.
    pub max_boundary_ratio: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.snapshots[0].profile.grid
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a trajectory holds at least the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.series.iter().map(|r| r.t).collect()
    }

    pub fn sup_norms(&self) -> Vec<f64> {
        self.series.iter().map(|r| r.sup_norm).collect()
    }

    pub fn initial_invariants(&self) -> InvariantTriple {
        let r = &self.series[0];
        InvariantTriple {
            mass: r.mass,
            h1_momentum: r.h1_momentum,
            hamiltonian: r.hamiltonian,
        }
    }

    /// Largest relative drift of each functional over the run.
    pub fn invariant_drift(&self) -> InvariantTriple {
        let r0 = &self.series[0];
        let rel = |a: f64, b: f64| {
            if b == 0.0 {
                a.abs()
            } else {
                ((a - b) / b).abs()
            }
        };
        let mut d = InvariantTriple {
            mass: 0.0,
            h1_momentum: 0.0,
            hamiltonian: 0.0,
        };
        for r in &self.series {
            d.mass = d.mass.max(rel(r.mass, r0.mass));
            d.h1_momentum = d.h1_momentum.max(rel(r.h1_momentum, r0.h1_momentum));
            d.hamiltonian = d.hamiltonian.max(rel(r.hamiltonian, r0.hamiltonian));
        }
        d
    }

    pub fn write_series_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.series {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run(config: &RunConfig) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.grid()?;
    let f0 = config.initial_profile(&grid);
    run_with_initial(config, f0)
}

/// Integrate from `t = 1` with the given profile; grid parameters of
/// `config` are ignored in favour of the profile's grid.
pub fn run_with_initial(config: &RunConfig, initial: SpectralField) -> Result<Trajectory> {
    config.validate()?;
    let grid = Arc::clone(&initial.grid);
    let solver = Solver::new(&grid, config.dealias_factor, config.nonlinear)?;
    let mut state = SolverState {
        t: 1.0,
        profile: initial,
    };
    let steps = config.steps();
    let mut traj = Trajectory {
        config: config.clone(),
        snapshots: Vec::with_capacity(steps / config.snapshot_stride + 1),
        series: Vec::with_capacity(steps + 1),
        max_imag_ratio: 0.0,
        max_boundary_ratio: 0.0,
    };
    record(&solver, &state, &mut traj, true, config.boundary_tol)?;
    for k in 1..=steps {
        state = solver.step(&state, config.dt)?;
        // pin the clock to the lattice 1 + k·dt
        state.t = 1.0 + k as f64 * config.dt;
        let snap = k % config.snapshot_stride == 0 || k == steps;
        record(&solver, &state, &mut traj, snap, config.boundary_tol)?;
    }
    Ok(traj)
}

fn record(
    solver: &Solver,
    state: &SolverState,
    traj: &mut Trajectory,
    snapshot: bool,
    boundary_tol: f64,
) -> Result<()> {
    let inv = solver.invariants(state);
    let u = free_field(solver, state);
    let peak = u.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    traj.series.push(SeriesRow {
        t: state.t,
        mass: inv.mass,
        h1_momentum: inv.h1_momentum,
        hamiltonian: inv.hamiltonian,
        sup_norm: peak,
    });
    if snapshot {
        if peak > 0.0 {
            let imag = u.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            traj.max_imag_ratio = traj.max_imag_ratio.max(imag / peak);
            let re: Vec<f64> = u.iter().map(|z| z.re).collect();
            let ratio = boundary_ratio(&re);
            traj.max_boundary_ratio = traj.max_boundary_ratio.max(ratio);
            if ratio > boundary_tol {
                return Err(Error::BoundaryContamination { t: state.t, ratio });
            }
        }
        traj.snapshots.push(Snapshot {
            t: state.t,
            profile: state.profile.clone(),
        });
    }
    Ok(())
}

fn free_field(solver: &Solver, state: &SolverState) -> Vec<Complex64> {
    let c = solver.physical_coeffs(state.t, &state.profile.coeffs);
    solver.grid().inverse(&c)
}

/// The physical field `u(t)` of a profile.
pub fn physical_field(profile: &SpectralField, t: f64) -> SpectralField {
    free_evolve(profile, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn small_config() -> RunConfig {
        RunConfig {
            n: 256,
            length: 64.0,
            x_min: Some(-32.0),
            dt: 0.05,
            t_end: 2.0,
            amplitude: 0.3,
            width: 2.0,
            snapshot_stride: 5,
            ..RunConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert_eq!(RunConfig::default().steps(), 1990);
        let bad = |c: RunConfig| c.validate().is_err();
        assert!(bad(RunConfig {
            dealias_factor: 2,
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            dt: 0.0,
            ..RunConfig::default()
        }));
        assert!(bad(RunConfig {
            t_end: 1.25,
            dt: 0.1,
            ..RunConfig::default()
        }));
    }

    #[test]
    fn quintic_of_constant() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let s = Solver::new(&g, 3, true).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 16];
        c[0] = Complex64::new(0.7, 0.0);
        let q = s.dealiased_quintic(&c);
        assert_abs_diff_eq!(q[0].re, 0.7f64.powi(5), epsilon = 1e-15);
        assert!(q[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn quintic_of_cosine() {
        // cos⁵θ = (10cosθ + 5cos3θ + cos5θ)/16
        let g = make_grid(32, 2.0 * PI).unwrap();
        let s = Solver::new(&g, 3, true).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); 32];
        c[1] = Complex64::new(0.5, 0.0);
        c[31] = Complex64::new(0.5, 0.0);
        let q = s.dealiased_quintic(&c);
        let expect = |m: usize| match m {
            1 | 31 => 10.0 / 32.0,
            3 | 29 => 5.0 / 32.0,
            5 | 27 => 1.0 / 32.0,
            _ => 0.0,
        };
        for (m, z) in q.iter().enumerate() {
            assert_abs_diff_eq!(z.re, expect(m), epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_field_has_zero_rhs_and_invariants() {
        let g = make_grid(64, 10.0).unwrap();
        let s = Solver::new(&g, 3, true).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 64];
        assert!(s.rhs(1.3, &z).iter().all(|c| c.norm() == 0.0));
        let inv = s.invariants(&SolverState {
            t: 1.0,
            profile: SpectralField::zeros(&g),
        });
        assert_eq!(
            inv,
            InvariantTriple {
                mass: 0.0,
                h1_momentum: 0.0,
                hamiltonian: 0.0
            }
        );
    }

    #[test]
    fn cosine_invariants() {
        let l = 50.0;
        let a = 0.3;
        let g = make_grid_at(128, l, 0.0).unwrap();
        let s = Solver::new(&g, 3, true).unwrap();
        let f = SpectralField::from_fn(&g, |x| a * (2.0 * PI * x / l).cos());
        let inv = s.invariants(&SolverState { t: 0.0, profile: f });
        let kk = 2.0 * PI / l;
        assert_abs_diff_eq!(inv.mass, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            inv.h1_momentum,
            a * a * l / 2.0 * (1.0 + kk * kk),
            epsilon = 1e-13
        );
        // ∫cos⁶ = 5L/16
        let ham = a * a * l / 4.0 + a.powi(6) * 5.0 * l / 16.0 / 6.0;
        assert_abs_diff_eq!(inv.hamiltonian, ham, epsilon = 1e-13);
    }

    #[test]
    fn rhs_is_quintic() {
        let c = small_config();
        let g = c.grid().unwrap();
        let s = Solver::new(&g, 3, true).unwrap();
        let f = c.initial_profile(&g);
        let r1 = s.rhs(1.7, &f.coeffs);
        let doubled: Vec<Complex64> = f.coeffs.iter().map(|z| z * 2.0).collect();
        let r2 = s.rhs(1.7, &doubled);
        let n1: f64 = r1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n2: f64 = r2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!((n2 / n1).log2(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_mode_keeps_profile() {
        let mut c = small_config();
        c.nonlinear = false;
        let traj = run(&c).unwrap();
        assert_eq!(traj.last().profile.coeffs, traj.snapshots[0].profile.coeffs);
        let mut c = small_config();
        c.amplitude = 0.0;
        let traj = run(&c).unwrap();
        assert!(traj.last().profile.coeffs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn short_run_conserves() {
        let traj = run(&small_config()).unwrap();
        let d = traj.invariant_drift();
        assert!(
            d.mass < 1e-10 && d.h1_momentum < 1e-10 && d.hamiltonian < 1e-10,
            "{d:?}"
        );
        assert!(traj.max_imag_ratio < 1e-12);
        assert_eq!(traj.snapshots.len(), 5);
        assert_eq!(traj.series.len(), 21);
        assert!(traj.snapshot_at(1.5).is_some());
        assert!(traj.snapshot_at(1.55).is_none());
        assert!(traj.last().profile.is_hermitian(1e-13));
    }

    #[test]
    fn contamination_is_reported() {
        let mut c = small_config();
        c.width = 12.0;
        assert!(matches!(run(&c), Err(Error::BoundaryContamination { .. })));
    }

    #[test]
    fn blow_up_trips_the_growth_guard() {
        let mut c = small_config();
        c.amplitude = 40.0;
        c.dt = 0.5;
        c.t_end = 3.0;
        assert!(matches!(run(&c), Err(Error::StabilityViolation { .. })));
    }
}
