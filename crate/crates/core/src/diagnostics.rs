//! Verdicts on trajectories: decay exponents, profile convergence, weighted
//! norms and an independent check of the Duhamel formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::omega;
use crate::error::{Error, Result};
use crate::solver::{run, RunConfig, SolverState, Trajectory};
use crate::spectral::{free_evolve, signed_index, SpectralField};

/// Exit-code contract of the `--assert` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub fitted_exponent: f64,
    pub fit_window: (f64, f64),
    /// RMS of the log–log residuals.
    pub residual: f64,
    pub samples_in_window: usize,
}

impl DecayReport {
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.fitted_exponent - target).abs() <= tol
    }
}

/// Least-squares slope of `log ‖u‖_∞` against `log t` over `window`.
pub fn fit_decay(times: &[f64], sup_norms: &[f64], window: (f64, f64)) -> Result<DecayReport> {
    if times.len() != sup_norms.len() {
        return Err(Error::InsufficientData(format!(
            "{} times but {} norms",
            times.len(),
            sup_norms.len()
        )));
    }
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(sup_norms)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(&t, &u)| (t, u))
        .collect();
    if pts.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} samples in [{lo}, {hi}], need at least 8",
            pts.len()
        )));
    }
    if let Some((t, u)) = pts.iter().find(|(t, u)| !(*u > 0.0) || !(*t > 0.0)) {
        return Err(Error::InsufficientData(format!(
            "nonpositive sample ({t}, {u})"
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all samples at one time".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (icpt + slope * x);
            r * r
        })
        .sum();
    Ok(DecayReport {
        times: pts.iter().map(|p| p.0).collect(),
        sup_norms: pts.iter().map(|p| p.1).collect(),
        fitted_exponent: slope,
        fit_window: window,
        residual: (ss / n).sqrt(),
        samples_in_window: pts.len(),
    })
}

/// `‖e^{−itω(D)} f‖_{L^∞}` at each time.
pub fn free_decay_series(f0: &SpectralField, times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| free_evolve(f0, t).sup_norm())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterReport {
    pub dyadic_times: Vec<f64>,
    /// `‖f̂(2t) − f̂(t)‖_{H¹_ξ}`.
    pub h1_differences: Vec<f64>,
    /// `‖f(2t) − f(t)‖_{H^s_x}`.
    pub hs_differences: Vec<f64>,
    pub s: f64,
    /// `d_i / d_{i+1}` for the H¹_ξ differences.
    pub contraction_ratios: Vec<f64>,
    /// `−` slope of `log d_i` against `log t_i`.
    pub empirical_alpha: f64,
    /// Largest `‖f(t_{i+2}) − f(t_i)‖ − (d_i + d_{i+1})` in H¹_ξ (nonpositive).
    pub triangle_excess: f64,
    pub ratio_threshold: f64,
    pub strictly_decreasing: bool,
    pub pass: bool,
}

/// Dyadic profile differences between `base_t·2^i`, `i = 0..=levels`.
pub fn scatter_cauchy(
    traj: &Trajectory,
    base_t: f64,
    levels: usize,
    s: f64,
    ratio_threshold: f64,
) -> Result<ScatterReport> {
    if levels == 0 {
        return Err(Error::InsufficientSpan("levels must be at least 1".into()));
    }
    let times: Vec<f64> = (0..=levels).map(|i| base_t * 2f64.powi(i as i32)).collect();
    let profiles = times
        .iter()
        .map(|&t| {
            traj.snapshot_at(t).map(|s| &s.profile).ok_or_else(|| {
                Error::InsufficientSpan(format!(
                    "no snapshot at t = {t}; run covers [1, {}]",
                    traj.last().t
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut h1 = Vec::with_capacity(levels);
    let mut hs = Vec::with_capacity(levels);
    for w in profiles.windows(2) {
        let d = w[1].sub(w[0])?;
        h1.push(d.h1_xi());
        hs.push(d.hs(s));
    }
    let mut triangle_excess = f64::NEG_INFINITY;
    for i in 0..levels.saturating_sub(1) {
        let skip = profiles[i + 2].sub(profiles[i])?.h1_xi();
        triangle_excess = triangle_excess.max(skip - (h1[i] + h1[i + 1]));
    }
    let contraction_ratios: Vec<f64> = h1.windows(2).map(|w| w[0] / w[1]).collect();
    let strictly_decreasing = h1.windows(2).all(|w| w[1] < w[0]);
    let empirical_alpha = if levels >= 2 && h1.iter().all(|&d| d > 0.0) {
        let ts: Vec<f64> = times[..levels].to_vec();
        -loglog_slope(&ts, &h1)
    } else {
        f64::NAN
    };
    let pass = strictly_decreasing && contraction_ratios.iter().all(|&r| r >= ratio_threshold);
    Ok(ScatterReport {
        dyadic_times: times,
        h1_differences: h1,
        hs_differences: hs,
        s,
        contraction_ratios,
        empirical_alpha,
        triangle_excess,
        ratio_threshold,
        strictly_decreasing,
        pass,
    })
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapNorms {
    pub t: f64,
    /// `‖f̂‖_{L^∞_ξ}`.
    pub linf_fourier: f64,
    /// `‖x f‖_{L²_x}`.
    pub weighted_l2: f64,
    /// `‖f‖_{H^s_x}`.
    pub hs: f64,
}

pub fn bootstrap_norms(state: &SolverState, s: f64) -> BootstrapNorms {
    let f = &state.profile;
    BootstrapNorms {
        t: state.t,
        linf_fourier: f.fourier_sup(),
        weighted_l2: f.weighted_l2(),
        hs: f.hs(s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub series: Vec<BootstrapNorms>,
    /// Largest `norm(t) / norm(1)` over the three norms and all snapshots.
    pub max_growth: f64,
    pub growth_bound: f64,
    pub pass: bool,
}

pub fn bootstrap_report(traj: &Trajectory, s: f64, growth_bound: f64) -> BootstrapReport {
    let series: Vec<BootstrapNorms> = traj
        .snapshots
        .iter()
        .map(|snap| {
            bootstrap_norms(
                &SolverState {
                    t: snap.t,
                    profile: snap.profile.clone(),
                },
                s,
            )
        })
        .collect();
    let b0 = series[0];
    let growth = |v: f64, v0: f64| {
        if v0 > 0.0 {
            v / v0
        } else if v == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    };
    let max_growth = series
        .iter()
        .map(|b| {
            growth(b.linf_fourier, b0.linf_fourier)
                .max(growth(b.weighted_l2, b0.weighted_l2))
                .max(growth(b.hs, b0.hs))
        })
        .fold(0.0, f64::max);
    BootstrapReport {
        series,
        max_growth,
        growth_bound,
        pass: max_growth <= growth_bound,
    }
}

/// Modes at which the Duhamel formula is checked.
pub const DUHAMEL_MODES: [i64; 5] = [1, 2, 3, 4, 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub t_check: f64,
    pub coarse_n: usize,
    pub modes: Vec<i64>,
    /// `|quadrature − f̂(t_check)| / |f̂(t_check)|` per mode.
    pub residuals: Vec<f64>,
    /// `|integral term| / |f̂(t_check)|` per mode.
    pub integral_size: Vec<f64>,
    pub max_residual: f64,
    pub time_nodes: usize,
}

pub fn duhamel_residual(traj: &Trajectory, t_check: f64, coarse_n: usize) -> Result<f64> {
    Ok(duhamel_check(traj, t_check, coarse_n, 1)?.max_residual)
}

/// Evaluate
///
/// ```text
/// f̂(1, ξ) − i ω(ξ) ∫_1^t Σ_{η₁..η₄} e^{−iτφ} f̂(η₁)…f̂(η₅) dτ
/// ```
///
/// by brute force over all mode 4-tuples of the coarse grid (no transforms),
/// trapezoid in `τ` over every `stride`-th snapshot. The lower limit is the
/// earliest node, which is `t = 1` when `stride` divides the node count.
pub fn duhamel_check(
    traj: &Trajectory,
    t_check: f64,
    coarse_n: usize,
    stride: usize,
) -> Result<DuhamelReport> {
    if coarse_n > 32 {
        return Err(Error::CostGuard(coarse_n));
    }
    let grid = traj.grid();
    if coarse_n < 16 || !coarse_n.is_power_of_two() || coarse_n > grid.n() {
        return Err(Error::InvalidGrid(format!(
            "coarse_n = {coarse_n} must be a power of two in [16, {}]",
            grid.n()
        )));
    }
    if stride == 0 {
        return Err(Error::InsufficientData("stride must be at least 1".into()));
    }
    // every stride-th snapshot counted back from t_check
    let mut nodes: Vec<_> = traj
        .snapshots
        .iter()
        .filter(|s| s.t <= t_check + 1e-9 * t_check)
        .rev()
        .step_by(stride)
        .collect();
    nodes.reverse();
    let last = nodes
        .last()
        .ok_or_else(|| Error::InsufficientSpan("empty trajectory".into()))?;
    if (last.t - t_check).abs() > 1e-9 * t_check || nodes.len() < 2 {
        return Err(Error::InsufficientSpan(format!(
            "no snapshot grid reaching t = {t_check} with stride {stride}"
        )));
    }

    let half = coarse_n as i64 / 2 - 1;
    let base = 2.0 * PI / grid.length();
    let n = grid.n();
    let idx = |m: i64| -> usize { m.rem_euclid(n as i64) as usize };
    let w = |m: i64| omega(base * m as f64);
    let modes: Vec<i64> = DUHAMEL_MODES
        .iter()
        .copied()
        .filter(|&m| m <= half)
        .collect();

    // integrand value at each node for each checked mode
    let integrand: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|snap| {
            let tau = snap.t;
            // g_m = e^{−iτω_m} f̂_m on the retained coarse modes
            let g: Vec<Complex64> = (-half..=half)
                .map(|m| snap.profile.coeffs[idx(m)] * Complex64::from_polar(1.0, -tau * w(m)))
                .collect();
            let at = |m: i64| g[(m + half) as usize];
            modes
                .iter()
                .map(|&m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m1 in -half..=half {
                        let g1 = at(m1);
                        for m2 in -half..=half {
                            let g12 = g1 * at(m2);
                            for m3 in -half..=half {
                                let g123 = g12 * at(m3);
                                let rest = m - m1 - m2 - m3;
                                let lo = (rest - half).max(-half);
                                let hi = (rest + half).min(half);
                                let mut inner = Complex64::new(0.0, 0.0);
                                for m4 in lo..=hi {
                                    inner += at(m4) * at(rest - m4);
                                }
                                acc += g123 * inner;
                            }
                        }
                    }
                    Complex64::new(0.0, -w(m)) * Complex64::from_polar(1.0, tau * w(m)) * acc
                })
                .collect()
        })
        .collect();

    let first = nodes[0];
    let mut residuals = Vec::with_capacity(modes.len());
    let mut integral_size = Vec::with_capacity(modes.len());
    for (k, &m) in modes.iter().enumerate() {
        let mut integral = Complex64::new(0.0, 0.0);
        for j in 1..nodes.len() {
            let h = nodes[j].t - nodes[j - 1].t;
            integral += (integrand[j][k] + integrand[j - 1][k]) * (0.5 * h);
        }
        let predicted = first.profile.coeffs[idx(m)] + integral;
        let stored = last.profile.coeffs[idx(m)];
        let scale = stored.norm();
        if scale == 0.0 {
            residuals.push((predicted - stored).norm());
            integral_size.push(integral.norm());
        } else {
            residuals.push((predicted - stored).norm() / scale);
            integral_size.push(integral.norm() / scale);
        }
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(DuhamelReport {
        t_check,
        coarse_n,
        modes,
        residuals,
        integral_size,
        max_residual,
        time_nodes: nodes.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    /// `max_m |f̂_dt(t_end) − f̂_{dt/2}(t_end)|` for consecutive step sizes.
    pub differences: Vec<f64>,
    pub orders: Vec<f64>,
    /// Smallest observed order.
    pub observed_order: f64,
}

/// Richardson self-convergence: the final profile at step sizes
/// `dt, dt/2, …` and the order implied by successive differences.
pub fn self_convergence(base: &RunConfig, dts: &[f64]) -> Result<ConvergenceReport> {
    if dts.len() < 3 {
        return Err(Error::InsufficientData(
            "need at least three step sizes".into(),
        ));
    }
    let finals = dts
        .iter()
        .map(|&dt| {
            let cfg = RunConfig {
                dt,
                snapshot_stride: usize::MAX / 2,
                ..base.clone()
            };
            run(&cfg).map(|t| t.last().profile.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = finals
        .windows(2)
        .map(|w| {
            w[0].coeffs
                .iter()
                .zip(&w[1].coeffs)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let orders: Vec<f64> = differences
        .windows(2)
        .zip(dts.windows(2))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let observed_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConvergenceReport {
        dts: dts.to_vec(),
        differences,
        orders,
        observed_order,
    })
}

/// Direct quintuple convolution of retained modes, `O(n⁴)` per output mode.
pub fn direct_quintic(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let half = n as i64 / 2 - 1;
    let at = |m: i64| coeffs[m.rem_euclid(n as i64) as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, slot) in out.iter_mut().enumerate() {
        let m = signed_index(j, n);
        if m.abs() > half {
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for m1 in -half..=half {
            for m2 in -half..=half {
                for m3 in -half..=half {
                    let rest = m - m1 - m2 - m3;
                    let p = at(m1) * at(m2) * at(m3);
                    for m4 in (rest - half).max(-half)..=(rest + half).min(half) {
                        acc += p * at(m4) * at(rest - m4);
                    }
                }
            }
        }
        *slot = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = (0..40).map(|i| 20.0 + 10.0 * i as f64).collect();
        let u: Vec<f64> = t.iter().map(|t| 0.3 * t.powf(-1.0 / 3.0)).collect();
        let r = fit_decay(&t, &u, (20.0, 400.0)).unwrap();
        assert_abs_diff_eq!(r.fitted_exponent, -1.0 / 3.0, epsilon = 1e-10);
        assert!(r.residual < 1e-12);
        assert_eq!(r.samples_in_window, 39);
    }

    #[test]
    fn fit_needs_eight_samples() {
        let t: Vec<f64> = (1..=7).map(f64::from).collect();
        let u = vec![1.0; 7];
        assert!(matches!(
            fit_decay(&t, &u, (0.0, 10.0)),
            Err(Error::InsufficientData(_))
        ));
        let t: Vec<f64> = (1..=9).map(f64::from).collect();
        let mut u = vec![1.0; 9];
        u[3] = 0.0;
        assert!(fit_decay(&t, &u, (0.0, 10.0)).is_err());
    }

    #[test]
    fn verdict_codes() {
        assert_eq!(Verdict::Pass.exit_code(), 0);
        assert_eq!(Verdict::Fail.exit_code(), 2);
        assert_eq!(Verdict::Inconclusive.exit_code(), 3);
    }

    #[test]
    fn cost_guard() {
        let cfg = RunConfig {
            n: 64,
            length: 64.0,
            x_min: Some(-32.0),
            t_end: 2.0,
            ..RunConfig::default()
        };
        let traj = run(&cfg).unwrap();
        assert!(matches!(
            duhamel_residual(&traj, 2.0, 64),
            Err(Error::CostGuard(64))
        ));
    }
}
