//! The acceptance suite behind `gbbm full-verify`.
//!
//! Twelve criteria, each with its tolerances pinned in [`tol`]. Quick mode
//! shrinks the two expensive knobs (nonlinear grid and the H-shape grid);
//! every tolerance is the same in both modes. Criteria 7 to 9 share one
//! nonlinear trajectory, computed on first use.

use std::fmt;
use std::sync::OnceLock;
use std::time::Instant;

use gbbm_core::diagnostics::{
    bootstrap_report, direct_quintic, duhamel_check, free_decay_series, self_convergence,
};
use gbbm_core::dispersion::{Mutation, SQRT3};
use gbbm_core::resonance::{
    classify_pair_with, enumerate_families, resonance_residuals, ScanOptions,
};
use gbbm_core::solver::Solver;
use gbbm_core::spectral::{band_multiplier, low_pass_multiplier, top_band};
use gbbm_core::{
    fit_decay, generalized_phase, lp_decompose, make_grid, reflect, remainder_study, run,
    sample_manifold, scatter_cauchy, solve_anomalous, verify_h_shape, CoeffPair, Error,
    ManifoldKind, RunConfig, SpectralField, TaylorModel, TaylorModelKind, Trajectory, Verdict,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Pass bars. Times are wall-clock limits.
pub mod tol {
    pub const CLASSIFY_SECONDS: f64 = 10.0;

    pub const ETA0_RANGE: (f64, f64) = (7.29, 7.39);
    pub const XI0_RANGE: (f64, f64) = (28.26, 28.36);
    pub const ANOMALOUS_RESIDUAL: f64 = 1e-10;
    pub const H_LIMIT: f64 = -0.5;
    pub const H_LIMIT_TOL: f64 = 1e-3;

    pub const SQRT3_ROOT: f64 = 1e-10;
    pub const SQRT3_WITNESS: f64 = 1e-9;

    pub const MANIFOLD_POINTS: usize = 1000;
    pub const MANIFOLD_RESIDUAL: f64 = 1e-10;

    pub const PARTITION: f64 = 1e-14;
    pub const RECONSTRUCTION: f64 = 1e-12;

    pub const DECAY_TARGET: f64 = -1.0 / 3.0;
    pub const LINEAR_DECAY_TOL: f64 = 0.05;
    pub const LINEAR_SECONDS: f64 = 60.0;
    pub const NONLINEAR_DECAY_TOL: f64 = 0.1;
    pub const NONLINEAR_SECONDS: f64 = 600.0;
    pub const BOOTSTRAP_GROWTH: f64 = 3.0;

    pub const DRIFT: f64 = 1e-6;

    pub const SCATTER_RATIO: f64 = 1.5;

    pub const DUHAMEL_FREE: f64 = 1e-14;
    pub const DUHAMEL_RELATIVE: f64 = 1e-6;

    pub const CONVERGENCE_ORDER: f64 = 3.8;
    pub const DEALIAS: f64 = 1e-12;

    /// Observed remainder ratio must reach `TAYLOR_SLACK · 2^{order+1}`.
    pub const TAYLOR_SLACK: f64 = 0.8;
    pub const SQRT3_COEFFS: f64 = 1e-12;
}

/// Sobolev index of the diagnostics norms.
pub const S: f64 = 8.0;
/// Seed of the random fields in criteria 5 and 11.
pub const SEED: u64 = 20_240_517;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quick,
    Thorough,
}

impl Mode {
    fn nonlinear_n(self) -> usize {
        match self {
            Mode::Quick => 2048,
            Mode::Thorough => 4096,
        }
    }

    fn h_grid(self) -> usize {
        match self {
            Mode::Quick => 20_000,
            Mode::Thorough => 1_000_000,
        }
    }

    pub fn describe(self) -> String {
        format!(
            "{:?}: nonlinear run n = {}, H-shape grid {} points; all other settings at full size",
            self,
            self.nonlinear_n(),
            self.h_grid()
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "resonance classification"),
    (2, "anomalous point"),
    (3, "sqrt3 resonances"),
    (4, "resonant manifolds"),
    (5, "Littlewood-Paley machinery"),
    (6, "linear decay"),
    (7, "nonlinear decay"),
    (8, "conservation"),
    (9, "scattering"),
    (10, "Duhamel oracle"),
    (11, "self-convergence"),
    (12, "Taylor-model orders"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        write!(
            f,
            "{tag} [{:>2}] {} ({:.2} s): {}",
            self.id, self.name, self.seconds, self.detail
        )
    }
}

/// 2 on any failure, else 3 on any inconclusive criterion, else 0.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.iter().any(|o| o.verdict == Verdict::Fail) {
        Verdict::Fail.exit_code()
    } else if outcomes.iter().any(|o| o.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive.exit_code()
    } else {
        Verdict::Pass.exit_code()
    }
}

type Check = (Verdict, String);

/// Truncation and resolution limits make a run inconclusive; anything else
/// is a failure.
fn from_error(e: Error) -> Check {
    let verdict = match e {
        Error::BoundaryContamination { .. }
        | Error::InsufficientData(_)
        | Error::InsufficientSpan(_)
        | Error::CostGuard(_) => Verdict::Inconclusive,
        _ => Verdict::Fail,
    };
    (verdict, format!("error: {e}"))
}

pub struct Suite {
    mode: Mode,
    mutation: Mutation,
    shared: OnceLock<std::result::Result<(Trajectory, f64), String>>,
}

impl Suite {
    pub fn new(mode: Mode) -> Self {
        Self::with_mutation(mode, Mutation::None)
    }

    #[doc(hidden)]
    pub fn with_mutation(mode: Mode, mutation: Mutation) -> Self {
        Self {
            mode,
            mutation,
            shared: OnceLock::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn run(&self, id: u8) -> Outcome {
        let name = CRITERIA
            .iter()
            .find(|(i, _)| *i == id)
            .map(|(_, n)| *n)
            .unwrap_or("unknown criterion");
        let start = Instant::now();
        let (verdict, detail) = gbbm_core::dispersion::mutation::with(self.mutation, || {
            let r = match id {
                1 => self.classification(),
                2 => self.anomalous(),
                3 => self.sqrt3(),
                4 => self.manifolds(),
                5 => self.littlewood_paley(),
                6 => self.linear_decay(),
                7 => self.nonlinear_decay(),
                8 => self.conservation(),
                9 => self.scattering(),
                10 => self.duhamel(),
                11 => self.convergence(),
                12 => self.taylor(),
                _ => return (Verdict::Inconclusive, format!("no criterion {id}")),
            };
            r.unwrap_or_else(from_error)
        });
        Outcome {
            id,
            name,
            verdict,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        CRITERIA.iter().map(|(id, _)| self.run(*id)).collect()
    }

    fn classification(&self) -> Result<Check, Error> {
        let start = Instant::now();
        let opts = ScanOptions::default();
        let mut disagreements = Vec::new();
        let pairs = CoeffPair::all();
        for &pair in &pairs {
            match classify_pair_with(pair, &opts) {
                Ok(_) => {}
                Err(e) => disagreements.push(format!("{pair}: {e}")),
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let pass = disagreements.is_empty() && secs <= tol::CLASSIFY_SECONDS;
        let mut detail = format!(
            "{} pairs, {} disagreements, {:.2} s (limit {} s)",
            pairs.len(),
            disagreements.len(),
            secs,
            tol::CLASSIFY_SECONDS
        );
        if let Some(first) = disagreements.first() {
            detail.push_str(&format!("; first: {first}"));
        }
        Ok((Verdict::from_pass(pass), detail))
    }

    fn anomalous(&self) -> Result<Check, Error> {
        let sol = solve_anomalous(1e-13)?;
        let pair = CoeffPair::new(4, -1)?;
        let phi = generalized_phase(pair, sol.eta0)?.abs();
        let constraint = (sol.xi0 - (4.0 * sol.eta0 - reflect(sol.eta0)?)).abs();
        let h = verify_h_shape(self.mode.h_grid())?;
        let inside = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
        let pass = inside(sol.eta0, tol::ETA0_RANGE)
            && inside(sol.xi0, tol::XI0_RANGE)
            && phi <= tol::ANOMALOUS_RESIDUAL
            && constraint <= tol::ANOMALOUS_RESIDUAL
            && h.h_at_2 > 0.0
            && h.sign_changes_2_100 == 1
            && (h.h_at_1e6 - tol::H_LIMIT).abs() <= tol::H_LIMIT_TOL;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "eta0 = {:.10}, xi0 = {:.10}, |Phi| = {:.1e}, constraint {:.1e} (tol {:.0e}); \
                 H(2) = {:.4}, sign changes on [2,100] = {}, H(1e6) = {:.6}",
                sol.eta0,
                sol.xi0,
                phi,
                constraint,
                tol::ANOMALOUS_RESIDUAL,
                h.h_at_2,
                h.sign_changes_2_100,
                h.h_at_1e6
            ),
        ))
    }

    fn sqrt3(&self) -> Result<Check, Error> {
        let families = enumerate_families();
        let mut worst_root: f64 = 0.0;
        let mut worst_witness: f64 = 0.0;
        let mut count = 0;
        let mut missing = Vec::new();
        for pair in CoeffPair::all() {
            if (pair.a() + pair.b()).abs() != 1 || pair.a().abs() + pair.b().abs() < 3 {
                continue;
            }
            count += 1;
            let class = classify_pair_with(pair, &ScanOptions::default())?;
            let Some(&root) = class
                .roots
                .iter()
                .min_by(|x, y| (*x - SQRT3).abs().total_cmp(&(*y - SQRT3).abs()))
            else {
                missing.push(pair.to_string());
                continue;
            };
            worst_root = worst_root.max((root - SQRT3).abs());
            let entry = families
                .entries
                .iter()
                .find(|e| e.pair == pair)
                .ok_or_else(|| Error::Domain(format!("no family for {pair}")))?;
            let (phi, grad) = resonance_residuals(&entry.witness.witness(root)?);
            worst_witness = worst_witness.max(phi).max(grad);
        }
        let pass = missing.is_empty()
            && count > 0
            && worst_root <= tol::SQRT3_ROOT
            && worst_witness <= tol::SQRT3_WITNESS;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "{count} pairs, max |root - sqrt3| = {worst_root:.1e} (tol {:.0e}), \
                 max witness residual = {worst_witness:.1e} (tol {:.0e}){}",
                tol::SQRT3_ROOT,
                tol::SQRT3_WITNESS,
                if missing.is_empty() {
                    String::new()
                } else {
                    format!("; no root for {}", missing.join(" "))
                }
            ),
        ))
    }

    fn manifolds(&self) -> Result<Check, Error> {
        let mut parts = Vec::new();
        let mut pass = true;
        for (kind, range) in [
            (ManifoldKind::Line, (-50.0, 50.0)),
            (ManifoldKind::Curve, (1.001, 1e3)),
        ] {
            let pts = sample_manifold(kind, range, tol::MANIFOLD_POINTS)?;
            let worst = pts
                .iter()
                .map(|p| {
                    let (a, b) = resonance_residuals(p);
                    a.max(b)
                })
                .fold(0.0_f64, f64::max);
            pass &= pts.len() == tol::MANIFOLD_POINTS && worst <= tol::MANIFOLD_RESIDUAL;
            parts.push(format!(
                "{kind:?} {} points max residual {worst:.1e}",
                pts.len()
            ));
        }
        Ok((
            Verdict::from_pass(pass),
            format!("{} (tol {:.0e})", parts.join(", "), tol::MANIFOLD_RESIDUAL),
        ))
    }

    fn littlewood_paley(&self) -> Result<Check, Error> {
        let (partition, reconstruction) = lp_defects(4096, 800.0, &[-6, -3, 0], SEED)?;
        let pass = partition <= tol::PARTITION && reconstruction <= tol::RECONSTRUCTION;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "partition defect {partition:.1e} (tol {:.0e}), reconstruction {reconstruction:.1e} (tol {:.0e})",
                tol::PARTITION,
                tol::RECONSTRUCTION
            ),
        ))
    }

    fn linear_decay(&self) -> Result<Check, Error> {
        let start = Instant::now();
        let grid = make_grid(4096, 800.0)?;
        let f0 = RunConfig::default().initial_profile(&grid);
        let times: Vec<f64> = (0..40).map(|i| 20.0 + 380.0 * i as f64 / 39.0).collect();
        let fit = fit_decay(&times, &free_decay_series(&f0, &times), (20.0, 400.0))?;
        let secs = start.elapsed().as_secs_f64();
        let pass =
            fit.within(tol::DECAY_TARGET, tol::LINEAR_DECAY_TOL) && secs <= tol::LINEAR_SECONDS;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "exponent {:.4} (target -1/3 +- {}), fit residual {:.1e}, {:.2} s (limit {} s)",
                fit.fitted_exponent,
                tol::LINEAR_DECAY_TOL,
                fit.residual,
                secs,
                tol::LINEAR_SECONDS
            ),
        ))
    }

    fn nonlinear_config(&self) -> RunConfig {
        RunConfig {
            n: self.mode.nonlinear_n(),
            ..RunConfig::default()
        }
    }

    fn trajectory(&self) -> Result<&(Trajectory, f64), Check> {
        self.shared
            .get_or_init(|| {
                let start = Instant::now();
                run(&self.nonlinear_config())
                    .map(|t| (t, start.elapsed().as_secs_f64()))
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| (Verdict::Inconclusive, format!("nonlinear run failed: {e}")))
    }

    fn nonlinear_decay(&self) -> Result<Check, Error> {
        let (traj, secs) = match self.trajectory() {
            Ok(t) => t,
            Err(c) => return Ok(c),
        };
        let fit = fit_decay(&traj.times(), &traj.sup_norms(), (20.0, 200.0))?;
        let boot = bootstrap_report(traj, S, tol::BOOTSTRAP_GROWTH);
        let pass = fit.within(tol::DECAY_TARGET, tol::NONLINEAR_DECAY_TOL)
            && boot.pass
            && *secs <= tol::NONLINEAR_SECONDS;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "n = {}, exponent {:.4} (target -1/3 +- {}), bootstrap growth {:.5} (bound {}), run {:.2} s (limit {} s)",
                traj.config.n,
                fit.fitted_exponent,
                tol::NONLINEAR_DECAY_TOL,
                boot.max_growth,
                tol::BOOTSTRAP_GROWTH,
                secs,
                tol::NONLINEAR_SECONDS
            ),
        ))
    }

    fn conservation(&self) -> Result<Check, Error> {
        let (traj, _) = match self.trajectory() {
            Ok(t) => t,
            Err(c) => return Ok(c),
        };
        let d = traj.invariant_drift();
        let pass = d.mass < tol::DRIFT && d.h1_momentum < tol::DRIFT && d.hamiltonian < tol::DRIFT;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "relative drift mass {:.1e}, h1_momentum {:.1e}, hamiltonian {:.1e} (tol {:.0e})",
                d.mass,
                d.h1_momentum,
                d.hamiltonian,
                tol::DRIFT
            ),
        ))
    }

    fn scattering(&self) -> Result<Check, Error> {
        let (traj, _) = match self.trajectory() {
            Ok(t) => t,
            Err(c) => return Ok(c),
        };
        let rep = scatter_cauchy(traj, 16.0, 3, S, tol::SCATTER_RATIO)?;
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        Ok((
            Verdict::from_pass(rep.pass),
            format!(
                "H1_xi differences [{}], ratios [{}] (need strictly decreasing and >= {}); \
                 H^{} differences [{}], empirical alpha {:.3}",
                list(&rep.h1_differences),
                rep.contraction_ratios
                    .iter()
                    .map(|x| format!("{x:.3}"))
                    .collect::<Vec<_>>()
                    .join(", "),
                tol::SCATTER_RATIO,
                rep.s,
                list(&rep.hs_differences),
                rep.empirical_alpha
            ),
        ))
    }

    fn duhamel(&self) -> Result<Check, Error> {
        let free = run(&duhamel_config(0.0))?;
        let free_res = gbbm_core::duhamel_residual(&free, 4.0, 32)?;
        let traj = run(&duhamel_config(0.05))?;
        let rep = duhamel_check(&traj, 4.0, 32, 1)?;
        let pass = free_res <= tol::DUHAMEL_FREE && rep.max_residual <= tol::DUHAMEL_RELATIVE;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "epsilon = 0 residual {free_res:.1e} (tol {:.0e}); epsilon = 0.05 max relative residual \
                 {:.2e} over modes {:?} (tol {:.0e})",
                tol::DUHAMEL_FREE,
                rep.max_residual,
                rep.modes,
                tol::DUHAMEL_RELATIVE
            ),
        ))
    }

    fn convergence(&self) -> Result<Check, Error> {
        let rep = self_convergence(&convergence_config(), &[0.2, 0.1, 0.05, 0.025])?;
        let grid = make_grid(16, 2.0 * std::f64::consts::PI)?;
        let solver = Solver::new(&grid, 3, true)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let mut c = vec![Complex64::new(0.0, 0.0); 16];
            c[0] = Complex64::new(rng.random_range(-0.5..0.5), 0.0);
            for m in 1..8 {
                let z = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                c[m] = z;
                c[16 - m] = z.conj();
            }
            let fast = solver.dealiased_quintic(&c);
            let slow = direct_quintic(&c);
            for (a, b) in fast.iter().zip(&slow) {
                worst = worst.max((a - b).norm() / b.norm().max(1.0));
            }
        }
        let pass = rep.observed_order >= tol::CONVERGENCE_ORDER && worst <= tol::DEALIAS;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "observed order {:.3} (need >= {}), dealiased vs direct convolution {worst:.1e} (tol {:.0e})",
                rep.observed_order,
                tol::CONVERGENCE_ORDER,
                tol::DEALIAS
            ),
        ))
    }

    fn taylor(&self) -> Result<Check, Error> {
        let eta0 = solve_anomalous(1e-13)?.eta0;
        let direction = [0.3, -0.7, 0.5, 0.9, -0.4];
        let cases: [(TaylorModelKind, f64); 4] = [
            (TaylorModelKind::Anomalous { eta0 }, 0.05),
            (TaylorModelKind::DegenerateOrigin, 0.05),
            ("sqrt3".parse()?, 0.05),
            ("line".parse()?, 0.5),
        ];
        let mut pass = true;
        let mut parts = Vec::new();
        for (kind, dev0) in cases {
            let model = TaylorModel::new(kind, 1.0)?;
            let study = remainder_study(&model, direction, dev0, 4)?;
            let floor = tol::TAYLOR_SLACK * 2f64.powi(model.order() as i32 + 1);
            let min = study.ratios.iter().copied().fold(f64::INFINITY, f64::min);
            pass &= min >= floor;
            parts.push(format!(
                "{} min ratio {min:.2} (floor {floor:.1})",
                study.kind
            ));
        }
        let mut coeff: f64 = 0.0;
        for bits in 0..32u32 {
            let s = |i: u32| if bits >> i & 1 == 1 { -1i8 } else { 1 };
            let Ok(signs) = gbbm_core::SignPattern::new([s(0), s(1), s(2), s(3)], s(4)) else {
                continue;
            };
            let m = TaylorModel::new(TaylorModelKind::NonDegenerateSqrt3 { signs }, 0.5)?;
            coeff = coeff
                .max(m.constant().abs())
                .max(m.linear().iter().fold(0.0, |a: f64, v| a.max(v.abs())))
                .max(
                    m.quadratic()
                        .iter()
                        .flatten()
                        .fold(0.0, |a: f64, v| a.max(v.abs())),
                );
        }
        pass &= coeff <= tol::SQRT3_COEFFS;
        Ok((
            Verdict::from_pass(pass),
            format!(
                "{}; sqrt3 low-order coefficients {coeff:.1e} (tol {:.0e})",
                parts.join(", "),
                tol::SQRT3_COEFFS
            ),
        ))
    }
}

/// Worst partition-of-unity defect over every grid wavenumber for low-pass
/// cutoffs `k0 ∈ [-8, 2]`, and worst relative reconstruction error of one
/// random field per entry of `k0s`.
pub fn lp_defects(n: usize, length: f64, k0s: &[i32], seed: u64) -> Result<(f64, f64), Error> {
    let grid = make_grid(n, length)?;
    let top = top_band(&grid);
    let mut partition: f64 = 0.0;
    for k0 in -8..=2 {
        for &xi in grid.wavenumbers() {
            let mut sum = low_pass_multiplier(k0, xi);
            for k in k0 + 1..=top {
                sum += band_multiplier(k, xi);
            }
            partition = partition.max((sum - 1.0).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reconstruction: f64 = 0.0;
    for &k0 in k0s {
        let values: Vec<f64> = (0..grid.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_real(&grid, &values)?;
        let mut acc = SpectralField::zeros(&grid);
        for (_, part) in lp_decompose(&f, k0)? {
            acc = acc.add(&part)?;
        }
        reconstruction = reconstruction.max(acc.max_rel_diff(&f)?);
    }
    Ok((partition, reconstruction))
}

/// Coarse periodic box for the Duhamel oracle. The edge monitor is relaxed:
/// the comparison is exact on the torus and does not approximate the line.
pub fn duhamel_config(amplitude: f64) -> RunConfig {
    RunConfig {
        n: 32,
        length: 40.0,
        x_min: Some(-20.0),
        dt: 0.05,
        t_end: 4.0,
        amplitude,
        snapshot_stride: 2,
        boundary_tol: 1.0,
        ..RunConfig::default()
    }
}

pub fn convergence_config() -> RunConfig {
    RunConfig {
        n: 256,
        length: 64.0,
        x_min: Some(-32.0),
        t_end: 3.0,
        amplitude: 0.5,
        width: 2.0,
        ..RunConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let o = |verdict| Outcome {
            id: 1,
            name: "x",
            verdict,
            detail: String::new(),
            seconds: 0.0,
        };
        assert_eq!(exit_code(&[o(Verdict::Pass)]), 0);
        assert_eq!(exit_code(&[o(Verdict::Pass), o(Verdict::Inconclusive)]), 3);
        assert_eq!(exit_code(&[o(Verdict::Inconclusive), o(Verdict::Fail)]), 2);
    }

    #[test]
    fn unknown_id_is_inconclusive() {
        assert_eq!(
            Suite::new(Mode::Quick).run(13).verdict,
            Verdict::Inconclusive
        );
    }
}
