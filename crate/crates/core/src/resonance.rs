//! Space–time resonances of the quintic interaction phase.
//!
//! Every space-resonant family reduces, after substituting the group-velocity
//! constraints, to the generalized phase
//!
//! ```text
//! Φ_{A,B}(η) = A·ω(η) + B·ω(r(η)) − ω(A·η + B·r(η))
//! ```
//!
//! where `A` (`B`) is the signed count of slots carrying `η` (`r(η)`). The
//! family is also time resonant exactly at the real roots of `Φ_{A,B}`.
//!
//! Two identities drive the classification: `Φ_{A,B}` is odd in `η`, and
//! since `r` is an involution on `(1, ∞)`, `Φ_{A,B}(η) = Φ_{B,A}(r(η))`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dispersion::{
    omega, omega_d1, omega_d2, phase, phase_gradient, reflect_derivs, reflect_unchecked,
    PhasePoint, REFLECT_GUARD, SQRT3,
};
use crate::error::{Error, Result};

/// Coefficients `(A, B)` of a reduced resonance equation.
///
/// Five signed slots give `|A| + |B| ≤ 5` and `A + B` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CoeffPair {
    a: i32,
    b: i32,
}

impl CoeffPair {
    pub fn new(a: i32, b: i32) -> Result<Self> {
        let reason = if (a, b) == (0, 0) {
            Some("pair must be nonzero")
        } else if a.abs() + b.abs() > 5 {
            Some("|A| + |B| must not exceed 5")
        } else if (a + b).rem_euclid(2) == 0 {
            Some("A + B must be odd (sum of five signed slots)")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidPair { a, b, reason }),
            None => Ok(Self { a, b }),
        }
    }

    pub fn a(&self) -> i32 {
        self.a
    }

    pub fn b(&self) -> i32 {
        self.b
    }

    /// Every valid pair, ordered by `(A, B)`.
    pub fn all() -> Vec<CoeffPair> {
        let mut out = Vec::new();
        for a in -5..=5 {
            for b in -5..=5 {
                if let Ok(p) = CoeffPair::new(a, b) {
                    out.push(p);
                }
            }
        }
        out
    }

    fn needs_reflection(&self) -> bool {
        self.b != 0
    }
}

impl fmt::Display for CoeffPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

pub fn generalized_phase(pair: CoeffPair, eta: f64) -> Result<f64> {
    if pair.needs_reflection() && !(eta.abs() > 1.0 + REFLECT_GUARD) {
        return Err(Error::Domain(format!(
            "Phi_{pair} needs |eta| > 1 + {REFLECT_GUARD:e}, got {eta}"
        )));
    }
    Ok(phi(pair, eta))
}

#[inline]
fn phi(pair: CoeffPair, eta: f64) -> f64 {
    let (a, b) = (f64::from(pair.a), f64::from(pair.b));
    if pair.b == 0 {
        return a * omega(eta) - omega(a * eta);
    }
    let r = reflect_unchecked(eta);
    a * omega(eta) + b * omega(r) - omega(a * eta + b * r)
}

/// `(Φ', Φ'')` in closed form.
fn phi_derivs(pair: CoeffPair, eta: f64) -> (f64, f64) {
    let (a, b) = (f64::from(pair.a), f64::from(pair.b));
    if pair.b == 0 {
        let s = a * eta;
        return (
            a * omega_d1(eta) - a * omega_d1(s),
            a * omega_d2(eta) - a * a * omega_d2(s),
        );
    }
    let r = reflect_unchecked(eta);
    let (r1, r2) = reflect_derivs(eta, r);
    let s = a * eta + b * r;
    let s1 = a + b * r1;
    let s2 = b * r2;
    let d1 = a * omega_d1(eta) + b * omega_d1(r) * r1 - omega_d1(s) * s1;
    let d2 = a * omega_d2(eta) + b * (omega_d2(r) * r1 * r1 + omega_d1(r) * r2)
        - omega_d2(s) * s1 * s1
        - omega_d1(s) * s2;
    (d1, d2)
}

/// Rounding floor of a single `Φ` evaluation.
fn noise_floor(pair: CoeffPair) -> f64 {
    8.0 * f64::EPSILON * f64::from(pair.a.abs() + pair.b.abs() + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    IdenticallyZero,
    OnlyOrigin,
    Sqrt3Roots,
    AnomalousRoot,
    NoRoots,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Class predicted in closed form from `(A, B)`, plus the reflected anomalous
/// pairs `(±1, ∓4)` that follow from `Φ_{A,B}(η) = Φ_{B,A}(r(η))`.
pub fn predicted_tag(pair: CoeffPair) -> ClassTag {
    let (a, b) = (pair.a, pair.b);
    if a.abs() + b.abs() == 1 {
        ClassTag::IdenticallyZero
    } else if b == 0 {
        ClassTag::OnlyOrigin
    } else if (a + b).abs() == 1 {
        ClassTag::Sqrt3Roots
    } else if (a, b) == (4, -1) || (a, b) == (-4, 1) || (a, b) == (1, -4) || (a, b) == (-1, 4) {
        ClassTag::AnomalousRoot
    } else {
        ClassTag::NoRoots
    }
}

/// Result of a classification: the tag and the nonnegative root representatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: ClassTag,
    pub roots: Vec<f64>,
}

impl Classification {
    /// Tag/roots consistency.
    pub fn is_consistent(&self) -> bool {
        match self.tag {
            ClassTag::IdenticallyZero | ClassTag::NoRoots => self.roots.is_empty(),
            ClassTag::OnlyOrigin => self.roots == [0.0],
            ClassTag::Sqrt3Roots => {
                self.roots.len() == 1 && (self.roots[0] - SQRT3).abs() <= SQRT3_MATCH
            }
            ClassTag::AnomalousRoot => {
                self.roots.len() == 1 && self.roots[0] > 1.0 && (self.roots[0] - SQRT3).abs() > 0.1
            }
        }
    }
}

const SQRT3_MATCH: f64 = 1e-8;

/// Dense-scan parameters for [`find_roots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub eta_max: f64,
    pub tol: f64,
    /// Log-spaced scan points.
    pub points: usize,
    /// Extra linearly spaced points on `(1, 1.1]`, where `r` varies fastest.
    pub refine_points: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            eta_max: 1e3,
            tol: 1e-12,
            points: 100_000,
            refine_points: 10_000,
        }
    }
}

/// Output of a root scan. `IdenticallyZero` is the sentinel for a pair whose
/// phase vanishes at every probe point.
#[derive(Debug, Clone, PartialEq)]
pub enum RootSet {
    IdenticallyZero,
    Roots(Vec<f64>),
}

/// Probe 64 log-spaced points of `(1.01, 10³)`.
fn vanishes_identically(pair: CoeffPair) -> bool {
    const PROBES: usize = 64;
    let (lo, hi) = (1.01_f64.ln(), 1e3_f64.ln());
    (0..PROBES).all(|i| {
        let eta = (lo + (hi - lo) * (i as f64 + 0.5) / PROBES as f64).exp();
        phi(pair, eta).abs() < 1e-12
    })
}

pub fn find_roots(pair: CoeffPair, eta_max: f64, tol: f64) -> RootSet {
    find_roots_with(
        pair,
        &ScanOptions {
            eta_max,
            tol,
            ..ScanOptions::default()
        },
    )
}

/// All sign-change roots of `Φ_{A,B}` on `(1 + guard, eta_max]`, or on
/// `[0, eta_max]` when `B = 0`, each refined by bisection.
pub fn find_roots_with(pair: CoeffPair, opts: &ScanOptions) -> RootSet {
    if vanishes_identically(pair) {
        return RootSet::IdenticallyZero;
    }
    let mut roots = Vec::new();
    let grid = if pair.needs_reflection() {
        let lo = 1.0 + REFLECT_GUARD;
        let mut g = log_grid(lo, opts.eta_max, opts.points);
        let hi = 1.1_f64.min(opts.eta_max);
        g.extend(
            (1..=opts.refine_points).map(|i| lo + (hi - lo) * i as f64 / opts.refine_points as f64),
        );
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    } else {
        if phi(pair, 0.0).abs() <= opts.tol {
            roots.push(0.0);
        }
        log_grid(1e-8, opts.eta_max, opts.points)
    };

    let mut prev = (grid[0], phi(pair, grid[0]));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for &eta in &grid[1..] {
        let v = phi(pair, eta);
        if v == 0.0 {
            roots.push(eta);
        } else if prev.1 != 0.0 && prev.1.signum() != v.signum() {
            roots.push(refine_root(pair, prev.0, eta, opts.tol));
        }
        prev = (eta, v);
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-8 * y.abs().max(1.0));
    RootSet::Roots(roots)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Bisection of a bracketed sign change of `Φ`. Once `|Φ|` reaches its
/// rounding floor the root is degenerate or nearly so; the search then
/// continues on `Φ'` or `Φ''`, whichever changes sign across the bracket
/// (the `√3` roots are triple, so `Φ''` does there).
fn refine_root(pair: CoeffPair, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let floor = noise_floor(pair);
    let f_lo = phi(pair, lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = phi(pair, mid);
        if v == 0.0 {
            return mid;
        }
        if v.abs() <= floor {
            return refine_degenerate(pair, lo, hi, tol);
        }
        if v.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn refine_degenerate(pair: CoeffPair, lo: f64, hi: f64, tol: f64) -> f64 {
    let d1 = |x: f64| phi_derivs(pair, x).0;
    let d2 = |x: f64| phi_derivs(pair, x).1;
    if d1(lo).signum() != d1(hi).signum() {
        return bisect(d1, lo, hi, tol);
    }
    if d2(lo).signum() != d2(hi).signum() {
        return bisect(d2, lo, hi, tol);
    }
    // simple root inside the noise band: any point of the band will do
    bisect(|x| phi(pair, x), lo, hi, tol)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let s_lo = f(lo).signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn classify_pair(pair: CoeffPair) -> Result<Classification> {
    classify_pair_with(pair, &ScanOptions::default())
}

/// Analytic class cross-checked against the dense scan. Any disagreement is
/// reported as [`Error::InconsistentClassification`], never resolved.
pub fn classify_pair_with(pair: CoeffPair, opts: &ScanOptions) -> Result<Classification> {
    let predicted = predicted_tag(pair);
    let inconsistent = |observed: String| Error::InconsistentClassification {
        pair,
        predicted,
        observed,
    };
    let roots = match find_roots_with(pair, opts) {
        RootSet::IdenticallyZero => {
            return if predicted == ClassTag::IdenticallyZero {
                Ok(Classification {
                    tag: ClassTag::IdenticallyZero,
                    roots: Vec::new(),
                })
            } else {
                Err(inconsistent("phase numerically zero at every probe".into()))
            };
        }
        RootSet::Roots(r) => r,
    };
    let observed = match roots.as_slice() {
        [] => ClassTag::NoRoots,
        [z] if *z == 0.0 => ClassTag::OnlyOrigin,
        [r] if (r - SQRT3).abs() <= SQRT3_MATCH => ClassTag::Sqrt3Roots,
        [r] if *r > 1.0 => ClassTag::AnomalousRoot,
        other => return Err(inconsistent(format!("unexpected roots {other:?}"))),
    };
    if observed != predicted {
        return Err(inconsistent(format!("{observed} with roots {roots:?}")));
    }
    let c = Classification {
        tag: observed,
        roots,
    };
    if !c.is_consistent() {
        return Err(inconsistent(format!("roots {:?} violate the tag", c.roots)));
    }
    Ok(c)
}

/// `H(η) = Φ_{4,−1}(η)`.
pub fn anomalous_h(eta: f64) -> f64 {
    let r = reflect_unchecked(eta);
    4.0 * omega(eta) - omega(r) - omega(4.0 * eta - r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalousSolution {
    pub eta0: f64,
    pub xi0: f64,
    /// `|Φ_{4,−1}(η₀)|`.
    pub residual_phase: f64,
    /// `|η₅ + r(η₀)|` at the point `(η₀, η₀, η₀, η₀; ξ₀)`.
    pub residual_constraint: f64,
}

impl AnomalousSolution {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new([self.eta0; 4], self.xi0)
    }
}

/// The positive root of `H` on `[2, ∞)`, by bisection on `[2, M]` with `M`
/// doubled until `H(M) < 0`.
pub fn solve_anomalous(tol: f64) -> Result<AnomalousSolution> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let lo = 2.0;
    if !(anomalous_h(lo) > 0.0) {
        return Err(Error::BracketFailure("H(2) is not positive"));
    }
    let mut hi = 4.0;
    while !(anomalous_h(hi) < 0.0) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketFailure("H stays nonnegative on [2, 1e12]"));
        }
    }
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = 0.5 * (a + b);
        let v = anomalous_h(mid);
        if v == 0.0 || (b - a <= tol && v.abs() <= tol) || mid == a || mid == b {
            a = mid;
            b = mid;
            break;
        }
        if v > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let eta0 = 0.5 * (a + b);
    let r0 = reflect_unchecked(eta0);
    let xi0 = 4.0 * eta0 - r0;
    let point = PhasePoint::new([eta0; 4], xi0);
    Ok(AnomalousSolution {
        eta0,
        xi0,
        residual_phase: anomalous_h(eta0).abs().max(phase(&point).abs()),
        residual_constraint: (point.eta5() + r0).abs(),
    })
}

/// Slot assignment of a space-resonant family: slot `j` carries
/// `σ_j·η` or `σ_j·r(η)`; the output frequency is the sum of all five.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub slot_signs: [i8; 5],
    pub slot_reflected: [bool; 5],
}

impl FamilyConfig {
    pub fn pair(&self) -> (i32, i32) {
        let mut a = 0;
        let mut b = 0;
        for (s, refl) in self.slot_signs.iter().zip(&self.slot_reflected) {
            if *refl {
                b += i32::from(*s);
            } else {
                a += i32::from(*s);
            }
        }
        (a, b)
    }

    /// The interaction point of this family at parameter `eta`.
    pub fn witness(&self, eta: f64) -> Result<PhasePoint> {
        let needs_r = self.slot_reflected.iter().any(|&r| r);
        if needs_r && !(eta.abs() > 1.0 + REFLECT_GUARD) {
            return Err(Error::Domain(format!("family needs |eta| > 1, got {eta}")));
        }
        let r = if needs_r { reflect_unchecked(eta) } else { 0.0 };
        let slot =
            |j: usize| f64::from(self.slot_signs[j]) * if self.slot_reflected[j] { r } else { eta };
        let s: [f64; 5] = std::array::from_fn(slot);
        Ok(PhasePoint::new([s[0], s[1], s[2], s[3]], s.iter().sum()))
    }

    /// Canonical form under permutation of the four input slots.
    fn canonical(&self) -> FamilyConfig {
        let mut slots: Vec<(bool, i8)> = (0..4)
            .map(|j| (self.slot_reflected[j], -self.slot_signs[j]))
            .collect();
        slots.sort();
        let mut c = *self;
        for (j, (refl, neg)) in slots.into_iter().enumerate() {
            c.slot_reflected[j] = refl;
            c.slot_signs[j] = -neg;
        }
        c
    }

    fn negated(&self) -> FamilyConfig {
        let mut c = *self;
        for s in c.slot_signs.iter_mut() {
            *s = -*s;
        }
        c
    }
}

impl fmt::Display for FamilyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slot_signs
            .iter()
            .zip(&self.slot_reflected)
            .map(|(s, r)| {
                let sign = if *s > 0 { "+" } else { "-" };
                format!("{sign}{}", if *r { "r" } else { "e" })
            })
            .collect();
        write!(
            f,
            "{} {} {} {} | {}",
            parts[0], parts[1], parts[2], parts[3], parts[4]
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub pair: CoeffPair,
    /// Canonical witness configuration.
    pub witness: FamilyConfig,
    /// Raw configurations (of the 1024) reducing to this pair.
    pub raw_count: usize,
    /// Distinct configurations up to permutation of the input slots.
    pub distinct_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEnumeration {
    pub entries: Vec<FamilyEntry>,
    pub raw_total: usize,
    /// Classes up to input-slot permutation and global negation.
    pub classes_total: usize,
}

/// Enumerate every slot assignment, reduce to coefficient pairs and pick a
/// canonical witness per pair.
pub fn enumerate_families() -> FamilyEnumeration {
    let mut by_pair: BTreeMap<
        CoeffPair,
        (
            FamilyConfig,
            usize,
            std::collections::BTreeSet<FamilyConfig>,
        ),
    > = BTreeMap::new();
    let mut classes = std::collections::BTreeSet::new();
    let mut raw_total = 0;
    for sign_bits in 0u32..32 {
        for refl_bits in 0u32..32 {
            raw_total += 1;
            let cfg = FamilyConfig {
                slot_signs: std::array::from_fn(|j| if sign_bits >> j & 1 == 0 { 1 } else { -1 }),
                slot_reflected: std::array::from_fn(|j| refl_bits >> j & 1 == 1),
            };
            let (a, b) = cfg.pair();
            let pair = CoeffPair::new(a, b).expect("five signed slots always give a valid pair");
            let canon = cfg.canonical();
            let neg = cfg.negated().canonical();
            classes.insert(canon.min(neg));
            let e = by_pair
                .entry(pair)
                .or_insert((canon, 0, Default::default()));
            if witness_key(&canon) < witness_key(&e.0) {
                e.0 = canon;
            }
            e.1 += 1;
            e.2.insert(canon);
        }
    }
    FamilyEnumeration {
        entries: by_pair
            .into_iter()
            .map(|(pair, (witness, raw_count, distinct))| FamilyEntry {
                pair,
                witness,
                raw_count,
                distinct_count: distinct.len(),
            })
            .collect(),
        raw_total,
        classes_total: classes.len(),
    }
}

/// Witness preference: fewest reflected input slots, then canonical order.
fn witness_key(c: &FamilyConfig) -> (usize, FamilyConfig) {
    (c.slot_reflected[..4].iter().filter(|&&r| r).count(), *c)
}

/// Residuals of the space–time resonance conditions at `p`:
/// `(|φ|, max_j |∂_{η_j}φ|)`.
pub fn resonance_residuals(p: &PhasePoint) -> (f64, f64) {
    let g = phase_gradient(p);
    (
        phase(p).abs(),
        g[..4].iter().fold(0.0_f64, |m, v| m.max(v.abs())),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ManifoldKind {
    /// `(−η, η, η, η; η)`.
    Line,
    /// `(η, η, −η, −r(η); −r(η))`, `|η| > 1`.
    Curve,
}

pub fn manifold_point(kind: ManifoldKind, eta: f64) -> Result<PhasePoint> {
    match kind {
        ManifoldKind::Line => Ok(PhasePoint::new([-eta, eta, eta, eta], eta)),
        ManifoldKind::Curve => {
            if !(eta.abs() > 1.0 + REFLECT_GUARD) {
                return Err(Error::Domain(format!("curve needs |eta| > 1, got {eta}")));
            }
            let r = reflect_unchecked(eta);
            Ok(PhasePoint::new([eta, eta, -eta, -r], -r))
        }
    }
}

/// `n` points evenly spaced in `eta_range` on the line `L` or the curve `Γ`.
pub fn sample_manifold(
    kind: ManifoldKind,
    eta_range: (f64, f64),
    n: usize,
) -> Result<Vec<PhasePoint>> {
    let (lo, hi) = eta_range;
    if n == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::Domain(format!(
            "invalid range [{lo}, {hi}] with n = {n}"
        )));
    }
    if kind == ManifoldKind::Curve {
        let inside = |x: f64| x.abs() > 1.0 + REFLECT_GUARD;
        if !(inside(lo) && inside(hi) && lo.signum() == hi.signum()) {
            return Err(Error::Domain(format!(
                "curve range [{lo}, {hi}] must lie in |eta| > 1"
            )));
        }
    }
    (0..n)
        .map(|i| {
            let eta = if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            };
            manifold_point(kind, eta)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HShapeReport {
    pub grid_n: usize,
    /// `min H` over the sampled `(1, 2]`.
    pub min_on_1_2: f64,
    /// Largest finite difference of `H` on `[2, 10³]` (must be negative).
    pub max_difference: f64,
    pub sign_changes_2_100: usize,
    pub h_at_2: f64,
    pub h_at_1e6: f64,
    pub pass: bool,
}

/// Dense-scan check of the shape of `H`: positive on `(1, 2]`, strictly
/// decreasing on `[2, 10³]`, one sign change on `[2, 100]`.
pub fn verify_h_shape(grid_n: usize) -> Result<HShapeReport> {
    if grid_n < 100 {
        return Err(Error::Domain(format!(
            "grid_n must be at least 100, got {grid_n}"
        )));
    }
    let min_on_1_2 = (1..=grid_n)
        .map(|i| anomalous_h(1.0 + 1e-6 + (1.0 - 1e-6) * i as f64 / grid_n as f64))
        .fold(f64::INFINITY, f64::min);
    let decreasing = log_grid(2.0, 1e3, grid_n);
    let h: Vec<f64> = decreasing.iter().map(|&e| anomalous_h(e)).collect();
    let max_difference = h
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let on_2_100: Vec<f64> = log_grid(2.0, 100.0, grid_n)
        .iter()
        .map(|&e| anomalous_h(e))
        .collect();
    let sign_changes_2_100 = on_2_100
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    let h_at_2 = anomalous_h(2.0);
    let h_at_1e6 = anomalous_h(1e6);
    Ok(HShapeReport {
        grid_n,
        min_on_1_2,
        max_difference,
        sign_changes_2_100,
        h_at_2,
        h_at_1e6,
        pass: min_on_1_2 > 0.0 && max_difference < 0.0 && sign_changes_2_100 == 1,
    })
}

/// One row of the classification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationRow {
    #[serde(rename = "A")]
    pub a: i32,
    #[serde(rename = "B")]
    pub b: i32,
    pub class: String,
    pub roots: String,
    pub witness_config: String,
}

/// Classify every valid pair and attach the canonical witness of its family.
pub fn classification_table(opts: &ScanOptions) -> Result<Vec<(FamilyEntry, Classification)>> {
    enumerate_families()
        .entries
        .into_iter()
        .map(|entry| classify_pair_with(entry.pair, opts).map(|c| (entry, c)))
        .collect()
}

pub fn write_classification_csv<W: Write>(
    out: W,
    table: &[(FamilyEntry, Classification)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (entry, class) in table {
        let roots: Vec<String> = class.roots.iter().map(|r| format!("{r:.12}")).collect();
        w.serialize(ClassificationRow {
            a: entry.pair.a,
            b: entry.pair.b,
            class: class.tag.to_string(),
            roots: roots.join(";"),
            witness_config: entry.witness.to_string(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pair(a: i32, b: i32) -> CoeffPair {
        CoeffPair::new(a, b).unwrap()
    }

    #[test]
    fn pair_validation() {
        assert!(CoeffPair::new(0, 0).is_err());
        assert!(CoeffPair::new(4, 2).is_err());
        assert!(CoeffPair::new(3, -1).is_err());
        assert!(CoeffPair::new(4, -1).is_ok());
        // |A|+|B| odd and ≤ 5: 4 + 12 + 20 pairs at levels 1, 3, 5
        assert_eq!(CoeffPair::all().len(), 36);
    }

    #[test]
    fn generalized_phase_examples() {
        for &eta in &[-3.0, -1.5, 0.2, 1.7, 40.0] {
            assert_eq!(generalized_phase(pair(1, 0), eta).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            generalized_phase(pair(2, -1), SQRT3).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert!(generalized_phase(pair(3, 0), 1.5).unwrap().abs() > 1e-3);
        assert!(generalized_phase(pair(0, 1), 1.0).is_err());
        assert!(generalized_phase(pair(3, 0), 0.5).is_ok());
    }

    #[test]
    fn phi_is_odd() {
        for p in CoeffPair::all() {
            for &eta in &[1.3, 2.0, 7.0, 55.0] {
                let plus = phi(p, eta);
                let minus = phi(p, -eta);
                assert_abs_diff_eq!(plus, -minus, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phi_swap_identity() {
        for p in CoeffPair::all() {
            let swapped = pair(p.b, p.a);
            for &eta in &[1.05, 1.9, 4.0, 30.0] {
                let r = reflect_unchecked(eta);
                assert_abs_diff_eq!(phi(p, eta), phi(swapped, r), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        let h = 1e-6;
        for p in CoeffPair::all() {
            for &eta in &[1.2, 2.2, 6.0] {
                let (d1, d2) = phi_derivs(p, eta);
                let fd1 = (phi(p, eta + h) - phi(p, eta - h)) / (2.0 * h);
                let fd2 = (phi_derivs(p, eta + h).0 - phi_derivs(p, eta - h).0) / (2.0 * h);
                assert_abs_diff_eq!(d1, fd1, epsilon = 1e-7);
                assert_abs_diff_eq!(d2, fd2, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn sqrt3_root_is_located_precisely() {
        match find_roots(pair(2, -1), 100.0, 1e-12) {
            RootSet::Roots(r) => {
                assert_eq!(r.len(), 1);
                assert!((r[0] - SQRT3).abs() < 1e-10, "{}", r[0] - SQRT3);
            }
            RootSet::IdenticallyZero => panic!("not identically zero"),
        }
    }

    #[test]
    fn anomalous_roots() {
        match find_roots(pair(4, -1), 100.0, 1e-12) {
            RootSet::Roots(r) => {
                assert_eq!(r.len(), 1);
                assert!((7.29..=7.39).contains(&r[0]));
            }
            RootSet::IdenticallyZero => panic!(),
        }
        let c = classify_pair(pair(-1, 4)).unwrap();
        assert_eq!(c.tag, ClassTag::AnomalousRoot);
        let eta0 = solve_anomalous(1e-13).unwrap().eta0;
        assert_abs_diff_eq!(c.roots[0], reflect_unchecked(eta0), epsilon = 1e-9);
    }

    #[test]
    fn no_roots_example() {
        assert_eq!(find_roots(pair(1, 2), 100.0, 1e-12), RootSet::Roots(vec![]));
        assert_eq!(classify_pair(pair(4, 1)).unwrap().tag, ClassTag::NoRoots);
    }

    #[test]
    fn named_classifications() {
        assert_eq!(
            classify_pair(pair(0, 1)).unwrap().tag,
            ClassTag::IdenticallyZero
        );
        let c = classify_pair(pair(5, 0)).unwrap();
        assert_eq!(c.tag, ClassTag::OnlyOrigin);
        assert_eq!(c.roots, vec![0.0]);
        let c = classify_pair(pair(-3, 2)).unwrap();
        assert_eq!(c.tag, ClassTag::Sqrt3Roots);
    }

    #[test]
    fn anomalous_solution() {
        let s = solve_anomalous(1e-12).unwrap();
        assert!((7.29..=7.39).contains(&s.eta0));
        assert!((28.26..=28.36).contains(&s.xi0));
        assert!(s.residual_phase <= 1e-12);
        assert!(s.residual_constraint <= 1e-12);
        assert!(anomalous_h(2.0) > 0.0);
        assert!((anomalous_h(1e6) + 0.5).abs() < 1e-3);
        assert!(solve_anomalous(0.0).is_err());
    }

    #[test]
    fn anomalous_solution_is_stable_under_refinement() {
        let mut tol = 1e-6;
        let mut prev = solve_anomalous(tol).unwrap().eta0;
        for _ in 0..5 {
            tol /= 2.0;
            let next = solve_anomalous(tol).unwrap().eta0;
            assert!((next - prev).abs() < 2.0 * tol);
            prev = next;
        }
    }

    #[test]
    fn family_examples() {
        let all_plus = FamilyConfig {
            slot_signs: [1; 5],
            slot_reflected: [false, false, false, false, true],
        };
        assert_eq!(all_plus.pair(), (4, 1));
        let p = all_plus.witness(2.0).unwrap();
        assert_abs_diff_eq!(p.xi, 8.0 + reflect_unchecked(2.0), epsilon = 1e-14);

        let line = FamilyConfig {
            slot_signs: [1, 1, 1, -1, -1],
            slot_reflected: [false; 5],
        };
        assert_eq!(line.pair(), (1, 0));
    }

    #[test]
    fn enumeration_covers_every_pair() {
        let e = enumerate_families();
        assert_eq!(e.raw_total, 1024);
        assert_eq!(e.entries.iter().map(|x| x.raw_count).sum::<usize>(), 1024);
        let pairs: Vec<(i32, i32)> = e.entries.iter().map(|x| (x.pair.a, x.pair.b)).collect();
        for named in [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (3, 0),
            (-3, 0),
            (5, 0),
            (-5, 0),
            (2, -1),
            (-1, 2),
            (3, -2),
            (4, -1),
            (-4, 1),
            (4, 1),
            (3, 2),
            (2, 1),
            (1, 2),
            (2, 3),
        ] {
            assert!(pairs.contains(&named), "{named:?} missing");
        }
        assert_eq!(pairs.len(), CoeffPair::all().len());
        let anomalous = e
            .entries
            .iter()
            .find(|x| (x.pair.a, x.pair.b) == (4, -1))
            .unwrap();
        assert_eq!(anomalous.witness.to_string(), "+e +e +e +e | -r");
        assert!(e.classes_total < 1024);
    }

    #[test]
    fn manifold_samples_are_resonant() {
        let p = manifold_point(ManifoldKind::Line, 2.0).unwrap();
        assert_eq!(p, PhasePoint::new([-2.0, 2.0, 2.0, 2.0], 2.0));
        let c = manifold_point(ManifoldKind::Curve, 2.0).unwrap();
        let r = reflect_unchecked(2.0);
        assert_eq!(c, PhasePoint::new([2.0, 2.0, -2.0, -r], -r));
        for kind in [ManifoldKind::Line, ManifoldKind::Curve] {
            for p in sample_manifold(kind, (1.01, 50.0), 200).unwrap() {
                let (ph, gr) = resonance_residuals(&p);
                assert!(ph <= 1e-10 && gr <= 1e-10, "{p}: {ph} {gr}");
            }
        }
        assert!(sample_manifold(ManifoldKind::Curve, (0.5, 3.0), 10).is_err());
        assert!(sample_manifold(ManifoldKind::Line, (0.0, 1.0), 0).is_err());
    }

    #[test]
    fn curve_meets_line_at_sqrt3() {
        let c = manifold_point(ManifoldKind::Curve, SQRT3).unwrap();
        // (√3, √3, −√3, −√3; −√3) with η₅ = −√3 is a sign-permutation point of L
        let l = PhasePoint::new([SQRT3, SQRT3, -SQRT3, -SQRT3], -SQRT3);
        for k in 0..4 {
            assert_abs_diff_eq!(c.eta[k], l.eta[k], epsilon = 1e-15);
        }
        assert_abs_diff_eq!(c.xi, l.xi, epsilon = 1e-15);
        assert_abs_diff_eq!(c.eta5(), -SQRT3, epsilon = 1e-15);
    }

    #[test]
    fn h_shape() {
        let rep = verify_h_shape(10_000).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(anomalous_h(1.5) > 0.0);
        assert!(verify_h_shape(10).is_err());
    }
}
