//! Scalar functions of the linear BBM flow.
//!
//! The dispersion relation is `ω(ξ) = ξ / (1 + ξ²)`. It is odd, bounded by
//! 1/2, and its group velocity `ω'` is even with the reflection symmetry
//! `ω'(r(ξ)) = ω'(ξ)` where `r(ξ) = sgn(ξ)·√((ξ²+3)/(ξ²−1))`.
//!
//! The quintic interaction phase is `φ = −ω(ξ) + Σ_{j=1..5} ω(η_j)` with
//! `η₅ = ξ − (η₁+η₂+η₃+η₄)`. All derivatives are hand-differentiated closed
//! forms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// `reflect` rejects `|ξ| ≤ 1 + REFLECT_GUARD`.
pub const REFLECT_GUARD: f64 = 1e-9;

pub use mutation::Mutation;

/// Deliberate corruption of ω, used only by the mutation-sensitivity check of
/// the verification suite. The override is thread-local.
#[doc(hidden)]
pub mod mutation {
    use std::cell::Cell;

    #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
    pub enum Mutation {
        #[default]
        None,
        /// Drop the `⟨ξ⟩⁻²` factor: ω(ξ) = ξ.
        DropBracket,
    }

    thread_local! {
        static ACTIVE: Cell<Mutation> = const { Cell::new(Mutation::None) };
    }

    pub(crate) fn active() -> Mutation {
        ACTIVE.with(|m| m.get())
    }

    /// Run `f` with the given mutation active on the current thread.
    pub fn with<R>(m: Mutation, f: impl FnOnce() -> R) -> R {
        struct Reset(Mutation);
        impl Drop for Reset {
            fn drop(&mut self) {
                ACTIVE.with(|c| c.set(self.0));
            }
        }
        let _reset = Reset(ACTIVE.with(|c| c.replace(m)));
        f()
    }
}

#[inline]
pub fn omega(xi: f64) -> f64 {
    if mutation::active() == Mutation::DropBracket {
        return xi;
    }
    xi / (1.0 + xi * xi)
}

#[inline]
pub(crate) fn omega_d1(xi: f64) -> f64 {
    if mutation::active() == Mutation::DropBracket {
        return 1.0;
    }
    let q = 1.0 + xi * xi;
    (1.0 - xi * xi) / (q * q)
}

#[inline]
pub(crate) fn omega_d2(xi: f64) -> f64 {
    if mutation::active() == Mutation::DropBracket {
        return 0.0;
    }
    let q = 1.0 + xi * xi;
    2.0 * xi * (xi * xi - 3.0) / (q * q * q)
}

#[inline]
pub(crate) fn omega_d3(xi: f64) -> f64 {
    if mutation::active() == Mutation::DropBracket {
        return 0.0;
    }
    let x2 = xi * xi;
    let q = 1.0 + x2;
    let q2 = q * q;
    -6.0 * (x2 * x2 - 6.0 * x2 + 1.0) / (q2 * q2)
}

/// Closed-form derivative of ω of order 1, 2 or 3.
pub fn omega_deriv(xi: f64, order: u8) -> Result<f64> {
    match order {
        1 => Ok(omega_d1(xi)),
        2 => Ok(omega_d2(xi)),
        3 => Ok(omega_d3(xi)),
        other => Err(Error::InvalidOrder(other)),
    }
}

/// The reflection `r(ξ)`, the other frequency with the same group velocity.
pub fn reflect(xi: f64) -> Result<f64> {
    if !(xi.abs() > 1.0 + REFLECT_GUARD) {
        return Err(Error::Domain(format!(
            "reflect requires |xi| > 1 + {REFLECT_GUARD:e}, got {xi}"
        )));
    }
    Ok(reflect_unchecked(xi))
}

#[inline]
pub(crate) fn reflect_unchecked(xi: f64) -> f64 {
    let x2 = xi * xi;
    xi.signum() * ((x2 + 3.0) / (x2 - 1.0)).sqrt()
}

/// `(r'(ξ), r''(ξ))` for `|ξ| > 1`.
pub(crate) fn reflect_derivs(xi: f64, r: f64) -> (f64, f64) {
    let x2 = xi * xi;
    let q = (x2 + 3.0) * (x2 - 1.0);
    let dq = 4.0 * xi * x2 + 4.0 * xi;
    let d1 = -4.0 * xi * r / q;
    let d2 = -4.0 * (r / q + xi * d1 / q - xi * r * dq / (q * q));
    (d1, d2)
}

/// A point `(η₁, η₂, η₃, η₄; ξ)` of the five-dimensional interaction space.
/// The fifth frequency is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub eta: [f64; 4],
    pub xi: f64,
}

impl PhasePoint {
    pub fn new(eta: [f64; 4], xi: f64) -> Self {
        Self { eta, xi }
    }

    pub fn eta5(&self) -> f64 {
        self.xi - (self.eta[0] + self.eta[1] + self.eta[2] + self.eta[3])
    }

    /// All five input frequencies, `η₅` last.
    pub fn slots(&self) -> [f64; 5] {
        [
            self.eta[0],
            self.eta[1],
            self.eta[2],
            self.eta[3],
            self.eta5(),
        ]
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}; {})",
            self.eta[0], self.eta[1], self.eta[2], self.eta[3], self.xi
        )
    }
}

pub fn phase(p: &PhasePoint) -> f64 {
    p.slots().iter().map(|&e| omega(e)).sum::<f64>() - omega(p.xi)
}

/// `(∂_{η₁}φ, …, ∂_{η₄}φ, ∂_ξφ)`.
pub fn phase_gradient(p: &PhasePoint) -> [f64; 5] {
    let g5 = omega_d1(p.eta5());
    [
        omega_d1(p.eta[0]) - g5,
        omega_d1(p.eta[1]) - g5,
        omega_d1(p.eta[2]) - g5,
        omega_d1(p.eta[3]) - g5,
        g5 - omega_d1(p.xi),
    ]
}

/// Signs `(σ₁..σ₄; σ_ξ)` of a sign-permutation point. The implied fifth sign
/// is `σ₅ = σ_ξ − Σσ_j`, which must itself be ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    pub inputs: [i8; 4],
    pub output: i8,
}

impl SignPattern {
    pub fn new(inputs: [i8; 4], output: i8) -> Result<Self> {
        if inputs
            .iter()
            .chain(std::iter::once(&output))
            .any(|s| s.abs() != 1)
        {
            return Err(Error::Domain("signs must be +1 or -1".into()));
        }
        let p = Self { inputs, output };
        if p.slot5().abs() != 1 {
            return Err(Error::Domain(format!(
                "sign constraint violated: sigma_xi - sum(sigma_j) = {}",
                p.slot5()
            )));
        }
        Ok(p)
    }

    pub fn slot5(&self) -> i8 {
        self.output - self.inputs.iter().sum::<i8>()
    }

    fn slot_signs(&self) -> [f64; 5] {
        let s = |v: i8| f64::from(v);
        [
            s(self.inputs[0]),
            s(self.inputs[1]),
            s(self.inputs[2]),
            s(self.inputs[3]),
            s(self.slot5()),
        ]
    }
}

/// The four local phase models about the space–time resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TaylorModelKind {
    /// Second order about `(η₀, η₀, η₀, η₀; 4η₀ − r(η₀))`.
    Anomalous { eta0: f64 },
    /// Third order about the origin.
    DegenerateOrigin,
    /// Third order about a sign-permutation point at `|η| = √3`.
    NonDegenerateSqrt3 { signs: SignPattern },
    /// Second order about a sign-permutation point of the line `L`.
    ResonantLine { eta: f64, signs: SignPattern },
}

impl TaylorModelKind {
    pub fn order(&self) -> usize {
        match self {
            Self::Anomalous { .. } | Self::ResonantLine { .. } => 2,
            Self::DegenerateOrigin | Self::NonDegenerateSqrt3 { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Anomalous { .. } => "anomalous",
            Self::DegenerateOrigin => "degenerate-origin",
            Self::NonDegenerateSqrt3 { .. } => "sqrt3",
            Self::ResonantLine { .. } => "line",
        }
    }

    /// Base point of the expansion.
    pub fn basepoint(&self) -> PhasePoint {
        match *self {
            Self::Anomalous { eta0 } => {
                PhasePoint::new([eta0; 4], 4.0 * eta0 - reflect_unchecked(eta0))
            }
            Self::DegenerateOrigin => PhasePoint::new([0.0; 4], 0.0),
            Self::NonDegenerateSqrt3 { signs } => sign_point(SQRT3, signs),
            Self::ResonantLine { eta, signs } => sign_point(eta, signs),
        }
    }
}

fn sign_point(eta: f64, signs: SignPattern) -> PhasePoint {
    let s = signs.slot_signs();
    PhasePoint::new(
        [s[0] * eta, s[1] * eta, s[2] * eta, s[3] * eta],
        f64::from(signs.output) * eta,
    )
}

/// Parses the model name; parameters take their canonical values
/// (`η₀` must be supplied separately for the anomalous model).
impl FromStr for TaylorModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let line_signs = SignPattern::new([1, 1, -1, -1], 1)?;
        match s {
            "degenerate-origin" | "origin" => Ok(Self::DegenerateOrigin),
            "sqrt3" | "nondegenerate-sqrt3" => Ok(Self::NonDegenerateSqrt3 {
                signs: SignPattern::new([1, 1, 1, -1], 1)?,
            }),
            "line" | "resonant-line" => Ok(Self::ResonantLine {
                eta: 40.0,
                signs: line_signs,
            }),
            "anomalous" => Ok(Self::Anomalous { eta0: f64::NAN }),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// A truncated Taylor polynomial of φ about a resonance point.
///
/// Internally the model is separable: one Taylor series of ω per slot
/// (`η₁..η₅`) and one for `ξ`, each in its own deviation. The coefficient
/// views in the independent variables `(δη₁..δη₄, δξ)` are derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorModel {
    pub kind: TaylorModelKind,
    pub radius: f64,
    base: PhasePoint,
    /// `[ω(b), ω'(b), ω''(b)/2, ω'''(b)/6]` for slots 1..5 then ξ.
    series: [[f64; 4]; 6],
}

impl TaylorModel {
    pub fn new(kind: TaylorModelKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if let TaylorModelKind::Anomalous { eta0 } = kind {
            if !(eta0.abs() > 1.0 + REFLECT_GUARD) {
                return Err(Error::Domain(format!(
                    "anomalous base eta0 = {eta0} invalid"
                )));
            }
        }
        let base = kind.basepoint();
        let centres = {
            let s = base.slots();
            [s[0], s[1], s[2], s[3], s[4], base.xi]
        };
        let series = centres.map(|b| [omega(b), omega_d1(b), omega_d2(b) / 2.0, omega_d3(b) / 6.0]);
        Ok(Self {
            kind,
            radius,
            base,
            series,
        })
    }

    pub fn order(&self) -> usize {
        self.kind.order()
    }

    pub fn basepoint(&self) -> PhasePoint {
        self.base
    }

    /// Deviations `(δη₁..δη₄, δξ)` of `p` from the base point.
    pub fn deviation(&self, p: &PhasePoint) -> [f64; 5] {
        [
            p.eta[0] - self.base.eta[0],
            p.eta[1] - self.base.eta[1],
            p.eta[2] - self.base.eta[2],
            p.eta[3] - self.base.eta[3],
            p.xi - self.base.xi,
        ]
    }

    /// `φ` at the base point.
    pub fn constant(&self) -> f64 {
        self.series[..5].iter().map(|c| c[0]).sum::<f64>() - self.series[5][0]
    }

    /// Gradient coefficients in `(δη₁..δη₄, δξ)`.
    pub fn linear(&self) -> [f64; 5] {
        let s = &self.series;
        [
            s[0][1] - s[4][1],
            s[1][1] - s[4][1],
            s[2][1] - s[4][1],
            s[3][1] - s[4][1],
            s[4][1] - s[5][1],
        ]
    }

    /// Symmetric matrix `Q` with quadratic term `δᵀ Q δ`.
    pub fn quadratic(&self) -> [[f64; 5]; 5] {
        // δη₅ = δξ − Σ δη_j has coefficient vector v.
        let v = [-1.0, -1.0, -1.0, -1.0, 1.0];
        let c5 = self.series[4][2];
        let mut q = [[0.0; 5]; 5];
        for (i, row) in q.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = c5 * v[i] * v[j];
            }
        }
        for (j, s) in self.series[..4].iter().enumerate() {
            q[j][j] += s[2];
        }
        q[4][4] -= self.series[5][2];
        q
    }

    /// Per-slot cubic coefficients `ω'''(b)/6` for `η₁..η₅` and `−ω'''(b_ξ)/6`.
    pub fn cubic_slots(&self) -> [f64; 6] {
        let mut c = [0.0; 6];
        for (k, s) in self.series.iter().enumerate() {
            c[k] = s[3];
        }
        c[5] = -c[5];
        c
    }

    pub fn evaluate(&self, p: &PhasePoint) -> Result<f64> {
        let d = self.deviation(p);
        let dev = d.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if dev > self.radius {
            return Err(Error::OutsideNeighborhood {
                deviation: dev,
                radius: self.radius,
            });
        }
        let d5 = d[4] - (d[0] + d[1] + d[2] + d[3]);
        let slot_dev = [d[0], d[1], d[2], d[3], d5, d[4]];
        let order = self.order();
        let mut total = 0.0;
        for (k, (coeffs, &h)) in self.series.iter().zip(&slot_dev).enumerate() {
            let mut acc = 0.0;
            let mut hp = 1.0;
            for c in coeffs.iter().take(order + 1) {
                acc += c * hp;
                hp *= h;
            }
            if k == 5 {
                total -= acc;
            } else {
                total += acc;
            }
        }
        Ok(total)
    }
}

/// Evaluate the truncated expansion `model` at `p`.
pub fn taylor_model(model: &TaylorModel, p: &PhasePoint) -> Result<f64> {
    model.evaluate(p)
}

/// Model error along a ray from the base point at geometrically halved
/// deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderStudy {
    pub kind: String,
    pub order: usize,
    pub deviations: Vec<f64>,
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i+1]`; about `2^{order+1}` for a correct model.
    pub ratios: Vec<f64>,
}

/// `|φ − model|` at `base + dev·direction` for `dev = dev0 / 2^i`,
/// `i = 0..=halvings`. `direction` is rescaled to unit max-norm.
pub fn remainder_study(
    model: &TaylorModel,
    direction: [f64; 5],
    dev0: f64,
    halvings: usize,
) -> Result<RemainderStudy> {
    let scale = direction.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || !(dev0 > 0.0) {
        return Err(Error::Domain("direction and dev0 must be nonzero".into()));
    }
    let b = model.basepoint();
    let mut deviations = Vec::with_capacity(halvings + 1);
    let mut errors = Vec::with_capacity(halvings + 1);
    for i in 0..=halvings {
        let dev = dev0 / 2f64.powi(i as i32);
        let d = direction.map(|v| v / scale * dev);
        let p = PhasePoint::new(
            [
                b.eta[0] + d[0],
                b.eta[1] + d[1],
                b.eta[2] + d[2],
                b.eta[3] + d[3],
            ],
            b.xi + d[4],
        );
        deviations.push(dev);
        errors.push((phase(&p) - model.evaluate(&p)?).abs());
    }
    let ratios = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(RemainderStudy {
        kind: model.kind.name().to_string(),
        order: model.order(),
        deviations,
        errors,
        ratios,
    })
}
