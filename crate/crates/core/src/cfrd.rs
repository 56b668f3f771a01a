//! The CFRD functional for arbitrary pairs of quadratures.
//!
//! Each mode is measured along
//! `X = a e^{−iθ} + a† e^{iθ}` and `Y = a e^{−iφ} + a† e^{iφ}` with
//! `φ = θ + δ + sπ/2`. The transformed mode `b = u a + v a†` turns the
//! inequality into `|⟨∏B_k(s_k)⟩|² ≤ ⟨∏(N_k + 1/(2cos δ_k))⟩` with
//! `B(1) = b`, `B(−1) = b†` and `N = b†b`. All quantities below live in that
//! normalized b-frame.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::partial_transpose_min_eig;
use crate::modeset::{ModeSet, MAX_MODES};
use crate::operator::{ModeOperator, MomentSource};

/// `beta` above this value counts as a violation.
pub const VIOLATION_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSettings")]
pub struct QuadratureSettings {
    theta: Vec<f64>,
    delta: Vec<f64>,
    s: Vec<i8>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSettings {
    theta: Vec<f64>,
    delta: Vec<f64>,
    s: Vec<i8>,
}

impl TryFrom<RawSettings> for QuadratureSettings {
    type Error = Error;

    fn try_from(raw: RawSettings) -> Result<Self> {
        Self::new(raw.theta, raw.delta, raw.s)
    }
}

impl QuadratureSettings {
    pub fn new(theta: Vec<f64>, delta: Vec<f64>, s: Vec<i8>) -> Result<Self> {
        let n = theta.len();
        if n == 0 || n > MAX_MODES || delta.len() != n || s.len() != n {
            return Err(Error::InvalidSettings(format!(
                "theta, delta and s must have the same nonzero length (got {}, {}, {})",
                n,
                delta.len(),
                s.len()
            )));
        }
        if let Some(t) = theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidSettings(format!("theta {t} is not finite")));
        }
        if let Some(d) = delta.iter().find(|d| !(d.abs() < FRAC_PI_2)) {
            return Err(Error::InvalidSettings(format!(
                "delta {d} outside (-pi/2, pi/2): that measures a single quadrature"
            )));
        }
        if let Some(x) = s.iter().find(|x| **x != 1 && **x != -1) {
            return Err(Error::InvalidSettings(format!("s must be +1 or -1, got {x}")));
        }
        Ok(Self { theta, delta, s })
    }

    /// Orthogonal quadratures (`θ = δ = 0`) with the given signs.
    pub fn orthogonal(s: Vec<i8>) -> Result<Self> {
        let n = s.len();
        Self::new(vec![0.0; n], vec![0.0; n], s)
    }

    pub fn n_modes(&self) -> usize {
        self.s.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn s(&self) -> &[i8] {
        &self.s
    }

    /// Modes with `s_k = −1`.
    pub fn bipartition(&self) -> ModeSet {
        let mut mask = 0u64;
        for (k, &x) in self.s.iter().enumerate() {
            if x < 0 {
                mask |= 1 << k;
            }
        }
        ModeSet::from_mask(mask)
    }

    /// All signs equal: the bipartition transposes nothing.
    pub fn is_trivial(&self) -> bool {
        self.s.iter().all(|&x| x == self.s[0])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTransform {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl ModeTransform {
    pub fn b(&self, k: usize) -> ModeOperator {
        ModeOperator::linear(self.u[k], self.v[k])
    }

    pub fn b_dagger(&self, k: usize) -> ModeOperator {
        ModeOperator::linear(self.v[k].conj(), self.u[k].conj())
    }

    /// `B(1) = b`, `B(−1) = b†`.
    pub fn big_b(&self, k: usize, s: i8) -> ModeOperator {
        if s > 0 {
            self.b(k)
        } else {
            self.b_dagger(k)
        }
    }

    pub fn number(&self, k: usize) -> ModeOperator {
        &self.b_dagger(k) * &self.b(k)
    }
}

/// `u = (1 + e^{−iδ})/(2√cos δ)`, `v = e^{2iθ}(1 − e^{iδ})/(2√cos δ)`.
pub fn mode_transform(settings: &QuadratureSettings) -> ModeTransform {
    let (u, v) = settings
        .theta
        .iter()
        .zip(&settings.delta)
        .map(|(&theta, &delta)| {
            if delta == 0.0 {
                return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
            }
            let norm = 2.0 * delta.cos().sqrt();
            let u = (C64::new(1.0, 0.0) + C64::from_polar(1.0, -delta)) / norm;
            let v = C64::from_polar(1.0, 2.0 * theta) * (C64::new(1.0, 0.0) - C64::from_polar(1.0, delta)) / norm;
            (u, v)
        })
        .unzip();
    ModeTransform { u, v }
}

/// `(X_k, Y_k)` in terms of the bare ladder operators.
pub fn quadrature_operators(settings: &QuadratureSettings, k: usize) -> (ModeOperator, ModeOperator) {
    let theta = settings.theta[k];
    let phi = theta + settings.delta[k] + f64::from(settings.s[k]) * FRAC_PI_2;
    let quad = |angle: f64| ModeOperator::linear(C64::from_polar(1.0, -angle), C64::from_polar(1.0, angle));
    (quad(theta), quad(phi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfrdReport {
    /// `|⟨∏B_k(s_k)⟩|²`
    pub lhs: f64,
    /// `⟨∏(N_k + 1/(2cos δ_k))⟩`
    pub rhs: f64,
    pub s_squared: f64,
    /// `⟨∏N_k⟩`
    pub product_number_moment: f64,
    /// `⟨∏N_k⟩ − ⟨∏B_k(s_k)⟩⟨∏B_k(−s_k)⟩`
    pub minor_d: f64,
    pub b_product: C64,
    pub b_product_flipped: C64,
    pub bipartition: ModeSet,
    pub trivial_bipartition: bool,
    pub beta: f64,
    pub violated: bool,
    pub settings: QuadratureSettings,
}

fn check_modes<S: MomentSource + ?Sized>(state: &S, settings: &QuadratureSettings) -> Result<()> {
    if settings.n_modes() != state.n_modes() {
        return Err(Error::InvalidSettings(format!(
            "{} settings for a {}-mode state",
            settings.n_modes(),
            state.n_modes()
        )));
    }
    Ok(())
}

/// `⟨∏B(s)⟩` for the given settings.
pub fn b_product<S: MomentSource + ?Sized>(state: &S, settings: &QuadratureSettings, flip: bool) -> Result<C64> {
    check_modes(state, settings)?;
    let t = mode_transform(settings);
    let factors: Vec<_> = (0..settings.n_modes())
        .map(|k| t.big_b(k, if flip { -settings.s[k] } else { settings.s[k] }))
        .collect();
    state.product_expectation(&factors)
}

pub fn cfrd_evaluate<S: MomentSource + ?Sized>(state: &S, settings: &QuadratureSettings) -> Result<CfrdReport> {
    check_modes(state, settings)?;
    let n = settings.n_modes();
    let t = mode_transform(settings);
    let cos: Vec<f64> = settings.delta.iter().map(|d| d.cos()).collect();
    let numbers: Vec<ModeOperator> = (0..n).map(|k| t.number(k)).collect();

    let m = b_product(state, settings, false)?;
    let m_flip = b_product(state, settings, true)?;
    let lhs = m.norm_sqr();

    let shifted: Vec<ModeOperator> = (0..n)
        .map(|k| &numbers[k] + &ModeOperator::identity().scale(C64::new(0.5 / cos[k], 0.0)))
        .collect();
    let rhs = state.product_expectation(&shifted)?.re;
    let product_number_moment = state.product_expectation(&numbers)?.re;

    // every proper subset S of modes contributes ⟨∏_S N⟩ ∏_{k∉S} 1/(2cos δ_k)
    let full = (1u64 << n) - 1;
    let mut s_squared = 0.0;
    for mask in 0..full {
        let factors: Vec<ModeOperator> = (0..n)
            .map(|k| {
                if mask & (1 << k) != 0 {
                    numbers[k].clone()
                } else {
                    ModeOperator::identity()
                }
            })
            .collect();
        let weight: f64 = (0..n).filter(|k| mask & (1 << k) == 0).map(|k| 0.5 / cos[k]).product();
        let moment = if mask == 0 {
            1.0
        } else {
            state.product_expectation(&factors)?.re
        };
        s_squared += weight * moment;
    }

    let minor_d = product_number_moment - (m * m_flip).re;
    let beta = lhs - rhs;
    Ok(CfrdReport {
        lhs,
        rhs,
        s_squared,
        product_number_moment,
        minor_d,
        b_product: m,
        b_product_flipped: m_flip,
        bipartition: settings.bipartition(),
        trivial_bipartition: settings.is_trivial(),
        beta,
        violated: beta > VIOLATION_THRESHOLD,
        settings: settings.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeBound {
    /// `⟨X̃₂⟩² + ⟨Ỹ₂⟩² − ⟨∏(X_k² + Y_k²)⟩`
    pub beta2: f64,
    /// `4 s₁ s₂ cos δ₁ cos δ₂`
    pub bound: f64,
}

/// The two-mode functional built directly from the quadratures, commutators kept.
pub fn two_mode_bound<S: MomentSource + ?Sized>(state: &S, settings: &QuadratureSettings) -> Result<TwoModeBound> {
    check_modes(state, settings)?;
    if settings.n_modes() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the two-mode bound needs 2 modes, got {}",
            settings.n_modes()
        )));
    }
    let (x1, y1) = quadrature_operators(settings, 0);
    let (x2, y2) = quadrature_operators(settings, 1);
    let ev = |a: &ModeOperator, b: &ModeOperator| -> Result<f64> {
        Ok(state.product_expectation(&[a.clone(), b.clone()])?.re)
    };
    // X̃₂ + iỸ₂ = (X₁ + iY₁)(X₂ + iY₂)
    let x_tilde = ev(&x1, &x2)? - ev(&y1, &y2)?;
    let y_tilde = ev(&x1, &y2)? + ev(&y1, &x2)?;
    let r1 = &(&x1 * &x1) + &(&y1 * &y1);
    let r2 = &(&x2 * &x2) + &(&y2 * &y2);
    let beta2 = x_tilde * x_tilde + y_tilde * y_tilde - ev(&r1, &r2)?;
    let s = f64::from(settings.s[0] * settings.s[1]);
    Ok(TwoModeBound {
        beta2,
        bound: 4.0 * s * settings.delta[0].cos() * settings.delta[1].cos(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub report: CfrdReport,
    pub pt_min_eig: Option<f64>,
    pub consistent: bool,
}

/// A violation must come with `D^I < 0` and, where a dense state is at hand,
/// a negative partial transpose over the same bipartition.
pub fn verify_implication<S: MomentSource + ?Sized>(
    state: &S,
    settings: &QuadratureSettings,
    pt_oracle: bool,
) -> Result<Verification> {
    let report = cfrd_evaluate(state, settings)?;
    let pt_min_eig = match state.as_dense() {
        Some(dense) if pt_oracle && !report.trivial_bipartition => {
            Some(partial_transpose_min_eig(dense, report.bipartition)?.min_eigenvalue)
        }
        _ => None,
    };
    let consistent = !report.violated || (report.minor_d < 0.0 && pt_min_eig.is_none_or(|x| x < 0.0));
    Ok(Verification {
        report,
        pt_min_eig,
        consistent,
    })
}
