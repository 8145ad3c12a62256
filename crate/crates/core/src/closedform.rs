//! Analytic 1S–2S two-photon matrix elements of hydrogen.
//!
//! Dimensionless length-gauge element (atomic units, Z = 1)
//!
//! ```text
//! Q(x) = (1/3) ⟨2S| r · (H − E₁S − x)⁻¹ · r |1S⟩
//! P(x) = (1/3) ⟨2S| p · (H − E₁S − x)⁻¹ · p |1S⟩
//! ```
//!
//! with x = ħω/(α²mc²). Both are rational functions of
//! ν = 1/√(1 − 2x) plus a rational multiple of F = ₂F₁(1, −ν; 1 − ν; z),
//! z = (1 − ν)(2 − ν)/((1 + ν)(2 + ν)). ν is the effective principal quantum
//! number of the intermediate energy E₁S + ħω = −1/(2ν²); the window
//! 0 < x < 3/8 maps to 1 < ν < 2.
//!
//! Near ν = 1 (x → 0) the rational part and the ₂F₁ part both diverge like
//! (ν − 1)⁻² while their sum stays finite. Inside a small band around ν = 1
//! the value is taken from a Chebyshev interpolant built on nodes outside
//! the band ([`Evaluation::limit_path`] is set when that happens).

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::ipow;
use crate::specfun::{hyp2f1_split, lerch_phi, LerchParams};

/// Two-photon resonance, ħω_R = (E₂S − E₁S)/2.
pub const X_RESONANCE: f64 = 3.0 / 16.0;
/// E₂S − E₁S in units of α²mc²; upper edge of the frequency window.
pub const X_TRANSITION: f64 = 3.0 / 8.0;

pub(crate) const SERIES_TOL: f64 = 1e-16;

/// |ν − 1| below which the limit path is used.
pub const LIMIT_BAND: f64 = 5e-3;
const CHEB_HALF_WIDTH: f64 = 0.2;
const CHEB_NODES: usize = 32;

/// Slope magnitude of the gauge difference, 512√2/729.
pub fn delta_slope() -> f64 {
    512.0 * SQRT_2 / 729.0
}

/// ⟨2S|r²|1S⟩ in a₀², −512√2/243.
pub fn r2_overlap_2s_1s() -> f64 {
    -512.0 * SQRT_2 / 243.0
}

/// Closed-form gauge difference −(512√2/729)(x − 3/16).
pub fn delta_linear(x: f64) -> f64 {
    -delta_slope() * (x - X_RESONANCE)
}

/// Photon energy in units of α²mc², restricted to the open window (0, 3/8).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FrequencyX(f64);

impl FrequencyX {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && x > 0.0 && x < X_TRANSITION {
            Ok(Self(x))
        } else {
            Err(Error::domain(format!("x = {x} outside the window (0, 3/8)")))
        }
    }

    pub fn resonance() -> Self {
        Self(X_RESONANCE)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Partner frequency of a resonant two-color pair, x₂ = 3/8 − x₁.
    pub fn partner(self) -> Result<Self> {
        Self::new(X_TRANSITION - self.0)
    }
}

/// t = √(1 − 2x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TParam {
    t: f64,
}

impl TParam {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// ν = 1/t, the variable the closed forms are written in.
    pub fn nu(&self) -> f64 {
        1.0 / self.t
    }

    pub fn x(&self) -> f64 {
        (1.0 - self.t * self.t) / 2.0
    }
}

pub fn t_of_x(x: f64) -> Result<TParam> {
    if !(x.is_finite() && x > 0.0 && x < 0.5) {
        return Err(Error::domain(format!("t = √(1 − 2x) needs 0 < x < 1/2, got {x}")));
    }
    Ok(TParam { t: (1.0 - 2.0 * x).sqrt() })
}

/// Which algebraic form of the ₂F₁ terms to evaluate.
///
/// `Derived` is the form that agrees with the radial-grid oracle. The other
/// two reproduce the printed literature expression (no ν⁹/ν⁵ factors) with
/// the two readings of the second denominator of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaVariant {
    #[default]
    Derived,
    /// Second denominator (ν² − 2)³(ν² − 1)².
    PrintedQuadratic,
    /// Second denominator (ν − 2)³(ν + 2)²(ν² − 1)².
    PrintedFactored,
}

impl FormulaVariant {
    pub const ALL: [FormulaVariant; 3] =
        [FormulaVariant::Derived, FormulaVariant::PrintedQuadratic, FormulaVariant::PrintedFactored];

    pub fn name(self) -> &'static str {
        match self {
            FormulaVariant::Derived => "derived",
            FormulaVariant::PrintedQuadratic => "printed-quadratic",
            FormulaVariant::PrintedFactored => "printed-factored",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Set when the value came from the interpolated limit path near ν = 1.
    pub limit_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeAmplitudes {
    pub x: FrequencyX,
    pub q: f64,
    pub p: f64,
    pub f1: f64,
    pub f2: f64,
    pub delta: f64,
    pub limit_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceConstants {
    pub x_r: f64,
    pub q_r: f64,
    pub p_r: f64,
}

#[derive(Debug, Clone, Copy)]
enum Quantity {
    Q,
    P,
}

/// ₂F₁(1, −ν; 1 − ν; z(ν)) with the k = 1 pole cancelled against the
/// (1 − ν) factor of z.
fn hyp_f(nu: f64) -> Result<f64> {
    let z = (1.0 - nu) * (2.0 - nu) / ((1.0 + nu) * (2.0 + nu));
    let split = hyp2f1_split(nu, z, SERIES_TOL)?;
    // pole_residue/(1 − ν) = −ν·z/(1 − ν)
    let pole = -nu * (2.0 - nu) / ((1.0 + nu) * (2.0 + nu));
    Ok(split.regular + pole)
}

fn q_raw(nu: f64, variant: FormulaVariant) -> Result<f64> {
    let f = hyp_f(nu)?;
    let (nm2, nm1, np1, np2) = (nu - 2.0, nu - 1.0, nu + 1.0, nu + 2.0);
    let poly = ((((((419.0 * nu + 134.0) * nu - 15.0) * nu + 30.0) * nu + 60.0) * nu - 120.0) * nu - 32.0) * nu + 64.0;
    let common = nm1 * nm1 * np1 * np1;
    let rational = 512.0 * SQRT_2 * nu * nu * poly / (729.0 * ipow(nm2, 3) * common * np2 * np2);
    let hyp = match variant {
        FormulaVariant::Derived => 4096.0 * SQRT_2 * ipow(nu, 9) * f / (3.0 * ipow(nm2, 3) * common * ipow(np2, 3)),
        FormulaVariant::PrintedQuadratic => 4096.0 * SQRT_2 * f / (3.0 * ipow(nu * nu - 2.0, 3) * common),
        FormulaVariant::PrintedFactored => 4096.0 * SQRT_2 * f / (3.0 * ipow(nm2, 3) * np2 * np2 * common),
    };
    Ok(rational - hyp)
}

fn p_raw(nu: f64, variant: FormulaVariant) -> Result<f64> {
    let f = hyp_f(nu)?;
    let (nm2, np2) = (nu - 2.0, nu + 2.0);
    let nn1 = (nu - 1.0) * (nu + 1.0);
    let rational =
        64.0 * SQRT_2 / 81.0 * nu * nu * (((23.0 * nu + 8.0) * nu + 1.0) * nu - 2.0) / (nm2 * nm2 * nn1 * np2);
    let weight = match variant {
        FormulaVariant::Derived => ipow(nu, 5),
        FormulaVariant::PrintedQuadratic | FormulaVariant::PrintedFactored => 1.0,
    };
    let hyp = 256.0 * SQRT_2 * weight * f / (3.0 * nm2 * nm2 * nn1 * np2 * np2);
    Ok(rational - hyp)
}

fn raw(quantity: Quantity, nu: f64, variant: FormulaVariant) -> Result<f64> {
    match quantity {
        Quantity::Q => q_raw(nu, variant),
        Quantity::P => p_raw(nu, variant),
    }
}

/// Barycentric Chebyshev interpolation (first kind) of `raw` on
/// [1 − w, 1 + w], evaluated at `nu`.
fn limit_value(quantity: Quantity, nu: f64, variant: FormulaVariant) -> Result<f64> {
    let m = CHEB_NODES as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..CHEB_NODES {
        let theta = (2 * j + 1) as f64 * PI / (2.0 * m);
        let node = 1.0 + CHEB_HALF_WIDTH * theta.cos();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * theta.sin() / (nu - node);
        num += w * raw(quantity, node, variant)?;
        den += w;
    }
    Ok(num / den)
}

/// Evaluator for Q, P and the derived comparisons under one formula variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GaugeForms {
    variant: FormulaVariant,
}

impl GaugeForms {
    pub fn new(variant: FormulaVariant) -> Self {
        Self { variant }
    }

    pub fn variant(&self) -> FormulaVariant {
        self.variant
    }

    fn eval(&self, quantity: Quantity, x: FrequencyX) -> Result<Evaluation> {
        let nu = 1.0 / (1.0 - 2.0 * x.value()).sqrt();
        if (nu - 1.0).abs() < LIMIT_BAND {
            Ok(Evaluation { value: limit_value(quantity, nu, self.variant)?, limit_path: true })
        } else {
            Ok(Evaluation { value: raw(quantity, nu, self.variant)?, limit_path: false })
        }
    }

    pub fn q(&self, x: FrequencyX) -> Result<Evaluation> {
        self.eval(Quantity::Q, x)
    }

    pub fn p(&self, x: FrequencyX) -> Result<Evaluation> {
        self.eval(Quantity::P, x)
    }

    pub fn pair(&self, x: FrequencyX) -> Result<GaugeAmplitudes> {
        let q = self.q(x)?;
        let p = self.p(x)?;
        let xv = x.value();
        let f1 = p.value;
        let f2 = (X_TRANSITION - xv) * (-xv) * q.value;
        Ok(GaugeAmplitudes {
            x,
            q: q.value,
            p: p.value,
            f1,
            f2,
            delta: f1 - f2,
            limit_path: q.limit_path || p.limit_path,
        })
    }

    /// (3/4)[Q(ω₁) + Q(ω₂)] with ω₂ = (E₂S − E₁S) − ω₁.
    pub fn two_color_q(&self, x1: FrequencyX) -> Result<f64> {
        let x2 = x1.partner()?;
        Ok(0.75 * (self.q(x1)?.value + self.q(x2)?.value))
    }

    /// Velocity-gauge counterpart (3/4)[P(ω₁) + P(ω₂)].
    pub fn two_color_p(&self, x1: FrequencyX) -> Result<f64> {
        let x2 = x1.partner()?;
        Ok(0.75 * (self.p(x1)?.value + self.p(x2)?.value))
    }
}

pub fn q_length(x: f64) -> Result<f64> {
    Ok(GaugeForms::default().q(FrequencyX::new(x)?)?.value)
}

pub fn p_velocity(x: f64) -> Result<f64> {
    Ok(GaugeForms::default().p(FrequencyX::new(x)?)?.value)
}

pub fn gauge_pair(x: f64) -> Result<GaugeAmplitudes> {
    GaugeForms::default().pair(FrequencyX::new(x)?)
}

pub fn two_color_q(x1: f64) -> Result<f64> {
    GaugeForms::default().two_color_q(FrequencyX::new(x1)?)
}

pub fn resonance_constants() -> Result<ResonanceConstants> {
    let forms = GaugeForms::default();
    let x = FrequencyX::resonance();
    Ok(ResonanceConstants { x_r: X_RESONANCE, q_r: forms.q(x)?.value, p_r: forms.p(x)?.value })
}

/// Q(ω_R) through its Lerch-transcendent form
/// −(2¹⁵/3⁶)[19√2 + 16√5 + 64√2 Φ(−19 + 6√10, 1, −2√(2/5))].
pub fn q_resonance_lerch() -> Result<f64> {
    let phi = lerch_phi(&LerchParams::new(-19.0 + 6.0 * 10f64.sqrt(), 1, -2.0 * (2.0f64 / 5.0).sqrt())?, SERIES_TOL)?;
    Ok(-(32768.0 / 729.0) * (19.0 * SQRT_2 + 16.0 * 5f64.sqrt() + 64.0 * SQRT_2 * phi.value))
}

/// Two-color value at x₁ = 7/20 through its Lerch-transcendent form
/// −(160000/343)[157√2 + 56√15 + 2√190 + 560√2 Φ₁ + 40√2 Φ₂] with
/// Φ₁ = Φ((−263 + 48√30)/7, 1, −√(10/3)), Φ₂ = Φ((−848 + 87√95)/7, 1, −2√(5/19)).
pub fn two_color_q_lerch_7_20() -> Result<f64> {
    let phi1 =
        lerch_phi(&LerchParams::new((-263.0 + 48.0 * 30f64.sqrt()) / 7.0, 1, -(10.0f64 / 3.0).sqrt())?, SERIES_TOL)?;
    let phi2 = lerch_phi(
        &LerchParams::new((-848.0 + 87.0 * 95f64.sqrt()) / 7.0, 1, -2.0 * (5.0f64 / 19.0).sqrt())?,
        SERIES_TOL,
    )?;
    let bracket = 157.0 * SQRT_2
        + 56.0 * 15f64.sqrt()
        + 2.0 * 190f64.sqrt()
        + 560.0 * SQRT_2 * phi1.value
        + 40.0 * SQRT_2 * phi2.value;
    Ok(-(160_000.0 / 343.0) * bracket)
}
