//! SI observables from the length-gauge element: the two-photon Rabi
//! coefficient β(x) in Hz·m²/W and the Rabi frequency Ω = 2·(2πβ)·I.
//!
//! ```text
//! β(x) = −e²ħ / (α⁴ m³ c⁵ · 4πε₀) · Q(x)
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::closedform::{FrequencyX, GaugeForms, X_RESONANCE};
use crate::error::{Error, Result};
use crate::num::ipow;

/// Environment variable naming a constants file when none is given explicitly.
pub const CONSTANTS_ENV: &str = "GAUGE_WORKBENCH_CONSTANTS";

/// Central-difference step for dβ/dx, and the validation step.
pub const SLOPE_STEP: f64 = 1e-6;
pub const SLOPE_CHECK_STEP: f64 = 1e-7;
/// Relative agreement required between the two step sizes.
pub const SLOPE_AGREEMENT: f64 = 1e-5;

/// Half-width of the window around x_R where the linear expansion is offered.
pub const TRUST_RADIUS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    /// kg
    pub m_e: f64,
    /// m/s
    pub c: f64,
    /// J·s
    pub hbar: f64,
    /// C
    pub e: f64,
    /// F/m
    pub eps0: f64,
    pub provenance_tag: String,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata_2018()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsFile {
    alpha: Option<f64>,
    m_e: Option<f64>,
    c: Option<f64>,
    hbar: Option<f64>,
    e: Option<f64>,
    eps0: Option<f64>,
    provenance_tag: Option<String>,
}

impl PhysicalConstants {
    pub fn codata_2018() -> Self {
        Self {
            alpha: 7.297_352_569_3e-3,
            m_e: 9.109_383_701_5e-31,
            c: 299_792_458.0,
            hbar: 1.054_571_817e-34,
            e: 1.602_176_634e-19,
            eps0: 8.854_187_812_8e-12,
            provenance_tag: "CODATA-2018".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("m_e", self.m_e),
            ("c", self.c),
            ("hbar", self.hbar),
            ("e", self.e),
            ("eps0", self.eps0),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Input(format!("constant {name} must be positive and finite, got {v}")));
            }
        }
        if self.provenance_tag.trim().is_empty() {
            return Err(Error::Input("constants need a non-empty provenance_tag".into()));
        }
        Ok(())
    }

    /// Parses `name = value` lines. Keys not given keep their CODATA 2018
    /// values; if any value is overridden without a `provenance_tag`, the
    /// tag becomes `custom`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConstantsFile = toml::from_str(text).map_err(|e| Error::Input(format!("constants file: {e}")))?;
        let mut k = Self::codata_2018();
        let overrides = [
            (&mut k.alpha, file.alpha),
            (&mut k.m_e, file.m_e),
            (&mut k.c, file.c),
            (&mut k.hbar, file.hbar),
            (&mut k.e, file.e),
            (&mut k.eps0, file.eps0),
        ];
        let mut changed = false;
        for (slot, v) in overrides {
            if let Some(v) = v {
                changed |= *slot != v;
                *slot = v;
            }
        }
        k.provenance_tag = match file.provenance_tag {
            Some(tag) => tag,
            None if changed => "custom".into(),
            None => k.provenance_tag,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Explicit path, else the file named by [`CONSTANTS_ENV`], else the
    /// built-in defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match Self::resolve_path(path) {
            Some(p) => Self::from_file(&p),
            None => Ok(Self::codata_2018()),
        }
    }

    pub fn resolve_path(path: Option<&Path>) -> Option<PathBuf> {
        path.map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONSTANTS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
    }

    /// e²ħ/(α⁴m³c⁵·4πε₀), the factor turning −Q into β (Hz·m²/W).
    pub fn beta_prefactor(&self) -> f64 {
        let four_pi_eps0 = 4.0 * std::f64::consts::PI * self.eps0;
        self.e * self.e * self.hbar / (ipow(self.alpha, 4) * ipow(self.m_e, 3) * ipow(self.c, 5) * four_pi_eps0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiInput {
    pub x: FrequencyX,
    /// W/m²
    pub intensity: f64,
}

impl RabiInput {
    pub fn new(x: FrequencyX, intensity: f64) -> Result<Self> {
        if !(intensity.is_finite() && intensity >= 0.0) {
            return Err(Error::domain(format!("intensity must be finite and ≥ 0, got {intensity}")));
        }
        Ok(Self { x, intensity })
    }
}

/// Rabi coefficient β(x) in Hz·m²/W.
pub fn beta(x: FrequencyX, k: &PhysicalConstants) -> Result<f64> {
    beta_with(&GaugeForms::default(), x, k)
}

pub fn beta_with(forms: &GaugeForms, x: FrequencyX, k: &PhysicalConstants) -> Result<f64> {
    Ok(-k.beta_prefactor() * forms.q(x)?.value)
}

/// Ω = 2·(2πβ)·I in rad/s.
pub fn rabi_frequency(inp: RabiInput, k: &PhysicalConstants) -> Result<f64> {
    Ok(2.0 * (2.0 * std::f64::consts::PI * beta(inp.x, k)?) * inp.intensity)
}

fn central_difference(x: f64, step: f64, k: &PhysicalConstants) -> Result<f64> {
    let hi = beta(FrequencyX::new(x + step)?, k)?;
    let lo = beta(FrequencyX::new(x - step)?, k)?;
    Ok((hi - lo) / (2.0 * step))
}

/// dβ/dx at `x` by central differences, cross-checked against a second step.
pub fn beta_slope(x: FrequencyX, k: &PhysicalConstants) -> Result<f64> {
    let d1 = central_difference(x.value(), SLOPE_STEP, k)?;
    let d2 = central_difference(x.value(), SLOPE_CHECK_STEP, k)?;
    let rel = ((d1 - d2) / d1).abs();
    if rel.is_nan() || rel > SLOPE_AGREEMENT {
        return Err(Error::Convergence(format!(
            "dβ/dx step sizes {SLOPE_STEP:e} and {SLOPE_CHECK_STEP:e} disagree by {rel:e}"
        )));
    }
    Ok(d1)
}

/// β(x_R) + β'(x_R)(x − x_R), offered for |x − x_R| < 0.05.
pub fn beta_linearized(x: FrequencyX, k: &PhysicalConstants) -> Result<f64> {
    let dx = x.value() - X_RESONANCE;
    if dx.abs() >= TRUST_RADIUS {
        return Err(Error::domain(format!(
            "linear expansion needs |x − 3/16| < {TRUST_RADIUS}, got x = {}",
            x.value()
        )));
    }
    let xr = FrequencyX::resonance();
    let b0 = beta(xr, k)?;
    if dx == 0.0 {
        return Ok(b0);
    }
    Ok(b0 + beta_slope(xr, k)? * dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k() -> PhysicalConstants {
        PhysicalConstants::codata_2018()
    }

    #[test]
    fn resonance_coefficient() {
        let b = beta(FrequencyX::resonance(), &k()).unwrap();
        assert_relative_eq!(b, 3.68111e-5, max_relative = 1e-3);
        assert_relative_eq!(b, k().beta_prefactor() * 7.853_655_422, max_relative = 1e-9);
        assert!(b > 0.0);
    }

    #[test]
    fn prefactor_reduces_to_atomic_form() {
        // e²/(4πε₀) = αħc ⇒ prefactor = ħ²/(α³m³c⁴)
        let k = k();
        let alt = k.hbar * k.hbar / (ipow(k.alpha, 3) * ipow(k.m_e, 3) * ipow(k.c, 4));
        assert_relative_eq!(k.beta_prefactor(), alt, max_relative = 1e-9);
    }

    #[test]
    fn slope() {
        let s = beta_slope(FrequencyX::resonance(), &k()).unwrap();
        assert_relative_eq!(s, 2.32293e-4, max_relative = 1e-3);
    }

    #[test]
    fn linearization() {
        let k = k();
        let xr = FrequencyX::resonance();
        assert_eq!(beta_linearized(xr, &k).unwrap(), beta(xr, &k).unwrap());
        let x = FrequencyX::new(X_RESONANCE + 0.01).unwrap();
        assert_relative_eq!(beta_linearized(x, &k).unwrap(), beta(x, &k).unwrap(), max_relative = 1e-2);
        let far = FrequencyX::new(0.3).unwrap();
        assert!(matches!(beta_linearized(far, &k), Err(Error::Domain(_))));
    }

    #[test]
    fn rabi_frequency_is_linear_in_intensity() {
        let k = k();
        let xr = FrequencyX::resonance();
        assert_eq!(rabi_frequency(RabiInput::new(xr, 0.0).unwrap(), &k).unwrap(), 0.0);
        let one = rabi_frequency(RabiInput::new(xr, 1e4).unwrap(), &k).unwrap();
        let two = rabi_frequency(RabiInput::new(xr, 2e4).unwrap(), &k).unwrap();
        assert_relative_eq!(two, 2.0 * one, max_relative = 1e-15);
        assert_relative_eq!(one, 4.6255, max_relative = 1e-3);
        assert!(RabiInput::new(xr, -1.0).is_err());
    }

    /// Exponents of (kg, m, s, A).
    #[derive(Debug, Clone, Copy, PartialEq)]
    struct Dim([i32; 4]);

    impl Dim {
        fn mul(self, o: Dim) -> Dim {
            Dim(std::array::from_fn(|i| self.0[i] + o.0[i]))
        }
        fn pow(self, n: i32) -> Dim {
            Dim(self.0.map(|e| e * n))
        }
        fn inv(self) -> Dim {
            self.pow(-1)
        }
    }

    #[test]
    fn unit_audit() {
        let one = Dim([0, 0, 0, 0]);
        let kg = Dim([1, 0, 0, 0]);
        let m = Dim([0, 1, 0, 0]);
        let s = Dim([0, 0, 1, 0]);
        let a = Dim([0, 0, 0, 1]);
        let coulomb = a.mul(s);
        let joule = kg.mul(m.pow(2)).mul(s.pow(-2));
        let hbar = joule.mul(s);
        let velocity = m.mul(s.inv());
        let farad_per_m = coulomb.pow(2).mul(joule.inv()).mul(m.inv());
        let alpha = one;
        let prefactor =
            coulomb.pow(2).mul(hbar).mul(alpha.pow(4).mul(kg.pow(3)).mul(velocity.pow(5)).mul(farad_per_m).inv());
        let intensity = joule.mul(s.inv()).mul(m.pow(-2));
        assert_eq!(prefactor.mul(intensity), s.inv());
    }

    #[test]
    fn constants_file() {
        let k = PhysicalConstants::from_toml_str("alpha = 7.2973525693e-3\n").unwrap();
        assert_eq!(k, PhysicalConstants::codata_2018());
        let k = PhysicalConstants::from_toml_str("alpha = 7.2973525664e-3\n").unwrap();
        assert_eq!(k.provenance_tag, "custom");
        let k = PhysicalConstants::from_toml_str("c = 299792458.0\nprovenance_tag = \"CODATA-2014\"").unwrap();
        assert_eq!(k.provenance_tag, "CODATA-2014");
        assert!(PhysicalConstants::from_toml_str("hbar = -1.0").is_err());
        assert!(PhysicalConstants::from_toml_str("planck = 6.6e-34").is_err());
        assert!(PhysicalConstants::from_toml_str("alpha = ").is_err());
    }
}
