//! Lerch transcendent and the Gauss function ₂F₁(1, −t; 1 − t; z).
//!
//! Both are summed directly from their power series, which is all the
//! closed forms need: every argument they produce satisfies |z| < 0.3.
//!
//! ```text
//! Φ(z, 1, a)            = Σ_{k≥0} z^k / (k + a)
//! ₂F₁(1, b; b + 1; z)   = b · Φ(z, 1, b)          (b = −t)
//! ```
//!
//! The k = 1 term of ₂F₁(1, −t; 1 − t; z) is −t·z/(1 − t), which blows up
//! as t → 1. [`hyp2f1_split`] returns it separately so the caller can
//! cancel the pole analytically when z itself carries a factor (1 − t).

use crate::error::{Error, Result};
use crate::num::ipow;
use crate::sum::CompensatedSum;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 1_000_000;

/// Consecutive negligible terms required before the sum is accepted.
const QUIET_TERMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LerchParams {
    z: f64,
    s: u32,
    a: f64,
}

impl LerchParams {
    pub fn new(z: f64, s: u32, a: f64) -> Result<Self> {
        if !z.is_finite() || z.abs() >= 1.0 {
            return Err(Error::domain(format!("Lerch Φ needs |z| < 1, got z = {z}")));
        }
        if s != 1 {
            return Err(Error::domain(format!("Lerch Φ is only implemented for s = 1, got s = {s}")));
        }
        if !a.is_finite() || near_nonpositive_integer(a) {
            return Err(Error::domain(format!("Lerch Φ shift a = {a} hits a pole")));
        }
        Ok(Self { z, s, a })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Upper bound on the neglected tail.
    pub tail_bound: f64,
}

fn near_integer(v: f64) -> Option<f64> {
    let r = v.round();
    ((v - r).abs() <= 4.0 * f64::EPSILON * v.abs().max(1.0)).then_some(r)
}

fn near_nonpositive_integer(v: f64) -> bool {
    matches!(near_integer(v), Some(r) if r <= 0.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance must lie in (0, 1), got {tol}")))
    }
}

/// Σ_{k ≥ k0} z^k / (k + a), stopped once `QUIET_TERMS` consecutive terms
/// fall below `tol` relative to the running sum and the denominators have
/// turned positive (so the geometric tail bound applies).
fn shifted_series(z: f64, a: f64, k0: usize, tol: f64, max_terms: usize) -> Result<SeriesResult> {
    let mut acc = CompensatedSum::new();
    let mut zk = ipow(z, k0 as u32);
    let mut quiet = 0;
    let mut k = k0;
    let mut n = 0;
    loop {
        let term = zk / (k as f64 + a);
        acc.add(term);
        n += 1;
        if term == 0.0 || term.abs() <= tol * acc.value().abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        zk *= z;
        let next = k + 1;
        if zk == 0.0 {
            return Ok(SeriesResult { value: acc.value(), terms_used: n, tail_bound: 0.0 });
        }
        if quiet >= QUIET_TERMS && next as f64 + a > 0.0 {
            let tail = zk.abs() / ((next as f64 + a) * (1.0 - z.abs()));
            return Ok(SeriesResult { value: acc.value(), terms_used: n, tail_bound: tail });
        }
        if n >= max_terms {
            return Err(Error::NonConvergence { terms: n });
        }
        k = next;
    }
}

/// Lerch transcendent Φ(z, 1, a) by direct summation.
pub fn lerch_phi(p: &LerchParams, tol: f64) -> Result<SeriesResult> {
    check_tol(tol)?;
    shifted_series(p.z, p.a, 0, tol, MAX_TERMS)
}

/// Plain partial sum Σ_{k<terms} z^k/(k + a), compensated.
pub fn lerch_partial_sum(p: &LerchParams, terms: usize) -> f64 {
    let mut zk = 1.0;
    let mut acc = CompensatedSum::new();
    for k in 0..terms {
        acc.add(zk / (k as f64 + p.a));
        zk *= p.z;
    }
    acc.value()
}

/// ₂F₁(1, −t; 1 − t; z) with its k = 1 term held apart:
/// value = `regular` + `pole_residue` / (1 − t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Split {
    /// k = 0 term plus Σ_{k≥2}.
    pub regular: f64,
    /// Numerator of the k = 1 term, −t·z.
    pub pole_residue: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

impl Hyp2f1Split {
    pub fn value(&self, t: f64) -> f64 {
        self.regular + self.pole_residue / (1.0 - t)
    }
}

/// Series for ₂F₁(1, −t; 1 − t; z) with the k = 1 term split off.
///
/// Accepts t = 1 (the split part is finite there); rejects t at any other
/// positive integer.
pub fn hyp2f1_split(t: f64, z: f64, tol: f64) -> Result<Hyp2f1Split> {
    check_tol(tol)?;
    if !z.is_finite() || z.abs() >= 1.0 {
        return Err(Error::domain(format!("₂F₁ series needs |z| < 1, got z = {z}")));
    }
    if !t.is_finite() {
        return Err(Error::domain(format!("non-finite t = {t}")));
    }
    if let Some(r) = near_integer(t) {
        if r >= 2.0 {
            return Err(Error::Pole(format!("₂F₁(1, −t; 1 − t; z) has a pole at t = {r}")));
        }
    }
    let tail = shifted_series(z, -t, 2, tol, MAX_TERMS)?;
    Ok(Hyp2f1Split {
        regular: 1.0 - t * tail.value,
        pole_residue: -t * z,
        terms_used: tail.terms_used + 2,
        tail_bound: t.abs() * tail.tail_bound,
    })
}

/// ₂F₁(1, −t; 1 − t; z).
pub fn hyp2f1_special(t: f64, z: f64, tol: f64) -> Result<SeriesResult> {
    if let Some(r) = near_integer(t) {
        if r >= 1.0 {
            return Err(Error::Pole(format!("₂F₁(1, −t; 1 − t; z) has a pole at t = {r}")));
        }
        if r == 0.0 && t == 0.0 {
            check_tol(tol)?;
            return Ok(SeriesResult { value: 1.0, terms_used: 1, tail_bound: 0.0 });
        }
    }
    let split = hyp2f1_split(t, z, tol)?;
    Ok(SeriesResult { value: split.value(t), terms_used: split.terms_used, tail_bound: split.tail_bound })
}

/// First `n` terms of the defining series of ₂F₁(1, b; b + 1; z), b = −t,
/// generated by the term ratio (b + k)/(b + k + 1)·z.
pub fn hyp2f1_series_terms(t: f64, z: f64, n: usize) -> Vec<f64> {
    let b = -t;
    let mut out = Vec::with_capacity(n);
    let mut c = 1.0;
    for k in 0..n {
        out.push(c);
        let kf = k as f64;
        c *= (b + kf) / (b + kf + 1.0) * z;
    }
    out
}
