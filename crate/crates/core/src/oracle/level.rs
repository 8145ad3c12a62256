//! One discretisation level of the radial problem.
//!
//! On s = ln r with uniform spacing h, the substitution u(r) = √r·v(s)
//! turns −½u'' + V_ℓ u = E u into the symmetric pencil
//!
//! ```text
//! −½ v'' + (1/8 + ℓ(ℓ+1)/2 − r) v = E r² v
//! ```
//!
//! discretised with the three-point Laplacian and Dirichlet ends.

use super::tridiag;
use super::Gauge;
use crate::error::{Error, Result};
use crate::num::ipow;
use crate::sum::compensated_sum;

pub(crate) const EIGEN_RESIDUAL_MAX: f64 = 1e-8;
pub(crate) const GREEN_RESIDUAL_MAX: f64 = 1e-8;

#[derive(Debug, Clone)]
pub(crate) struct Level {
    pub h: f64,
    pub r: Vec<f64>,
    r2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    pub energy: f64,
    /// Reduced function v; u = √r·v. Normalised to ∫u² dr = 1.
    pub v: Vec<f64>,
    pub residual: f64,
}

impl Level {
    pub fn new(n_points: usize, r_min: f64, r_max: f64) -> Self {
        let (s0, s1) = (r_min.ln(), r_max.ln());
        let h = (s1 - s0) / (n_points - 1) as f64;
        let r: Vec<f64> = (0..n_points).map(|i| (s0 + i as f64 * h).exp()).collect();
        let r2 = r.iter().map(|r| r * r).collect();
        Self { h, r, r2 }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    fn off(&self) -> f64 {
        -0.5 / (self.h * self.h)
    }

    fn diag(&self, l: u32, energy: f64) -> Vec<f64> {
        let base = 1.0 / (self.h * self.h) + 0.125 + 0.5 * (l * (l + 1)) as f64;
        self.r.iter().zip(&self.r2).map(|(r, r2)| base - r - energy * r2).collect()
    }

    pub fn count_below(&self, l: u32, energy: f64) -> usize {
        tridiag::count_below(&self.diag(l, 0.0), self.off(), &self.r2, energy)
    }

    /// `index`-th eigenvalue (0-based) of the ℓ channel, by bisection.
    pub fn eigenvalue(&self, l: u32, index: usize) -> f64 {
        let diag = self.diag(l, 0.0);
        let off = self.off();
        let count = |e: f64| tridiag::count_below(&diag, off, &self.r2, e);
        let mut lo = -1.0;
        while count(lo) > index {
            lo *= 2.0;
        }
        let mut hi = 0.5;
        while count(hi) <= index {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn eigenpair(&self, l: u32, index: usize) -> Result<Eigenpair> {
        let energy = self.eigenvalue(l, index);
        let shift = energy - 1e-12 * energy.abs().max(1e-3);
        let diag = self.diag(l, shift);
        let off = self.off();
        let mut v = vec![1.0; self.len()];
        for _ in 0..3 {
            let rhs: Vec<f64> = v.iter().zip(&self.r2).map(|(v, w)| v * w).collect();
            v = tridiag::solve(&diag, off, &rhs)
                .ok_or_else(|| Error::Convergence(format!("singular shift at E = {energy}")))?;
            let norm = self.inner(&v, &v, 2).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let a_v = tridiag::apply(&self.diag(l, 0.0), off, &v);
        let res: Vec<f64> = a_v.iter().zip(&v).zip(&self.r2).map(|((av, v), w)| av - energy * w * v).collect();
        let residual = norm2(&res) / norm2(&a_v);
        if residual > EIGEN_RESIDUAL_MAX {
            return Err(Error::Convergence(format!("eigenpair (l = {l}, index = {index}) residual {residual:e}")));
        }
        Ok(Eigenpair { energy, v, residual })
    }

    /// Solves (A_ℓ − E·W)w = rhs and returns w with the relative residual.
    pub fn green(&self, l: u32, energy: f64, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
        let diag = self.diag(l, energy);
        let off = self.off();
        let w = tridiag::solve(&diag, off, rhs)
            .ok_or_else(|| Error::Convergence(format!("singular Green solve at E = {energy}")))?;
        let back = tridiag::apply(&diag, off, &w);
        let res: Vec<f64> = back.iter().zip(rhs).map(|(a, b)| a - b).collect();
        let residual = norm2(&res) / norm2(rhs);
        if residual > GREEN_RESIDUAL_MAX {
            return Err(Error::Convergence(format!("Green solve residual {residual:e} at E = {energy}")));
        }
        Ok((w, residual))
    }

    /// ∫ r^(power−2) u_a u_b dr = h Σ r^power v_a v_b.
    pub fn inner(&self, a: &[f64], b: &[f64], power: i32) -> f64 {
        let weight = |r: f64| if power >= 0 { ipow(r, power as u32) } else { 1.0 / ipow(r, power.unsigned_abs()) };
        self.h * compensated_sum(self.r.iter().zip(a).zip(b).map(|((r, a), b)| weight(*r) * a * b))
    }

    pub fn deriv(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let at = |i: isize| if i < 0 || i as usize >= n { 0.0 } else { v[i as usize] };
        (0..n as isize).map(|i| (at(i + 1) - at(i - 1)) / (2.0 * self.h)).collect()
    }

    /// Right-hand side of the v-equation for r|S⟩ (length) or p|S⟩
    /// (velocity) projected on the ℓ = 1 channel. The same vector is the
    /// bra weight: ⟨a|O G O|b⟩ = h·driving(a)·G·driving(b).
    pub fn driving(&self, gauge: Gauge, v: &[f64]) -> Vec<f64> {
        match gauge {
            Gauge::Length => self.r.iter().zip(v).map(|(r, v)| r * r * r * v).collect(),
            Gauge::Velocity => {
                let dv = self.deriv(v);
                self.r.iter().zip(v).zip(&dv).map(|((r, v), dv)| r * (dv - 0.5 * v)).collect()
            }
        }
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.h * compensated_sum(a.iter().zip(b).map(|(a, b)| a * b))
    }
}

fn norm2(v: &[f64]) -> f64 {
    compensated_sum(v.iter().map(|x| x * x)).sqrt()
}

pub(crate) fn count_nodes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut nodes = 0;
    for &x in v {
        if x.abs() < 1e-6 * peak {
            continue;
        }
        if last != 0.0 && x.signum() != last {
            nodes += 1;
        }
        last = x.signum();
    }
    nodes
}
