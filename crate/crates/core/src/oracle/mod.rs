//! Brute-force radial-grid evaluation of the same matrix elements.
//!
//! Nothing here uses the closed forms. Bound states come from Sturm-count
//! bisection plus inverse iteration on a finite-difference Hamiltonian;
//! Green-function matrix elements come from a direct inhomogeneous solve
//! (Dalgarno–Lewis) in the ℓ = 1 channel. Every functional is computed on
//! three nested grids (spacing h, h/2, h/4) and Richardson-extrapolated in
//! h²; the gap between the last two extrapolation stages is reported as the
//! error estimate.
//!
//! Hartree atomic units throughout. The dimensionless matrix elements carry
//! the 1/3 angular-average factor, which is applied in one place
//! ([`OracleState::resolvent_element`]).

mod level;
pub mod tridiag;

use serde::Serialize;

use crate::closedform::FrequencyX;
use crate::error::{Error, Result};
use crate::exec::Execution;
use level::{count_nodes, Eigenpair, Level};

pub const DEFAULT_POINTS: usize = 6000;
pub const DEFAULT_R_MAX: f64 = 80.0;
pub const DEFAULT_R_MIN: f64 = 1e-12;
pub const MIN_POINTS: usize = 2000;
pub const MIN_R_MAX: f64 = 60.0;

/// Distance (Hartree) from an ℓ = 1 level below which a resolvent is refused.
pub const RESONANCE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    n_points: usize,
    r_min: f64,
    r_max: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self { n_points: DEFAULT_POINTS, r_min: DEFAULT_R_MIN, r_max: DEFAULT_R_MAX }
    }
}

impl RadialGrid {
    pub fn new(n_points: usize, r_max: f64) -> Result<Self> {
        Self::with_r_min(n_points, DEFAULT_R_MIN, r_max)
    }

    pub fn with_r_min(n_points: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::Input(format!("grid needs at least {MIN_POINTS} points, got {n_points}")));
        }
        if !(r_max >= MIN_R_MAX && r_max.is_finite()) {
            return Err(Error::Input(format!("r_max must be at least {MIN_R_MAX} a0, got {r_max}")));
        }
        if !(r_min > 0.0 && r_min < 1e-6) {
            return Err(Error::Input(format!("r_min must lie in (0, 1e-6) a0, got {r_min}")));
        }
        Ok(Self { n_points, r_min, r_max })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Point counts of the three nested levels.
    pub fn level_sizes(&self) -> [usize; 3] {
        let n = self.n_points;
        [n, 2 * n - 1, 4 * n - 3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Length,
    Velocity,
}

/// Cached bound states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    S1,
    S2,
    P2,
}

impl State {
    fn index(self) -> usize {
        match self {
            State::S1 => 0,
            State::S2 => 1,
            State::P2 => 2,
        }
    }

    pub fn quantum_numbers(self) -> (u32, u32) {
        match self {
            State::S1 => (1, 0),
            State::S2 => (2, 0),
            State::P2 => (2, 1),
        }
    }
}

/// Richardson-extrapolated oracle value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub error_estimate: f64,
}

fn extrapolate(f: [f64; 3]) -> OracleValue {
    let stage2 = (4.0 * f[2] - f[1]) / 3.0;
    let value = (64.0 * f[2] - 20.0 * f[1] + f[0]) / 45.0;
    OracleValue { value, error_estimate: (value - stage2).abs() }
}

#[derive(Debug, Clone)]
pub struct BoundState {
    pub n: u32,
    pub l: u32,
    /// Extrapolated energy (Hartree).
    pub energy: f64,
    pub energy_error: f64,
    /// Finest-level grid and u(r) = r·R(r) on it.
    pub r: Vec<f64>,
    pub radial_values: Vec<f64>,
    /// ∫u² dr on the finest level.
    pub norm: f64,
    pub nodes: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct GreenSolve {
    pub driving: Vec<f64>,
    /// Resolvent energy E + ħω (Hartree).
    pub energy_shift: f64,
    pub l_channel: u32,
    pub solution: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorCheck {
    /// ∫u₂P (u₁S' − u₁S/r) dr, i.e. −i⟨2P|p|1S⟩ radial part.
    pub momentum_side: f64,
    /// −(E₂P − E₁S)∫u₂P r u₁S dr.
    pub position_side: f64,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnePhotonRatio {
    pub omega: f64,
    /// M_v/M_ℓ from grid matrix elements.
    pub ratio: f64,
    /// (E₂P − E₁S)/ħω from grid energies.
    pub expected: f64,
    /// ħω coincides with E₂P − E₁S; the ratio is then trivially 1.
    pub resonant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudostateSum {
    pub x: f64,
    /// Partial sums over the lowest 1, 2, … ℓ = 1 grid eigenstates.
    pub partial_sums: Vec<f64>,
    /// Dalgarno–Lewis value on the same (coarsest) level.
    pub dalgarno_lewis: f64,
}

#[derive(Debug)]
struct LevelStates {
    level: Level,
    states: [Eigenpair; 3],
}

impl LevelStates {
    fn build(n_points: usize, grid: &RadialGrid) -> Result<Self> {
        let level = Level::new(n_points, grid.r_min, grid.r_max);
        let states = [level.eigenpair(0, 0)?, level.eigenpair(0, 1)?, level.eigenpair(1, 0)?];
        Ok(Self { level, states })
    }

    fn v(&self, s: State) -> &[f64] {
        &self.states[s.index()].v
    }

    fn energy(&self, s: State) -> f64 {
        self.states[s.index()].energy
    }
}

/// Grid plus cached 1S, 2S and 2P states on all three levels. Immutable once
/// built; share it freely between threads.
#[derive(Debug)]
pub struct OracleState {
    grid: RadialGrid,
    exec: Execution,
    levels: Vec<LevelStates>,
}

impl OracleState {
    pub fn new(grid: RadialGrid) -> Result<Self> {
        Self::with_execution(grid, Execution::default())
    }

    pub fn with_execution(grid: RadialGrid, exec: Execution) -> Result<Self> {
        let sizes = grid.level_sizes();
        let levels = exec.try_map(&sizes, |&n| LevelStates::build(n, &grid))?;
        Ok(Self { grid, exec, levels })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    fn per_level<F>(&self, f: F) -> Result<OracleValue>
    where
        F: Fn(&LevelStates) -> Result<f64> + Sync + Send,
    {
        let vals = self.exec.try_map(&self.levels, f)?;
        Ok(extrapolate([vals[0], vals[1], vals[2]]))
    }

    pub fn energy(&self, s: State) -> OracleValue {
        let e = |i: usize| self.levels[i].energy(s);
        extrapolate([e(0), e(1), e(2)])
    }

    /// Any bound state (n, l); the eigen-solve is repeated on every level.
    pub fn bound(&self, n: u32, l: u32) -> Result<BoundState> {
        if l >= n {
            return Err(Error::Input(format!("need 0 ≤ l < n, got n = {n}, l = {l}")));
        }
        let index = (n - l - 1) as usize;
        let pairs = self.exec.try_map(&self.levels, |ls| ls.level.eigenpair(l, index))?;
        let e = extrapolate([pairs[0].energy, pairs[1].energy, pairs[2].energy]);
        let finest = &self.levels[2].level;
        let top = &pairs[2];
        let radial_values: Vec<f64> = finest.r.iter().zip(&top.v).map(|(r, v)| r.sqrt() * v).collect();
        Ok(BoundState {
            n,
            l,
            energy: e.value,
            energy_error: e.error_estimate,
            r: finest.r.clone(),
            norm: finest.inner(&top.v, &top.v, 2),
            nodes: count_nodes(&top.v),
            residual: pairs.iter().map(|p| p.residual).fold(0.0, f64::max),
            radial_values,
        })
    }

    /// ⟨a|r^k|b⟩ for cached states (k = 0 gives the overlap).
    pub fn radial_moment(&self, a: State, b: State, k: i32) -> Result<OracleValue> {
        self.per_level(|ls| Ok(ls.level.inner(ls.v(a), ls.v(b), k + 2)))
    }

    pub fn overlap(&self, a: State, b: State) -> Result<OracleValue> {
        self.radial_moment(a, b, 0)
    }

    /// ⟨2S|r²|1S⟩ in a₀².
    pub fn r2_overlap(&self) -> Result<OracleValue> {
        self.radial_moment(State::S2, State::S1, 2)
    }

    fn guard_resonance(&self, energy_shift: f64) -> Result<()> {
        let level = &self.levels[0].level;
        let below = level.count_below(1, energy_shift - RESONANCE_GUARD);
        let above = level.count_below(1, energy_shift + RESONANCE_GUARD);
        if below != above {
            return Err(Error::NearResonance(format!(
                "resolvent energy {energy_shift} Hartree within {RESONANCE_GUARD} of an l = 1 level"
            )));
        }
        Ok(())
    }

    /// (1/3)⟨bra| O (H − E_ket − ħω)⁻¹ O |ket⟩ with O = r or p, for S states.
    pub fn resolvent_element(&self, gauge: Gauge, bra: State, ket: State, omega: f64) -> Result<OracleValue> {
        for s in [bra, ket] {
            if s.quantum_numbers().1 != 0 {
                return Err(Error::Input("resolvent elements are defined for S states only".into()));
            }
        }
        self.guard_resonance(self.energy(ket).value + omega)?;
        self.per_level(|ls| {
            let lv = &ls.level;
            let rhs = lv.driving(gauge, ls.v(ket));
            let (w, _) = lv.green(1, ls.energy(ket) + omega, &rhs)?;
            let bra_w = lv.driving(gauge, ls.v(bra));
            Ok(lv.dot(&bra_w, &w) / 3.0)
        })
    }

    /// Dimensionless length-gauge element Q(x).
    pub fn q_oracle(&self, x: FrequencyX) -> Result<OracleValue> {
        self.resolvent_element(Gauge::Length, State::S2, State::S1, x.value())
    }

    /// Dimensionless velocity-gauge element P(x).
    pub fn p_oracle(&self, x: FrequencyX) -> Result<OracleValue> {
        self.resolvent_element(Gauge::Velocity, State::S2, State::S1, x.value())
    }

    /// The Dalgarno–Lewis solve on the finest level, for inspection.
    pub fn green_solve(&self, gauge: Gauge, ket: State, omega: f64) -> Result<GreenSolve> {
        let ls = &self.levels[2];
        let energy_shift = ls.energy(ket) + omega;
        self.guard_resonance(energy_shift)?;
        let driving = ls.level.driving(gauge, ls.v(ket));
        let (solution, residual) = ls.level.green(1, energy_shift, &driving)?;
        Ok(GreenSolve { driving, energy_shift, l_channel: 1, solution, residual })
    }

    /// ⟨2P|p|1S⟩ = i(E₂P − E₁S)⟨2P|r|1S⟩ on the grid.
    pub fn commutator_check(&self) -> Result<CommutatorCheck> {
        let mom = self.per_level(|ls| {
            let lv = &ls.level;
            let d = lv.driving(Gauge::Velocity, ls.v(State::S1));
            Ok(lv.dot(&d, ls.v(State::P2)))
        })?;
        let pos = self.per_level(|ls| {
            let lv = &ls.level;
            let gap = ls.energy(State::P2) - ls.energy(State::S1);
            Ok(-gap * lv.inner(ls.v(State::P2), ls.v(State::S1), 3))
        })?;
        Ok(CommutatorCheck {
            momentum_side: mom.value,
            position_side: pos.value,
            relative_residual: ((mom.value - pos.value) / pos.value).abs(),
        })
    }

    /// Velocity- over length-gauge one-photon 1S → 2P amplitude at ħω.
    pub fn one_photon_ratio(&self, omega: f64) -> Result<OnePhotonRatio> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain(format!("photon energy must be positive, got {omega}")));
        }
        let mom = self.per_level(|ls| {
            let lv = &ls.level;
            Ok(lv.dot(&lv.driving(Gauge::Velocity, ls.v(State::S1)), ls.v(State::P2)))
        })?;
        let pos = self.radial_moment(State::P2, State::S1, 1)?;
        let gap = self.energy(State::P2).value - self.energy(State::S1).value;
        // M_v ∝ ⟨2P|A·p|1S⟩ = −i·mom, M_ℓ ∝ iω⟨2P|A·r|1S⟩
        let ratio = -mom.value / (omega * pos.value);
        Ok(OnePhotonRatio { omega, ratio, expected: gap / omega, resonant: (omega - gap).abs() <= 1e-12 * gap })
    }

    /// Truncated sum over the lowest `count` ℓ = 1 eigenstates of the
    /// coarsest level, compared with the Dalgarno–Lewis solve there.
    pub fn pseudostate_sum(&self, x: FrequencyX, count: usize) -> Result<PseudostateSum> {
        let ls = &self.levels[0];
        let lv = &ls.level;
        let energy = ls.energy(State::S1) + x.value();
        let ket = lv.driving(Gauge::Length, ls.v(State::S1));
        let bra = lv.driving(Gauge::Length, ls.v(State::S2));
        let idx: Vec<usize> = (0..count).collect();
        let terms = self.exec.try_map(&idx, |&j| {
            let p = lv.eigenpair(1, j)?;
            Ok::<f64, Error>(lv.dot(&bra, &p.v) * lv.dot(&ket, &p.v) / (p.energy - energy) / 3.0)
        })?;
        let mut acc = 0.0;
        let partial_sums = terms
            .iter()
            .map(|t| {
                acc += t;
                acc
            })
            .collect();
        let (w, _) = lv.green(1, energy, &ket)?;
        Ok(PseudostateSum { x: x.value(), partial_sums, dalgarno_lewis: lv.dot(&bra, &w) / 3.0 })
    }
}

pub fn solve_bound(grid: &RadialGrid, n: u32, l: u32) -> Result<BoundState> {
    OracleState::new(*grid)?.bound(n, l)
}

pub fn q_oracle(grid: &RadialGrid, x: FrequencyX) -> Result<OracleValue> {
    OracleState::new(*grid)?.q_oracle(x)
}

pub fn p_oracle(grid: &RadialGrid, x: FrequencyX) -> Result<OracleValue> {
    OracleState::new(*grid)?.p_oracle(x)
}

pub fn r2_overlap(grid: &RadialGrid) -> Result<OracleValue> {
    OracleState::new(*grid)?.r2_overlap()
}

pub fn check_one_photon_ratio(grid: &RadialGrid, omega: f64) -> Result<OnePhotonRatio> {
    OracleState::new(*grid)?.one_photon_ratio(omega)
}

/// Master-identity residual on the grid at x:
/// P − [(ΔE − x)(−x)Q + (x − ΔE/2)·(1/3)⟨2S|r²|1S⟩].
pub fn master_identity_residual(state: &OracleState, x: FrequencyX) -> Result<f64> {
    let q = state.q_oracle(x)?.value;
    let p = state.p_oracle(x)?.value;
    let r2 = state.r2_overlap()?.value;
    let gap = state.energy(State::S2).value - state.energy(State::S1).value;
    let xv = x.value();
    Ok(p - ((gap - xv) * (-xv) * q + (xv - 0.5 * gap) * r2 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{p_velocity, q_length, r2_overlap_2s_1s};
    use std::sync::OnceLock;

    const X_RES: f64 = crate::closedform::X_RESONANCE;

    fn state() -> &'static OracleState {
        static STATE: OnceLock<OracleState> = OnceLock::new();
        STATE.get_or_init(|| OracleState::new(RadialGrid::default()).unwrap())
    }

    #[test]
    fn energies_nodes_norm() {
        for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 0)] {
            let b = state().bound(n, l).unwrap();
            assert!((b.energy + 0.5 / (n * n) as f64).abs() < 1e-8, "n = {n}, l = {l}: {}", b.energy);
            assert_eq!(b.nodes, (n - l - 1) as usize);
            assert!((b.norm - 1.0).abs() < 1e-12);
            assert!(b.residual < 1e-8);
        }
        assert!(state().bound(1, 1).is_err());
    }

    #[test]
    fn overlaps_and_moments() {
        let s = state();
        assert!(s.overlap(State::S2, State::S1).unwrap().value.abs() < 1e-10);
        assert!((s.overlap(State::S1, State::S1).unwrap().value - 1.0).abs() < 1e-10);
        // ⟨1S|r²|1S⟩ = 3, ⟨1S|r|1S⟩ = 3/2
        assert!((s.radial_moment(State::S1, State::S1, 2).unwrap().value - 3.0).abs() < 1e-9);
        assert!((s.radial_moment(State::S1, State::S1, 1).unwrap().value - 1.5).abs() < 1e-9);
        assert!((s.r2_overlap().unwrap().value - r2_overlap_2s_1s()).abs() < 1e-6);
    }

    #[test]
    fn commutator_relation() {
        let c = state().commutator_check().unwrap();
        assert!(c.relative_residual < 1e-8, "{c:?}");
    }

    #[test]
    fn one_photon_ratios() {
        for (omega, expected) in [(0.375, 1.0), (0.1875, 2.0), (0.2, 1.875)] {
            let r = state().one_photon_ratio(omega).unwrap();
            assert!((r.ratio - expected).abs() < 1e-8, "{r:?}");
            assert!((r.ratio - r.expected).abs() < 1e-8);
        }
        assert!(state().one_photon_ratio(-0.1).is_err());
    }

    #[test]
    fn agrees_with_closed_forms() {
        for x in [0.05, 0.1, X_RES, 0.25] {
            let fx = FrequencyX::new(x).unwrap();
            let q = state().q_oracle(fx).unwrap();
            let p = state().p_oracle(fx).unwrap();
            assert!((q.value - q_length(x).unwrap()).abs() < 1e-6, "x = {x}");
            assert!((p.value - p_velocity(x).unwrap()).abs() < 1e-6, "x = {x}");
            assert!(q.error_estimate < 1e-6);
        }
    }

    #[test]
    fn master_identity_on_grid() {
        for x in [0.01, 0.1, X_RES, 0.3] {
            let r = master_identity_residual(state(), FrequencyX::new(x).unwrap()).unwrap();
            assert!(r.abs() < 1e-8, "x = {x}: {r}");
        }
    }

    #[test]
    fn pseudostate_sum_approaches_direct_solve() {
        let ps = state().pseudostate_sum(FrequencyX::new(0.1).unwrap(), 40).unwrap();
        let gap = |i: usize| (ps.partial_sums[i] - ps.dalgarno_lewis).abs();
        assert!(gap(39) < gap(9) && gap(9) < gap(0));
        assert!(gap(39) < 1e-2);
    }

    #[test]
    fn resonance_guard() {
        // E₁S + ħω on the 2P level
        let e = state().energy(State::P2).value - state().energy(State::S1).value;
        let err = state().resolvent_element(Gauge::Length, State::S2, State::S1, e).unwrap_err();
        assert!(matches!(err, Error::NearResonance(_)));
        assert!(state().resolvent_element(Gauge::Length, State::P2, State::S1, 0.1).is_err());
    }

    #[test]
    fn sequential_matches_parallel() {
        let grid = RadialGrid::new(MIN_POINTS, DEFAULT_R_MAX).unwrap();
        let x = FrequencyX::new(0.1).unwrap();
        let a = OracleState::with_execution(grid, Execution::Sequential).unwrap().q_oracle(x).unwrap();
        let b = OracleState::with_execution(grid, Execution::Parallel).unwrap().q_oracle(x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extrapolation_kills_h2_and_h4() {
        // f(h) = 1 + a h² + b h⁴ at h, h/2, h/4
        let f = |h: f64| 1.0 + 0.3 * h * h - 0.7 * h.powi(4);
        let v = extrapolate([f(0.1), f(0.05), f(0.025)]);
        assert!((v.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(100, 80.0).is_err());
        assert!(RadialGrid::new(6000, 20.0).is_err());
        assert!(RadialGrid::with_r_min(6000, 1e-3, 80.0).is_err());
        assert_eq!(RadialGrid::default().level_sizes(), [6000, 11999, 23997]);
    }
}
