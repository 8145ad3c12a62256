//! Length- versus velocity-gauge two-photon 1S–2S matrix elements of
//! atomic hydrogen.
//!
//! * [`specfun`]: Lerch Φ and ₂F₁(1, −t; 1 − t; z) series.
//! * [`closedform`]: analytic Q(x), P(x), gauge difference, two-color sums.
//! * [`oracle`]: independent finite-difference radial solver.
//! * [`identities`]: residual checks and the verification report.
//! * [`rabi`]: SI Rabi coefficient β(x) and Rabi frequency.
//! * [`scan`], [`report`], [`cli`]: CSV/JSON output and the command line.

pub mod cli;
pub mod closedform;
pub mod error;
pub mod exec;
pub mod format;
pub mod identities;
mod num;
pub mod oracle;
pub mod rabi;
pub mod report;
pub mod scan;
pub mod specfun;
pub mod sum;

pub use closedform::{
    gauge_pair, p_velocity, q_length, t_of_x, two_color_q, FormulaVariant, FrequencyX, GaugeAmplitudes, GaugeForms,
    TParam,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use oracle::{OracleState, RadialGrid};
