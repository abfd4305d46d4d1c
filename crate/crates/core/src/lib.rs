//! Information geometry of thermal states of the isotropic Lipkin-Meshkov-Glick model.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectrum`]: exact sector decomposition, ground state, dense oracle
//! * [`thermal`]: canonical ensemble and moments at finite N
//! * [`metric`]: finite-N fidelity metric by three independent routes
//! * [`limit`]: thermodynamic-limit phase structure, metric and curvature
//! * [`numerics`]: log-sum-exp, root finding, Richardson differences
//! * [`scan`] and [`audit`]: grid drivers and variant comparisons used by the CLI

pub mod audit;
pub mod error;
pub mod limit;
pub mod metric;
mod mp;
pub mod numerics;
pub mod scan;
pub mod spectrum;
pub mod thermal;

pub use error::{Error, Result};
pub use limit::{Phase, PhasePoint, RicciMethod, Variant};
pub use metric::MetricTensor2;
pub use spectrum::ModelParams;
pub use thermal::{ThermalEnsemble, ThermalMoments};
