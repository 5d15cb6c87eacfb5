//! Weak-coupling limit of the spin–boson model: spectral transforms, limit
//! coefficients, reduced spin dynamics and a brute-force oracle.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod limits;
pub mod model;
pub mod operator;
pub mod oracle;
pub mod quadrature;
pub mod spectral;

pub use dynamics::{FrequencyBranch, Observable, TimeSeries};
pub use error::{Error, Result};
pub use limits::{LimitCoefficients, Regime, RegimeReport};
pub use model::{eigensystem, Eigensystem, SystemParams};
pub use operator::{Basis, SpinOperator, SpinState};
pub use spectral::{QuadratureSettings, SpectralDensity};
