//! Quantum trajectories through a double slit.
//!
//! Trajectories follow either the de Broglie–Bohm guidance field or a
//! revised field whose extra term carries each particle's sampled initial
//! momentum while leaving the continuity equation intact. Ensembles of both
//! are compared with the closed-form position and momentum densities.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod verify;
pub mod quadrature;
pub mod sampling;
pub mod wavefield;

pub use dynamics::{integrate, IntegrationSchedule, Sample, Trajectory, TrajectoryStatus};
pub use ensemble::{run_ensemble, EnsembleConfig, EnsembleResult, Observable};
pub use error::{QtrajError, Result};
pub use sampling::{InitialCondition, SeededStream, Theory};
pub use wavefield::{ComplexAmplitude, DoubleSlitParams, UnitSystem};
