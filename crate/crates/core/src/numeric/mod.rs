//! Small numerical building blocks shared by the solvers.

pub mod ode;
pub mod quad;
pub mod scalar;
