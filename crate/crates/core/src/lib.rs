//! Implicit-explicit general linear methods of DIMSIM type.
//!
//! The crate provides the fourth- and fifth-order IMEX-DIMSIM pairs, a
//! fixed-step integrator for split systems `y' = f(t, y) + g(t, y)`, linear
//! stability analysis (stability matrices, L-stability and inherited
//! Runge-Kutta stability checks, constrained stability regions and their
//! area), optimization of the explicit component, and the 2D Allen-Cahn and
//! Burgers benchmark problems used to study convergence.

pub mod glm;
pub mod harness;
pub mod integrator;
pub mod linalg;
pub mod methods;
pub mod problems;
pub mod stability;
