//! Double synchronous resonance of two rigid ellipsoids on a Keplerian orbit.
//!
//! The crate covers the orbit, body shapes and Stokes coefficients, the
//! truncated mutual potential, the spin equations, periodic solutions with
//! their Floquet multipliers, analytic stability conditions and a command
//! line front end.

pub mod analysis;
pub mod bodies;
pub mod cli;
pub mod dynamics;
pub mod kepler;
pub mod potential;
pub mod solver;
pub mod special;
