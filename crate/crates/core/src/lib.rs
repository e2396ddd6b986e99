//! Sticky finite-size particles on the line.
//!
//! Two engines describe the same dynamics. [`particles`] simulates `N`
//! rigid particles exactly, event by event. [`continuum`] evolves the
//! Lagrangian potential `Ψ(m, t) = [Ψ̄ + t V̄]_ε` with ε-convex hulls and
//! recovers density and velocity through the Legendre transform.
//! [`harness`] compares the two.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuum;
pub mod convex;
pub mod cumulative;
pub mod error;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod legendre;
pub mod particles;
pub mod propagator;

pub use convex::{
    cluster_decomposition, convex_hull, eps_convex_hull, is_eps_convex, parabola_splice,
    ClusterDecomposition, EpsParabola,
};
pub use cumulative::{l1_distance, sup_distance, PiecewiseLinear};
pub use error::{Error, Result};
pub use grid::GridFunction;
pub use initial::InitialData;
pub use legendre::{derivative, generalized_inverse, legendre};
pub use particles::{Cluster, ParticleSystem};
pub use propagator::{evolve_schedule, flatten_velocity, propagate, PropagatorInput};
