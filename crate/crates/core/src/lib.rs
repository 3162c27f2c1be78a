//! Ground states of `−Δu + V(x)u = f(u)` on ℝᴺ by minimisation over the
//! Pohožaev manifold, together with executable checks of the hypotheses and
//! inequalities that make the variational argument work.
//!
//! The crate works with radial functions on a uniform mesh (`grid`), builds
//! the energy and Pohožaev functionals on top of it (`functionals`), projects
//! onto the manifold along dilation fibers (`manifold`), computes ground
//! states by three independent routes plus a λ-continuation (`solver`) and
//! bundles the inequality scans into reproducible reports (`verify`). The
//! `config`, `output` and `run` modules back the `pohozaev` binary.

pub mod config;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod manifold;
pub mod model;
pub mod output;
pub mod run;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use functionals::FunctionalContext;
pub use grid::{make_grid, RadialFunction, RadialGrid};
pub use model::{NonlinearitySpec, PotentialSpec};
