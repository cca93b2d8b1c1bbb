//! Independent reference solvers used to validate the closed forms and the
//! frame-transformed integration.

mod dense;
mod sector;

pub use dense::{
    dense_propagate, dense_propagate_fixed, dense_trajectory, dense_trajectory_refined, DenseHamiltonianSpec, Model,
    SELF_CONVERGENCE_TOL,
};
pub use sector::{ode_basis_solutions, ode_sector_matrix, ode_sector_oracle, ORACLE_ABS_TOL, ORACLE_REL_TOL};
