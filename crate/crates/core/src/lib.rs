//! Enumeration of Nash equilibria of finite normal-form games by solving the
//! polynomial indifference systems of every support with homotopy
//! continuation from a totally nonsingular start system.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact;
pub mod game;
pub mod homotopy;
pub mod nash;
pub mod poly;
pub mod startsys;

pub use error::{Error, Result};
pub use game::{Game, GameFormat, MixedProfile};
pub use poly::{build_system_e, Monomial, PolySystem, Polynomial, Support};
pub use startsys::{
    bernstein_number, build_start_system, build_tn_matrix, enumerate_assignments, factorizable_game, incidence_matrix,
    BlockAssignment, FactoredStartSystem, Injection, TNMatrix,
};
pub use homotopy::{track_all, track_path, HomotopyConfig, PathResult, PathStatus};
pub use nash::{
    check_equilibrium, enumerate_supports, find_all_nash, find_pure_strict, solve_2x2_reduced, solve_support, Classification,
    EquilibriumCandidate, NashReport, SolveMethod, SolveOptions, StartLibrary, SupportMode, SupportOptions,
};
