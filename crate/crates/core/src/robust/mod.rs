//! Robust counterpart construction, two-phase solving and worst cases.

pub mod ellipsoidal;
pub mod model;
pub mod program;
pub mod solve;

pub use ellipsoidal::ellipsoidal_outer_solve;
pub use model::{build_robust_dual, build_robust_primal, build_uc_model, UcLayout, UcModel};
pub use program::{Multipliers, RobustDual, RobustProgram};
pub use solve::{
    solve_aro, worst_case_realization, AroSolution, Commitments, DualCertificate, LdrPolicy,
    RobustConstraintBundle,
};
