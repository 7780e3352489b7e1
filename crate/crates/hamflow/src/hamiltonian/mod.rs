//! Paths of linear Hamiltonian systems `J u' + S_λ(t) u = 0` on the line and
//! the discretized selfadjoint operators attached to them.

pub mod bvp;
pub mod family;
pub mod ode;
pub mod reports;
pub mod splitting;

pub use bvp::{
    assemble_a0_operator, assemble_operator, assemble_q_operator, pencil_eigenvalues, A0Config,
    BoundaryValueOperator, PencilPath,
};
pub use family::{builtin, catalog, CatalogEntry, FamilyParams, HamiltonianFamily};
pub use ode::{fundamental_solution, stable_space, unstable_space, FundamentalSolution, PropagatedSpace};
pub use splitting::{relative_dimension, stable_unstable_splitting, Splitting};
pub use reports::{
    corollary_a_report, kernel_crossings, theorem_a_report, theorem_b_report, IndexReport, KernelCrossing,
    ReportKind, ReportOptions,
};
