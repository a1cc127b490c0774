//! Time-fractional diffusion `∂_t^α u + L u = F` on `(0,L) × (0,T)` with
//! homogeneous Dirichlet data and zero initial value.

pub mod elliptic;
pub mod field;
pub mod report;
pub mod solver;

pub use elliptic::{
    apply_operator, constant, gradient, laplacian_eigs, sturm_liouville_eigs, Coefficient, EigenDecomposition,
    EllipticSpec,
};
pub use field::{ModalData, SpaceTimeField, TimeGrid};
pub use report::{attach_modal, regularity_report, residual, source_truncation, RegularityReport};
pub use solver::{
    k_apply, modal_response, modal_response_nodes, solve_general, solve_self_adjoint, solve_with_eigen,
    source_from_fn, GeneralSolution, PicardOptions,
};
