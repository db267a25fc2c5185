//! Value meshes over drop times, audits of the neighbour bounds between
//! mesh points, and brackets for the optimal drop time derived from them.

mod audit;
mod bracket;
mod mesh;

pub use audit::{lipschitz_audit_1d, lipschitz_audit_2d, AuditReport, AuditViolation, Inequality};
pub use bracket::{bracket_1d, bracket_2d, BracketReport, CellRange};
pub use mesh::{
    mesh_dimension, read_mesh_1d, read_mesh_2d, sweep_1d, sweep_1d_to_file, sweep_2d, sweep_2d_to_file,
    write_mesh_1d, write_mesh_2d, Mesh1D, Mesh2D,
};
