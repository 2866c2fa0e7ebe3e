//! IO companion for `crspace-core`: the mesh text format, report
//! serialization, polynomial literals, the binary64 quadrature demo path,
//! and table rendering for the `crspace` binary.

pub mod format;
pub mod polyparse;
pub mod quad;
pub mod tables;
