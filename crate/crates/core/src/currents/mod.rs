//! Minors of deformation gradients, graph currents of piecewise-affine maps
//! and their boundaries, global injectivity and the admissibility predicate
//! for cracked deformations.

mod admissibility;
mod deformation;
mod form;
mod graph;
mod injectivity;
mod minors;

pub use admissibility::{
    admissibility_report, boundary_item, AdmissibilityOptions, AdmissibilityReport, BoundReport, BoundaryBall,
    BoundaryItemReport,
};
pub use deformation::{DeformationDump, DeformationField};
pub use form::{
    beta, beta_integral, beta_sup, boundary_form_family, multi_indices, FormPiece, FormTerm, ProductBump, TestForm,
};
pub use graph::{boundary_current_eval, current_eval, mass_of_current};
pub use injectivity::{ciarlet_necas_check, default_probes, CiarletNecasReport, Probe, ProbeResult};
pub use minors::{adjugate, cofactor, minors, MinorsVector};
