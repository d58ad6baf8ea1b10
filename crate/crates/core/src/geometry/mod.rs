//! Simplicial bodies, crack supports and the Grassmannian of tangent planes.

mod complex;
mod grassmann;
pub mod shapes;
mod split;

pub use complex::{
    measure_of, BoundaryVertex, HausdorffMeasureValue, MeshJson, SimplexId, SimplicialComplex, DEGENERACY_TOL,
};
pub use grassmann::GrassmannPoint;
pub use split::{split_along_faces, SplitMesh};

use crate::error::Result;

/// Tangent plane of simplex `id`.
pub fn tangent_plane(id: SimplexId, complex: &SimplicialComplex) -> Result<GrassmannPoint> {
    complex.tangent_plane(id)
}

/// Hausdorff measure of simplex `id` (length, area, ...).
pub fn simplex_measure(id: SimplexId, complex: &SimplicialComplex) -> Result<HausdorffMeasureValue> {
    complex.simplex_measure(id)
}

/// Closed subcomplex generated by `ids`.
pub fn subcomplex(complex: &SimplicialComplex, ids: &[SimplexId]) -> Result<SimplicialComplex> {
    complex.subcomplex(ids)
}

/// Odd-incidence vertices of a 1-complex with away-pointing unit tangents.
pub fn boundary_vertices(complex: &SimplicialComplex) -> Vec<BoundaryVertex> {
    complex.boundary_vertices()
}
