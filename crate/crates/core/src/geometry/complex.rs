use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::GrassmannPoint;
use crate::error::{Error, Result};

/// Smallest Hausdorff measure a stored simplex may have.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Identifies a simplex by its dimension and its index among simplices of
/// that dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimplexId {
    pub dim: usize,
    pub index: usize,
}

impl SimplexId {
    pub fn new(dim: usize, index: usize) -> Self {
        Self { dim, index }
    }
}

/// Nonnegative `k`-dimensional Hausdorff measure.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct HausdorffMeasureValue(f64);

impl HausdorffMeasureValue {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::Invalid(format!("Hausdorff measure must be finite and >= 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Vertex of a 1-complex with odd incidence, with the unit tangents of its
/// incident edges pointing away from it.
#[derive(Clone, Debug)]
pub struct BoundaryVertex {
    pub vertex: usize,
    pub edges: Vec<usize>,
    pub tangents: Vec<DVector<f64>>,
}

impl BoundaryVertex {
    /// Tangent of the first incident edge (the only one at an endpoint).
    pub fn tangent(&self) -> &DVector<f64> {
        &self.tangents[0]
    }
}

/// A closed simplicial complex embedded in `R^d`, `d` in {2, 3}.
///
/// Simplices are stored per dimension as oriented vertex tuples; every face of
/// a stored simplex is stored. Full-dimensional simplices are oriented with
/// positive signed volume.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    ambient: usize,
    vertices: Vec<DVector<f64>>,
    simplices: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
    cofaces: Vec<Vec<Vec<usize>>>,
    marked_boundary_edges: BTreeSet<usize>,
    parent_vertex: Vec<usize>,
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Measure of the simplex with the given corner coordinates.
pub fn measure_of(points: &[&DVector<f64>]) -> f64 {
    let k = points.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let d = points[0].len();
    let mut e = DMatrix::zeros(d, k);
    for i in 0..k {
        e.set_column(i, &(points[i + 1] - points[0]));
    }
    let gram = e.transpose() * &e;
    let det = gram.determinant().max(0.0);
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    det.sqrt() / fact
}

fn signed_volume(points: &[&DVector<f64>]) -> f64 {
    let d = points[0].len();
    let mut e = DMatrix::zeros(d, d);
    for i in 0..d {
        e.set_column(i, &(points[i + 1] - points[0]));
    }
    e.determinant()
}

impl SimplicialComplex {
    /// Build the closure of the given simplices. `by_dim[k]` lists
    /// `k`-simplices; entries for `k = 0` are ignored (every vertex is a
    /// 0-simplex).
    pub fn new(ambient: usize, vertices: Vec<DVector<f64>>, by_dim: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if !(2..=3).contains(&ambient) {
            return Err(Error::DimensionError(format!("ambient dimension {ambient} not in {{2,3}}")));
        }
        for v in &vertices {
            if v.len() != ambient {
                return Err(Error::DimensionError(format!(
                    "vertex has {} coordinates, expected {ambient}",
                    v.len()
                )));
            }
        }
        let top = by_dim
            .iter()
            .enumerate()
            .rev()
            .find(|(_, s)| !s.is_empty())
            .map(|(k, _)| k)
            .unwrap_or(0);
        if top > ambient {
            return Err(Error::DimensionError(format!("{top}-simplices in R^{ambient}")));
        }
        let n = vertices.len();
        let mut cx = Self {
            ambient,
            simplices: vec![Vec::new(); top + 1],
            lookup: vec![HashMap::new(); top + 1],
            cofaces: Vec::new(),
            marked_boundary_edges: BTreeSet::new(),
            parent_vertex: (0..n).collect(),
            vertices,
        };
        for i in 0..n {
            cx.simplices[0].push(vec![i]);
            cx.lookup[0].insert(vec![i], i);
        }
        for k in (1..=top).rev() {
            let given = by_dim.get(k).cloned().unwrap_or_default();
            for s in given {
                cx.insert(k, s)?;
            }
        }
        cx.close_faces(top);
        cx.build_cofaces();
        Ok(cx)
    }

    fn insert(&mut self, k: usize, mut s: Vec<usize>) -> Result<usize> {
        if s.len() != k + 1 {
            return Err(Error::DimensionError(format!("{k}-simplex with {} vertices", s.len())));
        }
        for &v in &s {
            if v >= self.vertices.len() {
                return Err(Error::IdError { what: "vertex", id: v });
            }
        }
        let key = sorted(&s);
        if key.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSimplex { dim: k, vertices: s, measure: 0.0 });
        }
        if let Some(&i) = self.lookup[k].get(&key) {
            return Ok(i);
        }
        let pts: Vec<&DVector<f64>> = s.iter().map(|&v| &self.vertices[v]).collect();
        let m = measure_of(&pts);
        if m <= DEGENERACY_TOL {
            return Err(Error::DegenerateSimplex { dim: k, vertices: s, measure: m });
        }
        if k == self.ambient && signed_volume(&pts) < 0.0 {
            s.swap(k - 1, k);
        }
        let i = self.simplices[k].len();
        self.simplices[k].push(s);
        self.lookup[k].insert(key, i);
        Ok(i)
    }

    fn close_faces(&mut self, top: usize) {
        for k in (2..=top).rev() {
            let mut faces = Vec::new();
            for s in &self.simplices[k] {
                for drop in 0..=k {
                    let mut f: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &v)| v).collect();
                    if drop % 2 == 1 {
                        f.swap(0, 1);
                    }
                    faces.push(f);
                }
            }
            for f in faces {
                // faces of a nondegenerate simplex are nondegenerate
                let _ = self.insert(k - 1, f);
            }
        }
    }

    fn build_cofaces(&mut self) {
        let top = self.simplices.len() - 1;
        self.cofaces = (0..=top).map(|k| vec![Vec::new(); self.simplices[k].len()]).collect();
        for k in 1..=top {
            for (i, s) in self.simplices[k].iter().enumerate() {
                for drop in 0..=k {
                    let f: Vec<usize> = sorted(
                        &s.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &v)| v).collect::<Vec<_>>(),
                    );
                    let fi = self.lookup[k - 1][&f];
                    self.cofaces[k - 1][fi].push(i);
                }
            }
        }
    }

    /// Pure triangle mesh in the plane plus optional extra edges.
    pub fn from_triangles(vertices: Vec<DVector<f64>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(2);
        let tris = triangles.into_iter().map(|t| t.to_vec()).collect();
        Self::new(ambient, vertices, vec![vec![], vec![], tris])
    }

    /// 1-complex (polyline / graph) from an edge list.
    pub fn from_edges(vertices: Vec<DVector<f64>>, edges: Vec<[usize; 2]>) -> Result<Self> {
        let ambient = vertices.first().map(|v| v.len()).unwrap_or(2);
        let edges = edges.into_iter().map(|e| e.to_vec()).collect();
        Self::new(ambient, vertices, vec![vec![], edges])
    }

    pub fn empty(ambient: usize) -> Self {
        Self::new(ambient, vec![], vec![]).expect("empty complex")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Highest dimension with at least one simplex (0 for an empty complex).
    pub fn top_dim(&self) -> usize {
        (0..self.simplices.len()).rev().find(|&k| !self.simplices[k].is_empty()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_simplices(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len())
    }

    pub fn vertex(&self, i: usize) -> &DVector<f64> {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], |s| s.as_slice())
    }

    pub fn simplex(&self, id: SimplexId) -> Result<&[usize]> {
        self.simplices
            .get(id.dim)
            .and_then(|s| s.get(id.index))
            .map(|s| s.as_slice())
            .ok_or(Error::IdError { what: "simplex", id: id.index })
    }

    /// Index of the `k`-simplex with these vertices (any order).
    pub fn find(&self, k: usize, verts: &[usize]) -> Option<usize> {
        self.lookup.get(k)?.get(&sorted(verts)).copied()
    }

    /// Indices of `(k+1)`-simplices having simplex `(k, i)` as a face.
    pub fn cofaces(&self, k: usize, i: usize) -> &[usize] {
        self.cofaces.get(k).and_then(|c| c.get(i)).map_or(&[], |c| c.as_slice())
    }

    /// Indices of the `(k-1)`-faces of simplex `(k, i)`.
    pub fn faces(&self, k: usize, i: usize) -> Vec<usize> {
        let s = &self.simplices[k][i];
        (0..=k)
            .map(|drop| {
                let f: Vec<usize> = s.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &v)| v).collect();
                self.find(k - 1, &f).expect("closed complex")
            })
            .collect()
    }

    /// Vertex index in the complex this one was extracted from.
    pub fn parent_vertex(&self, i: usize) -> usize {
        self.parent_vertex[i]
    }

    pub fn points_of(&self, id: SimplexId) -> Result<Vec<&DVector<f64>>> {
        Ok(self.simplex(id)?.iter().map(|&v| &self.vertices[v]).collect())
    }

    pub fn simplex_measure(&self, id: SimplexId) -> Result<HausdorffMeasureValue> {
        let pts = self.points_of(id)?;
        HausdorffMeasureValue::new(measure_of(&pts))
    }

    pub fn barycenter(&self, id: SimplexId) -> Result<DVector<f64>> {
        let pts = self.points_of(id)?;
        let mut c = DVector::zeros(self.ambient);
        for p in &pts {
            c += *p;
        }
        Ok(c / pts.len() as f64)
    }

    /// Plane spanned by the edge vectors of a `k`-simplex, `1 <= k <= d - 1`.
    pub fn tangent_plane(&self, id: SimplexId) -> Result<GrassmannPoint> {
        if id.dim == 0 || id.dim >= self.ambient {
            return Err(Error::DimensionError(format!(
                "tangent plane of a {}-simplex in R^{}",
                id.dim, self.ambient
            )));
        }
        let verts = self.simplex(id)?.to_vec();
        let pts = self.points_of(id)?;
        let m = measure_of(&pts);
        if m <= DEGENERACY_TOL {
            return Err(Error::DegenerateSimplex { dim: id.dim, vertices: verts, measure: m });
        }
        let span: Vec<DVector<f64>> = pts[1..].iter().map(|p| *p - pts[0]).collect();
        GrassmannPoint::from_spanning(&span).map_err(|_| Error::DegenerateSimplex {
            dim: id.dim,
            vertices: verts,
            measure: m,
        })
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let s = &self.simplices[1][e];
        (&self.vertices[s[1]] - &self.vertices[s[0]]).norm()
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..self.n_simplices(1)).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    /// Topological boundary: `(top-1)`-faces with exactly one coface.
    pub fn boundary_faces(&self) -> Vec<usize> {
        let top = self.top_dim();
        if top == 0 {
            return Vec::new();
        }
        (0..self.n_simplices(top - 1)).filter(|&f| self.cofaces(top - 1, f).len() == 1).collect()
    }

    /// Mark edges as lying on the body's boundary (in addition to the
    /// topological boundary of a pure 2-complex).
    pub fn mark_boundary_edges(&mut self, edges: &[[usize; 2]]) -> Result<()> {
        for e in edges {
            let i = self.find(1, e).ok_or(Error::IdError { what: "boundary edge", id: e[0] })?;
            self.marked_boundary_edges.insert(i);
        }
        Ok(())
    }

    pub fn marked_boundary_edges(&self) -> &BTreeSet<usize> {
        &self.marked_boundary_edges
    }

    /// True if edge `e` lies on the body boundary.
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.marked_boundary_edges.contains(&e) || (self.top_dim() == 2 && self.cofaces(1, e).len() == 1)
    }

    /// Edges shared by two triangles (for a 2-dimensional mesh).
    pub fn is_interior_edge(&self, e: usize) -> bool {
        self.top_dim() == 2 && self.cofaces(1, e).len() == 2 && !self.marked_boundary_edges.contains(&e)
    }

    /// Per-vertex flag: vertex lies on a boundary edge.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_vertices()];
        for e in 0..self.n_simplices(1) {
            if self.is_boundary_edge(e) {
                for &v in &self.simplices[1][e] {
                    mask[v] = true;
                }
            }
        }
        mask
    }

    /// Closed subcomplex generated by the given simplices, with vertices
    /// renumbered in increasing parent order.
    pub fn subcomplex(&self, ids: &[SimplexId]) -> Result<SimplicialComplex> {
        let mut keep: BTreeSet<usize> = BTreeSet::new();
        for id in ids {
            keep.extend(self.simplex(*id)?.iter().copied());
        }
        let map: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let vertices: Vec<DVector<f64>> = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let top = ids.iter().map(|id| id.dim).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
        for id in ids {
            let s = self.simplex(*id)?;
            by_dim[id.dim].push(s.iter().map(|v| map[v]).collect());
        }
        let mut sub = SimplicialComplex::new(self.ambient, vertices, by_dim)?;
        sub.parent_vertex = keep.into_iter().map(|v| self.parent_vertex[v]).collect();
        let marked: Vec<[usize; 2]> = self
            .marked_boundary_edges
            .iter()
            .map(|&e| &self.simplices[1][e])
            .filter(|s| map.contains_key(&s[0]) && map.contains_key(&s[1]))
            .map(|s| [map[&s[0]], map[&s[1]]])
            .filter(|e| sub.find(1, e).is_some())
            .collect();
        sub.mark_boundary_edges(&marked)?;
        Ok(sub)
    }

    /// Vertices of a 1-complex incident to an odd number of edges.
    pub fn boundary_vertices(&self) -> Vec<BoundaryVertex> {
        if self.n_simplices(1) == 0 {
            return Vec::new();
        }
        (0..self.n_vertices())
            .filter_map(|v| {
                let edges = self.cofaces(0, v);
                if edges.len() % 2 == 0 {
                    return None;
                }
                let tangents = edges
                    .iter()
                    .map(|&e| {
                        let s = &self.simplices[1][e];
                        let other = if s[0] == v { s[1] } else { s[0] };
                        (&self.vertices[other] - &self.vertices[v]).normalize()
                    })
                    .collect();
                Some(BoundaryVertex { vertex: v, edges: edges.to_vec(), tangents })
            })
            .collect()
    }

    /// Opposite induced orientations on every face shared by two top simplices.
    pub fn is_consistently_oriented(&self) -> bool {
        let top = self.top_dim();
        if top < 1 {
            return true;
        }
        let mut seen: HashMap<Vec<usize>, i32> = HashMap::new();
        for s in &self.simplices[top] {
            for drop in 0..=top {
                let f: Vec<usize> = s.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &v)| v).collect();
                let key = sorted(&f);
                let sign = permutation_sign(&f) * if drop % 2 == 0 { 1 } else { -1 };
                let entry = seen.entry(key).or_insert(0);
                *entry += sign;
                if entry.abs() > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Copy with every vertex mapped through `f`.
    pub fn map_vertices<F: Fn(&DVector<f64>) -> DVector<f64>>(&self, f: F) -> Result<SimplicialComplex> {
        let vertices: Vec<DVector<f64>> = self.vertices.iter().map(f).collect();
        let by_dim: Vec<Vec<Vec<usize>>> = self.simplices.clone();
        let mut out = SimplicialComplex::new(self.ambient, vertices, by_dim)?;
        out.parent_vertex = self.parent_vertex.clone();
        out.marked_boundary_edges = self.marked_boundary_edges.clone();
        Ok(out)
    }

    // ---- JSON ----

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: MeshJson = serde_json::from_str(text)?;
        raw.into_complex()
    }

    pub fn to_json(&self) -> MeshJson {
        MeshJson {
            dim: self.ambient,
            vertices: self.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            edges: self.simplices(1).iter().map(|s| [s[0], s[1]]).collect(),
            triangles: self.simplices(2).iter().map(|s| [s[0], s[1], s[2]]).collect(),
            tetrahedra: self.simplices(3).iter().map(|s| [s[0], s[1], s[2], s[3]]).collect(),
            boundary_edges: self
                .marked_boundary_edges
                .iter()
                .map(|&e| [self.simplices[1][e][0], self.simplices[1][e][1]])
                .collect(),
        }
    }
}

fn permutation_sign(v: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// On-disk mesh format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tetrahedra: Vec<[usize; 4]>,
    #[serde(default)]
    pub boundary_edges: Vec<[usize; 2]>,
}

impl MeshJson {
    pub fn into_complex(self) -> Result<SimplicialComplex> {
        let vertices: Vec<DVector<f64>> = self.vertices.into_iter().map(DVector::from_vec).collect();
        let by_dim = vec![
            vec![],
            self.edges.iter().map(|e| e.to_vec()).collect(),
            self.triangles.iter().map(|t| t.to_vec()).collect(),
            self.tetrahedra.iter().map(|t| t.to_vec()).collect(),
        ];
        let mut cx = SimplicialComplex::new(self.dim, vertices, by_dim)?;
        cx.mark_boundary_edges(&self.boundary_edges)?;
        Ok(cx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn closure_adds_faces_and_orients_triangles() {
        let cx = SimplicialComplex::from_triangles(
            vec![v(&[0.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 0.0])],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert_eq!(cx.n_simplices(1), 3);
        let t = cx.simplex(SimplexId::new(2, 0)).unwrap();
        let pts: Vec<&DVector<f64>> = t.iter().map(|&i| cx.vertex(i)).collect();
        assert!(signed_volume(&pts) > 0.0);
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let err = SimplicialComplex::from_triangles(
            vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 0.0])],
            vec![[0, 1, 2]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateSimplex { dim: 2, .. }));
    }

    #[test]
    fn unknown_ids_are_reported() {
        let cx = SimplicialComplex::from_edges(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0])], vec![[0, 1]]).unwrap();
        assert!(matches!(cx.subcomplex(&[SimplexId::new(1, 4)]), Err(Error::IdError { .. })));
        assert!(matches!(
            SimplicialComplex::from_edges(vec![v(&[0.0, 0.0])], vec![[0, 3]]),
            Err(Error::IdError { .. })
        ));
    }

    #[test]
    fn tangent_plane_rejects_top_dimensional_simplices() {
        let cx = SimplicialComplex::from_triangles(
            vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(cx.tangent_plane(SimplexId::new(2, 0)), Err(Error::DimensionError(_))));
    }

    #[test]
    fn json_round_trip_keeps_marks() {
        let text = r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"edges":[],"triangles":[[0,1,2]],"boundary_edges":[[0,1]]}"#;
        let cx = SimplicialComplex::from_json_str(text).unwrap();
        assert_eq!(cx.marked_boundary_edges().len(), 1);
        let back = serde_json::to_string(&cx.to_json()).unwrap();
        let again = SimplicialComplex::from_json_str(&back).unwrap();
        assert_eq!(again.n_simplices(2), 1);
        assert_eq!(again.marked_boundary_edges().len(), 1);
    }
}
