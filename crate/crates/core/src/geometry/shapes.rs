//! Fixture geometries: segments, polygons, spheres, disks and structured
//! rectangles. Meshes for production runs are inputs; these exist for tests,
//! examples and the bundled scenarios.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DVector;

use super::SimplicialComplex;
use crate::error::Result;

fn p2(x: f64, y: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y])
}

fn p3(x: f64, y: f64, z: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y, z])
}

pub fn segment(a: &[f64], b: &[f64]) -> Result<SimplicialComplex> {
    SimplicialComplex::from_edges(vec![DVector::from_row_slice(a), DVector::from_row_slice(b)], vec![[0, 1]])
}

/// Polyline through `points`, closed into a loop when `closed` is set.
pub fn polyline(points: Vec<DVector<f64>>, closed: bool) -> Result<SimplicialComplex> {
    let n = points.len();
    let mut edges: Vec<[usize; 2]> = (0..n.saturating_sub(1)).map(|i| [i, i + 1]).collect();
    if closed && n > 2 {
        edges.push([n - 1, 0]);
    }
    SimplicialComplex::from_edges(points, edges)
}

/// Inscribed regular `n`-gon of radius `radius` centred at the origin.
pub fn polygon_circle(n: usize, radius: f64) -> Result<SimplicialComplex> {
    let pts = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            p2(radius * t.cos(), radius * t.sin())
        })
        .collect();
    polyline(pts, true)
}

/// Open circular arc of `n` segments spanning `angle` radians.
pub fn arc(radius: f64, angle: f64, n: usize) -> Result<SimplicialComplex> {
    let pts = (0..=n)
        .map(|i| {
            let t = angle * i as f64 / n as f64;
            p2(radius * t.cos(), radius * t.sin())
        })
        .collect();
    polyline(pts, false)
}

/// Geodesic sphere from `refinements` midpoint subdivisions of an icosahedron.
pub fn icosphere(radius: f64, refinements: usize) -> Result<SimplicialComplex> {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..refinements {
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (va, vb) = (verts[a], verts[b]);
                verts.push(normalize([(va[0] + vb[0]) / 2.0, (va[1] + vb[1]) / 2.0, (va[2] + vb[2]) / 2.0]));
                verts.len() - 1
            })
        };
        for f in &faces {
            let a = midpoint(f[0], f[1], &mut verts);
            let b = midpoint(f[1], f[2], &mut verts);
            let c = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], a, c]);
            next.push([f[1], b, a]);
            next.push([f[2], c, b]);
            next.push([a, b, c]);
        }
        faces = next;
    }
    let pts = verts.into_iter().map(|v| p3(radius * v[0], radius * v[1], radius * v[2])).collect();
    SimplicialComplex::from_triangles(pts, faces)
}

/// Flat disk of radius `radius` in the `z = 0` plane of `R^3`: a centre fan
/// plus `rings - 1` annuli, each ring carrying `sectors` vertices.
pub fn disk(radius: f64, rings: usize, sectors: usize) -> Result<SimplicialComplex> {
    let mut pts = vec![p3(0.0, 0.0, 0.0)];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..sectors {
            let t = 2.0 * PI * s as f64 / sectors as f64;
            pts.push(p3(rad * t.cos(), rad * t.sin(), 0.0));
        }
    }
    let id = |r: usize, s: usize| 1 + (r - 1) * sectors + s % sectors;
    let mut tris = Vec::new();
    for s in 0..sectors {
        tris.push([0, id(1, s), id(1, s + 1)]);
    }
    for r in 1..rings {
        for s in 0..sectors {
            tris.push([id(r, s), id(r + 1, s), id(r + 1, s + 1)]);
            tris.push([id(r, s), id(r + 1, s + 1), id(r, s + 1)]);
        }
    }
    SimplicialComplex::from_triangles(pts, tris)
}

/// Diagonal layout of the structured rectangle mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagonals {
    /// Every cell split along the same diagonal.
    Uniform,
    /// Alternating diagonals (union-jack pattern), symmetric about the axes
    /// through the centre when cell counts are even.
    Alternating,
}

/// Rectangle `[0, width] x [0, height]` split into `nx * ny` cells, two
/// triangles each. Vertex `(i, j)` has index `j * (nx + 1) + i`.
pub fn rectangle(nx: usize, ny: usize, width: f64, height: f64, diagonals: Diagonals) -> Result<SimplicialComplex> {
    let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            pts.push(p2(width * i as f64 / nx as f64, height * j as f64 / ny as f64));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let flip = diagonals == Diagonals::Alternating && (i + j) % 2 == 1;
            if flip {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            } else {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            }
        }
    }
    SimplicialComplex::from_triangles(pts, tris)
}

/// Vertex index of grid node `(i, j)` in a [`rectangle`] mesh.
pub fn grid_vertex(nx: usize, i: usize, j: usize) -> usize {
    j * (nx + 1) + i
}

/// Centre and radius of a lower-dimensional complex when every vertex is equidistant (to `1e-9` relative)
/// from the vertex centroid.
fn common_sphere(mesh: &SimplicialComplex) -> Option<(DVector<f64>, f64)> {
    let n = mesh.n_vertices();
    if n < 3 || mesh.top_dim() >= mesh.ambient_dim() {
        return None;
    }
    let c = mesh.vertices().iter().fold(DVector::zeros(mesh.ambient_dim()), |a, v| a + v) / n as f64;
    let r: Vec<f64> = mesh.vertices().iter().map(|v| (v - &c).norm()).collect();
    let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    (lo > 0.0 && hi - lo <= 1e-9 * hi).then(|| (c, hi))
}

/// Midpoint subdivision of a pure 1- or 2-complex. Curves and surfaces whose
/// vertices lie on a common circle or sphere keep new vertices on it.
pub fn refine(mesh: &SimplicialComplex) -> Result<SimplicialComplex> {
    let k = mesh.top_dim();
    let sphere = common_sphere(mesh);
    let mut verts = mesh.vertices().to_vec();
    let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, verts: &mut Vec<DVector<f64>>| -> usize {
        let key = (a.min(b), a.max(b));
        *mids.entry(key).or_insert_with(|| {
            let mut m = (&verts[a] + &verts[b]) * 0.5;
            if let Some((c, r)) = &sphere {
                let off = &m - c;
                if off.norm() > 0.0 {
                    m = c + off.normalize() * *r;
                }
            }
            verts.push(m);
            verts.len() - 1
        })
    };
    match k {
        1 => {
            let mut edges = Vec::new();
            for e in mesh.simplices(1) {
                let m = mid(e[0], e[1], &mut verts);
                edges.push([e[0], m]);
                edges.push([m, e[1]]);
            }
            SimplicialComplex::from_edges(verts, edges)
        }
        2 => {
            let mut tris = Vec::new();
            for t in mesh.simplices(2) {
                let (a, b, c) = (t[0], t[1], t[2]);
                let (ab, bc, ca) = (mid(a, b, &mut verts), mid(b, c, &mut verts), mid(c, a, &mut verts));
                tris.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            }
            SimplicialComplex::from_triangles(verts, tris)
        }
        _ => Err(crate::error::Error::DimensionError(format!("refinement of a {k}-complex"))),
    }
}
