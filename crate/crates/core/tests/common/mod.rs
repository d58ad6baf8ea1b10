#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::DVector;
use varifrac::currents::DeformationField;
use varifrac::geometry::shapes::{rectangle, Diagonals};
use varifrac::geometry::{split_along_faces, SimplexId, SimplicialComplex, SplitMesh};
use varifrac::varifold::{DiscreteVarifold, StratifiedFamily, Stratum};

pub fn p2(x: f64, y: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y])
}

/// Interior edges of the unit-square grid lying on `x = 0.5` with `y` in `[y0, y1]`.
pub fn vertical_edges(mesh: &SimplicialComplex, n: usize, y0: f64, y1: f64) -> BTreeSet<usize> {
    let i = n / 2;
    let mut out = BTreeSet::new();
    for j in 0..n {
        let (ya, yb) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
        if ya >= y0 - 1e-12 && yb <= y1 + 1e-12 {
            let a = j * (n + 1) + i;
            let e = mesh.find(1, &[a, a + n + 1]).expect("grid edge");
            out.insert(e);
        }
    }
    out
}

/// `true` for nodes whose elements all lie left of `x = 0.5`.
pub fn left_only(split: &SplitMesh) -> Vec<bool> {
    let m = &split.mesh;
    let mut left = vec![false; m.n_vertices()];
    let mut right = vec![false; m.n_vertices()];
    for (t, s) in m.simplices(2).iter().enumerate() {
        let side = if m.barycenter(SimplexId::new(2, t)).unwrap()[0] < 0.5 { &mut left } else { &mut right };
        for &v in s {
            side[v] = true;
        }
    }
    left.iter().zip(&right).map(|(l, r)| *l && !*r).collect()
}

/// Two-to-one fold of the unit square onto `[0, 0.5] x [0, 1]`: rotation by
/// pi on the left half, translation on the right, glued only through
/// duplicated nodes on `x = 0.5` so every element keeps `det = 1`.
pub fn fold_fixture(n: usize) -> DeformationField {
    let base = rectangle(n, n, 1.0, 1.0, Diagonals::Uniform).unwrap();
    let cracked = vertical_edges(&base, n, 0.0, 1.0);
    let split = split_along_faces(&base, &cracked).unwrap();
    let left = left_only(&split);
    let values = split
        .mesh
        .vertices()
        .iter()
        .zip(&left)
        .map(|(x, &l)| if l { p2(0.5 - x[0], 1.0 - x[1]) } else { p2(x[0] - 0.5, x[1]) })
        .collect();
    DeformationField::new(split.mesh.clone(), values)
        .unwrap()
        .with_duplicated_pairs(split.duplicated_pairs.clone())
        .unwrap()
}

/// Unit square `n x n` grid with an opening crack on `x = 0.5`,
/// `y` in `[0.25, 0.75]`: right-side crack nodes move by `delta` times a
/// hat profile vanishing at the tips.
pub fn jump_fixture(n: usize, delta: f64) -> (DeformationField, SimplicialComplex, BTreeSet<usize>) {
    let base = rectangle(n, n, 1.0, 1.0, Diagonals::Uniform).unwrap();
    let cracked = vertical_edges(&base, n, 0.25, 0.75);
    let split = split_along_faces(&base, &cracked).unwrap();
    let on_crack: BTreeSet<usize> = split.duplicated_pairs.iter().flatten().copied().collect();
    let left = left_only(&split);
    let values = split
        .mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if on_crack.contains(&i) && !left[i] {
                let hat = 1.0 - (x[1] - 0.5).abs() / 0.25;
                p2(x[0] + delta * hat, x[1])
            } else {
                x.clone()
            }
        })
        .collect();
    let u = DeformationField::new(split.mesh.clone(), values)
        .unwrap()
        .with_duplicated_pairs(split.duplicated_pairs.clone())
        .unwrap();
    (u, base, cracked)
}

/// Crack varifold `V_1` on the given base-mesh edges.
pub fn crack_family(base: &SimplicialComplex, edges: &BTreeSet<usize>) -> StratifiedFamily {
    let mut fam = StratifiedFamily::new(base.ambient_dim());
    if !edges.is_empty() {
        let ids: Vec<SimplexId> = edges.iter().map(|&e| SimplexId::new(1, e)).collect();
        let curve = base.subcomplex(&ids).unwrap();
        let v = DiscreteVarifold::unit_density(&curve, 2).unwrap();
        fam.insert(Stratum::new(v, 2.0).unwrap()).unwrap();
    }
    fam
}

/// Composite Gauss-Legendre on `[a, b]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(a: f64, b: f64, pieces: usize, f: F) -> f64 {
    let (x, w) = varifrac::quadrature::gauss_legendre(8);
    let h = (b - a) / pieces as f64;
    let mut s = 0.0;
    for k in 0..pieces {
        let lo = a + k as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            s += h * wi * f(lo + h * xi);
        }
    }
    s
}
