use std::collections::BTreeSet;

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// A full-dimensional mesh whose nodes have been duplicated along a set of
/// cracked `(d-1)`-faces. Element indices coincide with the base mesh.
#[derive(Clone, Debug)]
pub struct SplitMesh {
    pub mesh: SimplicialComplex,
    /// Base-mesh vertex each split-mesh node is a copy of.
    pub parent: Vec<usize>,
    /// `[original, copy]` pairs of coincident nodes.
    pub duplicated_pairs: Vec<[usize; 2]>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Duplicate nodes so that elements on opposite sides of a cracked face no
/// longer share them. Around each vertex, elements stay glued across uncracked
/// faces; every additional connected group gets its own copy.
pub fn split_along_faces(base: &SimplicialComplex, cracked: &BTreeSet<usize>) -> Result<SplitMesh> {
    let top = base.ambient_dim();
    if base.top_dim() != top {
        return Err(Error::DimensionError("crack splitting needs a full-dimensional mesh".into()));
    }
    for &f in cracked {
        if f >= base.n_simplices(top - 1) {
            return Err(Error::IdError { what: "cracked face", id: f });
        }
    }
    let elems = base.simplices(top);
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); base.n_vertices()];
    for (t, s) in elems.iter().enumerate() {
        for &v in s {
            star[v].push(t);
        }
    }
    let element_faces: Vec<Vec<usize>> = (0..elems.len()).map(|t| base.faces(top, t)).collect();
    let mut uf = UnionFind((0..elems.len()).collect());
    let mut vertices = base.vertices().to_vec();
    let mut parent: Vec<usize> = (0..base.n_vertices()).collect();
    let mut pairs = Vec::new();
    let mut new_elems: Vec<Vec<usize>> = elems.to_vec();

    for v in 0..base.n_vertices() {
        let local = &star[v];
        if local.len() < 2 {
            continue;
        }
        for &t in local {
            uf.0[t] = t;
        }
        for &t in local {
            for &f in &element_faces[t] {
                if cracked.contains(&f) || !base.simplices(top - 1)[f].contains(&v) {
                    continue;
                }
                for &other in base.cofaces(top - 1, f) {
                    if other != t {
                        uf.union(t, other);
                    }
                }
            }
        }
        let mut roots: Vec<usize> = local.iter().map(|&t| uf.find(t)).collect::<BTreeSet<_>>().into_iter().collect();
        roots.sort_unstable();
        for &root in roots.iter().skip(1) {
            let copy = vertices.len();
            vertices.push(base.vertex(v).clone());
            parent.push(v);
            pairs.push([v, copy]);
            for &t in local {
                if uf.find(t) == root {
                    for slot in new_elems[t].iter_mut() {
                        if *slot == v {
                            *slot = copy;
                        }
                    }
                }
            }
        }
    }
    let mut by_dim = vec![Vec::new(); top + 1];
    by_dim[top] = new_elems;
    let mesh = SimplicialComplex::new(top, vertices, by_dim)?;
    Ok(SplitMesh { mesh, parent, duplicated_pairs: pairs })
}
