use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{split_along_faces, SimplexId, SimplicialComplex, SplitMesh};
use crate::varifold::{DiscreteVarifold, StratifiedFamily, Stratum};

/// Quadrature order of the induced crack varifold: one atom per edge.
pub const CRACK_QUADRATURE_ORDER: usize = 1;

/// Set of cracked interior edges of a 2-D mesh.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrackState {
    pub edges: BTreeSet<usize>,
}

impl CrackState {
    pub fn new(base: &SimplicialComplex, edges: impl IntoIterator<Item = usize>) -> Result<Self> {
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        if base.ambient_dim() != 2 || base.top_dim() != 2 {
            return Err(Error::DimensionError("crack states live on 2-D triangle meshes".into()));
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= base.n_simplices(1) || !base.is_interior_edge(e)) {
            return Err(Error::IdError { what: "interior edge", id: e });
        }
        Ok(Self { edges })
    }

    /// Crack from vertex pairs.
    pub fn from_vertex_pairs(base: &SimplicialComplex, pairs: &[[usize; 2]]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|p| base.find(1, p).ok_or(Error::IdError { what: "crack edge", id: p[0] }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, edges)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, other: &CrackState) -> bool {
        other.edges.is_subset(&self.edges)
    }

    pub fn with_edge(&self, e: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.insert(e);
        Self { edges }
    }

    pub fn length(&self, base: &SimplicialComplex) -> f64 {
        crate::sum::sum(self.edges.iter().map(|&e| base.edge_length(e)))
    }

    pub fn split(&self, base: &SimplicialComplex) -> Result<SplitMesh> {
        split_along_faces(base, &self.edges)
    }

    /// Crack edges as a 1-complex (`None` when empty).
    pub fn complex(&self, base: &SimplicialComplex) -> Result<Option<SimplicialComplex>> {
        if self.edges.is_empty() {
            return Ok(None);
        }
        let ids: Vec<SimplexId> = self.edges.iter().map(|&e| SimplexId::new(1, e)).collect();
        Ok(Some(base.subcomplex(&ids)?))
    }

    /// `V₁` with unit density on the cracked edges.
    pub fn varifold(&self, base: &SimplicialComplex) -> Result<DiscreteVarifold> {
        match self.complex(base)? {
            Some(c) => DiscreteVarifold::unit_density(&c, CRACK_QUADRATURE_ORDER),
            None => Ok(DiscreteVarifold::empty(1, 2)),
        }
    }

    /// Family `{V₁}` with its curvature and boundary measure.
    pub fn family(&self, base: &SimplicialComplex, p: f64) -> Result<StratifiedFamily> {
        let mut fam = StratifiedFamily::new(2);
        if !self.edges.is_empty() {
            fam.insert(Stratum::new(self.varifold(base)?, p)?)?;
        }
        Ok(fam)
    }

    /// Number of cracked edges at each base vertex.
    fn incidence(&self, base: &SimplicialComplex) -> Vec<usize> {
        let mut count = vec![0; base.n_vertices()];
        for &e in &self.edges {
            for &v in &base.simplices(1)[e] {
                count[v] += 1;
            }
        }
        count
    }

    /// Odd-incidence crack vertices away from the body boundary.
    pub fn tips(&self, base: &SimplicialComplex) -> Vec<usize> {
        let on_boundary = base.boundary_vertex_mask();
        self.incidence(base)
            .iter()
            .enumerate()
            .filter(|(v, &n)| n % 2 == 1 && !on_boundary[*v])
            .map(|(v, _)| v)
            .collect()
    }
}

/// Knobs of the move generator.
#[derive(Clone, Debug)]
pub struct MoveHeuristics {
    /// Number of nucleation candidates.
    pub nucleations: usize,
}

impl Default for MoveHeuristics {
    fn default() -> Self {
        Self { nucleations: 3 }
    }
}

/// Candidate crack states: the no-op first, then one-edge tip extensions,
/// then single-edge nucleations at the `m` uncracked interior edges with the
/// highest mean energy density of their adjacent elements (edges touching the
/// body boundary included).
pub fn propose_moves(
    crack: &CrackState,
    base: &SimplicialComplex,
    element_density: &[f64],
    heuristics: &MoveHeuristics,
) -> Vec<CrackState> {
    let mut out = vec![crack.clone()];
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for v in crack.tips(base) {
        for &e in base.cofaces(0, v) {
            if !crack.edges.contains(&e) && base.is_interior_edge(e) && seen.insert(e) {
                out.push(crack.with_edge(e));
            }
        }
    }
    let mut ranked: Vec<(f64, usize)> = (0..base.n_simplices(1))
        .filter(|&e| base.is_interior_edge(e) && !crack.edges.contains(&e) && !seen.contains(&e))
        .map(|e| {
            let tris = base.cofaces(1, e);
            let mean = tris.iter().map(|&t| element_density.get(t).copied().unwrap_or(0.0)).sum::<f64>() / tris.len() as f64;
            (mean, e)
        })
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, e) in ranked.iter().take(heuristics.nucleations) {
        out.push(crack.with_edge(e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{grid_vertex, rectangle, Diagonals};

    #[test]
    fn move_counts() {
        let m = rectangle(4, 4, 1.0, 1.0, Diagonals::Alternating).unwrap();
        let zeros = vec![0.0; m.n_simplices(2)];
        let empty = CrackState::default();
        assert_eq!(propose_moves(&empty, &m, &zeros, &MoveHeuristics { nucleations: 3 }).len(), 4);

        // interior segment between (1,2) and (2,2): tip (2,2) has even parity, 8 edges
        let c = CrackState::from_vertex_pairs(&m, &[[grid_vertex(4, 1, 2), grid_vertex(4, 2, 2)]]).unwrap();
        assert_eq!(c.tips(&m).len(), 2);
        let moves = propose_moves(&c, &m, &zeros, &MoveHeuristics { nucleations: 0 });
        assert!(moves.len() - 1 >= 4);
        assert!(moves.iter().all(|s| s.contains(&c)));

        // crack across the whole width: no tips
        let pairs: Vec<[usize; 2]> = (0..4).map(|i| [grid_vertex(4, i, 2), grid_vertex(4, i + 1, 2)]).collect();
        let through = CrackState::from_vertex_pairs(&m, &pairs[1..3]).unwrap();
        assert_eq!(through.tips(&m).len(), 2);
        let full = CrackState::from_vertex_pairs(
            &m,
            &pairs.iter().copied().filter(|p| m.is_interior_edge(m.find(1, p).unwrap())).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(full.tips(&m).is_empty());
        assert_eq!(propose_moves(&full, &m, &zeros, &MoveHeuristics { nucleations: 2 }).len(), 3);
    }

    #[test]
    fn boundary_edges_cannot_crack() {
        let m = rectangle(2, 2, 1.0, 1.0, Diagonals::Uniform).unwrap();
        let e = m.find(1, &[0, 1]).unwrap();
        assert!(CrackState::new(&m, [e]).is_err());
    }
}
