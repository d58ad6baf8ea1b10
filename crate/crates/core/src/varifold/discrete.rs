use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{GrassmannPoint, SimplexId, SimplicialComplex};
use crate::quadrature::SimplexRule;
use crate::sum;

/// Weighted point of the Grassmann bundle.
#[derive(Clone, Debug)]
pub struct VarifoldAtom {
    pub x: DVector<f64>,
    pub plane: GrassmannPoint,
    /// Quadrature weight times measure times density.
    pub weight: f64,
    pub theta: u32,
    /// Top simplex of the support this atom was placed on.
    pub simplex: usize,
}

/// Integer-density rectifiable `k`-varifold represented by weighted atoms.
#[derive(Clone, Debug)]
pub struct DiscreteVarifold {
    k: usize,
    ambient: usize,
    order: usize,
    atoms: Vec<VarifoldAtom>,
    support: Option<SimplicialComplex>,
}

impl DiscreteVarifold {
    pub fn empty(k: usize, ambient: usize) -> Self {
        Self {
            k,
            ambient,
            order: 1,
            atoms: Vec::new(),
            support: None,
        }
    }

    /// Varifold from explicit atoms (for example a deserialized dump).
    pub fn from_atoms(k: usize, ambient: usize, atoms: Vec<VarifoldAtom>) -> Result<Self> {
        for a in &atoms {
            if a.plane.k() != k || a.plane.ambient_dim() != ambient || a.x.len() != ambient {
                return Err(Error::DimensionError(format!(
                    "atom with {}-plane in R^{} inside a {k}-varifold in R^{ambient}",
                    a.plane.k(),
                    a.plane.ambient_dim()
                )));
            }
            if !(a.weight > 0.0 && a.weight.is_finite()) || a.theta == 0 {
                return Err(Error::Invalid(format!("atom weight {} / theta {}", a.weight, a.theta)));
            }
        }
        Ok(Self {
            k,
            ambient,
            order: 1,
            atoms,
            support: None,
        })
    }

    /// Rectifiable varifold of a pure `k`-complex with per-simplex integer
    /// density, discretized with a rule exact to `quadrature_order`.
    pub fn from_complex(support: &SimplicialComplex, theta: &[u32], quadrature_order: usize) -> Result<Self> {
        let k = support.top_dim();
        let ambient = support.ambient_dim();
        if support.is_empty() || support.n_simplices(k) == 0 {
            return Ok(Self::empty(k.max(1), ambient));
        }
        if k == 0 || k >= ambient {
            return Err(Error::DimensionError(format!("{k}-dimensional support in R^{ambient}")));
        }
        for j in 0..k {
            if let Some(lonely) = (0..support.n_simplices(j)).find(|&i| support.cofaces(j, i).is_empty()) {
                return Err(Error::DimensionError(format!(
                    "support is not pure: {j}-simplex {lonely} belongs to no {}-simplex",
                    j + 1
                )));
            }
        }
        if theta.len() != support.n_simplices(k) {
            return Err(Error::DimensionError(format!(
                "{} densities for {} simplices",
                theta.len(),
                support.n_simplices(k)
            )));
        }
        let rule = SimplexRule::for_simplex(k, quadrature_order);
        let mut atoms = Vec::with_capacity(rule.len() * support.n_simplices(k));
        for (s, &th) in theta.iter().enumerate() {
            if th == 0 {
                return Err(Error::Invalid(format!("density 0 on simplex {s}")));
            }
            let id = SimplexId::new(k, s);
            let plane = support.tangent_plane(id)?;
            let measure = support.simplex_measure(id)?.value();
            let pts = support.points_of(id)?;
            for (bary, w) in rule.points.iter().zip(&rule.weights) {
                let mut x = DVector::zeros(ambient);
                for (p, l) in pts.iter().zip(bary) {
                    x.axpy(*l, p, 1.0);
                }
                atoms.push(VarifoldAtom {
                    x,
                    plane: plane.clone(),
                    weight: w * measure * th as f64,
                    theta: th,
                    simplex: s,
                });
            }
        }
        Ok(Self {
            k,
            ambient,
            order: quadrature_order.max(1),
            atoms,
            support: Some(support.clone()),
        })
    }

    /// Density-one varifold of a pure complex.
    pub fn unit_density(support: &SimplicialComplex, quadrature_order: usize) -> Result<Self> {
        let k = support.top_dim();
        Self::from_complex(support, &vec![1; support.n_simplices(k)], quadrature_order)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn quadrature_order(&self) -> usize {
        self.order
    }

    pub fn atoms(&self) -> &[VarifoldAtom] {
        &self.atoms
    }

    pub fn support(&self) -> Option<&SimplicialComplex> {
        self.support.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass `V(G_k(B))`.
    pub fn mass(&self) -> f64 {
        sum::sum(self.atoms.iter().map(|a| a.weight))
    }

    /// Weighted measure of a region given by a membership predicate.
    pub fn pushforward_measure<F: Fn(&DVector<f64>) -> bool>(&self, region: F) -> f64 {
        sum::sum(self.atoms.iter().filter(|a| region(&a.x)).map(|a| a.weight))
    }

    /// Weighted measure of the closed ball `B(center, radius)`.
    pub fn ball_measure(&self, center: &DVector<f64>, radius: f64) -> f64 {
        self.pushforward_measure(|x| (x - center).norm() <= radius)
    }

    /// Atom-wise union (masses add).
    pub fn union(&self, other: &DiscreteVarifold) -> Result<Self> {
        if self.k != other.k || self.ambient != other.ambient {
            return Err(Error::DimensionError("union of varifolds of different type".into()));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Ok(Self {
            k: self.k,
            ambient: self.ambient,
            order: self.order,
            atoms,
            support: None,
        })
    }

    /// Same atoms with weights multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for a in out.atoms.iter_mut() {
            a.weight *= factor;
        }
        out
    }
}

/// `mass` as a free function.
pub fn mass(v: &DiscreteVarifold) -> f64 {
    v.mass()
}

/// `pushforward_measure` as a free function.
pub fn pushforward_measure<F: Fn(&DVector<f64>) -> bool>(v: &DiscreteVarifold, region: F) -> f64 {
    v.pushforward_measure(region)
}
