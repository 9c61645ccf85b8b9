use std::sync::Arc;

use nalgebra::DVector;

use super::{AlgebraElement, CStarAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{one, C64};

/// A linear functional on a [`CStarAlgebra`], stored by its values on the basis.
#[derive(Clone, Debug)]
pub struct Functional {
    alg: Arc<CStarAlgebra>,
    values: DVector<C64>,
}

impl Functional {
    pub fn from_values(alg: Arc<CStarAlgebra>, values: DVector<C64>) -> Result<Self> {
        if values.len() != alg.dim() {
            return Err(Error::ShapeMismatch(format!(
                "functional has {} values, algebra has dimension {}",
                values.len(),
                alg.dim()
            )));
        }
        Ok(Functional { alg, values })
    }

    /// `a ↦ Tr(ρ* a)` for a density `ρ` in the algebra.
    pub fn from_density(rho: &AlgebraElement) -> Self {
        let alg = rho.algebra().clone();
        let values = alg.gram().transpose() * rho.coords().map(|z| z.conj());
        Functional { alg, values }
    }

    /// The coordinate functional dual to the basis element `e_k`.
    pub fn coordinate(alg: &Arc<CStarAlgebra>, k: usize) -> Self {
        let mut values = DVector::zeros(alg.dim());
        values[k] = one();
        Functional { alg: alg.clone(), values }
    }

    /// The vector functional `a ↦ ⟨a ξ, η⟩` on the ambient Hilbert space
    /// `⊕ C^{n_b}`; `xi` and `eta` are given as concatenated block vectors.
    pub fn vector(alg: &Arc<CStarAlgebra>, xi: &DVector<C64>, eta: &DVector<C64>) -> Result<Self> {
        let total: usize = alg.block_dims().iter().sum();
        if xi.len() != total || eta.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "vector functional needs vectors of length {total}"
            )));
        }
        let mut offsets = vec![0];
        for &n in alg.block_dims() {
            offsets.push(offsets.last().unwrap() + n);
        }
        let values = DVector::from_fn(alg.dim(), |i, _| {
            alg.parts(i)
                .iter()
                .map(|(b, m)| {
                    let (o, n) = (offsets[*b], alg.block_dims()[*b]);
                    let x = xi.rows(o, n);
                    let y = eta.rows(o, n);
                    y.dotc(&(m * x))
                })
                .sum()
        });
        Ok(Functional { alg: alg.clone(), values })
    }

    /// The unnormalized trace: sum of the block traces.
    pub fn trace(alg: &Arc<CStarAlgebra>) -> Self {
        let values =
            DVector::from_fn(alg.dim(), |i, _| alg.parts(i).iter().map(|(_, m)| m.trace()).sum());
        Functional { alg: alg.clone(), values }
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.alg
    }

    /// `ω(e_i)` for every basis element.
    pub fn values(&self) -> &DVector<C64> {
        &self.values
    }

    pub fn eval(&self, a: &AlgebraElement) -> C64 {
        self.values.iter().zip(a.coords().iter()).map(|(w, x)| w * x).sum()
    }

    /// The density `ρ ∈ A` with `ω(a) = Tr(ρ* a)`.
    pub fn density(&self) -> AlgebraElement {
        let coords = self.alg.gram_inverse() * self.values.map(|z| z.conj());
        AlgebraElement::new(self.alg.clone(), coords).expect("density has algebra dimension")
    }

    /// The functional norm, equal to the trace norm of the density.
    pub fn norm(&self) -> f64 {
        self.density().trace_norm()
    }

    pub fn adjoint(&self) -> Self {
        // ω*(a) = conj(ω(a*))
        let d = self.alg.dim();
        let mut values = DVector::zeros(d);
        for i in 0..d {
            values[i] = self.alg.star(i).iter().map(|&(k, s)| (self.values[k] * s).conj()).sum();
        }
        Functional { alg: self.alg.clone(), values }
    }
}
