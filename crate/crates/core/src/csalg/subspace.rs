use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{AlgebraElement, CStarAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{intersect, orthonormalize, C64};

/// A linear subspace of an algebra, stored as orthonormal coordinate columns.
///
/// When the subspace is everything the columns are the identity, so basis
/// listings follow the algebra's own basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    alg: Arc<CStarAlgebra>,
    basis: DMatrix<C64>,
}

impl Subspace {
    /// The span of the given coordinate columns.
    pub fn new(alg: Arc<CStarAlgebra>, spanning: &DMatrix<C64>) -> Result<Self> {
        if spanning.nrows() != alg.dim() {
            return Err(Error::ShapeMismatch(format!(
                "spanning vectors have length {}, algebra has dimension {}",
                spanning.nrows(),
                alg.dim()
            )));
        }
        let basis = orthonormalize(spanning);
        if basis.ncols() == alg.dim() {
            return Ok(Self::full(alg));
        }
        Ok(Subspace { alg, basis })
    }

    pub fn full(alg: Arc<CStarAlgebra>) -> Self {
        let d = alg.dim();
        Subspace { alg, basis: DMatrix::identity(d, d) }
    }

    pub fn zero(alg: Arc<CStarAlgebra>) -> Self {
        let d = alg.dim();
        Subspace { alg, basis: DMatrix::zeros(d, 0) }
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.alg.dim()
    }

    /// Orthonormal coordinate columns.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.basis
    }

    pub fn basis(&self) -> Vec<AlgebraElement> {
        self.basis
            .column_iter()
            .map(|col| AlgebraElement::new(self.alg.clone(), col.into_owned()).expect("column has algebra dimension"))
            .collect()
    }

    /// Coordinate distance from `a` to the subspace.
    pub fn residual(&self, a: &AlgebraElement) -> f64 {
        let x = a.coords();
        let proj: DVector<C64> = &self.basis * (self.basis.adjoint() * x);
        (x - proj).norm()
    }

    pub fn contains(&self, a: &AlgebraElement, tol: f64) -> bool {
        a.algebra().same_as(&self.alg) && self.residual(a) <= tol * (1.0 + a.coords().norm())
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        Subspace { alg: self.alg.clone(), basis: intersect(&self.basis, &other.basis) }
    }

    /// Largest distance from the subspace of a product of two basis vectors.
    /// Zero exactly when the subspace is closed under multiplication.
    pub fn closure_defect(&self) -> f64 {
        let basis = self.basis();
        let mut worst = 0.0f64;
        for a in &basis {
            for b in &basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::one;

    #[test]
    fn diagonal_of_m2_is_closed_and_off_diagonal_is_not() {
        let a = CStarAlgebra::full(&[2]).unwrap();
        let mut diag = DMatrix::zeros(4, 2);
        diag[(0, 0)] = one();
        diag[(3, 1)] = one();
        let d = Subspace::new(a.clone(), &diag).unwrap();
        assert_eq!(d.dim(), 2);
        assert!(d.closure_defect() < 1e-14);
        assert!(d.contains(&a.one(), 1e-12));

        let mut off = DMatrix::zeros(4, 1);
        off[(1, 0)] = one();
        let o = Subspace::new(a.clone(), &off).unwrap();
        assert!(o.closure_defect() < 1e-14);
        let mut both = DMatrix::zeros(4, 2);
        both[(1, 0)] = one();
        both[(2, 1)] = one();
        assert!(Subspace::new(a.clone(), &both).unwrap().closure_defect() > 0.9);
        assert_eq!(d.intersect(&o).dim(), 0);
        assert!(Subspace::full(a.clone()).intersect(&d).closure_defect() < 1e-14);
    }
}
