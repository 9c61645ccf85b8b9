use std::sync::Arc;

use nalgebra::DMatrix;

use super::tensor::{legs_match, total_dim};
use super::{AlgebraElement, CStarAlgebra, Tensor};
use crate::error::{Error, Result};
use crate::linalg::{FullSvd, C64};

/// A linear map between tensor products of algebras, stored as the matrix
/// of its action on product-basis coordinates.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    source: Vec<Arc<CStarAlgebra>>,
    target: Vec<Arc<CStarAlgebra>>,
    matrix: DMatrix<C64>,
}

impl LinearOperator {
    pub fn new(
        source: Vec<Arc<CStarAlgebra>>,
        target: Vec<Arc<CStarAlgebra>>,
        matrix: DMatrix<C64>,
    ) -> Result<Self> {
        let (r, c) = (total_dim(&target), total_dim(&source));
        if matrix.shape() != (r, c) {
            return Err(Error::ShapeMismatch(format!(
                "operator matrix has shape {:?}, expected ({r}, {c})",
                matrix.shape()
            )));
        }
        Ok(LinearOperator { source, target, matrix })
    }

    /// Builds an operator from its values on the product basis of the source.
    pub fn from_basis_images<F>(
        source: Vec<Arc<CStarAlgebra>>,
        target: Vec<Arc<CStarAlgebra>>,
        mut image: F,
    ) -> Result<Self>
    where
        F: FnMut(&Tensor) -> Result<Tensor>,
    {
        let legs = source.clone();
        Self::from_indexed_images(source, target, |j| image(&Tensor::basis_element(legs.clone(), j)))
    }

    /// Like [`from_basis_images`](Self::from_basis_images), with the image
    /// given as a function of the product-basis index.
    pub fn from_indexed_images<F>(
        source: Vec<Arc<CStarAlgebra>>,
        target: Vec<Arc<CStarAlgebra>>,
        mut image: F,
    ) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Tensor>,
    {
        let (r, c) = (total_dim(&target), total_dim(&source));
        let mut matrix = DMatrix::zeros(r, c);
        for j in 0..c {
            let y = image(j)?;
            if !legs_match(y.legs(), &target) {
                return Err(Error::ShapeMismatch(format!("image of basis element {j} has the wrong legs")));
            }
            matrix.set_column(j, y.coords());
        }
        Ok(LinearOperator { source, target, matrix })
    }

    pub fn identity(legs: Vec<Arc<CStarAlgebra>>) -> Self {
        let n = total_dim(&legs);
        LinearOperator { source: legs.clone(), target: legs, matrix: DMatrix::identity(n, n) }
    }

    pub fn source(&self) -> &[Arc<CStarAlgebra>] {
        &self.source
    }

    pub fn target(&self) -> &[Arc<CStarAlgebra>] {
        &self.target
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        if !legs_match(x.legs(), &self.source) {
            return Err(Error::ShapeMismatch("tensor does not lie in the operator's source".into()));
        }
        Tensor::new(self.target.clone(), &self.matrix * x.coords())
    }

    pub fn apply_element(&self, a: &AlgebraElement) -> Result<Tensor> {
        self.apply(&Tensor::from_element(a))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if !legs_match(other.target(), &self.source) {
            return Err(Error::ShapeMismatch("operators cannot be composed".into()));
        }
        Ok(LinearOperator {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `self ⊗ other`, acting on the concatenated legs.
    pub fn kron(&self, other: &LinearOperator) -> LinearOperator {
        let mut source = self.source.clone();
        source.extend(other.source.iter().cloned());
        let mut target = self.target.clone();
        target.extend(other.target.iter().cloned());
        LinearOperator { source, target, matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn svd(&self) -> FullSvd {
        FullSvd::new(&self.matrix)
    }

    pub fn rank(&self) -> usize {
        self.svd().rank()
    }

    /// Basis of the kernel as source tensors.
    pub fn kernel(&self) -> Vec<Tensor> {
        let ns = self.svd().null_space();
        ns.column_iter()
            .map(|col| Tensor::new(self.source.clone(), col.into_owned()).expect("kernel vector has source size"))
            .collect()
    }
}

/// Largest residuals of the *-homomorphism identities over basis pairs,
/// measured in the Hilbert–Schmidt norm of the target.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StarHomDefects {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub unital: f64,
}

impl StarHomDefects {
    pub fn max(&self) -> f64 {
        self.multiplicative.max(self.adjoint).max(self.unital)
    }
}

pub fn check_star_hom(f: &LinearOperator) -> StarHomDefects {
    let n = total_dim(f.source());
    let images: Vec<Tensor> = (0..n)
        .map(|j| Tensor::new(f.target().to_vec(), f.matrix().column(j).into_owned()).unwrap())
        .collect();
    let basis: Vec<Tensor> = (0..n).map(|j| Tensor::basis_element(f.source().to_vec(), j)).collect();
    let mut multiplicative = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let prod = basis[i].try_mul(&basis[j]).unwrap();
            let lhs = f.apply(&prod).unwrap();
            let rhs = images[i].try_mul(&images[j]).unwrap();
            multiplicative = multiplicative.max(lhs.try_sub(&rhs).unwrap().hs_norm());
        }
    }
    let mut adjoint = 0.0f64;
    for i in 0..n {
        let lhs = f.apply(&basis[i].adjoint()).unwrap();
        adjoint = adjoint.max(lhs.try_sub(&images[i].adjoint()).unwrap().hs_norm());
    }
    let unit_img = f.apply(&Tensor::unit(f.source().to_vec())).unwrap();
    let unital = unit_img.try_sub(&Tensor::unit(f.target().to_vec())).unwrap().hs_norm();
    StarHomDefects { multiplicative, adjoint, unital }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, one, zero};

    #[test]
    fn inner_automorphism_is_star_hom() {
        let a = CStarAlgebra::full(&[2]).unwrap();
        let s = (0.5f64).sqrt();
        let u = a
            .from_blocks(&[DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)])])
            .unwrap();
        let f = LinearOperator::from_basis_images(vec![a.clone()], vec![a.clone()], |x| {
            let e = x.to_element()?;
            Ok(Tensor::from_element(&(&(&u * &e) * &u.adjoint())))
        })
        .unwrap();
        assert!(check_star_hom(&f).max() < 1e-12);
        assert_eq!(f.rank(), 4);
    }

    #[test]
    fn transpose_is_not_multiplicative() {
        let a = CStarAlgebra::full(&[2]).unwrap();
        let mut m = DMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            m[(i, j)] = one();
        }
        let f = LinearOperator::new(vec![a.clone()], vec![a.clone()], m).unwrap();
        let d = check_star_hom(&f);
        assert!(d.multiplicative > 0.5);
        assert!(d.adjoint < 1e-14 && d.unital < 1e-14);
        let _ = zero();
    }
}
