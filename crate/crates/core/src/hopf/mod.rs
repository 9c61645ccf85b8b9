//! Comultiplications, the Galois maps `T₁, T₂, T̃, T̂`, the Hopf verdict and
//! the counit and antipode recovered from the inverses of the Galois maps.

mod structure;
mod two_sided;

pub use structure::{HopfDetails, HopfReport, HopfStructure, IdentityBattery, SliceResiduals};
pub use two_sided::{Agreement, FormulaResiduals, TwoSided};

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::csalg::{check_star_hom, AlgebraElement, CStarAlgebra, LinearOperator, Tensor};
use crate::error::{Error, Result};
use crate::haagerup::gamma;
use crate::linalg::C64;

/// A coassociative *-homomorphism `φ : A → A ⊗ A`, stored with the derived
/// map `φ⁽²⁾ = (φ ⊗ ι)φ`.
///
/// Construction only checks shapes; the algebraic laws are measured by
/// [`check_comultiplication`].
#[derive(Clone, Debug)]
pub struct Comultiplication {
    alg: Arc<CStarAlgebra>,
    phi: LinearOperator,
    phi2: LinearOperator,
    images: Vec<Tensor>,
}

impl Comultiplication {
    pub fn new(phi: LinearOperator) -> Result<Self> {
        let alg = match phi.source() {
            [a] => a.clone(),
            _ => return Err(Error::InvalidInput("a comultiplication acts on a single algebra".into())),
        };
        let fits = matches!(phi.target(), [l, r] if l.same_as(&alg) && r.same_as(&alg));
        if !fits {
            return Err(Error::InvalidInput("a comultiplication must map A into A ⊗ A".into()));
        }
        let id = LinearOperator::identity(vec![alg.clone()]);
        let phi2 = phi.kron(&id).compose(&phi)?;
        let legs = vec![alg.clone(), alg.clone()];
        let images = (0..alg.dim())
            .map(|i| Tensor::new(legs.clone(), phi.matrix().column(i).into_owned()))
            .collect::<Result<_>>()?;
        Ok(Comultiplication { alg, phi, phi2, images })
    }

    /// Builds `φ` from the images `φ(e_i)` of the basis.
    pub fn from_images(alg: &Arc<CStarAlgebra>, images: &[Tensor]) -> Result<Self> {
        if images.len() != alg.dim() {
            return Err(Error::InvalidInput(format!(
                "expected {} basis images, got {}",
                alg.dim(),
                images.len()
            )));
        }
        let legs = vec![alg.clone(), alg.clone()];
        let op = LinearOperator::from_indexed_images(vec![alg.clone()], legs, |i| Ok(images[i].clone()))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(op)
    }

    /// Builds `φ` from its `dim² × dim` coordinate matrix.
    pub fn from_matrix(alg: &Arc<CStarAlgebra>, matrix: DMatrix<C64>) -> Result<Self> {
        let legs = vec![alg.clone(), alg.clone()];
        let op = LinearOperator::new(vec![alg.clone()], legs, matrix).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(op)
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.alg
    }

    pub fn phi(&self) -> &LinearOperator {
        &self.phi
    }

    pub fn phi2(&self) -> &LinearOperator {
        &self.phi2
    }

    /// `φ(e_i)`.
    pub fn image(&self, i: usize) -> &Tensor {
        &self.images[i]
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<Tensor> {
        self.phi.apply_element(a)
    }

    /// `φ⁽²⁾(a)`.
    pub fn apply_twice(&self, a: &AlgebraElement) -> Result<Tensor> {
        self.phi2.apply_element(a)
    }

    fn legs(&self, n: usize) -> Vec<Arc<CStarAlgebra>> {
        vec![self.alg.clone(); n]
    }
}

/// Largest residuals of the comultiplication laws over basis elements and
/// basis pairs, in the Hilbert–Schmidt norm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComultiplicationDefects {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub unital: f64,
    pub coassociativity: f64,
}

impl ComultiplicationDefects {
    pub fn max(&self) -> f64 {
        self.multiplicative.max(self.adjoint).max(self.unital).max(self.coassociativity)
    }
}

pub fn check_comultiplication(c: &Comultiplication) -> ComultiplicationDefects {
    let hom = check_star_hom(&c.phi);
    let id = LinearOperator::identity(c.legs(1));
    let right = id.kron(&c.phi).compose(&c.phi).expect("legs agree by construction");
    let mut coassociativity = 0.0f64;
    for j in 0..c.alg.dim() {
        let diff = c.phi2.matrix().column(j) - right.matrix().column(j);
        let t = Tensor::new(c.legs(3), diff).expect("column has the size of A ⊗ A ⊗ A");
        coassociativity = coassociativity.max(t.hs_norm());
    }
    ComultiplicationDefects {
        multiplicative: hom.multiplicative,
        adjoint: hom.adjoint,
        unital: hom.unital,
        coassociativity,
    }
}

/// The four Galois maps on `A ⊗ A`:
/// `T₁(p⊗q) = φ(p)(1⊗q)`, `T₂(p⊗q) = (p⊗1)φ(q)`,
/// `T̃(p⊗q) = (1⊗p)φ(q)` and `T̂(p⊗q) = φ(p)(q⊗1)`.
#[derive(Clone, Debug)]
pub struct GaloisMaps {
    pub t1: LinearOperator,
    pub t2: LinearOperator,
    pub t_tilde: LinearOperator,
    pub t_hat: LinearOperator,
}

impl GaloisMaps {
    /// Largest entry of `T̃ − adjoint∘T₁∘Γ`. The right side is linear since
    /// both `Γ` and the adjoint are conjugate linear.
    pub fn tilde_identity_residual(&self) -> Result<f64> {
        let legs = self.t1.source().to_vec();
        let other = LinearOperator::from_basis_images(legs.clone(), legs, |x| Ok(self.t1.apply(&gamma(x)?)?.adjoint()))?;
        Ok(max_abs_matrix(&(self.t_tilde.matrix() - other.matrix())))
    }
}

fn max_abs_matrix(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn galois_maps(c: &Comultiplication) -> Result<GaloisMaps> {
    let legs = c.legs(2);
    let basis = c.alg.basis();
    let d = c.alg.dim();
    let build = |f: &dyn Fn(usize, usize) -> Result<Tensor>| {
        LinearOperator::from_indexed_images(legs.clone(), legs.clone(), |k| f(k / d, k % d))
    };
    Ok(GaloisMaps {
        t1: build(&|p, q| c.images[p].mul_leg_right(1, &basis[q]))?,
        t2: build(&|p, q| c.images[q].mul_leg_left(0, &basis[p]))?,
        t_tilde: build(&|p, q| c.images[q].mul_leg_left(1, &basis[p]))?,
        t_hat: build(&|p, q| c.images[p].mul_leg_right(0, &basis[q]))?,
    })
}

/// Outcome of the Hopf test: the comultiplication defects and the ranks and
/// kernels of `T₁` and `T₂`.
///
/// In finite dimensions `A ⊗ₕ A` and `A ⊙ A` coincide as sets, so
/// injectivity on the completion is injectivity of the matrices.
#[derive(Clone, Debug)]
pub struct HopfVerdict {
    pub dim: usize,
    pub defects: ComultiplicationDefects,
    pub is_comultiplication: bool,
    pub rank_t1: usize,
    pub rank_t2: usize,
    pub kernel_t1: Vec<Tensor>,
    pub kernel_t2: Vec<Tensor>,
    pub tilde_identity_residual: f64,
    pub is_hopf: bool,
}

impl HopfVerdict {
    pub fn full_rank(&self) -> usize {
        self.dim * self.dim
    }
}

pub fn is_hopf(c: &Comultiplication, tol: f64) -> Result<HopfVerdict> {
    let maps = galois_maps(c)?;
    verdict(c, &maps, tol)
}

pub(crate) fn verdict(c: &Comultiplication, maps: &GaloisMaps, tol: f64) -> Result<HopfVerdict> {
    let defects = check_comultiplication(c);
    let dim = c.alg.dim();
    let (s1, s2) = (maps.t1.svd(), maps.t2.svd());
    let (rank_t1, rank_t2) = (s1.rank(), s2.rank());
    let to_tensors = |ns: DMatrix<C64>| -> Vec<Tensor> {
        ns.column_iter().map(|col| Tensor::new(c.legs(2), col.into_owned()).expect("kernel vector")).collect()
    };
    let is_comultiplication = defects.max() <= tol;
    Ok(HopfVerdict {
        dim,
        defects,
        is_comultiplication,
        rank_t1,
        rank_t2,
        kernel_t1: to_tensors(s1.null_space()),
        kernel_t2: to_tensors(s2.null_space()),
        tilde_identity_residual: maps.tilde_identity_residual()?,
        is_hopf: is_comultiplication && rank_t1 == dim * dim && rank_t2 == dim * dim,
    })
}

/// `ψ(p ⊗ q) = φ₁₃(p) φ₂₃(q)`, extended linearly.
pub fn psi(c: &Comultiplication, x: &Tensor) -> Result<Tensor> {
    let d = c.alg.dim();
    if x.legs().len() != 2 || !x.legs().iter().all(|l| l.same_as(&c.alg)) {
        return Err(Error::ShapeMismatch("ψ acts on A ⊗ A".into()));
    }
    let outer: Vec<Tensor> = c.images.iter().map(|t| t.insert_unit(1, &c.alg)).collect();
    let inner: Vec<Tensor> = c.images.iter().map(|t| t.insert_unit(0, &c.alg)).collect();
    let mut out = Tensor::zeros(c.legs(3));
    for (k, z) in x.coords().iter().enumerate() {
        if *z == C64::new(0.0, 0.0) {
            continue;
        }
        let term = outer[k / d].try_mul(&inner[k % d])?;
        out = out.try_add(&term.scale(*z))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_on(dims: &[usize]) -> Comultiplication {
        let a = CStarAlgebra::full(dims).unwrap();
        let legs = vec![a.clone(), a.clone()];
        let op = LinearOperator::from_basis_images(vec![a.clone()], legs, |x| Ok(Tensor::elementary(&[&x.to_element()?, &a.one()])))
            .unwrap();
        Comultiplication::new(op).unwrap()
    }

    #[test]
    fn a_tensor_one_is_a_comultiplication_but_not_hopf() {
        let c = trivial_on(&[2]);
        assert!(check_comultiplication(&c).max() < 1e-14);
        let v = is_hopf(&c, 1e-9).unwrap();
        assert!(v.is_comultiplication);
        assert_eq!((v.rank_t1, v.rank_t2), (16, 4));
        assert_eq!(v.kernel_t2.len(), 12);
        assert!(!v.is_hopf);
        assert!(v.tilde_identity_residual < 1e-12);
    }

    #[test]
    fn shape_errors_are_invalid_input() {
        let a = CStarAlgebra::full(&[2]).unwrap();
        let err = Comultiplication::from_matrix(&a, DMatrix::zeros(4, 4)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn one_dimensional_algebra_is_hopf() {
        let c = trivial_on(&[1]);
        let v = is_hopf(&c, 1e-9).unwrap();
        assert!(v.is_hopf);
        let one = c.algebra().one();
        let x = Tensor::elementary(&[&one, &one]);
        assert!(psi(&c, &x).unwrap().is_close(&Tensor::unit(c.legs(3)), 1e-14));
    }
}
