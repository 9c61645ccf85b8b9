//! Unitary corepresentations `u ∈ A ⊗ M_k` with `(φ⊗ι)(u) = u₁₃u₂₃`, their
//! slices, and the explicit witnesses that put slices and their products in
//! the domains of the counit and antipode.
//!
//! Writing `u = Σ u_ij ⊗ e_ij`, the law reads `φ(u_ij) = Σ_l u_il ⊗ u_lj`.
//! The witnesses below are finite sums over the standard basis of `ℂᵏ`.

use std::sync::Arc;

use nalgebra::DVector;

use crate::csalg::{AlgebraElement, CStarAlgebra, Functional, Tensor};
use crate::error::{Error, Result};
use crate::hopf::{Comultiplication, HopfStructure};
use crate::linalg::{one, zero, C64};

/// A corepresentation on `ℂᵏ`; the second leg is always `M_k` with its
/// matrix-unit basis.
#[derive(Clone, Debug)]
pub struct Corepresentation {
    space: Arc<CStarAlgebra>,
    u: Tensor,
}

fn matrix_unit(space: &Arc<CStarAlgebra>, i: usize, j: usize) -> AlgebraElement {
    let k = space.block_dims()[0];
    space.basis_element(i * k + j)
}

impl Corepresentation {
    /// Wraps `u`; fails unless `u` has two legs and the second is a single
    /// full matrix block with matrix-unit basis.
    pub fn new(u: Tensor) -> Result<Self> {
        let space = match u.legs() {
            [_, s] if s.block_dims().len() == 1 && s.is_full() => s.clone(),
            _ => return Err(Error::InvalidInput("a corepresentation lives in A ⊗ M_k".into())),
        };
        Ok(Corepresentation { space, u })
    }

    /// `Σ_ij u_ij ⊗ e_ij` from a square array of entries.
    pub fn from_entries(alg: &Arc<CStarAlgebra>, entries: &[Vec<AlgebraElement>]) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput("entries must form a non-empty square array".into()));
        }
        let space = CStarAlgebra::full(&[k])?;
        let mut u = Tensor::zeros(vec![alg.clone(), space.clone()]);
        for (i, row) in entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.algebra().same_as(alg) {
                    return Err(Error::ShapeMismatch(format!("entry ({i}, {j}) lives in another algebra")));
                }
                u = u.try_add(&Tensor::elementary(&[x, &matrix_unit(&space, i, j)]))?;
            }
        }
        Self::new(u)
    }

    /// `Σ_i g_i ⊗ e_ii`.
    pub fn diagonal(alg: &Arc<CStarAlgebra>, diag: &[AlgebraElement]) -> Result<Self> {
        let k = diag.len();
        let entries: Vec<Vec<AlgebraElement>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { diag[i].clone() } else { alg.zero() }).collect())
            .collect();
        Self::from_entries(alg, &entries)
    }

    /// `1 ⊗ 1` on `ℂ`.
    pub fn trivial(alg: &Arc<CStarAlgebra>) -> Self {
        Self::diagonal(alg, &[alg.one()]).expect("unit entry")
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.u.legs()[0]
    }

    /// `M_k`.
    pub fn space(&self) -> &Arc<CStarAlgebra> {
        &self.space
    }

    pub fn space_dim(&self) -> usize {
        self.space.block_dims()[0]
    }

    pub fn tensor(&self) -> &Tensor {
        &self.u
    }

    /// `u_ij`.
    pub fn entry(&self, i: usize, j: usize) -> Result<AlgebraElement> {
        let k = self.space_dim();
        self.u.slice_to_element(1, &Functional::coordinate(&self.space, i * k + j))
    }

    pub fn entries(&self) -> Result<Vec<Vec<AlgebraElement>>> {
        let k = self.space_dim();
        (0..k).map(|i| (0..k).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// `(ι⊗ω)(u)`.
    pub fn slice(&self, omega: &Functional) -> Result<AlgebraElement> {
        self.u.slice_to_element(1, omega)
    }

    /// `(ι⊗ω)(u*)`.
    pub fn adjoint_slice(&self, omega: &Functional) -> Result<AlgebraElement> {
        self.u.adjoint().slice_to_element(1, omega)
    }

    /// The witness `x = Σ ω(e_ij) Σ_l u_il ⊗ u_jl*`, which satisfies
    /// `T₁x = (ι⊗ω)(u) ⊗ 1` when `uu* = 1`.
    pub fn witness(&self, omega: &Functional) -> Result<Tensor> {
        let e = self.entries()?;
        let alg = self.algebra();
        let mut x = Tensor::zeros(vec![alg.clone(), alg.clone()]);
        for_each_weight(self, omega, |i, j, w| {
            for l in 0..self.space_dim() {
                if is_zero(&e[i][l]) || is_zero(&e[j][l]) {
                    continue;
                }
                x = x.try_add(&Tensor::elementary(&[&e[i][l], &e[j][l].adjoint()]).scale(w))?;
            }
            Ok(())
        })?;
        Ok(x)
    }

    /// The right witness `x = Σ ω(e_ij) Σ_l u_li* ⊗ u_lj`, which satisfies
    /// `T₂x = 1 ⊗ (ι⊗ω)(u)` when `u*u = 1`.
    pub fn right_witness(&self, omega: &Functional) -> Result<Tensor> {
        let e = self.entries()?;
        let alg = self.algebra();
        let mut x = Tensor::zeros(vec![alg.clone(), alg.clone()]);
        for_each_weight(self, omega, |i, j, w| {
            for l in 0..self.space_dim() {
                if is_zero(&e[l][i]) || is_zero(&e[l][j]) {
                    continue;
                }
                x = x.try_add(&Tensor::elementary(&[&e[l][i].adjoint(), &e[l][j]]).scale(w))?;
            }
            Ok(())
        })?;
        Ok(x)
    }

    /// The triple witness `x = Σ ω(e_ij) Σ_lm u_li* ⊗ u_lm ⊗ u_jm*`, which
    /// satisfies `T(x) = 1 ⊗ (ι⊗ω)(u) ⊗ 1` for a unitary corepresentation.
    pub fn triple_witness(&self, omega: &Functional) -> Result<Tensor> {
        let e = self.entries()?;
        let alg = self.algebra();
        let k = self.space_dim();
        let mut x = Tensor::zeros(vec![alg.clone(); 3]);
        for_each_weight(self, omega, |i, j, w| {
            for l in (0..k).filter(|&l| !is_zero(&e[l][i])) {
                let left = e[l][i].adjoint();
                for m in (0..k).filter(|&m| !is_zero(&e[l][m]) && !is_zero(&e[j][m])) {
                    x = x.try_add(&Tensor::elementary(&[&left, &e[l][m], &e[j][m].adjoint()]).scale(w))?;
                }
            }
            Ok(())
        })?;
        Ok(x)
    }
}

fn is_zero(a: &AlgebraElement) -> bool {
    a.coords().iter().all(|z| *z == zero())
}

/// Calls `f(i, j, ω(e_ij))` for the nonzero weights of `ω`.
fn for_each_weight(
    u: &Corepresentation,
    omega: &Functional,
    mut f: impl FnMut(usize, usize, C64) -> Result<()>,
) -> Result<()> {
    if !omega.algebra().same_as(u.space()) {
        return Err(Error::ShapeMismatch("functional does not act on M_k".into()));
    }
    let k = u.space_dim();
    for (idx, w) in omega.values().iter().enumerate() {
        if *w != zero() {
            f(idx / k, idx % k, *w)?;
        }
    }
    Ok(())
}

/// Unitarity and corepresentation-law residuals, in the C*-norm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorepDefects {
    /// `‖u*u − 1‖`.
    pub isometry: f64,
    /// `‖uu* − 1‖`.
    pub coisometry: f64,
    /// `‖(φ⊗ι)(u) − u₁₃u₂₃‖`.
    pub law: f64,
}

impl CorepDefects {
    pub fn max(&self) -> f64 {
        self.isometry.max(self.coisometry).max(self.law)
    }
}

pub fn check_corep(comult: &Comultiplication, u: &Corepresentation) -> Result<CorepDefects> {
    let alg = comult.algebra();
    if !u.algebra().same_as(alg) {
        return Err(Error::ShapeMismatch("corepresentation and comultiplication live on different algebras".into()));
    }
    let t = u.tensor();
    let unit = Tensor::unit(t.legs().to_vec());
    let isometry = t.adjoint().try_mul(t)?.try_sub(&unit)?.norm();
    let coisometry = t.try_mul(&t.adjoint())?.try_sub(&unit)?.norm();
    let lhs = t.apply_on(0, comult.phi())?;
    let rhs = t.insert_unit(1, alg).try_mul(&t.insert_unit(0, alg))?;
    Ok(CorepDefects { isometry, coisometry, law: lhs.try_sub(&rhs)?.norm() })
}

fn require_corep(h: &HopfStructure, u: &Corepresentation) -> Result<()> {
    let d = check_corep(h.comultiplication(), u)?;
    if d.max() > h.tolerance() {
        return Err(Error::Precondition(format!(
            "not a unitary corepresentation: u*u {:.3e}, uu* {:.3e}, law {:.3e}",
            d.isometry, d.coisometry, d.law
        )));
    }
    Ok(())
}

/// A slice `a = (ι⊗ω)(u)` with its witnesses and the residuals of the
/// counit and antipode formulas.
#[derive(Clone, Debug)]
pub struct CorepSlice {
    pub element: AlgebraElement,
    pub witness: Tensor,
    pub right_witness: Tensor,
    /// `‖T₁x − a⊗1‖` for the explicit witness.
    pub witness_residual: f64,
    /// `‖T₂x′ − 1⊗a‖` for the explicit right witness.
    pub right_witness_residual: f64,
    /// Distance between the explicit witness and the solved one.
    pub witness_agreement: f64,
    /// `|ε(a) − ω(1)|`.
    pub counit: f64,
    /// `‖S(a) − (ι⊗ω)(u*)‖`.
    pub antipode: f64,
    /// `|ε′(a) − ω(1)|`.
    pub right_counit: f64,
    /// `‖S′(a) − (ι⊗ω)(u*)‖`.
    pub right_antipode: f64,
}

impl CorepSlice {
    pub fn max(&self) -> f64 {
        [
            self.witness_residual,
            self.right_witness_residual,
            self.witness_agreement,
            self.counit,
            self.antipode,
            self.right_counit,
            self.right_antipode,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Slices `u` with `ω` and checks `ε(a) = ω(1)`, `S(a) = (ι⊗ω)(u*)` and
/// their right-handed versions. Requires a unitary corepresentation of a
/// Hopf pair.
pub fn corep_slice(h: &HopfStructure, u: &Corepresentation, omega: &Functional) -> Result<CorepSlice> {
    require_corep(h, u)?;
    let alg = h.algebra();
    let one = alg.one();
    let a = u.slice(omega)?;
    let target = u.adjoint_slice(omega)?;
    let omega_one = omega.eval(&u.space().one());

    let x = u.witness(omega)?;
    let xr = u.right_witness(omega)?;
    let witness_residual = h.maps().t1.apply(&x)?.try_sub(&Tensor::elementary(&[&a, &one]))?.hs_norm();
    let right_witness_residual = h.maps().t2.apply(&xr)?.try_sub(&Tensor::elementary(&[&one, &a]))?.hs_norm();
    let witness_agreement = h.witness(&a)?.try_sub(&x)?.hs_norm();
    let (eps_r, s_r) = h.right_counit_antipode(&a)?;
    Ok(CorepSlice {
        counit: (h.counit(&a)? - omega_one).norm(),
        antipode: (&h.antipode(&a)? - &target).hs_norm(),
        right_counit: (eps_r - omega_one).norm(),
        right_antipode: (&s_r - &target).hs_norm(),
        element: a,
        witness: x,
        right_witness: xr,
        witness_residual,
        right_witness_residual,
        witness_agreement,
    })
}

/// `w = u₁₂v₁₃` on `ℂᵏ ⊗ ℂˡ`, with `e_(i,i′)` at index `i·l + i′`.
pub fn tensor_corep(u: &Corepresentation, v: &Corepresentation) -> Result<Corepresentation> {
    let alg = u.algebra();
    if !v.algebra().same_as(alg) {
        return Err(Error::ShapeMismatch("corepresentations of different algebras".into()));
    }
    let (k, l) = (u.space_dim(), v.space_dim());
    let w3 = u.tensor().insert_unit(2, v.space()).try_mul(&v.tensor().insert_unit(1, u.space()))?;
    let space = CStarAlgebra::full(&[k * l])?;
    let kl = k * l;
    let (ku, lv) = (k * k, l * l);
    let mut coords = DVector::zeros(alg.dim() * kl * kl);
    for (idx, z) in w3.coords().iter().enumerate() {
        if *z == zero() {
            continue;
        }
        let (p, rest) = (idx / (ku * lv), idx % (ku * lv));
        let (a, b) = (rest / lv, rest % lv);
        let (i, j, i2, j2) = (a / k, a % k, b / l, b % l);
        coords[p * kl * kl + (i * l + i2) * kl + (j * l + j2)] = *z;
    }
    Corepresentation::new(Tensor::new(vec![alg.clone(), space], coords)?)
}

/// `ω₁⊗ω₂` on `M_{kl}`, matching the index convention of [`tensor_corep`].
pub fn product_functional(w1: &Functional, w2: &Functional) -> Result<Functional> {
    let dims = |w: &Functional| match w.algebra().block_dims() {
        [n] if w.algebra().is_full() => Ok(*n),
        _ => Err(Error::InvalidInput("functionals must act on a full matrix algebra".into())),
    };
    let (k, l) = (dims(w1)?, dims(w2)?);
    let kl = k * l;
    let values = DVector::from_fn(kl * kl, |idx, _| {
        let (r, c) = (idx / kl, idx % kl);
        w1.values()[(r / l) * k + c / l] * w2.values()[(r % l) * l + c % l]
    });
    Functional::from_values(CStarAlgebra::full(&[kl])?, values)
}

/// Certificate that the product of two slices lies in `𝒜 ∩ A₀ ∩ A₀′`.
#[derive(Clone, Debug)]
pub struct ProductCertificate {
    pub product: AlgebraElement,
    /// `‖(ι⊗ω⊗ω′)(u₁₂v₁₃) − ab‖`.
    pub slice_residual: f64,
    /// Largest `‖T(x_cd) − c⊗ab⊗d‖` over basis pairs, for the explicit
    /// triple witness `x_cd = (c⊗1⊗1)x(1⊗1⊗d)`.
    pub triple_residual: f64,
    /// Distance of `ab` from `A₀` and from `A₀′`.
    pub a0_residual: f64,
    pub a0_prime_residual: f64,
}

impl ProductCertificate {
    pub fn max(&self) -> f64 {
        self.slice_residual.max(self.triple_residual).max(self.a0_residual).max(self.a0_prime_residual)
    }
}

/// Exhibits `ab ∈ 𝒜 ∩ A₀ ∩ A₀′` for `a = (ι⊗ω)(u)` and `b = (ι⊗ω′)(v)`.
pub fn product_in_script_a(
    h: &HopfStructure,
    u: &Corepresentation,
    v: &Corepresentation,
    omega: &Functional,
    omega_prime: &Functional,
) -> Result<ProductCertificate> {
    require_corep(h, u)?;
    require_corep(h, v)?;
    let ab = &u.slice(omega)? * &v.slice(omega_prime)?;
    let w = tensor_corep(u, v)?;
    let big = product_functional(omega, omega_prime)?;
    let slice_residual = (&w.slice(&big)? - &ab).hs_norm();
    let x = w.triple_witness(&big)?;
    let t = h.two_sided_operator()?;
    let basis = h.algebra().basis();
    let mut triple_residual = 0.0f64;
    for c in &basis {
        let left = x.mul_leg_left(0, c)?;
        for d in &basis {
            let xcd = left.mul_leg_right(2, d)?;
            let r = t.apply(&xcd)?.try_sub(&Tensor::elementary(&[c, &ab, d]))?.hs_norm();
            triple_residual = triple_residual.max(r);
        }
    }
    Ok(ProductCertificate {
        slice_residual,
        triple_residual,
        a0_residual: h.a0().residual(&ab),
        a0_prime_residual: h.a0_prime().residual(&ab),
        product: ab,
    })
}

/// The functional `a ↦ a_ij` on `M_k`.
pub fn matrix_unit_functional(space: &Arc<CStarAlgebra>, i: usize, j: usize) -> Functional {
    let k = space.block_dims()[0];
    Functional::coordinate(space, i * k + j)
}

/// `a ↦ Σ_i a_ii`.
pub fn trace_functional(space: &Arc<CStarAlgebra>) -> Functional {
    let k = space.block_dims()[0];
    let values = DVector::from_fn(k * k, |idx, _| if idx / k == idx % k { one() } else { zero() });
    Functional::from_values(space.clone(), values).expect("matching dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{group_algebra, FiniteGroup};

    #[test]
    fn trivial_corepresentation_is_exact() {
        let g = FiniteGroup::cyclic(2);
        let (alg, c) = group_algebra(&g).unwrap();
        let u = Corepresentation::trivial(&alg);
        assert_eq!(u.space_dim(), 1);
        assert_eq!(check_corep(&c, &u).unwrap().max(), 0.0);
    }

    #[test]
    fn tensor_with_trivial_keeps_entries() {
        let g = FiniteGroup::cyclic(3);
        let (alg, _) = group_algebra(&g).unwrap();
        let u = Corepresentation::diagonal(&alg, &alg.basis()).unwrap();
        let w = tensor_corep(&Corepresentation::trivial(&alg), &u).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(w.entry(i, j).unwrap().is_close(&u.entry(i, j).unwrap(), 1e-15));
            }
        }
    }

    #[test]
    fn rejects_non_matrix_space() {
        let a = CStarAlgebra::full(&[1, 1]).unwrap();
        let t = Tensor::unit(vec![a.clone(), a]);
        assert!(matches!(Corepresentation::new(t), Err(Error::InvalidInput(_))));
    }
}
