//! The standard examples at finite scale: function algebras and group
//! algebras of finite groups, function algebras of monoids as negative
//! controls, Haar states, recovery of a group from a commutative Hopf pair,
//! and the Fourier duality for cyclic groups.

mod group;

pub use group::{finite_group, small_groups, validate_monoid, FiniteGroup};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::corep::Corepresentation;
use crate::csalg::{AlgebraElement, CStarAlgebra, Functional, LinearOperator, Tensor};
use crate::error::{Error, Result};
use crate::hopf::{check_comultiplication, galois_maps, is_hopf, Comultiplication};
use crate::linalg::{c, hermitian_eigen, null_space, one, C64};

/// Smallest density eigenvalue for which an invariant state counts as faithful.
pub const FAITHFUL_THRESHOLD: f64 = 1e-10;

/// `C(M)` for a finite associative table with identity: `ℂⁿ` with
/// `φ(δ_r) = Σ_{pq=r} δ_p⊗δ_q`.
fn dual_of_table(table: &[Vec<usize>]) -> Result<(Arc<CStarAlgebra>, Comultiplication)> {
    let n = table.len();
    let alg = CStarAlgebra::full(&vec![1; n])?;
    let mut m = DMatrix::zeros(n * n, n);
    for p in 0..n {
        for q in 0..n {
            m[(p * n + q, table[p][q])] = one();
        }
    }
    let comult = Comultiplication::from_matrix(&alg, m)?;
    Ok((alg, comult))
}

/// The function algebra `C(G)` with `φ(f)(p, q) = f(pq)`. The basis is the
/// point masses `δ_p` in the order of the group elements.
pub fn function_algebra(g: &FiniteGroup) -> Result<(Arc<CStarAlgebra>, Comultiplication)> {
    dual_of_table(g.table())
}

/// The function algebra of a finite monoid. Fails if the table is not
/// associative or has no identity.
pub fn monoid_function_algebra(table: &[Vec<usize>]) -> Result<(Arc<CStarAlgebra>, Comultiplication)> {
    validate_monoid(table)?;
    dual_of_table(table)
}

/// The left regular representation `λ_p δ_q = δ_{pq}` as permutation matrices.
pub fn regular_representation(g: &FiniteGroup) -> Vec<DMatrix<C64>> {
    let n = g.order();
    (0..n)
        .map(|p| {
            let mut m = DMatrix::zeros(n, n);
            for q in 0..n {
                m[(g.mul(p, q), q)] = one();
            }
            m
        })
        .collect()
}

/// The group algebra, realized inside `M_n` by the regular representation
/// with declared basis `{λ_p}` and `φ(λ_p) = λ_p⊗λ_p`.
pub fn group_algebra(g: &FiniteGroup) -> Result<(Arc<CStarAlgebra>, Comultiplication)> {
    let n = g.order();
    let basis = regular_representation(g).into_iter().map(|m| vec![m]).collect();
    let alg = CStarAlgebra::with_basis(&[n], basis)?;
    let lambda = alg.basis();
    let images: Vec<Tensor> = lambda.iter().map(|l| Tensor::elementary(&[l, l])).collect();
    let comult = Comultiplication::from_images(&alg, &images)?;
    Ok((alg, comult))
}

/// The regular corepresentation `Σ_p λ_p ⊗ e_pp` of a group algebra built by
/// [`group_algebra`].
pub fn regular_corepresentation(alg: &Arc<CStarAlgebra>) -> Result<Corepresentation> {
    Corepresentation::diagonal(alg, &alg.basis())
}

/// The corepresentation `Σ_p δ_p ⊗ λ_p` of `C(G)` on `ℓ²(G)`.
pub fn translation_corepresentation(g: &FiniteGroup) -> Result<Corepresentation> {
    let n = g.order();
    let alg = function_algebra(g)?.0;
    let space = CStarAlgebra::full(&[n])?;
    let mut u = Tensor::zeros(vec![alg.clone(), space.clone()]);
    for (p, m) in regular_representation(g).iter().enumerate() {
        u = u.try_add(&Tensor::elementary(&[&alg.basis_element(p), &space.from_blocks(std::slice::from_ref(m))?]))?;
    }
    Corepresentation::new(u)
}

/// `π(f) = Σ_p f(p) λ_p` in the group algebra.
pub fn pi(alg: &Arc<CStarAlgebra>, f: &[C64]) -> Result<AlgebraElement> {
    alg.element(DVector::from_column_slice(f))
}

/// Convolution `(f ⋆ g)(p) = Σ_q f(q) g(q⁻¹p)`.
pub fn convolve(g: &FiniteGroup, f: &[C64], h: &[C64]) -> Result<Vec<C64>> {
    let n = g.order();
    if f.len() != n || h.len() != n {
        return Err(Error::InvalidInput(format!("functions must have {n} values")));
    }
    Ok((0..n).map(|p| (0..n).map(|q| f[q] * h[g.mul(g.inverse(q), p)]).sum()).collect())
}

/// `f̃(p) = f(p⁻¹)`.
pub fn reflect(g: &FiniteGroup, f: &[C64]) -> Vec<C64> {
    (0..g.order()).map(|p| f[g.inverse(p)]).collect()
}

/// `h(p) = Σ_q f(pq) g(q)` in `C(G)`, together with
/// `k(p, q) = Σ_r f(pr) g(qr)`, which satisfies `T₁(k) = h⊗1`.
pub fn convolution_element(g: &FiniteGroup, f: &[C64], h: &[C64]) -> Result<(AlgebraElement, Tensor)> {
    let n = g.order();
    if f.len() != n || h.len() != n {
        return Err(Error::InvalidInput(format!("functions must have {n} values")));
    }
    let alg = CStarAlgebra::full(&vec![1; n])?;
    let hv = DVector::from_fn(n, |p, _| (0..n).map(|q| f[g.mul(p, q)] * h[q]).sum());
    let kv = DVector::from_fn(n * n, |idx, _| {
        let (p, q) = (idx / n, idx % n);
        (0..n).map(|r| f[g.mul(p, r)] * h[g.mul(q, r)]).sum()
    });
    Ok((alg.element(hv)?, Tensor::new(vec![alg.clone(), alg], kv)?))
}

/// A normalized invariant functional and its positivity data.
#[derive(Clone, Debug)]
pub struct HaarState {
    pub state: Functional,
    /// Smallest eigenvalue of the density on the support of the unit.
    pub min_eigenvalue: f64,
    pub faithful: bool,
    /// Largest residual of `(ι⊗h)φ(a) = h(a)1` and `(h⊗ι)φ(a) = h(a)1`.
    pub invariance_residual: f64,
    /// Dimension of the space of invariant functionals.
    pub invariant_dim: usize,
    /// When the state is faithful, whether the pair also passed the Hopf test.
    pub hopf_cross_check: Option<bool>,
}

fn invariance_residual(comult: &Comultiplication, h: &Functional) -> Result<f64> {
    let alg = comult.algebra();
    let one = alg.one();
    let mut worst = 0.0f64;
    for k in 0..alg.dim() {
        let img = comult.image(k);
        let target = one.scale(h.values()[k]);
        worst = worst.max((&img.slice_to_element(1, h)? - &target).hs_norm());
        worst = worst.max((&img.slice_to_element(0, h)? - &target).hs_norm());
    }
    Ok(worst)
}

/// Solves the left and right invariance equations together with `h(1) = 1`
/// and keeps the solution if it is positive. Returns `None` when no
/// invariant state exists.
///
/// If the invariant functionals form a space of dimension above one, the
/// candidate is the projection of the normalized trace onto that space.
pub fn haar_state(comult: &Comultiplication, tol: f64) -> Result<Option<HaarState>> {
    let alg = comult.algebra().clone();
    let d = alg.dim();
    let u = alg.unit_coords();
    let phi = comult.phi().matrix();
    // Unknowns v_j = h(e_j). Right invariance: Σ_j c^k_{ij} v_j = u_i v_k,
    // left invariance: Σ_i c^k_{ij} v_i = u_j v_k.
    let mut sys = DMatrix::<C64>::zeros(2 * d * d, d);
    for k in 0..d {
        for i in 0..d {
            let (right, left) = (2 * (k * d + i), 2 * (k * d + i) + 1);
            for j in 0..d {
                sys[(right, j)] += phi[(i * d + j, k)];
                sys[(left, j)] += phi[(j * d + i, k)];
            }
            sys[(right, k)] -= u[i];
            sys[(left, k)] -= u[i];
        }
    }
    let ns = null_space(&sys);
    let invariant_dim = ns.ncols();
    if invariant_dim == 0 {
        return Ok(None);
    }
    let tr = Functional::trace(&alg);
    let guess = ns.column(0).into_owned();
    let v = if invariant_dim == 1 {
        guess
    } else {
        &ns * (ns.adjoint() * tr.values())
    };
    let norm = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<C64>();
    if norm.norm() <= tol {
        return Ok(None);
    }
    let state = Functional::from_values(alg.clone(), v / norm)?;
    let rho = state.density();
    let unit_blocks = alg.one().blocks();
    let mut min_eigenvalue = f64::INFINITY;
    for (r, e) in rho.blocks().iter().zip(&unit_blocks) {
        let n = r.nrows();
        let hermitian = (r + r.adjoint()) * c(0.5, 0.0);
        if (r - &hermitian).norm() > tol * (1.0 + r.norm()) {
            return Ok(None);
        }
        // Shift the complement of the unit so only the support is measured.
        let shifted = hermitian + (DMatrix::identity(n, n) - e);
        let (vals, _) = hermitian_eigen(&shifted);
        min_eigenvalue = min_eigenvalue.min(vals.first().copied().unwrap_or(f64::INFINITY));
    }
    if min_eigenvalue < -tol {
        return Ok(None);
    }
    let faithful = min_eigenvalue > FAITHFUL_THRESHOLD;
    let hopf_cross_check = if faithful { Some(is_hopf(comult, tol)?.is_hopf) } else { None };
    Ok(Some(HaarState {
        invariance_residual: invariance_residual(comult, &state)?,
        state,
        min_eigenvalue,
        faithful,
        invariant_dim,
        hopf_cross_check,
    }))
}

/// Recovers the group from a commutative pair `(ℂⁿ, φ)` whose comultiplication
/// is dual to a product on the points.
///
/// The points are the basis indices. The product is read from the
/// coefficients of `φ(δ_r)`, which must be `0` or `1` and define a function
/// `G × G → G`; the result must satisfy the group laws.
pub fn reconstruct_group(comult: &Comultiplication, tol: f64) -> Result<FiniteGroup> {
    let alg = comult.algebra();
    if !alg.is_commutative() {
        return Err(Error::Precondition("the algebra is not abelian".into()));
    }
    if !alg.is_full() || alg.block_dims().iter().any(|&b| b != 1) {
        return Err(Error::Precondition("the algebra must be given in its point basis (all blocks 1×1)".into()));
    }
    let defects = check_comultiplication(comult);
    if defects.max() > tol {
        return Err(Error::Precondition(format!(
            "φ is not a comultiplication (defect {:.3e})",
            defects.max()
        )));
    }
    let n = alg.dim();
    let maps = galois_maps(comult)?;
    for (name, t) in [("T₁", &maps.t1), ("T̂", &maps.t_hat)] {
        for k in 0..n * n {
            if t.matrix().column(k).norm() <= tol {
                return Err(Error::Precondition(format!(
                    "injectivity hypothesis fails: {name} kills δ_{}⊗δ_{}",
                    k / n,
                    k % n
                )));
            }
        }
    }
    let phi = comult.phi().matrix();
    let mut table = vec![vec![usize::MAX; n]; n];
    for p in 0..n {
        for q in 0..n {
            let mut hit = None;
            for r in 0..n {
                let z = phi[(p * n + q, r)];
                if (z - one()).norm() <= tol {
                    if hit.is_some() {
                        return Err(Error::Reconstruction(format!("product of {p} and {q} is not well defined")));
                    }
                    hit = Some(r);
                } else if z.norm() > tol {
                    return Err(Error::Reconstruction(format!(
                        "coefficient of δ_{p}⊗δ_{q} in φ(δ_{r}) is {z}, not 0 or 1"
                    )));
                }
            }
            table[p][q] = hit.ok_or_else(|| Error::Reconstruction(format!("product of {p} and {q} is undefined")))?;
        }
    }
    FiniteGroup::new(table).map_err(|e| Error::Reconstruction(format!("the recovered product is not a group law: {e}")))
}

/// The Fourier isomorphism between the group algebra of `ℤ_n` and the
/// function algebra of its dual `ℤ_n`: `λ_p ↦ Σ_k ω^{kp} δ_k`.
#[derive(Clone, Debug)]
pub struct CyclicFourier {
    pub group: FiniteGroup,
    pub group_algebra: Comultiplication,
    pub dual: Comultiplication,
    pub map: LinearOperator,
}

pub fn cyclic_fourier(n: usize) -> Result<CyclicFourier> {
    if n == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    let group = FiniteGroup::cyclic(n);
    let (ga, gc) = group_algebra(&group)?;
    let (fa, fc) = function_algebra(&group)?;
    let w = 2.0 * std::f64::consts::PI / n as f64;
    let m = DMatrix::from_fn(n, n, |k, p| {
        let t = w * ((k * p) % n) as f64;
        c(t.cos(), t.sin())
    });
    let map = LinearOperator::new(vec![ga], vec![fa], m)?;
    Ok(CyclicFourier { group, group_algebra: gc, dual: fc, map })
}

impl CyclicFourier {
    /// Largest residual of `F` being a *-isomorphism intertwining the
    /// comultiplications: `φ̂ ∘ F = (F⊗F) ∘ φ`.
    pub fn intertwining_residual(&self) -> Result<f64> {
        let hom = crate::csalg::check_star_hom(&self.map);
        let lhs = self.dual.phi().compose(&self.map)?;
        let rhs = self.map.kron(&self.map).compose(self.group_algebra.phi())?;
        let diff = (lhs.matrix() - rhs.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(hom.max().max(diff))
    }

    pub fn apply(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.map.apply_element(a)?.to_element()
    }
}
