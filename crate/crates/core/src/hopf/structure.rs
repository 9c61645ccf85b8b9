use std::sync::Arc;

use nalgebra::DMatrix;

use super::two_sided::{Agreement, TwoSided};
use super::{galois_maps, psi, verdict, Comultiplication, GaloisMaps, HopfVerdict};
use crate::csalg::{AlgebraElement, CStarAlgebra, Functional, LinearOperator, Subspace, Tensor};
use crate::error::{Error, Result};
use crate::haagerup::multiplication_operator;
use crate::linalg::{left_null_space, null_space, C64};

/// A Hopf pair `(A, φ)` together with the inverses of its Galois maps and the
/// domains `A₀ = {a : a⊗1 ∈ T₁(A⊗A)}` and `A₀′ = {a : 1⊗a ∈ T₂(A⊗A)}`.
///
/// The counit and antipode are exposed only on these domains. Outside them
/// every evaluation fails with a domain error.
#[derive(Clone, Debug)]
pub struct HopfStructure {
    pub(super) comult: Comultiplication,
    pub(super) maps: GaloisMaps,
    pub(super) verdict: HopfVerdict,
    pub(super) tol: f64,
    pub(super) t1_inv: LinearOperator,
    pub(super) t2_inv: LinearOperator,
    mult: LinearOperator,
    /// Normalized trace, used to read off scalars and tensor legs.
    tau: Functional,
    left_embed: DMatrix<C64>,
    pub(super) a0: Subspace,
    pub(super) a0_prime: Subspace,
}

/// Residuals of the slice identities for one element, maximized over the
/// functionals tested.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SliceResiduals {
    /// `S((ω⊗ι)φ(a)) = (ω⊗ι)(x)`.
    pub antipode_left_slice: f64,
    /// `S((ι⊗ω)(x)) = (ω⊗ι)φ(S(a))`.
    pub antipode_witness_slice: f64,
    /// `ε((ω⊗ι)φ(a)) = ω(a)`, i.e. `(ι⊗ε)φ = ι`.
    pub counit_left_slice: f64,
    /// `ε((ι⊗ω)φ(a)) = ω(a)`, i.e. `(ε⊗ι)φ = ι`.
    pub counit_right_slice: f64,
    /// `ε((ι⊗ω)(x)) = ω(S(a))`.
    pub counit_witness_slice: f64,
    /// `ε(S(a)*) = conj ε(a)`.
    pub counit_adjoint: f64,
}

impl SliceResiduals {
    pub fn max(&self) -> f64 {
        [
            self.antipode_left_slice,
            self.antipode_witness_slice,
            self.counit_left_slice,
            self.counit_right_slice,
            self.counit_witness_slice,
            self.counit_adjoint,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn merge(&mut self, o: &SliceResiduals) {
        self.antipode_left_slice = self.antipode_left_slice.max(o.antipode_left_slice);
        self.antipode_witness_slice = self.antipode_witness_slice.max(o.antipode_witness_slice);
        self.counit_left_slice = self.counit_left_slice.max(o.counit_left_slice);
        self.counit_right_slice = self.counit_right_slice.max(o.counit_right_slice);
        self.counit_witness_slice = self.counit_witness_slice.max(o.counit_witness_slice);
        self.counit_adjoint = self.counit_adjoint.max(o.counit_adjoint);
    }
}

/// The one-sided identities, maximized over a basis of `A₀` (and over basis
/// pairs for the multiplicative ones).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityBattery {
    /// `ψ(x) = x⊗1` for the witness `x` of `a`.
    pub psi: f64,
    /// `ε(ab) = ε(a)ε(b)`.
    pub counit_multiplicative: f64,
    /// `S(ab) = S(b)S(a)`.
    pub antipode_antimultiplicative: f64,
    /// `S(S(a)*)* = a`.
    pub antipode_involution: f64,
    pub slices: SliceResiduals,
}

impl IdentityBattery {
    pub fn max(&self) -> f64 {
        self.psi
            .max(self.counit_multiplicative)
            .max(self.antipode_antimultiplicative)
            .max(self.antipode_involution)
            .max(self.slices.max())
    }
}

/// Everything computed for a Hopf pair.
#[derive(Clone, Debug)]
pub struct HopfDetails {
    pub a0: Subspace,
    pub a0_prime: Subspace,
    /// Distance of products of `A₀` basis elements from `A₀`.
    pub a0_closure_defect: f64,
    /// `ε` and `S` on the basis of `A₀`.
    pub counit_table: Vec<C64>,
    pub antipode_table: Vec<AlgebraElement>,
    /// `ε′` and `S′` on the basis of `A₀′`.
    pub right_counit_table: Vec<C64>,
    pub right_antipode_table: Vec<AlgebraElement>,
    /// Dimension of `{y : φ(y) = y⊗1}`; one for a Hopf pair.
    pub scalar_solutions: usize,
    pub battery: IdentityBattery,
    pub two_sided: TwoSided,
    pub agreement: Agreement,
}

#[derive(Clone, Debug)]
pub struct HopfReport {
    pub verdict: HopfVerdict,
    /// Present exactly when the verdict is positive.
    pub details: Option<HopfDetails>,
}

impl HopfReport {
    pub fn new(c: &Comultiplication, tol: f64) -> Result<Self> {
        let maps = galois_maps(c)?;
        let v = verdict(c, &maps, tol)?;
        if !v.is_hopf {
            return Ok(HopfReport { verdict: v, details: None });
        }
        let h = HopfStructure::from_parts(c.clone(), maps, v, tol)?;
        let details = h.details()?;
        Ok(HopfReport { verdict: h.verdict, details: Some(details) })
    }
}

/// `a ↦ a⊗1` (or `a ↦ 1⊗a` when `left` is false) as a coordinate matrix.
fn unit_embedding(alg: &CStarAlgebra, left: bool) -> DMatrix<C64> {
    let d = alg.dim();
    let u = alg.unit_coords();
    DMatrix::from_fn(d * d, d, |row, i| {
        let (p, q) = (row / d, row % d);
        match left {
            true if p == i => u[q],
            false if q == i => u[p],
            _ => C64::new(0.0, 0.0),
        }
    })
}

/// Preimage under `embed` of the range of `t`.
fn domain(alg: &Arc<CStarAlgebra>, t: &LinearOperator, embed: &DMatrix<C64>) -> Result<Subspace> {
    let n = left_null_space(t.matrix());
    if n.ncols() == 0 {
        return Ok(Subspace::full(alg.clone()));
    }
    let ns = null_space(&(n.adjoint() * embed));
    if ns.ncols() == 0 {
        return Ok(Subspace::zero(alg.clone()));
    }
    Subspace::new(alg.clone(), &ns)
}

impl HopfStructure {
    /// Fails with a precondition error unless `(A, φ)` passes [`super::is_hopf`].
    pub fn new(comult: Comultiplication, tol: f64) -> Result<Self> {
        let maps = galois_maps(&comult)?;
        let v = verdict(&comult, &maps, tol)?;
        Self::from_parts(comult, maps, v, tol)
    }

    pub(crate) fn from_parts(comult: Comultiplication, maps: GaloisMaps, verdict: HopfVerdict, tol: f64) -> Result<Self> {
        if !verdict.is_hopf {
            return Err(Error::Precondition(format!(
                "not a Hopf pair: comultiplication defect {:.3e}, rank T₁ = {}, rank T₂ = {}, full rank {}",
                verdict.defects.max(),
                verdict.rank_t1,
                verdict.rank_t2,
                verdict.full_rank()
            )));
        }
        let alg = comult.algebra().clone();
        let legs = vec![alg.clone(), alg.clone()];
        let inverse = |t: &LinearOperator| {
            let mut m = t.svd().pseudo_inverse();
            // Drop rounding noise so solutions keep the sparsity of the data;
            // every solve re-checks its residual.
            let cutoff = 1e-14 * m.iter().map(|z| z.norm()).fold(0.0, f64::max);
            m.iter_mut().filter(|z| z.norm() <= cutoff).for_each(|z| *z = C64::new(0.0, 0.0));
            LinearOperator::new(legs.clone(), legs.clone(), m)
        };
        let t1_inv = inverse(&maps.t1)?;
        let t2_inv = inverse(&maps.t2)?;
        let left_embed = unit_embedding(&alg, true);
        let a0 = domain(&alg, &maps.t1, &left_embed)?;
        let a0_prime = domain(&alg, &maps.t2, &unit_embedding(&alg, false))?;
        let tr = Functional::trace(&alg);
        let tr1 = tr.eval(&alg.one());
        let tau = Functional::from_values(alg.clone(), tr.values().map(|z| z / tr1))?;
        Ok(HopfStructure {
            mult: multiplication_operator(&alg),
            comult,
            maps,
            verdict,
            tol,
            t1_inv,
            t2_inv,
            tau,
            left_embed,
            a0,
            a0_prime,
        })
    }

    pub fn comultiplication(&self) -> &Comultiplication {
        &self.comult
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        self.comult.algebra()
    }

    pub fn maps(&self) -> &GaloisMaps {
        &self.maps
    }

    pub fn verdict(&self) -> &HopfVerdict {
        &self.verdict
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn a0(&self) -> &Subspace {
        &self.a0
    }

    pub fn a0_prime(&self) -> &Subspace {
        &self.a0_prime
    }

    fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.algebra().same_as(self.algebra()) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("element does not belong to the Hopf algebra".into()))
        }
    }

    /// Minimum-norm solution of `t x = y`, rejected if the residual exceeds
    /// the tolerance.
    pub(super) fn solve(
        &self,
        t: &LinearOperator,
        t_inv: &LinearOperator,
        y: &Tensor,
        domain: &'static str,
    ) -> Result<Tensor> {
        let x = t_inv.apply(y)?;
        let residual = t.apply(&x)?.try_sub(y)?.hs_norm();
        if residual > self.tol * (1.0 + y.hs_norm()) {
            return Err(Error::Domain { domain, residual });
        }
        Ok(x)
    }

    /// The unique `x` with `T₁x = a⊗1`.
    pub fn witness(&self, a: &AlgebraElement) -> Result<Tensor> {
        self.check_element(a)?;
        let y = Tensor::elementary(&[a, &self.algebra().one()]);
        self.solve(&self.maps.t1, &self.t1_inv, &y, "A0")
    }

    /// The unique `x` with `T₂x = 1⊗a`.
    pub fn right_witness(&self, a: &AlgebraElement) -> Result<Tensor> {
        self.check_element(a)?;
        let y = Tensor::elementary(&[&self.algebra().one(), a]);
        self.solve(&self.maps.t2, &self.t2_inv, &y, "A0'")
    }

    /// Reads `m` as a multiple of the unit.
    fn scalar(&self, m: &AlgebraElement, what: &str) -> Result<C64> {
        let s = self.tau.eval(m);
        let residual = (m - &self.algebra().one().scale(s)).hs_norm();
        if residual > self.tol * (1.0 + m.hs_norm()) {
            return Err(Error::Consistency(format!(
                "{what} is not a multiple of the unit (residual {residual:.3e})"
            )));
        }
        Ok(s)
    }

    /// Reads `z` as `s⊗1` (`leg = 0`) or `1⊗s` (`leg = 1`).
    fn leg_element(&self, z: &Tensor, leg: usize, what: &str) -> Result<AlgebraElement> {
        let one = self.algebra().one();
        let s = z.slice_to_element(1 - leg, &self.tau)?;
        let rebuilt = if leg == 0 { Tensor::elementary(&[&s, &one]) } else { Tensor::elementary(&[&one, &s]) };
        let residual = z.try_sub(&rebuilt)?.hs_norm();
        if residual > self.tol * (1.0 + z.hs_norm()) {
            return Err(Error::Consistency(format!("{what} has the wrong form (residual {residual:.3e})")));
        }
        Ok(s)
    }

    pub(super) fn counit_from(&self, x: &Tensor) -> Result<C64> {
        self.scalar(&self.mult.apply(x)?.to_element()?, "m(x)")
    }

    pub(super) fn antipode_from(&self, x: &Tensor) -> Result<AlgebraElement> {
        self.leg_element(&self.maps.t_tilde.apply(x)?, 0, "T̃(x)")
    }

    /// `ε(a)`, defined by `ε(a)1 = m(x)`.
    pub fn counit(&self, a: &AlgebraElement) -> Result<C64> {
        self.counit_from(&self.witness(a)?)
    }

    /// `S(a)`, defined by `S(a)⊗1 = T̃(x)`.
    pub fn antipode(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.antipode_from(&self.witness(a)?)
    }

    /// `(ε′(a), S′(a))`, defined by `ε′(a)1 = m(x)` and `1⊗S′(a) = T̂(x)`
    /// for the right witness `x`.
    pub fn right_counit_antipode(&self, a: &AlgebraElement) -> Result<(C64, AlgebraElement)> {
        let x = self.right_witness(a)?;
        let eps = self.scalar(&self.mult.apply(&x)?.to_element()?, "m(x)")?;
        let s = self.leg_element(&self.maps.t_hat.apply(&x)?, 1, "T̂(x)")?;
        Ok((eps, s))
    }

    pub fn psi(&self, x: &Tensor) -> Result<Tensor> {
        psi(&self.comult, x)
    }

    /// The slice identities for one element and one functional.
    pub fn slice_identities(&self, a: &AlgebraElement, omega: &Functional) -> Result<SliceResiduals> {
        let x = self.witness(a)?;
        let s = self.antipode_from(&x)?;
        let eps = self.counit_from(&x)?;
        let phi_a = self.comult.apply(a)?;
        let left = phi_a.slice_to_element(0, omega)?;
        let right = phi_a.slice_to_element(1, omega)?;
        let witness_right = x.slice_to_element(1, omega)?;
        let antipode_left_slice = (&self.antipode(&left)? - &x.slice_to_element(0, omega)?).hs_norm();
        let antipode_witness_slice =
            (&self.antipode(&witness_right)? - &self.comult.apply(&s)?.slice_to_element(0, omega)?).hs_norm();
        Ok(SliceResiduals {
            antipode_left_slice,
            antipode_witness_slice,
            counit_left_slice: (self.counit(&left)? - omega.eval(a)).norm(),
            counit_right_slice: (self.counit(&right)? - omega.eval(a)).norm(),
            counit_witness_slice: (self.counit(&witness_right)? - omega.eval(&s)).norm(),
            counit_adjoint: (self.counit(&s.adjoint())? - eps.conj()).norm(),
        })
    }

    /// The slice identities for `a` with `ω` running over the coordinate
    /// functionals of the basis.
    pub fn slice_identities_all(&self, a: &AlgebraElement) -> Result<SliceResiduals> {
        let mut worst = SliceResiduals::default();
        for k in 0..self.algebra().dim() {
            worst.merge(&self.slice_identities(a, &Functional::coordinate(self.algebra(), k))?);
        }
        Ok(worst)
    }

    pub fn identity_battery(&self) -> Result<IdentityBattery> {
        let basis = self.a0.basis();
        let one = self.algebra().one();
        let mut out = IdentityBattery::default();
        let mut eps = Vec::with_capacity(basis.len());
        let mut ant = Vec::with_capacity(basis.len());
        for a in &basis {
            let x = self.witness(a)?;
            let lhs = self.psi(&x)?;
            let rhs = x.insert_unit(2, self.algebra());
            out.psi = out.psi.max(lhs.try_sub(&rhs)?.hs_norm());
            let s = self.antipode_from(&x)?;
            let back = self.antipode(&s.adjoint())?.adjoint();
            out.antipode_involution = out.antipode_involution.max((&back - a).hs_norm());
            eps.push(self.counit_from(&x)?);
            ant.push(s);
            out.slices.merge(&self.slice_identities_all(a)?);
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ab = a * b;
                let x = self.witness(&ab)?;
                out.counit_multiplicative = out.counit_multiplicative.max((self.counit_from(&x)? - eps[i] * eps[j]).norm());
                let s = self.antipode_from(&x)?;
                out.antipode_antimultiplicative =
                    out.antipode_antimultiplicative.max((&s - &(&ant[j] * &ant[i])).hs_norm());
            }
        }
        // The unit is always in A₀ with witness 1⊗1.
        let x1 = self.witness(&one)?;
        out.psi = out.psi.max(self.psi(&x1)?.try_sub(&x1.insert_unit(2, self.algebra()))?.hs_norm());
        Ok(out)
    }

    /// Dimension of the solution space of `φ(y) = y⊗1`.
    pub fn scalar_solutions(&self) -> usize {
        null_space(&(self.comult.phi().matrix() - &self.left_embed)).ncols()
    }

    pub fn counit_table(&self) -> Result<Vec<C64>> {
        self.a0.basis().iter().map(|a| self.counit(a)).collect()
    }

    pub fn antipode_table(&self) -> Result<Vec<AlgebraElement>> {
        self.a0.basis().iter().map(|a| self.antipode(a)).collect()
    }

    pub fn details(&self) -> Result<HopfDetails> {
        let right: Vec<(C64, AlgebraElement)> =
            self.a0_prime.basis().iter().map(|a| self.right_counit_antipode(a)).collect::<Result<_>>()?;
        let two_sided = self.two_sided()?;
        let agreement = self.agreement(&two_sided.script_a)?;
        Ok(HopfDetails {
            a0: self.a0.clone(),
            a0_prime: self.a0_prime.clone(),
            a0_closure_defect: self.a0.closure_defect(),
            counit_table: self.counit_table()?,
            antipode_table: self.antipode_table()?,
            right_counit_table: right.iter().map(|(e, _)| *e).collect(),
            right_antipode_table: right.into_iter().map(|(_, s)| s).collect(),
            scalar_solutions: self.scalar_solutions(),
            battery: self.identity_battery()?,
            two_sided,
            agreement,
        })
    }
}
