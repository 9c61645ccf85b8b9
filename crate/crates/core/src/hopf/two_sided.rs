use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::structure::HopfStructure;
use crate::csalg::{AlgebraElement, CStarAlgebra, LinearOperator, Subspace, Tensor};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Residuals of the two-sided formulas over basis pairs `(b, c)` and a basis
/// of `𝒜 ∩ A₀`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FormulaResiduals {
    /// `ε(a)(b⊗c) = E(x)`.
    pub e: f64,
    /// `(b⊗1⊗1)(1⊗S(a)⊗1)(1⊗φ(c)) = F₁(x)`.
    pub f1: f64,
    /// `(φ(b)⊗1)(1⊗S(a)⊗1)(1⊗φ(c)) = F₂(x)`.
    pub f2: f64,
    /// `bS(a)⊗c = F₃(x)`.
    pub f3: f64,
    /// `bS(a)c = F₄(x)`.
    pub f4: f64,
}

impl FormulaResiduals {
    pub fn max(&self) -> f64 {
        self.e.max(self.f1).max(self.f2).max(self.f3).max(self.f4)
    }
}

/// The map `T(p⊗q⊗r) = (p⊗1⊗1)φ⁽²⁾(q)(1⊗1⊗r)` and what it determines.
#[derive(Clone, Debug)]
pub struct TwoSided {
    pub t: LinearOperator,
    /// `𝒜 = {a : b⊗a⊗c ∈ T(A⊗A⊗A) for all b, c}`.
    pub script_a: Subspace,
    /// Relative distance between `T` and `(ι⊗T₁)(T₂⊗ι)`.
    pub factorization_residual: f64,
    /// Largest `‖Tx − b⊗a⊗c‖` over the solved basis triples.
    pub solve_residual: f64,
    pub formulas: FormulaResiduals,
    /// Distance of products of `𝒜` basis elements from `𝒜`.
    pub closure_defect: f64,
    pub multiplicatively_closed: bool,
}

/// Agreement of the left and right counit and antipode.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Agreement {
    /// Dimension of `𝒜 ∩ A₀ ∩ A₀′`; zero means there was nothing to compare.
    pub dim: usize,
    /// `max |ε − ε′|` on a basis of `𝒜 ∩ A₀ ∩ A₀′`.
    pub counit: f64,
    /// `max ‖S − S′‖` on the same basis.
    pub antipode: f64,
    /// Dimension of `A₀ ∩ A₀′`.
    pub outer_dim: usize,
    /// The same residuals measured on all of `A₀ ∩ A₀′`.
    pub outer_counit: f64,
    pub outer_antipode: f64,
}

/// `m x`, skipping the zero entries of `x`.
fn apply_sparse(m: &DMatrix<C64>, x: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(m.nrows());
    for (j, z) in x.iter().enumerate() {
        if *z != C64::new(0.0, 0.0) {
            out.axpy(*z, &m.column(j), C64::new(1.0, 0.0));
        }
    }
    out
}

fn max_abs_matrix(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Formulas {
    e: LinearOperator,
    f1: LinearOperator,
    f2: LinearOperator,
    f3: LinearOperator,
    f4: LinearOperator,
}

impl HopfStructure {
    fn legs(&self, n: usize) -> Vec<Arc<CStarAlgebra>> {
        vec![self.algebra().clone(); n]
    }

    fn phi2_images(&self) -> Result<Vec<Tensor>> {
        let m = self.comult.phi2().matrix();
        (0..self.algebra().dim()).map(|q| Tensor::new(self.legs(3), m.column(q).into_owned())).collect()
    }

    /// `T(p⊗q⊗r) = (p⊗1⊗1)φ⁽²⁾(q)(1⊗1⊗r)`.
    pub fn two_sided_operator(&self) -> Result<LinearOperator> {
        let d = self.algebra().dim();
        let basis = self.algebra().basis();
        let phi2 = self.phi2_images()?;
        LinearOperator::from_indexed_images(self.legs(3), self.legs(3), |k| {
            let (p, q, r) = (k / (d * d), (k / d) % d, k % d);
            phi2[q].mul_leg_left(0, &basis[p])?.mul_leg_right(2, &basis[r])
        })
    }

    /// `T⁻¹ = (T₂⁻¹⊗ι)(ι⊗T₁⁻¹)`.
    fn two_sided_solve(&self, y: &Tensor) -> Result<Tensor> {
        y.apply_on(1, &self.t1_inv)?.apply_on(0, &self.t2_inv)
    }

    fn formulas(&self) -> Result<Formulas> {
        let alg = self.algebra().clone();
        let d = alg.dim();
        let basis = alg.basis();
        let one = alg.one();
        let phi2 = self.phi2_images()?;
        let img = |i: usize| self.comult.image(i);
        let split = |k: usize| (k / (d * d), (k / d) % d, k % d);
        let src = self.legs(3);
        let build = |target: Vec<Arc<CStarAlgebra>>, f: &dyn Fn(usize, usize, usize) -> Result<Tensor>| {
            LinearOperator::from_indexed_images(src.clone(), target, |k| {
                let (p, q, r) = split(k);
                f(p, q, r)
            })
        };
        Ok(Formulas {
            e: build(self.legs(2), &|p, q, r| img(q).mul_leg_left(0, &basis[p])?.mul_leg_right(1, &basis[r]))?,
            f1: build(self.legs(3), &|p, q, r| {
                Tensor::elementary(&[&basis[p], &one, &one])
                    .try_mul(&img(q).insert_unit(1, &alg))?
                    .try_mul(&img(r).insert_unit(0, &alg))
            })?,
            f2: build(self.legs(3), &|p, q, r| {
                img(p).insert_unit(2, &alg).try_mul(&phi2[q])?.try_mul(&img(r).insert_unit(0, &alg))
            })?,
            f3: build(self.legs(2), &|p, q, r| Ok(Tensor::elementary(&[&basis[p], &(&basis[q] * &basis[r])])))?,
            f4: build(self.legs(1), &|p, q, r| Ok(Tensor::from_element(&(&(&basis[p] * &basis[q]) * &basis[r]))))?,
        })
    }

    /// Builds `T`, checks it against its factorization through `T₁` and `T₂`,
    /// determines `𝒜` by solving `Tx = b⊗a⊗c` on basis triples, and checks
    /// the two-sided formulas on `𝒜 ∩ A₀`.
    pub fn two_sided(&self) -> Result<TwoSided> {
        let alg = self.algebra().clone();
        let d = alg.dim();
        let tol = self.tol;
        let t = self.two_sided_operator()?;
        let factored = LinearOperator::from_indexed_images(self.legs(3), self.legs(3), |k| {
            Tensor::basis_element(self.legs(3), k).apply_on(0, &self.maps.t2)?.apply_on(1, &self.maps.t1)
        })?;
        let factorization_residual =
            max_abs_matrix(&(t.matrix() - factored.matrix())) / max_abs_matrix(t.matrix()).max(1.0);
        if factorization_residual > tol {
            return Err(Error::Consistency(format!(
                "T differs from (ι⊗T₁)(T₂⊗ι) by {factorization_residual:.3e}"
            )));
        }

        let residual_of = |x: &Tensor, y: &Tensor| -> Result<f64> {
            let tx = Tensor::new(self.legs(3), apply_sparse(t.matrix(), x.coords()))?;
            Ok(tx.try_sub(y)?.hs_norm())
        };
        let mut solve_residual = 0.0f64;
        let mut members = Vec::new();
        for a in 0..d {
            let mut ok = true;
            for b in 0..d {
                for c in 0..d {
                    let y = Tensor::basis_element(self.legs(3), (b * d + a) * d + c);
                    let x = self.two_sided_solve(&y)?;
                    let r = residual_of(&x, &y)?;
                    solve_residual = solve_residual.max(r);
                    ok &= r <= tol * (1.0 + y.hs_norm());
                }
            }
            if ok {
                members.push(a);
            }
        }
        let mut span = DMatrix::zeros(d, members.len());
        for (col, &a) in members.iter().enumerate() {
            span[(a, col)] = C64::new(1.0, 0.0);
        }
        let script_a = if members.is_empty() { Subspace::zero(alg.clone()) } else { Subspace::new(alg.clone(), &span)? };

        let formulas = self.formula_residuals(&script_a, &residual_of, &mut solve_residual)?;
        let closure_defect = script_a.closure_defect();
        Ok(TwoSided {
            t,
            multiplicatively_closed: closure_defect <= tol,
            script_a,
            factorization_residual,
            solve_residual,
            formulas,
            closure_defect,
        })
    }

    fn formula_residuals(
        &self,
        script_a: &Subspace,
        residual_of: &dyn Fn(&Tensor, &Tensor) -> Result<f64>,
        solve_residual: &mut f64,
    ) -> Result<FormulaResiduals> {
        let alg = self.algebra().clone();
        let basis = alg.basis();
        let one = alg.one();
        let f = self.formulas()?;
        let apply = |op: &LinearOperator, x: &Tensor| Tensor::new(op.target().to_vec(), apply_sparse(op.matrix(), x.coords()));
        let mut out = FormulaResiduals::default();
        for a in script_a.intersect(&self.a0).basis() {
            let eps = self.counit(&a)?;
            let s = self.antipode(&a)?;
            let middle = Tensor::elementary(&[&one, &s, &one]);
            for (bi, b) in basis.iter().enumerate() {
                let phi_b = self.comult.image(bi).insert_unit(2, &alg);
                let bs = b * &s;
                for (ci, c) in basis.iter().enumerate() {
                    let y = Tensor::elementary(&[b, &a, c]);
                    let x = self.two_sided_solve(&y)?;
                    *solve_residual = solve_residual.max(residual_of(&x, &y)?);
                    let phi_c = self.comult.image(ci).insert_unit(0, &alg);

                    let lhs_e = Tensor::elementary(&[b, c]).scale(eps);
                    out.e = out.e.max(lhs_e.try_sub(&apply(&f.e, &x)?)?.hs_norm());
                    let lhs_f1 = Tensor::elementary(&[b, &s, &one]).try_mul(&phi_c)?;
                    out.f1 = out.f1.max(lhs_f1.try_sub(&apply(&f.f1, &x)?)?.hs_norm());
                    let lhs_f2 = phi_b.try_mul(&middle)?.try_mul(&phi_c)?;
                    out.f2 = out.f2.max(lhs_f2.try_sub(&apply(&f.f2, &x)?)?.hs_norm());
                    let lhs_f3 = Tensor::elementary(&[&bs, c]);
                    out.f3 = out.f3.max(lhs_f3.try_sub(&apply(&f.f3, &x)?)?.hs_norm());
                    let lhs_f4: AlgebraElement = &bs * c;
                    out.f4 = out.f4.max((&lhs_f4 - &apply(&f.f4, &x)?.to_element()?).hs_norm());
                }
            }
        }
        Ok(out)
    }

    /// Compares the left and right counit and antipode on `𝒜 ∩ A₀ ∩ A₀′` and
    /// on `A₀ ∩ A₀′`.
    pub fn agreement(&self, script_a: &Subspace) -> Result<Agreement> {
        let outer = self.a0.intersect(&self.a0_prime);
        let inner = script_a.intersect(&outer);
        let compare = |space: &Subspace| -> Result<(f64, f64)> {
            let mut worst = (0.0f64, 0.0f64);
            for a in space.basis() {
                let (e2, s2) = self.right_counit_antipode(&a)?;
                worst.0 = worst.0.max((self.counit(&a)? - e2).norm());
                worst.1 = worst.1.max((&self.antipode(&a)? - &s2).hs_norm());
            }
            Ok(worst)
        };
        let (counit, antipode) = compare(&inner)?;
        let (outer_counit, outer_antipode) = compare(&outer)?;
        Ok(Agreement { dim: inner.dim(), counit, antipode, outer_dim: outer.dim(), outer_counit, outer_antipode })
    }
}
