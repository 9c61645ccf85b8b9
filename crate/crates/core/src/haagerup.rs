//! Haagerup tensor norms of finite tensors.
//!
//! For `x = Σ p_i ⊗ q_i` the Haagerup norm is the infimum of
//! `‖Σ p_i p_i*‖^{1/2} ‖Σ q_i* q_i‖^{1/2}` over representations. Minimal-rank
//! representations suffice, and every other minimal-rank representation is
//! `(pC, C⁻¹q)` for an invertible `C`, so the norm equals
//!
//! ```text
//! min_{H > 0}  λmax(Σ H_ij p_i p_j*)^{1/2} · λmax(Σ (H⁻¹)_ij q_i* q_j)^{1/2}.
//! ```
//!
//! The upper bound minimizes a log-sum-exp smoothing of this convex problem.
//! Lower bounds come from the C*-norm, from elementary operators
//! `y ↦ Σ p_i y q_i` on the unit ball, and from the dual of the smoothed
//! problem: for states `ρ, σ` the fidelity `‖√M_ρ √N_σ‖₁` of the induced
//! Gram matrices never exceeds the norm.

use std::sync::Arc;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csalg::{AlgebraElement, CStarAlgebra, LinearOperator, Tensor};
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, lower_inverse, op_norm, pd_cholesky, psd_sqrt, trace_norm, zero, FullSvd, C64,
};

/// An explicit finite factorization `x = Σ_i p_i ⊗ q_i`.
#[derive(Clone, Debug)]
pub struct TensorRepresentation {
    alg: Arc<CStarAlgebra>,
    left: Vec<AlgebraElement>,
    right: Vec<AlgebraElement>,
}

impl TensorRepresentation {
    pub fn new(alg: Arc<CStarAlgebra>, left: Vec<AlgebraElement>, right: Vec<AlgebraElement>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} left factors but {} right factors",
                left.len(),
                right.len()
            )));
        }
        if left.iter().chain(&right).any(|e| !e.algebra().same_as(&alg)) {
            return Err(Error::ShapeMismatch("factor belongs to a different algebra".into()));
        }
        Ok(TensorRepresentation { alg, left, right })
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.left.len()
    }

    pub fn left(&self) -> &[AlgebraElement] {
        &self.left
    }

    pub fn right(&self) -> &[AlgebraElement] {
        &self.right
    }

    pub fn to_tensor(&self) -> Tensor {
        let legs = vec![self.alg.clone(), self.alg.clone()];
        let mut x = Tensor::zeros(legs);
        for (p, q) in self.left.iter().zip(&self.right) {
            x = x.try_add(&Tensor::elementary(&[p, q])).expect("same legs");
        }
        x
    }

    /// The re-representation `(p C, C⁻¹ q)`.
    pub fn transform(&self, cmat: &DMatrix<C64>) -> Result<Self> {
        let r = self.rank();
        if cmat.shape() != (r, r) {
            return Err(Error::ShapeMismatch(format!("transform must be {r}×{r}")));
        }
        let inv = cmat
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("transform is not invertible".into()))?;
        let combine = |factors: &[AlgebraElement], coef: &dyn Fn(usize, usize) -> C64| -> Vec<AlgebraElement> {
            (0..r)
                .map(|k| {
                    let coords = (0..r).fold(DVector::zeros(self.alg.dim()), |acc, i| {
                        acc + factors[i].coords() * coef(i, k)
                    });
                    AlgebraElement::new(self.alg.clone(), coords).unwrap()
                })
                .collect()
        };
        let left = combine(&self.left, &|i, k| cmat[(i, k)]);
        let right = combine(&self.right, &|j, k| inv[(k, j)]);
        Ok(TensorRepresentation { alg: self.alg.clone(), left, right })
    }

    /// Whether both factor families are linearly independent.
    pub fn is_reduced(&self) -> bool {
        let indep = |f: &[AlgebraElement]| {
            f.is_empty() || FullSvd::new(&DMatrix::from_columns(&f.iter().map(|e| e.coords().clone()).collect::<Vec<_>>())).rank() == f.len()
        };
        indep(&self.left) && indep(&self.right)
    }

    /// `‖Σ p_i p_i*‖^{1/2} · ‖Σ q_i* q_i‖^{1/2}`.
    pub fn factorization_norm(&self) -> f64 {
        let mut pp = self.alg.zero();
        let mut qq = self.alg.zero();
        for (p, q) in self.left.iter().zip(&self.right) {
            pp = &pp + &(p * &p.adjoint());
            qq = &qq + &(&q.adjoint() * q);
        }
        (pp.norm() * qq.norm()).sqrt()
    }

    /// `Σ p_i y q_i`.
    pub fn elementary_operator(&self, y: &AlgebraElement) -> AlgebraElement {
        self.left
            .iter()
            .zip(&self.right)
            .fold(self.alg.zero(), |acc, (p, q)| &acc + &(&(p * y) * q))
    }
}

fn check_two_legs(x: &Tensor) -> Result<Arc<CStarAlgebra>> {
    let legs = x.legs();
    if legs.len() != 2 || !legs[0].same_as(&legs[1]) {
        return Err(Error::ShapeMismatch("expected an element of A ⊗ A".into()));
    }
    Ok(legs[0].clone())
}

/// Minimal-rank representation from the singular value decomposition of the
/// coefficient matrix of `x`.
pub fn represent(x: &Tensor) -> Result<TensorRepresentation> {
    let alg = check_two_legs(x)?;
    let d = alg.dim();
    let coef = DMatrix::from_fn(d, d, |i, j| x.coords()[i * d + j]);
    let svd = FullSvd::new(&coef);
    let r = svd.rank();
    let (u, v) = svd_factors(&coef, r);
    let mut left = Vec::with_capacity(r);
    let mut right = Vec::with_capacity(r);
    for k in 0..r {
        left.push(AlgebraElement::new(alg.clone(), u.column(k).into_owned())?);
        right.push(AlgebraElement::new(alg.clone(), v.column(k).into_owned())?);
    }
    Ok(TensorRepresentation { alg, left, right })
}

/// `coef = U Vᵀ` with `U = u√s` and `V = conj(v)√s` truncated to rank `r`.
fn svd_factors(coef: &DMatrix<C64>, r: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let (m, n) = coef.shape();
    if r == 0 {
        return (DMatrix::zeros(m, 0), DMatrix::zeros(n, 0));
    }
    let svd = FullSvd::new(coef);
    let s = &svd.singular_values;
    let left = DMatrix::from_fn(m, r, |i, k| svd.u[(i, k)] * s[k].sqrt());
    let right = DMatrix::from_fn(n, r, |j, k| svd.v[(j, k)].conj() * s[k].sqrt());
    (left, right)
}

/// The conjugate-linear flip `p ⊗ q ↦ q* ⊗ p*`.
pub fn gamma(x: &Tensor) -> Result<Tensor> {
    check_two_legs(x)?;
    x.adjoint().permute(&[1, 0])
}

/// The multiplication map `m : A ⊗ A → A`.
pub fn multiplication_operator(alg: &Arc<CStarAlgebra>) -> LinearOperator {
    let d = alg.dim();
    let mut m = DMatrix::zeros(d, d * d);
    for i in 0..d {
        for j in 0..d {
            for &(k, s) in alg.product(i, j) {
                m[(k, i * d + j)] += s;
            }
        }
    }
    LinearOperator::new(vec![alg.clone(), alg.clone()], vec![alg.clone()], m).expect("shape")
}

/// `m(Σ p_i ⊗ q_i) = Σ p_i q_i`.
pub fn contract_multiply(x: &Tensor) -> Result<AlgebraElement> {
    let alg = check_two_legs(x)?;
    multiplication_operator(&alg).apply(x)?.to_element()
}

#[derive(Clone, Debug)]
pub struct HaagerupOptions {
    pub seed: u64,
    pub restarts: usize,
    pub samples: usize,
}

impl Default for HaagerupOptions {
    fn default() -> Self {
        HaagerupOptions { seed: 0, restarts: 8, samples: 64 }
    }
}

/// An interval `[lower, upper]` containing the Haagerup norm.
#[derive(Clone, Debug)]
pub struct HaagerupEstimate {
    pub lower: f64,
    pub upper: f64,
    /// The positive definite middle matrix achieving `upper`.
    pub certificate: DMatrix<C64>,
    /// `(p L, L⁻¹ q)` with `certificate = L L*`.
    pub factorization: TensorRepresentation,
    /// The C*-norm of `x` in `A ⊗ A`.
    pub cstar_norm: f64,
    /// Best value of `‖Σ p_i y q_i‖` over the sampled unit-ball elements.
    pub elementary_lower: f64,
    /// Best dual (fidelity) lower bound.
    pub dual_lower: f64,
}

impl HaagerupEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn haagerup_bounds_of(x: &Tensor, opts: &HaagerupOptions) -> Result<HaagerupEstimate> {
    haagerup_bounds(&represent(x)?, opts)
}

pub fn haagerup_bounds(rep: &TensorRepresentation, opts: &HaagerupOptions) -> Result<HaagerupEstimate> {
    let rep = if rep.is_reduced() {
        rep.clone()
    } else {
        warn!("representation of rank {} is not reduced; reducing", rep.rank());
        represent(&rep.to_tensor())?
    };
    let x = rep.to_tensor();
    let cstar_norm = x.norm();
    let elementary_lower = sampled_lower(&rep, opts);
    let r = rep.rank();
    if r == 0 {
        return Ok(HaagerupEstimate {
            lower: 0.0,
            upper: 0.0,
            certificate: DMatrix::zeros(0, 0),
            factorization: rep,
            cstar_norm,
            elementary_lower,
            dual_lower: 0.0,
        });
    }
    // Optimize over the canonical representation so that the result does not
    // depend on how x was written down; `p_canon = p · change`.
    let canon = represent(&x)?;
    let change = change_of_representation(&rep, &canon)?;
    let problem = MiddleProblem::new(&canon);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, DMatrix<C64>)> = None;
    let mut dual_lower = 0.0f64;
    for restart in 0..opts.restarts.max(1) {
        let h0 = if restart == 0 { DMatrix::identity(r, r) } else { random_pd(r, &mut rng) };
        let (h, value, dual) = problem.minimize(h0);
        dual_lower = dual_lower.max(dual);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, h));
        }
        // The problem is convex; once the duality gap closes no restart can improve.
        let v = best.as_ref().unwrap().0;
        if v - dual_lower <= CERTIFIED_GAP * v {
            break;
        }
    }
    let (_, h) = best.expect("at least one restart");
    let l = pd_cholesky(&h).expect("certificate is positive definite");
    let total = &change * &l;
    let certificate = &total * total.adjoint();
    let factorization = rep.transform(&total)?;
    // Report the value recomputed from the explicit factorization.
    let upper = factorization.factorization_norm();
    // Each bound is exact in exact arithmetic; only rounding can invert them.
    let lower = cstar_norm.max(elementary_lower).max(dual_lower).min(upper);
    Ok(HaagerupEstimate { lower, upper, certificate, factorization, cstar_norm, elementary_lower, dual_lower })
}

/// The invertible `C` with `target.left = source.left · C` (both reduced and
/// representing the same tensor).
fn change_of_representation(source: &TensorRepresentation, target: &TensorRepresentation) -> Result<DMatrix<C64>> {
    let cols = |f: &[AlgebraElement]| DMatrix::from_columns(&f.iter().map(|e| e.coords().clone()).collect::<Vec<_>>());
    let (ps, pt) = (cols(source.left()), cols(target.left()));
    let change = FullSvd::new(&ps).pseudo_inverse() * &pt;
    if (&ps * &change - &pt).norm() > 1e-8 * (1.0 + pt.norm()) {
        return Err(Error::Consistency("representations do not share a left span".into()));
    }
    Ok(change)
}

fn sampled_lower(rep: &TensorRepresentation, opts: &HaagerupOptions) -> f64 {
    let alg = rep.algebra();
    let mut best = rep.elementary_operator(&alg.one()).norm();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..opts.samples {
        let coords = DVector::from_fn(alg.dim(), |_, _| c(gauss(&mut rng), gauss(&mut rng)));
        let y = AlgebraElement::new(alg.clone(), coords).unwrap();
        let n = y.norm();
        if n > 0.0 {
            best = best.max(rep.elementary_operator(&y.scale(c(1.0 / n, 0.0))).norm());
        }
    }
    best
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; rand 0.8 has no normal distribution without rand_distr.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_pd<R: Rng>(r: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(r, r, |_, _| c(gauss(rng), gauss(rng)));
    &g * g.adjoint() + DMatrix::identity(r, r) * c(0.1 * r as f64, 0.0)
}

/// Relative duality gap at which the optimizer stops.
const CERTIFIED_GAP: f64 = 1e-10;

/// The smoothed middle-matrix problem for a fixed representation.
struct MiddleProblem {
    r: usize,
    /// Per block: `p_i p_j*` for all `i, j` (row-major in `(i, j)`).
    pp: Vec<Vec<DMatrix<C64>>>,
    /// Per block: `q_i* q_j`.
    qq: Vec<Vec<DMatrix<C64>>>,
}

/// Eigen-decomposition of `Σ_ij W_ij G_ij` on every block together with the
/// softmax weights at smoothing level `μ`.
struct Spectrum {
    /// Per block: eigenvalues, eigenvectors, normalized softmax weights.
    blocks: Vec<(Vec<f64>, DMatrix<C64>, Vec<f64>)>,
    /// `μ log Σ exp(λ/μ)` over all eigenvalues of all blocks.
    value: f64,
    /// Largest eigenvalue.
    exact: f64,
    mu: f64,
}

/// Value, real gradient and Hessian of the smoothed objective in local
/// coordinates `H = L (I + X) L*`.
struct Local {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
    exact: f64,
    dual: f64,
}

/// Hermitian basis matrices matching [`hermitian_from_real`].
fn hermitian_basis(r: usize) -> Vec<DMatrix<C64>> {
    (0..r * r)
        .map(|m| {
            let mut v = DVector::zeros(r * r);
            v[m] = 1.0;
            hermitian_from_real(&v, r)
        })
        .collect()
}

impl MiddleProblem {
    fn new(rep: &TensorRepresentation) -> Self {
        let r = rep.rank();
        let lb: Vec<Vec<DMatrix<C64>>> = rep.left().iter().map(|p| p.blocks()).collect();
        let rb: Vec<Vec<DMatrix<C64>>> = rep.right().iter().map(|q| q.blocks()).collect();
        let nblocks = rep.algebra().block_dims().len();
        let mut pp = Vec::new();
        let mut qq = Vec::new();
        for b in 0..nblocks {
            let mut pb = Vec::with_capacity(r * r);
            let mut qb = Vec::with_capacity(r * r);
            for i in 0..r {
                for j in 0..r {
                    pb.push(&lb[i][b] * lb[j][b].adjoint());
                    qb.push(rb[i][b].adjoint() * &rb[j][b]);
                }
            }
            pp.push(pb);
            qq.push(qb);
        }
        MiddleProblem { r, pp, qq }
    }

    fn combine(&self, blk: &[DMatrix<C64>], w: &DMatrix<C64>) -> DMatrix<C64> {
        let r = self.r;
        let n = blk[0].nrows();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..r {
            for j in 0..r {
                if w[(i, j)] != zero() {
                    m += &blk[i * r + j] * w[(i, j)];
                }
            }
        }
        m
    }

    fn spectrum(&self, terms: &[Vec<DMatrix<C64>>], w: &DMatrix<C64>, mu: f64) -> Spectrum {
        let eig: Vec<(Vec<f64>, DMatrix<C64>)> =
            terms.iter().map(|blk| hermitian_eigen(&self.combine(blk, w))).collect();
        let exact = eig.iter().flat_map(|(v, _)| v.iter().cloned()).fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = eig.iter().flat_map(|(v, _)| v.iter()).map(|l| ((l - exact) / mu).exp()).sum();
        let blocks = eig
            .into_iter()
            .map(|(vals, vecs)| {
                let wts = vals.iter().map(|l| ((l - exact) / mu).exp() / z).collect();
                (vals, vecs, wts)
            })
            .collect();
        Spectrum { blocks, value: exact + mu * z.ln(), exact, mu }
    }

    /// `G[j][i] = tr(ρ G_ij)` for the softmax state `ρ`.
    fn gradient(&self, terms: &[Vec<DMatrix<C64>>], sp: &Spectrum) -> DMatrix<C64> {
        let r = self.r;
        let mut grad = DMatrix::zeros(r, r);
        for (blk, (_, vecs, wts)) in terms.iter().zip(&sp.blocks) {
            let d = DVector::from_iterator(wts.len(), wts.iter().map(|&x| c(x, 0.0)));
            let rho = vecs * DMatrix::from_diagonal(&d) * vecs.adjoint();
            for i in 0..r {
                for j in 0..r {
                    grad[(j, i)] += rho.dotc(&blk[i * r + j]);
                }
            }
        }
        grad
    }

    /// Second derivative of the smoothed maximum along `X ↦ Σ X_ij G_ij`
    /// for every pair of directions. Column `m` of `dirs` holds direction
    /// `m` flattened with row index `i·r + j`.
    fn hessian(&self, terms: &[Vec<DMatrix<C64>>], sp: &Spectrum, dirs: &DMatrix<C64>) -> DMatrix<f64> {
        let n = dirs.ncols();
        let mu = sp.mu;
        let mut hess = DMatrix::<f64>::zeros(n, n);
        let mut first = DVector::<f64>::zeros(n);
        for (blk, (vals, vecs, wts)) in terms.iter().zip(&sp.blocks) {
            let k = vals.len();
            let mut rotated = DMatrix::<C64>::zeros(k * k, blk.len());
            for (col, g) in blk.iter().enumerate() {
                let m = vecs.adjoint() * g * vecs;
                rotated.column_mut(col).copy_from_slice(m.as_slice());
            }
            // Column m is vec(E_m) with E_m = V* (Σ X_ij G_ij) V, column-major.
            let projected = rotated * dirs;
            // Divided differences of the softmax weights.
            let dd = DMatrix::from_fn(k, k, |a, b| {
                let delta = vals[a] - vals[b];
                if delta.abs() <= 1e-14 * (1.0 + vals[a].abs()) {
                    wts[a].max(wts[b]) / mu
                } else if delta > 0.0 {
                    -wts[a] * (-delta / mu).exp_m1() / delta
                } else {
                    -wts[b] * (delta / mu).exp_m1() / -delta
                }
            });
            for a in 0..k {
                first += projected.row(a + a * k).transpose().map(|z| z.re) * wts[a];
            }
            let weighted = DMatrix::from_fn(k * k, n, |idx, l| projected[(idx, l)] * dd[(idx % k, idx / k)]);
            let transposed = DMatrix::from_fn(k * k, n, |idx, m| projected[((idx / k) + (idx % k) * k, m)]);
            hess += (transposed.transpose() * weighted).map(|z| z.re);
        }
        hess -= &first * first.transpose() / mu;
        hess
    }

    /// Smoothed objective `α_μ(H) + β_μ(H⁻¹)` with derivatives in the local
    /// coordinates where `H` is the identity.
    fn local(&self, h: &DMatrix<C64>, mu: f64, basis: &[DMatrix<C64>]) -> Option<Local> {
        let l = pd_cholesky(h)?;
        let linv = lower_inverse(&l);
        let k = linv.adjoint() * &linv;
        let a = self.spectrum(&self.pp, h, mu);
        let b = self.spectrum(&self.qq, &k, mu);
        let ga = self.gradient(&self.pp, &a);
        let gb = self.gradient(&self.qq, &b);
        let r = self.r;
        let n = basis.len();
        let flatten = |f: &dyn Fn(&DMatrix<C64>) -> DMatrix<C64>, transpose: bool| {
            let mut out = DMatrix::<C64>::zeros(r * r, n);
            for (m, d) in basis.iter().enumerate() {
                let x = f(d);
                for i in 0..r {
                    for j in 0..r {
                        out[(i * r + j, m)] = if transpose { x[(j, i)] } else { x[(i, j)] };
                    }
                }
            }
            out
        };
        let dirs_a = flatten(&|d| &l * d * l.adjoint(), false);
        let dirs_b = flatten(&|d| -(linv.adjoint() * d * &linv), false);
        let grad_h = &ga - &k * &gb * &k;
        let grad_flat = DVector::from_fn(r * r, |idx, _| grad_h[(idx % r, idx / r)]);
        let grad = (dirs_a.transpose() * grad_flat).map(|z| z.re);
        let mut hess = self.hessian(&self.pp, &a, &dirs_a) + self.hessian(&self.qq, &b, &dirs_b);
        // 2 Re tr(B_m B_j N) for the basis directions B.
        let nt = &linv * &gb * linv.adjoint();
        let plain = flatten(&|d| d.clone(), false);
        let shifted = flatten(&|d| d * &nt, true);
        hess += (plain.transpose() * shifted).map(|z| 2.0 * z.re);
        let hess = (&hess + hess.transpose()) * 0.5;
        Some(Local {
            value: a.value + b.value,
            grad,
            hess,
            exact: (a.exact * b.exact).max(0.0).sqrt(),
            dual: fidelity(&ga, &gb),
        })
    }

    fn exact_value(&self, h: &DMatrix<C64>) -> Option<f64> {
        let linv = lower_inverse(&pd_cholesky(h)?);
        let k = linv.adjoint() * &linv;
        let a = self.spectrum(&self.pp, h, 1.0).exact;
        let b = self.spectrum(&self.qq, &k, 1.0).exact;
        Some((a * b).max(0.0).sqrt())
    }

    /// Newton's method with continuation in the smoothing level. Returns the
    /// best middle matrix, its exact value and the best dual bound seen.
    fn minimize(&self, h0: DMatrix<C64>) -> (DMatrix<C64>, f64, f64) {
        let r = self.r;
        let basis = hermitian_basis(r);
        let mut h = h0;
        let mut best_v = self.exact_value(&h).unwrap_or(f64::INFINITY);
        let mut best_h = h.clone();
        let mut dual_best = 0.0f64;
        let mut mu_rel = 1e-1;
        while mu_rel >= 1e-12 {
            let Some(scale) = self.exact_value(&h) else { break };
            let mu = mu_rel * scale.max(f64::MIN_POSITIVE);
            let mut last = None;
            for _ in 0..100 {
                let Some(loc) = self.local(&h, mu, &basis) else { break };
                dual_best = dual_best.max(loc.dual);
                if loc.exact < best_v {
                    best_v = loc.exact;
                    best_h = h.clone();
                }
                let step = newton_step(&loc.hess, &loc.grad);
                let decrement = -step.dot(&loc.grad);
                if !(decrement > 1e-15 * (1.0 + loc.value.abs())) {
                    last = Some(loc);
                    break;
                }
                let l = pd_cholesky(&h).expect("iterate is positive definite");
                let dir = &l * hermitian_from_real(&step, r) * l.adjoint();
                let mut t = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let cand = &h + &dir * c(t, 0.0);
                    if let Some(v) = self.local_value(&cand, mu) {
                        if v <= loc.value - 1e-4 * t * decrement {
                            h = cand;
                            moved = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if !moved {
                    last = Some(loc);
                    break;
                }
            }
            if let Some(loc) = last.or_else(|| self.local(&h, mu, &basis)) {
                dual_best = dual_best.max(loc.dual);
                if loc.exact < best_v {
                    best_v = loc.exact;
                    best_h = h.clone();
                }
            }
            if best_v - dual_best <= CERTIFIED_GAP * best_v {
                break;
            }
            mu_rel /= 10.0;
        }
        (best_h, best_v, dual_best)
    }

    fn local_value(&self, h: &DMatrix<C64>, mu: f64) -> Option<f64> {
        let linv = lower_inverse(&pd_cholesky(h)?);
        let k = linv.adjoint() * &linv;
        Some(self.spectrum(&self.pp, h, mu).value + self.spectrum(&self.qq, &k, mu).value)
    }
}

/// Solves `hess · s = -grad`, regularizing if the Hessian is not positive definite.
fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let n = grad.len();
    let scale = hess.diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut shift = 0.0;
    for _ in 0..30 {
        let m = hess + DMatrix::identity(n, n) * shift;
        if let Some(ch) = m.cholesky() {
            return -ch.solve(grad);
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 10.0 };
    }
    -grad.clone()
}

/// `‖√M √N‖₁` for positive semidefinite `M`, `N`.
fn fidelity(m: &DMatrix<C64>, n: &DMatrix<C64>) -> f64 {
    let herm = |x: &DMatrix<C64>| (x + x.adjoint()) * c(0.5, 0.0);
    trace_norm(&(psd_sqrt(&herm(m)) * psd_sqrt(&herm(n))))
}

fn hermitian_from_real(v: &DVector<f64>, r: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(r, r);
    let mut k = 0;
    for i in 0..r {
        m[(i, i)] = c(v[k], 0.0);
        k += 1;
    }
    for i in 0..r {
        for j in i + 1..r {
            m[(i, j)] = c(v[k], v[k + 1]);
            m[(j, i)] = c(v[k], -v[k + 1]);
            k += 2;
        }
    }
    m
}

/// A triple factorization `x = Σ_ij p_i ⊗ q_ij ⊗ r_j`.
#[derive(Clone, Debug)]
pub struct TripleRepresentation {
    pub outer_left: Vec<AlgebraElement>,
    pub middle: Vec<Vec<AlgebraElement>>,
    pub outer_right: Vec<AlgebraElement>,
}

impl TripleRepresentation {
    /// `‖Σ p_i p_i*‖^{1/2} · ‖[q_ij]‖ · ‖Σ r_j* r_j‖^{1/2}`.
    pub fn factorization_norm(&self) -> f64 {
        self.norm_with_scaling(&vec![1.0; self.outer_left.len()], &vec![1.0; self.outer_right.len()])
    }

    fn norm_with_scaling(&self, d1: &[f64], d3: &[f64]) -> f64 {
        let Some(alg) = self.outer_left.first().map(|p| p.algebra().clone()) else { return 0.0 };
        if self.outer_right.is_empty() {
            return 0.0;
        }
        let mut pp = alg.zero();
        for (p, &s) in self.outer_left.iter().zip(d1) {
            pp = &pp + &(p * &p.adjoint()).scale(c(s * s, 0.0));
        }
        let mut rr = alg.zero();
        for (r, &s) in self.outer_right.iter().zip(d3) {
            rr = &rr + &(&r.adjoint() * r).scale(c(s * s, 0.0));
        }
        let (n1, n3) = (d1.len(), d3.len());
        let blocks: Vec<Vec<Vec<DMatrix<C64>>>> =
            self.middle.iter().map(|row| row.iter().map(|q| q.blocks()).collect()).collect();
        let mut mid = 0.0f64;
        for (b, &n) in alg.block_dims().iter().enumerate() {
            let mut big = DMatrix::zeros(n1 * n, n3 * n);
            for i in 0..n1 {
                for j in 0..n3 {
                    let s = c(1.0 / (d1[i] * d3[j]), 0.0);
                    big.view_mut((i * n, j * n), (n, n)).copy_from(&(&blocks[i][j][b] * s));
                }
            }
            mid = mid.max(op_norm(&big));
        }
        pp.norm().sqrt() * mid * rr.norm().sqrt()
    }
}

/// Canonical triple factorization from the singular value decompositions of
/// the first and last unfoldings of the coefficient tensor.
pub fn represent_triple(x: &Tensor) -> Result<TripleRepresentation> {
    let legs = x.legs();
    if legs.len() != 3 || !legs[0].same_as(&legs[1]) || !legs[1].same_as(&legs[2]) {
        return Err(Error::ShapeMismatch("expected an element of A ⊗ A ⊗ A".into()));
    }
    let alg = legs[0].clone();
    let d = alg.dim();
    let coef = x.coords();
    let first = DMatrix::from_fn(d, d * d, |a, bc| coef[a * d * d + bc]);
    let last = DMatrix::from_fn(d, d * d, |cc, ab| coef[ab * d + cc]);
    let s1 = FullSvd::new(&first);
    let s3 = FullSvd::new(&last);
    let u = s1.range();
    let w = s3.range();
    let (r1, r3) = (u.ncols(), w.ncols());
    let elem = |v: DVector<C64>| AlgebraElement::new(alg.clone(), v).unwrap();
    let outer_left = (0..r1).map(|i| elem(u.column(i).into_owned())).collect();
    let outer_right = (0..r3).map(|j| elem(w.column(j).into_owned())).collect();
    let mut middle = Vec::with_capacity(r1);
    for i in 0..r1 {
        let mut row = Vec::with_capacity(r3);
        for j in 0..r3 {
            let v = DVector::from_fn(d, |b, _| {
                let mut s = zero();
                for a in 0..d {
                    for cc in 0..d {
                        let x = coef[(a * d + b) * d + cc];
                        if x != zero() {
                            s += u[(a, i)].conj() * w[(cc, j)].conj() * x;
                        }
                    }
                }
                s
            });
            row.push(elem(v));
        }
        middle.push(row);
    }
    Ok(TripleRepresentation { outer_left, middle, outer_right })
}

/// Upper bound on the triple Haagerup norm from the canonical factorization,
/// improved by diagonal rescaling of the two summation indices.
pub fn triple_upper(x: &Tensor) -> Result<f64> {
    let rep = represent_triple(x)?;
    let (n1, n3) = (rep.outer_left.len(), rep.outer_right.len());
    if n1 == 0 || n3 == 0 {
        return Ok(0.0);
    }
    let mut logs = vec![0.0f64; n1 + n3];
    let eval = |logs: &[f64]| {
        let d1: Vec<f64> = logs[..n1].iter().map(|l| l.exp()).collect();
        let d3: Vec<f64> = logs[n1..].iter().map(|l| l.exp()).collect();
        rep.norm_with_scaling(&d1, &d3)
    };
    let mut best = eval(&logs);
    if n1 + n3 > 2 {
        for _sweep in 0..4 {
            for k in 0..logs.len() {
                let centre = logs[k];
                let (v, arg) = golden_section(
                    |t| {
                        let mut l = logs.clone();
                        l[k] = t;
                        eval(&l)
                    },
                    centre - 4.0,
                    centre + 4.0,
                    40,
                );
                if v < best {
                    best = v;
                    logs[k] = arg;
                }
            }
        }
    }
    Ok(best)
}

fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 { (f1, x1) } else { (f2, x2) }
}
