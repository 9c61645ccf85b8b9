//! Serializable reports for the verification battery, Haagerup estimates and
//! group reconstruction. Everything here is deterministic given the input,
//! the tolerance and the seed; wall-clock timings are only recorded on
//! request.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csalg::{AlgebraElement, Functional, Subspace, Tensor};
use crate::document::{to_complex, AlgebraDocument, Complex, TensorDocument};
use crate::error::{Error, Result};
use crate::examples::{haar_state, reconstruct_group, FiniteGroup};
use crate::haagerup::{haagerup_bounds_of, HaagerupOptions};
use crate::hopf::{galois_maps, HopfStructure, HopfVerdict};
use crate::linalg::C64;
use crate::Comultiplication;

pub const TOOL_NAME: &str = "hopf-cstar";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: TOOL_NAME.into(), version: TOOL_VERSION.into() }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub seed: u64,
    /// Random elements and functionals drawn for the sampled identities.
    pub samples: usize,
    pub timings: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tolerance: crate::DEFAULT_TOL, seed: 0, samples: 4, timings: false }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DefectsReport {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub unital: f64,
    pub coassociativity: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerdictReport {
    pub rank_t1: usize,
    pub rank_t2: usize,
    pub full_rank: usize,
    pub is_hopf: bool,
    /// Orthonormal kernel bases, each vector scaled so that its largest
    /// entry is real and positive.
    pub kernel_t1: Vec<Vec<Complex>>,
    pub kernel_t2: Vec<Vec<Complex>>,
    pub tilde_identity_residual: f64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubspaceReport {
    pub dim: usize,
    pub full: bool,
    /// Coordinates of an orthonormal basis; omitted when the subspace is the
    /// whole algebra, in which case the algebra's own basis is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Complex>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DomainsReport {
    pub a0: SubspaceReport,
    pub a0_prime: SubspaceReport,
    pub script_a: SubspaceReport,
    pub a0_closure_defect: f64,
    pub script_a_closure_defect: f64,
    pub script_a_closed: bool,
    pub scalar_solutions: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TablesReport {
    /// `ε` on the basis of `A₀`.
    pub counit: Vec<Complex>,
    /// Coordinates of `S` on the basis of `A₀`.
    pub antipode: Vec<Vec<Complex>>,
    pub right_counit: Vec<Complex>,
    pub right_antipode: Vec<Vec<Complex>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentitiesReport {
    pub psi: f64,
    pub counit_multiplicative: f64,
    pub antipode_antimultiplicative: f64,
    pub antipode_involution: f64,
    pub antipode_left_slice: f64,
    pub antipode_witness_slice: f64,
    pub counit_left_slice: f64,
    pub counit_right_slice: f64,
    pub counit_witness_slice: f64,
    pub counit_adjoint: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TwoSidedReport {
    pub factorization_residual: f64,
    pub solve_residual: f64,
    pub e: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AgreementReport {
    pub dim: usize,
    pub counit: f64,
    pub antipode: f64,
    pub outer_dim: usize,
    pub outer_counit: f64,
    pub outer_antipode: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SamplesReport {
    pub count: usize,
    pub slice_identities: f64,
    pub counit_multiplicative: f64,
    pub antipode_antimultiplicative: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HaarReport {
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faithful: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariance_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hopf_cross_check: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReconstructReport {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_profile: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyReport {
    pub tool: ToolInfo,
    pub kind: String,
    pub block_dims: Vec<usize>,
    pub dim: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub comultiplication: DefectsReport,
    pub hopf: VerdictReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<DomainsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<TablesReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentitiesReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_sided: Option<TwoSidedReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SamplesReport>,
    pub haar: HaarReport,
    /// Present when the algebra is commutative and given by point masses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<ReconstructReport>,
    pub passed: bool,
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NormReport {
    pub tool: ToolInfo,
    pub block_dims: Vec<usize>,
    pub seed: u64,
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub cstar_norm: f64,
    pub elementary_lower: f64,
    pub dual_lower: f64,
    pub rank: usize,
    /// Positive definite `H` with `x = Σ p_i ⊗ q_i` and the upper bound
    /// `‖Σ p_i H p_j*‖^{1/2} ‖Σ q_i* H⁻¹ q_j‖^{1/2}`.
    pub certificate: Vec<Vec<Complex>>,
    /// The factorization achieving the upper bound.
    pub left: Vec<Vec<Complex>>,
    pub right: Vec<Vec<Complex>>,
}

fn coords(v: &DVector<C64>) -> Vec<Complex> {
    v.iter().map(|z| to_complex(*z)).collect()
}

fn element(a: &AlgebraElement) -> Vec<Complex> {
    coords(a.coords())
}

fn matrix_rows(m: &DMatrix<C64>) -> Vec<Vec<Complex>> {
    m.row_iter().map(|r| r.iter().map(|z| to_complex(*z)).collect()).collect()
}

/// Scales `v` by a unit so its largest entry (first on ties) is positive.
fn fix_phase(v: &DVector<C64>) -> DVector<C64> {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() + 1e-12 {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        return v.clone();
    }
    v * (z.conj() / z.norm())
}

/// Rounding noise below this is reported as an exact zero so that reports do
/// not depend on the last bits of a floating-point reduction.
const REPORT_FLOOR: f64 = 1e-15;

fn clean(x: f64) -> f64 {
    if x.abs() < REPORT_FLOOR {
        0.0
    } else {
        x
    }
}

fn clean_vec(v: &DVector<C64>) -> DVector<C64> {
    v.map(|z| C64::new(clean(z.re), clean(z.im)))
}

fn subspace(s: &Subspace) -> SubspaceReport {
    SubspaceReport {
        dim: s.dim(),
        full: s.is_full(),
        basis: (!s.is_full()).then(|| s.matrix().column_iter().map(|c| coords(&clean_vec(&c.into_owned()))).collect()),
    }
}

fn verdict_report(v: &HopfVerdict) -> VerdictReport {
    let kernel = |k: &[Tensor]| k.iter().map(|t| coords(&clean_vec(&fix_phase(t.coords())))).collect();
    VerdictReport {
        rank_t1: v.rank_t1,
        rank_t2: v.rank_t2,
        full_rank: v.full_rank(),
        is_hopf: v.is_hopf,
        kernel_t1: kernel(&v.kernel_t1),
        kernel_t2: kernel(&v.kernel_t2),
        tilde_identity_residual: clean(v.tilde_identity_residual),
        note: "in finite dimensions A ⊗h A and the algebraic tensor product coincide, so injectivity of T₁ and T₂ is injectivity of their matrices".into(),
    }
}

struct Clock {
    enabled: bool,
    last: Instant,
    phases: BTreeMap<String, f64>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Clock { enabled, last: Instant::now(), phases: BTreeMap::new() }
    }

    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        if self.enabled {
            self.phases.insert(phase.into(), (now - self.last).as_secs_f64() * 1e3);
        }
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.phases)
    }
}

fn random_combination(s: &Subspace, rng: &mut ChaCha8Rng) -> Result<AlgebraElement> {
    use rand::Rng;
    let k = s.dim();
    let w = DVector::from_fn(k, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    AlgebraElement::new(s.algebra().clone(), s.matrix() * w)
}

fn sampled(h: &HopfStructure, count: usize, seed: u64) -> Result<SamplesReport> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alg = h.algebra().clone();
    let mut out = SamplesReport { count, slice_identities: 0.0, counit_multiplicative: 0.0, antipode_antimultiplicative: 0.0 };
    if h.a0().dim() == 0 {
        return Ok(out);
    }
    for _ in 0..count {
        let a = random_combination(h.a0(), &mut rng)?;
        let b = random_combination(h.a0(), &mut rng)?;
        let values = DVector::from_fn(alg.dim(), |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let omega = Functional::from_values(alg.clone(), values)?;
        out.slice_identities = out.slice_identities.max(h.slice_identities(&a, &omega)?.max());
        let ab = &a * &b;
        if h.a0().contains(&ab, h.tolerance()) {
            let e = (h.counit(&ab)? - h.counit(&a)? * h.counit(&b)?).norm();
            out.counit_multiplicative = out.counit_multiplicative.max(e);
            let s = (&h.antipode(&ab)? - &(&h.antipode(&b)? * &h.antipode(&a)?)).hs_norm();
            out.antipode_antimultiplicative = out.antipode_antimultiplicative.max(s);
        }
    }
    out.slice_identities = clean(out.slice_identities);
    out.counit_multiplicative = clean(out.counit_multiplicative);
    out.antipode_antimultiplicative = clean(out.antipode_antimultiplicative);
    Ok(out)
}

/// Group reconstruction, applicable when the algebra is `ℂⁿ` in its point basis.
pub fn reconstruct(comult: &Comultiplication, tol: f64) -> ReconstructReport {
    match reconstruct_group(comult, tol) {
        Ok(g) => reconstruct_ok(&g),
        Err(e) => ReconstructReport { ok: false, order: None, table: None, order_profile: None, error: Some(e.to_string()) },
    }
}

fn reconstruct_ok(g: &FiniteGroup) -> ReconstructReport {
    ReconstructReport {
        ok: true,
        order: Some(g.order()),
        table: Some(g.table().to_vec()),
        order_profile: Some(g.order_profile()),
        error: None,
    }
}

/// Runs the full battery on a document. Input errors (a malformed table, a
/// matrix of the wrong shape) are returned as errors; failed checks are
/// recorded in the report.
pub fn verify(doc: &AlgebraDocument, opts: &VerifyOptions) -> Result<VerifyReport> {
    let tol = opts.tolerance;
    let mut clock = Clock::new(opts.timings);
    let (alg, comult) = doc.build()?;
    clock.lap("build");
    let maps = galois_maps(&comult)?;
    let verdict = crate::hopf::verdict(&comult, &maps, tol)?;
    clock.lap("verdict");
    let d = verdict.defects;
    let mut failures = Vec::new();
    if !verdict.is_comultiplication {
        failures.push(format!("comultiplication defect {:.3e} exceeds the tolerance", d.max()));
    }
    if !verdict.is_hopf {
        failures.push(format!(
            "not a Hopf pair: rank T₁ = {}, rank T₂ = {}, full rank {}",
            verdict.rank_t1,
            verdict.rank_t2,
            verdict.full_rank()
        ));
    }
    let mut report = VerifyReport {
        tool: ToolInfo::default(),
        kind: doc.kind().into(),
        block_dims: alg.block_dims().to_vec(),
        dim: alg.dim(),
        tolerance: tol,
        seed: opts.seed,
        comultiplication: DefectsReport {
            multiplicative: clean(d.multiplicative),
            adjoint: clean(d.adjoint),
            unital: clean(d.unital),
            coassociativity: clean(d.coassociativity),
            passed: verdict.is_comultiplication,
        },
        hopf: verdict_report(&verdict),
        domains: None,
        tables: None,
        identities: None,
        two_sided: None,
        agreement: None,
        samples: None,
        haar: HaarReport {
            found: false,
            state: None,
            min_eigenvalue: None,
            faithful: None,
            invariance_residual: None,
            invariant_dim: None,
            hopf_cross_check: None,
        },
        reconstruction: None,
        passed: false,
        failures: Vec::new(),
        timings_ms: None,
    };

    if verdict.is_hopf {
        let h = HopfStructure::from_parts(comult.clone(), maps, verdict, tol)?;
        clock.lap("structure");
        let details = h.details()?;
        clock.lap("details");
        let b = details.battery;
        let identities = IdentitiesReport {
            psi: clean(b.psi),
            counit_multiplicative: clean(b.counit_multiplicative),
            antipode_antimultiplicative: clean(b.antipode_antimultiplicative),
            antipode_involution: clean(b.antipode_involution),
            antipode_left_slice: clean(b.slices.antipode_left_slice),
            antipode_witness_slice: clean(b.slices.antipode_witness_slice),
            counit_left_slice: clean(b.slices.counit_left_slice),
            counit_right_slice: clean(b.slices.counit_right_slice),
            counit_witness_slice: clean(b.slices.counit_witness_slice),
            counit_adjoint: clean(b.slices.counit_adjoint),
            max: clean(b.max()),
        };
        if b.max() > tol {
            failures.push(format!("identity battery residual {:.3e} exceeds the tolerance", b.max()));
        }
        let ts = &details.two_sided;
        let f = ts.formulas;
        if f.max() > tol {
            failures.push(format!("two-sided formula residual {:.3e} exceeds the tolerance", f.max()));
        }
        let ag = details.agreement;
        if ag.counit.max(ag.antipode) > tol {
            failures.push(format!(
                "left and right counit or antipode disagree on the two-sided domain by {:.3e}",
                ag.counit.max(ag.antipode)
            ));
        }
        if details.a0_closure_defect > tol {
            failures.push(format!("A₀ is not closed under products (defect {:.3e})", details.a0_closure_defect));
        }
        let samples = sampled(&h, opts.samples, opts.seed)?;
        if samples.slice_identities.max(samples.counit_multiplicative).max(samples.antipode_antimultiplicative) > tol {
            failures.push("sampled identities exceed the tolerance".into());
        }
        clock.lap("samples");
        report.domains = Some(DomainsReport {
            a0: subspace(&details.a0),
            a0_prime: subspace(&details.a0_prime),
            script_a: subspace(&ts.script_a),
            a0_closure_defect: clean(details.a0_closure_defect),
            script_a_closure_defect: clean(ts.closure_defect),
            script_a_closed: ts.multiplicatively_closed,
            scalar_solutions: details.scalar_solutions,
        });
        let cz = |v: &[C64]| v.iter().map(|z| to_complex(C64::new(clean(z.re), clean(z.im)))).collect();
        let ce = |v: &[AlgebraElement]| v.iter().map(|a| coords(&clean_vec(a.coords()))).collect();
        report.tables = Some(TablesReport {
            counit: cz(&details.counit_table),
            antipode: ce(&details.antipode_table),
            right_counit: cz(&details.right_counit_table),
            right_antipode: ce(&details.right_antipode_table),
        });
        report.identities = Some(identities);
        report.two_sided = Some(TwoSidedReport {
            factorization_residual: clean(ts.factorization_residual),
            solve_residual: clean(ts.solve_residual),
            e: clean(f.e),
            f1: clean(f.f1),
            f2: clean(f.f2),
            f3: clean(f.f3),
            f4: clean(f.f4),
        });
        report.agreement = Some(AgreementReport {
            dim: ag.dim,
            counit: clean(ag.counit),
            antipode: clean(ag.antipode),
            outer_dim: ag.outer_dim,
            outer_counit: clean(ag.outer_counit),
            outer_antipode: clean(ag.outer_antipode),
        });
        report.samples = Some(samples);
    }

    if let Some(haar) = haar_state(&comult, tol)? {
        report.haar = HaarReport {
            found: true,
            state: Some(coords(&clean_vec(haar.state.values()))),
            min_eigenvalue: Some(clean(haar.min_eigenvalue)),
            faithful: Some(haar.faithful),
            invariance_residual: Some(clean(haar.invariance_residual)),
            invariant_dim: Some(haar.invariant_dim),
            hopf_cross_check: haar.hopf_cross_check,
        };
        if haar.hopf_cross_check == Some(false) {
            failures.push("a faithful invariant state exists but the pair failed the Hopf test".into());
        }
    }
    clock.lap("haar");

    if alg.is_full() && alg.block_dims().iter().all(|&n| n == 1) {
        report.reconstruction = Some(reconstruct(&comult, tol));
    }
    clock.lap("reconstruction");

    report.passed = failures.is_empty();
    report.failures = failures;
    report.timings_ms = clock.finish();
    Ok(report)
}

/// Haagerup bounds for a tensor document.
pub fn norm(doc: &TensorDocument, seed: u64) -> Result<NormReport> {
    let x = doc.build()?;
    let opts = HaagerupOptions { seed, ..HaagerupOptions::default() };
    let est = haagerup_bounds_of(&x, &opts)?;
    let f = &est.factorization;
    let columns = |v: &[AlgebraElement]| v.iter().map(element).collect();
    Ok(NormReport {
        tool: ToolInfo::default(),
        block_dims: doc.block_dims.clone(),
        seed,
        lower: est.lower,
        upper: est.upper,
        width: est.width(),
        cstar_norm: est.cstar_norm,
        elementary_lower: est.elementary_lower,
        dual_lower: est.dual_lower,
        rank: f.rank(),
        certificate: matrix_rows(&est.certificate),
        left: columns(f.left()),
        right: columns(f.right()),
    })
}

/// Reconstruction for a document; fails with a precondition error when the
/// algebra is not commutative in its point basis.
pub fn reconstruct_document(doc: &AlgebraDocument, tol: f64) -> Result<ReconstructReport> {
    let (_, comult) = doc.build()?;
    let g = reconstruct_group(&comult, tol)?;
    Ok(reconstruct_ok(&g))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
