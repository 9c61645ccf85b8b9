//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hopf_cstar::corep::{check_corep, corep_slice, matrix_unit_functional, product_in_script_a};
use hopf_cstar::document::AlgebraDocument;
use hopf_cstar::examples::{
    cyclic_fourier, function_algebra, group_algebra, haar_state, monoid_function_algebra, pi, reconstruct_group,
    regular_corepresentation, small_groups, FiniteGroup,
};
use hopf_cstar::haagerup::{contract_multiply, gamma, haagerup_bounds_of, HaagerupOptions};
use hopf_cstar::report::{self, VerifyOptions};
use hopf_cstar::{
    galois_maps, is_hopf, AlgebraElement, CStarAlgebra, Comultiplication, Functional, HopfStructure, LinearOperator,
    Tensor, C64,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

/// Name, check, and time budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vector(n: usize, g: &mut impl Rng) -> DVector<C64> {
    DVector::from_fn(n, |_, _| c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)))
}

fn random_element(alg: &Arc<CStarAlgebra>, g: &mut impl Rng) -> AlgebraElement {
    alg.element(random_vector(alg.dim(), g)).unwrap()
}

fn random_tensor(alg: &Arc<CStarAlgebra>, rank: usize, g: &mut impl Rng) -> Tensor {
    let mut x = Tensor::zeros(vec![alg.clone(), alg.clone()]);
    for _ in 0..rank {
        x = x.try_add(&Tensor::elementary(&[&random_element(alg, g), &random_element(alg, g)])).unwrap();
    }
    x
}

/// Identity and inverse read off the table by brute force.
fn table_identity(t: &[Vec<usize>]) -> usize {
    (0..t.len()).find(|&e| (0..t.len()).all(|a| t[e][a] == a && t[a][e] == a)).unwrap()
}

fn table_inverse(t: &[Vec<usize>], p: usize) -> usize {
    let e = table_identity(t);
    (0..t.len()).find(|&q| t[p][q] == e).unwrap()
}

/// `Σ_p f(p) λ_p` built from the table.
fn lambda_sum(g: &FiniteGroup, f: &[C64]) -> DMatrix<C64> {
    let n = g.order();
    DMatrix::from_fn(n, n, |i, j| (0..n).filter(|&p| g.table()[p][j] == i).map(|p| f[p]).sum())
}

fn left_leg(alg: &Arc<CStarAlgebra>) -> Comultiplication {
    let legs = vec![alg.clone(), alg.clone()];
    let op = LinearOperator::from_basis_images(vec![alg.clone()], legs, |x| {
        Ok(Tensor::elementary(&[&x.to_element()?, &alg.one()]))
    })
    .unwrap();
    Comultiplication::new(op).unwrap()
}

fn function_algebra_suite() -> Outcome {
    let mut worst = 0.0f64;
    let groups = small_groups();
    for (name, g) in &groups {
        let t = g.table();
        let n = g.order();
        let (alg, comult) = function_algebra(g).map_err(|e| e.to_string())?;
        let h = HopfStructure::new(comult, TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure(h.verdict().is_hopf, || format!("{name} rejected"))?;
        let e = table_identity(t);
        let mut r = rng(n as u64);
        let f = random_vector(n, &mut r);
        let a = alg.element(f.clone()).unwrap();
        worst = worst.max((h.counit(&a).unwrap() - f[e]).norm());
        let s = h.antipode(&a).unwrap();
        for p in 0..n {
            worst = worst.max((s.coords()[p] - f[table_inverse(t, p)]).norm());
            let dp = alg.basis_element(p);
            let expect = if p == e { 1.0 } else { 0.0 };
            worst = worst.max((h.counit(&dp).unwrap() - c(expect, 0.0)).norm());
            let sp = h.antipode(&dp).unwrap();
            worst = worst.max((&sp - &alg.basis_element(table_inverse(t, p))).hs_norm());
        }
    }
    ensure(worst <= 1e-9, || format!("residual {worst:.2e}"))?;
    Ok(format!("{} groups, max residual {worst:.2e}", groups.len()))
}

fn group_algebra_suite() -> Outcome {
    let klein = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
    let groups = [
        ("Z2", FiniteGroup::cyclic(2)),
        ("Z3", FiniteGroup::cyclic(3)),
        ("Z4", FiniteGroup::cyclic(4)),
        ("Z2xZ2", klein),
        ("S3", FiniteGroup::symmetric3()),
    ];
    let mut worst = 0.0f64;
    for (name, g) in &groups {
        let n = g.order();
        let t = g.table();
        let (alg, comult) = group_algebra(g).map_err(|e| e.to_string())?;
        let h = HopfStructure::new(comult, TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure(h.verdict().is_hopf, || format!("{name} rejected"))?;
        for p in 0..n {
            let lp = alg.basis_element(p);
            worst = worst.max((h.counit(&lp).unwrap() - c(1.0, 0.0)).norm());
            let mut delta = vec![c(0.0, 0.0); n];
            delta[table_inverse(t, p)] = c(1.0, 0.0);
            worst = worst.max((&h.antipode(&lp).unwrap().blocks()[0] - lambda_sum(g, &delta)).norm());
        }
        let mut r = rng(100 + n as u64);
        for _ in 0..4 {
            let f: Vec<C64> = random_vector(n, &mut r).iter().copied().collect();
            let reflected: Vec<C64> = (0..n).map(|p| f[table_inverse(t, p)]).collect();
            let s = h.antipode(&pi(&alg, &f).unwrap()).unwrap();
            worst = worst.max((&s.blocks()[0] - lambda_sum(g, &reflected)).norm());
        }
    }
    ensure(worst <= 1e-9, || format!("residual {worst:.2e}"))?;
    Ok(format!("{} groups, max residual {worst:.2e}", groups.len()))
}

fn identity_battery() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, g) in small_groups() {
        for (family, pair) in [("C", function_algebra(&g)), ("CG", group_algebra(&g))] {
            let (_, comult) = pair.map_err(|e| e.to_string())?;
            let h = HopfStructure::new(comult, TOL).map_err(|e| format!("{family}({name}): {e}"))?;
            let b = h.identity_battery().map_err(|e| e.to_string())?;
            ensure(b.max() <= 1e-9, || format!("{family}({name}): {b:?}"))?;
            worst = worst.max(b.max());
            count += 1;
        }
    }
    Ok(format!("{count} algebras, max residual {worst:.2e}"))
}

fn two_sided_battery() -> Outcome {
    let g = FiniteGroup::symmetric3();
    let mut notes = Vec::new();
    for (family, pair) in [("C(S3)", function_algebra(&g)), ("CS3", group_algebra(&g))] {
        let (alg, comult) = pair.map_err(|e| e.to_string())?;
        let h = HopfStructure::new(comult, TOL).map_err(|e| e.to_string())?;
        let ts = h.two_sided().map_err(|e| e.to_string())?;
        let agree = h.agreement(&ts.script_a).map_err(|e| e.to_string())?;
        ensure(agree.dim == alg.dim(), || format!("{family}: intersection has dim {} of {}", agree.dim, alg.dim()))?;
        let f = ts.formulas.max();
        ensure(f <= 1e-8, || format!("{family}: formulas {:?}", ts.formulas))?;
        ensure(agree.counit <= 1e-9 && agree.antipode <= 1e-9, || format!("{family}: {agree:?}"))?;
        notes.push(format!("{family} formulas {f:.2e} agreement {:.2e}", agree.counit.max(agree.antipode)));
    }
    Ok(notes.join(", "))
}

fn haagerup_suite() -> Outcome {
    let opts = HaagerupOptions::default();
    let mut r = rng(5);
    let m2 = CStarAlgebra::full(&[2]).unwrap();

    let mut elementary_width = 0.0f64;
    for dims in [vec![2], vec![1, 1, 1], vec![1, 2]] {
        let a = CStarAlgebra::full(&dims).unwrap();
        for _ in 0..10 {
            let (p, q) = (random_element(&a, &mut r), random_element(&a, &mut r));
            let exact = p.norm() * q.norm();
            let est = haagerup_bounds_of(&Tensor::elementary(&[&p, &q]), &opts).map_err(|e| e.to_string())?;
            ensure(est.lower <= exact * (1.0 + 1e-9) && exact <= est.upper * (1.0 + 1e-9), || {
                format!("elementary {exact} outside [{}, {}]", est.lower, est.upper)
            })?;
            elementary_width = elementary_width.max(est.width());
        }
    }
    ensure(elementary_width <= 1e-6, || format!("elementary width {elementary_width:.2e}"))?;

    let e = m2.basis();
    let gap = Tensor::elementary(&[&e[0], &e[0]]).try_add(&Tensor::elementary(&[&e[1], &e[2]])).unwrap();
    let est = haagerup_bounds_of(&gap, &opts).map_err(|e| e.to_string())?;
    ensure(est.lower >= 2.0 - 1e-3 && est.upper <= 2.0 + 1e-3 && est.width() <= 1e-3, || {
        format!("gap example [{}, {}]", est.lower, est.upper)
    })?;
    ensure((est.cstar_norm - 1.0).abs() <= 1e-9, || format!("gap C*-norm {}", est.cstar_norm))?;

    // T₁ is contractive for any unital *-homomorphism φ, so shapes without a
    // Hopf structure use φ(a) = a⊗1.
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for dims in [vec![2], vec![1, 1, 1], vec![1, 2]] {
        let a = CStarAlgebra::full(&dims).unwrap();
        let comult =
            if dims == [1, 1, 1] { function_algebra(&FiniteGroup::cyclic(3)).unwrap().1 } else { left_leg(&a) };
        let t1 = galois_maps(&comult).map_err(|e| e.to_string())?.t1;
        for k in 0..100 {
            let x = random_tensor(&a, 1 + k % 3, &mut r);
            let b = haagerup_bounds_of(&x, &opts).map_err(|e| e.to_string())?;
            let gb = haagerup_bounds_of(&gamma(&x).unwrap(), &opts).map_err(|e| e.to_string())?;
            let checks = [
                (gb.upper - b.upper).abs() - 1e-6,
                (gb.lower - b.lower).abs() - 1e-6,
                x.norm() - b.upper - 1e-6,
                contract_multiply(&x).unwrap().norm() - b.upper - 1e-6,
                t1.apply(&x).unwrap().norm() - b.upper - 1e-6,
                b.lower - b.upper - 1e-6,
            ];
            for v in checks {
                worst = worst.max(v);
                if v > 0.0 {
                    violations += 1;
                }
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations, worst excess {worst:.2e}"))?;
    Ok(format!(
        "elementary width {elementary_width:.1e}, gap [{:.9}, {:.9}], 300 random tensors clean",
        est.lower, est.upper
    ))
}

fn negative_controls() -> Outcome {
    let (_, comult) = monoid_function_algebra(&[vec![0, 1], vec![1, 1]]).map_err(|e| e.to_string())?;
    let v = is_hopf(&comult, TOL).map_err(|e| e.to_string())?;
    ensure(!v.is_hopf && v.full_rank() - v.rank_t1 == 1 && v.kernel_t1.len() == 1, || {
        format!("monoid: rank T1 {} of {}", v.rank_t1, v.full_rank())
    })?;
    let m2 = CStarAlgebra::full(&[2]).unwrap();
    let v2 = is_hopf(&left_leg(&m2), TOL).map_err(|e| e.to_string())?;
    ensure(!v2.is_hopf && v2.rank_t2 == 4 && v2.full_rank() == 16, || {
        format!("a⊗1: rank T2 {} of {}", v2.rank_t2, v2.full_rank())
    })?;
    Ok(format!(
        "monoid T1 kernel dim {}, a⊗1 rank T2 = {} vs {}",
        v.kernel_t1.len(),
        v2.rank_t2,
        v2.full_rank()
    ))
}

fn corep_suite() -> Outcome {
    let mut corep_worst = 0.0f64;
    let mut slice_worst = 0.0f64;
    for g in [FiniteGroup::cyclic(3), FiniteGroup::symmetric3()] {
        let (alg, comult) = group_algebra(&g).map_err(|e| e.to_string())?;
        let u = regular_corepresentation(&alg).map_err(|e| e.to_string())?;
        let d = check_corep(&comult, &u).map_err(|e| e.to_string())?;
        corep_worst = corep_worst.max(d.max());
        let h = HopfStructure::new(comult, TOL).map_err(|e| e.to_string())?;
        let k = u.space_dim();
        for i in 0..k {
            for j in 0..k {
                let s = corep_slice(&h, &u, &matrix_unit_functional(u.space(), i, j)).map_err(|e| e.to_string())?;
                slice_worst = slice_worst.max(s.max());
            }
        }
    }
    ensure(corep_worst <= 1e-12, || format!("corep residual {corep_worst:.2e}"))?;
    ensure(slice_worst <= TOL, || format!("slice certificate {slice_worst:.2e}"))?;

    let (alg, comult) = group_algebra(&FiniteGroup::symmetric3()).map_err(|e| e.to_string())?;
    let h = HopfStructure::new(comult, TOL).map_err(|e| e.to_string())?;
    let u = regular_corepresentation(&alg).map_err(|e| e.to_string())?;
    let mut r = rng(7);
    let mut product_worst = 0.0f64;
    for _ in 0..10 {
        let w1 = Functional::from_values(u.space().clone(), random_vector(36, &mut r)).unwrap();
        let w2 = Functional::from_values(u.space().clone(), random_vector(36, &mut r)).unwrap();
        let cert = product_in_script_a(&h, &u, &u, &w1, &w2).map_err(|e| e.to_string())?;
        product_worst = product_worst.max(cert.max());
    }
    ensure(product_worst <= TOL, || format!("product certificate {product_worst:.2e}"))?;
    Ok(format!(
        "corep {corep_worst:.1e}, slices {slice_worst:.1e}, products {product_worst:.1e}"
    ))
}

fn haar_and_duality() -> Outcome {
    let mut worst_inv = 0.0f64;
    for (name, g) in small_groups() {
        let n = g.order();
        for (family, pair) in [("C", function_algebra(&g)), ("CG", group_algebra(&g))] {
            let (_, comult) = pair.map_err(|e| e.to_string())?;
            let h = haar_state(&comult, TOL).map_err(|e| e.to_string())?.ok_or(format!("{family}({name}): none"))?;
            ensure(h.faithful, || format!("{family}({name}) not faithful"))?;
            ensure(h.invariance_residual <= 1e-10, || format!("{family}({name}) residual {}", h.invariance_residual))?;
            worst_inv = worst_inv.max(h.invariance_residual);
            for p in 0..n {
                let expect = match family {
                    "C" => 1.0 / n as f64,
                    _ if p == table_identity(g.table()) => 1.0,
                    _ => 0.0,
                };
                let got = h.state.values()[p];
                ensure((got - c(expect, 0.0)).norm() <= 1e-10, || format!("{family}({name}) h({p}) = {got}"))?;
            }
        }
    }
    let mut worst_fourier = 0.0f64;
    for n in 2..=4 {
        let f = cyclic_fourier(n).map_err(|e| e.to_string())?;
        let ga = HopfStructure::new(f.group_algebra.clone(), TOL).map_err(|e| e.to_string())?;
        let fa = HopfStructure::new(f.dual.clone(), TOL).map_err(|e| e.to_string())?;
        worst_fourier = worst_fourier.max(f.intertwining_residual().map_err(|e| e.to_string())?);
        for a in f.group_algebra.algebra().basis() {
            let image = f.apply(&a).unwrap();
            worst_fourier = worst_fourier.max((ga.counit(&a).unwrap() - fa.counit(&image).unwrap()).norm());
            let lhs = f.apply(&ga.antipode(&a).unwrap()).unwrap();
            worst_fourier = worst_fourier.max((&lhs - &fa.antipode(&image).unwrap()).hs_norm());
        }
    }
    ensure(worst_fourier <= 1e-9, || format!("Fourier residual {worst_fourier:.2e}"))?;
    Ok(format!("invariance {worst_inv:.1e}, Fourier {worst_fourier:.1e}"))
}

fn reconstruction() -> Outcome {
    let groups = small_groups();
    for (name, g) in &groups {
        let (_, comult) = function_algebra(g).map_err(|e| e.to_string())?;
        let h = reconstruct_group(&comult, TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure(h.is_isomorphic(g), || format!("{name}: not isomorphic"))?;
    }
    let z4 = reconstruct_group(&function_algebra(&FiniteGroup::cyclic(4)).unwrap().1, TOL).unwrap();
    let klein = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
    let v4 = reconstruct_group(&function_algebra(&klein).unwrap().1, TOL).unwrap();
    ensure(!z4.is_isomorphic(&v4) && z4.order_profile() != v4.order_profile(), || "Z4 and Klein agree".into())?;
    Ok(format!("{} groups, Z4 {:?} vs Klein {:?}", groups.len(), z4.order_profile(), v4.order_profile()))
}

fn cli_determinism() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let names = ["z2-function-algebra", "s3-group-algebra", "ez-monoid"];
    for name in names {
        let doc_text = std::fs::read_to_string(root.join(format!("docs/examples/{name}.json"))).map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(root.join(format!("crates/cli/tests/golden/{name}.report.json")))
            .map_err(|e| e.to_string())?;
        let doc: AlgebraDocument = serde_json::from_str(&doc_text).map_err(|e| e.to_string())?;
        let opts = VerifyOptions { tolerance: doc.tolerance().unwrap_or(TOL), ..VerifyOptions::default() };
        for run in 0..2 {
            let out = report::to_json(&report::verify(&doc, &opts).map_err(|e| e.to_string())?).unwrap();
            ensure(out == golden, || format!("{name}: run {run} differs from golden"))?;
        }
    }
    Ok(format!("{} documents, 2 runs each", names.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("function-algebra suite", function_algebra_suite, Some(10)),
        ("group-algebra suite", group_algebra_suite, Some(30)),
        ("one-sided identity battery", identity_battery, None),
        ("two-sided battery", two_sided_battery, None),
        ("Haagerup norm", haagerup_suite, None),
        ("negative controls", negative_controls, None),
        ("corepresentation suite", corep_suite, Some(20)),
        ("Haar state and duality", haar_and_duality, None),
        ("reconstruction", reconstruction, Some(5)),
        ("CLI determinism", cli_determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > Duration::from_secs(*b) => Err(format!("took {elapsed:.2?}, budget {b} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
