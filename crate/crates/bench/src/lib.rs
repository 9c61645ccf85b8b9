//! Workloads shared by the benchmarks.

use hopf_cstar::examples::{function_algebra, group_algebra, FiniteGroup};
use hopf_cstar::{CStarAlgebra, Comultiplication, Tensor};

/// The group algebra and function algebra of each group, labelled.
pub fn hopf_pairs() -> Vec<(String, Comultiplication)> {
    let groups = [
        ("Z4", FiniteGroup::cyclic(4)),
        ("S3", FiniteGroup::symmetric3()),
        ("Q8", FiniteGroup::quaternion()),
    ];
    let mut out = Vec::new();
    for (name, g) in groups {
        out.push((format!("C({name})"), function_algebra(&g).expect("function algebra").1));
        out.push((format!("C*{name}"), group_algebra(&g).expect("group algebra").1));
    }
    out
}

/// `e₁₁⊗e₁₁ + e₁₂⊗e₂₁` in `M₂⊗M₂`.
pub fn gap_tensor() -> Tensor {
    let a = CStarAlgebra::full(&[2]).expect("M2");
    let e = a.basis();
    Tensor::elementary(&[&e[0], &e[0]]).try_add(&Tensor::elementary(&[&e[1], &e[2]])).expect("same legs")
}

/// A deterministic tensor of rank `rank` over `⊕M_{n_i}`.
pub fn spread_tensor(dims: &[usize], rank: usize) -> Tensor {
    let a = CStarAlgebra::full(dims).expect("block dims");
    let d = a.dim();
    let mut x = Tensor::zeros(vec![a.clone(), a.clone()]);
    for k in 0..rank {
        let coords = |shift: usize| {
            nalgebra::DVector::from_fn(d, |i, _| {
                let t = ((i + 1) * (k + shift + 1)) as f64;
                hopf_cstar::C64::new(t.sin(), (0.5 * t).cos())
            })
        };
        let p = a.element(coords(0)).expect("dimension");
        let q = a.element(coords(7)).expect("dimension");
        x = x.try_add(&Tensor::elementary(&[&p, &q])).expect("same legs");
    }
    x
}
