#![allow(dead_code)]

use std::sync::Arc;

use hopf_cstar::examples::FiniteGroup;
use hopf_cstar::{AlgebraElement, CStarAlgebra, Functional, Tensor, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_scalar(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> DVector<C64> {
    DVector::from_fn(n, |_, _| random_scalar(rng))
}

pub fn random_element(alg: &Arc<CStarAlgebra>, rng: &mut impl Rng) -> AlgebraElement {
    alg.element(random_vector(alg.dim(), rng)).unwrap()
}

/// A random element of `A ⊗ A` of tensor rank at most `rank`.
pub fn random_tensor(alg: &Arc<CStarAlgebra>, rank: usize, rng: &mut impl Rng) -> Tensor {
    let mut x = Tensor::zeros(vec![alg.clone(), alg.clone()]);
    for _ in 0..rank {
        let (p, q) = (random_element(alg, rng), random_element(alg, rng));
        x = x.try_add(&Tensor::elementary(&[&p, &q])).unwrap();
    }
    x
}

pub fn random_functional(alg: &Arc<CStarAlgebra>, rng: &mut impl Rng) -> Functional {
    Functional::from_values(alg.clone(), random_vector(alg.dim(), rng)).unwrap()
}

/// Identity and inverses found by brute force from the table alone.
pub fn table_identity(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)).unwrap()
}

pub fn table_inverse(table: &[Vec<usize>], p: usize) -> usize {
    let e = table_identity(table);
    (0..table.len()).find(|&q| table[p][q] == e).unwrap()
}

/// Left translation matrices built directly from the table.
pub fn lambda(g: &FiniteGroup, p: usize) -> DMatrix<C64> {
    let n = g.order();
    DMatrix::from_fn(n, n, |i, j| if g.table()[p][j] == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
