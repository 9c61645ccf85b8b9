//! Finite-dimensional C*-algebras realized as *-subalgebras of a direct sum
//! of full matrix algebras, together with their elements, functionals,
//! multi-leg tensors and linear maps.
//!
//! Every algebra carries a fixed linear basis `e_0, …, e_{d-1}` and sparse
//! structure constants for products and adjoints, so all arithmetic works in
//! coordinates. The ambient matrix blocks are only materialized to compute
//! operator norms or to import elements given as matrices.

mod functional;
mod operator;
mod subspace;
mod tensor;

pub use functional::Functional;
pub use operator::{check_star_hom, LinearOperator, StarHomDefects};
pub use subspace::Subspace;
pub use tensor::Tensor;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, one, op_norm, trace_norm, zero, FullSvd, C64};

/// Sparse coordinate vector: `(basis index, coefficient)` pairs.
pub type Sparse = Vec<(usize, C64)>;

/// Coefficients below this magnitude are dropped from structure constants.
const STRUCTURE_CUTOFF: f64 = 1e-13;

/// Tolerance used when validating a declared basis.
const BASIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Realization {
    /// Matrix units `e^b_{ij}`, blocks in order, `(i, j)` row-major.
    MatrixUnits,
    /// Explicit basis; each element is a list of `(block, matrix)` parts.
    Declared(Vec<Vec<(usize, DMatrix<C64>)>>),
}

pub struct CStarAlgebra {
    block_dims: Vec<usize>,
    realization: Realization,
    dim: usize,
    products: Vec<Sparse>,
    stars: Vec<Sparse>,
    unit: DVector<C64>,
    gram: DMatrix<C64>,
    gram_inv: DMatrix<C64>,
    gram_diagonal: Option<Vec<f64>>,
    commutative: bool,
}

impl fmt::Debug for CStarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CStarAlgebra")
            .field("block_dims", &self.block_dims)
            .field("dim", &self.dim)
            .field("matrix_units", &self.is_full())
            .finish()
    }
}

impl CStarAlgebra {
    /// The full algebra `M_{n_1} ⊕ … ⊕ M_{n_k}` with the matrix-unit basis.
    pub fn full(block_dims: &[usize]) -> Result<Arc<Self>> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "block dimensions must be a non-empty list of positive integers, got {block_dims:?}"
            )));
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut dim = 0;
        for &n in block_dims {
            offsets.push(dim);
            dim += n * n;
        }
        let mut products = vec![Vec::new(); dim * dim];
        let mut stars = vec![Vec::new(); dim];
        let mut unit = DVector::zeros(dim);
        for (b, &n) in block_dims.iter().enumerate() {
            let off = offsets[b];
            for i in 0..n {
                unit[off + i * n + i] = one();
                for j in 0..n {
                    let x = off + i * n + j;
                    stars[x] = vec![(off + j * n + i, one())];
                    for l in 0..n {
                        let y = off + j * n + l;
                        products[x * dim + y] = vec![(off + i * n + l, one())];
                    }
                }
            }
        }
        let commutative = block_dims.iter().all(|&n| n == 1);
        Ok(Arc::new(CStarAlgebra {
            block_dims: block_dims.to_vec(),
            realization: Realization::MatrixUnits,
            dim,
            products,
            stars,
            unit,
            gram: DMatrix::identity(dim, dim),
            gram_inv: DMatrix::identity(dim, dim),
            gram_diagonal: Some(vec![1.0; dim]),
            commutative,
        }))
    }

    /// A *-subalgebra of `M_{n_1} ⊕ … ⊕ M_{n_k}` spanned by the given basis.
    /// Each basis element is given as one matrix per block.
    ///
    /// Fails if the basis is linearly dependent or its span is not closed
    /// under products and adjoints, or does not contain the unit.
    pub fn with_basis(block_dims: &[usize], basis: Vec<Vec<DMatrix<C64>>>) -> Result<Arc<Self>> {
        let full = Self::full(block_dims)?;
        if basis.is_empty() {
            return Err(Error::InvalidInput("basis must be non-empty".into()));
        }
        let mut parts = Vec::with_capacity(basis.len());
        for (k, blocks) in basis.iter().enumerate() {
            if blocks.len() != block_dims.len() {
                return Err(Error::ShapeMismatch(format!(
                    "basis element {k} has {} blocks, expected {}",
                    blocks.len(),
                    block_dims.len()
                )));
            }
            let mut p = Vec::new();
            for (b, m) in blocks.iter().enumerate() {
                let n = block_dims[b];
                if m.shape() != (n, n) {
                    return Err(Error::ShapeMismatch(format!(
                        "basis element {k}, block {b} has shape {:?}, expected ({n}, {n})",
                        m.shape()
                    )));
                }
                if m.iter().any(|z| z.norm() > 0.0) {
                    p.push((b, m.clone()));
                }
            }
            parts.push(p);
        }
        Self::from_parts(&full, parts)
    }

    fn from_parts(full: &CStarAlgebra, parts: Vec<Vec<(usize, DMatrix<C64>)>>) -> Result<Arc<Self>> {
        let dim = parts.len();
        let ambient: Vec<DVector<C64>> = parts.iter().map(|p| full.parts_to_coords(p)).collect();
        let r = DMatrix::from_columns(&ambient);
        if FullSvd::new(&r).rank() < dim {
            return Err(Error::InvalidInput("basis elements are linearly dependent".into()));
        }
        let gram = r.adjoint() * &r;
        let gram_inv = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("basis Gram matrix is singular".into()))?;
        let extract = |v: &DVector<C64>, what: &str| -> Result<DVector<C64>> {
            let x = &gram_inv * (r.adjoint() * v);
            let resid = (&r * &x - v).norm();
            if resid > BASIS_TOL * (1.0 + v.norm()) {
                return Err(Error::InvalidInput(format!(
                    "span of the basis is not closed: {what} leaves it (residual {resid:.3e})"
                )));
            }
            Ok(x)
        };
        let mut products = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let prod = full.mul_coords(&ambient[i], &ambient[j]);
                products.push(sparsify(&extract(&prod, &format!("e_{i} e_{j}"))?));
            }
        }
        let mut stars = Vec::with_capacity(dim);
        for (i, a) in ambient.iter().enumerate() {
            stars.push(sparsify(&extract(&full.star_coords(a), &format!("e_{i}*"))?));
        }
        let unit = extract(&full.unit, "the unit")?;
        Ok(Arc::new(Self::assemble(
            full.block_dims.clone(),
            Realization::Declared(parts),
            products,
            stars,
            unit,
            gram,
            gram_inv,
        )))
    }

    fn assemble(
        block_dims: Vec<usize>,
        realization: Realization,
        products: Vec<Sparse>,
        stars: Vec<Sparse>,
        unit: DVector<C64>,
        gram: DMatrix<C64>,
        gram_inv: DMatrix<C64>,
    ) -> Self {
        let dim = stars.len();
        let is_diag = (0..dim).all(|i| (0..dim).all(|j| i == j || gram[(i, j)].norm() < 1e-12));
        let gram_diagonal = is_diag.then(|| (0..dim).map(|i| gram[(i, i)].re).collect());
        let commutative = (0..dim).all(|i| {
            (0..i).all(|j| sparse_close(&products[i * dim + j], &products[j * dim + i], 1e-12))
        });
        CStarAlgebra {
            block_dims,
            realization,
            dim,
            products,
            stars,
            unit,
            gram,
            gram_inv,
            gram_diagonal,
            commutative,
        }
    }

    /// The tensor product `A ⊗ B`, with basis `e_i ⊗ f_j` ordered by `i * dim(B) + j`.
    pub fn tensor(a: &Arc<Self>, b: &Arc<Self>) -> Arc<Self> {
        let (da, db) = (a.dim, b.dim);
        let dim = da * db;
        let nb = b.block_dims.len();
        let block_dims =
            a.block_dims.iter().flat_map(|&m| b.block_dims.iter().map(move |&n| m * n)).collect();
        let mut products = Vec::with_capacity(dim * dim);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        products.push(sparse_kron(&a.products[i * da + k], &b.products[j * db + l], db));
                    }
                }
            }
        }
        let stars = (0..da)
            .flat_map(|i| (0..db).map(move |j| (i, j)))
            .map(|(i, j)| sparse_kron(&a.stars[i], &b.stars[j], db))
            .collect();
        let mut parts = Vec::with_capacity(dim);
        for i in 0..da {
            let pa = a.parts(i);
            for j in 0..db {
                let pb = b.parts(j);
                let mut p = Vec::new();
                for (ba, ma) in &pa {
                    for (bb, mb) in &pb {
                        p.push((ba * nb + bb, ma.kronecker(mb)));
                    }
                }
                parts.push(p);
            }
        }
        Arc::new(Self::assemble(
            block_dims,
            Realization::Declared(parts),
            products,
            stars,
            crate::linalg::kron_vec(&a.unit, &b.unit),
            a.gram.kronecker(&b.gram),
            a.gram_inv.kronecker(&b.gram_inv),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Whether the basis is the matrix-unit basis of the full block algebra.
    pub fn is_full(&self) -> bool {
        matches!(self.realization, Realization::MatrixUnits)
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    /// Coordinates of `e_i e_j`.
    pub fn product(&self, i: usize, j: usize) -> &Sparse {
        &self.products[i * self.dim + j]
    }

    /// Coordinates of `e_i*`.
    pub fn star(&self, i: usize) -> &Sparse {
        &self.stars[i]
    }

    pub fn unit_coords(&self) -> &DVector<C64> {
        &self.unit
    }

    /// Hilbert–Schmidt Gram matrix `G_ij = Tr(e_i* e_j)` of the basis.
    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &DMatrix<C64> {
        &self.gram_inv
    }

    pub fn gram_diagonal(&self) -> Option<&[f64]> {
        self.gram_diagonal.as_deref()
    }

    /// Structural equality: same blocks and the same basis realization.
    pub fn same_as(&self, other: &CStarAlgebra) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.block_dims != other.block_dims || self.dim != other.dim {
            return false;
        }
        (0..self.dim).all(|i| {
            let (p, q) = (self.parts(i), other.parts(i));
            p.len() == q.len()
                && p.iter().zip(&q).all(|((b, m), (c, n))| b == c && (m - n).norm() < 1e-12)
        })
    }

    /// Nonzero ambient blocks of the basis element `e_i`.
    pub fn parts(&self, i: usize) -> Vec<(usize, DMatrix<C64>)> {
        match &self.realization {
            Realization::Declared(p) => p[i].clone(),
            Realization::MatrixUnits => {
                let mut off = 0;
                for (b, &n) in self.block_dims.iter().enumerate() {
                    if i < off + n * n {
                        let k = i - off;
                        let mut m = DMatrix::zeros(n, n);
                        m[(k / n, k % n)] = one();
                        return vec![(b, m)];
                    }
                    off += n * n;
                }
                unreachable!("basis index {i} out of range")
            }
        }
    }

    /// Coordinates in the matrix-unit basis of the full algebra of the element
    /// with the given parts.
    fn parts_to_coords(&self, parts: &[(usize, DMatrix<C64>)]) -> DVector<C64> {
        debug_assert!(self.is_full());
        let mut v = DVector::zeros(self.dim);
        let offs = self.block_offsets();
        for (b, m) in parts {
            let n = self.block_dims[*b];
            for i in 0..n {
                for j in 0..n {
                    v[offs[*b] + i * n + j] += m[(i, j)];
                }
            }
        }
        v
    }

    fn block_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.block_dims
            .iter()
            .map(|&n| {
                let o = off;
                off += n * n;
                o
            })
            .collect()
    }

    pub(crate) fn mul_coords(&self, a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for (i, x) in a.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y == zero() {
                    continue;
                }
                let xy = x * y;
                for &(k, s) in &self.products[i * d + j] {
                    out[k] += xy * s;
                }
            }
        }
        out
    }

    pub(crate) fn star_coords(&self, a: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.dim);
        for (i, x) in a.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            for &(k, s) in &self.stars[i] {
                out[k] += x.conj() * s;
            }
        }
        out
    }

    /// Hilbert–Schmidt inner product `Tr(a* b)` of coordinate vectors.
    pub(crate) fn hs_inner(&self, a: &DVector<C64>, b: &DVector<C64>) -> C64 {
        match &self.gram_diagonal {
            Some(g) => a.iter().zip(b.iter()).zip(g).map(|((x, y), w)| x.conj() * y * w).sum(),
            None => (a.adjoint() * &self.gram * b)[(0, 0)],
        }
    }

    /// The block matrices of the element with coordinates `a`.
    pub(crate) fn coords_to_blocks(&self, a: &DVector<C64>) -> Vec<DMatrix<C64>> {
        let mut blocks: Vec<DMatrix<C64>> =
            self.block_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (i, x) in a.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            for (b, m) in self.parts(i) {
                blocks[b] += m * *x;
            }
        }
        blocks
    }

    /// Coordinates of the element with the given blocks, together with the
    /// Hilbert–Schmidt distance from the blocks to the span of the basis.
    pub(crate) fn blocks_to_coords(&self, blocks: &[DMatrix<C64>]) -> Result<(DVector<C64>, f64)> {
        if blocks.len() != self.block_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                self.block_dims.len(),
                blocks.len()
            )));
        }
        for (b, m) in blocks.iter().enumerate() {
            let n = self.block_dims[b];
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch(format!(
                    "block {b} has shape {:?}, expected ({n}, {n})",
                    m.shape()
                )));
            }
        }
        let rhs = DVector::from_fn(self.dim, |i, _| {
            self.parts(i).iter().map(|(b, m)| m.dotc(&blocks[*b])).sum::<C64>()
        });
        let x = &self.gram_inv * rhs;
        let back = self.coords_to_blocks(&x);
        let resid = back
            .iter()
            .zip(blocks)
            .map(|(p, q)| (p - q).norm_squared())
            .sum::<f64>()
            .sqrt();
        Ok((x, resid))
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> AlgebraElement {
        let mut v = DVector::zeros(self.dim);
        v[i] = one();
        AlgebraElement { alg: self.clone(), coords: v }
    }

    pub fn basis(self: &Arc<Self>) -> Vec<AlgebraElement> {
        (0..self.dim).map(|i| self.basis_element(i)).collect()
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), coords: self.unit.clone() }
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement { alg: self.clone(), coords: DVector::zeros(self.dim) }
    }

    pub fn element(self: &Arc<Self>, coords: DVector<C64>) -> Result<AlgebraElement> {
        AlgebraElement::new(self.clone(), coords)
    }

    /// Imports an element given by its blocks; fails if it is not in the algebra.
    pub fn from_blocks(self: &Arc<Self>, blocks: &[DMatrix<C64>]) -> Result<AlgebraElement> {
        let (coords, resid) = self.blocks_to_coords(blocks)?;
        let scale: f64 = blocks.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt();
        if resid > BASIS_TOL * (1.0 + scale) {
            return Err(Error::Domain { domain: "the algebra", residual: resid });
        }
        Ok(AlgebraElement { alg: self.clone(), coords })
    }
}

pub(crate) fn sparsify(v: &DVector<C64>) -> Sparse {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > STRUCTURE_CUTOFF * scale)
        .map(|(k, z)| (k, *z))
        .collect()
}

fn sparse_kron(a: &Sparse, b: &Sparse, db: usize) -> Sparse {
    a.iter().flat_map(|&(i, x)| b.iter().map(move |&(j, y)| (i * db + j, x * y))).collect()
}

fn sparse_close(a: &Sparse, b: &Sparse, tol: f64) -> bool {
    let mut diff: std::collections::BTreeMap<usize, C64> = std::collections::BTreeMap::new();
    for &(k, x) in a {
        *diff.entry(k).or_insert(zero()) += x;
    }
    for &(k, x) in b {
        *diff.entry(k).or_insert(zero()) -= x;
    }
    diff.values().all(|z| z.norm() <= tol)
}

/// An element of a [`CStarAlgebra`], stored by its basis coordinates.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alg: Arc<CStarAlgebra>,
    coords: DVector<C64>,
}

impl AlgebraElement {
    pub fn new(alg: Arc<CStarAlgebra>, coords: DVector<C64>) -> Result<Self> {
        if coords.len() != alg.dim {
            return Err(Error::ShapeMismatch(format!(
                "element has {} coordinates, algebra has dimension {}",
                coords.len(),
                alg.dim
            )));
        }
        Ok(AlgebraElement { alg, coords })
    }

    pub fn algebra(&self) -> &Arc<CStarAlgebra> {
        &self.alg
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<C64> {
        self.coords
    }

    pub fn blocks(&self) -> Vec<DMatrix<C64>> {
        self.alg.coords_to_blocks(&self.coords)
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg.same_as(&other.alg) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("elements belong to different algebras".into()))
        }
    }

    pub fn try_mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement { alg: self.alg.clone(), coords: self.alg.mul_coords(&self.coords, &other.coords) })
    }

    pub fn try_add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement { alg: self.alg.clone(), coords: &self.coords + &other.coords })
    }

    pub fn try_sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        Ok(AlgebraElement { alg: self.alg.clone(), coords: &self.coords - &other.coords })
    }

    pub fn scale(&self, s: C64) -> AlgebraElement {
        AlgebraElement { alg: self.alg.clone(), coords: &self.coords * s }
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement { alg: self.alg.clone(), coords: self.alg.star_coords(&self.coords) }
    }

    /// The C*-norm: the largest operator norm over the blocks.
    pub fn norm(&self) -> f64 {
        self.blocks().iter().map(op_norm).fold(0.0, f64::max)
    }

    /// The Hilbert–Schmidt norm of the ambient realization.
    pub fn hs_norm(&self) -> f64 {
        self.alg.hs_inner(&self.coords, &self.coords).re.max(0.0).sqrt()
    }

    /// The trace norm of the ambient realization (sum over blocks).
    pub fn trace_norm(&self) -> f64 {
        self.blocks().iter().map(trace_norm).sum()
    }

    /// `true` if the element is a multiple of the unit; returns the scalar.
    pub fn as_scalar(&self, tol: f64) -> Option<C64> {
        let u = &self.alg.unit;
        let s = self.alg.hs_inner(u, &self.coords) / self.alg.hs_inner(u, u);
        let resid = AlgebraElement { alg: self.alg.clone(), coords: &self.coords - u * s }.hs_norm();
        (resid <= tol * (1.0 + self.hs_norm())).then_some(s)
    }

    pub fn is_close(&self, other: &AlgebraElement, tol: f64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.hs_norm() <= tol * (1.0 + self.hs_norm().max(other.hs_norm())),
            Err(_) => false,
        }
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_add(rhs).expect("adding elements of different algebras")
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_sub(rhs).expect("subtracting elements of different algebras")
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.try_mul(rhs).expect("multiplying elements of different algebras")
    }
}

impl Mul<C64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: C64) -> AlgebraElement {
        self.scale(rhs)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(c(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> Arc<CStarAlgebra> {
        CStarAlgebra::full(&[2]).unwrap()
    }

    #[test]
    fn matrix_units_multiply() {
        let a = m2();
        let e = a.basis();
        // e_12 e_21 = e_11, e_21 e_12 = e_22
        assert!((&e[1] * &e[2]).is_close(&e[0], 1e-14));
        assert!((&e[2] * &e[1]).is_close(&e[3], 1e-14));
        assert!((&e[1] * &e[1]).hs_norm() < 1e-14);
        assert!(e[1].adjoint().is_close(&e[2], 1e-14));
    }

    #[test]
    fn direct_sum_unit_and_norm() {
        let a = CStarAlgebra::full(&[1, 2]).unwrap();
        assert_eq!(a.dim(), 5);
        assert!((a.one().norm() - 1.0).abs() < 1e-12);
        let x = a.element(DVector::from_fn(5, |i, _| c(i as f64, 0.0))).unwrap();
        // blocks: [0] and [[1,2],[3,4]]
        let expected = 5.464985704219043;
        assert!((x.norm() - expected).abs() < 1e-9);
    }

    #[test]
    fn diagonal_subalgebra_is_accepted() {
        let d = |a: f64, b: f64| DMatrix::from_row_slice(2, 2, &[c(a, 0.0), zero(), zero(), c(b, 0.0)]);
        let alg = CStarAlgebra::with_basis(&[2], vec![vec![d(1.0, 0.0)], vec![d(0.0, 1.0)]]).unwrap();
        assert!(alg.is_commutative());
        assert!(!alg.is_full());
        let one = alg.one();
        assert!((one.coords()[0] - one_c()).norm() < 1e-12);
        assert!((one.coords()[1] - one_c()).norm() < 1e-12);
    }

    fn one_c() -> C64 {
        one()
    }

    #[test]
    fn non_closed_basis_is_rejected() {
        let e12 = DMatrix::from_row_slice(2, 2, &[zero(), one(), zero(), zero()]);
        let err = CStarAlgebra::with_basis(&[2], vec![vec![DMatrix::identity(2, 2)], vec![e12]]);
        assert!(err.is_err());
    }

    #[test]
    fn blocks_round_trip() {
        let a = CStarAlgebra::full(&[2, 1]).unwrap();
        let x = a.element(DVector::from_fn(5, |i, _| c(i as f64, -(i as f64)))).unwrap();
        let y = a.from_blocks(&x.blocks()).unwrap();
        assert!(x.is_close(&y, 1e-14));
    }

    #[test]
    fn tensor_algebra_structure() {
        let a = m2();
        let t = CStarAlgebra::tensor(&a, &a);
        assert_eq!(t.dim(), 16);
        assert_eq!(t.block_dims(), &[4]);
        let x = t.basis_element(4 + 2); // e_12 ⊗ e_21
        let y = t.basis_element(2 * 4 + 1); // e_21 ⊗ e_12
        let p = &x * &y;
        assert!(p.is_close(&t.basis_element(3), 1e-14));
        let blocks = x.blocks();
        let expected = a.basis_element(1).blocks()[0].kronecker(&a.basis_element(2).blocks()[0]);
        assert!((&blocks[0] - expected).norm() < 1e-14);
    }
}
