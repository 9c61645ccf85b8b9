use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{AlgebraElement, CStarAlgebra, Functional, LinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{kron_vec, one, op_norm, zero, C64};

/// Per basis element, its nonzero blocks as `(block index, matrix)`.
type BlockParts = Vec<(usize, DMatrix<C64>)>;

/// An element of `A_1 ⊗ … ⊗ A_k`, stored by its coordinates in the product
/// basis `e_{i_1} ⊗ … ⊗ e_{i_k}` (row-major, last leg fastest).
#[derive(Clone, Debug)]
pub struct Tensor {
    legs: Vec<Arc<CStarAlgebra>>,
    coords: DVector<C64>,
}

pub(crate) fn legs_match(a: &[Arc<CStarAlgebra>], b: &[Arc<CStarAlgebra>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| Arc::ptr_eq(x, y) || x.same_as(y))
}

pub(crate) fn total_dim(legs: &[Arc<CStarAlgebra>]) -> usize {
    legs.iter().map(|l| l.dim()).product()
}

impl Tensor {
    pub fn new(legs: Vec<Arc<CStarAlgebra>>, coords: DVector<C64>) -> Result<Self> {
        if legs.is_empty() {
            return Err(Error::InvalidInput("a tensor needs at least one leg".into()));
        }
        let n = total_dim(&legs);
        if coords.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "tensor has {} coordinates, legs require {n}",
                coords.len()
            )));
        }
        Ok(Tensor { legs, coords })
    }

    pub fn zeros(legs: Vec<Arc<CStarAlgebra>>) -> Self {
        let n = total_dim(&legs);
        Tensor { legs, coords: DVector::zeros(n) }
    }

    pub fn unit(legs: Vec<Arc<CStarAlgebra>>) -> Self {
        let coords = legs
            .iter()
            .skip(1)
            .fold(legs[0].unit_coords().clone(), |acc, l| kron_vec(&acc, l.unit_coords()));
        Tensor { legs, coords }
    }

    pub fn basis_element(legs: Vec<Arc<CStarAlgebra>>, index: usize) -> Self {
        let mut t = Self::zeros(legs);
        t.coords[index] = one();
        t
    }

    /// `a_1 ⊗ … ⊗ a_k`.
    pub fn elementary(factors: &[&AlgebraElement]) -> Self {
        let legs = factors.iter().map(|a| a.algebra().clone()).collect();
        let coords = factors
            .iter()
            .skip(1)
            .fold(factors[0].coords().clone(), |acc, a| kron_vec(&acc, a.coords()));
        Tensor { legs, coords }
    }

    pub fn from_element(a: &AlgebraElement) -> Self {
        Tensor { legs: vec![a.algebra().clone()], coords: a.coords().clone() }
    }

    /// The underlying element of a one-leg tensor.
    pub fn to_element(&self) -> Result<AlgebraElement> {
        if self.legs.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected a one-leg tensor, got {} legs",
                self.legs.len()
            )));
        }
        AlgebraElement::new(self.legs[0].clone(), self.coords.clone())
    }

    pub fn legs(&self) -> &[Arc<CStarAlgebra>] {
        &self.legs
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<C64> {
        self.coords
    }

    pub fn leg_dims(&self) -> Vec<usize> {
        self.legs.iter().map(|l| l.dim()).collect()
    }

    fn check_legs(&self, other: &Tensor) -> Result<()> {
        if legs_match(&self.legs, &other.legs) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("tensors live in different tensor products".into()))
        }
    }

    pub fn try_add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_legs(other)?;
        Ok(Tensor { legs: self.legs.clone(), coords: &self.coords + &other.coords })
    }

    pub fn try_sub(&self, other: &Tensor) -> Result<Tensor> {
        self.check_legs(other)?;
        Ok(Tensor { legs: self.legs.clone(), coords: &self.coords - &other.coords })
    }

    pub fn scale(&self, s: C64) -> Tensor {
        Tensor { legs: self.legs.clone(), coords: &self.coords * s }
    }

    /// Expands a product-basis index into per-leg indices.
    fn split_index(dims: &[usize], mut index: usize, out: &mut [usize]) {
        for k in (0..dims.len()).rev() {
            out[k] = index % dims[k];
            index /= dims[k];
        }
    }

    pub fn try_mul(&self, other: &Tensor) -> Result<Tensor> {
        self.check_legs(other)?;
        let dims = self.leg_dims();
        let nlegs = dims.len();
        let mut out = DVector::zeros(self.coords.len());
        let mut ia = vec![0; nlegs];
        let mut ib = vec![0; nlegs];
        let nz_b: Vec<(usize, C64)> =
            other.coords.iter().enumerate().filter(|(_, z)| **z != zero()).map(|(k, z)| (k, *z)).collect();
        let mut acc: Vec<(usize, C64)> = Vec::new();
        let mut next: Vec<(usize, C64)> = Vec::new();
        for (a, x) in self.coords.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            Self::split_index(&dims, a, &mut ia);
            for &(b, y) in &nz_b {
                Self::split_index(&dims, b, &mut ib);
                acc.clear();
                acc.push((0, x * y));
                for k in 0..nlegs {
                    next.clear();
                    let prod = self.legs[k].product(ia[k], ib[k]);
                    for &(idx, s) in &acc {
                        for &(p, t) in prod {
                            next.push((idx * dims[k] + p, s * t));
                        }
                    }
                    std::mem::swap(&mut acc, &mut next);
                    if acc.is_empty() {
                        break;
                    }
                }
                for &(idx, s) in &acc {
                    out[idx] += s;
                }
            }
        }
        Ok(Tensor { legs: self.legs.clone(), coords: out })
    }

    pub fn adjoint(&self) -> Tensor {
        let dims = self.leg_dims();
        let mut out = DVector::zeros(self.coords.len());
        let mut ia = vec![0; dims.len()];
        for (a, x) in self.coords.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            Self::split_index(&dims, a, &mut ia);
            let mut acc = vec![(0usize, x.conj())];
            for k in 0..dims.len() {
                let (d, star) = (dims[k], self.legs[k].star(ia[k]));
                acc = acc
                    .iter()
                    .flat_map(|&(idx, s)| star.iter().map(move |&(p, t)| (idx * d + p, s * t)))
                    .collect();
            }
            for (idx, s) in acc {
                out[idx] += s;
            }
        }
        Tensor { legs: self.legs.clone(), coords: out }
    }

    /// Applies a matrix to one leg's coordinate index.
    fn map_leg(&self, leg: usize, m: &DMatrix<C64>, new_leg: Arc<CStarAlgebra>) -> Tensor {
        let dims = self.leg_dims();
        let pre: usize = dims[..leg].iter().product();
        let post: usize = dims[leg + 1..].iter().product();
        let (rows, cols) = m.shape();
        debug_assert_eq!(cols, dims[leg]);
        let mut out = DVector::zeros(pre * rows * post);
        for p in 0..pre {
            for j in 0..cols {
                for q in 0..post {
                    let x = self.coords[(p * cols + j) * post + q];
                    if x == zero() {
                        continue;
                    }
                    for i in 0..rows {
                        out[(p * rows + i) * post + q] += m[(i, j)] * x;
                    }
                }
            }
        }
        let mut legs = self.legs.clone();
        legs[leg] = new_leg;
        Tensor { legs, coords: out }
    }

    /// The Hilbert–Schmidt norm of the ambient realization.
    pub fn hs_norm(&self) -> f64 {
        if self.legs.iter().all(|l| l.gram_diagonal().is_some()) {
            let dims = self.leg_dims();
            let mut idx = vec![0; dims.len()];
            let mut total = 0.0;
            for (a, x) in self.coords.iter().enumerate() {
                if *x == zero() {
                    continue;
                }
                Self::split_index(&dims, a, &mut idx);
                let w: f64 = idx.iter().zip(&self.legs).map(|(&i, l)| l.gram_diagonal().unwrap()[i]).product();
                total += x.norm_sqr() * w;
            }
            return total.sqrt();
        }
        let mut g = self.clone();
        for k in 0..self.legs.len() {
            g = g.map_leg(k, self.legs[k].gram(), self.legs[k].clone());
        }
        self.coords.dotc(&g.coords).re.max(0.0).sqrt()
    }

    /// The C*-norm, computed from the materialized ambient blocks.
    pub fn norm(&self) -> f64 {
        self.ambient_blocks().values().map(op_norm).fold(0.0, f64::max)
    }

    /// Nonzero ambient blocks, keyed by the tuple of per-leg block indices.
    pub fn ambient_blocks(&self) -> HashMap<Vec<usize>, DMatrix<C64>> {
        let dims = self.leg_dims();
        let parts: Vec<Vec<BlockParts>> =
            self.legs.iter().map(|l| (0..l.dim()).map(|i| l.parts(i)).collect()).collect();
        let mut blocks: HashMap<Vec<usize>, DMatrix<C64>> = HashMap::new();
        let mut idx = vec![0; dims.len()];
        for (a, x) in self.coords.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            Self::split_index(&dims, a, &mut idx);
            let mut acc: Vec<(Vec<usize>, DMatrix<C64>)> = vec![(vec![], DMatrix::from_element(1, 1, *x))];
            for k in 0..dims.len() {
                acc = acc
                    .iter()
                    .flat_map(|(key, m)| {
                        parts[k][idx[k]].iter().map(move |(b, p)| {
                            let mut key = key.clone();
                            key.push(*b);
                            (key, m.kronecker(p))
                        })
                    })
                    .collect();
            }
            for (key, m) in acc {
                match blocks.get_mut(&key) {
                    Some(acc) => *acc += m,
                    None => {
                        blocks.insert(key, m);
                    }
                }
            }
        }
        blocks
    }

    /// Slices one leg with a functional: `(ι ⊗ ω ⊗ ι)(x)`.
    pub fn slice(&self, leg: usize, omega: &Functional) -> Result<Tensor> {
        if leg >= self.legs.len() || !self.legs[leg].same_as(omega.algebra()) {
            return Err(Error::ShapeMismatch(format!("functional does not act on leg {leg}")));
        }
        if self.legs.len() == 1 {
            return Err(Error::ShapeMismatch("cannot slice the only leg of a tensor".into()));
        }
        let row = DMatrix::from_row_slice(1, omega.values().len(), omega.values().as_slice());
        let t = self.map_leg(leg, &row, self.legs[leg].clone());
        let mut legs = self.legs.clone();
        legs.remove(leg);
        Ok(Tensor { legs, coords: t.coords })
    }

    /// Slices a two-leg tensor down to an element of the remaining leg.
    pub fn slice_to_element(&self, leg: usize, omega: &Functional) -> Result<AlgebraElement> {
        self.slice(leg, omega)?.to_element()
    }

    /// Applies `op` to the consecutive legs `start .. start + op.source().len()`,
    /// replacing them with the legs of its target.
    pub fn apply_on(&self, start: usize, op: &LinearOperator) -> Result<Tensor> {
        let k = op.source().len();
        if start + k > self.legs.len() || !legs_match(&self.legs[start..start + k], op.source()) {
            return Err(Error::ShapeMismatch(format!(
                "operator source does not match legs {start}..{}",
                start + k
            )));
        }
        let dims = self.leg_dims();
        let pre: usize = dims[..start].iter().product();
        let mid: usize = dims[start..start + k].iter().product();
        let post: usize = dims[start + k..].iter().product();
        let m = op.matrix();
        let rows = m.nrows();
        let mut out = DVector::zeros(pre * rows * post);
        for p in 0..pre {
            for j in 0..mid {
                for q in 0..post {
                    let x = self.coords[(p * mid + j) * post + q];
                    if x == zero() {
                        continue;
                    }
                    for (i, mij) in m.column(j).iter().enumerate() {
                        if *mij != zero() {
                            out[(p * rows + i) * post + q] += mij * x;
                        }
                    }
                }
            }
        }
        let mut legs = self.legs[..start].to_vec();
        legs.extend(op.target().iter().cloned());
        legs.extend(self.legs[start + k..].iter().cloned());
        Ok(Tensor { legs, coords: out })
    }

    /// Inserts a unit factor as a new leg at position `pos`.
    pub fn insert_unit(&self, pos: usize, alg: &Arc<CStarAlgebra>) -> Tensor {
        let dims = self.leg_dims();
        let pre: usize = dims[..pos].iter().product();
        let post: usize = dims[pos..].iter().product();
        let u = alg.unit_coords();
        let d = alg.dim();
        let mut out = DVector::zeros(pre * d * post);
        for p in 0..pre {
            for (i, ui) in u.iter().enumerate() {
                if *ui == zero() {
                    continue;
                }
                for q in 0..post {
                    out[(p * d + i) * post + q] = self.coords[p * post + q] * ui;
                }
            }
        }
        let mut legs = self.legs.clone();
        legs.insert(pos, alg.clone());
        Tensor { legs, coords: out }
    }

    /// Reorders legs: leg `k` of the result is leg `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let n = self.legs.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of {n} legs")));
        }
        let dims = self.leg_dims();
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let mut out = DVector::zeros(self.coords.len());
        let mut idx = vec![0; n];
        for (a, x) in self.coords.iter().enumerate() {
            if *x == zero() {
                continue;
            }
            Self::split_index(&dims, a, &mut idx);
            let b = perm.iter().zip(&new_dims).fold(0, |acc, (&p, &d)| acc * d + idx[p]);
            out[b] = *x;
        }
        let legs = perm.iter().map(|&p| self.legs[p].clone()).collect();
        Ok(Tensor { legs, coords: out })
    }

    /// `(1 ⊗ … ⊗ a ⊗ … ⊗ 1) x` with `a` on the given leg.
    pub fn mul_leg_left(&self, leg: usize, a: &AlgebraElement) -> Result<Tensor> {
        self.embed(leg, a)?.try_mul(self)
    }

    /// `x (1 ⊗ … ⊗ a ⊗ … ⊗ 1)` with `a` on the given leg.
    pub fn mul_leg_right(&self, leg: usize, a: &AlgebraElement) -> Result<Tensor> {
        self.try_mul(&self.embed(leg, a)?)
    }

    fn embed(&self, leg: usize, a: &AlgebraElement) -> Result<Tensor> {
        if leg >= self.legs.len() || !self.legs[leg].same_as(a.algebra()) {
            return Err(Error::ShapeMismatch(format!("element does not live on leg {leg}")));
        }
        let factors: Vec<AlgebraElement> = self
            .legs
            .iter()
            .enumerate()
            .map(|(k, l)| if k == leg { a.clone() } else { l.one() })
            .collect();
        let refs: Vec<&AlgebraElement> = factors.iter().collect();
        Ok(Tensor::elementary(&refs))
    }

    pub fn is_close(&self, other: &Tensor, tol: f64) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.hs_norm() <= tol * (1.0 + self.hs_norm().max(other.hs_norm())),
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn m2() -> Arc<CStarAlgebra> {
        CStarAlgebra::full(&[2]).unwrap()
    }

    #[test]
    fn product_matches_tensor_algebra() {
        let a = m2();
        let t = CStarAlgebra::tensor(&a, &a);
        let x = Tensor::new(vec![a.clone(), a.clone()], DVector::from_fn(16, |i, _| c(i as f64, 1.0))).unwrap();
        let y = Tensor::new(vec![a.clone(), a.clone()], DVector::from_fn(16, |i, _| c(1.0, -(i as f64)))).unwrap();
        let xy = x.try_mul(&y).unwrap();
        let ex = t.element(x.coords().clone()).unwrap();
        let ey = t.element(y.coords().clone()).unwrap();
        assert!((xy.coords() - (&ex * &ey).coords()).norm() < 1e-10);
        assert!((x.adjoint().coords() - ex.adjoint().coords()).norm() < 1e-12);
        assert!((x.norm() - ex.norm()).abs() < 1e-10);
        assert!((x.hs_norm() - ex.hs_norm()).abs() < 1e-10);
    }

    #[test]
    fn permute_swaps_factors() {
        let a = m2();
        let b = CStarAlgebra::full(&[1, 1]).unwrap();
        let x = Tensor::elementary(&[&a.basis_element(1), &b.basis_element(0)]);
        let y = x.permute(&[1, 0]).unwrap();
        let expected = Tensor::elementary(&[&b.basis_element(0), &a.basis_element(1)]);
        assert!(y.is_close(&expected, 1e-14));
    }

    #[test]
    fn insert_unit_and_slice() {
        let a = m2();
        let x = Tensor::elementary(&[&a.basis_element(1), &a.basis_element(2)]);
        let y = x.insert_unit(1, &a);
        let expected = Tensor::elementary(&[&a.basis_element(1), &a.one(), &a.basis_element(2)]);
        assert!(y.is_close(&expected, 1e-14));
        let tr = Functional::trace(&a);
        let s = y.slice(1, &tr).unwrap();
        assert!(s.is_close(&x.scale(c(2.0, 0.0)), 1e-14));
    }

    #[test]
    fn leg_multiplication() {
        let a = m2();
        let x = Tensor::elementary(&[&a.basis_element(1), &a.basis_element(2)]);
        let y = x.mul_leg_left(1, &a.basis_element(1)).unwrap();
        let expected = Tensor::elementary(&[&a.basis_element(1), &a.basis_element(0)]);
        assert!(y.is_close(&expected, 1e-14));
    }
}
