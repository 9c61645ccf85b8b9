//! Dense complex linear algebra used throughout the crate: numerical rank,
//! null spaces, minimum-norm solves and a few Hermitian matrix functions.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Relative singular-value cutoff: `σ ≤ n·σ_max·RANK_EPS` counts as zero.
pub const RANK_EPS: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn zero() -> C64 {
    Complex::new(0.0, 0.0)
}

pub fn one() -> C64 {
    Complex::new(1.0, 0.0)
}

/// Singular value decomposition of `m`. Wide matrices are padded with zero
/// rows so that the right singular vectors always form a full basis.
pub struct FullSvd {
    pub(crate) u: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub(crate) v: DMatrix<C64>,
    rows: usize,
    cols: usize,
}

impl FullSvd {
    pub fn new(m: &DMatrix<C64>) -> Self {
        let (rows, cols) = m.shape();
        if rows == 0 || cols == 0 {
            return FullSvd {
                u: DMatrix::zeros(rows, 0),
                singular_values: vec![],
                v: DMatrix::identity(cols, cols),
                rows,
                cols,
            };
        }
        let padded = if rows < cols {
            let mut p = DMatrix::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(m);
            p
        } else {
            m.clone()
        };
        let (u, sv, v) = checked_svd(&padded);
        let svd = Svd { singular_values: sv };
        let k = svd.singular_values.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let singular_values = order.iter().map(|&j| svd.singular_values[j]).collect();
        let u = DMatrix::from_fn(rows, k, |i, j| u[(i, order[j])]);
        let v = DMatrix::from_fn(cols, k, |i, j| v[(i, order[j])]);
        FullSvd { u, singular_values, v, rows, cols }
    }

    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values, self.rows.max(self.cols))
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Orthonormal basis (columns) of the right null space.
    pub fn null_space(&self) -> DMatrix<C64> {
        let r = self.rank();
        self.v.columns(r, self.cols - r).into_owned()
    }

    /// Orthonormal basis (columns) of the column space.
    pub fn range(&self) -> DMatrix<C64> {
        self.u.columns(0, self.rank()).into_owned()
    }

    /// Moore–Penrose pseudo-inverse with the crate's rank cutoff.
    pub fn pseudo_inverse(&self) -> DMatrix<C64> {
        let r = self.rank();
        let mut out = DMatrix::zeros(self.cols, self.rows);
        for k in 0..r {
            let inv = c(1.0 / self.singular_values[k], 0.0);
            out += (self.v.column(k) * self.u.column(k).adjoint()) * inv;
        }
        out
    }
}

pub fn numerical_rank(singular_values: &[f64], n: usize) -> usize {
    let max = singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    let cutoff = n as f64 * max * RANK_EPS;
    singular_values.iter().filter(|&&s| s > cutoff).count()
}

pub fn rank(m: &DMatrix<C64>) -> usize {
    FullSvd::new(m).rank()
}

pub fn null_space(m: &DMatrix<C64>) -> DMatrix<C64> {
    FullSvd::new(m).null_space()
}

/// Orthonormal basis of the vectors `y` with `y* m = 0`.
pub fn left_null_space(m: &DMatrix<C64>) -> DMatrix<C64> {
    FullSvd::new(&m.adjoint()).null_space()
}

/// Intersection of two subspaces given by orthonormal column bases of the
/// same ambient space.
pub fn intersect(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    // v ∈ span(a) ∩ span(b)  ⇔  (1 - P_b) a y = 0
    let proj_b = b * b.adjoint();
    let residual = (DMatrix::identity(a.nrows(), a.nrows()) - proj_b) * a;
    let ker = null_space(&residual);
    orthonormalize(&(a * ker))
}

/// Orthonormal basis of the span of the columns.
pub fn orthonormalize(m: &DMatrix<C64>) -> DMatrix<C64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    FullSvd::new(m).range()
}

pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    checked_svd(m).1.iter().cloned().fold(0.0, f64::max)
}

pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    checked_svd(m).1.iter().sum()
}

struct Svd {
    singular_values: DVector<f64>,
}

/// The unitary DFT matrix times a diagonal of phases depending on `seed`.
fn mixing_unitary(n: usize, seed: usize) -> DMatrix<C64> {
    let w = 2.0 * std::f64::consts::PI / n as f64;
    let scale = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        let t = w * ((j * k) % n) as f64 + 0.7 * (seed * (k + 1)) as f64;
        c(t.cos() * scale, t.sin() * scale)
    })
}

fn svd_error(m: &DMatrix<C64>, u: &DMatrix<C64>, s: &DVector<f64>, v: &DMatrix<C64>) -> f64 {
    let k = s.len();
    let us = DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, j)] * s[j]);
    let recon = (&us * v.adjoint() - m).norm() / m.norm().max(f64::MIN_POSITIVE);
    let orth = (u.adjoint() * u - DMatrix::identity(k, k)).norm() + (v.adjoint() * v - DMatrix::identity(k, k)).norm();
    recon.max(orth)
}

/// Thin singular value decomposition `m = U diag(s) V*`, verified by its
/// backward error.
///
/// `(U, singular values, V)` of a thin SVD.
type SvdParts = (DMatrix<C64>, DVector<f64>, DMatrix<C64>);

/// The complex SVD in nalgebra occasionally returns a factorization that
/// does not reproduce its input (errors of order 1e-2 on some
/// rank-deficient matrices). Failed attempts are retried on `m Q` for fixed
/// unitaries `Q`, and `V` is rotated back.
fn checked_svd(m: &DMatrix<C64>) -> SvdParts {
    const ACCEPT: f64 = 1e-12;
    let n = m.ncols();
    let tol = ACCEPT * (m.nrows().max(n) as f64).sqrt();
    let mut best: Option<(f64, SvdParts)> = None;
    for attempt in 0..6 {
        let q = (attempt > 0).then(|| mixing_unitary(n, attempt));
        let input = match &q {
            Some(q) => m * q,
            None => m.clone(),
        };
        let svd = input.svd(true, true);
        let u = svd.u.expect("requested u");
        let mut v = svd.v_t.expect("requested v_t").adjoint();
        if let Some(q) = &q {
            v = q * v;
        }
        let err = svd_error(m, &u, &svd.singular_values, &v);
        if err <= tol {
            return (u, svd.singular_values, v);
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, (u, svd.singular_values, v)));
        }
    }
    let (err, out) = best.expect("at least one attempt");
    log::warn!("SVD of a {}x{n} matrix has backward error {err:.3e}", m.nrows());
    out
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues ascending).
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let n = m.nrows();
    let eig = checked_eigen(&sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

struct Eigen {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

/// `symmetric_eigen` with the same backward-error check and retries as
/// [`checked_svd`], rotating by `Q* h Q`.
fn checked_eigen(h: &DMatrix<C64>) -> Eigen {
    let n = h.nrows();
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * (n.max(1) as f64).sqrt();
    let mut best: Option<(f64, Eigen)> = None;
    for attempt in 0..6 {
        let q = (attempt > 0).then(|| mixing_unitary(n, attempt));
        let input = match &q {
            Some(q) => q.adjoint() * h * q,
            None => h.clone(),
        };
        let eig = input.symmetric_eigen();
        let vectors = match &q {
            Some(q) => q * &eig.eigenvectors,
            None => eig.eigenvectors,
        };
        let vd = DMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * eig.eigenvalues[j]);
        let err = ((&vd * vectors.adjoint() - h).norm() / scale)
            .max((vectors.adjoint() * &vectors - DMatrix::identity(n, n)).norm());
        let out = Eigen { eigenvalues: eig.eigenvalues, eigenvectors: vectors };
        if err <= tol {
            return out;
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, out));
        }
    }
    let (err, out) = best.expect("at least one attempt");
    log::warn!("eigendecomposition of a {n}x{n} matrix has backward error {err:.3e}");
    out
}

/// Square root of a positive semidefinite Hermitian matrix (negative
/// eigenvalues from round-off are clamped to zero).
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)));
    &vecs * DMatrix::from_diagonal(&d) * vecs.adjoint()
}

/// Lower Cholesky factor of a Hermitian positive definite matrix, or `None`
/// if a pivot is not strictly positive. (The complex `cholesky` in nalgebra
/// takes complex square roots and so accepts indefinite matrices.)
pub fn pd_cholesky(h: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let n = h.nrows();
    let mut l = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = c(djj, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix with nonzero diagonal.
pub fn lower_inverse(l: &DMatrix<C64>) -> DMatrix<C64> {
    let n = l.nrows();
    let mut inv = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = one() / l[(j, j)];
        for i in j + 1..n {
            let mut s = zero();
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

pub fn max_abs(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product of coordinate vectors in row-major leg order.
pub fn kron_vec(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        if *x == zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}
