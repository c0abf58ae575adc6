//! Dense complex linear-algebra substrate: factorizations, joint-kernel
//! solvers for matrix-valued linear constraints, and polynomial root bounds.
//!
//! Everything here is a pure function of its inputs; values are immutable
//! after construction and safe to share across threads. Residual gates
//! throughout the crate are scale-free: `residual <= tol * (1 + norms)`.

use ndarray::linalg::kron;
use ndarray::prelude::*;
use ndarray::concatenate;
use ndarray_linalg::{Eig, Eigh, JobSvd, SVDDC, QR, UPLO};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{GammaError, Result};

/// Dense complex matrix, the universal carrier for every operator in the crate.
pub type CMatrix = Array2<Complex64>;

pub fn eye(n: usize) -> CMatrix {
    CMatrix::eye(n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros((rows, cols))
}

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator norm = largest singular value. Falls back to the Hermitian
/// eigenproblem of M*M when the SVD driver fails to converge.
pub fn op_norm(m: &CMatrix) -> f64 {
    if let Ok((_, s, _)) = m.svddc(JobSvd::None) {
        return s.first().copied().unwrap_or(0.0);
    }
    let gram = adjoint(m).dot(m);
    let (vals, _) = hermitize(&gram)
        .eigh(UPLO::Lower)
        .expect("eigh of a finite Gram matrix");
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &adjoint(m)).mapv(|z| z * 0.5)
}

/// `‖M - M*‖_F <= tol * (1 + ‖M‖_F)`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    fro_norm(&(m - &adjoint(m))) <= tol * (1.0 + fro_norm(m))
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    fro_norm(&(a.dot(b) - b.dot(a)))
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as columns, so `m = V diag(vals) V*`.
///
/// The backend hands the row-major buffer to column-major LAPACK, which
/// therefore diagonalizes the transpose; for a Hermitian matrix that is the
/// conjugate, so the returned vectors must be conjugated back.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    let (vals, vecs) = m.eigh(UPLO::Lower).map_err(|_| GammaError::Linalg("eigh"))?;
    Ok((vals, vecs.mapv(|z| z.conj())))
}

/// All eigenvalues of a general square matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Array1<Complex64>> {
    let (vals, _) = m.eig().map_err(|_| GammaError::Linalg("eig"))?;
    Ok(vals)
}

/// Full SVD `(U, sigma, V^H)` via the divide-and-conquer driver.
pub fn svd_full(m: &CMatrix) -> Result<(CMatrix, Array1<f64>, CMatrix)> {
    let (u, s, vh) = m
        .svddc(JobSvd::All)
        .map_err(|_| GammaError::Linalg("svd"))?;
    Ok((u.expect("requested U"), s, vh.expect("requested V^H")))
}

/// Hermitian PSD square root. Negative eigenvalues in `[-tol, 0)` are
/// clamped to zero; anything below `-tol` is an error.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let dev = fro_norm(&(m - &adjoint(m)));
    if dev > tol * (1.0 + fro_norm(m)) {
        return Err(GammaError::NotHermitian { residual: dev });
    }
    let h = hermitize(m);
    let (vals, vecs) = hermitian_eigen(&h)?;
    if let Some(&lo) = vals.first() {
        if lo < -tol {
            return Err(GammaError::NegativeEigenvalue { value: lo });
        }
    }
    let sq = Array1::from_iter(vals.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    let scaled = &vecs * &sq; // scales column j by sqrt(lambda_j)
    Ok(hermitize(&scaled.dot(&adjoint(&vecs))))
}

/// Moore-Penrose pseudoinverse; singular values below `rank_tol * sigma_max`
/// are treated as zero. The zero matrix maps to the zero matrix.
pub fn pinv(m: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let (rows, cols) = m.dim();
    let (u, s, vh) = svd_full(m)?;
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(zeros(cols, rows));
    }
    let cut = rank_tol * smax;
    let mut sigma_plus = zeros(cols, rows);
    for (i, &sv) in s.iter().enumerate() {
        if sv > cut {
            sigma_plus[(i, i)] = Complex64::new(1.0 / sv, 0.0);
        }
    }
    Ok(adjoint(&vh).dot(&sigma_plus).dot(&adjoint(&u)))
}

/// Numerical rank with relative cut `rel_tol * sigma_max`.
pub fn matrix_rank(m: &CMatrix, rel_tol: f64) -> Result<usize> {
    let (_, s, _) = m.svddc(JobSvd::None).map_err(|_| GammaError::Linalg("svd"))?;
    let smax = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&sv| sv > rel_tol * smax).count())
}

/// Orthonormal basis of the null space (right singular vectors whose
/// singular value is at most `rel_tol * sigma_max`).
pub fn null_space(m: &CMatrix, rel_tol: f64) -> Result<Vec<Array1<Complex64>>> {
    let cols = m.ncols();
    let (_, s, vh) = m.svddc(JobSvd::All).map_err(|_| GammaError::Linalg("svd"))?;
    let vh = vh.expect("requested V^H");
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&sv| sv > rel_tol * smax).count()
    };
    let mut basis = Vec::with_capacity(cols - rank);
    for i in rank..cols {
        basis.push(vh.row(i).mapv(|z| z.conj()));
    }
    Ok(basis)
}

/// Orthonormal basis of the column space, as the columns of the returned matrix.
pub fn column_space(m: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let (u, s, _) = m.svddc(JobSvd::All).map_err(|_| GammaError::Linalg("svd"))?;
    let u = u.expect("requested U");
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&sv| sv > rel_tol * smax).count()
    };
    Ok(u.slice(s![.., ..rank]).to_owned())
}

/// Row-major vectorization.
pub fn vec_row(m: &CMatrix) -> Array1<Complex64> {
    Array1::from_iter(m.iter().cloned())
}

pub fn unvec_row(v: ArrayView1<Complex64>, rows: usize, cols: usize) -> CMatrix {
    Array2::from_shape_vec((rows, cols), v.to_vec()).expect("length matches shape")
}

/// Hilbert-Schmidt inner product `tr(A* B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// One summand of a linear matrix map `A -> sign * L A R`.
#[derive(Clone, Debug)]
pub struct ConstraintTerm {
    pub left: CMatrix,
    pub right: CMatrix,
    pub sign: f64,
}

/// A linear map `A -> sum_k sign_k * L_k A R_k` used as one homogeneous
/// constraint on square matrices.
#[derive(Clone, Debug)]
pub struct MatrixMapConstraint {
    pub terms: Vec<ConstraintTerm>,
}

impl MatrixMapConstraint {
    pub fn new(terms: Vec<ConstraintTerm>) -> Self {
        Self { terms }
    }

    /// The map `A -> L1 A R1 - L2 A R2`, the shape every relation in this
    /// crate takes.
    pub fn difference(l1: CMatrix, r1: CMatrix, l2: CMatrix, r2: CMatrix) -> Self {
        Self::new(vec![
            ConstraintTerm { left: l1, right: r1, sign: 1.0 },
            ConstraintTerm { left: l2, right: r2, sign: -1.0 },
        ])
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut out = zeros(n, a.ncols());
        for t in &self.terms {
            let prod = t.left.dot(a).dot(&t.right);
            out = out + prod.mapv(|z| z * t.sign);
        }
        out
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        for t in &self.terms {
            if t.left.dim() != (n, n) || t.right.dim() != (n, n) {
                return Err(GammaError::DimensionMismatch(format!(
                    "constraint term has shapes {:?}, {:?}; expected ({n}, {n})",
                    t.left.dim(),
                    t.right.dim()
                )));
            }
        }
        Ok(())
    }

    /// Matricization using the identity `vec(L A R) = (L ⊗ Rᵀ) vec(A)` for
    /// row-major vec.
    pub fn matricized(&self, n: usize) -> Result<CMatrix> {
        self.check_dims(n)?;
        let mut out = zeros(n * n, n * n);
        for t in &self.terms {
            let k = kron(&t.left, &t.right.t().to_owned());
            out = out + k.mapv(|z| z * t.sign);
        }
        Ok(out)
    }
}

/// Hilbert-Schmidt-orthonormal basis of the joint kernel of a family of
/// matrix-map constraints on n-by-n matrices. Singular values below
/// `tol * sigma_max` of the stacked matricization define the null space.
pub fn joint_kernel(
    constraints: &[MatrixMapConstraint],
    n: usize,
    tol: f64,
) -> Result<Vec<CMatrix>> {
    if n == 0 {
        return Err(GammaError::DimensionMismatch("n must be >= 1".into()));
    }
    if constraints.is_empty() {
        // No constraints: the kernel is everything, in matrix-unit order.
        let mut basis = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = zeros(n, n);
                e[(i, j)] = Complex64::new(1.0, 0.0);
                basis.push(e);
            }
        }
        return Ok(basis);
    }
    let blocks: Vec<CMatrix> = constraints
        .iter()
        .map(|c| c.matricized(n))
        .collect::<Result<_>>()?;
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let stacked = concatenate(Axis(0), &views).expect("uniform widths");
    let null = null_space(&stacked, tol)?;
    Ok(null.iter().map(|v| unvec_row(v.view(), n, n)).collect())
}

/// Roots of the monic polynomial `z^k + c_{k-1} z^{k-1} + ... + c_0`, with
/// coefficients supplied in the order `(c_{k-1}, ..., c_0)`, computed as
/// companion-matrix eigenvalues.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = coeffs.len();
    if k == 0 {
        return Err(GammaError::EmptyCoefficients);
    }
    let mut companion = zeros(k, k);
    for i in 1..k {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..k {
        // coeffs[k - 1 - i] is c_i, the coefficient of z^i
        companion[(i, k - 1)] = -coeffs[k - 1 - i];
    }
    let vals = eigenvalues(&companion)?;
    Ok(vals.to_vec())
}

/// Largest root modulus of the monic polynomial described by `coeffs`.
pub fn poly_roots_max_modulus(coeffs: &[Complex64]) -> Result<f64> {
    let roots = poly_roots(coeffs)?;
    Ok(roots.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn offdiag_fro(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for ((i, j), z) in m.indexed_iter() {
        if i != j {
            s += z.norm_sqr();
        }
    }
    s.sqrt()
}

fn random_hermitian_combo(mats: &[CMatrix], rng: &mut ChaCha20Rng) -> CMatrix {
    let n = mats[0].nrows();
    let mut c = zeros(n, n);
    for m in mats {
        let re_part = hermitize(m);
        let im_part = (m - &adjoint(m)).mapv(|z| z * Complex64::new(0.0, -0.5));
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c = c + re_part.mapv(|z| z * a) + im_part.mapv(|z| z * b);
    }
    hermitize(&c)
}

fn max_offdiag_residual(mats: &[CMatrix], u: &CMatrix) -> f64 {
    let ua = adjoint(u);
    mats.iter()
        .map(|m| offdiag_fro(&ua.dot(m).dot(u)) / (1.0 + fro_norm(m)))
        .fold(0.0, f64::max)
}

fn simdiag_attempt(
    mats: &[CMatrix],
    rel_tol: f64,
    depth: usize,
    rng: &mut ChaCha20Rng,
) -> Result<CMatrix> {
    let n = mats[0].nrows();
    if n == 1 {
        return Ok(eye(1));
    }
    let c = random_hermitian_combo(mats, rng);
    let (vals, mut u) = hermitian_eigen(&c)?;
    if max_offdiag_residual(mats, &u) <= rel_tol || depth == 0 {
        return Ok(u);
    }
    // Refine inside clusters of equal combo-eigenvalues.
    let cluster_tol = 1e-7 * (1.0 + vals.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let uc = u.slice(s![.., start..end]).to_owned();
            let sub: Vec<CMatrix> = mats
                .iter()
                .map(|m| adjoint(&uc).dot(m).dot(&uc))
                .collect();
            if max_offdiag_residual(&sub, &eye(end - start)) > rel_tol {
                let w = simdiag_attempt(&sub, rel_tol, depth - 1, rng)?;
                let patched = uc.dot(&w);
                u.slice_mut(s![.., start..end]).assign(&patched);
            }
        }
        start = end;
    }
    Ok(u)
}

/// Simultaneous unitary diagonalization of pairwise commuting normal
/// matrices: returns the common eigenvector basis and, per input matrix,
/// the diagonal of its conjugation into that basis.
///
/// Diagonalizes a random real-coefficient combination of the Hermitian and
/// anti-Hermitian parts, refining inside degenerate clusters; retries with
/// fresh coefficients before reporting failure.
pub fn simultaneous_diagonalize(
    mats: &[CMatrix],
    tol: f64,
) -> Result<(CMatrix, Vec<Vec<Complex64>>)> {
    if mats.is_empty() {
        return Err(GammaError::Invalid("empty matrix family".into()));
    }
    let n = mats[0].nrows();
    for m in mats {
        if m.dim() != (n, n) {
            return Err(GammaError::DimensionMismatch(format!(
                "expected ({n}, {n}), got {:?}",
                m.dim()
            )));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x1D1A6);
    let mut best = f64::INFINITY;
    let mut best_u = eye(n);
    for _ in 0..4 {
        let u = simdiag_attempt(mats, tol, 3, &mut rng)?;
        let res = max_offdiag_residual(mats, &u);
        if res < best {
            best = res;
            best_u = u;
        }
        if best <= tol {
            break;
        }
    }
    if best > tol {
        return Err(GammaError::JointDiagonalizationFailure { residual: best });
    }
    let ua = adjoint(&best_u);
    let diags = mats
        .iter()
        .map(|m| {
            let rot = ua.dot(m).dot(&best_u);
            (0..n).map(|i| rot[(i, i)]).collect()
        })
        .collect();
    Ok((best_u, diags))
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_complex_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = zeros(rows, cols);
    for z in m.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    m
}

/// Haar-distributed random unitary via phase-fixed QR of a Gaussian matrix.
pub fn haar_unitary(rng: &mut ChaCha20Rng, n: usize) -> CMatrix {
    let g = random_complex_matrix(rng, n, n);
    let (q, r) = g.qr().expect("qr of gaussian matrix");
    let phases = Array1::from_iter((0..n).map(|i| {
        let z = r[(i, i)];
        if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }));
    &q * &phases
}

/// Random matrix rescaled to the requested operator norm.
pub fn random_contraction(rng: &mut ChaCha20Rng, n: usize, radius: f64) -> CMatrix {
    let g = random_complex_matrix(rng, n, n);
    let nm = op_norm(&g);
    if nm == 0.0 {
        return g;
    }
    g.mapv(|z| z * (radius / nm))
}

/// Default null-space cut for matricized constraint systems.
pub fn default_null_tol(n: usize) -> f64 {
    (n * n) as f64 * f64::EPSILON * 64.0
}
