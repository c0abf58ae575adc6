//! The Toeplitz space cut out by the Brown-Halmos relations, the completely
//! positive Toeplitz projection, the commutant correspondence `rho(Y) = J*YJ`
//! with its inverse symbol map, and the multiplicative lift of the source
//! commutant into the extension commutant.
//!
//! Matricized operators here are n²-by-n²; memory is O(n⁴).

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::defaults;
use crate::dilation::CanonicalExtension;
use crate::error::{GammaError, Result};
use crate::gamma::GammaTuple;
use ndarray_linalg::Inverse;

use crate::matrixkit::{
    adjoint, default_null_tol, eye, fro_norm, hermitian_eigen, hermitize, hs_inner, joint_kernel,
    matrix_rank, op_norm, pinv, unvec_row, vec_row, zeros, CMatrix, MatrixMapConstraint,
};
use crate::report::VerificationReport;

/// Hilbert-Schmidt-orthonormal basis of a space of n-by-n matrices.
#[derive(Clone, Debug)]
pub struct ToeplitzBasis {
    pub basis: Vec<CMatrix>,
}

impl ToeplitzBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection of `a` onto the span of the basis.
    pub fn project(&self, a: &CMatrix) -> CMatrix {
        let mut out = zeros(a.nrows(), a.ncols());
        for b in &self.basis {
            let coeff = hs_inner(b, a);
            out = out + b.mapv(|z| z * coeff);
        }
        out
    }
}

/// HS-orthonormal basis of the commutant of a matrix family.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub basis: Vec<CMatrix>,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Random complex combination of the basis, deterministic in `rng`.
    pub fn sample(&self, rng: &mut ChaCha20Rng) -> CMatrix {
        let n = self.basis[0].nrows();
        let mut out = zeros(n, n);
        for b in &self.basis {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out = out + b.mapv(|z| z * Complex64::new(re, im));
        }
        out
    }
}

/// The Brown-Halmos relations of a tuple as homogeneous constraints:
/// `S_i* A P = A S_{d-i}` for each i and `P* A P = A`.
pub fn brown_halmos_constraints(t: &GammaTuple) -> Vec<MatrixMapConstraint> {
    let d = t.d();
    let n = t.n();
    let p = t.p();
    let mut constraints = Vec::with_capacity(d);
    for i in 1..d {
        constraints.push(MatrixMapConstraint::difference(
            adjoint(&t.s()[i - 1]),
            p.clone(),
            eye(n),
            t.s()[d - 1 - i].clone(),
        ));
    }
    constraints.push(MatrixMapConstraint::difference(
        adjoint(p),
        p.clone(),
        eye(n),
        eye(n),
    ));
    constraints
}

/// Largest Frobenius residual of `a` against the Brown-Halmos relations.
pub fn bh_residual(t: &GammaTuple, a: &CMatrix) -> f64 {
    brown_halmos_constraints(t)
        .iter()
        .map(|c| fro_norm(&c.apply(a)))
        .fold(0.0, f64::max)
}

/// HS-orthonormal basis of the space of operators satisfying all
/// Brown-Halmos relations of the tuple.
pub fn toeplitz_space(t: &GammaTuple, tol: f64) -> ToeplitzBasis {
    let basis = joint_kernel(&brown_halmos_constraints(t), t.n(), tol)
        .expect("constraints are square by construction");
    ToeplitzBasis { basis }
}

/// Fixed points of `A -> P* A P` alone.
pub fn toeplitz_space_p_only(p: &CMatrix, tol: f64) -> ToeplitzBasis {
    let n = p.nrows();
    let constraint =
        MatrixMapConstraint::difference(adjoint(p), p.clone(), eye(n), eye(n));
    let basis = joint_kernel(&[constraint], n, tol).expect("square constraint");
    ToeplitzBasis { basis }
}

/// The idempotent completely positive projection onto the fixed points of
/// `A -> P* A P`, realized as the spectral projection of the matricized
/// conjugation at eigenvalue one — equivalently the Cesaro limit of its
/// powers, which exists because the conjugation is a norm contraction.
#[derive(Clone, Debug)]
pub struct ToeplitzProjection {
    /// Matricization of the projection (n²-by-n², row-major vec convention).
    pub phi_mat: CMatrix,
    /// Distance from 1 to the nearest other eigenvalue of the conjugation.
    pub spectral_gap: f64,
    /// The contraction the projection was built from.
    pub p: CMatrix,
    n: usize,
}

impl ToeplitzProjection {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let v = vec_row(x);
        let w = self.phi_mat.dot(&v);
        unvec_row(w.view(), self.n, self.n)
    }

    /// Rank of the projection = dimension of its range.
    pub fn rank(&self) -> Result<usize> {
        matrix_rank(&self.phi_mat, defaults::PINV_RANK_TOL)
    }

    /// Choi matrix: block (i, j) holds the image of the matrix unit E_ij.
    /// Positive semidefiniteness of this matrix is complete positivity.
    pub fn choi(&self) -> CMatrix {
        let n = self.n;
        let mut choi = zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = zeros(n, n);
                e[(i, j)] = Complex64::new(1.0, 0.0);
                let img = self.apply(&e);
                for r in 0..n {
                    for c in 0..n {
                        choi[(i * n + r, j * n + c)] = img[(r, c)];
                    }
                }
            }
        }
        choi
    }
}

/// Builds the Toeplitz projection for a contraction P. Fails with
/// `GapTooSmall` when another eigenvalue of the conjugation sits within
/// `tol` of 1, which would make the projection ill-conditioned.
pub fn toeplitz_projection(p: &CMatrix, tol: f64) -> Result<ToeplitzProjection> {
    let n = p.nrows();
    if p.dim() != (n, n) || n == 0 {
        return Err(GammaError::DimensionMismatch(format!(
            "P must be square and non-empty, got {:?}",
            p.dim()
        )));
    }
    let nm = op_norm(p);
    if nm > 1.0 + defaults::GATE_TOL {
        return Err(GammaError::NotContractive { norm: nm });
    }
    // vec(P* A P) = (P* ⊗ Pᵀ) vec(A) in the row-major convention.
    let psi = ndarray::linalg::kron(&adjoint(p), &p.t().to_owned());
    let m = &psi - &eye(n * n);
    let cut = default_null_tol(n);
    let fixed = crate::matrixkit::null_space(&m, cut)?;
    let k = fixed.len();

    // Eigenvalues of the conjugation are the pairwise products of the
    // eigenvalues of P with conjugated eigenvalues of P; the k closest to 1
    // belong to the fixed space (they are semisimple for a contraction).
    let evals = crate::matrixkit::eigenvalues(p)?;
    let mut dists: Vec<f64> = Vec::with_capacity(n * n);
    for a in evals.iter() {
        for b in evals.iter() {
            let mu = a * b.conj();
            dists.push((Complex64::new(1.0, 0.0) - mu).norm());
        }
    }
    dists.sort_by(|x, y| x.partial_cmp(y).expect("finite distances"));
    let spectral_gap = if k < dists.len() { dists[k] } else { 2.0 };
    if spectral_gap < tol {
        return Err(GammaError::GapTooSmall { gap: spectral_gap });
    }

    let phi_mat = if k == 0 {
        zeros(n * n, n * n)
    } else {
        // Projection onto ker(Psi - I) along Ran(Psi - I).
        let range = crate::matrixkit::column_space(&m, cut)?;
        let mut t_mat = zeros(n * n, n * n);
        for (col, v) in fixed.iter().enumerate() {
            t_mat.column_mut(col).assign(v);
        }
        for col in 0..range.ncols() {
            t_mat.column_mut(k + col).assign(&range.column(col));
        }
        let t_inv = t_mat
            .inv()
            .map_err(|_| GammaError::GapTooSmall { gap: spectral_gap })?;
        let mut k_mat = zeros(n * n, k);
        for (col, v) in fixed.iter().enumerate() {
            k_mat.column_mut(col).assign(v);
        }
        k_mat.dot(&t_inv.slice(s![..k, ..]))
    };
    Ok(ToeplitzProjection {
        phi_mat,
        spectral_gap,
        p: p.clone(),
        n,
    })
}

/// The two-sided multiplicativity identities of an idempotent completely
/// positive, completely contractive map, sampled on random pairs, plus the
/// bimodule property over operators that slide through the conjugation.
pub fn choi_effros_check(
    phi: &ToeplitzProjection,
    trials: usize,
    seed: u64,
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    let n = phi.n();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst_pair = 0.0f64;
    for _ in 0..trials {
        let x = crate::matrixkit::random_complex_matrix(&mut rng, n, n);
        let y = crate::matrixkit::random_complex_matrix(&mut rng, n, n);
        let a = phi.apply(&phi.apply(&x).dot(&y));
        let b = phi.apply(&x.dot(&phi.apply(&y)));
        let c = phi.apply(&phi.apply(&x).dot(&phi.apply(&y)));
        let scale = 1.0 + fro_norm(&x) * fro_norm(&y);
        let res = fro_norm(&(&a - &b)).max(fro_norm(&(&a - &c))) / scale;
        worst_pair = worst_pair.max(res);
    }
    report.record(
        "two-sided multiplicativity",
        worst_pair <= tol,
        worst_pair,
        format!("{trials} random pairs"),
    );
    // Bimodule property with powers of P on the matching sides and scalars.
    let mut worst_mod = 0.0f64;
    let pa = adjoint(&phi.p);
    let mut left = pa.clone();
    let mut right = phi.p.clone();
    for _ in 0..2 {
        let x = crate::matrixkit::random_complex_matrix(&mut rng, n, n);
        let lhs = phi.apply(&left.dot(&x).dot(&right));
        let rhs = left.dot(&phi.apply(&x)).dot(&right);
        let scale = 1.0 + fro_norm(&x);
        worst_mod = worst_mod.max(fro_norm(&(&lhs - &rhs)) / scale);
        left = left.dot(&pa);
        right = right.dot(&phi.p);
    }
    let alpha = Complex64::new(0.7, -0.2);
    let beta = Complex64::new(-0.3, 0.5);
    let x = crate::matrixkit::random_complex_matrix(&mut rng, n, n);
    let lhs = phi.apply(&x.mapv(|z| z * alpha * beta));
    let rhs = phi.apply(&x).mapv(|z| z * alpha * beta);
    worst_mod = worst_mod.max(fro_norm(&(&lhs - &rhs)) / (1.0 + fro_norm(&x)));
    report.record(
        "bimodule property",
        worst_mod <= tol,
        worst_mod,
        "powers of P and scalars",
    );
    report
}

/// HS-orthonormal basis of the joint commutant of a matrix family.
pub fn commutant(mats: &[CMatrix], tol: f64) -> Result<CommutantBasis> {
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
    let constraints: Vec<MatrixMapConstraint> = mats
        .iter()
        .map(|m| MatrixMapConstraint::difference(m.clone(), eye(n), eye(n), m.clone()))
        .collect();
    let basis = joint_kernel(&constraints, n, tol)?;
    Ok(CommutantBasis { basis })
}

fn commutant_residual(x: &CMatrix, mats: &[CMatrix]) -> f64 {
    let xn = 1.0 + op_norm(x);
    mats.iter()
        .map(|m| {
            crate::matrixkit::commutator_norm(x, m) / (xn * (1.0 + op_norm(m)))
        })
        .fold(0.0, f64::max)
}

/// Compression `J* Y J` of a commutant element of the extension; the image
/// satisfies the Brown-Halmos relations of the source tuple.
pub fn rho(ext: &CanonicalExtension, y: &CMatrix, tol: f64) -> Result<CMatrix> {
    let members = ext.members();
    let res = commutant_residual(y, &members);
    if res > tol {
        return Err(GammaError::NotInCommutant { residual: res });
    }
    Ok(adjoint(&ext.j).dot(y).dot(&ext.j))
}

/// The inverse of `rho`: the unique extension-commutant element `Y` with
/// `J* Y J = A`, solved in commutant-basis coordinates. Norm is preserved.
pub fn toeplitz_symbol(ext: &CanonicalExtension, a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let res = bh_residual(&ext.source, a);
    if res > tol * (1.0 + fro_norm(a)) {
        return Err(GammaError::NotToeplitz { residual: res });
    }
    let r = ext.rank;
    let cb = commutant(&ext.members(), default_null_tol(r))?;
    let n = ext.source.n();
    let m = cb.dim();
    let mut g = zeros(n * n, m);
    for (col, cbe) in cb.basis.iter().enumerate() {
        let img = adjoint(&ext.j).dot(cbe).dot(&ext.j);
        g.column_mut(col).assign(&vec_row(&img));
    }
    let coeffs = pinv(&g, defaults::PINV_RANK_TOL)?.dot(&vec_row(a));
    let mut y = zeros(r, r);
    for (cbe, &coef) in cb.basis.iter().zip(coeffs.iter()) {
        y = y + cbe.mapv(|z| z * coef);
    }
    let recon = adjoint(&ext.j).dot(&y).dot(&ext.j);
    let res = fro_norm(&(&recon - a));
    if res > tol * (1.0 + fro_norm(a)) {
        return Err(GammaError::Inconsistent { residual: res });
    }
    Ok(y)
}

/// The unital multiplicative lift of the source commutant into the extension
/// commutant, realized through the symbol of `Q X`; the result is the unique
/// `Y` with `Y J = J X`.
pub fn theta(ext: &CanonicalExtension, x: &CMatrix, tol: f64) -> Result<CMatrix> {
    let res = commutant_residual(x, &ext.source.members());
    if res > tol {
        return Err(GammaError::NotInCommutant { residual: res });
    }
    let qx = ext.q.dot(x);
    let y = match toeplitz_symbol(ext, &qx, tol) {
        Ok(y) => y,
        Err(GammaError::NotToeplitz { residual }) => {
            return Err(GammaError::Inconsistent { residual })
        }
        Err(e) => return Err(e),
    };
    let res = fro_norm(&(y.dot(&ext.j) - ext.j.dot(x)));
    if res > tol * (1.0 + op_norm(x)) * (1.0 + fro_norm(&ext.j)) {
        return Err(GammaError::Inconsistent { residual: res });
    }
    Ok(y)
}

fn block2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let m = a.ncols();
    let mut out = zeros(2 * n, 2 * m);
    out.slice_mut(s![..n, ..m]).assign(a);
    out.slice_mut(s![..n, m..]).assign(b);
    out.slice_mut(s![n.., ..m]).assign(c);
    out.slice_mut(s![n.., m..]).assign(d);
    out
}

/// Full check of the commutant-Toeplitz correspondence on one tuple:
/// dimension equality, spanning, norm preservation at matrix levels one and
/// two (blocks gated at `10 * tol`), and the round trip through the symbol.
pub fn verify_symbol_correspondence(t: &GammaTuple, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let ext = match crate::dilation::canonical_extension(t, defaults::q_rank_tol(t.n())) {
        Ok(ext) => ext,
        Err(GammaError::PureTuple) => {
            report.skip("correspondence", "pure tuple: hypothesis not met");
            return report;
        }
        Err(e) => {
            report.record("extension", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    let tb = toeplitz_space(t, default_null_tol(t.n()));
    let cb = match commutant(&ext.members(), default_null_tol(ext.rank)) {
        Ok(cb) => cb,
        Err(e) => {
            report.record("commutant", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    report.record(
        "dimension equality",
        cb.dim() == tb.dim(),
        (cb.dim() as f64 - tb.dim() as f64).abs(),
        format!("commutant {}, toeplitz {}", cb.dim(), tb.dim()),
    );
    // rho maps the commutant basis onto a spanning family of the space.
    let n = t.n();
    let mut g = zeros(n * n, cb.dim().max(1));
    for (col, cbe) in cb.basis.iter().enumerate() {
        let img = adjoint(&ext.j).dot(cbe).dot(&ext.j);
        g.column_mut(col).assign(&vec_row(&img));
    }
    match matrix_rank(&g, 1e-10) {
        Ok(rank) => report.record(
            "compression spans the space",
            rank == tb.dim(),
            (rank as f64 - tb.dim() as f64).abs(),
            format!("rank {rank}"),
        ),
        Err(e) => report.record("compression spans the space", false, f64::MAX, format!("{e}")),
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0DE5EED);
    let mut worst_iso = 0.0f64;
    for _ in 0..20 {
        let y = cb.sample(&mut rng);
        let img = adjoint(&ext.j).dot(&y).dot(&ext.j);
        let dev = (op_norm(&img) - op_norm(&y)).abs();
        worst_iso = worst_iso.max(dev);
    }
    report.record(
        "norm preservation",
        worst_iso <= tol,
        worst_iso,
        "20 random commutant samples",
    );
    let mut worst_amp = 0.0f64;
    for _ in 0..5 {
        let y11 = cb.sample(&mut rng);
        let y12 = cb.sample(&mut rng);
        let y21 = cb.sample(&mut rng);
        let y22 = cb.sample(&mut rng);
        let ja = adjoint(&ext.j);
        let big_y = block2(&y11, &y12, &y21, &y22);
        let big_a = block2(
            &ja.dot(&y11).dot(&ext.j),
            &ja.dot(&y12).dot(&ext.j),
            &ja.dot(&y21).dot(&ext.j),
            &ja.dot(&y22).dot(&ext.j),
        );
        let dev = (op_norm(&big_a) - op_norm(&big_y)).abs();
        worst_amp = worst_amp.max(dev);
    }
    report.record(
        "two-level norm preservation",
        worst_amp <= 10.0 * tol,
        worst_amp,
        "5 random 2x2 amplifications",
    );
    let mut worst_rt = 0.0f64;
    let mut rt_ok = true;
    for cbe in &cb.basis {
        let img = match rho(&ext, cbe, defaults::GATE_TOL) {
            Ok(img) => img,
            Err(e) => {
                report.record("round trip", false, f64::MAX, format!("{e}"));
                rt_ok = false;
                break;
            }
        };
        match toeplitz_symbol(&ext, &img, tol.max(1e-9) * 10.0) {
            Ok(back) => worst_rt = worst_rt.max(fro_norm(&(&back - cbe))),
            Err(e) => {
                report.record("round trip", false, f64::MAX, format!("{e}"));
                rt_ok = false;
                break;
            }
        }
    }
    if rt_ok {
        report.record(
            "round trip",
            worst_rt <= tol,
            worst_rt,
            "symbol after compression returns each basis element",
        );
    }
    report
}

/// Full check of the projection for one contraction: idempotence and Choi
/// positivity at `tol / 10`, range and normalization at `tol`, plus the
/// sampled multiplicativity identities.
pub fn verify_projection(p: &CMatrix, trials: usize, seed: u64, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let phi = match toeplitz_projection(p, 1e-9) {
        Ok(phi) => phi,
        Err(e) => {
            report.record("projection", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    let idem = op_norm(&(phi.phi_mat.dot(&phi.phi_mat) - &phi.phi_mat));
    report.record("idempotent", idem <= tol / 10.0, idem, "");
    let choi = hermitize(&phi.choi());
    let lam_min = match hermitian_eigen(&choi) {
        Ok((vals, _)) => vals.first().copied().unwrap_or(0.0),
        Err(e) => {
            report.record("choi positivity", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    report.record(
        "choi positivity",
        lam_min >= -tol / 10.0,
        (-lam_min).max(0.0),
        format!("lambda_min {lam_min:.3e}"),
    );
    let fixed = toeplitz_space_p_only(p, default_null_tol(p.nrows()));
    let mut worst_fix = 0.0f64;
    for b in &fixed.basis {
        worst_fix = worst_fix.max(fro_norm(&(phi.apply(b) - b)));
    }
    let rank = phi.rank().unwrap_or(usize::MAX);
    report.record(
        "range equals the fixed space",
        worst_fix <= tol && rank == fixed.dim(),
        worst_fix,
        format!("rank {rank}, fixed dim {}", fixed.dim()),
    );
    match crate::asymptotics::compute_q_of_p(p, defaults::CONV_TOL, defaults::MAX_DOUBLINGS) {
        Ok(al) => {
            let res = fro_norm(&(phi.apply(&eye(phi.n())) - &al.q));
            report.record("identity maps to the asymptotic limit", res <= tol, res, "");
        }
        Err(e) => report.record(
            "identity maps to the asymptotic limit",
            false,
            f64::MAX,
            format!("{e}"),
        ),
    }
    report.merge(choi_effros_check(&phi, trials, seed, tol));
    report
}
