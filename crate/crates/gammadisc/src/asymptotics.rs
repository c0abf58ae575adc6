//! The asymptotic limit Q of the powers `P*^n P^n`, purity detection, decay
//! profiles of the boundary defect, and the fundamental operators on the
//! defect space of P.

use num_complex::Complex64;

use crate::defaults;
use crate::error::{GammaError, Result};
use crate::gamma::GammaTuple;
use crate::matrixkit::{
    adjoint, eye, fro_norm, hermitian_eigen, hermitize, op_norm, zeros, CMatrix,
};
use crate::report::VerificationReport;

/// The limit of the decreasing sequence `P*^n P^n`, with iteration metadata.
#[derive(Clone, Debug)]
pub struct AsymptoticLimit {
    /// Hermitian PSD contraction, the fixed point of `A -> P* A P`.
    pub q: CMatrix,
    /// Number of power doublings performed.
    pub iterations: usize,
    /// Frobenius distance between the last two iterates.
    pub residual: f64,
}

// Project an almost-Hermitian iterate back to the exact-arithmetic cone
// 0 <= M <= I; float drift at unimodular spectrum otherwise compounds
// doubly-exponentially over the doublings. Also reports the raw largest
// eigenvalue: for a contraction it never exceeds 1 beyond rounding, so a
// real excess means ‖P‖ > 1 and the iteration diverges.
fn clamp01(m: &CMatrix) -> Result<(CMatrix, f64)> {
    let h = hermitize(m);
    let (vals, vecs) = hermitian_eigen(&h)?;
    let raw_max = vals.last().copied().unwrap_or(0.0);
    let clamped = ndarray::Array1::from_iter(
        vals.iter()
            .map(|&l| Complex64::new(l.clamp(0.0, 1.0), 0.0)),
    );
    let scaled = &vecs * &clamped;
    Ok((hermitize(&scaled.dot(&adjoint(&vecs))), raw_max))
}

/// Asymptotic limit of `P*^n P^n` by power doubling `B_{k+1} = B_k^2`,
/// stopping when consecutive iterates agree within `conv_tol` in Frobenius
/// norm. The limit is the same monotone strong limit; doubling converges in
/// logarithmically many steps.
pub fn compute_q_of_p(p: &CMatrix, conv_tol: f64, max_doublings: usize) -> Result<AsymptoticLimit> {
    let n = p.nrows();
    if p.dim() != (n, n) {
        return Err(GammaError::DimensionMismatch(format!(
            "P must be square, got {:?}",
            p.dim()
        )));
    }
    let mut b = p.clone();
    let (mut m_prev, raw_max) = clamp01(&adjoint(&b).dot(&b))?;
    if raw_max > 1.0 + 1e-6 {
        return Err(GammaError::NoConvergence {
            residual: raw_max - 1.0,
        });
    }
    let mut residual = f64::INFINITY;
    for k in 1..=max_doublings {
        b = b.dot(&b);
        let (m, raw_max) = clamp01(&adjoint(&b).dot(&b))?;
        if raw_max > 1.0 + 1e-6 {
            return Err(GammaError::NoConvergence {
                residual: raw_max - 1.0,
            });
        }
        residual = fro_norm(&(&m - &m_prev));
        // The sequence must stay monotone decreasing; a violation beyond
        // rounding slack means ‖P‖ > 1 and the iteration diverges.
        let diff = hermitize(&(&m_prev - &m));
        let (vals, _) = hermitian_eigen(&diff)?;
        let min_eig = vals.first().copied().unwrap_or(0.0);
        if min_eig < -1e-8 * (1.0 + fro_norm(&m_prev)) {
            return Err(GammaError::NoConvergence { residual });
        }
        m_prev = m;
        if residual < conv_tol {
            return Ok(AsymptoticLimit {
                q: m_prev,
                iterations: k,
                residual,
            });
        }
    }
    Err(GammaError::NoConvergence { residual })
}

/// Asymptotic limit for the tuple's P.
pub fn compute_q(t: &GammaTuple, conv_tol: f64, max_doublings: usize) -> Result<AsymptoticLimit> {
    compute_q_of_p(t.p(), conv_tol, max_doublings)
}

/// Asymptotic limit with the default convergence budget.
pub fn compute_q_default(t: &GammaTuple) -> Result<AsymptoticLimit> {
    compute_q(t, defaults::CONV_TOL, defaults::MAX_DOUBLINGS)
}

/// Numerical rank of an asymptotic limit: zero when the limit vanishes
/// below `pure_tol`, else the count of eigenvalues above `rank_tol * lambda_max`.
pub fn limit_rank(q: &CMatrix, rank_tol: f64, pure_tol: f64) -> Result<usize> {
    let (vals, _) = hermitian_eigen(&hermitize(q))?;
    let lmax = vals.last().copied().unwrap_or(0.0);
    if lmax <= pure_tol {
        return Ok(0);
    }
    Ok(vals.iter().filter(|&&l| l > rank_tol * lmax).count())
}

/// Purity: the powers of P vanish strongly, i.e. `lambda_max(Q) <= tol`.
pub fn is_pure(t: &GammaTuple, tol: f64) -> Result<bool> {
    let al = compute_q_default(t)?;
    Ok(op_norm(&al.q) <= tol)
}

/// The profile `j -> ‖P*^j (S_{d-i} - S_i* P) P^j‖` for `j = 0..=j_max`.
pub fn decay_profile(t: &GammaTuple, i: usize, j_max: usize) -> Result<Vec<f64>> {
    let d = t.d();
    if i < 1 || i > d - 1 {
        return Err(GammaError::IndexOutOfRange { index: i, max: d - 1 });
    }
    let p = t.p();
    let pa = adjoint(p);
    let x = &t.s()[d - 1 - i] - &adjoint(&t.s()[i - 1]).dot(p);
    let mut cur = x;
    let mut profile = Vec::with_capacity(j_max + 1);
    profile.push(op_norm(&cur));
    for _ in 0..j_max {
        cur = pa.dot(&cur).dot(p);
        profile.push(op_norm(&cur));
    }
    Ok(profile)
}

/// The fundamental operators `F_i` on the defect space of P, solving
/// `S_i - S_{d-i}* P = D_P F_i D_P` in the least-squares sense on `Ran D_P`.
#[derive(Clone, Debug)]
pub struct FundamentalSet {
    /// Compressions of the solutions to the defect-space coordinates (k-by-k).
    pub f: Vec<CMatrix>,
    /// The defect operator `D_P = (I - P*P)^{1/2}` (n-by-n).
    pub defect: CMatrix,
    /// Isometric basis of `Ran D_P` (n-by-k columns).
    pub basis: CMatrix,
    /// Per-index reconstruction residuals `‖S_i - S_{d-i}* P - D_P F_i D_P‖_F`.
    pub residuals: Vec<f64>,
}

impl FundamentalSet {
    /// Rank of the defect operator.
    pub fn defect_rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Ambient-size reconstruction `B F_i B*` of the i-th operator (1-based).
    pub fn ambient(&self, i: usize) -> Result<CMatrix> {
        if i < 1 || i > self.f.len() {
            return Err(GammaError::IndexOutOfRange {
                index: i,
                max: self.f.len(),
            });
        }
        Ok(self.basis.dot(&self.f[i - 1]).dot(&adjoint(&self.basis)))
    }
}

/// Computes the fundamental operators. Directions of `I - P*P` with
/// eigenvalue at most `rank_tol * max(1, lambda_max)` are treated as zero,
/// which keeps the defect space empty when P is unitary.
pub fn fundamental_operators(t: &GammaTuple, rank_tol: f64) -> Result<FundamentalSet> {
    let n = t.n();
    let p = t.p();
    let defect_sq = hermitize(&(eye(n) - adjoint(p).dot(p)));
    let (vals, vecs) = hermitian_eigen(&defect_sq)?;
    if let Some(&lo) = vals.first() {
        if lo < -defaults::GATE_TOL {
            return Err(GammaError::DefectFailure { value: lo });
        }
    }
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cut = rank_tol * lmax.max(1.0);
    let kept: Vec<usize> = (0..n).filter(|&i| vals[i] > cut).collect();
    let k = kept.len();
    let mut basis = zeros(n, k);
    let mut sqrt_vals = Vec::with_capacity(k);
    for (col, &i) in kept.iter().enumerate() {
        basis.column_mut(col).assign(&vecs.column(i));
        sqrt_vals.push(vals[i].sqrt());
    }
    // D_P from the same eigendecomposition, with the dropped directions zeroed.
    let mut defect = zeros(n, n);
    for (col, &sv) in sqrt_vals.iter().enumerate() {
        let v = basis.column(col);
        for r in 0..n {
            for c in 0..n {
                defect[(r, c)] += v[r] * v[c].conj() * sv;
            }
        }
    }
    let defect = hermitize(&defect);
    let d = t.d();
    let mut f = Vec::with_capacity(d - 1);
    let mut residuals = Vec::with_capacity(d - 1);
    for i in 1..d {
        let x = &t.s()[i - 1] - &adjoint(&t.s()[d - 1 - i]).dot(p);
        // F_i = D^+ X D^+ compressed: diag(1/sqrt(l)) B* X B diag(1/sqrt(l))
        let mut comp = adjoint(&basis).dot(&x).dot(&basis);
        for r in 0..k {
            for c in 0..k {
                comp[(r, c)] /= Complex64::new(sqrt_vals[r] * sqrt_vals[c], 0.0);
            }
        }
        let recon = defect
            .dot(&basis)
            .dot(&comp)
            .dot(&adjoint(&basis))
            .dot(&defect);
        residuals.push(fro_norm(&(&x - &recon)));
        f.push(comp);
    }
    Ok(FundamentalSet {
        f,
        defect,
        basis,
        residuals,
    })
}

/// Driver for the decay profiles: checks that each profile does not grow
/// overall, plus the strong decay expected of pure tuples and the uniform
/// near-vanishing expected of unitary tuples.
pub fn verify_decay(t: &GammaTuple, j_max: usize, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let pure = match is_pure(t, defaults::PURE_TOL) {
        Ok(b) => b,
        Err(e) => {
            report.record("purity", false, f64::INFINITY, format!("{e}"));
            return report;
        }
    };
    let unitary = crate::gamma::classify_gamma_unitary(t, defaults::GATE_TOL).unwrap_or(false);
    for i in 1..t.d() {
        match decay_profile(t, i, j_max) {
            Ok(profile) => {
                let first = profile[0];
                let last = *profile.last().expect("non-empty profile");
                report.record(
                    format!("no-growth i={i}"),
                    last <= first + tol,
                    (last - first).max(0.0),
                    format!("first {first:.3e}, last {last:.3e}"),
                );
                if pure {
                    report.record(
                        format!("pure-decay i={i}"),
                        last <= 1e-6 * (first + 1.0),
                        last,
                        format!("j_max {j_max}"),
                    );
                } else if unitary {
                    let max = profile.iter().fold(0.0f64, |a, &b| a.max(b));
                    report.record(
                        format!("unitary-flat i={i}"),
                        max < 1e-9,
                        max,
                        "boundary identity holds at every power",
                    );
                } else {
                    report.skip(
                        format!("strong-decay i={i}"),
                        "neither pure nor unitary; only monotone bound checked",
                    );
                }
            }
            Err(e) => report.record(format!("profile i={i}"), false, f64::INFINITY, format!("{e}")),
        }
    }
    report
}

/// Driver for the fundamental operators: reconstruction residuals must be
/// small for certified tuples; uncertified tuples are reported but not gated.
pub fn verify_fundamental(t: &GammaTuple, rank_tol: f64, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    match fundamental_operators(t, rank_tol) {
        Ok(fo) => {
            for (idx, &res) in fo.residuals.iter().enumerate() {
                let i = idx + 1;
                let scale = 1.0 + op_norm(&t.s()[idx]);
                if t.is_constructed() {
                    report.record(
                        format!("residual i={i}"),
                        res <= tol * scale,
                        res,
                        format!("defect rank {}", fo.defect_rank()),
                    );
                } else {
                    report.skip(
                        format!("residual i={i}"),
                        format!("uncertified tuple; residual {res:.3e}"),
                    );
                }
            }
        }
        Err(e) => report.record("fundamental", false, f64::INFINITY, format!("{e}")),
    }
    report
}
