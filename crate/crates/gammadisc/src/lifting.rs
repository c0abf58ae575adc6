//! Commutant lifting: every operator commuting with the source tuple lifts
//! to the extension commutant with no increase in norm, intertwining the
//! module maps; the two-tuple intertwining variant reduces to the one-tuple
//! case by a 2x2 operator-matrix trick.

use ndarray::prelude::*;

use crate::defaults;
use crate::dilation::CanonicalExtension;
use crate::error::{GammaError, Result};
use crate::gamma::GammaTuple;
use crate::matrixkit::{fro_norm, op_norm, pinv, zeros, CMatrix};
use crate::report::VerificationReport;

/// Outcome of a lift: the lifted operator with its norms and the residual of
/// the intertwining identity `Y J = J X`.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub y: CMatrix,
    pub norm_x: f64,
    pub norm_y: f64,
    pub intertwine_residual: f64,
}

fn commutant_gate(x: &CMatrix, mats: &[CMatrix], tol: f64) -> Result<()> {
    let xn = 1.0 + op_norm(x);
    let mut worst = 0.0f64;
    for m in mats {
        let res = crate::matrixkit::commutator_norm(x, m) / (xn * (1.0 + op_norm(m)));
        worst = worst.max(res);
    }
    if worst > tol {
        return Err(GammaError::NotInCommutant { residual: worst });
    }
    Ok(())
}

/// Lifts `X` in the commutant of the source tuple to the unique `Y` on the
/// extension space with `Y J = J X`, solved through the pseudoinverse of J.
/// The lifted operator commutes with the extension and `‖Y‖ <= ‖X‖`.
pub fn lift_commutant(ext: &CanonicalExtension, x: &CMatrix, tol: f64) -> Result<LiftResult> {
    let n = ext.source.n();
    if x.dim() != (n, n) {
        return Err(GammaError::DimensionMismatch(format!(
            "X must be ({n}, {n}), got {:?}",
            x.dim()
        )));
    }
    commutant_gate(x, &ext.source.members(), tol)?;
    let y = ext.j.dot(x).dot(&pinv(&ext.j, defaults::PINV_RANK_TOL)?);
    let intertwine_residual = fro_norm(&(y.dot(&ext.j) - ext.j.dot(x)));
    let scale = (1.0 + op_norm(x)) * (1.0 + fro_norm(&ext.j));
    if intertwine_residual > tol * scale {
        return Err(GammaError::Inconsistent {
            residual: intertwine_residual,
        });
    }
    commutant_gate(&y, &ext.members(), tol).map_err(|e| match e {
        GammaError::NotInCommutant { residual } => GammaError::Inconsistent { residual },
        other => other,
    })?;
    Ok(LiftResult {
        norm_x: op_norm(x),
        norm_y: op_norm(&y),
        y,
        intertwine_residual,
    })
}

fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = zeros(ra + rb, ca + cb);
    out.slice_mut(s![..ra, ..ca]).assign(a);
    out.slice_mut(s![ra.., ca..]).assign(b);
    out
}

/// Lifts an intertwiner `X: H -> H'` (with `X S_i = S'_i X`, `X P = P' X`)
/// to `Y: K -> K'` with `Y J = J' X`, `Y R_i = R'_i Y`, `Y U = U' Y` and
/// `‖Y‖ <= ‖X‖`, by embedding `X` as an off-diagonal block over the direct
/// sum of the two tuples and lifting there.
pub fn lift_intertwiner(
    ext: &CanonicalExtension,
    ext2: &CanonicalExtension,
    x: &CMatrix,
    tol: f64,
) -> Result<LiftResult> {
    let n = ext.source.n();
    let n2 = ext2.source.n();
    if ext.source.d() != ext2.source.d() {
        return Err(GammaError::DimensionMismatch(
            "tuples have different lengths".into(),
        ));
    }
    if x.dim() != (n2, n) {
        return Err(GammaError::DimensionMismatch(format!(
            "X must be ({n2}, {n}), got {:?}",
            x.dim()
        )));
    }
    let scale = 1.0 + op_norm(x);
    let mut worst = fro_norm(&(x.dot(ext.source.p()) - ext2.source.p().dot(x))) / scale;
    for (s, s2) in ext.source.s().iter().zip(ext2.source.s()) {
        worst = worst.max(fro_norm(&(x.dot(s) - s2.dot(x))) / scale);
    }
    if worst > tol {
        return Err(GammaError::NotIntertwining { residual: worst });
    }
    // Direct-sum extension, assembled blockwise so the two coordinate systems
    // are preserved exactly.
    let sum_tuple = GammaTuple::new(
        ext.source
            .s()
            .iter()
            .zip(ext2.source.s())
            .map(|(a, b)| direct_sum(a, b))
            .collect(),
        direct_sum(ext.source.p(), ext2.source.p()),
        crate::gamma::Certificate::NecessaryChecksOnly,
        defaults::GATE_TOL,
    )?;
    let sum_ext = CanonicalExtension {
        rank: ext.rank + ext2.rank,
        basis: direct_sum(&ext.basis, &ext2.basis),
        j: direct_sum(&ext.j, &ext2.j),
        r_tuple: ext
            .r_tuple
            .iter()
            .zip(&ext2.r_tuple)
            .map(|(a, b)| direct_sum(a, b))
            .collect(),
        u: direct_sum(&ext.u, &ext2.u),
        q_half: direct_sum(&ext.q_half, &ext2.q_half),
        q: direct_sum(&ext.q, &ext2.q),
        source: sum_tuple,
    };
    // X as the lower-left block commutes with the direct sum exactly when X
    // intertwines the two tuples.
    let mut x_sum = zeros(n + n2, n + n2);
    x_sum.slice_mut(s![n.., ..n]).assign(x);
    let lifted = lift_commutant(&sum_ext, &x_sum, tol)?;
    let y = lifted.y.slice(s![ext.rank.., ..ext.rank]).to_owned();
    let intertwine_residual = fro_norm(&(y.dot(&ext.j) - ext2.j.dot(x)));
    Ok(LiftResult {
        norm_x: op_norm(x),
        norm_y: op_norm(&y),
        y,
        intertwine_residual,
    })
}

/// Lifting driver: samples random commutant elements, checks the norm bound,
/// the intertwining identity, agreement with the multiplicative lift (two
/// independent solve routes for the same equation), and the intertwining
/// variant on a unitarily rotated copy of the tuple.
pub fn verify_lifting(t: &GammaTuple, samples: usize, seed: u64, tol: f64) -> VerificationReport {
    use rand::SeedableRng;
    let mut report = VerificationReport::new();
    let ext = match crate::dilation::canonical_extension(t, defaults::q_rank_tol(t.n())) {
        Ok(ext) => ext,
        Err(GammaError::PureTuple) => {
            report.skip("lifting", "pure tuple: no extension to lift into");
            return report;
        }
        Err(e) => {
            report.record("extension", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    let cb = match crate::toeplitz::commutant(
        &t.members(),
        crate::matrixkit::default_null_tol(t.n()),
    ) {
        Ok(cb) => cb,
        Err(e) => {
            report.record("source commutant", false, f64::MAX, format!("{e}"));
            return report;
        }
    };
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut worst_norm = 0.0f64;
    let mut worst_intertwine = 0.0f64;
    let mut worst_agree = 0.0f64;
    let mut failures = Vec::new();
    for k in 0..samples {
        let x = cb.sample(&mut rng);
        match lift_commutant(&ext, &x, tol.max(defaults::GATE_TOL)) {
            Ok(lift) => {
                let excess = (lift.norm_y - lift.norm_x) / (1.0 + lift.norm_x);
                worst_norm = worst_norm.max(excess);
                worst_intertwine = worst_intertwine
                    .max(lift.intertwine_residual / (1.0 + lift.norm_x));
                match crate::toeplitz::theta(&ext, &x, tol.max(defaults::GATE_TOL)) {
                    Ok(th) => {
                        worst_agree = worst_agree
                            .max(fro_norm(&(&lift.y - &th)) / (1.0 + lift.norm_x));
                    }
                    Err(e) => failures.push(format!("sample {k}: lift route disagreement ({e})")),
                }
            }
            Err(e) => failures.push(format!("sample {k}: {e}")),
        }
    }
    report.record(
        "no sample failed",
        failures.is_empty(),
        failures.len() as f64,
        failures.join("; "),
    );
    report.record(
        "norm does not increase",
        worst_norm <= tol,
        worst_norm.max(0.0),
        format!("{samples} samples"),
    );
    report.record(
        "intertwining identity",
        worst_intertwine <= tol,
        worst_intertwine,
        "",
    );
    report.record(
        "agreement of the two lift routes",
        worst_agree <= tol,
        worst_agree,
        "pseudoinverse route vs commutant-coordinates route",
    );
    // Rotated-copy fixture for the intertwining variant.
    let w = crate::matrixkit::haar_unitary(&mut rng, t.n());
    match t.conjugated(&w, defaults::GATE_TOL) {
        Ok(t2) => match crate::dilation::canonical_extension(&t2, defaults::q_rank_tol(t2.n())) {
            Ok(ext2) => match lift_intertwiner(&ext, &ext2, &w, tol.max(defaults::GATE_TOL)) {
                Ok(lift) => {
                    let ok = (lift.norm_y - 1.0).abs() <= tol * 10.0
                        && lift.intertwine_residual <= tol * 10.0;
                    report.record(
                        "rotated-copy intertwining lift",
                        ok,
                        lift.intertwine_residual,
                        format!("‖Y‖ = {:.12}", lift.norm_y),
                    );
                }
                Err(e) => report.record(
                    "rotated-copy intertwining lift",
                    false,
                    f64::MAX,
                    format!("{e}"),
                ),
            },
            Err(e) => report.record(
                "rotated-copy intertwining lift",
                false,
                f64::MAX,
                format!("extension of rotated copy: {e}"),
            ),
        },
        Err(e) => report.record(
            "rotated-copy intertwining lift",
            false,
            f64::MAX,
            format!("rotated copy: {e}"),
        ),
    }
    report
}
