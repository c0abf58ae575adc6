//! Points and operator tuples over the symmetrized polydisc: membership
//! tests, certified generators, and unitary-tuple classification.
//!
//! A tuple `(S_1, ..., S_{d-1}, P)` of commuting matrices is handled through
//! [`GammaTuple`]. Genuine contractivity over the symmetrized polydisc is not
//! decidable by finite checks for arbitrary tuples when d >= 3, so tuples
//! carry a [`Certificate`]: `Constructed` marks output of a generator that is
//! contractive by construction (normal symmetrizations, or the d = 2
//! commuting-pair symmetrization), `NecessaryChecksOnly` marks tuples that
//! only passed the commutation and norm gates.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::fmt;
use std::str::FromStr;

use crate::error::{GammaError, Result};
use crate::matrixkit::{
    adjoint, all_finite, commutator_norm, eye, fro_norm, haar_unitary, op_norm,
    poly_roots_max_modulus, random_complex_matrix, simultaneous_diagonalize, zeros, CMatrix,
};

/// A point `(s_1, ..., s_{d-1}, p)` of d-dimensional symmetrized-polydisc
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPoint {
    pub s: Vec<Complex64>,
    pub p: Complex64,
}

impl GammaPoint {
    pub fn new(s: Vec<Complex64>, p: Complex64) -> Result<Self> {
        if s.is_empty() {
            return Err(GammaError::Invalid(
                "a point needs at least one s-coordinate (d >= 2)".into(),
            ));
        }
        if !s.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            || !(p.re.is_finite() && p.im.is_finite())
        {
            return Err(GammaError::Invalid("non-finite coordinate".into()));
        }
        Ok(Self { s, p })
    }

    pub fn d(&self) -> usize {
        self.s.len() + 1
    }

    /// Coefficients `(c_{d-1}, ..., c_0)` of the monic polynomial
    /// `z^d - s_1 z^{d-1} + s_2 z^{d-2} - ... + (-1)^d p` whose root locations
    /// decide membership.
    pub fn membership_coefficients(&self) -> Vec<Complex64> {
        let d = self.d();
        let mut coeffs = Vec::with_capacity(d);
        for (k, &sk) in self.s.iter().enumerate() {
            let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs.push(sk * sign);
        }
        let sign_p = if d % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(self.p * sign_p);
        coeffs
    }
}

/// Membership: every root of the associated monic polynomial lies in the
/// closed unit disc, up to `tol` on the moduli.
///
/// Companion eigenvalues of a root of multiplicity m are accurate only to
/// eps^(1/m); the additive floor absorbs that for boundary multiplicities
/// (e.g. the symmetrization of a repeated coordinate).
pub fn point_in_gamma(pt: &GammaPoint, tol: f64) -> bool {
    let coeffs = pt.membership_coefficients();
    let max_mod = poly_roots_max_modulus(&coeffs).expect("non-empty coefficients");
    let scale = 1.0 + coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = pt.d() as f64 * f64::EPSILON.sqrt() * scale;
    max_mod <= 1.0 + tol + floor
}

/// Distinguished-boundary membership: in the set and `|p| = 1` up to `tol`.
pub fn point_in_boundary(pt: &GammaPoint, tol: f64) -> bool {
    point_in_gamma(pt, tol) && (pt.p.norm() - 1.0).abs() <= tol
}

/// The scaling weights `(d-j)/d` for `j = 1, ..., d-1`; strictly decreasing
/// and inside (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct GammaConstants {
    pub gamma: Vec<f64>,
}

impl GammaConstants {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(GammaError::Invalid("d must be >= 2".into()));
        }
        Ok(Self {
            gamma: (1..d).map(|j| (d - j) as f64 / d as f64).collect(),
        })
    }
}

/// Provenance of a tuple's contractivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Produced by a generator whose output is contractive by construction;
    /// the string names the source.
    Constructed(String),
    /// Only the commutation and `‖P‖ <= 1` gates were verified.
    NecessaryChecksOnly,
}

/// A commuting tuple `(S_1, ..., S_{d-1}, P)` of n-by-n matrices with
/// certification metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTuple {
    s: Vec<CMatrix>,
    p: CMatrix,
    certificate: Certificate,
}

impl GammaTuple {
    /// Validates the tuple invariants: all members square of equal size with
    /// finite entries, pairwise commutators within `tol * (1 + max norm)`,
    /// and `‖P‖ <= 1 + tol`.
    pub fn new(s: Vec<CMatrix>, p: CMatrix, certificate: Certificate, tol: f64) -> Result<Self> {
        if s.is_empty() {
            return Err(GammaError::Invalid(
                "a tuple needs at least one S-member (d >= 2)".into(),
            ));
        }
        let n = p.nrows();
        if n == 0 || p.dim() != (n, n) {
            return Err(GammaError::DimensionMismatch(format!(
                "P must be square and non-empty, got {:?}",
                p.dim()
            )));
        }
        for (i, m) in s.iter().enumerate() {
            if m.dim() != (n, n) {
                return Err(GammaError::DimensionMismatch(format!(
                    "S_{} has shape {:?}, expected ({n}, {n})",
                    i + 1,
                    m.dim()
                )));
            }
        }
        for m in s.iter().chain(std::iter::once(&p)) {
            if !all_finite(m) {
                return Err(GammaError::Invalid("non-finite matrix entry".into()));
            }
        }
        let members: Vec<&CMatrix> = s.iter().chain(std::iter::once(&p)).collect();
        let max_norm = members.iter().map(|m| op_norm(m)).fold(0.0, f64::max);
        let gate = tol * (1.0 + max_norm);
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let res = commutator_norm(members[i], members[j]);
                if res > gate {
                    return Err(GammaError::NotCommuting { residual: res });
                }
            }
        }
        let pn = op_norm(&p);
        if pn > 1.0 + tol {
            return Err(GammaError::NotContractive { norm: pn });
        }
        Ok(Self { s, p, certificate })
    }

    pub fn d(&self) -> usize {
        self.s.len() + 1
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn s(&self) -> &[CMatrix] {
        &self.s
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    /// All members in order `S_1, ..., S_{d-1}, P`.
    pub fn members(&self) -> Vec<CMatrix> {
        let mut v = self.s.clone();
        v.push(self.p.clone());
        v
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn is_constructed(&self) -> bool {
        matches!(self.certificate, Certificate::Constructed(_))
    }

    /// The same matrices conjugated by a unitary `w`: `M -> w M w*`.
    pub fn conjugated(&self, w: &CMatrix, tol: f64) -> Result<GammaTuple> {
        let wa = adjoint(w);
        let s = self.s.iter().map(|m| w.dot(m).dot(&wa)).collect();
        let p = w.dot(&self.p).dot(&wa);
        GammaTuple::new(s, p, self.certificate.clone(), tol)
    }
}

fn elementary_symmetric_scalars(z: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for &zj in z {
        e.push(Complex64::new(0.0, 0.0));
        for k in (1..e.len()).rev() {
            let prev = e[k - 1];
            e[k] += prev * zj;
        }
    }
    e.remove(0);
    e
}

fn elementary_symmetric_matrices(t: &[CMatrix]) -> Vec<CMatrix> {
    let n = t[0].nrows();
    let mut e: Vec<CMatrix> = vec![eye(n)];
    for m in t {
        e.push(zeros(n, n));
        for k in (1..e.len()).rev() {
            let bump = e[k - 1].dot(m);
            e[k] = &e[k] + &bump;
        }
    }
    e.remove(0);
    e
}

/// Symmetrization of a commuting family of normal contractions into a
/// certified tuple `(e_1(T), ..., e_{d-1}(T), e_d(T))`.
pub fn symmetrize_commuting_normals(t: &[CMatrix], tol: f64) -> Result<GammaTuple> {
    if t.len() < 2 {
        return Err(GammaError::Invalid(
            "need at least two matrices to symmetrize (d >= 2)".into(),
        ));
    }
    let n = t[0].nrows();
    for m in t {
        if m.dim() != (n, n) {
            return Err(GammaError::DimensionMismatch(format!(
                "expected ({n}, {n}), got {:?}",
                m.dim()
            )));
        }
    }
    let max_norm = t.iter().map(op_norm).fold(0.0, f64::max);
    for i in 0..t.len() {
        let nres = fro_norm(&(t[i].dot(&adjoint(&t[i])) - adjoint(&t[i]).dot(&t[i])));
        if nres > tol * (1.0 + max_norm).powi(2) {
            return Err(GammaError::NotNormal { residual: nres });
        }
        let nm = op_norm(&t[i]);
        if nm > 1.0 + tol {
            return Err(GammaError::NotContractive { norm: nm });
        }
        for j in (i + 1)..t.len() {
            let res = commutator_norm(&t[i], &t[j]);
            if res > tol * (1.0 + max_norm) {
                return Err(GammaError::NotCommuting { residual: res });
            }
        }
    }
    let mut e = elementary_symmetric_matrices(t);
    let p = e.pop().expect("d >= 2");
    GammaTuple::new(
        e,
        p,
        Certificate::Constructed("normal-symmetrization".into()),
        tol,
    )
}

/// Generator families for seeded test instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleKind {
    /// Symmetrizations of unimodular joint spectra conjugated by a Haar unitary.
    NormalBoundary,
    /// Same with joint spectra strictly inside the polydisc.
    NormalInterior,
    /// Direct sum of a boundary block and a strict block, so Q is neither 0 nor I.
    MixedPurity,
    /// Symmetrized arbitrary commuting pair of contractions (d = 2 only).
    Ando2,
}

impl fmt::Display for TupleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TupleKind::NormalBoundary => "normal-boundary",
            TupleKind::NormalInterior => "normal-interior",
            TupleKind::MixedPurity => "mixed-purity",
            TupleKind::Ando2 => "ando2",
        };
        f.write_str(s)
    }
}

impl FromStr for TupleKind {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal-boundary" | "normalboundary" => Ok(TupleKind::NormalBoundary),
            "normal-interior" | "normalinterior" => Ok(TupleKind::NormalInterior),
            "mixed-purity" | "mixedpurity" => Ok(TupleKind::MixedPurity),
            "ando2" => Ok(TupleKind::Ando2),
            other => Err(GammaError::UnsupportedKind(other.into())),
        }
    }
}

fn unimodular(rng: &mut ChaCha20Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
}

// Interior moduli are kept at or below 0.9 so that pure instances decay
// fast enough for profile checks at a few hundred powers.
fn interior(rng: &mut ChaCha20Rng) -> Complex64 {
    let r = 0.9 * rng.gen::<f64>();
    Complex64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
}

/// Diagonal symmetrized tuple from per-point scalar d-tuples.
fn diagonal_symmetrization(points: &[Vec<Complex64>], d: usize) -> (Vec<CMatrix>, CMatrix) {
    let n = points.len();
    let mut diag_e: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); d];
    for z in points {
        let e = elementary_symmetric_scalars(z);
        for (k, val) in e.into_iter().enumerate() {
            diag_e[k].push(val);
        }
    }
    let mut mats: Vec<CMatrix> = diag_e
        .into_iter()
        .map(|col| {
            let mut m = zeros(n, n);
            for (i, v) in col.into_iter().enumerate() {
                m[(i, i)] = v;
            }
            m
        })
        .collect();
    let p = mats.pop().expect("d >= 2");
    (mats, p)
}

fn conjugate_all(s: Vec<CMatrix>, p: CMatrix, w: &CMatrix) -> (Vec<CMatrix>, CMatrix) {
    let wa = adjoint(w);
    (
        s.into_iter().map(|m| w.dot(&m).dot(&wa)).collect(),
        w.dot(&p).dot(&wa),
    )
}

/// Deterministic seeded generator of certified tuples.
pub fn random_gamma_tuple(d: usize, n: usize, kind: TupleKind, seed: u64) -> Result<GammaTuple> {
    if d < 2 {
        return Err(GammaError::Invalid("d must be >= 2".into()));
    }
    if n < 1 {
        return Err(GammaError::Invalid("n must be >= 1".into()));
    }
    if kind == TupleKind::Ando2 && d != 2 {
        return Err(GammaError::UnsupportedKind(format!(
            "ando2 requires d = 2, got d = {d}"
        )));
    }
    if kind == TupleKind::MixedPurity && n < 2 {
        return Err(GammaError::UnsupportedKind(
            "mixed-purity requires n >= 2".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cert = Certificate::Constructed(format!("{kind} seed={seed}"));
    let tol = crate::defaults::GATE_TOL;

    let (s, p) = match kind {
        TupleKind::NormalBoundary | TupleKind::NormalInterior => {
            let points: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..d)
                        .map(|_| match kind {
                            TupleKind::NormalBoundary => unimodular(&mut rng),
                            _ => interior(&mut rng),
                        })
                        .collect()
                })
                .collect();
            let (s, p) = diagonal_symmetrization(&points, d);
            let w = haar_unitary(&mut rng, n);
            conjugate_all(s, p, &w)
        }
        TupleKind::MixedPurity => {
            let n_boundary = n / 2 + n % 2;
            let points: Vec<Vec<Complex64>> = (0..n)
                .map(|i| {
                    (0..d)
                        .map(|_| {
                            if i < n_boundary {
                                unimodular(&mut rng)
                            } else {
                                interior(&mut rng)
                            }
                        })
                        .collect()
                })
                .collect();
            let (s, p) = diagonal_symmetrization(&points, d);
            let w = haar_unitary(&mut rng, n);
            conjugate_all(s, p, &w)
        }
        TupleKind::Ando2 => {
            let g = random_complex_matrix(&mut rng, n, n);
            let deg = n.min(4).max(1);
            let mut factors = Vec::with_capacity(2);
            for _ in 0..2 {
                let mut t = zeros(n, n);
                let mut gk = eye(n);
                for _ in 0..deg {
                    let re: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                    let im: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                    t = t + gk.mapv(|z| z * Complex64::new(re, im));
                    gk = gk.dot(&g);
                }
                let nm = op_norm(&t);
                let radius = 0.5 + 0.45 * rng.gen::<f64>();
                if nm > 1e-12 {
                    t = t.mapv(|z| z * (radius / nm));
                }
                factors.push(t);
            }
            let s = &factors[0] + &factors[1];
            let p = factors[0].dot(&factors[1]);
            (vec![s], p)
        }
    };
    GammaTuple::new(s, p, cert, tol)
}

/// Joint eigenvalue points of a commuting normal family `(S_1, ..., S_{d-1}, P)`.
pub fn joint_points(s_mats: &[CMatrix], p: &CMatrix, tol: f64) -> Result<Vec<GammaPoint>> {
    let mut mats: Vec<CMatrix> = s_mats.to_vec();
    mats.push(p.clone());
    let (_, diags) = simultaneous_diagonalize(&mats, tol)?;
    let n = p.nrows();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let s: Vec<Complex64> = diags[..diags.len() - 1].iter().map(|dg| dg[i]).collect();
        points.push(GammaPoint::new(s, diags[diags.len() - 1][i])?);
    }
    Ok(points)
}

/// Joint eigenvalue points of a tuple's members.
pub fn joint_eigenvalue_points(t: &GammaTuple, tol: f64) -> Result<Vec<GammaPoint>> {
    joint_points(t.s(), t.p(), tol)
}

/// True iff the tuple is a unitary module generator: all members normal, P
/// unitary, the boundary identities `S_i = S_{d-i}* P` hold, and every joint
/// eigenvalue lies on the distinguished boundary. At finite dimension this
/// also certifies the isometric case.
pub fn classify_gamma_unitary(t: &GammaTuple, tol: f64) -> Result<bool> {
    let members = t.members();
    let max_norm = members.iter().map(op_norm).fold(0.0, f64::max);
    for m in &members {
        let res = fro_norm(&(m.dot(&adjoint(m)) - adjoint(m).dot(m)));
        if res > tol * (1.0 + max_norm).powi(2) {
            return Ok(false);
        }
    }
    let n = t.n();
    let p = t.p();
    let unitary_res = fro_norm(&(adjoint(p).dot(p) - eye(n))).max(fro_norm(&(p.dot(&adjoint(p)) - eye(n))));
    if unitary_res > tol * (1.0 + (n as f64).sqrt()) {
        return Ok(false);
    }
    let d = t.d();
    for i in 1..d {
        let res = fro_norm(&(&t.s()[i - 1] - &adjoint(&t.s()[d - 1 - i]).dot(p)));
        if res > tol * (1.0 + max_norm) {
            return Ok(false);
        }
    }
    let points = joint_eigenvalue_points(t, tol)?;
    Ok(points.iter().all(|pt| point_in_boundary(pt, tol.max(1e-8))))
}
