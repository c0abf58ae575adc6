//! Exact-arithmetic kernel-dimension oracle over the Gaussian rationals.
//!
//! Entirely independent of the floating pipeline: matricization, stacking and
//! Gaussian elimination are all done in `BigRational` arithmetic, so the
//! kernel dimensions it reports are exact. Fixture entries are dyadic
//! rationals, which convert to f64 without rounding, so the floating pipeline
//! sees bit-identical matrices.

use num::BigRational;
use num::{One, Signed, Zero};

/// A Gaussian rational a + bi.
#[derive(Clone, Debug, PartialEq)]
pub struct QC {
    pub re: BigRational,
    pub im: BigRational,
}

impl QC {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    #[allow(dead_code)]
    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn inv(&self) -> Self {
        let denom = &self.re * &self.re + &self.im * &self.im;
        Self::new(&self.re / &denom, -(&self.im / &denom))
    }

    /// |re| + |im|, used only to pick non-zero pivots deterministically.
    fn l1(&self) -> BigRational {
        self.re.abs() + self.im.abs()
    }
}

/// Dense matrix over the Gaussian rationals, row-major.
pub type QMat = Vec<Vec<QC>>;

pub fn qmat_zero(rows: usize, cols: usize) -> QMat {
    vec![vec![QC::zero(); cols]; rows]
}

pub fn qmat_eye(n: usize) -> QMat {
    let mut m = qmat_zero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = QC::one();
    }
    m
}

pub fn conj_transpose(m: &QMat) -> QMat {
    let rows = m.len();
    let cols = m[0].len();
    let mut out = qmat_zero(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            out[j][i] = m[i][j].conj();
        }
    }
    out
}

pub fn transpose(m: &QMat) -> QMat {
    let rows = m.len();
    let cols = m[0].len();
    let mut out = qmat_zero(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            out[j][i] = m[i][j].clone();
        }
    }
    out
}

pub fn kron(a: &QMat, b: &QMat) -> QMat {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = qmat_zero(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j].mul(&b[k][l]);
                }
            }
        }
    }
    out
}

pub fn sub(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

fn stack(blocks: &[QMat]) -> QMat {
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b.iter().cloned());
    }
    out
}

/// Exact rank by fraction-exact Gaussian elimination with largest-l1 pivoting.
pub fn rank(mut m: QMat) -> usize {
    if m.is_empty() {
        return 0;
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..cols {
        let mut best: Option<(usize, BigRational)> = None;
        for (r, row) in m.iter().enumerate().take(rows).skip(pivot_row) {
            if !row[col].is_zero() {
                let mag = row[col].l1();
                match &best {
                    Some((_, bm)) if *bm >= mag => {}
                    _ => best = Some((r, mag)),
                }
            }
        }
        let Some((r, _)) = best else { continue };
        m.swap(pivot_row, r);
        let inv = m[pivot_row][col].inv();
        for rr in (pivot_row + 1)..rows {
            if m[rr][col].is_zero() {
                continue;
            }
            let factor = m[rr][col].mul(&inv);
            for cc in col..cols {
                let delta = factor.mul(&m[pivot_row][cc]);
                m[rr][cc] = m[rr][cc].sub(&delta);
            }
        }
        rank += 1;
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    rank
}

/// Exact dimension of { A : S* A P = A S, P* A P = A } for a d = 2 pair.
pub fn bh_kernel_dim_exact(s: &QMat, p: &QMat) -> usize {
    let n = s.len();
    let id = qmat_eye(n);
    let big_id = qmat_eye(n * n);
    // Row-major vec: L A R matricizes to kron(L, R^T).
    let rel1 = sub(
        &kron(&conj_transpose(s), &transpose(p)),
        &kron(&id, &transpose(s)),
    );
    let rel2 = sub(&kron(&conj_transpose(p), &transpose(p)), &big_id);
    let stacked = stack(&[rel1, rel2]);
    n * n - rank(stacked)
}

/// Exact dimension of the joint commutant of a family.
pub fn commutant_dim_exact(mats: &[QMat]) -> usize {
    let n = mats[0].len();
    let id = qmat_eye(n);
    let blocks: Vec<QMat> = mats
        .iter()
        .map(|m| sub(&kron(m, &id), &kron(&id, &transpose(m))))
        .collect();
    let stacked = stack(&blocks);
    n * n - rank(stacked)
}

/// Dyadic rational helper: `num / 2^k` with exact f64 twin.
pub fn dy(num: i64, pow2: u32) -> BigRational {
    BigRational::new(num.into(), (1i64 << pow2).into())
}

pub fn qc(re: BigRational, im: BigRational) -> QC {
    QC::new(re, im)
}

/// The f64 value of a dyadic rational, exact by construction.
pub fn to_f64(q: &BigRational) -> f64 {
    use num::ToPrimitive;
    let n = q.numer().to_f64().expect("small numerator");
    let d = q.denom().to_f64().expect("small denominator");
    n / d
}

#[cfg(test)]
mod sanity {
    use super::*;

    #[test]
    fn rank_of_identity() {
        assert_eq!(rank(qmat_eye(4)), 4);
        assert_eq!(rank(qmat_zero(3, 5)), 0);
    }

    #[test]
    fn commutant_of_distinct_diagonal_is_diagonal() {
        let mut d = qmat_zero(2, 2);
        d[0][0] = qc(dy(1, 0), dy(0, 0));
        d[1][1] = qc(dy(2, 0), dy(0, 0));
        assert_eq!(commutant_dim_exact(&[d]), 2);
    }
}
