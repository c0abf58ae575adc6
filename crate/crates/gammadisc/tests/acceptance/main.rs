//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! All checks are property-based at desk scale (n <= 10, d in {2, 3, 4})
//! over three seeded instance families: pure (interior spectra), boundary
//! (unitary tuples), and mixed purity. Kernel dimensions are cross-checked
//! against an exact Gaussian-rational oracle on dyadic fixtures.

mod exact_oracle;

use std::time::Instant;

use gammadisc::asymptotics::{decay_profile, fundamental_operators};
use gammadisc::defaults;
use gammadisc::dilation::{
    canonical_extension, canonical_extension_with_basis, extension_identity_report,
    extension_isomorphism, verify_equivalence,
};
use gammadisc::gamma::{random_gamma_tuple, Certificate, GammaPoint, GammaTuple, TupleKind};
use gammadisc::lifting::{lift_commutant, lift_intertwiner};
use gammadisc::matrixkit::{
    adjoint, default_null_tol, fro_norm, haar_unitary, op_norm, CMatrix,
};
use gammadisc::toeplitz::{commutant, theta, toeplitz_space, verify_projection};
use ndarray::array;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const DIMS: [usize; 10] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 4];
const DEGREES: [usize; 3] = [2, 3, 4];

fn family(kind: TupleKind, seed_base: u64) -> Vec<GammaTuple> {
    (0..20)
        .map(|i| {
            let d = DEGREES[i % 3];
            let n = DIMS[i % 10];
            random_gamma_tuple(d, n, kind, seed_base + i as u64)
                .expect("generator parameters are valid")
        })
        .collect()
}

fn pure_family() -> Vec<GammaTuple> {
    family(TupleKind::NormalInterior, 100)
}

fn boundary_family() -> Vec<GammaTuple> {
    family(TupleKind::NormalBoundary, 200)
}

fn mixed_family() -> Vec<GammaTuple> {
    family(TupleKind::MixedPurity, 300)
}

fn non_pure_instances() -> Vec<GammaTuple> {
    let mut v = boundary_family();
    v.extend(mixed_family());
    v
}

fn announce(name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}{}{detail}", if detail.is_empty() { "" } else { ": " });
    assert!(ok, "{name}: {detail}");
}

#[test]
fn acceptance_01_equivalent_characterizations() {
    let start = Instant::now();
    let mut instances = pure_family();
    instances.extend(boundary_family());
    instances.extend(mixed_family());
    assert_eq!(instances.len(), 60);
    let mut bad = Vec::new();
    for (i, t) in instances.iter().enumerate() {
        let report = verify_equivalence(t, 1e-8);
        let agree = report
            .find("characterizations agree")
            .map(|c| c.status == gammadisc::report::CheckStatus::Pass)
            .unwrap_or(false);
        if !agree || !report.passed() {
            bad.push(format!("instance {i} (d={}, n={}): {report:?}", t.d(), t.n()));
        }
    }
    let elapsed = start.elapsed();
    announce(
        "equivalent characterizations on 60 instances",
        bad.is_empty() && elapsed.as_secs() < 60,
        &format!("{} failures, {:.1}s", bad.len(), elapsed.as_secs_f64()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_02_canonical_extension_identities() {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (i, t) in non_pure_instances().iter().enumerate() {
        match canonical_extension(t, defaults::q_rank_tol(t.n())) {
            Ok(ext) => {
                let report = extension_identity_report(&ext, 1e-8);
                for c in &report.checks {
                    worst = worst.max(c.residual);
                }
                if !report.passed() {
                    bad.push(format!("instance {i}: {report:?}"));
                }
            }
            Err(e) => bad.push(format!("instance {i}: {e}")),
        }
    }
    announce(
        "canonical extension identities on all non-pure instances",
        bad.is_empty(),
        &format!("worst residual {worst:.3e}"),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_03_symbol_correspondence() {
    let mut bad = Vec::new();
    for (i, t) in non_pure_instances().iter().enumerate() {
        let report = gammadisc::toeplitz::verify_symbol_correspondence(t, 1e-7);
        if !report.passed() {
            bad.push(format!("instance {i} (d={}, n={}): {report:?}", t.d(), t.n()));
        }
    }
    announce(
        "commutant-Toeplitz correspondence (dims, isometry, round trip)",
        bad.is_empty(),
        &format!("{} failures", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_04_projection_properties() {
    let mut instances = pure_family();
    instances.extend(boundary_family());
    instances.extend(mixed_family());
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for (i, t) in instances.iter().enumerate() {
        if t.n() > 6 {
            continue;
        }
        checked += 1;
        let report = verify_projection(t.p(), 50, 7000 + i as u64, 1e-8);
        if !report.passed() {
            bad.push(format!("instance {i} (d={}, n={}): {report:?}", t.d(), t.n()));
        }
    }
    announce(
        "projection properties (idempotent, CP, range, normalization)",
        bad.is_empty() && checked >= 30,
        &format!("{checked} instances at n <= 6, {} failures", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_05_decay_profiles() {
    let mut bad = Vec::new();
    for (i, t) in pure_family().iter().enumerate() {
        for idx in 1..t.d() {
            let profile = decay_profile(t, idx, 200).expect("valid index");
            let first = profile[0];
            let last = *profile.last().unwrap();
            if last > 1e-6 * (first + 1.0) {
                bad.push(format!("pure {i} i={idx}: first {first:.3e}, last {last:.3e}"));
            }
        }
    }
    for (i, t) in boundary_family().iter().enumerate() {
        for idx in 1..t.d() {
            let profile = decay_profile(t, idx, 200).expect("valid index");
            let max = profile.iter().fold(0.0f64, |a, &b| a.max(b));
            if max >= 1e-9 {
                bad.push(format!("boundary {i} i={idx}: max {max:.3e}"));
            }
        }
    }
    announce(
        "decay profiles (pure vanish at j=200, unitary stay flat)",
        bad.is_empty(),
        &format!("{} violations", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_06_fundamental_operators() {
    let mut instances = pure_family();
    instances.extend(boundary_family());
    instances.extend(mixed_family());
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (i, t) in instances.iter().enumerate() {
        assert!(t.is_constructed());
        let fo = fundamental_operators(t, defaults::DEFECT_RANK_TOL).expect("defect exists");
        for (idx, &res) in fo.residuals.iter().enumerate() {
            let gate = 1e-8 * (1.0 + op_norm(&t.s()[idx]));
            worst = worst.max(res / gate);
            if res > gate {
                bad.push(format!("instance {i} i={}: residual {res:.3e}", idx + 1));
            }
        }
    }
    // Scalar d = 2 closed form to 1e-12.
    let mut worst_scalar = 0.0f64;
    for (sk, pk) in [
        (Complex64::new(0.3, 0.4), Complex64::new(0.1, -0.6)),
        (Complex64::new(-0.7, 0.1), Complex64::new(0.5, 0.2)),
        (Complex64::new(0.0, 0.9), Complex64::new(0.0, 0.0)),
    ] {
        let t = GammaTuple::new(
            vec![array![[sk]]],
            array![[pk]],
            Certificate::NecessaryChecksOnly,
            1e-10,
        )
        .unwrap();
        let fo = fundamental_operators(&t, defaults::DEFECT_RANK_TOL).unwrap();
        let want = (sk - sk.conj() * pk) / (1.0 - pk.norm_sqr());
        worst_scalar = worst_scalar.max((fo.f[0][(0, 0)] - want).norm());
    }
    announce(
        "fundamental operators (residuals and scalar closed form)",
        bad.is_empty() && worst_scalar < 1e-12,
        &format!("worst residual ratio {worst:.3e}, scalar dev {worst_scalar:.3e}"),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_07_commutant_lifting() {
    let mut lifted = 0usize;
    let mut bad = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(0x11F7);
    'outer: for (i, t) in non_pure_instances().iter().enumerate() {
        let ext = canonical_extension(t, defaults::q_rank_tol(t.n())).expect("non-pure");
        let cb = commutant(&t.members(), default_null_tol(t.n())).expect("square members");
        for _ in 0..3 {
            if lifted >= 100 {
                break 'outer;
            }
            let x = cb.sample(&mut rng);
            lifted += 1;
            match lift_commutant(&ext, &x, defaults::GATE_TOL) {
                Ok(lift) => {
                    if lift.norm_y > lift.norm_x + 1e-9 * (1.0 + lift.norm_x) {
                        bad.push(format!(
                            "instance {i}: norm grew {:.3e} -> {:.3e}",
                            lift.norm_x, lift.norm_y
                        ));
                    }
                    if lift.intertwine_residual >= 1e-8 {
                        bad.push(format!(
                            "instance {i}: intertwine residual {:.3e}",
                            lift.intertwine_residual
                        ));
                    }
                    match theta(&ext, &x, defaults::GATE_TOL) {
                        Ok(th) => {
                            let dev = fro_norm(&(&lift.y - &th));
                            if dev > 1e-8 * (1.0 + lift.norm_x) {
                                bad.push(format!("instance {i}: routes differ by {dev:.3e}"));
                            }
                        }
                        Err(e) => bad.push(format!("instance {i}: theta failed ({e})")),
                    }
                }
                Err(e) => bad.push(format!("instance {i}: lift failed ({e})")),
            }
        }
    }
    // Intertwining corollary on rotated copies.
    for (j, t) in mixed_family().iter().take(5).enumerate() {
        let ext = canonical_extension(t, defaults::q_rank_tol(t.n())).expect("non-pure");
        let w = haar_unitary(&mut rng, t.n());
        let t2 = t.conjugated(&w, defaults::GATE_TOL).expect("conjugation");
        let ext2 = canonical_extension(&t2, defaults::q_rank_tol(t.n())).expect("non-pure");
        match lift_intertwiner(&ext, &ext2, &w, defaults::GATE_TOL) {
            Ok(lift) => {
                if (lift.norm_y - 1.0).abs() > 1e-8 || lift.intertwine_residual > 1e-8 {
                    bad.push(format!(
                        "rotated fixture {j}: norm {:.12}, residual {:.3e}",
                        lift.norm_y, lift.intertwine_residual
                    ));
                }
            }
            Err(e) => bad.push(format!("rotated fixture {j}: {e}")),
        }
    }
    announce(
        "commutant lifting (norm bound, intertwining, route agreement)",
        bad.is_empty() && lifted >= 100,
        &format!("{lifted} lifts, {} failures", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

#[test]
fn acceptance_08_exact_kernel_dimensions() {
    use exact_oracle::*;

    // Each fixture entry is a dyadic Gaussian rational (num, pow2) pair for
    // the real and imaginary parts, so the f64 twin is bit-exact.
    type E = ((i64, u32), (i64, u32));
    fn build(entries: &[Vec<E>]) -> (QMat, CMatrix) {
        let n = entries.len();
        let mut q = qmat_zero(n, n);
        let mut f = gammadisc::matrixkit::zeros(n, n);
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &((rn, rp), (in_, ip))) in row.iter().enumerate() {
                let re = dy(rn, rp);
                let im = dy(in_, ip);
                f[(i, j)] = Complex64::new(to_f64(&re), to_f64(&im));
                q[i][j] = qc(re, im);
            }
        }
        (q, f)
    }

    let z: E = ((0, 0), (0, 0));
    let one: E = ((1, 0), (0, 0));
    let two: E = ((2, 0), (0, 0));
    let half: E = ((1, 1), (0, 0));
    let quarter: E = ((1, 2), (0, 0));
    let im_one: E = ((0, 0), (1, 0));
    let neg_one: E = ((-1, 0), (0, 0));
    let neg_im: E = ((0, 0), (-1, 0));

    let fixtures: Vec<(Vec<Vec<E>>, Vec<Vec<E>>)> = vec![
        // scalars
        (vec![vec![one]], vec![vec![one]]),
        (vec![vec![half]], vec![vec![half]]),
        // 2x2 commuting pairs
        (vec![vec![two, z], vec![z, two]], vec![vec![one, z], vec![z, one]]),
        (vec![vec![z, z], vec![z, z]], vec![vec![z, z], vec![z, z]]),
        (vec![vec![two, z], vec![z, z]], vec![vec![one, z], vec![z, neg_one]]),
        (
            vec![vec![half, quarter], vec![z, half]],
            vec![vec![half, half], vec![z, half]],
        ),
        (
            vec![vec![half, quarter], vec![z, half]],
            vec![vec![one, z], vec![z, one]],
        ),
        // 3x3
        (
            vec![
                vec![two, z, z],
                vec![z, ((1, 0), (1, 0)), z],
                vec![z, z, ((-1, 0), (1, 0))],
            ],
            vec![vec![one, z, z], vec![z, im_one, z], vec![z, z, neg_im]],
        ),
        (
            vec![vec![two, z, z], vec![z, two, z], vec![z, z, ((3, 2), (0, 0))]],
            vec![vec![one, z, z], vec![z, one, z], vec![z, z, half]],
        ),
        (
            vec![
                vec![half, quarter, z],
                vec![z, half, z],
                vec![z, z, two],
            ],
            vec![vec![half, half, z], vec![z, half, z], vec![z, z, one]],
        ),
    ];
    assert_eq!(fixtures.len(), 10);

    let mut bad = Vec::new();
    for (idx, (s_entries, p_entries)) in fixtures.iter().enumerate() {
        let (s_q, s_f) = build(s_entries);
        let (p_q, p_f) = build(p_entries);
        let n = s_f.nrows();
        let exact_bh = bh_kernel_dim_exact(&s_q, &p_q);
        let exact_comm = commutant_dim_exact(&[s_q.clone(), p_q.clone()]);
        let t = GammaTuple::new(
            vec![s_f.clone()],
            p_f.clone(),
            Certificate::NecessaryChecksOnly,
            1e-10,
        )
        .expect("fixtures commute exactly");
        let float_bh = toeplitz_space(&t, default_null_tol(n)).dim();
        let float_comm = commutant(&t.members(), default_null_tol(n))
            .expect("square members")
            .dim();
        if float_bh != exact_bh || float_comm != exact_comm {
            bad.push(format!(
                "fixture {idx}: float ({float_bh}, {float_comm}) vs exact ({exact_bh}, {exact_comm})"
            ));
        }
        // Hand-derived spot checks.
        match idx {
            2 => assert_eq!((exact_bh, exact_comm), (4, 4)),
            4 => assert_eq!((exact_bh, exact_comm), (2, 2)),
            7 => assert_eq!((exact_bh, exact_comm), (3, 3)),
            8 => assert_eq!((exact_bh, exact_comm), (4, 5)),
            _ => {}
        }
    }
    announce(
        "floating kernel dimensions match the exact-arithmetic oracle",
        bad.is_empty(),
        &format!("10 fixtures, {} mismatches", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}

fn match_point_multisets(a: &[GammaPoint], b: &[GammaPoint], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let dist = |x: &GammaPoint, y: &GammaPoint| -> f64 {
        let mut d = (x.p - y.p).norm();
        for (u, v) in x.s.iter().zip(&y.s) {
            d = d.max((u - v).norm());
        }
        d
    };
    let mut used = vec![false; b.len()];
    for pa in a {
        let mut best: Option<(usize, f64)> = None;
        for (j, pb) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dd = dist(pa, pb);
            if best.map_or(true, |(_, bd)| dd < bd) {
                best = Some((j, dd));
            }
        }
        match best {
            Some((j, dd)) if dd <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}

#[test]
fn acceptance_09_extension_uniqueness() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x9E55);
    let mut bad = Vec::new();
    for (i, t) in non_pure_instances().iter().enumerate() {
        let e1 = canonical_extension(t, defaults::q_rank_tol(t.n())).expect("non-pure");
        let w0 = haar_unitary(&mut rng, e1.rank);
        let basis2 = e1.basis.dot(&w0);
        let e2 = canonical_extension_with_basis(t, &basis2, 10.0 * defaults::q_rank_tol(t.n()))
            .expect("rotated basis spans the same range");
        match extension_isomorphism(&e1, &e2, 1e-7) {
            Ok(w) => {
                let r = e1.rank;
                let unitary_res = fro_norm(&(adjoint(&w).dot(&w) - gammadisc::matrixkit::eye(r)));
                if unitary_res > 1e-9 {
                    bad.push(format!("instance {i}: intertwiner not unitary ({unitary_res:.3e})"));
                }
                let pts1 = e1.joint_points(defaults::GATE_TOL).expect("normal extension");
                let pts2 = e2.joint_points(defaults::GATE_TOL).expect("normal extension");
                if !match_point_multisets(&pts1, &pts2, 1e-7) {
                    bad.push(format!("instance {i}: joint spectra differ"));
                }
            }
            Err(e) => bad.push(format!("instance {i}: {e}")),
        }
    }
    announce(
        "extension uniqueness across basis and rank choices",
        bad.is_empty(),
        &format!("{} failures", bad.len()),
    );
    for b in bad {
        eprintln!("{b}");
    }
}
