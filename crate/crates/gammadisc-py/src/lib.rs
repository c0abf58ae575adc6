//! Python bindings: the tuple and extension types plus the main operations,
//! with matrices crossing the boundary as lists of lists of complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gammadisc::asymptotics;
use gammadisc::defaults;
use gammadisc::dilation;
use gammadisc::gamma;
use gammadisc::instance::InstanceFile;
use gammadisc::lifting;
use gammadisc::matrixkit::{zeros, CMatrix};
use gammadisc::toeplitz;

type PyMatrix = Vec<Vec<Complex64>>;

fn to_cmatrix(m: &PyMatrix) -> PyResult<CMatrix> {
    let rows = m.len();
    if rows == 0 {
        return Err(PyValueError::new_err("matrix must be non-empty"));
    }
    let cols = m[0].len();
    if cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix rows must be non-empty and equal"));
    }
    let mut out = zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, &z) in row.iter().enumerate() {
            out[(i, j)] = z;
        }
    }
    Ok(out)
}

fn from_cmatrix(m: &CMatrix) -> PyMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A commuting matrix tuple (S_1, ..., S_{d-1}, P) with certification
/// metadata.
#[pyclass(name = "GammaTuple", skip_from_py_object)]
#[derive(Clone)]
struct PyGammaTuple {
    inner: gamma::GammaTuple,
}

#[pymethods]
impl PyGammaTuple {
    /// Seeded generator; kind is one of "normal-boundary", "normal-interior",
    /// "mixed-purity", "ando2".
    #[staticmethod]
    fn generate(d: usize, n: usize, kind: &str, seed: u64) -> PyResult<Self> {
        let kind: gamma::TupleKind = kind.parse().map_err(err)?;
        Ok(Self {
            inner: gamma::random_gamma_tuple(d, n, kind, seed).map_err(err)?,
        })
    }

    /// Validates raw matrices (commutation and contraction gates) into a tuple.
    #[staticmethod]
    #[pyo3(signature = (s, p, tol = defaults::GATE_TOL))]
    fn from_matrices(s: Vec<PyMatrix>, p: PyMatrix, tol: f64) -> PyResult<Self> {
        let s = s.iter().map(to_cmatrix).collect::<PyResult<Vec<_>>>()?;
        let p = to_cmatrix(&p)?;
        Ok(Self {
            inner: gamma::GammaTuple::new(s, p, gamma::Certificate::NecessaryChecksOnly, tol)
                .map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = InstanceFile::from_json(text).map_err(err)?;
        Ok(Self {
            inner: file.to_tuple(defaults::GATE_TOL).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        InstanceFile::from_tuple(&self.inner).to_json()
    }

    fn digest(&self) -> String {
        InstanceFile::from_tuple(&self.inner).digest()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> Vec<PyMatrix> {
        self.inner.s().iter().map(from_cmatrix).collect()
    }

    #[getter]
    fn p(&self) -> PyMatrix {
        from_cmatrix(self.inner.p())
    }

    #[getter]
    fn certificate(&self) -> String {
        match self.inner.certificate() {
            gamma::Certificate::Constructed(src) => format!("constructed:{src}"),
            gamma::Certificate::NecessaryChecksOnly => "necessary-checks-only".into(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "GammaTuple(d={}, n={}, certificate='{}')",
            self.inner.d(),
            self.inner.n(),
            self.certificate()
        )
    }
}

/// The canonical extension (R, U) with module map J on the range of Q.
#[pyclass(name = "CanonicalExtension")]
struct PyCanonicalExtension {
    inner: dilation::CanonicalExtension,
}

#[pymethods]
impl PyCanonicalExtension {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn j(&self) -> PyMatrix {
        from_cmatrix(&self.inner.j)
    }

    #[getter]
    fn r(&self) -> Vec<PyMatrix> {
        self.inner.r_tuple.iter().map(from_cmatrix).collect()
    }

    #[getter]
    fn u(&self) -> PyMatrix {
        from_cmatrix(&self.inner.u)
    }

    #[getter]
    fn q(&self) -> PyMatrix {
        from_cmatrix(&self.inner.q)
    }

    fn __repr__(&self) -> String {
        format!("CanonicalExtension(rank={})", self.inner.rank)
    }
}

/// Membership of the point (s_1, ..., s_{d-1}, p) in the closed symmetrized
/// polydisc, by companion-matrix root bounds.
#[pyfunction]
#[pyo3(signature = (s, p, tol = defaults::GATE_TOL))]
fn point_in_gamma(s: Vec<Complex64>, p: Complex64, tol: f64) -> PyResult<bool> {
    let pt = gamma::GammaPoint::new(s, p).map_err(err)?;
    Ok(gamma::point_in_gamma(&pt, tol))
}

#[pyfunction]
#[pyo3(signature = (s, p, tol = defaults::GATE_TOL))]
fn point_in_boundary(s: Vec<Complex64>, p: Complex64, tol: f64) -> PyResult<bool> {
    let pt = gamma::GammaPoint::new(s, p).map_err(err)?;
    Ok(gamma::point_in_boundary(&pt, tol))
}

/// Asymptotic limit of P*^k P^k: returns (Q, doublings, residual).
#[pyfunction]
fn compute_q(t: &PyGammaTuple) -> PyResult<(PyMatrix, usize, f64)> {
    let al = asymptotics::compute_q_default(&t.inner).map_err(err)?;
    Ok((from_cmatrix(&al.q), al.iterations, al.residual))
}

#[pyfunction]
#[pyo3(signature = (t, tol = defaults::PURE_TOL))]
fn is_pure(t: &PyGammaTuple, tol: f64) -> PyResult<bool> {
    asymptotics::is_pure(&t.inner, tol).map_err(err)
}

#[pyfunction]
fn decay_profile(t: &PyGammaTuple, i: usize, j_max: usize) -> PyResult<Vec<f64>> {
    asymptotics::decay_profile(&t.inner, i, j_max).map_err(err)
}

/// Fundamental operators: returns (compressed F list, defect matrix, residuals).
#[pyfunction]
#[pyo3(signature = (t, rank_tol = defaults::DEFECT_RANK_TOL))]
fn fundamental_operators(
    t: &PyGammaTuple,
    rank_tol: f64,
) -> PyResult<(Vec<PyMatrix>, PyMatrix, Vec<f64>)> {
    let fo = asymptotics::fundamental_operators(&t.inner, rank_tol).map_err(err)?;
    Ok((
        fo.f.iter().map(from_cmatrix).collect(),
        from_cmatrix(&fo.defect),
        fo.residuals.clone(),
    ))
}

#[pyfunction]
#[pyo3(signature = (t, rank_tol = None))]
fn canonical_extension(t: &PyGammaTuple, rank_tol: Option<f64>) -> PyResult<PyCanonicalExtension> {
    let rank_tol = rank_tol.unwrap_or_else(|| defaults::q_rank_tol(t.inner.n()));
    Ok(PyCanonicalExtension {
        inner: dilation::canonical_extension(&t.inner, rank_tol).map_err(err)?,
    })
}

#[pyfunction]
fn classify_gamma_unitary(t: &PyGammaTuple) -> PyResult<bool> {
    gamma::classify_gamma_unitary(&t.inner, defaults::GATE_TOL).map_err(err)
}

/// Basis of the space cut out by the Brown-Halmos relations.
#[pyfunction]
fn toeplitz_basis(t: &PyGammaTuple) -> Vec<PyMatrix> {
    let tb = toeplitz::toeplitz_space(
        &t.inner,
        gammadisc::matrixkit::default_null_tol(t.inner.n()),
    );
    tb.basis.iter().map(from_cmatrix).collect()
}

#[pyfunction]
fn toeplitz_dim(t: &PyGammaTuple) -> usize {
    toeplitz::toeplitz_space(
        &t.inner,
        gammadisc::matrixkit::default_null_tol(t.inner.n()),
    )
    .dim()
}

#[pyfunction]
fn commutant_dim(ext: &PyCanonicalExtension) -> PyResult<usize> {
    toeplitz::commutant(
        &ext.inner.members(),
        gammadisc::matrixkit::default_null_tol(ext.inner.rank),
    )
    .map(|cb| cb.dim())
    .map_err(err)
}

/// Compression J* Y J of an extension-commutant element.
#[pyfunction]
#[pyo3(signature = (ext, y, tol = defaults::GATE_TOL))]
fn rho(ext: &PyCanonicalExtension, y: PyMatrix, tol: f64) -> PyResult<PyMatrix> {
    let y = to_cmatrix(&y)?;
    Ok(from_cmatrix(&toeplitz::rho(&ext.inner, &y, tol).map_err(err)?))
}

/// Inverse of rho: the norm-preserving commutant representative of a
/// Toeplitz operator.
#[pyfunction]
#[pyo3(signature = (ext, a, tol = defaults::GATE_TOL))]
fn toeplitz_symbol(ext: &PyCanonicalExtension, a: PyMatrix, tol: f64) -> PyResult<PyMatrix> {
    let a = to_cmatrix(&a)?;
    Ok(from_cmatrix(
        &toeplitz::toeplitz_symbol(&ext.inner, &a, tol).map_err(err)?,
    ))
}

/// Unital multiplicative lift of a source-commutant element.
#[pyfunction]
#[pyo3(signature = (ext, x, tol = defaults::GATE_TOL))]
fn theta(ext: &PyCanonicalExtension, x: PyMatrix, tol: f64) -> PyResult<PyMatrix> {
    let x = to_cmatrix(&x)?;
    Ok(from_cmatrix(&toeplitz::theta(&ext.inner, &x, tol).map_err(err)?))
}

/// Commutant lift: returns (Y, norm_x, norm_y, intertwine_residual).
#[pyfunction]
#[pyo3(signature = (ext, x, tol = defaults::GATE_TOL))]
fn lift_commutant(
    ext: &PyCanonicalExtension,
    x: PyMatrix,
    tol: f64,
) -> PyResult<(PyMatrix, f64, f64, f64)> {
    let x = to_cmatrix(&x)?;
    let lift = lifting::lift_commutant(&ext.inner, &x, tol).map_err(err)?;
    Ok((
        from_cmatrix(&lift.y),
        lift.norm_x,
        lift.norm_y,
        lift.intertwine_residual,
    ))
}

/// Run verification suites ("thm1", "thm2", "lift", "decay", "fo", "choi");
/// returns the JSON report document as a string.
#[pyfunction]
#[pyo3(signature = (t, which = None, tol = defaults::GATE_TOL, seed = 17))]
fn verify(t: &PyGammaTuple, which: Option<Vec<String>>, tol: f64, seed: u64) -> PyResult<String> {
    let all = ["thm1", "thm2", "lift", "decay", "fo", "choi"];
    let selected = which.unwrap_or_else(|| all.iter().map(|s| s.to_string()).collect());
    let mut report = gammadisc::report::VerificationReport::new();
    for suite in &selected {
        let part = match suite.as_str() {
            "thm1" => dilation::verify_equivalence(&t.inner, tol),
            "thm2" => toeplitz::verify_symbol_correspondence(&t.inner, tol.max(1e-7)),
            "lift" => lifting::verify_lifting(&t.inner, 5, seed, tol),
            "decay" => asymptotics::verify_decay(&t.inner, 200, tol),
            "fo" => asymptotics::verify_fundamental(&t.inner, defaults::DEFECT_RANK_TOL, tol),
            "choi" => toeplitz::verify_projection(t.inner.p(), 50, seed, tol),
            other => return Err(PyValueError::new_err(format!("unknown suite '{other}'"))),
        };
        report.merge(part.prefixed(suite));
    }
    let doc = serde_json::json!({
        "schema": "gammadisc/1",
        "digest": t.digest(),
        "global": if report.passed() { "pass" } else { "fail" },
        "tolerance": tol,
        "checks": report.checks,
    });
    Ok(doc.to_string())
}

#[pymodule]
fn gammadisc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGammaTuple>()?;
    m.add_class::<PyCanonicalExtension>()?;
    m.add_function(wrap_pyfunction!(point_in_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(point_in_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(compute_q, m)?)?;
    m.add_function(wrap_pyfunction!(is_pure, m)?)?;
    m.add_function(wrap_pyfunction!(decay_profile, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_operators, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_extension, m)?)?;
    m.add_function(wrap_pyfunction!(classify_gamma_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(toeplitz_basis, m)?)?;
    m.add_function(wrap_pyfunction!(toeplitz_dim, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_dim, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(toeplitz_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(lift_commutant, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
