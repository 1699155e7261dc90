//! Python module `k3tau_py`. Reports come back as plain dicts and lists.

use k3tau::hyperkahler::{compatible_frames, HKFrame, InvolutionAction, Tolerance};
use k3tau::lattice::{self, eigenlattice, enriques_involution, IntMatrix, LatticeIsometry, StandardLattice};
use k3tau::period::{period_of, PeriodContext};
use k3tau::spectral::{
    self, build_model_spectrum_for_tolerance, CurveData, ModelSpec, SpectrumEntry, TorusCharacter, ZetaOptions,
};
use k3tau::ErrorKind;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn raise(kind: ErrorKind, message: String) -> PyErr {
    match kind {
        ErrorKind::Input => PyValueError::new_err(message),
        ErrorKind::Accuracy => PyArithmeticError::new_err(message),
        ErrorKind::Geometry => PyRuntimeError::new_err(message),
    }
}

macro_rules! py_err {
    ($e:expr) => {{
        let e = $e;
        raise(e.kind(), e.to_string())
    }};
}

fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn options(tol: f64) -> PyResult<ZetaOptions> {
    ZetaOptions::new(tol).map_err(|e| py_err!(e))
}

#[pyclass(name = "Lattice", frozen)]
struct PyLattice(lattice::Lattice);

#[pymethods]
impl PyLattice {
    #[new]
    fn new(gram: Vec<Vec<i64>>) -> PyResult<Self> {
        let m = IntMatrix::from_rows(&gram).map_err(|e| py_err!(e))?;
        lattice::Lattice::new(m).map(Self).map_err(|e| py_err!(e))
    }

    /// `"U"`, `"E8minus"` or `"K3"`.
    #[staticmethod]
    fn standard(name: &str) -> PyResult<Self> {
        let which: StandardLattice = name.parse().map_err(|e: lattice::LatticeError| py_err!(e))?;
        Ok(Self(lattice::Lattice::standard(which)))
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn signature(&self) -> PyResult<(usize, usize)> {
        let s = self.0.signature().map_err(|e| py_err!(e))?;
        Ok((s.positive, s.negative))
    }

    fn determinant<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        py.import("builtins")?.getattr("int")?.call1((self.0.determinant().to_string(),))
    }

    fn discriminant<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.discriminant_info().map_err(|e| py_err!(e))?)
    }

    fn gram(&self) -> Vec<Vec<i64>> {
        self.0.gram().to_rows()
    }
}

/// Invariants of the `+1` and `-1` eigenlattices of an involution of the K3 lattice.
/// Without a matrix the Enriques involution is used.
#[pyfunction]
#[pyo3(signature = (matrix=None))]
fn involution_report<'py>(py: Python<'py>, matrix: Option<Vec<Vec<i64>>>) -> PyResult<Bound<'py, PyAny>> {
    let f = match matrix {
        Some(rows) => {
            let m = IntMatrix::from_rows(&rows).map_err(|e| py_err!(e))?;
            LatticeIsometry::new(m, lattice::Lattice::standard(StandardLattice::K3)).map_err(|e| py_err!(e))?
        }
        None => enriques_involution(),
    };
    if !f.is_involution() {
        return Err(PyValueError::new_err("matrix does not square to the identity"));
    }
    #[derive(Serialize)]
    struct Part {
        rank: usize,
        signature: (usize, usize),
        elementary_divisors: Vec<u64>,
        a: usize,
        two_elementary: bool,
        hyperbolic: bool,
        primitive: bool,
    }
    let part = |sign| -> Result<Part, lattice::LatticeError> {
        let s = eigenlattice(&f, sign)?;
        let sig = s.signature()?;
        let d = s.discriminant_info()?;
        Ok(Part {
            rank: s.rank(),
            signature: (sig.positive, sig.negative),
            elementary_divisors: d.elementary_divisors,
            a: d.a_invariant,
            two_elementary: d.is_two_elementary,
            hyperbolic: s.is_hyperbolic_type()?,
            primitive: s.is_primitive(),
        })
    };
    #[derive(Serialize)]
    struct Report {
        invariant: Part,
        anti_invariant: Part,
    }
    let report = Report {
        invariant: part(1).map_err(|e| py_err!(e))?,
        anti_invariant: part(-1).map_err(|e| py_err!(e))?,
    };
    to_py(py, &report)
}

/// Period pair of the rotated model frame `compatible_frames(F0, branch, psi)` for the
/// Enriques involution with the identity marking.
#[pyfunction]
#[pyo3(signature = (branch=1, psi=0.0))]
fn enriques_period<'py>(py: Python<'py>, branch: i8, psi: f64) -> PyResult<Bound<'py, PyAny>> {
    let f = enriques_involution();
    let t = InvolutionAction::from_isometry(&f).map_err(|e| py_err!(e))?;
    let tol = Tolerance::default();
    let frame =
        compatible_frames(&HKFrame::enriques_model(), &t, branch, psi, tol).map_err(|e| py_err!(e))?;
    let m = eigenlattice(&f, 1).map_err(|e| py_err!(e))?;
    let ctx = PeriodContext::for_sublattice(m).map_err(|e| py_err!(e))?;
    let alpha = LatticeIsometry::identity(f.domain());
    let pair = period_of(&frame, &t, &alpha, &ctx, tol).map_err(|e| py_err!(e))?;
    #[derive(Serialize)]
    struct Report<'a> {
        pair: &'a k3tau::period::PeriodPair,
        isotropy: (f64, f64),
    }
    to_py(py, &Report { pair: &pair, isotropy: (pair.plus.isotropy_ratio(), pair.minus.isotropy_ratio()) })
}

#[pyclass(name = "EquivariantSpectrum", frozen)]
struct PySpectrum(spectral::EquivariantSpectrum);

#[pymethods]
impl PySpectrum {
    /// A finite spectrum from `(lambda, mult_plus, mult_minus)` triples.
    #[staticmethod]
    #[pyo3(signature = (entries, kernel=(0, 0)))]
    fn finite(entries: Vec<(f64, u64, u64)>, kernel: (u64, u64)) -> PyResult<Self> {
        let entries = entries.into_iter().map(|(l, p, m)| SpectrumEntry::new(l, p, m)).collect();
        spectral::EquivariantSpectrum::finite(entries, kernel).map(Self).map_err(|e| py_err!(e))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        spectral::EquivariantSpectrum::from_json(text).map(Self).map_err(|e| py_err!(e))
    }

    /// Round sphere with the antipodal map (`parity_sign=-1`) or the identity (`+1`).
    #[staticmethod]
    #[pyo3(signature = (radius=1.0, parity_sign=-1, tol=1e-8, max_terms=100_000))]
    fn sphere(radius: f64, parity_sign: i8, tol: f64, max_terms: usize) -> PyResult<Self> {
        let model = ModelSpec::RoundSphere { radius, parity_sign };
        build_model_spectrum_for_tolerance(&model, options(tol)?, max_terms).map(Self).map_err(|e| py_err!(e))
    }

    /// Flat torus with eigenvalues `m^T Q^-1 m / 2`; `half_shift=k` makes the involution
    /// the half translation along the k-th basis vector, `None` the identity.
    #[staticmethod]
    #[pyo3(signature = (gram, half_shift=None, reflection=false, tol=1e-8, max_terms=100_000))]
    fn torus(
        gram: Vec<Vec<f64>>,
        half_shift: Option<usize>,
        reflection: bool,
        tol: f64,
        max_terms: usize,
    ) -> PyResult<Self> {
        let character = match (half_shift, reflection) {
            (Some(_), true) => return Err(PyValueError::new_err("choose a half shift or the reflection, not both")),
            (Some(k), false) => TorusCharacter::HalfShift(k),
            (None, true) => TorusCharacter::Reflection,
            (None, false) => TorusCharacter::Trivial,
        };
        let model = ModelSpec::FlatTorus { gram, character };
        build_model_spectrum_for_tolerance(&model, options(tol)?, max_terms).map(Self).map_err(|e| py_err!(e))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.0.entries().len()
    }

    #[pyo3(signature = (sign, tol=1e-8))]
    fn zeta<'py>(&self, py: Python<'py>, sign: i8, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::zeta_signed(&self.0, sign, options(tol)?).map_err(|e| py_err!(e))?)
    }

    #[pyo3(signature = (q, tol=1e-8))]
    fn dolbeault_zeta<'py>(&self, py: Python<'py>, q: u8, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::dolbeault_zeta(&self.0, q, options(tol)?).map_err(|e| py_err!(e))?)
    }

    #[pyo3(signature = (tol=1e-8))]
    fn determinant<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::equivariant_determinant(&self.0, options(tol)?).map_err(|e| py_err!(e))?)
    }

    #[pyo3(signature = (tol=1e-8))]
    fn torsion<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::equivariant_torsion(&self.0, options(tol)?).map_err(|e| py_err!(e))?)
    }

    /// `tau_iota`; `curves_json` has the shape `{"curves": [{"volume": v, "spectrum": {...}}]}`.
    #[pyo3(signature = (curves_json=None, tol=1e-8))]
    fn tau<'py>(&self, py: Python<'py>, curves_json: Option<&str>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let curves: Option<CurveData> = curves_json
            .map(serde_json::from_str)
            .transpose()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        to_py(py, &spectral::tau_iota(&self.0, curves.as_ref(), options(tol)?).map_err(|e| py_err!(e))?)
    }
}

/// Norm of the automorphic form implied by `tau`, and its round trip.
#[pyfunction]
#[pyo3(signature = (tau, nu=1, constant=None))]
fn borcherds_report<'py>(py: Python<'py>, tau: f64, nu: u32, constant: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &spectral::borcherds_report(tau, nu, constant).map_err(|e| py_err!(e))?)
}

#[pymodule]
fn k3tau_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(involution_report, m)?)?;
    m.add_function(wrap_pyfunction!(enriques_period, m)?)?;
    m.add_function(wrap_pyfunction!(borcherds_report, m)?)?;
    Ok(())
}
