//! Hyper-Kähler triples as linear algebra.
//!
//! Two settings live here. [`FlatModel`] is a single tangent space `R^4`
//! with a metric and three complex structures. [`HKFrame`] is the
//! cohomological picture: three vectors of self-pairing 2 spanning a
//! positive 3-plane inside a real quadratic space (by default the K3 form).

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeIsometry, StandardLattice};
use crate::ErrorKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("geometry check failed: {0}")]
    Geometry(String),
    #[error("involution is not hyperbolic on the frame: eigenvalue pattern {0}")]
    NotHyperbolic(String),
}

impl FrameError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Self::Input(_) => ErrorKind::Input,
            Self::Geometry(_) | Self::NotHyperbolic(_) => ErrorKind::Geometry,
        }
    }
}

/// Absolute tolerance for floating-point frame checks.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(value: f64) -> Result<Self, FrameError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(FrameError::Input(format!("tolerance must be positive and finite, got {value}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(1e-10)
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// Flat model

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    I,
    J,
    K,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatModel {
    metric: Matrix4<f64>,
    i: Matrix4<f64>,
    j: Matrix4<f64>,
    k: Matrix4<f64>,
}

/// Left multiplication by `i` and `j` on the quaternions in the basis `(1, i, j, k)`.
fn left_i() -> Matrix4<f64> {
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

fn left_j() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

pub fn standard_flat_model() -> FlatModel {
    let (i, j) = (left_i(), left_j());
    FlatModel { metric: Matrix4::identity(), i, j, k: i * j }
}

impl FlatModel {
    /// Validates the quaternion relations and metric compatibility.
    pub fn new(
        metric: Matrix4<f64>,
        i: Matrix4<f64>,
        j: Matrix4<f64>,
        k: Matrix4<f64>,
        tol: Tolerance,
    ) -> Result<Self, FrameError> {
        let t = tol.get();
        let id = Matrix4::<f64>::identity();
        if max_abs((metric - metric.transpose()).iter().copied()) > t {
            return Err(FrameError::Input("metric is not symmetric".into()));
        }
        if metric.cholesky().is_none() {
            return Err(FrameError::Input("metric is not positive definite".into()));
        }
        for (name, s) in [("I", &i), ("J", &j), ("K", &k)] {
            if max_abs((s * s + id).iter().copied()) > t {
                return Err(FrameError::Input(format!("{name}^2 is not -1")));
            }
            if max_abs((s.transpose() * metric * s - metric).iter().copied()) > t {
                return Err(FrameError::Input(format!("{name} does not preserve the metric")));
            }
        }
        if max_abs((i * j - k).iter().copied()) > t || max_abs((j * i + k).iter().copied()) > t {
            return Err(FrameError::Input("structures violate IJ = -JI = K".into()));
        }
        Ok(Self { metric, i, j, k })
    }

    pub fn metric(&self) -> &Matrix4<f64> {
        &self.metric
    }

    pub fn structure(&self, s: Structure) -> &Matrix4<f64> {
        match s {
            Structure::I => &self.i,
            Structure::J => &self.j,
            Structure::K => &self.k,
        }
    }

    /// Same complex structures with the metric multiplied by `c > 0`.
    pub fn rescaled(&self, c: f64) -> Result<Self, FrameError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(FrameError::Input(format!("scale must be positive, got {c}")));
        }
        Ok(Self { metric: self.metric * c, ..self.clone() })
    }

    /// Coefficient of the volume form `sqrt(det g) e1^e2^e3^e4`.
    pub fn volume_coefficient(&self) -> f64 {
        self.metric.determinant().sqrt()
    }
}

/// Matrix `W` of the Kähler form `w(u, v) = g(Su, v) = u^T W v`, i.e. `W = S^T G`.
pub fn two_form_of(m: &FlatModel, s: Structure) -> Matrix4<f64> {
    m.structure(s).transpose() * m.metric
}

/// Pfaffian of an antisymmetric 4x4 matrix.
pub fn pfaffian(w: &Matrix4<f64>) -> f64 {
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// Coefficient of `e1^e2^e3^e4` in `w ^ w`.
pub fn wedge_square(w: &Matrix4<f64>) -> f64 {
    2.0 * pfaffian(w)
}

/// Outcome of the anti-holomorphic sign check on the flat model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AntiholomorphicReport {
    /// Largest entry of `(s^*g)(J., .) + (s^*w_J)(., .)` over basis pairs.
    pub max_deviation: f64,
}

/// Checks that for an involutive isometry `s` anticommuting with `J`, the pullback
/// `(s^*g)(Ju, v)` equals `-(s^*w_J)(u, v)` on all basis pairs.
pub fn check_antiholomorphic_sign(
    m: &FlatModel,
    s: &Matrix4<f64>,
    tol: Tolerance,
) -> Result<AntiholomorphicReport, FrameError> {
    let t = tol.get();
    let g = m.metric;
    let j = m.j;
    if max_abs((s * s - Matrix4::identity()).iter().copied()) > t {
        return Err(FrameError::Input("s is not an involution".into()));
    }
    if max_abs((s.transpose() * g * s - g).iter().copied()) > t {
        return Err(FrameError::Input("s is not an isometry of the metric".into()));
    }
    if max_abs((s * j + j * s).iter().copied()) > t {
        return Err(FrameError::Input("s does not anticommute with J".into()));
    }
    let pulled_metric = s.transpose() * g * s;
    let lhs = j.transpose() * pulled_metric;
    let rhs = -(s.transpose() * two_form_of(m, Structure::J) * s);
    Ok(AntiholomorphicReport { max_deviation: max_abs((lhs - rhs).iter().copied()) })
}

// ---------------------------------------------------------------------------
// Rotations

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationSO3(Matrix3<f64>);

impl RotationSO3 {
    pub fn new(m: Matrix3<f64>, tol: Tolerance) -> Result<Self, FrameError> {
        let dev = max_abs((m.transpose() * m - Matrix3::identity()).iter().copied());
        if !dev.is_finite() || dev > tol.get() {
            return Err(FrameError::Input(format!("rotation is not orthogonal (deviation {dev:e})")));
        }
        if (m.determinant() - 1.0).abs() > tol.get() {
            return Err(FrameError::Input("rotation has determinant -1".into()));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Right-handed rotation by `angle` about a unit axis.
    pub fn about_axis(axis: &Vector3<f64>, angle: f64) -> Result<Self, FrameError> {
        let u = nalgebra::Unit::try_new(*axis, 1e-300)
            .ok_or_else(|| FrameError::Input("rotation axis is zero".into()))?;
        Ok(Self(*nalgebra::Rotation3::from_axis_angle(&u, angle).matrix()))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    /// `self` after `first`, as matrices `self * first`.
    pub fn compose(&self, first: &RotationSO3) -> RotationSO3 {
        Self(self.0 * first.0)
    }
}

impl Serialize for RotationSO3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[f64; 3]> = (0..3).map(|i| [self.0[(i, 0)], self.0[(i, 1)], self.0[(i, 2)]]).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RotationSO3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = <[[f64; 3]; 3]>::deserialize(d)?;
        let m = Matrix3::from_fn(|i, j| rows[i][j]);
        RotationSO3::new(m, Tolerance::default()).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Frames

/// Three vectors with `<g_a, g_b> = 2 delta_ab` in a real quadratic space.
#[derive(Clone, Debug, PartialEq)]
pub struct HKFrame {
    form: DMatrix<f64>,
    gammas: [DVector<f64>; 3],
}

pub fn pairing(form: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(form * b))
}

/// The K3 form promoted to reals.
pub fn k3_form() -> DMatrix<f64> {
    let g = crate::lattice::Lattice::standard(StandardLattice::K3);
    let rows = g.gram().to_f64_rows();
    DMatrix::from_fn(22, 22, |i, j| rows[i][j])
}

fn unit(n: usize, entries: &[(usize, f64)]) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    for &(i, x) in entries {
        v[i] += x;
    }
    v
}

impl HKFrame {
    pub fn new(form: DMatrix<f64>, gammas: [DVector<f64>; 3], tol: Tolerance) -> Result<Self, FrameError> {
        let n = form.nrows();
        if form.ncols() != n {
            return Err(FrameError::Input("form is not square".into()));
        }
        if max_abs((&form - form.transpose()).iter().copied()) > tol.get() {
            return Err(FrameError::Input("form is not symmetric".into()));
        }
        if gammas.iter().any(|g| g.len() != n) {
            return Err(FrameError::Input(format!("frame vectors must have length {n}")));
        }
        let frame = Self { form, gammas };
        let dev = frame.orthonormality_defect();
        if !(dev <= tol.get()) {
            return Err(FrameError::Geometry(format!(
                "frame vectors are not orthogonal with self-pairing 2 (deviation {dev:e})"
            )));
        }
        Ok(frame)
    }

    /// Largest deviation of `<g_a, g_b>` from `2 delta_ab`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut dev = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                let target = if a == b { 2.0 } else { 0.0 };
                dev = dev.max((self.pair(a, b) - target).abs());
            }
        }
        dev
    }

    fn pair(&self, a: usize, b: usize) -> f64 {
        pairing(&self.form, &self.gammas[a], &self.gammas[b])
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn gammas(&self) -> &[DVector<f64>; 3] {
        &self.gammas
    }

    pub fn dim(&self) -> usize {
        self.form.nrows()
    }

    /// `<v, g_a> / 2` for each frame vector: coordinates of the projection of `v` to the plane.
    pub fn plane_coordinates(&self, v: &DVector<f64>) -> Vector3<f64> {
        Vector3::from_fn(|a, _| pairing(&self.form, v, &self.gammas[a]) / 2.0)
    }

    /// Euclidean size of the part of `v` not in the span of the frame.
    pub fn plane_residual(&self, v: &DVector<f64>) -> f64 {
        let c = self.plane_coordinates(v);
        let mut r = v.clone();
        for a in 0..3 {
            r -= &self.gammas[a] * c[a];
        }
        r.amax()
    }

    /// Gram–Schmidt of three vectors with respect to the form, scaled to self-pairing 2.
    pub fn from_vectors(form: DMatrix<f64>, vectors: [DVector<f64>; 3], tol: Tolerance) -> Result<Self, FrameError> {
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(3);
        for v in vectors {
            let mut w = v;
            for g in &out {
                let c = pairing(&form, &w, g) / 2.0;
                w -= g * c;
            }
            let q = pairing(&form, &w, &w);
            if !(q > tol.get()) {
                return Err(FrameError::Geometry("vectors do not span a positive 3-plane".into()));
            }
            out.push(w * (2.0 / q).sqrt());
        }
        let [a, b, c]: [DVector<f64>; 3] = out.try_into().expect("three vectors");
        Self::new(form, [a, b, c], tol)
    }

    /// Frame on the K3 form with `g_I, g_J, g_K = e + f` in the three hyperbolic planes.
    pub fn k3_model() -> Self {
        let n = 22;
        let gammas = [unit(n, &[(0, 1.0), (1, 1.0)]), unit(n, &[(2, 1.0), (3, 1.0)]), unit(n, &[(4, 1.0), (5, 1.0)])];
        Self { form: k3_form(), gammas }
    }

    /// Frame compatible with the Enriques involution: `g_I` invariant, `g_J`, `g_K` anti-invariant.
    pub fn enriques_model() -> Self {
        let n = 22;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let gammas = [
            unit(n, &[(0, h), (1, h), (2, h), (3, h)]),
            unit(n, &[(0, h), (1, h), (2, -h), (3, -h)]),
            unit(n, &[(4, 1.0), (5, 1.0)]),
        ];
        Self { form: k3_form(), gammas }
    }
}

#[derive(Serialize, Deserialize)]
struct FrameRepr {
    form: Vec<Vec<f64>>,
    gammas: Vec<Vec<f64>>,
}

impl Serialize for HKFrame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.dim();
        FrameRepr {
            form: (0..n).map(|i| self.form.row(i).iter().copied().collect()).collect(),
            gammas: self.gammas.iter().map(|g| g.iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HKFrame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FrameRepr::deserialize(d)?;
        let n = r.form.len();
        if r.form.iter().any(|row| row.len() != n) {
            return Err(D::Error::custom("form is not square"));
        }
        if r.gammas.len() != 3 {
            return Err(D::Error::custom("a frame has exactly three vectors"));
        }
        let form = DMatrix::from_fn(n, n, |i, j| r.form[i][j]);
        let mut it = r.gammas.into_iter().map(DVector::from_vec);
        let gammas = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
        HKFrame::new(form, gammas, Tolerance::default()).map_err(D::Error::custom)
    }
}

/// Frame compatible with `t` built from arbitrary vectors: the first is projected
/// to the `+1` eigenspace, the others to the `-1` eigenspace, then orthonormalized.
pub fn compatible_frame_from_vectors(
    t: &InvolutionAction,
    form: DMatrix<f64>,
    vectors: [DVector<f64>; 3],
    tol: Tolerance,
) -> Result<HKFrame, FrameError> {
    if t.matrix.nrows() != form.nrows() {
        return Err(FrameError::Input("involution and form have different dimensions".into()));
    }
    let [a, b, c] = vectors;
    let plus = |v: DVector<f64>| (&v + t.apply(&v)) / 2.0;
    let minus = |v: DVector<f64>| (&v - t.apply(&v)) / 2.0;
    HKFrame::from_vectors(form, [plus(a), minus(b), minus(c)], tol)
}

/// `g'_i = sum_j a_ij g_j`.
pub fn rotate_frame(f: &HKFrame, a: &RotationSO3) -> HKFrame {
    let m = a.matrix();
    let gammas = std::array::from_fn(|i| {
        let mut v = DVector::zeros(f.dim());
        for j in 0..3 {
            v += &f.gammas[j] * m[(i, j)];
        }
        v
    });
    HKFrame { form: f.form.clone(), gammas }
}

/// The unique rotation `A` with `rotate_frame(from, A) = to`, when both frames
/// span the same oriented 3-plane.
pub fn rotation_between(from: &HKFrame, to: &HKFrame, tol: Tolerance) -> Result<RotationSO3, FrameError> {
    if from.dim() != to.dim() {
        return Err(FrameError::Input("frames live in spaces of different dimension".into()));
    }
    let mut a = Matrix3::zeros();
    for i in 0..3 {
        let c = from.plane_coordinates(&to.gammas[i]);
        for j in 0..3 {
            a[(i, j)] = c[j];
        }
        if from.plane_residual(&to.gammas[i]) > tol.get() {
            return Err(FrameError::Geometry("frames span different 3-planes".into()));
        }
    }
    if a.determinant() < 0.0 {
        return Err(FrameError::Geometry("frames have opposite orientations".into()));
    }
    RotationSO3::new(a, tol).map_err(|e| FrameError::Geometry(e.to_string()))
}

/// The class `a g_I + b g_J + c g_K` for `(a, b, c)` on the unit sphere.
pub fn unit_sphere_structure(f: &HKFrame, coeffs: [f64; 3], tol: Tolerance) -> Result<DVector<f64>, FrameError> {
    let r2: f64 = coeffs.iter().map(|c| c * c).sum();
    if !((r2 - 1.0).abs() <= tol.get()) {
        return Err(FrameError::Input(format!("coefficients have squared norm {r2}, expected 1")));
    }
    let mut v = DVector::zeros(f.dim());
    for (g, c) in f.gammas.iter().zip(coeffs) {
        v += g * c;
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Involutions

/// A real involutive isometry of the ambient quadratic space.
#[derive(Clone, Debug, PartialEq)]
pub struct InvolutionAction {
    matrix: DMatrix<f64>,
}

impl InvolutionAction {
    pub fn new(matrix: DMatrix<f64>, form: &DMatrix<f64>, tol: Tolerance) -> Result<Self, FrameError> {
        let n = form.nrows();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(FrameError::Input(format!("involution must be {n}x{n}")));
        }
        let id = DMatrix::<f64>::identity(n, n);
        if max_abs((&matrix * &matrix - &id).iter().copied()) > tol.get() {
            return Err(FrameError::Input("matrix does not square to the identity".into()));
        }
        if max_abs((matrix.transpose() * form * &matrix - form).iter().copied()) > tol.get() {
            return Err(FrameError::Input("matrix does not preserve the form".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_isometry(f: &LatticeIsometry) -> Result<Self, FrameError> {
        if !f.is_involution() {
            return Err(FrameError::Input("lattice isometry is not an involution".into()));
        }
        let rows = f.matrix().to_f64_rows();
        let n = rows.len();
        Ok(Self { matrix: DMatrix::from_fn(n, n, |i, j| rows[i][j]) })
    }

    /// The involution fixing the line of `v` and negating its orthogonal complement:
    /// `x -> -x + 2 <x, v> v / <v, v>`. Requires `<v, v> != 0`.
    pub fn fixing_line(form: &DMatrix<f64>, v: &DVector<f64>, tol: Tolerance) -> Result<Self, FrameError> {
        let n = form.nrows();
        if v.len() != n {
            return Err(FrameError::Input(format!("vector must have length {n}")));
        }
        let q = pairing(form, v, v);
        if q.abs() <= tol.get() {
            return Err(FrameError::Input("cannot fix an isotropic line".into()));
        }
        let gv = form * v;
        let matrix = v * gv.transpose() * (2.0 / q) - DMatrix::identity(n, n);
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// Dimension of the `+1` eigenspace, `(n + tr T) / 2`.
    pub fn plus_dimension(&self) -> usize {
        let n = self.matrix.nrows() as f64;
        ((n + self.matrix.trace()) / 2.0).round() as usize
    }
}

/// Largest deviation from `T g_I = g_I, T g_J = -g_J, T g_K = -g_K`.
pub fn compatibility_defect(f: &HKFrame, t: &InvolutionAction) -> f64 {
    let signs = [1.0, -1.0, -1.0];
    (0..3).map(|a| (t.apply(&f.gammas[a]) - &f.gammas[a] * signs[a]).amax()).fold(0.0, f64::max)
}

pub fn is_compatible(f: &HKFrame, t: &InvolutionAction, tol: Tolerance) -> bool {
    compatibility_defect(f, t) <= tol.get()
}

fn require_compatible(f: &HKFrame, t: &InvolutionAction, tol: Tolerance) -> Result<(), FrameError> {
    if f.dim() != t.matrix.nrows() {
        return Err(FrameError::Input("involution and frame have different dimensions".into()));
    }
    let d = compatibility_defect(f, t);
    if d > tol.get() {
        return Err(FrameError::Input(format!(
            "frame is not compatible with the involution: expected signs (+,-,-), deviation {d:e}"
        )));
    }
    Ok(())
}

/// An oriented frame diagonalizing an involution on its 3-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenframe {
    pub frame: HKFrame,
    pub signs: [i8; 3],
    /// Rotation taking the input frame to `frame`.
    pub rotation: RotationSO3,
}

pub fn involution_eigenframe(f: &HKFrame, t: &InvolutionAction, tol: Tolerance) -> Result<Eigenframe, FrameError> {
    if f.dim() != t.matrix.nrows() {
        return Err(FrameError::Input("involution and frame have different dimensions".into()));
    }
    // R_ab = <g_a, T g_b> / 2
    let mut r = Matrix3::zeros();
    for b in 0..3 {
        let tg = t.apply(&f.gammas[b]);
        if f.plane_residual(&tg) > tol.get() {
            return Err(FrameError::Geometry("involution does not preserve the frame's 3-plane".into()));
        }
        let c = f.plane_coordinates(&tg);
        for a in 0..3 {
            r[(a, b)] = c[a];
        }
    }
    if max_abs((r * r - Matrix3::identity()).iter().copied()) > tol.get() {
        return Err(FrameError::Geometry("restriction to the 3-plane is not an involution".into()));
    }
    let trace = r.trace().round() as i64;
    if trace != -1 {
        let plus = ((3 + trace) / 2) as usize;
        let pattern: String = std::iter::repeat_n('+', plus).chain(std::iter::repeat_n('-', 3 - plus)).collect();
        return Err(FrameError::NotHyperbolic(format!("({pattern})")));
    }
    let p_plus = (Matrix3::identity() + r) / 2.0;
    let p_minus = (Matrix3::identity() - r) / 2.0;
    let best_diag = (0..3).rev().max_by(|&x, &y| p_plus[(x, x)].total_cmp(&p_plus[(y, y)])).expect("3 columns");
    let c1: Vector3<f64> = p_plus.column(best_diag).normalize();
    let best_col = (0..3)
        .rev()
        .max_by(|&x, &y| p_minus.column(x).norm().total_cmp(&p_minus.column(y).norm()))
        .expect("3 columns");
    let c2: Vector3<f64> = p_minus.column(best_col).normalize();
    let c3 = c1.cross(&c2);
    let a = Matrix3::from_rows(&[c1.transpose(), c2.transpose(), c3.transpose()]);
    let rotation = RotationSO3::new(a, Tolerance(1e-9))?;
    Ok(Eigenframe { frame: rotate_frame(f, &rotation), signs: [1, -1, -1], rotation })
}

/// Rotation of a compatible frame that keeps it compatible: branch `+1` rotates by `psi`
/// in the anti-invariant plane, branch `-1` also flips `g_I`.
pub fn compatible_rotation(branch: i8, psi: f64) -> Result<RotationSO3, FrameError> {
    let (c, s) = (psi.cos(), psi.sin());
    let m = match branch {
        1 => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        -1 => Matrix3::new(-1.0, 0.0, 0.0, 0.0, c, s, 0.0, s, -c),
        b => return Err(FrameError::Input(format!("branch must be +1 or -1, got {b}"))),
    };
    Ok(RotationSO3(m))
}

pub fn compatible_frames(
    f: &HKFrame,
    t: &InvolutionAction,
    branch: i8,
    psi: f64,
    tol: Tolerance,
) -> Result<HKFrame, FrameError> {
    require_compatible(f, t, tol)?;
    Ok(rotate_frame(f, &compatible_rotation(branch, psi)?))
}

/// Parameters `(branch, psi)` of a compatible frame relative to a reference one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompatibleParameters {
    pub branch: i8,
    pub psi: f64,
    /// Largest coordinate difference between `other` and the frame rebuilt from the parameters.
    pub residual: f64,
}

pub fn recover_compatible_parameters(
    reference: &HKFrame,
    other: &HKFrame,
    t: &InvolutionAction,
    tol: Tolerance,
) -> Result<CompatibleParameters, FrameError> {
    require_compatible(reference, t, tol)?;
    require_compatible(other, t, tol)?;
    let a = rotation_between(reference, other, tol)?;
    let m = a.matrix();
    let branch: i8 = if m[(0, 0)] >= 0.0 { 1 } else { -1 };
    let c = m[(1, 1)];
    let s = if branch == 1 { -m[(1, 2)] } else { m[(1, 2)] };
    let psi = s.atan2(c);
    let rebuilt = rotate_frame(reference, &compatible_rotation(branch, psi)?);
    let residual = (0..3).map(|i| (&rebuilt.gammas[i] - &other.gammas[i]).amax()).fold(0.0, f64::max);
    Ok(CompatibleParameters { branch, psi, residual })
}
