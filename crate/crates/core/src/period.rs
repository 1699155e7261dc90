//! Period points of marked K3 surfaces with an involution.
//!
//! A [`PeriodContext`] fixes a primitive sublattice `M` of the K3 lattice and
//! its orthogonal complement `M^perp`, which must have signature
//! `(2, rank - 2)`. Period points are complex vectors in `M^perp` coordinates,
//! stored as a real part and an imaginary part.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hyperkahler::{compatibility_defect, FrameError, HKFrame, InvolutionAction, Tolerance};
use crate::lattice::{LatticeError, LatticeIsometry, SublatticeBasis};
use crate::ErrorKind;

/// Relative tolerance for isotropy, scaled by `<eta, conj eta>`.
pub const ISOTROPY_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for projective equality and label ambiguity.
pub const PROJECTIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("geometry check failed: {0}")]
    Geometry(String),
    #[error("frame is not compatible with the involution: {0}")]
    Incompatible(String),
    #[error("marking is not of type M: {0}")]
    Marking(String),
    #[error("component label is ambiguous: {0}")]
    Ambiguous(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl PeriodError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Self::Input(_) => ErrorKind::Input,
            Self::Lattice(e) => e.kind(),
            Self::Frame(e) => e.kind(),
            Self::Geometry(_) | Self::Incompatible(_) | Self::Marking(_) | Self::Ambiguous(_) => ErrorKind::Geometry,
        }
    }
}

/// A sublattice `M` together with `M^perp` and the induced real form on `M^perp`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodContext {
    m: Option<SublatticeBasis>,
    mperp: SublatticeBasis,
    basis: DMatrix<f64>,
    form: DMatrix<f64>,
    /// Left inverse `(B^T B)^-1 B^T` of the complement basis.
    projector: DMatrix<f64>,
    ambient_form: DMatrix<f64>,
    ambient_form_inv: DMatrix<f64>,
}

fn to_real(rows: Vec<Vec<f64>>) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

fn pair(form: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(form * b))
}

impl PeriodContext {
    /// Context for a given `M^perp`, checking its signature is `(2, rank - 2)`.
    pub fn from_complement(mperp: SublatticeBasis) -> Result<Self, PeriodError> {
        let sig = mperp.signature()?;
        if sig.positive != 2 || sig.negative + 2 != mperp.rank() {
            return Err(PeriodError::Geometry(format!(
                "complement has signature {sig}, expected (2,{})",
                mperp.rank().saturating_sub(2)
            )));
        }
        let basis = to_real(mperp.basis().to_f64_rows());
        let form = to_real(mperp.induced_gram()?.to_f64_rows());
        let bt = basis.transpose();
        let projector = (&bt * &basis)
            .cholesky()
            .ok_or_else(|| PeriodError::Geometry("complement basis is degenerate".into()))?
            .solve(&bt);
        let ambient_form = to_real(mperp.ambient().gram().to_f64_rows());
        let ambient_form_inv = ambient_form
            .clone()
            .try_inverse()
            .ok_or_else(|| PeriodError::Geometry("ambient form is singular".into()))?;
        Ok(Self { m: None, mperp, basis, form, projector, ambient_form, ambient_form_inv })
    }

    /// Context for the sublattice `M`; the complement is computed exactly.
    pub fn for_sublattice(m: SublatticeBasis) -> Result<Arc<Self>, PeriodError> {
        let mut ctx = Self::from_complement(m.orthogonal_complement()?)?;
        ctx.m = Some(m);
        Ok(Arc::new(ctx))
    }

    pub fn complement(&self) -> &SublatticeBasis {
        &self.mperp
    }

    pub fn sublattice(&self) -> Option<&SublatticeBasis> {
        self.m.as_ref()
    }

    /// Induced real form on `M^perp` coordinates.
    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.mperp.rank()
    }

    /// Ambient vector with the given `M^perp` coordinates.
    pub fn to_ambient(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    /// `M^perp` coordinates of an ambient real vector, by least squares; fails
    /// when the vector is not in the real span of `M^perp`.
    pub fn coordinates(&self, v: &DVector<f64>) -> Result<DVector<f64>, PeriodError> {
        if v.len() != self.basis.nrows() {
            return Err(PeriodError::Input(format!("vector must have length {}", self.basis.nrows())));
        }
        let c = &self.projector * v;
        let residual = (&self.basis * &c - v).amax();
        if residual > 1e-9 * (1.0 + v.amax()) {
            return Err(PeriodError::Marking(format!("vector leaves the complement's real span by {residual:e}")));
        }
        Ok(c)
    }

    /// `(<eta, eta>, <eta, conj eta>)` with `<eta, eta>` as (real, imaginary).
    pub fn self_pairings(&self, re: &DVector<f64>, im: &DVector<f64>) -> ((f64, f64), f64) {
        let rr = pair(&self.form, re, re);
        let ii = pair(&self.form, im, im);
        let ri = pair(&self.form, re, im);
        ((rr - ii, 2.0 * ri), rr + ii)
    }

    /// Isotropy and positivity with the relative tolerance.
    pub fn contains(&self, re: &DVector<f64>, im: &DVector<f64>) -> bool {
        if re.len() != self.rank() || im.len() != self.rank() {
            return false;
        }
        let ((a, b), h) = self.self_pairings(re, im);
        h > 0.0 && a.hypot(b) <= ISOTROPY_TOLERANCE * h
    }

    /// Isotropy ratio `|<eta, eta>| / <eta, conj eta>`.
    pub fn isotropy_ratio(&self, re: &DVector<f64>, im: &DVector<f64>) -> f64 {
        let ((a, b), h) = self.self_pairings(re, im);
        a.hypot(b) / h
    }
}

pub fn omega_contains(mperp: &SublatticeBasis, re: &DVector<f64>, im: &DVector<f64>) -> Result<bool, PeriodError> {
    let ctx = PeriodContext::from_complement(mperp.clone())?;
    if re.len() != ctx.rank() || im.len() != ctx.rank() {
        return Err(PeriodError::Input(format!("period vector must have length {}", ctx.rank())));
    }
    Ok(ctx.contains(re, im))
}

/// A point of the period domain in `M^perp` coordinates.
#[derive(Debug, Clone)]
pub struct PeriodPoint {
    re: DVector<f64>,
    im: DVector<f64>,
    context: Arc<PeriodContext>,
}

impl PartialEq for PeriodPoint {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im && self.context == other.context
    }
}

impl PeriodPoint {
    pub fn new(context: Arc<PeriodContext>, re: DVector<f64>, im: DVector<f64>) -> Result<Self, PeriodError> {
        if re.len() != context.rank() || im.len() != context.rank() {
            return Err(PeriodError::Input(format!("period vector must have length {}", context.rank())));
        }
        if !context.contains(&re, &im) {
            let ((a, b), h) = context.self_pairings(&re, &im);
            return Err(PeriodError::Geometry(format!(
                "vector is not in the period domain: <eta,eta> = {a:e}{b:+e}i, <eta,conj eta> = {h:e}"
            )));
        }
        Ok(Self { re, im, context })
    }

    pub fn re(&self) -> &DVector<f64> {
        &self.re
    }

    pub fn im(&self) -> &DVector<f64> {
        &self.im
    }

    pub fn context(&self) -> &Arc<PeriodContext> {
        &self.context
    }

    pub fn isotropy_ratio(&self) -> f64 {
        self.context.isotropy_ratio(&self.re, &self.im)
    }

    /// Multiplication by the complex scalar `a + bi`.
    pub fn scaled(&self, a: f64, b: f64) -> Result<Self, PeriodError> {
        let re = &self.re * a - &self.im * b;
        let im = &self.re * b + &self.im * a;
        Self::new(self.context.clone(), re, im)
    }
}

impl Serialize for PeriodPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            re: &'a [f64],
            im: &'a [f64],
        }
        Repr { re: self.re.as_slice(), im: self.im.as_slice() }.serialize(s)
    }
}

pub fn conjugate_period(p: &PeriodPoint) -> PeriodPoint {
    PeriodPoint { re: p.re.clone(), im: -&p.im, context: p.context.clone() }
}

/// Whether `q = lambda p` for a nonzero complex `lambda`.
pub fn projectively_equal(p: &PeriodPoint, q: &PeriodPoint) -> bool {
    if p.re.len() != q.re.len() {
        return false;
    }
    let pp = p.re.norm_squared() + p.im.norm_squared();
    let qq = q.re.norm_squared() + q.im.norm_squared();
    if pp == 0.0 || qq == 0.0 {
        return false;
    }
    // lambda = <p, q> / <p, p> with the Hermitian product linear in q
    let lr = (p.re.dot(&q.re) + p.im.dot(&q.im)) / pp;
    let li = (p.re.dot(&q.im) - p.im.dot(&q.re)) / pp;
    let dr = &q.re - (&p.re * lr - &p.im * li);
    let di = &q.im - (&p.re * li + &p.im * lr);
    let residual = (dr.norm_squared() + di.norm_squared()).sqrt();
    residual <= PROJECTIVE_TOLERANCE * qq.sqrt()
}

/// `+1` or `-1` according to the orientation of `(Re eta, Im eta)` against
/// an oriented positive 2-plane `reference` (in `M^perp` coordinates).
pub fn component_label(p: &PeriodPoint, reference: &[DVector<f64>; 2]) -> Result<i8, PeriodError> {
    let form = p.context.form();
    let n = p.context.rank();
    if reference.iter().any(|r| r.len() != n) {
        return Err(PeriodError::Input(format!("reference vectors must have length {n}")));
    }
    let [r1, r2] = reference;
    let g11 = pair(form, r1, r1);
    let g22 = pair(form, r2, r2);
    let g12 = pair(form, r1, r2);
    if !(g11 > 0.0 && g11 * g22 - g12 * g12 > 0.0) {
        return Err(PeriodError::Input("reference pair does not span a positive 2-plane".into()));
    }
    let det = pair(form, &p.re, r1) * pair(form, &p.im, r2) - pair(form, &p.re, r2) * pair(form, &p.im, r1);
    let scale = (pair(form, &p.re, &p.re) * pair(form, &p.im, &p.im)).abs().sqrt() * (g11 * g22).sqrt();
    if !(det.abs() > PROJECTIVE_TOLERANCE * scale) {
        return Err(PeriodError::Ambiguous(format!("orientation determinant {det:e} is numerically zero")));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// The conjugate pair attached to a compatible frame and a marking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodPair {
    pub plus: PeriodPoint,
    pub minus: PeriodPoint,
}

impl PeriodPair {
    /// Equality of the unordered pairs of projective classes.
    pub fn same_classes(&self, other: &PeriodPair) -> bool {
        (projectively_equal(&self.plus, &other.plus) && projectively_equal(&self.minus, &other.minus))
            || (projectively_equal(&self.plus, &other.minus) && projectively_equal(&self.minus, &other.plus))
    }
}

fn isometry_real(f: &LatticeIsometry) -> DMatrix<f64> {
    to_real(f.matrix().to_f64_rows())
}

/// `[alpha(g_J + i g_K)]` and `[alpha(g_J - i g_K)]` for a frame compatible with `t`
/// and a marking `alpha` of type `M` (the sublattice of `context`).
pub fn period_of(
    frame: &HKFrame,
    t: &InvolutionAction,
    alpha: &LatticeIsometry,
    context: &Arc<PeriodContext>,
    tol: Tolerance,
) -> Result<PeriodPair, PeriodError> {
    let n = context.basis.nrows();
    if frame.dim() != n || t.matrix().nrows() != n || alpha.domain().rank() != n {
        return Err(PeriodError::Input("frame, involution, marking and lattice dimensions differ".into()));
    }
    if alpha.domain() != context.mperp.ambient() {
        return Err(PeriodError::Input("marking acts on a different lattice".into()));
    }
    let defect = compatibility_defect(frame, t);
    if defect > tol.get() {
        return Err(PeriodError::Incompatible(format!(
            "expected T g_I = g_I, T g_J = -g_J, T g_K = -g_K; deviation {defect:e}"
        )));
    }
    let m = context
        .m
        .as_ref()
        .ok_or_else(|| PeriodError::Input("context was built without the sublattice M".into()))?;
    if t.plus_dimension() != m.rank() {
        return Err(PeriodError::Marking(format!(
            "involution fixes a space of dimension {}, M has rank {}",
            t.plus_dimension(),
            m.rank()
        )));
    }
    let a = isometry_real(alpha);
    // an isometry's inverse is G^-1 A^T G
    let a_inv = &context.ambient_form_inv * a.transpose() * &context.ambient_form;
    let conj = &a * t.matrix() * &a_inv;
    for v in m.vectors() {
        let v = DVector::from_iterator(n, v.into_iter().map(|x| x as f64));
        let dev = (&conj * &v - &v).amax();
        if dev > tol.get() * (1.0 + v.amax()) {
            return Err(PeriodError::Marking(format!("a basis vector of M is moved by {dev:e}")));
        }
    }
    let g = frame.gammas();
    let re = context.coordinates(&(&a * &g[1]))?;
    let im = context.coordinates(&(&a * &g[2]))?;
    let plus = PeriodPoint::new(context.clone(), re, im)?;
    let minus = conjugate_period(&plus);
    Ok(PeriodPair { plus, minus })
}
