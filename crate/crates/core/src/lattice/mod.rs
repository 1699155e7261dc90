//! Even integral lattices, their isometries and sublattices.
//!
//! Everything here is exact. Gram matrices and bases are stored as `i64`
//! and all normal forms are computed over `BigInt`/`BigRational`.
//!
//! The K3 lattice uses the block order `(U1, U2, U3, E8_1, E8_2)`, so a
//! vector is written `(a, b, c, x, y)` with `a, b, c` in hyperbolic planes
//! and `x, y` in negative-definite E8 blocks.

mod intmat;
mod normal_form;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use intmat::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate lattice: {0}")]
    Degenerate(String),
    #[error("integer overflow while converting an exact result to i64")]
    Overflow,
}

impl LatticeError {
    pub fn kind(&self) -> crate::ErrorKind {
        match self {
            Self::Input(_) | Self::Overflow => crate::ErrorKind::Input,
            Self::Degenerate(_) => crate::ErrorKind::Geometry,
        }
    }
}

/// Negated Cartan matrix of E8 in Bourbaki numbering: the chain
/// 1-3-4-5-6-7-8 with node 2 attached to node 4.
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    /// The hyperbolic plane, Gram `[[0,1],[1,0]]`.
    U,
    /// The negative-definite E8 root lattice.
    E8Minus,
    /// `U + U + U + E8(-1) + E8(-1)`, signature (3,19).
    K3,
}

impl FromStr for StandardLattice {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "U" | "u" => Ok(Self::U),
            "E8minus" | "e8minus" | "E8-" => Ok(Self::E8Minus),
            "K3" | "k3" => Ok(Self::K3),
            other => Err(LatticeError::Input(format!("unknown standard lattice `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.positive, self.negative)
    }
}

/// An even integral lattice given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    gram: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    gram: IntMatrix,
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = LatticeError;

    fn try_from(r: LatticeRepr) -> Result<Self, Self::Error> {
        Lattice::new(r.gram)
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> Self {
        LatticeRepr { gram: l.gram }
    }
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        if gram.rows() == 0 {
            return Err(LatticeError::Input("lattice rank must be positive".into()));
        }
        if !gram.is_square() {
            return Err(LatticeError::Input("Gram matrix is not square".into()));
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::Input("Gram matrix is not symmetric".into()));
        }
        if (0..gram.rows()).any(|i| gram[(i, i)] % 2 != 0) {
            return Err(LatticeError::Input("Gram matrix has an odd diagonal entry".into()));
        }
        Ok(Self { gram })
    }

    pub fn standard(which: StandardLattice) -> Self {
        match which {
            StandardLattice::U => {
                Self { gram: IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).expect("static") }
            }
            StandardLattice::E8Minus => {
                let mut g = IntMatrix::zeros(8, 8);
                for i in 0..8 {
                    g[(i, i)] = -2;
                }
                for &(i, j) in &E8_EDGES {
                    g[(i, j)] = 1;
                    g[(j, i)] = 1;
                }
                Self { gram: g }
            }
            StandardLattice::K3 => {
                let u = Self::standard(StandardLattice::U);
                let e8 = Self::standard(StandardLattice::E8Minus);
                direct_sum(&[u.clone(), u.clone(), u, e8.clone(), e8]).expect("nonempty")
            }
        }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn pairing(&self, v: &[i64], w: &[i64]) -> i128 {
        let n = self.rank();
        let mut acc = 0i128;
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += i128::from(v[i]) * i128::from(self.gram[(i, j)]) * i128::from(w[j]);
            }
        }
        acc
    }

    pub fn signature(&self) -> Result<Signature, LatticeError> {
        gram_signature(&self.gram)
    }

    pub fn determinant(&self) -> BigInt {
        match normal_form::congruence_pivots(&self.gram.to_big()) {
            Some(p) => {
                let det: BigRational = p.iter().product();
                det.to_integer()
            }
            None => BigInt::zero(),
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    pub fn discriminant_info(&self) -> Result<DiscriminantInfo, LatticeError> {
        discriminant_of_gram(&self.gram)
    }

    /// The whole lattice viewed as a sublattice of itself.
    pub fn as_sublattice(&self) -> SublatticeBasis {
        SublatticeBasis { ambient: self.clone(), basis: IntMatrix::identity(self.rank()) }
    }
}

/// Block-diagonal sum.
pub fn direct_sum(parts: &[Lattice]) -> Result<Lattice, LatticeError> {
    if parts.is_empty() {
        return Err(LatticeError::Input("direct sum of an empty list".into()));
    }
    let n: usize = parts.iter().map(Lattice::rank).sum();
    let mut g = IntMatrix::zeros(n, n);
    let mut offset = 0;
    for p in parts {
        for i in 0..p.rank() {
            for j in 0..p.rank() {
                g[(offset + i, offset + j)] = p.gram[(i, j)];
            }
        }
        offset += p.rank();
    }
    Lattice::new(g)
}

pub fn build_standard_lattice(name: &str) -> Result<Lattice, LatticeError> {
    Ok(Lattice::standard(name.parse()?))
}

fn gram_signature(gram: &IntMatrix) -> Result<Signature, LatticeError> {
    if gram.rows() == 0 {
        return Ok(Signature { positive: 0, negative: 0 });
    }
    let pivots = normal_form::congruence_pivots(&gram.to_big())
        .ok_or_else(|| LatticeError::Degenerate("Gram matrix is singular".into()))?;
    Ok(Signature {
        positive: pivots.iter().filter(|p| p.is_positive()).count(),
        negative: pivots.iter().filter(|p| p.is_negative()).count(),
    })
}

/// Smith invariants of a (nondegenerate) Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantInfo {
    pub elementary_divisors: Vec<u64>,
    /// Number of elementary divisors equal to 2.
    pub a_invariant: usize,
    pub is_two_elementary: bool,
}

fn discriminant_of_gram(gram: &IntMatrix) -> Result<DiscriminantInfo, LatticeError> {
    let n = gram.rows();
    let divisors = normal_form::smith_divisors(&gram.to_big(), n);
    if divisors.len() < n {
        return Err(LatticeError::Degenerate("induced Gram matrix is singular".into()));
    }
    let elementary_divisors =
        divisors.iter().map(|d| d.to_u64().ok_or(LatticeError::Overflow)).collect::<Result<Vec<_>, _>>()?;
    Ok(DiscriminantInfo {
        a_invariant: elementary_divisors.iter().filter(|&&d| d == 2).count(),
        is_two_elementary: elementary_divisors.iter().all(|&d| d == 1 || d == 2),
        elementary_divisors,
    })
}

/// An integer matrix preserving the Gram form of its domain.
///
/// The matrix acts on column coordinate vectors: `v -> matrix * v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeIsometry {
    matrix: IntMatrix,
    #[serde(skip)]
    domain: Lattice,
}

pub fn is_isometry(m: &IntMatrix, lattice: &Lattice) -> Result<bool, LatticeError> {
    let n = lattice.rank();
    if m.rows() != n || m.cols() != n {
        return Err(LatticeError::Input(format!(
            "matrix is {}x{} but the lattice has rank {n}",
            m.rows(),
            m.cols()
        )));
    }
    let Ok(pulled) = m.transpose().mul(lattice.gram()).and_then(|x| x.mul(m)) else {
        return Ok(false);
    };
    Ok(&pulled == lattice.gram())
}

impl LatticeIsometry {
    pub fn new(matrix: IntMatrix, domain: Lattice) -> Result<Self, LatticeError> {
        if !is_isometry(&matrix, &domain)? {
            return Err(LatticeError::Input("matrix does not preserve the Gram form".into()));
        }
        let det = exact_determinant(&matrix);
        if !det.abs().is_one() {
            return Err(LatticeError::Input(format!("isometry has determinant {det}")));
        }
        Ok(Self { matrix, domain })
    }

    pub fn identity(domain: &Lattice) -> Self {
        Self { matrix: IntMatrix::identity(domain.rank()), domain: domain.clone() }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn domain(&self) -> &Lattice {
        &self.domain
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &LatticeIsometry) -> Result<Self, LatticeError> {
        if self.domain != first.domain {
            return Err(LatticeError::Input("isometries act on different lattices".into()));
        }
        Ok(Self { matrix: self.matrix.mul(&first.matrix)?, domain: self.domain.clone() })
    }

    /// Exact inverse; integral because the determinant is a unit.
    pub fn inverse(&self) -> Result<Self, LatticeError> {
        let n = self.domain.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .matrix
            .to_big()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r: Vec<BigRational> = row.into_iter().map(BigRational::from_integer).collect();
                r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                r
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LatticeError::Input("singular matrix".into()))?;
            a.swap(p, k);
            let pivot = a[k][k].clone();
            for x in a[k].iter_mut() {
                *x /= &pivot;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..2 * n {
                    let d = &f * &a[k][j];
                    a[i][j] -= d;
                }
            }
        }
        let inv: Vec<Vec<BigInt>> = a.into_iter().map(|r| r[n..].iter().map(|x| x.to_integer()).collect()).collect();
        Ok(Self { matrix: IntMatrix::from_big(n, n, &inv)?, domain: self.domain.clone() })
    }

    pub fn is_involution(&self) -> bool {
        self.matrix.mul(&self.matrix).is_ok_and(|sq| sq == IntMatrix::identity(self.domain.rank()))
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>, LatticeError> {
        self.matrix.mul_vec(v)
    }

    /// Image of a sublattice of the domain.
    pub fn map_sublattice(&self, s: &SublatticeBasis) -> Result<SublatticeBasis, LatticeError> {
        if s.ambient != self.domain {
            return Err(LatticeError::Input("sublattice lives in a different lattice".into()));
        }
        Ok(SublatticeBasis { ambient: self.domain.clone(), basis: self.matrix.mul(&s.basis)? })
    }
}

/// Determinant of a square integer matrix by exact rational elimination.
fn exact_determinant(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> =
        m.to_big().into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let d = &f * &a[k][j];
                a[i][j] -= d;
            }
        }
    }
    det.to_integer()
}

/// The involution `(a, b, c, x, y) -> (b, a, -c, y, x)` of the K3 lattice.
pub fn enriques_involution() -> LatticeIsometry {
    let k3 = Lattice::standard(StandardLattice::K3);
    let mut m = IntMatrix::zeros(22, 22);
    for i in 0..2 {
        m[(2 + i, i)] = 1;
        m[(i, 2 + i)] = 1;
        m[(4 + i, 4 + i)] = -1;
    }
    for i in 0..8 {
        m[(14 + i, 6 + i)] = 1;
        m[(6 + i, 14 + i)] = 1;
    }
    LatticeIsometry { matrix: m, domain: k3 }
}

/// A sublattice given by basis vectors in ambient coordinates (the columns
/// of `basis`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SublatticeRepr", into = "SublatticeRepr")]
pub struct SublatticeBasis {
    ambient: Lattice,
    basis: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct SublatticeRepr {
    ambient: Lattice,
    basis: IntMatrix,
}

impl TryFrom<SublatticeRepr> for SublatticeBasis {
    type Error = LatticeError;

    fn try_from(r: SublatticeRepr) -> Result<Self, Self::Error> {
        // `[]` carries no row count; read it as the rank-0 sublattice
        let basis = if r.basis.rows() == 0 { IntMatrix::zeros(r.ambient.rank(), 0) } else { r.basis };
        SublatticeBasis::new(r.ambient, basis)
    }
}

impl From<SublatticeBasis> for SublatticeRepr {
    fn from(s: SublatticeBasis) -> Self {
        SublatticeRepr { ambient: s.ambient, basis: s.basis }
    }
}

impl SublatticeBasis {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self, LatticeError> {
        if basis.rows() != ambient.rank() {
            return Err(LatticeError::Input(format!(
                "basis vectors have {} coordinates, ambient rank is {}",
                basis.rows(),
                ambient.rank()
            )));
        }
        let rank = normal_form::smith_divisors(&basis.to_big(), basis.cols()).len();
        if rank < basis.cols() {
            return Err(LatticeError::Input("basis vectors are linearly dependent".into()));
        }
        let s = Self { ambient, basis };
        let g = s.induced_gram()?;
        if (0..g.rows()).any(|i| g[(i, i)] % 2 != 0) {
            return Err(LatticeError::Input("induced Gram matrix has an odd diagonal entry".into()));
        }
        Ok(s)
    }

    /// Canonical (Hermite) basis of the span of the given integer vectors.
    fn from_vectors(ambient: &Lattice, vectors: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let n = ambient.rank();
        let h = normal_form::hermite_rows(vectors);
        let basis = IntMatrix::from_big(h.len(), n, &h)?.transpose();
        let basis = if h.is_empty() { IntMatrix::zeros(n, 0) } else { basis };
        Ok(Self { ambient: ambient.clone(), basis })
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn vectors(&self) -> Vec<Vec<i64>> {
        self.basis.columns()
    }

    pub fn induced_gram(&self) -> Result<IntMatrix, LatticeError> {
        self.basis.transpose().mul(self.ambient.gram())?.mul(&self.basis)
    }

    pub fn signature(&self) -> Result<Signature, LatticeError> {
        gram_signature(&self.induced_gram()?)
    }

    pub fn discriminant_info(&self) -> Result<DiscriminantInfo, LatticeError> {
        discriminant_of_gram(&self.induced_gram()?)
    }

    /// Signature `(1, rank - 1)`.
    pub fn is_hyperbolic_type(&self) -> Result<bool, LatticeError> {
        let sig = self.signature()?;
        Ok(self.rank() >= 1 && sig.positive == 1 && sig.negative == self.rank() - 1)
    }

    /// Whether the sublattice equals its rational span intersected with the
    /// ambient lattice.
    pub fn is_primitive(&self) -> bool {
        normal_form::smith_divisors(&self.basis.to_big(), self.rank()).iter().all(One::is_one)
    }

    /// Equality as sets of lattice vectors.
    pub fn same_sublattice(&self, other: &SublatticeBasis) -> bool {
        self.ambient == other.ambient && self.rank() == other.rank() && self.hermite_rows() == other.hermite_rows()
    }

    fn hermite_rows(&self) -> Vec<Vec<BigInt>> {
        normal_form::hermite_rows(&self.basis.transpose().to_big())
    }

    /// Coordinates of `v` in this basis, when `v` lies in the sublattice.
    pub fn coordinates_of(&self, v: &[i64]) -> Option<Vec<i64>> {
        let k = self.rank();
        // kernel of [B | -v] with last coordinate +-1
        let mut rows = self.basis.to_big();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(BigInt::from(-v[i]));
        }
        let kernel = normal_form::integer_kernel(&rows, k + 1);
        // independent columns leave at most one kernel direction, and it is saturated
        let w = kernel.first()?;
        let t = w[k].to_i64()?;
        if t.abs() != 1 {
            return None;
        }
        w[..k].iter().map(|x| x.to_i64().map(|c| c * t)).collect()
    }

    /// Saturated basis of `{ v : <v, m> = 0 for all m in self }`.
    pub fn orthogonal_complement(&self) -> Result<SublatticeBasis, LatticeError> {
        let n = self.ambient.rank();
        if self.ambient.signature().is_err() {
            return Err(LatticeError::Degenerate("ambient Gram matrix is singular".into()));
        }
        if self.rank() == 0 {
            return Ok(self.ambient.as_sublattice());
        }
        let constraints = self.basis.transpose().mul(self.ambient.gram())?;
        let kernel = normal_form::integer_kernel(&constraints.to_big(), n);
        Self::from_vectors(&self.ambient, &kernel)
    }
}

/// Saturated basis of `{ v : f(v) = sign * v }` for an involution `f`.
pub fn eigenlattice(f: &LatticeIsometry, sign: i64) -> Result<SublatticeBasis, LatticeError> {
    if sign != 1 && sign != -1 {
        return Err(LatticeError::Input(format!("eigenvalue sign must be +1 or -1, got {sign}")));
    }
    if !f.is_involution() {
        return Err(LatticeError::Input("isometry is not an involution".into()));
    }
    let n = f.domain.rank();
    let mut shifted = f.matrix.clone();
    for i in 0..n {
        shifted[(i, i)] -= sign;
    }
    let kernel = normal_form::integer_kernel(&shifted.to_big(), n);
    SublatticeBasis::from_vectors(&f.domain, &kernel)
}

pub fn discriminant_info(s: &SublatticeBasis) -> Result<DiscriminantInfo, LatticeError> {
    s.discriminant_info()
}

pub fn is_hyperbolic_type(s: &SublatticeBasis) -> Result<bool, LatticeError> {
    s.is_hyperbolic_type()
}

pub fn orthogonal_complement(s: &SublatticeBasis) -> Result<SublatticeBasis, LatticeError> {
    s.orthogonal_complement()
}

pub fn signature(l: &Lattice) -> Result<Signature, LatticeError> {
    l.signature()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Lattice {
        Lattice::standard(StandardLattice::U)
    }

    #[test]
    fn hyperbolic_plane_gram() {
        assert_eq!(u().gram().to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(u().signature().unwrap(), Signature { positive: 1, negative: 1 });
    }

    #[test]
    fn e8_is_even_unimodular_negative_definite() {
        let e8 = Lattice::standard(StandardLattice::E8Minus);
        assert_eq!(e8.determinant(), BigInt::one());
        assert!((0..8).all(|i| e8.gram()[(i, i)] == -2));
        assert_eq!(e8.signature().unwrap(), Signature { positive: 0, negative: 8 });
        let d = e8.discriminant_info().unwrap();
        assert_eq!(d.elementary_divisors, vec![1; 8]);
    }

    #[test]
    fn unknown_token_is_input_error() {
        assert!(matches!(build_standard_lattice("D4"), Err(LatticeError::Input(_))));
    }

    #[test]
    fn gram_validation() {
        let odd = IntMatrix::from_rows(&[vec![1, 0], vec![0, 2]]).unwrap();
        assert!(Lattice::new(odd).is_err());
        let asym = IntMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert!(Lattice::new(asym).is_err());
        assert!(direct_sum(&[]).is_err());
    }

    #[test]
    fn degenerate_signature_is_typed() {
        let g = IntMatrix::from_rows(&[vec![2, 2], vec![2, 2]]).unwrap();
        let l = Lattice::new(g).unwrap();
        assert!(matches!(l.signature(), Err(LatticeError::Degenerate(_))));
        assert!(matches!(l.discriminant_info(), Err(LatticeError::Degenerate(_))));
    }

    #[test]
    fn scaling_is_not_an_isometry() {
        let two = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]).unwrap();
        assert!(!is_isometry(&two, &u()).unwrap());
        assert!(is_isometry(&IntMatrix::identity(2), &u()).unwrap());
        assert!(is_isometry(&IntMatrix::identity(3), &u()).is_err());
    }

    #[test]
    fn identity_eigenlattices() {
        let id = LatticeIsometry::identity(&u());
        let plus = eigenlattice(&id, 1).unwrap();
        assert!(plus.same_sublattice(&u().as_sublattice()));
        assert_eq!(eigenlattice(&id, -1).unwrap().rank(), 0);
    }

    #[test]
    fn non_involution_is_rejected() {
        // order-6 rotation of the A2 lattice
        let g = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let l = Lattice::new(g).unwrap();
        let rot = IntMatrix::from_rows(&[vec![0, -1], vec![1, 1]]).unwrap();
        let f = LatticeIsometry::new(rot, l).unwrap();
        assert!(!f.is_involution());
        assert!(eigenlattice(&f, 1).is_err());
        let back = f.compose(&f.inverse().unwrap()).unwrap();
        assert_eq!(back.matrix(), &IntMatrix::identity(2));
    }

    #[test]
    fn complement_of_first_block() {
        let uu = direct_sum(&[u(), u()]).unwrap();
        let first = SublatticeBasis::new(
            uu.clone(),
            IntMatrix::from_columns(4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap(),
        )
        .unwrap();
        let perp = first.orthogonal_complement().unwrap();
        let second = SublatticeBasis::new(
            uu.clone(),
            IntMatrix::from_columns(4, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap(),
        )
        .unwrap();
        assert!(perp.same_sublattice(&second));
        assert_eq!(uu.as_sublattice().orthogonal_complement().unwrap().rank(), 0);
    }

    #[test]
    fn rank_one_discriminants() {
        let l = Lattice::new(IntMatrix::from_rows(&[vec![6]]).unwrap()).unwrap();
        let d = l.discriminant_info().unwrap();
        assert_eq!(d.elementary_divisors, vec![6]);
        assert!(!d.is_two_elementary);
        let unimod = u().as_sublattice().discriminant_info().unwrap();
        assert_eq!(unimod.elementary_divisors, vec![1, 1]);
        assert_eq!(unimod.a_invariant, 0);
        assert!(unimod.is_two_elementary);
    }

    #[test]
    fn coordinates_in_sublattice() {
        let k3 = Lattice::standard(StandardLattice::K3);
        let plus = eigenlattice(&enriques_involution(), 1).unwrap();
        let v = plus.vectors()[3].clone();
        let c = plus.coordinates_of(&v).unwrap();
        let mut expect = vec![0; plus.rank()];
        expect[3] = 1;
        assert_eq!(c, expect);
        let mut off = vec![0; 22];
        off[0] = 1;
        assert!(plus.coordinates_of(&off).is_none());
        assert_eq!(k3.rank(), 22);
    }

    #[test]
    fn json_shapes() {
        let s = serde_json::to_string(&u()).unwrap();
        assert_eq!(s, r#"{"gram":[[0,1],[1,0]]}"#);
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u());
        assert!(serde_json::from_str::<Lattice>(r#"{"gram":[[1,0],[0,1]]}"#).is_err());
        let sub = u().as_sublattice();
        let js = serde_json::to_string(&sub).unwrap();
        assert_eq!(js, r#"{"ambient":{"gram":[[0,1],[1,0]]},"basis":[[1,0],[0,1]]}"#);
        let iso = serde_json::to_string(&enriques_involution()).unwrap();
        assert!(iso.starts_with(r#"{"matrix":[["#));
    }
}
