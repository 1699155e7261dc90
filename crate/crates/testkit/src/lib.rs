//! Reference computations for the spectral tests, built on methods unrelated to
//! the heat-kernel split used by the library: Euler-Maclaurin for Hurwitz zeta,
//! Jacobi theta inversion for Epstein zeta, double-exponential quadrature for
//! incomplete gamma integrals and a finite-volume Legendre operator.

use nalgebra::{DMatrix, DVector};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `B_{2j}` for `j = 0..=12`.
const BERNOULLI: [f64; 13] = [
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// A value together with its derivative in `s`.
#[derive(Clone, Copy, Debug)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }
    fn mul(self, o: Self) -> Self {
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
    fn scale(self, c: f64) -> Self {
        Self { v: self.v * c, d: self.d * c }
    }
    fn recip(self) -> Self {
        Self { v: 1.0 / self.v, d: -self.d / (self.v * self.v) }
    }
    /// `x^{self}` for a constant base `x > 0`.
    fn exp_base(self, x: f64) -> Self {
        let v = (self.v * x.ln()).exp();
        Self { v, d: self.d * x.ln() * v }
    }
}

/// Hurwitz zeta `sum_{k >= 0} (k + a)^{-s}` and its `s`-derivative, for real `s != 1`.
pub fn hurwitz_zeta(s: f64, a: f64) -> (f64, f64) {
    assert!(a > 0.0 && (s - 1.0).abs() > 1e-12);
    // few explicit terms keep the cancellation small where the sum diverges
    let n_terms: usize = if s > 0.0 { 12 } else { 6 };
    let sd = Dual { v: s, d: 1.0 };
    let neg = sd.scale(-1.0);
    let mut acc = Dual::constant(0.0);
    for k in 0..n_terms {
        acc = acc.add(neg.exp_base(k as f64 + a));
    }
    let x = n_terms as f64 + a;
    let one_minus = Dual::constant(1.0).add(neg);
    acc = acc.add(one_minus.exp_base(x).mul(sd.add(Dual::constant(-1.0)).recip()));
    acc = acc.add(neg.exp_base(x).scale(0.5));
    let mut rising = sd; // s (s+1) ... (s + 2j - 2)
    let mut fact = 2.0; // (2j)!
    for (j, b) in BERNOULLI.iter().enumerate().skip(1) {
        let power = neg.add(Dual::constant(1.0 - 2.0 * j as f64)).exp_base(x);
        acc = acc.add(rising.mul(power).scale(b / fact));
        rising = rising.mul(sd.add(Dual::constant(2.0 * j as f64 - 1.0))).mul(sd.add(Dual::constant(2.0 * j as f64)));
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
    }
    (acc.v, acc.d)
}

/// Digamma by upward recurrence and the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    while x < 12.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let series = x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    shift + x.ln() - 0.5 / x - series
}

/// `zeta(0)` and `zeta'(0)` of `sum_{j >= 0} 2 x_j (x_j^2 - 1/4)^{-s}` with `x_j = c (j + a)`,
/// by the binomial expansion into Hurwitz zeta values.
fn shifted_square_zeta(c: f64, a: f64) -> (f64, f64) {
    let (h, dh) = hurwitz_zeta(-1.0, a);
    let z0 = 2.0 * (c * h + 1.0 / (8.0 * c));
    let mut dz = 2.0 * (-2.0 * c.ln() * c * h + 2.0 * c * dh - (c.ln() + digamma(a)) / (4.0 * c));
    for k in 2..60 {
        let (hk, _) = hurwitz_zeta(2.0 * k as f64 - 1.0, a);
        let term = 2.0 / k as f64 * 0.25f64.powi(k) * c.powi(1 - 2 * k) * hk;
        dz += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    (z0, dz)
}

/// Which eigenvalues `l(l+1)/(2 r^2)`, `l >= 1`, of the round sphere enter a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degrees {
    All,
    Even,
    Odd,
}

/// `zeta(0)` and `zeta'(0)` for the sphere eigenvalues `l(l+1)/(2 r^2)` with multiplicity `2l + 1`.
pub fn sphere_zeta(radius: f64, degrees: Degrees) -> (f64, f64) {
    // l + 1/2 = c (j + a)
    let (z0, dz) = match degrees {
        Degrees::All => shifted_square_zeta(1.0, 1.5),
        Degrees::Even => shifted_square_zeta(2.0, 1.25),
        Degrees::Odd => shifted_square_zeta(2.0, 0.75),
    };
    (z0, dz + (2.0 * radius * radius).ln() * z0)
}

/// `int_0^inf f(u) du` by exp-sinh quadrature.
pub fn integrate_half_line(f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut total = 0.0;
    let mut k = -(6.0 / h) as i64;
    while (k as f64) * h <= 6.0 {
        let t = k as f64 * h;
        let u = (half_pi * t.sinh()).exp();
        let w = half_pi * t.cosh() * u;
        if u.is_finite() && w.is_finite() {
            let y = f(u);
            if y != 0.0 {
                total += w * y;
            }
        }
        k += 1;
    }
    total * h
}

/// `Gamma(s, y)` for `y > 0` from `y^s e^{-y} int_0^inf (1 + u)^{s-1} e^{-y u} du`.
pub fn upper_gamma_quadrature(s: f64, y: f64) -> f64 {
    let inner = integrate_half_line(|u| ((s - 1.0) * (1.0 + u).ln() - y * u).exp());
    (s * y.ln() - y).exp() * inner
}

fn lattice_points(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut m = vec![-radius; n];
    loop {
        out.push(m.clone());
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if m[k] < radius {
                m[k] += 1;
                break;
            }
            m[k] = -radius;
            k += 1;
        }
    }
}

fn quad(a: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (v.transpose() * a * v)[(0, 0)]
}

/// `Z(0)` and `Z'(0)` of the Epstein zeta `sum_{m != 0} chi(m) (m^T A m)^{-s}`, where
/// `chi(m) = (-1)^{m_k}` when `character = Some(k)` and `1` otherwise.
///
/// Uses the theta inversion split at `t = 1`; all incomplete gamma values come from quadrature.
pub fn epstein_zeta(a: &DMatrix<f64>, character: Option<usize>) -> (f64, f64) {
    let n = a.nrows();
    let pi = std::f64::consts::PI;
    let ainv = a.clone().try_inverse().expect("positive definite");
    let d = 1.0 / a.determinant().sqrt();
    let min_eig = a.clone().symmetric_eigen().eigenvalues.min().min(ainv.clone().symmetric_eigen().eigenvalues.min());
    let radius = ((45.0 / (pi * min_eig)).sqrt()).ceil() as i64 + 1;
    let shift = character.map(|k| DVector::from_fn(n, |i, _| if i == k { 0.5 } else { 0.0 }));

    let mut h0 = if character.is_some() { 0.0 } else { -2.0 * d / n as f64 };
    for m in lattice_points(n, radius) {
        let v = DVector::from_iterator(n, m.iter().map(|&x| x as f64));
        if m.iter().any(|&x| x != 0) {
            let y = pi * quad(a, &v);
            let chi = match character {
                Some(k) if m[k].rem_euclid(2) == 1 => -1.0,
                _ => 1.0,
            };
            if y < 60.0 {
                h0 += chi * upper_gamma_quadrature(0.0, y);
            }
        }
        let w = match &shift {
            Some(s) => &v + s,
            None if m.iter().all(|&x| x == 0) => continue,
            None => v.clone(),
        };
        let y = pi * quad(&ainv, &w);
        if y < 60.0 {
            h0 += d * upper_gamma_quadrature(n as f64 / 2.0, y) * y.powf(-(n as f64) / 2.0);
        }
    }
    (-1.0, -pi.ln() - EULER_GAMMA + h0)
}

/// Lowest eigenvalues of `-d/dx (1 - x^2) d/dx` on `[-1, 1]` by finite volumes, each
/// with the parity of its eigenvector under `x -> -x`.
pub fn legendre_eigenvalues(cells: usize, count: usize) -> Vec<(f64, i8)> {
    let h = 2.0 / cells as f64;
    let face = |i: usize| {
        let x = -1.0 + i as f64 * h;
        (1.0 - x * x) / (h * h)
    };
    let mut m = DMatrix::zeros(cells, cells);
    for i in 0..cells {
        let (left, right) = (face(i), face(i + 1));
        m[(i, i)] = left + right;
        if i + 1 < cells {
            m[(i, i + 1)] = -right;
            m[(i + 1, i)] = -right;
        }
    }
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, i8)> = (0..cells)
        .map(|j| {
            let v = eig.eigenvectors.column(j);
            let mirrored: f64 = (0..cells).map(|i| v[i] * v[cells - 1 - i]).sum();
            (eig.eigenvalues[j], if mirrored > 0.0 { 1 } else { -1 })
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(count);
    pairs
}

/// `zeta(0) = sum m` and `zeta'(0) = -sum m ln lambda` of a finite spectrum.
pub fn finite_zeta(entries: &[(f64, f64)]) -> (f64, f64) {
    entries.iter().fold((0.0, 0.0), |(z, dz), &(l, m)| (z + m, dz - m * l.ln()))
}

/// `sum m lambda^{-s}` of a finite spectrum.
pub fn finite_zeta_at(entries: &[(f64, f64)], s: f64) -> f64 {
    entries.iter().map(|&(l, m)| m * l.powf(-s)).sum()
}
