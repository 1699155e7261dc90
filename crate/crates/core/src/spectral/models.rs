//! Closed-form spectra of flat tori and round spheres with an isometric involution.
//!
//! Eigenvalues are stored for `Delta / 2`, the normalization in which the
//! Dolbeault Laplacian on functions of a Kähler manifold is half the real one.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spectrum::{EquivariantSpectrum, HeatTail, Part, SpectrumEntry, TwistedTail};
use super::zeta::{split_error_bounds, ZetaOptions};
use super::SpectralError;

/// Involution acting on the flat torus whose eigenvalues are `m^T Q^{-1} m / 2`, `m in Z^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusCharacter {
    /// The identity.
    Trivial,
    /// Translation by half of the given basis vector; acts on `e^{2 pi i <m, x>}` by `(-1)^{m_k}`.
    HalfShift(usize),
    /// `x -> -x`, with `2^n` fixed points.
    Reflection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    FlatTorus { gram: Vec<Vec<f64>>, character: TorusCharacter },
    /// Round sphere of the given radius; an eigenvalue of degree `l` lies in the
    /// `parity_sign^l` part, so `-1` is the antipodal map.
    RoundSphere { radius: f64, parity_sign: i8 },
}

const BERNOULLI_EVEN: [f64; 9] = [
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Heat coefficients of `sum (2l + 1) e^{-t l(l+1)}`, i.e. `e_i` in
/// `t theta(t) ~ sum_i e_i t^i`.
fn sphere_unit_coefficients() -> Vec<f64> {
    let order = BERNOULLI_EVEN.len() - 1;
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    // t theta(t) = e^{t/4} * (1 + sum_j b_j t^j) with the Euler-Maclaurin series of
    // sum_{k >= 0} 2x e^{-t x^2} at half-integers x = k + 1/2
    let b: Vec<f64> = (0..=order)
        .map(|j| {
            if j == 0 {
                1.0
            } else {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                (1.0 - 2f64.powi(1 - 2 * j as i32)) * BERNOULLI_EVEN[j] * sign / fact(j)
            }
        })
        .collect();
    (0..=order).map(|i| (0..=i).map(|j| b[j] * 0.25f64.powi((i - j) as i32) / fact(i - j)).sum()).collect()
}

fn sphere_spectrum(radius: f64, parity_sign: i8, cutoff: f64) -> Result<EquivariantSpectrum, SpectralError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(SpectralError::Input(format!("radius must be positive, got {radius}")));
    }
    if parity_sign != 1 && parity_sign != -1 {
        return Err(SpectralError::Input(format!("parity sign must be +1 or -1, got {parity_sign}")));
    }
    let scale = 1.0 / (2.0 * radius * radius);
    let mut entries = Vec::new();
    for l in 1u64.. {
        let lambda = (l * (l + 1)) as f64 * scale;
        if lambda > cutoff {
            break;
        }
        let m = 2 * l + 1;
        let even = parity_sign == 1 || l % 2 == 0;
        entries.push(if even { SpectrumEntry::new(lambda, m, 0) } else { SpectrumEntry::new(lambda, 0, m) });
    }
    // theta(t) = (1/(s t)) sum_i e_i (s t)^i with s = scale
    let e = sphere_unit_coefficients();
    let mut straight = vec![0.0; 2 * e.len() - 1];
    for (i, ei) in e.iter().enumerate() {
        straight[2 * i] = ei * scale.powi(i as i32 - 1);
    }
    let twisted = if parity_sign == 1 { TwistedTail::Coefficients(straight.clone()) } else { TwistedTail::Free };
    EquivariantSpectrum::new(entries, (1, 0), Some(HeatTail::Asymptotic { dim: 2, straight, twisted }), Some(cutoff))
}

fn torus_spectrum(
    gram: &[Vec<f64>],
    character: TorusCharacter,
    cutoff: f64,
) -> Result<EquivariantSpectrum, SpectralError> {
    let n = gram.len();
    if n == 0 || gram.iter().any(|r| r.len() != n) {
        return Err(SpectralError::Input("torus Gram matrix must be square and nonempty".into()));
    }
    if gram.iter().flatten().any(|x| !x.is_finite()) {
        return Err(SpectralError::Input("torus Gram matrix must be finite".into()));
    }
    let q = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    if (&q - q.transpose()).amax() > 1e-12 * q.amax() {
        return Err(SpectralError::Input("torus Gram matrix must be symmetric".into()));
    }
    let chol = q
        .clone()
        .cholesky()
        .ok_or_else(|| SpectralError::Input("torus Gram matrix must be positive definite".into()))?;
    if let TorusCharacter::HalfShift(k) = character {
        if k >= n {
            return Err(SpectralError::Input(format!("half shift index {k} out of range for dimension {n}")));
        }
    }
    let qinv = chol.inverse();
    let det_q = chol.determinant();

    // lambda(m) = m^T Q^{-1} m / 2, so |m_k| <= sqrt(2 Q_kk lambda)
    let bounds: Vec<i64> = (0..n).map(|k| (2.0 * q[(k, k)] * cutoff).sqrt().floor() as i64).collect();
    let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
    let mut m = bounds.iter().map(|b| -b).collect::<Vec<i64>>();
    'outer: loop {
        if m.iter().any(|&x| x != 0) {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += m[i] as f64 * qinv[(i, j)] * m[j] as f64;
                }
            }
            let lambda = s / 2.0;
            if lambda <= cutoff {
                found.push((lambda, m.clone()));
            }
        }
        for k in 0..n {
            if m[k] < bounds[k] {
                m[k] += 1;
                continue 'outer;
            }
            m[k] = -bounds[k];
        }
        break;
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (lambda, m) in &found {
        let (plus, minus) = match character {
            TorusCharacter::Trivial => (1, 0),
            TorusCharacter::HalfShift(k) => {
                if m[k].rem_euclid(2) == 0 {
                    (1, 0)
                } else {
                    (0, 1)
                }
            }
            // cos and sin of <m, x> span each {m, -m} pair
            TorusCharacter::Reflection => {
                if m.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                    (1, 0)
                } else {
                    (0, 1)
                }
            }
        };
        match entries.last_mut() {
            Some(last) if (lambda - last.lambda).abs() <= 1e-14 * lambda => {
                last.mult_plus += plus;
                last.mult_minus += minus;
            }
            _ => entries.push(SpectrumEntry::new(*lambda, plus, minus)),
        }
    }

    // Poisson summation: theta(t) ~ (2 pi / t)^{n/2} sqrt(det Q)
    let mut straight = vec![0.0; n + 1];
    straight[0] = det_q.sqrt() * (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0);
    let twisted = match character {
        TorusCharacter::Trivial => TwistedTail::Coefficients(straight.clone()),
        TorusCharacter::HalfShift(_) => TwistedTail::Free,
        TorusCharacter::Reflection => {
            let mut d = vec![0.0; n + 1];
            d[n] = 1.0;
            TwistedTail::Coefficients(d)
        }
    };
    EquivariantSpectrum::new(
        entries,
        (1, 0),
        Some(HeatTail::Asymptotic { dim: n as u32, straight, twisted }),
        Some(cutoff),
    )
}

/// All eigenvalues up to `cutoff`, with heat tails.
pub fn build_model_spectrum(model: &ModelSpec, cutoff: f64) -> Result<EquivariantSpectrum, SpectralError> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(SpectralError::Input(format!("cutoff must be positive and finite, got {cutoff}")));
    }
    match model {
        ModelSpec::FlatTorus { gram, character } => torus_spectrum(gram, *character, cutoff),
        ModelSpec::RoundSphere { radius, parity_sign } => sphere_spectrum(*radius, *parity_sign, cutoff),
    }
}

/// Eigenvalue scale of the model, used as the first cutoff.
fn base_scale(model: &ModelSpec) -> f64 {
    match model {
        ModelSpec::RoundSphere { radius, .. } => 1.0 / (radius * radius),
        ModelSpec::FlatTorus { gram, .. } => {
            let min_diag = gram.iter().enumerate().map(|(i, r)| r.get(i).copied().unwrap_or(1.0)).fold(f64::INFINITY, f64::min);
            0.5 / min_diag.max(f64::MIN_POSITIVE)
        }
    }
}

/// Doubles the cutoff until both signed zeta functions reach `opts.tol` at the
/// best and at the alternate split point, so that the torsion cross-check is
/// held to the same tolerance.
///
/// `max_terms` bounds the number of stored eigenvalue entries.
pub fn build_model_spectrum_for_tolerance(
    model: &ModelSpec,
    opts: ZetaOptions,
    max_terms: usize,
) -> Result<EquivariantSpectrum, SpectralError> {
    let mut cutoff = 8.0 * base_scale(model);
    let mut achieved = f64::INFINITY;
    loop {
        let s = build_model_spectrum(model, cutoff)?;
        if s.entries().len() > max_terms {
            return Err(SpectralError::Accuracy { requested: opts.tol, achievable: achieved });
        }
        let mut worst = 0.0f64;
        for part in [Part::Plus, Part::Minus] {
            let (best, alternate) = split_error_bounds(&s, part)?;
            worst = worst.max(best).max(alternate);
        }
        if worst <= opts.tol {
            return Ok(s);
        }
        achieved = achieved.min(worst);
        cutoff *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_coefficients_start_correctly() {
        let e = sphere_unit_coefficients();
        assert!((e[0] - 1.0).abs() < 1e-15);
        assert!((e[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((e[2] - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_entries() {
        let s = build_model_spectrum(&ModelSpec::RoundSphere { radius: 1.0, parity_sign: -1 }, 6.0).unwrap();
        let e = s.entries();
        assert_eq!(e.len(), 3);
        assert_eq!(e[0], SpectrumEntry::new(1.0, 0, 3));
        assert_eq!(e[1], SpectrumEntry::new(3.0, 5, 0));
        assert_eq!(e[2], SpectrumEntry::new(6.0, 0, 7));
        assert!(s.is_free());
    }

    #[test]
    fn square_torus_entries() {
        let gram = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let model = ModelSpec::FlatTorus { gram, character: TorusCharacter::HalfShift(0) };
        let s = build_model_spectrum(&model, 1.0 + 1e-9).unwrap();
        // |m|^2 = 1: (+-1, 0) odd, (0, +-1) even; |m|^2 = 2: all odd
        assert_eq!(s.entries().len(), 2);
        assert_eq!((s.entries()[0].mult_plus, s.entries()[0].mult_minus), (2, 2));
        assert_eq!((s.entries()[1].mult_plus, s.entries()[1].mult_minus), (0, 4));
        let r = build_model_spectrum(
            &ModelSpec::FlatTorus { gram: vec![vec![1.0, 0.0], vec![0.0, 1.0]], character: TorusCharacter::Reflection },
            1.0 + 1e-9,
        )
        .unwrap();
        assert!(r.entries().iter().all(|e| e.mult_plus == e.mult_minus));
    }

    #[test]
    fn invalid_models() {
        assert!(build_model_spectrum(&ModelSpec::RoundSphere { radius: -1.0, parity_sign: -1 }, 1.0).is_err());
        assert!(build_model_spectrum(&ModelSpec::RoundSphere { radius: 1.0, parity_sign: 0 }, 1.0).is_err());
        let bad = ModelSpec::FlatTorus { gram: vec![vec![1.0, 2.0], vec![2.0, 1.0]], character: TorusCharacter::Trivial };
        assert!(build_model_spectrum(&bad, 10.0).is_err());
        let idx = ModelSpec::FlatTorus { gram: vec![vec![1.0]], character: TorusCharacter::HalfShift(1) };
        assert!(build_model_spectrum(&idx, 10.0).is_err());
    }
}
