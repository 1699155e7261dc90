//! Zeta-regularized quantities by a Mellin split of the heat trace.
//!
//! For a split point `t0`, with `theta(t) - k ~ sum_j a_j t^{p_j} - k` and
//! `p_j = (j - n) / 2`,
//!
//! ```text
//! zeta(0)  = a_n - k
//! zeta'(0) = sum_{j != n} a_j t0^{p_j} / p_j + (a_n - k)(ln t0 + gamma)
//!            + sum_lambda m E1(t0 lambda)
//! ```
//!
//! The split point is picked from a dyadic grid by minimizing the error
//! estimate, which adds a truncation bound for eigenvalues above the cutoff,
//! a measured remainder of the small-time model and a rounding term.

use rayon::prelude::*;
use serde::Serialize;

use super::special::{e1, gamma, upper_gamma, EULER_GAMMA};
use super::spectrum::{CurveData, EquivariantSpectrum, HeatTail, Part, TwistedTail};
use super::sum::NeumaierSum;
use super::SpectralError;

/// Number of dyadic split points `2^-k` tried for asymptotic tails.
const SPLIT_GRID: i32 = 13;
/// Taylor order used when a finite spectrum is written as a heat expansion.
const FINITE_TAYLOR_ORDER: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaOptions {
    /// Target absolute accuracy for `zeta'(0)`.
    pub tol: f64,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self { tol: 1e-8 }
    }
}

impl ZetaOptions {
    pub fn new(tol: f64) -> Result<Self, SpectralError> {
        if tol.is_finite() && tol > 0.0 {
            Ok(Self { tol })
        } else {
            Err(SpectralError::Input(format!("tolerance must be positive, got {tol}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaReport {
    pub zeta_at_0: f64,
    pub zeta_prime_at_0: f64,
    pub error_estimate: f64,
}

/// The data of one projection, written as a heat expansion.
struct PartModel {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
    kernel: f64,
    dim: u32,
    /// `a_j` for this projection
    coeffs: Vec<f64>,
    /// straight `c_j`, used to bound the full heat trace
    envelope: Vec<f64>,
    cutoff: f64,
    finite: bool,
}

fn exponent(j: usize, n: u32) -> f64 {
    (j as f64 - f64::from(n)) / 2.0
}

impl PartModel {
    fn new(s: &EquivariantSpectrum, part: Part) -> Result<Self, SpectralError> {
        let tail = s.tail().ok_or_else(|| SpectralError::Input("spectrum has no heat tail".into()))?;
        let (lambdas, weights): (Vec<f64>, Vec<f64>) = s
            .entries()
            .iter()
            .filter_map(|e| {
                let m = EquivariantSpectrum::multiplicity_of(e, part);
                (m > 0).then_some((e.lambda, m as f64))
            })
            .unzip();
        let kernel = s.kernel_of(part) as f64;
        match tail {
            HeatTail::Finite => {
                // theta(t) = k + sum_i t^i sum m (-lambda)^i / i!
                let mut coeffs = vec![0.0; 2 * FINITE_TAYLOR_ORDER + 1];
                let mut powers: Vec<f64> = weights.clone();
                coeffs[0] = kernel + weights.iter().sum::<f64>();
                for i in 1..=FINITE_TAYLOR_ORDER {
                    for (p, &l) in powers.iter_mut().zip(&lambdas) {
                        *p *= -l / i as f64;
                    }
                    coeffs[2 * i] = powers.iter().copied().collect::<NeumaierSum>().value();
                }
                let envelope = coeffs.clone();
                Ok(Self { lambdas, weights, kernel, dim: 0, coeffs, envelope, cutoff: f64::INFINITY, finite: true })
            }
            HeatTail::Asymptotic { dim, straight, twisted } => {
                let d = |j: usize| match twisted {
                    TwistedTail::Free => 0.0,
                    TwistedTail::Coefficients(d) => d.get(j).copied().unwrap_or(0.0),
                };
                let coeffs = (0..straight.len())
                    .map(|j| match part {
                        Part::Plus => (straight[j] + d(j)) / 2.0,
                        Part::Minus => (straight[j] - d(j)) / 2.0,
                        Part::Total => straight[j],
                    })
                    .collect();
                Ok(Self {
                    lambdas,
                    weights,
                    kernel,
                    dim: *dim,
                    coeffs,
                    envelope: straight.clone(),
                    cutoff: s.cutoff(),
                    finite: false,
                })
            }
        }
    }

    fn candidates(&self) -> Vec<f64> {
        if self.finite {
            let top = self.lambdas.last().copied().unwrap_or(1.0);
            let base = (1.0 / top).min(1.0);
            (0..4).map(|k| base * 0.5f64.powi(k)).collect()
        } else {
            (0..SPLIT_GRID).map(|k| 0.5f64.powi(k)).collect()
        }
    }

    fn asymptotic(&self, coeffs: &[f64], t: f64) -> f64 {
        coeffs.iter().enumerate().map(|(j, c)| c * t.powf(exponent(j, self.dim))).collect::<NeumaierSum>().value()
    }

    /// `sum m e^{-t lambda}` over the explicit entries, in entry order.
    fn explicit_trace(&self, t: f64) -> f64 {
        let terms: Vec<f64> =
            self.lambdas.par_iter().zip(&self.weights).map(|(&l, &w)| w * (-t * l).exp()).collect();
        terms.into_iter().collect::<NeumaierSum>().value()
    }

    /// Bound on `sum_{lambda > cutoff} m e^{-t0 lambda}` over the whole spectrum.
    fn missing_trace_bound(&self, t0: f64) -> f64 {
        if self.cutoff.is_infinite() {
            return 0.0;
        }
        [1.0 / 16.0, 0.125, 0.25, 0.5, 0.75]
            .iter()
            .map(|f| {
                let tau = t0 * f;
                (-(t0 - tau) * self.cutoff).exp() * 2.0 * self.asymptotic(&self.envelope, tau).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Error of replacing `theta` by its expansion on `(0, t0)`, integrated against
    /// `t^{s-1}`: `|R(t0)| t0^s / (p + s)` with `R ~ t^p`.
    fn remainder(&self, t0: f64, s: f64) -> f64 {
        if self.finite {
            let top = self.lambdas.last().copied().unwrap_or(0.0);
            let total: f64 = self.weights.iter().sum();
            let order = (FINITE_TAYLOR_ORDER + 1) as f64;
            let x = t0 * top;
            let term = total * (order * x.ln() - super::special::ln_gamma(order + 1.0)).exp();
            return term * t0.powf(s) / (order + s);
        }
        let p = exponent(self.coeffs.len(), self.dim);
        if p + s <= 0.0 {
            return f64::INFINITY;
        }
        let measured = (self.explicit_trace(t0) + self.kernel - self.asymptotic(&self.coeffs, t0)).abs();
        measured * t0.powf(s) / (p + s)
    }

    fn evaluate(&self, t0: f64) -> ZetaReport {
        let n = self.dim as usize;
        let a_n = self.coeffs.get(n).copied().unwrap_or(0.0);
        let mut acc = NeumaierSum::new();
        for (j, &a) in self.coeffs.iter().enumerate() {
            if j != n && a != 0.0 {
                let p = exponent(j, self.dim);
                acc.add(a * t0.powf(p) / p);
            }
        }
        acc.add((a_n - self.kernel) * (t0.ln() + EULER_GAMMA));
        let terms: Vec<f64> = self.lambdas.par_iter().zip(&self.weights).map(|(&l, &w)| w * e1(t0 * l)).collect();
        acc.extend(terms);

        let truncation = if self.cutoff.is_infinite() {
            0.0
        } else {
            self.missing_trace_bound(t0) / (t0 * self.cutoff)
        };
        let rounding = 4.0 * f64::EPSILON * acc.magnitude();
        ZetaReport {
            zeta_at_0: a_n - self.kernel,
            zeta_prime_at_0: acc.value(),
            error_estimate: truncation + self.remainder(t0, 0.0) + rounding,
        }
    }

    /// Reports at every candidate split, best first.
    fn ranked(&self) -> Vec<(f64, ZetaReport)> {
        let mut all: Vec<(f64, ZetaReport)> = self.candidates().into_iter().map(|t| (t, self.evaluate(t))).collect();
        // stable sort keeps the larger split point first on ties
        all.sort_by(|a, b| a.1.error_estimate.total_cmp(&b.1.error_estimate));
        all
    }

    fn value_at(&self, s: f64, t0: f64) -> Result<ZetaValue, SpectralError> {
        if s <= 0.0 && s.fract() == 0.0 {
            return Err(SpectralError::Input(format!("s = {s} is a non-positive integer; use the s = 0 report")));
        }
        let n = self.dim as usize;
        let mut acc = NeumaierSum::new();
        for (j, &a) in self.coeffs.iter().enumerate() {
            let c = if j == n { a - self.kernel } else { a };
            if c == 0.0 {
                continue;
            }
            let q = s + exponent(j, self.dim);
            if q.abs() < 1e-12 {
                return Err(SpectralError::Input(format!("zeta has a pole at s = {s}")));
            }
            acc.add(c * t0.powf(q) / q);
        }
        let terms: Vec<f64> = self
            .lambdas
            .par_iter()
            .zip(&self.weights)
            .map(|(&l, &w)| w * l.powf(-s) * upper_gamma(s, t0 * l))
            .collect();
        acc.extend(terms);
        let g = gamma(s);

        let x0 = t0 * self.cutoff;
        let truncation = if self.cutoff.is_infinite() {
            0.0
        } else if x0 >= 2.0 * (s - 1.0) {
            // Gamma(s, x) <= 2 x^{s-1} e^{-x} on this range
            2.0 * t0.powf(s) / x0 * self.missing_trace_bound(t0)
        } else {
            f64::INFINITY
        };
        let rounding = 4.0 * f64::EPSILON * acc.magnitude();
        let error = (truncation + self.remainder(t0, s) + rounding) / g.abs();
        Ok(ZetaValue { value: acc.value() / g, error_estimate: error })
    }
}

fn checked(report: ZetaReport, opts: ZetaOptions) -> Result<ZetaReport, SpectralError> {
    if report.error_estimate.is_finite() && report.error_estimate <= opts.tol {
        Ok(report)
    } else {
        Err(SpectralError::Accuracy { requested: opts.tol, achievable: report.error_estimate })
    }
}

/// `zeta(0)` and `zeta'(0)` of one projection of the spectrum.
pub fn zeta_part(s: &EquivariantSpectrum, part: Part, opts: ZetaOptions) -> Result<ZetaReport, SpectralError> {
    let model = PartModel::new(s, part)?;
    checked(model.ranked()[0].1, opts)
}

/// `zeta_{+}` for `sign = 1`, `zeta_{-}` for `sign = -1`.
pub fn zeta_signed(s: &EquivariantSpectrum, sign: i8, opts: ZetaOptions) -> Result<ZetaReport, SpectralError> {
    zeta_part(s, Part::from_sign(sign)?, opts)
}

/// Zeta function of the whole spectrum, ignoring the involution.
pub fn zeta_total(s: &EquivariantSpectrum, opts: ZetaOptions) -> Result<ZetaReport, SpectralError> {
    zeta_part(s, Part::Total, opts)
}

/// The same quantities evaluated at the second-best split point, an
/// independent evaluation path used for cross-checks.
pub fn zeta_part_alternate(s: &EquivariantSpectrum, part: Part) -> Result<ZetaReport, SpectralError> {
    let model = PartModel::new(s, part)?;
    let ranked = model.ranked();
    Ok(ranked.get(1).unwrap_or(&ranked[0]).1)
}

/// Error bounds at the best and the alternate split point.
pub(crate) fn split_error_bounds(s: &EquivariantSpectrum, part: Part) -> Result<(f64, f64), SpectralError> {
    let ranked = PartModel::new(s, part)?.ranked();
    let best = ranked[0].1.error_estimate;
    Ok((best, ranked.get(1).map_or(best, |r| r.1.error_estimate)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaValue {
    pub value: f64,
    pub error_estimate: f64,
}

/// `zeta(s)` for real `s` away from poles and non-positive integers.
pub fn zeta_value(spec: &EquivariantSpectrum, part: Part, s: f64) -> Result<ZetaValue, SpectralError> {
    if !s.is_finite() {
        return Err(SpectralError::Input("s must be finite".into()));
    }
    let model = PartModel::new(spec, part)?;
    let t0 = model.ranked()[0].0;
    model.value_at(s, t0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeterminantReport {
    pub value: f64,
    pub log_value: f64,
    /// Absolute error bound on `log_value`.
    pub error_estimate: f64,
    pub zeta_plus: ZetaReport,
    pub zeta_minus: ZetaReport,
}

/// `exp(-zeta_+'(0) + zeta_-'(0))`.
pub fn equivariant_determinant(s: &EquivariantSpectrum, opts: ZetaOptions) -> Result<DeterminantReport, SpectralError> {
    let plus = zeta_signed(s, 1, opts)?;
    let minus = zeta_signed(s, -1, opts)?;
    let log_value = -plus.zeta_prime_at_0 + minus.zeta_prime_at_0;
    Ok(DeterminantReport {
        value: log_value.exp(),
        log_value,
        error_estimate: plus.error_estimate + minus.error_estimate,
        zeta_plus: plus,
        zeta_minus: minus,
    })
}

fn combine(q: u8, plus: &ZetaReport, minus: &ZetaReport) -> Result<ZetaReport, SpectralError> {
    let q0 = ZetaReport {
        zeta_at_0: plus.zeta_at_0 - minus.zeta_at_0,
        zeta_prime_at_0: plus.zeta_prime_at_0 - minus.zeta_prime_at_0,
        error_estimate: plus.error_estimate + minus.error_estimate,
    };
    let q2 = ZetaReport { zeta_at_0: -q0.zeta_at_0, zeta_prime_at_0: -q0.zeta_prime_at_0, ..q0 };
    match q {
        0 => Ok(q0),
        2 => Ok(q2),
        1 => Ok(ZetaReport {
            zeta_at_0: q0.zeta_at_0 + q2.zeta_at_0,
            zeta_prime_at_0: q0.zeta_prime_at_0 + q2.zeta_prime_at_0,
            error_estimate: q0.error_estimate + q2.error_estimate,
        }),
        _ => Err(SpectralError::Input(format!("Dolbeault degree must be 0, 1 or 2, got {q}"))),
    }
}

/// Zeta function of the `(0, q)` Dolbeault Laplacian built from the `+-` parts.
pub fn dolbeault_zeta(s: &EquivariantSpectrum, q: u8, opts: ZetaOptions) -> Result<ZetaReport, SpectralError> {
    if q > 2 {
        return Err(SpectralError::Input(format!("Dolbeault degree must be 0, 1 or 2, got {q}")));
    }
    let plus = zeta_signed(s, 1, opts)?;
    let minus = zeta_signed(s, -1, opts)?;
    combine(q, &plus, &minus)
}

/// The Dolbeault zeta function at a real `s` (see [`zeta_value`]).
pub fn dolbeault_zeta_value(spec: &EquivariantSpectrum, q: u8, s: f64) -> Result<ZetaValue, SpectralError> {
    let plus = zeta_value(spec, Part::Plus, s)?;
    let minus = zeta_value(spec, Part::Minus, s)?;
    let q0 = plus.value - minus.value;
    let err = plus.error_estimate + minus.error_estimate;
    match q {
        0 => Ok(ZetaValue { value: q0, error_estimate: err }),
        1 => Ok(ZetaValue { value: q0 + -q0, error_estimate: 2.0 * err }),
        2 => Ok(ZetaValue { value: -q0, error_estimate: err }),
        _ => Err(SpectralError::Input(format!("Dolbeault degree must be 0, 1 or 2, got {q}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TorsionReport {
    pub tau: f64,
    pub log_tau: f64,
    pub determinant: f64,
    pub log_determinant: f64,
    /// `log tau + 2 log det`, from two independent evaluations.
    pub residual: f64,
    /// Sum of the error bounds of both evaluations, on the scale of `residual`.
    pub combined_error: f64,
}

/// `exp(zeta^{0,1}'(0) - 2 zeta^{0,2}'(0))` together with the determinant identity check.
///
/// The torsion is evaluated at the alternate split point and the determinant
/// at the best one, so the residual compares two genuinely different sums.
pub fn equivariant_torsion(s: &EquivariantSpectrum, opts: ZetaOptions) -> Result<TorsionReport, SpectralError> {
    let det = equivariant_determinant(s, opts)?;
    let plus = zeta_part_alternate(s, Part::Plus)?;
    let minus = zeta_part_alternate(s, Part::Minus)?;
    let q1 = combine(1, &plus, &minus)?;
    let q2 = combine(2, &plus, &minus)?;
    let log_tau = q1.zeta_prime_at_0 - 2.0 * q2.zeta_prime_at_0;
    Ok(TorsionReport {
        tau: log_tau.exp(),
        log_tau,
        determinant: det.value,
        log_determinant: det.log_value,
        residual: log_tau + 2.0 * det.log_value,
        combined_error: q1.error_estimate + 2.0 * q2.error_estimate + 2.0 * det.error_estimate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    pub volume: f64,
    pub determinant: f64,
    pub log_determinant: f64,
    /// Analytic torsion of the curve, the reciprocal of the determinant.
    pub torsion: f64,
    pub error_estimate: f64,
}

/// `det* = exp(-zeta'(0))` for each fixed curve.
pub fn curve_determinant(c: &CurveData, opts: ZetaOptions) -> Result<Vec<CurveReport>, SpectralError> {
    c.validate()?;
    c.curves
        .iter()
        .map(|curve| {
            let z = zeta_total(&curve.spectrum, opts)?;
            let log_determinant = -z.zeta_prime_at_0;
            Ok(CurveReport {
                volume: curve.volume,
                determinant: log_determinant.exp(),
                log_determinant,
                torsion: (-log_determinant).exp(),
                error_estimate: z.error_estimate,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauReport {
    pub tau: f64,
    pub log_tau: f64,
    pub error_estimate: f64,
    pub determinant: DeterminantReport,
    pub curves: Vec<CurveReport>,
}

/// `det^{-2} prod_i Vol(C_i) / det*(C_i)`, or `det^{-2}` for a free involution.
pub fn tau_iota(s: &EquivariantSpectrum, curves: Option<&CurveData>, opts: ZetaOptions) -> Result<TauReport, SpectralError> {
    match (s.tail(), curves) {
        (None, _) => return Err(SpectralError::Input("spectrum has no heat tail".into())),
        (Some(HeatTail::Asymptotic { twisted: TwistedTail::Free, .. }), Some(c)) if !c.curves.is_empty() => {
            return Err(SpectralError::Consistency(
                "fixed curves were supplied but the twisted heat tail is declared free".into(),
            ))
        }
        (Some(HeatTail::Asymptotic { twisted: TwistedTail::Coefficients(_), .. }), None) => {
            return Err(SpectralError::Consistency(
                "twisted heat coefficients imply fixed points but no curve data was supplied".into(),
            ))
        }
        _ => {}
    }
    let det = equivariant_determinant(s, opts)?;
    let reports = match curves {
        Some(c) => curve_determinant(c, opts)?,
        None => Vec::new(),
    };
    let mut log_tau = NeumaierSum::new();
    log_tau.add(-2.0 * det.log_value);
    let mut error = 2.0 * det.error_estimate;
    for r in &reports {
        log_tau.add(r.volume.ln());
        log_tau.add(-r.log_determinant);
        error += r.error_estimate;
    }
    let log_tau = log_tau.value();
    Ok(TauReport { tau: log_tau.exp(), log_tau, error_estimate: error, determinant: det, curves: reports })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BorcherdsReport {
    pub tau: f64,
    pub nu: u32,
    /// `tau^{-2 nu}`
    pub implied_norm: f64,
    pub log_implied_norm: f64,
    /// `implied_norm^{-1/(2 nu)}`
    pub tau_round_trip: f64,
    /// `implied_norm^{1/4}` when `nu = 1`.
    pub implied_determinant: Option<f64>,
    pub constant: Option<f64>,
    /// `(implied_determinant / C)^4` when a constant is supplied and `nu = 1`.
    pub implied_phi_norm: Option<f64>,
    /// `C * implied_phi_norm^{1/4} - implied_determinant`.
    pub constant_residual: Option<f64>,
}

pub fn borcherds_report(tau: f64, nu: u32, constant: Option<f64>) -> Result<BorcherdsReport, SpectralError> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(SpectralError::Input(format!("tau must be positive, got {tau}")));
    }
    if nu == 0 {
        return Err(SpectralError::Input("nu must be a positive integer".into()));
    }
    if let Some(c) = constant {
        if !(c.is_finite() && c > 0.0) {
            return Err(SpectralError::Input(format!("constant must be positive, got {c}")));
        }
    }
    let nu_f = f64::from(nu);
    let log_implied_norm = -2.0 * nu_f * tau.ln();
    let implied_norm = tau.powf(-2.0 * nu_f);
    let tau_round_trip = implied_norm.powf(-1.0 / (2.0 * nu_f));
    let implied_determinant = (nu == 1).then(|| implied_norm.powf(0.25));
    let implied_phi_norm = match (implied_determinant, constant) {
        (Some(d), Some(c)) => Some((d / c).powi(4)),
        _ => None,
    };
    let constant_residual = match (implied_phi_norm, constant, implied_determinant) {
        (Some(p), Some(c), Some(d)) => Some(c * p.powf(0.25) - d),
        _ => None,
    };
    Ok(BorcherdsReport {
        tau,
        nu,
        implied_norm,
        log_implied_norm,
        tau_round_trip,
        implied_determinant,
        constant,
        implied_phi_norm,
        constant_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::spectrum::SpectrumEntry;

    fn synthetic() -> EquivariantSpectrum {
        EquivariantSpectrum::finite(vec![SpectrumEntry::new(2.0, 1, 0)], (0, 0)).unwrap()
    }

    #[test]
    fn one_term_zeta() {
        let z = zeta_signed(&synthetic(), 1, ZetaOptions::default()).unwrap();
        assert_eq!(z.zeta_at_0, 1.0);
        assert!((z.zeta_prime_at_0 + 2f64.ln()).abs() < 1e-14);
        assert!(z.error_estimate < 1e-14);
        let m = zeta_signed(&synthetic(), -1, ZetaOptions::default()).unwrap();
        assert_eq!(m.zeta_at_0, 0.0);
        assert_eq!(m.zeta_prime_at_0, 0.0);
    }

    #[test]
    fn one_term_determinant_and_torsion() {
        let opts = ZetaOptions::default();
        let d = equivariant_determinant(&synthetic(), opts).unwrap();
        assert!((d.value - 2.0).abs() < 1e-14);
        let t = equivariant_torsion(&synthetic(), opts).unwrap();
        assert!((t.tau - 0.25).abs() < 1e-15);
        assert!(t.residual.abs() < 1e-14);
        let q2 = dolbeault_zeta(&synthetic(), 2, opts).unwrap();
        assert_eq!(q2.zeta_at_0, -1.0);
        assert!((q2.zeta_prime_at_0 - 2f64.ln()).abs() < 1e-14);
        let q1 = dolbeault_zeta(&synthetic(), 1, opts).unwrap();
        assert_eq!((q1.zeta_at_0, q1.zeta_prime_at_0), (0.0, 0.0));
        assert!(dolbeault_zeta(&synthetic(), 3, opts).is_err());
    }

    #[test]
    fn finite_value_at_positive_s() {
        let v = zeta_value(&synthetic(), Part::Plus, 1.5).unwrap();
        assert!((v.value - 2f64.powf(-1.5)).abs() < 1e-14);
        assert!(zeta_value(&synthetic(), Part::Plus, -1.0).is_err());
    }

    #[test]
    fn missing_tail_is_an_input_error() {
        let s = EquivariantSpectrum::new(vec![SpectrumEntry::new(1.0, 1, 0)], (0, 0), None, None).unwrap();
        assert!(matches!(zeta_signed(&s, 1, ZetaOptions::default()), Err(SpectralError::Input(_))));
    }

    #[test]
    fn cutoff_too_small_reports_achievable_bound() {
        let tail = HeatTail::Asymptotic {
            dim: 2,
            straight: vec![2.0, 0.0, 1.0 / 3.0],
            twisted: TwistedTail::Free,
        };
        let s = EquivariantSpectrum::new(vec![SpectrumEntry::new(1.0, 3, 0)], (1, 0), Some(tail), Some(1.0)).unwrap();
        match zeta_signed(&s, 1, ZetaOptions::default()) {
            Err(SpectralError::Accuracy { requested, achievable }) => {
                assert_eq!(requested, 1e-8);
                assert!(achievable > 1e-8);
            }
            other => panic!("expected an accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn borcherds_arithmetic() {
        let r = borcherds_report(1.0, 3, None).unwrap();
        assert_eq!(r.implied_norm, 1.0);
        let r = borcherds_report(0.25, 1, Some(2.0)).unwrap();
        assert_eq!(r.implied_norm, 16.0);
        assert_eq!(r.implied_determinant, Some(2.0));
        assert_eq!(r.implied_phi_norm, Some(1.0));
        assert_eq!(r.constant_residual, Some(0.0));
        assert_eq!(r.tau_round_trip, 0.25);
        assert!(borcherds_report(0.0, 1, None).is_err());
        assert!(borcherds_report(1.0, 0, None).is_err());
    }

    #[test]
    fn curve_consistency() {
        let free_tail = HeatTail::Asymptotic { dim: 2, straight: vec![1.0, 0.0, 0.0], twisted: TwistedTail::Free };
        let s = EquivariantSpectrum::new(vec![], (1, 0), Some(free_tail), Some(10.0)).unwrap();
        let curve = super::super::spectrum::Curve { volume: 1.0, spectrum: synthetic() };
        let data = CurveData { curves: vec![curve] };
        let err = tau_iota(&s, Some(&data), ZetaOptions::default()).unwrap_err();
        assert!(matches!(err, SpectralError::Consistency(_)));
        let fixed = HeatTail::Asymptotic {
            dim: 2,
            straight: vec![1.0, 0.0, 0.0],
            twisted: TwistedTail::Coefficients(vec![0.0, 0.0, 1.0]),
        };
        let s = EquivariantSpectrum::new(vec![], (1, 0), Some(fixed), Some(10.0)).unwrap();
        assert!(matches!(tau_iota(&s, None, ZetaOptions::default()), Err(SpectralError::Consistency(_))));
    }

    #[test]
    fn neutral_curve_factor() {
        // det* = 1 for the one-point spectrum {1}
        let unit = EquivariantSpectrum::finite(vec![SpectrumEntry::new(1.0, 1, 0)], (0, 0)).unwrap();
        let data = CurveData { curves: vec![super::super::spectrum::Curve { volume: 1.0, spectrum: unit }] };
        let with = tau_iota(&synthetic(), Some(&data), ZetaOptions::default()).unwrap();
        let without = tau_iota(&synthetic(), None, ZetaOptions::default()).unwrap();
        assert!((with.tau - 0.25).abs() < 1e-14);
        assert!((with.tau - without.tau).abs() < 1e-14);
        assert!((with.curves[0].torsion * with.curves[0].determinant - 1.0).abs() < 1e-15);
    }
}
