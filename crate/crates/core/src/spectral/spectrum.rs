//! Equivariant spectra with small-time heat asymptotics.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::SpectralError;

/// One eigenvalue with the dimensions of its `+1` and `-1` parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub mult_plus: u64,
    pub mult_minus: u64,
}

impl SpectrumEntry {
    pub fn new(lambda: f64, mult_plus: u64, mult_minus: u64) -> Self {
        Self { lambda, mult_plus, mult_minus }
    }

    pub fn multiplicity(&self) -> u64 {
        self.mult_plus + self.mult_minus
    }
}

/// Small-time behaviour of `Tr iota e^{-t Delta}`.
#[derive(Clone, Debug, PartialEq)]
pub enum TwistedTail {
    /// Exponentially small as `t -> 0` (free involutions).
    Free,
    /// Coefficients `d_j` of `t^{(j - n)/2}`, same indexing as the straight trace.
    Coefficients(Vec<f64>),
}

/// Small-time model for the heat traces.
#[derive(Clone, Debug, PartialEq)]
pub enum HeatTail {
    /// The entries are the whole spectrum.
    Finite,
    /// `Tr e^{-t Delta} ~ sum_j c_j t^{(j - n)/2}` plus the twisted model.
    Asymptotic { dim: u32, straight: Vec<f64>, twisted: TwistedTail },
}

/// Which projection of the spectrum a zeta function is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// `(1 + iota) / 2`
    Plus,
    /// `(1 - iota) / 2`
    Minus,
    /// The whole space.
    Total,
}

impl Part {
    pub fn from_sign(sign: i8) -> Result<Self, SpectralError> {
        match sign {
            1 => Ok(Self::Plus),
            -1 => Ok(Self::Minus),
            s => Err(SpectralError::Input(format!("sign must be +1 or -1, got {s}"))),
        }
    }
}

/// Eigenvalues of `Delta` (nonzero), kernel dimensions and a heat tail.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantSpectrum {
    entries: Vec<SpectrumEntry>,
    kernel: (u64, u64),
    tail: Option<HeatTail>,
    cutoff: f64,
}

impl EquivariantSpectrum {
    /// Validates ordering, positivity and the tail shape. `cutoff` is the value
    /// up to which the entries are complete; it is ignored (infinite) for finite tails.
    pub fn new(
        entries: Vec<SpectrumEntry>,
        kernel: (u64, u64),
        tail: Option<HeatTail>,
        cutoff: Option<f64>,
    ) -> Result<Self, SpectralError> {
        if let Some(e) = entries.iter().find(|e| !(e.lambda.is_finite() && e.lambda > 0.0)) {
            return Err(SpectralError::Input(format!("eigenvalue {} is not a positive finite number", e.lambda)));
        }
        if entries.windows(2).any(|w| w[1].lambda < w[0].lambda) {
            return Err(SpectralError::Input("entries are not sorted by eigenvalue".into()));
        }
        let cutoff = match (&tail, cutoff) {
            (Some(HeatTail::Finite), _) => f64::INFINITY,
            (_, Some(c)) => {
                if !(c > 0.0) || c.is_nan() {
                    return Err(SpectralError::Input(format!("cutoff must be positive, got {c}")));
                }
                c
            }
            (_, None) => entries.last().map_or(0.0, |e| e.lambda),
        };
        if let Some(HeatTail::Asymptotic { dim, straight, twisted }) = &tail {
            let n = *dim as usize;
            if straight.len() < n + 1 {
                return Err(SpectralError::Input(format!(
                    "straight heat coefficients must run at least up to index {n} (the t^0 term)"
                )));
            }
            if n > 0 && !(straight[0] > 0.0) {
                return Err(SpectralError::Input("leading heat coefficient must be positive (it is a volume)".into()));
            }
            if straight.iter().any(|c| !c.is_finite()) {
                return Err(SpectralError::Input("heat coefficients must be finite".into()));
            }
            if let TwistedTail::Coefficients(d) = twisted {
                if d.len() > straight.len() || d.iter().any(|c| !c.is_finite()) {
                    return Err(SpectralError::Input(
                        "twisted coefficients must be finite and no longer than the straight ones".into(),
                    ));
                }
            }
        }
        Ok(Self { entries, kernel, tail, cutoff })
    }

    /// A spectrum whose entries are everything.
    pub fn finite(entries: Vec<SpectrumEntry>, kernel: (u64, u64)) -> Result<Self, SpectralError> {
        Self::new(entries, kernel, Some(HeatTail::Finite), None)
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn kernel(&self) -> (u64, u64) {
        self.kernel
    }

    pub fn tail(&self) -> Option<&HeatTail> {
        self.tail.as_ref()
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.tail, Some(HeatTail::Finite))
    }

    /// Whether the involution is declared fixed-point free (exponentially small twisted trace).
    pub fn is_free(&self) -> bool {
        matches!(self.tail, Some(HeatTail::Asymptotic { twisted: TwistedTail::Free, .. }))
    }

    pub fn kernel_of(&self, part: Part) -> u64 {
        match part {
            Part::Plus => self.kernel.0,
            Part::Minus => self.kernel.1,
            Part::Total => self.kernel.0 + self.kernel.1,
        }
    }

    pub fn multiplicity_of(entry: &SpectrumEntry, part: Part) -> u64 {
        match part {
            Part::Plus => entry.mult_plus,
            Part::Minus => entry.mult_minus,
            Part::Total => entry.multiplicity(),
        }
    }

    /// The spectrum of `c Delta`.
    pub fn scaled(&self, c: f64) -> Result<Self, SpectralError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(SpectralError::Input(format!("scale must be positive, got {c}")));
        }
        let entries = self.entries.iter().map(|e| SpectrumEntry { lambda: e.lambda * c, ..*e }).collect();
        // Tr e^{-t c Delta} = theta(c t), so c_j picks up c^{(j - n)/2}
        let tail = self.tail.as_ref().map(|t| match t {
            HeatTail::Finite => HeatTail::Finite,
            HeatTail::Asymptotic { dim, straight, twisted } => {
                let n = *dim as i32;
                let rescale =
                    |v: &[f64]| v.iter().enumerate().map(|(j, x)| x * c.powf(f64::from(j as i32 - n) / 2.0)).collect();
                HeatTail::Asymptotic {
                    dim: *dim,
                    straight: rescale(straight),
                    twisted: match twisted {
                        TwistedTail::Free => TwistedTail::Free,
                        TwistedTail::Coefficients(d) => TwistedTail::Coefficients(rescale(d)),
                    },
                }
            }
        });
        Ok(Self { entries, kernel: self.kernel, tail, cutoff: self.cutoff * c })
    }

    /// Spectrum of the disjoint union: entries merge, kernels and heat coefficients add.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, SpectralError> {
        let tail = match (&self.tail, &other.tail) {
            (Some(HeatTail::Finite), Some(HeatTail::Finite)) => Some(HeatTail::Finite),
            (
                Some(HeatTail::Asymptotic { dim: n1, straight: s1, twisted: t1 }),
                Some(HeatTail::Asymptotic { dim: n2, straight: s2, twisted: t2 }),
            ) if n1 == n2 => {
                let add = |a: &[f64], b: &[f64]| -> Vec<f64> {
                    (0..a.len().max(b.len()))
                        .map(|j| a.get(j).copied().unwrap_or(0.0) + b.get(j).copied().unwrap_or(0.0))
                        .collect()
                };
                // both models are asymptotic, so the shorter one bounds the accuracy
                let keep = s1.len().min(s2.len());
                let mut straight = add(s1, s2);
                straight.truncate(keep);
                let twisted = match (t1, t2) {
                    (TwistedTail::Free, TwistedTail::Free) => TwistedTail::Free,
                    (TwistedTail::Coefficients(d), TwistedTail::Free)
                    | (TwistedTail::Free, TwistedTail::Coefficients(d)) => {
                        TwistedTail::Coefficients(d.iter().take(keep).copied().collect())
                    }
                    (TwistedTail::Coefficients(a), TwistedTail::Coefficients(b)) => {
                        let mut d = add(a, b);
                        d.truncate(keep);
                        TwistedTail::Coefficients(d)
                    }
                };
                Some(HeatTail::Asymptotic { dim: *n1, straight, twisted })
            }
            _ => {
                return Err(SpectralError::Input(
                    "disjoint union needs two finite spectra or two asymptotic tails of the same dimension".into(),
                ))
            }
        };
        let mut entries: Vec<SpectrumEntry> = self.entries.iter().chain(&other.entries).copied().collect();
        entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let kernel = (self.kernel.0 + other.kernel.0, self.kernel.1 + other.kernel.1);
        Ok(Self { entries, kernel, tail, cutoff: self.cutoff.min(other.cutoff) })
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        serde_json::from_str(text).map_err(|e| SpectralError::Input(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    entries: Vec<(f64, u64, u64)>,
    kernel: (u64, u64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailRepr {
    dim: u32,
    straight: Vec<f64>,
    twisted: Value,
}

fn tail_from_value(v: Value) -> Result<HeatTail, String> {
    if v.as_str() == Some("finite") {
        return Ok(HeatTail::Finite);
    }
    let t: TailRepr = serde_json::from_value(v).map_err(|e| format!("tail: {e}"))?;
    let twisted = match &t.twisted {
        Value::String(s) if s == "free" => TwistedTail::Free,
        Value::Array(_) => TwistedTail::Coefficients(
            serde_json::from_value(t.twisted.clone()).map_err(|e| format!("twisted coefficients: {e}"))?,
        ),
        _ => return Err("twisted must be \"free\" or a list of coefficients".into()),
    };
    Ok(HeatTail::Asymptotic { dim: t.dim, straight: t.straight, twisted })
}

fn tail_to_value(t: &HeatTail) -> Value {
    match t {
        HeatTail::Finite => Value::String("finite".into()),
        HeatTail::Asymptotic { dim, straight, twisted } => serde_json::json!({
            "dim": dim,
            "straight": straight,
            "twisted": match twisted {
                TwistedTail::Free => Value::String("free".into()),
                TwistedTail::Coefficients(d) => serde_json::json!(d),
            },
        }),
    }
}

impl Serialize for EquivariantSpectrum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpectrumRepr {
            entries: self.entries.iter().map(|e| (e.lambda, e.mult_plus, e.mult_minus)).collect(),
            kernel: self.kernel,
            tail: self.tail.as_ref().map(tail_to_value),
            cutoff: self.cutoff.is_finite().then_some(self.cutoff),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EquivariantSpectrum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SpectrumRepr::deserialize(d)?;
        let tail = r.tail.map(tail_from_value).transpose().map_err(D::Error::custom)?;
        let entries = r.entries.into_iter().map(|(l, p, m)| SpectrumEntry::new(l, p, m)).collect();
        EquivariantSpectrum::new(entries, r.kernel, tail, r.cutoff).map_err(D::Error::custom)
    }
}

/// Fixed curves of the involution: volume and scalar spectrum of each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub volume: f64,
    /// Scalar spectrum; only the total multiplicities are used.
    pub spectrum: EquivariantSpectrum,
}

impl CurveData {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if let Some(c) = self.curves.iter().find(|c| !(c.volume.is_finite() && c.volume > 0.0)) {
            return Err(SpectralError::Input(format!("curve volume {} is not positive", c.volume)));
        }
        Ok(())
    }
}
