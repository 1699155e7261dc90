//! Gamma-type special functions in double precision.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Gamma(x)|` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Gamma(x)` for real `x` away from the poles.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        pi / ((pi * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// Exponential integral `E1(x) = int_x^inf e^-t / t dt` for `x > 0`.
pub fn e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = -EULER_GAMMA - x.ln();
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let delta = -term / k as f64;
            sum += delta;
            if delta.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        sum
    } else {
        // modified Lentz on the even continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Lower incomplete gamma by its power series, `s > 0`.
fn lower_gamma_series(s: f64, x: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut a = s;
    for _ in 0..1000 {
        a += 1.0;
        term *= x / a;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + s * x.ln()).exp()
}

/// Upper incomplete gamma by continued fraction, accurate for `x >= s + 1`.
fn upper_gamma_fraction(s: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = a * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + s * x.ln()).exp()
}

/// Upper incomplete gamma `Gamma(s, x) = int_x^inf t^(s-1) e^-t dt` for `x > 0`
/// and real `s` (including non-positive integers).
pub fn upper_gamma(s: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if s == 0.0 {
        e1(x)
    } else if x >= s + 1.0 || x >= 1.0 && s <= 0.0 {
        upper_gamma_fraction(s, x)
    } else if s > 0.0 {
        gamma(s) - lower_gamma_series(s, x)
    } else {
        // Gamma(s, x) = (Gamma(s + 1, x) - x^s e^-x) / s
        (upper_gamma(s + 1.0, x) - (s * x.ln() - x).exp()) / s
    }
}
