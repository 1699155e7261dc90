use k3tau::spectral::{
    build_model_spectrum, build_model_spectrum_for_tolerance, dolbeault_zeta, equivariant_determinant,
    equivariant_torsion, tau_iota, zeta_part, zeta_signed, zeta_total, zeta_value, Curve, CurveData,
    EquivariantSpectrum, ModelSpec, Part, SpectralError, SpectrumEntry, TorusCharacter, ZetaOptions,
};
use k3tau_testkit::{epstein_zeta, finite_zeta, finite_zeta_at, legendre_eigenvalues, sphere_zeta, Degrees};
use nalgebra::DMatrix;
use proptest::prelude::*;

const MAX_TERMS: usize = 100_000;

fn opts() -> ZetaOptions {
    ZetaOptions::new(1e-8).unwrap()
}

fn sphere(radius: f64, parity_sign: i8) -> EquivariantSpectrum {
    build_model_spectrum_for_tolerance(&ModelSpec::RoundSphere { radius, parity_sign }, opts(), MAX_TERMS).unwrap()
}

fn torus(gram: &[[f64; 2]; 2], character: TorusCharacter) -> EquivariantSpectrum {
    let gram = gram.iter().map(|r| r.to_vec()).collect();
    build_model_spectrum_for_tolerance(&ModelSpec::FlatTorus { gram, character }, opts(), MAX_TERMS).unwrap()
}

/// `|got - want|` within the reported bound plus the oracle's own accuracy.
fn agrees(got: f64, bound: f64, want: f64) -> bool {
    (got - want).abs() <= bound + 1e-11
}

#[test]
fn antipodal_sphere_matches_hurwitz_oracle() {
    for radius in [1.0, 0.7, 2.5] {
        let s = sphere(radius, -1);
        let plus = zeta_signed(&s, 1, opts()).unwrap();
        let minus = zeta_signed(&s, -1, opts()).unwrap();
        let total = zeta_total(&s, opts()).unwrap();
        let (zp, dzp) = sphere_zeta(radius, Degrees::Even);
        let (zm, dzm) = sphere_zeta(radius, Degrees::Odd);
        let (zt, dzt) = sphere_zeta(radius, Degrees::All);
        assert!((plus.zeta_at_0 - zp).abs() < 1e-11 && (minus.zeta_at_0 - zm).abs() < 1e-11);
        assert!((total.zeta_at_0 - zt).abs() < 1e-11);
        assert!(agrees(plus.zeta_prime_at_0, plus.error_estimate, dzp), "r={radius}");
        assert!(agrees(minus.zeta_prime_at_0, minus.error_estimate, dzm), "r={radius}");
        assert!(agrees(total.zeta_prime_at_0, total.error_estimate, dzt), "r={radius}");
        // twisted zeta(0) = -1, so the determinant is pi r^2
        let det = equivariant_determinant(&s, opts()).unwrap();
        let want = std::f64::consts::PI.ln() + 2.0 * f64::ln(radius);
        assert!((det.log_value - want).abs() <= det.error_estimate + 1e-11);
    }
}

#[test]
fn sphere_with_identity_involution() {
    let s = sphere(1.0, 1);
    let plus = zeta_signed(&s, 1, opts()).unwrap();
    let minus = zeta_signed(&s, -1, opts()).unwrap();
    let (zt, dzt) = sphere_zeta(1.0, Degrees::All);
    assert!((plus.zeta_at_0 - zt).abs() < 1e-11);
    assert!(agrees(plus.zeta_prime_at_0, plus.error_estimate, dzt));
    assert_eq!((minus.zeta_at_0, minus.zeta_prime_at_0), (0.0, 0.0));
}

#[test]
fn sphere_eigenvalues_match_finite_volume_operator() {
    let s = build_model_spectrum(&ModelSpec::RoundSphere { radius: 1.0, parity_sign: -1 }, 15.0).unwrap();
    let fd = legendre_eigenvalues(200, 6);
    // fd[0] is the kernel
    assert!(fd[0].0.abs() < 1e-8 && s.kernel() == (1, 0));
    for (entry, &(ev, parity)) in s.entries().iter().zip(&fd[1..]) {
        assert!((2.0 * entry.lambda - ev).abs() < 1e-2 * (1.0 + ev));
        // antipodal map acts on zonal harmonics by the parity in x = cos(theta)
        let part_sign = if entry.mult_plus > 0 { 1 } else { -1 };
        assert_eq!(part_sign, parity);
    }
}

#[test]
fn sphere_values_at_two() {
    let s = sphere(1.0, -1);
    let total = zeta_value(&s, Part::Total, 2.0).unwrap();
    assert!((total.value - 4.0).abs() <= total.error_estimate + 1e-12);
    let plus = zeta_value(&s, Part::Plus, 2.0).unwrap();
    let minus = zeta_value(&s, Part::Minus, 2.0).unwrap();
    let twisted = 4.0 - 2.0 * std::f64::consts::PI.powi(2) / 3.0;
    assert!((plus.value - minus.value - twisted).abs() <= plus.error_estimate + minus.error_estimate + 1e-12);
    // the only pole in the asymptotic range sits at s = 1
    assert!(matches!(zeta_value(&s, Part::Total, 1.0), Err(SpectralError::Input(_))));
}

fn epstein_parts(gram: &[[f64; 2]; 2], shift: Option<usize>) -> ((f64, f64), (f64, f64)) {
    let q = DMatrix::from_fn(2, 2, |i, j| gram[i][j]);
    let a = q.try_inverse().unwrap();
    let (z, dz) = epstein_zeta(&a, None);
    let ln2 = 2f64.ln();
    match shift {
        None => ((z, dz + ln2 * z), (0.0, 0.0)),
        Some(k) => {
            let (zc, dzc) = epstein_zeta(&a, Some(k));
            let plus = ((z + zc) / 2.0, (dz + dzc) / 2.0);
            let minus = ((z - zc) / 2.0, (dz - dzc) / 2.0);
            ((plus.0, plus.1 + ln2 * plus.0), (minus.0, minus.1 + ln2 * minus.0))
        }
    }
}

#[test]
fn flat_tori_match_theta_inversion_oracle() {
    let grams = [[[1.0, 0.0], [0.0, 1.0]], [[2.0, 0.5], [0.5, 1.0]], [[1.0, -0.3], [-0.3, 0.6]]];
    for gram in &grams {
        for character in [TorusCharacter::Trivial, TorusCharacter::HalfShift(0), TorusCharacter::HalfShift(1)] {
            let s = torus(gram, character);
            let shift = match character {
                TorusCharacter::HalfShift(k) => Some(k),
                _ => None,
            };
            let ((zp, dzp), (zm, dzm)) = epstein_parts(gram, shift);
            let plus = zeta_signed(&s, 1, opts()).unwrap();
            let minus = zeta_signed(&s, -1, opts()).unwrap();
            assert!((plus.zeta_at_0 - zp).abs() < 1e-12 && (minus.zeta_at_0 - zm).abs() < 1e-12);
            assert!(agrees(plus.zeta_prime_at_0, plus.error_estimate, dzp), "{gram:?} {character:?} {plus:?} {dzp}");
            assert!(agrees(minus.zeta_prime_at_0, minus.error_estimate, dzm), "{gram:?} {character:?} {minus:?} {dzm}");
        }
    }
}

#[test]
fn square_torus_reference_values() {
    let s = torus(&[[1.0, 0.0], [0.0, 1.0]], TorusCharacter::HalfShift(0));
    let plus = zeta_signed(&s, 1, opts()).unwrap();
    let minus = zeta_signed(&s, -1, opts()).unwrap();
    // 30-digit values
    assert!(agrees(plus.zeta_prime_at_0, plus.error_estimate, -2.274_492_261_543_046_4));
    assert!(agrees(minus.zeta_prime_at_0, minus.error_estimate, -1.039_720_770_839_918));
    let total = zeta_total(&s, opts()).unwrap();
    assert!(agrees(total.zeta_prime_at_0, total.error_estimate, -3.314_213_032_382_964_3));
    // Z(2) = 4 zeta(2) beta(2) for the sum of two squares
    let catalan = 0.915_965_594_177_219;
    let v = zeta_value(&s, Part::Total, 2.0).unwrap();
    let want = 4.0 * 4.0 * std::f64::consts::PI.powi(2) / 6.0 * catalan;
    assert!((v.value - want).abs() <= v.error_estimate + 1e-11);
}

#[test]
fn reflection_splits_evenly() {
    let s = torus(&[[2.0, 0.5], [0.5, 1.0]], TorusCharacter::Reflection);
    let plus = zeta_signed(&s, 1, opts()).unwrap();
    let minus = zeta_signed(&s, -1, opts()).unwrap();
    assert!((plus.zeta_at_0 + 0.5).abs() < 1e-15 && (minus.zeta_at_0 + 0.5).abs() < 1e-15);
    let det = equivariant_determinant(&s, opts()).unwrap();
    assert!(det.log_value.abs() <= det.error_estimate + 1e-12);
}

#[test]
fn torsion_identity_on_models() {
    for s in [sphere(1.0, -1), torus(&[[1.0, 0.0], [0.0, 1.0]], TorusCharacter::HalfShift(0))] {
        let t = equivariant_torsion(&s, opts()).unwrap();
        assert!(t.residual.abs() <= t.combined_error, "{t:?}");
        assert!(t.combined_error < 1e-5);
        let q1 = dolbeault_zeta(&s, 1, opts()).unwrap();
        assert_eq!((q1.zeta_at_0, q1.zeta_prime_at_0), (0.0, 0.0));
    }
}

#[test]
fn term_budget_is_enforced() {
    let m = ModelSpec::FlatTorus { gram: vec![vec![1.0, 0.0], vec![0.0, 1.0]], character: TorusCharacter::HalfShift(0) };
    match build_model_spectrum_for_tolerance(&m, ZetaOptions::new(1e-13).unwrap(), 40) {
        Err(SpectralError::Accuracy { requested, achievable }) => {
            assert_eq!(requested, 1e-13);
            assert!(achievable > 1e-13);
        }
        other => panic!("expected an accuracy error, got {other:?}"),
    }
}

#[test]
fn curve_factors_enter_tau() {
    let s = torus(&[[1.0, 0.0], [0.0, 1.0]], TorusCharacter::Reflection);
    let circle = build_model_spectrum_for_tolerance(
        &ModelSpec::FlatTorus { gram: vec![vec![1.0]], character: TorusCharacter::Trivial },
        opts(),
        MAX_TERMS,
    )
    .unwrap();
    let data = CurveData { curves: vec![Curve { volume: 2.0, spectrum: circle.clone() }] };
    let r = tau_iota(&s, Some(&data), opts()).unwrap();
    let circle_zeta = zeta_total(&circle, opts()).unwrap();
    let want = -2.0 * r.determinant.log_value + 2f64.ln() + circle_zeta.zeta_prime_at_0;
    assert!((r.log_tau - want).abs() < 1e-14);
    assert!((r.curves[0].log_determinant + circle_zeta.zeta_prime_at_0).abs() < 1e-15);
}

fn finite_spectrum() -> impl Strategy<Value = (Vec<(f64, u64, u64)>, (u64, u64))> {
    (prop::collection::vec((0.05f64..40.0, 0u64..4, 0u64..4), 1..12), (0u64..3, 0u64..3)).prop_map(|(mut v, k)| {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        (v, k)
    })
}

fn build((v, k): &(Vec<(f64, u64, u64)>, (u64, u64))) -> EquivariantSpectrum {
    EquivariantSpectrum::finite(v.iter().map(|&(l, p, m)| SpectrumEntry::new(l, p, m)).collect(), *k).unwrap()
}

fn weights(v: &[(f64, u64, u64)], part: Part) -> Vec<(f64, f64)> {
    v.iter()
        .map(|&(l, p, m)| {
            let w = match part {
                Part::Plus => p,
                Part::Minus => m,
                Part::Total => p + m,
            };
            (l, w as f64)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_spectra_match_direct_sums(data in finite_spectrum()) {
        let s = build(&data);
        for part in [Part::Plus, Part::Minus, Part::Total] {
            let z = zeta_part(&s, part, opts()).unwrap();
            let (z0, dz0) = finite_zeta(&weights(&data.0, part));
            prop_assert!((z.zeta_at_0 - z0).abs() < 1e-12);
            prop_assert!((z.zeta_prime_at_0 - dz0).abs() <= z.error_estimate + 1e-12 * (1.0 + dz0.abs()));
            let v = zeta_value(&s, part, 1.5).unwrap();
            let want = finite_zeta_at(&weights(&data.0, part), 1.5);
            prop_assert!((v.value - want).abs() <= v.error_estimate + 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn scaling_law(data in finite_spectrum(), c in 0.1f64..10.0) {
        let s = build(&data);
        let t = s.scaled(c).unwrap();
        for part in [Part::Plus, Part::Minus] {
            let a = zeta_part(&s, part, opts()).unwrap();
            let b = zeta_part(&t, part, opts()).unwrap();
            prop_assert!((b.zeta_at_0 - a.zeta_at_0).abs() < 1e-12);
            let want = a.zeta_prime_at_0 - c.ln() * a.zeta_at_0;
            prop_assert!((b.zeta_prime_at_0 - want).abs() <= a.error_estimate + b.error_estimate + 1e-11);
        }
    }

    #[test]
    fn additivity_under_disjoint_union(x in finite_spectrum(), y in finite_spectrum()) {
        let (a, b) = (build(&x), build(&y));
        let u = a.disjoint_union(&b).unwrap();
        for part in [Part::Plus, Part::Minus, Part::Total] {
            let (za, zb, zu) = (zeta_part(&a, part, opts()).unwrap(), zeta_part(&b, part, opts()).unwrap(), zeta_part(&u, part, opts()).unwrap());
            prop_assert!((zu.zeta_at_0 - za.zeta_at_0 - zb.zeta_at_0).abs() < 1e-12);
            let err = za.error_estimate + zb.error_estimate + zu.error_estimate + 1e-11;
            prop_assert!((zu.zeta_prime_at_0 - za.zeta_prime_at_0 - zb.zeta_prime_at_0).abs() <= err);
        }
    }

    #[test]
    fn torsion_and_determinant_agree(data in finite_spectrum()) {
        let s = build(&data);
        let t = equivariant_torsion(&s, opts()).unwrap();
        prop_assert!(t.residual.abs() <= t.combined_error + 1e-12);
        let q0 = dolbeault_zeta(&s, 0, opts()).unwrap();
        let q2 = dolbeault_zeta(&s, 2, opts()).unwrap();
        prop_assert_eq!(q0.zeta_prime_at_0, -q2.zeta_prime_at_0);
    }

    #[test]
    fn sphere_scaling(radius in 0.3f64..3.0) {
        let s = sphere(radius, -1);
        let unit = sphere(1.0, -1);
        let (a, b) = (zeta_total(&unit, opts()).unwrap(), zeta_total(&s, opts()).unwrap());
        // Delta scales by r^{-2}
        let want = a.zeta_prime_at_0 + 2.0 * radius.ln() * a.zeta_at_0;
        prop_assert!((b.zeta_prime_at_0 - want).abs() <= a.error_estimate + b.error_estimate + 1e-11);
    }
}
