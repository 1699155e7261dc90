use k3tau::lattice::{
    build_standard_lattice, direct_sum, eigenlattice, enriques_involution, is_isometry, IntMatrix, Lattice,
    LatticeIsometry, Signature, StandardLattice, SublatticeBasis,
};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn k3() -> Lattice {
    Lattice::standard(StandardLattice::K3)
}

#[test]
fn k3_is_even_unimodular_of_signature_3_19() {
    let l = build_standard_lattice("K3").unwrap();
    assert_eq!(l.rank(), 22);
    assert_eq!(l.signature().unwrap(), Signature { positive: 3, negative: 19 });
    assert!(l.determinant().abs().is_one());
}

#[test]
fn direct_sum_examples() {
    let u = build_standard_lattice("U").unwrap();
    let e8 = build_standard_lattice("E8minus").unwrap();
    assert_eq!(direct_sum(std::slice::from_ref(&u)).unwrap(), u);
    let parts = [u.clone(), u.clone(), u, e8.clone(), e8.clone()];
    assert_eq!(direct_sum(&parts).unwrap(), k3());
    let two = direct_sum(&[e8.clone(), e8]).unwrap();
    assert_eq!(two.rank(), 16);
    assert_eq!(two.signature().unwrap(), Signature { positive: 0, negative: 16 });
}

#[test]
fn enriques_involution_shape() {
    let f = enriques_involution();
    assert!(f.is_involution());
    assert!(is_isometry(f.matrix(), &k3()).unwrap());
    assert_eq!(f.matrix().trace(), -2);
    let v: Vec<i64> = (1..=22).collect();
    let w = f.apply(&v).unwrap();
    assert_eq!(&w[0..2], &[3, 4]);
    assert_eq!(&w[2..4], &[1, 2]);
    assert_eq!(&w[4..6], &[-5, -6]);
    assert_eq!(&w[6..14], &v[14..22]);
    assert_eq!(&w[14..22], &v[6..14]);
}

#[test]
fn enriques_eigenlattices() {
    let f = enriques_involution();
    let plus = eigenlattice(&f, 1).unwrap();
    let minus = eigenlattice(&f, -1).unwrap();
    assert_eq!(plus.rank(), 10);
    assert_eq!(minus.rank(), 12);
    assert_eq!(plus.signature().unwrap(), Signature { positive: 1, negative: 9 });
    assert_eq!(minus.signature().unwrap(), Signature { positive: 2, negative: 10 });
    assert!(plus.is_hyperbolic_type().unwrap());
    assert!(!minus.is_hyperbolic_type().unwrap());
    assert!(plus.is_primitive() && minus.is_primitive());

    let dp = plus.discriminant_info().unwrap();
    assert_eq!(dp.elementary_divisors, vec![2; 10]);
    assert_eq!(dp.a_invariant, 10);
    assert!(dp.is_two_elementary);
    let dm = minus.discriminant_info().unwrap();
    assert!(dm.is_two_elementary);
    assert_eq!(dm.a_invariant, 10);

    let perp = plus.orthogonal_complement().unwrap();
    assert!(perp.same_sublattice(&minus));
    assert_eq!(perp.signature().unwrap(), Signature { positive: 2, negative: 10 });
}

#[test]
fn invariant_lattice_is_spanned_by_doubled_vectors() {
    let plus = eigenlattice(&enriques_involution(), 1).unwrap();
    let mut cols = Vec::new();
    for i in 0..2 {
        let mut v = vec![0; 22];
        v[i] = 1;
        v[2 + i] = 1;
        cols.push(v);
    }
    for i in 0..8 {
        let mut v = vec![0; 22];
        v[6 + i] = 1;
        v[14 + i] = 1;
        cols.push(v);
    }
    let expected = SublatticeBasis::new(k3(), IntMatrix::from_columns(22, &cols).unwrap()).unwrap();
    assert!(plus.same_sublattice(&expected));
}

#[test]
fn e8_negative_definite_is_not_hyperbolic() {
    let e8 = build_standard_lattice("E8minus").unwrap();
    assert!(!e8.as_sublattice().is_hyperbolic_type().unwrap());
}

#[test]
fn non_primitive_sublattice_is_detected() {
    let u = build_standard_lattice("U").unwrap();
    let doubled = SublatticeBasis::new(u, IntMatrix::from_rows(&[vec![2], vec![0]]).unwrap()).unwrap();
    assert!(!doubled.is_primitive());
}

/// Reflection `x -> x - 2<x,r>/<r,r> r` for a root `<r,r> = +-2`.
fn reflection(l: &Lattice, r: &[i64]) -> Option<LatticeIsometry> {
    let rr = l.pairing(r, r);
    if rr.abs() != 2 {
        return None;
    }
    let n = l.rank();
    let mut m = IntMatrix::identity(n);
    let gr = l.gram().mul_vec(r).ok()?;
    for i in 0..n {
        for j in 0..n {
            let delta = (2 / rr) as i64 * r[i] * gr[j];
            m[(i, j)] -= delta;
        }
    }
    LatticeIsometry::new(m, l.clone()).ok()
}

/// Roots of the K3 lattice built from short patterns inside a single block.
fn root(kind: u8, block: usize, shift: i64) -> Vec<i64> {
    let mut r = vec![0; 22];
    match kind % 3 {
        0 => {
            // e + f in a U block, square 2
            let b = (block % 3) * 2;
            r[b] = 1;
            r[b + 1] = 1;
        }
        1 => {
            // e - f in a U block, square -2
            let b = (block % 3) * 2;
            r[b] = 1;
            r[b + 1] = -1;
        }
        _ => {
            // simple root of an E8 block plus an isotropic shift, square -2
            let e = 6 + (block % 16);
            r[e] = 1;
            r[block % 3 * 2] = shift;
        }
    }
    r
}

fn random_isometry(steps: &[(u8, usize, i64)]) -> LatticeIsometry {
    let l = k3();
    let mut g = LatticeIsometry::identity(&l);
    for &(k, b, s) in steps {
        if let Some(r) = reflection(&l, &root(k, b, s)) {
            g = r.compose(&g).unwrap();
        }
    }
    g
}

fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for r in 0..n {
            p[(r, i)] += c * p[(r, j)];
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn signature_is_congruence_invariant(ops in proptest::collection::vec((0usize..22, 0usize..22, -2i64..=2), 0..12)) {
        let l = k3();
        let p = unimodular(22, &ops);
        let g2 = p.transpose().mul(l.gram()).and_then(|x| x.mul(&p));
        prop_assume!(g2.is_ok());
        let l2 = Lattice::new(g2.unwrap()).unwrap();
        prop_assert_eq!(l2.signature().unwrap(), l.signature().unwrap());
        prop_assert_eq!(l2.determinant().abs(), BigInt::one());
    }

    #[test]
    fn conjugated_involutions_split_the_rank(steps in proptest::collection::vec((0u8..3, 0usize..16, -1i64..=1), 0..4)) {
        let g = random_isometry(&steps);
        let g_inv = random_isometry(&steps.iter().rev().copied().collect::<Vec<_>>());
        prop_assert_eq!(g.compose(&g_inv).unwrap(), LatticeIsometry::identity(&k3()));
        let f = g.compose(&enriques_involution()).unwrap().compose(&g_inv).unwrap();
        prop_assert!(f.is_involution());
        let plus = eigenlattice(&f, 1).unwrap();
        let minus = eigenlattice(&f, -1).unwrap();
        prop_assert_eq!(plus.rank() + minus.rank(), 22);
        prop_assert!(plus.is_primitive() && minus.is_primitive());
        prop_assert_eq!(plus.signature().unwrap(), Signature { positive: 1, negative: 9 });
        prop_assert!(plus.discriminant_info().unwrap().is_two_elementary);
        prop_assert!(minus.discriminant_info().unwrap().is_two_elementary);
        let image = g.map_sublattice(&eigenlattice(&enriques_involution(), 1).unwrap()).unwrap();
        prop_assert!(image.same_sublattice(&plus));
    }

    #[test]
    fn double_complement_returns_saturated_sublattice(
        vecs in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 22), 1..4)
    ) {
        let l = k3();
        let span = IntMatrix::from_columns(22, &vecs).unwrap();
        // the complement of anything is saturated, so start from one
        let probe = SublatticeBasis::new(l.clone(), span);
        prop_assume!(probe.is_ok());
        let m = probe.unwrap().orthogonal_complement().unwrap();
        prop_assert!(m.is_primitive());
        let back = m.orthogonal_complement().unwrap().orthogonal_complement().unwrap();
        prop_assert!(back.same_sublattice(&m));
    }
}
