//! Exact normal forms over the integers and rationals.
//!
//! All routines work on `Vec<Vec<BigInt>>` row-major matrices so that no
//! intermediate entry can overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type BigMatrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn swap_columns(m: &mut BigMatrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// `col[dst] -= q * col[src]`
fn column_axpy(m: &mut BigMatrix, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let delta = q * &row[src];
        row[dst] -= delta;
    }
}

fn row_axpy(m: &mut BigMatrix, dst: usize, src: usize, q: &BigInt) {
    let (d, s) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Z-basis of `{x in Z^cols : A x = 0}`, returned as vectors of length `cols`.
///
/// Column operations bring `A` to echelon form `A U = H`; the columns of the
/// unimodular `U` sitting under the zero columns of `H` span the kernel. The
/// integer kernel is always saturated in `Z^cols`.
pub(crate) fn integer_kernel(a: &BigMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    let mut m = a.clone();
    let mut u = identity(cols);
    let mut pivot = 0;
    for i in 0..m.len() {
        if pivot == cols {
            break;
        }
        loop {
            let best = (pivot..cols)
                .filter(|&j| !m[i][j].is_zero())
                .min_by(|&x, &y| m[i][x].abs().cmp(&m[i][y].abs()));
            let Some(b) = best else { break };
            swap_columns(&mut m, pivot, b);
            swap_columns(&mut u, pivot, b);
            let mut reduced = true;
            for j in pivot + 1..cols {
                if m[i][j].is_zero() {
                    continue;
                }
                let q = m[i][j].div_floor(&m[i][pivot]);
                column_axpy(&mut m, j, pivot, &q);
                column_axpy(&mut u, j, pivot, &q);
                if !m[i][j].is_zero() {
                    reduced = false;
                }
            }
            if reduced {
                pivot += 1;
                break;
            }
        }
    }
    (pivot..cols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Row-style Hermite normal form of the lattice spanned by `vectors`.
///
/// Returns the nonzero rows: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. Two generating sets span the same
/// lattice iff their forms agree.
pub(crate) fn hermite_rows(vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut m: BigMatrix = vectors.to_vec();
    let n = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..n {
        if r == m.len() {
            break;
        }
        loop {
            let best = (r..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&x, &y| m[x][col].abs().cmp(&m[y][col].abs()));
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut reduced = true;
            for i in r + 1..m.len() {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[r][col]);
                row_axpy(&mut m, i, r, &q);
                if !m[i][col].is_zero() {
                    reduced = false;
                }
            }
            if reduced {
                break;
            }
        }
        if r < m.len() && !m[r][col].is_zero() {
            if m[r][col].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -&*x;
                }
            }
            for i in 0..r {
                let q = m[i][col].div_floor(&m[r][col]);
                if !q.is_zero() {
                    row_axpy(&mut m, i, r, &q);
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

/// Nonzero elementary divisors `d_1 | d_2 | ...` of an integer matrix.
/// The number returned is the rank.
pub(crate) fn smith_divisors(a: &BigMatrix, cols: usize) -> Vec<BigInt> {
    let mut m = a.clone();
    let rows = m.len();
    let mut divisors = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return divisors };
            m.swap(t, pi);
            swap_columns(&mut m, t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = m[i][t].div_floor(&m[t][t]);
                    row_axpy(&mut m, i, t, &q);
                    clean &= m[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&m[t][t]);
                    column_axpy(&mut m, j, t, &q);
                    clean &= m[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let pivot = m[t][t].clone();
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => row_axpy(&mut m, t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        divisors.push(m[t][t].abs());
    }
    divisors
}

/// Diagonalizes a symmetric matrix by rational congruence and returns the
/// diagonal. `None` when the matrix is singular.
///
/// Every step (symmetric swap, symmetric row/column addition, Schur
/// elimination) is a congruence by a determinant +-1 matrix, so the product
/// of the pivots is the determinant and their signs give the signature.
pub(crate) fn congruence_pivots(gram: &BigMatrix) -> Option<Vec<BigRational>> {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> =
        gram.iter().map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
            symmetric_swap(&mut a, k, i);
        } else {
            let (i, j) = (k..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_zero())?;
            // both diagonals vanish, so the new a_ii equals 2 a_ij != 0
            symmetric_add(&mut a, i, j);
            symmetric_swap(&mut a, k, i);
        }
        let p = a[k][k].clone();
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let delta = &f * &a[k][j];
                a[i][j] -= delta;
            }
        }
        for i in k + 1..n {
            a[i][k] = BigRational::zero();
            a[k][i] = BigRational::zero();
        }
        pivots.push(p);
    }
    Some(pivots)
}

fn symmetric_swap(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// row_i += row_j, then col_i += col_j.
fn symmetric_add(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    let rj = a[j].clone();
    for (x, y) in a[i].iter_mut().zip(rj) {
        *x += y;
    }
    for row in a.iter_mut() {
        let y = row[j].clone();
        row[i] += y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> BigMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_rank_one_row() {
        let k = integer_kernel(&big(&[&[2, 4, 6]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: BigInt = &v[0] * 2 + &v[1] * 4 + &v[2] * 6;
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn smith_of_classic_example() {
        let d = smith_divisors(&big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), 3);
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn smith_of_rectangular_and_zero() {
        assert!(smith_divisors(&big(&[&[0, 0], &[0, 0]]), 2).is_empty());
        let d = smith_divisors(&big(&[&[3], &[5]]), 1);
        assert_eq!(d, vec![BigInt::from(1)]);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_rows(&big(&[&[1, 2], &[3, 4]]));
        let b = hermite_rows(&big(&[&[4, 6], &[1, 2]]));
        assert_eq!(a, b);
        assert_eq!(a, big(&[&[1, 0], &[0, 2]]));
    }

    #[test]
    fn pivots_of_hyperbolic_plane() {
        let p = congruence_pivots(&big(&[&[0, 1], &[1, 0]])).unwrap();
        let det: BigRational = p.iter().product();
        assert_eq!(det, BigRational::from_integer(BigInt::from(-1)));
        assert_eq!(p.iter().filter(|x| x.is_positive()).count(), 1);
    }

    #[test]
    fn singular_gram_has_no_pivots() {
        assert!(congruence_pivots(&big(&[&[1, 1], &[1, 1]])).is_none());
        assert!(congruence_pivots(&big(&[&[0, 0], &[0, 0]])).is_none());
    }
}
