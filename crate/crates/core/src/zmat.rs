//! Dense matrices over the integers and rationals.
//!
//! Matrices are `Vec<Vec<_>>` in row-major order. Sizes here are at most a
//! few dozen, so nothing clever is needed beyond fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZMatrix = Vec<Vec<BigInt>>;
pub type QMatrix = Vec<Vec<BigRational>>;

pub fn from_i64(rows: &[Vec<i64>]) -> ZMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> ZMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn zeros(rows: usize, cols: usize) -> ZMatrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn is_square(m: &ZMatrix, n: usize) -> bool {
    m.len() == n && m.iter().all(|r| r.len() == n)
}

pub fn transpose(m: &ZMatrix) -> ZMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mul(a: &ZMatrix, b: &ZMatrix) -> ZMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn neg(a: &ZMatrix) -> ZMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

pub fn mul_vec(a: &ZMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// `xᵀ M y`.
pub fn bilinear(m: &ZMatrix, x: &[BigInt], y: &[BigInt]) -> BigInt {
    let my = mul_vec(m, y);
    x.iter().zip(&my).map(|(a, b)| a * b).sum()
}

pub fn block_diag(a: &ZMatrix, b: &ZMatrix) -> ZMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[n + i][n + j] = b[i][j].clone();
        }
    }
    out
}

/// Leading principal minors `d_1, …, d_n` by Bareiss fraction-free
/// elimination without pivoting. Elimination stops at the first zero pivot;
/// the returned vector is then shorter than `n` and its last entry is zero.
pub fn leading_minors(m: &ZMatrix) -> Vec<BigInt> {
    let n = m.len();
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = pivot;
    }
    minors
}

/// Exact determinant (Bareiss with row pivoting).
pub fn det(m: &ZMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Solves `A·X = B` fraction-free: returns `(N, d)` with `X = N / d`, or
/// `None` if `A` is singular.
pub fn solve_z(a: &ZMatrix, b: &ZMatrix) -> Option<(ZMatrix, BigInt)> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut aug: ZMatrix = a.iter().zip(b).map(|(r, s)| r.iter().chain(s).cloned().collect()).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !aug[i][k].is_zero())?;
        aug.swap(p, k);
        for i in k + 1..n {
            for j in k + 1..n + m {
                let v = &aug[i][j] * &aug[k][k] - &aug[i][k] * &aug[k][j];
                aug[i][j] = v / &prev;
            }
            aug[i][k] = BigInt::zero();
        }
        prev = aug[k][k].clone();
    }
    // The last pivot is ±det A, so `d·X` is integral and each back
    // substitution division is exact.
    let d = prev;
    let mut x = vec![vec![BigInt::zero(); m]; n];
    for c in 0..m {
        for i in (0..n).rev() {
            let mut s = &d * &aug[i][n + c];
            for j in i + 1..n {
                s -= &aug[i][j] * &x[j][c];
            }
            x[i][c] = s / &aug[i][i];
        }
    }
    Some((x, d))
}

pub fn to_rational(m: &ZMatrix) -> QMatrix {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Inverse over ℚ, `None` if singular.
pub fn inverse_q(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m.clone();
    let mut inv: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &piv;
            inv[col][j] = &inv[col][j] / &piv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn mul_q(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

/// Converts a rational matrix to an integer one if every entry is integral.
pub fn integral(m: &QMatrix) -> Option<ZMatrix> {
    m.iter().map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect::<Option<Vec<_>>>()).collect()
}

/// Reduction of an integer to `0..modulus`.
pub fn residue(x: &BigInt, modulus: u32) -> u32 {
    let m = BigInt::from(modulus);
    let r = x.mod_floor(&m);
    r.iter_u32_digits().next().unwrap_or(0)
}

/// Positive definiteness of a rational symmetric matrix via leading minors.
pub fn is_positive_definite_q(m: &QMatrix) -> bool {
    let n = m.len();
    let mut a = m.clone();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_minors() {
        let m = from_i64(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(det(&m), BigInt::from(4));
        assert_eq!(leading_minors(&m), vec![2.into(), 3.into(), 4.into()]);
        let p = from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(det(&p), BigInt::from(-1));
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let m = to_rational(&from_i64(&[vec![2, 1], vec![1, 1]]));
        let inv = inverse_q(&m).unwrap();
        let id = mul_q(&m, &inv);
        assert_eq!(integral(&id).unwrap(), identity(2));
        assert!(inverse_q(&to_rational(&from_i64(&[vec![1, 2], vec![2, 4]]))).is_none());
    }

    #[test]
    fn fraction_free_solve_matches_inverse() {
        let a = from_i64(&[vec![0, 2, 1], vec![3, 1, -1], vec![1, 0, 4]]);
        let b = from_i64(&[vec![1, 0], vec![5, -2], vec![7, 3]]);
        let (n, d) = solve_z(&a, &b).unwrap();
        let x: QMatrix = n.iter().map(|r| r.iter().map(|v| BigRational::new(v.clone(), d.clone())).collect()).collect();
        assert_eq!(mul_q(&to_rational(&a), &x), to_rational(&b));
        assert!(solve_z(&from_i64(&[vec![1, 2], vec![2, 4]]), &from_i64(&[vec![1], vec![1]])).is_none());
    }

    #[test]
    fn residues_are_nonnegative() {
        assert_eq!(residue(&BigInt::from(-1), 4), 3);
        assert_eq!(residue(&BigInt::from(6), 4), 2);
    }
}
