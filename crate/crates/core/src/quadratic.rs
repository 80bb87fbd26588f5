//! Quadratic forms over F₂ with values in ℤ/4, and their invariants.
//!
//! A form `q: V → ℤ/4` associated to a symmetric bilinear `b` satisfies
//! `q(x+y) = q(x) + q(y) + 2b(x,y)`; it is stored by its values on the
//! standard basis. When `b` is alternating, `q = 2q′` for an ordinary
//! F₂-valued form `q′` (see [`F2Form`]).
//!
//! The Brown invariant `σ(q) ∈ ℤ/8` is computed in polynomial time from an
//! orthonormal basis (`σ = g⁺ − g⁻`) or a symplectic basis (`σ = 4·Arf`),
//! and independently from the Gauss sum `Σ i^{q(x)} = 2^{n/2} e^{iπσ/4}`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bits::{self, bit, parity, BitMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_GAUSS_BOUND: usize = 20;

macro_rules! residue_type {
    ($name:ident, $modulus:expr) => {
        #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
        pub struct $name(u8);

        impl $name {
            pub const MODULUS: u8 = $modulus;
            pub const ZERO: Self = $name(0);

            pub fn new(v: i64) -> Self {
                $name(v.rem_euclid($modulus as i64) as u8)
            }

            pub fn value(self) -> u8 {
                self.0
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                $name((self.0 + o.0) % $modulus)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                $name((self.0 + $modulus - o.0) % $modulus)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(($modulus - self.0) % $modulus)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_u8(self.0)
            }
        }
    };
}

residue_type!(Z4, 4);
residue_type!(Z8, 8);

/// A nondegenerate symmetric bilinear form on `F₂ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2BilinearSpace {
    matrix: BitMatrix,
}

impl F2BilinearSpace {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !matrix.is_invertible() {
            return Err(Error::Degenerate);
        }
        Ok(F2BilinearSpace { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    #[inline]
    pub fn b(&self, x: u64, y: u64) -> u8 {
        self.matrix.form(x, y)
    }

    pub fn is_alternating(&self) -> bool {
        self.matrix.is_alternating()
    }

    /// `Σ_{k<l} x_k x_l b_kl mod 2`, via `Σ_{k∈x} |row_k ∧ x| = Σ_{k∈x} b_kk + 2·(that count)`.
    #[inline]
    fn cross(&self, x: u64) -> u8 {
        let rows = self.matrix.rows();
        let mut total = 0u32;
        let mut rest = x;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            total += (rows[k] & x).count_ones();
            rest &= rest - 1;
        }
        let diag = (x & self.matrix.diagonal()).count_ones();
        (((total - diag) / 2) & 1) as u8
    }

    /// Orthogonal sum, with the second summand on the high coordinates.
    pub fn orthogonal_sum(&self, other: &Self) -> Result<Self> {
        let (n, m) = (self.dim(), other.dim());
        bits::check_dim(n + m)?;
        let mut rows: Vec<u64> = self.matrix.rows().to_vec();
        rows.extend(other.matrix.rows().iter().map(|r| r << n));
        Ok(F2BilinearSpace { matrix: BitMatrix::from_rows(n + m, rows) })
    }
}

/// `q: F₂ⁿ → ℤ/4` associated to `b`, stored by its basis values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z4Form {
    space: F2BilinearSpace,
    diag: Vec<Z4>,
    lo: u64,
    hi: u64,
}

impl Z4Form {
    pub fn new(space: F2BilinearSpace, diag: Vec<Z4>) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::LengthMismatch { expected: space.dim(), got: diag.len() });
        }
        for (k, d) in diag.iter().enumerate() {
            if d.value() & 1 != space.matrix.get(k, k) {
                return Err(Error::DiagonalParity { index: k, value: d.value() });
            }
        }
        let lo = bits::from_bits(&diag.iter().map(|d| d.value() & 1).collect::<Vec<_>>());
        let hi = bits::from_bits(&diag.iter().map(|d| d.value() >> 1).collect::<Vec<_>>());
        Ok(Z4Form { space, diag, lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &F2BilinearSpace {
        &self.space
    }

    pub fn diag(&self) -> &[Z4] {
        &self.diag
    }

    #[inline]
    pub fn eval(&self, x: u64) -> Z4 {
        let v = (x & self.lo).count_ones() + 2 * (x & self.hi).count_ones() + 2 * self.space.cross(x) as u32;
        Z4((v & 3) as u8)
    }

    /// `q(x)` for a coordinate vector of 0/1 entries.
    pub fn evaluate(&self, x: &[u8]) -> Result<Z4> {
        if x.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.eval(bits::from_bits(x)))
    }

    /// `(α + q)(x) = q(x) + 2b(α, x)`.
    pub fn translate(&self, alpha: u64) -> Z4Form {
        let ba = self.space.matrix.mul_vec(alpha);
        let diag = (0..self.dim()).map(|k| self.diag[k] + Z4(2 * bit(ba, k))).collect();
        Z4Form::new(self.space.clone(), diag).expect("translation preserves parity")
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Result<Z4Form> {
        let space = self.space.orthogonal_sum(&other.space)?;
        let diag = self.diag.iter().chain(&other.diag).copied().collect();
        Z4Form::new(space, diag)
    }
}

/// `q′: F₂ⁿ → F₂` with `q′(x+y) = q′(x) + q′(y) + b(x,y)`, `b` alternating.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct F2Form {
    matrix: BitMatrix,
    diag: u64,
}

impl F2Form {
    pub fn new(space: &F2BilinearSpace, diag: u64) -> Result<Self> {
        Self::from_matrix(space.matrix.clone(), diag)
    }

    /// For an alternating matrix that has not been checked for
    /// nondegeneracy (the caller owns that invariant).
    pub fn from_matrix(matrix: BitMatrix, diag: u64) -> Result<Self> {
        if !matrix.is_alternating() {
            return Err(Error::NotAlternating);
        }
        let diag = diag & bits::mask(matrix.dim());
        Ok(F2Form { matrix, diag })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Basis values `q′(β_k)` packed as bits.
    pub fn diag(&self) -> u64 {
        self.diag
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u8 {
        let rows = self.matrix.rows();
        let mut total = 0u32;
        let mut rest = x;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            total += (rows[k] & x).count_ones();
            rest &= rest - 1;
        }
        (parity(x & self.diag) + ((total / 2) & 1) as u8) & 1
    }

    /// `q′(x) + b(α, x)`.
    pub fn translate(&self, alpha: u64) -> F2Form {
        F2Form { matrix: self.matrix.clone(), diag: self.diag ^ self.matrix.mul_vec(alpha) }
    }

    /// `2q′` as a ℤ/4 form.
    pub fn doubled(&self) -> Result<Z4Form> {
        let space = F2BilinearSpace::new(self.matrix.clone())?;
        let diag = (0..self.dim()).map(|k| Z4(2 * bit(self.diag, k))).collect();
        Z4Form::new(space, diag)
    }
}

/// Orthonormal basis of a non-alternating form.
///
/// Greedy: take a vector with `b(x,x) = 1` (the diagonal is linear over F₂,
/// so one exists among the working basis while the residual form is not
/// alternating) and project it out. If the residual becomes alternating,
/// fold a hyperbolic pair `(a, c)` into a chosen vector `u`:
/// `u ← u+a+c`, `a ← a+u`, `c ← c+u` is orthonormal on their span.
pub fn orthonormal_basis(space: &F2BilinearSpace) -> Result<Vec<u64>> {
    if space.is_alternating() {
        return Err(Error::NoOrthonormalBasis);
    }
    let n = space.dim();
    let mut work: Vec<u64> = (0..n).map(|k| 1u64 << k).collect();
    let mut out: Vec<u64> = Vec::with_capacity(n);
    while !work.is_empty() {
        if let Some(p) = work.iter().position(|&w| space.b(w, w) == 1) {
            let u = work.swap_remove(p);
            for w in work.iter_mut() {
                if space.b(u, *w) == 1 {
                    *w ^= u;
                }
            }
            out.push(u);
            continue;
        }
        let a = work.swap_remove(0);
        let Some(p) = work.iter().position(|&w| space.b(a, w) == 1) else {
            return Err(Error::Degenerate);
        };
        let c = work.swap_remove(p);
        project_hyperbolic(space, &mut work, a, c);
        let u = out.pop().ok_or(Error::Internal("alternating residual without a chosen vector".into()))?;
        out.push(u ^ a ^ c);
        out.push(a ^ u);
        out.push(c ^ u);
    }
    Ok(out)
}

/// Makes every vector of `work` orthogonal to the hyperbolic pair `(a, c)`.
fn project_hyperbolic(space: &F2BilinearSpace, work: &mut [u64], a: u64, c: u64) {
    for w in work.iter_mut() {
        let (wa, wc) = (space.b(*w, a), space.b(*w, c));
        if wc == 1 {
            *w ^= a;
        }
        if wa == 1 {
            *w ^= c;
        }
    }
}

/// Symplectic basis `(a_j, b_j)` of a nondegenerate alternating form.
pub fn symplectic_basis_f2(space: &F2BilinearSpace) -> Result<Vec<(u64, u64)>> {
    symplectic_pairs(space.matrix())
}

pub(crate) fn symplectic_pairs(matrix: &BitMatrix) -> Result<Vec<(u64, u64)>> {
    if !matrix.is_alternating() {
        return Err(Error::NotAlternating);
    }
    let n = matrix.dim();
    if n % 2 != 0 {
        return Err(Error::Degenerate);
    }
    let mut work: Vec<u64> = (0..n).map(|k| 1u64 << k).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    while !work.is_empty() {
        let a = work.remove(0);
        let Some(p) = work.iter().position(|&w| matrix.form(a, w) == 1) else {
            return Err(Error::Degenerate);
        };
        let c = work.remove(p);
        for w in work.iter_mut() {
            let (wa, wc) = (matrix.form(*w, a), matrix.form(*w, c));
            if wc == 1 {
                *w ^= a;
            }
            if wa == 1 {
                *w ^= c;
            }
        }
        pairs.push((a, c));
    }
    Ok(pairs)
}

/// Arf invariant `Σ q′(a_j) q′(b_j)` over a symplectic basis.
pub fn arf(q: &F2Form) -> Result<u8> {
    let pairs = symplectic_pairs(&q.matrix)?;
    Ok(pairs.iter().fold(0, |acc, &(a, c)| acc ^ (q.eval(a) & q.eval(c))))
}

/// Brown invariant by the polynomial-time normal-form route.
pub fn brown(q: &Z4Form) -> Result<Z8> {
    let space = q.space();
    if space.is_alternating() {
        let half = F2Form::from_matrix(space.matrix().clone(), q.hi)?;
        return Ok(Z8(4 * arf(&half)?));
    }
    let basis = orthonormal_basis(space)?;
    let (mut plus, mut minus) = (0i64, 0i64);
    for u in basis {
        match q.eval(u).value() {
            1 => plus += 1,
            3 => minus += 1,
            v => return Err(Error::Internal(format!("even value {v} on an orthonormal vector"))),
        }
    }
    debug_assert_eq!((plus + minus) as usize, q.dim());
    Ok(Z8::new(plus - minus))
}

/// An exact Gaussian integer `re + i·im`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GaussSum {
    pub re: i128,
    pub im: i128,
}

impl GaussSum {
    pub fn new(re: i128, im: i128) -> Self {
        GaussSum { re, im }
    }

    pub fn norm(&self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    pub fn mul(self, o: GaussSum) -> GaussSum {
        GaussSum { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    pub fn pow(self, k: u32) -> GaussSum {
        (0..k).fold(GaussSum::new(1, 0), |acc, _| acc.mul(self))
    }

    /// `i^k`.
    pub fn i_pow(k: i64) -> GaussSum {
        match k.rem_euclid(4) {
            0 => GaussSum::new(1, 0),
            1 => GaussSum::new(0, 1),
            2 => GaussSum::new(-1, 0),
            _ => GaussSum::new(0, -1),
        }
    }
}

/// `Σ_x i^{q(x)}` over all of `F₂ⁿ`, exactly.
pub fn gauss_sum(q: &Z4Form, bound: usize) -> Result<GaussSum> {
    let n = q.dim();
    if n > bound {
        return Err(Error::EnumerationBound { dim: n, bound });
    }
    let counts = value_counts(q);
    Ok(GaussSum::new(counts[0] as i128 - counts[2] as i128, counts[1] as i128 - counts[3] as i128))
}

/// Number of `x` with `q(x) = 0, 1, 2, 3`, by Gray-code walks over
/// independent blocks.
fn value_counts(q: &Z4Form) -> [u64; 4] {
    let n = q.dim();
    // Small forms are walked in one piece; the fan-out only pays off for
    // long walks.
    let split = n.saturating_sub(12).min(8);
    let block = n - split;
    let rows = q.space.matrix.rows();
    let basis_vals: Vec<u8> = (0..n).map(|k| q.diag[k].value()).collect();
    let walk = |chunk: u64| -> [u64; 4] {
        let mut counts = [0u64; 4];
        let start = chunk << block;
        let mut x = start ^ (start >> 1);
        let mut v = q.eval(x).value();
        counts[v as usize] += 1;
        for t in start + 1..start + (1u64 << block) {
            let k = t.trailing_zeros() as usize;
            v = (v + basis_vals[k] + 2 * parity(rows[k] & x)) & 3;
            x ^= 1 << k;
            counts[v as usize] += 1;
        }
        counts
    };
    if split == 0 {
        return walk(0);
    }
    (0..1u64 << split)
        .into_par_iter()
        .map(walk)
        .reduce(|| [0; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
}

/// Reads `σ` off `s = 2^{n/2} e^{iπσ/4}` without floating point.
pub fn sigma_from_gauss_sum(s: GaussSum, n: usize) -> Result<Z8> {
    let bad = || Error::InconsistentGaussSum { re: s.re, im: s.im, dim: n };
    if n > 120 {
        return Err(bad());
    }
    let (re, im) = (s.re, s.im);
    if n % 2 == 0 {
        let h = 1i128 << (n / 2);
        match (re, im) {
            (r, 0) if r == h => Ok(Z8(0)),
            (0, i) if i == h => Ok(Z8(2)),
            (r, 0) if r == -h => Ok(Z8(4)),
            (0, i) if i == -h => Ok(Z8(6)),
            _ => Err(bad()),
        }
    } else {
        let k = 1i128 << ((n - 1) / 2);
        if re.abs() != k || im.abs() != k {
            return Err(bad());
        }
        Ok(match (re > 0, im > 0) {
            (true, true) => Z8(1),
            (false, true) => Z8(3),
            (false, false) => Z8(5),
            (true, false) => Z8(7),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rows: &[&[u8]]) -> F2BilinearSpace {
        let n = rows.len();
        F2BilinearSpace::new(BitMatrix::from_fn(n, |i, j| rows[i][j] == 1)).unwrap()
    }

    fn z4(vals: &[i64]) -> Vec<Z4> {
        vals.iter().map(|&v| Z4::new(v)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let q = Z4Form::new(space(&[&[1, 0], &[0, 1]]), z4(&[1, 1])).unwrap();
        assert_eq!(q.evaluate(&[0, 0]).unwrap(), Z4::new(0));
        assert_eq!(q.evaluate(&[1, 1]).unwrap(), Z4::new(2));
        let h = Z4Form::new(space(&[&[0, 1], &[1, 0]]), z4(&[0, 0])).unwrap();
        assert_eq!(h.evaluate(&[1, 1]).unwrap(), Z4::new(2));
        assert!(matches!(h.evaluate(&[1]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn diagonal_must_match_parity() {
        let err = Z4Form::new(space(&[&[1]]), z4(&[2]));
        assert!(matches!(err, Err(Error::DiagonalParity { index: 0, value: 2 })));
        let degenerate = F2BilinearSpace::new(BitMatrix::from_rows(2, vec![0b11, 0b11]));
        assert!(matches!(degenerate, Err(Error::Degenerate)));
    }

    #[test]
    fn orthonormal_examples() {
        assert_eq!(orthonormal_basis(&space(&[&[1, 0], &[0, 1]])).unwrap(), vec![0b01, 0b10]);
        let s = space(&[&[1, 1], &[1, 0]]);
        let basis = orthonormal_basis(&s).unwrap();
        assert_eq!(basis.len(), 2);
        for (i, &u) in basis.iter().enumerate() {
            for (j, &v) in basis.iter().enumerate() {
                assert_eq!(s.b(u, v), (i == j) as u8);
            }
        }
        assert!(matches!(orthonormal_basis(&space(&[&[0, 1], &[1, 0]])), Err(Error::NoOrthonormalBasis)));
    }

    #[test]
    fn orthonormal_needs_repair_step() {
        // ⟨1⟩ ⊕ hyperbolic plane: the residual after the first vector is alternating.
        let s = space(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
        let basis = orthonormal_basis(&s).unwrap();
        assert_eq!(basis.len(), 3);
        for (i, &u) in basis.iter().enumerate() {
            for (j, &v) in basis.iter().enumerate() {
                assert_eq!(s.b(u, v), (i == j) as u8);
            }
        }
    }

    #[test]
    fn symplectic_f2_examples() {
        assert_eq!(symplectic_basis_f2(&space(&[&[0, 1], &[1, 0]])).unwrap(), vec![(0b01, 0b10)]);
        let s = space(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]);
        let pairs = symplectic_basis_f2(&s).unwrap();
        assert_eq!(pairs.len(), 2);
        for (j, &(a, b)) in pairs.iter().enumerate() {
            for (k, &(c, d)) in pairs.iter().enumerate() {
                assert_eq!(s.b(a, d), (j == k) as u8);
                assert_eq!(s.b(a, c), 0);
                assert_eq!(s.b(b, d), 0);
            }
        }
        assert!(matches!(symplectic_basis_f2(&space(&[&[1, 0], &[0, 1]])), Err(Error::NotAlternating)));
    }

    /// `#{x : q′(x) = 0} = 2^{n−1} + (−1)^{Arf} 2^{n/2−1}`.
    fn arf_by_counting(q: &F2Form) -> u8 {
        let n = q.dim();
        let zeros = (0..1u64 << n).filter(|&x| q.eval(x) == 0).count() as i64;
        let base = 1i64 << (n - 1);
        let dev = 1i64 << (n / 2 - 1);
        if zeros == base + dev {
            0
        } else {
            assert_eq!(zeros, base - dev);
            1
        }
    }

    #[test]
    fn arf_examples() {
        let h = space(&[&[0, 1], &[1, 0]]);
        let zero = F2Form::new(&h, 0).unwrap();
        assert_eq!(arf(&zero).unwrap(), 0);
        let one = F2Form::new(&h, 0b11).unwrap();
        assert_eq!(arf(&one).unwrap(), 1);
        assert_eq!(arf_by_counting(&one), 1);

        let hh = h.orthogonal_sum(&h).unwrap();
        let q = F2Form::new(&hh, 0b1111).unwrap();
        assert_eq!(arf(&q).unwrap(), 0);
        assert_eq!(arf_by_counting(&q), 0);
    }

    #[test]
    fn arf_agrees_with_counting_on_all_forms_in_dim_4() {
        for m in 0u64..1 << 6 {
            let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let mat = BitMatrix::from_fn(4, |i, j| {
                pairs.iter().enumerate().any(|(t, &(a, b))| bit(m, t) == 1 && ((a, b) == (i, j) || (b, a) == (i, j)))
            });
            let Ok(s) = F2BilinearSpace::new(mat) else { continue };
            for d in 0..16 {
                let q = F2Form::new(&s, d).unwrap();
                assert_eq!(arf(&q).unwrap(), arf_by_counting(&q));
            }
        }
    }

    #[test]
    fn brown_examples() {
        assert_eq!(brown(&Z4Form::new(space(&[&[1]]), z4(&[1])).unwrap()).unwrap(), Z8::new(1));
        assert_eq!(brown(&Z4Form::new(space(&[&[1]]), z4(&[3])).unwrap()).unwrap(), Z8::new(7));
        let h = space(&[&[0, 1], &[1, 0]]);
        assert_eq!(brown(&Z4Form::new(h.clone(), z4(&[0, 0])).unwrap()).unwrap(), Z8::new(0));
        assert_eq!(brown(&Z4Form::new(h, z4(&[2, 2])).unwrap()).unwrap(), Z8::new(4));
    }

    #[test]
    fn gauss_sum_examples() {
        let q = Z4Form::new(space(&[&[1]]), z4(&[1])).unwrap();
        assert_eq!(gauss_sum(&q, 20).unwrap(), GaussSum::new(1, 1));
        let q = Z4Form::new(space(&[&[1]]), z4(&[3])).unwrap();
        assert_eq!(gauss_sum(&q, 20).unwrap(), GaussSum::new(1, -1));
        let q = Z4Form::new(space(&[&[0, 1], &[1, 0]]), z4(&[0, 0])).unwrap();
        assert_eq!(gauss_sum(&q, 20).unwrap(), GaussSum::new(2, 0));
        assert!(matches!(gauss_sum(&q, 1), Err(Error::EnumerationBound { dim: 2, bound: 1 })));
    }

    #[test]
    fn sigma_from_sum_examples() {
        assert_eq!(sigma_from_gauss_sum(GaussSum::new(1, 1), 1).unwrap(), Z8::new(1));
        assert_eq!(sigma_from_gauss_sum(GaussSum::new(4, 0), 4).unwrap(), Z8::new(0));
        assert_eq!(sigma_from_gauss_sum(GaussSum::new(0, 4), 4).unwrap(), Z8::new(2));
        assert_eq!(sigma_from_gauss_sum(GaussSum::new(-2, 2), 3).unwrap(), Z8::new(3));
        assert!(matches!(sigma_from_gauss_sum(GaussSum::new(2, 0), 4), Err(Error::InconsistentGaussSum { .. })));
        assert!(sigma_from_gauss_sum(GaussSum::new(1, 1), 2).is_err());
    }

    #[test]
    fn gray_walk_matches_direct_count() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 12;
        let matrix = loop {
            let mut m = BitMatrix::zero(n);
            for i in 0..n {
                for j in i..n {
                    let v = rng.gen_bool(0.5);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            if m.is_invertible() {
                break m;
            }
        };
        let diag: Vec<Z4> = (0..n).map(|k| Z4::new(2 * rng.gen_range(0..2) + matrix.get(k, k) as i64)).collect();
        let q = Z4Form::new(F2BilinearSpace::new(matrix).unwrap(), diag).unwrap();
        let mut counts = [0u64; 4];
        for x in 0..1u64 << n {
            counts[q.eval(x).value() as usize] += 1;
        }
        assert_eq!(value_counts(&q), counts);
    }
}
