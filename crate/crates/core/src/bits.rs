//! Dense linear algebra over F₂ with vectors packed into a `u64`.
//!
//! Bit `k` of a vector is its `k`-th coordinate. A matrix stores one word
//! per row, so `M·x` is one popcount parity per row. Dimensions are capped
//! at 64, which covers lattices of rank up to 64.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;

#[inline]
pub fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
pub fn bit(x: u64, k: usize) -> u8 {
    ((x >> k) & 1) as u8
}

#[inline]
pub fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn to_bits(x: u64, n: usize) -> Vec<u8> {
    (0..n).map(|k| bit(x, k)).collect()
}

pub fn from_bits(bits: &[u8]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | (((b & 1) as u64) << k))
}

pub fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        Err(Error::DimensionTooLarge { dim: n, max: MAX_DIM })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM);
        BitMatrix { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for k in 0..n {
            m.rows[k] = 1 << k;
        }
        m
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert!(n <= MAX_DIM && rows.len() == n);
        let msk = mask(n);
        BitMatrix { n, rows: rows.into_iter().map(|r| r & msk).collect() }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let rows = (0..n).map(|i| (0..n).filter(|&j| f(i, j)).fold(0u64, |acc, j| acc | (1 << j))).collect();
        Self::from_rows(n, rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        bit(self.rows[i], j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn column(&self, j: usize) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | ((bit(r, j) as u64) << i))
    }

    pub fn mul_vec(&self, x: u64) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | ((parity(r & x) as u64) << i))
    }

    /// `xᵀ M y`.
    #[inline]
    pub fn form(&self, x: u64, y: u64) -> u8 {
        let mut acc = 0u64;
        let mut rest = x;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc ^= self.rows[i] & y;
            rest &= rest - 1;
        }
        parity(acc)
    }

    pub fn transpose(&self) -> Self {
        Self::from_rows(self.n, (0..self.n).map(|j| self.column(j)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let t = other.transpose();
        Self::from_fn(self.n, |i, j| parity(self.rows[i] & t.rows[j]) == 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_rows(self.n, self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_alternating(&self) -> bool {
        self.is_symmetric() && (0..self.n).all(|i| self.get(i, i) == 0)
    }

    /// The diagonal as a vector; for a symmetric form this is the linear
    /// functional `x ↦ b(x, x)`.
    pub fn diagonal(&self) -> u64 {
        (0..self.n).fold(0, |acc, i| acc | ((self.get(i, i) as u64) << i))
    }

    pub fn rank(&self) -> usize {
        row_basis(&self.rows).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Column space `{M x}`, as a list of independent vectors.
    pub fn image(&self) -> Vec<u64> {
        row_basis(&self.transpose().rows)
    }

    /// Basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<u64> {
        let sys = Echelon::new(self);
        sys.kernel()
    }

    /// One solution of `M x = rhs`, if any.
    pub fn solve(&self, rhs: u64) -> Option<u64> {
        Echelon::new(self).solve(rhs)
    }
}

/// Independent subset spanning the same space as `vectors`, in reduced form.
pub fn row_basis(vectors: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let r = reduce(&basis, v);
        if r != 0 {
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Reduces `v` against a basis sorted by decreasing leading bit.
fn reduce(basis: &[u64], mut v: u64) -> u64 {
    for &b in basis {
        let lead = 63 - b.leading_zeros();
        if (v >> lead) & 1 == 1 {
            v ^= b;
        }
    }
    v
}

/// Coordinates of vectors in a fixed basis of a subspace.
#[derive(Clone, Debug)]
pub struct SubspaceCoords {
    basis: Vec<u64>,
    // reduced rows with their combination of original basis vectors
    reduced: Vec<(u64, u64)>,
}

impl SubspaceCoords {
    /// `basis` must be linearly independent.
    pub fn new(basis: &[u64]) -> Result<Self> {
        let mut reduced: Vec<(u64, u64)> = Vec::new();
        for (k, &v) in basis.iter().enumerate() {
            let mut r = v;
            let mut combo = 1u64 << k;
            for &(b, c) in &reduced {
                let lead = 63 - b.leading_zeros();
                if (r >> lead) & 1 == 1 {
                    r ^= b;
                    combo ^= c;
                }
            }
            if r == 0 {
                return Err(Error::Internal("subspace basis is dependent".into()));
            }
            reduced.push((r, combo));
            reduced.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        }
        Ok(SubspaceCoords { basis: basis.to_vec(), reduced })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// Coordinates of `v`, or `None` when `v` is outside the subspace.
    pub fn coords(&self, v: u64) -> Option<u64> {
        let mut r = v;
        let mut combo = 0u64;
        for &(b, c) in &self.reduced {
            let lead = 63 - b.leading_zeros();
            if (r >> lead) & 1 == 1 {
                r ^= b;
                combo ^= c;
            }
        }
        (r == 0).then_some(combo)
    }

    pub fn vector(&self, coords: u64) -> u64 {
        let mut v = 0;
        let mut rest = coords;
        while rest != 0 {
            let k = rest.trailing_zeros() as usize;
            v ^= self.basis[k];
            rest &= rest - 1;
        }
        v
    }
}

/// Reduced row echelon form of `M`, remembering which combination of the
/// original rows produced each pivot row.
struct Echelon<'a> {
    m: &'a BitMatrix,
    // (reduced row, pivot column, combination of original rows)
    pivots: Vec<(u64, usize, u64)>,
    free: Vec<usize>,
}

impl<'a> Echelon<'a> {
    fn new(m: &'a BitMatrix) -> Self {
        let n = m.n;
        let mut rows: Vec<(u64, u64)> = m.rows.iter().enumerate().map(|(i, &r)| (r, 1u64 << i)).collect();
        let mut pivots: Vec<(u64, usize, u64)> = Vec::new();
        let mut pivot_cols = 0u64;
        for col in 0..n {
            let Some(p) = rows.iter().position(|&(r, _)| bit(r, col) == 1) else {
                continue;
            };
            let (pr, pc) = rows.swap_remove(p);
            for (r, c) in rows.iter_mut() {
                if bit(*r, col) == 1 {
                    *r ^= pr;
                    *c ^= pc;
                }
            }
            for (r, _, c) in pivots.iter_mut() {
                if bit(*r, col) == 1 {
                    *r ^= pr;
                    *c ^= pc;
                }
            }
            pivots.push((pr, col, pc));
            pivot_cols |= 1 << col;
        }
        let free = (0..n).filter(|&c| bit(pivot_cols, c) == 0).collect();
        Echelon { m, pivots, free }
    }

    /// Free variables are set to zero; each pivot row `Σ c_i M_i` then
    /// fixes its pivot variable to `Σ c_i rhs_i`.
    fn solve(&self, rhs: u64) -> Option<u64> {
        let mut x = 0u64;
        for &(_, col, combo) in &self.pivots {
            if parity(combo & rhs) == 1 {
                x |= 1 << col;
            }
        }
        (self.m.mul_vec(x) == rhs & mask(self.m.n)).then_some(x)
    }

    fn kernel(&self) -> Vec<u64> {
        self.free
            .iter()
            .map(|&f| {
                let mut v = 1u64 << f;
                for &(r, col, _) in &self.pivots {
                    if bit(r, f) == 1 {
                        v |= 1 << col;
                    }
                }
                v
            })
            .collect()
    }
}
