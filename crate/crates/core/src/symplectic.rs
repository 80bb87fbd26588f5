//! Integral symplectic bases for the alternating form `E`.
//!
//! The skew normal form is computed by integer column operations on a
//! working basis: pick the pair with the smallest nonzero `|E|`, clear
//! everything it pairs with by Euclidean steps (restarting whenever a
//! smaller remainder shows up), split off the hyperbolic plane, recurse.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::GaussianLattice;
use crate::zmat::{self, ZMatrix};

/// `λ₁…λ_g, μ₁…μ_g` in lattice coordinates with `E(λ_j, μ_k) = δ_jk` and
/// `E(λ_j, λ_k) = E(μ_j, μ_k) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticBasisZ {
    pub lambda: Vec<Vec<BigInt>>,
    pub mu: Vec<Vec<BigInt>>,
}

impl SymplecticBasisZ {
    pub fn g(&self) -> usize {
        self.lambda.len()
    }

    /// The basis as matrix columns `(λ₁ … λ_g μ₁ … μ_g)`.
    pub fn matrix(&self) -> ZMatrix {
        let cols: Vec<&Vec<BigInt>> = self.lambda.iter().chain(&self.mu).collect();
        let n = cols.len();
        (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
    }

    /// Checks the pairing table and that the vectors form a ℤ-basis.
    pub fn validate(&self, lattice: &GaussianLattice) -> Result<()> {
        let g = self.g();
        if self.mu.len() != g || 2 * g != lattice.rank() {
            return Err(Error::DimensionMismatch("symplectic basis has the wrong size".into()));
        }
        for j in 0..g {
            for k in 0..g {
                let delta = if j == k { BigInt::one() } else { BigInt::zero() };
                if !lattice.e(&self.lambda[j], &self.lambda[k]).is_zero()
                    || !lattice.e(&self.mu[j], &self.mu[k]).is_zero()
                    || lattice.e(&self.lambda[j], &self.mu[k]) != delta
                {
                    return Err(Error::Internal(format!("symplectic pairing fails at ({j},{k})")));
                }
            }
        }
        if !zmat::det(&self.matrix()).abs().is_one() {
            return Err(Error::Internal("symplectic vectors are not a ℤ-basis".into()));
        }
        Ok(())
    }
}

/// Computes an integral symplectic basis of `E`. Fails with the first
/// elementary divisor different from 1 when the lattice is not unimodular.
pub fn symplectic_basis(lattice: &GaussianLattice) -> Result<SymplecticBasisZ> {
    let n = lattice.rank();
    let e = lattice.skew_form();
    let mut rest: Vec<Vec<BigInt>> = zmat::identity(n);
    let mut lambda = Vec::new();
    let mut mu = Vec::new();

    while !rest.is_empty() {
        // Pairing table of the working vectors.
        let m = rest.len();
        let mut pivot: Option<(usize, usize, BigInt)> = None;
        for a in 0..m {
            for b in a + 1..m {
                let v = zmat::bilinear(e, &rest[a], &rest[b]);
                if !v.is_zero() && pivot.as_ref().map_or(true, |(_, _, p)| v.abs() < p.abs()) {
                    pivot = Some((a, b, v));
                }
            }
        }
        let Some((a, b, _)) = pivot else {
            return Err(Error::NotUnimodular(BigInt::zero()));
        };
        let mut x = rest[a].clone();
        let mut y = rest[b].clone();
        let mut others: Vec<Vec<BigInt>> =
            rest.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, v)| v.clone()).collect();

        'reduce: loop {
            let mut d = zmat::bilinear(e, &x, &y);
            if d.is_negative() {
                negate(&mut y);
                d = -d;
            }
            for w in others.iter_mut() {
                let ex = zmat::bilinear(e, &x, w);
                let ey = zmat::bilinear(e, &y, w);
                let (qx, rx) = ex.div_mod_floor(&d);
                let (qy, ry) = ey.div_mod_floor(&d);
                // E(x, w − qx·y) = ex − qx·d,  E(y, w + qy·x) = ey − qy·d
                axpy(w, &-&qx, &y);
                axpy(w, &qy, &x);
                if !rx.is_zero() {
                    // E(x, w) = rx with 0 < rx < d: w becomes the new partner of x.
                    std::mem::swap(w, &mut y);
                    continue 'reduce;
                }
                if !ry.is_zero() {
                    // E(y, w) = ry: pair y with w, x goes back to the pool.
                    std::mem::swap(&mut x, &mut y);
                    std::mem::swap(w, &mut y);
                    continue 'reduce;
                }
            }
            if !d.is_one() {
                return Err(Error::NotUnimodular(d));
            }
            break;
        }
        lambda.push(x);
        mu.push(y);
        rest = others;
    }
    let basis = SymplecticBasisZ { lambda, mu };
    basis.validate(lattice)?;
    Ok(basis)
}

/// Applies the symplectic transvection `T_v(x) = x + E(x, v)·v` to every
/// basis vector. The result is again an integral symplectic basis.
pub fn transvect(lattice: &GaussianLattice, basis: &SymplecticBasisZ, v: &[BigInt]) -> SymplecticBasisZ {
    let t = |x: &Vec<BigInt>| {
        let c = lattice.e(x, v);
        let mut out = x.clone();
        axpy(&mut out, &c, v);
        out
    };
    SymplecticBasisZ { lambda: basis.lambda.iter().map(t).collect(), mu: basis.mu.iter().map(t).collect() }
}

/// A few random transvections with small vectors.
pub fn random_symplectic_change<R: Rng>(
    lattice: &GaussianLattice,
    basis: &SymplecticBasisZ,
    steps: usize,
    rng: &mut R,
) -> SymplecticBasisZ {
    let n = lattice.rank();
    let mut out = basis.clone();
    for _ in 0..steps {
        let mut v = vec![BigInt::zero(); n];
        let i = rng.gen_range(0..n);
        v[i] = BigInt::one();
        if rng.gen_bool(0.5) {
            let j = rng.gen_range(0..n);
            v[j] += BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        out = transvect(lattice, &out, &v);
    }
    out
}

fn negate(v: &mut [BigInt]) {
    for x in v.iter_mut() {
        *x = -&*x;
    }
}

fn axpy(w: &mut [BigInt], c: &BigInt, v: &[BigInt]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in w.iter_mut().zip(v) {
        *a += c * b;
    }
}
