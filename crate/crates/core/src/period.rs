//! Period matrix of `A_Γ = Γ_ℝ / Γ` in an integral symplectic basis.
//!
//! Complex coordinates come from the frame `(λ₁ … λ_g, Jλ₁ … Jλ_g)`:
//! `v = Σ u_j λ_j + Σ w_j Jλ_j ↦ z = u + i·w`, which is ℂ-linear for the
//! complex structure `J`. Then `z(λ_j) = e_j` and `τ` has columns `z(μ_k)`.
//! The entries of `τ` are rational and are computed exactly.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::GaussianLattice;
use crate::symplectic::{symplectic_basis, SymplecticBasisZ};
use crate::zmat::{self, QMatrix};

#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    tau: Vec<Vec<Complex64>>,
    im_exact: QMatrix,
    y_min: f64,
}

impl PeriodMatrix {
    pub fn g(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self) -> &[Vec<Complex64>] {
        &self.tau
    }

    /// Certified lower bound on the smallest eigenvalue of `Im τ`.
    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn im_exact(&self) -> &QMatrix {
        &self.im_exact
    }

    /// Builds a period matrix from a symmetric `τ` given in floating point.
    pub fn from_tau(tau: Vec<Vec<Complex64>>) -> Result<Self> {
        let g = tau.len();
        let mut im = vec![vec![BigRational::zero(); g]; g];
        let scale = tau.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for j in 0..g {
            if tau[j].len() != g {
                return Err(Error::PeriodMatrix("τ is not square".into()));
            }
            for k in 0..g {
                if (tau[j][k] - tau[k][j]).norm() > 1e-12 * scale {
                    return Err(Error::PeriodMatrix("τ is not symmetric".into()));
                }
                im[j][k] = BigRational::from_float(0.5 * (tau[j][k].im + tau[k][j].im))
                    .ok_or_else(|| Error::PeriodMatrix("non-finite entry".into()))?;
            }
        }
        let y_min = certified_min_eigenvalue(&im)?;
        Ok(PeriodMatrix { tau, im_exact: im, y_min })
    }
}

/// Lower bound `y` on `λ_min(Y)` such that `Y − y·I` is positive definite,
/// checked in exact rational arithmetic.
fn certified_min_eigenvalue(y: &QMatrix) -> Result<f64> {
    let g = y.len();
    let approx = DMatrix::from_fn(g, g, |i, j| y[i][j].to_f64().unwrap_or(f64::NAN));
    let est = approx.symmetric_eigen().eigenvalues.min();
    if !(est > 0.0) {
        return Err(Error::PeriodMatrix("Im τ is not positive definite".into()));
    }
    let mut candidate = est * (1.0 - 1e-9);
    for _ in 0..64 {
        let c = BigRational::from_float(candidate).expect("finite");
        let mut shifted = y.clone();
        for (k, row) in shifted.iter_mut().enumerate() {
            row[k] -= &c;
        }
        if zmat::is_positive_definite_q(&shifted) {
            return Ok(candidate);
        }
        candidate *= 0.5;
    }
    Err(Error::PeriodMatrix("could not certify a positive eigenvalue bound for Im τ".into()))
}

/// Real-coordinate frame `(λ, Jλ)` with its inverse, for moving between
/// lattice coordinates and complex coordinates.
#[derive(Clone, Debug)]
pub struct Frame {
    g: usize,
    forward: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl Frame {
    pub fn new(lattice: &GaussianLattice, basis: &SymplecticBasisZ) -> Result<Self> {
        let (m, inv) = frame_matrices(lattice, basis)?;
        let n = m.len();
        let to_f = |q: &QMatrix| DMatrix::from_fn(n, n, |i, j| q[i][j].to_f64().unwrap_or(f64::NAN));
        Ok(Frame { g: basis.g(), forward: to_f(&m), inverse: to_f(&inv) })
    }

    /// Lattice coordinates of the point with complex coordinates `z`.
    pub fn to_real(&self, z: &[Complex64]) -> Vec<f64> {
        let c: Vec<f64> = z.iter().map(|x| x.re).chain(z.iter().map(|x| x.im)).collect();
        (&self.forward * nalgebra::DVector::from_vec(c)).iter().copied().collect()
    }

    pub fn to_complex(&self, v: &[f64]) -> Vec<Complex64> {
        let c = &self.inverse * nalgebra::DVector::from_column_slice(v);
        (0..self.g).map(|j| Complex64::new(c[j], c[self.g + j])).collect()
    }
}

/// `M = (λ₁ … λ_g Jλ₁ … Jλ_g)` as an integer matrix.
fn frame_z(lattice: &GaussianLattice, basis: &SymplecticBasisZ) -> zmat::ZMatrix {
    let n = 2 * basis.g();
    let cols: Vec<Vec<BigInt>> =
        basis.lambda.iter().cloned().chain(basis.lambda.iter().map(|l| lattice.apply_aut(l))).collect();
    (0..n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

/// `(M, M⁻¹)` for the frame `M` of [`frame_z`].
fn frame_matrices(lattice: &GaussianLattice, basis: &SymplecticBasisZ) -> Result<(QMatrix, QMatrix)> {
    let mq = zmat::to_rational(&frame_z(lattice, basis));
    // (λ, Jλ) is always independent: if Jv ∈ span(λ) then E(v, Jv) = S(Jv, Jv)
    // vanishes on the Lagrangian span(λ), forcing v = 0.
    let inv = zmat::inverse_q(&mq).ok_or_else(|| Error::PeriodMatrix("frame (λ, Jλ) is degenerate".into()))?;
    Ok((mq, inv))
}

/// Exact period matrix of `basis`: the coordinates of `μ_k` in the frame
/// `(λ, Jλ)` give `Re τ` and `Im τ`.
pub fn period_matrix(lattice: &GaussianLattice, basis: &SymplecticBasisZ) -> Result<PeriodMatrix> {
    let g = basis.g();
    let n = 2 * g;
    let m = frame_z(lattice, basis);
    let mu: zmat::ZMatrix = (0..n).map(|r| basis.mu.iter().map(|c| c[r].clone()).collect()).collect();
    let (num, d) = zmat::solve_z(&m, &mu).ok_or_else(|| Error::PeriodMatrix("frame (λ, Jλ) is degenerate".into()))?;
    let coeffs: QMatrix =
        num.into_iter().map(|r| r.into_iter().map(|x| BigRational::new(x, d.clone())).collect()).collect();
    let re: QMatrix = coeffs[..g].to_vec();
    let im: QMatrix = coeffs[g..].to_vec();
    for j in 0..g {
        for k in 0..g {
            if re[j][k] != re[k][j] || im[j][k] != im[k][j] {
                return Err(Error::PeriodMatrix(format!("τ is not symmetric at ({j},{k})")));
            }
        }
    }
    let y_min = certified_min_eigenvalue(&im)?;
    let tau = (0..g)
        .map(|j| {
            (0..g)
                .map(|k| Complex64::new(re[j][k].to_f64().unwrap_or(f64::NAN), im[j][k].to_f64().unwrap_or(f64::NAN)))
                .collect()
        })
        .collect();
    Ok(PeriodMatrix { tau, im_exact: im, y_min })
}

/// The symplectic basis used for theta evaluation: the integral basis from
/// [`symplectic_basis`] after [`reduce_basis`].
pub fn theta_basis(lattice: &GaussianLattice) -> Result<SymplecticBasisZ> {
    reduce_basis(lattice, &symplectic_basis(lattice)?)
}

/// Siegel reduction carried out on the lattice basis. Repeats: LLL-reduce
/// `Im τ` inside the Lagrangian (`μ′ = μV`, `λ′ = λV⁻ᵀ`, so `τ′ = VᵀτV`);
/// shift `μ′ = μ − λB` with `B = round(Re τ)`; if `|τ₁₁| < 1`, replace
/// `(λ₁, μ₁)` by `(−μ₁, λ₁)`. Each step is a symplectic change of basis, so
/// the lattice, its polarization and its forms are untouched; only the
/// theta series converges faster.
pub fn reduce_basis(lattice: &GaussianLattice, basis: &SymplecticBasisZ) -> Result<SymplecticBasisZ> {
    let g = basis.g();
    let mut current = basis.clone();
    // τ is computed exactly once per round; the LLL and shift updates only
    // pick integer matrices, so tracking τ′ = VᵀτV − B in floating point is
    // enough to choose them.
    for _ in 0..64 {
        let tau = period_matrix(lattice, &current)?;
        let v = lll(&to_f64(tau.im_exact()));
        let vz: zmat::ZMatrix = v.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let v_inv = zmat::inverse_q(&zmat::to_rational(&vz))
            .and_then(|m| zmat::integral(&m))
            .ok_or_else(|| Error::Internal("reduction matrix is not unimodular".into()))?;
        current = SymplecticBasisZ {
            lambda: combine(&current.lambda, |j, k| v_inv[k][j].clone()),
            mu: combine(&current.mu, |j, k| vz[j][k].clone()),
        };
        let t = tau.tau();
        let moved: Vec<Vec<Complex64>> = (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| {
                        let mut s = Complex64::new(0.0, 0.0);
                        for i in 0..g {
                            for j in 0..g {
                                s += t[i][j] * (v[i][a] * v[j][b]) as f64;
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        // B must be symmetric for μ − λB to stay Lagrangian.
        let shift: Vec<Vec<BigInt>> = (0..g)
            .map(|j| {
                (0..g).map(|k| BigInt::from_f64(moved[j.min(k)][j.max(k)].re.round()).unwrap_or_default()).collect()
            })
            .collect();
        let lam_shift = combine(&current.lambda, |j, k| shift[j][k].clone());
        for (m, s) in current.mu.iter_mut().zip(&lam_shift) {
            for (x, y) in m.iter_mut().zip(s) {
                *x -= y;
            }
        }
        let t11 = moved[0][0] - moved[0][0].re.round();
        if t11.norm() >= 1.0 - 1e-9 {
            break;
        }
        let l0 = current.lambda[0].clone();
        current.lambda[0] = current.mu[0].iter().map(|x| -x).collect();
        current.mu[0] = l0;
    }
    current.validate(lattice)?;
    Ok(current)
}

fn to_f64(m: &QMatrix) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

/// `Σ_j coeff(j, k)·vectors[j]` for each `k`.
fn combine(vectors: &[Vec<BigInt>], coeff: impl Fn(usize, usize) -> BigInt) -> Vec<Vec<BigInt>> {
    let n = vectors[0].len();
    (0..vectors.len())
        .map(|k| {
            let mut out = vec![BigInt::zero(); n];
            for (j, vec) in vectors.iter().enumerate() {
                let c = coeff(j, k);
                if !c.is_zero() {
                    for (o, x) in out.iter_mut().zip(vec) {
                        *o += &c * x;
                    }
                }
            }
            out
        })
        .collect()
}

/// Gram–Schmidt data `(μ, |b*|²)` from a Gram matrix.
fn gram_schmidt(gram: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let g = gram.len();
    let mut mu = vec![vec![0.0; g]; g];
    let mut b = vec![0.0; g];
    for i in 0..g {
        for j in 0..i {
            let mut t = gram[i][j];
            for l in 0..j {
                t -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = t / b[j];
        }
        b[i] = gram[i][i] - (0..i).map(|j| mu[i][j] * mu[i][j] * b[j]).sum::<f64>();
    }
    (mu, b)
}

/// LLL (δ = 0.99) for the quadratic form `y`; returns the unimodular `V`
/// whose columns are the reduced basis.
fn lll(y: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let g = y.len();
    let mut v: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| (i == j) as i64).collect()).collect();
    let gram = |v: &Vec<Vec<i64>>| -> Vec<Vec<f64>> {
        (0..g)
            .map(|a| {
                (0..g)
                    .map(|b| {
                        let mut t = 0.0;
                        for i in 0..g {
                            for j in 0..g {
                                t += v[i][a] as f64 * y[i][j] * v[j][b] as f64;
                            }
                        }
                        t
                    })
                    .collect()
            })
            .collect()
    };
    let mut k = 1;
    let mut steps = 0;
    while k < g && steps < 10_000 {
        steps += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&gram(&v));
            let r = mu[k][j].round() as i64;
            if r != 0 {
                for row in v.iter_mut() {
                    row[k] -= r * row[j];
                }
            }
        }
        let (mu, b) = gram_schmidt(&gram(&v));
        if b[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            for row in v.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
    v
}
