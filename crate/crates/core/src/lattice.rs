//! Gaussian lattices: integral lattices with an isometry `i` of square `-1`.
//!
//! A lattice is stored by its Gram matrix `S` and the matrix `J` of the
//! automorphism, both acting on integer column vectors in a fixed ℤ-basis.
//! The alternating form `E(x, y) = S(ix, y)` has matrix `Jᵀ S`.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zmat::{self, ZMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianLattice {
    label: String,
    gram: ZMatrix,
    aut: ZMatrix,
    skew: ZMatrix,
}

impl GaussianLattice {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Rank over ℤ, always `2g`.
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn g(&self) -> usize {
        self.rank() / 2
    }

    pub fn gram(&self) -> &ZMatrix {
        &self.gram
    }

    pub fn aut(&self) -> &ZMatrix {
        &self.aut
    }

    /// Matrix of `E = Jᵀ S`.
    pub fn skew_form(&self) -> &ZMatrix {
        &self.skew
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn s(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        zmat::bilinear(&self.gram, x, y)
    }

    pub fn e(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        zmat::bilinear(&self.skew, x, y)
    }

    pub fn apply_aut(&self, x: &[BigInt]) -> Vec<BigInt> {
        zmat::mul_vec(&self.aut, x)
    }
}

/// Validates `(gram, aut)` and builds the lattice.
pub fn make_lattice(gram: ZMatrix, aut: ZMatrix, label: impl Into<String>) -> Result<GaussianLattice> {
    let n = gram.len();
    if n == 0 || n % 2 != 0 {
        return Err(Error::DimensionMismatch(format!("rank must be even and positive, got {n}")));
    }
    if !zmat::is_square(&gram, n) {
        return Err(Error::DimensionMismatch("gram matrix is not square".into()));
    }
    if !zmat::is_square(&aut, n) {
        return Err(Error::DimensionMismatch(format!("automorphism must be {n}x{n} to match the gram matrix")));
    }
    check_symmetric_pd(&gram)?;
    if zmat::mul(&aut, &aut) != zmat::neg(&zmat::identity(n)) {
        return Err(Error::AutSquareNotMinusOne);
    }
    let skew = zmat::mul(&zmat::transpose(&aut), &gram);
    if zmat::mul(&skew, &aut) != gram {
        return Err(Error::AutNotIsometry);
    }
    debug_assert_eq!(zmat::transpose(&skew), zmat::neg(&skew));
    Ok(GaussianLattice { label: label.into(), gram, aut, skew })
}

fn check_symmetric_pd(gram: &ZMatrix) -> Result<()> {
    let n = gram.len();
    for i in 0..n {
        for j in i + 1..n {
            if gram[i][j] != gram[j][i] {
                return Err(Error::GramNotSymmetric { row: i, col: j });
            }
        }
    }
    for (k, d) in zmat::leading_minors(gram).into_iter().enumerate() {
        if !d.is_positive() {
            return Err(Error::GramNotPositiveDefinite { order: k + 1, minor: d });
        }
    }
    Ok(())
}

/// The lattice `Γ₂g = {x ∈ (½ℤ)^{2g} : x_j − x_k ∈ ℤ, Σ x_j ∈ 2ℤ}` with
/// `i e_{2j−1} = e_{2j}`, `i e_{2j} = −e_{2j−1}`.
///
/// Basis: the `D₂g` basis `e₁−e₂, …, e_{2g−1}−e_{2g}, e_{2g−1}+e_{2g}` with
/// `e₁−e₂` replaced by the glue vector `s = (½, …, ½)`, which is stored
/// last. In the `D₂g` root basis `s` has coefficient ½ on `e₁−e₂`, so the
/// exchange has determinant 1; exchanging `e_{2g−1}−e_{2g}` instead would
/// give index `(2g−2)/2` (3 for `E₈`).
pub fn gamma_2g(g: usize) -> Result<GaussianLattice> {
    if g == 0 || g % 2 != 0 {
        return Err(Error::Domain(format!("gamma_2g needs a positive even g, got {g}")));
    }
    let n = 2 * g;
    // Columns of the basis, in doubled ambient coordinates.
    let mut doubled: Vec<Vec<i64>> = Vec::with_capacity(n);
    for k in 1..n - 1 {
        let mut v = vec![0i64; n];
        v[k] = 2;
        v[k + 1] = -2;
        doubled.push(v);
    }
    let mut v = vec![0i64; n];
    v[n - 2] = 2;
    v[n - 1] = 2;
    doubled.push(v);
    doubled.push(vec![1i64; n]);

    let mut gram = zmat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let dot: i64 = doubled[i].iter().zip(&doubled[j]).map(|(a, b)| a * b).sum();
            debug_assert_eq!(dot % 4, 0);
            gram[i][j] = BigInt::from(dot / 4);
        }
    }

    // B has the basis vectors as columns (ambient coordinates, halved).
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let basis: Vec<Vec<BigRational>> =
        (0..n).map(|r| (0..n).map(|c| BigRational::from_integer(doubled[c][r].into()) * &half).collect()).collect();
    let mut ambient = vec![vec![BigRational::zero(); n]; n];
    for j in 0..g {
        ambient[2 * j + 1][2 * j] = BigRational::one();
        ambient[2 * j][2 * j + 1] = -BigRational::one();
    }
    let inv = zmat::inverse_q(&basis).ok_or_else(|| Error::Internal("Γ₂g basis is singular".into()))?;
    let aut_q = zmat::mul_q(&inv, &zmat::mul_q(&ambient, &basis));
    let aut = zmat::integral(&aut_q).ok_or(Error::AutNotIntegral)?;
    make_lattice(gram, aut, format!("gamma_{}", n))
}

/// `Γ₀ ⊗ ℤ[i]` in the interleaved basis `γ₁, iγ₁, γ₂, iγ₂, …`.
pub fn gaussify(gram0: &ZMatrix, label: impl Into<String>) -> Result<GaussianLattice> {
    let n = gram0.len();
    if n == 0 || !zmat::is_square(gram0, n) {
        return Err(Error::DimensionMismatch("gram0 must be a nonempty square matrix".into()));
    }
    check_symmetric_pd(gram0)?;
    let mut gram = zmat::zeros(2 * n, 2 * n);
    let mut aut = zmat::zeros(2 * n, 2 * n);
    for a in 0..n {
        for b in 0..n {
            gram[2 * a][2 * b] = gram0[a][b].clone();
            gram[2 * a + 1][2 * b + 1] = gram0[a][b].clone();
        }
        aut[2 * a + 1][2 * a] = BigInt::one();
        aut[2 * a][2 * a + 1] = -BigInt::one();
    }
    make_lattice(gram, aut, label)
}

/// `ℤ[i]^n`, i.e. `gaussify(I_n)`.
pub fn gauss_zn(n: usize) -> Result<GaussianLattice> {
    gaussify(&zmat::identity(n), format!("gauss_z{n}"))
}

/// `E₈ ⊗ ℤ[i]`.
pub fn gauss_e8() -> Result<GaussianLattice> {
    gaussify(&e8_gram(), "gauss_e8")
}

/// Cartan matrix of `E₈` (Bourbaki labelling).
pub fn e8_gram() -> ZMatrix {
    let mut m = vec![vec![0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in &[(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)] {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    zmat::from_i64(&m)
}

pub fn direct_sum(a: &GaussianLattice, b: &GaussianLattice) -> GaussianLattice {
    let gram = zmat::block_diag(&a.gram, &b.gram);
    let aut = zmat::block_diag(&a.aut, &b.aut);
    let skew = zmat::block_diag(&a.skew, &b.skew);
    GaussianLattice { label: format!("{}+{}", a.label, b.label), gram, aut, skew }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub unimodular: bool,
    pub even: bool,
    pub g: usize,
    #[serde(serialize_with = "ser_bigint")]
    pub det: BigInt,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub fn classify(lattice: &GaussianLattice) -> Classification {
    let det = zmat::det(&lattice.gram);
    let even = (0..lattice.rank()).all(|k| zmat::residue(&lattice.gram[k][k], 2) == 0);
    Classification { unimodular: det.is_one(), even, g: lattice.g(), det }
}

/// Rewrites the lattice in the basis given by the columns of `u`:
/// Gram `UᵀSU`, automorphism `U⁻¹JU`.
pub fn change_basis(lattice: &GaussianLattice, u: &ZMatrix, u_inv: &ZMatrix) -> Result<GaussianLattice> {
    let n = lattice.rank();
    if zmat::mul(u, u_inv) != zmat::identity(n) {
        return Err(Error::Domain("basis change is not invertible over ℤ".into()));
    }
    let gram = zmat::mul(&zmat::transpose(u), &zmat::mul(&lattice.gram, u));
    let aut = zmat::mul(u_inv, &zmat::mul(&lattice.aut, u));
    make_lattice(gram, aut, lattice.label.clone())
}

/// Random element of `GL(n, ℤ)` as a product of `steps` elementary
/// matrices with small coefficients; returns `(U, U⁻¹)`.
pub fn random_unimodular<R: Rng>(n: usize, steps: usize, rng: &mut R) -> (ZMatrix, ZMatrix) {
    let mut u = zmat::identity(n);
    let mut u_inv = zmat::identity(n);
    for _ in 0..steps {
        if n == 1 || rng.gen_bool(0.1) {
            // negate a basis vector
            let i = rng.gen_range(0..n);
            for row in u.iter_mut() {
                row[i] = -&row[i];
            }
            for x in u_inv[i].iter_mut() {
                *x = -&*x;
            }
            continue;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 } * rng.gen_range(1..=2));
        // U ← U·(I + c E_ij): column j += c·column i
        for row in u.iter_mut() {
            let t = &row[i] * &c;
            row[j] += t;
        }
        // U⁻¹ ← (I − c E_ij)·U⁻¹: row i −= c·row j
        let row_j = u_inv[j].clone();
        for (x, y) in u_inv[i].iter_mut().zip(&row_j) {
            *x -= y * &c;
        }
    }
    (u, u_inv)
}

/// On-disk lattice description (JSON).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeFile {
    pub label: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub aut: Vec<Vec<i64>>,
}

impl LatticeFile {
    pub fn into_lattice(self) -> Result<GaussianLattice> {
        if self.gram.len() != self.rank || self.aut.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "declared rank {} but gram has {} rows and aut has {}",
                self.rank,
                self.gram.len(),
                self.aut.len()
            )));
        }
        make_lattice(zmat::from_i64(&self.gram), zmat::from_i64(&self.aut), self.label)
    }

    pub fn from_lattice(lattice: &GaussianLattice) -> Result<Self> {
        let conv = |m: &ZMatrix| -> Result<Vec<Vec<i64>>> {
            m.iter()
                .map(|r| {
                    r.iter().map(|x| x.to_i64().ok_or_else(|| Error::Domain("entry exceeds i64".into()))).collect()
                })
                .collect()
        };
        Ok(LatticeFile {
            label: lattice.label.clone(),
            rank: lattice.rank(),
            gram: conv(&lattice.gram)?,
            aut: conv(&lattice.aut)?,
        })
    }
}

pub fn load_lattice(path: impl AsRef<Path>) -> Result<GaussianLattice> {
    let text = fs::read_to_string(path)?;
    let file: LatticeFile = serde_json::from_str(&text)?;
    file.into_lattice()
}

pub fn save_lattice(lattice: &GaussianLattice, path: impl AsRef<Path>) -> Result<()> {
    let file = LatticeFile::from_lattice(lattice)?;
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}
