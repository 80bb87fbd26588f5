//! The 2-torsion `A₂ = Γ/2Γ` of a unimodular Gaussian lattice and the
//! i-invariant quadratic forms on it.
//!
//! On `A₂` we have the Weil pairing `e = E mod 2`, the reduction `j̄` of the
//! automorphism, `ε = 1 + j̄` with `ε² = 0`, and the ℤ/4 form
//! `Q(x) = S(x, x) mod 4`. The i-invariant points `A_i = ker ε = im ε` form
//! a Lagrangian of dimension `g`.
//!
//! An i-invariant theta characteristic is a form `q′: A₂ → F₂` associated to
//! `e` with `q′(j̄x) = q′(x)`. These form an affine space over `A_i`, and
//! each one induces on `A_i` a symmetric form `b` and a ℤ/4 form `Q_q`:
//! `b(εα, εβ) = e(α, εβ)`, `Q_q(εα) = 2q′(α) − Q(α)`.

use crate::bits::{self, bit, BitMatrix, SubspaceCoords};
use crate::error::{Error, Result};
use crate::lattice::{classify, GaussianLattice};
use crate::quadratic::{brown, F2BilinearSpace, F2Form, Z4Form, Z4, Z8};
use crate::zmat;

#[derive(Clone, Debug)]
pub struct TwoTorsionSpace {
    g: usize,
    e: BitMatrix,
    jbar: BitMatrix,
    epsilon: BitMatrix,
    q: Z4Form,
    ai: SubspaceCoords,
    section: Vec<u64>,
}

impl TwoTorsionSpace {
    pub fn g(&self) -> usize {
        self.g
    }

    /// Dimension of `A₂`, i.e. `2g`.
    pub fn dim(&self) -> usize {
        2 * self.g
    }

    pub fn weil(&self) -> &BitMatrix {
        &self.e
    }

    pub fn jbar(&self) -> &BitMatrix {
        &self.jbar
    }

    pub fn epsilon(&self) -> &BitMatrix {
        &self.epsilon
    }

    /// `Q(x) = S(x, x) mod 4` on 0/1 lifts.
    pub fn q_form(&self) -> &Z4Form {
        &self.q
    }

    pub fn ai_basis(&self) -> &[u64] {
        self.ai.basis()
    }

    /// Chosen `ε`-preimages of the `A_i` basis vectors.
    pub fn section(&self) -> &[u64] {
        &self.section
    }

    /// Coordinates of `α ∈ A_i` in the `A_i` basis.
    pub fn ai_coords(&self, alpha: u64) -> Option<u64> {
        self.ai.coords(alpha)
    }

    pub fn ai_vector(&self, coords: u64) -> u64 {
        self.ai.vector(coords)
    }

    /// A preimage of `α ∈ A_i` under `ε`.
    pub fn preimage(&self, alpha: u64) -> Option<u64> {
        let c = self.ai.coords(alpha)?;
        let mut p = 0u64;
        for k in 0..self.g {
            if bit(c, k) == 1 {
                p ^= self.section[k];
            }
        }
        Some(p)
    }

    pub fn weil_pairing(&self, x: u64, y: u64) -> u8 {
        self.e.form(x, y)
    }
}

/// Reduces a unimodular lattice mod 2.
pub fn reduce(lattice: &GaussianLattice) -> Result<TwoTorsionSpace> {
    let class = classify(lattice);
    if !class.unimodular {
        return Err(Error::NotUnimodular(class.det));
    }
    let n = lattice.rank();
    bits::check_dim(n)?;
    let g = n / 2;
    let mod2 = |m: &zmat::ZMatrix| BitMatrix::from_fn(n, |i, j| zmat::residue(&m[i][j], 2) == 1);
    let e = mod2(lattice.skew_form());
    if !e.is_alternating() {
        return Err(Error::Internal("E mod 2 is not alternating".into()));
    }
    let jbar = mod2(lattice.aut());
    let epsilon = BitMatrix::identity(n).add(&jbar);
    if !epsilon.mul(&epsilon).is_zero() {
        return Err(Error::Internal("ε² ≠ 0".into()));
    }

    // A_i basis from independent columns ε·e_j; e_j is then the preimage.
    let mut basis = Vec::new();
    let mut section = Vec::new();
    for j in 0..n {
        let col = epsilon.column(j);
        let mut candidate = basis.clone();
        candidate.push(col);
        if bits::row_basis(&candidate).len() == candidate.len() {
            basis.push(col);
            section.push(1u64 << j);
        }
    }
    if basis.len() != g {
        return Err(Error::Internal(format!("image of ε has dimension {} ≠ g = {g}", basis.len())));
    }
    let ai = SubspaceCoords::new(&basis)?;
    let kernel = epsilon.kernel();
    if kernel.len() != g || kernel.iter().any(|&k| ai.coords(k).is_none()) {
        return Err(Error::Internal("ker ε ≠ im ε".into()));
    }
    for &u in &basis {
        for &v in &basis {
            if e.form(u, v) != 0 {
                return Err(Error::Internal("A_i is not isotropic for e".into()));
            }
        }
    }

    let s2 = mod2(lattice.gram());
    if s2 != e.mul(&jbar) {
        return Err(Error::Internal("S mod 2 differs from e(·, j̄·)".into()));
    }
    let diag = (0..n).map(|k| Z4::new(zmat::residue(&lattice.gram()[k][k], 4) as i64)).collect();
    let q = Z4Form::new(F2BilinearSpace::new(s2)?, diag)?;
    Ok(TwoTorsionSpace { g, e, jbar, epsilon, q, ai, section })
}

/// An i-invariant form `q′` associated to the Weil pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantThetaForm {
    form: F2Form,
}

impl InvariantThetaForm {
    pub fn form(&self) -> &F2Form {
        &self.form
    }

    pub fn eval(&self, x: u64) -> u8 {
        self.form.eval(x)
    }

    /// `(α + q′)(x) = q′(x) + e(α, x)`; stays i-invariant for `α ∈ A_i`.
    pub fn translate(&self, alpha: u64) -> InvariantThetaForm {
        InvariantThetaForm { form: self.form.translate(alpha) }
    }

    /// Wraps an arbitrary form after checking both invariants.
    pub fn new(t: &TwoTorsionSpace, form: F2Form) -> Result<Self> {
        if form.matrix() != &t.e {
            return Err(Error::Domain("form is not associated to the Weil pairing".into()));
        }
        let f = InvariantThetaForm { form };
        if !is_invariant(t, &f.form) {
            return Err(Error::Domain("form is not i-invariant".into()));
        }
        Ok(f)
    }
}

/// `d(x) = q′(j̄x) − q′(x)` is linear, so checking the basis suffices.
fn is_invariant(t: &TwoTorsionSpace, q: &F2Form) -> bool {
    (0..t.dim()).all(|k| q.eval(t.jbar.column(k)) == bit(q.diag(), k))
}

/// One i-invariant form, by solving `(j̄ᵀ + 1)·d = c` for the basis values
/// `d`, where `c_k` is the cross term of `q′` at `j̄ e_k`.
pub fn base_invariant_form(t: &TwoTorsionSpace) -> Result<InvariantThetaForm> {
    let n = t.dim();
    let pure = F2Form::from_matrix(t.e.clone(), 0)?;
    let rhs = (0..n).fold(0u64, |acc, k| acc | ((pure.eval(t.jbar.column(k)) as u64) << k));
    let system = t.epsilon.transpose();
    let diag = system.solve(rhs).ok_or_else(|| Error::Internal("invariant form must exist".into()))?;
    let form = F2Form::from_matrix(t.e.clone(), diag)?;
    if !is_invariant(t, &form) {
        return Err(Error::Internal("solved form is not i-invariant".into()));
    }
    Ok(InvariantThetaForm { form })
}

/// The form with translation coordinates `index` relative to `base`.
pub fn form_at(t: &TwoTorsionSpace, base: &InvariantThetaForm, index: u64) -> InvariantThetaForm {
    base.translate(t.ai_vector(index))
}

/// All `2^g` invariant forms, in lexicographic order of translation
/// coordinates relative to the base form.
pub fn enumerate_invariant_forms(t: &TwoTorsionSpace) -> Result<Vec<InvariantThetaForm>> {
    if t.g >= 32 {
        return Err(Error::EnumerationBound { dim: t.g, bound: 31 });
    }
    let base = base_invariant_form(t)?;
    Ok((0..1u64 << t.g).map(|c| form_at(t, &base, c)).collect())
}

/// `(b, Q_q)` on `A_i`, in the coordinates of the `A_i` basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedStructure {
    pub qq: Z4Form,
}

impl InducedStructure {
    pub fn b(&self) -> &F2BilinearSpace {
        self.qq.space()
    }

    /// `Q_q` at a point given by `A_i` coordinates.
    pub fn qq_at(&self, coords: u64) -> Z4 {
        self.qq.eval(coords)
    }
}

fn induced_value(t: &TwoTorsionSpace, q: &InvariantThetaForm, preimage: u64) -> Z4 {
    Z4::new(2 * q.eval(preimage) as i64) - t.q.eval(preimage)
}

pub fn induce(t: &TwoTorsionSpace, q: &InvariantThetaForm) -> Result<InducedStructure> {
    let g = t.g;
    let basis = t.ai.basis();
    let mut b = BitMatrix::zero(g);
    let mut diag = Vec::with_capacity(g);
    for j in 0..g {
        let p = t.section[j];
        // a second preimage of the same point: p + u for u ∈ ker ε
        let p_alt = p ^ basis[(j + 1) % g];
        for (k, &u) in basis.iter().enumerate() {
            let v = t.e.form(p, u);
            if t.e.form(p_alt, u) != v {
                return Err(Error::Internal(format!("b not well defined at ({j},{k})")));
            }
            b.set(j, k, v == 1);
        }
        let value = induced_value(t, q, p);
        if induced_value(t, q, p_alt) != value {
            return Err(Error::Internal(format!("Q_q depends on the preimage of basis vector {j}")));
        }
        diag.push(value);
    }
    let space = F2BilinearSpace::new(b).map_err(|e| Error::Internal(format!("induced form b: {e}")))?;
    let qq = Z4Form::new(space, diag).map_err(|e| Error::Internal(format!("induced form Q_q: {e}")))?;
    Ok(InducedStructure { qq })
}

/// `m` with `2m ≡ σ + g − 2Q_q(α) (mod 8)`, from a precomputed `σ(Q_q)`.
pub fn multiplicity_from(sigma: Z8, g: usize, qq_alpha: Z4) -> Result<Z4> {
    let rhs = sigma.value() as i64 + g as i64 - 2 * qq_alpha.value() as i64;
    let rhs = rhs.rem_euclid(8);
    if rhs % 2 != 0 {
        return Err(Error::Internal(format!("σ = {sigma} has the wrong parity for g = {g}")));
    }
    Ok(Z4::new(rhs / 2))
}

/// Multiplicity mod 4 of `Θ_q` at `α ∈ A_i` (a vector of `A₂`).
pub fn multiplicity_mod4(t: &TwoTorsionSpace, q: &InvariantThetaForm, alpha: u64) -> Result<Z4> {
    let coords = t.ai_coords(alpha).ok_or(Error::NotInvariantPoint)?;
    let induced = induce(t, q)?;
    let sigma = brown(&induced.qq)?;
    multiplicity_from(sigma, t.g, induced.qq_at(coords))
}
