//! Exact identities between the pieces: the Gauss-sum trace identity, the
//! ι-ratio exponent, syzygy and parity, and the multiplier `e_γ(z)` of the
//! line bundle of a theta divisor.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{classify, GaussianLattice};
use crate::period::Frame;
use crate::quadratic::{arf, brown, gauss_sum, GaussSum, Z4};
use crate::symplectic::SymplecticBasisZ;
use crate::torsion::{enumerate_invariant_forms, induce, multiplicity_from, InvariantThetaForm, TwoTorsionSpace};
use crate::zmat;

/// Outcome of one family of checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        CheckOutcome { name: name.to_string(), passed: true, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < 16 {
                self.failures.push(detail());
            }
        }
    }
}

fn reduce_vec(v: &[BigInt]) -> u64 {
    v.iter().enumerate().fold(0u64, |acc, (k, x)| acc | ((zmat::residue(x, 2) as u64) << k))
}

/// 0/1 lift of a point of `A₂`.
pub fn canonical_lift(x: u64, n: usize) -> Vec<BigInt> {
    (0..n).map(|k| BigInt::from((x >> k) & 1)).collect()
}

/// `log e_γ(z)` with `e_γ(z) = i^{2q′(γ̄)} exp(π H(γ, z + γ/2))` and
/// `H = S + iE` on real lattice coordinates. The imaginary part is not
/// reduced mod 2π.
pub fn cocycle_log_factor(
    lattice: &GaussianLattice,
    frame: &Frame,
    q: &InvariantThetaForm,
    gamma: &[BigInt],
    z: &[Complex64],
) -> Result<Complex64> {
    let n = lattice.rank();
    if gamma.len() != n || 2 * z.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: gamma.len() });
    }
    let w = frame.to_real(z);
    let gf: Vec<f64> = gamma.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let arg: Vec<f64> = (0..n).map(|k| w[k] + 0.5 * gf[k]).collect();
    let form = |m: &zmat::ZMatrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            if gf[i] == 0.0 {
                continue;
            }
            let row: f64 = (0..n).map(|j| m[i][j].to_f64().unwrap_or(f64::NAN) * arg[j]).sum();
            acc += gf[i] * row;
        }
        acc
    };
    let h = Complex64::new(form(lattice.gram()), form(lattice.skew_form()));
    let phase = 0.5 * PI * (2 * q.eval(reduce_vec(gamma))) as f64;
    Ok(PI * h + Complex64::new(0.0, phase))
}

pub fn cocycle_factor(
    lattice: &GaussianLattice,
    frame: &Frame,
    q: &InvariantThetaForm,
    gamma: &[BigInt],
    z: &[Complex64],
) -> Result<Complex64> {
    Ok(cocycle_log_factor(lattice, frame, q, gamma, z)?.exp())
}

/// `|e_{γ+δ}(z) / (e_γ(z+δ) e_δ(z)) − 1|`.
pub fn cocycle_identity_residual(
    lattice: &GaussianLattice,
    frame: &Frame,
    q: &InvariantThetaForm,
    gamma: &[BigInt],
    delta: &[BigInt],
    z: &[Complex64],
) -> Result<f64> {
    let sum: Vec<BigInt> = gamma.iter().zip(delta).map(|(a, b)| a + b).collect();
    let df: Vec<f64> = delta.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let shift = frame.to_complex(&df);
    let z_shift: Vec<Complex64> = z.iter().zip(&shift).map(|(a, b)| a + b).collect();
    let lhs = cocycle_log_factor(lattice, frame, q, &sum, z)?;
    let rhs =
        cocycle_log_factor(lattice, frame, q, gamma, &z_shift)? + cocycle_log_factor(lattice, frame, q, delta, z)?;
    let d = lhs - rhs;
    // Reduce the phase before exponentiating so large arguments stay accurate.
    let d = Complex64::new(d.re, d.im.rem_euclid(2.0 * PI));
    Ok((d.exp() - 1.0).norm())
}

/// `δ̄` and `S(δ,δ) mod 4` for `δ = (Jγ − γ)/2`.
fn iota_delta(lattice: &GaussianLattice, gamma: &[BigInt]) -> Result<(u64, Z4)> {
    let jg = lattice.apply_aut(gamma);
    let two = BigInt::from(2);
    let mut delta = Vec::with_capacity(gamma.len());
    for (a, b) in jg.iter().zip(gamma) {
        let (quo, rem) = (a - b).div_rem(&two);
        if !rem.is_zero() {
            return Err(Error::NotInvariantPoint);
        }
        delta.push(quo);
    }
    let s = lattice.s(&delta, &delta);
    Ok((reduce_vec(&delta), Z4::new(zmat::residue(&s, 4) as i64)))
}

/// `(2q′(δ̄) − S(δ,δ)) mod 4` for `δ = (Jγ − γ)/2`, where `γ` lifts a point
/// of `A_i`; `ι(α)` acts by `i` to this power.
pub fn iota_exponent(lattice: &GaussianLattice, q: &InvariantThetaForm, gamma: &[BigInt]) -> Result<Z4> {
    let (delta, s) = iota_delta(lattice, gamma)?;
    Ok(Z4::new(2 * q.eval(delta) as i64) - s)
}

/// The trace identity `Σ_{α∈A_i} i^{Q_q(α)} = (1−i)^g · i^{(σ+g)/2}` with σ
/// from the orthonormal-basis route and the left side by enumeration.
pub fn trace_identity(t: &TwoTorsionSpace, forms: &[InvariantThetaForm], gauss_bound: usize) -> Result<CheckOutcome> {
    let g = t.g();
    let mut out = CheckOutcome::new("trace identity");
    for (index, q) in forms.iter().enumerate() {
        let induced = induce(t, q)?;
        let sigma = brown(&induced.qq)?;
        let lhs = gauss_sum(&induced.qq, gauss_bound)?;
        let parity_ok = (sigma.value() as usize + g) % 2 == 0;
        let rhs = GaussSum::new(1, -1).pow(g as u32).mul(GaussSum::i_pow((sigma.value() as i64 + g as i64) / 2));
        out.record(parity_ok && lhs == rhs, || format!("form {index}: sum {lhs:?}, expected {rhs:?} (σ = {sigma})"));
    }
    Ok(out)
}

/// `ι`-exponent equals `Q_q(α)` for every form, every `α ∈ A_i` and
/// `lifts` lifts of each (the 0/1 lift, then random ones).
pub fn iota_ratio<R: Rng>(
    lattice: &GaussianLattice,
    t: &TwoTorsionSpace,
    forms: &[InvariantThetaForm],
    lifts: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let n = lattice.rank();
    let induced = forms.iter().map(|q| induce(t, q)).collect::<Result<Vec<_>>>()?;
    let mut out = CheckOutcome::new("iota ratio");
    for coords in 0..1u64 << t.g() {
        let alpha = t.ai_vector(coords);
        let base = canonical_lift(alpha, n);
        for l in 0..lifts {
            let gamma: Vec<BigInt> = if l == 0 {
                base.clone()
            } else {
                base.iter().map(|x| x + 2 * BigInt::from(rng.gen_range(-3i64..=3))).collect()
            };
            let (delta, s) = iota_delta(lattice, &gamma)?;
            for (index, (q, ind)) in forms.iter().zip(&induced).enumerate() {
                let got = Z4::new(2 * q.eval(delta) as i64) - s;
                let expected = ind.qq_at(coords);
                out.record(got == expected, || {
                    format!("form {index}, α coords {coords:b}, lift {l}: exponent {got}, Q_q = {expected}")
                });
            }
        }
    }
    Ok(out)
}

/// Every invariant form of an even lattice has Arf invariant 0.
pub fn syzygy(lattice: &GaussianLattice, forms: &[InvariantThetaForm]) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("syzygy");
    if !classify(lattice).even {
        return Ok(out);
    }
    for (index, q) in forms.iter().enumerate() {
        let a = arf(q.form())?;
        out.record(a == 0, || format!("form {index} is odd on an even lattice"));
    }
    Ok(out)
}

/// `m₀ mod 2` equals `Arf(q′)`, and `σ(Q_q) ≡ g (mod 2)`.
pub fn parity(t: &TwoTorsionSpace, forms: &[InvariantThetaForm]) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("parity");
    for (index, q) in forms.iter().enumerate() {
        let induced = induce(t, q)?;
        let sigma = brown(&induced.qq)?;
        if (sigma.value() as usize + t.g()) % 2 != 0 {
            out.record(false, || format!("form {index}: σ = {sigma} has the wrong parity"));
            continue;
        }
        let m0 = multiplicity_from(sigma, t.g(), induced.qq_at(0))?;
        let a = arf(q.form())?;
        out.record(m0.value() % 2 == a, || format!("form {index}: m₀ ≡ {m0} but Arf = {a}"));
    }
    Ok(out)
}

/// Cocycle identity on `triples` random `(γ, δ, z)` with small entries,
/// cycling through the forms.
pub fn cocycle_identity<R: Rng>(
    lattice: &GaussianLattice,
    basis: &SymplecticBasisZ,
    forms: &[InvariantThetaForm],
    triples: usize,
    rng: &mut R,
) -> Result<CheckOutcome> {
    let n = lattice.rank();
    let frame = Frame::new(lattice, basis)?;
    let mut out = CheckOutcome::new("cocycle identity");
    for k in 0..triples {
        let q = &forms[k % forms.len()];
        let mut small = || -> Vec<BigInt> { (0..n).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect() };
        let gamma = small();
        let delta = small();
        let z: Vec<Complex64> =
            (0..n / 2).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let r = cocycle_identity_residual(lattice, &frame, q, &gamma, &delta, &z)?;
        out.record(r < 1e-9, || format!("triple {k}: relative residual {r:e}"));
    }
    Ok(out)
}

/// Settings for [`exact_suite`].
#[derive(Copy, Clone, Debug)]
pub struct ExactConfig {
    pub gauss_bound: usize,
    pub lifts: usize,
    pub triples: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { gauss_bound: crate::quadratic::DEFAULT_GAUSS_BOUND, lifts: 3, triples: 1000 }
    }
}

/// Trace identity (when `g` is within the Gauss-sum bound), ι-ratio,
/// syzygy, parity and cocycle identity.
pub fn exact_suite<R: Rng>(
    lattice: &GaussianLattice,
    basis: &SymplecticBasisZ,
    t: &TwoTorsionSpace,
    config: &ExactConfig,
    rng: &mut R,
) -> Result<Vec<CheckOutcome>> {
    let forms = enumerate_invariant_forms(t)?;
    let mut out = Vec::new();
    if t.g() <= config.gauss_bound {
        out.push(trace_identity(t, &forms, config.gauss_bound)?);
    }
    out.push(iota_ratio(lattice, t, &forms, config.lifts, rng)?);
    out.push(syzygy(lattice, &forms)?);
    out.push(parity(t, &forms)?);
    out.push(cocycle_identity(lattice, basis, &forms, config.triples, rng)?);
    Ok(out)
}
