//! Theta constants with half-integer characteristics,
//! `θ[a,b](0,τ) = Σ_{n∈ℤ^g} exp(iπ (n+a/2)ᵀ τ (n+a/2) + iπ (n+a/2)ᵀ b)`,
//! summed over a box with a certified bound on the omitted terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{self, bit};
use crate::error::{Error, Result};
use crate::lattice::GaussianLattice;
use crate::period::PeriodMatrix;
use crate::symplectic::SymplecticBasisZ;
use crate::torsion::{InvariantThetaForm, TwoTorsionSpace};
use crate::zmat::{self, QMatrix};

pub const DEFAULT_MAX_TERMS: u64 = 200_000_000;

/// A characteristic `(a, b)` with entries in {0, 1}, standing for `(a/2, b/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Characteristic {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

impl Characteristic {
    pub fn new(a: Vec<u8>, b: Vec<u8>) -> Self {
        assert_eq!(a.len(), b.len());
        Characteristic { a, b }
    }

    pub fn from_bits(a: u64, b: u64, g: usize) -> Self {
        Characteristic { a: bits::to_bits(a, g), b: bits::to_bits(b, g) }
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }

    /// `aᵀb mod 2`; odd characteristics have identically vanishing theta constant.
    pub fn parity(&self) -> u8 {
        self.a.iter().zip(&self.b).fold(0, |acc, (x, y)| acc ^ (x & y))
    }

    pub fn a_bits(&self) -> u64 {
        bits::from_bits(&self.a)
    }

    pub fn b_bits(&self) -> u64 {
        bits::from_bits(&self.b)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ThetaValue {
    pub value: Complex64,
    /// Bound on the sum of the omitted terms.
    pub tail_bound: f64,
    /// Radius of the summation ellipsoid, in the norm of `Im τ`.
    pub radius: f64,
}

/// Mod-2 reduction of an integral symplectic basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedFrame {
    pub lambda: Vec<u64>,
    pub mu: Vec<u64>,
}

impl ReducedFrame {
    pub fn new(t: &TwoTorsionSpace, basis: &SymplecticBasisZ) -> Result<Self> {
        let red = |v: &Vec<num_bigint::BigInt>| {
            v.iter().enumerate().fold(0u64, |acc, (k, x)| acc | ((zmat::residue(x, 2) as u64) << k))
        };
        let frame =
            ReducedFrame { lambda: basis.lambda.iter().map(red).collect(), mu: basis.mu.iter().map(red).collect() };
        let g = frame.lambda.len();
        if g != t.g() {
            return Err(Error::DimensionMismatch("symplectic basis does not match the torsion space".into()));
        }
        for j in 0..g {
            for k in 0..g {
                let ok = t.weil_pairing(frame.lambda[j], frame.lambda[k]) == 0
                    && t.weil_pairing(frame.mu[j], frame.mu[k]) == 0
                    && t.weil_pairing(frame.lambda[j], frame.mu[k]) == (j == k) as u8;
                if !ok {
                    return Err(Error::Internal("reduced basis is not symplectic for e".into()));
                }
            }
        }
        Ok(frame)
    }

    /// `Σ x_j λ̄_j + Σ y_j μ̄_j`.
    pub fn point(&self, x: u64, y: u64) -> u64 {
        let mut v = 0;
        for j in 0..self.lambda.len() {
            if bit(x, j) == 1 {
                v ^= self.lambda[j];
            }
            if bit(y, j) == 1 {
                v ^= self.mu[j];
            }
        }
        v
    }
}

/// `a_j = q′(λ̄_j)`, `b_j = q′(μ̄_j)`, so that
/// `q′(xλ̄ + yμ̄) = xᵀy + aᵀx + bᵀy`.
///
/// With this assignment the zeros of the theta constants of `E₈ ⊗ ℤ[i]`
/// sit exactly at the forms with `m₀ ≡ 2 (mod 4)`; the transposed
/// assignment hits 1 of the 10.
pub fn characteristic_in_frame(frame: &ReducedFrame, q: &InvariantThetaForm) -> Result<Characteristic> {
    let g = frame.lambda.len();
    let a = frame.lambda.iter().enumerate().fold(0u64, |acc, (j, &l)| acc | ((q.eval(l) as u64) << j));
    let b = frame.mu.iter().enumerate().fold(0u64, |acc, (j, &m)| acc | ((q.eval(m) as u64) << j));
    // Spot-check the coordinate formula on a deterministic sample.
    let mut state = 0x2545f4914f6cdd1du64 ^ a ^ (b << 1);
    let samples = if g <= 5 { 1u64 << (2 * g) } else { 256 };
    for s in 0..samples {
        let (x, y) = if g <= 5 {
            (s & bits::mask(g), s >> g)
        } else {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state & bits::mask(g), (state >> 32) & bits::mask(g))
        };
        let expect = bits::parity(x & y) ^ bits::parity(a & x) ^ bits::parity(b & y);
        if q.eval(frame.point(x, y)) != expect {
            return Err(Error::Internal("characteristic formula fails; inconsistent basis reduction".into()));
        }
    }
    Ok(Characteristic::from_bits(a, b, g))
}

pub fn form_to_characteristic(
    t: &TwoTorsionSpace,
    basis: &SymplecticBasisZ,
    q: &InvariantThetaForm,
) -> Result<Characteristic> {
    characteristic_in_frame(&ReducedFrame::new(t, basis)?, q)
}

/// Truncation of the theta series to the ellipsoid `xᵀ(Im τ)x ≤ R²`,
/// `x = n + a/2`, enumerated through `Im τ = L·D·Lᵀ` (`L` unit lower
/// triangular).
///
/// Tail bound: for `0 < s < 1` and `xᵀYx > R²`,
/// `e^{−πxᵀYx} ≤ e^{−π(1−s)R²}·e^{−πs·xᵀYx}`, and summing over all `x` one
/// coordinate at a time in the `LDLᵀ` form gives
/// `Σ_x e^{−πs·xᵀYx} ≤ Π_k (1 + 1/√(s·d_k))`: a sum of a unimodal Gaussian
/// over a shifted copy of ℤ is at most its maximum plus its integral.
#[derive(Clone, Debug)]
pub struct Truncation {
    g: usize,
    lower: Vec<Vec<f64>>,
    diag: Vec<f64>,
    pub radius: f64,
    pub tail_bound: f64,
    pub estimated_terms: f64,
}

impl Truncation {
    pub fn new(tau: &PeriodMatrix, tol: f64, max_terms: u64) -> Result<Self> {
        assert!(tol > 0.0);
        let g = tau.g();
        let (lower, diag) = ldl(tau.im_exact())?;
        let log_product = |s: f64| diag.iter().map(|d| (1.0 + 1.0 / (s * d).sqrt()).ln()).sum::<f64>();
        let (radius2, s) = (1..20)
            .map(|k| {
                let s = k as f64 / 20.0;
                // Nudged up so exp(ln tol) rounding cannot leave the bound above tol.
                let r2 = ((log_product(s) - tol.ln()) / (PI * (1.0 - s))).max(0.0) * (1.0 + 1e-12) + 1e-12;
                (r2, s)
            })
            .fold((f64::INFINITY, 0.5), |best, cur| if cur.0 < best.0 { cur } else { best });
        let tail_bound = (-PI * (1.0 - s) * radius2 + log_product(s)).exp();
        let radius = radius2.sqrt();
        // Volume of the ellipsoid plus a margin for the boundary layer.
        let det: f64 = diag.iter().product();
        let unit_ball = PI.powf(g as f64 / 2.0) / gamma_half_integer(g);
        let estimated_terms = unit_ball * (radius + 0.5 * (g as f64).sqrt()).powi(g as i32) / det.sqrt();
        if estimated_terms > max_terms as f64 {
            return Err(Error::ThetaBudget { radius, terms: estimated_terms, budget: max_terms });
        }
        Ok(Truncation { g, lower, diag, radius, tail_bound, estimated_terms })
    }

    /// Integer range of `n_k` given `x_{k+1..}`, the remaining budget and
    /// the shift `c_k`.
    fn range(&self, k: usize, x: &[f64], remaining: f64, shift: f64) -> (i64, i64) {
        let center = -(k + 1..self.g).map(|i| self.lower[i][k] * x[i]).sum::<f64>();
        let half = (remaining.max(0.0) / self.diag[k]).sqrt();
        (((center - half - shift).ceil()) as i64, ((center + half - shift).floor()) as i64)
    }

    fn level_value(&self, k: usize, x: &[f64]) -> f64 {
        let t = x[k] + (k + 1..self.g).map(|i| self.lower[i][k] * x[i]).sum::<f64>();
        self.diag[k] * t * t
    }

    /// Values of the outermost coordinate `n_{g−1}` that meet the ellipsoid.
    fn outer_range(&self, shift: &[f64]) -> (i64, i64) {
        let x = vec![0.0; self.g];
        self.range(self.g - 1, &x, self.budget(), shift[self.g - 1])
    }

    /// `R²` with a little slack so rounding never drops a point inside.
    fn budget(&self) -> f64 {
        self.radius * self.radius * (1.0 + 1e-9) + 1e-12
    }

    /// Calls `f(n, x)` for every `n` with `x = n + shift` in the ellipsoid
    /// and `n_{g−1} = outer`.
    fn for_each(&self, shift: &[f64], outer: i64, mut f: impl FnMut(&[i64], &[f64])) {
        let g = self.g;
        let mut n = vec![0i64; g];
        let mut x = vec![0.0; g];
        let mut used = vec![0.0; g + 1];
        n[g - 1] = outer;
        x[g - 1] = outer as f64 + shift[g - 1];
        used[g - 1] = self.level_value(g - 1, &x);
        if used[g - 1] > self.budget() {
            return;
        }
        if g == 1 {
            f(&n, &x);
            return;
        }
        // Depth-first over k = g−2 … 0 with explicit bounds per level.
        let mut hi = vec![0i64; g];
        let mut k = g - 2;
        let (lo, h) = self.range(k, &x, self.budget() - used[k + 1], shift[k]);
        n[k] = lo - 1;
        hi[k] = h;
        loop {
            n[k] += 1;
            if n[k] > hi[k] {
                if k == g - 2 {
                    return;
                }
                k += 1;
                continue;
            }
            x[k] = n[k] as f64 + shift[k];
            used[k] = used[k + 1] + self.level_value(k, &x);
            if k == 0 {
                if used[0] <= self.budget() {
                    f(&n, &x);
                }
                continue;
            }
            k -= 1;
            let (lo, h) = self.range(k, &x, self.budget() - used[k + 1], shift[k]);
            n[k] = lo - 1;
            hi[k] = h;
        }
    }
}

/// `Γ(g/2 + 1)`.
fn gamma_half_integer(g: usize) -> f64 {
    let mut v = if g % 2 == 0 { 1.0 } else { PI.sqrt() / 2.0 };
    let mut k = if g % 2 == 0 { 2.0 } else { 3.0 };
    while k <= g as f64 + 1e-9 {
        v *= k / 2.0;
        k += 2.0;
    }
    v
}

/// `Y = L·D·Lᵀ` computed exactly; `d_k` is rounded down.
fn ldl(y: &QMatrix) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let g = y.len();
    let mut l = vec![vec![BigRational::zero(); g]; g];
    let mut d = vec![BigRational::zero(); g];
    for j in 0..g {
        let mut dj = y[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::PeriodMatrix("Im τ is not positive definite".into()));
        }
        for i in j + 1..g {
            let mut v = y[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        l[j][j] = BigRational::one();
        d[j] = dj;
    }
    let lower = l.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
    let diag = d.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) * (1.0 - 1e-12)).collect();
    Ok((lower, diag))
}

/// Neumaier-compensated complex accumulator.
#[derive(Copy, Clone, Default)]
struct Accumulator {
    sum: Complex64,
    comp: Complex64,
}

impl Accumulator {
    fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

/// `exp(iπ xᵀτx)`.
#[inline]
fn gaussian_term(tau: &[Vec<Complex64>], x: &[f64]) -> Complex64 {
    let g = x.len();
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..g {
        let mut rj = 0.0;
        let mut ij = 0.0;
        for k in 0..g {
            rj += tau[j][k].re * x[k];
            ij += tau[j][k].im * x[k];
        }
        re += x[j] * rj;
        im += x[j] * ij;
    }
    Complex64::from_polar((-PI * im).exp(), PI * re)
}

pub fn theta_constant(tau: &PeriodMatrix, c: &Characteristic, tol: f64) -> Result<ThetaValue> {
    theta_constant_with_budget(tau, c, tol, DEFAULT_MAX_TERMS)
}

pub fn theta_constant_with_budget(
    tau: &PeriodMatrix,
    c: &Characteristic,
    tol: f64,
    max_terms: u64,
) -> Result<ThetaValue> {
    let g = tau.g();
    if c.g() != g {
        return Err(Error::LengthMismatch { expected: g, got: c.g() });
    }
    let trunc = Truncation::new(tau, tol, max_terms)?;
    let shift: Vec<f64> = c.a.iter().map(|&a| 0.5 * a as f64).collect();
    let t = tau.tau();
    let (lo, hi) = trunc.outer_range(&shift);
    let slices: Vec<Complex64> = (lo..=hi)
        .into_par_iter()
        .map(|outer| {
            let mut acc = Accumulator::default();
            trunc.for_each(&shift, outer, |_, x| {
                let phase: f64 = x.iter().zip(&c.b).map(|(m, &b)| m * b as f64).sum();
                acc.add(gaussian_term(t, x) * Complex64::from_polar(1.0, PI * phase));
            });
            acc.total()
        })
        .collect();
    let mut acc = Accumulator::default();
    for s in slices {
        acc.add(s);
    }
    Ok(ThetaValue { value: acc.total(), tail_bound: trunc.tail_bound, radius: trunc.radius })
}

/// All `4^g` theta constants of `τ`.
///
/// For fixed `a`, the terms are grouped by `n mod 2` into `P_a(c)`; then
/// `θ[a,b] = e^{iπ aᵀb/2} Σ_c (−1)^{cᵀb} P_a(c)`, a Walsh–Hadamard transform.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    g: usize,
    values: Vec<Complex64>,
    pub tail_bound: f64,
    pub radius: f64,
}

impl ThetaTable {
    pub fn get(&self, c: &Characteristic) -> ThetaValue {
        let idx = ((c.a_bits() as usize) << self.g) | c.b_bits() as usize;
        ThetaValue { value: self.values[idx], tail_bound: self.tail_bound, radius: self.radius }
    }

    /// `max |θ[a,b]|` over even characteristics.
    pub fn max_even(&self) -> f64 {
        let g = self.g;
        (0..1u64 << g)
            .flat_map(|a| (0..1u64 << g).map(move |b| (a, b)))
            .filter(|&(a, b)| bits::parity(a & b) == 0)
            .map(|(a, b)| self.values[((a as usize) << g) | b as usize].norm())
            .fold(0.0, f64::max)
    }
}

pub fn theta_table(tau: &PeriodMatrix, tol: f64, max_terms: u64) -> Result<ThetaTable> {
    let g = tau.g();
    if g > 10 {
        return Err(Error::EnumerationBound { dim: g, bound: 10 });
    }
    let trunc = Truncation::new(tau, tol, (max_terms >> g).max(1))?;
    let t = tau.tau();
    let size = 1usize << g;
    let per_a: Vec<Vec<Complex64>> = (0..size)
        .into_par_iter()
        .map(|a| {
            let shift: Vec<f64> = (0..g).map(|k| 0.5 * ((a >> k) & 1) as f64).collect();
            let mut classes = vec![Accumulator::default(); size];
            let (lo, hi) = trunc.outer_range(&shift);
            for outer in lo..=hi {
                trunc.for_each(&shift, outer, |n, x| {
                    let class =
                        n.iter().enumerate().fold(0usize, |acc, (k, v)| acc | ((v.rem_euclid(2) as usize) << k));
                    classes[class].add(gaussian_term(t, x));
                });
            }
            let mut p: Vec<Complex64> = classes.iter().map(|c| c.total()).collect();
            walsh_hadamard(&mut p);
            (0..size).map(|b| p[b] * Complex64::from_polar(1.0, 0.5 * PI * (a & b).count_ones() as f64)).collect()
        })
        .collect();
    Ok(ThetaTable {
        g,
        values: per_a.into_iter().flatten().collect(),
        tail_bound: trunc.tail_bound,
        radius: trunc.radius,
    })
}

/// In-place `p[b] ← Σ_c (−1)^{c·b} p[c]`.
fn walsh_hadamard(p: &mut [Complex64]) {
    let mut h = 1;
    while h < p.len() {
        for i in (0..p.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (p[j], p[j + h]);
                p[j] = x + y;
                p[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Characteristics of `forms` in the frame of `basis`.
pub fn characteristics_for(
    lattice: &GaussianLattice,
    t: &TwoTorsionSpace,
    basis: &SymplecticBasisZ,
    forms: &[InvariantThetaForm],
) -> Result<Vec<Characteristic>> {
    basis.validate(lattice)?;
    let frame = ReducedFrame::new(t, basis)?;
    forms.iter().map(|q| characteristic_in_frame(&frame, q)).collect()
}
