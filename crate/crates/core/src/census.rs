//! Census of i-invariant theta characteristics by `m₀ mod 4`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{classify, GaussianLattice};
use crate::period::theta_basis;
use crate::quadratic::{arf, brown, gauss_sum, sigma_from_gauss_sum, DEFAULT_GAUSS_BOUND};
use crate::theta::{characteristic_in_frame, ReducedFrame};
use crate::torsion::{enumerate_invariant_forms, induce, multiplicity_from, reduce};

#[derive(Copy, Clone, Debug)]
pub struct CensusConfig {
    /// Largest `g` for which σ is cross-checked by an exact Gauss sum.
    pub gauss_bound: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { gauss_bound: DEFAULT_GAUSS_BOUND }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRecord {
    pub index: u64,
    pub sigma: u8,
    pub m0_mod4: u8,
    #[serde(rename = "arf_A2")]
    pub arf_a2: u8,
    pub char_a: Vec<u8>,
    pub char_b: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub m0: [u64; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub label: String,
    pub g: usize,
    pub lattice_parity: String,
    pub forms: Vec<FormRecord>,
    pub counts: Counts,
    pub formula: u64,
    #[serde(rename = "match")]
    pub matches: bool,
}

impl CensusReport {
    /// Number of forms with `m₀ ≡ 2 (mod 4)`.
    pub fn n2(&self) -> u64 {
        self.counts.m0[2]
    }
}

/// Number of i-invariant divisors with `m₀ ≡ 2 (mod 4)` predicted in closed
/// form: `2^{g/2−1}(2^{g/2} − (−1)^{g/4})` for even lattices (`4 | g`) and
/// `C(g,2) + C(g,6) + …` for odd ones.
pub fn closed_formula(g: usize, even: bool) -> Result<u64> {
    if g > 62 {
        return Err(Error::EnumerationBound { dim: g, bound: 62 });
    }
    if even {
        if g % 4 != 0 {
            return Err(Error::Domain(format!("even unimodular Gaussian lattices need 4 | g, got g = {g}")));
        }
        let h = (g / 2) as u32;
        let sign: i64 = if (g / 4) % 2 == 0 { 1 } else { -1 };
        if g == 0 {
            return Ok(0);
        }
        let v = (1i128 << (h - 1)) * ((1i128 << h) - sign as i128);
        return Ok(v as u64);
    }
    let mut total = 0u64;
    let mut k = 2;
    while k <= g {
        total += binomial(g as u64, k as u64);
        k += 4;
    }
    Ok(total)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as u64
}

pub fn census(lattice: &GaussianLattice, config: &CensusConfig) -> Result<CensusReport> {
    let class = classify(lattice);
    if !class.unimodular {
        return Err(Error::NotUnimodular(class.det));
    }
    let g = lattice.g();
    let t = reduce(lattice)?;
    let forms = enumerate_invariant_forms(&t)?;
    let frame = ReducedFrame::new(&t, &theta_basis(lattice)?)?;
    let records: Vec<FormRecord> = forms
        .par_iter()
        .enumerate()
        .map(|(index, q)| -> Result<FormRecord> {
            let induced = induce(&t, q)?;
            let sigma = brown(&induced.qq)?;
            if g <= config.gauss_bound {
                let exact = sigma_from_gauss_sum(gauss_sum(&induced.qq, config.gauss_bound)?, g)?;
                if exact != sigma {
                    return Err(Error::Internal(format!(
                        "form {index}: Brown invariant {sigma} disagrees with Gauss-sum value {exact}"
                    )));
                }
            }
            let m0 = multiplicity_from(sigma, g, induced.qq_at(0))?;
            let c = characteristic_in_frame(&frame, q)?;
            Ok(FormRecord {
                index: index as u64,
                sigma: sigma.value(),
                m0_mod4: m0.value(),
                arf_a2: arf(q.form())?,
                char_a: c.a,
                char_b: c.b,
            })
        })
        .collect::<Result<_>>()?;
    let mut m0 = [0u64; 4];
    for r in &records {
        m0[r.m0_mod4 as usize] += 1;
    }
    let formula = closed_formula(g, class.even)?;
    Ok(CensusReport {
        label: lattice.label().to_string(),
        g,
        lattice_parity: if class.even { "even" } else { "odd" }.to_string(),
        forms: records,
        counts: Counts { m0 },
        formula,
        matches: m0[2] == formula,
    })
}
