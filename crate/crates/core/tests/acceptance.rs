//! Exit criteria. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gtheta_core::bits::BitMatrix;
use gtheta_core::checks::{cocycle_identity, iota_ratio, parity, syzygy, trace_identity};
use gtheta_core::lattice::{change_basis, e8_gram, random_unimodular};
use gtheta_core::quadratic::F2BilinearSpace;
use gtheta_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VANISH: f64 = 1e-8;
const FLOOR: f64 = 1e-3;
const THETA_TOL: f64 = 1e-10;
const COCYCLE_TOL: f64 = 1e-9;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, detail: detail.into() }
    }
}

fn suite() -> Vec<GaussianLattice> {
    let mut out: Vec<GaussianLattice> = [2, 4, 6, 8].iter().map(|&g| gamma_2g(g).unwrap()).collect();
    out.extend((1..=10).map(|n| gauss_zn(n).unwrap()));
    out.push(gaussify(&e8_gram(), "gaussify_e8").unwrap());
    out
}

/// Number of subsets of `{1..g}` whose size is `≡ 2 (mod 4)`.
fn subsets_of_size_two_mod_four(g: u32) -> u64 {
    (0..1u64 << g).filter(|s| s.count_ones() % 4 == 2).count() as u64
}

/// `2^{g/2−1}(2^{g/2} − (−1)^{g/4})` evaluated directly.
fn even_count(g: u32) -> u64 {
    let h = g / 2;
    let sign = if (g / 4) % 2 == 0 { 1i64 } else { -1 };
    ((1i64 << (h - 1)) * ((1i64 << h) - sign)) as u64
}

fn census_default(l: &GaussianLattice) -> CensusReport {
    census(l, &CensusConfig::default()).unwrap()
}

fn criterion_1() -> Verdict {
    let l = gamma_2g(4).unwrap();
    let start = Instant::now();
    let r = census_default(&l);
    let elapsed = start.elapsed();
    let formula = closed_formula(4, true).unwrap();
    let ok = r.forms.len() == 16 && r.n2() == 10 && formula == 10 && r.matches && elapsed < Duration::from_secs(1);
    Verdict::new(
        ok,
        format!("{} forms, n2 = {}, formula = {formula}, {:.3} s", r.forms.len(), r.n2(), elapsed.as_secs_f64()),
    )
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut cases: Vec<(GaussianLattice, u64)> = Vec::new();
    for g in [2u32, 4, 6, 8] {
        let l = gamma_2g(g as usize).unwrap();
        let expected = if g % 4 == 0 { even_count(g) } else { subsets_of_size_two_mod_four(g) };
        cases.push((l, expected));
    }
    for n in 1..=10u32 {
        cases.push((gauss_zn(n as usize).unwrap(), subsets_of_size_two_mod_four(n)));
    }
    cases.push((gaussify(&e8_gram(), "gaussify_e8").unwrap(), even_count(8)));
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for (l, expected) in &cases {
        let r = census_default(l);
        let even = classify(l).even;
        let formula = closed_formula(l.g(), even).unwrap();
        seen.push(format!("{}={}", l.label(), r.n2()));
        if r.n2() != *expected || formula != *expected || !r.matches {
            bad.push(format!("{}: n2 {} formula {} expected {}", l.label(), r.n2(), formula, expected));
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(30);
    let detail = if bad.is_empty() { seen.join(" ") } else { bad.join("; ") };
    Verdict::new(ok, format!("{detail} ({:.2} s)", elapsed.as_secs_f64()))
}

fn criterion_3() -> Verdict {
    let mut forms_checked = 0;
    let mut bad = Vec::new();
    for l in suite().iter().filter(|l| l.g() <= 10) {
        let t = reduce(l).unwrap();
        let forms = enumerate_invariant_forms(&t).unwrap();
        let c = trace_identity(&t, &forms, 20).unwrap();
        forms_checked += c.cases;
        if !c.passed {
            bad.push(format!("{}: {:?}", l.label(), c.failures));
        }
        // σ ≡ g (mod 2) separately, from the census records.
        let r = census_default(l);
        if r.forms.iter().any(|f| (f.sigma as usize + l.g()) % 2 != 0) {
            bad.push(format!("{}: σ parity", l.label()));
        }
    }
    Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{forms_checked} forms") } else { bad.join("; ") })
}

fn random_nondegenerate(n: usize, rng: &mut ChaCha8Rng) -> F2BilinearSpace {
    loop {
        let mut m = BitMatrix::zero(n);
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_bool(0.5);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        if let Ok(space) = F2BilinearSpace::new(m) {
            return space;
        }
    }
}

fn brown_matches_gauss_sum(q: &Z4Form) -> bool {
    let poly = brown(q).unwrap();
    let exact = sigma_from_gauss_sum(gauss_sum(q, 20).unwrap(), q.dim()).unwrap();
    poly == exact
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut exhaustive = 0u64;
    let mut bad = Vec::new();
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        for pattern in 0..1u64 << pairs.len() {
            let mut m = BitMatrix::zero(n);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let v = (pattern >> k) & 1 == 1;
                m.set(i, j, v);
                m.set(j, i, v);
            }
            let Ok(space) = F2BilinearSpace::new(m) else { continue };
            for lift in 0..1u64 << n {
                let diag: Vec<Z4> =
                    (0..n).map(|k| Z4::new(space.matrix().get(k, k) as i64 + 2 * ((lift >> k) & 1) as i64)).collect();
                let q = Z4Form::new(space.clone(), diag).unwrap();
                exhaustive += 1;
                if !brown_matches_gauss_sum(&q) && bad.len() < 5 {
                    bad.push(format!("{q:?}"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let random = 1000;
    for _ in 0..random {
        let n = rng.gen_range(1..=12);
        let space = random_nondegenerate(n, &mut rng);
        let diag: Vec<Z4> =
            (0..n).map(|k| Z4::new(space.matrix().get(k, k) as i64 + 2 * rng.gen_range(0..2))).collect();
        let q = Z4Form::new(space, diag).unwrap();
        if !brown_matches_gauss_sum(&q) && bad.len() < 10 {
            bad.push(format!("{q:?}"));
        }
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && elapsed < Duration::from_secs(60);
    Verdict::new(
        ok,
        format!(
            "{exhaustive} exhaustive + {random} random forms, {} disagreements ({:.1} s){}",
            bad.len(),
            elapsed.as_secs_f64(),
            if bad.is_empty() { String::new() } else { format!(": {}", bad.join("; ")) }
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut bad = Vec::new();
    let mut even_lattices = 0;
    for l in suite() {
        let t = reduce(&l).unwrap();
        let forms = enumerate_invariant_forms(&t).unwrap();
        if classify(&l).even {
            even_lattices += 1;
            let s = syzygy(&l, &forms).unwrap();
            if !s.passed || s.cases != forms.len() as u64 {
                bad.push(format!("{} syzygy: {:?}", l.label(), s.failures));
            }
        }
        let p = parity(&t, &forms).unwrap();
        if !p.passed {
            bad.push(format!("{} parity: {:?}", l.label(), p.failures));
        }
    }
    let ok = bad.is_empty() && even_lattices == 3;
    Verdict::new(ok, if bad.is_empty() { format!("{even_lattices} even lattices") } else { bad.join("; ") })
}

/// Numeric vanishing pattern versus the census prediction.
fn numeric_case(l: &GaussianLattice) -> (bool, String) {
    let r = census_default(l);
    let config =
        NumericConfig { tol: THETA_TOL, vanish_threshold: VANISH, nonvanish_floor: FLOOR, ..Default::default() };
    let v = verify_census_numeric(l, &r, &config).unwrap();
    let ok = v.passed && v.numeric_vanishing == r.n2();
    let detail = format!(
        "{}: predicted {}, numeric zeros {}, mismatched forms {:?}",
        l.label(),
        r.n2(),
        v.numeric_vanishing,
        v.mismatches
    );
    (ok, detail)
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut all = true;
    let mut details = Vec::new();
    let l = gamma_2g(4).unwrap();
    let (ok, d) = numeric_case(&l);
    let r = census_default(&l);
    let ok = ok && r.n2() == 10 && r.counts.m0[0] == 6;
    all &= ok;
    details.push(d);
    for n in 1..=4 {
        let (ok, d) = numeric_case(&gauss_zn(n).unwrap());
        all &= ok;
        details.push(d);
    }
    let elapsed = start.elapsed();
    all &= elapsed < Duration::from_secs(60);
    Verdict::new(all, format!("{} ({:.2} s)", details.join("; "), elapsed.as_secs_f64()))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    let (mut triples, mut iota_cases) = (0, 0);
    for l in suite() {
        let t = reduce(&l).unwrap();
        let forms = enumerate_invariant_forms(&t).unwrap();
        let basis = symplectic_basis(&l).unwrap();
        let c = cocycle_identity(&l, &basis, &forms, 1000, &mut rng).unwrap();
        triples += c.cases;
        if !c.passed {
            bad.push(format!("{} cocycle: {:?}", l.label(), c.failures));
        }
        let i = iota_ratio(&l, &t, &forms, 3, &mut rng).unwrap();
        iota_cases += i.cases;
        if !i.passed {
            bad.push(format!("{} iota: {:?}", l.label(), i.failures));
        }
    }
    let detail = if bad.is_empty() {
        format!("{triples} cocycle triples below {COCYCLE_TOL:e}, {iota_cases} ι-ratio cases")
    } else {
        bad.join("; ")
    };
    Verdict::new(bad.is_empty(), detail)
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    let mut changes = 0;
    for l in suite() {
        let class = classify(&l);
        let r = census_default(&l);
        for _ in 0..5 {
            let (u, u_inv) = random_unimodular(l.rank(), 3 * l.rank(), &mut rng);
            let moved = change_basis(&l, &u, &u_inv).unwrap();
            let r2 = census_default(&moved);
            changes += 1;
            if classify(&moved) != class || r2.counts != r.counts || r2.formula != r.formula || r2.matches != r.matches
            {
                bad.push(l.label().to_string());
            }
        }
    }
    Verdict::new(bad.is_empty(), if bad.is_empty() { format!("{changes} basis changes") } else { bad.join(", ") })
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("E8 census: 10 of 16 forms with m0 = 2 mod 4", criterion_1),
        ("closed formula over the lattice suite", criterion_2),
        ("Gauss-sum trace identity and sigma parity", criterion_3),
        ("Brown invariant equals Gauss-sum value", criterion_4),
        ("syzygy on even lattices, m0 parity = Arf", criterion_5),
        ("numeric theta vanishing pattern", criterion_6),
        ("cocycle identity and iota ratio", criterion_7),
        ("invariance under change of basis", criterion_8),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::new(false, format!("panicked: {msg}"))
        });
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {title} ({:.2} s): {}", k + 1, start.elapsed().as_secs_f64(), verdict.detail);
        if !verdict.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
