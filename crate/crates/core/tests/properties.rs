use gtheta_core::bits::BitMatrix;
use gtheta_core::lattice::{change_basis, random_unimodular};
use gtheta_core::period::reduce_basis;
use gtheta_core::quadratic::F2BilinearSpace;
use gtheta_core::symplectic::random_symplectic_change;
use gtheta_core::theta::{characteristic_in_frame, theta_table, ReducedFrame, DEFAULT_MAX_TERMS};
use gtheta_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn counts(l: &GaussianLattice) -> [u64; 4] {
    census(l, &CensusConfig::default()).unwrap().counts.m0
}

/// Invariant forms of a direct sum are pairs, and `m₀` adds.
fn convolve(a: [u64; 4], b: [u64; 4]) -> [u64; 4] {
    let mut out = [0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[(i + j) % 4] += a[i] * b[j];
        }
    }
    out
}

#[test]
fn direct_sum_counts_follow_the_product_rule() {
    let pairs = [
        (gauss_zn(1).unwrap(), gauss_zn(2).unwrap()),
        (gamma_2g(2).unwrap(), gauss_zn(1).unwrap()),
        (gamma_2g(4).unwrap(), gauss_zn(2).unwrap()),
        (gaussify(&zmat_e8(), "e8").unwrap(), gauss_zn(1).unwrap()),
    ];
    for (a, b) in pairs {
        let sum = direct_sum(&a, &b);
        assert_eq!(counts(&sum), convolve(counts(&a), counts(&b)), "{}", sum.label());
    }
}

fn zmat_e8() -> Vec<Vec<num_bigint::BigInt>> {
    gtheta_core::lattice::e8_gram()
}

#[test]
fn direct_sum_of_gaussian_integers_matches_gaussify() {
    let sum = direct_sum(&gauss_zn(1).unwrap(), &gauss_zn(1).unwrap());
    let r1 = census(&sum, &CensusConfig::default()).unwrap();
    let r2 = census(&gauss_zn(2).unwrap(), &CensusConfig::default()).unwrap();
    assert_eq!(r1.counts, r2.counts);
    let e8 = gamma_2g(4).unwrap();
    let c = classify(&direct_sum(&e8, &e8));
    assert!(c.unimodular && c.even);
    assert_eq!(c.g, 8);
}

/// The number of forms with odd `m₀` equals the number of odd invariant
/// characteristics.
#[test]
fn odd_residues_count_odd_characteristics() {
    for l in [gauss_zn(3).unwrap(), gauss_zn(6).unwrap(), gamma_2g(6).unwrap()] {
        let r = census(&l, &CensusConfig::default()).unwrap();
        let odd = r.forms.iter().filter(|f| f.char_a.iter().zip(&f.char_b).map(|(a, b)| a & b).sum::<u8>() % 2 == 1);
        assert_eq!(odd.count() as u64, r.counts.m0[1] + r.counts.m0[3]);
    }
}

#[test]
fn census_is_deterministic() {
    let l = gauss_zn(5).unwrap();
    let a = serde_json::to_string(&census(&l, &CensusConfig::default()).unwrap()).unwrap();
    let b = serde_json::to_string(&census(&l, &CensusConfig::default()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn polynomial_path_alone_agrees_with_gauss_sum_path() {
    let l = gamma_2g(6).unwrap();
    let with = census(&l, &CensusConfig::default()).unwrap();
    let without = census(&l, &CensusConfig { gauss_bound: 0 }).unwrap();
    assert_eq!(with, without);
}

/// `|θ|/M` per form is unchanged when the symplectic basis is moved by
/// random transvections; the characteristics themselves move.
#[test]
fn normalized_theta_moduli_survive_symplectic_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for l in [gamma_2g(2).unwrap(), gauss_zn(2).unwrap(), gamma_2g(4).unwrap()] {
        let t = reduce(&l).unwrap();
        let forms = enumerate_invariant_forms(&t).unwrap();
        let normalized = |b: &SymplecticBasisZ| -> Vec<f64> {
            let tau = period_matrix(&l, b).unwrap();
            let table = theta_table(&tau, 1e-12, DEFAULT_MAX_TERMS).unwrap();
            let m = table.max_even();
            let frame = ReducedFrame::new(&t, b).unwrap();
            forms.iter().map(|q| table.get(&characteristic_in_frame(&frame, q).unwrap()).value.norm() / m).collect()
        };
        let b0 = symplectic_basis(&l).unwrap();
        let base = normalized(&b0);
        for _ in 0..3 {
            let b1 = reduce_basis(&l, &random_symplectic_change(&l, &b0, 4, &mut rng)).unwrap();
            b1.validate(&l).unwrap();
            let moved = normalized(&b1);
            for (x, y) in base.iter().zip(&moved) {
                assert!(
                    (x - y).abs() <= 1e-6 * x.max(*y).max(1e-300) || (x.abs() < 1e-8 && y.abs() < 1e-8),
                    "{}: {x} vs {y}",
                    l.label()
                );
            }
        }
    }
}

#[test]
fn tightening_tolerance_stays_within_the_first_tail_bound() {
    let l = gamma_2g(4).unwrap();
    let r = census(&l, &CensusConfig::default()).unwrap();
    let tau = period_matrix(&l, &symplectic_basis(&l).unwrap()).unwrap();
    for f in r.forms.iter().take(6) {
        let c = Characteristic::new(f.char_a.clone(), f.char_b.clone());
        let coarse = theta_constant(&tau, &c, 1e-6).unwrap();
        let fine = theta_constant(&tau, &c, 1e-8).unwrap();
        assert!((coarse.value - fine.value).norm() < coarse.tail_bound);
        assert!(coarse.tail_bound <= 1e-6 && fine.tail_bound <= 1e-8);
    }
}

#[test]
fn odd_invariant_characteristics_vanish_up_to_g6() {
    for l in [gauss_zn(5).unwrap(), gamma_2g(6).unwrap(), gauss_zn(6).unwrap()] {
        let r = census(&l, &CensusConfig::default()).unwrap();
        let v = verify_census_numeric(&l, &r, &NumericConfig::default()).unwrap();
        for f in v.forms.iter().filter(|f| f.parity == 1) {
            assert!(f.theta_abs <= 1e-10, "{} form {}", l.label(), f.index);
        }
    }
}

#[test]
fn numeric_bound_is_enforced() {
    let l = gauss_zn(7).unwrap();
    let r = census(&l, &CensusConfig::default()).unwrap();
    assert!(matches!(
        verify_census_numeric(&l, &r, &NumericConfig::default()),
        Err(Error::EnumerationBound { dim: 7, bound: 6 })
    ));
}

/// Brown invariant is additive over orthogonal sums.
#[test]
fn brown_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a = random_form(&mut rng, 5);
        let b = random_form(&mut rng, 5);
        let sum = a.orthogonal_sum(&b).unwrap();
        assert_eq!(brown(&sum).unwrap(), brown(&a).unwrap() + brown(&b).unwrap());
    }
}

fn random_form(rng: &mut ChaCha8Rng, max_dim: usize) -> Z4Form {
    use rand::Rng;
    let n = rng.gen_range(1..=max_dim);
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
            let diag = (0..n).map(|k| Z4::new(space.matrix().get(k, k) as i64 + 2 * rng.gen_range(0..2))).collect();
            return Z4Form::new(space, diag).unwrap();
        }
    }
}

/// `A₂`-translation acts simply transitively on the forms associated to a
/// given symplectic `e`: every such form is `q′ + e(α, ·)` for exactly one α.
#[test]
fn translations_act_simply_transitively() {
    for n in [2usize, 4] {
        let e = BitMatrix::from_fn(n, |i, j| i / 2 == j / 2 && i != j);
        let base = F2Form::from_matrix(e.clone(), 0).unwrap();
        for diag in 0..1u64 << n {
            let target = F2Form::from_matrix(e.clone(), diag).unwrap();
            let hits = (0..1u64 << n).filter(|&a| base.translate(a) == target).count();
            assert_eq!(hits, 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_changes_preserve_census(seed in any::<u64>(), which in 0usize..4) {
        let l = [gauss_zn(2).unwrap(), gauss_zn(3).unwrap(), gamma_2g(2).unwrap(), gamma_2g(4).unwrap()][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, u_inv) = random_unimodular(l.rank(), 12, &mut rng);
        let moved = change_basis(&l, &u, &u_inv).unwrap();
        prop_assert_eq!(classify(&moved), classify(&l));
        prop_assert_eq!(counts(&moved), counts(&l));
    }

    #[test]
    fn arf_of_translate_changes_by_q_of_alpha(diag in 0u64..256, alpha in 0u64..256) {
        // Arf(q′ + e(α,·)) = Arf(q′) + q′(α).
        let e = BitMatrix::from_fn(8, |i, j| i / 2 == j / 2 && i != j);
        let q = F2Form::from_matrix(e, diag).unwrap();
        prop_assert_eq!(arf(&q.translate(alpha)).unwrap(), arf(&q).unwrap() ^ q.eval(alpha));
    }
}
