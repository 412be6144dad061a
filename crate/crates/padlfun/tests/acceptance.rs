//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured runtime. Correctness is asserted unconditionally;
//! the stated runtime budgets are asserted in optimized builds only
//! (run `cargo test --release` for the timed gate).

use std::time::Instant;

use padlfun::arith::{ord_p_rat, rat, zeta_neg, Rat};
use padlfun::eisenstein::{
    build_family, character_orthogonality, elliptic_eisenstein, eval_family, p_regular_coeff,
    singular_series_m1, twist_average_check, HalfIntMatrix, LocalDensity,
};
use padlfun::lambda::{weierstrass_prepare, DistinguishedPoly, IwasawaSeries};
use padlfun::mass::{mass_constant, mass_identity_rank8, mass_table};
use padlfun::measures::{
    iwasawa_series, kl_zeta, moment_exact, riemann_moment, zetap_table, SeriesMethod, SeriesParams,
};
use padlfun::padic::t_coordinate;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

fn check_budget(name: &str, start: Instant, seconds: u64) {
    let elapsed = start.elapsed();
    println!("ACCEPTANCE {name}: PASS ({elapsed:.2?}, budget {seconds}s)");
    #[cfg(not(debug_assertions))]
    assert!(
        elapsed.as_secs() < seconds,
        "{name} exceeded the {seconds}s budget: {elapsed:.2?}"
    );
}

/// Criterion 1: the p = 37 reciprocal-zeta table, byte-exact, < 5 s.
#[test]
fn criterion_1_zetap_table_37() {
    let start = Instant::now();
    let golden: [(u32, &str); 18] = [
        (2, "25 + 24*37 + 24*37^2 + 24*37^3 + 24*37^4 + O(37^5)"),
        (4, "9 + 3*37 + 9*37^3 + 3*37^4 + O(37^5)"),
        (6, "7 + 30*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)"),
        (8, "18 + 6*37 + O(37^5)"),
        (10, "16 + 33*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)"),
        (12, "8 + 25*37 + 28*37^2 + 23*37^3 + O(37^5)"),
        (14, "25 + 36*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)"),
        (16, "6 + 16*37 + 31*37^2 + 29*37^3 + 20*37^4 + O(37^5)"),
        (18, "3 + 4*37 + 10*37^2 + 32*37^3 + 25*37^4 + O(37^5)"),
        (20, "11 + 13*37 + 19*37^2 + 36*37^3 + 12*37^4 + O(37^5)"),
        (22, "1 + 26*37 + 15*37^2 + 35*37^3 + 9*37^4 + O(37^5)"),
        (24, "16 + 28*37 + 24*37^2 + 27*37^3 + 31*37^4 + O(37^5)"),
        (26, "4 + 17*37 + 25*37^2 + 25*37^3 + 19*37^4 + O(37^5)"),
        (28, "22 + 36*37 + 8*37^2 + 4*37^3 + 33*37^4 + O(37^5)"),
        (30, "22 + 5*37 + 35*37^2 + 9*37^3 + 5*37^4 + O(37^5)"),
        (32, "36*37^-1 + 28 + 3*37 + 19*37^2 + 18*37^3 + O(37^4)"),
        (34, "20 + 37 + 30*37^2 + 15*37^3 + 22*37^4 + O(37^5)"),
        (36, "36*37 + 29*37^2 + 35*37^3 + 5*37^4 + 37^5 + O(37^6)"),
    ];
    let rows = zetap_table(37, 5, 36).expect("table builds with both routes agreeing");
    assert_eq!(rows.len(), golden.len());
    for ((two_k, value), (g_two_k, g_str)) in rows.iter().zip(&golden) {
        assert_eq!(two_k, g_two_k);
        assert_eq!(&value.to_pari_string(), g_str, "row {two_k}");
    }
    check_budget("1 (p=37 table)", start, 5);
}

/// Criterion 2: mass constants and the ten factored table rows, < 60 s.
#[test]
fn criterion_2_mass_constants_and_table() {
    let start = Instant::now();
    assert_eq!(mass_constant(4), rat(1, 696729600));
    assert_eq!(
        mass_constant(8),
        Rat::new(BigInt::from(691), "277667181515243520000".parse().unwrap())
    );
    let golden: [(u32, &str); 10] = [
        (2, "1"),
        (4, "1"),
        (6, "1"),
        (8, "[691, 1]"),
        (10, "[691, 1; 3617, 1; 43867, 1]"),
        (12, "[131, 1; 283, 1; 593, 1; 617, 1; 691, 2; 3617, 1; 43867, 1]"),
        (14, "[103, 1; 131, 1; 283, 1; 593, 1; 617, 1; 691, 1; 3617, 1; 43867, 1; 657931, 1; 2294797, 1]"),
        (16, "[103, 1; 131, 1; 283, 1; 593, 1; 617, 1; 691, 1; 1721, 1; 3617, 2; 9349, 1; 43867, 1; 362903, 1; 657931, 1; 2294797, 1; 1001259881, 1]"),
        (18, "[37, 1; 103, 1; 131, 1; 283, 1; 593, 1; 617, 1; 683, 1; 691, 1; 1721, 1; 3617, 1; 9349, 1; 43867, 2; 362903, 1; 657931, 1; 2294797, 1; 305065927, 1; 1001259881, 1; 151628697551, 1]"),
        (20, "[103, 1; 131, 1; 283, 2; 593, 1; 617, 2; 683, 1; 691, 1; 1721, 1; 3617, 1; 9349, 1; 43867, 1; 362903, 1; 657931, 1; 2294797, 1; 305065927, 1; 1001259881, 1; 151628697551, 1; 154210205991661, 1; 26315271553053477373, 1]"),
    ];
    let rows = mass_table(20, true).expect("factorizations complete");
    assert_eq!(rows.len(), golden.len());
    for (row, (label, gp)) in rows.iter().zip(&golden) {
        assert_eq!(row.label, *label);
        assert_eq!(row.denominator_factors.to_gp_string(), *gp, "label {label}");
        // every factor passes primality and the product reconstructs
        assert_eq!(
            &row.denominator_factors.product(),
            row.reciprocal.denom().magnitude(),
        );
    }
    check_budget("2 (mass constants + factor table)", start, 60);
}

/// Criterion 3: Main-Theorem interpolation for p in {5,7}, m=1,
/// h in {1,2,3,4,6}: three held-out weights per branch, mod p^{N'},
/// N' >= 6, < 120 s.
#[test]
fn criterion_3_main_theorem_families() {
    let start = Instant::now();
    let params = SeriesParams::default(); // D = 16, N = 12
    let mut families = 0usize;
    for p in [5u64, 7] {
        let branches: Vec<i64> = (1..=(p as i64 - 1) / 2).map(|r| 2 * r).collect();
        for h_idx in [1u64, 2, 3, 4, 6] {
            if (2 * h_idx) % p == 0 {
                continue;
            }
            let h = HalfIntMatrix::genus1(h_idx).unwrap();
            let density = LocalDensity::divisor_sum_m1(h_idx);
            for &k0 in &branches {
                let fam = build_family(&h, p, None, k0, &density, params)
                    .expect("family builds and self-verifies");
                // regular primes: no spurious zeros, so evaluation never poles
                assert_eq!(fam.denominator.degree(), 0, "p={p} h={h_idx} k0={k0}");
                // three held-out weights beyond the interpolation grid
                let r_nodes = params.node_count() as i64;
                let step = p as i64 - 1;
                let mut k_min = k0.rem_euclid(step);
                while k_min <= 2 || k_min % 2 != 0 {
                    k_min += step;
                }
                for r in [r_nodes, r_nodes + 1, r_nodes + 2] {
                    let k = k_min + r * step;
                    let via_family = eval_family(&fam, k).unwrap();
                    let direct = p_regular_coeff(&h, k as u32, p, &density, params.n).unwrap();
                    let n_prime = via_family
                        .abs_precision()
                        .unwrap()
                        .min(direct.abs_precision().unwrap());
                    assert!(n_prime >= 6, "N' = {n_prime} < 6 at p={p} h={h_idx} k={k}");
                    assert!(
                        via_family.congruent(&direct, n_prime),
                        "p={p} h={h_idx} k={k}: {} vs {}",
                        via_family.to_pari_string(),
                        direct.to_pari_string()
                    );
                }
                families += 1;
            }
        }
    }
    assert_eq!(families, 2 * 5 + 3 * 5);
    check_budget("3 (Main-Theorem interpolation)", start, 120);
}

/// Criterion 4: Mazur-measure stack: Riemann moments, Kummer congruences,
/// c-independence of the Kubota-Leopoldt values.
#[test]
fn criterion_4_mazur_measure_stack() {
    let start = Instant::now();
    // riemann_moment == moment_exact mod p^{v-1}
    for p in [5u64, 7] {
        for c in [2u64, 3] {
            for k in [2u32, 4, 6, 8, 10, 12] {
                for v in 1..=4u32 {
                    let exact = moment_exact(p, c, k);
                    let approx = riemann_moment(p, c, k, v).unwrap();
                    let diff = exact - approx;
                    assert!(
                        diff.is_zero() || ord_p_rat(&diff, p).unwrap() >= v as i64 - 1,
                        "p={p} c={c} k={k} v={v}"
                    );
                }
            }
        }
    }
    // Kummer congruences mod p^v, v <= 3
    for p in [5u64, 7] {
        for v in 1..=3u32 {
            let step = ((p - 1) * p.pow(v - 1)) as u32;
            for k in [2u32, 4, 6, 8, 10] {
                if k as u64 % (p - 1) == 0 {
                    continue;
                }
                let reg =
                    |k: u32| zeta_neg(k) * (Rat::one() - Rat::from(BigInt::from(p).pow(k - 1)));
                let diff = reg(k) - reg(k + step);
                assert!(
                    diff.is_zero() || ord_p_rat(&diff, p).unwrap() >= v as i64,
                    "p={p} v={v} k={k}"
                );
            }
        }
    }
    // kl_zeta values independent of c
    let params = SeriesParams::new(8, 8);
    for p in [5u64, 7] {
        for k in [4i64, 6, 8] {
            let t0 = t_coordinate(k - 1, p, params.n);
            let v2 = kl_zeta(p, 2, k - 1, &t0, params).unwrap();
            let v3 = kl_zeta(p, 3, k - 1, &t0, params).unwrap();
            let abs = v2.abs_precision().unwrap().min(v3.abs_precision().unwrap());
            assert!(v2.congruent(&v3, abs), "p={p} k={k}");
        }
    }
    check_budget("4 (Mazur measure stack)", start, 120);
}

/// Criterion 5: 100 random Weierstrass round trips; lambda of the p=37
/// omega^31 branch equals 1; all p=5 branches have lambda 0.
#[test]
fn criterion_5_weierstrass_and_lambda_invariants() {
    let start = Instant::now();
    let p = 5u64;
    let n = 8u32;
    let d = 12usize;
    let mut seed = 0xdeadbeefcafef00du64;
    let mut rng = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        seed
    };
    for case in 0..100 {
        let lam = (rng() % 4) as usize;
        let mut pc: Vec<BigUint> = (0..lam)
            .map(|_| BigUint::from(p) * BigUint::from(rng() % 78125))
            .collect();
        pc.push(BigUint::one());
        let p0 = DistinguishedPoly::new(p, n, pc).unwrap();
        let mut uc: Vec<BigUint> = (0..d).map(|_| BigUint::from(rng() % 390625)).collect();
        if (&uc[0] % p).is_zero() {
            uc[0] += 1u32;
        }
        uc.resize(d + lam, BigUint::zero());
        let u0 = IwasawaSeries::from_biguints(p, n, uc);
        let g = p0.as_series(d + lam).unwrap().mul(&u0);
        let pr = weierstrass_prepare(&g).unwrap();
        assert_eq!(pr.mu, 0, "case {case}");
        assert_eq!(pr.poly.degree(), lam, "case {case}");
        for i in 0..=lam {
            assert_eq!(
                pr.poly.raw_coeffs()[i],
                p0.raw_coeffs()[i],
                "case {case} coefficient {i}"
            );
        }
    }
    // irregular pair (37, 32): branch omega^31 has a single zero
    let params = SeriesParams::new(6, 6);
    let b = iwasawa_series(37, 31, 2, params, SeriesMethod::Interpolation).unwrap();
    assert_eq!(b.lambda(), Some(1));
    // regular p = 5: every odd branch has lambda 0 (even branches vanish)
    for j in [1i64, 3] {
        let b = iwasawa_series(5, j, 2, params, SeriesMethod::Interpolation).unwrap();
        assert_eq!(b.lambda(), Some(0), "branch {j}");
    }
    for j in [0i64, 2] {
        let b = iwasawa_series(5, j, 2, params, SeriesMethod::Interpolation).unwrap();
        assert!(b.series.is_zero_mod_precision(), "branch {j}");
    }
    check_budget(
        "5 (Weierstrass round trips + lambda invariants)",
        start,
        120,
    );
}

/// Criterion 6: genus-1 geometric identities: singular series within the
/// tail bound, twist averages at 1e-9, exact character orthogonality.
#[test]
fn criterion_6_geometric_identities() {
    let start = Instant::now();
    for h in 1..=6u64 {
        for k in [4u32, 6] {
            let r = singular_series_m1(h, k, 150).unwrap();
            assert!(
                (r.value - r.closed_form).abs() <= r.tail_bound,
                "h={h} k={k}: {} vs {} (tail {})",
                r.value,
                r.closed_form,
                r.tail_bound
            );
        }
    }
    // twist averages on truncated E_4 and E_6 at p = 5 (cutoffs keep the
    // exact coefficient magnitudes inside f64 roundoff at 1e-9)
    let e4 = elliptic_eisenstein(4, 8).unwrap();
    let r = twist_average_check(&e4, 4, 5, 8, 1e-9).unwrap();
    assert!(r.pass, "E4 discrepancy {}", r.max_discrepancy);
    let e6 = elliptic_eisenstein(6, 6).unwrap();
    let r = twist_average_check(&e6, 6, 5, 6, 1e-9).unwrap();
    assert!(r.pass, "E6 discrepancy {}", r.max_discrepancy);
    // exact orthogonality
    for p in [5u64, 7] {
        let r = character_orthogonality(p, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.cases_checked, ((p - 1) * (p - 1)) as usize);
    }
    check_budget("6 (geometric identities)", start, 120);
}

/// Criterion 7: rank-8 mass identity: Theta_{E8} = E_4 up to q^8 and
/// 1/m_4 = |Aut(E8)| = 696729600, < 10 s.
#[test]
fn criterion_7_rank8_mass_identity() {
    let start = Instant::now();
    let report = mass_identity_rank8(8).unwrap();
    assert!(report.coefficients_match);
    assert!(report.automorphism_count_matches);
    assert_eq!(report.checked_up_to, 8);
    check_budget("7 (rank-8 mass identity)", start, 10);
}

/// Criterion 8: genus-2 coefficients have no external desk-scale oracle;
/// the internal dual-route consistency substitutes (asserted here), and
/// nothing beyond the primary component is claimed.
#[test]
fn criterion_8_genus2_internal_consistency_substitute() {
    let start = Instant::now();
    let params = SeriesParams::new(8, 8);
    // (3,0,3) has discriminant -36 = -4 * 3^2, exercising square part f = 3
    for (a, b, c) in [(1i64, 0, 1), (1, 1, 1), (3, 0, 3)] {
        let h = HalfIntMatrix::genus2(a, b, c).unwrap();
        let density = LocalDensity::one();
        let fam = build_family(&h, 5, None, 2, &density, params).unwrap();
        for k in [6i64, 10] {
            let via_family = eval_family(&fam, k).unwrap();
            let direct = p_regular_coeff(&h, k as u32, 5, &density, params.n).unwrap();
            let abs = via_family
                .abs_precision()
                .unwrap()
                .min(direct.abs_precision().unwrap());
            assert!(via_family.congruent(&direct, abs), "h=({a},{b},{c}) k={k}");
        }
    }
    println!(
        "ACCEPTANCE 8: genus-2 checked by the internal dual route; \
         external genus-2 oracles and the lifting machinery are out of scope"
    );
    check_budget("8 (genus-2 dual-route substitute)", start, 120);
}
