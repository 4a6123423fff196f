//! Independent oracles for the numeric kernels: double-double arithmetic for
//! products and recurrence coefficients, brute-force enumeration for
//! symmetric polynomials, and the eigensolver as the reference for the
//! orthonormality weights.

mod common;

use common::{dd_coeff_a, dd_coeff_c, dd_product, dd_qpochhammer, Dd};
use num_complex::Complex64 as C64;
use qchain::chain::{build_chain, hopping_matrix};
use qchain::numerics::{eig_sym_tridiag, elementary_symmetric, log_product, DEFAULT_EIG_TOL};
use qchain::qkernel::{self, ChainParams};

#[test]
fn qpochhammer_matches_double_double() {
    for (a, q, n) in [(0.3, 0.5, 4usize), (0.9, 0.8, 12), (-1.7, 0.6, 9), (2.5, 0.95, 20)] {
        let lib = qkernel::qpochhammer(a, q, n).value();
        let oracle = dd_qpochhammer(Dd::from(a), Dd::from(q), n).value();
        assert!(
            (lib - oracle).abs() <= 1e-13 * oracle.abs().max(1e-300),
            "({a}; {q})_{n}: {lib} vs {oracle}"
        );
    }
}

#[test]
fn log_product_matches_double_double_at_extreme_magnitude() {
    // 60 factors of magnitude ~1e5: the direct product reaches ~1e300
    let factors: Vec<f64> = (0..60)
        .map(|i| 1.0e5 * (1.0 + 1e-3 * i as f64) * if i % 7 == 0 { -1.0 } else { 1.0 })
        .collect();
    let lib = log_product(&factors).value();
    let oracle = dd_product(factors.iter().map(|&f| Dd::from(f))).value();
    assert!((lib - oracle).abs() <= 1e-12 * oracle.abs(), "{lib} vs {oracle}");
}

#[test]
fn racah_coefficients_match_double_double() {
    for p in [
        common::generic_params(8),
        common::regime_params("beta0", 8),
        ChainParams::truncated(0.8, 0.0, 0.5, 0.0, 9, 1).unwrap(),
    ] {
        let rc = qkernel::racah_coeffs(&p).unwrap();
        for n in 0..p.n {
            let oa = dd_coeff_a(&p, n as i32).value();
            let oc = dd_coeff_c(&p, n as i32 + 1).value();
            assert!(
                (rc.a[n] - oa).abs() <= 1e-12 * oa.abs().max(1.0),
                "A_{n}: {} vs {oa}",
                rc.a[n]
            );
            assert!(
                (rc.c[n + 1] - oc).abs() <= 1e-12 * oc.abs().max(1.0),
                "C_{}: {} vs {oc}",
                n + 1,
                rc.c[n + 1]
            );
        }
        // truncation: the library returns an exact zero at the boundary
        assert_eq!(rc.a[p.n], 0.0);
        assert!(dd_coeff_a(&p, p.n as i32).value().abs() <= 1e-10);
    }
}

#[test]
fn weights_match_eigenvector_components() {
    for regime in ["generic", "beta0", "delta0", "both0"] {
        let p = common::regime_params(regime, 10);
        let m = build_chain(&p).unwrap();
        let dec = eig_sym_tridiag(&hopping_matrix(&m), DEFAULT_EIG_TOL).unwrap();
        let omegas: Vec<f64> = (0..=p.n).map(|k| qkernel::omega(&p, k)).collect();
        let mut order: Vec<usize> = (0..=p.n).collect();
        order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));
        for (pos, &k) in order.iter().enumerate() {
            let w = qkernel::weight(&p, k).unwrap().value();
            let oracle = dec.vectors[pos][0] * dec.vectors[pos][0];
            assert!(
                (w - oracle).abs() <= 1e-12,
                "{regime} W_{k}: {w:e} vs eigenvector {oracle:e}"
            );
        }
    }
}

#[test]
fn weights_sum_to_one_in_all_regimes() {
    for regime in ["generic", "beta0", "delta0", "both0"] {
        let p = common::regime_params(regime, 12);
        let sum: f64 = (0..=p.n).map(|k| qkernel::weight(&p, k).unwrap().value()).sum();
        assert!((sum - 1.0).abs() <= 1e-10, "{regime}: sum = {sum}");
    }
}

#[test]
fn elementary_symmetric_matches_subset_enumeration() {
    let vals = [
        C64::new(0.3, 0.7),
        C64::new(-1.2, 0.1),
        C64::new(0.8, -0.4),
        C64::new(2.1, 0.0),
        C64::new(-0.5, -0.9),
    ];
    let lib = elementary_symmetric(&vals);
    for r in 0..=vals.len() {
        let mut brute = C64::new(0.0, 0.0);
        // iterate bitmasks with exactly r set bits
        for mask in 0u32..(1 << vals.len()) {
            if mask.count_ones() as usize != r {
                continue;
            }
            let mut prod = C64::new(1.0, 0.0);
            for (i, v) in vals.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod *= v;
                }
            }
            brute += prod;
        }
        assert!((lib[r] - brute).norm() <= 1e-13 * brute.norm().max(1.0), "S_{r}");
    }
}

#[test]
fn table1_weights_lie_in_unit_interval() {
    let p = common::table1_params();
    for k in 0..=p.n {
        let w = qkernel::weight(&p, k).unwrap().value();
        assert!(w > 0.0 && w < 1.0, "W_{k} = {w:e}");
    }
}
