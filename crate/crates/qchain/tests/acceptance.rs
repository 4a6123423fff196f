//! End-to-end acceptance suite. Each test covers one headline property of
//! the three diagonalization routes and prints a single summary line.

mod common;

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qchain::aba::BetheAnsatz;
use qchain::chain::{self, build_chain, hopping_matrix, spectral_data};
use qchain::correlation::{correlation_data, full_correlation, RegionSpec};
use qchain::heun::{aw_constants, heun_operator, heun_spectrum, projector, verify_aw};
use qchain::numerics::{commutator_residual, eig_dense_sym, eig_sym_tridiag, Mat, DEFAULT_EIG_TOL};
use qchain::qkernel::{self, ChainParams};
use qchain::tq::{solve_tq, tq_residual};

const SEED: u64 = 0x5eed_ace5;

/// Agreement with a printed 6-significant-digit value.
fn matches_six_digits(x: f64, printed: f64) {
    let mag = printed.abs().log10().floor() as i32;
    let half_ulp = 0.5001 * 10f64.powi(mag - 5);
    assert!(
        (x - printed).abs() <= half_ulp,
        "{x} does not round to the printed {printed} (allowed {half_ulp:e})"
    );
}

fn orthonormality_dev(phi: &Mat) -> f64 {
    let n = phi.size();
    let gram = phi.transpose().matmul(phi);
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev
}

#[test]
fn reference_table_reproduced_by_all_three_routes() {
    let start = Instant::now();
    // N = 49, q = 0.8, gamma = 0.5, beta = delta = 0, subsystem 0..=9,
    // 25 filled modes. Reference eigenvalues, most negative first.
    let printed_tq = [
        -778916.0, -592816.0, -444746.0, -327294.0, -234579.0, -161955.0, -105783.0, -63253.2,
        -32283.3, -11583.9,
    ];
    let printed_rho = [
        -778741.0, -592623.0, -444544.0, -327099.0, -234418.0, -161865.0, -105813.0, -63460.2,
        -32687.9, -11957.8,
    ];
    // the reference table prints -32283.6 in its numerical column at index 8
    // while its own TQ column prints -32283.3; both our routes agree on
    // -32283.26, so index 8 is asserted against the TQ column and only
    // loosely against the printed numerical value
    let printed_block = [
        -778916.0, -592816.0, -444746.0, -327294.0, -234579.0, -161955.0, -105783.0, -63253.2,
        -32283.3, -11583.9,
    ];

    let p = common::table1_params();
    let r = RegionSpec { l: 9, k: 24 };
    let m = build_chain(&p).unwrap();
    let spec = heun_spectrum(&heun_operator(&m, &r).unwrap()).unwrap();
    let tq = solve_tq(&p, &r).unwrap();
    let mut thermo = tq.thermo.clone();
    thermo.sort_by(f64::total_cmp);

    let loose = (spec.eig.values[8] - (-32283.6)).abs() / 32283.6;
    assert!(loose <= 2e-5, "index 8 strays from the printed -32283.6 by {loose:e}");

    for n in 0..=r.l {
        matches_six_digits(spec.eig.values[n], printed_block[n]);
        matches_six_digits(tq.lambdas[n], printed_tq[n]);
        matches_six_digits(thermo[n], printed_rho[n]);
        let dev_tq = (tq.lambdas[n] - spec.eig.values[n]).abs() / spec.eig.values[n].abs();
        assert!(dev_tq <= 1e-4, "n = {n}: TQ root deviates by {dev_tq:e}");
        let dev_rho = (thermo[n] - spec.eig.values[n]).abs() / spec.eig.values[n].abs();
        assert!(dev_rho <= 5e-2, "n = {n}: -rho_n deviates by {dev_rho:e}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 5.0, "took {elapsed:?}, budget 5 s");
    println!(
        "PASS reference table: 10 eigenvalues reproduced by all three routes in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn commutators_vanish_on_random_parameter_sets() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let sets = 20;
    let mut worst: f64 = 0.0;
    for trial in 0..sets {
        let p = common::random_valid_params(&mut rng, 30);
        let l = rand::Rng::gen_range(&mut rng, 1..p.n);
        let k = rand::Rng::gen_range(&mut rng, 1..p.n);
        let r = RegionSpec { l, k };
        let m = build_chain(&p).unwrap();
        let s = spectral_data(&m).unwrap();
        let h = heun_operator(&m, &r).unwrap();
        let data = correlation_data(&s, &r).unwrap();
        let chat = full_correlation(&s, r.k);
        let res = [
            commutator_residual(&h.t, &projector(p.n + 1, r.l)).unwrap(),
            commutator_residual(&h.t, chat.mat()).unwrap(),
            commutator_residual(h.t_block.mat(), data.c.mat()).unwrap(),
        ];
        for (name, &x) in ["[T, pi_A]", "[T, Chat]", "[T_block, C]"].iter().zip(&res) {
            assert!(
                x <= 1e-10,
                "trial {trial} (N = {}, L = {l}, K = {k}): {name} residual {x:e}",
                p.n
            );
            worst = worst.max(x);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 30.0, "took {elapsed:?}, budget 30 s");
    println!(
        "PASS commutators: {sets} random parameter sets, worst residual {worst:.3e} in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn hopping_spectrum_matches_closed_form() {
    let mut worst_spec: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for regime in ["generic", "beta0", "delta0", "both0"] {
        for n in [2usize, 5, 10, 20, 30] {
            let p = common::regime_params(regime, n);
            let m = build_chain(&p).unwrap();
            let dec = eig_sym_tridiag(&hopping_matrix(&m), DEFAULT_EIG_TOL).unwrap();
            let mut omegas: Vec<f64> = (0..=n).map(|k| qkernel::omega(&p, k)).collect();
            omegas.sort_by(f64::total_cmp);
            for (ev, om) in dec.values.iter().zip(&omegas) {
                let dev = (ev - om).abs() / om.abs().max(1.0);
                assert!(dev <= 1e-9, "{regime} N = {n}: eigenvalue off by {dev:e}");
                worst_spec = worst_spec.max(dev);
            }
            let s = spectral_data(&m).unwrap();
            let dev = orthonormality_dev(&s.phi);
            assert!(dev <= 1e-8, "{regime} N = {n}: orthonormality dev {dev:e}");
            worst_orth = worst_orth.max(dev);
        }
    }
    println!(
        "PASS spectrum: eigenvalues within {worst_spec:.3e} of the closed form, \
         orthonormality within {worst_orth:.3e}, N up to 30"
    );
}

#[test]
fn weights_normalized_and_match_eigenvectors() {
    let mut worst_sum: f64 = 0.0;
    let mut worst_cmp: f64 = 0.0;
    for regime in ["generic", "beta0", "delta0", "both0"] {
        for n in [5usize, 15, 30] {
            let p = common::regime_params(regime, n);
            let sum: f64 = (0..=n).map(|k| qkernel::weight(&p, k).unwrap().value()).sum();
            assert!((sum - 1.0).abs() <= 1e-10, "{regime} N = {n}: weight sum {sum}");
            worst_sum = worst_sum.max((sum - 1.0).abs());

            let m = build_chain(&p).unwrap();
            let dec = eig_sym_tridiag(&hopping_matrix(&m), DEFAULT_EIG_TOL).unwrap();
            let omegas: Vec<f64> = (0..=n).map(|k| qkernel::omega(&p, k)).collect();
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));
            for (pos, &k) in order.iter().enumerate() {
                let w = qkernel::weight(&p, k).unwrap().value();
                let oracle = dec.vectors[pos][0] * dec.vectors[pos][0];
                let dev = (w - oracle).abs();
                assert!(dev <= 1e-10, "{regime} N = {n}: W_{k} off the eigenvector by {dev:e}");
                worst_cmp = worst_cmp.max(dev);
            }
        }
    }
    println!(
        "PASS weights: normalization within {worst_sum:.3e}, eigenvector cross-check \
         within {worst_cmp:.3e} across four regimes"
    );
}

#[test]
fn operator_algebra_relations_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5);
    let sample = |rng: &mut ChaCha8Rng| {
        C64::new(rand::Rng::gen_range(rng, 0.5..1.4), rand::Rng::gen_range(rng, -0.5..0.5))
    };

    // cubic operator relations up to N = 30
    let mut worst_aw: f64 = 0.0;
    for regime in ["generic", "beta0", "delta0", "both0"] {
        for n in [3usize, 12, 30] {
            let p = common::regime_params(regime, n);
            let m = build_chain(&p).unwrap();
            let a = hopping_matrix(&m).to_mat();
            let astar = Mat::from_diag(&chain::astar_diagonal(&p, p.n));
            let (r1, r2) = verify_aw(&a, &astar, &aw_constants(&p), p.q);
            assert!(r1 <= 1e-9 && r2 <= 1e-9, "{regime} N = {n}: relations ({r1:e}, {r2:e})");
            worst_aw = worst_aw.max(r1).max(r2);
        }
    }

    // dynamical exchange relations in every regime
    let mut worst_dor1: f64 = 0.0;
    let mut worst_dor2: f64 = 0.0;
    for regime in ["generic", "beta0", "delta0", "both0"] {
        let p = common::regime_params(regime, 10);
        let m = build_chain(&p).unwrap();
        let r = RegionSpec { l: 3, k: 5 };
        let ansatz = BetheAnsatz::new(m, r).unwrap();
        for mm in [0i64, 1, 2] {
            let (u, v) = (sample(&mut rng), sample(&mut rng));
            let (d1, d2) = ansatz.verify_exchange(u, v, mm).unwrap();
            assert!(d1 <= 1e-9, "{regime} m = {mm}: first exchange residual {d1:e}");
            worst_dor1 = worst_dor1.max(d1);
            if let Some(d2) = d2 {
                assert!(d2 <= 1e-9, "{regime} m = {mm}: second exchange residual {d2:e}");
                worst_dor2 = worst_dor2.max(d2);
            }
        }
    }

    // the second relation and the transfer-matrix reconstruction need all
    // four deformation parameters nonzero
    let mut worst_rebuild: f64 = 0.0;
    for n in [6usize, 12] {
        let p = common::generic_params(n);
        let m = build_chain(&p).unwrap();
        let r = RegionSpec { l: 2, k: n / 2 };
        let h = heun_operator(&m, &r).unwrap();
        let ansatz = BetheAnsatz::new(m, r).unwrap();
        let u = sample(&mut rng);
        let (_, d2) = ansatz.verify_exchange(u, sample(&mut rng), 1).unwrap();
        let d2 = d2.expect("second exchange relation defined for generic parameters");
        assert!(d2 <= 1e-9, "N = {n}: second exchange residual {d2:e}");
        let (rebuild, _) = ansatz.heun_from_dyn_a(u, &h.t).unwrap();
        assert!(rebuild <= 1e-9, "N = {n}: reconstruction residual {rebuild:e}");
        worst_rebuild = worst_rebuild.max(rebuild).max(d2);
    }

    println!(
        "PASS operator algebra: cubic relations within {worst_aw:.3e}, exchange within \
         ({worst_dor1:.3e}, {worst_dor2:.3e}), reconstruction within {worst_rebuild:.3e}"
    );
}

#[test]
fn bethe_roots_close_the_free_fermion_problem() {
    let mut worst_all: f64 = 0.0;
    for (n, l, k) in [(12usize, 4usize, 6usize), (15, 5, 7), (15, 6, 9)] {
        let w = bethe_closure_case(n, l, k);
        worst_all = worst_all.max(w);
    }
    println!(
        "PASS Bethe closure: three configurations up to N = 15, worst deviation {worst_all:.3e}"
    );
}

/// Runs the closure checks for one chain size and region; returns the worst
/// deviation observed across all of them.
fn bethe_closure_case(n: usize, l: usize, k: usize) -> f64 {
    let p = ChainParams::truncated(0.8, 0.0, 0.5, 0.0, n, 1).unwrap();
    let r = RegionSpec { l, k };
    let m = build_chain(&p).unwrap();
    let s = spectral_data(&m).unwrap();
    let h = heun_operator(&m, &r).unwrap();
    let spec = heun_spectrum(&h).unwrap();
    let data = correlation_data(&s, &r).unwrap();
    let ansatz = BetheAnsatz::new(m, r).unwrap();
    let tq = solve_tq(&p, &r).unwrap();
    assert_eq!(tq.states.len(), r.l + 1);

    // correlation eigenvalue paired with each Heun eigenvector
    let dim = r.l + 1;
    let c_paired: Vec<f64> = (0..dim)
        .map(|j| {
            let v = &spec.eig.vectors[j];
            let mut out = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    out += v[a] * data.c.mat()[(a, b)] * v[b];
                }
            }
            out
        })
        .collect();

    let mut worst_defect: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    let mut worst_wf: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for (i, state) in tq.states.iter().enumerate() {
        let probe = C64::new(0.9, 0.2);
        for d in ansatz.bethe_residuals(&state.u, probe).unwrap() {
            assert!(d.norm() <= 1e-8, "state {i}: Bethe defect {:e}", d.norm());
            worst_defect = worst_defect.max(d.norm());
        }

        // eigenvector property of the operator-built state
        let vec = ansatz.bethe_vector(&state.u).unwrap();
        let lam = state.lambda;
        let size = vec.len();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for a in 0..size {
            let mut tv = C64::new(0.0, 0.0);
            for b in 0..size {
                tv += C64::new(h.t[(a, b)], 0.0) * vec[b];
            }
            num += (tv - lam * vec[a]).norm_sqr();
            den += vec[a].norm_sqr();
        }
        let res = (num / den).sqrt() / lam.norm().max(1.0);
        assert!(res <= 1e-7, "state {i}: T |u> residual {res:e}");

        // closed-form eigenvalue against the Heun block spectrum
        let lam2 = ansatz.lambda_eigen2(&state.u_big);
        let dev = (lam2.re - spec.eig.values[i]).abs() / spec.eig.values[i].abs();
        assert!(dev <= 1e-8, "state {i}: Lambda off the block spectrum by {dev:e}");
        worst_eig = worst_eig.max(dev);

        // closed-form wavefunction against the operator-built components
        let norm: f64 = vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for site in 0..size {
            let wf = if site <= r.l {
                ansatz.wavefunction_beta0(&state.u_big, site).unwrap()
            } else {
                C64::new(0.0, 0.0)
            };
            let dev = (wf - vec[site]).norm() / norm;
            assert!(dev <= 1e-8, "state {i}, site {site}: wavefunction off by {dev:e}");
            worst_wf = worst_wf.max(dev);
        }

        // correlation eigenvalue from the roots alone
        let c_val = ansatz.c_eigenvalue_beta0(state, &s).unwrap();
        let dev = (c_val - c_paired[i]).abs();
        assert!(dev <= 1e-8, "state {i}: c(u) off the C spectrum by {dev:e}");
        worst_c = worst_c.max(dev);
    }
    worst_defect.max(worst_eig).max(worst_wf).max(worst_c)
}

#[test]
fn entropy_is_physical_and_symmetric() {
    let p = common::generic_params(20);
    let m = build_chain(&p).unwrap();
    let s = spectral_data(&m).unwrap();

    // mode eigenvalues in [0, 1], entropy nonnegative
    let mut max_violation: f64 = 0.0;
    for (l, k) in [(4usize, 10usize), (9, 5), (14, 15)] {
        let r = RegionSpec { l, k };
        let data = correlation_data(&s, &r).unwrap();
        for &c in &data.c_eigs {
            max_violation = max_violation.max((-c).max(c - 1.0).max(0.0));
        }
        assert!(max_violation <= 1e-10, "mode eigenvalue outside [0, 1] by {max_violation:e}");
        assert!(data.entropy >= 0.0);
    }

    // all modes filled: the state is a product state, entropy exactly zero
    let chat_full = full_correlation(&s, p.n);
    for l in [4usize, 9] {
        let block = qchain::numerics::DenseSym::from_fn(l + 1, |i, j| chat_full.mat()[(i, j)]);
        let dec = eig_dense_sym(&block, DEFAULT_EIG_TOL).unwrap();
        let entropy = qchain::correlation::entanglement_entropy(&dec.values).unwrap();
        assert!(entropy.abs() <= 1e-10, "full filling entropy {entropy:e}");
    }

    // pure state: a region and its complement carry the same entropy
    let k = 10;
    let chat = full_correlation(&s, k);
    let mut worst_sym: f64 = 0.0;
    for l in [3usize, 9, 15] {
        let s_a = {
            let block = qchain::numerics::DenseSym::from_fn(l + 1, |i, j| chat.mat()[(i, j)]);
            let dec = eig_dense_sym(&block, DEFAULT_EIG_TOL).unwrap();
            qchain::correlation::entanglement_entropy(&dec.values).unwrap()
        };
        let s_b = {
            let rest = p.n - l;
            let block =
                qchain::numerics::DenseSym::from_fn(rest, |i, j| chat.mat()[(l + 1 + i, l + 1 + j)]);
            let dec = eig_dense_sym(&block, DEFAULT_EIG_TOL).unwrap();
            qchain::correlation::entanglement_entropy(&dec.values).unwrap()
        };
        let dev = (s_a - s_b).abs();
        assert!(dev <= 1e-8, "L = {l}: complement asymmetry {dev:e}");
        worst_sym = worst_sym.max(dev);
    }

    // flipping the overall hopping sign leaves the entropy unchanged
    let p_flip = ChainParams::truncated(p.q, p.beta, p.gamma, p.delta, p.n, -1).unwrap();
    let s_flip = spectral_data(&build_chain(&p_flip).unwrap()).unwrap();
    let mut worst_flip: f64 = 0.0;
    for (l, k) in [(4usize, 10usize), (9, 5)] {
        let r = RegionSpec { l, k };
        let a = correlation_data(&s, &r).unwrap().entropy;
        let b = correlation_data(&s_flip, &r).unwrap().entropy;
        let dev = (a - b).abs();
        assert!(dev <= 1e-12, "L = {l}, K = {k}: sign-flip changed the entropy by {dev:e}");
        worst_flip = worst_flip.max(dev);
    }

    println!(
        "PASS entropy: modes within [0, 1], zero at full filling, complement symmetric \
         within {worst_sym:.3e}, sign-flip invariant within {worst_flip:.3e}"
    );
}

#[test]
fn tq_functional_identity_holds_on_samples() {
    let p = common::table1_params();
    let r = RegionSpec { l: 9, k: 24 };
    let tq = solve_tq(&p, &r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x8);
    let mut samples: Vec<C64> = (0..19)
        .map(|_| {
            C64::new(rand::Rng::gen_range(&mut rng, 0.2..2.0), rand::Rng::gen_range(&mut rng, -1.0..1.0))
        })
        .collect();
    samples.push(C64::new(0.0, 0.0));
    let mut worst: f64 = 0.0;
    for (i, state) in tq.states.iter().enumerate() {
        let res = tq_residual(&p, &r, state, &samples);
        assert!(res <= 1e-8, "state {i}: functional identity residual {res:e}");
        worst = worst.max(res);
    }
    println!(
        "PASS TQ identity: {} states checked at 20 sample points, worst residual {worst:.3e}",
        tq.states.len()
    );
}
