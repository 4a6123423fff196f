//! Chain construction: couplings J_n and fields mu_n from the q-Racah
//! recurrence coefficients, the one-particle hopping matrix, the diagonal
//! position operator, and the analytic spectral data (omega_k, phi_n(omega_k)).

use crate::error::{Error, Result};
use crate::numerics::{Mat, SymTridiag};
use crate::qkernel::{self, ChainParams, RacahCoeffs};

pub const DEFAULT_ORTHO_TOL: f64 = 1e-8;

/// Outcome of parameter validation; empty iff the parameters define a valid
/// chain.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for v in &self.violations {
                writeln!(f, "- {v}")?;
            }
            Ok(())
        }
    }
}

/// Checks the defining requirements: A_n C_{n+1} > 0 for interior n, J_N = 0
/// at the boundary, and no singular denominators.
pub fn validate(p: &ChainParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let rc = match qkernel::racah_coeffs(p) {
        Ok(rc) => rc,
        Err(e) => {
            report.violations.push(e.to_string());
            return report;
        }
    };
    let mut scale: f64 = 0.0;
    for n in 0..p.n {
        let prod = rc.a[n] * rc.c[n + 1];
        scale = scale.max(prod.abs());
        if prod <= 0.0 {
            report
                .violations
                .push(format!("A_n*C_(n+1) = {prod:e} is not positive at n = {n}"));
        }
    }
    let boundary = rc.a[p.n] * rc.c[p.n + 1];
    if boundary.abs() > 1e-10 * scale.max(1.0) {
        report
            .violations
            .push(format!("J_N != 0: A_N*C_(N+1) = {boundary:e} (truncation violated)"));
    }
    report
}

/// A validated chain: couplings J_n (index 0..N-1, with J_N = 0 implied) and
/// fields mu_n (index 0..N).
#[derive(Debug, Clone)]
pub struct ChainModel {
    pub params: ChainParams,
    pub coeffs: RacahCoeffs,
    pub j: Vec<f64>,
    pub mu: Vec<f64>,
}

pub fn build_chain(p: &ChainParams) -> Result<ChainModel> {
    let report = validate(p);
    if !report.is_valid() {
        return Err(Error::Validation { report: report.to_string() });
    }
    let rc = qkernel::racah_coeffs(p)?;
    let sign = p.hop_sign as f64;
    let j: Vec<f64> = (0..p.n)
        .map(|n| sign * (rc.a[n] * rc.c[n + 1]).sqrt())
        .collect();
    let shift = 1.0 + p.gamma * p.delta * p.q;
    let mu: Vec<f64> = (0..=p.n).map(|n| rc.a[n] + rc.c[n] - shift).collect();
    Ok(ChainModel { params: *p, coeffs: rc, j, mu })
}

/// One-particle hopping matrix: diag -mu_n, off-diagonal J_n.
pub fn hopping_matrix(m: &ChainModel) -> SymTridiag {
    SymTridiag::new(m.mu.iter().map(|x| -x).collect(), m.j.clone())
}

/// Diagonal of the position operator, entries lambda_n for n = 0..=n_max.
pub fn astar_diagonal(p: &ChainParams, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| qkernel::lambda_pos(p, n)).collect()
}

/// Analytic one-particle spectrum: eigenvalues omega_k and the orthonormal
/// wavefunction matrix phi[(n, k)] = phi_n(omega_k).
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub omegas: Vec<f64>,
    /// (N+1) x (N+1); row n, column k.
    pub phi: Mat,
}

pub fn spectral_data(m: &ChainModel) -> Result<SpectralData> {
    spectral_data_with_tol(m, DEFAULT_ORTHO_TOL)
}

/// phi_n(omega_k) = eps^n sqrt(W_k) prod_{j=1}^n (A_{j-1}/sqrt(A_{j-1} C_j))
/// R_n(omega_k), with the weight and coupling-ratio prefactors accumulated in
/// log space.
///
/// The three-term recurrence for R_n is numerically unstable in n and loses
/// several digits already around N = 10, so the returned columns come from
/// the QL eigendecomposition of the hopping matrix. The closed-form column is
/// still computed for every k: it anchors the overall sign of each
/// eigenvector and each analytic eigenvalue omega_k must agree with the
/// matched numerical eigenvalue.
pub fn spectral_data_with_tol(m: &ChainModel, tol: f64) -> Result<SpectralData> {
    let p = &m.params;
    let nn = p.n;
    let rc = &m.coeffs;

    // cumulative prefactor prod_{j=1}^n A_{j-1}/sqrt(A_{j-1} C_j), split into
    // half-log magnitude and sign. A_{j-1} and C_j may both be negative with
    // a positive product, in which case the prefactor carries a sign flip
    // that the plain square-root ratio would miss.
    let mut half_log_ratio = vec![0.0f64; nn + 1];
    let mut ratio_sign = vec![1.0f64; nn + 1];
    for j in 1..=nn {
        let ratio = rc.a[j - 1] / rc.c[j];
        if !(ratio > 0.0) {
            return Err(Error::ParameterDomain {
                index: j as i64,
                what: format!("A_(j-1)/C_j = {ratio:e} not positive"),
            });
        }
        half_log_ratio[j] = half_log_ratio[j - 1] + 0.5 * ratio.ln();
        ratio_sign[j] = ratio_sign[j - 1] * rc.a[j - 1].signum();
    }

    let sign = p.hop_sign as f64;
    let mut seed = Mat::zeros(nn + 1);
    let mut omegas = Vec::with_capacity(nn + 1);
    for k in 0..=nn {
        omegas.push(qkernel::omega(p, k));
        let w = qkernel::weight(p, k)?;
        if w.sign <= 0 {
            return Err(Error::ParameterDomain {
                index: k as i64,
                what: format!("weight W_k = {:e} not positive", w.value()),
            });
        }
        let row = qkernel::racah_poly_row(p, rc, k)?;
        for n in 0..=nn {
            let log_pref = 0.5 * w.log_magnitude + half_log_ratio[n];
            let eps_n = if n % 2 == 0 { 1.0 } else { sign };
            seed[(n, k)] = eps_n * ratio_sign[n] * log_pref.exp() * row[n];
        }
    }

    // pair each analytic omega_k with a numerical eigenpair of the hopping
    // matrix: sort the omegas, walk the ascending eigenvalues in lockstep
    let dec = crate::numerics::eig_sym_tridiag(&hopping_matrix(m), crate::numerics::DEFAULT_EIG_TOL)?;
    let mut order: Vec<usize> = (0..=nn).collect();
    order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));
    let mut phi = Mat::zeros(nn + 1);
    for (pos, &k) in order.iter().enumerate() {
        let dev = (dec.values[pos] - omegas[k]).abs();
        if dev > 1e-8 * omegas[k].abs().max(1.0) {
            return Err(Error::ParameterDomain {
                index: k as i64,
                what: format!(
                    "omega_k = {:e} does not match any hopping eigenvalue (closest {:e})",
                    omegas[k], dec.values[pos]
                ),
            });
        }
        let dot: f64 = (0..=nn).map(|n| seed[(n, k)] * dec.vectors[pos][n]).sum();
        let s = if dot < 0.0 { -1.0 } else { 1.0 };
        for n in 0..=nn {
            phi[(n, k)] = s * dec.vectors[pos][n];
        }
    }

    check_orthonormality(&phi, tol)?;
    Ok(SpectralData { omegas, phi })
}

fn check_orthonormality(phi: &Mat, tol: f64) -> Result<()> {
    let n = phi.size();
    let mut worst = (0usize, 0usize, 0.0f64);
    for transpose_first in [false, true] {
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n)
                    .map(|t| {
                        if transpose_first {
                            phi[(t, a)] * phi[(t, b)]
                        } else {
                            phi[(a, t)] * phi[(b, t)]
                        }
                    })
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                let dev = (dot - target).abs();
                if dev > worst.2 {
                    worst = (a, b, dev);
                }
            }
        }
    }
    if worst.2 > tol {
        return Err(Error::Orthonormality { i: worst.0, j: worst.1, dev: worst.2, tol });
    }
    Ok(())
}
