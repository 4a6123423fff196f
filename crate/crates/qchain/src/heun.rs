//! The commuting tridiagonal (Heun) operator
//! T = {A, A*} - (lambda_L + lambda_{L+1}) A - (omega_K + omega_{K+1}) A*,
//! its restriction to the subsystem block, and the Askey-Wilson algebra
//! relations satisfied by A and A*.

use crate::chain::{self, ChainModel};
use crate::correlation::RegionSpec;
use crate::error::{Error, Result};
use crate::numerics::{
    commutator_residual, eig_sym_tridiag, DenseSym, EigenDecomp, Mat, SymTridiag, DEFAULT_EIG_TOL,
};
use crate::qkernel::{self, ChainParams};

pub const PROJECTOR_COMM_TOL: f64 = 1e-12;

/// The Heun operator as a dense matrix together with its subsystem block.
#[derive(Debug, Clone)]
pub struct HeunData {
    pub t: Mat,
    pub t_block: DenseSym,
    pub region: RegionSpec,
}

/// Builds T from the hopping matrix and the position diagonal. Since A is
/// tridiagonal and A* diagonal,
///   T_{nm} = A_{nm} (lambda_n + lambda_m - lambda_L - lambda_{L+1})
///            - (omega_K + omega_{K+1}) lambda_n delta_{nm},
/// which vanishes on the (L, L+1) bond, so T is block diagonal with respect
/// to the subsystem split.
pub fn heun_operator(m: &ChainModel, r: &RegionSpec) -> Result<HeunData> {
    let p = &m.params;
    let nn = p.n;
    r.check(nn)?;
    let lam = chain::astar_diagonal(p, nn);
    let lam_shift = qkernel::lambda_pos(p, r.l) + qkernel::lambda_pos(p, r.l + 1);
    let om_shift = qkernel::omega(p, r.k) + qkernel::omega(p, r.k + 1);

    let a = chain::hopping_matrix(m);
    let mut t = Mat::zeros(nn + 1);
    for n in 0..=nn {
        t[(n, n)] = a.diag[n] * (2.0 * lam[n] - lam_shift) - om_shift * lam[n];
        if n + 1 <= nn {
            let v = a.offdiag[n] * (lam[n] + lam[n + 1] - lam_shift);
            t[(n, n + 1)] = v;
            t[(n + 1, n)] = v;
        }
    }

    let proj = projector(nn + 1, r.l);
    let res = commutator_residual(&t, &proj)?;
    if res > PROJECTOR_COMM_TOL {
        return Err(Error::Domain(format!(
            "[T, pi_A] residual {res:e} exceeds {PROJECTOR_COMM_TOL:e}: construction inconsistent"
        )));
    }

    let t_block = DenseSym::symmetrized(t.block(r.l + 1));
    Ok(HeunData { t, t_block, region: *r })
}

/// Projector onto sites 0..=l.
pub fn projector(size: usize, l: usize) -> Mat {
    Mat::from_fn(size, |i, j| if i == j && i <= l { 1.0 } else { 0.0 })
}

/// Askey-Wilson structure constants.
#[derive(Debug, Clone, Copy)]
pub struct AWConstants {
    pub chi: f64,
    pub chi_star: f64,
    pub xi: f64,
    pub eta: f64,
    pub eta_star: f64,
}

pub fn aw_constants(p: &ChainParams) -> AWConstants {
    let (q, al, be, ga, de) = (p.q, p.alpha, p.beta, p.gamma, p.delta);
    let q2m1 = q * q - 1.0;
    let qm1 = q - 1.0;
    AWConstants {
        chi: -ga * de * q2m1 * q2m1 / q,
        chi_star: -al * be * q2m1 * q2m1 / q,
        xi: -qm1 * qm1
            * (al * (be * de + be + ga + 1.0) + ga * (be * de + de + 1.0) + be * de),
        eta: qm1 * qm1
            * (q + 1.0)
            * (al * ga * (be * de + de + 1.0) + al * be * de + ga * de * (be * de + be + ga + 1.0)),
        eta_star: qm1 * qm1
            * (q + 1.0)
            * (al * al * be + al * (be * be * de + be * (ga + 1.0) * (de + 1.0) + ga) + be * ga * de),
    }
}

/// Frobenius residuals of the two Askey-Wilson relations, normalized by the
/// norm of the cubic term.
pub fn verify_aw(a: &Mat, astar: &Mat, c: &AWConstants, q: f64) -> (f64, f64) {
    let id = Mat::identity(a.size());
    let coeff = q + 1.0 / q;

    let rel = |x: &Mat, y: &Mat, lin_x: f64, lin_y: f64, cst: f64| -> f64 {
        let xxy = x.matmul(&x.matmul(y));
        let xyx = x.matmul(&y.matmul(x));
        let yxx = y.matmul(&x.matmul(x));
        let cubic = xxy.sub(&xyx.scale(coeff)).add_scaled(&yxx, 1.0);
        let rhs = x.scale(lin_x).add_scaled(&y.scale(lin_y), 1.0).add_scaled(&id.scale(cst), 1.0);
        let scale = xxy.frobenius().max(1e-300);
        cubic.sub(&rhs).frobenius() / scale
    };

    let r1 = rel(a, astar, c.xi, c.chi, c.eta);
    let r2 = rel(astar, a, c.xi, c.chi_star, c.eta_star);
    (r1, r2)
}

/// Eigendecomposition of the subsystem block of T, with a non-degeneracy
/// report. The block is tridiagonal; the gap matters because the common
/// eigenbasis with C is only forced when the spectrum is simple.
#[derive(Debug, Clone)]
pub struct HeunSpectrum {
    pub eig: EigenDecomp,
    pub min_gap: f64,
    pub spread: f64,
    pub near_degenerate: bool,
}

pub const DEGENERACY_GAP_FRACTION: f64 = 1e-8;

pub fn heun_spectrum(h: &HeunData) -> Result<HeunSpectrum> {
    let n = h.t_block.size();
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        diag.push(h.t_block[(i, i)]);
        if i + 1 < n {
            offdiag.push(h.t_block[(i, i + 1)]);
        }
    }
    let eig = eig_sym_tridiag(&SymTridiag::new(diag, offdiag), DEFAULT_EIG_TOL)?;
    let spread = if n > 1 { eig.values[n - 1] - eig.values[0] } else { 0.0 };
    let min_gap = eig
        .values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let min_gap = if min_gap.is_finite() { min_gap } else { 0.0 };
    let near_degenerate = n > 1 && min_gap < DEGENERACY_GAP_FRACTION * spread;
    Ok(HeunSpectrum { eig, min_gap, spread, near_degenerate })
}

impl Mat {
    fn add_scaled(&self, other: &Mat, s: f64) -> Mat {
        let mut out = self.clone();
        for i in 0..self.size() {
            for j in 0..self.size() {
                out[(i, j)] += s * other[(i, j)];
            }
        }
        out
    }
}
