//! TQ route: the q-difference relation satisfied by Q(U) = prod (U - U_i)
//! turns, for beta = delta = 0, into a three-term recurrence for the
//! elementary symmetric polynomials S_n of the transformed Bethe roots. The
//! closure condition gives a degree L+1 polynomial in Lambda whose roots are
//! the Heun eigenvalues, and each root reproduces its Bethe roots through a
//! numeric back-substitution.

use crate::aba::{reduced_bethe_residuals, BetheState};
use crate::correlation::RegionSpec;
use crate::error::{Error, Result};
use crate::numerics::{poly_roots, PolyReal};
use crate::qkernel::ChainParams;
use num_complex::Complex64;

type C64 = Complex64;

/// Recurrence data for one chain and one region.
#[derive(Debug, Clone)]
pub struct TqCoeffs {
    /// sigma_n for n = 0..=L+1
    pub sigma: Vec<f64>,
    /// rho_n for n = 0..=L+1
    pub rho: Vec<f64>,
    /// epsilon_n for n = 0..=L+1
    pub eps: Vec<f64>,
    /// the inhomogeneous polynomial p(U) of the q-difference relation
    pub p_u: PolyReal,
    pub region: RegionSpec,
}

/// The recurrence requires the affine q-Krawtchouk regime beta = delta = 0.
pub fn tq_coeffs(p: &ChainParams, r: &RegionSpec) -> Result<TqCoeffs> {
    if p.beta != 0.0 || p.delta != 0.0 {
        return Err(Error::Regime { expected: "beta = 0 and delta = 0".to_string() });
    }
    r.check(p.n)?;
    let (q, al, ga, de) = (p.q, p.alpha, p.gamma, p.delta);
    let ll = r.l as i64;
    let kk = r.k as i64;
    let qp = |e: i64| p.qp(e);

    let mut sigma = Vec::with_capacity(r.l + 2);
    let mut rho = Vec::with_capacity(r.l + 2);
    let mut eps = Vec::with_capacity(r.l + 2);
    for n in 0..=(ll + 1) {
        sigma.push((q + 1.0) * (qp(-n) + qp(n) - 2.0));
        rho.push(
            (q + 1.0) * qp(n - ll - kk) * (al * ga * qp(kk + ll + 1) + 1.0 / q)
                + (q + 1.0) * (al + ga) * qp(-n)
                - 2.0 * q * (al * ga + al + ga),
        );
        eps.push(al * ga * (q + 1.0) * (qp(n - kk - ll) + qp(-n) - qp(-kk) - qp(-ll)));
    }

    // p(U), kept with its general delta terms even though delta = 0 here
    let c0 = -al * ga * ga * de * (q + 1.0) * (q + 1.0) / qp(ll);
    let c1 = ga * (q + 1.0) / qp(kk + ll)
        * (al * ga * de * qp(2 * kk + ll + 2) + qp(kk) * (al * de + al + ga * de + de) + al * qp(ll));
    let c2 = -2.0 * q * (al * ga + al + ga * de + ga);
    let c3 = 2.0 * (q + 1.0);
    let p_u = PolyReal::new(vec![c0, c1, c2, c3]);

    Ok(TqCoeffs { sigma, rho, eps, p_u, region: *r })
}

fn poly_add_scaled(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    out[..a.len()].copy_from_slice(a);
    for (o, &x) in out.iter_mut().zip(b.iter()) {
        *o += s * x;
    }
    out
}

/// Multiplies a polynomial in Lambda by (c0 + Lambda).
fn poly_mul_linear(a: &[f64], c0: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + 1];
    for (i, &x) in a.iter().enumerate() {
        out[i] += c0 * x;
        out[i + 1] += x;
    }
    out
}

/// The closure polynomial P(Lambda) of degree L+1, obtained by sweeping the
/// recurrence down from S_{L+1} = 0, S_L = 1 with polynomial coefficients.
/// P is sigma_1 S_1 + (rho_0 + Lambda) S_0, which is -epsilon_{-1} S_{-1}
/// and so has the same roots as the closure condition S_{-1} = 0.
pub fn lambda_polynomial(c: &TqCoeffs) -> Result<PolyReal> {
    let l = c.region.l;
    let mut s_next: Vec<f64> = vec![0.0]; // S_{n+1}, starting at S_{L+1} = 0
    let mut s_cur: Vec<f64> = vec![1.0]; // S_n, starting at S_L = 1
    for n in (1..=l).rev() {
        let eps = c.eps[n - 1];
        if eps == 0.0 {
            return Err(Error::SingularParameter { n: n as i64 - 1, denom: "epsilon_n".to_string() });
        }
        let t = poly_add_scaled(
            &poly_mul_linear(&s_cur, c.rho[n]),
            &s_next,
            c.sigma[n + 1],
        );
        let s_prev: Vec<f64> = t.iter().map(|&x| -x / eps).collect();
        s_next = s_cur;
        s_cur = s_prev;
    }
    let p = poly_add_scaled(&poly_mul_linear(&s_cur, c.rho[0]), &s_next, c.sigma[1]);
    Ok(PolyReal::new(p))
}

/// All data produced by the TQ route.
#[derive(Debug, Clone)]
pub struct TqSolution {
    /// real eigenvalue candidates, ascending
    pub lambdas: Vec<f64>,
    /// one Bethe state per eigenvalue, in the same order
    pub states: Vec<BetheState>,
    /// thermodynamic-limit approximation -rho_n for n = 0..=L, in n order
    pub thermo: Vec<f64>,
}

const REAL_ROOT_IMAG_TOL: f64 = 1e-8;

/// Back-substitutes one real Lambda through the recurrence numerically,
/// returning the elementary symmetric values S_0..=S_L rescaled to S_0 = 1.
fn sweep_symmetric(c: &TqCoeffs, lambda: f64) -> Result<Vec<f64>> {
    let l = c.region.l;
    let mut s = vec![0.0; l + 2];
    s[l + 1] = 0.0;
    s[l] = 1.0;
    for n in (1..=l).rev() {
        let eps = c.eps[n - 1];
        if eps == 0.0 {
            return Err(Error::SingularParameter { n: n as i64 - 1, denom: "epsilon_n".to_string() });
        }
        s[n - 1] = -(c.sigma[n + 1] * s[n + 1] + (c.rho[n] + lambda) * s[n]) / eps;
    }
    if s[0] == 0.0 {
        return Err(Error::Domain("S_0 vanished during the TQ back-substitution".to_string()));
    }
    let s0 = s[0];
    Ok(s.iter().take(l + 1).map(|&x| x / s0).collect())
}

/// Gaussian elimination with partial pivoting for a small complex system.
/// Consumes the matrix; returns None when a pivot vanishes.
fn solve_complex(a: &mut [Vec<C64>], b: &[C64]) -> Option<Vec<C64>> {
    let n = b.len();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
            let sub = f * x[col];
            x[row] -= sub;
        }
    }
    for col in (0..n).rev() {
        for k in col + 1..n {
            let sub = a[col][k] * x[k];
            x[col] -= sub;
        }
        x[col] /= a[col][col];
    }
    Some(x)
}

/// Newton refinement of the squared Bethe roots on the reduced equations.
/// The back-substituted Q coefficients lose accuracy as L grows, so each
/// recovered root set is polished and kept only while the normalized defects
/// improve.
fn polish_squared_roots(p: &ChainParams, r: &RegionSpec, squared: &mut [C64]) {
    let l = squared.len();
    if l == 0 {
        return;
    }
    // a frozen root is exact by construction; snap it and keep it fixed
    let mut free: Vec<usize> = Vec::with_capacity(l);
    for i in 0..l {
        if crate::aba::frozen_root_beta0(p, r, squared[i]) {
            squared[i] = C64::new(p.qp((r.k + r.l) as i64 + 2), 0.0);
        } else {
            free.push(i);
        }
    }
    let m = free.len();
    if m == 0 {
        return;
    }
    let defect = |x: &[C64]| -> Option<Vec<C64>> {
        let sides = crate::aba::reduced_bethe_sides(p, r, x).ok()?;
        Some(free.iter().map(|&i| sides[i].0 - sides[i].1).collect())
    };
    let score = |x: &[C64]| -> Option<f64> {
        let sides = crate::aba::reduced_bethe_sides(p, r, x).ok()?;
        Some(
            free.iter()
                .map(|&i| {
                    let (a, b) = sides[i];
                    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
                })
                .fold(0.0, f64::max),
        )
    };
    let mut best = squared.to_vec();
    let Some(mut best_score) = score(&best) else { return };
    let mut x = squared.to_vec();
    'newton: for _ in 0..40 {
        if best_score <= 1e-14 {
            break;
        }
        let Some(g) = defect(&x) else { break };
        // forward-difference Jacobian; both sides are analytic in each x_j
        let mut jac = vec![vec![C64::new(0.0, 0.0); m]; m];
        for (col, &j) in free.iter().enumerate() {
            let h = 1e-7 * x[j].norm().max(1e-12);
            let mut xh = x.to_vec();
            xh[j] += C64::new(h, 0.0);
            let Some(gh) = defect(&xh) else { break 'newton };
            for i in 0..m {
                jac[i][col] = (gh[i] - g[i]) / C64::new(h, 0.0);
            }
        }
        let Some(dx) = solve_complex(&mut jac, &g) else { break };
        // damped step: back off until the defect improves
        let mut accepted = false;
        let mut damp = 1.0;
        for _ in 0..8 {
            let mut trial = x.clone();
            for (col, &j) in free.iter().enumerate() {
                trial[j] -= C64::new(damp, 0.0) * dx[col];
            }
            if let Some(s) = score(&trial) {
                if s < best_score {
                    best_score = s;
                    best = trial.clone();
                    x = trial;
                    accepted = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    squared.copy_from_slice(&best);
}

pub fn solve_tq(p: &ChainParams, r: &RegionSpec) -> Result<TqSolution> {
    let c = tq_coeffs(p, r)?;
    let poly = lambda_polynomial(&c)?;
    let roots = poly_roots(&poly)?;
    let mut lambdas: Vec<f64> = Vec::new();
    for z in &roots {
        if z.im.abs() <= REAL_ROOT_IMAG_TOL * z.re.abs().max(1.0) {
            lambdas.push(z.re);
        }
    }
    if lambdas.len() != r.l + 2 - 1 {
        return Err(Error::Domain(format!(
            "expected {} real eigenvalues from the TQ polynomial, found {}",
            r.l + 1,
            lambdas.len()
        )));
    }
    lambdas.sort_by(f64::total_cmp);

    let mut states = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let s = sweep_symmetric(&c, lambda)?;
        // Q(U) = sum_i (-1)^{L-i} S_{L-i} U^i, with the constant term
        // included so that Q = prod (U - U_i) exactly
        let l = r.l;
        let qcoeffs: Vec<f64> = (0..=l)
            .map(|i| if (l - i) % 2 == 0 { s[l - i] } else { -s[l - i] })
            .collect();
        let q_poly = PolyReal::new(qcoeffs);
        let u_big = if l > 0 { poly_roots(&q_poly)? } else { Vec::new() };
        let raw = BetheState::from_u_big_beta0(p.q, u_big.clone(), Complex64::new(lambda, 0.0));
        // x_i = u_i^2 = q / U_i; polish on the reduced equations, then keep
        // the polished roots only if the q-difference identity did not
        // degrade (at large scales the reduced equations are noise-limited
        // and the polish can wander off the true Q)
        let mut squared: Vec<C64> = u_big.iter().map(|&ub| Complex64::new(p.q, 0.0) / ub).collect();
        polish_squared_roots(p, r, &mut squared);
        let polished_big: Vec<C64> =
            squared.iter().map(|&x| Complex64::new(p.q, 0.0) / x).collect();
        let polished = BetheState::from_u_big_beta0(p.q, polished_big, Complex64::new(lambda, 0.0));
        let guard: Vec<C64> = (0..8)
            .map(|j| Complex64::new(0.25 * (j as f64 + 1.0), 0.0))
            .chain([Complex64::new(0.0, 0.0)])
            .collect();
        let mut state = if tq_residual(p, r, &polished, &guard)
            <= (10.0 * tq_residual(p, r, &raw, &guard)).max(1e-10)
        {
            polished
        } else {
            raw
        };
        state.residuals = reduced_bethe_residuals(p, r, &state.u)?;
        states.push(state);
    }

    let thermo = (0..=r.l).map(|n| -c.rho[n]).collect();
    Ok(TqSolution { lambdas, states, thermo })
}

/// Maximum normalized residual of the q-difference relation over the sample
/// points, for one state. Valid for beta = 0 (delta may be nonzero in the
/// relation itself, though the solver requires delta = 0).
pub fn tq_residual(p: &ChainParams, r: &RegionSpec, state: &BetheState, samples: &[C64]) -> f64 {
    let (q, al, ga, de) = (p.q, p.alpha, p.gamma, p.delta);
    let ll = r.l as i64;
    let kk = r.k as i64;
    let qp = |e: i64| p.qp(e);
    let c = |x: f64| C64::new(x, 0.0);

    let q_of = |u: C64| -> C64 {
        state
            .u_big
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, &root| acc * (u - root))
    };

    let p_u = {
        let c0 = -al * ga * ga * de * (q + 1.0) * (q + 1.0) / qp(ll);
        let c1 = ga * (q + 1.0) / qp(kk + ll)
            * (al * ga * de * qp(2 * kk + ll + 2) + qp(kk) * (al * de + al + ga * de + de) + al * qp(ll));
        let c2 = -2.0 * q * (al * ga + al + ga * de + ga);
        let c3 = 2.0 * (q + 1.0);
        PolyReal::new(vec![c0, c1, c2, c3])
    };

    let mut worst: f64 = 0.0;
    for &u in samples {
        let lhs = u * u * q_of(u) * state.lambda;
        let up = (u - c(al)) * (u - c(ga)) * (u - c(ga * de));
        let down = (u - c(qp(-kk - ll - 1))) * (u - c(al * ga * q)) * (u - c(ga * de * qp(kk - ll + 1)));
        let rhs = c((q + 1.0) / qp(ll)) * up * q_of(u * c(q)) - p_u.eval_complex(u) * q_of(u)
            + c(qp(ll) * (q + 1.0)) * down * q_of(u / c(q));
        let scale = lhs.norm().max(rhs.norm()).max(1e-300);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    worst
}
