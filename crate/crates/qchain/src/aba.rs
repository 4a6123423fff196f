//! Algebraic-Bethe-ansatz layer: scalar structure functions, the dynamical
//! operators as complex matrices, Bethe vectors, eigenvalue formulas for the
//! Heun operator and the truncated correlation matrix, and Bethe-equation
//! residuals.
//!
//! Everything is complex-capable; Bethe roots need not be real. Real outputs
//! are extracted with an imaginary-part tolerance by the callers.

use crate::chain::{self, ChainModel, SpectralData};
use crate::correlation::RegionSpec;
use crate::error::{Error, Result};
use crate::heun::{aw_constants, AWConstants};
use crate::numerics::{elementary_symmetric, LogProduct, Mat};
use num_complex::Complex64;

type C64 = Complex64;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(1.0);
        }
        m
    }

    pub fn from_real(r: &Mat) -> Self {
        let n = r.size();
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(r[(i, j)]);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == c(0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// A candidate Bethe state: roots u_i, transformed variables
/// U_i = q/u_i^2 + alpha*beta*gamma*delta*u_i^2, the eigenvalue Lambda and
/// the Bethe-equation defects.
#[derive(Debug, Clone)]
pub struct BetheState {
    pub u: Vec<C64>,
    pub u_big: Vec<C64>,
    pub lambda: C64,
    pub residuals: Vec<C64>,
}

impl BetheState {
    /// beta = 0 map: U_i = q/u_i^2, so u_i = +sqrt(q/U_i) (principal branch;
    /// downstream formulas depend on u_i^2 only).
    pub fn from_u_big_beta0(q: f64, u_big: Vec<C64>, lambda: C64) -> Self {
        let u = u_big.iter().map(|&ubig| (c(q) / ubig).sqrt()).collect();
        BetheState { u, u_big, lambda, residuals: Vec::new() }
    }
}

/// Gaussian binomial coefficient [a choose b]_q at real q.
fn q_binomial(q: f64, a: usize, b: usize) -> f64 {
    let mut out = 1.0;
    for i in 1..=b {
        out *= (1.0 - q.powi((a - b + i) as i32)) / (1.0 - q.powi(i as i32));
    }
    out
}

const POLE_FACTOR: f64 = 1e3;

fn pole_check(den: C64, scale: f64, label: &str) -> Result<C64> {
    if den.norm() <= POLE_FACTOR * f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Pole { denom: label.to_string() });
    }
    Ok(den)
}

/// Bethe-ansatz context for one chain and one region: captures the chain,
/// the Askey-Wilson constants and the operator matrices {A,A*}, [A,A*].
pub struct BetheAnsatz {
    pub model: ChainModel,
    pub region: RegionSpec,
    consts: AWConstants,
    a_mat: CMat,
    astar: CMat,
    anti: CMat,
    comm: CMat,
}

impl BetheAnsatz {
    pub fn new(model: ChainModel, region: RegionSpec) -> Result<Self> {
        region.check(model.params.n)?;
        let a_real = chain::hopping_matrix(&model).to_mat();
        let astar_real = Mat::from_diag(&chain::astar_diagonal(&model.params, model.params.n));
        let anti = a_real.matmul(&astar_real);
        let anti2 = astar_real.matmul(&a_real);
        let consts = aw_constants(&model.params);
        let a_mat = CMat::from_real(&a_real);
        let astar = CMat::from_real(&astar_real);
        let anti_c = CMat::from_real(&anti.add_ref(&anti2));
        let comm_c = CMat::from_real(&anti.sub(&anti2));
        Ok(BetheAnsatz {
            model,
            region,
            consts,
            a_mat,
            astar,
            anti: anti_c,
            comm: comm_c,
        })
    }

    fn p(&self) -> (f64, f64, f64, f64, f64) {
        let p = &self.model.params;
        (p.q, p.alpha, p.beta, p.gamma, p.delta)
    }

    fn qp(&self, k: i64) -> f64 {
        self.model.params.qp(k)
    }

    fn l(&self) -> i64 {
        self.region.l as i64
    }

    pub fn tau(&self) -> Result<f64> {
        let (q, al, be, ga, de) = self.p();
        let prod = al * be * ga * de;
        if prod <= 0.0 {
            return Err(Error::TauUndefined);
        }
        Ok((q / prod).sqrt())
    }

    pub fn f1(&self, u: C64, m: i64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let AWConstants { xi, eta, eta_star, .. } = self.consts;
        let ll = self.l();
        let u2 = u * u;
        let u4 = u2 * u2;
        let abgd = al * be * ga * de;
        let q2m1 = (q * q - 1.0) * (q * q - 1.0);

        let d1 = pole_check(
            u2 * (al * be * self.qp(2 * ll + 2 * m + 1) - self.qp(2 * ll)),
            u2.norm() * self.qp(2 * ll).abs().max((al * be * self.qp(2 * ll + 2 * m + 1)).abs()),
            "u^2 (alpha*beta*q^(2L+2m+1) - q^(2L))",
        )?;
        let t1 = c(2.0 * self.qp(m + 1)) * (c(q) + c(abgd) * u4) / d1;

        let d2 = pole_check(
            c(q * q) - c(abgd) * u4,
            (q * q).max((abgd * u4.norm()).abs()),
            "q^2 - alpha*beta*gamma*delta*u^4",
        )?;
        let t2 = u2 * c(eta * (q + 1.0) * self.qp(-2 * ll + 2)) / (c(q2m1) * d2);

        let d3 = pole_check(
            c(self.qp(2 * ll) - al * be * self.qp(2 * ll + 2 * m + 1)),
            self.qp(2 * ll).abs(),
            "q^(2L) - alpha*beta*q^(2L+2m+1)",
        )?;
        let inner = c(eta_star) * (c(ga * de * q) * u4 - c(self.qp(2 * m + 4))) / d2
            - c(2.0 * xi * self.qp(m + 2));
        let t3 = c(q + 1.0) / (c(q2m1) * d3) * inner;

        Ok(t1 - t2 + t3)
    }

    pub fn f2(&self, u: C64, m: i64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let AWConstants { xi, eta_star, .. } = self.consts;
        let ll = self.l();
        let u2 = u * u;
        let u4 = u2 * u2;
        let abgd = al * be * ga * de;

        let d1 = pole_check(u2 * c(self.qp(m + 2 * ll + 1)), u2.norm() * self.qp(m + 2 * ll + 1).abs(), "u^2 q^(m+2L+1)")?;
        let t1 = c(al * be * self.qp(2 * ll + 2 * m + 3) + self.qp(2 * ll)) * (c(q) + c(abgd) * u4) / d1;
        let t2 = (eta_star * self.qp(2 * ll + m + 1)
            + al * be * xi * self.qp(2 * ll + 2 * m + 3)
            + xi * self.qp(2 * ll))
            / (self.qp(m + 2 * ll) * (q - 1.0) * (q - 1.0) * (q + 1.0));
        Ok(t1 + c(t2))
    }

    pub fn f_exch(&self, u: C64, v: C64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let abgd = al * be * ga * de;
        let u2 = u * u;
        let v2 = v * v;
        let d1 = pole_check(u2 - v2, u2.norm().max(v2.norm()), "u^2 - v^2")?;
        let d2 = pole_check(
            c(abgd) * u2 * v2 - c(q),
            q.abs().max((abgd * (u2 * v2).norm()).abs()),
            "alpha*beta*gamma*delta*u^2*v^2 - q",
        )?;
        Ok((u2 - c(q) * v2) * (c(abgd) * u2 * v2 - c(q * q)) / (c(q) * d1 * d2))
    }

    pub fn g_exch(&self, u: C64, v: C64, m: i64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let abgd = al * be * ga * de;
        let ll = self.l();
        let u2 = u * u;
        let v2 = v * v;
        let v4 = v2 * v2;
        let d1 = pole_check(u2 - v2, u2.norm().max(v2.norm()), "u^2 - v^2")?;
        let d2 = pole_check(
            c(al * be * self.qp(2 * ll + 2 * m + 3) - self.qp(2 * ll)),
            self.qp(2 * ll).abs(),
            "alpha*beta*q^(2L+2m+3) - q^(2L)",
        )?;
        let d3 = pole_check(
            c(q) - c(abgd) * v4,
            q.abs().max((abgd * v4.norm()).abs()),
            "q - alpha*beta*gamma*delta*v^4",
        )?;
        Ok(c(q - 1.0) * (c(q * q) - c(abgd) * v4)
            * (c(al * be * self.qp(2 * ll + 2 * m + 3)) * v2 - u2 * c(self.qp(2 * ll)))
            / (c(q) * d1 * d2 * d3))
    }

    pub fn w_exch(&self, u: C64, v: C64, m: i64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let abgd = al * be * ga * de;
        let ll = self.l();
        let u2 = u * u;
        let v2 = v * v;
        let v4 = v2 * v2;
        let d1 = pole_check(
            c(self.qp(2 * ll) - al * be * self.qp(2 * ll + 2 * m + 3)),
            self.qp(2 * ll).abs(),
            "q^(2L) - alpha*beta*q^(2L+2m+3)",
        )?;
        let d2 = pole_check(
            c(q) - c(abgd) * v4,
            q.abs().max((abgd * v4.norm()).abs()),
            "q - alpha*beta*gamma*delta*v^4",
        )?;
        let d3 = pole_check(
            c(q) - c(abgd) * u2 * v2,
            q.abs().max((abgd * (u2 * v2).norm()).abs()),
            "q - alpha*beta*gamma*delta*u^2*v^2",
        )?;
        Ok(c(al * be * (q - 1.0))
            * (c(abgd) * v4 - c(1.0))
            * (c(ga * de * self.qp(2 * ll)) * u2 * v2 - c(self.qp(2 * (ll + m + 2))))
            / (d1 * d2 * d3))
    }

    /// r(u) multiplying the dynamical operator in the Heun decomposition.
    pub fn r_coeff(&self, u: C64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let abgd = al * be * ga * de;
        let ll = self.l();
        let kk = self.region.k as i64;
        let u2 = u * u;
        let u4 = u2 * u2;
        let den = pole_check(
            c(abgd) * u4 - c(q),
            q.abs().max((abgd * u4.norm()).abs()),
            "alpha*beta*gamma*delta*u^4 - q",
        )?;
        let inner = c(al * al * be * be * ga * de * self.qp(2 * ll)) * u4 + c(1.0)
            - c((ga * de * self.qp(kk + 1) + self.qp(-kk - 1)) * al * be * self.qp(ll)) * u2;
        Ok(c(self.qp(ll) * (q + 1.0)) / den * inner)
    }

    /// Eigenvalue of the dynamical operator at step 0 on the corner vector.
    pub fn a_scalar(&self, u: C64) -> Result<C64> {
        let (q, al, be, ga, de) = self.p();
        let ll = self.l();
        let mu0 = self.model.mu[0];
        let lam0 = crate::qkernel::lambda_pos(&self.model.params, 0);
        let u2 = pole_check(u * u, u.norm() * u.norm() + 1.0, "u^2")?;
        let pref = self.qp(-2 * ll) / (1.0 - al * be * q);
        let inner = c(2.0 * mu0 * lam0 * q / (q + 1.0)) - c(mu0 * (al * be * q * q + 1.0))
            + c(q * q * lam0) / u2
            + c(ga * de) * u2 * c(lam0);
        Ok(c(pref) * inner + self.f1(u, 0)?)
    }

    /// The dynamical operator built from {A,A*}, A, A* and the identity.
    pub fn dyn_a(&self, u: C64, m: i64) -> Result<CMat> {
        let (q, al, be, ga, de) = self.p();
        let ll = self.l();
        let u2 = u * u;
        let u4 = u2 * u2;
        let d = pole_check(
            c(al * be * self.qp(2 * m + 1) - 1.0),
            1.0_f64.max((al * be * self.qp(2 * m + 1)).abs()),
            "alpha*beta*q^(2m+1) - 1",
        )?;
        let pref = c(self.qp(-2 * ll)) / d;
        let term = self
            .anti
            .scale(c(self.qp(m + 1) / (q + 1.0)))
            .sub(&self.a_mat.scale(c(al * be * self.qp(2 * m + 2) + 1.0)))
            .sub(&self.astar.scale((c(self.qp(2 * m + 2)) + c(ga * de) * u4) / u2));
        Ok(term
            .scale(pref)
            .add(&CMat::identity(self.a_mat.size()).scale(self.f1(u, m)?)))
    }

    pub fn dyn_b(&self, u: C64, m: i64) -> Result<CMat> {
        let (q, al, be, ga, de) = self.p();
        let abgd = al * be * ga * de;
        let u2 = pole_check(u * u, u.norm() * u.norm() + 1.0, "u^2")?;
        let u4 = u2 * u2;
        let t_anti = self.anti.scale(c((al * be * self.qp(m + 2) + self.qp(-m - 1)) / (2.0 * (q + 1.0))));
        let t_comm = self.comm.scale(c((self.qp(-m - 1) - al * be * self.qp(m + 2)) / (2.0 * (1.0 - q))));
        let t_a = self.a_mat.scale(c(al * be * (q + 1.0)));
        let t_astar = self.astar.scale((c(q) + c(abgd) * u4) / u2);
        Ok(t_anti
            .sub(&t_comm)
            .sub(&t_a)
            .sub(&t_astar)
            .add(&CMat::identity(self.a_mat.size()).scale(self.f2(u, m)?)))
    }

    /// Coefficients (V, X, Y, Z) of the tridiagonal action
    /// q^{m+1} B(u,m)|n> = V|n+1> + (X + Y U)|n> + Z|n-1>.
    pub fn b_action_coeffs(&self, n: usize, m: i64) -> (f64, f64, f64, f64) {
        let (q, al, be, _ga, _de) = self.p();
        let AWConstants { xi, eta_star, .. } = self.consts;
        let ll = self.l();
        let ni = n as i64;
        let j_n = if n < self.model.params.n { self.model.j[n] } else { 0.0 };
        let j_prev = if n >= 1 { self.model.j[n - 1] } else { 0.0 };
        let mu_n = self.model.mu[n];
        let lam_n = crate::qkernel::lambda_pos(&self.model.params, n);

        let v = j_n
            * (self.qp(-ni - 1) - al * be * self.qp(m + 2) - al * be * self.qp(m + 1)
                + al * al * be * be * self.qp(2 * m + ni + 4));
        let x = -mu_n * lam_n * (al * be * self.qp(2 * m + 3) + 1.0) / (q + 1.0)
            + al * be * (q + 1.0) * self.qp(m + 1) * mu_n
            + (eta_star * self.qp(2 * ll + m + 1)
                + al * be * xi * self.qp(2 * ll + 2 * m + 3)
                + xi * self.qp(2 * ll))
                / ((q - 1.0) * (q - 1.0) * (q + 1.0) * self.qp(2 * ll - 1));
        let y = -self.qp(m + 1) * lam_n + (al * be * self.qp(2 * ll + 2 * m + 3) + self.qp(2 * ll)) / self.qp(2 * ll);
        let z = j_prev * al * be * (self.qp(2 * m + 3 - ni) + self.qp(ni) - self.qp(m + 2) - self.qp(m + 1));
        (v, x, y, z)
    }

    /// Residuals of the two exchange relations at (u, v, m). The second
    /// relation needs tau and is skipped (None) when alpha*beta*gamma*delta
    /// is not positive.
    pub fn verify_exchange(&self, u: C64, v: C64, m: i64) -> Result<(f64, Option<f64>)> {
        let lhs1 = self.dyn_b(u, m + 1)?.matmul(&self.dyn_b(v, m)?);
        let rhs1 = self.dyn_b(v, m + 1)?.matmul(&self.dyn_b(u, m)?);
        let scale1 = lhs1.frobenius().max(rhs1.frobenius()).max(1e-300);
        let res1 = lhs1.sub(&rhs1).frobenius() / scale1;

        let res2 = match self.tau() {
            Ok(tau) => {
                let lhs2 = self.dyn_a(u, m + 1)?.matmul(&self.dyn_b(v, m)?);
                let rhs2 = self
                    .dyn_b(v, m)?
                    .matmul(&self.dyn_a(u, m)?)
                    .scale(self.f_exch(u, v)?)
                    .add(&self.dyn_b(u, m)?.matmul(&self.dyn_a(v, m)?).scale(self.g_exch(u, v, m)?))
                    .add(
                        &self
                            .dyn_b(u, m)?
                            .matmul(&self.dyn_a(c(tau) / v, m)?)
                            .scale(self.w_exch(u, v, m)?),
                    );
                let scale2 = lhs2.frobenius().max(rhs2.frobenius()).max(1e-300);
                Some(lhs2.sub(&rhs2).frobenius() / scale2)
            }
            Err(Error::TauUndefined) => None,
            Err(e) => return Err(e),
        };
        Ok((res1, res2))
    }

    /// Rebuilds the Heun operator from the dynamical operator at spectral
    /// parameter u and returns (normalized residual, reconstruction).
    pub fn heun_from_dyn_a(&self, u: C64, t: &Mat) -> Result<(f64, CMat)> {
        let tau = self.tau()?;
        let ll = self.l();
        let ut = c(tau) / u;
        let ru = self.r_coeff(u)?;
        let rut = self.r_coeff(ut)?;
        let rebuilt = self
            .dyn_a(u, ll)?
            .scale(ru)
            .add(&self.dyn_a(ut, ll)?.scale(rut))
            .sub(
                &CMat::identity(self.a_mat.size())
                    .scale(ru * self.f1(u, ll)? + rut * self.f1(ut, ll)?),
            );
        let t_c = CMat::from_real(t);
        let scale = t_c.frobenius().max(rebuilt.frobenius()).max(1e-300);
        let res = rebuilt.sub(&t_c).frobenius() / scale;
        Ok((res, rebuilt))
    }

    /// |u_bar> = B(u_1, L-1) B(u_2, L-2) ... B(u_L, 0) |0>.
    pub fn bethe_vector(&self, roots: &[C64]) -> Result<Vec<C64>> {
        let size = self.a_mat.size();
        let mut v = vec![c(0.0); size];
        v[0] = c(1.0);
        let ll = roots.len() as i64;
        for (i, &u) in roots.iter().enumerate().rev() {
            let m = ll - 1 - i as i64;
            v = self.dyn_b(u, m)?.mul_vec(&v);
        }
        Ok(v)
    }

    /// u-independent closed form for Lambda, evaluated from the transformed
    /// variables U_i.
    pub fn lambda_eigen2(&self, u_big: &[C64]) -> C64 {
        let (q, al, be, _ga, _de) = self.p();
        let p = &self.model.params;
        let om = crate::qkernel::omega(p, self.region.k) + crate::qkernel::omega(p, self.region.k + 1);
        let lam_l = crate::qkernel::lambda_pos(p, self.region.l);
        let mu0 = self.model.mu[0];
        let sum_u: C64 = u_big.iter().sum();
        let q2m1 = (q * q - 1.0) * (q * q - 1.0);
        c(-om * lam_l)
            - c(mu0 * (q - 1.0) / q
                * (al * be * q * q + 1.0 + 4.0 * al * be * q * q / (al * be * q - 1.0)))
            - c(q2m1 / (q * (q + 1.0))) * sum_u
    }

    /// u-dependent form of Lambda; equals lambda_eigen2 for true Bethe roots
    /// and is then independent of the probe u.
    pub fn lambda_eigen1(&self, roots: &[C64], u: C64) -> Result<C64> {
        let tau = self.tau()?;
        let ut = c(tau) / u;
        let mut prod_u = c(1.0);
        let mut prod_ut = c(1.0);
        for &ui in roots {
            prod_u *= self.f_exch(u, ui)?;
            prod_ut *= self.f_exch(ut, ui)?;
        }
        let ll = self.l();
        let ru = self.r_coeff(u)?;
        let rut = self.r_coeff(ut)?;
        Ok(ru * self.a_scalar(u)? * prod_u + rut * self.a_scalar(ut)? * prod_ut
            - (ru * self.f1(u, ll)? + rut * self.f1(ut, ll)?))
    }

    /// Bethe-equation defects. At beta = 0 the printed reduced product system
    /// is used (tau is undefined there); otherwise the full E_i defects with
    /// a probe parameter u.
    pub fn bethe_residuals(&self, roots: &[C64], u_probe: C64) -> Result<Vec<C64>> {
        let (_, _, be, _, _) = self.p();
        for i in 0..roots.len() {
            for j in 0..i {
                let d = roots[i] * roots[i] - roots[j] * roots[j];
                if d.norm() <= 1e-12 * (roots[i].norm_sqr() + roots[j].norm_sqr()).max(1e-300) {
                    return Err(Error::CoincidentRoots { i, j });
                }
            }
        }
        if be == 0.0 {
            self.reduced_residuals_beta0(roots)
        } else {
            self.full_residuals(roots, u_probe)
        }
    }

    fn reduced_residuals_beta0(&self, roots: &[C64]) -> Result<Vec<C64>> {
        reduced_bethe_residuals(&self.model.params, &self.region, roots)
    }

    fn full_residuals(&self, roots: &[C64], u: C64) -> Result<Vec<C64>> {
        let tau = self.tau()?;
        let ll = self.l();
        let ut = c(tau) / u;
        let ru = self.r_coeff(u)?;
        let rut = self.r_coeff(ut)?;
        let mut out = Vec::with_capacity(roots.len());
        for (i, &ui) in roots.iter().enumerate() {
            let uti = c(tau) / ui;
            let mut prod_f = c(1.0);
            let mut prod_ft = c(1.0);
            for (j, &uj) in roots.iter().enumerate() {
                if j == i {
                    continue;
                }
                prod_f *= self.f_exch(ui, uj)?;
                prod_ft *= self.f_exch(uti, uj)?;
            }
            let e_i = (ru * self.g_exch(u, ui, ll - 1)? + rut * self.g_exch(ut, ui, ll - 1)?)
                * self.a_scalar(ui)?
                * prod_f
                + (rut * self.w_exch(ut, ui, ll - 1)? + ru * self.w_exch(u, ui, ll - 1)?)
                    * self.a_scalar(uti)?
                    * prod_ft;
            // normalize by the larger of the two contributions
            let s1 = ((ru * self.g_exch(u, ui, ll - 1)? + rut * self.g_exch(ut, ui, ll - 1)?)
                * self.a_scalar(ui)?
                * prod_f)
                .norm();
            let s2 = ((rut * self.w_exch(ut, ui, ll - 1)? + ru * self.w_exch(u, ui, ll - 1)?)
                * self.a_scalar(uti)?
                * prod_ft)
                .norm();
            out.push(e_i / c(s1.max(s2).max(1e-300)));
        }
        Ok(out)
    }

    /// Closed-form wavefunction <n|u_bar> for beta = 0, with the real
    /// prefactors accumulated in log space.
    pub fn wavefunction_beta0(&self, u_big: &[C64], n: usize) -> Result<C64> {
        let (q, al, be, ga, _de) = self.p();
        if be != 0.0 {
            return Err(Error::Regime { expected: "beta = 0".into() });
        }
        let ll = u_big.len();
        if n > ll {
            return Ok(c(0.0));
        }
        let mut pref = LogProduct::one();
        for ell in 1..=(ll - n) {
            pref = pref.mul_factor(1.0 - self.qp(ell as i64));
        }
        for i in 0..n {
            pref = pref.mul_factor(self.model.j[i] / self.qp(i as i64 + 1));
        }
        let log_lead = -(ll as f64) * ((ll as f64) + 1.0) / 2.0 * q.ln();
        let s_r = elementary_symmetric(u_big);
        let mut sum = c(0.0);
        for (r, s) in s_r.iter().enumerate().take(ll - n + 1) {
            let d = ll - n - r;
            sum += c((-al * ga * q).powi(d as i32) * q_binomial(q, n + d, d)) * s;
        }
        Ok(c(pref.value() * log_lead.exp()) * sum)
    }

    /// Correlation-matrix eigenvalue from the Bethe roots at beta = 0:
    /// c(u_bar) = <n|C|u_bar> / <n|u_bar>, evaluated at the component n of
    /// largest magnitude and cross-checked at the runner-up.
    pub fn c_eigenvalue_beta0(&self, state: &BetheState, s: &SpectralData) -> Result<f64> {
        let (q, al, be, ga, _de) = self.p();
        if be != 0.0 {
            return Err(Error::Regime { expected: "beta = 0".into() });
        }
        let ll = self.region.l;
        let kk = self.region.k;
        let s_r = elementary_symmetric(&state.u_big);

        // wavefunction components and their magnitudes
        let mut wf = Vec::with_capacity(ll + 1);
        for n in 0..=ll {
            wf.push(self.wavefunction_beta0(&state.u_big, n)?);
        }
        let norm: f64 = wf.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut order: Vec<usize> = (0..=ll).collect();
        order.sort_by(|&a, &b| wf[b].norm().total_cmp(&wf[a].norm()));
        if wf[order[0]].norm() <= 1e-12 * norm {
            return Err(Error::Domain("all wavefunction components below 1e-12 of the norm".into()));
        }

        let log_lead = -(ll as f64) * ((ll as f64) + 1.0) / 2.0 * q.ln();
        let eval_at = |n: usize| -> C64 {
            // sum_r b_{r,n} S_r(U_bar)
            let mut total = c(0.0);
            for (r, s_val) in s_r.iter().enumerate() {
                let mut b_rn = 0.0;
                for np in 0..=(ll - r) {
                    let mut pref = 1.0;
                    for ell in 1..=(ll - np) {
                        pref *= 1.0 - self.qp(ell as i64);
                    }
                    for i in 0..np {
                        pref *= self.model.j[i] / self.qp(i as i64 + 1);
                    }
                    let d = ll - np - r;
                    let pow = (-al * ga * q).powi(d as i32) * q_binomial(q, np + d, d);
                    let overlap: f64 = (0..=kk).map(|k| s.phi[(n, k)] * s.phi[(np, k)]).sum();
                    b_rn += overlap * pref * pow;
                }
                total += c(b_rn) * s_val;
            }
            c(log_lead.exp()) * total
        };

        let n0 = order[0];
        let val0 = eval_at(n0) / wf[n0];
        if ll >= 1 {
            let n1 = order[1];
            if wf[n1].norm() > 1e-10 * norm {
                let val1 = eval_at(n1) / wf[n1];
                // exponentially small eigenvalues are noise-dominated in
                // relative terms, so allow an absolute floor
                let dev = (val0 - val1).norm();
                if dev > 5e-8 + 1e-6 * val0.norm() {
                    return Err(Error::Domain(format!(
                        "c(u_bar) inconsistent across components: {dev:e} between n={n0} and n={n1}"
                    )));
                }
            }
        }
        if val0.im.abs() > 1e-9 + 1e-7 * val0.norm() {
            return Err(Error::Domain(format!("c(u_bar) has imaginary residue {:e}", val0.im)));
        }
        Ok(val0.re)
    }
}

/// Defects of the reduced beta = 0 Bethe equations, one per root, each
/// normalized by the larger of the two sides. Free-standing so the TQ route
/// can score candidate roots without building the operator matrices.
pub fn reduced_bethe_residuals(
    p: &crate::qkernel::ChainParams,
    r: &RegionSpec,
    roots: &[C64],
) -> Result<Vec<C64>> {
    let squared: Vec<C64> = roots.iter().map(|&u| u * u).collect();
    let sides = reduced_bethe_sides(p, r, &squared)?;
    Ok(sides
        .into_iter()
        .map(|(lhs, rhs)| {
            let scale = lhs.norm().max(rhs.norm()).max(1e-300);
            (lhs - rhs) / c(scale)
        })
        .collect())
}

/// True when the truncation condition alpha q^(K+L+1) = 1 holds and the
/// squared root sits at u^2 = q^(K+L+2), i.e. U = alpha. The q-difference
/// relation is identically satisfied at that point regardless of the other
/// roots, so the product-form equation carries no constraint there.
pub fn frozen_root_beta0(p: &crate::qkernel::ChainParams, r: &RegionSpec, x: C64) -> bool {
    let e = (r.k + r.l) as i64;
    if (p.alpha * p.qp(e + 1) - 1.0).abs() > 1e-12 {
        return false;
    }
    // successive roots are spaced by factors of q, so a 1e-3 relative window
    // cannot capture a neighboring regular root
    let pt = p.qp(e + 2);
    (x - c(pt)).norm() <= 1e-3 * pt.abs()
}

/// Both sides of each reduced beta = 0 Bethe equation as a function of the
/// squared roots x_i = u_i^2, shared by the residual report and the Newton
/// polish in the TQ route. Frozen roots report both sides as 1 (vacuous
/// equation).
pub fn reduced_bethe_sides(
    p: &crate::qkernel::ChainParams,
    r: &RegionSpec,
    squared: &[C64],
) -> Result<Vec<(C64, C64)>> {
    let (q, al, ga, de) = (p.q, p.alpha, p.gamma, p.delta);
    let kk = r.k as i64;
    let ll = r.l as i64;
    let mut out = Vec::with_capacity(squared.len());
    for (i, &ui2) in squared.iter().enumerate() {
        if frozen_root_beta0(p, r, ui2) {
            out.push((c(1.0), c(1.0)));
            continue;
        }
        let mut lhs = c(1.0);
        for (j, &uj2) in squared.iter().enumerate() {
            if j == i {
                continue;
            }
            let den = pole_check(ui2 - c(q) * uj2, ui2.norm().max(uj2.norm()), "u_i^2 - q u_j^2")?;
            lhs *= (ui2 - uj2 / c(q)) / den;
        }
        // With alpha = q^(-K-L-1) the factor (q - alpha u^2) equals
        // alpha (q^(K+L+2) - u^2), cancelling the first denominator exactly.
        // Roots can then sit right at the common zero, so cancel analytically
        // instead of evaluating a 0/0.
        let cancels = (al * p.qp(kk + ll + 1) - 1.0).abs() <= 1e-12;
        let mut num = c(p.qp(kk)) * (c(q) - c(ga) * ui2) * (c(q) - c(ga * de) * ui2);
        let d1 = if cancels {
            num *= c(al);
            c(1.0)
        } else {
            num *= c(q) - c(al) * ui2;
            pole_check(
                c(p.qp(kk + ll + 2)) - ui2,
                p.qp(kk + ll + 2).abs().max(ui2.norm()),
                "q^(K+L+2) - u_i^2",
            )?
        };
        let d2 = pole_check(c(al * ga) * ui2 - c(1.0), 1.0_f64.max((al * ga * ui2.norm()).abs()), "alpha*gamma*u_i^2 - 1")?;
        let d3 = pole_check(
            c(ga * de * p.qp(kk)) * ui2 - c(p.qp(ll)),
            p.qp(ll).abs().max((ga * de * p.qp(kk) * ui2.norm()).abs()),
            "gamma*delta*u_i^2*q^K - q^L",
        )?;
        let rhs = num / (d1 * d2 * d3);
        out.push((lhs, rhs));
    }
    Ok(out)
}

impl Mat {
    fn add_ref(&self, other: &Mat) -> Mat {
        let mut out = self.clone();
        for i in 0..self.size() {
            for j in 0..self.size() {
                out[(i, j)] += other[(i, j)];
            }
        }
        out
    }
}
