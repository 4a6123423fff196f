//! q-special-function layer: q-Pochhammer symbols, q-Racah recurrence and
//! difference coefficients, eigenvalue grids and orthonormality weights.
//!
//! All products over n or k accumulate in sign + log-magnitude form; with
//! alpha = q^{-N-1} the raw factors leave double range well before N = 50.

use crate::error::{Error, Result};
use crate::numerics::LogProduct;

/// Model parameters of the inhomogeneous chain: the five reals (q, alpha,
/// beta, gamma, delta), the last site index `n` (sites run 0..=n) and the
/// hopping sign. The single source of truth for every downstream formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Last site index; the chain has n + 1 sites.
    pub n: usize,
    /// Hopping sign, +1 or -1.
    pub hop_sign: i8,
    /// Set when alpha satisfies the standard truncation alpha = q^{-N-1}; the
    /// coefficient A_N is then zeroed exactly instead of being left at
    /// rounding scale.
    pub truncated: bool,
}

const TRUNCATION_DETECT_TOL: f64 = 1e-10;

impl ChainParams {
    pub fn new(
        q: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        n: usize,
        hop_sign: i8,
    ) -> Result<Self> {
        if q == 0.0 || q.abs() == 1.0 || !q.is_finite() {
            return Err(Error::Domain(format!("q must be finite, nonzero, |q| != 1; got {q}")));
        }
        if n < 1 {
            return Err(Error::Domain("chain needs at least two sites (n >= 1)".into()));
        }
        if hop_sign != 1 && hop_sign != -1 {
            return Err(Error::Domain(format!("hop_sign must be +1 or -1, got {hop_sign}")));
        }
        let truncated = (alpha * q.powi(n as i32 + 1) - 1.0).abs() <= TRUNCATION_DETECT_TOL;
        Ok(ChainParams { q, alpha, beta, gamma, delta, n, hop_sign, truncated })
    }

    /// Standard truncation alpha = q^{-N-1}.
    pub fn truncated(q: f64, beta: f64, gamma: f64, delta: f64, n: usize, hop_sign: i8) -> Result<Self> {
        let alpha = q.powi(-(n as i32) - 1);
        let mut p = ChainParams::new(q, alpha, beta, gamma, delta, n, hop_sign)?;
        p.truncated = true;
        Ok(p)
    }

    pub fn sites(&self) -> usize {
        self.n + 1
    }

    pub fn qp(&self, k: i64) -> f64 {
        self.q.powi(k as i32)
    }
}

/// Recurrence coefficients A_n (index 0..=N) and C_n (index 0..=N+1).
/// C_0 = 0 exactly; A_N = 0 under truncation.
#[derive(Debug, Clone)]
pub struct RacahCoeffs {
    pub a: Vec<f64>,
    pub c: Vec<f64>,
}

/// q-Pochhammer symbol (a; q)_n = prod_{j=0}^{n-1} (1 - a q^j), in
/// sign + log-magnitude form.
pub fn qpochhammer(a: f64, q: f64, n: usize) -> LogProduct {
    let mut acc = LogProduct::one();
    for j in 0..n {
        acc = acc.mul_factor(1.0 - a * q.powi(j as i32));
    }
    acc
}

fn check_denominator(value: f64, n: i64, denom: &str) -> Result<f64> {
    if value.abs() < 1e-14 {
        return Err(Error::SingularParameter { n, denom: denom.to_string() });
    }
    Ok(value)
}

fn coeff_a(p: &ChainParams, n: usize) -> Result<f64> {
    let (q, al, be, ga, de) = (p.q, p.alpha, p.beta, p.gamma, p.delta);
    let m = n as i64;
    if p.truncated && n == p.n {
        return Ok(0.0);
    }
    let qn1 = q.powi(m as i32 + 1);
    let num = (al * qn1 - 1.0) * (ga * qn1 - 1.0) * (al * be * qn1 - 1.0) * (be * de * qn1 - 1.0);
    let d1 = check_denominator(1.0 - al * be * p.qp(2 * m + 1), m, "1 - alpha*beta*q^(2n+1)")?;
    let d2 = check_denominator(1.0 - al * be * p.qp(2 * m + 2), m, "1 - alpha*beta*q^(2n+2)")?;
    Ok(num / (d1 * d2))
}

fn coeff_c(p: &ChainParams, n: usize) -> Result<f64> {
    let (q, al, be, ga, de) = (p.q, p.alpha, p.beta, p.gamma, p.delta);
    let m = n as i64;
    if n == 0 {
        // factor q^{n+1} - q vanishes identically
        return Ok(0.0);
    }
    let qn = p.qp(m);
    let num = (be * qn - 1.0) * (al * qn - de) * (al * be * qn - ga) * (p.qp(m + 1) - q);
    let d1 = check_denominator(1.0 - al * be * p.qp(2 * m), m, "1 - alpha*beta*q^(2n)")?;
    let d2 = check_denominator(1.0 - al * be * p.qp(2 * m + 1), m, "1 - alpha*beta*q^(2n+1)")?;
    Ok(num / (d1 * d2))
}

/// Recurrence coefficients of the q-Racah polynomials for all sites.
pub fn racah_coeffs(p: &ChainParams) -> Result<RacahCoeffs> {
    let a: Vec<f64> = (0..=p.n).map(|n| coeff_a(p, n)).collect::<Result<_>>()?;
    let c: Vec<f64> = (0..=p.n + 1).map(|n| coeff_c(p, n)).collect::<Result<_>>()?;
    if !a.iter().chain(c.iter()).all(|x| x.is_finite()) {
        return Err(Error::Domain("non-finite recurrence coefficient".into()));
    }
    Ok(RacahCoeffs { a, c })
}

/// Eigenvalue grid omega_k = q^{-k} + gamma*delta*q^{k+1}.
pub fn omega(p: &ChainParams, k: usize) -> f64 {
    debug_assert!(k <= p.n + 1);
    p.qp(-(k as i64)) + p.gamma * p.delta * p.qp(k as i64 + 1)
}

/// Position-basis eigenvalue lambda_n = q^{-n} + alpha*beta*q^{n+1}.
pub fn lambda_pos(p: &ChainParams, n: usize) -> f64 {
    debug_assert!(n <= p.n + 1);
    p.qp(-(n as i64)) + p.alpha * p.beta * p.qp(n as i64 + 1)
}

/// Values R_n(omega_k) for n = 0..=N via the three-term recurrence
/// (omega_k - 1 - gamma*delta*q) R_n = A_n R_{n+1} - (A_n + C_n) R_n + C_n R_{n-1}.
pub fn racah_poly_row(p: &ChainParams, coeffs: &RacahCoeffs, k: usize) -> Result<Vec<f64>> {
    let n_max = p.n;
    let x = omega(p, k) - 1.0 - p.gamma * p.delta * p.q;
    let mut r = vec![0.0; n_max + 1];
    r[0] = 1.0;
    for n in 0..n_max {
        let a_n = coeffs.a[n];
        if a_n == 0.0 {
            return Err(Error::DegenerateRecurrence { n });
        }
        let c_n = coeffs.c[n];
        let prev = if n == 0 { 0.0 } else { r[n - 1] };
        r[n + 1] = ((x + a_n + c_n) * r[n] - c_n * prev) / a_n;
    }
    Ok(r)
}

/// Orthonormality weight W_k in sign + log-magnitude form.
///
/// The printed closed form pairs beta^{-1} factors against (alpha*beta*q)^k
/// and against (beta^{-1}; q)_N; multiplying those pairs out gives an
/// expression that is regular at beta = 0 (and at delta = 0), so a single
/// evaluation path covers the generic and degenerate regimes:
///
///   (beta^{-1} gamma q; q)_N / (beta^{-1}; q)_N
///       = prod_{j=0}^{N-1} (beta - gamma q^{j+1}) / (beta - q^j),
///   (beta^{-1} gamma q; q)_k (alpha beta q)^k
///       = prod_{j=0}^{k-1} alpha q (beta - gamma q^{j+1}).
pub fn weight(p: &ChainParams, k: usize) -> Result<LogProduct> {
    let (q, al, be, ga, de) = (p.q, p.alpha, p.beta, p.gamma, p.delta);
    let n = p.n;
    let gd = ga * de;

    let mut acc = LogProduct::one();
    // paired N-length ratio
    for j in 0..n {
        let num = be - ga * p.qp(j as i64 + 1);
        let den = be - p.qp(j as i64);
        if den == 0.0 {
            return Err(Error::SingularParameter { n: j as i64, denom: "beta - q^j".into() });
        }
        acc = acc.mul_factor(num).div_factor(den);
    }
    acc = acc.mul(qpochhammer(de * q, q, n));
    let den = qpochhammer(gd * q * q, q, n);
    if den.sign == 0 {
        return Err(Error::SingularParameter { n: n as i64, denom: "(gamma*delta*q^2; q)_N".into() });
    }
    acc = acc.div(den);

    // k-length Pochhammers
    acc = acc
        .mul(qpochhammer(gd * q, q, k))
        .mul(qpochhammer(al * q, q, k))
        .mul(qpochhammer(be * de * q, q, k))
        .mul(qpochhammer(ga * q, q, k));
    for (label, lp) in [
        ("(q; q)_k", qpochhammer(q, q, k)),
        ("(gamma*delta*q/alpha; q)_k", qpochhammer(gd * q / al, q, k)),
        ("(delta*q; q)_k", qpochhammer(de * q, q, k)),
    ] {
        if lp.sign == 0 {
            return Err(Error::SingularParameter { n: k as i64, denom: label.into() });
        }
        acc = acc.div(lp);
    }
    // paired (beta^{-1} gamma q; q)_k (alpha beta q)^k
    for j in 0..k {
        let f = al * q * (be - ga * p.qp(j as i64 + 1));
        if f == 0.0 {
            return Err(Error::SingularParameter { n: j as i64, denom: "alpha*q*(beta - gamma*q^(j+1))".into() });
        }
        acc = acc.div_factor(f);
    }

    acc = acc.mul_factor(1.0 - gd * p.qp(2 * k as i64 + 1));
    let f = 1.0 - gd * q;
    if f == 0.0 {
        return Err(Error::SingularParameter { n: 0, denom: "1 - gamma*delta*q".into() });
    }
    Ok(acc.div_factor(f))
}

/// Coefficients of the tridiagonal action of the position operator on the
/// energy basis: Jbar_k couples |omega_k> to |omega_{k+1}> (k = 0..N-1) and
/// mubar_k is the diagonal term (k = 0..N), with Jbar_{-1} = Jbar_N = 0.
///
/// The beta^{-1} factor pairs with the overall alpha*beta*q, so
/// (1 - beta^{-1} gamma q^{k+1}) * alpha*beta*q = alpha*q*(beta - gamma*q^{k+1})
/// and the expression stays regular at beta = 0. Each square-root argument is
/// the product of the two printed radicands; the sign requirement is on the
/// product.
pub fn difference_coeffs(p: &ChainParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let (q, al, be, ga, de) = (p.q, p.alpha, p.beta, p.gamma, p.delta);
    let n = p.n;
    let gd = ga * de;
    let qp = |k: i64| p.qp(k);

    let mut jbar = Vec::with_capacity(n);
    for k in 0..n {
        let ki = k as i64;
        let d1 = check_denominator(1.0 - gd * qp(2 * ki + 1), ki, "1 - gamma*delta*q^(2k+1)")?;
        let d2 = check_denominator(1.0 - gd * qp(2 * ki + 2), ki, "1 - gamma*delta*q^(2k+2)")?;
        let d3 = check_denominator(1.0 - gd * qp(2 * ki + 3), ki, "1 - gamma*delta*q^(2k+3)")?;
        let t1 = (1.0 - al * qp(ki + 1))
            * (1.0 - be * de * qp(ki + 1))
            * (1.0 - ga * qp(ki + 1))
            * (1.0 - gd * qp(ki + 1))
            / (d1 * d2);
        let t2 = (1.0 - qp(ki + 1))
            * (1.0 - gd * qp(ki + 1) / al)
            * (1.0 - de * qp(ki + 1))
            * (al * q * (be - ga * qp(ki + 1)))
            / (d2 * d3);
        let rad = t1 * t2;
        if rad < 0.0 {
            return Err(Error::ParameterDomain {
                index: ki,
                what: format!("negative square-root argument {rad:e} in Jbar_k"),
            });
        }
        jbar.push(rad.sqrt());
    }

    let mut mubar = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ki = k as i64;
        let d1 = check_denominator(1.0 - gd * qp(2 * ki + 1), ki, "1 - gamma*delta*q^(2k+1)")?;
        let d2 = check_denominator(1.0 - gd * qp(2 * ki + 2), ki, "1 - gamma*delta*q^(2k+2)")?;
        let d0 = check_denominator(1.0 - gd * qp(2 * ki), ki, "1 - gamma*delta*q^(2k)")?;
        let t1 = (1.0 - al * qp(ki + 1))
            * (1.0 - be * de * qp(ki + 1))
            * (1.0 - ga * qp(ki + 1))
            * (1.0 - gd * qp(ki + 1))
            / (d1 * d2);
        let t2 = q * (1.0 - qp(ki)) * (1.0 - de * qp(ki)) * (be - ga * qp(ki)) * (al - gd * qp(ki))
            / (d0 * d1);
        mubar.push(t1 + t2 - 1.0 - al * be * q);
    }

    Ok((jbar, mubar))
}
