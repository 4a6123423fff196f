//! Self-contained numeric kernels: symmetric eigensolvers, polynomial root
//! finding, elementary symmetric polynomials, log-space products and matrix
//! residual norms.
//!
//! The tridiagonal path is an implicit-QL iteration with Wilkinson shifts;
//! the dense path reduces to tridiagonal form by Householder reflections
//! first. Polynomial roots come from the balanced companion matrix with one
//! Newton polish per root.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub const DEFAULT_EIG_TOL: f64 = 1e-12;

/// Dense square real matrix, row-major. General (not necessarily symmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Top-left k x k block.
    pub fn block(&self, k: usize) -> Mat {
        assert!(k <= self.n);
        Mat::from_fn(k, |i, j| self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Real symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Self {
        assert_eq!(offdiag.len() + 1, diag.len());
        assert!(offdiag.iter().all(|x| x.is_finite()));
        SymTridiag { diag, offdiag }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_mat(&self) -> Mat {
        let n = self.size();
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.offdiag[i];
                m[(i + 1, i)] = self.offdiag[i];
            }
        }
        m
    }
}

/// Dense symmetric matrix; symmetrized on construction so the invariant holds
/// exactly.
#[derive(Debug, Clone)]
pub struct DenseSym {
    mat: Mat,
}

impl DenseSym {
    /// Symmetrize (m + m^T)/2 so off-pair rounding differences vanish.
    pub fn symmetrized(m: Mat) -> Self {
        let n = m.size();
        let mut out = m.clone();
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        DenseSym { mat: out }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        // only the lower triangle is evaluated
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        DenseSym { mat: m }
    }

    pub fn size(&self) -> usize {
        self.mat.size()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }
}

impl std::ops::Index<(usize, usize)> for DenseSym {
    type Output = f64;
    fn index(&self, ij: (usize, usize)) -> &f64 {
        &self.mat[ij]
    }
}

/// Eigendecomposition of a real symmetric matrix. `values` sorted ascending,
/// `vectors[j]` is the unit eigenvector of `values[j]` with its
/// largest-magnitude component made positive.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomp {
    fn sort_and_fix_signs(values: Vec<f64>, columns: Vec<Vec<f64>>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut vals = Vec::with_capacity(n);
        let mut vecs = Vec::with_capacity(n);
        for &idx in &order {
            let mut v = columns[idx].clone();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in v.iter_mut() {
                    *x /= norm;
                }
            }
            let mut imax = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[imax].abs() {
                    imax = i;
                }
            }
            if v[imax] < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            vals.push(values[idx]);
            vecs.push(v);
        }
        EigenDecomp { values: vals, vectors: vecs }
    }
}

const MAX_QL_SWEEPS: usize = 60;

/// Implicit QL with Wilkinson shifts on the tridiagonal (d, e) pair,
/// accumulating rotations into the columns `z`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // locate a negligible subdiagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::Convergence { index: l });
            }
            // Wilkinson shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for zk in z.iter_mut() {
                    f = zk[i + 1];
                    zk[i + 1] = s * zk[i] + c * f;
                    zk[i] = c * zk[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigendecomposition of a symmetric tridiagonal matrix.
pub fn eig_sym_tridiag(m: &SymTridiag, _tol: f64) -> Result<EigenDecomp> {
    let n = m.size();
    let mut d = m.diag.clone();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&m.offdiag);
    // z[k] is row k of the accumulated transform; columns are eigenvectors
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row = vec![0.0; n];
            row[k] = 1.0;
            row
        })
        .collect();
    ql_implicit(&mut d, &mut e, &mut z)?;
    let columns: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| z[k][j]).collect()).collect();
    Ok(EigenDecomp::sort_and_fix_signs(d, columns))
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form,
/// accumulating the orthogonal transform (tred2).
fn householder_tridiag(a: &mut Mat) -> (Vec<f64>, Vec<f64>) {
    let n = a.size();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g_acc += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[(i, j)];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    e[j] -= hh * f;
                    let g = e[j];
                    for k in 0..=j {
                        let corr = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= corr;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    let corr = g * a[(k, i)];
                    a[(k, j)] -= corr;
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
    (d, e)
}

/// Eigendecomposition of a dense symmetric matrix: Householder tridiagonal
/// reduction followed by implicit QL.
pub fn eig_dense_sym(m: &DenseSym, tol: f64) -> Result<EigenDecomp> {
    let n = m.size();
    if n == 1 {
        return Ok(EigenDecomp { values: vec![m[(0, 0)]], vectors: vec![vec![1.0]] });
    }
    let mut a = m.mat().clone();
    let (mut d, mut e_full) = householder_tridiag(&mut a);
    // shift e so that e[i] couples (i, i+1), as ql_implicit expects
    let mut e = vec![0.0; n];
    for i in 0..n - 1 {
        e[i] = e_full[i + 1];
    }
    e_full.clear();
    let mut z: Vec<Vec<f64>> = (0..n).map(|k| (0..n).map(|j| a[(k, j)]).collect()).collect();
    ql_implicit(&mut d, &mut e, &mut z)?;
    let columns: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| z[k][j]).collect()).collect();
    let dec = EigenDecomp::sort_and_fix_signs(d, columns);
    debug_assert!(tol > 0.0);
    Ok(dec)
}

/// Real-coefficient polynomial, index i = coefficient of degree i. Trailing
/// zeros are trimmed on construction.
#[derive(Debug, Clone)]
pub struct PolyReal {
    coeffs: Vec<f64>,
}

impl PolyReal {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        PolyReal { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn derivative_at(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * i as f64;
        }
        acc
    }
}

const BALANCE_RADIX: f64 = 2.0;

/// Osborne balancing: diagonal similarity scaling to equalize row/column
/// norms. Eigenvalues are unchanged.
fn balance(m: &mut nalgebra::DMatrix<f64>) {
    let n = m.nrows();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / BALANCE_RADIX {
                c *= BALANCE_RADIX;
                r /= BALANCE_RADIX;
                f *= BALANCE_RADIX;
            }
            while c >= r * BALANCE_RADIX {
                c /= BALANCE_RADIX;
                r *= BALANCE_RADIX;
                f /= BALANCE_RADIX;
            }
            if (c + r) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// All roots (with multiplicity) of a real polynomial, via the balanced
/// companion matrix followed by one Newton polish per root.
pub fn poly_roots(p: &PolyReal) -> Result<Vec<Complex64>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    // strip exact zero roots at the origin
    let mut low = 0usize;
    while p.coeffs[low] == 0.0 {
        low += 1;
    }
    let mut roots: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); low];
    let c = &p.coeffs[low..];
    let deg = c.len() - 1;
    if deg >= 1 {
        let lead = c[deg];
        let mut comp = nalgebra::DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -c[i] / lead;
        }
        balance(&mut comp);
        let eigs = comp.complex_eigenvalues();
        for ev in eigs.iter() {
            let mut z = Complex64::new(ev.re, ev.im);
            // single Newton polish on the full polynomial
            let f = p.eval_complex(z);
            let df = p.derivative_at(z);
            if df.norm() > 0.0 {
                let step = f / df;
                if step.norm() < 0.5 * (1.0 + z.norm()) {
                    z -= step;
                }
            }
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Elementary symmetric polynomials [S_0, ..., S_n] of the given values,
/// S_0 = 1, accumulated one value at a time.
pub fn elementary_symmetric(vals: &[Complex64]) -> Vec<Complex64> {
    let n = vals.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (count, &v) in vals.iter().enumerate() {
        for r in (1..=count + 1).rev() {
            let prev = e[r - 1];
            e[r] += v * prev;
        }
    }
    e
}

/// A signed product held as sign * exp(log_magnitude). `sign == 0` forces the
/// value 0 regardless of the stored magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProduct {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogProduct {
    pub fn one() -> Self {
        LogProduct { log_magnitude: 0.0, sign: 1 }
    }

    pub fn zero() -> Self {
        LogProduct { log_magnitude: f64::NEG_INFINITY, sign: 0 }
    }

    pub fn from_factor(x: f64) -> Self {
        if x == 0.0 {
            LogProduct::zero()
        } else {
            LogProduct { log_magnitude: x.abs().ln(), sign: if x > 0.0 { 1 } else { -1 } }
        }
    }

    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.log_magnitude.exp()
        }
    }

    pub fn mul(self, other: LogProduct) -> LogProduct {
        if self.sign == 0 || other.sign == 0 {
            return LogProduct::zero();
        }
        LogProduct {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            sign: self.sign * other.sign,
        }
    }

    pub fn div(self, other: LogProduct) -> LogProduct {
        if self.sign == 0 {
            return LogProduct::zero();
        }
        assert!(other.sign != 0, "division by zero LogProduct");
        LogProduct {
            log_magnitude: self.log_magnitude - other.log_magnitude,
            sign: self.sign * other.sign,
        }
    }

    pub fn mul_factor(self, x: f64) -> LogProduct {
        self.mul(LogProduct::from_factor(x))
    }

    pub fn div_factor(self, x: f64) -> LogProduct {
        self.div(LogProduct::from_factor(x))
    }

    pub fn sqrt(self) -> LogProduct {
        assert!(self.sign >= 0, "sqrt of negative LogProduct");
        if self.sign == 0 {
            return LogProduct::zero();
        }
        LogProduct { log_magnitude: 0.5 * self.log_magnitude, sign: 1 }
    }
}

/// Sign/log-magnitude product of a list of finite factors.
pub fn log_product(factors: &[f64]) -> LogProduct {
    let mut acc = LogProduct::one();
    for &f in factors {
        acc = acc.mul_factor(f);
    }
    acc
}

const RESIDUAL_FLOOR: f64 = 1e-300;

/// Normalized commutator residual ||ab - ba||_F / (||a||_F ||b||_F + floor).
pub fn commutator_residual(a: &Mat, b: &Mat) -> Result<f64> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch { left: a.size(), right: b.size() });
    }
    let ab = a.matmul(b);
    let ba = b.matmul(a);
    let num = ab.sub(&ba).frobenius();
    Ok(num / (a.frobenius() * b.frobenius() + RESIDUAL_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiag_1x1() {
        let mu = 0.37;
        let m = SymTridiag::new(vec![-mu], vec![]);
        let d = eig_sym_tridiag(&m, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(d.values, vec![-mu]);
        assert_eq!(d.vectors, vec![vec![1.0]]);
    }

    #[test]
    fn tridiag_2x2_symmetric() {
        let m = SymTridiag::new(vec![0.0, 0.0], vec![1.0]);
        let d = eig_sym_tridiag(&m, DEFAULT_EIG_TOL).unwrap();
        assert!((d.values[0] + 1.0).abs() < 1e-14);
        assert!((d.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dense_identity_and_diag() {
        let id = DenseSym::from_fn(3, |i, j| if i == j { 1.0 } else { 0.0 });
        let d = eig_dense_sym(&id, DEFAULT_EIG_TOL).unwrap();
        for v in &d.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let m = DenseSym::from_fn(2, |i, j| {
            if i == j {
                if i == 0 { 2.0 } else { -1.0 }
            } else {
                0.0
            }
        });
        let d = eig_dense_sym(&m, DEFAULT_EIG_TOL).unwrap();
        assert!((d.values[0] + 1.0).abs() < 1e-14);
        assert!((d.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn roots_of_quadratic_and_linear() {
        let p = PolyReal::new(vec![-1.0, 0.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let p = PolyReal::new(vec![0.0, 1.0]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].norm() < 1e-15);
    }

    #[test]
    fn zero_polynomial_rejected() {
        let p = PolyReal::new(vec![0.0]);
        assert!(matches!(poly_roots(&p), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn elementary_symmetric_small() {
        assert_eq!(elementary_symmetric(&[]), vec![Complex64::new(1.0, 0.0)]);
        let a = Complex64::new(2.0, 0.0);
        let b = Complex64::new(-3.0, 1.0);
        let e = elementary_symmetric(&[a, b]);
        assert!((e[0] - 1.0).norm() < 1e-15);
        assert!((e[1] - (a + b)).norm() < 1e-15);
        assert!((e[2] - a * b).norm() < 1e-15);
    }

    #[test]
    fn log_product_basic() {
        let p = log_product(&[2.0, 3.0]);
        assert_eq!(p.sign, 1);
        assert!((p.value() - 6.0).abs() < 1e-14);

        let p = log_product(&[-1.0, 5.0, 0.0]);
        assert_eq!(p.sign, 0);
        assert_eq!(p.value(), 0.0);
    }

    #[test]
    fn commutator_trivial_and_nontrivial() {
        let id = Mat::identity(4);
        let m = Mat::from_fn(4, |i, j| (i * 4 + j) as f64);
        assert!(commutator_residual(&id, &m).unwrap() < 1e-15);

        let d = Mat::from_diag(&[1.0, 2.0]);
        let swap = Mat::from_fn(2, |i, j| if i != j { 1.0 } else { 0.0 });
        assert!(commutator_residual(&d, &swap).unwrap() > 0.1);

        let a = Mat::identity(2);
        let b = Mat::identity(3);
        assert!(matches!(
            commutator_residual(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
