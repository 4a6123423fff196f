//! Full and truncated correlation matrices, their eigenvalues and the
//! entanglement entropy of the Fermi-sea state.

use crate::chain::SpectralData;
use crate::error::{Error, Result};
use crate::numerics::{eig_dense_sym, DenseSym, DEFAULT_EIG_TOL};

/// Subsystem = sites 0..=L, filled modes k = 0..=K.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegionSpec {
    pub l: usize,
    pub k: usize,
}

impl RegionSpec {
    /// Both lambda_{L+1} and omega_{K+1} must exist, so L, K <= N-1.
    pub fn check(&self, n: usize) -> Result<()> {
        if self.l + 1 > n {
            return Err(Error::Domain(format!("L = {} out of range (need L <= N-1 = {})", self.l, n - 1)));
        }
        if self.k + 1 > n {
            return Err(Error::Domain(format!("K = {} out of range (need K <= N-1 = {})", self.k, n - 1)));
        }
        Ok(())
    }
}

/// Complete correlation matrix of the Fermi sea with modes 0..=K filled:
/// Chat_{nm} = sum_{k<=K} phi_n(omega_k) phi_m(omega_k). An orthogonal
/// projector of rank K+1.
pub fn full_correlation(s: &SpectralData, k_filled: usize) -> DenseSym {
    let n = s.phi.size();
    assert!(k_filled < n);
    DenseSym::from_fn(n, |a, b| {
        (0..=k_filled).map(|k| s.phi[(a, k)] * s.phi[(b, k)]).sum()
    })
}

/// Truncated correlation matrix: top-left (L+1) x (L+1) block of Chat.
pub fn truncated_correlation(s: &SpectralData, r: &RegionSpec) -> Result<DenseSym> {
    r.check(s.phi.size() - 1)?;
    Ok(DenseSym::from_fn(r.l + 1, |a, b| {
        (0..=r.k).map(|k| s.phi[(a, k)] * s.phi[(b, k)]).sum()
    }))
}

pub const EIG_CLAMP_TOL: f64 = 1e-9;

/// Binary-entropy sum over correlation eigenvalues, with the 0 ln 0 = 0
/// convention. Entries must lie in [-tol, 1+tol]; they are clamped to [0, 1]
/// before evaluation.
pub fn entanglement_entropy(c_eigs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &c) in c_eigs.iter().enumerate() {
        if c < -EIG_CLAMP_TOL || c > 1.0 + EIG_CLAMP_TOL {
            return Err(Error::Domain(format!(
                "correlation eigenvalue {c} at index {i} outside [0,1] beyond clamp tolerance"
            )));
        }
        let c = c.clamp(0.0, 1.0);
        if c > 0.0 && c < 1.0 {
            total -= c * c.ln() + (1.0 - c) * (1.0 - c).ln();
        }
    }
    Ok(total)
}

/// Everything the entropy pipeline produces for one region.
#[derive(Debug, Clone)]
pub struct CorrelationData {
    pub chat: DenseSym,
    pub c: DenseSym,
    pub c_eigs: Vec<f64>,
    pub entropy: f64,
}

pub fn correlation_data(s: &SpectralData, r: &RegionSpec) -> Result<CorrelationData> {
    let chat = full_correlation(s, r.k);
    let c = truncated_correlation(s, r)?;
    let dec = eig_dense_sym(&c, DEFAULT_EIG_TOL)?;
    let entropy = entanglement_entropy(&dec.values)?;
    Ok(CorrelationData { chat, c, c_eigs: dec.values, entropy })
}

/// Entropy S(L) for each L in the range, at fixed mode filling.
pub fn entropy_profile(
    s: &SpectralData,
    k_filled: usize,
    l_range: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, f64)>> {
    let mut rows = Vec::new();
    for l in l_range {
        let r = RegionSpec { l, k: k_filled };
        let data = correlation_data(s, &r)?;
        rows.push((l, data.entropy));
    }
    Ok(rows)
}
