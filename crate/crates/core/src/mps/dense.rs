use super::{significant, CanonicalForm, MatrixProductState, SiteTensor, DEFAULT_DENSE_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ONE};

/// Number of sites `N` with `d^N == len`, if any.
pub(crate) fn site_count(len: usize, phys: usize) -> Option<usize> {
    if phys < 2 {
        return None;
    }
    let mut n = 0;
    let mut acc = 1usize;
    while acc < len {
        acc = acc.checked_mul(phys)?;
        n += 1;
    }
    (acc == len && n >= 1).then_some(n)
}

impl MatrixProductState {
    /// Successive-SVD decomposition of a dense amplitude vector (site 0 is
    /// the most significant digit of the index).
    ///
    /// Without `max_bond` the decomposition is exact up to dropping
    /// numerically-zero Schmidt values. With it, each cut keeps at most
    /// `max_bond` values; the result is not renormalized.
    pub fn from_dense(v: &[C64], phys: usize, max_bond: Option<usize>) -> Result<Self> {
        Self::from_dense_within(v, phys, max_bond, DEFAULT_DENSE_THRESHOLD)
    }

    pub fn from_dense_within(
        v: &[C64],
        phys: usize,
        max_bond: Option<usize>,
        threshold: usize,
    ) -> Result<Self> {
        if v.len() > threshold {
            return Err(Error::ResourceLimit {
                what: "dense state".into(),
                required: v.len() as u128,
                limit: threshold as u128,
            });
        }
        let n = site_count(v.len(), phys).ok_or_else(|| {
            Error::invalid(format!(
                "vector length {} is not a positive power of d = {phys}",
                v.len()
            ))
        })?;
        if max_bond == Some(0) {
            return Err(Error::invalid("max_bond must be at least 1"));
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        if n == 1 {
            let t = SiteTensor::new(1, phys, 1, v.to_vec())?;
            return Ok(Self::from_sites_unchecked(phys, vec![t]));
        }

        let mut sites = Vec::with_capacity(n);
        let mut rest = ComplexMatrix::from_vec(phys, v.len() / phys, v.to_vec())?;
        let mut bond = 1;
        for k in 0..n - 1 {
            let d = linalg::svd(&rest)?;
            let mut keep = significant(&d.s);
            if let Some(cap) = max_bond {
                keep = keep.min(cap);
            }
            let d = d.truncate(keep);
            sites.push(SiteTensor::from_left_matrix(d.u.clone(), phys));
            bond = keep;
            let remaining = phys.pow((n - 1 - k) as u32);
            // (bond, d^(n-1-k)) -> (bond*d, d^(n-2-k))
            rest = d.s_vh().reshape(bond * phys, remaining / phys)?;
        }
        // `rest` is now (bond*d) x 1.
        let last = rest.reshape(bond, phys)?;
        sites.push(SiteTensor::from_right_matrix(last, phys));
        let mut m = Self::from_sites_unchecked(phys, sites);
        m.canonical = CanonicalForm::Mixed(n - 1);
        m.norm_hint = Some(m.sites[n - 1].data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        Ok(m)
    }

    /// Dense amplitude vector of length `d^N`.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        self.to_dense_within(DEFAULT_DENSE_THRESHOLD)
    }

    pub fn to_dense_within(&self, threshold: usize) -> Result<Vec<C64>> {
        let required = self.dense_len().unwrap_or(u128::MAX);
        if required > threshold as u128 {
            return Err(Error::ResourceLimit {
                what: format!("dense vector of {} sites with d = {}", self.len(), self.phys),
                required,
                limit: threshold as u128,
            });
        }
        // Running (prefix, bond) matrix.
        let mut acc = ComplexMatrix::from_vec(1, 1, vec![ONE])?;
        for site in &self.sites {
            let prod = acc.matmul(&site.right_matrix())?;
            let rows = prod.rows() * self.phys;
            acc = prod.reshape(rows, site.right)?;
        }
        Ok(acc.into_vec())
    }
}
