use crate::error::{Error, Result};
use crate::linalg::CLAMP_TOL;

/// Sum tolerance for a spectrum to count as a probability distribution.
pub const NORM_TOL: f64 = 1e-8;

/// Ordered eigenvalue spectrum of a reduced density matrix (or, equivalently,
/// the squared Schmidt coefficients across a cut).
///
/// Values are nonnegative and sorted nonincreasing on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts and validates `values`. Entries in `[-1e-12, 0)` are clamped to
    /// zero; more negative entries are a numerical failure.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(Error::numerical("non-finite spectral value"));
            }
            if *v < 0.0 {
                if *v < -CLAMP_TOL {
                    return Err(Error::numerical(format!(
                        "negative spectral value {v:.3e}"
                    )));
                }
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// Like [`Spectrum::new`] but additionally requires unit sum.
    pub fn probabilities(values: Vec<f64>) -> Result<Self> {
        let s = Self::new(values)?;
        s.require_normalized()?;
        Ok(s)
    }

    /// Spectrum from singular values (squares them).
    pub fn from_singular_values(s: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|x| x * x).collect())
    }

    /// The pure-state spectrum `(1)`.
    pub fn pure() -> Self {
        Self { values: vec![1.0] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn is_normalized(&self) -> bool {
        (self.total() - 1.0).abs() <= NORM_TOL
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.total()))
        }
    }

    /// Rescales to unit sum.
    pub fn normalize(&self) -> Result<Self> {
        let t = self.total();
        if t <= 0.0 {
            return Err(Error::numerical("cannot normalize an empty spectrum"));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v / t).collect(),
        })
    }

    /// Number of values above the rank threshold.
    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > CLAMP_TOL).count()
    }

    /// Spectrum of the tensor product of two independent blocks.
    pub fn tensor(&self, other: &Spectrum) -> Spectrum {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for a in &self.values {
            for b in &other.values {
                out.push(a * b);
            }
        }
        out.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_clamps() {
        let s = Spectrum::new(vec![0.25, -1e-13, 0.75]).unwrap();
        assert_eq!(s.values(), &[0.75, 0.25, 0.0]);
        assert!(s.is_normalized());
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn rejects_clearly_negative() {
        assert!(Spectrum::new(vec![1.0, -1e-6]).is_err());
    }

    #[test]
    fn probabilities_checks_sum() {
        assert!(Spectrum::probabilities(vec![0.5, 0.4]).is_err());
        assert!(Spectrum::probabilities(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn tensor_product() {
        let a = Spectrum::new(vec![0.5, 0.5]).unwrap();
        let b = Spectrum::new(vec![0.75, 0.25]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.values(), &[0.375, 0.375, 0.125, 0.125]);
    }
}
