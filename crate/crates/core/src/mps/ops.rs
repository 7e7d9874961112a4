use std::f64::consts::FRAC_PI_4;
use std::ops::Range;

use super::{MatrixProductState, DEFAULT_DENSE_THRESHOLD, NORM_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE};

/// `<a|b>` by left-to-right transfer-matrix contraction.
pub fn overlap(a: &MatrixProductState, b: &MatrixProductState) -> Result<C64> {
    if a.len() != b.len() || a.phys_dim() != b.phys_dim() {
        return Err(Error::ShapeMismatch(format!(
            "overlap of ({} sites, d = {}) with ({} sites, d = {})",
            a.len(),
            a.phys_dim(),
            b.len(),
            b.phys_dim()
        )));
    }
    Ok(overlap_unchecked(a, b))
}

pub(crate) fn overlap_unchecked(a: &MatrixProductState, b: &MatrixProductState) -> C64 {
    // env[(alpha, beta)] with alpha the bond index of `a`, beta of `b`.
    let mut env = ComplexMatrix::from_vec(1, 1, vec![ONE]).expect("1x1");
    for (sa, sb) in a.sites().iter().zip(b.sites()) {
        // T[alpha, (i, r_b)] = sum_beta env[alpha, beta] B[beta, i, r_b]
        let t = env
            .matmul(&sb.right_matrix())
            .expect("bond dimensions agree");
        // reshape to (alpha*d + i, r_b), contract with conj(A) over (alpha, i)
        let t = t
            .reshape(sa.left_dim() * sa.phys_dim(), sb.right_dim())
            .expect("size preserved");
        env = sa
            .left_matrix()
            .adjoint()
            .matmul(&t)
            .expect("bond dimensions agree");
    }
    env[(0, 0)]
}

/// Angle between two states and the distance measures derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceReport {
    /// `arccos(|<a|b>| / (|a| |b|))`, in `[0, pi/2]`.
    pub theta: f64,
    /// `cos(theta)`.
    pub fidelity: f64,
    /// Optimized trace-norm distance of the projectors: `sin(2 theta)` for
    /// `theta <= pi/4`, and 1 beyond.
    pub trace_measure: f64,
    /// Optimized two-norm distance of the vectors: `sin(theta)`.
    pub two_norm_measure: f64,
    /// `|| a^ - b^ ||_tr` for the normalized pure states: `2 sin(theta)`.
    pub trace_distance_normalized: f64,
}

impl DistanceReport {
    pub fn from_fidelity(fidelity: f64) -> Self {
        let fidelity = fidelity.clamp(0.0, 1.0);
        let theta = fidelity.acos();
        let (s, c) = theta.sin_cos();
        let trace_measure = if theta <= FRAC_PI_4 {
            (2.0 * s * c).min(1.0)
        } else {
            1.0
        };
        Self {
            theta,
            fidelity,
            trace_measure,
            two_norm_measure: s,
            trace_distance_normalized: 2.0 * (1.0 - fidelity * fidelity).max(0.0).sqrt(),
        }
    }

    pub fn from_theta(theta: f64) -> Self {
        Self::from_fidelity(theta.clamp(0.0, std::f64::consts::FRAC_PI_2).cos())
    }
}

pub fn distances(a: &MatrixProductState, b: &MatrixProductState) -> Result<DistanceReport> {
    let ab = overlap(a, b)?;
    let na = a.norm_squared();
    let nb = b.norm_squared();
    if na <= 0.0 || nb <= 0.0 {
        return Err(Error::invalid("distance to a zero-norm state"));
    }
    Ok(DistanceReport::from_fidelity(ab.norm() / (na * nb).sqrt()))
}

impl MatrixProductState {
    /// Density matrix of the contiguous block `range` (dimension
    /// `d^len x d^len`, block sites ordered as in the chain).
    pub fn reduced_density(&self, range: Range<usize>) -> Result<ComplexMatrix> {
        self.reduced_density_within(range, DEFAULT_DENSE_THRESHOLD)
    }

    pub fn reduced_density_within(
        &self,
        range: Range<usize>,
        threshold: usize,
    ) -> Result<ComplexMatrix> {
        let n = self.len();
        if range.start >= range.end || range.end > n {
            return Err(Error::invalid(format!(
                "block {range:?} is not a nonempty range within {n} sites"
            )));
        }
        let block = range.end - range.start;
        let dim = (self.phys as u128)
            .checked_pow(block as u32)
            .unwrap_or(u128::MAX);
        if dim.saturating_mul(dim) > threshold as u128 {
            return Err(Error::ResourceLimit {
                what: format!("reduced density of a {block}-site block"),
                required: dim.saturating_mul(dim),
                limit: threshold as u128,
            });
        }
        let dim = dim as usize;
        let c = self.canonicalize(range.start)?;
        let n2 = c.norm_hint.unwrap_or(0.0).powi(2);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        // Phi[alpha, x, beta]: alpha = bond left of the block (orthonormal
        // environment), beta = bond right of it.
        let first = &c.sites[range.start];
        let left = first.left_dim();
        let mut phi = first.left_matrix(); // (alpha*d + i, r)
        for k in range.start + 1..range.end {
            let site = &c.sites[k];
            let prod = phi.matmul(&site.right_matrix())?;
            let rows = prod.rows() * self.phys;
            phi = prod.reshape(rows, site.right_dim())?;
        }
        let right = phi.cols();
        // The right environment is not orthonormal in general, so contract
        // it explicitly: G[beta, beta'] = <R_beta'|R_beta>.
        let renv = right_environment(&c, range.end);
        // phi is (alpha*dim + x, beta) -> rho[x, x'] = sum phi[a x b] G[b b'] conj(phi[a x' b'])
        let phig = phi.matmul(&renv)?;
        let mut rho = ComplexMatrix::zeros(dim, dim);
        for a in 0..left {
            let pa = ComplexMatrix::from_fn(dim, right, |x, b| phig[(a * dim + x, b)]);
            let qa = ComplexMatrix::from_fn(dim, right, |x, b| phi[(a * dim + x, b)]);
            let term = pa.matmul(&qa.adjoint())?;
            rho = rho.add(&term)?;
        }
        Ok(rho)
    }
}

/// Gram matrix `G[b, b'] = sum over sites >= start of conj(R_b') R_b`,
/// ordered so that `phi · G · phi†` contracts the right part.
fn right_environment(m: &MatrixProductState, start: usize) -> ComplexMatrix {
    let mut env = ComplexMatrix::from_vec(1, 1, vec![ONE]).expect("1x1");
    for site in m.sites()[start..].iter().rev() {
        // env'[l, l'] = sum_{i, r, r'} A[l, i, r] env[r, r'] conj(A[l', i, r'])
        let d = site.phys_dim();
        let a = site.right_matrix(); // (l, i*R + r)
        let envk = block_diag(&env, d);
        env = a.matmul(&envk).expect("dims").matmul(&a.adjoint()).expect("dims");
    }
    env
}

fn block_diag(m: &ComplexMatrix, copies: usize) -> ComplexMatrix {
    let (r, c) = (m.rows(), m.cols());
    let mut out = ComplexMatrix::zeros(r * copies, c * copies);
    for k in 0..copies {
        for i in 0..r {
            for j in 0..c {
                out[(k * r + i, k * c + j)] = m[(i, j)];
            }
        }
    }
    out
}
