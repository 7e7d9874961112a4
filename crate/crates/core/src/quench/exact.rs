use faer::Mat;

use super::{diagonal, site_mask, Coupling, IsingSpec, QuenchResult};
use crate::entropy::von_neumann;
use crate::error::{Error, Result};
use crate::linalg::{self, real_symmetric_eig, ComplexMatrix, C64, ZERO};
use crate::mps::significant;
use crate::spectrum::Spectrum;

/// Largest chain the exact propagator accepts: each parity sector is
/// diagonalized as a dense `2^(N-1)` square matrix.
pub const EXACT_MAX_SITES: usize = 13;

const NORM_TOL: f64 = 1e-8;

struct Sector {
    states: Vec<usize>,
    energies: Vec<f64>,
    vectors: Mat<f64>,
    /// Initial state in the eigenbasis.
    coeffs: Vec<C64>,
}

/// `e^{-iHt} psi0` for arbitrary `t`, via the eigendecomposition of `H`
/// restricted to the two spin-flip parity sectors.
pub struct ExactPropagator {
    n: usize,
    sectors: Vec<Sector>,
}

impl ExactPropagator {
    pub fn new(spec: &IsingSpec, psi0: &[C64]) -> Result<Self> {
        spec.validate()?;
        if spec.n > EXACT_MAX_SITES {
            return Err(Error::ResourceLimit {
                what: format!("exact evolution on {} sites", spec.n),
                required: 1u128 << spec.n.min(127),
                limit: 1u128 << EXACT_MAX_SITES,
            });
        }
        let dim = 1usize << spec.n;
        if psi0.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "initial state has {} amplitudes, chain needs {dim}",
                psi0.len()
            )));
        }
        let n2: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        let bonds = spec.bonds();
        let mut sectors = Vec::with_capacity(2);
        for parity in 0..2u32 {
            let states: Vec<usize> = (0..dim).filter(|x| x.count_ones() % 2 == parity).collect();
            let mut pos = vec![usize::MAX; dim];
            for (k, &x) in states.iter().enumerate() {
                pos[x] = k;
            }
            let m = states.len();
            let mut h = Mat::<f64>::zeros(m, m);
            for (k, &x) in states.iter().enumerate() {
                let col = h.col_as_slice_mut(k);
                col[k] += diagonal(spec, x);
                if spec.coupling == Coupling::XX {
                    for &(i, j) in &bonds {
                        let y = x ^ site_mask(spec.n, i) ^ site_mask(spec.n, j);
                        col[pos[y]] -= 1.0;
                    }
                }
            }
            let (energies, vectors) = real_symmetric_eig(&h)?;
            let coeffs = (0..m)
                .map(|e| {
                    vectors
                        .col_as_slice(e)
                        .iter()
                        .zip(&states)
                        .fold(ZERO, |acc, (v, &x)| acc + psi0[x] * *v)
                })
                .collect();
            sectors.push(Sector {
                states,
                energies,
                vectors,
                coeffs,
            });
        }
        Ok(Self { n: spec.n, sectors })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn state_at(&self, t: f64) -> Vec<C64> {
        let mut out = vec![ZERO; 1 << self.n];
        for s in &self.sectors {
            let phased: Vec<C64> = s
                .coeffs
                .iter()
                .zip(&s.energies)
                .map(|(c, e)| c * C64::from_polar(1.0, -e * t))
                .collect();
            for (e, c) in phased.iter().enumerate() {
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                for (v, &x) in s.vectors.col_as_slice(e).iter().zip(&s.states) {
                    out[x] += c * *v;
                }
            }
        }
        out
    }
}

/// Singular values of the dense state across `cut`.
pub(crate) fn dense_cut_values(v: &[C64], n: usize, cut: usize) -> Result<Vec<f64>> {
    let m = ComplexMatrix::from_vec(1 << cut, 1 << (n - cut), v.to_vec())?;
    Ok(linalg::svd(&m)?.s)
}

pub(crate) fn entropy_of_values(s: &[f64]) -> Result<f64> {
    von_neumann(&Spectrum::from_singular_values(s)?.normalize()?)
}

/// Exact evolution recorded at `times` (increasing, starting at 0).
pub fn exact_evolve(psi0: &[C64], spec: &IsingSpec, times: &[f64]) -> Result<QuenchResult> {
    if times.first() != Some(&0.0) {
        return Err(Error::invalid("times must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times must be finite and strictly increasing"));
    }
    let prop = ExactPropagator::new(spec, psi0)?;
    let n = spec.n;
    let mut r = QuenchResult::empty(spec.boundary);
    for &t in times {
        let v = prop.state_at(t);
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::numerical(format!("norm drifted to {n2} at t = {t}")));
        }
        let mut max_rank = 1;
        let mut half = 0.0;
        for cut in 1..n {
            let s = dense_cut_values(&v, n, cut)?;
            max_rank = max_rank.max(significant(&s));
            if cut == n / 2 {
                half = entropy_of_values(&s)?;
            }
        }
        r.times.push(t);
        r.half_chain_entropy_bits.push(half);
        r.max_bond.push(max_rank);
        r.per_step_truncation.push(0.0);
        r.cum_truncation.push(0.0);
        r.norm_squared.push(n2);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, ONE};
    use crate::quench::{ising_hamiltonian, Boundary};

    fn all_up(n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; 1 << n];
        v[0] = ONE;
        v
    }

    fn grid(dt: f64, steps: usize) -> Vec<f64> {
        (0..=steps).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn matches_full_diagonalization() {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let spec = IsingSpec {
                n: 5,
                g: 0.7,
                boundary,
                coupling: Coupling::XX,
            };
            let h = ising_hamiltonian(&spec).unwrap();
            let eig = hermitian_eig(&h).unwrap();
            let mut psi0 = vec![ZERO; 32];
            psi0[0] = C64::new(0.6, 0.0);
            psi0[7] = C64::new(0.0, 0.8);
            let prop = ExactPropagator::new(&spec, &psi0).unwrap();
            let t = 0.83;
            // V diag(e^{-i E t}) V^dagger psi0
            let vh_psi: Vec<C64> = (0..32)
                .map(|e| (0..32).fold(ZERO, |acc, x| acc + eig.vectors[(x, e)].conj() * psi0[x]))
                .collect();
            let want: Vec<C64> = (0..32)
                .map(|x| {
                    (0..32).fold(ZERO, |acc, e| {
                        acc + eig.vectors[(x, e)] * C64::from_polar(1.0, -eig.values[e] * t) * vh_psi[e]
                    })
                })
                .collect();
            let got = prop.state_at(t);
            let err: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-10, "{boundary}: {err}");
        }
    }

    #[test]
    fn stationary_under_commuting_hamiltonian() {
        let spec = IsingSpec {
            n: 6,
            g: 0.0,
            boundary: Boundary::Periodic,
            coupling: Coupling::ZZ,
        };
        let r = exact_evolve(&all_up(6), &spec, &grid(0.25, 8)).unwrap();
        assert!(r.half_chain_entropy_bits.iter().all(|&s| s.abs() < 1e-12));
        assert!(r.max_bond.iter().all(|&d| d == 1));
    }

    #[test]
    fn initial_time_is_initial_state() {
        let spec = IsingSpec::critical(6, Boundary::Open);
        let prop = ExactPropagator::new(&spec, &all_up(6)).unwrap();
        let v = prop.state_at(0.0);
        assert!((v[0] - ONE).norm() < 1e-12);
        let r = exact_evolve(&all_up(6), &spec, &[0.0, 0.1]).unwrap();
        assert!(r.half_chain_entropy_bits[0].abs() < 1e-12);
        assert!(r.half_chain_entropy_bits[1] > 0.0);
    }

    #[test]
    fn norm_is_preserved() {
        let spec = IsingSpec::critical(8, Boundary::Periodic);
        let r = exact_evolve(&all_up(8), &spec, &grid(0.5, 6)).unwrap();
        assert!(r.norm_squared.iter().all(|n| (n - 1.0).abs() < 1e-8));
    }

    #[test]
    fn rejects_bad_input() {
        let spec = IsingSpec::critical(4, Boundary::Open);
        assert!(exact_evolve(&all_up(4), &spec, &[0.1, 0.2]).is_err());
        assert!(exact_evolve(&all_up(4), &spec, &[0.0, 0.2, 0.1]).is_err());
        assert!(exact_evolve(&all_up(3), &spec, &[0.0]).is_err());
        let big = IsingSpec::critical(EXACT_MAX_SITES + 1, Boundary::Open);
        assert!(matches!(
            ExactPropagator::new(&big, &[ONE]),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
