//! Randomized and deterministic checks of the approximation inequalities.
//!
//! Every stochastic harness derives one generator per trial from the master
//! seed and the trial index, runs the trials in parallel, and reduces the
//! results in trial order, so reports do not depend on the thread count.

mod scaling;
mod smooth_oracle;

pub use scaling::{ring_pairs, scaling_experiment, Family, ScalingRow, ScalingSpec};
pub use smooth_oracle::{smooth_renyi_grid_oracle, smooth_renyi_oracle};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::entropy::{
    audenaert_bound, extremal_distribution, max_renyi_given_truncation, renyi_entropy,
    renyi_of_values, BoundReport, BoundStatus, RenyiOrder,
};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, ComplexMatrix, C64, ZERO};
use crate::mps::{distances, DistanceReport, MatrixProductState, TruncationReport};
use crate::spectrum::Spectrum;

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn fold_margins(mut report: BoundReport, margins: impl IntoIterator<Item = f64>) -> BoundReport {
    for m in margins {
        report.record(m);
    }
    report
}

/// Checks that random normalized `D`-MPS candidates, and the compressed
/// state itself, stay at normalized trace distance at least
/// `max_k eps_k(D)` from `psi`.
pub fn verify_eps_lower(psi: &MatrixProductState, bond: usize, trials: usize, seed: u64) -> Result<BoundReport> {
    if trials == 0 {
        return Err(Error::invalid("trials >= 1"));
    }
    psi.require_normalized()?;
    let spectra = psi.schmidt_spectra()?;
    let lower = TruncationReport::from_spectra(&spectra, bond)?.lower_bound;
    let (n, d) = (psi.len(), psi.phys_dim());
    let margins = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let phi = MatrixProductState::random(n, d, bond, &mut rng)?;
            Ok(distances(psi, &phi)?.trace_distance_normalized - lower)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (compressed, _) = psi.compress(bond)?;
    let own = distances(psi, &compressed)?.trace_distance_normalized - lower;
    let report = BoundReport::new("eps_lower", lower)
        .with_input("D", bond as f64)
        .with_input("trials", trials as f64)
        .with_seed(seed);
    Ok(fold_margins(report, margins.into_iter().chain([own])))
}

/// One row of [`verify_eps_upper`].
#[derive(Clone, Debug, PartialEq)]
pub struct UpperRow {
    pub bond: usize,
    pub eps_sum: f64,
    pub bound: f64,
    pub realized_error: f64,
    pub max_eps: f64,
}

/// Compresses `psi` at every `D` of the grid and checks
/// `|| psi - phi_D ||_2 <= 2 sum_k eps_k(D)`.
pub fn verify_eps_upper(psi: &MatrixProductState, bonds: &[usize]) -> Result<(BoundReport, Vec<UpperRow>)> {
    psi.require_normalized()?;
    let mut report = BoundReport::new("eps_upper", f64::NAN);
    let mut rows = Vec::with_capacity(bonds.len());
    for &bond in bonds {
        let (_, r) = psi.compress(bond)?;
        report.record(r.upper_bound - r.realized_error);
        rows.push(UpperRow {
            bond,
            eps_sum: r.eps_sum,
            bound: r.upper_bound,
            realized_error: r.realized_error,
            max_eps: r.lower_bound,
        });
    }
    Ok((report, rows))
}

/// The same sweep checked in squared form,
/// `|| psi - phi_D ||_2^2 <= 2 sum_k eps_k(D)`.
pub fn verify_eps_upper_squared(psi: &MatrixProductState, bonds: &[usize]) -> Result<BoundReport> {
    let (_, rows) = verify_eps_upper(psi, bonds)?;
    let report = BoundReport::new("eps_upper_squared", f64::NAN);
    Ok(fold_margins(report, rows.iter().map(|r| r.bound - r.realized_error.powi(2))))
}

/// Fidelities of a candidate and of its factorized replacement with the
/// product target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductCheck {
    pub original: f64,
    pub factorized: f64,
    pub schmidt_rank: usize,
    pub ties: usize,
}

/// Builds the factorized candidate from the Schmidt decomposition of `phi`
/// at the `A|B` cut and compares overlaps with `psi_a ⊗ psi_b`.
///
/// `phi` is a dense vector on the joint space (`A` indices most
/// significant); `psi_a`, `psi_b` are dense and normalized.
pub fn factorize_candidate(psi_a: &[C64], psi_b: &[C64], phi: &[C64]) -> Result<ProductCheck> {
    let (da, db) = (psi_a.len(), psi_b.len());
    if phi.len() != da * db {
        return Err(Error::ShapeMismatch("candidate does not live on the joint space".into()));
    }
    let m = ComplexMatrix::from_vec(da, db, phi.to_vec())?;
    let d = linalg::svd(&m)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().filter(|&&x| x > 1e-12 * top.max(1e-300)).count().max(1);
    // alpha_k = column k of u, beta_k = row k of vh (as a vector)
    let a: Vec<C64> = (0..rank)
        .map(|k| (0..da).map(|i| psi_a[i].conj() * d.u[(i, k)]).sum())
        .collect();
    let b: Vec<C64> = (0..rank)
        .map(|k| (0..db).map(|j| psi_b[j].conj() * d.vh[(k, j)]).sum())
        .collect();
    let phase = |z: C64| if z.norm() > 0.0 { C64::new(z.norm(), 0.0) / z } else { C64::new(1.0, 0.0) };

    let bmax = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tie_tol = 1e-12 * bmax.max(1e-300);
    let set: Vec<usize> = (0..rank).filter(|&l| bmax - b[l].norm() <= tie_tol).collect();

    let mut left = vec![ZERO; da];
    for k in 0..rank {
        let w = phase(a[k]) * d.s[k];
        for i in 0..da {
            left[i] += w * d.u[(i, k)];
        }
    }
    let mut right = vec![ZERO; db];
    let norm = 1.0 / (set.len() as f64).sqrt();
    for &l in &set {
        let w = phase(b[l]) * norm;
        for j in 0..db {
            right[j] += w * d.vh[(l, j)];
        }
    }
    let fa: C64 = psi_a.iter().zip(&left).map(|(x, y)| x.conj() * y).sum();
    let fb: C64 = psi_b.iter().zip(&right).map(|(x, y)| x.conj() * y).sum();
    let original: C64 = (0..da)
        .flat_map(|i| (0..db).map(move |j| (i, j)))
        .map(|(i, j)| (psi_a[i] * psi_b[j]).conj() * phi[i * db + j])
        .sum();
    Ok(ProductCheck {
        original: original.norm(),
        factorized: (fa * fb).norm(),
        schmidt_rank: rank,
        ties: set.len(),
    })
}

/// Random `D`-MPS on the joint chain of `psi_a` and `psi_b`, each replaced
/// by its factorized counterpart; the product fidelity must not drop.
pub fn verify_product_structure(
    psi_a: &MatrixProductState,
    psi_b: &MatrixProductState,
    bond: usize,
    trials: usize,
    seed: u64,
) -> Result<BoundReport> {
    psi_a.require_normalized()?;
    psi_b.require_normalized()?;
    if psi_a.phys_dim() != psi_b.phys_dim() {
        return Err(Error::ShapeMismatch("physical dimensions differ".into()));
    }
    let va = psi_a.to_dense()?;
    let vb = psi_b.to_dense()?;
    let n = psi_a.len() + psi_b.len();
    let d = psi_a.phys_dim();
    let checks = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let phi = MatrixProductState::random(n, d, bond, &mut rng)?.to_dense()?;
            factorize_candidate(&va, &vb, &phi)
        })
        .collect::<Result<Vec<_>>>()?;
    let rank_one = checks.iter().filter(|c| c.schmidt_rank == 1).count();
    let report = BoundReport::new("product_structure", f64::NAN)
        .with_input("D", bond as f64)
        .with_input("trials", trials as f64)
        .with_input("rank_one_candidates", rank_one as f64)
        .with_seed(seed);
    Ok(fold_margins(report, checks.iter().map(|c| c.factorized - c.original)))
}

/// Evaluates `T(phi^K, psi^K) >= sqrt(K/8) T(phi, psi)` for a single-copy
/// measure `t_single`, inside the window `T^2 <= 2/K` (inclusive).
pub fn verify_multiplicativity(t_single: f64, copies: usize) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&t_single) || copies == 0 {
        return Err(Error::invalid("need 0 <= T <= 1 and K >= 1"));
    }
    let theta = t_single.asin() / 2.0;
    let fk = theta.cos().powi(copies as i32);
    let tk = DistanceReport::from_fidelity(fk).trace_measure;
    let bound = (copies as f64 / 8.0).sqrt() * t_single;
    let mut report = BoundReport::new("multiplicativity", bound)
        .with_input("T", t_single)
        .with_input("K", copies as f64)
        .with_input("T_K", tk);
    // inclusive window, with room for rounding in T^2
    if t_single * t_single <= 2.0 / copies as f64 * (1.0 + 1e-12) {
        report.record(tk - bound);
    } else {
        report.status = BoundStatus::NotApplicable;
    }
    Ok(report)
}

/// Random density matrix `G G† / tr` with complex Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let w = g.matmul(&g.adjoint()).expect("square");
    let t = w.trace().re;
    // symmetrize away rounding so the Hermiticity check is exact
    let wh = w.adjoint();
    ComplexMatrix::from_fn(dim, dim, |i, j| (w[(i, j)] + wh[(i, j)]) * (0.5 / t))
}

/// `|S(rho) - S(sigma)| <= T log(dim - 1) + H(T)` on random pairs, with
/// `T` half the trace distance.
pub fn verify_audenaert(trials: usize, dim: usize, seed: u64) -> Result<BoundReport> {
    if dim < 2 {
        return Err(Error::invalid("dim >= 2"));
    }
    let margins = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let rho = random_density(dim, &mut rng);
            let sigma = random_density(dim, &mut rng);
            audenaert_margin(&rho, &sigma)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = BoundReport::new("audenaert", f64::NAN)
        .with_input("dim", dim as f64)
        .with_input("trials", trials as f64)
        .with_seed(seed);
    Ok(fold_margins(report, margins))
}

/// Bound minus entropy difference for one pair of density matrices.
pub fn audenaert_margin(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let dim = rho.rows();
    let t = 0.5
        * hermitian_eigenvalues(&rho.sub(sigma)?)?
            .iter()
            .map(|x| x.abs())
            .sum::<f64>();
    let s = |m: &ComplexMatrix| -> Result<f64> {
        let e = Spectrum::new(hermitian_eigenvalues(m)?)?;
        renyi_entropy(&e, RenyiOrder::VON_NEUMANN)
    };
    let diff = (s(rho)? - s(sigma)?).abs();
    Ok(audenaert_bound(t.min(1.0), dim)? - diff)
}

/// Sorted distribution on `2^L` outcomes whose weight past position `D`
/// is exactly `eps`.
pub fn sample_with_tail<R: Rng + ?Sized>(eps: f64, bond: usize, block: usize, rng: &mut R) -> Vec<f64> {
    let dim = 1usize << block;
    let rest = dim - bond;
    // concentration spread over several decades to reach both flat and
    // peaked distributions
    let shape = 10f64.powf(rng.random_range(-1.5..1.5));
    let gamma = Gamma::new(shape, 1.0).expect("positive shape");
    let draw = |k: usize, rng: &mut R| -> Vec<f64> {
        let mut v: Vec<f64> = (0..k).map(|_| gamma.sample(rng).max(1e-300)).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    let mut tail: Vec<f64> = draw(rest, rng).into_iter().map(|x| x * eps).collect();
    // a peaked tail can exceed what the head may hold; mix it toward the
    // flat tail until every head entry can sit above it
    let flat = eps / rest as f64;
    let cap = (1.0 - eps) / bond as f64;
    let tmax = tail.iter().copied().fold(0.0, f64::max);
    if tmax > cap && tmax > flat {
        let lambda = ((cap - flat) / (tmax - flat)).clamp(0.0, 1.0);
        tail.iter_mut().for_each(|x| *x = lambda * *x + (1.0 - lambda) * flat);
    }
    let tmax = tail.iter().copied().fold(0.0, f64::max);
    let slack = (1.0 - eps - bond as f64 * tmax).max(0.0);
    let mut p: Vec<f64> = draw(bond, rng).into_iter().map(|x| tmax + slack * x).collect();
    p.extend(tail);
    p.sort_by(|a, b| b.total_cmp(a));
    p
}

/// Samples distributions with tail `eps` past `D` and checks their Rényi
/// entropy against [`max_renyi_given_truncation`]; the extremal
/// distribution itself must attain the bound.
pub fn verify_majorization(
    eps: f64,
    bond: usize,
    block: usize,
    alphas: &[RenyiOrder],
    samples: usize,
    seed: u64,
) -> Result<(BoundReport, f64)> {
    let bounds = alphas
        .iter()
        .map(|&a| max_renyi_given_truncation(eps, bond, block, a))
        .collect::<Result<Vec<_>>>()?;
    let extremal = extremal_distribution(eps, bond, block)?;
    let attain = alphas
        .iter()
        .zip(&bounds)
        .map(|(&a, b)| (renyi_of_values(&extremal, a) - b).abs())
        .fold(0.0, f64::max);
    let margins: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let p = sample_with_tail(eps, bond, block, &mut rng);
            alphas
                .iter()
                .zip(&bounds)
                .map(|(&a, b)| b - renyi_of_values(&p, a))
                .collect()
        })
        .collect();
    let report = BoundReport::new("majorization", f64::NAN)
        .with_input("eps", eps)
        .with_input("D", bond as f64)
        .with_input("L", block as f64)
        .with_input("samples", samples as f64)
        .with_seed(seed);
    Ok((fold_margins(report, margins.into_iter().flatten()), attain))
}
