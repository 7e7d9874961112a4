//! Brute-force minimization of Rényi entropies over the ball
//! `{sigma >= 0, sum sigma = 1, sum |sigma - p| <= eps}`.

use crate::entropy::{renyi_of_values, RenyiOrder};
use crate::error::{Error, Result};

const FEAS_TOL: f64 = 1e-12;

/// Exact minimum by vertex enumeration.
///
/// The ball is a finite union of polytopes (one per sign pattern of
/// `sigma - p`), and every Rényi entropy is quasi-concave, so the minimum
/// sits at a vertex of one of them. A vertex fixes every coordinate to `0`
/// or `p_i` except one or two, which the unit-sum and (for two) the active
/// budget constraint determine.
pub fn smooth_renyi_oracle(p: &[f64], a: RenyiOrder, eps: f64) -> Result<f64> {
    let n = p.len();
    if n == 0 || n > 12 {
        return Err(Error::invalid("oracle supports 1..=12 outcomes"));
    }
    let mut best = renyi_of_values(p, a);
    let mut consider = |sigma: &[f64]| {
        let sum: f64 = sigma.iter().sum();
        let dist: f64 = sigma.iter().zip(p).map(|(s, q)| (s - q).abs()).sum();
        if sigma.iter().all(|&s| s >= -FEAS_TOL) && (sum - 1.0).abs() <= 1e-10 && dist <= eps + 1e-10 {
            let clean: Vec<f64> = sigma.iter().map(|&s| if s < FEAS_TOL { 0.0 } else { s }).collect();
            best = best.min(renyi_of_values(&clean, a));
        }
    };
    // each coordinate: 0 -> zero, 1 -> p_i, 2 -> free
    let patterns = 3usize.pow(n as u32);
    for code in 0..patterns {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        if free.len() > 2 {
            continue;
        }
        let mut sigma: Vec<f64> = (0..n).map(|i| if state[i] == 1 { p[i] } else { 0.0 }).collect();
        let fixed_sum: f64 = sigma.iter().sum();
        let fixed_cost: f64 = (0..n).filter(|&i| state[i] == 0).map(|i| p[i]).sum();
        match free.as_slice() {
            [] => consider(&sigma),
            [i] => {
                sigma[*i] = 1.0 - fixed_sum;
                consider(&sigma);
            }
            [i, j] => {
                // x + y = r, s_i (x - p_i) + s_j (y - p_j) = eps - cost,
                // opposite signs (equal signs give a degenerate edge)
                let r = 1.0 - fixed_sum;
                let budget = eps - fixed_cost;
                for (si, sj) in [(1.0, -1.0), (-1.0, 1.0)] {
                    // si x + sj (r - x) = budget + si p_i + sj p_j
                    let rhs = budget + si * p[*i] + sj * p[*j] - sj * r;
                    let x = rhs / (si - sj);
                    sigma[*i] = x;
                    sigma[*j] = r - x;
                    if si * (x - p[*i]) >= -FEAS_TOL && sj * (r - x - p[*j]) >= -FEAS_TOL {
                        consider(&sigma);
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(best)
}

/// Grid minimization for two outcomes at resolution `step`.
pub fn smooth_renyi_grid_oracle(p: &[f64], a: RenyiOrder, eps: f64, step: f64) -> Result<f64> {
    if p.len() != 2 {
        return Err(Error::invalid("grid oracle is for two outcomes"));
    }
    let steps = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    for k in 0..=steps {
        let x = k as f64 / steps as f64;
        let sigma = [x, 1.0 - x];
        let dist = (x - p[0]).abs() + (1.0 - x - p[1]).abs();
        if dist <= eps + 1e-12 {
            best = best.min(renyi_of_values(&sigma, a));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::smooth_renyi;
    use crate::spectrum::Spectrum;

    #[test]
    fn two_outcome_pure_reachable() {
        let v = smooth_renyi_oracle(&[0.6, 0.4], RenyiOrder::ZERO, 0.8).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn agrees_with_greedy_on_examples() {
        let orders = [RenyiOrder::ZERO, RenyiOrder::HALF, RenyiOrder::COLLISION];
        for p in [vec![0.4, 0.3, 0.2, 0.1], vec![0.25; 4], vec![0.7, 0.3], vec![0.5, 0.49, 0.01]] {
            let s = Spectrum::probabilities(p.clone()).unwrap();
            for a in orders {
                for eps in [0.05, 0.2] {
                    let o = smooth_renyi_oracle(&p, a, eps).unwrap();
                    let g = smooth_renyi(&s, a, eps).unwrap();
                    assert!((o - g).abs() < 1e-9, "{p:?} {a} {eps}: {o} vs {g}");
                }
            }
        }
    }

    #[test]
    fn grid_oracle_is_close() {
        for a in [RenyiOrder::HALF, RenyiOrder::COLLISION] {
            let e = smooth_renyi_oracle(&[0.55, 0.45], a, 0.2).unwrap();
            let g = smooth_renyi_grid_oracle(&[0.55, 0.45], a, 0.2, 1e-3).unwrap();
            assert!((e - g).abs() < 1e-3);
        }
    }
}
