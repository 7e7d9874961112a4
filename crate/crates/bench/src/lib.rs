//! Inputs shared by the kernel benchmarks.

use mpslab_core::quench::{tebd_evolve, Boundary, IsingSpec, TebdConfig, TruncationPolicy};
use mpslab_core::verify::trial_rng;
use mpslab_core::zoo::{elementary_state, Elementary};
use mpslab_core::{ComplexMatrix, MatrixProductState, QuenchResult, C64};

/// Dense matrix with deterministic, well-spread entries.
pub fn dense_matrix(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let x = (i * 131 + j * 71 + 7) as f64;
        C64::new((x * 0.37).sin(), (x * 0.11).cos())
    })
}

/// Normalized random MPS with bonds capped at `bond`.
pub fn random_mps(n: usize, phys: usize, bond: usize, seed: u64) -> MatrixProductState {
    let mut rng = trial_rng(seed, 0);
    MatrixProductState::random(n, phys, bond, &mut rng).expect("valid shape")
}

/// `steps` TEBD steps of the critical Ising quench from the all-up state.
pub fn ising_quench(n: usize, steps: usize, bond: usize) -> QuenchResult {
    let spec = IsingSpec::critical(n, Boundary::Open);
    let psi = elementary_state(Elementary::AllUp, n, 2).expect("valid chain");
    let cfg = TebdConfig::new(0.05, steps, TruncationPolicy::MaxBond(bond));
    tebd_evolve(&psi, &spec, &cfg, None).expect("evolution runs")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shapes() {
        let m = dense_matrix(5, 3);
        assert_eq!((m.rows(), m.cols()), (5, 3));
        let psi = random_mps(8, 2, 4, 1);
        assert_eq!(psi.len(), 8);
        assert!(psi.max_bond() <= 4);
        assert!((psi.norm_squared() - 1.0).abs() < 1e-10);
        assert_eq!(ising_quench(6, 3, 8).len(), 4);
    }
}
