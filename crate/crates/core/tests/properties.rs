use mpslab_core::entropy::{
    max_renyi_given_truncation, renyi_entropy, smooth_renyi, truncation_error, RenyiOrder,
};
use mpslab_core::linalg::{hermitian_eig, hermitian_eigenvalues, svd, ComplexMatrix, C64};
use mpslab_core::quench::{
    tebd_evolve, Boundary, ExactPropagator, IsingSpec, TebdConfig, TruncationPolicy,
};
use mpslab_core::verify::{random_density, sample_with_tail, trial_rng, verify_eps_lower};
use mpslab_core::zoo::{chi_copies, magic_block_spectrum, magic_entropy_closed_form, magic_state};
use mpslab_core::{distances, MatrixProductState, Spectrum};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

fn random_spectrum(dim: usize, rng: &mut ChaCha8Rng) -> Spectrum {
    // a random power sharpens or flattens the distribution
    let k = rng.random_range(0.2..6.0);
    let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>().powf(k)).collect();
    let s: f64 = v.iter().sum();
    Spectrum::probabilities(v.into_iter().map(|x| x / s).collect()).unwrap()
}

fn random_state(n: usize, bond: usize, seed: u64) -> MatrixProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixProductState::random(n, 2, bond, &mut rng).unwrap()
}

fn trace_norm(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).unwrap().iter().map(|x| x.abs()).sum()
}

fn projector(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

/// `min_a f(a)` over `[lo, hi]`: grid, then golden-section refinement.
fn minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let steps = 400;
    let h = (hi - lo) / steps as f64;
    let best = (0..=steps)
        .map(|k| lo + k as f64 * h)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).min(f(best))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn svd_reconstructs(rows in 1usize..9, cols in 1usize..9, seed in any::<u64>()) {
        let m = random_matrix(rows, cols, seed);
        let d = svd(&m).unwrap();
        prop_assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(d.s.iter().all(|&x| x >= 0.0));
        let back = d.u_s().matmul(&d.vh).unwrap();
        let err = back.sub(&m).unwrap().frobenius_norm() / m.frobenius_norm();
        prop_assert!(err < 1e-10, "residual {}", err);
    }

    #[test]
    fn density_eigenvalues_sum_to_trace(dim in 1usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(dim, &mut rng);
        let eig = hermitian_eig(&rho).unwrap();
        let sum: f64 = eig.values.iter().sum();
        prop_assert!((sum - rho.trace().re).abs() < 1e-10);
    }

    #[test]
    fn eps_lower_bound_on_random_states(n in 4usize..8, bond in 1usize..4, seed in any::<u64>()) {
        let psi = random_state(n, 4, seed);
        let report = verify_eps_lower(&psi, bond, 16, seed).unwrap();
        prop_assert!(!report.is_violated(), "{:?}", report);
    }

    #[test]
    fn schmidt_spectrum_matches_reduced_density(n in 2usize..7, seed in any::<u64>()) {
        let psi = random_state(n, 3, seed);
        for k in 1..n {
            let a = psi.schmidt_spectrum(k).unwrap();
            let b = hermitian_eigenvalues(&psi.reduced_density(0..k).unwrap()).unwrap();
            for (i, x) in b.iter().enumerate() {
                let y = a.values().get(i).copied().unwrap_or(0.0);
                prop_assert!((x - y).abs() < 1e-8, "cut {}: {} vs {}", k, x, y);
            }
        }
    }

    #[test]
    fn distance_measures_match_scale_minimization(seed in any::<u64>()) {
        let a = random_state(3, 2, seed);
        let b = random_state(3, 2, seed ^ 0x9e37_79b9);
        let r = distances(&a, &b).unwrap();
        let va = a.to_dense().unwrap();
        let vb = b.to_dense().unwrap();
        // align the phase of b with a, so a real scale suffices
        let ov = vb.iter().zip(&va).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
        let vb: Vec<C64> = vb.iter().map(|x| x * phase).collect();
        let pa = projector(&va);
        let pb = projector(&vb);
        let t = minimize(|s| trace_norm(&pa.sub(&pb.scale(C64::new(s, 0.0))).unwrap()), 0.0, 2.0);
        let v = minimize(
            |s| va.iter().zip(&vb).map(|(x, y)| (x - y * s).norm_sqr()).sum::<f64>().sqrt(),
            0.0,
            2.0,
        );
        prop_assert!((t - r.trace_measure).abs() < 1e-6, "T {} vs {}", t, r.trace_measure);
        prop_assert!((v - r.two_norm_measure).abs() < 1e-6, "V {} vs {}", v, r.two_norm_measure);
        if r.theta <= std::f64::consts::FRAC_PI_4 {
            prop_assert!((r.trace_measure - (2.0 * r.theta).sin()).abs() < 1e-10);
        }
        prop_assert!((r.two_norm_measure - r.theta.sin()).abs() < 1e-10);
    }

    #[test]
    fn canonicalize_and_compress_keep_shape(n in 2usize..8, center in 0usize..8, bond in 1usize..5, seed in any::<u64>()) {
        let psi = random_state(n, 4, seed);
        let c = psi.canonicalize(center.min(n - 1)).unwrap();
        prop_assert_eq!((c.len(), c.phys_dim()), (n, 2));
        let (m, _) = psi.compress(bond).unwrap();
        prop_assert_eq!((m.len(), m.phys_dim()), (n, 2));
        prop_assert!(m.max_bond() <= bond);
    }

    #[test]
    fn compress_error_within_squared_bound(n in 3usize..8, bond in 1usize..5, seed in any::<u64>()) {
        // ||psi - phi||_2^2 is the orthogonal sum of the discarded weights,
        // each at most eps_k
        let psi = random_state(n, 6, seed);
        let (_, r) = psi.compress(bond).unwrap();
        prop_assert!(r.realized_error * r.realized_error <= r.eps_sum + 1e-12);
        prop_assert!(r.realized_error + 1e-12 >= r.lower_bound.sqrt());
    }

    #[test]
    fn renyi_limits_at_one(dim in 1usize..65, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spectrum(dim, &mut rng);
        let vn = renyi_entropy(&s, RenyiOrder::VON_NEUMANN).unwrap();
        for a in [1.0 - 1e-6, 1.0 + 1e-6] {
            let x = renyi_entropy(&s, RenyiOrder::new(a).unwrap()).unwrap();
            prop_assert!((x - vn).abs() <= 1e-3);
        }
    }

    #[test]
    fn smooth_renyi_nonincreasing_in_eps(dim in 1usize..17, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spectrum(dim, &mut rng);
        for a in [RenyiOrder::ZERO, RenyiOrder::HALF, RenyiOrder::COLLISION] {
            let plain = renyi_entropy(&s, a).unwrap();
            prop_assert!((smooth_renyi(&s, a, 0.0).unwrap() - plain).abs() < 1e-12);
            let mut last = plain;
            for k in 1..20 {
                let v = smooth_renyi(&s, a, k as f64 * 0.05).unwrap();
                prop_assert!(v <= last + 1e-12);
                last = v;
            }
        }
    }

    #[test]
    fn truncation_error_monotone_and_convex(dim in 1usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_spectrum(dim, &mut rng);
        let e: Vec<f64> = (1..=dim + 2).map(|d| truncation_error(&s, d).unwrap()).collect();
        prop_assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(e.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= -1e-12));
        prop_assert!(e[dim - 1].abs() < 1e-15);
    }

    #[test]
    fn sampled_tails_respect_majorization(d_bits in 1usize..4, extra in 1usize..3, eps in 0.01f64..0.5, seed in any::<u64>()) {
        let block = d_bits + extra;
        let bond = 1usize << d_bits;
        let mut rng = trial_rng(seed, 0);
        let p = sample_with_tail(eps, bond, block, &mut rng);
        let s = Spectrum::probabilities(p).unwrap();
        for a in [1.5, 2.0, 3.0] {
            let a = RenyiOrder::new(a).unwrap();
            let bound = max_renyi_given_truncation(eps, bond, block, a).unwrap();
            prop_assert!(renyi_entropy(&s, a).unwrap() <= bound + 1e-8);
        }
    }
}

#[test]
fn renyi_monotone_in_order() {
    let orders: Vec<RenyiOrder> = [0.0, 0.25, 0.5, 0.75, 0.999, 1.0, 1.001, 1.5, 2.0, 3.0, 10.0, f64::INFINITY]
        .iter()
        .map(|&a| RenyiOrder::new(a).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let dim = rng.random_range(1..33);
        let s = random_spectrum(dim, &mut rng);
        let v: Vec<f64> = orders.iter().map(|&a| renyi_entropy(&s, a).unwrap()).collect();
        for w in v.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}: {:?}", s.values(), v);
        }
    }
}

#[test]
fn magic_blocks_match_closed_form() {
    for n in 1..=7 {
        for p in [1.0 / n as f64, 1.0 / (n * n) as f64, 0.3] {
            let psi = magic_state(n, p).unwrap();
            for l in 1..=n {
                // from the state itself, and from the structural shortcut
                let s = psi.schmidt_spectrum(l).unwrap();
                let shortcut = magic_block_spectrum(n, p, 0..l).unwrap();
                assert_eq!(s.len(), shortcut.len());
                let mut want = vec![1.0 - p];
                want.extend(std::iter::repeat_n(p / (1u64 << l) as f64, 1 << l));
                want.retain(|&x| x > 0.0);
                want.sort_by(|a, b| b.total_cmp(a));
                assert_eq!(s.len(), want.len());
                for (x, y) in s.values().iter().zip(&want) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn magic_renyi_lower_bound() {
    for n in 2..=10usize {
        let p = 1.0 / n as f64;
        for l in 1..=n {
            for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let s = magic_entropy_closed_form(p, l, RenyiOrder::new(a).unwrap());
                let bound = l as f64 - a / (1.0 - a) * (n as f64).log2();
                assert!(s >= bound - 1e-6, "N={n} L={l} a={a}: {s} < {bound}");
            }
        }
    }
}

#[test]
fn chi_blocks_additive_and_bounded() {
    for n in [3usize, 4] {
        let chi = chi_copies(n, 1.0 / n as f64, 3).unwrap();
        let len = chi.len();
        let per = chi.sites_per_copy();
        let cut_max = (1..len)
            .map(|k| renyi_entropy(&chi.cut_spectrum(k).unwrap(), RenyiOrder::VON_NEUMANN).unwrap())
            .fold(0.0, f64::max);
        for start in 0..len {
            for end in start + 1..=len {
                let s = chi.block_entropy(start..end, RenyiOrder::VON_NEUMANN).unwrap();
                assert!(s <= 2.0 * cut_max + 1e-9);
                // a block that starts and ends on copy boundaries is pure
                if start % per == 0 && end % per == 0 {
                    assert!(s.abs() < 1e-9);
                }
                // blocks starting at 0 reduce to one cut
                if start == 0 && end < len {
                    let c = renyi_entropy(&chi.cut_spectrum(end).unwrap(), RenyiOrder::VON_NEUMANN).unwrap();
                    assert!((s - c).abs() < 1e-9);
                }
            }
        }
    }
}

fn all_up(n: usize) -> MatrixProductState {
    MatrixProductState::product_state(2, &vec![0; n]).unwrap()
}

fn all_up_dense(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = C64::new(1.0, 0.0);
    v
}

#[test]
fn tebd_entropy_within_schmidt_rank_bound() {
    let spec = IsingSpec::critical(12, Boundary::Open);
    for policy in [TruncationPolicy::MaxBond(3), TruncationPolicy::MaxBond(8), TruncationPolicy::Epsilon(1e-6)] {
        let r = tebd_evolve(&all_up(12), &spec, &TebdConfig::new(0.05, 40, policy), None).unwrap();
        assert_eq!(r.half_chain_entropy_bits[0], 0.0);
        for (s, d) in r.half_chain_entropy_bits.iter().zip(&r.max_bond) {
            assert!(*s <= (*d as f64).log2() + 1e-9);
        }
        for (n2, c) in r.norm_squared.iter().zip(&r.cum_truncation) {
            assert!((1.0 - n2 - c).abs() < 1e-6);
        }
    }
}

#[test]
fn tebd_second_order_at_ten_sites() {
    let spec = IsingSpec::critical(10, Boundary::Open);
    let prop = ExactPropagator::new(&spec, &all_up_dense(10)).unwrap();
    let err = |dt: f64, steps: usize| {
        let cfg = TebdConfig::new(dt, steps, TruncationPolicy::Epsilon(0.0));
        let r = tebd_evolve(&all_up(10), &spec, &cfg, Some(&prop)).unwrap();
        *r.exact_error.unwrap().last().unwrap()
    };
    let ratio = err(0.05, 10) / err(0.025, 20);
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}
