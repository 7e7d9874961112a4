//! Quick sanity checks with known answers, run by `mpslab selftest`.

use mpslab_core::entropy::{renyi_entropy, truncation_error, RenyiOrder};
use mpslab_core::quench::{
    entropy_growth_report, exact_evolve, ising_hamiltonian, tebd_evolve, Boundary, Coupling, IsingSpec,
    TebdConfig, TruncationPolicy,
};
use mpslab_core::verify::verify_multiplicativity;
use mpslab_core::zoo::{elementary_state, magic_state, Elementary};
use mpslab_core::{Result, Spectrum, C64};

use crate::config::parse_config;
use crate::output::Table;

pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn ghz_entropy() -> Result<(bool, String)> {
    let s = elementary_state(Elementary::Ghz, 6, 2)?.schmidt_spectrum(3)?;
    let h = renyi_entropy(&s, RenyiOrder::VON_NEUMANN)?;
    Ok((close(h, 1.0, 1e-12), format!("S = {h}")))
}

fn product_is_trivial() -> Result<(bool, String)> {
    let m = magic_state(3, 0.0)?;
    let ranks: Vec<usize> = (1..m.len()).map(|k| m.schmidt_spectrum(k).map(|s| s.rank())).collect::<Result<_>>()?;
    Ok((ranks.iter().all(|&r| r == 1), format!("ranks {ranks:?}")))
}

fn uniform_renyi() -> Result<(bool, String)> {
    let s = Spectrum::probabilities(vec![0.25; 4])?;
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
        worst = worst.max((renyi_entropy(&s, RenyiOrder::new(a)?)? - 2.0).abs());
    }
    Ok((worst < 1e-12, format!("max deviation {worst:e}")))
}

fn truncation_example() -> Result<(bool, String)> {
    let e = truncation_error(&Spectrum::probabilities(vec![0.5, 0.3, 0.2])?, 2)?;
    Ok((close(e, 0.2, 1e-15), format!("eps = {e}")))
}

fn two_site_hamiltonian() -> Result<(bool, String)> {
    let spec = IsingSpec::critical(2, Boundary::Open);
    let h = ising_hamiltonian(&spec)?;
    let want = [(0, 0, -2.0), (3, 3, 2.0), (0, 3, -1.0), (1, 1, 0.0)];
    let ok = want.iter().all(|&(i, j, v)| (h[(i, j)] - C64::new(v, 0.0)).norm() < 1e-15);
    Ok((ok, "H = -XX - Z1 - Z2".into()))
}

fn commuting_quench() -> Result<(bool, String)> {
    let spec = IsingSpec {
        n: 6,
        g: 0.0,
        boundary: Boundary::Open,
        coupling: Coupling::ZZ,
    };
    let psi = elementary_state(Elementary::AllUp, 6, 2)?;
    let r = tebd_evolve(&psi, &spec, &TebdConfig::new(0.05, 20, TruncationPolicy::Epsilon(1e-10)), None)?;
    let ok = r.max_bond.iter().all(|&d| d == 1) && r.half_chain_entropy_bits.iter().all(|s| s.abs() < 1e-12);
    Ok((ok, format!("final bond {:?}", r.max_bond.last())))
}

fn stationary_slope() -> Result<(bool, String)> {
    let spec = IsingSpec {
        n: 4,
        g: 0.5,
        boundary: Boundary::Periodic,
        coupling: Coupling::ZZ,
    };
    let mut v = vec![C64::new(0.0, 0.0); 16];
    v[0] = C64::new(1.0, 0.0);
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
    let g = entropy_growth_report(&exact_evolve(&v, &spec, &times)?, (0.5, 2.0))?;
    Ok((g.slope_bits.abs() < 1e-12, format!("slope {}", g.slope_bits)))
}

fn single_copy_multiplicativity() -> Result<(bool, String)> {
    let r = verify_multiplicativity(0.5, 1)?;
    Ok((!r.is_violated() && r.checks == 1, format!("margin {}", r.worst_margin)))
}

fn csv_shapes() -> Result<(bool, String)> {
    let mut t = Table::new("t", &["a"]);
    let empty = t.to_csv(None).lines().count();
    t.push(vec![1.5.into()]);
    let one = t.to_csv(None).lines().count();
    Ok((empty == 1 && one == 2, format!("{empty} and {one} lines")))
}

fn config_rejections() -> Result<(bool, String)> {
    let zero = parse_config("experiment = \"table1_scan\"\n[family]\nn = [0]\n");
    let unknown = parse_config("experiment = \"audenaert\"\nseed = 1\nbogus = 1\n");
    let ok = zero.is_err_and(|e| e.to_string().contains("N ≥ 1")) && unknown.is_err_and(|e| e.to_string().contains("bogus"));
    Ok((ok, "N = 0 and unknown keys rejected".into()))
}

pub fn run() -> Vec<SelfCheck> {
    let checks: [(&'static str, fn() -> Result<(bool, String)>); 10] = [
        ("ghz_half_chain_entropy_is_one_bit", ghz_entropy),
        ("magic_p0_is_product", product_is_trivial),
        ("uniform_spectrum_order_independent", uniform_renyi),
        ("truncation_error_example", truncation_example),
        ("two_site_ising_hamiltonian", two_site_hamiltonian),
        ("commuting_quench_stays_product", commuting_quench),
        ("stationary_run_has_zero_slope", stationary_slope),
        ("single_copy_multiplicativity", single_copy_multiplicativity),
        ("csv_header_and_row_lines", csv_shapes),
        ("config_rejects_bad_input", config_rejections),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => SelfCheck { name, passed, detail },
            Err(e) => SelfCheck {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
