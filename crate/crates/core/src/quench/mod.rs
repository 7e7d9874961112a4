//! Quench of the all-up chain under the transverse-field Ising model
//! `H = -sum C_i C_{i+1} - g sum Z_i` (`C = X` normally, `C = Z` for the
//! commuting test Hamiltonian). Basis state `0` is spin up (`Z = +1`).

mod exact;
mod tebd;

use std::fmt;
use std::str::FromStr;

pub use exact::{exact_evolve, ExactPropagator, EXACT_MAX_SITES};
pub use tebd::{tebd_evolve, TebdConfig, TruncationPolicy, DEFAULT_HARD_CAP};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::mps::DEFAULT_DENSE_THRESHOLD;

/// `4 / (3 pi)`, the asymptotic entropy growth rate of the lower bound.
pub const GROWTH_REFERENCE: f64 = 4.0 / (3.0 * std::f64::consts::PI);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(Error::invalid(format!("unknown boundary {other:?}"))),
        }
    }
}

/// Which Pauli couples neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    XX,
    ZZ,
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xx" => Ok(Coupling::XX),
            "zz" => Ok(Coupling::ZZ),
            other => Err(Error::invalid(format!("unknown coupling {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsingSpec {
    pub n: usize,
    pub g: f64,
    pub boundary: Boundary,
    pub coupling: Coupling,
}

impl IsingSpec {
    /// Critical transverse-field Ising chain (`g = 1`).
    pub fn critical(n: usize, boundary: Boundary) -> Self {
        Self {
            n,
            g: 1.0,
            boundary,
            coupling: Coupling::XX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("Ising chain needs at least 2 sites"));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::invalid(format!("field g = {} must be finite and >= 0", self.g)));
        }
        Ok(())
    }

    /// Coupled pairs; the periodic chain adds `(N-1, 0)`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<_> = (0..self.n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((self.n - 1, 0));
        }
        b
    }
}

/// Dense Hamiltonian. The matrix has `4^N` entries, which must fit the
/// default dense threshold.
pub fn ising_hamiltonian(spec: &IsingSpec) -> Result<ComplexMatrix> {
    ising_hamiltonian_within(spec, DEFAULT_DENSE_THRESHOLD)
}

pub fn ising_hamiltonian_within(spec: &IsingSpec, threshold: usize) -> Result<ComplexMatrix> {
    spec.validate()?;
    let entries = 1u128 << (2 * spec.n.min(63));
    if spec.n > 31 || entries > threshold as u128 {
        return Err(Error::ResourceLimit {
            what: format!("dense Hamiltonian on {} sites", spec.n),
            required: entries,
            limit: threshold as u128,
        });
    }
    let dim = 1usize << spec.n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        h[(x, x)] = C64::new(diagonal(spec, x), 0.0);
        if spec.coupling == Coupling::XX {
            for &(i, j) in &spec.bonds() {
                let y = x ^ site_mask(spec.n, i) ^ site_mask(spec.n, j);
                h[(y, x)] -= C64::new(1.0, 0.0);
            }
        }
    }
    Ok(h)
}

pub(crate) fn site_mask(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

fn z_value(n: usize, x: usize, site: usize) -> f64 {
    if x & site_mask(n, site) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal matrix element `<x|H|x>`.
pub(crate) fn diagonal(spec: &IsingSpec, x: usize) -> f64 {
    let field: f64 = (0..spec.n).map(|i| z_value(spec.n, x, i)).sum();
    let coupling: f64 = match spec.coupling {
        Coupling::XX => 0.0,
        Coupling::ZZ => spec
            .bonds()
            .iter()
            .map(|&(i, j)| z_value(spec.n, x, i) * z_value(spec.n, x, j))
            .sum(),
    };
    -spec.g * field - coupling
}

/// Time series of a quench run. All vectors share the length of `times`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuenchResult {
    pub times: Vec<f64>,
    pub half_chain_entropy_bits: Vec<f64>,
    pub max_bond: Vec<usize>,
    /// Weight discarded during the step that ended at each time.
    pub per_step_truncation: Vec<f64>,
    pub cum_truncation: Vec<f64>,
    pub norm_squared: Vec<f64>,
    /// `||psi_tebd(t) - psi_exact(t)||_2`, when a reference was supplied.
    pub exact_error: Option<Vec<f64>>,
    /// The run hit the hard bond cap and stopped early.
    pub truncated_run: bool,
    pub boundary: Boundary,
}

impl QuenchResult {
    fn empty(boundary: Boundary) -> Self {
        Self {
            times: Vec::new(),
            half_chain_entropy_bits: Vec::new(),
            max_bond: Vec::new(),
            per_step_truncation: Vec::new(),
            cum_truncation: Vec::new(),
            norm_squared: Vec::new(),
            exact_error: None,
            truncated_run: false,
            boundary,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub window: (f64, f64),
    pub samples: usize,
    pub slope_bits: f64,
    pub slope_nats: f64,
    pub intercept_bits: f64,
    /// `(D, t)`: first recorded time at which the bond reached `D = 2^m`.
    pub bond_doubling_times: Vec<(usize, f64)>,
}

impl GrowthReport {
    /// Largest power of two whose doubling time is recorded, with all
    /// earlier doubling times strictly increasing.
    pub fn strictly_increasing_through(&self) -> usize {
        let mut best = 1;
        let mut last = f64::NEG_INFINITY;
        for &(d, t) in &self.bond_doubling_times {
            if t <= last {
                break;
            }
            last = t;
            best = d;
        }
        best
    }
}

/// Least-squares slope of the half-chain entropy over `window`, plus the
/// times at which the maximal bond first reaches each power of two.
pub fn entropy_growth_report(r: &QuenchResult, window: (f64, f64)) -> Result<GrowthReport> {
    let (t0, t1) = window;
    if !(t0 < t1) {
        return Err(Error::invalid(format!("empty window [{t0}, {t1}]")));
    }
    let (first, last) = match (r.times.first(), r.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::invalid("empty quench result")),
    };
    let slack = 1e-9 * (1.0 + t1.abs());
    if t0 < first - slack || t1 > last + slack {
        return Err(Error::invalid(format!(
            "window [{t0}, {t1}] outside recorded times [{first}, {last}]"
        )));
    }
    let pts: Vec<(f64, f64)> = r
        .times
        .iter()
        .zip(&r.half_chain_entropy_bits)
        .filter(|(t, _)| **t >= t0 - slack && **t <= t1 + slack)
        .map(|(t, s)| (*t, *s))
        .collect();
    if pts.len() < 5 {
        return Err(Error::invalid(format!(
            "{} samples in window, at least 5 needed",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let sm = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - sm)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    let slope = sxy / sxx;

    let mut doubling = Vec::new();
    let mut target = 2usize;
    for (t, &d) in r.times.iter().zip(&r.max_bond) {
        while d >= target {
            doubling.push((target, *t));
            target *= 2;
        }
    }
    Ok(GrowthReport {
        window,
        samples: pts.len(),
        slope_bits: slope,
        slope_nats: slope * std::f64::consts::LN_2,
        intercept_bits: sm - slope * tm,
        bond_doubling_times: doubling,
    })
}
