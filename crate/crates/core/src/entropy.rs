//! Entropy functionals on spectra and the bounds built from them. All
//! logarithms are base 2.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CLAMP_TOL;
use crate::spectrum::Spectrum;

/// Slack for declaring an inequality violated.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Order `alpha` of a Rényi entropy: 0, any finite positive value, or
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const ZERO: Self = Self(0.0);
    pub const HALF: Self = Self(0.5);
    pub const VON_NEUMANN: Self = Self(1.0);
    pub const COLLISION: Self = Self(2.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::invalid(format!(
                "Rényi order must be nonnegative, got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for RenyiOrder {
    type Err = Error;

    /// Accepts decimals, fractions such as `1/2`, and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let value = match t {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            _ => match t.split_once('/') {
                Some((a, b)) => {
                    let a: f64 = a.trim().parse().map_err(|_| bad_order(s))?;
                    let b: f64 = b.trim().parse().map_err(|_| bad_order(s))?;
                    a / b
                }
                None => t.parse().map_err(|_| bad_order(s))?,
            },
        };
        Self::new(value)
    }
}

fn bad_order(s: &str) -> Error {
    Error::invalid(format!("cannot parse Rényi order '{s}'"))
}

/// `S_alpha` in bits. Requires a normalized spectrum.
pub fn renyi_entropy(s: &Spectrum, a: RenyiOrder) -> Result<f64> {
    s.require_normalized()?;
    Ok(renyi_of_values(s.values(), a))
}

/// The Rényi formula applied to raw weights, without a normalization check.
pub(crate) fn renyi_of_values(p: &[f64], a: RenyiOrder) -> f64 {
    let alpha = a.alpha();
    let h = if alpha == 0.0 {
        (p.iter().filter(|&&x| x > CLAMP_TOL).count().max(1) as f64).log2()
    } else if alpha == 1.0 {
        -p.iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| x * x.log2())
            .sum::<f64>()
    } else if alpha.is_infinite() {
        -p.iter().copied().fold(0.0, f64::max).log2()
    } else {
        let sum: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
        sum.log2() / (1.0 - alpha)
    };
    // -0.0 and rounding below zero for pure spectra
    h.max(0.0)
}

pub fn von_neumann(s: &Spectrum) -> Result<f64> {
    renyi_entropy(s, RenyiOrder::VON_NEUMANN)
}

/// `H(p, 1 - p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// `eps(D) = sum_{i > D} lambda_i`.
pub fn truncation_error(s: &Spectrum, bond: usize) -> Result<f64> {
    if bond == 0 {
        return Err(Error::invalid("bond dimension must be at least 1"));
    }
    s.require_normalized()?;
    let tail: f64 = s.values().iter().skip(bond).sum();
    Ok(tail.clamp(0.0, 1.0))
}

fn check_extremal_args(eps: f64, bond: usize, block: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(format!("eps must lie in [0, 1), got {eps}")));
    }
    let dim = 2f64.powi(block as i32);
    if bond == 0 || bond as f64 >= dim {
        return Err(Error::invalid(format!(
            "need 1 <= D < 2^L, got D = {bond}, L = {block}"
        )));
    }
    // an ordered distribution has (1 - eps)/D >= eps/(2^L - D)
    if eps * dim > (dim - bond as f64) * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "no ordered distribution on 2^{block} outcomes has tail {eps} past D = {bond}"
        )));
    }
    Ok(dim)
}

/// The distribution majorized by every ordered distribution on `2^L`
/// outcomes with tail weight `eps` past position `D`: `(1 - eps)/D` on the
/// first `D` entries, `eps / (2^L - D)` on the rest.
pub fn extremal_distribution(eps: f64, bond: usize, block: usize) -> Result<Vec<f64>> {
    let dim = check_extremal_args(eps, bond, block)?;
    if dim > (1u64 << 26) as f64 {
        return Err(Error::ResourceLimit {
            what: "extremal distribution".into(),
            required: dim as u128,
            limit: 1 << 26,
        });
    }
    let rest = dim as usize - bond;
    let mut p = vec![(1.0 - eps) / bond as f64; bond];
    p.extend(std::iter::repeat_n(eps / rest as f64, rest));
    Ok(p)
}

/// Largest `S_alpha` (alpha > 1) compatible with tail weight `eps` past
/// position `D` on `2^L` outcomes.
pub fn max_renyi_given_truncation(eps: f64, bond: usize, block: usize, a: RenyiOrder) -> Result<f64> {
    let dim = check_extremal_args(eps, bond, block)?;
    let alpha = require_above_one(a)?;
    let d = bond as f64;
    let rest = dim - d;
    let sum = (1.0 - eps).powf(alpha) / d.powf(alpha - 1.0) + eps.powf(alpha) / rest.powf(alpha - 1.0);
    Ok(-sum.log2() / (alpha - 1.0))
}

/// The closed form `log D - alpha/(alpha - 1) log(1 - eps)`, which
/// dominates [`max_renyi_given_truncation`].
pub fn max_renyi_loose(eps: f64, bond: usize, a: RenyiOrder) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) || bond == 0 {
        return Err(Error::invalid("need 0 <= eps < 1 and D >= 1"));
    }
    let alpha = require_above_one(a)?;
    Ok((bond as f64).log2() - alpha / (alpha - 1.0) * (1.0 - eps).log2())
}

fn require_above_one(a: RenyiOrder) -> Result<f64> {
    let alpha = a.alpha();
    if !(alpha > 1.0) || alpha.is_infinite() {
        return Err(Error::invalid(format!(
            "bound requires a finite order alpha > 1, got {a}"
        )));
    }
    Ok(alpha)
}

/// The spectrum reached by moving weight `eps / 2` from the smallest
/// entries onto the largest one. Its total-variation distance to `s` is at
/// most `eps`, and it majorizes every other spectrum in that ball.
pub fn smooth_spectrum(s: &Spectrum, eps: f64) -> Result<Vec<f64>> {
    // total variation between distributions never exceeds 2
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::invalid(format!("eps must lie in [0, 2], got {eps}")));
    }
    s.require_normalized()?;
    let mut p = s.values().to_vec();
    let mut budget = eps / 2.0;
    let mut moved = 0.0;
    for v in p.iter_mut().skip(1).rev() {
        if budget <= 0.0 {
            break;
        }
        let take = v.min(budget);
        *v -= take;
        if *v <= CLAMP_TOL {
            moved += *v;
            *v = 0.0;
        }
        budget -= take;
        moved += take;
    }
    if let Some(top) = p.first_mut() {
        *top += moved;
    }
    Ok(p)
}

/// Smooth Rényi entropy over spectra diagonal in the eigenbasis of `s`.
pub fn smooth_renyi(s: &Spectrum, a: RenyiOrder, eps: f64) -> Result<f64> {
    let p = smooth_spectrum(s, eps)?;
    Ok(renyi_of_values(&p, a).min(renyi_of_values(s.values(), a)))
}

/// `T log(K - 1) + H(T)`: bound on `|S(rho) - S(sigma)|` for states on a
/// `K`-dimensional space at trace distance `2T`.
pub fn audenaert_bound(t: f64, dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {dim}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("T must lie in [0, 1], got {t}")));
    }
    Ok(t * ((dim - 1) as f64).log2() + binary_entropy(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    Holds,
    Violated,
    NotApplicable,
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Holds => "holds",
            Self::Violated => "violated",
            Self::NotApplicable => "not-applicable",
        })
    }
}

/// Outcome of evaluating or checking an inequality.
///
/// Each check contributes a margin `lhs - rhs` oriented so that a
/// nonnegative value means the inequality holds; the report is violated
/// when some margin is below `-VIOLATION_TOL`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub bound_value: f64,
    pub inputs: Vec<(String, f64)>,
    pub status: BoundStatus,
    pub checks: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub seed: Option<u64>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, bound_value: f64) -> Self {
        Self {
            name: name.into(),
            bound_value,
            inputs: Vec::new(),
            status: BoundStatus::NotApplicable,
            checks: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            seed: None,
        }
    }

    pub fn with_input(mut self, key: &str, value: f64) -> Self {
        self.inputs.push((key.to_string(), value));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records one check with the given margin.
    pub fn record(&mut self, margin: f64) {
        self.checks += 1;
        if margin.is_nan() || margin < -VIOLATION_TOL {
            self.violations += 1;
        }
        if margin.is_nan() || margin < self.worst_margin {
            self.worst_margin = margin;
        }
        self.status = if self.violations > 0 {
            BoundStatus::Violated
        } else {
            BoundStatus::Holds
        };
    }

    /// Folds another report's checks into this one.
    pub fn merge(&mut self, other: &BoundReport) {
        self.checks += other.checks;
        self.violations += other.violations;
        if other.worst_margin < self.worst_margin || other.worst_margin.is_nan() {
            self.worst_margin = other.worst_margin;
        }
        self.status = match (self.status, other.status) {
            (BoundStatus::Violated, _) | (_, BoundStatus::Violated) => BoundStatus::Violated,
            (BoundStatus::Holds, _) | (_, BoundStatus::Holds) => BoundStatus::Holds,
            _ => BoundStatus::NotApplicable,
        };
    }

    pub fn is_violated(&self) -> bool {
        self.status == BoundStatus::Violated
    }

    /// Checks an actual bond dimension against a lower bound on `log2 D`.
    pub fn check_bond(mut self, bond: usize) -> Self {
        self.record((bond as f64).log2() - self.bound_value);
        self
    }
}

/// Lower bound on `log2 D` for any `D`-MPS within trace distance `delta`
/// of a state whose `L`-site block has von Neumann entropy `s_block`.
pub fn bond_bound_von_neumann(s_block: f64, delta: f64, block: usize, phys: usize) -> Result<BoundReport> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 2], got {delta}")));
    }
    if !(s_block >= 0.0) || phys < 1 {
        return Err(Error::invalid("need S >= 0 and d >= 1"));
    }
    let value = s_block - 0.5 * delta * block as f64 * (phys as f64).log2() - 1.0;
    Ok(BoundReport::new("bond_bound_von_neumann", value)
        .with_input("S", s_block)
        .with_input("delta", delta)
        .with_input("L", block as f64)
        .with_input("d", phys as f64))
}

/// Lower bound on `log2 D` from a Rényi entropy with alpha > 1:
/// `S_alpha - alpha/(alpha - 1) |log(1 - delta)|`.
pub fn bond_bound_renyi(s_alpha: f64, delta: f64, a: RenyiOrder) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    let alpha = require_above_one(a)?;
    let value = s_alpha - alpha / (alpha - 1.0) * (1.0 - delta).log2().abs();
    Ok(BoundReport::new("bond_bound_renyi", value)
        .with_input("S_alpha", s_alpha)
        .with_input("delta", delta)
        .with_input("alpha", alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::probabilities(v.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn uniform_is_order_independent() {
        let s = spec(&[0.125; 8]);
        for a in [0.0, 0.25, 0.5, 1.0, 2.0, f64::INFINITY] {
            close(renyi_entropy(&s, RenyiOrder::new(a).unwrap()).unwrap(), 3.0, 1e-12);
        }
    }

    #[test]
    fn magic_block_values() {
        let s = spec(&[0.75, 0.0625, 0.0625, 0.0625, 0.0625]);
        let expect = 2.0 * (0.75f64.sqrt() + 2.0 * 0.25f64.sqrt()).log2();
        close(renyi_entropy(&s, RenyiOrder::HALF).unwrap(), expect, 1e-12);
        close(expect, 1.8001, 5e-4);
        let vn = binary_entropy(0.25) + 0.25 * 2.0;
        close(von_neumann(&s).unwrap(), vn, 1e-12);
        close(vn, 1.3113, 1e-4);
    }

    #[test]
    fn min_entropy() {
        close(renyi_entropy(&spec(&[0.5, 0.25, 0.25]), RenyiOrder::INFINITY).unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn order_parsing() {
        assert_eq!("1/2".parse::<RenyiOrder>().unwrap(), RenyiOrder::HALF);
        assert!("inf".parse::<RenyiOrder>().unwrap().is_infinite());
        assert!("-1".parse::<RenyiOrder>().is_err());
        assert!(RenyiOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn truncation_examples() {
        close(truncation_error(&spec(&[0.5, 0.3, 0.2]), 2).unwrap(), 0.2, 1e-15);
        assert_eq!(truncation_error(&spec(&[0.5, 0.5]), 3).unwrap(), 0.0);
        assert!(truncation_error(&spec(&[1.0]), 0).is_err());
        let mut magic = vec![0.75];
        magic.extend([0.25 / 16.0; 16]);
        close(truncation_error(&spec(&magic), 1).unwrap(), 0.25, 1e-15);
    }

    #[test]
    fn extremal_examples() {
        let a2 = RenyiOrder::COLLISION;
        close(max_renyi_given_truncation(0.0, 4, 3, a2).unwrap(), 2.0, 1e-15);
        let v = max_renyi_given_truncation(0.1, 2, 3, a2).unwrap();
        close(v, -(0.405f64 + 0.01 / 6.0).log2(), 1e-14);
        close(v, 1.2982, 5e-4);
        let p = extremal_distribution(0.1, 2, 3).unwrap();
        close(renyi_of_values(&p, a2), v, 1e-12);
        assert!(max_renyi_loose(0.1, 2, a2).unwrap() >= v);
        assert!(max_renyi_given_truncation(0.1, 2, 3, RenyiOrder::VON_NEUMANN).is_err());
        assert!(max_renyi_given_truncation(0.1, 8, 3, a2).is_err());
    }

    #[test]
    fn smooth_examples() {
        let s = spec(&[0.6, 0.4]);
        close(smooth_renyi(&s, RenyiOrder::ZERO, 0.8).unwrap(), 0.0, 0.0);
        close(smooth_renyi(&s, RenyiOrder::HALF, 0.0).unwrap(), renyi_entropy(&s, RenyiOrder::HALF).unwrap(), 0.0);
        let p = smooth_spectrum(&spec(&[0.5, 0.3, 0.1, 0.1]), 0.3).unwrap();
        let expect = [0.65, 0.3, 0.05, 0.0];
        for (a, b) in p.iter().zip(expect) {
            close(*a, b, 1e-15);
        }
        close(smooth_renyi(&s, RenyiOrder::HALF, 2.0).unwrap(), 0.0, 1e-15);
        assert!(smooth_spectrum(&s, 2.5).is_err());
        assert!(smooth_spectrum(&s, -0.1).is_err());
    }

    #[test]
    fn audenaert_examples() {
        assert_eq!(audenaert_bound(0.0, 4).unwrap(), 0.0);
        close(audenaert_bound(0.5, 2).unwrap(), 1.0, 1e-15);
        assert!(audenaert_bound(0.5, 1).is_err());
    }

    #[test]
    fn bond_bounds() {
        let r = bond_bound_von_neumann(10.0, 0.1, 20, 2).unwrap();
        close(r.bound_value, 8.0, 1e-12);
        assert_eq!(r.status, BoundStatus::NotApplicable);
        assert_eq!(r.clone().check_bond(256).status, BoundStatus::Holds);
        assert_eq!(r.check_bond(255).status, BoundStatus::Violated);
        close(bond_bound_von_neumann(5.0, 0.0, 7, 2).unwrap().bound_value, 4.0, 0.0);
        // S = cL with delta >= 2c / log d leaves no obstruction for large L.
        let c = 0.3;
        let delta = 2.0 * c / 3f64.log2();
        assert!(bond_bound_von_neumann(c * 1000.0, delta, 1000, 3).unwrap().bound_value <= 0.0);

        close(bond_bound_renyi(12.0, 0.5, RenyiOrder::COLLISION).unwrap().bound_value, 10.0, 1e-12);
        close(bond_bound_renyi(3.0, 0.0, RenyiOrder::COLLISION).unwrap().bound_value, 3.0, 0.0);
        assert!(bond_bound_renyi(3.0, 1.0, RenyiOrder::COLLISION).is_err());
        assert!(bond_bound_renyi(3.0, 0.1, RenyiOrder::HALF).is_err());
    }

    #[test]
    fn report_merging() {
        let mut a = BoundReport::new("x", 0.0);
        a.record(0.5);
        let mut b = BoundReport::new("x", 0.0);
        b.record(-1.0);
        a.merge(&b);
        assert_eq!(a.status, BoundStatus::Violated);
        assert_eq!((a.checks, a.violations), (2, 1));
        assert_eq!(a.worst_margin, -1.0);
    }
}
