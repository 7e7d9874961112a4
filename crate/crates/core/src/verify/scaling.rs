//! Block-entropy versus bond-dimension scans over the state families.

use rayon::prelude::*;

use crate::entropy::{renyi_entropy, smooth_renyi, truncation_error, RenyiOrder};
use crate::error::{Error, Result};
use crate::mps::MatrixProductState;
use crate::spectrum::Spectrum;
use crate::zoo::{
    chi_copies, elementary_state, magic_block_spectrum, pair_ring_cut_pairs, tagged_translational_invariant,
    Elementary, FamilyParams, ProductOfCopies,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Magic,
    Chi,
    PairRing,
    TaggedTi,
    Elementary(Elementary),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Magic => "magic",
            Self::Chi => "chi",
            Self::PairRing => "pair_ring",
            Self::TaggedTi => "tagged_ti",
            Self::Elementary(_) => "elementary",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magic" => Ok(Self::Magic),
            "chi" => Ok(Self::Chi),
            "pair_ring" => Ok(Self::PairRing),
            "tagged_ti" => Ok(Self::TaggedTi),
            "elementary" => Ok(Self::Elementary(Elementary::Ghz)),
            other => Err(Error::invalid(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSpec {
    pub family: Family,
    pub points: Vec<FamilyParams>,
    /// Block lengths; defaults to every length up to the family's natural
    /// maximum.
    pub blocks: Option<Vec<usize>>,
    pub alphas: Vec<RenyiOrder>,
    pub delta: f64,
    /// When set, also reports the smooth entropy at `eps = scale / N`.
    pub smooth_eps_scale: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub family: &'static str,
    pub params: FamilyParams,
    pub block: usize,
    pub alpha: RenyiOrder,
    /// Largest `S_alpha` over all placements of the block.
    pub entropy_bits: Option<f64>,
    /// Smallest `D` with `max_k eps_k(D) <= delta`.
    pub d_required: Option<usize>,
    pub delta_target: f64,
    pub smooth_bits: Option<f64>,
    pub skipped: bool,
    pub note: String,
}

/// Number of pairs of the ring family at a grid point.
pub fn ring_pairs(p: &FamilyParams) -> usize {
    let nu = if p.nu > 0 {
        p.nu
    } else {
        (p.n as f64).powf(p.kappa).floor() as usize
    };
    nu.clamp(1, (p.n / 2).max(1))
}

/// Evaluated family instance: block spectra at every placement and the
/// cut spectra used for `D_required`.
enum Instance {
    Magic { n: usize, p: f64 },
    Chi(ProductOfCopies),
    Ring { n: usize, nu: usize },
    Mps(MatrixProductState),
}

impl Instance {
    fn build(family: Family, p: &FamilyParams) -> Result<Self> {
        Ok(match family {
            Family::Magic => {
                magic_block_spectrum(p.n, p.p, 0..1)?;
                Self::Magic { n: p.n, p: p.p }
            }
            Family::Chi => Self::Chi(chi_copies(p.n, p.p, p.copies)?),
            Family::PairRing => {
                if p.n < 2 || p.n % 2 != 0 {
                    return Err(Error::invalid(format!("N must be even, got {}", p.n)));
                }
                Self::Ring { n: p.n, nu: ring_pairs(p) }
            }
            Family::TaggedTi => {
                let base = chi_copies(p.n, p.p, p.copies)?;
                Self::Mps(tagged_translational_invariant(&base)?)
            }
            Family::Elementary(kind) => Self::Mps(elementary_state(kind, p.n, 2)?),
        })
    }

    fn len(&self) -> usize {
        match self {
            Self::Magic { n, .. } => 2 * n,
            Self::Chi(c) => c.len(),
            Self::Ring { n, .. } => *n,
            Self::Mps(m) => m.len(),
        }
    }

    fn default_blocks(&self) -> Vec<usize> {
        match self {
            Self::Magic { n, .. } => (1..=*n).collect(),
            Self::Chi(c) => (1..c.len()).collect(),
            Self::Ring { n, .. } => (1..=n / 2).collect(),
            Self::Mps(m) => (1..=m.len() / 2).collect(),
        }
    }

    /// Spectra of every placement of an `l`-site block (one placement for
    /// translation-invariant and generic chains: the left end). Copies are
    /// handled through entropy additivity instead, see [`Instance::chi_entropy`].
    fn block_spectra(&self, l: usize) -> Result<Vec<Spectrum>> {
        let len = self.len();
        match self {
            Self::Magic { n, p } => (0..=len - l).map(|a| magic_block_spectrum(*n, *p, a..a + l)).collect(),
            Self::Chi(_) => Ok(Vec::new()),
            Self::Ring { n, nu } => (0..*n)
                .map(|a| {
                    let c = pair_ring_cut_pairs(*n, *nu, a, l);
                    Spectrum::new(vec![0.5f64.powi(c as i32); 1 << c])
                })
                .collect(),
            Self::Mps(m) => {
                if l == len {
                    Ok(vec![Spectrum::pure()])
                } else {
                    Ok(vec![m.schmidt_spectrum(l)?])
                }
            }
        }
    }

    fn cut_spectra(&self) -> Result<Vec<Spectrum>> {
        let len = self.len();
        match self {
            Self::Magic { n, p } => (1..len).map(|k| magic_block_spectrum(*n, *p, 0..k)).collect(),
            Self::Chi(c) => (1..len).map(|k| c.cut_spectrum(k)).collect(),
            Self::Ring { n, nu } => (1..len)
                .map(|k| {
                    let c = pair_ring_cut_pairs(*n, *nu, 0, k);
                    Spectrum::new(vec![0.5f64.powi(c as i32); 1 << c])
                })
                .collect(),
            Self::Mps(m) => m.schmidt_spectra(),
        }
    }

    /// Largest block entropy over placements, summed over copies.
    fn chi_entropy(c: &ProductOfCopies, l: usize, a: RenyiOrder) -> Result<f64> {
        (0..=c.len() - l).try_fold(0.0f64, |m, s| Ok(m.max(c.block_entropy(s..s + l, a)?)))
    }

    fn d_required(&self, delta: f64) -> Result<usize> {
        if let Self::Chi(c) = self {
            return c.required_bond(delta);
        }
        let spectra = self.cut_spectra()?;
        let cap = spectra.iter().map(Spectrum::len).max().unwrap_or(1).max(1);
        let worst = |d: usize| -> Result<f64> {
            spectra.iter().try_fold(0.0f64, |w, s| Ok(w.max(truncation_error(s, d)?)))
        };
        let (mut lo, mut hi) = (1, cap);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if worst(mid)? <= delta {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }
}

fn evaluate(spec: &ScalingSpec, params: &FamilyParams) -> Vec<ScalingRow> {
    let family = spec.family.name();
    let skipped_rows = |note: String| -> Vec<ScalingRow> {
        let blocks = spec.blocks.clone().unwrap_or_else(|| vec![0]);
        blocks
            .iter()
            .flat_map(|&l| {
                let note = note.clone();
                spec.alphas.iter().map(move |&a| ScalingRow {
                    family,
                    params: *params,
                    block: l,
                    alpha: a,
                    entropy_bits: None,
                    d_required: None,
                    delta_target: spec.delta,
                    smooth_bits: None,
                    skipped: true,
                    note: note.clone(),
                })
            })
            .collect()
    };
    let inst = match Instance::build(spec.family, params) {
        Ok(i) => i,
        Err(e) => return skipped_rows(e.to_string()),
    };
    let d_required = match inst.d_required(spec.delta) {
        Ok(d) => d,
        Err(e) => return skipped_rows(e.to_string()),
    };
    let blocks = spec.blocks.clone().unwrap_or_else(|| inst.default_blocks());
    let mut rows = Vec::new();
    for &l in &blocks {
        let base = ScalingRow {
            family,
            params: *params,
            block: l,
            alpha: RenyiOrder::ZERO,
            entropy_bits: None,
            d_required: Some(d_required),
            delta_target: spec.delta,
            smooth_bits: None,
            skipped: false,
            note: String::new(),
        };
        if l == 0 || l > inst.len() {
            for &a in &spec.alphas {
                rows.push(ScalingRow {
                    alpha: a,
                    skipped: true,
                    note: format!("block length {l} outside 1..={}", inst.len()),
                    ..base.clone()
                });
            }
            continue;
        }
        let spectra = match inst.block_spectra(l) {
            Ok(s) => s,
            Err(e) => {
                for &a in &spec.alphas {
                    rows.push(ScalingRow { alpha: a, skipped: true, note: e.to_string(), ..base.clone() });
                }
                continue;
            }
        };
        for &a in &spec.alphas {
            let entropy = match &inst {
                Instance::Chi(c) => Instance::chi_entropy(c, l, a),
                _ => spectra
                    .iter()
                    .map(|s| renyi_entropy(s, a))
                    .try_fold(0.0f64, |m, x| x.map(|x| m.max(x))),
            };
            let smooth = spec.smooth_eps_scale.filter(|_| !matches!(inst, Instance::Chi(_))).map(|c| {
                // past 2 every distribution is within reach of a pure one
                let eps = (c / params.n as f64).min(2.0);
                spectra
                    .iter()
                    .map(|s| smooth_renyi(s, a, eps))
                    .try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))
            });
            match (entropy, smooth.transpose()) {
                (Ok(h), Ok(sm)) => rows.push(ScalingRow { alpha: a, entropy_bits: Some(h), smooth_bits: sm, ..base.clone() }),
                (Err(e), _) | (_, Err(e)) => {
                    rows.push(ScalingRow { alpha: a, skipped: true, note: e.to_string(), ..base.clone() })
                }
            }
        }
    }
    rows
}

/// Rows for every grid point, block length, and order, sorted by
/// `(N, L, alpha)`; grid points that exceed resource limits appear as
/// skipped rows.
pub fn scaling_experiment(spec: &ScalingSpec) -> Result<Vec<ScalingRow>> {
    if spec.points.is_empty() || spec.alphas.is_empty() {
        return Err(Error::invalid("scaling grid and alphas must be nonempty"));
    }
    if !(0.0..=1.0).contains(&spec.delta) {
        return Err(Error::invalid(format!("delta must lie in [0, 1], got {}", spec.delta)));
    }
    let mut rows: Vec<ScalingRow> = spec
        .points
        .par_iter()
        .map(|p| evaluate(spec, p))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| {
        (a.params.n, a.block)
            .cmp(&(b.params.n, b.block))
            .then(a.alpha.alpha().total_cmp(&b.alpha.alpha()))
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, points: Vec<FamilyParams>, delta: f64) -> ScalingSpec {
        ScalingSpec {
            family,
            points,
            blocks: None,
            alphas: vec![RenyiOrder::HALF, RenyiOrder::VON_NEUMANN],
            delta,
            smooth_eps_scale: None,
        }
    }

    #[test]
    fn magic_rows() {
        let pts = (2..=6).map(|n| FamilyParams::magic(n, 1.0 / n as f64)).collect();
        let rows = scaling_experiment(&spec(Family::Magic, pts, 0.5)).unwrap();
        for r in &rows {
            let n = r.params.n as f64;
            if r.alpha == RenyiOrder::HALF {
                assert!(r.entropy_bits.unwrap() >= r.block as f64 - n.log2() - 1e-9);
            }
            // delta >= sqrt(p) >= p: a single kept value already suffices
            assert!(r.d_required.unwrap() <= 2);
        }
        let keys: Vec<_> = rows.iter().map(|r| (r.params.n, r.block)).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn chi_rows_bounded() {
        let pts = vec![FamilyParams { copies: 3, ..FamilyParams::magic(4, 0.25) }];
        let rows = scaling_experiment(&spec(Family::Chi, pts, 0.05)).unwrap();
        let vn = rows.iter().filter(|r| r.alpha == RenyiOrder::VON_NEUMANN);
        assert!(vn.clone().count() > 0);
        assert!(vn.into_iter().all(|r| r.entropy_bits.unwrap() <= 4.0));
        assert!(rows[0].d_required.unwrap() as f64 >= 16.0 * (1.0 - 0.4) + 1.0);
    }

    #[test]
    fn ring_rows() {
        let pts = vec![FamilyParams { n: 16, p: 0.0, nu: 4, kappa: 0.0, copies: 1 }];
        let rows = scaling_experiment(&spec(Family::PairRing, pts, 0.0)).unwrap();
        let half = rows.iter().find(|r| r.block == 8).unwrap();
        assert_eq!(half.entropy_bits.unwrap(), 4.0);
        assert_eq!(half.d_required.unwrap(), 16);
    }

    #[test]
    fn oversized_points_are_skipped() {
        let pts = vec![FamilyParams { copies: 4, ..FamilyParams::magic(3, 0.3) }];
        let rows = scaling_experiment(&spec(Family::TaggedTi, pts, 0.1)).unwrap();
        assert!(!rows.is_empty() && rows.iter().all(|r| r.skipped));
    }
}
