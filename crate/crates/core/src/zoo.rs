//! Constructors for the example state families.

use std::ops::Range;

use crate::entropy::{renyi_entropy, truncation_error, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, C64, ONE};
use crate::mps::{CanonicalForm, DistanceReport, MatrixProductState, SiteTensor, DEFAULT_DENSE_THRESHOLD};
use crate::spectrum::Spectrum;

/// Parameters shared by the family constructors; each family reads the
/// fields it needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub n: usize,
    pub p: f64,
    pub nu: usize,
    pub kappa: f64,
    pub copies: usize,
}

impl FamilyParams {
    pub fn magic(n: usize, p: f64) -> Self {
        Self { n, p, nu: 0, kappa: 0.0, copies: 1 }
    }
}

fn check_magic(n: usize, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
    }
    if n > 30 {
        return Err(Error::ResourceLimit {
            what: format!("magic state bond dimension 2^{n} + 1"),
            required: (1u128 << n) + 1,
            limit: (1 << 30) + 1,
        });
    }
    Ok(())
}

/// `sqrt(1 - p) |2>^{2N} + sqrt(p / 2^N) sum_x |x>|x>` on `2N` qutrits.
///
/// Built directly in mixed canonical form with the orthogonality center
/// on site `N - 1`; the bond at cut `k` has dimension `2^min(k, 2N - k) + 1`.
pub fn magic_state(n: usize, p: f64) -> Result<MatrixProductState> {
    check_magic(n, p)?;
    let total = 2 * n;
    let bond = |k: usize| -> usize {
        if k == 0 || k == total {
            1
        } else {
            1 + (1usize << k.min(total - k))
        }
    };
    let w2 = (1.0 - p).sqrt();
    let wx = (p / (1u64 << n) as f64).sqrt();
    let mut sites = Vec::with_capacity(total);
    for k in 0..total {
        let (l, r) = (bond(k), bond(k + 1));
        let mut t = SiteTensor::zeros(l, 3, r);
        let center = k == n - 1;
        let (a2, ax) = if center { (w2, wx) } else { (1.0, 1.0) };
        t.set(0, 2, 0, C64::new(a2, 0.0));
        let ax = C64::new(ax, 0.0);
        if k < n {
            // branch state 1 + x with x the prefix read so far
            let prefixes = if k == 0 { 1 } else { 1usize << k };
            for x in 0..prefixes {
                let from = if k == 0 { 0 } else { 1 + x };
                for i in 0..2 {
                    t.set(from, i, 1 + 2 * x + i, ax);
                }
            }
        } else {
            // remaining bits y (most significant emitted first)
            let m = k - n;
            let width = n - m;
            for y in 0..(1usize << width) {
                let bit = y >> (width - 1);
                let to = if k == total - 1 { 0 } else { 1 + (y & ((1 << (width - 1)) - 1)) };
                t.set(1 + y, bit, to, ax);
            }
        }
        sites.push(t);
    }
    let m = MatrixProductState::from_sites(sites)?.with_form(CanonicalForm::Mixed(n - 1), 1.0);
    if p == 0.0 || p == 1.0 {
        return m.trimmed();
    }
    Ok(m)
}

/// Block spectrum of `magic_state(n, p)` on the contiguous block `range`
/// of its `2N` sites, from the state's structure: `{1 - p}` together with
/// `p / 2^m` repeated `2^m` times, where `m` counts the positions covered
/// in exactly one of the two halves. The whole chain is pure.
pub fn magic_block_spectrum(n: usize, p: f64, range: Range<usize>) -> Result<Spectrum> {
    check_magic(n, p)?;
    let total = 2 * n;
    if range.start >= range.end || range.end > total {
        return Err(Error::invalid(format!("block {range:?} not within {total} sites")));
    }
    if range.end - range.start == total {
        return Ok(Spectrum::pure());
    }
    let first = (range.start..range.end.min(n)).collect::<Vec<_>>();
    let second = (range.start.max(n)..range.end).map(|j| j - n).collect::<Vec<_>>();
    let unmatched = first.iter().filter(|x| !second.contains(x)).count()
        + second.iter().filter(|x| !first.contains(x)).count();
    Ok(magic_spectrum(p, unmatched))
}

/// `{1 - p} ∪ {p / 2^m × 2^m}` with zero weights dropped.
pub fn magic_spectrum(p: f64, m: usize) -> Spectrum {
    let mut v = Vec::with_capacity((1 << m) + 1);
    if p < 1.0 {
        v.push(1.0 - p);
    }
    if p > 0.0 {
        let w = p / (1u64 << m) as f64;
        v.extend(std::iter::repeat_n(w, 1 << m));
    }
    Spectrum::new(v).expect("nonnegative weights")
}

/// Closed form of `S_alpha` for a magic block with `m` unmatched positions.
pub fn magic_entropy_closed_form(p: f64, m: usize, a: RenyiOrder) -> f64 {
    let alpha = a.alpha();
    let l = m as f64;
    if p == 0.0 {
        return 0.0;
    }
    if alpha == 1.0 {
        crate::entropy::binary_entropy(p) + p * l
    } else if alpha == 0.0 {
        let rank = (1u64 << m) as f64 + if p < 1.0 { 1.0 } else { 0.0 };
        rank.log2()
    } else if alpha.is_infinite() {
        -(1.0 - p).max(p / 2f64.powi(m as i32)).log2()
    } else {
        ((1.0 - p).powf(alpha) + 2f64.powf((1.0 - alpha) * l) * p.powf(alpha)).log2() / (1.0 - alpha)
    }
}

/// Truncation error of the magic state at its middle cut:
/// `(2^N - (D - 1)) p / 2^N` for `1 <= D <= 2^N + 1`.
pub fn magic_middle_truncation(n: usize, p: f64, bond: usize) -> Result<f64> {
    truncation_error(&magic_spectrum(p, n), bond)
}

/// Which state family a [`ProductOfCopies`] repeats, when its block
/// spectra are known in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CopyKind {
    Magic { n: usize, p: f64 },
    Generic,
}

/// `K` copies of a base chain, never materialized.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductOfCopies {
    base: MatrixProductState,
    copies: usize,
    kind: CopyKind,
    cut_spectra: Vec<Spectrum>,
}

impl ProductOfCopies {
    pub fn new(base: MatrixProductState, copies: usize) -> Result<Self> {
        Self::with_kind(base, copies, CopyKind::Generic)
    }

    fn with_kind(base: MatrixProductState, copies: usize, kind: CopyKind) -> Result<Self> {
        if copies == 0 {
            return Err(Error::invalid("K >= 1"));
        }
        base.require_normalized()?;
        let cut_spectra = match kind {
            CopyKind::Magic { n, p } => (1..2 * n)
                .map(|k| magic_block_spectrum(n, p, 0..k))
                .collect::<Result<_>>()?,
            CopyKind::Generic => base.schmidt_spectra()?,
        };
        Ok(Self { base, copies, kind, cut_spectra })
    }

    pub fn base(&self) -> &MatrixProductState {
        &self.base
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn kind(&self) -> CopyKind {
        self.kind
    }

    pub fn sites_per_copy(&self) -> usize {
        self.base.len()
    }

    pub fn len(&self) -> usize {
        self.copies * self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spectrum across cut `k` of the full chain.
    pub fn cut_spectrum(&self, k: usize) -> Result<Spectrum> {
        if k == 0 || k >= self.len() {
            return Err(Error::invalid(format!("cut {k} out of range")));
        }
        let r = k % self.sites_per_copy();
        Ok(if r == 0 {
            Spectrum::pure()
        } else {
            self.cut_spectra[r - 1].clone()
        })
    }

    /// Spectra of the pieces a block splits into, one per copy it touches.
    fn piece_spectra(&self, range: Range<usize>) -> Result<Vec<Spectrum>> {
        let n = self.sites_per_copy();
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::invalid(format!("block {range:?} not within {} sites", self.len())));
        }
        let mut out = Vec::new();
        let mut c = range.start / n;
        while c * n < range.end {
            let a = range.start.max(c * n) - c * n;
            let b = range.end.min((c + 1) * n) - c * n;
            out.push(self.copy_block_spectrum(a..b)?);
            c += 1;
        }
        Ok(out)
    }

    fn copy_block_spectrum(&self, range: Range<usize>) -> Result<Spectrum> {
        let n = self.sites_per_copy();
        if range.end - range.start == n {
            return Ok(Spectrum::pure());
        }
        if range.start == 0 {
            return Ok(self.cut_spectra[range.end - 1].clone());
        }
        if range.end == n {
            return Ok(self.cut_spectra[range.start - 1].clone());
        }
        match self.kind {
            CopyKind::Magic { n, p } => magic_block_spectrum(n, p, range),
            CopyKind::Generic => {
                let rho = self.base.reduced_density(range)?;
                Spectrum::new(hermitian_eigenvalues(&rho)?)
            }
        }
    }

    /// `S_alpha` of a contiguous block, summed over the copies it touches.
    pub fn block_entropy(&self, range: Range<usize>, a: RenyiOrder) -> Result<f64> {
        let mut total = 0.0;
        for s in self.piece_spectra(range)? {
            total += renyi_entropy(&s, a)?;
        }
        Ok(total)
    }

    /// Full spectrum of a contiguous block (tensor product of the pieces).
    pub fn block_spectrum(&self, range: Range<usize>) -> Result<Spectrum> {
        let pieces = self.piece_spectra(range)?;
        let size: u128 = pieces.iter().map(|s| s.len() as u128).product();
        if size > DEFAULT_DENSE_THRESHOLD as u128 {
            return Err(Error::ResourceLimit {
                what: "block spectrum".into(),
                required: size,
                limit: DEFAULT_DENSE_THRESHOLD as u128,
            });
        }
        Ok(pieces.iter().fold(Spectrum::pure(), |acc, s| acc.tensor(s)))
    }

    /// `max_k eps_k(D)` over the cuts of one copy (every cut of the chain
    /// repeats one of these).
    pub fn max_truncation(&self, bond: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.cut_spectra {
            worst = worst.max(truncation_error(s, bond)?);
        }
        Ok(worst)
    }

    /// Lower bound on the trace-norm measure `T` between the `K`-copy state
    /// and any product of `D`-MPS on the copies: a single copy has fidelity
    /// at most `sqrt(1 - max_k eps_k(D))`, and fidelities multiply.
    pub fn measure_lower_bound(&self, bond: usize) -> Result<f64> {
        let f1 = (1.0 - self.max_truncation(bond)?).max(0.0).sqrt();
        Ok(DistanceReport::from_fidelity(f1.powi(self.copies as i32)).trace_measure)
    }

    /// Smallest `D` whose lower bound on `T` does not exceed `t`.
    pub fn required_bond(&self, t: f64) -> Result<usize> {
        let cap = self
            .cut_spectra
            .iter()
            .map(Spectrum::len)
            .max()
            .unwrap_or(1)
            .max(1);
        // the bound is nonincreasing in D
        let (mut lo, mut hi) = (1, cap);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.measure_lower_bound(mid)? <= t {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }
}

/// `K` copies of `magic_state(n, p)`.
pub fn chi_copies(n: usize, p: f64, copies: usize) -> Result<ProductOfCopies> {
    let base = magic_state(n, p)?;
    ProductOfCopies::with_kind(base, copies, CopyKind::Magic { n, p })
}

/// Left endpoints `floor(j (N/2) / nu)` of the pairs of [`pair_ring`].
pub fn pair_positions(n: usize, nu: usize) -> Vec<usize> {
    (0..nu).map(|j| j * (n / 2) / nu).collect()
}

/// `nu` Bell pairs `(|00> + |11>)/sqrt 2` between sites `k` and `k + N/2`,
/// all other qubits `|0>`.
pub fn pair_ring(n: usize, nu: usize) -> Result<MatrixProductState> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::invalid(format!("N must be even and >= 2, got {n}")));
    }
    if nu == 0 || nu > n / 2 {
        return Err(Error::invalid(format!("need 1 <= nu <= N/2, got nu = {nu}")));
    }
    let half = n / 2;
    let starts = pair_positions(n, nu);
    let open_at = |cut: usize| starts.iter().filter(|&&a| a < cut && cut <= a + half).count();
    if open_at(half) > 30 {
        return Err(Error::invalid("too many pairs open across one cut"));
    }
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let sites = (0..n)
        .map(|s| {
            let (open_l, open_r) = (open_at(s), open_at(s + 1));
            let (l, r) = (1usize << open_l, 1usize << open_r);
            let mut t = SiteTensor::zeros(l, 2, r);
            if starts.contains(&s) {
                for x in 0..l {
                    for i in 0..2 {
                        t.set(x, i, 2 * x + i, h);
                    }
                }
            } else if s >= half && starts.contains(&(s - half)) {
                for x in 0..l {
                    let bit = x >> (open_l - 1);
                    t.set(x, bit, x & ((1 << (open_l - 1)) - 1), ONE);
                }
            } else {
                for x in 0..l {
                    t.set(x, 0, x, ONE);
                }
            }
            t
        })
        .collect();
    MatrixProductState::from_sites(sites)
}

/// Number of pairs of `pair_ring(n, nu)` with exactly one endpoint in the
/// cyclic block of `len` sites starting at `start`.
pub fn pair_ring_cut_pairs(n: usize, nu: usize, start: usize, len: usize) -> usize {
    let inside = |x: usize| (x + n - start % n) % n < len;
    pair_positions(n, nu)
        .into_iter()
        .filter(|&a| inside(a) != inside(a + n / 2))
        .count()
}

/// Interleaves every copy with a tag block `|1 0 ... 0>` as long as the
/// copy, then superposes all cyclic translations.
pub fn tagged_translational_invariant(base: &ProductOfCopies) -> Result<MatrixProductState> {
    let tagged = tagged_chain(base)?;
    let total = tagged.len() as u128;
    let dense = (tagged.phys_dim() as u128).checked_pow(total as u32).unwrap_or(u128::MAX);
    if dense > DEFAULT_DENSE_THRESHOLD as u128 {
        return Err(Error::ResourceLimit {
            what: format!("tagged chain of {total} sites"),
            required: dense,
            limit: DEFAULT_DENSE_THRESHOLD as u128,
        });
    }
    tagged.translate_superposition()
}

/// The tagged chain before translations are superposed.
pub fn tagged_chain(base: &ProductOfCopies) -> Result<MatrixProductState> {
    let copy = base.base();
    let d = copy.phys_dim();
    if d < 2 {
        return Err(Error::invalid("tags need d >= 2"));
    }
    let mut levels = vec![0; copy.len()];
    levels[0] = 1;
    let tag = MatrixProductState::product_state(d, &levels)?;
    let unit = copy.concat(&tag)?;
    let mut chain = unit.clone();
    for _ in 1..base.copies() {
        chain = chain.concat(&unit)?;
    }
    Ok(chain)
}

/// Named simple states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    /// `|0 ... 0>`.
    AllUp,
    /// `(|0 ... 0> + |1 ... 1>) / sqrt 2`.
    Ghz,
    /// Computational basis state with index `x` (site 0 most significant).
    Basis(u128),
}

impl std::str::FromStr for Elementary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all_up" => Ok(Self::AllUp),
            "ghz" => Ok(Self::Ghz),
            other => match other.strip_prefix("basis(").and_then(|r| r.strip_suffix(')')) {
                Some(x) => x
                    .trim()
                    .parse()
                    .map(Self::Basis)
                    .map_err(|_| Error::invalid(format!("bad basis index in '{s}'"))),
                None => Err(Error::invalid(format!("unknown elementary state '{s}'"))),
            },
        }
    }
}

pub fn elementary_state(kind: Elementary, n: usize, phys: usize) -> Result<MatrixProductState> {
    if n == 0 || phys < 2 {
        return Err(Error::invalid("need N >= 1 and d >= 2"));
    }
    match kind {
        Elementary::AllUp => MatrixProductState::product_state(phys, &vec![0; n]),
        Elementary::Basis(x) => {
            let mut levels = vec![0; n];
            let mut rest = x;
            for k in (0..n).rev() {
                levels[k] = (rest % phys as u128) as usize;
                rest /= phys as u128;
            }
            if rest != 0 {
                return Err(Error::invalid(format!("basis index {x} exceeds d^N")));
            }
            MatrixProductState::product_state(phys, &levels)
        }
        Elementary::Ghz => {
            if n == 1 {
                let mut t = SiteTensor::zeros(1, phys, 1);
                let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                t.set(0, 0, 0, h);
                t.set(0, 1, 0, h);
                return MatrixProductState::from_sites(vec![t]);
            }
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let sites = (0..n)
                .map(|k| {
                    let l = if k == 0 { 1 } else { 2 };
                    let r = if k == n - 1 { 1 } else { 2 };
                    let mut t = SiteTensor::zeros(l, phys, r);
                    for b in 0..2 {
                        let (from, to) = (if k == 0 { 0 } else { b }, if k == n - 1 { 0 } else { b });
                        t.set(from, b, to, if k == 0 { h } else { ONE });
                    }
                    t
                })
                .collect();
            let m = MatrixProductState::from_sites(sites)?;
            Ok(m.with_form(CanonicalForm::Mixed(0), 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::linalg::{ComplexMatrix, ZERO};

    fn dense_magic(n: usize, p: f64) -> Vec<C64> {
        let total = 2 * n;
        let len = 3usize.pow(total as u32);
        let mut v = vec![ZERO; len];
        v[len - 1] = C64::new((1.0 - p).sqrt(), 0.0);
        let w = (p / (1u64 << n) as f64).sqrt();
        for x in 0..(1usize << n) {
            // digits of x in base 3 for each half, site 0 most significant
            let mut idx = 0;
            for _ in 0..2 {
                for b in (0..n).rev() {
                    idx = idx * 3 + ((x >> b) & 1);
                }
            }
            v[idx] += C64::new(w, 0.0);
        }
        v
    }

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn magic_matches_dense() {
        for n in 1..=4 {
            for p in [0.0, 0.25, 0.6, 1.0] {
                let m = magic_state(n, p).unwrap();
                assert!(dist(&m.to_dense().unwrap(), &dense_magic(n, p)) < 1e-12, "n={n} p={p}");
                assert!(m.gauge_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn magic_edge_cases() {
        let m = magic_state(1, 0.0).unwrap().to_dense().unwrap();
        assert!((m[8] - ONE).norm() < 1e-12);
        let bell = magic_state(1, 1.0).unwrap().to_dense().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((bell[0].re - h).abs() < 1e-12 && (bell[4].re - h).abs() < 1e-12);
        assert!(magic_state(2, 1.5).is_err());
    }

    #[test]
    fn magic_distance_to_product_part() {
        let (n, p) = (4, 0.25);
        let v = dense_magic(n, p);
        let mut w = v.clone();
        *w.last_mut().unwrap() -= C64::new((1.0 - p).sqrt(), 0.0);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((norm - p.sqrt()).abs() < 1e-12);
        assert!((norm - 0.5).abs() < 1e-12);
    }

    #[test]
    fn magic_middle_cut_spectrum() {
        let m = magic_state(4, 0.25).unwrap();
        let s = m.schmidt_spectrum(4).unwrap();
        assert_eq!(s.len(), 17);
        assert!((s.values()[0] - 0.75).abs() < 1e-12);
        assert!(s.values()[1..].iter().all(|v| (v - 1.0 / 64.0).abs() < 1e-12));
        assert!((magic_middle_truncation(4, 0.25, 1).unwrap() - 0.25).abs() < 1e-15);
        for d in 1..=17 {
            let expect = ((16 - (d - 1)) as f64 * 0.25 / 16.0).max(0.0);
            assert!((magic_middle_truncation(4, 0.25, d).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn magic_two_site_block() {
        let m = magic_state(4, 0.25).unwrap();
        let rho = m.reduced_density(0..2).unwrap();
        let mut diag = vec![0.25 / 4.0; 9];
        for (i, d) in diag.iter_mut().enumerate() {
            let (a, b) = (i / 3, i % 3);
            *d = if a == 2 && b == 2 {
                0.75
            } else if a < 2 && b < 2 {
                0.0625
            } else {
                0.0
            };
        }
        let expect = ComplexMatrix::from_real_diagonal(&diag);
        assert!(rho.sub(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn structural_spectra_match_dense() {
        for n in 1..=3 {
            let p = 0.3;
            let m = magic_state(n, p).unwrap();
            for a in 0..2 * n {
                for b in a + 1..=2 * n {
                    let s = magic_block_spectrum(n, p, a..b).unwrap();
                    let e = if b - a == 2 * n {
                        vec![1.0]
                    } else {
                        hermitian_eigenvalues(&m.reduced_density(a..b).unwrap()).unwrap()
                    };
                    for (i, v) in e.iter().enumerate() {
                        let x = s.values().get(i).copied().unwrap_or(0.0);
                        assert!((v - x).abs() < 1e-10, "n={n} {a}..{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms_agree() {
        for m in 0..6 {
            let s = magic_spectrum(0.2, m);
            for a in [0.0, 0.25, 0.5, 1.0, 2.0, f64::INFINITY] {
                let a = RenyiOrder::new(a).unwrap();
                let x = renyi_entropy(&s, a).unwrap();
                assert!((x - magic_entropy_closed_form(0.2, m, a)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chi_blocks() {
        let chi = chi_copies(4, 0.25, 3).unwrap();
        assert_eq!(chi.len(), 24);
        let cap = 2.0 * (binary_entropy(0.25) + 0.25 * 4.0);
        assert!((cap - 3.6226).abs() < 1e-4);
        for a in 0..24 {
            for b in a + 1..=24 {
                let s = chi.block_entropy(a..b, RenyiOrder::VON_NEUMANN).unwrap();
                assert!(s <= cap + 1e-9 && s <= 4.0);
            }
        }
        let single = chi_copies(2, 0.5, 1).unwrap();
        let m = magic_state(2, 0.5).unwrap();
        for k in 1..4 {
            let x = single.cut_spectrum(k).unwrap();
            let y = m.schmidt_spectrum(k).unwrap();
            for (u, v) in x.values().iter().zip(y.values()) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chi_required_bond() {
        let n = 4;
        let chi = chi_copies(n, 1.0 / n as f64, 2).unwrap();
        assert_eq!(chi.required_bond(0.0).unwrap(), 17);
        for t in [0.05, 0.1] {
            let d = chi.required_bond(t).unwrap();
            assert!(d as f64 >= 16.0 * (1.0 - 8.0 * t) + 1.0);
            assert!(chi.measure_lower_bound(d).unwrap() <= t);
            if d > 1 {
                assert!(chi.measure_lower_bound(d - 1).unwrap() > t);
            }
        }
    }

    #[test]
    fn generic_copies_use_dense_interior() {
        let g = elementary_state(Elementary::Ghz, 4, 2).unwrap();
        let c = ProductOfCopies::new(g, 2).unwrap();
        let s = c.block_entropy(1..3, RenyiOrder::VON_NEUMANN).unwrap();
        assert!((s - 1.0).abs() < 1e-10);
        let s = c.block_entropy(2..6, RenyiOrder::VON_NEUMANN).unwrap();
        assert!((s - 2.0).abs() < 1e-10);
    }

    #[test]
    fn pair_ring_examples() {
        let m = pair_ring(4, 2).unwrap();
        assert_eq!(pair_positions(4, 2), vec![0, 1]);
        let s = m.schmidt_spectrum(2).unwrap();
        for a in [0.0, 1.0, f64::INFINITY] {
            let h = renyi_entropy(&s, RenyiOrder::new(a).unwrap()).unwrap();
            assert!((h - 2.0).abs() < 1e-12);
        }
        let bell = pair_ring(2, 1).unwrap().schmidt_spectrum(1).unwrap();
        assert_eq!(bell.len(), 2);
        assert!((bell.values()[0] - 0.5).abs() < 1e-12);
        let big = pair_ring(16, 4).unwrap();
        let s = big.schmidt_spectrum(8).unwrap();
        assert!((renyi_entropy(&s, RenyiOrder::INFINITY).unwrap() - 4.0).abs() < 1e-12);
        assert!(pair_ring(4, 3).is_err() && pair_ring(4, 0).is_err() && pair_ring(5, 1).is_err());
    }

    #[test]
    fn pair_ring_matches_dense() {
        let (n, nu) = (8, 3);
        let v = pair_ring(n, nu).unwrap().to_dense().unwrap();
        let mut oracle = vec![ZERO; 1 << n];
        let starts = pair_positions(n, nu);
        let amp = 0.5f64.powf(nu as f64 / 2.0);
        for bits in 0..(1usize << nu) {
            let mut idx = 0usize;
            for (j, &a) in starts.iter().enumerate() {
                if (bits >> j) & 1 == 1 {
                    idx |= 1 << (n - 1 - a);
                    idx |= 1 << (n - 1 - a - n / 2);
                }
            }
            oracle[idx] = C64::new(amp, 0.0);
        }
        assert!(dist(&v, &oracle) < 1e-12);
    }

    #[test]
    fn pair_ring_rank_counts_cut_pairs() {
        let (n, nu) = (10, 4);
        let m = pair_ring(n, nu).unwrap();
        for a in 0..n {
            for b in a + 1..=n.min(a + 6) {
                let rho = m.reduced_density(a..b).unwrap();
                let e = hermitian_eigenvalues(&rho).unwrap();
                let s0 = renyi_entropy(&Spectrum::new(e).unwrap(), RenyiOrder::ZERO).unwrap();
                assert!((s0 - pair_ring_cut_pairs(n, nu, a, b - a) as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn elementary_examples() {
        let up = elementary_state(Elementary::AllUp, 5, 2).unwrap();
        assert!(up.bond_dims().iter().all(|&d| d == 1));
        let g = elementary_state(Elementary::Ghz, 5, 2).unwrap();
        assert_eq!(g.bond_dims(), vec![1, 2, 2, 2, 2, 1]);
        let s = g.schmidt_spectrum(2).unwrap();
        assert!((s.values()[0] - 0.5).abs() < 1e-12 && (s.values()[1] - 0.5).abs() < 1e-12);
        let b = elementary_state(Elementary::Basis(5), 3, 2).unwrap().to_dense().unwrap();
        assert_eq!(b.iter().position(|z| z.norm() > 0.5), Some(5));
        assert!(elementary_state(Elementary::Basis(8), 3, 2).is_err());
        assert!("bogus".parse::<Elementary>().is_err());
        assert_eq!("basis(5)".parse::<Elementary>().unwrap(), Elementary::Basis(5));
    }

    #[test]
    fn tagged_product_is_w_like() {
        let base = ProductOfCopies::new(MatrixProductState::product_state(2, &[0, 0]).unwrap(), 1).unwrap();
        let t = tagged_translational_invariant(&base).unwrap();
        let v = t.to_dense().unwrap();
        // single excitation on each of the four sites, equal weight
        for k in 0..4 {
            assert!((v[1 << k].norm() - 0.5).abs() < 1e-10);
        }
        let shifted = t.cyclic_shift(1).unwrap();
        assert!((crate::mps::overlap(&t, &shifted).unwrap().norm() - 1.0).abs() < 1e-8);
    }
}
