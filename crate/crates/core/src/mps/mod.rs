//! Open-boundary matrix product states.
//!
//! A state on `N` sites of local dimension `d` is stored as one
//! [`SiteTensor`] per site, holding the `d` matrices `A_i` of shape
//! `D_{k-1} x D_k`. The boundary bonds are always one-dimensional, so the
//! amplitude of `|i_1 ... i_N>` is the 1x1 product `A_{i_1} ... A_{i_N}`.
//!
//! Sites are indexed from zero. A *cut* `k` (with `1 <= k < N`) separates
//! sites `0..k` from `k..N`; bond `k` is the bond crossing cut `k`.

mod compress;
mod dense;
mod io;
mod gate;
mod ops;
mod translate;

pub use compress::TruncationReport;
pub use ops::{distances, overlap, DistanceReport};
pub(crate) use gate::Sweep;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, C64, ONE, ZERO};
use crate::spectrum::Spectrum;

/// Default budget for dense vectors and matrices, in amplitudes.
pub const DEFAULT_DENSE_THRESHOLD: usize = 1 << 24;

/// Relative singular-value cutoff below which a Schmidt value is treated as
/// an exact zero and its bond index dropped.
pub(crate) const ZERO_CUTOFF: f64 = 1e-14;

/// Tolerance for normalization checks at API boundaries.
pub const NORM_TOL: f64 = 1e-8;

/// Three-index tensor `A[l, i, r]` stored row-major in `(l, i, r)` order.
///
/// With this layout the "left" reshape `(l*d + i, r)` and the "right"
/// reshape `(l, i*D_r + r)` are both views of the same buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    left: usize,
    phys: usize,
    right: usize,
    data: Vec<C64>,
}

impl SiteTensor {
    pub fn new(left: usize, phys: usize, right: usize, data: Vec<C64>) -> Result<Self> {
        if left == 0 || phys == 0 || right == 0 {
            return Err(Error::invalid("tensor dimensions must be positive"));
        }
        if data.len() != left * phys * right {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {left}x{phys}x{right} site tensor",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("site tensor has non-finite entries"));
        }
        Ok(Self {
            left,
            phys,
            right,
            data,
        })
    }

    pub fn zeros(left: usize, phys: usize, right: usize) -> Self {
        Self {
            left,
            phys,
            right,
            data: vec![ZERO; left * phys * right],
        }
    }

    #[inline]
    pub fn left_dim(&self) -> usize {
        self.left
    }

    #[inline]
    pub fn phys_dim(&self) -> usize {
        self.phys
    }

    #[inline]
    pub fn right_dim(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, l: usize, i: usize, r: usize) -> C64 {
        self.data[(l * self.phys + i) * self.right + r]
    }

    #[inline]
    pub fn set(&mut self, l: usize, i: usize, r: usize, value: C64) {
        self.data[(l * self.phys + i) * self.right + r] = value;
    }

    /// The matrix `A_i` (shape `left x right`).
    pub fn matrix(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.left, self.right, |l, r| self.get(l, i, r))
    }

    /// Reshape to `(left*phys) x right`.
    pub fn left_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.left * self.phys, self.right, self.data.clone())
            .expect("shape is consistent")
    }

    /// Reshape to `left x (phys*right)`.
    pub fn right_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(self.left, self.phys * self.right, self.data.clone())
            .expect("shape is consistent")
    }

    pub(crate) fn from_left_matrix(m: ComplexMatrix, phys: usize) -> Self {
        let (rows, right) = (m.rows(), m.cols());
        debug_assert_eq!(rows % phys, 0);
        Self {
            left: rows / phys,
            phys,
            right,
            data: m.into_vec(),
        }
    }

    pub(crate) fn from_right_matrix(m: ComplexMatrix, phys: usize) -> Self {
        let (left, cols) = (m.rows(), m.cols());
        debug_assert_eq!(cols % phys, 0);
        Self {
            left,
            phys,
            right: cols / phys,
            data: m.into_vec(),
        }
    }

    /// `sum_i A_i^† A_i - 1`, largest entry.
    pub fn left_isometry_defect(&self) -> f64 {
        let m = self.left_matrix();
        let g = m.adjoint().matmul(&m).expect("shapes agree");
        g.sub(&ComplexMatrix::identity(self.right))
            .expect("shapes agree")
            .max_abs()
    }

    /// `sum_i A_i A_i^† - 1`, largest entry.
    pub fn right_isometry_defect(&self) -> f64 {
        let m = self.right_matrix();
        let g = m.matmul(&m.adjoint()).expect("shapes agree");
        g.sub(&ComplexMatrix::identity(self.left))
            .expect("shapes agree")
            .max_abs()
    }

    fn scale(&mut self, factor: C64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }
}

/// Which gauge conditions a state is known to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CanonicalForm {
    #[default]
    None,
    /// Sites `0..k` are left-isometric.
    LeftUpTo(usize),
    /// Sites `k+1..N` are right-isometric.
    RightUpTo(usize),
    /// Orthogonality center at the given site: everything left of it is
    /// left-isometric, everything right of it right-isometric.
    Mixed(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixProductState {
    phys: usize,
    sites: Vec<SiteTensor>,
    canonical: CanonicalForm,
    norm_hint: Option<f64>,
}

impl MatrixProductState {
    /// Assembles a state from site tensors, checking bond compatibility and
    /// the open boundary conditions.
    pub fn from_sites(sites: Vec<SiteTensor>) -> Result<Self> {
        let first = sites
            .first()
            .ok_or_else(|| Error::invalid("an MPS needs at least one site"))?;
        let phys = first.phys;
        if first.left != 1 || sites.last().map(|s| s.right) != Some(1) {
            return Err(Error::invalid("boundary bonds must be one-dimensional"));
        }
        for (k, w) in sites.windows(2).enumerate() {
            if w[0].right != w[1].left {
                return Err(Error::ShapeMismatch(format!(
                    "bond {} has dimension {} on the left and {} on the right",
                    k + 1,
                    w[0].right,
                    w[1].left
                )));
            }
        }
        if sites.iter().any(|s| s.phys != phys) {
            return Err(Error::invalid("physical dimension must be uniform"));
        }
        Ok(Self {
            phys,
            sites,
            canonical: CanonicalForm::None,
            norm_hint: None,
        })
    }

    pub(crate) fn from_sites_unchecked(phys: usize, sites: Vec<SiteTensor>) -> Self {
        Self {
            phys,
            sites,
            canonical: CanonicalForm::None,
            norm_hint: None,
        }
    }

    /// Product state `|levels[0]> ⊗ |levels[1]> ⊗ ...`.
    pub fn product_state(phys: usize, levels: &[usize]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("an MPS needs at least one site"));
        }
        if phys == 0 {
            return Err(Error::invalid("physical dimension must be positive"));
        }
        let sites = levels
            .iter()
            .map(|&lv| {
                if lv >= phys {
                    return Err(Error::invalid(format!(
                        "level {lv} out of range for d = {phys}"
                    )));
                }
                let mut t = SiteTensor::zeros(1, phys, 1);
                t.set(0, lv, 0, ONE);
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut m = Self::from_sites_unchecked(phys, sites);
        m.canonical = CanonicalForm::Mixed(0);
        m.norm_hint = Some(1.0);
        Ok(m)
    }

    /// Random state with bond dimension `min(bond, d^k, d^(N-k))` at cut
    /// `k`, standard complex Gaussian entries, canonicalized and
    /// normalized.
    pub fn random<R: Rng + ?Sized>(n: usize, phys: usize, bond: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || phys == 0 || bond == 0 {
            return Err(Error::invalid("random MPS needs n, d, D >= 1"));
        }
        let dims = Self::capped_bonds(n, phys, bond);
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let sites = (0..n)
            .map(|k| {
                let (l, r) = (dims[k], dims[k + 1]);
                let data = (0..l * phys * r)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        C64::new(re * scale, im * scale)
                    })
                    .collect();
                SiteTensor {
                    left: l,
                    phys,
                    right: r,
                    data,
                }
            })
            .collect();
        Self::from_sites_unchecked(phys, sites).canonicalize(0)?.normalized()
    }

    /// Bond dimensions `min(bond, d^k, d^(N-k))` for `k = 0..=N`.
    pub fn capped_bonds(n: usize, phys: usize, bond: usize) -> Vec<usize> {
        (0..=n)
            .map(|k| {
                let side = k.min(n - k) as u32;
                let full = (phys as u128).checked_pow(side).unwrap_or(u128::MAX);
                (bond as u128).min(full) as usize
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    #[inline]
    pub fn phys_dim(&self) -> usize {
        self.phys
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn site(&self, k: usize) -> &SiteTensor {
        &self.sites[k]
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical
    }

    pub fn norm_hint(&self) -> Option<f64> {
        self.norm_hint
    }

    /// `D_0, ..., D_N` (both ends are 1).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.len() + 1);
        dims.push(1);
        dims.extend(self.sites.iter().map(|s| s.right));
        dims
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right).max().unwrap_or(1)
    }

    /// Number of amplitudes of the dense vector, or `None` on overflow.
    pub fn dense_len(&self) -> Option<u128> {
        (self.phys as u128).checked_pow(self.len() as u32)
    }

    pub fn norm_squared(&self) -> f64 {
        if let CanonicalForm::Mixed(c) = self.canonical {
            return self.sites[c].data.iter().map(|z| z.norm_sqr()).sum();
        }
        ops::overlap_unchecked(self, self).re.max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(factor);
        out.norm_hint = self.norm_hint.map(|n| n * factor.norm());
        out
    }

    /// Scales the state by multiplying a site that carries no gauge
    /// condition.
    fn scale_in_place(&mut self, factor: C64) {
        let n = self.len();
        let target = match self.canonical {
            CanonicalForm::Mixed(c) => c,
            CanonicalForm::LeftUpTo(k) if k < n => n - 1,
            CanonicalForm::LeftUpTo(_) => {
                self.canonical = CanonicalForm::LeftUpTo(n - 1);
                n - 1
            }
            CanonicalForm::RightUpTo(_) | CanonicalForm::None => 0,
        };
        self.sites[target].scale(factor);
    }

    /// Rescales to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero-norm state"));
        }
        let mut out = self.clone();
        out.scale_in_place(C64::new(1.0 / n, 0.0));
        out.norm_hint = Some(1.0);
        Ok(out)
    }

    /// Sets the canonical tag and cached norm of a state built by hand.
    pub(crate) fn with_form(mut self, form: CanonicalForm, norm: f64) -> Self {
        self.canonical = form;
        self.norm_hint = Some(norm);
        self
    }

    pub fn require_normalized(&self) -> Result<f64> {
        let n2 = self.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(n2)
    }

    /// Tensor product of two chains (sites of `self` first).
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.phys != other.phys {
            return Err(Error::ShapeMismatch(format!(
                "physical dimensions {} and {}",
                self.phys, other.phys
            )));
        }
        let mut sites = self.sites.clone();
        sites.extend(other.sites.iter().cloned());
        Ok(Self::from_sites_unchecked(self.phys, sites))
    }

    /// Brings the state into mixed canonical form with orthogonality center
    /// at `center` (0-based). The represented vector is unchanged.
    pub fn canonicalize(&self, center: usize) -> Result<Self> {
        let n = self.len();
        if center >= n {
            return Err(Error::invalid(format!(
                "center {center} out of range for {n} sites"
            )));
        }
        let mut out = self.clone();
        let (left_done, right_done) = match self.canonical {
            CanonicalForm::None => (0, n - 1),
            CanonicalForm::LeftUpTo(k) => (k.min(n - 1), n - 1),
            CanonicalForm::RightUpTo(k) => (0, k.min(n - 1)),
            CanonicalForm::Mixed(c) => (c, c),
        };
        for k in left_done.min(center)..center {
            out.shift_center_right(k);
        }
        // Sites between `center` and `left_done` are already left-isometric
        // when coming from a mixed form; they need to be swept leftwards.
        let start = right_done.max(left_done).max(center);
        for k in (center + 1..=start).rev() {
            out.shift_center_left(k);
        }
        out.canonical = CanonicalForm::Mixed(center);
        out.norm_hint = Some(out.sites[center].data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        Ok(out)
    }

    /// QR of site `k`, pushing R into site `k + 1`.
    pub(crate) fn shift_center_right(&mut self, k: usize) {
        let phys = self.phys;
        let (q, r) = linalg::qr(&self.sites[k].left_matrix());
        self.sites[k] = SiteTensor::from_left_matrix(q, phys);
        let next = r
            .matmul(&self.sites[k + 1].right_matrix())
            .expect("bond dimensions agree");
        self.sites[k + 1] = SiteTensor::from_right_matrix(next, phys);
    }

    /// LQ of site `k`, pushing L into site `k - 1`.
    pub(crate) fn shift_center_left(&mut self, k: usize) {
        let phys = self.phys;
        let (l, q) = linalg::lq(&self.sites[k].right_matrix());
        self.sites[k] = SiteTensor::from_right_matrix(q, phys);
        let prev = self.sites[k - 1]
            .left_matrix()
            .matmul(&l)
            .expect("bond dimensions agree");
        self.sites[k - 1] = SiteTensor::from_left_matrix(prev, phys);
    }

    /// Moves the orthogonality center of a mixed-canonical state.
    pub(crate) fn move_center(&mut self, to: usize) {
        let CanonicalForm::Mixed(mut c) = self.canonical else {
            panic!("move_center requires a mixed canonical state");
        };
        while c < to {
            self.shift_center_right(c);
            c += 1;
        }
        while c > to {
            self.shift_center_left(c);
            c -= 1;
        }
        self.canonical = CanonicalForm::Mixed(c);
    }

    /// Largest isometry defect over the sites the canonical tag covers.
    pub fn gauge_defect(&self) -> f64 {
        let n = self.len();
        let (left_upto, right_from) = match self.canonical {
            CanonicalForm::None => (0, n),
            CanonicalForm::LeftUpTo(k) => (k, n),
            CanonicalForm::RightUpTo(k) => (0, k + 1),
            CanonicalForm::Mixed(c) => (c, c + 1),
        };
        let l = self.sites[..left_upto]
            .iter()
            .map(SiteTensor::left_isometry_defect)
            .fold(0.0, f64::max);
        let r = self.sites[right_from.min(n)..]
            .iter()
            .map(SiteTensor::right_isometry_defect)
            .fold(0.0, f64::max);
        l.max(r)
    }

    fn check_cut(&self, cut: usize) -> Result<()> {
        if cut == 0 || cut >= self.len() {
            return Err(Error::invalid(format!(
                "cut {cut} out of range 1..{} for {} sites",
                self.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Eigenvalues of the reduced density matrix of sites `0..cut`.
    pub fn schmidt_spectrum(&self, cut: usize) -> Result<Spectrum> {
        self.check_cut(cut)?;
        let c = self.canonicalize(cut - 1)?;
        let d = linalg::svd(&c.sites[cut - 1].left_matrix())?;
        let spec = Spectrum::from_singular_values(&d.s)?;
        if (spec.total() - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(spec.total()));
        }
        Ok(trim_zeros(spec))
    }

    /// Schmidt spectra at every cut `1..N`, from a single sweep.
    pub fn schmidt_spectra(&self) -> Result<Vec<Spectrum>> {
        let n = self.len();
        let mut c = self.canonicalize(0)?;
        let n2 = c.norm_hint.unwrap_or(0.0).powi(2);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            let d = linalg::svd(&c.sites[k].left_matrix())?;
            out.push(trim_zeros(Spectrum::from_singular_values(&d.s)?));
            let keep = significant(&d.s);
            let d = d.truncate(keep);
            let next = d
                .s_vh()
                .matmul(&c.sites[k + 1].right_matrix())
                .expect("bond dimensions agree");
            c.sites[k] = SiteTensor::from_left_matrix(d.u, self.phys);
            c.sites[k + 1] = SiteTensor::from_right_matrix(next, self.phys);
        }
        Ok(out)
    }

    /// Schmidt values `sqrt(λ)` at a cut, nonincreasing.
    pub fn schmidt_values(&self, cut: usize) -> Result<Vec<f64>> {
        Ok(self
            .schmidt_spectrum(cut)?
            .values()
            .iter()
            .map(|v| v.sqrt())
            .collect())
    }
}

/// Number of singular values above the relative zero cutoff (at least one).
pub(crate) fn significant(s: &[f64]) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > ZERO_CUTOFF * top).count().max(1)
}

/// Drops trailing numerically-zero entries (keeps at least one).
fn trim_zeros(spec: Spectrum) -> Spectrum {
    let vals = spec.values();
    let top = vals.first().copied().unwrap_or(0.0);
    let keep = vals
        .iter()
        .filter(|&&v| v > ZERO_CUTOFF * ZERO_CUTOFF * top)
        .count()
        .max(1);
    Spectrum::new(vals[..keep].to_vec()).expect("subset of a valid spectrum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_state_shape() {
        let m = MatrixProductState::product_state(2, &[0, 1, 0]).unwrap();
        assert_eq!(m.bond_dims(), vec![1, 1, 1, 1]);
        assert!((m.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_sites_rejects_bad_bonds() {
        let a = SiteTensor::zeros(1, 2, 2);
        let b = SiteTensor::zeros(3, 2, 1);
        assert!(matches!(
            MatrixProductState::from_sites(vec![a, b]),
            Err(Error::ShapeMismatch(_))
        ));
        let open = SiteTensor::zeros(2, 2, 1);
        assert!(MatrixProductState::from_sites(vec![open]).is_err());
    }

    #[test]
    fn canonicalize_random_keeps_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = MatrixProductState::random(8, 2, 4, &mut rng).unwrap();
        for center in [0, 3, 7] {
            let c = m.canonicalize(center).unwrap();
            assert!(c.gauge_defect() < 1e-10, "center {center}");
            let ov = overlap(&m, &c).unwrap();
            assert!((ov.norm() - 1.0).abs() < 1e-10);
            assert_eq!(c.len(), 8);
            assert_eq!(c.phys_dim(), 2);
        }
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = MatrixProductState::random(6, 3, 3, &mut rng).unwrap();
        let a = m.canonicalize(2).unwrap();
        let b = a.canonicalize(2).unwrap();
        assert!(b.gauge_defect() < 1e-10);
        assert!((overlap(&a, &b).unwrap() - ONE).norm() < 1e-10);
        let c = a.canonicalize(4).unwrap();
        assert!(c.gauge_defect() < 1e-10);
    }

    #[test]
    fn random_bonds_are_capped() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MatrixProductState::random(6, 2, 16, &mut rng).unwrap();
        assert!(m.bond_dims().iter().zip(MatrixProductState::capped_bonds(6, 2, 16)).all(|(a, b)| *a <= b));
        assert!((m.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_spectrum_is_pure() {
        let m = MatrixProductState::product_state(2, &[0, 1, 1, 0]).unwrap();
        for cut in 1..4 {
            let s = m.schmidt_spectrum(cut).unwrap();
            assert_eq!(s.len(), 1);
            assert!((s.values()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_rejects_unnormalized() {
        let m = MatrixProductState::product_state(2, &[0, 0])
            .unwrap()
            .scaled(C64::new(2.0, 0.0));
        assert!(matches!(m.schmidt_spectrum(1), Err(Error::NotNormalized(_))));
        assert!(m.schmidt_spectrum(0).is_err());
        assert!(m.schmidt_spectrum(2).is_err());
    }

    #[test]
    fn sweep_spectra_match_single_cuts() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = MatrixProductState::random(7, 2, 5, &mut rng).unwrap();
        let all = m.schmidt_spectra().unwrap();
        for (k, s) in all.iter().enumerate() {
            let single = m.schmidt_spectrum(k + 1).unwrap();
            assert_eq!(s.len(), single.len());
            for (a, b) in s.values().iter().zip(single.values()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
