use super::{CanonicalForm, MatrixProductState, SiteTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ZERO};

/// Where the orthogonality center ends up after a two-site update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sweep {
    /// Center moves to `k + 1` (site `k` becomes left-isometric).
    Right,
    /// Center stays on `k` (site `k + 1` becomes right-isometric).
    Left,
}

impl MatrixProductState {
    /// Applies a `d^2 x d^2` gate to sites `k, k+1` of a mixed-canonical
    /// state whose center is on one of them, then splits by SVD.
    ///
    /// `keep` sees the singular values (nonincreasing, unnormalized) and
    /// returns how many to retain. Returns the singular values and the
    /// discarded weight.
    pub(crate) fn apply_two_site(
        &mut self,
        k: usize,
        gate: &ComplexMatrix,
        sweep: Sweep,
        mut keep: impl FnMut(&[f64]) -> usize,
    ) -> Result<(Vec<f64>, f64)> {
        let d = self.phys;
        if k + 1 >= self.len() {
            return Err(Error::invalid(format!("bond ({k}, {}) out of range", k + 1)));
        }
        if gate.rows() != d * d || gate.cols() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} gate for local dimension {d}",
                gate.rows(),
                gate.cols()
            )));
        }
        match self.canonical {
            CanonicalForm::Mixed(c) if c == k || c == k + 1 => {}
            other => {
                return Err(Error::invalid(format!(
                    "two-site update on ({k}, {}) needs the center there, state is {other:?}",
                    k + 1
                )))
            }
        }
        let (l, r) = (self.sites[k].left_dim(), self.sites[k + 1].right_dim());
        // theta[(l, i), (j, r)]
        let theta = self.sites[k]
            .left_matrix()
            .matmul(&self.sites[k + 1].right_matrix())?;
        let src = theta.as_slice();
        let g = gate.as_slice();
        let mut out = vec![ZERO; src.len()];
        let mut local = vec![ZERO; d * d];
        for a in 0..l {
            for b in 0..r {
                for i in 0..d {
                    for j in 0..d {
                        local[i * d + j] = src[((a * d + i) * d + j) * r + b];
                    }
                }
                for p in 0..d * d {
                    let row = &g[p * d * d..(p + 1) * d * d];
                    let v = row.iter().zip(&local).fold(ZERO, |acc, (x, y)| acc + x * y);
                    out[((a * d + p / d) * d + p % d) * r + b] = v;
                }
            }
        }
        let theta = ComplexMatrix::from_vec(l * d, d * r, out)?;
        let dec = linalg::svd(&theta)?;
        let n_keep = keep(&dec.s).clamp(1, dec.s.len().max(1));
        let discarded: f64 = dec.s[n_keep..].iter().map(|x| x * x).sum();
        let s = dec.s.clone();
        let dec = dec.truncate(n_keep);
        let kept: f64 = dec.s.iter().map(|x| x * x).sum();
        match sweep {
            Sweep::Right => {
                self.sites[k] = SiteTensor::from_left_matrix(dec.u.clone(), d);
                self.sites[k + 1] = SiteTensor::from_right_matrix(dec.s_vh(), d);
                self.canonical = CanonicalForm::Mixed(k + 1);
            }
            Sweep::Left => {
                self.sites[k] = SiteTensor::from_left_matrix(dec.u_s(), d);
                self.sites[k + 1] = SiteTensor::from_right_matrix(dec.vh.clone(), d);
                self.canonical = CanonicalForm::Mixed(k);
            }
        }
        self.norm_hint = Some(kept.sqrt());
        Ok((s, discarded))
    }

    /// Unnormalized Schmidt values at `cut` of a mixed-canonical state,
    /// moving the center to `cut - 1` first.
    pub(crate) fn center_cut_values(&mut self, cut: usize) -> Result<Vec<f64>> {
        if cut == 0 || cut >= self.len() {
            return Err(Error::invalid(format!("cut {cut} out of range")));
        }
        if !matches!(self.canonical, CanonicalForm::Mixed(_)) {
            return Err(Error::invalid("state is not in mixed canonical form"));
        }
        self.move_center(cut - 1);
        Ok(linalg::svd(&self.sites[cut - 1].left_matrix())?.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn apply_dense(v: &[C64], n: usize, k: usize, gate: &ComplexMatrix) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        let shift = n - k - 2;
        for (x, amp) in v.iter().enumerate() {
            let ij = (x >> shift) & 3;
            for p in 0..4 {
                let y = (x & !(3 << shift)) | (p << shift);
                out[y] += gate[(p, ij)] * amp;
            }
        }
        out
    }

    #[test]
    fn matches_dense_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = MatrixProductState::random(5, 2, 3, &mut rng).unwrap();
        let gate = ComplexMatrix::from_fn(4, 4, |i, j| C64::new((i * 4 + j) as f64 * 0.1, (i as f64) - (j as f64)));
        for (k, sweep) in [(1, Sweep::Right), (2, Sweep::Left), (3, Sweep::Right)] {
            let mut m = psi.canonicalize(k).unwrap();
            m.apply_two_site(k, &gate, sweep, |s| s.len()).unwrap();
            let got = m.to_dense().unwrap();
            let want = apply_dense(&psi.to_dense().unwrap(), 5, k, &gate);
            let err: f64 = got.iter().zip(&want).map(|(a, b)| (a - b).norm_sqr()).sum();
            assert!(err.sqrt() < 1e-10, "bond {k}: {err}");
            assert!(m.gauge_defect() < 1e-10);
        }
    }

    #[test]
    fn identity_gate_keeps_state() {
        let mut m = MatrixProductState::product_state(2, &[0, 1, 0]).unwrap().canonicalize(0).unwrap();
        let id = ComplexMatrix::identity(4);
        let (s, w) = m.apply_two_site(0, &id, Sweep::Right, |s| s.len()).unwrap();
        assert_eq!(w, 0.0);
        assert!((s[0] - 1.0).abs() < 1e-14);
        assert_eq!(m.canonical_form(), CanonicalForm::Mixed(1));
        let v = m.to_dense().unwrap();
        assert!((v[2] - ONE).norm() < 1e-14);
    }

    #[test]
    fn rejects_off_center_bond() {
        let mut m = MatrixProductState::product_state(2, &[0, 0, 0, 0]).unwrap().canonicalize(0).unwrap();
        assert!(m.apply_two_site(2, &ComplexMatrix::identity(4), Sweep::Right, |s| s.len()).is_err());
    }
}
