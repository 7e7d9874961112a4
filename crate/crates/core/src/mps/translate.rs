use super::{significant, CanonicalForm, MatrixProductState, SiteTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Squared norm below which a superposition counts as vanishing.
const VANISHING_NORM_SQ: f64 = 1e-20;

impl MatrixProductState {
    /// The state translated by `shift` sites around the ring: new site `j`
    /// carries old site `(j + shift) mod N`.
    ///
    /// The bond that closes the ring is carried along every bond of the
    /// open chain, so bond dimensions grow by the factor `D_shift`.
    pub fn cyclic_shift(&self, shift: usize) -> Result<Self> {
        let n = self.len();
        let s = shift % n;
        if s == 0 {
            return Ok(self.clone());
        }
        let out = Self::from_sites_unchecked(self.phys, shifted_sites(self, s));
        out.trimmed()
    }

    /// Normalized sum of all `N` cyclic translates.
    pub fn translate_superposition(&self) -> Result<Self> {
        let n = self.len();
        if n == 1 {
            return self.normalized();
        }
        let families: Vec<Vec<SiteTensor>> = (0..n)
            .map(|s| {
                if s == 0 {
                    self.sites.clone()
                } else {
                    shifted_sites(self, s)
                }
            })
            .collect();
        let sum = Self::from_sites_unchecked(self.phys, direct_sum(&families));
        let n2 = sum.norm_squared();
        let scale: f64 = self.norm_squared().max(f64::MIN_POSITIVE);
        if !(n2 / scale > VANISHING_NORM_SQ) {
            return Err(Error::VanishingSuperposition);
        }
        sum.trimmed()?.normalized()
    }

    /// Removes numerically-zero bond directions by a QR sweep followed by
    /// an SVD sweep. The represented vector is unchanged up to those zeros.
    pub(crate) fn trimmed(&self) -> Result<Self> {
        let n = self.len();
        let phys = self.phys;
        let mut c = self.canonicalize(0)?;
        for k in 0..n.saturating_sub(1) {
            let d = linalg::svd(&c.sites[k].left_matrix())?;
            let keep = significant(&d.s);
            let d = d.truncate(keep);
            let next = d.s_vh().matmul(&c.sites[k + 1].right_matrix())?;
            c.sites[k] = SiteTensor::from_left_matrix(d.u, phys);
            c.sites[k + 1] = SiteTensor::from_right_matrix(next, phys);
        }
        c.canonical = CanonicalForm::Mixed(n - 1);
        c.norm_hint = Some(
            c.sites[n - 1]
                .data()
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt(),
        );
        Ok(c)
    }
}

/// Open-chain tensors of the translate by `s` (0 < s < N), with the
/// ring-closing bond `D_s` carried as an extra index.
fn shifted_sites(m: &MatrixProductState, s: usize) -> Vec<SiteTensor> {
    let n = m.len();
    let phys = m.phys;
    let carrier = m.sites[s].left_dim();
    let order: Vec<usize> = (0..n).map(|j| (j + s) % n).collect();
    order
        .iter()
        .enumerate()
        .map(|(j, &old)| {
            let a = &m.sites[old];
            let (l, r) = (a.left_dim(), a.right_dim());
            if j == 0 {
                // A_s[c, i, b] -> B[1, i, (b, c)]
                let mut t = SiteTensor::zeros(1, phys, r * carrier);
                for c in 0..carrier {
                    for i in 0..phys {
                        for b in 0..r {
                            t.set(0, i, b * carrier + c, a.get(c, i, b));
                        }
                    }
                }
                t
            } else if j == n - 1 {
                // A_{s-1}[a, i, c] -> B[(a, c), i, 1]
                let mut t = SiteTensor::zeros(l * carrier, phys, 1);
                for x in 0..l {
                    for c in 0..carrier {
                        for i in 0..phys {
                            t.set(x * carrier + c, i, 0, a.get(x, i, c));
                        }
                    }
                }
                t
            } else {
                let mut t = SiteTensor::zeros(l * carrier, phys, r * carrier);
                for x in 0..l {
                    for i in 0..phys {
                        for b in 0..r {
                            let v = a.get(x, i, b);
                            if v == C64::new(0.0, 0.0) {
                                continue;
                            }
                            for c in 0..carrier {
                                t.set(x * carrier + c, i, b * carrier + c, v);
                            }
                        }
                    }
                }
                t
            }
        })
        .collect()
}

/// Tensors of the sum of several chains with identical length and
/// physical dimension: block-diagonal in the interior, concatenated at the
/// ends.
fn direct_sum(families: &[Vec<SiteTensor>]) -> Vec<SiteTensor> {
    let n = families[0].len();
    let phys = families[0][0].phys_dim();
    (0..n)
        .map(|k| {
            let lefts: Vec<usize> = families
                .iter()
                .map(|f| if k == 0 { 0 } else { f[k].left_dim() })
                .collect();
            let rights: Vec<usize> = families
                .iter()
                .map(|f| if k == n - 1 { 0 } else { f[k].right_dim() })
                .collect();
            let l_tot = if k == 0 { 1 } else { lefts.iter().sum() };
            let r_tot = if k == n - 1 { 1 } else { rights.iter().sum() };
            let mut t = SiteTensor::zeros(l_tot, phys, r_tot);
            let (mut lo, mut ro) = (0, 0);
            for (f, fam) in families.iter().enumerate() {
                let a = &fam[k];
                for x in 0..a.left_dim() {
                    for i in 0..phys {
                        for b in 0..a.right_dim() {
                            t.set(lo + x, i, ro + b, a.get(x, i, b));
                        }
                    }
                }
                lo += lefts[f];
                ro += rights[f];
            }
            t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_shift(v: &[C64], phys: usize, n: usize, s: usize) -> Vec<C64> {
        // new index digits j = old digit (j + s) mod n
        let mut out = vec![ZERO; v.len()];
        for (idx, amp) in v.iter().enumerate() {
            let mut digits = vec![0; n];
            let mut x = idx;
            for k in (0..n).rev() {
                digits[k] = x % phys;
                x /= phys;
            }
            let mut y = 0;
            for j in 0..n {
                y = y * phys + digits[(j + s) % n];
            }
            out[y] = *amp;
        }
        out
    }

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn shift_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = MatrixProductState::random(6, 2, 3, &mut rng).unwrap();
        let v = m.to_dense().unwrap();
        for s in 0..6 {
            let sh = m.cyclic_shift(s).unwrap().to_dense().unwrap();
            assert!(dist(&sh, &dense_shift(&v, 2, 6, s)) < 1e-10, "shift {s}");
        }
    }

    #[test]
    fn invariant_input_is_fixed() {
        let m = MatrixProductState::product_state(2, &[0; 5]).unwrap();
        let t = m.translate_superposition().unwrap();
        assert_eq!(t.max_bond(), 1);
        let v = t.to_dense().unwrap();
        assert!((v[0].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_site_ring() {
        let m = MatrixProductState::product_state(2, &[1, 0]).unwrap();
        let v = m.translate_superposition().unwrap().to_dense().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [ZERO, C64::new(h, 0.0), C64::new(h, 0.0), ZERO];
        // global phase is fixed by construction: both amplitudes positive
        assert!(dist(&v, &expect) < 1e-10);
    }

    #[test]
    fn random_superposition_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 7;
        let m = MatrixProductState::random(n, 2, 2, &mut rng).unwrap();
        let v = m.to_dense().unwrap();
        let mut sum = vec![ZERO; v.len()];
        for s in 0..n {
            for (a, b) in sum.iter_mut().zip(dense_shift(&v, 2, n, s)) {
                *a += b;
            }
        }
        let norm = sum.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        sum.iter_mut().for_each(|z| *z /= norm);
        let t = m.translate_superposition().unwrap();
        let tv = t.to_dense().unwrap();
        let f = tv.iter().zip(&sum).map(|(a, b)| a.conj() * b).sum::<C64>().norm();
        assert!((f - 1.0).abs() < 1e-8);
        assert!(t.max_bond() <= n * 2 * 2);
    }

    #[test]
    fn destructive_interference_is_reported() {
        // |01> - |10> is odd under the swap, so the two translates cancel.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = [ZERO, C64::new(h, 0.0), C64::new(-h, 0.0), ZERO];
        let m = MatrixProductState::from_dense(&v, 2, None).unwrap();
        assert_eq!(
            m.translate_superposition().unwrap_err(),
            Error::VanishingSuperposition
        );
    }
}
