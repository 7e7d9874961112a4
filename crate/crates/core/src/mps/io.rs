//! Plain-text serialization.
//!
//! ```text
//! mps v1
//! sites <N>
//! phys <d>
//! site <k> <left> <right>
//! <re> <im>        (left*d*right lines, (l, i, r) row-major)
//! ...
//! ```
//!
//! Reals are written with 17 significant digits so a round trip is exact.

use std::fmt::Write as _;

use super::{MatrixProductState, SiteTensor};
use crate::error::{Error, Result};
use crate::linalg::C64;

const MAGIC: &str = "mps v1";

impl MatrixProductState {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "sites {}", self.len());
        let _ = writeln!(out, "phys {}", self.phys);
        for (k, s) in self.sites.iter().enumerate() {
            let _ = writeln!(out, "site {k} {} {}", s.left_dim(), s.right_dim());
            for z in s.data() {
                let _ = writeln!(out, "{:.16e} {:.16e}", z.re, z.im);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            })
        };
        let (line, head) = next("header")?;
        if head != MAGIC {
            return Err(Error::Parse {
                line,
                msg: format!("expected '{MAGIC}'"),
            });
        }
        let n = keyed(next("site count")?, "sites")?;
        let phys = keyed(next("physical dimension")?, "phys")?;
        if n == 0 || phys == 0 {
            return Err(Error::Parse {
                line,
                msg: "site count and physical dimension must be positive".into(),
            });
        }
        let mut sites = Vec::with_capacity(n);
        for k in 0..n {
            let (line, l) = next("site header")?;
            let f: Vec<&str> = l.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = f.get(1..4).map(|xs| {
                xs.iter().filter_map(|x| x.parse().ok()).collect()
            });
            let dims = match (f.first(), parsed) {
                (Some(&"site"), Some(d)) if d.len() == 3 && f.len() == 4 && d[0] == k => d,
                _ => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected 'site {k} <left> <right>'"),
                    })
                }
            };
            let (left, right) = (dims[1], dims[2]);
            let mut data = Vec::with_capacity(left * phys * right);
            for _ in 0..left * phys * right {
                let (line, l) = next("amplitude")?;
                let mut it = l.split_whitespace().map(str::parse::<f64>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(re)), Some(Ok(im)), None) => data.push(C64::new(re, im)),
                    _ => {
                        return Err(Error::Parse {
                            line,
                            msg: "expected '<re> <im>'".into(),
                        })
                    }
                }
            }
            sites.push(SiteTensor::new(left, phys, right, data)?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "trailing content".into(),
            });
        }
        Self::from_sites(sites)
    }
}

fn keyed((line, text): (usize, &str), key: &str) -> Result<usize> {
    let mut it = text.split_whitespace();
    match (it.next(), it.next().map(str::parse::<usize>), it.next()) {
        (Some(k), Some(Ok(v)), None) if k == key => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("expected '{key} <count>'"),
        }),
    }
}
