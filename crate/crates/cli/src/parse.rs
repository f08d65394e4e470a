//! Text formats for complex vectors, ranges and grids.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;

/// `"re,im re,im ..."`: one `re,im` pair per coordinate.
pub fn complex_vector(text: &str) -> Result<Vec<Complex64>> {
    let coords: Vec<Complex64> = text
        .split_whitespace()
        .map(|pair| {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| anyhow!("expected re,im but found {pair:?}"))?;
            let parse = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}"));
            let z = Complex64::new(parse(re)?, parse(im)?);
            if !(z.re.is_finite() && z.im.is_finite()) {
                bail!("non-finite coordinate {pair:?}");
            }
            Ok(z)
        })
        .collect::<Result<_>>()?;
    if coords.is_empty() {
        bail!("empty vector");
    }
    Ok(coords)
}

/// One vector per line; blank lines and `#` comments are skipped.
pub fn vector_file(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then(|| complex_vector(line).with_context(|| format!("{}:{}", path.display(), i + 1)))
        })
        .collect()
}

/// `"v"` (a single value) or `"lo:hi:n"` (`n` equally spaced values).
pub fn range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?} in range {text:?}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = n.trim().parse().with_context(|| format!("bad count in range {text:?}"))?;
            match n {
                0 => bail!("range {text:?} has no points"),
                1 => Ok(vec![lo]),
                _ => Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => bail!("expected v or lo:hi:n, found {text:?}"),
    }
}

/// `"re1=lo:hi:n,im1=v,re2=...,im2=..."`; every coordinate of `C^dim` must be
/// given. Points are listed with the first named axis varying slowest.
pub fn grid(text: &str, dim: usize) -> Result<Vec<Vec<Complex64>>> {
    let mut axes: Vec<Option<Vec<f64>>> = vec![None; 2 * dim];
    let mut order = Vec::new();
    for item in text.split(',') {
        let (name, spec) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("expected name=range, found {item:?}"))?;
        let name = name.trim();
        let (part, idx) = if let Some(k) = name.strip_prefix("re") {
            (0, k)
        } else if let Some(k) = name.strip_prefix("im") {
            (1, k)
        } else {
            bail!("unknown grid axis {name:?}");
        };
        let k: usize = idx.parse().with_context(|| format!("bad axis {name:?}"))?;
        if k == 0 || k > dim {
            bail!("axis {name:?} outside dimension {dim}");
        }
        let slot = 2 * (k - 1) + part;
        if axes[slot].is_some() {
            bail!("axis {name:?} given twice");
        }
        axes[slot] = Some(range(spec)?);
        order.push(slot);
    }
    if order.len() != 2 * dim {
        bail!("grid needs re1..re{dim} and im1..im{dim}");
    }
    let axes: Vec<Vec<f64>> = axes.into_iter().map(Option::unwrap).collect();
    let mut points = vec![vec![0.0; 2 * dim]];
    for &slot in &order {
        points = points
            .into_iter()
            .flat_map(|p| {
                axes[slot].iter().map(move |&v| {
                    let mut q = p.clone();
                    q[slot] = v;
                    q
                })
            })
            .collect();
    }
    Ok(points
        .into_iter()
        .map(|p| p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
        .collect())
}
