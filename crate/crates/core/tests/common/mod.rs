//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use narain_lab::linalg::IMat;

/// Counts of vectors of D_n^+ = {x in Z^n u (Z + 1/2)^n : sum x even} by
/// norm x.x <= max_norm, from a coordinate box. Works in doubled
/// coordinates Y = 2x, splits the coordinates into two halves and joins the
/// half tallies on (sum Y^2, sum Y mod 4).
pub fn dn_plus_counts_box(n: usize, max_norm: i64) -> BTreeMap<i64, u64> {
    let cap = 4 * max_norm;
    let mut total: BTreeMap<i64, u64> = BTreeMap::new();
    for odd in [false, true] {
        let lim = ((cap as f64).sqrt()) as i64;
        let vals: Vec<i64> = (-lim..=lim).filter(|v| (v.rem_euclid(2) == 1) == odd).collect();
        let h1 = n / 2;
        let h2 = n - h1;
        let tally = |len: usize| {
            let mut t: BTreeMap<(i64, i64), u64> = BTreeMap::new();
            let mut idx = vec![0usize; len];
            loop {
                let sq: i64 = idx.iter().map(|&i| vals[i] * vals[i]).sum();
                if sq <= cap {
                    let s: i64 = idx.iter().map(|&i| vals[i]).sum::<i64>().rem_euclid(4);
                    *t.entry((sq, s)).or_default() += 1;
                }
                let mut k = 0;
                loop {
                    if k == len {
                        return t;
                    }
                    idx[k] += 1;
                    if idx[k] < vals.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        };
        let a = tally(h1);
        let b = if h2 == h1 { a.clone() } else { tally(h2) };
        for (&(sa, pa), &ca) in &a {
            for (&(sb, pb), &cb) in &b {
                if sa + sb <= cap && (pa + pb) % 4 == 0 {
                    *total.entry((sa + sb) / 4).or_default() += ca * cb;
                }
            }
        }
    }
    total
}

/// Convolution of two norm tallies, truncated at max_norm.
pub fn convolve(a: &BTreeMap<i64, u64>, b: &BTreeMap<i64, u64>, max_norm: i64) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for (&na, &ca) in a {
        for (&nb, &cb) in b {
            if na + nb <= max_norm {
                *out.entry(na + nb).or_default() += ca * cb;
            }
        }
    }
    out
}

/// Norm counts of a small positive-definite lattice by scanning the box
/// |x_i| <= sqrt(max_norm (G^-1)_ii).
pub fn box_counts(gram: &IMat, max_norm: i64) -> BTreeMap<i64, u64> {
    let n = gram.rows();
    let inv = gram.to_rational().inverse().expect("nondegenerate").to_f64();
    let bounds: Vec<i64> = (0..n).map(|i| ((max_norm as f64) * inv[i][i]).sqrt().floor() as i64 + 1).collect();
    let mut out = BTreeMap::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let norm: i64 = (0..n).map(|i| (0..n).map(|j| x[i] * gram[(i, j)] * x[j]).sum::<i64>()).sum();
        if norm <= max_norm {
            *out.entry(norm).or_default() += 1;
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            x[k] += 1;
            if x[k] <= bounds[k] {
                break;
            }
            x[k] = -bounds[k];
            k += 1;
        }
    }
}

/// Solves a dense real system by Gaussian elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}
