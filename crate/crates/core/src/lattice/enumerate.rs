//! Short-vector enumeration for positive-definite lattices.
//!
//! Fincke-Pohst with floating bounds derived from an exact rational
//! completion of squares. The float bounds are only used for pruning and are
//! padded; whether a vector is reported is decided with exact integer norms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::{map_slice, ExecMode};
use crate::linalg::{completed_squares, ratio_to_f64, IMat};

use super::{Lattice, LatticeVector};

const SLACK: f64 = 1e-6;
/// Number of leading coordinates fixed per parallel task.
const SPLIT_DEPTH: usize = 2;

struct Searcher {
    n: usize,
    gram: IMat,
    q: Vec<f64>,
    mu: Vec<Vec<f64>>,
    max_norm: i64,
    bound: f64,
}

impl Searcher {
    fn new(l: &Lattice, max_norm: i64) -> Result<Self> {
        let (q, mu) = completed_squares(l.gram()).ok_or(Error::NotPositiveDefinite)?;
        Ok(Searcher {
            n: l.rank(),
            gram: l.gram().clone(),
            q: q.iter().map(ratio_to_f64).collect(),
            mu: mu.iter().map(|r| r.iter().map(ratio_to_f64).collect()).collect(),
            max_norm,
            bound: max_norm as f64 + SLACK,
        })
    }

    /// Admissible range for coordinate `i` given x[i+1..].
    fn range(&self, i: usize, x: &[i64], partial: f64) -> Option<(i64, i64, f64)> {
        let rest = self.bound - partial;
        if rest < 0.0 {
            return None;
        }
        let c: f64 = (i + 1..self.n).map(|j| self.mu[i][j] * x[j] as f64).sum();
        let r = (rest / self.q[i]).sqrt();
        let lo = (-c - r - SLACK).ceil() as i64;
        let hi = (-c + r + SLACK).floor() as i64;
        (lo <= hi).then_some((lo, hi, c))
    }

    fn exact_step(&self, i: usize, x: &[i64], xi: i64) -> i64 {
        let s: i64 = (i + 1..self.n).map(|j| self.gram[(i, j)] * x[j]).sum();
        xi * (self.gram[(i, i)] * xi + 2 * s)
    }

    /// Prefixes of the top `depth` coordinates that can still be extended.
    fn prefixes(&self, depth: usize) -> Vec<(Vec<i64>, f64, i64)> {
        let mut out = Vec::new();
        let mut x = vec![0; self.n];
        self.collect_prefixes(self.n, depth, &mut x, 0.0, 0, &mut out);
        out
    }

    fn collect_prefixes(
        &self,
        level: usize,
        depth: usize,
        x: &mut [i64],
        partial: f64,
        exact: i64,
        out: &mut Vec<(Vec<i64>, f64, i64)>,
    ) {
        if depth == 0 || level == 0 {
            out.push((x.to_vec(), partial, exact));
            return;
        }
        let i = level - 1;
        let Some((lo, hi, c)) = self.range(i, x, partial) else { return };
        for v in lo..=hi {
            let t = v as f64 + c;
            let e = exact + self.exact_step(i, x, v);
            x[i] = v;
            self.collect_prefixes(i, depth - 1, x, partial + self.q[i] * t * t, e, out);
        }
        x[i] = 0;
    }

    fn search<F: FnMut(&[i64], i64)>(&self, level: usize, x: &mut [i64], partial: f64, exact: i64, visit: &mut F) {
        if level == 0 {
            if exact > 0 && exact <= self.max_norm {
                visit(x, exact);
            }
            return;
        }
        let i = level - 1;
        let Some((lo, hi, c)) = self.range(i, x, partial) else { return };
        if i == 0 {
            let s: i64 = (1..self.n).map(|j| self.gram[(0, j)] * x[j]).sum();
            let g00 = self.gram[(0, 0)];
            for v in lo..=hi {
                let e = exact + v * (g00 * v + 2 * s);
                if e > 0 && e <= self.max_norm {
                    x[0] = v;
                    visit(x, e);
                }
            }
            x[0] = 0;
            return;
        }
        for v in lo..=hi {
            let t = v as f64 + c;
            let e = exact + self.exact_step(i, x, v);
            x[i] = v;
            self.search(i, x, partial + self.q[i] * t * t, e, visit);
        }
        x[i] = 0;
    }
}

/// Folds over all vectors with 0 < (v,v) <= max_norm. Each task owns one
/// subtree and starts from `init()`; task results are merged in a fixed order
/// so the output never depends on scheduling.
pub fn fold_short_vectors<T, I, F, M>(
    l: &Lattice,
    max_norm: i64,
    mode: ExecMode,
    init: I,
    visit: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[i64], i64) + Sync + Send,
    M: Fn(T, T) -> T,
{
    let s = Searcher::new(l, max_norm)?;
    if max_norm <= 0 {
        return Ok(init());
    }
    let depth = SPLIT_DEPTH.min(s.n);
    let tasks = s.prefixes(depth);
    let level = s.n - depth;
    let parts = map_slice(mode, &tasks, |(prefix, partial, exact)| {
        let mut acc = init();
        let mut x = prefix.clone();
        s.search(level, &mut x, *partial, *exact, &mut |v: &[i64], e| visit(&mut acc, v, e));
        acc
    });
    Ok(parts.into_iter().fold(init(), merge))
}

/// Exact counts of vectors per norm for 0 < norm <= max_norm; the zero vector
/// is reported as norm 0 with count 1.
pub fn count_by_norm(l: &Lattice, max_norm: i64, mode: ExecMode) -> Result<BTreeMap<i64, u64>> {
    let len = max_norm.max(0) as usize + 1;
    let counts = fold_short_vectors(
        l,
        max_norm,
        mode,
        || vec![0u64; len],
        |acc, _, e| acc[e as usize] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    let mut out = BTreeMap::new();
    out.insert(0, 1);
    for (n, c) in counts.into_iter().enumerate().skip(1) {
        if c > 0 {
            out.insert(n as i64, c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct NormShell {
    pub count: u64,
    /// Lexicographically sorted.
    pub vectors: Vec<LatticeVector>,
}

/// All vectors with 0 < (v,v) <= max_norm, grouped by norm.
pub fn enumerate_by_norm(l: &Lattice, max_norm: i64) -> Result<BTreeMap<i64, NormShell>> {
    enumerate_by_norm_with(l, max_norm, ExecMode::default())
}

pub fn enumerate_by_norm_with(l: &Lattice, max_norm: i64, mode: ExecMode) -> Result<BTreeMap<i64, NormShell>> {
    let raw: BTreeMap<i64, Vec<Vec<i64>>> = fold_short_vectors(
        l,
        max_norm,
        mode,
        BTreeMap::new,
        |acc: &mut BTreeMap<i64, Vec<Vec<i64>>>, v, e| acc.entry(e).or_default().push(v.to_vec()),
        |mut a, b| {
            for (k, mut v) in b {
                a.entry(k).or_default().append(&mut v);
            }
            a
        },
    )?;
    Ok(raw
        .into_iter()
        .map(|(k, mut vs)| {
            vs.sort_unstable();
            let vectors = vs.into_iter().map(|c| LatticeVector::new(l, c).expect("rank")).collect::<Vec<_>>();
            (k, NormShell { count: vectors.len() as u64, vectors })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, LatticeLabel};

    #[test]
    fn z2_small_counts() {
        let l = Lattice::new(IMat::identity(2), None).unwrap();
        let c = count_by_norm(&l, 5, ExecMode::Sequential).unwrap();
        assert_eq!(c.get(&1), Some(&4));
        assert_eq!(c.get(&2), Some(&4));
        assert_eq!(c.get(&3), None);
        assert_eq!(c.get(&4), Some(&4));
        assert_eq!(c.get(&5), Some(&8));
    }

    #[test]
    fn a2_hexagonal_counts() {
        let l = Lattice::new(IMat::from_rows(&[vec![2, -1], vec![-1, 2]]), None).unwrap();
        let c = count_by_norm(&l, 8, ExecMode::Sequential).unwrap();
        assert_eq!(c[&2], 6);
        assert_eq!(c[&6], 6);
        assert_eq!(c[&8], 6);
    }

    #[test]
    fn e8_roots() {
        let e8 = build_lattice(LatticeLabel::E8);
        let shells = enumerate_by_norm(&e8, 2).unwrap();
        assert_eq!(shells[&2].count, 240);
        assert!(shells[&2].vectors.windows(2).all(|w| w[0].coords() < w[1].coords()));
    }

    #[test]
    fn indefinite_rejected() {
        let h = build_lattice(LatticeLabel::Hyperbolic);
        assert!(matches!(enumerate_by_norm(&h, 2), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let l = build_lattice(LatticeLabel::Gamma16);
        let a = count_by_norm(&l, 4, ExecMode::Sequential).unwrap();
        let b = count_by_norm(&l, 4, ExecMode::Parallel).unwrap();
        assert_eq!(a, b);
        let va = enumerate_by_norm_with(&l, 2, ExecMode::Sequential).unwrap();
        let vb = enumerate_by_norm_with(&l, 2, ExecMode::Parallel).unwrap();
        assert_eq!(va[&2].vectors, vb[&2].vectors);
    }
}
