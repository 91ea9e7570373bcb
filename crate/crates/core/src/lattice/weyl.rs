//! Signed permutations with an even number of sign changes: the Weyl group
//! of D16 acting on orthonormal frame coordinates.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::IMat;

use super::LambdaKind;

/// The map e_i -> signs[i] * e_{perm[i]} (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::InvalidSignedPermutation("length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidSignedPermutation("not a permutation".into()));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSignedPermutation("signs must be +-1".into()));
        }
        if signs.iter().filter(|&&s| s == -1).count() % 2 == 1 {
            return Err(Error::InvalidSignedPermutation("odd number of sign changes".into()));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), signs: vec![1; n] }
    }

    /// Swap of e_i and e_j.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        SignedPermutation { perm, signs: vec![1; n] }
    }

    /// Negation of e_i and e_j.
    pub fn sign_pair(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut signs = vec![1; n];
        signs[i] = -1;
        signs[j] = -1;
        Self::new((0..n).collect(), signs)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        assert_eq!(self.len(), other.len());
        let perm = other.perm.iter().map(|&p| self.perm[p]).collect();
        let signs = other.perm.iter().zip(&other.signs).map(|(&p, &s)| s * self.signs[p]).collect();
        SignedPermutation { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let n = self.len();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermutation { perm, signs }
    }

    pub fn apply<T>(&self, coords: &[T]) -> Vec<T>
    where
        T: Clone + std::ops::Neg<Output = T> + Default,
    {
        assert_eq!(coords.len(), self.len());
        let mut out = vec![T::default(); self.len()];
        for i in 0..self.len() {
            let x = coords[i].clone();
            out[self.perm[i]] = if self.signs[i] < 0 { -x } else { x };
        }
        out
    }

    /// Matrix acting on frame coordinates.
    pub fn matrix(&self) -> IMat {
        let n = self.len();
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m[(self.perm[i], i)] = self.signs[i] as i64;
        }
        m
    }

    /// The corresponding isometry of Gamma16 in lattice coordinates.
    pub fn gamma16_isometry(&self) -> IMat {
        assert_eq!(self.len(), 16);
        let m = self.matrix().to_rational();
        LambdaKind::Gamma16.data().isometry_from_frame(&m).expect("D16 Weyl group preserves Gamma16")
    }
}

pub fn apply_signed_permutation(w: &SignedPermutation, coords: &[BigRational]) -> Vec<BigRational> {
    w.apply(coords)
}
