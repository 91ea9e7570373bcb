//! Integral lattices given by Gram matrices, the rank-16 lattices used for
//! the ambient space, root systems and Weyl group actions.

mod enumerate;
mod lambda;
mod roots;
mod weyl;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inertia, IMat};

pub use enumerate::{count_by_norm, enumerate_by_norm, enumerate_by_norm_with, fold_short_vectors, NormShell};
pub use lambda::{BlowdownClass, LambdaData, LambdaKind};
pub use roots::{dynkin_edges, reflection_matrix, simple_roots, simply_laced_cartan, weyl_reflect, RootSystemBasis};
pub use weyl::{apply_signed_permutation, SignedPermutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeLabel {
    #[serde(rename = "e8")]
    E8,
    #[serde(rename = "e8e8")]
    E8E8,
    #[serde(rename = "gamma16")]
    Gamma16,
    #[serde(rename = "hyperbolic")]
    Hyperbolic,
    #[serde(rename = "lo_e8e8")]
    LoE8E8,
    #[serde(rename = "lo_gamma16")]
    LoGamma16,
}

impl LatticeLabel {
    pub const ALL: [LatticeLabel; 6] = [
        LatticeLabel::E8,
        LatticeLabel::E8E8,
        LatticeLabel::Gamma16,
        LatticeLabel::Hyperbolic,
        LatticeLabel::LoE8E8,
        LatticeLabel::LoGamma16,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeLabel::E8 => "e8",
            LatticeLabel::E8E8 => "e8e8",
            LatticeLabel::Gamma16 => "gamma16",
            LatticeLabel::Hyperbolic => "hyperbolic",
            LatticeLabel::LoE8E8 => "lo_e8e8",
            LatticeLabel::LoGamma16 => "lo_gamma16",
        }
    }
}

impl fmt::Display for LatticeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LatticeLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownLattice(s.to_string()))
    }
}

#[derive(Debug, PartialEq, Eq)]
struct LatticeInner {
    label: Option<LatticeLabel>,
    gram: IMat,
}

/// An integral lattice, cheap to clone.
#[derive(Clone, Debug)]
pub struct Lattice {
    inner: Arc<LatticeInner>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.gram == other.inner.gram
    }
}

impl Eq for Lattice {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub even: bool,
    pub unimodular: bool,
    /// (positive, negative) inertia indices.
    pub signature: (usize, usize),
}

impl Lattice {
    pub fn new(gram: IMat, label: Option<LatticeLabel>) -> Result<Self> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::Domain("Gram matrix must be square and nonempty".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::Domain("Gram matrix must be symmetric".into()));
        }
        Ok(Lattice { inner: Arc::new(LatticeInner { label, gram }) })
    }

    pub fn rank(&self) -> usize {
        self.inner.gram.rows()
    }

    pub fn gram(&self) -> &IMat {
        &self.inner.gram
    }

    pub fn label(&self) -> Option<LatticeLabel> {
        self.inner.label
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram()[(i, i)] % 2 == 0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.gram().det().abs() == 1
    }

    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = inertia(self.gram());
        (p, n)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature() == (self.rank(), 0)
    }

    pub fn classify(&self) -> Classification {
        Classification { even: self.is_even(), unimodular: self.is_unimodular(), signature: self.signature() }
    }

    pub fn form(&self, u: &[i64], v: &[i64]) -> i64 {
        let g = self.gram();
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            let row = g.row(i);
            s += u[i] * row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>();
        }
        s
    }

    pub fn vector(&self, coords: Vec<i64>) -> Result<LatticeVector> {
        LatticeVector::new(self, coords)
    }

    pub fn basis_vector(&self, i: usize) -> LatticeVector {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        LatticeVector { coords: c, lattice: self.clone() }
    }

    pub fn zero(&self) -> LatticeVector {
        LatticeVector { coords: vec![0; self.rank()], lattice: self.clone() }
    }
}

pub fn classify(l: &Lattice) -> Classification {
    l.classify()
}

/// The E8 Cartan matrix with simple roots ordered as a chain 1..7 and the
/// eighth node attached to the third.
pub fn e8_gram() -> IMat {
    let mut g = IMat::identity(8).scale(2);
    for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)] {
        g[(a, b)] = -1;
        g[(b, a)] = -1;
    }
    g
}

/// Gram matrix of {F, S}.
pub fn hyperbolic_gram() -> IMat {
    IMat::from_rows(&[vec![0, 1], vec![1, -2]])
}

/// Gram of the hyperbolic plane in an isotropic basis.
pub fn u_gram() -> IMat {
    IMat::from_rows(&[vec![0, 1], vec![1, 0]])
}

pub fn build_lattice(label: LatticeLabel) -> Lattice {
    let gram = match label {
        LatticeLabel::E8 => e8_gram(),
        LatticeLabel::E8E8 => LambdaKind::E8E8.data().lattice.gram().clone(),
        LatticeLabel::Gamma16 => LambdaKind::Gamma16.data().lattice.gram().clone(),
        LatticeLabel::Hyperbolic => hyperbolic_gram(),
        LatticeLabel::LoE8E8 => lo_gram(LambdaKind::E8E8),
        LatticeLabel::LoGamma16 => lo_gram(LambdaKind::Gamma16),
    };
    Lattice::new(gram, Some(label)).expect("built-in Gram matrices are symmetric")
}

pub fn build_lattice_by_name(name: &str) -> Result<Lattice> {
    Ok(build_lattice(name.parse()?))
}

/// U + U + (-Lambda) in the ordered basis A', B', A, B, Lambda-basis.
pub fn lo_gram(kind: LambdaKind) -> IMat {
    let lam = kind.data().lattice.gram();
    let mut g = IMat::zeros(20, 20);
    g[(0, 2)] = 1;
    g[(2, 0)] = 1;
    g[(1, 3)] = 1;
    g[(3, 1)] = 1;
    for i in 0..16 {
        for j in 0..16 {
            g[(4 + i, 4 + j)] = -lam[(i, j)];
        }
    }
    g
}

/// A vector of a lattice in its defining basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeVector {
    coords: Vec<i64>,
    lattice: Lattice,
}

impl LatticeVector {
    pub fn new(lattice: &Lattice, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Dimension { expected: lattice.rank(), got: coords.len() });
        }
        Ok(LatticeVector { coords, lattice: lattice.clone() })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn norm(&self) -> i64 {
        self.lattice.form(&self.coords, &self.coords)
    }

    pub fn add(&self, other: &LatticeVector) -> Result<LatticeVector> {
        check_same(self, other)?;
        Ok(self.with_coords(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        self.with_coords(self.coords.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> LatticeVector {
        self.scale(-1)
    }

    fn with_coords(&self, coords: Vec<i64>) -> LatticeVector {
        LatticeVector { coords, lattice: self.lattice.clone() }
    }
}

fn check_same(u: &LatticeVector, v: &LatticeVector) -> Result<()> {
    if u.lattice != v.lattice {
        return Err(Error::LatticeMismatch(format!(
            "{:?} vs {:?}",
            u.lattice.label().map(|l| l.as_str()),
            v.lattice.label().map(|l| l.as_str())
        )));
    }
    Ok(())
}

pub fn inner_product(u: &LatticeVector, v: &LatticeVector) -> Result<i64> {
    check_same(u, v)?;
    Ok(u.lattice.form(&u.coords, &v.coords))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for l in LatticeLabel::ALL {
            assert_eq!(l.as_str().parse::<LatticeLabel>().unwrap(), l);
        }
        assert!(matches!("d16".parse::<LatticeLabel>(), Err(Error::UnknownLattice(_))));
    }

    #[test]
    fn e8_is_even_unimodular_definite() {
        let c = build_lattice(LatticeLabel::E8).classify();
        assert_eq!(c, Classification { even: true, unimodular: true, signature: (8, 0) });
    }

    #[test]
    fn hyperbolic_plane() {
        let h = build_lattice(LatticeLabel::Hyperbolic);
        assert_eq!(h.gram().to_rows(), vec![vec![0, 1], vec![1, -2]]);
        assert_eq!(h.classify().signature, (1, 1));
        let f = h.basis_vector(0);
        assert_eq!(inner_product(&f, &f).unwrap(), 0);
        assert_eq!(inner_product(&f, &h.basis_vector(1)).unwrap(), 1);
    }

    #[test]
    fn lo_lattices_have_signature_2_18() {
        for l in [LatticeLabel::LoE8E8, LatticeLabel::LoGamma16] {
            let c = build_lattice(l).classify();
            assert_eq!(c, Classification { even: true, unimodular: true, signature: (2, 18) });
        }
    }

    #[test]
    fn e8_adjacent_roots_pair_to_minus_one() {
        let e8 = build_lattice(LatticeLabel::E8);
        assert_eq!(inner_product(&e8.basis_vector(0), &e8.basis_vector(1)).unwrap(), -1);
        assert_eq!(inner_product(&e8.basis_vector(2), &e8.basis_vector(7)).unwrap(), -1);
        assert_eq!(inner_product(&e8.basis_vector(0), &e8.basis_vector(7)).unwrap(), 0);
    }

    #[test]
    fn mismatched_lattices_rejected() {
        let a = build_lattice(LatticeLabel::E8).basis_vector(0);
        let b = build_lattice(LatticeLabel::Hyperbolic).basis_vector(0);
        assert!(matches!(inner_product(&a, &b), Err(Error::LatticeMismatch(_))));
        assert!(build_lattice(LatticeLabel::E8).vector(vec![1, 2]).is_err());
    }

    #[test]
    fn zero_vector_pairs_to_zero() {
        let l = build_lattice(LatticeLabel::Gamma16);
        let v = l.vector((0..16).map(|i| i as i64 - 7).collect()).unwrap();
        assert_eq!(inner_product(&v, &l.zero()).unwrap(), 0);
    }
}
