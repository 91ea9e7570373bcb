//! The two rank-16 even unimodular lattices with their orthonormal frames.
//!
//! Both lattices sit inside Q^16 with the standard dot product: E8+E8 as two
//! copies of the even coordinate system for E8, and Gamma16 as D16 plus the
//! half-sum vector. `frame2` holds twice the frame coordinates of each basis
//! vector (one column per basis vector) so that everything stays integral.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Lattice, LatticeLabel};
use crate::error::{Error, Result};
use crate::linalg::{rational, IMat, RMat};

/// Choice of the rank-16 lattice inside the ambient lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum LambdaKind {
    #[default]
    #[serde(rename = "e8e8")]
    E8E8,
    #[serde(rename = "gamma16")]
    Gamma16,
}

impl LambdaKind {
    pub const ALL: [LambdaKind; 2] = [LambdaKind::E8E8, LambdaKind::Gamma16];

    pub fn label(self) -> LatticeLabel {
        match self {
            LambdaKind::E8E8 => LatticeLabel::E8E8,
            LambdaKind::Gamma16 => LatticeLabel::Gamma16,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.label().as_str()
    }

    pub fn data(self) -> &'static LambdaData {
        static E8E8: OnceLock<LambdaData> = OnceLock::new();
        static G16: OnceLock<LambdaData> = OnceLock::new();
        match self {
            LambdaKind::E8E8 => E8E8.get_or_init(|| LambdaData::build(self)),
            LambdaKind::Gamma16 => G16.get_or_init(|| LambdaData::build(self)),
        }
    }
}

impl fmt::Display for LambdaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LambdaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e8e8" => Ok(LambdaKind::E8E8),
            "gamma16" => Ok(LambdaKind::Gamma16),
            other => Err(Error::UnknownLattice(other.to_string())),
        }
    }
}

/// Doubled frame coordinates of the E8 basis, ordered to match `e8_gram`.
pub(crate) fn e8_frame2() -> IMat {
    let h = |signs: [i64; 8]| signs.to_vec();
    let e = |i: usize, j: usize, si: i64, sj: i64| {
        let mut v = vec![0; 8];
        v[i] = 2 * si;
        v[j] = 2 * sj;
        v
    };
    // chain: half-spin vector, e2-e1, e3-e2, ..., e7-e6; branch: e1+e2
    let cols = vec![
        h([1, -1, -1, -1, -1, -1, -1, 1]),
        e(0, 1, -1, 1),
        e(1, 2, -1, 1),
        e(2, 3, -1, 1),
        e(3, 4, -1, 1),
        e(4, 5, -1, 1),
        e(5, 6, -1, 1),
        e(0, 1, 1, 1),
    ];
    IMat::from_rows(&cols).transpose()
}

/// Doubled frame coordinates of the Gamma16 basis: the D16 simple roots
/// e2-e3, ..., e15-e16, e15+e16 followed by the half-sum vector.
pub(crate) fn gamma16_frame2() -> IMat {
    let mut cols = Vec::with_capacity(16);
    for k in 1..15 {
        let mut v = vec![0; 16];
        v[k] = 2;
        v[k + 1] = -2;
        cols.push(v);
    }
    let mut v = vec![0; 16];
    v[14] = 2;
    v[15] = 2;
    cols.push(v);
    cols.push(vec![1; 16]);
    IMat::from_rows(&cols).transpose()
}

/// Precomputed data for one choice of rank-16 lattice.
#[derive(Debug)]
pub struct LambdaData {
    pub kind: LambdaKind,
    pub lattice: Lattice,
    pub gram_inv: IMat,
    /// Twice the frame coordinates; column j is basis vector j.
    pub frame2: IMat,
    pub frame: Vec<Vec<f64>>,
    /// Frame coordinates to basis coordinates.
    pub frame_inv: RMat,
    pub gram_f64: Vec<Vec<f64>>,
}

impl LambdaData {
    fn build(kind: LambdaKind) -> Self {
        let frame2 = match kind {
            LambdaKind::E8E8 => {
                let f = e8_frame2();
                IMat::block_diag(&[&f, &f])
            }
            LambdaKind::Gamma16 => gamma16_frame2(),
        };
        let g4 = frame2.transpose().mul(&frame2);
        let gram = IMat::from_fn(16, 16, |i, j| {
            debug_assert_eq!(g4[(i, j)] % 4, 0);
            g4[(i, j)] / 4
        });
        let gram_inv = gram.inverse().expect("unimodular");
        let half = rational(1, 2);
        let frame_r = RMat::from_fn(16, 16, |i, j| BigRational::from_integer(frame2[(i, j)].into()) * &half);
        let frame_inv = frame_r.inverse().expect("frame is invertible");
        let frame = (0..16).map(|i| (0..16).map(|j| frame2[(i, j)] as f64 / 2.0).collect()).collect();
        let gram_f64 = (0..16).map(|i| (0..16).map(|j| gram[(i, j)] as f64).collect()).collect();
        let lattice = Lattice::new(gram, Some(kind.label())).expect("symmetric");
        LambdaData { kind, lattice, gram_inv, frame2, frame, frame_inv, gram_f64 }
    }

    pub fn gram(&self) -> &IMat {
        self.lattice.gram()
    }

    /// Exact frame coordinates of a lattice vector.
    pub fn frame_coords(&self, v: &[i64]) -> Vec<BigRational> {
        self.frame2.mul_vec(v).into_iter().map(|x| rational(x, 2)).collect()
    }

    /// Lattice coordinates of a vector given in frame coordinates, if it lies
    /// in the lattice.
    pub fn from_frame_coords(&self, eps: &[BigRational]) -> Option<Vec<i64>> {
        let c = self.frame_inv.mul_vec(eps);
        c.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
    }

    /// Frame coordinates of a complex vector given in basis coordinates.
    pub fn to_frame_complex(&self, z: &[C64]) -> Vec<C64> {
        self.frame.iter().map(|row| row.iter().zip(z).map(|(a, b)| b * *a).sum()).collect()
    }

    /// Bilinear pairing of complex basis-coordinate vectors.
    pub fn pair_c(&self, u: &[C64], v: &[C64]) -> C64 {
        let mut s = C64::zero();
        for (i, ui) in u.iter().enumerate() {
            let row = &self.gram_f64[i];
            let mut t = C64::zero();
            for (g, vj) in row.iter().zip(v) {
                if *g != 0.0 {
                    t += vj * *g;
                }
            }
            s += ui * t;
        }
        s
    }

    /// Pairing of an integral vector against a complex vector.
    pub fn pair_int_c(&self, gamma: &[i64], z: &[C64]) -> C64 {
        let gz = self.gram().mul_vec(gamma);
        gz.iter().zip(z).map(|(a, b)| b * (*a as f64)).sum()
    }

    pub fn pair_int(&self, u: &[i64], v: &[i64]) -> i64 {
        self.lattice.form(u, v)
    }

    /// Matrix of an isometry in basis coordinates from a matrix acting on
    /// frame coordinates, if integral.
    pub fn isometry_from_frame(&self, m: &RMat) -> Option<IMat> {
        let half = rational(1, 2);
        let frame_r = RMat::from_fn(16, 16, |i, j| BigRational::from_integer(self.frame2[(i, j)].into()) * &half);
        self.frame_inv.mul(m).mul(&frame_r).to_integer()
    }

    pub fn is_isometry(&self, f: &IMat) -> bool {
        f.rows() == 16 && f.cols() == 16 && f.transpose().mul(self.gram()).mul(f) == *self.gram()
    }

    /// The simple roots listed in blowdown coordinates.
    pub fn blowdown_roots(&self) -> Vec<BlowdownClass> {
        match self.kind {
            LambdaKind::E8E8 => {
                let mut out = Vec::new();
                for side in 0..2 {
                    let off = 9 * side;
                    for i in 1..=7 {
                        out.push(BlowdownClass::e(self.kind, off + i).sub(&BlowdownClass::e(self.kind, off + i + 1)));
                    }
                    let h = BlowdownClass::h(self.kind, side + 1);
                    out.push(
                        h.sub(&BlowdownClass::e(self.kind, off + 1))
                            .sub(&BlowdownClass::e(self.kind, off + 2))
                            .sub(&BlowdownClass::e(self.kind, off + 3)),
                    );
                }
                out
            }
            LambdaKind::Gamma16 => {
                let k = self.kind;
                let mut out = vec![BlowdownClass::h(k, 1)
                    .sub(&BlowdownClass::e(k, 1))
                    .sub(&BlowdownClass::e(k, 2))
                    .sub(&BlowdownClass::e(k, 3))];
                for l in 2..=15 {
                    out.push(BlowdownClass::e(k, l + 1).sub(&BlowdownClass::e(k, l + 2)));
                }
                out.push(
                    BlowdownClass::h(k, 2)
                        .sub(&BlowdownClass::e(k, 18))
                        .add(&BlowdownClass::e(k, 16))
                        .add(&BlowdownClass::e(k, 17)),
                );
                out
            }
        }
    }

    /// Re-expresses a blowdown class in lattice coordinates (positive-definite
    /// sign convention).
    pub fn blowdown_to_lattice(&self, x: &BlowdownClass) -> Result<Vec<i64>> {
        let bad = || Error::Domain("class is not in the lattice".into());
        match self.kind {
            LambdaKind::E8E8 => {
                let basis = self.blowdown_roots();
                let rhs: Vec<i64> = basis.iter().map(|b| -x.pair(b)).collect();
                let c = self.gram_inv.mul_vec(&rhs);
                let mut back = BlowdownClass::zero(self.kind);
                for (ci, b) in c.iter().zip(&basis) {
                    back = back.add(&b.scale(*ci));
                }
                if back != *x {
                    return Err(bad());
                }
                Ok(c)
            }
            LambdaKind::Gamma16 => {
                let eps: Vec<BigRational> =
                    (1..=16).map(|l| rational(-x.pair(&BlowdownClass::eps2(l)), 2)).collect();
                self.from_frame_coords(&eps).ok_or_else(bad)
            }
        }
    }
}

/// An integral class in the span of hyperplane and exceptional classes, with
/// the diagonal form (+1 on hyperplane classes, -1 on exceptional ones).
///
/// E8+E8 layout: H1, E1..E9, H2, E10..E18. Gamma16 layout: H1, E1..E17, H2, E18.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowdownClass {
    pub kind: LambdaKind,
    pub coeffs: Vec<i64>,
}

impl BlowdownClass {
    pub fn zero(kind: LambdaKind) -> Self {
        BlowdownClass { kind, coeffs: vec![0; 20] }
    }

    fn h_index(kind: LambdaKind, i: usize) -> usize {
        match (kind, i) {
            (_, 1) => 0,
            (LambdaKind::E8E8, 2) => 10,
            (LambdaKind::Gamma16, 2) => 18,
            _ => panic!("no hyperplane class H{i}"),
        }
    }

    fn e_index(kind: LambdaKind, k: usize) -> usize {
        assert!((1..=18).contains(&k), "no exceptional class E{k}");
        match kind {
            LambdaKind::E8E8 if k <= 9 => k,
            LambdaKind::E8E8 => k + 1,
            LambdaKind::Gamma16 if k <= 17 => k,
            LambdaKind::Gamma16 => 19,
        }
    }

    pub fn h(kind: LambdaKind, i: usize) -> Self {
        let mut c = Self::zero(kind);
        c.coeffs[Self::h_index(kind, i)] = 1;
        c
    }

    pub fn e(kind: LambdaKind, k: usize) -> Self {
        let mut c = Self::zero(kind);
        c.coeffs[Self::e_index(kind, k)] = 1;
        c
    }

    /// Twice the class epsilon_l of the orthonormal frame (Gamma16 layout).
    pub fn eps2(l: usize) -> Self {
        let k = LambdaKind::Gamma16;
        let base = Self::h(k, 2).sub(&Self::e(k, 18));
        if l == 1 {
            base.add(&Self::h(k, 1).scale(2)).sub(&Self::e(k, 1).scale(2)).sub(&Self::e(k, 2).scale(2))
        } else {
            base.add(&Self::e(k, l + 1).scale(2))
        }
    }

    fn sign(&self, idx: usize) -> i64 {
        let hs = [Self::h_index(self.kind, 1), Self::h_index(self.kind, 2)];
        if hs.contains(&idx) {
            1
        } else {
            -1
        }
    }

    pub fn pair(&self, other: &BlowdownClass) -> i64 {
        (0..20).map(|i| self.sign(i) * self.coeffs[i] * other.coeffs[i]).sum()
    }

    pub fn add(&self, o: &BlowdownClass) -> Self {
        BlowdownClass { kind: self.kind, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &BlowdownClass) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        BlowdownClass { kind: self.kind, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }
}
