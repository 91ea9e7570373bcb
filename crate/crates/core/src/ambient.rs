//! Coordinates on the rank-20 lattice U + U + (-Lambda) and its
//! complexification.
//!
//! A vector is a triple (x, y, z): x holds the coefficients of A', B', y those
//! of A, B, and z lies in Lambda. The pairing is x.y' + x'.y - (z, z') with
//! Lambda's positive-definite form.

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LambdaKind;

/// The skew map T(x1, x2) = (x2, -x1).
pub fn apply_t<T: Copy + std::ops::Neg<Output = T>>(x: [T; 2]) -> [T; 2] {
    [x[1], -x[0]]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletVector {
    #[serde(default)]
    pub lambda: LambdaKind,
    pub x: [i64; 2],
    pub y: [i64; 2],
    pub z: Vec<i64>,
}

impl TripletVector {
    pub fn new(lambda: LambdaKind, x: [i64; 2], y: [i64; 2], z: Vec<i64>) -> Result<Self> {
        if z.len() != 16 {
            return Err(Error::Dimension { expected: 16, got: z.len() });
        }
        Ok(TripletVector { lambda, x, y, z })
    }

    /// Basis vector i of the ordered basis A', B', A, B, Lambda-basis.
    pub fn basis(lambda: LambdaKind, i: usize) -> Self {
        let mut v = vec![0i64; 20];
        v[i] = 1;
        Self::from_flat(lambda, &v)
    }

    pub fn from_flat(lambda: LambdaKind, v: &[i64]) -> Self {
        assert_eq!(v.len(), 20);
        TripletVector { lambda, x: [v[0], v[1]], y: [v[2], v[3]], z: v[4..].to_vec() }
    }

    pub fn to_flat(&self) -> Vec<i64> {
        let mut v = vec![self.x[0], self.x[1], self.y[0], self.y[1]];
        v.extend_from_slice(&self.z);
        v
    }

    pub fn to_complex(&self) -> ComplexTriplet {
        ComplexTriplet {
            lambda: self.lambda,
            a: self.x.map(|t| C64::new(t as f64, 0.0)),
            b: self.y.map(|t| C64::new(t as f64, 0.0)),
            c: self.z.iter().map(|&t| C64::new(t as f64, 0.0)).collect(),
        }
    }

    pub fn apply_n(&self) -> TripletVector {
        TripletVector { lambda: self.lambda, x: [0, 0], y: apply_t(self.x), z: vec![0; 16] }
    }
}

/// Exact pairing of integral triples.
pub fn pair_int(u: &TripletVector, v: &TripletVector) -> Result<i64> {
    if u.lambda != v.lambda {
        return Err(Error::LatticeMismatch(format!("{} vs {}", u.lambda, v.lambda)));
    }
    let lam = u.lambda.data().pair_int(&u.z, &v.z);
    Ok(u.x[0] * v.y[0] + u.x[1] * v.y[1] + v.x[0] * u.y[0] + v.x[1] * u.y[1] - lam)
}

/// A vector of the complexified lattice; `a`, `b`, `c` are the x, y and z
/// parts. Serialized with keys x, y, z and complex numbers as [re, im].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexTriplet {
    #[serde(default)]
    pub lambda: LambdaKind,
    #[serde(rename = "x")]
    pub a: [C64; 2],
    #[serde(rename = "y")]
    pub b: [C64; 2],
    #[serde(rename = "z")]
    pub c: Vec<C64>,
}

impl ComplexTriplet {
    pub fn new(lambda: LambdaKind, a: [C64; 2], b: [C64; 2], c: Vec<C64>) -> Result<Self> {
        if c.len() != 16 {
            return Err(Error::Dimension { expected: 16, got: c.len() });
        }
        Ok(ComplexTriplet { lambda, a, b, c })
    }

    pub fn zero(lambda: LambdaKind) -> Self {
        ComplexTriplet { lambda, a: [C64::zero(); 2], b: [C64::zero(); 2], c: vec![C64::zero(); 16] }
    }

    pub fn conj(&self) -> Self {
        self.map(|t| t.conj())
    }

    pub fn scale(&self, k: C64) -> Self {
        self.map(|t| t * k)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexTriplet {
            lambda: self.lambda,
            a: self.a.map(&f),
            b: self.b.map(&f),
            c: self.c.iter().map(|&t| f(t)).collect(),
        }
    }

    pub fn add(&self, o: &ComplexTriplet) -> Self {
        ComplexTriplet {
            lambda: self.lambda,
            a: [self.a[0] + o.a[0], self.a[1] + o.a[1]],
            b: [self.b[0] + o.b[0], self.b[1] + o.b[1]],
            c: self.c.iter().zip(&o.c).map(|(p, q)| p + q).collect(),
        }
    }

    pub fn sub(&self, o: &ComplexTriplet) -> Self {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn components(&self) -> impl Iterator<Item = C64> + '_ {
        self.a.iter().chain(&self.b).chain(&self.c).copied()
    }

    /// Largest modulus of a coordinate.
    pub fn max_abs(&self) -> f64 {
        self.components().map(|t| t.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &ComplexTriplet) -> f64 {
        self.components().zip(o.components()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
    }

    pub fn apply_n(&self) -> Self {
        ComplexTriplet { lambda: self.lambda, a: [C64::zero(); 2], b: apply_t(self.a), c: vec![C64::zero(); 16] }
    }
}

/// Bilinear pairing x.y' + x'.y - (z, z').
pub fn pair(u: &ComplexTriplet, v: &ComplexTriplet) -> Result<C64> {
    if u.lambda != v.lambda {
        return Err(Error::LatticeMismatch(format!("{} vs {}", u.lambda, v.lambda)));
    }
    let lam = u.lambda.data().pair_c(&u.c, &v.c);
    Ok(u.a[0] * v.b[0] + u.a[1] * v.b[1] + v.a[0] * u.b[0] + v.a[1] * u.b[1] - lam)
}

/// N(x, y, z) = (0, Tx, 0).
pub fn apply_n(v: &ComplexTriplet) -> ComplexTriplet {
    v.apply_n()
}

/// exp(lambda N) v = v + lambda N v, exactly, since N^2 = 0.
pub fn exp_n(lambda: C64, v: &ComplexTriplet) -> ComplexTriplet {
    let t = apply_t(v.a);
    let mut out = v.clone();
    out.b[0] += lambda * t[0];
    out.b[1] += lambda * t[1];
    out
}

/// Gram matrix of the ordered basis A', B', A, B, Lambda-basis.
pub fn ambient_gram(lambda: LambdaKind) -> crate::linalg::IMat {
    let basis: Vec<_> = (0..20).map(|i| TripletVector::basis(lambda, i)).collect();
    crate::linalg::IMat::from_fn(20, 20, |i, j| pair_int(&basis[i], &basis[j]).expect("same lambda"))
}
