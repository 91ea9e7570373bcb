//! The parabolic group of isometries g(m, Q, R, f) fixing the isotropic plane
//! spanned by A, B, and its image in the automorphisms of H x Lambda_C.
//!
//! g acts on a triple (x, y, z) by
//!   x' = m x
//!   y' = R x + m~ y + Q f z
//!   z' = Q^t m x + f z
//! where m~ = (m^T)^{-1}, Q: Lambda -> Z^2 is a 2x16 matrix acting on
//! coordinates and Q^t = G^{-1} Q^T is its adjoint for Lambda's form G.

use num_complex::Complex64 as C64;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::ComplexTriplet;
use crate::error::{Error, Result};
use crate::lattice::{reflection_matrix, simple_roots, LambdaKind};
use crate::linalg::IMat;

pub type M2 = [[i64; 2]; 2];

pub const I2: M2 = [[1, 0], [0, 1]];
pub const Z2: M2 = [[0, 0], [0, 0]];

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut o = Z2;
    for i in 0..2 {
        for j in 0..2 {
            o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    o
}

pub fn m2_add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn m2_t(a: &M2) -> M2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn m2_det(a: &M2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn m2_neg(a: &M2) -> M2 {
    [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]]
}

/// Inverse of a determinant-one matrix.
pub fn m2_inv(a: &M2) -> M2 {
    debug_assert_eq!(m2_det(a), 1);
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

/// (m^T)^{-1} for determinant one.
pub fn m2_tilde(a: &M2) -> M2 {
    m2_t(&m2_inv(a))
}

fn m2_vec_c(a: &M2, v: [C64; 2]) -> [C64; 2] {
    [v[0] * a[0][0] as f64 + v[1] * a[0][1] as f64, v[0] * a[1][0] as f64 + v[1] * a[1][1] as f64]
}

fn m2_from(m: &IMat) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn m2_to(m: &M2) -> IMat {
    IMat::from_rows(&[m[0].to_vec(), m[1].to_vec()])
}

fn imat_vec_c(m: &IMat, v: &[C64]) -> Vec<C64> {
    (0..m.rows())
        .map(|i| {
            m.row(i).iter().zip(v).filter(|(a, _)| **a != 0).map(|(a, b)| b * *a as f64).sum()
        })
        .collect()
}

/// Flags for the distinguished subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub in_unz: bool,
    pub in_s: bool,
    pub in_w: bool,
    pub in_t: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicElement {
    #[serde(default)]
    pub lambda: LambdaKind,
    pub m: M2,
    #[serde(rename = "Q")]
    pub q: IMat,
    #[serde(rename = "R")]
    pub r: M2,
    pub f: IMat,
}

impl ParabolicElement {
    /// Builds and validates an element.
    pub fn new(lambda: LambdaKind, m: M2, q: IMat, r: M2, f: IMat) -> Result<Self> {
        let g = ParabolicElement { lambda, m, q, r, f };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidElement(s.to_string()));
        if self.q.rows() != 2 || self.q.cols() != 16 {
            return bad("Q must be 2x16");
        }
        if self.f.rows() != 16 || self.f.cols() != 16 {
            return bad("f must be 16x16");
        }
        if m2_det(&self.m) != 1 {
            return bad("det(m) must be 1");
        }
        if !self.lambda.data().is_isometry(&self.f) {
            return bad("f is not an isometry of Lambda");
        }
        let lhs = m2_add(&m2_mul(&m2_t(&self.r), &self.m), &m2_mul(&m2_t(&self.m), &self.r));
        let rhs = m2_mul(&m2_mul(&m2_t(&self.m), &self.qqt()), &self.m);
        if lhs != rhs {
            return bad("R^T m + m^T R != m^T Q Q^t m");
        }
        Ok(())
    }

    pub fn identity(lambda: LambdaKind) -> Self {
        ParabolicElement { lambda, m: I2, q: IMat::zeros(2, 16), r: Z2, f: IMat::identity(16) }
    }

    /// g(m, 0, 0, I).
    pub fn modular(lambda: LambdaKind, m: M2) -> Result<Self> {
        Self::new(lambda, m, IMat::zeros(2, 16), Z2, IMat::identity(16))
    }

    /// g(I, 0, 0, f).
    pub fn isometry(lambda: LambdaKind, f: IMat) -> Result<Self> {
        Self::new(lambda, I2, IMat::zeros(2, 16), Z2, f)
    }

    /// g(I, 0, kT, I), which acts as exp(kN).
    pub fn unipotent(lambda: LambdaKind, k: i64) -> Self {
        ParabolicElement { lambda, m: I2, q: IMat::zeros(2, 16), r: [[0, k], [-k, 0]], f: IMat::identity(16) }
    }

    /// -1 on the whole ambient lattice.
    pub fn minus_identity(lambda: LambdaKind) -> Self {
        ParabolicElement { lambda, m: m2_neg(&I2), q: IMat::zeros(2, 16), r: Z2, f: IMat::identity(16).neg() }
    }

    /// The element g(I, Q, R, I) with Q(gamma) = (-(gamma, q2), (gamma, q1)),
    /// whose image translates z by q1 + tau q2.
    pub fn translation(lambda: LambdaKind, q1: &[i64], q2: &[i64]) -> Result<Self> {
        if q1.len() != 16 || q2.len() != 16 {
            return Err(Error::Dimension { expected: 16, got: q1.len().min(q2.len()) });
        }
        let g = lambda.data().gram();
        let r0: Vec<i64> = g.mul_vec(q2).iter().map(|x| -x).collect();
        let r1 = g.mul_vec(q1);
        let q = IMat::from_rows(&[r0, r1]);
        let r = complete_r(&qqt_of(lambda, &q))?;
        Self::new(lambda, I2, q, r, IMat::identity(16))
    }

    /// Q^t = G^{-1} Q^T, a 16x2 matrix.
    pub fn qt(&self) -> IMat {
        self.lambda.data().gram_inv.mul(&self.q.transpose())
    }

    /// Q Q^t, the Gram matrix of the two vectors Q^t e_1, Q^t e_2.
    pub fn qqt(&self) -> M2 {
        qqt_of(self.lambda, &self.q)
    }

    fn f_inv(&self) -> IMat {
        let d = self.lambda.data();
        d.gram_inv.mul(&self.f.transpose()).mul(d.gram())
    }

    fn same_lambda(&self, o: &ParabolicElement) -> Result<()> {
        if self.lambda != o.lambda {
            return Err(Error::LatticeMismatch(format!("{} vs {}", self.lambda, o.lambda)));
        }
        Ok(())
    }

    /// Group law: self * other.
    pub fn multiply(&self, other: &ParabolicElement) -> Result<ParabolicElement> {
        self.same_lambda(other)?;
        let m1t = m2_to(&m2_tilde(&self.m));
        let m = m2_mul(&self.m, &other.m);
        let q = self.q.add(&m1t.mul(&other.q).mul(&self.f_inv()));
        let cross = m2_from(&self.q.mul(&self.f).mul(&other.qt()));
        let r = m2_add(
            &m2_add(&m2_mul(&self.r, &other.m), &m2_mul(&m2_tilde(&self.m), &other.r)),
            &m2_mul(&cross, &other.m),
        );
        let f = self.f.mul(&other.f);
        let g = ParabolicElement { lambda: self.lambda, m, q, r, f };
        g.validate().map_err(|e| Error::Internal(format!("product left the group: {e}")))?;
        Ok(g)
    }

    /// g(m^{-1}, -m^T Q f, R^T, f^{-1}).
    pub fn inverse(&self) -> ParabolicElement {
        let q = m2_to(&m2_t(&self.m)).mul(&self.q).mul(&self.f).neg();
        ParabolicElement { lambda: self.lambda, m: m2_inv(&self.m), q, r: m2_t(&self.r), f: self.f_inv() }
    }

    pub fn membership(&self) -> Membership {
        let q0 = self.q.is_zero();
        let fi = self.f.is_identity();
        let mi = self.m == I2;
        let rr = m2_add(&self.r, &m2_t(&self.r));
        Membership {
            in_unz: mi && q0 && fi && rr == Z2,
            in_s: q0 && self.r == Z2 && fi,
            in_w: mi && q0 && self.r == Z2,
            in_t: mi && fi && rr == self.qqt(),
        }
    }

    /// g = t * w * s with t in T, w in W, s in S.
    pub fn factorize(&self) -> (ParabolicElement, ParabolicElement, ParabolicElement) {
        let t = ParabolicElement {
            lambda: self.lambda,
            m: I2,
            q: self.q.clone(),
            r: m2_mul(&self.r, &m2_inv(&self.m)),
            f: IMat::identity(16),
        };
        let w = ParabolicElement { lambda: self.lambda, m: I2, q: IMat::zeros(2, 16), r: Z2, f: self.f.clone() };
        let s = ParabolicElement { lambda: self.lambda, m: self.m, q: IMat::zeros(2, 16), r: Z2, f: IMat::identity(16) };
        (t, w, s)
    }

    /// The 20x20 integer matrix acting on flattened (x, y, z) coordinates.
    pub fn to_matrix(&self) -> IMat {
        let mut out = IMat::zeros(20, 20);
        let mt = m2_tilde(&self.m);
        let qf = self.q.mul(&self.f);
        let qtm = self.qt().mul(&m2_to(&self.m));
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = self.m[i][j];
                out[(2 + i, j)] = self.r[i][j];
                out[(2 + i, 2 + j)] = mt[i][j];
            }
            for j in 0..16 {
                out[(2 + i, 4 + j)] = qf[(i, j)];
            }
        }
        for i in 0..16 {
            for j in 0..2 {
                out[(4 + i, j)] = qtm[(i, j)];
            }
            for j in 0..16 {
                out[(4 + i, 4 + j)] = self.f[(i, j)];
            }
        }
        out
    }

    pub fn act(&self, w: &ComplexTriplet) -> Result<ComplexTriplet> {
        act_on_period(self, w)
    }

    pub fn alpha(&self) -> PiElement {
        alpha(self)
    }
}

fn qqt_of(lambda: LambdaKind, q: &IMat) -> M2 {
    m2_from(&q.mul(&lambda.data().gram_inv).mul(&q.transpose()))
}

/// An integral R with R + R^T = S for symmetric S with even diagonal:
/// symmetric when the off-diagonal entry is even, upper triangular otherwise.
pub fn complete_r(s: &M2) -> Result<M2> {
    if s[0][1] != s[1][0] || s[0][0] % 2 != 0 || s[1][1] % 2 != 0 {
        return Err(Error::InvalidElement("R + R^T = QQ^t has no integral solution".into()));
    }
    let off = s[0][1];
    let (r12, r21) = if off % 2 == 0 { (off / 2, off / 2) } else { (off, 0) };
    Ok([[s[0][0] / 2, r12], [r21, s[1][1] / 2]])
}

/// Linear action on the complexified ambient space.
pub fn act_on_period(g: &ParabolicElement, w: &ComplexTriplet) -> Result<ComplexTriplet> {
    if g.lambda != w.lambda {
        return Err(Error::LatticeMismatch(format!("{} vs {}", g.lambda, w.lambda)));
    }
    let ma = m2_vec_c(&g.m, w.a);
    let fc = imat_vec_c(&g.f, &w.c);
    let ra = m2_vec_c(&g.r, w.a);
    let mb = m2_vec_c(&m2_tilde(&g.m), w.b);
    let qfc = imat_vec_c(&g.q, &fc);
    let qt_ma = imat_vec_c(&g.qt(), &ma);
    Ok(ComplexTriplet {
        lambda: g.lambda,
        a: ma,
        b: [ra[0] + mb[0] + qfc[0], ra[1] + mb[1] + qfc[1]],
        c: qt_ma.iter().zip(&fc).map(|(p, q)| p + q).collect(),
    })
}

pub fn multiply(g1: &ParabolicElement, g2: &ParabolicElement) -> Result<ParabolicElement> {
    g1.multiply(g2)
}

pub fn inverse(g: &ParabolicElement) -> ParabolicElement {
    g.inverse()
}

pub fn subgroup_membership(g: &ParabolicElement) -> Membership {
    g.membership()
}

pub fn factorize(g: &ParabolicElement) -> (ParabolicElement, ParabolicElement, ParabolicElement) {
    g.factorize()
}

/// Automorphism of H x Lambda_C in the normal form
///   (tau, z) -> (M tau, f z / (c tau + d) + q1 + (M tau) q2),
/// i.e. the isometry, then the modular substitution, then the translation at
/// the new tau. (M, f) and (-M, -f) act identically; the stored sign makes
/// the first nonzero entry of M's bottom row positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiElement {
    #[serde(default)]
    pub lambda: LambdaKind,
    #[serde(rename = "mod")]
    pub modular: M2,
    pub q1: Vec<i64>,
    pub q2: Vec<i64>,
    pub f: IMat,
}

impl PiElement {
    pub fn new(lambda: LambdaKind, modular: M2, q1: Vec<i64>, q2: Vec<i64>, f: IMat) -> Result<Self> {
        if m2_det(&modular) != 1 {
            return Err(Error::InvalidElement("det(mod) must be 1".into()));
        }
        if q1.len() != 16 || q2.len() != 16 {
            return Err(Error::Dimension { expected: 16, got: q1.len().min(q2.len()) });
        }
        if !lambda.data().is_isometry(&f) {
            return Err(Error::InvalidElement("f is not an isometry of Lambda".into()));
        }
        Ok(PiElement { lambda, modular, q1, q2, f }.normalized())
    }

    pub fn identity(lambda: LambdaKind) -> Self {
        PiElement { lambda, modular: I2, q1: vec![0; 16], q2: vec![0; 16], f: IMat::identity(16) }
    }

    pub fn translation(lambda: LambdaKind, q1: Vec<i64>, q2: Vec<i64>) -> Result<Self> {
        Self::new(lambda, I2, q1, q2, IMat::identity(16))
    }

    pub fn modular_only(lambda: LambdaKind, m: M2) -> Result<Self> {
        Self::new(lambda, m, vec![0; 16], vec![0; 16], IMat::identity(16))
    }

    pub fn isometry(lambda: LambdaKind, f: IMat) -> Result<Self> {
        Self::new(lambda, I2, vec![0; 16], vec![0; 16], f)
    }

    fn normalized(mut self) -> Self {
        let [c, d] = self.modular[1];
        if c < 0 || (c == 0 && d < 0) {
            self.modular = m2_neg(&self.modular);
            self.f = self.f.neg();
        }
        self
    }

    pub fn is_identity(&self) -> bool {
        *self == PiElement::identity(self.lambda)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &PiElement) -> Result<PiElement> {
        if self.lambda != other.lambda {
            return Err(Error::LatticeMismatch(format!("{} vs {}", self.lambda, other.lambda)));
        }
        let [[a, b], [c, d]] = self.modular;
        let fa = self.f.mul_vec(&other.q1);
        let fb = self.f.mul_vec(&other.q2);
        let q1 = (0..16).map(|i| self.q1[i] + a * fa[i] - b * fb[i]).collect();
        let q2 = (0..16).map(|i| self.q2[i] - c * fa[i] + d * fb[i]).collect();
        Ok(PiElement {
            lambda: self.lambda,
            modular: m2_mul(&self.modular, &other.modular),
            q1,
            q2,
            f: self.f.mul(&other.f),
        }
        .normalized())
    }

    pub fn act(&self, tau: C64, z: &[C64]) -> Result<(C64, Vec<C64>)> {
        pi_act(self, tau, z)
    }
}

/// The induced automorphism of H x Lambda_C.
pub fn alpha(g: &ParabolicElement) -> PiElement {
    let [[a, b], [c, d]] = g.m;
    let qt = g.qt();
    let u1: Vec<i64> = (0..16).map(|i| qt[(i, 0)]).collect();
    let u2: Vec<i64> = (0..16).map(|i| qt[(i, 1)]).collect();
    PiElement {
        lambda: g.lambda,
        modular: [[a, -b], [-c, d]],
        q1: u2,
        q2: u1.iter().map(|x| -x).collect(),
        f: g.f.clone(),
    }
    .normalized()
}

pub fn check_upper_half_plane(tau: C64) -> Result<()> {
    if tau.im > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tau = {tau} is not in the upper half plane")))
    }
}

pub fn mobius(m: &M2, tau: C64) -> (C64, C64) {
    let [[a, b], [c, d]] = *m;
    let j = tau * c as f64 + d as f64;
    ((tau * a as f64 + b as f64) / j, j)
}

pub fn pi_act(p: &PiElement, tau: C64, z: &[C64]) -> Result<(C64, Vec<C64>)> {
    check_upper_half_plane(tau)?;
    if z.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: z.len() });
    }
    let (tau2, j) = mobius(&p.modular, tau);
    let fz = imat_vec_c(&p.f, z);
    let z2 = (0..16).map(|i| fz[i] / j + p.q1[i] as f64 + tau2 * p.q2[i] as f64).collect();
    Ok((tau2, z2))
}

/// Generating set: S and T of SL2(Z), reflections in the simple roots, the
/// factor swap for E8+E8, unit translations, exp(N) and -1.
pub fn generators(lambda: LambdaKind) -> Vec<ParabolicElement> {
    let mut out = vec![
        ParabolicElement::modular(lambda, [[0, -1], [1, 0]]).unwrap(),
        ParabolicElement::modular(lambda, [[1, 1], [0, 1]]).unwrap(),
    ];
    let d = lambda.data();
    for r in simple_roots(lambda).roots {
        let f = reflection_matrix(&d.lattice, r.coords()).unwrap();
        out.push(ParabolicElement::isometry(lambda, f).unwrap());
    }
    if lambda == LambdaKind::E8E8 {
        out.push(ParabolicElement::isometry(lambda, swap_e8_factors()).unwrap());
    }
    for i in 0..16 {
        let mut e = vec![0; 16];
        e[i] = 1;
        out.push(ParabolicElement::translation(lambda, &e, &[0; 16]).unwrap());
        out.push(ParabolicElement::translation(lambda, &[0; 16], &e).unwrap());
    }
    out.push(ParabolicElement::unipotent(lambda, 1));
    out.push(ParabolicElement::minus_identity(lambda));
    out
}

/// Exchange of the two E8 summands.
pub fn swap_e8_factors() -> IMat {
    IMat::from_fn(16, 16, |i, j| ((i + 8) % 16 == j) as i64)
}

/// A random SL2(Z) matrix as a short word in S and T^k.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, len: usize) -> M2 {
    let mut m = I2;
    for _ in 0..len {
        let k = rng.gen_range(-3..=3);
        m = m2_mul(&m, &[[1, k], [0, 1]]);
        if rng.gen_bool(0.7) {
            m = m2_mul(&m, &[[0, -1], [1, 0]]);
        }
    }
    m
}

/// A random isometry of Lambda as a short word in simple reflections, with
/// random sign and (for E8+E8) random factor swap.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, lambda: LambdaKind, len: usize) -> IMat {
    let d = lambda.data();
    let roots = simple_roots(lambda).roots;
    let mut f = IMat::identity(16);
    for _ in 0..len {
        let r = &roots[rng.gen_range(0..roots.len())];
        f = f.mul(&reflection_matrix(&d.lattice, r.coords()).unwrap());
    }
    if lambda == LambdaKind::E8E8 && rng.gen_bool(0.5) {
        f = f.mul(&swap_e8_factors());
    }
    if rng.gen_bool(0.3) {
        f = f.neg();
    }
    f
}

pub fn random_lattice_vector<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Vec<i64> {
    (0..16).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// A random element t * w * s * u with small entries.
pub fn random_element<R: Rng + ?Sized>(rng: &mut R, lambda: LambdaKind) -> ParabolicElement {
    let s = ParabolicElement::modular(lambda, random_sl2(rng, 2)).unwrap();
    let w = ParabolicElement::isometry(lambda, random_isometry(rng, lambda, 3)).unwrap();
    let t = ParabolicElement::translation(lambda, &random_lattice_vector(rng, 1), &random_lattice_vector(rng, 1))
        .unwrap();
    let u = ParabolicElement::unipotent(lambda, rng.gen_range(-2..=2));
    t.multiply(&w).unwrap().multiply(&s).unwrap().multiply(&u).unwrap()
}

/// Complex zero vector of Lambda_C.
pub fn zero_z() -> Vec<C64> {
    vec![C64::zero(); 16]
}
