//! Point arithmetic on E_tau = C / (Z + tau Z), the extension map psi and the
//! special point configurations built from its values on simple roots.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{simple_roots, LambdaKind};
use crate::parabolic::check_upper_half_plane;

/// Default tolerance for comparing torus points.
pub const TORUS_TOL: f64 = 1e-9;

/// Fractional parts this close to 1 are snapped to 0 so that reduction is
/// idempotent.
const SNAP: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexTorusPoint {
    pub value: C64,
    pub tau: C64,
}

fn same_tau(a: C64, b: C64) -> bool {
    a == b
}

/// Coordinates (s, t) with x = s + t tau.
fn lattice_coords(x: C64, tau: C64) -> (f64, f64) {
    let t = x.im / tau.im;
    (x.re - t * tau.re, t)
}

fn frac(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f >= 1.0 - SNAP {
        0.0
    } else {
        f
    }
}

impl ComplexTorusPoint {
    pub fn new(value: C64, tau: C64) -> Result<Self> {
        check_upper_half_plane(tau)?;
        if !value.is_finite() {
            return Err(Error::Domain("torus point is not finite".into()));
        }
        Ok(ComplexTorusPoint { value, tau }.reduce())
    }

    pub fn zero(tau: C64) -> Self {
        ComplexTorusPoint { value: C64::new(0.0, 0.0), tau }
    }

    /// Representative s + t tau with s, t in [0, 1).
    pub fn reduce(&self) -> Self {
        let (s, t) = lattice_coords(self.value, self.tau);
        let (s, t) = (frac(s), frac(t));
        ComplexTorusPoint { value: C64::new(s, 0.0) + self.tau * t, tau: self.tau }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if same_tau(self.tau, o.tau) {
            Ok(())
        } else {
            Err(Error::TauMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(ComplexTorusPoint { value: self.value + o.value, tau: self.tau }.reduce())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        ComplexTorusPoint { value: -self.value, tau: self.tau }.reduce()
    }

    /// n p by repeated doubling.
    pub fn scale(&self, n: i64) -> Self {
        let mut acc = ComplexTorusPoint::zero(self.tau);
        let mut base = if n < 0 { self.neg() } else { self.reduce() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = ComplexTorusPoint { value: acc.value + base.value, tau: self.tau }.reduce();
            }
            base = ComplexTorusPoint { value: base.value * 2.0, tau: self.tau }.reduce();
            k >>= 1;
        }
        acc
    }

    /// The preimage (r + j + k tau) / n of this point under multiplication by
    /// n, r the reduced representative.
    pub fn divide(&self, n: i64, j: i64, k: i64) -> Self {
        assert!(n > 0, "divide by a positive integer");
        let r = self.reduce().value;
        ComplexTorusPoint { value: (r + j as f64 + self.tau * k as f64) / n as f64, tau: self.tau }.reduce()
    }

    /// Distance to the nearest lattice translate of `o`.
    pub fn distance(&self, o: &Self) -> Result<f64> {
        self.check(o)?;
        Ok(lattice_distance(self.value - o.value, self.tau))
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> Result<bool> {
        Ok(self.distance(o)? <= tol)
    }
}

/// Gauss-reduced basis of Z + tau Z.
fn reduced_basis(tau: C64) -> (C64, C64) {
    let (mut a, mut b) = (C64::new(1.0, 0.0), tau);
    for _ in 0..100 {
        if b.norm_sqr() < a.norm_sqr() {
            std::mem::swap(&mut a, &mut b);
        }
        let mu = ((b * a.conj()).re / a.norm_sqr()).round();
        if mu == 0.0 {
            break;
        }
        b -= a * mu;
    }
    (a, b)
}

/// Distance from x to the lattice Z + tau Z.
pub fn lattice_distance(x: C64, tau: C64) -> f64 {
    let (a, b) = reduced_basis(tau);
    // coordinates of x in the reduced basis
    let det = a.re * b.im - a.im * b.re;
    let s = (x.re * b.im - x.im * b.re) / det;
    let t = (a.re * x.im - a.im * x.re) / det;
    let (s0, t0) = (s.round(), t.round());
    let mut best = f64::INFINITY;
    for i in -1..=1 {
        for j in -1..=1 {
            let p = a * (s0 + i as f64) + b * (t0 + j as f64);
            best = best.min((x - p).norm());
        }
    }
    best
}

pub fn torus_add(p: &ComplexTorusPoint, q: &ComplexTorusPoint) -> Result<ComplexTorusPoint> {
    p.add(q)
}

pub fn torus_neg(p: &ComplexTorusPoint) -> ComplexTorusPoint {
    p.neg()
}

pub fn torus_scale(p: &ComplexTorusPoint, n: i64) -> ComplexTorusPoint {
    p.scale(n)
}

/// psi(gamma) = (gamma, z) mod Z + tau Z.
pub fn psi_of(lambda: LambdaKind, tau: C64, z: &[C64], gamma: &[i64]) -> Result<ComplexTorusPoint> {
    check_upper_half_plane(tau)?;
    if z.len() != 16 || gamma.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: z.len().min(gamma.len()) });
    }
    ComplexTorusPoint::new(lambda.data().pair_int_c(gamma, z), tau)
}

/// psi on the ordered simple roots: a1..a8, b1..b8 for E8+E8, c1..c16 for
/// Gamma16.
pub fn psi_on_simple_roots(lambda: LambdaKind, tau: C64, z: &[C64]) -> Result<Vec<ComplexTorusPoint>> {
    simple_roots(lambda).roots.iter().map(|r| psi_of(lambda, tau, z, r.coords())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    A,
    B,
}

impl std::str::FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Category::A),
            "b" => Ok(Category::B),
            _ => Err(Error::Domain(format!("unknown category `{s}` (expected a|b)"))),
        }
    }
}

/// The configuration 3p0; p1..pt; 3q0; p(t+1)..p18 on E_tau.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialFamily {
    pub category: Category,
    pub tau: C64,
    pub t: usize,
    pub p0: C64,
    pub q0: C64,
    pub points: Vec<C64>,
}

impl SpecialFamily {
    pub fn point(&self, i: usize) -> ComplexTorusPoint {
        ComplexTorusPoint { value: self.points[i - 1], tau: self.tau }
    }

    pub fn p0(&self) -> ComplexTorusPoint {
        ComplexTorusPoint { value: self.p0, tau: self.tau }
    }

    pub fn q0(&self) -> ComplexTorusPoint {
        ComplexTorusPoint { value: self.q0, tau: self.tau }
    }

    fn sum(&self, range: std::ops::RangeInclusive<usize>) -> ComplexTorusPoint {
        let v: C64 = range.map(|i| self.points[i - 1]).sum();
        ComplexTorusPoint { value: v, tau: self.tau }.reduce()
    }

    pub fn validate(&self) -> Result<()> {
        check_upper_half_plane(self.tau)?;
        if self.points.len() != 18 {
            return Err(Error::Dimension { expected: 18, got: self.points.len() });
        }
        let ok = match self.category {
            Category::A => self.t == 9,
            Category::B => (2..=17).contains(&self.t),
        };
        if !ok {
            return Err(Error::Domain(format!("split index t = {} invalid for this category", self.t)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub category: Category,
    pub conditions: Vec<Condition>,
    pub max_error: f64,
    pub pass: bool,
}

/// Tests the defining divisor-class identities as equalities in the group
/// E_tau with origin 0.
pub fn verify_special_family(fam: &SpecialFamily, tol: f64) -> Result<FamilyReport> {
    fam.validate()?;
    let mut conditions = Vec::new();
    let mut push = |name: &str, a: ComplexTorusPoint, b: ComplexTorusPoint| -> Result<()> {
        let error = a.distance(&b)?;
        conditions.push(Condition { name: name.into(), error, pass: error <= tol });
        Ok(())
    };
    let (p0, q0) = (fam.p0(), fam.q0());
    match fam.category {
        Category::A => {
            push("p9 = p18", fam.point(9), fam.point(18))?;
            push("p1 + ... + p9 = 9 p0", fam.sum(1..=9), p0.scale(9))?;
            push("p10 + ... + p18 = 9 q0", fam.sum(10..=18), q0.scale(9))?;
        }
        Category::B => {
            push("p1 = p2", fam.point(1), fam.point(2))?;
            push("p1 + ... + p18 = 9 p0 + 9 q0", fam.sum(1..=18), p0.scale(9).add(&q0.scale(9))?)?;
            let lhs = p0.scale(3).sub(&fam.point(1))?;
            let rhs = q0.scale(3).sub(&fam.point(fam.t + 1))?;
            push("3 p0 - p1 = 3 q0 - p(t+1)", lhs, rhs)?;
        }
    }
    let max_error = conditions.iter().map(|c| c.error).fold(0.0, f64::max);
    let pass = conditions.iter().all(|c| c.pass);
    Ok(FamilyReport { category: fam.category, conditions, max_error, pass })
}

/// Which preimage to take in each division: (j, k) selects (r + j + k tau)/n.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootChoice {
    pub first: (i64, i64),
    pub q0: (i64, i64),
}

fn check_psi(tau: C64, psi: &[ComplexTorusPoint]) -> Result<()> {
    check_upper_half_plane(tau)?;
    if psi.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: psi.len() });
    }
    if psi.iter().any(|p| !same_tau(p.tau, tau)) {
        return Err(Error::TauMismatch);
    }
    Ok(())
}

fn sum_points(tau: C64, terms: &[(i64, &ComplexTorusPoint)]) -> ComplexTorusPoint {
    let v: C64 = terms.iter().map(|(c, p)| p.reduce().value * *c as f64).sum();
    ComplexTorusPoint { value: v, tau }.reduce()
}

/// The category (a) configuration from psi(a1..a8) = psi[0..8] and
/// psi(b1..b8) = psi[8..16].
pub fn construct_family_a(tau: C64, psi: &[ComplexTorusPoint], choice: RootChoice) -> Result<SpecialFamily> {
    check_psi(tau, psi)?;
    let (a, b) = (&psi[..8], &psi[8..]);
    let three_x1 = sum_points(tau, &[(2, &a[0]), (1, &a[1]), (-1, &a[7])]);
    let mut x = vec![three_x1.divide(3, choice.first.0, choice.first.1)];
    for l in 2..=8 {
        x.push(x[l - 2].sub(&a[l - 2])?);
    }
    let s: Vec<(i64, &ComplexTorusPoint)> = x.iter().map(|p| (-1, p)).collect();
    let x9 = sum_points(tau, &s);
    x.push(x9);
    let y9 = x9;
    let chain: Vec<(i64, &ComplexTorusPoint)> = (0..7).map(|i| (7 - i as i64, &b[i])).collect();
    let mut terms = vec![(1, &y9)];
    terms.extend(chain);
    terms.extend([(-6, &b[0]), (-3, &b[1]), (3, &b[7])]);
    let y1 = sum_points(tau, &terms);
    let mut y = vec![y1];
    for l in 2..=8 {
        y.push(y[l - 2].add(&b[l - 2])?);
    }
    y.push(y9);
    let three_q0 = sum_points(tau, &[(2, &b[0]), (1, &b[1]), (-1, &b[7]), (3, &y1)]);
    let q0 = three_q0.divide(3, choice.q0.0, choice.q0.1);
    let points = x.iter().chain(&y).map(|p| p.value).collect();
    Ok(SpecialFamily { category: Category::A, tau, t: 9, p0: C64::new(0.0, 0.0), q0: q0.value, points })
}

/// The category (b) configuration from psi(c1..c16).
pub fn construct_family_b(tau: C64, psi: &[ComplexTorusPoint], choice: RootChoice) -> Result<SpecialFamily> {
    check_psi(tau, psi)?;
    let mut terms: Vec<(i64, &ComplexTorusPoint)> = (0..14).map(|i| (-2, &psi[i])).collect();
    terms.extend([(-1, &psi[14]), (-1, &psi[15])]);
    let p1 = sum_points(tau, &terms).divide(3, choice.first.0, choice.first.1);
    let mut p = vec![p1, p1];
    for l in 3..=17 {
        p.push(p[l - 2].sub(&psi[l - 3])?);
    }
    let mut six: Vec<(i64, &ComplexTorusPoint)> = vec![(2, &p[0])];
    six.extend(p[1..17].iter().map(|x| (1, x)));
    let q0 = sum_points(tau, &six).divide(6, choice.q0.0, choice.q0.1);
    let p18 = sum_points(tau, &[(1, &p1), (3, &q0)]);
    p.push(p18);
    let points = p.iter().map(|x| x.value).collect();
    Ok(SpecialFamily { category: Category::B, tau, t: 17, p0: C64::new(0.0, 0.0), q0: q0.value, points })
}

/// The configuration attached to (tau, z): category (a) for E8+E8 and (b)
/// for Gamma16.
pub fn family_from_moduli(lambda: LambdaKind, tau: C64, z: &[C64]) -> Result<SpecialFamily> {
    let psi = psi_on_simple_roots(lambda, tau, z)?;
    match lambda {
        LambdaKind::E8E8 => construct_family_a(tau, &psi, RootChoice::default()),
        LambdaKind::Gamma16 => construct_family_b(tau, &psi, RootChoice::default()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_point(rng: &mut ChaCha8Rng, tau: C64) -> ComplexTorusPoint {
        ComplexTorusPoint::new(c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)), tau).unwrap()
    }

    #[test]
    fn group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tau = c(0.37, 1.21);
        for _ in 0..100 {
            let p = rand_point(&mut rng, tau);
            let q = rand_point(&mut rng, tau);
            assert!(p.add(&ComplexTorusPoint::zero(tau)).unwrap().distance(&p).unwrap() < 1e-12);
            assert!(p.add(&p.neg()).unwrap().distance(&ComplexTorusPoint::zero(tau)).unwrap() < 1e-12);
            assert!(p.add(&q).unwrap().distance(&q.add(&p).unwrap()).unwrap() < 1e-12);
            let r = p.reduce();
            assert!((r.reduce().value - r.value).norm() < 1e-12);
            let (s, t) = lattice_coords(r.value, tau);
            assert!((0.0..1.0).contains(&s) && (0.0..1.0).contains(&t));
        }
    }

    #[test]
    fn scale_matches_repeated_addition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tau = c(-0.2, 0.8);
        let p = rand_point(&mut rng, tau);
        let mut acc = ComplexTorusPoint::zero(tau);
        for n in 0..=20 {
            assert!(p.scale(n).distance(&acc).unwrap() < 1e-12, "n = {n}");
            assert!(p.scale(-n).distance(&acc.neg()).unwrap() < 1e-12);
            acc = acc.add(&p).unwrap();
        }
    }

    #[test]
    fn divide_gives_all_preimages() {
        let tau = c(0.1, 1.3);
        let p = ComplexTorusPoint::new(c(0.4, 0.7), tau).unwrap();
        let mut seen: Vec<ComplexTorusPoint> = Vec::new();
        for j in 0..3 {
            for k in 0..3 {
                let x = p.divide(3, j, k);
                assert!(x.scale(3).distance(&p).unwrap() < 1e-12);
                assert!(seen.iter().all(|s| s.distance(&x).unwrap() > 0.1));
                seen.push(x);
            }
        }
    }

    #[test]
    fn tau_mismatch_rejected() {
        let a = ComplexTorusPoint::zero(c(0.0, 1.0));
        let b = ComplexTorusPoint::zero(c(0.0, 2.0));
        assert_eq!(a.add(&b), Err(Error::TauMismatch));
    }

    #[test]
    fn distance_skewed_lattice() {
        let tau = c(7.3, 0.01);
        assert!(lattice_distance(tau * 3.0 - 5.0 + c(1e-4, 0.0), tau) < 1.1e-4);
    }

    #[test]
    fn psi_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tau = c(0.3, 0.9);
        for k in LambdaKind::ALL {
            let z: Vec<C64> = (0..16).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let g1: Vec<i64> = (0..16).map(|_| rng.gen_range(-3..=3)).collect();
            let g2: Vec<i64> = (0..16).map(|_| rng.gen_range(-3..=3)).collect();
            let sum: Vec<i64> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
            let lhs = psi_of(k, tau, &z, &sum).unwrap();
            let rhs = psi_of(k, tau, &z, &g1).unwrap().add(&psi_of(k, tau, &z, &g2).unwrap()).unwrap();
            assert!(lhs.distance(&rhs).unwrap() < 1e-12);
            assert!(psi_of(k, tau, &z, &[0; 16]).unwrap().distance(&ComplexTorusPoint::zero(tau)).unwrap() == 0.0);
        }
    }

    #[test]
    fn zero_and_random_families_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tau = c(0.25, 1.1);
        let zero = vec![ComplexTorusPoint::zero(tau); 16];
        for build in [construct_family_a, construct_family_b] {
            let f = build(tau, &zero, RootChoice::default()).unwrap();
            assert!(f.points.iter().all(|p| p.norm() == 0.0));
            assert!(verify_special_family(&f, TORUS_TOL).unwrap().pass);
            let psi: Vec<_> = (0..16).map(|_| rand_point(&mut rng, tau)).collect();
            let f = build(tau, &psi, RootChoice::default()).unwrap();
            let rep = verify_special_family(&f, TORUS_TOL).unwrap();
            assert!(rep.pass, "{rep:?}");
            let mut bad = f.clone();
            bad.points[4] += 0.1;
            assert!(!verify_special_family(&bad, TORUS_TOL).unwrap().pass);
        }
    }

    #[test]
    fn invalid_split_rejected() {
        let tau = c(0.0, 1.0);
        let mut f = construct_family_a(tau, &vec![ComplexTorusPoint::zero(tau); 16], RootChoice::default()).unwrap();
        f.t = 8;
        assert!(verify_special_family(&f, TORUS_TOL).is_err());
    }
}
