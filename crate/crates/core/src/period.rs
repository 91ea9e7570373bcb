//! Period vectors, the projection to H x Lambda_C, the Narain sections and
//! the automorphy factors of the holomorphic section.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ambient::{apply_n, exp_n, pair, ComplexTriplet};
use crate::error::{Error, Result};
use crate::lattice::LambdaKind;
use crate::parabolic::{act_on_period, check_upper_half_plane, ParabolicElement, PiElement};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Scaling of u in the non-holomorphic section: exp(uN) or exp(-2uN).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Body,
    Appendix,
}

impl Convention {
    pub fn n_coefficient(self, u: C64) -> C64 {
        match self {
            Convention::Body => u,
            Convention::Appendix => u * -2.0,
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "body" => Ok(Convention::Body),
            "appendix" => Ok(Convention::Appendix),
            _ => Err(Error::Domain(format!("unknown convention `{s}` (expected body|appendix)"))),
        }
    }
}

/// A point of the complexified lattice, read projectively.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodVector {
    pub v: ComplexTriplet,
}

impl PeriodVector {
    pub fn new(v: ComplexTriplet) -> Self {
        PeriodVector { v }
    }

    pub fn lambda(&self) -> LambdaKind {
        self.v.lambda
    }

    pub fn self_pair(&self) -> C64 {
        pair(&self.v, &self.v).expect("same lambda")
    }

    pub fn hermitian_norm(&self) -> f64 {
        pair(&self.v, &self.v.conj()).expect("same lambda").re
    }

    pub fn is_on_quadric(&self, tol: f64) -> bool {
        self.self_pair().norm() <= tol * self.v.max_abs().powi(2).max(1.0)
    }

    pub fn is_omega_plus(&self) -> bool {
        r_value(self).map(|r| r > 0.0).unwrap_or(false)
    }

    /// Representative with a2 = 1 (unchanged when a2 = 0).
    pub fn normalized(&self) -> PeriodVector {
        let a2 = self.v.a[1];
        if a2 == C64::new(0.0, 0.0) {
            return self.clone();
        }
        PeriodVector { v: self.v.scale(1.0 / a2) }
    }

    pub fn act(&self, g: &ParabolicElement) -> Result<PeriodVector> {
        Ok(PeriodVector { v: act_on_period(g, &self.v)? })
    }

    pub fn exp_n(&self, lambda: C64) -> PeriodVector {
        PeriodVector { v: exp_n(lambda, &self.v) }
    }
}

/// r(w) = -i (N w, conj w) = -2 Im(a1 conj(a2)); both forms are evaluated
/// and must agree.
pub fn r_value(w: &PeriodVector) -> Result<f64> {
    let via_pair = (-I * pair(&apply_n(&w.v), &w.v.conj())?).re;
    let [a1, a2] = w.v.a;
    let closed = -2.0 * (a1 * a2.conj()).im;
    let scale = 1.0 + w.v.a[0].norm_sqr() + w.v.a[1].norm_sqr();
    if (via_pair - closed).abs() > 1e-12 * scale {
        return Err(Error::Internal(format!("r disagreement: {via_pair} vs {closed}")));
    }
    Ok(closed)
}

/// The hermitian value (w, conj w).
pub fn pair_conj(w: &PeriodVector) -> C64 {
    pair(&w.v, &w.v.conj()).expect("same lambda")
}

/// (tau, z) = (-a1/a2, c/a2).
pub fn theta_tilde(w: &PeriodVector) -> Result<(C64, Vec<C64>)> {
    let r = r_value(w)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r = {r} is not positive")));
    }
    let a2 = w.v.a[1];
    Ok((-w.v.a[0] / a2, w.v.c.iter().map(|c| c / a2).collect()))
}

fn check_z(z: &[C64]) -> Result<()> {
    if z.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: z.len() });
    }
    Ok(())
}

/// ((z,z) - (z, conj z)) / (conj tau - tau), the coefficient separating the
/// two sections.
pub fn narain_shift(lambda: LambdaKind, tau: C64, z: &[C64]) -> C64 {
    let d = lambda.data();
    let zc: Vec<C64> = z.iter().map(|t| t.conj()).collect();
    (d.pair_c(z, z) - d.pair_c(z, &zc)) / (tau.conj() - tau)
}

/// The non-holomorphic section exp(k N)[(-tau, 1), m, z], k = u (body) or
/// -2u (appendix), with middle term
/// m = 1/2 (((z,z) - (z,zbar))/(taubar - tau), (taubar (z,z) - tau (z,zbar))/(taubar - tau)).
pub fn narain_section(lambda: LambdaKind, tau: C64, z: &[C64], u: C64, conv: Convention) -> Result<PeriodVector> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let d = lambda.data();
    let zc: Vec<C64> = z.iter().map(|t| t.conj()).collect();
    let zz = d.pair_c(z, z);
    let zzb = d.pair_c(z, &zc);
    let delta = tau.conj() - tau;
    let b = [(zz - zzb) / delta * 0.5, (tau.conj() * zz - tau * zzb) / delta * 0.5];
    let base = ComplexTriplet::new(lambda, [-tau, C64::new(1.0, 0.0)], b, z.to_vec())?;
    Ok(PeriodVector { v: exp_n(conv.n_coefficient(u), &base) })
}

/// The holomorphic section [(-tau, 1), 1/2 (0, (z,z)), z].
pub fn perturbed_section(lambda: LambdaKind, tau: C64, z: &[C64]) -> Result<PeriodVector> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let zz = lambda.data().pair_c(z, z);
    let v = ComplexTriplet::new(lambda, [-tau, C64::new(1.0, 0.0)], [C64::new(0.0, 0.0), zz * 0.5], z.to_vec())?;
    Ok(PeriodVector { v })
}

/// (lambda, mu) with w1 = mu exp(lambda N) w2.
pub fn fiber_coordinate(w1: &PeriodVector, w2: &PeriodVector) -> Result<(C64, C64)> {
    if w1.lambda() != w2.lambda() {
        return Err(Error::LatticeMismatch(format!("{} vs {}", w1.lambda(), w2.lambda())));
    }
    let (v1, v2) = (&w1.v, &w2.v);
    let a2 = v2.a[1];
    if a2.norm() < 1e-300 {
        return Err(Error::Domain("second vector has a2 = 0".into()));
    }
    let mu = v1.a[1] / a2;
    let scale = 1.0 + v1.max_abs() + mu.norm() * v2.max_abs();
    let proj_err = (v1.a[0] - mu * v2.a[0])
        .norm()
        .max(v1.c.iter().zip(&v2.c).map(|(p, q)| (p - mu * q).norm()).fold(0.0, f64::max));
    if proj_err > 1e-9 * scale {
        return Err(Error::Domain(format!("projections differ (residual {proj_err:.3e})")));
    }
    // (b1/mu - b2) = lambda T(a2-part); least squares in the hermitian sense
    let t = [v2.a[1], -v2.a[0]];
    let diff = [v1.b[0] / mu - v2.b[0], v1.b[1] / mu - v2.b[1]];
    let tt = t[0].norm_sqr() + t[1].norm_sqr();
    let lambda = (t[0].conj() * diff[0] + t[1].conj() * diff[1]) / tt;
    let resid = (diff[0] - lambda * t[0]).norm().max((diff[1] - lambda * t[1]).norm());
    let bscale = 1.0 + v1.b[0].norm().max(v1.b[1].norm()) / mu.norm() + v2.b[0].norm().max(v2.b[1].norm());
    if resid > 1e-9 * bscale {
        return Err(Error::Domain(format!("vectors are not in one fiber (residual {resid:.3e})")));
    }
    Ok((lambda, mu))
}

/// Outcome of comparing sigma(p.(tau,z)) with g.sigma(tau,z).
///
/// `lambda_raw` is the N-coordinate between the two vectors and `lambda` its
/// offset from the predicted value, which must be an integer. `mu` is
/// e^{2 pi i lambda_raw}, the C*-coordinate once integral shifts are
/// quotiented out; `scale` is the projective factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphyReport {
    pub lambda: f64,
    pub lambda_raw: C64,
    pub lambda_error: f64,
    pub mu: C64,
    pub expected_mu: C64,
    pub mu_rel_error: f64,
    pub scale: C64,
    pub pass: bool,
}

pub const AUTOMORPHY_TOL: f64 = 1e-9;

fn expi(x: C64) -> C64 {
    (I * x).exp()
}

fn build_report(lambda_raw: C64, kappa: C64, scale: C64, tol: f64) -> AutomorphyReport {
    let resid = lambda_raw - kappa;
    let lambda_error = (resid.re - resid.re.round()).abs().max(resid.im.abs());
    let mu = expi(lambda_raw * 2.0 * PI);
    let expected_mu = expi(kappa * 2.0 * PI);
    let mu_rel_error = (mu - expected_mu).norm() / expected_mu.norm();
    AutomorphyReport {
        lambda: resid.re,
        lambda_raw,
        lambda_error,
        mu,
        expected_mu,
        mu_rel_error,
        scale,
        pass: lambda_error <= tol && mu_rel_error <= tol,
    }
}

/// sigma(tau, z + q1 + tau q2) against g(I, Q, R, I).sigma(tau, z), with
/// predicted N-coordinate (q2, z) + tau (q2, q2)/2.
pub fn verify_lemma_translation(
    lambda: LambdaKind,
    tau: C64,
    z: &[C64],
    q1: &[i64],
    q2: &[i64],
) -> Result<AutomorphyReport> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let d = lambda.data();
    let g = ParabolicElement::translation(lambda, q1, q2)?;
    let shifted: Vec<C64> = (0..16).map(|i| z[i] + q1[i] as f64 + tau * q2[i] as f64).collect();
    let lhs = perturbed_section(lambda, tau, &shifted)?;
    let rhs = perturbed_section(lambda, tau, z)?.act(&g)?;
    let (lam, scale) = fiber_coordinate(&lhs, &rhs)?;
    let kappa = d.pair_int_c(q2, z) + tau * (d.pair_int(q2, q2) as f64 * 0.5);
    Ok(build_report(lam, kappa, scale, AUTOMORPHY_TOL))
}

/// sigma((a tau + b)/(c tau + d), z/(c tau + d)) against
/// g([[a,-b],[-c,d]], 0, 0, I).sigma(tau, z), with predicted N-coordinate
/// -c (z,z) / (2 (c tau + d)).
pub fn verify_lemma_modular(lambda: LambdaKind, tau: C64, z: &[C64], m: [[i64; 2]; 2]) -> Result<AutomorphyReport> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let [[a, b], [c, dd]] = m;
    let g = ParabolicElement::modular(lambda, [[a, -b], [-c, dd]])?;
    let j = tau * c as f64 + dd as f64;
    if j.norm() == 0.0 {
        return Err(Error::Domain("c tau + d vanishes".into()));
    }
    let tau2 = (tau * a as f64 + b as f64) / j;
    let z2: Vec<C64> = z.iter().map(|t| t / j).collect();
    let lhs = perturbed_section(lambda, tau2, &z2)?;
    let rhs = perturbed_section(lambda, tau, z)?.act(&g)?;
    let (lam, scale) = fiber_coordinate(&lhs, &rhs)?;
    let kappa = -(lambda.data().pair_c(z, z) * c as f64) / (j * 2.0);
    Ok(build_report(lam, kappa, scale, AUTOMORPHY_TOL))
}

/// Predicted N-coordinate for p = (M, f, q1, q2): the modular part at
/// (tau, z), nothing for f, and the translation part at (M tau, f z / j).
pub fn predicted_kappa(p: &PiElement, tau: C64, z: &[C64]) -> C64 {
    let d = p.lambda.data();
    let [[a, b], [c, dd]] = p.modular;
    let j = tau * c as f64 + dd as f64;
    let tau2 = (tau * a as f64 + b as f64) / j;
    let fz: Vec<C64> = (0..16).map(|i| (0..16).map(|k| z[k] * p.f[(i, k)] as f64).sum::<C64>() / j).collect();
    let modular = -(d.pair_c(z, z) * c as f64) / (j * 2.0);
    let trans = d.pair_int_c(&p.q2, &fz) + tau2 * (d.pair_int(&p.q2, &p.q2) as f64 * 0.5);
    modular + trans
}

/// Period-side factor for an arbitrary element: compares
/// sigma(alpha(g).(tau,z)) with g.sigma(tau,z).
pub fn period_automorphy(g: &ParabolicElement, tau: C64, z: &[C64]) -> Result<AutomorphyReport> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let p = g.alpha();
    let (tau2, z2) = p.act(tau, z)?;
    let lhs = perturbed_section(g.lambda, tau2, &z2)?;
    let rhs = perturbed_section(g.lambda, tau, z)?.act(g)?;
    let (lam, scale) = fiber_coordinate(&lhs, &rhs)?;
    Ok(build_report(lam, predicted_kappa(&p, tau, z), scale, AUTOMORPHY_TOL))
}

/// Automorphy factor phi_g(tau, z) of the section: 1/e^{2 pi i kappa}.
pub fn automorphy_factor(p: &PiElement, tau: C64, z: &[C64]) -> C64 {
    expi(predicted_kappa(p, tau, z) * (-2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::pair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const K: LambdaKind = LambdaKind::E8E8;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_z(rng: &mut ChaCha8Rng, s: f64) -> Vec<C64> {
        (0..16).map(|_| c(rng.gen_range(-s..s), rng.gen_range(-s..s))).collect()
    }

    #[test]
    fn r_examples() {
        let mut w = ComplexTriplet::zero(K);
        w.a = [c(0.0, -1.0), c(1.0, 0.0)];
        assert!((r_value(&PeriodVector::new(w.clone())).unwrap() - 2.0).abs() < 1e-15);
        w.a = [c(2.0, 0.0), c(-3.0, 0.0)];
        assert_eq!(r_value(&PeriodVector::new(w)).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_section_at_origin() {
        let z = vec![c(0.0, 0.0); 16];
        let s = perturbed_section(K, c(0.0, 1.0), &z).unwrap();
        assert_eq!(s.v.a, [c(-0.0, -1.0), c(1.0, 0.0)]);
        assert_eq!(s.v.b, [c(0.0, 0.0); 2]);
        let (t, zz) = theta_tilde(&s).unwrap();
        assert_eq!(t, c(0.0, 1.0));
        assert!(zz.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn real_axis_rejected() {
        let z = vec![c(0.0, 0.0); 16];
        assert!(perturbed_section(K, c(1.0, 0.0), &z).is_err());
        assert!(narain_section(K, c(1.0, -1.0), &z, c(0.0, 0.0), Convention::Body).is_err());
    }

    #[test]
    fn narain_real_z_middle_term() {
        let z: Vec<C64> = (0..16).map(|i| c(i as f64 * 0.1 - 0.5, 0.0)).collect();
        let s = narain_section(K, c(0.2, 1.3), &z, c(0.0, 0.0), Convention::Body).unwrap();
        let zz = K.data().pair_c(&z, &z);
        assert!(s.v.b[0].norm() < 1e-14);
        assert!((s.v.b[1] - zz * 0.5).norm() < 1e-12);
    }

    #[test]
    fn narain_vs_perturbed_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tau = c(0.4, 0.9);
        let z = rand_z(&mut rng, 1.0);
        let sn = narain_section(K, tau, &z, c(0.0, 0.0), Convention::Body).unwrap();
        let s = perturbed_section(K, tau, &z).unwrap();
        let (lam, mu) = fiber_coordinate(&sn, &s).unwrap();
        assert!((mu - 1.0).norm() < 1e-14);
        assert!((lam - narain_shift(K, tau, &z) * 0.5).norm() < 1e-12);
    }

    #[test]
    fn narain_pairings() {
        // r = 2 Im tau and (w, conj w) = -4 Im tau Im u for the body convention
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let tau = c(rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0));
            let u = c(rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
            let z = rand_z(&mut rng, 1.0);
            let s = narain_section(K, tau, &z, u, Convention::Body).unwrap();
            assert!(s.self_pair().norm() < 1e-11);
            assert!((r_value(&s).unwrap() - 2.0 * tau.im).abs() < 1e-12);
            let h = pair(&s.v, &s.v.conj()).unwrap();
            assert!((h - c(-4.0 * tau.im * u.im, 0.0)).norm() < 1e-11);
            let sa = narain_section(K, tau, &z, u, Convention::Appendix).unwrap();
            let ha = pair(&sa.v, &sa.v.conj()).unwrap();
            assert!((ha - c(8.0 * tau.im * u.im, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn fiber_coordinate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = rand_z(&mut rng, 0.5);
        let w = perturbed_section(K, c(0.1, 1.2), &z).unwrap();
        let (l, m) = fiber_coordinate(&w, &w).unwrap();
        assert!(l.norm() < 1e-15 && (m - 1.0).norm() < 1e-15);
        let l0 = c(0.3, -0.7);
        let (l, m) = fiber_coordinate(&w.exp_n(l0), &w).unwrap();
        assert!((l - l0).norm() < 1e-14 && (m - 1.0).norm() < 1e-14);
        let five = PeriodVector::new(w.v.scale(c(5.0, 0.0)));
        let (l, m) = fiber_coordinate(&five, &w).unwrap();
        assert!(l.norm() < 1e-14 && (m - 5.0).norm() < 1e-13);
        let other = perturbed_section(K, c(0.2, 1.2), &z).unwrap();
        assert!(fiber_coordinate(&other, &w).is_err());
    }

    #[test]
    fn lemma_translation_trivial_and_root() {
        let z = vec![c(0.0, 0.0); 16];
        let rep = verify_lemma_translation(K, c(0.0, 1.0), &z, &[0; 16], &[0; 16]).unwrap();
        assert!(rep.pass && rep.lambda.abs() < 1e-15 && (rep.mu - 1.0).norm() < 1e-15);
        let mut root = [0i64; 16];
        root[0] = 1;
        let rep = verify_lemma_translation(K, c(0.0, 1.0), &z, &[0; 16], &root).unwrap();
        assert!(rep.pass);
        assert!((rep.expected_mu - c((-2.0 * PI).exp(), 0.0)).norm() < 1e-18);
    }

    #[test]
    fn lemma_modular_identity_and_translations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = rand_z(&mut rng, 1.0);
        let rep = verify_lemma_modular(K, c(0.3, 0.8), &z, [[1, 0], [0, 1]]).unwrap();
        assert!(rep.pass && (rep.mu - 1.0).norm() < 1e-12);
        let rep = verify_lemma_modular(K, c(0.3, 0.8), &z, [[1, 3], [0, 1]]).unwrap();
        assert!(rep.pass && rep.expected_mu == c(1.0, 0.0));
        let rep = verify_lemma_modular(K, c(0.3, 0.8), &z, [[2, 1], [5, 3]]).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn theta_tilde_invariant_under_exp_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = rand_z(&mut rng, 1.0);
        let w = perturbed_section(K, c(-0.3, 0.6), &z).unwrap().exp_n(c(1.5, 2.0));
        let (t, zz) = theta_tilde(&w).unwrap();
        assert!((t - c(-0.3, 0.6)).norm() < 1e-15);
        assert!(zz.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn general_elements_satisfy_automorphy() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for k in LambdaKind::ALL {
            for _ in 0..30 {
                let g = crate::parabolic::random_element(&mut rng, k);
                let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.5));
                let z = rand_z(&mut rng, 0.3);
                let rep = period_automorphy(&g, tau, &z).unwrap();
                assert!(rep.pass, "{k:?} {rep:?}");
            }
        }
    }
}
