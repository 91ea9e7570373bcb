//! Heterotic triplets (metric, B-field, Wilson lines) on a two-torus, their
//! lattice of momenta inside R^{2,18} and the associated period line.
//!
//! A vector of R^{2,18} is stored flat as (x1, x2, y1, y2, z) with z in
//! basis coordinates of Lambda; the product is x.x' - y.y' - (z, z').

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::ComplexTriplet;
use crate::error::{Error, Result};
use crate::lattice::{lo_gram, LambdaKind};
use crate::period::PeriodVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeteroticTriplet {
    #[serde(default)]
    pub lambda: LambdaKind,
    /// [[g11, g12], [g12, g22]].
    pub metric: [[f64; 2]; 2],
    pub b_field: f64,
    /// The images A(e1), A(e2) in basis coordinates of Lambda.
    pub wilson: [Vec<f64>; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedModuli {
    pub v: f64,
    pub tau: C64,
    pub z: Vec<C64>,
    pub u: C64,
}

impl HeteroticTriplet {
    pub fn new(lambda: LambdaKind, metric: [[f64; 2]; 2], b_field: f64, wilson: [Vec<f64>; 2]) -> Result<Self> {
        let h = HeteroticTriplet { lambda, metric, b_field, wilson };
        h.validate()?;
        Ok(h)
    }

    pub fn trivial(lambda: LambdaKind) -> Self {
        HeteroticTriplet { lambda, metric: [[1.0, 0.0], [0.0, 1.0]], b_field: 0.0, wilson: [vec![0.0; 16], vec![0.0; 16]] }
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.metric;
        if g[0][1] != g[1][0] {
            return Err(Error::Domain("metric is not symmetric".into()));
        }
        if !(g[0][0] > 0.0 && g[0][0] * g[1][1] - g[0][1] * g[0][1] > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        for w in &self.wilson {
            if w.len() != 16 {
                return Err(Error::Dimension { expected: 16, got: w.len() });
            }
        }
        Ok(())
    }

    /// The 2x2 matrix A^t A = [(z_i, z_j)].
    pub fn ata(&self) -> [[f64; 2]; 2] {
        let d = self.lambda.data();
        let p = |i: usize, j: usize| real_pair(&d.gram_f64, &self.wilson[i], &self.wilson[j]);
        [[p(0, 0), p(0, 1)], [p(1, 0), p(1, 1)]]
    }

    /// A^t l = ((z_1, l), (z_2, l)).
    fn at(&self, l: &[f64]) -> [f64; 2] {
        let g = &self.lambda.data().gram_f64;
        [real_pair(g, &self.wilson[0], l), real_pair(g, &self.wilson[1], l)]
    }

    fn aw(&self, w: [f64; 2]) -> Vec<f64> {
        (0..16).map(|k| self.wilson[0][k] * w[0] + self.wilson[1][k] * w[1]).collect()
    }
}

fn real_pair(g: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..u.len() {
        if u[i] == 0.0 {
            continue;
        }
        let t: f64 = g[i].iter().zip(v).map(|(a, b)| a * b).sum();
        s += u[i] * t;
    }
    s
}

pub fn derived_moduli(h: &HeteroticTriplet) -> Result<DerivedModuli> {
    h.validate()?;
    let g = h.metric;
    let v = (g[0][0] * g[1][1] - g[0][1] * g[0][1]).sqrt();
    let tau = C64::new(g[0][1], v) / g[0][0];
    let z = (0..16).map(|k| C64::new(h.wilson[1][k], 0.0) - tau * h.wilson[0][k]).collect();
    Ok(DerivedModuli { v, tau, z, u: C64::new(h.b_field * v, v) })
}

/// The momenta map (w, p, l) -> (p/2 - bTw - A^t l/2 - A^tA w/4 - w,
/// p/2 - bTw - A^t l/2 - A^tA w/4 + w, Aw + l).
pub fn momenta_map(h: &HeteroticTriplet, w: [i64; 2], p: [i64; 2], l: &[i64]) -> Result<Vec<f64>> {
    if l.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: l.len() });
    }
    let lf: Vec<f64> = l.iter().map(|&x| x as f64).collect();
    Ok(momenta_map_real(h, [w[0] as f64, w[1] as f64], [p[0] as f64, p[1] as f64], &lf))
}

fn momenta_map_real(h: &HeteroticTriplet, w: [f64; 2], p: [f64; 2], l: &[f64]) -> Vec<f64> {
    let b = h.b_field;
    let tw = [w[1], -w[0]];
    let atl = h.at(l);
    let g = h.ata();
    let mut out = vec![0.0; 20];
    for i in 0..2 {
        let gw = g[i][0] * w[0] + g[i][1] * w[1];
        let common = 0.5 * p[i] - b * tw[i] - 0.5 * atl[i] - 0.25 * gw;
        out[i] = common - w[i];
        out[2 + i] = common + w[i];
    }
    let aw = h.aw(w);
    for k in 0..16 {
        out[4 + k] = aw[k] + l[k];
    }
    out
}

/// Product x.x' - y.y' - (z, z') on flat real vectors.
pub fn momenta_product(lambda: LambdaKind, u: &[f64], v: &[f64]) -> f64 {
    let g = &lambda.data().gram_f64;
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2] - u[3] * v[3] - real_pair(g, &u[4..], &v[4..])
}

/// Bilinear extension of the momenta product to complex vectors.
pub fn momenta_product_c(lambda: LambdaKind, u: &[C64], v: &[C64]) -> C64 {
    let d = lambda.data();
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2] - u[3] * v[3] - d.pair_c(&u[4..], &v[4..])
}

/// F_1, F_2, F*_1, F*_2 and the images L of the sixteen basis vectors of
/// Lambda, as flat vectors of R^{2,18}.
pub fn momenta_basis(h: &HeteroticTriplet) -> Result<Vec<Vec<f64>>> {
    h.validate()?;
    let mut out = Vec::with_capacity(20);
    for i in 0..2 {
        let mut w = [0i64; 2];
        w[i] = -1;
        out.push(momenta_map(h, w, [0, 0], &[0; 16])?);
    }
    for i in 0..2 {
        let mut p = [0i64; 2];
        p[i] = 1;
        out.push(momenta_map(h, [0, 0], p, &[0; 16])?);
    }
    for k in 0..16 {
        let mut l = [0i64; 16];
        l[k] = 1;
        out.push(momenta_map(h, [0, 0], [0, 0], &l)?);
    }
    Ok(out)
}

pub fn momenta_gram(h: &HeteroticTriplet) -> Result<Vec<Vec<f64>>> {
    let basis = momenta_basis(h)?;
    Ok(basis.iter().map(|u| basis.iter().map(|v| momenta_product(h.lambda, u, v)).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub gram: Vec<Vec<f64>>,
    pub max_error: f64,
    pub pass: bool,
}

/// Compares the Gram matrix of the momenta basis with H + H + (-Lambda).
pub fn verify_momenta_gram(h: &HeteroticTriplet, tol: f64) -> Result<GramReport> {
    let gram = momenta_gram(h)?;
    let want = lo_gram(h.lambda);
    let mut max_error: f64 = 0.0;
    for i in 0..20 {
        for j in 0..20 {
            max_error = max_error.max((gram[i][j] - want[(i, j)] as f64).abs());
        }
    }
    Ok(GramReport { gram, max_error, pass: max_error <= tol })
}

/// The period line sum alpha_i F_i + sum beta_j F*_j + gamma, in coordinates
/// on the basis F, F*, Lambda.
pub fn period_line(h: &HeteroticTriplet) -> Result<PeriodVector> {
    let m = derived_moduli(h)?;
    let d = h.lambda.data();
    let (tau, u) = (m.tau, m.u);
    let zc: Vec<C64> = m.z.iter().map(|t| t.conj()).collect();
    let zz = d.pair_c(&m.z, &m.z);
    let zzb = d.pair_c(&m.z, &zc);
    let delta = tau.conj() - tau;
    let beta1 = u * -2.0 + (zz - zzb) / (delta * 2.0);
    let beta2 = tau * u * -2.0 + (tau.conj() * zz - tau * zzb) / (delta * 2.0);
    let v = ComplexTriplet::new(h.lambda, [-tau, C64::new(1.0, 0.0)], [beta1, beta2], m.z)?;
    Ok(PeriodVector::new(v))
}

/// Image in R^{2,18} (complexified) of a vector given on the basis
/// F, F*, Lambda.
pub fn to_momenta_space(h: &HeteroticTriplet, w: &ComplexTriplet) -> Result<Vec<C64>> {
    let basis = momenta_basis(h)?;
    let coeffs: Vec<C64> = w.components().collect();
    Ok((0..20).map(|k| coeffs.iter().zip(&basis).map(|(c, b)| c * b[k]).sum()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodLineReport {
    pub omega_omega: C64,
    pub omega_omega_bar: C64,
    pub pass: bool,
}

/// omega.omega = 0 and omega.conj(omega) > 0, both computed in R^{2,18}.
pub fn verify_period_line(h: &HeteroticTriplet, tol: f64) -> Result<PeriodLineReport> {
    let w = period_line(h)?;
    let x = to_momenta_space(h, &w.v)?;
    let xb: Vec<C64> = x.iter().map(|t| t.conj()).collect();
    let omega_omega = momenta_product_c(h.lambda, &x, &x);
    let omega_omega_bar = momenta_product_c(h.lambda, &x, &xb);
    let pass = omega_omega.norm() <= tol && omega_omega_bar.re > 0.0 && omega_omega_bar.im.abs() <= tol;
    Ok(PeriodLineReport { omega_omega, omega_omega_bar, pass })
}

/// A random triplet with a well-conditioned metric and small Wilson lines.
pub fn random_triplet<R: Rng + ?Sized>(rng: &mut R, lambda: LambdaKind) -> HeteroticTriplet {
    let g11: f64 = rng.gen_range(0.5..2.0);
    let g22: f64 = rng.gen_range(0.5..2.0);
    let g12 = rng.gen_range(-0.9..0.9) * (g11 * g22).sqrt();
    let wilson = [0, 1].map(|_| (0..16).map(|_| rng.gen_range(-0.5..0.5)).collect());
    HeteroticTriplet { lambda, metric: [[g11, g12], [g12, g22]], b_field: rng.gen_range(-1.0..1.0), wilson }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::{fiber_coordinate, narain_section, theta_tilde, Convention};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const K: LambdaKind = LambdaKind::E8E8;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn moduli_examples() {
        let m = derived_moduli(&HeteroticTriplet::trivial(K)).unwrap();
        assert_eq!((m.v, m.tau, m.u), (1.0, c(0.0, 1.0), c(0.0, 1.0)));
        assert!(m.z.iter().all(|t| t.norm() == 0.0));
        let mut h = HeteroticTriplet::trivial(K);
        h.metric = [[4.0, 0.0], [0.0, 1.0]];
        let m = derived_moduli(&h).unwrap();
        assert_eq!((m.v, m.tau), (2.0, c(0.0, 0.5)));
        h.metric = [[1.0, 2.0], [2.0, 1.0]];
        assert!(derived_moduli(&h).is_err());
    }

    #[test]
    fn momenta_map_examples() {
        let h = HeteroticTriplet::trivial(K);
        let v = momenta_map(&h, [0, 0], [1, 0], &[0; 16]).unwrap();
        assert_eq!(&v[..4], &[0.5, 0.0, 0.5, 0.0]);
        let v = momenta_map(&h, [-1, 0], [0, 0], &[0; 16]).unwrap();
        assert_eq!(&v[..4], &[1.0, 0.0, -1.0, 0.0]);
        assert!(momenta_map(&h, [0, 0], [0, 0], &[0; 16]).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn trivial_period_line() {
        let w = period_line(&HeteroticTriplet::trivial(K)).unwrap();
        assert_eq!(w.v.a, [c(-0.0, -1.0), c(1.0, 0.0)]);
        assert!((w.v.b[0] - c(0.0, -2.0)).norm() < 1e-15);
        assert!((w.v.b[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_triplets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in LambdaKind::ALL {
            for _ in 0..20 {
                let h = random_triplet(&mut rng, k);
                assert!(verify_momenta_gram(&h, 1e-12).unwrap().pass);
                let rep = verify_period_line(&h, 1e-12).unwrap();
                assert!(rep.pass, "{rep:?}");
                let m = derived_moduli(&h).unwrap();
                assert!((rep.omega_omega_bar.re - 8.0 * m.v * m.tau.im).abs() < 1e-11);
                let sn = narain_section(k, m.tau, &m.z, m.u, Convention::Appendix).unwrap();
                let (lam, mu) = fiber_coordinate(&period_line(&h).unwrap(), &sn).unwrap();
                assert!(lam.norm() < 1e-12 && (mu - 1.0).norm() < 1e-12);
                let (tau, z) = theta_tilde(&sn).unwrap();
                assert!((tau - m.tau).norm() < 1e-12);
                assert!(z.iter().zip(&m.z).all(|(a, b)| (a - b).norm() < 1e-12));
            }
        }
    }
}
