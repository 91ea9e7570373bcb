//! Dedekind eta, lattice theta functions of E8+E8 and Gamma16, the character
//! B = Theta / eta^16 and its transformation law.
//!
//! Theta is evaluated through one-dimensional Jacobi sums in the orthonormal
//! frame where both lattices are D_n^+ = D_n u (D_n + s). Values can exceed
//! the double range for large Im z, so the evaluators return a mantissa and a
//! separate log-magnitude.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::lattice::{build_lattice, count_by_norm, fold_short_vectors, LambdaKind, LatticeLabel};
use crate::parabolic::{check_upper_half_plane, M2, PiElement};
use crate::period::automorphy_factor;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Smallest Im tau accepted by the theta evaluators.
pub const MIN_IM_TAU: f64 = 0.05;

/// Relative tolerance for character-ratio checks.
pub const CHARACTER_TOL: f64 = 1e-8;

/// The number m * e^s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledC64 {
    pub mantissa: C64,
    pub log_scale: f64,
}

impl ScaledC64 {
    pub fn new(mantissa: C64, log_scale: f64) -> Self {
        ScaledC64 { mantissa, log_scale }.normalized()
    }

    pub fn from_c64(v: C64) -> Self {
        Self::new(v, 0.0)
    }

    pub fn zero() -> Self {
        ScaledC64 { mantissa: C64::zero(), log_scale: 0.0 }
    }

    fn normalized(self) -> Self {
        let r = self.mantissa.norm();
        if r == 0.0 || !r.is_finite() {
            return ScaledC64 { mantissa: self.mantissa, log_scale: if r == 0.0 { 0.0 } else { self.log_scale } };
        }
        ScaledC64 { mantissa: self.mantissa / r, log_scale: self.log_scale + r.ln() }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(self.mantissa * o.mantissa, self.log_scale + o.log_scale)
    }

    pub fn div(self, o: Self) -> Self {
        Self::new(self.mantissa / o.mantissa, self.log_scale - o.log_scale)
    }

    pub fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let s = self.log_scale.max(o.log_scale);
        let m = self.mantissa * (self.log_scale - s).exp() + o.mantissa * (o.log_scale - s).exp();
        Self::new(m, s)
    }

    pub fn scale(self, k: C64) -> Self {
        Self::new(self.mantissa * k, self.log_scale)
    }

    /// ln |value|.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale
    }

    /// Plain value; overflows to infinity outside the double range.
    pub fn to_c64(&self) -> C64 {
        self.mantissa * self.log_scale.exp()
    }
}

fn check_tau(tau: C64) -> Result<()> {
    check_upper_half_plane(tau)?;
    if tau.im < MIN_IM_TAU {
        return Err(Error::Domain(format!(
            "Im tau = {} is below {MIN_IM_TAU}; move tau into a better region with a modular transformation first",
            tau.im
        )));
    }
    Ok(())
}

fn check_z(z: &[C64]) -> Result<()> {
    if z.len() != 16 {
        return Err(Error::Dimension { expected: 16, got: z.len() });
    }
    if z.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("z has non-finite entries".into()));
    }
    Ok(())
}

/// Dedekind eta by its product, truncated once |q|^m < 1e-18.
pub fn eta(tau: C64) -> Result<C64> {
    check_upper_half_plane(tau)?;
    let q = (I * 2.0 * PI * tau).exp();
    let qa = q.norm();
    let mut prod = C64::new(1.0, 0.0);
    let mut qm = q;
    let mut mag = qa;
    while mag >= 1e-18 {
        prod *= C64::new(1.0, 0.0) - qm;
        qm *= q;
        mag *= qa;
    }
    Ok((I * PI * tau / 12.0).exp() * prod)
}

/// Dedekind eta from Euler's pentagonal series
/// q^{1/24} sum_n (-1)^n q^{n(3n-1)/2}, summed until the terms drop below
/// 1e-18.
pub fn eta_series(tau: C64) -> Result<C64> {
    check_upper_half_plane(tau)?;
    let q = (I * 2.0 * PI * tau).exp();
    let mut s = C64::new(1.0, 0.0);
    let mut n: i64 = 1;
    loop {
        let mut added = false;
        for m in [n, -n] {
            let e = (m * (3 * m - 1) / 2) as i32;
            let t = q.powi(e);
            if t.norm() >= 1e-18 {
                added = true;
            }
            s += if n % 2 == 0 { t } else { -t };
        }
        if !added {
            break;
        }
        n += 1;
    }
    Ok((I * PI * tau / 12.0).exp() * s)
}

/// Sum over m in Z + a of exp(pi i tau m^2 + 2 pi i m w), windowed around the
/// peak of the Gaussian factor.
fn jacobi_sum(half: bool, tau: C64, w: C64) -> ScaledC64 {
    let a = if half { 0.5 } else { 0.0 };
    let y = tau.im;
    let peak = -w.im / y;
    let width = (45.0 / (PI * y)).sqrt() + 1.0;
    let lo = (peak - width - a).ceil() as i64;
    let hi = (peak + width - a).floor() as i64;
    let mut s = C64::zero();
    for n in lo..=hi {
        let m = n as f64 + a;
        let d = m - peak;
        let re = -PI * y * d * d;
        let im = PI * tau.re * m * m + 2.0 * PI * m * w.re;
        s += C64::from_polar(re.exp(), im);
    }
    ScaledC64::new(s, PI * y * peak * peak)
}

/// Theta of D_n^+ (sum of coordinates even) at frame coordinates w.
fn theta_dn_plus(tau: C64, w: &[C64]) -> ScaledC64 {
    let shift = C64::new(0.5, 0.0);
    let mut total = ScaledC64::zero();
    for half in [false, true] {
        let mut p0 = ScaledC64::from_c64(C64::new(1.0, 0.0));
        let mut p1 = p0;
        for &wi in w {
            p0 = p0.mul(jacobi_sum(half, tau, wi));
            p1 = p1.mul(jacobi_sum(half, tau, wi + shift));
        }
        total = total.add(p0).add(p1);
    }
    total.scale(C64::new(0.5, 0.0))
}

/// Theta_Lambda(tau, z) = sum over gamma of exp(pi i (2 (z, gamma) + tau (gamma, gamma))),
/// z in basis coordinates, as a scaled number.
pub fn theta_lattice_scaled(kind: LambdaKind, tau: C64, z: &[C64]) -> Result<ScaledC64> {
    check_tau(tau)?;
    check_z(z)?;
    let w = kind.data().to_frame_complex(z);
    Ok(match kind {
        LambdaKind::E8E8 => theta_dn_plus(tau, &w[..8]).mul(theta_dn_plus(tau, &w[8..])),
        LambdaKind::Gamma16 => theta_dn_plus(tau, &w),
    })
}

pub fn theta_lattice(kind: LambdaKind, tau: C64, z: &[C64]) -> Result<C64> {
    Ok(theta_lattice_scaled(kind, tau, z)?.to_c64())
}

/// Largest norm the direct summation is allowed to enumerate.
pub const DIRECT_NORM_BUDGET: i64 = 8;

/// Number of vectors of norm 2k in a rank-16 even unimodular lattice is
/// 480 sigma_7(k) <= 484 k^7.
fn direct_tail_bound(k_start: i64, y: f64, im_norm: f64) -> f64 {
    (k_start..k_start + 200)
        .map(|k| {
            let k = k as f64;
            484.0 * k.powi(7) * (-2.0 * PI * y * k + 2.0 * PI * im_norm * (2.0 * k).sqrt()).exp()
        })
        .sum()
}

/// Theta by summing over all lattice vectors up to the smallest norm whose
/// tail bound is below 1e-12 (relative to the k = 0 term).
pub fn theta_lattice_direct(kind: LambdaKind, tau: C64, z: &[C64], budget: i64, mode: ExecMode) -> Result<C64> {
    check_upper_half_plane(tau)?;
    check_z(z)?;
    let d = kind.data();
    let w = d.to_frame_complex(z);
    let im_norm = w.iter().map(|t| t.im * t.im).sum::<f64>().sqrt();
    let mut k = 1;
    while direct_tail_bound(k, tau.im, im_norm) >= 1e-12 {
        k += 1;
        if k > 1000 {
            break;
        }
    }
    let max_norm = 2 * (k - 1);
    if max_norm > budget {
        return Err(Error::Budget { required: max_norm, budget });
    }
    let gz: Vec<C64> = (0..16).map(|i| (0..16).map(|j| z[j] * d.gram_f64[i][j]).sum()).collect();
    let s = fold_short_vectors(
        &d.lattice,
        max_norm,
        mode,
        C64::zero,
        |acc: &mut C64, v: &[i64], norm: i64| {
            let zg: C64 = v.iter().zip(&gz).map(|(&c, g)| g * c as f64).sum();
            *acc += (I * PI * (zg * 2.0 + tau * norm as f64)).exp();
        },
        |a, b| a + b,
    )?;
    Ok(s + 1.0)
}

/// B_Lambda = Theta_Lambda / eta^16 as a scaled number.
pub fn character_scaled(kind: LambdaKind, tau: C64, z: &[C64]) -> Result<ScaledC64> {
    let th = theta_lattice_scaled(kind, tau, z)?;
    let e = eta(tau)?;
    Ok(th.div(ScaledC64::from_c64(e.powi(16))))
}

pub fn character(kind: LambdaKind, tau: C64, z: &[C64]) -> Result<C64> {
    Ok(character_scaled(kind, tau, z)?.to_c64())
}

type Q128 = Ratio<i128>;

/// Dedekind sum s(h, k), k > 0, by reciprocity.
pub fn dedekind_sum(h: i64, k: i64) -> Ratio<i128> {
    assert!(k > 0, "dedekind_sum needs k > 0");
    let mut h = (h as i128).rem_euclid(k as i128);
    let mut k = k as i128;
    let mut sign = Q128::one();
    let mut acc = Q128::zero();
    // s(h,k) + s(k,h) = (h/k + k/h + 1/(hk))/12 - 1/4 for coprime h, k > 0
    while h != 0 {
        let term = (Q128::new(h, k) + Q128::new(k, h) + Q128::new(1, h * k)) / Q128::from_integer(12)
            - Q128::new(1, 4);
        acc += sign * term;
        sign = -sign;
        let nh = k.rem_euclid(h);
        k = h;
        h = nh;
    }
    // s(0, 1) = 0
    acc
}

/// Multiplier of eta^16: eta^16(M tau) = nu(M) (c tau + d)^8 eta^16(tau),
/// with nu(M) = exp(2 pi i k / 3). Returns k in {0, 1, 2}.
pub fn eta16_multiplier(m: &M2) -> Result<u8> {
    let [[mut a, mut b], [mut c, mut d]] = *m;
    if a * d - b * c != 1 {
        return Err(Error::InvalidElement("matrix is not in SL2(Z)".into()));
    }
    if c < 0 || (c == 0 && d < 0) {
        (a, b, c, d) = (-a, -b, -c, -d);
    }
    let x = if c == 0 {
        Q128::new(2 * b as i128, 3)
    } else {
        // eta multiplier exponent (a + d)/(24 c) - s(d, c)/2 - 1/8, times 16
        Q128::from_integer(8) * (Q128::new((a + d) as i128, 12 * c as i128) - dedekind_sum(d, c))
    };
    let frac = x - x.floor();
    let three = frac * Q128::from_integer(3);
    if !three.is_integer() {
        return Err(Error::Internal(format!("eta^16 multiplier exponent {x} is not in Z/3")));
    }
    Ok(three.to_integer() as u8)
}

pub fn eta16_multiplier_value(m: &M2) -> Result<C64> {
    let k = eta16_multiplier(m)?;
    Ok((I * 2.0 * PI * k as f64 / 3.0).exp())
}

/// Comparison of B(p.(tau, z)) / B(tau, z) with the section's automorphy
/// factor, both as stated (`rel_error`) and with the eta^16 multiplier
/// divided out (`rel_error_with_multiplier`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterReport {
    pub ratio: C64,
    pub phi_ch: C64,
    pub eta16_multiplier: C64,
    pub rel_error: f64,
    pub rel_error_with_multiplier: f64,
    pub pass: bool,
    pub pass_with_multiplier: bool,
}

pub fn verify_character_transform(kind: LambdaKind, tau: C64, z: &[C64], p: &PiElement) -> Result<CharacterReport> {
    if p.lambda != kind {
        return Err(Error::LatticeMismatch(format!("{} vs {}", p.lambda, kind)));
    }
    let (tau2, z2) = p.act(tau, z)?;
    let before = character_scaled(kind, tau, z)?;
    let after = character_scaled(kind, tau2, &z2)?;
    let ratio = after.div(before).to_c64();
    let phi_ch = automorphy_factor(p, tau, z);
    let nu = eta16_multiplier_value(&p.modular)?;
    let rel_error = (ratio - phi_ch).norm() / phi_ch.norm();
    let corrected = phi_ch / nu;
    let rel_error_with_multiplier = (ratio - corrected).norm() / corrected.norm();
    Ok(CharacterReport {
        ratio,
        phi_ch,
        eta16_multiplier: nu,
        rel_error,
        rel_error_with_multiplier,
        pass: rel_error <= CHARACTER_TOL,
        pass_with_multiplier: rel_error_with_multiplier <= CHARACTER_TOL,
    })
}

/// Rational exponent of q, printed as `n` or `n/d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QExponent(pub Ratio<i64>);

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for QExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Ratio<i64>>().map(QExponent).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Theta,
    Character,
}

/// A truncated q-series with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QExpansion {
    pub lattice: LatticeLabel,
    pub series: SeriesKind,
    pub coefficients: Vec<(QExponent, i128)>,
    pub truncation_order: i64,
}

impl QExpansion {
    pub fn values(&self) -> Vec<i128> {
        self.coefficients.iter().map(|(_, c)| *c).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("exponent,coefficient\n");
        for (e, c) in &self.coefficients {
            out.push_str(&format!("{e},{c}\n"));
        }
        out
    }

    /// Evaluate at tau by summing the truncated series.
    pub fn eval(&self, tau: C64) -> C64 {
        self.coefficients
            .iter()
            .map(|(e, c)| {
                let x = *e.0.numer() as f64 / *e.0.denom() as f64;
                (I * 2.0 * PI * tau * x).exp() * (*c as f64)
            })
            .sum()
    }
}

/// Enumeration budget (largest norm) for a lattice of the given rank.
pub fn qexp_norm_budget(rank: usize) -> i64 {
    if rank <= 8 {
        20
    } else {
        8
    }
}

fn theta_label(label: LatticeLabel) -> Result<crate::lattice::Lattice> {
    let l = build_lattice(label);
    if !l.is_positive_definite() || !l.is_even() {
        return Err(Error::Domain(format!("{} is not positive definite and even", label.as_str())));
    }
    Ok(l)
}

/// Theta_Lambda(tau, 0) = sum_n N(2n) q^n for n = 0..=max_order, with the
/// counts taken from the lattice enumeration.
pub fn q_expansion(label: LatticeLabel, max_order: i64) -> Result<QExpansion> {
    q_expansion_with(label, max_order, ExecMode::default())
}

pub fn q_expansion_with(label: LatticeLabel, max_order: i64, mode: ExecMode) -> Result<QExpansion> {
    if max_order < 0 {
        return Err(Error::Domain("max_order must be non-negative".into()));
    }
    let l = theta_label(label)?;
    let budget = qexp_norm_budget(l.rank());
    if 2 * max_order > budget {
        return Err(Error::Budget { required: 2 * max_order, budget });
    }
    let counts: BTreeMap<i64, u64> = count_by_norm(&l, 2 * max_order, mode)?;
    let coefficients = (0..=max_order)
        .map(|n| (QExponent(Ratio::from_integer(n)), *counts.get(&(2 * n)).unwrap_or(&0) as i128))
        .collect();
    Ok(QExpansion { lattice: label, series: SeriesKind::Theta, coefficients, truncation_order: max_order })
}

/// Coefficients of prod_{m >= 1} (1 - q^m)^power through q^order.
pub fn euler_power_series(power: i64, order: usize) -> Vec<i128> {
    let mut s = vec![0i128; order + 1];
    s[0] = 1;
    let mul = |s: &mut Vec<i128>, m: usize, neg: bool| {
        // multiply by (1 - q^m) or divide by it
        if neg {
            for i in (m..=order).rev() {
                s[i] -= s[i - m];
            }
        } else {
            for i in m..=order {
                s[i] += s[i - m];
            }
        }
    };
    for m in 1..=order {
        for _ in 0..power.unsigned_abs() {
            mul(&mut s, m, power > 0);
        }
    }
    s
}

/// B_Lambda(tau, 0) = q^{-rank/24} Theta / prod (1 - q^m)^rank.
pub fn character_q_expansion(label: LatticeLabel, max_order: i64) -> Result<QExpansion> {
    let theta = q_expansion(label, max_order)?;
    let rank = build_lattice(label).rank() as i64;
    let inv = euler_power_series(-rank, max_order as usize);
    let th = theta.values();
    let offset = Ratio::new(-rank, 24);
    let coefficients = (0..=max_order as usize)
        .map(|n| {
            let c = (0..=n).map(|i| th[i] * inv[n - i]).sum::<i128>();
            (QExponent(offset + Ratio::from_integer(n as i64)), c)
        })
        .collect();
    Ok(QExpansion { lattice: label, series: SeriesKind::Character, coefficients, truncation_order: max_order })
}
