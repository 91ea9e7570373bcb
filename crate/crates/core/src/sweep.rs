//! Randomized verification sweeps. Every sample draws from its own ChaCha8
//! stream keyed by (seed, suite, index), so reports do not depend on thread
//! count or scheduling.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{map_range, ExecMode};
use crate::family::{construct_family_a, construct_family_b, verify_special_family, ComplexTorusPoint, RootChoice};
use crate::lattice::{build_lattice, LambdaKind, LatticeLabel};
use crate::narain::{derived_moduli, period_line, random_triplet, verify_momenta_gram, verify_period_line};
use crate::parabolic::{generators, random_element, random_sl2, ParabolicElement, PiElement};
use crate::period::{
    fiber_coordinate, narain_section, pair_conj, perturbed_section, period_automorphy, r_value, theta_tilde,
    verify_lemma_modular, verify_lemma_translation, AutomorphyReport, Convention,
};
use crate::theta::{eta, eta_series, q_expansion_with, verify_character_transform, CharacterReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub structural: f64,
    pub character: f64,
    pub automorphy: f64,
    pub gram: f64,
    pub torus: f64,
    pub eta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { structural: 1e-9, character: 1e-8, automorphy: 1e-7, gram: 1e-12, torus: 1e-9, eta: 1e-12 }
    }
}

impl Tolerances {
    /// Every tolerance set to `t`.
    pub fn uniform(t: f64) -> Self {
        Tolerances { structural: t, character: t, automorphy: t, gram: t, torus: t, eta: t }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleCounts {
    pub lemma: usize,
    pub automorphy: usize,
    pub group: usize,
    pub sections: usize,
    pub narain: usize,
    pub family: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts { lemma: 1000, automorphy: 500, group: 1000, sections: 1000, narain: 100, family: 100 }
    }
}

impl SampleCounts {
    pub fn uniform(n: usize) -> Self {
        SampleCounts { lemma: n, automorphy: n, group: n, sections: n, narain: n, family: n }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Restrict to one lattice; both when absent.
    pub lattice: Option<LambdaKind>,
    pub samples: SampleCounts,
    pub convention: Convention,
    #[serde(skip)]
    pub mode: ExecMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20,
            tolerances: Tolerances::default(),
            lattice: None,
            samples: SampleCounts::default(),
            convention: Convention::Body,
            mode: ExecMode::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let s = &self.samples;
        if [s.lemma, s.automorphy, s.group, s.sections, s.narain, s.family].contains(&0) {
            return Err("sample counts must be at least 1".into());
        }
        let t = &self.tolerances;
        if [t.structural, t.character, t.automorphy, t.gram, t.torus, t.eta].iter().any(|&x| !(x >= 0.0)) {
            return Err("tolerances must be non-negative".into());
        }
        Ok(())
    }

    pub fn lattices(&self) -> Vec<LambdaKind> {
        match self.lattice {
            Some(k) => vec![k],
            None => LambdaKind::ALL.to_vec(),
        }
    }

    /// Lattice used by sample i.
    fn kind(&self, i: usize) -> LambdaKind {
        let ks = self.lattices();
        ks[i % ks.len()]
    }
}

/// The random stream for sample `index` of suite `suite`.
pub fn sample_rng(seed: u64, suite: u32, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 40) | index as u64);
    rng
}

pub fn sample_tau<R: Rng + ?Sized>(rng: &mut R, im_lo: f64, im_hi: f64) -> C64 {
    C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(im_lo..im_hi))
}

/// A point of Lambda_C whose coordinate vector has Euclidean length at most
/// `radius`.
pub fn sample_z<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec<C64> {
    let raw: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = radius * rng.gen_range(0.0f64..1.0).powf(1.0 / 32.0);
    (0..16).map(|i| C64::new(raw[2 * i], raw[2 * i + 1]) * (r / n)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
    /// Draws that fell outside the evaluator domain and were replaced.
    pub resampled: usize,
    /// Not counted towards the overall verdict.
    pub informational: bool,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &str, tolerance: f64) -> Self {
        SuiteResult {
            name: name.into(),
            samples: 0,
            failures: 0,
            max_error: 0.0,
            tolerance,
            resampled: 0,
            informational: false,
            pass: true,
        }
    }

    fn record(&mut self, error: f64) {
        self.samples += 1;
        let ok = error <= self.tolerance;
        if !ok {
            self.failures += 1;
        }
        // NaN counts as a failure and is reported as infinite
        let e = if error.is_nan() { f64::INFINITY } else { error };
        self.max_error = self.max_error.max(e);
        self.pass = self.failures == 0;
    }

    fn record_bool(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub lattices: Vec<LambdaKind>,
    pub convention: Convention,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

/// Outcome of one (g, tau, z) draw comparing the period side with the
/// character side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphySample {
    pub kind: LambdaKind,
    pub period: AutomorphyReport,
    pub character: CharacterReport,
    /// |ratio - 1/mu| / |1/mu|.
    pub rel_error_stated: f64,
    /// |ratio nu - 1/mu| / |1/mu| with nu the eta^16 multiplier.
    pub rel_error_with_multiplier: f64,
    pub resampled: usize,
}

/// Draws g, tau (Im tau in [0.3, 3]) and z (|z| <= 2) until both tau and
/// its image lie in the evaluator domain, then compares both sides.
pub fn automorphy_sample(kind: LambdaKind, rng: &mut ChaCha8Rng) -> Result<AutomorphySample> {
    let mut resampled = 0;
    loop {
        let g = random_element(rng, kind);
        let tau = sample_tau(rng, 0.3, 3.0);
        let z = sample_z(rng, 2.0);
        let p = g.alpha();
        let (tau2, _) = p.act(tau, &z)?;
        if tau2.im < crate::theta::MIN_IM_TAU {
            resampled += 1;
            continue;
        }
        let period = period_automorphy(&g, tau, &z)?;
        let character = verify_character_transform(kind, tau, &z, &p)?;
        let phi = 1.0 / period.mu;
        let rel_error_stated = (character.ratio - phi).norm() / phi.norm();
        let rel_error_with_multiplier = (character.ratio * character.eta16_multiplier - phi).norm() / phi.norm();
        return Ok(AutomorphySample { kind, period, character, rel_error_stated, rel_error_with_multiplier, resampled });
    }
}

fn kernel_member(g: &ParabolicElement) -> bool {
    g.membership().in_unz || ParabolicElement::minus_identity(g.lambda).multiply(g).map(|h| h.membership().in_unz).unwrap_or(false)
}

/// Checks for one random triple; returns the names of failed identities.
pub fn group_identities(g1: &ParabolicElement, g2: &ParabolicElement, g3: &ParabolicElement) -> Vec<&'static str> {
    let mut bad = Vec::new();
    let (Ok(g12), Ok(g23)) = (g1.multiply(g2), g2.multiply(g3)) else {
        return vec!["closure"];
    };
    match (g12.multiply(g3), g1.multiply(&g23)) {
        (Ok(a), Ok(b)) if a == b => {}
        _ => bad.push("associativity"),
    }
    if g12.validate().is_err() {
        bad.push("constraint");
    }
    let inv = g1.inverse();
    let id = ParabolicElement::identity(g1.lambda);
    if inv.validate().is_err()
        || g1.multiply(&inv).ok() != Some(id.clone())
        || inv.multiply(g1).ok() != Some(id)
        || Some(inv.to_matrix()) != g1.to_matrix().inverse()
    {
        bad.push("inverse");
    }
    let (t, w, s) = g1.factorize();
    let recomposed = t.multiply(&w).and_then(|tw| tw.multiply(&s));
    if recomposed.ok().as_ref() != Some(g1) || !t.membership().in_t || !w.membership().in_w || !s.membership().in_s {
        bad.push("factorize");
    }
    if g12.alpha() != g1.alpha().compose(&g2.alpha()).unwrap_or_else(|_| PiElement::identity(g1.lambda)) {
        bad.push("alpha homomorphism");
    }
    for h in [&g12, g1] {
        if h.alpha().is_identity() != kernel_member(h) {
            bad.push("kernel");
        }
    }
    // conjugates of exp(kN) and -1 lie in the kernel
    let u = ParabolicElement::unipotent(g1.lambda, 3).multiply(&ParabolicElement::minus_identity(g1.lambda)).unwrap();
    match g2.multiply(&u).and_then(|x| x.multiply(&g2.inverse())) {
        Ok(c) if c.alpha().is_identity() && kernel_member(&c) => {}
        _ => bad.push("kernel conjugate"),
    }
    bad
}

/// Homomorphism and kernel checks over all ordered pairs of generators.
pub fn generator_pair_failures(kind: LambdaKind) -> usize {
    let gens = generators(kind);
    let mut fails = 0;
    for a in &gens {
        if a.alpha().is_identity() != kernel_member(a) {
            fails += 1;
        }
        for b in &gens {
            let ab = a.multiply(b).expect("generators compose");
            if ab.alpha() != a.alpha().compose(&b.alpha()).expect("same lattice") {
                fails += 1;
            }
            if ab.alpha().is_identity() != kernel_member(&ab) {
                fails += 1;
            }
        }
    }
    fails
}

/// Expected (w, conj w) for the non-holomorphic section.
pub fn expected_hermitian(conv: Convention, tau: C64, u: C64) -> f64 {
    match conv {
        Convention::Body => -4.0 * tau.im * u.im,
        Convention::Appendix => 8.0 * tau.im * u.im,
    }
}

fn collect<T: Send>(cfg: &RunConfig, suite: u32, n: usize, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send) -> Vec<T> {
    map_range(cfg.mode, n, |i| {
        let mut rng = sample_rng(cfg.seed, suite, i);
        f(i, &mut rng)
    })
}

pub fn suite_classification(_cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("lattice classification", 0.0);
    for (label, sig) in [
        (LatticeLabel::LoE8E8, (2, 18)),
        (LatticeLabel::LoGamma16, (2, 18)),
        (LatticeLabel::E8E8, (16, 0)),
        (LatticeLabel::Gamma16, (16, 0)),
        (LatticeLabel::E8, (8, 0)),
    ] {
        let c = build_lattice(label).classify();
        s.record_bool(c.even && c.unimodular && c.signature == sig);
    }
    s
}

pub fn suite_theta_counts(cfg: &RunConfig) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("theta coincidence (exact counts)", 0.0);
    let a = q_expansion_with(LatticeLabel::E8E8, 4, cfg.mode)?.values();
    let b = q_expansion_with(LatticeLabel::Gamma16, 4, cfg.mode)?.values();
    let e8 = q_expansion_with(LatticeLabel::E8, 4, cfg.mode)?.values();
    for n in 0..=4 {
        let conv: i128 = (0..=n).map(|i| e8[i] * e8[n - i]).sum();
        s.record_bool(a[n] == b[n] && a[n] == conv);
    }
    Ok(s)
}

pub fn suite_lemma_translation(cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("translation lemma", cfg.tolerances.structural);
    for r in collect(cfg, 1, cfg.samples.lemma, |i, rng| {
        let k = cfg.kind(i);
        let tau = sample_tau(rng, 0.3, 3.0);
        let z = sample_z(rng, 2.0);
        let q1 = crate::parabolic::random_lattice_vector(rng, 2);
        let q2 = crate::parabolic::random_lattice_vector(rng, 1);
        verify_lemma_translation(k, tau, &z, &q1, &q2)
    }) {
        s.record(r.map(|r| r.lambda_error.max(r.mu_rel_error)).unwrap_or(f64::INFINITY));
    }
    s
}

pub fn suite_lemma_modular(cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("modular lemma", cfg.tolerances.structural);
    for r in collect(cfg, 2, cfg.samples.lemma, |i, rng| {
        let k = cfg.kind(i);
        let tau = sample_tau(rng, 0.3, 3.0);
        let z = sample_z(rng, 2.0);
        let m = random_sl2(rng, 3);
        verify_lemma_modular(k, tau, &z, m)
    }) {
        s.record(r.map(|r| r.lambda_error.max(r.mu_rel_error)).unwrap_or(f64::INFINITY));
    }
    s
}

/// Automorphy factors case by case: modular, isometry (factor exactly 1)
/// and translation elements.
pub fn suite_factor_cases(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    let tol = cfg.tolerances.structural;
    let cases: [(&str, u32, f64); 3] =
        [("factor: modular", 3, tol), ("factor: isometry", 4, 1e-12_f64.min(tol)), ("factor: translation", 5, tol)];
    for (name, id, t) in cases {
        let mut s = SuiteResult::new(name, t);
        for r in collect(cfg, id, cfg.samples.lemma, |i, rng| -> Result<f64> {
            let k = cfg.kind(i);
            let tau = sample_tau(rng, 0.3, 3.0);
            let z = sample_z(rng, 2.0);
            let g = match id {
                3 => ParabolicElement::modular(k, random_sl2(rng, 3))?,
                4 => ParabolicElement::isometry(k, crate::parabolic::random_isometry(rng, k, 6))?,
                _ => ParabolicElement::translation(
                    k,
                    &crate::parabolic::random_lattice_vector(rng, 2),
                    &crate::parabolic::random_lattice_vector(rng, 1),
                )?,
            };
            let rep = period_automorphy(&g, tau, &z)?;
            if id == 4 {
                // the section itself is invariant: lambda_raw = 0, scale 1
                return Ok(rep.lambda_raw.norm().max((rep.scale - 1.0).norm()).max((rep.mu - 1.0).norm()));
            }
            Ok(rep.lambda_error.max(rep.mu_rel_error))
        }) {
            s.record(r.unwrap_or(f64::INFINITY));
        }
        out.push(s);
    }
    out
}

pub fn suite_automorphy(cfg: &RunConfig) -> Vec<SuiteResult> {
    let mut lam = SuiteResult::new("automorphy: fiber residue integral", cfg.tolerances.structural);
    let mut corrected = SuiteResult::new("automorphy: period factor = character ratio x eta^16 multiplier", cfg.tolerances.automorphy);
    let mut stated = SuiteResult::new("automorphy: period factor = character ratio (multiplier omitted)", cfg.tolerances.automorphy);
    stated.informational = true;
    for r in collect(cfg, 6, cfg.samples.automorphy, |i, rng| automorphy_sample(cfg.kind(i), rng)) {
        match r {
            Ok(a) => {
                lam.record(a.period.lambda_error);
                lam.resampled += a.resampled;
                corrected.record(a.rel_error_with_multiplier);
                stated.record(a.rel_error_stated);
            }
            Err(_) => {
                lam.record(f64::INFINITY);
                corrected.record(f64::INFINITY);
                stated.record(f64::INFINITY);
            }
        }
    }
    corrected.resampled = lam.resampled;
    stated.resampled = lam.resampled;
    vec![lam, corrected, stated]
}

pub fn suite_character(cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("character transformation law", cfg.tolerances.character);
    for r in collect(cfg, 7, cfg.samples.automorphy, |i, rng| -> Result<(f64, usize)> {
        let k = cfg.kind(i);
        let mut resampled = 0;
        loop {
            let p = random_element(rng, k).alpha();
            let tau = sample_tau(rng, 0.3, 3.0);
            let z = sample_z(rng, 2.0);
            if p.act(tau, &z)?.0.im < crate::theta::MIN_IM_TAU {
                resampled += 1;
                continue;
            }
            let rep = verify_character_transform(k, tau, &z, &p)?;
            return Ok((rep.rel_error_with_multiplier, resampled));
        }
    }) {
        match r {
            Ok((e, n)) => {
                s.record(e);
                s.resampled += n;
            }
            Err(_) => s.record(f64::INFINITY),
        }
    }
    s
}

pub fn suite_group(cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("group algebra", 0.0);
    for bad in collect(cfg, 8, cfg.samples.group, |i, rng| {
        let k = cfg.kind(i);
        let (g1, g2, g3) = (random_element(rng, k), random_element(rng, k), random_element(rng, k));
        group_identities(&g1, &g2, &g3).len()
    }) {
        s.record(bad as f64);
    }
    for k in cfg.lattices() {
        s.record(generator_pair_failures(k) as f64);
    }
    s
}

pub fn suite_sections(cfg: &RunConfig) -> Vec<SuiteResult> {
    let tol = cfg.tolerances.structural;
    let mut inv = SuiteResult::new("sections: projection of sigma is the identity", tol.min(1e-12));
    let mut r = SuiteResult::new("sections: r(sigma_n) = 2 Im tau", tol.min(1e-12));
    let mut h = SuiteResult::new("sections: (sigma_n, conj sigma_n) matches convention", tol.min(1e-11));
    let conv = cfg.convention;
    for res in collect(cfg, 9, cfg.samples.sections, |i, rng| -> Result<[f64; 3]> {
        let k = cfg.kind(i);
        let tau = sample_tau(rng, 0.3, 3.0);
        let z = sample_z(rng, 2.0);
        let u = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
        let (t2, z2) = theta_tilde(&perturbed_section(k, tau, &z)?)?;
        let e0 = (t2 - tau).norm().max(z2.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        let sn = narain_section(k, tau, &z, u, conv)?;
        let e1 = (r_value(&sn)? - 2.0 * tau.im).abs();
        let e2 = (pair_conj(&sn) - expected_hermitian(conv, tau, u)).norm();
        Ok([e0, e1, e2])
    }) {
        let e = res.unwrap_or([f64::INFINITY; 3]);
        inv.record(e[0]);
        r.record(e[1]);
        h.record(e[2]);
    }
    vec![inv, r, h]
}

pub fn suite_narain(cfg: &RunConfig) -> Vec<SuiteResult> {
    let tol = cfg.tolerances.gram;
    let mut gram = SuiteResult::new("narain: momenta Gram = H + H + (-Lambda)", tol);
    let mut line = SuiteResult::new("narain: period line isotropic and positive", tol);
    let mut agree = SuiteResult::new("narain: period line = appendix section", cfg.tolerances.structural);
    for res in collect(cfg, 10, cfg.samples.narain, |i, rng| -> Result<[f64; 3]> {
        let k = cfg.kind(i);
        let h = random_triplet(rng, k);
        let g = verify_momenta_gram(&h, tol)?;
        let p = verify_period_line(&h, tol)?;
        let pos = if p.omega_omega_bar.re > 0.0 { 0.0 } else { f64::INFINITY };
        let m = derived_moduli(&h)?;
        let sn = narain_section(k, m.tau, &m.z, m.u, Convention::Appendix)?;
        let (lam, mu) = fiber_coordinate(&period_line(&h)?, &sn)?;
        Ok([g.max_error, p.omega_omega.norm().max(pos), lam.norm().max((mu - 1.0).norm())])
    }) {
        let e = res.unwrap_or([f64::INFINITY; 3]);
        gram.record(e[0]);
        line.record(e[1]);
        agree.record(e[2]);
    }
    vec![gram, line, agree]
}

pub fn suite_families(cfg: &RunConfig) -> Vec<SuiteResult> {
    let tol = cfg.tolerances.torus;
    let mut out = Vec::new();
    for (name, id, category_a) in [("families: category (a)", 11u32, true), ("families: category (b)", 12, false)] {
        let mut s = SuiteResult::new(name, tol);
        let mut perturbed = SuiteResult::new(&format!("{name} perturbed point detected"), 0.0);
        for res in collect(cfg, id, cfg.samples.family, |_, rng| -> Result<(f64, bool)> {
            let tau = sample_tau(rng, 0.3, 3.0);
            let psi: Vec<ComplexTorusPoint> = (0..16)
                .map(|_| ComplexTorusPoint::new(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), tau))
                .collect::<Result<_>>()?;
            let choice = RootChoice { first: (rng.gen_range(0..3), rng.gen_range(0..3)), q0: (rng.gen_range(0..6), rng.gen_range(0..6)) };
            let fam = if category_a { construct_family_a(tau, &psi, choice)? } else { construct_family_b(tau, &psi, choice)? };
            let rep = verify_special_family(&fam, tol)?;
            let mut bad = fam.clone();
            let j = rng.gen_range(0..18);
            bad.points[j] += 0.1;
            let detected = !verify_special_family(&bad, tol)?.pass;
            Ok((rep.max_error, detected))
        }) {
            match res {
                Ok((e, d)) => {
                    s.record(e);
                    perturbed.record_bool(d);
                }
                Err(_) => {
                    s.record(f64::INFINITY);
                    perturbed.record_bool(false);
                }
            }
        }
        out.push(s);
        out.push(perturbed);
    }
    out
}

pub fn suite_eta(cfg: &RunConfig) -> SuiteResult {
    let mut s = SuiteResult::new("eta: product = pentagonal series", cfg.tolerances.eta);
    let at_i = (eta(C64::new(0.0, 1.0)).unwrap() - eta_series(C64::new(0.0, 1.0)).unwrap()).norm();
    s.record(at_i);
    for e in collect(cfg, 13, 100, |_, rng| {
        let tau = sample_tau(rng, 0.3, 3.0);
        let a = eta(tau).unwrap();
        (a - eta_series(tau).unwrap()).norm() / a.norm()
    }) {
        s.record(e);
    }
    s
}

/// Runs every suite.
pub fn verify_all(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut suites = vec![suite_classification(cfg), suite_theta_counts(cfg)?, suite_eta(cfg)];
    suites.push(suite_lemma_translation(cfg));
    suites.push(suite_lemma_modular(cfg));
    suites.extend(suite_factor_cases(cfg));
    suites.extend(suite_automorphy(cfg));
    suites.push(suite_character(cfg));
    suites.push(suite_group(cfg));
    suites.extend(suite_sections(cfg));
    suites.extend(suite_narain(cfg));
    suites.extend(suite_families(cfg));
    let pass = suites.iter().all(|s| s.pass || s.informational);
    Ok(VerifyReport { seed: cfg.seed, lattices: cfg.lattices(), convention: cfg.convention, suites, pass })
}
