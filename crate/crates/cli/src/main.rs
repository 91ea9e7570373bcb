use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use narain_lab::family::{
    construct_family_a, construct_family_b, verify_special_family, Category, ComplexTorusPoint, RootChoice,
    SpecialFamily, TORUS_TOL,
};
use narain_lab::lattice::{LambdaKind, LatticeLabel};
use narain_lab::narain::{derived_moduli, period_line, verify_momenta_gram, verify_period_line, HeteroticTriplet};
use narain_lab::parabolic::ParabolicElement;
use narain_lab::period::Convention;
use narain_lab::sweep::{verify_all, RunConfig, SampleCounts, Tolerances};
use narain_lab::theta::{character, character_q_expansion, q_expansion, theta_lattice};
use narain_lab::ExecMode;
use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "narain-lab", version, about = "Lattice, period and theta-character verification tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite and print a JSON report.
    VerifyAll(VerifyArgs),
    /// Theta functions and characters.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Special families of points on an elliptic curve.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Narain momenta lattices.
    #[command(subcommand)]
    Narain(NarainCmd),
    /// Elements of the parabolic group, read from JSON files.
    #[command(subcommand)]
    Group(GroupCmd),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file with a full or partial run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count used for every randomized suite.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance applied to every suite.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Restrict to one lattice (e8e8 or gamma16).
    #[arg(long)]
    lattice: Option<LambdaKind>,
    #[arg(long)]
    convention: Option<Convention>,
    /// Run the sweeps on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Series {
    Theta,
    Character,
}

#[derive(Subcommand)]
enum ThetaCmd {
    /// Evaluate Theta and B = Theta / eta^16 at (tau, z).
    Eval {
        #[arg(long)]
        lattice: LambdaKind,
        /// tau as RE,IM
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: C64,
        /// JSON list of 16 [re, im] pairs in basis coordinates; zero when absent.
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Exact q-expansion as CSV.
    Qexp {
        #[arg(long)]
        lattice: LatticeLabel,
        #[arg(long)]
        order: i64,
        #[arg(long, value_enum, default_value = "theta")]
        series: Series,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Build a special family from the 16 values of psi on the simple roots.
    Construct {
        #[arg(long)]
        category: Category,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau: C64,
        /// JSON list of 16 [re, im] pairs.
        #[arg(long)]
        psi: PathBuf,
        /// Preimage choice J,K for the first division by 3.
        #[arg(long, value_parser = parse_pair, default_value = "0,0")]
        root: (i64, i64),
        /// Preimage choice J,K for the division giving q0.
        #[arg(long, value_parser = parse_pair, default_value = "0,0")]
        q0_root: (i64, i64),
    },
    /// Check the defining conditions of a family JSON file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = TORUS_TOL)]
        tolerance: f64,
    },
}

#[derive(Subcommand)]
enum NarainCmd {
    /// Gram matrix of the momenta basis and the period line checks.
    Gram {
        #[arg(long, default_value = "e8e8")]
        lattice: LambdaKind,
        /// g11,g12,g22
        #[arg(long, value_parser = parse_metric, allow_hyphen_values = true)]
        metric: [f64; 3],
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// JSON [[16 reals], [16 reals]]: A(e1) and A(e2) in basis coordinates; zero when absent.
        #[arg(long)]
        wilson: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Product g1 g2.
    Mul { g1: PathBuf, g2: PathBuf },
    /// Inverse element.
    Inv { g: PathBuf },
    /// Factorization g = t w s.
    Factorize { g: PathBuf },
    /// Induced automorphism of H x Lambda_C.
    Alpha { g: PathBuf },
    /// Validity and subgroup membership.
    Check { g: PathBuf },
}

/// Reasons to stop with a nonzero status.
enum Failure {
    /// Bad arguments or input files: exit 2.
    Usage(String),
    /// A verification ran and did not pass: exit 1.
    Verification,
}

type CliResult = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let v = parse_floats(s, 2)?;
    Ok(C64::new(v[0], v[1]))
}

fn parse_metric(s: &str) -> Result<[f64; 3], String> {
    let v = parse_floats(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let v: Vec<i64> = s.split(',').map(|t| t.trim().parse::<i64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err("expected J,K".into()),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn verdict(pass: bool) -> CliResult {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_verify_all(a: VerifyArgs) -> CliResult {
    let mut cfg: RunConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.samples {
        cfg.samples = SampleCounts::uniform(n);
    }
    if let Some(t) = a.tolerance {
        cfg.tolerances = Tolerances::uniform(t);
    }
    if a.lattice.is_some() {
        cfg.lattice = a.lattice;
    }
    if let Some(c) = a.convention {
        cfg.convention = c;
    }
    if a.sequential {
        cfg.mode = ExecMode::Sequential;
    }
    cfg.validate().map_err(usage)?;
    let report = verify_all(&cfg).map_err(usage)?;
    print_json(&report);
    verdict(report.pass)
}

#[derive(Serialize)]
struct ThetaValue {
    lattice: LambdaKind,
    tau: C64,
    theta: C64,
    character: C64,
}

fn cmd_theta(c: ThetaCmd) -> CliResult {
    match c {
        ThetaCmd::Eval { lattice, tau, z } => {
            let z: Vec<C64> = match z {
                Some(p) => read_json(&p)?,
                None => vec![C64::new(0.0, 0.0); 16],
            };
            let theta = theta_lattice(lattice, tau, &z).map_err(usage)?;
            let ch = character(lattice, tau, &z).map_err(usage)?;
            print_json(&ThetaValue { lattice, tau, theta, character: ch });
        }
        ThetaCmd::Qexp { lattice, order, series } => {
            let e = match series {
                Series::Theta => q_expansion(lattice, order),
                Series::Character => character_q_expansion(lattice, order),
            }
            .map_err(usage)?;
            print!("{}", e.to_csv());
        }
    }
    Ok(())
}

fn cmd_family(c: FamilyCmd) -> CliResult {
    match c {
        FamilyCmd::Construct { category, tau, psi, root, q0_root } => {
            let vals: Vec<C64> = read_json(&psi)?;
            let pts: Vec<ComplexTorusPoint> =
                vals.into_iter().map(|v| ComplexTorusPoint::new(v, tau)).collect::<Result<_, _>>().map_err(usage)?;
            let choice = RootChoice { first: root, q0: q0_root };
            let fam = match category {
                Category::A => construct_family_a(tau, &pts, choice),
                Category::B => construct_family_b(tau, &pts, choice),
            }
            .map_err(usage)?;
            print_json(&fam);
            Ok(())
        }
        FamilyCmd::Verify { file, tolerance } => {
            let fam: SpecialFamily = read_json(&file)?;
            let rep = verify_special_family(&fam, tolerance).map_err(usage)?;
            print_json(&rep);
            verdict(rep.pass)
        }
    }
}

#[derive(Serialize)]
struct NarainReport {
    gram: narain_lab::narain::GramReport,
    period_line: narain_lab::narain::PeriodLineReport,
    moduli: narain_lab::narain::DerivedModuli,
    omega: Vec<C64>,
    pass: bool,
}

fn cmd_narain(c: NarainCmd) -> CliResult {
    let NarainCmd::Gram { lattice, metric, b, wilson, tolerance } = c;
    let wilson: [Vec<f64>; 2] = match wilson {
        Some(p) => read_json(&p)?,
        None => [vec![0.0; 16], vec![0.0; 16]],
    };
    let [g11, g12, g22] = metric;
    let h = HeteroticTriplet::new(lattice, [[g11, g12], [g12, g22]], b, wilson).map_err(usage)?;
    let gram = verify_momenta_gram(&h, tolerance).map_err(usage)?;
    let line = verify_period_line(&h, tolerance).map_err(usage)?;
    let omega = period_line(&h).map_err(usage)?.v.components().collect();
    let pass = gram.pass && line.pass;
    let moduli = derived_moduli(&h).map_err(usage)?;
    print_json(&NarainReport { gram, period_line: line, moduli, omega, pass });
    verdict(pass)
}

fn read_element(p: &Path) -> Result<ParabolicElement, Failure> {
    let g: ParabolicElement = read_json(p)?;
    g.validate().map_err(|e| usage(format!("{}: {e}", p.display())))?;
    Ok(g)
}

#[derive(Serialize)]
struct Factorization {
    t: ParabolicElement,
    w: ParabolicElement,
    s: ParabolicElement,
}

fn cmd_group(c: GroupCmd) -> CliResult {
    match c {
        GroupCmd::Mul { g1, g2 } => {
            let p = read_element(&g1)?.multiply(&read_element(&g2)?).map_err(usage)?;
            print_json(&p);
        }
        GroupCmd::Inv { g } => print_json(&read_element(&g)?.inverse()),
        GroupCmd::Factorize { g } => {
            let (t, w, s) = read_element(&g)?.factorize();
            print_json(&Factorization { t, w, s });
        }
        GroupCmd::Alpha { g } => print_json(&read_element(&g)?.alpha()),
        GroupCmd::Check { g } => print_json(&read_element(&g)?.membership()),
    }
    Ok(())
}

fn main() -> ExitCode {
    narain_lab::exec::init_threads_from_env();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::VerifyAll(a) => cmd_verify_all(a),
        Command::Theta(c) => cmd_theta(c),
        Command::Family(c) => cmd_family(c),
        Command::Narain(c) => cmd_narain(c),
        Command::Group(c) => cmd_group(c),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
