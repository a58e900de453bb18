use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ccm_core::io::{self, num, point_value, Report, Status};
use ccm_core::spherical::{spherical_ccm_chain, spherical_terms};
use ccm_core::verify::{self, SuiteConfig, SuiteOutcome};
use ccm_core::{Chain, GeomError, Point, WeightedCenter};

#[derive(Parser)]
#[command(
    name = "ccm",
    version,
    about = "Circumcenter of mass of simplicial chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ApexArg {
    /// Filling apex for (n-1)-cycles, as comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    apex: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Power of every simplex in the chain, in both closed forms.
    Pow {
        file: PathBuf,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, required_if_eq("oracle", "mc"))]
        seed: Option<u64>,
        /// Relative tolerance between the closed forms.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Allowed Monte Carlo deviation in standard errors.
        #[arg(long, default_value_t = 4.0)]
        sigmas: f64,
    },
    /// Circumcenter of mass; an (n-1)-cycle is filled first.
    Ccm {
        file: PathBuf,
        #[command(flatten)]
        apex: ApexArg,
    },
    /// Centroid of mass; an (n-1)-cycle is filled first.
    Centroid {
        file: PathBuf,
        #[command(flatten)]
        apex: ApexArg,
    },
    /// Euler-line point at parameter t; an (n-1)-cycle is filled first.
    Euler {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        apex: ApexArg,
    },
    /// Cone filling of a cycle.
    Fill {
        file: PathBuf,
        #[command(flatten)]
        apex: ApexArg,
    },
    /// Boundary chain.
    Boundary { file: PathBuf },
    /// Passes iff the chain has zero boundary.
    IsCycle { file: PathBuf },
    /// Spherical circumcenter of mass of a chain on the unit sphere.
    SphereCcm { file: PathBuf },
    /// Chordal mass identity for every term of a spherical chain.
    SphereIdentity {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Randomized property suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    PowForms,
    PowMc,
    Lemma,
    CycleMoments,
    FillingIndependence,
    EquilateralPolygon,
    EquilateralPolytope,
    Minkowski,
    Inscribed,
    SphericalCycle,
    ChordalIdentity,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long)]
    seed: u64,
    /// Restrict to one dimension (suites with a dimension range only).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Monte Carlo samples per simplex (pow-mc only).
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
}

struct SuiteDefaults {
    name: &'static str,
    dims: &'static [usize],
    trials: usize,
    tol: f64,
}

fn defaults(suite: Suite) -> SuiteDefaults {
    let (name, dims, trials, tol): (_, &'static [usize], _, _) = match suite {
        Suite::PowForms => ("pow-forms", &[1, 2, 3, 4, 5, 6], 1000, 1e-10),
        Suite::PowMc => ("pow-mc", &[1, 2, 3, 4], 50, 4.0),
        Suite::Lemma => ("lemma", &[2, 3, 4, 5], 1000, 1e-9),
        Suite::CycleMoments => ("cycle-moments", &[2, 3], 200, 1e-9),
        Suite::FillingIndependence => ("filling-independence", &[2, 3], 200, 1e-9),
        Suite::EquilateralPolygon => ("equilateral-polygon", &[], 200, 1e-9),
        Suite::EquilateralPolytope => ("equilateral-polytope", &[], 10, 1e-9),
        Suite::Minkowski => ("minkowski", &[], 100, 1e-9),
        Suite::Inscribed => ("inscribed", &[2, 3], 100, 1e-9),
        Suite::SphericalCycle => ("spherical-cycle", &[], 100, 1e-9),
        Suite::ChordalIdentity => ("chordal-identity", &[1, 2, 3, 4], 500, 1e-10),
    };
    SuiteDefaults {
        name,
        dims,
        trials,
        tol,
    }
}

/// Command failure: exit code 2 with an error report.
struct Failure(String);

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure(e.to_string())
    }
}

fn read_chain(path: &Path) -> Result<Chain, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    io::parse_chain(&bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn apex_point(apex: &ApexArg) -> Result<Option<Point>, Failure> {
    apex.apex
        .clone()
        .map(Point::new)
        .transpose()
        .map_err(Failure::from)
}

/// The chain itself, or its cone filling when it is an (n-1)-cycle.
fn solid(chain: &Chain, apex: &Option<Point>) -> Result<Chain, Failure> {
    if chain.intrinsic_dim() + 1 == chain.ambient_dim() && !chain.is_empty() && chain.is_cycle() {
        Ok(chain.fill(apex.as_ref())?)
    } else if apex.is_some() {
        Err(Failure("--apex applies only to (n-1)-cycles".into()))
    } else {
        Ok(chain.clone())
    }
}

fn center_results(report: &mut Report, w: &WeightedCenter) {
    report.result("weight", num(w.weight));
    report.result(
        "moment",
        Value::Array(w.moment.components().iter().map(|&x| num(x)).collect()),
    );
    report.result("point", w.point.as_ref().map_or(Value::Null, point_value));
}

fn chain_value(chain: &Chain) -> Value {
    serde_json::to_value(io::ChainDocument::from_chain(chain)).expect("chain document is JSON")
}

fn file_input(report: &mut Report, file: &Path) {
    report.input("file", file.display().to_string());
}

fn apex_input(report: &mut Report, apex: &Option<Point>) {
    if let Some(p) = apex {
        report.input("apex", point_value(p));
    }
}

fn run(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Pow {
            file,
            oracle,
            samples,
            seed,
            tol,
            sigmas,
        } => {
            let mut r = Report::new("pow");
            file_input(&mut r, file);
            r.tolerance("relative", *tol);
            let chain = read_chain(file)?;
            let mc_seed = match oracle {
                Some(Oracle::Mc) => {
                    let seed = seed.ok_or_else(|| Failure("--oracle mc requires --seed".into()))?;
                    r.input("oracle", "mc")
                        .input("samples", *samples as u64)
                        .input("seed", seed);
                    r.tolerance("sigmas", *sigmas);
                    Some(seed)
                }
                None => None,
            };
            let mut terms = Vec::new();
            let mut pass = true;
            let (mut max_rel, mut max_z) = (0.0_f64, 0.0_f64);
            for (i, term) in chain.terms().iter().enumerate() {
                let s = chain.simplex(term)?;
                let edges = s.pow_edges();
                let circ = s.pow_circum()?;
                let rel = if edges == circ {
                    0.0
                } else {
                    (edges - circ).abs() / edges.abs().max(circ.abs())
                };
                max_rel = max_rel.max(rel);
                let mut entry = json!({
                    "vertices": term.vertices,
                    "pow_edges": num(edges),
                    "pow_circum": num(circ),
                    "relative_difference": num(rel),
                });
                pass &= rel <= *tol && (s.intrinsic_dim() == 0 || edges < 0.0);
                if let Some(seed) = mc_seed {
                    let est = s.pow_mc(*samples, seed.wrapping_add(i as u64))?;
                    let z = est.z_score(edges);
                    max_z = max_z.max(z);
                    entry["mc_mean"] = num(est.mean);
                    entry["mc_std_error"] = num(est.std_error);
                    entry["z_score"] = num(z);
                    entry["agrees"] = Value::Bool(z <= *sigmas);
                    pass &= z <= *sigmas;
                }
                terms.push(entry);
            }
            r.result("terms", Value::Array(terms));
            r.result("max_relative_difference", num(max_rel));
            if mc_seed.is_some() {
                r.result("max_z_score", num(max_z));
            }
            r.status = if pass { Status::Pass } else { Status::Fail };
            Ok(r)
        }
        Command::Ccm { file, apex }
        | Command::Centroid { file, apex }
        | Command::Euler { file, apex, .. } => {
            let apex = apex_point(apex)?;
            let chain = read_chain(file)?;
            let body = solid(&chain, &apex)?;
            let (name, w) = match command {
                Command::Ccm { .. } => ("ccm", body.ccm()?),
                Command::Centroid { .. } => ("centroid", body.centroid_of_mass()?),
                Command::Euler { t, .. } => ("euler", body.euler_point(*t)?),
                _ => unreachable!(),
            };
            let mut r = Report::new(name);
            file_input(&mut r, file);
            apex_input(&mut r, &apex);
            if let Command::Euler { t, .. } = command {
                r.input("t", num(*t));
            }
            r.result("filled", body.intrinsic_dim() != chain.intrinsic_dim());
            center_results(&mut r, &w);
            Ok(r)
        }
        Command::Fill { file, apex } => {
            let apex = apex_point(apex)?;
            let chain = read_chain(file)?;
            let filling = chain.fill(apex.as_ref())?;
            let residual = filling.boundary()?.minus(&chain)?.canonicalize();
            let mut r = Report::new("fill");
            file_input(&mut r, file);
            apex_input(&mut r, &apex);
            r.result("chain", chain_value(&filling));
            r.result("boundary_matches", residual.is_empty());
            r.status = if residual.is_empty() {
                Status::Pass
            } else {
                Status::Fail
            };
            Ok(r)
        }
        Command::Boundary { file } => {
            let chain = read_chain(file)?;
            let mut r = Report::new("boundary");
            file_input(&mut r, file);
            r.result("chain", chain_value(&chain.boundary()?));
            Ok(r)
        }
        Command::IsCycle { file } => {
            let chain = read_chain(file)?;
            let cycle = chain.is_cycle();
            let mut r = Report::new("is-cycle");
            file_input(&mut r, file);
            r.result("is_cycle", cycle);
            r.status = if cycle { Status::Pass } else { Status::Fail };
            Ok(r)
        }
        Command::SphereCcm { file } => {
            let chain = read_chain(file)?;
            let m = spherical_ccm_chain(&chain)?;
            let mut r = Report::new("sphere-ccm");
            file_input(&mut r, file);
            r.result(
                "vector",
                Value::Array(m.vector.components().iter().map(|&x| num(x)).collect()),
            );
            r.result("mass", num(m.mass));
            r.result(
                "center",
                m.center
                    .as_ref()
                    .map_or(Value::Null, |c| point_value(&c.to_point())),
            );
            Ok(r)
        }
        Command::SphereIdentity { file, tol } => {
            let chain = read_chain(file)?;
            let mut r = Report::new("sphere-identity");
            file_input(&mut r, file);
            r.tolerance("relative", *tol);
            let mut worst = 0.0_f64;
            let mut rows = Vec::new();
            for (s, _) in spherical_terms(&chain)? {
                let (mass, chordal) = s.chordal_mass_identity()?;
                let rel = (mass - chordal).abs() / mass.abs().max(chordal.abs());
                worst = worst.max(rel);
                rows.push(json!({ "mass": num(mass), "chordal": num(chordal), "relative_difference": num(rel) }));
            }
            r.result("terms", Value::Array(rows));
            r.result("max_relative_difference", num(worst));
            r.status = if worst <= *tol {
                Status::Pass
            } else {
                Status::Fail
            };
            Ok(r)
        }
        Command::Verify(args) => run_verify(args),
    }
}

fn run_verify(args: &VerifyArgs) -> Result<Report, Failure> {
    let d = defaults(args.suite);
    let dims: Vec<usize> = match args.dim {
        None => d.dims.to_vec(),
        Some(_) if d.dims.is_empty() => {
            return Err(Failure(format!("suite {} has no --dim option", d.name)));
        }
        Some(k) if d.dims.contains(&k) => vec![k],
        Some(k) => {
            return Err(Failure(format!(
                "suite {} supports dimensions {:?}, not {k}",
                d.name, d.dims
            )))
        }
    };
    let cfg = SuiteConfig {
        trials: args.trials.unwrap_or(d.trials),
        seed: args.seed,
        tol: args.tol.unwrap_or(d.tol),
    };
    let outcome: SuiteOutcome = match args.suite {
        Suite::PowForms => verify::pow_forms(&cfg, &dims)?,
        Suite::PowMc => verify::pow_mc(&cfg, &dims, args.samples)?,
        Suite::Lemma => verify::lemma(&cfg, &dims)?,
        Suite::CycleMoments => verify::cycle_moments(&cfg, &dims)?,
        Suite::FillingIndependence => verify::filling_independence(&cfg, &dims)?,
        Suite::EquilateralPolygon => verify::equilateral_polygon(&cfg)?,
        Suite::EquilateralPolytope => verify::equilateral_polytope(&cfg)?,
        Suite::Minkowski => verify::minkowski(&cfg)?,
        Suite::Inscribed => verify::inscribed(&cfg, &dims)?,
        Suite::SphericalCycle => verify::spherical_cycle(&cfg)?,
        Suite::ChordalIdentity => verify::chordal_identity(&cfg, &dims)?,
    };
    let mut r = Report::new(format!("verify {}", d.name));
    r.input("seed", cfg.seed).input("trials", cfg.trials as u64);
    if !dims.is_empty() {
        r.input("dims", dims.iter().map(|&k| k as u64).collect::<Vec<_>>());
    }
    if args.suite == Suite::PowMc {
        r.input("samples", args.samples as u64);
    }
    r.tolerance("tol", cfg.tol);
    r.result("trials", outcome.trials as u64);
    r.result("failures", outcome.failures as u64);
    r.result("max_residual", num(outcome.max_residual));
    r.result("max_ratio", num(outcome.max_ratio));
    r.status = if outcome.passed() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(r)
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Pow { .. } => "pow",
        Command::Ccm { .. } => "ccm",
        Command::Centroid { .. } => "centroid",
        Command::Euler { .. } => "euler",
        Command::Fill { .. } => "fill",
        Command::Boundary { .. } => "boundary",
        Command::IsCycle { .. } => "is-cycle",
        Command::SphereCcm { .. } => "sphere-ccm",
        Command::SphereIdentity { .. } => "sphere-identity",
        Command::Verify(_) => "verify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            let mut r = Report::new(command_name(&cli.command));
            r.result("error", msg);
            r.status = Status::Error;
            r
        }
    };
    eprintln!("{}: {:?}", report.command, report.status);
    let bytes = io::serialize_report(&report);
    if let Err(e) = std::io::Write::write_all(&mut std::io::stdout().lock(), &bytes) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.status.exit_code() as u8)
}
