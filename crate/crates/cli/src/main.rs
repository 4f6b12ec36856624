use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rado_core::bounds::{bounds_csv, bounds_table, kl_upper_optimize};
use rado_core::constructions::{
    ajtai_almost_counterexample, ajtai_rectangle, ball_net, compose_ajtai, default_placements, four_squares,
    pinwheel, probe_random_maximal, rect_from_label, translate_net, verify_with, Rect,
};
use rado_core::experiment::{run_experiment, ExperimentSpec, RadiusModel};
use rado_core::geometry::{BodyKind, UnionConfig};
use rado_core::selectors::{select, Algorithm, SelectOptions};
use rado_core::{Collection, Oracle};

const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_CERTIFICATE: u8 = 4;

#[derive(Parser)]
#[command(name = "rado", version, about = "Disjoint subcollections of homothetic bodies")]
struct Cli {
    /// Seed for Monte Carlo unions and random constructions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit JSON, to PATH or stdout.
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    json: Option<Option<PathBuf>>,
    /// Emit CSV, to PATH or stdout.
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    csv: Option<Option<PathBuf>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a selection algorithm on a collection.
    Select {
        #[arg(long)]
        algo: Algorithm,
        file: PathBuf,
        /// Lattice slack for the Blichfeldt selector.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
    },
    /// Exact maximum-volume disjoint subcollection.
    Oracle {
        file: PathBuf,
        /// Indices that may not be chosen.
        #[arg(long, value_delimiter = ',')]
        forbid: Vec<usize>,
    },
    /// Table of named bounds for d = 1..=dmax.
    Bounds {
        #[arg(long, default_value_t = 20)]
        dmax: usize,
    },
    /// Minimise the Kabatiansky-Levenshtein exponent objective.
    Kl {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Write one of the built-in collections.
    Construct {
        #[command(subcommand)]
        family: Family,
        /// Output file; stdout when absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Check the two almost-counterexample properties of a square collection.
    VerifyAjtai {
        file: PathBuf,
        /// Enclosing rectangle; read from the collection label when absent.
        #[arg(long, value_name = "x0,y0,x1,y1", allow_hyphen_values = true)]
        rect: Option<Rect>,
        /// Sample this many random maximal subcollections instead of solving
        /// exactly; no rectangle is needed.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Compare selectors with the oracle on seeded random ensembles.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum Family {
    FourSquares,
    TranslateNet {
        #[arg(long, value_enum, default_value_t = Kind::Box)]
        kind: Kind,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 2000)]
        n: usize,
    },
    Pinwheel {
        #[arg(long, default_value_t = 16)]
        n: usize,
    },
    BallNet {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        radius: f64,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    Ajtai,
    AjtaiComposed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Box,
    Ball,
}

impl From<Kind> for BodyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Box => BodyKind::AxisBox,
            Kind::Ball => BodyKind::Ball,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment spec as JSON; overrides the flags below.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = Kind::Box)]
    kind: Kind,
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// equal:R, uniform:LO,HI, two-scale:R1,R2 or lacunary:BASE,LEVELS
    #[arg(long, default_value = "equal:0.5", value_parser = parse_radius_model)]
    radii: RadiusModel,
    #[arg(long, default_value_t = 2.0)]
    center_box: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "greedy,sweep,multiscale")]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 14)]
    oracle_max_n: usize,
}

fn parse_radius_model(s: &str) -> Result<RadiusModel, String> {
    let (name, args) = s.split_once(':').ok_or("expected MODEL:PARAMS")?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match (name, nums.as_slice()) {
        ("equal", &[radius]) => Ok(RadiusModel::Equal { radius }),
        ("uniform", &[lo, hi]) => Ok(RadiusModel::Uniform { lo, hi }),
        ("two-scale", &[r1, r2]) => Ok(RadiusModel::TwoScale { r1, r2 }),
        ("lacunary", &[base, levels]) if levels >= 1.0 && levels.fract() == 0.0 => Ok(RadiusModel::Lacunary {
            base,
            levels: levels as u32,
        }),
        _ => Err(format!("unrecognised radius model {s:?}")),
    }
}

/// A certificate check failed outside the core library.
#[derive(Debug)]
struct CertificateFailure(String);

impl std::fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CertificateFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<CertificateFailure>().is_some() {
        return EXIT_CERTIFICATE;
    }
    match err.downcast_ref::<rado_core::Error>() {
        Some(e) if e.is_resource_limit() => EXIT_RESOURCE,
        Some(rado_core::Error::Certificate(_)) => EXIT_CERTIFICATE,
        _ => EXIT_INPUT,
    }
}

struct Output {
    json: Option<Option<PathBuf>>,
    csv: Option<Option<PathBuf>>,
}

fn write_to(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

impl Output {
    /// JSON when requested, otherwise the human-readable text.
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        match &self.json {
            Some(path) => write_to(path, &(serde_json::to_string_pretty(value)? + "\n")),
            None => write_to(&None, &text()),
        }
    }
}

fn read_collection(path: &Path) -> Result<Collection> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Collection::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn union_config(seed: Option<u64>) -> UnionConfig {
    let mut cfg = UnionConfig::default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg
}

fn fmt_indices(ix: &[usize]) -> String {
    ix.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<()> {
    let out = Output {
        json: cli.json,
        csv: cli.csv,
    };
    let seed = cli.seed;
    match cli.command {
        Command::Select { algo, file, eps } => {
            let c = read_collection(&file)?;
            let opts = SelectOptions {
                eps,
                union: union_config(seed),
                ..SelectOptions::default()
            };
            let r = select(&c, algo, &opts)?;
            out.emit(&r, || {
                format!(
                    "{}: {} of {} bodies, density {:.6} (guarantee {:.6}), union {:.6} +/- {:.2e}\nchosen {}\n",
                    r.algorithm,
                    r.chosen.len(),
                    c.len(),
                    r.density,
                    r.guarantee,
                    r.union_volume.value,
                    r.union_volume.abs_error,
                    fmt_indices(&r.chosen)
                )
            })
        }
        Command::Oracle { file, forbid } => {
            let c = read_collection(&file)?;
            if let Some(&i) = forbid.iter().find(|&&i| i >= c.len()) {
                bail!("forbidden index {i} out of range for {} bodies", c.len());
            }
            let r = Oracle::default()
                .with_union(union_config(seed))
                .max_disjoint_volume(&c, &forbid)?;
            out.emit(&r, || {
                format!(
                    "delta {:.9}: {} bodies, volume {:.9} of union {:.9} ({} nodes)\nchosen {}\n",
                    r.delta,
                    r.chosen.len(),
                    r.selected_volume,
                    r.union_volume.value,
                    r.nodes_explored,
                    fmt_indices(&r.chosen)
                )
            })
        }
        Command::Bounds { dmax } => {
            let rows = bounds_table(dmax)?;
            if let Some(path) = &out.csv {
                return write_to(path, &bounds_csv(&rows));
            }
            out.emit(&rows, || {
                rows.iter()
                    .map(|b| format!("{:<16} d={:<3} {:<12.6e} {}\n", b.name, b.d, b.value, b.side.as_str()))
                    .collect()
            })
        }
        Command::Kl { tol } => {
            let r = kl_upper_optimize(tol)?;
            out.emit(&r, || {
                format!(
                    "objective {:.7} at theta {:.5}, r* {:.5}, f(B^d) <= {:.5}^(-d+o(d))\n",
                    r.objective_min, r.theta_star, r.r_star, r.base
                )
            })
        }
        Command::Construct { family, output } => {
            let seed = seed.unwrap_or(0);
            let c = match family {
                Family::FourSquares => four_squares(),
                Family::TranslateNet { kind, dim, n } => translate_net(kind.into(), dim, n, seed)?,
                Family::Pinwheel { n } => pinwheel(n)?,
                Family::BallNet { dim, radius, n } => ball_net(dim, radius, n, seed)?,
                Family::Ajtai => ajtai_almost_counterexample()?,
                Family::AjtaiComposed => {
                    compose_ajtai(&ajtai_almost_counterexample()?, &default_placements(&ajtai_rectangle()?))?
                }
            };
            write_to(&output, &(c.to_json() + "\n"))
        }
        Command::VerifyAjtai { file, rect, samples } => {
            let c = read_collection(&file)?;
            if let Some(samples) = samples {
                let r = probe_random_maximal(&c, samples, seed.unwrap_or(0))?;
                return out.emit(&r, || {
                    format!(
                        "{} random maximal subcollections: best density {:.6}, mean {:.6}, below 1/4: {}\n",
                        r.samples,
                        r.best_density,
                        r.mean_density,
                        r.best_density < 0.25
                    )
                });
            }
            let rect = match rect {
                Some(r) => r,
                None => rect_from_label(c.label())
                    .ok_or_else(|| anyhow!("no --rect given and the collection label names none"))?,
            };
            let r = verify_with(&c, &rect, &Oracle::default())?;
            out.emit(&r, || {
                format!(
                    "R = {rect}, area {:.6}\nproperty 1 (no disjoint subcollection above 1/4): {} (best {:.6})\n\
                     property 2 (strictly below 1/4 avoiding the bottom row): {} (best {:.6})\n",
                    r.total_area,
                    r.property1_holds,
                    r.best_unconstrained.delta,
                    r.property2_holds,
                    r.best_constrained.delta
                )
            })
        }
        Command::Bench(args) => {
            let mut spec = match &args.spec {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<ExperimentSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => ExperimentSpec {
                    dimension: args.dim,
                    kind: args.kind.into(),
                    n_bodies: args.n,
                    radius_model: args.radii,
                    center_box: args.center_box,
                    trials: args.trials,
                    seed: 0,
                    algorithms: args.algos,
                    oracle_max_n: args.oracle_max_n,
                    options: SelectOptions::default(),
                },
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            let report = run_experiment(&spec)?;
            match (&out.json, &out.csv) {
                (Some(path), _) => write_to(path, &(serde_json::to_string_pretty(&report)? + "\n"))?,
                (None, path) => write_to(&path.clone().flatten(), &report.to_csv(false))?,
            }
            for s in &report.summary {
                eprintln!(
                    "{:<11} runs {:>4} failures {:>3} min {} mean {} worst/oracle {}",
                    s.algorithm.as_str(),
                    s.runs,
                    s.failures,
                    opt(s.min_density),
                    opt(s.mean_density),
                    opt(s.worst_ratio_to_oracle)
                );
            }
            let (cert, viol) = (report.certificate_failures(), report.oracle_violations());
            if cert + viol > 0 {
                return Err(CertificateFailure(format!(
                    "{cert} certificate failures, {viol} rows above the oracle"
                ))
                .into());
            }
            Ok(())
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
