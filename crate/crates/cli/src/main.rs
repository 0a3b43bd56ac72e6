//! `lefschetz` command-line front end.
//!
//! Exit codes: 0 every asserted identity holds, 1 an identity failed,
//! 2 usage or sampling error, 3 excluded planes leave an identity open,
//! 4 the variety file could not be read or parsed.

mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lefschetz::geom::{self, GeomError, VarietySpec};
use lefschetz::lring::{invert_poly, LSeries, Rat};
use lefschetz::motivic::{class_by_name, MotivicError};
use lefschetz::params::{ParamSet, Regime};
use lefschetz::yfy::{self, FamilyEntry, Verdict, YfyError};

use render::{Format, Output};

#[derive(Parser, Debug)]
#[command(name = "lefschetz", version, about = "Point-count checks of Y-F(Y) type relations over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a catalog class, e.g. "G(2,5)", "Sym(3,P(2))", "K(2,3,4)".
    Class {
        name: String,
        /// Evaluate at these q.
        #[arg(long, value_delimiter = ',')]
        q: Vec<i64>,
        /// Divide by another class in the completion.
        #[arg(long)]
        divide_by: Option<String>,
        /// Completion depth for --divide-by.
        #[arg(long, default_value_t = 32)]
        depth: i64,
    },
    /// Point counts of a variety over F_{q^e}.
    Count {
        #[command(flatten)]
        var: VarietyArg,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
        /// Also count lines contained in Y.
        #[arg(long)]
        lines: bool,
        /// Emit the orbit profile of every (n-m)-plane instead (CSV only).
        #[arg(long)]
        profiles: bool,
    },
    /// Sym^2 and Hilb^2 forms of the classical relation for a cubic.
    VerifyClassic {
        #[command(flatten)]
        var: VarietyArg,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
    },
    /// W - B - A = V - R - T and the per-plane complement bijection.
    VerifyExtended {
        #[command(flatten)]
        var: VarietyArg,
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
    },
    /// The tuple-partition identities (low-degree regime only).
    VerifyPartition {
        #[command(flatten)]
        var: VarietyArg,
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
    },
    /// Relative dimension from point counts over several fields.
    ///
    /// With --class, probes the class at each --q. Otherwise each
    /// --variety is paired with the --e in the same position (a single
    /// variety or a single e is repeated) and every pair is one sample of
    /// #Y; adding --params probes the stratum ratios against their bounds
    /// instead.
    Probe {
        #[arg(long, conflicts_with_all = ["variety", "params"])]
        class: Option<String>,
        #[arg(long, value_delimiter = ',', requires = "class")]
        q: Vec<u64>,
        #[arg(long)]
        variety: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        e: Vec<u32>,
        #[arg(long, value_parser = parse_params)]
        params: Option<(i64, i64, i64, i64)>,
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
        /// Skip plane sweeps over more planes than this.
        #[arg(long, default_value_t = 1_000_000)]
        plane_cap: u64,
    },
    /// Point counts of transversal sections against their orbit structure.
    LwCheck {
        #[command(flatten)]
        var: VarietyArg,
        #[command(flatten)]
        params: ParamsArg,
        /// Planes are taken over F_{q^base_e}.
        #[arg(long, default_value_t = 1)]
        base_e: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
    },
    /// Terms of the averaged high-degree relation for a sequence of families.
    ///
    /// Each --entry reads `n,m,d,k=PATH@e;PATH@e;...`.
    AveragedTable {
        #[arg(long = "entry", required = true)]
        entries: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        plane_cap: u64,
    },
}

#[derive(Args, Debug)]
struct VarietyArg {
    /// Variety file.
    #[arg(long)]
    variety: PathBuf,
}

#[derive(Args, Debug)]
struct ParamsArg {
    /// `n,m,d,k`.
    #[arg(long, value_parser = parse_params)]
    params: (i64, i64, i64, i64),
    /// Override the regime; also skips the restriction check.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Low,
    High,
}

fn parse_params(s: &str) -> Result<(i64, i64, i64, i64), String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [n, m, d, k] => Ok((n, m, d, k)),
        _ => Err("expected n,m,d,k".into()),
    }
}

/// Errors mapped to exit codes.
enum Failure {
    Usage(String),
    Io(String),
}

impl From<YfyError> for Failure {
    fn from(e: YfyError) -> Self {
        match e {
            YfyError::Geom(g) => g.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Io(_) | GeomError::Parse { .. } | GeomError::NotHomogeneous(_) | GeomError::Field(_) => {
                Failure::Io(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<MotivicError> for Failure {
    fn from(e: MotivicError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<VarietySpec, Failure> {
    Ok(VarietySpec::load(path)?)
}

fn make_params(p: (i64, i64, i64, i64), regime: Option<RegimeArg>) -> Result<ParamSet, Failure> {
    let (n, m, d, k) = p;
    let r = match regime {
        None => ParamSet::new(n, m, d, k),
        Some(RegimeArg::Low) => ParamSet::with_regime(n, m, d, k, Regime::Low),
        Some(RegimeArg::High) => ParamSet::with_regime(n, m, d, k, Regime::High),
    };
    r.map_err(|e| Failure::Usage(e.to_string()))
}

/// Identity status of a run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Ok = 0,
    Failed = 1,
    Excluded = 3,
}

fn run(cli: Cli) -> Result<(Output, Status), Failure> {
    let fmt = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Text => Format::Text,
    };
    match cli.command {
        Command::Class { name, q, divide_by, depth } => {
            let c = class_by_name(&name)?;
            let quotient = match divide_by {
                Some(dn) => {
                    let den = class_by_name(&dn)?;
                    let inv = invert_poly(&den.value, depth).map_err(|e| Failure::Usage(e.to_string()))?;
                    Some((den.label, &inv * &LSeries::from_poly(&c.value, depth)))
                }
                None => None,
            };
            Ok((render::class(fmt, &c, &q, quotient.as_ref().map(|(l, s)| (l.as_str(), s)))?, Status::Ok))
        }
        Command::Count { var, e, lines, profiles } => {
            let y = load(&var.variety)?;
            if profiles {
                let mut buf = Vec::new();
                for &ei in &e {
                    geom::write_profiles_csv(&y, ei, &mut buf).map_err(|x| Failure::Io(x.to_string()))?;
                }
                return Ok((Output(String::from_utf8(buf).expect("utf8")), Status::Ok));
            }
            Ok((render::count(fmt, &y, &e, lines), Status::Ok))
        }
        Command::VerifyClassic { var, e } => {
            let y = load(&var.variety)?;
            let rep = yfy::verify_classic(&y, &e)?;
            let st = if rep.all_hold { Status::Ok } else { Status::Failed };
            Ok((render::classic(fmt, &rep), st))
        }
        Command::VerifyExtended { var, params, e } => {
            let y = load(&var.variety)?;
            let p = make_params(params.params, params.regime)?;
            let rep = yfy::verify_extended(&y, &p, &e)?;
            let st = if rep.all_hold { Status::Ok } else { Status::Failed };
            Ok((render::extended(fmt, &rep), st))
        }
        Command::VerifyPartition { var, params, e } => {
            let y = load(&var.variety)?;
            let p = make_params(params.params, params.regime)?;
            let reps = e.iter().map(|&ei| yfy::verify_partition(&y, &p, ei)).collect::<Result<Vec<_>, _>>()?;
            let st = reps
                .iter()
                .map(|r| match r.verdict {
                    Verdict::Holds => Status::Ok,
                    Verdict::Fails => Status::Failed,
                    Verdict::Inconclusive => Status::Excluded,
                })
                .max()
                .unwrap_or(Status::Ok);
            let st = if reps.iter().any(|r| r.verdict == Verdict::Fails) { Status::Failed } else { st };
            Ok((render::partition(fmt, &reps), st))
        }
        Command::Probe { class, q, variety, e, params, regime, plane_cap } => {
            if let Some(name) = class {
                let c = class_by_name(&name)?;
                let est = yfy::dimension_probe(
                    |qq| Ok(Rat::from_integer(c.count(qq as i64))),
                    &q,
                )?;
                return Ok((render::probe_class(fmt, &c, &est), Status::Ok));
            }
            if variety.is_empty() || e.is_empty() {
                return Err(Failure::Usage("probe needs --class or --variety with --e".into()));
            }
            let ys = variety.iter().map(load).collect::<Result<Vec<_>, _>>()?;
            let members: Vec<(VarietySpec, u32)> = match (ys.len(), e.len()) {
                (_, 1) => ys.iter().map(|y| (y.clone(), e[0])).collect(),
                (1, _) => e.iter().map(|&ei| (ys[0].clone(), ei)).collect(),
                (a, b) if a == b => ys.iter().cloned().zip(e.iter().copied()).collect(),
                (a, b) => return Err(Failure::Usage(format!("{a} varieties but {b} values of --e"))),
            };
            match params {
                None => {
                    let samples: Vec<(u64, lefschetz::lring::Rat)> = members
                        .iter()
                        .map(|(y, ei)| {
                            (y.q().pow(*ei), Rat::from_integer(geom::count_points(y, *ei).into()))
                        })
                        .collect();
                    let est = yfy::slope_fit(&samples)?;
                    Ok((render::probe_points(fmt, &ys[0], &est), Status::Ok))
                }
                Some(pp) => {
                    let p = make_params(pp, regime)?;
                    if members.len() < 3 {
                        return Err(YfyError::InsufficientSamples(members.len()).into());
                    }
                    let fam = FamilyEntry { label: p.to_string(), params: p, members };
                    let probes = yfy::ratio_probes(&fam, plane_cap)?;
                    let st =
                        if probes.iter().any(|t| t.within == Some(false)) { Status::Failed } else { Status::Ok };
                    Ok((render::probes(fmt, &ys[0], &p, &probes), st))
                }
            }
        }
        Command::LwCheck { var, params, base_e, e } => {
            let y = load(&var.variety)?;
            let p = make_params(params.params, params.regime)?;
            let rep = yfy::langweil_check(&y, &p, base_e, &e)?;
            let st = if rep.all_hold { Status::Ok } else { Status::Failed };
            Ok((render::lw(fmt, &rep), st))
        }
        Command::AveragedTable { entries, plane_cap } => {
            let fams = entries.iter().map(|s| parse_entry(s)).collect::<Result<Vec<_>, _>>()?;
            let table = yfy::averaged_table(&fams, plane_cap)?;
            Ok((render::averaged(fmt, &table), Status::Ok))
        }
    }
}

fn parse_entry(s: &str) -> Result<FamilyEntry, Failure> {
    let (ps, members) = s.split_once('=').ok_or_else(|| Failure::Usage(format!("entry {s:?}: expected PARAMS=MEMBERS")))?;
    let p = make_params(parse_params(ps).map_err(Failure::Usage)?, None)?;
    let members = members
        .split(';')
        .map(|m| {
            let (path, e) = m.rsplit_once('@').ok_or_else(|| Failure::Usage(format!("member {m:?}: expected PATH@e")))?;
            let e: u32 = e.parse().map_err(|_| Failure::Usage(format!("member {m:?}: bad extension degree")))?;
            Ok((load(&PathBuf::from(path))?, e))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(FamilyEntry { label: ps.to_string(), params: p, members })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if rayon::ThreadPoolBuilder::new().num_threads(workers).build_global().is_err() {
        eprintln!("error: could not start {workers} workers");
        return ExitCode::from(2);
    }
    eprintln!("workers: {workers}");
    match run(cli) {
        Ok((out, status)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.0.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(4);
            }
            ExitCode::from(status as u8)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}
