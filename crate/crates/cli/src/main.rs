//! `conjapprox`: construct, verify and sweep conjugate approximations of a
//! real number, and probe the lattice minima at small sizes.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use conjugate_approx::constructor::construct_family;
use conjugate_approx::roots::conjugate_distances;
use conjugate_approx::verifier::{
    log_grid, sweep, sweep_csv, verify_candidates, Branch, Candidate, OptimalityMode,
};
use conjugate_approx::{
    probe_minima, AlgebraicApproximant, ConstructionRecord, Error, Kind, XiSpec,
};

const EXIT_NUMERIC: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "conjapprox",
    version,
    about = "Simultaneous approximation of a real number by conjugate algebraic numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// ξ as sqrt:D, quadratic:a,b,c[:root=+|-], cf:a0,a1,...[(period)] or dec:<digits>:<bits>
    #[arg(long)]
    xi: String,
    /// Degree parameter n (>= 1)
    #[arg(long)]
    n: usize,
    /// Precision floor in bits
    #[arg(long, default_value_t = 256)]
    prec: u64,
    /// Output path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp field
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
    Both,
}

impl KindArg {
    fn kinds(self) -> Vec<Kind> {
        match self {
            KindArg::P => vec![Kind::DegreeN],
            KindArg::Q => vec![Kind::MonicDegreeN1],
            KindArg::Both => vec![Kind::DegreeN, Kind::MonicDegreeN1],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OptArg {
    Auto,
    Off,
    Discriminant,
    Quadratic,
    Rational,
}

impl OptArg {
    fn mode(self) -> OptimalityMode {
        match self {
            OptArg::Auto => OptimalityMode::Auto,
            OptArg::Off => OptimalityMode::Off,
            OptArg::Discriminant => OptimalityMode::Only(Branch::Discriminant),
            OptArg::Quadratic => OptimalityMode::Only(Branch::QuadraticXi),
            OptArg::Rational => OptimalityMode::Only(Branch::RationalXi),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build P and/or Q at the first convergents and certify their roots
    Construct {
        #[command(flatten)]
        common: Common,
        /// Number of convergents
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check the upper and lower distance bounds and the equivalence constants
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
        /// Lower-bound branch
        #[arg(long, value_enum, default_value_t = OptArg::Auto)]
        optimality: OptArg,
        /// Verify polynomials from a construct output file instead of building them
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sweep heights X over a log-spaced grid and fit the distance exponent
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lo..hi x steps, e.g. 1e1..1e8x8, or a comma-separated list
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value_t = KindArg::P)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Enumerate small lattice points of the convex body at a convergent denominator q
    Minima {
        #[command(flatten)]
        common: Common,
        /// Convergent denominator (<= 8)
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionExhausted { .. }
            | Error::RootFindingFailed(_)
            | Error::DerivativeBoundViolated { .. }
            | Error::NotSquarefree
            | Error::NonIntegralSolution
            | Error::Singular => Failure::Numeric(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("cannot parse grid '{s}'"));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, steps) = rest.rsplit_once('x').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let steps: usize = steps.trim().parse().map_err(|_| bad())?;
        Ok(log_grid(lo, hi, steps)?)
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

fn parse_xi(common: &Common) -> Result<XiSpec, Failure> {
    if common.n == 0 {
        return Err(Failure::Config("--n must be >= 1".into()));
    }
    Ok(common.xi.parse::<XiSpec>()?)
}

fn header(command: &str, common: &Common) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("xi".into(), json!(common.xi));
    m.insert("n".into(), json!(common.n));
    m.insert("precision_floor".into(), json!(common.prec));
    if !common.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        m.insert("timestamp".into(), json!(secs));
    }
    m
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Config(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_construct(common: &Common, count: usize, kind: KindArg, format: Format) -> CmdResult {
    let xi = parse_xi(common)?;
    if count == 0 {
        return Err(Failure::Config("--count must be >= 1".into()));
    }
    let recs = construct_family(&xi, common.n, count, &kind.kinds(), common.prec)?;
    let apprs: Vec<AlgebraicApproximant> = recs
        .par_iter()
        .map(|r| conjugate_distances(r, &xi, common.prec))
        .collect::<Result<_, _>>()?;
    let ok = recs.iter().all(ConstructionRecord::all_checks_pass);
    let text = match format {
        Format::Json => {
            let mut m = header("construct", common);
            m.insert("count".into(), json!(count));
            let items: Vec<Value> = recs
                .iter()
                .zip(&apprs)
                .map(|(r, a)| {
                    let mut v = to_json(r);
                    v["approximant"] = to_json(a);
                    v
                })
                .collect();
            m.insert("records".into(), Value::Array(items));
            m.insert("all_pass".into(), json!(ok));
            pretty(&Value::Object(m))
        }
        Format::Csv => {
            let mut s = String::from(
                "index,kind,q,height,height_ratio,checks_pass,coeffs,max_dist_lo,max_dist_hi\n",
            );
            for (r, a) in recs.iter().zip(&apprs) {
                let t = conjugate_approx::format::IntervalText::from(&a.max_dist);
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.index,
                    r.kind.label(),
                    r.q,
                    r.height,
                    conjugate_approx::format::float(r.height_ratio),
                    r.all_checks_pass(),
                    csv_escape(&r.poly.to_list_string()),
                    t.lo,
                    t.hi
                ));
            }
            s
        }
    };
    emit(common, &text)?;
    Ok(ok)
}

/// Reads candidates from a construct output (object with `records`) or a bare array.
fn read_candidates(path: &PathBuf, n: usize) -> Result<Vec<Candidate>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Failure::Config(format!("{} is empty", path.display())));
    }
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("bad input JSON: {e}")))?;
    let items = match &v {
        Value::Array(a) => a.clone(),
        Value::Object(o) => match o.get("records") {
            Some(Value::Array(a)) => a.clone(),
            _ => return Err(Failure::Config("input object has no records array".into())),
        },
        _ => {
            return Err(Failure::Config(
                "input must be an object or an array".into(),
            ))
        }
    };
    if items.is_empty() {
        return Err(Failure::Config("input contains no records".into()));
    }
    let cands: Vec<Candidate> = items
        .into_iter()
        .map(|it| {
            serde_json::from_value(it).map_err(|e| Failure::Config(format!("bad record: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if cands.iter().any(|c| c.n != n) {
        return Err(Failure::Config(format!(
            "input records do not all have n = {n}"
        )));
    }
    Ok(cands)
}

fn cmd_verify(
    common: &Common,
    count: usize,
    kind: KindArg,
    optimality: OptArg,
    input: Option<&PathBuf>,
    format: Format,
) -> CmdResult {
    let xi = parse_xi(common)?;
    let cands = match input {
        Some(p) => read_candidates(p, common.n)?,
        None => {
            if count == 0 {
                return Err(Failure::Config("--count must be >= 1".into()));
            }
            construct_family(&xi, common.n, count, &kind.kinds(), common.prec)?
                .iter()
                .map(Candidate::from)
                .collect()
        }
    };
    let rep = verify_candidates(&xi, &cands, optimality.mode(), common.prec)?;
    let text = match format {
        Format::Json => {
            let mut m = header("verify", common);
            m.insert("report".into(), to_json(&rep));
            pretty(&Value::Object(m))
        }
        Format::Csv => {
            let mut s = String::from("index,kind,q,H,max_dist_lo,max_dist_hi,c_obs,upper_certified,lower_branch,lower_pass\n");
            for r in &rep.records {
                let (b, p) = match &r.optimality_lower {
                    Some(l) => (
                        to_json(&l.branch).as_str().unwrap_or("").to_string(),
                        l.pass.to_string(),
                    ),
                    None => (String::new(), String::new()),
                };
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.index,
                    r.kind.label(),
                    r.q,
                    r.height,
                    r.max_dist.lo,
                    r.max_dist.hi,
                    conjugate_approx::format::float(r.theorem_upper.c_obs),
                    r.upper_certified,
                    b,
                    p
                ));
            }
            s
        }
    };
    emit(common, &text)?;
    Ok(rep.all_pass)
}

fn cmd_sweep(common: &Common, grid: &str, kind: KindArg, format: Format) -> CmdResult {
    let xi = parse_xi(common)?;
    let grid = parse_grid(grid)?;
    let kind = match kind {
        KindArg::P => Kind::DegreeN,
        KindArg::Q => Kind::MonicDegreeN1,
        KindArg::Both => return Err(Failure::Config("sweep takes --kind P or Q".into())),
    };
    let rep = sweep(&xi, common.n, &grid, kind, common.prec)?;
    let summary = match &rep.fit {
        Some(f) => format!(
            "slope {} (expected {}), residual {}; window c3 = {}, c4 = {}, ratio {}{}",
            conjugate_approx::format::float(f.slope),
            conjugate_approx::format::float(-2.0 / common.n as f64),
            conjugate_approx::format::float(f.residual),
            conjugate_approx::format::float(rep.c3),
            conjugate_approx::format::float(rep.c4),
            conjugate_approx::format::float(rep.window_ratio),
            if rep.window_guaranteed {
                ""
            } else {
                " (window not guaranteed for this ξ)"
            }
        ),
        None => format!(
            "warning: fit skipped: {}",
            rep.fit_error.as_deref().unwrap_or("insufficient points")
        ),
    };
    let text = match format {
        Format::Csv => sweep_csv(&rep),
        Format::Json => {
            let mut m = header("sweep", common);
            m.insert("report".into(), to_json(&rep));
            pretty(&Value::Object(m))
        }
    };
    emit(common, &text)?;
    eprintln!("{summary}");
    Ok(rep.rows.iter().all(|r| r.checks_pass))
}

fn cmd_minima(common: &Common, q: u64, format: Format) -> CmdResult {
    let xi = parse_xi(common)?;
    let rep = probe_minima(&xi, common.n, q)?;
    let text = match format {
        Format::Json => {
            let mut m = header("minima", common);
            m.insert("report".into(), to_json(&rep));
            pretty(&Value::Object(m))
        }
        Format::Csv => format!(
            "n,q,index,lambda0,enumerated,first_minimum_estimate,first_minimum_bound_ok,basis_within,pass\n{},{},{},{},{},{},{},{},{}\n",
            rep.n,
            rep.q,
            rep.index,
            rep.lambda0,
            rep.enumerated,
            conjugate_approx::format::float(rep.first_minimum_estimate),
            rep.first_minimum_bound_ok,
            rep.basis_within,
            rep.pass
        ),
    };
    emit(common, &text)?;
    Ok(rep.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Construct {
            common,
            count,
            kind,
            format,
        } => cmd_construct(common, *count, *kind, *format),
        Command::Verify {
            common,
            count,
            kind,
            optimality,
            input,
            format,
        } => cmd_verify(common, *count, *kind, *optimality, input.as_ref(), *format),
        Command::Sweep {
            common,
            grid,
            kind,
            format,
        } => cmd_sweep(common, grid, *kind, *format),
        Command::Minima { common, q, format } => cmd_minima(common, *q, *format),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some certified checks failed");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
