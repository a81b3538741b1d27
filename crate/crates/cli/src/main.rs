mod config;
mod render;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use dt4_core::algebra::{modp, ExactRF, Field, PrimeSample};
use dt4_core::engine::{colored_counts, run_with, ContributionCache, Engine, ErrorKind, Report, Status};
use dt4_core::partitions::{count_up_to, enumerate, write_jsonl, SolidPartition};
use dt4_core::series::{macmahon_neg, rhs_orbifold, rhs_orbifold_3d, rhs_toric, TruncatedSeries};
use dt4_core::vertex::{
    contribution_factors, contribution_orbifold_factors, v_dt, v_dt_zr, v_tilde_axis, v_tilde_zr, Chart, Geometry,
};

use config::VerifyArgs;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "dt4", version, about = "Check DT4 vertex sums against their MacMahon closed forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification task and report per coefficient
    Verify(Box<VerifyArgs>),
    /// Print vertex data for one solid partition
    Inspect {
        #[command(subcommand)]
        what: InspectCmd,
    },
    /// Count or list solid partitions
    Partitions {
        #[command(subcommand)]
        what: PartitionsCmd,
    },
    /// Print series expansions
    Series {
        #[command(subcommand)]
        what: SeriesCmd,
    },
}

#[derive(Subcommand, Debug)]
enum InspectCmd {
    Vertex {
        /// Boxes as `i,j,k,l;i,j,k,l;...`
        #[arg(long)]
        boxes: String,
        /// Also show the Z_r-fixed vertex
        #[arg(long)]
        r: Option<u32>,
        /// Axis whose complement forms the square root
        #[arg(long, default_value_t = 4)]
        axis: usize,
        /// Character `c1,c2,c3,c4` of the line bundle at the origin
        #[arg(long)]
        line: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PartitionsCmd {
    /// Counts for sizes 1..=max, or colored counts with --r
    Count {
        #[arg(long)]
        max: usize,
        #[arg(long)]
        r: Option<u32>,
    },
    /// All partitions of one size as JSON Lines
    List {
        #[arg(long)]
        size: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SeriesCmd {
    /// M(-q)
    Macmahon {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        json: bool,
    },
    /// Closed form: orbifold with --r, toric with --geometry
    Rhs {
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        geometry: Option<String>,
        #[arg(long)]
        order: u32,
        /// The three-dimensional orbifold formula
        #[arg(long)]
        three_dim: bool,
        /// Evaluate at a seeded point mod a prime instead of exactly
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let err = e.into();
        let code = match err.downcast_ref::<dt4_core::Error>() {
            Some(e) => exit_code_of(ErrorKind::of(e)),
            None => EXIT_USAGE,
        };
        Failure { code, err }
    }
}

fn exit_code_of(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Usage => EXIT_USAGE,
        ErrorKind::Degenerate => EXIT_DEGENERATE,
        ErrorKind::Computation => EXIT_MISMATCH,
    }
}

fn report_code(rep: &Report) -> u8 {
    match rep.status {
        Status::Pass => 0,
        Status::Fail => EXIT_MISMATCH,
        Status::Error => exit_code_of(rep.error_kind.unwrap_or(ErrorKind::Computation)),
    }
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let resolved = args.resolve()?;
    let first = &resolved.tasks[0];
    let cache = match &first.cache_dir {
        Some(dir) => Some(ContributionCache::open(dir)?),
        None => None,
    };
    let mut engine = Engine::new(first.threads, cache)?;
    let mut reports = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for task in &resolved.tasks {
        let mut rep = run_with(&mut engine, task, Instant::now());
        if resolved.deterministic {
            rep = rep.without_volatile();
        }
        write!(stdout, "{}", render::summary(&rep, resolved.deterministic))?;
        if resolved.suite {
            writeln!(stdout)?;
        }
        reports.push(rep);
    }
    let code = reports.iter().map(report_code).max().unwrap_or(0);
    if resolved.suite {
        let status = if code == 0 { "pass" } else if reports.iter().any(|r| r.status == Status::Error) { "error" } else { "fail" };
        writeln!(stdout, "suite: {status} ({} checks)", reports.len())?;
    }
    if let Some(path) = &resolved.report {
        let json = if resolved.suite {
            let doc = serde_json::json!({
                "status": if code == 0 { "pass" } else { "fail" },
                "reports": reports,
            });
            serde_json::to_string_pretty(&doc)?
        } else {
            reports[0].to_json()
        };
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(code)
}

fn parse_line(s: &str) -> Result<[i32; 4]> {
    let v: Vec<i32> = s
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad --line `{s}`"))?;
    v.try_into().map_err(|_| anyhow::anyhow!("--line needs four integers"))
}

fn inspect_vertex(boxes: &str, r: Option<u32>, axis: usize, line: Option<&str>) -> Result<u8, Failure> {
    let pi: SolidPartition = boxes.parse()?;
    if !(1..=4).contains(&axis) {
        return Err(anyhow::anyhow!("--axis must be 1, 2, 3 or 4").into());
    }
    if r == Some(0) {
        return Err(anyhow::anyhow!("--r must be at least 1").into());
    }
    let mut chart = Chart::standard();
    if let Some(l) = line {
        chart.line = parse_line(l)?;
    }
    let mut out = String::new();
    let z = pi.character();
    out += &format!("partition: {}\n", if pi.is_empty() { "(empty)".to_string() } else { pi.to_string() });
    out += &format!("size: {}  mu: {}  mu^{axis}: {}\n", pi.size(), pi.mu(), pi.mu_axis(axis));
    out += &format!("Z = {z}\n");
    out += &format!("v = {}\n", v_dt(&pi, axis));
    let vt = v_tilde_axis(&pi, &chart, axis)?;
    out += &format!("v~ = {vt}\n");
    let e = if axis == 4 { contribution_factors(&pi, &chart)? } else { dt4_core::vertex::axis_contribution(&pi, axis)? };
    out += &format!("(-1)^mu e(-v~) = {e}\n");
    out += &format!("               = {}\n", e.to_rational());
    if let Some(r) = r {
        out += &format!("colors: {:?}\n", pi.color_vector(r));
        for l in 0..r {
            out += &format!("Z^({l}) = {}\n", pi.colored_character(r, l));
        }
        out += &format!("v^Z{r} = {}\n", v_dt_zr(&pi, r));
        out += &format!("v~^Z{r} = {}\n", v_tilde_zr(&pi, r)?);
        let eo = contribution_orbifold_factors(&pi, r)?;
        out += &format!("(-1)^mu e(-v~^Z{r}) = {eo}\n");
        out += &format!("C^pi = {}\n", pi.c_stat());
    }
    print!("{out}");
    Ok(0)
}

fn partitions_count(max: usize, r: Option<u32>) -> Result<u8, Failure> {
    match r {
        None => {
            let counts = count_up_to(max);
            let parts: Vec<String> = counts.iter().skip(1).map(|c| c.to_string()).collect();
            println!("{}", parts.join(" "));
        }
        Some(0) => return Err(anyhow::anyhow!("--r must be at least 1").into()),
        Some(r) => {
            for (colors, n) in colored_counts(max, r) {
                if colors.iter().all(|&c| c == 0) {
                    continue;
                }
                let c: Vec<String> = colors.iter().map(|x| x.to_string()).collect();
                println!("[{}] {n}", c.join(","));
            }
        }
    }
    Ok(0)
}

fn print_series<F: Field>(s: &TruncatedSeries<F::Elem>, f: &F, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string(&s.to_json(f))?);
    } else {
        print!("{}", render::series_lines(s, f));
    }
    Ok(())
}

struct RhsArgs {
    r: Option<u32>,
    geometry: Option<String>,
    order: u32,
    three_dim: bool,
    json: bool,
}

fn rhs_in<F: Field>(a: &RhsArgs, f: &F) -> Result<(), Failure> {
    let s = match (&a.geometry, a.r) {
        (Some(_), Some(_)) => return Err(anyhow::anyhow!("give either --r or --geometry").into()),
        (Some(g), None) => {
            let geom = Geometry::from_name(g, None)?;
            if a.three_dim || matches!(geom, Geometry::Orbifold { .. }) {
                return Err(anyhow::anyhow!("--geometry takes a toric geometry; use --r for orbifolds").into());
            }
            rhs_toric(&geom, a.order, f)?
        }
        (None, Some(0)) => return Err(anyhow::anyhow!("--r must be at least 1").into()),
        (None, Some(r)) if a.three_dim => rhs_orbifold_3d(r, a.order, f)?,
        (None, Some(r)) => rhs_orbifold(r, a.order, f)?,
        (None, None) => return Err(anyhow::anyhow!("series rhs needs --r or --geometry").into()),
    };
    print_series(&s, f, a.json)?;
    Ok(())
}

fn series(cmd: SeriesCmd) -> Result<u8, Failure> {
    match cmd {
        SeriesCmd::Macmahon { order, json } => print_series(&macmahon_neg(order, &ExactRF), &ExactRF, json)?,
        SeriesCmd::Rhs { r, geometry, order, three_dim, seed, prime, json } => {
            let a = RhsArgs { r, geometry, order, three_dim, json };
            if seed.is_some() || prime.is_some() {
                let p = prime.unwrap_or_else(|| modp::prime_below_2_62(0));
                if !modp::is_prime(p) || p <= u64::from(order.max(r.unwrap_or(1))) {
                    return Err(anyhow::anyhow!("--prime must be a prime above the order and r").into());
                }
                let sample = PrimeSample::random(p, seed.unwrap_or(0), 0, 0)?;
                eprintln!("point (s1,s2,s3,m) = {:?} mod {p}", sample.point);
                rhs_in(&a, &sample)?;
            } else {
                rhs_in(&a, &ExactRF)?;
            }
        }
    }
    Ok(0)
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Verify(args) => verify(*args),
        Command::Inspect { what: InspectCmd::Vertex { boxes, r, axis, line } } => {
            inspect_vertex(&boxes, r, axis, line.as_deref())
        }
        Command::Partitions { what: PartitionsCmd::Count { max, r } } => partitions_count(max, r),
        Command::Partitions { what: PartitionsCmd::List { size } } => {
            write_jsonl(std::io::stdout().lock(), &enumerate(size))?;
            Ok(0)
        }
        Command::Series { what } => series(what),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
