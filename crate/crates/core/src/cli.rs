//! The `pathfn` command line: argument definitions and command runners.
//!
//! Every runner returns an [`Outcome`] (stdout text plus exit status) so commands can be
//! driven in-process. Exit codes: 0 pass, 1 mathematical violation, 2 usage, unsupported
//! or inconclusive.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::arith::{format_rational, parse_rational, Mode, Rational, Scalar};
use crate::differences::{self, divergence_probe, membership_scan, probe_verdict, MembershipQuery, PeriodicFn, Verdict};
use crate::error::{Error, Result};
use crate::flow::{flow_grid, subdiff_witnesses, BruteForceGrid, FlowQuery, ZGrid};
use crate::func::{parse_func_spec, FuncExpr};
use crate::radix::Radix;
use crate::series::{bounds_chain, identity_scan, ScanParams, SeriesFunc};

pub const SCHEMA: &str = "pathfn/1";

#[derive(Debug, Parser)]
#[command(name = "pathfn", version, about = "Second-difference scans, series identities and parabola-envelope flows")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Arithmetic mode.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Margin tolerance in float mode.
    #[arg(long, global = true, default_value_t = Mode::DEFAULT_TOL)]
    pub tol: f64,
    /// Worker threads for scans.
    #[arg(long, global = true, env = "PATHFN_JOBS")]
    pub jobs: Option<usize>,
    /// Maximum number of triplets a scan may visit.
    #[arg(long, global = true, default_value_t = differences::DEFAULT_CAP)]
    pub cap: u64,
}

impl Global {
    fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float { tol: self.tol },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a function at points or on a radix grid (CSV).
    Eval(EvalArgs),
    /// Scan Delta_{n,k}(y; f) + 2 c r^n <= 0.
    Membership(MembershipArgs),
    /// Check the second-difference identity for U_psi.
    Identity(IdentityArgs),
    /// Build the parabola envelope H_t f.
    Flow(FlowArgs),
    /// Difference quotients along k_n = floor(r^n x) (CSV).
    Probe(ProbeArgs),
    /// Sufficient conditions for U_psi and the lower-bound chain.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub func: PathBuf,
    /// Comma-separated rationals or decimals.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    pub points: Option<String>,
    /// Evaluate at j / r^N for j = 0..=r^N.
    #[arg(long)]
    pub grid: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
}

#[derive(Debug, Args)]
pub struct MembershipArgs {
    #[arg(long)]
    pub func: PathBuf,
    #[arg(long)]
    pub c: String,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long)]
    pub nmax: u32,
    #[arg(long, default_value_t = 6)]
    pub ydepth: u32,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long)]
    pub psi: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long)]
    pub nmax: u32,
    #[arg(long, default_value_t = 3)]
    pub ydepth: u32,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub func: PathBuf,
    #[arg(long)]
    pub c: String,
    #[arg(long)]
    pub t: String,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Envelope depth; defaults to the smallest n with 1/(2 c r^n) <= t.
    #[arg(long)]
    pub n: Option<u32>,
    /// Write the envelope JSON here.
    #[arg(long)]
    pub envelope: Option<PathBuf>,
    /// Write sampled `x,value` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub samples: u32,
    /// Compare with brute-force minimization over z = j / r^N at x = j / r^N.
    #[arg(long)]
    pub crosscheck: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub func: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long = "N")]
    pub depth: u32,
    #[arg(long, default_value = "1/2")]
    pub y: String,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Exit 1 unless every gap is at most -c.
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub psi: PathBuf,
    #[arg(long)]
    pub m: String,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 6)]
    pub nmax: u32,
    #[arg(long, default_value_t = 3)]
    pub ydepth: u32,
    /// Lower-bound and chain samples at j / r^xdepth.
    #[arg(long, default_value_t = 8)]
    pub xdepth: u32,
}

/// Text for stdout and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// JSON report shared by the scan commands. Keys serialize in a fixed order.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub mode: &'static str,
    pub verdict: Verdict,
    pub results: Value,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

struct Loaded {
    func: FuncExpr,
    sha256: String,
    path: String,
}

fn load_func(path: &Path) -> Result<Loaded> {
    let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let func = parse_func_spec(text)?;
    let digest = Sha256::digest(&bytes);
    let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { func, sha256, path: path.display().to_string() })
}

fn rational_arg(name: &str, s: &str) -> Result<Rational> {
    parse_rational(s.trim()).map_err(|e| Error::InvalidArgument(format!("--{name}: {e}")))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn inputs(f: &Loaded, params: Value) -> Value {
    let mut m = Map::new();
    m.insert("func".into(), json!(f.path));
    m.insert("func_sha256".into(), json!(f.sha256));
    if let Value::Object(p) = params {
        m.extend(p);
    }
    Value::Object(m)
}

/// Per-invocation settings shared by the runners.
#[derive(Debug, Clone)]
pub struct Ctx {
    command: String,
    mode: Mode,
    cap: u64,
    start: Instant,
}

impl Ctx {
    pub fn new(command: impl Into<String>, mode: Mode, cap: u64) -> Self {
        Ctx { command: command.into(), mode, cap, start: Instant::now() }
    }

    fn report(&self, inputs: Value, verdict: Verdict, results: Value) -> Outcome {
        let report = RunReport {
            schema: SCHEMA,
            tool: "pathfn",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            inputs,
            mode: self.mode.name(),
            verdict,
            results,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        };
        Outcome { stdout: report.to_json_string(), code: verdict.exit_code() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    match Cli::try_parse_from(&args) {
        Ok(cli) => match run(cli, echo) {
            Ok(out) => out,
            Err(e) => {
                eprintln!("error: {e}");
                Outcome { stdout: String::new(), code: 2 }
            }
        },
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            Outcome { stdout: String::new(), code }
        }
    }
}

/// Runs a parsed command line; `echo` is recorded in reports.
pub fn run(cli: Cli, echo: String) -> Result<Outcome> {
    let ctx = Ctx::new(echo, cli.global.mode(), cli.global.cap);
    let go = || match &cli.command {
        Command::Eval(a) => cmd_eval(&ctx, a),
        Command::Membership(a) => cmd_membership(&ctx, a),
        Command::Identity(a) => cmd_identity(&ctx, a),
        Command::Flow(a) => cmd_flow(&ctx, a),
        Command::Probe(a) => cmd_probe(&ctx, a),
        Command::Bounds(a) => cmd_bounds(&ctx, a),
    };
    match cli.global.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("--jobs: {e}")))?;
            pool.install(go)
        }
        None => go(),
    }
}

fn scalar_cell(v: &Scalar) -> String {
    match v {
        Scalar::Exact(q) => format_rational(q),
        Scalar::Float(a) => format!("{}", a.value),
    }
}

pub fn cmd_eval(ctx: &Ctx, a: &EvalArgs) -> Result<Outcome> {
    let f = load_func(&a.func)?;
    let xs: Vec<Rational> = match (&a.points, a.grid) {
        (Some(p), _) => p.split(',').map(|s| rational_arg("points", s)).collect::<Result<_>>()?,
        (None, Some(n)) => {
            let r = Radix::new(a.r)?;
            if r.pow_u64(n).is_none_or(|c| c >= ctx.cap) {
                return Err(Error::ResourceLimit { needed: (a.r as u128).saturating_pow(n), cap: ctx.cap });
            }
            r.grid(n)
        }
        (None, None) => return Err(Error::InvalidArgument("give --points or --grid".into())),
    };
    if ctx.mode == Mode::Exact {
        f.func.require_exact()?;
    }
    let mut out = String::from(if ctx.mode == Mode::Exact { "x,value\n" } else { "x,value,error_bound\n" });
    for x in &xs {
        let v = f.func.value(x, ctx.mode)?;
        match &v {
            Scalar::Exact(q) => out.push_str(&format!("{},{}\n", format_rational(x), format_rational(q))),
            Scalar::Float(ap) => out.push_str(&format!("{},{},{}\n", format_rational(x), ap.value, ap.err)),
        }
    }
    Ok(Outcome { stdout: out, code: 0 })
}

pub fn cmd_membership(ctx: &Ctx, a: &MembershipArgs) -> Result<Outcome> {
    let f = load_func(&a.func)?;
    let c = rational_arg("c", &a.c)?;
    let r = Radix::new(a.r)?;
    let ys = r.interior_grid(a.ydepth);
    let q = MembershipQuery::new(c.clone(), r, a.nmax, ys)?.with_mode(ctx.mode).with_cap(ctx.cap);
    let rep = membership_scan(&f.func, &q)?;
    let params = json!({"c": format_rational(&c), "r": a.r, "nmax": a.nmax, "ydepth": a.ydepth});
    Ok(ctx.report(inputs(&f, params), rep.verdict, serde_json::to_value(&rep).expect("serializable")))
}

pub fn cmd_identity(ctx: &Ctx, a: &IdentityArgs) -> Result<Outcome> {
    let f = load_func(&a.psi)?;
    f.func.require_exact()?;
    let r = Radix::new(a.r)?;
    let s = SeriesFunc::new(r, f.func.clone());
    let rep = identity_scan(&s, s.psi(), r, a.nmax, &r.interior_grid(a.ydepth), ctx.cap)?;
    let params = json!({"r": a.r, "nmax": a.nmax, "ydepth": a.ydepth});
    let ctx = Ctx { mode: Mode::Exact, ..ctx.clone() };
    Ok(ctx.report(inputs(&f, params), rep.verdict, serde_json::to_value(&rep).expect("serializable")))
}

pub fn cmd_flow(ctx: &Ctx, a: &FlowArgs) -> Result<Outcome> {
    let f = load_func(&a.func)?;
    let c = rational_arg("c", &a.c)?;
    let t = rational_arg("t", &a.t)?;
    let r = Radix::new(a.r)?;
    let mut q = FlowQuery::new(t.clone(), r, c.clone())?.with_mode(ctx.mode);
    if let Some(n) = a.n {
        q = q.with_n(n);
    }
    let n = q.depth()?;
    let pq = flow_grid(&f.func, &q)?;
    if let Some(p) = &a.envelope {
        write_atomic(p, &(serde_json::to_string_pretty(&pq.to_json()).expect("serializable") + "\n"))?;
    }
    if let Some(p) = &a.csv {
        write_atomic(p, &pq.to_csv(a.samples)?)?;
    }
    let mut verdict = Verdict::Pass;
    let mut results = Map::new();
    results.insert("n".into(), json!(n));
    results.insert("vertices".into(), json!(r.pow_u64(n).map(|v| v + 1)));
    results.insert("pieces".into(), json!(pq.pieces.len()));
    results.insert("envelope".into(), pq.to_json());
    results.insert("witnesses".into(), serde_json::to_value(subdiff_witnesses(&pq)).expect("serializable"));
    if let Some(depth) = a.crosscheck {
        if depth < n {
            return Err(Error::InvalidArgument(format!("--crosscheck depth {depth} is below the envelope depth {n}")));
        }
        let side = r.pow_u64(depth).filter(|s| (*s as u128 + 1).pow(2) <= ctx.cap as u128);
        let Some(side) = side else {
            return Err(Error::ResourceLimit { needed: (a.r as u128).saturating_pow(2 * depth), cap: ctx.cap });
        };
        let grid = BruteForceGrid::new(&f.func, &t, ZGrid::Radix(r, depth), ctx.mode)?;
        let mut mismatches = 0u64;
        let mut first = None;
        for x in r.grid(depth) {
            let envelope = pq.eval(&x)?;
            let brute = grid.min_at(&x)?;
            let differ = match (&envelope, &brute) {
                (Scalar::Exact(a), Scalar::Exact(b)) => a != b,
                _ => matches!(envelope.certified_cmp(&brute), Some(o) if o != std::cmp::Ordering::Equal),
            };
            if differ {
                mismatches += 1;
                first.get_or_insert_with(|| json!({"x": format_rational(&x), "envelope": scalar_cell(&envelope), "bruteforce": scalar_cell(&brute)}));
            }
        }
        if mismatches > 0 {
            verdict = Verdict::Fail;
        }
        results.insert(
            "crosscheck".into(),
            json!({"depth": depth, "points": side + 1, "mismatches": mismatches, "first_mismatch": first}),
        );
    }
    let mut params = json!({"c": format_rational(&c), "t": format_rational(&t), "r": a.r, "n": n});
    if let Some(d) = a.crosscheck {
        params["crosscheck"] = json!(d);
    }
    Ok(ctx.report(inputs(&f, params), verdict, Value::Object(results)))
}

pub fn cmd_probe(ctx: &Ctx, a: &ProbeArgs) -> Result<Outcome> {
    let f = load_func(&a.func)?;
    let x = rational_arg("x", &a.x)?;
    let y = rational_arg("y", &a.y)?;
    let r = Radix::new(a.r)?;
    let rows = divergence_probe(&f.func, r, &x, a.depth, &y, ctx.mode)?;
    let exact = ctx.mode == Mode::Exact;
    let mut out = String::from(if exact {
        "n,k,y,delta_plus,delta_minus,gap\n"
    } else {
        "n,k,y,delta_plus,delta_minus,gap,gap_error_bound\n"
    });
    for row in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            row.n,
            row.k,
            format_rational(&row.y),
            scalar_cell(&row.forward),
            scalar_cell(&row.backward),
            scalar_cell(&row.gap)
        ));
        if !exact {
            out.push_str(&format!(",{}", row.gap.error_bound()));
        }
        out.push('\n');
    }
    let code = match &a.c {
        Some(c) => probe_verdict(&rows, &rational_arg("c", c)?).exit_code(),
        None => 0,
    };
    Ok(Outcome { stdout: out, code })
}

pub fn cmd_bounds(ctx: &Ctx, a: &BoundsArgs) -> Result<Outcome> {
    let f = load_func(&a.psi)?;
    let m = rational_arg("m", &a.m)?;
    let alpha = rational_arg("alpha", &a.alpha)?;
    let r = Radix::new(a.r)?;
    let s = SeriesFunc::new(r, f.func.clone());
    let mut scan = ScanParams::defaults(r, a.nmax, a.ydepth);
    scan.x_samples = r.grid(a.xdepth);
    scan.mode = ctx.mode;
    scan.cap = ctx.cap;
    let sufficient = s.check_sufficient_conditions(&m, &alpha, &scan)?;
    let chain = bounds_chain(&s, &m, &scan.x_samples, ctx.mode)?;
    let verdict = match (sufficient.verdict(), chain.verdict) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    };
    let results = json!({
        "implied_c": sufficient.implied_c().map(format_rational),
        "sufficient": serde_json::to_value(&sufficient).expect("serializable"),
        "chain": serde_json::to_value(&chain).expect("serializable"),
    });
    let params = json!({
        "m": format_rational(&m), "alpha": format_rational(&alpha), "r": a.r,
        "nmax": a.nmax, "ydepth": a.ydepth, "xdepth": a.xdepth,
    });
    Ok(ctx.report(inputs(&f, params), verdict, results))
}
