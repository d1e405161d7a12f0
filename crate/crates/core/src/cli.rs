//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a tolerance or error budget
//! could not be met (including a failed self-test), 1 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    ln_bound_cone, ln_bound_surface, log_grid, scan, scan_timed, write_records_csv, Budgeted, Comparator, ScanSpec,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::{ConeParams, ConePoint, Domain, SamplerSpec, Stratum, SurfaceParams, SurfacePoint};
use crate::kernels::{ConeKernel, KernelConfig, KernelValue, SurfaceKernel};
use crate::quadrature::{cone_rule, pi_rule, surface_rule};
use crate::verify::{bless, golden_path, selftest, Level, SelftestOptions};

/// Smallest τ accepted without `--force`.
pub const MIN_TAU: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(name = "conekernel", version, about = "Jacobi heat kernels on the cone and the conic surface")]
struct Cli {
    /// Worker threads for scans and self-tests.
    #[arg(long, global = true, env = "CONEKERNEL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the heat kernel on the solid cone.
    EvalCone(EvalArgs),
    /// Evaluate the heat kernel on the conic surface.
    EvalSurface(EvalArgs),
    /// Seeded ratio scan of the kernel against the closed-form estimate.
    Scan(ScanArgs),
    /// Print quadrature nodes and weights as CSV.
    DumpRule(DumpArgs),
    /// Run the invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Ignored on the surface.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long)]
    tau: f64,
    /// Coordinates `x1,...,xd,t`.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Minimum quadrature orders per folded axis, `u,v1,v2`.
    #[arg(long, default_value = "60,60,60")]
    orders: String,
    /// Absolute tolerance for the dropped series tail.
    #[arg(long, default_value_t = 1e-40)]
    tail_tol: f64,
    /// Also evaluate the closed-form estimate (requires tau <= 4).
    #[arg(long)]
    bound: bool,
    /// Allow tau below 0.05.
    #[arg(long)]
    force: bool,
    /// Rescale surface points onto |x| = t.
    #[arg(long)]
    project: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value_t = DomainArg::Cone)]
    domain: DomainArg,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    tau_min: f64,
    #[arg(long, default_value_t = 4.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 16)]
    tau_steps: usize,
    /// Explicit comma-separated τ values (overrides the log grid).
    #[arg(long)]
    tau: Option<String>,
    /// Compare with 1 instead of the closed-form estimate (τ >= 4 regime).
    #[arg(long)]
    unit: bool,
    #[arg(long, default_value_t = 320)]
    samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Comma-separated strata (interior, near-apex, near-base, near-lateral,
    /// antipodal, coincident).
    #[arg(long)]
    strata: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Minimum quadrature orders per folded axis.
    #[arg(long, default_value = "1,1,1")]
    orders: String,
    #[arg(long)]
    force: bool,
    /// JSON report path (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-evaluation CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Cone,
    Surface,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Cone => Domain::Cone,
            DomainArg::Surface => Domain::Surface,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleKind {
    /// `dΠ_ν` on `[-1, 1]`.
    Pi,
    Cone,
    Surface,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[arg(long, value_enum, default_value_t = RuleKind::Pi)]
    kind: RuleKind,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,
    /// Per-axis orders for cone (`t,radial,angular`) or surface (`t,angular`).
    #[arg(long)]
    orders: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value = "quick")]
    level: String,
    /// Relative perturbation of the series normalization (fault injection).
    #[arg(long, default_value_t = 0.0)]
    inject_norm_fault: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Recompute the pinned constants and write the golden file.
    #[arg(long)]
    bless: bool,
    /// Golden file written by --bless.
    #[arg(long)]
    golden: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| invalid!("{what}: '{c}' is not a number"))
        })
        .collect()
}

fn parse_orders(s: &str) -> Result<[usize; 3]> {
    let v: Vec<usize> = s
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| invalid!("orders: '{c}' is not an integer")))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        [a] => Ok([*a, *a, *a]),
        [a, b] => Ok([*a, *b, 1]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(invalid!("orders: expected 1 to 3 values")),
    }
}

/// Splits `x1,...,xd,t` into `(x, t)`.
fn parse_point(s: Option<&str>, flag: &str, d: usize) -> Result<(Vec<f64>, f64)> {
    let s = s.ok_or_else(|| invalid!("--{flag} is required"))?;
    let mut v = parse_list(s, flag)?;
    if v.len() != d + 1 {
        return Err(invalid!("--{flag}: expected {} coordinates (x1..x{d}, t), got {}", d + 1, v.len()));
    }
    let t = v.pop().unwrap_or_default();
    Ok((v, t))
}

fn check_tau(tau: f64, force: bool) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid!("tau = {tau} must be positive and finite"));
    }
    if tau < MIN_TAU && !force {
        return Err(invalid!(
            "tau = {tau} is below {MIN_TAU}; truncation and quadrature orders grow quickly there (use --force)"
        ));
    }
    Ok(())
}

/// `e^{ln}` with a relative rounding allowance for the logarithmic evaluation.
fn budgeted_exp(ln: f64) -> Budgeted {
    let value = ln.exp();
    Budgeted {
        value,
        error_budget: 16.0 * f64::EPSILON * (1.0 + ln.abs()) * value,
    }
}

#[derive(Serialize)]
struct EvalOutput {
    schema: u32,
    domain: Domain,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    gamma: f64,
    tau: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    series: KernelValue,
    integral: KernelValue,
    difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Budgeted>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<Budgeted>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn large_tau_note(tau: f64) -> Option<String> {
    (tau >= 4.0).then(|| "tau >= 4: the kernel is comparable to 1 there; no closed-form estimate is evaluated".into())
}

fn eval(domain: Domain, a: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    check_tau(a.tau, a.force)?;
    if a.bound && a.tau > 4.0 {
        return Err(invalid!(
            "--bound: tau = {} outside (0, 4], where the closed-form estimate applies (the kernel is comparable to 1 for tau >= 4)",
            a.tau
        ));
    }
    let orders = parse_orders(&a.orders)?;
    let cfg = KernelConfig {
        tail_tol: a.tail_tol,
        min_orders: orders,
        ..KernelConfig::default()
    };
    let (px, pt) = parse_point(a.p.as_deref(), "p", a.d)?;
    let (qx, qt) = parse_point(a.q.as_deref(), "q", a.d)?;
    let (series, integral, ln_bound, mu) = match domain {
        Domain::Cone => {
            let pr = ConeParams::new(a.d, a.mu, a.gamma)?;
            let (p, q) = (ConePoint::new(px.clone(), pt)?, ConePoint::new(qx.clone(), qt)?);
            let k = ConeKernel::new(&pr, a.tau, &cfg)?;
            let lb = if a.bound { Some(ln_bound_cone(a.tau, &pr, &p, &q)?) } else { None };
            (k.series(&p, &q)?, k.integral(&p, &q)?, lb, Some(a.mu))
        }
        Domain::Surface => {
            let pr = SurfaceParams::new(a.d, a.gamma)?;
            let mk = |x: Vec<f64>, t| {
                if a.project {
                    SurfacePoint::project(x, t)
                } else {
                    SurfacePoint::new(x, t)
                }
            };
            let (p, q) = (mk(px.clone(), pt)?, mk(qx.clone(), qt)?);
            let k = SurfaceKernel::new(&pr, a.tau, &cfg)?;
            let lb = if a.bound { Some(ln_bound_surface(a.tau, &pr, &p, &q)?) } else { None };
            (k.series(&p, &q)?, k.integral(&p, &q)?, lb, None)
        }
    };
    let difference = (series.value - integral.value).abs();
    if difference > series.error_budget + integral.error_budget {
        return Err(Error::Tolerance(format!(
            "series {:e} and integral {:e} differ by {difference:e}, beyond the combined budget {:e}",
            series.value,
            integral.value,
            series.error_budget + integral.error_budget
        )));
    }
    let bound = ln_bound.map(budgeted_exp);
    let ratio = ln_bound.map(|lb| {
        let v = (integral.value.ln() - lb).exp();
        Budgeted {
            value: v,
            error_budget: v * (integral.error_budget / integral.value + 16.0 * f64::EPSILON * (1.0 + lb.abs())),
        }
    });
    let o = EvalOutput {
        schema: 1,
        domain,
        d: a.d,
        mu,
        gamma: a.gamma,
        tau: a.tau,
        p: px.into_iter().chain([pt]).collect(),
        q: qx.into_iter().chain([qt]).collect(),
        difference,
        bound,
        ratio,
        note: large_tau_note(a.tau),
        series,
        integral,
    };
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &o)?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(out, "value         {:.17e}", o.integral.value)?;
    writeln!(out, "error_budget  {:.3e}", o.integral.error_budget.max(o.series.error_budget))?;
    writeln!(
        out,
        "integral      {:.17e} +- {:.3e}  (orders {:?}, N = {})",
        o.integral.value, o.integral.error_budget, o.integral.meta.orders, o.integral.meta.truncation_n
    )?;
    writeln!(
        out,
        "series        {:.17e} +- {:.3e}  (orders {:?}, N = {})",
        o.series.value, o.series.error_budget, o.series.meta.orders, o.series.meta.truncation_n
    )?;
    writeln!(out, "difference    {:.3e}", o.difference)?;
    if let (Some(b), Some(r)) = (o.bound, o.ratio) {
        writeln!(out, "estimate      {:.17e} +- {:.3e}", b.value, b.error_budget)?;
        writeln!(out, "ratio         {:.17e} +- {:.3e}", r.value, r.error_budget)?;
    }
    if let Some(n) = &o.note {
        writeln!(out, "note          {n}")?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<()> {
    let domain: Domain = a.domain.into();
    let tau_grid = match &a.tau {
        Some(s) => parse_list(s, "tau")?,
        None => {
            if !(a.tau_min > 0.0 && a.tau_min <= a.tau_max) || a.tau_steps == 0 {
                return Err(invalid!("need 0 < tau-min <= tau-max and tau-steps >= 1"));
            }
            log_grid(a.tau_min, a.tau_max, a.tau_steps)
        }
    };
    for &t in &tau_grid {
        check_tau(t, a.force)?;
    }
    let mut sampler = SamplerSpec::new(domain);
    if let Some(s) = &a.strata {
        sampler.strata = s.split(',').map(|x| x.trim().parse::<Stratum>()).collect::<Result<_>>()?;
    }
    sampler.delta = a.delta;
    sampler.eps = a.eps;
    let spec = ScanSpec {
        domain,
        d: a.d,
        mu: a.mu,
        gamma: a.gamma,
        tau_grid,
        samples: a.samples,
        sampler,
        seed: a.seed,
        comparator: if a.unit { Comparator::One } else { Comparator::Estimate },
        kernel: KernelConfig {
            min_orders: parse_orders(&a.orders)?,
            ..KernelConfig::default()
        },
    };
    let (report, records) = if a.timing { scan_timed(&spec)? } else { scan(&spec)? };
    if let Some(path) = &a.csv {
        write_records_csv(&records, create(path)?)?;
    }
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn dump_rule(a: &DumpArgs, out: &mut dyn Write) -> Result<()> {
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(&mut *out),
    };
    let mut w = csv::Writer::from_writer(sink);
    match a.kind {
        RuleKind::Pi => {
            let r = pi_rule(a.nu, a.m)?;
            w.write_record(["node", "weight"])?;
            for (x, wt) in r.nodes.iter().zip(&r.weights) {
                w.write_record([format!("{x:.17e}"), format!("{wt:.17e}")])?;
            }
        }
        RuleKind::Cone | RuleKind::Surface => {
            let rule = if a.kind == RuleKind::Cone {
                let o = parse_orders(a.orders.as_deref().unwrap_or("10,10,10"))?;
                cone_rule(&ConeParams::new(a.d, a.mu, a.gamma)?, o)?
            } else {
                let o = parse_orders(a.orders.as_deref().unwrap_or("10,10"))?;
                surface_rule(&SurfaceParams::new(a.d, a.gamma)?, [o[0], o[1]])?
            };
            let mut header: Vec<String> = (1..=a.d).map(|i| format!("x{i}")).collect();
            header.push("t".into());
            header.push("weight".into());
            w.write_record(&header)?;
            for p in rule.points() {
                let mut rec: Vec<String> = p.x.iter().map(|v| format!("{v:.17e}")).collect();
                rec.push(format!("{:.17e}", p.t));
                rec.push(format!("{:.17e}", p.weight));
                w.write_record(&rec)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_selftest(a: &SelftestArgs, out: &mut dyn Write) -> Result<bool> {
    if a.bless {
        let path = a.golden.clone().unwrap_or_else(|| PathBuf::from(golden_path()));
        let g = bless(&path)?;
        eprintln!("wrote {}", path.display());
        serde_json::to_writer_pretty(&mut *out, &g)?;
        writeln!(out)?;
        return Ok(true);
    }
    let opts = SelftestOptions {
        level: a.level.parse::<Level>()?,
        norm_fault: a.inject_norm_fault,
        seed: a.seed,
    };
    let report = selftest(&opts)?;
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        for c in &report.checks {
            writeln!(
                out,
                "{} {:<44} observed {:.6e} limit {:.6e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.limit,
                c.detail
            )?;
        }
        writeln!(out, "{}", if report.passed { "selftest passed" } else { "selftest FAILED" })?;
    }
    Ok(report.passed)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) => 2,
        Error::Tolerance(_) => 3,
        Error::Io(_) | Error::Serde(_) | Error::Csv(_) => 1,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::EvalCone(a) => eval(Domain::Cone, a, out).map(|_| 0),
        Command::EvalSurface(a) => eval(Domain::Surface, a, out).map(|_| 0),
        Command::Scan(a) => run_scan(a, out).map(|_| 0),
        Command::DumpRule(a) => dump_rule(a, out).map(|_| 0),
        Command::Selftest(a) => run_selftest(a, out).map(|ok| if ok { 0 } else { 3 }),
    }
}

/// Runs the command line `args` (including the program name), writing data
/// to `out` and diagnostics to standard error. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match cli.threads {
        Some(0) => {
            eprintln!("error: invalid input: --threads must be at least 1");
            return 2;
        }
        t => t,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    let result = result.and_then(|code| {
        out.write_all(&buf)?;
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// [`run_with`] on standard output.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    run_with(args, &mut lock)
}
