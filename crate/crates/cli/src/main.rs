use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sphere_restriction::bessel::{bessel_j, BesselQuery};
use sphere_restriction::restriction::{radial_constant, RadialValue};
use sphere_restriction::verifier::format::{human, machine};
use sphere_restriction::verifier::{
    parse_dims, parse_list, run_sweep, verify_all, with_parallelism, BoundId, BoundSweepReport, Calibration, GridSpec,
    SweepContext, VerifyReport, CALIBRATION_ENV,
};
use sphere_restriction::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "srestrict",
    version,
    about = "Bessel functions, radial restriction constants and bound verification"
)]
struct Cli {
    /// Target accuracy, in [1e-12, 1e-4].
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = default_threads())]
    parallelism: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate J_nu(r) with an error bound.
    Bessel {
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Radial restriction constant R_rad(p -> q) on S^{d-1}.
    Rrad {
        #[arg(long)]
        d: u32,
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[arg(long, value_parser = parse_exponent)]
        q: f64,
    },
    /// Sweep one bound over a grid.
    Sweep {
        bound: String,
        #[command(flatten)]
        grid: GridFlags,
        /// Write the report here (JSON, or CSV with --format csv).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = CALIBRATION_ENV)]
        calibration: Option<PathBuf>,
    },
    /// Run every bound; exit 0 iff all pass.
    VerifyAll {
        /// Calibration file; written after a run that had none.
        #[arg(long, env = CALIBRATION_ENV)]
        calibration: Option<PathBuf>,
        /// Refuse to run without an existing calibration file.
        #[arg(long)]
        strict: bool,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridFlags {
    /// Orders, e.g. `2:256:x2` or `1,2,5`.
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Dimensions, e.g. `10:400:+10`.
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    alpha_count: Option<usize>,
    #[arg(long)]
    alpha_offset: Option<f64>,
    #[arg(long)]
    r_count: Option<usize>,
    /// Double the sampling density.
    #[arg(long)]
    densify: bool,
}

impl GridFlags {
    fn apply(&self, mut g: GridSpec) -> Result<GridSpec, Error> {
        if let Some(s) = &self.nu {
            g.nu = parse_list(s)?;
        }
        if let Some(s) = &self.p {
            g.p = parse_list(s)?;
            if self.q.is_none() {
                g.q.clear();
            }
        }
        if let Some(s) = &self.q {
            g.q = parse_list(s)?;
        }
        if let Some(s) = &self.d {
            g.d = parse_dims(s)?;
        }
        if let Some(n) = self.alpha_count {
            g.alpha_count = n;
        }
        if let Some(x) = self.alpha_offset {
            g.alpha_offset = x;
        }
        if let Some(n) = self.r_count {
            g.r_count = n;
        }
        Ok(if self.densify { g.densify() } else { g })
    }
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    match parse_list(s) {
        Ok(v) if v.len() == 1 => Ok(v[0]),
        _ => Err(format!("expected a single exponent, got '{s}'")),
    }
}

/// Failure of a command, carrying its exit code.
struct Exit(u8, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parameter(_) => EXIT_USAGE,
            Error::ErrorTooLarge { .. } => EXIT_FAIL,
            Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
        };
        Exit(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let result = run(&cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("srestrict: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, Exit> {
    if !(1e-12..=1e-4).contains(&cli.tol) {
        return Err(Exit(
            EXIT_USAGE,
            format!("--tol must lie in [1e-12, 1e-4], got {}", cli.tol),
        ));
    }
    match &cli.command {
        Command::Bessel { nu, r } => cmd_bessel(cli, *nu, *r, out),
        Command::Rrad { d, p, q } => cmd_rrad(cli, *d, *p, *q, out),
        Command::Sweep {
            bound,
            grid,
            out: path,
            calibration,
        } => {
            let id: BoundId = bound.parse()?;
            let grid = grid.apply(GridSpec::default_for(id))?;
            let cal = calibration.as_deref().map(Calibration::load).transpose()?;
            let rep = with_parallelism(cli.parallelism, || {
                run_sweep(id, &grid, cli.tol, &SweepContext::new(cal))
            })??;
            cmd_sweep(cli, &rep, path.as_deref(), out)
        }
        Command::VerifyAll {
            calibration,
            strict,
            out: path,
        } => cmd_verify_all(cli, calibration.as_deref(), *strict, path.as_deref(), out),
    }
}

fn emit(out: &mut impl Write, s: &str) -> Result<(), Exit> {
    out.write_all(s.as_bytes())
        .map_err(|e| Exit(EXIT_CONFIG, format!("cannot write output: {e}")))
}

fn write_file(path: &Path, s: &str) -> Result<(), Exit> {
    std::fs::write(path, s).map_err(|e| Exit(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, Exit> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn cmd_bessel(cli: &Cli, nu: f64, r: f64, out: &mut impl Write) -> Result<u8, Exit> {
    let v = bessel_j(BesselQuery::new(nu, r)?, cli.tol)?;
    let s = match cli.format {
        Format::Human => format!(
            "J_{}({}) = {} ± {} [{}]\n",
            human(nu),
            human(r),
            human(v.value),
            human(v.error),
            v.method
        ),
        Format::Csv => format!(
            "nu,r,value,error,method\n{},{},{},{},{}\n",
            machine(nu),
            machine(r),
            machine(v.value),
            machine(v.error),
            v.method
        ),
        Format::Json => json(&v)?,
    };
    emit(out, &s)?;
    Ok(0)
}

fn cmd_rrad(cli: &Cli, d: u32, p: f64, q: f64, out: &mut impl Write) -> Result<u8, Exit> {
    let res = radial_constant(d, p, q, cli.tol)?;
    let s = match cli.format {
        Format::Json => json(&res)?,
        Format::Csv => {
            let (value, rel) = match &res.value {
                RadialValue::Finite { value, rel_error, .. } => (machine(*value), machine(*rel_error)),
                RadialValue::Infinite { .. } => ("inf".to_string(), String::new()),
            };
            format!(
                "d,p,q,region,value,rel_error,method\n{d},{},{},{},{value},{rel},{}\n",
                machine(p),
                machine(q),
                res.pair.region,
                res.method
            )
        }
        Format::Human => match &res.value {
            RadialValue::Finite { value, rel_error, .. } => format!(
                "R_rad({} -> {}; d = {d}) = {} (relative error {}, region {})\n",
                human(p),
                human(q),
                human(*value),
                human(*rel_error),
                res.pair.region
            ),
            RadialValue::Infinite { .. } => "infinite (p ≥ 2d/(d+1))\n".to_string(),
        },
    };
    emit(out, &s)?;
    Ok(0)
}

fn summary_line(r: &BoundSweepReport) -> String {
    let c = |x: Option<f64>| x.map(human).unwrap_or_else(|| "-".into());
    let mut s = format!(
        "{:<20} {:<12} points {:>5}  inconclusive {:>3}  c_min {:<12} c_max {:<12}",
        r.bound_id.name(),
        r.status,
        r.records.len(),
        r.inconclusive,
        c(r.c_min),
        c(r.c_max)
    );
    if let Some(x) = r.derived_constant {
        s.push_str(&format!(" derived {}", human(x)));
    }
    let mut s = s.trim_end().to_string();
    s.push('\n');
    for f in &r.failures {
        s.push_str(&format!("  {f}\n"));
    }
    s
}

fn cmd_sweep(cli: &Cli, rep: &BoundSweepReport, path: Option<&Path>, out: &mut impl Write) -> Result<u8, Exit> {
    let body = match cli.format {
        Format::Csv => rep.to_csv(),
        _ => rep.to_json()?,
    };
    match path {
        Some(p) => {
            write_file(p, &body)?;
            emit(out, &summary_line(rep))?;
        }
        None => emit(
            out,
            &if cli.format == Format::Human {
                summary_line(rep)
            } else {
                body
            },
        )?,
    }
    Ok(if rep.pass { 0 } else { EXIT_FAIL })
}

fn verify_csv(rep: &VerifyReport) -> String {
    let c = |x: Option<f64>| x.map(machine).unwrap_or_default();
    let mut s = String::from("bound_id,status,points,inconclusive,c_min,c_max\n");
    for r in &rep.reports {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.bound_id.name(),
            r.status,
            r.records.len(),
            r.inconclusive,
            c(r.c_min),
            c(r.c_max)
        ));
    }
    s
}

fn cmd_verify_all(
    cli: &Cli,
    cal_path: Option<&Path>,
    strict: bool,
    path: Option<&Path>,
    out: &mut impl Write,
) -> Result<u8, Exit> {
    let cal = match cal_path {
        Some(p) if p.exists() => Some(Calibration::load(p)?),
        Some(p) if strict => {
            return Err(Exit(
                EXIT_CONFIG,
                format!("calibration file {} does not exist", p.display()),
            ));
        }
        None if strict => {
            return Err(Exit(
                EXIT_CONFIG,
                format!("--strict needs a calibration file (--calibration or {CALIBRATION_ENV})"),
            ));
        }
        _ => None,
    };
    let (rep, fresh) = with_parallelism(cli.parallelism, || verify_all(cli.tol, cal, &HashMap::new()))??;
    if let (Some(fresh), Some(p)) = (fresh.as_ref(), cal_path) {
        if rep.pass {
            write_file(p, &fresh.to_json()?)?;
        }
    }
    let body = rep.to_json()?;
    if let Some(p) = path {
        write_file(p, &body)?;
    }
    let s = match cli.format {
        Format::Json if path.is_none() => body,
        Format::Csv => verify_csv(&rep),
        _ => {
            let mut s: String = rep.reports.iter().map(summary_line).collect();
            let failing = rep.failing();
            if failing.is_empty() {
                s.push_str("all bounds pass\n");
            } else {
                let names: Vec<_> = failing.iter().map(|b| b.name()).collect();
                s.push_str(&format!("failing: {}\n", names.join(", ")));
            }
            s
        }
    };
    emit(out, &s)?;
    if !rep.pass {
        let names: Vec<_> = rep.failing().iter().map(|b| b.name()).collect();
        eprintln!("srestrict: failing bounds: {}", names.join(", "));
    }
    Ok(if rep.pass { 0 } else { EXIT_FAIL })
}
