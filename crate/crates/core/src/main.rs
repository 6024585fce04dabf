use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;

use genut::report::{self, Format, Selector};
use genut::{
    constrain_detailed, generate_with, independent_joint, mc_truth, propagate, ut_sigma_points, BoxConstraint,
    DistributionSpec, GenutError, MomentSpec, NamedTransform, Result, SigmaPointSet, SqrtMethod, UChoice,
};

#[derive(Parser)]
#[command(name = "genut", version, about = "Generalized unscented transform toolkit")]
struct Cli {
    /// Seed for Monte Carlo streams
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output directory; GENUT_OUT takes precedence
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report file format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Both => Format::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Genut,
    GenutConstrained,
    Ut,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sigma point set
    SigmaPoints(SetArgs),
    /// Propagate a sigma point set through a named transform
    Propagate {
        #[command(flatten)]
        set: SetArgs,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Monte Carlo statistics of a named transform
    McTruth {
        /// Distribution JSON (object or array), or a path to one
        #[arg(long)]
        dist: String,
        #[command(flatten)]
        transform: TransformArgs,
        /// Number of draws
        #[arg(long, default_value_t = 10_000_000)]
        n: usize,
    },
    /// Reproduce a published example, table, or case study
    Reproduce {
        #[arg(value_parser = parse_selector)]
        selector: Selector,
    },
}

#[derive(Args)]
struct SetArgs {
    /// Distribution JSON (object or array), or a path to one
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    dist: Option<String>,
    /// Moment spec JSON, or a path to one
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Genut)]
    scheme: SchemeArg,
    /// `match-kurtosis`, `default`, or a comma-separated list
    #[arg(long, default_value = "default")]
    u: String,
    /// UT spread; defaults to 3 - n
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Comma-separated lower bounds (`-inf` for none)
    #[arg(long, allow_hyphen_values = true)]
    lower: Option<String>,
    /// Comma-separated upper bounds (`inf` for none)
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<String>,
    #[arg(long, default_value_t = genut::sigma::DEFAULT_THETA)]
    theta: f64,
    #[arg(long, default_value = "cholesky")]
    sqrt: String,
}

#[derive(Args)]
struct TransformArgs {
    /// Transform name
    #[arg(long = "fn")]
    function: String,
    /// Transform parameters as `key=value,...`
    #[arg(long)]
    fn_params: Option<String>,
}

fn parse_selector(s: &str) -> std::result::Result<Selector, String> {
    s.parse().map_err(|e: GenutError| e.to_string())
}

fn read_json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| GenutError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<DistributionSpec>),
    One(DistributionSpec),
}

fn read_dists(arg: &str) -> Result<Vec<DistributionSpec>> {
    Ok(match read_json_arg::<OneOrMany>(arg)? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(d) => vec![d],
    })
}

fn parse_bounds(s: Option<&str>, n: usize, fill: f64) -> Result<DVector<f64>> {
    let Some(s) = s else {
        return Ok(DVector::from_element(n, fill));
    };
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| GenutError::InvalidArgument(format!("bad bound list `{s}`: {e}")))?;
    Ok(DVector::from_vec(values))
}

#[derive(Serialize)]
struct SetOutput {
    #[serde(flatten)]
    set: SigmaPointSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    repair: Option<genut::RepairLog>,
}

fn build_set(a: &SetArgs) -> Result<(MomentSpec, SetOutput)> {
    let spec = match (&a.dist, &a.spec) {
        (Some(d), _) => independent_joint(&read_dists(d)?)?,
        (None, Some(s)) => read_json_arg::<MomentSpec>(s)?,
        (None, None) => {
            return Err(GenutError::InvalidArgument(
                "one of --dist or --spec is required".into(),
            ))
        }
    };
    let method: SqrtMethod = a.sqrt.parse()?;
    let n = spec.dim();
    let out = match a.scheme {
        SchemeArg::Ut => {
            let kappa = a.kappa.unwrap_or_else(|| genut::default_kappa(n));
            SetOutput {
                set: ut_sigma_points(spec.mean(), spec.covariance(), kappa)?,
                repair: None,
            }
        }
        SchemeArg::Genut => SetOutput {
            set: generate_with(&spec, &a.u.parse::<UChoice>()?, method)?,
            repair: None,
        },
        SchemeArg::GenutConstrained => {
            let base = generate_with(&spec, &a.u.parse::<UChoice>()?, method)?;
            let lower = parse_bounds(a.lower.as_deref(), n, f64::NEG_INFINITY)?;
            let upper = parse_bounds(a.upper.as_deref(), n, f64::INFINITY)?;
            let c = BoxConstraint::new(lower, upper, a.theta)?;
            let (set, log) = constrain_detailed(&spec, &base, &c)?;
            SetOutput { set, repair: Some(log) }
        }
    };
    Ok((spec, out))
}

/// Writes a line to stdout. A closed pipe (`genut ... | head`) is not an error.
fn say(line: std::fmt::Arguments) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{line}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(GenutError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    say(format_args!("{text}"))?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| GenutError::io(dir, e))?;
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, text).map_err(|e| GenutError::io(&path, e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let out = std::env::var_os("GENUT_OUT").map(PathBuf::from).or(cli.out);
    match cli.command {
        Command::SigmaPoints(a) => {
            let (_, set) = build_set(&a)?;
            emit(&set, out.as_deref(), "sigma-points")?;
        }
        Command::Propagate { set, transform } => {
            let (spec, s) = build_set(&set)?;
            let f = NamedTransform::parse(&transform.function, transform.fn_params.as_deref())?.build(spec.dim())?;
            emit(&propagate(&s.set, &f)?, out.as_deref(), "propagate")?;
        }
        Command::McTruth { dist, transform, n } => {
            let ds = read_dists(&dist)?;
            let f = NamedTransform::parse(&transform.function, transform.fn_params.as_deref())?.build(ds.len())?;
            emit(&mc_truth(&ds, &f, n, cli.seed)?, out.as_deref(), "mc-truth")?;
        }
        Command::Reproduce { selector } => {
            let dir = out.unwrap_or_else(|| PathBuf::from("reports"));
            let mut ok = true;
            for r in report::reproduce(selector, cli.seed)? {
                for path in report::write_report(&r, &dir, cli.format.into())? {
                    eprintln!("wrote {}", path.display());
                }
                let failed: Vec<_> = r.failures().collect();
                say(format_args!(
                    "{}: {}",
                    r.selector,
                    if failed.is_empty() { "pass" } else { "FAIL" }
                ))?;
                for row in failed {
                    say(format_args!(
                        "  {} {} {}: value {:?}, published {:?}, tolerance {:?}",
                        row.distribution, row.scheme, row.quantity, row.value, row.paper_value, row.tolerance
                    ))?;
                }
                ok &= r.all_pass();
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
