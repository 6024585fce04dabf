//! Percentage-error reports and reproduction of the published examples,
//! tables, and case studies.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GenutError, Result};
use crate::mc::{self, derive_seed, GENERATOR_ID};
use crate::moments::{independent_joint, DistributionSpec, MomentSpec};
use crate::propagation::{propagate, TransformFn, TransformResult};
use crate::sigma::{constrain, generate, BoxConstraint, SigmaPointSet, UChoice};
use crate::transforms::{sir_map, NamedTransform, SirState};
use crate::truth;
use crate::ut::{default_kappa, ut_sigma_points};

/// Magnitude below which a zero reference is considered matched.
pub const ZERO_MATCH: f64 = 1e-12;

/// Element-wise percentage errors. Entries whose reference is zero hold
/// `100·|approx|` and are flagged in `absolute`.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentageErrors {
    pub values: DMatrix<f64>,
    pub absolute: DMatrix<bool>,
}

/// `100·|approx − truth| / |truth|` element-wise.
pub fn percentage_error(approx: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<PercentageErrors> {
    if approx.shape() != truth.shape() {
        return Err(GenutError::DimensionMismatch {
            what: "percentage error operands",
            expected: truth.len(),
            found: approx.len(),
        });
    }
    let (r, c) = truth.shape();
    let mut values = DMatrix::zeros(r, c);
    let mut absolute = DMatrix::from_element(r, c, false);
    for j in 0..c {
        for i in 0..r {
            let (a, t) = (approx[(i, j)], truth[(i, j)]);
            let (v, abs) = scalar_error(a, t);
            values[(i, j)] = v;
            absolute[(i, j)] = abs;
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GenutError::NonFinite {
            what: "percentage error",
        });
    }
    Ok(PercentageErrors { values, absolute })
}

/// Vector form of [`percentage_error`].
pub fn percentage_error_vec(approx: &DVector<f64>, truth: &DVector<f64>) -> Result<PercentageErrors> {
    let a = DMatrix::from_column_slice(approx.len(), 1, approx.as_slice());
    let t = DMatrix::from_column_slice(truth.len(), 1, truth.as_slice());
    percentage_error(&a, &t)
}

fn scalar_error(a: f64, t: f64) -> (f64, bool) {
    if t == 0.0 {
        if a.abs() <= ZERO_MATCH {
            (0.0, false)
        } else {
            (100.0 * a.abs(), true)
        }
    } else {
        (100.0 * (a - t).abs() / t.abs(), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Genut,
    GenutConstrained,
    Ut,
    Mc,
    /// Published reference column only; never computed.
    Hosput,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Genut => "genut",
            Scheme::GenutConstrained => "genut-constrained",
            Scheme::Ut => "ut",
            Scheme::Mc => "mc",
            Scheme::Hosput => "hosput",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Mean,
    Covariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TruthSource {
    Analytic,
    Mc { draws: usize, seed: u64 },
}

/// Percentage errors of one scheme's estimate of one quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub distribution: String,
    pub scheme: Scheme,
    pub quantity: Quantity,
    pub errors: PercentageErrors,
    pub truth_source: TruthSource,
}

impl ErrorReport {
    fn from_result(
        distribution: &str,
        scheme: Scheme,
        approx: &TransformResult,
        truth_mean: &DVector<f64>,
        truth_cov: &DMatrix<f64>,
        truth_source: TruthSource,
    ) -> Result<[ErrorReport; 2]> {
        Ok([
            ErrorReport {
                distribution: distribution.to_string(),
                scheme,
                quantity: Quantity::Mean,
                errors: percentage_error_vec(&approx.mean, truth_mean)?,
                truth_source,
            },
            ErrorReport {
                distribution: distribution.to_string(),
                scheme,
                quantity: Quantity::Covariance,
                errors: percentage_error(&approx.covariance, truth_cov)?,
                truth_source,
            },
        ])
    }
}

/// Pass thresholds applied by [`reproduce`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// absolute, against values printed to four decimals
    pub printed_abs: f64,
    /// absolute, against exact sample statistics
    pub exact_abs: f64,
    /// percentage points, GenUT on quadratic maps and mean errors in the SIR case
    pub exact_pct: f64,
    /// percentage points, UT and GenUT against the published scalar tables
    pub table_pct: f64,
    /// two-sided normal quantile for Monte Carlo bands
    pub mc_band_z: f64,
    /// percentage points, random-vector case
    pub case2_pct: f64,
    /// percentage points, SIR case, GenUT covariance
    pub case3_genut_pct: f64,
    /// percentage points, SIR case, UT covariance
    pub case3_ut_pct: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    printed_abs: 5e-4,
    exact_abs: 1e-10,
    exact_pct: 1e-8,
    table_pct: 0.5,
    mc_band_z: 2.5758,
    case2_pct: 1.0,
    case3_genut_pct: 0.05,
    case3_ut_pct: 0.3,
};

/// Reproduction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    Example1,
    Example2,
    ScalarExample,
    Table2,
    Table3,
    Table4,
    Table5,
    Case2,
    Case3,
    All,
}

impl Selector {
    pub const SECTIONS: [Selector; 9] = [
        Selector::Example1,
        Selector::Example2,
        Selector::ScalarExample,
        Selector::Table2,
        Selector::Table3,
        Selector::Table4,
        Selector::Table5,
        Selector::Case2,
        Selector::Case3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Selector::Example1 => "example1",
            Selector::Example2 => "example2",
            Selector::ScalarExample => "scalar-example",
            Selector::Table2 => "table2",
            Selector::Table3 => "table3",
            Selector::Table4 => "table4",
            Selector::Table5 => "table5",
            Selector::Case2 => "case2",
            Selector::Case3 => "case3",
            Selector::All => "all",
        }
    }

    /// Individual sections covered by this selector.
    pub fn sections(&self) -> Vec<Selector> {
        match self {
            Selector::All => Self::SECTIONS.to_vec(),
            s => vec![*s],
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = GenutError;

    fn from_str(s: &str) -> Result<Self> {
        Self::SECTIONS
            .iter()
            .chain(std::iter::once(&Selector::All))
            .find(|sel| sel.name() == s)
            .copied()
            .ok_or_else(|| GenutError::InvalidArgument(format!("unknown selector `{s}`")))
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub distribution: String,
    pub scheme: Scheme,
    pub quantity: String,
    /// Percentage error of `value` against its reference.
    pub error_pct: Option<f64>,
    /// `error_pct` is `100·|value|` against a zero reference.
    pub absolute: bool,
    /// Computed quantity; equals `error_pct` for table rows.
    pub value: Option<f64>,
    /// What `value` is compared against when it differs from `paper_value`.
    pub reference: Option<f64>,
    pub paper_value: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl ReportRow {
    fn blank(distribution: &str, scheme: Scheme, quantity: String) -> Self {
        ReportRow {
            distribution: distribution.to_string(),
            scheme,
            quantity,
            error_pct: None,
            absolute: false,
            value: None,
            reference: None,
            paper_value: None,
            tolerance: None,
            pass: None,
        }
    }

    // A computed value checked against a printed or exact reference by
    // absolute distance.
    fn value_check(distribution: &str, scheme: Scheme, quantity: String, value: f64, paper: f64, tol: f64) -> Self {
        let (e, abs) = scalar_error(value, paper);
        ReportRow {
            error_pct: Some(e),
            absolute: abs,
            value: Some(value),
            paper_value: Some(paper),
            tolerance: Some(tol),
            pass: Some((value - paper).abs() <= tol),
            ..Self::blank(distribution, scheme, quantity)
        }
    }

    // A percentage error compared with the published percentage error.
    fn error_check(
        distribution: &str,
        scheme: Scheme,
        quantity: String,
        error: (f64, bool),
        paper: Option<f64>,
        tol: f64,
    ) -> Self {
        let pass = match paper {
            Some(p) => (error.0 - p).abs() <= tol,
            None => error.0 <= tol,
        };
        ReportRow {
            error_pct: Some(error.0),
            absolute: error.1,
            value: Some(error.0),
            paper_value: paper,
            tolerance: Some(tol),
            pass: Some(pass),
            ..Self::blank(distribution, scheme, quantity)
        }
    }

    fn published(distribution: &str, scheme: Scheme, quantity: String, paper: f64) -> Self {
        ReportRow {
            paper_value: Some(paper),
            ..Self::blank(distribution, scheme, quantity)
        }
    }
}

/// Output of one reproduction section.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub selector: Selector,
    pub seed: u64,
    pub generator_id: String,
    pub tolerances: Tolerances,
    pub truth_source: TruthSource,
    pub rows: Vec<ReportRow>,
}

impl Report {
    fn new(selector: Selector, seed: u64, truth_source: TruthSource) -> Self {
        Report {
            selector,
            seed,
            generator_id: GENERATOR_ID.to_string(),
            tolerances: TOLERANCES,
            truth_source,
            rows: Vec::new(),
        }
    }

    /// `true` when every row with a pass flag passed.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    /// First row matching the given labels.
    pub fn find(&self, distribution: &str, scheme: Scheme, quantity: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.distribution == distribution && r.scheme == scheme && r.quantity == quantity)
    }
}

/// Output file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl FromStr for Format {
    type Err = GenutError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "both" => Ok(Format::Both),
            other => Err(GenutError::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    distribution: &'a str,
    scheme: String,
    quantity: &'a str,
    error_pct: String,
    paper_value: String,
    pass: &'static str,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `<dir>/<selector>.csv` and/or `.json`; returns the paths written.
pub fn write_report(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| GenutError::io(dir, e))?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let path = dir.join(format!("{}.csv", report.selector));
        let file = std::fs::File::create(&path).map_err(|e| GenutError::io(&path, e))?;
        let mut w = csv::Writer::from_writer(file);
        for r in &report.rows {
            let mut error_pct = fmt_opt(r.error_pct);
            if r.absolute {
                error_pct.push('*');
            }
            w.serialize(CsvRow {
                distribution: &r.distribution,
                scheme: r.scheme.to_string(),
                quantity: &r.quantity,
                error_pct,
                paper_value: fmt_opt(r.paper_value),
                pass: match r.pass {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "n/a",
                },
            })?;
        }
        w.flush().map_err(|e| GenutError::io(&path, e))?;
        written.push(path);
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join(format!("{}.json", report.selector));
        let file = std::fs::File::create(&path).map_err(|e| GenutError::io(&path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), report)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs every section of `selector`.
pub fn reproduce(selector: Selector, seed: u64) -> Result<Vec<Report>> {
    selector
        .sections()
        .into_iter()
        .map(|s| reproduce_section(s, seed))
        .collect()
}

fn reproduce_section(selector: Selector, seed: u64) -> Result<Report> {
    match selector {
        Selector::Example1 => example1(seed),
        Selector::Example2 => example2(seed),
        Selector::ScalarExample => scalar_example(seed),
        Selector::Table2 => scalar_table(Selector::Table2, seed),
        Selector::Table3 => scalar_table(Selector::Table3, seed),
        Selector::Table4 => scalar_table(Selector::Table4, seed),
        Selector::Table5 => scalar_table(Selector::Table5, seed),
        Selector::Case2 => case2(seed),
        Selector::Case3 => case3(seed),
        Selector::All => unreachable!("expanded by sections()"),
    }
}

/// Independent Poisson pair with means 1.5 and 1.
pub fn poisson_pair() -> Result<MomentSpec> {
    independent_joint(&[
        DistributionSpec::Poisson { lambda: 1.5 },
        DistributionSpec::Poisson { lambda: 1.0 },
    ])
}

fn label(ds: &[DistributionSpec]) -> String {
    ds.iter().map(|d| d.label()).collect::<Vec<_>>().join(", ")
}

#[allow(clippy::too_many_arguments)]
fn push_set_rows(
    rows: &mut Vec<ReportRow>,
    dist: &str,
    scheme: Scheme,
    set: &SigmaPointSet,
    points: &[[f64; 5]; 2],
    weights: &[f64; 5],
    u: &[f64; 2],
    v: &[f64; 2],
) {
    let tol = TOLERANCES.printed_abs;
    for (r, row) in points.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            rows.push(ReportRow::value_check(
                dist,
                scheme,
                format!("point[{r},{c}]"),
                set.points()[(r, c)],
                x,
                tol,
            ));
        }
    }
    for (i, &w) in weights.iter().enumerate() {
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("weight[{i}]"),
            set.weights()[i],
            w,
            tol,
        ));
    }
    for i in 0..2 {
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("u[{i}]"),
            set.u()[i],
            u[i],
            tol,
        ));
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("v[{i}]"),
            set.v()[i],
            v[i],
            tol,
        ));
    }
}

// Sample statistics of the set itself against `expected`, each with its own
// tolerance (`None` skips the quantity).
fn push_statistics_rows(
    rows: &mut Vec<ReportRow>,
    dist: &str,
    scheme: Scheme,
    set: &SigmaPointSet,
    spec: &MomentSpec,
    kurt: Option<(&[f64], f64)>,
) -> Result<()> {
    let n = set.dim();
    let id = TransformFn::new("identity", n, n, |x| x.to_vec());
    let stats = propagate(set, &id)?;
    let tol = TOLERANCES.exact_abs;
    for i in 0..n {
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("mean[{i}]"),
            stats.mean[i],
            spec.mean()[i],
            tol,
        ));
    }
    for i in 0..n {
        for j in 0..n {
            rows.push(ReportRow::value_check(
                dist,
                scheme,
                format!("covariance[{i},{j}]"),
                stats.covariance[(i, j)],
                spec.covariance()[(i, j)],
                tol,
            ));
        }
    }
    for i in 0..n {
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("skewness[{i}]"),
            stats.skew_diag[i],
            spec.skew_diag()[i],
            tol,
        ));
    }
    let (kurt, ktol) = kurt.unwrap_or((spec.kurt_diag().as_slice(), tol));
    for (i, &k) in kurt.iter().enumerate().take(n) {
        rows.push(ReportRow::value_check(
            dist,
            scheme,
            format!("kurtosis[{i}]"),
            stats.kurt_diag[i],
            k,
            ktol,
        ));
    }
    Ok(())
}

fn example1(seed: u64) -> Result<Report> {
    let spec = poisson_pair()?;
    let set = generate(&spec, &UChoice::MatchKurtosis)?;
    let dist = "P(1.5), P(1)";
    let mut report = Report::new(Selector::Example1, seed, TruthSource::Analytic);
    push_set_rows(
        &mut report.rows,
        dist,
        Scheme::Genut,
        &set,
        &[[1.5, -0.1794, 1.5, 4.1794, 1.5], [1.0, 1.0, -0.3028, 1.0, 3.3028]],
        &[0.3333, 0.2049, 0.2129, 0.1284, 0.1204],
        &[1.3713, 1.3028],
        &[2.1878, 2.3028],
    );
    push_statistics_rows(&mut report.rows, dist, Scheme::Genut, &set, &spec, None)?;
    Ok(report)
}

fn example2(seed: u64) -> Result<Report> {
    let spec = poisson_pair()?;
    let base = generate(&spec, &UChoice::MatchKurtosis)?;
    let c = BoxConstraint::lower_only(DVector::zeros(2), 0.9)?;
    let set = constrain(&spec, &base, &c)?;
    let dist = "P(1.5), P(1)";
    let scheme = Scheme::GenutConstrained;
    let mut report = Report::new(Selector::Example2, seed, TruthSource::Analytic);
    push_set_rows(
        &mut report.rows,
        dist,
        scheme,
        &set,
        &[[1.5, 0.15, 1.5, 3.85, 1.5], [1.0, 1.0, 0.1, 1.0, 2.9]],
        &[-0.0576, 0.3003, 0.3968, 0.1725, 0.188],
        &[1.1023, 0.9],
        &[1.9188, 1.9],
    );
    let lowest = set.points().min();
    report.rows.push(ReportRow {
        value: Some(lowest),
        reference: Some(0.0),
        pass: Some(lowest >= 0.0),
        ..ReportRow::blank(dist, scheme, "min_point".into())
    });
    push_statistics_rows(
        &mut report.rows,
        dist,
        scheme,
        &set,
        &spec,
        Some((&[6.2587, 2.71], TOLERANCES.printed_abs)),
    )?;
    Ok(report)
}

fn scalar_example(seed: u64) -> Result<Report> {
    let spec = MomentSpec::scalar(0.1, 0.2, -0.5, 1.3)?;
    let set = generate(&spec, &UChoice::MatchKurtosis)?;
    let dist = "moments(0.1, 0.2, -0.5, 1.3)";
    let tol = TOLERANCES.printed_abs;
    let mut report = Report::new(Selector::ScalarExample, seed, TruthSource::Analytic);
    let rows = &mut report.rows;
    rows.push(ReportRow::value_check(
        dist,
        Scheme::Genut,
        "u[0]".into(),
        set.u()[0],
        5.8055,
        tol,
    ));
    rows.push(ReportRow::value_check(
        dist,
        Scheme::Genut,
        "v[0]".into(),
        set.v()[0],
        0.2153,
        tol,
    ));
    for (i, &w) in [0.2, 0.0286, 0.7714].iter().enumerate() {
        rows.push(ReportRow::value_check(
            dist,
            Scheme::Genut,
            format!("weight[{i}]"),
            set.weights()[i],
            w,
            tol,
        ));
    }
    push_statistics_rows(rows, dist, Scheme::Genut, &set, &spec, None)?;
    Ok(report)
}

/// Published columns of a scalar table: GenUT, UT, MC, HOSPUT.
type TableRow = (DistributionSpec, [f64; 4]);

fn quadratic_rows(covariance: bool) -> Vec<TableRow> {
    use DistributionSpec::*;
    let dists = [
        Gaussian { mu: 1.0, sigma2: 4.0 },
        Exponential { lambda: 2.0 },
        Gamma { a: 1.0, b: 2.0 },
        Weibull { a: 1.0, b: 2.0 },
        Rayleigh { sigma: 1.0 },
        Beta { a: 3.0, b: 4.0 },
        Binomial { n: 3, p: 0.3 },
        Poisson { lambda: 2.0 },
        Geometric { p: 0.5 },
        NegativeBinomial { r: 4.0, p: 0.67 },
    ];
    let mean_mc = [0.015, 0.069, 0.452, 0.005, 0.097, 0.063, 0.457, 0.270, 1.251, 0.668];
    let cov_ut = [0.0, 49.057, 64.0, 15.003, 16.815, 2.307, 16.380, 25.946, 67.662, 43.224];
    let cov_mc = [0.029, 0.249, 1.889, 0.310, 0.381, 0.613, 0.359, 1.061, 1.036, 2.356];
    dists
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let cols = if covariance {
                [0.0, cov_ut[i], cov_mc[i], 0.0]
            } else {
                [0.0, 0.0, mean_mc[i], 0.0]
            };
            (d, cols)
        })
        .collect()
}

fn trig_rows(covariance: bool) -> Vec<TableRow> {
    use DistributionSpec::*;
    let dists = [
        Gaussian { mu: 1.57, sigma2: 0.1 },
        Exponential { lambda: 2.0 },
        Gamma { a: 0.5, b: 0.5 },
        Weibull { a: 1.0, b: 2.0 },
        Rayleigh { sigma: 1.0 },
        Beta { a: 3.0, b: 4.0 },
        Binomial { n: 3, p: 0.3 },
        Poisson { lambda: 0.1 },
        Geometric { p: 0.7 },
        NegativeBinomial { r: 0.4, p: 0.67 },
    ];
    let (genut, ut, mc) = if covariance {
        (
            [
                5.026, 23.499, 20.749, 4.862, 12.158, 0.031, 11.033, 6.646, 12.074, 39.068,
            ],
            [
                5.026, 72.557, 61.391, 31.760, 50.678, 0.940, 24.806, 45.895, 87.637, 135.783,
            ],
            [0.444, 0.213, 0.372, 0.043, 0.531, 0.225, 0.060, 0.461, 0.070, 0.366],
        )
    } else {
        (
            [0.001, 0.219, 0.312, 0.017, 0.049, 0.0, 0.158, 0.275, 2.416, 0.176],
            [0.001, 5.788, 6.964, 0.831, 0.912, 0.038, 4.814, 18.305, 32.906, 44.172],
            [0.012, 0.110, 0.050, 0.029, 0.007, 0.037, 0.046, 0.531, 0.138, 0.383],
        )
    };
    // the HOSPUT column coincides with GenUT for scalar inputs
    dists
        .into_iter()
        .enumerate()
        .map(|(i, d)| (d, [genut[i], ut[i], mc[i], genut[i]]))
        .collect()
}

fn scalar_table(selector: Selector, seed: u64) -> Result<Report> {
    let (rows, quadratic, quantity) = match selector {
        Selector::Table2 => (quadratic_rows(false), true, Quantity::Mean),
        Selector::Table3 => (quadratic_rows(true), true, Quantity::Covariance),
        Selector::Table4 => (trig_rows(false), false, Quantity::Mean),
        Selector::Table5 => (trig_rows(true), false, Quantity::Covariance),
        _ => unreachable!(),
    };
    let transform = if quadratic {
        NamedTransform::Quadratic { alpha: 3.0, beta: 2.0 }
    } else {
        NamedTransform::Sin
    };
    let f = transform.build(1)?;
    let qname = match quantity {
        Quantity::Mean => "mean",
        Quantity::Covariance => "covariance",
    };
    let pick = |m: f64, v: f64| if quantity == Quantity::Mean { m } else { v };
    let mut report = Report::new(selector, seed, TruthSource::Analytic);
    let tol = TOLERANCES;

    for (idx, (d, paper)) in rows.iter().enumerate() {
        let dist = d.label();
        let t = if quadratic {
            truth::quadratic_truth(d, 3.0, 2.0)?
        } else {
            truth::sin_truth(d)?
        };
        let t_val = pick(t.mean, t.variance);
        let spec = independent_joint(std::slice::from_ref(d))?;

        let g = propagate(&generate(&spec, &UChoice::MatchKurtosis)?, &f)?;
        let g_err = scalar_error(pick(g.mean[0], g.covariance[(0, 0)]), t_val);
        let genut_row = if quadratic {
            ReportRow::error_check(&dist, Scheme::Genut, qname.into(), g_err, None, tol.exact_pct)
        } else {
            ReportRow::error_check(&dist, Scheme::Genut, qname.into(), g_err, Some(paper[0]), tol.table_pct)
        };
        report.rows.push(ReportRow {
            paper_value: Some(paper[0]),
            ..genut_row
        });

        let u = propagate(&ut_sigma_points(spec.mean(), spec.covariance(), default_kappa(1))?, &f)?;
        let u_err = scalar_error(pick(u.mean[0], u.covariance[(0, 0)]), t_val);
        report.rows.push(ReportRow::error_check(
            &dist,
            Scheme::Ut,
            qname.into(),
            u_err,
            Some(paper[1]),
            tol.table_pct,
        ));

        let draws = mc::DEFAULT_COMPARISON_DRAWS;
        let m = mc::mc_truth(std::slice::from_ref(d), &f, draws, derive_seed(seed, idx as u64))?;
        let m_err = scalar_error(pick(m.result.mean[0], m.result.covariance[(0, 0)]), t_val);
        let se = pick(m.mean_se[0], m.covariance_se[(0, 0)]);
        let band = tol.mc_band_z * 100.0 * se / t_val.abs();
        report.rows.push(ReportRow {
            paper_value: Some(paper[2]),
            reference: Some(t_val),
            ..ReportRow::error_check(&dist, Scheme::Mc, qname.into(), m_err, None, band)
        });

        report
            .rows
            .push(ReportRow::published(&dist, Scheme::Hosput, qname.into(), paper[3]));
    }
    Ok(report)
}

/// Published percentage errors of a two-dimensional case.
struct CaseColumns {
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
}

#[allow(clippy::too_many_arguments)]
fn push_case_rows(
    rows: &mut Vec<ReportRow>,
    dist: &str,
    scheme: Scheme,
    approx: &TransformResult,
    truth_mean: &DVector<f64>,
    truth_cov: &DMatrix<f64>,
    truth_source: TruthSource,
    paper: &CaseColumns,
    mean_tol: f64,
    cov_tol: f64,
) -> Result<()> {
    let [mean, cov] = ErrorReport::from_result(dist, scheme, approx, truth_mean, truth_cov, truth_source)?;
    for i in 0..2 {
        let e = (mean.errors.values[(i, 0)], mean.errors.absolute[(i, 0)]);
        rows.push(ReportRow::error_check(
            dist,
            scheme,
            format!("mean[{i}]"),
            e,
            Some(paper.mean[i]),
            mean_tol,
        ));
    }
    for i in 0..2 {
        for j in 0..2 {
            let e = (cov.errors.values[(i, j)], cov.errors.absolute[(i, j)]);
            rows.push(ReportRow::error_check(
                dist,
                scheme,
                format!("covariance[{i},{j}]"),
                e,
                Some(paper.cov[i][j]),
                cov_tol,
            ));
        }
    }
    Ok(())
}

fn push_published_case(rows: &mut Vec<ReportRow>, dist: &str, paper: &CaseColumns) {
    for i in 0..2 {
        rows.push(ReportRow::published(
            dist,
            Scheme::Hosput,
            format!("mean[{i}]"),
            paper.mean[i],
        ));
    }
    for i in 0..2 {
        for j in 0..2 {
            rows.push(ReportRow::published(
                dist,
                Scheme::Hosput,
                format!("covariance[{i},{j}]"),
                paper.cov[i][j],
            ));
        }
    }
}

// Monte Carlo estimate against an exact reference, each entry within the
// normal band of its standard error.
fn push_mc_check(
    rows: &mut Vec<ReportRow>,
    dist: &str,
    m: &mc::McTruth,
    exact_mean: &DVector<f64>,
    exact_cov: &DMatrix<f64>,
) {
    let z = TOLERANCES.mc_band_z;
    for i in 0..2 {
        let t = exact_mean[i];
        let e = scalar_error(m.result.mean[i], t);
        let band = z * 100.0 * m.mean_se[i] / t.abs();
        rows.push(ReportRow {
            reference: Some(t),
            ..ReportRow::error_check(dist, Scheme::Mc, format!("mean[{i}]"), e, None, band)
        });
    }
    for i in 0..2 {
        for j in 0..2 {
            let t = exact_cov[(i, j)];
            let e = scalar_error(m.result.covariance[(i, j)], t);
            let band = z * 100.0 * m.covariance_se[(i, j)] / t.abs();
            rows.push(ReportRow {
                reference: Some(t),
                ..ReportRow::error_check(dist, Scheme::Mc, format!("covariance[{i},{j}]"), e, None, band)
            });
        }
    }
}

fn to_nalgebra(mean: [f64; 2], cov: [[f64; 2]; 2]) -> (DVector<f64>, DMatrix<f64>) {
    (
        DVector::from_column_slice(&mean),
        DMatrix::from_fn(2, 2, |i, j| cov[i][j]),
    )
}

/// `(sin(x₁x₂), cos(x₁x₂))` with `x₁ ~ Poisson(0.1)`, `x₂ ~ Rayleigh(1)`.
/// Truth is a `10⁷`-draw Monte Carlo estimate; the Monte Carlo rows compare
/// it with a Poisson series of Rayleigh quadratures.
fn case2(seed: u64) -> Result<Report> {
    let ds = [
        DistributionSpec::Poisson { lambda: 0.1 },
        DistributionSpec::Rayleigh { sigma: 1.0 },
    ];
    let dist = label(&ds);
    let f = NamedTransform::SinCosProduct.build(2)?;
    let draws = mc::DEFAULT_TRUTH_DRAWS;
    let source = TruthSource::Mc { draws, seed };
    let mut report = Report::new(Selector::Case2, seed, source);

    let truth = mc::mc_truth(&ds, &f, draws, seed)?;
    let (tm, tc) = (&truth.result.mean, &truth.result.covariance);
    let spec = independent_joint(&ds)?;
    let tol = TOLERANCES.case2_pct;

    let g = propagate(&generate(&spec, &UChoice::MatchKurtosis)?, &f)?;
    let genut_paper = CaseColumns {
        mean: [24.7, 0.05],
        cov: [[24.68, 8.77], [8.77, 20.13]],
    };
    push_case_rows(
        &mut report.rows,
        &dist,
        Scheme::Genut,
        &g,
        tm,
        tc,
        source,
        &genut_paper,
        tol,
        tol,
    )?;

    let u = propagate(&ut_sigma_points(spec.mean(), spec.covariance(), default_kappa(2))?, &f)?;
    let ut_paper = CaseColumns {
        mean: [63.87, 1.43],
        cov: [[145.51, 68.47], [68.47, 83.16]],
    };
    push_case_rows(
        &mut report.rows,
        &dist,
        Scheme::Ut,
        &u,
        tm,
        tc,
        source,
        &ut_paper,
        tol,
        tol,
    )?;

    push_published_case(
        &mut report.rows,
        &dist,
        &CaseColumns {
            mean: [51.64, 1.23],
            cov: [[126.93, 28.51], [28.51, 71.72]],
        },
    );

    let (em, ec) = truth::poisson_rayleigh_sin_cos(0.1, 1.0);
    let (em, ec) = to_nalgebra(em, ec);
    push_mc_check(&mut report.rows, &dist, &truth, &em, &ec);
    Ok(report)
}

/// One SIR step driven by Poisson(10) infected and Poisson(2) recovered
/// counts. Truth is exact summation over the joint pmf; the Monte Carlo rows
/// check a `10⁷`-draw estimate against it.
fn case3(seed: u64) -> Result<Report> {
    let ds = [
        DistributionSpec::Poisson { lambda: 10.0 },
        DistributionSpec::Poisson { lambda: 2.0 },
    ];
    let dist = label(&ds);
    let st = SirState::default();
    let f = NamedTransform::Sir(st).build(2)?;
    let mut report = Report::new(Selector::Case3, seed, TruthSource::Analytic);

    let (em, ec) = truth::independent_poisson_pair_moments([10.0, 2.0], |a, b| sir_map(&[a, b], &st));
    let (tm, tc) = to_nalgebra(em, ec);
    let spec = independent_joint(&ds)?;
    let t = TOLERANCES;

    let g = propagate(&generate(&spec, &UChoice::MatchKurtosis)?, &f)?;
    let genut_paper = CaseColumns {
        mean: [0.0, 0.0],
        cov: [[0.03, 0.0], [0.0, 0.0]],
    };
    push_case_rows(
        &mut report.rows,
        &dist,
        Scheme::Genut,
        &g,
        &tm,
        &tc,
        TruthSource::Analytic,
        &genut_paper,
        t.exact_pct,
        t.case3_genut_pct,
    )?;

    let u = propagate(&ut_sigma_points(spec.mean(), spec.covariance(), default_kappa(2))?, &f)?;
    let ut_paper = CaseColumns {
        mean: [0.0, 0.0],
        cov: [[2.56, 1.3], [1.3, 0.0]],
    };
    push_case_rows(
        &mut report.rows,
        &dist,
        Scheme::Ut,
        &u,
        &tm,
        &tc,
        TruthSource::Analytic,
        &ut_paper,
        t.exact_pct,
        t.case3_ut_pct,
    )?;

    push_published_case(
        &mut report.rows,
        &dist,
        &CaseColumns {
            mean: [0.0, 0.0],
            cov: [[0.3, 0.13], [0.13, 0.0]],
        },
    );

    let m = mc::mc_truth(&ds, &f, mc::DEFAULT_TRUTH_DRAWS, seed)?;
    push_mc_check(&mut report.rows, &dist, &m, &tm, &tc);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn identical_inputs_give_zero() {
        let e = percentage_error_vec(&dvector![18.0, -2.0], &dvector![18.0, -2.0]).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_truth_is_marked() {
        let e = percentage_error(&dmatrix![1e-13, 0.5], &dmatrix![0.0, 0.0]).unwrap();
        assert_eq!(e.values[(0, 0)], 0.0);
        assert!(!e.absolute[(0, 0)]);
        assert_eq!(e.values[(0, 1)], 50.0);
        assert!(e.absolute[(0, 1)]);
    }

    #[test]
    fn shape_mismatch() {
        assert!(percentage_error_vec(&dvector![1.0], &dvector![1.0, 2.0]).is_err());
    }

    #[test]
    fn selector_round_trip() {
        for s in Selector::SECTIONS {
            assert_eq!(s.name().parse::<Selector>().unwrap(), s);
        }
        assert_eq!("all".parse::<Selector>().unwrap().sections().len(), 9);
        assert!("table9".parse::<Selector>().is_err());
    }

    #[test]
    fn scalar_example_passes() {
        let r = reproduce(Selector::ScalarExample, 42).unwrap();
        assert!(r[0].all_pass());
    }
}
