//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::{self, ClassStatus, ClassVerdict, NormEstimate};
use crate::coeffs::{convolve, frac_coeffs, tail_sum_bound, FracOrder, TailSum, DEFAULT_LEN};
use crate::compact::{self, Compactness};
use crate::dual::{self, Verdict};
use crate::error::{Error, Result};
use crate::fracop::{apply_forward, apply_inverse, Seq};
use crate::limit::{LimitEstimate, LimitStatus};
use crate::matrix::{Extend, GenSeq, MatrixSpec};
use crate::report::{to_json, vec_finite_or_tag};
use crate::spaces::{classify_in, classify_sequence, MembershipStatus, SpaceId};
use crate::tolerance::ToleranceConfig;
use crate::transform::{hat_matrix, HatMatrix, Transform};

#[derive(Debug, Parser)]
#[command(name = "fracseq", version, about = "Fractional difference sequence spaces and matrix classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Convergence tolerance (default 1e-8, or FRACSEQ_EPS).
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Diagnostic window length.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Largest set size enumerated exhaustively.
    #[arg(long, global = true)]
    pub subset_budget: Option<usize>,
    /// Rows of an infinite matrix to evaluate.
    #[arg(long, global = true)]
    pub truncate_rows: Option<usize>,
    /// Columns and tail terms to evaluate per row.
    #[arg(long, global = true)]
    pub truncate_cols: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct OrderArg {
    /// Order of the difference operator, decimal or p/q.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub order: OrderArg,
    /// Matrix description (JSON).
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients c_0..c_{n-1} of the operator.
    Coeffs {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value_t = DEFAULT_LEN)]
        n: usize,
        /// Second order; checks the product of both operators.
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
    },
    /// Apply the operator (or its inverse) to a sequence.
    Apply {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Membership of a sequence in c0d, cd or linfd.
    ClassifySeq {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        input: PathBuf,
        /// Test one space instead of finding the smallest.
        #[arg(long)]
        from: Option<SpaceId>,
    },
    /// Leading block of the transformed matrix with γ and β.
    Hat {
        #[command(flatten)]
        m: MatrixArgs,
        /// Rows and columns shown.
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// β-dual conditions for a sequence.
    BetaDual {
        #[command(flatten)]
        order: OrderArg,
        #[arg(long)]
        input: PathBuf,
        /// Space to test; all three when omitted.
        #[arg(long)]
        from: Option<SpaceId>,
    },
    /// Whether A maps one space into another.
    Class {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        from: SpaceId,
        #[arg(long)]
        to: SpaceId,
    },
    /// All twelve class verdicts.
    ClassTable {
        #[command(flatten)]
        m: MatrixArgs,
    },
    /// Operator norm estimates.
    Norm {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        from: SpaceId,
    },
    /// Bounds for the Hausdorff measure of noncompactness.
    Hmnc {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        from: SpaceId,
        #[arg(long)]
        to: SpaceId,
    },
    /// Compactness of L_A.
    Compact {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        from: SpaceId,
        #[arg(long)]
        to: SpaceId,
    },
}

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Determinate,
    Undetermined,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Determinate => 0,
            Outcome::Undetermined => 2,
        }
    }

    fn from_flag(undetermined: bool) -> Self {
        if undetermined {
            Outcome::Undetermined
        } else {
            Outcome::Determinate
        }
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    tolerance: ToleranceConfig,
    result: T,
}

/// Parses an order given as a decimal or as `p/q`.
pub fn parse_order(raw: &str) -> Result<FracOrder> {
    let raw = raw.trim();
    let bad = || Error::Parse { location: "--alpha".to_string(), message: format!("not a number: {raw:?}") };
    let value = match raw.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => raw.parse().map_err(|_| bad())?,
    };
    FracOrder::new(value)
}

impl Common {
    pub fn tolerance(&self) -> Result<ToleranceConfig> {
        let mut tol = ToleranceConfig::from_env()?;
        if let Some(eps) = self.eps {
            tol.eps = eps;
        }
        if let Some(w) = self.window {
            tol.window = w;
        }
        if let Some(b) = self.subset_budget {
            tol.subset_budget = b;
        }
        if let Some(r) = self.truncate_rows {
            tol.rows = r;
        }
        if let Some(c) = self.truncate_cols {
            tol.cols = c;
        }
        tol.validate()?;
        Ok(tol)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })
}

fn json_error(path: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        location: format!("{}: line {}, column {}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeqInput {
    Bare(Vec<f64>),
    Object {
        terms: Vec<f64>,
        #[serde(default)]
        extend: Extend,
    },
}

fn read_gen_seq(path: &Path) -> Result<GenSeq> {
    let text = read(path)?;
    let input: SeqInput = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    match input {
        SeqInput::Bare(terms) => GenSeq::finite(terms),
        SeqInput::Object { terms, extend } => GenSeq::new(terms, extend),
    }
}

fn read_seq(path: &Path) -> Result<Seq> {
    let g = read_gen_seq(path)?;
    if g.extend() != Extend::Zero {
        return Err(Error::usage("this command needs a finite sequence (no extend rule)"));
    }
    Seq::new(g.terms().to_vec())
}

fn read_matrix(path: &Path) -> Result<MatrixSpec> {
    let text = read(path)?;
    MatrixSpec::from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => {
            Error::Parse { location: format!("{}: {location}", path.display()), message }
        }
        other => other,
    })
}

#[derive(Serialize)]
struct CoeffsResult {
    n: usize,
    #[serde(serialize_with = "vec_finite_or_tag")]
    coefficients: Vec<f64>,
    abs_sum: TailSum,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<ProductCheck>,
}

#[derive(Serialize)]
struct ProductCheck {
    beta: f64,
    #[serde(serialize_with = "vec_finite_or_tag")]
    convolution: Vec<f64>,
    max_defect: f64,
}

#[derive(Serialize)]
struct ApplyResult {
    inverse: bool,
    #[serde(serialize_with = "vec_finite_or_tag")]
    terms: Vec<f64>,
}

#[derive(Serialize)]
struct HatResult {
    hat: HatMatrix,
    gamma: Vec<LimitEstimate>,
    beta: LimitEstimate,
}

#[derive(Serialize)]
struct NormResult {
    from: SpaceId,
    sup_norm: NormEstimate,
    group_norm: NormEstimate,
}

#[derive(Serialize)]
struct TableResult {
    verdicts: Vec<ClassVerdict>,
}

/// Runs one command; returns the rendered report and the exit outcome.
pub fn execute(cli: &Cli) -> Result<(String, Outcome)> {
    let tol = cli.common.tolerance()?;
    let format = cli.common.format;
    macro_rules! emit {
        ($name:expr, $alpha:expr, $result:expr, $outcome:expr) => {{
            let report = Report { command: $name, alpha: $alpha, tolerance: tol, result: $result };
            let text = match format {
                Format::Json => to_json(&report),
                Format::Table => render_table(&serde_json::to_value(&report).expect("serializable")),
            };
            Ok((text, $outcome))
        }};
    }
    match &cli.command {
        Command::Coeffs { order, n, beta } => {
            let a = parse_order(&order.alpha)?;
            let series = frac_coeffs(a, *n)?;
            let product = match beta {
                Some(b) => {
                    let b = parse_order(b)?;
                    let sb = frac_coeffs(b, *n)?;
                    let conv = convolve(&series, &sb)?;
                    let sum_order = FracOrder::new(a.value() + b.value())?;
                    let direct = frac_coeffs(sum_order, *n)?;
                    let max_defect = conv
                        .iter()
                        .zip(direct.terms())
                        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                    Some(ProductCheck { beta: b.value(), convolution: conv, max_defect })
                }
                None => None,
            };
            let abs_sum = tail_sum_bound(&series);
            let result = CoeffsResult { n: *n, coefficients: series.into_terms(), abs_sum, product };
            emit!("coeffs", Some(a.value()), result, Outcome::Determinate)
        }
        Command::Apply { order, input, inverse } => {
            let a = parse_order(&order.alpha)?;
            let x = read_seq(input)?;
            let y = if *inverse { apply_inverse(a, &x) } else { apply_forward(a, &x) };
            let result = ApplyResult { inverse: *inverse, terms: y.into_terms() };
            emit!("apply", Some(a.value()), result, Outcome::Determinate)
        }
        Command::ClassifySeq { order, input, from } => {
            let a = parse_order(&order.alpha)?;
            let x = read_seq(input)?;
            let verdict = match from {
                Some(space) => classify_in(a, &x, *space, &tol)?,
                None => classify_sequence(a, &x, &tol)?,
            };
            let outcome = Outcome::from_flag(verdict.status == MembershipStatus::Undetermined);
            emit!("classify-seq", Some(a.value()), verdict, outcome)
        }
        Command::Hat { m, n } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            let hat = hat_matrix(a, &spec, *n, *n, &tol)?;
            let t = Transform::new(a, &spec, &tol)?;
            let gamma: Vec<LimitEstimate> = (0..*n).map(|i| t.gamma(i)).collect();
            let beta = t.beta();
            let undetermined = hat.row_tail_flags.iter().any(|s| *s != LimitStatus::Converged)
                || gamma.iter().any(|g| !g.is_converged());
            emit!("hat", Some(a.value()), HatResult { hat, gamma, beta }, Outcome::from_flag(undetermined))
        }
        Command::BetaDual { order, input, from } => {
            let a = parse_order(&order.alpha)?;
            let seq = read_gen_seq(input)?;
            let spaces = match from {
                Some(s) => vec![*s],
                None => SpaceId::DOMAINS.to_vec(),
            };
            let reports = spaces
                .into_iter()
                .map(|s| dual::check_beta_dual(a, &seq, s, &tol))
                .collect::<Result<Vec<_>>>()?;
            let undetermined = reports.iter().any(|r| r.verdict == Verdict::Undetermined);
            emit!("beta-dual", Some(a.value()), reports, Outcome::from_flag(undetermined))
        }
        Command::Class { m, from, to } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            let v = classify::class_membership(a, &spec, *from, *to, &tol)?;
            let outcome = Outcome::from_flag(v.verdict == ClassStatus::Undetermined);
            emit!("class", Some(a.value()), v, outcome)
        }
        Command::ClassTable { m } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            let verdicts = classify::class_table(a, &spec, &tol)?;
            let outcome = Outcome::from_flag(verdicts.iter().any(|v| v.verdict == ClassStatus::Undetermined));
            if format == Format::Table {
                return Ok((render_class_grid(a, &verdicts), outcome));
            }
            emit!("class-table", Some(a.value()), TableResult { verdicts }, outcome)
        }
        Command::Norm { m, from } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            from.require_domain()?;
            let t = Transform::new(a, &spec, &tol)?;
            let sup_norm = classify::sup_norm_with(&t, *from);
            let group_norm = classify::group_norm_with(&t, *from);
            let outcome = Outcome::from_flag(
                sup_norm.status == LimitStatus::Undetermined || group_norm.status == LimitStatus::Undetermined,
            );
            emit!("norm", Some(a.value()), NormResult { from: *from, sup_norm, group_norm }, outcome)
        }
        Command::Hmnc { m, from, to } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            let b = compact::hmnc_bounds(a, &spec, *from, *to, &tol)?;
            let outcome = Outcome::from_flag(b.status != LimitStatus::Converged);
            emit!("hmnc", Some(a.value()), b, outcome)
        }
        Command::Compact { m, from, to } => {
            let a = parse_order(&m.order.alpha)?;
            let spec = read_matrix(&m.matrix)?;
            let v = compact::is_compact(a, &spec, *from, *to, &tol)?;
            let outcome = Outcome::from_flag(v.verdict == Compactness::Undetermined);
            emit!("compact", Some(a.value()), v, outcome)
        }
    }
}

/// Parses `args` and runs; returns the exit code with stdout and stderr text.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (0, text, String::new()),
                _ => (1, String::new(), text),
            };
        }
    };
    match execute(&cli) {
        Ok((out, outcome)) => (outcome.code(), out, String::new()),
        Err(e) => (1, String::new(), format!("error: {e}\n")),
    }
}

/// Flattens a JSON report into `path: value` lines.
fn render_table(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&p, v, out);
                }
            }
            Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                out.push_str(&format!("{prefix}: [{}]\n", parts.join(", ")));
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, out);
                }
            }
            other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

fn render_class_grid(order: FracOrder, verdicts: &[ClassVerdict]) -> String {
    let cell = |from: SpaceId, to: SpaceId| {
        verdicts
            .iter()
            .find(|v| v.from == from && v.to == to)
            .map(|v| {
                let s = match v.verdict {
                    ClassStatus::Member => "member",
                    ClassStatus::Fails => "fails",
                    ClassStatus::Undetermined => "undetermined",
                };
                format!("[{}] {}", v.bundle, s)
            })
            .unwrap_or_default()
    };
    let mut out = format!("order {order}\n{:<6}", "to");
    for from in SpaceId::DOMAINS {
        out.push_str(&format!(" | {:<18}", from.tag()));
    }
    out.push('\n');
    for to in SpaceId::CODOMAINS {
        out.push_str(&format!("{:<6}", to.tag()));
        for from in SpaceId::DOMAINS {
            out.push_str(&format!(" | {:<18}", cell(from, to)));
        }
        out.push('\n');
    }
    out
}
