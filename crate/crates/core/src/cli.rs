//! Command-line front end of the `aro` binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fixed6;
use crate::instance::{builtin_instance, load_instance, UCInstance};
use crate::intraday::{realization_sweep, SWEEP_CSV_HEADER};
use crate::norms::NormOrder;
use crate::pricing::convex_hull::{convex_hull_prices, ConvexHullResult};
use crate::pricing::{
    adaptive_uniform_day_ahead, deterministic_marginal, pay_as_bid_day_ahead, PaymentTable,
};
use crate::verify::{solve_any, verify_instance, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "aro",
    version,
    about = "Adaptive robust unit commitment and pricing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Robust commitment, policy and balance prices.
    Solve(Common),
    /// Payment table of one settlement scheme.
    Price {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        scheme: Scheme,
    },
    /// Intraday dispatch cost against the adaptive bound on a load grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Every invariant and theorem check; exit 3 on any failure.
    Verify(Common),
    /// Deterministic, robust and convex hull totals side by side.
    Compare(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Builtin instance: scarf, scarf-capacity or chen-multiperiod.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub builtin: Option<String>,
    /// Instance document.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Uncertainty set order: L1, L2 or Linf.
    #[arg(long, value_parser = parse_norm)]
    pub norm: Option<NormOrder>,
    /// Load budgets per period; one value applies to every period.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma_q: Option<Vec<f64>>,
    /// Capacity budgets per period; one value applies to every period.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta_p: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of the sampling checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Payasbid,
    Uniform,
    Marginal,
    Chull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    JsonLike,
}

fn parse_norm(s: &str) -> std::result::Result<NormOrder, String> {
    NormOrder::parse(s).ok_or_else(|| format!("unknown norm `{s}` (expected L1, L2 or Linf)"))
}

impl Common {
    /// The instance with every override applied.
    pub fn instance(&self) -> Result<UCInstance> {
        let mut inst = match (&self.builtin, &self.file) {
            (Some(name), None) => builtin_instance(name)?,
            (None, Some(path)) => load_instance(&std::fs::read_to_string(path)?)?,
            _ => {
                return Err(Error::validation(
                    "one instance source",
                    "give exactly one of --builtin and --file",
                ))
            }
        };
        if let Some(order) = self.norm {
            inst = inst.with_norm(order);
        }
        if self.gamma_q.is_some() || self.delta_p.is_some() {
            let g = self
                .gamma_q
                .clone()
                .unwrap_or_else(|| inst.uncertainty.gamma_q.clone());
            let d = self
                .delta_p
                .clone()
                .unwrap_or_else(|| inst.uncertainty.delta_p.clone());
            inst = inst.with_budgets(&g, &d)?;
        }
        inst.validate()?;
        Ok(inst)
    }
}

/// One cell of an output section.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
}

impl Cell {
    fn plain(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => fixed6(*v),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Num(v) if v.is_finite() => fixed6(*v),
            Cell::Num(_) => "null".into(),
        }
    }
}

fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

/// A titled table.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    fn new(title: &str, columns: &[&str]) -> Self {
        Section {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command prints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::JsonLike => self.json_like(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "{}", s.title);
            let cells: Vec<Vec<String>> = s
                .rows
                .iter()
                .map(|r| r.iter().map(Cell::plain).collect())
                .collect();
            let widths: Vec<usize> = (0..s.columns.len())
                .map(|j| {
                    cells
                        .iter()
                        .map(|r| r[j].len())
                        .chain([s.columns[j].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |row: &[String]| -> String {
                row.iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(j, (c, w))| {
                        if j == 0 {
                            format!("{c:<w$}")
                        } else {
                            format!("{c:>w$}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(out, "{}", line(&s.columns));
            let _ = writeln!(
                out,
                "{}",
                widths
                    .iter()
                    .map(|w| "-".repeat(*w))
                    .collect::<Vec<_>>()
                    .join("  ")
            );
            for r in &cells {
                let _ = writeln!(out, "{}", line(r));
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "{}", s.columns.join(","));
            for r in &s.rows {
                let _ = writeln!(
                    out,
                    "{}",
                    r.iter()
                        .map(|c| csv_field(&c.plain()))
                        .collect::<Vec<_>>()
                        .join(",")
                );
            }
        }
        out
    }

    fn json_like(&self) -> String {
        let mut out = String::from("{\n");
        for (k, s) in self.sections.iter().enumerate() {
            let _ = writeln!(out, "  {}: [", Cell::Text(s.title.clone()).json());
            for (n, r) in s.rows.iter().enumerate() {
                let fields: Vec<String> = s
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| format!("{}: {}", Cell::Text(c.clone()).json(), v.json()))
                    .collect();
                let comma = if n + 1 < s.rows.len() { "," } else { "" };
                let _ = writeln!(out, "    {{{}}}{comma}", fields.join(", "));
            }
            let comma = if k + 1 < self.sections.len() { "," } else { "" };
            let _ = writeln!(out, "  ]{comma}");
        }
        out.push_str("}\n");
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn payment_section(t: &PaymentTable) -> Section {
    let mut s = Section::new(
        &format!("payments ({})", t.scheme),
        &[
            "scheme",
            "generator",
            "commitment",
            "energy",
            "uncertainty",
            "uplift",
            "total",
        ],
    );
    for r in &t.rows {
        s.push(vec![
            text(&t.scheme),
            text(&r.generator),
            Cell::Num(r.commitment),
            Cell::Num(r.energy),
            Cell::Num(r.uncertainty),
            Cell::Num(r.uplift),
            Cell::Num(r.total),
        ]);
    }
    s
}

fn key_values(title: &str, pairs: Vec<(&str, Cell)>) -> Section {
    let mut s = Section::new(title, &["quantity", "value"]);
    for (k, v) in pairs {
        s.push(vec![text(k), v]);
    }
    s
}

fn solve_doc(inst: &UCInstance) -> Result<Document> {
    let (sol, cert) = solve_any(inst)?;
    let mut doc = Document::default();
    doc.sections.push(key_values(
        "summary",
        vec![
            ("objective", Cell::Num(sol.objective)),
            ("worst_case_dispatch_cost", Cell::Num(sol.eta)),
            ("dual_objective", Cell::Num(cert.dual_objective)),
            ("nu", Cell::Num(cert.nu)),
            ("approximate", text(cert.approximate.to_string())),
        ],
    ));
    let mut prices = Section::new("prices", &["period", "mu"]);
    for (t, mu) in cert.mu.iter().enumerate() {
        prices.push(vec![text((t + 1).to_string()), Cell::Num(*mu)]);
    }
    doc.sections.push(prices);
    let mut sched = Section::new(
        "schedule",
        &["generator", "period", "on", "startup", "shutdown", "u"],
    );
    for (i, g) in inst.generators.iter().enumerate() {
        for t in 0..inst.periods {
            sched.push(vec![
                text(&g.id),
                text((t + 1).to_string()),
                Cell::Num(sol.commitments.on[i][t]),
                Cell::Num(sol.commitments.startup[i][t]),
                Cell::Num(sol.commitments.shutdown[i][t]),
                Cell::Num(sol.policy.u[i][t]),
            ]);
        }
    }
    doc.sections.push(sched);
    let mut v = Section::new("policy_v", &["period", "generator", "node", "value"]);
    let mut z = Section::new("policy_z", &["period", "generator", "capacity_of", "value"]);
    for t in 0..inst.periods {
        for (i, g) in inst.generators.iter().enumerate() {
            for (j, node) in inst.demand_nodes.iter().enumerate() {
                v.push(vec![
                    text((t + 1).to_string()),
                    text(&g.id),
                    text(&node.id),
                    Cell::Num(sol.policy.v[t][i][j]),
                ]);
            }
            for (k, h) in inst.generators.iter().enumerate() {
                z.push(vec![
                    text((t + 1).to_string()),
                    text(&g.id),
                    text(&h.id),
                    Cell::Num(sol.policy.z[t][i][k]),
                ]);
            }
        }
    }
    doc.sections.push(v);
    doc.sections.push(z);
    Ok(doc)
}

fn chull_sections(ch: &ConvexHullResult) -> Vec<Section> {
    let mut prices = Section::new("convex_hull_prices", &["period", "price"]);
    for (t, p) in ch.prices.iter().enumerate() {
        prices.push(vec![text((t + 1).to_string()), Cell::Num(*p)]);
    }
    let summary = key_values(
        "convex_hull_summary",
        vec![
            ("dual_objective", Cell::Num(ch.dual_objective)),
            ("uc_objective", Cell::Num(ch.uc_objective)),
            ("gap", Cell::Num(ch.gap)),
        ],
    );
    vec![prices, summary]
}

fn price_doc(inst: &UCInstance, scheme: Scheme, format: Format) -> Result<Document> {
    let mut extra = Vec::new();
    let table = match scheme {
        Scheme::Payasbid => pay_as_bid_day_ahead(&solve_any(inst)?.0, inst),
        Scheme::Uniform => {
            let (sol, cert) = solve_any(inst)?;
            adaptive_uniform_day_ahead(&sol, &cert, inst)
        }
        Scheme::Marginal => deterministic_marginal(inst)?,
        Scheme::Chull => {
            let ch = convex_hull_prices(inst)?;
            extra = chull_sections(&ch);
            ch.payment_table()
        }
    };
    let mut doc = Document {
        sections: vec![payment_section(&table)],
    };
    // CSV keeps the fixed payment-table layout
    if format != Format::Csv {
        doc.sections.push(key_values(
            "totals",
            vec![("grand_total", Cell::Num(table.grand_total))],
        ));
        doc.sections.extend(extra);
    }
    Ok(doc)
}

fn sweep_doc(inst: &UCInstance, grid: usize) -> Result<Document> {
    let (sol, _) = solve_any(inst)?;
    let pts = realization_sweep(inst, &sol, grid)?;
    let cols: Vec<&str> = SWEEP_CSV_HEADER.split(',').collect();
    let mut s = Section::new("sweep", &cols);
    for p in &pts {
        s.push(vec![
            Cell::Num(p.total_residual),
            Cell::Num(p.cost),
            Cell::Num(p.bound),
            Cell::Num(p.price),
        ]);
    }
    Ok(Document { sections: vec![s] })
}

fn verify_doc(inst: &UCInstance, seed: u64) -> Result<(Document, bool)> {
    let report = verify_instance(inst, seed)?;
    let mut s = Section::new("checks", &["check", "status", "detail"]);
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        s.push(vec![text(c.name), text(status), text(&c.detail)]);
    }
    Ok((Document { sections: vec![s] }, report.passed()))
}

fn compare_doc(inst: &UCInstance) -> Result<Document> {
    let det = deterministic_marginal(inst)?;
    let (sol, cert) = solve_any(inst)?;
    let aro = adaptive_uniform_day_ahead(&sol, &cert, inst);
    let (det_sol, _) = solve_any(&inst.deterministic())?;
    let ch = match convex_hull_prices(inst) {
        Ok(ch) => Some(ch),
        Err(Error::Enumeration { .. }) => None,
        Err(e) => return Err(e),
    };
    let ch_pay: Option<Vec<f64>> = ch.as_ref().map(|c| c.payment_table().totals());
    let opt = |v: Option<f64>| v.map_or_else(|| text("n/a"), Cell::Num);
    let mut s = Section::new(
        "totals",
        &["generator", "deterministic", "robust", "convex_hull"],
    );
    for (i, g) in inst.generators.iter().enumerate() {
        s.push(vec![
            text(&g.id),
            Cell::Num(det.rows[i].total),
            Cell::Num(aro.rows[i].total),
            opt(ch_pay.as_ref().map(|p| p[i])),
        ]);
    }
    s.push(vec![
        text("TOTAL"),
        Cell::Num(det.grand_total),
        Cell::Num(aro.grand_total),
        opt(ch_pay.as_ref().map(|p| p.iter().sum())),
    ]);
    let objectives = Section {
        title: "objectives".into(),
        columns: vec![
            "quantity".into(),
            "deterministic".into(),
            "robust".into(),
            "convex_hull".into(),
        ],
        rows: vec![vec![
            text("objective"),
            Cell::Num(det_sol.objective),
            Cell::Num(sol.objective),
            opt(ch.as_ref().map(|c| c.dual_objective)),
        ]],
    };
    Ok(Document {
        sections: vec![s, objectives],
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Consistency(_) => EXIT_CONSISTENCY,
        _ => EXIT_ERROR,
    }
}

fn execute(cli: &Cli) -> Result<(Document, Format, Option<PathBuf>, bool)> {
    let (common, doc, ok) = match &cli.command {
        Command::Solve(c) => (c, solve_doc(&c.instance()?)?, true),
        Command::Price { common, scheme } => (
            common,
            price_doc(&common.instance()?, *scheme, common.format)?,
            true,
        ),
        Command::Sweep { common, grid } => (common, sweep_doc(&common.instance()?, *grid)?, true),
        Command::Verify(c) => {
            let (doc, ok) = verify_doc(&c.instance()?, c.seed)?;
            (c, doc, ok)
        }
        Command::Compare(c) => (c, compare_doc(&c.instance()?)?, true),
    };
    Ok((doc, common.format, common.out.clone(), ok))
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok((doc, format, out, ok)) => {
            let body = doc.render(format);
            let written = match out {
                Some(path) => std::fs::write(&path, body),
                None => stdout.write_all(body.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_ERROR;
            }
            if ok {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "error: at least one check failed");
                EXIT_CONSISTENCY
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
