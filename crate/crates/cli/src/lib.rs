//! Command-line front end: reads the JSON file formats of `core_entropy`,
//! runs one operation and prints a JSON (or plain table) report.
//!
//! Exit codes: 0 success, 1 domain or validation failure, 2 parse or I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use core_entropy::circle::Angle;
use core_entropy::hubbard::{
    self, cycle_decomposition, forest_entropy, mu, poly_continuity_verdict, validate_forest, ForestData,
};
use core_entropy::markov::EntropyValue;
use core_entropy::newton::{self, NewtonData, NewtonDescription};
use core_entropy::portrait::{check_marking_properties, itinerary, unlinked_classes, PortraitData, Side};
use core_entropy::render::render_portrait;
use core_entropy::scan::{scan_continuity, ScanSpec};
use core_entropy::thurston::transition_graph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "core-entropy", version, about = "Core entropy of postcritically-finite polynomials and Newton maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write the report (or SVG) to this path instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Convergence tolerance for `scan continuity` (overrides the file).
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Print JSON (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Print a plain-text table instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical portraits and markings.
    #[command(subcommand)]
    Portrait(PortraitCmd),
    /// Core entropy from portraits, Hubbard forests or Newton descriptions.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// `mu` and continuity verdicts for a Hubbard forest.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Continuity verdicts for Newton maps.
    #[command(subcommand)]
    Newton(NewtonCmd),
    /// Entropy along a portrait sequence.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// SVG diagrams.
    #[command(subcommand)]
    Render(RenderCmd),
}

#[derive(Subcommand, Debug)]
pub enum PortraitCmd {
    /// Check the portrait clauses (and C1-C7 when every block has a role).
    Validate { file: PathBuf },
    /// List the unlinked classes.
    Classes { file: PathBuf },
    /// Left or right itinerary of an angle.
    Itinerary {
        file: PathBuf,
        #[arg(long)]
        angle: String,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// Entropy of a critical portrait from its pair-transition matrix.
    Thurston { file: PathBuf },
    /// Entropy of a Hubbard forest.
    Tree { file: PathBuf },
    /// Core entropy of a Newton description.
    Newton { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum PolyCmd {
    /// Minimum entropy over the weak Julia markings.
    Mu { file: PathBuf },
    /// Compare h with mu.
    Verdict { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum NewtonCmd {
    /// Continuity verdict from the renormalization components.
    Verdict {
        file: PathBuf,
        /// Use the cubic criterion (hyperbolic or non-renormalizable).
        #[arg(long)]
        cubic: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScanCmd {
    /// Entropy gaps along a sequence converging to the target portrait.
    Continuity { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum RenderCmd {
    /// Unit-circle SVG of a portrait with its unlinked classes.
    Portrait { file: PathBuf },
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    /// Invalid mathematical input or an undecidable result; carries a report.
    Domain(Value),
    /// Unreadable file or malformed JSON.
    Input(String),
}

impl Failure {
    fn domain(e: impl std::fmt::Display) -> Failure {
        Failure::Domain(json!({ "error": e.to_string() }))
    }
}

/// What a command produced.
pub enum Output {
    Report(Value),
    Svg(String),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Rounds every non-integer number to 12 significant digits.
pub fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn entropy_fields(out: &mut Map<String, Value>, key: &str, e: &EntropyValue) {
    out.insert(key.to_string(), json!(e.value));
    out.insert(format!("{key}_lower"), json!(e.lower));
    out.insert(format!("{key}_upper"), json!(e.upper));
}

fn entropy_report(e: &EntropyValue) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("entropy".into(), json!(e.value));
    m.insert("lower".into(), json!(e.lower));
    m.insert("upper".into(), json!(e.upper));
    m
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn load_forest(path: &Path) -> Result<hubbard::HubbardForest, Failure> {
    validate_forest(read_json::<ForestData>(path)?).map_err(Failure::domain)
}

fn load_newton(path: &Path) -> Result<NewtonDescription, Failure> {
    let data: NewtonData = read_json(path)?;
    let spec = NewtonDescription::try_from(data).map_err(Failure::domain)?;
    newton::validate_newton(spec).map_err(Failure::domain)
}

fn portrait_cmd(cmd: &PortraitCmd) -> Result<Output, Failure> {
    match cmd {
        PortraitCmd::Validate { file } => {
            let data: PortraitData = read_json(file)?;
            let report = data.report();
            let mut out = json!({ "valid": report.is_ok(), "degree": data.degree, "report": to_value(&report) });
            if !report.is_ok() {
                return Err(Failure::Domain(out));
            }
            if data.blocks.iter().all(|b| b.role.is_some()) {
                let marking = data.marking().map_err(Failure::domain)?;
                let props = check_marking_properties(&marking);
                out["marking"] = to_value(&props);
                out["marking_valid"] = json!(props.all_pass());
            }
            Ok(Output::Report(out))
        }
        PortraitCmd::Classes { file } => {
            let portrait = read_json::<PortraitData>(file)?.portrait().map_err(Failure::domain)?;
            let classes: Vec<Value> = unlinked_classes(&portrait)
                .iter()
                .enumerate()
                .map(|(i, c)| json!({ "index": i + 1, "length": c.length().to_string(), "arcs": to_value(&c.arcs) }))
                .collect();
            Ok(Output::Report(json!({ "degree": portrait.degree(), "classes": classes })))
        }
        PortraitCmd::Itinerary { file, angle, side } => {
            let portrait = read_json::<PortraitData>(file)?.portrait().map_err(Failure::domain)?;
            let t: Angle = angle.parse().map_err(|e| Failure::Input(format!("--angle: {e}")))?;
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let it = itinerary(&portrait, t, side);
            Ok(Output::Report(json!({
                "angle": t.to_string(),
                "side": to_value(&side),
                "preperiod": it.preperiod,
                "period": it.period,
                "digits": it.digits,
            })))
        }
    }
}

fn entropy_cmd(cmd: &EntropyCmd) -> Result<Output, Failure> {
    match cmd {
        EntropyCmd::Thurston { file } => {
            let portrait = read_json::<PortraitData>(file)?.portrait().map_err(Failure::domain)?;
            let graph = transition_graph(&portrait);
            let h = if graph.pairs.is_empty() {
                EntropyValue::ZERO
            } else {
                core_entropy::markov::entropy(&graph.transition)
            };
            let mut out = entropy_report(&h);
            out.insert("pairs".into(), json!(graph.pairs.len()));
            Ok(Output::Report(Value::Object(out)))
        }
        EntropyCmd::Tree { file } => {
            let forest = load_forest(file)?;
            let h = forest_entropy(&forest);
            let cycles = cycle_decomposition(&forest).map_err(Failure::domain)?;
            let mut out = entropy_report(&h);
            out.insert("cycles".into(), to_value(&cycles.cycles));
            Ok(Output::Report(Value::Object(out)))
        }
        EntropyCmd::Newton { file } => {
            let spec = load_newton(file)?;
            let h = newton::newton_core_entropy(&spec);
            let mut out = entropy_report(&h);
            if spec.extended_graph.is_some() {
                let g = newton::extended_graph_entropy(&spec).map_err(Failure::domain)?;
                out.insert("extended_graph".into(), to_value(&g));
            }
            if spec.roots.is_some() {
                let m = newton::description_multipliers(&spec).map_err(Failure::domain)?;
                out.insert("multipliers".into(), to_value(&m));
            }
            Ok(Output::Report(Value::Object(out)))
        }
    }
}

fn poly_cmd(cmd: &PolyCmd) -> Result<Output, Failure> {
    match cmd {
        PolyCmd::Mu { file } => {
            let forest = load_forest(file)?;
            let m = mu(&forest).map_err(Failure::domain)?;
            let mut out = Map::new();
            entropy_fields(&mut out, "mu", &m.mu);
            out.insert("witness".into(), json!(m.witness.to_string()));
            out.insert("markings".into(), json!(m.markings));
            Ok(Output::Report(Value::Object(out)))
        }
        PolyCmd::Verdict { file } => {
            let forest = load_forest(file)?;
            let v = poly_continuity_verdict(&forest).map_err(Failure::domain)?;
            let mut out = Map::new();
            out.insert("verdict".into(), to_value(&v.verdict));
            entropy_fields(&mut out, "h", &v.h);
            entropy_fields(&mut out, "mu", &v.mu);
            out.insert("witness".into(), json!(v.witness.to_string()));
            Ok(Output::Report(Value::Object(out)))
        }
    }
}

fn newton_cmd(cmd: &NewtonCmd) -> Result<Output, Failure> {
    match cmd {
        NewtonCmd::Verdict { file, cubic } => {
            let spec = load_newton(file)?;
            let v = if *cubic {
                newton::cubic_verdict(&spec)
            } else {
                newton::newton_continuity_verdict(&spec)
            }
            .map_err(Failure::domain)?;
            let mut out = Map::new();
            out.insert("verdict".into(), to_value(&v.verdict));
            entropy_fields(&mut out, "h", &v.h);
            out.insert("maximal_components".into(), json!(v.maximal_components));
            out.insert("per_component".into(), to_value(&v.per_component));
            Ok(Output::Report(Value::Object(out)))
        }
    }
}

fn scan_cmd(cmd: &ScanCmd, tolerance: Option<f64>) -> Result<Output, Failure> {
    match cmd {
        ScanCmd::Continuity { file } => {
            let mut spec: ScanSpec = read_json(file)?;
            if let Some(t) = tolerance {
                spec.tolerance = t;
            }
            let table = scan_continuity(&spec).map_err(Failure::domain)?;
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| json!({ "n": r.n, "distance": r.distance, "entropy": r.entropy.value, "gap": r.gap }))
                .collect();
            Ok(Output::Report(json!({
                "target_entropy": table.target_entropy.value,
                "tolerance": spec.tolerance,
                "final_gap": table.final_gap,
                "converged": table.converged,
                "rows": rows,
            })))
        }
    }
}

fn render_cmd(cmd: &RenderCmd) -> Result<Output, Failure> {
    match cmd {
        RenderCmd::Portrait { file } => {
            let portrait = read_json::<PortraitData>(file)?.portrait().map_err(Failure::domain)?;
            Ok(Output::Svg(render_portrait(&portrait)))
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Portrait(c) => portrait_cmd(c),
        Command::Entropy(c) => entropy_cmd(c),
        Command::Poly(c) => poly_cmd(c),
        Command::Newton(c) => newton_cmd(c),
        Command::Scan(c) => scan_cmd(c, cli.output.tolerance),
        Command::Render(c) => render_cmd(c),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Plain-text layout: scalars as `key  value`, arrays of flat objects as
/// column tables, anything else as compact JSON.
pub fn format_table(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{v}\n");
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    let mut tables = Vec::new();
    for (k, v) in map {
        match (scalar(v), v) {
            (Some(s), _) => out.push_str(&format!("{k:width$}  {s}\n")),
            (None, Value::Array(items)) if items.iter().all(|i| i.as_object().is_some_and(|o| o.values().all(|x| scalar(x).is_some()))) && !items.is_empty() => {
                tables.push((k, items));
            }
            (None, other) => out.push_str(&format!("{k:width$}  {other}\n")),
        }
    }
    for (name, items) in tables {
        let columns: Vec<&String> = items[0].as_object().map(|o| o.keys().collect()).unwrap_or_default();
        let cells: Vec<Vec<String>> = items
            .iter()
            .map(|i| columns.iter().map(|c| scalar(&i[c.as_str()]).unwrap_or_default()).collect())
            .collect();
        let widths: Vec<usize> = columns
            .iter()
            .enumerate()
            .map(|(j, c)| cells.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        out.push_str(&format!("\n{name}\n"));
        let line = |row: Vec<String>| -> String {
            row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
        };
        out.push_str(&line(columns.iter().map(|c| c.to_string()).collect()));
        out.push('\n');
        for row in cells {
            out.push_str(&line(row));
            out.push('\n');
        }
    }
    out
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let render = |v: Value| -> String {
        let v = round_numbers(v);
        if cli.output.table {
            format_table(&v)
        } else {
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
    };
    let (text, code) = match execute(&cli) {
        Ok(Output::Report(v)) => (render(v), EXIT_OK),
        Ok(Output::Svg(svg)) => (svg, EXIT_OK),
        Err(Failure::Domain(v)) => (render(v), EXIT_DOMAIN),
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    if let Err(msg) = emit(&text, cli.output.output.as_deref(), stdout) {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_INPUT;
    }
    code
}
