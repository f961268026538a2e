use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nilops::laws::{self, LawParams};
use nilops::modules::FiniteUnstableAlgebra;
use nilops::nilfilt::filtration_table;
use nilops::parser::{load_module, load_structured, parse_element, parse_op, parse_sum, Document};
use nilops::steenrod::{
    adem_normalize, conjugate, full_basis, ideal_membership, multiply, subalgebra_basis, AdmissibleSum,
};
use nilops::tor::bar_tor;

mod render;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "nilops", version, about = "Steenrod algebra, nilpotent filtration and bar-complex Tor over GF(2)")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Admissible normal form of an expression.
    Normalize { expr: String },
    /// The conjugate chi of an expression.
    Conjugate { expr: String },
    /// The product of two expressions.
    Multiply { left: String, right: String },
    /// Admissible basis in one degree, or a basis of A(n) there.
    Basis {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        subalgebra: Option<usize>,
    },
    /// Applies an operation to an element of a module.
    Act {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        op: String,
        /// Element as "degree:index,index + degree:index", or "0".
        #[arg(long)]
        element: String,
    },
    /// Nilpotent filtration layers M_s and quotients R_s.
    Filtration {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        smax: usize,
        /// Degree bound; defaults to the top degree of a finite module.
        #[arg(long)]
        dmax: Option<usize>,
        #[arg(long, default_value_t = 16)]
        cmax: usize,
    },
    /// Tor over a finite unstable algebra, with Steenrod action.
    Tor {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        smax: usize,
        #[arg(long)]
        tmax: usize,
        #[arg(long, default_value_t = 16)]
        cmax: usize,
    },
    /// Decides Sq^{2^n}-ideal membership of a target of degree 2^{n+1}.
    Membership {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        target: String,
    },
    /// Runs the law suite.
    Laws {
        /// Runs only these laws (repeatable).
        #[arg(long = "only")]
        only: Vec<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Runs only instance n of indexed laws.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        cmax: usize,
        /// Includes wall-clock timings (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
        /// Lists the law ids and exits.
        #[arg(long)]
        list: bool,
    },
}

/// Why a command failed, with its exit status.
enum Failure {
    Usage(String),
    Computation(String),
    Refuted(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Computation(_) => 2,
            Failure::Refuted(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn computation(e: impl std::fmt::Display) -> Failure {
    Failure::Computation(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn expr(text: &str) -> Result<AdmissibleSum, Failure> {
    parse_sum(text).map_err(usage)
}

fn terms(x: &AdmissibleSum) -> Value {
    Value::Array(x.terms().map(|m| json!(m.indices())).collect())
}

fn sum_json(input: &str, x: &AdmissibleSum) -> Value {
    json!({ "input": input, "result": x.to_string(), "degree": x.degree(), "terms": terms(x) })
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn emit(format: Format, text: String, value: Value) {
    let out = match format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
    };
    let _ = io::stdout().lock().write_all(out.as_bytes());
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("NILOPS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("NILOPS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(computation)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let format = cli.format;
    match cli.command {
        Command::Normalize { expr: e } => {
            let x = adem_normalize(&parse_op(&e).map_err(usage)?);
            emit(format, format!("{x}\n"), sum_json(&e, &x));
        }
        Command::Conjugate { expr: e } => {
            let x = conjugate(&expr(&e)?);
            emit(format, format!("{x}\n"), sum_json(&e, &x));
        }
        Command::Multiply { left, right } => {
            let x = multiply(&expr(&left)?, &expr(&right)?);
            let mut v = sum_json(&format!("({left}) ({right})"), &x);
            v["left"] = json!(left);
            v["right"] = json!(right);
            emit(format, format!("{x}\n"), v);
        }
        Command::Basis { degree, subalgebra } => {
            let elements: Vec<AdmissibleSum> = match subalgebra {
                None => full_basis(degree).into_iter().map(AdmissibleSum::from).collect(),
                Some(n) => subalgebra_basis(n, degree).in_degree(degree).to_vec(),
            };
            let header = match subalgebra {
                None => format!("# admissible basis, degree {degree}: dim {}\n", elements.len()),
                Some(n) => format!("# A({n}), degree {degree}: dim {}\n", elements.len()),
            };
            let text = header + &elements.iter().map(|x| format!("{x}\n")).collect::<String>();
            let value = json!({
                "degree": degree,
                "subalgebra": subalgebra,
                "dim": elements.len(),
                "basis": elements.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            emit(format, text, value);
        }
        Command::Act { module, op, element } => {
            let m = load_structured(&read(&module)?).map_err(usage)?;
            let a = expr(&op)?;
            let x = parse_element(&element, &m).map_err(usage)?;
            let y = m.act(&a, &x).map_err(computation)?;
            let spec = render::element_spec(&y);
            let labels = render::element_labels(&m, &y).map_err(computation)?;
            let text = format!("{spec}\n# {labels}\n");
            let value = json!({
                "module": m.to_string(),
                "op": a.to_string(),
                "element": render::element_spec(&x),
                "result": spec,
                "labels": labels,
            });
            emit(format, text, value);
        }
        Command::Filtration { module, smax, dmax, cmax } => {
            let m = load_structured(&read(&module)?).map_err(usage)?;
            let bound = match (dmax, m.top_degree()) {
                (Some(d), _) => d,
                (None, Some(t)) if m.bound().is_none() => t,
                _ => return Err(usage("--dmax is required for infinite modules")),
            };
            let table = filtration_table(&m, smax, bound, cmax).map_err(computation)?;
            let certs = render::certificates(&m, smax, bound, cmax).map_err(computation)?;
            emit(
                format,
                render::filtration_text(&table, smax, &certs),
                render::filtration_json(&table, smax, &certs),
            );
        }
        Command::Tor { algebra, smax, tmax, cmax } => {
            let a = match load_module(&read(&algebra)?).map_err(usage)? {
                Document::Algebra(a) => a,
                Document::Module(m) if (1..=m.top_degree()).all(|d| m.dim(d) == 0) => FiniteUnstableAlgebra::trivial(),
                Document::Module(_) => return Err(usage("the document has no products table; not an algebra")),
            };
            let page = bar_tor(&a, smax, tmax).map_err(computation)?;
            let columns = render::column_annotations(&page, &a, cmax).map_err(computation)?;
            emit(
                format,
                render::tor_text(&page, &a, &columns, cmax),
                render::tor_json(&page, &a, &columns, cmax),
            );
        }
        Command::Membership { n, target } => {
            let t = expr(&target)?;
            let w = ideal_membership(&t, n).map_err(computation)?;
            let label = |w: &[(AdmissibleSum, AdmissibleSum)]| {
                if w.is_empty() {
                    "0".to_string()
                } else {
                    w.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(" + ")
                }
            };
            let half = 1usize << n;
            let text = match &w {
                Some(w) => format!("# n = {n}, target {t}, ideal Abar({}) Sq{half} Abar({})\nmember\nwitness: {}\n", n - 1, n - 1, label(w)),
                None => format!("# n = {n}, target {t}, ideal Abar({}) Sq{half} Abar({})\nnot a member\n", n - 1, n - 1),
            };
            let value = json!({
                "n": n,
                "target": t.to_string(),
                "member": w.is_some(),
                "witness": w.as_ref().map(|w| w
                    .iter()
                    .map(|(a, b)| json!([a.to_string(), b.to_string()]))
                    .collect::<Vec<_>>()),
            });
            emit(format, text, value);
        }
        Command::Laws { only, seed, n, samples, cmax, timing, list } => {
            if list {
                let ids = laws::law_ids();
                emit(format, ids.iter().map(|id| format!("{id}\n")).collect(), json!(ids));
                return Ok(());
            }
            let params = LawParams {
                seed,
                n,
                samples,
                c_max: cmax,
                ..LawParams::default()
            };
            let reports = laws::run_suite(&only, &params).map_err(usage)?;
            let mut text = format!(
                "# laws seed={} samples={} max_top={} max_dim={} c_max={}\n",
                params.seed, params.samples, params.max_top, params.max_dim, params.c_max
            );
            for r in &reports {
                text.push_str(&r.line(timing));
                text.push('\n');
            }
            let failures: Vec<String> = reports.iter().filter(|r| r.is_failure()).map(|r| r.name()).collect();
            text.push_str(&format!("# {} reports, {} failures\n", reports.len(), failures.len()));
            emit(format, text, laws::suite_json(&params, &reports, timing));
            if reports.iter().any(|r| r.is_unexpected_refutation() || (r.is_failure() && r.expected_refutation)) {
                return Err(Failure::Refuted(format!("failing laws: {}", failures.join(", "))));
            }
            if !failures.is_empty() {
                return Err(Failure::Computation(format!("failing laws: {}", failures.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Computation(msg) | Failure::Refuted(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
