//! `qpe`: command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or input error.

mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpe_core::colored_links::{bracket_colored, BracketOptions, ColoredDiagram};
use qpe_core::complexes::{simplify, tensor, Complex, ZComplex};
use qpe_core::homology::{closed_homology, homology_over, poincare_polynomial, BigradedGroups, Field};
use qpe_core::io::{complex_to_json, groups_to_json, parse_complex, tl_to_json};
use qpe_core::projectors::{build_qn, q2, q3, quasi_projector, truncated_pn, turnback_check, QuasiProjectorSpec};
use qpe_core::temperley_lieb::{euler_characteristic, jw, TLElement};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qpe", version, about = "Categorified Jones-Wenzl projectors and colored sl2 link homology")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Series precision for TL coefficients.
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(i32).range(4..))]
    precision: i32,
    /// Truncation window for infinite complexes.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(i32).range(4..))]
    window: i32,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file, or `json` / `table` to pick the format.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Temperley-Lieb computations.
    #[command(subcommand)]
    Tl(TlCmd),
    /// Operations on complex files.
    #[command(subcommand)]
    Complex(ComplexCmd),
    /// Projector complexes.
    #[command(subcommand)]
    Proj(ProjCmd),
    /// Homology of a closed complex.
    Homology {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FieldArg::Z)]
        field: FieldArg,
    },
    /// Colored link diagrams.
    #[command(subcommand)]
    Colored(ColoredCmd),
    /// Run built-in self-checks.
    Verify {
        /// One of the suite names, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Subcommand, Debug)]
enum TlCmd {
    /// The Jones-Wenzl projector.
    Jw {
        #[arg(long)]
        n: usize,
    },
    /// Graded Euler characteristic of a complex.
    Euler {
        #[arg(long)]
        complex: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ComplexCmd {
    Simplify { file: PathBuf },
    /// `a` stacked on top of `b`.
    Tensor { a: PathBuf, b: PathBuf },
    /// Check that `d² = 0` and that every entry is homogeneous of degree zero.
    Check { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ProjCmd {
    Q2,
    Q3,
    /// Truncated Cooper-Krushkal projector.
    Pn {
        #[arg(long)]
        n: usize,
    },
    /// `Q_n` assembled by the convolution solver.
    Qn {
        #[arg(long)]
        n: usize,
    },
    /// Quasi-projector with the given U_k cones.
    Quasi {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        indices: Vec<usize>,
    },
    /// Tensor with every turnback and report what survives.
    Turnback { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ColoredCmd {
    /// Link homology of one or more diagram files.
    Homology { files: Vec<PathBuf> },
    /// The bracket complex of a diagram.
    Bracket { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FieldArg {
    Z,
    Q,
    F2,
}

impl FieldArg {
    fn field(self) -> Field {
        match self {
            FieldArg::Z => Field::Integers,
            FieldArg::Q => Field::Rationals,
            FieldArg::F2 => Field::Prime(2),
        }
    }
}

/// A failure with its exit code.
struct Failure(u8, String);

impl From<qpe_core::Error> for Failure {
    fn from(e: qpe_core::Error) -> Self {
        Failure(2, format!("error: {}", e))
    }
}

struct Output {
    format: Format,
    file: Option<PathBuf>,
}

impl Output {
    fn new(c: &Config) -> Self {
        match c.out.as_deref() {
            Some("json") => Output { format: Format::Json, file: None },
            Some("table") => Output { format: Format::Table, file: None },
            Some(p) => Output { format: c.format, file: Some(PathBuf::from(p)) },
            None => Output { format: c.format, file: None },
        }
    }

    fn emit<T: Serialize>(&self, value: &T, table: impl FnOnce() -> String) -> Result<(), Failure> {
        let text = match self.format {
            Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
            Format::Table => table(),
        };
        match &self.file {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure(2, format!("error: cannot write {}: {}", p.display(), e))),
            None => {
                print!("{}", text);
                Ok(())
            }
        }
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure(2, format!("error: cannot read {}: {}", p.display(), e)))
}

fn load_complex(p: &Path) -> Result<Complex, Failure> {
    parse_complex(&read(p)?).map_err(|e| Failure(2, format!("error: {}: {}", p.display(), e)))
}

fn load_diagram(p: &Path) -> Result<ColoredDiagram, Failure> {
    ColoredDiagram::from_json(&read(p)?).map_err(|e| Failure(2, format!("error: {}: {}", p.display(), e)))
}

fn tl_table(a: &TLElement) -> String {
    let mut s = String::new();
    for (m, c) in a.terms() {
        let _ = writeln!(s, "{:?}: {}", m, c);
    }
    s
}

fn complex_table(c: &Complex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} -> {} points, {} objects{}", c.bot(), c.top(), c.total_objects(), match c.trunc() {
        Some(t) => format!(", truncated below {}", t),
        None => String::new(),
    });
    for (h, v) in c.degrees() {
        let objs: Vec<String> = v.iter().map(|o| format!("{:?}", o)).collect();
        let _ = writeln!(s, "h={:>3}: {}", h, objs.join(" "));
    }
    s
}

fn groups_table(g: &BigradedGroups, field: Field) -> String {
    format!("{}poincare: {}\n", g, poincare_polynomial(g, field))
}

fn ceiling() -> Result<Option<usize>, Failure> {
    match std::env::var("QPE_MAX_OBJECTS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure(2, format!("error: QPE_MAX_OBJECTS must be a number, got {:?}", v))),
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct TurnbackJson {
    i: usize,
    side: &'static str,
    residual: usize,
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    passed: bool,
    checks: &'a [verify::Check],
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = &cli.config;
    let out = Output::new(cfg);
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global().map_err(|e| Failure(2, format!("error: {}", e)))?;
    }
    match cli.command {
        Command::Tl(TlCmd::Jw { n }) => {
            let p = jw(n, cfg.precision)?;
            out.emit(&tl_to_json(&p), || tl_table(&p))
        }
        Command::Tl(TlCmd::Euler { complex }) => {
            let c = load_complex(&complex)?;
            let e = euler_characteristic(&c, cfg.precision)?;
            out.emit(&tl_to_json(&e), || tl_table(&e))
        }
        Command::Complex(cmd) => {
            let c = match cmd {
                ComplexCmd::Simplify { file } => simplify(&load_complex(&file)?),
                ComplexCmd::Tensor { a, b } => simplify(&tensor(&load_complex(&a)?, &load_complex(&b)?)?),
                ComplexCmd::Check { file } => {
                    // parsing already runs the check
                    let c = load_complex(&file)?;
                    println!("ok: {} objects", c.total_objects());
                    return Ok(());
                }
            };
            out.emit(&complex_to_json(&c), || complex_table(&c))
        }
        Command::Proj(ProjCmd::Turnback { file }) => {
            let r = turnback_check(&load_complex(&file)?)?;
            let rows: Vec<TurnbackJson> =
                r.entries.iter().map(|e| TurnbackJson { i: e.i, side: if e.above { "above" } else { "below" }, residual: e.residual }).collect();
            out.emit(&rows, || rows.iter().map(|r| format!("e_{} {}: {} objects left\n", r.i, r.side, r.residual)).collect())?;
            if r.kills_all() {
                Ok(())
            } else {
                Err(Failure(1, "some turnback survives".into()))
            }
        }
        Command::Proj(cmd) => {
            let c = match cmd {
                ProjCmd::Q2 => q2(),
                ProjCmd::Q3 => q3(),
                ProjCmd::Pn { n } => truncated_pn(n, cfg.window)?.complex,
                ProjCmd::Qn { n } => simplify(&build_qn(n, cfg.window)?),
                ProjCmd::Quasi { n, indices } => quasi_projector(&QuasiProjectorSpec::new(n, indices)?, cfg.window)?,
                ProjCmd::Turnback { .. } => unreachable!(),
            };
            out.emit(&complex_to_json(&c), || complex_table(&c))
        }
        Command::Homology { file, field } => {
            let c = load_complex(&file)?;
            let f = field.field();
            let g = homology_over(&ZComplex::from_closed(&c)?, f)?;
            let g = match c.valid_from() {
                Some(v) => g.restrict(v, i32::MAX),
                None => g,
            };
            out.emit(&groups_to_json(&g, f, c.valid_from()), || groups_table(&g, f))
        }
        Command::Colored(ColoredCmd::Bracket { file }) => {
            let d = load_diagram(&file)?;
            let c = bracket_colored(&d, BracketOptions { window: cfg.window, ceiling: ceiling()? })?;
            out.emit(&complex_to_json(&c), || complex_table(&c))
        }
        Command::Colored(ColoredCmd::Homology { files }) => {
            if files.is_empty() {
                return Err(Failure(2, "error: no diagram files given".into()));
            }
            let opts = BracketOptions { window: cfg.window, ceiling: ceiling()? };
            let diagrams = files.iter().map(|f| load_diagram(f)).collect::<Result<Vec<_>, _>>()?;
            let results: Vec<_> = diagrams
                .par_iter()
                .map(|d| -> qpe_core::Result<_> {
                    let c = bracket_colored(d, opts)?;
                    Ok((closed_homology(&c)?, c.valid_from()))
                })
                .collect();
            let mut json = vec![];
            let mut table = String::new();
            for (f, r) in files.iter().zip(results) {
                let (g, from) = r.map_err(|e| Failure(2, format!("error: {}: {}", f.display(), e)))?;
                json.push(groups_to_json(&g, Field::Integers, from));
                if files.len() > 1 {
                    let _ = writeln!(table, "# {}", f.display());
                }
                table.push_str(&groups_table(&g, Field::Integers));
            }
            if json.len() == 1 {
                out.emit(&json[0], || table)
            } else {
                out.emit(&json, || table)
            }
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" {
                verify::SUITES.to_vec()
            } else if verify::SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                return Err(Failure(2, format!("error: unknown suite {:?}; expected all or one of {}", suite, verify::SUITES.join(", "))));
            };
            let settings = verify::Settings { precision: cfg.precision, window: cfg.window, seed: cfg.seed };
            let checks: Vec<verify::Check> = names.par_iter().flat_map_iter(|s| verify::run(s, &settings)).collect();
            let passed = checks.iter().all(|c| c.passed);
            out.emit(&VerifyJson { passed, checks: &checks }, || {
                let mut s = String::new();
                for c in &checks {
                    let _ = writeln!(s, "[{}] {}: {}{}", if c.passed { "PASS" } else { "FAIL" }, c.suite, c.name, if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) });
                }
                let _ = writeln!(s, "{} of {} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
                s
            })?;
            if passed {
                Ok(())
            } else {
                Err(Failure(1, "verification failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("{}", msg);
            ExitCode::from(code)
        }
    }
}
