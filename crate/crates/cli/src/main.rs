//! `mub6`: command-line front end for the order-6 Hadamard / MU-bases toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 failed verdict, 3 I/O or parse error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mub6_core::analysis::{analyze, ReportKind};
use mub6_core::equivalence::{dephase_with, to_lemma_form};
use mub6_core::families::{b6, fourier_f6, m6, s6};
use mub6_core::io::{self, analysis_value, lemma_form_value, lemma_report_value, matrix_to_json};
use mub6_core::musearch::{linspace, scan_m6, write_plot_data, write_scan_csv, OptimConfig};
use mub6_core::refutation::run_counterexample;
use mub6_core::{CMat6, Error, LemmaForm, Tolerances};

mod render;

#[derive(Parser, Debug)]
#[command(name = "mub6", version, about = "Order-6 complex Hadamard matrices and mutually unbiased bases")]
struct Cli {
    /// Equality tolerance for entry-wise predicates (also read from MUB6_TOL; the flag wins).
    #[arg(long, global = true, env = "MUB6_TOL", value_name = "EQ_TOL")]
    tol: Option<f64>,

    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Built-in matrix families, emitted in the JSON matrix format.
    Families {
        #[command(subcommand)]
        action: FamiliesAction,
    },
    /// Is the matrix complex Hadamard, i.e. is {I, H} a mutually unbiased pair?
    /// With --against K, also checks that {H, K} is a mutually unbiased pair (H†K Hadamard).
    Check {
        #[arg(long = "in", value_name = "JSON")]
        input: PathBuf,
        #[arg(long, value_name = "JSON")]
        against: Option<PathBuf>,
    },
    /// Dephase a matrix, or bring it to the normalized form whose dephased
    /// upper-left 3x2 block is real, [[1,1],[1,y],[1,x]]/√6.
    Normalize {
        #[arg(long = "in", value_name = "JSON")]
        input: PathBuf,
        /// Search permutations and rephasings for the real-block form; prints NONE if absent.
        #[arg(long)]
        lemma_form: bool,
    },
    /// Structural predicates: real entries (bound 22), real 3x2 blocks, 2x2 Hadamard
    /// blocks and H2-reducibility, 3x3 unitary blocks, three product-vector columns.
    /// Always exits 0.
    Analyze {
        #[arg(long = "in", value_name = "JSON")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Report::Full)]
        report: Report,
    },
    /// Transform M6(e^{it}) into the real-block form with column-2 tail (−1, s, −s)/√6 and
    /// test the claim that two entries of the third column must then vanish.
    /// Exit 0 when the claim is refuted, 2 otherwise.
    Refute {
        #[command(flatten)]
        t: Angle,
        /// Human-readable audit (default unless --json).
        #[arg(long, conflicts_with = "json")]
        text: bool,
    },
    /// Multi-start search for vectors unbiased to I and M6(e^{it}) over a grid of t,
    /// with basis extraction and MU-triple certificates. Counts are lower bounds.
    Scan {
        #[arg(long, value_enum, default_value_t = ScanFamily::M6)]
        family: ScanFamily,
        #[arg(long, allow_hyphen_values = true)]
        t_from: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_to: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 2000)]
        starts: usize,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// CSV destination (stdout if omitted).
        #[arg(long, value_name = "CSV")]
        out: Option<PathBuf>,
        /// Also write `t,n_mu_vectors` plot data.
        #[arg(long, value_name = "CSV")]
        plot: Option<PathBuf>,
        /// Fill the wall_time_s column (makes the CSV run-dependent).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand, Debug)]
enum FamiliesAction {
    /// Print one family member.
    Show {
        #[arg(long, value_enum)]
        family: Family,
        #[command(flatten)]
        t: OptAngle,
        #[arg(long, allow_hyphen_values = true)]
        x1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Angle {
    /// Parameter in radians.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Parameter in degrees.
    #[arg(long, allow_hyphen_values = true)]
    t_deg: Option<f64>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptAngle {
    /// Parameter in radians (m6).
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Parameter in degrees (m6).
    #[arg(long, allow_hyphen_values = true)]
    t_deg: Option<f64>,
}

fn radians(t: Option<f64>, t_deg: Option<f64>) -> Option<f64> {
    t.or(t_deg.map(f64::to_radians))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    M6,
    F6,
    B6,
    S6,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScanFamily {
    M6,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Report {
    Full,
    Real,
    H2,
    Product,
}

impl From<Report> for ReportKind {
    fn from(r: Report) -> Self {
        match r {
            Report::Full => ReportKind::Full,
            Report::Real => ReportKind::Real,
            Report::H2 => ReportKind::H2,
            Report::Product => ReportKind::Product,
        }
    }
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: 3, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 3,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    match cli.tol {
        None => Ok(Tolerances::default()),
        Some(t) => Tolerances::with_eq_tol(t).map_err(|e| Failure::usage(e.to_string())),
    }
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn say(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: <stdout>: {e}");
        std::process::exit(3);
    }
}

fn emit(v: &Value) {
    say(&(serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"));
}

fn run(cli: Cli) -> Outcome {
    let tol = tolerances(&cli)?;
    match &cli.command {
        Command::Families { action: FamiliesAction::Show { family, t, x1, x2, theta } } => {
            let h = build_family(*family, radians(t.t, t.t_deg), *x1, *x2, *theta, &tol)?;
            say(&(matrix_to_json(&h) + "\n"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { input, against } => check(input, against.as_deref(), &tol, cli.json),
        Command::Normalize { input, lemma_form } => normalize(input, *lemma_form, &tol, cli.json),
        Command::Analyze { input, report } => {
            let h = io::read_matrix(input)?;
            emit(&analysis_value(&analyze(&h, &tol), (*report).into()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Refute { t, .. } => {
            let t = radians(t.t, t.t_deg).expect("clap enforces one angle flag");
            let report = run_counterexample(t, &tol)?;
            if cli.json {
                emit(&lemma_report_value(&report));
            } else {
                say(&render::lemma_report(&report));
            }
            Ok(if report.refuted() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Scan { family: ScanFamily::M6, t_from, t_to, steps, starts, max_iters, out, plot, timing } => {
            let cfg = OptimConfig { starts: *starts, max_iters: *max_iters, seed: cli.seed, tol };
            cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
            if *steps == 0 {
                return Err(Failure::usage("--steps must be at least 1"));
            }
            let rows = scan_m6(&linspace(*t_from, *t_to, *steps), &cfg);
            if *timing {
                let total: f64 = rows.iter().map(|r| r.wall_time).sum();
                eprintln!("scan: {} rows, {total:.3} s", rows.len());
            }
            match out {
                Some(path) => {
                    let f = File::create(path).map_err(|e| Failure::io(path, e))?;
                    let mut w = BufWriter::new(f);
                    write_scan_csv(&rows, &mut w, *timing)
                        .and_then(|_| w.flush())
                        .map_err(|e| Failure::io(path, e))?;
                }
                None if !cli.json => {
                    let mut buf = Vec::new();
                    write_scan_csv(&rows, &mut buf, *timing).expect("writing to memory cannot fail");
                    say(&String::from_utf8(buf).expect("CSV is UTF-8"));
                }
                None => {}
            }
            if let Some(path) = plot {
                let f = File::create(path).map_err(|e| Failure::io(path, e))?;
                let mut w = BufWriter::new(f);
                write_plot_data(&rows, &mut w)
                    .and_then(|_| w.flush())
                    .map_err(|e| Failure::io(path, e))?;
            }
            if cli.json {
                emit(&render::scan_json(&rows, *timing));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn build_family(
    family: Family,
    t: Option<f64>,
    x1: Option<f64>,
    x2: Option<f64>,
    theta: Option<f64>,
    tol: &Tolerances,
) -> Result<CMat6, Failure> {
    let unused = |name: &str, given: bool| {
        if given {
            Err(Failure::usage(format!("--{name} does not apply to this family")))
        } else {
            Ok(())
        }
    };
    match family {
        Family::M6 => {
            unused("x1/--x2", x1.is_some() || x2.is_some())?;
            unused("theta", theta.is_some())?;
            let t = t.ok_or_else(|| Failure::usage("m6 needs --t or --t-deg"))?;
            Ok(m6(t, tol)?)
        }
        Family::F6 => {
            unused("t", t.is_some())?;
            unused("theta", theta.is_some())?;
            Ok(fourier_f6(x1.unwrap_or(0.0), x2.unwrap_or(0.0)).with_label(format!(
                "F6(x1={},x2={})",
                x1.unwrap_or(0.0),
                x2.unwrap_or(0.0)
            )))
        }
        Family::B6 => {
            unused("t", t.is_some())?;
            unused("x1/--x2", x1.is_some() || x2.is_some())?;
            let theta = theta.ok_or_else(|| Failure::usage("b6 needs --theta"))?;
            Ok(b6(theta)?)
        }
        Family::S6 => {
            unused("t", t.is_some())?;
            unused("x1/--x2", x1.is_some() || x2.is_some())?;
            unused("theta", theta.is_some())?;
            Ok(s6())
        }
    }
}

fn check(input: &Path, against: Option<&Path>, tol: &Tolerances, json: bool) -> Outcome {
    let h = io::read_matrix(input)?;
    let ok_h = mub6_core::linalg::is_hadamard(&h, tol);
    let mut passed = ok_h;
    let mut pair = Value::Null;
    if let Some(path) = against {
        let k = io::read_matrix(path)?;
        let overlap = &h.adjoint() * &k;
        let residual = overlap.hadamard_residual();
        let ok_k = mub6_core::linalg::is_hadamard(&k, tol);
        let mu = residual < tol.eq_tol;
        passed &= ok_k && mu;
        pair = json!({
            "label": k.label,
            "is_hadamard": ok_k,
            "mu_pair": mu,
            "overlap_residual": residual,
        });
    }
    let v = json!({
        "label": h.label,
        "is_hadamard": ok_h,
        "mu_with_identity": ok_h,
        "hadamard_residual": h.hadamard_residual(),
        "unitarity_residual": h.unitarity_residual(),
        "modulus_residual": h.modulus_residual(),
        "against": pair,
        "passed": passed,
    });
    if json {
        emit(&v);
    } else {
        say(&render::check(&v));
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn normalize(input: &Path, lemma_form: bool, tol: &Tolerances, json: bool) -> Outcome {
    let h = io::read_matrix(input)?;
    if !lemma_form {
        let (d, record) = dephase_with(&h, tol)?;
        if json {
            emit(&json!({
                "label": d.label,
                "matrix": io::matrix_value(&d),
                "record": io::record_value(&record),
            }));
        } else {
            say(&(matrix_to_json(&d) + "\n"));
        }
        return Ok(ExitCode::SUCCESS);
    }
    let lf: Option<LemmaForm> = to_lemma_form(&h, tol);
    match (&lf, json) {
        (Some(lf), true) => emit(&json!({ "found": true, "lemma_form": lemma_form_value(lf) })),
        (None, true) => emit(&json!({ "found": false, "lemma_form": null })),
        (Some(lf), false) => say(&render::lemma_form(lf)),
        (None, false) => say("NONE\n"),
    }
    Ok(ExitCode::SUCCESS)
}
