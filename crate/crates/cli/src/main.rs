use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hopf_cstar::document::{AlgebraDocument, Complex, TensorDocument};
use hopf_cstar::report::{self, NormReport, ReconstructReport, VerifyOptions, VerifyReport};
use hopf_cstar::{Error, DEFAULT_TOL};
use serde::de::DeserializeOwned;
use serde_json::Value;

const ALGEBRA_SCHEMA: &str = include_str!("../../../docs/schemas/algebra-document.schema.json");
const TENSOR_SCHEMA: &str = include_str!("../../../docs/schemas/tensor-document.schema.json");

/// Verify finite-dimensional Hopf C*-algebras.
#[derive(Parser, Debug)]
#[command(name = "hopf-cstar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full verification battery on an algebra document.
    Verify {
        file: PathBuf,
        /// Relative tolerance; overrides the document's own setting.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Seed for the sampled identities.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random elements and functionals to sample.
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Record wall-clock time per phase (makes the output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Estimate the Haagerup norm of a tensor document.
    Norm {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Seed for optimizer restarts and sampled lower bounds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover the group from a commutative algebra document.
    Reconstruct {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Exit status 2: the input could not be read or does not describe an algebra.
#[derive(Debug)]
struct InputError(String);

fn load<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}: invalid JSON: {e}", path.display())))?;
    let schema: Value = serde_json::from_str(schema).expect("bundled schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| {
            let at = e.instance_path().to_string();
            format!("at {}: {e}", if at.is_empty() { "/" } else { &at })
        })
        .collect();
    if !errors.is_empty() {
        return Err(InputError(format!("{}: schema violation\n  {}", path.display(), errors.join("\n  "))));
    }
    serde_json::from_value(value).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::InvalidInput(_) | Error::ShapeMismatch(_) | Error::Group(_))
}

fn fmt_complex(z: &Complex) -> String {
    let [re, im] = *z;
    let r = |x: f64| {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    };
    if im.abs() < 1e-12 {
        r(re)
    } else if re.abs() < 1e-12 {
        format!("{}i", r(im))
    } else {
        format!("{}{}{}i", r(re), if im < 0.0 { "-" } else { "+" }, r(im.abs()))
    }
}

fn fmt_vec(v: &[Complex]) -> String {
    format!("[{}]", v.iter().map(fmt_complex).collect::<Vec<_>>().join(", "))
}

fn verify_text(r: &VerifyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}: {} on blocks {:?}, dim {}", r.tool.name, r.tool.version, r.kind, r.block_dims, r.dim);
    let c = &r.comultiplication;
    let _ = writeln!(
        s,
        "comultiplication: {} (multiplicative {:.2e}, adjoint {:.2e}, unital {:.2e}, coassociativity {:.2e})",
        if c.passed { "ok" } else { "FAILED" },
        c.multiplicative,
        c.adjoint,
        c.unital,
        c.coassociativity
    );
    let h = &r.hopf;
    let _ = writeln!(
        s,
        "rank T1 = {}/{}, rank T2 = {}/{}: {}",
        h.rank_t1,
        h.full_rank,
        h.rank_t2,
        h.full_rank,
        if h.is_hopf { "Hopf" } else { "not Hopf" }
    );
    for (name, kernel) in [("T1", &h.kernel_t1), ("T2", &h.kernel_t2)] {
        for v in kernel {
            let _ = writeln!(s, "  kernel of {name}: {}", fmt_vec(v));
        }
    }
    if let Some(d) = &r.domains {
        let _ = writeln!(
            s,
            "domains: A0 dim {}, A0' dim {}, two-sided dim {} ({})",
            d.a0.dim,
            d.a0_prime.dim,
            d.script_a.dim,
            if d.script_a_closed { "closed under products" } else { "not closed under products" }
        );
    }
    if let Some(t) = &r.tables {
        let _ = writeln!(s, "counit on A0 basis: {}", fmt_vec(&t.counit));
        for (k, a) in t.antipode.iter().enumerate() {
            let _ = writeln!(s, "  S(b{k}) = {}", fmt_vec(a));
        }
    }
    if let Some(i) = &r.identities {
        let _ = writeln!(s, "identity battery: max residual {:.2e}", i.max);
    }
    if let Some(t) = &r.two_sided {
        let m = t.e.max(t.f1).max(t.f2).max(t.f3).max(t.f4);
        let _ = writeln!(s, "two-sided formulas: max residual {m:.2e}");
    }
    if let Some(a) = &r.agreement {
        let _ = writeln!(
            s,
            "left/right agreement on dim {}: counit {:.2e}, antipode {:.2e}",
            a.dim, a.counit, a.antipode
        );
    }
    match (&r.haar.found, &r.haar.faithful) {
        (true, Some(f)) => {
            let _ = writeln!(s, "Haar state: {} {}", fmt_vec(r.haar.state.as_deref().unwrap_or(&[])), if *f { "(faithful)" } else { "(not faithful)" });
        }
        _ => {
            let _ = writeln!(s, "Haar state: none");
        }
    }
    if let Some(rc) = &r.reconstruction {
        let _ = writeln!(s, "reconstruction: {}", reconstruct_line(rc));
    }
    if r.passed {
        let _ = writeln!(s, "result: PASS");
    } else {
        let _ = writeln!(s, "result: FAIL");
        for f in &r.failures {
            let _ = writeln!(s, "  {f}");
        }
    }
    if let Some(t) = &r.timings_ms {
        for (phase, ms) in t {
            let _ = writeln!(s, "  {phase}: {ms:.1} ms");
        }
    }
    s
}

fn reconstruct_line(r: &ReconstructReport) -> String {
    match (&r.order_profile, &r.error) {
        (Some(p), _) => format!("group of order {} with element orders {p:?}", r.order.unwrap_or(0)),
        (_, Some(e)) => format!("failed: {e}"),
        _ => "failed".into(),
    }
}

fn reconstruct_text(r: &ReconstructReport) -> String {
    let mut s = format!("{}\n", reconstruct_line(r));
    for row in r.table.iter().flatten() {
        let _ = writeln!(s, "  {}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
    }
    s
}

fn norm_text(r: &NormReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Haagerup norm in [{:.12}, {:.12}] (width {:.2e})", r.lower, r.upper, r.width);
    let _ = writeln!(s, "C*-norm {:.12}, rank {}", r.cstar_norm, r.rank);
    for (k, (p, q)) in r.left.iter().zip(&r.right).enumerate() {
        let _ = writeln!(s, "  p{k} = {}", fmt_vec(p));
        let _ = writeln!(s, "  q{k} = {}", fmt_vec(q));
    }
    s
}

fn emit<T: serde::Serialize>(value: &T, format: Format, text: impl Fn(&T) -> String) -> Result<(), Error> {
    let out = match format {
        Format::Json => report::to_json(value)?,
        Format::Text => text(value),
    };
    print!("{out}");
    Ok(())
}

enum Outcome {
    Pass,
    Fail,
}

enum Failure {
    Input(String),
    Other(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_input_error(&e) { Failure::Input(e.to_string()) } else { Failure::Other(e) }
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Verify { file, tol, format, seed, samples, timings } => {
            let doc: AlgebraDocument = load(&file, ALGEBRA_SCHEMA)?;
            let tolerance = tol.or(doc.tolerance()).unwrap_or(DEFAULT_TOL);
            let opts = VerifyOptions { tolerance, seed, samples, timings };
            let r = report::verify(&doc, &opts)?;
            emit(&r, format, verify_text)?;
            Ok(if r.passed { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Norm { file, format, seed } => {
            let doc: TensorDocument = load(&file, TENSOR_SCHEMA)?;
            let r = report::norm(&doc, seed)?;
            emit(&r, format, norm_text)?;
            Ok(Outcome::Pass)
        }
        Command::Reconstruct { file, tol, format } => {
            let doc: AlgebraDocument = load(&file, ALGEBRA_SCHEMA)?;
            let tolerance = tol.or(doc.tolerance()).unwrap_or(DEFAULT_TOL);
            match report::reconstruct_document(&doc, tolerance) {
                Ok(r) => {
                    emit(&r, format, reconstruct_text)?;
                    Ok(Outcome::Pass)
                }
                Err(e) if is_input_error(&e) => Err(e.into()),
                Err(e) => {
                    let r = ReconstructReport {
                        ok: false,
                        order: None,
                        table: None,
                        order_profile: None,
                        error: Some(e.to_string()),
                    };
                    emit(&r, format, reconstruct_text)?;
                    eprintln!("error: {e}");
                    Ok(Outcome::Fail)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
