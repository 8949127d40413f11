//! The `tori` command line: reads torus documents, runs one computation and
//! prints a text or JSON report.
//!
//! Exit codes: 0 success, 1 a claim was refuted, 2 input error, 3 internal
//! error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tori::document::TorusDocument;
use tori::endo::{classify_algebra, compute_endo_ring};
use tori::neronseveri::{
    canonical_form_coordinates, compute_n_d, compute_ns, is_algebraic, polarization_search, AlgebraicityVerdict,
    NSLattice, PolarizationOutcome, SearchPhase,
};
use tori::papercheck::{
    big_vec_json, example1, example2, field_matrix_json, int_matrix_json, obstruction_json, random_torus_with_sqrt_d,
    scalar_cm_multiplications, scalar_cm_product, verify_corollaries, verify_proposition_seeded, Claim, ClaimStatus,
};
use tori::torus::{MultiplicationDatum, Torus};
use tori::{Error, GeneratorSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tori", version, about = "Endomorphisms and Neron-Severi lattices of complex tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the machine-readable report.
    #[arg(long, global = true)]
    json: bool,
    /// Bits of precision for approximate embeddings in the report.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Seed for randomized inputs (random examples, lambda samples).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Endomorphism ring basis, structure constants and classification.
    Endo { file: PathBuf },
    /// Neron-Severi rank and basis.
    Ns { file: PathBuf },
    /// N_D for one of the document's multiplications.
    Nd {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        mult: usize,
    },
    /// Polarization search on NS and the algebraicity verdict.
    Polarize { file: PathBuf },
    /// Classification of End_Q.
    Classify { file: PathBuf },
    /// Checks the N_D proposition for one multiplication.
    VerifyProp {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        mult: usize,
    },
    /// Checks the corollaries using all multiplications of the document.
    VerifyCor { file: PathBuf },
    /// Writes a document for one of the built-in examples.
    GenExample {
        kind: ExampleKind,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        d: i64,
        /// Example 1 parameter r = cube root of this integer (default 2).
        #[arg(long)]
        cube_root: Option<i64>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExampleKind {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Scalar,
    Random,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) => EXIT_INPUT,
            Failure::Core(e) if e.is_input_error() => EXIT_INPUT,
            Failure::Core(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => format!("error[Io]: {m}"),
            Failure::Core(e) => {
                let debug = format!("{e:?}");
                let kind = debug.split(['(', ' ', '{']).next().unwrap_or("Error");
                format!("error[{kind}]: {e}")
            }
        }
    }
}

struct Report {
    command: &'static str,
    claims: Vec<Claim>,
    witnesses: Map<String, Value>,
    approx: Map<String, Value>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report { command, claims: Vec::new(), witnesses: Map::new(), approx: Map::new() }
    }

    fn witness(&mut self, key: &str, v: Value) {
        self.witnesses.insert(key.into(), v);
    }

    fn code(&self) -> i32 {
        if self.claims.iter().any(|c| c.status == ClaimStatus::Refuted) {
            EXIT_REFUTED
        } else {
            EXIT_OK
        }
    }

    fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "claims": self.claims,
            "witnesses": self.witnesses,
            "approx": self.approx,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
        s.push('\n');
        s
    }

    fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for (k, v) in &self.witnesses {
            s.push_str(&format!("  {k}: {}\n", compact(v)));
        }
        if !self.claims.is_empty() {
            s.push_str("claims\n");
            for c in &self.claims {
                let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from));
                s.push_str(&format!("  [{}] {}\n", status.unwrap_or_default(), c.id));
            }
        }
        s
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

struct Loaded {
    torus: Torus,
    mults: Vec<MultiplicationDatum>,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let doc = TorusDocument::parse(&text)?;
    let torus = doc.torus()?;
    let mults = doc.attach_all(&torus)?;
    Ok(Loaded { torus, mults })
}

fn select(mults: &[MultiplicationDatum], k: usize) -> Result<&MultiplicationDatum, Failure> {
    mults.get(k).ok_or_else(|| {
        Failure::Core(Error::Validation(format!("document has {} multiplications, no index {k}", mults.len())))
    })
}

fn approx_period(t: &Torus, precision: u32) -> Result<Value, Failure> {
    let rows = t
        .period()
        .to_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let (re, im) = x.embed(precision)?.midpoint_f64();
                    Ok(json!([re, im]))
                })
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(json!(rows))
}

fn lattice_witness(l: &NSLattice) -> Value {
    json!(l
        .basis
        .iter()
        .map(|b| json!({ "E": int_matrix_json(&b.e), "M": field_matrix_json(&b.m) }))
        .collect::<Vec<_>>())
}

fn phase_name(p: SearchPhase) -> String {
    match p {
        SearchPhase::Ascent => "ascent".into(),
        SearchPhase::Box(b) => format!("box{b}"),
    }
}

fn command_report(cli: &Cli) -> Result<Report, Failure> {
    let mut r;
    match &cli.command {
        Command::Endo { file } => {
            let l = load(file)?;
            let ring = compute_endo_ring(&l.torus)?;
            let class = classify_algebra(&ring)?;
            r = Report::new("endo");
            r.witness("rank", json!(ring.rank()));
            r.witness("basis", json!(ring.basis.iter().map(|b| int_matrix_json(&b.r)).collect::<Vec<_>>()));
            r.witness("analytic", json!(ring.basis.iter().map(|b| field_matrix_json(&b.a)).collect::<Vec<_>>()));
            r.witness(
                "structure_constants",
                json!(ring.structure.iter().map(|row| row.iter().map(|v| big_vec_json(v)).collect::<Vec<_>>()).collect::<Vec<_>>()),
            );
            r.witness("tag", serde_json::to_value(class.tag).expect("tags serialize"));
            r.witness("discriminant_data", big_vec_json(&class.discriminant_data));
            r.approx.insert("period".into(), approx_period(&l.torus, cli.precision)?);
        }
        Command::Ns { file } => {
            let l = load(file)?;
            let ns = compute_ns(&l.torus)?;
            r = Report::new("ns");
            r.witness("rank", json!(ns.rank()));
            r.witness("basis", lattice_witness(&ns));
            r.approx.insert("period".into(), approx_period(&l.torus, cli.precision)?);
        }
        Command::Nd { file, mult } => {
            let l = load(file)?;
            let m = select(&l.mults, *mult)?;
            let ns = compute_ns(&l.torus)?;
            let nd = compute_n_d(&ns, m)?;
            let coords = nd
                .basis
                .iter()
                .map(|b| canonical_form_coordinates(m, &b.m).map(|c| json!({ "a": c.a.to_string(), "b": c.b.to_string() })))
                .collect::<Result<Vec<_>, Error>>()?;
            r = Report::new("nd");
            r.witness("mult", json!(mult));
            r.witness("d", json!(m.d.to_string()));
            r.witness("rank", json!(nd.rank()));
            r.witness("ns_rank", json!(ns.rank()));
            r.witness("basis", lattice_witness(&nd));
            r.witness("canonical_coords", json!(coords));
            r.witness(
                "ns_coords",
                json!(nd.parent_coords.as_deref().unwrap_or_default().iter().map(|v| big_vec_json(v)).collect::<Vec<_>>()),
            );
        }
        Command::Polarize { file } => {
            let l = load(file)?;
            let ns = compute_ns(&l.torus)?;
            r = Report::new("polarize");
            r.witness("ns_rank", json!(ns.rank()));
            match polarization_search(&l.torus, &ns)? {
                PolarizationOutcome::Found(p) => r.witness(
                    "polarization",
                    json!({
                        "coefficients": big_vec_json(&p.coeffs),
                        "E": int_matrix_json(&p.form.e),
                        "M": field_matrix_json(&p.form.m),
                        "phase": phase_name(p.phase),
                    }),
                ),
                PolarizationOutcome::NoneFound => r.witness("polarization", Value::Null),
            }
            let verdict = match is_algebraic(&l.torus, &ns, &l.mults)? {
                AlgebraicityVerdict::Algebraic(_) => json!({ "kind": "algebraic" }),
                AlgebraicityVerdict::NotAlgebraic(ob) => json!({ "kind": "not_algebraic", "obstruction": obstruction_json(&ob) }),
                AlgebraicityVerdict::Unknown => json!({ "kind": "unknown" }),
            };
            r.witness("verdict", verdict);
        }
        Command::Classify { file } => {
            let l = load(file)?;
            let ring = compute_endo_ring(&l.torus)?;
            let class = classify_algebra(&ring)?;
            r = Report::new("classify");
            r.witness("rank", json!(ring.rank()));
            r.witness("tag", serde_json::to_value(class.tag).expect("tags serialize"));
            r.witness("discriminant_data", big_vec_json(&class.discriminant_data));
        }
        Command::VerifyProp { file, mult } => {
            let l = load(file)?;
            let m = select(&l.mults, *mult)?;
            let report = verify_proposition_seeded(&l.torus, m, cli.seed)?;
            r = Report::new("verify-prop");
            r.witness("mult", json!(mult));
            r.witness("d", json!(m.d.to_string()));
            r.claims = report.claims;
        }
        Command::VerifyCor { file } => {
            let l = load(file)?;
            let report = verify_corollaries(&l.torus, &l.mults)?;
            r = Report::new("verify-cor");
            r.witness("multiplications", json!(l.mults.iter().map(|m| m.d.to_string()).collect::<Vec<_>>()));
            r.claims = report.claims;
        }
        Command::GenExample { .. } => unreachable!("handled by generate"),
    }
    Ok(r)
}

fn generate(cli: &Cli) -> Result<(String, Option<PathBuf>), Failure> {
    let Command::GenExample { kind, m, n, d, cube_root, output } = &cli.command else {
        unreachable!("generate is only called for gen-example")
    };
    let doc = match kind {
        ExampleKind::One => {
            let r = cube_root.map(|c| GeneratorSpec::cube_root("r", c)).transpose()?;
            let (t, mult) = example1(*m, r)?;
            TorusDocument::from_torus(&t, &[mult])?
        }
        ExampleKind::Two => {
            let (t, mult) = example2(*m, *n)?;
            TorusDocument::from_torus(&t, &[mult])?
        }
        ExampleKind::Scalar => {
            let t = scalar_cm_product(*m)?;
            let (scalar, nonscalar) = scalar_cm_multiplications(&t, *m)?;
            TorusDocument::from_torus(&t, &[nonscalar, scalar])?
        }
        ExampleKind::Random => {
            let (t, mult) = random_torus_with_sqrt_d(*d, cli.seed)?;
            TorusDocument::from_torus(&t, &[mult])?
        }
    };
    Ok((doc.to_json(), output.clone()))
}

/// Runs one invocation and captures its output.
pub fn execute<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            };
        }
    };
    if matches!(cli.command, Command::GenExample { .. }) {
        return match generate(&cli) {
            Ok((doc, None)) => Output { code: EXIT_OK, stdout: doc, stderr: String::new() },
            Ok((doc, Some(path))) => match fs::write(&path, doc) {
                Ok(()) => Output { code: EXIT_OK, stdout: format!("wrote {}\n", path.display()), stderr: String::new() },
                Err(e) => failure(&Failure::Io(format!("{}: {e}", path.display()))),
            },
            Err(f) => failure(&f),
        };
    }
    match command_report(&cli) {
        Ok(r) => Output {
            code: r.code(),
            stdout: if cli.json { r.to_json() } else { r.to_text() },
            stderr: String::new(),
        },
        Err(f) => failure(&f),
    }
}

fn failure(f: &Failure) -> Output {
    Output { code: f.code(), stdout: String::new(), stderr: format!("{}\n", f.message()) }
}

/// Runs one invocation, printing to the process streams; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let out = execute(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_map_to_exit_codes() {
        assert_eq!(Failure::Io("x".into()).code(), EXIT_INPUT);
        assert_eq!(Failure::Core(Error::NotAnEndomorphism("x".into())).code(), EXIT_INPUT);
        assert_eq!(Failure::Core(Error::PrecisionExhausted("x".into())).code(), EXIT_INTERNAL);
        assert!(Failure::Core(Error::NotSquareRootOfD).message().starts_with("error[NotSquareRootOfD]"));
    }

    #[test]
    fn report_keys_are_sorted() {
        let mut r = Report::new("ns");
        r.witness("rank", json!(2));
        r.witness("basis", json!([]));
        let s = r.to_json();
        let order: Vec<usize> = ["approx", "claims", "command", "witnesses"].iter().map(|k| s.find(k).unwrap()).collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        assert!(s.find("basis").unwrap() < s.find("rank").unwrap());
        assert_eq!(r.code(), EXIT_OK);
    }

    #[test]
    fn help_exits_zero() {
        let out = execute(["tori", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("verify-prop"));
    }
}
