use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rmpbe::backerr::Exactness;
use rmpbe::io::{c_to_json, PerturbationFile, PerturbationJson, ProblemFile, VerificationJson};
use rmpbe::oracle::{oracle_eta, OracleOptions};
use rmpbe::rmp::{check_admissible, validate_structure};
use rmpbe::spectrum::{homotopy_curves, rmp_eigenvalues};
use rmpbe::{eta_structured, eta_unstructured, optimal_perturbation, verify, Config, Error, Rmp, StructureTag, Tolerances};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rmpbe", version, about = "Structured eigenvalue backward errors of rational matrix polynomials")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unstructured and structured backward errors at λ.
    Backerr(Common),
    /// Optimal structured perturbation and its verification.
    Perturb(Common),
    /// Eigenvalues of G − tΔ on a uniform t-grid, as CSV.
    Curves {
        #[command(flatten)]
        common: Common,
        /// Perturbation file written by `perturb`.
        perturbation: PathBuf,
    },
    /// Eigenvalues of the RMP.
    Eigs(Common),
    /// Structure and admissibility report.
    Validate(Common),
    /// Brute-force oracle estimate of the structured backward error.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    file: PathBuf,
    /// Structure tag, overriding the file.
    #[arg(long)]
    structure: Option<StructureTag>,
    /// Evaluation point as "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Option<Complex64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tol: TolFlags,
}

#[derive(Args)]
struct TolFlags {
    #[arg(long)]
    tol_pole: Option<f64>,
    #[arg(long)]
    tol_zero: Option<f64>,
    #[arg(long)]
    tol_inv: Option<f64>,
    #[arg(long)]
    tol_structure: Option<f64>,
    #[arg(long)]
    tol_unit: Option<f64>,
    #[arg(long)]
    tol_mapping: Option<f64>,
    #[arg(long)]
    tol_cert: Option<f64>,
    #[arg(long)]
    tol_simplicity: Option<f64>,
    #[arg(long)]
    tol_reconstruct: Option<f64>,
    #[arg(long)]
    tol_spectrum_pole: Option<f64>,
    #[arg(long)]
    tol_curve: Option<f64>,
}

impl TolFlags {
    fn apply(&self, t: &mut Tolerances) {
        let pairs = [
            (self.tol_pole, &mut t.pole),
            (self.tol_zero, &mut t.zero),
            (self.tol_inv, &mut t.inv),
            (self.tol_structure, &mut t.structure),
            (self.tol_unit, &mut t.unit),
            (self.tol_mapping, &mut t.mapping),
            (self.tol_cert, &mut t.cert),
            (self.tol_simplicity, &mut t.simplicity),
            (self.tol_reconstruct, &mut t.reconstruct),
            (self.tol_spectrum_pole, &mut t.spectrum_pole),
            (self.tol_curve, &mut t.curve),
        ];
        for (v, slot) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err("expected \"re,im\"".into()),
    }
}

/// Failure carrying its exit code and JSON error object.
struct Failure {
    code: u8,
    body: Value,
}

impl Failure {
    fn new(code: u8, error: &str, message: impl Into<String>) -> Self {
        Failure { code, body: json!({ "error": error, "message": message.into() }) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::TooLarge(_) => 5,
            e if e.is_input_error() => 2,
            _ => 3,
        };
        Failure::new(code, e.code(), e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// A loaded problem with flag overrides applied.
struct Problem {
    g: Rmp,
    tag: StructureTag,
    lambda: Complex64,
    seed: u64,
    steps: Option<usize>,
    tol: Tolerances,
}

impl Problem {
    fn config(&self) -> Config {
        Config { tol: self.tol, seed: self.seed, ..Config::default() }
    }
}

fn load(c: &Common) -> Result<Problem, Failure> {
    let text = fs::read_to_string(&c.file).map_err(|e| Failure::new(2, "io", format!("{}: {e}", c.file.display())))?;
    let p = ProblemFile::parse(&text)?;
    let mut tol = p.options.tolerances;
    c.tol.apply(&mut tol);
    Ok(Problem {
        g: p.rmp.to_rmp()?,
        tag: c.structure.unwrap_or(p.structure()),
        lambda: c.lambda.unwrap_or(p.lambda()),
        seed: c.seed.unwrap_or(p.options.seed),
        steps: c.steps.or(p.options.steps),
        tol,
    })
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(3, "io", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, v: &Value) -> CmdResult {
    emit(out, &(serde_json::to_string_pretty(v).expect("serializable") + "\n"))
}

fn cmd_backerr(c: &Common) -> CmdResult {
    let p = load(c)?;
    let unstructured = eta_unstructured(&p.g, p.lambda, &p.tol)?;
    let res = eta_structured(&p.g, p.lambda, p.tag, &p.config())?;
    emit_json(
        c.out.as_deref(),
        &json!({
            "structure": p.tag,
            "lambda": c_to_json(p.lambda),
            "eta_unstructured": unstructured.eta,
            "eta_structured": res.eta,
            "exactness": res.exactness,
            "t_hat": res.t_hat,
            "diagnostics": res.diagnostics,
            "seed": p.seed,
        }),
    )
}

fn cmd_perturb(c: &Common) -> CmdResult {
    let p = load(c)?;
    let res = eta_structured(&p.g, p.lambda, p.tag, &p.config())?;
    if matches!(res.exactness, Exactness::LowerBound | Exactness::BoundaryFallback) {
        return Err(Failure::new(
            4,
            "lower_bound_only",
            format!("structured value {} is only a lower bound ({})", res.eta, res.exactness.as_str()),
        ));
    }
    let delta = optimal_perturbation(&p.g, &res, &p.tol)?;
    let report = verify(&p.g, p.lambda, p.tag, &delta, &p.tol)?;
    let file = PerturbationFile {
        structure: p.tag,
        lambda: c_to_json(p.lambda),
        eta: res.eta,
        perturbation: PerturbationJson::from_tuple(&delta),
        verification: Some(VerificationJson::from(&report)),
        seed: p.seed,
    };
    emit(c.out.as_deref(), &(serde_json::to_string_pretty(&file).expect("serializable") + "\n"))
}

fn cmd_curves(c: &Common, perturbation: &Path) -> CmdResult {
    let p = load(c)?;
    let text = fs::read_to_string(perturbation).map_err(|e| Failure::new(2, "io", format!("{}: {e}", perturbation.display())))?;
    let file: PerturbationFile =
        serde_json::from_str(&text).map_err(|e| Failure::new(2, "invalid", format!("perturbation file: {e}")))?;
    let delta = file.perturbation.to_tuple()?;
    let steps = homotopy_curves(&p.g, &delta, p.steps.unwrap_or(11), &p.tol)?;
    let mut csv = String::from("t,re,im,pole_flag\n");
    let mut failed = Vec::new();
    for st in &steps {
        match &st.spectrum {
            Ok(s) => {
                for (z, flag) in s.eigenvalues.iter().zip(&s.pole_flags) {
                    // Adding 0.0 turns -0 into 0.
                    writeln!(csv, "{},{},{},{}", st.t, z.re + 0.0, z.im + 0.0, u8::from(*flag)).expect("string write");
                }
            }
            Err(e) => failed.push(format!("t = {}: {e}", st.t)),
        }
    }
    emit(c.out.as_deref(), &csv)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(3, "step_failed", failed.join("; ")))
    }
}

fn cmd_eigs(c: &Common) -> CmdResult {
    let p = load(c)?;
    let s = rmp_eigenvalues(&p.g, &p.tol)?;
    emit_json(
        c.out.as_deref(),
        &json!({
            "eigenvalues": s.eigenvalues.iter().map(|z| c_to_json(*z)).collect::<Vec<_>>(),
            "pole_flags": s.pole_flags,
            "cleared_degree": s.cleared_degree,
            "seed": p.seed,
        }),
    )
}

fn cmd_validate(c: &Common) -> CmdResult {
    let p = load(c)?;
    let structure = validate_structure(&p.g, p.tag, p.tol.structure);
    let adm = check_admissible(&p.g, p.lambda, &p.tol);
    let valid = structure.ok && adm.not_pole && adm.weights_nonzero;
    emit_json(
        c.out.as_deref(),
        &json!({
            "valid": valid,
            "n": p.g.n(),
            "degree": p.g.degree(),
            "terms": p.g.terms().len(),
            "structure": p.tag,
            "structure_report": structure,
            "lambda": c_to_json(p.lambda),
            "admissibility": adm,
            "seed": p.seed,
        }),
    )?;
    if valid {
        Ok(())
    } else {
        Err(Failure::new(2, "inadmissible", "structure or admissibility check failed"))
    }
}

fn cmd_oracle(c: &Common, restarts: usize) -> CmdResult {
    let p = load(c)?;
    let res = eta_structured(&p.g, p.lambda, p.tag, &p.config())?;
    let o = oracle_eta(&p.g, p.lambda, p.tag, &OracleOptions { seed: p.seed, restarts }, &p.tol)?;
    let gap = if res.eta > 0.0 { (o.eta - res.eta) / res.eta } else { o.eta };
    emit_json(
        c.out.as_deref(),
        &json!({
            "structure": p.tag,
            "lambda": c_to_json(p.lambda),
            "eta_oracle": o.eta,
            "eta_structured": res.eta,
            "exactness": res.exactness,
            "relative_gap": gap,
            "restarts": restarts,
            "evaluations": o.evaluations,
            "seed": p.seed,
        }),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Command::Backerr(c) => cmd_backerr(c),
        Command::Perturb(c) => cmd_perturb(c),
        Command::Curves { common, perturbation } => cmd_curves(common, perturbation),
        Command::Eigs(c) => cmd_eigs(c),
        Command::Validate(c) => cmd_validate(c),
        Command::Oracle { common, restarts } => cmd_oracle(common, *restarts),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            println!("{}", serde_json::to_string_pretty(&f.body).expect("serializable"));
            ExitCode::from(f.code)
        }
    }
}
