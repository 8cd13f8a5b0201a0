use std::fmt;
use std::fs;
use std::path::Path;

use qms_thermo::{
    build_dbc_generator, entropy, entropy_via_generator, equilibrium, reduce, CMatrix, DbcGenerator,
    DbcReport, DensityMatrix, Error,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command};
use crate::output::{self, Table};
use crate::replay;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CrossCheck { .. } | Error::NoConvergence { .. } => EXIT_VERIFICATION,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

/// Rendered output plus the exit code to finish with.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn read_density(path: &Path) -> Result<DensityMatrix, CliError> {
    let m: CMatrix = read_json(path)?;
    Ok(DensityMatrix::new(m)?)
}

#[derive(Deserialize)]
struct GeneratorFile {
    sigma: CMatrix,
    lambdas: Vec<f64>,
    etas: CMatrix,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GeneratorInput {
    Full(GeneratorFile),
    Sigma(CMatrix),
}

/// A generator file as written by `generator --json`, or a bare `σ` matrix.
fn read_generator(path: &Path) -> Result<DbcGenerator, CliError> {
    match read_json(path)? {
        GeneratorInput::Full(g) => {
            let sigma = DensityMatrix::new(g.sigma)?;
            Ok(DbcGenerator::from_parts(sigma, g.lambdas, g.etas)?)
        }
        GeneratorInput::Sigma(m) => Ok(build_dbc_generator(&DensityMatrix::new(m)?)?),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Entropy { rho } => cmd_entropy(cli, rho),
        Command::Equilibrium { hamiltonian } => cmd_equilibrium(cli, hamiltonian),
        Command::Generator { sigma } => cmd_generator(cli, sigma),
        Command::Evolve { generator, state } => cmd_evolve(cli, generator, state),
        Command::Classical { sigma } => cmd_classical(cli, sigma),
        Command::Verify { sigma } => cmd_verify(cli, sigma),
        Command::Replay => replay::run(cli),
    }
}

#[derive(Serialize)]
struct EntropyReport {
    entropy: f64,
    entropy_via_generator: f64,
    discrepancy: f64,
    spectrum: Vec<f64>,
}

fn cmd_entropy(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let rho = read_density(path)?;
    let h = entropy(&rho);
    let hg = entropy_via_generator(&rho);
    let report = EntropyReport {
        entropy: h,
        entropy_via_generator: hg,
        discrepancy: (h - hg).abs(),
        spectrum: rho.eigenvalues().to_vec(),
    };
    if cli.json {
        return Ok(Outcome::ok(output::json(&report)));
    }
    Ok(Outcome::ok(
        Table::default()
            .row("entropy", output::num(report.entropy))
            .row("entropy (generator)", output::num(report.entropy_via_generator))
            .row("discrepancy", output::num(report.discrepancy))
            .row("spectrum", output::vector(&report.spectrum))
            .finish(),
    ))
}

fn cmd_equilibrium(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let a: CMatrix = read_json(path)?;
    let eq = equilibrium(&a)?;
    let residuals = eq.residuals();
    if cli.json {
        #[derive(Serialize)]
        struct Report<'a> {
            #[serde(flatten)]
            result: &'a qms_thermo::EquilibriumResult,
            residuals: qms_thermo::equilibrium::EquilibriumResiduals,
        }
        return Ok(Outcome::ok(output::json(&Report { result: &eq, residuals })));
    }
    Ok(Outcome::ok(
        Table::default()
            .row("kappa", output::num(eq.kappa))
            .row("pressure", output::num(eq.pressure))
            .row("h(rho) + tr(A rho)", output::num(eq.pressure_check))
            .row("hamiltonian spectrum", output::vector(&eq.hamiltonian_spectrum))
            .row("frame density", output::vector(&eq.frame_density))
            .block("rho", &output::matrix(eq.rho.matrix()))
            .row("residual lagrange", output::num(residuals.lagrange))
            .row("residual eigenrelation", output::num(residuals.eigenrelation))
            .row("residual trace identity", output::num(residuals.trace_identity))
            .row("residual pressure", output::num(residuals.pressure))
            .finish(),
    ))
}

fn rows(a: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn cmd_generator(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let g = build_dbc_generator(&read_density(path)?)?;
    if cli.json {
        return Ok(Outcome::ok(output::json(&g)));
    }
    Ok(Outcome::ok(
        Table::default()
            .row("dimension", g.dim().to_string())
            .row("lambdas", output::vector(g.lambdas()))
            .row("sigma weights", output::vector(&g.sigma_weights()))
            .row("degenerate spectrum", g.degenerate().to_string())
            .block("rates c_ij", &output::real_matrix(&rows(g.rates())))
            .block("eigenvectors (columns)", &output::matrix(g.etas()))
            .finish(),
    ))
}

#[derive(Serialize)]
struct EvolveReport {
    t: f64,
    dual: bool,
    trace: f64,
    state: CMatrix,
}

fn cmd_evolve(cli: &Cli, generator: &Path, state: &Path) -> Result<Outcome, CliError> {
    let g = read_generator(generator)?;
    let x: CMatrix = read_json(state)?;
    let t = cli.t.ok_or_else(|| CliError::parse("evolve requires --t"))?;
    let out = g.evolve(t, &x, cli.dual)?;
    let report = EvolveReport { t, dual: cli.dual, trace: out.trace().re, state: out };
    if cli.json {
        return Ok(Outcome::ok(output::json(&report)));
    }
    Ok(Outcome::ok(
        Table::default()
            .row("t", output::num(report.t))
            .row("picture", if report.dual { "Schrödinger" } else { "Heisenberg" })
            .row("trace", output::num(report.trace))
            .block("state", &output::matrix(&report.state))
            .finish(),
    ))
}

#[derive(Serialize)]
struct ClassicalReport {
    q: Vec<Vec<f64>>,
    invariant: Vec<f64>,
    spectrum: Vec<f64>,
    row_sum_residual: f64,
    stationarity_residual: f64,
    detailed_balance_residual: f64,
}

fn classical_report(g: &DbcGenerator) -> Result<ClassicalReport, CliError> {
    let chain = reduce(g);
    Ok(ClassicalReport {
        q: rows(chain.q()),
        invariant: chain.invariant().to_vec(),
        spectrum: chain.spectrum()?,
        row_sum_residual: chain.row_sum_residual(),
        stationarity_residual: chain.stationarity_residual(),
        detailed_balance_residual: chain.detailed_balance_residual(),
    })
}

fn cmd_classical(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let g = build_dbc_generator(&read_density(path)?)?;
    let report = classical_report(&g)?;
    if cli.json {
        return Ok(Outcome::ok(output::json(&report)));
    }
    Ok(Outcome::ok(
        Table::default()
            .block("Q", &output::real_matrix(&report.q))
            .row("invariant", output::vector(&report.invariant))
            .row("spectrum", output::vector(&report.spectrum))
            .row("row sum residual", output::num(report.row_sum_residual))
            .row("invariant residual", output::num(report.stationarity_residual))
            .row("detailed balance residual", output::num(report.detailed_balance_residual))
            .finish(),
    ))
}

#[derive(Serialize)]
struct VerifyReport {
    dbc: DbcReport,
    classical_row_sum: f64,
    classical_invariant: f64,
    classical_detailed_balance: f64,
    tolerance: f64,
    passed: bool,
}

fn cmd_verify(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let g = build_dbc_generator(&read_density(path)?)?;
    let tolerance = match cli.tolerance {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => return Err(CliError::parse(format!("invalid tolerance {t}"))),
        None => qms_thermo::lindblad::DBC_TOL,
    };
    let dbc = g.check_dbc_with_tolerance(cli.samples, cli.seed, tolerance);
    let chain = reduce(&g);
    let (row_sum, invariant, balance) = (
        chain.row_sum_residual(),
        chain.stationarity_residual(),
        chain.detailed_balance_residual(),
    );
    let passed = dbc.passed && row_sum <= tolerance && invariant <= tolerance && balance <= tolerance;
    let report = VerifyReport {
        dbc,
        classical_row_sum: row_sum,
        classical_invariant: invariant,
        classical_detailed_balance: balance,
        tolerance,
        passed,
    };
    let text = if cli.json {
        output::json(&report)
    } else {
        Table::default()
            .row("samples", report.dbc.samples.to_string())
            .row("seed", report.dbc.seed.to_string())
            .row("tolerance", output::num(tolerance))
            .row("symmetry deviation", output::num(report.dbc.symmetry_deviation))
            .row("modular deviation", output::num(report.dbc.modular_deviation))
            .row("stationarity residual", output::num(report.dbc.stationarity_residual))
            .row("unit residual", output::num(report.dbc.unit_residual))
            .row("classical row sums", output::num(row_sum))
            .row("classical invariant", output::num(invariant))
            .row("classical detailed balance", output::num(balance))
            .row("result", if passed { "PASS" } else { "FAIL" })
            .finish()
    };
    Ok(Outcome { text, code: if passed { 0 } else { EXIT_VERIFICATION } })
}
