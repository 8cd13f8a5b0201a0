//! The three worked examples, embedded so replay needs no input files.

use num_complex::Complex64;
use qms_thermo::{build_dbc_generator, equilibrium, reduce, CMatrix, ClassicalChain, DensityMatrix};
use serde::Serialize;

use crate::args::Cli;
use crate::commands::{CliError, Outcome, EXIT_VERIFICATION};
use crate::output::{self, Table};

const EQUILIBRIUM_A: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]];
const KAPPA: f64 = 6.902;
const FRAME_DENSITY: [f64; 3] = [0.186, 0.332, 0.482];
const RHO_A: [[f64; 3]; 3] = [[0.259, 0.073, 0.0], [0.073, 0.259, 0.0], [0.0, 0.0, 0.482]];
const PRESSURE: f64 = 0.902;

const DIAGONAL_SIGMA: [f64; 3] = [0.5, 1.0 / 3.0, 1.0 / 6.0];
const COMPLEX_SIGMA_SPECTRUM: [f64; 3] = [0.125, 0.375, 0.5];

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub example: &'static str,
    pub quantity: String,
    pub paper: f64,
    pub computed: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Serialize)]
struct Report {
    entries: Vec<Entry>,
    passed: bool,
}

struct Recorder {
    entries: Vec<Entry>,
    tolerance_override: Option<f64>,
}

impl Recorder {
    fn push(&mut self, example: &'static str, quantity: String, paper: f64, computed: f64, tolerance: f64) {
        let tolerance = self.tolerance_override.unwrap_or(tolerance);
        let deviation = (computed - paper).abs();
        self.entries.push(Entry {
            example,
            quantity,
            paper,
            computed,
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        });
    }
}

fn diagonal_sigma_q() -> [[f64; 3]; 3] {
    let (s2, s3, s6) = (2.0_f64.sqrt(), 3.0_f64.sqrt(), 6.0_f64.sqrt());
    [
        [-2.0 * s2 / s3 - 2.0 / s3, 2.0 * s2 / s3, 2.0 / s3],
        [2.0 * s3 / s2, -2.0 * s3 / s2 - 2.0 * s3 / s6, 2.0 * s3 / s6],
        [2.0 * s3, 2.0 * s2, -2.0 * s3 - 2.0 * s2],
    ]
}

fn complex_sigma_q() -> [[f64; 3]; 3] {
    let s3 = 3.0_f64.sqrt();
    [
        [-2.0 * s3 - 4.0, 2.0 * s3, 4.0],
        [2.0 / s3, -6.0 / s3, 4.0 / s3],
        [1.0, s3, -1.0 - s3],
    ]
}

fn complex_sigma() -> CMatrix {
    let c = Complex64::new;
    let z = c(0.0, 0.0);
    CMatrix::from_row_major(
        3,
        vec![c(0.25, 0.0), z, c(0.0, 0.125), z, c(0.5, 0.0), z, c(0.0, -0.125), z, c(0.25, 0.0)],
    )
    .expect("embedded matrix is valid")
}

/// Relabels states so the invariant vector reads as `target`.
fn ordered(chain: &ClassicalChain, target: &[f64]) -> Result<ClassicalChain, CliError> {
    let perm = target
        .iter()
        .map(|t| chain.invariant().iter().position(|s| (s - t).abs() < 1e-9))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CliError {
            code: EXIT_VERIFICATION,
            message: "computed invariant vector does not match the example".into(),
        })?;
    Ok(chain.relabel(&perm)?)
}

fn record_chain(
    rec: &mut Recorder,
    example: &'static str,
    chain: &ClassicalChain,
    want: &[[f64; 3]; 3],
    invariant: &[f64],
    tol: f64,
) {
    for (l, row) in want.iter().enumerate() {
        for (k, &w) in row.iter().enumerate() {
            rec.push(example, format!("Q[{}][{}]", l + 1, k + 1), w, chain.q()[[l, k]], tol);
        }
    }
    for k in 0..3 {
        let v: f64 = (0..3).map(|l| invariant[l] * chain.q()[[l, k]]).sum();
        rec.push(example, format!("(sigma Q)[{}]", k + 1), 0.0, v, tol);
    }
}

pub fn entries(tolerance_override: Option<f64>) -> Result<Vec<Entry>, CliError> {
    let mut rec = Recorder { entries: Vec::new(), tolerance_override };

    let ex = "equilibrium";
    let a = CMatrix::from_real_rows(&EQUILIBRIUM_A.map(|r| r.to_vec())).expect("embedded matrix is valid");
    let eq = equilibrium(&a)?;
    rec.push(ex, "kappa".into(), KAPPA, eq.kappa, 5e-4);
    for (i, (&w, &g)) in FRAME_DENSITY.iter().zip(&eq.frame_density).enumerate() {
        rec.push(ex, format!("frame density[{}]", i + 1), w, g, 1e-3);
    }
    let mut imaginary = 0.0_f64;
    for (i, row) in RHO_A.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            let z = eq.rho.matrix().get(i, j);
            imaginary = imaginary.max(z.im.abs());
            rec.push(ex, format!("rho[{}][{}]", i + 1, j + 1), w, z.re, 1e-3);
        }
    }
    rec.push(ex, "max |Im rho|".into(), 0.0, imaginary, 1e-3);
    rec.push(ex, "pressure".into(), PRESSURE, eq.pressure, 2e-3);
    rec.push(ex, "pressure - (kappa - 6)".into(), 0.0, eq.pressure - (eq.kappa - 6.0), 1e-9);

    let ex = "diagonal sigma";
    let g = build_dbc_generator(&DensityMatrix::from_probabilities(&DIAGONAL_SIGMA)?)?;
    let chain = ordered(&reduce(&g), &DIAGONAL_SIGMA)?;
    record_chain(&mut rec, ex, &chain, &diagonal_sigma_q(), &DIAGONAL_SIGMA, 1e-12);

    let ex = "complex sigma";
    let sigma = DensityMatrix::new(complex_sigma())?;
    for (i, (&w, &g)) in COMPLEX_SIGMA_SPECTRUM.iter().zip(sigma.eigenvalues()).enumerate() {
        rec.push(ex, format!("eigenvalue[{}]", i + 1), w, g, 1e-12);
    }
    let g = build_dbc_generator(&sigma)?;
    let chain = ordered(&reduce(&g), &COMPLEX_SIGMA_SPECTRUM)?;
    record_chain(&mut rec, ex, &chain, &complex_sigma_q(), &COMPLEX_SIGMA_SPECTRUM, 1e-10);

    Ok(rec.entries)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.tolerance {
        if !t.is_finite() || t < 0.0 {
            return Err(CliError::parse(format!("invalid tolerance {t}")));
        }
    }
    let entries = entries(cli.tolerance)?;
    let passed = entries.iter().all(|e| e.passed);
    let text = if cli.json {
        output::json(&Report { entries, passed })
    } else {
        let mut out = format!(
            "{:<16} {:<26} {:>14} {:>14} {:>12} {:>10}  result\n",
            "example", "quantity", "paper", "computed", "deviation", "tolerance"
        );
        for e in &entries {
            out.push_str(&format!(
                "{:<16} {:<26} {:>14} {:>14} {:>12} {:>10}  {}\n",
                e.example,
                e.quantity,
                output::num(e.paper),
                output::num(e.computed),
                output::num(e.deviation),
                output::num(e.tolerance),
                if e.passed { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&Table::default().row("overall", if passed { "PASS" } else { "FAIL" }).finish());
        out
    };
    Ok(Outcome { text, code: if passed { 0 } else { EXIT_VERIFICATION } })
}
