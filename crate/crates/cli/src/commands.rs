use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use qudit_gates::qudit::{basis_state, computational_indices, unitarity_deviation, Circuit, PureState};
use qudit_gates::rational::exact_decimal;
use qudit_gates::schemes::{
    coincidence_table, ideal_output, run_gate, scheme_cnot, scheme_pswap, scheme_toffoli,
    CoincidenceTable, SchemeDescriptor,
};
use qudit_gates::synthesis::{build_cnot_circuit, build_toffoli_n, cnot_matrix, cost_report, toffoli_matrix};
use qudit_gates::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format, GateKind, OpticsArgs, SchemeArg, VerifyTarget};
use crate::error::CliError;
use crate::report::{probability_value, Check, Report};

pub const ORACLE_TOL: f64 = 1e-9;
pub const EXACT_TOL: f64 = 1e-12;
/// Largest control count simulated densely by `verify circuit`.
pub const MAX_CONTROLS: usize = 8;
/// Largest qubit count for which `cost` rebuilds the circuit.
pub const MAX_COST_CROSSCHECK: usize = 16;

/// Rendered output and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (mut report, table) = match &cli.command {
        Command::Verify {
            target: VerifyTarget::Circuit { gate, controls },
        } => (verify_circuit(*gate, *controls)?, None),
        Command::Optics(args) => (optics(args)?, None),
        Command::Table1 { scheme } => {
            let (report, table) = table1(scheme)?;
            (report, Some(table))
        }
        Command::Cost { qubits } => (cost(*qubits)?, None),
    };
    if cli.output.timing {
        report.duration_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let default = if table.is_some() { Format::Csv } else { Format::Json };
    let text = match (cli.output.format.unwrap_or(default), &table) {
        (Format::Json, _) => report.to_json(),
        (Format::Csv, Some(t)) => table_csv(t)?,
        (Format::Csv, None) => report.to_csv()?,
        (Format::Text, Some(t)) => report.to_text() + &table_text(t),
        (Format::Text, None) => report.to_text(),
    };
    Ok(Outcome {
        text,
        passed: report.passed(),
    })
}

fn digits(levels: &[usize]) -> String {
    levels.iter().map(|l| l.to_string()).collect()
}

/// Runs every computational basis input through `circ` and compares with
/// the columns of `target`.
struct OracleSweep {
    max_deviation: f64,
    rows_ok: usize,
    rows: usize,
    leakage: f64,
    table: Vec<Value>,
}

fn oracle_sweep(circ: &Circuit, target: &qudit_gates::qudit::CMatrix) -> Result<OracleSweep, CliError> {
    let dims = circ.dims();
    let idx = computational_indices(dims);
    let mut sweep = OracleSweep {
        max_deviation: 0.0,
        rows_ok: 0,
        rows: idx.len(),
        leakage: 0.0,
        table: Vec::with_capacity(idx.len()),
    };
    for (col, &i) in idx.iter().enumerate() {
        let input = basis_state(dims, &dims.levels_of(i))?;
        let out = circ.run(&input)?;
        let mut expect = vec![Complex64::new(0.0, 0.0); dims.total()];
        for (row, &j) in idx.iter().enumerate() {
            expect[j] = target[(row, col)];
        }
        let dev = out
            .amplitudes()
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        sweep.max_deviation = sweep.max_deviation.max(dev);
        sweep.leakage = sweep.leakage.max(out.ancilla_population());
        if dev <= ORACLE_TOL {
            sweep.rows_ok += 1;
        }
        sweep.table.push(json!({
            "input": digits(&dims.levels_of(i)),
            "output": digits(&dims.levels_of(dominant(&out))),
        }));
    }
    Ok(sweep)
}

fn dominant(state: &PureState) -> usize {
    let amps = state.amplitudes();
    (0..amps.len())
        .max_by(|&a, &b| amps[a].norm_sqr().total_cmp(&amps[b].norm_sqr()))
        .unwrap_or(0)
}

pub fn verify_circuit(gate: GateKind, controls: Option<usize>) -> Result<Report, CliError> {
    let (command, circ, target, counts, n) = match gate {
        GateKind::Cnot => {
            if controls.is_some() {
                return Err(CliError::Usage("--controls applies to --gate toffoli only".into()));
            }
            let circ = build_cnot_circuit();
            ("verify circuit --gate cnot".to_string(), circ, cnot_matrix(), (2, 5), 1)
        }
        GateKind::Toffoli => {
            let n = controls.unwrap_or(2);
            if n < 2 {
                return Err(CliError::Usage(format!("Toffoli needs at least 2 controls, got {n}")));
            }
            if n > MAX_CONTROLS {
                return Err(CliError::Usage(format!(
                    "at most {MAX_CONTROLS} controls can be simulated, got {n}"
                )));
            }
            let plan = build_toffoli_n(n)?;
            (
                format!("verify circuit --gate toffoli --controls {n}"),
                plan.circuit,
                toffoli_matrix(n),
                (2 * n - 1, 2 * n - 2),
                n,
            )
        }
    };
    let sweep = oracle_sweep(&circ, &target)?;
    let unitarity = circ
        .ops()
        .iter()
        .map(|op| unitarity_deviation(op.matrix()))
        .fold(0.0, f64::max);
    let checks = vec![
        Check::within("oracle max deviation", sweep.max_deviation, 0.0, ORACLE_TOL),
        Check::count("truth table rows", sweep.rows_ok, sweep.rows),
        Check::within("leakage", sweep.leakage, 0.0, EXACT_TOL),
        Check::count("two-site gates", circ.count_arity(2), counts.0),
        Check::count("single-qudit gates", circ.count_arity(1), counts.1),
        Check::within("gate unitarity", unitarity, 0.0, 1e-10),
    ];
    let gates: Vec<Value> = circ
        .ops()
        .iter()
        .map(|op| json!({ "name": op.name(), "sites": op.sites() }))
        .collect();
    let results = json!({
        "gate": match gate { GateKind::Cnot => "cnot", GateKind::Toffoli => "toffoli" },
        "controls": n,
        "dims": circ.dims().as_slice(),
        "two_site": circ.count_arity(2),
        "single_qudit": circ.count_arity(1),
        "gates": gates,
        "truth_table": sweep.table,
    });
    Ok(Report::new(command, checks, results))
}

fn descriptor(scheme: SchemeArg) -> (SchemeDescriptor, &'static str) {
    match scheme {
        SchemeArg::Pswap => (scheme_pswap(), "pswap"),
        SchemeArg::Cnot => (scheme_cnot(), "cnot"),
        SchemeArg::Toffoli => (scheme_toffoli(), "toffoli"),
    }
}

/// Parses a basis string such as `10`, one decimal digit per site.
pub fn parse_basis(text: &str, dims: &[usize]) -> Result<Vec<usize>, CliError> {
    let bad = |why: String| CliError::Usage(format!("malformed basis string {text:?}: {why}"));
    if text.chars().count() != dims.len() {
        return Err(bad(format!("expected {} digits", dims.len())));
    }
    text.chars()
        .zip(dims)
        .map(|(c, &d)| match c.to_digit(10) {
            Some(l) if (l as usize) < d => Ok(l as usize),
            Some(l) => Err(bad(format!("level {l} exceeds dimension {d}"))),
            None => Err(bad(format!("{c:?} is not a digit"))),
        })
        .collect()
}

fn amplitudes_value(state: &PureState) -> Value {
    let dims = state.dims();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 1e-24)
        .map(|(i, a)| json!({ "levels": digits(&dims.levels_of(i)), "re": a.re, "im": a.im }))
        .collect()
}

pub fn optics(args: &OpticsArgs) -> Result<Report, CliError> {
    let (scheme, name) = descriptor(args.scheme);
    let dims = scheme.input_dims()?;
    let (input, basis, command) = if args.input == "random" {
        let seed = args
            .seed
            .ok_or_else(|| CliError::Usage("--input random requires --seed".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (
            PureState::random(dims.clone(), &mut rng),
            None,
            format!("optics --scheme {name} --input random --seed {seed}"),
        )
    } else {
        if args.seed.is_some() {
            return Err(CliError::Usage("--seed applies to --input random only".into()));
        }
        let levels = parse_basis(&args.input, dims.as_slice())?;
        (
            basis_state(&dims, &levels)?,
            Some(levels),
            format!("optics --scheme {name} --input {}", args.input),
        )
    };
    let expected = scheme.expected_success;
    let mut results = json!({
        "scheme": scheme.name,
        "input": args.input,
        "seed": args.seed,
        "expected_success": probability_value(expected.value()),
    });

    let run = match run_gate(&scheme, &input) {
        Ok(run) => run,
        Err(Error::SchemeIntegrity(why)) => {
            results["error"] = json!(why);
            return Ok(Report::new(command, vec![Check::flag("branch unanimity", false)], results));
        }
        Err(e) => return Err(e.into()),
    };
    let mut checks = vec![
        Check::probability("success probability", run.success_probability, expected.value(), ORACLE_TOL),
        Check::within("fidelity", run.fidelity_vs_ideal, 1.0, ORACLE_TOL),
        Check::within("leakage", run.leakage, 0.0, EXACT_TOL),
        Check::flag("branch unanimity", true),
    ];
    let out = &run.conditional_output;
    let out_dims = out.dims().clone();
    let top = dominant(out);
    let is_basis = out.amplitudes()[top].norm_sqr() > 1.0 - ORACLE_TOL;
    if let Some(levels) = &basis {
        let ideal = ideal_output(&scheme, &basis_state(&dims, levels)?)?;
        checks.push(Check::flag(
            "output basis state",
            is_basis && dominant(&ideal) == top,
        ));
    }
    let branches: Vec<Value> = run
        .branches
        .iter()
        .map(|b| json!({ "path": b.path.join(" / "), "probability": probability_value(b.probability) }))
        .collect();
    results["success_probability"] = probability_value(run.success_probability);
    results["output"] = if is_basis {
        json!(digits(&out_dims.levels_of(top)))
    } else {
        Value::Null
    };
    results["amplitudes"] = amplitudes_value(out);
    results["fidelity"] = json!(run.fidelity_vs_ideal);
    results["leakage"] = json!(run.leakage);
    results["paths"] = json!(scheme.num_paths());
    results["branches"] = Value::Array(branches);
    if args.describe {
        results["descriptor"] =
            serde_json::to_value(&scheme).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    Ok(Report::new(command, checks, results))
}

/// Each input row carries 1/8 in one column of every six-column class:
/// the column `r` for the `r`-th input.
fn expected_cell(row: usize, col: usize) -> f64 {
    if col % 6 == row {
        0.125
    } else {
        0.0
    }
}

pub fn table1(scheme: &str) -> Result<(Report, CoincidenceTable), CliError> {
    let descriptor = match scheme {
        "" => return Err(CliError::Usage("--scheme must not be empty".into())),
        "pswap" => scheme_pswap(),
        "cnot" | "toffoli" => {
            return Err(CliError::Usage(format!(
                "no coincidence table for scheme {scheme}; use pswap"
            )))
        }
        other => return Err(CliError::Usage(format!("unknown scheme {other:?}"))),
    };
    let table = coincidence_table(&descriptor)?;
    let mut checks = Vec::new();
    let mut matching = 0;
    for (r, row) in table.rows.iter().enumerate() {
        let total: f64 = row.cells.iter().map(|c| c.published).sum();
        checks.push(Check::probability(
            &format!("row {} total", digits(&row.input)),
            total,
            0.5,
            EXACT_TOL,
        ));
        matching += row
            .cells
            .iter()
            .enumerate()
            .filter(|(k, c)| (c.published - expected_cell(r, *k)).abs() <= EXACT_TOL)
            .count();
    }
    checks.push(Check::count(
        "cells matching",
        matching,
        table.rows.len() * table.columns.len(),
    ));
    let labels: Vec<String> = table.columns.iter().map(|c| c.label()).collect();
    let results = json!({
        "scheme": descriptor.name,
        "labels": labels,
        "table": serde_json::to_value(&table).map_err(|e| CliError::Internal(e.to_string()))?,
    });
    Ok((Report::new(format!("table1 --scheme {scheme}"), checks, results), table))
}

/// `input,modes,<column labels>` then one row per basis input, cells in the
/// published sign convention as exact decimals.
pub fn table_csv(table: &CoincidenceTable) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["input".to_string(), "modes".to_string()];
    header.extend(table.columns.iter().map(|c| c.label()));
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![digits(&row.input), row.modes.clone()];
        rec.extend(row.cells.iter().map(|c| exact_decimal(c.published)));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn table_text(table: &CoincidenceTable) -> String {
    let mut out = String::new();
    for (k, col) in table.columns.iter().enumerate() {
        let _ = write!(out, "  {:<16}", col.label());
        for row in &table.rows {
            let _ = write!(out, " {:>6}", exact_decimal(row.cells[k].published));
        }
        out.push('\n');
    }
    out
}

pub fn cost(m: usize) -> Result<Report, CliError> {
    let r = cost_report(m).map_err(|e| match e {
        Error::InvalidArgument(why) => CliError::Usage(why),
        other => other.into(),
    })?;
    let mut checks = Vec::new();
    let mut results = json!({
        "qubits": m,
        "two_site": r.two_site,
        "single_qudit": r.single_qudit,
        "builder": Value::Null,
    });
    if m <= MAX_COST_CROSSCHECK {
        let plan = build_toffoli_n(m - 1)?;
        checks.push(Check::count("builder two-site gates", plan.two_site_count, r.two_site));
        checks.push(Check::count(
            "builder single-qudit gates",
            plan.single_qudit_count,
            r.single_qudit,
        ));
        results["builder"] = json!({
            "two_site": plan.two_site_count,
            "single_qudit": plan.single_qudit_count,
        });
    }
    Ok(Report::new(format!("cost --qubits {m}"), checks, results))
}
