use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use virtual_spin::config::load_params;
use virtual_spin::gates::{compile_gate, default_rabi_budget};
use virtual_spin::levels::render_level_diagram;
use virtual_spin::numfmt::{fmt_sig17, to_json_string};
use virtual_spin::pulse::{LabFrameOptions, MIN_STEPS_PER_PERIOD};
use virtual_spin::validate::{validate_eigensystem, ValidationReport};
use virtual_spin::{analytic_eigensystem, populations, spectrum, Error, System};

use crate::circuit::{parse_circuit, GateLine};
use crate::error::CliError;
use crate::report::{self, GateReport, RunReport, SystemSummary};
use crate::{Engine, Format};

fn load_system(config: &Path) -> Result<System, CliError> {
    Ok(System::new(load_params(config)?))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn spectrum(config: &Path, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let sys = load_system(config)?;
    match format {
        Format::Csv => {
            write_output(out, &spectrum::to_csv(&sys.lines))?;
            eprintln!("min_gap_rad_s = {}", fmt_sig17(sys.lines.min_gap));
            Ok(())
        }
        Format::Json => write_output(out, &spectrum::to_json(&sys.lines)),
    }
}

pub fn levels(config: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let sys = load_system(config)?;
    write_output(out, &render_level_diagram(&sys.eig, &sys.lines))
}

pub struct RunArgs {
    pub config: PathBuf,
    pub circuit: PathBuf,
    pub engine: Engine,
    pub rabi_budget: Option<f64>,
    pub steps_per_period: usize,
    pub out: Option<PathBuf>,
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let sys = load_system(&args.config)?;
    let text = fs::read_to_string(&args.circuit).map_err(|e| {
        CliError::Input(format!("cannot read circuit {}: {e}", args.circuit.display()))
    })?;
    let program = parse_circuit(&text)?;

    let budget = args.rabi_budget.unwrap_or_else(|| default_rabi_budget(&sys.lines));
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(CliError::Input(format!(
            "--rabi-budget must be positive and finite, got {budget}"
        )));
    }
    if args.steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(CliError::Input(format!(
            "--steps-per-period must be at least {MIN_STEPS_PER_PERIOD}, got {}",
            args.steps_per_period
        )));
    }
    let options = LabFrameOptions::with_steps_per_period(args.steps_per_period);

    let mut state = program.initial.clone();
    let mut gates = Vec::with_capacity(program.gates.len());
    for (i, line) in program.gates.iter().enumerate() {
        let index = i + 1;
        let compiled = compile_gate(&line.gate, &sys.eig, &sys.lines, budget)
            .map_err(|e| compile_error(index, line, e))?;
        let compiled = match args.engine {
            Engine::Rwa => compiled,
            Engine::Labframe => {
                let achieved = compiled
                    .schedule
                    .lab_frame_propagator(&sys.eig, &sys.params, &options)
                    .map_err(|e| compile_error(index, line, e))?;
                compiled.with_achieved(achieved)?
            }
        };
        state = compiled.achieved.apply(&state)?;
        let (angle_rad, phase_rad) = GateReport::rotation(&line.gate);
        gates.push(GateReport {
            index,
            source: line.source.clone(),
            line: line.line,
            gate: line.gate.name(),
            angle_rad,
            phase_rad,
            duration_s: compiled.schedule.duration(),
            ideal: report::matrix(&compiled.ideal),
            fidelity: compiled.fidelity,
            truth_table: report::truth_table(&compiled.truth_table),
            schedule: compiled.schedule,
        });
    }

    let doc = RunReport {
        schema: report::SCHEMA,
        engine: args.engine.name(),
        frame: report::FRAME,
        system: SystemSummary::of(&sys),
        rabi_budget_rad_s: budget,
        steps_per_period: (args.engine == Engine::Labframe).then_some(args.steps_per_period),
        initial_state: report::amplitudes(program.initial.amplitudes()),
        gates,
        final_state: report::amplitudes(state.amplitudes()),
        final_populations: report::populations(&populations(&state)?),
    };
    let json = to_json_string(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
    write_output(args.out.as_deref(), &json)
}

fn compile_error(index: usize, line: &GateLine, e: Error) -> CliError {
    let (message, warnings) = match e {
        Error::Selectivity(w) => ("tones are not selective".to_string(), w),
        other => (other.to_string(), Vec::new()),
    };
    CliError::Compile {
        index,
        source_text: line.source.clone(),
        line: line.line,
        message,
        warnings,
    }
}

pub fn validate(config: &Path, corrupt_level: Option<&str>) -> Result<(), CliError> {
    let params = load_params(config)?;
    let mut eig = analytic_eigensystem(&params);
    if let Some(spec) = corrupt_level {
        let (k, shift) = parse_corruption(spec)?;
        eig.energies[k - 1] += shift;
        println!("note: level {k} shifted by {shift} rad/s (test hook)");
    }
    let report = validate_eigensystem(&params, &eig);
    print_validation(&report);
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::Validation { failed });
    }
    Ok(())
}

fn parse_corruption(spec: &str) -> Result<(usize, f64), CliError> {
    let bad = || CliError::Input(format!("--corrupt-level expects K=SHIFT with K in 1..=4, got `{spec}`"));
    let (k, shift) = spec.split_once('=').ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    let shift: f64 = shift.trim().parse().map_err(|_| bad())?;
    if !(1..=4).contains(&k) || !shift.is_finite() {
        return Err(bad());
    }
    Ok((k, shift))
}

fn print_validation(report: &ValidationReport) {
    for check in &report.checks {
        println!("{check}");
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    if failed == 0 {
        println!("all {} checks passed", report.checks.len());
    } else {
        println!("{failed} of {} checks failed", report.checks.len());
    }
}
