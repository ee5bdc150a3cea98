//! The five subcommands. Each returns a table (or report) plus an exit code.

use aim_dirac::aim::{aim_energy_solve, AimSolution, AimSolveOptions};
use aim_dirac::fd::{self_consistent_energy, FdSolution};
use aim_dirac::spectrum::{bound_state_energy, ode_residual, RadialWavefunction};
use aim_dirac::verify::{run_verification, CheckRow, VerifyOptions, VerifyReport};
use aim_dirac::{make_channel, BoundState, EffectiveChannel, Error};

use crate::config::{Engine, RunConfig};
use crate::output::{render_report, render_table, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Rendered output, diagnostics for stderr, and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, warnings: Vec<String>) -> Self {
        Self { stdout, stderr: join_lines(&warnings), code: EXIT_OK }
    }

    pub fn fail(code: i32, message: String) -> Self {
        Self { stdout: String::new(), stderr: format!("error: {message}\n"), code }
    }
}

fn join_lines(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

fn status<T>(r: &Result<T, Error>) -> Cell {
    match r {
        Ok(_) => Cell::text("ok"),
        Err(e) => Cell::text(e.kind()),
    }
}

fn aim_options(config: &RunConfig) -> AimSolveOptions {
    AimSolveOptions { depth: config.aim_depth, r0: config.aim_point, ..AimSolveOptions::default() }
}

fn channel(config: &RunConfig) -> Result<EffectiveChannel, Error> {
    make_channel(config.setup, config.component)
}

/// Largest of the mass-shell and quantization defects of a state.
fn defect(s: &BoundState) -> f64 {
    s.mass_shell_residual().max(s.quantization_residual())
}

struct EngineRun {
    engine: Engine,
    state: Result<BoundState, Error>,
}

fn run_engines(config: &RunConfig, n: usize, engines: &[Engine]) -> Result<Vec<EngineRun>, String> {
    let grid = config.radial_grid().map_err(|e| e.to_string())?;
    let ch = channel(config);
    let closed = ch.as_ref().map_err(Clone::clone).and_then(|c| bound_state_energy(c, n));
    Ok(engines
        .iter()
        .map(|&engine| {
            let state = match (&ch, engine) {
                (Err(e), _) => Err(e.clone()),
                (Ok(_), Engine::ClosedForm) => closed.clone(),
                (Ok(c), Engine::Aim) => aim_energy_solve(c, n, &aim_options(config)).map(|s| s.state),
                (Ok(c), Engine::FdOracle) => {
                    let start = closed.as_ref().ok().map(|s| s.energy);
                    self_consistent_energy(c, n, &grid, start).map(|s| s.state)
                }
                (Ok(_), Engine::All) => unreachable!("expanded by the caller"),
            };
            EngineRun { engine, state }
        })
        .collect())
}

fn energy_diff(runs: &[EngineRun], a: Engine, b: Engine) -> Cell {
    let find = |e: Engine| runs.iter().find(|r| r.engine == e).and_then(|r| r.state.as_ref().ok());
    match (find(a), find(b)) {
        (Some(x), Some(y)) => Cell::Num((x.energy - y.energy).abs()),
        _ => Cell::Empty,
    }
}

/// Spectrum table: one row per level and engine.
pub fn spectrum(config: &RunConfig) -> Outcome {
    let all = config.engine == Engine::All;
    let engines: Vec<Engine> = if all {
        vec![Engine::ClosedForm, Engine::Aim, Engine::FdOracle]
    } else {
        vec![config.engine]
    };
    let mut columns = vec!["n", "k", "component", "E", "epsilon", "B", "engine", "residualNorm", "status"];
    if all {
        columns.extend(["dAimClosedForm", "dFdOracleClosedForm", "dAimFdOracle"]);
    }
    let mut table = Table::new(&columns);
    let mut warnings = Vec::new();
    for n in 0..=config.n_max {
        let runs = match run_engines(config, n, &engines) {
            Ok(r) => r,
            Err(msg) => return Outcome::fail(EXIT_USAGE, msg),
        };
        let diffs = [
            energy_diff(&runs, Engine::Aim, Engine::ClosedForm),
            energy_diff(&runs, Engine::FdOracle, Engine::ClosedForm),
            energy_diff(&runs, Engine::Aim, Engine::FdOracle),
        ];
        for run in &runs {
            if let Err(e) = &run.state {
                warnings.push(format!("n={n} {}: {e}", run.engine.as_str()));
            }
            let s = run.state.as_ref().ok();
            let mut row = vec![
                Cell::Int(n as i64),
                Cell::Int(config.setup.k),
                Cell::text(config.component.as_str()),
                Cell::opt(s.map(|s| s.energy)),
                Cell::opt(s.map(|s| s.epsilon)),
                Cell::opt(s.map(|s| s.b_value)),
                Cell::text(run.engine.as_str()),
                Cell::opt(s.map(defect)),
                status(&run.state),
            ];
            if all {
                row.extend(diffs.iter().cloned());
            }
            table.push(row);
        }
    }
    Outcome::ok(render_table("spectrum", config, &table), warnings)
}

/// Normalised closed-form eigenfunction of level `n` at the radii `rs`.
pub fn wavefunction(config: &RunConfig, n: usize, rs: &[f64]) -> Outcome {
    let wf = channel(config)
        .and_then(|c| bound_state_energy(&c, n))
        .and_then(|s| RadialWavefunction::normalized(s, config.kummer_mode));
    let wf = match wf {
        Ok(wf) => wf,
        Err(e) => return Outcome::fail(EXIT_SOLVER, format!("level {n}: {e}")),
    };
    let mut table = Table::new(&["r", "F", "dF", "d2F", "residual", "status"]);
    let mut warnings = Vec::new();
    for &r in rs {
        let value = wf.eval(r);
        let residual = ode_residual(&wf, &wf.state, r);
        match (&value, &residual) {
            (Ok(v), Ok(res)) => table.push(vec![
                Cell::Num(r),
                Cell::Num(v.value),
                Cell::Num(v.first),
                Cell::Num(v.second),
                Cell::Num(*res),
                Cell::text("ok"),
            ]),
            (Err(e), _) | (_, Err(e)) => {
                warnings.push(format!("r={r}: {e}"));
                table.push(vec![
                    Cell::Num(r),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::text(e.kind()),
                ]);
            }
        }
    }
    Outcome::ok(render_table("wavefunction", config, &table), warnings)
}

/// AIM roots with their stability data.
pub fn aim(config: &RunConfig) -> Outcome {
    let mut table = Table::new(&[
        "n", "k", "component", "E", "epsilon", "B", "r0", "depth", "deeperE", "windowLo", "windowHi",
        "candidates", "status",
    ]);
    let mut warnings = Vec::new();
    let ch = channel(config);
    for n in 0..=config.n_max {
        let sol: Result<AimSolution, Error> = ch
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|c| aim_energy_solve(c, n, &aim_options(config)));
        if let Err(e) = &sol {
            warnings.push(format!("n={n}: {e}"));
        }
        let s = sol.as_ref().ok();
        let deeper = s.and_then(|s| {
            s.candidates
                .iter()
                .find(|c| c.energy == s.state.energy)
                .and_then(|c| c.energy_deeper)
        });
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Int(config.setup.k),
            Cell::text(config.component.as_str()),
            Cell::opt(s.map(|s| s.state.energy)),
            Cell::opt(s.map(|s| s.state.epsilon)),
            Cell::opt(s.map(|s| s.state.b_value)),
            Cell::opt(s.map(|s| s.r0)),
            Cell::Int(config.aim_depth as i64),
            Cell::opt(deeper),
            Cell::opt(s.map(|s| s.window.0)),
            Cell::opt(s.map(|s| s.window.1)),
            s.map_or(Cell::Empty, |s| Cell::Int(s.candidates.len() as i64)),
            status(&sol),
        ]);
    }
    Outcome::ok(render_table("aim", config, &table), warnings)
}

/// Finite-difference oracle energies.
pub fn oracle(config: &RunConfig) -> Outcome {
    let grid = match config.radial_grid() {
        Ok(g) => g,
        Err(e) => return Outcome::fail(EXIT_USAGE, e.to_string()),
    };
    let mut table = Table::new(&[
        "n", "k", "component", "E", "epsilon", "B", "eigenvalue", "negativeBranch", "iterations", "h",
        "points", "status",
    ]);
    let mut warnings = Vec::new();
    let ch = channel(config);
    for n in 0..=config.n_max {
        let sol: Result<FdSolution, Error> = ch.as_ref().map_err(Clone::clone).and_then(|c| {
            let start = bound_state_energy(c, n).ok().map(|s| s.energy);
            self_consistent_energy(c, n, &grid, start)
        });
        if let Err(e) = &sol {
            warnings.push(format!("n={n}: {e}"));
        }
        let s = sol.as_ref().ok();
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Int(config.setup.k),
            Cell::text(config.component.as_str()),
            Cell::opt(s.map(|s| s.state.energy)),
            Cell::opt(s.map(|s| s.state.epsilon)),
            Cell::opt(s.map(|s| s.state.b_value)),
            Cell::opt(s.map(|s| s.eigenvalue)),
            Cell::opt(s.map(|s| s.negative_branch)),
            s.map_or(Cell::Empty, |s| Cell::Int(s.iterations as i64)),
            Cell::Num(grid.h),
            Cell::Int(grid.count as i64),
            status(&sol),
        ]);
    }
    Outcome::ok(render_table("oracle", config, &table), warnings)
}

fn report_table(report: &VerifyReport) -> Table {
    let mut table = Table::new(&["suite", "case", "status", "measured", "tolerance", "error", "detail"]);
    for suite in &report.suites {
        for CheckRow { case, status, measured, tolerance, error, detail } in &suite.rows {
            table.push(vec![
                Cell::text(&suite.name),
                Cell::text(case),
                Cell::text(format!("{status:?}").to_lowercase()),
                Cell::opt(*measured),
                Cell::opt(*tolerance),
                error.as_ref().map_or(Cell::Empty, Cell::text),
                Cell::text(detail),
            ]);
        }
        for note in &suite.notes {
            table.push(vec![
                Cell::text(&suite.name),
                Cell::Empty,
                Cell::text("note"),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::text(note),
            ]);
        }
        let verdict = if suite.passed { "pass" } else { "fail" };
        table.push(vec![
            Cell::text(&suite.name),
            Cell::Empty,
            Cell::text(format!("suite-{verdict}")),
            Cell::Num(suite.failures() as f64),
            Cell::Empty,
            Cell::Empty,
            Cell::text(format!("{} check(s), {} failed", suite.rows.len(), suite.failures())),
        ]);
    }
    table
}

/// All verification suites; exit code 3 unless every suite passes.
pub fn verify(config: &RunConfig) -> Outcome {
    let grid = match config.radial_grid() {
        Ok(g) => g,
        Err(e) => return Outcome::fail(EXIT_USAGE, e.to_string()),
    };
    let options = VerifyOptions {
        n_max: config.n_max,
        aim_depth: config.aim_depth,
        aim_point: config.aim_point,
        grid,
        kummer_mode: config.kummer_mode,
    };
    let report = run_verification(&options);
    let summary: Vec<String> = report
        .suites
        .iter()
        .map(|s| format!("{}: {} ({} failed)", s.name, if s.passed { "pass" } else { "FAIL" }, s.failures()))
        .collect();
    let stdout = render_report("verify", config, &report, &report_table(&report));
    Outcome {
        stdout,
        stderr: join_lines(&summary),
        code: if report.passed { EXIT_OK } else { EXIT_VERIFY },
    }
}
