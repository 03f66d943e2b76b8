//! Stages and subcommands. Every command validates the whole scenario
//! first, then writes its outputs and a manifest into the output directory.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use stcq_core::floquet::{solve_refined, ConvergenceReport, HarmonicSpectrum};
use stcq_core::metrics::{metrics_report, MetricsReport};
use stcq_core::optimize::{search, verify_selectivity, OptimizationResult, Selectivity};
use stcq_core::qubits::{
    evolve, monochromatic_graph, polychromatic_graph, CouplingGraph, PureState, QubitArray, Trajectory,
};

use crate::config::{LoadedScenario, ScenarioFile};
use crate::error::CliError;
use crate::output::{emit_spectrum, emit_trajectory, Emitter, Format, RunManifest, StageFailure};

pub fn solve_stage(file: &ScenarioFile) -> Result<(HarmonicSpectrum, ConvergenceReport), CliError> {
    solve_refined(&file.modulation, &file.incident, &file.solver, file.convergence_window)
        .map_err(CliError::stage("solve"))
}

pub struct Graphs {
    pub array: QubitArray,
    pub mono: CouplingGraph,
    pub poly: CouplingGraph,
}

pub fn graph_stage(file: &ScenarioFile, spectrum: &HarmonicSpectrum) -> Result<Graphs, CliError> {
    let array = file.array()?;
    let mono = monochromatic_graph(&array).map_err(CliError::stage("graph"))?;
    let poly = polychromatic_graph(&array, spectrum, file.mapping()?).map_err(CliError::stage("graph"))?;
    Ok(Graphs { array, mono, poly })
}

pub fn evolve_stage(file: &ScenarioFile, graphs: &Graphs) -> Result<Trajectory, CliError> {
    let ev = file.evolution()?;
    let state = ev
        .initial_state(graphs.array.len())
        .map_err(CliError::stage("evolve"))?;
    evolve(&state, &graphs.poly, &graphs.array, &ev.config()).map_err(CliError::stage("evolve"))
}

pub fn metrics_stage(
    file: &ScenarioFile,
    mono: &CouplingGraph,
    poly: &CouplingGraph,
    evolved: Option<&PureState>,
) -> Result<MetricsReport, CliError> {
    let config = file.metrics.clone().unwrap_or_default();
    let reference = match (evolved, &file.evolution) {
        (Some(s), Some(ev)) => ev.reference_state(s.qubits).map_err(CliError::stage("metrics"))?,
        _ => None,
    };
    let states = evolved.zip(reference.as_ref());
    metrics_report(mono, poly, &config, states).map_err(CliError::stage("metrics"))
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn emit_metrics(out: &mut Emitter, report: &MetricsReport) -> Result<(), CliError> {
    if out.format.json() {
        out.json("metrics.json", report)?;
    }
    if out.format.csv() {
        let c = &report.connectivity;
        let mut rows = vec![
            ("pairs_mono".to_string(), c.pairs_mono.to_string()),
            ("pairs_poly".into(), c.pairs_poly.to_string()),
            ("edges_poly".into(), c.edges_poly.to_string()),
            ("c_ratio".into(), num(c.c_ratio)),
            ("d_mono".into(), num(c.d_mono)),
            ("d_poly".into(), num(c.d_poly)),
        ];
        if let Some(h) = &report.coherence {
            rows.push(("t2_s".into(), num(h.t2_s)));
            rows.push(("t2_prime_s".into(), num(h.t2_prime_s)));
            rows.push(("eval_time_s".into(), num(h.eval_time_s)));
            rows.push(("fidelity_mono".into(), num(h.fidelity_mono)));
            rows.push(("fidelity_poly".into(), num(h.fidelity_poly)));
        }
        for (i, n) in report.noise.iter().enumerate() {
            rows.push((format!("noise_{i}_s0"), num(n.s0)));
            rows.push((format!("noise_{i}_s_eff"), num(n.s_eff)));
        }
        if let Some(f) = report.state_fidelity {
            rows.push(("state_fidelity".into(), num(f)));
        }
        out.csv(
            "metrics.csv",
            &["metric".into(), "value".into()],
            rows.into_iter().map(|(k, v)| vec![k, v]),
        )?;
    }
    Ok(())
}

fn emit_solve(out: &mut Emitter, spectrum: &HarmonicSpectrum, report: &ConvergenceReport) -> Result<(), CliError> {
    emit_spectrum(out, "spectrum", spectrum)?;
    out.json("convergence.json", report)
}

fn emit_graphs(out: &mut Emitter, graphs: &Graphs) -> Result<(), CliError> {
    out.json("graph_mono.json", &graphs.mono)?;
    out.json("graph_poly.json", &graphs.poly)
}

/// Runs `body`, then writes the manifest; a failing stage is recorded in the
/// manifest and files written before it are kept.
fn with_manifest<T>(
    command: &str,
    loaded: &LoadedScenario,
    out_dir: &Path,
    format: Format,
    seed: Option<u64>,
    body: impl FnOnce(&mut Emitter) -> Result<T, CliError>,
) -> Result<(T, RunManifest), CliError> {
    let mut out = Emitter::new(out_dir, format)?;
    match body(&mut out) {
        Ok(value) => {
            let manifest = out.finish(command, &loaded.hash, seed, None)?;
            Ok((value, manifest))
        }
        Err(e) => {
            let stage = match &e {
                CliError::Stage { stage, .. } => stage.to_string(),
                _ => command.to_string(),
            };
            out.finish(
                command,
                &loaded.hash,
                seed,
                Some(StageFailure {
                    stage,
                    error: e.to_string(),
                }),
            )?;
            Err(e)
        }
    }
}

pub fn cmd_solve(loaded: &LoadedScenario, out_dir: &Path, format: Format) -> Result<RunManifest, CliError> {
    with_manifest("solve", loaded, out_dir, format, None, |out| {
        let (spectrum, report) = solve_stage(&loaded.file)?;
        emit_solve(out, &spectrum, &report)
    })
    .map(|r| r.1)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub directory: String,
    pub argmax_n: Option<i64>,
    pub max_power_r: f64,
    pub converged: bool,
}

/// Independent solves over the swept values, run concurrently, each in its
/// own subdirectory.
pub fn cmd_sweep(loaded: &LoadedScenario, out_dir: &Path, format: Format) -> Result<RunManifest, CliError> {
    let file = &loaded.file;
    let sweep = file.sweep.as_ref().ok_or(CliError::MissingSection("sweep"))?;
    with_manifest("sweep", loaded, out_dir, format, None, |out| {
        let runs: Vec<Result<(SweepPoint, Emitter), CliError>> = sweep
            .values
            .par_iter()
            .enumerate()
            .map(|(i, &value)| {
                let (profile, wave) = sweep.apply(file, value);
                let (spectrum, report) = solve_refined(&profile, &wave, &file.solver, file.convergence_window)
                    .map_err(CliError::stage("sweep"))?;
                let directory = format!("sweep_{i:03}");
                let mut sub = Emitter::new(&out_dir.join(&directory), format)?;
                emit_solve(&mut sub, &spectrum, &report)?;
                let point = SweepPoint {
                    value,
                    directory,
                    argmax_n: spectrum.argmax_power_r(1..=7),
                    max_power_r: spectrum.max_power_r(),
                    converged: report.converged,
                };
                Ok((point, sub))
            })
            .collect();
        let mut points = Vec::new();
        for run in runs {
            let (point, sub) = run?;
            out.absorb(&point.directory.clone(), sub);
            points.push(point);
        }
        if out.format.json() {
            out.json("sweep.json", &points)?;
        }
        if out.format.csv() {
            let header = ["value", "directory", "argmax_n", "max_power_r", "converged"].map(String::from);
            out.csv(
                "sweep.csv",
                &header,
                points.iter().map(|p| {
                    vec![
                        num(p.value),
                        p.directory.clone(),
                        p.argmax_n.map(|n| n.to_string()).unwrap_or_default(),
                        num(p.max_power_r),
                        p.converged.to_string(),
                    ]
                }),
            )?;
        }
        Ok(())
    })
    .map(|r| r.1)
}

pub fn cmd_evolve(loaded: &LoadedScenario, out_dir: &Path, format: Format) -> Result<RunManifest, CliError> {
    let file = &loaded.file;
    file.array()?;
    file.mapping()?;
    file.evolution()?;
    with_manifest("evolve", loaded, out_dir, format, None, |out| {
        let (spectrum, _) = solve_stage(file)?;
        let graphs = graph_stage(file, &spectrum)?;
        let trajectory = evolve_stage(file, &graphs)?;
        emit_trajectory(out, &trajectory)
    })
    .map(|r| r.1)
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeOutcome {
    pub result: OptimizationResult,
    pub selectivity: Selectivity,
}

pub fn cmd_optimize(
    loaded: &LoadedScenario,
    out_dir: &Path,
    format: Format,
    seed: Option<u64>,
) -> Result<(OptimizeOutcome, RunManifest), CliError> {
    let section = loaded
        .file
        .optimize
        .as_ref()
        .ok_or(CliError::MissingSection("optimize"))?;
    let mut config = section.search;
    if let Some(s) = seed {
        config.seed = s;
    }
    with_manifest("optimize", loaded, out_dir, format, Some(config.seed), |out| {
        let result = search(&section.scenario, &config).map_err(CliError::stage("optimize"))?;
        let selectivity = verify_selectivity(&result.spectrum, &section.scenario);
        let outcome = OptimizeOutcome { result, selectivity };
        out.json("optimization.json", &outcome)?;
        emit_spectrum(out, "spectrum", &outcome.result.spectrum)?;
        let header = ["restart", "iteration", "evaluations", "best_score"].map(String::from);
        out.csv(
            "trace.csv",
            &header,
            outcome.result.trace.iter().map(|t| {
                vec![
                    t.restart.to_string(),
                    t.iteration.to_string(),
                    t.evaluations.to_string(),
                    num(t.best_score),
                ]
            }),
        )?;
        Ok(outcome)
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Metrics from previously emitted graphs and state, or from a fresh solve
/// when the graphs are not given.
pub fn cmd_report(
    loaded: &LoadedScenario,
    out_dir: &Path,
    format: Format,
    mono: Option<&Path>,
    poly: Option<&Path>,
    state: Option<&Path>,
) -> Result<(MetricsReport, RunManifest), CliError> {
    let file = &loaded.file;
    let given = match (mono, poly) {
        (Some(m), Some(p)) => Some((read_json::<CouplingGraph>(m)?, read_json::<CouplingGraph>(p)?)),
        (None, None) => None,
        _ => return Err(CliError::Config("give both --mono and --poly, or neither".into())),
    };
    let state: Option<PureState> = state.map(read_json).transpose()?;
    if let Some((m, p)) = &given {
        for g in [m, p] {
            g.validate().map_err(|error| CliError::Validation {
                section: "graph",
                error,
            })?;
        }
    }
    with_manifest("report", loaded, out_dir, format, None, |out| {
        let (m, p) = match given {
            Some(pair) => pair,
            None => {
                let (spectrum, _) = solve_stage(file)?;
                let g = graph_stage(file, &spectrum)?;
                (g.mono, g.poly)
            }
        };
        let report = metrics_stage(file, &m, &p, state.as_ref())?;
        emit_metrics(out, &report)?;
        Ok(report)
    })
}

/// Everything one pipeline run produced.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub spectrum: HarmonicSpectrum,
    pub convergence: ConvergenceReport,
    pub mono: CouplingGraph,
    pub poly: CouplingGraph,
    pub trajectory: Trajectory,
    pub metrics: MetricsReport,
    pub manifest: RunManifest,
}

/// Solve, couple, evolve and evaluate, writing each stage's output before
/// starting the next.
pub fn run_scenario(loaded: &LoadedScenario, out_dir: &Path, format: Format) -> Result<PipelineOutcome, CliError> {
    let file = &loaded.file;
    file.array()?;
    file.mapping()?;
    file.evolution()?;
    let (parts, manifest) = with_manifest("run", loaded, out_dir, format, None, |out| {
        let (spectrum, convergence) = solve_stage(file)?;
        emit_solve(out, &spectrum, &convergence)?;
        let graphs = graph_stage(file, &spectrum)?;
        emit_graphs(out, &graphs)?;
        let trajectory = evolve_stage(file, &graphs)?;
        emit_trajectory(out, &trajectory)?;
        let metrics = metrics_stage(file, &graphs.mono, &graphs.poly, Some(&trajectory.final_state))?;
        emit_metrics(out, &metrics)?;
        Ok((spectrum, convergence, graphs, trajectory, metrics))
    })?;
    let (spectrum, convergence, graphs, trajectory, metrics) = parts;
    Ok(PipelineOutcome {
        spectrum,
        convergence,
        mono: graphs.mono,
        poly: graphs.poly,
        trajectory,
        metrics,
        manifest,
    })
}

/// Samples of `m(xi)` over one period and its Fourier coefficients.
pub fn cmd_dump_modulation(
    loaded: &LoadedScenario,
    out_dir: &Path,
    format: Format,
    samples: usize,
    order: usize,
) -> Result<RunManifest, CliError> {
    let profile = &loaded.file.modulation;
    if samples < 2 {
        return Err(CliError::Config("--samples must be at least 2".into()));
    }
    with_manifest("dump-modulation", loaded, out_dir, format, None, |out| {
        let series = profile
            .fourier_series(order)
            .map_err(CliError::stage("dump-modulation"))?;
        let points = profile.sample_normalized(samples);
        let coeffs: Vec<(i64, f64, f64)> = series
            .indices()
            .map(|k| (k, series.get(k).re, series.get(k).im))
            .collect();
        if out.format.json() {
            #[derive(Serialize)]
            struct Dump<'a> {
                profile: &'a stcq_core::ModulationProfile,
                samples: &'a [(f64, f64)],
                coefficients: &'a [(i64, f64, f64)],
            }
            out.json(
                "modulation.json",
                &Dump {
                    profile,
                    samples: &points,
                    coefficients: &coeffs,
                },
            )?;
        }
        if out.format.csv() {
            out.csv(
                "modulation.csv",
                &["xi_rad".into(), "m".into()],
                points.iter().map(|&(x, m)| vec![num(x), num(m)]),
            )?;
            out.csv(
                "modulation_coefficients.csv",
                &["k".into(), "re_c".into(), "im_c".into()],
                coeffs.iter().map(|&(k, re, im)| vec![k.to_string(), num(re), num(im)]),
            )?;
        }
        Ok(())
    })
    .map(|r| r.1)
}
