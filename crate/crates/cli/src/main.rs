//! `cyclink`: weight reports, transversality certificates, curve traces,
//! torus maps and tube probes for the cyclic mixed polynomial family.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or config
//! error. Reports are byte-identical for identical (config, seed), whatever
//! the worker count and wherever the output goes.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cyclink_core::{family, rng, sampler, torusmap, transversal, weights, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use config::RunConfig;
use report::*;

#[derive(Parser)]
#[command(name = "cyclink", version, about = "Links of cyclic mixed polynomial families")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of config `out` / stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for certify. Never changes the result.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weight systems, simpliciality and graph shape across the t grid.
    Weights,
    /// Certify transversality of the link over the (t, r) grid.
    Certify,
    /// Sample one link point and trace the curve through it.
    Trace {
        /// Family parameter, in [0, 1].
        #[arg(long)]
        t: f64,
        /// Sphere radius, positive.
        #[arg(long)]
        r: f64,
    },
    /// Exact torus coordinate change at both family endpoints.
    TorusMap,
    /// Probe fiber levels for the largest eta with full Newton recovery.
    Eta0,
}

enum Failure {
    Usage(String),
    Math(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| Failure::Usage("--config PATH is required".into()))?;
    let mut config = RunConfig::load(config_path).map_err(Failure::Usage)?;
    if let Some(seed) = cli.seed {
        // Echoed in the report: this is the seed that actually ran.
        config.seed = seed;
    }
    let out = cli.out.or_else(|| config.out.clone().map(PathBuf::from));
    let out = out.as_deref();
    let tol = config.tolerances.to_tolerances();
    match cli.command {
        Command::Weights => cmd_weights(&config, out),
        Command::Certify => cmd_certify(&config, out, cli.jobs, &tol),
        Command::Trace { t, r } => cmd_trace(&config, out, t, r, &tol),
        Command::TorusMap => cmd_torus_map(&config, out),
        Command::Eta0 => cmd_eta0(&config, out, &tol),
    }
}

fn emit<R: Serialize, S: Serialize>(
    out: Option<&Path>,
    config: &RunConfig,
    command: &'static str,
    results: &R,
    summary: &S,
) -> Result<(), Failure> {
    let report = Report {
        version: env!("CARGO_PKG_VERSION"),
        config,
        command,
        results,
        summary,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::Usage(format!("serialize report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate_t(label: &str, ts: &[f64]) -> Result<(), Failure> {
    for &t in ts {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return Err(Failure::Usage(format!("{label}: t = {t} is outside [0, 1]")));
        }
    }
    Ok(())
}

fn validate_positive(label: &str, xs: &[f64]) -> Result<(), Failure> {
    for &x in xs {
        if !x.is_finite() || x <= 0.0 {
            return Err(Failure::Usage(format!("{label}: {x} must be positive")));
        }
    }
    Ok(())
}

fn cmd_weights(config: &RunConfig, out: Option<&Path>) -> Result<u8, Failure> {
    // Assumption violations are reported, not fatal; only shape errors stop
    // the command.
    let spec = config.relaxed_spec().map_err(Failure::Usage)?;
    let t_grid = &config.grid.t;
    if t_grid.is_empty() {
        return Err(Failure::Usage("weights needs a nonempty grid.t".into()));
    }
    validate_t("grid.t", t_grid)?;

    let violations: Vec<String> = spec.violations().iter().map(|v| v.to_string()).collect();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let member = family::make_member(&spec, t).expect("t was validated");
        let f = member.poly();
        let radial = if t == 0.0 || t == 1.0 {
            Some(WeightOutcome::from(weights::radial_weight(f)))
        } else {
            None
        };
        rows.push(WeightsRow {
            t,
            simplicial: weights::is_simplicial(f),
            full: weights::is_full(f),
            polar: WeightOutcome::from(weights::polar_weight(f)),
            radial,
        });
    }

    // The monomial support is the same for every t; classify once.
    let graph: Vec<String> = family::make_member(&spec, 0.0)
        .expect("t = 0 is in range")
        .poly()
        .variable_graph()
        .components
        .iter()
        .map(component_label)
        .collect();

    let mut pass = violations.is_empty();
    for row in &rows {
        pass &= row.polar.error.is_none();
        if let Some(rad) = &row.radial {
            pass &= rad.error.is_none();
        }
    }
    let summary = WeightsSummary { det_nm: spec.det_nm(), graph, violations, pass };
    emit(out, config, "weights", &rows, &summary)?;
    Ok(if summary.pass { 0 } else { 1 })
}

fn cmd_certify(
    config: &RunConfig,
    out: Option<&Path>,
    jobs: usize,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let spec = config.family_spec().map_err(Failure::Usage)?;
    let t_grid = &config.grid.t;
    let r_list = &config.grid.r;
    if t_grid.is_empty() || r_list.is_empty() {
        return Err(Failure::Usage("certify needs nonempty grid.t and grid.r".into()));
    }
    validate_t("grid.t", t_grid)?;
    validate_positive("grid.r", r_list)?;
    if jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }

    // Cell seeds depend only on the grid position, and the indexed collect
    // keeps cell order, so any worker count gives the identical report.
    let indexed: Vec<(u64, f64, f64)> = t_grid
        .iter()
        .enumerate()
        .flat_map(|(ti, &t)| {
            r_list.iter().enumerate().map(move |(ri, &r)| ((ti * r_list.len() + ri) as u64, t, r))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    let samples = config.grid.samples_per_cell;
    let cells = pool
        .install(|| {
            indexed
                .par_iter()
                .map(|&(idx, t, r)| {
                    transversal::certify_cell(&spec, t, r, samples, rng::derive_seed(config.seed, idx), tol)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let cert = transversal::assemble(spec, t_grid.clone(), r_list.clone(), cells);
    let rows: Vec<CellReport> = cert.cells.iter().map(CellReport::from_cell).collect();
    let summary = CertifySummary::from_summary(&cert.summary);
    emit(out, config, "certify", &rows, &summary)?;
    Ok(if cert.summary.all_pass && !cert.summary.vacuous { 0 } else { 1 })
}

fn cmd_trace(
    config: &RunConfig,
    out: Option<&Path>,
    t: f64,
    r: f64,
    tol: &Tolerances,
) -> Result<u8, Failure> {
    let spec = config.family_spec().map_err(Failure::Usage)?;
    validate_t("--t", &[t])?;
    validate_positive("--r", &[r])?;
    let member = family::make_member(&spec, t).expect("t was validated");

    let batch = sampler::sample_link(&member, r, 1, config.seed, tol);
    let sample = batch.samples.first().ok_or_else(|| {
        let detail = batch
            .failures
            .first()
            .map(|f| format!(" (residual {:.3e} after {} iterations)", f.residual, f.iterations))
            .unwrap_or_default();
        Failure::Math(format!("no link point converged at t = {t}, r = {r}{detail}"))
    })?;

    let points = transversal::trace_curve(&member, sample, &config.grid.s, tol)
        .map_err(|e| Failure::Math(e.to_string()))?;
    let rows: Vec<TraceRow> = points.iter().map(TraceRow::from_point).collect();
    let all_converged = points.iter().all(|p| p.converged);
    let summary = TraceSummary {
        t,
        r,
        w_re: sample.w.iter().map(|c| c.re).collect(),
        w_im: sample.w.iter().map(|c| c.im).collect(),
        points: points.len(),
        all_converged,
        max_residual: points.iter().map(|p| p.residual).fold(0.0, f64::max),
    };
    emit(out, config, "trace", &rows, &summary)?;
    Ok(if all_converged { 0 } else { 1 })
}

fn cmd_torus_map(config: &RunConfig, out: Option<&Path>) -> Result<u8, Failure> {
    let spec = config.family_spec().map_err(Failure::Usage)?;
    let mut rows = Vec::with_capacity(2);
    let mut max_residual = 0.0f64;
    for t in [0.0, 1.0] {
        let member = family::make_member(&spec, t).expect("endpoints are in range");
        let map = torusmap::build_torus_map(member.poly())
            .map_err(|e| Failure::Math(format!("torus map at t = {t}: {e}")))?;
        let residual = torusmap::check_fiber_preservation(
            member.poly(),
            &map,
            config.grid.samples_per_cell,
            config.seed,
        );
        max_residual = max_residual.max(residual);
        let rep = torusmap::extendability_report(&map);
        let verdict = match rep.verdict {
            torusmap::ExtendVerdict::Extendable => "extendable",
            torusmap::ExtendVerdict::NonExtendable => "non-extendable",
            torusmap::ExtendVerdict::NoObstructionFound => "no-obstruction-found",
        };
        rows.push(TorusMapRow {
            t,
            exponents: rat_matrix_strings(map.exponents()),
            inverse_exponents: rat_matrix_strings(map.inverse_exponents()),
            fiber_residual: residual,
            verdict: verdict.to_string(),
            negatives: rep
                .negatives
                .iter()
                .map(|(i, j, v)| NegativeEntry { row: *i, col: *j, value: v.to_string() })
                .collect(),
        });
    }
    // The straightening identity is exact algebra; anything above roundoff
    // means the map does not match the polynomial.
    let pass = max_residual <= 1e-8;
    let summary = TorusMapSummary { det_nm: spec.det_nm(), max_fiber_residual: max_residual, pass };
    emit(out, config, "torus-map", &rows, &summary)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_eta0(config: &RunConfig, out: Option<&Path>, tol: &Tolerances) -> Result<u8, Failure> {
    let spec = config.family_spec().map_err(Failure::Usage)?;
    let t_grid = &config.grid.t;
    let r_list = &config.grid.r;
    let eta_grid = &config.grid.eta;
    if t_grid.is_empty() || r_list.is_empty() || eta_grid.is_empty() {
        return Err(Failure::Usage("eta0 needs nonempty grid.t, grid.r and grid.eta".into()));
    }
    validate_t("grid.t", t_grid)?;
    validate_positive("grid.r", r_list)?;
    validate_positive("grid.eta", eta_grid)?;

    let mut rows = Vec::with_capacity(t_grid.len() * r_list.len());
    let mut all_pass = true;
    for (ti, &t) in t_grid.iter().enumerate() {
        let member = family::make_member(&spec, t).expect("t was validated");
        for (ri, &r) in r_list.iter().enumerate() {
            let cell_index = (ti * r_list.len() + ri) as u64;
            let est = sampler::estimate_eta0(
                &member,
                r,
                eta_grid,
                config.grid.samples_per_cell,
                rng::derive_seed(config.seed, cell_index),
                tol,
            );
            all_pass &= est.probes.iter().all(|p| p.pass);
            rows.push(TubeRow {
                t,
                r,
                eta0: est.eta0,
                probes: est.probes.iter().map(ProbeRow::from_probe).collect(),
            });
        }
    }
    let min_eta0 = rows.iter().map(|row| row.eta0).fold(f64::INFINITY, f64::min);
    let summary = Eta0Summary { cells: rows.len(), min_eta0, all_pass };
    emit(out, config, "eta0", &rows, &summary)?;
    Ok(if all_pass { 0 } else { 1 })
}
