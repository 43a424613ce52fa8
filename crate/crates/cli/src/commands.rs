use crate::config::RunConfig;
use crate::output::{self, write_json};
use crate::{EXIT_NUMERICAL, EXIT_USAGE};
use anyhow::{anyhow, Context};
use ghz_core::fullmodel::{
    validate_reduction, FullModelParams, ReductionTrend, ValidateOptions, ValidationReport,
};
use ghz_core::propagate::{propagate_converged, state_fidelity, ConvergenceOptions};
use ghz_core::{
    enumerate_endpoints, reverse_schedule, squared_area, w_state, EndpointSolution, PulseProfile,
    PulseSchedule, State4,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn usage(source: anyhow::Error) -> Self {
        Self {
            code: EXIT_USAGE,
            source,
        }
    }

    pub fn numerical(source: anyhow::Error) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            source,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(source: anyhow::Error) -> Self {
        let code = match source.downcast_ref::<ghz_core::Error>() {
            Some(ghz_core::Error::NotConverged { .. }) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        Self { code, source }
    }
}

impl From<ghz_core::Error> for CliError {
    fn from(e: ghz_core::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

pub type Outcome = std::result::Result<(), CliError>;

#[derive(Debug, Serialize)]
struct EndpointTable {
    endpoints: Vec<EndpointSolution>,
}

pub fn endpoints(
    cfg: &RunConfig,
    filter: [Option<i8>; 3],
    explicit: bool,
    out: Option<PathBuf>,
    log: Option<PathBuf>,
) -> Outcome {
    cfg.validate()?;
    let rows = if explicit {
        vec![cfg.endpoint()?]
    } else {
        for q in filter.iter().flatten() {
            if q.abs() != 1 {
                return Err(CliError::usage(anyhow!("sign filter {q} must be +1 or -1")));
            }
        }
        let all = enumerate_endpoints(&cfg.solve_options());
        all.into_iter()
            .filter(|e| {
                let s = [e.signs.q1, e.signs.q2, e.signs.q3];
                s.iter()
                    .zip(filter.iter())
                    .all(|(v, f)| f.is_none_or(|f| f == *v))
            })
            .collect()
    };
    println!("theta_alpha_T\ttheta_beta_T\tphi_alpha_0\tphi_beta_0\tq1\tq2\tq3\tghz_phase");
    for e in &rows {
        println!(
            "{:.9}\t{:.9}\t{:.9}\t{:.9}\t{:+}\t{:+}\t{:+}\t{:.9}",
            e.theta_alpha_t,
            e.theta_beta_t,
            e.phi_alpha_0,
            e.phi_beta_0,
            e.signs.q1,
            e.signs.q2,
            e.signs.q3,
            e.ghz_phase
        );
    }
    if let Some(p) = &out {
        write_json(
            &EndpointTable {
                endpoints: rows.clone(),
            },
            Some(p),
        )?;
    }
    output::log(
        log.as_deref(),
        out.as_deref(),
        &format!("endpoints: {} rows", rows.len()),
    );
    Ok(())
}

pub fn synthesize(cfg: &RunConfig, log: Option<PathBuf>) -> Outcome {
    cfg.validate()?;
    let schedule = cfg.schedule()?;
    let omega_ref = cfg.omega_ref()?;
    let sidecar = match &cfg.output.schedule {
        Some(path) => output::write_schedule(&schedule, path, omega_ref)?,
        None => {
            let s = match omega_ref {
                Some(w) => output::to_physical(&schedule, w)?,
                None => schedule.clone(),
            };
            s.write_csv(std::io::stdout().lock())?;
            output::ScheduleSidecar {
                units: String::new(),
                omega_ref_mhz: omega_ref,
                area: squared_area(&s),
                plateau: output::plateau(&s),
                metadata: None,
            }
        }
    };
    let p = sidecar.plateau;
    eprintln!("area = {}", sidecar.area);
    eprintln!("plateau = ({}, {}, {})", p[0], p[1], p[2]);
    output::log(
        log.as_deref(),
        cfg.output.schedule.as_deref(),
        &format!(
            "synthesize: {} samples, area {}",
            schedule.samples.len(),
            sidecar.area
        ),
    );
    Ok(())
}

/// Schedule from `--schedule` (normalized units) or synthesized from the config.
fn load_schedule(
    cfg: &RunConfig,
    path: Option<&Path>,
) -> std::result::Result<PulseSchedule, CliError> {
    match path {
        Some(p) => {
            if !p.exists() {
                return Err(CliError::usage(anyhow!(
                    "schedule file {} not found",
                    p.display()
                )));
            }
            Ok(output::read_schedule(p, cfg.omega_ref()?)?.0)
        }
        None => Ok(cfg.schedule()?),
    }
}

#[derive(Debug, Serialize)]
pub struct PropagationReport {
    pub times: Vec<f64>,
    pub fidelity_trace: Vec<f64>,
    pub final_fidelity: f64,
    pub ghz_phase: Option<f64>,
    pub area: f64,
    pub endpoint: Option<EndpointSolution>,
    pub profile: Option<PulseProfile>,
    /// `ghz` for the forward run, `w` for `--reverse`.
    pub target: String,
    pub steps: usize,
    pub units: String,
    pub omega_ref_mhz: Option<f64>,
}

fn reverse_to_w(
    schedule: &PulseSchedule,
    start: &State4,
    opts: &ConvergenceOptions,
) -> std::result::Result<(Vec<f64>, Vec<f64>, usize), CliError> {
    let reversed = reverse_schedule(schedule);
    let w = w_state();
    let run = |steps: usize| -> std::result::Result<_, CliError> {
        let r = ghz_core::propagate(&reversed, start, steps)?;
        let trace: Vec<f64> = r.states.iter().map(|s| state_fidelity(&w, s)).collect();
        Ok((r.times, trace, steps))
    };
    let mut steps = opts.initial_steps.max(1);
    let mut prev = run(steps)?;
    for _ in 0..opts.max_doublings {
        steps *= 2;
        let next = run(steps)?;
        let change = (next.1.last().unwrap() - prev.1.last().unwrap()).abs();
        prev = next;
        if change < opts.tol {
            return Ok(prev);
        }
    }
    Err(CliError::numerical(anyhow!(
        "reverse propagation did not converge after {steps} steps"
    )))
}

pub fn propagate(
    cfg: &RunConfig,
    schedule_path: Option<PathBuf>,
    reverse: bool,
    log: Option<PathBuf>,
) -> Outcome {
    cfg.validate()?;
    let schedule = load_schedule(cfg, schedule_path.as_deref())?;
    let opts = ConvergenceOptions {
        initial_steps: cfg.propagation.steps,
        tol: cfg.propagation.tol,
        max_doublings: cfg.propagation.max_doublings,
    };
    let forward = propagate_converged(&schedule, &w_state(), &opts)?;
    let (times, trace, steps, target) = if reverse {
        let (t, f, n) = reverse_to_w(&schedule, forward.final_state(), &opts)?;
        (t, f, n, "w")
    } else {
        (
            forward.times.clone(),
            forward.fidelity_trace.clone(),
            forward.steps,
            "ghz",
        )
    };
    let omega_ref = cfg.omega_ref()?;
    let w = omega_ref.unwrap_or(1.0);
    let meta = schedule.metadata.as_ref();
    let report = PropagationReport {
        times: times.iter().map(|t| t / w).collect(),
        final_fidelity: *trace.last().unwrap(),
        fidelity_trace: trace,
        ghz_phase: forward.ghz_phase,
        area: forward.area * w,
        endpoint: meta.map(|m| m.endpoint),
        profile: meta.map(|m| m.profile),
        target: target.into(),
        steps,
        units: if omega_ref.is_some() {
            "physical"
        } else {
            "normalized"
        }
        .into(),
        omega_ref_mhz: omega_ref,
    };
    if let Some(p) = &cfg.output.trace {
        let mut text = String::from("t,fidelity\n");
        for (t, f) in report.times.iter().zip(report.fidelity_trace.iter()) {
            text.push_str(&format!("{t},{f}\n"));
        }
        std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    write_json(&report, cfg.output.result.as_deref())?;
    eprintln!("final_fidelity = {}", report.final_fidelity);
    output::log(
        log.as_deref(),
        cfg.output.result.as_deref(),
        &format!(
            "propagate: target {target}, {steps} steps, fidelity {}",
            report.final_fidelity
        ),
    );
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ValidationOutput {
    pub reports: Vec<ValidationReport>,
    pub infidelity_decreasing: bool,
    pub deviation_decreasing: bool,
    /// Every metric improves with each larger factor.
    pub monotone: bool,
}

pub fn validate_full(
    cfg: &RunConfig,
    schedule_path: Option<PathBuf>,
    log: Option<PathBuf>,
) -> Outcome {
    cfg.validate()?;
    let schedule = load_schedule(cfg, schedule_path.as_deref())?;
    let endpoint = match &schedule.metadata {
        Some(m) => m.endpoint,
        None => cfg.endpoint()?,
    };
    let opts = ValidateOptions {
        force: cfg.full.force,
        stiffness: cfg.full.stiffness,
    };
    let mut factors = cfg.full.factors.clone();
    factors.sort_by(f64::total_cmp);
    let mut reports = Vec::with_capacity(factors.len());
    for f in factors {
        let mut params = FullModelParams::for_factor(schedule.clone(), f)?;
        params.required_ratio = cfg.full.required_ratio;
        reports.push(validate_reduction(&params, &endpoint, &opts)?);
    }
    let trend = ReductionTrend::new(reports);
    let out = ValidationOutput {
        monotone: trend.monotone(),
        infidelity_decreasing: trend.infidelity_decreasing,
        deviation_decreasing: trend.deviation_decreasing,
        reports: trend.reports,
    };
    write_json(&out, cfg.output.report.as_deref())?;
    output::log(
        log.as_deref(),
        cfg.output.report.as_deref(),
        &format!(
            "validate-full: {} factors, monotone {}",
            out.reports.len(),
            out.monotone
        ),
    );
    Ok(())
}

pub fn check(out: Option<PathBuf>, log: Option<PathBuf>) -> Outcome {
    let outcomes = ghz_core::checks::run_all();
    for c in &outcomes {
        println!(
            "{} {:<48} worst {:.3e} (tol {:.0e}) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tol,
            c.detail
        );
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    if let Some(p) = &out {
        write_json(&outcomes, Some(p))?;
    }
    output::log(
        log.as_deref(),
        out.as_deref(),
        &format!("check: {failed} failed"),
    );
    if failed > 0 {
        return Err(CliError::numerical(anyhow!(
            "{failed} invariant check(s) failed"
        )));
    }
    Ok(())
}
