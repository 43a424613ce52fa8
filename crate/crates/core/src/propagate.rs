//! Schrodinger integration under the effective Hamiltonian, GHZ fidelities
//! and squared pulse areas.
//!
//! The stepper is the exponential midpoint rule: each step applies
//! `exp(-i H(t_mid) dt)`, so every step is exactly unitary and the global
//! error is second order in `dt`.

use crate::algebra::{build_generators, ggg, ghz_state, rrr, GeneratorSet};
use crate::dynamics::effective_hamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, State4};
use crate::schedule::{PulseSchedule, ScheduleMetadata, ScheduleSample};
use crate::synthesis::wrap_angle;

pub const DEFAULT_STEPS: usize = 4096;

/// Minimum `|<ggg|psi>|` and `|<rrr|psi>|` for a meaningful GHZ phase.
pub const PHASE_AMPLITUDE_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub states: Vec<State4>,
    /// `|<GHZ(phase)|psi(t)>|^2` with the phase extracted from the final state.
    pub fidelity_trace: Vec<f64>,
    /// `None` when the final state has too little `|ggg>`/`|rrr>` weight.
    pub ghz_phase: Option<f64>,
    pub area: f64,
    pub final_fidelity: f64,
    pub steps: usize,
}

impl PropagationResult {
    pub fn final_state(&self) -> &State4 {
        &self.states[self.states.len() - 1]
    }

    pub fn max_norm_error(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn check_inputs(schedule: &PulseSchedule, initial: &State4) -> Result<()> {
    schedule.validate()?;
    let norm = initial.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

struct Stepper<'a> {
    schedule: &'a PulseSchedule,
    generators: GeneratorSet,
    dt: f64,
}

impl Stepper<'_> {
    fn step(&self, k: usize, psi: &State4) -> State4 {
        let t_mid = self.schedule.start() + (k as f64 + 0.5) * self.dt;
        let h = effective_hamiltonian(&self.schedule.rabi_at(t_mid), &self.generators);
        expm_hermitian(&h, self.dt) * psi
    }
}

/// Final state only; used by convergence loops.
pub fn evolve(schedule: &PulseSchedule, initial: &State4, steps: usize) -> Result<State4> {
    check_inputs(schedule, initial)?;
    let steps = steps.max(1);
    let stepper = Stepper {
        schedule,
        generators: build_generators(),
        dt: schedule.duration() / steps as f64,
    };
    Ok((0..steps).fold(*initial, |psi, k| stepper.step(k, &psi)))
}

/// Integrates `i d|psi>/dt = H_eff(t) |psi>` with `steps` uniform steps,
/// recording the state after every step.
pub fn propagate(
    schedule: &PulseSchedule,
    initial: &State4,
    steps: usize,
) -> Result<PropagationResult> {
    check_inputs(schedule, initial)?;
    let steps = steps.max(1);
    let stepper = Stepper {
        schedule,
        generators: build_generators(),
        dt: schedule.duration() / steps as f64,
    };
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(schedule.start());
    states.push(*initial);
    let mut psi = *initial;
    for k in 0..steps {
        psi = stepper.step(k, &psi);
        times.push(schedule.start() + (k + 1) as f64 * stepper.dt);
        states.push(psi);
    }
    let ghz_phase = extract_ghz_phase(&psi).ok();
    let phase = ghz_phase.unwrap_or(0.0);
    let fidelity_trace: Vec<f64> = states.iter().map(|s| ghz_fidelity(s, phase)).collect();
    Ok(PropagationResult {
        final_fidelity: fidelity_trace[fidelity_trace.len() - 1],
        times,
        states,
        fidelity_trace,
        ghz_phase,
        area: squared_area(schedule),
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub initial_steps: usize,
    /// Accept once doubling the step count changes the final fidelity by less.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            initial_steps: DEFAULT_STEPS,
            tol: 1e-8,
            max_doublings: 8,
        }
    }
}

/// [`propagate`] with step doubling until the final GHZ fidelity settles.
pub fn propagate_converged(
    schedule: &PulseSchedule,
    initial: &State4,
    opts: &ConvergenceOptions,
) -> Result<PropagationResult> {
    let mut steps = opts.initial_steps.max(1);
    let mut previous = propagate(schedule, initial, steps)?;
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_doublings {
        steps *= 2;
        let next = propagate(schedule, initial, steps)?;
        change = (next.final_fidelity - previous.final_fidelity).abs();
        previous = next;
        if change < opts.tol {
            return Ok(previous);
        }
    }
    Err(Error::NotConverged {
        last_change: change,
        steps,
    })
}

/// `|<GHZ(phase)|psi>|^2`
pub fn ghz_fidelity(state: &State4, phase: f64) -> f64 {
    ghz_state(phase).dotc(state).norm_sqr()
}

pub fn state_fidelity(target: &State4, state: &State4) -> f64 {
    target.dotc(state).norm_sqr()
}

/// `arg <rrr|psi> - arg <ggg|psi>` in `[0, 2 pi)`.
pub fn extract_ghz_phase(state: &State4) -> Result<f64> {
    let a = ggg().dotc(state);
    let b = rrr().dotc(state);
    for (which, z) in [("ggg", a), ("rrr", b)] {
        if z.norm() <= PHASE_AMPLITUDE_FLOOR {
            return Err(Error::AmplitudeTooSmall {
                which,
                amplitude: z.norm(),
            });
        }
    }
    Ok(wrap_angle(b.arg() - a.arg()))
}

/// `int sum_i Omega_i(t)^2 dt` for the linearly interpolated schedule,
/// integrated exactly segment by segment.
pub fn squared_area(schedule: &PulseSchedule) -> f64 {
    schedule
        .samples
        .windows(2)
        .map(|w| {
            let h = w[1].t - w[0].t;
            let seg = |a: f64, b: f64| (a * a + a * b + b * b) / 3.0;
            h * (seg(w[0].omega1, w[1].omega1)
                + seg(w[0].omega2, w[1].omega2)
                + seg(w[0].omega3, w[1].omega3))
        })
        .sum()
}

/// Rescales `Omega -> lambda Omega`, `t -> t / lambda` with
/// `lambda = target / A`. Every `int Omega_i dt` is unchanged, so the curve
/// endpoint is too; the area becomes `target`.
pub fn normalize_to_area(schedule: &PulseSchedule, target_area: f64) -> Result<PulseSchedule> {
    let area = squared_area(schedule);
    if area <= 0.0 || target_area.is_nan() || target_area <= 0.0 || !target_area.is_finite() {
        return Err(Error::ZeroArea);
    }
    let lambda = target_area / area;
    let t0 = schedule.start();
    let samples: Vec<ScheduleSample> = schedule
        .samples
        .iter()
        .map(|s| ScheduleSample {
            t: t0 + (s.t - t0) / lambda,
            omega1: s.omega1 * lambda,
            omega2: s.omega2 * lambda,
            omega3: s.omega3 * lambda,
        })
        .collect();
    let mut out = PulseSchedule::new(samples)?;
    out.metadata = schedule.metadata.clone().map(|m| ScheduleMetadata {
        profile: crate::synthesis::PulseProfile {
            duration: m.profile.duration / lambda,
            ..m.profile
        },
        area: squared_area(&out),
        ..m
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::w_state;
    use crate::dynamics::RabiTriple;
    use crate::linalg::{c, r};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn constant(rabi: RabiTriple, t_end: f64) -> PulseSchedule {
        PulseSchedule::new(vec![
            ScheduleSample::new(0.0, rabi),
            ScheduleSample::new(t_end, rabi),
        ])
        .unwrap()
    }

    #[test]
    fn zero_schedule_keeps_w() {
        let s = constant(RabiTriple::default(), 2.0);
        let res = propagate(&s, &w_state(), 64).unwrap();
        assert!(res.states.iter().all(|p| (p - w_state()).norm() < 1e-15));
        assert!(res.fidelity_trace.iter().all(|f| *f == 0.0));
        assert_eq!(res.ghz_phase, None);
        assert_eq!(res.area, 0.0);
    }

    #[test]
    fn fidelity_examples() {
        assert!((ghz_fidelity(&ghz_state(1.1), 1.1) - 1.0).abs() < 1e-15);
        assert_eq!(ghz_fidelity(&w_state(), 0.3), 0.0);
        let psi = State4::new(r(FRAC_1_SQRT_2), r(0.0), r(0.0), c(0.0, FRAC_1_SQRT_2));
        assert!((ghz_fidelity(&psi, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        assert!(extract_ghz_phase(&ghz_state(0.0)).unwrap().abs() < 1e-15);
        assert!((extract_ghz_phase(&ghz_state(PI)).unwrap() - PI).abs() < 1e-15);
        assert!(matches!(
            extract_ghz_phase(&w_state()),
            Err(Error::AmplitudeTooSmall { which: "ggg", .. })
        ));
    }

    #[test]
    fn area_examples() {
        let s = constant(RabiTriple::new(1.0, 2.0, 3.0), 0.5);
        assert!((squared_area(&s) - 7.0).abs() < 1e-15);
        assert_eq!(squared_area(&constant(RabiTriple::default(), 1.0)), 0.0);
        // linear ramp 0 -> 1 on one channel: int t^2 = 1/3
        let ramp = PulseSchedule::new(vec![
            ScheduleSample::new(0.0, RabiTriple::default()),
            ScheduleSample::new(1.0, RabiTriple::new(1.0, 0.0, 0.0)),
        ])
        .unwrap();
        assert!((squared_area(&ramp) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalization() {
        let s = constant(RabiTriple::new(1.0, 0.0, 1.0), 1.0);
        let same = normalize_to_area(&s, 2.0).unwrap();
        assert_eq!(same.samples, s.samples);
        let doubled = normalize_to_area(&s, 4.0).unwrap();
        assert_eq!(doubled.samples[1].omega1, 2.0);
        assert_eq!(doubled.duration(), 0.5);
        assert!(matches!(
            normalize_to_area(&constant(RabiTriple::default(), 1.0), 1.0),
            Err(Error::ZeroArea)
        ));
        assert!(normalize_to_area(&s, 0.0).is_err());
    }

    #[test]
    fn input_validation() {
        let s = constant(RabiTriple::new(1.0, 0.0, 0.0), 1.0);
        let bad = w_state() * r(2.0);
        assert!(matches!(
            propagate(&s, &bad, 8),
            Err(Error::NotNormalized { .. })
        ));
        let mut broken = s.clone();
        broken.samples[1].omega2 = f64::INFINITY;
        assert!(matches!(
            propagate(&broken, &w_state(), 8),
            Err(Error::NonFiniteSchedule { row: 1 })
        ));
    }
}
