//! Full three-atom interaction-picture model on `{g, r}^3` and a numerical
//! check of its reduction to the four-level ladder.
//!
//! Basis states are ordered lexicographically, `|ggg>, |ggr>, ..., |rrr>`,
//! with atom 1 as the most significant bit (`r = 1`).
//!
//! Drive `i` enters as `Omega_ri(t) e^{-i w_i t} |r><g|` on every atom with
//! `w_1 = delta_1`, `w_2 = V + delta_2`, `w_3 = 2V + delta_3`. The constant
//! Stark drive `Omega_r0` sits a detuning `Delta_0` *below* the bare
//! transition, `w_0 = -Delta_0`; that is the sign for which the closed-form
//! `delta_i` cancel its light shifts and keep all three ladder transitions
//! resonant.

use crate::algebra::build_generators;
use crate::dynamics::{effective_hamiltonian, RabiTriple};
use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, r, Mat4, Mat8, State4, State8, C64};
use crate::propagate::ghz_fidelity;
use crate::schedule::PulseSchedule;
use crate::synthesis::EndpointSolution;
use serde::{Deserialize, Serialize};

pub const DIM: usize = 8;

/// Default lower bound for every `>>` ratio in the energy-scale hierarchy.
pub const DEFAULT_REQUIRED_RATIO: f64 = 10.0;

/// Steps per period of the fastest interaction-picture phase.
pub const DEFAULT_STIFFNESS: f64 = 50.0;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Small detunings `(delta_1, delta_2, delta_3)` that compensate the light
/// shifts of the Stark drive.
pub fn derived_detunings(omega_r0: f64, delta0: f64, v: f64) -> Result<[f64; 3]> {
    for (den, what) in [
        (delta0, "Delta0"),
        (delta0 + v, "Delta0 + V"),
        (delta0 + 2.0 * v, "Delta0 + 2V"),
    ] {
        if den == 0.0 {
            return Err(Error::DivisionByZero(what));
        }
    }
    let x = omega_r0 * omega_r0;
    Ok([
        6.0 * x / delta0 - 4.0 * x / (delta0 + v),
        -3.0 * x / delta0 + 8.0 * x / (delta0 + v) - 3.0 * x / (delta0 + 2.0 * v),
        -4.0 * x / (delta0 + v) + 6.0 * x / (delta0 + 2.0 * v),
    ])
}

/// Per-atom drive amplitudes `(Omega_r1, Omega_r2, Omega_r3)` behind the
/// collective ladder frequencies.
pub fn atomic_amplitudes(rabi: &RabiTriple) -> [f64; 3] {
    [
        rabi.omega1 / SQRT_3,
        rabi.omega2 / 2.0,
        rabi.omega3 / SQRT_3,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullModelParams {
    pub v: f64,
    pub delta0: f64,
    pub omega_r0: f64,
    pub schedule: PulseSchedule,
    /// Factor used by [`FullModelParams::for_factor`], when applicable.
    pub hierarchy_factor: Option<f64>,
    pub required_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    /// `min(V, Delta0) / max(|Omega_r0|, |delta_i|)`
    pub outer_ratio: f64,
    /// `|Omega_r0| / max |Omega_ri|`
    pub inner_ratio: f64,
    pub required: f64,
    pub satisfied: bool,
}

impl HierarchyReport {
    pub fn min_ratio(&self) -> f64 {
        self.outer_ratio.min(self.inner_ratio)
    }
}

impl FullModelParams {
    /// Scales the energies with the peak scheduled amplitude `W`:
    /// `Omega_r0 = f W` and `V = Delta0 = 2 f^2 W`.
    pub fn for_factor(schedule: PulseSchedule, factor: f64) -> Result<Self> {
        let peak = schedule.peak_amplitude();
        if !factor.is_finite() || factor <= 0.0 || peak <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "hierarchy factor {factor} with peak amplitude {peak}"
            )));
        }
        Ok(Self {
            v: 2.0 * factor * factor * peak,
            delta0: 2.0 * factor * factor * peak,
            omega_r0: factor * peak,
            schedule,
            hierarchy_factor: Some(factor),
            required_ratio: DEFAULT_REQUIRED_RATIO,
        })
    }

    pub fn detunings(&self) -> Result<[f64; 3]> {
        derived_detunings(self.omega_r0, self.delta0, self.v)
    }

    /// Angular frequencies `(w_0, w_1, w_2, w_3)` of the four drives.
    pub fn drive_frequencies(&self) -> Result<[f64; 4]> {
        let d = self.detunings()?;
        Ok([-self.delta0, d[0], self.v + d[1], 2.0 * self.v + d[2]])
    }

    pub fn hierarchy(&self) -> Result<HierarchyReport> {
        let d = self.detunings()?;
        let middle = d.iter().fold(self.omega_r0.abs(), |m, x| m.max(x.abs()));
        let small = self
            .schedule
            .samples
            .iter()
            .flat_map(|s| atomic_amplitudes(&s.rabi()))
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        let big = self.v.min(self.delta0);
        let outer_ratio = if middle > 0.0 {
            big / middle
        } else {
            f64::INFINITY
        };
        let inner_ratio = if small > 0.0 {
            self.omega_r0.abs() / small
        } else {
            f64::INFINITY
        };
        Ok(HierarchyReport {
            outer_ratio,
            inner_ratio,
            required: self.required_ratio,
            satisfied: outer_ratio.min(inner_ratio) >= self.required_ratio,
        })
    }

    /// Largest frequency the integrator must resolve.
    pub fn fastest_frequency(&self) -> f64 {
        self.delta0.abs() + 2.0 * self.v.abs()
    }
}

fn excited_pairs(state: usize) -> usize {
    let n = state.count_ones() as usize;
    n * n.saturating_sub(1) / 2
}

/// Blockade shifts `V * (#excited pairs)` on the diagonal.
pub fn blockade_diagonal(v: f64) -> [f64; DIM] {
    std::array::from_fn(|s| v * excited_pairs(s) as f64)
}

/// Collective raising operator `sum_k |r>_k <g|`.
pub fn collective_raising() -> Mat8 {
    let mut m = Mat8::zeros();
    for s in 0..DIM {
        for bit in 0..3 {
            if s & (1 << bit) == 0 {
                m[(s | (1 << bit), s)] = r(1.0);
            }
        }
    }
    m
}

fn drive_amplitude(t: f64, params: &FullModelParams, freqs: &[f64; 4]) -> C64 {
    let a = atomic_amplitudes(&params.schedule.rabi_at(t));
    let amps = [params.omega_r0, a[0], a[1], a[2]];
    amps.iter()
        .zip(freqs.iter())
        .map(|(amp, w)| C64::from_polar(*amp, -w * t))
        .sum()
}

fn assemble(diag: &[f64; DIM], raising: &Mat8, a: C64) -> Mat8 {
    let mut h = raising * a + raising.transpose() * a.conj();
    for (s, d) in diag.iter().enumerate() {
        h[(s, s)] += r(*d);
    }
    h
}

/// Hermitian 8x8 interaction-picture Hamiltonian at time `t`.
pub fn full_hamiltonian(t: f64, params: &FullModelParams) -> Result<Mat8> {
    let freqs = params.drive_frequencies()?;
    Ok(assemble(
        &blockade_diagonal(params.v),
        &collective_raising(),
        drive_amplitude(t, params, &freqs),
    ))
}

/// The six atom permutations as 8x8 matrices.
pub fn permutation_operators() -> Vec<Mat8> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|p| {
            let mut m = Mat8::zeros();
            for s in 0..DIM {
                let image = (0..3).fold(0, |acc, bit| acc | (((s >> bit) & 1) << p[bit]));
                m[(image, s)] = r(1.0);
            }
            m
        })
        .collect()
}

/// Orthonormal symmetric states `(|ggg>, |W>, |W'>, |rrr>)` as columns.
pub fn symmetric_isometry() -> nalgebra::SMatrix<C64, 8, 4> {
    let h = 1.0 / SQRT_3;
    let mut m = nalgebra::SMatrix::<C64, 8, 4>::zeros();
    m[(0, 0)] = r(1.0);
    for s in [1, 2, 4] {
        m[(s, 1)] = r(h);
    }
    for s in [3, 5, 6] {
        m[(s, 2)] = r(h);
    }
    m[(7, 3)] = r(1.0);
    m
}

pub fn embed(psi: &State4) -> State8 {
    symmetric_isometry() * psi
}

pub fn project(psi: &State8) -> State4 {
    symmetric_isometry().adjoint() * psi
}

/// Phases `theta_n` of the frame in which the light-shifted, resonantly
/// driven manifold evolves under the four-level ladder:
/// `c_n(t) = e^{-i theta_n t} c~_n(t)`.
pub fn frame_frequencies(params: &FullModelParams) -> Result<[f64; 4]> {
    let d = params.detunings()?;
    let stark_ggg = -3.0 * params.omega_r0 * params.omega_r0 / params.delta0;
    let w = stark_ggg + d[0];
    let w_prime = w + params.v + d[1];
    Ok([stark_ggg, w, w_prime, w_prime + 2.0 * params.v + d[2]])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Proceed even if the hierarchy check fails.
    pub force: bool,
    pub stiffness: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            force: false,
            stiffness: DEFAULT_STIFFNESS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub v: f64,
    pub delta0: f64,
    pub omega_r0: f64,
    pub detunings: [f64; 3],
    pub drive_frequencies: [f64; 4],
    pub duration: f64,
    pub peak_rabi: f64,
    pub steps: usize,
    pub dt: f64,
    /// The Stark drive is held constant over the whole pulse.
    pub omega_r0_envelope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Largest population outside span{ggg, W, W', rrr} over the run.
    pub leakage_max: f64,
    /// Largest total-variation distance between the full and effective
    /// manifold populations over the run.
    pub population_deviation_max: f64,
    /// `1 - |<psi_eff(T)|psi_full(T)>|^2` in the resonant frame.
    pub effective_vs_full_infidelity: f64,
    pub full_ghz_fidelity: f64,
    pub effective_ghz_fidelity: f64,
    pub hierarchy_factor: Option<f64>,
    pub hierarchy: HierarchyReport,
    pub params: ParamsEcho,
}

/// Integrates the eight-level dynamics from the embedded `|W>` alongside the
/// four-level prediction on the same grid and compares them.
pub fn validate_reduction(
    params: &FullModelParams,
    endpoint: &EndpointSolution,
    opts: &ValidateOptions,
) -> Result<ValidationReport> {
    let hierarchy = params.hierarchy()?;
    if !hierarchy.satisfied && !opts.force {
        return Err(Error::HierarchyViolation {
            min_ratio: hierarchy.min_ratio(),
            required: hierarchy.required,
        });
    }
    params.schedule.validate()?;
    let freqs = params.drive_frequencies()?;
    let duration = params.schedule.duration();
    let dt_max = 1.0 / (opts.stiffness * params.fastest_frequency());
    let steps = ((duration / dt_max).ceil() as usize).max(1);
    let dt = duration / steps as f64;
    let t0 = params.schedule.start();

    let diag = blockade_diagonal(params.v);
    let raising = collective_raising();
    let g = build_generators();
    let iso = symmetric_isometry();

    let mut full = embed(&crate::algebra::w_state());
    let mut eff = crate::algebra::w_state();
    let mut leakage_max = 0.0_f64;
    let mut deviation_max = 0.0_f64;
    for k in 0..steps {
        let t_mid = t0 + (k as f64 + 0.5) * dt;
        let h8 = assemble(&diag, &raising, drive_amplitude(t_mid, params, &freqs));
        full = expm_hermitian(&h8, dt) * full;
        let h4: Mat4 = effective_hamiltonian(&params.schedule.rabi_at(t_mid), &g);
        eff = expm_hermitian(&h4, dt) * eff;

        let manifold = iso.adjoint() * full;
        leakage_max = leakage_max.max(1.0 - manifold.norm_squared());
        let tv: f64 = manifold
            .iter()
            .zip(eff.iter())
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .sum();
        deviation_max = deviation_max.max(0.5 * tv);
    }

    let theta = frame_frequencies(params)?;
    let t_end = t0 + duration;
    let manifold = project(&full);
    let rotated = State4::from_fn(|n, _| manifold[n] * C64::from_polar(1.0, theta[n] * t_end));
    let overlap = eff.dotc(&rotated).norm_sqr();

    Ok(ValidationReport {
        leakage_max: leakage_max.max(0.0),
        population_deviation_max: deviation_max,
        effective_vs_full_infidelity: 1.0 - overlap,
        full_ghz_fidelity: ghz_fidelity(&rotated, endpoint.ghz_phase),
        effective_ghz_fidelity: ghz_fidelity(&eff, endpoint.ghz_phase),
        hierarchy_factor: params.hierarchy_factor,
        hierarchy,
        params: ParamsEcho {
            v: params.v,
            delta0: params.delta0,
            omega_r0: params.omega_r0,
            detunings: params.detunings()?,
            drive_frequencies: freqs,
            duration,
            peak_rabi: params.schedule.peak_amplitude(),
            steps,
            dt,
            omega_r0_envelope: "constant".into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrend {
    pub reports: Vec<ValidationReport>,
    /// Infidelity strictly decreases along the given factors.
    pub infidelity_decreasing: bool,
    /// Population deviation strictly decreases along the given factors.
    pub deviation_decreasing: bool,
}

/// Runs [`validate_reduction`] at each factor of [`FullModelParams::for_factor`].
pub fn hierarchy_trend(
    schedule: &PulseSchedule,
    endpoint: &EndpointSolution,
    factors: &[f64],
    opts: &ValidateOptions,
) -> Result<ReductionTrend> {
    let reports = factors
        .iter()
        .map(|&f| {
            validate_reduction(
                &FullModelParams::for_factor(schedule.clone(), f)?,
                endpoint,
                opts,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReductionTrend::new(reports))
}

impl ReductionTrend {
    /// Reports must be ordered by increasing hierarchy factor.
    pub fn new(reports: Vec<ValidationReport>) -> Self {
        let strictly =
            |key: fn(&ValidationReport) -> f64| reports.windows(2).all(|w| key(&w[1]) < key(&w[0]));
        Self {
            infidelity_decreasing: strictly(|r| r.effective_vs_full_infidelity),
            deviation_decreasing: strictly(|r| r.population_deviation_max),
            reports,
        }
    }

    pub fn monotone(&self) -> bool {
        self.infidelity_decreasing && self.deviation_decreasing
    }
}
