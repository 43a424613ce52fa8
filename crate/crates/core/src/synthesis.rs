//! Constraint-satisfying curves with `|alpha| = |beta| = pi`, the GHZ endpoint
//! search, pulse profiles, and the resulting Rabi schedules.
//!
//! Along every curve built here the azimuths stay fixed and
//! `theta_beta - theta_0 = (cos phi_alpha / cos phi_beta) (theta_alpha - theta_0)`,
//! which makes `w3[alpha] = w3[beta] = 0` and `w2[alpha] = w2[beta]` hold
//! identically.

use crate::algebra::{build_generators, w_state};
use crate::dynamics::{CurveSample, RabiTriple};
use crate::error::{Error, Result};
use crate::linalg::State4;
use crate::propagate::squared_area;
use crate::roots::scan_roots;
use crate::schedule::{PulseSchedule, ScheduleMetadata, ScheduleSample};
use crate::unitary::{exp_map, RotationVectorPair, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2, TAU};

/// Residual tolerance used when accepting an endpoint.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// Below this `|cos phi_beta|` the Rabi formulas diverge.
pub const TAN_SINGULARITY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signs {
    pub q1: i8,
    pub q2: i8,
    pub q3: i8,
}

impl Signs {
    pub fn new(q1: i8, q2: i8, q3: i8) -> Result<Self> {
        if [q1, q2, q3].iter().any(|q| q.abs() != 1) {
            return Err(Error::InvalidParameter(format!(
                "signs must be +1 or -1, got ({q1}, {q2}, {q3})"
            )));
        }
        Ok(Self { q1, q2, q3 })
    }

    const fn raw(q1: i8, q2: i8, q3: i8) -> Self {
        Self { q1, q2, q3 }
    }

    fn f(&self) -> (f64, f64, f64) {
        (self.q1 as f64, self.q2 as f64, self.q3 as f64)
    }
}

/// Canonical enumeration order of the sign triples.
pub const SIGN_ORDER: [Signs; 8] = [
    Signs::raw(1, -1, 1),
    Signs::raw(1, 1, 1),
    Signs::raw(-1, 1, 1),
    Signs::raw(-1, -1, 1),
    Signs::raw(-1, 1, -1),
    Signs::raw(-1, -1, -1),
    Signs::raw(1, -1, -1),
    Signs::raw(1, 1, -1),
];

/// Starting point `alpha(0) = beta(0) = (0, 0, ±pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialPoint {
    #[default]
    PlusPi,
    MinusPi,
}

impl InitialPoint {
    /// Polar angle of the starting point.
    pub fn theta(&self) -> f64 {
        match self {
            InitialPoint::PlusPi => 0.0,
            InitialPoint::MinusPi => PI,
        }
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(0.0, 0.0, PI * self.theta().cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Index into the ascending list of roots for one sign triple.
    pub branch: usize,
    pub initial: InitialPoint,
    pub scan_points: usize,
    pub xtol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            branch: 0,
            initial: InitialPoint::PlusPi,
            scan_points: 2048,
            xtol: 1e-15,
        }
    }
}

/// A curve endpoint whose unitary maps `|W>` onto a GHZ state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointSolution {
    pub theta_alpha_t: f64,
    pub theta_beta_t: f64,
    pub phi_alpha_0: f64,
    pub phi_beta_0: f64,
    pub signs: Signs,
    pub initial: InitialPoint,
    pub branch: usize,
    /// Relative phase of the GHZ state reached from `|W>`.
    pub ghz_phase: f64,
}

fn spherical(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ) * PI
}

/// Maps an angle into `[0, 2 pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Unit-radius family `(alpha(T), beta(T)) / pi` solving the GHZ conditions,
/// parametrized by `u = alpha_3(T) / pi` in `[-1/sqrt 2, 1/sqrt 2]`.
fn family(u: f64, signs: Signs) -> (Vec3, Vec3) {
    let (q1, q2, q3) = signs.f();
    let rb = (0.5 - u * u).max(0.0).sqrt();
    let a = Vec3::new(q1 * u, q2 * SQRT_2 * rb, u);
    let b = Vec3::new(-q1 * q3 * rb, SQRT_2 * q2 * q3 * u, q3 * rb);
    (a, b)
}

fn polar_angles(v: &Vec3) -> (f64, f64) {
    let theta = v[2].clamp(-1.0, 1.0).acos();
    let phi = wrap_angle(v[1].atan2(v[0]));
    (theta, phi)
}

/// `(theta_beta - theta_0) cos phi_beta - (theta_alpha - theta_0) cos phi_alpha`
fn boundary_residual_at(u: f64, signs: Signs, theta0: f64) -> f64 {
    let (a, b) = family(u, signs);
    let (ta, _) = polar_angles(&a);
    let (tb, _) = polar_angles(&b);
    let cos_pa = a[0] / ta.sin();
    let cos_pb = b[0] / tb.sin();
    (tb - theta0) * cos_pb - (ta - theta0) * cos_pa
}

/// Residuals of the four GHZ conditions for `|alpha| = |beta| = pi`.
pub fn ghz_condition_residuals(alpha: &Vec3, beta: &Vec3) -> [f64; 4] {
    let (a, b) = (alpha, beta);
    let target = PI * PI * FRAC_1_SQRT_2;
    [
        (a[2] * b[1] + a[1] * b[2]).abs() - target,
        a[0] * b[0] + a[1] * b[1] - a[2] * b[2],
        a[0] * b[2] + a[2] * b[0],
        (a[1] * b[0] - a[0] * b[1]).abs() - target,
    ]
}

impl EndpointSolution {
    /// Builds an endpoint from user-supplied angles and checks every relation;
    /// the error carries the residuals when a relation fails.
    pub fn from_angles(
        theta_alpha_t: f64,
        theta_beta_t: f64,
        phi_alpha_0: f64,
        phi_beta_0: f64,
        signs: Signs,
        initial: InitialPoint,
    ) -> Result<Self> {
        let mut sol = Self {
            theta_alpha_t,
            theta_beta_t,
            phi_alpha_0: wrap_angle(phi_alpha_0),
            phi_beta_0: wrap_angle(phi_beta_0),
            signs,
            initial,
            branch: 0,
            ghz_phase: 0.0,
        };
        let residuals = sol.all_residuals();
        if residuals.iter().any(|r| r.abs() > ENDPOINT_TOL) {
            return Err(Error::NoSolution {
                reason: "pinned angles violate the GHZ endpoint relations".into(),
                residuals,
            });
        }
        sol.ghz_phase = sol.reached_phase()?;
        Ok(sol)
    }

    pub fn alpha_t(&self) -> Vec3 {
        spherical(self.theta_alpha_t, self.phi_alpha_0)
    }

    pub fn beta_t(&self) -> Vec3 {
        spherical(self.theta_beta_t, self.phi_beta_0)
    }

    pub fn start(&self) -> RotationVectorPair {
        let v = self.initial.vector();
        RotationVectorPair::new(v, v)
    }

    pub fn end(&self) -> RotationVectorPair {
        RotationVectorPair::new(self.alpha_t(), self.beta_t())
    }

    pub fn ghz_residuals(&self) -> [f64; 4] {
        ghz_condition_residuals(&self.alpha_t(), &self.beta_t())
    }

    /// `cos phi_a - q1 cot theta_a`, `cos phi_b + q1 cot theta_b`,
    /// `cos^2 theta_a + cos^2 theta_b - 1/2`.
    pub fn spherical_residuals(&self) -> [f64; 3] {
        let q1 = self.signs.q1 as f64;
        let cot = |x: f64| x.cos() / x.sin();
        [
            self.phi_alpha_0.cos() - q1 * cot(self.theta_alpha_t),
            self.phi_beta_0.cos() + q1 * cot(self.theta_beta_t),
            self.theta_alpha_t.cos().powi(2) + self.theta_beta_t.cos().powi(2) - 0.5,
        ]
    }

    /// Boundary condition linking the two polar sweeps through the fixed azimuths.
    pub fn boundary_residual(&self) -> f64 {
        let t0 = self.initial.theta();
        (self.theta_beta_t - t0) * self.phi_beta_0.cos()
            - (self.theta_alpha_t - t0) * self.phi_alpha_0.cos()
    }

    fn all_residuals(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.ghz_residuals().to_vec();
        v.extend(self.spherical_residuals());
        v.push(self.boundary_residual());
        v
    }

    /// `theta_alpha(T) - theta_alpha(0)`
    pub fn theta_alpha_sweep(&self) -> f64 {
        self.theta_alpha_t - self.initial.theta()
    }

    /// `U(T) U(0)^dagger |W>`; the state any admissible curve delivers at `T`.
    pub fn target_state(&self) -> State4 {
        let g = build_generators();
        let u0 = exp_map(&self.start(), &g);
        let ut = exp_map(&self.end(), &g);
        ut * (u0.adjoint() * w_state())
    }

    fn reached_phase(&self) -> Result<f64> {
        let psi = self.target_state();
        let weight = psi[0].norm_sqr() + psi[3].norm_sqr();
        let balance = psi[0].norm_sqr() - psi[3].norm_sqr();
        if (weight - 1.0).abs() > ENDPOINT_TOL || balance.abs() > ENDPOINT_TOL {
            return Err(Error::NoSolution {
                reason: format!(
                    "endpoint does not produce a GHZ state (weight {weight}, imbalance {balance})"
                ),
                residuals: vec![weight - 1.0, balance],
            });
        }
        Ok(wrap_angle(psi[3].arg() - psi[0].arg()))
    }
}

/// All roots for one sign triple, ascending in `alpha_3(T)`.
fn endpoints_for(signs: Signs, opts: &SolveOptions) -> Vec<Result<EndpointSolution>> {
    let theta0 = opts.initial.theta();
    let edge = FRAC_1_SQRT_2;
    let roots = scan_roots(
        |u| boundary_residual_at(u, signs, theta0),
        -edge,
        edge,
        opts.scan_points,
        opts.xtol,
    );
    roots
        .into_iter()
        .enumerate()
        .map(|(branch, u)| {
            let (a, b) = family(u, signs);
            let (ta, pa) = polar_angles(&a);
            let (tb, pb) = polar_angles(&b);
            let mut sol = EndpointSolution::from_angles(ta, tb, pa, pb, signs, opts.initial)?;
            sol.branch = branch;
            Ok(sol)
        })
        .collect()
}

/// Solves the endpoint relations for one sign triple.
///
/// The GHZ conditions leave a one-parameter family in `alpha_3(T)`; the
/// boundary condition of the fixed-azimuth curves pins it, and the root is
/// located by a bracketed scan.
pub fn solve_endpoints(signs: Signs, opts: &SolveOptions) -> Result<EndpointSolution> {
    let mut all = endpoints_for(signs, opts);
    let count = all.len();
    if opts.branch >= count {
        return Err(Error::NoSolution {
            reason: format!(
                "sign triple ({}, {}, {}) has {count} admissible root(s), branch {} requested",
                signs.q1, signs.q2, signs.q3, opts.branch
            ),
            residuals: vec![],
        });
    }
    all.swap_remove(opts.branch)
}

/// Every admissible endpoint over the eight sign triples, in [`SIGN_ORDER`].
pub fn enumerate_endpoints(opts: &SolveOptions) -> Vec<EndpointSolution> {
    SIGN_ORDER
        .iter()
        .flat_map(|s| endpoints_for(*s, opts))
        .filter_map(|r| r.ok())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    Trapezoid,
}

/// Time dependence of `theta_alpha'(t)`.
///
/// The trapezoid ramps linearly over `tau T`, holds, and ramps down over the
/// last `tau T`; the constant profile is the `tau = 0` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseProfile {
    pub kind: ProfileKind,
    pub tau: f64,
    pub duration: f64,
    /// Net change `theta_alpha(T) - theta_alpha(0)`.
    pub sweep: f64,
}

impl PulseProfile {
    pub fn constant(duration: f64, sweep: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant, 0.0, duration, sweep)
    }

    pub fn trapezoid(duration: f64, sweep: f64, tau: f64) -> Result<Self> {
        Self::new(ProfileKind::Trapezoid, tau, duration, sweep)
    }

    pub fn new(kind: ProfileKind, tau: f64, duration: f64, sweep: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {duration}"
            )));
        }
        if !sweep.is_finite() {
            return Err(Error::InvalidParameter("sweep must be finite".into()));
        }
        let tau = match kind {
            ProfileKind::Constant => 0.0,
            ProfileKind::Trapezoid => {
                if !(0.0..0.5).contains(&tau) {
                    return Err(Error::InvalidParameter(format!(
                        "tau must lie in [0, 1/2), got {tau}"
                    )));
                }
                tau
            }
        };
        Ok(Self {
            kind,
            tau,
            duration,
            sweep,
        })
    }

    /// Plateau value of `theta_alpha'`.
    pub fn peak_rate(&self) -> f64 {
        self.sweep / (self.duration * (1.0 - self.tau))
    }

    fn ramp(&self) -> f64 {
        self.tau * self.duration
    }

    pub fn theta_dot(&self, t: f64) -> f64 {
        let (t_end, ramp, peak) = (self.duration, self.ramp(), self.peak_rate());
        if !(0.0..=t_end).contains(&t) {
            return 0.0;
        }
        if ramp == 0.0 {
            return peak;
        }
        if t < ramp {
            peak * t / ramp
        } else if t <= t_end - ramp {
            peak
        } else {
            peak * (t_end - t) / ramp
        }
    }

    /// `int_0^t theta_alpha'(s) ds`
    pub fn theta(&self, t: f64) -> f64 {
        let (t_end, ramp, peak) = (self.duration, self.ramp(), self.peak_rate());
        let t = t.clamp(0.0, t_end);
        if ramp == 0.0 {
            return peak * t;
        }
        if t < ramp {
            0.5 * peak * t * t / ramp
        } else if t <= t_end - ramp {
            peak * (t - 0.5 * ramp)
        } else {
            let rest = t_end - t;
            self.sweep - 0.5 * peak * rest * rest / ramp
        }
    }

    /// Breakpoints of the piecewise-linear rate.
    pub fn knots(&self) -> Vec<f64> {
        let ramp = self.ramp();
        if ramp == 0.0 {
            vec![0.0, self.duration]
        } else {
            vec![0.0, ramp, self.duration - ramp, self.duration]
        }
    }

    /// Trapezoid-rule quadrature of `theta_alpha'` over its knots (exact for
    /// this piecewise-linear rate).
    pub fn integrate(&self) -> f64 {
        self.knots()
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.theta_dot(w[0]) + self.theta_dot(w[1])))
            .sum()
    }
}

/// Fixed-azimuth curve on the two radius-pi spheres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCurve {
    pub endpoint: EndpointSolution,
    pub profile: PulseProfile,
    /// `cos phi_alpha / cos phi_beta`, equal to the ratio of the polar sweeps.
    pub ratio: f64,
}

impl SphericalCurve {
    pub fn duration(&self) -> f64 {
        self.profile.duration
    }

    pub fn phi_alpha(&self) -> f64 {
        self.endpoint.phi_alpha_0
    }

    pub fn phi_beta(&self) -> f64 {
        self.endpoint.phi_beta_0
    }

    pub fn theta_alpha(&self, t: f64) -> f64 {
        self.endpoint.initial.theta() + self.profile.theta(t)
    }

    pub fn theta_beta(&self, t: f64) -> f64 {
        self.endpoint.initial.theta() + self.ratio * self.profile.theta(t)
    }

    pub fn theta_alpha_dot(&self, t: f64) -> f64 {
        self.profile.theta_dot(t)
    }

    pub fn theta_beta_dot(&self, t: f64) -> f64 {
        self.ratio * self.profile.theta_dot(t)
    }

    /// Cartesian position and analytic velocity at `t`.
    pub fn sample(&self, t: f64) -> CurveSample {
        let point = |theta: f64, phi: f64, rate: f64| {
            let pos = spherical(theta, phi);
            let vel = Vec3::new(
                theta.cos() * phi.cos(),
                theta.cos() * phi.sin(),
                -theta.sin(),
            ) * (PI * rate);
            (pos, vel)
        };
        let (alpha, alpha_dot) = point(
            self.theta_alpha(t),
            self.phi_alpha(),
            self.theta_alpha_dot(t),
        );
        let (beta, beta_dot) = point(self.theta_beta(t), self.phi_beta(), self.theta_beta_dot(t));
        CurveSample {
            t,
            alpha,
            beta,
            alpha_dot,
            beta_dot,
        }
    }

    /// Rabi frequencies at `t` from the closed-form fixed-azimuth relations.
    pub fn rabi_at(&self, t: f64) -> RabiTriple {
        let rate = self.theta_alpha_dot(t);
        let (pa, pb) = (self.phi_alpha(), self.phi_beta());
        let tan_b = pb.tan();
        RabiTriple::new(
            -rate * (pa.sin() + pa.cos() * tan_b),
            2.0 * rate * pa.cos(),
            -rate * (pa.sin() - pa.cos() * tan_b),
        )
    }
}

/// Profile with the sweep the endpoint requires.
pub fn profile_for(
    endpoint: &EndpointSolution,
    kind: ProfileKind,
    tau: f64,
    duration: f64,
) -> Result<PulseProfile> {
    PulseProfile::new(kind, tau, duration, endpoint.theta_alpha_sweep())
}

pub fn build_curve(endpoint: &EndpointSolution, profile: &PulseProfile) -> Result<SphericalCurve> {
    let expected = endpoint.theta_alpha_sweep();
    let integral = profile.integrate();
    if (integral - expected).abs() > 1e-12 {
        return Err(Error::ProfileMismatch { integral, expected });
    }
    let t0 = endpoint.initial.theta();
    let ratio = (endpoint.theta_beta_t - t0) / expected;
    Ok(SphericalCurve {
        endpoint: *endpoint,
        profile: *profile,
        ratio,
    })
}

/// Samples the curve's Rabi frequencies on a uniform grid of `n_samples`
/// points spanning `[0, T]`.
pub fn rabi_schedule(curve: &SphericalCurve, n_samples: usize) -> Result<PulseSchedule> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    let cos_phi_beta = curve.phi_beta().cos();
    if cos_phi_beta.abs() < TAN_SINGULARITY {
        return Err(Error::TanSingularity {
            cos_phi_beta: cos_phi_beta.abs(),
        });
    }
    let t_end = curve.duration();
    let last = (n_samples - 1) as f64;
    let samples = (0..n_samples)
        .map(|k| {
            let t = if k == n_samples - 1 {
                t_end
            } else {
                t_end * k as f64 / last
            };
            ScheduleSample::new(t, curve.rabi_at(t))
        })
        .collect();
    let mut schedule = PulseSchedule::new(samples)?;
    let area = squared_area(&schedule);
    schedule.metadata = Some(ScheduleMetadata {
        endpoint: curve.endpoint,
        profile: curve.profile,
        area,
        reversed: false,
    });
    Ok(schedule)
}

/// Time-reversed schedule with every Rabi frequency negated; drives the
/// reached GHZ state back to `|W>`.
pub fn reverse_schedule(s: &PulseSchedule) -> PulseSchedule {
    let (t0, t1) = (s.start(), s.end());
    let samples = s
        .samples
        .iter()
        .rev()
        .map(|x| ScheduleSample {
            t: t1 - (x.t - t0),
            omega1: -x.omega1,
            omega2: -x.omega2,
            omega3: -x.omega3,
        })
        .collect();
    PulseSchedule {
        samples,
        metadata: s.metadata.clone().map(|m| ScheduleMetadata {
            reversed: !m.reversed,
            ..m
        }),
    }
}
