//! From parameter curves to Hamiltonians, and from Hamiltonians to the three
//! laser Rabi frequencies.

use crate::algebra::GeneratorSet;
use crate::error::{Error, Result};
use crate::linalg::{r, Mat4};
use crate::unitary::{half_sine_over_norm, Vec3, SMALL_ANGLE};
use serde::{Deserialize, Serialize};

/// Default tolerance on the anholonomic constraint residuals.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// A point on a curve `t -> (alpha(t), beta(t))` together with its velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub alpha: Vec3,
    pub beta: Vec3,
    pub alpha_dot: Vec3,
    pub beta_dot: Vec3,
}

/// Real Rabi frequencies of the three ladder transitions
/// `ggg <-> W`, `W <-> W'`, `W' <-> rrr`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RabiTriple {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl RabiTriple {
    pub fn new(omega1: f64, omega2: f64, omega3: f64) -> Self {
        Self {
            omega1,
            omega2,
            omega3,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.omega1, self.omega2, self.omega3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Vectorial frequencies that reproduce this triple with all constraints
    /// satisfied exactly.
    pub fn to_vectorial(&self) -> VectorialRabi {
        VectorialRabi {
            w_alpha: Vec3::new(self.omega1 + self.omega3, self.omega2, 0.0),
            w_beta: Vec3::new(self.omega1 - self.omega3, self.omega2, 0.0),
        }
    }
}

/// Angular-velocity vectors of the two pseudospins: `H = w_alpha.S + w_beta.T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorialRabi {
    pub w_alpha: Vec3,
    pub w_beta: Vec3,
}

/// `Omega1 (S1 + T1) + Omega2 (S2 + T2) + Omega3 (S1 - T1)`
pub fn effective_hamiltonian(rabi: &RabiTriple, g: &GeneratorSet) -> Mat4 {
    (g.s[0] + g.t[0]) * r(rabi.omega1)
        + (g.s[1] + g.t[1]) * r(rabi.omega2)
        + (g.s[0] - g.t[0]) * r(rabi.omega3)
}

/// The same Hamiltonian written directly as a tridiagonal ladder in the
/// physical basis.
pub fn ladder_hamiltonian(rabi: &RabiTriple) -> Mat4 {
    let mut h = Mat4::zeros();
    for (k, w) in rabi.as_array().into_iter().enumerate() {
        h[(k, k + 1)] = r(w);
        h[(k + 1, k)] = r(w);
    }
    h
}

/// Angular velocity `omega[v]` of the curve `exp(-i v(t).sigma/2)`:
///
/// `sin|v|/|v| v' + 2 sin^2(|v|/2)/|v|^2 (v x v') + (|v| - sin|v|)/|v|^3 (v.v') v`
pub fn angular_velocity(v: &Vec3, v_dot: &Vec3) -> Vec3 {
    let n = v.norm();
    let n2 = n * n;
    let sinc = if n < SMALL_ANGLE {
        1.0 - n2 / 6.0
    } else {
        n.sin() / n
    };
    let half = half_sine_over_norm(n);
    let cross_coeff = 2.0 * half * half;
    // (n - sin n)/n^3 cancels badly well above SMALL_ANGLE
    let radial_coeff = if n < 1e-3 {
        1.0 / 6.0 - n2 / 120.0 + n2 * n2 / 5040.0
    } else {
        (n - n.sin()) / (n2 * n)
    };
    v_dot * sinc + v.cross(v_dot) * cross_coeff + v * (radial_coeff * v.dot(v_dot))
}

pub fn vectorial_rabi(s: &CurveSample) -> VectorialRabi {
    VectorialRabi {
        w_alpha: angular_velocity(&s.alpha, &s.alpha_dot),
        w_beta: angular_velocity(&s.beta, &s.beta_dot),
    }
}

/// `w_alpha.S + w_beta.T`
pub fn curve_hamiltonian(v: &VectorialRabi, g: &GeneratorSet) -> Mat4 {
    g.dot_s(&v.w_alpha) + g.dot_t(&v.w_beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintReport {
    /// `(w3[alpha], w3[beta], w2[alpha] - w2[beta])`
    pub residuals: [f64; 3],
    pub passed: bool,
}

/// The effective Hamiltonian has no `S3`, `T3` or `S2 - T2` component.
pub fn check_constraints(v: &VectorialRabi, tol: f64) -> ConstraintReport {
    let residuals = [v.w_alpha[2], v.w_beta[2], v.w_alpha[1] - v.w_beta[1]];
    ConstraintReport {
        residuals,
        passed: residuals.iter().all(|x| x.abs() <= tol),
    }
}

pub fn rabi_from_vectorial(v: &VectorialRabi) -> Result<RabiTriple> {
    let report = check_constraints(v, CONSTRAINT_TOL);
    if !report.passed {
        return Err(Error::ConstraintViolation {
            residuals: report.residuals,
            tol: CONSTRAINT_TOL,
        });
    }
    Ok(RabiTriple {
        omega1: 0.5 * (v.w_alpha[0] + v.w_beta[0]),
        omega2: 0.5 * (v.w_alpha[1] + v.w_beta[1]),
        omega3: 0.5 * (v.w_alpha[0] - v.w_beta[0]),
    })
}
