//! Closed-form exponential map `U(alpha, beta) = exp(-i alpha.S) exp(-i beta.T)`.

use crate::algebra::{pseudospin_basis, GeneratorSet};
use crate::linalg::{expm_hermitian, r, Mat4, State4, C64, I};
use nalgebra::Vector3;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Vec3 = Vector3<f64>;

/// Below this norm the half-angle ratios are evaluated by series.
pub const SMALL_ANGLE: f64 = 1e-6;

/// Two rotation vectors (radians) parametrizing an element of SU(2) x SU(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVectorPair {
    pub alpha: Vec3,
    pub beta: Vec3,
}

impl RotationVectorPair {
    pub fn new(alpha: Vec3, beta: Vec3) -> Self {
        Self { alpha, beta }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }
}

/// First row `(M_{++}, M_{+-})` of the SU(2) matrix `exp(-i v.sigma/2)` in the
/// pseudospin basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCoefficients {
    pub pp: C64,
    pub pm: C64,
}

impl MCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.pp.norm_sqr() + self.pm.norm_sqr()
    }
}

/// `sin(|v|/2) / |v|`, smooth through the origin.
pub(crate) fn half_sine_over_norm(n: f64) -> f64 {
    if n < SMALL_ANGLE {
        0.5 - n * n / 48.0
    } else {
        (0.5 * n).sin() / n
    }
}

pub fn m_coefficients(v: &Vec3) -> MCoefficients {
    let n = v.norm();
    let k = half_sine_over_norm(n);
    MCoefficients {
        pp: r((0.5 * n).cos()) - I * (v[2] * k),
        pm: C64::new(v[1], -v[0]) * k,
    }
}

/// `exp(-i v.X) = cos(|v|/2) - 2i (v.X) sin(|v|/2)/|v|` for a spin-1/2 family X.
fn half_angle_factor(x_dot_v: Mat4, n: f64) -> Mat4 {
    Mat4::identity() * r((0.5 * n).cos()) - x_dot_v * (I * (2.0 * half_sine_over_norm(n)))
}

/// Closed-form `exp(-i alpha.S) exp(-i beta.T)`; the S-factor is leftmost.
pub fn exp_map(pair: &RotationVectorPair, g: &GeneratorSet) -> Mat4 {
    let us = half_angle_factor(g.dot_s(&pair.alpha), pair.alpha.norm());
    let ut = half_angle_factor(g.dot_t(&pair.beta), pair.beta.norm());
    us * ut
}

/// Reference route: eigendecomposition of the Hermitian generators.
pub fn exp_map_reference(pair: &RotationVectorPair, g: &GeneratorSet) -> Mat4 {
    expm_hermitian(&g.dot_s(&pair.alpha), 1.0) * expm_hermitian(&g.dot_t(&pair.beta), 1.0)
}

/// Images of `(up-up, up-down, down-up, down-down)` under `U(alpha, beta)`,
/// assembled from the M coefficients alone.
pub fn transformed_pseudospin_states(pair: &RotationVectorPair) -> [State4; 4] {
    let a = m_coefficients(&pair.alpha);
    let b = m_coefficients(&pair.beta);
    let (ap, am, bp, bm) = (a.pp, a.pm, b.pp, b.pm);
    let (apc, amc, bpc, bmc) = (ap.conj(), am.conj(), bp.conj(), bm.conj());
    let h = r(FRAC_1_SQRT_2);
    let up_up = State4::new(
        -I * ap * bp - I * am * bm,
        -I * ap * bm - I * am * bp,
        ap * bp - am * bm,
        -ap * bm + am * bp,
    );
    let down_up = State4::new(
        -I * apc * bm + I * amc * bp,
        -I * apc * bp + I * amc * bm,
        -apc * bm - amc * bp,
        apc * bp + amc * bm,
    );
    let up_down = State4::new(
        I * ap * bmc - I * am * bpc,
        -I * ap * bpc + I * am * bmc,
        -ap * bmc - am * bpc,
        -ap * bpc - am * bmc,
    );
    let down_down = State4::new(
        -I * apc * bpc - I * amc * bmc,
        I * apc * bmc + I * amc * bpc,
        -apc * bpc + amc * bmc,
        -apc * bmc + amc * bpc,
    );
    [up_up * h, up_down * h, down_up * h, down_down * h]
}

/// `U(alpha, beta)` rebuilt column by column from the transformed pseudospin
/// states: `U = [images] B^dagger`.
pub fn exp_map_from_m_coefficients(pair: &RotationVectorPair, g: &GeneratorSet) -> Mat4 {
    let images = Mat4::from_columns(&transformed_pseudospin_states(pair));
    images * pseudospin_basis(g).matrix().adjoint()
}
