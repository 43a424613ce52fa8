//! Invariant suite behind `ghz-forge check`.

use crate::algebra::{build_generators, casimirs, pseudospin_basis};
use crate::dynamics::{check_constraints, vectorial_rabi};
use crate::linalg::max_abs_diff;
use crate::synthesis::{
    build_curve, enumerate_endpoints, profile_for, EndpointSolution, ProfileKind, SolveOptions,
};
use crate::unitary::{exp_map, exp_map_reference, RotationVectorPair, Vec3};
use serde::Serialize;

pub const EXACT_TOL: f64 = 1e-14;
pub const ORACLE_TOL: f64 = 1e-10;
pub const CONSTRAINT_TOL: f64 = 1e-9;
pub const CONDITION_TOL: f64 = 1e-9;
pub const SPHERICAL_TOL: f64 = 1e-10;

/// Published endpoint table: `theta_a(T), theta_b(T), phi_a(0), phi_b(0)` and
/// signs `(q1, q2, q3)`.
pub const REFERENCE_TABLE: [([f64; 4], [i8; 3]); 8] = [
    ([1.92423, 0.906373, 4.33454, 2.47062], [1, -1, 1]),
    ([1.92423, 0.906373, 1.94864, 3.81256], [1, 1, 1]),
    ([1.92423, 0.906373, 1.19295, 5.61221], [-1, 1, 1]),
    ([1.92423, 0.906373, 5.09024, 0.670972], [-1, -1, 1]),
    ([0.906373, 1.92423, 2.47062, 4.33454], [-1, 1, -1]),
    ([0.906373, 1.92423, 3.81256, 1.94864], [-1, -1, -1]),
    ([0.906373, 1.92423, 5.61221, 1.19295], [1, -1, -1]),
    ([0.906373, 1.92423, 0.670972, 5.09024], [1, 1, -1]),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tol: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, worst: f64, tol: f64, detail: String) -> Self {
        Self {
            name,
            passed: worst <= tol,
            worst,
            tol,
            detail,
        }
    }
}

/// Half a unit in the fifth significant digit of `x`.
pub fn five_figure_tolerance(x: f64) -> f64 {
    0.5 * 10f64.powi(x.abs().log10().floor() as i32 - 4)
}

/// Deterministic low-discrepancy rotation-vector pairs with norms up to `2 pi`.
pub fn sample_pairs(n: usize) -> Vec<RotationVectorPair> {
    const GOLDEN: [f64; 6] = [
        0.618_033_988,
        0.754_877_666,
        0.569_840_291,
        0.819_172_513,
        0.671_043_606,
        0.535_491_656,
    ];
    let u = |k: usize, j: usize| ((k as f64 + 1.0) * GOLDEN[j]).fract() * 2.0 - 1.0;
    (0..n)
        .map(|k| {
            let a = Vec3::new(u(k, 0), u(k, 1), u(k, 2)) * std::f64::consts::PI * 1.15;
            let b = Vec3::new(u(k, 3), u(k, 4), u(k, 5)) * std::f64::consts::PI * 1.15;
            RotationVectorPair::new(a, b)
        })
        .collect()
}

pub fn check_brackets() -> CheckOutcome {
    let worst = build_generators().bracket_residual();
    CheckOutcome::new(
        "commutation brackets",
        worst,
        EXACT_TOL,
        "15 generator pairs".into(),
    )
}

pub fn check_casimirs() -> CheckOutcome {
    match casimirs(&build_generators()) {
        Ok((i, j)) => CheckOutcome::new(
            "Casimir values",
            (i - 1.5).abs().max(j.abs()),
            EXACT_TOL,
            format!("I = {i}, J = {j}"),
        ),
        Err(e) => CheckOutcome::new("Casimir values", f64::INFINITY, EXACT_TOL, e.to_string()),
    }
}

pub fn check_products() -> CheckOutcome {
    let worst = build_generators().pauli_product_residual();
    CheckOutcome::new(
        "Pauli product identities",
        worst,
        EXACT_TOL,
        "both families".into(),
    )
}

pub fn check_basis() -> CheckOutcome {
    let worst = pseudospin_basis(&build_generators()).gram_error();
    CheckOutcome::new(
        "pseudospin basis orthonormality",
        worst,
        EXACT_TOL,
        "Gram matrix".into(),
    )
}

pub fn check_exp_map(n: usize) -> CheckOutcome {
    let g = build_generators();
    let worst = sample_pairs(n)
        .iter()
        .map(|p| max_abs_diff(&exp_map(p, &g), &exp_map_reference(p, &g)))
        .fold(0.0, f64::max);
    CheckOutcome::new(
        "closed-form exponential vs eigendecomposition",
        worst,
        ORACLE_TOL,
        format!("{n} rotation-vector pairs"),
    )
}

/// Constraint residuals on `samples` points of each endpoint's constant and
/// trapezoid curves.
pub fn check_curve_constraints(endpoints: &[EndpointSolution], samples: usize) -> CheckOutcome {
    let mut worst = 0.0_f64;
    let mut curves = 0;
    for ep in endpoints {
        for (kind, tau) in [
            (ProfileKind::Constant, 0.0),
            (ProfileKind::Trapezoid, 1.0 / 3.0),
        ] {
            let curve = match profile_for(ep, kind, tau, 1.0).and_then(|p| build_curve(ep, &p)) {
                Ok(c) => c,
                Err(e) => {
                    return CheckOutcome::new(
                        "curve constraints",
                        f64::INFINITY,
                        CONSTRAINT_TOL,
                        e.to_string(),
                    )
                }
            };
            curves += 1;
            for k in 0..samples {
                let t = k as f64 / (samples - 1) as f64;
                let report = check_constraints(&vectorial_rabi(&curve.sample(t)), CONSTRAINT_TOL);
                worst = report.residuals.iter().fold(worst, |m, x| m.max(x.abs()));
            }
        }
    }
    CheckOutcome::new(
        "curve constraints",
        worst,
        CONSTRAINT_TOL,
        format!("{curves} curves x {samples} samples"),
    )
}

pub fn check_endpoint_conditions(endpoints: &[EndpointSolution]) -> Vec<CheckOutcome> {
    let ghz = endpoints
        .iter()
        .flat_map(|e| e.ghz_residuals())
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let sph = endpoints
        .iter()
        .map(|e| e.spherical_residuals()[2].abs())
        .fold(0.0_f64, f64::max);
    vec![
        CheckOutcome::new(
            "GHZ endpoint conditions",
            ghz,
            CONDITION_TOL,
            format!("{} endpoints", endpoints.len()),
        ),
        CheckOutcome::new(
            "polar-angle relation",
            sph,
            SPHERICAL_TOL,
            format!("{} endpoints", endpoints.len()),
        ),
    ]
}

/// Largest deviation from the reference table, in units of its five-figure
/// tolerance; passes at `<= 1`.
pub fn check_reference_table(endpoints: &[EndpointSolution]) -> CheckOutcome {
    if endpoints.len() != REFERENCE_TABLE.len() {
        return CheckOutcome::new(
            "endpoint table",
            f64::INFINITY,
            1.0,
            format!(
                "{} endpoints, expected {}",
                endpoints.len(),
                REFERENCE_TABLE.len()
            ),
        );
    }
    let mut worst = 0.0_f64;
    for (ep, (angles, signs)) in endpoints.iter().zip(REFERENCE_TABLE.iter()) {
        if [ep.signs.q1, ep.signs.q2, ep.signs.q3] != *signs {
            return CheckOutcome::new(
                "endpoint table",
                f64::INFINITY,
                1.0,
                "sign order differs".into(),
            );
        }
        let got = [
            ep.theta_alpha_t,
            ep.theta_beta_t,
            ep.phi_alpha_0,
            ep.phi_beta_0,
        ];
        for (g, want) in got.iter().zip(angles.iter()) {
            worst = worst.max((g - want).abs() / five_figure_tolerance(*want));
        }
    }
    CheckOutcome::new(
        "endpoint table",
        worst,
        1.0,
        "8 rows, 5 significant figures".into(),
    )
}

/// Every check, in a fixed order.
pub fn run_all() -> Vec<CheckOutcome> {
    let endpoints = enumerate_endpoints(&SolveOptions::default());
    let mut out = vec![
        check_brackets(),
        check_casimirs(),
        check_products(),
        check_basis(),
        check_exp_map(256),
        check_curve_constraints(&endpoints, 1000),
    ];
    out.extend(check_endpoint_conditions(&endpoints));
    out.push(check_reference_table(&endpoints));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in run_all() {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn five_figures() {
        assert!((five_figure_tolerance(1.92423) - 5e-5).abs() < 1e-18);
        assert!((five_figure_tolerance(0.906373) - 5e-6).abs() < 1e-18);
    }

    #[test]
    fn table_check_detects_drift() {
        let mut eps = enumerate_endpoints(&SolveOptions::default());
        eps[3].phi_beta_0 += 1e-4;
        assert!(!check_reference_table(&eps).passed);
    }
}
