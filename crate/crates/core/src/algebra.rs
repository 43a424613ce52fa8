//! Four-dimensional representation of su(2) + su(2) acting on the symmetric
//! three-atom manifold.
//!
//! Physical basis order is `(|ggg>, |W>, |W'>, |rrr>)`; pseudospin order is
//! `(up-up, up-down, down-up, down-down)`. Both orders are used by every
//! serialized quantity in the crate.

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs_diff, r, Mat4, State4, C64, I};
use nalgebra::Vector3;
use std::f64::consts::FRAC_1_SQRT_2;

/// The six Hermitian generators `S_1..S_3` and `T_1..T_3`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub s: [Mat4; 3],
    pub t: [Mat4; 3],
}

fn mat(rows: [[C64; 4]; 4]) -> Mat4 {
    Mat4::from_fn(|i, j| rows[i][j] * 0.5)
}

/// Builds the generator matrices. All entries lie in `{0, ±1/2, ±i/2}`.
pub fn build_generators() -> GeneratorSet {
    let o = r(0.0);
    let p = r(1.0);
    let m = r(-1.0);
    let pi = c(0.0, 1.0);
    let mi = c(0.0, -1.0);
    let s1 = mat([[o, p, o, o], [p, o, o, o], [o, o, o, p], [o, o, p, o]]);
    let s2 = mat([[o, o, o, m], [o, o, p, o], [o, p, o, o], [m, o, o, o]]);
    let s3 = mat([[o, o, mi, o], [o, o, o, pi], [pi, o, o, o], [o, mi, o, o]]);
    let t1 = mat([[o, p, o, o], [p, o, o, o], [o, o, o, m], [o, o, m, o]]);
    let t2 = mat([[o, o, o, p], [o, o, p, o], [o, p, o, o], [p, o, o, o]]);
    let t3 = mat([[o, o, mi, o], [o, o, o, mi], [pi, o, o, o], [o, pi, o, o]]);
    GeneratorSet {
        s: [s1, s2, s3],
        t: [t1, t2, t3],
    }
}

impl GeneratorSet {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            s: self.s.map(|m| m * r(factor)),
            t: self.t.map(|m| m * r(factor)),
        }
    }

    /// Exchanges the roles of the two pseudospins.
    pub fn swapped(&self) -> Self {
        Self {
            s: self.t,
            t: self.s,
        }
    }

    /// `v . S`
    pub fn dot_s(&self, v: &Vector3<f64>) -> Mat4 {
        self.s[0] * r(v[0]) + self.s[1] * r(v[1]) + self.s[2] * r(v[2])
    }

    /// `v . T`
    pub fn dot_t(&self, v: &Vector3<f64>) -> Mat4 {
        self.t[0] * r(v[0]) + self.t[1] * r(v[1]) + self.t[2] * r(v[2])
    }

    /// Largest entrywise violation of `[S_i, S_j] = i eps_ijk S_k`,
    /// `[T_i, T_j] = i eps_ijk T_k` and `[S_i, T_j] = 0` over all 15 pairs.
    pub fn bracket_residual(&self) -> f64 {
        let all: Vec<(Mat4, Option<usize>)> = (0..3)
            .map(|i| (self.s[i], Some(i)))
            .chain((0..3).map(|i| (self.t[i], Some(i + 3))))
            .collect();
        let mut worst = 0.0_f64;
        for a in 0..6 {
            for b in (a + 1)..6 {
                let lhs = all[a].0 * all[b].0 - all[b].0 * all[a].0;
                let rhs = expected_bracket(self, a, b);
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
        worst
    }

    /// Largest entrywise violation of `(2X_l)(2X_k) = i eps_lkm (2X_m) + delta_lk`
    /// for both families.
    pub fn pauli_product_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for family in [&self.s, &self.t] {
            for l in 0..3 {
                for k in 0..3 {
                    let lhs = (family[l] * r(2.0)) * (family[k] * r(2.0));
                    let mut rhs = if l == k {
                        Mat4::identity()
                    } else {
                        Mat4::zeros()
                    };
                    for (m, x) in family.iter().enumerate() {
                        let e = levi_civita(l, k, m);
                        if e != 0.0 {
                            rhs += x * (I * 2.0 * e);
                        }
                    }
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        worst
    }
}

fn expected_bracket(g: &GeneratorSet, a: usize, b: usize) -> Mat4 {
    // indices 0..3 are S, 3..6 are T; mixed pairs commute
    if (a < 3) != (b < 3) {
        return Mat4::zeros();
    }
    let family = if a < 3 { &g.s } else { &g.t };
    let (i, j) = (a % 3, b % 3);
    let mut out = Mat4::zeros();
    for (k, x) in family.iter().enumerate() {
        let e = levi_civita(i, j, k);
        if e != 0.0 {
            out += x * (I * e);
        }
    }
    out
}

pub(crate) fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Returns `(I, J)` with `I 1 = sum(S_i^2 + T_i^2)` and `J 1 = sum(S_i^2 - T_i^2)`.
pub fn casimirs(g: &GeneratorSet) -> Result<(f64, f64)> {
    let ss: Mat4 = g.s.iter().map(|m| m * m).sum();
    let tt: Mat4 = g.t.iter().map(|m| m * m).sum();
    Ok((scalar_part(&(ss + tt))?, scalar_part(&(ss - tt))?))
}

fn scalar_part(m: &Mat4) -> Result<f64> {
    let lambda = m.trace().re / 4.0;
    let deviation = max_abs_diff(m, &(Mat4::identity() * r(lambda)));
    if deviation > 1e-12 {
        return Err(Error::NotScalarMultiple { deviation });
    }
    Ok(lambda)
}

/// Orthonormal eigenbasis of the two pseudospins, in the order
/// `(up-up, up-down, down-up, down-down)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudospinBasis {
    pub vectors: [State4; 4],
}

impl PseudospinBasis {
    pub fn up_up(&self) -> &State4 {
        &self.vectors[0]
    }
    pub fn up_down(&self) -> &State4 {
        &self.vectors[1]
    }
    pub fn down_up(&self) -> &State4 {
        &self.vectors[2]
    }
    pub fn down_down(&self) -> &State4 {
        &self.vectors[3]
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self) -> Mat4 {
        Mat4::from_columns(&self.vectors)
    }

    pub fn gram_error(&self) -> f64 {
        let m = self.matrix();
        max_abs_diff(&(m.adjoint() * m), &Mat4::identity())
    }
}

/// Starts from the highest-weight state of `S_3 + T_3` and applies the
/// lowering operators `S_1 - i S_2` and `T_1 - i T_2`.
pub fn pseudospin_basis(g: &GeneratorSet) -> PseudospinBasis {
    let h = FRAC_1_SQRT_2;
    let up_up = State4::new(c(0.0, -h), r(0.0), r(h), r(0.0));
    let lower_s = g.s[0] - g.s[1] * I;
    let lower_t = g.t[0] - g.t[1] * I;
    let normalize = |v: State4| {
        let n = v.norm();
        v / r(n)
    };
    let down_up = normalize(lower_s * up_up);
    let up_down = normalize(lower_t * up_up);
    let down_down = normalize(lower_s * up_down);
    PseudospinBasis {
        vectors: [up_up, up_down, down_up, down_down],
    }
}

/// Coefficients of `v` in the pseudospin basis.
pub fn expand_state(v: &[C64], basis: &PseudospinBasis) -> Result<[C64; 4]> {
    if v.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: v.len(),
        });
    }
    let v = State4::from_column_slice(v);
    Ok(basis.vectors.map(|b| b.dotc(&v)))
}

pub fn ggg() -> State4 {
    State4::new(r(1.0), r(0.0), r(0.0), r(0.0))
}

pub fn w_state() -> State4 {
    State4::new(r(0.0), r(1.0), r(0.0), r(0.0))
}

pub fn w_prime() -> State4 {
    State4::new(r(0.0), r(0.0), r(1.0), r(0.0))
}

pub fn rrr() -> State4 {
    State4::new(r(0.0), r(0.0), r(0.0), r(1.0))
}

/// `(|ggg> + e^{i phase} |rrr>) / sqrt 2`
pub fn ghz_state(phase: f64) -> State4 {
    State4::new(
        r(FRAC_1_SQRT_2),
        r(0.0),
        r(0.0),
        C64::from_polar(FRAC_1_SQRT_2, phase),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn s1_and_t1_entries() {
        let g = build_generators();
        let (s1, t1) = (g.s[0], g.t[0]);
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            assert!(close(s1[(i, j)], r(0.5)));
        }
        assert!(close(t1[(0, 1)], r(0.5)) && close(t1[(1, 0)], r(0.5)));
        assert!(close(t1[(2, 3)], r(-0.5)) && close(t1[(3, 2)], r(-0.5)));
        let nonzero = s1.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn generators_hermitian() {
        let g = build_generators();
        for m in g.s.iter().chain(g.t.iter()) {
            assert_eq!(crate::linalg::hermiticity_error(m), 0.0);
        }
    }

    #[test]
    fn brackets_and_products() {
        let g = build_generators();
        assert!(g.bracket_residual() <= 1e-14);
        assert!(g.pauli_product_residual() <= 1e-14);
    }

    #[test]
    fn casimir_values() {
        let g = build_generators();
        let (i, j) = casimirs(&g).unwrap();
        assert!((i - 1.5).abs() < 1e-13 && j.abs() < 1e-13);
        let (i, j) = casimirs(&g.swapped()).unwrap();
        assert!((i - 1.5).abs() < 1e-13 && j.abs() < 1e-13);
        let (i, j) = casimirs(&g.scaled(2.0)).unwrap();
        assert!((i - 6.0).abs() < 1e-12 && j.abs() < 1e-12);
    }

    #[test]
    fn casimir_rejects_non_scalar_sum() {
        let mut g = build_generators();
        g.s[2] = Mat4::from_diagonal(&State4::new(r(1.0), r(0.0), r(0.0), r(0.0)));
        assert!(matches!(casimirs(&g), Err(Error::NotScalarMultiple { .. })));
    }

    #[test]
    fn basis_matches_printed_vectors() {
        let h = FRAC_1_SQRT_2;
        let b = pseudospin_basis(&build_generators());
        let expected = [
            State4::new(c(0.0, -h), r(0.0), r(h), r(0.0)),
            State4::new(r(0.0), c(0.0, -h), r(0.0), r(-h)),
            State4::new(r(0.0), c(0.0, -h), r(0.0), r(h)),
            State4::new(c(0.0, -h), r(0.0), r(-h), r(0.0)),
        ];
        for (got, want) in b.vectors.iter().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-15, "{got} vs {want}");
        }
        assert!(b.gram_error() < 1e-14);
    }

    #[test]
    fn basis_vectors_are_weight_states() {
        let g = build_generators();
        let b = pseudospin_basis(&g);
        let weights = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];
        for (v, (ws, wt)) in b.vectors.iter().zip(weights) {
            assert!((g.s[2] * v - v * r(ws)).norm() < 1e-14);
            assert!((g.t[2] * v - v * r(wt)).norm() < 1e-14);
        }
        let up_up = b.up_up();
        assert!(((g.s[2] + g.t[2]) * up_up - up_up).norm() < 1e-14);
    }

    #[test]
    fn expansions() {
        let b = pseudospin_basis(&build_generators());
        let h = FRAC_1_SQRT_2;
        let coeffs = expand_state(b.up_up().as_slice(), &b).unwrap();
        assert!(close(coeffs[0], r(1.0)) && coeffs[1..].iter().all(|z| z.norm() < 1e-15));

        let coeffs = expand_state(ggg().as_slice(), &b).unwrap();
        let want = [c(0.0, h), r(0.0), r(0.0), c(0.0, h)];
        assert!(coeffs.iter().zip(want).all(|(a, b)| close(*a, b)));

        let coeffs = expand_state(w_state().as_slice(), &b).unwrap();
        let want = [r(0.0), c(0.0, h), c(0.0, h), r(0.0)];
        assert!(coeffs.iter().zip(want).all(|(a, b)| close(*a, b)));

        let phi = 0.7;
        let e = C64::from_polar(0.5, phi);
        let coeffs = expand_state(ghz_state(phi).as_slice(), &b).unwrap();
        let want = [c(0.0, 0.5), -e, e, c(0.0, 0.5)];
        assert!(coeffs.iter().zip(want).all(|(a, b)| close(*a, b)));
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expand_rejects_wrong_length() {
        let b = pseudospin_basis(&build_generators());
        let err = expand_state(&[r(1.0); 8], &b).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 4,
                got: 8
            }
        );
    }
}
