//! Small dense complex linear algebra shared by every module.

use nalgebra::allocator::Allocator;
use nalgebra::{
    Complex, DefaultAllocator, Dim, DimDiff, DimSub, Matrix4, OMatrix, SMatrix, SVector, Vector4,
    U1,
};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat4 = Matrix4<C64>;
pub type Mat8 = SMatrix<C64, 8, 8>;
pub type State4 = Vector4<C64>;
pub type State8 = SVector<C64, 8>;

pub const I: C64 = Complex { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

/// `exp(-i h dt)` for a Hermitian `h`, computed from its eigendecomposition.
///
/// The result is unitary to rounding for any real `dt`.
pub fn expm_hermitian<D>(h: &OMatrix<C64, D, D>, dt: f64) -> OMatrix<C64, D, D>
where
    D: DimSub<U1>,
    DefaultAllocator: Allocator<D, D> + Allocator<D> + Allocator<DimDiff<D, U1>>,
{
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::from_polar(1.0, -lambda * dt));
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

pub fn commutator<D: Dim>(a: &OMatrix<C64, D, D>, b: &OMatrix<C64, D, D>) -> OMatrix<C64, D, D>
where
    DefaultAllocator: Allocator<D, D>,
{
    a * b - b * a
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<D: Dim>(a: &OMatrix<C64, D, D>, b: &OMatrix<C64, D, D>) -> f64
where
    DefaultAllocator: Allocator<D, D>,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error<D: Dim>(a: &OMatrix<C64, D, D>) -> f64
where
    DefaultAllocator: Allocator<D, D>,
{
    max_abs_diff(a, &a.adjoint())
}

/// `max |(U^dagger U - 1)_ij|`.
pub fn unitarity_error<D: Dim>(u: &OMatrix<C64, D, D>) -> f64
where
    DefaultAllocator: Allocator<D, D>,
{
    let (rows, cols) = u.shape_generic();
    let id = OMatrix::<C64, D, D>::identity_generic(rows, cols);
    max_abs_diff(&(u.adjoint() * u), &id)
}
