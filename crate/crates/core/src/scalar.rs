//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All model code is written against [`Real`], which is implemented for
//! `f32` and `f64`. The trait also carries the dense complex singular value
//! routines, so the linear-algebra backend stays an implementation detail.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::Array2;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

/// Singular triplets of a dense matrix, `A = U diag(s) V^H`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// Left singular vectors as columns.
    pub u: Array2<Complex<T>>,
    /// Singular values in descending order.
    pub s: Vec<T>,
    /// Right singular vectors as columns.
    pub v: Array2<Complex<T>>,
}

/// Floating-point scalar usable throughout the crate (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Singular values of a dense complex matrix, sorted descending.
    fn singular_values(matrix: &Array2<Complex<Self>>) -> Result<Vec<Self>>;

    /// Thin singular value decomposition of a dense complex matrix.
    fn thin_svd(matrix: &Array2<Complex<Self>>) -> Result<Svd<Self>>;
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal is representable in every Real type")
}

/// Converts an index or count into the working scalar type.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize is representable in every Real type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn singular_values(matrix: &Array2<Complex<$t>>) -> Result<Vec<$t>> {
                let (rows, cols) = matrix.dim();
                let mat = faer::Mat::<Complex<$t>>::from_fn(rows, cols, |i, j| matrix[[i, j]]);
                let mut s = mat
                    .singular_values()
                    .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
                s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                Ok(s)
            }

            fn thin_svd(matrix: &Array2<Complex<$t>>) -> Result<Svd<$t>> {
                let (rows, cols) = matrix.dim();
                let mat = faer::Mat::<Complex<$t>>::from_fn(rows, cols, |i, j| matrix[[i, j]]);
                let svd = mat
                    .thin_svd()
                    .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
                let rank = rows.min(cols);
                let s_diag = svd.S().column_vector();
                let mut order: Vec<usize> = (0..rank).collect();
                order.sort_by(|&a, &b| {
                    s_diag[b]
                        .re
                        .partial_cmp(&s_diag[a].re)
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
                let u_ref = svd.U();
                let v_ref = svd.V();
                let u = Array2::from_shape_fn((rows, rank), |(i, n)| u_ref[(i, order[n])]);
                let v = Array2::from_shape_fn((cols, rank), |(k, n)| v_ref[(k, order[n])]);
                let s = order.iter().map(|&n| s_diag[n].re).collect();
                Ok(Svd { u, s, v })
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
