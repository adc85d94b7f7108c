//! Periodic multilevel transforms on n-D tensors.
//!
//! [`fast`] runs the lifting-style prime coset sum algorithm and counts its
//! multiplications; [`direct`] filters and resamples with the materialized
//! bank and serves as the oracle. Both use the same subband layout.

pub mod count;
pub mod direct;
pub mod fast;
pub mod io;

use std::fmt::Debug;

use num_traits::Zero;

use crate::arith::Rational;
use crate::error::{Error, Result};

pub use count::{count_ops, OpCount};
pub use direct::{decompose_direct, reconstruct_direct};
pub use fast::{decompose_fast, decompose_fast_counted, reconstruct_fast, reconstruct_fast_counted, FastPlan};

/// Field operations the transforms need. Rationals give exact results,
/// `f64` is the bulk mode; both run through the same code.
pub trait Scalar: Clone + Send + Sync + PartialEq + Debug + 'static {
    fn zero() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        crate::arith::to_f64(r)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn to_f64(&self) -> f64 {
        crate::arith::to_f64(self)
    }
}

/// Dense row-major tensor with periodic indexing.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<T>,
}

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::ShapeMismatch(format!("invalid shape {shape:?}")));
        }
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor {
            strides: strides_of(&shape),
            shape,
            data,
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Tensor::new(shape, vec![T::zero(); len]).expect("valid shape")
    }

    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let len: usize = shape.iter().product();
        let strides = strides_of(&shape);
        let data = (0..len)
            .map(|i| {
                let c: Vec<usize> = shape.iter().zip(&strides).map(|(&s, &st)| (i / st) % s).collect();
                f(&c)
            })
            .collect();
        Tensor { shape, strides, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    /// Linear offset of `coords` reduced modulo the shape.
    pub fn wrap(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.shape)
            .zip(&self.strides)
            .map(|((&c, &s), &st)| c.rem_euclid(s as i64) as usize * st)
            .sum()
    }

    pub fn get(&self, coords: &[i64]) -> &T {
        &self.data[self.wrap(coords)]
    }

    pub fn set(&mut self, coords: &[i64], v: T) {
        let i = self.wrap(coords);
        self.data[i] = v;
    }

    /// Coordinates of a linear offset.
    pub fn coords_of(&self, mut i: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.shape.len()];
        for (axis, st) in self.strides.iter().enumerate() {
            c[axis] = (i / st) as i64;
            i %= st;
        }
        c
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Tensor<T>) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max)
    }
}

/// Coarse tensor `y_0` and detail tensors `w_{ν,j}`.
///
/// `details[j][i]` holds level `j ∈ 0..J` for the `i`-th element of Γ′, with
/// shape `input / p^{J−j}`; the coarse tensor has shape `input / p^J`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiresCoeffs<T> {
    pub p: i64,
    pub levels: usize,
    pub input_shape: Vec<usize>,
    pub coarse: Tensor<T>,
    pub details: Vec<Vec<Tensor<T>>>,
}

impl<T: Scalar> MultiresCoeffs<T> {
    /// Checks the shapes against the layout invariant.
    pub fn validate(&self, q: usize) -> Result<()> {
        let shape_at = |j: usize| -> Vec<usize> {
            self.input_shape
                .iter()
                .map(|&s| s / (self.p as usize).pow((self.levels - j) as u32))
                .collect()
        };
        if self.details.len() != self.levels {
            return Err(Error::ShapeMismatch(format!(
                "{} detail levels for a {}-level transform",
                self.details.len(),
                self.levels
            )));
        }
        if self.coarse.shape() != shape_at(0).as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "coarse shape {:?}, expected {:?}",
                self.coarse.shape(),
                shape_at(0)
            )));
        }
        for (j, level) in self.details.iter().enumerate() {
            if level.len() != q - 1 {
                return Err(Error::ShapeMismatch(format!(
                    "level {j} has {} subbands, expected {}",
                    level.len(),
                    q - 1
                )));
            }
            let want = shape_at(j);
            for (i, t) in level.iter().enumerate() {
                if t.shape() != want.as_slice() {
                    return Err(Error::ShapeMismatch(format!(
                        "subband ({j}, {}) has shape {:?}, expected {want:?}",
                        i + 1,
                        t.shape()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> MultiresCoeffs<U> {
        let conv =
            |t: &Tensor<T>| Tensor::new(t.shape().to_vec(), t.data().iter().map(f).collect()).expect("same shape");
        MultiresCoeffs {
            p: self.p,
            levels: self.levels,
            input_shape: self.input_shape.clone(),
            coarse: conv(&self.coarse),
            details: self.details.iter().map(|l| l.iter().map(conv).collect()).collect(),
        }
    }
}

/// Every axis must be divisible by `p^J`.
pub fn check_shape(shape: &[usize], n: usize, p: i64, levels: usize) -> Result<()> {
    if shape.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "tensor has {} axes, bank is {n}-D",
            shape.len()
        )));
    }
    let divisor = (p as usize).pow(levels as u32);
    for (axis, &len) in shape.iter().enumerate() {
        if len == 0 || len % divisor != 0 {
            return Err(Error::ShapeNotDivisible { axis, len, divisor });
        }
    }
    Ok(())
}
