//! Uniform-grid numerical calculus.
//!
//! Every distribution in the crate is a [`GridFn`]: values tabulated on the
//! Cartesian product of uniform [`Axis`] samplings, stored row-major (the last
//! axis varies fastest). Derivatives use high-order finite-difference stencils,
//! inverse derivatives use cumulative piecewise-polynomial quadrature, and full
//! integrals use the trapezoid rule.

mod calculus;
pub mod io;
mod stencil;

pub use calculus::{
    derivative, derivative_with, integrate, integrate_all, interpolate, interpolate_cubic,
    inverse_derivative, inverse_derivative_with, Antiderivative, DEFAULT_ACCURACY, DECAY_TOL,
};
pub use stencil::{fornberg_weights, StencilTable};
pub(crate) use calculus::cubic_weights;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A uniform sampling `min + i·h`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidAxis(format!("non-finite bounds [{min}, {max}]")));
        }
        if max <= min {
            return Err(Error::InvalidAxis(format!("max {max} must exceed min {min}")));
        }
        if count < 3 {
            return Err(Error::InvalidAxis(format!("count {count} is below 3")));
        }
        Ok(Self { min, max, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.spacing();
        x >= self.min - slack && x <= self.max + slack
    }

    /// Cell index `i` and fraction `t ∈ [0, 1]` such that `x = point(i) + t·h`.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !self.contains(x) {
            return None;
        }
        let s = ((x - self.min) / self.spacing()).clamp(0.0, (self.count - 1) as f64);
        let i = (s.floor() as usize).min(self.count - 2);
        Some((i, s - i as f64))
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let s = ((x - self.min) / self.spacing()).round();
        s.clamp(0.0, (self.count - 1) as f64) as usize
    }

    /// Trapezoid weights (`h/2` at the ends, `h` inside).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.count];
        w[0] = 0.5 * h;
        w[self.count - 1] = 0.5 * h;
        w
    }

    /// Same axis with half the spacing over the same interval.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }
}

/// The axes used by the pipelines: quadrature `X`, symplectic `(μ, ν)`,
/// optical phase `θ` and phase space `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSet {
    pub x: Axis,
    pub mu: Axis,
    pub nu: Axis,
    pub theta: Axis,
    pub q: Axis,
    pub p: Axis,
}

impl Default for GridSet {
    fn default() -> Self {
        let x = Axis { min: -8.0, max: 8.0, count: 161 };
        let m = Axis { min: -4.5, max: 4.5, count: 97 };
        let theta = Axis { min: 0.0, max: std::f64::consts::PI, count: 181 };
        Self { x, mu: m, nu: m, theta, q: x, p: x }
    }
}

impl GridSet {
    /// Sets the axis called `name` (`x`, `mu`, `nu`, `theta`, `q`, `p`).
    pub fn set(&mut self, name: &str, axis: Axis) -> Result<()> {
        let slot = match name {
            "x" | "X" => &mut self.x,
            "mu" => &mut self.mu,
            "nu" => &mut self.nu,
            "theta" => &mut self.theta,
            "q" => &mut self.q,
            "p" => &mut self.p,
            other => return Err(Error::InvalidAxis(format!("unknown axis name `{other}`"))),
        };
        *slot = axis;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarKind {
    Real,
    Complex,
}

/// Field of grid values: `f64` or [`Complex64`].
pub trait Scalar:
    Copy
    + Default
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + Neg<Output = Self>
    + 'static
{
    const KIND: ScalarKind;
    fn from_real(x: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real;
    fn from_real(x: f64) -> Self {
        x
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex;
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A function tabulated on the product of its axes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn<T> {
    axes: Vec<Axis>,
    values: Vec<T>,
}

impl<T: Scalar> GridFn<T> {
    pub fn new(axes: Vec<Axis>, values: Vec<T>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.count).product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                expected
            )));
        }
        Ok(Self { axes, values })
    }

    pub fn zeros(axes: Vec<Axis>) -> Self {
        let n = axes.iter().map(|a| a.count).product();
        Self {
            axes,
            values: vec![T::default(); n],
        }
    }

    /// Tabulates `f` at every grid point; `f` receives the point's coordinates.
    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[f64]) -> T) -> Self {
        let n: usize = axes.iter().map(|a| a.count).product();
        let points: Vec<Vec<f64>> = axes.iter().map(Axis::points).collect();
        let mut idx = vec![0usize; axes.len()];
        let mut coords: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f(&coords));
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].count {
                    coords[d] = points[d][idx[d]];
                    break;
                }
                idx[d] = 0;
                coords[d] = points[d][0];
            }
        }
        Self { axes, values }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, index: usize) -> Result<&Axis> {
        self.axes.get(index).ok_or(Error::AxisOutOfRange {
            index,
            dims: self.axes.len(),
        })
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    /// Distance in the flat array between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.count).product()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.values[self.flat_index(idx)]
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for d in (0..self.axes.len()).rev() {
            idx[d] = flat % self.axes[d].count;
            flat /= self.axes[d].count;
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.point(i))
            .collect()
    }

    pub fn same_grid<U: Scalar>(&self, other: &GridFn<U>) -> bool {
        self.axes == other.axes
    }

    pub fn check_same_grid<U: Scalar>(&self, other: &GridFn<U>) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch("operands live on different grids".into()))
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> GridFn<U> {
        GridFn {
            axes: self.axes.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Like [`map`](Self::map) but also hands over the point's coordinates.
    pub fn map_with_coords<U: Scalar>(&self, mut f: impl FnMut(&[f64], T) -> U) -> GridFn<U> {
        let mut it = self.values.iter();
        GridFn::from_fn(self.axes.clone(), |c| f(c, *it.next().unwrap()))
    }

    pub fn zip_with<U: Scalar, V: Scalar>(
        &self,
        other: &GridFn<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<GridFn<V>> {
        self.check_same_grid(other)?;
        Ok(GridFn {
            axes: self.axes.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| x * a + y * b)
    }

    pub fn to_complex(&self) -> GridFn<Complex64> {
        self.map(Scalar::to_complex)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Applies `f(input_line, output_line)` to every 1-D line along `axis`.
    pub fn map_lines<U: Scalar>(
        &self,
        axis: usize,
        mut f: impl FnMut(&[T], &mut [U]),
    ) -> Result<GridFn<U>> {
        self.axis(axis)?;
        let n = self.axes[axis].count;
        let stride = self.stride(axis);
        let mut out = vec![U::default(); self.values.len()];
        let mut line_in = vec![T::default(); n];
        let mut line_out = vec![U::default(); n];
        let lines = self.values.len() / n;
        for l in 0..lines {
            let base = (l / stride) * n * stride + l % stride;
            for k in 0..n {
                line_in[k] = self.values[base + k * stride];
            }
            f(&line_in, &mut line_out);
            for k in 0..n {
                out[base + k * stride] = line_out[k];
            }
        }
        Ok(GridFn {
            axes: self.axes.clone(),
            values: out,
        })
    }

    /// Fixes `axis` at grid index `index`, dropping that axis.
    pub fn slice(&self, axis: usize, index: usize) -> Result<Self> {
        let ax = *self.axis(axis)?;
        if index >= ax.count {
            return Err(Error::ShapeMismatch(format!(
                "index {index} beyond axis of {} points",
                ax.count
            )));
        }
        let stride = self.stride(axis);
        let outer = self.values.len() / (ax.count * stride);
        let mut values = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            let base = o * ax.count * stride + index * stride;
            values.extend_from_slice(&self.values[base..base + stride]);
        }
        let mut axes = self.axes.clone();
        axes.remove(axis);
        Ok(Self { axes, values })
    }
}

impl GridFn<Complex64> {
    pub fn re(&self) -> GridFn<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> GridFn<f64> {
        self.map(|z| z.im)
    }
}

impl<T: Scalar> Add for &GridFn<T> {
    type Output = GridFn<T>;
    fn add(self, rhs: Self) -> GridFn<T> {
        self.zip_with(rhs, |a, b| a + b)
            .expect("adding grid functions on different grids")
    }
}

impl<T: Scalar> Sub for &GridFn<T> {
    type Output = GridFn<T>;
    fn sub(self, rhs: Self) -> GridFn<T> {
        self.zip_with(rhs, |a, b| a - b)
            .expect("subtracting grid functions on different grids")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_points_are_uniform() {
        let ax = Axis::new(-8.0, 8.0, 161).unwrap();
        assert!((ax.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(ax.point(0), -8.0);
        assert!((ax.point(160) - 8.0).abs() < 1e-12);
        assert_eq!(ax.nearest_index(0.0), 80);
    }

    #[test]
    fn axis_rejects_bad_bounds() {
        assert!(Axis::new(1.0, 1.0, 10).is_err());
        assert!(Axis::new(0.0, 1.0, 2).is_err());
        assert!(Axis::new(f64::NAN, 1.0, 5).is_err());
    }

    #[test]
    fn locate_brackets_the_point() {
        let ax = Axis::new(0.0, 1.0, 11).unwrap();
        let (i, t) = ax.locate(0.25).unwrap();
        assert_eq!(i, 2);
        assert!((t - 0.5).abs() < 1e-12);
        assert_eq!(ax.locate(1.0).unwrap().0, 9);
        assert!(ax.locate(1.5).is_none());
    }

    #[test]
    fn row_major_layout() {
        let a = Axis::new(0.0, 1.0, 3).unwrap();
        let b = Axis::new(0.0, 3.0, 4).unwrap();
        let f = GridFn::from_fn(vec![a, b], |c| 10.0 * c[0] + c[1]);
        assert_eq!(f.len(), 12);
        assert_eq!(f.get(&[1, 2]), 5.0 + 2.0);
        assert_eq!(f.stride(0), 4);
        assert_eq!(f.unravel(7), vec![1, 3]);
        let s = f.slice(0, 2).unwrap();
        assert_eq!(s.values(), &[10.0, 11.0, 12.0, 13.0]);
        let s = f.slice(1, 1).unwrap();
        assert_eq!(s.values(), &[1.0, 6.0, 11.0]);
    }

    #[test]
    fn promoted_real_has_zero_imaginary_part() {
        let a = Axis::new(0.0, 1.0, 5).unwrap();
        let f = GridFn::from_fn(vec![a], |c| c[0].sin());
        assert!(f.to_complex().im().max_abs() == 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let a = Axis::new(0.0, 1.0, 5).unwrap();
        assert!(GridFn::new(vec![a], vec![0.0; 4]).is_err());
    }
}
