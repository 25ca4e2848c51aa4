use rayon::prelude::*;

use super::stencil::StencilTable;
use super::{Axis, GridFn, Scalar};
use crate::{Error, Result, Warning, WarningKind};

/// Formal order of the derivative stencils and of the cumulative quadrature.
pub const DEFAULT_ACCURACY: usize = 8;
/// Relative size of `|f|` at the lower boundary above which an inverse derivative warns.
pub const DECAY_TOL: f64 = 1e-8;

const MIN_DERIVATIVE_POINTS: usize = 5;

/// Result of an inverse derivative together with the boundary-decay diagnostic.
#[derive(Debug, Clone)]
pub struct Antiderivative<T> {
    pub value: GridFn<T>,
    pub warning: Option<Warning>,
}

/// `(outer, n, inner)` decomposition of the flat layout around `axis`.
fn split<T: Scalar>(f: &GridFn<T>, axis: usize) -> (usize, usize, usize) {
    let n = f.axes()[axis].count;
    let inner = f.stride(axis);
    (f.len() / (n * inner), n, inner)
}

fn check_axis<T: Scalar>(f: &GridFn<T>, axis: usize) -> Result<&Axis> {
    f.axis(axis)
}

/// `out[o, i, :] = Σ_k w_ik f[o, start_i + k, :]` for every row of `table`.
fn apply_banded<T: Scalar>(f: &GridFn<T>, axis: usize, table: &StencilTable) -> GridFn<T> {
    let (_, n, inner) = split(f, axis);
    let src = f.values();
    let mut out = vec![T::default(); f.len()];
    out.par_chunks_mut(inner).enumerate().for_each(|(c, dst)| {
        let (o, i) = (c / n, c % n);
        let row = &table.rows[i];
        for (k, &w) in row.weights.iter().enumerate() {
            let base = (o * n + row.start + k) * inner;
            for (d, &s) in dst.iter_mut().zip(&src[base..base + inner]) {
                *d += s * w;
            }
        }
    });
    GridFn::new(f.axes().to_vec(), out).expect("shape preserved")
}

/// Running sum of interval integrals from the lower end of `axis`.
fn apply_cumulative<T: Scalar>(f: &GridFn<T>, axis: usize, table: &StencilTable) -> GridFn<T> {
    let (_, n, inner) = split(f, axis);
    let src = f.values();
    let mut out = vec![T::default(); f.len()];
    out.par_chunks_mut(n * inner).enumerate().for_each(|(o, block)| {
        for i in 0..n - 1 {
            let (done, rest) = block.split_at_mut((i + 1) * inner);
            let prev = &done[i * inner..];
            let next = &mut rest[..inner];
            next.copy_from_slice(prev);
            let row = &table.rows[i];
            for (k, &w) in row.weights.iter().enumerate() {
                let base = (o * n + row.start + k) * inner;
                for (d, &s) in next.iter_mut().zip(&src[base..base + inner]) {
                    *d += s * w;
                }
            }
        }
    });
    GridFn::new(f.axes().to_vec(), out).expect("shape preserved")
}

/// `∂^order f / ∂x_axis^order` with the default stencil accuracy.
pub fn derivative<T: Scalar>(f: &GridFn<T>, axis: usize, order: usize) -> Result<GridFn<T>> {
    let ax = *check_axis(f, axis)?;
    if !(1..=2).contains(&order) {
        return Err(Error::Unsupported(format!("derivative of order {order}")));
    }
    if ax.count < MIN_DERIVATIVE_POINTS {
        return Err(Error::AxisTooShort {
            index: axis,
            count: ax.count,
            required: MIN_DERIVATIVE_POINTS,
        });
    }
    let table = StencilTable::derivative(ax.count, ax.spacing(), order, DEFAULT_ACCURACY);
    Ok(apply_banded(f, axis, &table))
}

/// Derivative along `axis` with a caller-supplied stencil table.
pub fn derivative_with<T: Scalar>(
    f: &GridFn<T>,
    axis: usize,
    table: &StencilTable,
) -> Result<GridFn<T>> {
    let ax = check_axis(f, axis)?;
    if table.rows.len() != ax.count {
        return Err(Error::ShapeMismatch(format!(
            "stencil table of {} rows for an axis of {} points",
            table.rows.len(),
            ax.count
        )));
    }
    Ok(apply_banded(f, axis, table))
}

/// `∂⁻ⁿ f = (1/(n−1)!) ∫_{min}^{x} (x−x′)ⁿ⁻¹ f(x′) dx′` as `n` nested cumulative integrals.
pub fn inverse_derivative<T: Scalar>(
    f: &GridFn<T>,
    axis: usize,
    n: usize,
) -> Result<Antiderivative<T>> {
    let ax = *check_axis(f, axis)?;
    let table = StencilTable::interval_quadrature(ax.count, ax.spacing(), DEFAULT_ACCURACY);
    inverse_derivative_with(f, axis, n, &table)
}

pub fn inverse_derivative_with<T: Scalar>(
    f: &GridFn<T>,
    axis: usize,
    n: usize,
    table: &StencilTable,
) -> Result<Antiderivative<T>> {
    let ax = *check_axis(f, axis)?;
    if n == 0 {
        return Err(Error::Unsupported("inverse derivative of order 0".into()));
    }
    if table.rows.len() + 1 != ax.count {
        return Err(Error::ShapeMismatch(format!(
            "quadrature table of {} rows for an axis of {} points",
            table.rows.len(),
            ax.count
        )));
    }
    let warning = decay_warning(f, axis);
    let mut value = apply_cumulative(f, axis, table);
    for _ in 1..n {
        value = apply_cumulative(&value, axis, table);
    }
    Ok(Antiderivative { value, warning })
}

fn decay_warning<T: Scalar>(f: &GridFn<T>, axis: usize) -> Option<Warning> {
    let (outer, n, inner) = split(f, axis);
    let peak = f.max_abs();
    let vals = f.values();
    let edge = (0..outer)
        .flat_map(|o| vals[o * n * inner..o * n * inner + inner].iter())
        .fold(0.0f64, |m, v| m.max(v.modulus()));
    (edge > DECAY_TOL * peak).then(|| {
        Warning::new(
            WarningKind::BoundaryDecay,
            format!(
                "|f| = {edge:.3e} at the lower end of axis {axis} (max {peak:.3e}); \
                 the grid minimum is a poor stand-in for -inf"
            ),
        )
    })
}

/// Trapezoid quadrature over the listed axes; the result keeps the other axes.
/// Integrating every axis leaves a zero-dimensional grid holding one value.
pub fn integrate<T: Scalar>(f: &GridFn<T>, axes: &[usize]) -> Result<GridFn<T>> {
    let mut sorted = axes.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedAxis(w[0]));
        }
    }
    for &a in &sorted {
        check_axis(f, a)?;
    }
    let mut g = f.clone();
    for &a in sorted.iter().rev() {
        g = integrate_one(&g, a);
    }
    Ok(g)
}

fn integrate_one<T: Scalar>(f: &GridFn<T>, axis: usize) -> GridFn<T> {
    let (outer, n, inner) = split(f, axis);
    let w = f.axes()[axis].trapezoid_weights();
    let src = f.values();
    let mut out = vec![T::default(); outer * inner];
    for o in 0..outer {
        let dst = &mut out[o * inner..(o + 1) * inner];
        for (i, &wi) in w.iter().enumerate() {
            let base = (o * n + i) * inner;
            for (d, &s) in dst.iter_mut().zip(&src[base..base + inner]) {
                *d += s * wi;
            }
        }
    }
    let mut axes = f.axes().to_vec();
    axes.remove(axis);
    GridFn::new(axes, out).expect("reduced shape")
}

/// Trapezoid integral over every axis.
pub fn integrate_all<T: Scalar>(f: &GridFn<T>) -> T {
    let all: Vec<usize> = (0..f.ndim()).collect();
    integrate(f, &all).expect("distinct valid axes").values()[0]
}

fn check_point<T: Scalar>(f: &GridFn<T>, point: &[f64]) -> Result<()> {
    if point.len() != f.ndim() {
        return Err(Error::ShapeMismatch(format!(
            "{}-dimensional point for a {}-dimensional grid",
            point.len(),
            f.ndim()
        )));
    }
    if f.axes().iter().zip(point).any(|(a, &x)| !a.contains(x)) {
        return Err(Error::OutsideHull(point.to_vec()));
    }
    Ok(())
}

/// Multilinear interpolation; exact at nodes and for functions linear in each axis.
pub fn interpolate<T: Scalar>(f: &GridFn<T>, point: &[f64]) -> Result<T> {
    check_point(f, point)?;
    let cells: Vec<(usize, f64)> = f
        .axes()
        .iter()
        .zip(point)
        .map(|(a, &x)| a.locate(x).expect("inside hull"))
        .collect();
    let d = cells.len();
    let mut acc = T::default();
    let mut idx = vec![0usize; d];
    for corner in 0..(1usize << d) {
        let mut w = 1.0;
        for (k, &(i, t)) in cells.iter().enumerate() {
            let up = (corner >> k) & 1 == 1;
            idx[k] = i + up as usize;
            w *= if up { t } else { 1.0 - t };
        }
        if w != 0.0 {
            acc += f.get(&idx) * w;
        }
    }
    Ok(acc)
}

/// Nodes and weights of 4-point Lagrange interpolation at `x` along `axis`.
pub(crate) fn cubic_weights(axis: &Axis, x: f64) -> (usize, [f64; 4]) {
    let n = axis.count;
    let s = ((x - axis.min) / axis.spacing()).clamp(0.0, (n - 1) as f64);
    let start = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - start as f64;
    let w = [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ];
    (start, w)
}

/// Tensor-product 4-point Lagrange interpolation (third order, exact for cubics).
pub fn interpolate_cubic<T: Scalar>(f: &GridFn<T>, point: &[f64]) -> Result<T> {
    check_point(f, point)?;
    if f.axes().iter().any(|a| a.count < 4) {
        return interpolate(f, point);
    }
    let stencils: Vec<(usize, [f64; 4])> = f
        .axes()
        .iter()
        .zip(point)
        .map(|(a, &x)| cubic_weights(a, x))
        .collect();
    let d = stencils.len();
    let mut acc = T::default();
    let mut idx = vec![0usize; d];
    for corner in 0..4usize.pow(d as u32) {
        let mut w = 1.0;
        let mut c = corner;
        for (k, (start, ws)) in stencils.iter().enumerate() {
            let j = c % 4;
            c /= 4;
            idx[k] = start + j;
            w *= ws[j];
        }
        if w != 0.0 {
            acc += f.get(&idx) * w;
        }
    }
    Ok(acc)
}

impl<T: Scalar> GridFn<T> {
    /// Restriction to `axis = x` by 4-point interpolation along that axis only.
    pub fn slice_at(&self, axis: usize, x: f64) -> Result<GridFn<T>> {
        let ax = *self.axis(axis)?;
        if !ax.contains(x) {
            let mut p = vec![f64::NAN; self.ndim()];
            p[axis] = x;
            return Err(Error::OutsideHull(p));
        }
        let idx = ax.nearest_index(x);
        if (ax.point(idx) - x).abs() <= 1e-12 * ax.spacing() {
            return self.slice(axis, idx);
        }
        let (start, w) = cubic_weights(&ax, x);
        let mut out = self.slice(axis, start)?.scale(w[0]);
        for (k, &wk) in w.iter().enumerate().skip(1) {
            out = out.lincomb(1.0, &self.slice(axis, start + k)?, wk)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use statrs::function::erf::erf;

    fn x_axis() -> Axis {
        Axis::new(-8.0, 8.0, 161).unwrap()
    }

    fn gauss() -> GridFn<f64> {
        GridFn::from_fn(vec![x_axis()], |c| (-c[0] * c[0]).exp())
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = GridFn::from_fn(vec![x_axis()], |_| 1.0);
        assert!(derivative(&f, 0, 1).unwrap().max_abs() < 1e-10);
        assert!(derivative(&f, 0, 2).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn derivative_exact_on_quadratic() {
        let f = GridFn::from_fn(vec![x_axis()], |c| c[0] * c[0]);
        let d = derivative(&f, 0, 1).unwrap();
        let err = d.map_with_coords(|c, v| v - 2.0 * c[0]).max_abs();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn derivative_of_gaussian_at_one() {
        let d = derivative(&gauss(), 0, 1).unwrap();
        let v = d.get(&[90]);
        assert!((v + 2.0 * (-1.0f64).exp()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn second_derivative_of_gaussian() {
        let d = derivative(&gauss(), 0, 2).unwrap();
        let err = d
            .map_with_coords(|c, v| v - (4.0 * c[0] * c[0] - 2.0) * (-c[0] * c[0]).exp())
            .max_abs();
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn derivative_rejects_bad_requests() {
        let f = gauss();
        assert!(matches!(derivative(&f, 1, 1), Err(Error::AxisOutOfRange { .. })));
        let short = GridFn::from_fn(vec![Axis::new(0.0, 1.0, 4).unwrap()], |c| c[0]);
        assert!(matches!(derivative(&short, 0, 1), Err(Error::AxisTooShort { .. })));
    }

    #[test]
    fn antiderivative_of_gaussian_is_error_function() {
        let r = inverse_derivative(&gauss(), 0, 1).unwrap();
        assert!(r.warning.is_none());
        let err = r
            .value
            .map_with_coords(|c, v| v - 0.5 * std::f64::consts::PI.sqrt() * (1.0 + erf(c[0])))
            .max_abs();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn derivative_undoes_antiderivative() {
        let f = GridFn::from_fn(vec![x_axis()], |c| (c[0] - 0.3) * (-(c[0] - 0.3).powi(2) / 1.7).exp());
        let back = derivative(&inverse_derivative(&f, 0, 1).unwrap().value, 0, 1).unwrap();
        let err = (&back - &f).max_abs();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn second_antiderivative_is_iterated_first() {
        let f = gauss();
        let twice = inverse_derivative(&inverse_derivative(&f, 0, 1).unwrap().value, 0, 1)
            .unwrap()
            .value;
        let direct = inverse_derivative(&f, 0, 2).unwrap().value;
        assert!((&twice - &direct).max_abs() < 1e-10);
    }

    #[test]
    fn second_antiderivative_matches_ramp_convolution() {
        // ∂⁻²e^{−x²} = x·(√π/2)(1+erf x) + e^{−x²}/2
        let r = inverse_derivative(&gauss(), 0, 2).unwrap().value;
        let sp = std::f64::consts::PI.sqrt();
        let err = r
            .map_with_coords(|c, v| {
                let x = c[0];
                v - (x * 0.5 * sp * (1.0 + erf(x)) + 0.5 * (-x * x).exp())
            })
            .max_abs();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn non_decaying_input_warns() {
        let f = GridFn::from_fn(vec![x_axis()], |c| 1.0 + c[0] * 0.0);
        let r = inverse_derivative(&f, 0, 1).unwrap();
        assert_eq!(r.warning.unwrap().kind, WarningKind::BoundaryDecay);
    }

    #[test]
    fn antiderivative_along_inner_and_outer_axes_agree() {
        let a = Axis::new(-6.0, 6.0, 61).unwrap();
        let f = GridFn::from_fn(vec![a, a], |c| (-c[0] * c[0] - 2.0 * c[1] * c[1]).exp());
        let ft = GridFn::from_fn(vec![a, a], |c| (-c[1] * c[1] - 2.0 * c[0] * c[0]).exp());
        let g0 = inverse_derivative(&f, 0, 1).unwrap().value;
        let g1 = inverse_derivative(&ft, 1, 1).unwrap().value;
        for i in 0..61 {
            for j in 0..61 {
                assert!((g0.get(&[i, j]) - g1.get(&[j, i])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gaussian_integral_over_parameter_square() {
        let m = Axis::new(-4.5, 4.5, 97).unwrap();
        let f = GridFn::from_fn(vec![m, m], |c| (-c[0] * c[0] - c[1] * c[1]).exp() / std::f64::consts::PI);
        assert!((integrate_all(&f) - 1.0).abs() < 1e-6);
        let marginal = integrate(&f, &[1]).unwrap();
        assert_eq!(marginal.ndim(), 1);
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let f = GridFn::<Complex64>::zeros(vec![x_axis()]);
        assert_eq!(integrate_all(&f), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn repeated_axis_is_rejected() {
        assert!(matches!(integrate(&gauss(), &[0, 0]), Err(Error::RepeatedAxis(0))));
    }

    #[test]
    fn interpolation_nodal_and_linear() {
        let f = gauss();
        assert_eq!(interpolate(&f, &[1.0]).unwrap(), f.get(&[90]));
        let lin = GridFn::from_fn(vec![x_axis()], |c| 3.0 * c[0]);
        for x in [-7.93, -0.05, 0.5, 3.1] {
            assert!((interpolate(&lin, &[x]).unwrap() - 3.0 * x).abs() < 1e-12);
        }
        let v = interpolate(&f, &[0.5]).unwrap();
        assert!((v - (-0.25f64).exp()).abs() < 1e-3);
        assert!(matches!(interpolate(&f, &[9.0]), Err(Error::OutsideHull(_))));
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics() {
        let a = Axis::new(-2.0, 2.0, 21).unwrap();
        let f = GridFn::from_fn(vec![a, a], |c| c[0].powi(3) - c[0] * c[1] * c[1] + 2.0);
        for p in [[0.13f64, -1.77], [1.99, 0.01], [-2.0, 2.0]] {
            let want = p[0].powi(3) - p[0] * p[1] * p[1] + 2.0;
            assert!((interpolate_cubic(&f, &p).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_at_interpolates_along_one_axis() {
        let a = Axis::new(-2.0, 2.0, 21).unwrap();
        let f = GridFn::from_fn(vec![a, a], |c| c[0] * c[0] * c[1]);
        let s = f.slice_at(0, 0.37).unwrap();
        let want = GridFn::from_fn(vec![a], |c| 0.37 * 0.37 * c[0]);
        assert!((&s - &want).max_abs() < 1e-13);
    }

    #[test]
    fn convergence_orders() {
        let f = |x: f64| (-(x - 0.2).powi(2)).exp() * (1.3 * x).cos();
        let df = |x: f64| {
            let e = (-(x - 0.2).powi(2)).exp();
            -2.0 * (x - 0.2) * e * (1.3 * x).cos() - 1.3 * e * (1.3 * x).sin()
        };
        let errs: Vec<(f64, f64)> = [41usize, 81]
            .iter()
            .map(|&n| {
                let ax = Axis::new(-8.0, 8.0, n).unwrap();
                let g = GridFn::from_fn(vec![ax], |c| f(c[0]));
                let d = derivative(&g, 0, 1).unwrap();
                let de = d.map_with_coords(|c, v| v - df(c[0])).max_abs();
                let q = GridFn::from_fn(vec![Axis::new(-1.0, 1.5, n).unwrap()], |c| f(c[0]));
                let exact = 1.167_077_974_345_747;
                (de, (integrate_all(&q) - exact).abs())
            })
            .collect();
        assert!(errs[0].0 / errs[1].0 >= 8.0, "{errs:?}");
        assert!(errs[0].1 / errs[1].1 >= 3.5, "{errs:?}");
    }
}
