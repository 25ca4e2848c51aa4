//! Symplectic and optical tomograms.
//!
//! The symplectic tomogram is the Radon transform of the Wigner function,
//! `M(X, μ, ν) = ∫ W(q, p) δ(X − μq − νp) dq dp`; the optical tomogram is its
//! restriction `w(X, θ) = M(X, cos θ, sin θ/(mω))`. Both are computed by
//! integrating `W` along each line with arclength quadrature.

use std::f64::consts::PI;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gridcalc::{cubic_weights, integrate, Axis, GridFn};
use crate::states::{hermite_functions, OscillatorParams, StateSpec, WignerFn};
use crate::{Complex64, Error, Result, Warning, WarningKind};

/// Slice mass drift above which a numeric slice is flagged as renormalized.
pub const RENORMALIZE_DRIFT: f64 = 1e-3;
/// Threshold on `|μ| + |ν|` below which a direction counts as degenerate.
pub const DEGENERATE_DIRECTION: f64 = 1e-6;
/// Imaginary residue tolerated by the reconstruction.
pub const RECONSTRUCTION_IM_TOL: f64 = 1e-6;
/// Raw normalization drift tolerated by the reconstruction.
pub const RECONSTRUCTION_DRIFT: f64 = 5e-2;

/// Edge-to-peak ratio of a slice whose `X` moments are trusted.
pub const EDGE_DECAY: f64 = 1e-6;

/// Values of `|W|` below this fraction of its peak count as outside the support.
const SUPPORT_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Symplectic,
    Optical,
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Symplectic => "symplectic",
            Self::Optical => "optical",
        })
    }
}

impl std::str::FromStr for RepKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symplectic" => Ok(Self::Symplectic),
            "optical" => Ok(Self::Optical),
            other => Err(Error::Parse(format!("unknown representation `{other}`"))),
        }
    }
}

/// Treatment of the `μ = ν = 0` slice, where the tomogram degenerates to `δ(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginPolicy {
    /// Store a unit-mass Gaussian of width `h_X` and flag it.
    #[default]
    Nascent,
    /// Fail with [`Error::DegenerateDirection`].
    Reject,
}

/// A tomogram over `(X, μ, ν)` or `(X, θ)`; `X` is always axis 0.
#[derive(Debug, Clone)]
pub struct Tomogram {
    pub kind: RepKind,
    pub grid: GridFn<f64>,
    pub params: OscillatorParams,
    /// Flat parameter indices of slices whose raw mass drifted by more than
    /// `RENORMALIZE_DRIFT`; every numeric slice is rescaled to unit mass.
    pub renormalized: Vec<usize>,
    /// Flat parameter index of the nascent `μ = ν = 0` slice, if any.
    pub origin: Option<usize>,
    pub warnings: Vec<Warning>,
}

impl Tomogram {
    pub fn x_axis(&self) -> &Axis {
        &self.grid.axes()[0]
    }

    /// The parameter axes: `(μ, ν)` or `(θ)`.
    pub fn param_axes(&self) -> &[Axis] {
        &self.grid.axes()[1..]
    }

    pub fn slice_count(&self) -> usize {
        self.grid.len() / self.x_axis().count
    }

    /// `∫ M dX` for every parameter point.
    pub fn slice_masses(&self) -> GridFn<f64> {
        integrate(&self.grid, &[0]).expect("X axis present")
    }

    /// `∫ Xᵏ M dX` for every parameter point.
    pub fn slice_moment(&self, k: i32) -> GridFn<f64> {
        let g = self.grid.map_with_coords(|c, v| c[0].powi(k) * v);
        integrate(&g, &[0]).expect("X axis present")
    }

    /// Tomographic direction `(μ, ν)` of a parameter point.
    pub fn direction(&self, coords: &[f64]) -> (f64, f64) {
        match self.kind {
            RepKind::Symplectic => (coords[0], coords[1]),
            RepKind::Optical => optical_direction(coords[0], &self.params),
        }
    }

    /// Parameter indices whose raw mass did not drift, not the origin slice, and
    /// decay at both ends of the `X` axis to `EDGE_DECAY` of their peak.
    ///
    /// Moments of the remaining slices are biased by the finite `X` range.
    pub fn resolved_slices(&self) -> Vec<usize> {
        let ns = self.slice_count();
        let nx = self.x_axis().count;
        let v = self.grid.values();
        (0..ns)
            .filter(|i| Some(*i) != self.origin && !self.renormalized.contains(i))
            .filter(|&s| {
                let peak = (0..nx).fold(0.0f64, |m, k| m.max(v[k * ns + s].abs()));
                let edge = v[s].abs().max(v[(nx - 1) * ns + s].abs());
                edge <= EDGE_DECAY * peak
            })
            .collect()
    }
}

/// `(cos θ, sin θ/(mω))`.
pub fn optical_direction(theta: f64, params: &OscillatorParams) -> (f64, f64) {
    (theta.cos(), theta.sin() / params.m_omega())
}

fn check_theta_axis(theta: &Axis) -> Result<()> {
    let slack = 1e-12;
    if theta.min < -slack {
        return Err(Error::PhaseOutOfRange(theta.min));
    }
    if theta.max > PI + slack {
        return Err(Error::PhaseOutOfRange(theta.max));
    }
    Ok(())
}

/// Cubic interpolant of a Wigner function restricted to its numerical support.
struct LineSampler<'a> {
    q: Axis,
    p: Axis,
    vals: &'a [f64],
    lo: [f64; 2],
    hi: [f64; 2],
    step: f64,
}

impl<'a> LineSampler<'a> {
    fn new(w: &'a WignerFn) -> Self {
        let q = *w.q_axis();
        let p = *w.p_axis();
        let vals = w.grid.values();
        let peak = w.grid.max_abs();
        let (mut ilo, mut ihi, mut jlo, mut jhi) = (q.count, 0, p.count, 0);
        for (f, v) in vals.iter().enumerate() {
            if v.abs() > SUPPORT_FLOOR * peak {
                let (i, j) = (f / p.count, f % p.count);
                ilo = ilo.min(i);
                ihi = ihi.max(i);
                jlo = jlo.min(j);
                jhi = jhi.max(j);
            }
        }
        if ilo > ihi {
            (ilo, ihi, jlo, jhi) = (0, 0, 0, 0);
        }
        let pad = 2;
        let lo = [
            q.point(ilo.saturating_sub(pad)),
            p.point(jlo.saturating_sub(pad)),
        ];
        let hi = [
            q.point((ihi + pad).min(q.count - 1)),
            p.point((jhi + pad).min(p.count - 1)),
        ];
        Self {
            q,
            p,
            vals,
            lo,
            hi,
            step: q.spacing().min(p.spacing()),
        }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        if !(self.q.contains(x) && self.p.contains(y)) {
            return 0.0;
        }
        let (i0, wx) = cubic_weights(&self.q, x);
        let (j0, wy) = cubic_weights(&self.p, y);
        let np = self.p.count;
        let mut acc = 0.0;
        for (a, wa) in wx.iter().enumerate() {
            let row = &self.vals[(i0 + a) * np + j0..(i0 + a) * np + j0 + 4];
            acc += wa * (row[0] * wy[0] + row[1] * wy[1] + row[2] * wy[2] + row[3] * wy[3]);
        }
        acc
    }

    /// `(1/|n|) ∫ W(X n/|n|² + s t̂) ds` with `t̂ ⟂ n`.
    fn line_integral(&self, x: f64, a: f64, b: f64) -> f64 {
        let norm = a.hypot(b);
        let (nx, ny) = (a / norm, b / norm);
        let (tx, ty) = (-ny, nx);
        let (bx, by) = (x * nx / norm, x * ny / norm);
        let mut smin = f64::NEG_INFINITY;
        let mut smax = f64::INFINITY;
        for (base, dir, lo, hi) in [(bx, tx, self.lo[0], self.hi[0]), (by, ty, self.lo[1], self.hi[1])] {
            if dir.abs() < 1e-14 {
                if base < lo || base > hi {
                    return 0.0;
                }
            } else {
                let (s1, s2) = ((lo - base) / dir, (hi - base) / dir);
                smin = smin.max(s1.min(s2));
                smax = smax.min(s1.max(s2));
            }
        }
        if !(smax > smin) {
            return 0.0;
        }
        let steps = ((smax - smin) / self.step).ceil().max(1.0) as usize;
        let ds = (smax - smin) / steps as f64;
        let mut acc = 0.0;
        for k in 0..=steps {
            let s = smin + k as f64 * ds;
            let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
            acc += w * self.eval(bx + s * tx, by + s * ty);
        }
        acc * ds / norm
    }
}

/// Unit-mass Gaussian in `X` standing in for `δ(X − mean)`.
fn nascent_slice(x: &Axis, mean: f64) -> Vec<f64> {
    let s = x.spacing();
    let line: Vec<f64> = x
        .points()
        .iter()
        .map(|&v| (-(v - mean).powi(2) / (2.0 * s * s)).exp())
        .collect();
    let mass = trapezoid(x, &line);
    line.into_iter().map(|v| v / mass).collect()
}

fn trapezoid(x: &Axis, line: &[f64]) -> f64 {
    x.trapezoid_weights().iter().zip(line).map(|(w, v)| w * v).sum()
}

/// Assembles per-slice X-lines into an `(X, params…)` grid.
fn assemble(x: Axis, params: &[Axis], slices: Vec<Vec<f64>>) -> GridFn<f64> {
    let ns = slices.len();
    let mut values = vec![0.0; x.count * ns];
    for (s, line) in slices.iter().enumerate() {
        for (i, &v) in line.iter().enumerate() {
            values[i * ns + s] = v;
        }
    }
    let mut axes = vec![x];
    axes.extend_from_slice(params);
    GridFn::new(axes, values).expect("slice layout")
}

struct SliceSet {
    lines: Vec<Vec<f64>>,
    renormalized: Vec<usize>,
    origin: Option<usize>,
}

/// Numeric Radon lines for the given directions.
fn radon_slices(
    w: &WignerFn,
    x: &Axis,
    directions: &[(f64, f64)],
    policy: OriginPolicy,
) -> Result<SliceSet> {
    let sampler = LineSampler::new(w);
    let xs = x.points();
    let origin = directions
        .iter()
        .position(|&(a, b)| a.abs() + b.abs() < DEGENERATE_DIRECTION);
    if origin.is_some() && policy == OriginPolicy::Reject {
        return Err(Error::DegenerateDirection);
    }
    let mirror = mirror_directions(x, directions);
    let mut results: Vec<(Vec<f64>, bool)> = directions
        .par_iter()
        .enumerate()
        .map(|(s, &(a, b))| {
            if mirror[s].is_some_and(|m| m < s) {
                return (Vec::new(), false);
            }
            if Some(s) == origin {
                return (nascent_slice(x, 0.0), false);
            }
            let mut line: Vec<f64> = xs.iter().map(|&xv| sampler.line_integral(xv, a, b)).collect();
            let mass = trapezoid(x, &line);
            // Every slice is rescaled: rescaling only the drifting ones leaves
            // mass steps between neighbouring slices that ∂_μ, ∂_ν amplify.
            if mass > 0.0 {
                line.iter_mut().for_each(|v| *v /= mass);
            }
            (line, (mass - 1.0).abs() > RENORMALIZE_DRIFT)
        })
        .collect();
    // M(X, −μ, −ν) = M(−X, μ, ν)
    for s in 0..results.len() {
        if let Some(m) = mirror[s].filter(|&m| m < s) {
            let (line, flag) = &results[m];
            results[s] = (line.iter().rev().copied().collect(), *flag);
        }
    }
    let renormalized = results
        .iter()
        .enumerate()
        .filter_map(|(s, r)| r.1.then_some(s))
        .collect();
    Ok(SliceSet {
        lines: results.into_iter().map(|r| r.0).collect(),
        renormalized,
        origin,
    })
}

/// Index of the direction `(−a, −b)` for each direction, when the `X` axis is
/// symmetric so that the mirrored slice is the reversed line.
fn mirror_directions(x: &Axis, directions: &[(f64, f64)]) -> Vec<Option<usize>> {
    if (x.min + x.max).abs() > 1e-9 * x.spacing() {
        return vec![None; directions.len()];
    }
    let key = |a: f64, b: f64| ((a * 1e9).round() as i64, (b * 1e9).round() as i64);
    let index: HashMap<(i64, i64), usize> = directions
        .iter()
        .enumerate()
        .map(|(s, &(a, b))| (key(a, b), s))
        .collect();
    directions
        .iter()
        .map(|&(a, b)| index.get(&key(-a, -b)).copied())
        .collect()
}

fn slice_warnings(set: &SliceSet) -> Vec<Warning> {
    let mut out = Vec::new();
    if !set.renormalized.is_empty() {
        out.push(Warning::new(
            WarningKind::SliceRenormalized,
            format!(
                "{} slice(s) drifted from unit mass by more than {RENORMALIZE_DRIFT:.0e} before rescaling",
                set.renormalized.len()
            ),
        ));
    }
    if set.origin.is_some() {
        out.push(Warning::new(
            WarningKind::NascentOriginSlice,
            "the μ=ν=0 slice holds a nascent Gaussian of width h_X",
        ));
    }
    out
}

fn symplectic_directions(mu: &Axis, nu: &Axis) -> Vec<(f64, f64)> {
    let nv = nu.points();
    mu.points()
        .iter()
        .flat_map(|&m| nv.iter().map(move |&n| (m, n)))
        .collect()
}

/// Numeric symplectic tomogram of `w` on `X × μ × ν`.
pub fn symplectic_tomogram(w: &WignerFn, x: &Axis, mu: &Axis, nu: &Axis) -> Result<Tomogram> {
    symplectic_tomogram_with(w, x, mu, nu, OriginPolicy::default())
}

pub fn symplectic_tomogram_with(
    w: &WignerFn,
    x: &Axis,
    mu: &Axis,
    nu: &Axis,
    policy: OriginPolicy,
) -> Result<Tomogram> {
    let dirs = symplectic_directions(mu, nu);
    let set = radon_slices(w, x, &dirs, policy)?;
    let warnings = slice_warnings(&set);
    Ok(Tomogram {
        kind: RepKind::Symplectic,
        params: w.params,
        renormalized: set.renormalized,
        origin: set.origin,
        warnings,
        grid: assemble(*x, &[*mu, *nu], set.lines),
    })
}

/// Numeric optical tomogram of `w` on `X × θ`, `θ ⊂ [0, π]`.
pub fn optical_tomogram(w: &WignerFn, x: &Axis, theta: &Axis) -> Result<Tomogram> {
    check_theta_axis(theta)?;
    let dirs: Vec<(f64, f64)> = theta
        .points()
        .iter()
        .map(|&t| optical_direction(t, &w.params))
        .collect();
    let set = radon_slices(w, x, &dirs, OriginPolicy::Reject)?;
    let warnings = slice_warnings(&set);
    Ok(Tomogram {
        kind: RepKind::Optical,
        params: w.params,
        renormalized: set.renormalized,
        origin: None,
        warnings,
        grid: assemble(*x, &[*theta], set.lines),
    })
}

/// Closed-form tomogram of a catalog state.
///
/// Gaussian-class slices are Gaussians in `X` with mean `μq̄ + νp̄` and
/// variance `μ²σ_q² + ν²σ_p²`. A Fock state's quadratures all share the
/// distribution of `q̂`, so its slice is `|φ_n(X/R)|²/R` with
/// `R² = μ²ħ/(mω) + ν²ħmω`. Slices are rescaled to unit mass on the `X` grid.
pub fn tomogram_analytic(
    spec: &StateSpec,
    params: &OscillatorParams,
    kind: RepKind,
    x: &Axis,
    param_axes: &[Axis],
) -> Result<Tomogram> {
    params.validate()?;
    spec.validate()?;
    let density = |a: f64, b: f64, v: f64| -> f64 {
        match (spec, spec.gaussian_shape(params)) {
            (_, Some(g)) => {
                let mean = a * g.q_mean + b * g.p_mean;
                let var = a * a * g.var_q + b * b * g.var_p;
                (-(v - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
            }
            (StateSpec::Fock { n }, None) => {
                let r = (a * a * params.hbar / params.m_omega() + b * b * params.hbar * params.m_omega()).sqrt();
                hermite_functions(*n, v / r)[*n as usize].powi(2) / r
            }
            _ => unreachable!("every state is Gaussian or Fock"),
        }
    };
    let dirs = match (kind, param_axes) {
        (RepKind::Symplectic, [mu, nu]) => symplectic_directions(mu, nu),
        (RepKind::Optical, [theta]) => {
            check_theta_axis(theta)?;
            theta.points().iter().map(|&t| optical_direction(t, params)).collect()
        }
        _ => {
            return Err(Error::ShapeMismatch(format!(
                "{} parameter axes for a {kind} tomogram",
                param_axes.len()
            )))
        }
    };
    let xs = x.points();
    let mut origin = None;
    let lines: Vec<Vec<f64>> = dirs
        .iter()
        .enumerate()
        .map(|(s, &(a, b))| {
            if a.abs() + b.abs() < DEGENERATE_DIRECTION {
                origin = Some(s);
                return nascent_slice(x, 0.0);
            }
            let mut line: Vec<f64> = xs.iter().map(|&v| density(a, b, v)).collect();
            let mass = trapezoid(x, &line);
            line.iter_mut().for_each(|v| *v /= mass);
            line
        })
        .collect();
    let warnings = if origin.is_some() {
        vec![Warning::new(
            WarningKind::NascentOriginSlice,
            "the μ=ν=0 slice holds a nascent Gaussian of width h_X",
        )]
    } else {
        Vec::new()
    };
    Ok(Tomogram {
        kind,
        params: *params,
        renormalized: Vec::new(),
        origin,
        warnings,
        grid: assemble(*x, param_axes, lines),
    })
}

/// Edge-to-peak ratio above which a slice counts as non-decaying in `X`.
const RECONSTRUCTION_EDGE_TOL: f64 = 1e-4;
/// Slice radius `|(μ, ν)|` beyond which the reconstruction uses scaled slices.
pub const RECONSTRUCTION_RADIUS: f64 = 2.0;
/// Factor by which the `(μ, ν)` integration domain exceeds the tomogram grid.
pub const RECONSTRUCTION_EXTENT: usize = 2;

/// The parameter axis stretched by `RECONSTRUCTION_EXTENT` at fixed spacing.
fn extended_axis(a: &Axis) -> Axis {
    let e = RECONSTRUCTION_EXTENT as f64;
    Axis {
        min: e * a.min,
        max: e * a.max,
        count: RECONSTRUCTION_EXTENT * (a.count - 1) + 1,
    }
}

/// Inverse of the symplectic transform on `q × p`.
///
/// `χ(μ, ν) = ∫ M e^{ikX} dX` followed by
/// `W(q, p) = (k²/4π²) ∫∫ χ(μ, ν) e^{−ik(μq + νp)} dμ dν`, `k = √(mω/ħ)`,
/// and a final rescaling to `∫W = 1`. The `(μ, ν)` integral runs over the
/// grid stretched by `RECONSTRUCTION_EXTENT`; outside the radius
/// `RECONSTRUCTION_RADIUS` it uses `χ(λμ, λν) = ∫ M(X, μ, ν) e^{ikλX} dX`
/// with slices interpolated (cubic) at that radius.
pub fn wigner_from_symplectic(m: &Tomogram, q_axis: &Axis, p_axis: &Axis) -> Result<WignerFn> {
    if m.kind != RepKind::Symplectic {
        return Err(Error::RepresentationMismatch(
            "reconstruction needs a symplectic tomogram".into(),
        ));
    }
    let params = m.params;
    let k = params.k();
    let x = *m.x_axis();
    let (mu, nu) = (m.param_axes()[0], m.param_axes()[1]);
    let ns = mu.count * nu.count;
    let vals = m.grid.values();
    let xs = x.points();
    let xw = x.trapezoid_weights();

    // Slices with |n| ≤ 1 must decay in X, otherwise nothing is normalizable.
    for s in 0..ns {
        let (a, b) = (mu.point(s / nu.count), nu.point(s % nu.count));
        if a.hypot(b) > 1.0 || Some(s) == m.origin {
            continue;
        }
        let line = (0..x.count).map(|i| vals[i * ns + s]);
        let peak = line.clone().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let edge = vals[s].abs().max(vals[(x.count - 1) * ns + s].abs());
        if peak == 0.0 || edge > RECONSTRUCTION_EDGE_TOL * peak {
            return Err(Error::Normalization {
                drift: if peak == 0.0 { f64::INFINITY } else { edge / peak },
                limit: RECONSTRUCTION_EDGE_TOL,
                context: format!("tomogram slice at (μ, ν) = ({a}, {b}) does not decay in X"),
            });
        }
    }

    // Radius up to which slices are used as stored; wider slices lose mass
    // off the X window, so χ beyond it comes from the slice at this radius
    // via M(λX, λμ, λν) = M(X, μ, ν)/|λ|.
    let inner = (-mu.min).min(mu.max).min(-nu.min).min(nu.max);
    if inner <= 0.0 {
        return Err(Error::InvalidAxis(
            "reconstruction needs (μ, ν) axes that enclose the origin".into(),
        ));
    }
    let r0 = RECONSTRUCTION_RADIUS.min(0.9 * inner);
    let ext_mu = extended_axis(&mu);
    let ext_nu = extended_axis(&nu);
    let ne = ext_mu.count * ext_nu.count;
    let chi: Vec<Complex64> = (0..ne)
        .into_par_iter()
        .map(|s| {
            let (a, b) = (ext_mu.point(s / ext_nu.count), ext_nu.point(s % ext_nu.count));
            let r = a.hypot(b);
            if r < DEGENERATE_DIRECTION {
                return Complex64::new(1.0, 0.0);
            }
            let lambda = (r / r0).max(1.0);
            let (sa, sb) = (a / lambda, b / lambda);
            if !mu.contains(sa) || !nu.contains(sb) {
                return Complex64::new(0.0, 0.0);
            }
            let (i0, wa) = cubic_weights(&mu, sa);
            let (j0, wb) = cubic_weights(&nu, sb);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, x_) in xs.iter().enumerate() {
                let mut v = 0.0;
                for (di, wi) in wa.iter().enumerate() {
                    for (dj, wj) in wb.iter().enumerate() {
                        v += wi * wj * vals[i * ns + (i0 + di) * nu.count + j0 + dj];
                    }
                }
                acc += Complex64::from_polar(xw[i] * v, k * lambda * x_);
            }
            acc
        })
        .collect();

    let mw = ext_mu.trapezoid_weights();
    let nw = ext_nu.trapezoid_weights();
    let qs = q_axis.points();
    let ps = p_axis.points();
    let mus = ext_mu.points();
    let nus = ext_nu.points();
    // a[iq][jn] = Σ_μ w_μ χ(μ, ν_jn) e^{−ikμq}
    let a: Vec<Vec<Complex64>> = qs
        .par_iter()
        .map(|&q| {
            let e: Vec<Complex64> = mus
                .iter()
                .zip(&mw)
                .map(|(&m_, &w_)| Complex64::from_polar(w_, -k * m_ * q))
                .collect();
            (0..ext_nu.count)
                .map(|jn| (0..ext_mu.count).map(|im| e[im] * chi[im * ext_nu.count + jn]).sum())
                .collect()
        })
        .collect();
    let pref = k * k / (4.0 * PI * PI);
    let e_p: Vec<Vec<Complex64>> = ps
        .iter()
        .map(|&p| {
            nus.iter()
                .zip(&nw)
                .map(|(&n_, &w_)| Complex64::from_polar(w_, -k * n_ * p))
                .collect()
        })
        .collect();
    let values: Vec<Complex64> = a
        .par_iter()
        .flat_map_iter(|row| {
            e_p.iter()
                .map(move |ep| row.iter().zip(ep).map(|(r, e)| r * e).sum::<Complex64>() * pref)
        })
        .collect();
    let w = GridFn::new(vec![*q_axis, *p_axis], values)?;
    let residue = w.im().max_abs();
    if residue > RECONSTRUCTION_IM_TOL {
        return Err(Error::ImaginaryResidue {
            residue,
            threshold: RECONSTRUCTION_IM_TOL,
            context: "Wigner reconstruction from a symplectic tomogram".into(),
        });
    }
    let re = w.re();
    let mass = crate::gridcalc::integrate_all(&re);
    let drift = (mass - 1.0).abs();
    if !(drift <= RECONSTRUCTION_DRIFT) {
        return Err(Error::Normalization {
            drift,
            limit: RECONSTRUCTION_DRIFT,
            context: "Wigner reconstruction from a symplectic tomogram".into(),
        });
    }
    Ok(WignerFn {
        grid: re.scale(1.0 / mass),
        params,
    })
}
