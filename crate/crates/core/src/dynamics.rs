//! Evolution right-hand sides, stationary-state residuals and the
//! stationarity condition for joint distributions, with analytic coherent
//! trajectories as time-dependent oracles.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gridcalc::{derivative, integrate_all, Axis, GridFn};
use crate::jointdist::{make_joint, GaussianPrior, JointDistribution, Prior};
use crate::opalg::{
    interior_mask, momentum_operator_derived, polynomial_of_operator, position_operator,
    position_operator_derived, Factor, OperatorExpr as Op, RepTag, Representation, AX_MU, AX_NU, AX_THETA, AX_X,
    MAX_POLY_DEGREE,
};
use crate::states::{OscillatorParams, StateSpec};
use crate::tomography::{tomogram_analytic, RepKind};
use crate::{Complex64, Error, Result};

/// Fraction of every axis excluded at both ends from residual norms.
pub const INTERIOR_MARGIN: f64 = 0.1;
/// Floor of the relative-residual denominator.
pub const RESIDUAL_EPS: f64 = 1e-12;
/// Half-width (cells) of the symplectic origin cross excluded from residuals.
pub const ORIGIN_CROSS_WIDTH: usize = 2;
/// Arm length (cells) of the origin cross.
pub const ORIGIN_CROSS_ARM: usize = 6;
/// Time step of the centered finite-difference oracle.
pub const FD_STEP: f64 = 1e-4;

/// `V(q) = Σ c_k qᵏ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolynomialPotential {
    coefficients: Vec<f64>,
}

impl TryFrom<Vec<f64>> for PolynomialPotential {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PolynomialPotential> for Vec<f64> {
    fn from(p: PolynomialPotential) -> Self {
        p.coefficients
    }
}

impl PolynomialPotential {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let degree = coefficients.len().saturating_sub(1);
        if degree > MAX_POLY_DEGREE {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_POLY_DEGREE,
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite potential coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// `mω²q²/2`.
    pub fn harmonic(params: &OscillatorParams) -> Self {
        Self {
            coefficients: vec![0.0, 0.0, 0.5 * params.mass * params.omega * params.omega],
        }
    }

    pub fn free() -> Self {
        Self { coefficients: Vec::new() }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn value(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * q + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    /// `V` applied to a position operator.
    pub fn of_operator(&self, q: &Op) -> Result<Op> {
        polynomial_of_operator(q, &self.coefficients)
    }
}

impl fmt::Display for PolynomialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for PolynomialPotential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self::free());
        }
        let coefficients = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("potential '{s}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coefficients)
    }
}

/// Outcome of checking `LHS = RHS` on the interior of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub state: Option<String>,
    /// `‖LHS − RHS‖₂ / max(‖LHS‖₂, ‖RHS‖₂, ε)`.
    pub relative: f64,
    pub max_abs: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub grid: Vec<Axis>,
    pub interior_points: usize,
    /// Relative difference between the printed and the derived operator, when
    /// both are evaluated.
    pub printed_discrepancy: Option<f64>,
}

impl ResidualReport {
    pub fn with_state(mut self, state: &StateSpec) -> Self {
        self.state = Some(state.to_string());
        self
    }
}

/// Interior points used by residual norms: a 10% margin on every axis and,
/// for symplectic grids, a small cross around `μ = ν = 0` where slices are
/// narrower than the `X` spacing.
pub fn residual_mask(f: &GridFn<f64>, kind: RepKind) -> Vec<bool> {
    let mut mask = interior_mask(f, INTERIOR_MARGIN);
    if kind == RepKind::Symplectic && f.ndim() == 3 {
        let (mu, nu) = (f.axes()[AX_MU], f.axes()[AX_NU]);
        let near = |a: &Axis, v: f64, cells: usize| v.abs() <= (cells as f64 + 0.5) * a.spacing();
        for (i, m) in mask.iter_mut().enumerate() {
            if !*m {
                continue;
            }
            let c = f.coords(i);
            let (x, y) = (c[AX_MU], c[AX_NU]);
            let cross = (near(&mu, x, ORIGIN_CROSS_WIDTH) && near(&nu, y, ORIGIN_CROSS_ARM))
                || (near(&nu, y, ORIGIN_CROSS_WIDTH) && near(&mu, x, ORIGIN_CROSS_ARM));
            if cross {
                *m = false;
            }
        }
    }
    mask
}

/// Compares two grid functions on the residual mask.
pub fn residual(equation: &str, kind: RepKind, lhs: &GridFn<f64>, rhs: &GridFn<f64>) -> Result<ResidualReport> {
    lhs.check_same_grid(rhs)?;
    let mask = residual_mask(lhs, kind);
    let (mut dl, mut dr, mut dd, mut mx, mut n) = (0.0, 0.0, 0.0, 0.0f64, 0usize);
    for ((&a, &b), &m) in lhs.values().iter().zip(rhs.values()).zip(&mask) {
        if m {
            dl += a * a;
            dr += b * b;
            dd += (a - b) * (a - b);
            mx = mx.max((a - b).abs());
            n += 1;
        }
    }
    let (ln, rn) = (dl.sqrt(), dr.sqrt());
    let relative = dd.sqrt() / ln.max(rn).max(RESIDUAL_EPS);
    if !relative.is_finite() {
        return Err(Error::Numeric(format!("non-finite residual in {equation}")));
    }
    Ok(ResidualReport {
        equation: equation.to_string(),
        state: None,
        relative,
        max_abs: mx,
        lhs_norm: ln,
        rhs_norm: rn,
        grid: lhs.axes().to_vec(),
        interior_points: n,
        printed_discrepancy: None,
    })
}

/// Relative L2 difference on the residual mask.
pub fn relative_difference(a: &GridFn<f64>, b: &GridFn<f64>, kind: RepKind) -> Result<f64> {
    Ok(residual("difference", kind, a, b)?.relative)
}

fn joint_rep(joint: &JointDistribution) -> Result<Representation> {
    let tag = match joint.kind {
        RepKind::Symplectic => RepTag::SymplecticJoint(joint.prior.clone()),
        RepKind::Optical => RepTag::OpticalJoint(joint.prior.clone()),
    };
    Representation::new(tag, joint.params)
}

fn gaussian_prior(joint: &JointDistribution) -> Result<GaussianPrior> {
    if joint.kind != RepKind::Symplectic {
        return Err(Error::RepresentationMismatch("symplectic joint distribution required".into()));
    }
    Ok(*joint.prior.as_gaussian()?)
}

fn require_optical(joint: &JointDistribution) -> Result<()> {
    if joint.kind != RepKind::Optical {
        return Err(Error::RepresentationMismatch("optical joint distribution required".into()));
    }
    joint.prior.as_gaussian_sum().map(|_| ())
}

fn im_part(op: &Op, f: &GridFn<f64>) -> Result<GridFn<f64>> {
    Ok(op.apply_real(f)?.im())
}

fn re_part(op: &Op, f: &GridFn<f64>) -> Result<GridFn<f64>> {
    Ok(op.apply_real(f)?.re())
}

/// `(2/ħ) Im V([q̂]) F̃` with the printed position rule of the representation.
pub fn potential_im_term(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    if v.is_zero() {
        return Ok(joint.grid.map(|_| 0.0));
    }
    let q = position_operator(&joint_rep(joint)?)?;
    Ok(im_part(&v.of_operator(&q)?, &joint.grid)?.scale(2.0 / joint.params.hbar))
}

/// Drift part `Σ (μ/m)(2(ν−ν₀)/ζ² + ∂_ν) M̃` of the symplectic evolution.
pub fn symplectic_drift_term(joint: &JointDistribution) -> Result<GridFn<f64>> {
    let g = gaussian_prior(joint)?;
    let m = joint.params.mass;
    let op = Op::product(vec![
        Op::mul(Factor::Affine {
            axis: AX_MU,
            slope: 1.0 / m,
            intercept: 0.0,
        }),
        Op::sum(vec![
            Op::mul(Factor::Affine {
                axis: AX_NU,
                slope: 2.0 / (g.zeta * g.zeta),
                intercept: -2.0 * g.nu0 / (g.zeta * g.zeta),
            }),
            Op::d(AX_NU),
        ]),
    ]);
    re_part(&op, &joint.grid)
}

/// Right-hand side of the symplectic evolution equation,
/// `∂_t M̃ = [Σ (μ/m)(2(ν−ν₀)/ζ² + ∂_ν) + (2/ħ) Im V([q̂])] M̃`.
pub fn evolution_rhs_symplectic(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    let drift = symplectic_drift_term(joint)?;
    let pot = potential_im_term(joint, v)?;
    Ok(&drift + &pot)
}

/// `ω[cos²θ(2P⁻¹ΣQ(θ−f)/φ²𝒫 + ∂_θ) − ½ sin 2θ (1 + X∂_X)] w̃`.
pub fn optical_drift_term(joint: &JointDistribution) -> Result<GridFn<f64>> {
    require_optical(joint)?;
    let p2 = joint.prior.as_gaussian_sum()?.clone();
    re_part(&optical_drift_op(joint.params.omega, Some(Factor::SumDrift { prior: p2 })), &joint.grid)
}

fn cos2() -> Factor {
    Factor::Product(vec![
        Factor::Cos { axis: AX_THETA, freq: 1.0 },
        Factor::Cos { axis: AX_THETA, freq: 1.0 },
    ])
}

fn optical_drift_op(omega: f64, drift: Option<Factor>) -> Op {
    let d_theta = match drift {
        Some(f) => Op::sum(vec![Op::mul(f), Op::d(AX_THETA)]),
        None => Op::d(AX_THETA),
    };
    Op::product(vec![
        Op::scalar(omega, 0.0),
        Op::sum(vec![
            Op::product(vec![Op::mul(cos2()), d_theta]),
            Op::product(vec![
                Op::scalar(-0.5, 0.0),
                Op::mul(Factor::Sin { axis: AX_THETA, freq: 2.0 }),
                Op::sum(vec![
                    Op::Identity,
                    Op::product(vec![Op::mul(Factor::Power { axis: AX_X, power: 1 }), Op::d(AX_X)]),
                ]),
            ]),
        ]),
    ])
}

/// Right-hand side of the optical joint evolution equation.
pub fn evolution_rhs_optical(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    let drift = optical_drift_term(joint)?;
    let pot = potential_im_term(joint, v)?;
    Ok(&drift + &pot)
}

/// Tomographic optical evolution applied to `w = w̃/P` and multiplied back by
/// `P`; equals [`evolution_rhs_optical`] by transport of the rules.
pub fn evolution_rhs_optical_transported(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    require_optical(joint)?;
    let p = joint.grid.map_with_coords(|c, _| joint.prior.value(&c[1..]));
    let w = joint.grid.zip_with(&p, |a, b| a / b)?;
    let mut rhs = re_part(&optical_drift_op(joint.params.omega, None), &w)?;
    if !v.is_zero() {
        let tomo = Representation::new(RepTag::OpticalTomogram, joint.params)?;
        let q = position_operator(&tomo)?;
        rhs = &rhs + &im_part(&v.of_operator(&q)?, &w)?.scale(2.0 / joint.params.hbar);
    }
    rhs.zip_with(&p, |a, b| a * b)
}

/// `(2/ħ) Im Ĥ([q̂], [p̂]) F̃` with both rules derived by prior conjugation.
pub fn evolution_rhs_general(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    let h = hamiltonian_operator(joint, v)?;
    Ok(im_part(&h, &joint.grid)?.scale(2.0 / joint.params.hbar))
}

/// `(2/ħ) Im([p̂]²/2m) F̃`, which must reproduce the printed drift term.
pub fn kinetic_im_term(joint: &JointDistribution) -> Result<GridFn<f64>> {
    let p = momentum_operator_derived(&joint_rep(joint)?)?;
    let t = Op::product(vec![Op::scalar(0.5 / joint.params.mass, 0.0), p.clone(), p]);
    Ok(im_part(&t, &joint.grid)?.scale(2.0 / joint.params.hbar))
}

/// `[p̂]²/2m + V([q̂])` from the derived rules.
pub fn hamiltonian_operator(joint: &JointDistribution, v: &PolynomialPotential) -> Result<Op> {
    let rep = joint_rep(joint)?;
    let p = momentum_operator_derived(&rep)?;
    let q = position_operator_derived(&rep)?;
    Ok(Op::sum(vec![
        Op::product(vec![Op::scalar(0.5 / joint.params.mass, 0.0), p.clone(), p]),
        v.of_operator(&q)?,
    ]))
}

/// `Re([p̂]²/2m) F̃` from the derived momentum rule.
fn kinetic_re_term(joint: &JointDistribution) -> Result<GridFn<f64>> {
    let p = momentum_operator_derived(&joint_rep(joint)?)?;
    let t = Op::product(vec![Op::scalar(0.5 / joint.params.mass, 0.0), p.clone(), p]);
    re_part(&t, &joint.grid)
}

fn potential_re_term(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    if v.is_zero() {
        return Ok(joint.grid.map(|_| 0.0));
    }
    let q = position_operator_derived(&joint_rep(joint)?)?;
    re_part(&v.of_operator(&q)?, &joint.grid)
}

/// Kinetic side of the symplectic stationary equation exactly as printed,
/// with `(ν + ν₀)` where the position and momentum rules give `(ν − ν₀)`.
pub fn printed_stationary_kinetic_symplectic(joint: &JointDistribution) -> Result<GridFn<f64>> {
    let g = gaussian_prior(joint)?;
    let m = joint.params.mass;
    let hb = joint.params.hbar;
    let z2 = g.zeta * g.zeta;
    let shifted = |slope: f64| Factor::Affine {
        axis: AX_NU,
        slope,
        intercept: slope * g.nu0,
    };
    let op = Op::sum(vec![
        Op::product(vec![
            Op::scalar(1.0 / m, 0.0),
            Op::inv(AX_X, 2),
            Op::sum(vec![
                Op::mul(Factor::Product(vec![shifted(1.0), shifted(2.0 / (z2 * z2))])),
                Op::product(vec![Op::scalar(0.5, 0.0), Op::d2(AX_NU)]),
                Op::product(vec![Op::mul(shifted(2.0 / z2)), Op::d(AX_NU)]),
                Op::scalar(1.0 / z2, 0.0),
            ]),
        ]),
        Op::product(vec![
            Op::scalar(-hb * hb / (8.0 * m), 0.0),
            Op::mul(Factor::Power { axis: AX_MU, power: 2 }),
            Op::d2(AX_X),
        ]),
    ]);
    re_part(&op, &joint.grid)
}

/// Stationary-state residual of a symplectic joint distribution.
///
/// Sides follow the printed layout: `(E − Re V([q̂])) M̃` against the kinetic
/// term `Re([p̂]²/2m) M̃`, both derived from the correspondence rules. With
/// `printed_form`, the printed kinetic operator is evaluated as well and its
/// difference from the derived one is reported.
pub fn stationary_residual_symplectic(
    joint: &JointDistribution,
    v: &PolynomialPotential,
    energy: f64,
    printed_form: bool,
) -> Result<ResidualReport> {
    gaussian_prior(joint)?;
    let kinetic = kinetic_re_term(joint)?;
    let pot = potential_re_term(joint, v)?;
    let lhs = joint.grid.zip_with(&pot, |m, vm| energy * m - vm)?;
    let mut report = residual("stationary equation (symplectic)", RepKind::Symplectic, &lhs, &kinetic)?;
    if printed_form {
        let printed = printed_stationary_kinetic_symplectic(joint)?;
        report.printed_discrepancy = Some(relative_difference(&printed, &kinetic, RepKind::Symplectic)?);
    }
    Ok(report)
}

/// Stationarity condition `[Σ (μ/m)((ν−ν₀)/ζ² + ∂_ν/2) + (1/ħ) Im V([q̂])] M̃ = 0`,
/// checked as drift term against minus the potential term.
pub fn stationarity_condition_symplectic(joint: &JointDistribution, v: &PolynomialPotential) -> Result<ResidualReport> {
    let drift = symplectic_drift_term(joint)?.scale(0.5);
    let pot = potential_im_term(joint, v)?.scale(-0.5);
    residual("stationarity condition (symplectic)", RepKind::Symplectic, &drift, &pot)
}

/// The condition expression itself, `½ × evolution_rhs_symplectic`.
pub fn stationarity_condition_value(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    let g = gaussian_prior(joint)?;
    let m = joint.params.mass;
    let op = Op::product(vec![
        Op::mul(Factor::Affine {
            axis: AX_MU,
            slope: 1.0 / m,
            intercept: 0.0,
        }),
        Op::sum(vec![
            Op::mul(Factor::Affine {
                axis: AX_NU,
                slope: 1.0 / (g.zeta * g.zeta),
                intercept: -g.nu0 / (g.zeta * g.zeta),
            }),
            Op::product(vec![Op::scalar(0.5, 0.0), Op::d(AX_NU)]),
        ]),
    ]);
    let drift = re_part(&op, &joint.grid)?;
    Ok(&drift + &potential_im_term(joint, v)?.scale(0.5))
}

/// Zero-target evolution check: drift term against minus the potential term.
pub fn evolution_stationarity(joint: &JointDistribution, v: &PolynomialPotential) -> Result<ResidualReport> {
    let drift = match joint.kind {
        RepKind::Symplectic => symplectic_drift_term(joint)?,
        RepKind::Optical => optical_drift_term(joint)?,
    };
    let pot = potential_im_term(joint, v)?.scale(-1.0);
    residual(&format!("evolution right-hand side ({})", joint.kind), joint.kind, &drift, &pot)
}

/// Kinetic operator of the optical joint stationary equation as printed.
///
/// The general form uses the prior's `∂_θP/P` and `∂²_θP/P`; the single-peak
/// form uses the closed coefficients `4(θ−f)/φ²`, `4(θ−f)²/φ⁴ + 2/φ²`.
pub fn optical_stationary_kinetic_op(joint: &JointDistribution, single_peak: bool) -> Result<Op> {
    require_optical(joint)?;
    let p2 = joint.prior.as_gaussian_sum()?;
    let mw2 = joint.params.mass * joint.params.omega * joint.params.omega;
    let hb = joint.params.hbar;
    let m = joint.params.mass;
    let (drift, curvature) = if single_peak {
        let [c] = p2.components() else {
            return Err(Error::InvalidPrior(format!(
                "single-peak form needs one component, got {}",
                p2.components().len()
            )));
        };
        let s = 2.0 / (c.phi * c.phi);
        let drift = Factor::Affine {
            axis: AX_THETA,
            slope: s,
            intercept: -s * c.f,
        };
        let curvature = Factor::Product(vec![drift.clone(), drift.clone()]);
        (drift, Op::sum(vec![Op::mul(curvature), Op::scalar(s, 0.0)]))
    } else {
        let drift = Factor::SumDrift { prior: p2.clone() };
        let curvature = Factor::Curvature {
            prior: joint.prior.clone(),
            var: 0,
        };
        (drift, Op::mul(curvature))
    };
    Ok(Op::sum(vec![
        Op::product(vec![
            Op::scalar(mw2 / 2.0, 0.0),
            Op::mul(cos2()),
            Op::inv(AX_X, 2),
            Op::sum(vec![
                Op::d2(AX_THETA),
                Op::product(vec![Op::scalar(2.0, 0.0), Op::mul(drift.clone()), Op::d(AX_THETA)]),
                curvature,
                Op::scalar(1.0, 0.0),
            ]),
        ]),
        Op::product(vec![
            Op::scalar(-mw2 / 2.0, 0.0),
            Op::mul(Factor::Power { axis: AX_X, power: 1 }),
            Op::inv(AX_X, 1),
            Op::sum(vec![
                Op::mul(cos2()),
                Op::product(vec![
                    Op::mul(Factor::Sin { axis: AX_THETA, freq: 2.0 }),
                    Op::sum(vec![Op::d(AX_THETA), Op::mul(drift)]),
                ]),
            ]),
        ]),
        Op::mul(Factor::Product(vec![
            Factor::Affine {
                axis: AX_X,
                slope: mw2 / 2.0,
                intercept: 0.0,
            },
            Factor::Power { axis: AX_X, power: 1 },
            Factor::Sin { axis: AX_THETA, freq: 1.0 },
            Factor::Sin { axis: AX_THETA, freq: 1.0 },
        ])),
        Op::product(vec![Op::scalar(-hb * hb / (8.0 * m), 0.0), Op::mul(cos2()), Op::d2(AX_X)]),
    ]))
}

/// Stationary-state residual of an optical joint distribution with the
/// printed kinetic operator; the derived `Re([p̂]²/2m)` is compared as a
/// printed-form discrepancy.
pub fn stationary_residual_optical(
    joint: &JointDistribution,
    v: &PolynomialPotential,
    energy: f64,
    single_peak: bool,
) -> Result<ResidualReport> {
    let kinetic = re_part(&optical_stationary_kinetic_op(joint, single_peak)?, &joint.grid)?;
    let pot = potential_re_term(joint, v)?;
    let lhs = joint.grid.zip_with(&pot, |m, vm| energy * m - vm)?;
    let mut report = residual("stationary equation (optical)", RepKind::Optical, &lhs, &kinetic)?;
    let derived = kinetic_re_term(joint)?;
    report.printed_discrepancy = Some(relative_difference(&kinetic, &derived, RepKind::Optical)?);
    Ok(report)
}

/// Max abs difference between the general and single-peak optical kinetic
/// operators applied to the joint.
pub fn optical_single_peak_agreement(joint: &JointDistribution) -> Result<f64> {
    let a = re_part(&optical_stationary_kinetic_op(joint, false)?, &joint.grid)?;
    let b = re_part(&optical_stationary_kinetic_op(joint, true)?, &joint.grid)?;
    Ok((&a - &b).max_abs())
}

/// Joint distribution of the coherent state `α₀e^{−iωt}` under `mω²q²/2`.
pub fn coherent_joint_trajectory(
    alpha0: Complex64,
    t: f64,
    prior: &Prior,
    params: &OscillatorParams,
    x: &Axis,
    param_axes: &[Axis],
) -> Result<JointDistribution> {
    let alpha = alpha0 * Complex64::from_polar(1.0, -params.omega * t);
    let tomo = tomogram_analytic(&StateSpec::coherent(alpha), params, prior.kind(), x, param_axes)?;
    make_joint(&tomo, prior)
}

/// Centered finite difference `(F̃(t+δ) − F̃(t−δ))/2δ` of the coherent trajectory.
pub fn coherent_time_derivative(
    alpha0: Complex64,
    t: f64,
    prior: &Prior,
    params: &OscillatorParams,
    x: &Axis,
    param_axes: &[Axis],
) -> Result<GridFn<f64>> {
    let a = coherent_joint_trajectory(alpha0, t + FD_STEP, prior, params, x, param_axes)?;
    let b = coherent_joint_trajectory(alpha0, t - FD_STEP, prior, params, x, param_axes)?;
    a.grid.lincomb(0.5 / FD_STEP, &b.grid, -0.5 / FD_STEP)
}

/// Evolution right-hand side of either representation.
pub fn evolution_rhs(joint: &JointDistribution, v: &PolynomialPotential) -> Result<GridFn<f64>> {
    match joint.kind {
        RepKind::Symplectic => evolution_rhs_symplectic(joint, v),
        RepKind::Optical => evolution_rhs_optical(joint, v),
    }
}

/// Largest stable RK4 step from a power-iteration estimate of the spectral
/// radius of the right-hand side.
pub fn stability_bound(joint: &JointDistribution, v: &PolynomialPotential, iterations: usize) -> Result<f64> {
    let mut f = joint.grid.map_with_coords(|c, _| {
        let s: f64 = c.iter().enumerate().map(|(i, x)| (i as f64 + 1.3) * x).sum();
        (7.0 * s).sin() * (-c[0] * c[0] / 8.0).exp()
    });
    let mut radius = 0.0;
    for _ in 0..iterations.max(1) {
        let norm = f.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        f = f.scale(1.0 / norm);
        let g = evolution_rhs(&joint.with_grid(f.clone())?, v)?;
        radius = g.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        f = g;
    }
    // RK4 is stable on the imaginary axis up to 2√2
    Ok(2.0 * 2f64.sqrt() / radius.max(RESIDUAL_EPS))
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub joint: JointDistribution,
    pub time: f64,
    pub mass_drift: f64,
    /// Snapshots `(t, values)` every `snapshot_every` steps, initial state first.
    pub snapshots: Vec<(f64, GridFn<f64>)>,
}

/// Classic four-stage Runge-Kutta integration of the evolution equation.
pub fn step_evolution(
    joint: &JointDistribution,
    v: &PolynomialPotential,
    dt: f64,
    steps: usize,
    snapshot_every: Option<usize>,
) -> Result<EvolutionOutcome> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParams(format!("time step {dt}")));
    }
    let horizon = 2.0 * std::f64::consts::PI / joint.params.omega;
    if dt * steps as f64 > horizon * (1.0 + 1e-12) {
        return Err(Error::InvalidParams(format!(
            "integration to t = {} exceeds one period {horizon}",
            dt * steps as f64
        )));
    }
    let mass0 = joint.total_mass();
    let mut state = joint.clone();
    let mut snapshots = vec![(0.0, joint.grid.clone())];
    let rhs = |g: &GridFn<f64>| -> Result<GridFn<f64>> { evolution_rhs(&joint.with_grid(g.clone())?, v) };
    for step in 0..steps {
        let y = &state.grid;
        let k1 = rhs(y)?;
        let k2 = rhs(&y.lincomb(1.0, &k1, dt / 2.0)?)?;
        let k3 = rhs(&y.lincomb(1.0, &k2, dt / 2.0)?)?;
        let k4 = rhs(&y.lincomb(1.0, &k3, dt)?)?;
        let vals: Vec<f64> = (0..y.len())
            .into_par_iter()
            .map(|i| {
                y.values()[i]
                    + dt / 6.0 * (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i])
            })
            .collect();
        let next = GridFn::new(y.axes().to_vec(), vals)?;
        if !next.all_finite() || next.max_abs() > 1e6 * joint.grid.max_abs() {
            return Err(Error::Numeric(format!(
                "evolution blew up at step {} (t = {}); reduce dt below the stability bound",
                step + 1,
                dt * (step + 1) as f64
            )));
        }
        state = state.with_grid(next)?;
        if let Some(k) = snapshot_every {
            if k > 0 && (step + 1) % k == 0 {
                snapshots.push((dt * (step + 1) as f64, state.grid.clone()));
            }
        }
    }
    let mass_drift = (state.total_mass() - mass0).abs();
    Ok(EvolutionOutcome {
        time: dt * steps as f64,
        joint: state,
        mass_drift,
        snapshots,
    })
}

/// Mean of the `X` slice at the given parameter coordinates.
pub fn slice_mean(joint: &JointDistribution, params_point: &[f64]) -> Result<f64> {
    let mut line = joint.grid.clone();
    for &c in params_point {
        line = line.slice_at(1, c)?;
    }
    let mass = integrate_all(&line);
    let first = integrate_all(&line.map_with_coords(|c, v| c[0] * v));
    Ok(first / mass)
}

/// `∂_axis` of a joint grid, exposed for oracle construction in tests.
pub fn grid_derivative(f: &GridFn<f64>, axis: usize) -> Result<GridFn<f64>> {
    derivative(f, axis, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jointdist::GaussianSumPrior;
    use crate::tomography::tomogram_analytic;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    fn sym_axes() -> (Axis, Vec<Axis>) {
        (
            Axis::new(-8.0, 8.0, 161).unwrap(),
            vec![Axis::new(-4.5, 4.5, 97).unwrap(), Axis::new(-4.5, 4.5, 97).unwrap()],
        )
    }

    fn opt_axes() -> (Axis, Vec<Axis>) {
        (Axis::new(-8.0, 8.0, 161).unwrap(), vec![Axis::new(0.0, PI, 181).unwrap()])
    }

    fn joint(spec: &StateSpec, prior: &Prior) -> JointDistribution {
        let (x, pa) = match prior.kind() {
            RepKind::Symplectic => sym_axes(),
            RepKind::Optical => opt_axes(),
        };
        let t = tomogram_analytic(spec, &params(), prior.kind(), &x, &pa).unwrap();
        make_joint(&t, prior).unwrap()
    }

    fn p1() -> Prior {
        Prior::default_for(RepKind::Symplectic)
    }

    fn ho() -> PolynomialPotential {
        PolynomialPotential::harmonic(&params())
    }

    #[test]
    fn potential_parsing_and_cap() {
        let v: PolynomialPotential = "0,0,0.5".parse().unwrap();
        assert_eq!(v, ho());
        assert_eq!(v.value(2.0), 2.0);
        assert!("1,2,3,4,5,6,7,8".parse::<PolynomialPotential>().is_err());
        assert!("a,b".parse::<PolynomialPotential>().is_err());
    }

    #[test]
    fn vacuum_is_stationary() {
        let j = joint(&StateSpec::Fock { n: 0 }, &p1());
        let r = evolution_stationarity(&j, &ho()).unwrap();
        assert!(r.relative < 1e-2, "{}", r.relative);
        let s = stationary_residual_symplectic(&j, &ho(), 0.5, true).unwrap();
        assert!(s.relative < 2e-2, "{}", s.relative);
        assert!(s.printed_discrepancy.unwrap() < 1e-3, "{:?}", s.printed_discrepancy);
        let wrong = stationary_residual_symplectic(&j, &ho(), 0.7, false).unwrap();
        assert!(wrong.relative > 0.2, "{}", wrong.relative);
    }

    #[test]
    fn condition_is_half_the_rhs() {
        let j = joint(&StateSpec::Coherent { re: FRAC_1_SQRT_2, im: 0.0 }, &p1());
        let c = stationarity_condition_value(&j, &ho()).unwrap();
        let r = evolution_rhs_symplectic(&j, &ho()).unwrap();
        assert!((&c.scale(2.0) - &r).max_abs() < 1e-10);
        let rep = stationarity_condition_symplectic(&j, &ho()).unwrap();
        assert!(rep.relative > 0.1, "{}", rep.relative);
    }

    #[test]
    fn coherent_rhs_matches_trajectory() {
        let alpha = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let (x, pa) = sym_axes();
        for t in [0.0, 0.3] {
            let j = coherent_joint_trajectory(alpha, t, &p1(), &params(), &x, &pa).unwrap();
            let rhs = evolution_rhs_symplectic(&j, &ho()).unwrap();
            let fd = coherent_time_derivative(alpha, t, &p1(), &params(), &x, &pa).unwrap();
            let r = residual("evolution", RepKind::Symplectic, &rhs, &fd).unwrap();
            assert!(r.relative < 3e-2, "t={t}: {}", r.relative);
        }
    }

    #[test]
    fn kinetic_im_matches_printed_drift() {
        let j = joint(&StateSpec::Coherent { re: 0.5, im: 0.3 }, &Prior::Symplectic(GaussianPrior::new(0.3, -0.2, 1.1, 0.9).unwrap()));
        let a = kinetic_im_term(&j).unwrap();
        let b = symplectic_drift_term(&j).unwrap();
        assert!(relative_difference(&a, &b, RepKind::Symplectic).unwrap() < 1e-3);
    }

    #[test]
    fn printed_stationary_sign_shows_with_shifted_prior() {
        let prior = Prior::Symplectic(GaussianPrior::new(0.0, 0.5, 1.0, 1.0).unwrap());
        let j = joint(&StateSpec::Fock { n: 0 }, &prior);
        let s = stationary_residual_symplectic(&j, &ho(), 0.5, true).unwrap();
        assert!(s.relative < 2e-2, "{}", s.relative);
        assert!(s.printed_discrepancy.unwrap() > 0.1, "{:?}", s.printed_discrepancy);
    }

    #[test]
    fn trajectory_properties() {
        let alpha = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let (x, pa) = sym_axes();
        let a = coherent_joint_trajectory(alpha, 0.0, &p1(), &params(), &x, &pa).unwrap();
        let b = coherent_joint_trajectory(alpha, 2.0 * PI, &p1(), &params(), &x, &pa).unwrap();
        assert!((&a.grid - &b.grid).max_abs() < 1e-10);
        let c = coherent_joint_trajectory(alpha, PI / 2.0, &p1(), &params(), &x, &pa).unwrap();
        assert!(slice_mean(&c, &[1.0, 0.0]).unwrap().abs() < 1e-10);
        assert!((slice_mean(&a, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn optical_vacuum_and_transport() {
        let prior = Prior::default_for(RepKind::Optical);
        let j = joint(&StateSpec::Fock { n: 0 }, &prior);
        let r = evolution_stationarity(&j, &ho()).unwrap();
        assert!(r.relative < 2e-2, "{}", r.relative);
        let c = joint(&StateSpec::Coherent { re: FRAC_1_SQRT_2, im: 0.0 }, &prior);
        let a = evolution_rhs_optical(&c, &ho()).unwrap();
        let b = evolution_rhs_optical_transported(&c, &ho()).unwrap();
        assert!((&a - &b).max_abs() < 1e-6, "{}", (&a - &b).max_abs());
    }

    #[test]
    fn optical_stationary_single_peak() {
        let prior = Prior::Optical(GaussianSumPrior::single(PI / 2.0, 1.0).unwrap());
        let j = joint(&StateSpec::Fock { n: 0 }, &prior);
        let s = stationary_residual_optical(&j, &ho(), 0.5, true).unwrap();
        assert!(s.relative < 3e-2, "{}", s.relative);
        assert!(optical_single_peak_agreement(&j).unwrap() < 1e-8);
        let two = joint(&StateSpec::Fock { n: 0 }, &Prior::default_for(RepKind::Optical));
        assert!(matches!(
            stationary_residual_optical(&two, &ho(), 0.5, true),
            Err(Error::InvalidPrior(_))
        ));
    }
}
