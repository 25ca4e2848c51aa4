//! Operator expressions on complex grid functions and correspondence rules.
//!
//! Operators act on functions over `(X, μ, ν)` or `(X, θ)`: axis 0 is always
//! the quadrature `X`, the remaining axes are the tomographic parameters. An
//! [`OperatorExpr`] is a plain tree of primitives, so printed rules and rules
//! obtained by conjugation with a prior can be compared either structurally or
//! by applying both to test functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gridcalc::{derivative, inverse_derivative, GridFn};
use crate::jointdist::{GaussianSumPrior, Prior};
use crate::states::OscillatorParams;
use crate::tomography::RepKind;
use crate::{Complex64, Error, Result, Warning};

/// Axis of the quadrature variable.
pub const AX_X: usize = 0;
/// Symplectic `μ`.
pub const AX_MU: usize = 1;
/// Symplectic `ν`.
pub const AX_NU: usize = 2;
/// Optical `θ`.
pub const AX_THETA: usize = 1;

/// Highest polynomial degree accepted by [`polynomial_of_operator`].
pub const MAX_POLY_DEGREE: usize = 6;

/// A real multiplicative factor, closed-form in the grid coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    /// `x_axis^power`.
    Power { axis: usize, power: i32 },
    /// `slope·x_axis + intercept`.
    Affine { axis: usize, slope: f64, intercept: f64 },
    /// `cos(freq·x_axis)`.
    Cos { axis: usize, freq: f64 },
    /// `sin(freq·x_axis)`.
    Sin { axis: usize, freq: f64 },
    /// `P^power` at the parameter coordinates.
    PriorPower { prior: Prior, power: i32 },
    /// `−(∂P/∂c_var)/P`.
    NegLogDerivative { prior: Prior, var: usize },
    /// `2((∂P/∂c_var)/P)² − (∂²P/∂c_var²)/P`, the zeroth-order term of `P∂²P⁻¹`.
    Curvature { prior: Prior, var: usize },
    /// `2P₂⁻¹ Σ_k Q_k (θ−f_k)/φ_k² 𝒫_k(θ)` in the printed form.
    SumDrift { prior: GaussianSumPrior },
    Product(Vec<Factor>),
}

impl Factor {
    pub fn eval(&self, c: &[f64]) -> f64 {
        match self {
            Self::Power { axis, power } => c[*axis].powi(*power),
            Self::Affine { axis, slope, intercept } => slope * c[*axis] + intercept,
            Self::Cos { axis, freq } => (freq * c[*axis]).cos(),
            Self::Sin { axis, freq } => (freq * c[*axis]).sin(),
            Self::PriorPower { prior, power } => prior.value(&c[1..]).powi(*power),
            Self::NegLogDerivative { prior, var } => -prior.log_derivative(*var, &c[1..]),
            Self::Curvature { prior, var } => {
                let l = prior.log_derivative(*var, &c[1..]);
                2.0 * l * l - prior.second_ratio(*var, &c[1..])
            }
            Self::SumDrift { prior } => {
                let th = c[AX_THETA];
                let s: f64 = prior
                    .components()
                    .iter()
                    .zip(prior.norms())
                    .map(|(k, n)| {
                        let d = th - k.f;
                        k.q * d / (k.phi * k.phi) * n * (-d * d / (k.phi * k.phi)).exp()
                    })
                    .sum();
                2.0 * s / prior.value(th)
            }
            Self::Product(fs) => fs.iter().map(|f| f.eval(c)).product(),
        }
    }

    fn max_axis(&self) -> usize {
        match self {
            Self::Power { axis, .. } | Self::Affine { axis, .. } | Self::Cos { axis, .. } | Self::Sin { axis, .. } => *axis,
            Self::PriorPower { prior, .. } | Self::NegLogDerivative { prior, .. } | Self::Curvature { prior, .. } => {
                prior.param_count()
            }
            Self::SumDrift { .. } => AX_THETA,
            Self::Product(fs) => fs.iter().map(Self::max_axis).max().unwrap_or(0),
        }
    }

    fn render(&self, names: &[&str]) -> String {
        let n = |a: usize| names.get(a).copied().unwrap_or("?");
        match self {
            Self::Power { axis, power: 1 } => n(*axis).to_string(),
            Self::Power { axis, power } => format!("{}^{power}", n(*axis)),
            Self::Affine { axis, slope, intercept } => {
                if *intercept == 0.0 {
                    format!("{slope}{}", n(*axis))
                } else {
                    format!("({slope}{} {} {})", n(*axis), if *intercept < 0.0 { "-" } else { "+" }, intercept.abs())
                }
            }
            Self::Cos { axis, freq } if *freq == 1.0 => format!("cos{}", n(*axis)),
            Self::Cos { axis, freq } => format!("cos({freq}{})", n(*axis)),
            Self::Sin { axis, freq } if *freq == 1.0 => format!("sin{}", n(*axis)),
            Self::Sin { axis, freq } => format!("sin({freq}{})", n(*axis)),
            Self::PriorPower { power, .. } => format!("P^{power}"),
            Self::NegLogDerivative { var, .. } => format!("(-∂_{}P/P)", n(var + 1)),
            Self::Curvature { var, .. } => {
                let v = n(var + 1);
                format!("(2(∂_{v}P/P)² - ∂²_{v}P/P)")
            }
            Self::SumDrift { .. } => "2P⁻¹ΣQ(θ-f)/φ²𝒫".to_string(),
            Self::Product(fs) => fs.iter().map(|f| f.render(names)).collect::<Vec<_>>().join("·"),
        }
    }
}

/// A linear operator on complex grid functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OperatorExpr {
    Identity,
    Scalar { value: Complex64 },
    Multiply { factor: Factor },
    Derivative { axis: usize, order: usize },
    InverseDerivative { axis: usize, n: usize },
    Sum { terms: Vec<OperatorExpr> },
    /// Composition; the rightmost operator acts first.
    Product { factors: Vec<OperatorExpr> },
}

impl OperatorExpr {
    pub fn scalar(re: f64, im: f64) -> Self {
        Self::Scalar {
            value: Complex64::new(re, im),
        }
    }

    pub fn mul(factor: Factor) -> Self {
        Self::Multiply { factor }
    }

    pub fn d(axis: usize) -> Self {
        Self::Derivative { axis, order: 1 }
    }

    pub fn d2(axis: usize) -> Self {
        Self::Derivative { axis, order: 2 }
    }

    pub fn inv(axis: usize, n: usize) -> Self {
        Self::InverseDerivative { axis, n }
    }

    pub fn sum(terms: Vec<OperatorExpr>) -> Self {
        Self::Sum { terms }
    }

    pub fn product(factors: Vec<OperatorExpr>) -> Self {
        Self::Product { factors }
    }

    /// `self ∘ other`.
    pub fn then_after(self, other: OperatorExpr) -> Self {
        Self::product(vec![self, other])
    }

    /// `c · self`.
    pub fn scaled(self, c: Complex64) -> Self {
        Self::product(vec![Self::Scalar { value: c }, self])
    }

    /// Highest axis index referenced.
    pub fn max_axis(&self) -> usize {
        match self {
            Self::Identity | Self::Scalar { .. } => 0,
            Self::Multiply { factor } => factor.max_axis(),
            Self::Derivative { axis, .. } | Self::InverseDerivative { axis, .. } => *axis,
            Self::Sum { terms: xs } | Self::Product { factors: xs } => xs.iter().map(Self::max_axis).max().unwrap_or(0),
        }
    }

    /// Applies the operator; complex output even for real-valued input.
    pub fn apply(&self, f: &GridFn<Complex64>) -> Result<GridFn<Complex64>> {
        let mut w = Vec::new();
        self.apply_with_warnings(f, &mut w)
    }

    pub fn apply_real(&self, f: &GridFn<f64>) -> Result<GridFn<Complex64>> {
        self.apply(&f.to_complex())
    }

    /// Like [`apply`](Self::apply), collecting inverse-derivative decay warnings.
    pub fn apply_with_warnings(&self, f: &GridFn<Complex64>, warnings: &mut Vec<Warning>) -> Result<GridFn<Complex64>> {
        let top = self.max_axis();
        if top >= f.ndim() {
            return Err(Error::AxisOutOfRange {
                index: top,
                dims: f.ndim(),
            });
        }
        self.eval(f, warnings)
    }

    fn eval(&self, f: &GridFn<Complex64>, warnings: &mut Vec<Warning>) -> Result<GridFn<Complex64>> {
        match self {
            Self::Identity => Ok(f.clone()),
            Self::Scalar { value } => {
                let c = *value;
                Ok(f.map(|v| v * c))
            }
            Self::Multiply { factor } => Ok(f.map_with_coords(|c, v| v * factor.eval(c))),
            Self::Derivative { axis, order } => derivative(f, *axis, *order),
            Self::InverseDerivative { axis, n } => {
                let r = inverse_derivative(f, *axis, *n)?;
                warnings.extend(r.warning);
                Ok(r.value)
            }
            Self::Sum { terms } => {
                let mut it = terms.iter();
                let Some(first) = it.next() else {
                    return Ok(f.map(|_| Complex64::default()));
                };
                let mut acc = first.eval(f, warnings)?;
                for t in it {
                    let g = t.eval(f, warnings)?;
                    acc.values_mut().iter_mut().zip(g.values()).for_each(|(a, b)| *a += b);
                }
                Ok(acc)
            }
            Self::Product { factors } => {
                let mut g = f.clone();
                for op in factors.iter().rev() {
                    g = op.eval(&g, warnings)?;
                }
                Ok(g)
            }
        }
    }

    /// Human-readable form with the given axis names.
    pub fn render(&self, names: &[&str]) -> String {
        let n = |a: usize| names.get(a).copied().unwrap_or("?");
        match self {
            Self::Identity => "1".into(),
            Self::Scalar { value } => format_complex(*value),
            Self::Multiply { factor } => factor.render(names),
            Self::Derivative { axis, order: 1 } => format!("∂_{}", n(*axis)),
            Self::Derivative { axis, order } => format!("∂^{order}_{}", n(*axis)),
            Self::InverseDerivative { axis, n: k } => format!("∂_{}^-{k}", n(*axis)),
            Self::Sum { terms } => format!(
                "({})",
                terms.iter().map(|t| t.render(names)).collect::<Vec<_>>().join(" + ")
            ),
            Self::Product { factors } => factors.iter().map(|t| t.render(names)).collect::<Vec<_>>().join(" "),
        }
    }
}

fn format_complex(z: Complex64) -> String {
    match (z.re, z.im) {
        (r, 0.0) => format!("{r}"),
        (0.0, i) => format!("{i}i"),
        (r, i) => format!("({r}{}{}i)", if i < 0.0 { "-" } else { "+" }, i.abs()),
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = if self.max_axis() >= 2 { ["X", "μ", "ν"] } else { ["X", "θ", "?"] };
        f.write_str(&self.render(&names))
    }
}

/// Where an operator acts: tomogram or joint distribution, symplectic or optical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "prior", rename_all = "snake_case")]
pub enum RepTag {
    SymplecticTomogram,
    SymplecticJoint(Prior),
    OpticalTomogram,
    OpticalJoint(Prior),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub tag: RepTag,
    pub params: OscillatorParams,
}

impl Representation {
    pub fn new(tag: RepTag, params: OscillatorParams) -> Result<Self> {
        params.validate()?;
        match &tag {
            RepTag::SymplecticJoint(p) if p.kind() != RepKind::Symplectic => {
                return Err(Error::RepresentationMismatch("symplectic joint tag with an optical prior".into()))
            }
            RepTag::OpticalJoint(p) if p.kind() != RepKind::Optical => {
                return Err(Error::RepresentationMismatch("optical joint tag with a symplectic prior".into()))
            }
            _ => {}
        }
        Ok(Self { tag, params })
    }

    pub fn symplectic_joint(prior: Prior, params: OscillatorParams) -> Result<Self> {
        Self::new(RepTag::SymplecticJoint(prior), params)
    }

    pub fn optical_joint(prior: Prior, params: OscillatorParams) -> Result<Self> {
        Self::new(RepTag::OpticalJoint(prior), params)
    }

    pub fn kind(&self) -> RepKind {
        match self.tag {
            RepTag::SymplecticTomogram | RepTag::SymplecticJoint(_) => RepKind::Symplectic,
            RepTag::OpticalTomogram | RepTag::OpticalJoint(_) => RepKind::Optical,
        }
    }

    pub fn prior(&self) -> Option<&Prior> {
        match &self.tag {
            RepTag::SymplecticJoint(p) | RepTag::OpticalJoint(p) => Some(p),
            _ => None,
        }
    }

    /// The tomographic representation underlying a joint one.
    pub fn tomographic(&self) -> Self {
        let tag = match self.kind() {
            RepKind::Symplectic => RepTag::SymplecticTomogram,
            RepKind::Optical => RepTag::OpticalTomogram,
        };
        Self { tag, params: self.params }
    }
}

use OperatorExpr as Op;

fn i_times(c: f64) -> Op {
    Op::scalar(0.0, c)
}

/// `2(c − c₀)/w²` as an affine factor on `axis`.
fn gaussian_drift(axis: usize, c0: f64, w: f64) -> Factor {
    Factor::Affine {
        axis,
        slope: 2.0 / (w * w),
        intercept: -2.0 * c0 / (w * w),
    }
}

fn x_times(f: Factor) -> Factor {
    Factor::Product(vec![Factor::Power { axis: AX_X, power: 1 }, f])
}

/// Position operator exactly as printed for each representation.
pub fn position_operator(rep: &Representation) -> Result<OperatorExpr> {
    let hb = rep.params.hbar;
    let mw = rep.params.m_omega();
    Ok(match &rep.tag {
        RepTag::SymplecticTomogram => Op::sum(vec![
            Op::product(vec![Op::scalar(-1.0, 0.0), Op::d(AX_MU), Op::inv(AX_X, 1)]),
            Op::product(vec![i_times(hb / 2.0), Op::mul(Factor::Power { axis: AX_NU, power: 1 }), Op::d(AX_X)]),
        ]),
        RepTag::SymplecticJoint(prior) => {
            let g = prior.as_gaussian()?;
            Op::sum(vec![
                Op::product(vec![
                    Op::scalar(-1.0, 0.0),
                    Op::sum(vec![Op::mul(gaussian_drift(AX_MU, g.mu0, g.xi)), Op::d(AX_MU)]),
                    Op::inv(AX_X, 1),
                ]),
                Op::product(vec![i_times(hb / 2.0), Op::mul(Factor::Power { axis: AX_NU, power: 1 }), Op::d(AX_X)]),
            ])
        }
        RepTag::OpticalTomogram => optical_q(hb, mw, Op::d(AX_THETA)),
        RepTag::OpticalJoint(prior) => {
            let p2 = prior.as_gaussian_sum()?.clone();
            optical_q(hb, mw, Op::sum(vec![Op::mul(Factor::SumDrift { prior: p2 }), Op::d(AX_THETA)]))
        }
    })
}

fn optical_q(hb: f64, mw: f64, d_theta: Op) -> Op {
    let sin = Factor::Sin { axis: AX_THETA, freq: 1.0 };
    let cos = Factor::Cos { axis: AX_THETA, freq: 1.0 };
    Op::sum(vec![
        Op::product(vec![Op::mul(sin.clone()), Op::inv(AX_X, 1), d_theta]),
        Op::mul(x_times(cos)),
        Op::product(vec![i_times(hb / (2.0 * mw)), Op::mul(sin), Op::d(AX_X)]),
    ])
}

fn optical_p(hb: f64, mw: f64, d_theta: Op) -> Op {
    let sin = Factor::Sin { axis: AX_THETA, freq: 1.0 };
    let cos = Factor::Cos { axis: AX_THETA, freq: 1.0 };
    Op::sum(vec![
        Op::product(vec![
            Op::scalar(mw, 0.0),
            Op::sum(vec![
                Op::product(vec![Op::scalar(-1.0, 0.0), Op::mul(cos.clone()), Op::inv(AX_X, 1), d_theta]),
                Op::mul(x_times(sin)),
            ]),
        ]),
        Op::product(vec![i_times(-hb / 2.0), Op::mul(cos), Op::d(AX_X)]),
    ])
}

/// Momentum operator as printed, with the `μ∂_X` term of the symplectic
/// joint rule carrying the sign of the tomographic rule (`−iħμ/2`).
pub fn momentum_operator(rep: &Representation) -> Result<OperatorExpr> {
    let hb = rep.params.hbar;
    let mw = rep.params.m_omega();
    Ok(match &rep.tag {
        RepTag::SymplecticTomogram => Op::sum(vec![
            Op::product(vec![Op::scalar(-1.0, 0.0), Op::d(AX_NU), Op::inv(AX_X, 1)]),
            Op::product(vec![i_times(-hb / 2.0), Op::mul(Factor::Power { axis: AX_MU, power: 1 }), Op::d(AX_X)]),
        ]),
        RepTag::SymplecticJoint(prior) => {
            let g = prior.as_gaussian()?;
            Op::sum(vec![
                Op::product(vec![
                    Op::scalar(-1.0, 0.0),
                    Op::sum(vec![Op::mul(gaussian_drift(AX_NU, g.nu0, g.zeta)), Op::d(AX_NU)]),
                    Op::inv(AX_X, 1),
                ]),
                Op::product(vec![i_times(-hb / 2.0), Op::mul(Factor::Power { axis: AX_MU, power: 1 }), Op::d(AX_X)]),
            ])
        }
        RepTag::OpticalTomogram => optical_p(hb, mw, Op::d(AX_THETA)),
        RepTag::OpticalJoint(prior) => {
            let p2 = prior.as_gaussian_sum()?.clone();
            optical_p(hb, mw, Op::sum(vec![Op::mul(Factor::SumDrift { prior: p2 }), Op::d(AX_THETA)]))
        }
    })
}

/// Momentum rule of the symplectic joint representation with the `+iħμ/2`
/// sign exactly as printed; kept to quantify the sign discrepancy.
pub fn momentum_operator_printed_sign(rep: &Representation) -> Result<OperatorExpr> {
    let RepTag::SymplecticJoint(prior) = &rep.tag else {
        return Err(Error::Unsupported("printed-sign momentum rule exists for the symplectic joint tag only".into()));
    };
    let g = prior.as_gaussian()?;
    let hb = rep.params.hbar;
    Ok(Op::sum(vec![
        Op::product(vec![
            Op::scalar(-1.0, 0.0),
            Op::sum(vec![Op::mul(gaussian_drift(AX_NU, g.nu0, g.zeta)), Op::d(AX_NU)]),
            Op::inv(AX_X, 1),
        ]),
        Op::product(vec![i_times(hb / 2.0), Op::mul(Factor::Power { axis: AX_MU, power: 1 }), Op::d(AX_X)]),
    ]))
}

/// Joint-representation rule obtained as `P · [Â]_tomographic · P⁻¹`.
fn derived(rep: &Representation, tomographic: fn(&Representation) -> Result<OperatorExpr>) -> Result<OperatorExpr> {
    let base = tomographic(&rep.tomographic())?;
    match rep.prior() {
        Some(p) => conjugate_by_prior(&base, p),
        None => Ok(base),
    }
}

pub fn position_operator_derived(rep: &Representation) -> Result<OperatorExpr> {
    derived(rep, position_operator)
}

pub fn momentum_operator_derived(rep: &Representation) -> Result<OperatorExpr> {
    derived(rep, momentum_operator)
}

/// `[â]`, `[â†]` as printed (symplectic representations only).
pub fn ladder_operators(rep: &Representation) -> Result<(OperatorExpr, OperatorExpr)> {
    let hb = rep.params.hbar;
    let mw = rep.params.m_omega();
    let c = (mw / (2.0 * hb)).sqrt();
    let build = |sign: f64, extra: Option<(Factor, Factor)>| {
        let x_part = Op::product(vec![
            Op::scalar(hb / 2.0, 0.0),
            Op::d(AX_X),
            Op::sum(vec![
                Op::mul(Factor::Affine { axis: AX_MU, slope: sign / mw, intercept: 0.0 }),
                Op::product(vec![i_times(1.0), Op::mul(Factor::Power { axis: AX_NU, power: 1 })]),
            ]),
        ]);
        let mut inner = vec![
            Op::d(AX_MU),
            Op::product(vec![i_times(sign / mw), Op::d(AX_NU)]),
        ];
        if let Some((fm, fn_)) = extra {
            inner.push(Op::mul(fm));
            inner.push(Op::product(vec![i_times(sign / mw), Op::mul(fn_)]));
        }
        let inv_part = Op::product(vec![Op::scalar(-1.0, 0.0), Op::inv(AX_X, 1), Op::sum(inner)]);
        Op::product(vec![Op::scalar(c, 0.0), Op::sum(vec![x_part, inv_part])])
    };
    match &rep.tag {
        RepTag::SymplecticTomogram => Ok((build(1.0, None), build(-1.0, None))),
        RepTag::SymplecticJoint(prior) => {
            let g = prior.as_gaussian()?;
            let drifts = || (gaussian_drift(AX_MU, g.mu0, g.xi), gaussian_drift(AX_NU, g.nu0, g.zeta));
            Ok((build(1.0, Some(drifts())), build(-1.0, Some(drifts()))))
        }
        _ => Err(Error::Unsupported("ladder operators are given for symplectic representations only".into())),
    }
}

/// `√(mω/2ħ)([q̂] ± i[p̂]/(mω))` from the derived position and momentum rules.
pub fn ladder_from_qp(rep: &Representation) -> Result<(OperatorExpr, OperatorExpr)> {
    if rep.kind() != RepKind::Symplectic {
        return Err(Error::Unsupported("ladder operators are given for symplectic representations only".into()));
    }
    let mw = rep.params.m_omega();
    let c = (mw / (2.0 * rep.params.hbar)).sqrt();
    let q = position_operator_derived(rep)?;
    let p = momentum_operator_derived(rep)?;
    let combo = |s: f64| {
        Op::product(vec![
            Op::scalar(c, 0.0),
            Op::sum(vec![q.clone(), Op::product(vec![i_times(s / mw), p.clone()])]),
        ])
    };
    Ok((combo(1.0), combo(-1.0)))
}

/// `[â†][â]`.
pub fn number_operator(rep: &Representation) -> Result<OperatorExpr> {
    let (a, ad) = ladder_operators(rep)?;
    Ok(ad.then_after(a))
}

/// Closed-form `−(∂P)/P` factor for parameter `var`; `None` for the flat prior.
fn neg_log_derivative_factor(prior: &Prior, var: usize) -> Option<Factor> {
    match prior {
        Prior::Symplectic(g) => Some(if var == 0 {
            gaussian_drift(AX_MU, g.mu0, g.xi)
        } else {
            gaussian_drift(AX_NU, g.nu0, g.zeta)
        }),
        Prior::Optical(p2) => Some(Factor::SumDrift { prior: p2.clone() }),
        Prior::Flat { .. } => None,
    }
}

/// Rewrites `P · op · P⁻¹` using `P∂P⁻¹ = ∂ − (∂P)/P` and
/// `P∂²P⁻¹ = ∂² − 2((∂P)/P)∂ + 2((∂P)/P)² − (∂²P)/P`.
pub fn conjugate_by_prior(op: &OperatorExpr, prior: &Prior) -> Result<OperatorExpr> {
    let params = prior.param_count();
    let var_of = |axis: usize| -> Result<Option<usize>> {
        if axis == AX_X {
            Ok(None)
        } else if axis <= params {
            Ok(Some(axis - 1))
        } else {
            Err(Error::Unsupported(format!(
                "axis {axis} is not a parameter of a {} prior",
                prior.kind()
            )))
        }
    };
    let flat = matches!(prior, Prior::Flat { .. });
    Ok(match op {
        Op::Identity | Op::Scalar { .. } | Op::Multiply { .. } => op.clone(),
        Op::Derivative { axis, order } => match var_of(*axis)? {
            None => op.clone(),
            Some(_) if flat => op.clone(),
            Some(var) => {
                let drift = neg_log_derivative_factor(prior, var).expect("non-flat prior");
                match order {
                    1 => Op::sum(vec![Op::mul(drift), Op::d(*axis)]),
                    2 => Op::sum(vec![
                        Op::d2(*axis),
                        Op::product(vec![Op::scalar(2.0, 0.0), Op::mul(drift), Op::d(*axis)]),
                        Op::mul(Factor::Curvature { prior: prior.clone(), var }),
                    ]),
                    _ => return Err(Error::Unsupported(format!("conjugation of ∂^{order}"))),
                }
            }
        },
        Op::InverseDerivative { axis, .. } => match var_of(*axis)? {
            None => op.clone(),
            Some(_) if flat => op.clone(),
            Some(_) => Op::product(vec![
                Op::mul(Factor::PriorPower { prior: prior.clone(), power: 1 }),
                op.clone(),
                Op::mul(Factor::PriorPower { prior: prior.clone(), power: -1 }),
            ]),
        },
        Op::Sum { terms } => Op::sum(terms.iter().map(|t| conjugate_by_prior(t, prior)).collect::<Result<_>>()?),
        Op::Product { factors } => {
            Op::product(factors.iter().map(|t| conjugate_by_prior(t, prior)).collect::<Result<_>>()?)
        }
    })
}

/// `Σ c_k opᵏ` in Horner form: `c₀ + op(c₁ + op(c₂ + …))`.
pub fn polynomial_of_operator(op: &OperatorExpr, coefficients: &[f64]) -> Result<OperatorExpr> {
    let degree = coefficients.len().saturating_sub(1);
    if degree > MAX_POLY_DEGREE {
        return Err(Error::DegreeCap {
            degree,
            cap: MAX_POLY_DEGREE,
        });
    }
    let Some((&last, rest)) = coefficients.split_last() else {
        return Ok(Op::scalar(0.0, 0.0));
    };
    let mut acc = Op::scalar(last, 0.0);
    for &c in rest.iter().rev() {
        acc = Op::sum(vec![Op::scalar(c, 0.0), op.clone().then_after(acc)]);
    }
    Ok(acc)
}

/// Max over the interior of `|(A∘B − B∘A) f − f|`, the commutator defect.
pub fn commutator_defect(a: &OperatorExpr, b: &OperatorExpr, f: &GridFn<Complex64>, margin: f64) -> Result<f64> {
    let ab = a.apply(&b.apply(f)?)?;
    let ba = b.apply(&a.apply(f)?)?;
    let mask = interior_mask(f, margin);
    Ok(ab
        .values()
        .iter()
        .zip(ba.values())
        .zip(f.values())
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(((x, y), z), _)| (x - y - z).norm())
        .fold(0.0, f64::max))
}

/// `true` at grid points at least `margin` (fraction of the axis length) away
/// from both ends of every axis.
pub fn interior_mask<T: crate::Scalar>(f: &GridFn<T>, margin: f64) -> Vec<bool> {
    let lims: Vec<(usize, usize)> = f
        .axes()
        .iter()
        .map(|a| {
            let k = (margin * (a.count - 1) as f64).round() as usize;
            (k, a.count - 1 - k)
        })
        .collect();
    (0..f.len())
        .map(|i| {
            f.unravel(i)
                .iter()
                .zip(&lims)
                .all(|(&j, &(lo, hi))| j >= lo && j <= hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcalc::Axis;
    use crate::jointdist::GaussianPrior;
    use std::f64::consts::PI;

    fn sym_axes() -> Vec<Axis> {
        vec![
            Axis::new(-8.0, 8.0, 161).unwrap(),
            Axis::new(-3.0, 3.0, 49).unwrap(),
            Axis::new(-3.0, 3.0, 49).unwrap(),
        ]
    }

    fn test_fn(axes: Vec<Axis>) -> GridFn<Complex64> {
        GridFn::from_fn(axes, |c| {
            let g = (-(c[0] - 0.2).powi(2) / 1.5).exp();
            let r: f64 = c[1..].iter().map(|v| v * v).sum();
            Complex64::new(g * (-r / 4.0).exp() * (1.0 + 0.3 * c[1]), 0.1 * g * c[1..].iter().sum::<f64>().cos())
        })
    }

    fn joint_rep() -> Representation {
        Representation::symplectic_joint(Prior::default_for(RepKind::Symplectic), OscillatorParams::default()).unwrap()
    }

    #[test]
    fn conjugated_position_rule_is_the_printed_tree() {
        let rep = joint_rep();
        assert_eq!(position_operator_derived(&rep).unwrap(), position_operator(&rep).unwrap());
        assert_eq!(momentum_operator_derived(&rep).unwrap(), momentum_operator(&rep).unwrap());
        let opt = Representation::optical_joint(Prior::default_for(RepKind::Optical), OscillatorParams::default()).unwrap();
        assert_eq!(position_operator_derived(&opt).unwrap(), position_operator(&opt).unwrap());
        assert_eq!(momentum_operator_derived(&opt).unwrap(), momentum_operator(&opt).unwrap());
    }

    #[test]
    fn printed_position_rule_renders() {
        let s = position_operator(&joint_rep()).unwrap().to_string();
        assert!(s.contains("∂_μ") && s.contains("∂_X^-1") && s.contains("0.5i"), "{s}");
    }

    #[test]
    fn flat_prior_conjugation_is_identity() {
        let q = position_operator(&Representation::new(RepTag::SymplecticTomogram, OscillatorParams::default()).unwrap()).unwrap();
        let flat = Prior::Flat { rep: RepKind::Symplectic };
        assert_eq!(conjugate_by_prior(&q, &flat).unwrap(), q);
    }

    #[test]
    fn conjugated_inverse_derivative_is_a_sandwich() {
        let prior = Prior::Symplectic(GaussianPrior::new(0.3, 0.0, 1.2, 1.0).unwrap());
        let op = Op::inv(AX_MU, 1);
        let f = test_fn(sym_axes());
        let p = f.map_with_coords(|c, _| prior.value(&c[1..]));
        let direct = conjugate_by_prior(&op, &prior).unwrap().apply(&f).unwrap();
        let manual = op.apply(&f.zip_with(&p, |v, pv| v / pv).unwrap()).unwrap().zip_with(&p, |v, pv| v * pv).unwrap();
        assert!((&direct - &manual).max_abs() < 1e-12);
    }

    #[test]
    fn second_derivative_conjugation_single_peak() {
        let th = Axis::new(0.0, PI, 181).unwrap();
        let x = Axis::new(-6.0, 6.0, 61).unwrap();
        let prior = Prior::Optical(GaussianSumPrior::single(PI / 2.0, 1.0).unwrap());
        let f = GridFn::from_fn(vec![x, th], |c| Complex64::new((-c[0] * c[0]).exp() * (2.0 * c[1]).sin(), 0.0));
        let conj = conjugate_by_prior(&Op::d2(AX_THETA), &prior).unwrap().apply(&f).unwrap();
        // ∂² + (4(θ−f)/φ²)∂ + 4(θ−f)²/φ⁴ + 2/φ² for f = π/2, φ = 1
        let d1 = Op::d(AX_THETA).apply(&f).unwrap();
        let d2 = Op::d2(AX_THETA).apply(&f).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..f.len() {
            let t = f.coords(i)[1] - PI / 2.0;
            let want = d2.values()[i] + d1.values()[i] * (4.0 * t) + f.values()[i] * (4.0 * t * t + 2.0);
            err = err.max((conj.values()[i] - want).norm());
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn commutator_is_identity() {
        let rep = joint_rep();
        let (a, ad) = ladder_operators(&rep).unwrap();
        let d = commutator_defect(&a, &ad, &test_fn(sym_axes()), 0.1).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn printed_ladder_matches_qp_combination() {
        let rep = Representation::symplectic_joint(
            Prior::Symplectic(GaussianPrior::new(0.2, -0.4, 0.9, 1.3).unwrap()),
            OscillatorParams::new(1.3, 0.8, 1.1).unwrap(),
        )
        .unwrap();
        let (a, ad) = ladder_operators(&rep).unwrap();
        let (a2, ad2) = ladder_from_qp(&rep).unwrap();
        let f = test_fn(sym_axes());
        assert!((&a.apply(&f).unwrap() - &a2.apply(&f).unwrap()).max_abs() < 1e-10);
        assert!((&ad.apply(&f).unwrap() - &ad2.apply(&f).unwrap()).max_abs() < 1e-10);
    }

    #[test]
    fn optical_ladder_unsupported() {
        let opt = Representation::optical_joint(Prior::default_for(RepKind::Optical), OscillatorParams::default()).unwrap();
        assert!(matches!(ladder_operators(&opt), Err(Error::Unsupported(_))));
    }

    #[test]
    fn polynomial_forms() {
        let f = test_fn(sym_axes());
        let q = position_operator(&joint_rep()).unwrap();
        let c = polynomial_of_operator(&q, &[2.5]).unwrap();
        assert!((&c.apply(&f).unwrap() - &f.map(|v| v * 2.5)).max_abs() < 1e-15);
        let sq = polynomial_of_operator(&q, &[0.0, 0.0, 1.0]).unwrap().apply(&f).unwrap();
        let twice = q.apply(&q.apply(&f).unwrap()).unwrap();
        assert!((&sq - &twice).max_abs() < 1e-12);
        assert!(polynomial_of_operator(&q, &[1.0; 8]).is_err());
    }

    #[test]
    fn scalar_i_gives_imaginary_output() {
        let f = GridFn::from_fn(vec![Axis::new(0.0, 1.0, 11).unwrap()], |c| c[0]);
        let g = Op::scalar(0.0, 1.0).apply_real(&f).unwrap();
        assert_eq!(g.re().max_abs(), 0.0);
        assert!(Op::Identity.apply_real(&f).unwrap().re() == f);
    }

    #[test]
    fn axis_mismatch_is_an_error() {
        let f = GridFn::from_fn(vec![Axis::new(0.0, 1.0, 11).unwrap()], |_| Complex64::new(1.0, 0.0));
        assert!(matches!(Op::d(AX_NU).apply(&f), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn nu_independent_input_keeps_only_the_nu_dx_imaginary_term() {
        let axes = sym_axes();
        let f = GridFn::from_fn(axes, |c| Complex64::new((-(c[0] * c[0]) - 0.5 * c[1] * c[1]).exp(), 0.0));
        let rep = joint_rep();
        let q = position_operator(&rep).unwrap().apply(&f).unwrap();
        let term = Op::product(vec![i_times(0.5), Op::mul(Factor::Power { axis: AX_NU, power: 1 }), Op::d(AX_X)])
            .apply(&f)
            .unwrap();
        assert!((&q.im() - &term.im()).max_abs() < 1e-12);
        assert!(q.re().max_abs() > 1e-3);
    }
}
