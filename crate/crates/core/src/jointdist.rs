//! Parameter priors and joint probability distributions.
//!
//! A joint distribution is a tomogram multiplied by a prior over its
//! parameters: `M̃(X, μ, ν) = M(X, μ, ν) P₁(μ, ν)` in the symplectic case and
//! `w̃(X, θ) = w(X, θ) P₂(θ)` in the optical case. Prior derivatives are
//! closed-form throughout.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::gridcalc::{integrate_all, Axis, GridFn};
use crate::states::OscillatorParams;
use crate::tomography::{RepKind, Tomogram};
use crate::{Error, Result};

/// Smallest prior value accepted on a grid.
pub const PRIOR_FLOOR: f64 = 1e-280;
/// Largest total-mass drift accepted when forming a joint distribution.
pub const JOINT_DRIFT: f64 = 1e-2;
/// Tolerance on `Σ Q_k = 1`.
const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Highest derivative order handled by the moment integrals.
pub const MAX_MOMENT_ORDER: usize = 4;

/// Physicists' Hermite polynomial `H_k(u)`.
pub fn hermite(k: usize, u: f64) -> f64 {
    let (mut a, mut b) = (1.0, 2.0 * u);
    if k == 0 {
        return a;
    }
    for j in 1..k {
        (a, b) = (b, 2.0 * u * b - 2.0 * j as f64 * a);
    }
    b
}

/// `P₁(μ, ν) = exp(−(μ−μ₀)²/ξ² − (ν−ν₀)²/ζ²) / (π ξ ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPrior {
    pub mu0: f64,
    pub nu0: f64,
    pub xi: f64,
    pub zeta: f64,
}

impl Default for GaussianPrior {
    fn default() -> Self {
        Self {
            mu0: 0.0,
            nu0: 0.0,
            xi: 1.0,
            zeta: 1.0,
        }
    }
}

impl GaussianPrior {
    pub fn new(mu0: f64, nu0: f64, xi: f64, zeta: f64) -> Result<Self> {
        let p = Self { mu0, nu0, xi, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu0.is_finite() && self.nu0.is_finite()) {
            return Err(Error::InvalidPrior("non-finite centre".into()));
        }
        if !(self.xi.is_finite() && self.xi > 0.0 && self.zeta.is_finite() && self.zeta > 0.0) {
            return Err(Error::InvalidPrior(format!(
                "widths must be positive, got xi={}, zeta={}",
                self.xi, self.zeta
            )));
        }
        Ok(())
    }

    pub fn value(&self, mu: f64, nu: f64) -> f64 {
        let u = (mu - self.mu0) / self.xi;
        let v = (nu - self.nu0) / self.zeta;
        (-u * u - v * v).exp() / (PI * self.xi * self.zeta)
    }

    /// `(∂ᵏ_μ ∂ˡ_ν P₁)/P₁ = (−1)^{k+l} ξ^{−k} ζ^{−l} H_k(u) H_l(v)`.
    pub fn derivative_ratio(&self, k: usize, l: usize, mu: f64, nu: f64) -> f64 {
        let u = (mu - self.mu0) / self.xi;
        let v = (nu - self.nu0) / self.zeta;
        let sign = if (k + l).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * hermite(k, u) * hermite(l, v) / (self.xi.powi(k as i32) * self.zeta.powi(l as i32))
    }

    /// `∂ᵏ_μ ∂ˡ_ν P₁`.
    pub fn derivative(&self, k: usize, l: usize, mu: f64, nu: f64) -> f64 {
        self.derivative_ratio(k, l, mu, nu) * self.value(mu, nu)
    }

    /// Axes `centre ± span·width` with `count` points, wide enough for moment quadrature.
    pub fn adapted_axes(&self, span: f64, count: usize) -> Result<(Axis, Axis)> {
        Ok((
            Axis::new(self.mu0 - span * self.xi, self.mu0 + span * self.xi, count)?,
            Axis::new(self.nu0 - span * self.zeta, self.nu0 + span * self.zeta, count)?,
        ))
    }
}

/// One truncated Gaussian `𝒩 exp(−(θ−f)²/φ²)` on `[0, π]` with weight `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumComponent {
    pub q: f64,
    pub f: f64,
    pub phi: f64,
}

/// `P₂(θ) = Σ Q_k 𝒩_k exp(−(θ−f_k)²/φ_k²)` on `[0, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SumComponent>", into = "Vec<SumComponent>")]
pub struct GaussianSumPrior {
    components: Vec<SumComponent>,
    norms: Vec<f64>,
}

impl TryFrom<Vec<SumComponent>> for GaussianSumPrior {
    type Error = Error;
    fn try_from(c: Vec<SumComponent>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<GaussianSumPrior> for Vec<SumComponent> {
    fn from(p: GaussianSumPrior) -> Self {
        p.components
    }
}

impl Default for GaussianSumPrior {
    fn default() -> Self {
        Self::new(vec![
            SumComponent { q: 0.6, f: PI / 3.0, phi: 0.7 },
            SumComponent { q: 0.4, f: 2.0 * PI / 3.0, phi: 0.9 },
        ])
        .expect("valid default prior")
    }
}

impl GaussianSumPrior {
    pub fn new(components: Vec<SumComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidPrior("no components".into()));
        }
        for c in &components {
            if !(c.q.is_finite() && c.q > 0.0) {
                return Err(Error::InvalidPrior(format!("weight {} must be positive", c.q)));
            }
            if !(c.phi.is_finite() && c.phi > 0.0) {
                return Err(Error::InvalidPrior(format!("width {} must be positive", c.phi)));
            }
            if !(0.0..=PI).contains(&c.f) {
                return Err(Error::InvalidPrior(format!("centre {} lies outside [0, π]", c.f)));
            }
        }
        let total: f64 = components.iter().map(|c| c.q).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidPrior(format!("weights sum to {total}, not 1")));
        }
        let norms = components
            .iter()
            .map(|c| {
                let mass = 0.5 * c.phi * PI.sqrt() * (erf((PI - c.f) / c.phi) - erf(-c.f / c.phi));
                1.0 / mass
            })
            .collect();
        Ok(Self { components, norms })
    }

    pub fn single(f: f64, phi: f64) -> Result<Self> {
        Self::new(vec![SumComponent { q: 1.0, f, phi }])
    }

    pub fn components(&self) -> &[SumComponent] {
        &self.components
    }

    /// Normalizers `𝒩_k` making each component integrate to 1 over `[0, π]`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    fn terms(&self, theta: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.components.iter().zip(&self.norms).map(move |(c, n)| {
            let d = theta - c.f;
            (c.q * n * (-d * d / (c.phi * c.phi)).exp(), d, c.phi)
        })
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.terms(theta).map(|t| t.0).sum()
    }

    /// `∂_θ P₂ = Σ Q 𝒩 (−2(θ−f)/φ²) e`.
    pub fn first_derivative(&self, theta: f64) -> f64 {
        self.terms(theta).map(|(e, d, p)| -2.0 * d / (p * p) * e).sum()
    }

    /// `∂²_θ P₂ = Σ Q 𝒩 (4(θ−f)²/φ⁴ − 2/φ²) e`.
    pub fn second_derivative(&self, theta: f64) -> f64 {
        self.terms(theta)
            .map(|(e, d, p)| {
                let p2 = p * p;
                (4.0 * d * d / (p2 * p2) - 2.0 / p2) * e
            })
            .sum()
    }
}

/// A prior over the tomographic parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "snake_case")]
pub enum Prior {
    Symplectic(GaussianPrior),
    Optical(GaussianSumPrior),
    /// The constant prior `P ≡ 1`; improper, used for operator-algebra checks only.
    Flat { rep: RepKind },
}

impl Prior {
    pub fn kind(&self) -> RepKind {
        match self {
            Self::Symplectic(_) => RepKind::Symplectic,
            Self::Optical(_) => RepKind::Optical,
            Self::Flat { rep } => *rep,
        }
    }

    pub fn param_count(&self) -> usize {
        match self.kind() {
            RepKind::Symplectic => 2,
            RepKind::Optical => 1,
        }
    }

    pub fn value(&self, c: &[f64]) -> f64 {
        match self {
            Self::Symplectic(p) => p.value(c[0], c[1]),
            Self::Optical(p) => p.value(c[0]),
            Self::Flat { .. } => 1.0,
        }
    }

    /// `(∂P/∂c_var)/P`; `var` indexes the parameters.
    pub fn log_derivative(&self, var: usize, c: &[f64]) -> f64 {
        match self {
            Self::Symplectic(p) => match var {
                0 => p.derivative_ratio(1, 0, c[0], c[1]),
                _ => p.derivative_ratio(0, 1, c[0], c[1]),
            },
            Self::Optical(p) => p.first_derivative(c[0]) / p.value(c[0]),
            Self::Flat { .. } => 0.0,
        }
    }

    /// `(∂²P/∂c_var²)/P`.
    pub fn second_ratio(&self, var: usize, c: &[f64]) -> f64 {
        match self {
            Self::Symplectic(p) => match var {
                0 => p.derivative_ratio(2, 0, c[0], c[1]),
                _ => p.derivative_ratio(0, 2, c[0], c[1]),
            },
            Self::Optical(p) => p.second_derivative(c[0]) / p.value(c[0]),
            Self::Flat { .. } => 0.0,
        }
    }

    pub fn as_gaussian(&self) -> Result<&GaussianPrior> {
        match self {
            Self::Symplectic(p) => Ok(p),
            _ => Err(Error::RepresentationMismatch("a symplectic Gaussian prior is required".into())),
        }
    }

    pub fn as_gaussian_sum(&self) -> Result<&GaussianSumPrior> {
        match self {
            Self::Optical(p) => Ok(p),
            _ => Err(Error::RepresentationMismatch("an optical Gaussian-sum prior is required".into())),
        }
    }

    pub fn default_for(kind: RepKind) -> Self {
        match kind {
            RepKind::Symplectic => Self::Symplectic(GaussianPrior::default()),
            RepKind::Optical => Self::Optical(GaussianSumPrior::default()),
        }
    }
}

impl fmt::Display for Prior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Symplectic(p) => write!(f, "p1:mu0={},nu0={},xi={},zeta={}", p.mu0, p.nu0, p.xi, p.zeta),
            Self::Optical(p) => {
                let list = serde_json::to_string(&p.components).map_err(|_| fmt::Error)?;
                write!(f, "p2:{list}")
            }
            Self::Flat { rep } => write!(f, "flat:{rep}"),
        }
    }
}

impl FromStr for Prior {
    type Err = Error;

    /// `p1:mu0=0,nu0=0,xi=1,zeta=1`, `p1-default`, `p2-default`,
    /// `p2:[{q:0.6,f:1.05,phi:0.7},...]` (keys may be quoted or bare).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "p1" | "p1-default" => return Ok(Self::default_for(RepKind::Symplectic)),
            "p2" | "p2-default" => return Ok(Self::default_for(RepKind::Optical)),
            "flat:symplectic" => return Ok(Self::Flat { rep: RepKind::Symplectic }),
            "flat:optical" => return Ok(Self::Flat { rep: RepKind::Optical }),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("p1:") {
            let mut p = GaussianPrior::default();
            for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{v}` for `{k}`")))?;
                match k.trim() {
                    "mu0" => p.mu0 = v,
                    "nu0" => p.nu0 = v,
                    "xi" => p.xi = v,
                    "zeta" => p.zeta = v,
                    other => return Err(Error::Parse(format!("unknown P1 key `{other}`"))),
                }
            }
            p.validate()?;
            return Ok(Self::Symplectic(p));
        }
        if let Some(rest) = s.strip_prefix("p2:") {
            let mut quoted = rest.to_string();
            for key in ["phi", "q", "f"] {
                quoted = quoted
                    .replace(&format!("{{{key}:"), &format!("{{\"{key}\":"))
                    .replace(&format!(",{key}:"), &format!(",\"{key}\":"))
                    .replace(&format!(", {key}:"), &format!(", \"{key}\":"));
            }
            let comps: Vec<SumComponent> =
                serde_json::from_str(&quoted).map_err(|e| Error::Parse(format!("P2 component list: {e}")))?;
            return Ok(Self::Optical(GaussianSumPrior::new(comps)?));
        }
        Err(Error::Parse(format!("unknown prior spec `{s}`")))
    }
}

/// `P` tabulated on the parameter axes.
pub fn prior_eval(prior: &Prior, axes: &[Axis]) -> Result<GridFn<f64>> {
    check_param_axes(prior, axes)?;
    let g = GridFn::from_fn(axes.to_vec(), |c| prior.value(c));
    check_floor(&g)?;
    Ok(g)
}

/// `(∂P/∂var)/P` tabulated on the parameter axes.
pub fn prior_log_derivative(prior: &Prior, var: usize, axes: &[Axis]) -> Result<GridFn<f64>> {
    if var >= prior.param_count() {
        return Err(Error::AxisOutOfRange {
            index: var,
            dims: prior.param_count(),
        });
    }
    prior_eval(prior, axes)?;
    Ok(GridFn::from_fn(axes.to_vec(), |c| prior.log_derivative(var, c)))
}

fn check_param_axes(prior: &Prior, axes: &[Axis]) -> Result<()> {
    if axes.len() != prior.param_count() {
        return Err(Error::ShapeMismatch(format!(
            "{} parameter axes for a {} prior",
            axes.len(),
            prior.kind()
        )));
    }
    if prior.kind() == RepKind::Optical {
        let th = axes[0];
        for v in [th.min, th.max] {
            if !(-1e-12..=PI + 1e-12).contains(&v) {
                return Err(Error::PhaseOutOfRange(v));
            }
        }
    }
    Ok(())
}

fn check_floor(p: &GridFn<f64>) -> Result<()> {
    let min = p.values().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= PRIOR_FLOOR) {
        return Err(Error::PriorUnderflow(min));
    }
    Ok(())
}

/// A tomogram multiplied by its prior.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    pub kind: RepKind,
    pub grid: GridFn<f64>,
    pub prior: Prior,
    pub params: OscillatorParams,
    /// Bookkeeping carried over from the tomogram.
    pub renormalized: Vec<usize>,
    pub origin: Option<usize>,
}

impl JointDistribution {
    pub fn x_axis(&self) -> &Axis {
        &self.grid.axes()[0]
    }

    pub fn param_axes(&self) -> &[Axis] {
        &self.grid.axes()[1..]
    }

    pub fn total_mass(&self) -> f64 {
        integrate_all(&self.grid)
    }

    /// Same prior and bookkeeping, different values.
    pub fn with_grid(&self, grid: GridFn<f64>) -> Result<Self> {
        self.grid.check_same_grid(&grid)?;
        Ok(Self { grid, ..self.clone() })
    }
}

/// Multiplies every `X` line of `values` by the parameter function `p`.
fn scale_lines(values: &GridFn<f64>, p: &GridFn<f64>, divide: bool) -> GridFn<f64> {
    let ns = p.len();
    let pv = p.values();
    let out = values
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if divide { v / pv[i % ns] } else { v * pv[i % ns] })
        .collect();
    GridFn::new(values.axes().to_vec(), out).expect("same layout")
}

/// `M̃ = M · P` (or `w̃ = w · P`), with the total mass checked.
pub fn make_joint(tomogram: &Tomogram, prior: &Prior) -> Result<JointDistribution> {
    if prior.kind() != tomogram.kind {
        return Err(Error::RepresentationMismatch(format!(
            "{} prior with a {} tomogram",
            prior.kind(),
            tomogram.kind
        )));
    }
    if matches!(prior, Prior::Flat { .. }) {
        return Err(Error::Unsupported("the flat prior is improper".into()));
    }
    let p = prior_eval(prior, tomogram.param_axes())?;
    let grid = scale_lines(&tomogram.grid, &p, false);
    let joint = JointDistribution {
        kind: tomogram.kind,
        grid,
        prior: prior.clone(),
        params: tomogram.params,
        renormalized: tomogram.renormalized.clone(),
        origin: tomogram.origin,
    };
    let drift = (joint.total_mass() - 1.0).abs();
    if !(drift <= JOINT_DRIFT) {
        return Err(Error::Normalization {
            drift,
            limit: JOINT_DRIFT,
            context: "joint distribution total mass".into(),
        });
    }
    Ok(joint)
}

/// Divides the prior back out: `M = M̃ / P`.
pub fn recover_conditional(joint: &JointDistribution) -> Result<Tomogram> {
    let p = prior_eval(&joint.prior, joint.param_axes())?;
    Ok(Tomogram {
        kind: joint.kind,
        grid: scale_lines(&joint.grid, &p, true),
        params: joint.params,
        renormalized: joint.renormalized.clone(),
        origin: joint.origin,
        warnings: Vec::new(),
    })
}

/// `∫ μᵃ νᵇ ∂ᵏ_μ ∂ˡ_ν P₁ dμ dν` by trapezoid quadrature of the closed-form derivative.
pub fn moment_integral(
    prior: &GaussianPrior,
    powers: (i32, i32),
    orders: (usize, usize),
    mu: &Axis,
    nu: &Axis,
) -> Result<f64> {
    prior.validate()?;
    let (k, l) = orders;
    if k.max(l) > MAX_MOMENT_ORDER {
        return Err(Error::DegreeCap {
            degree: k.max(l),
            cap: MAX_MOMENT_ORDER,
        });
    }
    let g = GridFn::from_fn(vec![*mu, *nu], |c| {
        c[0].powi(powers.0) * c[1].powi(powers.1) * prior.derivative(k, l, c[0], c[1])
    });
    Ok(integrate_all(&g))
}

/// `∫ μᵏ νˡ ∂ᵏ_μ ∂ˡ_ν P₁ dμ dν`, which equals `(−1)^{k+l} k! l!`.
pub fn prior_moment_integral(prior: &GaussianPrior, k: usize, l: usize, mu: &Axis, nu: &Axis) -> Result<f64> {
    moment_integral(prior, (k as i32, l as i32), (k, l), mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcalc::{derivative, GridSet};
    use crate::states::{wigner_analytic, StateSpec};
    use crate::tomography::tomogram_analytic;

    #[test]
    fn p1_default_peak() {
        let p = Prior::default_for(RepKind::Symplectic);
        assert!((p.value(&[0.0, 0.0]) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(p.log_derivative(0, &[1.0, 0.3]), -2.0);
    }

    #[test]
    fn p1_integrates_to_one() {
        let g = GridSet::default();
        let p = prior_eval(&Prior::default_for(RepKind::Symplectic), &[g.mu, g.nu]).unwrap();
        assert!((integrate_all(&p) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn wide_single_component_is_nearly_uniform() {
        let p = Prior::Optical(GaussianSumPrior::single(PI / 2.0, 10.0).unwrap());
        let th = GridSet::default().theta;
        let v = prior_eval(&p, &[th]).unwrap();
        assert!(v.values().iter().all(|x| (x - 1.0 / PI).abs() < 2e-2));
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mk = |a: f64, b: f64| {
            GaussianSumPrior::new(vec![
                SumComponent { q: a, f: 1.0, phi: 0.5 },
                SumComponent { q: b, f: 2.0, phi: 0.5 },
            ])
        };
        assert!(mk(0.7, 0.3).is_ok());
        assert!(mk(0.7, 0.4).is_err());
        assert!(GaussianSumPrior::single(1.0, 0.0).is_err());
        assert!(GaussianSumPrior::single(4.0, 1.0).is_err());
        assert!(GaussianPrior::new(0.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn p2_mass_and_positivity() {
        let th = Axis::new(0.0, PI, 2001).unwrap();
        let p = prior_eval(&Prior::default_for(RepKind::Optical), &[th]).unwrap();
        assert!((integrate_all(&p) - 1.0).abs() < 1e-6);
        assert!(p.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn p2_out_of_range_phase() {
        let th = Axis::new(0.0, 4.0, 11).unwrap();
        assert!(matches!(
            prior_eval(&Prior::default_for(RepKind::Optical), &[th]),
            Err(Error::PhaseOutOfRange(_))
        ));
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let g = GridSet::default();
        for prior in [
            Prior::Symplectic(GaussianPrior::new(0.4, -0.2, 1.3, 0.8).unwrap()),
            Prior::default_for(RepKind::Optical),
        ] {
            let axes: Vec<Axis> = match prior.kind() {
                RepKind::Symplectic => vec![g.mu, g.nu],
                RepKind::Optical => vec![g.theta],
            };
            let p = prior_eval(&prior, &axes).unwrap();
            for var in 0..axes.len() {
                let fd = derivative(&p, var, 1).unwrap();
                let ld = prior_log_derivative(&prior, var, &axes).unwrap();
                let scale = p.max_abs();
                let err = fd.zip_with(&p, |d, _| d / scale)
                    .unwrap()
                    .zip_with(&ld.zip_with(&p, |l, v| l * v / scale).unwrap(), |a, b| a - b)
                    .unwrap()
                    .max_abs();
                assert!(err < 1e-6, "{prior} var {var}: {err}");
            }
        }
    }

    #[test]
    fn single_peak_log_derivative_is_linear() {
        let p = Prior::Optical(GaussianSumPrior::single(1.2, 0.8).unwrap());
        for th in [0.1, 1.2, 2.9] {
            let want = -2.0 * (th - 1.2) / 0.64;
            assert!((p.log_derivative(0, &[th]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn underflow_is_reported() {
        let p = Prior::Symplectic(GaussianPrior::new(0.0, 0.0, 0.1, 0.1).unwrap());
        let g = GridSet::default();
        assert!(matches!(prior_eval(&p, &[g.mu, g.nu]), Err(Error::PriorUnderflow(_))));
    }

    fn vacuum_joint() -> JointDistribution {
        let g = GridSet::default();
        let s = StateSpec::Fock { n: 0 };
        let t = tomogram_analytic(&s, &OscillatorParams::default(), RepKind::Symplectic, &g.x, &[g.mu, g.nu]).unwrap();
        make_joint(&t, &Prior::default_for(RepKind::Symplectic)).unwrap()
    }

    #[test]
    fn joint_mass_and_value() {
        let j = vacuum_joint();
        assert!((j.total_mass() - 1.0).abs() < 1e-3);
        // μ = 1 is not a node of the default axis; use the nearest one.
        let g = GridSet::default();
        let mu_i = g.mu.nearest_index(1.0);
        let mu = g.mu.point(mu_i);
        let want = (1.0 / (PI * mu * mu).sqrt()) * (-mu * mu).exp() / PI;
        assert!((j.grid.get(&[80, mu_i, 48]) - want).abs() < 1e-10);
    }

    #[test]
    fn bayes_round_trip() {
        let g = GridSet::default();
        let s = StateSpec::Coherent { re: 0.3, im: -0.2 };
        let t = tomogram_analytic(&s, &OscillatorParams::default(), RepKind::Symplectic, &g.x, &[g.mu, g.nu]).unwrap();
        let prior = Prior::Symplectic(GaussianPrior::new(0.5, -0.5, 0.75, 1.5).unwrap());
        let back = recover_conditional(&make_joint(&t, &prior).unwrap()).unwrap();
        let err = t.grid.zip_with(&back.grid, |a, b| (a - b).abs() / a.abs().max(1e-300)).unwrap();
        assert!(err.values().iter().all(|&e| e < 1e-12));
        assert!(back.slice_masses().values().iter().all(|m| (m - 1.0).abs() < 1e-3));
    }

    #[test]
    fn representation_mismatch_rejected() {
        let g = GridSet::default();
        let w = wigner_analytic(&StateSpec::Fock { n: 0 }, &OscillatorParams::default(), &g.q, &g.p).unwrap();
        let t = crate::tomography::optical_tomogram(&w, &g.x, &g.theta).unwrap();
        assert!(matches!(
            make_joint(&t, &Prior::default_for(RepKind::Symplectic)),
            Err(Error::RepresentationMismatch(_))
        ));
    }

    #[test]
    fn moment_identity_examples() {
        let g = GridSet::default();
        let p = GaussianPrior::new(0.0, 0.0, 0.6, 0.6).unwrap();
        assert!((prior_moment_integral(&p, 1, 0, &g.mu, &g.nu).unwrap() + 1.0).abs() < 1e-10);
        assert!((prior_moment_integral(&p, 2, 1, &g.mu, &g.nu).unwrap() + 2.0).abs() < 1e-10);
        assert!(moment_integral(&p, (0, 0), (1, 0), &g.mu, &g.nu).unwrap().abs() < 1e-8);
        assert!(prior_moment_integral(&p, 5, 0, &g.mu, &g.nu).is_err());
    }

    #[test]
    fn parse_priors() {
        let p: Prior = "p1:mu0=0.5,nu0=0,xi=1,zeta=2".parse().unwrap();
        assert_eq!(p, Prior::Symplectic(GaussianPrior::new(0.5, 0.0, 1.0, 2.0).unwrap()));
        let q: Prior = "p2:[{q:0.7,f:1.0,phi:0.5},{\"q\":0.3,\"f\":2.0,\"phi\":0.6}]".parse().unwrap();
        assert_eq!(q.as_gaussian_sum().unwrap().components().len(), 2);
        assert_eq!(q.to_string().parse::<Prior>().unwrap(), q);
        assert_eq!("p2-default".parse::<Prior>().unwrap(), Prior::default_for(RepKind::Optical));
        assert!("p1:xi=0".parse::<Prior>().is_err());
        assert!("p3".parse::<Prior>().is_err());
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<Prior>(&json).unwrap(), q);
    }
}
