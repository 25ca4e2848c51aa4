//! Dual symbols of observables and expectation values `⟨Â⟩ = ∫ F⁽ᵈ⁾_Â F̃`.
//!
//! Regular symbols are smooth functions evaluated on the full joint grid.
//! Singular symbols are sums of delta-supported terms; pairing slices the
//! joint at the support by interpolation and never samples a delta.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gridcalc::{derivative, integrate_all, GridFn};
use crate::jointdist::{GaussianPrior, JointDistribution, Prior};
use crate::states::OscillatorParams;
use crate::tomography::RepKind;
use crate::{Complex64, Error, Result};

/// Highest `k + l` accepted by [`monomial_regular_symbol`].
pub const MAX_MONOMIAL_ORDER: usize = 4;

/// Observables with closed-form symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolName {
    One,
    Q,
    P,
    Q2,
    P2,
    /// `q̂p̂`.
    Qp,
    /// `p̂q̂`, the opposite ordering of [`Qp`](Self::Qp).
    Pq,
    /// `â†â`.
    N,
}

impl SymbolName {
    pub const ALL: [SymbolName; 8] = [
        Self::One,
        Self::Q,
        Self::P,
        Self::Q2,
        Self::P2,
        Self::Qp,
        Self::Pq,
        Self::N,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "one",
            Self::Q => "q",
            Self::P => "p",
            Self::Q2 => "q2",
            Self::P2 => "p2",
            Self::Qp => "qp",
            Self::Pq => "pq",
            Self::N => "n",
        }
    }
}

impl fmt::Display for SymbolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymbolName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "one" | "1" | "identity" => Self::One,
            "q" => Self::Q,
            "p" => Self::P,
            "q2" | "qn(2)" => Self::Q2,
            "p2" | "pn(2)" => Self::P2,
            "qp" => Self::Qp,
            "pq" => Self::Pq,
            "n" | "number" | "adag_a" => Self::N,
            other => return Err(Error::UnknownSymbol(other.to_string())),
        })
    }
}

/// Closed-form regular symbols, kept as data so that symbols can be cloned,
/// compared and serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RegularForm {
    /// Gaussian-prior symbols in `(X, μ, ν)`.
    Symplectic { name: SymbolName, prior: GaussianPrior },
    /// Optical symbols `w⁽ᵈ⁾/P` in `(X, θ)`, valid for any positive prior.
    Optical { name: SymbolName, prior: Prior },
    /// Exponentially weighted alternative `q̂²` (`q = true`) or `p̂²` symbol.
    Alternative { q: bool, prior: GaussianPrior },
    /// `(−1)^{k+l} X^{k+l}/(k+l)! · ∂ᵏ_μ∂ˡ_ν P / P`.
    Monomial { k: usize, l: usize, prior: GaussianPrior },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSymbol {
    pub label: String,
    pub kind: RepKind,
    pub form: RegularForm,
    pub params: OscillatorParams,
    /// Added verbatim to the pairing (the `iħ/2` of ordered products).
    pub constant: Complex64,
}

impl RegularSymbol {
    /// Real part of the symbol at grid coordinates `(X, params…)`; the
    /// imaginary part is the constant.
    pub fn eval(&self, c: &[f64]) -> f64 {
        let x = c[0];
        let mw = self.params.m_omega();
        let hb = self.params.hbar;
        match &self.form {
            RegularForm::Symplectic { name, prior: g } => {
                let (u, v) = (c[1] - g.mu0, c[2] - g.nu0);
                let (xi2, ze2) = (g.xi * g.xi, g.zeta * g.zeta);
                let q2 = x * x / (xi2 * xi2) * (2.0 * u * u - xi2);
                let p2 = x * x / (ze2 * ze2) * (2.0 * v * v - ze2);
                match name {
                    SymbolName::One => 1.0,
                    SymbolName::Q => 2.0 * u * x / xi2,
                    SymbolName::P => 2.0 * v * x / ze2,
                    SymbolName::Q2 => q2,
                    SymbolName::P2 => p2,
                    SymbolName::Qp | SymbolName::Pq => 2.0 * x * x * u * v / (xi2 * ze2),
                    SymbolName::N => 0.5 * mw / hb * (q2 + p2 / (mw * mw)),
                }
            }
            RegularForm::Optical { name, prior } => {
                let th = c[1];
                let pi_p = std::f64::consts::PI * prior.value(&c[1..]);
                match name {
                    SymbolName::One => 1.0,
                    SymbolName::Q => 2.0 * x * th.cos() / pi_p,
                    SymbolName::P => 2.0 * mw * x * th.sin() / pi_p,
                    SymbolName::Q2 => x * x * (1.0 + 2.0 * (2.0 * th).cos()) / pi_p,
                    SymbolName::P2 => x * x * mw * mw * (1.0 - 2.0 * (2.0 * th).cos()) / pi_p,
                    SymbolName::Qp | SymbolName::Pq => 2.0 * mw * x * x * (2.0 * th).sin() / pi_p,
                    SymbolName::N => mw * x * x / (hb * pi_p),
                }
            }
            RegularForm::Alternative { q, prior: g } => {
                let (mu, nu) = (c[1], c[2]);
                let (xi2, ze2) = (g.xi * g.xi, g.zeta * g.zeta);
                let shift = (-g.mu0 * (2.0 * mu - g.mu0) / xi2 - g.nu0 * (2.0 * nu - g.nu0) / ze2).exp();
                let poly = if *q {
                    x * x / (2.0 * xi2) * (3.0 * mu * mu / xi2 - nu * nu / ze2)
                } else {
                    x * x / (2.0 * ze2) * (3.0 * nu * nu / ze2 - mu * mu / xi2)
                };
                poly * shift
            }
            RegularForm::Monomial { k, l, prior } => {
                let order = k + l;
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                let fact: f64 = (1..=order).map(|i| i as f64).product();
                sign * x.powi(order as i32) / fact * prior.derivative_ratio(*k, *l, c[1], c[2])
            }
        }
    }

    /// The symbol sampled on a grid, constant included.
    pub fn sample(&self, axes: &[crate::Axis]) -> GridFn<Complex64> {
        GridFn::from_fn(axes.to_vec(), |c| Complex64::new(self.eval(c), 0.0) + self.constant)
    }
}

/// `iħ/2` for `q̂p̂`, `−iħ/2` for `p̂q̂`, `−1/2` for `â†â`.
fn ordering_constant(name: SymbolName, params: &OscillatorParams) -> Complex64 {
    match name {
        SymbolName::Qp => Complex64::new(0.0, params.hbar / 2.0),
        SymbolName::Pq => Complex64::new(0.0, -params.hbar / 2.0),
        SymbolName::N => Complex64::new(-0.5, 0.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Regular dual symbol of `name` for the given representation and prior.
pub fn regular_symbol(
    name: SymbolName,
    kind: RepKind,
    prior: &Prior,
    params: &OscillatorParams,
) -> Result<RegularSymbol> {
    params.validate()?;
    if prior.kind() != kind {
        return Err(Error::RepresentationMismatch(format!("{} prior for {kind} symbols", prior.kind())));
    }
    let form = match prior {
        Prior::Symplectic(g) => RegularForm::Symplectic { name, prior: *g },
        Prior::Optical(_) => RegularForm::Optical {
            name,
            prior: prior.clone(),
        },
        Prior::Flat { .. } => return Err(Error::InvalidPrior("regular symbols need a normalizable prior".into())),
    };
    Ok(RegularSymbol {
        label: format!("regular {name}"),
        kind,
        form,
        params: *params,
        constant: ordering_constant(name, params),
    })
}

/// The alternative `q̂²` and `p̂²` symbols carrying an exponential weight.
pub fn alternative_regular_symbols_q2_p2(
    prior: &GaussianPrior,
    params: &OscillatorParams,
) -> Result<(RegularSymbol, RegularSymbol)> {
    prior.validate()?;
    params.validate()?;
    let make = |q: bool| RegularSymbol {
        label: format!("alternative {}", if q { "q2" } else { "p2" }),
        kind: RepKind::Symplectic,
        form: RegularForm::Alternative { q, prior: *prior },
        params: *params,
        constant: Complex64::new(0.0, 0.0),
    };
    Ok((make(true), make(false)))
}

/// Symbol of the symmetrized phase-space moment `∫ qᵏ pˡ W dq dp`.
///
/// This is the Weyl-ordered moment; operator-ordered products differ by
/// commutator terms such as the `iħ/2` of `q̂p̂`.
pub fn monomial_regular_symbol(
    k: usize,
    l: usize,
    prior: &GaussianPrior,
    params: &OscillatorParams,
) -> Result<RegularSymbol> {
    prior.validate()?;
    if k + l > MAX_MONOMIAL_ORDER {
        return Err(Error::DegreeCap {
            degree: k + l,
            cap: MAX_MONOMIAL_ORDER,
        });
    }
    Ok(RegularSymbol {
        label: format!("monomial q^{k} p^{l}"),
        kind: RepKind::Symplectic,
        form: RegularForm::Monomial { k, l, prior: *prior },
        params: *params,
        constant: Complex64::new(0.0, 0.0),
    })
}

/// `coefficient · Xⁿ e^{i·phase·X} · δ⁽ᵃ⁾(μ − μ*) δ⁽ᵇ⁾(ν − ν*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularTerm {
    pub coefficient: Complex64,
    pub x_power: u32,
    pub x_phase: f64,
    /// `(μ*, ν*)`.
    pub support: [f64; 2],
    /// Orders `(a, b)` of the delta derivatives, at most 2 each.
    pub derivative: [usize; 2],
}

impl SingularTerm {
    fn plain(coefficient: f64, x_power: u32, support: [f64; 2]) -> Self {
        Self {
            coefficient: Complex64::new(coefficient, 0.0),
            x_power,
            x_phase: 0.0,
            support,
            derivative: [0, 0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSymbol {
    pub label: String,
    pub terms: Vec<SingularTerm>,
}

impl SingularSymbol {
    fn scaled(mut self, c: f64) -> Self {
        self.terms.iter_mut().for_each(|t| t.coefficient *= c);
        self
    }
}

/// Which singular symbol to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "n", rename_all = "snake_case")]
pub enum SingularName {
    One,
    Q,
    P,
    Qp,
    Pq,
    Qn(u32),
    Pn(u32),
    Number,
}

impl FromStr for SingularName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let power = |rest: &str| -> Result<u32> {
            rest.trim_start_matches('(')
                .trim_end_matches(')')
                .parse()
                .map_err(|_| Error::UnknownSymbol(s.to_string()))
        };
        Ok(match t.as_str() {
            "one" | "1" | "identity" => Self::One,
            "q" => Self::Q,
            "p" => Self::P,
            "qp" => Self::Qp,
            "pq" => Self::Pq,
            "q2" => Self::Qn(2),
            "p2" => Self::Pn(2),
            "n" | "number" => Self::Number,
            _ if t.starts_with("qn") => Self::Qn(power(&t[2..])?),
            _ if t.starts_with("pn") => Self::Pn(power(&t[2..])?),
            _ => return Err(Error::UnknownSymbol(s.to_string())),
        })
    }
}

impl From<SymbolName> for SingularName {
    fn from(n: SymbolName) -> Self {
        match n {
            SymbolName::One => Self::One,
            SymbolName::Q => Self::Q,
            SymbolName::P => Self::P,
            SymbolName::Q2 => Self::Qn(2),
            SymbolName::P2 => Self::Pn(2),
            SymbolName::Qp => Self::Qp,
            SymbolName::Pq => Self::Pq,
            SymbolName::N => Self::Number,
        }
    }
}

/// Singular (delta-supported) dual symbols of the Gaussian-prior joint
/// representation.
///
/// The identity symbol uses the exponent `μ₀²/ξ² + ν₀²/ζ²` and the ordering
/// term of `q̂p̂` carries `iħ/2`, matching the regular symbols.
pub fn singular_symbol(name: SingularName, prior: &GaussianPrior, params: &OscillatorParams) -> Result<SingularSymbol> {
    prior.validate()?;
    params.validate()?;
    let g = prior;
    let pi = std::f64::consts::PI;
    let (xi, ze) = (g.xi, g.zeta);
    let e_mu0 = g.mu0 * g.mu0 / (xi * xi);
    let e_nu0 = g.nu0 * g.nu0 / (ze * ze);
    let e_mu = (xi - g.mu0).powi(2) / (xi * xi);
    let e_nu = (ze - g.nu0).powi(2) / (ze * ze);
    let origin = [0.0, 0.0];
    let one = || SingularTerm::plain(pi * xi * ze * (e_mu0 + e_nu0).exp(), 0, origin);
    let qn = |n: u32| SingularTerm::plain(pi * ze / xi.powi(n as i32 - 1) * (e_mu + e_nu0).exp(), n, [xi, 0.0]);
    let pn = |n: u32| SingularTerm::plain(pi * xi / ze.powi(n as i32 - 1) * (e_mu0 + e_nu).exp(), n, [0.0, ze]);
    let ordered = |sign: f64| {
        let mut c = one();
        c.coefficient = Complex64::new(0.0, sign * params.hbar / 2.0) * c.coefficient;
        vec![
            SingularTerm::plain(pi / 2.0 * (e_mu + e_nu).exp(), 2, [xi, ze]),
            SingularTerm::plain(-pi / 2.0 * (e_mu + e_nu0).exp(), 2, [xi, 0.0]),
            SingularTerm::plain(-pi / 2.0 * (e_mu0 + e_nu).exp(), 2, [0.0, ze]),
            c,
        ]
    };
    let (label, terms) = match name {
        SingularName::One => ("one".to_string(), vec![one()]),
        SingularName::Q => ("q".into(), vec![qn(1)]),
        SingularName::P => ("p".into(), vec![pn(1)]),
        SingularName::Qn(n) | SingularName::Pn(n) if n == 0 => ("one".into(), vec![one()]),
        SingularName::Qn(n) => (format!("q^{n}"), vec![qn(n)]),
        SingularName::Pn(n) => (format!("p^{n}"), vec![pn(n)]),
        SingularName::Qp => ("qp".into(), ordered(1.0)),
        SingularName::Pq => ("pq".into(), ordered(-1.0)),
        SingularName::Number => {
            let mw = params.m_omega();
            let hb = params.hbar;
            let q2 = SingularSymbol { label: String::new(), terms: vec![qn(2)] }.scaled(0.5 * mw / hb);
            let p2 = SingularSymbol { label: String::new(), terms: vec![pn(2)] }.scaled(0.5 / (hb * mw));
            let id = SingularSymbol { label: String::new(), terms: vec![one()] }.scaled(-0.5);
            ("number".into(), [q2.terms, p2.terms, id.terms].concat())
        }
    };
    Ok(SingularSymbol {
        label: format!("singular {label}"),
        terms,
    })
}

/// A dual symbol of either form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Symbol {
    Regular(RegularSymbol),
    Singular(SingularSymbol),
}

/// `⟨Â⟩ = ∫ symbol · joint` over all variables.
pub fn pair(symbol: &Symbol, joint: &JointDistribution) -> Result<Complex64> {
    match symbol {
        Symbol::Regular(s) => pair_regular(s, joint),
        Symbol::Singular(s) => pair_singular(s, joint),
    }
}

pub fn pair_regular(symbol: &RegularSymbol, joint: &JointDistribution) -> Result<Complex64> {
    if symbol.kind != joint.kind {
        return Err(Error::RepresentationMismatch(format!(
            "{} symbol paired with a {} joint distribution",
            symbol.kind, joint.kind
        )));
    }
    let integrand = joint.grid.map_with_coords(|c, v| symbol.eval(c) * v);
    Ok(Complex64::new(integrate_all(&integrand), 0.0) + symbol.constant)
}

pub fn pair_singular(symbol: &SingularSymbol, joint: &JointDistribution) -> Result<Complex64> {
    if joint.kind != RepKind::Symplectic {
        return Err(Error::Unsupported("singular symbols exist for the symplectic representation only".into()));
    }
    let (mu, nu) = (joint.param_axes()[0], joint.param_axes()[1]);
    let mut total = Complex64::new(0.0, 0.0);
    for t in &symbol.terms {
        let [ms, ns] = t.support;
        if !mu.contains(ms) || !nu.contains(ns) {
            return Err(Error::OutsideHull(vec![f64::NAN, ms, ns]));
        }
        // ∫ δ⁽ᵃ⁾(μ−μ*) g dμ = (−1)ᵃ g⁽ᵃ⁾(μ*)
        let mut g = joint.grid.clone();
        if t.derivative[0] > 0 {
            g = derivative(&g, 1, t.derivative[0])?;
        }
        if t.derivative[1] > 0 {
            g = derivative(&g, 2, t.derivative[1])?;
        }
        let sign = if (t.derivative[0] + t.derivative[1]) % 2 == 0 { 1.0 } else { -1.0 };
        let line = g.slice_at(1, ms)?.slice_at(1, ns)?;
        let weighted = line.to_complex().map_with_coords(|c, v| {
            v * c[0].powi(t.x_power as i32) * Complex64::from_polar(1.0, t.x_phase * c[0])
        });
        total += t.coefficient * sign * integrate_all(&weighted);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcalc::Axis;
    use crate::jointdist::{make_joint, GaussianSumPrior};
    use crate::states::StateSpec;
    use crate::tomography::tomogram_analytic;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn params() -> OscillatorParams {
        OscillatorParams::default()
    }

    fn sym_axes() -> (Axis, Axis, Axis) {
        (
            Axis::new(-8.0, 8.0, 161).unwrap(),
            Axis::new(-4.5, 4.5, 73).unwrap(),
            Axis::new(-4.5, 4.5, 73).unwrap(),
        )
    }

    fn sym_joint(spec: &StateSpec, prior: GaussianPrior) -> JointDistribution {
        let (x, mu, nu) = sym_axes();
        let t = tomogram_analytic(spec, &params(), RepKind::Symplectic, &x, &[mu, nu]).unwrap();
        make_joint(&t, &Prior::Symplectic(prior)).unwrap()
    }

    fn opt_joint(spec: &StateSpec, prior: &Prior) -> JointDistribution {
        let x = Axis::new(-8.0, 8.0, 161).unwrap();
        let th = Axis::new(0.0, PI, 181).unwrap();
        let t = tomogram_analytic(spec, &params(), RepKind::Optical, &x, &[th]).unwrap();
        make_joint(&t, prior).unwrap()
    }

    fn coherent(re: f64, im: f64) -> StateSpec {
        StateSpec::Coherent { re, im }
    }

    fn regular(name: SymbolName, prior: GaussianPrior) -> Symbol {
        Symbol::Regular(regular_symbol(name, RepKind::Symplectic, &Prior::Symplectic(prior), &params()).unwrap())
    }

    #[test]
    fn regular_q_on_coherent() {
        let j = sym_joint(&coherent(FRAC_1_SQRT_2, 0.0), GaussianPrior::default());
        let v = pair(&regular(SymbolName::Q, GaussianPrior::default()), &j).unwrap();
        assert!((v.re - 1.0).abs() < 1e-2 && v.im.abs() < 1e-12, "{v}");
    }

    #[test]
    fn regular_qp_on_vacuum_has_the_ordering_term() {
        let j = sym_joint(&StateSpec::Fock { n: 0 }, GaussianPrior::default());
        let v = pair(&regular(SymbolName::Qp, GaussianPrior::default()), &j).unwrap();
        assert!(v.re.abs() < 1e-2 && (v.im - 0.5).abs() < 1e-2, "{v}");
        let n = pair(&regular(SymbolName::N, GaussianPrior::default()), &j).unwrap();
        assert!(n.norm() < 1e-2, "{n}");
    }

    #[test]
    fn singular_forms_on_gaussian_states() {
        let g = GaussianPrior::default();
        let one = Symbol::Singular(singular_symbol(SingularName::One, &g, &params()).unwrap());
        let q = Symbol::Singular(singular_symbol(SingularName::Q, &g, &params()).unwrap());
        let q2 = Symbol::Singular(singular_symbol(SingularName::Qn(2), &g, &params()).unwrap());
        let j = sym_joint(&coherent(FRAC_1_SQRT_2, 0.0), g);
        assert!((pair(&one, &j).unwrap().re - 1.0).abs() < 1e-2);
        let vq = pair(&q, &j).unwrap().re;
        assert!((vq - 1.0).abs() < 2e-2, "{vq}");
        let vr = pair(&regular(SymbolName::Q, g), &j).unwrap().re;
        assert!((vq - vr).abs() < 2e-2);
        let vac = sym_joint(&StateSpec::Fock { n: 0 }, g);
        assert!((pair(&q2, &vac).unwrap().re - 0.5).abs() < 2e-2);
        let qp = Symbol::Singular(singular_symbol(SingularName::Qp, &g, &params()).unwrap());
        let v = pair(&qp, &vac).unwrap();
        assert!(v.re.abs() < 2e-2 && (v.im - 0.5).abs() < 2e-2, "{v}");
    }

    #[test]
    fn identity_singular_symbol_with_shifted_prior() {
        let g = GaussianPrior::new(0.5, -0.5, 0.75, 1.5).unwrap();
        let one = Symbol::Singular(singular_symbol(SingularName::One, &g, &params()).unwrap());
        let j = sym_joint(&coherent(FRAC_1_SQRT_2, FRAC_1_SQRT_2), g);
        assert!((pair(&one, &j).unwrap().re - 1.0).abs() < 1e-2);
    }

    #[test]
    fn number_symbols_on_coherent() {
        let g = GaussianPrior::default();
        let j = sym_joint(&coherent(1.0, 0.0), g);
        let reg = pair(&regular(SymbolName::N, g), &j).unwrap();
        assert!((reg.re - 1.0).abs() < 2e-2, "{reg}");
        let sing = Symbol::Singular(singular_symbol(SingularName::Number, &g, &params()).unwrap());
        assert!((pair(&sing, &j).unwrap().re - 1.0).abs() < 2e-2);
    }

    #[test]
    fn alternative_q2_differs_pointwise_but_not_as_functional() {
        let g = GaussianPrior::default();
        let (alt_q, alt_p) = alternative_regular_symbols_q2_p2(&g, &params()).unwrap();
        let prim = regular_symbol(SymbolName::Q2, RepKind::Symplectic, &Prior::Symplectic(g), &params()).unwrap();
        let (x, mu, nu) = sym_axes();
        let diff = (&alt_q.sample(&[x, mu, nu]) - &prim.sample(&[x, mu, nu])).max_abs();
        assert!(diff > 0.1);
        let vac = sym_joint(&StateSpec::Fock { n: 0 }, g);
        assert!((pair(&Symbol::Regular(alt_q), &vac).unwrap().re - 0.5).abs() < 2e-2);
        let sq = sym_joint(&StateSpec::Squeezed { q: 0.0, p: 0.0, s: 2.0 }, g);
        assert!((pair(&Symbol::Regular(alt_p), &sq).unwrap().re - 0.25).abs() < 2e-2);
    }

    #[test]
    fn monomials() {
        let g = GaussianPrior::default();
        let m10 = monomial_regular_symbol(1, 0, &g, &params()).unwrap();
        let q = regular_symbol(SymbolName::Q, RepKind::Symplectic, &Prior::Symplectic(g), &params()).unwrap();
        for c in [[0.3, -1.0, 0.2], [2.0, 0.5, -0.7]] {
            assert!((m10.eval(&c) - q.eval(&c)).abs() < 1e-12);
        }
        let vac = sym_joint(&StateSpec::Fock { n: 0 }, g);
        let m20 = Symbol::Regular(monomial_regular_symbol(2, 0, &g, &params()).unwrap());
        assert!((pair(&m20, &vac).unwrap().re - 0.5).abs() < 2e-2);
        let j = sym_joint(&coherent(FRAC_1_SQRT_2, FRAC_1_SQRT_2), g);
        let m11 = Symbol::Regular(monomial_regular_symbol(1, 1, &g, &params()).unwrap());
        assert!((pair(&m11, &j).unwrap().re - 1.0).abs() < 3e-2);
        assert!(monomial_regular_symbol(3, 2, &g, &params()).is_err());
    }

    #[test]
    fn optical_symbols() {
        let prior = Prior::Optical(GaussianSumPrior::default());
        let j = opt_joint(&coherent(FRAC_1_SQRT_2, FRAC_1_SQRT_2), &prior);
        let m = coherent(FRAC_1_SQRT_2, FRAC_1_SQRT_2).exact_moments(&params());
        for (name, want) in [
            (SymbolName::Q, m.q),
            (SymbolName::P, m.p),
            (SymbolName::Q2, m.q2),
            (SymbolName::P2, m.p2),
            (SymbolName::N, m.number(&params())),
        ] {
            let s = Symbol::Regular(regular_symbol(name, RepKind::Optical, &prior, &params()).unwrap());
            let v = pair(&s, &j).unwrap();
            assert!((v.re - want).abs() < 2e-2 * want.abs().max(1.0), "{name}: {v} vs {want}");
        }
        let qp = Symbol::Regular(regular_symbol(SymbolName::Qp, RepKind::Optical, &prior, &params()).unwrap());
        let v = pair(&qp, &j).unwrap();
        assert!((v - m.qp(1.0)).norm() < 2e-2, "{v}");
    }

    #[test]
    fn delta_derivative_is_integration_by_parts() {
        // −∂_μ M̃ at (1, 0) paired with X against a hand-computed value
        let g = GaussianPrior::default();
        let j = sym_joint(&coherent(FRAC_1_SQRT_2, 0.0), g);
        let s = SingularSymbol {
            label: "test".into(),
            terms: vec![SingularTerm {
                coefficient: Complex64::new(1.0, 0.0),
                x_power: 1,
                x_phase: 0.0,
                support: [1.0, 0.0],
                derivative: [1, 0],
            }],
        };
        // M̃(X, μ, 0) = P(μ, 0) N(X; μ, μ²/2) so ∫ X M̃ dX = μ P(μ, 0)
        let want = -(g.value(1.0, 0.0) + g.derivative(1, 0, 1.0, 0.0));
        let v = pair(&Symbol::Singular(s), &j).unwrap();
        assert!((v.re - want).abs() < 1e-4, "{v} vs {want}");
    }

    #[test]
    fn errors() {
        let g = GaussianPrior::new(0.0, 0.0, 6.0, 1.0).unwrap();
        let j = sym_joint(&StateSpec::Fock { n: 0 }, GaussianPrior::default());
        let q = Symbol::Singular(singular_symbol(SingularName::Q, &g, &params()).unwrap());
        assert!(matches!(pair(&q, &j), Err(Error::OutsideHull(_))));
        assert!(matches!("zz".parse::<SymbolName>(), Err(Error::UnknownSymbol(_))));
        assert_eq!("qn(3)".parse::<SingularName>().unwrap(), SingularName::Qn(3));
        let opt = Prior::Optical(GaussianSumPrior::default());
        assert!(regular_symbol(SymbolName::Q, RepKind::Symplectic, &opt, &params()).is_err());
    }
}
