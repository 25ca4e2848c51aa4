//! Oscillator states, density matrices and Wigner functions.
//!
//! States are pure: Fock levels, coherent states and squeezed Gaussians with
//! real squeeze parameter. Gaussian states also have closed-form Wigner
//! functions, used as oracles for the numerical constructions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gridcalc::{integrate, integrate_all, Axis, GridFn};
use crate::{Complex64, Error, Result};

/// Highest Fock level the Hermite recurrence is trusted for.
pub const MAX_FOCK: u32 = 12;

/// Largest `|ψ|²` allowed at the ends of the position axis, relative to its peak.
const EDGE_TOL: f64 = 1e-8;

/// Imaginary part tolerated in a Wigner function before it is discarded.
pub const WIGNER_IM_TOL: f64 = 1e-8;

/// Mass, frequency and Planck constant of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }
}

impl OscillatorParams {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        let p = Self { mass, omega, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `mω`.
    pub fn m_omega(&self) -> f64 {
        self.mass * self.omega
    }

    /// `√(mω/ħ)`, the inverse oscillator length.
    pub fn k(&self) -> f64 {
        (self.m_omega() / self.hbar).sqrt()
    }
}

/// An abstract pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Fock { n: u32 },
    Coherent { re: f64, im: f64 },
    /// Gaussian with means `(q, p)` and position variance `s·ħ/(2mω)`.
    Squeezed { q: f64, p: f64, s: f64 },
}

/// First and second phase-space moments; `qp_sym` is `⟨(q̂p̂ + p̂q̂)/2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateMoments {
    pub q: f64,
    pub p: f64,
    pub q2: f64,
    pub p2: f64,
    pub qp_sym: f64,
}

impl StateMoments {
    /// `⟨q̂p̂⟩ = ⟨q̂p̂⟩_sym + iħ/2`.
    pub fn qp(&self, hbar: f64) -> Complex64 {
        Complex64::new(self.qp_sym, 0.5 * hbar)
    }

    /// `⟨â†â⟩ = (mω⟨q²⟩/ħ + ⟨p²⟩/(ħmω) − 1)/2`.
    pub fn number(&self, params: &OscillatorParams) -> f64 {
        let mw = params.m_omega();
        0.5 * (mw * self.q2 / params.hbar + self.p2 / (params.hbar * mw) - 1.0)
    }

    /// `⟨p²⟩/2m + mω²⟨q²⟩/2`.
    pub fn oscillator_energy(&self, params: &OscillatorParams) -> f64 {
        let m = params.mass;
        let w = params.omega;
        self.p2 / (2.0 * m) + 0.5 * m * w * w * self.q2
    }
}

/// Means and variances of a Gaussian state (no q–p correlation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianShape {
    pub q_mean: f64,
    pub p_mean: f64,
    pub var_q: f64,
    pub var_p: f64,
}

impl StateSpec {
    pub fn coherent(alpha: Complex64) -> Self {
        Self::Coherent {
            re: alpha.re,
            im: alpha.im,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Fock { n } if n > MAX_FOCK => Err(Error::FockTooHigh(n)),
            Self::Fock { .. } => Ok(()),
            Self::Coherent { re, im } if !(re.is_finite() && im.is_finite()) => {
                Err(Error::InvalidState("non-finite coherent amplitude".into()))
            }
            Self::Coherent { .. } => Ok(()),
            Self::Squeezed { q, p, s } => {
                if !(q.is_finite() && p.is_finite()) {
                    Err(Error::InvalidState("non-finite squeezed-state mean".into()))
                } else if !(s.is_finite() && s > 0.0) {
                    Err(Error::InvalidState(format!("squeeze factor must be positive, got {s}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_gaussian(&self) -> bool {
        !matches!(self, Self::Fock { n } if *n > 0)
    }

    /// Gaussian means and variances, or `None` for excited Fock levels.
    pub fn gaussian_shape(&self, params: &OscillatorParams) -> Option<GaussianShape> {
        let mw = params.m_omega();
        let hb = params.hbar;
        let (q_mean, p_mean, s) = match *self {
            Self::Fock { n: 0 } => (0.0, 0.0, 1.0),
            Self::Fock { .. } => return None,
            Self::Coherent { re, im } => ((2.0 * hb / mw).sqrt() * re, (2.0 * hb * mw).sqrt() * im, 1.0),
            Self::Squeezed { q, p, s } => (q, p, s),
        };
        Some(GaussianShape {
            q_mean,
            p_mean,
            var_q: s * hb / (2.0 * mw),
            var_p: hb * mw / (2.0 * s),
        })
    }

    /// Closed-form moments of the state.
    pub fn exact_moments(&self, params: &OscillatorParams) -> StateMoments {
        if let Self::Fock { n } = *self {
            let e = n as f64 + 0.5;
            return StateMoments {
                q: 0.0,
                p: 0.0,
                q2: params.hbar * e / params.m_omega(),
                p2: params.hbar * params.m_omega() * e,
                qp_sym: 0.0,
            };
        }
        let g = self.gaussian_shape(params).expect("Gaussian-class state");
        StateMoments {
            q: g.q_mean,
            p: g.p_mean,
            q2: g.q_mean * g.q_mean + g.var_q,
            p2: g.p_mean * g.p_mean + g.var_p,
            qp_sym: g.q_mean * g.p_mean,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fock { n } => write!(f, "fock:n={n}"),
            Self::Coherent { re, im } => write!(f, "coherent:re={re},im={im}"),
            Self::Squeezed { q, p, s } => write!(f, "gauss:q={q},p={p},s={s}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    /// `fock:n=2`, `coherent:re=0.5,im=0`, `gauss:q=1,p=0,s=2`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{v}` for `{k}`")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let take = |kv: &mut std::collections::BTreeMap<String, f64>, key: &str, default: Option<f64>| {
            kv.remove(key)
                .or(default)
                .ok_or_else(|| Error::Parse(format!("state `{kind}` needs `{key}=`")))
        };
        let spec = match kind.trim() {
            "fock" => {
                let n = take(&mut kv, "n", None)?;
                if n < 0.0 || n.fract() != 0.0 {
                    return Err(Error::Parse(format!("Fock level must be a nonnegative integer, got {n}")));
                }
                Self::Fock { n: n as u32 }
            }
            "coherent" => Self::Coherent {
                re: take(&mut kv, "re", Some(0.0))?,
                im: take(&mut kv, "im", Some(0.0))?,
            },
            "gauss" | "squeezed" => Self::Squeezed {
                q: take(&mut kv, "q", Some(0.0))?,
                p: take(&mut kv, "p", Some(0.0))?,
                s: take(&mut kv, "s", Some(1.0))?,
            },
            other => return Err(Error::Parse(format!("unknown state kind `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Parse(format!("unexpected key `{k}` for state `{kind}`")));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Test-state catalog: Fock 0–3, three coherent amplitudes, two squeezings.
///
/// `Coherent(0)` coincides with `Fock(0)` and is kept as a separate entry.
pub fn catalog() -> Vec<StateSpec> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        StateSpec::Fock { n: 0 },
        StateSpec::Fock { n: 1 },
        StateSpec::Fock { n: 2 },
        StateSpec::Fock { n: 3 },
        StateSpec::Coherent { re: 0.0, im: 0.0 },
        StateSpec::Coherent { re: r, im: 0.0 },
        StateSpec::Coherent { re: r, im: r },
        StateSpec::Squeezed { q: 0.0, p: 0.0, s: 0.5 },
        StateSpec::Squeezed { q: 0.0, p: 0.0, s: 2.0 },
    ]
}

/// Normalized Hermite functions `φ_0..φ_n` at dimensionless `x`.
pub(crate) fn hermite_functions(n: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n as usize {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Position-representation wavefunction, renormalized on the grid.
pub fn wavefunction(spec: &StateSpec, params: &OscillatorParams, q_axis: &Axis) -> Result<GridFn<Complex64>> {
    params.validate()?;
    spec.validate()?;
    let k = params.k();
    let hb = params.hbar;
    let psi = match *spec {
        StateSpec::Fock { n } => GridFn::from_fn(vec![*q_axis], |c| {
            Complex64::new(k.sqrt() * hermite_functions(n, k * c[0])[n as usize], 0.0)
        }),
        _ => {
            let g = spec.gaussian_shape(params).expect("Gaussian-class state");
            let norm = (2.0 * PI * g.var_q).powf(-0.25);
            GridFn::from_fn(vec![*q_axis], |c| {
                let d = c[0] - g.q_mean;
                let amp = norm * (-d * d / (4.0 * g.var_q)).exp();
                Complex64::from_polar(amp, g.p_mean * c[0] / hb)
            })
        }
    };
    let dens = psi.map(|z| z.norm_sqr());
    let peak = dens.max_abs();
    let vals = dens.values();
    let edge = vals[0].max(vals[vals.len() - 1]);
    if !(peak > 0.0) || edge > EDGE_TOL * peak {
        return Err(Error::InvalidState(format!(
            "position axis [{}, {}] does not cover the support of {spec}",
            q_axis.min, q_axis.max
        )));
    }
    let mass = integrate_all(&dens);
    Ok(psi.scale(1.0 / mass.sqrt()))
}

/// `ρ(q, q′) = ψ(q) ψ*(q′)` on the square `q_axis × q_axis`.
pub fn density_matrix(spec: &StateSpec, params: &OscillatorParams, q_axis: &Axis) -> Result<GridFn<Complex64>> {
    let psi = wavefunction(spec, params, q_axis)?;
    let v = psi.values();
    let n = q_axis.count;
    let values = (0..n * n).map(|f| v[f / n] * v[f % n].conj()).collect();
    GridFn::new(vec![*q_axis, *q_axis], values)
}

/// Diagonal quadrature `∫ ρ(q, q) dq`.
pub fn trace(rho: &GridFn<Complex64>) -> Result<Complex64> {
    let ax = *rho.axis(0)?;
    let values: Vec<Complex64> = (0..ax.count).map(|i| rho.get(&[i, i])).collect();
    Ok(integrate_all(&GridFn::new(vec![ax], values)?))
}

/// A real Wigner function on `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFn {
    pub grid: GridFn<f64>,
    pub params: OscillatorParams,
}

impl WignerFn {
    pub fn q_axis(&self) -> &Axis {
        &self.grid.axes()[0]
    }

    pub fn p_axis(&self) -> &Axis {
        &self.grid.axes()[1]
    }

    pub fn normalization(&self) -> f64 {
        integrate_all(&self.grid)
    }

    /// `∫ qᵏ pˡ W dq dp`.
    pub fn moment(&self, k: i32, l: i32) -> f64 {
        integrate_all(&self.grid.map_with_coords(|c, w| c[0].powi(k) * c[1].powi(l) * w))
    }

    pub fn moments(&self) -> StateMoments {
        StateMoments {
            q: self.moment(1, 0),
            p: self.moment(0, 1),
            q2: self.moment(2, 0),
            p2: self.moment(0, 2),
            qp_sym: self.moment(1, 1),
        }
    }

    /// `∫ W dp` as a function of `q`.
    pub fn position_marginal(&self) -> GridFn<f64> {
        integrate(&self.grid, &[1]).expect("two-dimensional Wigner grid")
    }

    /// `∫ W dq` as a function of `p`.
    pub fn momentum_marginal(&self) -> GridFn<f64> {
        integrate(&self.grid, &[0]).expect("two-dimensional Wigner grid")
    }
}

/// `W(q,p) = (1/2πħ) ∫ ρ(q + u/2, q − u/2) e^{−ipu/ħ} du`.
///
/// The `u` step is `2h`, so `q ± u/2` fall on grid nodes and `ρ` is sampled
/// without interpolation; pairs that leave the grid contribute zero.
pub fn wigner_from_density(rho: &GridFn<Complex64>, params: &OscillatorParams, p_axis: &Axis) -> Result<WignerFn> {
    params.validate()?;
    if rho.ndim() != 2 || rho.axes()[0] != rho.axes()[1] {
        return Err(Error::ShapeMismatch("density matrix must live on a square (q, q′) grid".into()));
    }
    let q_axis = rho.axes()[0];
    let n = q_axis.count;
    let h = q_axis.spacing();
    let hb = params.hbar;
    let p_pts = p_axis.points();
    let kmax = n - 1;
    // phase[j][k] = e^{−i p_j 2kh/ħ}
    let phase: Vec<Vec<Complex64>> = p_pts
        .iter()
        .map(|&p| (0..=kmax).map(|k| Complex64::from_polar(1.0, -p * 2.0 * k as f64 * h / hb)).collect())
        .collect();
    let pref = 2.0 * h / (2.0 * PI * hb);
    let mut re = vec![0.0; n * p_axis.count];
    let mut im_max = 0.0f64;
    for i in 0..n {
        let reach = i.min(n - 1 - i);
        let terms: Vec<(Complex64, Complex64)> = (1..=reach)
            .map(|k| (rho.get(&[i + k, i - k]), rho.get(&[i - k, i + k])))
            .collect();
        let centre = rho.get(&[i, i]);
        for (j, ph) in phase.iter().enumerate() {
            let mut acc = centre;
            for (k, (a, b)) in terms.iter().enumerate() {
                let e = ph[k + 1];
                acc += a * e + b * e.conj();
            }
            let w = acc * pref;
            re[i * p_axis.count + j] = w.re;
            im_max = im_max.max(w.im.abs());
        }
    }
    if im_max > WIGNER_IM_TOL {
        return Err(Error::ImaginaryResidue {
            residue: im_max,
            threshold: WIGNER_IM_TOL,
            context: "Wigner transform of the density matrix".into(),
        });
    }
    Ok(WignerFn {
        grid: GridFn::new(vec![q_axis, *p_axis], re)?,
        params: *params,
    })
}

/// Closed-form Wigner function of a Gaussian-class state.
pub fn wigner_analytic(spec: &StateSpec, params: &OscillatorParams, q_axis: &Axis, p_axis: &Axis) -> Result<WignerFn> {
    params.validate()?;
    spec.validate()?;
    let g = spec
        .gaussian_shape(params)
        .ok_or_else(|| Error::NotGaussian(spec.to_string()))?;
    let norm = 1.0 / (2.0 * PI * (g.var_q * g.var_p).sqrt());
    let grid = GridFn::from_fn(vec![*q_axis, *p_axis], |c| {
        let dq = c[0] - g.q_mean;
        let dp = c[1] - g.p_mean;
        norm * (-dq * dq / (2.0 * g.var_q) - dp * dp / (2.0 * g.var_p)).exp()
    });
    Ok(WignerFn { grid, params: *params })
}

/// Wigner function of any catalog state via its density matrix.
pub fn wigner(spec: &StateSpec, params: &OscillatorParams, q_axis: &Axis, p_axis: &Axis) -> Result<WignerFn> {
    let rho = density_matrix(spec, params, q_axis)?;
    wigner_from_density(&rho, params, p_axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn axis() -> Axis {
        Axis::new(-8.0, 8.0, 161).unwrap()
    }

    fn defaults() -> OscillatorParams {
        OscillatorParams::default()
    }

    #[test]
    fn ground_state_value_at_origin() {
        let psi = wavefunction(&StateSpec::Fock { n: 0 }, &defaults(), &axis()).unwrap();
        assert!((psi.get(&[80]).re - PI.powf(-0.25)).abs() < 1e-10);
    }

    #[test]
    fn coherent_zero_is_ground_state() {
        let a = wavefunction(&StateSpec::Fock { n: 0 }, &defaults(), &axis()).unwrap();
        let b = wavefunction(&StateSpec::Coherent { re: 0.0, im: 0.0 }, &defaults(), &axis()).unwrap();
        assert!((&a - &b).max_abs() < 1e-14);
    }

    #[test]
    fn wavefunctions_are_normalized() {
        for s in catalog() {
            let psi = wavefunction(&s, &defaults(), &axis()).unwrap();
            let m = integrate_all(&psi.map(|z| z.norm_sqr()));
            assert!((m - 1.0).abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn fock_cap_enforced() {
        assert!(wavefunction(&StateSpec::Fock { n: 12 }, &defaults(), &axis()).is_ok());
        assert!(matches!(
            wavefunction(&StateSpec::Fock { n: 13 }, &defaults(), &axis()),
            Err(Error::FockTooHigh(13))
        ));
    }

    #[test]
    fn narrow_axis_rejected() {
        let ax = Axis::new(-2.0, 2.0, 41).unwrap();
        assert!(wavefunction(&StateSpec::Fock { n: 3 }, &defaults(), &ax).is_err());
    }

    #[test]
    fn density_matrix_properties() {
        let rho = density_matrix(&StateSpec::Fock { n: 0 }, &defaults(), &axis()).unwrap();
        assert!((rho.get(&[80, 80]).re - 1.0 / PI.sqrt()).abs() < 1e-10);
        let rho = density_matrix(&StateSpec::Coherent { re: 0.3, im: 0.8 }, &defaults(), &axis()).unwrap();
        for (i, j) in [(3, 70), (80, 81), (100, 20)] {
            assert_eq!(rho.get(&[i, j]), rho.get(&[j, i]).conj());
        }
        let rho = density_matrix(&StateSpec::Fock { n: 1 }, &defaults(), &axis()).unwrap();
        assert!((trace(&rho).unwrap() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn vacuum_wigner_peak() {
        let w = wigner(&StateSpec::Fock { n: 0 }, &defaults(), &axis(), &axis()).unwrap();
        assert!((w.grid.get(&[80, 80]) - 1.0 / PI).abs() < 1e-4);
        assert!((w.normalization() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn numeric_and_analytic_gaussians_agree() {
        for s in [
            StateSpec::Fock { n: 0 },
            StateSpec::Coherent { re: FRAC_1_SQRT_2, im: -0.4 },
            StateSpec::Squeezed { q: 0.5, p: -1.0, s: 2.0 },
        ] {
            let a = wigner(&s, &defaults(), &axis(), &axis()).unwrap();
            let b = wigner_analytic(&s, &defaults(), &axis(), &axis()).unwrap();
            assert!((&a.grid - &b.grid).max_abs() < 1e-4, "{s}");
        }
    }

    #[test]
    fn coherent_wigner_is_displaced() {
        let s = StateSpec::Coherent { re: 0.5, im: 0.25 };
        let w = wigner(&s, &defaults(), &axis(), &axis()).unwrap();
        let (qb, pb) = (2f64.sqrt() * 0.5, 2f64.sqrt() * 0.25);
        let err = w
            .grid
            .map_with_coords(|c, v| v - (-(c[0] - qb).powi(2) - (c[1] - pb).powi(2)).exp() / PI)
            .max_abs();
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn squeezed_variances() {
        let w = wigner_analytic(&StateSpec::Squeezed { q: 0.0, p: 0.0, s: 2.0 }, &defaults(), &axis(), &axis()).unwrap();
        let m = w.moments();
        assert!((m.q2 - 1.0).abs() < 1e-4 && (m.p2 - 0.25).abs() < 1e-4);
        assert!((w.normalization() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn analytic_rejects_excited_fock() {
        assert!(matches!(
            wigner_analytic(&StateSpec::Fock { n: 1 }, &defaults(), &axis(), &axis()),
            Err(Error::NotGaussian(_))
        ));
    }

    #[test]
    fn fock_wigner_sign_at_origin_alternates() {
        for n in 0..3u32 {
            let w = wigner(&StateSpec::Fock { n }, &defaults(), &axis(), &axis()).unwrap();
            let v = w.grid.get(&[80, 80]);
            assert!((v - (-1f64).powi(n as i32) / PI).abs() < 1e-4, "n={n} W(0,0)={v}");
        }
    }

    #[test]
    fn catalog_moments_match_closed_forms() {
        for s in catalog() {
            let w = wigner(&s, &defaults(), &axis(), &axis()).unwrap();
            let got = w.moments();
            let want = s.exact_moments(&defaults());
            assert!((w.normalization() - 1.0).abs() < 1e-4, "{s}");
            for (g, e) in [(got.q, want.q), (got.p, want.p), (got.q2, want.q2), (got.p2, want.p2), (got.qp_sym, want.qp_sym)] {
                assert!((g - e).abs() < 1e-4, "{s}: {g} vs {e}");
            }
            assert!(w.position_marginal().values().iter().all(|&v| v > -1e-6));
            assert!(w.momentum_marginal().values().iter().all(|&v| v > -1e-6));
        }
    }

    #[test]
    fn nondefault_constants() {
        let p = OscillatorParams::new(2.0, 0.5, 0.7).unwrap();
        let s = StateSpec::Coherent { re: 0.4, im: -0.3 };
        let w = wigner(&s, &p, &axis(), &axis()).unwrap();
        let got = w.moments();
        let want = s.exact_moments(&p);
        assert!((got.q - want.q).abs() < 1e-4 && (got.p2 - want.p2).abs() < 1e-4);
        assert!(OscillatorParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["fock:n=2", "coherent:re=0.5,im=0", "gauss:q=1,p=0,s=2"] {
            let s: StateSpec = text.parse().unwrap();
            assert_eq!(s.to_string().parse::<StateSpec>().unwrap(), s);
        }
        assert_eq!("fock:n=2".parse::<StateSpec>().unwrap(), StateSpec::Fock { n: 2 });
        assert!("fock:n=1.5".parse::<StateSpec>().is_err());
        assert!("fock".parse::<StateSpec>().is_err());
        assert!("gauss:s=-1".parse::<StateSpec>().is_err());
        assert!("coherent:re=1,x=2".parse::<StateSpec>().is_err());
        assert!("cat:n=1".parse::<StateSpec>().is_err());
    }
}
