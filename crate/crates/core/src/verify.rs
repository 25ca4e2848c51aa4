//! The acceptance suite: every criterion evaluated on the default
//! configuration, reported as pass/fail rows plus the list of printed-formula
//! deviations and how they are resolved.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    coherent_joint_trajectory, coherent_time_derivative, evolution_rhs, evolution_stationarity,
    optical_single_peak_agreement, relative_difference, residual, stability_bound, stationarity_condition_symplectic,
    stationary_residual_optical, stationary_residual_symplectic, step_evolution, PolynomialPotential,
};
use crate::gridcalc::{integrate_all, Axis, GridFn, GridSet};
use crate::jointdist::{make_joint, moment_integral, prior_moment_integral, recover_conditional, GaussianPrior, GaussianSumPrior, JointDistribution, Prior};
use crate::opalg::{
    commutator_defect, ladder_from_qp, ladder_operators, momentum_operator, momentum_operator_derived,
    position_operator, position_operator_derived, OperatorExpr, Representation,
};
use crate::states::{catalog, density_matrix, trace, wigner, OscillatorParams, StateSpec};
use crate::symbols::{
    alternative_regular_symbols_q2_p2, monomial_regular_symbol, pair, regular_symbol, singular_symbol,
    Symbol, SymbolName,
};
use crate::tomography::{
    optical_tomogram, symplectic_tomogram, tomogram_analytic, wigner_from_symplectic, RepKind, Tomogram,
};
use crate::{Complex64, Error, Result};

/// Half-width in cells of the `(μ, ν)` origin neighbourhood excluded from
/// tomogram comparisons.
pub const ORIGIN_CELLS: usize = 2;

/// Gaussian priors narrow enough for the moment identity on the default grid.
pub const MOMENT_PRIORS: [(f64, f64, f64, f64); 4] =
    [(0.0, 0.0, 0.6, 0.6), (0.5, -0.5, 0.5, 0.6), (-0.3, 0.2, 0.55, 0.65), (0.2, 0.4, 0.6, 0.5)];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub params: OscillatorParams,
    pub grids: GridSet,
    /// Seed of the random test functions of the commutator check.
    pub seed: u64,
    pub random_functions: usize,
    /// Energy used for the `Fock(0)` stationary check (correct value ħω/2).
    pub fock0_energy: Option<f64>,
    /// Run only these criteria (all when `None`).
    pub criteria: Option<Vec<u32>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            params: OscillatorParams::default(),
            grids: GridSet::default(),
            seed: 20240917,
            random_functions: 20,
            fock0_energy: None,
            criteria: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Passes when `value ≤ tolerance`.
    AtMost,
    /// Passes when `value ≥ tolerance`.
    AtLeast,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u32,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub runtime_ms: f64,
    pub detail: String,
}

/// A printed formula the implementation does not follow literally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviationNotice {
    pub id: String,
    pub location: String,
    pub printed: String,
    pub implemented: String,
    pub resolution: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub deviations: Vec<DeviationNotice>,
    pub passed: bool,
    pub runtime_s: f64,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width text table, one row per check.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<4} {:<58} {:>12} {:>3} {:>10} {:>9}  {}\n",
            "crit", "check", "value", "", "tolerance", "ms", "result"
        );
        for c in &self.checks {
            let op = match c.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            out.push_str(&format!(
                "{:<4} {:<58} {:>12.4e} {:>3} {:>10.1e} {:>9.0}  {}{}\n",
                c.criterion,
                c.name,
                c.value,
                op,
                c.tolerance,
                c.runtime_ms,
                if c.passed { "PASS" } else { "FAIL" },
                if c.detail.is_empty() { String::new() } else { format!("  ({})", c.detail) }
            ));
        }
        out.push_str("\nprinted-formula deviations:\n");
        for d in &self.deviations {
            out.push_str(&format!(
                "  [{}] {}: printed {} ; implemented {} ; {}\n",
                d.id, d.location, d.printed, d.implemented, d.resolution
            ));
        }
        let failed = self.failures().count();
        out.push_str(&format!(
            "\n{} checks, {} failed, {:.1} s\n",
            self.checks.len(),
            failed,
            self.runtime_s
        ));
        out
    }
}

/// The printed-formula deviations carried by the implementation.
pub fn deviation_notices() -> Vec<DeviationNotice> {
    vec![
        DeviationNotice {
            id: "identity-symbol-exponent".into(),
            location: "singular dual symbol of the identity operator".into(),
            printed: "exp(μ₀²/ν₀² + ν₀²/ζ²)".into(),
            implemented: "exp(μ₀²/ξ² + ν₀²/ζ²)".into(),
            resolution: "every analogous singular symbol uses μ₀²/ξ² and the printed form diverges as ν₀ → 0; ⟨1⟩ = 1 is checked for μ₀ ≠ 0".into(),
        },
        DeviationNotice {
            id: "stationary-nu-shift".into(),
            location: "kinetic side of the symplectic stationary-state equation".into(),
            printed: "(ν + ν₀)²/ζ⁴ and (ν + ν₀)∂_ν".into(),
            implemented: "(ν − ν₀) as generated by the momentum rule; Re([p̂]²/2m) derived by operator composition".into(),
            resolution: "the derived operator is authoritative; the printed form is evaluated alongside and the discrepancy reported (zero when ν₀ = 0)".into(),
        },
        DeviationNotice {
            id: "joint-momentum-sign".into(),
            location: "momentum rule of the symplectic joint representation".into(),
            printed: "+ iħμ/2 ∂_X".into(),
            implemented: "− iħμ/2 ∂_X".into(),
            resolution: "conjugating the tomographic rule by the prior gives the minus sign, which the evolution equation's drift term also requires".into(),
        },
        DeviationNotice {
            id: "singular-qp-hbar".into(),
            location: "ordering term of the singular q̂p̂ symbol".into(),
            printed: "iπ/2 · δ(μ)δ(ν) · ξζ exp(μ₀²/ξ² + ν₀²/ζ²)".into(),
            implemented: "iħπ/2 · δ(μ)δ(ν) · ξζ exp(μ₀²/ξ² + ν₀²/ζ²)".into(),
            resolution: "matches the iħ/2 of the regular q̂p̂ symbol and of the δ′ form; identical for ħ = 1".into(),
        },
    ]
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    checks: Vec<CheckResult>,
    sym: HashMap<String, Tomogram>,
    opt: HashMap<String, Tomogram>,
}

impl<'a> Ctx<'a> {
    fn params(&self) -> OscillatorParams {
        self.cfg.params
    }

    fn x(&self) -> Axis {
        self.cfg.grids.x
    }

    fn sym_axes(&self) -> Vec<Axis> {
        vec![self.cfg.grids.mu, self.cfg.grids.nu]
    }

    fn opt_axes(&self) -> Vec<Axis> {
        vec![self.cfg.grids.theta]
    }

    fn sym_tomogram(&mut self, spec: &StateSpec) -> Result<&Tomogram> {
        let key = spec.to_string();
        if !self.sym.contains_key(&key) {
            let g = &self.cfg.grids;
            let w = wigner(spec, &self.cfg.params, &g.q, &g.p)?;
            let t = symplectic_tomogram(&w, &g.x, &g.mu, &g.nu)?;
            self.sym.insert(key.clone(), t);
        }
        Ok(&self.sym[&key])
    }

    fn opt_tomogram(&mut self, spec: &StateSpec) -> Result<&Tomogram> {
        let key = spec.to_string();
        if !self.opt.contains_key(&key) {
            let g = &self.cfg.grids;
            let w = wigner(spec, &self.cfg.params, &g.q, &g.p)?;
            let t = optical_tomogram(&w, &g.x, &g.theta)?;
            self.opt.insert(key.clone(), t);
        }
        Ok(&self.opt[&key])
    }

    fn joint(&mut self, spec: &StateSpec, prior: &Prior) -> Result<JointDistribution> {
        let t = match prior.kind() {
            RepKind::Symplectic => self.sym_tomogram(spec)?,
            RepKind::Optical => self.opt_tomogram(spec)?,
        };
        make_joint(t, prior)
    }

    /// Joint built from the closed-form tomogram; used where the checked
    /// operators take second derivatives in the parameters.
    fn exact_joint(&self, spec: &StateSpec, prior: &Prior) -> Result<JointDistribution> {
        let g = &self.cfg.grids;
        let axes = match prior.kind() {
            RepKind::Symplectic => vec![g.mu, g.nu],
            RepKind::Optical => vec![g.theta],
        };
        let t = tomogram_analytic(spec, &self.cfg.params, prior.kind(), &g.x, &axes)?;
        make_joint(&t, prior)
    }

    fn push(
        &mut self,
        criterion: u32,
        name: impl Into<String>,
        outcome: Result<(f64, String)>,
        tolerance: f64,
        comparison: Comparison,
        start: Instant,
    ) {
        let (value, detail, ok) = match outcome {
            Ok((v, d)) => {
                let ok = match comparison {
                    Comparison::AtMost => v <= tolerance,
                    Comparison::AtLeast => v >= tolerance,
                };
                (v, d, ok && v.is_finite())
            }
            Err(e) => (f64::NAN, format!("error: {e}"), false),
        };
        self.checks.push(CheckResult {
            criterion,
            name: name.into(),
            value,
            tolerance,
            comparison,
            passed: ok,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            detail,
        });
    }
}

fn rebuild(e: &Error) -> Error {
    Error::Numeric(e.to_string())
}

/// `|v − o| / max(1, |o|)`.
pub fn scaled_error(value: Complex64, oracle: Complex64) -> f64 {
    (value - oracle).norm() / oracle.norm().max(1.0)
}

fn worst(items: impl IntoIterator<Item = (f64, String)>) -> (f64, String) {
    items
        .into_iter()
        .fold((0.0, String::new()), |acc, (v, d)| if v > acc.0 || v.is_nan() { (v, d) } else { acc })
}

/// Runs the selected criteria.
pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let mut ctx = Ctx {
        cfg,
        checks: Vec::new(),
        sym: HashMap::new(),
        opt: HashMap::new(),
    };
    let wanted = |c: u32| cfg.criteria.as_ref().is_none_or(|v| v.contains(&c));
    let steps: [(u32, fn(&mut Ctx)); 11] = [
        (1, normalization_chain),
        (2, radon_oracle),
        (3, prior_moments),
        (4, commutator),
        (5, conjugation_coherence),
        (6, dual_symbols),
        (7, non_uniqueness),
        (8, stationary_states),
        (9, evolution),
        (10, reconstruction),
        (11, deviation_ledger),
    ];
    for (c, f) in steps {
        if wanted(c) {
            f(&mut ctx);
        }
    }
    let checks = ctx.checks;
    VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        deviations: deviation_notices(),
        runtime_s: start.elapsed().as_secs_f64(),
    }
}

fn normalization_chain(ctx: &mut Ctx) {
    let states = catalog();
    let g = ctx.cfg.grids;
    let params = ctx.params();
    let t = Instant::now();
    let r = states
        .iter()
        .map(|s| {
            let tr = trace(&density_matrix(s, &params, &g.q)?)?;
            Ok(((tr - 1.0).norm(), s.to_string()))
        })
        .collect::<Result<Vec<_>>>()
        .map(worst);
    ctx.push(1, "Tr ρ = 1 (catalog)", r, 1e-3, Comparison::AtMost, t);
    let t = Instant::now();
    let r = states
        .iter()
        .map(|s| Ok(((wigner(s, &params, &g.q, &g.p)?.normalization() - 1.0).abs(), s.to_string())))
        .collect::<Result<Vec<_>>>()
        .map(worst);
    ctx.push(1, "∫W = 1 (catalog)", r, 1e-3, Comparison::AtMost, t);
    for kind in [RepKind::Symplectic, RepKind::Optical] {
        let t = Instant::now();
        let mut out = Vec::new();
        let mut err = None;
        for s in &states {
            let tomo = match kind {
                RepKind::Symplectic => ctx.sym_tomogram(s),
                RepKind::Optical => ctx.opt_tomogram(s),
            };
            match tomo {
                Ok(tm) => {
                    let m = tm.slice_masses();
                    let d = m.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
                    out.push((d, format!("{s}, {} slices rescaled", tm.renormalized.len())));
                }
                Err(e) => err = Some(e),
            }
        }
        let r = match err {
            Some(e) => Err(e),
            None => Ok(worst(out)),
        };
        ctx.push(1, format!("per-slice ∫M dX = 1 ({kind}, catalog)"), r, 1e-3, Comparison::AtMost, t);
        let t = Instant::now();
        let prior = Prior::default_for(kind);
        let r = states
            .iter()
            .map(|s| Ok(((ctx.joint(s, &prior)?.total_mass() - 1.0).abs(), s.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(worst);
        ctx.push(1, format!("∫M̃ = 1 ({kind}, catalog)"), r, 1e-3, Comparison::AtMost, t);
    }
}

fn radon_oracle(ctx: &mut Ctx) {
    let states = [
        StateSpec::Fock { n: 0 },
        StateSpec::Coherent {
            re: std::f64::consts::FRAC_1_SQRT_2,
            im: 0.0,
        },
        StateSpec::Squeezed { q: 0.0, p: 0.0, s: 2.0 },
    ];
    for kind in [RepKind::Symplectic, RepKind::Optical] {
        let t = Instant::now();
        let mut out = Vec::new();
        let mut err = None;
        for s in &states {
            let axes = match kind {
                RepKind::Symplectic => ctx.sym_axes(),
                RepKind::Optical => ctx.opt_axes(),
            };
            let analytic = tomogram_analytic(s, &ctx.params(), kind, &ctx.x(), &axes);
            let numeric = match kind {
                RepKind::Symplectic => ctx.sym_tomogram(s).cloned(),
                RepKind::Optical => ctx.opt_tomogram(s).cloned(),
            };
            match (analytic, numeric) {
                (Ok(a), Ok(n)) => {
                    let (d, at) = tomogram_difference(&a.grid, &n.grid, kind);
                    out.push((d, format!("{s} at {at:?}")));
                }
                (Err(e), _) | (_, Err(e)) => err = Some(e),
            }
        }
        let r = match err {
            Some(e) => Err(e),
            None => Ok(worst(out)),
        };
        ctx.push(2, format!("numeric vs analytic tomogram ({kind})"), r, 1e-3, Comparison::AtMost, t);
    }
}

/// `true` for symplectic grid points within `ORIGIN_CELLS` cells of `μ = ν = 0`.
fn near_origin(c: &[f64], axes: &[Axis]) -> bool {
    c.len() == 3
        && (1..3).all(|k| c[k].abs() <= ORIGIN_CELLS as f64 * axes[k].spacing() + 1e-12)
}

/// Max abs difference of two tomograms away from the origin neighbourhood,
/// and the coordinates where it occurs.
fn tomogram_difference(a: &GridFn<f64>, b: &GridFn<f64>, kind: RepKind) -> (f64, Vec<f64>) {
    let mut best = (0.0, Vec::new());
    for i in 0..a.len() {
        let c = a.coords(i);
        if kind == RepKind::Symplectic && near_origin(&c, a.axes()) {
            continue;
        }
        let d = (a.values()[i] - b.values()[i]).abs();
        if d > best.0 {
            best = (d, c);
        }
    }
    best
}

fn prior_moments(ctx: &mut Ctx) {
    let (mu, nu) = (ctx.cfg.grids.mu, ctx.cfg.grids.nu);
    for (m0, n0, xi, ze) in MOMENT_PRIORS {
        let t = Instant::now();
        let r = GaussianPrior::new(m0, n0, xi, ze).and_then(|g| {
            let mut items = Vec::new();
            for k in 0..=3usize {
                for l in 0..=3usize {
                    let want = if (k + l) % 2 == 0 { 1.0 } else { -1.0 } * factorial(k) * factorial(l);
                    let got = prior_moment_integral(&g, k, l, &mu, &nu)?;
                    items.push(((got - want).abs(), format!("k={k}, l={l}")));
                }
            }
            Ok(worst(items))
        });
        let name = format!("∫μᵏνˡ∂ᵏ∂ˡP = (−1)^(k+l)k!l!, P₁({m0},{n0},{xi},{ze})");
        ctx.push(3, name, r, 1e-6, Comparison::AtMost, t);
        let t = Instant::now();
        let r = GaussianPrior::new(m0, n0, xi, ze).and_then(|g| {
            let mut items = Vec::new();
            for k in 0..=3usize {
                for l in 0..=3usize {
                    for a in 0..=3i32 {
                        for b in 0..=3i32 {
                            if (a as usize) < k || (b as usize) < l {
                                let v = moment_integral(&g, (a, b), (k, l), &mu, &nu)?;
                                items.push((v.abs(), format!("μ^{a}ν^{b}∂^{k}∂^{l}")));
                            }
                        }
                    }
                }
            }
            Ok(worst(items))
        });
        let name = format!("mismatched-order integrals vanish, P₁({m0},{n0},{xi},{ze})");
        ctx.push(3, name, r, 1e-8, Comparison::AtMost, t);
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Seeded smooth test function, Gaussian in `X` and decaying in the parameters.
///
/// The `X` width keeps the function below `DECAY_TOL` at the ends of the
/// default `X` axis, where `∂⁻¹_X` starts its quadrature.
pub fn random_test_function(rng: &mut ChaCha8Rng, axes: &[Axis]) -> GridFn<Complex64> {
    let x0 = rng.gen_range(-1.0..1.0);
    let s = rng.gen_range(0.6..1.0);
    let centers: Vec<f64> = (1..axes.len()).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let width = rng.gen_range(0.8..1.3);
    let coeffs: Vec<Complex64> = (0..axes.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFn::from_fn(axes.to_vec(), |c| {
        let gx = (-(c[0] - x0).powi(2) / (2.0 * s * s)).exp();
        let r2: f64 = c[1..].iter().zip(&centers).map(|(v, m)| (v - m).powi(2)).sum();
        let poly = coeffs[0] + c[1..].iter().zip(&coeffs[1..]).map(|(v, a)| a * *v).sum::<Complex64>();
        poly * gx * (-r2 / (2.0 * width * width)).exp()
    })
}

fn commutator(ctx: &mut Ctx) {
    let t = Instant::now();
    let params = ctx.params();
    let axes = [vec![ctx.x()], ctx.sym_axes()].concat();
    let n = ctx.cfg.random_functions;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let r = Representation::symplectic_joint(Prior::default_for(RepKind::Symplectic), params)
        .and_then(|rep| ladder_operators(&rep))
        .and_then(|(a, ad)| {
            let mut items = Vec::new();
            for i in 0..n {
                let f = random_test_function(&mut rng, &axes);
                items.push((commutator_defect(&a, &ad, &f, 0.1)?, format!("function {i}")));
            }
            Ok(worst(items))
        });
    let name = format!("[[â],[â†]] f = f, {n} random functions (interior)");
    ctx.push(4, name, r, 1e-6, Comparison::AtMost, t);
}

fn conjugation_coherence(ctx: &mut Ctx) {
    let params = ctx.params();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed ^ 0x5eed);
    let sym_axes = [vec![ctx.x()], ctx.sym_axes()].concat();
    let opt_axes = [vec![ctx.x()], ctx.opt_axes()].concat();
    let f_sym = random_test_function(&mut rng, &sym_axes);
    let f_opt = random_test_function(&mut rng, &opt_axes);
    let compare = |a: &OperatorExpr, b: &OperatorExpr, f: &GridFn<Complex64>| -> Result<(f64, String)> {
        let x = a.apply(f)?;
        let y = b.apply(f)?;
        Ok(((&x - &y).max_abs() / x.max_abs().max(1.0), String::new()))
    };
    let sym = Representation::symplectic_joint(Prior::default_for(RepKind::Symplectic), params);
    let opt = Representation::optical_joint(Prior::default_for(RepKind::Optical), params);
    let cases: Vec<(&str, Result<(f64, String)>)> = vec![
        (
            "[q̂] symplectic joint: printed vs P·[q̂]_M·P⁻¹",
            sym.as_ref().map_err(rebuild).and_then(|r| {
                compare(&position_operator(r)?, &position_operator_derived(r)?, &f_sym)
            }),
        ),
        (
            "[p̂] symplectic joint: printed vs P·[p̂]_M·P⁻¹",
            sym.as_ref().map_err(rebuild).and_then(|r| {
                compare(&momentum_operator(r)?, &momentum_operator_derived(r)?, &f_sym)
            }),
        ),
        (
            "[â] symplectic joint: printed vs from [q̂],[p̂]",
            sym.as_ref().map_err(rebuild).and_then(|r| {
                compare(&ladder_operators(r)?.0, &ladder_from_qp(r)?.0, &f_sym)
            }),
        ),
        (
            "[â†] symplectic joint: printed vs from [q̂],[p̂]",
            sym.as_ref().map_err(rebuild).and_then(|r| {
                compare(&ladder_operators(r)?.1, &ladder_from_qp(r)?.1, &f_sym)
            }),
        ),
        (
            "[q̂] optical joint: printed vs P·[q̂]_w·P⁻¹",
            opt.as_ref().map_err(rebuild).and_then(|r| {
                compare(&position_operator(r)?, &position_operator_derived(r)?, &f_opt)
            }),
        ),
        (
            "[p̂] optical joint: printed vs P·[p̂]_w·P⁻¹",
            opt.as_ref().map_err(rebuild).and_then(|r| {
                compare(&momentum_operator(r)?, &momentum_operator_derived(r)?, &f_opt)
            }),
        ),
    ];
    for (name, r) in cases {
        let t = Instant::now();
        ctx.push(5, name, r, 1e-10, Comparison::AtMost, t);
    }
}

/// Closed-form expectation value of `name` in a catalog-type state.
pub fn oracle(spec: &StateSpec, params: &OscillatorParams, name: SymbolName) -> Complex64 {
    let m = spec.exact_moments(params);
    let r = |v: f64| Complex64::new(v, 0.0);
    match name {
        SymbolName::One => r(1.0),
        SymbolName::Q => r(m.q),
        SymbolName::P => r(m.p),
        SymbolName::Q2 => r(m.q2),
        SymbolName::P2 => r(m.p2),
        SymbolName::Qp => m.qp(params.hbar),
        SymbolName::Pq => m.qp(params.hbar).conj(),
        SymbolName::N => r(m.number(params)),
    }
}

const SYMBOL_SET: [SymbolName; 7] = [
    SymbolName::One,
    SymbolName::Q,
    SymbolName::P,
    SymbolName::Q2,
    SymbolName::P2,
    SymbolName::Qp,
    SymbolName::N,
];

fn dual_symbols(ctx: &mut Ctx) {
    let params = ctx.params();
    let states = catalog();
    let p1 = Prior::default_for(RepKind::Symplectic);
    let g1 = GaussianPrior::default();
    let p2 = Prior::default_for(RepKind::Optical);
    let mut reg_sym = Vec::new();
    let mut reg_opt = Vec::new();
    let mut sing = Vec::new();
    let mut cross = Vec::new();
    let mut alt = Vec::new();
    let mut comm = Vec::new();
    let mut times = [0.0f64; 6];
    let mut err: Option<Error> = None;
    for s in &states {
        let t = Instant::now();
        let r: Result<()> = (|| {
            let js = ctx.joint(s, &p1)?;
            let jo = ctx.joint(s, &p2)?;
            let (aq, ap) = alternative_regular_symbols_q2_p2(&g1, &params)?;
            for name in SYMBOL_SET {
                let o = oracle(s, &params, name);
                let rs = pair(&Symbol::Regular(regular_symbol(name, RepKind::Symplectic, &p1, &params)?), &js)?;
                let ro = pair(&Symbol::Regular(regular_symbol(name, RepKind::Optical, &p2, &params)?), &jo)?;
                let ss = pair(&Symbol::Singular(singular_symbol(name.into(), &g1, &params)?), &js)?;
                reg_sym.push((scaled_error(rs, o), format!("{s} {name}")));
                reg_opt.push((scaled_error(ro, o), format!("{s} {name}")));
                sing.push((scaled_error(ss, o), format!("{s} {name}")));
                cross.push((scaled_error(ss, rs), format!("{s} {name}")));
            }
            let vq = pair(&Symbol::Regular(aq), &js)?;
            let vp = pair(&Symbol::Regular(ap), &js)?;
            alt.push((scaled_error(vq, oracle(s, &params, SymbolName::Q2)), format!("{s} q2")));
            alt.push((scaled_error(vp, oracle(s, &params, SymbolName::P2)), format!("{s} p2")));
            let qp = pair(&Symbol::Regular(regular_symbol(SymbolName::Qp, RepKind::Symplectic, &p1, &params)?), &js)?;
            let pq = pair(&Symbol::Regular(regular_symbol(SymbolName::Pq, RepKind::Symplectic, &p1, &params)?), &js)?;
            comm.push((scaled_error(qp - pq, Complex64::new(0.0, params.hbar)), s.to_string()));
            Ok(())
        })();
        if let Err(e) = r {
            err = Some(e);
        }
        let el = t.elapsed().as_secs_f64() * 1e3 / 6.0;
        times.iter_mut().for_each(|x| *x += el);
    }
    let groups: [(&str, Vec<(f64, String)>, f64); 6] = [
        ("regular symbols, symplectic, catalog × {1,q,p,q²,p²,qp,n}", reg_sym, 2e-2),
        ("regular symbols, optical, catalog × {1,q,p,q²,p²,qp,n}", reg_opt, 2e-2),
        ("singular symbols, symplectic, catalog × {1,q,p,q²,p²,qp,n}", sing, 2e-2),
        ("singular vs regular cross agreement", cross, 2e-2),
        ("alternative q², p² symbols as functionals", alt, 2e-2),
        ("⟨q̂p̂⟩ − ⟨p̂q̂⟩ = iħ (catalog)", comm, 3e-2),
    ];
    for ((name, items, tol), ms) in groups.into_iter().zip(times) {
        let r = match &err {
            Some(e) => Err(rebuild(e)),
            None => Ok(worst(items)),
        };
        ctx.checks.push(CheckResult {
            criterion: 6,
            name: name.into(),
            value: r.as_ref().map_or(f64::NAN, |v| v.0),
            tolerance: tol,
            comparison: Comparison::AtMost,
            passed: r.as_ref().is_ok_and(|v| v.0 <= tol),
            runtime_ms: ms,
            detail: match r {
                Ok((_, d)) => d,
                Err(e) => format!("error: {e}"),
            },
        });
    }
    monomials(ctx);
    prior_invariance(ctx);
}

/// Prior of the monomial checks. Under `P₁(0, 0, 1, 1)` third and fourth
/// derivatives weight slices whose `X` support leaves the default window.
pub const MONOMIAL_PRIOR: (f64, f64, f64, f64) = MOMENT_PRIORS[0];

fn monomials(ctx: &mut Ctx) {
    let params = ctx.params();
    let g = ctx.cfg.grids;
    let (m0, n0, xi, ze) = MONOMIAL_PRIOR;
    for (order_cap, tol) in [(3usize, 2e-2), (4, 3e-2)] {
        let t = Instant::now();
        let states = catalog();
        let r: Result<(f64, String)> = (|| {
            let narrow = GaussianPrior::new(m0, n0, xi, ze)?;
            let wide = GaussianPrior::default();
            let mut items = Vec::new();
            let mut wide_items = Vec::new();
            for s in &states {
                let w = wigner(s, &params, &g.q, &g.p)?;
                for (prior, sink) in [(narrow, &mut items), (wide, &mut wide_items)] {
                    let js = ctx.joint(s, &Prior::Symplectic(prior))?;
                    for k in 0..=order_cap {
                        for l in 0..=(order_cap - k) {
                            if (order_cap == 4) != (k + l == 4) {
                                continue;
                            }
                            let sym = Symbol::Regular(monomial_regular_symbol(k, l, &prior, &params)?);
                            let v = pair(&sym, &js)?;
                            let o = Complex64::new(w.moment(k as i32, l as i32), 0.0);
                            sink.push((scaled_error(v, o), format!("{s} q^{k}p^{l}")));
                        }
                    }
                }
            }
            let (v, d) = worst(items);
            let (wv, wd) = worst(wide_items);
            Ok((v, format!("{d}; under P₁(0,0,1,1): {wv:.2e} at {wd}")))
        })();
        let name = if order_cap == 4 {
            format!("monomial symbols, k+l = 4, P₁({m0},{n0},{xi},{ze})")
        } else {
            format!("monomial symbols, k+l ≤ 3, P₁({m0},{n0},{xi},{ze})")
        };
        ctx.push(6, name, r, tol, Comparison::AtMost, t);
    }
}

fn prior_invariance(ctx: &mut Ctx) {
    let t = Instant::now();
    let params = ctx.params();
    let s = StateSpec::Coherent {
        re: std::f64::consts::FRAC_1_SQRT_2,
        im: std::f64::consts::FRAC_1_SQRT_2,
    };
    let r: Result<(f64, String)> = (|| {
        let mut items = Vec::new();
        for shift in [0.0, 0.5, -0.5] {
            for width in [0.7, 1.0] {
                let g = GaussianPrior::new(shift, -shift, width, width)?;
                let prior = Prior::Symplectic(g);
                let js = ctx.joint(&s, &prior)?;
                for name in SYMBOL_SET {
                    let o = oracle(&s, &params, name);
                    let rs = pair(&Symbol::Regular(regular_symbol(name, RepKind::Symplectic, &prior, &params)?), &js)?;
                    let ss = pair(&Symbol::Singular(singular_symbol(name.into(), &g, &params)?), &js)?;
                    items.push((scaled_error(rs, o), format!("regular {name} P₁({shift},{},{width})", -shift)));
                    items.push((scaled_error(ss, o), format!("singular {name} P₁({shift},{},{width})", -shift)));
                }
            }
        }
        Ok(worst(items))
    })();
    ctx.push(6, "prior invariance of expectation values", r, 2e-2, Comparison::AtMost, t);
}

fn non_uniqueness(ctx: &mut Ctx) {
    let t = Instant::now();
    let params = ctx.params();
    let axes = [vec![ctx.x()], ctx.sym_axes()].concat();
    let r = (|| {
        let g1 = GaussianPrior::default();
        let (aq, _) = alternative_regular_symbols_q2_p2(&g1, &params)?;
        let prim = regular_symbol(SymbolName::Q2, RepKind::Symplectic, &Prior::Symplectic(g1), &params)?;
        // compared where the prior carries weight, |μ|,|ν| ≤ 2ξ
        let a = aq.sample(&axes);
        let b = prim.sample(&axes);
        let diff = (0..a.len())
            .filter(|&i| a.coords(i).iter().all(|v| v.abs() <= 2.0))
            .map(|i| (a.values()[i] - b.values()[i]).norm())
            .fold(0.0, f64::max);
        Ok((diff, "max |alt − primary| over |X|,|μ|,|ν| ≤ 2; functional agreement in criterion 6".to_string()))
    })();
    ctx.push(7, "alternative and primary q² symbols differ pointwise", r, 0.1, Comparison::AtLeast, t);
}

fn stationary_states(ctx: &mut Ctx) {
    let params = ctx.params();
    let v = PolynomialPotential::harmonic(&params);
    let p1 = Prior::default_for(RepKind::Symplectic);
    let hw = params.hbar * params.omega;
    for n in 0..=2u32 {
        let s = StateSpec::Fock { n };
        let e = hw * (n as f64 + 0.5);
        let t = Instant::now();
        let energy = if n == 0 { ctx.cfg.fock0_energy.unwrap_or(e) } else { e };
        let r = ctx
            .exact_joint(&s, &p1)
            .and_then(|j| stationary_residual_symplectic(&j, &v, energy, true))
            .map(|r| (r.relative, format!("printed-form discrepancy {:.2e}", r.printed_discrepancy.unwrap_or(f64::NAN))));
        ctx.push(8, format!("stationary residual {s}, E = {energy}"), r, 3e-2, Comparison::AtMost, t);
        for de in [0.2, -0.2] {
            let t = Instant::now();
            let r = ctx
                .exact_joint(&s, &p1)
                .and_then(|j| stationary_residual_symplectic(&j, &v, e + de * hw, false))
                .map(|r| (r.relative, String::new()));
            ctx.push(8, format!("stationary residual {s}, E = {} (perturbed)", e + de * hw), r, 0.15, Comparison::AtLeast, t);
        }
        let t = Instant::now();
        let r = ctx
            .exact_joint(&s, &p1)
            .and_then(|j| stationarity_condition_symplectic(&j, &v))
            .map(|r| (r.relative, String::new()));
        ctx.push(8, format!("stationarity condition {s}"), r, 2e-2, Comparison::AtMost, t);
    }
    let t = Instant::now();
    let coh = StateSpec::Coherent {
        re: std::f64::consts::FRAC_1_SQRT_2,
        im: 0.0,
    };
    let r = ctx
        .exact_joint(&coh, &p1)
        .and_then(|j| stationarity_condition_symplectic(&j, &v))
        .map(|r| (r.relative, String::new()));
    ctx.push(8, format!("stationarity condition {coh} (non-stationary)"), r, 0.1, Comparison::AtLeast, t);

    let single = GaussianSumPrior::single(std::f64::consts::FRAC_PI_2, 1.0).map(Prior::Optical);
    let t = Instant::now();
    let r = GaussianSumPrior::single(std::f64::consts::FRAC_PI_2, 1.0)
        .map(Prior::Optical)
        .and_then(|p| ctx.exact_joint(&StateSpec::Fock { n: 0 }, &p))
        .and_then(|j| stationary_residual_optical(&j, &v, 0.5 * hw, true))
        .map(|r| (r.relative, format!("derived-kinetic discrepancy {:.2e}", r.printed_discrepancy.unwrap_or(f64::NAN))));
    ctx.push(8, "optical stationary residual fock:n=0, single peak", r, 3e-2, Comparison::AtMost, t);
    let t = Instant::now();
    let r = single
        .and_then(|p| ctx.exact_joint(&StateSpec::Fock { n: 0 }, &p))
        .and_then(|j| optical_single_peak_agreement(&j))
        .map(|d| (d, String::new()));
    ctx.push(8, "optical single-peak vs general path", r, 1e-8, Comparison::AtMost, t);
    let t = Instant::now();
    let r = ctx
        .exact_joint(&StateSpec::Fock { n: 1 }, &Prior::default_for(RepKind::Optical))
        .and_then(|j| stationary_residual_optical(&j, &v, 1.5 * hw, false))
        .map(|r| (r.relative, String::new()));
    ctx.push(8, "optical stationary residual fock:n=1, two-component prior", r, 4e-2, Comparison::AtMost, t);
}

fn evolution(ctx: &mut Ctx) {
    let params = ctx.params();
    let v = PolynomialPotential::harmonic(&params);
    let alpha = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let x = ctx.x();
    for kind in [RepKind::Symplectic, RepKind::Optical] {
        let prior = Prior::default_for(kind);
        let axes = match kind {
            RepKind::Symplectic => ctx.sym_axes(),
            RepKind::Optical => ctx.opt_axes(),
        };
        for time in [0.0, 0.3] {
            let t = Instant::now();
            let r = (|| {
                let j = coherent_joint_trajectory(alpha, time, &prior, &params, &x, &axes)?;
                let rhs = evolution_rhs(&j, &v)?;
                let fd = coherent_time_derivative(alpha, time, &prior, &params, &x, &axes)?;
                Ok((residual("evolution", kind, &rhs, &fd)?.relative, String::new()))
            })();
            ctx.push(9, format!("evolution RHS vs ∂_t of coherent trajectory ({kind}, t = {time})"), r, 3e-2, Comparison::AtMost, t);
        }
        let t = Instant::now();
        let r = ctx
            .exact_joint(&StateSpec::Fock { n: 0 }, &prior)
            .and_then(|j| evolution_stationarity(&j, &v))
            .map(|r| (r.relative, "drift term vs −(2/ħ)Im V term".to_string()));
        ctx.push(9, format!("evolution RHS ≡ 0 for fock:n=0 ({kind})"), r, 2e-2, Comparison::AtMost, t);
    }
    let t = Instant::now();
    let prior = Prior::default_for(RepKind::Symplectic);
    let axes = ctx.sym_axes();
    let r = (|| {
        let j0 = coherent_joint_trajectory(alpha, 0.0, &prior, &params, &x, &axes)?;
        let bound = stability_bound(&j0, &v, 12)?;
        let horizon = 0.5;
        let steps = (horizon / (0.8 * bound)).ceil().max(1.0) as usize;
        let out = step_evolution(&j0, &v, horizon / steps as f64, steps, None)?;
        let exact = coherent_joint_trajectory(alpha, horizon, &prior, &params, &x, &axes)?;
        let rel = relative_difference(&out.joint.grid, &exact.grid, RepKind::Symplectic)?;
        Ok((rel, format!("{steps} RK4 steps, stability bound {bound:.3}, mass drift {:.2e}", out.mass_drift)))
    })();
    let drift = r
        .as_ref()
        .ok()
        .and_then(|(_, d)| d.rsplit(' ').next().and_then(|v| v.parse::<f64>().ok()));
    ctx.push(9, "RK4 integration to t = 0.5 vs analytic trajectory (symplectic)", r, 5e-2, Comparison::AtMost, t);
    let t = Instant::now();
    let r = drift
        .map(|d| (d, String::new()))
        .ok_or_else(|| Error::Numeric("integration did not complete".into()));
    ctx.push(9, "mass drift of the integration", r, 1e-2, Comparison::AtMost, t);
}

fn reconstruction(ctx: &mut Ctx) {
    let params = ctx.params();
    let g = ctx.cfg.grids;
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let states = [
        StateSpec::Fock { n: 0 },
        StateSpec::Coherent { re: r2, im: 0.0 },
        StateSpec::Coherent { re: r2, im: r2 },
        StateSpec::Squeezed { q: 0.0, p: 0.0, s: 0.5 },
        StateSpec::Squeezed { q: 0.0, p: 0.0, s: 2.0 },
    ];
    let prior = Prior::default_for(RepKind::Symplectic);
    let t = Instant::now();
    let mut items = Vec::new();
    let mut err = None;
    for s in &states {
        let r = (|| {
            let j = ctx.joint(s, &prior)?;
            let w = wigner_from_symplectic(&recover_conditional(&j)?, &g.q, &g.p)?;
            let w0 = wigner(s, &params, &g.q, &g.p)?;
            let d = w
                .grid
                .values()
                .iter()
                .zip(w0.grid.values())
                .enumerate()
                .filter(|(i, _)| {
                    let c = w0.grid.coords(*i);
                    c[0].abs() <= 0.5 * g.q.max.max(-g.q.min) && c[1].abs() <= 0.5 * g.p.max.max(-g.p.min)
                })
                .map(|(_, (a, b))| (a - b).abs())
                .fold(0.0, f64::max);
            Ok((d, s.to_string()))
        })();
        match r {
            Ok(v) => items.push(v),
            Err(e) => err = Some(e),
        }
    }
    let r = match err {
        Some(e) => Err(e),
        None => Ok(worst(items)),
    };
    ctx.push(10, "Wigner → joint → ÷P → Wigner (central half-grid)", r, 5e-3, Comparison::AtMost, t);
}

fn deviation_ledger(ctx: &mut Ctx) {
    let t = Instant::now();
    let notes = deviation_notices();
    let required = ["identity-symbol-exponent", "stationary-nu-shift"];
    let present = required.iter().filter(|id| notes.iter().any(|n| n.id == **id)).count();
    let r = (|| {
        let g = GaussianPrior::new(0.0, 0.5, 1.0, 1.0)?;
        let j = ctx.exact_joint(&StateSpec::Fock { n: 0 }, &Prior::Symplectic(g))?;
        let s = stationary_residual_symplectic(&j, &PolynomialPotential::harmonic(&ctx.params()), 0.5, true)?;
        Ok((
            present as f64,
            format!(
                "printed vs derived stationary kinetic term at ν₀ = 0.5: {:.3e}",
                s.printed_discrepancy.unwrap_or(f64::NAN)
            ),
        ))
    })();
    ctx.push(11, "deviation ledger lists both printed-formula discrepancies", r, 2.0, Comparison::AtLeast, t);
}

/// Ratio of the prior mass inside the parameter grid, a diagnostic for
/// choosing grids.
pub fn prior_mass(prior: &Prior, axes: &[Axis]) -> f64 {
    integrate_all(&GridFn::from_fn(axes.to_vec(), |c| prior.value(c)))
}
