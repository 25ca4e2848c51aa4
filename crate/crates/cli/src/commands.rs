//! Command bodies; each writes its files under `cfg.out` and prints a summary.

use std::io::Write;
use std::path::Path;

use jointprob::dynamics::{
    coherent_joint_trajectory, coherent_time_derivative, evolution_rhs, evolution_stationarity, residual,
    stability_bound, stationarity_condition_symplectic, stationary_residual_optical, stationary_residual_symplectic,
    step_evolution, PolynomialPotential, ResidualReport,
};
use jointprob::gridcalc::io::{load_real, save};
use jointprob::gridcalc::GridSet;
use jointprob::jointdist::{make_joint, recover_conditional, JointDistribution, Prior};
use jointprob::states::{wigner, OscillatorParams, StateSpec, WignerFn};
use jointprob::symbols::{pair, regular_symbol, singular_symbol, SingularName, Symbol, SymbolName};
use jointprob::tomography::{
    optical_tomogram, symplectic_tomogram, tomogram_analytic, wigner_from_symplectic, RepKind, Tomogram,
};
use jointprob::verify::{oracle, run as run_verify, scaled_error, VerifyConfig};
use jointprob::{Complex64, GridFn};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{svg, Check, Cli, CliError, Command, Method, SymbolForm, EXIT_VERIFY_FAILED};

type Res<T> = Result<T, CliError>;

pub fn run(cli: &Cli, mut cfg: RunConfig) -> Res<u8> {
    let json_out = cli.global.json;
    match &cli.command {
        Command::Tomogram {
            state,
            rep,
            prior,
            method,
            svg,
            svg_nu,
        } => {
            let setup = Setup::resolve(&mut cfg, state.as_deref(), rep.map(Into::into), prior.as_deref())?;
            tomogram(&cfg, &setup, *method, *svg, *svg_nu, json_out)
        }
        Command::Expect {
            op,
            symbol,
            state,
            rep,
            prior,
            method,
        } => {
            let setup = Setup::resolve(&mut cfg, state.as_deref(), rep.map(Into::into), prior.as_deref())?;
            expect(&cfg, &setup, op, *symbol, *method)
        }
        Command::Residual {
            check,
            rep,
            state,
            prior,
            energy,
            printed_form,
            single_peak,
            potential,
            time,
            method,
        } => {
            let setup = Setup::resolve(&mut cfg, state.as_deref(), rep.map(Into::into), prior.as_deref())?;
            let v = potential_of(&mut cfg, potential.as_deref())?;
            let opts = ResidualOpts {
                check: *check,
                energy: *energy,
                printed_form: *printed_form,
                single_peak: *single_peak,
                time: *time,
                method: *method,
            };
            residual_cmd(&cfg, &setup, &v, &opts)
        }
        Command::Evolve {
            state,
            rep,
            prior,
            dt,
            steps,
            snapshot_every,
            potential,
            method,
        } => {
            let setup = Setup::resolve(&mut cfg, state.as_deref(), rep.map(Into::into), prior.as_deref())?;
            let v = potential_of(&mut cfg, potential.as_deref())?;
            evolve(&cfg, &setup, &v, *dt, *steps, *snapshot_every, *method, json_out)
        }
        Command::Reconstruct { state, from, prior, svg } => reconstruct(&mut cfg, state.as_deref(), from.as_deref(), prior.as_deref(), *svg, json_out),
        Command::Verify {
            criteria,
            fock0_energy,
            random_functions,
        } => {
            let mut vc = VerifyConfig {
                params: cfg.params,
                grids: cfg.grids,
                seed: cfg.seed,
                fock0_energy: *fock0_energy,
                criteria: criteria.clone(),
                ..VerifyConfig::default()
            };
            if let Some(n) = random_functions {
                vc.random_functions = *n;
            }
            let report = run_verify(&vc);
            std::fs::create_dir_all(&cfg.out)?;
            let doc = json!({ "config": cfg, "report": report });
            std::fs::write(cfg.out.join("verify_report.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
            if json_out {
                emit(&serde_json::to_string_pretty(&report)?);
            } else {
                emit(report.table().trim_end());
            }
            Ok(if report.passed { 0 } else { EXIT_VERIFY_FAILED })
        }
    }
}

/// State, representation and prior after merging flags into the config.
struct Setup {
    state: StateSpec,
    kind: RepKind,
    prior: Prior,
}

impl Setup {
    fn resolve(cfg: &mut RunConfig, state: Option<&str>, rep: Option<RepKind>, prior: Option<&str>) -> Res<Self> {
        if let Some(s) = state {
            cfg.state = Some(s.to_string());
        }
        if let Some(p) = prior {
            cfg.prior = Some(p.to_string());
        }
        let text = cfg
            .state
            .clone()
            .ok_or_else(|| CliError::Usage("a state spec is required (--state or config `state`)".into()))?;
        let state: StateSpec = text.parse()?;
        let prior: Option<Prior> = cfg.prior.as_deref().map(str::parse).transpose()?;
        let kind = match (rep, &prior) {
            (Some(k), _) => k,
            (None, Some(p)) if cfg.prior.is_some() => p.kind(),
            _ => cfg.rep,
        };
        cfg.rep = kind;
        let prior = prior.unwrap_or_else(|| Prior::default_for(kind));
        if prior.kind() != kind {
            return Err(CliError::Usage(format!("prior `{prior}` does not belong to the {kind} representation")));
        }
        Ok(Self { state, kind, prior })
    }

    fn axes(&self, g: &GridSet) -> Vec<jointprob::Axis> {
        match self.kind {
            RepKind::Symplectic => vec![g.mu, g.nu],
            RepKind::Optical => vec![g.theta],
        }
    }

    fn tomogram(&self, cfg: &RunConfig, method: Method) -> Res<Tomogram> {
        let g = &cfg.grids;
        Ok(match method {
            Method::Analytic => tomogram_analytic(&self.state, &cfg.params, self.kind, &g.x, &self.axes(g))?,
            Method::Numeric => {
                let w = wigner(&self.state, &cfg.params, &g.q, &g.p)?;
                match self.kind {
                    RepKind::Symplectic => symplectic_tomogram(&w, &g.x, &g.mu, &g.nu)?,
                    RepKind::Optical => optical_tomogram(&w, &g.x, &g.theta)?,
                }
            }
        })
    }

    fn joint(&self, cfg: &RunConfig, method: Method) -> Res<JointDistribution> {
        Ok(make_joint(&self.tomogram(cfg, method)?, &self.prior)?)
    }
}

fn potential_of(cfg: &mut RunConfig, flag: Option<&str>) -> Res<PolynomialPotential> {
    if let Some(s) = flag {
        cfg.potential = s.parse::<PolynomialPotential>()?.coefficients().to_vec();
    }
    Ok(if cfg.potential.is_empty() {
        PolynomialPotential::harmonic(&cfg.params)
    } else {
        PolynomialPotential::new(cfg.potential.clone())?
    })
}

fn axis_names(kind: RepKind) -> &'static [&'static str] {
    match kind {
        RepKind::Symplectic => &["X", "mu", "nu"],
        RepKind::Optical => &["X", "theta"],
    }
}

fn ensure_finite(f: &GridFn<f64>, what: &str) -> Res<()> {
    if f.all_finite() {
        Ok(())
    } else {
        Err(jointprob::Error::Numeric(format!("non-finite values in {what}")).into())
    }
}

/// Prints a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_summary(summary: &Value, json_out: bool) -> Res<()> {
    if json_out {
        emit(&serde_json::to_string_pretty(summary)?);
    } else if let Value::Object(map) = summary {
        for (k, v) in map {
            if k != "config" {
                emit(&format!("{k}: {v}"));
            }
        }
    }
    Ok(())
}

/// 2-D view for plotting: `(X, θ)` as is, `(X, μ)` at fixed `ν`.
fn plot_slice(f: &GridFn<f64>, kind: RepKind, nu: f64) -> Res<GridFn<f64>> {
    Ok(match kind {
        RepKind::Optical => f.clone(),
        RepKind::Symplectic => f.slice_at(2, nu)?,
    })
}

fn write_svg(dir: &Path, name: &str, body: String) -> Res<String> {
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path.display().to_string())
}

fn tomogram(cfg: &RunConfig, s: &Setup, method: Method, want_svg: bool, svg_nu: f64, json_out: bool) -> Res<u8> {
    let t = s.tomogram(cfg, method)?;
    ensure_finite(&t.grid, "tomogram")?;
    let masses = t.slice_masses();
    let (lo, hi) = masses
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
    let names = axis_names(s.kind);
    let meta = json!({
        "config": cfg,
        "state": s.state.to_string(),
        "representation": s.kind,
        "method": format!("{method:?}").to_lowercase(),
        "slice_mass_min": lo,
        "slice_mass_max": hi,
        "renormalized_slices": t.renormalized.len(),
        "warnings": t.warnings,
    });
    let (csv, header) = save(&t.grid, &cfg.out, "tomogram", names, meta)?;
    let mut files = vec![csv.display().to_string(), header.display().to_string()];
    let joint = if cfg.prior.is_some() {
        let j = make_joint(&t, &s.prior)?;
        ensure_finite(&j.grid, "joint distribution")?;
        let meta = json!({
            "config": cfg,
            "state": s.state.to_string(),
            "prior": s.prior.to_string(),
            "total_mass": j.total_mass(),
        });
        let (csv, header) = save(&j.grid, &cfg.out, "joint", names, meta)?;
        files.push(csv.display().to_string());
        files.push(header.display().to_string());
        Some(j)
    } else {
        None
    };
    if want_svg {
        let (xl, yl, title) = match s.kind {
            RepKind::Optical => ("X".to_string(), "θ".to_string(), format!("optical tomogram {}", s.state)),
            RepKind::Symplectic => ("X".to_string(), "μ".to_string(), format!("symplectic tomogram {} at ν = {svg_nu}", s.state)),
        };
        let view = plot_slice(&t.grid, s.kind, svg_nu)?;
        files.push(write_svg(&cfg.out, "tomogram.svg", svg::heatmap(&view, &xl, &yl, &title))?);
        if let Some(j) = &joint {
            let view = plot_slice(&j.grid, s.kind, svg_nu)?;
            files.push(write_svg(&cfg.out, "joint.svg", svg::heatmap(&view, &xl, &yl, &format!("joint {title}")))?);
        }
    }
    print_summary(
        &json!({
            "state": s.state.to_string(),
            "representation": s.kind,
            "points": t.grid.len(),
            "slice_mass_min": lo,
            "slice_mass_max": hi,
            "files": files,
        }),
        json_out,
    )?;
    Ok(0)
}

fn expect(cfg: &RunConfig, s: &Setup, op: &str, form: SymbolForm, method: Method) -> Res<u8> {
    let symbol = match form {
        SymbolForm::Regular => {
            let name: SymbolName = op.parse()?;
            Symbol::Regular(regular_symbol(name, s.kind, &s.prior, &cfg.params)?)
        }
        SymbolForm::Singular => {
            if s.kind != RepKind::Symplectic {
                return Err(CliError::Usage("singular symbols exist only in the symplectic representation".into()));
            }
            let name: SingularName = op.parse()?;
            Symbol::Singular(singular_symbol(name, s.prior.as_gaussian()?, &cfg.params)?)
        }
    };
    let joint = s.joint(cfg, method)?;
    let value = pair(&symbol, &joint)?;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(jointprob::Error::Numeric(format!("non-finite expectation value {value}")).into());
    }
    let reference = op.parse::<SymbolName>().ok().map(|n| oracle(&s.state, &cfg.params, n));
    let mut out = json!({
        "op": op,
        "symbol": format!("{form:?}").to_lowercase(),
        "representation": s.kind,
        "state": s.state.to_string(),
        "prior": s.prior.to_string(),
        "re": value.re,
        "im": value.im,
        "config": cfg,
    });
    if let Some(o) = reference {
        out["oracle"] = json!({ "re": o.re, "im": o.im });
        out["deviation"] = json!(scaled_error(value, o));
    }
    emit(&serde_json::to_string_pretty(&out)?);
    Ok(0)
}

struct ResidualOpts {
    check: Check,
    energy: Option<f64>,
    printed_form: bool,
    single_peak: bool,
    time: f64,
    method: Method,
}

fn harmonic(v: &PolynomialPotential, params: &OscillatorParams) -> bool {
    v.coefficients() == PolynomialPotential::harmonic(params).coefficients()
}

fn residual_cmd(cfg: &RunConfig, s: &Setup, v: &PolynomialPotential, o: &ResidualOpts) -> Res<u8> {
    let coherent = match s.state {
        StateSpec::Coherent { re, im } => Some(Complex64::new(re, im)),
        _ => None,
    };
    if o.time != 0.0 && (o.check != Check::Evolution || coherent.is_none()) {
        return Err(CliError::Usage("--time applies only to the evolution check of coherent states".into()));
    }
    let report: ResidualReport = match o.check {
        Check::Evolution => match coherent {
            Some(alpha) if harmonic(v, &cfg.params) => {
                let g = &cfg.grids;
                let axes = s.axes(g);
                let joint = coherent_joint_trajectory(alpha, o.time, &s.prior, &cfg.params, &g.x, &axes)?;
                let rhs = evolution_rhs(&joint, v)?;
                let fd = coherent_time_derivative(alpha, o.time, &s.prior, &cfg.params, &g.x, &axes)?;
                residual(&format!("evolution right-hand side vs ∂_t ({})", s.kind), s.kind, &rhs, &fd)?
            }
            _ => evolution_stationarity(&s.joint(cfg, o.method)?, v)?,
        },
        Check::Stationary => {
            let e = o
                .energy
                .ok_or_else(|| CliError::Usage("the stationary check needs --energy".into()))?;
            let joint = s.joint(cfg, o.method)?;
            match s.kind {
                RepKind::Symplectic => stationary_residual_symplectic(&joint, v, e, o.printed_form)?,
                RepKind::Optical => stationary_residual_optical(&joint, v, e, o.single_peak)?,
            }
        }
        Check::Condition => {
            let joint = s.joint(cfg, o.method)?;
            match s.kind {
                RepKind::Symplectic => stationarity_condition_symplectic(&joint, v)?,
                RepKind::Optical => evolution_stationarity(&joint, v)?,
            }
        }
    };
    let report = report.with_state(&s.state);
    if !report.relative.is_finite() {
        return Err(jointprob::Error::Numeric("non-finite residual".into()).into());
    }
    let mut out = serde_json::to_value(&report)?;
    out["config"] = serde_json::to_value(cfg)?;
    emit(&serde_json::to_string_pretty(&out)?);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    cfg: &RunConfig,
    s: &Setup,
    v: &PolynomialPotential,
    dt: Option<f64>,
    steps: usize,
    every: Option<usize>,
    method: Method,
    json_out: bool,
) -> Res<u8> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    let j0 = s.joint(cfg, method)?;
    let bound = stability_bound(&j0, v, 12)?;
    let dt = dt.unwrap_or(0.8 * bound);
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("time step {dt} must be positive")));
    }
    if dt > bound {
        eprintln!("warning: dt = {dt} exceeds the estimated stability bound {bound:.4}");
    }
    let every = every.unwrap_or(steps).max(1);
    let outcome = step_evolution(&j0, v, dt, steps, Some(every))?;
    let mut frames = outcome.snapshots.clone();
    if frames.last().map(|(t, _)| (t - outcome.time).abs() > 1e-12).unwrap_or(true) {
        frames.push((outcome.time, outcome.joint.grid.clone()));
    }
    let names = axis_names(s.kind);
    let mut files = Vec::new();
    for (k, (t, grid)) in frames.iter().enumerate() {
        ensure_finite(grid, "evolution frame")?;
        let meta = json!({ "config": cfg, "frame": k, "time": t, "dt": dt });
        let (csv, _) = save(grid, &cfg.out, &format!("frame_{k:04}"), names, meta)?;
        files.push(csv.display().to_string());
    }
    let summary = json!({
        "config": cfg,
        "state": s.state.to_string(),
        "representation": s.kind,
        "dt": dt,
        "steps": steps,
        "time": outcome.time,
        "stability_bound": bound,
        "mass_drift": outcome.mass_drift,
        "frames": files,
    });
    std::fs::write(cfg.out.join("evolve.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    print_summary(&summary, json_out)?;
    Ok(0)
}

/// Max abs difference over the central half of both phase-space axes.
fn central_error(a: &WignerFn, b: &WignerFn) -> f64 {
    let (ga, gb) = (&a.grid, &b.grid);
    let (nq, np) = (ga.axes()[0].count, ga.axes()[1].count);
    let mut err: f64 = 0.0;
    for i in nq / 4..nq - nq / 4 {
        for j in np / 4..np - np / 4 {
            err = err.max((ga.get(&[i, j]) - gb.get(&[i, j])).abs());
        }
    }
    err
}

fn reconstruct(
    cfg: &mut RunConfig,
    state: Option<&str>,
    from: Option<&Path>,
    prior: Option<&str>,
    want_svg: bool,
    json_out: bool,
) -> Res<u8> {
    cfg.rep = RepKind::Symplectic;
    if let Some(p) = prior {
        cfg.prior = Some(p.to_string());
    }
    let prior: Prior = match &cfg.prior {
        Some(p) => p.parse()?,
        None => Prior::default_for(RepKind::Symplectic),
    };
    let g = cfg.grids;
    let (tomo, reference) = match from {
        Some(path) => {
            let header = path.with_extension("json");
            let (h, grid) = load_real(path, &header)?;
            if h.axes.len() != 3 {
                return Err(CliError::Usage(format!("{} is not a symplectic (X, μ, ν) grid", path.display())));
            }
            let t = Tomogram {
                kind: RepKind::Symplectic,
                grid,
                params: cfg.params,
                renormalized: Vec::new(),
                origin: None,
                warnings: Vec::new(),
            };
            (t, None)
        }
        None => {
            if let Some(s) = state {
                cfg.state = Some(s.to_string());
            }
            let text = cfg
                .state
                .clone()
                .ok_or_else(|| CliError::Usage("reconstruct needs --state or --from".into()))?;
            let spec: StateSpec = text.parse()?;
            let w = wigner(&spec, &cfg.params, &g.q, &g.p)?;
            let t = symplectic_tomogram(&w, &g.x, &g.mu, &g.nu)?;
            (t, Some(w))
        }
    };
    let joint = make_joint(&tomo, &prior)?;
    let w = wigner_from_symplectic(&recover_conditional(&joint)?, &g.q, &g.p)?;
    ensure_finite(&w.grid, "reconstructed Wigner function")?;
    let error = reference.as_ref().map(|r| central_error(&w, r));
    let meta = json!({
        "config": cfg,
        "prior": prior.to_string(),
        "normalization": w.normalization(),
        "max_abs_error_central": error,
    });
    let (csv, header) = save(&w.grid, &cfg.out, "wigner", &["q", "p"], meta)?;
    let mut files = vec![csv.display().to_string(), header.display().to_string()];
    if want_svg {
        files.push(write_svg(&cfg.out, "wigner.svg", svg::heatmap(&w.grid, "q", "p", "reconstructed Wigner function"))?);
    }
    print_summary(
        &json!({
            "normalization": w.normalization(),
            "max_abs_error_central": error,
            "files": files,
        }),
        json_out,
    )?;
    Ok(0)
}
