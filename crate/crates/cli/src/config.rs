//! Run configuration: defaults, then a JSON config file, then flags.

use std::path::{Path, PathBuf};

use jointprob::gridcalc::GridSet;
use jointprob::states::OscillatorParams;
use jointprob::tomography::RepKind;
use jointprob::Axis;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a run depends on; a run is reproducible from this alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub state: Option<String>,
    pub prior: Option<String>,
    pub rep: RepKind,
    pub params: OscillatorParams,
    pub grids: GridSet,
    /// `V(q) = Σ c_k qᵏ`; empty means the harmonic potential of `params`.
    pub potential: Vec<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            state: None,
            prior: None,
            rep: RepKind::Symplectic,
            params: OscillatorParams::default(),
            grids: GridSet::default(),
            potential: Vec::new(),
            out: PathBuf::from("out"),
            seed: jointprob::verify::VerifyConfig::default().seed,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Parses `name:min,max,n`.
pub fn parse_grid(spec: &str) -> Result<(String, Axis), CliError> {
    let bad = || CliError::Usage(format!("grid override `{spec}` is not of the form name:min,max,n"));
    let (name, rest) = spec.split_once(':').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    let [min, max, n] = parts.as_slice() else {
        return Err(bad());
    };
    let min: f64 = min.parse().map_err(|_| bad())?;
    let max: f64 = max.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    let axis = Axis::new(min, max, n).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((name.trim().to_string(), axis))
}

/// Applies `--grid` overrides; `x` also moves `q` and `p` unless they are
/// overridden explicitly.
pub fn apply_grids(grids: &mut GridSet, overrides: &[String]) -> Result<(), CliError> {
    let parsed = overrides.iter().map(|s| parse_grid(s)).collect::<Result<Vec<_>, _>>()?;
    let explicit_qp = parsed.iter().any(|(n, _)| n == "q" || n == "p");
    for (name, axis) in &parsed {
        grids.set(name, *axis).map_err(|e| CliError::Usage(e.to_string()))?;
        if (name == "x" || name == "X") && !explicit_qp {
            grids.q = *axis;
            grids.p = *axis;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_override_parses() {
        let (name, axis) = parse_grid("mu:-2,2,41").unwrap();
        assert_eq!(name, "mu");
        assert_eq!(axis, Axis::new(-2.0, 2.0, 41).unwrap());
        assert!(parse_grid("mu:-2,2").is_err());
        assert!(parse_grid("mu-2,2,41").is_err());
    }

    #[test]
    fn x_override_moves_phase_space_axes() {
        let mut g = GridSet::default();
        apply_grids(&mut g, &["x:-6,6,121".into()]).unwrap();
        assert_eq!(g.q, g.x);
        apply_grids(&mut g, &["x:-5,5,101".into(), "q:-6,6,121".into()]).unwrap();
        assert_eq!(g.q.count, 121);
        assert_eq!(g.p.count, 121);
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut c = RunConfig::default();
        c.state = Some("fock:n=1".into());
        c.potential = vec![0.0, 0.0, 0.5];
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let partial: RunConfig = serde_json::from_str(r#"{"state": "fock:n=2"}"#).unwrap();
        assert_eq!(partial.grids, GridSet::default());
    }
}
