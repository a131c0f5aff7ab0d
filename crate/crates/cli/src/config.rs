//! TOML run configuration. Every key is optional; omitted keys take the
//! reference scenario values.

use std::path::PathBuf;

use serde::Deserialize;
use stringopt_core::linalg::NewtonConfig;
use stringopt_core::mesh::SpaceTimeMesh;
use stringopt_core::model::MaterialParams;
use stringopt_core::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSection {
    pub rho_a: f64,
    pub ea: f64,
    pub length: f64,
    pub gravity: f64,
    pub dim: usize,
}

impl Default for MaterialSection {
    fn default() -> Self {
        let p = MaterialParams::default();
        MaterialSection {
            rho_a: p.rho_a,
            ea: p.ea,
            length: p.length,
            gravity: p.gravity,
            dim: p.dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub alpha: f64,
    /// Duration of the pre- and post-actuation phases.
    pub phase: f64,
    /// Tip displacement; all ones when omitted.
    pub direction: Option<Vec<f64>>,
    /// Suspension point of the initial rest state; the origin when omitted.
    pub anchor: Option<Vec<f64>>,
    pub t_start: f64,
    pub t_end: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            alpha: 100.0,
            phase: 2.0,
            direction: None,
            anchor: None,
            t_start: 0.0,
            t_end: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationSection {
    pub n_s: usize,
    pub n_t: usize,
    /// Step of the verification simulation.
    pub tau: f64,
    pub quadrature_order: usize,
}

impl Default for DiscretizationSection {
    fn default() -> Self {
        DiscretizationSection {
            n_s: 10,
            n_t: 100,
            tau: 0.06,
            quadrature_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub contraction: f64,
    pub max_backtracks: usize,
    pub continuation_steps: usize,
    /// Newton tolerance of each simulation step.
    pub step_tolerance: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let n = NewtonConfig::default();
        SolverSection {
            tolerance: n.tolerance,
            max_iterations: n.max_iterations,
            contraction: n.contraction,
            max_backtracks: n.max_backtracks,
            continuation_steps: n.continuation_steps,
            step_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Artifact {
    Setpoints,
    Field,
    Control,
    Output,
    Snapshots,
}

impl Artifact {
    pub const ALL: [Artifact; 5] = [
        Artifact::Setpoints,
        Artifact::Field,
        Artifact::Control,
        Artifact::Output,
        Artifact::Snapshots,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Artifact::Setpoints => "setpoints.csv",
            Artifact::Field => "field.csv",
            Artifact::Control => "control.csv",
            Artifact::Output => "output.csv",
            Artifact::Snapshots => "snapshots.csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub artifacts: Vec<Artifact>,
    /// Five equispaced instants over the horizon when omitted.
    pub snapshot_times: Option<Vec<f64>>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            artifacts: Artifact::ALL.to_vec(),
            snapshot_times: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSection,
    pub scenario: ScenarioSection,
    pub discretization: DiscretizationSection,
    pub solver: SolverSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn material(&self) -> MaterialParams {
        let m = &self.material;
        MaterialParams {
            rho_a: m.rho_a,
            ea: m.ea,
            length: m.length,
            gravity: m.gravity,
            dim: m.dim,
        }
    }

    pub fn direction(&self) -> Vec3 {
        let mut d = [0.0; 3];
        match &self.scenario.direction {
            Some(v) => d[..v.len().min(3)].copy_from_slice(&v[..v.len().min(3)]),
            None => d[..self.material.dim.min(3)].iter_mut().for_each(|x| *x = 1.0),
        }
        d
    }

    pub fn anchor(&self) -> Vec3 {
        let mut a = [0.0; 3];
        if let Some(v) = &self.scenario.anchor {
            a[..v.len().min(3)].copy_from_slice(&v[..v.len().min(3)]);
        }
        a
    }

    pub fn newton(&self) -> NewtonConfig {
        let s = &self.solver;
        NewtonConfig {
            tolerance: s.tolerance,
            max_iterations: s.max_iterations,
            contraction: s.contraction,
            max_backtracks: s.max_backtracks,
            continuation_steps: s.continuation_steps,
        }
    }

    pub fn step_newton(&self) -> NewtonConfig {
        self.newton().with_tolerance(self.solver.step_tolerance)
    }

    pub fn mesh(&self) -> Result<SpaceTimeMesh, ConfigError> {
        let d = &self.discretization;
        SpaceTimeMesh::new(d.n_s, d.n_t, self.material.length, self.scenario.t_start, self.scenario.t_end)
            .map_err(|e| ConfigError::Validation(e.to_string()))
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        let (a, b) = (self.scenario.t_start, self.scenario.t_end);
        match &self.output.snapshot_times {
            Some(t) => t.clone(),
            None => (0..5).map(|k| a + (b - a) * k as f64 / 4.0).collect(),
        }
    }

    pub fn wants(&self, artifact: Artifact) -> bool {
        self.output.artifacts.contains(&artifact)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Validation(msg));
        self.material()
            .validate()
            .map_err(|e| ConfigError::Validation(e.to_string()))?;
        let sc = &self.scenario;
        if !(sc.alpha > 0.0) {
            return bad(format!("scenario.alpha = {} must be positive", sc.alpha));
        }
        if !(sc.phase > 0.0) {
            return bad(format!("scenario.phase = {} must be positive", sc.phase));
        }
        for (key, vector) in [("direction", &sc.direction), ("anchor", &sc.anchor)] {
            if let Some(v) = vector {
                if v.len() != self.material.dim {
                    return bad(format!(
                        "scenario.{key} has {} entries, material.dim is {}",
                        v.len(),
                        self.material.dim
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return bad(format!("scenario.{key} must be finite"));
                }
            }
        }
        self.mesh()?;
        let dz = &self.discretization;
        if !(1..=5).contains(&dz.quadrature_order) {
            return bad(format!("discretization.quadrature_order = {} is outside 1..=5", dz.quadrature_order));
        }
        let span = sc.t_end - sc.t_start;
        if !(dz.tau > 0.0) {
            return bad(format!("discretization.tau = {} must be positive", dz.tau));
        }
        let steps = (span / dz.tau).round();
        if steps < 1.0 || (steps * dz.tau - span).abs() > 1e-9 * span {
            return bad(format!("discretization.tau = {} does not divide the horizon {span}", dz.tau));
        }
        self.newton()
            .validate()
            .map_err(|e| ConfigError::Validation(format!("solver: {e}")))?;
        if !(self.solver.step_tolerance > 0.0) {
            return bad("solver.step_tolerance must be positive".into());
        }
        for &t in &self.snapshot_times() {
            if !(t >= sc.t_start && t <= sc.t_end) {
                return bad(format!("snapshot time {t} lies outside [{}, {}]", sc.t_start, sc.t_end));
            }
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Time-of-flight check: a wave needs `L / c` to cross the string, which
/// should be shorter than the pre-/post-actuation phase.
pub fn wave_speed_warning(cfg: &RunConfig) -> Option<String> {
    let params = cfg.material();
    let travel = params.length / params.wave_speed();
    (travel >= cfg.scenario.phase).then(|| {
        format!(
            "wave travel time L/c = {travel:.4} is not shorter than the actuation phase {:.4}; \
             the transition may be infeasible without large inputs",
            cfg.scenario.phase
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_reference_scenario() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.material(), MaterialParams::default());
        assert_eq!(cfg.direction(), [1.0, 1.0, 0.0]);
        assert_eq!(cfg.scenario.alpha, 100.0);
        assert_eq!((cfg.discretization.n_s, cfg.discretization.n_t), (10, 100));
        assert_eq!(cfg.snapshot_times(), vec![0.0, 1.5, 3.0, 4.5, 6.0]);
        assert_eq!(cfg.newton(), NewtonConfig::default());
    }

    #[test]
    fn single_override() {
        let cfg = parse_config("[discretization]\nn_t = 50\n").unwrap();
        let mut expected = RunConfig::default();
        expected.discretization.n_t = 50;
        assert_eq!(cfg, expected);
    }

    #[test]
    fn rejects_bad_values() {
        let err = parse_config("[scenario]\nalpha = -1.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Validation(ref m) if m.contains("alpha")), "{err}");
        assert!(parse_config("[scenario]\ndirection = [1.0]\n").is_err());
        assert!(parse_config("[discretization]\ntau = 0.07\n").is_err());
        assert!(parse_config("[material]\ndim = 4\n").is_err());
        assert!(parse_config("[output]\nsnapshot_times = [7.0]\n").is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_config("[material]\ndensity = 3.0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(ref m) if m.contains("density")), "{err}");
        assert!(parse_config("[plotting]\n").is_err());
        let err = parse_config("[scenario]\nalpha = \"big\"\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn three_dimensional_defaults() {
        let cfg = parse_config("[material]\ndim = 3\n").unwrap();
        assert_eq!(cfg.direction(), [1.0, 1.0, 1.0]);
        let cfg = parse_config("[material]\ndim = 3\n[scenario]\ndirection = [1.0, 0.0, 0.0]\n").unwrap();
        assert_eq!(cfg.direction(), [1.0, 0.0, 0.0]);
        assert_eq!(cfg.anchor(), [0.0; 3]);
        assert!(parse_config("[scenario]\nanchor = [1.0, 1.0, 1.0]\n").is_err());
        let cfg = parse_config("[scenario]\nanchor = [1.0, 1.0]\n").unwrap();
        assert_eq!(cfg.anchor(), [1.0, 1.0, 0.0]);
    }

    #[test]
    fn artifacts_subset() {
        let cfg = parse_config("[output]\nartifacts = [\"control\", \"output\"]\n").unwrap();
        assert!(cfg.wants(Artifact::Control) && !cfg.wants(Artifact::Field));
    }

    #[test]
    fn wave_speed_diagnostic() {
        assert!(wave_speed_warning(&RunConfig::default()).is_none());
        let cfg = parse_config("[scenario]\nphase = 0.5\n").unwrap();
        assert!(wave_speed_warning(&cfg).is_some());
    }
}
