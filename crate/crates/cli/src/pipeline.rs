//! Stages of a run: rest states, optimal control, verification by time
//! stepping. Each stage can run alone from the files of the previous one.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use stringopt_core::mesh::SpaceTimeMesh;
use stringopt_core::model::{MaterialParams, Trajectory};
use stringopt_core::ocp::{solve_ocp, ControlSeries, CostBreakdown, OcpProblem, OcpSolution};
use stringopt_core::simulate::{run_simulation, SimResult, TrackingMetrics};
use stringopt_core::statics::{build_setpoints_at, node_value, SemiDiscreteSystem, SetPoints};
use stringopt_core::Vec3;

use crate::config::{wave_speed_warning, Artifact, RunConfig};
use crate::csv_io;
use crate::CliError;

/// Everything the solve and simulate stages need besides the control.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: MaterialParams,
    pub mesh: SpaceTimeMesh,
    pub trajectory: Trajectory,
    pub setpoints: SetPoints,
}

impl Scenario {
    /// Rest states from the static equilibrium.
    pub fn from_config(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let params = cfg.material();
        let mesh = cfg.mesh()?;
        let direction = cfg.direction();
        let draft = Trajectory::new(cfg.scenario.phase, direction, [0.0; 3])?;
        let setpoints = build_setpoints_at(&mesh.spatial(), &params, &cfg.anchor(), &draft, &cfg.newton())?;
        Ok(Self::with_setpoints(cfg, params, mesh, setpoints)?)
    }

    /// Rest states read from a setpoints file.
    pub fn from_file(cfg: &RunConfig, path: &Path) -> Result<Self, CliError> {
        cfg.validate()?;
        let params = cfg.material();
        let mesh = cfg.mesh()?;
        let setpoints = csv_io::read_setpoints(path, &mesh.spatial(), params.dim)?;
        Ok(Self::with_setpoints(cfg, params, mesh, setpoints)?)
    }

    fn with_setpoints(
        cfg: &RunConfig,
        params: MaterialParams,
        mesh: SpaceTimeMesh,
        setpoints: SetPoints,
    ) -> stringopt_core::Result<Self> {
        let base = node_value(&setpoints.r_i, mesh.n_s, params.dim);
        let trajectory = Trajectory::new(cfg.scenario.phase, cfg.direction(), base)?;
        Ok(Scenario {
            params,
            mesh,
            trajectory,
            setpoints,
        })
    }

    pub fn system(&self) -> stringopt_core::Result<SemiDiscreteSystem> {
        SemiDiscreteSystem::new(self.mesh.spatial(), self.params)
    }

    pub fn problem(&self, cfg: &RunConfig) -> stringopt_core::Result<OcpProblem> {
        OcpProblem::new(
            self.mesh.clone(),
            self.params,
            self.trajectory,
            self.setpoints.clone(),
            cfg.scenario.alpha,
            cfg.discretization.quadrature_order,
        )
    }

    pub fn tip(&self) -> Vec3 {
        self.trajectory.base
    }

    pub fn holding_force(&self) -> stringopt_core::Result<Vec3> {
        self.system()?.holding_force(&self.setpoints.r_i)
    }
}

pub fn solve(cfg: &RunConfig, scenario: &Scenario) -> Result<OcpSolution, CliError> {
    Ok(solve_ocp(&scenario.problem(cfg)?, &cfg.newton())?)
}

pub fn simulate(cfg: &RunConfig, scenario: &Scenario, control: &ControlSeries) -> Result<SimResult, CliError> {
    Ok(run_simulation(
        &scenario.system()?,
        &scenario.setpoints,
        control,
        cfg.discretization.tau,
        cfg.scenario.t_start,
        cfg.scenario.t_end,
        &scenario.trajectory,
        &cfg.step_newton(),
    )?)
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn artifact_path(cfg: &RunConfig, artifact: Artifact) -> PathBuf {
    cfg.output.dir.join(artifact.file_name())
}

pub fn write_setpoints(cfg: &RunConfig, scenario: &Scenario) -> Result<Vec<PathBuf>, CliError> {
    if !cfg.wants(Artifact::Setpoints) {
        return Ok(Vec::new());
    }
    prepare_dir(&cfg.output.dir)?;
    let path = artifact_path(cfg, Artifact::Setpoints);
    csv_io::write_setpoints(&path, &scenario.mesh.spatial(), &scenario.setpoints, scenario.params.dim)?;
    Ok(vec![path])
}

pub fn write_solution(cfg: &RunConfig, scenario: &Scenario, sol: &OcpSolution) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output.dir)?;
    let mut written = Vec::new();
    if cfg.wants(Artifact::Field) {
        let path = artifact_path(cfg, Artifact::Field);
        csv_io::write_field(&path, &scenario.mesh, &sol.fields, scenario.params.dim)?;
        written.push(path);
    }
    if cfg.wants(Artifact::Control) {
        let path = artifact_path(cfg, Artifact::Control);
        csv_io::write_control(&path, &sol.control)?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_simulation(cfg: &RunConfig, scenario: &Scenario, sim: &SimResult) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output.dir)?;
    let d = scenario.params.dim;
    let mut written = Vec::new();
    if cfg.wants(Artifact::Output) {
        let path = artifact_path(cfg, Artifact::Output);
        csv_io::write_output(&path, sim, &scenario.trajectory, d)?;
        written.push(path);
    }
    if cfg.wants(Artifact::Snapshots) {
        let path = artifact_path(cfg, Artifact::Snapshots);
        csv_io::write_snapshots(&path, sim, &scenario.mesh.spatial(), &cfg.snapshot_times(), d)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub tip: Vec3,
    pub holding_force: Vec3,
    pub newton_iterations: usize,
    pub continuation_stages: usize,
    pub final_residual: f64,
    pub cost: CostBreakdown,
    pub metrics: TrackingMetrics,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
    pub wall_time: Duration,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        writeln!(f, "rest tip          {:?}", self.tip)?;
        writeln!(f, "holding force     {:?}", self.holding_force)?;
        writeln!(
            f,
            "newton            {} iterations, {} stage(s), residual {:.3e}",
            self.newton_iterations, self.continuation_stages, self.final_residual
        )?;
        writeln!(
            f,
            "cost              control {:.6e}  tracking {:.6e}  total {:.6e}",
            self.cost.control, self.cost.tracking, self.cost.total
        )?;
        let m = &self.metrics;
        writeln!(
            f,
            "tracking error    max {:.6e}  per component {:?}  integral {:.6e}  rms {:.6e}",
            m.max_abs, m.max_abs_per_component, m.integral_sq, m.rms
        )?;
        for p in &self.files {
            writeln!(f, "wrote             {}", p.display())?;
        }
        write!(f, "wall time         {:.3} s", self.wall_time.as_secs_f64())
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub scenario: Scenario,
    pub solution: OcpSolution,
    pub simulation: SimResult,
    pub summary: Summary,
}

/// Rest states, optimal control and verification run, writing the selected
/// artifacts into the output directory.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutcome, CliError> {
    let start = Instant::now();
    let scenario = Scenario::from_config(cfg)?;
    let mut files = write_setpoints(cfg, &scenario)?;
    let solution = solve(cfg, &scenario)?;
    files.extend(write_solution(cfg, &scenario, &solution)?);
    let simulation = simulate(cfg, &scenario, &solution.control)?;
    files.extend(write_simulation(cfg, &scenario, &simulation)?);
    let summary = Summary {
        tip: scenario.tip(),
        holding_force: scenario.holding_force()?,
        newton_iterations: solution.report.iterations,
        continuation_stages: solution.stages,
        final_residual: solution.report.final_residual(),
        cost: solution.cost,
        metrics: simulation.metrics,
        warnings: wave_speed_warning(cfg).into_iter().collect(),
        files,
        wall_time: start.elapsed(),
    };
    Ok(PipelineOutcome {
        scenario,
        solution,
        simulation,
        summary,
    })
}
