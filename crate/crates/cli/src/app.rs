//! Subcommands of the `stringopt` binary.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::check::run_checks;
use crate::config::wave_speed_warning;
use crate::pipeline::{self, Scenario};
use crate::{csv_io, load_config, Artifact, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "stringopt", version, about = "Feed-forward control of a hanging string")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overrides `output.dir`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tracking weight, overrides `scenario.alpha`
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Static rest states only; writes setpoints.csv
    Static,
    /// Optimal control from setpoints.csv; writes field.csv and control.csv
    Solve,
    /// Time stepping driven by control.csv; writes output.csv and snapshots.csv
    Simulate,
    /// All stages
    Pipeline,
    /// Derivative self-tests and the wave travel time diagnostic
    Check {
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        states: usize,
    },
}

pub fn settings(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(alpha) = cli.alpha {
        cfg.scenario.alpha = alpha;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Executes one subcommand.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = settings(cli)?;
    let say = |msg: String| {
        if !cli.quiet {
            println!("{msg}");
        }
    };
    let dir = &cfg.output.dir;
    match &cli.command {
        Command::Static => {
            let scenario = Scenario::from_config(&cfg)?;
            say(format!("rest tip       {:?}", scenario.tip()));
            say(format!("holding force  {:?}", scenario.holding_force()?));
            let mut cfg = cfg.clone();
            cfg.output.artifacts = vec![Artifact::Setpoints];
            for p in pipeline::write_setpoints(&cfg, &scenario)? {
                say(format!("wrote          {}", p.display()));
            }
        }
        Command::Solve => {
            let scenario = Scenario::from_file(&cfg, &dir.join(Artifact::Setpoints.file_name()))?;
            let sol = pipeline::solve(&cfg, &scenario)?;
            say(format!(
                "newton         {} iterations, {} stage(s), residual {:.3e}",
                sol.report.iterations,
                sol.stages,
                sol.report.final_residual()
            ));
            say(format!(
                "cost           control {:.6e}  tracking {:.6e}  total {:.6e}",
                sol.cost.control, sol.cost.tracking, sol.cost.total
            ));
            for p in pipeline::write_solution(&cfg, &scenario, &sol)? {
                say(format!("wrote          {}", p.display()));
            }
        }
        Command::Simulate => {
            let scenario = Scenario::from_file(&cfg, &dir.join(Artifact::Setpoints.file_name()))?;
            let control = csv_io::read_control(&dir.join(Artifact::Control.file_name()), scenario.params.dim)?;
            let sim = pipeline::simulate(&cfg, &scenario, &control)?;
            let m = sim.metrics;
            say(format!(
                "tracking error max {:.6e}  per component {:?}  integral {:.6e}  rms {:.6e}",
                m.max_abs, m.max_abs_per_component, m.integral_sq, m.rms
            ));
            for p in pipeline::write_simulation(&cfg, &scenario, &sim)? {
                say(format!("wrote          {}", p.display()));
            }
        }
        Command::Pipeline => {
            let outcome = pipeline::run_pipeline(&cfg)?;
            say(outcome.summary.to_string());
        }
        Command::Check { seed, states } => {
            let report = run_checks(&cfg.material(), *seed, *states);
            say(report.to_string());
            match wave_speed_warning(&cfg) {
                Some(w) => say(format!("warning: {w}")),
                None => say("wave travel time is shorter than the actuation phase".into()),
            }
            if report.failures() > 0 {
                return Err(CliError::CheckFailed(report.failures()));
            }
        }
    }
    // the pipeline summary already lists warnings unless quiet
    let reported = matches!(cli.command, Command::Check { .. }) || (matches!(cli.command, Command::Pipeline) && !cli.quiet);
    if !reported {
        if let Some(w) = wave_speed_warning(&cfg) {
            eprintln!("warning: {w}");
        }
    }
    Ok(())
}

/// Prints the error chain to stderr and returns the process exit code.
pub fn report(result: Result<(), CliError>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    const SMALL: &str = "[discretization]\nn_s = 4\nn_t = 30\ntau = 0.2\n";

    fn cli(dir: &Path, args: &[&str]) -> Cli {
        let config = dir.join("run.toml");
        if !config.exists() {
            std::fs::write(&config, SMALL).unwrap();
        }
        let mut argv = vec!["stringopt", "--quiet", "--config", config.to_str().unwrap(), "--out"];
        let out = dir.join("out");
        argv.push(out.to_str().unwrap());
        argv.extend_from_slice(args);
        Cli::try_parse_from(argv).unwrap()
    }

    fn listing(dir: &Path) -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .map(|it| it.map(|e| e.unwrap().file_name().into_string().unwrap()).collect())
            .unwrap_or_default();
        names.sort();
        names
    }

    #[test]
    fn static_writes_only_setpoints() {
        let dir = tempfile::tempdir().unwrap();
        run(&cli(dir.path(), &["static"])).unwrap();
        assert_eq!(listing(&dir.path().join("out")), ["setpoints.csv"]);
    }

    #[test]
    fn staged_run_matches_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        for stage in ["static", "solve", "simulate"] {
            run(&cli(dir.path(), &[stage])).unwrap();
        }
        let staged = dir.path().join("out");
        let whole = tempfile::tempdir().unwrap();
        std::fs::copy(dir.path().join("run.toml"), whole.path().join("run.toml")).unwrap();
        run(&cli(whole.path(), &["pipeline"])).unwrap();
        let names = listing(&staged);
        assert_eq!(names, ["control.csv", "field.csv", "output.csv", "setpoints.csv", "snapshots.csv"]);
        for name in names {
            let a = std::fs::read(staged.join(&name)).unwrap();
            let b = std::fs::read(whole.path().join("out").join(&name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cli(dir.path(), &["static"]);
        c.alpha = Some(-1.0);
        assert_eq!(report(run(&c)), 2);
        assert_eq!(report(run(&cli(dir.path(), &["solve"]))), 4);

        let tight = tempfile::tempdir().unwrap();
        std::fs::write(tight.path().join("run.toml"), format!("{SMALL}[solver]\nmax_iterations = 1\ncontinuation_steps = 1\n")).unwrap();
        run(&cli(tight.path(), &["static"])).unwrap();
        assert_eq!(report(run(&cli(tight.path(), &["solve"]))), 3);

        let broken = tempfile::tempdir().unwrap();
        std::fs::write(broken.path().join("run.toml"), "[material]\ncolour = 1\n").unwrap();
        assert_eq!(report(run(&cli(broken.path(), &["pipeline"]))), 2);
    }

    #[test]
    fn check_subcommand_passes() {
        let dir = tempfile::tempdir().unwrap();
        run(&cli(dir.path(), &["check", "--states", "1"])).unwrap();
        assert!(!dir.path().join("out").exists());
    }
}
